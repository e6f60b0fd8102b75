//! The full verification suite as numbered criteria, each producing a
//! certificate. Shared by the acceptance tests and the `reproduce` command.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::{Budget, Meter};
use crate::certificate::Certificate;
use crate::constructions::{brock_matrix, explicit_counterexample_sets, verify_theorem_main2};
use crate::davey::{decompose_davey, enumerate_davey};
use crate::error::Result;
use crate::field::{Ambient, PointSet, PrimeModulus, ResidueMatrix, Subspace};
use crate::fourier::{balanced_certificate, elementary_symmetric, is_balanced};
use crate::search::{
    brute_force_fuglede, enumerate_special_dephased, verify_fuglede_dim3, SizeFilter, SymmetryBreaking,
};
use crate::spectral::{dot_matrix, is_butson_hadamard, is_log_hadamard, is_spectral_pair};
use crate::tiling::{
    is_tiling_pair, k_tile_with_hyperplane, lift_to_product_tiling, tiling_conditions_crosscheck, HyperplaneTiling,
    Lift,
};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_f00d;

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "2p x 2p construction is log-Hadamard for every nonsquare n"),
    (2, "rank of the construction is 4 or 5, and 4 exactly when n = p - 1"),
    (3, "non-tiling spectral sets of size 2p in Z_p^5 and Z_p^4"),
    (4, "explicit spectral pairs reproduce the construction"),
    (5, "Z_3^3: unique special dephased 6x6 matrix has rank 4"),
    (6, "brute force in Z_2^2, Z_3^2, Z_2^3"),
    (7, "Davey matrix counts and decompositions"),
    (8, "symmetric-function test for balanced vectors"),
    (9, "equivalent tiling and spectral conditions agree on random pairs"),
    (10, "hyperplane 2-tiling and lift to a product tiling"),
    (11, "no spectral set strictly between p^(d-1) and p^d"),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: String,
    pub certificate: Certificate,
    pub elapsed_ms: u64,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        self.certificate.passed()
    }
}

fn pm(p: u32) -> PrimeModulus {
    PrimeModulus::new(p).expect("fixed primes")
}

/// Run criterion `id` (1 to 11). Errors from the library are recorded as
/// failed checks rather than returned.
pub fn run_criterion(id: u8, seed: u64) -> CriterionOutcome {
    let start = Instant::now();
    let title = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map_or("unknown criterion", |(_, t)| t)
        .to_string();
    let mut cert = Certificate::new(title.clone());
    let result = match id {
        1 => construction_is_log_hadamard(&mut cert),
        2 => construction_ranks(&mut cert),
        3 => non_tiling_spectral_sets(&mut cert),
        4 => explicit_pairs(&mut cert),
        5 => dimension_three(&mut cert),
        6 => small_brute_force(&mut cert),
        7 => davey_structure(&mut cert),
        8 => balanced_vectors(&mut cert, seed),
        9 => random_equivalences(&mut cert, seed),
        10 => tiling_and_lifting(&mut cert),
        11 => size_gap(&mut cert),
        _ => {
            cert.check("known criterion", false, format!("no criterion {id}"));
            Ok(())
        }
    };
    if let Err(e) = result {
        cert.check("completed without error", false, e.to_string());
    }
    CriterionOutcome {
        id,
        title,
        certificate: cert,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, seed)).collect()
}

pub fn markdown_report(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::from("# Verification report\n\n| # | claim | result | time |\n|---|---|---|---|\n");
    for o in outcomes {
        out.push_str(&format!(
            "| {} | {} | {} | {} ms |\n",
            o.id,
            o.title,
            if o.passed() { "pass" } else { "FAIL" },
            o.elapsed_ms
        ));
    }
    for o in outcomes {
        out.push_str(&format!("\n## {}. {}\n\n", o.id, o.title));
        for c in &o.certificate.checks {
            let mark = if c.passed { "x" } else { " " };
            if c.detail.is_empty() {
                out.push_str(&format!("- [{mark}] {}\n", c.name));
            } else {
                out.push_str(&format!("- [{mark}] {}: {}\n", c.name, c.detail));
            }
        }
        for n in &o.certificate.notes {
            out.push_str(&format!("- note: {n}\n"));
        }
    }
    out
}

const ODD_PRIMES: [u32; 5] = [3, 5, 7, 11, 13];

fn nonsquares(p: PrimeModulus) -> Vec<u32> {
    p.residues().filter(|&n| p.is_nonsquare(n)).collect()
}

fn construction_is_log_hadamard(cert: &mut Certificate) -> Result<()> {
    for q in ODD_PRIMES {
        let p = pm(q);
        let ns = nonsquares(p);
        let mut bad = Vec::new();
        for &n in &ns {
            if !is_log_hadamard(brock_matrix(p, n)?.matrix.matrix())?.is_log_hadamard {
                bad.push(n);
            }
        }
        cert.check(
            format!("p = {q}"),
            bad.is_empty(),
            format!("nonsquares {ns:?}, failing {bad:?}"),
        );
    }
    Ok(())
}

fn construction_ranks(cert: &mut Certificate) -> Result<()> {
    for q in ODD_PRIMES {
        let p = pm(q);
        let ranks: Vec<(u32, usize)> = nonsquares(p)
            .into_iter()
            .map(|n| brock_matrix(p, n).map(|l| (n, l.rank())))
            .collect::<Result<_>>()?;
        cert.check(
            format!("p = {q}: ranks in {{4, 5}}"),
            ranks.iter().all(|&(_, r)| r == 4 || r == 5),
            format!("{ranks:?}"),
        );
        if q % 4 == 3 {
            cert.check(
                format!("p = {q}: rank 4 exactly at n = {}", q - 1),
                ranks.iter().all(|&(n, r)| (r == 4) == (n == q - 1)),
                "",
            );
        }
    }
    Ok(())
}

fn non_tiling_spectral_sets(cert: &mut Certificate) -> Result<()> {
    for q in [3u32, 5, 7, 11] {
        let b = verify_theorem_main2(pm(q))?;
        let dims = if b.dim4.is_some() { "5 and 4" } else { "5" };
        cert.check(
            format!("p = {q}"),
            b.proven() && (q % 4 != 3 || b.dim4.is_some()),
            format!("dimensions {dims}; {} checks", b.certificate.checks.len()),
        );
        for f in b.certificate.failures() {
            cert.note(format!("p = {q}: {} failed", f.name));
        }
    }
    Ok(())
}

fn explicit_pairs(cert: &mut Certificate) -> Result<()> {
    for q in [3u32, 7] {
        let p = pm(q);
        let pair = explicit_counterexample_sets(p)?;
        cert.check(
            format!("p = {q}: spectral pair"),
            is_spectral_pair(&pair.set, &pair.spectrum)?.is_spectral,
            format!("|E| = {}", pair.set.len()),
        );
        cert.check(
            format!("p = {q}: dot matrix is log-Hadamard"),
            is_log_hadamard(&pair.dot_matrix)?.is_log_hadamard,
            "",
        );
        cert.check(
            format!("p = {q}: dot matrix equals the n = p - 1 construction"),
            pair.dot_matrix == *brock_matrix(p, q - 1)?.matrix.matrix(),
            "",
        );
    }
    Ok(())
}

/// The 6 × 6 special dephased matrix over `Z_3`.
pub fn unique_six_by_six() -> ResidueMatrix {
    ResidueMatrix::from_rows(
        pm(3),
        vec![
            vec![0, 0, 0, 0, 0, 0],
            vec![0, 1, 2, 0, 1, 2],
            vec![0, 2, 1, 1, 0, 2],
            vec![0, 0, 2, 1, 2, 1],
            vec![0, 1, 1, 2, 2, 0],
            vec![0, 2, 0, 2, 1, 1],
        ],
    )
    .expect("valid residues")
}

fn dimension_three(cert: &mut Certificate) -> Result<()> {
    let e = enumerate_special_dephased(
        pm(3),
        2,
        SymmetryBreaking::Triplet,
        None,
        &Meter::new(Budget::default()),
    )?;
    let expected = unique_six_by_six();
    cert.check(
        "exactly one canonical matrix",
        e.matrices.len() == 1,
        format!("{} found", e.matrices.len()),
    );
    cert.check(
        "entry-identical to the known matrix",
        e.matrices.first().is_some_and(|m| m.matrix == expected),
        "",
    );
    cert.check(
        "rank 4",
        e.matrices.first().is_some_and(|m| m.rank == 4 && m.matrix.rank() == 4),
        "",
    );
    let r = verify_fuglede_dim3(pm(3), false, Budget::default())?;
    cert.check(
        "Z_3^3 verdict proven",
        r.proven(),
        format!("{} nodes", r.nodes_explored),
    );
    let r2 = verify_fuglede_dim3(pm(2), false, Budget::default())?;
    cert.check("Z_2^3 verdict proven", r2.proven(), "vacuous");
    Ok(())
}

fn small_brute_force(cert: &mut Certificate) -> Result<()> {
    for (q, d) in [(2u32, 2usize), (3, 2), (2, 3)] {
        let r = brute_force_fuglede(pm(q), d, SizeFilter::All, Budget::default())?;
        cert.check(
            format!("Z_{q}^{d}"),
            r.proven(),
            format!("{:?}, {} nodes", r.verdict, r.nodes_explored),
        );
        if (q, d) == (2, 3) {
            let six = r.details["per_size"]
                .as_array()
                .and_then(|rows| rows.iter().find(|row| row["size"] == 6))
                .map(|row| row["spectral"].as_u64() == Some(0));
            cert.check("no spectral set of size 6 in Z_2^3", six == Some(true), "");
        }
    }
    Ok(())
}

fn davey_structure(cert: &mut Certificate) -> Result<()> {
    let meter = Meter::new(Budget::default());
    for (q, max_m) in [(2u32, 8u64), (3, 5)] {
        let mut counts = Vec::new();
        let mut ok = true;
        let mut round_trip = true;
        for m in 0..=max_m {
            let all = enumerate_davey(pm(q), m, &meter)?;
            let expected = if q == 2 {
                usize::from(m % 2 == 0)
            } else {
                ((m + 1) * (m + 2) / 2) as usize
            };
            ok &= all.len() == expected;
            counts.push(all.len());
            for x in &all {
                round_trip &= decompose_davey(x).is_ok_and(|dec| dec.reconstruct() == x.entries());
            }
        }
        cert.check(
            format!("p = {q}: counts for m = 0..={max_m}"),
            ok,
            format!("{counts:?}"),
        );
        cert.check(format!("p = {q}: decompose then reconstruct"), round_trip, "");
    }
    Ok(())
}

fn balanced_vectors(cert: &mut Certificate, seed: u64) -> Result<()> {
    let p3 = pm(3);
    let mut agree = 0usize;
    let mut total = 0usize;
    for code in 0..3usize.pow(6) {
        let v: Vec<u32> = (0..6).map(|k| (code / 3usize.pow(k) % 3) as u32).collect();
        total += 1;
        agree += usize::from(balanced_certificate(p3, &v)?.pass() == is_balanced(p3, &v));
    }
    cert.check("Z_3, length 6, exhaustive", agree == total, format!("{agree}/{total}"));

    let p5 = pm(5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut agree, mut positives) = (0usize, 0usize);
    for k in 0..10_000 {
        // every other vector is a shuffled balanced one so both answers occur
        let v: Vec<u32> = if k % 2 == 0 {
            let mut v: Vec<u32> = (0..10).map(|i| i % 5).collect();
            for i in (1..10).rev() {
                v.swap(i, rng.gen_range(0..=i));
            }
            v
        } else {
            (0..10).map(|_| rng.gen_range(0..5)).collect()
        };
        let b = is_balanced(p5, &v);
        positives += usize::from(b);
        agree += usize::from(balanced_certificate(p5, &v)?.pass() == b);
    }
    cert.check(
        "Z_5, length 10, 10^4 random vectors",
        agree == 10_000,
        format!("{agree}/10000 agree, {positives} balanced"),
    );

    let primes: Vec<u32> = (2..=31).filter(|&n| crate::field::is_prime(u64::from(n))).collect();
    let wilson = primes.iter().all(|&q| {
        let p = pm(q);
        let v: Vec<u32> = p.residues().collect();
        elementary_symmetric(p, &v)[q as usize - 2] == q - 1
    });
    cert.check("σ_{p-1}(0, ..., p-1) = -1 for p ≤ 31", wilson, format!("{primes:?}"));
    Ok(())
}

fn random_subset(rng: &mut ChaCha8Rng, ambient: &Ambient, k: usize) -> PointSet {
    let mut idx: Vec<usize> = (0..ambient.order()).collect();
    for i in 0..k {
        let j = rng.gen_range(i..idx.len());
        idx.swap(i, j);
    }
    PointSet::from_indices(ambient.clone(), idx[..k].iter().copied())
}

fn random_subspace(rng: &mut ChaCha8Rng, p: PrimeModulus, d: usize, k: usize) -> Result<Subspace> {
    loop {
        let vectors: Vec<Vec<u32>> = (0..k)
            .map(|_| (0..d).map(|_| rng.gen_range(0..p.get())).collect())
            .collect();
        let s = Subspace::span(p, d, &vectors)?;
        if s.dim() == k {
            return Ok(s);
        }
    }
}

/// One point from each coset of `v`, chosen at random.
fn random_transversal(rng: &mut ChaCha8Rng, v: &Subspace) -> PointSet {
    let ambient = v.ambient();
    let elements = v.elements();
    let reps = v.coordinate_complement().elements();
    PointSet::from_indices(
        ambient.clone(),
        reps.indices().iter().map(|&w| {
            let e = elements.indices()[rng.gen_range(0..elements.len())];
            ambient.add(w, e)
        }),
    )
}

fn random_equivalences(cert: &mut Certificate, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    for (q, d) in [(3u32, 2usize), (3, 3), (5, 2)] {
        let p = pm(q);
        let ambient = Ambient::homogeneous(p, d)?;
        let (mut tiling_agree, mut tiling_pos) = (0, 0);
        let (mut spectral_agree, mut spectral_pos) = (0, 0);
        for k in 0..500 {
            let r = rng.gen_range(0..=d);
            let (e, a) = if k % 2 == 0 {
                let v = random_subspace(&mut rng, p, d, d - r)?;
                let e = random_transversal(&mut rng, &v);
                let shift = ambient.decode(rng.gen_range(0..ambient.order()));
                (e.translate(&shift)?, v.elements())
            } else {
                let e = random_subset(&mut rng, &ambient, (q as usize).pow(r as u32));
                let a = random_subset(&mut rng, &ambient, (q as usize).pow((d - r) as u32));
                (e, a)
            };
            let conditions = tiling_conditions_crosscheck(&e, &a)?;
            let tiles = is_tiling_pair(&e, &a)?.is_tiling;
            tiling_pos += usize::from(tiles);
            tiling_agree += usize::from(conditions.unanimous() && conditions.unique_sums == tiles);

            let (e, b) = if k % 2 == 0 {
                let dim = rng.gen_range(0..=d);
                let v = random_subspace(&mut rng, p, d, dim)?;
                (random_transversal(&mut rng, &v), v.orthogonal_complement().elements())
            } else {
                let size = rng.gen_range(1..=ambient.order().min(12));
                (
                    random_subset(&mut rng, &ambient, size),
                    random_subset(&mut rng, &ambient, size),
                )
            };
            let c = is_spectral_pair(&e, &b)?.is_spectral;
            let m = dot_matrix(&e, &b)?;
            let butson = is_butson_hadamard(&m);
            let log = is_log_hadamard(&m)?.is_log_hadamard;
            spectral_pos += usize::from(c);
            spectral_agree += usize::from(c == butson && butson == log);
        }
        cert.check(
            format!("Z_{q}^{d}: tiling conditions"),
            tiling_agree == 500,
            format!("{tiling_agree}/500 agree, {tiling_pos} tiling"),
        );
        cert.check(
            format!("Z_{q}^{d}: spectral conditions"),
            spectral_agree == 500,
            format!("{spectral_agree}/500 agree, {spectral_pos} spectral"),
        );
        cert.check(
            format!("Z_{q}^{d}: both answers sampled"),
            tiling_pos > 0 && tiling_pos < 500 && spectral_pos > 0 && spectral_pos < 500,
            "",
        );
    }
    Ok(())
}

fn tiling_and_lifting(cert: &mut Certificate) -> Result<()> {
    for q in [3u32, 5, 7] {
        let p = pm(q);
        let b = verify_theorem_main2(p)?;
        let mut sets = vec![("Z_p^5", b.dim5.pair.set.clone())];
        if let Some(x) = &b.explicit {
            sets.push(("explicit", x.set.clone()));
        }
        for (label, e) in sets {
            let k_ok = matches!(k_tile_with_hyperplane(&e)?, HyperplaneTiling::KTiles { k: 2, .. });
            cert.check(format!("p = {q}, {label}: 2-tiles with a hyperplane"), k_ok, "");
            let lift_ok = match lift_to_product_tiling(&e, Budget::default())? {
                Lift::Lifted(l) => {
                    let expected_moduli: Vec<u32> = e.ambient().moduli().iter().copied().chain([2]).collect();
                    let projected: Vec<Vec<u32>> = l
                        .lifted
                        .coords()
                        .into_iter()
                        .map(|mut x| {
                            x.pop();
                            x
                        })
                        .collect();
                    let projection = PointSet::new(e.ambient().clone(), projected).is_ok_and(|s| s == e);
                    l.lifted.ambient().moduli() == expected_moduli.as_slice()
                        && is_tiling_pair(&l.lifted, &l.partner)?.is_tiling
                        && projection
                }
                Lift::AlreadyTiles { .. } => false,
            };
            cert.check(
                format!("p = {q}, {label}: lift tiles Z_p^d x Z_2 and projects bijectively"),
                lift_ok,
                "",
            );
        }
    }
    Ok(())
}

fn size_gap(cert: &mut Certificate) -> Result<()> {
    for (q, d) in [(3u32, 2usize), (2, 3)] {
        let r = brute_force_fuglede(pm(q), d, SizeFilter::All, Budget::default())?;
        let lo = (q as u64).pow(d as u32 - 1);
        let hi = (q as u64).pow(d as u32);
        let sizes: Vec<u64> = r.details["spectral_sizes"]
            .as_array()
            .map(|a| a.iter().filter_map(|v| v.as_u64()).collect())
            .unwrap_or_default();
        cert.check("search exhausted", r.proven(), format!("Z_{q}^{d}"));
        cert.check(
            format!("Z_{q}^{d}: no spectral size in ({lo}, {hi})"),
            !sizes.iter().any(|&s| s > lo && s < hi),
            format!("spectral sizes {sizes:?}"),
        );
    }
    Ok(())
}
