//! The `2p × 2p` log-Hadamard matrix `L = [[A, nA], [B, C]]` over `Z_p`
//! with `A_ij = 2ij − i²`, `B_ij = (j − ni)²`, `C_ij = n(i − j)²` for a
//! nonsquare `n`, and the spectral sets of size `2p` it produces. Since
//! `2p` does not divide `p^d`, none of them tile.

use serde::Serialize;

use crate::budget::Budget;
use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::field::{find_nonsquare, Ambient, PointSet, PrimeModulus, ResidueMatrix, RowSpaceBasis};
use crate::fourier::is_balanced;
use crate::spectral::{
    dot_matrix_ordered, factor_log_hadamard, is_log_hadamard, is_spectral_pair, LogHadamard, SpectralPairRecord,
};
use crate::tiling::{find_tiling_partner, PartnerSearch};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrockMatrix {
    pub p: u32,
    pub n: u32,
    pub matrix: LogHadamard,
}

impl BrockMatrix {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.matrix.modulus()
    }
}

fn require_odd(p: PrimeModulus) -> Result<()> {
    if p.is_odd() {
        Ok(())
    } else {
        Err(Error::NoNonsquare(p.get()))
    }
}

fn brock_entries(p: PrimeModulus, n: u32) -> Result<ResidueMatrix> {
    let q = p.get() as usize;
    let n = i64::from(n);
    ResidueMatrix::from_fn(p, 2 * q, 2 * q, |r, c| {
        let (i, j) = ((r % q) as i64, (c % q) as i64);
        match (r < q, c < q) {
            (true, true) => 2 * i * j - i * i,
            (true, false) => n * (2 * i * j - i * i),
            (false, true) => (j - n * i) * (j - n * i),
            (false, false) => n * (i - j) * (i - j),
        }
    })
}

pub fn brock_matrix(p: PrimeModulus, n: u32) -> Result<BrockMatrix> {
    require_odd(p)?;
    if n >= p.get() || !p.is_nonsquare(n) {
        return Err(Error::NotNonsquare { n, p: p.get() });
    }
    let matrix = LogHadamard::new(brock_entries(p, n)?)
        .map_err(|e| Error::InternalInconsistency(format!("constructed matrix is not log-Hadamard: {e}")))?;
    Ok(BrockMatrix { p: p.get(), n, matrix })
}

/// `n` = the least nonsquare, or `p − 1` when `rank4` is requested (which
/// needs `p ≡ 3 mod 4`).
pub fn default_nonsquare(p: PrimeModulus, rank4: bool) -> Result<u32> {
    require_odd(p)?;
    if rank4 {
        if p.get() % 4 != 3 {
            return Err(Error::WrongResidueClass(p.get()));
        }
        Ok(p.get() - 1)
    } else {
        find_nonsquare(p)
    }
}

/// `[f(j) | g(j)]` for `j = 0..p`.
fn halves(p: PrimeModulus, f: impl Fn(i64) -> i64, g: impl Fn(i64) -> i64) -> Vec<u32> {
    let q = i64::from(p.get());
    (0..q)
        .map(|j| p.reduce(f(j)))
        .chain((0..q).map(|j| p.reduce(g(j))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningVectors {
    pub p: u32,
    pub n: u32,
    /// `[j|nj], [1|n], [j|j], [n|1], [j²|nj²]`.
    pub vectors: Vec<Vec<u32>>,
    pub labels: Vec<&'static str>,
    pub rows_in_span: bool,
    pub top_rows_in_span: bool,
    pub bottom_differences_in_span: bool,
    /// `[j|j], [j|nj], [1|n], [j²|nj²]` are independent, so the rank is at least 4.
    pub lower_four_independent: bool,
    pub span_rank: usize,
    pub rank: usize,
    pub certificate: Certificate,
}

/// The five vectors spanning the row space, with the membership and
/// independence facts that pin the rank to 4 or 5.
pub fn brock_spanning_vectors(p: PrimeModulus, n: u32) -> Result<SpanningVectors> {
    let l = brock_matrix(p, n)?;
    let m = l.matrix.matrix();
    let q = p.get() as usize;
    let ni = i64::from(n);
    let j_nj = halves(p, |j| j, |j| ni * j);
    let one_n = halves(p, |_| 1, |_| ni);
    let j_j = halves(p, |j| j, |j| j);
    let n_one = halves(p, |_| ni, |_| 1);
    let sq = halves(p, |j| j * j, |j| ni * j * j);
    let vectors = vec![j_nj.clone(), one_n.clone(), j_j.clone(), n_one.clone(), sq.clone()];

    let basis_of = |vs: &[&Vec<u32>]| {
        let mut b = RowSpaceBasis::new(p, 2 * q);
        let independent = vs.iter().filter(|v| b.insert(v)).count() == vs.len();
        (b, independent)
    };
    let (all, _) = basis_of(&vectors.iter().collect::<Vec<_>>());
    let (top, _) = basis_of(&[&j_nj, &one_n]);
    let (bottom, _) = basis_of(&[&j_j, &n_one]);
    let (_, lower_four_independent) = basis_of(&[&j_j, &j_nj, &one_n, &sq]);

    let rows_in_span = (0..2 * q).all(|i| all.contains(m.row(i)));
    let top_rows_in_span = (0..q).all(|i| top.contains(m.row(i)));
    let bottom_differences_in_span = (q..2 * q).all(|i| {
        (i + 1..2 * q).all(|k| {
            let d: Vec<u32> = m.row(i).iter().zip(m.row(k)).map(|(&a, &b)| p.sub(a, b)).collect();
            bottom.contains(&d)
        })
    });
    let rank = l.rank();

    let mut cert = Certificate::new(format!("rank of L(p={}, n={n}) lies in [4, 5]", p.get()));
    cert.check("rows in span of the five vectors", rows_in_span, "rank ≤ 5");
    cert.check("top rows in span{[j|nj],[1|n]}", top_rows_in_span, "");
    cert.check(
        "bottom row differences in span{[j|j],[n|1]}",
        bottom_differences_in_span,
        "",
    );
    cert.check(
        "[j|j],[j|nj],[1|n],[j²|nj²] independent",
        lower_four_independent,
        "j² has (p+1)/2 values, a linear function 1 or p",
    );
    cert.check(
        "computed rank in [4, 5]",
        (4..=5).contains(&rank),
        format!("rank = {rank}"),
    );
    if n == p.get() - 1 {
        cert.note("n = −1 makes [n|1] = −[1|n], so the five vectors span only 4 dimensions");
    }
    Ok(SpanningVectors {
        p: p.get(),
        n,
        vectors,
        labels: vec!["[j|nj]", "[1|n]", "[j|j]", "[n|1]", "[j^2|nj^2]"],
        rows_in_span,
        top_rows_in_span,
        bottom_differences_in_span,
        lower_four_independent,
        span_rank: all.rank(),
        rank,
        certificate: cert,
    })
}

/// `Q(x) = a x² + b x + c` over `Z_p`, `a ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticPolynomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl QuadraticPolynomial {
    pub fn new(p: PrimeModulus, a: i64, b: i64, c: i64) -> Result<Self> {
        let a = p.reduce(a);
        if a == 0 {
            return Err(Error::InvalidArgument("leading coefficient is zero".into()));
        }
        Ok(Self {
            a,
            b: p.reduce(b),
            c: p.reduce(c),
        })
    }

    pub fn eval(&self, p: PrimeModulus, x: u32) -> u32 {
        p.add(p.mul(p.add(p.mul(self.a, x), self.b), x), self.c)
    }

    /// `b² − 4a(c − μ)`.
    pub fn discriminant(&self, p: PrimeModulus, mu: u32) -> u32 {
        p.sub(
            p.mul(self.b, self.b),
            p.mul(p.mul(4 % p.get(), self.a), p.sub(self.c, mu)),
        )
    }
}

/// `|Q⁻¹(μ)|` from the discriminant: 2, 1 or 0 as it is a nonzero square,
/// zero, or a nonsquare.
pub fn quad_preimage_count(p: PrimeModulus, q: &QuadraticPolynomial, mu: u32) -> Result<u8> {
    require_odd(p)?;
    let disc = q.discriminant(p, mu);
    Ok(match p.legendre(disc) {
        0 => 1,
        1 => 2,
        _ => 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticPairVerdict {
    /// `|Q₁⁻¹(μ)| + |Q₂⁻¹(μ)| = 2` for every `μ`, by counting.
    pub balanced: bool,
    /// `ã = n a` and `b̃² − 4ãc̃ = n (b² − 4ac)` for a nonsquare `n`.
    pub discriminant_criterion: bool,
    pub first_bad_mu: Option<u32>,
}

pub fn is_balanced_quadratic_pair(
    p: PrimeModulus,
    q1: &QuadraticPolynomial,
    q2: &QuadraticPolynomial,
) -> Result<QuadraticPairVerdict> {
    require_odd(p)?;
    let mut counts = vec![0u32; p.get() as usize];
    for x in p.residues() {
        counts[q1.eval(p, x) as usize] += 1;
        counts[q2.eval(p, x) as usize] += 1;
    }
    let first_bad_mu = counts.iter().position(|&c| c != 2).map(|m| m as u32);
    let ratio = p.mul(q2.a, p.inv(q1.a).expect("nonzero leading coefficient"));
    let d1 = q1.discriminant(p, 0);
    let d2 = q2.discriminant(p, 0);
    let discriminant_criterion = p.is_nonsquare(ratio) && d2 == p.mul(ratio, d1);
    Ok(QuadraticPairVerdict {
        balanced: first_bad_mu.is_none(),
        discriminant_criterion,
        first_bad_mu,
    })
}

/// Top row `i` minus bottom row `i′` of `L`, as `[Q₁(j) | Q₂(j)]`.
pub fn mixed_row_quadratics(
    p: PrimeModulus,
    n: u32,
    i: u32,
    i_prime: u32,
) -> Result<(QuadraticPolynomial, QuadraticPolynomial)> {
    let (n, i, k) = (i64::from(n), i64::from(i), i64::from(i_prime));
    Ok((
        QuadraticPolynomial::new(p, -1, 2 * n * k + 2 * i, -i * i - n * n * k * k)?,
        QuadraticPolynomial::new(p, -n, n * (2 * k + 2 * i), -n * (i * i + k * k))?,
    ))
}

/// `e_i = (i², 0, 2i, 0)`, `e_{i+p} = (−i², 2i, 0, 1)`,
/// `b_j = (−1, j, j, j²)`, `b_{j+p} = (1, j, −j, −j²)` in `Z_p^4`, for
/// `p ≡ 3 mod 4`. The dot matrix `e_i · b_j` is exactly `L(p, −1)`.
///
/// With `b_j = (−1, j, −j, j²)` instead, the pair is not spectral: top rows
/// `i ≠ 0` against bottom rows give unbalanced differences.
pub fn explicit_counterexample_sets(p: PrimeModulus) -> Result<SpectralPairRecord> {
    if p.get() % 4 != 3 {
        return Err(Error::WrongResidueClass(p.get()));
    }
    let q = i64::from(p.get());
    let v = |xs: [i64; 4]| xs.iter().map(|&x| p.reduce(x)).collect::<Vec<u32>>();
    let set_rows: Vec<Vec<u32>> = (0..q)
        .map(|i| v([i * i, 0, 2 * i, 0]))
        .chain((0..q).map(|i| v([-i * i, 2 * i, 0, 1])))
        .collect();
    let spectrum_rows: Vec<Vec<u32>> = (0..q)
        .map(|j| v([-1, j, j, j * j]))
        .chain((0..q).map(|j| v([1, j, -j, -j * j])))
        .collect();
    let ambient = Ambient::homogeneous(p, 4)?;
    let set = PointSet::new(ambient.clone(), set_rows.clone())?;
    let spectrum = PointSet::new(ambient, spectrum_rows.clone())?;
    let dot_matrix = dot_matrix_ordered(p, &set_rows, &spectrum_rows)?;
    if !is_spectral_pair(&set, &spectrum)?.is_spectral || !is_log_hadamard(&dot_matrix)?.is_log_hadamard {
        return Err(Error::InternalInconsistency(
            "explicit sets are not a spectral pair".into(),
        ));
    }
    Ok(SpectralPairRecord {
        set,
        spectrum,
        set_rows,
        spectrum_rows,
        dot_matrix,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleInstance {
    pub dim: usize,
    pub n: u32,
    pub rank: usize,
    pub pair: SpectralPairRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleBundle {
    pub p: u32,
    /// Spectral set of size `2p` in `Z_p^5`.
    pub dim5: CounterexampleInstance,
    /// Spectral set of size `2p` in `Z_p^4`, when `p ≡ 3 mod 4`.
    pub dim4: Option<CounterexampleInstance>,
    pub explicit: Option<SpectralPairRecord>,
    pub certificate: Certificate,
}

impl CounterexampleBundle {
    pub fn proven(&self) -> bool {
        self.certificate.passed()
    }
}

fn certify_non_tiling(cert: &mut Certificate, label: &str, pair: &SpectralPairRecord) -> Result<()> {
    let set = &pair.set;
    let order = set.ambient().order();
    cert.check(
        format!("{label}: spectral pair"),
        is_spectral_pair(set, &pair.spectrum)?.is_spectral,
        format!("|E| = |B| = {}", set.len()),
    );
    cert.check(
        format!("{label}: dot matrix is log-Hadamard"),
        is_log_hadamard(&pair.dot_matrix)?.is_log_hadamard,
        "",
    );
    let partner = find_tiling_partner(set, Budget::default())?;
    cert.check(
        format!("{label}: no tiling partner"),
        !order.is_multiple_of(set.len()) && matches!(partner, PartnerSearch::ProvenNone { .. }),
        format!("{} does not divide {order}", set.len()),
    );
    Ok(())
}

fn instance(p: PrimeModulus, n: u32, dim: usize, cert: &mut Certificate) -> Result<CounterexampleInstance> {
    let l = brock_matrix(p, n)?;
    let rank = l.rank();
    cert.check(
        format!("L(n={n}) is log-Hadamard"),
        is_log_hadamard(l.matrix.matrix())?.is_log_hadamard,
        format!("{0}x{0} over Z_{1}", 2 * p.get(), p.get()),
    );
    cert.check(format!("rank L(n={n}) ≤ {dim}"), rank <= dim, format!("rank = {rank}"));
    let pair = factor_log_hadamard(l.matrix.matrix())?.embed(dim)?;
    cert.check(
        format!("factored pair in Z_p^{dim} has size 2p"),
        pair.set.len() == 2 * p.get() as usize,
        "",
    );
    certify_non_tiling(cert, &format!("Z_p^{dim}"), &pair)?;
    Ok(CounterexampleInstance { dim, n, rank, pair })
}

/// Spectral sets of size `2p` that do not tile: in `Z_p^5` for every odd
/// `p`, and in `Z_p^4` when `p ≡ 3 mod 4`.
pub fn verify_theorem_main2(p: PrimeModulus) -> Result<CounterexampleBundle> {
    require_odd(p)?;
    let mut cert = Certificate::new(format!(
        "a non-tiling spectral set of size {} exists in Z_{}^5{}",
        2 * p.get(),
        p.get(),
        if p.get() % 4 == 3 { " and in Z_p^4" } else { "" }
    ));
    let dim5 = instance(p, default_nonsquare(p, false)?, 5, &mut cert)?;
    let (dim4, explicit) = if p.get() % 4 == 3 {
        let four = instance(p, p.get() - 1, 4, &mut cert)?;
        cert.check("rank L(n=−1) = 4", four.rank == 4, format!("rank = {}", four.rank));
        let explicit = explicit_counterexample_sets(p)?;
        certify_non_tiling(&mut cert, "explicit sets", &explicit)?;
        (Some(four), Some(explicit))
    } else {
        (None, None)
    };
    cert.note(
        "mixed top/bottom row differences are balanced because D₂(μ) = n·D₁(μ): ã = n·a and b̃² − 4ãc̃ = n(b² − 4ac)",
    );
    Ok(CounterexampleBundle {
        p: p.get(),
        dim5,
        dim4,
        explicit,
        certificate: cert,
    })
}

/// Whether the vector `[Q₁(j) | Q₂(j)]` is balanced, checked directly.
pub fn quadratic_pair_vector_balanced(p: PrimeModulus, q1: &QuadraticPolynomial, q2: &QuadraticPolynomial) -> bool {
    let v: Vec<u32> = p
        .residues()
        .map(|x| q1.eval(p, x))
        .chain(p.residues().map(|x| q2.eval(p, x)))
        .collect();
    is_balanced(p, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{k_tile_with_hyperplane, lift_to_product_tiling, HyperplaneTiling, Lift};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pm(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn nonsquares(p: u32) -> Vec<u32> {
        let squares: Vec<u32> = (1..p).map(|x| x * x % p).collect();
        (1..p).filter(|n| !squares.contains(n)).collect()
    }

    #[test]
    fn brock_examples() {
        let l = brock_matrix(pm(3), 2).unwrap();
        let m = l.matrix.matrix();
        assert_eq!(m.row(1), &[2, 1, 0, 1, 2, 0]);
        assert_eq!(m.row(3), &[0, 1, 1, 0, 2, 2]);
        for p in [3, 5, 7, 11, 13, 17, 19] {
            for n in nonsquares(p) {
                let l = brock_matrix(pm(p), n).unwrap();
                assert!(l.matrix.matrix().row(0).iter().all(|&x| x == 0));
                assert!(is_log_hadamard(l.matrix.matrix()).unwrap().is_log_hadamard);
            }
        }
        assert_eq!(brock_matrix(pm(5), 4), Err(Error::NotNonsquare { n: 4, p: 5 }));
        assert_eq!(brock_matrix(pm(2), 1), Err(Error::NoNonsquare(2)));
        assert_eq!(default_nonsquare(pm(5), true), Err(Error::WrongResidueClass(5)));
        assert_eq!(default_nonsquare(pm(7), true), Ok(6));
        assert_eq!(default_nonsquare(pm(7), false), Ok(3));
    }

    #[test]
    fn rank_bounds() {
        for p in [3, 5, 7, 11, 13] {
            for n in nonsquares(p) {
                let s = brock_spanning_vectors(pm(p), n).unwrap();
                assert!(s.certificate.passed(), "{:?}", s.certificate);
                assert!((4..=5).contains(&s.rank));
                assert_eq!(s.rank == 4, n == p - 1, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn preimage_examples() {
        let x2 = QuadraticPolynomial::new(pm(5), 1, 0, 0).unwrap();
        assert_eq!(quad_preimage_count(pm(5), &x2, 1).unwrap(), 2);
        assert_eq!(quad_preimage_count(pm(5), &x2, 0).unwrap(), 1);
        assert_eq!(quad_preimage_count(pm(5), &x2, 2).unwrap(), 0);
        assert!(QuadraticPolynomial::new(pm(5), 5, 1, 1).is_err());
    }

    #[test]
    fn preimage_count_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [5u32, 7, 11] {
            for _ in 0..500 {
                let q = QuadraticPolynomial::new(
                    pm(p),
                    rng.gen_range(1..p) as i64,
                    rng.gen_range(0..p) as i64,
                    rng.gen_range(0..p) as i64,
                )
                .unwrap();
                let mu = rng.gen_range(0..p);
                let direct = (0..p).filter(|&x| (q.a * x * x + q.b * x + q.c) % p == mu).count();
                assert_eq!(quad_preimage_count(pm(p), &q, mu).unwrap() as usize, direct);
            }
        }
    }

    #[test]
    fn quadratic_pairs() {
        for p in [3u32, 5, 7, 11] {
            for n in nonsquares(p) {
                let (q1, q2) = mixed_row_quadratics(pm(p), n, 0, 0).unwrap();
                assert_eq!((q1.a, q1.b, q1.c), (p - 1, 0, 0));
                let v = is_balanced_quadratic_pair(pm(p), &q1, &q2).unwrap();
                assert!(v.balanced && v.discriminant_criterion);
            }
        }
        let x2 = QuadraticPolynomial::new(pm(7), 1, 0, 0).unwrap();
        let v = is_balanced_quadratic_pair(pm(7), &x2, &x2).unwrap();
        assert!(!v.balanced && !v.discriminant_criterion);
        assert_eq!(v.first_bad_mu, Some(1));
    }

    #[test]
    fn mixed_rows_are_balanced_pairs() {
        for (p, n) in [(7u32, 3u32), (5, 2), (11, 2), (13, 5)] {
            let l = brock_matrix(pm(p), n).unwrap();
            let m = l.matrix.matrix();
            let q = p as usize;
            for i in 0..p {
                for k in 0..p {
                    let (q1, q2) = mixed_row_quadratics(pm(p), n, i, k).unwrap();
                    let diff: Vec<u32> = m
                        .row(i as usize)
                        .iter()
                        .zip(m.row(q + k as usize))
                        .map(|(&a, &b)| (a + p - b) % p)
                        .collect();
                    let expected: Vec<u32> = (0..p)
                        .map(|j| q1.eval(pm(p), j))
                        .chain((0..p).map(|j| q2.eval(pm(p), j)))
                        .collect();
                    assert_eq!(diff, expected);
                    let v = is_balanced_quadratic_pair(pm(p), &q1, &q2).unwrap();
                    assert!(v.balanced && v.discriminant_criterion);
                    assert!(quadratic_pair_vector_balanced(pm(p), &q1, &q2));
                }
            }
        }
    }

    #[test]
    fn explicit_sets() {
        let r = explicit_counterexample_sets(pm(3)).unwrap();
        assert_eq!(r.set_rows[1], vec![1, 0, 2, 0]);
        assert_eq!(r.spectrum_rows[1], vec![2, 1, 1, 1]);
        assert_eq!(r.dot_matrix, brock_matrix(pm(3), 2).unwrap().matrix.into_matrix());
        assert_eq!(r.set.len(), 6);
        let r7 = explicit_counterexample_sets(pm(7)).unwrap();
        assert_eq!(r7.set.len(), 14);
        assert!(is_spectral_pair(&r7.set, &r7.spectrum).unwrap().is_spectral);
        assert_eq!(r7.dot_matrix, brock_matrix(pm(7), 6).unwrap().matrix.into_matrix());
        assert_eq!(explicit_counterexample_sets(pm(5)), Err(Error::WrongResidueClass(5)));
        // third coordinate of b_j taken as −j
        for p in [3u32, 7] {
            let q = p as i64;
            let red = |x: i64| x.rem_euclid(q) as u32;
            let mut b = r7.spectrum_rows.clone();
            b.clear();
            for j in 0..q {
                b.push(vec![red(-1), red(j), red(-j), red(j * j)]);
            }
            for j in 0..q {
                b.push(vec![1, red(j), red(-j), red(-j * j)]);
            }
            let e = explicit_counterexample_sets(pm(p)).unwrap().set_rows;
            let m = dot_matrix_ordered(pm(p), &e, &b).unwrap();
            assert!(!is_log_hadamard(&m).unwrap().is_log_hadamard);
        }
    }

    #[test]
    fn main_counterexample() {
        for p in [3u32, 5, 7] {
            let b = verify_theorem_main2(pm(p)).unwrap();
            assert!(b.proven(), "{:?}", b.certificate);
            assert_eq!(b.dim5.pair.dim(), 5);
            assert_eq!(b.dim5.pair.set.len(), 2 * p as usize);
            assert_eq!(b.dim4.is_some(), p % 4 == 3);
        }
        assert_eq!(verify_theorem_main2(pm(2)).unwrap_err(), Error::NoNonsquare(2));
    }

    #[test]
    fn factor_rank_four_regime() {
        for p in [3u32, 7, 11] {
            let l = brock_matrix(pm(p), p - 1).unwrap();
            let r = factor_log_hadamard(l.matrix.matrix()).unwrap();
            assert_eq!(r.dim(), 4);
        }
        let l = brock_matrix(pm(7), 3).unwrap();
        let r = factor_log_hadamard(l.matrix.matrix()).unwrap();
        assert_eq!(r.dim(), l.rank());
        assert_eq!(r.set.len(), 14);
    }

    #[test]
    fn counterexamples_k_tile_and_lift() {
        for p in [3u32, 7] {
            let r = explicit_counterexample_sets(pm(p)).unwrap();
            match k_tile_with_hyperplane(&r.set).unwrap() {
                HyperplaneTiling::KTiles { k, .. } => assert_eq!(k, 2),
                other => panic!("{other:?}"),
            }
            let b = verify_theorem_main2(pm(p)).unwrap();
            match lift_to_product_tiling(&b.dim5.pair.set, Budget::default()).unwrap() {
                Lift::Lifted(l) => {
                    assert!(l.verdict.is_tiling);
                    assert!(l.projection_bijective);
                    assert_eq!(l.m, 2);
                    assert_eq!(l.lifted.ambient().moduli(), &[p, p, p, p, p, 2]);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn dephasing_lowers_the_rank_to_four() {
        for p in [3u32, 5, 7, 11, 13] {
            for n in nonsquares(p) {
                let l = brock_matrix(pm(p), n).unwrap();
                let d = crate::spectral::dephase(&l.matrix);
                assert_eq!(d.rank(), 4, "p={p} n={n}");
                let pair = factor_log_hadamard(d.matrix()).unwrap();
                assert_eq!(pair.dim(), 4);
                assert!(is_spectral_pair(&pair.set, &pair.spectrum).unwrap().is_spectral);
                assert!(matches!(
                    find_tiling_partner(&pair.set, Budget::default()).unwrap(),
                    PartnerSearch::ProvenNone { .. }
                ));
            }
        }
    }
}
