//! Fourier transforms of subsets of `Z_p^d`, decided exactly by counting
//! points on parallel hyperplanes.
//!
//! `Ê(m) = 0` for `m ≠ 0` exactly when `E` meets each hyperplane
//! `{x : x·m = t}` in the same number of points, so every predicate here is
//! integer counting. [`ft_value`] is floating point and exists only for
//! diagnostics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{dot_mod, mismatch, Ambient, GroupVector, PointSet, PrimeModulus};

/// Largest group for which full cones are materialized by default.
pub const DEFAULT_CONE_BUDGET: usize = 10_000_000;

/// `counts[t] = |{e ∈ E : e·m = t}|`.
pub fn hyperplane_counts(set: &PointSet, m: &[u32]) -> Result<Vec<usize>> {
    let ambient = set.ambient();
    let p = ambient.require_prime()?;
    ambient.check_coords(m)?;
    let mut counts = vec![0usize; p.get() as usize];
    let mut buf = vec![0u32; ambient.dim()];
    for &i in set.indices() {
        ambient.decode_into(i, &mut buf);
        counts[dot_mod(p, &buf, m) as usize] += 1;
    }
    Ok(counts)
}

fn equidistributed(counts: &[usize]) -> bool {
    counts.windows(2).all(|w| w[0] == w[1])
}

/// Whether `Ê(m) = 0`, decided by exact hyperplane counting.
pub fn ft_is_zero(set: &PointSet, m: &GroupVector) -> Result<bool> {
    if set.ambient() != m.ambient() {
        return Err(mismatch(set.ambient(), m.ambient()));
    }
    if m.is_zero() {
        return Err(Error::ZeroFrequency);
    }
    Ok(equidistributed(&hyperplane_counts(set, m.coords())?))
}

/// `Ê(m) = p^{-d} Σ_{x∈E} exp(−2πi x·m / p)`. Floating point, diagnostics only.
pub fn ft_value(set: &PointSet, m: &GroupVector) -> Result<Complex64> {
    let counts = hyperplane_counts(set, m.coords())?;
    let p = counts.len() as f64;
    let sum: Complex64 = counts
        .iter()
        .enumerate()
        .map(|(t, &c)| Complex64::from_polar(c as f64, -2.0 * std::f64::consts::PI * t as f64 / p))
        .sum();
    Ok(sum / (set.ambient().order() as f64))
}

/// Zero-frequency table: `table[index]` is true iff the frequency with that
/// index is nonzero and `Ê` vanishes there. Entry 0 is always false.
pub fn zero_frequency_table(set: &PointSet, max_order: usize) -> Result<Vec<bool>> {
    let ambient = set.ambient();
    let p = ambient.require_prime()?;
    let order = ambient.order();
    if order > max_order {
        return Err(Error::BudgetExceeded { nodes: order as u64 });
    }
    let d = ambient.dim();
    let flat = set.flat_coords();
    let np = p.get() as usize;
    let table: Vec<bool> = (0..order)
        .into_par_iter()
        .map_init(
            || (vec![0u32; d], vec![0usize; np]),
            |(m, counts), idx| {
                if idx == 0 {
                    return false;
                }
                ambient.decode_into(idx, m);
                counts.iter_mut().for_each(|c| *c = 0);
                for e in flat.chunks(d.max(1)).take(set.len()) {
                    counts[dot_mod(p, e, m) as usize] += 1;
                }
                equidistributed(counts)
            },
        )
        .collect();
    Ok(table)
}

/// The nonzero frequencies split by whether `Ê` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConePartition {
    pub p: u32,
    pub d: usize,
    pub zero_cone: PointSet,
    pub support_cone: PointSet,
}

impl ConePartition {
    pub fn is_zero(&self, m: &[u32]) -> bool {
        self.zero_cone.contains(m)
    }
}

pub fn cone_partition(set: &PointSet) -> Result<ConePartition> {
    cone_partition_with_budget(set, DEFAULT_CONE_BUDGET)
}

pub fn cone_partition_with_budget(set: &PointSet, max_order: usize) -> Result<ConePartition> {
    let ambient = set.ambient().clone();
    let p = ambient.require_prime()?;
    let table = zero_frequency_table(set, max_order)?;
    let (zero, support): (Vec<usize>, Vec<usize>) = (1..ambient.order()).partition(|&i| table[i]);
    let out = ConePartition {
        p: p.get(),
        d: ambient.dim(),
        zero_cone: PointSet::from_indices(ambient.clone(), zero),
        support_cone: PointSet::from_indices(ambient, support),
    };
    for r in 2..p.get() {
        if out.zero_cone.scale(r)? != out.zero_cone || out.support_cone.scale(r)? != out.support_cone {
            return Err(Error::InternalInconsistency(format!(
                "cone partition is not closed under scaling by {r}"
            )));
        }
    }
    Ok(out)
}

/// Differences of distinct points, and all their nonzero multiples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionSets {
    pub direction_set: PointSet,
    pub direction_cone: PointSet,
}

pub fn direction_sets(set: &PointSet) -> Result<DirectionSets> {
    let ambient = set.ambient();
    let p = ambient.require_prime()?;
    let idx = set.indices();
    let mut diffs = Vec::with_capacity(idx.len() * idx.len().saturating_sub(1));
    for &a in idx {
        for &b in idx {
            if a != b {
                diffs.push(ambient.sub(a, b));
            }
        }
    }
    let direction_set = PointSet::from_indices(ambient.clone(), diffs);
    let mut cone = direction_set.indices().to_vec();
    for r in 2..p.get() {
        cone.extend_from_slice(direction_set.scale(r)?.indices());
    }
    Ok(DirectionSets {
        direction_cone: PointSet::from_indices(ambient.clone(), cone),
        direction_set,
    })
}

/// One projection `Z_p^k → Z_p^{k-1}` whose kernel is a line missed by the
/// current direction cone.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionStep {
    /// Normalized direction of the kernel (first nonzero coordinate is 1).
    pub line: Vec<u32>,
    /// Rows of the `(k-1) × k` projection matrix (no rows when `k = 1`).
    pub matrix: Vec<Vec<u32>>,
    /// Image of the set after this step.
    pub image: PointSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionChain {
    pub steps: Vec<ProjectionStep>,
    /// Image of the set in the final space, where its direction cone is full.
    pub final_image: PointSet,
}

impl ProjectionChain {
    pub fn final_dim(&self) -> usize {
        self.final_image.ambient().dim()
    }
}

/// Least normalized nonzero vector whose line avoids the direction cone.
fn least_missing_line(p: PrimeModulus, cone: &PointSet) -> Option<Vec<u32>> {
    let ambient = cone.ambient();
    let k = ambient.dim();
    // lexicographic order visits later leading positions first
    for lead in (0..k).rev() {
        let tail = ambient.order() / (p.get() as usize).pow(lead as u32 + 1);
        for t in 0..tail {
            let mut v = vec![0u32; k];
            v[lead] = 1;
            let mut rest = t;
            for c in (lead + 1..k).rev() {
                v[c] = (rest % p.get() as usize) as u32;
                rest /= p.get() as usize;
            }
            if !cone.contains_index(ambient.encode(&v)) {
                return Some(v);
            }
        }
    }
    None
}

/// Project repeatedly along lines missed by the direction cone until the
/// cone fills the space. Each step is injective on the current image.
pub fn missing_direction_projection(set: &PointSet) -> Result<ProjectionChain> {
    let p = set.ambient().require_prime()?;
    let mut image = set.clone();
    let mut steps = Vec::new();
    loop {
        let cone = direction_sets(&image)?.direction_cone;
        let Some(line) = least_missing_line(p, &cone) else {
            break;
        };
        let k = image.ambient().dim();
        let c = line.iter().position(|&x| x != 0).expect("nonzero line");
        // x ↦ x − x_c·ℓ, then drop coordinate c
        let matrix: Vec<Vec<u32>> = (0..k)
            .filter(|&r| r != c)
            .map(|r| {
                (0..k)
                    .map(|j| p.reduce(i64::from(r == j) - i64::from(line[r]) * i64::from(j == c)))
                    .collect()
            })
            .collect();
        let target = Ambient::homogeneous(p, k - 1)?;
        let mapped: Vec<usize> = image
            .coords()
            .iter()
            .map(|x| {
                let y: Vec<u32> = matrix.iter().map(|row| dot_mod(p, row, x)).collect();
                target.encode(&y)
            })
            .collect();
        let next = PointSet::from_indices(target, mapped);
        if next.len() != image.len() {
            return Err(Error::InternalInconsistency(
                "projection along a missing direction was not injective".into(),
            ));
        }
        steps.push(ProjectionStep {
            line,
            matrix,
            image: next.clone(),
        });
        image = next;
    }
    Ok(ProjectionChain {
        steps,
        final_image: image,
    })
}

/// Whether every residue occurs equally often in `v` (length a multiple of `p`).
pub fn is_balanced(p: PrimeModulus, v: &[u32]) -> bool {
    let n = p.get() as usize;
    if !v.len().is_multiple_of(n) {
        return false;
    }
    let mut counts = vec![0usize; n];
    for &x in v {
        if x as usize >= n {
            return false;
        }
        counts[x as usize] += 1;
    }
    counts.iter().all(|&c| c == v.len() / n)
}

/// `σ_1, …, σ_N` of the entries of `v`, reduced mod `p`.
pub fn elementary_symmetric(p: PrimeModulus, v: &[u32]) -> Vec<u32> {
    let mut e = vec![0u32; v.len() + 1];
    e[0] = 1;
    for (n, &x) in v.iter().enumerate() {
        for j in (1..=n + 1).rev() {
            e[j] = p.add(e[j], p.mul(x, e[j - 1]));
        }
    }
    e.remove(0);
    e
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binomial_mod(p: PrimeModulus, mut n: u64, mut k: u64) -> u32 {
    let q = u64::from(p.get());
    let mut acc = 1u32;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % q, k % q);
        if ki > ni {
            return 0;
        }
        let mut num = 1u32;
        let mut den = 1u32;
        for t in 0..ki {
            num = p.mul(num, (ni - t) as u32);
            den = p.mul(den, (t + 1) as u32);
        }
        acc = p.mul(acc, p.mul(num, p.inv(den).expect("den < p")));
        n /= q;
        k /= q;
    }
    acc
}

/// The symmetric-function test for balancedness: `v` of length `mp` is
/// balanced iff `Π(t − v_k) = (t^p − t)^m`, i.e. `σ_j = 0` unless `(p−1) | j`
/// and `σ_{i(p−1)} = (−1)^i C(m, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalancedCertificate {
    pub p: u32,
    pub m: usize,
    pub sigma_values: Vec<u32>,
    pub expected: Vec<u32>,
    /// First `j` (1-based) where `σ_j` departs from the pattern.
    pub first_mismatch: Option<usize>,
}

impl BalancedCertificate {
    pub fn pass(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

pub fn balanced_certificate(p: PrimeModulus, v: &[u32]) -> Result<BalancedCertificate> {
    let q = p.get() as usize;
    if !v.len().is_multiple_of(q) {
        return Err(Error::DimensionNotMultipleOfP {
            len: v.len(),
            p: p.get(),
        });
    }
    let m = v.len() / q;
    let reduced: Vec<u32> = v.iter().map(|&x| x % p.get()).collect();
    let sigma_values = elementary_symmetric(p, &reduced);
    let expected: Vec<u32> = (1..=v.len())
        .map(|j| {
            if j % (q - 1) != 0 || j / (q - 1) > m {
                return 0;
            }
            let i = j / (q - 1);
            let c = binomial_mod(p, m as u64, i as u64);
            if i % 2 == 1 {
                p.neg(c)
            } else {
                c
            }
        })
        .collect();
    let first_mismatch = sigma_values
        .iter()
        .zip(&expected)
        .position(|(a, b)| a != b)
        .map(|i| i + 1);
    Ok(BalancedCertificate {
        p: p.get(),
        m,
        sigma_values,
        expected,
        first_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Subspace;
    use proptest::prelude::*;

    fn pm(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn z(p: u32, d: usize) -> Ambient {
        Ambient::homogeneous(pm(p), d).unwrap()
    }

    fn gv(a: &Ambient, c: &[u32]) -> GroupVector {
        GroupVector::new(a.clone(), c.to_vec()).unwrap()
    }

    #[test]
    fn ft_zero_examples() {
        let a = z(3, 2);
        let whole = PointSet::whole(a.clone());
        for m in 1..9 {
            assert!(ft_is_zero(&whole, &GroupVector::from_index(a.clone(), m)).unwrap());
        }
        let line = PointSet::new(a.clone(), vec![vec![0, 0], vec![1, 0], vec![2, 0]]).unwrap();
        assert!(ft_is_zero(&line, &gv(&a, &[1, 0])).unwrap());
        assert!(!ft_is_zero(&line, &gv(&a, &[0, 1])).unwrap());
        let single = PointSet::new(a.clone(), vec![vec![2, 1]]).unwrap();
        assert!(!ft_is_zero(&single, &gv(&a, &[1, 1])).unwrap());
        assert_eq!(ft_is_zero(&single, &GroupVector::zero(a)), Err(Error::ZeroFrequency));
    }

    #[test]
    fn ft_value_examples() {
        let a = z(3, 2);
        let whole = PointSet::whole(a.clone());
        let v = ft_value(&whole, &GroupVector::zero(a.clone())).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for m in 1..9 {
            assert!(ft_value(&whole, &GroupVector::from_index(a.clone(), m)).unwrap().norm() < 1e-12);
        }
        let b = z(2, 1);
        let e = PointSet::whole(b.clone());
        assert!(ft_value(&e, &gv(&b, &[1])).unwrap().norm() < 1e-12);
    }

    #[test]
    fn cone_examples() {
        let a = z(3, 2);
        let c = cone_partition(&PointSet::whole(a.clone())).unwrap();
        assert_eq!(c.zero_cone.len(), 8);
        let line = Subspace::span(pm(3), 2, &[vec![1, 0]]).unwrap().elements();
        let c = cone_partition(&line).unwrap();
        assert_eq!(c.zero_cone.len(), 6);
        assert!(c.zero_cone.iter().all(|m| m.coords()[0] != 0));
        let single = PointSet::new(a, vec![vec![1, 1]]).unwrap();
        assert!(cone_partition(&single).unwrap().zero_cone.is_empty());
    }

    #[test]
    fn cone_budget() {
        let e = PointSet::whole(z(3, 3));
        assert!(matches!(
            cone_partition_with_budget(&e, 10),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn direction_examples() {
        let a = z(3, 2);
        let e = PointSet::new(a.clone(), vec![vec![0, 0], vec![1, 0]]).unwrap();
        let ds = direction_sets(&e).unwrap();
        assert_eq!(ds.direction_set.coords(), vec![vec![1, 0], vec![2, 0]]);
        assert_eq!(ds.direction_cone, ds.direction_set);
        let s = direction_sets(&PointSet::new(a, vec![vec![1, 2]]).unwrap()).unwrap();
        assert!(s.direction_set.is_empty() && s.direction_cone.is_empty());
    }

    #[test]
    fn projection_examples() {
        let line = Subspace::span(pm(3), 2, &[vec![1, 0]]).unwrap().elements();
        let chain = missing_direction_projection(&line).unwrap();
        assert_eq!(chain.steps.len(), 1);
        assert_eq!(chain.steps[0].line, vec![0, 1]);
        assert_eq!(chain.final_dim(), 1);
        assert_eq!(chain.final_image.len(), 3);

        let whole = PointSet::whole(z(5, 2));
        assert!(missing_direction_projection(&whole).unwrap().steps.is_empty());
    }

    #[test]
    fn balanced_examples() {
        let p3 = pm(3);
        assert!(is_balanced(p3, &[0, 1, 2]));
        assert!(!is_balanced(p3, &[0, 0, 1]));
        assert!(is_balanced(p3, &[0, 1, 2, 0, 1, 2]));

        let c = balanced_certificate(p3, &[0, 1, 2]).unwrap();
        assert_eq!(c.sigma_values, vec![0, 2, 0]);
        assert!(c.pass());
        let c = balanced_certificate(pm(5), &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(c.sigma_values[3], 4);
        let c = balanced_certificate(p3, &[0, 0, 0]).unwrap();
        assert_eq!(c.first_mismatch, Some(2));
        assert_eq!(
            balanced_certificate(p3, &[0, 1]),
            Err(Error::DimensionNotMultipleOfP { len: 2, p: 3 })
        );
    }

    #[test]
    fn lucas_matches_pascal() {
        let p = pm(5);
        let mut row = vec![1u64];
        for n in 0..40u64 {
            for (k, &c) in row.iter().enumerate() {
                assert_eq!(binomial_mod(p, n, k as u64), (c % 5) as u32, "C({n},{k})");
            }
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = (row[k - 1] + row[k]) % 5;
            }
            row = next;
        }
    }

    #[test]
    fn certificate_matches_counting_exhaustively_on_z3_length6() {
        let p = pm(3);
        for code in 0..729u32 {
            let v: Vec<u32> = (0..6).map(|k| code / 3u32.pow(k) % 3).collect();
            assert_eq!(balanced_certificate(p, &v).unwrap().pass(), is_balanced(p, &v), "{v:?}");
        }
    }

    fn small_set() -> impl Strategy<Value = (u32, usize, Vec<usize>)> {
        prop_oneof![
            Just((2u32, 3usize)),
            Just((3, 2)),
            Just((3, 3)),
            Just((5, 2)),
            Just((7, 2))
        ]
        .prop_flat_map(|(p, d)| {
            let order = (p as usize).pow(d as u32);
            (Just(p), Just(d), proptest::collection::vec(0..order, 1..order.min(20)))
        })
    }

    proptest! {
        #[test]
        fn exact_and_floating_agree((p, d, idx) in small_set(), m in 1usize..343) {
            let a = z(p, d);
            let m = m % (a.order() - 1) + 1;
            let e = PointSet::from_indices(a.clone(), idx);
            let m = GroupVector::from_index(a, m);
            let exact = ft_is_zero(&e, &m).unwrap();
            prop_assert_eq!(exact, ft_value(&e, &m).unwrap().norm() < 1e-9);
        }

        #[test]
        fn zero_set_is_scale_invariant((p, d, idx) in small_set()) {
            let a = z(p, d);
            let e = PointSet::from_indices(a.clone(), idx);
            let table = zero_frequency_table(&e, usize::MAX).unwrap();
            let pm = pm(p);
            for i in 1..a.order() {
                let m = a.decode(i);
                for r in 2..p {
                    let rm: Vec<u32> = m.iter().map(|&x| pm.mul(x, r)).collect();
                    prop_assert_eq!(table[i], table[a.encode(&rm)]);
                }
            }
        }

        #[test]
        fn direction_cone_invariant_under_affine_moves((p, d, idx) in small_set(), t in 0usize..343, r in 1u32..7) {
            let a = z(p, d);
            let e = PointSet::from_indices(a.clone(), idx);
            let t = a.decode(t % a.order());
            let r = r % p;
            prop_assume!(r != 0);
            let moved = e.translate(&t).unwrap().scale(r).unwrap();
            prop_assert_eq!(
                direction_sets(&e).unwrap().direction_cone,
                direction_sets(&moved).unwrap().direction_cone
            );
        }

        #[test]
        fn projection_chain_is_injective_and_bounded((p, d, idx) in small_set()) {
            let e = PointSet::from_indices(z(p, d), idx);
            let chain = missing_direction_projection(&e).unwrap();
            prop_assert_eq!(chain.final_image.len(), e.len());
            prop_assert!(e.len() <= (p as usize).pow(chain.final_dim() as u32));
            let cone = direction_sets(&chain.final_image).unwrap().direction_cone;
            prop_assert_eq!(cone.len(), chain.final_image.ambient().order() - 1);
        }

        #[test]
        fn balanced_preserved_by_shift_and_scale(v in proptest::collection::vec(0u32..5, 10), s in 0u32..5, r in 1u32..5) {
            let p = pm(5);
            let w: Vec<u32> = v.iter().map(|&x| p.add(p.mul(x, r), s)).collect();
            prop_assert_eq!(is_balanced(p, &v), is_balanced(p, &w));
            prop_assert_eq!(balanced_certificate(p, &v).unwrap().pass(), is_balanced(p, &v));
        }
    }
}
