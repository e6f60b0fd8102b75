//! Tiling and k-tiling of finite abelian groups by translation.
//!
//! Verdicts come from convolution counting over the whole group, which is
//! valid for any product of cyclic groups. Fourier and direction-set
//! conditions are available as independent cross-checks.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::field::{enumerate_subspaces, gaussian_binomial, mismatch, Ambient, GroupVector, PointSet, Subspace};
use crate::fourier::{direction_sets, zero_frequency_table, DEFAULT_CONE_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TilingVerdict {
    pub is_tiling: bool,
    /// cover count ↦ number of group elements with that count
    pub multiplicity_histogram: BTreeMap<usize, usize>,
    /// Least element whose cover count differs from the target.
    pub witness: Option<GroupVector>,
}

/// `counts[x] = |{(e, a) : e + a = x}|`, the convolution `E ⋆ A`.
pub fn cover_counts(set: &PointSet, partner: &PointSet) -> Result<Vec<usize>> {
    let ambient = set.ambient();
    if ambient != partner.ambient() {
        return Err(mismatch(ambient, partner.ambient()));
    }
    let mut counts = vec![0usize; ambient.order()];
    for &e in set.indices() {
        for &a in partner.indices() {
            counts[ambient.add(e, a)] += 1;
        }
    }
    Ok(counts)
}

fn verdict_for(ambient: &Ambient, counts: &[usize], k: usize) -> TilingVerdict {
    let mut hist = BTreeMap::new();
    for &c in counts {
        *hist.entry(c).or_insert(0) += 1;
    }
    let witness = counts
        .iter()
        .position(|&c| c != k)
        .map(|i| GroupVector::from_index(ambient.clone(), i));
    TilingVerdict {
        is_tiling: witness.is_none(),
        multiplicity_histogram: hist,
        witness,
    }
}

pub fn is_tiling_pair(set: &PointSet, partner: &PointSet) -> Result<TilingVerdict> {
    is_k_tiling_verdict(set, partner, 1)
}

/// Every element has exactly `k` representations `e + a`.
pub fn is_k_tiling_pair(set: &PointSet, partner: &PointSet, k: usize) -> Result<bool> {
    Ok(is_k_tiling_verdict(set, partner, k)?.is_tiling)
}

pub fn is_k_tiling_verdict(set: &PointSet, partner: &PointSet, k: usize) -> Result<TilingVerdict> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let counts = cover_counts(set, partner)?;
    Ok(verdict_for(set.ambient(), &counts, k))
}

/// Independent evaluations of the equivalent tiling conditions. Fourier
/// conditions need a prime field and are `None` in other groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TilingConditions {
    /// unique representation, by counting over group elements
    pub unique_sums: bool,
    /// the translates `E + a` are disjoint and cover the group
    pub disjoint_translates: bool,
    /// `E ⋆ A = 1`, by accumulating over pairs
    pub convolution_is_one: bool,
    /// `Ê(m)Â(m) = 0` for all nonzero `m`
    pub fourier_product_zero: Option<bool>,
    /// supports of `Ê` and `Â` are disjoint
    pub supports_disjoint: Option<bool>,
    /// zero cones of `Ê` and `Â` cover the nonzero elements
    pub zero_cones_cover: Option<bool>,
    /// `Dir(E) ∩ Dir(A) = ∅`
    pub direction_sets_disjoint: bool,
    /// `DirC(E) ∩ DirC(A) = ∅`
    pub direction_cones_disjoint: Option<bool>,
}

impl TilingConditions {
    pub fn values(&self) -> Vec<(&'static str, Option<bool>)> {
        vec![
            ("unique_sums", Some(self.unique_sums)),
            ("disjoint_translates", Some(self.disjoint_translates)),
            ("convolution_is_one", Some(self.convolution_is_one)),
            ("fourier_product_zero", self.fourier_product_zero),
            ("supports_disjoint", self.supports_disjoint),
            ("zero_cones_cover", self.zero_cones_cover),
            ("direction_sets_disjoint", Some(self.direction_sets_disjoint)),
            ("direction_cones_disjoint", self.direction_cones_disjoint),
        ]
    }

    /// Whether every applicable condition gives the same answer.
    pub fn unanimous(&self) -> bool {
        let v: Vec<bool> = self.values().into_iter().filter_map(|(_, b)| b).collect();
        v.windows(2).all(|w| w[0] == w[1])
    }
}

pub fn tiling_conditions_crosscheck(set: &PointSet, partner: &PointSet) -> Result<TilingConditions> {
    let ambient = set.ambient();
    if ambient != partner.ambient() {
        return Err(mismatch(ambient, partner.ambient()));
    }
    let order = ambient.order();
    let product = set.len() * partner.len();
    if product != order {
        return Err(Error::SizeProductMismatch { product, order });
    }

    let unique_sums = is_tiling_pair(set, partner)?.is_tiling;

    let mut covered = FixedBitSet::with_capacity(order);
    let mut disjoint_translates = true;
    for &a in partner.indices() {
        let mut translate = FixedBitSet::with_capacity(order);
        for &e in set.indices() {
            translate.insert(ambient.add(e, a));
        }
        if !covered.is_disjoint(&translate) {
            disjoint_translates = false;
            break;
        }
        covered.union_with(&translate);
    }
    disjoint_translates &= covered.count_ones(..) == order;

    let mut conv = vec![0usize; order];
    for &e in set.indices() {
        for &a in partner.indices() {
            conv[ambient.add(e, a)] += 1;
        }
    }
    let convolution_is_one = conv.iter().all(|&c| c == 1);

    let dir_e = direction_sets(set);
    let dir_a = direction_sets(partner);
    let direction_sets_disjoint = match (&dir_e, &dir_a) {
        (Ok(de), Ok(da)) => disjoint(&de.direction_set, &da.direction_set),
        _ => {
            let de = raw_differences(set);
            let da = raw_differences(partner);
            de.is_disjoint(&da)
        }
    };

    let (mut fourier_product_zero, mut supports_disjoint, mut zero_cones_cover, mut direction_cones_disjoint) =
        (None, None, None, None);
    if ambient.prime().is_some() {
        let ze = zero_frequency_table(set, DEFAULT_CONE_BUDGET)?;
        let za = zero_frequency_table(partner, DEFAULT_CONE_BUDGET)?;
        fourier_product_zero = Some((1..order).all(|m| ze[m] || za[m]));
        let spt_e: Vec<usize> = (1..order).filter(|&m| !ze[m]).collect();
        let spt_a: Vec<usize> = (1..order).filter(|&m| !za[m]).collect();
        supports_disjoint = Some(disjoint(
            &PointSet::from_indices(ambient.clone(), spt_e),
            &PointSet::from_indices(ambient.clone(), spt_a),
        ));
        let zero_union: std::collections::BTreeSet<usize> = (1..order)
            .filter(|&m| ze[m])
            .chain((1..order).filter(|&m| za[m]))
            .collect();
        zero_cones_cover = Some(zero_union.len() == order - 1);
        let (de, da) = (dir_e?, dir_a?);
        direction_cones_disjoint = Some(disjoint(&de.direction_cone, &da.direction_cone));
    }

    Ok(TilingConditions {
        unique_sums,
        disjoint_translates,
        convolution_is_one,
        fourier_product_zero,
        supports_disjoint,
        zero_cones_cover,
        direction_sets_disjoint,
        direction_cones_disjoint,
    })
}

fn raw_differences(set: &PointSet) -> FixedBitSet {
    let ambient = set.ambient();
    let mut out = FixedBitSet::with_capacity(ambient.order());
    for &a in set.indices() {
        for &b in set.indices() {
            if a != b {
                out.insert(ambient.sub(a, b));
            }
        }
    }
    out
}

fn disjoint(a: &PointSet, b: &PointSet) -> bool {
    a.indices().iter().all(|&i| !b.contains_index(i))
}

/// Outcome of a partner search that ran to completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PartnerSearch {
    Found {
        partner: PointSet,
        subspace: bool,
    },
    /// No partner exists; `reason` says how this was established.
    ProvenNone {
        reason: String,
    },
}

impl PartnerSearch {
    pub fn partner(&self) -> Option<&PointSet> {
        match self {
            PartnerSearch::Found { partner, .. } => Some(partner),
            PartnerSearch::ProvenNone { .. } => None,
        }
    }
}

/// Largest group handled by the exact-cover search.
pub const MAX_COVER_ORDER: usize = 1 << 16;
/// Subspace candidates are skipped when there are more than this many.
pub const MAX_SUBSPACE_CANDIDATES: u128 = 1 << 20;

pub fn find_tiling_partner(set: &PointSet, budget: Budget) -> Result<PartnerSearch> {
    let meter = Meter::new(budget);
    find_tiling_partner_metered(set, &meter)
}

pub fn find_tiling_partner_metered(set: &PointSet, meter: &Meter) -> Result<PartnerSearch> {
    let ambient = set.ambient();
    let order = ambient.order();
    let n = set.len();
    if n == 0 {
        return Ok(PartnerSearch::ProvenNone {
            reason: "the empty set tiles nothing".into(),
        });
    }
    if !order.is_multiple_of(n) {
        return Ok(PartnerSearch::ProvenNone {
            reason: format!("|E| = {n} does not divide the group order {order}"),
        });
    }

    if let Some(p) = ambient.prime() {
        let d = ambient.dim();
        let q = p.get() as usize;
        let r = (0..=d).find(|&r| q.pow(r as u32) == n);
        let Some(r) = r else {
            return Ok(PartnerSearch::ProvenNone {
                reason: format!("|E| = {n} is not a power of {p}"),
            });
        };
        if gaussian_binomial(p.get(), d, d - r) <= MAX_SUBSPACE_CANDIDATES {
            for v in enumerate_subspaces(p, d, d - r, MAX_SUBSPACE_CANDIDATES)? {
                meter.tick()?;
                let elements = v.elements();
                if is_tiling_pair(set, &elements)?.is_tiling {
                    return Ok(PartnerSearch::Found {
                        partner: elements,
                        subspace: true,
                    });
                }
            }
        }
    }

    match cover_search(set, meter)? {
        Some(partner) => Ok(PartnerSearch::Found {
            partner,
            subspace: false,
        }),
        None => Ok(PartnerSearch::ProvenNone {
            reason: "exhaustive exact-cover search found no partner".into(),
        }),
    }
}

/// Exact-cover backtracking over translates, with `0` in the partner and no
/// size pre-checks.
pub(crate) fn cover_search(set: &PointSet, meter: &Meter) -> Result<Option<PointSet>> {
    let ambient = set.ambient();
    let order = ambient.order();
    if set.is_empty() {
        return Ok(None);
    }
    if order > MAX_COVER_ORDER {
        return Err(Error::BudgetExceeded { nodes: meter.nodes() });
    }
    // translate E to contain 0; partners are unchanged
    let shift = set.indices()[0];
    let shifted: Vec<usize> = set.indices().iter().map(|&e| ambient.sub(e, shift)).collect();
    let masks: Vec<FixedBitSet> = (0..order)
        .map(|a| {
            let mut m = FixedBitSet::with_capacity(order);
            for &e in &shifted {
                m.insert(ambient.add(e, a));
            }
            m
        })
        .collect();
    let mut covered = masks[0].clone();
    let mut chosen = vec![0usize];
    if exact_cover(ambient, &shifted, &masks, &mut covered, &mut chosen, meter)? {
        return Ok(Some(PointSet::from_indices(ambient.clone(), chosen)));
    }
    Ok(None)
}

fn exact_cover(
    ambient: &Ambient,
    set: &[usize],
    masks: &[FixedBitSet],
    covered: &mut FixedBitSet,
    chosen: &mut Vec<usize>,
    meter: &Meter,
) -> Result<bool> {
    let Some(x) = covered.zeroes().next() else {
        return Ok(true);
    };
    for &e in set {
        let a = ambient.sub(x, e);
        if !masks[a].is_disjoint(covered) {
            continue;
        }
        meter.tick()?;
        covered.union_with(&masks[a]);
        chosen.push(a);
        if exact_cover(ambient, set, masks, covered, chosen, meter)? {
            return Ok(true);
        }
        chosen.pop();
        covered.difference_with(&masks[a]);
    }
    Ok(false)
}

/// Least nonzero frequency (in lexicographic order) where `Ê` vanishes.
pub fn least_fourier_zero(set: &PointSet) -> Result<Vec<u32>> {
    let ambient = set.ambient();
    let table = zero_frequency_table(set, DEFAULT_CONE_BUDGET)?;
    table
        .iter()
        .position(|&z| z)
        .map(|i| ambient.decode(i))
        .ok_or(Error::NoFourierZero)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum HyperplaneTiling {
    /// `E` 1-tiles with the given subspace.
    TilesAlready { partner: Subspace },
    /// `E` `k`-tiles with the hyperplane orthogonal to `normal`, `k = |E|/p`.
    KTiles {
        normal: Vec<u32>,
        hyperplane: Subspace,
        k: usize,
    },
}

/// Hyperplane `u^⊥` for the least nonzero `u` with `Ê(u) = 0`, with the
/// k-tiling verified by counting.
pub fn k_tile_with_hyperplane(set: &PointSet) -> Result<HyperplaneTiling> {
    let ambient = set.ambient();
    let p = ambient.require_prime()?;
    let d = ambient.dim();
    if set.len() == 1 {
        return Ok(HyperplaneTiling::TilesAlready {
            partner: Subspace::whole(p, d),
        });
    }
    let u = least_fourier_zero(set)?;
    let hyperplane = Subspace::span(p, d, std::slice::from_ref(&u))?.orthogonal_complement();
    let k = set.len() / p.get() as usize;
    if !is_k_tiling_pair(set, &hyperplane.elements(), k)? {
        return Err(Error::InternalInconsistency(format!(
            "hyperplane orthogonal to {u:?} is not a {k}-tiling partner"
        )));
    }
    if k == 1 {
        return Ok(HyperplaneTiling::TilesAlready { partner: hyperplane });
    }
    Ok(HyperplaneTiling::KTiles {
        normal: u,
        hyperplane,
        k,
    })
}

/// `E` as the graph `{w + f(w) : w ∈ W}` of a function from the coordinate
/// complement `W` of `V` into `V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphPresentation {
    pub value_space: Subspace,
    pub domain: Subspace,
    /// `(w, f(w))` pairs, sorted by `w`.
    pub assignments: Vec<(Vec<u32>, Vec<u32>)>,
}

impl GraphPresentation {
    pub fn reconstruct(&self) -> PointSet {
        let ambient = self.value_space.ambient();
        let p = self.value_space.modulus();
        PointSet::from_indices(
            ambient.clone(),
            self.assignments.iter().map(|(w, v)| {
                let x: Vec<u32> = w.iter().zip(v).map(|(&a, &b)| p.add(a, b)).collect();
                ambient.encode(&x)
            }),
        )
    }
}

/// The graph presentation of `E` over `V`, if `E` meets every coset of `V`
/// exactly once.
pub fn as_graph(set: &PointSet, value_space: &Subspace) -> Result<Option<GraphPresentation>> {
    let ambient = set.ambient();
    let p = ambient.require_prime()?;
    if value_space.ambient() != *ambient {
        return Err(mismatch(ambient, &value_space.ambient()));
    }
    let domain = value_space.coordinate_complement();
    if set.len() != (p.get() as usize).pow(domain.dim() as u32) {
        return Ok(None);
    }
    let mut assignments = Vec::with_capacity(set.len());
    for x in set.coords() {
        let v = value_space.project_along_complement(&x);
        let w: Vec<u32> = x.iter().zip(&v).map(|(&a, &b)| p.sub(a, b)).collect();
        assignments.push((w, v));
    }
    assignments.sort();
    if assignments.windows(2).any(|pair| pair[0].0 == pair[1].0) {
        return Ok(None);
    }
    let out = GraphPresentation {
        value_space: value_space.clone(),
        domain,
        assignments,
    };
    if out.reconstruct() != *set {
        return Err(Error::InternalInconsistency(
            "graph presentation does not reconstruct the set".into(),
        ));
    }
    Ok(Some(out))
}

/// A tiling set of `Z_p^d × Z_m` that projects bijectively onto `E`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductLift {
    pub m: usize,
    /// `u` with `Ê(u) = 0`; the hyperplane classes are the level sets of `x·u`.
    pub normal: Vec<u32>,
    pub hyperplane: Subspace,
    /// `{(e, f(e))}` in the product group.
    pub lifted: PointSet,
    /// The hyperplane with a zero last coordinate.
    pub partner: PointSet,
    /// `f(e)` for each point of `E`, in lexicographic point order.
    pub labels: Vec<u32>,
    pub verdict: TilingVerdict,
    pub projection_bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Lift {
    AlreadyTiles { partner: PointSet },
    Lifted(Box<ProductLift>),
}

/// Lift `E` with `|E| = mp` to a tiling set of `Z_p^d × Z_m` by labelling
/// the points on each hyperplane `{x·u = t}` with `0..m` in lexicographic
/// order. Sets that already tile (checked within `budget`) are returned with
/// their partner, except when `m = 1`, which lifts into `Z_p^d × Z_1`.
pub fn lift_to_product_tiling(set: &PointSet, budget: Budget) -> Result<Lift> {
    let ambient = set.ambient();
    let p = ambient.require_prime()?;
    let q = p.get() as usize;
    if set.len() == 1 {
        return Ok(Lift::AlreadyTiles {
            partner: PointSet::whole(ambient.clone()),
        });
    }
    let normal = least_fourier_zero(set)?;
    let m = set.len() / q;
    if m > 1 {
        match find_tiling_partner(set, budget) {
            Ok(PartnerSearch::Found { partner, .. }) => return Ok(Lift::AlreadyTiles { partner }),
            Ok(PartnerSearch::ProvenNone { .. }) | Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    let coords = set.coords();
    let mut next_label = vec![0usize; q];
    let mut labels = Vec::with_capacity(coords.len());
    for x in &coords {
        let t = crate::field::dot_mod(p, x, &normal) as usize;
        labels.push(next_label[t] as u32);
        next_label[t] += 1;
    }
    if let Some((t, &found)) = next_label.iter().enumerate().find(|&(_, &c)| c != m) {
        return Err(Error::NotEquidistributed {
            class: t as u32,
            found,
            expected: m,
        });
    }

    let product = ambient.product(&Ambient::new(vec![m as u32])?)?;
    let lifted = PointSet::from_indices(
        product.clone(),
        coords.iter().zip(&labels).map(|(x, &l)| {
            let mut y = x.clone();
            y.push(l);
            product.encode(&y)
        }),
    );
    let hyperplane = Subspace::span(p, ambient.dim(), std::slice::from_ref(&normal))?.orthogonal_complement();
    let partner = hyperplane.elements().embed_zero_padded(&product)?;
    let verdict = is_tiling_pair(&lifted, &partner)?;
    let d = ambient.dim();
    let projected = PointSet::from_indices(ambient.clone(), lifted.coords().iter().map(|y| ambient.encode(&y[..d])));
    let projection_bijective = lifted.len() == set.len() && projected == *set;
    if !verdict.is_tiling || !projection_bijective {
        return Err(Error::InternalInconsistency(
            "lifted set does not tile the product group".into(),
        ));
    }
    Ok(Lift::Lifted(Box::new(ProductLift {
        m,
        normal,
        hyperplane,
        lifted,
        partner,
        labels,
        verdict,
        projection_bijective,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{affine_image, PrimeModulus, ResidueMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pm(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn z(p: u32, d: usize) -> Ambient {
        Ambient::homogeneous(pm(p), d).unwrap()
    }

    fn set(a: &Ambient, pts: &[&[u32]]) -> PointSet {
        PointSet::new(a.clone(), pts.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    fn span(p: u32, d: usize, v: &[&[u32]]) -> Subspace {
        Subspace::span(pm(p), d, &v.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn subsets_of_size(order: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << order) {
            if mask.count_ones() as usize == k {
                out.push((0..order).filter(|i| mask >> i & 1 == 1).collect());
            }
        }
        out
    }

    fn random_set(rng: &mut ChaCha8Rng, a: &Ambient, k: usize) -> PointSet {
        let mut idx: Vec<usize> = (0..a.order()).collect();
        for i in 0..k {
            let j = rng.gen_range(i..idx.len());
            idx.swap(i, j);
        }
        PointSet::from_indices(a.clone(), idx[..k].to_vec())
    }

    fn random_invertible(rng: &mut ChaCha8Rng, p: u32, d: usize) -> ResidueMatrix {
        loop {
            let entries: Vec<u32> = (0..d * d).map(|_| rng.gen_range(0..p)).collect();
            let m = ResidueMatrix::new(pm(p), d, d, entries).unwrap();
            if m.rank() == d {
                return m;
            }
        }
    }

    #[test]
    fn tiling_examples() {
        let a = z(3, 2);
        let e = span(3, 2, &[&[1, 0]]).elements();
        let f = span(3, 2, &[&[0, 1]]).elements();
        assert!(is_tiling_pair(&e, &f).unwrap().is_tiling);
        let v = is_tiling_pair(&e, &e).unwrap();
        assert!(!v.is_tiling);
        assert_eq!(v.multiplicity_histogram, BTreeMap::from([(0, 6), (3, 3)]));
        assert_eq!(v.witness.unwrap().coords(), &[0, 0]);

        let k = Ambient::new(vec![2, 2]).unwrap();
        assert!(k.prime().is_some());
        let e = set(&k, &[&[0, 0], &[1, 1]]);
        let b = set(&k, &[&[0, 0], &[1, 0]]);
        assert!(is_tiling_pair(&e, &b).unwrap().is_tiling);

        let mixed = Ambient::new(vec![3, 2]).unwrap();
        let e = set(&mixed, &[&[0, 0], &[0, 1]]);
        let b = set(&mixed, &[&[0, 0], &[1, 0], &[2, 0]]);
        assert!(is_tiling_pair(&e, &b).unwrap().is_tiling);
        assert!(is_tiling_pair(&e, &PointSet::whole(a)).is_err());
    }

    #[test]
    fn crosscheck_examples() {
        let e = span(3, 2, &[&[1, 0]]).elements();
        let f = span(3, 2, &[&[0, 1]]).elements();
        let c = tiling_conditions_crosscheck(&e, &f).unwrap();
        assert!(c.unanimous() && c.unique_sums);

        let a = z(2, 2);
        let c = tiling_conditions_crosscheck(&set(&a, &[&[0, 0], &[1, 0]]), &set(&a, &[&[0, 0], &[0, 1]])).unwrap();
        assert!(c.values().iter().all(|(_, v)| *v == Some(true)));

        let bad = tiling_conditions_crosscheck(&e, &set(&z(3, 2), &[&[0, 0]]));
        assert_eq!(bad, Err(Error::SizeProductMismatch { product: 3, order: 9 }));

        let mixed = Ambient::new(vec![3, 2]).unwrap();
        let c = tiling_conditions_crosscheck(
            &set(&mixed, &[&[0, 0], &[0, 1]]),
            &set(&mixed, &[&[0, 0], &[1, 0], &[2, 0]]),
        )
        .unwrap();
        assert!(c.unique_sums && c.unanimous());
        assert_eq!(c.direction_cones_disjoint, None);
    }

    #[test]
    fn crosscheck_random_pairs_in_z3_cubed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = z(3, 3);
        let mut tilings = 0;
        for i in 0..200 {
            let (e, b) = if i % 2 == 0 {
                // a random graph over the complement of a random line, with
                // one point moved half of the time
                let line = Subspace::span(pm(3), 3, &[a.decode(rng.gen_range(1..27))]).unwrap();
                let w = line.coordinate_complement().elements();
                let l = line.elements();
                let mut pts: Vec<usize> = w
                    .indices()
                    .iter()
                    .map(|&x| a.add(x, l.indices()[rng.gen_range(0..3)]))
                    .collect();
                if rng.gen_bool(0.5) {
                    pts[0] = rng.gen_range(0..27);
                }
                let e = PointSet::from_indices(a.clone(), pts);
                if e.len() != 9 {
                    continue;
                }
                (e, l)
            } else {
                (random_set(&mut rng, &a, 3), random_set(&mut rng, &a, 9))
            };
            let c = tiling_conditions_crosscheck(&e, &b).unwrap();
            assert!(c.unanimous(), "{e:?} {b:?} {c:?}");
            assert_eq!(c.unique_sums, is_tiling_pair(&e, &b).unwrap().is_tiling);
            tilings += usize::from(c.unique_sums);
        }
        assert!(tilings > 0);
    }

    #[test]
    fn partner_examples() {
        let a = z(3, 5);
        let e = PointSet::from_indices(a, 0..6);
        assert!(matches!(
            find_tiling_partner(&e, Budget::default()).unwrap(),
            PartnerSearch::ProvenNone { .. }
        ));

        let g = set(&z(3, 2), &[&[0, 2], &[1, 0], &[2, 1]]);
        let found = find_tiling_partner(&g, Budget::default()).unwrap();
        assert!(is_tiling_pair(&g, found.partner().unwrap()).unwrap().is_tiling);
        assert!(
            is_tiling_pair(&g, &span(3, 2, &[&[0, 1]]).elements())
                .unwrap()
                .is_tiling
        );

        let w = PointSet::whole(z(5, 2));
        let found = find_tiling_partner(&w, Budget::default()).unwrap();
        assert_eq!(found.partner().unwrap().coords(), vec![vec![0, 0]]);
    }

    #[test]
    fn exact_cover_finds_non_subspace_partners() {
        // {0,1} tiles Z_4 only with partners like {0,2}; in Z_2 × Z_4 use the
        // search directly
        let g = Ambient::new(vec![4]).unwrap();
        let e = set(&g, &[&[0], &[1]]);
        let out = find_tiling_partner(&e, Budget::default()).unwrap();
        let partner = out.partner().unwrap();
        assert!(is_tiling_pair(&e, partner).unwrap().is_tiling);
        let bad = set(&g, &[&[0], &[1], &[3]]);
        assert!(matches!(
            find_tiling_partner(&bad, Budget::default()).unwrap(),
            PartnerSearch::ProvenNone { .. }
        ));
    }

    #[test]
    fn tiling_sizes_in_z2_cubed_are_powers_of_two() {
        let a = z(2, 3);
        let meter = Meter::new(Budget::default());
        for mask in 1u32..256 {
            let e = PointSet::from_indices(a.clone(), (0..8).filter(|i| mask >> i & 1 == 1));
            if let Some(partner) = cover_search(&e, &meter).unwrap() {
                assert!(e.len().is_power_of_two(), "{e:?}");
                assert!(is_tiling_pair(&e, &partner).unwrap().is_tiling);
                let via_api = find_tiling_partner(&e, Budget::default()).unwrap();
                assert!(via_api.partner().is_some());
            } else {
                assert!(find_tiling_partner(&e, Budget::default()).unwrap().partner().is_none());
            }
        }
    }

    #[test]
    fn partner_budget_is_reported() {
        let e = PointSet::from_indices(z(2, 4), [0, 1, 2, 4]);
        let out = find_tiling_partner(&e, Budget::nodes(1));
        assert!(matches!(out, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn k_tiling_examples() {
        let a = z(3, 2);
        let e = set(&a, &[&[0, 0], &[1, 2], &[2, 2], &[0, 1]]);
        assert!(is_k_tiling_pair(&e, &PointSet::whole(a.clone()), 4).unwrap());
        assert!(!is_k_tiling_pair(&e, &PointSet::whole(a.clone()), 1).unwrap());
        let l = span(3, 2, &[&[1, 0]]).elements();
        let m = span(3, 2, &[&[1, 1]]).elements();
        assert_eq!(
            is_k_tiling_pair(&l, &m, 1).unwrap(),
            is_tiling_pair(&l, &m).unwrap().is_tiling
        );
    }

    #[test]
    fn hyperplane_examples() {
        let l = span(3, 2, &[&[1, 0]]).elements();
        match k_tile_with_hyperplane(&l).unwrap() {
            HyperplaneTiling::TilesAlready { partner } => assert_eq!(partner, span(3, 2, &[&[0, 1]])),
            other => panic!("{other:?}"),
        }
        let single = set(&z(3, 3), &[&[1, 2, 0]]);
        assert!(matches!(
            k_tile_with_hyperplane(&single).unwrap(),
            HyperplaneTiling::TilesAlready { .. }
        ));
        let pair = set(&z(3, 2), &[&[0, 0], &[1, 0]]);
        assert_eq!(k_tile_with_hyperplane(&pair), Err(Error::NoFourierZero));

        // size 6 in Z_3^2 with a Fourier zero: two parallel lines
        let two_lines = PointSet::from_indices(z(3, 2), [0, 1, 2, 3, 4, 5]);
        match k_tile_with_hyperplane(&two_lines).unwrap() {
            HyperplaneTiling::KTiles { k, hyperplane, .. } => {
                assert_eq!(k, 2);
                assert!(is_k_tiling_pair(&two_lines, &hyperplane.elements(), 2).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn graph_examples() {
        let a = z(3, 2);
        let v = span(3, 2, &[&[0, 1]]);
        let e = span(3, 2, &[&[1, 0]]).elements();
        let g = as_graph(&e, &v).unwrap().unwrap();
        assert!(g.assignments.iter().all(|(_, f)| f == &vec![0, 0]));
        let diag = set(&a, &[&[0, 0], &[1, 1], &[2, 2]]);
        let g = as_graph(&diag, &v).unwrap().unwrap();
        assert_eq!(g.reconstruct(), diag);
        assert_eq!(g.assignments[1], (vec![1, 0], vec![0, 1]));
        let bad = set(&a, &[&[0, 0], &[1, 0]]);
        assert!(as_graph(&bad, &v).unwrap().is_none());
    }

    #[test]
    fn graph_iff_tiling_with_subspace_exhaustive_z3_squared() {
        let a = z(3, 2);
        for k in 0..=2 {
            for v in enumerate_subspaces(pm(3), 2, k, 100).unwrap() {
                let size = 3usize.pow(2 - k as u32);
                for idx in subsets_of_size(9, size) {
                    let e = PointSet::from_indices(a.clone(), idx);
                    let tiles = is_tiling_pair(&e, &v.elements()).unwrap().is_tiling;
                    assert_eq!(as_graph(&e, &v).unwrap().is_some(), tiles);
                }
            }
        }
    }

    #[test]
    fn tiling_symmetry_and_scaling_exhaustive_z3_squared() {
        let a = z(3, 2);
        let with_zero: Vec<PointSet> = subsets_of_size(9, 3)
            .into_iter()
            .filter(|s| s[0] == 0)
            .map(|s| PointSet::from_indices(a.clone(), s))
            .collect();
        for e in &with_zero {
            for b in &with_zero {
                let t = is_tiling_pair(e, b).unwrap().is_tiling;
                assert_eq!(t, is_tiling_pair(b, e).unwrap().is_tiling);
                assert_eq!(t, is_tiling_pair(&e.scale(2).unwrap(), b).unwrap().is_tiling);
                if t {
                    let common: Vec<usize> = e.indices().iter().filter(|&&i| b.contains_index(i)).copied().collect();
                    assert_eq!(common, vec![0]);
                }
            }
        }
    }

    #[test]
    fn tiling_affine_invariance_random_z3_cubed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = z(3, 3);
        for _ in 0..100 {
            let line = Subspace::span(pm(3), 3, &[a.decode(rng.gen_range(1..27))])
                .unwrap()
                .elements();
            let e = random_set(&mut rng, &a, 9);
            let t = is_tiling_pair(&e, &line).unwrap().is_tiling;
            let m = random_invertible(&mut rng, 3, 3);
            let shift = GroupVector::from_index(a.clone(), rng.gen_range(0..27));
            let e2 = affine_image(&e, &m, &shift).unwrap();
            let l2 = affine_image(&line, &m, &shift).unwrap();
            assert_eq!(t, is_tiling_pair(&e2, &l2).unwrap().is_tiling);
            let (s, r) = (rng.gen_range(1..3), rng.gen_range(1..3));
            assert_eq!(
                t,
                is_tiling_pair(&e.scale(s).unwrap(), &line.scale(r).unwrap())
                    .unwrap()
                    .is_tiling
            );
        }
    }

    #[test]
    fn degenerate_lift() {
        let e = span(3, 2, &[&[1, 0]]).elements();
        let Lift::Lifted(l) = lift_to_product_tiling(&e, Budget::default()).unwrap() else {
            panic!("expected a lift");
        };
        assert_eq!(l.m, 1);
        assert_eq!(l.lifted.ambient().moduli(), &[3, 3, 1]);
        assert!(l.verdict.is_tiling && l.projection_bijective);
        assert_eq!(l.lifted.len(), 3);
    }

    #[test]
    fn lift_of_a_tiling_set_returns_its_partner() {
        let e = PointSet::from_indices(z(3, 3), 0..9);
        match lift_to_product_tiling(&e, Budget::default()).unwrap() {
            Lift::AlreadyTiles { partner } => assert!(is_tiling_pair(&e, &partner).unwrap().is_tiling),
            other => panic!("{other:?}"),
        }
    }
}
