//! Spectral pairs, log-Hadamard matrices and their normal forms.
//!
//! `(E, B)` is a spectral pair when `Ê(b − b′) = 0` for all distinct
//! `b, b′ ∈ B`; equivalently the dot-product matrix `e_i · b_j` has balanced
//! pairwise row (and column) differences.

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use serde::Serialize;

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::field::{dot_mod, mismatch, Ambient, GroupVector, PointSet, PrimeModulus, ResidueMatrix, RowSpaceBasis};
use crate::fourier::{hyperplane_counts, is_balanced, zero_frequency_table, DEFAULT_CONE_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralVerdict {
    pub is_spectral: bool,
    /// First pair `(b, b′)` in lexicographic order with `Ê(b − b′) ≠ 0`.
    pub violating_pair: Option<(GroupVector, GroupVector)>,
}

pub fn is_spectral_pair(set: &PointSet, spectrum: &PointSet) -> Result<SpectralVerdict> {
    let ambient = set.ambient();
    if ambient != spectrum.ambient() {
        return Err(mismatch(ambient, spectrum.ambient()));
    }
    ambient.require_prime()?;
    if set.len() != spectrum.len() {
        return Err(Error::SizeMismatch {
            left: set.len(),
            right: spectrum.len(),
        });
    }
    let b = spectrum.indices();
    let mut cache: Vec<Option<bool>> = vec![None; ambient.order()];
    for (i, &x) in b.iter().enumerate() {
        for &y in &b[i + 1..] {
            let diff = ambient.sub(x, y);
            let zero = match cache[diff] {
                Some(z) => z,
                None => {
                    let counts = hyperplane_counts(set, &ambient.decode(diff))?;
                    let z = counts.windows(2).all(|w| w[0] == w[1]);
                    cache[diff] = Some(z);
                    cache[ambient.neg(diff)] = Some(z);
                    z
                }
            };
            if !zero {
                return Ok(SpectralVerdict {
                    is_spectral: false,
                    violating_pair: Some((
                        GroupVector::from_index(ambient.clone(), x),
                        GroupVector::from_index(ambient.clone(), y),
                    )),
                });
            }
        }
    }
    Ok(SpectralVerdict {
        is_spectral: true,
        violating_pair: None,
    })
}

/// `L[i][j] = e_i · b_j` with both sets in lexicographic order.
pub fn dot_matrix(set: &PointSet, spectrum: &PointSet) -> Result<ResidueMatrix> {
    if set.ambient() != spectrum.ambient() {
        return Err(mismatch(set.ambient(), spectrum.ambient()));
    }
    let p = set.ambient().require_prime()?;
    dot_matrix_ordered(p, &set.coords(), &spectrum.coords())
}

/// `L[i][j] = e_i · b_j` for explicitly ordered point lists.
pub fn dot_matrix_ordered(p: PrimeModulus, set: &[Vec<u32>], spectrum: &[Vec<u32>]) -> Result<ResidueMatrix> {
    if set.len() != spectrum.len() {
        return Err(Error::SizeMismatch {
            left: set.len(),
            right: spectrum.len(),
        });
    }
    let n = set.len();
    let mut entries = Vec::with_capacity(n * n);
    for e in set {
        for b in spectrum {
            if e.len() != b.len() {
                return Err(Error::DimensionMismatch {
                    expected: e.len(),
                    found: b.len(),
                });
            }
            entries.push(dot_mod(p, e, b));
        }
    }
    ResidueMatrix::new(p, n, n, entries)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogHadamardCheck {
    pub is_log_hadamard: bool,
    pub rows_balanced: bool,
    pub columns_balanced: bool,
    /// First row pair whose difference is not balanced.
    pub row_witness: Option<(usize, usize)>,
    pub column_witness: Option<(usize, usize)>,
}

fn first_unbalanced_pair(p: PrimeModulus, vectors: &[Vec<u32>]) -> Option<(usize, usize)> {
    let mut diff = vec![0u32; vectors.first().map_or(0, Vec::len)];
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            for ((d, &a), &b) in diff.iter_mut().zip(&vectors[i]).zip(&vectors[j]) {
                *d = p.sub(a, b);
            }
            if !is_balanced(p, &diff) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Checks pairwise row differences and, separately, pairwise column
/// differences. For square matrices the two always agree.
pub fn is_log_hadamard(m: &ResidueMatrix) -> Result<LogHadamardCheck> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "log-Hadamard test needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let p = m.modulus();
    let row_witness = first_unbalanced_pair(p, &m.to_rows());
    let column_witness = first_unbalanced_pair(p, &m.transpose().to_rows());
    let (rows_balanced, columns_balanced) = (row_witness.is_none(), column_witness.is_none());
    if rows_balanced != columns_balanced {
        return Err(Error::InternalInconsistency(
            "row and column balance disagree on a square matrix".into(),
        ));
    }
    Ok(LogHadamardCheck {
        is_log_hadamard: rows_balanced,
        rows_balanced,
        columns_balanced,
        row_witness,
        column_witness,
    })
}

/// Whether `exp(2πi L/p)` satisfies `M*M = N·I`, within `1e-9`.
pub fn is_butson_hadamard(m: &ResidueMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    let p = f64::from(m.modulus().get());
    let phase = |x: u32| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f64::from(x) / p);
    let cols: Vec<Vec<Complex64>> = (0..n).map(|j| m.column(j).into_iter().map(phase).collect()).collect();
    for a in 0..n {
        for b in a..n {
            let s: Complex64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x.conj() * y).sum();
            let target = if a == b { n as f64 } else { 0.0 };
            if (s - Complex64::new(target, 0.0)).norm() > 1e-9 {
                return false;
            }
        }
    }
    true
}

/// A square residue matrix with balanced pairwise row differences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LogHadamard {
    matrix: ResidueMatrix,
}

impl LogHadamard {
    pub fn new(matrix: ResidueMatrix) -> Result<Self> {
        let check = is_log_hadamard(&matrix)?;
        if let Some((i, j)) = check.row_witness {
            return Err(Error::NotLogHadamard(format!(
                "rows {i} and {j} differ by an unbalanced vector"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ResidueMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ResidueMatrix {
        self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.matrix.modulus()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

/// Subtract row 0 from every row and column 0 from every column.
pub fn dephase(m: &LogHadamard) -> LogHadamard {
    let a = &m.matrix;
    let out = a.map(|i, j, x| i64::from(x) - i64::from(a.get(0, j)) - i64::from(a.get(i, 0)) + i64::from(a.get(0, 0)));
    LogHadamard { matrix: out }
}

pub fn is_dephased(m: &ResidueMatrix) -> bool {
    m.row(0).iter().all(|&x| x == 0) && m.column(0).iter().all(|&x| x == 0)
}

/// Row 0 and column 0 zero, row 1 and column 1 equal to `0, 1, …, p−1` repeated.
pub fn is_special_dephased(m: &ResidueMatrix) -> bool {
    let q = m.modulus().get() as usize;
    if !m.is_square() || !m.rows().is_multiple_of(q) || m.rows() < 2 || !is_dephased(m) {
        return false;
    }
    (0..m.rows()).all(|j| m.get(1, j) as usize == j % q && m.get(j, 1) as usize == j % q)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialDephased {
    pub matrix: LogHadamard,
    /// `new row i = old (dephased) row row_order[i]`.
    pub row_order: Vec<usize>,
    pub column_order: Vec<usize>,
    /// Rank recomputed on the output.
    pub rank: usize,
}

/// Stable order putting `values[k] = t` items at positions `≡ t (mod p)`,
/// `first` at position 1. `None` if the counts do not allow it.
fn pattern_order(values: &[u32], q: usize, first: usize) -> Option<Vec<usize>> {
    let n = values.len();
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); q];
    for (k, &v) in values.iter().enumerate() {
        buckets[v as usize].push(k);
    }
    // position 0 must hold index 0, position 1 must hold `first`
    if buckets[0].first() != Some(&0) || buckets.get(1).and_then(|b| b.first()) != Some(&first) {
        return None;
    }
    let mut next = vec![0usize; q];
    let mut order = Vec::with_capacity(n);
    for pos in 0..n {
        let t = pos % q;
        let k = *buckets[t].get(next[t])?;
        next[t] += 1;
        order.push(k);
    }
    Some(order)
}

/// Dephase, then permute rows and columns so that row 1 and column 1 read
/// `0, 1, …, p−1` repeatedly. Row 1 is the old row 1; column 1 is the first
/// column where that row holds a 1; all other rows and columns keep their
/// relative order within each value class.
pub fn special_dephase(m: &LogHadamard) -> Result<SpecialDephased> {
    let d = dephase(m);
    let a = &d.matrix;
    let n = a.rows();
    let q = a.modulus().get() as usize;
    if n == 1 {
        return Ok(SpecialDephased {
            rank: a.rank(),
            matrix: d,
            row_order: vec![0],
            column_order: vec![0],
        });
    }
    if !n.is_multiple_of(q) {
        return Err(Error::NotLogHadamard(format!("size {n} is not a multiple of {q}")));
    }
    let r = 1;
    let c = (1..n)
        .find(|&j| a.get(r, j) == 1)
        .ok_or_else(|| Error::NotLogHadamard("row 1 has no entry equal to 1".into()))?;
    let column_order =
        pattern_order(a.row(r), q, c).ok_or_else(|| Error::NotLogHadamard("row 1 is not balanced".into()))?;
    let row_order = pattern_order(&a.column(c), q, r)
        .ok_or_else(|| Error::NotLogHadamard(format!("column {c} is not balanced")))?;
    let out = a.permute(&row_order, &column_order);
    if !is_special_dephased(&out) {
        return Err(Error::InternalInconsistency(
            "special dephasing produced the wrong shape".into(),
        ));
    }
    Ok(SpecialDephased {
        rank: out.rank(),
        matrix: LogHadamard::new(out)?,
        row_order,
        column_order,
    })
}

/// A spectral pair with its points in the order that reproduces the dot
/// matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralPairRecord {
    pub set: PointSet,
    pub spectrum: PointSet,
    pub set_rows: Vec<Vec<u32>>,
    pub spectrum_rows: Vec<Vec<u32>>,
    pub dot_matrix: ResidueMatrix,
}

impl SpectralPairRecord {
    /// Pad both sets with zero coordinates to live in `Z_p^d`.
    pub fn embed(&self, d: usize) -> Result<SpectralPairRecord> {
        let ambient = self.set.ambient();
        let p = ambient.require_prime()?;
        if d < ambient.dim() {
            return Err(Error::DimensionMismatch {
                expected: ambient.dim(),
                found: d,
            });
        }
        let target = Ambient::homogeneous(p, d)?;
        let pad = |rows: &[Vec<u32>]| -> Vec<Vec<u32>> {
            rows.iter()
                .map(|r| {
                    let mut v = r.clone();
                    v.resize(d, 0);
                    v
                })
                .collect()
        };
        let out = SpectralPairRecord {
            set: self.set.embed_zero_padded(&target)?,
            spectrum: self.spectrum.embed_zero_padded(&target)?,
            set_rows: pad(&self.set_rows),
            spectrum_rows: pad(&self.spectrum_rows),
            dot_matrix: self.dot_matrix.clone(),
        };
        if dot_matrix_ordered(p, &out.set_rows, &out.spectrum_rows)? != out.dot_matrix {
            return Err(Error::InternalInconsistency("embedding changed the dot matrix".into()));
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.set.ambient().dim()
    }
}

/// Factor `L = 𝔼𝔹ᵀ` through its row space: the first independent rows
/// `r_1..r_k` (top to bottom) become the columns of `𝔹`, and row `i` of `𝔼`
/// holds the coefficients of row `i` of `L` in terms of them. The rows of
/// `𝔼` and `𝔹` form a spectral pair in `Z_p^k`, `k = rank L`.
pub fn factor_log_hadamard(m: &ResidueMatrix) -> Result<SpectralPairRecord> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix("factorization needs a square matrix".into()));
    }
    let p = m.modulus();
    let n = m.rows();
    let mut basis = RowSpaceBasis::new(p, n);
    let independent: Vec<usize> = (0..n).filter(|&i| basis.insert(m.row(i))).collect();
    let k = independent.len();
    if k == 0 {
        return Err(Error::InternalInconsistency("zero matrix has no factorization".into()));
    }
    let set_rows: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            basis
                .express(m.row(i))
                .ok_or_else(|| Error::InternalInconsistency(format!("row {i} outside the row space")))
        })
        .collect::<Result<_>>()?;
    let spectrum_rows: Vec<Vec<u32>> = (0..n)
        .map(|i| independent.iter().map(|&r| m.get(r, i)).collect())
        .collect();

    if dot_matrix_ordered(p, &set_rows, &spectrum_rows)? != *m {
        return Err(Error::InternalInconsistency("𝔼𝔹ᵀ does not reproduce the matrix".into()));
    }
    let ambient = Ambient::homogeneous(p, k)?;
    let set = PointSet::new(ambient.clone(), set_rows.clone())
        .map_err(|_| Error::InternalInconsistency("rows of 𝔼 are not distinct".into()))?;
    let spectrum = PointSet::new(ambient, spectrum_rows.clone())
        .map_err(|_| Error::InternalInconsistency("rows of 𝔹 are not distinct".into()))?;
    if !is_spectral_pair(&set, &spectrum)?.is_spectral {
        return Err(Error::InternalInconsistency(
            "factors do not form a spectral pair".into(),
        ));
    }
    Ok(SpectralPairRecord {
        set,
        spectrum,
        set_rows,
        spectrum_rows,
        dot_matrix: m.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SpectrumSearch {
    Found {
        spectrum: PointSet,
    },
    /// The search space was exhausted.
    ProvenNone,
}

impl SpectrumSearch {
    pub fn spectrum(&self) -> Option<&PointSet> {
        match self {
            SpectrumSearch::Found { spectrum } => Some(spectrum),
            SpectrumSearch::ProvenNone => None,
        }
    }
}

pub fn spectrum_search(set: &PointSet, budget: Budget) -> Result<SpectrumSearch> {
    let meter = Meter::new(budget);
    spectrum_search_metered(set, &meter)
}

/// Look for `B ∋ 0` with `|B| = |E|` and every difference in the zero set
/// of `Ê`: a clique in the graph joining `b, b′` when `Ê(b − b′) = 0`.
/// Vertices are taken in decreasing-degree order and cliques are grown in
/// that order only, so each clique is visited once.
pub fn spectrum_search_metered(set: &PointSet, meter: &Meter) -> Result<SpectrumSearch> {
    let ambient = set.ambient();
    ambient.require_prime()?;
    let n = set.len();
    let order = ambient.order();
    if n == 0 || n > order {
        return Ok(SpectrumSearch::ProvenNone);
    }
    let zero_set = zero_frequency_table(set, DEFAULT_CONE_BUDGET)?;
    let mut vertices: Vec<usize> = (1..order).filter(|&v| zero_set[v]).collect();
    if vertices.len() + 1 < n {
        return Ok(SpectrumSearch::ProvenNone);
    }
    let adjacent = |a: usize, b: usize| zero_set[ambient.sub(a, b)];
    let degree = |v: usize| vertices.iter().filter(|&&w| w != v && adjacent(v, w)).count();
    let mut degrees: Vec<(usize, usize)> = vertices.iter().map(|&v| (degree(v), v)).collect();
    degrees.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    vertices = degrees.into_iter().map(|(_, v)| v).collect();

    let k = vertices.len();
    let neighbours: Vec<FixedBitSet> = (0..k)
        .map(|i| {
            let mut bs = FixedBitSet::with_capacity(k);
            for j in i + 1..k {
                if adjacent(vertices[i], vertices[j]) {
                    bs.insert(j);
                }
            }
            bs
        })
        .collect();
    let mut candidates = FixedBitSet::with_capacity(k);
    candidates.insert_range(..);
    let mut chosen = Vec::with_capacity(n);
    if grow_clique(&neighbours, &candidates, &mut chosen, n - 1, meter)? {
        let mut b: Vec<usize> = chosen.iter().map(|&i| vertices[i]).collect();
        b.push(0);
        let spectrum = PointSet::from_indices(ambient.clone(), b);
        debug_assert!(is_spectral_pair(set, &spectrum).map(|v| v.is_spectral).unwrap_or(false));
        return Ok(SpectrumSearch::Found { spectrum });
    }
    Ok(SpectrumSearch::ProvenNone)
}

fn grow_clique(
    neighbours: &[FixedBitSet],
    candidates: &FixedBitSet,
    chosen: &mut Vec<usize>,
    target: usize,
    meter: &Meter,
) -> Result<bool> {
    if chosen.len() == target {
        return Ok(true);
    }
    if chosen.len() + candidates.count_ones(..) < target {
        return Ok(false);
    }
    for v in candidates.ones() {
        meter.tick()?;
        let mut next = candidates.clone();
        next.intersect_with(&neighbours[v]);
        if chosen.len() + 1 + next.count_ones(..) < target {
            continue;
        }
        chosen.push(v);
        if grow_clique(neighbours, &next, chosen, target, meter)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "reason", rename_all = "snake_case")]
pub enum SizeClass {
    Allowed,
    Forbidden(String),
}

impl SizeClass {
    pub fn is_allowed(&self) -> bool {
        matches!(self, SizeClass::Allowed)
    }
}

/// Sizes a spectral set in `Z_p^d` can have: 1, `p^d`, or a multiple of `p`
/// at most `p^{d−1}`; for `p = 2` also 2 or a multiple of 4.
pub fn spectral_size_check(size: usize, p: PrimeModulus, d: usize) -> SizeClass {
    let q = p.get() as usize;
    let full = q.pow(d as u32);
    if size == 1 || size == full {
        return SizeClass::Allowed;
    }
    if size == 0 || size > full {
        return SizeClass::Forbidden(format!("size must lie in [1, {full}]"));
    }
    if !size.is_multiple_of(q) {
        return SizeClass::Forbidden(format!("{size} is not a multiple of {q}"));
    }
    if size > full / q {
        return SizeClass::Forbidden(format!("{} < {size} < {full}", full / q));
    }
    if q == 2 && size != 2 && !size.is_multiple_of(4) {
        return SizeClass::Forbidden(format!("{size} is neither 2 nor a multiple of 4"));
    }
    SizeClass::Allowed
}
