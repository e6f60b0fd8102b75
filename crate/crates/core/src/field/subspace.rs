use std::fmt;

use serde::{Serialize, Serializer};

use super::group::{Ambient, GroupVector, PointSet};
use super::matrix::rref_in_place;
use super::prime::PrimeModulus;
use crate::error::{Error, Result};

/// A linear subspace of `Z_p^d`, stored by its canonical RREF basis so that
/// equality is equality of subspaces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    p: PrimeModulus,
    d: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(p: PrimeModulus, d: usize, vectors: &[Vec<u32>]) -> Result<Self> {
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
            rows.push(v.iter().map(|&x| x % p.get()).collect::<Vec<u32>>());
        }
        let pivots = rref_in_place(p, &mut rows);
        rows.truncate(pivots.len());
        Ok(Self {
            p,
            d,
            basis: rows,
            pivots,
        })
    }

    /// Subspace from a basis that must be linearly independent.
    pub fn from_basis(p: PrimeModulus, d: usize, basis: &[Vec<u32>]) -> Result<Self> {
        let s = Self::span(p, d, basis)?;
        if s.dim() != basis.len() {
            return Err(Error::InvalidArgument(format!(
                "{} basis vectors span only a {}-dimensional subspace",
                basis.len(),
                s.dim()
            )));
        }
        Ok(s)
    }

    pub fn zero(p: PrimeModulus, d: usize) -> Self {
        Self {
            p,
            d,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn whole(p: PrimeModulus, d: usize) -> Self {
        let basis = (0..d).map(|i| (0..d).map(|j| u32::from(i == j)).collect()).collect();
        Self {
            p,
            d,
            basis,
            pivots: (0..d).collect(),
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical (RREF) basis rows.
    pub fn basis_rows(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivots
    }

    pub fn ambient(&self) -> Ambient {
        Ambient::homogeneous(self.p, self.d).expect("ambient of an existing subspace")
    }

    pub fn basis(&self) -> Vec<GroupVector> {
        let a = self.ambient();
        self.basis
            .iter()
            .map(|b| GroupVector::new(a.clone(), b.clone()).expect("reduced"))
            .collect()
    }

    /// The `V`-component of `x` relative to the coordinate complement
    /// spanned by the non-pivot standard basis vectors.
    pub fn project_along_complement(&self, x: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut v = vec![0u32; self.d];
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = x[pc] % p.get();
            if c == 0 {
                continue;
            }
            for (o, &b) in v.iter_mut().zip(row) {
                *o = p.add(*o, p.mul(c, b));
            }
        }
        v
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        x.len() == self.d && self.project_along_complement(x) == x
    }

    /// The coordinate complement `W`: spanned by the standard basis vectors
    /// at the non-pivot columns, so that `Z_p^d = V ⊕ W`.
    pub fn coordinate_complement(&self) -> Subspace {
        let free: Vec<Vec<u32>> = (0..self.d)
            .filter(|c| !self.pivots.contains(c))
            .map(|c| (0..self.d).map(|j| u32::from(j == c)).collect())
            .collect();
        Subspace::span(self.p, self.d, &free).expect("unit vectors")
    }

    /// All `p^k` elements as a point set.
    pub fn elements(&self) -> PointSet {
        let a = self.ambient();
        let p = self.p;
        let k = self.dim();
        let count = (p.get() as usize).pow(k as u32);
        let mut coeffs = vec![0u32; k];
        let mut out = Vec::with_capacity(count);
        let mut v = vec![0u32; self.d];
        for _ in 0..count {
            v.iter_mut().for_each(|x| *x = 0);
            for (c, row) in coeffs.iter().zip(&self.basis) {
                if *c == 0 {
                    continue;
                }
                for (o, &b) in v.iter_mut().zip(row) {
                    *o = p.add(*o, p.mul(*c, b));
                }
            }
            out.push(a.encode(&v));
            for c in coeffs.iter_mut().rev() {
                *c += 1;
                if *c < p.get() {
                    break;
                }
                *c = 0;
            }
        }
        PointSet::from_indices(a, out)
    }

    /// `V^⊥ = {w : w·v = 0 for all v ∈ V}`, the null space of the basis
    /// matrix, read off the RREF.
    pub fn orthogonal_complement(&self) -> Subspace {
        let p = self.p;
        let free: Vec<usize> = (0..self.d).filter(|c| !self.pivots.contains(c)).collect();
        let null: Vec<Vec<u32>> = free
            .iter()
            .map(|&f| {
                let mut w = vec![0u32; self.d];
                w[f] = 1;
                for (row, &pc) in self.basis.iter().zip(&self.pivots) {
                    w[pc] = p.neg(row[f]);
                }
                w
            })
            .collect();
        Subspace::span(p, self.d, &null).expect("null space vectors have length d")
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{:?} ⊆ Z_{}^{}", self.basis, self.p, self.d)
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Subspace", 3)?;
        st.serialize_field("p", &self.p.get())?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("basis", &self.basis)?;
        st.end()
    }
}

/// Number of `k`-dimensional subspaces of `Z_p^d`.
pub fn gaussian_binomial(p: u32, d: usize, k: usize) -> u128 {
    if k > d {
        return 0;
    }
    let q = u128::from(p);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((d - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Every `k`-dimensional subspace of `Z_p^d` exactly once, generated as
/// canonical RREF bases. Fails when the count exceeds `max_count`.
pub fn enumerate_subspaces(p: PrimeModulus, d: usize, k: usize, max_count: u128) -> Result<Vec<Subspace>> {
    if k > d {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds d = {d}")));
    }
    let expected = gaussian_binomial(p.get(), d, k);
    if expected > max_count {
        return Err(Error::BudgetExceeded {
            nodes: max_count as u64,
        });
    }
    let mut out = Vec::with_capacity(expected as usize);
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // free slots: (row r, column c) with c > pivots[r] and c not a pivot
        let slots: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let pv = &pivots;
                (pv[r] + 1..d).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
            })
            .collect();
        let mut vals = vec![0u32; slots.len()];
        loop {
            let mut basis = vec![vec![0u32; d]; k];
            for (r, &pc) in pivots.iter().enumerate() {
                basis[r][pc] = 1;
            }
            for (&(r, c), &v) in slots.iter().zip(&vals) {
                basis[r][c] = v;
            }
            out.push(Subspace {
                p,
                d,
                basis,
                pivots: pivots.clone(),
            });
            let mut carry = true;
            for v in vals.iter_mut().rev() {
                *v += 1;
                if *v < p.get() {
                    carry = false;
                    break;
                }
                *v = 0;
            }
            if carry {
                break;
            }
        }
        if !next_combination(&mut pivots, d) {
            break;
        }
    }
    debug_assert_eq!(out.len() as u128, expected);
    Ok(out)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
