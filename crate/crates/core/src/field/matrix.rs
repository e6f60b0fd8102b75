use std::fmt;

use serde::{Serialize, Serializer};

use super::prime::PrimeModulus;
use crate::error::{Error, Result};

/// A dense rectangular matrix of residues modulo a prime, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueMatrix {
    p: PrimeModulus,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl ResidueMatrix {
    pub fn new(p: PrimeModulus, rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|&e| e >= p.get()) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) = {} is not reduced modulo {p}",
                pos / cols,
                pos % cols,
                entries[pos]
            )));
        }
        Ok(Self { p, rows, cols, entries })
    }

    pub fn from_rows(p: PrimeModulus, rows: Vec<Vec<u32>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(Error::InvalidMatrix(format!(
                "row {bad} has {} entries, expected {c}",
                rows[bad].len()
            )));
        }
        Self::new(p, r, c, rows.into_iter().flatten().collect())
    }

    /// Build from a formula; values are reduced modulo `p`.
    pub fn from_fn(p: PrimeModulus, rows: usize, cols: usize, f: impl Fn(usize, usize) -> i64) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(p.reduce(f(i, j)));
            }
        }
        Self::new(p, rows, cols, entries)
    }

    pub fn identity(p: PrimeModulus, n: usize) -> Result<Self> {
        Self::from_fn(p, n, n, |i, j| i64::from(i == j))
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u32) {
        self.entries[i * self.cols + j] = value % self.p.get();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        Self {
            p: self.p,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::InvalidMatrix(format!(
                "moduli differ: {} vs {}",
                self.p, other.p
            )));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let p = u64::from(self.p.get());
        let mut entries = vec![0u32; self.rows * other.cols];
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc = (acc + u64::from(self.get(i, k)) * u64::from(other.get(k, j))) % p;
                }
                entries[i * other.cols + j] = acc as u32;
            }
        }
        Ok(Self {
            p: self.p,
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// Matrix–vector product `M·v`.
    pub fn apply(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let p = u64::from(self.p.get());
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + u64::from(a) * u64::from(b)) % p) as u32
            })
            .collect())
    }

    /// Entrywise map, reducing the result.
    pub fn map(&self, f: impl Fn(usize, usize, u32) -> i64) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * self.cols + j] = self.p.reduce(f(i, j, self.get(i, j)));
            }
        }
        out
    }

    pub fn permute(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        debug_assert_eq!(row_order.len(), self.rows);
        debug_assert_eq!(col_order.len(), self.cols);
        let mut entries = Vec::with_capacity(self.entries.len());
        for &i in row_order {
            for &j in col_order {
                entries.push(self.get(i, j));
            }
        }
        Self {
            p: self.p,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn row_reduce(&self) -> RowReduction {
        let mut rows = self.to_rows();
        let pivots = rref_in_place(self.p, &mut rows);
        RowReduction {
            rref: Self {
                p: self.p,
                rows: self.rows,
                cols: self.cols,
                entries: rows.into_iter().flatten().collect(),
            },
            pivot_columns: pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank()
    }

    /// Indices of the first maximal independent family of rows, scanning
    /// top to bottom.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut basis = RowSpaceBasis::new(self.p, self.cols);
        (0..self.rows).filter(|&i| basis.insert(self.row(i))).collect()
    }

    /// Inverse of a square matrix, or `SingularMatrix`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::InvalidMatrix("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| u32::from(i == j)));
                r
            })
            .collect();
        let pivots = rref_in_place(self.p, &mut aug);
        let rank = pivots.iter().take_while(|&&c| c < n).count();
        if rank < n {
            return Err(Error::SingularMatrix { rank, dim: n });
        }
        Self::new(self.p, n, n, aug.into_iter().flat_map(|r| r[n..].to_vec()).collect())
    }
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ResidueMatrix mod {} ({}x{})", self.p, self.rows, self.cols)?;
        for i in 0..self.rows {
            let r: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            writeln!(f, "  [{}]", r.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for ResidueMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ResidueMatrix", 2)?;
        st.serialize_field("p", &self.p.get())?;
        st.serialize_field("rows", &self.to_rows())?;
        st.end()
    }
}

/// Result of Gauss–Jordan elimination.
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rref: ResidueMatrix,
    pub pivot_columns: Vec<usize>,
}

impl RowReduction {
    pub fn rank(&self) -> usize {
        self.pivot_columns.len()
    }
}

/// Reduce `rows` to reduced row echelon form in place; returns pivot columns.
/// Zero rows end up at the bottom.
pub(crate) fn rref_in_place(p: PrimeModulus, rows: &mut [Vec<u32>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = p.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = p.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = p.sub(*x, p.mul(f, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Incrementally built row space that remembers how each of its echelon
/// rows is expressed in terms of the accepted generators.
#[derive(Clone, Debug)]
pub struct RowSpaceBasis {
    p: PrimeModulus,
    width: usize,
    echelon: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    combos: Vec<Vec<u32>>,
}

impl RowSpaceBasis {
    pub fn new(p: PrimeModulus, width: usize) -> Self {
        Self {
            p,
            width,
            echelon: Vec::new(),
            pivots: Vec::new(),
            combos: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon.len()
    }

    /// Remainder of `v` after elimination, plus the coefficients over the
    /// accepted generators of the part that was removed: `v = rem + Σ c_g gen_g`.
    fn reduce(&self, v: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let p = self.p;
        let mut rem: Vec<u32> = v.iter().map(|&x| x % p.get()).collect();
        let mut coeffs = vec![0u32; self.rank()];
        for ((row, &pc), combo) in self.echelon.iter().zip(&self.pivots).zip(&self.combos) {
            let c = rem[pc];
            if c == 0 {
                continue;
            }
            for (x, &y) in rem.iter_mut().zip(row) {
                *x = p.sub(*x, p.mul(c, y));
            }
            for (k, &y) in combo.iter().enumerate() {
                coeffs[k] = p.add(coeffs[k], p.mul(c, y));
            }
        }
        (rem, coeffs)
    }

    /// Add `v` as a generator if it is independent of the current span.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.width, "vector width");
        let p = self.p;
        let (mut rem, coeffs) = self.reduce(v);
        let Some(pc) = rem.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = p.inv(rem[pc]).expect("nonzero");
        for x in rem.iter_mut() {
            *x = p.mul(*x, inv);
        }
        let g = self.rank();
        for combo in &mut self.combos {
            combo.push(0);
        }
        // new row = inv * (v - Σ c_k b_k)
        let mut combo: Vec<u32> = coeffs.iter().map(|&c| p.mul(inv, p.neg(c))).collect();
        combo.push(inv);
        debug_assert_eq!(combo.len(), g + 1);
        self.echelon.push(rem);
        self.pivots.push(pc);
        self.combos.push(combo);
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).0.iter().all(|&x| x == 0)
    }

    /// Coefficients `c` with `v = Σ c_g · generator_g`, if `v` is in the span.
    pub fn express(&self, v: &[u32]) -> Option<Vec<u32>> {
        let (rem, coeffs) = self.reduce(v);
        rem.iter().all(|&x| x == 0).then_some(coeffs)
    }
}
