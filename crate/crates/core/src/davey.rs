//! Davey matrices: `p × p` nonnegative integer matrices whose row sums,
//! column sums and wrapped diagonal sums `Σ_i X[i][i+s]` all agree.
//!
//! Two rows `x, y` of a log-Hadamard matrix give one through
//! `X[i][j] = #{k : y_k = i, x_k = j}`.

use std::ops::Add;

use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Meter;
use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::fourier::is_balanced;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DaveyMatrix {
    p: u32,
    weight: u64,
    entries: Vec<Vec<u64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumKind {
    Row,
    Column,
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SumViolation {
    pub kind: SumKind,
    pub index: usize,
    pub sum: u64,
    pub expected: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DaveyCheck {
    pub is_davey: bool,
    /// Common sum, taken from row 0.
    pub weight: u64,
    pub violation: Option<SumViolation>,
}

fn square_prime_size(x: &[Vec<u64>]) -> Result<PrimeModulus> {
    let n = x.len();
    if let Some(row) = x.iter().find(|r| r.len() != n) {
        return Err(Error::InvalidMatrix(format!(
            "expected {n}x{n}, found a row of length {}",
            row.len()
        )));
    }
    PrimeModulus::new(n as u32).map_err(|_| Error::InvalidMatrix(format!("size {n} is not prime")))
}

/// Row sums, then column sums, then diagonal sums `s = 0..p`, each against
/// the sum of row 0.
pub fn is_davey(x: &[Vec<u64>]) -> Result<DaveyCheck> {
    let p = square_prime_size(x)?.get() as usize;
    let expected: u64 = x[0].iter().sum();
    let families = [
        (SumKind::Row, (0..p).map(|i| x[i].iter().sum()).collect::<Vec<u64>>()),
        (SumKind::Column, (0..p).map(|j| (0..p).map(|i| x[i][j]).sum()).collect()),
        (
            SumKind::Diagonal,
            (0..p).map(|s| (0..p).map(|i| x[i][(i + s) % p]).sum()).collect(),
        ),
    ];
    for (kind, sums) in families {
        if let Some((index, &sum)) = sums.iter().enumerate().find(|(_, &s)| s != expected) {
            return Ok(DaveyCheck {
                is_davey: false,
                weight: expected,
                violation: Some(SumViolation {
                    kind,
                    index,
                    sum,
                    expected,
                }),
            });
        }
    }
    Ok(DaveyCheck {
        is_davey: true,
        weight: expected,
        violation: None,
    })
}

impl DaveyMatrix {
    pub fn new(entries: Vec<Vec<u64>>) -> Result<Self> {
        let check = is_davey(&entries)?;
        if let Some(v) = check.violation {
            return Err(Error::InvalidMatrix(format!(
                "{:?} {} sums to {}, expected {}",
                v.kind, v.index, v.sum, v.expected
            )));
        }
        Ok(Self {
            p: entries.len() as u32,
            weight: check.weight,
            entries,
        })
    }

    pub fn zero(p: PrimeModulus) -> Self {
        let n = p.get() as usize;
        Self {
            p: p.get(),
            weight: 0,
            entries: vec![vec![0; n]; n],
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn entries(&self) -> &[Vec<u64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i][j]
    }

    pub fn checked_add(&self, other: &DaveyMatrix) -> Result<DaveyMatrix> {
        if self.p != other.p {
            return Err(Error::InvalidArgument(format!(
                "cannot add {0}x{0} and {1}x{1}",
                self.p, other.p
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        DaveyMatrix::new(entries)
    }
}

impl Add for &DaveyMatrix {
    type Output = DaveyMatrix;

    /// Panics if the sizes differ.
    fn add(self, other: &DaveyMatrix) -> DaveyMatrix {
        self.checked_add(other).expect("Davey matrices of the same size")
    }
}

fn difference(p: PrimeModulus, x: &[u32], y: &[u32]) -> Vec<u32> {
    x.iter().zip(y).map(|(&a, &b)| p.sub(a, b)).collect()
}

/// `X[i][j] = #{k : y_k = i, x_k = j}` for balanced `x`, `y` with balanced
/// difference.
pub fn davey_from_rows(p: PrimeModulus, x: &[u32], y: &[u32]) -> Result<DaveyMatrix> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if let Some(&v) = x.iter().chain(y).find(|&&v| v >= p.get()) {
        return Err(Error::InvalidArgument(format!("entry {v} is not a residue mod {p}")));
    }
    if !is_balanced(p, x) {
        return Err(Error::NotBalanced("x"));
    }
    if !is_balanced(p, y) {
        return Err(Error::NotBalanced("y"));
    }
    if !is_balanced(p, &difference(p, x, y)) {
        return Err(Error::NotBalanced("x - y"));
    }
    let n = p.get() as usize;
    let mut entries = vec![vec![0u64; n]; n];
    for (&a, &b) in x.iter().zip(y) {
        entries[b as usize][a as usize] += 1;
    }
    let out = DaveyMatrix::new(entries)
        .map_err(|e| Error::InternalInconsistency(format!("position count is not Davey: {e}")))?;
    if out.weight as usize * n != x.len() {
        return Err(Error::InternalInconsistency(
            "Davey weight differs from length / p".into(),
        ));
    }
    Ok(out)
}

/// `σ_1, σ_2, σ_3`: the three `3 × 3` permutation matrices that are Davey.
pub const SIGMA: [[[u64; 3]; 3]; 3] = [
    [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
    [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
    [[1, 0, 0], [0, 0, 1], [0, 1, 0]],
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "p")]
pub enum DaveyDecomposition {
    /// `X = ℓ · J`.
    #[serde(rename = "2")]
    Two { ell: u64 },
    /// `X = s_1 σ_1 + s_2 σ_2 + s_3 σ_3`.
    #[serde(rename = "3")]
    Three { s: [u64; 3] },
}

impl DaveyDecomposition {
    pub fn reconstruct(&self) -> Vec<Vec<u64>> {
        match *self {
            DaveyDecomposition::Two { ell } => vec![vec![ell; 2]; 2],
            DaveyDecomposition::Three { s } => (0..3)
                .map(|i| (0..3).map(|j| (0..3).map(|k| s[k] * SIGMA[k][i][j]).sum()).collect())
                .collect(),
        }
    }
}

pub fn decompose_davey(x: &DaveyMatrix) -> Result<DaveyDecomposition> {
    let e = &x.entries;
    let out = match x.p {
        2 => DaveyDecomposition::Two { ell: e[0][0] },
        // σ_k has a 1 on row 0 at column k mod 3
        3 => DaveyDecomposition::Three {
            s: [e[0][1], e[0][2], e[0][0]],
        },
        p => return Err(Error::UnsupportedPrime(p)),
    };
    if out.reconstruct() != *e {
        return Err(Error::NotDecomposable(format!("{e:?}")));
    }
    Ok(out)
}

/// For `p = 3`: whether `#(x=i, y=j) = #(x=j, y=i) = #(x=k, y=k)` for every
/// `{i, j, k} = {0, 1, 2}`.
pub fn triplet_rule_check(p: PrimeModulus, x: &[u32], y: &[u32]) -> Result<bool> {
    if p.get() != 3 {
        return Err(Error::UnsupportedPrime(p.get()));
    }
    if x.len() != y.len() {
        return Err(Error::SizeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mut count = [[0usize; 3]; 3];
    for (&a, &b) in x.iter().zip(y) {
        if a >= 3 || b >= 3 {
            return Err(Error::InvalidArgument(format!(
                "entry {} is not a residue mod 3",
                a.max(b)
            )));
        }
        count[a as usize][b as usize] += 1;
    }
    Ok([(0, 1, 2), (0, 2, 1), (1, 2, 0)]
        .iter()
        .all(|&(i, j, k)| count[i][j] == count[j][i] && count[j][i] == count[k][k]))
}

/// Every weight-`m` Davey matrix of size `p`, in lexicographic order of
/// entries.
pub fn enumerate_davey(p: PrimeModulus, m: u64, meter: &Meter) -> Result<Vec<DaveyMatrix>> {
    let n = p.get() as usize;
    let first_rows = compositions(m, n);
    let per_row: Vec<Vec<DaveyMatrix>> = first_rows
        .into_par_iter()
        .map(|row| {
            let mut state = Fill::new(n, m);
            state.place(0, &row);
            let mut out = Vec::new();
            state.fill(1, meter, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_row.into_iter().flatten().collect())
}

/// Compositions of `m` into `n` nonnegative parts, lexicographic.
fn compositions(m: u64, n: usize) -> Vec<Vec<u64>> {
    fn go(rest: u64, n: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() + 1 == n {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=rest {
            cur.push(v);
            go(rest - v, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(m, n, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

struct Fill {
    n: usize,
    m: u64,
    rows: Vec<Vec<u64>>,
    col: Vec<u64>,
    diag: Vec<u64>,
}

impl Fill {
    fn new(n: usize, m: u64) -> Self {
        Self {
            n,
            m,
            rows: vec![vec![0; n]; n],
            col: vec![0; n],
            diag: vec![0; n],
        }
    }

    fn fits(&self, i: usize, row: &[u64]) -> bool {
        row.iter()
            .enumerate()
            .all(|(j, &v)| self.col[j] + v <= self.m && self.diag[(j + self.n - i) % self.n] + v <= self.m)
    }

    fn place(&mut self, i: usize, row: &[u64]) {
        for (j, &v) in row.iter().enumerate() {
            self.col[j] += v;
            self.diag[(j + self.n - i) % self.n] += v;
        }
        self.rows[i] = row.to_vec();
    }

    fn remove(&mut self, i: usize) {
        for j in 0..self.n {
            let v = self.rows[i][j];
            self.col[j] -= v;
            self.diag[(j + self.n - i) % self.n] -= v;
        }
    }

    fn fill(&mut self, i: usize, meter: &Meter, out: &mut Vec<DaveyMatrix>) -> Result<()> {
        meter.tick()?;
        let n = self.n;
        if i + 1 == n {
            // the last row is forced by the column sums
            let row: Vec<u64> = self.col.iter().map(|&c| self.m - c).collect();
            if row.iter().sum::<u64>() == self.m && self.fits(i, &row) {
                self.place(i, &row);
                if self.diag.iter().all(|&d| d == self.m) {
                    out.push(DaveyMatrix {
                        p: n as u32,
                        weight: self.m,
                        entries: self.rows.clone(),
                    });
                }
                self.remove(i);
            }
            return Ok(());
        }
        for row in compositions(self.m, n) {
            if self.fits(i, &row) {
                self.place(i, &row);
                self.fill(i + 1, meter, out)?;
                self.remove(i);
            }
        }
        Ok(())
    }
}

/// Split a matrix with all row and column sums `m` into `m` permutations
/// (as `perm[i] = j`) by repeated perfect matching on the support.
pub fn permutation_decomposition(x: &[Vec<u64>]) -> Result<Vec<Vec<usize>>> {
    let mut rest: Vec<Vec<u64>> = x.to_vec();
    let weight: u64 = rest.first().map_or(0, |r| r.iter().sum());
    let mut perms = Vec::new();
    for _ in 0..weight {
        let perm =
            perfect_matching(&rest).ok_or_else(|| Error::NotDecomposable("support has no perfect matching".into()))?;
        for (i, &j) in perm.iter().enumerate() {
            rest[i][j] -= 1;
        }
        perms.push(perm);
    }
    if rest.iter().flatten().any(|&v| v != 0) || perms.len() as u64 != weight {
        return Err(Error::NotDecomposable("row and column sums differ".into()));
    }
    Ok(perms)
}

fn perfect_matching(x: &[Vec<u64>]) -> Option<Vec<usize>> {
    let n = x.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(x: &[Vec<u64>], i: usize, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..x.len() {
            if x[i][j] > 0 && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(x, k, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..n {
        if !augment(x, i, &mut vec![false; n], &mut owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        perm[(*o)?] = j;
    }
    Some(perm)
}
