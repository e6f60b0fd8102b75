//! Finite abelian groups `Z_{n_1} × … × Z_{n_k}`, their elements and subsets.
//!
//! Points are stored internally as mixed-radix indices with the first
//! coordinate most significant, so the natural integer order of indices is
//! the lexicographic order of coordinate tuples.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use super::prime::PrimeModulus;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ambient {
    moduli: Arc<[u32]>,
    strides: Arc<[usize]>,
    order: usize,
    prime: Option<PrimeModulus>,
}

impl Ambient {
    /// Product group with the given per-coordinate moduli (each at least 1).
    pub fn new(moduli: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = moduli.iter().find(|&&m| m == 0) {
            return Err(Error::InvalidModulus(bad));
        }
        let mut strides = vec![0usize; moduli.len()];
        let mut order: usize = 1;
        for (i, &m) in moduli.iter().enumerate().rev() {
            strides[i] = order;
            order = order.checked_mul(m as usize).ok_or(Error::GroupTooLarge)?;
        }
        let prime = match moduli.first() {
            Some(&first) if moduli.iter().all(|&m| m == first) => PrimeModulus::new(first).ok(),
            _ => None,
        };
        Ok(Self {
            moduli: moduli.into(),
            strides: strides.into(),
            order,
            prime,
        })
    }

    /// The vector space `Z_p^d`.
    pub fn homogeneous(p: PrimeModulus, d: usize) -> Result<Self> {
        let mut a = Self::new(vec![p.get(); d])?;
        a.prime = Some(p);
        Ok(a)
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `Some(p)` when the group is `Z_p^d` for a prime `p`.
    pub fn prime(&self) -> Option<PrimeModulus> {
        self.prime
    }

    pub fn require_prime(&self) -> Result<PrimeModulus> {
        self.prime.ok_or_else(|| Error::NonHomogeneous(self.moduli.to_vec()))
    }

    /// Direct product `self × other`.
    pub fn product(&self, other: &Ambient) -> Result<Ambient> {
        let mut m = self.moduli.to_vec();
        m.extend_from_slice(&other.moduli);
        Ambient::new(m)
    }

    pub fn check_coords(&self, coords: &[u32]) -> Result<()> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        for (i, (&c, &m)) in coords.iter().zip(self.moduli.iter()).enumerate() {
            if c >= m {
                return Err(Error::CoordinateOutOfRange {
                    point: 0,
                    coordinate: i,
                    value: u64::from(c),
                    modulus: m,
                });
            }
        }
        Ok(())
    }

    /// Index of reduced coordinates. Caller guarantees range.
    #[inline]
    pub fn encode(&self, coords: &[u32]) -> usize {
        coords
            .iter()
            .zip(self.strides.iter())
            .map(|(&c, &s)| c as usize * s)
            .sum()
    }

    /// Index of arbitrary integer coordinates, reducing each modulo its modulus.
    pub fn encode_reducing(&self, coords: &[i64]) -> usize {
        coords
            .iter()
            .zip(self.moduli.iter().zip(self.strides.iter()))
            .map(|(&c, (&m, &s))| c.rem_euclid(i64::from(m)) as usize * s)
            .sum()
    }

    #[inline]
    pub fn decode_into(&self, mut index: usize, out: &mut [u32]) {
        for (slot, &s) in out.iter_mut().zip(self.strides.iter()) {
            *slot = (index / s) as u32;
            index %= s;
        }
    }

    pub fn decode(&self, index: usize) -> Vec<u32> {
        let mut out = vec![0; self.dim()];
        self.decode_into(index, &mut out);
        out
    }

    /// Index of the sum of two elements given by index.
    pub fn add(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for (&m, &s) in self.moduli.iter().zip(self.strides.iter()) {
            let (ca, cb) = (a / s, b / s);
            a %= s;
            b %= s;
            out += (ca + cb) % m as usize * s;
        }
        out
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        for (&m, &s) in self.moduli.iter().zip(self.strides.iter()) {
            let (ca, cb) = (a / s, b / s);
            a %= s;
            b %= s;
            out += (ca + m as usize - cb) % m as usize * s;
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        self.sub(0, a)
    }
}

impl fmt::Debug for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ambient{:?}", &*self.moduli)
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(p), true) = (self.prime, self.dim() > 0) {
            return write!(f, "Z_{}^{}", p, self.dim());
        }
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z_{m}")).collect();
        write!(f, "{}", parts.join(" × "))
    }
}

/// An element of an [`Ambient`] group.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupVector {
    ambient: Ambient,
    coords: Vec<u32>,
}

impl GroupVector {
    pub fn new(ambient: Ambient, coords: Vec<u32>) -> Result<Self> {
        ambient.check_coords(&coords)?;
        Ok(Self { ambient, coords })
    }

    pub fn zero(ambient: Ambient) -> Self {
        let coords = vec![0; ambient.dim()];
        Self { ambient, coords }
    }

    pub fn from_index(ambient: Ambient, index: usize) -> Self {
        let coords = ambient.decode(index);
        Self { ambient, coords }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.coords
    }

    pub fn index(&self) -> usize {
        self.ambient.encode(&self.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Dot product modulo `p` (homogeneous ambients only).
    pub fn dot(&self, other: &GroupVector) -> Result<u32> {
        let p = self.ambient.require_prime()?;
        if self.ambient != other.ambient {
            return Err(mismatch(&self.ambient, &other.ambient));
        }
        Ok(dot_mod(p, &self.coords, &other.coords))
    }
}

impl fmt::Debug for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for GroupVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

#[inline]
pub fn dot_mod(p: PrimeModulus, a: &[u32], b: &[u32]) -> u32 {
    let acc: u64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| u64::from(x) * u64::from(y) % u64::from(p.get()))
        .sum();
    p.reduce_u64(acc)
}

pub(crate) fn mismatch(a: &Ambient, b: &Ambient) -> Error {
    Error::AmbientMismatch {
        left: a.moduli().to_vec(),
        right: b.moduli().to_vec(),
    }
}

/// A finite set of distinct points of one ambient group, kept in
/// lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    ambient: Ambient,
    indices: Vec<usize>,
}

impl PointSet {
    /// Build from coordinate lists, rejecting duplicates and out-of-range
    /// coordinates with the offending position.
    pub fn new(ambient: Ambient, points: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(points.len());
        let mut indices = Vec::with_capacity(points.len());
        for (i, pt) in points.iter().enumerate() {
            ambient.check_coords(pt).map_err(|e| match e {
                Error::CoordinateOutOfRange {
                    coordinate,
                    value,
                    modulus,
                    ..
                } => Error::CoordinateOutOfRange {
                    point: i,
                    coordinate,
                    value,
                    modulus,
                },
                other => other,
            })?;
            let idx = ambient.encode(pt);
            if !seen.insert(idx) {
                return Err(Error::DuplicatePoint { index: i });
            }
            indices.push(idx);
        }
        indices.sort_unstable();
        Ok(Self { ambient, indices })
    }

    /// Build from indices; duplicates are merged.
    pub fn from_indices(ambient: Ambient, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        debug_assert!(indices.last().is_none_or(|&i| i < ambient.order()));
        Self { ambient, indices }
    }

    pub fn whole(ambient: Ambient) -> Self {
        let n = ambient.order();
        Self {
            ambient,
            indices: (0..n).collect(),
        }
    }

    pub fn empty(ambient: Ambient) -> Self {
        Self {
            ambient,
            indices: Vec::new(),
        }
    }

    pub fn singleton(point: &GroupVector) -> Self {
        Self {
            ambient: point.ambient.clone(),
            indices: vec![point.index()],
        }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Sorted mixed-radix indices of the points.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn contains(&self, coords: &[u32]) -> bool {
        self.ambient.check_coords(coords).is_ok() && self.contains_index(self.ambient.encode(coords))
    }

    pub fn iter(&self) -> impl Iterator<Item = GroupVector> + '_ {
        self.indices
            .iter()
            .map(move |&i| GroupVector::from_index(self.ambient.clone(), i))
    }

    /// Coordinates of every point, in lexicographic order.
    pub fn coords(&self) -> Vec<Vec<u32>> {
        self.indices.iter().map(|&i| self.ambient.decode(i)).collect()
    }

    /// Row-major flat coordinate table (`len() * dim()` entries).
    pub fn flat_coords(&self) -> Vec<u32> {
        let d = self.ambient.dim();
        let mut out = vec![0; self.len() * d];
        for (chunk, &i) in out.chunks_mut(d.max(1)).zip(&self.indices) {
            if d > 0 {
                self.ambient.decode_into(i, chunk);
            }
        }
        out
    }

    pub fn contains_zero(&self) -> bool {
        self.indices.first() == Some(&0)
    }

    /// `{x + t : x ∈ self}`.
    pub fn translate(&self, t: &[u32]) -> Result<Self> {
        self.ambient.check_coords(t)?;
        let ti = self.ambient.encode(t);
        Ok(Self::from_indices(
            self.ambient.clone(),
            self.indices.iter().map(|&i| self.ambient.add(i, ti)),
        ))
    }

    /// `{r·x : x ∈ self}` for a scalar `r` (homogeneous ambients).
    pub fn scale(&self, r: u32) -> Result<Self> {
        let p = self.ambient.require_prime()?;
        let r = r % p.get();
        let mut buf = vec![0; self.ambient.dim()];
        let mapped: Vec<usize> = self
            .indices
            .iter()
            .map(|&i| {
                self.ambient.decode_into(i, &mut buf);
                for c in buf.iter_mut() {
                    *c = p.mul(*c, r);
                }
                self.ambient.encode(&buf)
            })
            .collect();
        Ok(Self::from_indices(self.ambient.clone(), mapped))
    }

    /// Embed into a larger ambient whose leading moduli match ours; the
    /// extra coordinates are zero.
    pub fn embed_zero_padded(&self, target: &Ambient) -> Result<Self> {
        let d = self.ambient.dim();
        if target.dim() < d || target.moduli()[..d] != *self.ambient.moduli() {
            return Err(mismatch(&self.ambient, target));
        }
        let mut buf = vec![0u32; target.dim()];
        let mapped: Vec<usize> = self
            .indices
            .iter()
            .map(|&i| {
                self.ambient.decode_into(i, &mut buf[..d]);
                target.encode(&buf)
            })
            .collect();
        Ok(Self::from_indices(target.clone(), mapped))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}} ⊂ {}", pts.join(", "), self.ambient)
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PointSet", 2)?;
        st.serialize_field("moduli", self.ambient.moduli())?;
        st.serialize_field("points", &self.coords())?;
        st.end()
    }
}
