use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime modulus `p`, validated by trial division at construction.
///
/// Residues handled through a `PrimeModulus` are always kept reduced in
/// `[0, p)`; every operation is exact integer arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u32) -> Result<Self> {
        if is_prime(u64::from(p)) {
            Ok(Self(p))
        } else {
            Err(Error::NotPrime(u64::from(p)))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_odd(self) -> bool {
        self.0 != 2
    }

    /// Reduce an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(i64::from(self.0)) as u32
    }

    #[inline]
    pub fn reduce_u64(self, x: u64) -> u32 {
        (x % u64::from(self.0)) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((u64::from(a) + u64::from(b)) % u64::from(self.0)) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        let p = u64::from(self.0);
        ((u64::from(a) + p - u64::from(b) % p) % p) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (u64::from(a) * u64::from(b) % u64::from(self.0)) as u32
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let p = u64::from(self.0);
        let mut acc = 1 % p;
        let mut b = u64::from(base) % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc as u32
    }

    /// Multiplicative inverse via Fermat's little theorem; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.0;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, u64::from(self.0) - 2))
        }
    }

    /// Legendre symbol by Euler's criterion: 0, 1 or -1.
    pub fn legendre(self, a: u32) -> i8 {
        let a = a % self.0;
        if a == 0 {
            return 0;
        }
        if self.0 == 2 {
            return 1;
        }
        let e = self.pow(a, u64::from(self.0 - 1) / 2);
        if e == 1 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn is_nonzero_square(self, a: u32) -> bool {
        self.legendre(a) == 1
    }

    #[inline]
    pub fn is_nonsquare(self, a: u32) -> bool {
        self.legendre(a) == -1
    }

    /// Iterator over all residues `0..p`.
    pub fn residues(self) -> std::ops::Range<u32> {
        0..self.0
    }
}

impl TryFrom<u32> for PrimeModulus {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeModulus> for u32 {
    fn from(p: PrimeModulus) -> u32 {
        p.0
    }
}

impl std::fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest `n` in `[2, p)` that is not a square modulo `p`.
pub fn find_nonsquare(p: PrimeModulus) -> Result<u32> {
    if !p.is_odd() {
        return Err(Error::NoNonsquare(p.get()));
    }
    (2..p.get())
        .find(|&n| p.pow(n, u64::from(p.get() - 1) / 2) == p.get() - 1)
        .ok_or(Error::NoNonsquare(p.get()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_squares(p: u32) -> Vec<u32> {
        let mut s: Vec<u32> = (0..p).map(|x| x * x % p).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    #[test]
    fn rejects_composites() {
        for n in [0u32, 1, 4, 9, 15, 91] {
            assert_eq!(PrimeModulus::new(n), Err(Error::NotPrime(u64::from(n))));
        }
        assert!(PrimeModulus::new(97).is_ok());
    }

    #[test]
    fn nonsquare_examples() {
        let p3 = PrimeModulus::new(3).unwrap();
        let p7 = PrimeModulus::new(7).unwrap();
        assert_eq!(find_nonsquare(p3), Ok(2));
        assert_eq!(brute_squares(7), vec![0, 1, 2, 4]);
        assert_eq!(find_nonsquare(p7), Ok(3));
        let p2 = PrimeModulus::new(2).unwrap();
        assert_eq!(find_nonsquare(p2), Err(Error::NoNonsquare(2)));
    }

    #[test]
    fn nonsquare_euler_power_is_minus_one() {
        for p in (3..=101).filter(|&n| is_prime(u64::from(n))) {
            let pm = PrimeModulus::new(p).unwrap();
            let n = find_nonsquare(pm).unwrap();
            assert_eq!(pm.pow(n, u64::from(p - 1) / 2), p - 1);
            assert!(!brute_squares(p).contains(&n));
            assert!((2..n).all(|m| brute_squares(p).contains(&m)));
        }
    }

    #[test]
    fn inverse_and_legendre() {
        let p = PrimeModulus::new(11).unwrap();
        for a in 1..11 {
            assert_eq!(p.mul(a, p.inv(a).unwrap()), 1);
            let sq = brute_squares(11).contains(&a);
            assert_eq!(p.is_nonzero_square(a), sq);
        }
        assert_eq!(p.inv(0), None);
        assert_eq!(p.reduce(-1), 10);
        assert_eq!(p.sub(3, 5), 9);
    }
}
