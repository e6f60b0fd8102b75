//! Exact arithmetic modulo a prime, group elements and point sets, residue
//! matrices and linear subspaces of `Z_p^d`.

mod group;
mod matrix;
mod prime;
mod subspace;

pub use group::{dot_mod, Ambient, GroupVector, PointSet};
pub use matrix::{ResidueMatrix, RowReduction, RowSpaceBasis};
pub use prime::{find_nonsquare, is_prime, PrimeModulus};
pub use subspace::{enumerate_subspaces, gaussian_binomial, Subspace};

pub(crate) use group::mismatch;

use crate::error::{Error, Result};

/// `{B·x + m : x ∈ E}` for an invertible `B`.
pub fn affine_image(set: &PointSet, linear: &ResidueMatrix, shift: &GroupVector) -> Result<PointSet> {
    let ambient = set.ambient();
    let p = ambient.require_prime()?;
    let d = ambient.dim();
    if linear.modulus() != p || linear.rows() != d || linear.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: linear.rows(),
        });
    }
    if shift.ambient() != ambient {
        return Err(mismatch(ambient, shift.ambient()));
    }
    let rank = linear.rank();
    if rank < d {
        return Err(Error::SingularMatrix { rank, dim: d });
    }
    let mut image = Vec::with_capacity(set.len());
    for x in set.coords() {
        let mut y = linear.apply(&x)?;
        for (c, &s) in y.iter_mut().zip(shift.coords()) {
            *c = p.add(*c, s);
        }
        image.push(ambient.encode(&y));
    }
    let out = PointSet::from_indices(ambient.clone(), image);
    debug_assert_eq!(out.len(), set.len());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_examples() {
        let p = PrimeModulus::new(3).unwrap();
        let a = Ambient::homogeneous(p, 2).unwrap();
        let e = PointSet::new(a.clone(), vec![vec![0, 0], vec![1, 0]]).unwrap();
        let id = ResidueMatrix::identity(p, 2).unwrap();
        assert_eq!(affine_image(&e, &id, &GroupVector::zero(a.clone())).unwrap(), e);

        let swap = ResidueMatrix::from_rows(p, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let img = affine_image(&e, &swap, &GroupVector::zero(a.clone())).unwrap();
        assert_eq!(img.coords(), vec![vec![0, 0], vec![0, 1]]);

        let singular = ResidueMatrix::from_rows(p, vec![vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(
            affine_image(&e, &singular, &GroupVector::zero(a)),
            Err(Error::SingularMatrix { rank: 1, dim: 2 })
        );
    }
}
