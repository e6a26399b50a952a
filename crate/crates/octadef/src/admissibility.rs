//! Admissibility of the unit L1 octahedron with respect to a centering.
//!
//! The octahedron is admissible when no lattice point other than the origin
//! and the signed frame vectors lies in its open interior, i.e. every
//! non-integer coset of Z^n in Λ keeps L1 distance at least 1 from Z^n.
//! A strict flag demands distance strictly greater than 1 instead, which
//! moves boundary lattices (minimum exactly 1) to the inadmissible side.

use num_rational::BigRational;
use num_traits::One;

use crate::error::Result;
use crate::lattice::{CosetElement, RationalLattice, DEFAULT_COSET_GUARD};

/// Outcome of the admissibility decision. `min_norm` is the minimum over
/// nonzero cosets of the minimal L1 norm of a representative; it is absent
/// exactly when Λ = Z^n, in which case the octahedron is trivially
/// admissible. The witness is the lexicographically least coset attaining
/// the minimum.
#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub strict: bool,
    pub min_norm: Option<BigRational>,
    pub witness: Option<CosetElement>,
}

/// Minimum of the minimal-representative L1 norms over the non-integer
/// cosets, with a deterministic witness; None for Λ = Z^n.
pub fn min_noninteger_l1(lattice: &RationalLattice) -> Result<Option<(BigRational, CosetElement)>> {
    min_noninteger_l1_guarded(lattice, DEFAULT_COSET_GUARD)
}

pub fn min_noninteger_l1_guarded(
    lattice: &RationalLattice,
    guard: u64,
) -> Result<Option<(BigRational, CosetElement)>> {
    let lat = lattice.normalize();
    let q = lat.denominator().clone();
    let mut best: Option<(BigRational, CosetElement)> = None;
    // Cosets come out sorted, so the first attainer is the lex-least one.
    for coset in lat.coset_group_guarded(guard)? {
        if coset.is_identity() {
            continue;
        }
        let norm = coset.min_norm(&q);
        match &best {
            Some((cur, _)) if *cur <= norm => {}
            _ => best = Some((norm, coset)),
        }
    }
    Ok(best)
}

pub fn is_admissible(lattice: &RationalLattice, strict: bool) -> Result<AdmissibilityReport> {
    is_admissible_guarded(lattice, strict, DEFAULT_COSET_GUARD)
}

/// Default convention (`strict = false`): admissible iff every nonzero
/// coset has minimal norm >= 1, so only the open interior must be free of
/// lattice points. `strict = true` demands > 1.
pub fn is_admissible_guarded(
    lattice: &RationalLattice,
    strict: bool,
    guard: u64,
) -> Result<AdmissibilityReport> {
    let one = BigRational::one();
    match min_noninteger_l1_guarded(lattice, guard)? {
        None => Ok(AdmissibilityReport {
            admissible: true,
            strict,
            min_norm: None,
            witness: None,
        }),
        Some((min_norm, witness)) => Ok(AdmissibilityReport {
            admissible: if strict { min_norm > one } else { min_norm >= one },
            strict,
            min_norm: Some(min_norm),
            witness: Some(witness),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::l1_norm;
    use num_bigint::BigInt;

    fn lat(n: usize, q: i64, rows: &[&[i64]]) -> RationalLattice {
        RationalLattice::from_i64(n, q, rows)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn standard_lattice_has_no_noninteger_coset() {
        assert!(min_noninteger_l1(&RationalLattice::standard(3))
            .unwrap()
            .is_none());
        let report = is_admissible(&RationalLattice::standard(3), false).unwrap();
        assert!(report.admissible);
        assert!(report.min_norm.is_none());
    }

    #[test]
    fn half_diagonal_attains_norm_one() {
        let l = lat(2, 2, &[&[1, 1]]);
        let (norm, witness) = min_noninteger_l1(&l).unwrap().unwrap();
        assert_eq!(norm, rat(1, 1));
        assert_eq!(
            witness.numerators,
            vec![BigInt::from(1), BigInt::from(1)]
        );
    }

    #[test]
    fn third_diagonal_attains_two_thirds() {
        let l = lat(2, 3, &[&[1, 1]]);
        let (norm, witness) = min_noninteger_l1(&l).unwrap().unwrap();
        assert_eq!(norm, rat(2, 3));
        assert_eq!(
            witness.numerators,
            vec![BigInt::from(1), BigInt::from(1)]
        );
    }

    #[test]
    fn boundary_lattice_splits_on_convention() {
        let l = lat(2, 2, &[&[1, 1]]);
        assert!(is_admissible(&l, false).unwrap().admissible);
        assert!(!is_admissible(&l, true).unwrap().admissible);
    }

    #[test]
    fn short_coset_is_not_admissible() {
        let l = lat(2, 3, &[&[1, 1]]);
        assert!(!is_admissible(&l, false).unwrap().admissible);
    }

    #[test]
    fn reported_minimum_is_attained_by_a_lattice_vector() {
        for l in [
            lat(2, 2, &[&[1, 1]]),
            lat(2, 3, &[&[1, 1]]),
            lat(3, 6, &[&[1, 2, 3], &[5, 1, 0]]),
            lat(5, 5, &[&[1, 1, 1, 1, 1]]),
        ] {
            let norm_lat = l.normalize();
            let (norm, witness) = min_noninteger_l1(&l).unwrap().unwrap();
            let rep = witness.min_norm_representative(norm_lat.denominator());
            assert!(norm_lat.contains(&rep).unwrap());
            assert_eq!(l1_norm(&rep), norm);
        }
    }

    #[test]
    fn admissibility_is_invariant_under_normalize() {
        for l in [
            lat(2, 4, &[&[2, 2]]),
            lat(2, 12, &[&[6, 6]]),
            lat(3, 9, &[&[3, 6, 3]]),
        ] {
            let a = is_admissible(&l, false).unwrap();
            let b = is_admissible(&l.normalize(), false).unwrap();
            assert_eq!(a.admissible, b.admissible);
            assert_eq!(a.min_norm, b.min_norm);
        }
    }

    #[test]
    fn five_cycle_lattice_is_admissible_on_the_boundary() {
        // Every nonzero coset of <Z^5, (1/5,...,1/5)> has norm exactly 1.
        let l = lat(5, 5, &[&[1, 1, 1, 1, 1]]);
        let report = is_admissible(&l, false).unwrap();
        assert!(report.admissible);
        assert_eq!(report.min_norm.unwrap(), rat(1, 1));
    }
}
