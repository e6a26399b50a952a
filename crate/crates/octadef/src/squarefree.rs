//! Defect-preserving reduction to square-free denominators.
//!
//! Two pieces: compression of any sublattice's generating set down to at
//! most m vectors (m being the generator count of the ambient centering),
//! and the reduction itself, which finds for every (n-d+1)-subset of
//! coordinates a lattice vector witnessing non-completability, strips each
//! witness's denominator down to a square-free one, and regenerates a
//! sublattice with the same defect. The defect equality is re-verified
//! against the brute-force oracle before a certificate is returned, so a
//! faulty witness choice can never produce a silently wrong certificate.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{k_subsets, IndexSet, RationalLattice, DEFAULT_DIM_GUARD};
use crate::matrix::{denominator_lcm, hnf, is_integer_vec, solve_mod, IntMatrix};

/// Witness vector for one coordinate subset: a lattice vector inside the
/// spanned subspace but outside its integer span, with its denominator
/// data. Multiplying by `cofactor` strips the denominator to the
/// square-free part while keeping the witness property.
#[derive(Clone, Debug)]
pub struct SubsetWitness {
    pub vector: Vec<BigRational>,
    pub denominator: BigInt,
    pub smallest_prime: u64,
    pub cofactor: BigInt,
}

/// Proof object of the square-free reduction: the reduced sublattice, the
/// per-subset witnesses it was generated from, and both brute-force
/// defects (always equal; verified, not assumed).
#[derive(Clone, Debug)]
pub struct ReductionCertificate {
    pub original: RationalLattice,
    pub reduced: RationalLattice,
    pub per_subset_witnesses: BTreeMap<IndexSet, SubsetWitness>,
    pub defect_original: usize,
    pub defect_reduced: usize,
}

impl ReductionCertificate {
    pub fn is_identity(&self) -> bool {
        self.per_subset_witnesses.is_empty()
    }
}

/// Compresses `gens` (rational vectors lying in `lattice`) to at most m
/// vectors generating the same sublattice together with Z^n: each
/// generator is expressed as a coefficient row against the scaled
/// generator matrix modulo q, the coefficient rows are HNF-reduced over Z,
/// and the surviving rows are mapped back.
pub fn lemma1_compress(
    lattice: &RationalLattice,
    gens: &[Vec<BigRational>],
) -> Result<Vec<Vec<BigRational>>> {
    let n = lattice.dim();
    let q = lattice.denominator().clone();
    let q_rat = BigRational::from_integer(q.clone());
    let mut coeff_rows = Vec::with_capacity(gens.len());
    for (index, g) in gens.iter().enumerate() {
        if g.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "generator {index} has length {}, expected {n}",
                g.len()
            )));
        }
        if !lattice.contains(g)? {
            return Err(Error::NotInLattice { index });
        }
        // q*g is integral for members; reduce it mod q and solve c*A = b.
        let b: Vec<BigInt> = g
            .iter()
            .map(|x| (x * &q_rat).to_integer().mod_floor(&q))
            .collect();
        let c = solve_mod(lattice.scaled_generators(), &b, &q)?.ok_or_else(|| {
            Error::Internal("members must be expressible against the generators".into())
        })?;
        coeff_rows.push(c);
    }
    if coeff_rows.is_empty() {
        return Ok(Vec::new());
    }
    let coeffs = IntMatrix::from_rows(coeff_rows)?;
    let (reduced, _) = hnf(&coeffs);
    let products = reduced.mul(lattice.scaled_generators())?;
    Ok((0..products.rows())
        .map(|r| {
            products
                .row(r)
                .iter()
                .map(|e| BigRational::new(e.clone(), q.clone()))
                .collect()
        })
        .collect())
}

pub fn squarefree_reduce(lattice: &RationalLattice) -> Result<ReductionCertificate> {
    squarefree_reduce_guarded(lattice, DEFAULT_DIM_GUARD)
}

/// Builds a sublattice Z^n ⊆ Λ' ⊆ Λ whose normalized denominator is
/// square-free and whose defect equals the defect of Λ. When the
/// denominator is already square-free the reduction is the identity.
/// The construction consumes the brute-force defect oracle, so it is
/// subject to the same dimension guard.
pub fn squarefree_reduce_guarded(
    lattice: &RationalLattice,
    max_dim: usize,
) -> Result<ReductionCertificate> {
    let lat = lattice.normalize();
    let n = lat.dim();
    let q = arith::big_to_u64(lat.denominator())?;
    let defect_original = lat.exact_defect_guarded(max_dim)?.defect;
    if arith::is_squarefree_u64(q)? {
        return Ok(ReductionCertificate {
            original: lattice.clone(),
            reduced: lattice.clone(),
            per_subset_witnesses: BTreeMap::new(),
            defect_original,
            defect_reduced: defect_original,
        });
    }
    if defect_original == 0 {
        return Err(Error::Internal(
            "zero defect forces denominator 1, which is square-free".into(),
        ));
    }
    let subset_size = n - defect_original + 1;
    let mut witnesses = BTreeMap::new();
    let mut gens = Vec::new();
    for subset in k_subsets(n, subset_size) {
        let section = lat.intersect_coordinate_subspace(&subset)?;
        let witness_row = section
            .canonical_basis()?
            .row_vecs()
            .into_iter()
            .filter(|row| !is_integer_vec(row))
            .min()
            .ok_or_else(|| {
                Error::Internal(format!(
                    "subset {subset} has no non-integer witness, contradicting defect {defect_original}"
                ))
            })?;
        // Embed the section coordinates back into n dimensions.
        let mut vector = vec![BigRational::zero(); n];
        for (value, position) in witness_row.into_iter().zip(subset.iter()) {
            vector[position - 1] = value;
        }
        let denominator = denominator_lcm(&vector);
        let smallest_prime = arith::smallest_prime_factor_u64(arith::big_to_u64(&denominator)?)?;
        let cofactor = &denominator / BigInt::from(smallest_prime);
        let stripped: Vec<BigRational> = vector
            .iter()
            .map(|x| x * BigRational::from_integer(cofactor.clone()))
            .collect();
        gens.push(stripped);
        witnesses.insert(
            subset,
            SubsetWitness {
                vector,
                denominator,
                smallest_prime,
                cofactor,
            },
        );
    }
    let compressed = lemma1_compress(&lat, &gens)?;
    for g in &compressed {
        if !lat.contains(g)? {
            return Err(Error::Internal(
                "compressed generator escaped the original lattice".into(),
            ));
        }
    }
    let reduced = RationalLattice::from_generators(n, &compressed)?.normalize();
    let reduced_q = arith::big_to_u64(reduced.denominator())?;
    if !arith::is_squarefree_u64(reduced_q)? {
        return Err(Error::Internal(format!(
            "reduction produced non-square-free denominator {reduced_q}"
        )));
    }
    let defect_reduced = reduced.exact_defect_guarded(max_dim)?.defect;
    if defect_reduced != defect_original {
        return Err(Error::Internal(format!(
            "reduction changed the defect: {defect_original} -> {defect_reduced}"
        )));
    }
    Ok(ReductionCertificate {
        original: lattice.clone(),
        reduced,
        per_subset_witnesses: witnesses,
        defect_original,
        defect_reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn lat(n: usize, q: i64, rows: &[&[i64]]) -> RationalLattice {
        RationalLattice::from_i64(n, q, rows)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn same_lattice(a: &RationalLattice, b: &RationalLattice) -> bool {
        a.canonical_basis().unwrap() == b.canonical_basis().unwrap()
    }

    #[test]
    fn compress_regenerates_the_lattice_from_its_own_generators() {
        for l in [
            lat(2, 4, &[&[1, 1], &[1, 3]]),
            lat(3, 6, &[&[1, 2, 3], &[0, 1, 5]]),
        ] {
            let out = lemma1_compress(&l, &l.generators()).unwrap();
            assert!(out.len() <= l.generator_count());
            let regen = RationalLattice::from_generators(l.dim(), &out).unwrap();
            assert!(same_lattice(&regen, &l));
        }
    }

    #[test]
    fn compress_of_integer_vectors_is_empty() {
        let l = lat(2, 4, &[&[1, 1], &[1, 3]]);
        let gens = vec![
            vec![rat(1, 1), rat(0, 1)],
            vec![rat(3, 1), rat(-2, 1)],
        ];
        assert!(lemma1_compress(&l, &gens).unwrap().is_empty());
    }

    #[test]
    fn compress_counterexample_witness_generators() {
        let l = lat(2, 4, &[&[1, 1], &[1, 3]]);
        let gens = vec![
            vec![rat(1, 2), rat(0, 1)],
            vec![rat(0, 1), rat(1, 2)],
            vec![rat(1, 2), rat(1, 2)],
        ];
        let out = lemma1_compress(&l, &gens).unwrap();
        assert_eq!(out.len(), 2);
        let regen = RationalLattice::from_generators(2, &out).unwrap();
        assert!(same_lattice(&regen, &lat(2, 2, &[&[1, 0], &[0, 1]])));
    }

    #[test]
    fn compress_rejects_outside_vectors() {
        let l = lat(2, 2, &[&[1, 1]]);
        let err = lemma1_compress(&l, &[vec![rat(1, 2), rat(0, 1)]]).unwrap_err();
        assert!(matches!(err, Error::NotInLattice { index: 0 }));
    }

    #[test]
    fn squarefree_input_reduces_to_itself() {
        let l = lat(2, 6, &[&[1, 1]]);
        let cert = squarefree_reduce(&l).unwrap();
        assert!(cert.is_identity());
        assert_eq!(cert.reduced, l);
        assert_eq!(cert.defect_original, cert.defect_reduced);
    }

    #[test]
    fn counterexample_reduces_to_half_grid() {
        let l = lat(2, 4, &[&[1, 1], &[1, 3]]);
        let cert = squarefree_reduce(&l).unwrap();
        assert_eq!(cert.defect_original, 2);
        assert_eq!(cert.defect_reduced, 2);
        assert!(same_lattice(&cert.reduced, &lat(2, 2, &[&[1, 0], &[0, 1]])));
        let w1 = &cert.per_subset_witnesses[&IndexSet::from_vec(vec![1])];
        assert_eq!(w1.vector, vec![rat(1, 2), rat(0, 1)]);
        assert_eq!(w1.denominator, BigInt::from(2));
        assert_eq!(w1.smallest_prime, 2);
        assert!(w1.cofactor.is_one());
        let w2 = &cert.per_subset_witnesses[&IndexSet::from_vec(vec![2])];
        assert_eq!(w2.vector, vec![rat(0, 1), rat(1, 2)]);
    }

    #[test]
    fn quarter_diagonal_reduces_to_half_diagonal() {
        let l = lat(2, 4, &[&[1, 1]]);
        let cert = squarefree_reduce(&l).unwrap();
        assert_eq!(cert.defect_original, 1);
        assert_eq!(cert.defect_reduced, 1);
        let w = &cert.per_subset_witnesses[&IndexSet::from_vec(vec![1, 2])];
        assert_eq!(w.vector, vec![rat(1, 4), rat(1, 4)]);
        assert_eq!(w.denominator, BigInt::from(4));
        assert_eq!(w.smallest_prime, 2);
        assert_eq!(w.cofactor, BigInt::from(2));
        assert!(same_lattice(&cert.reduced, &lat(2, 2, &[&[1, 1]])));
    }

    #[test]
    fn reduction_is_sandwiched_between_grid_and_original() {
        for l in [
            lat(2, 4, &[&[1, 1], &[1, 3]]),
            lat(2, 4, &[&[1, 1]]),
            lat(3, 12, &[&[1, 5, 7], &[2, 0, 3]]),
            lat(3, 9, &[&[1, 2, 4]]),
        ] {
            let cert = squarefree_reduce(&l).unwrap();
            for g in cert.reduced.generators() {
                assert!(l.contains(&g).unwrap());
            }
            assert_eq!(cert.defect_original, cert.defect_reduced);
            let q = arith::big_to_u64(cert.reduced.normalize().denominator()).unwrap();
            assert!(arith::is_squarefree_u64(q).unwrap());
        }
    }
}
