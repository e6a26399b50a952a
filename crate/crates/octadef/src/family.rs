//! Per-prime modular structure of a square-free centering.
//!
//! For q = p_1 ... p_s square-free, the scaled generator matrix has a rank
//! over each prime field, and the maximal independent column sets per prime
//! form the implicit set system that the covering construction works
//! against. The families are never materialized; they are served through
//! independence and extension queries. The factorial and size inequalities
//! that admissibility forces on the extension sets are checked here with
//! exact arithmetic only (logarithms through certified rational intervals).

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::admissibility::AdmissibilityReport;
use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{IndexSet, RationalLattice};
use crate::matrix::{rank_mod_p, reduce_mod_u64, ModPEchelon};

/// Primes of the square-free denominator in descending order, with the
/// rank of the scaled generator matrix over each prime field.
#[derive(Clone, Debug)]
pub struct FamilySystem {
    lattice: RationalLattice,
    primes: Vec<u64>,
    ranks: Vec<usize>,
}

/// Outcome of the extension-set size check for one prime and one
/// independent column set of size l < rank.
#[derive(Clone, Debug)]
pub struct Lemma4Outcome {
    pub prime: u64,
    pub fixed_size: usize,
    pub extension: IndexSet,
    pub prime_power: BigInt,
    /// |extension|! >= p^(rank - l), checked for every prime.
    pub factorial_ok: bool,
    /// The logarithmic size bound applies only for primes >= 5.
    pub log_applicable: bool,
    pub log_ok: Option<bool>,
    pub holds: bool,
}

pub fn build_family_system(lattice: &RationalLattice) -> Result<FamilySystem> {
    let lat = lattice.normalize();
    let primes = lat.squarefree_primes()?;
    let mut ranks = Vec::with_capacity(primes.len());
    for &p in &primes {
        let r = rank_mod_p(lat.scaled_generators(), p)?;
        if r == 0 {
            return Err(Error::Internal(format!(
                "prime {p} divides every scaled generator of a normalized lattice"
            )));
        }
        ranks.push(r);
    }
    Ok(FamilySystem {
        lattice: lat,
        primes,
        ranks,
    })
}

impl FamilySystem {
    pub fn lattice(&self) -> &RationalLattice {
        &self.lattice
    }

    /// Number of primes s.
    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn prime(&self, j: usize) -> u64 {
        self.primes[j]
    }

    pub fn rank(&self, j: usize) -> usize {
        self.ranks[j]
    }

    fn column_mod_p(&self, col: usize, p: u64) -> Vec<u64> {
        let a = self.lattice.scaled_generators();
        (0..a.rows()).map(|r| reduce_mod_u64(a.at(r, col), p)).collect()
    }

    /// Echelon of the columns in `cols` (1-based), erroring when they are
    /// dependent mod the j-th prime.
    fn echelon_of(&self, j: usize, cols: &IndexSet) -> Result<ModPEchelon> {
        let p = self.primes[j];
        let mut ech = ModPEchelon::new(p);
        for c in cols.iter() {
            if c == 0 || c > self.lattice.dim() {
                return Err(Error::Precondition(format!(
                    "column index {c} outside 1..={}",
                    self.lattice.dim()
                )));
            }
            if !ech.insert(self.column_mod_p(c - 1, p)) {
                return Err(Error::DependentColumns { p });
            }
        }
        Ok(ech)
    }

    /// Greedy extension of an independent seed to a maximal independent
    /// column set mod the j-th prime, scanning column indices ascending.
    pub fn max_independent_set(&self, j: usize, seed: &IndexSet) -> Result<IndexSet> {
        let mut ech = self.echelon_of(j, seed)?;
        let mut out = seed.clone();
        let target = self.ranks[j];
        for c in 1..=self.lattice.dim() {
            if out.len() == target {
                break;
            }
            if out.contains(c) {
                continue;
            }
            if ech.insert(self.column_mod_p(c - 1, self.primes[j])) {
                out.insert(c);
            }
        }
        if out.len() != target {
            return Err(Error::Internal(format!(
                "greedy column scan reached size {} instead of rank {target}",
                out.len()
            )));
        }
        Ok(out)
    }

    /// Indices of columns that stay independent when appended to `fixed`
    /// (equivalently, columns outside the mod-p span of the fixed ones);
    /// empty exactly when `fixed` is already maximal.
    pub fn extension_set(&self, j: usize, fixed: &IndexSet) -> Result<IndexSet> {
        let ech = self.echelon_of(j, fixed)?;
        let p = self.primes[j];
        Ok((1..=self.lattice.dim())
            .filter(|&c| ech.is_independent(&self.column_mod_p(c - 1, p)))
            .collect())
    }

    /// Checks the extension-set size inequalities forced by admissibility:
    /// the factorial form for every prime, and the logarithmic form for
    /// primes >= 5 (decided through exact interval bounds, never floats).
    pub fn lemma4_check(
        &self,
        j: usize,
        fixed: &IndexSet,
        admissibility: &AdmissibilityReport,
    ) -> Result<Lemma4Outcome> {
        if !admissibility.admissible {
            return Err(Error::NotAdmissible);
        }
        let rank = self.ranks[j];
        let l = fixed.len();
        if l >= rank {
            return Err(Error::Precondition(format!(
                "fixed set size {l} must be strictly below rank {rank}"
            )));
        }
        let p = self.primes[j];
        let extension = self.extension_set(j, fixed)?;
        let size = extension.len();
        let prime_power = BigInt::from(p).pow((rank - l) as u32);
        let factorial_ok = arith::factorial(size) >= prime_power;
        let log_applicable = p >= 5;
        let log_ok = if log_applicable {
            Some(arith::geq_half_log_ratio(
                &BigRational::from_integer(BigInt::from(size)),
                &BigRational::from_integer(prime_power.clone()),
            )?)
        } else {
            None
        };
        Ok(Lemma4Outcome {
            prime: p,
            fixed_size: l,
            extension,
            prime_power,
            factorial_ok,
            log_applicable,
            log_ok,
            holds: factorial_ok && log_ok.unwrap_or(true),
        })
    }

    /// Admissibility forces at most n primes and a denominator of at most
    /// n! — checked exactly.
    pub fn lemma5_check(&self, admissibility: &AdmissibilityReport) -> Result<bool> {
        if !admissibility.admissible {
            return Err(Error::NotAdmissible);
        }
        let n = self.lattice.dim();
        Ok(self.prime_count() <= n && *self.lattice.denominator() <= arith::factorial(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::is_admissible;

    fn lat(n: usize, q: i64, rows: &[&[i64]]) -> RationalLattice {
        RationalLattice::from_i64(n, q, rows)
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_vec(v.to_vec())
    }

    #[test]
    fn system_of_six_diagonal() {
        let f = build_family_system(&lat(2, 6, &[&[1, 1]])).unwrap();
        assert_eq!(f.primes(), &[3, 2]);
        assert_eq!(f.ranks(), &[1, 1]);
    }

    #[test]
    fn system_of_congruent_rows() {
        let f = build_family_system(&lat(2, 2, &[&[1, 1], &[1, 3]])).unwrap();
        assert_eq!(f.primes(), &[2]);
        assert_eq!(f.ranks(), &[1]);
    }

    #[test]
    fn system_of_standard_lattice_is_empty() {
        let f = build_family_system(&RationalLattice::standard(4)).unwrap();
        assert_eq!(f.prime_count(), 0);
    }

    #[test]
    fn system_rejects_square_denominator() {
        let err = build_family_system(&lat(2, 4, &[&[1, 1], &[1, 3]])).unwrap_err();
        assert!(matches!(err, Error::NotSquareFree { .. }));
    }

    #[test]
    fn greedy_max_independent_sets() {
        let f = build_family_system(&lat(2, 2, &[&[1, 1], &[1, 3]])).unwrap();
        assert_eq!(f.max_independent_set(0, &IndexSet::new()).unwrap(), set(&[1]));

        let f = build_family_system(&lat(2, 5, &[&[1, 2], &[3, 4]])).unwrap();
        assert_eq!(
            f.max_independent_set(0, &IndexSet::new()).unwrap(),
            set(&[1, 2])
        );
        // A maximal seed comes back unchanged.
        assert_eq!(f.max_independent_set(0, &set(&[1, 2])).unwrap(), set(&[1, 2]));
    }

    #[test]
    fn dependent_seed_is_rejected() {
        let f = build_family_system(&lat(2, 2, &[&[1, 1], &[1, 3]])).unwrap();
        let err = f.max_independent_set(0, &set(&[1, 2])).unwrap_err();
        assert!(matches!(err, Error::DependentColumns { p: 2 }));
    }

    #[test]
    fn extension_sets() {
        let f = build_family_system(&lat(2, 2, &[&[1, 1], &[1, 3]])).unwrap();
        assert_eq!(f.extension_set(0, &IndexSet::new()).unwrap(), set(&[1, 2]));
        // Column 2 is congruent to column 1 mod 2, and rank is 1.
        assert_eq!(f.extension_set(0, &set(&[1])).unwrap(), IndexSet::new());

        let f = build_family_system(&lat(2, 5, &[&[1, 2], &[3, 4]])).unwrap();
        assert_eq!(f.extension_set(0, &set(&[1, 2])).unwrap(), IndexSet::new());
    }

    #[test]
    fn extension_exchange_property() {
        let f = build_family_system(&lat(3, 6, &[&[1, 2, 3], &[0, 1, 5]])).unwrap();
        for j in 0..f.prime_count() {
            let base = f.extension_set(j, &IndexSet::new()).unwrap();
            for c in base.iter() {
                let mut grown = IndexSet::new();
                grown.insert(c);
                let after = f.extension_set(j, &grown).unwrap();
                let allowed = base.union(&grown);
                assert!(after.is_subset(&allowed));
                assert!(after != allowed, "the chosen column must leave the span");
            }
        }
    }

    #[test]
    fn lemma4_on_admissible_five_cycle() {
        let l = lat(5, 5, &[&[1, 1, 1, 1, 1]]);
        let report = is_admissible(&l, false).unwrap();
        assert!(report.admissible);
        let f = build_family_system(&l).unwrap();
        let out = f.lemma4_check(0, &IndexSet::new(), &report).unwrap();
        assert_eq!(out.extension, IndexSet::full(5));
        assert_eq!(out.prime_power, BigInt::from(5));
        assert!(out.factorial_ok);
        assert!(out.log_applicable);
        assert_eq!(out.log_ok, Some(true));
        assert!(out.holds);
    }

    #[test]
    fn lemma4_demands_admissibility() {
        let l = lat(2, 3, &[&[1, 1]]); // min norm 2/3 < 1
        let report = is_admissible(&l, false).unwrap();
        let f = build_family_system(&l).unwrap();
        let err = f.lemma4_check(0, &IndexSet::new(), &report).unwrap_err();
        assert!(matches!(err, Error::NotAdmissible));
    }

    #[test]
    fn lemma4_demands_room_below_rank() {
        let l = lat(2, 2, &[&[1, 1]]);
        let report = is_admissible(&l, false).unwrap();
        let f = build_family_system(&l).unwrap();
        let maximal = f.max_independent_set(0, &IndexSet::new()).unwrap();
        let err = f.lemma4_check(0, &maximal, &report).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn lemma5_examples() {
        for (l, _) in [
            (RationalLattice::standard(3), 0usize),
            (lat(2, 2, &[&[1, 1]]), 1),
            (lat(5, 5, &[&[1, 1, 1, 1, 1]]), 1),
        ] {
            let report = is_admissible(&l, false).unwrap();
            let f = build_family_system(&l).unwrap();
            assert!(f.lemma5_check(&report).unwrap());
        }
    }

    #[test]
    fn lemma5_rejects_inadmissible_input() {
        let l = lat(2, 3, &[&[1, 1]]);
        let report = is_admissible(&l, false).unwrap();
        let f = build_family_system(&l).unwrap();
        assert!(matches!(
            f.lemma5_check(&report).unwrap_err(),
            Error::NotAdmissible
        ));
    }
}
