//! Rational centerings of the integer lattice.
//!
//! A lattice Λ with `Z^n ⊆ Λ ⊆ Q^n` is stored as a positive common
//! denominator q and an m x n integer matrix whose row i is q times the
//! i-th rational generator. The module provides normalization to the least
//! common denominator, canonical (Hermite-shaped) bases, determinants,
//! membership, coset enumeration of the finite quotient Λ / Z^n,
//! intersections with coordinate subspaces, frame-completability tests, and
//! the brute-force exact defect oracle used to validate every certified
//! bound in the crate.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::matrix::{denominator_lcm, hnf, rank_mod_p, IntMatrix, RatMatrix};

/// Default cap on the order of an enumerated coset group.
pub const DEFAULT_COSET_GUARD: u64 = 1 << 20;
/// Default cap on the dimension accepted by the brute-force defect search.
pub const DEFAULT_DIM_GUARD: usize = 12;

/// Sorted set of distinct 1-based coordinate indices.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(BTreeSet<usize>);

impl IndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vec(v: Vec<usize>) -> Self {
        Self(v.into_iter().collect())
    }

    pub fn full(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn insert(&mut self, i: usize) -> bool {
        self.0.insert(i)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        Self(self.0.union(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn complement_in(&self, n: usize) -> IndexSet {
        Self((1..=n).filter(|i| !self.0.contains(i)).collect())
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(", "))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All k-element subsets of {1..n} in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> impl Iterator<Item = IndexSet> {
    (1..=n).combinations(k).map(IndexSet::from_vec)
}

/// One coset of Z^n inside Λ: coordinate numerators over the normalized
/// denominator, each reduced into [0, q). The all-zero vector is the
/// identity coset.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct CosetElement {
    pub numerators: Vec<BigInt>,
}

impl CosetElement {
    pub fn is_identity(&self) -> bool {
        self.numerators.iter().all(|x| x.is_zero())
    }

    /// Minimal L1 norm over all representatives of the coset: each
    /// coordinate contributes min(r, q - r) / q independently.
    pub fn min_norm(&self, q: &BigInt) -> BigRational {
        self.numerators
            .iter()
            .map(|r| {
                let alt = q - r;
                let best = if r <= &alt { r.clone() } else { alt };
                BigRational::new(best, q.clone())
            })
            .sum()
    }

    /// A representative attaining the minimal L1 norm (coordinates r/q or
    /// r/q - 1, whichever is smaller in absolute value; ties keep r/q).
    pub fn min_norm_representative(&self, q: &BigInt) -> Vec<BigRational> {
        self.numerators
            .iter()
            .map(|r| {
                let alt = q - r;
                if r <= &alt {
                    BigRational::new(r.clone(), q.clone())
                } else {
                    BigRational::new(r - q, q.clone())
                }
            })
            .collect()
    }
}

impl fmt::Display for CosetElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.numerators.iter().join(", "))
    }
}

/// Result of the exact defect search: the minimal defect, the kept frame
/// indices, and a basis of Λ containing the kept standard vectors.
#[derive(Clone, Debug)]
pub struct DefectResult {
    pub defect: usize,
    pub keep: IndexSet,
    pub basis: RatMatrix,
}

/// A centering Λ = <Z^n, a_1..a_m> with a_i in Q^n, stored as the common
/// denominator q and the integer matrix of rows q * a_i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalLattice {
    n: usize,
    q: BigInt,
    gens: IntMatrix,
}

impl RationalLattice {
    /// Builds a lattice from scaled generator rows. An empty generator list
    /// is stored as a single zero row (the lattice is then Z^n).
    pub fn new(n: usize, q: impl Into<BigInt>, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let q = q.into();
        if !q.is_positive() {
            return Err(Error::Parse(format!("denominator {q} must be positive")));
        }
        let rows = if rows.is_empty() {
            vec![vec![BigInt::zero(); n]]
        } else {
            rows
        };
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "generator rows must have length {n}"
            )));
        }
        Ok(Self {
            n,
            q,
            gens: IntMatrix::from_rows(rows)?,
        })
    }

    pub fn from_i64(n: usize, q: i64, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(n, q, rows).expect("consistent literal lattice")
    }

    /// The integer lattice Z^n itself.
    pub fn standard(n: usize) -> Self {
        Self::new(n, 1, Vec::new()).expect("standard lattice")
    }

    /// Builds <Z^n, gens> from rational generators, clearing denominators.
    pub fn from_generators(n: usize, gens: &[Vec<BigRational>]) -> Result<Self> {
        if gens.is_empty() {
            return Ok(Self::standard(n));
        }
        if gens.iter().any(|g| g.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "generators must have length {n}"
            )));
        }
        let q = gens
            .iter()
            .fold(BigInt::one(), |acc, g| acc.lcm(&denominator_lcm(g)));
        let rows = gens
            .iter()
            .map(|g| {
                g.iter()
                    .map(|x| {
                        let scaled = x * BigRational::from_integer(q.clone());
                        debug_assert!(scaled.is_integer());
                        scaled.to_integer()
                    })
                    .collect()
            })
            .collect();
        Self::new(n, q, rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generator_count(&self) -> usize {
        self.gens.rows()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.q
    }

    /// The m x n integer matrix whose row i is q * a_i.
    pub fn scaled_generators(&self) -> &IntMatrix {
        &self.gens
    }

    /// Row i divided by q.
    pub fn generator(&self, i: usize) -> Vec<BigRational> {
        self.gens
            .row(i)
            .iter()
            .map(|e| BigRational::new(e.clone(), self.q.clone()))
            .collect()
    }

    pub fn generators(&self) -> Vec<Vec<BigRational>> {
        (0..self.generator_count()).map(|i| self.generator(i)).collect()
    }

    /// Divides out every prime of q that divides all scaled generators,
    /// leaving the least possible common denominator. The generated lattice
    /// is unchanged.
    pub fn normalize(&self) -> RationalLattice {
        let mut q = self.q.clone();
        let mut rows = self.gens.row_vecs();
        loop {
            let mut g = q.clone();
            'gcd: for row in &rows {
                for e in row {
                    g = g.gcd(e);
                    if g.is_one() {
                        break 'gcd;
                    }
                }
            }
            if g.is_one() {
                break;
            }
            q /= &g;
            for row in &mut rows {
                for e in row.iter_mut() {
                    *e /= &g;
                }
            }
        }
        RationalLattice {
            n: self.n,
            q,
            gens: IntMatrix::from_rows(rows).expect("same shape"),
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.normalize().q == self.q
    }

    /// Distinct primes of the (normalized) denominator in descending order;
    /// errors when the denominator is not square-free.
    pub fn squarefree_primes(&self) -> Result<Vec<u64>> {
        let lat = self.normalize();
        let q = arith::big_to_u64(&lat.q)?;
        let factors = arith::factor_u64(q)?;
        if factors.iter().any(|&(_, e)| e > 1) {
            return Err(Error::NotSquareFree { q: lat.q });
        }
        Ok(factors.into_iter().rev().map(|(p, _)| p).collect())
    }

    /// The integer HNF of the stacked rows {q * I; scaled generators}: an
    /// n x n triangular matrix whose rows divided by q form a basis of Λ.
    fn scaled_basis(&self) -> Result<IntMatrix> {
        if self.n == 0 {
            return IntMatrix::new(0, 0, Vec::new());
        }
        let mut qi = IntMatrix::zero(self.n, self.n);
        for i in 0..self.n {
            qi.set(i, i, self.q.clone());
        }
        let stacked = qi.vstack(&self.gens)?;
        let (h, _) = hnf(&stacked);
        if h.rows() != self.n {
            return Err(Error::Internal(format!(
                "basis of a full-rank centering must have {} rows, got {}",
                self.n,
                h.rows()
            )));
        }
        Ok(h)
    }

    /// Basis of Λ in Hermite shape (triangular, positive diagonal).
    pub fn canonical_basis(&self) -> Result<RatMatrix> {
        let h = self.scaled_basis()?;
        RatMatrix::from_rows(
            (0..h.rows())
                .map(|r| {
                    h.row(r)
                        .iter()
                        .map(|e| BigRational::new(e.clone(), self.q.clone()))
                        .collect()
                })
                .collect(),
        )
    }

    /// det Λ = product of the canonical basis diagonal; lies in (0, 1] and
    /// equals 1 exactly for Z^n.
    pub fn det(&self) -> Result<BigRational> {
        let h = self.scaled_basis()?;
        let mut det = BigRational::one();
        for i in 0..h.rows() {
            det *= BigRational::new(h.at(i, i).clone(), self.q.clone());
        }
        Ok(det)
    }

    /// Order of the quotient Λ / Z^n, i.e. 1 / det Λ.
    pub fn group_order(&self) -> Result<BigInt> {
        let det = self.det()?;
        if !det.numer().is_one() {
            return Err(Error::Internal(format!(
                "determinant {det} of a centering must be a unit fraction"
            )));
        }
        Ok(det.denom().clone())
    }

    /// Exact membership test against the canonical basis.
    pub fn contains(&self, x: &[BigRational]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in dimension {}",
                x.len(),
                self.n
            )));
        }
        let q = BigRational::from_integer(self.q.clone());
        let mut v = Vec::with_capacity(self.n);
        for xi in x {
            let s = xi * &q;
            if !s.is_integer() {
                return Ok(false);
            }
            v.push(s.to_integer());
        }
        let h = self.scaled_basis()?;
        for r in 0..h.rows() {
            if v[r].is_zero() {
                continue;
            }
            let (quot, rem) = v[r].div_rem(h.at(r, r));
            if !rem.is_zero() {
                return Ok(false);
            }
            for c in r..self.n {
                let nv = &v[c] - &quot * h.at(r, c);
                v[c] = nv;
            }
        }
        Ok(v.iter().all(|e| e.is_zero()))
    }

    pub fn coset_group(&self) -> Result<Vec<CosetElement>> {
        self.coset_group_guarded(DEFAULT_COSET_GUARD)
    }

    /// Enumerates Λ / Z^n as numerator vectors over the normalized
    /// denominator, sorted ascending (identity first). The order is checked
    /// against the guard before any enumeration happens.
    pub fn coset_group_guarded(&self, guard: u64) -> Result<Vec<CosetElement>> {
        let lat = self.normalize();
        let order = lat.group_order()?;
        if order > BigInt::from(guard) {
            return Err(Error::GuardExceeded {
                what: "coset enumeration",
                needed: order.to_string(),
                limit: guard.to_string(),
            });
        }
        let gens: Vec<Vec<BigInt>> = (0..lat.generator_count())
            .map(|i| {
                lat.gens
                    .row(i)
                    .iter()
                    .map(|e| e.mod_floor(&lat.q))
                    .collect()
            })
            .collect();
        let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        let zero = vec![BigInt::zero(); lat.n];
        let mut queue = vec![zero.clone()];
        seen.insert(zero);
        while let Some(cur) = queue.pop() {
            for g in &gens {
                let next: Vec<BigInt> = cur
                    .iter()
                    .zip(g)
                    .map(|(a, b)| (a + b).mod_floor(&lat.q))
                    .collect();
                if seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        if BigInt::from(seen.len()) != order {
            return Err(Error::Internal(format!(
                "coset closure found {} elements, expected {order}",
                seen.len()
            )));
        }
        Ok(seen
            .into_iter()
            .map(|numerators| CosetElement { numerators })
            .collect())
    }

    /// The lattice Λ ∩ span{e_i : i ∈ s}, expressed in the |s| retained
    /// coordinates and normalized. Contains Z^{|s|}.
    pub fn intersect_coordinate_subspace(&self, s: &IndexSet) -> Result<RationalLattice> {
        if s.iter().any(|i| i == 0 || i > self.n) {
            return Err(Error::Precondition(format!(
                "index set {s} not contained in {{1..{}}}",
                self.n
            )));
        }
        let keep_cols: Vec<usize> = s.iter().map(|i| i - 1).collect();
        if keep_cols.is_empty() {
            return Ok(RationalLattice::standard(0));
        }
        let drop_cols: Vec<usize> = (0..self.n).filter(|c| !keep_cols.contains(c)).collect();
        let h = self.scaled_basis()?;
        if drop_cols.is_empty() {
            // Whole space: the intersection is Λ itself.
            return Ok(RationalLattice {
                n: self.n,
                q: self.q.clone(),
                gens: h.clone(),
            }
            .normalize());
        }
        // Integer kernel of  y -> y * H_restricted  gives the coefficient
        // rows of basis vectors supported on the kept coordinates.
        let restricted = IntMatrix::from_rows(
            (0..h.rows())
                .map(|r| drop_cols.iter().map(|&c| h.at(r, c).clone()).collect())
                .collect(),
        )?;
        let (hr, u) = hnf(&restricted);
        let rank = hr.rows();
        let mut rows = Vec::new();
        for k in rank..u.rows() {
            let coeff = IntMatrix::new(1, u.cols(), u.row(k).to_vec())?;
            let vec = coeff.mul(&h)?;
            debug_assert!(drop_cols.iter().all(|&c| vec.at(0, c).is_zero()));
            rows.push(keep_cols.iter().map(|&c| vec.at(0, c).clone()).collect());
        }
        RationalLattice::new(keep_cols.len(), self.q.clone(), rows).map(|l| l.normalize())
    }

    /// True iff {e_i : i ∈ keep} extends to a basis of Λ: the criterion is
    /// that Λ meets the spanned coordinate subspace exactly in Z^{|keep|}.
    pub fn completable(&self, keep: &IndexSet) -> Result<bool> {
        if keep.is_empty() {
            return Ok(true);
        }
        let section = self.intersect_coordinate_subspace(keep)?;
        Ok(section.det()?.is_one())
    }

    /// Completes the kept frame vectors to a full basis of Λ, or returns
    /// None when they are not completable. The returned matrix lists the
    /// non-frame completion vectors first and the kept frame vectors last.
    pub fn complete_frame_basis(&self, keep: &IndexSet) -> Result<Option<RatMatrix>> {
        if keep.iter().any(|i| i == 0 || i > self.n) {
            return Err(Error::Precondition(format!(
                "index set {keep} not contained in {{1..{}}}",
                self.n
            )));
        }
        let kept: Vec<usize> = keep.iter().map(|i| i - 1).collect();
        let dropped: Vec<usize> = (0..self.n).filter(|c| !kept.contains(c)).collect();
        let d = dropped.len();
        let perm: Vec<usize> = dropped.iter().chain(kept.iter()).copied().collect();
        let mut qi = IntMatrix::zero(self.n, self.n);
        for i in 0..self.n {
            qi.set(i, i, self.q.clone());
        }
        let stacked = qi.vstack(&self.gens)?.with_columns(&perm);
        let (h, _) = hnf(&stacked);
        if h.rows() != self.n {
            return Err(Error::Internal("full-rank stack lost rank".into()));
        }
        // The trailing block is the HNF basis of q * (Λ ∩ span(keep)); the
        // kept frame extends to a basis exactly when that block is q * I.
        let zero = BigInt::zero();
        for i in d..self.n {
            for j in 0..self.n {
                let expect = if i == j { &self.q } else { &zero };
                if h.at(i, j) != expect {
                    return Ok(None);
                }
            }
        }
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..d {
            let mut row = vec![BigRational::zero(); self.n];
            for (j, &col) in perm.iter().enumerate() {
                row[col] = BigRational::new(h.at(i, j).clone(), self.q.clone());
            }
            rows.push(row);
        }
        for &col in &kept {
            let mut row = vec![BigRational::zero(); self.n];
            row[col] = BigRational::one();
            rows.push(row);
        }
        let basis = RatMatrix::from_rows(rows)?;
        for r in 0..d {
            if !self.contains(basis.row(r))? {
                return Err(Error::Internal(
                    "completion produced a non-member row".into(),
                ));
            }
        }
        if basis.det()?.abs() != self.det()? {
            return Err(Error::Internal(
                "completed basis has the wrong determinant".into(),
            ));
        }
        Ok(Some(basis))
    }

    pub fn exact_defect(&self) -> Result<DefectResult> {
        self.exact_defect_guarded(DEFAULT_DIM_GUARD)
    }

    /// Brute-force minimal defect: scans kept-frame subsets by size
    /// descending from n, lexicographically within a size; the first
    /// completable subset wins and is completed into a certificate basis.
    pub fn exact_defect_guarded(&self, max_dim: usize) -> Result<DefectResult> {
        if self.n > max_dim {
            return Err(Error::GuardExceeded {
                what: "brute-force defect",
                needed: self.n.to_string(),
                limit: max_dim.to_string(),
            });
        }
        for size in (0..=self.n).rev() {
            for keep in k_subsets(self.n, size) {
                if self.completable(&keep)? {
                    let basis = self.complete_frame_basis(&keep)?.ok_or_else(|| {
                        Error::Internal("completable subset failed completion".into())
                    })?;
                    return Ok(DefectResult {
                        defect: self.n - size,
                        keep,
                        basis,
                    });
                }
            }
        }
        Err(Error::Internal(
            "the empty frame subset is always completable".into(),
        ))
    }

    /// Exact check of the determinant formula det Λ = Π p_j^(-rank_j) over
    /// the primes of the square-free denominator.
    pub fn check_det_formula(&self) -> Result<bool> {
        let lat = self.normalize();
        let primes = lat.squarefree_primes()?;
        let mut product = BigInt::one();
        for &p in &primes {
            let r = rank_mod_p(&lat.gens, p)?;
            product *= BigInt::from(p).pow(r as u32);
        }
        Ok(lat.det()? * BigRational::from_integer(product) == BigRational::one())
    }
}

impl fmt::Display for RationalLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} m={} q={}", self.n, self.generator_count(), self.q)?;
        write!(f, "{}", self.gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: usize, q: i64, rows: &[&[i64]]) -> RationalLattice {
        RationalLattice::from_i64(n, q, rows)
    }

    fn counterexample_lattice() -> RationalLattice {
        lat(2, 4, &[&[1, 1], &[1, 3]])
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn normalize_divides_out_common_factor() {
        let l = lat(2, 4, &[&[2, 2]]).normalize();
        assert_eq!(l, lat(2, 2, &[&[1, 1]]));
    }

    #[test]
    fn normalize_is_identity_on_minimal() {
        let l = lat(2, 2, &[&[1, 1]]);
        assert_eq!(l.normalize(), l);
        assert!(l.is_normalized());
    }

    #[test]
    fn normalize_handles_nontrivial_gcd() {
        let a = lat(2, 12, &[&[6, 6]]);
        let b = a.normalize();
        assert_eq!(b, lat(2, 2, &[&[1, 1]]));
        // Same coset group: generators of each lie in the other.
        for g in a.generators() {
            assert!(b.contains(&g).unwrap());
        }
        for g in b.generators() {
            assert!(a.contains(&g).unwrap());
        }
    }

    #[test]
    fn normalize_degenerate_zero_rows() {
        let l = lat(3, 6, &[&[0, 0, 0]]).normalize();
        assert_eq!(l, RationalLattice::standard(3));
    }

    #[test]
    fn canonical_basis_of_standard_lattice() {
        let l = lat(2, 1, &[&[1, 0]]);
        assert_eq!(l.canonical_basis().unwrap(), RatMatrix::identity(2));
    }

    #[test]
    fn canonical_basis_of_half_diagonal() {
        let b = lat(2, 2, &[&[1, 1]]).canonical_basis().unwrap();
        let expect = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(0, 1), rat(1, 1)],
        ])
        .unwrap();
        assert_eq!(b, expect);
    }

    #[test]
    fn canonical_basis_of_counterexample() {
        let b = counterexample_lattice().canonical_basis().unwrap();
        let expect = RatMatrix::from_rows(vec![
            vec![rat(1, 4), rat(1, 4)],
            vec![rat(0, 1), rat(1, 2)],
        ])
        .unwrap();
        assert_eq!(b, expect);
    }

    #[test]
    fn determinants() {
        assert!(RationalLattice::standard(4).det().unwrap().is_one());
        assert_eq!(lat(2, 2, &[&[1, 1]]).det().unwrap(), rat(1, 2));
        assert_eq!(counterexample_lattice().det().unwrap(), rat(1, 8));
    }

    #[test]
    fn membership() {
        let l = lat(2, 2, &[&[1, 1]]);
        assert!(l.contains(&[rat(5, 1), rat(-3, 1)]).unwrap());
        assert!(l.contains(&[rat(1, 2), rat(1, 2)]).unwrap());
        assert!(!l.contains(&[rat(1, 2), rat(0, 1)]).unwrap());
        assert!(!l.contains(&[rat(1, 3), rat(1, 3)]).unwrap());
    }

    #[test]
    fn coset_group_standard() {
        let g = RationalLattice::standard(3).coset_group().unwrap();
        assert_eq!(g.len(), 1);
        assert!(g[0].is_identity());
    }

    #[test]
    fn coset_group_half_diagonal() {
        let g = lat(2, 2, &[&[1, 1]]).coset_group().unwrap();
        let shapes: Vec<Vec<i64>> = g
            .iter()
            .map(|c| c.numerators.iter().map(|x| x.to_string().parse().unwrap()).collect())
            .collect();
        assert_eq!(shapes, vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn coset_group_counterexample_has_eight_cosets() {
        let g = counterexample_lattice().coset_group().unwrap();
        assert_eq!(g.len(), 8);
    }

    #[test]
    fn coset_guard_is_checked_before_enumeration() {
        let err = counterexample_lattice().coset_group_guarded(4).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }));
    }

    #[test]
    fn det_equals_reciprocal_group_order() {
        for l in [
            RationalLattice::standard(2),
            lat(2, 2, &[&[1, 1]]),
            counterexample_lattice(),
            lat(3, 6, &[&[1, 2, 3], &[0, 1, 5]]),
        ] {
            let order = BigInt::from(l.coset_group().unwrap().len());
            assert_eq!(
                l.det().unwrap() * BigRational::from_integer(order),
                BigRational::one()
            );
        }
    }

    #[test]
    fn intersection_of_standard_is_standard() {
        let l = RationalLattice::standard(4);
        let s = IndexSet::from_vec(vec![2, 4]);
        let section = l.intersect_coordinate_subspace(&s).unwrap();
        assert_eq!(section.normalize(), RationalLattice::standard(2));
    }

    #[test]
    fn intersection_of_counterexample_first_axis() {
        let s = IndexSet::from_vec(vec![1]);
        let section = counterexample_lattice()
            .intersect_coordinate_subspace(&s)
            .unwrap();
        assert_eq!(section, lat(1, 2, &[&[1]]));
    }

    #[test]
    fn intersection_of_half_diagonal_first_axis() {
        let s = IndexSet::from_vec(vec![1]);
        let section = lat(2, 2, &[&[1, 1]])
            .intersect_coordinate_subspace(&s)
            .unwrap();
        assert_eq!(section, RationalLattice::standard(1));
    }

    #[test]
    fn completability() {
        let l = lat(2, 2, &[&[1, 1]]);
        assert!(l.completable(&IndexSet::new()).unwrap());
        assert!(l.completable(&IndexSet::from_vec(vec![1])).unwrap());
        let c = counterexample_lattice();
        assert!(!c.completable(&IndexSet::from_vec(vec![1])).unwrap());
        assert!(!c.completable(&IndexSet::from_vec(vec![2])).unwrap());
    }

    #[test]
    fn completability_is_monotone_under_subsets() {
        let lattices = [
            lat(3, 2, &[&[1, 1, 0]]),
            lat(3, 6, &[&[1, 2, 3]]),
            counterexample_lattice(),
            lat(4, 2, &[&[1, 1, 1, 1], &[0, 1, 0, 1]]),
        ];
        for l in &lattices {
            let n = l.dim();
            for size in 0..=n {
                for keep in k_subsets(n, size) {
                    if l.completable(&keep).unwrap() {
                        for sub_size in 0..size {
                            for sub in k_subsets(n, sub_size) {
                                if sub.is_subset(&keep) {
                                    assert!(l.completable(&sub).unwrap());
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exact_defect_of_standard_lattice() {
        let r = RationalLattice::standard(3).exact_defect().unwrap();
        assert_eq!(r.defect, 0);
        assert_eq!(r.keep, IndexSet::full(3));
        assert_eq!(r.basis, RatMatrix::identity(3));
    }

    #[test]
    fn exact_defect_of_half_diagonal() {
        let l = lat(2, 2, &[&[1, 1]]);
        let r = l.exact_defect().unwrap();
        assert_eq!(r.defect, 1);
        assert_eq!(r.keep, IndexSet::from_vec(vec![1]));
        assert_eq!(r.basis.det().unwrap().abs(), rat(1, 2));
        // Basis rows: the completion vector plus e_1.
        assert!(l.contains(r.basis.row(0)).unwrap());
        assert_eq!(r.basis.row(1), &[rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn exact_defect_of_counterexample() {
        let r = counterexample_lattice().exact_defect().unwrap();
        assert_eq!(r.defect, 2);
        assert!(r.keep.is_empty());
        assert_eq!(r.basis.det().unwrap().abs(), rat(1, 8));
    }

    #[test]
    fn exact_defect_consistency_no_larger_subset_completes() {
        for l in [
            lat(2, 2, &[&[1, 1]]),
            counterexample_lattice(),
            lat(3, 4, &[&[1, 1, 0], &[1, 3, 0]]),
            lat(4, 6, &[&[1, 1, 2, 3]]),
        ] {
            let r = l.exact_defect().unwrap();
            assert!(l.completable(&r.keep).unwrap());
            let larger = l.dim() - r.defect + 1;
            if larger <= l.dim() {
                for keep in k_subsets(l.dim(), larger) {
                    assert!(!l.completable(&keep).unwrap());
                }
            }
        }
    }

    #[test]
    fn exact_defect_guard() {
        let err = RationalLattice::standard(13).exact_defect().unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }));
    }

    #[test]
    fn det_formula_examples() {
        assert!(RationalLattice::standard(5).check_det_formula().unwrap());
        assert!(lat(2, 6, &[&[1, 1]]).check_det_formula().unwrap());
        assert!(lat(2, 2, &[&[1, 1], &[1, 1]]).check_det_formula().unwrap());
        let err = counterexample_lattice().check_det_formula().unwrap_err();
        assert!(matches!(err, Error::NotSquareFree { .. }));
    }

    #[test]
    fn squarefree_primes_sorted_descending() {
        assert_eq!(lat(2, 6, &[&[1, 1]]).squarefree_primes().unwrap(), vec![3, 2]);
        assert!(RationalLattice::standard(2)
            .squarefree_primes()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn complete_frame_basis_rejects_noncompletable() {
        let c = counterexample_lattice();
        assert!(c
            .complete_frame_basis(&IndexSet::from_vec(vec![1]))
            .unwrap()
            .is_none());
    }
}
