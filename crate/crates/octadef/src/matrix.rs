//! Exact integer and rational matrix arithmetic.
//!
//! Everything is arbitrary precision: Hermite and Smith normal forms over
//! the integers, rank over prime fields via exact modular inverses, and
//! row-vector solving modulo q. No floating point is involved in any result.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};

/// Dense integer matrix, row-major, arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| BigInt::from(x)))
            .collect();
        Self::new(r, c, entries).expect("consistent literal rows")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.at(i, j) + a * rhs.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Stacks `self` on top of `other` (column counts must agree).
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column mismatch".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        IntMatrix::new(self.rows + other.rows, self.cols, entries)
    }

    /// Returns a copy with columns rearranged so new column j is old
    /// column perm[j].
    pub fn with_columns(&self, perm: &[usize]) -> IntMatrix {
        assert_eq!(perm.len(), self.cols);
        let mut out = IntMatrix::zero(self.rows, self.cols);
        for r in 0..self.rows {
            for (j, &src) in perm.iter().enumerate() {
                out.set(r, j, self.at(r, src).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.at(i, c).clone();
            self.set(i, c, v);
        }
    }

    /// rows (i, j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
    fn transform_rows(&mut self, i: usize, j: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
        for k in 0..self.cols {
            let vi = self.at(i, k).clone();
            let vj = self.at(j, k).clone();
            self.set(i, k, a * &vi + b * &vj);
            self.set(j, k, c * vi + d * vj);
        }
    }

    /// row_i -= q * row_j
    fn row_sub_mul(&mut self, i: usize, j: usize, q: &BigInt) {
        for k in 0..self.cols {
            let v = self.at(i, k) - q * self.at(j, k);
            self.set(i, k, v);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// cols (i, j) <- (a*col_i + b*col_j, c*col_i + d*col_j)
    fn transform_cols(&mut self, i: usize, j: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
        for r in 0..self.rows {
            let vi = self.at(r, i).clone();
            let vj = self.at(r, j).clone();
            self.set(r, i, a * &vi + b * &vj);
            self.set(r, j, c * vi + d * vj);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(
                f,
                "  [{}]",
                self.row(r)
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(
                f,
                "{}",
                self.row(r)
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            )?;
        }
        Ok(())
    }
}

/// Row-style Hermite normal form.
///
/// Returns `(H, U)` where `H` carries the nonzero rows only, pivots are
/// positive, entries above each pivot are reduced into `[0, pivot)`, `U` is
/// unimodular of full row dimension, and `U * M` equals `H` padded with zero
/// rows at the bottom.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let Some(pivot_row) = (r..a.rows()).find(|&i| !a.at(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(r, pivot_row);
        u.swap_rows(r, pivot_row);
        for i in r + 1..a.rows() {
            if a.at(i, c).is_zero() {
                continue;
            }
            let p = a.at(r, c).clone();
            let x = a.at(i, c).clone();
            let eg = p.extended_gcd(&x);
            let cc = -(&x / &eg.gcd);
            let cd = &p / &eg.gcd;
            a.transform_rows(r, i, &eg.x, &eg.y, &cc, &cd);
            u.transform_rows(r, i, &eg.x, &eg.y, &cc, &cd);
        }
        if a.at(r, c).is_negative() {
            a.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let quot = a.at(i, c).div_floor(a.at(r, c));
            if !quot.is_zero() {
                a.row_sub_mul(i, r, &quot);
                u.row_sub_mul(i, r, &quot);
            }
        }
        r += 1;
    }
    let h = IntMatrix::new(r, a.cols(), a.entries[..r * a.cols()].to_vec())
        .expect("prefix of a consistent matrix");
    (h, u)
}

/// Smith normal form: `(S, U, V)` with `U * M * V = S`, `S` diagonal with
/// nonnegative invariant factors in a divisibility chain, `U` and `V`
/// unimodular.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    let limit = m.rows().min(m.cols());

    'pivot: for t in 0..limit {
        // Bring the absolutely smallest nonzero entry of the trailing
        // submatrix to (t, t); if the submatrix is zero we are done.
        let mut best: Option<(usize, usize)> = None;
        for i in t..a.rows() {
            for j in t..a.cols() {
                if a.at(i, j).is_zero() {
                    continue;
                }
                if best
                    .map(|(bi, bj)| a.at(i, j).abs() < a.at(bi, bj).abs())
                    .unwrap_or(true)
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else {
            break 'pivot;
        };
        a.swap_rows(t, bi);
        u.swap_rows(t, bi);
        a.swap_cols(t, bj);
        v.swap_cols(t, bj);

        loop {
            // Clear column t below the pivot.
            for i in t + 1..a.rows() {
                if a.at(i, t).is_zero() {
                    continue;
                }
                let p = a.at(t, t).clone();
                let x = a.at(i, t).clone();
                let eg = p.extended_gcd(&x);
                let cc = -(&x / &eg.gcd);
                let cd = &p / &eg.gcd;
                a.transform_rows(t, i, &eg.x, &eg.y, &cc, &cd);
                u.transform_rows(t, i, &eg.x, &eg.y, &cc, &cd);
            }
            // Clear row t right of the pivot.
            for j in t + 1..a.cols() {
                if a.at(t, j).is_zero() {
                    continue;
                }
                let p = a.at(t, t).clone();
                let x = a.at(t, j).clone();
                let eg = p.extended_gcd(&x);
                let cc = -(&x / &eg.gcd);
                let cd = &p / &eg.gcd;
                a.transform_cols(t, j, &eg.x, &eg.y, &cc, &cd);
                v.transform_cols(t, j, &eg.x, &eg.y, &cc, &cd);
            }
            let col_clear = (t + 1..a.rows()).all(|i| a.at(i, t).is_zero());
            let row_clear = (t + 1..a.cols()).all(|j| a.at(t, j).is_zero());
            if !(col_clear && row_clear) {
                continue;
            }
            // Enforce that the pivot divides the whole trailing submatrix.
            let d = a.at(t, t).clone();
            let offender = (t + 1..a.rows())
                .flat_map(|i| (t + 1..a.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| !(a.at(i, j) % &d).is_zero());
            match offender {
                Some((i, _)) => {
                    // Fold the offending row into row t and re-clear.
                    let one = BigInt::one();
                    let zero = BigInt::zero();
                    a.transform_rows(t, i, &one, &one, &zero, &one);
                    u.transform_rows(t, i, &one, &one, &zero, &one);
                }
                None => break,
            }
        }
        if a.at(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    (a, u, v)
}

/// Rank of `m` with entries reduced mod the prime `p`, by Gaussian
/// elimination over the field with p elements.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let mut ech = ModPEchelon::new(p);
    for r in 0..m.rows() {
        let v = m.row(r).iter().map(|e| reduce_mod_u64(e, p)).collect();
        ech.insert(v);
    }
    Ok(ech.rank())
}

pub(crate) fn reduce_mod_u64(x: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = x.mod_floor(&m);
    // mod_floor of a positive modulus is in [0, p)
    let digits = r.to_u64_digits().1;
    digits.first().copied().unwrap_or(0)
}

/// Incremental row echelon over F_p. Rows are kept normalized with pivot 1.
pub(crate) struct ModPEchelon {
    p: u64,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl ModPEchelon {
    pub fn new(p: u64) -> Self {
        Self {
            p,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [u64]) {
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let factor = v[pc];
            if factor == 0 {
                continue;
            }
            for (vi, ri) in v.iter_mut().zip(row) {
                let sub = mul_mod_u64(factor, *ri, self.p);
                *vi = (*vi + self.p - sub) % self.p;
            }
        }
    }

    /// True iff `v` is outside the current row span.
    pub fn is_independent(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().any(|&x| x != 0)
    }

    /// Absorbs `v`; returns true iff it enlarged the span.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        self.reduce(&mut v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod_u64(v[pc], self.p);
        for x in v.iter_mut() {
            *x = mul_mod_u64(*x, inv, self.p);
        }
        self.rows.push(v);
        self.pivots.push(pc);
        true
    }
}

fn mul_mod_u64(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    // Fermat inverse; p is prime and a != 0 mod p.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, base, p);
        }
        base = mul_mod_u64(base, base, p);
        e >>= 1;
    }
    acc
}

/// Solves `c * M = b (mod q)` for an integer row vector `c`, via the Smith
/// normal form of `M`. Returns None when no solution exists.
pub fn solve_mod(m: &IntMatrix, b: &[BigInt], q: &BigInt) -> Result<Option<Vec<BigInt>>> {
    if b.len() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {} columns",
            b.len(),
            m.cols()
        )));
    }
    if !q.is_positive() {
        return Err(Error::Precondition(format!("modulus {q} must be positive")));
    }
    let (s, u, v) = snf(m);
    // Transform the target into Smith coordinates: solve y * S = b * V (mod q).
    let bv: Vec<BigInt> = (0..v.cols())
        .map(|j| (0..v.rows()).map(|i| &b[i] * v.at(i, j)).sum())
        .collect();
    let mut y = vec![BigInt::zero(); m.rows()];
    for j in 0..m.cols() {
        let d = if j < m.rows() {
            s.at(j, j).clone()
        } else {
            BigInt::zero()
        };
        let g = d.gcd(q);
        if !(&bv[j] % &g).is_zero() {
            return Ok(None);
        }
        if j < m.rows() {
            let qg = q / &g;
            if qg.is_one() {
                continue; // any residue works; keep 0
            }
            let dg = (&d / &g).mod_floor(&qg);
            let inv = inv_mod_big(&dg, &qg).ok_or_else(|| {
                Error::Internal("d/g must be invertible modulo q/g".into())
            })?;
            y[j] = ((&bv[j] / &g) * inv).mod_floor(&qg);
        }
    }
    // Back to original coordinates: c = y * U (mod q).
    let c: Vec<BigInt> = (0..u.cols())
        .map(|k| {
            (0..u.rows())
                .map(|j| &y[j] * u.at(j, k))
                .sum::<BigInt>()
                .mod_floor(q)
        })
        .collect();
    // The construction guarantees the congruence; check it anyway.
    for (j, target) in b.iter().enumerate() {
        let got: BigInt = (0..m.rows()).map(|i| &c[i] * m.at(i, j)).sum();
        if !((got - target).mod_floor(q)).is_zero() {
            return Err(Error::Internal("solve_mod produced a non-solution".into()));
        }
    }
    Ok(Some(c))
}

fn inv_mod_big(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    let eg = a.extended_gcd(n);
    if !eg.gcd.is_one() {
        return None;
    }
    Some(eg.x.mod_floor(n))
}

/// Dense rational matrix used for lattice bases and certificates.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rational rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigRational::one();
        }
        Self {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Exact determinant by fraction Gaussian elimination.
    pub fn det(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of non-square".into()));
        }
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
                return Ok(BigRational::zero());
            };
            if pr != c {
                for k in 0..n {
                    a.swap(pr * n + k, c * n + k);
                }
                det = -det;
            }
            let pivot = a[c * n + c].clone();
            det *= &pivot;
            for r in c + 1..n {
                if a[r * n + c].is_zero() {
                    continue;
                }
                let factor = &a[r * n + c] / &pivot;
                for k in c..n {
                    let v = &a[r * n + k] - &factor * &a[c * n + k];
                    a[r * n + k] = v;
                }
            }
        }
        Ok(det)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  [{}]", format_rat_row(self.row(r)))?;
        }
        Ok(())
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{}", format_rat_row(self.row(r)))?;
        }
        Ok(())
    }
}

pub fn format_rat_row(row: &[BigRational]) -> String {
    row.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// LCM of the (reduced) denominators of a rational vector; 1 for the empty
/// or integer vector.
pub fn denominator_lcm(v: &[BigRational]) -> BigInt {
    v.iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn l1_norm(v: &[BigRational]) -> BigRational {
    v.iter().map(|x| x.abs()).sum()
}

pub fn is_integer_vec(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_integer())
}
