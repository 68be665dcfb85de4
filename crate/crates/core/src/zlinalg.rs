//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers. Lattices are kept
//! in a canonical row-style Hermite normal form (positive pivots, entries above
//! a pivot reduced into `[0, pivot)`), so two lattices are equal exactly when
//! their bases are equal.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            data.extend(r);
        }
        IntMatrix { rows: n, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.extend(other.row(i).iter().cloned());
        }
        IntMatrix { rows: self.rows, cols, data }
    }

    pub fn push_row(&mut self, row: Vec<BigInt>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] -= factor * row[src]
    fn row_sub(&mut self, target: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let v = s * factor;
            self.data[target * self.cols + j] -= v;
        }
    }

    /// col[target] -= factor * col[src]
    fn col_sub(&mut self, target: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if s.is_zero() {
                continue;
            }
            let v = s * factor;
            self.data[i * self.cols + target] -= v;
        }
    }

    fn row_add(&mut self, target: usize, src: usize) {
        for j in 0..self.cols {
            let v = self.data[src * self.cols + j].clone();
            self.data[target * self.cols + j] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    /// Absolute determinant-style check used by tests: determinant of a square matrix
    /// by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn hnf_in_place(h: &mut IntMatrix, mut track: Option<&mut IntMatrix>) {
    let (nr, nc) = (h.rows, h.cols);
    let mut r = 0;
    for c in 0..nc {
        if r == nr {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..nr {
                if h[(i, c)].is_zero() {
                    continue;
                }
                if best.is_none_or(|b| h[(i, c)].magnitude() < h[(b, c)].magnitude()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            if let Some(t) = track.as_deref_mut() {
                t.swap_rows(r, b);
            }
            let mut clean = true;
            for i in r + 1..nr {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = h[(i, c)].div_floor(&h[(r, c)]);
                h.row_sub(i, r, &q);
                if let Some(t) = track.as_deref_mut() {
                    t.row_sub(i, r, &q);
                }
                if !h[(i, c)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            if let Some(t) = track.as_deref_mut() {
                t.negate_row(r);
            }
        }
        for i in 0..r {
            let q = h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                h.row_sub(i, r, &q);
                if let Some(t) = track.as_deref_mut() {
                    t.row_sub(i, r, &q);
                }
            }
        }
        r += 1;
    }
}

/// Row-style Hermite normal form with transform: returns `(H, U)` with `U` unimodular,
/// `U * M = H`, zero rows trailing.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    hnf_in_place(&mut h, Some(&mut u));
    (h, u)
}

/// Hermite normal form without the transform.
pub fn hnf_only(m: &IntMatrix) -> IntMatrix {
    let mut h = m.clone();
    hnf_in_place(&mut h, None);
    h
}

/// Smith normal form: returns `(D, L, R)` with `L * M * R = D`, `D` diagonal with
/// nonnegative entries `d_1 | d_2 | ...`.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let mut l = IntMatrix::identity(m.rows);
    let mut r = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    'outer: for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| d[(i, j)].magnitude() < d[(bi, bj)].magnitude()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break 'outer };
            d.swap_rows(t, bi);
            l.swap_rows(t, bi);
            d.swap_cols(t, bj);
            r.swap_cols(t, bj);
            let mut clean = true;
            for i in t + 1..d.rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                d.row_sub(i, t, &q);
                l.row_sub(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..d.cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                d.col_sub(j, t, &q);
                r.col_sub(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let pivot = d[(t, t)].clone();
            let bad = (t + 1..d.rows).find(|&i| (t + 1..d.cols).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    d.row_add(t, i);
                    l.row_add(t, i);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            l.negate_row(t);
        }
    }
    (d, l, r)
}

/// Diagonal of a Smith form (length `min(rows, cols)`).
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let (d, _, _) = snf(m);
    (0..m.rows.min(m.cols)).map(|i| d[(i, i)].clone()).collect()
}

/// Basis (canonical Hermite rows) of the saturated left kernel `{x : x * M = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf(m);
    let mut rows = Vec::new();
    for i in 0..h.rows {
        if h.row(i).iter().all(Zero::is_zero) {
            rows.push(u.row(i).to_vec());
        }
    }
    let k = IntMatrix::from_rows(m.rows, rows);
    Lattice::from_generators(&k).basis
}

/// A finite set of rational primes, used for selective inversion `Z[1/g]`.
pub type PrimeSet = BTreeSet<u64>;

/// Prime divisors of `n` by trial division (desk scale).
pub fn prime_factors(n: u64) -> PrimeSet {
    let mut out = PrimeSet::new();
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.insert(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.insert(n);
    }
    out
}

/// True when every prime factor of `n` lies in `primes` (and `n != 0`).
pub fn supported_on(n: &BigInt, primes: &PrimeSet) -> bool {
    if n.is_zero() {
        return false;
    }
    let mut n = n.abs();
    for &p in primes {
        let p = BigInt::from(p);
        while n.is_multiple_of(&p) {
            n /= &p;
        }
    }
    n.is_one()
}

/// Outcome of a membership query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Coefficients of the vector in the lattice basis; their denominators are
    /// supported on the inverted primes.
    Member(Vec<BigRational>),
    NonMember,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }
}

/// A lattice of integer vectors, stored in canonical Hermite form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lattice {
    ambient_dim: usize,
    basis: IntMatrix,
}

impl Lattice {
    pub fn zero(ambient_dim: usize) -> Self {
        Lattice { ambient_dim, basis: IntMatrix::zeros(0, ambient_dim) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Lattice { ambient_dim, basis: IntMatrix::identity(ambient_dim) }
    }

    /// Lattice spanned by the rows of `gens`.
    pub fn from_generators(gens: &IntMatrix) -> Self {
        let h = hnf_only(gens);
        let rank = (0..h.rows).take_while(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
        let rows = (0..rank).map(|i| h.row(i).to_vec()).collect();
        Lattice { ambient_dim: gens.cols, basis: IntMatrix::from_rows(gens.cols, rows) }
    }

    pub fn from_rows(ambient_dim: usize, rows: Vec<Vec<BigInt>>) -> Self {
        Self::from_generators(&IntMatrix::from_rows(ambient_dim, rows))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    /// Index in `Z^n` of a full-rank lattice; `None` when the rank is deficient.
    pub fn index(&self) -> Option<BigInt> {
        if !self.is_full_rank() {
            return None;
        }
        Some((0..self.rank()).map(|i| self.basis[(i, i)].clone()).product())
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        Lattice::from_generators(&self.basis.vstack(&other.basis))
    }

    fn pivots(&self) -> Vec<usize> {
        (0..self.rank())
            .map(|i| self.basis.row(i).iter().position(|x| !x.is_zero()).expect("zero basis row"))
            .collect()
    }

    /// Rational coordinates of `x` in the basis, if `x` lies in the rational span.
    pub fn solve(&self, x: &[BigRational]) -> Result<Option<Vec<BigRational>>, LinalgError> {
        if x.len() != self.ambient_dim {
            return Err(LinalgError::DimensionMismatch { expected: self.ambient_dim, got: x.len() });
        }
        let mut residual = x.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for (i, &p) in self.pivots().iter().enumerate() {
            let c = &residual[p] / BigRational::from_integer(self.basis[(i, p)].clone());
            if !c.is_zero() {
                for (j, r) in residual.iter_mut().enumerate() {
                    let b = &self.basis[(i, j)];
                    if !b.is_zero() {
                        *r -= &c * BigRational::from_integer(b.clone());
                    }
                }
            }
            coeffs.push(c);
        }
        if residual.iter().all(Zero::is_zero) {
            Ok(Some(coeffs))
        } else {
            Ok(None)
        }
    }

    pub fn contains_int(&self, x: &[BigInt]) -> bool {
        let q: Vec<BigRational> = x.iter().cloned().map(BigRational::from_integer).collect();
        lattice_member(self, &q, &PrimeSet::new()).map(|m| m.is_member()).unwrap_or(false)
    }

    /// `self ⊆ other`, optionally after inverting `invert` in `other`.
    pub fn is_sublattice_of(&self, other: &Lattice, invert: &PrimeSet) -> bool {
        (0..self.rank()).all(|i| {
            let q: Vec<BigRational> = self.basis.row(i).iter().cloned().map(BigRational::from_integer).collect();
            lattice_member(other, &q, invert).map(|m| m.is_member()).unwrap_or(false)
        })
    }

    /// Intersection of two lattices in the same ambient space.
    pub fn intersect(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        if self.rank() == 0 || other.rank() == 0 {
            return Lattice::zero(self.ambient_dim);
        }
        let stacked = self.basis.vstack(&other.basis);
        let k = kernel_basis(&stacked);
        let a = self.rank();
        let coeffs = IntMatrix::from_rows(a, k.row_vecs().into_iter().map(|r| r[..a].to_vec()).collect());
        Lattice::from_generators(&coeffs.mul(&self.basis))
    }

    /// Intersection with the rational subspace spanned by this lattice's saturation,
    /// i.e. the saturation `(Q L) ∩ Z^n`.
    pub fn saturation(&self) -> Lattice {
        if self.rank() == 0 {
            return self.clone();
        }
        let ortho = kernel_basis(&self.basis.transpose());
        // ortho rows span the integer orthogonal complement; its own orthogonal
        // complement is the saturation.
        let sat = kernel_basis(&ortho.transpose());
        if ortho.rows == 0 {
            return Lattice::full(self.ambient_dim);
        }
        Lattice::from_generators(&sat)
    }
}

/// Membership of a rational vector in `L ⊗ Z[invert^-1]`.
///
/// The denominator of `x` must already be supported on `invert`; otherwise the
/// answer is immediately negative. With `invert` empty this is exact lattice
/// membership.
pub fn lattice_member(l: &Lattice, x: &[BigRational], invert: &PrimeSet) -> Result<Membership, LinalgError> {
    if x.len() != l.ambient_dim {
        return Err(LinalgError::DimensionMismatch { expected: l.ambient_dim, got: x.len() });
    }
    let den = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    if !supported_on(&den, invert) {
        return Ok(Membership::NonMember);
    }
    if x.iter().all(Zero::is_zero) {
        return Ok(Membership::Member(vec![BigRational::zero(); l.rank()]));
    }
    let Some(coeffs) = l.solve(x)? else {
        return Ok(Membership::NonMember);
    };
    let e = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    if supported_on(&e, invert) {
        Ok(Membership::Member(coeffs))
    } else {
        Ok(Membership::NonMember)
    }
}

/// A rational lattice `(1/den) * L` with `den` minimal; canonical like [`Lattice`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QLattice {
    den: BigInt,
    lattice: Lattice,
}

impl QLattice {
    pub fn from_rational_rows(ambient_dim: usize, rows: &[Vec<BigRational>]) -> Self {
        let den = rows.iter().flatten().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let int_rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ambient_dim);
                r.iter().map(|v| (v * BigRational::from_integer(den.clone())).to_integer()).collect()
            })
            .collect();
        Self::from_scaled(den, Lattice::from_rows(ambient_dim, int_rows))
    }

    /// Normalises `(1/den) * lattice` so that `den` is minimal.
    fn from_scaled(den: BigInt, lattice: Lattice) -> Self {
        let content = lattice.basis.data.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let g = if content.is_zero() { den.clone() } else { content.gcd(&den) };
        if g.is_one() {
            return QLattice { den, lattice };
        }
        let rows = lattice.basis.row_vecs().into_iter().map(|r| r.into_iter().map(|v| v / &g).collect()).collect();
        QLattice { den: &den / &g, lattice: Lattice::from_rows(lattice.ambient_dim, rows) }
    }

    pub fn from_lattice(lattice: Lattice) -> Self {
        QLattice { den: BigInt::one(), lattice }
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn scaled(&self) -> &Lattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.lattice.ambient_dim
    }

    /// Basis vectors as rationals.
    pub fn basis_rows(&self) -> Vec<Vec<BigRational>> {
        self.lattice
            .basis
            .row_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(|v| BigRational::new(v, self.den.clone())).collect())
            .collect()
    }

    pub fn member(&self, x: &[BigRational], invert: &PrimeSet) -> Result<Membership, LinalgError> {
        let d = BigRational::from_integer(self.den.clone());
        let scaled: Vec<BigRational> = x.iter().map(|v| v * &d).collect();
        lattice_member(&self.lattice, &scaled, invert)
    }

    pub fn is_sublattice_of(&self, other: &QLattice, invert: &PrimeSet) -> bool {
        self.basis_rows().iter().all(|r| other.member(r, invert).map(|m| m.is_member()).unwrap_or(false))
    }
}

/// Dense rational matrix helpers (row-major `Vec<Vec<_>>`).
pub mod qmat {
    use super::*;

    pub type QMatrix = Vec<Vec<BigRational>>;

    pub fn from_int(m: &IntMatrix) -> QMatrix {
        m.row_vecs().into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect()
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(m: &mut QMatrix, cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == m.len() {
                break;
            }
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(r, p);
            let inv = m[r][c].recip();
            for v in m[r].iter_mut() {
                *v *= &inv;
            }
            for i in 0..m.len() {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in 0..cols {
                        if !m[r][j].is_zero() {
                            let d = &f * &m[r][j];
                            m[i][j] -= d;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.truncate(r);
        pivots
    }

    pub fn rank(m: &QMatrix, cols: usize) -> usize {
        let mut c = m.clone();
        rref(&mut c, cols).len()
    }

    /// Basis of the left null space `{x : x * M = 0}` of an `n x cols` matrix.
    pub fn left_kernel(m: &QMatrix, cols: usize) -> QMatrix {
        let n = m.len();
        // Augment [M | I] and row reduce: rows whose M part vanishes give the kernel.
        let mut aug: QMatrix = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                r
            })
            .collect();
        let pivots = rref(&mut aug, cols + n);
        let mut out = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            if p >= cols {
                out.push(aug[i][cols..].to_vec());
            }
        }
        // rows of aug below the last pivot vanish entirely; the identity block guarantees
        // every kernel vector shows up as a row whose leading entry lies in the identity part.
        out
    }

    /// Solves `x * M = b` for `x`; `None` when inconsistent. Returns one solution.
    pub fn solve_left(m: &QMatrix, cols: usize, b: &[BigRational]) -> Option<Vec<BigRational>> {
        let n = m.len();
        // Transpose: M^T x^T = b^T, columns n, rows cols.
        let mut aug: QMatrix = (0..cols)
            .map(|j| {
                let mut r: Vec<BigRational> = (0..n).map(|i| m[i][j].clone()).collect();
                r.push(b[j].clone());
                r
            })
            .collect();
        let pivots = rref(&mut aug, n + 1);
        if pivots.last() == Some(&n) {
            return None;
        }
        let mut x = vec![BigRational::zero(); n];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = aug[i][n].clone();
        }
        Some(x)
    }

    pub fn mul_vec_mat(v: &[BigRational], m: &QMatrix, cols: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); cols];
        for (vi, row) in v.iter().zip(m) {
            if vi.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                if !x.is_zero() {
                    *o += vi * x;
                }
            }
        }
        out
    }

    pub fn mul(a: &QMatrix, b: &QMatrix, cols: usize) -> QMatrix {
        a.iter().map(|r| mul_vec_mat(r, b, cols)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn hnf_small_examples() {
        let (h, u) = hnf(&IntMatrix::from_i64(&[&[2, 0], &[1, 1]]));
        assert_eq!(h, IntMatrix::from_i64(&[&[1, 1], &[0, 2]]));
        assert_eq!(u.mul(&IntMatrix::from_i64(&[&[2, 0], &[1, 1]])), h);
        assert_eq!(hnf(&IntMatrix::identity(3)).0, IntMatrix::identity(3));
        assert_eq!(hnf(&IntMatrix::from_i64(&[&[0]])).0, IntMatrix::from_i64(&[&[0]]));
    }

    #[test]
    fn hnf_zero_rows_trail() {
        let m = IntMatrix::from_i64(&[&[0, 0], &[2, 4], &[1, 2]]);
        let (h, u) = hnf(&m);
        assert_eq!(h, IntMatrix::from_i64(&[&[1, 2], &[0, 0], &[0, 0]]));
        assert_eq!(u.mul(&m), h);
        assert_eq!(u.det().abs(), BigInt::one());
    }

    #[test]
    fn snf_examples() {
        let d = elementary_divisors(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
        let d = elementary_divisors(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]]));
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(4)]);
        let z = IntMatrix::zeros(2, 3);
        let (dz, _, _) = snf(&z);
        assert!(dz.is_zero());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&IntMatrix::from_i64(&[&[1], &[1]])), IntMatrix::from_i64(&[&[1, -1]]));
        assert_eq!(kernel_basis(&IntMatrix::identity(2)).rows(), 0);
        assert_eq!(kernel_basis(&IntMatrix::from_i64(&[&[2], &[4]])), IntMatrix::from_i64(&[&[2, -1]]));
    }

    #[test]
    fn membership_examples() {
        let l = Lattice::from_generators(&IntMatrix::from_i64(&[&[1, 13], &[0, 21]]));
        let m = lattice_member(&l, &q(&[5, 2]), &PrimeSet::new()).unwrap();
        assert_eq!(m, Membership::Member(q(&[5, -3])));
        assert!(lattice_member(&l, &q(&[0, 0]), &PrimeSet::new()).unwrap().is_member());
        let l2 = Lattice::from_generators(&IntMatrix::from_i64(&[&[2, 0]]));
        let half = vec![BigRational::from_integer(1.into()), BigRational::zero()];
        let three: PrimeSet = [3].into_iter().collect();
        assert!(!lattice_member(&l2, &half, &three).unwrap().is_member());
        let two: PrimeSet = [2].into_iter().collect();
        assert!(lattice_member(&l2, &half, &two).unwrap().is_member());
        assert!(matches!(
            lattice_member(&l2, &q(&[1]), &two),
            Err(LinalgError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn saturation_of_scaled_lattice() {
        let l = Lattice::from_generators(&IntMatrix::from_i64(&[&[2, 4, 6]]));
        assert_eq!(l.saturation(), Lattice::from_generators(&IntMatrix::from_i64(&[&[1, 2, 3]])));
    }

    #[test]
    fn qlattice_is_canonical() {
        let half = BigRational::new(1.into(), 2.into());
        let a = QLattice::from_rational_rows(2, &[vec![half.clone(), BigRational::zero()]]);
        let b = QLattice::from_rational_rows(2, &[vec![-half * BigRational::from_integer(3.into()), BigRational::zero()], vec![BigRational::one(), BigRational::zero()]]);
        assert_eq!(a, b);
        assert_eq!(a.den(), &BigInt::from(2));
    }

    #[test]
    fn rational_kernel_and_solve() {
        let m = qmat::from_int(&IntMatrix::from_i64(&[&[1, 2], &[2, 4], &[0, 1]]));
        let k = qmat::left_kernel(&m, 2);
        assert_eq!(k.len(), 1);
        assert!(qmat::mul_vec_mat(&k[0], &m, 2).iter().all(Zero::is_zero));
        let x = qmat::solve_left(&m, 2, &q(&[3, 7])).unwrap();
        assert_eq!(qmat::mul_vec_mat(&x, &m, 2), q(&[3, 7]));
    }
}
