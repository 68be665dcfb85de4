//! The group ring `R[G]` of a cyclic group `G = <sigma>` of order `nu`, polynomials
//! over it, rational idempotents, ideals as lattices, and Fitting ideals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use thiserror::Error;

use crate::zlinalg::{kernel_basis, lattice_member, IntMatrix, Lattice, LinalgError, PrimeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
    #[error("image of sigma does not have order dividing {nu}")]
    OrderViolation { nu: usize },
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error("divisor must have constant term 1")]
    BadDivisor,
    #[error("presentation too large for minor enumeration: {0}")]
    Capacity(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Element `sum_i c_i sigma^i` of `R[Z/nu]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupRingElement<T> {
    coeffs: Vec<T>,
}

pub type ZG = GroupRingElement<BigInt>;
pub type QG = GroupRingElement<BigRational>;

impl<T: fmt::Display> fmt::Debug for GroupRingElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl<T: Clone + Num + Neg<Output = T>> GroupRingElement<T> {
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "group ring of the empty group");
        GroupRingElement { coeffs }
    }

    pub fn zero(nu: usize) -> Self {
        Self::from_coeffs(vec![T::zero(); nu])
    }

    pub fn one(nu: usize) -> Self {
        Self::scalar(nu, T::one())
    }

    pub fn scalar(nu: usize, c: T) -> Self {
        let mut v = vec![T::zero(); nu];
        v[0] = c;
        Self::from_coeffs(v)
    }

    /// `sigma^k` (any integer `k`).
    pub fn sigma_pow(nu: usize, k: i64) -> Self {
        let mut v = vec![T::zero(); nu];
        v[k.rem_euclid(nu as i64) as usize] = T::one();
        Self::from_coeffs(v)
    }

    pub fn nu(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> &T {
        &self.coeffs[k.rem_euclid(self.nu() as i64) as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// Multiplication by `sigma^k`.
    pub fn shift(&self, k: i64) -> Self {
        let nu = self.nu() as i64;
        let mut v = vec![T::zero(); self.nu()];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[(i as i64 + k).rem_euclid(nu) as usize] = c.clone();
        }
        Self::from_coeffs(v)
    }

    /// The involution `sigma -> sigma^{-1}`.
    pub fn invert_sigma(&self) -> Self {
        let nu = self.nu();
        Self::from_coeffs((0..nu).map(|i| self.coeffs[(nu - i) % nu].clone()).collect())
    }

    /// Sum of the coefficients (augmentation).
    pub fn augmentation(&self) -> T {
        self.coeffs.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nu());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl ZG {
    pub fn from_i64(v: &[i64]) -> Self {
        Self::from_coeffs(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn to_rational(&self) -> QG {
        QG::from_coeffs(self.coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }
}

impl QG {
    pub fn from_ratios(v: &[(i64, i64)]) -> Self {
        Self::from_coeffs(v.iter().map(|&(a, b)| BigRational::new(a.into(), b.into())).collect())
    }

    /// `Some` when all coefficients are integers.
    pub fn to_integer(&self) -> Option<ZG> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(ZG::from_coeffs(self.coeffs.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }
}

impl<T: Clone + Num + Neg<Output = T>> Add for &GroupRingElement<T> {
    type Output = GroupRingElement<T>;
    fn add(self, rhs: Self) -> GroupRingElement<T> {
        assert_eq!(self.nu(), rhs.nu());
        GroupRingElement::from_coeffs(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.clone() + b.clone()).collect())
    }
}

impl<T: Clone + Num + Neg<Output = T>> Sub for &GroupRingElement<T> {
    type Output = GroupRingElement<T>;
    fn sub(self, rhs: Self) -> GroupRingElement<T> {
        assert_eq!(self.nu(), rhs.nu());
        GroupRingElement::from_coeffs(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.clone() - b.clone()).collect())
    }
}

impl<T: Clone + Num + Neg<Output = T>> Neg for &GroupRingElement<T> {
    type Output = GroupRingElement<T>;
    fn neg(self) -> GroupRingElement<T> {
        GroupRingElement::from_coeffs(self.coeffs.iter().map(|a| -a.clone()).collect())
    }
}

impl<T: Clone + Num + Neg<Output = T>> Mul for &GroupRingElement<T> {
    type Output = GroupRingElement<T>;
    fn mul(self, rhs: Self) -> GroupRingElement<T> {
        let nu = self.nu();
        assert_eq!(nu, rhs.nu());
        let mut v = vec![T::zero(); nu];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % nu;
                v[k] = v[k].clone() + a.clone() * b.clone();
            }
        }
        GroupRingElement::from_coeffs(v)
    }
}

/// Polynomial `sum_j c_j u^j` with group-ring coefficients, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupRingPolynomial<T> {
    nu: usize,
    coeffs: Vec<GroupRingElement<T>>,
}

pub type ZGPoly = GroupRingPolynomial<BigInt>;
pub type QGPoly = GroupRingPolynomial<BigRational>;

impl<T: fmt::Display> fmt::Debug for GroupRingPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl<T: Clone + Num + Neg<Output = T>> GroupRingPolynomial<T> {
    pub fn new(nu: usize, mut coeffs: Vec<GroupRingElement<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        assert!(coeffs.iter().all(|c| c.nu() == nu));
        GroupRingPolynomial { nu, coeffs }
    }

    pub fn zero(nu: usize) -> Self {
        Self::new(nu, Vec::new())
    }

    pub fn one(nu: usize) -> Self {
        Self::constant(GroupRingElement::one(nu))
    }

    pub fn constant(c: GroupRingElement<T>) -> Self {
        Self::new(c.nu(), vec![c])
    }

    /// `P(x u) = sum_i p_i x^i u^i` for scalar coefficients `p_i`.
    pub fn substitute(nu: usize, p: &[T], x: &GroupRingElement<T>) -> Self {
        let mut out = Vec::with_capacity(p.len());
        let mut pw = GroupRingElement::one(nu);
        for c in p {
            out.push(pw.scale(c));
            pw = &pw * x;
        }
        Self::new(nu, out)
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn coeffs(&self) -> &[GroupRingElement<T>] {
        &self.coeffs
    }

    /// Coefficient of `u^j` (zero beyond the degree).
    pub fn coeff(&self, j: usize) -> GroupRingElement<T> {
        self.coeffs.get(j).cloned().unwrap_or_else(|| GroupRingElement::zero(self.nu))
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.nu, (0..n).map(|j| &self.coeff(j) + &other.coeff(j)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(self.nu, (0..n).map(|j| &self.coeff(j) - &other.coeff(j)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nu);
        }
        let mut out = vec![GroupRingElement::zero(self.nu); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::new(self.nu, out)
    }

    /// Reduction modulo `u^(n+1)`.
    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.nu, self.coeffs.iter().take(n + 1).cloned().collect())
    }

    pub fn mul_trunc(&self, other: &Self, n: usize) -> Self {
        self.truncate(n).mul(&other.truncate(n)).truncate(n)
    }

    /// Value at `u = 1`.
    pub fn eval_one(&self) -> GroupRingElement<T> {
        self.coeffs.iter().fold(GroupRingElement::zero(self.nu), |a, b| &a + b)
    }

    /// Coefficients `a_j` of the expansion `sum_j a_j (1 - u)^j`.
    pub fn taylor_at_one(&self) -> Vec<GroupRingElement<T>> {
        let n = self.coeffs.len();
        let mut binom: Vec<T> = vec![T::one()];
        let mut out = vec![GroupRingElement::zero(self.nu); n];
        // row i of Pascal's triangle, accumulated on the fly
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                let mut next = vec![T::one(); i + 1];
                for j in 1..i {
                    next[j] = binom[j - 1].clone() + binom[j].clone();
                }
                binom = next;
            }
            for (j, b) in binom.iter().enumerate() {
                let term = c.scale(b);
                out[j] = if j % 2 == 0 { &out[j] + &term } else { &out[j] - &term };
            }
        }
        out
    }
}

impl ZGPoly {
    pub fn to_rational(&self) -> QGPoly {
        QGPoly::new(self.nu, self.coeffs.iter().map(ZG::to_rational).collect())
    }
}

/// Exact division `f = g h` with `g(0) = 1`, by the coefficient recurrence
/// `h_s = f_s - (h_{s-1} g_1 + ... + h_0 g_s)`.
pub fn divide_poly<T: Clone + Num + Neg<Output = T>>(
    f: &GroupRingPolynomial<T>,
    g: &GroupRingPolynomial<T>,
) -> Result<GroupRingPolynomial<T>, GroupRingError> {
    let nu = f.nu();
    if g.coeff(0) != GroupRingElement::one(nu) {
        return Err(GroupRingError::BadDivisor);
    }
    if f.is_zero() {
        return Ok(GroupRingPolynomial::zero(nu));
    }
    // Leading coefficients may be zero divisors, so the quotient degree is only
    // bounded by deg f (every character component is a domain).
    let df = f.degree().unwrap();
    let dg = g.degree().unwrap();
    let mut h: Vec<GroupRingElement<T>> = Vec::with_capacity(df + 1);
    for s in 0..=df {
        let mut hs = f.coeff(s);
        for j in 1..=s.min(dg) {
            hs = &hs - &(&h[s - j] * &g.coeff(j));
        }
        h.push(hs);
    }
    let h = GroupRingPolynomial::new(nu, h);
    if g.mul(&h) == *f {
        Ok(h)
    } else {
        Err(GroupRingError::NotDivisible)
    }
}

mod qpoly {
    //! Rational polynomials, ascending coefficients, trimmed.
    use super::*;

    pub type QPoly = Vec<BigRational>;

    pub fn trim(mut f: QPoly) -> QPoly {
        while f.last().is_some_and(Zero::is_zero) {
            f.pop();
        }
        f
    }

    pub fn mul(f: &QPoly, g: &QPoly) -> QPoly {
        if f.is_empty() || g.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); f.len() + g.len() - 1];
        for (i, a) in f.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        trim(out)
    }

    pub fn sub(f: &QPoly, g: &QPoly) -> QPoly {
        let n = f.len().max(g.len());
        let z = BigRational::zero();
        trim((0..n).map(|i| f.get(i).unwrap_or(&z) - g.get(i).unwrap_or(&z)).collect())
    }

    pub fn divrem(f: &QPoly, g: &QPoly) -> (QPoly, QPoly) {
        let mut r = f.clone();
        if r.len() < g.len() {
            return (Vec::new(), r);
        }
        let dg = g.len() - 1;
        let mut q = vec![BigRational::zero(); r.len() - dg];
        for i in (dg..r.len()).rev() {
            let c = &r[i] / &g[dg];
            if c.is_zero() {
                continue;
            }
            for j in 0..=dg {
                let d = &c * &g[j];
                r[i - dg + j] -= d;
            }
            q[i - dg] = c;
        }
        r.truncate(dg);
        (trim(q), trim(r))
    }

    /// `s` with `s a = 1 mod m`, for coprime `a`, `m`.
    pub fn inverse_mod(a: &QPoly, m: &QPoly) -> QPoly {
        let (mut r0, mut r1) = (m.clone(), divrem(a, m).1);
        let (mut s0, mut s1): (QPoly, QPoly) = (Vec::new(), vec![BigRational::one()]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        assert_eq!(r0.len(), 1, "inverse of a non-unit");
        let c = r0[0].recip();
        trim(s0.into_iter().map(|x| x * &c).collect())
    }
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

pub fn euler_phi(n: usize) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

/// Cyclotomic polynomial `Phi_d` by iterated exact division of `x^d - 1`.
pub fn cyclotomic(d: usize) -> Vec<BigInt> {
    let mut f: Vec<BigRational> = vec![BigRational::zero(); d + 1];
    f[0] = -BigRational::one();
    f[d] = BigRational::one();
    for e in divisors(d) {
        if e < d {
            let phi: Vec<BigRational> = cyclotomic(e).into_iter().map(BigRational::from_integer).collect();
            let (q, r) = qpoly::divrem(&f, &phi);
            debug_assert!(r.is_empty());
            f = q;
        }
    }
    f.into_iter().map(|c| c.to_integer()).collect()
}

/// Orthogonal idempotents `e_d` of `Q[Z/nu]`, one per divisor `d` of `nu`, where
/// `e_d` is the CRT idempotent of the factor `Phi_d` of `x^nu - 1`.
pub fn rational_idempotents(nu: usize) -> BTreeMap<usize, QG> {
    let mut xn: Vec<BigRational> = vec![BigRational::zero(); nu + 1];
    xn[0] = -BigRational::one();
    xn[nu] = BigRational::one();
    let mut out = BTreeMap::new();
    for d in divisors(nu) {
        let phi: Vec<BigRational> = cyclotomic(d).into_iter().map(BigRational::from_integer).collect();
        let cof = qpoly::divrem(&xn, &phi).0;
        let s = qpoly::inverse_mod(&cof, &phi);
        let e = qpoly::divrem(&qpoly::mul(&cof, &s), &xn).1;
        let mut coeffs = vec![BigRational::zero(); nu];
        for (i, c) in e.into_iter().enumerate() {
            coeffs[i] = c;
        }
        out.insert(d, QG::from_coeffs(coeffs));
    }
    out
}

/// A commutative ring that can receive the image of `sigma`.
pub trait EvalRing {
    type Elem: Clone + PartialEq;
    fn from_integer(&self, n: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

/// The integers.
pub struct Integers;

impl EvalRing for Integers {
    type Elem = BigInt;
    fn from_integer(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
}

/// `Z/m`, elements kept in `[0, m)`.
pub struct IntegersMod(pub BigInt);

impl EvalRing for IntegersMod {
    type Elem = BigInt;
    fn from_integer(&self, n: &BigInt) -> BigInt {
        n.mod_floor(&self.0)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a + b).mod_floor(&self.0)
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b).mod_floor(&self.0)
    }
}

/// Ring map `Z[G] -> R` determined by `sigma -> image`.
pub fn eval_hom<R: EvalRing>(x: &ZG, image: &R::Elem, ring: &R) -> Result<R::Elem, GroupRingError> {
    let one = ring.from_integer(&BigInt::one());
    let mut pw = one.clone();
    let mut acc = ring.from_integer(&BigInt::zero());
    for c in x.coeffs() {
        acc = ring.add(&acc, &ring.mul(&ring.from_integer(c), &pw));
        pw = ring.mul(&pw, image);
    }
    if pw != one {
        return Err(GroupRingError::OrderViolation { nu: x.nu() });
    }
    Ok(acc)
}

/// An ideal of `Z[G]` stored as its canonical coefficient lattice.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GIdeal {
    nu: usize,
    lattice: Lattice,
}

fn shifts_matrix(nu: usize, gens: &[ZG]) -> IntMatrix {
    let mut rows = Vec::with_capacity(gens.len() * nu);
    for g in gens {
        for k in 0..nu {
            rows.push(g.shift(k as i64).coeffs().to_vec());
        }
    }
    IntMatrix::from_rows(nu, rows)
}

impl GIdeal {
    pub fn from_gens(nu: usize, gens: &[ZG]) -> Self {
        GIdeal { nu, lattice: Lattice::from_generators(&shifts_matrix(nu, gens)) }
    }

    /// Wraps a lattice that is already known to be sigma-stable.
    pub fn from_lattice(nu: usize, lattice: Lattice) -> Self {
        assert_eq!(lattice.ambient_dim(), nu);
        let gens: Vec<ZG> = lattice.basis().row_vecs().into_iter().map(ZG::from_coeffs).collect();
        GIdeal::from_gens(nu, &gens)
    }

    pub fn unit(nu: usize) -> Self {
        GIdeal { nu, lattice: Lattice::full(nu) }
    }

    pub fn zero(nu: usize) -> Self {
        GIdeal { nu, lattice: Lattice::zero(nu) }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn basis_elements(&self) -> Vec<ZG> {
        self.lattice.basis().row_vecs().into_iter().map(ZG::from_coeffs).collect()
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.lattice.basis().row_vecs()
    }

    pub fn is_sigma_stable(&self) -> bool {
        self.basis_elements().iter().all(|b| self.lattice.contains_int(b.shift(1).coeffs()))
    }

    pub fn member(&self, x: &ZG, invert: &PrimeSet) -> Result<bool, GroupRingError> {
        self.member_q(&x.to_rational(), invert)
    }

    pub fn member_q(&self, x: &QG, invert: &PrimeSet) -> Result<bool, GroupRingError> {
        Ok(lattice_member(&self.lattice, x.coeffs(), invert)?.is_member())
    }

    pub fn product(&self, other: &GIdeal) -> GIdeal {
        assert_eq!(self.nu, other.nu);
        let a = self.basis_elements();
        let b = other.basis_elements();
        let gens: Vec<ZG> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        GIdeal::from_gens(self.nu, &gens)
    }

    pub fn sum(&self, other: &GIdeal) -> GIdeal {
        GIdeal { nu: self.nu, lattice: self.lattice.sum(&other.lattice) }
    }

    pub fn intersect(&self, other: &GIdeal) -> GIdeal {
        GIdeal { nu: self.nu, lattice: self.lattice.intersect(&other.lattice) }
    }

    pub fn contains(&self, other: &GIdeal, invert: &PrimeSet) -> bool {
        other.lattice.is_sublattice_of(&self.lattice, invert)
    }

    /// `[Z[G] : I]`, `None` when infinite.
    pub fn index(&self) -> Option<BigInt> {
        self.lattice.index()
    }
}

/// `e_d x` for a rational group-ring element.
fn project(e: &QG, x: &QG) -> QG {
    e * x
}

/// `Z[G] ∩ (sum of the rational e_d-components with r_map(d) = r)`.
pub fn component_lattice(nu: usize, r_map: &BTreeMap<usize, usize>, r: usize) -> GIdeal {
    let idem = rational_idempotents(nu);
    let killed: Vec<&QG> = idem.iter().filter(|(d, _)| r_map[*d] != r).map(|(_, e)| e).collect();
    if killed.is_empty() {
        return GIdeal::unit(nu);
    }
    // Row i holds the concatenated coefficients of e_d sigma^i for each killed d.
    let den = killed
        .iter()
        .flat_map(|e| e.coeffs().iter())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scale = BigRational::from_integer(den);
    let rows: Vec<Vec<BigInt>> = (0..nu)
        .map(|i| {
            let s = QG::sigma_pow(nu, i as i64);
            killed
                .iter()
                .flat_map(|e| project(e, &s).coeffs().to_vec())
                .map(|c| (c * &scale).to_integer())
                .collect()
        })
        .collect();
    let m = IntMatrix::from_rows(nu * killed.len(), rows);
    GIdeal::from_lattice(nu, Lattice::from_generators(&kernel_basis(&m)))
}

/// A `Z[G]`-module `Z[G]^n / (row span of relations)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePresentation {
    pub nu: usize,
    pub generators: usize,
    pub relations: Vec<Vec<ZG>>,
}

/// Maximal number of generators for which minors are enumerated.
pub const MINOR_GENERATOR_CAP: usize = 12;
const MINOR_COUNT_CAP: u128 = 200_000;

impl FinitePresentation {
    pub fn new(nu: usize, generators: usize, relations: Vec<Vec<ZG>>) -> Self {
        assert!(relations.iter().all(|r| r.len() == generators && r.iter().all(|x| x.nu() == nu)));
        FinitePresentation { nu, generators, relations }
    }

    /// Coordinates in `Z^{nu n}`: slot `j nu + k` is the `sigma^k` coefficient of component `j`.
    pub fn flatten(row: &[ZG]) -> Vec<BigInt> {
        row.iter().flat_map(|x| x.coeffs().iter().cloned()).collect()
    }

    pub fn unflatten(nu: usize, v: &[BigInt]) -> Vec<ZG> {
        v.chunks(nu).map(|c| ZG::from_coeffs(c.to_vec())).collect()
    }

    /// Relation lattice in `Z^{nu n}` (all sigma-shifts of all relations).
    pub fn relation_lattice(&self) -> Lattice {
        let dim = self.nu * self.generators;
        let mut rows = Vec::with_capacity(self.relations.len() * self.nu);
        for rel in &self.relations {
            for k in 0..self.nu {
                let shifted: Vec<ZG> = rel.iter().map(|x| x.shift(k as i64)).collect();
                rows.push(Self::flatten(&shifted));
            }
        }
        Lattice::from_generators(&IntMatrix::from_rows(dim, rows))
    }

    /// Order of the module as an abelian group; `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.generators == 0 {
            return Some(BigInt::one());
        }
        self.relation_lattice().index()
    }

    /// Elementary divisors of the underlying abelian group (ones dropped; zeros for free parts).
    pub fn abelian_invariants(&self) -> Vec<BigInt> {
        let dim = self.nu * self.generators;
        let l = self.relation_lattice();
        let mut b = l.basis().clone();
        for _ in l.rank()..dim {
            b.push_row(vec![BigInt::zero(); dim]);
        }
        crate::zlinalg::elementary_divisors(&b).into_iter().filter(|d| !d.is_one()).collect()
    }
}

fn sigma_shift_lattice(nu: usize, gens: &[Vec<BigInt>], dim: usize) -> Lattice {
    let mut rows = Vec::new();
    for g in gens {
        let v = FinitePresentation::unflatten(nu, g);
        for k in 0..nu {
            let s: Vec<ZG> = v.iter().map(|x| x.shift(k as i64)).collect();
            rows.push(FinitePresentation::flatten(&s));
        }
    }
    Lattice::from_generators(&IntMatrix::from_rows(dim, rows))
}

/// Greedy `Z[G]`-generators of a sigma-stable lattice in `Z^{nu n}`.
fn module_generators(nu: usize, l: &Lattice) -> Vec<Vec<BigInt>> {
    let dim = l.ambient_dim();
    let mut chosen: Vec<Vec<BigInt>> = Vec::new();
    let mut span = Lattice::zero(dim);
    for row in l.basis().row_vecs() {
        if span.contains_int(&row) {
            continue;
        }
        chosen.push(row);
        span = sigma_shift_lattice(nu, &chosen, dim);
        if &span == l {
            break;
        }
    }
    chosen
}

/// Determinant of a square matrix over `Z[G]`.
pub fn det_zg(m: &[Vec<ZG>], nu: usize) -> ZG {
    let n = m.len();
    let mut dp: Vec<Option<ZG>> = vec![None; 1 << n];
    dp[0] = Some(ZG::one(nu));
    for mask in 0usize..(1 << n) {
        let Some(val) = dp[mask].take() else { continue };
        let i = mask.count_ones() as usize;
        if i == n {
            dp[mask] = Some(val);
            continue;
        }
        for c in 0..n {
            if mask & (1 << c) != 0 || m[i][c].is_zero() {
                continue;
            }
            let above = (mask >> (c + 1)).count_ones();
            let mut term = &val * &m[i][c];
            if above % 2 == 1 {
                term = -&term;
            }
            let next = mask | (1 << c);
            dp[next] = Some(match dp[next].take() {
                None => term,
                Some(x) => &x + &term,
            });
        }
    }
    dp[(1 << n) - 1].take().unwrap_or_else(|| ZG::zero(nu))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Ideal generated by all `n x n` minors of the relation matrix, taken literally.
pub fn fitting_ideal_direct(p: &FinitePresentation) -> Result<GIdeal, GroupRingError> {
    let n = p.generators;
    if n == 0 {
        return Ok(GIdeal::unit(p.nu));
    }
    if p.relations.len() < n {
        return Ok(GIdeal::zero(p.nu));
    }
    if n > MINOR_GENERATOR_CAP || binomial(p.relations.len(), n) > MINOR_COUNT_CAP {
        return Err(GroupRingError::Capacity(format!("{} generators, {} relations", n, p.relations.len())));
    }
    let mut minors = Vec::new();
    for_each_subset(p.relations.len(), n, &mut |rows| {
        let m: Vec<Vec<ZG>> = rows.iter().map(|&i| p.relations[i].clone()).collect();
        let d = det_zg(&m, p.nu);
        if !d.is_zero() {
            minors.push(d);
        }
    });
    Ok(GIdeal::from_gens(p.nu, &minors))
}

/// Replaces `p` by an equivalent presentation with few generators and relations:
/// greedy `Z[G]`-generators of the module, then greedy generators of the relation module.
pub fn reduce_presentation(p: &FinitePresentation) -> FinitePresentation {
    let nu = p.nu;
    let n = p.generators;
    let dim = nu * n;
    let rel = p.relation_lattice();
    // choose module generators among the given ones
    let mut chosen: Vec<usize> = Vec::new();
    let mut span = rel.clone();
    for j in 0..n {
        let mut e = vec![BigInt::zero(); dim];
        e[j * nu] = BigInt::one();
        if span.contains_int(&e) {
            continue;
        }
        chosen.push(j);
        let unit_rows: Vec<Vec<BigInt>> = (0..nu)
            .map(|k| {
                let mut v = vec![BigInt::zero(); dim];
                v[j * nu + k] = BigInt::one();
                v
            })
            .collect();
        span = span.sum(&Lattice::from_rows(dim, unit_rows));
        if span.is_full_rank() && span.index() == Some(BigInt::one()) {
            break;
        }
    }
    let s = chosen.len();
    if s == 0 {
        return FinitePresentation::new(nu, 0, Vec::new());
    }
    // kernel of Z[G]^s -> Z^{nu n} / rel
    let mut rows = Vec::new();
    for &j in &chosen {
        for k in 0..nu {
            let mut v = vec![BigInt::zero(); dim];
            v[j * nu + k] = BigInt::one();
            rows.push(v);
        }
    }
    let phi = IntMatrix::from_rows(dim, rows);
    let stacked = phi.vstack(rel.basis());
    let ker = kernel_basis(&stacked);
    let proj: Vec<Vec<BigInt>> = ker.row_vecs().into_iter().map(|r| r[..nu * s].to_vec()).collect();
    let k_lat = Lattice::from_rows(nu * s, proj);
    let gens = module_generators(nu, &k_lat);
    let relations = gens.iter().map(|g| FinitePresentation::unflatten(nu, g)).collect();
    FinitePresentation::new(nu, s, relations)
}

/// Fitting ideal of a finitely presented `Z[G]`-module (presentation-independent).
pub fn fitting_ideal(p: &FinitePresentation) -> Result<GIdeal, GroupRingError> {
    let direct_ok = p.generators <= 2 && binomial(p.relations.len(), p.generators) <= 64;
    if direct_ok {
        return fitting_ideal_direct(p);
    }
    fitting_ideal_direct(&reduce_presentation(p))
}

/// Annihilator of the module, as an ideal (used to cross-check Fitting ideals).
pub fn annihilator(p: &FinitePresentation) -> GIdeal {
    let nu = p.nu;
    let n = p.generators;
    let rel = p.relation_lattice();
    let mut ann = Lattice::full(nu);
    for j in 0..n {
        // {x : x e_j in rel}
        let mut rows = Vec::new();
        for k in 0..nu {
            let mut v = vec![BigInt::zero(); nu * n];
            v[j * nu + k] = BigInt::one();
            rows.push(v);
        }
        let stacked = IntMatrix::from_rows(nu * n, rows).vstack(rel.basis());
        let ker = kernel_basis(&stacked);
        let proj: Vec<Vec<BigInt>> = ker.row_vecs().into_iter().map(|r| r[..nu].to_vec()).collect();
        ann = ann.intersect(&Lattice::from_rows(nu, proj));
    }
    GIdeal { nu, lattice: ann }
}

/// Norm of a group-ring polynomial: determinant of the multiplication circulant,
/// an integer polynomial in `u`.
pub fn circulant_norm(f: &ZGPoly) -> Vec<BigInt> {
    let nu = f.nu();
    // entry (i, j) = coefficient of sigma^{j-i} in f, as a polynomial in u
    type P = Vec<BigInt>;
    let entry = |i: usize, j: usize| -> P {
        let k = (j + nu - i) % nu;
        f.coeffs().iter().map(|c| c.coeffs()[k].clone()).collect()
    };
    let m: Vec<Vec<P>> = (0..nu).map(|i| (0..nu).map(|j| entry(i, j)).collect()).collect();
    let add = |a: &P, b: &P| -> P {
        let n = a.len().max(b.len());
        let z = BigInt::zero();
        (0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect()
    };
    let mul = |a: &P, b: &P| -> P {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let neg = |a: &P| -> P { a.iter().map(|x| -x).collect() };
    let n = nu;
    let mut dp: Vec<Option<P>> = vec![None; 1 << n];
    dp[0] = Some(vec![BigInt::one()]);
    for mask in 0usize..(1 << n) {
        let Some(val) = dp[mask].clone() else { continue };
        let i = mask.count_ones() as usize;
        if i == n {
            continue;
        }
        for c in 0..n {
            if mask & (1 << c) != 0 {
                continue;
            }
            let mut term = mul(&val, &m[i][c]);
            if (mask >> (c + 1)).count_ones() % 2 == 1 {
                term = neg(&term);
            }
            let next = mask | (1 << c);
            dp[next] = Some(match &dp[next] {
                None => term,
                Some(x) => add(x, &term),
            });
        }
    }
    let mut out = dp[(1 << n) - 1].clone().unwrap_or_default();
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zg(v: &[i64]) -> ZG {
        ZG::from_i64(v)
    }

    #[test]
    fn idempotents_small() {
        let e = rational_idempotents(2);
        assert_eq!(e[&1], QG::from_ratios(&[(1, 2), (1, 2)]));
        assert_eq!(e[&2], QG::from_ratios(&[(1, 2), (-1, 2)]));
        let e1 = rational_idempotents(1);
        assert_eq!(e1[&1], QG::one(1));
        let e4 = rational_idempotents(4);
        assert_eq!(e4[&4], QG::from_ratios(&[(1, 2), (0, 1), (-1, 2), (0, 1)]));
        assert_eq!(e4[&2], QG::from_ratios(&[(1, 4), (-1, 4), (1, 4), (-1, 4)]));
        assert_eq!(e4[&1], QG::from_ratios(&[(1, 4), (1, 4), (1, 4), (1, 4)]));
    }

    #[test]
    fn eval_hom_examples() {
        let r = IntegersMod(21.into());
        assert_eq!(eval_hom(&zg(&[5, 2]), &BigInt::from(8), &r).unwrap(), BigInt::zero());
        assert_eq!(eval_hom(&zg(&[1, 0]), &BigInt::from(5), &r).unwrap_err(), GroupRingError::OrderViolation { nu: 2 });
        assert_eq!(eval_hom(&zg(&[1, 2]), &BigInt::from(-1), &Integers).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn ideal_examples() {
        let i = GIdeal::from_gens(2, &[zg(&[21, 0]), zg(&[-8, 1])]);
        assert_eq!(i.rows(), vec![vec![BigInt::from(1), BigInt::from(13)], vec![BigInt::zero(), BigInt::from(21)]]);
        assert!(i.member(&zg(&[5, 2]), &PrimeSet::new()).unwrap());
        assert!(!i.member(&zg(&[1, 0]), &PrimeSet::new()).unwrap());
        assert!(i.member(&zg(&[0, 0]), &PrimeSet::new()).unwrap());
        assert_eq!(GIdeal::from_gens(3, &[zg(&[1, 0, 0])]), GIdeal::unit(3));
        assert_eq!(GIdeal::from_gens(3, &[]), GIdeal::zero(3));
        let two = GIdeal::from_gens(2, &[zg(&[2, 0])]);
        let three = GIdeal::from_gens(2, &[zg(&[3, 0])]);
        assert_eq!(two.product(&three), GIdeal::from_gens(2, &[zg(&[6, 0])]));
        let a = GIdeal::from_gens(2, &[zg(&[1, -1])]);
        let b = GIdeal::from_gens(2, &[zg(&[1, 1])]);
        assert_eq!(a.product(&b), GIdeal::zero(2));
    }

    #[test]
    fn component_examples() {
        let r_map: BTreeMap<usize, usize> = [(1, 0), (2, 1)].into_iter().collect();
        assert_eq!(component_lattice(2, &r_map, 0), GIdeal::from_gens(2, &[zg(&[1, 1])]));
        assert_eq!(component_lattice(2, &r_map, 1), GIdeal::from_gens(2, &[zg(&[1, -1])]));
        let flat: BTreeMap<usize, usize> = [(1, 1), (2, 1)].into_iter().collect();
        assert_eq!(component_lattice(2, &flat, 1), GIdeal::unit(2));
    }

    #[test]
    fn fitting_examples() {
        let p = FinitePresentation::new(2, 1, vec![vec![zg(&[21, 0])], vec![zg(&[-8, 1])]]);
        let f = fitting_ideal(&p).unwrap();
        assert_eq!(f, GIdeal::from_gens(2, &[zg(&[21, 0]), zg(&[-8, 1])]));
        let id = FinitePresentation::new(
            2,
            2,
            vec![vec![zg(&[1, 0]), zg(&[0, 0])], vec![zg(&[0, 0]), zg(&[1, 0])]],
        );
        assert_eq!(fitting_ideal(&id).unwrap(), GIdeal::unit(2));
        let free = FinitePresentation::new(2, 1, vec![]);
        assert_eq!(fitting_ideal(&free).unwrap(), GIdeal::zero(2));
        assert_eq!(p.order(), Some(BigInt::from(21)));
    }

    #[test]
    fn divide_examples() {
        let f = ZGPoly::new(2, vec![zg(&[1, 0]), zg(&[0, 0]), zg(&[0, 0]), zg(&[0, -8])]);
        let g = ZGPoly::new(2, vec![zg(&[1, 0]), zg(&[0, -2])]);
        let h = divide_poly(&f, &g).unwrap();
        assert_eq!(h, ZGPoly::new(2, vec![zg(&[1, 0]), zg(&[0, 2]), zg(&[4, 0])]));
        assert_eq!(divide_poly(&f, &ZGPoly::one(2)).unwrap(), f);
        let f1 = ZGPoly::new(1, vec![zg(&[1]), zg(&[0]), zg(&[-1])]);
        let g1 = ZGPoly::new(1, vec![zg(&[1]), zg(&[-2])]);
        assert_eq!(divide_poly(&f1, &g1).unwrap_err(), GroupRingError::NotDivisible);
    }

    #[test]
    fn taylor_expansion() {
        let f = ZGPoly::new(1, vec![zg(&[1]), zg(&[0]), zg(&[-1])]);
        let t = f.taylor_at_one();
        assert_eq!(t, vec![zg(&[0]), zg(&[2]), zg(&[-1])]);
    }

    #[test]
    fn norm_of_i1_theta() {
        let th = ZGPoly::new(2, vec![zg(&[1, 0]), zg(&[0, 2]), zg(&[4, 0])]);
        let n = circulant_norm(&th);
        let expect: Vec<BigInt> = [1, 0, 4, 0, 16].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(n, expect);
    }

    #[test]
    fn cyclotomics() {
        let c = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(cyclotomic(1), c(&[-1, 1]));
        assert_eq!(cyclotomic(4), c(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), c(&[1, -1, 1]));
    }
}
