//! Stickelberger functions of constant field extensions: the closed form of
//! `Theta_{S,T}(u)`, Euler products, vanishing orders, Taylor data at `u = 1`,
//! and the zeta function of `K` with its group-ring norm identity.
//!
//! Convention: `u = q^{-s}`, so `s = 0` is `u = 1` and derivatives at `s = 0`
//! are represented by coefficients of the expansion in powers of `1 - u`.
//! Applying a character `sigma -> zeta` to `Theta` yields the `L`-function of the
//! inverse character.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ffield::{make_extension, Extension, Field, FieldError};
use crate::grpring::{circulant_norm, divide_poly, divisors, rational_idempotents, GroupRingError, ZGPoly, ZG};
use crate::places::{enumerate_places, places_above, split_data, Place, SplitData};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LfuncError {
    #[error("component d={d} has nonzero Taylor coefficient a_{j} below the requested order")]
    OrderMismatch { d: usize, j: usize },
    #[error("operation needs genus 0 (curve numerator 1)")]
    GenusUnsupported,
    #[error("closed-form division was not exact")]
    NotExact,
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<GroupRingError> for LfuncError {
    fn from(_: GroupRingError) -> Self {
        LfuncError::NotExact
    }
}

/// A constant field extension together with the sets `S`, `T`, the order `r`
/// and the numerator `P(u)` of the base curve's zeta function.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub ext: Extension,
    pub s: Vec<Place>,
    pub t: Vec<Place>,
    pub r: usize,
    pub curve_numerator: Vec<BigInt>,
}

impl Scenario {
    pub fn new(
        base: &Arc<Field>,
        nu: usize,
        mut s: Vec<Place>,
        mut t: Vec<Place>,
        r: usize,
        curve_numerator: Vec<BigInt>,
    ) -> Result<Self, LfuncError> {
        if nu == 0 {
            return Err(LfuncError::Invalid("nu must be positive".into()));
        }
        if s.is_empty() || t.is_empty() {
            return Err(LfuncError::Invalid("S and T must be nonempty".into()));
        }
        s.sort();
        s.dedup();
        t.sort();
        t.dedup();
        if s.iter().any(|v| t.contains(v)) {
            return Err(LfuncError::Invalid("S and T overlap".into()));
        }
        let mut p = curve_numerator;
        while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        if p.is_empty() || !p[0].is_one() || !(p.len() - 1).is_multiple_of(2) {
            return Err(LfuncError::Invalid("curve numerator needs P(0) = 1 and even degree".into()));
        }
        let ext = make_extension(base, nu)?;
        Ok(Scenario { ext, s, t, r, curve_numerator: p })
    }

    pub fn nu(&self) -> usize {
        self.ext.nu
    }

    pub fn q(&self) -> u64 {
        self.ext.q()
    }

    pub fn genus(&self) -> usize {
        (self.curve_numerator.len() - 1) / 2
    }

    pub fn split(&self, v: &Place) -> SplitData {
        split_data(v.degree(), self.nu())
    }

    /// Whether `(S, T, r)` satisfies the admissibility hypotheses: `|S| >= r + 1` and
    /// at least `r` places of `S` split completely.
    pub fn hypotheses_hold(&self) -> bool {
        let split = self.s.iter().filter(|v| v.degree() % self.nu() == 0).count();
        self.s.len() > self.r && split >= self.r
    }

    /// Places of `K` above `S`, grouped by base place, each fiber in canonical order.
    pub fn s_k(&self) -> Vec<(Place, Vec<Place>)> {
        self.s.iter().map(|v| (v.clone(), places_above(&self.ext, v))).collect()
    }

    pub fn t_k(&self) -> Vec<(Place, Vec<Place>)> {
        self.t.iter().map(|v| (v.clone(), places_above(&self.ext, v))).collect()
    }

    /// Whether the numerator passes the functional-equation symmetry
    /// `c_{2g-i} = q^{g-i} c_i`; failure is a warning only.
    pub fn numerator_symmetric(&self) -> bool {
        let g = self.genus();
        let q = BigInt::from(self.q());
        (0..=2 * g).all(|i| {
            let lhs = &self.curve_numerator[2 * g - i];
            let e = g as i64 - i as i64;
            if e >= 0 {
                *lhs == &self.curve_numerator[i] * q.pow(e as u32)
            } else {
                lhs * q.pow((-e) as u32) == self.curve_numerator[i]
            }
        })
    }
}

/// `r_1 = |S| - 1` and `r_d = #{v in S : d | d_v}` for `d > 1`.
pub fn vanishing_orders(s_degrees: &[usize], nu: usize) -> BTreeMap<usize, usize> {
    divisors(nu)
        .into_iter()
        .map(|d| {
            let r = if d == 1 { s_degrees.len() - 1 } else { s_degrees.iter().filter(|&&dv| dv % d == 0).count() };
            (d, r)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ThetaData {
    pub theta: ZGPoly,
    /// `a_j` with `Theta = sum_j a_j (1 - u)^j`.
    pub taylor: Vec<ZG>,
    pub r_map: BTreeMap<usize, usize>,
}

/// `1 - c x^d u^d` as a group-ring polynomial, `x` a group-ring element.
fn one_minus(nu: usize, x: &ZG, c: &BigInt, d: usize) -> ZGPoly {
    let mut coeffs = vec![ZG::zero(nu); d + 1];
    coeffs[0] = ZG::one(nu);
    coeffs[d] = -&x.pow(d as u32).scale(c);
    ZGPoly::new(nu, coeffs)
}

/// Closed form of `Theta_{S,T}(u)`.
pub fn theta_st(sc: &Scenario) -> Result<ThetaData, LfuncError> {
    let nu = sc.nu();
    let x = ZG::sigma_pow(nu, -1);
    let q = BigInt::from(sc.q());
    let one = BigInt::one();
    let mut s_num = ZGPoly::one(nu);
    for v in &sc.s {
        s_num = s_num.mul(&one_minus(nu, &x, &one, v.degree()));
    }
    let s_part = divide_poly(&s_num, &one_minus(nu, &x, &one, 1))?;
    let mut t_num = ZGPoly::one(nu);
    for v in &sc.t {
        t_num = t_num.mul(&one_minus(nu, &x, &q.pow(v.degree() as u32), v.degree()));
    }
    let t_part = divide_poly(&t_num, &one_minus(nu, &x, &q, 1))?;
    let p_part = ZGPoly::substitute(nu, &sc.curve_numerator, &x);
    let theta = s_part.mul(&t_part).mul(&p_part);
    let expected_degree: usize =
        sc.s.iter().chain(&sc.t).map(Place::degree).sum::<usize>() - 2 + (sc.curve_numerator.len() - 1);
    if theta.degree() != Some(expected_degree) {
        return Err(LfuncError::NotExact);
    }
    let taylor = theta.taylor_at_one();
    let degs: Vec<usize> = sc.s.iter().map(Place::degree).collect();
    Ok(ThetaData { theta, taylor, r_map: vanishing_orders(&degs, nu) })
}

/// Inverse of `1 - a u^d` modulo `u^{n+1}`.
fn geometric(nu: usize, a: &ZG, d: usize, n: usize) -> ZGPoly {
    let mut coeffs = vec![ZG::zero(nu); n + 1];
    let mut pw = ZG::one(nu);
    let mut k = 0;
    while k * d <= n {
        coeffs[k * d] = pw.clone();
        pw = &pw * a;
        k += 1;
    }
    ZGPoly::new(nu, coeffs)
}

/// Euler product `prod_v (1 - sigma^{-d_v} u^{d_v})^{-1}` over all places of
/// degree `<= n`, modulo `u^{n+1}`.
pub fn euler_product(sc: &Scenario, n: usize) -> Result<ZGPoly, LfuncError> {
    if sc.genus() > 0 {
        return Err(LfuncError::GenusUnsupported);
    }
    let nu = sc.nu();
    let mut z = ZGPoly::one(nu);
    for (&d, &count) in place_counts(&sc.ext.base, n).iter() {
        let g = geometric(nu, &ZG::sigma_pow(nu, -(d as i64)), d, n);
        z = z.mul_trunc(&pow_trunc(&g, count, n), n);
    }
    Ok(z)
}

type CountKey = (u64, Vec<u64>, usize);
type CountCache = Mutex<HashMap<CountKey, Arc<BTreeMap<usize, usize>>>>;

/// Number of places of each degree `<= n`, by enumeration (memoized per field and `n`).
fn place_counts(field: &Field, n: usize) -> Arc<BTreeMap<usize, usize>> {
    static CACHE: OnceLock<CountCache> = OnceLock::new();
    let key = (field.characteristic(), field.modulus().to_vec(), n);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("cache lock").get(&key) {
        return c.clone();
    }
    let mut counts = BTreeMap::new();
    for v in enumerate_places(field, n) {
        *counts.entry(v.degree()).or_insert(0) += 1;
    }
    let counts = Arc::new(counts);
    cache.lock().expect("cache lock").insert(key, counts.clone());
    counts
}

fn pow_trunc(g: &ZGPoly, mut e: usize, n: usize) -> ZGPoly {
    let mut acc = ZGPoly::one(g.nu());
    let mut base = g.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_trunc(&base, n);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul_trunc(&base, n);
        }
    }
    acc
}

/// Euler product with the `S`-factors removed and the `T`-factors applied, mod `u^{n+1}`.
pub fn euler_truncate(sc: &Scenario, n: usize) -> Result<ZGPoly, LfuncError> {
    let nu = sc.nu();
    let mut z = euler_product(sc, n)?;
    let one = BigInt::one();
    let q = BigInt::from(sc.q());
    for v in &sc.s {
        let d = v.degree();
        z = z.mul_trunc(&one_minus(nu, &ZG::sigma_pow(nu, -1), &one, d), n);
    }
    for v in &sc.t {
        let d = v.degree();
        z = z.mul_trunc(&one_minus(nu, &ZG::sigma_pow(nu, -1), &q.pow(d as u32), d), n);
    }
    Ok(z)
}

/// The normalized leading term `a_r`, after checking that every component vanishes
/// to the order it should and that no component vanishes to order below `r`.
pub fn leading_term(td: &ThetaData, r: usize) -> Result<ZG, LfuncError> {
    let nu = td.theta.nu();
    let idem = rational_idempotents(nu);
    let coeff = |j: usize| td.taylor.get(j).cloned().unwrap_or_else(|| ZG::zero(nu));
    for (&d, e) in &idem {
        let bound = td.r_map[&d].max(r);
        for j in 0..bound {
            if !(e * &coeff(j).to_rational()).is_zero() {
                return Err(LfuncError::OrderMismatch { d, j });
            }
        }
    }
    Ok(coeff(r))
}

/// Checks `e_d a_j = 0` for `j < r_d`.
pub fn vanishing_holds(td: &ThetaData) -> bool {
    let nu = td.theta.nu();
    let idem = rational_idempotents(nu);
    idem.iter().all(|(d, e)| {
        (0..td.r_map[d]).all(|j| {
            let a = td.taylor.get(j).cloned().unwrap_or_else(|| ZG::zero(nu));
            (e * &a.to_rational()).is_zero()
        })
    })
}

fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(prod_i (1 - c_i U^{d_i})) / (1 - c U)` for integer data, exact.
fn int_closed_form(factors: &[(BigInt, usize)], c: &BigInt) -> Result<Vec<BigInt>, LfuncError> {
    let mut num = vec![BigInt::one()];
    for (ci, di) in factors {
        let mut f = vec![BigInt::zero(); di + 1];
        f[0] = BigInt::one();
        f[*di] = -ci;
        num = int_poly_mul(&num, &f);
    }
    // divide by 1 - cU: h_s = f_s + c h_{s-1}
    let n = num.len();
    let mut h = vec![BigInt::zero(); n - 1];
    let mut prev = BigInt::zero();
    for s in 0..n - 1 {
        let v = &num[s] + c * &prev;
        h[s] = v.clone();
        prev = v;
    }
    if num[n - 1] != (-(c * &prev)) {
        return Err(LfuncError::NotExact);
    }
    while h.len() > 1 && h.last().is_some_and(Zero::is_zero) {
        h.pop();
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct ZetaData {
    /// `zeta_{K,S,T}` as a polynomial in `U = Q^{-s}`, `Q = q^nu`.
    pub poly: Vec<BigInt>,
    pub value_at_one: BigInt,
    /// `N(Theta)(u)`, which should equal `zeta_{K,S,T}(u^nu)`.
    pub norm: Vec<BigInt>,
    pub norm_matches: bool,
}

/// `zeta_{K,S,T}` by the closed form over `K`, with the group-ring norm cross-check.
pub fn zeta_kst(sc: &Scenario, td: &ThetaData) -> Result<ZetaData, LfuncError> {
    if sc.genus() > 0 {
        return Err(LfuncError::GenusUnsupported);
    }
    let nu = sc.nu();
    let big_q = BigInt::from(sc.q()).pow(nu as u32);
    let mut s_f = Vec::new();
    for v in &sc.s {
        let sd = sc.split(v);
        for _ in 0..sd.r_v {
            s_f.push((BigInt::one(), sd.d_w));
        }
    }
    let s_part = int_closed_form(&s_f, &BigInt::one())?;
    let mut t_f = Vec::new();
    for v in &sc.t {
        let sd = sc.split(v);
        for _ in 0..sd.r_v {
            t_f.push((big_q.pow(sd.d_w as u32), sd.d_w));
        }
    }
    let t_part = int_closed_form(&t_f, &big_q)?;
    let mut poly = int_poly_mul(&s_part, &t_part);
    while poly.len() > 1 && poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    let value_at_one = poly.iter().fold(BigInt::zero(), |a, b| a + b);
    let norm = circulant_norm(&td.theta);
    let mut spread = vec![BigInt::zero(); (poly.len() - 1) * nu + 1];
    for (i, c) in poly.iter().enumerate() {
        spread[i * nu] = c.clone();
    }
    while spread.len() > 1 && spread.last().is_some_and(Zero::is_zero) {
        spread.pop();
    }
    let norm_matches = norm == spread;
    Ok(ZetaData { poly, value_at_one, norm, norm_matches })
}

/// Coefficients `b_j` of `f(u) = sum_j b_j (1 - u)^j` for an integer polynomial.
pub fn int_taylor_at_one(f: &[BigInt]) -> Vec<BigInt> {
    let p = ZGPoly::new(1, f.iter().map(|c| ZG::scalar(1, c.clone())).collect());
    let mut out: Vec<BigInt> = p.taylor_at_one().into_iter().map(|x| x.coeffs()[0].clone()).collect();
    if out.is_empty() {
        out.push(BigInt::zero());
    }
    out
}

/// Checks `P(sigma^{-1} u) = Z(u) (1 - sigma^{-1} u)(1 - q sigma^{-1} u)` to order `n`,
/// with `Z` the Euler product over the places of the projective line in genus 0 and the
/// formal closed form otherwise.
pub fn check_factorization(sc: &Scenario, n: usize) -> Result<bool, LfuncError> {
    let nu = sc.nu();
    let x = ZG::sigma_pow(nu, -1);
    let q = BigInt::from(sc.q());
    let p0 = one_minus(nu, &x, &BigInt::one(), 1);
    let p2 = one_minus(nu, &x, &q, 1);
    let p1 = ZGPoly::substitute(nu, &sc.curve_numerator, &x);
    let z = if sc.genus() == 0 {
        euler_product(sc, n)?
    } else {
        let inv0 = geometric(nu, &x, 1, n);
        let inv2 = geometric(nu, &x.scale(&q), 1, n);
        p1.mul_trunc(&inv0, n).mul_trunc(&inv2, n)
    };
    let lhs = z.mul_trunc(&p0, n).mul_trunc(&p2, n);
    Ok(lhs == p1.truncate(n))
}
