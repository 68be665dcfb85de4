//! Finite fields `F_p[y]/(h)`, polynomials over them, factorization, and
//! discrete logarithms.
//!
//! Field elements are plain `u64` indices: the element with coordinates
//! `(c_0, ..., c_{n-1})` in the basis `1, y, ..., y^{n-1}` has index
//! `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`. Index order is the total order used
//! whenever a "least" element is chosen.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest field for which multiplication tables are built.
pub const TABLE_CAPACITY: u64 = 1 << 20;
/// Default bound on the group order accepted by [`DlogTable`].
pub const DLOG_CAPACITY: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is not irreducible of the stated degree")]
    NotIrreducible,
    #[error("field of size {size} exceeds capacity {bound}")]
    Capacity { size: u128, bound: u64 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn factor_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A finite field of size `p^degree` with log/antilog tables.
pub struct Field {
    p: u64,
    degree: usize,
    modulus: Vec<u64>,
    size: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.degree, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn raw_mulmod(p: u64, m: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = m.len() - 1;
    let mut prod = vec![0u64; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (n..2 * n).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for j in 0..n {
            // subtract c * m_j * y^(k-n+j)
            prod[k - n + j] = (prod[k - n + j] + (p - c) * m[j]) % p;
        }
    }
    prod.truncate(n);
    prod
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Arc<Field>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Field::build(p, vec![0, 1])
    }

    /// `F_p[y]/(modulus)`; `modulus` ascending and monic.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Arc<Field>, FieldError> {
        let fp = Field::prime(p)?;
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::NotIrreducible);
        }
        if modulus.len() == 2 {
            return Ok(fp);
        }
        if !poly::is_irreducible(&fp, &modulus) {
            return Err(FieldError::NotIrreducible);
        }
        Field::build(p, modulus)
    }

    /// `F_{p^n}` with the least irreducible modulus of degree `n`.
    pub fn least(p: u64, n: usize) -> Result<Arc<Field>, FieldError> {
        let fp = Field::prime(p)?;
        if n == 1 {
            return Ok(fp);
        }
        let size = (p as u128).pow(n as u32);
        if size > TABLE_CAPACITY as u128 {
            return Err(FieldError::Capacity { size, bound: TABLE_CAPACITY });
        }
        let m = least_irreducible(&fp, n);
        Field::build(p, m)
    }

    fn build(p: u64, modulus: Vec<u64>) -> Result<Arc<Field>, FieldError> {
        let degree = modulus.len() - 1;
        let size128 = (p as u128).pow(degree as u32);
        if size128 > TABLE_CAPACITY as u128 {
            return Err(FieldError::Capacity { size: size128, bound: TABLE_CAPACITY });
        }
        let size = size128 as u64;
        let n = (size - 1) as usize;
        let decode = |mut x: u64| -> Vec<u64> {
            let mut v = vec![0u64; degree];
            for c in v.iter_mut() {
                *c = x % p;
                x /= p;
            }
            v
        };
        let encode = |v: &[u64]| -> u64 { v.iter().rev().fold(0u64, |acc, &c| acc * p + c) };
        for g in 1..size {
            let gv = decode(g);
            let mut exp = Vec::with_capacity(n);
            let mut cur = decode(1);
            let mut full = true;
            for i in 0..n {
                let idx = encode(&cur);
                if i > 0 && idx == 1 {
                    full = false;
                    break;
                }
                exp.push(idx as u32);
                cur = raw_mulmod(p, &modulus, &cur, &gv);
            }
            if !full || encode(&cur) != 1 {
                continue;
            }
            let mut log = vec![0u32; size as usize];
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            return Ok(Arc::new(Field { p, degree, modulus, size, exp, log }));
        }
        Err(FieldError::NotIrreducible)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn coords(&self, mut x: u64) -> Vec<u64> {
        let mut v = vec![0u64; self.degree];
        for c in v.iter_mut() {
            *c = x % self.p;
            x /= self.p;
        }
        v
    }

    pub fn from_coords(&self, v: &[u64]) -> u64 {
        v.iter().rev().fold(0u64, |acc, &c| acc * self.p + (c % self.p))
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.size - 1;
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % n;
        self.exp[e as usize] as u64
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        let n = self.size - 1;
        let e = (n - self.log[a as usize] as u64) % n;
        self.exp[e as usize] as u64
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = self.size - 1;
        let k = ((self.log[a as usize] as u128 * e as u128) % n as u128) as u64;
        self.exp[k as usize] as u64
    }

    /// Multiplicative generator fixed by the tables (the least primitive element).
    pub fn generator(&self) -> u64 {
        if self.size == 2 {
            1
        } else {
            self.exp[1] as u64
        }
    }

    /// Discrete log to the base [`Field::generator`].
    pub fn log(&self, a: u64) -> u64 {
        assert!(a != 0, "log of zero");
        self.log[a as usize] as u64
    }

    /// Integer `n` reduced into the prime subfield.
    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
}

fn least_irreducible(fp: &Field, n: usize) -> Vec<u64> {
    let p = fp.characteristic();
    let count = p.pow(n as u32);
    for key in 0..count {
        let mut m = Vec::with_capacity(n + 1);
        let mut k = key;
        for _ in 0..n {
            m.push(k % p);
            k /= p;
        }
        m.push(1);
        if poly::is_irreducible(fp, &m) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// The extension `F_{q^nu}` of a base field together with the embedding of the base.
#[derive(Debug, Clone)]
pub struct Extension {
    pub base: Arc<Field>,
    pub field: Arc<Field>,
    /// `embed[x]` is the image of base element `x`.
    pub embed: Vec<u64>,
    pub nu: usize,
}

/// Builds `F_{q^nu}` over `base` with the least irreducible modulus of degree `a * nu`
/// over `F_p`; the base generator `y` is sent to the least root of its modulus.
pub fn make_extension(base: &Arc<Field>, nu: usize) -> Result<Extension, FieldError> {
    assert!(nu >= 1);
    let p = base.characteristic();
    let field = if nu == 1 { base.clone() } else { Field::least(p, base.degree() * nu)? };
    let embed = if nu == 1 {
        (0..base.size()).collect()
    } else if base.degree() == 1 {
        (0..p).collect()
    } else {
        let h = base.modulus();
        let beta = (0..field.size())
            .find(|&x| poly::eval(&field, h, x) == 0)
            .expect("base modulus splits in the extension");
        let mut powers = vec![1u64];
        for _ in 1..base.degree() {
            let last = *powers.last().unwrap();
            powers.push(field.mul(last, beta));
        }
        (0..base.size())
            .map(|x| {
                base.coords(x)
                    .iter()
                    .zip(&powers)
                    .fold(0, |acc, (&c, &b)| field.add(acc, field.mul(c, b)))
            })
            .collect()
    };
    Ok(Extension { base: base.clone(), field, embed, nu })
}

impl Extension {
    pub fn q(&self) -> u64 {
        self.base.size()
    }

    /// The `q^k`-power map, i.e. the action of `sigma^k`.
    pub fn sigma_pow(&self, x: u64, k: i64) -> u64 {
        let k = k.rem_euclid(self.nu as i64) as u32;
        let e = (self.q() as u128).pow(k) % (self.field.size() as u128 - 1).max(1);
        if x == 0 || x == 1 {
            return x;
        }
        self.field.pow(x, e as u64)
    }

    pub fn embed_poly(&self, f: &[u64]) -> Vec<u64> {
        f.iter().map(|&c| self.embed[c as usize]).collect()
    }
}

/// Dense polynomial arithmetic over a [`Field`]; coefficient vectors are ascending
/// and trimmed (the zero polynomial is empty).
pub mod poly {
    use super::*;

    pub fn trim(mut f: Vec<u64>) -> Vec<u64> {
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    pub fn deg(f: &[u64]) -> Option<usize> {
        f.len().checked_sub(1)
    }

    pub fn add(k: &Field, f: &[u64], g: &[u64]) -> Vec<u64> {
        let n = f.len().max(g.len());
        trim((0..n).map(|i| k.add(*f.get(i).unwrap_or(&0), *g.get(i).unwrap_or(&0))).collect())
    }

    pub fn sub(k: &Field, f: &[u64], g: &[u64]) -> Vec<u64> {
        let n = f.len().max(g.len());
        trim((0..n).map(|i| k.sub(*f.get(i).unwrap_or(&0), *g.get(i).unwrap_or(&0))).collect())
    }

    pub fn scale(k: &Field, f: &[u64], c: u64) -> Vec<u64> {
        trim(f.iter().map(|&x| k.mul(x, c)).collect())
    }

    pub fn mul(k: &Field, f: &[u64], g: &[u64]) -> Vec<u64> {
        if f.is_empty() || g.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; f.len() + g.len() - 1];
        for (i, &a) in f.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in g.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        trim(out)
    }

    pub fn divrem(k: &Field, f: &[u64], g: &[u64]) -> (Vec<u64>, Vec<u64>) {
        assert!(!g.is_empty(), "polynomial division by zero");
        let mut r = f.to_vec();
        if r.len() < g.len() {
            return (Vec::new(), r);
        }
        let dg = g.len() - 1;
        let lead_inv = k.inv(g[dg]);
        let mut q = vec![0u64; r.len() - dg];
        for i in (dg..r.len()).rev() {
            let c = k.mul(r[i], lead_inv);
            if c == 0 {
                continue;
            }
            q[i - dg] = c;
            for j in 0..=dg {
                r[i - dg + j] = k.sub(r[i - dg + j], k.mul(c, g[j]));
            }
        }
        r.truncate(dg);
        (trim(q), trim(r))
    }

    pub fn rem(k: &Field, f: &[u64], g: &[u64]) -> Vec<u64> {
        divrem(k, f, g).1
    }

    pub fn monic(k: &Field, f: &[u64]) -> Vec<u64> {
        match f.last() {
            None => Vec::new(),
            Some(&l) => scale(k, f, k.inv(l)),
        }
    }

    pub fn gcd(k: &Field, f: &[u64], g: &[u64]) -> Vec<u64> {
        let (mut a, mut b) = (f.to_vec(), g.to_vec());
        while !b.is_empty() {
            let r = rem(k, &a, &b);
            a = b;
            b = r;
        }
        monic(k, &a)
    }

    pub fn derivative(k: &Field, f: &[u64]) -> Vec<u64> {
        trim(f.iter().enumerate().skip(1).map(|(i, &c)| k.mul(k.from_int((i as u64 % k.characteristic()) as i64), c)).collect())
    }

    pub fn eval(k: &Field, f: &[u64], x: u64) -> u64 {
        f.iter().rev().fold(0, |acc, &c| k.add(k.mul(acc, x), c))
    }

    pub fn mulmod(k: &Field, f: &[u64], g: &[u64], m: &[u64]) -> Vec<u64> {
        rem(k, &mul(k, f, g), m)
    }

    pub fn powmod(k: &Field, f: &[u64], e: &BigUint, m: &[u64]) -> Vec<u64> {
        let mut result = rem(k, &[1], m);
        let base = rem(k, f, m);
        for i in (0..e.bits()).rev() {
            result = mulmod(k, &result, &result, m);
            if e.bit(i) {
                result = mulmod(k, &result, &base, m);
            }
        }
        result
    }

    /// Rabin-style test: `f` (monic, degree n) is irreducible iff `gcd(f, x^{|k|^i} - x) = 1`
    /// for `i <= n/2`.
    pub fn is_irreducible(k: &Field, f: &[u64]) -> bool {
        let Some(n) = deg(f) else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let q = BigUint::from(k.size());
        let mut h = rem(k, &[0, 1], f);
        for _ in 0..n / 2 {
            h = powmod(k, &h, &q, f);
            if gcd(k, f, &sub(k, &h, &[0, 1])).len() != 1 {
                return false;
            }
        }
        true
    }

    fn pth_root(k: &Field, f: &[u64]) -> Vec<u64> {
        let p = k.characteristic() as usize;
        let e = k.size() / k.characteristic();
        trim(f.iter().step_by(p).map(|&c| k.pow(c, e)).collect())
    }

    /// Square-free decomposition of a monic polynomial: pairwise coprime `(g, m)`.
    pub fn squarefree(k: &Field, f: &[u64]) -> Vec<(Vec<u64>, usize)> {
        let mut out = Vec::new();
        if deg(f).unwrap_or(0) == 0 {
            return out;
        }
        let df = derivative(k, f);
        let mut c = gcd(k, f, &df);
        let mut w = divrem(k, f, &c).0;
        let mut i = 1;
        while w.len() > 1 {
            let y = gcd(k, &w, &c);
            let fac = divrem(k, &w, &y).0;
            if fac.len() > 1 {
                out.push((monic(k, &fac), i));
            }
            w = y;
            c = divrem(k, &c, &w).0;
            i += 1;
        }
        if c.len() > 1 {
            let p = k.characteristic() as usize;
            for (g, m) in squarefree(k, &pth_root(k, &c)) {
                out.push((g, m * p));
            }
        }
        out
    }

    fn ddf(k: &Field, f: &[u64]) -> Vec<(Vec<u64>, usize)> {
        let mut out = Vec::new();
        let mut f = f.to_vec();
        let q = BigUint::from(k.size());
        let mut h = vec![0, 1];
        let mut d = 0;
        while f.len() > 1 && deg(&f).unwrap() >= 2 * (d + 1) {
            d += 1;
            h = powmod(k, &h, &q, &f);
            let g = gcd(k, &f, &sub(k, &h, &[0, 1]));
            if g.len() > 1 {
                f = divrem(k, &f, &g).0;
                h = rem(k, &h, &f);
                out.push((g, d));
            }
        }
        if f.len() > 1 {
            let n = deg(&f).unwrap();
            out.push((monic(k, &f), n));
        }
        out
    }

    fn edf(k: &Field, f: &[u64], d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Vec<u64>>) {
        let n = deg(f).unwrap();
        if n == d {
            out.push(monic(k, f));
            return;
        }
        loop {
            let a: Vec<u64> = trim((0..n).map(|_| rng.gen_range(0..k.size())).collect());
            if a.len() < 2 {
                continue;
            }
            let t = if k.characteristic() == 2 {
                let mut acc = a.clone();
                let mut cur = a.clone();
                let two = BigUint::from(2u32);
                for _ in 1..k.degree() * d {
                    cur = powmod(k, &cur, &two, f);
                    acc = add(k, &acc, &cur);
                }
                acc
            } else {
                let e = (BigUint::from(k.size()).pow(d as u32) - 1u32) / 2u32;
                sub(k, &powmod(k, &a, &e, f), &[1])
            };
            let g = gcd(k, f, &t);
            if g.len() > 1 && g.len() < f.len() {
                let h = divrem(k, f, &g).0;
                edf(k, &g, d, rng, out);
                edf(k, &h, d, rng, out);
                return;
            }
        }
    }

    fn seed_for(k: &Field, f: &[u64]) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |x: u64| {
            h ^= x;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        };
        mix(k.characteristic());
        k.modulus().iter().for_each(|&c| mix(c));
        mix(u64::MAX);
        f.iter().for_each(|&c| mix(c));
        h
    }

    /// Canonical order on monic polynomials: degree first, then coefficients read
    /// from the top non-leading one down (the integer key `sum idx(c_i) |k|^i`).
    pub fn canonical_cmp(f: &[u64], g: &[u64]) -> Ordering {
        f.len().cmp(&g.len()).then_with(|| f.iter().rev().cmp(g.iter().rev()))
    }

    /// Full factorization of a monic polynomial of positive degree into monic
    /// irreducibles with multiplicities, in canonical order.
    pub fn factor(k: &Field, f: &[u64]) -> Vec<(Vec<u64>, usize)> {
        let f = monic(k, f);
        assert!(f.len() >= 2, "factor of a constant");
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(k, &f));
        let mut out = Vec::new();
        for (g, m) in squarefree(k, &f) {
            for (h, d) in ddf(k, &g) {
                let mut pieces = Vec::new();
                edf(k, &h, d, &mut rng, &mut pieces);
                out.extend(pieces.into_iter().map(|p| (p, m)));
            }
        }
        out.sort_by(|a, b| canonical_cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
        let mut merged: Vec<(Vec<u64>, usize)> = Vec::new();
        for (g, m) in out {
            match merged.last_mut() {
                Some(last) if last.0 == g => last.1 += m,
                _ => merged.push((g, m)),
            }
        }
        merged
    }
}

/// Anything with a finite multiplicative group encoded by `u64` indices (`1` is the identity).
pub trait FiniteMulGroup {
    /// Number of field elements; the unit group has order `size - 1`.
    fn size(&self) -> u64;
    fn mul(&self, a: u64, b: u64) -> u64;

    fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn order_of(&self, a: u64) -> u64 {
        let n = self.size() - 1;
        let mut ord = n;
        for l in factor_u64(n) {
            while ord.is_multiple_of(l) && self.pow(a, ord / l) == 1 {
                ord /= l;
            }
        }
        ord
    }

    /// Least element (by index) of multiplicative order `size - 1`.
    fn primitive_element(&self) -> u64 {
        let n = self.size() - 1;
        let primes = factor_u64(n);
        (1..self.size())
            .find(|&g| primes.iter().all(|&l| self.pow(g, n / l) != 1))
            .expect("finite fields have cyclic unit groups")
    }
}

impl FiniteMulGroup for Field {
    fn size(&self) -> u64 {
        self.size
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        Field::mul(self, a, b)
    }

    fn pow(&self, a: u64, e: u64) -> u64 {
        Field::pow(self, a, e)
    }
}

/// Residue field `F[t]/(P)` for a monic irreducible `P` over a table field `F`.
/// Elements are encoded as `sum c_i |F|^i` with `c_i` indices in `F`.
#[derive(Debug, Clone)]
pub struct ResidueField {
    base: Arc<Field>,
    modulus: Vec<u64>,
    size: u64,
}

impl ResidueField {
    pub fn new(base: Arc<Field>, modulus: Vec<u64>) -> Result<Self, FieldError> {
        let d = modulus.len() - 1;
        let size = (base.size() as u128).pow(d as u32);
        if size > u64::MAX as u128 / 2 {
            return Err(FieldError::Capacity { size, bound: u64::MAX / 2 });
        }
        Ok(ResidueField { base, modulus, size: size as u64 })
    }

    pub fn base(&self) -> &Arc<Field> {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn encode(&self, f: &[u64]) -> u64 {
        let r = poly::rem(&self.base, f, &self.modulus);
        r.iter().rev().fold(0, |acc, &c| acc * self.base.size() + c)
    }

    pub fn decode(&self, mut x: u64) -> Vec<u64> {
        let q = self.base.size();
        let mut v = Vec::with_capacity(self.degree());
        for _ in 0..self.degree() {
            v.push(x % q);
            x /= q;
        }
        poly::trim(v)
    }
}

impl FiniteMulGroup for ResidueField {
    fn size(&self) -> u64 {
        self.size
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.degree() == 1 {
            return self.base.mul(a, b);
        }
        let f = poly::mul(&self.base, &self.decode(a), &self.decode(b));
        self.encode(&f)
    }
}

/// Baby-step/giant-step table for logarithms to a fixed generator.
#[derive(Debug, Clone)]
pub struct DlogTable {
    g: u64,
    n: u64,
    m: u64,
    baby: HashMap<u64, u64>,
    giant: u64,
}

impl DlogTable {
    pub fn new<F: FiniteMulGroup + ?Sized>(field: &F, g: u64, capacity: u64) -> Result<Self, FieldError> {
        let n = field.size() - 1;
        if n + 1 > capacity {
            return Err(FieldError::Capacity { size: n as u128 + 1, bound: capacity });
        }
        let m = ((n as f64).sqrt().ceil() as u64).max(1);
        let mut baby = HashMap::with_capacity(m as usize);
        let mut cur = 1u64;
        for j in 0..m {
            baby.entry(cur).or_insert(j);
            cur = field.mul(cur, g);
        }
        // g^{-m} = g^{n - m mod n}
        let giant = field.pow(g, (n - m % n) % n);
        Ok(DlogTable { g, n, m, baby, giant })
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Least `e >= 0` with `g^e = x`.
    pub fn dlog<F: FiniteMulGroup + ?Sized>(&self, field: &F, x: u64) -> Option<u64> {
        assert!(x != 0, "log of zero");
        let mut y = x;
        for i in 0..=self.n / self.m {
            if let Some(&j) = self.baby.get(&y) {
                return Some((i * self.m + j) % self.n.max(1));
            }
            y = field.mul(y, self.giant);
        }
        None
    }
}

/// One-shot discrete logarithm with the default capacity.
pub fn dlog<F: FiniteMulGroup + ?Sized>(field: &F, x: u64, g: u64) -> Result<u64, FieldError> {
    let t = DlogTable::new(field, g, DLOG_CAPACITY)?;
    Ok(t.dlog(field, x).expect("generator spans the unit group"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<Field> {
        Field::prime(2).unwrap()
    }

    #[test]
    fn extension_moduli_are_least() {
        let e = make_extension(&f2(), 2).unwrap();
        assert_eq!(e.field.modulus(), &[1, 1, 1]);
        let e1 = make_extension(&f2(), 1).unwrap();
        assert_eq!(e1.field.size(), 2);
        let f9 = make_extension(&Field::prime(3).unwrap(), 2).unwrap();
        assert_eq!(f9.field.modulus(), &[1, 0, 1]);
        let f16 = Field::least(2, 4).unwrap();
        assert_eq!(f16.modulus(), &[1, 1, 0, 0, 1]);
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let f4 = Field::with_modulus(2, vec![1, 1, 1]).unwrap();
        let e = make_extension(&f4, 2).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(e.embed[f4.mul(a, b) as usize], e.field.mul(e.embed[a as usize], e.embed[b as usize]));
                assert_eq!(e.embed[f4.add(a, b) as usize], e.field.add(e.embed[a as usize], e.embed[b as usize]));
            }
        }
    }

    #[test]
    fn factor_over_f4() {
        let e = make_extension(&f2(), 2).unwrap();
        let k = &e.field;
        // omega is y with index 2; omega^2 = omega + 1 has index 3
        let fs = poly::factor(k, &[1, 1, 1]);
        assert_eq!(fs, vec![(vec![2, 1], 1), (vec![3, 1], 1)]);
        assert_eq!(poly::factor(k, &[0, 1]), vec![(vec![0, 1], 1)]);
        assert_eq!(poly::factor(k, &[1, 1, 0, 1]).len(), 1);
    }

    #[test]
    fn factor_with_multiplicity() {
        let k = Field::prime(3).unwrap();
        // (x+1)^3 (x^2+1) over F_3
        let a = poly::mul(&k, &[1, 1], &poly::mul(&k, &[1, 1], &[1, 1]));
        let f = poly::mul(&k, &a, &[1, 0, 1]);
        assert_eq!(poly::factor(&k, &f), vec![(vec![1, 1], 3), (vec![1, 0, 1], 1)]);
    }

    #[test]
    fn primitive_elements_and_logs() {
        let f2 = f2();
        assert_eq!(f2.primitive_element(), 1);
        let f4 = Field::least(2, 2).unwrap();
        assert_eq!(FiniteMulGroup::primitive_element(&*f4), 2);
        let w = 2;
        assert_eq!(dlog(&*f4, f4.mul(w, w), w).unwrap(), 2);
        assert_eq!(dlog(&*f4, 1, w).unwrap(), 0);
        let f8 = Field::least(2, 3).unwrap();
        let g = FiniteMulGroup::primitive_element(&*f8);
        assert_eq!(f8.order_of(g), 7);
        assert_eq!(dlog(&*f8, f8.pow(g, 5), g).unwrap(), 5);
    }

    #[test]
    fn residue_field_logs() {
        let f4 = Field::least(2, 2).unwrap();
        let r = ResidueField::new(f4.clone(), vec![1, 1, 0, 1]).unwrap();
        assert_eq!(r.size(), 64);
        let g = r.primitive_element();
        assert_eq!(r.order_of(g), 63);
        let t = DlogTable::new(&r, g, DLOG_CAPACITY).unwrap();
        for e in [0u64, 1, 17, 62] {
            assert_eq!(t.dlog(&r, r.pow(g, e)), Some(e));
        }
        assert!(matches!(DlogTable::new(&r, g, 10), Err(FieldError::Capacity { .. })));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Field::prime(4).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(Field::with_modulus(2, vec![1, 0, 1]).unwrap_err(), FieldError::NotIrreducible);
    }
}
