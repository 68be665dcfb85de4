//! Places of `k = F_q(t)` and `K = F_{q^nu}(t)`, their splitting in `K/k`, the
//! Galois action, and valuations of functions kept in factored form.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::ffield::{poly, Extension, Field, FiniteMulGroup, ResidueField};

/// A place of a rational function field: `∞` or a monic irreducible polynomial
/// (coefficients ascending, as field indices).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Place {
    Infinite,
    Finite(Vec<u64>),
}

impl Place {
    pub fn degree(&self) -> usize {
        match self {
            Place::Infinite => 1,
            Place::Finite(f) => f.len() - 1,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite)
    }

    pub fn poly(&self) -> Option<&[u64]> {
        match self {
            Place::Infinite => None,
            Place::Finite(f) => Some(f),
        }
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| match (self, other) {
            (Place::Infinite, Place::Infinite) => Ordering::Equal,
            (Place::Infinite, _) => Ordering::Less,
            (_, Place::Infinite) => Ordering::Greater,
            (Place::Finite(a), Place::Finite(b)) => poly::canonical_cmp(a, b),
        })
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All places of degree `<= max_degree` over `field`, in canonical order.
pub fn enumerate_places(field: &Field, max_degree: usize) -> Vec<Place> {
    let mut out = Vec::new();
    if max_degree == 0 {
        return out;
    }
    out.push(Place::Infinite);
    let q = field.size();
    for d in 1..=max_degree {
        let count = q.checked_pow(d as u32).expect("enumeration beyond u64");
        for key in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut k = key;
            for _ in 0..d {
                f.push(k % q);
                k /= q;
            }
            f.push(1);
            if poly::is_irreducible(field, &f) {
                out.push(Place::Finite(f));
            }
        }
    }
    out
}

/// Number of monic irreducibles of degree `d` over `F_q` (necklace count).
pub fn irreducible_count(q: u64, d: usize) -> u64 {
    let mut total: i128 = 0;
    for e in 1..=d {
        if d.is_multiple_of(e) {
            total += mobius(d / e) as i128 * (q as i128).pow(e as u32);
        }
    }
    (total / d as i128) as u64
}

pub fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Splitting of a base place of degree `d_v` in the degree-`nu` constant extension.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SplitData {
    pub r_v: usize,
    pub d_w: usize,
    /// `sigma_v = sigma^frob_exponent`.
    pub frob_exponent: usize,
}

pub fn split_data(d_v: usize, nu: usize) -> SplitData {
    let r_v = num_integer::gcd(d_v, nu);
    SplitData { r_v, d_w: d_v / r_v, frob_exponent: d_v % nu }
}

/// Places of `K` above a base place, in canonical order.
pub fn places_above(ext: &Extension, v: &Place) -> Vec<Place> {
    match v {
        Place::Infinite => vec![Place::Infinite],
        Place::Finite(f) => {
            let g = ext.embed_poly(f);
            poly::factor(&ext.field, &g).into_iter().map(|(h, _)| Place::Finite(h)).collect()
        }
    }
}

/// `w^{sigma^k}`: coefficients raised to the `q^k` power.
pub fn galois_act_place(ext: &Extension, k: i64, w: &Place) -> Place {
    match w {
        Place::Infinite => Place::Infinite,
        Place::Finite(f) => Place::Finite(f.iter().map(|&c| ext.sigma_pow(c, k)).collect()),
    }
}

/// A nonzero function of `K` as `constant * prod P^e` over monic irreducibles.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FactoredFunction {
    pub constant: u64,
    pub factors: BTreeMap<Place, i64>,
}

impl FactoredFunction {
    pub fn constant(c: u64) -> Self {
        assert!(c != 0, "zero is not a unit");
        FactoredFunction { constant: c, factors: BTreeMap::new() }
    }

    pub fn from_parts(constant: u64, factors: impl IntoIterator<Item = (Place, i64)>) -> Self {
        let mut f = FactoredFunction::constant(constant);
        for (p, e) in factors {
            assert!(!p.is_infinite(), "factored functions list finite places only");
            *f.factors.entry(p).or_insert(0) += e;
        }
        f.factors.retain(|_, e| *e != 0);
        f
    }

    /// Polynomial degree (numerator minus denominator).
    pub fn degree(&self) -> i64 {
        self.factors.iter().map(|(p, e)| p.degree() as i64 * e).sum()
    }

    pub fn mul(&self, other: &Self, field: &Field) -> Self {
        let mut out = self.clone();
        out.constant = field.mul(self.constant, other.constant);
        for (p, e) in &other.factors {
            *out.factors.entry(p.clone()).or_insert(0) += e;
        }
        out.factors.retain(|_, e| *e != 0);
        out
    }

    pub fn pow(&self, e: i64, field: &Field) -> Self {
        let n = field.size() as i64 - 1;
        let c = field.pow(self.constant, e.rem_euclid(n.max(1)) as u64);
        FactoredFunction { constant: c, factors: self.factors.iter().map(|(p, x)| (p.clone(), x * e)).filter(|(_, x)| *x != 0).collect() }
    }

    /// `sigma^k` applied to the function.
    pub fn galois(&self, ext: &Extension, k: i64) -> Self {
        FactoredFunction {
            constant: ext.sigma_pow(self.constant, k),
            factors: self.factors.iter().map(|(p, e)| (galois_act_place(ext, k, p), *e)).collect(),
        }
    }

    pub fn ord(&self, w: &Place) -> i64 {
        match w {
            Place::Infinite => -self.degree(),
            Place::Finite(_) => *self.factors.get(w).unwrap_or(&0),
        }
    }

    /// Residue at a finite place of order zero, encoded in the residue field of `w`.
    pub fn residue_in(&self, rf: &ResidueField) -> u64 {
        let n = rf.size() - 1;
        let mut acc = rf.encode(&[self.constant]);
        for (p, e) in &self.factors {
            let f = p.poly().unwrap();
            let r = rf.encode(f);
            assert!(r != 0, "residue requested at a place in the support");
            acc = rf.mul(acc, rf.pow(r, e.rem_euclid(n as i64) as u64));
        }
        acc
    }
}

/// Order of `f` at `w`, and the residue when the order is zero. The residue at a
/// finite place is returned as a polynomial over the constant field reduced
/// modulo `w`; at `∞` it is the leading constant.
pub fn ord_and_residue(field: &std::sync::Arc<Field>, f: &FactoredFunction, w: &Place) -> (i64, Option<Vec<u64>>) {
    let o = f.ord(w);
    if o != 0 {
        return (o, None);
    }
    match w {
        Place::Infinite => (0, Some(vec![f.constant])),
        Place::Finite(m) => {
            let rf = ResidueField::new(field.clone(), m.clone()).expect("residue field within capacity");
            let r = f.residue_in(&rf);
            (0, Some(rf.decode(r)))
        }
    }
}

/// Multiplicity `r_d` of each rational character class (exact order `d | nu`) in
/// `Q ⊗ X_S`, from fixed-point counts of `sigma^k` on `S_K`: the character of
/// `⊕ Z w` minus the trivial character, paired against Ramanujan sums.
pub fn character_multiplicities(ext: &Extension, s_k: &[Place]) -> BTreeMap<usize, usize> {
    let nu = ext.nu;
    let fixed: Vec<i64> = (0..nu)
        .map(|k| s_k.iter().filter(|w| galois_act_place(ext, k as i64, w) == **w).count() as i64 - 1)
        .collect();
    let mut out = BTreeMap::new();
    for d in (1..=nu).filter(|d| nu.is_multiple_of(*d)) {
        let phi = (1..=d).filter(|k| num_integer::gcd(*k, d) == 1).count() as i64;
        let total: i64 = (0..nu).map(|k| ramanujan_sum(d, k) * fixed[k]).sum();
        let denom = nu as i64 * phi;
        assert_eq!(total % denom, 0, "character pairing must be integral");
        out.insert(d, (total / denom) as usize);
    }
    out
}

/// `c_d(k)`: sum of the primitive `d`-th roots of unity raised to the `k`-th power.
pub fn ramanujan_sum(d: usize, k: usize) -> i64 {
    let g = num_integer::gcd(d, k);
    let m = d / g;
    let phi = |n: usize| (1..=n).filter(|j| num_integer::gcd(*j, n) == 1).count() as i64;
    mobius(m) * phi(d) / phi(m)
}
