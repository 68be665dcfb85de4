//! Executable algebraic laws shared by the randomized property suites.
//!
//! Each function builds its objects from plain data and returns whether the law
//! holds, so that callers can drive them from any random source.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::ffield::{poly, Extension};
use crate::grpring::{
    annihilator, divide_poly, fitting_ideal, fitting_ideal_direct, reduce_presentation, FinitePresentation, ZGPoly, ZG,
};
use crate::places::{FactoredFunction, Place};
use crate::zlinalg::{hnf, hnf_only, kernel_basis, snf, IntMatrix, Lattice, PrimeSet};

/// Fitting ideal equals annihilator for the cyclic module `Z[G]/(gens, n)`.
pub fn fitting_equals_annihilator_cyclic(nu: usize, n: i64, gens: &[ZG]) -> bool {
    let mut rels = vec![vec![ZG::scalar(nu, BigInt::from(n))]];
    rels.extend(gens.iter().map(|g| vec![g.clone()]));
    let p = FinitePresentation::new(nu, 1, rels);
    match fitting_ideal(&p) {
        Ok(f) => f == annihilator(&p),
        Err(_) => false,
    }
}

/// The submodule generated by the first generator of a two-generator module, as a
/// cyclic presentation.
fn first_generator_submodule(p: &FinitePresentation) -> FinitePresentation {
    let nu = p.nu;
    let dim = nu * p.generators;
    let rows: Vec<Vec<BigInt>> = (0..nu)
        .map(|k| {
            let mut v = vec![BigInt::zero(); dim];
            v[k] = BigInt::one();
            v
        })
        .collect();
    let stacked = IntMatrix::from_rows(dim, rows).vstack(p.relation_lattice().basis());
    let ker = kernel_basis(&stacked);
    let ideal = Lattice::from_rows(nu, ker.row_vecs().into_iter().map(|r| r[..nu].to_vec()).collect());
    let rels = ideal.basis().row_vecs().into_iter().map(|r| vec![ZG::from_coeffs(r)]).collect();
    FinitePresentation::new(nu, 1, rels)
}

/// For `M = Z[G]^2 / ((n1, 0), (f, 0), (g, h), (0, n2))`, `M'` generated by the first
/// generator and `M'' = M / M'`, returns whether
/// `Fitt(M')Fitt(M'') ⊆ Fitt(M) ⊆ Fitt(M'')` and whether `Fitt(M) ⊆ Fitt(M')`.
pub fn fitting_extension_laws(nu: usize, n1: i64, f: &ZG, g: &ZG, h: &ZG, n2: i64) -> (bool, bool) {
    let z = ZG::zero(nu);
    let m = FinitePresentation::new(
        nu,
        2,
        vec![
            vec![ZG::scalar(nu, BigInt::from(n1)), z.clone()],
            vec![f.clone(), z.clone()],
            vec![g.clone(), h.clone()],
            vec![z, ZG::scalar(nu, BigInt::from(n2))],
        ],
    );
    let sub = first_generator_submodule(&m);
    let quot = FinitePresentation::new(nu, 1, vec![vec![h.clone()], vec![ZG::scalar(nu, BigInt::from(n2))]]);
    let (Ok(fm), Ok(fs), Ok(fq)) = (fitting_ideal(&m), fitting_ideal(&sub), fitting_ideal(&quot)) else {
        return (false, false);
    };
    let none = PrimeSet::new();
    let ext = fm.contains(&fs.product(&fq), &none) && fq.contains(&fm, &none);
    let sublaw = fs.contains(&fm, &none);
    (ext, sublaw)
}

/// Over `Z` (`nu = 1`) the Fitting lattice has index `|M|`.
pub fn fitting_index_is_order(rels: &[Vec<i64>]) -> bool {
    let n = rels.first().map_or(0, Vec::len);
    let rows = rels.iter().map(|r| r.iter().map(|&x| ZG::scalar(1, BigInt::from(x))).collect()).collect();
    let p = FinitePresentation::new(1, n, rows);
    let Ok(f) = fitting_ideal(&p) else { return false };
    match p.order() {
        Some(o) => f.index() == Some(o),
        None => f.lattice().rank() == 0,
    }
}

/// Minors of the reduced presentation give the same ideal as minors of the original.
pub fn reduction_preserves_fitting(nu: usize, generators: usize, rels: Vec<Vec<ZG>>) -> bool {
    let p = FinitePresentation::new(nu, generators, rels);
    match (fitting_ideal_direct(&p), fitting_ideal_direct(&reduce_presentation(&p))) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// `divide_poly(g h, g) = h` for `g(0) = 1`.
pub fn division_recovers_quotient(g: &ZGPoly, h: &ZGPoly) -> bool {
    divide_poly(&g.mul(h), g).is_ok_and(|q| q == *h)
}

/// `U M = H` with `U` unimodular, `H` stable under re-reduction, and equal to the
/// form of `V M` for a unimodular `V`.
pub fn hnf_reconstructs(m: &IntMatrix, v: &IntMatrix) -> bool {
    let (h, u) = hnf(m);
    let unimodular = u.det().abs().is_one();
    unimodular && u.mul(m) == h && hnf_only(&h) == h && hnf_only(&v.mul(m)) == h
}

/// `L M R = D` with `L`, `R` unimodular and `d_1 | d_2 | …`, and the invariants
/// unchanged by unimodular transforms.
pub fn snf_reconstructs(m: &IntMatrix, v: &IntMatrix) -> bool {
    let (d, l, r) = snf(m);
    let k = m.rows().min(m.cols());
    let diag: Vec<BigInt> = (0..k).map(|i| d[(i, i)].clone()).collect();
    let off_zero = (0..d.rows()).all(|i| (0..d.cols()).all(|j| i == j || d[(i, j)].is_zero()));
    let chain = diag.windows(2).all(|w| if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() });
    let again = snf(&v.mul(m)).0;
    off_zero
        && chain
        && diag.iter().all(|x| !x.is_negative())
        && l.det().abs().is_one()
        && r.det().abs().is_one()
        && l.mul(m).mul(&r) == d
        && again == d
}

fn factored(ext: &Extension, f: &[u64]) -> FactoredFunction {
    let k = &ext.field;
    let f = poly::trim(f.to_vec());
    let lead = *f.last().expect("nonzero polynomial");
    FactoredFunction::from_parts(
        lead,
        poly::factor(k, &f).into_iter().map(|(p, e)| (Place::Finite(p), e as i64)),
    )
}

/// Factoring commutes with `sigma^k`, so `ord_{σ^k w}(σ^k f) = ord_w(f)`.
pub fn galois_equivariance(ext: &Extension, f: &[u64], k: i64) -> bool {
    let ff = factored(ext, f);
    let moved: Vec<u64> = f.iter().map(|&c| ext.sigma_pow(c, k)).collect();
    let fm = factored(ext, &moved);
    let expected = ff.galois(ext, k);
    fm == expected && ff.factors.keys().all(|w| fm.ord(&crate::places::galois_act_place(ext, k, w)) == ff.ord(w))
}

/// The product of the factorization reproduces the polynomial.
pub fn factorization_multiplies_back(ext: &Extension, f: &[u64]) -> bool {
    let k = &ext.field;
    let f = poly::trim(f.to_vec());
    let ff = factored(ext, &f);
    let mut acc = vec![ff.constant];
    for (p, e) in &ff.factors {
        for _ in 0..*e {
            acc = poly::mul(k, &acc, p.poly().unwrap());
        }
    }
    acc == f && ff.factors.keys().all(|p| poly::is_irreducible(k, p.poly().unwrap()))
}
