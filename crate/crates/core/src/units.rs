//! `S`-units and `(S,T)`-units of `K = F_{q^nu}(t)` as explicit lattices with
//! Galois action, and the base-`q` Dirichlet map into `X_S`.
//!
//! Units are carried in factored form. A `U_S` element is `c * prod P_j^{e_j}` over
//! the finite places of `S_K`; its class modulo constants is the exponent vector
//! `e`, which lies in `Z^m` when `∞ ∈ S_K` and in the degree-zero sublattice
//! otherwise. All matrices use the row convention: row `i` of `sigma_matrix`
//! holds the coordinates of `sigma(b_i)` in the basis `b`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::ffield::{DlogTable, Extension, FieldError, FiniteMulGroup, ResidueField, DLOG_CAPACITY};
use crate::places::{galois_act_place, FactoredFunction, Place};
use crate::zlinalg::{kernel_basis, qmat, IntMatrix, Lattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitsError {
    #[error("unit has a zero or pole outside S_K")]
    SupportViolation,
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone)]
pub struct SUnitGroup {
    /// `q^nu - 1` for `U_S`, `1` for `U_{S,T}`.
    pub torsion_order: u64,
    /// `S_K`, in the order used for `X_S` coordinates.
    pub places: Vec<Place>,
    /// Finite places of `S_K`; exponent vectors are indexed by these.
    pub finite: Vec<Place>,
    pub basis: Vec<FactoredFunction>,
    /// Row `i`: exponent vector of `basis[i]` over `finite`.
    pub exponents: IntMatrix,
    pub sigma_matrix: IntMatrix,
    /// `[U_S : U_{S,T}]` for `(S,T)`-unit groups.
    pub index: Option<BigInt>,
}

impl SUnitGroup {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of an exponent vector (over `finite`) in the basis, if it lies in the group.
    pub fn coordinates(&self, e: &[BigInt]) -> Option<Vec<BigInt>> {
        if self.rank() == 0 {
            return if e.iter().all(Zero::is_zero) { Some(Vec::new()) } else { None };
        }
        let tq = qmat::from_int(&self.exponents);
        let v: Vec<BigRational> = e.iter().cloned().map(BigRational::from_integer).collect();
        let x = qmat::solve_left(&tq, self.finite.len(), &v)?;
        if x.iter().all(|c| c.is_integer()) {
            Some(x.into_iter().map(|c| c.to_integer()).collect())
        } else {
            None
        }
    }

    /// `lambda` of every basis element (rows) over `places`.
    pub fn lambda_matrix(&self, ext: &Extension) -> Result<IntMatrix, UnitsError> {
        let rows = self
            .basis
            .iter()
            .map(|u| lambda_map(ext, u, &self.places))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntMatrix::from_rows(self.places.len(), rows))
    }

    /// Base-`q` regulator: `|det|` of the `lambda`-matrix against the basis
    /// `{w - w_0}` of `X_S`, `w_0` the first place of `S_K`.
    pub fn regulator(&self, ext: &Extension) -> Result<BigInt, UnitsError> {
        let lam = self.lambda_matrix(ext)?;
        let n = self.rank();
        let m = IntMatrix::from_rows(n, (0..n).map(|i| lam.row(i)[1..].to_vec()).collect());
        Ok(m.det().abs())
    }

    /// `sigma^k` of the `i`-th basis element as a factored function.
    pub fn galois_basis(&self, ext: &Extension, i: usize, k: i64) -> FactoredFunction {
        self.basis[i].galois(ext, k)
    }
}

/// `lambda(u)`: coefficient `ord_w(u) * nu * d_w` at each `w` of `s_k`.
pub fn lambda_map(ext: &Extension, u: &FactoredFunction, s_k: &[Place]) -> Result<Vec<BigInt>, UnitsError> {
    if u.factors.keys().any(|p| !s_k.contains(p)) {
        return Err(UnitsError::SupportViolation);
    }
    if u.degree() != 0 && !s_k.contains(&Place::Infinite) {
        return Err(UnitsError::SupportViolation);
    }
    Ok(s_k.iter().map(|w| BigInt::from(u.ord(w) * (ext.nu * w.degree()) as i64)).collect())
}

fn permutation(ext: &Extension, finite: &[Place]) -> Vec<usize> {
    let pos: HashMap<&Place, usize> = finite.iter().enumerate().map(|(i, p)| (p, i)).collect();
    finite.iter().map(|p| pos[&galois_act_place(ext, 1, p)]).collect()
}

fn permute(e: &[BigInt], perm: &[usize]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); e.len()];
    for (j, x) in e.iter().enumerate() {
        out[perm[j]] = x.clone();
    }
    out
}

/// Integer coordinates of `v` in the rows of a basis matrix (which must span it).
fn coords_in(basis: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    let tq = qmat::from_int(basis);
    let b: Vec<BigRational> = v.iter().cloned().map(BigRational::from_integer).collect();
    let x = qmat::solve_left(&tq, basis.cols(), &b).expect("vector outside the lattice span");
    x.into_iter()
        .map(|c| {
            assert!(c.is_integer(), "vector outside the lattice");
            c.to_integer()
        })
        .collect()
}

fn sigma_on(ext: &Extension, finite: &[Place], exps: &IntMatrix) -> IntMatrix {
    let perm = permutation(ext, finite);
    let rows = (0..exps.rows()).map(|i| coords_in(exps, &permute(exps.row(i), &perm))).collect();
    IntMatrix::from_rows(exps.rows(), rows)
}

/// `U_S` for the places `s_k` of `K`.
pub fn s_units(ext: &Extension, s_k: &[Place]) -> SUnitGroup {
    let finite: Vec<Place> = s_k.iter().filter(|p| !p.is_infinite()).cloned().collect();
    let m = finite.len();
    let exps = if s_k.contains(&Place::Infinite) {
        IntMatrix::identity(m)
    } else {
        let degs = IntMatrix::from_rows(1, finite.iter().map(|p| vec![BigInt::from(p.degree())]).collect());
        kernel_basis(&degs)
    };
    let basis = (0..exps.rows())
        .map(|i| {
            FactoredFunction::from_parts(
                1,
                finite.iter().zip(exps.row(i)).map(|(p, e)| (p.clone(), e.to_i64().expect("small exponent"))),
            )
        })
        .collect();
    let sigma_matrix = sigma_on(ext, &finite, &exps);
    SUnitGroup {
        torsion_order: ext.field.size() - 1,
        places: s_k.to_vec(),
        finite,
        basis,
        exponents: exps,
        sigma_matrix,
        index: None,
    }
}

/// Residue data of one place of `T_K`: its residue field, a generator, and a log table.
struct TData {
    rf: ResidueField,
    table: DlogTable,
    order: u64,
}

fn t_data(ext: &Extension, w: &Place) -> Result<TData, UnitsError> {
    let modulus = match w {
        Place::Infinite => vec![0, 1],
        Place::Finite(f) => f.clone(),
    };
    let rf = ResidueField::new(ext.field.clone(), modulus)?;
    let g = rf.primitive_element();
    let table = DlogTable::new(&rf, g, DLOG_CAPACITY)?;
    let order = rf.size() - 1;
    Ok(TData { rf, table, order })
}

/// Residue of a monic generator `P` (or of the constant `c`) at a place of `T_K`.
fn residue_of_poly(td: &TData, w: &Place, p: &[u64]) -> u64 {
    match w {
        Place::Infinite => 1,
        Place::Finite(_) => td.rf.encode(p),
    }
}

/// `U_{S,T}` inside `U_S`, cut out by the congruences at `t_k`.
pub fn st_units(ext: &Extension, us: &SUnitGroup, t_k: &[Place]) -> Result<SUnitGroup, UnitsError> {
    let q_big = ext.field.size();
    let zeta = ext.field.generator();
    let tds = t_k.iter().map(|w| t_data(ext, w)).collect::<Result<Vec<_>, _>>()?;
    let m = us.rank();
    let nt = t_k.len();
    // a_w: log of the constant generator; b_wj: logs of the monic place generators
    let mut a = Vec::with_capacity(nt);
    let mut b: Vec<Vec<BigInt>> = Vec::with_capacity(nt);
    for (td, w) in tds.iter().zip(t_k) {
        let z = td.rf.encode(&[zeta]);
        a.push(BigInt::from(td.table.dlog(&td.rf, z).expect("generator")));
        let logs: Vec<BigInt> = us
            .finite
            .iter()
            .map(|p| {
                let r = residue_of_poly(td, w, p.poly().unwrap());
                BigInt::from(td.table.dlog(&td.rf, r).expect("generator"))
            })
            .collect();
        b.push(logs);
    }
    // congruence matrix: rows (c0, y_1..y_m), then one modulus row per place
    let mut rows = Vec::with_capacity(1 + m + nt);
    rows.push(a.clone());
    for i in 0..m {
        rows.push(
            (0..nt)
                .map(|k| us.exponents.row(i).iter().zip(&b[k]).map(|(e, l)| e * l).sum::<BigInt>())
                .collect(),
        );
    }
    for k in 0..nt {
        let mut r = vec![BigInt::zero(); nt];
        r[k] = BigInt::from(tds[k].order);
        rows.push(r);
    }
    let c = IntMatrix::from_rows(nt, rows);
    let ker = kernel_basis(&c);
    let proj: Vec<Vec<BigInt>> = ker.row_vecs().into_iter().map(|r| r[1..1 + m].to_vec()).collect();
    let e_lat = Lattice::from_rows(m, proj);
    let e_index = if m == 0 { BigInt::one() } else { e_lat.index().expect("congruence sublattice has full rank") };
    let index = BigInt::from(q_big - 1) * e_index;

    let y_basis = if m == 0 { IntMatrix::zeros(0, 0) } else { e_lat.basis().clone() };
    let mut basis = Vec::with_capacity(m);
    let mut exps_rows = Vec::with_capacity(m);
    for i in 0..y_basis.rows() {
        let y = y_basis.row(i);
        let target: Vec<BigInt> = (0..nt)
            .map(|k| {
                let s: BigInt = (0..m).map(|j| &y[j] * &c[(1 + j, k)]).sum();
                s
            })
            .collect();
        let c0 = (0..q_big - 1)
            .find(|&c0| {
                (0..nt).all(|k| (&a[k] * BigInt::from(c0) + &target[k]).is_multiple_of(&BigInt::from(tds[k].order)))
            })
            .expect("each y in the congruence lattice lifts");
        let mut e = vec![BigInt::zero(); us.finite.len()];
        for j in 0..m {
            for (x, bj) in e.iter_mut().zip(us.exponents.row(j)) {
                *x += &y[j] * bj;
            }
        }
        let constant = ext.field.pow(zeta, c0);
        basis.push(FactoredFunction::from_parts(
            constant,
            us.finite.iter().zip(&e).map(|(p, x)| (p.clone(), x.to_i64().expect("small exponent"))),
        ));
        exps_rows.push(e);
    }
    let exponents = IntMatrix::from_rows(us.finite.len(), exps_rows);
    let sigma_matrix = sigma_on(ext, &us.finite, &exponents);
    Ok(SUnitGroup {
        torsion_order: 1,
        places: us.places.clone(),
        finite: us.finite.clone(),
        basis,
        exponents,
        sigma_matrix,
        index: Some(index),
    })
}

/// Checks that a factored function is `≡ 1` at every place of `t_k`.
pub fn congruent_to_one(ext: &Extension, u: &FactoredFunction, t_k: &[Place]) -> Result<bool, UnitsError> {
    for w in t_k {
        match w {
            Place::Infinite => {
                if u.degree() != 0 || u.constant != 1 {
                    return Ok(false);
                }
            }
            Place::Finite(f) => {
                let rf = ResidueField::new(ext.field.clone(), f.clone())?;
                if u.factors.contains_key(w) || u.residue_in(&rf) != 1 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
