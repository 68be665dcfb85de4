//! Exterior powers of `(S,T)`-unit lattices over `Q[G]`, the regulator `R_W`,
//! the lattice `Lambda_{S,T}`, the Stark element and the membership verdicts.
//!
//! `∧^r` over `Q[G]` is realised as the plain `r`-th exterior power over `Q` of
//! `Q ⊗ U_{S,T}` modulo the relators `(σx)∧y∧R − x∧(σy)∧R`. Vectors in the
//! quotient are written in coordinates of the non-pivot plain basis wedges.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ffield::Extension;
use crate::grpring::{det_zg, euler_phi, rational_idempotents, GIdeal, QG, ZG};
use crate::lfunc::Scenario;
use crate::places::{galois_act_place, Place};
use crate::units::{SUnitGroup, UnitsError};
use crate::zlinalg::{qmat, snf, IntMatrix, Membership, PrimeSet, QLattice};

type QMatrix = qmat::QMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RubinError {
    #[error("place of degree {0} does not split completely")]
    NonSplit(usize),
    #[error("regulator restricted to the (r,S) component is singular")]
    Singular,
    #[error("leading term is not in the image of the (r,S) component")]
    NotInComponent,
    #[error("wedge dimension {got} differs from the character count {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("Lambda is not a full lattice in the (r,S) component")]
    Degenerate,
    #[error("not enough split places in S for r = {0}")]
    TooFewSplit(usize),
    #[error(transparent)]
    Units(#[from] UnitsError),
}

fn q(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

fn qi(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Plain coordinates of `v_1 ∧ … ∧ v_r`: the `r x r` minors on each subset.
fn wedge_int(vecs: &[Vec<BigInt>], plain: &[Vec<usize>]) -> Vec<BigInt> {
    let r = vecs.len();
    plain
        .iter()
        .map(|cols| {
            let rows = vecs.iter().map(|v| cols.iter().map(|&c| v[c].clone()).collect()).collect();
            IntMatrix::from_rows(r, rows).det()
        })
        .collect()
}

fn unit_vec(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

/// `∧^r_{Q[G]}` of `Q ⊗ U`, with the `sigma`-action, idempotent projectors, the
/// integral image of `∧^r U` and the `(r,S)` component.
#[derive(Debug, Clone)]
pub struct WedgeSpace {
    pub nu: usize,
    pub r: usize,
    /// Rank of `U` over `Z`.
    pub n: usize,
    pub r_map: BTreeMap<usize, usize>,
    /// Basis `r`-subsets of the plain exterior power.
    pub plain: Vec<Vec<usize>>,
    /// Plain subsets that survive as quotient basis vectors (empty for `r = 0`).
    pub quotient_subsets: Vec<Vec<usize>>,
    relators: QMatrix,
    pivots: Vec<usize>,
    /// `sigma^k` acting on quotient coordinates (row convention), `k < nu`.
    pub sigma_powers: Vec<QMatrix>,
    pub projectors: BTreeMap<usize, QMatrix>,
    /// Basis rows of the `(r,S)` component.
    pub component: QMatrix,
    pub integral_image: QLattice,
}

/// `sum_{d | nu} phi(d) C(r_d, r)`.
pub fn expected_dimension(r_map: &BTreeMap<usize, usize>, r: usize) -> usize {
    r_map.iter().map(|(&d, &rd)| euler_phi(d) * binomial(rd, r)).sum()
}

pub fn expected_component_dimension(r_map: &BTreeMap<usize, usize>, r: usize) -> usize {
    r_map.iter().filter(|(_, &rd)| rd == r).map(|(&d, _)| euler_phi(d)).sum()
}

fn mat_mul(a: &QMatrix, b: &QMatrix, cols: usize) -> QMatrix {
    qmat::mul(a, b, cols)
}

fn identity(n: usize) -> QMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect()
}

impl WedgeSpace {
    pub fn dim(&self) -> usize {
        self.sigma_powers[0].len()
    }

    pub fn component_dim(&self) -> usize {
        self.component.len()
    }

    /// Quotient coordinates of a plain wedge vector.
    pub fn project(&self, x: &[BigRational]) -> Vec<BigRational> {
        if self.r == 0 {
            return x.to_vec();
        }
        let mut y = x.to_vec();
        for (row, &p) in self.relators.iter().zip(&self.pivots) {
            if y[p].is_zero() {
                continue;
            }
            let c = y[p].clone();
            for (t, v) in y.iter_mut().zip(row) {
                if !v.is_zero() {
                    *t -= &c * v;
                }
            }
        }
        let mut out = Vec::with_capacity(self.dim());
        let mut pi = self.pivots.iter().peekable();
        for (j, v) in y.into_iter().enumerate() {
            if pi.peek() == Some(&&j) {
                pi.next();
                continue;
            }
            out.push(v);
        }
        out
    }

    /// Action of a rational group-ring element on quotient coordinates.
    pub fn act(&self, g: &QG, x: &[BigRational]) -> Vec<BigRational> {
        let dim = self.dim();
        let mut out = vec![BigRational::zero(); dim];
        for (k, c) in g.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(qmat::mul_vec_mat(x, &self.sigma_powers[k], dim)) {
                *o += c * v;
            }
        }
        out
    }

    fn component_idempotent(&self) -> QG {
        let idem = rational_idempotents(self.nu);
        idem.iter().filter(|(d, _)| self.r_map[*d] == self.r).fold(QG::zero(self.nu), |acc, (_, e)| &acc + e)
    }

    pub fn in_component(&self, x: &[BigRational]) -> bool {
        self.act(&self.component_idempotent(), x) == x
    }

    /// Whether the component is cyclic over `Q[G]`: some element has a
    /// `sigma`-orbit spanning it.
    pub fn component_is_cyclic(&self) -> bool {
        let m = self.component_dim();
        if m == 0 {
            return true;
        }
        for trial in 1..=8i64 {
            let x: Vec<BigRational> = (0..self.dim())
                .map(|j| {
                    self.component.iter().enumerate().fold(BigRational::zero(), |acc, (i, row)| {
                        acc + qi((i as i64 + 1).pow(trial as u32 % 3 + 1) + trial * i as i64) * &row[j]
                    })
                })
                .collect();
            let orbit: QMatrix = (0..self.nu).map(|k| qmat::mul_vec_mat(&x, &self.sigma_powers[k], self.dim())).collect();
            if qmat::rank(&orbit, self.dim()) == m {
                return true;
            }
        }
        false
    }

    /// Human-readable labels of the quotient basis.
    pub fn basis_labels(&self) -> Vec<String> {
        if self.r == 0 {
            return (0..self.nu).map(|k| format!("sigma^{k}")).collect();
        }
        self.quotient_subsets
            .iter()
            .map(|s| s.iter().map(|i| format!("u{}", i + 1)).collect::<Vec<_>>().join("^"))
            .collect()
    }
}

/// Builds `∧^r` of `Q ⊗ U` over `Q[G]` and checks its dimension against the
/// character multiplicities `r_map`.
pub fn wedge_space(u: &SUnitGroup, r: usize, r_map: &BTreeMap<usize, usize>, nu: usize) -> Result<WedgeSpace, RubinError> {
    let n = u.rank();
    let (plain, quotient_subsets, relators, pivots, sigma) = if r == 0 {
        let shift: QMatrix = (0..nu)
            .map(|k| (0..nu).map(|j| if j == (k + 1) % nu { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        (vec![Vec::new()], Vec::new(), Vec::new(), Vec::new(), shift)
    } else {
        let plain = subsets(n, r);
        let m_rows: Vec<Vec<BigInt>> = u.sigma_matrix.row_vecs();
        let mut rel_rows: QMatrix = Vec::new();
        if r >= 2 {
            for rest in subsets(n, r - 2) {
                for i in 0..n {
                    for j in 0..n {
                        let mut a = vec![m_rows[i].clone(), unit_vec(n, j)];
                        let mut b = vec![unit_vec(n, i), m_rows[j].clone()];
                        for &k in &rest {
                            a.push(unit_vec(n, k));
                            b.push(unit_vec(n, k));
                        }
                        let wa = wedge_int(&a, &plain);
                        let wb = wedge_int(&b, &plain);
                        let row: Vec<BigRational> = wa.iter().zip(&wb).map(|(x, y)| q(&(x - y))).collect();
                        if row.iter().any(|v| !v.is_zero()) {
                            rel_rows.push(row);
                        }
                    }
                }
            }
        }
        let pivots = qmat::rref(&mut rel_rows, plain.len());
        let quotient_subsets: Vec<Vec<usize>> =
            plain.iter().enumerate().filter(|(j, _)| !pivots.contains(j)).map(|(_, s)| s.clone()).collect();
        let partial = WedgeSpace {
            nu,
            r,
            n,
            r_map: r_map.clone(),
            plain: plain.clone(),
            quotient_subsets: quotient_subsets.clone(),
            relators: rel_rows.clone(),
            pivots: pivots.clone(),
            sigma_powers: vec![identity(quotient_subsets.len())],
            projectors: BTreeMap::new(),
            component: Vec::new(),
            integral_image: QLattice::from_rational_rows(0, &[]),
        };
        let sigma: QMatrix = quotient_subsets
            .iter()
            .map(|s| {
                let mut vecs = vec![m_rows[s[0]].clone()];
                vecs.extend(s[1..].iter().map(|&k| unit_vec(n, k)));
                let w: Vec<BigRational> = wedge_int(&vecs, &plain).iter().map(q).collect();
                partial.project(&w)
            })
            .collect();
        (plain, quotient_subsets, rel_rows, pivots, sigma)
    };
    let dim = sigma.len();
    let expected = expected_dimension(r_map, r);
    if dim != expected {
        return Err(RubinError::Dimension { expected, got: dim });
    }
    let mut sigma_powers = vec![identity(dim)];
    for k in 1..nu {
        let next = mat_mul(&sigma_powers[k - 1], &sigma, dim);
        sigma_powers.push(next);
    }
    if nu > 0 && mat_mul(&sigma_powers[nu - 1], &sigma, dim) != identity(dim) {
        return Err(RubinError::Dimension { expected: dim, got: 0 });
    }
    let mut ws = WedgeSpace {
        nu,
        r,
        n,
        r_map: r_map.clone(),
        plain,
        quotient_subsets,
        relators,
        pivots,
        sigma_powers,
        projectors: BTreeMap::new(),
        component: Vec::new(),
        integral_image: QLattice::from_rational_rows(dim, &[]),
    };
    for (d, e) in rational_idempotents(nu) {
        let pm: QMatrix = identity(dim).iter().map(|row| ws.act(&e, row)).collect();
        ws.projectors.insert(d, pm);
    }
    let er = ws.component_idempotent();
    let mut comp: QMatrix = identity(dim).iter().map(|row| ws.act(&er, row)).collect();
    qmat::rref(&mut comp, dim);
    let expected_c = expected_component_dimension(r_map, r);
    if comp.len() != expected_c {
        return Err(RubinError::Dimension { expected: expected_c, got: comp.len() });
    }
    ws.component = comp;
    let image: QMatrix = if r == 0 {
        identity(dim)
    } else {
        (0..ws.plain.len())
            .map(|j| {
                let mut e = vec![BigRational::zero(); ws.plain.len()];
                e[j] = BigRational::one();
                ws.project(&e)
            })
            .collect()
    };
    ws.integral_image = QLattice::from_rational_rows(dim, &image);
    Ok(ws)
}

/// `w_1, …, w_r`: the least place above each of the first `r` split places of `S`.
pub fn canonical_places(sc: &Scenario) -> Result<Vec<Place>, RubinError> {
    let nu = sc.nu();
    let chosen: Vec<Place> = sc
        .s_k()
        .into_iter()
        .filter(|(v, _)| v.degree() % nu == 0)
        .take(sc.r)
        .map(|(_, ws)| ws[0].clone())
        .collect();
    if chosen.len() < sc.r {
        return Err(RubinError::TooFewSplit(sc.r));
    }
    Ok(chosen)
}

/// Least place of `S_K` outside the fibers of the chosen places.
pub fn auxiliary_place(ext: &Extension, s_k: &[Place], w: &[Place]) -> Option<Place> {
    let fibers: Vec<Place> = w.iter().flat_map(|wi| (0..ext.nu).map(move |k| galois_act_place(ext, k as i64, wi))).collect();
    s_k.iter().filter(|p| !fibers.contains(p)).min().cloned()
}

/// The evaluator `w^*` on a vector of `⊕_{S_K} Z w`: `w^*(w') = sum_{g : g w = w'} g`.
fn evaluator(ext: &Extension, wi: &Place, places: &[Place], x: &[BigInt]) -> ZG {
    let nu = ext.nu;
    let mut out = ZG::zero(nu);
    for k in 0..nu {
        let target = galois_act_place(ext, k as i64, wi);
        if let Some(p) = places.iter().position(|w| *w == target) {
            out = &out + &ZG::sigma_pow(nu, k as i64).scale(&x[p]);
        }
    }
    out
}

/// `(w_1^* ∧ … ∧ w_r^*)((w_1 − w) ∧ … ∧ (w_r − w))`, which must be `1`.
pub fn evaluator_normalization(ext: &Extension, s_k: &[Place], w: &[Place]) -> Option<ZG> {
    let aux = auxiliary_place(ext, s_k, w)?;
    let pos = |p: &Place| s_k.iter().position(|x| x == p).expect("place of S_K");
    let r = w.len();
    let m: Vec<Vec<ZG>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut x = vec![BigInt::zero(); s_k.len()];
                    x[pos(&w[j])] += 1;
                    x[pos(&aux)] -= 1;
                    evaluator(ext, &w[i], s_k, &x)
                })
                .collect()
        })
        .collect();
    Some(det_zg(&m, ext.nu))
}

/// `R_W` on the quotient basis of a wedge space.
#[derive(Debug, Clone)]
pub struct RegulatorMap {
    pub places: Vec<Place>,
    /// Image of each quotient basis vector.
    pub images: Vec<QG>,
}

impl RegulatorMap {
    pub fn apply(&self, x: &[BigRational]) -> QG {
        let nu = self.images.first().map(|g| g.nu()).unwrap_or(1);
        x.iter().zip(&self.images).fold(QG::zero(nu), |acc, (c, g)| if c.is_zero() { acc } else { &acc + &g.scale(c) })
    }
}

/// `R_W = (w_1^* ∧ … ∧ w_r^*) ∘ λ^{(r)}` with base-`q` logarithms.
pub fn regulator_map(ext: &Extension, u: &SUnitGroup, ws: &WedgeSpace, w: &[Place]) -> Result<RegulatorMap, RubinError> {
    let nu = ext.nu;
    assert_eq!(w.len(), ws.r);
    for wi in w {
        let orbit = (1..nu).all(|k| galois_act_place(ext, k as i64, wi) != *wi);
        if !orbit || !u.places.contains(wi) {
            return Err(RubinError::NonSplit(wi.degree()));
        }
    }
    if ws.r == 0 {
        return Ok(RegulatorMap { places: Vec::new(), images: (0..nu).map(|k| QG::sigma_pow(nu, k as i64)).collect() });
    }
    let lam = u.lambda_matrix(ext)?;
    // entry (i, j) = w_i^*(lambda(b_j))
    let table: Vec<Vec<ZG>> =
        w.iter().map(|wi| (0..u.rank()).map(|j| evaluator(ext, wi, &u.places, lam.row(j))).collect()).collect();
    let images = ws
        .quotient_subsets
        .iter()
        .map(|s| {
            let m: Vec<Vec<ZG>> = (0..ws.r).map(|i| s.iter().map(|&j| table[i][j].clone()).collect()).collect();
            det_zg(&m, nu).to_rational()
        })
        .collect();
    Ok(RegulatorMap { places: w.to_vec(), images })
}

/// The Stark element in quotient coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarkElement {
    pub coords: Vec<BigRational>,
}

/// The unique `ε` in the `(r,S)` component with `R_W(ε) = a_r`.
pub fn solve_stark(a_r: &QG, ws: &WedgeSpace, reg: &RegulatorMap) -> Result<StarkElement, RubinError> {
    let nu = ws.nu;
    if &(&ws.component_idempotent() * a_r) != a_r {
        return Err(RubinError::NotInComponent);
    }
    let m = ws.component_dim();
    if m == 0 {
        return if a_r.is_zero() { Ok(StarkElement { coords: vec![BigRational::zero(); ws.dim()] }) } else { Err(RubinError::NotInComponent) };
    }
    let rm: QMatrix = ws.component.iter().map(|c| reg.apply(c).coeffs().to_vec()).collect();
    if qmat::rank(&rm, nu) != m {
        return Err(RubinError::Singular);
    }
    let c = qmat::solve_left(&rm, nu, a_r.coeffs()).ok_or(RubinError::NotInComponent)?;
    Ok(StarkElement { coords: qmat::mul_vec_mat(&c, &ws.component, ws.dim()) })
}

/// `Lambda_{S,T}` together with the evaluation matrices of the functionals
/// `φ_{J_1} ∧ … ∧ φ_{J_r}` on the quotient basis.
#[derive(Debug, Clone)]
pub struct LambdaLattice {
    pub lattice: QLattice,
    /// `(J, V_J)`: `V_J` is `dim x nu`; `x V_J` is the value on `x`.
    pub functionals: Vec<(Vec<usize>, QMatrix)>,
}

impl LambdaLattice {
    /// First functional taking a non-integral value on `x`.
    pub fn violating_functional(&self, x: &[BigRational], nu: usize) -> Option<Vec<usize>> {
        self.functionals
            .iter()
            .find(|(_, v)| qmat::mul_vec_mat(x, v, nu).iter().any(|c| !c.is_integer()))
            .map(|(j, _)| j.clone())
    }
}

/// `Lambda_{S,T}`: points of the `(r,S)` component on which every `r`-fold wedge of
/// `Z[G]`-linear functionals `U -> Z[G]` is integral.
pub fn lambda_lattice(u: &SUnitGroup, ws: &WedgeSpace) -> Result<LambdaLattice, RubinError> {
    let nu = ws.nu;
    let dim = ws.dim();
    let functionals: Vec<(Vec<usize>, QMatrix)> = if ws.r == 0 {
        vec![(Vec::new(), identity(nu))]
    } else {
        let n = ws.n;
        // sigma^{-k} on U: row j of M^{-k}; M^{-1} = M^{nu-1}
        let mut inv_pows = vec![IntMatrix::identity(n)];
        let m_inv = (1..nu.max(1)).fold(IntMatrix::identity(n), |acc, _| acc.mul(&u.sigma_matrix));
        for k in 1..nu {
            let next = inv_pows[k - 1].mul(&m_inv);
            inv_pows.push(next);
        }
        // phi_a(b_j) = sum_k (M^{-k})[j][a] sigma^k
        let phi: Vec<Vec<ZG>> = (0..n)
            .map(|a| (0..n).map(|j| ZG::from_coeffs((0..nu).map(|k| inv_pows[k][(j, a)].clone()).collect())).collect())
            .collect();
        subsets(n, ws.r)
            .into_iter()
            .map(|jset| {
                let v: QMatrix = ws
                    .quotient_subsets
                    .iter()
                    .map(|s| {
                        let m: Vec<Vec<ZG>> = jset.iter().map(|&a| s.iter().map(|&j| phi[a][j].clone()).collect()).collect();
                        det_zg(&m, nu).to_rational().coeffs().to_vec()
                    })
                    .collect();
                (jset, v)
            })
            .collect()
    };
    let m = ws.component_dim();
    if m == 0 {
        return Ok(LambdaLattice { lattice: QLattice::from_rational_rows(dim, &[]), functionals });
    }
    // evaluation of the component basis against all functionals
    let cols = nu * functionals.len();
    let eval: QMatrix = ws
        .component
        .iter()
        .map(|c| functionals.iter().flat_map(|(_, v)| qmat::mul_vec_mat(c, v, nu)).collect())
        .collect();
    let den = eval.iter().flatten().fold(BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
    let int_eval = IntMatrix::from_rows(
        cols,
        eval.iter().map(|r| r.iter().map(|v| (v * q(&den)).to_integer()).collect()).collect(),
    );
    // L E R = D; c E integral iff (c L^{-1})_i d_i ∈ den Z
    // so the solutions are c = z L with z_i ∈ (den / d_i) Z
    let (d, l, _) = snf(&int_eval);
    if (0..m).any(|i| i >= cols || d[(i, i)].is_zero()) {
        return Err(RubinError::Degenerate);
    }
    let lq = qmat::from_int(&l);
    let coeff_rows: QMatrix = (0..m)
        .map(|i| {
            let scale = BigRational::new(den.clone(), d[(i, i)].clone());
            lq[i].iter().map(|x| x * &scale).collect()
        })
        .collect();
    let lattice_rows: QMatrix = coeff_rows.iter().map(|c| qmat::mul_vec_mat(c, &ws.component, dim)).collect();
    Ok(LambdaLattice { lattice: QLattice::from_rational_rows(dim, &lattice_rows), functionals })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: String,
}

fn membership_verdict(m: Membership, what: &str) -> Verdict {
    match m {
        Membership::Member(c) => {
            Verdict { holds: true, witness: format!("{what} coefficients [{}]", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")) }
        }
        Membership::NonMember => Verdict { holds: false, witness: format!("not in {what}") },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdicts {
    pub conj_b: Verdict,
    pub strong: Verdict,
    pub thm321: Verdict,
    pub cor322: Verdict,
    pub thm311: Option<Verdict>,
    pub thm429: Option<Verdict>,
}

impl Verdicts {
    pub fn all_hold(&self) -> bool {
        [&self.conj_b, &self.strong, &self.thm321, &self.cor322].iter().all(|v| v.holds)
            && self.thm311.as_ref().is_none_or(|v| v.holds)
            && self.thm429.as_ref().is_none_or(|v| v.holds)
    }
}

fn primes_of(n: usize) -> PrimeSet {
    (2..=n as u64).filter(|&p| (n as u64).is_multiple_of(p) && (2..p).all(|d| p % d != 0)).collect()
}

/// `Z`-span of `g y` for `g` in a basis of the ideal and `y` in a lattice basis.
fn ideal_times(ws: &WedgeSpace, ideal: &GIdeal, l: &QLattice) -> QLattice {
    let mut rows = Vec::new();
    for g in ideal.basis_elements() {
        let gq = g.to_rational();
        for y in l.basis_rows() {
            rows.push(ws.act(&gq, &y));
        }
    }
    QLattice::from_rational_rows(ws.dim(), &rows)
}

/// Membership verdicts for `ε` against `Lambda`, the strong lattice and `Fitt · Lambda`.
pub fn check_conjectures(eps: &StarkElement, lambda: &LambdaLattice, fitt: &GIdeal, ws: &WedgeSpace) -> Verdicts {
    let nu = ws.nu;
    let none = PrimeSet::new();
    let inv = primes_of(nu);
    let x = &eps.coords;

    let conj_b = match lambda.lattice.member(x, &none).expect("dimensions agree") {
        Membership::Member(c) => membership_verdict(Membership::Member(c), "Lambda"),
        Membership::NonMember => Verdict {
            holds: false,
            witness: match lambda.violating_functional(x, nu) {
                Some(j) => format!("functional on u{:?} is not integral", j.iter().map(|i| i + 1).collect::<Vec<_>>()),
                None => "outside the (r,S) component".into(),
            },
        },
    };

    let zrs = crate::grpring::component_lattice(nu, &ws.r_map, ws.r);
    let strong_lat = ideal_times(ws, &zrs, &ws.integral_image);
    let strong = membership_verdict(strong_lat.member(x, &none).expect("dimensions agree"), "Z[G]_{r,S} * wedge image");

    let fl = ideal_times(ws, fitt, &lambda.lattice);
    let thm321 = membership_verdict(fl.member(x, &inv).expect("dimensions agree"), "Z[1/nu] Fitt * Lambda");

    let orbit: QMatrix = (0..nu).map(|k| qmat::mul_vec_mat(x, &ws.sigma_powers[k], ws.dim())).collect();
    let eps_lat = QLattice::from_rational_rows(ws.dim(), &orbit);
    let forward = eps_lat.is_sublattice_of(&fl, &inv);
    let backward = fl.is_sublattice_of(&eps_lat, &inv);
    let cor322 = Verdict {
        holds: forward && backward,
        witness: format!("Z[G] eps in Fitt*Lambda: {forward}; Fitt*Lambda in Z[G] eps: {backward}"),
    };

    let (thm311, thm429) = if ws.r == 0 {
        let theta0 = QG::from_coeffs(x.clone());
        let t311 = Verdict {
            holds: fitt.member_q(&theta0, &inv).expect("dimensions agree"),
            witness: "Theta(0) in Z[1/nu] Fitt".into(),
        };
        let prod = fitt.product(&zrs);
        let t429 = Verdict {
            holds: prod.member_q(&theta0, &none).expect("dimensions agree"),
            witness: format!("Theta(0) in Fitt * Z[G]_(0,S) with rows {:?}", prod.rows()),
        };
        (Some(t311), Some(t429))
    } else {
        (None, None)
    };
    Verdicts { conj_b, strong, thm321, cor322, thm311, thm429 }
}

/// The Stark element in plain wedge coordinates of the `(r,S)` component, keyed
/// by basis label (for reports).
pub fn labelled_coordinates(ws: &WedgeSpace, eps: &StarkElement) -> Vec<(String, BigRational)> {
    ws.basis_labels().into_iter().zip(eps.coords.iter().cloned()).collect()
}

/// Index of a place in a list, for callers building `W` by hand.
pub fn place_positions(places: &[Place]) -> HashMap<Place, usize> {
    places.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect()
}
