//! Parameter sweeps over small scenarios satisfying the hypotheses on `(S, r)`.

use std::collections::BTreeMap;
use std::time::Instant;

use ffstark_core::ffield::Field;
use ffstark_core::places::{enumerate_places, Place};
use ffstark_core::rubin::subsets;
use rayon::prelude::*;
use serde::Serialize;

use crate::pipeline::{run_verify, RunOptions};
use crate::scenario::{from_doc, place_doc, ScenarioDoc, DEFAULT_EULER_ORDER};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepParams {
    pub p: u64,
    pub a: usize,
    pub nu_max: usize,
    /// Largest degree of a place of `S`.
    pub deg_max: usize,
    pub r_max: usize,
    pub s_max: usize,
    /// Largest degree of the single place of `T`.
    pub t_deg_max: usize,
}

impl SweepParams {
    pub fn new(p: u64, a: usize, nu_max: usize, deg_max: usize, r_max: usize) -> Self {
        SweepParams { p, a, nu_max, deg_max, r_max, s_max: 3, t_deg_max: deg_max.min(3) }
    }
}

/// One sweep point: `nu`, `S`, `T = {t}` and `r`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SweepPoint {
    pub nu: usize,
    pub s: Vec<Place>,
    pub t: Place,
    pub r: usize,
}

fn base_field(p: u64, a: usize) -> Result<std::sync::Arc<Field>, CliError> {
    Field::least(p, a).map_err(CliError::from)
}

/// Builds the admissible points by choosing split and non-split places of `S`
/// separately, so that the hypotheses hold by construction.
pub fn generate(params: &SweepParams) -> Result<Vec<SweepPoint>, CliError> {
    let field = base_field(params.p, params.a)?;
    let places = enumerate_places(&field, params.deg_max);
    let t_places: Vec<&Place> = places.iter().filter(|v| v.degree() <= params.t_deg_max).collect();
    let mut out = Vec::new();
    for nu in 2..=params.nu_max {
        let (split, other): (Vec<&Place>, Vec<&Place>) = places.iter().partition(|v| v.degree() % nu == 0);
        for r in 0..=params.r_max {
            for a in r..=split.len().min(params.s_max) {
                for b in 0..=other.len().min(params.s_max - a) {
                    if a + b < r + 1 {
                        continue;
                    }
                    for si in subsets(split.len(), a) {
                        for oi in subsets(other.len(), b) {
                            let mut s: Vec<Place> =
                                si.iter().map(|&i| split[i].clone()).chain(oi.iter().map(|&i| other[i].clone())).collect();
                            s.sort();
                            for t in t_places.iter().filter(|t| !s.contains(t)) {
                                out.push(SweepPoint { nu, s: s.clone(), t: (*t).clone(), r });
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The same set by brute force: every subset of places as a bitmask, every `T`,
/// `r` and `nu`, filtered directly by the hypotheses.
pub fn generate_by_filter(params: &SweepParams) -> Result<Vec<SweepPoint>, CliError> {
    let field = base_field(params.p, params.a)?;
    let places = enumerate_places(&field, params.deg_max);
    let n = places.len();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        if mask.count_ones() as usize > params.s_max {
            continue;
        }
        let s: Vec<Place> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| places[i].clone()).collect();
        for (j, t) in places.iter().enumerate() {
            if mask >> j & 1 == 1 || t.degree() > params.t_deg_max {
                continue;
            }
            for nu in 2..=params.nu_max {
                let split = s.iter().filter(|v| v.degree() % nu == 0).count();
                for r in 0..=params.r_max {
                    if s.len() > r && split >= r {
                        out.push(SweepPoint { nu, s: s.clone(), t: t.clone(), r });
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

fn doc_for(params: &SweepParams, field: &Field, pt: &SweepPoint) -> ScenarioDoc {
    ScenarioDoc {
        p: params.p,
        a: params.a,
        modulus: (params.a > 1).then(|| field.modulus().to_vec()),
        nu: pt.nu,
        s: pt.s.iter().map(|v| place_doc(field, v)).collect(),
        t: vec![place_doc(field, &pt.t)],
        r: pt.r,
        curve_numerator: vec![1],
        checks: None,
        euler_truncation_order: DEFAULT_EULER_ORDER,
        generation_degree_bound: None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepFailure {
    pub scenario: serde_json::Value,
    /// Failing check names, or the error code.
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub params: SweepParams,
    pub total: usize,
    pub passed: usize,
    /// Whether the constructive generator and the brute-force filter agree.
    pub generator_matches_filter: bool,
    /// Observed sign of the leading zeta coefficient, by count.
    pub cnf_signs: BTreeMap<String, usize>,
    /// Per-scenario order of vanishing and sign of the leading zeta coefficient.
    pub cnf_records: Vec<CnfRecord>,
    pub failures: Vec<SweepFailure>,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl SweepSummary {
    pub fn all_passed(&self) -> bool {
        self.generator_matches_filter && self.failures.is_empty() && self.passed == self.total
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CnfRecord {
    pub scenario: String,
    pub order_of_vanishing: u64,
    pub sign: String,
}

/// Short label such as `nu=2 r=1 S=[inf,x^2+x+1] T=[x]` (base field `F_p` coefficients).
pub fn point_label(field: &Field, pt: &SweepPoint) -> String {
    let place = |v: &Place| match v {
        Place::Infinite => "inf".to_string(),
        Place::Finite(f) => {
            let terms: Vec<String> = f
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| **c != 0)
                .map(|(i, &c)| {
                    let c = field.coords(c).iter().map(u64::to_string).collect::<Vec<_>>().join(":");
                    let c = if c == "1" && i > 0 { String::new() } else { c };
                    match i {
                        0 => c,
                        1 => format!("{c}x"),
                        _ => format!("{c}x^{i}"),
                    }
                })
                .collect();
            terms.join("+")
        }
    };
    let s: Vec<String> = pt.s.iter().map(place).collect();
    format!("nu={} r={} S=[{}] T=[{}]", pt.nu, pt.r, s.join(","), place(&pt.t))
}

struct PointResult {
    failure: Option<SweepFailure>,
    cnf: Option<CnfRecord>,
}

fn run_point(params: &SweepParams, field: &Field, pt: &SweepPoint, opts: &RunOptions) -> PointResult {
    let doc = doc_for(params, field, pt);
    let echo = serde_json::to_value(&doc).unwrap_or_default();
    let outcome = from_doc(doc).and_then(|ps| run_verify(&ps, opts));
    match outcome {
        Err(e) => PointResult { failure: Some(SweepFailure { scenario: echo, reasons: vec![e.to_string()] }), cnf: None },
        Ok(report) => {
            let cnf = report.get("class_number_formula").and_then(|c| {
                Some(CnfRecord {
                    scenario: point_label(field, pt),
                    order_of_vanishing: c.get("order_of_vanishing")?.as_u64()?,
                    sign: c.get("observed_sign")?.as_str()?.to_string(),
                })
            });
            let failure = (!report.passed()).then(|| {
                let mut reasons: Vec<String> = report
                    .get("checks")
                    .and_then(|c| c.as_object())
                    .map(|m| m.iter().filter(|(_, v)| *v == "fail").map(|(k, _)| k.clone()).collect())
                    .unwrap_or_default();
                if let Some(inv) = report.get("invariants").and_then(|c| c.as_object()) {
                    reasons.extend(inv.iter().filter(|(_, v)| **v != serde_json::Value::Bool(true)).map(|(k, _)| k.clone()));
                }
                SweepFailure { scenario: echo.clone(), reasons }
            });
            PointResult { failure, cnf }
        }
    }
}

/// Runs the full pipeline on every generated point.
pub fn run_sweep(params: &SweepParams, opts: &RunOptions) -> Result<SweepSummary, CliError> {
    let start = Instant::now();
    let field = base_field(params.p, params.a)?;
    let points = generate(params)?;
    let generator_matches_filter = points == generate_by_filter(params)?;
    log::info!("sweep over {} scenarios", points.len());
    let results: Vec<PointResult> = points.par_iter().map(|pt| run_point(params, &field, pt, opts)).collect();
    let mut cnf_signs = BTreeMap::new();
    let mut cnf_records = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        if let Some(c) = r.cnf {
            *cnf_signs.entry(c.sign.clone()).or_insert(0) += 1;
            cnf_records.push(c);
        }
        failures.extend(r.failure);
    }
    Ok(SweepSummary {
        params: *params,
        total: points.len(),
        passed: points.len() - failures.len(),
        generator_matches_filter,
        cnf_signs,
        cnf_records,
        failures,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_agrees_with_filter() {
        for params in [SweepParams::new(2, 1, 4, 4, 2), SweepParams::new(3, 1, 3, 2, 1)] {
            let g = generate(&params).unwrap();
            assert!(!g.is_empty());
            assert_eq!(g, generate_by_filter(&params).unwrap());
        }
    }

    #[test]
    fn tiny_sweep_passes() {
        let params = SweepParams { p: 2, a: 1, nu_max: 2, deg_max: 1, r_max: 1, s_max: 2, t_deg_max: 1 };
        let s = run_sweep(&params, &RunOptions::default()).unwrap();
        assert!(s.total > 0);
        assert!(s.all_passed(), "{:?}", s.failures);
    }
}
