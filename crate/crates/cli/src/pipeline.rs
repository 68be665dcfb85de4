//! Orchestration of a single scenario run into a [`Report`].

use std::collections::BTreeMap;
use std::time::Instant;

use ffstark_core::classgrp::{class_group_presentation, class_number_st, structural_checks, ClassGroupData};
use ffstark_core::grpring::ZG;
use ffstark_core::lfunc::{
    check_factorization, euler_truncate, int_taylor_at_one, leading_term, theta_st, vanishing_holds, zeta_kst, Scenario,
    ThetaData,
};
use ffstark_core::places::{character_multiplicities, Place};
use ffstark_core::rubin::{
    auxiliary_place, canonical_places, check_conjectures, evaluator_normalization, expected_component_dimension,
    expected_dimension, lambda_lattice, labelled_coordinates, regulator_map, solve_stark, wedge_space, Verdict,
};
use ffstark_core::units::{congruent_to_one, s_units, st_units, SUnitGroup};
use ffstark_core::BigInt;
use log::debug;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::report::{self, Report};
use crate::scenario::{ParsedScenario, ORDER_CHECKS};
use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the scenario's Euler truncation order.
    pub euler_order: Option<usize>,
    /// Overrides the scenario's generation degree bound.
    pub gen_bound: Option<usize>,
}

const PASS: &str = "pass";
const FAIL: &str = "fail";
const NOT_APPLICABLE: &str = "not_applicable";

fn status(ok: bool) -> &'static str {
    if ok {
        PASS
    } else {
        FAIL
    }
}

struct Timer {
    timings: BTreeMap<String, f64>,
    last: Instant,
}

impl Timer {
    fn new() -> Self {
        Timer { timings: BTreeMap::new(), last: Instant::now() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        let ms = (now - self.last).as_secs_f64() * 1000.0;
        debug!("stage {stage}: {ms:.1} ms");
        self.timings.insert(stage.to_string(), ms);
        self.last = now;
    }
}

fn flat(groups: Vec<(Place, Vec<Place>)>) -> Vec<Place> {
    groups.into_iter().flat_map(|(_, w)| w).collect()
}

fn wants(ps: &ParsedScenario, names: &[&str]) -> bool {
    names.iter().any(|n| ps.checks.contains(*n))
}

fn r_map_json(m: &BTreeMap<usize, usize>) -> Value {
    Value::Object(m.iter().map(|(d, r)| (d.to_string(), json!(r))).collect())
}

fn theta_section(sc: &Scenario, td: &ThetaData, invariants: &mut Map<String, Value>) -> (Value, bool) {
    let s_k = flat(sc.s_k());
    let fixed_points = character_multiplicities(&sc.ext, &s_k);
    let expected_degree: usize =
        sc.s.iter().chain(&sc.t).map(Place::degree).sum::<usize>() + 2 * sc.genus() - 2;
    let degree = td.theta.degree().unwrap_or(0);
    let vanishing = vanishing_holds(td);
    let orders_agree = fixed_points == td.r_map;
    invariants.insert("theta_degree_formula".into(), json!(degree == expected_degree));
    invariants.insert("vanishing_orders".into(), json!(vanishing));
    invariants.insert("vanishing_orders_match_fixed_points".into(), json!(orders_agree));
    let ok = degree == expected_degree && vanishing && orders_agree;
    let section = json!({
        "coefficients": td.theta.coeffs().iter().map(report::zg).collect::<Vec<_>>(),
        "degree": degree,
        "expected_degree": expected_degree,
        "taylor_at_one": td.taylor.iter().map(report::zg).collect::<Vec<_>>(),
        "r_map": r_map_json(&td.r_map),
        "numerator_symmetric": sc.numerator_symmetric(),
    });
    (section, ok)
}

fn units_section(sc: &Scenario, us: &SUnitGroup, ust: &SUnitGroup) -> Result<(Value, bool), CliError> {
    let t_k = flat(sc.t_k());
    let mut congruent = true;
    for u in &ust.basis {
        congruent &= congruent_to_one(&sc.ext, u, &t_k)?;
    }
    let expected_rank = ust.places.len() - 1;
    let rank_ok = ust.rank() == expected_rank && us.rank() == expected_rank;
    let section = json!({
        "s_places": ust.places.iter().map(|w| report::place_k(&sc.ext, w)).collect::<Vec<_>>(),
        "torsion_order_s": us.torsion_order,
        "rank": ust.rank(),
        "expected_rank": expected_rank,
        "st_basis": ust.basis.iter().map(|u| report::function_k(&sc.ext, u)).collect::<Vec<_>>(),
        "congruent_to_one_on_t": congruent,
        "regulator_s": report::int(&us.regulator(&sc.ext)?),
        "regulator_st": report::int(&ust.regulator(&sc.ext)?),
    });
    Ok((section, congruent && rank_ok))
}

fn class_group_section(sc: &Scenario, cd: &ClassGroupData) -> Result<(Value, bool), CliError> {
    let numbers = class_number_st(sc)?;
    let certified = cd.presentation.order().as_ref() == Some(&numbers.a_st);
    let section = json!({
        "order_s": report::int(&numbers.a_s),
        "order_st": report::int(&numbers.a_st),
        "unit_index": report::int(&numbers.unit_index),
        "presented_order": cd.presentation.order().map(|o| report::int(&o)),
        "abelian_invariants": cd.presentation.abelian_invariants().iter().map(report::int).collect::<Vec<_>>(),
        "degree_bound": cd.degree_bound,
        "generators": cd.generator_places.iter().map(|w| report::place_k(&sc.ext, w)).collect::<Vec<_>>(),
        "fitting_rows": report::int_rows(&cd.fitting.rows()),
        "certified": certified,
    });
    Ok((section, certified))
}

fn cnf_section(sc: &Scenario, td: &ThetaData, a_st: &BigInt, ust: &SUnitGroup) -> Result<(Value, bool, bool), CliError> {
    let zeta = zeta_kst(sc, td)?;
    // N(Theta)(u) = zeta_{K,S,T}(u^nu), expanded in (1 - u) so that (1 - u) ~ s log q
    let b = int_taylor_at_one(&zeta.norm);
    let m = ust.places.len() - 1;
    let lower_vanish = b.iter().take(m).all(Zero::is_zero);
    let lead = b.get(m).cloned().unwrap_or_else(BigInt::zero);
    let regulator = ust.regulator(&sc.ext)?;
    let rhs = a_st * &regulator;
    let holds = lower_vanish && lead.abs() == rhs;
    let sign = if lead.is_negative() { "negative" } else { "positive" };
    let section = json!({
        "zeta_kst": zeta.poly.iter().map(report::int).collect::<Vec<_>>(),
        "zeta_at_one": report::int(&zeta.value_at_one),
        "theta_norm": zeta.norm.iter().map(report::int).collect::<Vec<_>>(),
        "norm_identity": zeta.norm_matches,
        "order_of_vanishing": m,
        "lower_coefficients_vanish": lower_vanish,
        "leading_coefficient_abs": report::int(&lead.abs()),
        "class_number_times_regulator": report::int(&rhs),
        "observed_sign": sign,
    });
    Ok((section, holds, zeta.norm_matches))
}

fn verdict_json(v: &Verdict) -> Value {
    json!({ "holds": v.holds, "witness": v.witness })
}

/// Runs every requested check on a parsed scenario.
pub fn run_verify(ps: &ParsedScenario, opts: &RunOptions) -> Result<Report, CliError> {
    let sc = &ps.scenario;
    let nu = sc.nu();
    let mut timer = Timer::new();
    let mut body = Map::new();
    let mut invariants = Map::new();
    let mut checks: BTreeMap<String, &'static str> = BTreeMap::new();
    debug!("verifying q={} nu={} |S|={} |T|={} r={}", sc.q(), nu, sc.s.len(), sc.t.len(), sc.r);

    body.insert("scenario".into(), serde_json::to_value(&ps.doc).map_err(|e| CliError::Internal(e.to_string()))?);
    body.insert(
        "conventions".into(),
        json!({
            "variable": "u = q^-s, Taylor coefficients a_j in powers of (1 - u)",
            "group_ring": "coefficient k is the coefficient of sigma^k, sigma the q-power Frobenius",
            "characters": "chi(Theta) is L_{S,T}(u, chi^-1)",
            "regulator": "log base q, rows sigma-equivariant",
        }),
    );

    let td = theta_st(sc)?;
    let (theta, theta_ok) = theta_section(sc, &td, &mut invariants);
    body.insert("theta".into(), theta);
    checks.insert("theta".into(), status(theta_ok));
    timer.lap("theta");

    let euler_order = opts.euler_order.unwrap_or(ps.doc.euler_truncation_order);
    if ps.checks.contains("euler") {
        let e = euler_truncate(sc, euler_order)?;
        let agrees = e == td.theta.truncate(euler_order);
        body.insert(
            "euler".into(),
            json!({
                "order": euler_order,
                "truncation": e.coeffs().iter().map(report::zg).collect::<Vec<_>>(),
                "agrees": agrees,
            }),
        );
        checks.insert("euler".into(), status(agrees));
        timer.lap("euler");
    }
    if ps.checks.contains("factorization") {
        let ok = check_factorization(sc, euler_order)?;
        body.insert("factorization".into(), json!({ "order": euler_order, "holds": ok }));
        checks.insert("factorization".into(), status(ok));
        timer.lap("factorization");
    }

    let need_units = wants(ps, &["units", "classgroup", "structural", "lemma428", "cnf"]) || wants(ps, &ORDER_CHECKS);
    let need_class = wants(ps, &["classgroup", "structural", "lemma428", "cnf"]) || wants(ps, &ORDER_CHECKS);
    let need_stark = wants(ps, &ORDER_CHECKS);

    let units = if need_units {
        let s_k = flat(sc.s_k());
        let us = s_units(&sc.ext, &s_k);
        let ust = st_units(&sc.ext, &us, &flat(sc.t_k()))?;
        let (section, ok) = units_section(sc, &us, &ust)?;
        invariants.insert("unit_rank".into(), json!(section["rank"] == section["expected_rank"]));
        body.insert("units".into(), section);
        if ps.checks.contains("units") {
            checks.insert("units".into(), status(ok));
        }
        timer.lap("units");
        Some(ust)
    } else {
        None
    };

    let class = if need_class {
        let cd = class_group_presentation(sc, opts.gen_bound.or(ps.doc.generation_degree_bound))?;
        let (section, certified) = class_group_section(sc, &cd)?;
        invariants.insert("class_group_certified".into(), json!(certified));
        body.insert("class_group".into(), section);
        if ps.checks.contains("classgroup") {
            checks.insert("classgroup".into(), status(certified));
        }
        timer.lap("classgroup");
        Some(cd)
    } else {
        None
    };

    if let Some(cd) = &class {
        if wants(ps, &["structural", "lemma428"]) {
            let results = structural_checks(cd, sc)?;
            let (counting, other): (Vec<_>, Vec<_>) = results.iter().partition(|c| c.name.starts_with("coinvariant_count"));
            body.insert(
                "structural".into(),
                Value::Array(
                    results.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect(),
                ),
            );
            if ps.checks.contains("structural") {
                checks.insert("structural".into(), status(other.iter().all(|c| c.passed)));
            }
            if ps.checks.contains("lemma428") {
                let s = if counting.is_empty() { NOT_APPLICABLE } else { status(counting.iter().all(|c| c.passed)) };
                checks.insert("lemma428".into(), s);
            }
            timer.lap("structural");
        }
    }

    if ps.checks.contains("cnf") {
        let ust = units.as_ref().expect("units computed");
        let a_st = &class.as_ref().expect("class group computed").order;
        let (section, holds, norm_ok) = cnf_section(sc, &td, a_st, ust)?;
        invariants.insert("norm_identity".into(), json!(norm_ok));
        body.insert("class_number_formula".into(), section);
        checks.insert("cnf".into(), status(holds && norm_ok));
        timer.lap("cnf");
    }

    if need_stark {
        let ust = units.as_ref().expect("units computed");
        let cd = class.as_ref().expect("class group computed");
        let r = sc.r;
        let s_k = flat(sc.s_k());
        let ws = wedge_space(ust, r, &td.r_map, nu)?;
        let dim_ok = ws.dim() == expected_dimension(&td.r_map, r)
            && ws.component_dim() == expected_component_dimension(&td.r_map, r);
        invariants.insert("wedge_dimensions".into(), json!(dim_ok));
        let w = canonical_places(sc)?;
        let normalization = evaluator_normalization(&sc.ext, &s_k, &w);
        let norm_ok = normalization.as_ref().is_some_and(|z| *z == ZG::one(nu));
        invariants.insert("evaluator_normalization".into(), json!(norm_ok));
        let reg = regulator_map(&sc.ext, ust, &ws, &w)?;
        let a_r = leading_term(&td, r)?;
        let eps = solve_stark(&a_r.to_rational(), &ws, &reg)?;
        let lambda = lambda_lattice(ust, &ws)?;
        let v = check_conjectures(&eps, &lambda, &cd.fitting, &ws);
        timer.lap("stark");

        body.insert(
            "stark".into(),
            json!({
                "leading_term": report::zg(&a_r),
                "places_w": w.iter().map(|p| report::place_k(&sc.ext, p)).collect::<Vec<_>>(),
                "auxiliary_place": auxiliary_place(&sc.ext, &s_k, &w).map(|p| report::place_k(&sc.ext, &p)),
                "evaluator_normalization": normalization.as_ref().map(report::zg),
                "wedge_dimension": ws.dim(),
                "expected_wedge_dimension": expected_dimension(&td.r_map, r),
                "component_dimension": ws.component_dim(),
                "expected_component_dimension": expected_component_dimension(&td.r_map, r),
                "epsilon": labelled_coordinates(&ws, &eps)
                    .iter()
                    .map(|(label, x)| json!({ "basis": label, "value": report::rat(x) }))
                    .collect::<Vec<_>>(),
                "in_component": ws.in_component(&eps.coords),
                "lambda_rows": report::rat_rows(&lambda.lattice.basis_rows()),
            }),
        );

        let mut verdicts = Map::new();
        let named = [("conjB", Some(&v.conj_b)), ("strong", Some(&v.strong)), ("thm321", Some(&v.thm321)),
            ("cor322", Some(&v.cor322)), ("thm311", v.thm311.as_ref()), ("thm429", v.thm429.as_ref())];
        for (name, verdict) in named {
            if let Some(verdict) = verdict {
                verdicts.insert(name.into(), verdict_json(verdict));
            }
            if ps.checks.contains(name) {
                checks.insert(name.into(), verdict.map_or(NOT_APPLICABLE, |x| status(x.holds)));
            }
        }
        body.insert("verdicts".into(), Value::Object(verdicts));
    }

    let invariants_hold = invariants.values().all(|v| *v == Value::Bool(true));
    let passed = invariants_hold && checks.values().all(|s| *s != FAIL);
    body.insert("invariants".into(), Value::Object(invariants));
    body.insert("checks".into(), json!(checks));
    body.insert("status".into(), json!(status(passed)));
    let mut report = Report::new(body, passed);
    report.timings = timer.timings;
    Ok(report)
}
