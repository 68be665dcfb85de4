//! Scenario documents: parsing, validation and the canonical echo.

use std::collections::BTreeSet;

use ffstark_core::ffield::{poly, Field, FieldError};
use ffstark_core::lfunc::{LfuncError, Scenario};
use ffstark_core::places::Place;
use ffstark_core::BigInt;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const ALL_CHECKS: [&str; 14] = [
    "theta",
    "euler",
    "factorization",
    "units",
    "classgroup",
    "structural",
    "cnf",
    "conjB",
    "strong",
    "thm311",
    "thm321",
    "cor322",
    "thm429",
    "lemma428",
];

/// Checks that make sense for any genus.
pub const ANY_GENUS_CHECKS: [&str; 2] = ["theta", "factorization"];

/// Checks whose meaning depends on `r` and so require the hypotheses on `(S, r)`.
pub const ORDER_CHECKS: [&str; 6] = ["conjB", "strong", "thm311", "thm321", "cor322", "thm429"];

pub const DEFAULT_EULER_ORDER: usize = 10;

/// A place as written in a document: `"inf"` or the non-leading coefficients of a
/// monic polynomial, each an `F_q`-element given by its `a` residues mod `p`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum PlaceDoc {
    Named(String),
    Poly(Vec<Vec<u64>>),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub p: u64,
    pub a: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub nu: usize,
    #[serde(rename = "S")]
    pub s: Vec<PlaceDoc>,
    #[serde(rename = "T")]
    pub t: Vec<PlaceDoc>,
    pub r: usize,
    #[serde(default = "default_numerator")]
    pub curve_numerator: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    #[serde(default = "default_euler")]
    pub euler_truncation_order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation_degree_bound: Option<usize>,
}

fn default_numerator() -> Vec<i64> {
    vec![1]
}

fn default_euler() -> usize {
    DEFAULT_EULER_ORDER
}

/// A validated scenario with the requested checks.
#[derive(Debug, Clone)]
pub struct ParsedScenario {
    /// Canonical form of the input (sorted places, explicit defaults).
    pub doc: ScenarioDoc,
    pub scenario: Scenario,
    pub checks: BTreeSet<String>,
}

fn malformed(msg: impl Into<String>) -> CliError {
    CliError::Malformed(msg.into())
}

fn base_field(doc: &ScenarioDoc) -> Result<std::sync::Arc<Field>, CliError> {
    if doc.a == 0 {
        return Err(malformed("a must be positive"));
    }
    if doc.a == 1 {
        if doc.modulus.is_some() {
            return Err(malformed("modulus must be omitted when a = 1"));
        }
        return Field::prime(doc.p).map_err(|e| malformed(e.to_string()));
    }
    let Some(m) = &doc.modulus else {
        return Err(CliError::MissingModulus);
    };
    let mut m = m.clone();
    if m.len() == doc.a {
        m.push(1);
    }
    if m.len() != doc.a + 1 {
        return Err(malformed(format!("modulus must have degree a = {}", doc.a)));
    }
    match Field::with_modulus(doc.p, m) {
        Ok(f) => Ok(f),
        Err(FieldError::NotIrreducible) => Err(CliError::NotIrreducible("field modulus".into())),
        Err(e @ FieldError::Capacity { .. }) => Err(CliError::Capacity(e.to_string())),
        Err(e) => Err(malformed(e.to_string())),
    }
}

fn element(field: &Field, a: usize, e: &[u64]) -> Result<u64, CliError> {
    if e.len() != a || e.iter().any(|&c| c >= field.characteristic()) {
        return Err(malformed(format!("field element {e:?} needs {a} residues below p")));
    }
    Ok(field.from_coords(e))
}

fn place(field: &Field, a: usize, d: &PlaceDoc) -> Result<Place, CliError> {
    match d {
        PlaceDoc::Named(s) if s == "inf" => Ok(Place::Infinite),
        PlaceDoc::Named(s) => Err(malformed(format!("unknown place {s:?}"))),
        PlaceDoc::Poly(cs) => {
            if cs.is_empty() {
                return Err(malformed("a place needs degree at least 1"));
            }
            let mut f = cs.iter().map(|e| element(field, a, e)).collect::<Result<Vec<_>, _>>()?;
            f.push(1);
            if !poly::is_irreducible(field, &f) {
                return Err(CliError::NotIrreducible(format!("{cs:?}")));
            }
            Ok(Place::Finite(f))
        }
    }
}

/// Document form of a base place.
pub fn place_doc(field: &Field, p: &Place) -> PlaceDoc {
    match p {
        Place::Infinite => PlaceDoc::Named("inf".into()),
        Place::Finite(f) => PlaceDoc::Poly(f[..f.len() - 1].iter().map(|&c| field.coords(c)).collect()),
    }
}

/// Validates a parsed document.
pub fn from_doc(doc: ScenarioDoc) -> Result<ParsedScenario, CliError> {
    let field = base_field(&doc)?;
    if doc.nu == 0 {
        return Err(malformed("nu must be positive"));
    }
    let s = doc.s.iter().map(|d| place(&field, doc.a, d)).collect::<Result<Vec<_>, _>>()?;
    let t = doc.t.iter().map(|d| place(&field, doc.a, d)).collect::<Result<Vec<_>, _>>()?;
    if s.is_empty() || t.is_empty() {
        return Err(malformed("S and T must be nonempty"));
    }
    if s.iter().any(|v| t.contains(v)) {
        return Err(CliError::Overlap);
    }
    let checks: BTreeSet<String> = match &doc.checks {
        None => ALL_CHECKS.iter().map(|c| c.to_string()).collect(),
        Some(cs) => {
            for c in cs {
                if !ALL_CHECKS.contains(&c.as_str()) {
                    return Err(malformed(format!("unknown check {c:?}")));
                }
            }
            cs.iter().cloned().collect()
        }
    };
    let numerator: Vec<BigInt> = doc.curve_numerator.iter().map(|&c| BigInt::from(c)).collect();
    let scenario = Scenario::new(&field, doc.nu, s, t, doc.r, numerator).map_err(|e| match e {
        LfuncError::Field(FieldError::Capacity { .. }) => CliError::Capacity(e.to_string()),
        other => malformed(other.to_string()),
    })?;
    let mut checks = checks;
    if scenario.genus() > 0 {
        if doc.checks.is_none() {
            checks.retain(|c| ANY_GENUS_CHECKS.contains(&c.as_str()));
        } else if let Some(c) = checks.iter().find(|c| !ANY_GENUS_CHECKS.contains(&c.as_str())) {
            return Err(CliError::GenusUnsupported(c.clone()));
        }
    }
    if checks.iter().any(|c| ORDER_CHECKS.contains(&c.as_str())) && !scenario.hypotheses_hold() {
        return Err(CliError::HypothesesFailed(format!(
            "r = {} needs |S| > r and at least r places of S of degree divisible by nu = {}",
            doc.r, doc.nu
        )));
    }
    let mut canon = doc;
    canon.s = scenario.s.iter().map(|p| place_doc(&field, p)).collect();
    canon.t = scenario.t.iter().map(|p| place_doc(&field, p)).collect();
    canon.checks = Some(checks.iter().cloned().collect());
    canon.curve_numerator = scenario.curve_numerator.iter().map(|c| i64::try_from(c).expect("small")).collect();
    Ok(ParsedScenario { doc: canon, scenario, checks })
}

/// Parses a scenario document.
pub fn parse_scenario(text: &str) -> Result<ParsedScenario, CliError> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    from_doc(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I2: &str = r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf", [[1], [1]]], "T": [[[0]]], "r": 1}"#;

    #[test]
    fn parses_i2() {
        let ps = parse_scenario(I2).unwrap();
        assert_eq!(ps.scenario.s, vec![Place::Infinite, Place::Finite(vec![1, 1, 1])]);
        assert_eq!(ps.scenario.t, vec![Place::Finite(vec![0, 1])]);
        assert_eq!(ps.checks.len(), ALL_CHECKS.len());
        let again = from_doc(ps.doc.clone()).unwrap();
        assert_eq!(again.doc, ps.doc);
    }

    #[test]
    fn input_errors() {
        let overlap = r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf", [[0]]], "T": [[[0]]], "r": 0}"#;
        assert!(matches!(parse_scenario(overlap), Err(CliError::Overlap)));
        let missing = r#"{"p": 2, "a": 2, "nu": 2, "S": ["inf"], "T": [[[0, 0]]], "r": 0}"#;
        assert!(matches!(parse_scenario(missing), Err(CliError::MissingModulus)));
        let reducible = r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf"], "T": [[[1], [0]]], "r": 0}"#;
        assert!(matches!(parse_scenario(reducible), Err(CliError::NotIrreducible(_))));
        let hyp = r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf", [[1]]], "T": [[[0]]], "r": 1}"#;
        assert!(matches!(parse_scenario(hyp), Err(CliError::HypothesesFailed(_))));
        assert!(matches!(parse_scenario("{"), Err(CliError::Malformed(_))));
        let unknown = r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf"], "T": [[[0]]], "r": 0, "checks": ["nope"]}"#;
        assert!(matches!(parse_scenario(unknown), Err(CliError::Malformed(_))));
        let genus = r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf"], "T": [[[0]]], "r": 0, "curve_numerator": [1, 0, 2], "checks": ["units"]}"#;
        assert!(matches!(parse_scenario(genus), Err(CliError::GenusUnsupported(_))));
    }

    #[test]
    fn extension_of_prime_field_with_modulus() {
        let doc = r#"{"p": 2, "a": 2, "modulus": [1, 1, 1], "nu": 2, "S": ["inf"], "T": [[[0, 0]]], "r": 0}"#;
        let ps = parse_scenario(doc).unwrap();
        assert_eq!(ps.scenario.q(), 4);
    }
}
