//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on
//! any failure. Set `FFSTARK_BLESS=1` to rewrite the golden reports of `corpus/`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use ffstark::corpus::{golden_path, run_corpus, scenario_files};
use ffstark::scenario::parse_scenario;
use ffstark::sweep::{generate, generate_by_filter, run_sweep, SweepParams, SweepSummary};
use ffstark::{run_verify, RunOptions};
use ffstark_core::ffield::{make_extension, Field};
use ffstark_core::grpring::{ZGPoly, ZG};
use ffstark_core::laws;
use ffstark_core::lfunc::{euler_product, euler_truncate, theta_st, Scenario};
use ffstark_core::places::Place;
use ffstark_core::zlinalg::IntMatrix;
use ffstark_core::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Outcome = Result<String, String>;

const I1: &str = r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf"], "T": [[[1], [1], [0]]], "r": 0}"#;
const I2: &str = r#"{"p": 2, "a": 1, "nu": 2, "S": ["inf", [[1], [1]]], "T": [[[0]]], "r": 1}"#;

const SWEEP_LIMIT: Duration = Duration::from_secs(300);
const PROPERTY_LIMIT: Duration = Duration::from_secs(60);
const PROPERTY_TRIALS: usize = 256;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn verify(doc: &str) -> Result<(ffstark::report::Report, Duration), String> {
    let start = Instant::now();
    let ps = parse_scenario(doc).map_err(|e| e.to_string())?;
    let r = run_verify(&ps, &RunOptions::default()).map_err(|e| e.to_string())?;
    Ok((r, start.elapsed()))
}

// Truncated power series over Z[C_2], coefficients as (a, b) = a + b sigma.
type Z2 = [i64; 2];

fn z2_mul(x: Z2, y: Z2) -> Z2 {
    [x[0] * y[0] + x[1] * y[1], x[0] * y[1] + x[1] * y[0]]
}

fn series_mul(f: &[Z2], g: &[Z2], n: usize) -> Vec<Z2> {
    let mut out = vec![[0, 0]; n + 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            if i + j <= n {
                let c = z2_mul(*a, *b);
                out[i + j][0] += c[0];
                out[i + j][1] += c[1];
            }
        }
    }
    out
}

/// `1 / (1 - c u)` to order `n`.
fn geometric(c: Z2, n: usize) -> Vec<Z2> {
    let mut out = vec![[1, 0]];
    for k in 1..=n {
        out.push(z2_mul(out[k - 1], c));
    }
    out
}

fn trimmed(mut f: Vec<Z2>) -> Vec<Z2> {
    while f.len() > 1 && *f.last().unwrap() == [0, 0] {
        f.pop();
    }
    f
}

fn z2_json(f: &[Z2]) -> Value {
    json!(f)
}

fn criterion_i1() -> Outcome {
    let (r, elapsed) = verify(I1)?;
    // (1 - 8 sigma u^3) / (1 - 2 sigma u), expanded as a series
    let theta = trimmed(series_mul(&[[1, 0], [0, 0], [0, 0], [0, -8]], &geometric([0, 2], 6), 6));
    ensure(theta == vec![[1, 0], [0, 2], [4, 0]], || format!("oracle theta {theta:?}"))?;
    ensure(r.get("theta").unwrap()["coefficients"] == z2_json(&theta), || "theta coefficients".into())?;
    let at_one = theta.iter().fold([0, 0], |a, c| [a[0] + c[0], a[1] + c[1]]);
    ensure(at_one == [5, 2], || "oracle theta(0)".into())?;
    ensure(r.get("stark").unwrap()["leading_term"] == json!(at_one), || "theta(0)".into())?;
    // zeta_{K,S,T} = (1 - 64 U^3) / (1 - 4 U) at U = 1, and h * (Q^3 - 1) / [U_S : U_ST] with U_S = F_4^*
    let zeta_at_one: i64 = (0..3).map(|k| 4i64.pow(k)).sum();
    let formula = (64 - 1) / 3;
    let cg = r.get("class_group").unwrap();
    ensure(zeta_at_one == 21 && formula == 21 && cg["order_st"] == json!(21), || format!("order {}", cg["order_st"]))?;
    ensure(cg["abelian_invariants"] == json!([21]), || "class group is not cyclic of order 21".into())?;
    let rows = &cg["fitting_rows"];
    ensure(*rows == json!([[1, 13], [0, 21]]), || format!("fitting rows {rows}"))?;
    // sigma - 8 lies in the Fitting ideal (= annihilator of the cyclic module), so sigma acts as 8
    let (a, b) = (rows[0][0].as_i64().unwrap(), rows[0][1].as_i64().unwrap());
    let n = rows[1][1].as_i64().unwrap();
    let x = [-8i64, 1];
    ensure(x[0] % a == 0 && (x[1] - (x[0] / a) * b) % n == 0, || "sigma does not act as 8".into())?;
    let checks = r.get("checks").unwrap();
    ensure(checks["thm429"] == "pass" && checks["thm311"] == "pass", || format!("verdicts {checks}"))?;
    ensure(r.passed(), || format!("report status {checks}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("|A_ST| = 21, Theta(0) = 5 + 2 sigma, {elapsed:.2?}"))
}

fn criterion_i2() -> Outcome {
    let (r, elapsed) = verify(I2)?;
    let num = series_mul(&series_mul(&[[1, 0], [0, -1]], &[[1, 0], [0, 0], [-1, 0]], 6), &[[1, 0], [0, -2]], 6);
    let den_inv = series_mul(&geometric([0, 1], 6), &geometric([0, 2], 6), 6);
    let theta = trimmed(series_mul(&num, &den_inv, 6));
    ensure(theta == vec![[1, 0], [0, 0], [-1, 0]], || format!("oracle theta {theta:?}"))?;
    ensure(r.get("theta").unwrap()["coefficients"] == z2_json(&theta), || "theta coefficients".into())?;
    // 1 - u^2 = 2 (1 - u) - (1 - u)^2
    let stark = r.get("stark").unwrap();
    ensure(stark["leading_term"] == json!([2, 0]), || format!("a_1 = {}", stark["leading_term"]))?;
    let eps = json!([{"basis": "u1", "value": "1/1"}, {"basis": "u2", "value": "0/1"}]);
    ensure(stark["epsilon"] == eps, || format!("epsilon {}", stark["epsilon"]))?;
    // u1 = omega^2 (t + omega) with omega^2 = omega + 1
    let u1 = &r.get("units").unwrap()["st_basis"][0];
    ensure(*u1 == json!({"constant": [1, 1], "factors": [[[[0, 1]], 1]]}), || format!("u1 = {u1}"))?;
    let checks = r.get("checks").unwrap();
    for v in ["conjB", "strong", "thm321", "cor322"] {
        ensure(checks[v] == "pass", || format!("{v}: {}", checks[v]))?;
    }
    ensure(r.passed(), || format!("report status {checks}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("epsilon = (1, 0), a_1 = 2, {elapsed:.2?}"))
}

fn finite(c: &[u64]) -> Place {
    let mut f = c.to_vec();
    f.push(1);
    Place::Finite(f)
}

fn criterion_euler() -> Outcome {
    let start = Instant::now();
    let f2 = Field::prime(2).unwrap();
    let f3 = Field::prime(3).unwrap();
    let one = vec![BigInt::from(1)];
    let cases: Vec<(Arc<Field>, usize, Vec<Place>, Vec<Place>)> = vec![
        (f2.clone(), 2, vec![Place::Infinite], vec![finite(&[1, 1, 0])]),
        (f2.clone(), 3, vec![Place::Infinite, finite(&[0])], vec![finite(&[1])]),
        (f2.clone(), 4, vec![finite(&[1, 1])], vec![finite(&[0])]),
        (f2.clone(), 4, vec![Place::Infinite, finite(&[1, 1]), finite(&[1, 1, 0, 0])], vec![finite(&[1, 0, 1])]),
        (f3.clone(), 2, vec![Place::Infinite], vec![finite(&[0])]),
        (f3.clone(), 3, vec![Place::Infinite, finite(&[1])], vec![finite(&[1, 0])]),
        (f3.clone(), 4, vec![finite(&[2])], vec![Place::Infinite]),
    ];
    let order = 10;
    for (field, nu, s, t) in &cases {
        let sc = Scenario::new(field, *nu, s.clone(), t.clone(), 0, one.clone()).map_err(|e| e.to_string())?;
        let closed = theta_st(&sc).map_err(|e| e.to_string())?.theta.truncate(order);
        let euler = euler_truncate(&sc, order).map_err(|e| e.to_string())?;
        ensure(closed == euler, || format!("p={} nu={nu} S={s:?}: {euler:?} vs {closed:?}", field.characteristic()))?;
    }
    // The bare Euler product for nu = 2 to order 2: three places of degree 1 and one of degree 2.
    let i1 = Scenario::new(&f2, 2, vec![Place::Infinite], vec![finite(&[1, 1, 0])], 0, one).unwrap();
    let bare = euler_product(&i1, 2).map_err(|e| e.to_string())?;
    let expected = ZGPoly::new(2, vec![ZG::from_i64(&[1, 0]), ZG::from_i64(&[0, 3]), ZG::from_i64(&[7, 0])]);
    ensure(bare == expected, || format!("bare product {bare:?}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} scenarios agree through u^{order}, {elapsed:.2?}", cases.len()))
}

fn sweep_params() -> SweepParams {
    SweepParams { p: 2, a: 1, nu_max: 4, deg_max: 4, r_max: 2, s_max: 3, t_deg_max: 3 }
}

fn criterion_cnf(s: &SweepSummary) -> Outcome {
    ensure(s.cnf_records.len() == s.total, || format!("{} of {} scenarios have formula data", s.cnf_records.len(), s.total))?;
    let bad: Vec<_> = s
        .failures
        .iter()
        .filter(|f| f.reasons.iter().any(|r| r == "cnf" || r == "norm_identity"))
        .map(|f| f.scenario.to_string())
        .collect();
    ensure(bad.is_empty(), || format!("formula fails for {}", bad.join("; ")))?;
    Ok(format!("|a_m| = |A_ST| R exactly on {} scenarios, observed signs {:?}", s.total, s.cnf_signs))
}

fn criterion_sweep(s: &SweepSummary) -> Outcome {
    let params = sweep_params();
    let points = generate(&params).map_err(|e| e.to_string())?;
    let distinct: BTreeSet<_> = points.iter().collect();
    ensure(distinct.len() == points.len(), || "generator repeats points".into())?;
    ensure(points == generate_by_filter(&params).map_err(|e| e.to_string())?, || "generator and filter disagree".into())?;
    ensure(s.generator_matches_filter, || "generator and filter disagree".into())?;
    ensure(s.all_passed(), || {
        let f: Vec<String> = s.failures.iter().take(5).map(|f| format!("{} {:?}", f.scenario, f.reasons)).collect();
        format!("{} failures, first: {}", s.failures.len(), f.join("; "))
    })?;
    let elapsed = Duration::from_secs_f64(s.elapsed_secs);
    ensure(elapsed < SWEEP_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("{}/{} scenarios pass all verdicts and invariants, {elapsed:.1?}", s.passed, s.total))
}

fn random_zg(rng: &mut ChaCha8Rng, nu: usize, bound: i64) -> ZG {
    ZG::from_i64(&(0..nu).map(|_| rng.gen_range(-bound..=bound)).collect::<Vec<_>>())
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::from_rows(cols, (0..rows).map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-9..=9))).collect()).collect())
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut rows = IntMatrix::identity(n).row_vecs();
    for _ in 0..rng.gen_range(0..8) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            rows.swap(i, (i + 1) % n);
        } else {
            let c: i64 = rng.gen_range(-3..=3);
            let add: Vec<BigInt> = rows[j].iter().map(|x| x * c).collect();
            for (a, b) in rows[i].iter_mut().zip(add) {
                *a += b;
            }
        }
    }
    IntMatrix::from_rows(n, rows)
}

fn run_trials(name: &str, rng: &mut ChaCha8Rng, mut trial: impl FnMut(&mut ChaCha8Rng) -> bool) -> Result<(), String> {
    for i in 0..PROPERTY_TRIALS {
        if !trial(rng) {
            return Err(format!("{name} failed at trial {i}"));
        }
    }
    Ok(())
}

fn criterion_properties() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    run_trials("cyclic Fitting ideal equals annihilator", &mut rng, |rng| {
        let nu = rng.gen_range(1..=6);
        let gens: Vec<ZG> = (0..rng.gen_range(0..3)).map(|_| random_zg(rng, nu, 4)).collect();
        laws::fitting_equals_annihilator_cyclic(nu, rng.gen_range(1..24), &gens)
    })?;
    run_trials("Fitting ideals of extensions and submodules", &mut rng, |rng| {
        let nu = rng.gen_range(1..=6);
        let (f, g, h) = (random_zg(rng, nu, 3), random_zg(rng, nu, 3), random_zg(rng, nu, 3));
        let (ext, sub) = laws::fitting_extension_laws(nu, rng.gen_range(1..10), &f, &g, &h, rng.gen_range(1..10));
        ext && sub
    })?;
    run_trials("Fitting index equals order over Z", &mut rng, |rng| {
        let n = rng.gen_range(1..=3);
        let rels: Vec<Vec<i64>> =
            (0..n + rng.gen_range(0..=2)).map(|_| (0..n).map(|_| rng.gen_range(-6..=6)).collect()).collect();
        laws::fitting_index_is_order(&rels)
    })?;
    run_trials("division by g with g(0) = 1", &mut rng, |rng| {
        let nu = rng.gen_range(1..=6);
        let mut g = vec![ZG::one(nu)];
        g.extend((0..rng.gen_range(0..4)).map(|_| random_zg(rng, nu, 5)));
        let h: Vec<ZG> = (0..rng.gen_range(1..5)).map(|_| random_zg(rng, nu, 5)).collect();
        laws::division_recovers_quotient(&ZGPoly::new(nu, g), &ZGPoly::new(nu, h))
    })?;
    run_trials("Hermite form reconstruction and canonicity", &mut rng, |rng| {
        let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let m = random_matrix(rng, r, c);
        laws::hnf_reconstructs(&m, &random_unimodular(rng, r))
    })?;
    run_trials("Smith form reconstruction and invariance", &mut rng, |rng| {
        let (r, c) = (rng.gen_range(1..5), rng.gen_range(1..5));
        let m = random_matrix(rng, r, c);
        laws::snf_reconstructs(&m, &random_unimodular(rng, r))
    })?;
    let exts: Vec<_> = [(2, 2), (2, 3), (3, 2)]
        .iter()
        .map(|&(p, nu)| make_extension(&Field::prime(p).unwrap(), nu).unwrap())
        .collect();
    run_trials("place action equivariance", &mut rng, |rng| {
        let ext = &exts[rng.gen_range(0..exts.len())];
        let size = ext.field.size();
        let mut f: Vec<u64> = (0..rng.gen_range(1..7)).map(|_| rng.gen_range(0..size)).collect();
        f.push(rng.gen_range(1..size));
        laws::galois_equivariance(ext, &f, rng.gen_range(0..4)) && laws::factorization_multiplies_back(ext, &f)
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < PROPERTY_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("7 laws x {PROPERTY_TRIALS} trials, {elapsed:.2?}"))
}

fn criterion_structural() -> Outcome {
    let mut seen = BTreeSet::new();
    // S = {t^4 + t + 1} with nu = 2: the place splits into two of degree 2, so l = 2 divides d_w
    let counting = r#"{"p": 2, "a": 1, "nu": 2, "S": [[[1], [1], [0], [0]]], "T": [[[0]]], "r": 0,
        "checks": ["classgroup", "structural", "lemma428"]}"#;
    for doc in [I1, I2, counting] {
        let (r, _) = verify(doc)?;
        let checks = r.get("checks").unwrap();
        ensure(checks["structural"] == "pass", || format!("structural: {}", checks["structural"]))?;
        ensure(checks["lemma428"] != "fail", || "coinvariant count failed".into())?;
        for c in r.get("structural").unwrap().as_array().unwrap() {
            ensure(c["passed"] == true, || format!("{c}"))?;
            let name = c["name"].as_str().unwrap();
            seen.insert(name[..name.find('[').unwrap_or(name.len())].to_string());
        }
    }
    let (r, _) = verify(counting)?;
    ensure(r.get("checks").unwrap()["lemma428"] == "pass", || "coinvariant count not applied".into())?;
    for family in ["quotient_order", "trivial_module_annihilator", "residue_annihilator", "coinvariant_count"] {
        ensure(seen.contains(family), || format!("{family} never ran"))?;
    }
    Ok(format!("{} check families pass exactly", seen.len()))
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ffstark-acceptance-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn bless() -> Result<(), String> {
    for f in scenario_files(&corpus_dir()).map_err(|e| e.to_string())? {
        let ps = parse_scenario(&fs::read_to_string(&f).unwrap()).map_err(|e| e.to_string())?;
        let r = run_verify(&ps, &RunOptions::default()).map_err(|e| e.to_string())?;
        fs::write(golden_path(&f), r.canonical()).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn check_corpus() -> Outcome {
    let opts = RunOptions::default();
    let dir = corpus_dir();
    let s = run_corpus(&dir, Some(2), &opts).map_err(|e| e.to_string())?;
    ensure(s.total == 3 && s.passed == 3, || format!("{}/{} pass: {:?}", s.passed, s.total, s.entries))?;

    let perturbed = scratch("perturbed");
    for f in scenario_files(&dir).map_err(|e| e.to_string())? {
        let name = f.file_name().unwrap();
        fs::copy(&f, perturbed.join(name)).unwrap();
        fs::copy(golden_path(&f), golden_path(&perturbed.join(name))).unwrap();
    }
    let victim = golden_path(&scenario_files(&perturbed).unwrap()[0]);
    let text = fs::read_to_string(&victim).unwrap().replacen("\"status\": \"pass\"", "\"status\": \"fail\"", 1);
    fs::write(&victim, text).unwrap();
    let p = run_corpus(&perturbed, Some(1), &opts).map_err(|e| e.to_string())?;
    ensure(p.mismatches == 1 && p.passed == 2, || format!("perturbed corpus: {} mismatches", p.mismatches))?;

    let empty = scratch("empty");
    let e = run_corpus(&empty, None, &opts).map_err(|e| e.to_string())?;
    ensure(e.total == 0 && e.passed == 0, || "empty corpus is not 0/0".into())?;
    let _ = fs::remove_dir_all(&perturbed);
    let _ = fs::remove_dir_all(&empty);

    let (a, _) = verify(I2)?;
    let (b, _) = verify(I2)?;
    ensure(a.canonical() == b.canonical(), || "reports differ between runs".into())?;
    Ok("golden corpus 3/3, perturbed golden 1 mismatch, empty 0/0, reports byte-identical".into())
}

fn main() {
    if std::env::var_os("FFSTARK_BLESS").is_some() {
        bless().expect("bless golden reports");
    }
    let sweep = run_sweep(&sweep_params(), &RunOptions::default());
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 worked instance I1", Box::new(criterion_i1)),
        ("2 worked instance I2", Box::new(criterion_i2)),
        ("3 Euler product agrees with closed form", Box::new(criterion_euler)),
        (
            "4 class-number formula over the sweep",
            Box::new(|| sweep.as_ref().map_err(|e| e.to_string()).and_then(criterion_cnf)),
        ),
        (
            "5 verdict and invariant sweep",
            Box::new(|| sweep.as_ref().map_err(|e| e.to_string()).and_then(criterion_sweep)),
        ),
        ("6 randomized property suites", Box::new(criterion_properties)),
        ("7 structural checks", Box::new(criterion_structural)),
        ("corpus and determinism", Box::new(check_corpus)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
