//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero
//! when any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kgval::confidence::{
    instance_confidence, levenshtein, similarity, triple_confidence, InstanceScore, SimilarityFunction,
    SimilarityKind, SourceRegistry, SourceValues,
};
use kgval::matching::normalize::NormalizerKind;
use kgval::pipeline::{validate_kg, RunConfig, ValidationReport};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

struct Outcome {
    name: &'static str,
    result: Result<String, String>,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
    match &result {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(detail) => println!("FAIL {name}: {detail}"),
    }
    Outcome { name, result }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- scoring

/// A random scoring problem: `sims[k][i]` for property k and source i.
#[derive(Debug, Clone)]
struct Case {
    sims: Vec<Vec<f64>>,
    matched: Vec<bool>,
    weights: Vec<f64>,
}

fn random_case(rng: &mut StdRng) -> Case {
    let m = rng.random_range(1..=5);
    let big_m = rng.random_range(1..=6);
    let matched: Vec<bool> = (0..m).map(|_| rng.random_bool(0.8)).collect();
    let sims = (0..big_m)
        .map(|_| (0..m).map(|i| if matched[i] { rng.random_range(0..=4) as f64 * 0.25 } else { 0.0 }).collect())
        .collect();
    let weights = (0..m).map(|_| if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..10.0) }).collect();
    Case { sims, matched, weights }
}

const KG_VALUE: &str = "abcd";

/// A source value whose normalized Levenshtein similarity to `abcd` is `sim`.
fn value_with_sim(sim: f64) -> String {
    let wrong = ((1.0 - sim) * 4.0).round() as usize;
    KG_VALUE.chars().take(4 - wrong).chain("wxyz".chars().skip(4 - wrong)).collect()
}

const LEV: SimilarityFunction = SimilarityFunction::new(SimilarityKind::LevenshteinNormalized, NormalizerKind::Generic);

/// Scores a case through the library, starting from raw values.
fn score_case(case: &Case, weights: Option<&[f64]>, threshold: f64) -> InstanceScore {
    let ids: Vec<String> = (0..case.matched.len()).map(|i| format!("s{i}")).collect();
    let registry = SourceRegistry::new(ids.clone(), weights).unwrap();
    let kg = vec![KG_VALUE.to_owned()];
    let triples = case
        .sims
        .iter()
        .enumerate()
        .map(|(k, row)| {
            let values: Vec<Vec<String>> =
                row.iter().zip(&case.matched).map(|(&s, &m)| if m { vec![value_with_sim(s)] } else { vec![] }).collect();
            let evidence: Vec<SourceValues> = ids
                .iter()
                .zip(&values)
                .zip(&case.matched)
                .map(|((id, v), &matched)| SourceValues { source_id: id, matched, values: v })
                .collect();
            triple_confidence("http://x/s", &format!("p{k}"), &kg, &evidence, LEV, &registry)
        })
        .collect();
    instance_confidence("http://x/s", triples, threshold).unwrap()
}

/// Triple scores and instance confidence straight from the formulas,
/// with raw (unnormalized) weights.
fn brute_force(case: &Case) -> (Vec<f64>, Vec<f64>, f64) {
    let m = case.weights.len();
    let all_zero = case.weights.iter().all(|&w| w == 0.0);
    let w: Vec<f64> = if all_zero { vec![1.0; m] } else { case.weights.clone() };
    let w_sum: f64 = w.iter().sum();
    let unweighted: Vec<f64> = case.sims.iter().map(|row| row.iter().sum()).collect();
    let weighted: Vec<f64> =
        case.sims.iter().map(|row| row.iter().zip(&w).map(|(s, w)| s * w).sum::<f64>() / w_sum).collect();
    let confidence = weighted.iter().sum::<f64>() / weighted.len() as f64;
    (unweighted, weighted, confidence)
}

fn equation_oracle() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut worst: f64 = 0.0;
    for n in 0..1000 {
        let case = random_case(&mut rng);
        let got = score_case(&case, Some(&case.weights), 0.5);
        let (unweighted, weighted, confidence) = brute_force(&case);
        for (k, t) in got.triples.iter().enumerate() {
            worst = worst.max((t.unweighted - unweighted[k]).abs()).max((t.weighted - weighted[k]).abs());
        }
        worst = worst.max((got.confidence - confidence).abs());
        ensure(worst <= 1e-9, || format!("case {n} deviates by {worst:e}: {case:?}"))?;
        ensure(got.valid == (got.confidence > 0.5), || format!("case {n}: validity is not strict"))?;
        if (confidence - 0.5).abs() > 1e-9 {
            ensure(got.valid == (confidence > 0.5), || format!("case {n}: validity disagrees"))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 cases, max deviation {worst:e}, {elapsed:.2?}"))
}

fn scaling_invariance() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let mut worst: f64 = 0.0;
    for n in 0..100 {
        let case = random_case(&mut rng);
        let base = score_case(&case, Some(&case.weights), 0.5);
        for lambda in [0.1, 3.0, 1000.0] {
            let scaled: Vec<f64> = case.weights.iter().map(|w| w * lambda).collect();
            let other = score_case(&case, Some(&scaled), 0.5);
            for (a, b) in base.triples.iter().zip(&other.triples) {
                worst = worst.max((a.weighted - b.weighted).abs());
            }
            worst = worst.max((base.confidence - other.confidence).abs());
            ensure(worst <= 1e-12, || format!("case {n}, lambda {lambda}: deviation {worst:e}"))?;
        }
    }
    Ok(format!("100 cases x 3 factors, max deviation {worst:e}"))
}

fn uniform_identity() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    for n in 0..1000 {
        let case = random_case(&mut rng);
        let m = case.matched.len() as f64;
        let uniform = vec![1.0 / m; case.matched.len()];
        for weights in [None, Some(uniform.as_slice())] {
            let got = score_case(&case, weights, 0.5);
            for t in &got.triples {
                ensure(t.weighted == t.unweighted / m, || {
                    format!("case {n}: weighted {} != unweighted/m {}", t.weighted, t.unweighted / m)
                })?;
            }
        }
    }
    Ok("1000 cases, exact equality".into())
}

/// Full-matrix Wagner-Fischer over Unicode scalar values.
fn dp_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

fn dp_similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        1.0
    } else {
        1.0 - dp_distance(a, b) as f64 / longest as f64
    }
}

fn similarity_kernel() -> Result<String, String> {
    const ALPHABET: [char; 12] = ['a', 'b', 'c', 'd', 'e', 'n', '0', '1', 'ä', 'ö', 'ß', 'é'];
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let word = |rng: &mut StdRng| -> String {
        let len = rng.random_range(0..=40);
        (0..len).map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())]).collect()
    };
    for n in 0..1000 {
        let (a, b) = (word(&mut rng), word(&mut rng));
        let d = levenshtein(&a, &b);
        ensure(d == dp_distance(&a, &b), || format!("pair {n} ({a:?}, {b:?}): distance {d} vs {}", dp_distance(&a, &b)))?;
        let s = similarity(&a, &b, LEV);
        ensure(s == dp_similarity(&a, &b), || format!("pair {n}: similarity {s} vs {}", dp_similarity(&a, &b)))?;
        ensure(s == similarity(&b, &a, LEV), || format!("pair {n}: asymmetric"))?;
        ensure((0.0..=1.0).contains(&s), || format!("pair {n}: {s} out of range"))?;
    }
    Ok("1000 pairs, exact agreement, symmetric, within [0, 1]".into())
}

// --------------------------------------------------------------- pipeline

fn load_config(path: &Path, edit: impl FnOnce(&mut Value)) -> RunConfig {
    let mut value: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    edit(&mut value);
    RunConfig::from_json(&value.to_string(), path.parent().unwrap()).unwrap()
}

fn run(config: &RunConfig) -> Result<ValidationReport, String> {
    validate_kg(config).map_err(|e| e.to_string())
}

fn hotel_benchmark() -> Result<String, String> {
    let dir = fixtures().join("hotels");
    let start = Instant::now();
    let report = run(&load_config(&dir.join("config.json"), |_| {}))?;
    let elapsed = start.elapsed();

    let expected = std::fs::read_to_string(dir.join("expected_report.json")).unwrap();
    ensure(report.canonical_json() == expected, || "canonical report differs from the expectation file".into())?;
    let expected_metrics = std::fs::read_to_string(dir.join("expected_metrics.csv")).unwrap();
    let metrics_csv = report.metrics_csv().ok_or("no metrics computed")?;
    ensure(metrics_csv == expected_metrics, || format!("metrics differ:\n{metrics_csv}"))?;

    let metrics = report.metrics.as_ref().unwrap();
    let mut f1s = Vec::new();
    for p in ["name", "address", "phone"] {
        let f1 = metrics.per_property[p].f1;
        ensure(f1 >= 0.75, || format!("{p} f-measure {f1:.4} below 0.75"))?;
        f1s.push(format!("{p} {f1:.4}"));
    }
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("f-measure {}, {elapsed:.2?}", f1s.join(", ")))
}

fn politician_run() -> Result<String, String> {
    let path = fixtures().join("politicians/config.json");
    let expected: Value =
        serde_json::from_str(&std::fs::read_to_string(fixtures().join("politicians/expected_recall.json")).unwrap())
            .unwrap();
    let start = Instant::now();
    let report = run(&load_config(&path, |_| {}))?;
    let elapsed = start.elapsed();
    ensure(elapsed <= Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    let count = expected["instances"].as_u64().unwrap() as usize;
    ensure(report.instances.len() == count, || {
        format!("{} instances scored, {} skipped", report.instances.len(), report.skipped.len())
    })?;

    let recall = &report.metrics.as_ref().ok_or("no metrics computed")?.recall_by_source;
    let mut parts = Vec::new();
    for (source, target) in [("wikidata", 0.49), ("dbpedia", 0.36)] {
        let got = recall.get(source).copied().ok_or_else(|| format!("no recall for {source}"))?;
        ensure((got - target).abs() <= 0.01, || format!("{source} recall {got:.4}, expected {target} +- 0.01"))?;
        let constructed = expected["recallBySource"][source].as_f64().unwrap();
        ensure((got - constructed).abs() <= 1e-12, || format!("{source} recall {got} vs constructed {constructed}"))?;
        parts.push(format!("{source} {got:.4}"));
    }

    let again = run(&load_config(&path, |_| {}))?;
    ensure(again.canonical_json() == report.canonical_json(), || "second run differs".into())?;
    Ok(format!("{count} instances in {elapsed:.2?}, recall {}, repeat identical", parts.join(", ")))
}

fn determinism() -> Result<String, String> {
    let path = fixtures().join("hotels/config.json");
    let a = run(&load_config(&path, |_| {}))?.canonical_json();
    let b = run(&load_config(&path, |_| {}))?.canonical_json();
    ensure(a == b, || "two identical runs differ".into())?;
    let one = run(&load_config(&path, |v| v["concurrency"] = 1.into()))?.canonical_json();
    let many = run(&load_config(&path, |v| v["concurrency"] = 8.into()))?.canonical_json();
    ensure(one == many, || "concurrency 1 and 8 differ".into())?;
    ensure(one == a, || "explicit concurrency changes the report".into())?;
    Ok(format!("{} bytes identical across 4 runs (concurrency default, 1, 8)", a.len()))
}

fn threshold_boundary() -> Result<String, String> {
    let case = Case { sims: vec![vec![1.0], vec![0.0]], matched: vec![true], weights: vec![1.0] };
    let exact = score_case(&case, None, 0.5);
    ensure(exact.confidence == 0.5 && !exact.valid, || format!("confidence {} valid {}", exact.confidence, exact.valid))?;
    let below = score_case(&case, None, 0.4999);
    ensure(below.valid, || "0.5 not valid at threshold 0.4999".into())?;

    let mut report = run(&load_config(&fixtures().join("hotels/config.json"), |_| {}))?;
    let t = report.instances.iter().map(|i| i.score.confidence).find(|c| *c > 0.0 && *c < 1.0).ok_or("no interior score")?;
    report.rescore(None, Some(t)).map_err(|e| e.to_string())?;
    let at = report.instances.iter().filter(|i| i.score.confidence == t).count();
    ensure(report.instances.iter().all(|i| i.score.valid == (i.score.confidence > t)), || "validity is not strict".into())?;
    ensure(report.instances.iter().filter(|i| i.score.confidence == t).all(|i| !i.score.valid), || {
        "instance at the threshold classified valid".into()
    })?;
    Ok(format!("confidence == t is invalid (synthetic case and {at} hotel instances at t = {t:.4})"))
}

fn robustness() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let closed = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap();
    let hotels = fixtures().join("hotels");
    let mut config: Value = serde_json::from_str(&std::fs::read_to_string(hotels.join("config.json")).unwrap()).unwrap();
    for key in ["input", "domainSpec", "baseline"] {
        let resolve = |s: &str| hotels.join(s).display().to_string();
        match &mut config[key] {
            Value::String(s) => *s = resolve(s),
            Value::Object(o) => {
                let t = o["turtle"].as_str().unwrap().to_owned();
                o.insert("turtle".into(), resolve(&t).into());
            }
            _ => {}
        }
    }
    for source in config["sources"].as_array_mut().unwrap() {
        let endpoint = source["endpoint"].as_str().unwrap().to_owned();
        source["endpoint"] = hotels.join(endpoint).display().to_string().into();
    }
    config["sources"].as_array_mut().unwrap().push(serde_json::json!({
        "id": "broken", "kind": "places-http", "endpoint": format!("http://{closed}/search"), "rateLimit": 1000
    }));
    config["weights"] = serde_json::json!([1, 1, 1, 1]);
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let output = dir.path().join("report.json");

    let status = Command::new(env!("CARGO_BIN_EXE_kgval"))
        .args(["validate", "--config"])
        .arg(&config_path)
        .arg("--output")
        .arg(&output)
        .env_remove("VALIDATOR_CACHE_DIR")
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.code() == Some(0), || format!("exit status {status}"))?;

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&output).map_err(|e| e.to_string())?).unwrap();
    let instances = report["instances"].as_array().unwrap();
    ensure(!instances.is_empty(), || "no instances scored".into())?;
    let mut evidence = 0;
    for instance in instances {
        let m = instance["matches"].as_array().unwrap().iter().find(|m| m["sourceId"] == "broken").ok_or("no match entry")?;
        ensure(m["matched"] == false && m["error"].as_str().is_some_and(|e| !e.is_empty()), || {
            format!("missing error annotation on {}", instance["subject"])
        })?;
        for triple in instance["triples"].as_array().unwrap() {
            let e = triple["perSource"].as_array().unwrap().iter().find(|e| e["sourceId"] == "broken").ok_or("no evidence")?;
            ensure(e["sim"].as_f64() == Some(0.0), || format!("nonzero sim from the failing source: {e}"))?;
            evidence += 1;
        }
    }
    Ok(format!("exit 0, {} instances annotated, {evidence} triples with sim 0 from the failing source", instances.len()))
}

fn main() {
    let outcomes = [
        check("equation oracle", equation_oracle),
        check("weight-scaling invariance", scaling_invariance),
        check("uniform-weight identity", uniform_identity),
        check("similarity kernel", similarity_kernel),
        check("hotel fixture benchmark", hotel_benchmark),
        check("politician-scale run", politician_run),
        check("end-to-end determinism", determinism),
        check("threshold boundary", threshold_boundary),
        check("robustness to failing source", robustness),
    ];
    let failed: Vec<&str> = outcomes.iter().filter(|o| o.result.is_err()).map(|o| o.name).collect();
    println!("{} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        eprintln!("failed: {failed:?}");
        std::process::exit(1);
    }
}
