use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_censim");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> (String, String) {
    let out = run(args);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(out.status.success(), "{args:?} failed: {stderr}");
    (String::from_utf8(out.stdout).unwrap(), stderr)
}

fn stderr_value(stderr: &str, key: &str) -> f64 {
    let line = stderr.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no `{key}` in {stderr}"));
    line[key.len()..].trim().parse().unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn weibull(extra: &[&'static str]) -> Vec<&'static str> {
    let mut v = vec!["sample", "--dist", "weibull", "--alpha", "1.5", "--beta", "2.5"];
    v.extend_from_slice(extra);
    v
}

#[test]
fn type_ii_sample_has_m_censored_rows() {
    let (csv, stderr) = ok(&weibull(&["--n", "50", "--censoring", "type2", "--m", "15", "--seed", "7"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,delta"));
    let zeros = lines.filter(|l| l.ends_with(",0")).count();
    assert_eq!(zeros, 15);
    assert_eq!(stderr_value(&stderr, "seed:"), 7.0);
    assert!((stderr_value(&stderr, "censored fraction:") - 0.3).abs() < 1e-12);
}

#[test]
fn random_censoring_fraction() {
    let (_, stderr) = ok(&weibull(&["--n", "100000", "--censoring", "random", "--lambda", "1.22", "--seed", "1"]));
    let fraction = stderr_value(&stderr, "censored fraction:");
    assert!((fraction - 0.395).abs() < 0.01, "{fraction}");
}

#[test]
fn plc_draws_respect_lower_bound() {
    let (csv, _) = ok(&["sample", "--dist", "plc", "--alpha", "1.5", "--beta", "0.5", "--xmin", "1", "--n", "10000"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t"));
    let values: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 10000);
    assert!(values.iter().all(|&x| x >= 1.0));
}

#[test]
fn mixture_and_cure_samples() {
    let (csv, _) = ok(&[
        "sample", "--dist", "mixture", "--alpha", "1.5", "--beta", "2.5", "--alpha2", "3", "--beta2", "1", "--p1", "0.4",
        "--n", "20", "--seed", "2",
    ]);
    assert_eq!(csv.lines().count(), 21);

    let dir = tempfile::tempdir().unwrap();
    let latent = dir.path().join("latent.csv");
    let (csv, stderr) = ok(&[
        "sample", "--dist", "cure", "--alpha", "1.5", "--beta", "2.5", "--cure-p", "0.3", "--lambda", "1.11",
        "--n", "500", "--seed", "3", "--latent-out", latent.to_str().unwrap(),
    ]);
    assert_eq!(csv.lines().next(), Some("t,delta"));
    assert!(stderr_value(&stderr, "censored fraction:") > 0.3);
    let latent = std::fs::read_to_string(latent).unwrap();
    assert_eq!(latent.lines().next(), Some("t,delta,cured,latent,c"));
    assert_eq!(latent.lines().count(), 501);
}

#[test]
fn calibrate_closed_forms() {
    let (out, _) = ok(&["calibrate", "--scheme", "type1", "--pi", "0.4", "--alpha", "1.5", "--beta", "2.5"]);
    assert_eq!(out.trim(), "0.512148");
    assert!((out.trim().parse::<f64>().unwrap() - 0.5121).abs() < 5e-4);
    let (out, _) = ok(&["calibrate", "--scheme", "random", "--pi", "0.4", "--alpha", "1.5", "--beta", "2.5"]);
    assert_eq!(out.trim(), "1.22521");
    let (out, _) = ok(&["calibrate", "--scheme", "random-exact", "--pi", "0.4", "--alpha", "1.5", "--beta", "2.5"]);
    assert_eq!(out.trim(), "1.20461");
}

#[test]
fn calibrate_cure_grid_across_seeds() {
    for seed in ["11", "12", "13"] {
        let (out, _) = ok(&[
            "calibrate", "--scheme", "cure-grid", "--pi", "0.6", "--cure-p", "0.3", "--alpha", "1.5", "--beta", "2.5",
            "--seed", seed,
        ]);
        let lambda: f64 = out.trim().parse().unwrap();
        assert!((lambda - 1.11).abs() < 0.1, "seed {seed}: {lambda}");
    }
}

#[test]
fn unreachable_cure_target_exits_one() {
    let out = run(&[
        "calibrate", "--scheme", "cure-grid", "--pi", "0.2", "--cure-p", "0.3", "--alpha", "1.5", "--beta", "2.5",
        "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unreachable"));
}

#[test]
fn validation_names_the_flag() {
    let cases: &[(&[&str], &str)] = &[
        (&["sample", "--dist", "weibull", "--beta", "2.5", "--n", "5"], "--alpha"),
        (&["sample", "--dist", "mixture", "--alpha", "1", "--beta", "1", "--n", "5"], "--alpha2"),
        (&["sample", "--dist", "plc", "--alpha", "1", "--beta", "1", "--n", "5"], "--xmin"),
        (&["sample", "--dist", "cure", "--alpha", "1", "--beta", "1", "--n", "5", "--lambda", "1"], "--cure-p"),
        (&["sample", "--dist", "weibull", "--alpha", "-1", "--beta", "1", "--n", "5"], "--alpha"),
        (&["sample", "--dist", "weibull", "--alpha", "1", "--beta", "1", "--n", "5", "--censoring", "type2", "--m", "5"], "--m"),
        (&["calibrate", "--scheme", "type1", "--pi", "1.5", "--alpha", "1", "--beta", "1"], "--pi"),
    ];
    for (args, flag) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(flag), "{args:?}: {stderr}");
    }
}

#[test]
fn fit_printed_type_ii_sample() {
    let (json, _) = ok(&["fit", "--scheme", "type2", "--in", &fixture("type_ii.csv")]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["converged"], true);
    let est = v["estimates"].as_array().unwrap();
    assert!((est[0].as_f64().unwrap() - 1.25).abs() < 0.05);
    assert!((est[1].as_f64().unwrap() - 1.92).abs() < 0.05);
}

#[test]
fn fit_level_changes_interval() {
    let (j95, _) = ok(&["fit", "--scheme", "random", "--in", &fixture("random.csv")]);
    let (j90, _) = ok(&["fit", "--scheme", "random", "--in", &fixture("random.csv"), "--level", "0.9"]);
    let a: serde_json::Value = serde_json::from_str(&j95).unwrap();
    let b: serde_json::Value = serde_json::from_str(&j90).unwrap();
    assert_eq!(b["ci"]["level"], 0.9);
    let width = |v: &serde_json::Value| v["ci"]["upper"][0].as_f64().unwrap() - v["ci"]["lower"][0].as_f64().unwrap();
    assert!(width(&b) < width(&a));
}

#[test]
fn fit_rejects_missing_delta() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    std::fs::write(&path, "t\n0.5\n1.2\n0.7\n").unwrap();
    let out = run(&["fit", "--scheme", "type2", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn fit_reports_parse_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "t,delta\n0.5,1\n1.2,x\n").unwrap();
    let out = run(&["fit", "--scheme", "random", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn sample_then_fit_recovers_truth() {
    let dir = tempfile::tempdir().unwrap();
    let schemes: &[(&[&str], &[&str])] = &[
        (&["--censoring", "type2", "--pi", "0.4"], &["--scheme", "type2"]),
        (&["--censoring", "type1", "--tc", "0.512148"], &["--scheme", "type1", "--tc", "0.512148"]),
        (&["--censoring", "random", "--pi", "0.4"], &["--scheme", "random"]),
    ];
    for (i, (censor, fit)) in schemes.iter().enumerate() {
        let path = dir.path().join(format!("s{i}.csv"));
        let mut args = weibull(&["--n", "50000", "--seed", "20"]);
        args.extend_from_slice(censor);
        args.extend_from_slice(&["--out", path.to_str().unwrap()]);
        ok(&args);
        let mut args = vec!["fit", "--in", path.to_str().unwrap()];
        args.extend_from_slice(fit);
        let (json, _) = ok(&args);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let est = v["estimates"].as_array().unwrap();
        assert!((est[0].as_f64().unwrap() - 1.5).abs() < 0.03, "{fit:?}: {json}");
        assert!((est[1].as_f64().unwrap() - 2.5).abs() < 0.03, "{fit:?}: {json}");
    }
}

#[test]
fn plc_sample_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plc.csv");
    ok(&[
        "sample", "--dist", "plc", "--alpha", "1.5", "--beta", "0.5", "--xmin", "1", "--n", "2000", "--seed", "5",
        "--out", path.to_str().unwrap(),
    ]);
    let (json, _) = ok(&["fit", "--scheme", "plc", "--xmin", "1", "--in", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let est = v["estimates"].as_array().unwrap();
    let se = v["std_errors"].as_array().unwrap();
    for (k, truth) in [1.5, 0.5].iter().enumerate() {
        let (e, s) = (est[k].as_f64().unwrap(), se[k].as_f64().unwrap());
        assert!((e - truth).abs() < 4.0 * s, "{json}");
    }
}

#[test]
fn same_seed_same_bytes() {
    let args = weibull(&["--n", "200", "--censoring", "random", "--pi", "0.3", "--seed", "99"]);
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let plc = ["sample", "--dist", "plc", "--alpha", "1.5", "--beta", "0.5", "--xmin", "1", "--n", "50", "--seed", "9"];
    assert_eq!(run(&plc).stdout, run(&plc).stdout);
}

#[test]
fn echoed_seed_reproduces_output() {
    let args = weibull(&["--n", "100", "--censoring", "random", "--lambda", "1.2"]);
    let first = run(&args);
    let stderr = String::from_utf8(first.stderr).unwrap();
    let seed_text = stderr.lines().next().unwrap()["seed:".len()..].trim().to_string();
    seed_text.parse::<u64>().expect("seed echoed as an integer");
    let mut again = args.clone();
    again.extend_from_slice(&["--seed", &seed_text]);
    let second = run(&again);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn mc_oracle_fitter_has_zero_bias() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("oracle");
    let (_, stderr) = ok(&[
        "mc", "--scheme", "type1,type2,random", "--pi", "0.4", "--alpha", "1.5", "--beta", "2.5", "--n-grid", "10,40",
        "--replications", "30", "--seed", "3", "--oracle-fitter", "--out-prefix", prefix.to_str().unwrap(),
    ]);
    assert!(stderr.contains("wall clock"));
    let csv = std::fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("scheme,n,parameter,bias,mse,cp,failed"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 2 * 2);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[3].parse::<f64>().unwrap(), 0.0, "{row}");
        assert_eq!(f[4].parse::<f64>().unwrap(), 0.0, "{row}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("oracle.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
}

#[test]
fn mc_config_file_and_thread_independence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.json");
    std::fs::write(
        &config,
        r#"{"schemes":[{"scheme":"random","censoring":0.3},{"scheme":"cure","p":0.3,"lambda":3.11}],
            "alpha":1.5,"beta":2.5,"n_grid":[30],"replications":300,"master_seed":8}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let prefix = dir.path().join(format!("t{threads}"));
        ok(&[
            "mc", "--config", config.to_str().unwrap(), "--threads", threads, "--out-prefix", prefix.to_str().unwrap(),
        ]);
        outputs.push((
            std::fs::read(dir.path().join(format!("t{threads}.csv"))).unwrap(),
            std::fs::read(dir.path().join(format!("t{threads}.json"))).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn mc_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"schemes":[{"scheme":"type3","censoring":0.3}],"alpha":1.5}"#).unwrap();
    let prefix = dir.path().join("out");
    let out = run(&["mc", "--config", config.to_str().unwrap(), "--out-prefix", prefix.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("out.csv").exists());
}
