use std::process::{Command, Output};

fn sealsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sealsim"))
        .args(args)
        .env_remove("SEALSIM_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn decode_matrix_single_bit() {
    let o = sealsim(&["decode-matrix", "--bits", "0", "--theta", "0.5236", "--nu", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("row,p0,p1,row_sum\n"));
    let rows = csv_rows(&text);
    // 0.5236 rad is pi/6 to four decimals
    assert!((rows[0][1] - 0.625).abs() < 1e-5 && (rows[0][2] - 0.375).abs() < 1e-5);
    assert!((rows[1][1] - 0.375).abs() < 1e-5 && (rows[1][2] - 0.625).abs() < 1e-5);
    assert!(rows.iter().all(|r| (r[3] - 1.0).abs() < 1e-12));
}

#[test]
fn decode_matrix_flat_and_json() {
    let o = sealsim(&["decode-matrix", "--bits", "00", "--theta", "0", "--nu", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 4);
    for row in v["matrix"].as_array().unwrap() {
        assert!(row.as_array().unwrap().iter().all(|p| p.as_f64() == Some(0.25)));
    }
}

#[test]
fn decode_matrix_from_lambda_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("identity4.json");
    let rows: Vec<Vec<[f64; 2]>> = (0..4)
        .map(|r| (0..4).map(|c| [if r == c { 1.0 } else { 0.0 }, 0.0]).collect())
        .collect();
    std::fs::write(&path, serde_json::json!({"dim": 4, "lambda": rows}).to_string()).unwrap();
    let o = sealsim(&["decode-matrix", "--lambda-file", path.to_str().unwrap(), "--nu", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    for (r, row) in rows.iter().enumerate() {
        for c in 0..4 {
            assert_eq!(row[c + 1], if r == c { 1.0 } else { 0.0 });
        }
    }

    std::fs::write(&path, r#"{"dim": 2, "lambda": [[[1,0],[1,0]],[[0,0],[1,0]]]}"#).unwrap();
    let o = sealsim(&["decode-matrix", "--lambda-file", path.to_str().unwrap(), "--nu", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_csv_contract() {
    let o = sealsim(&["sweep", "--bits", "01", "--theta", "pi/4", "--grid", "0:1:5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().next(), Some("nu,mi_bits,guess_prob,escape_prob,flat_mass"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1] == 0.0));
}

#[test]
fn sweep_endpoints_match_decode_matrix() {
    let sweep = csv_rows(&stdout(&sealsim(&["sweep", "--bits", "0", "--theta", "pi/6", "--grid", "0,1"])));
    let dm = csv_rows(&stdout(&sealsim(&["decode-matrix", "--bits", "0", "--theta", "pi/6", "--nu", "1"])));
    let guess = (dm[0][1] + dm[1][2]) / 2.0;
    assert!((sweep[1][2] - guess).abs() < 1e-11);
    assert_eq!(sweep[0][1], 0.0);
    assert_eq!(sweep[0][3], 1.0);
}

#[test]
fn sweep_shape_on_four_qubit_seal() {
    let o = sealsim(&["sweep", "--bits", "0000", "--theta", "pi/12", "--grid", "0:1:21"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 21);
    assert!(rows.windows(2).all(|w| w[1][1] >= w[0][1]));
    assert!(rows.windows(2).all(|w| w[1][3] <= w[0][3]));
    let again = sealsim(&["sweep", "--bits", "0000", "--theta", "pi/12", "--grid", "0:1:21"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn sweep_rejects_bad_grid() {
    let o = sealsim(&["sweep", "--bits", "0", "--theta", "0", "--grid", "0.5,0.2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mc_validate_json_schema() {
    let args = ["mc-validate", "--bits", "0", "--theta", "pi/6", "--nu", "0.5", "--trials", "20000", "--seed", "9", "--format", "json"];
    let o = sealsim(&args);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys.len(), 4);
    for k in ["config", "decode_counts", "pass_count", "trials"] {
        assert!(keys.contains(&k));
    }
    assert_eq!(v["config"]["seed"], 9);
    assert!(v["config"]["generator"].as_str().unwrap().contains("ChaCha8"));
    assert_eq!(v["trials"], 20000);
    let counts: u64 = v["decode_counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(counts, 20000);
    assert_eq!(sealsim(&args).stdout, o.stdout);
}

#[test]
fn mc_validate_needs_one_strategy() {
    let o = sealsim(&["mc-validate", "--bits", "0", "--theta", "0", "--nu", "0.5", "--coin-q", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sealsim(&["mc-validate", "--bits", "0", "--theta", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sealsim(&["mc-validate", "--bits", "0", "--theta", "0", "--nu", "0.5", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seal_flag_errors() {
    assert_eq!(sealsim(&["decode-matrix", "--nu", "0.5"]).status.code(), Some(2));
    assert_eq!(sealsim(&["decode-matrix", "--bits", "0", "--nu", "0.5"]).status.code(), Some(2));
    assert_eq!(
        sealsim(&["decode-matrix", "--bits", "0", "--theta", "0", "--thetas", "0", "--nu", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(sealsim(&["decode-matrix", "--bits", "0", "--theta", "1.2", "--nu", "0.5"]).status.code(), Some(2));
    assert_eq!(sealsim(&["decode-matrix", "--bits", "0", "--theta", "0", "--nu", "1.5"]).status.code(), Some(2));
}

#[test]
fn dimension_cap_is_a_resource_error() {
    let o = sealsim(&["decode-matrix", "--bits", "0000000000000", "--theta", "0", "--nu", "0.5"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_sealsim"))
        .args(["decode-matrix", "--bits", "0000", "--theta", "0", "--nu", "0.5"])
        .env("SEALSIM_MAX_DIM", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn claims_negative_control() {
    let o = sealsim(&["claims", "--trials", "2000", "--inject-fault", "b-sign"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL [ 1] POVM completeness"));
}

#[test]
fn claims_resource_limit() {
    let o = Command::new(env!("CARGO_BIN_EXE_sealsim"))
        .args(["claims", "--trials", "1000"])
        .env("SEALSIM_MAX_DIM", "64")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = sealsim(&["sweep", "--bits", "0", "--theta", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().starts_with("nu,"));
}
