use std::path::PathBuf;

use serde_json::{json, Value};
use varreg::harness::{derive_seeds, run_rate_experiment, write_rows, ExperimentConfig, RateReport, RowStatus};

fn config(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(cfg: &Value) -> RateReport {
    run_rate_experiment(&ExperimentConfig::from_json_str(&cfg.to_string()).unwrap()).unwrap()
}

fn csv_bytes(report: &RateReport) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows(&report.rows, &mut buf).unwrap();
    buf
}

fn with_smoothness(mut cfg: Value, s: f64) -> Value {
    cfg["truth"]["s"] = json!(s);
    cfg
}

fn apriori(mut cfg: Value) -> Value {
    cfg["rule"] = json!({"kind": "apriori", "c_l": 0.5, "c_r": 2.0, "rho": "auto"});
    cfg
}

#[test]
fn identical_configs_give_identical_csv() {
    let cfg = config("rates_group_q2.json");
    assert_eq!(csv_bytes(&run(&cfg)), csv_bytes(&run(&cfg)));
    let cfg = apriori(cfg);
    assert_eq!(csv_bytes(&run(&cfg)), csv_bytes(&run(&cfg)));
}

#[test]
fn seed_changes_the_rows() {
    let cfg = config("rates_group_q2.json");
    let mut other = cfg.clone();
    other["seed"] = json!(7);
    assert_ne!(csv_bytes(&run(&cfg)), csv_bytes(&run(&other)));
    let (t, rows) = derive_seeds(7, 5);
    assert_eq!(derive_seeds(7, 5), (t, rows.clone()));
    let mut uniq = rows.clone();
    uniq.push(t);
    uniq.sort();
    uniq.dedup();
    assert_eq!(uniq.len(), 6);
}

#[test]
fn slope_increases_with_smoothness() {
    for base in [config("rates_group_q2.json"), apriori(config("rates_group_q2.json"))] {
        let slopes: Vec<f64> =
            [0.25, 0.5, 0.75].iter().map(|&s| run(&with_smoothness(base.clone(), s)).fitted_slope).collect();
        assert!(slopes.windows(2).all(|w| w[1] > w[0]), "slopes {slopes:?}");
    }
}

#[test]
fn rows_respect_image_bounds() {
    for cfg in [
        config("rates_group_q2.json"),
        apriori(config("rates_group_q2.json")),
        with_smoothness(config("rates_group_q2.json"), 0.25),
    ] {
        let report = run(&cfg);
        assert_eq!(report.rows.len(), 13);
        for row in &report.rows {
            assert!(row.image_error <= row.image_bound + 1e-8, "{row:?}");
            assert!(row.delta > 0.0 && row.error.is_finite());
            if row.status == RowStatus::Window {
                assert!(
                    row.residual >= 1.5 * row.delta * (1.0 - 1e-12) && row.residual <= 2.0 * row.delta * (1.0 + 1e-12)
                );
            }
        }
        assert!(report.rows.windows(2).all(|w| w[1].delta < w[0].delta));
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = config("rates_group_q2.json");
    cfg["colour"] = json!("blue");
    assert!(ExperimentConfig::from_json_str(&cfg.to_string()).is_err());
    let mut cfg = config("rates_group_q2.json");
    cfg["truth"]["s"] = json!(1.5);
    assert!(ExperimentConfig::from_json_str(&cfg.to_string()).is_err());
}
