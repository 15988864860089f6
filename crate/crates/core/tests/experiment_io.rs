use ultrasmall::experiment::{self, aggregate, read_rows_csv, write_rows_csv, ReportFormat};
use ultrasmall::ExperimentConfig;

fn config(model: &str) -> ExperimentConfig {
    let params = match model {
        "cm" => r#"{"model":"cm","tau":2.5,"d_min":3}"#,
        _ => r#"{"model":"pam","m":2,"delta":-1}"#,
    };
    ExperimentConfig::from_json(&format!(
        r#"{{"params":{params},"sizes":[200,400],"replicas":3,"seed_base":5,
            "measurements":["diameter","typical","mkc","core","exploration"]}}"#
    ))
    .unwrap()
}

fn csv_bytes(cfg: &ExperimentConfig, threads: usize) -> Vec<u8> {
    let result = experiment::run(cfg, Some(threads)).unwrap();
    let mut buf = Vec::new();
    write_rows_csv(&result.rows, &mut buf).unwrap();
    buf
}

#[test]
fn same_config_gives_identical_rows() {
    for model in ["cm", "pam"] {
        let cfg = config(model);
        assert_eq!(csv_bytes(&cfg, 1), csv_bytes(&cfg, 2), "{model}");
    }
}

#[test]
fn csv_round_trip_reproduces_aggregates() {
    let cfg = config("cm");
    let result = experiment::run(&cfg, Some(1)).unwrap();
    let mut buf = Vec::new();
    write_rows_csv(&result.rows, &mut buf).unwrap();
    let rows = read_rows_csv(buf.as_slice()).unwrap();
    assert_eq!(rows.len(), result.rows.len());
    let again = aggregate(&cfg, &rows).unwrap();
    assert_eq!(again.len(), result.aggregates.len());
    for (a, b) in result.aggregates.iter().zip(&again) {
        assert_eq!(a.size, b.size);
        assert_eq!(a.columns.keys().collect::<Vec<_>>(), b.columns.keys().collect::<Vec<_>>());
        for (name, x) in &a.columns {
            let y = &b.columns[name];
            assert_eq!(x.count, y.count, "{name}");
            for (u, v) in [(x.mean, y.mean), (x.stderr, y.stderr), (x.q05, y.q05), (x.q95, y.q95)] {
                assert!((u - v).abs() <= 1e-12 * u.abs().max(1.0) || (u.is_nan() && v.is_nan()), "{name}: {u} vs {v}");
            }
        }
    }
}

#[test]
fn reports_land_on_disk() {
    let cfg = config("pam");
    let result = experiment::run(&cfg, Some(1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for f in [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Gnuplot] {
        experiment::report(&result, f, dir.path()).unwrap();
    }
    experiment::write_timings(&result, dir.path()).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("aggregate.json")).unwrap()).unwrap();
    assert!(json.to_string().contains("diam_reference"));
    let timing = std::fs::read_to_string(dir.path().join("timing.csv")).unwrap();
    assert_eq!(timing.lines().count(), 1 + 6);
}
