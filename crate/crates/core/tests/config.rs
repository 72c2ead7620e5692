use std::path::PathBuf;

use polylab::experiment::{run, BodyName, CheckName, DensityName, ExperimentConfig, Grid, RESULTS_HEADER};
use polylab::Error;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, (-1000i32..1000).prop_map(|k| k as f64 / 8.0)]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    let body = (2usize..5).prop_flat_map(|d| {
        prop_oneof![
            (prop::collection::vec(finite(), d), 0.01..100.0f64).prop_map(move |(c, r)| (
                d,
                BodyName::Ball,
                Some(c),
                Some(r),
                None
            )),
            (prop::collection::vec(finite(), d), prop::collection::vec(0.1..10.0f64, d)).prop_map(move |(lo, w)| {
                let hi: Vec<f64> = lo.iter().zip(&w).map(|(a, b)| a + b).collect();
                (d, BodyName::Box, None, None, Some((lo, hi)))
            }),
            Just((d, BodyName::Cube, None, None, None)),
            Just((d, BodyName::Simplex, None, None, None)),
        ]
    });
    let density = prop_oneof![
        Just((DensityName::Uniform, None, None)),
        (0.0..4.0f64, prop::option::of(0.01..2.0f64)).prop_map(|(g, r)| (DensityName::MarginPower, Some(g), r)),
    ];
    let checks = prop::sample::subsequence(
        vec![CheckName::Efron, CheckName::ExtendedEfron, CheckName::RateVn, CheckName::DeviationTail],
        0..4,
    );
    (
        body,
        density,
        prop::option::of(1usize..100_000),
        prop::option::of((1usize..64, 1usize..6, 2usize..4)),
        prop::collection::vec(prop_oneof![Just(1.0), Just(2.0), 0.1..5.0f64], 0..3),
        prop::option::of(1usize..1_000_000),
        prop::option::of(any::<u64>()),
        prop::option::of(1.0..1000.0f64),
        checks,
    )
        .prop_map(|(body, density, n, grid, q, reps, seed, condition, checks)| {
            let (d, name, center, radius, bounds) = body;
            ExperimentConfig {
                d: Some(d),
                body: Some(name),
                body_center: center,
                body_radius: radius,
                body_lower: bounds.as_ref().map(|b| b.0.clone()),
                body_upper: bounds.map(|b| b.1),
                density: density.0,
                gamma: density.1,
                rho0: density.2,
                n,
                n_grid: grid.map(|(s, k, f)| Grid { start: s, stop: s * f.pow(k as u32), factor: f }),
                q,
                reps,
                seed,
                condition,
                out_dir: Some(PathBuf::from("out/run-1")),
                checks,
                ..ExperimentConfig::default()
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn serialize_then_parse_is_identity(cfg in config()) {
        let text = cfg.serialize();
        let back = ExperimentConfig::parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn errors_carry_positions() {
    let err = ExperimentConfig::parse("d = 2\n# note\nn = many\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, column: 5, .. }), "{err:?}");
    let err = ExperimentConfig::parse("d = 2\nno equals sign\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    let err = ExperimentConfig::parse("d = 2\nd = 3\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    let err = ExperimentConfig::parse("colour = blue\n").unwrap_err();
    assert!(matches!(err, Error::Validation { ref field, .. } if field == "colour"), "{err:?}");
    let err = ExperimentConfig::parse("d = 3\nbody = disk\n").unwrap_err();
    assert!(matches!(err, Error::Validation { ref field, .. } if field == "d"), "{err:?}");
}

#[test]
fn seed_precedence() {
    let cfg = ExperimentConfig::parse("seed = 5\n").unwrap();
    assert_eq!(cfg.resolve_seed(None, None).unwrap(), 5);
    assert_eq!(cfg.resolve_seed(Some("6"), None).unwrap(), 6);
    assert_eq!(cfg.resolve_seed(Some("6"), Some(7)).unwrap(), 7);
    assert!(ExperimentConfig::default().resolve_seed(None, None).is_err());
    assert!(cfg.resolve_seed(Some("six"), None).is_err());
}

const SMALL: &str = "\
body = triangle
n = 3
reps = 2000
n_grid = 16:128:x2
q = 1, 2
fresh_m = 500
checks = efron, extended_efron, rate_Rn
";

#[test]
fn results_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::parse(SMALL).unwrap();
    let report = run(&cfg, 3, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "check,n,q,estimate,stderr,bound_or_target,pass,reps,seed,label");
    assert_eq!(RESULTS_HEADER.join(","), "check,n,q,estimate,stderr,bound_or_target,pass,reps,seed,label");

    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let total_rows: usize = report.reports.iter().map(|r| r.rows.len()).sum();
    assert_eq!(records.len(), total_rows);
    for rec in &records {
        assert_eq!(rec.len(), 10);
        assert!(["efron", "extended_efron", "rate_Rn"].contains(&&rec[0]));
        rec[1].parse::<usize>().unwrap();
        rec[2].parse::<f64>().unwrap();
        rec[3].parse::<f64>().unwrap();
        rec[4].parse::<f64>().unwrap();
        rec[5].parse::<f64>().unwrap();
        assert!(&rec[6] == "true" || &rec[6] == "false");
        rec[7].parse::<usize>().unwrap();
        assert_eq!(&rec[8], "3");
    }
    let plot = std::fs::read_to_string(dir.path().join("plot_data.csv")).unwrap();
    assert_eq!(plot.lines().next().unwrap(), "check,fit,q,n,log_n,log_estimate,stderr_log");
    assert_eq!(plot.lines().count(), 1 + 2 * 4);
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::from_path(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(cfg.seed.is_some() && !cfg.checks.is_empty(), "{}", path.display());
        cfg.density_spec().unwrap();
        count += 1;
    }
    assert!(count >= 5);
}

#[test]
fn minimal_config_and_misspelled_key() {
    let cfg = ExperimentConfig::parse("d = 2\nbody = ball\ndensity = uniform\nn = 100\nreps = 10\nseed = 1\n").unwrap();
    assert_eq!((cfg.n, cfg.reps, cfg.seed), (Some(100), Some(10), Some(1)));
    let err = ExperimentConfig::parse("d = 2\ndenisty = uniform\n").unwrap_err();
    assert!(matches!(err, Error::Validation { ref field, .. } if field == "denisty"), "{err:?}");
}
