mod common;

use common::*;
use ecmkit::{
    adf_test, adf_test_with, classify_integration, engle_granger, AdfConfig, Deterministic, IntegrationOrder, LagRule,
};

struct Reference {
    tags: Vec<(String, Vec<f64>)>,
    x: Vec<f64>,
    z: Vec<f64>,
    y: Vec<f64>,
}

fn reference() -> Reference {
    let text = include_str!("fixtures/unitroot_reference.csv");
    let mut tags = Vec::new();
    let (mut x, mut z, mut y) = (Vec::new(), Vec::new(), Vec::new());
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            if let Some((tag, vals)) = rest.split_once(": ") {
                if let Ok(v) = vals.split_whitespace().map(str::parse).collect::<Result<Vec<f64>, _>>() {
                    tags.push((tag.to_string(), v));
                }
            }
        } else if !line.starts_with('x') {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            x.push(v[0]);
            z.push(v[1]);
            y.push(v[2]);
        }
    }
    Reference { tags, x, z, y }
}

impl Reference {
    fn get(&self, tag: &str) -> &[f64] {
        &self.tags.iter().find(|(t, _)| t == tag).unwrap().1
    }
}

#[test]
fn adf_matches_reference_implementation() {
    let r = reference();
    for (tag, det) in [
        ("adf_constant", Deterministic::Constant),
        ("adf_trend", Deterministic::Trend),
        ("adf_none", Deterministic::None),
    ] {
        let want = r.get(tag);
        let got = adf_test(&r.x, det, 4, LagRule::Fixed).unwrap();
        assert!((got.statistic - want[0]).abs() < 1e-9, "{tag}: {} vs {}", got.statistic, want[0]);
        assert_eq!(got.lags_used as f64, want[1]);
        assert_eq!(got.nobs as f64, want[2]);
    }
    let bic = adf_test(&r.x, Deterministic::Constant, 6, LagRule::Bic).unwrap();
    assert_eq!(bic.lags_used as f64, r.get("adf_bic_lags")[0]);
}

#[test]
fn engle_granger_matches_reference_implementation() {
    let r = reference();
    let panel = panel(&["y", "x", "z"], vec![r.y.clone(), r.x.clone(), r.z.clone()]);
    let eg = engle_granger(&panel, "y", &AdfConfig::default()).unwrap();
    let want = r.get("eg_statistic")[0];
    assert!((eg.residual_test.statistic - want).abs() < 1e-9, "{} vs {want}", eg.residual_test.statistic);
    assert_eq!(eg.regressors, vec!["x", "z"]);
    assert_eq!(eg.step1.regressor_names, vec!["x", "z", "const"]);
    assert_eq!(eg.residual_test.deterministic, Deterministic::None);
    // three-variable cointegration critical values are more demanding than Dickey-Fuller
    assert!(eg.residual_test.critical_values.five < -3.7);
}

#[test]
fn adf_size_under_the_unit_root_null() {
    let mut rng = rng(606);
    let reps = 1000;
    let rejections = (0..reps)
        .filter(|_| adf_test_with(&random_walk(&mut rng, 200, 0.0), &AdfConfig::default()).unwrap().rejects())
        .count();
    let rate = rejections as f64 / reps as f64;
    assert!((rate - 0.05).abs() <= 0.03, "{rate}");
}

#[test]
fn adf_power_against_stationary_ar1() {
    let mut rng = rng(607);
    let reps = 200;
    let rejections = (0..reps)
        .filter(|_| {
            let e = normals(&mut rng, 200);
            let mut u = 0.0;
            let x: Vec<f64> = e
                .iter()
                .map(|v| {
                    u = 0.5 * u + v;
                    u
                })
                .collect();
            adf_test_with(&x, &AdfConfig::default()).unwrap().rejects()
        })
        .count();
    assert!(rejections as f64 >= 0.95 * reps as f64, "{rejections}/{reps}");
}

#[test]
fn engle_granger_monte_carlo() {
    let mut rng = rng(608);
    let reps = 300;
    let mut power = 0;
    let mut size = 0;
    for _ in 0..reps {
        if engle_granger(&bivariate_rank_one(&mut rng, 200, 0.0), "y", &AdfConfig::default())
            .unwrap()
            .cointegrated
        {
            power += 1;
        }
        if engle_granger(&independent_walks(&mut rng, 200, 2, 0.0), "w0", &AdfConfig::default())
            .unwrap()
            .cointegrated
        {
            size += 1;
        }
    }
    assert!(power as f64 >= 0.9 * reps as f64, "power {power}/{reps}");
    let rate = size as f64 / reps as f64;
    assert!((rate - 0.05).abs() <= 0.035, "size {rate}");
}

#[test]
fn integration_orders() {
    let mut rng = rng(609);
    let noise = normals(&mut rng, 300);
    assert_eq!(classify_integration(&noise, 2).unwrap(), IntegrationOrder::Order(0));
    let walk = random_walk(&mut rng, 300, 0.0);
    assert_eq!(classify_integration(&walk, 2).unwrap(), IntegrationOrder::Order(1));
    let mut acc = 0.0;
    let i2: Vec<f64> = random_walk(&mut rng, 300, 0.0)
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    assert_eq!(classify_integration(&i2, 2).unwrap(), IntegrationOrder::Order(2));
    assert_eq!(
        classify_integration(&i2, 1).unwrap(),
        IntegrationOrder::Inconclusive { max_order: 1 }
    );
}

#[test]
fn adf_statistic_is_scale_invariant() {
    let mut rng = rng(610);
    let x = random_walk(&mut rng, 150, 0.2);
    let base = adf_test(&x, Deterministic::Trend, 3, LagRule::Bic).unwrap();
    for c in [1e-4, 3.0, 1e5] {
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        let r = adf_test(&scaled, Deterministic::Trend, 3, LagRule::Bic).unwrap();
        assert_eq!(r.lags_used, base.lags_used);
        assert!((r.statistic - base.statistic).abs() < 1e-8);
    }
}
