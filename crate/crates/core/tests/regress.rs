mod common;

use common::*;
use ecmkit::{ols, student_t_two_sided_p, DesignMatrix, ErrorKind};
use proptest::prelude::*;

fn design(cols: &[Vec<f64>], intercept: bool) -> DesignMatrix {
    let mut names: Vec<String> = (0..cols.len()).map(|j| format!("x{j}")).collect();
    let mut cols = cols.to_vec();
    if intercept {
        names.push("const".into());
        cols.push(vec![1.0; cols[0].len()]);
    }
    DesignMatrix::from_columns(names, &cols).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn agrees_with_normal_equations(seed in 0u64..10_000, n in 20usize..80, k in 1usize..5) {
        let mut rng = rng(seed);
        let cols: Vec<Vec<f64>> = (0..k).map(|_| normals(&mut rng, n)).collect();
        let y: Vec<f64> = normals(&mut rng, n)
            .iter()
            .enumerate()
            .map(|(t, e)| 1.5 + cols.iter().enumerate().map(|(j, c)| (j as f64 - 1.0) * c[t]).sum::<f64>() + e)
            .collect();
        let x = design(&cols, true);
        let fit = ols(&y, &x).unwrap();
        let (b, r2) = normal_equations(&y, &x);
        for (got, want) in fit.coefficients.iter().zip(&b) {
            prop_assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()));
        }
        prop_assert!((fit.r_squared - r2).abs() < 1e-9);
        prop_assert_eq!(fit.df_resid, n - k - 1);
        // residuals are orthogonal to every regressor
        for j in 0..x.ncols() {
            let dot: f64 = (0..n).map(|t| x.data()[(t, j)] * fit.residuals[t]).sum();
            prop_assert!(dot.abs() < 1e-8 * n as f64);
        }
    }
}

#[test]
fn single_regressor_f_equals_t_squared() {
    let mut rng = rng(71);
    let x = normals(&mut rng, 60);
    let y: Vec<f64> = x.iter().zip(normals(&mut rng, 60)).map(|(a, e)| 0.3 * a + e).collect();
    let fit = ols(&y, &design(&[x], true)).unwrap();
    let f = fit.f_stat.as_ref().unwrap();
    assert_eq!((f.df1, f.df2), (1, 58));
    assert!((f.value - fit.t_stats[0].powi(2)).abs() < 1e-9 * f.value.max(1.0));
    assert!((f.p_value - fit.p_values[0]).abs() < 1e-9);
}

#[test]
fn p_values_match_closed_forms() {
    for t in [0.0, 0.5, 1.0, 2.5, 12.706204736] {
        // df = 1 is Cauchy, df = 2 has an algebraic cdf
        let cauchy = 1.0 - 2.0 / std::f64::consts::PI * f64::atan(t);
        let two = 1.0 - t / (2.0 + t * t).sqrt();
        assert!((student_t_two_sided_p(t, 1) - cauchy).abs() < 1e-10);
        assert!((student_t_two_sided_p(-t, 2) - two).abs() < 1e-10);
    }
}

#[test]
fn perfect_collinearity_names_the_columns() {
    let mut rng = rng(72);
    let a = normals(&mut rng, 40);
    let b: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
    let y = normals(&mut rng, 40);
    let err = ols(&y, &design(&[a, b], true)).unwrap_err();
    assert_eq!(err.kind(), ErrorKind::Numerical);
    let msg = err.to_string();
    assert!(msg.contains("x0") && msg.contains("x1"), "{msg}");
    assert!(!msg.contains("const"), "{msg}");
}

#[test]
fn no_intercept_uses_uncentered_r_squared() {
    let mut rng = rng(73);
    let x = normals(&mut rng, 50);
    let y: Vec<f64> = x.iter().zip(normals(&mut rng, 50)).map(|(a, e)| 5.0 + a + e).collect();
    let d = design(&[x], false);
    let fit = ols(&y, &d).unwrap();
    assert!(!fit.has_intercept);
    let (_, r2) = normal_equations(&y, &d);
    assert!((fit.r_squared - r2).abs() < 1e-9);
}
