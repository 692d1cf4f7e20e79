mod common;

use common::*;
use ecmkit::linalg::numerical_rank;
use ecmkit::{estimate_vecm, johansen_trace, select_lag, CriticalTable, Seasonality};
use nalgebra::DMatrix;

#[test]
fn beta_recovered_for_known_cointegrating_vector() {
    let mut rng = rng(101);
    let reps = 500;
    let mut hits = 0;
    for _ in 0..reps {
        let panel = bivariate_rank_one(&mut rng, 200, 0.5);
        let res = johansen_trace(&panel, 1, Seasonality::None, CriticalTable::Standard).unwrap();
        let ratio = res.beta[(1, 0)] / res.beta[(0, 0)];
        if res.selected_rank == 1 && (ratio + 2.0).abs() < 0.1 {
            hits += 1;
        }
    }
    // (y, x) ordering: β ∝ (1, -2) after normalization on y
    assert!(hits as f64 >= 0.9 * reps as f64, "{hits}/{reps}");
}

#[test]
fn normalized_beta_has_unit_leading_coordinate() {
    let mut rng = rng(7);
    let panel = bivariate_rank_one(&mut rng, 200, 0.5);
    let res = johansen_trace(&panel, 1, Seasonality::None, CriticalTable::Standard).unwrap();
    for j in 0..2 {
        assert!((res.beta[(0, j)] - 1.0).abs() < 1e-12);
    }
    let m = estimate_vecm(&panel, 1, 1, Seasonality::None).unwrap();
    assert!((m.beta[(0, 0)] - 1.0).abs() < 1e-12);
    assert!((m.beta[(1, 0)] + 2.0).abs() < 0.05, "{}", m.beta);
}

#[test]
fn independent_walks_have_rank_zero_at_nominal_rate() {
    // The unrestricted-constant critical values presume drifting levels, so
    // the walks carry a drift; without one the test rejects about 12% of the time.
    let mut rng = rng(202);
    let reps = 500;
    let zero = (0..reps)
        .filter(|_| {
            let panel = independent_walks(&mut rng, 200, 2, 0.5);
            johansen_trace(&panel, 1, Seasonality::None, CriticalTable::Standard)
                .unwrap()
                .selected_rank
                == 0
        })
        .count();
    let share = zero as f64 / reps as f64;
    assert!((share - 0.95).abs() <= 0.04, "{share}");
}

#[test]
fn loadings_recovered_within_monte_carlo_error() {
    let truth = [-0.2, 0.1];
    let mut rng = rng(303);
    let reps = 200;
    let mut est = vec![[0.0; 2]; reps];
    for e in est.iter_mut() {
        let panel = known_loadings(&mut rng, 300, truth);
        let m = estimate_vecm(&panel, 1, 1, Seasonality::None).unwrap();
        // scale β so that its first entry is 1, as in the generator
        let scale = m.beta[(0, 0)];
        *e = [m.alpha[(0, 0)] * scale, m.alpha[(1, 0)] * scale];
        assert!(var_identity_error(&m) < 1e-10);
    }
    for j in 0..2 {
        let mean = est.iter().map(|e| e[j]).sum::<f64>() / reps as f64;
        let sd = (est.iter().map(|e| (e[j] - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        let se = sd / (reps as f64).sqrt();
        // a single estimate should sit within two sampling sds of the truth
        assert!((mean - truth[j]).abs() < 2.0 * sd, "alpha[{j}]: mean {mean}, sd {sd}");
        // the average is biased by O(1/T) only
        assert!((mean - truth[j]).abs() < 2.0 * se + 0.02, "alpha[{j}]: mean {mean}, se {se}");
    }
}

#[test]
fn msbic_picks_one_lag_for_var1_in_differences() {
    let mut rng = rng(404);
    let reps = 100;
    let ones = (0..reps)
        .filter(|_| {
            let panel = var1_in_differences(&mut rng, 200);
            select_lag(&panel, 4, Seasonality::None).unwrap().selected == 1
        })
        .count();
    assert!(ones as f64 >= 0.8 * reps as f64, "{ones}/{reps}");
}

#[test]
fn lag_selection_uses_one_common_sample() {
    let mut rng = rng(5);
    let panel = var1_in_differences(&mut rng, 60);
    let sel = select_lag(&panel, 6, Seasonality::Indicator).unwrap();
    assert_eq!(sel.criteria.len(), 6);
    assert_eq!(sel.t_eff, 60 - 6 - 1);
    assert_eq!(sel.criteria[0].k_prime, 2 * (2 + 1 + 3 + 2));
    let best = sel.criteria.iter().map(|c| c.msbic).fold(f64::INFINITY, f64::min);
    let first_best = sel.criteria.iter().find(|c| c.msbic == best).unwrap().k;
    assert_eq!(sel.selected, first_best);

    // just feasible for max_k: 2*6 + 1 + 3 + 2 = 18 regressors and 2 residual
    // degrees of freedom for a nonsingular 2x2 covariance need 20 rows
    let tight = panel.slice(0..6 + 1 + 20).unwrap();
    let sel = select_lag(&tight, 6, Seasonality::Indicator).unwrap();
    assert_eq!(sel.criteria.len(), 6);
    assert_eq!(sel.t_eff, 20);
    assert!(sel.criteria.iter().all(|c| c.msbic.is_finite()));
    let too_short = panel.slice(0..6 + 1 + 19).unwrap();
    assert!(select_lag(&too_short, 6, Seasonality::Indicator).is_err());
}

#[test]
fn trace_statistics_follow_their_definition() {
    let mut rng = rng(11);
    let panel = four_variable_system(&mut rng, 269);
    let res = johansen_trace(&panel, 2, Seasonality::Indicator, CriticalTable::Standard).unwrap();
    assert_eq!(res.t_eff, 266);
    for w in res.eigenvalues.windows(2) {
        assert!(w[0] >= w[1] - 1e-12);
    }
    assert!(res.eigenvalues.iter().all(|l| (0.0..1.0).contains(l)));
    for r in 0..4 {
        let direct: f64 = -(res.t_eff as f64) * res.eigenvalues[r..].iter().map(|l| (1.0 - l).ln()).sum::<f64>();
        assert!((res.trace_stats[r] - direct).abs() < 1e-9 * (1.0 + direct));
        assert!(res.trace_stats[r] >= 0.0);
    }
    for w in res.trace_stats.windows(2) {
        assert!(w[0] > w[1]);
    }
    assert_eq!(res.selected_rank, 3);
    let rej = res.rejections();
    assert_eq!(rej, vec![true, true, true, false]);
}

#[test]
fn eigenvectors_solve_the_generalized_problem() {
    // Independent check: rebuild the product moments by brute-force OLS and
    // verify S10 S00^-1 S01 v = λ S11 v.
    let mut rng = rng(12);
    let panel = four_variable_system(&mut rng, 150);
    let k = 2;
    let res = johansen_trace(&panel, k, Seasonality::None, CriticalTable::Standard).unwrap();
    let design = ecmkit::build_vecm_design(&panel, k, &[], None).unwrap();
    let z = design.design.data();
    let resid = |y: &DMatrix<f64>| -> DMatrix<f64> {
        let mut out = y.clone();
        for j in 0..y.ncols() {
            let col: Vec<f64> = y.column(j).iter().copied().collect();
            let (b, _) = normal_equations(&col, &design.design);
            let fit = z * nalgebra::DVector::from_vec(b);
            out.set_column(j, &(y.column(j) - fit));
        }
        out
    };
    let r0 = resid(&design.responses);
    let r1 = resid(&design.lagged_levels);
    let t = res.t_eff as f64;
    let s00 = r0.transpose() * &r0 / t;
    let s11 = r1.transpose() * &r1 / t;
    let s01 = r0.transpose() * &r1 / t;
    let lhs_m = s01.transpose() * s00.try_inverse().unwrap() * &s01;
    for i in 0..4 {
        let v = res.beta.column(i);
        let lhs = &lhs_m * v;
        let rhs = &s11 * v * res.eigenvalues[i];
        assert!((lhs - &rhs).amax() < 1e-6 * (1.0 + rhs.amax()), "eigenpair {i}");
    }
    // α = S01 β (β' S11 β)^-1
    let alpha = &s01 * &res.beta * (res.beta.transpose() * &s11 * &res.beta).try_inverse().unwrap();
    assert!((alpha - &res.alpha).amax() < 1e-6 * (1.0 + res.alpha.amax()));
}

#[test]
fn fitted_vecm_invariants() {
    let mut rng = rng(13);
    let panel = four_variable_system(&mut rng, 269);
    for (r, k, s) in [
        (3, 2, Seasonality::Indicator),
        (1, 1, Seasonality::None),
        (0, 3, Seasonality::Centered),
        (4, 2, Seasonality::Indicator),
    ] {
        let m = estimate_vecm(&panel, r, k, s).unwrap();
        assert_eq!(m.beta.shape(), (4, r));
        assert_eq!(m.alpha.shape(), (4, r));
        assert_eq!(m.gamma.len(), k);
        assert_eq!(m.t_eff, 269 - k - 1);
        assert!(var_identity_error(&m) < 1e-10);
        if r > 0 {
            assert_eq!(numerical_rank(&m.pi(), 1e-8), r);
        }
        let names = &m.equations[0].regressor_names;
        assert!(m.equations.iter().all(|e| &e.regressor_names == names));
        assert_eq!(names.len(), 4 * k + 1 + if s.is_on() { 3 } else { 0 } + r);

        let e = DMatrix::from_fn(m.t_eff, 4, |t, j| m.equations[j].residuals[t]);
        let direct = e.transpose() * &e / m.t_eff as f64;
        assert!((direct - &m.residual_cov).amax() < 1e-12 * m.residual_cov.amax());
        assert!((&m.residual_cov - m.residual_cov.transpose()).amax() < 1e-12);
        assert!(m.residual_cov.clone().symmetric_eigenvalues().iter().all(|l| *l >= 0.0));
    }
    assert!(estimate_vecm(&panel, 5, 2, Seasonality::None).is_err());
}

#[test]
fn paper_layout_degrees_of_freedom() {
    // 269 quarters, p = 4, k = 2, dummies, r = 3: 15 regressors on 266 rows.
    let mut rng = rng(14);
    let panel = four_variable_system(&mut rng, 269);
    let m = estimate_vecm(&panel, 3, 2, Seasonality::Indicator).unwrap();
    let f = m.equations[0].f_stat.as_ref().unwrap();
    assert_eq!((f.df1, f.df2), (14, 251));
}

#[test]
fn rescaling_a_variable_changes_nothing_that_matters() {
    let mut rng = rng(15);
    let panel = four_variable_system(&mut rng, 200);
    let base = johansen_trace(&panel, 2, Seasonality::Indicator, CriticalTable::Standard).unwrap();
    for (j, c) in [(0, 1e3), (3, 1e-3), (1, 7.5)] {
        let scaled = johansen_trace(&panel.with_scaled_column(j, c), 2, Seasonality::Indicator, CriticalTable::Standard)
            .unwrap();
        for (a, b) in scaled.eigenvalues.iter().zip(&base.eigenvalues) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in scaled.trace_stats.iter().zip(&base.trace_stats) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b));
        }
        assert_eq!(scaled.selected_rank, base.selected_rank);
    }
}

#[test]
fn singular_levels_are_a_conditioning_error() {
    let mut rng = rng(16);
    let x = random_walk(&mut rng, 120, 0.0);
    let twice: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
    let panel = panel(&["x", "x2"], vec![x, twice]);
    let err = johansen_trace(&panel, 1, Seasonality::None, CriticalTable::Standard).unwrap_err();
    assert_eq!(err.kind(), ecmkit::ErrorKind::Numerical);
}

#[test]
fn too_short_for_the_rank_test() {
    let mut rng = rng(17);
    let panel = independent_walks(&mut rng, 20, 4, 0.0);
    // T_eff = 17 is not above p(k+1) + 5 = 17
    assert!(matches!(
        johansen_trace(&panel, 2, Seasonality::None, CriticalTable::Standard),
        Err(ecmkit::Error::InsufficientSample(_))
    ));
}

#[test]
fn model_json_round_trip() {
    let mut rng = rng(18);
    let panel = four_variable_system(&mut rng, 120);
    let m = estimate_vecm(&panel, 2, 2, Seasonality::Indicator).unwrap();
    let back = ecmkit::VecmModel::from_json(&m.to_json().unwrap()).unwrap();
    assert_eq!(back, m);
}

#[test]
fn matches_reference_implementation() {
    let text = include_str!("fixtures/johansen_reference.csv");
    let expected = |tag: &str| -> Vec<f64> {
        let line = text.lines().find(|l| l.starts_with(&format!("# {tag}:"))).unwrap();
        line.split(':').nth(1).unwrap().split_whitespace().map(|v| v.parse().unwrap()).collect()
    };
    let mut cols = vec![Vec::new(); 3];
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        for (c, v) in cols.iter_mut().zip(line.split(',')) {
            c.push(v.parse::<f64>().unwrap());
        }
    }
    let panel = panel(&["y1", "y2", "y3"], cols);
    let res = johansen_trace(&panel, 2, Seasonality::None, CriticalTable::Standard).unwrap();
    for (a, b) in res.trace_stats.iter().zip(expected("trace")) {
        assert!((a - b).abs() < 1e-8 * (1.0 + b), "trace {a} vs {b}");
    }
    for (a, b) in res.eigenvalues.iter().zip(expected("eigenvalues")) {
        assert!((a - b).abs() < 1e-10, "eigenvalue {a} vs {b}");
    }
    assert_eq!(res.selected_rank, 1);
}
