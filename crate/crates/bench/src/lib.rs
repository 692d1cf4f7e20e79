//! Synthetic inputs shared by the criterion benches.

use ecmkit::{DesignMatrix, Panel, QuarterIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Four-variable quarterly panel with one common stochastic trend, so three
/// cointegrating relations, plus a quarterly seasonal pattern in the last series.
pub fn cointegrated_panel(t: usize, seed: u64) -> Panel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut trend = 100.0;
    let mut cols: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(t)).collect();
    let mut u = [0.0; 3];
    for i in 0..t {
        trend += 0.5 + draw();
        for (j, uj) in u.iter_mut().enumerate() {
            *uj = 0.5 * *uj + draw();
            cols[j].push((j as f64 + 1.0) * trend + *uj);
        }
        cols[3].push(0.3 * trend + [0.8, -0.2, 0.1, -0.7][i % 4] + draw());
    }
    let names = ["gdp", "rate", "prices", "pop"].iter().map(|s| s.to_string()).collect();
    Panel::from_start(QuarterIndex::new(1950, 1).expect("valid quarter"), names, cols).expect("finite panel")
}

/// Gaussian regression problem `y = Xb + e` with an intercept column.
pub fn regression_problem(n: usize, k: usize, seed: u64) -> (Vec<f64>, DesignMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut cols = vec![vec![1.0; n]];
    for _ in 1..k {
        cols.push((0..n).map(|_| draw()).collect());
    }
    let y = (0..n)
        .map(|i| cols.iter().enumerate().map(|(j, c)| (j as f64 + 1.0) * c[i]).sum::<f64>() + draw())
        .collect();
    let mut names = vec!["const".to_string()];
    names.extend((1..k).map(|j| format!("x{j}")));
    (y, DesignMatrix::from_columns(names, &cols).expect("distinct names"))
}
