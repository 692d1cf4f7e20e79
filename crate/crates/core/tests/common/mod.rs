#![allow(dead_code)]

use std::path::{Path, PathBuf};

use ecmkit::{load_panel, DesignMatrix, LevelVarModel, Panel, QuarterIndex, Seasonality, SeriesSpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn random_walk(rng: &mut ChaCha8Rng, n: usize, drift: f64) -> Vec<f64> {
    let mut level = 0.0;
    normals(rng, n)
        .into_iter()
        .map(|e| {
            level += drift + e;
            level
        })
        .collect()
}

pub fn start() -> QuarterIndex {
    QuarterIndex::new(1960, 1).unwrap()
}

pub fn panel(names: &[&str], cols: Vec<Vec<f64>>) -> Panel {
    Panel::from_start(start(), names.iter().map(|s| s.to_string()).collect(), cols).unwrap()
}

/// `x` a random walk, `y = 2x + u` with `u` a stationary AR(1).
pub fn bivariate_rank_one(rng: &mut ChaCha8Rng, n: usize, drift: f64) -> Panel {
    let x = random_walk(rng, n, drift);
    let mut u = 0.0;
    let y = x
        .iter()
        .zip(normals(rng, n))
        .map(|(xt, e)| {
            u = 0.5 * u + e;
            2.0 * xt + u
        })
        .collect();
    panel(&["y", "x"], vec![y, x])
}

pub fn independent_walks(rng: &mut ChaCha8Rng, n: usize, p: usize, drift: f64) -> Panel {
    let names: Vec<String> = (0..p).map(|j| format!("w{j}")).collect();
    let cols = (0..p).map(|_| random_walk(rng, n, drift)).collect();
    Panel::from_start(start(), names, cols).unwrap()
}

/// Rank-1 VECM `Δy_t = α (y1 − y2)_{t-1} + ε_t` with known loadings.
pub fn known_loadings(rng: &mut ChaCha8Rng, n: usize, alpha: [f64; 2]) -> Panel {
    let (mut y1, mut y2) = (vec![0.0; n], vec![0.0; n]);
    for t in 1..n {
        let ec = y1[t - 1] - y2[t - 1];
        let e: f64 = StandardNormal.sample(rng);
        let f: f64 = StandardNormal.sample(rng);
        y1[t] = y1[t - 1] + alpha[0] * ec + e;
        y2[t] = y2[t - 1] + alpha[1] * ec + f;
    }
    panel(&["y1", "y2"], vec![y1, y2])
}

/// VAR(1) in differences with no cointegration: `Δy_t = G Δy_{t-1} + ε_t`.
pub fn var1_in_differences(rng: &mut ChaCha8Rng, n: usize) -> Panel {
    let g = [[0.5, 0.1], [0.0, 0.4]];
    let (mut y, mut dy) = ([vec![0.0; n], vec![0.0; n]], [0.0, 0.0]);
    for t in 1..n {
        let e: [f64; 2] = [StandardNormal.sample(rng), StandardNormal.sample(rng)];
        let next = [
            g[0][0] * dy[0] + g[0][1] * dy[1] + e[0],
            g[1][0] * dy[0] + g[1][1] * dy[1] + e[1],
        ];
        dy = next;
        for j in 0..2 {
            y[j][t] = y[j][t - 1] + dy[j];
        }
    }
    let [a, b] = y;
    panel(&["a", "b"], vec![a, b])
}

fn spectral_radius(a: &[DMatrix<f64>]) -> f64 {
    let p = a[0].nrows();
    let m = a.len();
    let mut comp = DMatrix::zeros(p * m, p * m);
    for (i, ai) in a.iter().enumerate() {
        comp.view_mut((0, i * p), (p, p)).copy_from(ai);
    }
    for i in 0..p * (m - 1) {
        comp[(p + i, i)] = 1.0;
    }
    comp.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Random stable level VAR with a positive definite residual covariance.
pub fn random_stable_model(rng: &mut ChaCha8Rng) -> LevelVarModel {
    let p = rng.gen_range(2..=4);
    let order = rng.gen_range(1..=3);
    let mut a: Vec<DMatrix<f64>> = (0..order)
        .map(|_| DMatrix::from_fn(p, p, |_, _| { let z: f64 = StandardNormal.sample(rng); 0.4 * z / p as f64 }))
        .collect();
    while spectral_radius(&a) >= 0.95 {
        for ai in a.iter_mut() {
            *ai *= 0.8;
        }
    }
    let l = DMatrix::from_fn(p, p, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => StandardNormal.sample(rng),
        std::cmp::Ordering::Equal => rng.gen_range(0.5..2.0),
        std::cmp::Ordering::Less => 0.0,
    });
    LevelVarModel {
        variable_names: (0..p).map(|j| format!("v{j}")).collect(),
        a,
        constant: vec![0.0; p],
        seasonality: Seasonality::None,
        dummy_coefficients: DMatrix::zeros(p, 0),
        residual_cov: &l * l.transpose(),
    }
}

/// Pushes a single impulse `shock` through the level recursion and returns
/// the differenced path, horizons `0..=h`.
pub fn simulate_impulse(model: &LevelVarModel, shock: &[f64], h: usize) -> Vec<Vec<f64>> {
    let p = model.variable_names.len();
    let mut levels: Vec<Vec<f64>> = Vec::new();
    for s in 0..=h {
        let mut y = if s == 0 { shock.to_vec() } else { vec![0.0; p] };
        for (i, a) in model.a.iter().enumerate() {
            if s > i {
                let past = &levels[s - 1 - i];
                for r in 0..p {
                    for c in 0..p {
                        y[r] += a[(r, c)] * past[c];
                    }
                }
            }
        }
        levels.push(y);
    }
    (0..=h)
        .map(|s| (0..p).map(|j| levels[s][j] - if s == 0 { 0.0 } else { levels[s - 1][j] }).collect())
        .collect()
}

/// Independent OLS: solve `X'X b = X'y` by Gaussian elimination with partial
/// pivoting; R² centered when an all-ones column is present.
pub fn normal_equations(y: &[f64], x: &DesignMatrix) -> (Vec<f64>, f64) {
    let (n, k) = (x.nrows(), x.ncols());
    let d = x.data();
    let mut m = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            m[i][j] = (0..n).map(|t| d[(t, i)] * d[(t, j)]).sum();
        }
        m[i][k] = (0..n).map(|t| d[(t, i)] * y[t]).sum();
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        for r in col + 1..k {
            let f = m[r][col] / m[col][col];
            for c in col..=k {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut b = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| m[i][j] * b[j]).sum();
        b[i] = (m[i][k] - s) / m[i][i];
    }
    let rss: f64 = (0..n)
        .map(|t| {
            let fit: f64 = (0..k).map(|j| d[(t, j)] * b[j]).sum();
            (y[t] - fit).powi(2)
        })
        .sum();
    let intercept = (0..k).any(|j| (0..n).all(|t| d[(t, j)] == 1.0));
    let mean = if intercept { y.iter().sum::<f64>() / n as f64 } else { 0.0 };
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    (b, 1.0 - rss / tss)
}

pub fn snapshot_dir() -> PathBuf {
    // resolves from both the core and the cli crate
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/testdata/fred")
}

/// `(name, file, column)` for the four snapshot series.
pub const SNAPSHOT_SERIES: [(&str, &str, &str); 4] = [
    ("gdp", "GDPC1.csv", "GDPC1"),
    ("disc_rate", "INTDSRUSM193N.csv", "INTDSRUSM193N"),
    ("cpi", "CPIAUCSL.csv", "CPIAUCSL"),
    ("us_pop", "B230RC0Q173SBEA.csv", "B230RC0Q173SBEA"),
];

/// The 1950Q1–2017Q1 snapshot panel, or a reason why it is unavailable.
pub fn snapshot_panel() -> Result<Panel, String> {
    let dir = snapshot_dir();
    let specs: Vec<SeriesSpec> = SNAPSHOT_SERIES
        .iter()
        .map(|(n, f, c)| SeriesSpec::new(*n, *f, *c))
        .collect();
    if let Some(missing) = specs.iter().find(|s| !dir.join(&s.file).exists()) {
        return Err(format!(
            "snapshot file {} not found; run scripts/fetch_fred_snapshot.sh",
            dir.join(&missing.file).display()
        ));
    }
    let panel = load_panel(&dir, &specs).map_err(|e| e.to_string())?;
    panel
        .span(QuarterIndex::new(1950, 1).unwrap(), QuarterIndex::new(2017, 1).unwrap())
        .map_err(|e| e.to_string())
}

/// `max |Σ A_i − I − αβ'|` for a fitted model.
pub fn var_identity_error(model: &ecmkit::VecmModel) -> f64 {
    let var = ecmkit::vecm_to_var(model);
    let p = model.nvars();
    let sum = var.a.iter().fold(DMatrix::zeros(p, p), |acc, a| acc + a);
    (sum - DMatrix::identity(p, p) - model.pi()).amax()
}

/// Four variables sharing one stochastic trend (three cointegrating relations)
/// with a seasonal pattern in the last one.
pub fn four_variable_system(rng: &mut ChaCha8Rng, n: usize) -> Panel {
    let mut trend = 100.0;
    let mut cols: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(n)).collect();
    let mut u = [0.0; 3];
    for i in 0..n {
        trend += 0.5 + { let z: f64 = StandardNormal.sample(rng); z };
        for (j, uj) in u.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(rng);
            *uj = 0.5 * *uj + z;
            cols[j].push((j as f64 + 1.0) * trend + *uj);
        }
        let z: f64 = StandardNormal.sample(rng);
        cols[3].push(0.3 * trend + [0.8, -0.2, 0.1, -0.7][i % 4] + z);
    }
    panel(&["gdp", "rate", "prices", "pop"], cols)
}
