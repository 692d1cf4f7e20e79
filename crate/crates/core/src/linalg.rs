//! Dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Lower Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky_lower(m: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!("{what} is not square")));
    }
    nalgebra::Cholesky::new(symmetrize(m))
        .map(|c| c.l())
        .ok_or_else(|| Error::NotPositiveDefinite(what.to_string()))
}

/// `(m + mᵀ) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Log-determinant of a symmetric positive-definite matrix.
pub fn log_det_spd(m: &DMatrix<f64>, what: &str) -> Result<f64> {
    let l = cholesky_lower(m, what)?;
    Ok(2.0 * l.diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Reciprocal 2-norm condition number, `σ_min / σ_max`.
pub fn reciprocal_condition(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0.0;
    }
    sv.min() / max
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Solution of the symmetric-definite generalized eigenproblem `A x = λ B x`.
///
/// `B` is reduced by its Cholesky factor `L` to the standard symmetric problem
/// `L⁻¹ A L⁻ᵀ v = λ v`; eigenvectors are mapped back through `x = L⁻ᵀ v`, so the
/// returned columns satisfy `Xᵀ B X = I`. Eigenvalues are sorted descending.
pub fn generalized_symmetric_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if !a.is_square() || b.shape() != a.shape() {
        return Err(Error::InvalidInput("generalized eigenproblem needs two square matrices of equal size".into()));
    }
    let l = cholesky_lower(b, "right-hand matrix of the generalized eigenproblem")?;
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("Cholesky factor is singular".into()))?;
    let c = symmetrize(&(&l_inv * a * l_inv.transpose()));
    let eig = SymmetricEigen::new(c);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let back = l_inv.transpose();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let x: DVector<f64> = &back * eig.eigenvectors.column(src);
        vectors.set_column(dst, &x);
    }
    Ok((values, vectors))
}

/// Row-major serde representation for `DMatrix<f64>` (`[[row0...], [row1...]]`).
pub mod serde_rows {
    use nalgebra::DMatrix;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<f64>], ncols: usize) -> Result<DMatrix<f64>, String> {
        if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
            return Err(format!("row {bad} has {} entries, expected {ncols}", rows[bad].len()));
        }
        Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
    }

    #[derive(Serialize, Deserialize)]
    struct Repr {
        rows: usize,
        cols: usize,
        data: Vec<Vec<f64>>,
    }

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            rows: m.nrows(),
            cols: m.ncols(),
            data: to_rows(m),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let repr = Repr::deserialize(d)?;
        if repr.data.len() != repr.rows {
            return Err(D::Error::custom("row count does not match `rows`"));
        }
        from_rows(&repr.data, repr.cols).map_err(D::Error::custom)
    }

    pub mod vec {
        use nalgebra::DMatrix;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        #[derive(Serialize, Deserialize)]
        struct Wrapped(#[serde(with = "super")] DMatrix<f64>);

        pub fn serialize<S: Serializer>(ms: &[DMatrix<f64>], s: S) -> Result<S::Ok, S::Error> {
            let wrapped: Vec<Wrapped> = ms.iter().cloned().map(Wrapped).collect();
            wrapped.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DMatrix<f64>>, D::Error> {
            Ok(Vec::<Wrapped>::deserialize(d)?.into_iter().map(|w| w.0).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, seed: u64) -> DMatrix<f64> {
        // deterministic pseudo-random fill
        let mut state = seed;
        let g = DMatrix::from_fn(n, n, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 0.5
        });
        &g * g.transpose() + DMatrix::identity(n, n) * 0.1
    }

    #[test]
    fn generalized_eigen_satisfies_defining_equation() {
        for seed in 0..20 {
            let a = spd(5, seed);
            let b = spd(5, seed + 100);
            let (vals, vecs) = generalized_symmetric_eigen(&a, &b).unwrap();
            for (j, lambda) in vals.iter().enumerate() {
                let x = vecs.column(j);
                let resid = &a * x - (&b * x) * *lambda;
                assert!(resid.norm() < 1e-9 * (1.0 + lambda.abs()), "seed {seed} col {j}");
            }
            let gram = vecs.transpose() * &b * &vecs;
            assert!((gram - DMatrix::identity(5, 5)).amax() < 1e-9);
            assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn generalized_eigen_rejects_indefinite_rhs() {
        let a = DMatrix::identity(2, 2);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(generalized_symmetric_eigen(&a, &b), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn log_det_matches_product_of_eigenvalues() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        assert!((log_det_spd(&m, "m").unwrap() - 11f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn rank_of_outer_product() {
        let u = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert_eq!(numerical_rank(&(&u * u.transpose()), 1e-8), 1);
    }
}
