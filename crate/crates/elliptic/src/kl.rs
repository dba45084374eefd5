//! Karhunen-Loeve truncation of a squared-exponential Gaussian field.
//!
//! ```text
//! K(x1, x2, y1, y2) = exp(-(x1 - x2)^2 / lx^2 - (y1 - y2)^2 / ly^2)
//! eta(x) = sum_i sqrt(lambda_i) theta_i phi_i(x),   theta ~ N(0, I)
//! ```

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{EllipticError, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlBasis {
    pub grid: GridSpec,
    pub lx: f64,
    pub ly: f64,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// One unit-norm field per mode, indexed by cell.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Trace of the full covariance matrix (equals the number of cells).
    pub trace: f64,
}

impl KlBasis {
    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Share of the total prior variance carried by the retained modes.
    pub fn captured_variance_fraction(&self) -> f64 {
        self.eigenvalues.iter().sum::<f64>() / self.trace
    }

    /// `sum_i lambda_i phi_i(x)^2` at every cell: the prior variance of the
    /// truncated field.
    pub fn pointwise_variance(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.n_cells()];
        for (lam, phi) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for (o, p) in out.iter_mut().zip(phi) {
                *o += lam * p * p;
            }
        }
        out
    }
}

/// Kernel matrix between all pairs of cell centres.
pub fn covariance_matrix(grid: &GridSpec, lx: f64, ly: f64) -> DMatrix<f64> {
    let n = grid.n_cells();
    let centers: Vec<(f64, f64)> = (0..n).map(|c| grid.center(c)).collect();
    DMatrix::from_fn(n, n, |a, b| {
        let (xa, ya) = centers[a];
        let (xb, yb) = centers[b];
        (-(xa - xb).powi(2) / (lx * lx) - (ya - yb).powi(2) / (ly * ly)).exp()
    })
}

/// Leading `n_modes` eigenpairs of the kernel matrix.
///
/// Each eigenvector's sign is fixed so that its largest-magnitude entry is
/// positive.
pub fn kl_basis(grid: &GridSpec, lx: f64, ly: f64, n_modes: usize) -> Result<KlBasis> {
    let n = grid.n_cells();
    if n_modes == 0 || n_modes > n {
        return Err(EllipticError::Argument(format!(
            "n_modes = {n_modes} outside 1..={n}"
        )));
    }
    if !(lx > 0.0 && ly > 0.0) {
        return Err(EllipticError::Argument(format!(
            "length scales must be positive, got ({lx}, {ly})"
        )));
    }
    let cov = covariance_matrix(grid, lx, ly);
    let trace = cov.trace();
    let eig = SymmetricEigen::try_new(cov, 1e-15, 0)
        .ok_or_else(|| EllipticError::Eigen("symmetric QR did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut eigenvalues = Vec::with_capacity(n_modes);
    let mut eigenvectors = Vec::with_capacity(n_modes);
    for &k in order.iter().take(n_modes) {
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let pivot = v
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        eigenvalues.push(eig.eigenvalues[k]);
        eigenvectors.push(v);
    }
    Ok(KlBasis {
        grid: *grid,
        lx,
        ly,
        eigenvalues,
        eigenvectors,
        trace,
    })
}

/// Log-permeability and permeability fields for coefficients `theta`.
///
/// Non-positive round-off eigenvalues contribute nothing.
pub fn field_from_coeffs(basis: &KlBasis, theta: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if theta.len() != basis.n_modes() {
        return Err(EllipticError::Argument(format!(
            "expected {} coefficients, got {}",
            basis.n_modes(),
            theta.len()
        )));
    }
    let mut eta = vec![0.0; basis.grid.n_cells()];
    for ((lam, phi), t) in basis.eigenvalues.iter().zip(&basis.eigenvectors).zip(theta) {
        let w = lam.max(0.0).sqrt() * t;
        for (e, p) in eta.iter_mut().zip(phi) {
            *e += w * p;
        }
    }
    let kappa = eta.iter().map(|e| e.exp()).collect();
    Ok((eta, kappa))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_diagonal_is_one() {
        let g = GridSpec::new(4, 4).unwrap();
        let c = covariance_matrix(&g, 0.2, 0.2);
        assert!(c.diagonal().iter().all(|&d| d == 1.0));
        assert_eq!(c, c.transpose());
    }

    #[test]
    fn mode_count_validated() {
        let g = GridSpec::new(4, 4).unwrap();
        assert!(kl_basis(&g, 0.2, 0.2, 17).is_err());
        assert!(kl_basis(&g, 0.2, 0.2, 0).is_err());
        assert!(kl_basis(&g, 0.2, 0.2, 16).is_ok());
    }

    #[test]
    fn zero_and_unit_coefficients() {
        let g = GridSpec::new(6, 6).unwrap();
        let b = kl_basis(&g, 0.3, 0.3, 5).unwrap();
        let (eta, kappa) = field_from_coeffs(&b, &[0.0; 5]).unwrap();
        assert!(eta.iter().all(|&e| e == 0.0));
        assert!(kappa.iter().all(|&k| k == 1.0));
        let (eta, _) = field_from_coeffs(&b, &[0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let s = b.eigenvalues[2].sqrt();
        for (e, p) in eta.iter().zip(&b.eigenvectors[2]) {
            assert!((e - s * p).abs() < 1e-15);
        }
        assert!(field_from_coeffs(&b, &[0.0; 4]).is_err());
    }
}
