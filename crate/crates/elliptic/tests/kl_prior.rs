use ess_core::rng::stream;
use ess_elliptic::{covariance_matrix, field_from_coeffs, kl_basis, GridSpec};
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn basis_is_orthonormal_sorted_and_accurate() {
    let g = GridSpec::new(16, 16).unwrap();
    let b = kl_basis(&g, 0.2, 0.2, 20).unwrap();
    let c = covariance_matrix(&g, 0.2, 0.2);
    let c_norm = c.norm();

    assert!(b.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    assert!(b.eigenvalues.iter().all(|&l| l >= -1e-10));
    for (i, phi) in b.eigenvectors.iter().enumerate() {
        for (j, psi) in b.eigenvectors.iter().enumerate() {
            let d: f64 = phi.iter().zip(psi).map(|(a, b)| a * b).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((d - expect).abs() <= 1e-8, "<phi_{i}, phi_{j}> = {d}");
        }
        let v = nalgebra::DVector::from_column_slice(phi);
        let r = &c * &v - b.eigenvalues[i] * &v;
        assert!(r.norm() <= 1e-8 * c_norm);
    }
    assert!(b.pointwise_variance().iter().all(|&v| v <= 1.0 + 1e-12));
}

#[test]
fn full_spectrum_is_positive_semidefinite() {
    let g = GridSpec::new(16, 16).unwrap();
    let b = kl_basis(&g, 0.2, 0.2, 256).unwrap();
    assert!(b.eigenvalues.iter().all(|&l| l >= -1e-10));
    assert!((b.eigenvalues.iter().sum::<f64>() - 256.0).abs() < 1e-8);
}

#[test]
fn captured_variance_regression() {
    let g = GridSpec::new(16, 16).unwrap();
    let frac = kl_basis(&g, 0.2, 0.2, 20).unwrap().captured_variance_fraction();
    println!("captured variance fraction (16x16, l=0.2, 20 modes) = {frac:.12}");
    assert!((frac - CAPTURED_FRACTION).abs() < 1e-9, "{frac}");
}

const CAPTURED_FRACTION: f64 = 0.871_877_387_105_857_6;

#[test]
fn prior_draws_match_truncated_variance() {
    let g = GridSpec::new(16, 16).unwrap();
    let b = kl_basis(&g, 0.2, 0.2, 20).unwrap();
    let analytic = b.pointwise_variance();
    let n = 100_000;
    let mut sum = vec![0.0; 256];
    let mut sum_sq = vec![0.0; 256];
    let mut rng = stream(2024, 0);
    let mut theta = vec![0.0; 20];
    for _ in 0..n {
        theta.iter_mut().for_each(|t| *t = rng.sample(StandardNormal));
        let (eta, _) = field_from_coeffs(&b, &theta).unwrap();
        for c in 0..256 {
            sum[c] += eta[c];
            sum_sq[c] += eta[c] * eta[c];
        }
    }
    for c in 0..256 {
        let m = sum[c] / n as f64;
        let v = sum_sq[c] / n as f64 - m * m;
        assert!((v / analytic[c] - 1.0).abs() < 0.05, "cell {c}: {v} vs {}", analytic[c]);
    }
}
