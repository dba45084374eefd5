//! Statistical properties of the estimators on simulated AR(1) replicates.

use ess_core::rng::derive_seed;
use ess_core::{
    ar1_exact_iact, ar1_simulate, autocorr, autocov_direct, autocov_fft, fit_ar_iact, iact_bm,
    iact_geyer, iact_obm, iact_window, mean_and_var, Ar1Init, Ar1Params, BatchMode,
    BatchSizePolicy, BatchSpec, GeyerVariant, WidthPolicy, WindowSpec,
};

fn replicates(a: f64, n: usize, reps: usize, master: u64) -> Vec<Vec<f64>> {
    let p = Ar1Params::new(a, 0.0, 1.0).unwrap();
    (0..reps)
        .map(|r| {
            ar1_simulate(&p, n, derive_seed(master, r as u64), Ar1Init::StationaryDraw)
                .unwrap()
                .into_samples()
        })
        .collect()
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    (m, s)
}

#[test]
fn ensemble_moments_match_closed_forms() {
    let a = 0.5;
    let n = 20_000;
    let reps = replicates(a, n, 100, 1);
    let p = Ar1Params::new(a, 0.0, 1.0).unwrap();
    let sqrt_r = (reps.len() as f64).sqrt();

    let vars: Vec<f64> = reps.iter().map(|x| mean_and_var(x).unwrap().1).collect();
    let (m, s) = mean_sd(&vars);
    assert!((m - p.stationary_var()).abs() <= 3.0 * s / sqrt_r, "var {m}");

    let means: Vec<f64> = reps.iter().map(|x| mean_and_var(x).unwrap().0).collect();
    let sq: Vec<f64> = means.iter().map(|m| m * m).collect();
    let (m2, s2) = mean_sd(&sq);
    assert!((m2 - p.mean_estimator_var(n)).abs() <= 3.0 * s2 / sqrt_r, "Var(mean) {m2}");

    let rhos: Vec<Vec<f64>> = reps
        .iter()
        .map(|x| autocorr(&autocov_fft(x, 20).unwrap()).unwrap())
        .collect();
    for k in 1..=20 {
        let col: Vec<f64> = rhos.iter().map(|r| r[k]).collect();
        let (m, s) = mean_sd(&col);
        assert!((m - a.powi(k as i32)).abs() <= 3.0 * s / sqrt_r, "rho({k}) = {m}");
    }

    let acovs: Vec<Vec<f64>> = reps.iter().map(|x| autocov_direct(x, 5).unwrap().values).collect();
    for k in 0..=5 {
        let col: Vec<f64> = acovs.iter().map(|r| r[k]).collect();
        let (m, s) = mean_sd(&col);
        let exact = a.powi(k as i32) * p.stationary_var();
        assert!((m - exact).abs() <= 3.0 * s / sqrt_r, "R({k}) = {m}");
    }
}

fn order_one_hits(reps: &[Vec<f64>]) -> usize {
    reps.iter()
        .filter(|x| fit_ar_iact(x, None).unwrap().0.order == 1)
        .count()
}

#[test]
#[ignore = "plain AIC overfits AR(1) with probability near 0.29 at the default order cap, so 80% is out of reach"]
fn aic_recovers_first_order_eighty_percent() {
    let reps = replicates(0.6, 100_000, 50, 2);
    let hits = order_one_hits(&reps);
    println!("AIC picked order 1 in {hits}/50 replicates");
    assert!(hits >= 40);
}

/// Asymptotic probability that AIC picks the true order when many larger
/// orders are candidates.
const AIC_CORRECT_ORDER_LIMIT: f64 = 0.7117;

#[test]
fn aic_first_order_frequency_matches_asymptotics() {
    let n_reps = 200;
    let reps = replicates(0.6, 100_000, n_reps, 2);
    let freq = order_one_hits(&reps) as f64 / n_reps as f64;
    let p = AIC_CORRECT_ORDER_LIMIT;
    let se = (p * (1.0 - p) / n_reps as f64).sqrt();
    println!("AIC picked order 1 with frequency {freq}");
    assert!((freq - p).abs() <= 3.0 * se, "{freq}");
}

#[test]
fn obm_less_variable_than_bm() {
    let reps = replicates(0.8, 20_000, 100, 3);
    let bm = BatchSpec::new(BatchMode::NonOverlapping, BatchSizePolicy::Fixed(200));
    let obm = BatchSpec::new(BatchMode::Overlapping, BatchSizePolicy::Fixed(200));
    let b: Vec<f64> = reps.iter().map(|x| iact_bm(x, &bm).unwrap().1.iact).collect();
    let o: Vec<f64> = reps.iter().map(|x| iact_obm(x, &obm).unwrap().1.iact).collect();
    let (bm_mean, bm_sd) = mean_sd(&b);
    let (obm_mean, obm_sd) = mean_sd(&o);
    println!("BM {bm_mean} +- {bm_sd}, OBM {obm_mean} +- {obm_sd}");
    assert!(obm_sd <= bm_sd);
}

#[test]
fn bartlett_and_obm_agree_at_matching_width() {
    let a = 0.9;
    for x in replicates(a, 200_000, 5, 4) {
        let m = 447;
        let acov = autocov_fft(&x, m).unwrap();
        let rho = autocorr(&acov).unwrap();
        let bart = iact_window(&rho, x.len(), &WindowSpec::bartlett(WidthPolicy::Fixed(m)))
            .unwrap()
            .iact;
        let spec = BatchSpec::new(BatchMode::Overlapping, BatchSizePolicy::Fixed(m));
        let obm = iact_obm(&x, &spec).unwrap().1.iact;
        assert!((bart / obm - 1.0).abs() < 0.15, "Bartlett {bart} vs OBM {obm}");
    }
}

#[test]
fn batch_bias_shrinks_for_white_noise() {
    let mut prev = f64::INFINITY;
    for n in [1_000usize, 10_000, 100_000] {
        let reps = replicates(0.0, n, 100, 5);
        for mode in [BatchMode::NonOverlapping, BatchMode::Overlapping] {
            let spec = BatchSpec::new(mode, BatchSizePolicy::CountCubeRoot);
            let v: Vec<f64> = reps
                .iter()
                .map(|x| ess_core::iact_batch(x, &spec).unwrap().1.iact)
                .collect();
            let (m, s) = mean_sd(&v);
            assert!((m - 1.0).abs() <= 4.0 * s / 10.0 + 0.05, "n={n} {mode:?}: {m}");
        }
        let spec = BatchSpec::new(BatchMode::Overlapping, BatchSizePolicy::CountCubeRoot);
        let dev = reps
            .iter()
            .map(|x| (iact_obm(x, &spec).unwrap().1.iact - 1.0).abs())
            .sum::<f64>()
            / 100.0;
        assert!(dev < prev);
        prev = dev;
    }
}

#[test]
fn estimators_converge_on_analytic_acov() {
    let a: f64 = 0.7;
    let exact = ar1_exact_iact(a).unwrap();
    let n = 5000;
    let acov = ess_core::AcovSeq {
        values: (0..n).map(|k| a.powi(k as i32)).collect(),
        n,
        mean_used: 0.0,
    };
    let g = iact_geyer(&acov, GeyerVariant::InitialMonotone).unwrap();
    assert!((g.iact - exact).abs() < 1e-9);
    let rho = autocorr(&acov).unwrap();
    let w = iact_window(&rho, n, &WindowSpec::truncated(WidthPolicy::Fixed(400))).unwrap();
    assert!((w.iact - exact).abs() < 1e-9);
    let (_, ar) = ess_core::fit_ar_from_acov(&acov, 5).unwrap();
    assert!((ar.iact - exact).abs() < 1e-9);
}
