use ess_core::rng::derive_seed;
use ess_core::{
    ar1_simulate, autocov_fft, ess_bulk, iact_geyer, psrf, rank_normalize, Ar1Init, Ar1Params,
    BulkOptions, ChainSet, GeyerVariant, RankOffset,
};
use proptest::prelude::*;

fn ar1(a: f64, n: usize, seed: u64) -> Vec<f64> {
    let p = Ar1Params::new(a, 0.0, 1.0).unwrap();
    ar1_simulate(&p, n, seed, Ar1Init::StationaryDraw)
        .unwrap()
        .into_samples()
}

fn raw() -> BulkOptions {
    BulkOptions {
        split: false,
        rank_normalize: false,
        ..Default::default()
    }
}

#[test]
fn single_chain_reduces_to_geyer() {
    let x = ar1(0.8, 5_000, 10);
    let n = x.len();
    let geyer = iact_geyer(&autocov_fft(&x, n - 1).unwrap(), GeyerVariant::InitialMonotone).unwrap();
    let bulk = ess_bulk(&ChainSet::from_vecs(vec![x]).unwrap(), &raw()).unwrap();
    assert_eq!(bulk.psrf.rhat, 1.0);
    assert!((bulk.iact.iact - geyer.iact).abs() <= 1e-10 * geyer.iact);
}

#[test]
fn shifted_copies_with_unit_rhat_reduce_to_geyer() {
    let x = ar1(0.8, 4_000, 11);
    let n = x.len();
    let s2 = ess_core::mean_and_var(&x).unwrap().1 * n as f64 / (n as f64 - 1.0);
    // B = W exactly when the two chain means sit sqrt(2 W / N) apart
    let d = (s2 / (2.0 * n as f64)).sqrt();
    let set = ChainSet::from_vecs(vec![
        x.iter().map(|v| v + d).collect(),
        x.iter().map(|v| v - d).collect(),
    ])
    .unwrap();
    let bulk = ess_bulk(&set, &raw()).unwrap();
    assert!((bulk.psrf.rhat - 1.0).abs() < 1e-12);
    let geyer = iact_geyer(&autocov_fft(&x, n - 1).unwrap(), GeyerVariant::InitialMonotone).unwrap();
    assert!((bulk.iact.iact - geyer.iact).abs() <= 1e-8 * geyer.iact);
    assert!((bulk.ess - 2.0 * n as f64 / geyer.iact).abs() <= 1e-8 * bulk.ess);
}

#[test]
fn diverged_chains_collapse() {
    let n = 10_000;
    let chains: Vec<Vec<f64>> = (0..4)
        .map(|j| {
            ar1(0.5, n, derive_seed(12, j))
                .into_iter()
                .map(|v| v + 100.0 * j as f64)
                .collect()
        })
        .collect();
    let set = ChainSet::from_vecs(chains.clone()).unwrap();
    let report = ess_bulk(&set, &BulkOptions::default()).unwrap();
    let r = report.psrf.rhat;
    println!("diverged: rhat = {r}, ess = {}", report.ess);
    assert!(r > 2.0);
    let floor = 1.0 - 1.0 / r;
    assert!(report.rho_hat.iter().all(|p| (p - floor).abs() <= (1.0 + 1e-12) / (r * r)));
    assert!(report.ess < 10.0, "ESS {}", report.ess);

    let single = iact_geyer(&autocov_fft(&chains[0], n - 1).unwrap(), GeyerVariant::InitialMonotone)
        .unwrap();
    assert!(report.iact.iact > single.iact);
}

#[test]
fn odd_length_chains_split_cleanly() {
    let set = ChainSet::from_vecs(vec![ar1(0.3, 1001, 1), ar1(0.3, 1001, 2)]).unwrap();
    let r = ess_bulk(&set, &BulkOptions::default()).unwrap();
    assert_eq!(r.n_chains, 4);
    assert_eq!(r.chain_len, 500);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psrf_ignores_common_shift(
        a in prop::collection::vec(-5.0f64..5.0, 6),
        b in prop::collection::vec(-5.0f64..5.0, 6),
        shift in -100.0f64..100.0,
    ) {
        let base = ChainSet::from_vecs(vec![a.clone(), b.clone()]).unwrap();
        let moved = ChainSet::from_vecs(vec![
            a.iter().map(|v| v + shift).collect(),
            b.iter().map(|v| v + shift).collect(),
        ]).unwrap();
        let (p, q) = (psrf(&base).unwrap(), psrf(&moved).unwrap());
        prop_assert!((p.b - q.b).abs() <= 1e-9 * (1.0 + p.b));
        prop_assert!((p.w - q.w).abs() <= 1e-9 * (1.0 + p.w));
    }

    #[test]
    fn ranks_survive_monotone_maps(
        a in prop::collection::vec(-3.0f64..3.0, 5),
        b in prop::collection::vec(-3.0f64..3.0, 5),
    ) {
        let base = ChainSet::from_vecs(vec![a.clone(), b.clone()]).unwrap();
        let f = |v: &f64| (2.0 * v).exp() + v.powi(3);
        let mapped = ChainSet::from_vecs(vec![
            a.iter().map(f).collect(),
            b.iter().map(f).collect(),
        ]).unwrap();
        for off in [RankOffset::MinusEighth, RankOffset::Blom] {
            prop_assert_eq!(rank_normalize(&base, off).unwrap(), rank_normalize(&mapped, off).unwrap());
        }
    }
}
