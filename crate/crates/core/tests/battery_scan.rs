use rfo_core::cases::{battery_evaluate, battery_solve, BatteryConfig, BatteryPolicy};

fn scan_cost(c: &BatteryConfig, prices: &rfo_core::grf::FieldEnsemble, z: f64) -> f64 {
    battery_evaluate(c, z, &BatteryPolicy::Recourse, prices).unwrap().expected_cost
}

#[test]
fn five_point_battery_matches_capacity_scan() {
    let c = BatteryConfig { points: 5, samples: 2, seed: 11, ..Default::default() };
    let (r, prices) = battery_solve(&c, false).unwrap();
    let coarse: Vec<(f64, f64)> = (0..=100).map(|i| (i as f64, scan_cost(&c, &prices, i as f64))).collect();
    let &(z0, _) = coarse.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let lo = (z0 - 1.0).max(0.0);
    let hi = (z0 + 1.0).min(100.0);
    let fine = (0..=2000)
        .map(|i| scan_cost(&c, &prices, lo + (hi - lo) * i as f64 / 2000.0))
        .fold(f64::INFINITY, f64::min);
    let best = fine.min(coarse.iter().map(|p| p.1).fold(f64::INFINITY, f64::min));
    assert!(r.expected_cost <= best + 1e-6, "{} vs scan {best}", r.expected_cost);
    assert!((r.expected_cost - best).abs() <= 1e-4, "{} vs scan {best}", r.expected_cost);
}

#[test]
fn stochastic_design_dominates_deterministic_on_training_set() {
    for seed in 0..3 {
        let c = BatteryConfig { points: 13, samples: 8, seed, ..Default::default() };
        let (det, _) = battery_solve(&c, true).unwrap();
        let (sto, prices) = battery_solve(&c, false).unwrap();
        let cross = battery_evaluate(&c, det.z_b, &BatteryPolicy::Recourse, &prices).unwrap();
        assert!(sto.expected_cost <= cross.expected_cost + 1e-6, "seed {seed}");
    }
}
