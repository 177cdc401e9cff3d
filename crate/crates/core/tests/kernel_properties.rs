use proptest::prelude::*;
use rfo_core::kernels::Kernel;

fn stationary() -> Vec<Kernel> {
    vec![
        Kernel::squared_exponential(1.3, 0.7),
        Kernel::ornstein_uhlenbeck(0.4, 2.0),
        Kernel::matern(2.0, 0.5, 0.5),
        Kernel::matern(1.0, 1.2, 1.5),
        Kernel::matern(0.8, 0.3, 2.5),
        Kernel::matern(1.0, 1.0, 0.8),
    ]
}

proptest! {
    #[test]
    fn symmetric_and_stationary(a in prop::array::uniform2(-3.0f64..3.0), b in prop::array::uniform2(-3.0f64..3.0), s in prop::array::uniform2(-5.0f64..5.0)) {
        for k in stationary() {
            let kab = k.eval(&a, &b).unwrap();
            prop_assert_eq!(kab, k.eval(&b, &a).unwrap());
            let a2 = [a[0] + s[0], a[1] + s[1]];
            let b2 = [b[0] + s[0], b[1] + s[1]];
            prop_assert!((kab - k.eval(&a2, &b2).unwrap()).abs() <= 1e-12);
            prop_assert!(kab <= k.eval(&a, &a).unwrap() + 1e-12);
        }
    }

    #[test]
    fn matern_half_is_ou(r in 0.0f64..10.0, sigma in 0.1f64..3.0, beta in 0.1f64..3.0) {
        let m = Kernel::matern(sigma, beta, 0.5).at_distance(r).unwrap();
        let ou = Kernel::ornstein_uhlenbeck(sigma, beta).at_distance(r).unwrap();
        prop_assert!((m - ou).abs() <= 1e-10 * sigma);
    }

    #[test]
    fn matern_closed_forms(r in 0.0f64..6.0, beta in 0.2f64..3.0) {
        let s3 = 3f64.sqrt() * r / beta;
        let m32 = (1.0 + s3) * (-s3).exp();
        let s5 = 5f64.sqrt() * r / beta;
        let m52 = (1.0 + s5 + s5 * s5 / 3.0) * (-s5).exp();
        prop_assert!((Kernel::matern(1.0, beta, 1.5).at_distance(r).unwrap() - m32).abs() <= 1e-9);
        prop_assert!((Kernel::matern(1.0, beta, 2.5).at_distance(r).unwrap() - m52).abs() <= 1e-9);
    }
}

#[test]
fn ou_slope_at_origin() {
    let (sigma, beta) = (1.7, 0.6);
    let k = Kernel::ornstein_uhlenbeck(sigma, beta);
    let h = 1e-7;
    let slope = (k.at_distance(h).unwrap() - k.at_distance(0.0).unwrap()) / h;
    assert!((slope + sigma / beta).abs() <= 1e-5, "{slope}");
    let se = Kernel::squared_exponential(sigma, beta);
    let flat = (se.at_distance(h).unwrap() - se.at_distance(0.0).unwrap()) / h;
    assert!(flat.abs() <= 1e-5);
}

#[test]
fn variance_at_zero_distance() {
    for k in stationary() {
        assert_eq!(k.at_distance(0.0).unwrap(), k.eval(&[0.3, 0.3], &[0.3, 0.3]).unwrap());
    }
    assert!(Kernel::linear().at_distance(1.0).is_err());
    assert!(Kernel::squared_exponential(1.0, 0.0).validate().is_err());
}
