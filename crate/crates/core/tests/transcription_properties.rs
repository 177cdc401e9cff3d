use rfo_core::cases::{diffusion_program, DiffusionConfig};
use rfo_core::dense::DenseMatrix;
use rfo_core::grf::cholesky_with_jitter;
use rfo_core::grid::GridDomain;
use rfo_core::transcription::{derivative_rows, DerivativeScheme};

fn backward_euler_error(n: usize) -> f64 {
    let g = GridDomain::uniform(&[(0.0, 1.0, n)]).unwrap();
    let s = derivative_rows(&g, DerivativeScheme::BackwardEulerTime { axis: 0 }).unwrap();
    let t = g.axis(0).coords();
    let y: Vec<f64> = t.iter().map(|t| (2.0 * t).sin()).collect();
    s.apply(&y)
        .iter()
        .zip(&s.anchors)
        .map(|(v, &i)| (v - 2.0 * (2.0 * t[i]).cos()).abs())
        .fold(0.0, f64::max)
}

fn laplacian_error(n: usize, f: impl Fn(f64, f64) -> f64, lap: impl Fn(f64, f64) -> f64) -> f64 {
    let g = GridDomain::uniform(&[(0.0, 1.0, n), (-1.0, 1.0, n)]).unwrap();
    let s = derivative_rows(&g, DerivativeScheme::CentralLaplacian2d { axes: [0, 1] }).unwrap();
    let y: Vec<f64> = g.points().iter().map(|p| f(p[0], p[1])).collect();
    s.apply(&y)
        .iter()
        .zip(&s.anchors)
        .map(|(v, &i)| {
            let p = g.point(i);
            (v - lap(p[0], p[1])).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn backward_euler_is_first_order() {
    let e: Vec<f64> = [11, 21, 41, 81].iter().map(|&n| backward_euler_error(n)).collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.9, "{e:?}");
    }
}

#[test]
fn laplacian_exact_on_quadratics_and_second_order_on_quartics() {
    for n in [5, 9, 17] {
        let err = laplacian_error(n, |x, y| 3.0 * x * x - x * y + 0.5 * y * y + x, |_, _| 7.0);
        assert!(err <= 1e-9, "n {n}: {err}");
    }
    let quartic = |x: f64, y: f64| x.powi(4) + x * x * y * y - 2.0 * y.powi(4);
    let lap = |x: f64, y: f64| 12.0 * x * x + 2.0 * y * y + 2.0 * x * x - 24.0 * y * y;
    let e: Vec<f64> = [9, 17, 33, 65].iter().map(|&n| laplacian_error(n, quartic, lap)).collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.9, "{e:?}");
    }
}

fn small_diffusion() -> DiffusionConfig {
    DiffusionConfig { time_points: 3, space_points: 5, samples: 3, ..Default::default() }
}

#[test]
fn diffusion_quadratic_is_positive_semidefinite() {
    let cfg = small_diffusion();
    let field = cfg.field().unwrap();
    let dp = diffusion_program(&cfg, &field).unwrap();
    let mut p = dp.program;
    dp.tracking.scaled(50.0).add_to(&mut p);
    let n = p.num_vars();
    let mut q = DenseMatrix::zeros(n, n);
    for k in 0..p.q.nnz() {
        q.row_mut(p.q.rows[k])[p.q.cols[k]] += p.q.vals[k];
    }
    assert!(q.is_symmetric(0.0));
    for i in 0..n {
        q.row_mut(i)[i] += 1e-12;
    }
    let (_, jitter) = cholesky_with_jitter(&q, 0.0).unwrap();
    assert_eq!(jitter, 0.0);
}

#[test]
fn tracking_term_is_trapezoid_expectation() {
    let cfg = small_diffusion();
    let field = cfg.field().unwrap();
    let dp = diffusion_program(&cfg, &field).unwrap();
    let yc = dp.program.block("y_c").unwrap().clone();
    let (npts, k) = (yc.dims[0], yc.dims[1]);
    let x: Vec<f64> = (0..dp.program.num_vars()).map(|j| ((j * 37 % 101) as f64) / 200.0).collect();
    // tensor-product trapezoid weights built by hand
    let g = &dp.grid;
    let trap = |c: &[f64], i: usize| {
        let left = if i > 0 { c[i] - c[i - 1] } else { 0.0 };
        let right = if i + 1 < c.len() { c[i + 1] - c[i] } else { 0.0 };
        0.5 * (left + right)
    };
    let mut expected = 0.0;
    for i in 0..npts {
        let m = g.multi_index(i);
        let w: f64 = (0..g.dim()).map(|a| trap(g.axis(a).coords(), m[a])).product();
        for s in 0..k {
            expected += w * (x[yc.at(&[i, s])] - cfg.setpoint).powi(2) / k as f64;
        }
    }
    let got = dp.tracking.evaluate(&x);
    assert!((got - expected).abs() <= 1e-12 * expected.abs().max(1.0), "{got} vs {expected}");
}
