use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal oracle on [lo, hi].
/// Stops once the bracket is no wider than `tol` and returns the bracket
/// midpoint with its oracle value.
pub fn golden_section<F>(mut oracle: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::input(format!("golden_section needs lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::param(format!("tol must be > 0, got {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = oracle(c)?;
    let mut fd = oracle(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = oracle(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = oracle(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    Ok((mid, oracle(mid)?))
}
