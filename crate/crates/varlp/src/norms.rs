//! Modulars and Luxemburg norms for variable exponents, plus constant-
//! exponent weighted norms and the duality pairing.
//!
//! The Luxemburg norm is the unique `lambda` with `modular(f/lambda) = 1`
//! (for nonzero `f` on a finite grid), located by bisection. The bracket
//! `[lambda_lo, lambda_hi]` is validated before bisecting, so the routine
//! cannot silently return an endpoint.

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::{compensated_sum, GridFunction};
use crate::weights::Weight;

/// Modular values above this are reported as the `+inf` sentinel outright;
/// `exp` overflows just past it anyway.
const OVERFLOW_LOG_LIMIT: f64 = 690.0;

/// Outcome of a norm computation by bisection.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NormResult {
    pub value: f64,
    /// Bisection steps taken (0 for the zero function).
    pub iterations: usize,
    /// `|modular(f/value) - 1|`, 0 for the zero function.
    pub residual: f64,
}

/// `integrate(|f(x)|^p(x))`. Overflow is reported as `+inf`, never as NaN.
pub fn modular(f: &GridFunction, p: &Exponent) -> Result<f64> {
    if f.grid() != p.grid() {
        return Err(Error::GridMismatch("modular of function and exponent".into()));
    }
    Ok(scaled_modular(f, p, 1.0))
}

/// `integrate(|f(x)/lambda|^p(x))` without materializing the scaled field.
fn scaled_modular(f: &GridFunction, p: &Exponent, inv_lambda: f64) -> f64 {
    let pv = p.values().values();
    let mut acc = Vec::new();
    for (&v, &e) in f.values().iter().zip(pv) {
        let t = v.abs() * inv_lambda;
        if t == 0.0 {
            acc.push(0.0);
            continue;
        }
        // Detect overflow in log space before powering.
        if e * t.ln() > OVERFLOW_LOG_LIMIT {
            return f64::INFINITY;
        }
        acc.push(t.powf(e));
    }
    compensated_sum(acc.into_iter()) * f.grid().cell_volume()
}

/// Luxemburg norm `inf { lambda > 0 : modular(f/lambda) <= 1 }` by bisection.
///
/// `tol` is the relative bracket width at which bisection stops; the
/// returned residual is then at most about `p_plus * tol`.
pub fn luxemburg_norm(f: &GridFunction, p: &Exponent, tol: f64) -> Result<NormResult> {
    if f.grid() != p.grid() {
        return Err(Error::GridMismatch("norm of function and exponent".into()));
    }
    if !(tol > 0.0 && tol < 0.1) {
        return Err(Error::invalid(format!("tol must be in (0, 0.1), got {tol}")));
    }
    let sup = f.max_abs();
    if sup == 0.0 {
        return Ok(NormResult { value: 0.0, iterations: 0, residual: 0.0 });
    }

    // Upper endpoint: |f|/lambda_hi <= max(1,V)^(-1/p_minus) pointwise, so the
    // modular is at most V * max(1,V)^(-1) <= 1.
    let volume = f.grid().volume();
    let mut hi = sup * volume.max(1.0).powf(1.0 / p.p_minus());
    let mut guard = 0;
    while scaled_modular(f, p, 1.0 / hi) > 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 64 {
            return Err(Error::Convergence { what: "luxemburg bracket (upper)".into(), iterations: guard });
        }
    }
    let mut lo = hi * 1e-18;
    guard = 0;
    while scaled_modular(f, p, 1.0 / lo) < 1.0 {
        lo *= 1e-3;
        guard += 1;
        if guard > 200 {
            return Err(Error::Convergence { what: "luxemburg bracket (lower)".into(), iterations: guard });
        }
    }

    let mut iterations = 0;
    while hi - lo > tol * hi && iterations < 500 {
        let mid = 0.5 * (lo + hi);
        if scaled_modular(f, p, 1.0 / mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let value = 0.5 * (lo + hi);
    let residual = (scaled_modular(f, p, 1.0 / value) - 1.0).abs();
    Ok(NormResult { value, iterations, residual })
}

/// Quasi-norm `luxemburg(|f|^p0, p/p0)^(1/p0)` for exponents that may dip to
/// 1 or below; requires `0 < p0 < p_minus`.
pub fn quasi_norm(f: &GridFunction, p: &Exponent, p0: f64, tol: f64) -> Result<NormResult> {
    if !(p0 > 0.0 && p0 < p.p_minus()) {
        return Err(Error::invalid(format!(
            "quasi-norm needs 0 < p0 < p_minus = {}, got p0 = {p0}",
            p.p_minus()
        )));
    }
    let powered = f.map(|v| v.abs().powf(p0))?;
    let inner_exp = Exponent::new(p.values().map(|e| e / p0)?, p.p_inf() / p0)?;
    // The outer 1/p0 power divides the relative error by p0.
    let inner_tol = (tol * p0).min(0.05);
    let inner = luxemburg_norm(&powered, &inner_exp, inner_tol)?;
    Ok(NormResult {
        value: inner.value.powf(1.0 / p0),
        iterations: inner.iterations,
        residual: inner.residual,
    })
}

/// Constant-exponent weighted norm `(integrate(|f|^p w))^(1/p)`.
pub fn weighted_norm(f: &GridFunction, p: f64, w: &Weight) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::invalid(format!("weighted norm needs 0 < p < inf, got {p}")));
    }
    if f.grid() != w.values().grid() {
        return Err(Error::GridMismatch("weighted norm of function and weight".into()));
    }
    let integrand = f.zip_map(w.values(), |v, wv| v.abs().powf(p) * wv)?;
    Ok(integrand.integrate().powf(1.0 / p))
}

/// Duality pairing `integrate(f g)`.
pub fn dual_pairing(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    Ok(f.zip_map(g, |a, b| a * b)?.integrate())
}
