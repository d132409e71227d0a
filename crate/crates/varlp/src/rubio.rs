//! The iteration algorithm that builds, from a nonnegative function h, a
//! majorant Rh = sum_k M_delta^k h / (2B)^k whose (1/delta)-th power is an
//! A_1 weight, together with numerical certificates for the three properties
//! the construction guarantees: Rh >= h, a norm bound, and A_1 membership.
//!
//! Here M_delta is the powered maximal operator and B is a caller-supplied
//! upper bound for its norm on the auxiliary space (any overestimate is
//! safe — it only speeds decay; an underestimate slows the detected
//! convergence). Truncation norms are Luxemburg norms in the conjugate
//! exponent of q(.)/q0.

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::GridFunction;
use crate::maximal::{powered_maximal, MaximalConfig};
use crate::norms::luxemburg_norm;
use crate::report::{CheckReport, Verdict};
use crate::weights::{a1_constant, CubeFamily, Weight};

/// Exponent of the auxiliary space on which the powered maximal operator
/// must act boundedly: the delta-scaled conjugate of q(.)/q0.
///
/// Requires `q0 < q_minus` and `q_plus < q0/(1-delta)`, which force the
/// result's minimum above 1.
pub fn auxiliary_exponent(q: &Exponent, q0: f64, delta: f64) -> Result<Exponent> {
    if delta < 1.0 && q.p_plus() >= q0 / (1.0 - delta) {
        return Err(Error::invalid(format!(
            "q_plus = {} must lie below q0/(1-delta) = {}",
            q.p_plus(),
            q0 / (1.0 - delta)
        )));
    }
    let out = q.scaled_conjugate(q0, delta)?;
    debug_assert!(out.p_minus() > 1.0);
    Ok(out)
}

/// Algorithm parameters for [`iterate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RubioParams {
    /// Base integrability exponent; must satisfy `q0 < q_minus`.
    pub q0: f64,
    /// Power in the powered maximal operator, in (0, 1].
    pub delta: f64,
    /// Norm bound stand-in `B >= ||M_delta||`, at least 1.
    pub b: f64,
    /// Relative truncation tolerance for the term norms.
    pub tol: f64,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
}

impl RubioParams {
    pub fn new(q0: f64, delta: f64, b: f64) -> Self {
        RubioParams { q0, delta, b, tol: 1e-8, max_terms: 60 }
    }
}

/// The truncated majorant and everything needed to certify it.
#[derive(Debug, Clone)]
pub struct IterationResult {
    /// Partial sum of the series; `rh >= h` pointwise by construction.
    pub rh: GridFunction,
    /// Number of series terms summed (the k = 0 term `|h|` included).
    pub terms_used: usize,
    /// Norm bound used in the denominators.
    pub b: f64,
    /// Upper bound for the norm of the dropped tail: the smaller of the
    /// geometric bound `2^(1-K) ||h||` and the last term's norm (each term
    /// is at most half its predecessor in norm when B is an overestimate).
    pub tail_bound: f64,
    /// Exponent of the truncation norms: the conjugate of q(.)/q0.
    pub norm_exponent: Exponent,
    /// Measured `||h||` in that exponent.
    pub h_norm: f64,
    pub delta: f64,
    pub tol: f64,
}

/// Runs the iteration: term_0 = h, term_{k+1} = M_delta(term_k)/(2B),
/// summing until a term's norm drops below `tol * ||h||`.
///
/// Errors with a convergence diagnosis if `max_terms` is reached first.
pub fn iterate(
    h: &GridFunction,
    q: &Exponent,
    params: &RubioParams,
    mcfg: &MaximalConfig,
) -> Result<IterationResult> {
    if h.min() < 0.0 {
        return Err(Error::invalid("iteration input must be nonnegative"));
    }
    if h.max() == 0.0 {
        return Err(Error::invalid("iteration input must not be identically zero"));
    }
    if !(params.b >= 1.0 && params.b.is_finite()) {
        return Err(Error::invalid(format!("norm bound B must be >= 1, got {}", params.b)));
    }
    if !(params.tol > 0.0 && params.tol < 1.0) {
        return Err(Error::invalid(format!("tolerance must be in (0, 1), got {}", params.tol)));
    }
    if params.max_terms == 0 {
        return Err(Error::invalid("max_terms must be positive"));
    }
    // The conjugate of q/q0 only needs q0 < q_minus, so the iteration runs
    // even at the boundary of the range demanded by the auxiliary space.
    let norm_exponent = q.scaled_conjugate(params.q0, 1.0)?;
    let norm_tol = (params.tol * 1e-2).clamp(1e-12, 1e-6);
    let h_norm = luxemburg_norm(h, &norm_exponent, norm_tol)?.value;

    let mut rh = h.clone();
    let mut term = h.clone();
    let mut term_norm = h_norm;
    let mut terms_used = 1usize;
    while term_norm > params.tol * h_norm {
        if terms_used == params.max_terms {
            return Err(Error::Convergence {
                what: format!(
                    "majorant series (B = {}, last term at {:.3e} of ||h||)",
                    params.b,
                    term_norm / h_norm
                ),
                iterations: params.max_terms,
            });
        }
        term = powered_maximal(&term, params.delta, mcfg)?.scale(1.0 / (2.0 * params.b))?;
        rh = rh.zip_map(&term, |a, b| a + b)?;
        term_norm = luxemburg_norm(&term, &norm_exponent, norm_tol)?.value;
        terms_used += 1;
    }
    let geometric = 2.0f64.powi(1 - terms_used as i32) * h_norm;
    Ok(IterationResult {
        rh,
        terms_used,
        b: params.b,
        tail_bound: geometric.min(term_norm),
        norm_exponent,
        h_norm,
        delta: params.delta,
        tol: params.tol,
    })
}

/// Seeded family of strictly positive iteration inputs: a unit pedestal
/// plus a few random Gaussian humps of contrast up to about 4x.
///
/// The cube-family side of [`a1_certificate`] compares an avg/min
/// functional against the pointwise budget `(2B)^(1/delta)` and therefore
/// carries covering-geometry slack; it stays within budget for inputs of
/// moderate dynamic range like these, while functions that nearly vanish
/// somewhere can exceed it even though the pointwise property holds. Use
/// this family when the goal is to certify the construction end to end.
pub fn certificate_input_family(
    grid: crate::grid::Grid,
    count: usize,
    seed: u64,
) -> Result<Vec<GridFunction>> {
    use rand::{RngExt, SeedableRng};
    if count == 0 {
        return Err(Error::invalid("certificate input family needs count >= 1"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let l = grid.extent();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let n_bumps = rng.random_range(2..5usize);
        let contrast: f64 = rng.random_range(0.3..1.5);
        let bumps: Vec<([f64; 3], f64, f64)> = (0..n_bumps)
            .map(|_| {
                let mut c = [0.0; 3];
                for a in c.iter_mut().take(grid.dim()) {
                    *a = rng.random_range(-l / 3.0..l / 3.0);
                }
                let sigma: f64 = rng.random_range(l / 16.0..l / 6.0);
                let amp: f64 = rng.random_range(0.3..1.0);
                (c, sigma, amp)
            })
            .collect();
        out.push(GridFunction::from_fn(grid, |x| {
            let mut v = 0.0;
            for (c, sigma, amp) in &bumps {
                let r2: f64 =
                    x.iter().zip(c.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                v += amp * (-r2 / (2.0 * sigma * sigma)).exp();
            }
            1.0 + contrast * v
        })?);
    }
    Ok(out)
}

/// Certifies the A_1 property of the majorant: (i) the pointwise ratio
/// `rho = max M_delta(Rh)/Rh` stays below `2B` plus the truncation slack
/// `max(tol, 10 tail_bound / min(Rh))` — dropping the series tail inflates
/// the ratio by about `2B * tail/Rh`, so a tail-blind threshold would
/// misreport honest runs — and (ii) the empirical A_1 constant of
/// `Rh^(1/delta)` over the cube family stays below `(2B)^(1/delta) + tol`.
///
/// Part (ii) compares a cube functional (avg/min over a finite family)
/// against the pointwise constant the construction guarantees; on strongly
/// peaked inputs it can exceed the budget by an O(1/B) mixing term and be
/// reported `Violated` even though the pointwise property holds. Both sides
/// of each inequality are always recorded.
pub fn a1_certificate(
    result: &IterationResult,
    delta: f64,
    family: &CubeFamily,
    mcfg: &MaximalConfig,
) -> Result<CheckReport> {
    let m_rh = powered_maximal(&result.rh, delta, mcfg)?;
    let mut rho = 0.0f64;
    for (&m, &r) in m_rh.values().iter().zip(result.rh.values()) {
        if r > 0.0 {
            rho = rho.max(m / r);
        } else if m > 0.0 {
            rho = f64::INFINITY;
        }
    }
    let min_rh = result.rh.min();
    let two_b = 2.0 * result.b;
    let slack = if min_rh > 0.0 {
        (10.0 * result.tail_bound / min_rh).max(result.tol)
    } else {
        result.tol
    };
    let a1 = a1_constant(
        &Weight::from_values(result.rh.map(|v| v.powf(1.0 / delta))?)?,
        family,
    )?;
    let report = CheckReport::new("majorant-a1-certificate", Verdict::HypothesesMet)
        .with("terms_used", result.terms_used as f64)
        .with("b", result.b)
        .with("tail_bound", result.tail_bound)
        .with("min_rh", min_rh)
        .require("pointwise_ratio", rho, two_b + slack, false)
        .require(
            "a1_constant",
            a1.constant,
            two_b.powf(1.0 / delta) + result.tol,
            false,
        )
        .note(format!("a1 stable under refinement: {}", a1.stable));
    Ok(report)
}
