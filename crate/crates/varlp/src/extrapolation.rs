//! Hypothesis checkers for the exponent-range conditions behind the
//! boundedness results, plus empirical verifiers that measure the uniform
//! constants those results assert.
//!
//! Each checker evaluates the printed range inequalities exactly as stated
//! (strict where strict) and then consults sufficient-condition proxies
//! (log-smoothness diagnostics); a proxy that fails to apply downgrades the
//! verdict to `Unknown`, never to `Violated`. Every number that enters a
//! decision is recorded in the report's witness list.

use crate::error::{Error, Result};
use crate::exponent::{check_log_holder, in_b_proxy, BProxy, Exponent, LogHolderThresholds};
use crate::grid::{Grid, GridFunction};
use crate::norms::{luxemburg_norm, weighted_norm};
use crate::report::{CheckReport, Verdict};
use crate::weights::{a1_constant, CubeFamily, Weight};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Relative tolerance of the Luxemburg-norm bisection used by the
/// empirical verifiers.
const NORM_TOL: f64 = 1e-10;

/// Dyadic depth used when this module certifies weights internally.
const CERT_DEPTH: u32 = 4;

// ---------------------------------------------------------------------------
// Pair families
// ---------------------------------------------------------------------------

/// A finite family of nonnegative function pairs `(f, g)`; the empirical
/// verifiers measure `sup` over the family of a norm ratio, so every entry
/// must be nonzero.
#[derive(Debug, Clone)]
pub struct PairFamily {
    pairs: Vec<(GridFunction, GridFunction)>,
    grid: Grid,
}

impl PairFamily {
    /// Validates that all pairs live on one grid, are nonnegative, and that
    /// both members of each pair are nonzero.
    pub fn new(pairs: Vec<(GridFunction, GridFunction)>) -> Result<Self> {
        let first = pairs
            .first()
            .ok_or_else(|| Error::invalid("pair family must be nonempty"))?;
        let grid = *first.0.grid();
        for (i, (f, g)) in pairs.iter().enumerate() {
            if f.grid() != &grid || g.grid() != &grid {
                return Err(Error::GridMismatch(format!("pair {i} of the family")));
            }
            for (name, func) in [("first", f), ("second", g)] {
                if func.values().iter().any(|&v| v < 0.0 || !v.is_finite()) {
                    return Err(Error::invalid(format!(
                        "pair {i}: {name} member must be nonnegative and finite"
                    )));
                }
                if func.max_abs() == 0.0 {
                    return Err(Error::invalid(format!(
                        "pair {i}: {name} member is identically zero"
                    )));
                }
            }
        }
        Ok(PairFamily { pairs, grid })
    }

    /// Builds pairs `(|T g|, g)` by applying an operator to each input.
    pub fn from_operator(
        inputs: &[GridFunction],
        op: impl Fn(&GridFunction) -> Result<GridFunction>,
    ) -> Result<Self> {
        let mut pairs = Vec::with_capacity(inputs.len());
        for g in inputs {
            let tg = op(g)?;
            pairs.push((tg.abs(), g.abs()));
        }
        PairFamily::new(pairs)
    }

    pub fn pairs(&self) -> &[(GridFunction, GridFunction)] {
        &self.pairs
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The first `ceil(len/2)` pairs, used for stability-under-doubling
    /// comparisons.
    pub fn first_half(&self) -> PairFamily {
        let keep = self.pairs.len().div_ceil(2);
        PairFamily { pairs: self.pairs[..keep].to_vec(), grid: self.grid }
    }

    /// Scales both members of every pair by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<PairFamily> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("pair scale must be positive, got {c}")));
        }
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for (f, g) in &self.pairs {
            pairs.push((f.scale(c)?, g.scale(c)?));
        }
        Ok(PairFamily { pairs, grid: self.grid })
    }
}

/// Deterministic test inputs: a rotation of Gaussian bumps, indicator sums,
/// and rectified oscillatory packets, all nonnegative and nonzero. The mix
/// stresses both local averaging and frequency-cutoff operators.
pub fn input_family(grid: Grid, count: usize, seed: u64) -> Result<Vec<GridFunction>> {
    if count == 0 {
        return Err(Error::invalid("input family needs count >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.extent();
    let dim = grid.dim();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let f = match i % 3 {
            0 => {
                // Gaussian bump.
                let mut c = [0.0f64; 3];
                for coord in c.iter_mut().take(dim) {
                    *coord = rng.random_range(-l / 8.0..l / 8.0);
                }
                let sigma = rng.random_range(l / 32.0..l / 10.0);
                let amp = rng.random_range(0.5..2.0);
                GridFunction::from_fn(grid, move |x| {
                    let r2: f64 =
                        (0..dim).map(|d| (x[d] - c[d]) * (x[d] - c[d])).sum();
                    amp * (-r2 / (sigma * sigma)).exp()
                })?
            }
            1 => {
                // Sum of box indicators.
                let boxes = rng.random_range(2..=4usize);
                let mut spec = Vec::with_capacity(boxes);
                for _ in 0..boxes {
                    let mut c = [0.0f64; 3];
                    for coord in c.iter_mut().take(dim) {
                        *coord = rng.random_range(-l / 4.0..l / 4.0);
                    }
                    let hw = rng
                        .random_range(l / 32.0..l / 8.0)
                        .max(1.5 * grid.spacing());
                    spec.push((c, hw));
                }
                GridFunction::from_fn(grid, move |x| {
                    spec.iter()
                        .filter(|(c, hw)| (0..dim).all(|d| (x[d] - c[d]).abs() <= *hw))
                        .count() as f64
                })?
            }
            _ => {
                // Rectified oscillatory packet.
                let axis = rng.random_range(0..dim);
                let freq = rng.random_range(2..=8u32) as f64;
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                let sigma = rng.random_range(l / 16.0..l / 8.0);
                GridFunction::from_fn(grid, move |x| {
                    let r2: f64 = (0..dim).map(|d| x[d] * x[d]).sum();
                    (std::f64::consts::TAU * freq * x[axis] / l + phase).cos().abs()
                        * (-r2 / (sigma * sigma)).exp()
                })?
            }
        };
        out.push(f);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Range checkers
// ---------------------------------------------------------------------------

fn validate_base(p0: f64, delta: f64) -> Result<()> {
    if !(p0 > 0.0 && p0.is_finite()) {
        return Err(Error::invalid(format!("base exponent must satisfy 0 < p0 < inf, got {p0}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn attach_proxy(report: CheckReport, p: &Exponent, p0: f64, delta: f64) -> Result<CheckReport> {
    // Boundedness proxy on `delta * (p(.)/p0)'`; only reachable when the
    // range holds, which guarantees p0 < p_minus.
    let scaled = p.scaled_conjugate(p0, delta)?;
    let proxy = in_b_proxy(&scaled, &LogHolderThresholds::default());
    let mut report = report
        .with("scaled_conjugate_min", scaled.p_minus())
        .with("proxy_c1_hat", proxy.log_holder.c1_hat)
        .with("proxy_c2_hat", proxy.log_holder.c2_hat);
    if proxy.verdict == BProxy::Unknown {
        report.verdict = Verdict::Unknown;
        report = report.note(
            "boundedness proxy inconclusive for the scaled conjugate exponent",
        );
    }
    Ok(report)
}

/// Diagonal range check: `p0 < p_minus <= p_plus < p0/(1 - delta)` plus the
/// boundedness proxy on `delta (p(.)/p0)'`. `Unknown` only when the range
/// holds but the proxy is inconclusive.
pub fn check_diagonal_range(p: &Exponent, p0: f64, delta: f64) -> Result<CheckReport> {
    validate_base(p0, delta)?;
    let upper = p0 / (1.0 - delta);
    let report = CheckReport::new("diagonal-range", Verdict::HypothesesMet)
        .with("p0", p0)
        .with("delta", delta)
        .with("p_minus", p.p_minus())
        .with("p_plus", p.p_plus())
        .require("range_lower", p0, p.p_minus(), true)
        .require("range_upper", p.p_plus(), upper, true);
    if report.verdict == Verdict::Violated {
        return Ok(report);
    }
    attach_proxy(report, p, p0, delta)
}

/// Off-diagonal range check: `p0 < p_minus <= p_plus < p0 q0/(q0 - delta p0)`,
/// the companion exponent `q(.)` with `1/p - 1/q = 1/p0 - 1/q0`, its derived
/// range `q0 < q_minus <= q_plus < q0/(1 - delta)` (evaluated independently),
/// and the boundedness proxy on `delta (q(.)/q0)'`. With `p0 = q0` this
/// reduces exactly to the diagonal check.
pub fn check_offdiagonal_range(
    p: &Exponent,
    p0: f64,
    q0: f64,
    delta: f64,
) -> Result<CheckReport> {
    validate_base(p0, delta)?;
    if !(q0 >= p0 && q0.is_finite()) {
        return Err(Error::invalid(format!(
            "target base must satisfy p0 <= q0 < inf, got p0 = {p0}, q0 = {q0}"
        )));
    }
    let upper = p0 * q0 / (q0 - delta * p0);
    let report = CheckReport::new("offdiagonal-range", Verdict::HypothesesMet)
        .with("p0", p0)
        .with("q0", q0)
        .with("delta", delta)
        .with("p_minus", p.p_minus())
        .with("p_plus", p.p_plus())
        .require("range_lower", p0, p.p_minus(), true)
        .require("range_upper", p.p_plus(), upper, true);
    if report.verdict == Verdict::Violated {
        return Ok(report);
    }
    let q = p.offdiagonal(p0, q0)?;
    let report = report
        .with("q_minus", q.p_minus())
        .with("q_plus", q.p_plus())
        .require("derived_q_lower", q0, q.p_minus(), true)
        .require("derived_q_upper", q.p_plus(), q0 / (1.0 - delta), true);
    if report.verdict == Verdict::Violated {
        return Ok(report);
    }
    attach_proxy(report, &q, q0, delta)
}

/// Rebased range check: verifies
/// `p0/(1 + delta (p0 - 1)) < p_minus <= p_plus < p0/(1 - delta)` and then
/// searches `search_grid` for a shifted base `p*` in the open interval
/// `(p0/(1 + delta (p0 - 1)), p_minus)` whose adjusted
/// `delta* = (p0 - p* (1 - delta))/p0` makes the boundedness proxy pass.
/// An empty admissible grid yields `Unknown` with a note.
pub fn check_base_shift_range(
    p: &Exponent,
    p0: f64,
    delta: f64,
    search_grid: &[f64],
) -> Result<CheckReport> {
    validate_base(p0, delta)?;
    if p0 <= 1.0 {
        return Err(Error::invalid(format!("base shift needs p0 > 1, got {p0}")));
    }
    let lower = p0 / (1.0 + delta * (p0 - 1.0));
    let upper = p0 / (1.0 - delta);
    let mut report = CheckReport::new("base-shift-range", Verdict::HypothesesMet)
        .with("p0", p0)
        .with("delta", delta)
        .with("p_minus", p.p_minus())
        .with("p_plus", p.p_plus())
        .require("range_lower", lower, p.p_minus(), true)
        .require("range_upper", p.p_plus(), upper, true);
    if report.verdict == Verdict::Violated {
        return Ok(report);
    }
    let admissible: Vec<f64> = search_grid
        .iter()
        .copied()
        .filter(|&s| s > lower && s < p.p_minus())
        .collect();
    if admissible.is_empty() {
        report.verdict = Verdict::Unknown;
        return Ok(report.note("no admissible shifted base exponent in the search grid"));
    }
    for p_star in admissible {
        let delta_star = (p0 - p_star * (1.0 - delta)) / p0;
        let scaled = p.scaled_conjugate(p_star, delta_star)?;
        let proxy = in_b_proxy(&scaled, &LogHolderThresholds::default());
        if proxy.verdict == BProxy::Pass {
            return Ok(report
                .with("p_star", p_star)
                .with("delta_star", delta_star)
                .with("proxy_c1_hat", proxy.log_holder.c1_hat)
                .with("proxy_c2_hat", proxy.log_holder.c2_hat));
        }
    }
    report.verdict = Verdict::Unknown;
    Ok(report.note("boundedness proxy inconclusive at every searched base exponent"))
}

/// Log-smooth range check: `p0/(1 + delta (p0 - 1)) < p_minus <= p_plus <
/// p0/(1 - delta)` gated on the log-smoothness diagnostics of `p` itself
/// (inconclusive diagnostics yield `Unknown`, never `Violated`).
pub fn check_log_smooth_range(p: &Exponent, p0: f64, delta: f64) -> Result<CheckReport> {
    validate_base(p0, delta)?;
    let lower = p0 / (1.0 + delta * (p0 - 1.0));
    let upper = p0 / (1.0 - delta);
    let lh = check_log_holder(p, &LogHolderThresholds::default());
    let mut report = CheckReport::new("log-smooth-range", Verdict::HypothesesMet)
        .with("p0", p0)
        .with("delta", delta)
        .with("p_minus", p.p_minus())
        .with("p_plus", p.p_plus())
        .with("log_smooth_c1_hat", lh.c1_hat)
        .with("log_smooth_c2_hat", lh.c2_hat)
        .require("range_lower", lower, p.p_minus(), true)
        .require("range_upper", p.p_plus(), upper, true);
    if report.verdict == Verdict::HypothesesMet && !(lh.passes() && p.p_minus() > 1.0) {
        report.verdict = Verdict::Unknown;
        report = report.note("log-smoothness diagnostics inconclusive");
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Application ranges
// ---------------------------------------------------------------------------

/// The operator families whose variable-exponent ranges this crate checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Application {
    /// Rough-kernel singular integral, range `r' < p_minus` (no upper bound).
    RoughA { r: f64 },
    /// Rough-kernel singular integral, range `1 < p_minus <= p_plus < r`.
    RoughB { r: f64 },
    /// Rough-kernel singular integral, two-sided range around a base `p0`.
    RoughC { r: f64, p0: f64 },
    /// Oscillating multiplier `theta(|xi|) e^{i|xi|^b} |xi|^{-a}`.
    StronglySingular { n: usize, b: f64, a: f64, p0: f64 },
    /// Fractional spherical maximal operator of order `alpha`.
    Spherical { n: usize, alpha: f64 },
    /// Maximal Bochner-Riesz operator of order `beta`.
    BochnerRiesz { n: usize, beta: f64 },
}

/// Range check for one operator family: evaluates the printed endpoint
/// formulas exactly (strict inequalities kept strict), gates the verdict on
/// the log-smoothness diagnostics of `p`, and records every intermediate
/// quantity — including both readings wherever the source formula is
/// ambiguous — in the witness list.
pub fn application_range(app: &Application, p: &Exponent) -> Result<CheckReport> {
    let report = match *app {
        Application::RoughA { r } => {
            let r_conj = validate_r(r)?;
            CheckReport::new("rough-a", Verdict::HypothesesMet)
                .with("r", r)
                .with("r_conjugate", r_conj)
                .with("p_minus", p.p_minus())
                .with("p_plus", p.p_plus())
                .require("range_lower", r_conj, p.p_minus(), true)
        }
        Application::RoughB { r } => {
            let r_conj = validate_r(r)?;
            // Any base p0 in (1, p_minus) extrapolates with
            // delta = (r - p0)/r, whose upper endpoint p0/(1 - delta) is
            // exactly r; record it at a representative p0. The equivalent
            // weight-class index is typeset ambiguously in the source, so
            // both readings are reported.
            let p0 = 0.5 * (1.0 + p.p_minus().min(r));
            let delta = (r - p0) / r;
            CheckReport::new("rough-b", Verdict::HypothesesMet)
                .with("r", r)
                .with("r_conjugate", r_conj)
                .with("p_minus", p.p_minus())
                .with("p_plus", p.p_plus())
                .with("p0_example", p0)
                .with("delta_example", delta)
                .with("upper_from_delta", p0 / (1.0 - delta))
                .with("index_reading_product", p0 * (r - 1.0) / r_conj)
                .with("index_reading_affine", (p0 * r - 1.0) / r_conj)
                .note("equivalent weight-class index is ambiguous in the source; both readings recorded")
                .require("range_lower", 1.0, p.p_minus(), true)
                .require("range_upper", p.p_plus(), r, true)
        }
        Application::RoughC { r, p0 } => {
            validate_r(r)?;
            if !(p0 > 1.0 && p0.is_finite()) {
                return Err(Error::invalid(format!(
                    "rough family C needs 1 < p0 < inf, got {p0}"
                )));
            }
            let lower = p0 * r / (r + (r - 1.0) * (p0 - 1.0));
            let upper = r * p0;
            CheckReport::new("rough-c", Verdict::HypothesesMet)
                .with("r", r)
                .with("p0", p0)
                .with("p_minus", p.p_minus())
                .with("p_plus", p.p_plus())
                .with("delta_endpoint_consistent", (r - 1.0) / r)
                .with("delta_stated", 1.0 / (r - 1.0))
                .note("the stated delta = 1/(r-1) does not reproduce the printed endpoints, which correspond to delta = (r-1)/r; both recorded")
                .require("range_lower", lower, p.p_minus(), true)
                .require("range_upper", p.p_plus(), upper, true)
        }
        Application::StronglySingular { n, b, a, p0 } => {
            if n == 0 {
                return Err(Error::invalid("dimension must be >= 1"));
            }
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::invalid(format!("need 0 < b < 1, got {b}")));
            }
            if !(p0 > 1.0 && p0.is_finite()) {
                return Err(Error::invalid(format!("need 1 < p0 < inf, got {p0}")));
            }
            let nb = n as f64 * b;
            let alpha = nb * (1.0 / p0 - 0.5).abs();
            if !(a >= alpha && a <= nb / 2.0) {
                return Err(Error::invalid(format!(
                    "need alpha <= a <= n b / 2 with alpha = {alpha}, got a = {a}"
                )));
            }
            let gamma = (a - alpha) / (nb / 2.0 - alpha);
            let lower = p0 / (1.0 + gamma * (p0 - 1.0));
            let upper = if gamma < 1.0 { p0 / (1.0 - gamma) } else { f64::INFINITY };
            let mut report = CheckReport::new("strongly-singular", Verdict::HypothesesMet)
                .with("n", n as f64)
                .with("b", b)
                .with("a", a)
                .with("p0", p0)
                .with("alpha", alpha)
                .with("gamma", gamma)
                .with("p_minus", p.p_minus())
                .with("p_plus", p.p_plus())
                .with("unweighted_halfwidth", a / nb)
                .note("unweighted constant-exponent range |1/p - 1/2| <= a/(n b) has non-strict endpoints as stated; the variable range below is strict")
                .require("range_lower", lower, p.p_minus(), true);
            if upper.is_finite() {
                report = report.require("range_upper", p.p_plus(), upper, true);
            } else {
                report = report
                    .with("range_upper.lhs", p.p_plus())
                    .note("gamma = 1: no finite upper endpoint");
            }
            report
        }
        Application::Spherical { n, alpha } => {
            if n <= 2 {
                return Err(Error::invalid(format!(
                    "spherical maximal range needs dimension > 2, got {n}"
                )));
            }
            let nf = n as f64;
            if !(alpha > 0.0 && alpha < nf - 2.0) {
                return Err(Error::invalid(format!(
                    "need 0 < alpha < n - 2 = {}, got {alpha}",
                    nf - 2.0
                )));
            }
            let lower = nf / (nf - 1.0);
            let upper = nf / (1.0 + alpha);
            let mut report = CheckReport::new("spherical", Verdict::HypothesesMet)
                .with("n", nf)
                .with("alpha", alpha)
                .with("p_minus", p.p_minus())
                .with("p_plus", p.p_plus())
                .require("range_lower", lower, p.p_minus(), true)
                .require("range_upper", p.p_plus(), upper, true);
            // Companion exponent 1/q = 1/p - alpha/n, computed whenever it
            // is nondegenerate (even alongside a violated range, so the
            // formula values are always visible).
            if 1.0 / p.p_plus() > alpha / nf {
                let q = p.offdiagonal(1.0, nf / (nf - alpha))?;
                report = report.with("q_minus", q.p_minus()).with("q_plus", q.p_plus());
            } else {
                report = report.note("companion exponent degenerates at p_plus");
            }
            // Representative shifted base p* in (n/(n-1), p_minus), its
            // companion q*, the weight power gamma = 1 - q*/n, and the
            // identity p* q*/(q* - gamma p*) = n/(1 + alpha).
            if p.p_minus() > lower {
                let p_star = 0.5 * (lower + p.p_minus());
                let q_star = 1.0 / (1.0 / p_star - alpha / nf);
                let gamma = 1.0 - q_star / nf;
                report = report
                    .with("p_star", p_star)
                    .with("q_star", q_star)
                    .with("gamma", gamma)
                    .with("base_identity", p_star * q_star / (q_star - gamma * p_star))
                    .with("base_identity_expected", nf / (1.0 + alpha));
            }
            report
        }
        Application::BochnerRiesz { n, beta } => {
            if n < 2 {
                return Err(Error::invalid(format!(
                    "Bochner-Riesz range needs dimension >= 2, got {n}"
                )));
            }
            let nf = n as f64;
            if !(beta > 0.0 && beta < (nf - 1.0) / 2.0) {
                return Err(Error::invalid(format!(
                    "need 0 < beta < (n - 1)/2 = {}, got {beta}",
                    (nf - 1.0) / 2.0
                )));
            }
            let delta = 2.0 * beta / (nf - 1.0);
            let lower = 2.0 * (nf - 1.0) / (nf - 1.0 + 2.0 * beta);
            let upper = 2.0 * (nf - 1.0) / (nf - 1.0 - 2.0 * beta);
            CheckReport::new("bochner-riesz", Verdict::HypothesesMet)
                .with("n", nf)
                .with("beta", beta)
                .with("delta", delta)
                .with("p_minus", p.p_minus())
                .with("p_plus", p.p_plus())
                .with("lower_from_delta", 2.0 / (1.0 + delta))
                .with("upper_from_delta", 2.0 / (1.0 - delta))
                .require("range_lower", lower, p.p_minus(), true)
                .require("range_upper", p.p_plus(), upper, true)
        }
    };
    if report.verdict == Verdict::Violated {
        return Ok(report);
    }
    // Every family also assumes a log-smooth exponent.
    let lh = check_log_holder(p, &LogHolderThresholds::default());
    let mut report = report
        .with("log_smooth_c1_hat", lh.c1_hat)
        .with("log_smooth_c2_hat", lh.c2_hat);
    if !(lh.passes() && p.p_minus() > 1.0) {
        report.verdict = Verdict::Unknown;
        report = report.note("log-smoothness diagnostics inconclusive");
    }
    Ok(report)
}

fn validate_r(r: f64) -> Result<f64> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::invalid(format!(
            "rough kernel integrability index needs 1 < r < inf, got {r}"
        )));
    }
    Ok(r / (r - 1.0))
}

// ---------------------------------------------------------------------------
// Empirical verifiers
// ---------------------------------------------------------------------------

/// Measures the base weighted inequality over a pair family and a list of
/// A1-certified weights:
/// `(int f^q0 w^delta)^{1/q0} <= C0 (int g^p0 w^{delta p0/q0})^{1/p0}`.
/// The report carries `c0_hat` (the largest measured left/right ratio),
/// each weight's A1 constant, and skip counts for zero right-hand sides.
/// Weights that fail A1 certification (non-finite or refinement-unstable
/// constant) are rejected as invalid input.
pub fn empirical_weighted_hypothesis(
    pairs: &PairFamily,
    p0: f64,
    q0: f64,
    delta: f64,
    weights: &[Weight],
) -> Result<CheckReport> {
    if !(p0 > 0.0 && q0 >= p0 && q0.is_finite()) {
        return Err(Error::invalid(format!(
            "weighted measurement needs 0 < p0 <= q0 < inf, got p0 = {p0}, q0 = {q0}"
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    if weights.is_empty() {
        return Err(Error::invalid("weight list must be nonempty"));
    }
    let grid = pairs.grid();
    let family = CubeFamily::dyadic(&grid, CubeFamily::max_depth(&grid).min(CERT_DEPTH))?;
    let mut report = CheckReport::new("weighted-hypothesis", Verdict::HypothesesMet)
        .with("p0", p0)
        .with("q0", q0)
        .with("delta", delta);
    let mut powered = Vec::with_capacity(weights.len());
    for (i, w) in weights.iter().enumerate() {
        if w.grid() != &grid {
            return Err(Error::GridMismatch(format!("weight {i} vs pair family")));
        }
        let cert = a1_constant(w, &family)?;
        if !cert.constant.is_finite() || !cert.stable {
            return Err(Error::invalid(format!(
                "weight {i} is not A1-certified: constant = {}, refinement-stable = {}",
                cert.constant, cert.stable
            )));
        }
        report = report.with(format!("a1_constant_{i}"), cert.constant);
        powered.push((w.powf(delta)?, w.powf(delta * p0 / q0)?));
    }
    let mut c0_hat = f64::NEG_INFINITY;
    let mut used = 0usize;
    let mut skipped = 0usize;
    let mut argmax = (0usize, 0usize);
    for (i, (f, g)) in pairs.pairs().iter().enumerate() {
        for (j, (wq, wp)) in powered.iter().enumerate() {
            let lhs = weighted_norm(f, q0, wq)?;
            let rhs = weighted_norm(g, p0, wp)?;
            if rhs == 0.0 {
                skipped += 1;
                continue;
            }
            used += 1;
            let ratio = lhs / rhs;
            if ratio > c0_hat {
                c0_hat = ratio;
                argmax = (i, j);
            }
        }
    }
    if skipped > 0 {
        report = report.note(format!(
            "warning: {skipped} pair-weight combinations skipped (zero right-hand side)"
        ));
    }
    if used == 0 {
        report.verdict = Verdict::Unknown;
        return Ok(report.note("no admissible pair-weight combination"));
    }
    Ok(report
        .with("c0_hat", c0_hat)
        .with("combinations_used", used as f64)
        .with("combinations_skipped", skipped as f64)
        .note(format!("largest ratio at pair {}, weight {}", argmax.0, argmax.1)))
}

/// Measures the variable-exponent conclusion over a pair family:
/// `c_hat = max ||f||_{q(.)} / ||g||_{p(.)}`, with a stability comparison
/// between the first half of the family and the whole family. Pairs with a
/// zero denominator are skipped with a note.
pub fn empirical_variable_conclusion(
    pairs: &PairFamily,
    p: &Exponent,
    q: &Exponent,
) -> Result<CheckReport> {
    if p.grid() != &pairs.grid() || q.grid() != &pairs.grid() {
        return Err(Error::GridMismatch("exponents vs pair family".into()));
    }
    let mut report = CheckReport::new("variable-conclusion", Verdict::HypothesesMet)
        .with("p_minus", p.p_minus())
        .with("p_plus", p.p_plus())
        .with("q_minus", q.p_minus())
        .with("q_plus", q.p_plus());
    let half = pairs.len().div_ceil(2);
    let mut c_hat = f64::NEG_INFINITY;
    let mut c_hat_half = f64::NEG_INFINITY;
    let mut used = 0usize;
    let mut skipped = 0usize;
    let mut argmax = 0usize;
    for (i, (f, g)) in pairs.pairs().iter().enumerate() {
        let num = luxemburg_norm(f, q, NORM_TOL)?.value;
        let den = luxemburg_norm(g, p, NORM_TOL)?.value;
        if den == 0.0 {
            skipped += 1;
            continue;
        }
        used += 1;
        let ratio = num / den;
        if ratio > c_hat {
            c_hat = ratio;
            argmax = i;
        }
        if i < half && ratio > c_hat_half {
            c_hat_half = ratio;
        }
    }
    if skipped > 0 {
        report = report.note(format!("{skipped} pairs skipped (zero denominator norm)"));
    }
    if used == 0 {
        report.verdict = Verdict::Unknown;
        return Ok(report.note("no admissible pair"));
    }
    let rel_change = if c_hat > 0.0 { (c_hat - c_hat_half) / c_hat } else { 0.0 };
    Ok(report
        .with("c_hat", c_hat)
        .with("c_hat_first_half", c_hat_half)
        .with("relative_change_on_doubling", rel_change)
        .with("stable", f64::from(u8::from(rel_change.abs() < 0.10)))
        .with("pairs_used", used as f64)
        .note(format!("largest ratio at pair {argmax}")))
}
