//! Variable exponents `p(.)` sampled on a grid, together with the exponent
//! algebra used by the range checkers (conjugation, scaling, off-diagonal
//! shifts) and log-Holder regularity diagnostics.
//!
//! An exponent carries its essential limit `p_inf` explicitly; the decay
//! diagnostic measures `|p(x) - p_inf| log(e + |x|)`, which no finite window
//! could infer on its own.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// A sampled exponent: finite, strictly positive values plus a limit value.
#[derive(Debug, Clone, PartialEq)]
pub struct Exponent {
    values: GridFunction,
    p_inf: f64,
    p_minus: f64,
    p_plus: f64,
}

impl Exponent {
    /// Wraps sampled values; requires `min > 0` and `p_inf` within the
    /// sampled range (up to a tiny relative slack for limits approached
    /// from one side).
    pub fn new(values: GridFunction, p_inf: f64) -> Result<Self> {
        let p_minus = values.min();
        let p_plus = values.max();
        if p_minus <= 0.0 {
            return Err(Error::invalid(format!(
                "exponent values must be positive, min is {p_minus}"
            )));
        }
        if !p_inf.is_finite() {
            return Err(Error::NonFinite("exponent limit value".into()));
        }
        let slack = 1e-9 * p_plus;
        if p_inf < p_minus - slack || p_inf > p_plus + slack {
            return Err(Error::invalid(format!(
                "exponent limit {p_inf} outside sampled range [{p_minus}, {p_plus}]"
            )));
        }
        Ok(Exponent { values, p_inf: p_inf.clamp(p_minus, p_plus), p_minus, p_plus })
    }

    pub fn constant(grid: Grid, p: f64) -> Result<Self> {
        Self::new(GridFunction::constant(grid, p)?, p)
    }

    /// `base + amplitude * exp(-(|x|/sigma)^2)`; the limit value is `base`.
    pub fn radial_bump(grid: Grid, base: f64, amplitude: f64, sigma: f64) -> Result<Self> {
        if sigma <= 0.0 || !sigma.is_finite() {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        let values = GridFunction::from_fn(grid, |x| {
            let r2 = x.iter().map(|c| c * c).sum::<f64>();
            base + amplitude * (-r2 / (sigma * sigma)).exp()
        })?;
        // On a bounded box the limit is approached but never attained; clamp
        // the stored limit into the sampled range.
        let p_inf = base.clamp(values.min(), values.max());
        Self::new(values, p_inf)
    }

    /// Piecewise-constant in the first coordinate: `left` for `x0 < 0`,
    /// `right` otherwise. The limit value is taken from the right half.
    pub fn two_level(grid: Grid, left: f64, right: f64) -> Result<Self> {
        let values =
            GridFunction::from_fn(grid, |x| if x[0] < 0.0 { left } else { right })?;
        Self::new(values, right)
    }

    pub fn from_fn(grid: Grid, p_inf: f64, f: impl Fn(&[f64; 3]) -> f64) -> Result<Self> {
        Self::new(GridFunction::from_fn(grid, f)?, p_inf)
    }

    pub fn grid(&self) -> &Grid {
        self.values.grid()
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn p_inf(&self) -> f64 {
        self.p_inf
    }

    /// Pointwise conjugate `p'(x) = p(x)/(p(x)-1)`; requires `p_minus > 1`.
    pub fn conjugate(&self) -> Result<Exponent> {
        if self.p_minus <= 1.0 {
            return Err(Error::invalid(format!(
                "conjugate needs min exponent > 1, got {}",
                self.p_minus
            )));
        }
        let values = self.values.map(|p| p / (p - 1.0))?;
        Exponent::new(values, self.p_inf / (self.p_inf - 1.0))
    }

    /// `delta * (p(x)/p0)'`, the scaled conjugate that appears in the
    /// boundedness hypotheses. Requires `0 < p0 < p_minus` and
    /// `0 < delta <= 1`.
    pub fn scaled_conjugate(&self, p0: f64, delta: f64) -> Result<Exponent> {
        if !(p0 > 0.0 && p0 < self.p_minus) {
            return Err(Error::invalid(format!(
                "scaled conjugate needs 0 < p0 < p_minus = {}, got p0 = {p0}",
                self.p_minus
            )));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::invalid(format!("delta must be in (0, 1], got {delta}")));
        }
        // (p/p0)' = (p/p0) / (p/p0 - 1) = p / (p - p0).
        let values = self.values.map(|p| delta * p / (p - p0))?;
        Exponent::new(values, delta * self.p_inf / (self.p_inf - p0))
    }

    /// The off-diagonal companion `q(.)` with `1/p - 1/q = 1/p0 - 1/q0`.
    /// Requires `p0 <= q0` and `1/p(x) - 1/p0 + 1/q0 > 0` everywhere.
    pub fn offdiagonal(&self, p0: f64, q0: f64) -> Result<Exponent> {
        if !(p0 > 0.0 && q0 > 0.0 && p0 <= q0) {
            return Err(Error::invalid(format!(
                "off-diagonal shift needs 0 < p0 <= q0, got p0 = {p0}, q0 = {q0}"
            )));
        }
        let shift = 1.0 / p0 - 1.0 / q0;
        let min_inv = 1.0 / self.p_plus - shift;
        if min_inv <= 0.0 {
            return Err(Error::invalid(format!(
                "off-diagonal exponent degenerates: 1/p_plus - (1/p0 - 1/q0) = {min_inv} <= 0"
            )));
        }
        let values = self.values.map(|p| 1.0 / (1.0 / p - shift))?;
        Exponent::new(values, 1.0 / (1.0 / self.p_inf - shift))
    }
}

/// Pass thresholds for the two log-Holder diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogHolderThresholds {
    pub c1_max: f64,
    pub c2_max: f64,
}

impl Default for LogHolderThresholds {
    fn default() -> Self {
        // Generous enough for smooth exponents of moderate oscillation;
        // jump discontinuities exceed c1_max from N ~ 1024 on.
        LogHolderThresholds { c1_max: 2.0, c2_max: 2.0 }
    }
}

/// Measured log-Holder moduli and their threshold verdicts.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LogHolderReport {
    /// `max |p(x) - p(y)| log(e + 1/|x-y|)` over sampled pairs, `|x-y| <= L/4`.
    pub c1_hat: f64,
    /// `max |p(x) - p_inf| log(e + |x|)` over the grid.
    pub c2_hat: f64,
    pub passes_local: bool,
    pub passes_decay: bool,
}

impl LogHolderReport {
    pub fn passes(&self) -> bool {
        self.passes_local && self.passes_decay
    }
}

/// Estimates the local and decay log-Holder moduli of `p` over a
/// deterministic sample of point pairs (dyadic axis and diagonal offsets).
pub fn check_log_holder(p: &Exponent, thresholds: &LogHolderThresholds) -> LogHolderReport {
    let grid = *p.grid();
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let quarter = grid.extent() / 4.0;
    let vals = p.values().values();
    let shape = grid.shape();

    let mut c1_hat = 0.0f64;
    for offset in pair_offsets(grid.dim(), n) {
        let dist = h * ((offset[0] * offset[0] + offset[1] * offset[1] + offset[2] * offset[2]) as f64).sqrt();
        if dist > quarter {
            continue;
        }
        let factor = (std::f64::consts::E + 1.0 / dist).ln();
        // Pairs (i, i + offset) that stay inside the box.
        for i0 in range_for(shape[0], offset[0]) {
            for i1 in range_for(shape[1], offset[1]) {
                for i2 in range_for(shape[2], offset[2]) {
                    let a = grid.flat_index([i0, i1, i2]);
                    let b = grid.flat_index([
                        (i0 as i64 + offset[0]) as usize,
                        (i1 as i64 + offset[1]) as usize,
                        (i2 as i64 + offset[2]) as usize,
                    ]);
                    let gap = (vals[a] - vals[b]).abs() * factor;
                    if gap > c1_hat {
                        c1_hat = gap;
                    }
                }
            }
        }
    }

    let mut c2_hat = 0.0f64;
    for (i, &v) in vals.iter().enumerate() {
        let x = grid.point(i);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let gap = (v - p.p_inf()).abs() * (std::f64::consts::E + r).ln();
        if gap > c2_hat {
            c2_hat = gap;
        }
    }

    LogHolderReport {
        c1_hat,
        c2_hat,
        passes_local: c1_hat <= thresholds.c1_max,
        passes_decay: c2_hat <= thresholds.c2_max,
    }
}

/// Dyadic sampling offsets: per-axis steps `m e_a` and mixed-sign diagonal
/// steps `m (e_0 +- e_1 [+- e_2])`, `m = 1, 2, 4, ..., N/4`.
fn pair_offsets(dim: usize, n: usize) -> Vec<[i64; 3]> {
    let mut offsets = Vec::new();
    let mut m = 1i64;
    while m <= (n / 4) as i64 {
        for a in 0..dim {
            let mut o = [0i64; 3];
            o[a] = m;
            offsets.push(o);
        }
        if dim >= 2 {
            for signs in 0..(1 << (dim - 1)) {
                let mut o = [0i64; 3];
                o[0] = m;
                for a in 1..dim {
                    o[a] = if (signs >> (a - 1)) & 1 == 1 { -m } else { m };
                }
                offsets.push(o);
            }
        }
        m *= 2;
    }
    offsets
}

fn range_for(len: usize, offset: i64) -> std::ops::Range<usize> {
    if offset >= 0 {
        0..len.saturating_sub(offset as usize)
    } else {
        (-offset) as usize..len
    }
}

/// Outcome of the boundedness proxy: a pass is evidence, never proof, and a
/// failed diagnostic only means the proxy is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum BProxy {
    Pass,
    Unknown,
}

/// Proxy verdict together with the diagnostics behind it.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BProxyReport {
    pub verdict: BProxy,
    pub log_holder: LogHolderReport,
    pub p_minus: f64,
}

/// PASS iff both log-Holder diagnostics pass and `p_minus > 1`; everything
/// else is UNKNOWN (the sufficient condition simply fails to apply).
pub fn in_b_proxy(p: &Exponent, thresholds: &LogHolderThresholds) -> BProxyReport {
    let log_holder = check_log_holder(p, thresholds);
    let verdict = if log_holder.passes() && p.p_minus() > 1.0 {
        BProxy::Pass
    } else {
        BProxy::Unknown
    };
    BProxyReport { verdict, log_holder, p_minus: p.p_minus() }
}
