//! Hardy-Littlewood maximal operators over centered cubes, powered variants,
//! spherical means by surface quadrature, and empirical operator norms.
//!
//! Cube averages run on summed-area tables, so a full maximal function costs
//! O(N^dim) per radius. The radius set is dyadic with smallest radius `h/2`
//! (the single-cell cube), which makes `Mf >= |f|` hold exactly.

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::{Grid, GridFunction, GridMode};
use crate::norms::luxemburg_norm;

/// Exclusive-prefix sums over the grid; box sums in O(2^dim).
pub(crate) struct SummedAreaTable {
    padded: [usize; 3],
    table: Vec<f64>,
}

impl SummedAreaTable {
    pub fn new(f: &GridFunction) -> Self {
        let shape = f.grid().shape();
        let padded = [shape[0] + 1, shape[1] + 1, shape[2] + 1];
        let strides = [padded[1] * padded[2], padded[2], 1];
        let mut table = vec![0.0; padded[0] * padded[1] * padded[2]];

        // Copy values into the interior, then prefix-sum along each axis.
        for i0 in 0..shape[0] {
            for i1 in 0..shape[1] {
                for i2 in 0..shape[2] {
                    let src = (i0 * shape[1] + i1) * shape[2] + i2;
                    let dst = (i0 + 1) * strides[0] + (i1 + 1) * strides[1] + (i2 + 1);
                    table[dst] = f.values()[src];
                }
            }
        }
        for axis in 0..3 {
            if padded[axis] == 2 {
                continue;
            }
            for i0 in 0..padded[0] {
                for i1 in 0..padded[1] {
                    for i2 in 0..padded[2] {
                        let idx = [i0, i1, i2];
                        if idx[axis] == 0 {
                            continue;
                        }
                        let mut prev = idx;
                        prev[axis] -= 1;
                        let flat = idx[0] * strides[0] + idx[1] * strides[1] + idx[2];
                        let prev_flat = prev[0] * strides[0] + prev[1] * strides[1] + prev[2];
                        table[flat] += table[prev_flat];
                    }
                }
            }
        }
        SummedAreaTable { padded, table }
    }

    /// Sum over the half-open index box `[lo, hi)` (padded axes use 0..1).
    pub fn box_sum(&self, lo: [usize; 3], hi: [usize; 3]) -> f64 {
        let strides = [self.padded[1] * self.padded[2], self.padded[2], 1];
        let mut acc = 0.0;
        for corner in 0..8usize {
            let mut idx = [0usize; 3];
            let mut sign = 1.0;
            for a in 0..3 {
                if (corner >> a) & 1 == 1 {
                    idx[a] = hi[a];
                } else {
                    idx[a] = lo[a];
                    sign = -sign;
                }
            }
            acc += sign * self.table[idx[0] * strides[0] + idx[1] * strides[1] + idx[2]];
        }
        acc
    }
}

/// Radius set for the centered-cube maximal operator.
///
/// Radii live in `{h/2} U {h 2^k : k >= 0, h 2^k <= L/2}`; the single-cell
/// radius `h/2` must be present so that `Mf >= |f|` is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalConfig {
    radii: Vec<f64>,
}

impl MaximalConfig {
    /// The full dyadic radius ladder for `grid`.
    pub fn default_for(grid: &Grid) -> Self {
        let h = grid.spacing();
        let mut radii = vec![h / 2.0];
        let mut r = h;
        while r <= grid.extent() / 2.0 * (1.0 + 1e-12) {
            radii.push(r);
            r *= 2.0;
        }
        MaximalConfig { radii }
    }

    /// Validates a custom radius set against `grid`.
    pub fn new(grid: &Grid, mut radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::invalid("radius set must be nonempty"));
        }
        let h = grid.spacing();
        radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
        if (radii[0] - h / 2.0).abs() > 1e-9 * h {
            return Err(Error::invalid(format!(
                "smallest radius must be h/2 = {}, got {}",
                h / 2.0,
                radii[0]
            )));
        }
        for &r in &radii[1..] {
            let ratio = r / h;
            let rounded = ratio.round();
            if (ratio - rounded).abs() > 1e-9 || rounded < 1.0 || !(rounded as u64).is_power_of_two()
            {
                return Err(Error::invalid(format!(
                    "radius {r} is not h * 2^k for spacing h = {h}"
                )));
            }
            if r > grid.extent() / 2.0 * (1.0 + 1e-12) {
                return Err(Error::invalid(format!(
                    "radius {r} exceeds half extent {}",
                    grid.extent() / 2.0
                )));
            }
        }
        Ok(MaximalConfig { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// Centered-cube Hardy-Littlewood maximal function: the pointwise max over
/// the configured radii of the average of `|f|` over the cube clipped to the
/// box. Averages use only the points present, so boundary cubes shrink.
pub fn hl_maximal(f: &GridFunction, cfg: &MaximalConfig) -> Result<GridFunction> {
    let grid = *f.grid();
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let absf = f.abs();
    let sat = SummedAreaTable::new(&absf);
    let shape = grid.shape();

    // Window half-widths in cells; 0 means the single-cell cube.
    let windows: Vec<usize> =
        cfg.radii.iter().map(|r| (r / h + 1e-9).floor() as usize).collect();

    let mut out = vec![0.0f64; grid.len()];
    let mut flat = 0usize;
    for i0 in 0..shape[0] {
        for i1 in 0..shape[1] {
            for i2 in 0..shape[2] {
                let idx = [i0, i1, i2];
                let mut best = 0.0f64;
                for &w in &windows {
                    if w == 0 {
                        // Single cell: exact, no table roundoff.
                        let v = absf.values()[flat];
                        if v > best {
                            best = v;
                        }
                        continue;
                    }
                    let mut lo = [0usize; 3];
                    let mut hi = [1usize; 3];
                    let mut count = 1.0f64;
                    for a in 0..grid.dim() {
                        lo[a] = idx[a].saturating_sub(w);
                        hi[a] = (idx[a] + w + 1).min(n);
                        count *= (hi[a] - lo[a]) as f64;
                    }
                    let avg = sat.box_sum(lo, hi) / count;
                    if avg > best {
                        best = avg;
                    }
                }
                out[flat] = best;
                flat += 1;
            }
        }
    }
    GridFunction::new(grid, out)
}

/// Powered maximal operator `(M(f^(1/delta)))^delta` for `0 < delta <= 1`;
/// requires `f >= 0`.
pub fn powered_maximal(f: &GridFunction, delta: f64, cfg: &MaximalConfig) -> Result<GridFunction> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must be in (0, 1], got {delta}")));
    }
    if f.min() < 0.0 {
        return Err(Error::invalid("powered maximal needs a nonnegative input"));
    }
    let inner = f.map(|v| v.powf(1.0 / delta))?;
    hl_maximal(&inner, cfg)?.map(|v| v.powf(delta))
}

/// Number of quadrature nodes for a sphere of radius `t` (per the resolution
/// rule: enough nodes that neighboring samples are within a cell or so).
fn node_count(dim: usize, t: f64, h: f64) -> usize {
    let c = (t / h).ceil();
    match dim {
        2 => 64usize.max((8.0 * c) as usize),
        3 => {
            let k = 256usize.max((16.0 * c * c) as usize);
            k + (k & 1)
        }
        _ => unreachable!(),
    }
}

/// Unit vectors of the quadrature rule; antipodally symmetric in both
/// dimensions so odd integrands cancel exactly.
pub(crate) fn sphere_nodes(dim: usize, count: usize) -> Vec<[f64; 3]> {
    match dim {
        2 => (0..count)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / count as f64;
                [th.cos(), th.sin(), 0.0]
            })
            .collect(),
        3 => {
            // Fibonacci spiral on the upper hemisphere plus antipodes.
            let half = count / 2;
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            let mut nodes = Vec::with_capacity(count);
            for i in 0..half {
                let z = (i as f64 + 0.5) / half as f64;
                let rho = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                let node = [rho * phi.cos(), rho * phi.sin(), z];
                nodes.push(node);
                nodes.push([-node[0], -node[1], -node[2]]);
            }
            nodes
        }
        _ => unreachable!(),
    }
}

/// Spherical mean `(1/K) sum_j f(x + t w_j)` with multilinear interpolation;
/// out-of-box samples read 0 in `Box` mode and wrap in `Torus` mode.
/// Requires `dim` in {2, 3} and `0 < t < L/4`.
pub fn spherical_mean(f: &GridFunction, t: f64) -> Result<GridFunction> {
    let grid = *f.grid();
    if !(2..=3).contains(&grid.dim()) {
        return Err(Error::invalid(format!(
            "spherical mean needs dim 2 or 3, got {}",
            grid.dim()
        )));
    }
    if !(t > 0.0 && t < grid.extent() / 4.0) {
        return Err(Error::invalid(format!(
            "sphere radius must be in (0, L/4) = (0, {}), got {t}",
            grid.extent() / 4.0
        )));
    }
    let h = grid.spacing();
    let dim = grid.dim();
    let count = node_count(dim, t, h);
    let nodes = sphere_nodes(dim, count);
    let node_weight = 1.0 / count as f64;

    let mut out = vec![0.0f64; grid.len()];
    for node in &nodes {
        // The fractional cell position of x + t w is the same for every x.
        let mut base = [0i64; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..dim {
            let s = t * node[a] / h;
            let b = s.floor();
            base[a] = b as i64;
            frac[a] = s - b;
        }
        for corner in 0..(1usize << dim) {
            let mut offset = [0i64; 3];
            let mut w = node_weight;
            for a in 0..dim {
                let bit = (corner >> a) & 1;
                offset[a] = base[a] + bit as i64;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if w != 0.0 {
                accumulate_shifted(&mut out, f, offset, w);
            }
        }
    }
    GridFunction::new(grid, out)
}

/// `out[i] += w * f[i + offset]` with mode-appropriate boundary reads.
fn accumulate_shifted(out: &mut [f64], f: &GridFunction, offset: [i64; 3], w: f64) {
    let grid = f.grid();
    let n = grid.points_per_axis() as i64;
    let shape = grid.shape();
    let strides = grid.strides();
    let vals = f.values();
    match grid.mode() {
        GridMode::Torus => {
            // Per-axis wrapped index translation tables.
            let table: Vec<Vec<usize>> = (0..3)
                .map(|a| {
                    (0..shape[a] as i64)
                        .map(|i| {
                            if shape[a] == 1 {
                                0
                            } else {
                                (i + offset[a]).rem_euclid(n) as usize
                            }
                        })
                        .collect()
                })
                .collect();
            let mut flat = 0usize;
            for i0 in 0..shape[0] {
                for i1 in 0..shape[1] {
                    let row = table[0][i0] * strides[0] + table[1][i1] * strides[1];
                    for i2 in 0..shape[2] {
                        out[flat] += w * vals[row + table[2][i2]];
                        flat += 1;
                    }
                }
            }
        }
        GridMode::Box => {
            let range = |len: usize, o: i64| -> (usize, usize) {
                if len == 1 {
                    return (0, 1);
                }
                ((-o).max(0) as usize, ((n - o).min(n).max(0) as usize).min(len))
            };
            let (a0, b0) = range(shape[0], offset[0]);
            let (a1, b1) = range(shape[1], offset[1]);
            let (a2, b2) = range(shape[2], offset[2]);
            for i0 in a0..b0 {
                let src0 = (i0 as i64 + offset[0]) as usize * strides[0];
                let dst0 = i0 * strides[0];
                for i1 in a1..b1 {
                    let src1 = src0 + (i1 as i64 + offset[1]) as usize * strides[1];
                    let dst1 = dst0 + i1 * strides[1];
                    for i2 in a2..b2 {
                        out[dst1 + i2] += w * vals[src1 + (i2 as i64 + offset[2]) as usize];
                    }
                }
            }
        }
    }
}

/// Geometric radius ladder with ratio 2^(1/8) spanning `(2h, L/4)`.
pub fn default_t_grid(grid: &Grid) -> Vec<f64> {
    let mut t = 2.0 * grid.spacing();
    let top = grid.extent() / 4.0;
    let ratio = 2.0f64.powf(0.125);
    let mut ts = Vec::new();
    while t < top * (1.0 - 1e-12) {
        ts.push(t);
        t *= ratio;
    }
    ts
}

/// Fractional spherical maximal function: pointwise max over `t_grid` of
/// `t^alpha |mu_t * f|`.
pub fn frac_spherical_maximal(
    f: &GridFunction,
    alpha: f64,
    t_grid: &[f64],
) -> Result<GridFunction> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    if t_grid.is_empty() {
        return Err(Error::invalid("t grid must be nonempty"));
    }
    let mut out = GridFunction::zeros(*f.grid());
    for &t in t_grid {
        let mean = spherical_mean(f, t)?;
        let scale = t.powf(alpha);
        for (o, &m) in out.values_mut().iter_mut().zip(mean.values()) {
            *o = o.max(scale * m.abs());
        }
    }
    Ok(out)
}

/// Empirical operator norm on a test family.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NormEstimate {
    /// Largest observed ratio `||op f|| / ||f||`; a lower bound for the norm.
    pub value: f64,
    /// Family members skipped because their norm was zero.
    pub skipped: usize,
}

/// Measures `max ||op(f)||_p / ||f||_p` over `family` in the variable
/// Luxemburg norm; zero-norm members are skipped and counted.
pub fn operator_norm_estimate(
    op: impl Fn(&GridFunction) -> Result<GridFunction>,
    p: &Exponent,
    family: &[GridFunction],
    tol: f64,
) -> Result<NormEstimate> {
    let mut best = 0.0f64;
    let mut skipped = 0usize;
    for f in family {
        let denom = luxemburg_norm(f, p, tol)?.value;
        if denom == 0.0 {
            skipped += 1;
            continue;
        }
        let num = luxemburg_norm(&op(f)?, p, tol)?.value;
        best = best.max(num / denom);
    }
    if best == 0.0 && skipped == family.len() && !family.is_empty() {
        return Err(Error::invalid("operator norm family has only zero members"));
    }
    Ok(NormEstimate { value: best, skipped })
}

/// Nonnegative stress-test family for norm estimation: spikes, indicators,
/// bumps, and a constant. Deterministic in `seed`.
pub fn norm_test_family(grid: Grid, count: usize, seed: u64) -> Result<Vec<GridFunction>> {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let l = grid.extent();
    let mut family = vec![GridFunction::constant(grid, 1.0)?];
    for k in 0..count {
        match k % 3 {
            0 => {
                // Single-cell spike: the stress case for maximal averages.
                let mut f = GridFunction::zeros(grid);
                let idx = rng.random_range(0..grid.len());
                f.values_mut()[idx] = rng.random_range(0.5..2.0);
                family.push(f);
            }
            1 => {
                let mut c = [0.0f64; 3];
                for a in c.iter_mut().take(grid.dim()) {
                    *a = rng.random_range(-l / 4.0..l / 4.0);
                }
                let half = rng.random_range(l / 32.0..l / 8.0);
                let height = rng.random_range(0.5..2.0);
                family.push(GridFunction::from_fn(grid, |x| {
                    let inside =
                        (0..grid.dim()).all(|a| (x[a] - c[a]).abs() <= half);
                    if inside {
                        height
                    } else {
                        0.0
                    }
                })?);
            }
            _ => {
                let mut c = [0.0f64; 3];
                for a in c.iter_mut().take(grid.dim()) {
                    *a = rng.random_range(-l / 4.0..l / 4.0);
                }
                let s = rng.random_range(l / 32.0..l / 8.0);
                let height = rng.random_range(0.5..2.0);
                family.push(GridFunction::from_fn(grid, |x| {
                    let r2: f64 =
                        (0..grid.dim()).map(|a| (x[a] - c[a]) * (x[a] - c[a])).sum();
                    height * (-r2 / (2.0 * s * s)).exp()
                })?);
            }
        }
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(dim: usize, n: usize, l: f64, mode: GridMode) -> Grid {
        Grid::new(dim, l, n, mode).unwrap()
    }

    fn random_field(g: Grid, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridFunction::new(g, (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
            .unwrap()
    }

    #[test]
    fn config_validates_radius_set() {
        let g = grid(1, 64, 16.0, GridMode::Box);
        let h = g.spacing();
        assert!(MaximalConfig::new(&g, vec![]).is_err());
        assert!(MaximalConfig::new(&g, vec![h]).is_err(), "must contain h/2");
        assert!(MaximalConfig::new(&g, vec![h / 2.0, 3.0 * h]).is_err(), "3h is not dyadic");
        assert!(MaximalConfig::new(&g, vec![h / 2.0, 64.0 * h]).is_err(), "beyond L/2");
        assert!(MaximalConfig::new(&g, vec![h / 2.0, h, 4.0 * h]).is_ok());
        let full = MaximalConfig::default_for(&g);
        assert_eq!(full.radii().len(), 2 + 5);
        assert_relative_eq!(*full.radii().last().unwrap(), 8.0);
    }

    #[test]
    fn maximal_of_constant_is_constant() {
        let g = grid(2, 32, 8.0, GridMode::Box);
        let cfg = MaximalConfig::default_for(&g);
        let m = hl_maximal(&GridFunction::constant(g, 1.0).unwrap(), &cfg).unwrap();
        assert!(m.values().iter().all(|&v| v == 1.0));
        let m = hl_maximal(&GridFunction::constant(g, 0.7).unwrap(), &cfg).unwrap();
        for &v in m.values() {
            assert_relative_eq!(v, 0.7, max_relative = 1e-12);
        }
    }

    #[test]
    fn maximal_dominates_the_function_exactly() {
        let g = grid(1, 256, 16.0, GridMode::Box);
        let cfg = MaximalConfig::default_for(&g);
        let f = random_field(g, 5);
        let m = hl_maximal(&f, &cfg).unwrap();
        for (mv, fv) in m.values().iter().zip(f.values()) {
            assert!(mv >= &fv.abs());
        }
    }

    #[test]
    fn maximal_matches_brute_force_on_small_grid() {
        let g = grid(2, 16, 4.0, GridMode::Box);
        let cfg = MaximalConfig::default_for(&g);
        let f = random_field(g, 9);
        let m = hl_maximal(&f, &cfg).unwrap();
        let n = g.points_per_axis();
        let h = g.spacing();
        for i0 in 0..n {
            for i1 in 0..n {
                let mut best = 0.0f64;
                for &r in cfg.radii() {
                    let w = (r / h + 1e-9).floor() as usize;
                    let (l0, h0) = (i0.saturating_sub(w), (i0 + w + 1).min(n));
                    let (l1, h1) = (i1.saturating_sub(w), (i1 + w + 1).min(n));
                    let mut acc = 0.0;
                    for j0 in l0..h0 {
                        for j1 in l1..h1 {
                            acc += f.values()[j0 * n + j1].abs();
                        }
                    }
                    best = best.max(acc / ((h0 - l0) * (h1 - l1)) as f64);
                }
                let got = m.values()[i0 * n + i1];
                assert_relative_eq!(got, best, max_relative = 1e-12, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn maximal_is_sublinear_and_homogeneous() {
        let g = grid(1, 128, 8.0, GridMode::Box);
        let cfg = MaximalConfig::default_for(&g);
        let f = random_field(g, 21);
        let gg = random_field(g, 22);
        let mf = hl_maximal(&f, &cfg).unwrap();
        let mg = hl_maximal(&gg, &cfg).unwrap();
        let msum = hl_maximal(&f.zip_map(&gg, |a, b| a + b).unwrap(), &cfg).unwrap();
        for ((s, a), b) in msum.values().iter().zip(mf.values()).zip(mg.values()) {
            assert!(*s <= a + b + 1e-12);
        }
        // Dyadic scaling commutes with averages exactly in floating point.
        let m2 = hl_maximal(&f.scale(2.0).unwrap(), &cfg).unwrap();
        for (a, b) in m2.values().iter().zip(mf.values()) {
            assert_eq!(*a, 2.0 * b);
        }
        let mc = hl_maximal(&f.scale(0.7).unwrap(), &cfg).unwrap();
        for (a, b) in mc.values().iter().zip(mf.values()) {
            assert_relative_eq!(*a, 0.7 * b, max_relative = 1e-12, epsilon = 1e-300);
        }
    }

    // Independent oracle: the sup over the same dyadic radius ladder of
    // continuum clipped-interval averages for the indicator of [0, 1].
    fn interval_maximal_oracle(x: f64, radii: &[f64], l: f64) -> f64 {
        let mut best = 0.0f64;
        for &r in radii {
            let lo = (x - r).max(-l / 2.0);
            let hi = (x + r).min(l / 2.0);
            let overlap = (hi.min(1.0) - lo.max(0.0)).max(0.0);
            best = best.max(overlap / (hi - lo));
        }
        best
    }

    #[test]
    fn maximal_of_interval_indicator_matches_closed_form() {
        let g = grid(1, 512, 16.0, GridMode::Box);
        let h = g.spacing();
        let cfg = MaximalConfig::default_for(&g);
        let f = GridFunction::from_fn(g, |x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 })
            .unwrap();
        let m = hl_maximal(&f, &cfg).unwrap();
        // On the interval the maximal function is exactly 1.
        let inside = g.len() / 2 + (0.5 / h) as usize / 2;
        assert_eq!(m.values()[inside], 1.0);
        // At a few probe points, match the continuum sup within a few cells'
        // worth of discretization error.
        for probe in [1.5, 2.0, 3.0, -1.0] {
            let idx = ((probe + 8.0) / h - 0.5).round() as usize;
            let oracle = interval_maximal_oracle(g.coord(idx), cfg.radii(), 16.0);
            assert!(
                (m.values()[idx] - oracle).abs() <= 5.0 * h,
                "at {probe}: got {}, oracle {oracle}",
                m.values()[idx]
            );
        }
    }

    #[test]
    fn powered_maximal_validates_and_interpolates() {
        let g = grid(1, 128, 8.0, GridMode::Box);
        let cfg = MaximalConfig::default_for(&g);
        let f = random_field(g, 31).abs();
        assert!(powered_maximal(&f, 0.0, &cfg).is_err());
        assert!(powered_maximal(&f, 1.5, &cfg).is_err());
        assert!(powered_maximal(&random_field(g, 32), 0.5, &cfg).is_err(), "negative input");
        // delta = 1 is the plain maximal operator.
        let m1 = powered_maximal(&f, 1.0, &cfg).unwrap();
        let m = hl_maximal(&f, &cfg).unwrap();
        for (a, b) in m1.values().iter().zip(m.values()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        // Powered maximal still dominates the function.
        let mh = powered_maximal(&f, 0.5, &cfg).unwrap();
        for (a, b) in mh.values().iter().zip(f.values()) {
            assert!(*a >= *b - 1e-12);
        }
    }

    #[test]
    fn spherical_mean_preserves_constants() {
        for (dim, n) in [(2usize, 32usize), (3, 16)] {
            let g = grid(dim, n, 8.0, GridMode::Torus);
            let f = GridFunction::constant(g, 1.0).unwrap();
            let m = spherical_mean(&f, 1.0).unwrap();
            for &v in m.values() {
                assert_relative_eq!(v, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn spherical_mean_reproduces_linear_functions_in_the_interior() {
        for (dim, n) in [(2usize, 32usize), (3, 16)] {
            let g = grid(dim, n, 8.0, GridMode::Box);
            let f = GridFunction::from_fn(g, |x| x[0]).unwrap();
            let m = spherical_mean(&f, 1.0).unwrap();
            for i in 0..g.len() {
                let x = g.point(i);
                if (0..dim).any(|a| x[a].abs() > 2.0) {
                    continue;
                }
                assert!(
                    (m.values()[i] - x[0]).abs() < 1e-10,
                    "at {x:?}: {} vs {}",
                    m.values()[i],
                    x[0]
                );
            }
        }
    }

    #[test]
    fn spherical_mean_of_radius_squared_at_center() {
        for (dim, n) in [(2usize, 64usize), (3, 32)] {
            let g = grid(dim, n, 8.0, GridMode::Box);
            let h = g.spacing();
            let f = GridFunction::from_fn(g, |x| {
                x.iter().take(dim).map(|c| c * c).sum::<f64>()
            })
            .unwrap();
            let t = 1.0;
            let m = spherical_mean(&f, t).unwrap();
            // Nearest point to the origin sits at (h/2, ..., h/2).
            let idx = g.flat_index([n / 2, n / 2, if dim == 3 { n / 2 } else { 0 }]);
            let expected = t * t + dim as f64 * h * h / 4.0;
            assert!(
                (m.values()[idx] - expected).abs() <= dim as f64 * h * h,
                "dim {dim}: {} vs {expected}",
                m.values()[idx]
            );
        }
    }

    #[test]
    fn spherical_mean_validates_inputs() {
        let g1 = grid(1, 32, 8.0, GridMode::Box);
        assert!(spherical_mean(&GridFunction::zeros(g1), 1.0).is_err());
        let g2 = grid(2, 32, 8.0, GridMode::Box);
        assert!(spherical_mean(&GridFunction::zeros(g2), 0.0).is_err());
        assert!(spherical_mean(&GridFunction::zeros(g2), 2.5).is_err(), "t >= L/4");
    }

    #[test]
    fn frac_spherical_maximal_with_zero_alpha_caps_constants() {
        let g = grid(2, 32, 8.0, GridMode::Torus);
        let f = GridFunction::constant(g, 1.0).unwrap();
        let ts = default_t_grid(&g);
        assert!(!ts.is_empty());
        assert!(ts.iter().all(|&t| t > 0.0 && t < 2.0));
        let m = frac_spherical_maximal(&f, 0.0, &ts).unwrap();
        for &v in m.values() {
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn operator_norm_estimate_identity_and_scaling() {
        let g = grid(1, 128, 8.0, GridMode::Box);
        let p = Exponent::constant(g, 2.0).unwrap();
        let family = norm_test_family(g, 6, 77).unwrap();
        let id = operator_norm_estimate(|f| Ok(f.clone()), &p, &family, 1e-10).unwrap();
        assert_relative_eq!(id.value, 1.0, max_relative = 1e-9);
        let twice = operator_norm_estimate(|f| f.scale(2.0), &p, &family, 1e-10).unwrap();
        assert_relative_eq!(twice.value, 2.0, max_relative = 1e-9);
        assert_eq!(id.skipped, 0);
    }

    #[test]
    fn operator_norm_estimate_skips_zero_members() {
        let g = grid(1, 64, 8.0, GridMode::Box);
        let p = Exponent::constant(g, 2.0).unwrap();
        let family = vec![GridFunction::zeros(g), GridFunction::constant(g, 1.0).unwrap()];
        let est = operator_norm_estimate(|f| Ok(f.clone()), &p, &family, 1e-10).unwrap();
        assert_eq!(est.skipped, 1);
        let zeros = vec![GridFunction::zeros(g)];
        assert!(operator_norm_estimate(|f| Ok(f.clone()), &p, &zeros, 1e-10).is_err());
    }
}
