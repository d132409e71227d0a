//! Experiment execution: builds the scene described by a config, runs every
//! check as an independent row (optionally in parallel), and writes
//! `report.csv`, `summary.json`, and `fields.bin` into the output directory.
//!
//! Every run is a pure function of the effective config: all randomness is
//! derived from `seed` through fixed offsets, rows are collected in order,
//! and floats are printed with a fixed `{:.17e}` format, so identical
//! configs produce byte-identical outputs.

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write as _;
use std::path::Path;
use varlp::exponent::Exponent;
use varlp::extrapolation::{
    self, application_range, check_base_shift_range, check_diagonal_range,
    check_log_smooth_range, check_offdiagonal_range, empirical_variable_conclusion,
    empirical_weighted_hypothesis, PairFamily,
};
use varlp::grid::{Grid, GridFunction};
use varlp::maximal::{
    default_t_grid, frac_spherical_maximal, hl_maximal, norm_test_family,
    operator_norm_estimate, powered_maximal, MaximalConfig,
};
use varlp::operators::{
    bochner_riesz_maximal, default_r_grid, rough_singular_apply, smooth_step, MultiplierSpec,
    RoughKernel,
};
use varlp::report::{CheckReport, Verdict};
use varlp::rubio::{a1_certificate, certificate_input_family, iterate, RubioParams};
use varlp::weights::{
    a1_constant, ap_constant, generate_weight, jn_equivalence_check, CubeFamily, Weight,
};

use crate::config::{CheckSpec, ExperimentConfig, FieldSpec, OperatorSpec, TargetSpec};

/// Seed offsets so distinct random families never alias.
const SEED_INPUTS: u64 = 0;
const SEED_RUBIO_H: u64 = 1;
const SEED_NORM_PROBES: u64 = 2;

/// Dyadic depth cap for cube families used by the certificate rows.
const CUBE_DEPTH_CAP: u32 = 4;

/// One line of report.csv / one entry of summary.json.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub row: usize,
    pub id: String,
    pub verdict: String,
    pub witness: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub error: Option<String>,
}

impl Row {
    fn from_report(row: usize, report: CheckReport) -> Self {
        Row {
            row,
            id: report.id,
            verdict: report.verdict.to_string(),
            witness: report.witness,
            notes: report.notes,
            error: None,
        }
    }

    fn from_error(row: usize, id: &str, err: String) -> Self {
        Row {
            row,
            id: id.to_string(),
            verdict: "ERROR".to_string(),
            witness: Vec::new(),
            notes: Vec::new(),
            error: Some(err),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub config_hash: String,
    pub seed: u64,
    pub met: usize,
    pub violated: usize,
    pub unknown: usize,
    pub errors: usize,
    pub rows: Vec<Row>,
}

pub struct Outcome {
    pub rows: usize,
    pub met: usize,
    pub violated: usize,
    pub unknown: usize,
    pub errors: usize,
}

/// An operator compiled against the concrete grid, ready to apply.
enum BuiltOp {
    HardyLittlewood(MaximalConfig),
    Powered(f64, MaximalConfig),
    Rough(RoughKernel),
    Multiplier(MultiplierSpec),
    BochnerMax { beta: f64, r_grid: Vec<f64> },
    Spherical { alpha: f64, t_grid: Vec<f64> },
}

impl BuiltOp {
    fn build(spec: &OperatorSpec, grid: &Grid) -> varlp::Result<Self> {
        Ok(match *spec {
            OperatorSpec::HardyLittlewood => {
                BuiltOp::HardyLittlewood(MaximalConfig::default_for(grid))
            }
            OperatorSpec::PoweredMaximal { delta } => {
                BuiltOp::Powered(delta, MaximalConfig::default_for(grid))
            }
            OperatorSpec::RoughFirstCoordinate { r_exponent } => BuiltOp::Rough(
                RoughKernel::with_default_truncation(grid, |u| u[0], |_| 1.0, r_exponent)?,
            ),
            OperatorSpec::StronglySingular { b, a } => {
                BuiltOp::Multiplier(MultiplierSpec::StronglySingular { b, a })
            }
            OperatorSpec::BochnerRiesz { beta, r } => {
                BuiltOp::Multiplier(MultiplierSpec::BochnerRiesz { beta, r })
            }
            OperatorSpec::BochnerRieszMaximal { beta } => {
                BuiltOp::BochnerMax { beta, r_grid: default_r_grid(grid) }
            }
            OperatorSpec::SphericalMaximal { alpha } => {
                BuiltOp::Spherical { alpha, t_grid: default_t_grid(grid) }
            }
        })
    }

    fn apply(&self, f: &GridFunction) -> varlp::Result<GridFunction> {
        match self {
            BuiltOp::HardyLittlewood(cfg) => hl_maximal(f, cfg),
            BuiltOp::Powered(delta, cfg) => powered_maximal(&f.abs(), *delta, cfg),
            BuiltOp::Rough(kernel) => rough_singular_apply(f, kernel),
            BuiltOp::Multiplier(spec) => Ok(spec.apply(f)?.modulus()),
            BuiltOp::BochnerMax { beta, r_grid } => bochner_riesz_maximal(f, *beta, r_grid),
            BuiltOp::Spherical { alpha, t_grid } => frac_spherical_maximal(f, *alpha, t_grid),
        }
    }
}

/// Everything the row jobs read: built once, shared immutably.
struct Scene<'a> {
    cfg: &'a ExperimentConfig,
    grid: Grid,
    exponent: Exponent,
    weights: Vec<Weight>,
    inputs: Vec<GridFunction>,
    /// Pair family per operator index; `None` when no check references it.
    pair_families: Vec<Option<PairFamily>>,
    built_ops: Vec<BuiltOp>,
}

impl<'a> Scene<'a> {
    fn build(cfg: &'a ExperimentConfig) -> varlp::Result<Self> {
        let grid = cfg.grid.build()?;
        let exponent = cfg.exponent.build(grid)?;
        let mut weights = Vec::with_capacity(cfg.weights.len());
        for kind in &cfg.weights {
            weights.push(generate_weight(kind, grid)?);
        }

        let needs_inputs = cfg.checks.iter().any(|c| {
            matches!(
                c,
                CheckSpec::WeightedHypothesis { .. } | CheckSpec::VariableConclusion { .. }
            )
        }) || cfg
            .fields
            .iter()
            .any(|f| matches!(f, FieldSpec::Input { .. } | FieldSpec::OperatorOutput { .. }));
        let mut inputs = Vec::new();
        if needs_inputs && cfg.pair_family.count > 0 {
            inputs = extrapolation::input_family(
                grid,
                cfg.pair_family.count,
                cfg.seed.wrapping_add(SEED_INPUTS),
            )?;
            if cfg.pair_family.central_half {
                let window = central_window(&grid)?;
                for f in &mut inputs {
                    *f = f.zip_map(&window, |a, b| a * b)?;
                }
            }
        }

        let mut built_ops = Vec::with_capacity(cfg.operators.len());
        for op in &cfg.operators {
            built_ops.push(BuiltOp::build(op, &grid)?);
        }

        let mut referenced = vec![false; cfg.operators.len()];
        for check in &cfg.checks {
            match check {
                CheckSpec::WeightedHypothesis { operator, .. }
                | CheckSpec::VariableConclusion { operator, .. } => referenced[*operator] = true,
                _ => {}
            }
        }
        let mut pair_families = Vec::with_capacity(cfg.operators.len());
        for (i, used) in referenced.iter().enumerate() {
            pair_families.push(if *used {
                Some(PairFamily::from_operator(&inputs, |g| built_ops[i].apply(g))?)
            } else {
                None
            });
        }

        Ok(Scene { cfg, grid, exponent, weights, inputs, pair_families, built_ops })
    }

    fn cube_family(&self) -> varlp::Result<CubeFamily> {
        let depth = CubeFamily::max_depth(&self.grid).min(CUBE_DEPTH_CAP);
        CubeFamily::dyadic(&self.grid, depth)
    }
}

/// Smooth cutoff equal to 1 on the core of the box and exactly zero outside
/// radius `0.98 * extent / 4`, so windowed inputs stay inside the central
/// half where the truncated singular convolution is defined.
fn central_window(grid: &Grid) -> varlp::Result<GridFunction> {
    let r_out = 0.98 * grid.extent() / 4.0;
    let r_in = 0.75 * r_out;
    GridFunction::from_fn(*grid, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        1.0 - smooth_step((r - r_in) / (r_out - r_in))
    })
}

/// One unit of work: check index plus a sub-index for per-weight /
/// per-function expansions.
#[derive(Debug, Clone, Copy)]
enum Job {
    Check { index: usize, sub: usize },
    Field { index: usize },
}

fn expand_jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for (index, check) in cfg.checks.iter().enumerate() {
        let fan_out = match check {
            CheckSpec::WeightClass { .. } | CheckSpec::JnEquivalence { .. } => cfg.weights.len(),
            CheckSpec::RubioCertificate { functions, .. } => (*functions).max(1),
            _ => 1,
        };
        for sub in 0..fan_out {
            jobs.push(Job::Check { index, sub });
        }
    }
    jobs
}

fn run_check(scene: &Scene<'_>, index: usize, sub: usize) -> varlp::Result<CheckReport> {
    let p = &scene.exponent;
    match &scene.cfg.checks[index] {
        CheckSpec::DiagonalRange { p0, delta } => check_diagonal_range(p, *p0, *delta),
        CheckSpec::OffdiagonalRange { p0, q0, delta } => {
            check_offdiagonal_range(p, *p0, *q0, *delta)
        }
        CheckSpec::BaseShiftRange { p0, delta, search_grid } => {
            check_base_shift_range(p, *p0, *delta, search_grid)
        }
        CheckSpec::LogSmoothRange { p0, delta } => check_log_smooth_range(p, *p0, *delta),
        CheckSpec::ApplicationRange { application } => application_range(application, p),
        CheckSpec::WeightClass { p: pw } => {
            let w = &scene.weights[sub];
            let family = scene.cube_family()?;
            let class = if *pw == 1.0 {
                a1_constant(w, &family)?
            } else {
                ap_constant(w, *pw, &family)?
            };
            let verdict = if class.constant.is_finite() && class.stable {
                Verdict::HypothesesMet
            } else {
                Verdict::Unknown
            };
            let mut report = CheckReport::new("weight-class", verdict)
                .with("weight_index", sub as f64)
                .with("p", *pw)
                .with("constant", class.constant)
                .with("shallow_constant", class.shallow_constant)
                .with("stable", if class.stable { 1.0 } else { 0.0 })
                .with("depth", class.depth as f64)
                .with("worst_cube_half_width", class.worst_cube_half_width);
            if !(class.constant.is_finite() && class.stable) {
                report = report.note(format!(
                    "class constant not refinement-stable near {:?}",
                    &class.worst_cube_center[..scene.grid.dim()]
                ));
            }
            Ok(report)
        }
        CheckSpec::JnEquivalence { p: pw, delta } => {
            let w = &scene.weights[sub];
            let family = scene.cube_family()?;
            let jn = jn_equivalence_check(w, *pw, *delta, &family)?;
            let verdict = if jn.consistent { Verdict::HypothesesMet } else { Verdict::Unknown };
            let mut report = CheckReport::new("jn-equivalence", verdict)
                .with("weight_index", sub as f64)
                .with("p", jn.p)
                .with("delta", jn.delta)
                .with("reverse_holder_s", jn.s)
                .with("derived_q", jn.q)
                .with("ap_constant", jn.ap.constant)
                .with("rh_constant", jn.rh.constant)
                .with("aq_of_power_constant", jn.ap_of_power.constant)
                .with("lhs_stable", if jn.ap.stable && jn.rh.stable { 1.0 } else { 0.0 })
                .with("rhs_stable", if jn.ap_of_power.stable { 1.0 } else { 0.0 });
            if !jn.consistent {
                report = report.note(
                    "two-sided class memberships disagree under refinement; \
                     equivalence not certified at this resolution",
                );
            }
            Ok(report)
        }
        CheckSpec::RubioCertificate { q0, delta, functions } => {
            let seed = scene.cfg.seed;
            let mcfg = MaximalConfig::default_for(&scene.grid);
            let h_family = certificate_input_family(
                scene.grid,
                *functions,
                seed.wrapping_add(SEED_RUBIO_H),
            )?;
            let h = h_family[sub.min(h_family.len() - 1)].clone();

            // Empirical stand-in for the maximal-operator norm on the scaled
            // conjugate exponent: twice the best lower bound over seeded
            // probes. Large enough in practice for the certificate bounds.
            let aux = p.scaled_conjugate(*q0, 1.0)?;
            let probes =
                norm_test_family(scene.grid, 9, seed.wrapping_add(SEED_NORM_PROBES))?;
            let b = (2.0
                * operator_norm_estimate(
                    |f| powered_maximal(&f.abs(), *delta, &mcfg),
                    &aux,
                    &probes,
                    1e-8,
                )?
                .value)
                .max(1.0);

            let params = RubioParams::new(*q0, *delta, b);
            let result = iterate(&h, p, &params, &mcfg)?;
            let family = scene.cube_family()?;
            let min_ratio = result
                .rh
                .values()
                .iter()
                .zip(h.values())
                .filter(|&(_, &hv)| hv > 0.0)
                .map(|(&rv, &hv)| rv / hv)
                .fold(f64::INFINITY, f64::min);
            let rh_norm =
                varlp::norms::luxemburg_norm(&result.rh, p, params.tol)?.value;
            let report = a1_certificate(&result, *delta, &family, &mcfg)?
                .with("function_index", sub as f64)
                .with("b_estimate", b)
                .with("terms_used", result.terms_used as f64)
                .with("tail_bound", result.tail_bound)
                .with("h_norm", result.h_norm)
                .with("rh_norm", rh_norm)
                // Pointwise domination is exact: the first series term is
                // the input itself.
                .require("domination", 1.0, min_ratio, false)
                // Geometric series bound with 1% numerical slack, since the
                // probe-based norm estimate is only a lower bound.
                .require("norm_domination", rh_norm, 2.01 * result.h_norm, false);
            Ok(report)
        }
        CheckSpec::WeightedHypothesis { operator, p0, q0, delta } => {
            let pairs = scene.pair_families[*operator].as_ref().expect("validated");
            empirical_weighted_hypothesis(pairs, *p0, *q0, *delta, &scene.weights)
        }
        CheckSpec::VariableConclusion { operator, target } => {
            let pairs = scene.pair_families[*operator].as_ref().expect("validated");
            let q = match target {
                TargetSpec::Same => p.clone(),
                TargetSpec::Shifted { p0, q0 } => p.offdiagonal(*p0, *q0)?,
            };
            empirical_variable_conclusion(pairs, p, &q)
        }
    }
}

fn field_name(spec: &FieldSpec) -> String {
    match *spec {
        FieldSpec::Input { index } => format!("input_{index}"),
        FieldSpec::OperatorOutput { operator, input } => {
            format!("operator_{operator}_input_{input}")
        }
        FieldSpec::Weight { index } => format!("weight_{index}"),
    }
}

fn compute_field(scene: &Scene<'_>, spec: &FieldSpec) -> varlp::Result<GridFunction> {
    Ok(match *spec {
        FieldSpec::Input { index } => scene.inputs[index].clone(),
        FieldSpec::OperatorOutput { operator, input } => {
            scene.built_ops[operator].apply(&scene.inputs[input])?
        }
        FieldSpec::Weight { index } => scene.weights[index].values().clone(),
    })
}

fn run_job(scene: &Scene<'_>, row: usize, job: Job) -> (Row, Option<(String, GridFunction)>) {
    match job {
        Job::Check { index, sub } => match run_check(scene, index, sub) {
            Ok(report) => (Row::from_report(row, report), None),
            Err(e) => {
                let id = check_id(&scene.cfg.checks[index]);
                (Row::from_error(row, id, e.to_string()), None)
            }
        },
        Job::Field { index } => {
            let spec = &scene.cfg.fields[index];
            let name = field_name(spec);
            match compute_field(scene, spec) {
                Ok(f) => {
                    let mut row = Row::from_report(
                        row,
                        CheckReport::new("field", Verdict::HypothesesMet)
                            .with("values", f.values().len() as f64)
                            .note(format!("serialized {name} into fields.bin")),
                    );
                    row.id = format!("field:{name}");
                    (row, Some((name, f)))
                }
                Err(e) => (Row::from_error(row, &format!("field:{name}"), e.to_string()), None),
            }
        }
    }
}

fn check_id(check: &CheckSpec) -> &'static str {
    match check {
        CheckSpec::DiagonalRange { .. } => "diagonal-range",
        CheckSpec::OffdiagonalRange { .. } => "offdiagonal-range",
        CheckSpec::BaseShiftRange { .. } => "base-shift-range",
        CheckSpec::LogSmoothRange { .. } => "log-smooth-range",
        CheckSpec::ApplicationRange { .. } => "application-range",
        CheckSpec::WeightClass { .. } => "weight-class",
        CheckSpec::JnEquivalence { .. } => "jn-equivalence",
        CheckSpec::RubioCertificate { .. } => "majorant-a1-certificate",
        CheckSpec::WeightedHypothesis { .. } => "weighted-hypothesis",
        CheckSpec::VariableConclusion { .. } => "variable-conclusion",
    }
}

/// Runs the experiment and writes all three output files. Returns row
/// statistics; the caller maps `errors > 0` to exit code 2.
pub fn execute(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    threads: usize,
    verbose: bool,
) -> Result<Outcome, String> {
    // The hash identifies the experiment: everything that influences a
    // computed number. Output routing does not, so it is excluded.
    let mut canonical_cfg = cfg.clone();
    canonical_cfg.out_dir = None;
    let canonical =
        serde_json::to_string(&canonical_cfg).map_err(|e| format!("serialize config: {e}"))?;
    let hash_bytes: [u8; 32] = Sha256::digest(canonical.as_bytes()).into();
    let hash_hex: String = hash_bytes.iter().map(|b| format!("{b:02x}")).collect();

    let scene = Scene::build(cfg).map_err(|e| format!("building experiment scene: {e}"))?;

    let mut jobs = expand_jobs(cfg);
    for index in 0..cfg.fields.len() {
        jobs.push(Job::Field { index });
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| format!("thread pool: {e}"))?;
    let results: Vec<(Row, Option<(String, GridFunction)>)> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(row, job)| run_job(&scene, row, *job))
            .collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    let mut fields = Vec::new();
    for (row, field) in results {
        if verbose {
            match &row.error {
                Some(e) => eprintln!("[row {}] {} ERROR: {e}", row.row, row.id),
                None => eprintln!("[row {}] {} {}", row.row, row.id, row.verdict),
            }
        }
        rows.push(row);
        if let Some(f) = field {
            fields.push(f);
        }
    }

    std::fs::create_dir_all(out_dir)
        .map_err(|e| format!("creating {}: {e}", out_dir.display()))?;
    write_report_csv(&out_dir.join("report.csv"), &hash_hex, &rows)?;
    write_fields_bin(&out_dir.join("fields.bin"), &hash_bytes, &fields)?;

    let outcome = Outcome {
        rows: rows.len(),
        met: count(&rows, "HYPOTHESES_MET"),
        violated: count(&rows, "VIOLATED"),
        unknown: count(&rows, "UNKNOWN"),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
    };
    let summary = Summary {
        config_hash: hash_hex,
        seed: cfg.seed,
        met: outcome.met,
        violated: outcome.violated,
        unknown: outcome.unknown,
        errors: outcome.errors,
        rows,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| format!("serialize summary: {e}"))?;
    std::fs::write(out_dir.join("summary.json"), json.as_bytes())
        .map_err(|e| format!("writing summary.json: {e}"))?;

    Ok(outcome)
}

fn count(rows: &[Row], verdict: &str) -> usize {
    rows.iter().filter(|r| r.error.is_none() && r.verdict == verdict).count()
}

fn csv_cell(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_report_csv(path: &Path, hash_hex: &str, rows: &[Row]) -> Result<(), String> {
    let mut out = String::from("config_hash,row,id,verdict,witness,notes\n");
    for row in rows {
        let witness = row
            .witness
            .iter()
            .map(|(name, value)| format!("{name}={value:.17e}"))
            .collect::<Vec<_>>()
            .join(";");
        let mut notes = row.notes.join(" | ");
        if let Some(e) = &row.error {
            notes = if notes.is_empty() { e.clone() } else { format!("{notes} | {e}") };
        }
        out.push_str(&format!(
            "{hash_hex},{},{},{},{},{}\n",
            row.row,
            csv_cell(&row.id),
            csv_cell(&row.verdict),
            csv_cell(&witness),
            csv_cell(&notes),
        ));
    }
    std::fs::write(path, out.as_bytes()).map_err(|e| format!("writing report.csv: {e}"))
}

/// Flat binary layout, all integers little-endian:
/// magic `VLPF`, format version u32, 32-byte config hash, field count u64,
/// then per field: name length u64, UTF-8 name, payload length in bytes u64,
/// raw little-endian f64 samples.
fn write_fields_bin(
    path: &Path,
    hash: &[u8; 32],
    fields: &[(String, GridFunction)],
) -> Result<(), String> {
    let mut out: Vec<u8> = Vec::new();
    out.extend_from_slice(b"VLPF");
    out.extend_from_slice(&1u32.to_le_bytes());
    out.extend_from_slice(hash);
    out.extend_from_slice(&(fields.len() as u64).to_le_bytes());
    for (name, f) in fields {
        let bytes = f.to_le_bytes();
        out.extend_from_slice(&(name.len() as u64).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(bytes.len() as u64).to_le_bytes());
        out.extend_from_slice(&bytes);
    }
    let mut file =
        std::fs::File::create(path).map_err(|e| format!("creating fields.bin: {e}"))?;
    file.write_all(&out).map_err(|e| format!("writing fields.bin: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn csv_cells_escape_commas_and_quotes() {
        assert_eq!(csv_cell("plain"), "plain");
        assert_eq!(csv_cell("a,b"), "\"a,b\"");
        assert_eq!(csv_cell("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn job_expansion_fans_out_per_weight_and_function() {
        let cfg = preset("bochner-riesz").unwrap();
        // 3 checks, one of which is a weighted hypothesis (1 row); the
        // weight-class fan-out only applies to WeightClass/JnEquivalence.
        assert_eq!(expand_jobs(&cfg).len(), 3);

        let cfg = preset("rubio-certificate").unwrap();
        assert_eq!(expand_jobs(&cfg).len(), 5);
    }

    #[test]
    fn central_window_vanishes_outside_quarter_extent() {
        let grid = Grid::new(2, 16.0, 32, varlp::grid::GridMode::Box).unwrap();
        let w = central_window(&grid).unwrap();
        for (idx, &v) in w.values().iter().enumerate() {
            let x = grid.point(idx);
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((0.0..=1.0).contains(&v));
            if r > 0.98 * 4.0 {
                assert_eq!(v, 0.0, "window must vanish at radius {r}");
            }
            if r < 0.6 * 4.0 * 0.98 {
                assert!(v > 0.99, "window must be ~1 in the core, got {v} at {r}");
            }
        }
    }
}
