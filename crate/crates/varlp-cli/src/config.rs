//! Experiment configuration: JSON schema, validation, and built-in presets.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use varlp::extrapolation::Application;
use varlp::grid::{Grid, GridMode};
use varlp::exponent::Exponent;
use varlp::operators::MultiplierSpec;
use varlp::weights::WeightKind;

/// One experiment: a grid, an exponent, referenced weights and operators,
/// and a list of checks to run. Everything is reproducible from `seed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub exponent: ExponentSpec,
    #[serde(default)]
    pub weights: Vec<WeightKind>,
    #[serde(default)]
    pub operators: Vec<OperatorSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub pair_family: PairFamilySpec,
    /// Grid functions to serialize into fields.bin.
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub extent: f64,
    pub points_per_axis: usize,
    pub mode: GridMode,
}

impl GridSpec {
    pub fn build(&self) -> varlp::Result<Grid> {
        Grid::new(self.dim, self.extent, self.points_per_axis, self.mode)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentSpec {
    Constant { value: f64 },
    RadialBump { base: f64, amplitude: f64, sigma: f64 },
    TwoLevel { left: f64, right: f64 },
}

impl ExponentSpec {
    pub fn build(&self, grid: Grid) -> varlp::Result<Exponent> {
        match *self {
            ExponentSpec::Constant { value } => Exponent::constant(grid, value),
            ExponentSpec::RadialBump { base, amplitude, sigma } => {
                Exponent::radial_bump(grid, base, amplitude, sigma)
            }
            ExponentSpec::TwoLevel { left, right } => Exponent::two_level(grid, left, right),
        }
    }
}

/// Operators that can form `(|T g|, g)` pair families or emit fields.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    HardyLittlewood,
    PoweredMaximal { delta: f64 },
    /// Truncated singular convolution with kernel `y_1/|y|^{n+1}` (angular
    /// part = first coordinate of `y/|y|`, unit radial factor) and the given
    /// Dini integrability index.
    RoughFirstCoordinate { r_exponent: f64 },
    StronglySingular { b: f64, a: f64 },
    BochnerRiesz { beta: f64, r: f64 },
    BochnerRieszMaximal { beta: f64 },
    SphericalMaximal { alpha: f64 },
}

impl OperatorSpec {
    /// Geometric requirements that can be validated before running.
    pub fn validate(&self, grid: &Grid) -> Result<(), String> {
        match self {
            OperatorSpec::RoughFirstCoordinate { r_exponent } => {
                if grid.mode() != GridMode::Box {
                    return Err("rough kernel operator requires box mode".into());
                }
                if !(grid.dim() == 2 || grid.dim() == 3) {
                    return Err("rough kernel operator requires dim 2 or 3".into());
                }
                if !(*r_exponent > 1.0) {
                    return Err(format!(
                        "rough kernel integrability index must exceed 1, got {r_exponent}"
                    ));
                }
                Ok(())
            }
            OperatorSpec::StronglySingular { b, a } => {
                if grid.mode() != GridMode::Torus {
                    return Err("strongly singular multiplier requires torus mode".into());
                }
                MultiplierSpec::StronglySingular { b: *b, a: *a }
                    .validate(grid.dim())
                    .map_err(|e| e.to_string())
            }
            OperatorSpec::BochnerRiesz { beta, r } => {
                if grid.mode() != GridMode::Torus {
                    return Err("Bochner-Riesz multiplier requires torus mode".into());
                }
                MultiplierSpec::BochnerRiesz { beta: *beta, r: *r }
                    .validate(grid.dim())
                    .map_err(|e| e.to_string())
            }
            OperatorSpec::BochnerRieszMaximal { beta } => {
                if grid.mode() != GridMode::Torus {
                    return Err("maximal Bochner-Riesz requires torus mode".into());
                }
                if !(*beta > 0.0 && beta.is_finite()) {
                    return Err(format!("Bochner-Riesz order must be positive, got {beta}"));
                }
                Ok(())
            }
            OperatorSpec::SphericalMaximal { alpha } => {
                if !(grid.dim() == 2 || grid.dim() == 3) {
                    return Err("spherical maximal requires dim 2 or 3".into());
                }
                if !(*alpha >= 0.0 && alpha.is_finite()) {
                    return Err(format!("spherical order must be >= 0, got {alpha}"));
                }
                Ok(())
            }
            OperatorSpec::PoweredMaximal { delta } => {
                if !(*delta > 0.0 && *delta <= 1.0) {
                    return Err(format!("maximal power must lie in (0, 1], got {delta}"));
                }
                Ok(())
            }
            OperatorSpec::HardyLittlewood => Ok(()),
        }
    }

    /// Whether pair inputs must be supported in the central half of the box.
    pub fn needs_central_support(&self) -> bool {
        matches!(self, OperatorSpec::RoughFirstCoordinate { .. })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFamilySpec {
    pub count: usize,
    /// Restrict generated inputs to the central half of the box (required
    /// by the truncated singular convolution).
    #[serde(default)]
    pub central_half: bool,
}

impl Default for PairFamilySpec {
    fn default() -> Self {
        PairFamilySpec { count: 8, central_half: false }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    /// The `index`-th generated pair input.
    Input { index: usize },
    /// Operator `operator` applied to pair input `input`.
    OperatorOutput { operator: usize, input: usize },
    /// The `index`-th configured weight.
    Weight { index: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// Diagonal exponent range around a base `(p0, delta)`.
    DiagonalRange { p0: f64, delta: f64 },
    /// Off-diagonal range with companion exponent.
    OffdiagonalRange { p0: f64, q0: f64, delta: f64 },
    /// Range with a searched shifted base exponent.
    BaseShiftRange { p0: f64, delta: f64, search_grid: Vec<f64> },
    /// Range gated on log-smoothness of the exponent itself.
    LogSmoothRange { p0: f64, delta: f64 },
    /// Operator-family range (rough kernel, strongly singular, spherical,
    /// Bochner-Riesz).
    ApplicationRange { application: Application },
    /// Muckenhoupt constant of every configured weight at exponent `p`.
    WeightClass { p: f64 },
    /// Two-sided class identity `w in A_p & RH_{1/delta} <=> w^{1/delta} in A_q`
    /// for every configured weight.
    JnEquivalence { p: f64, delta: f64 },
    /// Majorant-construction certificate on seeded test functions.
    RubioCertificate { q0: f64, delta: f64, functions: usize },
    /// Measured base weighted inequality over pairs x weights.
    WeightedHypothesis { operator: usize, p0: f64, q0: f64, delta: f64 },
    /// Measured variable-norm ratio over pairs.
    VariableConclusion { operator: usize, target: TargetSpec },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Measure with the configured exponent on both sides.
    Same,
    /// Measure against the companion exponent `1/q = 1/p - (1/p0 - 1/q0)`.
    Shifted { p0: f64, q0: f64 },
}

impl ExperimentConfig {
    /// Structural validation: every cross-reference resolves and every
    /// operator is compatible with the grid. Returns a line-anchored message
    /// on the first failure.
    pub fn validate(&self) -> Result<(), String> {
        let grid = self.grid.build().map_err(|e| format!("grid: {e}"))?;
        self.exponent
            .build(grid)
            .map_err(|e| format!("exponent: {e}"))?;
        for (i, op) in self.operators.iter().enumerate() {
            op.validate(&grid).map_err(|e| format!("operators[{i}]: {e}"))?;
            if op.needs_central_support() && !self.pair_family.central_half {
                return Err(format!(
                    "operators[{i}]: rough kernel operator requires pair_family.central_half = true"
                ));
            }
        }
        for (i, check) in self.checks.iter().enumerate() {
            let op_ref = match check {
                CheckSpec::WeightedHypothesis { operator, .. }
                | CheckSpec::VariableConclusion { operator, .. } => Some(*operator),
                _ => None,
            };
            if let Some(op) = op_ref {
                if op >= self.operators.len() {
                    return Err(format!(
                        "checks[{i}]: operator index {op} out of range (have {})",
                        self.operators.len()
                    ));
                }
                if self.pair_family.count == 0 {
                    return Err(format!("checks[{i}]: pair_family.count must be positive"));
                }
            }
            if let CheckSpec::WeightedHypothesis { .. } | CheckSpec::WeightClass { .. }
            | CheckSpec::JnEquivalence { .. } = check
            {
                if self.weights.is_empty() {
                    return Err(format!("checks[{i}]: requires at least one configured weight"));
                }
            }
        }
        for (i, field) in self.fields.iter().enumerate() {
            let ok = match *field {
                FieldSpec::Input { index } => index < self.pair_family.count,
                FieldSpec::OperatorOutput { operator, input } => {
                    operator < self.operators.len() && input < self.pair_family.count
                }
                FieldSpec::Weight { index } => index < self.weights.len(),
            };
            if !ok {
                return Err(format!("fields[{i}]: reference out of range"));
            }
        }
        Ok(())
    }
}

/// Built-in scenario catalog: one preset per checked operator family plus
/// the majorant-construction certificate.
pub const PRESET_NAMES: [&str; 7] = [
    "rough-a",
    "rough-b",
    "rough-c",
    "strongly-singular",
    "spherical",
    "bochner-riesz",
    "rubio-certificate",
];

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let box2 = GridSpec { dim: 2, extent: 16.0, points_per_axis: 64, mode: GridMode::Box };
    let torus2 = GridSpec { dim: 2, extent: 16.0, points_per_axis: 64, mode: GridMode::Torus };
    let cfg = match name {
        "rough-a" => ExperimentConfig {
            grid: box2,
            exponent: ExponentSpec::RadialBump { base: 2.6, amplitude: 0.2, sigma: 2.0 },
            weights: vec![],
            operators: vec![OperatorSpec::RoughFirstCoordinate { r_exponent: 2.0 }],
            checks: vec![
                CheckSpec::ApplicationRange { application: Application::RoughA { r: 2.0 } },
                CheckSpec::VariableConclusion { operator: 0, target: TargetSpec::Same },
            ],
            pair_family: PairFamilySpec { count: 8, central_half: true },
            fields: vec![
                FieldSpec::Input { index: 0 },
                FieldSpec::OperatorOutput { operator: 0, input: 0 },
            ],
            seed: 7,
            out_dir: Some(PathBuf::from("varlp-out")),
        },
        "rough-b" => ExperimentConfig {
            grid: box2,
            exponent: ExponentSpec::RadialBump { base: 2.0, amplitude: 0.3, sigma: 2.0 },
            weights: vec![],
            operators: vec![OperatorSpec::RoughFirstCoordinate { r_exponent: 4.0 }],
            checks: vec![
                CheckSpec::ApplicationRange { application: Application::RoughB { r: 4.0 } },
                CheckSpec::VariableConclusion { operator: 0, target: TargetSpec::Same },
            ],
            pair_family: PairFamilySpec { count: 8, central_half: true },
            fields: vec![],
            seed: 7,
            out_dir: Some(PathBuf::from("varlp-out")),
        },
        "rough-c" => ExperimentConfig {
            grid: box2,
            exponent: ExponentSpec::RadialBump { base: 2.0, amplitude: 0.3, sigma: 2.0 },
            weights: vec![],
            operators: vec![OperatorSpec::RoughFirstCoordinate { r_exponent: 2.0 }],
            checks: vec![
                CheckSpec::ApplicationRange {
                    application: Application::RoughC { r: 2.0, p0: 2.0 },
                },
                CheckSpec::VariableConclusion { operator: 0, target: TargetSpec::Same },
            ],
            pair_family: PairFamilySpec { count: 8, central_half: true },
            fields: vec![],
            seed: 7,
            out_dir: Some(PathBuf::from("varlp-out")),
        },
        "strongly-singular" => ExperimentConfig {
            grid: torus2,
            exponent: ExponentSpec::Constant { value: 2.0 },
            weights: vec![],
            operators: vec![OperatorSpec::StronglySingular { b: 0.5, a: 0.25 }],
            checks: vec![
                CheckSpec::ApplicationRange {
                    application: Application::StronglySingular {
                        n: 2,
                        b: 0.5,
                        a: 0.25,
                        p0: 2.0,
                    },
                },
                CheckSpec::VariableConclusion { operator: 0, target: TargetSpec::Same },
            ],
            pair_family: PairFamilySpec { count: 8, central_half: false },
            fields: vec![FieldSpec::OperatorOutput { operator: 0, input: 0 }],
            seed: 11,
            out_dir: Some(PathBuf::from("varlp-out")),
        },
        "spherical" => ExperimentConfig {
            grid: GridSpec { dim: 3, extent: 16.0, points_per_axis: 32, mode: GridMode::Box },
            exponent: ExponentSpec::Constant { value: 1.8 },
            weights: vec![],
            operators: vec![OperatorSpec::SphericalMaximal { alpha: 0.5 }],
            checks: vec![
                CheckSpec::ApplicationRange {
                    application: Application::Spherical { n: 3, alpha: 0.5 },
                },
                CheckSpec::VariableConclusion {
                    operator: 0,
                    // 1/q = 1/p - alpha/n with alpha/n = 1/6.
                    target: TargetSpec::Shifted { p0: 1.0, q0: 1.2 },
                },
            ],
            pair_family: PairFamilySpec { count: 6, central_half: false },
            fields: vec![],
            seed: 13,
            out_dir: Some(PathBuf::from("varlp-out")),
        },
        "bochner-riesz" => ExperimentConfig {
            grid: torus2,
            exponent: ExponentSpec::RadialBump { base: 2.0, amplitude: 0.3, sigma: 2.0 },
            weights: vec![
                WeightKind::Power { exponent: -0.5 },
                WeightKind::Constant { value: 1.0 },
            ],
            operators: vec![OperatorSpec::BochnerRieszMaximal { beta: 0.25 }],
            checks: vec![
                CheckSpec::ApplicationRange {
                    application: Application::BochnerRiesz { n: 2, beta: 0.25 },
                },
                CheckSpec::VariableConclusion { operator: 0, target: TargetSpec::Same },
                CheckSpec::WeightedHypothesis { operator: 0, p0: 2.0, q0: 2.0, delta: 0.5 },
            ],
            pair_family: PairFamilySpec { count: 8, central_half: false },
            fields: vec![],
            seed: 17,
            out_dir: Some(PathBuf::from("varlp-out")),
        },
        "rubio-certificate" => ExperimentConfig {
            grid: GridSpec { dim: 1, extent: 8.0, points_per_axis: 256, mode: GridMode::Box },
            exponent: ExponentSpec::Constant { value: 4.0 },
            weights: vec![],
            operators: vec![],
            checks: vec![CheckSpec::RubioCertificate { q0: 2.0, delta: 0.75, functions: 5 }],
            pair_family: PairFamilySpec::default(),
            fields: vec![],
            seed: 23,
            out_dir: Some(PathBuf::from("varlp-out")),
        },
        _ => return None,
    };
    Some(cfg)
}

pub fn preset_description(name: &str) -> &'static str {
    match name {
        "rough-a" => "rough-kernel convolution, range r' < p_minus, measured norm ratios",
        "rough-b" => "rough-kernel convolution, range p_plus < r, measured norm ratios",
        "rough-c" => "rough-kernel convolution, two-sided range around a base exponent",
        "strongly-singular" => "oscillating multiplier |xi|^{-a} e^{i|xi|^b}, range via gamma",
        "spherical" => "fractional spherical maximal operator, off-diagonal target norm",
        "bochner-riesz" => "maximal Bochner-Riesz means, range plus weighted base inequality",
        "rubio-certificate" => "majorant construction: domination, norm bound, A1 certificate",
        _ => "",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build_and_validate() {
        for name in PRESET_NAMES {
            let cfg = preset(name).expect(name);
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            // Round-trips through JSON.
            let js = serde_json::to_string(&cfg).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&js).unwrap();
            back.validate().unwrap();
        }
        assert!(preset("no-such-preset").is_none());
    }

    #[test]
    fn validation_catches_bad_references() {
        let mut cfg = preset("rough-a").unwrap();
        cfg.checks.push(CheckSpec::VariableConclusion { operator: 5, target: TargetSpec::Same });
        assert!(cfg.validate().unwrap_err().contains("out of range"));

        let mut cfg = preset("rough-a").unwrap();
        cfg.pair_family.central_half = false;
        assert!(cfg.validate().unwrap_err().contains("central_half"));

        let mut cfg = preset("bochner-riesz").unwrap();
        cfg.weights.clear();
        assert!(cfg.validate().unwrap_err().contains("weight"));
    }
}
