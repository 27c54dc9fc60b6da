//! Experiment configuration.
//!
//! Grammar: `[section]` headers, `key = value` lines, and whole-line comments
//! starting with `#` or `;`. Unknown sections and keys are rejected so typos
//! surface as errors instead of silently falling back to defaults.
//!
//! ```text
//! [chart]
//! n = 1
//! resolution = 64            # every transverse axis
//! period = 6.283185307179586
//! leaf_resolution = 16       # optional; adds the leaf axes
//! leaf_period = 6.283185307179586
//! preset = cos_bump          # flat | cos_bump | product_bump
//! amplitude = 0.1
//!
//! [flow]                     # FlowConfig keys, plus the class representative
//! chi_preset = zero          # zero | cos_bump
//! chi_amplitude = 0.0
//!
//! [checks]
//! vaisman = true
//! deformation = true
//! inject_defect = false
//! tolerance = 1e-5
//!
//! [output]
//! directory = out            # relative to the config file
//! checkpoint_every = 0       # 0 disables checkpoints
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use vaisman_core::flow::FlowConfig;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Flat,
    CosBump,
    ProductBump,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flat" => Ok(Preset::Flat),
            "cos_bump" => Ok(Preset::CosBump),
            "product_bump" => Ok(Preset::ProductBump),
            _ => Err(format!(
                "unknown preset '{s}' (expected flat, cos_bump or product_bump)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiPreset {
    Zero,
    CosBump,
}

impl FromStr for ChiPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "zero" => Ok(ChiPreset::Zero),
            "cos_bump" => Ok(ChiPreset::CosBump),
            _ => Err(format!("unknown preset '{s}' (expected zero or cos_bump)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartConfig {
    pub n: usize,
    pub resolution: usize,
    pub period: f64,
    pub leaf_resolution: Option<usize>,
    pub leaf_period: f64,
    pub preset: Preset,
    pub amplitude: f64,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig {
            n: 1,
            resolution: 64,
            period: 2.0 * PI,
            leaf_resolution: None,
            leaf_period: 2.0 * PI,
            preset: Preset::Flat,
            amplitude: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChecksConfig {
    pub vaisman: bool,
    pub deformation: bool,
    pub inject_defect: bool,
    /// Bound on `sup‖dω − θ∧ω‖` at the finer resolution.
    pub tolerance: f64,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            vaisman: true,
            deformation: true,
            inject_defect: false,
            tolerance: 1e-5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub checkpoint_every: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub chart: ChartConfig,
    pub flow: FlowConfig,
    pub chi_preset: ChiPreset,
    pub chi_amplitude: f64,
    pub checks: ChecksConfig,
    pub output: OutputConfig,
}

fn parse<T: FromStr>(section: &str, key: &str, value: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("[{section}] {key}: cannot parse '{value}': {e}")))
}

impl ExperimentConfig {
    /// Parses `text`; a relative output directory is resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> CliResult<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(format!("syntax: {e}")))?;
        let mut chart = ChartConfig::default();
        let mut flow = FlowConfig::default();
        let (mut chi_preset, mut chi_amplitude) = (ChiPreset::Zero, 0.0);
        let mut checks = ChecksConfig::default();
        let mut output = OutputConfig {
            directory: PathBuf::from("."),
            checkpoint_every: 0,
        };

        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(CliError::Config(format!(
                        "{key}: key outside of any section"
                    )));
                }
                continue;
            };
            for (key, value) in props.iter() {
                let value = value.trim();
                let s = section;
                match (section, key) {
                    ("chart", "n") => chart.n = parse(s, key, value)?,
                    ("chart", "resolution") => chart.resolution = parse(s, key, value)?,
                    ("chart", "period") => chart.period = parse(s, key, value)?,
                    ("chart", "leaf_resolution") => {
                        chart.leaf_resolution = Some(parse(s, key, value)?)
                    }
                    ("chart", "leaf_period") => chart.leaf_period = parse(s, key, value)?,
                    ("chart", "preset") => chart.preset = parse(s, key, value)?,
                    ("chart", "amplitude") => chart.amplitude = parse(s, key, value)?,
                    ("flow", "class_k") => flow.class_k = parse(s, key, value)?,
                    ("flow", "dt_initial") => flow.dt_initial = parse(s, key, value)?,
                    ("flow", "dt_safety") => flow.dt_safety = parse(s, key, value)?,
                    ("flow", "max_steps") => flow.max_steps = parse(s, key, value)?,
                    ("flow", "ricci_tolerance") => flow.ricci_tolerance = parse(s, key, value)?,
                    ("flow", "rescaled") => flow.rescaled = parse(s, key, value)?,
                    ("flow", "extended") => flow.extended = parse(s, key, value)?,
                    ("flow", "positivity_floor") => flow.positivity_floor = parse(s, key, value)?,
                    ("flow", "chi_preset") => chi_preset = parse(s, key, value)?,
                    ("flow", "chi_amplitude") => chi_amplitude = parse(s, key, value)?,
                    ("checks", "vaisman") => checks.vaisman = parse(s, key, value)?,
                    ("checks", "deformation") => checks.deformation = parse(s, key, value)?,
                    ("checks", "inject_defect") => checks.inject_defect = parse(s, key, value)?,
                    ("checks", "tolerance") => checks.tolerance = parse(s, key, value)?,
                    ("output", "directory") => output.directory = PathBuf::from(value),
                    ("output", "checkpoint_every") => {
                        output.checkpoint_every = parse(s, key, value)?
                    }
                    ("chart" | "flow" | "checks" | "output", _) => {
                        return Err(CliError::Config(format!("[{section}] {key}: unknown key")))
                    }
                    _ => return Err(CliError::Config(format!("[{section}]: unknown section"))),
                }
            }
        }
        if output.directory.is_relative() {
            output.directory = base.join(&output.directory);
        }
        let config = ExperimentConfig {
            chart,
            flow,
            chi_preset,
            chi_amplitude,
            checks,
            output,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |key: &str, why: &str| Err(CliError::Config(format!("{key}: {why}")));
        let c = &self.chart;
        if c.n == 0 {
            return bad("n", "must be at least 1");
        }
        if !(c.period > 0.0 && c.period.is_finite()) {
            return bad("period", "must be positive");
        }
        if !(c.leaf_period > 0.0 && c.leaf_period.is_finite()) {
            return bad("leaf_period", "must be positive");
        }
        if !c.amplitude.is_finite() {
            return bad("amplitude", "must be finite");
        }
        if !self.chi_amplitude.is_finite() {
            return bad("chi_amplitude", "must be finite");
        }
        if !(self.checks.tolerance > 0.0) {
            return bad("tolerance", "must be positive");
        }
        // Resolution rules live with the grid; report them under the config key.
        self.grid_spec(c.leaf_resolution).map_err(|e| {
            let key = if e.to_string().contains("leaf") {
                "leaf_resolution"
            } else {
                "resolution"
            };
            CliError::Config(format!("{key}: {e}"))
        })?;
        self.flow
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Grid of the chart, with leaf axes of the given resolution if any.
    pub fn grid_spec(&self, leaf: Option<usize>) -> vaisman_core::Result<vaisman_core::GridSpec> {
        let c = &self.chart;
        vaisman_core::GridSpec::new(
            c.n,
            vec![c.resolution; 2 * c.n],
            vec![c.period; 2 * c.n],
            leaf.map(|r| [r, r]),
            leaf.map(|_| [c.leaf_period, c.leaf_period]),
        )
    }
}
