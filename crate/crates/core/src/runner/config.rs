//! Scenario configuration: a versioned JSON document.
//!
//! ```json
//! {
//!   "spec_version": 1,
//!   "domain": {"kind": "interval", "length": 3.141592653589793},
//!   "n_modes": 16,
//!   "params": {"m0": 1.0, "m1": 0.5, "alpha": 1.0, "beta": 1.0},
//!   "initial": {"displacement": {"kind": "bump", "amplitude": 0.5, "power": 3}},
//!   "stepper": {"method": "implicit_midpoint", "dt": 0.001},
//!   "t_end": 20.0,
//!   "record_every": 1
//! }
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModalState, ModelParams};
use crate::spectrum::{build_basis, project_initial_data, Domain, EigenBasis, Field, Point};
use crate::timeloop::{default_dt, Method, StepperConfig};

/// Schema version understood by this crate.
pub const CONFIG_VERSION: u32 = 1;

/// Environment variable overriding `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "KHEAT_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub spec_version: u32,
    #[serde(default = "default_domain")]
    pub domain: Domain,
    pub n_modes: usize,
    pub params: ModelParams,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub stepper: StepperSpec,
    pub t_end: f64,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_domain() -> Domain {
    Domain::Interval { length: PI }
}

fn one() -> usize {
    1
}

/// Initial displacement `y0`, velocity `y1` and temperature `theta0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default)]
    pub displacement: Profile,
    #[serde(default)]
    pub velocity: Profile,
    #[serde(default)]
    pub temperature: Profile,
}

/// Named initial profiles.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    #[default]
    Zero,
    /// `amplitude * e_mode`, `mode` counted from 1 in basis order.
    SineMode {
        mode: usize,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// `amplitude * (4 x (L - x) / L^2)^power`, a tensor product on
    /// rectangles.
    Bump {
        #[serde(default = "unit")]
        amplitude: f64,
        #[serde(default = "three")]
        power: u32,
    },
    /// Explicit modal coefficients, zero-padded to `n_modes`.
    Coefficients { values: Vec<f64> },
}

fn unit() -> f64 {
    1.0
}

fn three() -> u32 {
    3
}

impl Profile {
    fn validate(&self, field: &str, n_modes: usize) -> Result<()> {
        match self {
            Profile::Zero => Ok(()),
            Profile::SineMode { mode, amplitude } => {
                if *mode == 0 || *mode > n_modes {
                    return Err(Error::config(
                        format!("{field}.mode"),
                        format!("mode must be in 1..={n_modes}, got {mode}"),
                    ));
                }
                finite(&format!("{field}.amplitude"), *amplitude)
            }
            Profile::Bump { amplitude, power } => {
                if *power == 0 {
                    return Err(Error::config(
                        format!("{field}.power"),
                        "power must be at least 1",
                    ));
                }
                finite(&format!("{field}.amplitude"), *amplitude)
            }
            Profile::Coefficients { values } => {
                if values.len() > n_modes {
                    return Err(Error::config(
                        format!("{field}.values"),
                        format!("{} coefficients given for {n_modes} modes", values.len()),
                    ));
                }
                values
                    .iter()
                    .try_for_each(|v| finite(&format!("{field}.values"), *v))
            }
        }
    }

    /// Modal coefficients of the profile on `basis`.
    pub fn coefficients(&self, basis: &EigenBasis) -> Result<Vec<f64>> {
        let n = basis.n_modes();
        match self {
            Profile::Zero => Ok(vec![0.0; n]),
            Profile::SineMode { mode, amplitude } => {
                let mut c = vec![0.0; n];
                if *mode >= 1 && *mode <= n {
                    c[mode - 1] = *amplitude;
                }
                Ok(c)
            }
            Profile::Bump { amplitude, power } => {
                let (a, p) = (*amplitude, *power as i32);
                let bump = |x: f64, l: f64| (4.0 * x * (l - x) / (l * l)).powi(p);
                let f: Box<dyn Fn(Point) -> f64> = match basis.domain() {
                    Domain::Interval { length } => Box::new(move |q: Point| a * bump(q.x, length)),
                    Domain::Rectangle { lx, ly } => {
                        Box::new(move |q: Point| a * bump(q.x, lx) * bump(q.y, ly))
                    }
                };
                project_initial_data(basis, &Field::Function(&*f))
            }
            Profile::Coefficients { values } => project_initial_data(basis, &Field::Modal(values)),
        }
    }
}

fn finite(field: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be finite, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSpec {
    #[serde(default = "midpoint")]
    pub method: Method,
    /// Omitted: `0.1 / sqrt(phi(S0) lambda_max)`.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_iter")]
    pub newton_max_iter: usize,
}

fn midpoint() -> Method {
    Method::ImplicitMidpoint
}

fn default_tol() -> f64 {
    1e-14
}

fn default_iter() -> usize {
    50
}

impl Default for StepperSpec {
    fn default() -> Self {
        Self {
            method: Method::ImplicitMidpoint,
            dt: None,
            newton_tol: default_tol(),
            newton_max_iter: default_iter(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_csv")]
    pub trajectory_csv: String,
    #[serde(default = "default_json")]
    pub diagnostics_json: String,
}

fn default_dir() -> PathBuf {
    PathBuf::from("output")
}

fn default_csv() -> String {
    "trajectory.csv".into()
}

fn default_json() -> String {
    "diagnostics.json".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            trajectory_csv: default_csv(),
            diagnostics_json: default_json(),
        }
    }
}

impl OutputSpec {
    /// `output.dir`, unless overridden by `KHEAT_OUTPUT_DIR`.
    pub fn resolved_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| self.dir.clone())
    }
}

/// A validated scenario with its basis and initial state built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: ModelParams,
    pub basis: EigenBasis,
    pub initial: ModalState,
    pub stepper: StepperConfig,
    pub t_end: f64,
    pub record_every: usize,
}

impl ScenarioConfig {
    /// Parse and validate a JSON document. Syntax and schema errors carry
    /// the line and column.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(s).map_err(|e| {
            let msg = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            let msg = msg.strip_suffix(&suffix).unwrap_or(&msg).to_string();
            Error::config(format!("line {}, column {}", e.line(), e.column()), msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }

    /// The bundled scenario: interval `(0, pi)`, 16 modes, `m0 = 1`,
    /// `m1 = 0.5`, `alpha = beta = 1`, a cubic bump of amplitude 0.5 at rest,
    /// midpoint with `dt = 1e-3` up to `t = 20`.
    pub fn default_scenario() -> Self {
        Self {
            spec_version: CONFIG_VERSION,
            domain: default_domain(),
            n_modes: 16,
            params: ModelParams::new(1.0, 0.5, 1.0, 1.0).expect("valid"),
            initial: InitialData {
                displacement: Profile::Bump {
                    amplitude: 0.5,
                    power: 3,
                },
                ..Default::default()
            },
            stepper: StepperSpec {
                dt: Some(1e-3),
                ..Default::default()
            },
            t_end: 20.0,
            record_every: 1,
            seed: 0,
            output: OutputSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.spec_version != CONFIG_VERSION {
            return Err(Error::config(
                "spec_version",
                format!(
                    "unsupported version {}, expected {CONFIG_VERSION}",
                    self.spec_version
                ),
            ));
        }
        self.domain
            .validate()
            .map_err(|e| Error::config("domain", strip(e)))?;
        if self.n_modes == 0 {
            return Err(Error::config("n_modes", "must be at least 1"));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::config(
                "t_end",
                format!("must be positive, got {}", self.t_end),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::config("record_every", "must be at least 1"));
        }
        if let Some(dt) = self.stepper.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config(
                    "stepper.dt",
                    format!("must be positive, got {dt}"),
                ));
            }
            if dt > self.t_end {
                return Err(Error::config("stepper.dt", "must not exceed t_end"));
            }
        }
        if !(self.stepper.newton_tol > 0.0) {
            return Err(Error::config("stepper.newton_tol", "must be positive"));
        }
        if self.stepper.newton_max_iter == 0 {
            return Err(Error::config(
                "stepper.newton_max_iter",
                "must be at least 1",
            ));
        }
        self.initial
            .displacement
            .validate("initial.displacement", self.n_modes)?;
        self.initial
            .velocity
            .validate("initial.velocity", self.n_modes)?;
        self.initial
            .temperature
            .validate("initial.temperature", self.n_modes)?;
        Ok(())
    }

    /// Build the basis and initial state and settle `dt`.
    pub fn resolve(&self) -> Result<Scenario> {
        self.validate()?;
        let basis = build_basis(self.domain, self.n_modes)
            .map_err(|e| Error::config("n_modes", strip(e)))?;
        let initial = ModalState::new(
            self.initial.displacement.coefficients(&basis)?,
            self.initial.velocity.coefficients(&basis)?,
            self.initial.temperature.coefficients(&basis)?,
        )?;
        let dt = match self.stepper.dt {
            Some(dt) => dt,
            None => default_dt(&self.params, &basis, &initial)?,
        };
        let stepper = StepperConfig {
            method: self.stepper.method,
            dt,
            newton_tol: self.stepper.newton_tol,
            newton_max_iter: self.stepper.newton_max_iter,
        };
        stepper
            .validate(&basis)
            .map_err(|e| Error::config("stepper", strip(e)))?;
        Ok(Scenario {
            params: self.params,
            basis,
            initial,
            stepper,
            t_end: self.t_end,
            record_every: self.record_every,
        })
    }

    /// Copy with every initial profile scaled by `sigma`.
    pub fn scaled_initial(&self, sigma: f64) -> Self {
        let scale = |p: &Profile| match p {
            Profile::Zero => Profile::Zero,
            Profile::SineMode { mode, amplitude } => Profile::SineMode {
                mode: *mode,
                amplitude: sigma * amplitude,
            },
            Profile::Bump { amplitude, power } => Profile::Bump {
                amplitude: sigma * amplitude,
                power: *power,
            },
            Profile::Coefficients { values } => Profile::Coefficients {
                values: values.iter().map(|v| sigma * v).collect(),
            },
        };
        let mut out = self.clone();
        out.initial = InitialData {
            displacement: scale(&self.initial.displacement),
            velocity: scale(&self.initial.velocity),
            temperature: scale(&self.initial.temperature),
        };
        out
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}
