//! Scenario files: what to solve, on which grid, and which checks gate the exit code.

use std::fs;
use std::path::{Path, PathBuf};

use greensolve::generator::{GeneratorDescriptor, GeneratorSpec};
use greensolve::harmonic::{SampledFunction, TrigPolynomial};
use greensolve::sets::SpectrumSet;
use greensolve::solver::builtins::{self, BUILTIN_NAMES};
use greensolve::solver::{ApOptions, PipelineInput, PipelineOptions};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InputSpec {
    Builtin(String),
    Trig(TrigPolynomial),
    /// Sampled input in the `SampledFunction` CSV layout.
    Csv(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Residual,
    Spectrum,
    Transform,
    Convolution,
    Ap,
}

fn default_checks() -> Vec<Check> {
    vec![Check::Residual, Check::Spectrum, Check::Transform]
}

fn default_h_list() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

fn default_n_max() -> usize {
    50
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSpec>,
    /// Admissible frequency set; the whole line when absent.
    #[serde(default, alias = "F", skip_serializing_if = "Option::is_none")]
    pub f_set: Option<SpectrumSet>,
    #[serde(default)]
    pub grid: PipelineOptions,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default = "default_h_list")]
    pub h_list: Vec<f64>,
    #[serde(default)]
    pub ap: ApOptions,
    /// Candidate solution for `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<PathBuf>,
    /// Spike count for the spike-train builtin.
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Scenario {
    /// Bare scenario for commands that run without a config file.
    pub fn named(name: &str) -> Self {
        serde_json::from_value(serde_json::json!({ "name": name })).expect("defaults deserialize")
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::config("Io", format!("{}: {e}", path.display())))?;
        let mut s: Scenario = serde_json::from_str(&text).map_err(|e| Failure::config("Json", format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        s.resolve_paths(base);
        s.validate()?;
        Ok(s)
    }

    /// Makes relative file references absolute against `base`, so the manifest copy runs anywhere.
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(InputSpec::Csv(p)) = &mut self.input {
            fix(p);
        }
        if let Some(p) = &mut self.solution {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.name.trim().is_empty() {
            return Err(Failure::config("Invalid", "scenario name is empty".into()));
        }
        let g = &self.grid;
        if !(g.t_max > 0.0 && g.step > 0.0 && g.n_near > 0 && g.t_lo < g.t_hi) {
            return Err(Failure::config("Invalid", "grid parameters must be positive with t_lo < t_hi".into()));
        }
        if let Some(InputSpec::Builtin(b)) = &self.input {
            if !BUILTIN_NAMES.contains(&b.as_str()) {
                return Err(Failure::config("Invalid", format!("unknown builtin {b:?}, expected one of {BUILTIN_NAMES:?}")));
            }
        }
        for p in self.csv_paths() {
            if !p.is_file() {
                return Err(Failure::config("Io", format!("file not found: {}", p.display())));
            }
        }
        Ok(())
    }

    fn csv_paths(&self) -> Vec<&Path> {
        let mut v = Vec::new();
        if let Some(InputSpec::Csv(p)) = &self.input {
            v.push(p.as_path());
        }
        if let Some(p) = &self.solution {
            v.push(p.as_path());
        }
        v
    }

    pub fn is_spike_train(&self) -> bool {
        matches!(&self.input, Some(InputSpec::Builtin(b)) if b == "spike_train")
    }

    pub fn has(&self, c: Check) -> bool {
        self.checks.contains(&c)
    }

    /// Generator, input and `F`, filling gaps from a builtin where one is named.
    pub fn problem(&self) -> Result<Problem, Failure> {
        let bi = match &self.input {
            Some(InputSpec::Builtin(name)) => match builtins::builtin(name) {
                Some(b) => Some(b.map_err(Failure::from_core)?),
                None => return Err(Failure::config("Invalid", format!("builtin {name:?} has no generator or input"))),
            },
            _ => None,
        };
        let generator = match (&self.generator, &bi) {
            (Some(d), _) => Some(d.build().map_err(Failure::from_core)?),
            (None, Some(b)) => Some(b.generator.clone()),
            (None, None) => None,
        };
        let input = match &self.input {
            None => None,
            Some(InputSpec::Builtin(_)) => bi.as_ref().map(|b| PipelineInput::Trig(b.input.clone())),
            Some(InputSpec::Trig(p)) => Some(PipelineInput::Trig(p.clone())),
            Some(InputSpec::Csv(path)) => Some(PipelineInput::Sampled(read_sampled(path)?)),
        };
        let f_set = match (&self.f_set, &bi) {
            (Some(f), _) => f.clone(),
            (None, Some(b)) => b.f_set.clone(),
            (None, None) => SpectrumSet::whole_line(),
        };
        Ok(Problem { generator, input, f_set })
    }
}

pub struct Problem {
    pub generator: Option<GeneratorSpec>,
    pub input: Option<PipelineInput>,
    pub f_set: SpectrumSet,
}

impl Problem {
    pub fn generator(&self) -> Result<&GeneratorSpec, Failure> {
        self.generator.as_ref().ok_or_else(|| Failure::config("Invalid", "scenario needs a generator".into()))
    }

    pub fn input(&self) -> Result<&PipelineInput, Failure> {
        self.input.as_ref().ok_or_else(|| Failure::config("Invalid", "scenario needs an input".into()))
    }
}

pub fn read_sampled(path: &Path) -> Result<SampledFunction, Failure> {
    let file = fs::File::open(path).map_err(|e| Failure::config("Io", format!("{}: {e}", path.display())))?;
    SampledFunction::read_csv(file).map_err(|e| Failure::config(e.kind(), format!("{}: {e}", path.display())))
}
