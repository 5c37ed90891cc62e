//! Run configuration. Values come from command-line flags, then
//! `SPIKELOOM_*` environment variables (both collected into [`Overrides`]),
//! then a `key = value` config file, then built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use spikeloom::engine::{NeuronSpec, DEFAULT_DELTA_T};
use spikeloom::memory::MemorySetup;
use spikeloom::stream::{primes_scenario, CodeScheme, Scenario, StreamOp};

use crate::CliError;

pub const KEYS: [&str; 10] = [
    "scenario",
    "code",
    "model",
    "phases",
    "delta_t",
    "sigma",
    "seed",
    "out_raster",
    "out_svg",
    "report",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModelKind {
    /// Two-variable simple model, regular spiking.
    Sm,
    #[default]
    Lif,
}

impl ModelKind {
    pub fn spec(self) -> NeuronSpec {
        match self {
            ModelKind::Sm => NeuronSpec::simple_model(),
            ModelKind::Lif => NeuronSpec::lif(),
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sm" => Ok(ModelKind::Sm),
            "lif" => Ok(ModelKind::Lif),
            other => Err(format!("unknown model `{other}`, expected sm or lif")),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Sm => "sm",
            ModelKind::Lif => "lif",
        })
    }
}

/// Where transactions come from: the built-in `primes` stream or a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioSource {
    Primes,
    File(PathBuf),
}

impl FromStr for ScenarioSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            Err("empty scenario".into())
        } else if s == "primes" {
            Ok(ScenarioSource::Primes)
        } else {
            Ok(ScenarioSource::File(PathBuf::from(s)))
        }
    }
}

impl ScenarioSource {
    /// Operations and the code scheme the scenario asks for, if any.
    pub fn load(&self) -> Result<(Vec<StreamOp>, Option<CodeScheme>), CliError> {
        match self {
            ScenarioSource::Primes => Ok((primes_scenario(), None)),
            ScenarioSource::File(path) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                let s = Scenario::parse(&text).map_err(|source| CliError::Scenario {
                    path: path.clone(),
                    source,
                })?;
                Ok((s.ops, s.scheme))
            }
        }
    }
}

/// Parsed `key = value` file. Blank lines and `#` comments are ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::ConfigLine {
                path: origin.to_string(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if values
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(err(format!("duplicate key `{key}`")));
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse().map_err(|e: T::Err| CliError::ConfigValue {
                    key: key.to_string(),
                    message: e.to_string(),
                })
            })
            .transpose()
    }
}

/// Values given on the command line or through the environment.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub scenario: Option<ScenarioSource>,
    pub code: Option<CodeScheme>,
    pub model: Option<ModelKind>,
    pub phases: Option<usize>,
    pub delta_t: Option<u32>,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub out_raster: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSource,
    /// None defers to the scenario's own CODE line, then binary.
    pub code: Option<CodeScheme>,
    pub model: ModelKind,
    pub phases: usize,
    pub delta_t: u32,
    pub sigma: f64,
    pub seed: u64,
    pub out_raster: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: ScenarioSource::Primes,
            code: None,
            model: ModelKind::default(),
            phases: 5,
            delta_t: DEFAULT_DELTA_T,
            sigma: 0.0,
            seed: 0,
            out_raster: None,
            out_svg: None,
            report: None,
        }
    }
}

fn pick<T: FromStr>(
    over: Option<T>,
    file: Option<&ConfigFile>,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T::Err: fmt::Display,
{
    match (over, file) {
        (Some(v), _) => Ok(Some(v)),
        (None, Some(f)) => f.get(key),
        (None, None) => Ok(None),
    }
}

impl RunConfig {
    pub fn resolve(over: Overrides, file: Option<&ConfigFile>) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let cfg = RunConfig {
            scenario: pick(over.scenario, file, "scenario")?.unwrap_or(d.scenario),
            code: pick(over.code, file, "code")?,
            model: pick(over.model, file, "model")?.unwrap_or(d.model),
            phases: pick(over.phases, file, "phases")?.unwrap_or(d.phases),
            delta_t: pick(over.delta_t, file, "delta_t")?.unwrap_or(d.delta_t),
            sigma: pick(over.sigma, file, "sigma")?.unwrap_or(d.sigma),
            seed: pick(over.seed, file, "seed")?.unwrap_or(d.seed),
            out_raster: pick(over.out_raster, file, "out_raster")?,
            out_svg: pick(over.out_svg, file, "out_svg")?,
            report: pick(over.report, file, "report")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(CliError::ConfigValue {
                key: "sigma".into(),
                message: format!("must be finite and non-negative, got {}", self.sigma),
            });
        }
        for (key, path) in [
            ("out_raster", &self.out_raster),
            ("out_svg", &self.out_svg),
            ("report", &self.report),
        ] {
            let Some(path) = path else { continue };
            let parent = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            if !parent.is_dir() {
                return Err(CliError::ConfigValue {
                    key: key.into(),
                    message: format!("directory {} does not exist", parent.display()),
                });
            }
        }
        Ok(())
    }

    pub fn setup(&self) -> MemorySetup {
        MemorySetup {
            spec: self.model.spec(),
            phases: self.phases,
            delta_t: self.delta_t,
        }
    }
}
