//! Run configuration: one TOML file per experiment.
//!
//! Every section is optional at parse time; each command asks for the
//! sections it needs and validation errors name the offending key path.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wavecauchy_core::domain::Domain;
use wavecauchy_core::kernel::KernelParams;
use wavecauchy_core::reconstruct::TargetPoint;
use wavecauchy_core::synth::{Azimuth, GroundTruth, ModeSpec, TimeGrid};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error at `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Option<DomainSection>,
    #[serde(default)]
    pub modes: Vec<ModeSection>,
    pub trace: Option<TraceSection>,
    pub fd: Option<FdSection>,
    pub kernel: Option<KernelSection>,
    pub targets: Option<TargetsSection>,
    pub sweep: Option<SweepSection>,
    pub stability: Option<StabilitySection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub kind: String,
    pub radius: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub m: Option<u32>,
    pub k: Option<u32>,
    pub n: Option<u32>,
    pub azimuth: Option<String>,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    pub n_boundary: Option<usize>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub n_time: Option<usize>,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub seed: u64,
    /// Trace CSV to read instead of generating one; relative to the config.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdSection {
    pub cells_per_unit: usize,
    #[serde(default = "half")]
    pub courant: f64,
    pub half_window: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub h: Option<f64>,
    pub n_s: Option<usize>,
    pub n_alpha: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsSection {
    #[serde(default)]
    pub points: Vec<[f64; 3]>,
    pub grid: Option<GridSection>,
}

/// `nx × ny` lattice over the domain's bounding box; points closer than
/// `margin` to the boundary are dropped.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub t: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub h_list: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    #[serde(default = "default_levels")]
    pub noise_levels: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: u64,
    /// Cone rotation for the partial-boundary functional; omitted means
    /// the cone faces the nearest boundary.
    pub alpha: Option<f64>,
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn default_margin() -> f64 {
    0.1
}
fn default_levels() -> Vec<f64> {
    vec![0.0, 1e-4, 1e-3, 1e-2]
}
fn default_seeds() -> u64 {
    8
}

fn require<T: Clone>(value: &Option<T>, key: &str) -> Result<T, ConfigError> {
    value.clone().ok_or_else(|| ConfigError::new(key, "missing"))
}

fn positive(value: f64, key: &str) -> Result<f64, ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ConfigError::new(key, format!("must be positive and finite, got {value}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let key = e.span().map(|s| locate(text, s.start)).unwrap_or_else(|| "<root>".into());
            ConfigError::new(key, e.message().to_string())
        })
    }

    pub fn domain(&self) -> Result<Domain, ConfigError> {
        let d = self.domain.as_ref().ok_or_else(|| ConfigError::new("domain", "missing section"))?;
        match d.kind.as_str() {
            "disk" => Ok(Domain::Disk { radius: positive(require(&d.radius, "domain.radius")?, "domain.radius")? }),
            "rect" => Ok(Domain::Rectangle {
                a: positive(require(&d.a, "domain.a")?, "domain.a")?,
                b: positive(require(&d.b, "domain.b")?, "domain.b")?,
            }),
            other => Err(ConfigError::new("domain.kind", format!("expected `disk` or `rect`, got `{other}`"))),
        }
    }

    pub fn mode_specs(&self) -> Result<Vec<ModeSpec>, ConfigError> {
        let domain = self.domain()?;
        if self.modes.is_empty() {
            return Err(ConfigError::new("modes", "at least one [[modes]] entry is required"));
        }
        self.modes
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let key = |field: &str| format!("modes[{i}].{field}");
                match domain {
                    Domain::Disk { .. } => {
                        let azimuth = match m.azimuth.as_deref().unwrap_or("cos") {
                            "cos" => Azimuth::Cos,
                            "sin" => Azimuth::Sin,
                            other => return Err(ConfigError::new(key("azimuth"), format!("expected `cos` or `sin`, got `{other}`"))),
                        };
                        if m.n.is_some() {
                            return Err(ConfigError::new(key("n"), "disk modes take `m` and `k`"));
                        }
                        Ok(ModeSpec::Disk {
                            m: require(&m.m, &key("m"))?,
                            k: require(&m.k, &key("k"))?,
                            azimuth,
                            amplitude: m.amplitude,
                            phase: m.phase,
                        })
                    }
                    Domain::Rectangle { .. } => {
                        if m.k.is_some() || m.azimuth.is_some() {
                            return Err(ConfigError::new(key("k"), "rectangle modes take `n` and `m`"));
                        }
                        Ok(ModeSpec::Rectangle {
                            n: require(&m.n, &key("n"))?,
                            m: require(&m.m, &key("m"))?,
                            amplitude: m.amplitude,
                            phase: m.phase,
                        })
                    }
                }
            })
            .collect()
    }

    pub fn ground_truth(&self) -> Result<GroundTruth, ConfigError> {
        let specs = self.mode_specs()?;
        GroundTruth::new(self.domain()?, &specs).map_err(|e| match e {
            wavecauchy_core::synth::SynthError::BadMode(i, msg) => ConfigError::new(format!("modes[{i}]"), msg),
            other => ConfigError::new("modes", other.to_string()),
        })
    }

    pub fn trace_section(&self) -> Result<&TraceSection, ConfigError> {
        self.trace.as_ref().ok_or_else(|| ConfigError::new("trace", "missing section"))
    }

    pub fn time_grid(&self) -> Result<TimeGrid, ConfigError> {
        let t = self.trace_section()?;
        let (t_min, t_max) = (require(&t.t_min, "trace.t_min")?, require(&t.t_max, "trace.t_max")?);
        let n = require(&t.n_time, "trace.n_time")?;
        TimeGrid::new(t_min, t_max, n).map_err(|_| ConfigError::new("trace", "need t_max > t_min and n_time >= 2"))
    }

    pub fn n_boundary(&self) -> Result<usize, ConfigError> {
        let n = require(&self.trace_section()?.n_boundary, "trace.n_boundary")?;
        if n < 4 {
            return Err(ConfigError::new("trace.n_boundary", "need at least 4 samples"));
        }
        Ok(n)
    }

    pub fn noise(&self) -> Result<(f64, u64), ConfigError> {
        let t = self.trace_section()?;
        if !(t.noise.is_finite() && t.noise >= 0.0) {
            return Err(ConfigError::new("trace.noise", "must be nonnegative"));
        }
        Ok((t.noise, t.seed))
    }

    /// Kernel parameters; `h` falls back to `default_h` when absent.
    pub fn kernel_params(&self, default_h: Option<f64>) -> Result<KernelParams, ConfigError> {
        let section = self.kernel.as_ref();
        let h = match section.and_then(|k| k.h).or(default_h) {
            Some(h) => positive(h, "kernel.h")?,
            None => return Err(ConfigError::new("kernel.h", "missing")),
        };
        let base = KernelParams::new(h).map_err(|e| ConfigError::new("kernel.h", e.to_string()))?;
        let n_s = section.and_then(|k| k.n_s).unwrap_or(base.n_s);
        let n_alpha = section.and_then(|k| k.n_alpha).unwrap_or(base.n_alpha);
        base.with_nodes(n_s, n_alpha).map_err(|e| {
            let key = if n_s < base.n_s { "kernel.n_s" } else { "kernel.n_alpha" };
            ConfigError::new(key, e.to_string())
        })
    }

    /// Explicit points followed by the lattice points, all inside `domain`.
    pub fn targets(&self, domain: Domain) -> Result<Vec<TargetPoint>, ConfigError> {
        let section = self.targets.as_ref().ok_or_else(|| ConfigError::new("targets", "missing section"))?;
        let mut out: Vec<TargetPoint> = Vec::new();
        for (i, p) in section.points.iter().enumerate() {
            if !p.iter().all(|v| v.is_finite()) || !domain.contains(p[0], p[1]) {
                return Err(ConfigError::new(format!("targets.points[{i}]"), "must be a finite point inside the domain"));
            }
            out.push(TargetPoint::new(p[0], p[1], p[2]));
        }
        if let Some(g) = &section.grid {
            if g.nx == 0 || g.ny == 0 {
                return Err(ConfigError::new("targets.grid", "nx and ny must be positive"));
            }
            let margin = positive(g.margin, "targets.grid.margin")?;
            let (x0, x1, y0, y1) = match domain {
                Domain::Disk { radius } => (-radius, radius, -radius, radius),
                Domain::Rectangle { a, b } => (0.0, a, 0.0, b),
            };
            let lerp = |lo: f64, hi: f64, i: usize, n: usize| {
                if n == 1 {
                    0.5 * (lo + hi)
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            };
            for j in 0..g.ny {
                for i in 0..g.nx {
                    let (x, y) = (lerp(x0, x1, i, g.nx), lerp(y0, y1, j, g.ny));
                    if domain.depth(x, y) >= margin {
                        out.push(TargetPoint::new(x, y, g.t));
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(ConfigError::new("targets", "no target points"));
        }
        Ok(out)
    }

    pub fn h_list(&self) -> Result<Vec<f64>, ConfigError> {
        let s = self.sweep.as_ref().ok_or_else(|| ConfigError::new("sweep", "missing section"))?;
        s.h_list
            .iter()
            .enumerate()
            .map(|(i, &h)| positive(h, &format!("sweep.h_list[{i}]")))
            .collect()
    }

    /// Trace file path resolved against the directory holding the config.
    pub fn trace_file(&self, config_dir: &Path) -> Option<PathBuf> {
        self.trace.as_ref().and_then(|t| t.file.as_ref()).map(|f| config_dir.join(f))
    }
}

/// Dotted key path of the TOML value that contains byte offset `pos`.
fn locate(text: &str, pos: usize) -> String {
    let before = &text[..pos.min(text.len())];
    let mut section = String::new();
    let mut key = None;
    for line in before.lines() {
        let line = line.trim();
        if let Some(name) = line.strip_prefix("[[").and_then(|l| l.strip_suffix("]]")) {
            section = name.trim().to_string();
            key = None;
        } else if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            key = None;
        } else if let Some((k, _)) = line.split_once('=') {
            key = Some(k.trim().to_string());
        }
    }
    // the offending line itself may hold the key
    let rest = &text[pos.min(text.len())..];
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let current = text[line_start..pos.min(text.len()) + rest.find('\n').unwrap_or(rest.len())].trim();
    if let Some((k, _)) = current.split_once('=') {
        key = Some(k.trim().to_string());
    }
    match (section.is_empty(), key) {
        (true, Some(k)) => k,
        (false, Some(k)) => format!("{section}.{k}"),
        (false, None) => section,
        (true, None) => "<root>".into(),
    }
}
