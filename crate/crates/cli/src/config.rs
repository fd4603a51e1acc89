//! Run configuration, read from a TOML file. See `docs/config.md`.

use std::fmt;
use std::path::{Path, PathBuf};

use revtorus_core::{
    build_sphere_hyperbolic, build_standard_torus, RegionShape, Segment, SphereHyperbolicParams,
    StandardTorusParams, SurfaceProfile,
};
use serde::Deserialize;

/// Environment variable that overrides `output.directory`.
pub const OUT_ENV: &str = "REVTORUS_OUT";

/// Problems with the configuration itself; the CLI exits with status 1.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub analyze: AnalyzeOptions,
    #[serde(default)]
    pub curves: CurvesOptions,
    #[serde(default)]
    pub branch: BranchOptions,
    #[serde(default)]
    pub stability: StabilityOptions,
    #[serde(default)]
    pub profile: ProfileOptions,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceConfig {
    Standard(StandardTorusParams),
    SphereHyperbolic(SphereHyperbolicParams),
    Custom {
        #[serde(default = "custom_name")]
        name: String,
        segments: Vec<Segment>,
    },
}

fn custom_name() -> String {
    "custom".into()
}

impl SurfaceConfig {
    pub fn build(&self) -> anyhow::Result<SurfaceProfile> {
        let built = match self {
            SurfaceConfig::Standard(p) => build_standard_torus(*p),
            SurfaceConfig::SphereHyperbolic(p) => build_sphere_hyperbolic(*p),
            SurfaceConfig::Custom { name, segments } => SurfaceProfile::new(name.clone(), segments.clone()),
        };
        built.map_err(|e| bad(format!("surface: {e}")))
    }

    pub fn describe(&self) -> String {
        match self {
            SurfaceConfig::Standard(p) => format!("standard torus a = {}, r = {}", p.a, p.r),
            SurfaceConfig::SphereHyperbolic(p) => {
                format!("sphere/hyperbolic a = {}, t_star = {}, b = {}", p.a, p.t_star, p.b)
            }
            SurfaceConfig::Custom { name, segments } => format!("custom '{name}' with {} segments", segments.len()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Local error tolerance of the curve integrator.
    pub ode_tol: f64,
    /// Tolerance of closing-condition solves (disks, unduloids, branch).
    pub root_tol: f64,
    /// Finite-difference grid for exported spectra.
    pub eig_grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode_tol: 1e-10,
            root_tol: 1e-12,
            eig_grid: 2048,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("revtorus-out"),
            formats: vec![Format::Csv, Format::Svg],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeOptions {
    /// Abscissae in the metric table, spread uniformly over `[-t0, t0]`.
    pub samples: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { samples: 401 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveStart {
    /// Height of the starting t-maximum.
    pub t_max: f64,
    pub h: f64,
    /// Arc length to integrate.
    #[serde(default = "default_length")]
    pub length: f64,
}

fn default_length() -> f64 {
    20.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClosedSpec {
    Parallel { t: f64 },
    Vertical { theta: f64 },
    Disk { t_max: f64 },
    Unduloid { t_max: f64, h: f64 },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvesOptions {
    pub starts: Vec<CurveStart>,
    pub closed: Vec<ClosedSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BranchOptions {
    /// `T` range to trace; defaults to a window around the bifurcation.
    pub range: Option<[f64; 2]>,
    pub step: f64,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self { range: None, step: 0.01 }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct RegionSpec {
    #[serde(flatten)]
    pub shape: RegionShape,
    #[serde(default)]
    pub complement: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityOptions {
    pub regions: Vec<RegionSpec>,
    /// Branch step used when an unduloid region needs its branch.
    pub branch_step: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileOptions {
    pub n_areas: usize,
    pub samples: usize,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            n_areas: 200,
            samples: 160,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> anyhow::Result<()> {
        let t = &self.tolerances;
        if !(t.ode_tol > 0.0 && t.root_tol > 0.0) {
            return Err(bad("tolerances must be positive"));
        }
        if t.eig_grid < 128 {
            return Err(bad(format!("eig_grid {} below 128", t.eig_grid)));
        }
        if self.analyze.samples < 2 {
            return Err(bad("analyze.samples must be at least 2"));
        }
        if !(self.branch.step > 0.0) {
            return Err(bad("branch.step must be positive"));
        }
        if self.profile.n_areas < 16 {
            return Err(bad(format!("profile.n_areas {} below 16", self.profile.n_areas)));
        }
        if self.profile.samples < revtorus_core::profile::MIN_FAMILY_SAMPLES {
            return Err(bad(format!(
                "profile.samples {} below {}",
                self.profile.samples,
                revtorus_core::profile::MIN_FAMILY_SAMPLES
            )));
        }
        for c in &self.curves.starts {
            if !(c.length > 0.0) {
                return Err(bad("curve length must be positive"));
            }
        }
        Ok(())
    }

    /// Output directory: the explicit override, then the environment, then
    /// the config file.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        match std::env::var_os(OUT_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.output.directory.clone(),
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}
