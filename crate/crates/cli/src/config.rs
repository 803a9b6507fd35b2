//! Run configuration: a TOML file with `[run]`, `[surface]`, `[displacement]`,
//! `[seed]` and `[tolerances]` sections, all keys flat.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SurfaceCheck,
    StrainCheck,
    SymmetryDemo,
    Reconstruct,
    Convergence,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SurfaceCheck => "surface-check",
            Self::StrainCheck => "strain-check",
            Self::SymmetryDemo => "symmetry-demo",
            Self::Reconstruct => "reconstruct",
            Self::Convergence => "convergence",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown format `{other}` (json, csv, both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub experiment: Experiment,
    #[serde(default = "default_grids")]
    pub grids: Vec<usize>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub negative_control: bool,
    /// Minimum number of boundary rings excluded from every norm; residuals
    /// with deeper stencils keep their own larger trim.
    #[serde(default)]
    pub trim: usize,
}

fn default_grids() -> Vec<usize> {
    vec![33, 65, 129]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A catalog surface with optional parameter overrides, or a CSV bundle
/// directory holding `a1.csv`, `a2.csv`, `hc.csv`, `kc.csv` (and optionally
/// `p.csv`, `q.csv`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub name: Option<String>,
    pub csv_dir: Option<PathBuf>,
    pub alpha: Option<[f64; 2]>,
    pub beta: Option<[f64; 2]>,
    pub radius: Option<f64>,
    pub rho: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub first_integral: Option<f64>,
    /// Multiplies H∘ after sampling; anything but 1 breaks the Gauss equation.
    pub hc_scale: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisplacementKind {
    Zero,
    Rigid,
    Inflation,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplacementSection {
    pub kind: DisplacementKind,
    #[serde(default)]
    pub translation: [f64; 3],
    #[serde(default)]
    pub rotation: [f64; 3],
    #[serde(default)]
    pub c: f64,
    /// Directory with `u.csv`, `v.csv`, `w.csv`.
    pub csv_dir: Option<PathBuf>,
    /// Amplitude a of the inconsistent injection ε₁ += a·sin α.
    pub inject_eps1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetrySource {
    /// The closed-form symmetry shipped with the catalog seed.
    #[default]
    Catalog,
    /// S ≡ `constant`.
    Constant,
    /// Elliptic solve with boundary data from the catalog symmetry.
    Solve,
    /// Elliptic solve with sin(πt) on the α = α₀ edge and zero elsewhere.
    Edge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    pub name: String,
    #[serde(default)]
    pub symmetry: SymmetrySource,
    #[serde(default = "one")]
    pub constant: f64,
    pub alpha: Option<[f64; 2]>,
    pub beta: Option<[f64; 2]>,
    pub rho: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub first_integral: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub order_min: f64,
    pub order_max: f64,
    /// Residuals at or below this L∞ pass regardless of observed order.
    pub floor: f64,
    /// Bound for residuals that a direct solve drives to rounding level.
    pub solver_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            order_min: 1.7,
            order_max: 2.3,
            floor: 1e-12,
            solver_residual: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    #[serde(default)]
    pub surface: SurfaceSection,
    pub displacement: Option<DisplacementSection>,
    pub seed: Option<SeedSection>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Smallest grid that survives the deepest boundary trim with points to spare.
pub const MIN_GRID: usize = 9;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let g = &self.run.grids;
        if g.is_empty() {
            return bad("grid list is empty".into());
        }
        if g.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("grid sizes must be strictly increasing, got {g:?}"));
        }
        if g[0] < MIN_GRID {
            return bad(format!("grid size {} below the minimum {MIN_GRID}", g[0]));
        }
        if 2 * self.run.trim + 3 > g[0] {
            return bad(format!(
                "trim {} leaves no interior on grid {}",
                self.run.trim, g[0]
            ));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("order_min", t.order_min),
            ("order_max", t.order_max),
            ("floor", t.floor),
            ("solver_residual", t.solver_residual),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if t.order_max < t.order_min {
            return bad("order_max is below order_min".into());
        }
        let s = &self.surface;
        if s.name.is_some() && s.csv_dir.is_some() {
            return bad("[surface] takes either `name` or `csv_dir`, not both".into());
        }
        let needs_surface = !matches!(self.run.experiment, Experiment::SymmetryDemo);
        if needs_surface && s.name.is_none() && s.csv_dir.is_none() {
            return bad(format!(
                "experiment {} needs [surface] name or csv_dir",
                self.run.experiment
            ));
        }
        if s.csv_dir.is_some() && g.len() > 1 {
            return bad("a CSV surface bundle fixes the grid; list a single grid size".into());
        }
        match self.run.experiment {
            Experiment::StrainCheck if self.displacement.is_none() => {
                return bad("strain-check needs a [displacement] section".into());
            }
            Experiment::SymmetryDemo if self.seed.is_none() => {
                return bad("symmetry-demo needs a [seed] section".into());
            }
            _ => {}
        }
        if let Some(d) = &self.displacement {
            if d.kind == DisplacementKind::Csv && d.csv_dir.is_none() {
                return bad("displacement kind `csv` needs csv_dir".into());
            }
            if d.kind == DisplacementKind::Csv && g.len() > 1 {
                return bad("CSV displacements fix the grid; list a single grid size".into());
            }
        }
        Ok(())
    }

    /// Applies command-line overrides and re-validates.
    pub fn with_overrides(
        mut self,
        out_dir: Option<PathBuf>,
        format: Option<OutputFormat>,
        grids: Option<Vec<usize>>,
        negative_control: bool,
    ) -> Result<Self, CliError> {
        if let Some(d) = out_dir {
            self.run.out_dir = d;
        }
        if let Some(f) = format {
            self.run.format = f;
        }
        if let Some(g) = grids {
            self.run.grids = g;
        }
        self.run.negative_control |= negative_control;
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_toml(
            r#"
            [run]
            experiment = "surface-check"
            [surface]
            name = "sphere"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.run.grids, vec![33, 65, 129]);
        assert_eq!(cfg.run.format, OutputFormat::Json);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert!(!cfg.run.negative_control);
    }

    #[test]
    fn rejects_bad_grids_and_tolerances() {
        let base = |extra: &str| {
            format!("[run]\nexperiment = \"surface-check\"\n{extra}\n[surface]\nname = \"plane\"\n")
        };
        assert!(RunConfig::from_toml(&base("grids = [65, 33]")).is_err());
        assert!(RunConfig::from_toml(&base("grids = [5, 9]")).is_err());
        assert!(RunConfig::from_toml(&base("grids = []")).is_err());
        let neg = base("") + "[tolerances]\nfloor = -1.0\n";
        assert!(RunConfig::from_toml(&neg).is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_missing_sections() {
        assert!(
            RunConfig::from_toml("[run]\nexperiment = \"surface-check\"\ncolour = 1\n").is_err()
        );
        assert!(RunConfig::from_toml(
            "[run]\nexperiment = \"strain-check\"\n[surface]\nname = \"sphere\"\n"
        )
        .is_err());
        assert!(RunConfig::from_toml("[run]\nexperiment = \"symmetry-demo\"\n").is_err());
        assert!(RunConfig::from_toml("[run]\nexperiment = \"dance\"\n").is_err());
    }

    #[test]
    fn overrides_are_validated() {
        let cfg = RunConfig::from_toml(
            "[run]\nexperiment = \"surface-check\"\n[surface]\nname = \"plane\"\n",
        )
        .unwrap();
        assert!(cfg
            .clone()
            .with_overrides(None, None, Some(vec![17, 17]), false)
            .is_err());
        let cfg = cfg
            .with_overrides(
                Some("x".into()),
                Some(OutputFormat::Both),
                Some(vec![17, 33]),
                true,
            )
            .unwrap();
        assert_eq!(cfg.run.grids, vec![17, 33]);
        assert!(cfg.run.negative_control);
        assert!(cfg.run.format.csv() && cfg.run.format.json());
    }
}
