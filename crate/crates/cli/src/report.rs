//! Residual norms per grid, observed orders, and pass/fail judgement.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use shell_compat::ScalarField;

use crate::config::{RunConfig, Tolerances};
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// What a residual is expected to do under refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Expectation {
    /// Finest observed order inside [min, max].
    OrderWindow { min: f64, max: f64 },
    /// Finest observed order at least `min`.
    OrderAtLeast { min: f64 },
    /// L∞ at most `tol` on every grid.
    AtMost { tol: f64 },
    /// Reported only.
    Informational,
}

impl Expectation {
    pub fn window(t: &Tolerances) -> Self {
        Self::OrderWindow {
            min: t.order_min,
            max: t.order_max,
        }
    }

    pub fn at_least(t: &Tolerances) -> Self {
        Self::OrderAtLeast { min: t.order_min }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridNorms {
    pub n: usize,
    pub linf: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub name: String,
    /// Boundary rings excluded from the norms.
    pub trim: usize,
    /// Norms are of the residual divided by this scale.
    pub scale: f64,
    pub expectation: Expectation,
    pub norms: Vec<GridNorms>,
    /// log₂ of successive L∞ ratios; absent with a single grid, null where a
    /// ratio is undefined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<Option<f64>>>,
    /// None when the expectation cannot be judged (order check on one grid).
    pub pass: Option<bool>,
}

impl ResidualSummary {
    fn judge(&mut self, floor: f64) {
        let linf: Vec<f64> = self.norms.iter().map(|g| g.linf).collect();
        self.orders = (linf.len() >= 2).then(|| {
            linf.windows(2)
                .map(|w| {
                    let o = (w[0] / w[1]).log2();
                    o.is_finite().then_some(o)
                })
                .collect()
        });
        let finest = *linf.last().unwrap_or(&f64::NAN);
        let last_order = self
            .orders
            .as_ref()
            .and_then(|o| o.last().copied().flatten());
        self.pass = match self.expectation {
            Expectation::Informational => None,
            Expectation::AtMost { tol } => Some(linf.iter().all(|v| *v <= tol)),
            _ if finest <= floor => Some(true),
            _ if linf.len() < 2 => None,
            Expectation::OrderWindow { min, max } => {
                Some(last_order.is_some_and(|o| (min..=max).contains(&o)))
            }
            Expectation::OrderAtLeast { min } => Some(last_order.is_some_and(|o| o >= min)),
        };
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub config: RunConfig,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub schema_version: u32,
    pub experiment: String,
    pub subject: String,
    pub grids: Vec<usize>,
    pub residuals: Vec<ResidualSummary>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub provenance: Provenance,
}

impl ResidualReport {
    pub fn residual(&self, name: &str) -> Option<&ResidualSummary> {
        self.residuals.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ResidualSummary> {
        self.residuals.iter().filter(|r| r.pass == Some(false))
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// JSON with the wall-time field zeroed, for comparing runs.
    pub fn to_json_without_timing(&self) -> Result<String, CliError> {
        let mut r = self.clone();
        r.provenance.wall_time_s = 0.0;
        r.to_json()
    }

    pub fn write_json(&self, dir: &Path) -> Result<PathBuf, CliError> {
        ensure_dir(dir)?;
        let path = dir.join("report.json");
        fs::write(&path, self.to_json()?).map_err(|e| output_error(&path, e))?;
        Ok(path)
    }
}

fn output_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Output {
        path: path.display().to_string(),
        source,
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| output_error(dir, e))
}

/// Accumulates residual norms grid by grid, optionally dumping each field as
/// `<name>_<n>.csv`.
pub struct Study {
    grids: Vec<usize>,
    floor: f64,
    min_trim: usize,
    csv_dir: Option<PathBuf>,
    entries: Vec<ResidualSummary>,
    notes: Vec<String>,
}

impl Study {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            grids: vec![],
            floor: cfg.tolerances.floor,
            min_trim: cfg.run.trim,
            csv_dir: cfg.run.format.csv().then(|| cfg.run.out_dir.clone()),
            entries: vec![],
            notes: vec![],
        }
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    /// Marks the start of grid `n`; records must follow in grid order.
    pub fn begin_grid(&mut self, n: usize) {
        if self.grids.last() != Some(&n) {
            self.grids.push(n);
        }
    }

    pub fn record(
        &mut self,
        name: &str,
        trim: usize,
        scale: f64,
        expectation: Expectation,
        field: &ScalarField,
    ) -> Result<(), CliError> {
        let n = *self.grids.last().expect("begin_grid before record");
        let trim = trim.max(self.min_trim);
        let scaled;
        let field = if scale != 1.0 {
            scaled = field / scale;
            &scaled
        } else {
            field
        };
        let norms = field.norms(trim)?;
        if let Some(dir) = &self.csv_dir {
            ensure_dir(dir)?;
            let path = dir.join(format!("{name}_{n}.csv"));
            let file = File::create(&path).map_err(|e| output_error(&path, e))?;
            field.write_csv(BufWriter::new(file))?;
        }
        let entry = match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => e,
            None => {
                self.entries.push(ResidualSummary {
                    name: name.to_string(),
                    trim,
                    scale,
                    expectation,
                    norms: vec![],
                    orders: None,
                    pass: None,
                });
                self.entries.last_mut().unwrap()
            }
        };
        entry.scale = entry.scale.max(scale);
        entry.norms.push(GridNorms {
            n,
            linf: norms.linf,
            l2: norms.l2,
        });
        Ok(())
    }

    /// Merges another study's residuals under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: Study) {
        for g in other.grids {
            if !self.grids.contains(&g) {
                self.grids.push(g);
            }
        }
        self.grids.sort_unstable();
        for mut e in other.entries {
            e.name = format!("{prefix}.{}", e.name);
            self.entries.push(e);
        }
        self.notes
            .extend(other.notes.into_iter().map(|n| format!("{prefix}: {n}")));
    }

    pub fn finish(
        mut self,
        experiment: &str,
        subject: String,
        cfg: &RunConfig,
        wall_time_s: f64,
    ) -> ResidualReport {
        for e in &mut self.entries {
            e.judge(self.floor);
        }
        let passed = self.entries.iter().all(|e| e.pass != Some(false));
        ResidualReport {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            subject,
            grids: self.grids,
            residuals: self.entries,
            notes: self.notes,
            passed,
            provenance: Provenance {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: cfg.clone(),
                wall_time_s,
            },
        }
    }
}
