//! Experiment runners. Each one sweeps the configured grids and collects
//! residual norms into a [`Study`].

use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::time::Instant;

use nalgebra::Vector3;
use shell_compat::frames::{
    analytic_frames, initial_frame, integrate_frames, orthonormality_defect, reconstruct_positions,
    weingarten_residual, Frame3, FrameField, VectorField3,
};
use shell_compat::integrable::default_cmc_first_integral as default_first_integral;
use shell_compat::integrable::{
    class_symmetry_components, geometry_from_seed, linearized_residual, pde_residual,
    solve_linearized_elliptic, strains_from_generic_symmetry, strains_from_symmetry, CatalogSeed,
    SeedSpec,
};
use shell_compat::strain::{
    cross_form_difference, full_strain_state, goldenweizer_matrix_residual, goldenweizer_residuals,
    lm_prime_difference, novozhilov_residuals, pq_deformed, rigid_displacement,
    tangential_compat_residuals, DisplacementField, RigidMotion,
};
use shell_compat::surface::{curvatures, gmc_residuals};
use shell_compat::{CatalogSurface, ScalarField, SurfaceGeometry};

use crate::config::{
    DisplacementKind, DisplacementSection, Experiment, RunConfig, SeedSection, SurfaceSection,
    SymmetrySource,
};
use crate::error::CliError;
use crate::report::{Expectation, ResidualReport, Study};

/// H∘ factor applied by the negative control of the geometric experiments.
pub const CONTROL_HC_SCALE: f64 = 1.1;
/// Amplitude of the ε₁ injection used by the strain negative control.
pub const CONTROL_EPS1_AMPLITUDE: f64 = 0.01;
/// Agreement required between the class strain formulas and the generic map.
const GENERIC_MAP_TOL: f64 = 1e-10;

/// Runs the configured experiment.
pub fn run(cfg: &RunConfig) -> Result<ResidualReport, CliError> {
    match cfg.run.experiment {
        Experiment::SurfaceCheck => run_surface_check(cfg),
        Experiment::StrainCheck => run_strain_check(cfg),
        Experiment::SymmetryDemo => run_symmetry_demo(cfg),
        Experiment::Reconstruct => run_reconstruct(cfg),
        Experiment::Convergence => run_convergence(cfg),
    }
}

/// Writes `report.json` when the format asks for it (CSV fields are written
/// while the study runs).
pub fn write_outputs(report: &ResidualReport, cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.run.format.json() {
        report.write_json(&cfg.run.out_dir)?;
    }
    Ok(())
}

pub fn run_surface_check(cfg: &RunConfig) -> Result<ResidualReport, CliError> {
    let start = Instant::now();
    let study = surface_study(cfg)?;
    Ok(study.finish(
        "surface-check",
        surface_label(&cfg.surface),
        cfg,
        elapsed(start),
    ))
}

pub fn run_strain_check(cfg: &RunConfig) -> Result<ResidualReport, CliError> {
    let start = Instant::now();
    let study = strain_study(cfg)?;
    Ok(study.finish(
        "strain-check",
        surface_label(&cfg.surface),
        cfg,
        elapsed(start),
    ))
}

pub fn run_symmetry_demo(cfg: &RunConfig) -> Result<ResidualReport, CliError> {
    let start = Instant::now();
    let study = symmetry_study(cfg)?;
    let label = cfg
        .seed
        .as_ref()
        .map_or_else(String::new, |s| s.name.clone());
    Ok(study.finish("symmetry-demo", label, cfg, elapsed(start)))
}

pub fn run_reconstruct(cfg: &RunConfig) -> Result<ResidualReport, CliError> {
    let start = Instant::now();
    let study = reconstruct_study(cfg)?;
    Ok(study.finish(
        "reconstruct",
        surface_label(&cfg.surface),
        cfg,
        elapsed(start),
    ))
}

/// Surface, reconstruction, and (when configured) strain and symmetry
/// studies in one report, residual names prefixed by family.
pub fn run_convergence(cfg: &RunConfig) -> Result<ResidualReport, CliError> {
    let start = Instant::now();
    let mut study = Study::new(cfg);
    study.absorb("surface", surface_study(cfg)?);
    study.absorb("reconstruct", reconstruct_study(cfg)?);
    if cfg.displacement.is_some() {
        study.absorb("strain", strain_study(cfg)?);
    }
    if cfg.seed.is_some() {
        study.absorb("symmetry", symmetry_study(cfg)?);
    }
    Ok(study.finish(
        "convergence",
        surface_label(&cfg.surface),
        cfg,
        elapsed(start),
    ))
}

fn elapsed(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

fn surface_label(s: &SurfaceSection) -> String {
    match (&s.name, &s.csv_dir) {
        (Some(n), _) => n.clone(),
        (None, Some(d)) => d.display().to_string(),
        _ => String::new(),
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn catalog_surface(s: &SurfaceSection) -> Result<CatalogSurface, CliError> {
    let name = s.name.as_deref().unwrap_or_default();
    let mut c = CatalogSurface::by_name(name).map_err(config_err)?;
    let unused = |key: &str| config_err(format!("`{key}` does not apply to surface `{name}`"));
    let pair = |p: [f64; 2]| (p[0], p[1]);
    match &mut c {
        CatalogSurface::Plane { alpha, beta } | CatalogSurface::Catenoid { alpha, beta } => {
            set(alpha, s.alpha.map(pair));
            set(beta, s.beta.map(pair));
        }
        CatalogSurface::Sphere { radius, theta, phi } => {
            set(radius, s.radius);
            set(theta, s.alpha.map(pair));
            set(phi, s.beta.map(pair));
        }
        CatalogSurface::PseudosphereKink { rho, x, y } => {
            set(rho, s.rho);
            set(x, s.alpha.map(pair));
            set(y, s.beta.map(pair));
        }
        CatalogSurface::CmcProfile {
            mean_curvature,
            first_integral,
            alpha,
            beta,
        } => {
            if let Some(h) = s.mean_curvature {
                *mean_curvature = h;
                *first_integral = default_first_integral(h);
            }
            set(first_integral, s.first_integral);
            set(alpha, s.alpha.map(pair));
            set(beta, s.beta.map(pair));
        }
    }
    let sphere = matches!(c, CatalogSurface::Sphere { .. });
    let kink = matches!(c, CatalogSurface::PseudosphereKink { .. });
    let cmc = matches!(c, CatalogSurface::CmcProfile { .. });
    if s.radius.is_some() && !sphere {
        return Err(unused("radius"));
    }
    if s.rho.is_some() && !kink {
        return Err(unused("rho"));
    }
    if (s.mean_curvature.is_some() || s.first_integral.is_some()) && !cmc {
        return Err(unused("mean_curvature/first_integral"));
    }
    Ok(c)
}

fn set<T>(dst: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *dst = v;
    }
}

fn read_field(dir: &Path, name: &str) -> Result<ScalarField, CliError> {
    let path = dir.join(name);
    let file = File::open(&path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    Ok(ScalarField::read_csv(BufReader::new(file))?)
}

/// Geometry on an n×n grid, or from the CSV bundle (which fixes the grid).
fn build_surface(cfg: &RunConfig, n: usize, hc_scale: f64) -> Result<SurfaceGeometry, CliError> {
    let s = &cfg.surface;
    let geom = match &s.csv_dir {
        Some(dir) => {
            let a1 = read_field(dir, "a1.csv")?;
            let a2 = read_field(dir, "a2.csv")?;
            let hc = read_field(dir, "hc.csv")?;
            let kc = read_field(dir, "kc.csv")?;
            if dir.join("p.csv").exists() && dir.join("q.csv").exists() {
                let p = read_field(dir, "p.csv")?;
                let q = read_field(dir, "q.csv")?;
                SurfaceGeometry::new(a1, a2, p, q, hc, kc)?
            } else {
                SurfaceGeometry::from_metric_and_normal(a1, a2, hc, kc)?
            }
        }
        None => catalog_surface(s)?.build(n, n)?,
    };
    Ok(if hc_scale != 1.0 {
        geom.with_scaled_hc(hc_scale)
    } else {
        geom
    })
}

fn geometric_hc_scale(cfg: &RunConfig) -> f64 {
    match cfg.surface.hc_scale {
        Some(f) => f,
        None if cfg.run.negative_control => CONTROL_HC_SCALE,
        None => 1.0,
    }
}

/// Grid size actually used (a CSV bundle overrides the configured size).
fn grid_size(geom: &SurfaceGeometry) -> usize {
    geom.grid().n_alpha()
}

fn surface_study(cfg: &RunConfig) -> Result<Study, CliError> {
    let t = &cfg.tolerances;
    let scale = geometric_hc_scale(cfg);
    let mut study = Study::new(cfg);
    if scale != 1.0 {
        study.note(format!("H∘ scaled by {scale}"));
    }
    for &n in &cfg.run.grids {
        let geom = build_surface(cfg, n, scale)?;
        study.begin_grid(grid_size(&geom));
        let gmc = gmc_residuals(&geom);
        for (name, f) in [
            ("gauss", &gmc.gauss),
            ("codazzi1", &gmc.codazzi1),
            ("codazzi2", &gmc.codazzi2),
        ] {
            study.record(name, 2, 1.0, Expectation::window(t), f)?;
        }
        let c = curvatures(&geom);
        study.record(
            "mean_curvature",
            0,
            1.0,
            Expectation::Informational,
            &c.mean,
        )?;
        study.record(
            "gaussian_curvature",
            0,
            1.0,
            Expectation::Informational,
            &c.gauss,
        )?;
    }
    Ok(study)
}

fn frames_for(geom: &SurfaceGeometry) -> Result<(FrameField, VectorField3), CliError> {
    if let Some(fr) = analytic_frames(geom) {
        return Ok(fr);
    }
    let phi0 = initial_frame(geom).unwrap_or_else(Frame3::identity);
    let out = integrate_frames(geom, phi0)?;
    let r = reconstruct_positions(geom, &out.frames, Vector3::zeros())?;
    Ok((out.frames, r))
}

fn displacement_for(
    d: &DisplacementSection,
    geom: &SurfaceGeometry,
) -> Result<DisplacementField, CliError> {
    let grid = *geom.grid();
    Ok(match d.kind {
        DisplacementKind::Zero => DisplacementField::zeros(grid),
        DisplacementKind::Inflation => DisplacementField::inflation(grid, d.c),
        DisplacementKind::Rigid => {
            let (frames, r) = frames_for(geom)?;
            let motion = RigidMotion {
                translation: Vector3::from(d.translation),
                rotation: Vector3::from(d.rotation),
            };
            rigid_displacement(&frames, &r, &motion)?
        }
        DisplacementKind::Csv => {
            let dir = d.csv_dir.as_deref().expect("validated");
            let disp = DisplacementField::new(
                read_field(dir, "u.csv")?,
                read_field(dir, "v.csv")?,
                read_field(dir, "w.csv")?,
            )?;
            if disp.grid() != geom.grid() {
                return Err(config_err(
                    "displacement CSV grid differs from the surface grid",
                ));
            }
            disp
        }
    })
}

fn strain_study(cfg: &RunConfig) -> Result<Study, CliError> {
    let t = &cfg.tolerances;
    let d = cfg
        .displacement
        .as_ref()
        .ok_or_else(|| config_err("missing [displacement]"))?;
    let inject = match d.inject_eps1 {
        Some(a) => a,
        None if cfg.run.negative_control => CONTROL_EPS1_AMPLITUDE,
        None => 0.0,
    };
    let mut study = Study::new(cfg);
    if inject != 0.0 {
        study.note(format!(
            "inconsistent strain injected: eps1 += {inject}·sin α"
        ));
    }
    // Strains of a rigid motion (or of nothing) must vanish; others are reported.
    let strain_expect = match d.kind {
        DisplacementKind::Rigid | DisplacementKind::Zero => Expectation::at_least(t),
        _ => Expectation::Informational,
    };
    let converge = Expectation::at_least(t);
    for &n in &cfg.run.grids {
        let geom = build_surface(cfg, n, cfg.surface.hc_scale.unwrap_or(1.0))?;
        study.begin_grid(grid_size(&geom));
        let disp = displacement_for(d, &geom)?;
        let out = full_strain_state(&geom, &disp)?;
        let (state, pq) = if inject != 0.0 {
            let mut s = out.state;
            s.eps1 = &s.eps1 + &ScalarField::from_fn(*geom.grid(), |a, _| inject * a.sin());
            pq_deformed(&geom, s)?
        } else {
            (out.state, out.pq)
        };
        let scale = state.scale();
        for (k, (name, f)) in state.six_strains().into_iter().enumerate() {
            study.record(name, if k < 3 { 1 } else { 2 }, 1.0, strain_expect, f)?;
        }
        study.record("tau_mismatch", 2, scale, converge, &out.tau_mismatch)?;
        for (name, f) in [
            ("p_mismatch", &pq.p_mismatch),
            ("q_mismatch", &pq.q_mismatch),
            ("p_regrouped_mismatch", &pq.p_regrouped_mismatch),
            ("q_regrouped_mismatch", &pq.q_regrouped_mismatch),
        ] {
            study.record(name, 2, scale, converge, f)?;
        }
        let tc = tangential_compat_residuals(&geom, &state);
        for (name, f) in ["tangential1", "tangential2", "tangential3"]
            .into_iter()
            .zip(tc.fields())
        {
            study.record(name, 2, scale, converge, f)?;
        }
        study.record(
            "lm_prime_difference",
            2,
            scale,
            converge,
            &lm_prime_difference(&geom, &state),
        )?;
        let gw = goldenweizer_residuals(&geom, &state);
        for (name, f) in ["goldenweizer1", "goldenweizer2", "goldenweizer3"]
            .into_iter()
            .zip(gw.fields())
        {
            study.record(name, 3, scale, converge, f)?;
        }
        let gm = goldenweizer_matrix_residual(&geom, &state);
        study.record("goldenweizer_matrix", 3, scale, converge, &gm)?;
        let nv = novozhilov_residuals(&geom, &state);
        for (name, f) in ["novozhilov1", "novozhilov2", "novozhilov3"]
            .into_iter()
            .zip(nv.fields())
        {
            study.record(name, 3, scale, converge, f)?;
        }
        let eq = cross_form_difference(&geom, &state);
        for (name, f) in ["cross_form1", "cross_form2", "cross_form3"]
            .into_iter()
            .zip(eq.fields())
        {
            study.record(name, 3, scale, converge, f)?;
        }
    }
    Ok(study)
}

fn seed_spec(s: &SeedSection) -> Result<SeedSpec, CliError> {
    let mut spec = SeedSpec::by_name(&s.name).map_err(config_err)?;
    let pair = |p: [f64; 2]| (p[0], p[1]);
    let unused = |key: &str| config_err(format!("`{key}` does not apply to seed `{}`", s.name));
    match &mut spec {
        SeedSpec::CatenoidLogCosh { alpha, beta } => {
            set(alpha, s.alpha.map(pair));
            set(beta, s.beta.map(pair));
        }
        SeedSpec::SgKink { rho, x, y } => {
            set(rho, s.rho);
            set(x, s.alpha.map(pair));
            set(y, s.beta.map(pair));
        }
        SeedSpec::CmcOdeProfile {
            mean_curvature,
            first_integral,
            alpha,
            beta,
        } => {
            if let Some(h) = s.mean_curvature {
                *mean_curvature = h;
                *first_integral = default_first_integral(h);
            }
            set(first_integral, s.first_integral);
            set(alpha, s.alpha.map(pair));
            set(beta, s.beta.map(pair));
        }
    }
    if s.rho.is_some() && !matches!(spec, SeedSpec::SgKink { .. }) {
        return Err(unused("rho"));
    }
    if (s.mean_curvature.is_some() || s.first_integral.is_some())
        && !matches!(spec, SeedSpec::CmcOdeProfile { .. })
    {
        return Err(unused("mean_curvature/first_integral"));
    }
    Ok(spec)
}

fn edge_data(catalog: &CatalogSeed) -> ScalarField {
    let grid = *catalog.seed.grid();
    let (b0, b1) = grid.beta_range();
    ScalarField::from_index_fn(grid, |i, j| {
        if i == 0 {
            (std::f64::consts::PI * (grid.beta(j) - b0) / (b1 - b0)).sin()
        } else {
            0.0
        }
    })
}

fn symmetry_study(cfg: &RunConfig) -> Result<Study, CliError> {
    let t = &cfg.tolerances;
    let s = cfg
        .seed
        .as_ref()
        .ok_or_else(|| config_err("missing [seed]"))?;
    let spec = seed_spec(s)?;
    let source = if cfg.run.negative_control {
        SymmetrySource::Constant
    } else {
        s.symmetry
    };
    let constant = if cfg.run.negative_control {
        1.0
    } else {
        s.constant
    };
    let solved = matches!(source, SymmetrySource::Solve | SymmetrySource::Edge);
    let mut study = Study::new(cfg);
    if cfg.run.negative_control {
        study.note("symmetry replaced by S ≡ 1");
    }
    let window = Expectation::window(t);
    // A direct solve drives the discrete linearized residual to rounding level.
    let lin_expect = if solved {
        Expectation::AtMost {
            tol: t.solver_residual,
        }
    } else {
        window
    };
    // Strains built on a solved symmetry inherit its O(h²) discretization error
    // as well as their own; only a lower bound on the order is meaningful.
    let strain_expect = if solved {
        Expectation::at_least(t)
    } else {
        window
    };
    for &n in &cfg.run.grids {
        let catalog = spec.build(n, n)?;
        study.begin_grid(n);
        let seed = &catalog.seed;
        let sym = match source {
            SymmetrySource::Catalog => catalog.symmetry.clone(),
            SymmetrySource::Constant => ScalarField::constant(*seed.grid(), constant),
            SymmetrySource::Solve | SymmetrySource::Edge => {
                let bc = if source == SymmetrySource::Edge {
                    edge_data(&catalog)
                } else {
                    catalog.symmetry.clone()
                };
                let sol = solve_linearized_elliptic(seed, &bc)?;
                study.note(format!(
                    "n = {n}: condition estimate {:.3e}",
                    sol.condition_estimate
                ));
                sol.symmetry.s
            }
        };
        study.record("pde", 1, 1.0, window, &pde_residual(seed))?;
        study.record(
            "linearized",
            1,
            1.0,
            lin_expect,
            &linearized_residual(seed, &sym)?,
        )?;
        if source == SymmetrySource::Solve {
            study.record(
                "symmetry_error",
                0,
                1.0,
                window,
                &(&sym - &catalog.symmetry),
            )?;
        }
        let geom = geometry_from_seed(seed)?;
        let gmc = gmc_residuals(&geom);
        for (name, f) in [
            ("gauss", &gmc.gauss),
            ("codazzi1", &gmc.codazzi1),
            ("codazzi2", &gmc.codazzi2),
        ] {
            study.record(name, 2, 1.0, window, f)?;
        }
        let state = strains_from_symmetry(seed, &sym)?;
        // The class formulas and the generic variation map must give the same strains.
        let comps = class_symmetry_components(seed, &sym)?;
        let (e1, e2, k1, k2) = strains_from_generic_symmetry(&geom, &comps)?;
        let diff = [
            (&e1, &state.eps1),
            (&e2, &state.eps2),
            (&k1, &state.k1),
            (&k2, &state.k2),
        ]
        .into_iter()
        .map(|(a, b)| (a - b).abs())
        .reduce(|a, b| a.zip_with(&b, f64::max))
        .expect("four fields");
        study.record(
            "generic_map_difference",
            0,
            state.scale(),
            Expectation::AtMost {
                tol: GENERIC_MAP_TOL,
            },
            &diff,
        )?;
        let scale = state.scale();
        let gw = goldenweizer_residuals(&geom, &state);
        for (name, f) in ["goldenweizer1", "goldenweizer2", "goldenweizer3"]
            .into_iter()
            .zip(gw.fields())
        {
            study.record(name, 2, scale, strain_expect, f)?;
        }
        let gm = goldenweizer_matrix_residual(&geom, &state);
        study.record("goldenweizer_matrix", 2, scale, strain_expect, &gm)?;
    }
    Ok(study)
}

fn reconstruct_study(cfg: &RunConfig) -> Result<Study, CliError> {
    let t = &cfg.tolerances;
    let scale = geometric_hc_scale(cfg);
    let mut study = Study::new(cfg);
    if scale != 1.0 {
        study.note(format!("H∘ scaled by {scale}"));
    }
    let converge = Expectation::at_least(t);
    for &n in &cfg.run.grids {
        let geom = build_surface(cfg, n, scale)?;
        study.begin_grid(grid_size(&geom));
        let exact = analytic_frames(&geom);
        let phi0 = initial_frame(&geom).unwrap_or_else(Frame3::identity);
        let out = integrate_frames(&geom, phi0)?;
        study.record("closure", 0, 1.0, converge, &out.closure)?;
        let r0 = exact
            .as_ref()
            .map_or_else(Vector3::zeros, |(_, r)| r.at(0, 0));
        let r = reconstruct_positions(&geom, &out.frames, r0)?;
        if let Some((frames, r_exact)) = &exact {
            let pos = r.zip_map(r_exact, |a, b| a - b).norm();
            let at_least_two = Expectation::OrderAtLeast {
                min: t.order_min.max(2.0),
            };
            study.record("position_error", 0, 1.0, at_least_two, &pos)?;
            let ferr = ScalarField::new(
                *geom.grid(),
                out.frames
                    .matrices()
                    .iter()
                    .zip(frames.matrices())
                    .map(|(a, b)| (a - b).norm())
                    .collect(),
            )?;
            study.record("frame_error", 0, 1.0, converge, &ferr)?;
        }
        let defect = ScalarField::new(
            *geom.grid(),
            out.frames
                .matrices()
                .iter()
                .map(orthonormality_defect)
                .collect(),
        )?;
        study.record(
            "orthonormality",
            0,
            1.0,
            Expectation::AtMost { tol: 1e-10 },
            &defect,
        )?;
        let (w1, w2) = weingarten_residual(&geom, &out.frames, &r)?;
        study.record("weingarten1", 1, 1.0, converge, &w1)?;
        study.record("weingarten2", 1, 1.0, converge, &w2)?;
    }
    Ok(study)
}
