//! Integrable Gauss equations (Liouville, elliptic sinh-Gordon, sine-Gordon),
//! their linearizations, and the map from a symmetry S to a compatible strain
//! state with ω = τ = 0.

use std::f64::consts::FRAC_PI_2;

use crate::banded::BandMatrix;
use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField};
use crate::strain::{pq_deformed, StrainState};
use crate::surface::{check_kink_range, kink_angle, SurfaceGeometry, CHART_MARGIN};

/// Which Gauss equation the seed solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedClass {
    /// u_αα + u_ββ = e^{−2u}
    Minimal,
    /// u_αα + u_ββ + 4ℋ² sinh u cosh u = 0
    Cmc { mean_curvature: f64 },
    /// u_xx − u_yy = sin u cos u / ρ²
    Pseudospherical { rho: f64 },
}

impl SeedClass {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Minimal => "minimal",
            Self::Cmc { .. } => "cmc",
            Self::Pseudospherical { .. } => "pseudospherical",
        }
    }
}

/// A solution u of one of the integrable Gauss equations, sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrableSeed {
    class: SeedClass,
    u: ScalarField,
    note: String,
}

impl IntegrableSeed {
    pub fn new(class: SeedClass, u: ScalarField, note: impl Into<String>) -> Result<Self> {
        let u = u.ensure_finite("u")?;
        match class {
            SeedClass::Minimal => {}
            SeedClass::Cmc { mean_curvature } => {
                if mean_curvature == 0.0 || !mean_curvature.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "CMC seed needs a nonzero mean curvature, got {mean_curvature}"
                    )));
                }
            }
            SeedClass::Pseudospherical { rho } => {
                if !(rho > 0.0) {
                    return Err(Error::InvalidParameter(format!("pseudosphere ρ = {rho}")));
                }
                let (lo, hi) = (CHART_MARGIN, FRAC_PI_2 - CHART_MARGIN);
                if let Some(bad) = u.values().iter().find(|v| !(lo..=hi).contains(*v)) {
                    return Err(Error::InvalidParameter(format!(
                        "pseudospherical angle {bad} outside [{lo}, π/2 − {CHART_MARGIN}]"
                    )));
                }
            }
        }
        Ok(Self {
            class,
            u,
            note: note.into(),
        })
    }

    pub fn class(&self) -> SeedClass {
        self.class
    }

    pub fn u(&self) -> &ScalarField {
        &self.u
    }

    pub fn note(&self) -> &str {
        &self.note
    }

    pub fn grid(&self) -> &Grid2D {
        self.u.grid()
    }

    /// Same class, different u (not validated against the chart limits).
    fn with_u(&self, u: ScalarField) -> Self {
        Self {
            class: self.class,
            u,
            note: self.note.clone(),
        }
    }
}

/// Optional variations of A₁, A₂, κ₁, κ₂ induced by S.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryComponents {
    pub s_a1: ScalarField,
    pub s_a2: ScalarField,
    pub s_kappa1: ScalarField,
    pub s_kappa2: ScalarField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryField {
    pub s: ScalarField,
    pub components: Option<SymmetryComponents>,
}

impl SymmetryField {
    pub fn new(s: ScalarField) -> Self {
        Self {
            s,
            components: None,
        }
    }
}

/// Residual of the seed's Gauss equation, second derivatives by compact
/// 3-point differences.
pub fn pde_residual(seed: &IntegrableSeed) -> ScalarField {
    residual_of(seed.class, &seed.u)
}

fn residual_of(class: SeedClass, u: &ScalarField) -> ScalarField {
    match class {
        SeedClass::Minimal => u.diff2_alpha() + &u.diff2_beta() - &u.map(|v| (-2.0 * v).exp()),
        SeedClass::Cmc { mean_curvature: h } => {
            u.diff2_alpha() + &u.diff2_beta() + &u.map(|v| 4.0 * h * h * v.sinh() * v.cosh())
        }
        SeedClass::Pseudospherical { rho } => {
            u.diff2_alpha() - &u.diff2_beta() - &u.map(|v| v.sin() * v.cos() / (rho * rho))
        }
    }
}

/// The potential c(u) of the linearized equation.
fn linear_coefficient(class: SeedClass, u: &ScalarField) -> ScalarField {
    match class {
        SeedClass::Minimal => u.map(|v| 2.0 * (-2.0 * v).exp()),
        SeedClass::Cmc { mean_curvature: h } => u.map(|v| 4.0 * h * h * (2.0 * v).cosh()),
        SeedClass::Pseudospherical { rho } => u.map(|v| -(2.0 * v).cos() / (rho * rho)),
    }
}

/// Residual of the linearized equation at the seed; zero up to truncation
/// error exactly when S is a symmetry.
pub fn linearized_residual(seed: &IntegrableSeed, s: &ScalarField) -> Result<ScalarField> {
    s.ensure_same_grid(&seed.u)?;
    let c = linear_coefficient(seed.class, &seed.u);
    let lap = match seed.class {
        SeedClass::Pseudospherical { .. } => s.diff2_alpha() - &s.diff2_beta(),
        _ => s.diff2_alpha() + &s.diff2_beta(),
    };
    Ok(lap + &(&c * s))
}

/// R(u + εS) − R(u): the change in the PDE residual under a perturbation along
/// S. For a symmetry it is O(ε²); subtracting R(u) removes the truncation error
/// of the seed itself.
pub fn perturbation_residual(
    seed: &IntegrableSeed,
    s: &ScalarField,
    eps: f64,
) -> Result<ScalarField> {
    s.ensure_same_grid(&seed.u)?;
    let perturbed = seed.with_u(&seed.u + &(s * eps));
    Ok(pde_residual(&perturbed) - &pde_residual(seed))
}

/// Surface coefficients the seed describes; p and q by finite differences.
pub fn geometry_from_seed(seed: &IntegrableSeed) -> Result<SurfaceGeometry> {
    let u = &seed.u;
    let (a1, a2, hc, kc) = match seed.class {
        SeedClass::Minimal => (
            u.map(f64::exp),
            u.map(f64::exp),
            u.map(|v| (-v).exp()),
            u.map(|v| -(-v).exp()),
        ),
        SeedClass::Cmc { mean_curvature: h } => (
            u.map(f64::exp),
            u.map(f64::exp),
            u.map(|v| -2.0 * h * v.sinh()),
            u.map(|v| -2.0 * h * v.cosh()),
        ),
        SeedClass::Pseudospherical { rho } => (
            u.map(f64::cos),
            u.map(f64::sin),
            u.map(|v| -v.sin() / rho),
            u.map(|v| v.cos() / rho),
        ),
    };
    SurfaceGeometry::from_metric_and_normal(a1, a2, hc, kc)
}

/// ε₁, ε₂, k₁, k₂ for a symmetry S, by the class formulas.
fn class_strains(
    seed: &IntegrableSeed,
    s: &ScalarField,
) -> (ScalarField, ScalarField, ScalarField, ScalarField) {
    let u = &seed.u;
    match seed.class {
        SeedClass::Minimal => {
            let k = s * &u.map(|v| (-2.0 * v).exp());
            (s.clone(), s.clone(), k.clone(), -k)
        }
        SeedClass::Cmc { mean_curvature: h } => {
            let k1 = s * &u.map(|v| 2.0 * h * (-v).exp() * v.cosh());
            let k2 = s * &u.map(|v| 2.0 * h * (-v).exp() * v.sinh());
            (s.clone(), s.clone(), k1, k2)
        }
        SeedClass::Pseudospherical { rho } => {
            let eps1 = -(s * &u.map(f64::tan));
            let eps2 = s * &u.map(|v| 1.0 / v.tan());
            let k = s / rho;
            (eps1, eps2, k.clone(), k)
        }
    }
}

/// Strain state with ω = ω₁ = ω₂ = τ = ϑ = ψ = 0 built from a symmetry S of
/// the seed. P, Q, H∘′, K∘′ are filled in from the strains on the seed's
/// geometry.
///
/// The construction only yields compatible strains when S actually solves the
/// linearized equation; callers should check [`linearized_residual`].
pub fn strains_from_symmetry(seed: &IntegrableSeed, s: &ScalarField) -> Result<StrainState> {
    s.ensure_same_grid(&seed.u)?;
    let geom = geometry_from_seed(seed)?;
    let (eps1, eps2, k1, k2) = class_strains(seed, s);
    symmetric_state(&geom, eps1, eps2, k1, k2)
}

fn symmetric_state(
    geom: &SurfaceGeometry,
    eps1: ScalarField,
    eps2: ScalarField,
    k1: ScalarField,
    k2: ScalarField,
) -> Result<StrainState> {
    let mut state = StrainState::zeros(*geom.grid());
    state.eps1 = eps1.ensure_finite("eps1")?;
    state.eps2 = eps2.ensure_finite("eps2")?;
    state.k1 = k1.ensure_finite("k1")?;
    state.k2 = k2.ensure_finite("k2")?;
    Ok(pq_deformed(geom, state)?.0)
}

/// The variations (S_A₁, S_A₂, S_κ₁, S_κ₂) that S induces through the class
/// ansatz.
pub fn class_symmetry_components(seed: &IntegrableSeed, s: &ScalarField) -> Result<SymmetryField> {
    s.ensure_same_grid(&seed.u)?;
    let u = &seed.u;
    let components = match seed.class {
        SeedClass::Minimal => {
            let e2 = s * &u.map(|v| 2.0 * (-2.0 * v).exp());
            let sa = s * &u.map(f64::exp);
            SymmetryComponents {
                s_a1: sa.clone(),
                s_a2: sa,
                s_kappa1: e2.clone(),
                s_kappa2: -e2,
            }
        }
        SeedClass::Cmc { mean_curvature: h } => {
            let e2 = s * &u.map(|v| 2.0 * h * (-2.0 * v).exp());
            let sa = s * &u.map(f64::exp);
            SymmetryComponents {
                s_a1: sa.clone(),
                s_a2: sa,
                s_kappa1: e2.clone(),
                s_kappa2: -e2,
            }
        }
        SeedClass::Pseudospherical { rho } => SymmetryComponents {
            s_a1: -(s * &u.map(f64::sin)),
            s_a2: s * &u.map(f64::cos),
            s_kappa1: s * &u.map(|v| 1.0 / (rho * v.cos().powi(2))),
            s_kappa2: s * &u.map(|v| 1.0 / (rho * v.sin().powi(2))),
        },
    };
    Ok(SymmetryField {
        s: s.clone(),
        components: Some(components),
    })
}

/// ε₁ = S_A₁/A₁, ε₂ = S_A₂/A₂, k₁ = S_κ₁ + ε₁κ₁, k₂ = S_κ₂ + ε₂κ₂.
pub fn strains_from_generic_symmetry(
    geom: &SurfaceGeometry,
    sym: &SymmetryField,
) -> Result<(ScalarField, ScalarField, ScalarField, ScalarField)> {
    let c = sym.components.as_ref().ok_or_else(|| {
        Error::InvalidParameter("symmetry has no A/κ variation components".into())
    })?;
    for f in [&c.s_a1, &c.s_a2, &c.s_kappa1, &c.s_kappa2] {
        f.ensure_same_grid(&geom.a1)?;
    }
    let eps1 = &c.s_a1 / &geom.a1;
    let eps2 = &c.s_a2 / &geom.a2;
    let kappa1 = -(&geom.hc / &geom.a1);
    let kappa2 = -(&geom.kc / &geom.a2);
    let k1 = &c.s_kappa1 + &(&eps1 * &kappa1);
    let k2 = &c.s_kappa2 + &(&eps2 * &kappa2);
    Ok((eps1, eps2, k1, k2))
}

/// Strain state from the generic symmetry map, ω = τ = 0.
pub fn strain_state_from_generic_symmetry(
    geom: &SurfaceGeometry,
    sym: &SymmetryField,
) -> Result<StrainState> {
    let (eps1, eps2, k1, k2) = strains_from_generic_symmetry(geom, sym)?;
    symmetric_state(geom, eps1, eps2, k1, k2)
}

/// Largest acceptable condition estimate of the discrete linearized operator.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct EllipticSolution {
    pub symmetry: SymmetryField,
    pub condition_estimate: f64,
}

/// Solves S_αα + S_ββ + c S = 0 with Dirichlet data taken from the boundary
/// ring of `boundary` (interior values are ignored), using the 5-point
/// stencil and a banded direct factorization.
pub fn solve_linearized_elliptic(
    seed: &IntegrableSeed,
    boundary: &ScalarField,
) -> Result<EllipticSolution> {
    if let SeedClass::Pseudospherical { .. } = seed.class {
        return Err(Error::NotElliptic("pseudospherical"));
    }
    boundary.ensure_same_grid(&seed.u)?;
    let grid = *seed.grid();
    let (na, nb) = (grid.n_alpha(), grid.n_beta());
    let (mi, mj) = (na - 2, nb - 2);
    let n = mi * mj;
    let ia = 1.0 / grid.h_alpha().powi(2);
    let ib = 1.0 / grid.h_beta().powi(2);
    let c = linear_coefficient(seed.class, &seed.u);
    let unknown = |i: usize, j: usize| (i - 1) * mj + (j - 1);

    // Assembled as −(Δ + c) so the matrix is symmetric with a positive diagonal.
    let mut a = BandMatrix::zeros(n, mj, mj);
    let mut rhs = vec![0.0; n];
    for i in 1..na - 1 {
        for j in 1..nb - 1 {
            let k = unknown(i, j);
            a.set(k, k, 2.0 * ia + 2.0 * ib - c.at(i, j));
            for (ii, jj, w) in [
                (i - 1, j, ia),
                (i + 1, j, ia),
                (i, j - 1, ib),
                (i, j + 1, ib),
            ] {
                if grid.is_boundary(ii, jj) {
                    rhs[k] += w * boundary.at(ii, jj);
                } else {
                    a.set(k, unknown(ii, jj), -w);
                }
            }
        }
    }
    let lu = a.factor()?;
    let condition = a.norm1() * lu.inverse_norm1_estimate_symmetric();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let x = lu.solve(&rhs);
    let s = ScalarField::from_index_fn(grid, |i, j| {
        if grid.is_boundary(i, j) {
            boundary.at(i, j)
        } else {
            x[unknown(i, j)]
        }
    });
    let symmetry = class_symmetry_components(seed, &s)?;
    Ok(EllipticSolution {
        symmetry,
        condition_estimate: condition,
    })
}

/// RK4 step bound for the CMC profile integration.
pub const CMC_MAX_STEP: f64 = 1e-3;
/// Largest tolerated drift of the first integral (u′)² + 2ℋ² cosh 2u.
pub const CMC_DRIFT_LIMIT: f64 = 1e-8;

/// Default first integral: the profile peaks at |u| = 0.1 plus a small margin.
pub fn default_cmc_first_integral(mean_curvature: f64) -> f64 {
    2.0 * mean_curvature * mean_curvature * 0.2f64.cosh() + 0.01
}

/// β-independent solution of the elliptic sinh-Gordon equation and its
/// α-derivative, both sampled on the grid.
#[derive(Debug, Clone)]
pub struct CmcProfile {
    pub u: ScalarField,
    pub u_alpha: ScalarField,
    pub max_drift: f64,
    pub step: f64,
}

/// Integrates u″ = −2ℋ² sinh 2u from u = 0, u′ = √(C − 2ℋ²) at the lower
/// α bound with RK4, monitoring (u′)² + 2ℋ² cosh 2u = C.
pub fn cmc_profile(grid: Grid2D, mean_curvature: f64, first_integral: f64) -> Result<CmcProfile> {
    let h2 = 2.0 * mean_curvature * mean_curvature;
    if mean_curvature == 0.0 || !mean_curvature.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "CMC profile needs a nonzero mean curvature, got {mean_curvature}"
        )));
    }
    if !(first_integral > h2) {
        return Err(Error::InvalidParameter(format!(
            "first integral C = {first_integral} must exceed 2ℋ² = {h2}"
        )));
    }
    let invariant = |u: f64, up: f64| up * up + h2 * (2.0 * u).cosh();
    let rhs = |u: f64| -h2 * (2.0 * u).sinh();

    let substeps = (grid.h_alpha() / CMC_MAX_STEP).ceil().max(1.0) as usize;
    let dt = grid.h_alpha() / substeps as f64;
    let mut state = (0.0f64, (first_integral - h2).sqrt());
    let mut us = Vec::with_capacity(grid.n_alpha());
    let mut ups = Vec::with_capacity(grid.n_alpha());
    let mut max_drift = 0.0f64;
    for i in 0..grid.n_alpha() {
        if i > 0 {
            for _ in 0..substeps {
                let (u, v) = state;
                let (k1u, k1v) = (v, rhs(u));
                let (k2u, k2v) = (v + 0.5 * dt * k1v, rhs(u + 0.5 * dt * k1u));
                let (k3u, k3v) = (v + 0.5 * dt * k2v, rhs(u + 0.5 * dt * k2u));
                let (k4u, k4v) = (v + dt * k3v, rhs(u + dt * k3u));
                state = (
                    u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
                    v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
                );
                max_drift = max_drift.max((invariant(state.0, state.1) - first_integral).abs());
            }
        }
        us.push(state.0);
        ups.push(state.1);
    }
    if max_drift > CMC_DRIFT_LIMIT {
        return Err(Error::FirstIntegralDrift {
            drift: max_drift,
            limit: CMC_DRIFT_LIMIT,
        });
    }
    let nb = grid.n_beta();
    let u = ScalarField::from_index_fn(grid, |i, _| us[i]);
    let u_alpha = ScalarField::from_index_fn(grid, |i, _| ups[i]);
    debug_assert_eq!(u.values().len(), grid.n_alpha() * nb);
    Ok(CmcProfile {
        u,
        u_alpha,
        max_drift,
        step: dt,
    })
}

/// Exact seeds with a known symmetry.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedSpec {
    /// Minimal: u = ln cosh α (the catenoid), S = tanh α.
    CatenoidLogCosh { alpha: (f64, f64), beta: (f64, f64) },
    /// Pseudospherical: u = 2 arctan e^{x/ρ}, S = u_x = sech(x/ρ)/ρ.
    SgKink {
        rho: f64,
        x: (f64, f64),
        y: (f64, f64),
    },
    /// CMC: the profile ODE solution, S = u_α.
    CmcOdeProfile {
        mean_curvature: f64,
        first_integral: f64,
        alpha: (f64, f64),
        beta: (f64, f64),
    },
}

#[derive(Debug, Clone)]
pub struct CatalogSeed {
    pub seed: IntegrableSeed,
    pub symmetry: ScalarField,
}

impl SeedSpec {
    pub const NAMES: [&'static str; 3] = ["catenoid_log_cosh", "sg_kink", "cmc_ode_profile"];

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "catenoid_log_cosh" => Self::CatenoidLogCosh {
                alpha: (-1.5, 1.5),
                beta: (0.0, 3.0),
            },
            "sg_kink" => Self::SgKink {
                rho: 1.0,
                x: (-3.0, -0.4),
                y: (0.0, 2.6),
            },
            "cmc_ode_profile" => Self::CmcOdeProfile {
                mean_curvature: 0.5,
                first_integral: default_cmc_first_integral(0.5),
                alpha: (0.0, 3.0),
                beta: (0.0, 3.0),
            },
            other => return Err(Error::UnknownCatalog(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CatenoidLogCosh { .. } => "catenoid_log_cosh",
            Self::SgKink { .. } => "sg_kink",
            Self::CmcOdeProfile { .. } => "cmc_ode_profile",
        }
    }

    pub fn ranges(&self) -> ((f64, f64), (f64, f64)) {
        match *self {
            Self::CatenoidLogCosh { alpha, beta } => (alpha, beta),
            Self::SgKink { x, y, .. } => (x, y),
            Self::CmcOdeProfile { alpha, beta, .. } => (alpha, beta),
        }
    }

    pub fn build(&self, n_alpha: usize, n_beta: usize) -> Result<CatalogSeed> {
        let (ar, br) = self.ranges();
        let grid = Grid2D::from_ranges(n_alpha, n_beta, ar, br)?;
        match *self {
            Self::CatenoidLogCosh { .. } => {
                let seed = IntegrableSeed::new(
                    SeedClass::Minimal,
                    ScalarField::from_fn(grid, |a, _| a.cosh().ln()),
                    "catenoid, u = ln cosh α",
                )?;
                let symmetry = ScalarField::from_fn(grid, |a, _| a.tanh());
                Ok(CatalogSeed { seed, symmetry })
            }
            Self::SgKink { rho, x, .. } => {
                check_kink_range(rho, x)?;
                let seed = IntegrableSeed::new(
                    SeedClass::Pseudospherical { rho },
                    ScalarField::from_fn(grid, |x, _| kink_angle(x, rho)),
                    "static sine-Gordon kink, u = 2 arctan e^{x/ρ}",
                )?;
                let symmetry = ScalarField::from_fn(grid, |x, _| 1.0 / ((x / rho).cosh() * rho));
                Ok(CatalogSeed { seed, symmetry })
            }
            Self::CmcOdeProfile {
                mean_curvature,
                first_integral,
                ..
            } => {
                let profile = cmc_profile(grid, mean_curvature, first_integral)?;
                let seed = IntegrableSeed::new(
                    SeedClass::Cmc { mean_curvature },
                    profile.u,
                    "elliptic sinh-Gordon profile from RK4",
                )?;
                Ok(CatalogSeed {
                    seed,
                    symmetry: profile.u_alpha,
                })
            }
        }
    }
}

/// Catalog seed by name with default parameters.
pub fn seed_catalog(name: &str, n_alpha: usize, n_beta: usize) -> Result<CatalogSeed> {
    SeedSpec::by_name(name)?.build(n_alpha, n_beta)
}
