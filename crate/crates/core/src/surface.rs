//! Curvature-line surface data (A₁, A₂, p, q, H∘, K∘), the Gauss–Mainardi–Codazzi
//! residuals, and a small catalog of analytic surfaces.
//!
//! Sign convention: the unit normal satisfies `N_α = H∘ e₁`, `N_β = K∘ e₂`, and the
//! principal curvatures are `κ₁ = −H∘/A₁`, `κ₂ = −K∘/A₂` with radii `Rᵢ = −1/κᵢ`.
//! The outward-normal unit sphere therefore has κ₁ = κ₂ = −1, which is the opposite
//! of the usual textbook sign.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField};
use crate::integrable;

/// Pointwise values of the six surface coefficients, plus the two derivatives
/// of the metric coefficients used by position quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a1: f64,
    pub a2: f64,
    pub p: f64,
    pub q: f64,
    pub hc: f64,
    pub kc: f64,
    /// ∂A₁/∂α
    pub a1_alpha: f64,
    /// ∂A₂/∂β
    pub a2_beta: f64,
}

pub type CoefficientFn = Arc<dyn Fn(f64, f64) -> Coefficients + Send + Sync>;
pub type PositionFn = Arc<dyn Fn(f64, f64) -> Vector3<f64> + Send + Sync>;
pub type FrameFn = Arc<dyn Fn(f64, f64) -> Matrix3<f64> + Send + Sync>;

/// Closed forms attached to catalog surfaces so discretization error can be
/// measured against exact references.
#[derive(Clone)]
pub struct AnalyticSurface {
    pub coefficients: CoefficientFn,
    pub position: Option<PositionFn>,
    /// Frame with columns (e₁, e₂, N).
    pub frame: Option<FrameFn>,
}

impl fmt::Debug for AnalyticSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticSurface")
            .field("position", &self.position.is_some())
            .field("frame", &self.frame.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceGeometry {
    pub a1: ScalarField,
    pub a2: ScalarField,
    pub p: ScalarField,
    pub q: ScalarField,
    pub hc: ScalarField,
    pub kc: ScalarField,
    analytic: Option<AnalyticSurface>,
}

impl SurfaceGeometry {
    pub fn new(
        a1: ScalarField,
        a2: ScalarField,
        p: ScalarField,
        q: ScalarField,
        hc: ScalarField,
        kc: ScalarField,
    ) -> Result<Self> {
        for f in [&a2, &p, &q, &hc, &kc] {
            a1.ensure_same_grid(f)?;
        }
        a1.ensure_positive("A1")?;
        a2.ensure_positive("A2")?;
        for (f, name) in [(&p, "p"), (&q, "q"), (&hc, "Hc"), (&kc, "Kc")] {
            if !f.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(Self {
            a1,
            a2,
            p,
            q,
            hc,
            kc,
            analytic: None,
        })
    }

    /// Builds geometry from A₁, A₂, H∘, K∘ with p, q obtained by [`derive_pq`].
    pub fn from_metric_and_normal(
        a1: ScalarField,
        a2: ScalarField,
        hc: ScalarField,
        kc: ScalarField,
    ) -> Result<Self> {
        let (p, q) = derive_pq(&a1, &a2)?;
        Self::new(a1, a2, p, q, hc, kc)
    }

    /// Samples every coefficient from closed forms and keeps the closures.
    pub fn from_analytic(grid: Grid2D, analytic: AnalyticSurface) -> Result<Self> {
        let samples: Vec<Coefficients> = grid
            .indices()
            .map(|(i, j)| (analytic.coefficients)(grid.alpha(i), grid.beta(j)))
            .collect();
        let field = |sel: fn(&Coefficients) -> f64| {
            ScalarField::new(grid, samples.iter().map(sel).collect())
        };
        let mut geom = Self::new(
            field(|c| c.a1)?,
            field(|c| c.a2)?,
            field(|c| c.p)?,
            field(|c| c.q)?,
            field(|c| c.hc)?,
            field(|c| c.kc)?,
        )?;
        geom.analytic = Some(analytic);
        Ok(geom)
    }

    pub fn grid(&self) -> &Grid2D {
        self.a1.grid()
    }

    pub fn analytic(&self) -> Option<&AnalyticSurface> {
        self.analytic.as_ref()
    }

    /// Coefficients at an arbitrary parameter point; requires closures.
    pub fn coefficients_at(&self, alpha: f64, beta: f64) -> Option<Coefficients> {
        self.analytic
            .as_ref()
            .map(|a| (a.coefficients)(alpha, beta))
    }

    /// Coefficients at a grid node, from the sampled fields. The metric
    /// derivatives come from the closures when present, else from FD.
    pub fn node_coefficients(&self, i: usize, j: usize) -> Coefficients {
        let g = self.grid();
        match self.coefficients_at(g.alpha(i), g.beta(j)) {
            Some(c) => Coefficients {
                a1: self.a1.at(i, j),
                a2: self.a2.at(i, j),
                p: self.p.at(i, j),
                q: self.q.at(i, j),
                hc: self.hc.at(i, j),
                kc: self.kc.at(i, j),
                ..c
            },
            None => Coefficients {
                a1: self.a1.at(i, j),
                a2: self.a2.at(i, j),
                p: self.p.at(i, j),
                q: self.q.at(i, j),
                hc: self.hc.at(i, j),
                kc: self.kc.at(i, j),
                a1_alpha: f64::NAN,
                a2_beta: f64::NAN,
            },
        }
    }

    /// Multiplies H∘ by `factor`, sampled values and closure alike. Position and
    /// frame closures are dropped since no surface realizes the result.
    pub fn with_scaled_hc(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.hc = &self.hc * factor;
        out.analytic = self.analytic.as_ref().map(|a| {
            let inner = a.coefficients.clone();
            AnalyticSurface {
                coefficients: Arc::new(move |al, be| {
                    let c = inner(al, be);
                    Coefficients {
                        hc: c.hc * factor,
                        ..c
                    }
                }),
                position: None,
                frame: None,
            }
        });
        out
    }

    /// Drops the analytic closures, keeping only the sampled fields.
    pub fn without_analytic(&self) -> Self {
        let mut out = self.clone();
        out.analytic = None;
        out
    }

    /// 1/R₁ evaluated as −κ₁ = H∘/A₁, finite on flat regions.
    pub fn inv_r1(&self) -> ScalarField {
        &self.hc / &self.a1
    }

    /// 1/R₂ = −κ₂ = K∘/A₂.
    pub fn inv_r2(&self) -> ScalarField {
        &self.kc / &self.a2
    }
}

/// p = (A₁)_β / A₂ and q = (A₂)_α / A₁.
pub fn derive_pq(a1: &ScalarField, a2: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    a1.ensure_same_grid(a2)?;
    a1.ensure_positive("A1")?;
    a2.ensure_positive("A2")?;
    let p = a1.diff_beta() / a2;
    let q = a2.diff_alpha() / a1;
    Ok((p, q))
}

#[derive(Debug, Clone)]
pub struct GmcResiduals {
    /// p_β + q_α + H∘K∘
    pub gauss: ScalarField,
    /// (H∘)_β − pK∘
    pub codazzi1: ScalarField,
    /// (K∘)_α − qH∘
    pub codazzi2: ScalarField,
}

pub fn gmc_residuals(geom: &SurfaceGeometry) -> GmcResiduals {
    let g = geom;
    GmcResiduals {
        gauss: g.p.diff_beta() + &g.q.diff_alpha() + &(&g.hc * &g.kc),
        codazzi1: g.hc.diff_beta() - &(&g.p * &g.kc),
        codazzi2: g.kc.diff_alpha() - &(&g.q * &g.hc),
    }
}

#[derive(Debug, Clone)]
pub struct CurvatureSet {
    pub kappa1: ScalarField,
    pub kappa2: ScalarField,
    /// ℋ = (κ₁ + κ₂)/2
    pub mean: ScalarField,
    /// 𝒦 = κ₁κ₂
    pub gauss: ScalarField,
    /// R₁ = −1/κ₁; infinite where κ₁ = 0.
    pub r1: ScalarField,
    pub r2: ScalarField,
}

pub fn curvatures(geom: &SurfaceGeometry) -> CurvatureSet {
    let kappa1 = -(&geom.hc / &geom.a1);
    let kappa2 = -(&geom.kc / &geom.a2);
    let radius = |k: f64| if k == 0.0 { f64::INFINITY } else { -1.0 / k };
    CurvatureSet {
        mean: (&kappa1 + &kappa2) * 0.5,
        gauss: &kappa1 * &kappa2,
        r1: kappa1.map(radius),
        r2: kappa2.map(radius),
        kappa1,
        kappa2,
    }
}

/// Lowest admissible value of the pseudosphere angle u, and π/2 minus the highest.
pub const CHART_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogSurface {
    Plane {
        alpha: (f64, f64),
        beta: (f64, f64),
    },
    /// Standard chart α = θ (colatitude), β = φ.
    Sphere {
        radius: f64,
        theta: (f64, f64),
        phi: (f64, f64),
    },
    /// r = (cosh α cos β, cosh α sin β, α).
    Catenoid {
        alpha: (f64, f64),
        beta: (f64, f64),
    },
    /// Pseudospherical surface built on the static sine-Gordon kink
    /// u = 2 arctan e^{x/ρ}, with (x, y) = (α, β).
    PseudosphereKink {
        rho: f64,
        x: (f64, f64),
        y: (f64, f64),
    },
    /// β-independent CMC surface from the elliptic sinh-Gordon profile ODE.
    CmcProfile {
        mean_curvature: f64,
        first_integral: f64,
        alpha: (f64, f64),
        beta: (f64, f64),
    },
}

impl CatalogSurface {
    pub const NAMES: [&'static str; 5] = [
        "plane",
        "sphere",
        "catenoid",
        "pseudosphere_kink",
        "cmc_profile",
    ];

    /// Default parameters for a catalog name.
    pub fn by_name(name: &str) -> Result<Self> {
        use std::f64::consts::PI;
        Ok(match name {
            "plane" => Self::Plane {
                alpha: (0.0, 1.0),
                beta: (0.0, 1.0),
            },
            "sphere" => Self::Sphere {
                radius: 1.0,
                theta: (PI / 6.0, 5.0 * PI / 6.0),
                phi: (0.0, 2.0 * PI / 3.0),
            },
            "catenoid" => Self::Catenoid {
                alpha: (-1.5, 1.5),
                beta: (0.0, 3.0),
            },
            "pseudosphere_kink" => Self::PseudosphereKink {
                rho: 1.0,
                x: (-3.0, -0.4),
                y: (0.0, 2.6),
            },
            "cmc_profile" => {
                let h = 0.5;
                Self::CmcProfile {
                    mean_curvature: h,
                    first_integral: integrable::default_cmc_first_integral(h),
                    alpha: (0.0, 3.0),
                    beta: (0.0, 3.0),
                }
            }
            other => return Err(Error::UnknownCatalog(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Plane { .. } => "plane",
            Self::Sphere { .. } => "sphere",
            Self::Catenoid { .. } => "catenoid",
            Self::PseudosphereKink { .. } => "pseudosphere_kink",
            Self::CmcProfile { .. } => "cmc_profile",
        }
    }

    pub fn ranges(&self) -> ((f64, f64), (f64, f64)) {
        match *self {
            Self::Plane { alpha, beta } => (alpha, beta),
            Self::Sphere { theta, phi, .. } => (theta, phi),
            Self::Catenoid { alpha, beta } => (alpha, beta),
            Self::PseudosphereKink { x, y, .. } => (x, y),
            Self::CmcProfile { alpha, beta, .. } => (alpha, beta),
        }
    }

    /// Samples the surface on an `n_alpha x n_beta` grid spanning its ranges.
    pub fn build(&self, n_alpha: usize, n_beta: usize) -> Result<SurfaceGeometry> {
        let (ar, br) = self.ranges();
        for r in [ar, br] {
            if !(r.1 > r.0) {
                return Err(Error::InvalidParameter(format!(
                    "empty parameter range [{}, {}]",
                    r.0, r.1
                )));
            }
        }
        let grid = Grid2D::from_ranges(n_alpha, n_beta, ar, br)?;
        match *self {
            Self::Plane { .. } => SurfaceGeometry::from_analytic(grid, plane()),
            Self::Sphere { radius, theta, .. } => {
                if !(radius > 0.0) {
                    return Err(Error::InvalidParameter(format!("sphere radius {radius}")));
                }
                if !(theta.0 > 0.0 && theta.1 < std::f64::consts::PI) {
                    return Err(Error::InvalidParameter(
                        "sphere θ-range must stay inside (0, π)".into(),
                    ));
                }
                SurfaceGeometry::from_analytic(grid, sphere(radius))
            }
            Self::Catenoid { .. } => SurfaceGeometry::from_analytic(grid, catenoid()),
            Self::PseudosphereKink { rho, x, .. } => {
                check_kink_range(rho, x)?;
                SurfaceGeometry::from_analytic(grid, pseudosphere_kink(rho))
            }
            Self::CmcProfile {
                mean_curvature,
                first_integral,
                ..
            } => cmc_surface(grid, mean_curvature, first_integral),
        }
    }
}

/// Kink angle u = 2 arctan e^{x/ρ}.
pub fn kink_angle(x: f64, rho: f64) -> f64 {
    2.0 * (x / rho).exp().atan()
}

pub(crate) fn check_kink_range(rho: f64, x: (f64, f64)) -> Result<()> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("kink width ρ = {rho}")));
    }
    let (lo, hi) = (kink_angle(x.0, rho), kink_angle(x.1, rho));
    if lo < CHART_MARGIN || hi > FRAC_PI_2 - CHART_MARGIN {
        return Err(Error::InvalidParameter(format!(
            "kink angle spans [{lo:.4}, {hi:.4}] on x ∈ [{}, {}], outside [{CHART_MARGIN}, π/2 − {CHART_MARGIN}]",
            x.0, x.1
        )));
    }
    Ok(())
}

fn plane() -> AnalyticSurface {
    AnalyticSurface {
        coefficients: Arc::new(|_, _| Coefficients {
            a1: 1.0,
            a2: 1.0,
            p: 0.0,
            q: 0.0,
            hc: 0.0,
            kc: 0.0,
            a1_alpha: 0.0,
            a2_beta: 0.0,
        }),
        position: Some(Arc::new(|a, b| Vector3::new(a, b, 0.0))),
        frame: Some(Arc::new(|_, _| Matrix3::identity())),
    }
}

fn sphere(radius: f64) -> AnalyticSurface {
    AnalyticSurface {
        coefficients: Arc::new(move |theta, _| Coefficients {
            a1: radius,
            a2: radius * theta.sin(),
            p: 0.0,
            q: theta.cos(),
            hc: 1.0,
            kc: theta.sin(),
            a1_alpha: 0.0,
            a2_beta: 0.0,
        }),
        position: Some(Arc::new(move |theta, phi| {
            radius
                * Vector3::new(
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                )
        })),
        frame: Some(Arc::new(|theta, phi| {
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            Matrix3::from_columns(&[
                Vector3::new(ct * cp, ct * sp, -st),
                Vector3::new(-sp, cp, 0.0),
                Vector3::new(st * cp, st * sp, ct),
            ])
        })),
    }
}

fn catenoid() -> AnalyticSurface {
    AnalyticSurface {
        coefficients: Arc::new(|alpha, _| {
            let ch = alpha.cosh();
            Coefficients {
                a1: ch,
                a2: ch,
                p: 0.0,
                q: alpha.tanh(),
                hc: 1.0 / ch,
                kc: -1.0 / ch,
                a1_alpha: alpha.sinh(),
                a2_beta: 0.0,
            }
        }),
        position: Some(Arc::new(|alpha, beta| {
            let ch = alpha.cosh();
            Vector3::new(ch * beta.cos(), ch * beta.sin(), alpha)
        })),
        frame: Some(Arc::new(|alpha, beta| {
            let (th, sech) = (alpha.tanh(), 1.0 / alpha.cosh());
            let (sb, cb) = beta.sin_cos();
            Matrix3::from_columns(&[
                Vector3::new(th * cb, th * sb, sech),
                Vector3::new(-sb, cb, 0.0),
                Vector3::new(-sech * cb, -sech * sb, th),
            ])
        })),
    }
}

fn pseudosphere_kink(rho: f64) -> AnalyticSurface {
    AnalyticSurface {
        coefficients: Arc::new(move |x, _| {
            let u = kink_angle(x, rho);
            let (su, cu) = u.sin_cos();
            // u_x = sin(u)/ρ for the kink.
            let ux = su / rho;
            Coefficients {
                a1: cu,
                a2: su,
                p: 0.0,
                q: ux,
                hc: -su / rho,
                kc: cu / rho,
                a1_alpha: -su * ux,
                a2_beta: 0.0,
            }
        }),
        position: None,
        frame: None,
    }
}

fn cmc_surface(grid: Grid2D, mean_curvature: f64, first_integral: f64) -> Result<SurfaceGeometry> {
    let profile = integrable::cmc_profile(grid, mean_curvature, first_integral)?;
    let h = mean_curvature;
    let a = profile.u.map(f64::exp);
    SurfaceGeometry::new(
        a.clone(),
        a,
        ScalarField::zeros(grid),
        profile.u_alpha.clone(),
        profile.u.map(|u| -2.0 * h * u.sinh()),
        profile.u.map(|u| -2.0 * h * u.cosh()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sphere_geom(n: usize) -> SurfaceGeometry {
        CatalogSurface::by_name("sphere")
            .unwrap()
            .build(n, n)
            .unwrap()
    }

    fn linf(f: &ScalarField, trim: usize) -> f64 {
        f.norms(trim).unwrap().linf
    }

    #[test]
    fn plane_is_flat_and_exact() {
        let g = CatalogSurface::by_name("plane")
            .unwrap()
            .build(9, 9)
            .unwrap();
        let (p, q) = derive_pq(&g.a1, &g.a2).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert_eq!(q.max_abs(), 0.0);
        let r = gmc_residuals(&g);
        assert_eq!(r.gauss.max_abs(), 0.0);
        assert_eq!(r.codazzi1.max_abs(), 0.0);
        assert_eq!(r.codazzi2.max_abs(), 0.0);
        let c = curvatures(&g);
        assert_eq!(c.kappa1.max_abs(), 0.0);
        assert_eq!(c.gauss.max_abs(), 0.0);
        assert!(c.r1.values().iter().all(|r| r.is_infinite()));
    }

    #[test]
    fn sphere_chart_values() {
        let g = sphere_geom(33);
        let grid = *g.grid();
        for (i, j) in grid.indices() {
            let t = grid.alpha(i);
            assert_eq!(g.a1.at(i, j), 1.0);
            assert!((g.a2.at(i, j) - t.sin()).abs() < 1e-15);
            assert!((g.q.at(i, j) - t.cos()).abs() < 1e-15);
            assert_eq!(g.hc.at(i, j), 1.0);
        }
    }

    #[test]
    fn derive_pq_on_sphere_reproduces_cos_theta() {
        let err = |n: usize| {
            let g = sphere_geom(n);
            let (p, q) = derive_pq(&g.a1, &g.a2).unwrap();
            assert_eq!(p.max_abs(), 0.0);
            (&q - &g.q).max_abs()
        };
        let (e1, e2) = (err(33), err(65));
        assert!(e1 < 2e-3);
        assert!((3.5..=4.5).contains(&(e1 / e2)), "{}", e1 / e2);
        // θ = π/3 lies on a 13-point grid over [π/6, 5π/6] (i = 3).
        let g = sphere_geom(13);
        let (_, q) = derive_pq(&g.a1, &g.a2).unwrap();
        assert!((g.grid().alpha(3) - PI / 3.0).abs() < 1e-14);
        assert!((q.at(3, 5) - 0.5).abs() < 5e-3);
    }

    #[test]
    fn derive_pq_on_catenoid() {
        let g = CatalogSurface::by_name("catenoid")
            .unwrap()
            .build(61, 9)
            .unwrap();
        let (p, q) = derive_pq(&g.a1, &g.a2).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert!((&q - &g.q).max_abs() < 5e-3);
        // α = 0 sits at the middle row.
        assert!(q.at(30, 4).abs() < 1e-12);
    }

    #[test]
    fn derive_pq_rejects_nonpositive_metric() {
        let grid = Grid2D::from_ranges(5, 5, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let a1 = ScalarField::from_fn(grid, |a, _| a - 0.5);
        let a2 = ScalarField::constant(grid, 1.0);
        assert!(matches!(
            derive_pq(&a1, &a2),
            Err(Error::NonPositive { .. })
        ));
    }

    #[test]
    fn sphere_gmc_residuals_are_second_order() {
        let norms = |n: usize| {
            let r = gmc_residuals(&sphere_geom(n));
            (
                linf(&r.gauss, 2),
                linf(&r.codazzi1, 2),
                linf(&r.codazzi2, 2),
            )
        };
        let (g1, c1, d1) = norms(33);
        let (g2, _, d2) = norms(65);
        assert_eq!(c1, 0.0);
        assert!((3.5..=4.5).contains(&(g1 / g2)));
        assert!((3.5..=4.5).contains(&(d1 / d2)));
    }

    #[test]
    fn scaled_hc_breaks_gauss_equation() {
        let g = sphere_geom(65).with_scaled_hc(1.1);
        let r = gmc_residuals(&g);
        let grid = *g.grid();
        // θ = π/2 is the middle row.
        assert!((grid.alpha(32) - FRAC_PI_2).abs() < 1e-14);
        assert!((r.gauss.at(32, 10) - 0.1).abs() < 1e-3);
        for i in 2..63 {
            let expect = 0.1 * grid.alpha(i).sin();
            assert!((r.gauss.at(i, 7) - expect).abs() < 1e-3);
        }
        assert!(g.analytic().unwrap().position.is_none());
    }

    #[test]
    fn sphere_and_catenoid_curvatures() {
        let c = curvatures(&sphere_geom(9));
        for v in c.kappa1.values().iter().chain(c.kappa2.values()) {
            assert!((v + 1.0).abs() < 1e-15);
        }
        assert!(c.mean.values().iter().all(|v| (v + 1.0).abs() < 1e-15));
        assert!(c.gauss.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert!(c.r1.values().iter().all(|v| (v - 1.0).abs() < 1e-15));

        let g = CatalogSurface::by_name("catenoid")
            .unwrap()
            .build(11, 5)
            .unwrap();
        let c = curvatures(&g);
        let grid = *g.grid();
        for (i, j) in grid.indices() {
            let s2 = 1.0 / grid.alpha(i).cosh().powi(2);
            assert!((c.kappa1.at(i, j) + s2).abs() < 1e-14);
            assert!((c.kappa2.at(i, j) - s2).abs() < 1e-14);
            assert!(c.mean.at(i, j).abs() < 1e-15);
            assert!((c.gauss.at(i, j) + s2 * s2).abs() < 1e-14);
        }
    }

    #[test]
    fn kink_identities_at_minus_one() {
        let surf = CatalogSurface::PseudosphereKink {
            rho: 1.0,
            x: (-3.0, -0.4),
            y: (0.0, 1.0),
        };
        // x = −1 is node 20 of a 27-point grid over [−3, −0.4].
        let g = surf.build(27, 5).unwrap();
        assert!((g.grid().alpha(20) + 1.0).abs() < 1e-14);
        let (tanh1, sech1) = (1.0f64.tanh(), 1.0 / 1.0f64.cosh());
        assert!((g.a1.at(20, 2) - tanh1).abs() < 1e-12);
        assert!((g.a2.at(20, 2) - sech1).abs() < 1e-12);
        assert!((g.a1.at(20, 2) - 0.761594).abs() < 1e-6);
        assert!((g.a2.at(20, 2) - 0.648054).abs() < 1e-6);
    }

    #[test]
    fn kink_range_crossing_chart_is_rejected() {
        for x in [(-3.0, 0.5), (-3.0, -0.01), (-6.0, -1.0)] {
            let surf = CatalogSurface::PseudosphereKink {
                rho: 1.0,
                x,
                y: (0.0, 1.0),
            };
            assert!(surf.build(9, 9).is_err(), "{x:?}");
        }
    }

    #[test]
    fn curvature_definitions_hold_pointwise() {
        for name in CatalogSurface::NAMES {
            let g = CatalogSurface::by_name(name)
                .unwrap()
                .build(17, 17)
                .unwrap();
            let c = curvatures(&g);
            for (i, j) in g.grid().indices() {
                let (k1, k2) = (c.kappa1.at(i, j), c.kappa2.at(i, j));
                assert_eq!(k1, -g.hc.at(i, j) / g.a1.at(i, j));
                assert_eq!(k2, -g.kc.at(i, j) / g.a2.at(i, j));
                assert!((c.mean.at(i, j) - 0.5 * (k1 + k2)).abs() < 1e-15);
                assert!((c.gauss.at(i, j) - k1 * k2).abs() < 1e-15);
                if k1 != 0.0 {
                    assert!((c.r1.at(i, j) * k1 + 1.0).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn catalog_pq_matches_derived_pq() {
        for name in ["sphere", "catenoid", "pseudosphere_kink"] {
            let surf = CatalogSurface::by_name(name).unwrap();
            let err = |n: usize| {
                let g = surf.build(n, n).unwrap();
                let (p, q) = derive_pq(&g.a1, &g.a2).unwrap();
                (&p - &g.p).max_abs().max((&q - &g.q).max_abs())
            };
            let ratio = err(33) / err(65);
            assert!((3.5..=4.5).contains(&ratio), "{name}: {ratio}");
        }
    }

    #[test]
    fn unknown_catalog_name() {
        assert!(matches!(
            CatalogSurface::by_name("torus"),
            Err(Error::UnknownCatalog(_))
        ));
    }
}
