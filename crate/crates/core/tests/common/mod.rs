#![allow(dead_code)]

use nalgebra::Vector3;
use shell_compat::frames::{
    analytic_frames, initial_frame, integrate_frames, reconstruct_positions,
};
use shell_compat::frames::{Frame3, FrameField, VectorField3};
use shell_compat::strain::{rigid_displacement, DisplacementField, RigidMotion};
use shell_compat::{CatalogSurface, ScalarField, SurfaceGeometry};

pub fn surface(name: &str, n: usize) -> SurfaceGeometry {
    CatalogSurface::by_name(name).unwrap().build(n, n).unwrap()
}

/// Analytic frames and positions where the catalog has them, integrated ones otherwise.
pub fn frames_and_positions(g: &SurfaceGeometry) -> (FrameField, VectorField3) {
    analytic_frames(g).unwrap_or_else(|| {
        let phi0 = initial_frame(g).unwrap_or_else(Frame3::identity);
        let out = integrate_frames(g, phi0).unwrap();
        let r = reconstruct_positions(g, &out.frames, Vector3::zeros()).unwrap();
        (out.frames, r)
    })
}

pub fn standard_motion() -> RigidMotion {
    RigidMotion {
        translation: Vector3::new(0.0, 0.0, 1.0),
        rotation: Vector3::new(0.3, -0.2, 0.1),
    }
}

pub fn rigid(g: &SurfaceGeometry) -> DisplacementField {
    let (frames, r) = frames_and_positions(g);
    rigid_displacement(&frames, &r, &standard_motion()).unwrap()
}

pub fn linf(f: &ScalarField, trim: usize) -> f64 {
    f.norms(trim).unwrap().linf
}

/// Observed orders log₂(eₙ/e₂ₙ₋₁) between successive grids.
pub fn orders(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Second order, or already at rounding level.
pub fn second_order(errs: &[f64]) -> bool {
    let last = *errs.last().unwrap();
    last < 1e-12 || orders(errs).last().is_some_and(|o| (1.7..=2.3).contains(o))
}

pub fn at_least_second_order(errs: &[f64]) -> bool {
    let last = *errs.last().unwrap();
    last < 1e-12 || orders(errs).last().is_some_and(|o| *o >= 1.7)
}
