//! Linear thin-shell kinematics on a curvature-line middle surface: strains from
//! displacements, bending strains, the deformed-frame quantities P, Q, H∘′, K∘′,
//! and the compatibility residuals the strains must satisfy.
//!
//! Everywhere below 1/Rᵢ is evaluated as −κᵢ (H∘/A₁ and K∘/A₂), so flat
//! regions never produce infinities.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::frames::{commutator, gw_matrix_fields, FrameField, MatrixField, VectorField3};
use crate::grid::{Grid2D, ScalarField};
use crate::surface::SurfaceGeometry;

/// Δ = u e₁ + v e₂ + w N.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    pub u: ScalarField,
    pub v: ScalarField,
    pub w: ScalarField,
}

impl DisplacementField {
    pub fn new(u: ScalarField, v: ScalarField, w: ScalarField) -> Result<Self> {
        u.ensure_same_grid(&v)?;
        u.ensure_same_grid(&w)?;
        Ok(Self {
            u: u.ensure_finite("u")?,
            v: v.ensure_finite("v")?,
            w: w.ensure_finite("w")?,
        })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            u: ScalarField::zeros(grid),
            v: ScalarField::zeros(grid),
            w: ScalarField::zeros(grid),
        }
    }

    /// Pure normal displacement w ≡ c.
    pub fn inflation(grid: Grid2D, c: f64) -> Self {
        Self {
            u: ScalarField::zeros(grid),
            v: ScalarField::zeros(grid),
            w: ScalarField::constant(grid, c),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.u.grid()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            u: &self.u * s,
            v: &self.v * s,
            w: &self.w * s,
        }
    }

    /// Largest displacement component magnitude.
    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs()).max(self.w.max_abs())
    }
}

/// Infinitesimal rigid motion Δ = a + b × r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub translation: Vector3<f64>,
    pub rotation: Vector3<f64>,
}

/// Strain variables of the linear theory.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainState {
    pub eps1: ScalarField,
    pub eps2: ScalarField,
    pub om1: ScalarField,
    pub om2: ScalarField,
    /// ω = ω₁ + ω₂
    pub om: ScalarField,
    pub theta: ScalarField,
    pub psi: ScalarField,
    pub k1: ScalarField,
    pub k2: ScalarField,
    pub tau: ScalarField,
    pub p: ScalarField,
    pub q: ScalarField,
    /// H∘′ = −k₁A₁
    pub hp: ScalarField,
    /// K∘′ = −k₂A₂
    pub kp: ScalarField,
}

impl StrainState {
    pub fn zeros(grid: Grid2D) -> Self {
        let z = ScalarField::zeros(grid);
        Self {
            eps1: z.clone(),
            eps2: z.clone(),
            om1: z.clone(),
            om2: z.clone(),
            om: z.clone(),
            theta: z.clone(),
            psi: z.clone(),
            k1: z.clone(),
            k2: z.clone(),
            tau: z.clone(),
            p: z.clone(),
            q: z.clone(),
            hp: z.clone(),
            kp: z,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.eps1.grid()
    }

    /// The six strains ε₁, ε₂, ω, k₁, k₂, τ with their names.
    pub fn six_strains(&self) -> [(&'static str, &ScalarField); 6] {
        [
            ("eps1", &self.eps1),
            ("eps2", &self.eps2),
            ("omega", &self.om),
            ("k1", &self.k1),
            ("k2", &self.k2),
            ("tau", &self.tau),
        ]
    }

    /// Normalization scale max(1, max |strain|) for residual reports.
    pub fn scale(&self) -> f64 {
        self.six_strains()
            .iter()
            .fold(1.0, |m, (_, f)| m.max(f.max_abs()))
    }

    fn ensure_finite(self) -> Result<Self> {
        for (name, f) in self.six_strains() {
            if !f.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(self)
    }
}

/// ε₁, ε₂, ω₁, ω₂, ϑ, ψ from the strain–displacement relations; the remaining
/// fields of the returned state are zero.
pub fn strains_from_displacement(
    geom: &SurfaceGeometry,
    disp: &DisplacementField,
) -> Result<StrainState> {
    if disp.grid() != geom.grid() {
        return Err(Error::GridMismatch);
    }
    let g = geom;
    let (u, v, w) = (&disp.u, &disp.v, &disp.w);
    let eps1 = (u.diff_alpha() + &(&g.p * v) + &(&g.hc * w)) / &g.a1;
    let eps2 = (v.diff_beta() + &(&g.q * u) + &(&g.kc * w)) / &g.a2;
    let om1 = (v.diff_alpha() - &(&g.p * u)) / &g.a1;
    let om2 = (u.diff_beta() - &(&g.q * v)) / &g.a2;
    let theta = (-w.diff_alpha() + &(&g.hc * u)) / &g.a1;
    let psi = (-w.diff_beta() + &(&g.kc * v)) / &g.a2;
    let mut state = StrainState::zeros(*g.grid());
    state.om = &om1 + &om2;
    state.eps1 = eps1;
    state.eps2 = eps2;
    state.om1 = om1;
    state.om2 = om2;
    state.theta = theta;
    state.psi = psi;
    state.ensure_finite()
}

/// Fills k₁, k₂, τ from ϑ, ψ, ω₁, ω₂. τ uses the α-formula; the returned
/// mismatch is τ_α-form − τ_β-form.
pub fn bending_strains(
    geom: &SurfaceGeometry,
    mut state: StrainState,
) -> Result<(StrainState, ScalarField)> {
    let g = geom;
    let (th, ps) = (&state.theta, &state.psi);
    let k1 = -(th.diff_alpha() + &(&g.p * ps)) / &g.a1;
    let k2 = -(ps.diff_beta() + &(&g.q * th)) / &g.a2;
    let tau_a = (ps.diff_alpha() - &(&g.p * th)) / &g.a1 + &(&state.om2 * &g.inv_r1());
    let tau_b = (th.diff_beta() - &(&g.q * ps)) / &g.a2 + &(&state.om1 * &g.inv_r2());
    let mismatch = &tau_a - &tau_b;
    state.k1 = k1;
    state.k2 = k2;
    state.tau = tau_a;
    Ok((state.ensure_finite()?, mismatch))
}

/// P and Q from the six strains:
/// P = ((A₁ε₁)_β − (A₂ω)_α − ε₂(A₁)_β)/A₂, Q = ((A₂ε₂)_α − (A₁ω)_β − ε₁(A₂)_α)/A₁.
pub fn pq_from_strains(geom: &SurfaceGeometry, state: &StrainState) -> (ScalarField, ScalarField) {
    let g = geom;
    let s = state;
    let p = ((&g.a1 * &s.eps1).diff_beta()
        - &(&g.a2 * &s.om).diff_alpha()
        - &(&s.eps2 * &g.a1.diff_beta()))
        / &g.a2;
    let q = ((&g.a2 * &s.eps2).diff_alpha()
        - &(&g.a1 * &s.om).diff_beta()
        - &(&s.eps1 * &g.a2.diff_alpha()))
        / &g.a1;
    (p, q)
}

/// P = −((ω₁)_α + H∘ψ), Q = −((ω₂)_β + K∘ϑ).
pub fn pq_from_rotations(
    geom: &SurfaceGeometry,
    state: &StrainState,
) -> (ScalarField, ScalarField) {
    let s = state;
    let p = -(s.om1.diff_alpha() + &(&geom.hc * &s.psi));
    let q = -(s.om2.diff_beta() + &(&geom.kc * &s.theta));
    (p, q)
}

/// P and Q in the regrouped form with the ω_α/2 and ω_β/2 split.
pub fn pq_regrouped(geom: &SurfaceGeometry, state: &StrainState) -> (ScalarField, ScalarField) {
    let (pt, qt) = split_pq(geom, state);
    let p = pt - &(state.om.diff_alpha() * 0.5);
    let q = qt - &(state.om.diff_beta() * 0.5);
    (p, q)
}

/// The bracketed parts of the regrouped P, Q (without the trailing −ω_α/2,
/// −ω_β/2 terms).
fn split_pq(geom: &SurfaceGeometry, s: &StrainState) -> (ScalarField, ScalarField) {
    let g = geom;
    let a1_b = g.a1.diff_beta();
    let a2_a = g.a2.diff_alpha();
    let d12 = &s.eps1 - &s.eps2;
    let pt = (&g.a1 * &s.eps1.diff_beta() + &(&a1_b * &d12)
        - &(&g.a2 * &s.om.diff_alpha() * 0.5)
        - &(&a2_a * &s.om))
        / &g.a2;
    let qt = (&g.a2 * &s.eps2.diff_alpha()
        - &(&a2_a * &d12)
        - &(&g.a1 * &s.om.diff_beta() * 0.5)
        - &(&a1_b * &s.om))
        / &g.a1;
    (pt, qt)
}

/// Differences between the alternative P, Q forms and the canonical
/// strain form.
#[derive(Debug, Clone)]
pub struct PqDiagnostics {
    /// −((ω₁)_α + H∘ψ) − P
    pub p_mismatch: ScalarField,
    /// −((ω₂)_β + K∘ϑ) − Q
    pub q_mismatch: ScalarField,
    pub p_regrouped_mismatch: ScalarField,
    pub q_regrouped_mismatch: ScalarField,
}

/// Fills P, Q (strain form), H∘′ = −k₁A₁ and K∘′ = −k₂A₂.
pub fn pq_deformed(
    geom: &SurfaceGeometry,
    mut state: StrainState,
) -> Result<(StrainState, PqDiagnostics)> {
    let (p, q) = pq_from_strains(geom, &state);
    let (p_rot, q_rot) = pq_from_rotations(geom, &state);
    let (p_reg, q_reg) = pq_regrouped(geom, &state);
    let diag = PqDiagnostics {
        p_mismatch: &p_rot - &p,
        q_mismatch: &q_rot - &q,
        p_regrouped_mismatch: &p_reg - &p,
        q_regrouped_mismatch: &q_reg - &q,
    };
    state.hp = -(&state.k1 * &geom.a1);
    state.kp = -(&state.k2 * &geom.a2);
    state.p = p.ensure_finite("P")?;
    state.q = q.ensure_finite("Q")?;
    Ok((state, diag))
}

/// Everything a displacement determines, with the τ and P/Q diagnostics.
#[derive(Debug, Clone)]
pub struct DisplacementStrains {
    pub state: StrainState,
    pub tau_mismatch: ScalarField,
    pub pq: PqDiagnostics,
}

/// Runs [`strains_from_displacement`], [`bending_strains`] and [`pq_deformed`].
pub fn full_strain_state(
    geom: &SurfaceGeometry,
    disp: &DisplacementField,
) -> Result<DisplacementStrains> {
    let state = strains_from_displacement(geom, disp)?;
    let (state, tau_mismatch) = bending_strains(geom, state)?;
    let (state, pq) = pq_deformed(geom, state)?;
    Ok(DisplacementStrains {
        state,
        tau_mismatch,
        pq,
    })
}

/// u = Δ·e₁, v = Δ·e₂, w = Δ·N for Δ = a + b × r.
pub fn rigid_displacement(
    frames: &FrameField,
    positions: &VectorField3,
    motion: &RigidMotion,
) -> Result<DisplacementField> {
    let grid = *frames.grid();
    if *positions.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let delta: Vec<Vector3<f64>> = positions
        .vectors()
        .iter()
        .map(|r| motion.translation + motion.rotation.cross(r))
        .collect();
    let comp = |col: usize| {
        ScalarField::new(
            grid,
            frames
                .matrices()
                .iter()
                .zip(&delta)
                .map(|(m, d)| m.column(col).dot(d))
                .collect(),
        )
    };
    DisplacementField::new(comp(0)?, comp(1)?, comp(2)?)
}

/// A layer r + zN of a shell with thickness δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerParams {
    z: f64,
    thickness: f64,
}

impl LayerParams {
    pub fn new(z: f64, thickness: f64) -> Result<Self> {
        if !(thickness > 0.0) || !(z.abs() < 0.5 * thickness) {
            return Err(Error::InvalidParameter(format!(
                "layer offset z = {z} must satisfy |z| < δ/2 with δ = {thickness} > 0"
            )));
        }
        Ok(Self { z, thickness })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn thickness(&self) -> f64 {
        self.thickness
    }
}

#[derive(Debug, Clone)]
pub struct LayerStrains {
    pub eps1: ScalarField,
    pub eps2: ScalarField,
    pub om: ScalarField,
}

/// Normal and shear strains on the layer at offset z under the Kirchhoff–Love
/// hypothesis.
pub fn layer_strains(
    geom: &SurfaceGeometry,
    state: &StrainState,
    layer: LayerParams,
) -> Result<LayerStrains> {
    const MIN_DENOM: f64 = 1e-12;
    let z = layer.z;
    let grid = *geom.grid();
    let (ir1, ir2) = (geom.inv_r1(), geom.inv_r2());
    let mut eps1 = ScalarField::zeros(grid);
    let mut eps2 = ScalarField::zeros(grid);
    let mut om = ScalarField::zeros(grid);
    for (i, j) in grid.indices() {
        let (a, b) = (ir1.at(i, j), ir2.at(i, j));
        // ℋ = −(1/R₁ + 1/R₂)/2, 𝒦 = 1/(R₁R₂)
        let mean = -0.5 * (a + b);
        let gauss = a * b;
        let d1 = 1.0 + z * a;
        let d2 = 1.0 + z * b;
        let d3 = 1.0 - 2.0 * mean * z + gauss * z * z;
        if d1.abs() < MIN_DENOM || d2.abs() < MIN_DENOM || d3.abs() < MIN_DENOM {
            return Err(Error::DegenerateLayer { z, i, j });
        }
        eps1.set(i, j, (state.eps1.at(i, j) - z * state.k1.at(i, j)) / d1);
        eps2.set(i, j, (state.eps2.at(i, j) - z * state.k2.at(i, j)) / d2);
        let num = (1.0 - z * z * gauss) * state.om.at(i, j)
            + 2.0 * (1.0 + z * mean) * z * state.tau.at(i, j);
        om.set(i, j, num / d3);
    }
    Ok(LayerStrains { eps1, eps2, om })
}

fn omega_field(state: &StrainState) -> MatrixField {
    let s = state;
    let z = ScalarField::zeros(*s.grid());
    let neg_theta = -&s.theta;
    let neg_psi = -&s.psi;
    MatrixField::from_entries([
        [&z, &s.om2, &s.theta],
        [&s.om1, &z, &s.psi],
        [&neg_theta, &neg_psi, &z],
    ])
}

/// L′ = Ω_α + [L, Ω] and M′ = Ω_β + [M, Ω] over the grid.
pub fn lm_prime_commutator_fields(
    geom: &SurfaceGeometry,
    state: &StrainState,
) -> (MatrixField, MatrixField) {
    let (l, m) = gw_matrix_fields(geom);
    let omega = omega_field(state);
    let l_prime = omega
        .diff_alpha()
        .zip_map(&l.zip_map(&omega, commutator), |a, b| a + b);
    let m_prime = omega
        .diff_beta()
        .zip_map(&m.zip_map(&omega, commutator), |a, b| a + b);
    (l_prime, m_prime)
}

/// L′ and M′ assembled entry by entry from P, Q, H∘′, K∘′, ω and τ.
///
/// The (2,3) entry of M′ is K∘′: expanding Ω_β + [M, Ω] gives ψ_β + qϑ there.
pub fn lm_prime_explicit_fields(
    geom: &SurfaceGeometry,
    state: &StrainState,
) -> (MatrixField, MatrixField) {
    let g = geom;
    let s = state;
    let z = ScalarField::zeros(*g.grid());
    let p_om = &g.p * &s.om;
    let q_om = &g.q * &s.om;
    let tau_a1 = &s.tau * &g.a1;
    let tau_a2 = &s.tau * &g.a2;

    let l12 = &s.p + &s.om.diff_alpha();
    let l23 = &tau_a1 - &(&g.hc * &s.om);
    let l_prime = MatrixField::from_entries([
        [&p_om, &l12, &s.hp],
        [&(-&s.p), &(-&p_om), &l23],
        [&(-&s.hp), &(-&tau_a1), &z],
    ]);

    let m13 = &tau_a2 - &(&g.kc * &s.om);
    let m21 = &s.q + &s.om.diff_beta();
    let m_prime = MatrixField::from_entries([
        [&(-&q_om), &(-&s.q), &m13],
        [&m21, &q_om, &s.kp],
        [&(-&tau_a2), &(-&s.kp), &z],
    ]);
    (l_prime, m_prime)
}

/// (L′, M′) at one node, commutator form.
pub fn lm_prime_commutator(
    geom: &SurfaceGeometry,
    state: &StrainState,
    i: usize,
    j: usize,
) -> (Matrix3<f64>, Matrix3<f64>) {
    let (l, m) = lm_prime_commutator_fields(geom, state);
    (*l.at(i, j), *m.at(i, j))
}

/// (L′, M′) at one node, explicit form.
pub fn lm_prime_explicit(
    geom: &SurfaceGeometry,
    state: &StrainState,
    i: usize,
    j: usize,
) -> (Matrix3<f64>, Matrix3<f64>) {
    let (l, m) = lm_prime_explicit_fields(geom, state);
    (*l.at(i, j), *m.at(i, j))
}

/// Entrywise max |explicit − commutator| over both matrices, per point.
pub fn lm_prime_difference(geom: &SurfaceGeometry, state: &StrainState) -> ScalarField {
    let (lc, mc) = lm_prime_commutator_fields(geom, state);
    let (le, me) = lm_prime_explicit_fields(geom, state);
    let dl = le.zip_map(&lc, |a, b| a - b).max_entry();
    let dm = me.zip_map(&mc, |a, b| a - b).max_entry();
    dl.zip_with(&dm, f64::max)
}

#[derive(Debug, Clone)]
pub struct CompatibilityResiduals {
    pub r1: ScalarField,
    pub r2: ScalarField,
    pub r3: ScalarField,
}

impl CompatibilityResiduals {
    pub fn fields(&self) -> [&ScalarField; 3] {
        [&self.r1, &self.r2, &self.r3]
    }
}

/// The three compatibility equations for the six strains:
///
/// g1 = P_β + Q_α + ω_αβ + H∘′K∘ + H∘K∘′
/// g2 = (H∘′)_β − (PK∘ + pK∘′) − [(τA₂)_α + τ(A₂)_α − ω(K∘)_α]
/// g3 = (K∘′)_α − (QH∘ + qH∘′) − [(τA₁)_β + τ(A₁)_β − ω(H∘)_β]
pub fn goldenweizer_residuals(
    geom: &SurfaceGeometry,
    state: &StrainState,
) -> CompatibilityResiduals {
    let g = geom;
    let s = state;
    let r1 = s.p.diff_beta()
        + &s.q.diff_alpha()
        + &s.om.diff_alpha_beta()
        + &(&s.hp * &g.kc)
        + &(&g.hc * &s.kp);
    let r2 = s.hp.diff_beta()
        - &(&s.p * &g.kc)
        - &(&g.p * &s.kp)
        - &(&s.tau * &g.a2).diff_alpha()
        - &(&s.tau * &g.a2.diff_alpha())
        + &(&s.om * &g.kc.diff_alpha());
    let r3 = s.kp.diff_alpha()
        - &(&s.q * &g.hc)
        - &(&g.q * &s.hp)
        - &(&s.tau * &g.a1).diff_beta()
        - &(&s.tau * &g.a1.diff_beta())
        + &(&s.om * &g.hc.diff_beta());
    CompatibilityResiduals { r1, r2, r3 }
}

/// Per-point Frobenius norm of L′_β − M′_α − [L′, M] − [L, M′] with the
/// explicit L′, M′.
pub fn goldenweizer_matrix_residual(geom: &SurfaceGeometry, state: &StrainState) -> ScalarField {
    let (l, m) = gw_matrix_fields(geom);
    let (lp, mp) = lm_prime_explicit_fields(geom, state);
    let lhs = lp.diff_beta().zip_map(&mp.diff_alpha(), |a, b| a - b);
    let rhs = lp
        .zip_map(&m, commutator)
        .zip_map(&l.zip_map(&mp, commutator), |a, b| a + b);
    lhs.zip_map(&rhs, |a, b| a - b).frobenius()
}

/// The compatibility equations written with curvature radii and the strains
/// directly. `r1` corresponds to the first Gol'denweizer residual divided by
/// A₁A₂, `r2` and `r3` to the second and third unscaled.
///
/// The normal-curvature term of the first equation is −k₁/R₂ − k₂/R₁, the
/// pairing that H∘′K∘ + H∘K∘′ produces after division by A₁A₂.
pub fn novozhilov_residuals(geom: &SurfaceGeometry, state: &StrainState) -> CompatibilityResiduals {
    let g = geom;
    let s = state;
    let (ir1, ir2) = (g.inv_r1(), g.inv_r2());
    let a1_b = g.a1.diff_beta();
    let a2_a = g.a2.diff_alpha();
    let (pt, qt) = split_pq(g, s);
    let r1 = -(&s.k1 * &ir2) - &(&s.k2 * &ir1)
        + &((qt.diff_alpha() + &pt.diff_beta()) / &(&g.a1 * &g.a2));
    let p_num = (&g.a1 * &s.eps1).diff_beta() - &(&g.a2 * &s.om).diff_alpha() - &(&s.eps2 * &a1_b);
    let q_num = (&g.a2 * &s.eps2).diff_alpha() - &(&g.a1 * &s.om).diff_beta() - &(&s.eps1 * &a2_a);
    let r2 = (-(&g.a1 * &s.k1)).diff_beta() + &(&s.k2 * &a1_b)
        - &(&g.a2 * &s.tau).diff_alpha()
        - &(&s.tau * &a2_a)
        + &(&s.om * &ir1 * &a2_a)
        - &(&ir2 * &p_num);
    let r3 = (-(&g.a2 * &s.k2)).diff_alpha() + &(&s.k1 * &a2_a)
        - &(&g.a1 * &s.tau).diff_beta()
        - &(&s.tau * &a1_b)
        + &(&s.om * &ir2 * &a1_b)
        - &(&ir1 * &q_num);
    CompatibilityResiduals { r1, r2, r3 }
}

/// Pointwise differences between the Novozhilov triple and the Gol'denweizer
/// triple rescaled to match (g1/(A₁A₂), g2, g3).
pub fn cross_form_difference(
    geom: &SurfaceGeometry,
    state: &StrainState,
) -> CompatibilityResiduals {
    let g = goldenweizer_residuals(geom, state);
    let n = novozhilov_residuals(geom, state);
    CompatibilityResiduals {
        r1: n.r1 - &(g.r1 / &(&geom.a1 * &geom.a2)),
        r2: n.r2 - &g.r2,
        r3: n.r3 - &g.r3,
    }
}

/// t1, t2: the two tangential conditions (LHS − RHS, each multiplied out);
/// t3 = (A₁ϑ)_β − (A₂ψ)_α + (ω₁/R₂ − ω₂/R₁)A₁A₂.
pub fn tangential_compat_residuals(
    geom: &SurfaceGeometry,
    state: &StrainState,
) -> CompatibilityResiduals {
    let g = geom;
    let s = state;
    let r1 = (&g.a1 * &s.eps1).diff_beta()
        - &(&g.a2 * &s.om).diff_alpha()
        - &(&s.eps2 * &g.a1.diff_beta())
        + &((s.om1.diff_alpha() + &(&g.hc * &s.psi)) * &g.a2);
    let r2 = (&g.a2 * &s.eps2).diff_alpha()
        - &(&g.a1 * &s.om).diff_beta()
        - &(&s.eps1 * &g.a2.diff_alpha())
        + &((s.om2.diff_beta() + &(&g.kc * &s.theta)) * &g.a1);
    let r3 = (&g.a1 * &s.theta).diff_beta() - &(&g.a2 * &s.psi).diff_alpha()
        + &((&s.om1 * &g.inv_r2() - &(&s.om2 * &g.inv_r1())) * &(&g.a1 * &g.a2));
    CompatibilityResiduals { r1, r2, r3 }
}

/// With R = r + Δ, c1 = |R_α/A₁ − ((1+ε₁)e₁ + ω₁e₂ − ϑN)| and
/// c2 = |R_β/A₂ − (ω₂e₁ + (1+ε₂)e₂ − ψN)|, derivatives by FD.
pub fn deformation_consistency(
    geom: &SurfaceGeometry,
    frames: &FrameField,
    positions: &VectorField3,
    disp: &DisplacementField,
) -> Result<(ScalarField, ScalarField)> {
    let grid = *geom.grid();
    if *frames.grid() != grid || *positions.grid() != grid || *disp.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let s = strains_from_displacement(geom, disp)?;
    let deformed: Vec<Vector3<f64>> = (0..grid.len())
        .map(|k| {
            let m = &frames.matrices()[k];
            positions.vectors()[k]
                + disp.u.values()[k] * m.column(0)
                + disp.v.values()[k] * m.column(1)
                + disp.w.values()[k] * m.column(2)
        })
        .collect();
    let deformed = VectorField3::new(grid, deformed)?;
    let (ra, rb) = (deformed.diff_alpha(), deformed.diff_beta());
    let mut c1 = ScalarField::zeros(grid);
    let mut c2 = ScalarField::zeros(grid);
    for (i, j) in grid.indices() {
        let f = frames.at(i, j);
        let (e1, e2, n) = (f.e1(), f.e2(), f.normal());
        let t1 = (1.0 + s.eps1.at(i, j)) * e1 + s.om1.at(i, j) * e2 - s.theta.at(i, j) * n;
        let t2 = s.om2.at(i, j) * e1 + (1.0 + s.eps2.at(i, j)) * e2 - s.psi.at(i, j) * n;
        c1.set(i, j, (ra.at(i, j) / geom.a1.at(i, j) - t1).norm());
        c2.set(i, j, (rb.at(i, j) / geom.a2.at(i, j) - t2).norm());
    }
    Ok((c1, c2))
}
