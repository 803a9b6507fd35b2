//! Moving frames Φ = (e₁, e₂, N) and positions reconstructed from surface data
//! by integrating the Gauss–Weingarten system Φ_α = ΦL, Φ_β = ΦM.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField};
use crate::surface::{Coefficients, SurfaceGeometry};

const ORTHONORMAL_TOL: f64 = 1e-10;
const MAX_STEP_DRIFT: f64 = 1e-3;

/// Orthonormal, positively oriented 3×3 frame with columns (e₁, e₂, N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame3(Matrix3<f64>);

impl Frame3 {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let dev = orthonormality_defect(&m).max((m.determinant() - 1.0).abs());
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn e1(&self) -> Vector3<f64> {
        self.0.column(0).into()
    }

    pub fn e2(&self) -> Vector3<f64> {
        self.0.column(1).into()
    }

    pub fn normal(&self) -> Vector3<f64> {
        self.0.column(2).into()
    }
}

/// max |ΦᵀΦ − I| entry.
pub fn orthonormality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).amax()
}

/// Gram–Schmidt on the columns in the order e₁, e₂, N.
pub fn gram_schmidt(m: &Matrix3<f64>) -> Matrix3<f64> {
    let e1 = m.column(0).normalize();
    let c2 = m.column(1) - e1 * e1.dot(&m.column(1));
    let e2 = c2.normalize();
    let c3 = m.column(2) - e1 * e1.dot(&m.column(2)) - e2 * e2.dot(&m.column(2));
    let n = c3.normalize();
    Matrix3::from_columns(&[e1, e2, n])
}

/// Per-point 3×3 matrices on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    grid: Grid2D,
    data: Vec<Matrix3<f64>>,
}

impl MatrixField {
    pub fn new(grid: Grid2D, data: Vec<Matrix3<f64>>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::FieldSize {
                got: data.len(),
                n_alpha: grid.n_alpha(),
                n_beta: grid.n_beta(),
            });
        }
        Ok(Self { grid, data })
    }

    pub fn from_index_fn(grid: Grid2D, f: impl Fn(usize, usize) -> Matrix3<f64>) -> Self {
        Self {
            grid,
            data: grid.indices().map(|(i, j)| f(i, j)).collect(),
        }
    }

    /// Assembles a matrix field from nine entry fields given row by row.
    pub fn from_entries(entries: [[&ScalarField; 3]; 3]) -> Self {
        let grid = *entries[0][0].grid();
        for row in &entries {
            for e in row {
                assert_eq!(*e.grid(), grid, "matrix entries on different grids");
            }
        }
        Self::from_index_fn(grid, |i, j| Matrix3::from_fn(|r, c| entries[r][c].at(i, j)))
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn at(&self, i: usize, j: usize) -> &Matrix3<f64> {
        &self.data[self.grid.index(i, j)]
    }

    pub fn data(&self) -> &[Matrix3<f64>] {
        &self.data
    }

    pub fn entry(&self, r: usize, c: usize) -> ScalarField {
        ScalarField::new(self.grid, self.data.iter().map(|m| m[(r, c)]).collect())
            .expect("entry field matches grid")
    }

    fn map_entries(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        let mut data = vec![Matrix3::zeros(); self.data.len()];
        for r in 0..3 {
            for c in 0..3 {
                let d = f(&self.entry(r, c));
                for (m, v) in data.iter_mut().zip(d.values()) {
                    m[(r, c)] = *v;
                }
            }
        }
        Self {
            grid: self.grid,
            data,
        }
    }

    /// Entrywise ∂/∂α.
    pub fn diff_alpha(&self) -> Self {
        self.map_entries(ScalarField::diff_alpha)
    }

    /// Entrywise ∂/∂β.
    pub fn diff_beta(&self) -> Self {
        self.map_entries(ScalarField::diff_beta)
    }

    pub fn zip_map(
        &self,
        other: &Self,
        f: impl Fn(&Matrix3<f64>, &Matrix3<f64>) -> Matrix3<f64>,
    ) -> Self {
        assert_eq!(self.grid, other.grid, "matrix fields on different grids");
        Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Per-point Frobenius norm.
    pub fn frobenius(&self) -> ScalarField {
        ScalarField::new(self.grid, self.data.iter().map(|m| m.norm()).collect())
            .expect("norm field matches grid")
    }

    /// Per-point max-abs entry.
    pub fn max_entry(&self) -> ScalarField {
        ScalarField::new(self.grid, self.data.iter().map(|m| m.amax()).collect())
            .expect("norm field matches grid")
    }
}

/// [X, Y] = XY − YX
#[inline]
pub fn commutator(x: &Matrix3<f64>, y: &Matrix3<f64>) -> Matrix3<f64> {
    x * y - y * x
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    grid: Grid2D,
    frames: Vec<Matrix3<f64>>,
}

impl FrameField {
    pub fn new(grid: Grid2D, frames: Vec<Matrix3<f64>>) -> Result<Self> {
        if frames.len() != grid.len() {
            return Err(Error::FieldSize {
                got: frames.len(),
                n_alpha: grid.n_alpha(),
                n_beta: grid.n_beta(),
            });
        }
        if let Some(dev) = frames
            .iter()
            .map(|m| orthonormality_defect(m).max((m.determinant() - 1.0).abs()))
            .find(|&d| d > ORTHONORMAL_TOL)
        {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { grid, frames })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn at(&self, i: usize, j: usize) -> Frame3 {
        Frame3(self.frames[self.grid.index(i, j)])
    }

    pub fn matrices(&self) -> &[Matrix3<f64>] {
        &self.frames
    }

    /// Component `k` (0 = x, 1 = y, 2 = z) of frame column `col` as a scalar field.
    pub fn component(&self, col: usize, k: usize) -> ScalarField {
        ScalarField::new(self.grid, self.frames.iter().map(|m| m[(k, col)]).collect())
            .expect("component matches grid")
    }

    pub fn column(&self, col: usize) -> VectorField3 {
        VectorField3 {
            grid: self.grid,
            vectors: self.frames.iter().map(|m| m.column(col).into()).collect(),
        }
    }

    /// CSV with columns `alpha,beta,e1x,e1y,e1z,e2x,e2y,e2z,nx,ny,nz`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "alpha,beta,e1x,e1y,e1z,e2x,e2y,e2z,nx,ny,nz")?;
        for (i, j) in self.grid.indices() {
            let m = &self.frames[self.grid.index(i, j)];
            write!(
                out,
                "{:.16e},{:.16e}",
                self.grid.alpha(i),
                self.grid.beta(j)
            )?;
            for col in 0..3 {
                for k in 0..3 {
                    write!(out, ",{:.16e}", m[(k, col)])?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    grid: Grid2D,
    vectors: Vec<Vector3<f64>>,
}

impl VectorField3 {
    pub fn new(grid: Grid2D, vectors: Vec<Vector3<f64>>) -> Result<Self> {
        if vectors.len() != grid.len() {
            return Err(Error::FieldSize {
                got: vectors.len(),
                n_alpha: grid.n_alpha(),
                n_beta: grid.n_beta(),
            });
        }
        if vectors.iter().any(|v| !v.iter().all(|x| x.is_finite())) {
            return Err(Error::NonFinite("vector field"));
        }
        Ok(Self { grid, vectors })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Vector3<f64>) -> Self {
        Self {
            grid,
            vectors: grid
                .indices()
                .map(|(i, j)| f(grid.alpha(i), grid.beta(j)))
                .collect(),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn at(&self, i: usize, j: usize) -> Vector3<f64> {
        self.vectors[self.grid.index(i, j)]
    }

    pub fn vectors(&self) -> &[Vector3<f64>] {
        &self.vectors
    }

    pub fn component(&self, k: usize) -> ScalarField {
        ScalarField::new(self.grid, self.vectors.iter().map(|v| v[k]).collect())
            .expect("component matches grid")
    }

    fn from_components(c: [ScalarField; 3]) -> Self {
        let grid = *c[0].grid();
        Self {
            grid,
            vectors: (0..grid.len())
                .map(|k| Vector3::new(c[0].values()[k], c[1].values()[k], c[2].values()[k]))
                .collect(),
        }
    }

    pub fn diff_alpha(&self) -> Self {
        Self::from_components([0, 1, 2].map(|k| self.component(k).diff_alpha()))
    }

    pub fn diff_beta(&self) -> Self {
        Self::from_components([0, 1, 2].map(|k| self.component(k).diff_beta()))
    }

    /// Pointwise Euclidean norm.
    pub fn norm(&self) -> ScalarField {
        ScalarField::new(self.grid, self.vectors.iter().map(|v| v.norm()).collect())
            .expect("norm matches grid")
    }

    /// Pointwise dot product.
    pub fn dot(&self, other: &Self) -> ScalarField {
        assert_eq!(self.grid, other.grid, "vector fields on different grids");
        ScalarField::new(
            self.grid,
            self.vectors
                .iter()
                .zip(&other.vectors)
                .map(|(a, b)| a.dot(b))
                .collect(),
        )
        .expect("dot matches grid")
    }

    pub fn zip_map(
        &self,
        other: &Self,
        f: impl Fn(&Vector3<f64>, &Vector3<f64>) -> Vector3<f64>,
    ) -> Self {
        assert_eq!(self.grid, other.grid, "vector fields on different grids");
        Self {
            grid: self.grid,
            vectors: self
                .vectors
                .iter()
                .zip(&other.vectors)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Scales each vector by the matching scalar.
    pub fn scale_by(&self, s: &ScalarField) -> Self {
        assert_eq!(self.grid, *s.grid(), "scaling across different grids");
        Self {
            grid: self.grid,
            vectors: self
                .vectors
                .iter()
                .zip(s.values())
                .map(|(v, &k)| v * k)
                .collect(),
        }
    }

    /// CSV with columns `alpha,beta,x,y,z`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "alpha,beta,x,y,z")?;
        for (i, j) in self.grid.indices() {
            let v = self.at(i, j);
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                self.grid.alpha(i),
                self.grid.beta(j),
                v.x,
                v.y,
                v.z
            )?;
        }
        Ok(())
    }
}

fn l_matrix(c: &Coefficients) -> Matrix3<f64> {
    Matrix3::new(0.0, c.p, c.hc, -c.p, 0.0, 0.0, -c.hc, 0.0, 0.0)
}

fn m_matrix(c: &Coefficients) -> Matrix3<f64> {
    Matrix3::new(0.0, -c.q, 0.0, c.q, 0.0, c.kc, 0.0, -c.kc, 0.0)
}

/// Gauss–Weingarten matrices (L, M) at grid node (i, j).
pub fn gw_matrices(geom: &SurfaceGeometry, i: usize, j: usize) -> (Matrix3<f64>, Matrix3<f64>) {
    let c = geom.node_coefficients(i, j);
    (l_matrix(&c), m_matrix(&c))
}

/// L and M over the whole grid.
pub fn gw_matrix_fields(geom: &SurfaceGeometry) -> (MatrixField, MatrixField) {
    let grid = *geom.grid();
    (
        MatrixField::from_index_fn(grid, |i, j| gw_matrices(geom, i, j).0),
        MatrixField::from_index_fn(grid, |i, j| gw_matrices(geom, i, j).1),
    )
}

#[derive(Clone, Copy)]
enum Direction {
    Alpha,
    Beta,
}

/// Supplies the system matrix at node (i, j) and at the midpoint towards the
/// next node in `dir`.
struct MatrixSource<'a> {
    geom: &'a SurfaceGeometry,
}

impl MatrixSource<'_> {
    fn node(&self, dir: Direction, i: usize, j: usize) -> Matrix3<f64> {
        let (l, m) = gw_matrices(self.geom, i, j);
        match dir {
            Direction::Alpha => l,
            Direction::Beta => m,
        }
    }

    fn half(&self, dir: Direction, i: usize, j: usize) -> Matrix3<f64> {
        let g = self.geom.grid();
        let (a, b, ni, nj) = match dir {
            Direction::Alpha => (g.alpha(i) + 0.5 * g.h_alpha(), g.beta(j), i + 1, j),
            Direction::Beta => (g.alpha(i), g.beta(j) + 0.5 * g.h_beta(), i, j + 1),
        };
        match self.geom.coefficients_at(a, b) {
            Some(c) => match dir {
                Direction::Alpha => l_matrix(&c),
                Direction::Beta => m_matrix(&c),
            },
            None => 0.5 * (self.node(dir, i, j) + self.node(dir, ni, nj)),
        }
    }

    /// One RK4 step of Φ' = Φ X from node (i, j) to its neighbour in `dir`,
    /// followed by re-orthonormalization.
    fn step(&self, phi: &Matrix3<f64>, dir: Direction, i: usize, j: usize) -> Result<Matrix3<f64>> {
        let g = self.geom.grid();
        let (h, ni, nj) = match dir {
            Direction::Alpha => (g.h_alpha(), i + 1, j),
            Direction::Beta => (g.h_beta(), i, j + 1),
        };
        let x0 = self.node(dir, i, j);
        let xh = self.half(dir, i, j);
        let x1 = self.node(dir, ni, nj);
        let k1 = phi * x0;
        let k2 = (phi + 0.5 * h * k1) * xh;
        let k3 = (phi + 0.5 * h * k2) * xh;
        let k4 = (phi + h * k3) * x1;
        let next = phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let drift = orthonormality_defect(&next);
        if drift > MAX_STEP_DRIFT {
            return Err(Error::StepTooCoarse {
                drift,
                i: ni,
                j: nj,
            });
        }
        Ok(gram_schmidt(&next))
    }
}

#[derive(Debug, Clone)]
pub struct FrameIntegration {
    /// Row-first path: along α on the first β-row, then up every column in β.
    pub frames: FrameField,
    /// Frobenius distance between the row-first and column-first paths.
    pub closure: ScalarField,
}

fn integrate_path(
    src: &MatrixSource<'_>,
    phi0: &Matrix3<f64>,
    row_first: bool,
) -> Result<Vec<Matrix3<f64>>> {
    let g = *src.geom.grid();
    let (na, nb) = (g.n_alpha(), g.n_beta());
    let mut out = vec![Matrix3::zeros(); g.len()];
    out[0] = *phi0;
    if row_first {
        for i in 0..na - 1 {
            out[g.index(i + 1, 0)] = src.step(&out[g.index(i, 0)], Direction::Alpha, i, 0)?;
        }
        for i in 0..na {
            for j in 0..nb - 1 {
                out[g.index(i, j + 1)] = src.step(&out[g.index(i, j)], Direction::Beta, i, j)?;
            }
        }
    } else {
        for j in 0..nb - 1 {
            out[g.index(0, j + 1)] = src.step(&out[g.index(0, j)], Direction::Beta, 0, j)?;
        }
        for j in 0..nb {
            for i in 0..na - 1 {
                out[g.index(i + 1, j)] = src.step(&out[g.index(i, j)], Direction::Alpha, i, j)?;
            }
        }
    }
    Ok(out)
}

/// Integrates the Gauss–Weingarten system from `phi0` at node (0, 0).
///
/// Midpoint matrices come from the analytic closures when the geometry has
/// them; otherwise the endpoint average is used, which limits the scheme to
/// second order. The closure residual is zero up to truncation error exactly
/// when the Gauss–Mainardi–Codazzi equations hold.
pub fn integrate_frames(geom: &SurfaceGeometry, phi0: Frame3) -> Result<FrameIntegration> {
    let src = MatrixSource { geom };
    let grid = *geom.grid();
    let row = integrate_path(&src, phi0.matrix(), true)?;
    let col = integrate_path(&src, phi0.matrix(), false)?;
    let closure = ScalarField::new(
        grid,
        row.iter().zip(&col).map(|(a, b)| (a - b).norm()).collect(),
    )?;
    Ok(FrameIntegration {
        frames: FrameField::new(grid, row)?,
        closure,
    })
}

/// Integrates r_α = A₁e₁ along the first β-row and r_β = A₂e₂ up each column,
/// starting from `r0` at node (0, 0).
///
/// Uses the two-point Hermite rule ∫f ≈ h(f₀+f₁)/2 + h²(f₀′−f₁′)/12, with f′
/// taken from the Gauss formulas, so the quadrature is fourth order.
pub fn reconstruct_positions(
    geom: &SurfaceGeometry,
    frames: &FrameField,
    r0: Vector3<f64>,
) -> Result<VectorField3> {
    let grid = *geom.grid();
    if *frames.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let (na, nb) = (grid.n_alpha(), grid.n_beta());
    let (ha, hb) = (grid.h_alpha(), grid.h_beta());
    let fd_a1_alpha = geom.a1.diff_alpha();
    let fd_a2_beta = geom.a2.diff_beta();

    // f = A₁e₁, f' = (A₁)_α e₁ + A₁(−p e₂ − H∘N)
    let along_alpha = |i: usize, j: usize| {
        let c = geom.node_coefficients(i, j);
        let a1_alpha = if c.a1_alpha.is_finite() {
            c.a1_alpha
        } else {
            fd_a1_alpha.at(i, j)
        };
        let f = frames.at(i, j);
        let val = c.a1 * f.e1();
        let der = a1_alpha * f.e1() + c.a1 * (-c.p * f.e2() - c.hc * f.normal());
        (val, der)
    };
    // g = A₂e₂, g' = (A₂)_β e₂ + A₂(−q e₁ − K∘N)
    let along_beta = |i: usize, j: usize| {
        let c = geom.node_coefficients(i, j);
        let a2_beta = if c.a2_beta.is_finite() {
            c.a2_beta
        } else {
            fd_a2_beta.at(i, j)
        };
        let f = frames.at(i, j);
        let val = c.a2 * f.e2();
        let der = a2_beta * f.e2() + c.a2 * (-c.q * f.e1() - c.kc * f.normal());
        (val, der)
    };

    let mut r = vec![Vector3::zeros(); grid.len()];
    r[0] = r0;
    for i in 0..na - 1 {
        let (f0, d0) = along_alpha(i, 0);
        let (f1, d1) = along_alpha(i + 1, 0);
        r[grid.index(i + 1, 0)] =
            r[grid.index(i, 0)] + 0.5 * ha * (f0 + f1) + (ha * ha / 12.0) * (d0 - d1);
    }
    for i in 0..na {
        for j in 0..nb - 1 {
            let (f0, d0) = along_beta(i, j);
            let (f1, d1) = along_beta(i, j + 1);
            r[grid.index(i, j + 1)] =
                r[grid.index(i, j)] + 0.5 * hb * (f0 + f1) + (hb * hb / 12.0) * (d0 - d1);
        }
    }
    VectorField3::new(grid, r)
}

/// Exact frames and positions from the catalog closures, when attached.
pub fn analytic_frames(geom: &SurfaceGeometry) -> Option<(FrameField, VectorField3)> {
    let a = geom.analytic()?;
    let (pos, frame) = (a.position.as_ref()?, a.frame.as_ref()?);
    let grid = *geom.grid();
    let frames = grid
        .indices()
        .map(|(i, j)| frame(grid.alpha(i), grid.beta(j)))
        .collect();
    Some((
        FrameField::new(grid, frames).ok()?,
        VectorField3::from_fn(grid, |a, b| pos(a, b)),
    ))
}

/// Exact frame at node (0, 0), when a frame closure is attached.
pub fn initial_frame(geom: &SurfaceGeometry) -> Option<Frame3> {
    let f = geom.analytic()?.frame.as_ref()?;
    let g = geom.grid();
    Frame3::new(f(g.alpha(0), g.beta(0))).ok()
}

/// Pointwise |N_α + κ₁r_α| and |N_β + κ₂r_β| with FD derivatives.
pub fn weingarten_residual(
    geom: &SurfaceGeometry,
    frames: &FrameField,
    positions: &VectorField3,
) -> Result<(ScalarField, ScalarField)> {
    let grid = *geom.grid();
    if *frames.grid() != grid || *positions.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let kappa1 = -(&geom.hc / &geom.a1);
    let kappa2 = -(&geom.kc / &geom.a2);
    let normal = frames.column(2);
    let res1 = normal
        .diff_alpha()
        .zip_map(&positions.diff_alpha().scale_by(&kappa1), |a, b| a + b)
        .norm();
    let res2 = normal
        .diff_beta()
        .zip_map(&positions.diff_beta().scale_by(&kappa2), |a, b| a + b)
        .norm();
    Ok((res1, res2))
}
