//! Uniform rectangular (α, β) grids, scalar fields living on them, and the
//! second-order finite-difference operators every residual is built from.
//!
//! Values are stored row-major with α as the outer index: the value at
//! `(i, j)` lives at `i * n_beta + j`.

use std::io::{BufRead, Write};
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n_alpha: usize,
    n_beta: usize,
    alpha0: f64,
    beta0: f64,
    h_alpha: f64,
    h_beta: f64,
}

impl Grid2D {
    pub fn new(
        n_alpha: usize,
        n_beta: usize,
        alpha0: f64,
        beta0: f64,
        h_alpha: f64,
        h_beta: f64,
    ) -> Result<Self> {
        if n_alpha < 3 || n_beta < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points per direction, got {n_alpha}x{n_beta}"
            )));
        }
        if !(h_alpha > 0.0 && h_beta > 0.0) || !h_alpha.is_finite() || !h_beta.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "spacings must be positive, got ({h_alpha}, {h_beta})"
            )));
        }
        if !alpha0.is_finite() || !beta0.is_finite() {
            return Err(Error::InvalidGrid("non-finite origin".into()));
        }
        Ok(Self {
            n_alpha,
            n_beta,
            alpha0,
            beta0,
            h_alpha,
            h_beta,
        })
    }

    /// Grid spanning the closed ranges `alpha` and `beta` end to end.
    pub fn from_ranges(
        n_alpha: usize,
        n_beta: usize,
        alpha: (f64, f64),
        beta: (f64, f64),
    ) -> Result<Self> {
        if n_alpha < 2 || n_beta < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points per direction, got {n_alpha}x{n_beta}"
            )));
        }
        let h_alpha = (alpha.1 - alpha.0) / (n_alpha - 1) as f64;
        let h_beta = (beta.1 - beta.0) / (n_beta - 1) as f64;
        Self::new(n_alpha, n_beta, alpha.0, beta.0, h_alpha, h_beta)
    }

    /// Square `n x n` grid over the given ranges.
    pub fn square(n: usize, alpha: (f64, f64), beta: (f64, f64)) -> Result<Self> {
        Self::from_ranges(n, n, alpha, beta)
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn h_alpha(&self) -> f64 {
        self.h_alpha
    }

    pub fn h_beta(&self) -> f64 {
        self.h_beta
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn len(&self) -> usize {
        self.n_alpha * self.n_beta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn alpha(&self, i: usize) -> f64 {
        self.alpha0 + i as f64 * self.h_alpha
    }

    #[inline]
    pub fn beta(&self, j: usize) -> f64 {
        self.beta0 + j as f64 * self.h_beta
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_beta + j
    }

    pub fn alpha_range(&self) -> (f64, f64) {
        (self.alpha0, self.alpha(self.n_alpha - 1))
    }

    pub fn beta_range(&self) -> (f64, f64) {
        (self.beta0, self.beta(self.n_beta - 1))
    }

    /// Row-major `(i, j)` pairs.
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nb = self.n_beta;
        (0..self.n_alpha).flat_map(move |i| (0..nb).map(move |j| (i, j)))
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n_alpha || j + 1 == self.n_beta
    }
}

/// Discrete norms of a field over the points left after trimming boundary rings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub linf: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::FieldSize {
                got: values.len(),
                n_alpha: grid.n_alpha,
                n_beta: grid.n_beta,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(α, β)` at every grid point.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid
            .indices()
            .map(|(i, j)| f(grid.alpha(i), grid.beta(j)))
            .collect();
        Self { grid, values }
    }

    /// Fills the field from index-based closure `f(i, j)`.
    pub fn from_index_fn(grid: Grid2D, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = grid.indices().map(|(i, j)| f(i, j)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "zip_with across different grids");
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(self, name: &'static str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFinite(name))
        }
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn ensure_positive(&self, name: &'static str) -> Result<()> {
        for (i, j) in self.grid.indices() {
            let v = self.at(i, j);
            if !(v > 0.0) {
                return Err(Error::NonPositive {
                    name,
                    value: v,
                    i,
                    j,
                });
            }
        }
        Ok(())
    }

    /// ∂/∂α with second-order central differences inside and second-order
    /// one-sided three-point stencils on the two α-boundaries.
    pub fn diff_alpha(&self) -> Self {
        let g = self.grid;
        let (na, nb) = (g.n_alpha, g.n_beta);
        let inv2h = 0.5 / g.h_alpha;
        let f = &self.values;
        let mut out = vec![0.0; f.len()];
        for j in 0..nb {
            let at = |i: usize| f[i * nb + j];
            out[j] = (4.0 * (at(1) - at(0)) - (at(2) - at(0))) * inv2h;
            for i in 1..na - 1 {
                out[i * nb + j] = (at(i + 1) - at(i - 1)) * inv2h;
            }
            let l = na - 1;
            out[l * nb + j] = (4.0 * (at(l) - at(l - 1)) - (at(l) - at(l - 2))) * inv2h;
        }
        Self {
            grid: g,
            values: out,
        }
    }

    /// ∂/∂β, same stencils as [`ScalarField::diff_alpha`] along the other axis.
    pub fn diff_beta(&self) -> Self {
        let g = self.grid;
        let (na, nb) = (g.n_alpha, g.n_beta);
        let inv2h = 0.5 / g.h_beta;
        let mut out = vec![0.0; self.values.len()];
        for i in 0..na {
            let row = &self.values[i * nb..(i + 1) * nb];
            let dst = &mut out[i * nb..(i + 1) * nb];
            dst[0] = (4.0 * (row[1] - row[0]) - (row[2] - row[0])) * inv2h;
            for j in 1..nb - 1 {
                dst[j] = (row[j + 1] - row[j - 1]) * inv2h;
            }
            let l = nb - 1;
            dst[l] = (4.0 * (row[l] - row[l - 1]) - (row[l] - row[l - 2])) * inv2h;
        }
        Self {
            grid: g,
            values: out,
        }
    }

    /// Compact ∂²/∂α². Boundary rows use the four-point second-order stencil
    /// when the grid has at least four α-points.
    pub fn diff2_alpha(&self) -> Self {
        let g = self.grid;
        let (na, nb) = (g.n_alpha, g.n_beta);
        let inv_h2 = 1.0 / (g.h_alpha * g.h_alpha);
        let f = &self.values;
        let mut out = vec![0.0; f.len()];
        for j in 0..nb {
            let at = |i: usize| f[i * nb + j];
            for i in 1..na - 1 {
                out[i * nb + j] = ((at(i + 1) - at(i)) - (at(i) - at(i - 1))) * inv_h2;
            }
            let l = na - 1;
            if na >= 4 {
                out[j] = (3.0 * (at(2) - at(1)) - 2.0 * (at(1) - at(0)) - (at(3) - at(2))) * inv_h2;
                out[l * nb + j] = (3.0 * (at(l - 2) - at(l - 1))
                    - 2.0 * (at(l - 1) - at(l))
                    - (at(l - 3) - at(l - 2)))
                    * inv_h2;
            } else {
                out[j] = out[nb + j];
                out[l * nb + j] = out[nb + j];
            }
        }
        Self {
            grid: g,
            values: out,
        }
    }

    /// Compact ∂²/∂β².
    pub fn diff2_beta(&self) -> Self {
        let g = self.grid;
        let (na, nb) = (g.n_alpha, g.n_beta);
        let inv_h2 = 1.0 / (g.h_beta * g.h_beta);
        let mut out = vec![0.0; self.values.len()];
        for i in 0..na {
            let row = &self.values[i * nb..(i + 1) * nb];
            let dst = &mut out[i * nb..(i + 1) * nb];
            for j in 1..nb - 1 {
                dst[j] = ((row[j + 1] - row[j]) - (row[j] - row[j - 1])) * inv_h2;
            }
            let l = nb - 1;
            if nb >= 4 {
                dst[0] = (3.0 * (row[2] - row[1]) - 2.0 * (row[1] - row[0]) - (row[3] - row[2]))
                    * inv_h2;
                dst[l] = (3.0 * (row[l - 2] - row[l - 1])
                    - 2.0 * (row[l - 1] - row[l])
                    - (row[l - 3] - row[l - 2]))
                    * inv_h2;
            } else {
                dst[0] = dst[1];
                dst[l] = dst[1];
            }
        }
        Self {
            grid: g,
            values: out,
        }
    }

    /// ∂²/∂α∂β as `diff_beta(diff_alpha(f))`.
    pub fn diff_alpha_beta(&self) -> Self {
        self.diff_alpha().diff_beta()
    }

    /// Norms over the points that remain after stripping `trim` boundary rings.
    /// Sums run in row-major order so repeated runs are bitwise identical.
    pub fn norms(&self, trim: usize) -> Result<Norms> {
        let g = self.grid;
        if 2 * trim >= g.n_alpha || 2 * trim >= g.n_beta {
            return Err(Error::EmptyTrim {
                trim,
                n_alpha: g.n_alpha,
                n_beta: g.n_beta,
            });
        }
        let mut linf = 0.0f64;
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for i in trim..g.n_alpha - trim {
            for j in trim..g.n_beta - trim {
                let v = self.at(i, j);
                linf = linf.max(v.abs());
                sum_sq += v * v;
                count += 1;
            }
        }
        Ok(Norms {
            linf,
            l2: (sum_sq / count as f64).sqrt(),
        })
    }

    /// Writes `alpha,beta,value` rows in row-major order with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "alpha,beta,value")?;
        for (i, j) in self.grid.indices() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                self.grid.alpha(i),
                self.grid.beta(j),
                self.at(i, j)
            )?;
        }
        Ok(())
    }

    /// Reads a field written by [`ScalarField::write_csv`], recovering the grid
    /// from the coordinate columns.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Csv("empty file".into()))??;
        if header.trim() != "alpha,beta,value" {
            return Err(Error::Csv(format!("unexpected header `{}`", header.trim())));
        }
        let mut rows: Vec<[f64; 3]> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = [0.0; 3];
            let mut parts = line.split(',');
            for slot in row.iter_mut() {
                let tok = parts
                    .next()
                    .ok_or_else(|| Error::Csv(format!("line {}: too few columns", lineno + 2)))?;
                *slot = tok
                    .trim()
                    .parse()
                    .map_err(|e| Error::Csv(format!("line {}: {e}", lineno + 2)))?;
            }
            if parts.next().is_some() {
                return Err(Error::Csv(format!("line {}: too many columns", lineno + 2)));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Csv("no data rows".into()));
        }
        let alpha0 = rows[0][0];
        let n_beta = rows.iter().take_while(|r| r[0] == alpha0).count();
        if n_beta < 3 || !rows.len().is_multiple_of(n_beta) {
            return Err(Error::Csv(format!(
                "{} rows cannot form a grid with {n_beta} β-points",
                rows.len()
            )));
        }
        let n_alpha = rows.len() / n_beta;
        if n_alpha < 3 {
            return Err(Error::Csv(format!("only {n_alpha} α-rows")));
        }
        let beta0 = rows[0][1];
        let h_beta = (rows[n_beta - 1][1] - beta0) / (n_beta - 1) as f64;
        let h_alpha = (rows[(n_alpha - 1) * n_beta][0] - alpha0) / (n_alpha - 1) as f64;
        let grid = Grid2D::new(n_alpha, n_beta, alpha0, beta0, h_alpha, h_beta)
            .map_err(|e| Error::Csv(e.to_string()))?;
        let tol = 1e-9 * (1.0 + h_alpha.abs().max(h_beta.abs()));
        for (k, r) in rows.iter().enumerate() {
            let (i, j) = (k / n_beta, k % n_beta);
            let scale = 1.0 + grid.alpha(i).abs().max(grid.beta(j).abs());
            if (r[0] - grid.alpha(i)).abs() > tol * scale
                || (r[1] - grid.beta(j)).abs() > tol * scale
            {
                return Err(Error::Csv(format!(
                    "row {} is off the uniform grid or out of row-major order",
                    k + 2
                )));
            }
        }
        let values = rows.into_iter().map(|r| r[2]).collect();
        ScalarField::new(grid, values)
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
        impl $trait<ScalarField> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                self.zip_with(&rhs, |a, b| a $op b)
            }
        }
        impl $trait<&ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(mut self, rhs: &ScalarField) -> ScalarField {
                assert_eq!(self.grid, rhs.grid, "field arithmetic across different grids");
                for (a, &b) in self.values.iter_mut().zip(&rhs.values) {
                    *a = $trait::$method(*a, b);
                }
                self
            }
        }
        impl $trait<ScalarField> for ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                self $op &rhs
            }
        }
        impl $trait<f64> for &ScalarField {
            type Output = ScalarField;
            fn $method(self, rhs: f64) -> ScalarField {
                self.map(|a| a $op rhs)
            }
        }
        impl $trait<f64> for ScalarField {
            type Output = ScalarField;
            fn $method(mut self, rhs: f64) -> ScalarField {
                for a in self.values.iter_mut() {
                    *a = $trait::$method(*a, rhs);
                }
                self
            }
        }
        impl $trait<&ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: &ScalarField) -> ScalarField {
                rhs.map(|b| self $op b)
            }
        }
        impl $trait<ScalarField> for f64 {
            type Output = ScalarField;
            fn $method(self, rhs: ScalarField) -> ScalarField {
                rhs.map(|b| self $op b)
            }
        }
    };
}

field_binop!(Add, add, +);
field_binop!(Sub, sub, -);
field_binop!(Mul, mul, *);
field_binop!(Div, div, /);

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|a| -a)
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(mut self) -> ScalarField {
        for a in self.values.iter_mut() {
            *a = -*a;
        }
        self
    }
}
