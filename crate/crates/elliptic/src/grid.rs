//! Uniform cell-centred grids on the unit square.

use serde::{Deserialize, Serialize};

use crate::error::{EllipticError, Result};

/// `nx x ny` cells on `[0,1]^2`. Cell `(i, j)` has index `j * nx + i` and
/// centre `((i + 1/2)/nx, (j + 1/2)/ny)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(EllipticError::Argument(format!(
                "grid needs at least 2 cells per side, got {nx} x {ny}"
            )));
        }
        Ok(Self { nx, ny })
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn hx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        1.0 / self.ny as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.nx, cell / self.nx)
    }

    pub fn center(&self, cell: usize) -> (f64, f64) {
        let (i, j) = self.coords(cell);
        ((i as f64 + 0.5) * self.hx(), (j as f64 + 0.5) * self.hy())
    }

    /// Cell containing the point; points on the upper/right edge belong to
    /// the last cell.
    pub fn cell_at(&self, x: f64, y: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(EllipticError::Argument(format!(
                "point ({x}, {y}) outside the unit square"
            )));
        }
        let i = ((x * self.nx as f64).floor() as usize).min(self.nx - 1);
        let j = ((y * self.ny as f64).floor() as usize).min(self.ny - 1);
        Ok(self.index(i, j))
    }

    /// Grid with `factor x factor` blocks merged into one cell.
    pub fn coarsen(&self, factor: usize) -> Result<GridSpec> {
        if factor == 0 || self.nx % factor != 0 || self.ny % factor != 0 {
            return Err(EllipticError::Argument(format!(
                "{} x {} grid cannot be coarsened by {factor}",
                self.nx, self.ny
            )));
        }
        GridSpec::new(self.nx / factor, self.ny / factor)
    }

    /// Cells with `i + j` even, starting at `(0, 0)`.
    pub fn chessboard(&self) -> Vec<usize> {
        (0..self.n_cells())
            .filter(|&c| {
                let (i, j) = self.coords(c);
                (i + j) % 2 == 0
            })
            .collect()
    }

    /// Fine cells covered by coarse cell `cell` of `self.coarsen(factor)`.
    pub fn children(&self, coarse_cell: usize, factor: usize) -> Vec<usize> {
        let coarse_nx = self.nx / factor;
        let (ci, cj) = (coarse_cell % coarse_nx, coarse_cell / coarse_nx);
        let mut out = Vec::with_capacity(factor * factor);
        for dj in 0..factor {
            for di in 0..factor {
                out.push(self.index(ci * factor + di, cj * factor + dj));
            }
        }
        out
    }
}

/// Average of `field` over `factor x factor` blocks of `fine`.
pub fn block_average(field: &[f64], fine: &GridSpec, factor: usize) -> Result<Vec<f64>> {
    if factor == 1 {
        return Ok(field.to_vec());
    }
    let coarse = fine.coarsen(factor)?;
    let inv = 1.0 / (factor * factor) as f64;
    Ok((0..coarse.n_cells())
        .map(|c| {
            fine.children(c, factor)
                .into_iter()
                .map(|f| field[f])
                .sum::<f64>()
                * inv
        })
        .collect())
}
