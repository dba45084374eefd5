//! Cell-centred five-point finite-volume discretisation of
//! `-div(kappa grad p) = 0` on the unit square.
//!
//! Boundary conditions: `p = 1` on the left edge, `p = 0` on the right edge,
//! zero flux through the top and bottom edges. Interior faces use the
//! harmonic mean of the two neighbouring permeabilities. A Dirichlet edge
//! couples to its cell through a half-cell transmissibility
//! `2 kappa hy / hx`. No-flux edges simply contribute no face term.

use crate::error::{EllipticError, Result};
use crate::grid::GridSpec;

pub const DEFAULT_SOLVER_TOL: f64 = 1e-10;

const P_LEFT: f64 = 1.0;
const P_RIGHT: f64 = 0.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PressureSolution {
    pub pressure: Vec<f64>,
    pub iterations: usize,
    /// `||b - A p|| / ||b||` recomputed from the returned pressure.
    pub relative_residual: f64,
}

/// Face transmissibilities of the discrete operator.
#[derive(Debug, Clone)]
struct Stencil {
    grid: GridSpec,
    /// `tx[j * (nx - 1) + i]` couples cells `(i, j)` and `(i + 1, j)`.
    tx: Vec<f64>,
    /// `ty[j * nx + i]` couples cells `(i, j)` and `(i, j + 1)`.
    ty: Vec<f64>,
    /// Dirichlet transmissibility of the left and right boundary cells, per row.
    left: Vec<f64>,
    right: Vec<f64>,
    diag: Vec<f64>,
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

impl Stencil {
    fn new(kappa: &[f64], grid: &GridSpec) -> Result<Self> {
        let (nx, ny) = (grid.nx, grid.ny);
        if kappa.len() != grid.n_cells() {
            return Err(EllipticError::Argument(format!(
                "kappa has {} entries for {} cells",
                kappa.len(),
                grid.n_cells()
            )));
        }
        if let Some((c, &k)) = kappa
            .iter()
            .enumerate()
            .find(|(_, &k)| !(k > 0.0 && k.is_finite()))
        {
            return Err(EllipticError::InvalidField(format!(
                "kappa[{c}] = {k} is not positive and finite"
            )));
        }
        let sx = grid.hy() / grid.hx();
        let sy = grid.hx() / grid.hy();

        let mut tx = vec![0.0; (nx - 1) * ny];
        let mut ty = vec![0.0; nx * (ny - 1)];
        let mut left = vec![0.0; ny];
        let mut right = vec![0.0; ny];
        let mut diag = vec![0.0; grid.n_cells()];

        for j in 0..ny {
            for i in 0..nx - 1 {
                let (a, b) = (grid.index(i, j), grid.index(i + 1, j));
                let t = sx * harmonic(kappa[a], kappa[b]);
                tx[j * (nx - 1) + i] = t;
                diag[a] += t;
                diag[b] += t;
            }
            left[j] = 2.0 * sx * kappa[grid.index(0, j)];
            right[j] = 2.0 * sx * kappa[grid.index(nx - 1, j)];
            diag[grid.index(0, j)] += left[j];
            diag[grid.index(nx - 1, j)] += right[j];
        }
        for j in 0..ny - 1 {
            for i in 0..nx {
                let (a, b) = (grid.index(i, j), grid.index(i, j + 1));
                let t = sy * harmonic(kappa[a], kappa[b]);
                ty[j * nx + i] = t;
                diag[a] += t;
                diag[b] += t;
            }
        }
        Ok(Self {
            grid: *grid,
            tx,
            ty,
            left,
            right,
            diag,
        })
    }

    fn rhs(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut b = vec![0.0; g.n_cells()];
        for j in 0..g.ny {
            b[g.index(0, j)] += self.left[j] * P_LEFT;
            b[g.index(g.nx - 1, j)] += self.right[j] * P_RIGHT;
        }
        b
    }

    fn apply(&self, p: &[f64], out: &mut [f64]) {
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        for (o, (d, v)) in out.iter_mut().zip(self.diag.iter().zip(p)) {
            *o = d * v;
        }
        for j in 0..ny {
            for i in 0..nx - 1 {
                let (a, b) = (g.index(i, j), g.index(i + 1, j));
                let t = self.tx[j * (nx - 1) + i];
                out[a] -= t * p[b];
                out[b] -= t * p[a];
            }
        }
        for j in 0..ny - 1 {
            for i in 0..nx {
                let (a, b) = (g.index(i, j), g.index(i, j + 1));
                let t = self.ty[j * nx + i];
                out[a] -= t * p[b];
                out[b] -= t * p[a];
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve for the cell-centred pressure by Jacobi-preconditioned conjugate
/// gradients, stopping once `||b - A p|| <= tol ||b||`.
///
/// Gives up with [`EllipticError::SolverFailure`] after `10 * nx * ny`
/// iterations.
pub fn solve_pressure(kappa: &[f64], grid: &GridSpec, tol: f64) -> Result<PressureSolution> {
    if !(tol > 0.0) {
        return Err(EllipticError::Argument(format!("tol = {tol} must be positive")));
    }
    let st = Stencil::new(kappa, grid)?;
    let n = grid.n_cells();
    let b = st.rhs();
    let b_norm = norm(&b);
    let max_iter = 10 * n;

    let inv_diag: Vec<f64> = st.diag.iter().map(|d| 1.0 / d).collect();
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut ap = vec![0.0; n];
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);

    let mut iterations = 0;
    loop {
        if norm(&r) <= tol * b_norm {
            // The recursively updated residual drifts; confirm on the true one.
            st.apply(&x, &mut ap);
            for ((ri, bi), ai) in r.iter_mut().zip(&b).zip(&ap) {
                *ri = bi - ai;
            }
            let true_rel = norm(&r) / b_norm;
            if true_rel <= tol {
                return Ok(PressureSolution {
                    pressure: x,
                    iterations,
                    relative_residual: true_rel,
                });
            }
            for ((zi, ri), m) in z.iter_mut().zip(&r).zip(&inv_diag) {
                *zi = ri * m;
            }
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
        }
        if iterations >= max_iter {
            return Err(EllipticError::SolverFailure {
                iterations,
                residual: norm(&r) / b_norm,
            });
        }
        st.apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
        iterations += 1;
    }
}

/// Cell-wise flux imbalance `b - A p` of a pressure field.
pub fn stencil_residual(kappa: &[f64], grid: &GridSpec, pressure: &[f64]) -> Result<Vec<f64>> {
    let st = Stencil::new(kappa, grid)?;
    let mut ap = vec![0.0; grid.n_cells()];
    st.apply(pressure, &mut ap);
    Ok(st.rhs().iter().zip(&ap).map(|(b, a)| b - a).collect())
}

/// Right-hand side of the discrete system (the Dirichlet boundary data).
pub fn system_rhs(kappa: &[f64], grid: &GridSpec) -> Result<Vec<f64>> {
    Ok(Stencil::new(kappa, grid)?.rhs())
}
