//! Harmonic-oscillator eigenfunctions on a position grid.
//!
//! The Fock basis is the working representation for states; position-space
//! quantities (marginals, diagonal operators, target wavefunctions) pass
//! through the matrix `u[n][j] = u_n(x_j)` built here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, PositionGrid};

/// Largest admissible `|u_n|` at the grid boundary.
pub const BOUNDARY_DECAY: f64 = 1e-8;

/// Evaluate `u_0(x), ..., u_{n_max}(x)` by the normalized three-term recurrence
///
/// `u_{n+1} = sqrt(2/(n+1)) x u_n - sqrt(n/(n+1)) u_{n-1}`,
///
/// which stays bounded for large `n` where raw Hermite polynomials overflow.
pub fn hermite_functions(n_max: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > n_max);
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n_max == 0 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * x * out[0];
    for n in 1..n_max {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    hermite_functions(n, x, &mut buf);
    buf[n]
}

/// Fock <-> position change of basis on a fixed grid.
#[derive(Clone, Debug)]
pub struct BasisTransform {
    grid: PositionGrid,
    u: DMatrix<f64>,
}

impl BasisTransform {
    pub fn new(grid: PositionGrid, n_max: usize) -> Result<Self> {
        let mut u = DMatrix::zeros(n_max + 1, grid.n_points());
        let mut col = vec![0.0; n_max + 1];
        for j in 0..grid.n_points() {
            hermite_functions(n_max, grid.x(j), &mut col);
            u.column_mut(j).copy_from_slice(&col);
        }
        let last = grid.n_points() - 1;
        if let Some(n) =
            (0..=n_max).find(|&n| u[(n, 0)].abs().max(u[(n, last)].abs()) > BOUNDARY_DECAY)
        {
            return Err(Error::GridTooSmall {
                n,
                value: u[(n, 0)].abs().max(u[(n, last)].abs()),
                bound: BOUNDARY_DECAY,
                x_max: grid.x_max(),
            });
        }
        Ok(Self { grid, u })
    }

    pub fn grid(&self) -> &PositionGrid {
        &self.grid
    }

    pub fn n_max(&self) -> usize {
        self.u.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// `u[n][j]`, rows indexed by Fock number.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn column(&self, n: usize) -> Vec<f64> {
        self.u.row(n).iter().copied().collect()
    }

    /// Largest deviation of `sum_j u_m u_n dx` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let g = &self.u * self.u.transpose() * self.grid.dx();
        let mut worst: f64 = 0.0;
        for m in 0..g.nrows() {
            for n in 0..g.ncols() {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((g[(m, n)] - target).abs());
            }
        }
        worst
    }

    fn check_grid(&self, f: &GridFunction) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch(format!(
                "function grid {:?} differs from basis grid {:?}",
                f.grid(),
                self.grid
            )));
        }
        Ok(())
    }

    /// Fock amplitudes `c_n = sum_j u_n(x_j) psi(x_j) dx`.
    pub fn to_fock(&self, psi: &GridFunction) -> Result<DVector<C64>> {
        self.check_grid(psi)?;
        let dx = self.grid.dx();
        let re = DVector::from_iterator(psi.values().len(), psi.values().iter().map(|v| v.re * dx));
        let im = DVector::from_iterator(psi.values().len(), psi.values().iter().map(|v| v.im * dx));
        let cr = &self.u * re;
        let ci = &self.u * im;
        Ok(DVector::from_fn(self.dim(), |n, _| C64::new(cr[n], ci[n])))
    }

    /// Position samples of the Fock-basis amplitudes `c`.
    pub fn to_position(&self, c: &DVector<C64>) -> Result<GridFunction> {
        if c.len() != self.dim() {
            return Err(Error::GridMismatch("amplitude vector length differs from basis".into()));
        }
        let cr = DVector::from_iterator(c.len(), c.iter().map(|v| v.re));
        let ci = DVector::from_iterator(c.len(), c.iter().map(|v| v.im));
        let re = self.u.tr_mul(&cr);
        let im = self.u.tr_mul(&ci);
        GridFunction::new(
            self.grid,
            re.iter().zip(im.iter()).map(|(&r, &i)| C64::new(r, i)).collect(),
        )
    }

    /// Fock-basis matrix of the position-diagonal operator `f(X)`:
    /// `U_mn = sum_j u_m(x_j) f(x_j) u_n(x_j) dx`.
    pub fn diagonal_operator(&self, f: &GridFunction) -> Result<DMatrix<C64>> {
        self.check_grid(f)?;
        let dx = self.grid.dx();
        let mut a_re = self.u.clone();
        let mut a_im = self.u.clone();
        for (j, v) in f.values().iter().enumerate() {
            a_re.column_mut(j).scale_mut(v.re * dx);
            a_im.column_mut(j).scale_mut(v.im * dx);
        }
        let ut = self.u.transpose();
        let re = a_re * &ut;
        let im = a_im * &ut;
        Ok(re.zip_map(&im, C64::new))
    }
}
