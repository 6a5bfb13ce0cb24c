//! Density matrices in a truncated Fock basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues down to this are treated as roundoff and clipped to zero.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// Mechanical density matrix over Fock states `|0>, ..., |n_max>`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    rho: DMatrix<C64>,
}

impl QuantumState {
    /// Validate Hermiticity, unit trace and positivity.
    pub fn new(rho: DMatrix<C64>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::InvalidState("density matrix must be square and non-empty".into()));
        }
        if rho.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("density matrix".into()));
        }
        let herm = hermiticity_error(&rho);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (max deviation {herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min_eig = rho.symmetric_eigenvalues().min();
        if min_eig < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { rho })
    }

    /// Hermitize, renormalize and clip roundoff-level negative eigenvalues
    /// before validating.
    pub fn from_unnormalized(rho: DMatrix<C64>) -> Result<Self> {
        let mut rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let tr = rho.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} cannot be normalized")));
        }
        rho /= C64::new(tr, 0.0);
        let eig = rho.clone().symmetric_eigen();
        let min = eig.eigenvalues.min();
        if min < 0.0 && min >= -NEGATIVITY_TOL {
            let clipped = eig.eigenvalues.map(|l| if l < 0.0 { 0.0 } else { l });
            let v = &eig.eigenvectors;
            let d = DMatrix::from_diagonal(&clipped.map(|l| C64::new(l, 0.0)));
            rho = v * d * v.adjoint();
            rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
            let tr = rho.trace().re;
            rho /= C64::new(tr, 0.0);
        }
        Self::new(rho)
    }

    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::InvalidParameter(format!("Fock state {n} beyond n_max = {n_max}")));
        }
        let mut rho = DMatrix::zeros(n_max + 1, n_max + 1);
        rho[(n, n)] = C64::new(1.0, 0.0);
        Ok(Self { rho })
    }

    /// `|psi><psi|` for Fock-basis amplitudes `psi` (normalized internally).
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let v = v / C64::new(norm, 0.0);
        Self::from_unnormalized(&v * v.adjoint())
    }

    /// Diagonal state with the given (not necessarily normalized) populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        if populations.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(Error::InvalidState("populations must be finite and non-negative".into()));
        }
        let total: f64 = populations.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let d = DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| C64::new(p / total, 0.0)),
        );
        Self::new(DMatrix::from_diagonal(&d))
    }

    pub fn rho(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn n_max(&self) -> usize {
        self.rho.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.rho[(n, n)].re).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho.symmetric_eigenvalues().min()
    }

    pub fn mean_phonons(&self) -> f64 {
        self.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Population in the top `k` Fock levels; a cheap truncation diagnostic.
    pub fn tail_population(&self, k: usize) -> f64 {
        let pops = self.populations();
        pops[pops.len().saturating_sub(k)..].iter().sum()
    }
}

pub fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    n_max: usize,
    /// Row-major `[re, im]` pairs.
    rho: Vec<Vec<C64>>,
}

impl Serialize for QuantumState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rho = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.rho[(i, j)]).collect())
            .collect();
        StateRecord { n_max: self.n_max(), rho }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = StateRecord::deserialize(d)?;
        let dim = rec.n_max + 1;
        if rec.rho.len() != dim || rec.rho.iter().any(|r| r.len() != dim) {
            return Err(D::Error::custom("density matrix shape does not match n_max"));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| rec.rho[i][j]);
        QuantumState::new(m).map_err(D::Error::custom)
    }
}
