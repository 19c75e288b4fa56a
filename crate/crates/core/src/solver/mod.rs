//! Doubly periodic pseudo-spectral integrator for the potential vorticity
//! equation, with RK4 in time and optional 2/3 dealiasing.
//!
//! Fields are stored row-major with `x` varying fastest: `data[j * nx + i]`
//! is the sample at `(x_i, y_j) = (i Lx / Nx, j Ly / Ny)`.

mod io;
mod run;
mod spectral;
mod study;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalPoint, Expr};

pub use io::{read_csv, read_raw, write_csv, write_diagnostics_csv, write_raw, RawSidecar};
pub use run::{diagnostics, helmholtz_invert, rhs, run, step, Diagnostics, RunResult};
pub use spectral::Spectral;
pub use study::{beta_equivalence, convergence_study, shift_x, ConvergenceRow, ConvergenceTable, EquivalenceReport, LadderEntry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("grid size {0} must be a power of two and at least 16")]
    BadGrid(usize),
    #[error("domain lengths must be positive")]
    BadDomain,
    #[error("field has {got} samples, grid needs {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("non-finite sample in field")]
    NonFinite,
    #[error("singular Helmholtz operator at wavenumber ({kx}, {ky})")]
    SingularOperator { kx: f64, ky: f64 },
    #[error("blow-up at t = {t}")]
    BlowUp { t: f64 },
    #[error("transformation undefined; F must be nonzero")]
    ZeroF,
    #[error("dt must be positive and finite")]
    BadDt,
    #[error("exact solution is not periodic on the domain: {0}")]
    NotPeriodic(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SolverError {
    fn from(e: std::io::Error) -> Self {
        SolverError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid {
    /// `Nx × Ny` grid on the default `(2π)²` domain.
    pub fn new(nx: usize, ny: usize) -> Result<Self, SolverError> {
        Self::with_domain(nx, ny, TAU, TAU)
    }

    pub fn with_domain(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, SolverError> {
        for n in [nx, ny] {
            if n < 16 || !n.is_power_of_two() {
                return Err(SolverError::BadGrid(n));
            }
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(SolverError::BadDomain);
        }
        Ok(Self { nx, ny, lx, ly })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.lx / self.nx as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.ly / self.ny as f64
    }

    /// Cell area `Lx Ly / (Nx Ny)`.
    pub fn cell_area(&self) -> f64 {
        self.lx * self.ly / self.len() as f64
    }
}

/// Signed integer mode number for FFT index `i` of an `n`-point transform.
pub(crate) fn mode(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub t: f64,
    pub data: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, t: f64, data: Vec<f64>) -> Result<Self, SolverError> {
        if data.len() != grid.len() {
            return Err(SolverError::ShapeMismatch { got: data.len(), want: grid.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite);
        }
        Ok(Self { grid, t, data })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, t: 0.0, data: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: Grid, t: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                data.push(f(grid.x(i), grid.y(j)));
            }
        }
        Self { grid, t, data }
    }

    /// Samples an expression in `(t, x, y)` plus any extra bindings.
    pub fn from_expr(grid: Grid, t: f64, e: &Expr, extra: &EvalPoint) -> Result<Self, SolverError> {
        let mut data = Vec::with_capacity(grid.len());
        let mut pt = extra.clone();
        pt.set("t", t);
        for j in 0..grid.ny {
            pt.set("y", grid.y(j));
            for i in 0..grid.nx {
                pt.set("x", grid.x(i));
                data.push(e.eval(&pt).map_err(|err| SolverError::Eval(err.to_string()))?);
            }
        }
        Self::new(grid, t, data)
    }

    /// Band-limited random field: cosine modes `|m|, |n| ≤ kmax` with
    /// amplitudes decaying like `1/(1 + m² + n²)` and random phases.
    pub fn random_smooth(grid: Grid, kmax: i32, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        for m in -kmax..=kmax {
            for n in 0..=kmax {
                if m == 0 && n == 0 {
                    continue;
                }
                let amp = rng.random_range(-1.0..1.0) / (1.0 + (m * m + n * n) as f64);
                modes.push((m as f64, n as f64, amp, rng.random_range(0.0..TAU)));
            }
        }
        let (kx, ky) = (TAU / grid.lx, TAU / grid.ly);
        Self::from_fn(grid, 0.0, |x, y| modes.iter().map(|(m, n, a, ph)| a * (m * kx * x + n * ky * y + ph).cos()).sum())
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.grid.nx + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |self − other|`; panics on mismatched grids.
    pub fn max_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub(crate) fn axpy(&self, a: f64, other: &[f64]) -> Vec<f64> {
        self.data.iter().zip(other).map(|(u, v)| u + a * v).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    #[serde(rename = "F")]
    pub f: f64,
    pub beta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    /// Steps between diagnostics samples; 0 records only the endpoints.
    pub output_every: usize,
    /// Constant `G` in `ψ_total = ψ + G y`: the periodic field is advected
    /// by the uniform background flow `−G` in x.
    #[serde(default)]
    pub background_gradient: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { f: 1.0, beta: 0.0, dt: 1e-3, t_end: 1.0, dealias: true, output_every: 0, background_gradient: 0.0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolverError::BadDt);
        }
        Ok(())
    }

    /// Number of fixed steps reaching `t_end`, rounding to the nearest.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(0.0) as usize
    }
}
