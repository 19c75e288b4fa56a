//! Adjoint action `Ad(exp(εv)) w`, defined as the solution at ε of
//! `dw/dε = [w, v]`. Equivalently the series `Σ (−ε)^n / n! ad_v^n w`, and the
//! pushforward of `w` by the flow of `v` at time ε.

use super::ode::dopri;
use super::{AlgebraElement, LieError};

pub const DEFAULT_SERIES_ORDER: usize = 40;
const SERIES_TAIL_TOL: f64 = 1e-14;
const ODE_TOL: f64 = 1e-12;

/// Matrix of `w ↦ [v, w]`, column `j` holding `[v, e_j]`.
fn ad_matrix(v: &AlgebraElement) -> [[f64; 6]; 6] {
    let mut m = [[0.0; 6]; 6];
    for j in 0..6 {
        let col = v.bracket(&AlgebraElement::basis(super::Generator::ALL[j]));
        for i in 0..6 {
            m[i][j] = col.0[i];
        }
    }
    m
}

fn matmul(a: &[[f64; 6]; 6], b: &[[f64; 6]; 6]) -> [[f64; 6]; 6] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..6).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Truncated series. The term after the last one kept must be below
/// `1e-14 · max(1, |sum|)` (or exactly zero), otherwise `NotConverged`.
pub fn adjoint_series(v: &AlgebraElement, w0: &AlgebraElement, eps: f64, order: usize) -> Result<AlgebraElement, LieError> {
    let mut term = *w0;
    let mut sum = *w0;
    for n in 1..=order {
        term = v.bracket(&term).scale(-eps / n as f64);
        sum = sum.plus(&term);
    }
    let next = v.bracket(&term).scale(-eps / (order + 1) as f64).norm();
    if next == 0.0 || next < SERIES_TAIL_TOL * sum.norm().max(1.0) {
        Ok(sum)
    } else {
        Err(LieError::NotConverged { order, tail: next })
    }
}

pub fn adjoint_series_default(v: &AlgebraElement, w0: &AlgebraElement, eps: f64) -> Result<AlgebraElement, LieError> {
    adjoint_series(v, w0, eps, DEFAULT_SERIES_ORDER)
}

/// Adaptive integration of `dw/dε = [w, v]`.
pub fn adjoint_ode(v: &AlgebraElement, w0: &AlgebraElement, eps: f64) -> AlgebraElement {
    let v = *v;
    AlgebraElement(dopri(move |w: &[f64; 6]| AlgebraElement(*w).bracket(&v).0, w0.0, eps, ODE_TOL))
}

/// `exp(−ε ad_v)` by scaling and squaring; column `j` is `Ad(exp(εv)) e_j`.
/// Valid for any ε.
pub fn adjoint_matrix(v: &AlgebraElement, eps: f64) -> [[f64; 6]; 6] {
    let mut m = ad_matrix(v);
    let norm = m.iter().map(|r| r.iter().map(|a| a.abs()).sum::<f64>()).fold(0.0, f64::max) * eps.abs();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let h = -eps / 2f64.powi(squarings as i32);
    for row in m.iter_mut() {
        for a in row.iter_mut() {
            *a *= h;
        }
    }
    let mut result = [[0.0; 6]; 6];
    let mut term = [[0.0; 6]; 6];
    for i in 0..6 {
        result[i][i] = 1.0;
        term[i][i] = 1.0;
    }
    for n in 1..=24 {
        term = matmul(&term, &m);
        for row in term.iter_mut() {
            for a in row.iter_mut() {
                *a /= n as f64;
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

impl AlgebraElement {
    /// Applies a 6×6 matrix acting on coordinate columns.
    pub fn transformed(&self, m: &[[f64; 6]; 6]) -> AlgebraElement {
        AlgebraElement(std::array::from_fn(|i| (0..6).map(|j| m[i][j] * self.0[j]).sum()))
    }
}
