use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Field, Grid, SolverConfig, SolverError, Spectral};

fn helmholtz_hat(sp: &Spectral, hat: &[Complex64], f: f64) -> Result<Vec<Complex64>, SolverError> {
    let nx = sp.grid.nx;
    let scale = 1.0 + f.abs();
    hat.iter()
        .zip(sp.k2())
        .enumerate()
        .map(|(idx, (&c, &k2))| {
            let d = -k2 - f;
            if d.abs() > 1e-12 * scale {
                Ok(c / d)
            } else if idx == 0 && f == 0.0 {
                Ok(Complex64::default())
            } else {
                let (i, j) = (idx % nx, idx / nx);
                Err(SolverError::SingularOperator {
                    kx: super::mode(i, nx) * std::f64::consts::TAU / sp.grid.lx,
                    ky: super::mode(j, sp.grid.ny) * std::f64::consts::TAU / sp.grid.ly,
                })
            }
        })
        .collect()
}

/// Solves `(Δ − F) χ = r`. For `F = 0` the mean of `χ` is set to zero.
pub fn helmholtz_invert(r: &Field, f: f64) -> Result<Field, SolverError> {
    let sp = Spectral::new(r.grid);
    let chi = helmholtz_hat(&sp, &sp.forward(&r.data), f)?;
    Ok(Field { grid: r.grid, t: r.t, data: sp.inverse(&chi) })
}

pub(crate) struct Kernel {
    pub sp: Spectral,
    pub cfg: SolverConfig,
}

impl Kernel {
    pub fn new(grid: Grid, cfg: SolverConfig) -> Self {
        Self { sp: Spectral::new(grid), cfg }
    }

    pub fn tendency(&self, data: &[f64]) -> Result<Vec<f64>, SolverError> {
        let sp = &self.sp;
        let mut hat = sp.forward(data);
        if self.cfg.dealias {
            sp.dealias(&mut hat);
        }
        let zeta = sp.laplacian(&hat);
        let psi_x = sp.inverse(&sp.dx(&hat));
        let psi_y = sp.inverse(&sp.dy(&hat));
        let zeta_x = sp.inverse(&sp.dx(&zeta));
        let zeta_y = sp.inverse(&sp.dy(&zeta));
        let g = self.cfg.background_gradient;
        let jac: Vec<f64> = (0..data.len()).map(|n| psi_x[n] * zeta_y[n] - (psi_y[n] + g) * zeta_x[n]).collect();
        let mut jac_hat = sp.forward(&jac);
        if self.cfg.dealias {
            sp.dealias(&mut jac_hat);
        }
        let beta_x = sp.dx(&hat);
        let r: Vec<Complex64> = jac_hat.iter().zip(&beta_x).map(|(j, b)| -j - b * self.cfg.beta).collect();
        Ok(sp.inverse(&helmholtz_hat(sp, &r, self.cfg.f)?))
    }

    pub fn step(&self, psi: &Field) -> Result<Field, SolverError> {
        let dt = self.cfg.dt;
        let k1 = self.tendency(&psi.data)?;
        let k2 = self.tendency(&psi.axpy(dt / 2.0, &k1))?;
        let k3 = self.tendency(&psi.axpy(dt / 2.0, &k2))?;
        let k4 = self.tendency(&psi.axpy(dt, &k3))?;
        let data: Vec<f64> = (0..psi.data.len())
            .map(|n| psi.data[n] + dt / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]))
            .collect();
        let t = psi.t + dt;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::BlowUp { t });
        }
        Ok(Field { grid: psi.grid, t, data })
    }

    pub fn diagnostics(&self, psi: &Field) -> Diagnostics {
        let hat = self.sp.forward(&psi.data);
        let f = self.cfg.f;
        let norm = psi.grid.cell_area() / psi.grid.len() as f64;
        let (mut e, mut z) = (0.0, 0.0);
        for (c, k2) in hat.iter().zip(self.sp.k2()) {
            let m = c.norm_sqr();
            e += (k2 + f) * m;
            z += (k2 + f) * (k2 + f) * m;
        }
        Diagnostics { t: psi.t, energy: 0.5 * norm * e, enstrophy: 0.5 * norm * z }
    }

    /// Advective Courant number `dt · max|u| / Δx` over both directions.
    pub fn cfl(&self, psi: &Field) -> f64 {
        let hat = self.sp.forward(&psi.data);
        let u = self.sp.inverse(&self.sp.dy(&hat));
        let v = self.sp.inverse(&self.sp.dx(&hat));
        let g = self.cfg.background_gradient;
        let umax = u.iter().fold(0.0f64, |m, a| m.max((a + g).abs()));
        let vmax = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let grid = psi.grid;
        self.cfg.dt * (umax * grid.nx as f64 / grid.lx + vmax * grid.ny as f64 / grid.ly)
    }
}

/// Tendency `ψ_t = (Δ − F)⁻¹(−J(ψ + G y, Δψ) − β ψ_x)`.
pub fn rhs(psi: &Field, cfg: &SolverConfig) -> Result<Field, SolverError> {
    let k = Kernel::new(psi.grid, *cfg);
    Ok(Field { grid: psi.grid, t: psi.t, data: k.tendency(&psi.data)? })
}

/// One classical RK4 step of size `cfg.dt`.
pub fn step(psi: &Field, cfg: &SolverConfig) -> Result<Field, SolverError> {
    cfg.validate()?;
    Kernel::new(psi.grid, *cfg).step(psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
}

/// `E = ½∬(|∇ψ|² + Fψ²)` and `Z = ½∬(Δψ − Fψ)²`, computed spectrally.
pub fn diagnostics(psi: &Field, cfg: &SolverConfig) -> Diagnostics {
    Kernel::new(psi.grid, *cfg).diagnostics(psi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub field: Field,
    pub steps: usize,
    pub diagnostics: Vec<Diagnostics>,
    pub cfl: f64,
    pub warnings: Vec<String>,
}

impl RunResult {
    /// Largest relative change of `(E, Z)` from the first sample.
    pub fn drift(&self) -> (f64, f64) {
        let Some(first) = self.diagnostics.first() else { return (0.0, 0.0) };
        let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { ((a - b) / b).abs() };
        self.diagnostics.iter().fold((0.0, 0.0), |(e, z), d| {
            (f64::max(e, rel(d.energy, first.energy)), f64::max(z, rel(d.enstrophy, first.enstrophy)))
        })
    }
}

/// Integrates from `psi0` to `psi0.t + cfg.t_end` with fixed steps.
pub fn run(psi0: &Field, cfg: &SolverConfig) -> Result<RunResult, SolverError> {
    cfg.validate()?;
    let k = Kernel::new(psi0.grid, *cfg);
    let steps = cfg.steps();
    let cfl = k.cfl(psi0);
    let mut warnings = Vec::new();
    if cfl > 1.0 {
        warnings.push(format!("advisory CFL number {cfl:.3} exceeds 1"));
    }
    let mut psi = psi0.clone();
    let mut diags = vec![k.diagnostics(&psi)];
    for n in 1..=steps {
        psi = k.step(&psi)?;
        if n == steps || (cfg.output_every > 0 && n % cfg.output_every == 0) {
            diags.push(k.diagnostics(&psi));
        }
    }
    Ok(RunResult { field: psi, steps, diagnostics: diags, cfl, warnings })
}
