use std::f64::consts::TAU;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{mode, Grid};

/// FFT plans and wavenumber tables for one grid.
#[derive(Clone)]
pub struct Spectral {
    pub grid: Grid,
    fx: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
    /// x wavenumber per index with the Nyquist entry zeroed (odd derivatives).
    kx: Vec<f64>,
    ky: Vec<f64>,
    /// `kx² + ky²` per spectral index, Nyquist included.
    k2: Vec<f64>,
    mask: Vec<bool>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let (nx, ny) = (grid.nx, grid.ny);
        let wave = |n: usize, l: f64, odd: bool| -> Vec<f64> {
            (0..n)
                .map(|i| if odd && i == n / 2 { 0.0 } else { TAU * mode(i, n) / l })
                .collect()
        };
        let (kx, ky) = (wave(nx, grid.lx, true), wave(ny, grid.ly, true));
        let (kxf, kyf) = (wave(nx, grid.lx, false), wave(ny, grid.ly, false));
        let mut k2 = Vec::with_capacity(grid.len());
        let mut mask = Vec::with_capacity(grid.len());
        for j in 0..ny {
            for i in 0..nx {
                k2.push(kxf[i] * kxf[i] + kyf[j] * kyf[j]);
                mask.push(mode(i, nx).abs() <= (nx / 3) as f64 && mode(j, ny).abs() <= (ny / 3) as f64);
            }
        }
        Self {
            grid,
            fx: planner.plan_fft_forward(nx),
            ix: planner.plan_fft_inverse(nx),
            fy: planner.plan_fft_forward(ny),
            iy: planner.plan_fft_inverse(ny),
            kx,
            ky,
            k2,
            mask,
        }
    }

    fn columns(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut col = vec![Complex64::default(); ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = buf[j * nx + i];
            }
            plan.process(&mut col);
            for j in 0..ny {
                buf[j * nx + i] = col[j];
            }
        }
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for row in buf.chunks_exact_mut(self.grid.nx) {
            self.fx.process(row);
        }
        self.columns(&mut buf, &self.fy);
        buf
    }

    /// Inverse of [`Spectral::forward`], keeping the real part.
    pub fn inverse(&self, hat: &[Complex64]) -> Vec<f64> {
        let mut buf = hat.to_vec();
        self.columns(&mut buf, &self.iy);
        for row in buf.chunks_exact_mut(self.grid.nx) {
            self.ix.process(row);
        }
        let norm = 1.0 / self.grid.len() as f64;
        buf.iter().map(|c| c.re * norm).collect()
    }

    fn each(&self, hat: &[Complex64], f: impl Fn(usize, usize, usize, Complex64) -> Complex64) -> Vec<Complex64> {
        let nx = self.grid.nx;
        hat.iter().enumerate().map(|(idx, &c)| f(idx, idx % nx, idx / nx, c)).collect()
    }

    pub fn dx(&self, hat: &[Complex64]) -> Vec<Complex64> {
        self.each(hat, |_, i, _, c| c * Complex64::new(0.0, self.kx[i]))
    }

    pub fn dy(&self, hat: &[Complex64]) -> Vec<Complex64> {
        self.each(hat, |_, _, j, c| c * Complex64::new(0.0, self.ky[j]))
    }

    pub fn laplacian(&self, hat: &[Complex64]) -> Vec<Complex64> {
        self.each(hat, |idx, _, _, c| -c * self.k2[idx])
    }

    /// Zeroes modes outside the 2/3 band.
    pub fn dealias(&self, hat: &mut [Complex64]) {
        for (c, keep) in hat.iter_mut().zip(&self.mask) {
            if !keep {
                *c = Complex64::default();
            }
        }
    }

    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    /// Multiplies by `exp(i kx s)`: a translation `x → x + s`.
    pub fn shift_x(&self, hat: &[Complex64], s: f64) -> Vec<Complex64> {
        let nx = self.grid.nx;
        let full = |i: usize| TAU * mode(i, nx) / self.grid.lx;
        self.each(hat, |_, i, _, c| {
            if i == nx / 2 {
                // Nyquist cosine component shifts by its real projection
                c * (full(i) * s).cos()
            } else {
                c * Complex64::from_polar(1.0, full(i) * s)
            }
        })
    }
}
