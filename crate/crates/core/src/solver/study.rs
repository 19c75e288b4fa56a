use serde::{Deserialize, Serialize};

use super::run::run;
use super::{Field, Grid, SolverConfig, SolverError};
use crate::expr::{EvalPoint, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub n: usize,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dt: f64,
    pub error: f64,
    /// Observed temporal order against the previous row when only `dt`
    /// changed.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }
}

fn check_periodic(exact: &Expr, extra: &EvalPoint, grid: &Grid, times: &[f64]) -> Result<(), SolverError> {
    let mut pt = extra.clone();
    let eval = |pt: &EvalPoint| exact.eval(pt).map_err(|e| SolverError::Eval(e.to_string()));
    for &t in times {
        pt.set("t", t);
        for k in 0..7 {
            let s = 0.37 + 0.83 * k as f64;
            let pairs = [((0.0, s), (grid.lx, s)), ((s, 0.0), (s, grid.ly))];
            for ((x0, y0), (x1, y1)) in pairs {
                let a = eval(&pt.clone().with("x", x0).with("y", y0))?;
                let b = eval(&pt.clone().with("x", x1).with("y", y1))?;
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(SolverError::NotPeriodic(format!("{exact} differs across the boundary at t={t}")));
                }
            }
        }
    }
    Ok(())
}

/// Integrates `exact` from its `t = 0` samples to `cfg.t_end` for each
/// ladder entry and reports max-norm errors.
pub fn convergence_study(
    exact: &Expr,
    extra: &EvalPoint,
    cfg: &SolverConfig,
    ladder: &[LadderEntry],
) -> Result<ConvergenceTable, SolverError> {
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for entry in ladder {
        let grid = Grid::new(entry.n, entry.n)?;
        check_periodic(exact, extra, &grid, &[0.0, cfg.t_end])?;
        let c = SolverConfig { dt: entry.dt, ..*cfg };
        let psi0 = Field::from_expr(grid, 0.0, exact, extra)?;
        let out = run(&psi0, &c)?;
        let want = Field::from_expr(grid, out.field.t, exact, extra)?;
        let error = out.field.max_diff(&want);
        let order = rows.last().filter(|p| p.n == entry.n && p.dt != entry.dt).map(|p| (p.error / error).ln() / (p.dt / entry.dt).ln());
        rows.push(ConvergenceRow { n: entry.n, dt: entry.dt, error, order });
    }
    Ok(ConvergenceTable { rows })
}

/// Exact spectral translation: returns `ψ(x + s, y)`.
pub fn shift_x(field: &Field, s: f64) -> Field {
    let sp = super::Spectral::new(field.grid);
    let hat = sp.shift_x(&sp.forward(&field.data), s);
    Field { grid: field.grid, t: field.t, data: sp.inverse(&hat) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub t: f64,
    pub kappa: f64,
    pub max_abs_diff: f64,
    pub rel_diff: f64,
}

impl EquivalenceReport {
    pub const TOL: f64 = 1e-6;

    pub fn passed(&self) -> bool {
        self.rel_diff < Self::TOL
    }
}

/// Discrete form of the β-equivalence. With `κ = β/F`, the β-equation for
/// `ψ = φ + κy` is integrated from `φ0` using a background gradient, the
/// β = 0 equation is integrated from the same `φ0`, and the latter is
/// translated by `κt` in x before comparison.
pub fn beta_equivalence(phi0: &Field, f: f64, beta: f64, dt: f64, t_end: f64, dealias: bool) -> Result<EquivalenceReport, SolverError> {
    if f == 0.0 {
        return Err(SolverError::ZeroF);
    }
    let kappa = beta / f;
    let base = SolverConfig { f, beta: 0.0, dt, t_end, dealias, output_every: 0, background_gradient: 0.0 };
    let with_beta = SolverConfig { beta, background_gradient: kappa, ..base };
    let a = run(phi0, &with_beta)?.field;
    let b = run(phi0, &base)?.field;
    let moved = shift_x(&b, kappa * (b.t - phi0.t));
    let max_abs_diff = a.max_diff(&moved);
    let rel_diff = max_abs_diff / a.max_abs().max(f64::MIN_POSITIVE);
    Ok(EquivalenceReport { t: a.t, kappa, max_abs_diff, rel_diff })
}
