//! Invariant reductions by the one-dimensional subalgebras, the
//! two-dimensional travelling-wave reduction and the exact solutions built
//! from it.
//!
//! Reduced residuals are expressions in the symbols `v, v_p, v_q, w, w_p,
//! w_q, p, q`, where `v(p, q)` is the new unknown and `w` its reduced
//! vorticity.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalPoint, Expr};
use crate::liealg::{AlgebraElement, Generator, VectorField, VARS};
use crate::pde::{beta_transform, residual_report, residual_with, transform_solution, Direction, PveParams, ResidualReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("unknown reduction case {0}")]
    UnknownCase(u8),
    #[error("case 7 admits no invariant ansatz")]
    NotReducible,
    #[error("singular sample point: {0}")]
    SingularPoint(String),
    #[error("a = 0: use the singular branch")]
    SingularA,
    #[error("a + b = 0: the reduced ODE degenerates")]
    DegenerateAb,
    #[error("F must be nonzero")]
    ZeroF,
    #[error("inconsistent reduction: b = 0 requires c = 0")]
    Inconsistent,
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// Parameter slots of the one-dimensional cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub a: f64,
    pub c: f64,
    /// The ± of case 3.
    pub eps: i8,
    #[serde(rename = "F")]
    pub f: f64,
}

impl Default for CaseParams {
    fn default() -> Self {
        Self { a: 0.0, c: 0.0, eps: 1, f: 1.0 }
    }
}

/// How `w` is formed from `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducedLaplacian {
    /// `w = v_pp + v_qq`
    Cartesian,
    /// `w = v_pp + v_p / p`
    Radial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ansatz {
    pub p: Expr,
    pub q: Expr,
    /// The invariant `v` as a function of `(t, x, y, psi)`.
    pub v_invariant: Expr,
    /// `psi` in terms of `(t, x, y)` and the symbol `v`.
    pub psi_of_v: Expr,
    pub reduced_residual: Expr,
    pub laplacian: ReducedLaplacian,
    /// Full residual = `mu` · reduced residual, `mu` in `(t, x, y)`.
    pub mu: Expr,
    /// Field that annihilates `p`, `q` and `v_invariant`. It equals the
    /// class generator except in case 6, whose catalogued invariants belong to
    /// `vt + c vpsi`.
    pub annihilator: AlgebraElement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCase {
    pub class_id: u8,
    /// Parameters kept as the symbols `a`, `c`, `F`.
    pub symbolic: bool,
    pub params: CaseParams,
    pub generator: AlgebraElement,
    pub ansatz: Option<Ansatz>,
}

fn s(name: &str) -> Expr {
    Expr::sym(name)
}

/// Ansatz, reduced equation and scaling factor for class `class_id` of the
/// one-dimensional optimal system (β = 0).
pub fn build_case(class_id: u8, params: CaseParams) -> Result<ReductionCase, ReductionError> {
    build(class_id, params, false)
}

/// Catalogue form with `a`, `c` and `F` left as symbols. Only the sign of
/// case 3 is fixed; `generator` holds the numeric coordinates of `params`.
pub fn build_case_symbolic(class_id: u8, eps: i8) -> Result<ReductionCase, ReductionError> {
    build(class_id, CaseParams { eps, ..CaseParams::default() }, true)
}

fn build(class_id: u8, params: CaseParams, symbolic: bool) -> Result<ReductionCase, ReductionError> {
    use Generator::*;
    let (a, c, f) = if symbolic {
        (s("a"), s("c"), s("F"))
    } else {
        (Expr::real(params.a), Expr::real(params.c), Expr::real(params.f))
    };
    let e = Expr::int(if params.eps < 0 { -1 } else { 1 });
    let [t, x, y, psi] = VARS.map(Expr::sym);
    let [v, vp, vq, w, wp, wq, p, q] = ["v", "v_p", "v_q", "w", "w_p", "w_q", "p", "q"].map(s);
    let el = |pairs: &[(Generator, f64)]| {
        let mut g = [0.0; 6];
        for (k, val) in pairs {
            g[k.index()] += val;
        }
        AlgebraElement(g)
    };
    let rotated = |angle: &Expr| {
        let (co, si) = (angle.cos(), angle.sin());
        (&x * &co + &y * &si, -(&x * &si) + &y * &co)
    };
    let jac = &vq * &wp - &vp * &wq;
    let (generator, ansatz) = match class_id {
        1 => {
            let (pp, qq) = rotated(&(&a * &t.ln()));
            let rot_w = &q * &wp - &p * &wq;
            let rot_v = &q * &vp - &p * &vq;
            let red = &w - &(&a * &rot_w) - &f * &(&v - &(&a * &rot_v)) + jac.clone();
            let gen = el(&[(D, 1.0), (Vr, params.a)]);
            let mu = -t.powi(-2);
            (gen, Ansatz { p: pp, q: qq, v_invariant: &t * &psi, psi_of_v: &v / &t, reduced_residual: red, laplacian: ReducedLaplacian::Cartesian, mu, annihilator: gen })
        }
        2 => {
            let red = &w + &(&a * &wp) - &f * &(&v + &(&a * &vp)) + jac.clone();
            let gen = el(&[(D, 1.0), (Vx, params.a)]);
            let ansatz = Ansatz {
                annihilator: gen,
                p: &x - &(&a * &t.ln()),
                q: y.clone(),
                v_invariant: &t * &psi,
                psi_of_v: &v / &t,
                reduced_residual: red,
                laplacian: ReducedLaplacian::Cartesian,
                mu: -t.powi(-2),
            };
            (gen, ansatz)
        }
        3 => {
            let (pp, qq) = rotated(&(&e * &t));
            let red = &e * &(&q * &wp - &p * &wq) - &(&e * &f) * &(&q * &vp - &p * &vq + a.clone()) - jac.clone();
            let gen = el(&[(Vr, 1.0), (Vt, params.eps.signum() as f64), (Vpsi, params.a)]);
            let shift = &(&e * &a) * &t;
            let ansatz = Ansatz {
                annihilator: gen,
                p: pp,
                q: qq,
                v_invariant: &psi - &shift,
                psi_of_v: &v + &shift,
                reduced_residual: red,
                laplacian: ReducedLaplacian::Cartesian,
                mu: Expr::one(),
            };
            (gen, ansatz)
        }
        4 => {
            let angle = (&x / &y).atan();
            let red = &wq - &(&f * &vq) - &(&c / &p) * &wp;
            let gen = el(&[(Vr, 1.0), (Vpsi, params.c)]);
            let ansatz = Ansatz {
                annihilator: gen,
                p: (x.powi(2) + y.powi(2)).sqrt(),
                q: t.clone(),
                v_invariant: &psi + &(&c * &angle),
                psi_of_v: &v - &(&c * &angle),
                reduced_residual: red,
                laplacian: ReducedLaplacian::Radial,
                mu: Expr::one(),
            };
            (gen, ansatz)
        }
        5 | 6 => {
            let shift = &c * &t;
            let (pp, red, gen) = if class_id == 5 {
                let red = &a * &wp - &f * &(&a * &vp - c.clone()) + jac.clone();
                (&x - &(&a * &t), red, el(&[(Vt, 1.0), (Vx, params.a), (Vpsi, params.c)]))
            } else {
                (x.clone(), &f * &c + jac.clone(), el(&[(Vx, 1.0), (Vpsi, params.c)]))
            };
            let annihilator = if class_id == 5 { gen } else { el(&[(Vt, 1.0), (Vpsi, params.c)]) };
            let ansatz = Ansatz {
                annihilator,
                p: pp,
                q: y.clone(),
                v_invariant: &psi - &shift,
                psi_of_v: &v + &shift,
                reduced_residual: red,
                laplacian: ReducedLaplacian::Cartesian,
                mu: Expr::int(-1),
            };
            (gen, ansatz)
        }
        7 => return Ok(ReductionCase { class_id, symbolic, params, generator: el(&[(Vpsi, 1.0)]), ansatz: None }),
        _ => return Err(ReductionError::UnknownCase(class_id)),
    };
    Ok(ReductionCase { class_id, symbolic, params, generator, ansatz: Some(ansatz) })
}

impl ReductionCase {
    pub fn is_reducible(&self) -> bool {
        self.ansatz.is_some()
    }

    fn ansatz(&self) -> Result<&Ansatz, ReductionError> {
        self.ansatz.as_ref().ok_or(ReductionError::NotReducible)
    }

    /// `field` applied to `p`, `q` and the invariant `v`; all three vanish
    /// for a genuine set of invariants of `field`.
    pub fn defects_under(&self, field: &AlgebraElement) -> Result<[Expr; 3], ReductionError> {
        let an = self.ansatz()?;
        let field: VectorField = field.to_field(&crate::liealg::basis_a0());
        Ok([field.apply(&an.p), field.apply(&an.q), field.apply(&an.v_invariant)])
    }

    /// Defects under the annihilator of the ansatz.
    pub fn invariance_defects(&self) -> Result<[Expr; 3], ReductionError> {
        self.defects_under(&self.ansatz()?.annihilator)
    }

    /// Reduced residual with `v` replaced by a concrete function of `(p, q)`.
    pub fn reduced_for(&self, vtest: &Expr) -> Result<Expr, ReductionError> {
        let an = self.ansatz()?;
        let (vp, vq) = (vtest.diff("p"), vtest.diff("q"));
        let w = match an.laplacian {
            ReducedLaplacian::Cartesian => vp.diff("p") + vq.diff("q"),
            ReducedLaplacian::Radial => vp.diff("p") + &vp / &s("p"),
        };
        let map: HashMap<String, Expr> = [
            ("v", vtest.clone()),
            ("v_p", vp),
            ("v_q", vq),
            ("w_p", w.diff("p")),
            ("w_q", w.diff("q")),
            ("w", w),
        ]
        .into_iter()
        .map(|(k, e)| (k.to_string(), e))
        .collect();
        Ok(an.reduced_residual.subs(&map))
    }

    /// Stream function of the invariant solution generated by `vtest`.
    pub fn psi_for(&self, vtest: &Expr) -> Result<Expr, ReductionError> {
        let an = self.ansatz()?;
        let v_txy = vtest.subs(&[("p".to_string(), an.p.clone()), ("q".to_string(), an.q.clone())].into_iter().collect());
        Ok(an.psi_of_v.subs1("v", &v_txy))
    }

    /// Random points in the domain of the ansatz: t ∈ [0.5, 2], x ∈ [−2, 2],
    /// y ∈ [0.3, 2] (y > 0 keeps arctan(x/y) smooth in case 4).
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<EvalPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                EvalPoint::new()
                    .with("t", rng.random_range(0.5..2.0))
                    .with("x", rng.random_range(-2.0..2.0))
                    .with("y", rng.random_range(0.3..2.0))
            })
            .collect()
    }

    fn check_point(&self, pt: &EvalPoint) -> Result<(), ReductionError> {
        let t = pt.get("t").unwrap_or(f64::NAN);
        let (x, y) = (pt.get("x").unwrap_or(f64::NAN), pt.get("y").unwrap_or(f64::NAN));
        let bad = match self.class_id {
            1 | 2 => t <= 0.0,
            4 => y <= 0.0 || x.hypot(y) == 0.0,
            _ => false,
        };
        if bad || !t.is_finite() || !x.is_finite() || !y.is_finite() {
            return Err(ReductionError::SingularPoint(format!("t={t}, x={x}, y={y}")));
        }
        Ok(())
    }

    /// Substitutes the invariant solution built from `vtest` into the full
    /// equation (β = 0) and compares with `mu` times the reduced residual.
    pub fn consistency_check(&self, vtest: &Expr, pts: &[EvalPoint]) -> Result<ConsistencyReport, ReductionError> {
        let an = self.ansatz()?;
        for pt in pts {
            self.check_point(pt)?;
        }
        let full = residual_with(&self.psi_for(vtest)?, &Expr::real(self.params.f), &Expr::zero());
        let reduced = self.reduced_for(vtest)?;
        let mut worst = 0.0f64;
        for pt in pts {
            let ev = |e: &Expr, pt: &EvalPoint| e.eval(pt).map_err(|err| ReductionError::Eval(err.to_string()));
            let lhs = ev(&full, pt)?;
            let pq = EvalPoint::new().with("p", ev(&an.p, pt)?).with("q", ev(&an.q, pt)?);
            let rhs = ev(&an.mu, pt)? * ev(&reduced, &pq)?;
            let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
            worst = worst.max(rel);
        }
        Ok(ConsistencyReport {
            class_id: self.class_id,
            mu: an.mu.to_string(),
            max_rel_mismatch: worst,
            points: pts.len(),
        })
    }

    fn generator_label(&self) -> String {
        if !self.symbolic {
            return self.generator.to_string();
        }
        let t = crate::classify::class_template(1, self.class_id).unwrap_or_default();
        let sign = if self.params.eps < 0 { "-" } else { "+" };
        t.trim_matches(|ch| ch == '<' || ch == '>').replace('±', sign)
    }

    /// CLI-facing description.
    pub fn describe(&self) -> serde_json::Value {
        match &self.ansatz {
            None => serde_json::json!({ "class_id": self.class_id, "reducible": false }),
            Some(an) => serde_json::json!({
                "class_id": self.class_id,
                "reducible": true,
                "generator": self.generator_label(),
                "p": an.p.to_string(),
                "q": an.q.to_string(),
                "v": format!("v = {}", an.v_invariant),
                "ansatz": format!("psi = {}", an.psi_of_v),
                "reduced_residual": an.reduced_residual.to_string(),
                "laplacian": an.laplacian,
                "mu": an.mu.to_string(),
                "annihilator": match (self.symbolic, self.class_id) {
                    (true, 6) => "vt + c vpsi".to_string(),
                    (true, _) => self.generator_label(),
                    _ => an.annihilator.to_string(),
                },
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub class_id: u8,
    pub mu: String,
    pub max_rel_mismatch: f64,
    pub points: usize,
}

impl ConsistencyReport {
    pub const TOL: f64 = 1e-9;

    pub fn passed(&self) -> bool {
        self.points > 0 && self.max_rel_mismatch < Self::TOL
    }
}

/// Solution branch of `(a + b) v''' − F a v' = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum OdeBranch {
    /// `λ² = Fa/(a+b) > 0`
    Exponential { lambda: f64 },
    /// `λ² < 0`, frequency `ω = √(−λ²)`
    Trigonometric { omega: f64 },
    /// `a + b = 0`: only `v' = 0` survives
    Degenerate,
}

/// General solution `v(p)` of the reduced ODE with constants `v1, v2, v3`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeKernel {
    pub branch: OdeBranch,
    pub v: Expr,
}

fn zero_rel(x: f64, scale: f64) -> bool {
    x.abs() <= 1e-14 * scale
}

pub fn solve_reduced_ode(a: f64, b: f64, f: f64) -> Result<OdeKernel, ReductionError> {
    if f == 0.0 {
        return Err(ReductionError::ZeroF);
    }
    if a == 0.0 {
        return Err(ReductionError::SingularA);
    }
    let [v1, v2, v3, p] = ["v1", "v2", "v3", "p"].map(s);
    if zero_rel(a + b, a.abs().max(b.abs())) {
        return Ok(OdeKernel { branch: OdeBranch::Degenerate, v: v3 });
    }
    let l2 = Expr::real(f * a / (a + b));
    let l2f = f * a / (a + b);
    if l2f > 0.0 {
        let lam = l2.sqrt();
        let v = &v1 * &(&lam * &p).exp() + &v2 * &(-(&lam * &p)).exp() + v3;
        Ok(OdeKernel { branch: OdeBranch::Exponential { lambda: l2f.sqrt() }, v })
    } else {
        let om = (-l2).sqrt();
        let v = &v1 * &(&om * &p).cos() + &v2 * &(&om * &p).sin() + v3;
        Ok(OdeKernel { branch: OdeBranch::Trigonometric { omega: (-l2f).sqrt() }, v })
    }
}

/// `(a + b) v''' − F a v'` for a function of `p`.
pub fn reduced_ode_residual(v: &Expr, a: f64, b: f64, f: f64) -> Expr {
    Expr::real(a + b) * v.diff_n("p", 3) - Expr::real(f * a) * v.diff("p")
}

/// An explicit solution with the parameters it solves for.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub psi: Expr,
    pub params: PveParams,
    pub description: String,
    pub conditions: Vec<String>,
}

impl ExactSolution {
    /// Residual check over 100 random points.
    pub fn report(&self) -> ResidualReport {
        residual_report(&self.psi, &self.params, 100, 0xe5)
    }
}

/// Constants of the two-dimensional solution family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoDimParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub beta: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
}

/// Invariant solution for `⟨vt + a vx + c vpsi, vy + b vpsi⟩`: the kernel of
/// the reduced ODE composed with `ψ = v(x − at) + by + (c/a)x`, then carried
/// to β ≠ 0 by the inverse β-transform.
pub fn exact_solution_2d(k: &TwoDimParams) -> Result<ExactSolution, ReductionError> {
    if k.a + k.b == 0.0 {
        return Err(ReductionError::DegenerateAb);
    }
    let kernel = solve_reduced_ode(k.a, k.b, k.f)?;
    let consts: HashMap<String, Expr> =
        [("v1", k.psi1), ("v2", k.psi2), ("v3", k.psi3)].into_iter().map(|(n, v)| (n.to_string(), Expr::real(v))).collect();
    let (t, x, y) = (s("t"), s("x"), s("y"));
    let p = &x - &(Expr::real(k.a) * t);
    let v = kernel.v.subs(&consts).subs1("p", &p);
    let tilde = v + Expr::real(k.b) * y + Expr::real(k.c / k.a) * x;
    let params = PveParams::new(k.f, k.beta);
    let psi = if k.beta == 0.0 {
        tilde
    } else {
        let tr = beta_transform(&params).map_err(|_| ReductionError::ZeroF)?;
        transform_solution(&tilde, &tr, Direction::Inverse).expect("β-transform is fibre-preserving")
    };
    let branch = match kernel.branch {
        OdeBranch::Exponential { .. } => "exponential",
        OdeBranch::Trigonometric { .. } => "trigonometric",
        OdeBranch::Degenerate => "degenerate",
    };
    Ok(ExactSolution {
        psi,
        params,
        description: format!("two-dimensional invariant solution, {branch} branch"),
        conditions: vec!["a != 0".into(), "a + b != 0".into(), "F != 0".into()],
    })
}

/// The closed form with β-terms, as quoted for the exponential branch.
pub fn quoted_formula(k: &TwoDimParams) -> Expr {
    let (t, x, y) = (s("t"), s("x"), s("y"));
    let r = Expr::real(k.beta / k.f);
    let lam = Expr::real(k.f * k.a / (k.a + k.b)).sqrt();
    let shifted = &x + &(&r * &t);
    let arg = &lam * &(&shifted - &(Expr::real(k.a) * t.clone()));
    Expr::real(k.psi3)
        + (Expr::real(k.b) + r.clone()) * y
        + Expr::real(k.c / k.a) * shifted
        + Expr::real(k.psi1) * arg.exp()
        + Expr::real(k.psi2) * (-arg).exp()
}

/// Solutions of the `a = 0` reduction `ψ = v(x) + ct + by`. For `b ≠ 0`,
/// `v = −(Fc/(6b))x³ + k2 x² + k1 x + k0`; for `b = c = 0` any `profile(x)`
/// solves the equation.
pub fn singular_solutions(b: f64, c: f64, f: f64, ks: [f64; 3], profile: Option<&Expr>) -> Result<ExactSolution, ReductionError> {
    let (t, x, y) = (s("t"), s("x"), s("y"));
    let params = PveParams::new(f, 0.0);
    if b != 0.0 {
        let v = Expr::real(-f * c / (6.0 * b)) * x.powi(3)
            + Expr::real(ks[2]) * x.powi(2)
            + Expr::real(ks[1]) * x.clone()
            + Expr::real(ks[0]);
        let psi = v + Expr::real(c) * t + Expr::real(b) * y;
        return Ok(ExactSolution {
            psi,
            params,
            description: "polynomial solution of F c + b v_ppp = 0".into(),
            conditions: vec!["a = 0".into(), "b != 0".into()],
        });
    }
    if c != 0.0 {
        return Err(ReductionError::Inconsistent);
    }
    let psi = profile.cloned().unwrap_or_else(|| s("x").sin());
    if psi.depends_on("t") || psi.depends_on("y") {
        return Err(ReductionError::Eval("profile must depend on x only".into()));
    }
    Ok(ExactSolution {
        psi,
        params,
        description: "one-dimensional profile psi = v(x)".into(),
        conditions: vec!["a = 0".into(), "b = 0".into(), "c = 0".into()],
    })
}

/// Linear Rossby wave `A sin(k(x − σt))`, `σ = −β/(k² + F)`.
pub fn rossby_wave(amp: f64, k: f64, f: f64, beta: f64) -> ExactSolution {
    let sigma = -beta / (k * k + f);
    let psi = Expr::real(amp) * (Expr::real(k) * (s("x") - Expr::real(sigma) * s("t"))).sin();
    ExactSolution {
        psi,
        params: PveParams::new(f, beta),
        description: format!("Rossby wave, sigma = {sigma}"),
        conditions: vec!["k^2 + F != 0".into()],
    }
}

/// Full residual of `ψ = v(x − at) + by + (c/a)x` divided against the
/// reduced ODE: returns `(full, reduced)` for a concrete `v(p)`.
pub fn two_dim_reduction(vtest: &Expr, a: f64, b: f64, c: f64, f: f64) -> (Expr, Expr) {
    let (t, x, y) = (s("t"), s("x"), s("y"));
    let p = &x - &(Expr::real(a) * t);
    let psi = vtest.subs1("p", &p) + Expr::real(b) * y + Expr::real(c / a) * x;
    let full = residual_with(&psi, &Expr::real(f), &Expr::zero());
    let reduced = reduced_ode_residual(vtest, a, b, f).subs1("p", &p);
    (full, reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equal_expr, parse};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn case(id: u8, a: f64, c: f64, eps: i8, f: f64) -> ReductionCase {
        build_case(id, CaseParams { a, c, eps, f }).unwrap()
    }

    #[test]
    fn catalogue_cases() {
        let c5 = case(5, 1.5, -1.0, 1, 2.0);
        let an = c5.ansatz.as_ref().unwrap();
        assert_eq!(an.p, p("x - 3/2*t"));
        assert_eq!(an.q, p("y"));
        assert_eq!(an.v_invariant, p("psi + t"));
        let expected = p("3/2*w_p - 2*(3/2*v_p + 1) - v_p*w_q + v_q*w_p");
        assert!(equal_expr(&an.reduced_residual, &expected).equal);
        let c4 = case(4, 0.0, 1.0, 1, 1.0);
        let an = c4.ansatz.as_ref().unwrap();
        assert_eq!(an.p, p("sqrt(x^2 + y^2)"));
        assert_eq!(an.v_invariant, p("psi + arctan(x/y)"));
        assert!(equal_expr(&an.reduced_residual, &p("w_q - v_q - w_p/p")).equal);
        assert_eq!(an.laplacian, ReducedLaplacian::Radial);
        let c7 = case(7, 0.0, 0.0, 1, 1.0);
        assert!(!c7.is_reducible());
        assert_eq!(c7.consistency_check(&p("p"), &[]), Err(ReductionError::NotReducible));
    }

    #[test]
    fn invariants_are_annihilated() {
        for (id, a, c, eps) in [(1, 0.3, 0.0, 1), (2, -0.7, 0.0, 1), (3, 0.4, 0.0, 1), (3, 0.4, 0.0, -1), (4, 0.0, 1.0, 1), (5, 1.2, -1.0, 1), (6, 0.0, 1.0, 1)] {
            let rc = case(id, a, c, eps, 1.0);
            for d in rc.invariance_defects().unwrap() {
                assert!(equal_expr(&d, &Expr::zero()).equal, "case {id}: {d}");
            }
        }
    }

    #[test]
    fn case6_catalogue_invariants_belong_to_time_translation() {
        let rc = case(6, 0.0, 1.0, 1, 1.0);
        let [dp, _, _] = rc.defects_under(&rc.generator).unwrap();
        assert_eq!(dp, Expr::one());
        assert_eq!(rc.ansatz.as_ref().unwrap().annihilator, AlgebraElement([0.0, 0.0, 1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn consistency_spec_examples() {
        let rc = case(6, 0.0, 1.0, 1, 1.0);
        let r = rc.consistency_check(&p("p^3*q - p*q^3"), &rc.sample_points(30, 1)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.mu, "-1");
        let rc = case(5, 1.0, 0.0, 1, 1.0);
        let r = rc.consistency_check(&p("sin(p)*cos(q)"), &rc.sample_points(30, 2)).unwrap();
        assert!(r.passed(), "{r:?}");
        let rc = case(1, 0.3, 0.0, 1, 1.0);
        let r = rc.consistency_check(&p("p^2 + q^2"), &rc.sample_points(30, 3)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.mu, "-t^-2");
    }

    #[test]
    fn consistency_all_cases() {
        let tests = [p("p^3*q - p*q^3"), p("sin(p)*cos(q)"), p("exp(p/2)*q^2 + p")];
        for (id, a, c, eps) in [(1, 0.3, 0.0, 1), (2, -0.7, 0.0, 1), (3, 0.4, 0.0, 1), (3, 0.4, 0.0, -1), (4, 0.0, 1.0, 1), (4, 0.0, -1.0, 1), (5, 1.2, -1.0, 1), (6, 0.0, 1.0, 1)] {
            let rc = case(id, a, c, eps, 1.5);
            for v in &tests {
                let r = rc.consistency_check(v, &rc.sample_points(30, id as u64)).unwrap();
                assert!(r.passed(), "case {id} eps {eps} v={v}: {r:?}");
            }
        }
    }

    #[test]
    fn singular_points_are_rejected() {
        let rc = case(1, 0.3, 0.0, 1, 1.0);
        let bad = [EvalPoint::new().with("t", 0.0).with("x", 1.0).with("y", 1.0)];
        assert!(matches!(rc.consistency_check(&p("p"), &bad), Err(ReductionError::SingularPoint(_))));
        let rc = case(4, 0.0, 1.0, 1, 1.0);
        let bad = [EvalPoint::new().with("t", 1.0).with("x", 1.0).with("y", -1.0)];
        assert!(matches!(rc.consistency_check(&p("p"), &bad), Err(ReductionError::SingularPoint(_))));
    }

    #[test]
    fn ode_branches() {
        assert!(matches!(solve_reduced_ode(1.0, 0.0, 1.0).unwrap().branch, OdeBranch::Exponential { lambda } if lambda == 1.0));
        let k = solve_reduced_ode(1.0, 0.0, 1.0).unwrap();
        assert!(equal_expr(&k.v, &p("v1*exp(p) + v2*exp(-p) + v3")).equal);
        assert!(matches!(solve_reduced_ode(1.0, -2.0, 1.0).unwrap().branch, OdeBranch::Trigonometric { omega } if omega == 1.0));
        assert_eq!(solve_reduced_ode(1.0, -1.0, 1.0).unwrap().branch, OdeBranch::Degenerate);
        assert_eq!(solve_reduced_ode(0.0, 1.0, 1.0), Err(ReductionError::SingularA));
    }

    #[test]
    fn ode_branch_completeness() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for i in 0..1000 {
            let a = rng.random_range(0.1..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let b = if i % 10 == 0 { -a } else { rng.random_range(-2.0..2.0) };
            let f = rng.random_range(0.1..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let k = solve_reduced_ode(a, b, f).unwrap();
            let r = reduced_ode_residual(&k.v, a, b, f);
            let pt = EvalPoint::new().with("p", rng.random_range(-1.0..1.0)).with("v1", 0.7).with("v2", -0.4).with("v3", 2.0);
            let val = r.eval(&pt).unwrap();
            assert!(val.abs() < 1e-10, "{a} {b} {f}: {val}");
        }
    }

    #[test]
    fn two_dim_reduction_factor() {
        let (full, red) = two_dim_reduction(&p("sin(p) + p^4"), 1.3, 0.4, 0.7, 2.0);
        assert!(equal_expr(&full, &(-red)).equal);
    }

    #[test]
    fn exact_solution_examples() {
        let base = TwoDimParams { a: 1.0, b: 0.0, c: 0.0, f: 1.0, beta: 0.0, psi1: 1.0, psi2: 1.0, psi3: 1.0 };
        let s0 = exact_solution_2d(&base).unwrap();
        assert!(equal_expr(&s0.psi, &p("1 + exp(x - t) + exp(t - x)")).equal);
        assert!(s0.report().pass());
        let b1 = TwoDimParams { beta: 1.0, psi1: 0.5, psi2: -2.0, psi3: 3.0, ..base };
        let s1 = exact_solution_2d(&b1).unwrap();
        assert!(equal_expr(&s1.psi, &quoted_formula(&b1)).equal);
        assert!(s1.report().pass());
        let trig = TwoDimParams { b: -2.0, ..base };
        assert!(exact_solution_2d(&trig).unwrap().report().pass());
        let general = TwoDimParams { a: 0.8, b: 0.5, c: -1.2, f: 1.7, beta: -0.6, psi1: 0.3, psi2: 0.2, psi3: 1.0 };
        let sg = exact_solution_2d(&general).unwrap();
        assert!(sg.report().pass());
        assert!(equal_expr(&sg.psi, &quoted_formula(&general)).equal);
        assert_eq!(exact_solution_2d(&TwoDimParams { b: -1.0, ..base }), Err(ReductionError::DegenerateAb));
    }

    #[test]
    fn singular_examples() {
        let s = singular_solutions(1.0, 1.0, 1.0, [0.0; 3], None).unwrap();
        assert!(equal_expr(&s.psi, &p("-x^3/6 + t + y")).equal);
        assert!(s.report().residual_symbolic_zero);
        let s = singular_solutions(2.0, -0.5, 1.5, [1.0, -2.0, 0.25], None).unwrap();
        assert!(s.report().pass());
        let s = singular_solutions(0.0, 0.0, 1.0, [0.0; 3], Some(&p("sin(3*x)"))).unwrap();
        assert!(s.report().residual_symbolic_zero);
        assert_eq!(singular_solutions(0.0, 1.0, 1.0, [0.0; 3], None), Err(ReductionError::Inconsistent));
    }

    #[test]
    fn rossby_wave_solves() {
        for (k, f, beta) in [(1.0, 1.0, 1.0), (2.0, 0.5, -3.0), (3.0, 2.0, 0.7)] {
            let s = rossby_wave(1.3, k, f, beta);
            let rep = s.report();
            assert!(rep.pass(), "{rep:?}");
        }
    }

    #[test]
    fn beta_extension_closure() {
        for base in [rossby_wave(1.0, 2.0, 1.0, 0.0), singular_solutions(1.0, 1.0, 1.0, [0.0; 3], None).unwrap()] {
            let params = PveParams::new(1.0, 0.8);
            let tr = beta_transform(&params).unwrap();
            let psi = transform_solution(&base.psi, &tr, Direction::Inverse).unwrap();
            assert!(residual_report(&psi, &params, 100, 3).pass());
        }
    }

    #[test]
    fn symbolic_catalogue() {
        let rc = build_case_symbolic(5, 1).unwrap();
        let an = rc.ansatz.as_ref().unwrap();
        assert_eq!(an.p, p("x - a*t"));
        assert_eq!(an.v_invariant, p("psi - c*t"));
        assert!(equal_expr(&an.reduced_residual, &p("a*w_p - F*(a*v_p - c) - v_p*w_q + v_q*w_p")).equal);
        assert_eq!(rc.describe()["generator"], "vt + a vx + c vpsi");
        assert_eq!(build_case_symbolic(3, -1).unwrap().describe()["generator"], "vr - vt + a vpsi");
        let c4 = build_case_symbolic(4, 1).unwrap();
        assert_eq!(c4.ansatz.unwrap().v_invariant, p("psi + c*arctan(x/y)"));
    }

    #[test]
    fn describe_json() {
        let v = case(5, 1.0, 0.0, 1, 1.0).describe();
        assert_eq!(v["class_id"], 5);
        assert!(v["reduced_residual"].as_str().unwrap().contains("w_p"));
        assert_eq!(case(7, 0.0, 0.0, 1, 1.0).describe()["reducible"], false);
    }
}
