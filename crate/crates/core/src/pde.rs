//! Residual operator of the potential vorticity equation, the β-eliminating
//! equivalence transformation and symmetry checks on explicit solutions.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalPoint, Expr};
use crate::liealg::{
    basis_a0, basis_a_beta, decompose, equivalence_transformation, flow, pushforward, AlgebraElement, LieError,
    PointTransformation,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdeError {
    #[error("transformation undefined; F must be nonzero")]
    ZeroF,
    #[error("transformation is not fibre-preserving: base coordinates depend on psi")]
    NotFibrePreserving,
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Physical parameters `F` and `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PveParams {
    #[serde(rename = "F")]
    pub f: f64,
    pub beta: f64,
}

impl PveParams {
    pub fn new(f: f64, beta: f64) -> Self {
        assert!(f.is_finite() && beta.is_finite(), "parameters must be finite");
        Self { f, beta }
    }

    pub fn f_expr(&self) -> Expr {
        Expr::real(self.f)
    }

    pub fn beta_expr(&self) -> Expr {
        Expr::real(self.beta)
    }
}

/// `ζ = ψ_xx + ψ_yy`.
pub fn vorticity(psi: &Expr) -> Expr {
    psi.diff_n("x", 2) + psi.diff_n("y", 2)
}

/// `J(a, b) = a_x b_y − a_y b_x`.
pub fn jacobian(a: &Expr, b: &Expr) -> Expr {
    a.diff("x") * b.diff("y") - a.diff("y") * b.diff("x")
}

/// `ζ_t − Fψ_t + J(ψ, ζ) + βψ_x` with symbolic or numeric parameters.
pub fn residual_with(psi: &Expr, f: &Expr, beta: &Expr) -> Expr {
    let zeta = vorticity(psi);
    zeta.diff("t") - f * &psi.diff("t") + jacobian(psi, &zeta) + beta * &psi.diff("x")
}

pub fn residual(psi: &Expr, params: &PveParams) -> Expr {
    residual_with(psi, &params.f_expr(), &params.beta_expr())
}

/// `(t, x, y, ψ) ↦ (t, x + (β/F)t, y, ψ − (β/F)y)`.
pub fn beta_transform(params: &PveParams) -> Result<PointTransformation, PdeError> {
    if params.f == 0.0 {
        return Err(PdeError::ZeroF);
    }
    Ok(equivalence_transformation(&params.f_expr(), &params.beta_expr()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Image of the graph `ψ = psi(t, x, y)` under a fibre-preserving
/// transformation. For the β-transform in the inverse direction this is
/// `ψ̃(t, x + (β/F)t, y) + (β/F)y`.
pub fn transform_solution(psi: &Expr, tr: &PointTransformation, direction: Direction) -> Result<Expr, PdeError> {
    let tr = match direction {
        Direction::Forward => tr.clone(),
        Direction::Inverse => tr.inverted(),
    };
    if tr.inverse[..3].iter().chain(&tr.forward[..3]).any(|e| e.depends_on("psi")) {
        return Err(PdeError::NotFibrePreserving);
    }
    let on_graph = tr.forward[3].subs1("psi", psi);
    let back: HashMap<String, Expr> =
        ["t", "x", "y"].iter().zip(&tr.inverse[..3]).map(|(v, e)| (v.to_string(), e.clone())).collect();
    Ok(on_graph.subs(&back))
}

/// Outcome of a residual check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residual_symbolic_zero: bool,
    pub residual_max_abs: f64,
    pub points: usize,
}

impl ResidualReport {
    pub const TOL: f64 = 1e-9;

    /// Decided by the numeric bound; the symbolic flag is advisory.
    pub fn pass(&self) -> bool {
        self.points > 0 && self.residual_max_abs < Self::TOL
    }
}

/// Symbolic check plus the largest residual over `n` random points in
/// `[−2, 2]³` (with |t| ≥ 0.05). Free symbols other than t, x, y are drawn
/// from `[0.5, 1.5]`.
pub fn residual_report(psi: &Expr, params: &PveParams, n: usize, seed: u64) -> ResidualReport {
    let res = residual(psi, params);
    let symbolic = res.is_zero();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra: Vec<String> = res.symbols().into_iter().filter(|s| !["t", "x", "y"].contains(&s.as_str())).collect();
    let mut worst = 0.0f64;
    let mut good = 0;
    let mut attempts = 0;
    while good < n && attempts < 20 * n {
        attempts += 1;
        let mut t: f64 = rng.random_range(-2.0..2.0);
        if t.abs() < 0.05 {
            t = 0.05f64.copysign(t);
        }
        let mut pt = EvalPoint::new().with("t", t).with("x", rng.random_range(-2.0..2.0)).with("y", rng.random_range(-2.0..2.0));
        for s in &extra {
            pt.set(s, rng.random_range(0.5..1.5));
        }
        if symbolic {
            good += 1;
            continue;
        }
        match res.eval(&pt) {
            Ok(v) => {
                worst = worst.max(v.abs());
                good += 1;
            }
            Err(_) => continue,
        }
    }
    ResidualReport { residual_symbolic_zero: symbolic, residual_max_abs: worst, points: good }
}

/// Point transformation generated by `g` in the symmetry algebra for
/// `params`: the β = 0 algebra when β = 0, otherwise the β-dependent algebra,
/// whose flows are conjugates of β = 0 flows by the β-transform.
pub fn symmetry_transformation(g: &AlgebraElement, eps: f64, params: &PveParams) -> Result<PointTransformation, PdeError> {
    if params.beta == 0.0 {
        return Ok(flow(g, eps));
    }
    let tr = beta_transform(params)?;
    let field = g.to_field(&basis_a_beta(&params.f_expr(), &params.beta_expr()));
    let image = pushforward(&field, &tr);
    let coords = decompose(&image, &basis_a0())?.ok_or_else(|| LieError::NotClosed(field.name.clone(), "(trans)".into()))?;
    let g0 = AlgebraElement(std::array::from_fn(|i| num_traits::ToPrimitive::to_f64(&coords[i]).unwrap()));
    Ok(tr.then(&flow(&g0, eps)).then(&tr.inverted()))
}

/// Transports `psi` by the group element `exp(eps g)` and checks the
/// residual of the image.
pub fn verify_symmetry(g: &AlgebraElement, eps: f64, psi: &Expr, params: &PveParams) -> Result<ResidualReport, PdeError> {
    let tr = symmetry_transformation(g, eps, params)?;
    let image = transform_solution(psi, &tr, Direction::Forward)?;
    Ok(residual_report(&image, params, 100, 0x5e7))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{equal_expr, parse};
    use crate::liealg::Generator;
    use rand::Rng;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn vorticity_examples() {
        assert_eq!(vorticity(&p("x^2+y^2")), Expr::int(4));
        let s = p("sin(x)*sin(y)");
        assert_eq!(vorticity(&s), Expr::int(-2) * s);
        assert!(vorticity(&p("7")).is_zero());
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian(&p("x"), &p("y")), Expr::one());
        let f = p("sin(x*y) + t*x^3");
        assert!(jacobian(&f, &f).is_zero());
        assert_eq!(jacobian(&p("x*y"), &p("x^2")), p("-2*x^2"));
    }

    fn random_poly(rng: &mut ChaCha8Rng) -> Expr {
        let mut terms = Vec::new();
        for _ in 0..4 {
            let c = Expr::int(rng.random_range(-3..=3));
            terms.push(c * p("x").powi(rng.random_range(0..3)) * p("y").powi(rng.random_range(0..3)));
        }
        Expr::add(terms)
    }

    #[test]
    fn jacobian_antisymmetric_and_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let (f, g, h) = (random_poly(&mut rng), random_poly(&mut rng), random_poly(&mut rng));
            assert!(equal_expr(&jacobian(&f, &g), &-jacobian(&g, &f)).equal);
            let lhs = jacobian(&(&f * &g), &h);
            let rhs = &f * &jacobian(&g, &h) + &g * &jacobian(&f, &h);
            assert!(equal_expr(&lhs, &rhs).equal);
        }
    }

    #[test]
    fn residual_examples() {
        let params = PveParams::new(1.0, 0.0);
        assert!(residual(&Expr::zero(), &params).is_zero());
        let rossby = p("A*sin(k*(x + beta/(k^2+F)*t))");
        let r = residual_with(&rossby, &p("F"), &p("beta"));
        assert!(equal_expr(&r, &Expr::zero()).equal, "{r}");
    }

    #[test]
    fn beta_transform_examples() {
        let id = beta_transform(&PveParams::new(2.0, 0.0)).unwrap();
        assert_eq!(id, PointTransformation::identity());
        let tr = beta_transform(&PveParams::new(1.0, 1.0)).unwrap();
        assert_eq!(tr.forward[1], p("x + t"));
        assert_eq!(tr.forward[3], p("psi - y"));
        assert!(tr.check_inverse());
        assert_eq!(beta_transform(&PveParams::new(0.0, 1.0)), Err(PdeError::ZeroF));
    }

    #[test]
    fn transported_stationary_solution_solves_beta_equation() {
        let base = p("sin(x)*sin(y)");
        assert!(residual(&base, &PveParams::new(1.0, 0.0)).is_zero());
        let params = PveParams::new(1.0, 1.0);
        let tr = beta_transform(&params).unwrap();
        let psi = transform_solution(&base, &tr, Direction::Inverse).unwrap();
        assert!(equal_expr(&psi, &p("sin(x+t)*sin(y) + y")).equal);
        assert!(equal_expr(&residual(&psi, &params), &Expr::zero()).equal);
        let same = transform_solution(&base, &PointTransformation::identity(), Direction::Forward).unwrap();
        assert_eq!(same, base);
    }

    #[test]
    fn equivalence_transformation_maps_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (f, beta) in [(1.0, 1.0), (2.0, -3.0), (-1.0, 0.5)] {
            let params = PveParams::new(f, beta);
            let tr = beta_transform(&params).unwrap();
            for _ in 0..3 {
                let tilde = random_poly(&mut rng) * p("t") + random_poly(&mut rng) * p("sin(x - 2*y)");
                let r0 = residual(&tilde, &PveParams::new(f, 0.0));
                let psi = transform_solution(&tilde, &tr, Direction::Inverse).unwrap();
                let lhs = residual(&psi, &params);
                let rhs = r0.subs1("x", &(p("x") + Expr::real(beta / f) * p("t")));
                assert!(equal_expr(&lhs, &rhs).equal);
            }
        }
    }

    #[test]
    fn symmetry_examples() {
        let params = PveParams::new(1.0, 0.0);
        let s = p("sin(x)*sin(y)");
        assert!(verify_symmetry(&AlgebraElement::basis(Generator::Vx), 0.5, &s, &params).unwrap().pass());
        let travelling = p("2 + 3*exp(x - t) - exp(t - x)");
        let rep = verify_symmetry(&AlgebraElement::basis(Generator::D), 1.0, &travelling, &params).unwrap();
        assert!(rep.pass(), "{rep:?}");
        let beta = PveParams::new(1.0, 1.0);
        let tr = beta_transform(&beta).unwrap();
        let moved = transform_solution(&s, &tr, Direction::Inverse).unwrap();
        let rep = verify_symmetry(&AlgebraElement::basis(Generator::Vr), std::f64::consts::FRAC_PI_3, &moved, &beta).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn non_symmetry_is_detected() {
        // a Galilean boost is not in the algebra: transporting by it breaks the residual
        let params = PveParams::new(1.0, 0.0);
        let s = p("sin(x)*sin(y) + x");
        let boost = PointTransformation::new(
            [p("t"), p("x + t"), p("y"), p("psi")],
            [p("t"), p("x - t"), p("y"), p("psi")],
        );
        let img = transform_solution(&s, &boost, Direction::Forward).unwrap();
        assert!(!residual_report(&img, &params, 50, 1).pass());
    }

    #[test]
    fn all_generators_preserve_fixture_solutions() {
        let params = PveParams::new(1.0, 0.0);
        let fixtures = [p("sin(x)*sin(y)"), p("2 + 3*exp(x - t) - exp(t - x)"), p("cos(2*x + y) + 3")];
        for f in &fixtures {
            assert!(residual_report(f, &params, 20, 0).pass(), "{f}");
        }
        for g in Generator::ALL {
            for eps in [0.3, -0.3, 1.0, -1.0] {
                for f in &fixtures {
                    let rep = verify_symmetry(&AlgebraElement::basis(g), eps, f, &params).unwrap();
                    assert!(rep.pass(), "{g} {eps} {f}: {rep:?}");
                }
            }
        }
    }

    #[test]
    fn report_json_shape() {
        let rep = residual_report(&p("sin(x)*sin(y)"), &PveParams::new(1.0, 0.0), 10, 0);
        let v: serde_json::Value = serde_json::to_value(rep).unwrap();
        assert_eq!(v["residual_symbolic_zero"], true);
        assert_eq!(v["points"], 10);
    }
}
