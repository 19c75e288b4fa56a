//! Point transformations of (t, x, y, ψ) and one-parameter groups.

use std::collections::HashMap;

use super::{AlgebraElement, VectorField, VARS};
use crate::expr::{equal_expr, EvalError, EvalPoint, Expr};

/// An invertible change of variables with both directions kept symbolic.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTransformation {
    pub forward: [Expr; 4],
    pub inverse: [Expr; 4],
}

fn substitute(e: &Expr, images: &[Expr; 4]) -> Expr {
    let map: HashMap<String, Expr> = VARS.iter().map(|v| v.to_string()).zip(images.iter().cloned()).collect();
    e.subs(&map)
}

impl PointTransformation {
    pub fn new(forward: [Expr; 4], inverse: [Expr; 4]) -> Self {
        Self { forward, inverse }
    }

    pub fn identity() -> Self {
        let id = VARS.map(Expr::sym);
        Self { forward: id.clone(), inverse: id }
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &PointTransformation) -> PointTransformation {
        PointTransformation {
            forward: std::array::from_fn(|i| substitute(&next.forward[i], &self.forward)),
            inverse: std::array::from_fn(|i| substitute(&self.inverse[i], &next.inverse)),
        }
    }

    pub fn inverted(&self) -> PointTransformation {
        PointTransformation { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    /// Checks `inverse ∘ forward = id` componentwise.
    pub fn check_inverse(&self) -> bool {
        VARS.iter()
            .enumerate()
            .all(|(i, v)| equal_expr(&substitute(&self.inverse[i], &self.forward), &Expr::sym(v)).equal)
    }

    /// Image of a numeric point; parameters in `params` are bound as well.
    pub fn apply_point(&self, p: [f64; 4], params: &EvalPoint) -> Result<[f64; 4], EvalError> {
        let mut pt = params.clone();
        for (v, x) in VARS.iter().zip(p) {
            pt.set(v, x);
        }
        let mut out = [0.0; 4];
        for (o, e) in out.iter_mut().zip(&self.forward) {
            *o = e.eval(&pt)?;
        }
        Ok(out)
    }

    /// Expression `e` rewritten in the new coordinates, `e ∘ T⁻¹`.
    pub fn transport(&self, e: &Expr) -> Expr {
        substitute(e, &self.inverse)
    }

    /// Pullback `e ∘ T`.
    pub fn pullback(&self, e: &Expr) -> Expr {
        substitute(e, &self.forward)
    }
}

/// Flow of `v` at group parameter `eps` (symbolic or numeric).
///
/// Closed form for every element of the β = 0 algebra: (t, ψ) follow
/// decoupled affine ODEs and (x, y) rotate about a fixed centre, or translate
/// when the rotation coefficient vanishes.
pub fn flow_expr(v: &AlgebraElement, eps: &Expr) -> PointTransformation {
    PointTransformation { forward: flow_images(v, eps), inverse: flow_images(v, &-eps.clone()) }
}

pub fn flow(v: &AlgebraElement, eps: f64) -> PointTransformation {
    flow_expr(v, &Expr::real(eps))
}

fn flow_images(v: &AlgebraElement, eps: &Expr) -> [Expr; 4] {
    let [a1, a2, a3, a4, a5, a6] = v.0.map(Expr::real);
    let [t, x, y, psi] = VARS.map(Expr::sym);
    // ṫ = a1 t + a3,  ψ̇ = −a1 ψ + a6
    let (t_img, psi_img) = if v.0[0] == 0.0 {
        (&t + &(&a3 * eps), &psi + &(&a6 * eps))
    } else {
        let grow = (&a1 * eps).exp();
        let decay = (-(&a1 * eps)).exp();
        let t_img = &t * &grow + &(&a3 / &a1) * &(&grow - &Expr::one());
        let psi_img = &psi * &decay + &(&a6 / &a1) * &(&Expr::one() - &decay);
        (t_img, psi_img)
    };
    // ẋ = −a2 y + a4,  ẏ = a2 x + a5
    let (x_img, y_img) = if v.0[1] == 0.0 {
        (&x + &(&a4 * eps), &y + &(&a5 * eps))
    } else {
        let (xc, yc) = (-(&a5 / &a2), &a4 / &a2);
        let th = &a2 * eps;
        let (c, s) = (th.cos(), th.sin());
        let (dx, dy) = (&x - &xc, &y - &yc);
        (&xc + &(&(&dx * &c) - &(&dy * &s)), &yc + &(&(&dx * &s) + &(&dy * &c)))
    };
    [t_img, x_img, y_img, psi_img]
}

/// `T_* v`: components `v(T^i)` expressed in the image coordinates.
pub fn pushforward(v: &VectorField, tr: &PointTransformation) -> VectorField {
    let coeffs = std::array::from_fn(|i| tr.transport(&v.apply(&tr.forward[i])));
    VectorField::new(&v.name, coeffs)
}

/// `t̃ = t, x̃ = x + (β/F)t, ỹ = y, ψ̃ = ψ − (β/F)y`, which removes the β term.
pub fn equivalence_transformation(f: &Expr, beta: &Expr) -> PointTransformation {
    let [t, x, y, psi] = VARS.map(Expr::sym);
    let r = beta / f;
    PointTransformation {
        forward: [t.clone(), &x + &(&r * &t), y.clone(), &psi - &(&r * &y)],
        inverse: [t.clone(), &x - &(&r * &t), y.clone(), &psi + &(&r * &y)],
    }
}
