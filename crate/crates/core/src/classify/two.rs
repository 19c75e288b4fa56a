use std::f64::consts::{FRAC_PI_2, PI};

use super::{closure_residual, sign_i8, CanonicalForm, ClassParams, ClassifyError, Subalgebra, Work, DERIVED_ZERO, RAW_ZERO};
use crate::liealg::Generator::*;

const CLOSURE_TOL: f64 = 1e-10;

fn snap(x: f64) -> f64 {
    if x.abs() <= DERIVED_ZERO {
        0.0
    } else {
        x
    }
}

/// Maps a two-dimensional subalgebra to the representative of its class.
///
/// The case split follows the rank of the (D, v_r) coordinate functionals on
/// the span: both are invariant under every adjoint action, since nothing
/// brackets into D or v_r.
pub fn canonicalize_2d(s: &Subalgebra) -> Result<CanonicalForm, ClassifyError> {
    let [v1, v2] = match s.generators.as_slice() {
        [a, b] => [*a, *b],
        _ => return Err(ClassifyError::Dependent),
    };
    let res = closure_residual(&v1, &v2)?;
    if res > CLOSURE_TOL {
        return Err(ClassifyError::NotClosed(res));
    }
    let mut w = Work::new(vec![v1, v2]);
    w.recombine([[1.0 / v1.max_abs(), 0.0], [0.0, 1.0 / v2.max_abs()]]);
    let a = |w: &Work, i: usize| w.rows[i].0;
    let (r0, r1) = (a(&w, 0), a(&w, 1));
    let det = r0[0] * r1[1] - r0[1] * r1[0];
    let amax = [r0[0], r0[1], r1[0], r1[1]].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let (class, params) = if det.abs() > DERIVED_ZERO {
        w.recombine([[r1[1] / det, -r0[1] / det], [-r1[0] / det, r0[0] / det]]);
        w.adjoint(Vt, a(&w, 0)[2]);
        w.adjoint(Vpsi, -a(&w, 0)[5]);
        w.adjoint(Vx, a(&w, 1)[4]);
        w.adjoint(Vy, -a(&w, 1)[3]);
        (1, ClassParams::none())
    } else if amax > RAW_ZERO {
        rank_one(&mut w)
    } else {
        rank_zero(&mut w)
    };
    Ok(w.finish(2, class, params))
}

/// Splits off the kernel of the (D, v_r) functionals: row 0 becomes the
/// normalized complement, row 1 an element of the ideal ⟨vt, vx, vy, vpsi⟩.
fn rank_one(w: &mut Work) -> (u8, ClassParams) {
    let (r0, r1) = (w.rows[0].0, w.rows[1].0);
    let n0 = r0[0].hypot(r0[1]);
    let n1 = r1[0].hypot(r1[1]);
    let (p, q) = if n0 >= n1 { (r0, r1) } else { (r1, r0) };
    let lambda = (q[0] * p[0] + q[1] * p[1]) / (p[0] * p[0] + p[1] * p[1]);
    let has_d = p[0].abs() > DERIVED_ZERO * p[0].hypot(p[1]);
    let norm = if has_d { p[0] } else { p[1] };
    if n0 >= n1 {
        w.recombine([[1.0 / norm, 0.0], [-lambda, 1.0]]);
    } else {
        w.recombine([[0.0, 1.0 / norm], [1.0, -lambda]]);
    }
    let row = |w: &Work, i: usize| w.rows[i].0;
    if has_d {
        w.adjoint(Vt, row(w, 0)[2]);
        w.adjoint(Vpsi, -row(w, 0)[5]);
        let a = row(w, 0)[1];
        if a.abs() > DERIVED_ZERO {
            w.adjoint(Vx, row(w, 0)[4] / a);
            w.adjoint(Vy, -row(w, 0)[3] / a);
            let u = row(w, 1);
            if u[2].abs() >= u[5].abs() {
                w.recombine([[1.0, 0.0], [0.0, 1.0 / u[2]]]);
                (2, ClassParams::a(a))
            } else {
                w.recombine([[1.0, 0.0], [0.0, 1.0 / u[5]]]);
                (5, ClassParams::a(a))
            }
        } else {
            let u = row(w, 1);
            let (gt, gp, gxy) = (u[2].abs(), u[5].abs(), u[3].hypot(u[4]));
            if gxy >= gt.max(gp) {
                w.adjoint(Vr, FRAC_PI_2 - u[4].atan2(u[3]));
                let (r, u) = (row(w, 0), row(w, 1));
                w.recombine([[1.0, -r[4] / u[4]], [0.0, 1.0 / u[4]]]);
                let x = row(w, 0)[3];
                if x < 0.0 {
                    w.adjoint(Vr, PI);
                    w.recombine([[1.0, 0.0], [0.0, -1.0]]);
                }
                (4, ClassParams::a(snap(x.abs())))
            } else {
                let idx = if gt >= gp { 2 } else { 5 };
                w.recombine([[1.0, 0.0], [0.0, 1.0 / u[idx]]]);
                let r = row(w, 0);
                w.rotate_to_x(r[3], r[4]);
                (if idx == 2 { 3 } else { 6 }, ClassParams::a(snap(r[3].hypot(r[4]))))
            }
        }
    } else {
        w.adjoint(Vx, row(w, 0)[4]);
        w.adjoint(Vy, -row(w, 0)[3]);
        let (r, u) = (row(w, 0), row(w, 1));
        let umax = u[2].abs().max(u[5].abs());
        if u[2].abs() > DERIVED_ZERO * umax {
            w.recombine([[1.0, -r[2] / u[2]], [0.0, 1.0 / u[2]]]);
            let (c0, b0) = (row(w, 0)[5], row(w, 1)[5]);
            if c0.abs() > DERIVED_ZERO {
                let eps = c0.abs().ln();
                w.adjoint(D, eps);
                w.recombine([[1.0, 0.0], [0.0, (-eps).exp()]]);
                (7, ClassParams::c(sign_i8(c0)).with_b(snap(b0 / (c0 * c0))))
            } else if b0.abs() > DERIVED_ZERO {
                let eps = b0.abs().ln() / 2.0;
                w.adjoint(D, eps);
                w.recombine([[1.0, 0.0], [0.0, (-eps).exp()]]);
                (7, ClassParams::c(0).with_b(sign_i8(b0) as f64))
            } else {
                (7, ClassParams::c(0).with_b(0.0))
            }
        } else {
            w.recombine([[1.0, -r[5] / u[5]], [0.0, 1.0 / u[5]]]);
            let t = row(w, 0)[2];
            if t.abs() > DERIVED_ZERO {
                let eps = -t.abs().ln();
                w.adjoint(D, eps);
                w.recombine([[1.0, 0.0], [0.0, eps.exp()]]);
                (8, ClassParams::c(sign_i8(t)))
            } else {
                (8, ClassParams::c(0))
            }
        }
    }
}

/// Both generators inside the abelian ideal ⟨vt, vx, vy, vpsi⟩, where only
/// the D-scaling and the rotation act.
fn rank_zero(w: &mut Work) -> (u8, ClassParams) {
    let row = |w: &Work, i: usize| w.rows[i].0;
    let (r0, r1) = (row(w, 0), row(w, 1));
    if r0[2].abs().max(r1[2].abs()) > RAW_ZERO {
        if r0[2].abs() >= r1[2].abs() {
            w.recombine([[1.0 / r0[2], 0.0], [-r1[2] / r0[2], 1.0]]);
        } else {
            w.recombine([[0.0, 1.0 / r1[2]], [1.0, -r0[2] / r1[2]]]);
        }
        let u = row(w, 1);
        let (gxy, gp) = (u[3].hypot(u[4]), u[5].abs());
        if gxy > DERIVED_ZERO * gxy.max(gp) {
            w.adjoint(Vr, FRAC_PI_2 - u[4].atan2(u[3]));
            let (r, u) = (row(w, 0), row(w, 1));
            w.recombine([[1.0, -r[4] / u[4]], [0.0, 1.0 / u[4]]]);
            let (a0, c0, b0) = (row(w, 0)[3], row(w, 0)[5], row(w, 1)[5]);
            let (eps, mut a, mut b, c) = if c0.abs() > DERIVED_ZERO {
                let s = c0.abs().sqrt();
                (c0.abs().ln() / 2.0, a0 / s, b0 / s, sign_i8(c0))
            } else if b0.abs() > DERIVED_ZERO {
                (b0.abs().ln(), a0 / b0.abs(), sign_i8(b0) as f64, 0)
            } else if a0.abs() > DERIVED_ZERO {
                (a0.abs().ln(), sign_i8(a0) as f64, 0.0, 0)
            } else {
                (0.0, 0.0, 0.0, 0)
            };
            w.adjoint(D, eps);
            w.recombine([[(-eps).exp(), 0.0], [0.0, 1.0]]);
            (a, b) = (snap(a), snap(b));
            if b < 0.0 || (b == 0.0 && a < 0.0) {
                w.adjoint(Vr, PI);
                w.recombine([[1.0, 0.0], [0.0, -1.0]]);
                (a, b) = (-a, -b);
            }
            (9, ClassParams::a(a + 0.0).with_b(b + 0.0).with_c(c))
        } else {
            let r = row(w, 0);
            w.recombine([[1.0, -r[5] / u[5]], [0.0, 1.0 / u[5]]]);
            let r = row(w, 0);
            w.rotate_to_x(r[3], r[4]);
            let x = r[3].hypot(r[4]);
            if x > DERIVED_ZERO {
                let eps = x.ln();
                w.adjoint(D, eps);
                w.recombine([[(-eps).exp(), 0.0], [0.0, eps.exp()]]);
                (10, ClassParams::a(1.0))
            } else {
                (10, ClassParams::a(0.0))
            }
        }
    } else {
        let det = r0[3] * r1[4] - r0[4] * r1[3];
        let bmax = [r0[3], r0[4], r1[3], r1[4]].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if det.abs() > DERIVED_ZERO * bmax * bmax {
            w.recombine([[r1[4] / det, -r0[4] / det], [-r1[3] / det, r0[3] / det]]);
            let (c1, b1) = (row(w, 0)[5], row(w, 1)[5]);
            w.adjoint(Vr, -b1.atan2(c1));
            let (r0, r1) = (row(w, 0), row(w, 1));
            let det = r0[3] * r1[4] - r0[4] * r1[3];
            w.recombine([[r1[4] / det, -r0[4] / det], [-r1[3] / det, r0[3] / det]]);
            let rho = row(w, 0)[5];
            if rho.abs() > DERIVED_ZERO {
                w.adjoint(D, rho.abs().ln());
                (11, ClassParams::c(1).with_b(0.0))
            } else {
                (11, ClassParams::c(0).with_b(0.0))
            }
        } else {
            let (n0, n1) = (r0[3].hypot(r0[4]), r1[3].hypot(r1[4]));
            let (p, q) = if n0 >= n1 { (r0, r1) } else { (r1, r0) };
            let lambda = (q[3] * p[3] + q[4] * p[4]) / (p[3] * p[3] + p[4] * p[4]);
            if n0 >= n1 {
                w.recombine([[1.0, 0.0], [-lambda, 1.0]]);
            } else {
                w.recombine([[0.0, 1.0], [1.0, -lambda]]);
            }
            let (r, u) = (row(w, 0), row(w, 1));
            w.recombine([[1.0, -r[5] / u[5]], [0.0, 1.0 / u[5]]]);
            let r = row(w, 0);
            w.rotate_to_x(r[3], r[4]);
            w.recombine([[1.0 / r[3].hypot(r[4]), 0.0], [0.0, 1.0]]);
            (12, ClassParams::none())
        }
    }
}
