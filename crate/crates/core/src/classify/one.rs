use std::f64::consts::PI;

use super::{sign_i8, CanonicalForm, ClassParams, ClassifyError, Work, RAW_ZERO};
use crate::liealg::{AlgebraElement, Generator::*};

/// The seven branch predicates on `(a1, …, a6)`; exactly one holds for a
/// nonzero element.
pub fn branch_conditions_1d(v: &AlgebraElement) -> [bool; 7] {
    let m = v.max_abs();
    let z = |i: usize| v.0[i].abs() <= RAW_ZERO * m;
    let nz = |i: usize| !z(i);
    [
        nz(0) && nz(1),
        nz(0) && z(1),
        z(0) && nz(1) && nz(2),
        z(0) && nz(1) && z(2),
        z(0) && z(1) && nz(2),
        z(0) && z(1) && z(2) && (nz(3) || nz(4)),
        z(0) && z(1) && z(2) && z(3) && z(4) && m > 0.0,
    ]
}

/// Maps `v` to the representative of its class in the one-dimensional
/// optimal system.
pub fn canonicalize_1d(v: &AlgebraElement) -> Result<CanonicalForm, ClassifyError> {
    if !v.is_finite() {
        return Err(ClassifyError::NonFinite);
    }
    let m = v.max_abs();
    if m == 0.0 {
        return Err(ClassifyError::Zero);
    }
    let raw = v.0;
    let z = |x: f64| x.abs() <= RAW_ZERO * m;
    let class = branch_conditions_1d(v).iter().position(|&b| b).expect("branches cover nonzero input") as u8 + 1;
    let mut w = Work::new(vec![*v]);
    let cur = |w: &Work| w.rows[0].0;
    let params = match class {
        1 | 2 => {
            w.scale(1.0 / raw[0]);
            w.adjoint(Vt, cur(&w)[2]);
            w.adjoint(Vpsi, -cur(&w)[5]);
            if class == 1 {
                let a = cur(&w)[1];
                w.adjoint(Vx, cur(&w)[4] / a);
                w.adjoint(Vy, -cur(&w)[3] / a);
                ClassParams::a(raw[1] / raw[0])
            } else {
                let [.., x, y, _] = cur(&w);
                w.rotate_to_x(x, y);
                ClassParams::a(x.hypot(y))
            }
        }
        3 | 4 => {
            w.adjoint(Vx, raw[4] / raw[1]);
            w.adjoint(Vy, -cur(&w)[3] / raw[1]);
            w.scale(1.0 / raw[1]);
            if class == 3 {
                let s = raw[2] / raw[1];
                let q = raw[5] / raw[1];
                w.adjoint(D, -s.abs().ln());
                ClassParams::a(q * s.abs()).with_sign(sign_i8(s))
            } else if z(raw[5]) {
                ClassParams::c(0)
            } else {
                let q = raw[5] / raw[1];
                w.adjoint(D, q.abs().ln());
                ClassParams::c(sign_i8(q))
            }
        }
        5 => {
            w.rotate_to_x(raw[3], raw[4]);
            w.scale(1.0 / raw[2]);
            let r = raw[3].hypot(raw[4]);
            let x = r / raw[2];
            if x < 0.0 {
                w.adjoint(Vr, PI);
            }
            let x = x.abs();
            let q = raw[5] / raw[2];
            if !z(raw[5]) {
                let eps = q.abs().ln() / 2.0;
                w.adjoint(D, eps);
                w.scale((-eps).exp());
                ClassParams::a(x / q.abs().sqrt()).with_c(sign_i8(q))
            } else if !z(r) {
                w.adjoint(D, x.ln());
                w.scale(1.0 / x);
                ClassParams::a(1.0).with_c(0)
            } else {
                ClassParams::a(0.0).with_c(0)
            }
        }
        6 => {
            w.rotate_to_x(raw[3], raw[4]);
            let r = raw[3].hypot(raw[4]);
            w.scale(1.0 / r);
            if z(raw[5]) {
                ClassParams::c(0)
            } else {
                // a half turn followed by a sign flip maps vx - vpsi to vx + vpsi
                let q = raw[5] / r;
                if q < 0.0 {
                    w.adjoint(Vr, PI);
                    w.scale(-1.0);
                }
                w.adjoint(D, q.abs().ln());
                ClassParams::c(1)
            }
        }
        _ => {
            w.scale(1.0 / raw[5]);
            ClassParams::none()
        }
    };
    Ok(w.finish(1, class, params))
}
