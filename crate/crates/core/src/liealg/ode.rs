//! Adaptive Dormand–Prince 5(4) for small autonomous systems.

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(y)` from 0 to `s_end` (either sign) with mixed
/// absolute/relative tolerance `tol`.
pub(crate) fn dopri<const N: usize>(f: impl Fn(&[f64; N]) -> [f64; N], y0: [f64; N], s_end: f64, tol: f64) -> [f64; N] {
    if s_end == 0.0 {
        return y0;
    }
    let dir = s_end.signum();
    let total = s_end.abs();
    let mut s = 0.0;
    let mut y = y0;
    let mut h = (total / 16.0).min(0.1);
    while s < total {
        h = h.min(total - s);
        let mut k = [[0.0; N]; 7];
        for st in 0..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(st) {
                for n in 0..N {
                    yi[n] += dir * h * A[st][j] * kj[n];
                }
            }
            k[st] = f(&yi);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for n in 0..N {
            let (mut d5, mut d4) = (0.0, 0.0);
            for st in 0..7 {
                d5 += B5[st] * k[st][n];
                d4 += B4[st] * k[st][n];
            }
            y5[n] += dir * h * d5;
            let sc = tol * (1.0 + y[n].abs().max(y5[n].abs()));
            err = err.max((h * (d5 - d4)).abs() / sc);
        }
        if err <= 1.0 {
            s += h;
            y = y5;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h < 1e-14 * total {
            h = 1e-14 * total;
        }
    }
    y
}
