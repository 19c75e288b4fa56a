//! Optimal systems of one- and two-dimensional subalgebras of the β = 0
//! algebra: every subalgebra is mapped to a unique representative by adjoint
//! actions, scalings and basis recombinations, and the map is recorded as a
//! replayable witness.

mod one;
mod two;
mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liealg::{adjoint_matrix, AlgebraElement, Generator};

pub use one::{branch_conditions_1d, canonicalize_1d};
pub use two::canonicalize_2d;
pub use verify::{random_adjoint, random_conjugate, sample_params, verify_optimal_system, ClassReport, OptimalSystemReport};

/// Zero threshold for raw input coordinates, relative to the largest one.
pub const RAW_ZERO: f64 = 1e-12;
/// Zero threshold for quantities derived after recombination or adjoint steps.
pub const DERIVED_ZERO: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("zero element")]
    Zero,
    #[error("generators are linearly dependent")]
    Dependent,
    #[error("span is not closed under the bracket (residual {0:e})")]
    NotClosed(f64),
    #[error("non-finite coordinates")]
    NonFinite,
    #[error("unknown class {0}")]
    UnknownClass(u8),
}

/// A subalgebra given by one or two generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subalgebra {
    pub generators: Vec<AlgebraElement>,
}

impl Subalgebra {
    pub fn one(v: AlgebraElement) -> Self {
        Self { generators: vec![v] }
    }

    pub fn two(v: AlgebraElement, w: AlgebraElement) -> Self {
        Self { generators: vec![v, w] }
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }
}

/// Residual norm of `w` after orthogonal projection on `span(v1, v2)`.
pub(crate) fn projection_residual(v1: &AlgebraElement, v2: &AlgebraElement, w: &AlgebraElement) -> f64 {
    let dot = |a: &AlgebraElement, b: &AlgebraElement| a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum::<f64>();
    let e1 = v1.scale(1.0 / v1.norm());
    let u2 = v2.minus(&e1.scale(dot(&e1, v2)));
    let e2 = u2.scale(1.0 / u2.norm());
    let mut r = w.minus(&e1.scale(dot(&e1, w)));
    r = r.minus(&e2.scale(dot(&e2, &r)));
    r.norm()
}

pub(crate) fn independent(v1: &AlgebraElement, v2: &AlgebraElement) -> bool {
    let (n1, n2) = (v1.norm(), v2.norm());
    if n1 == 0.0 || n2 == 0.0 {
        return false;
    }
    // distance of v2 from the line through v1
    let dot: f64 = v1.0.iter().zip(&v2.0).map(|(a, b)| a * b).sum();
    let perp = v2.minus(&v1.scale(dot / (n1 * n1))).norm();
    perp > DERIVED_ZERO * n2
}

/// `[v1, v2] ∈ span(v1, v2)`, decided with a relative residual of 1e-10.
pub fn is_subalgebra(s: &Subalgebra) -> Result<bool, ClassifyError> {
    match s.generators.as_slice() {
        [v] => Ok(v.max_abs() > 0.0),
        [v1, v2] => Ok(closure_residual(v1, v2)? <= 1e-10),
        _ => Err(ClassifyError::Dependent),
    }
}

/// Relative residual of `[v1, v2]` after projection on the span.
pub(crate) fn closure_residual(v1: &AlgebraElement, v2: &AlgebraElement) -> Result<f64, ClassifyError> {
    if !v1.is_finite() || !v2.is_finite() {
        return Err(ClassifyError::NonFinite);
    }
    if !independent(v1, v2) {
        return Err(ClassifyError::Dependent);
    }
    Ok(projection_residual(v1, v2, &v1.bracket(v2)) / (v1.norm() * v2.norm()))
}

/// One step of a canonicalization witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum WitnessStep {
    /// `Ad(exp(eps g))` applied to every generator.
    Adjoint { generator: Generator, eps: f64 },
    /// Overall rescaling of a one-dimensional generator.
    Scale { factor: f64 },
    /// New generators `w_i = Σ_j m[i][j] v_j`.
    Recombine { matrix: [[f64; 2]; 2] },
}

/// Replays a witness on the input generators.
pub fn replay(witness: &[WitnessStep], input: &[AlgebraElement]) -> Vec<AlgebraElement> {
    let mut rows = input.to_vec();
    for step in witness {
        match *step {
            WitnessStep::Adjoint { generator, eps } => {
                let m = adjoint_matrix(&AlgebraElement::basis(generator), eps);
                rows = rows.iter().map(|r| r.transformed(&m)).collect();
            }
            WitnessStep::Scale { factor } => rows = rows.iter().map(|r| r.scale(factor)).collect(),
            WitnessStep::Recombine { matrix } => {
                rows = (0..2).map(|i| rows[0].scale(matrix[i][0]).plus(&rows[1].scale(matrix[i][1]))).collect();
            }
        }
    }
    rows
}

/// Normalized class parameters; absent fields do not occur in the class.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<i8>,
    /// The ± of one-dimensional class 3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

impl ClassParams {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn a(a: f64) -> Self {
        Self { a: Some(a), ..Self::default() }
    }

    pub fn c(c: i8) -> Self {
        Self { c: Some(c), ..Self::default() }
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = Some(a);
        self
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = Some(b);
        self
    }

    pub fn with_c(mut self, c: i8) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_sign(mut self, s: i8) -> Self {
        self.sign = Some(s);
        self
    }

    /// Same discrete parameters and continuous ones within `tol`.
    pub fn approx_eq(&self, o: &ClassParams, tol: f64) -> bool {
        let close = |x: Option<f64>, y: Option<f64>| match (x, y) {
            (Some(x), Some(y)) => (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0),
            (None, None) => true,
            _ => false,
        };
        self.c == o.c && self.sign == o.sign && close(self.a, o.a) && close(self.b, o.b)
    }
}

/// Representative of a class together with the witness that reaches it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub dim: usize,
    pub class_id: u8,
    pub params: ClassParams,
    pub representative: Vec<AlgebraElement>,
    pub witness: Vec<WitnessStep>,
}

impl CanonicalForm {
    /// Largest coordinate mismatch between the replayed witness and the
    /// representative, relative to the largest coordinate of either side
    /// (and at least 1).
    pub fn witness_error(&self, input: &[AlgebraElement]) -> f64 {
        let out = replay(&self.witness, input);
        let scale = input.iter().chain(&self.representative).map(|g| g.max_abs()).fold(1.0, f64::max);
        out.iter().zip(&self.representative).map(|(o, r)| o.minus(r).max_abs()).fold(0.0, f64::max) / scale
    }

    pub fn same_class(&self, o: &CanonicalForm, tol: f64) -> bool {
        self.dim == o.dim && self.class_id == o.class_id && self.params.approx_eq(&o.params, tol)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.representative.iter().map(|g| g.to_string()).collect();
        write!(f, "class {} (dim {}): <{}>", self.class_id, self.dim, gens.join(", "))
    }
}

fn el(pairs: &[(Generator, f64)]) -> AlgebraElement {
    let mut a = [0.0; 6];
    for (g, x) in pairs {
        a[g.index()] += x;
    }
    AlgebraElement(a)
}

fn pa(p: &ClassParams) -> f64 {
    p.a.unwrap_or(0.0)
}
fn pb(p: &ClassParams) -> f64 {
    p.b.unwrap_or(0.0)
}
fn pc(p: &ClassParams) -> f64 {
    p.c.unwrap_or(0) as f64
}

/// The listed one-dimensional representative.
pub fn representative_1d(class_id: u8, p: &ClassParams) -> Result<AlgebraElement, ClassifyError> {
    use Generator::*;
    Ok(match class_id {
        1 => el(&[(D, 1.0), (Vr, pa(p))]),
        2 => el(&[(D, 1.0), (Vx, pa(p))]),
        3 => el(&[(Vr, 1.0), (Vt, p.sign.unwrap_or(1) as f64), (Vpsi, pa(p))]),
        4 => el(&[(Vr, 1.0), (Vpsi, pc(p))]),
        5 => el(&[(Vt, 1.0), (Vx, pa(p)), (Vpsi, pc(p))]),
        6 => el(&[(Vx, 1.0), (Vpsi, pc(p))]),
        7 => el(&[(Vpsi, 1.0)]),
        _ => return Err(ClassifyError::UnknownClass(class_id)),
    })
}

/// The listed two-dimensional representative.
pub fn representative_2d(class_id: u8, p: &ClassParams) -> Result<[AlgebraElement; 2], ClassifyError> {
    use Generator::*;
    let (a, b, c) = (pa(p), pb(p), pc(p));
    Ok(match class_id {
        1 => [el(&[(D, 1.0)]), el(&[(Vr, 1.0)])],
        2 => [el(&[(D, 1.0), (Vr, a)]), el(&[(Vt, 1.0)])],
        3 => [el(&[(D, 1.0), (Vx, a)]), el(&[(Vt, 1.0)])],
        4 => [el(&[(D, 1.0), (Vx, a)]), el(&[(Vy, 1.0)])],
        5 => [el(&[(D, 1.0), (Vr, a)]), el(&[(Vpsi, 1.0)])],
        6 => [el(&[(D, 1.0), (Vx, a)]), el(&[(Vpsi, 1.0)])],
        7 => [el(&[(Vr, 1.0), (Vpsi, c)]), el(&[(Vt, 1.0), (Vpsi, b)])],
        8 => [el(&[(Vr, 1.0), (Vt, c)]), el(&[(Vpsi, 1.0)])],
        9 => [el(&[(Vt, 1.0), (Vx, a), (Vpsi, c)]), el(&[(Vy, 1.0), (Vpsi, b)])],
        10 => [el(&[(Vt, 1.0), (Vx, a)]), el(&[(Vpsi, 1.0)])],
        11 => [el(&[(Vx, 1.0), (Vpsi, c)]), el(&[(Vy, 1.0), (Vpsi, b)])],
        12 => [el(&[(Vx, 1.0)]), el(&[(Vpsi, 1.0)])],
        _ => return Err(ClassifyError::UnknownClass(class_id)),
    })
}

/// Printed form of a class, e.g. `<D + a vr>`.
pub fn class_template(dim: usize, class_id: u8) -> Option<&'static str> {
    const ONE: [&str; 7] = [
        "<D + a vr>",
        "<D + a vx>",
        "<vr ± vt + a vpsi>",
        "<vr + c vpsi>",
        "<vt + a vx + c vpsi>",
        "<vx + c vpsi>",
        "<vpsi>",
    ];
    const TWO: [&str; 12] = [
        "<D, vr>",
        "<D + a vr, vt>",
        "<D + a vx, vt>",
        "<D + a vx, vy>",
        "<D + a vr, vpsi>",
        "<D + a vx, vpsi>",
        "<vr + c vpsi, vt + b vpsi>",
        "<vr + c vt, vpsi>",
        "<vt + a vx + c vpsi, vy + b vpsi>",
        "<vt + a vx, vpsi>",
        "<vx + c vpsi, vy + b vpsi>",
        "<vx, vpsi>",
    ];
    let idx = (class_id as usize).checked_sub(1)?;
    match dim {
        1 => ONE.get(idx).copied(),
        2 => TWO.get(idx).copied(),
        _ => None,
    }
}

/// Mutable state of a canonicalization: current generators plus the steps
/// applied so far.
pub(crate) struct Work {
    pub rows: Vec<AlgebraElement>,
    pub steps: Vec<WitnessStep>,
}

impl Work {
    pub fn new(rows: Vec<AlgebraElement>) -> Self {
        Self { rows, steps: Vec::new() }
    }

    fn push(&mut self, step: WitnessStep) {
        self.rows = replay(&[step], &self.rows);
        self.steps.push(step);
    }

    pub fn adjoint(&mut self, g: Generator, eps: f64) {
        if eps != 0.0 {
            self.push(WitnessStep::Adjoint { generator: g, eps });
        }
    }

    pub fn scale(&mut self, factor: f64) {
        if factor != 1.0 {
            self.push(WitnessStep::Scale { factor });
        }
    }

    pub fn recombine(&mut self, matrix: [[f64; 2]; 2]) {
        if matrix != [[1.0, 0.0], [0.0, 1.0]] {
            self.push(WitnessStep::Recombine { matrix });
        }
    }

    /// Rotation taking the (vx, vy) vector `(x, y)` onto the positive vx axis.
    pub fn rotate_to_x(&mut self, x: f64, y: f64) {
        self.adjoint(Generator::Vr, -y.atan2(x));
    }

    pub fn finish(self, dim: usize, class_id: u8, params: ClassParams) -> CanonicalForm {
        let representative = match dim {
            1 => vec![representative_1d(class_id, &params).expect("valid class")],
            _ => representative_2d(class_id, &params).expect("valid class").to_vec(),
        };
        CanonicalForm { dim, class_id, params, representative, witness: self.steps }
    }
}

pub(crate) fn sign_i8(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}
