//! Vector fields on (t, x, y, ψ)-space and the six-dimensional symmetry
//! algebra of the potential vorticity equation.
//!
//! Basis order is fixed everywhere as `(D, v_r, v_t, v_x, v_y, v_ψ)`.

mod adjoint;
mod flow;
mod ode;

use std::fmt;
use std::sync::OnceLock;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{equal_expr, Expr, Rational};

pub use adjoint::{adjoint_matrix, adjoint_ode, adjoint_series, adjoint_series_default, DEFAULT_SERIES_ORDER};
pub use flow::{equivalence_transformation, flow, flow_expr, pushforward, PointTransformation};

/// Coordinates of the underlying space, in order.
pub const VARS: [&str; 4] = ["t", "x", "y", "psi"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("bracket [{0}, {1}] leaves the span of the basis (not closed)")]
    NotClosed(String, String),
    #[error("basis field `{0}` is not affine in (t, x, y, psi) with constant coefficients")]
    NonAffine(String),
    #[error("basis elements are linearly dependent")]
    DependentBasis,
    #[error("adjoint series not converged at order {order} (tail {tail:e})")]
    NotConverged { order: usize, tail: f64 },
    #[error("cannot parse algebra element `{0}`")]
    BadSpec(String),
}

/// Named basis generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    D,
    Vr,
    Vt,
    Vx,
    Vy,
    Vpsi,
}

impl Generator {
    pub const ALL: [Generator; 6] =
        [Generator::D, Generator::Vr, Generator::Vt, Generator::Vx, Generator::Vy, Generator::Vpsi];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["D", "vr", "vt", "vx", "vy", "vpsi"][self.index()]
    }

    pub fn from_name(s: &str) -> Option<Generator> {
        Generator::ALL.into_iter().find(|g| g.name().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// First-order differential operator `ξ_t ∂t + ξ_x ∂x + ξ_y ∂y + ξ_ψ ∂ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub name: String,
    pub coeffs: [Expr; 4],
}

impl VectorField {
    pub fn new(name: &str, coeffs: [Expr; 4]) -> Self {
        Self { name: name.to_string(), coeffs }
    }

    pub fn zero() -> Self {
        Self::new("0", std::array::from_fn(|_| Expr::zero()))
    }

    /// The field acting on a function of (t, x, y, ψ).
    pub fn apply(&self, f: &Expr) -> Expr {
        Expr::add(VARS.iter().zip(&self.coeffs).map(|(v, c)| c * &f.diff(v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero)
    }

    pub fn scale(&self, k: &Expr) -> Self {
        Self::new(&self.name, std::array::from_fn(|i| k * &self.coeffs[i]))
    }

    pub fn plus(&self, other: &VectorField) -> Self {
        Self::new(&self.name, std::array::from_fn(|i| &self.coeffs[i] + &other.coeffs[i]))
    }

    /// Componentwise `equal_expr`.
    pub fn equivalent(&self, other: &VectorField) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| equal_expr(a, b).equal)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in VARS.iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*d_{v}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `[v, w]^k = v(w^k) − w(v^k)`.
pub fn lie_bracket(v: &VectorField, w: &VectorField) -> VectorField {
    let coeffs = std::array::from_fn(|k| v.apply(&w.coeffs[k]) - w.apply(&v.coeffs[k]));
    VectorField::new(&format!("[{}, {}]", v.name, w.name), coeffs)
}

/// Generators of the algebra admitted for arbitrary β and F ≠ 0. Both
/// parameters may be symbolic or numeric.
pub fn basis_a_beta(f: &Expr, beta: &Expr) -> [VectorField; 6] {
    let [t, x, y, psi] = VARS.map(Expr::sym);
    let r = beta / f;
    let (z, one) = (Expr::zero(), Expr::one());
    let shifted_x = &x + &(&r * &t);
    [
        VectorField::new("D", [t.clone(), -(&r * &t), z.clone(), -(&psi - &(&r * &y))]),
        VectorField::new("vr", [z.clone(), -y.clone(), shifted_x.clone(), &r * &shifted_x]),
        VectorField::new("vt", [one.clone(), z.clone(), z.clone(), z.clone()]),
        VectorField::new("vx", [z.clone(), one.clone(), z.clone(), z.clone()]),
        VectorField::new("vy", [z.clone(), z.clone(), one.clone(), z.clone()]),
        VectorField::new("vpsi", [z.clone(), z.clone(), z, one]),
    ]
}

/// Generators of the algebra at β = 0.
pub fn basis_a0() -> [VectorField; 6] {
    basis_a_beta(&Expr::one(), &Expr::zero())
}

/// Exact constant part and first-order coefficients of an affine expression.
fn affine_coeffs(e: &Expr) -> Option<[Rational; 5]> {
    let origin: std::collections::HashMap<String, Expr> = VARS.iter().map(|v| (v.to_string(), Expr::zero())).collect();
    let c0 = e.subs(&origin).as_num()?.clone();
    let mut out: [Rational; 5] = std::array::from_fn(|_| Rational::zero());
    out[0] = c0.clone();
    let mut rebuilt = vec![Expr::num(c0)];
    for (i, v) in VARS.iter().enumerate() {
        let d = e.diff(v);
        let r = d.as_num()?.clone();
        rebuilt.push(Expr::num(r.clone()) * Expr::sym(v));
        out[i + 1] = r;
    }
    (Expr::add(rebuilt) - e.clone()).is_zero().then_some(out)
}

fn field_vector(v: &VectorField) -> Result<Vec<Rational>, LieError> {
    let mut out = Vec::with_capacity(20);
    for c in &v.coeffs {
        out.extend(affine_coeffs(c).ok_or_else(|| LieError::NonAffine(v.name.clone()))?);
    }
    Ok(out)
}

/// Exact least-squares-free solve of `A c = b` over the rationals, `A` given
/// by columns. `None` when inconsistent.
fn solve_exact(cols: &[Vec<Rational>], b: &[Rational]) -> Result<Option<Vec<Rational>>, LieError> {
    let n = cols.len();
    let m = b.len();
    let mut a: Vec<Vec<Rational>> = (0..m).map(|r| {
        let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
        row.push(b[r].clone());
        row
    }).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
            return Err(LieError::DependentBasis);
        };
        a.swap(row, p);
        let pv = a[row][col].clone();
        for k in col..=n {
            a[row][k] = &a[row][k] / &pv;
        }
        for r in 0..m {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..=n {
                    let delta = &f * &a[row][k];
                    a[r][k] -= delta;
                }
            }
        }
        pivots.push(row);
        row += 1;
    }
    if (row..m).any(|r| !a[r][n].is_zero()) {
        return Ok(None);
    }
    Ok(Some(pivots.iter().map(|&r| a[r][n].clone()).collect()))
}

/// Exact coordinates of `v` in `basis`, if it lies in the span.
pub fn decompose(v: &VectorField, basis: &[VectorField]) -> Result<Option<Vec<Rational>>, LieError> {
    let cols = basis.iter().map(field_vector).collect::<Result<Vec<_>, _>>()?;
    solve_exact(&cols, &field_vector(v)?)
}

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`, stored exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub c: Vec<Vec<Vec<Rational>>>,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    pub fn to_f64(&self) -> Vec<Vec<Vec<f64>>> {
        self.c
            .iter()
            .map(|m| m.iter().map(|v| v.iter().map(|r| r.to_f64().unwrap()).collect()).collect())
            .collect()
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.c[i][j][k] == -self.c[j][i][k].clone())))
    }

    /// Largest violation of the Jacobi identity, exactly zero for a Lie algebra.
    pub fn jacobi_defect(&self) -> Rational {
        let n = self.dim();
        let mut worst = Rational::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut s = Rational::zero();
                        for l in 0..n {
                            s += &self.c[j][k][l] * &self.c[i][l][m];
                            s += &self.c[k][i][l] * &self.c[j][l][m];
                            s += &self.c[i][j][l] * &self.c[k][l][m];
                        }
                        if num_traits::Signed::abs(&s) > worst {
                            worst = num_traits::Signed::abs(&s);
                        }
                    }
                }
            }
        }
        worst
    }

    /// Constants in the basis `f_i = Σ_a p[a][i] e_a`.
    pub fn change_basis(&self, p: &[Vec<Rational>]) -> Result<StructureConstants, LieError> {
        let n = self.dim();
        let cols: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|a| p[a][i].clone()).collect()).collect();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let img = self.bracket_exact(&cols[i], &cols[j]);
                let coords = solve_exact(&cols, &img)?.ok_or(LieError::DependentBasis)?;
                c[i][j] = coords;
            }
        }
        Ok(StructureConstants { c })
    }

    /// Bracket of exact coordinate vectors.
    pub fn bracket_exact(&self, u: &[Rational], w: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if w[j].is_zero() {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.c[i][j][k];
                    if !c.is_zero() {
                        *o += &u[i] * &w[j] * c;
                    }
                }
            }
        }
        out
    }

    /// True when `span(a)` and `span(b)` are subalgebras that commute.
    pub fn is_direct_sum(&self, a: &[usize], b: &[usize]) -> bool {
        let closed = |s: &[usize]| {
            s.iter().all(|&i| s.iter().all(|&j| (0..self.dim()).all(|k| s.contains(&k) || self.c[i][j][k].is_zero())))
        };
        let commute = a.iter().all(|&i| b.iter().all(|&j| self.c[i][j].iter().all(Zero::is_zero)));
        closed(a) && closed(b) && commute
    }
}

impl Serialize for StructureConstants {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_f64().serialize(s)
    }
}

/// Structure constants of the span of `basis`; fails if a bracket leaves it.
pub fn structure_constants(basis: &[VectorField]) -> Result<StructureConstants, LieError> {
    let n = basis.len();
    let cols = basis.iter().map(field_vector).collect::<Result<Vec<_>, _>>()?;
    let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let br = lie_bracket(&basis[i], &basis[j]);
            let coords = solve_exact(&cols, &field_vector(&br)?)?
                .ok_or_else(|| LieError::NotClosed(basis[i].name.clone(), basis[j].name.clone()))?;
            for k in 0..n {
                c[j][i][k] = -coords[k].clone();
                c[i][j][k] = coords[k].clone();
            }
        }
    }
    Ok(StructureConstants { c })
}

/// Structure constants of the β = 0 algebra, computed once.
pub fn a0_structure() -> &'static StructureConstants {
    static SC: OnceLock<StructureConstants> = OnceLock::new();
    SC.get_or_init(|| structure_constants(&basis_a0()).expect("builtin basis is closed"))
}

fn a0_table() -> &'static [[[f64; 6]; 6]; 6] {
    static T: OnceLock<[[[f64; 6]; 6]; 6]> = OnceLock::new();
    T.get_or_init(|| {
        let c = a0_structure().to_f64();
        std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| c[i][j][k])))
    })
}

/// Coordinates `(a1..a6)` in the basis `(D, v_r, v_t, v_x, v_y, v_ψ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlgebraElement(pub [f64; 6]);

impl AlgebraElement {
    pub fn new(a: [f64; 6]) -> Self {
        Self(a)
    }

    pub fn zero() -> Self {
        Self([0.0; 6])
    }

    pub fn basis(g: Generator) -> Self {
        let mut a = [0.0; 6];
        a[g.index()] = 1.0;
        Self(a)
    }

    pub fn coord(&self, g: Generator) -> f64 {
        self.0[g.index()]
    }

    pub fn plus(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }

    pub fn minus(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.map(|a| a * k))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    /// Bracket in the β = 0 algebra.
    pub fn bracket(&self, w: &Self) -> Self {
        let c = a0_table();
        let mut out = [0.0; 6];
        for i in 0..6 {
            if self.0[i] == 0.0 {
                continue;
            }
            for j in 0..6 {
                if w.0[j] == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += self.0[i] * w.0[j] * c[i][j][k];
                }
            }
        }
        Self(out)
    }

    /// The element as a vector field built on `basis`.
    pub fn to_field(&self, basis: &[VectorField; 6]) -> VectorField {
        let mut acc = VectorField::zero();
        for (a, b) in self.0.iter().zip(basis) {
            if *a != 0.0 {
                acc = acc.plus(&b.scale(&Expr::real(*a)));
            }
        }
        acc.name = self.to_string();
        acc
    }

    /// A named generator (`D`, `vr`, `vt`, `vx`, `vy`, `vpsi`) or six
    /// comma-separated coordinates.
    pub fn from_spec(spec: &str) -> Result<Self, LieError> {
        if let Some(g) = Generator::from_name(spec) {
            return Ok(Self::basis(g));
        }
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(LieError::BadSpec(spec.to_string()));
        }
        let mut a = [0.0; 6];
        for (slot, p) in a.iter_mut().zip(parts) {
            *slot = p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| LieError::BadSpec(spec.to_string()))?;
        }
        Ok(Self(a))
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, g) in self.0.iter().zip(Generator::ALL) {
            if *a == 0.0 {
                continue;
            }
            let sign = if *a < 0.0 { "-" } else { "+" };
            match (first, a.abs() == 1.0) {
                (true, true) => write!(f, "{}{g}", if *a < 0.0 { "-" } else { "" })?,
                (true, false) => write!(f, "{a}*{g}")?,
                (false, true) => write!(f, " {sign} {g}")?,
                (false, false) => write!(f, " {sign} {}*{g}", a.abs())?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
