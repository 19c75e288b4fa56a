use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::{Expr, Func, Node};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Binding of symbol names to finite reals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalPoint(BTreeMap<String, f64>);

impl EvalPoint {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder form of [`EvalPoint::set`].
    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    /// Binds `name`. Panics on a non-finite value.
    pub fn set(&mut self, name: &str, value: f64) {
        assert!(value.is_finite(), "non-finite binding {name}={value}");
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn extend(&mut self, other: &EvalPoint) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), *v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl Expr {
    /// IEEE double evaluation of the tree.
    pub fn eval(&self, pt: &EvalPoint) -> Result<f64, EvalError> {
        let v = match self.node() {
            Node::Num(r) => r.to_f64().unwrap_or(f64::NAN),
            Node::Sym(s) => pt.get(s).ok_or_else(|| EvalError::Unbound(s.clone()))?,
            Node::Add(ts) => {
                let mut acc = 0.0;
                for t in ts {
                    acc += t.eval(pt)?;
                }
                acc
            }
            Node::Mul(fs) => {
                let mut acc = 1.0;
                for f in fs {
                    acc *= f.eval(pt)?;
                }
                acc
            }
            Node::Pow(b, e) => {
                let x = b.eval(pt)?;
                let ef = e.to_f64().unwrap_or(f64::NAN);
                if x == 0.0 && ef < 0.0 {
                    return Err(EvalError::Domain(format!("division by zero in ({b})^{e}")));
                }
                if e.is_integer() {
                    match e.to_integer().to_i32() {
                        Some(n) => x.powi(n),
                        None => x.powf(ef),
                    }
                } else {
                    if x < 0.0 {
                        return Err(EvalError::Domain(format!("fractional power of negative value {x}")));
                    }
                    if *e == super::rat(1, 2) {
                        x.sqrt()
                    } else {
                        x.powf(ef)
                    }
                }
            }
            Node::Fun(f, u) => {
                let x = u.eval(pt)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Atan => x.atan(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(EvalError::Domain(format!("ln of non-positive value {x}")));
                        }
                        x.ln()
                    }
                }
            }
            Node::Atan2(n, d) => {
                let (a, b) = (n.eval(pt)?, d.eval(pt)?);
                if a == 0.0 && b == 0.0 {
                    return Err(EvalError::Domain("arctan2 at the origin".into()));
                }
                a.atan2(b)
            }
        };
        if !v.is_finite() {
            return Err(EvalError::Domain(format!("non-finite value while evaluating {self}")));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityMethod {
    /// Canonical forms of the difference reduce to zero.
    Canonical,
    /// Decided by numeric probing at random points.
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EqualityResult {
    pub equal: bool,
    pub method: EqualityMethod,
}

const PROBE_POINTS: usize = 50;
const PROBE_ATTEMPTS: usize = 2000;
const PROBE_RTOL: f64 = 1e-10;

/// Structural equality of canonical forms, with a numeric-probing fallback
/// at 50 random points.
pub fn equal_expr(a: &Expr, b: &Expr) -> EqualityResult {
    let diff = (a - b).simplify();
    if diff.is_zero() {
        return EqualityResult { equal: true, method: EqualityMethod::Canonical };
    }
    if diff.as_num().is_some() {
        return EqualityResult { equal: false, method: EqualityMethod::Canonical };
    }
    let mut syms = a.symbols();
    syms.extend(b.symbols());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_e0a1);
    for (lo, hi) in [(-2.0, 2.0), (0.1, 2.0)] {
        let mut good = 0;
        let mut attempts = 0;
        let mut agree = true;
        while good < PROBE_POINTS && attempts < PROBE_ATTEMPTS {
            attempts += 1;
            let mut pt = EvalPoint::new();
            for s in &syms {
                pt.set(s, rng.random_range(lo..hi));
            }
            let (Ok(va), Ok(vb)) = (a.eval(&pt), b.eval(&pt)) else { continue };
            good += 1;
            if (va - vb).abs() > PROBE_RTOL * va.abs().max(vb.abs()).max(1.0) {
                agree = false;
                break;
            }
        }
        if !agree {
            return EqualityResult { equal: false, method: EqualityMethod::Probabilistic };
        }
        if good >= PROBE_POINTS {
            return EqualityResult { equal: true, method: EqualityMethod::Probabilistic };
        }
    }
    EqualityResult { equal: false, method: EqualityMethod::Probabilistic }
}
