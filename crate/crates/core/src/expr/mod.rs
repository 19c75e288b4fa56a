//! Minimal computer-algebra core.
//!
//! Expressions are immutable trees kept in a canonical form by their smart
//! constructors: sums of products with exact rational coefficients, products
//! collected by base and sorted by a fixed total order on factors. Every
//! constructor assumes its inputs are already canonical, so rebuilding a tree
//! bottom-up (`simplify`) is a fixed point on canonical trees.

mod calculus;
mod display;
mod eval;
mod parse;

use std::collections::BTreeMap;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use eval::{equal_expr, EqualityMethod, EqualityResult, EvalError, EvalPoint};
pub use parse::{parse, ParseError};

pub type Rational = BigRational;

/// Largest positive integer power of a sum that is expanded eagerly.
const MAX_EXPAND_POWER: i64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Atan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Atan => "arctan",
        }
    }
}

/// Tree node. The variant order is part of the canonical factor order:
/// constants sort first in every product and sum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rational),
    Sym(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Rational),
    Fun(Func, Expr),
    /// Quadrant-aware `arctan(num/den)`.
    Atan2(Expr, Expr),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Expr({self})")
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

fn rint(n: i64) -> Rational {
    Ratio::from_integer(BigInt::from(n))
}

/// Nearest "nice" rational for a double: short continued fractions when they
/// reproduce the value to 1e-15, the exact binary value otherwise.
pub fn rational_from_f64(x: f64) -> Rational {
    assert!(x.is_finite(), "non-finite constant {x}");
    if x == x.trunc() && x.abs() < 1e15 {
        return rint(x as i64);
    }
    if let Some(r) = Ratio::<i64>::approximate_float(x) {
        let back = *r.numer() as f64 / *r.denom() as f64;
        if (back - x).abs() <= 1e-15 * x.abs() {
            return Ratio::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
        }
    }
    BigRational::from_float(x).expect("finite")
}

impl Expr {
    fn wrap(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(r: Rational) -> Expr {
        Expr::wrap(Node::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(rint(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(rat(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    /// Constant from a double, converted to an exact rational.
    pub fn real(x: f64) -> Expr {
        Expr::num(rational_from_f64(x))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::wrap(Node::Sym(name.to_string()))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_num().and_then(|r| r.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_num().is_some_and(|r| r.is_one())
    }

    /// Rebuilds the tree bottom-up through the canonicalizing constructors.
    pub fn simplify(&self) -> Expr {
        self.map_children(&|e| e.simplify())
    }

    /// Applies `f` to every child and rebuilds this node canonically.
    pub(crate) fn map_children(&self, f: &dyn Fn(&Expr) -> Expr) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Add(ts) => Expr::add(ts.iter().map(f).collect()),
            Node::Mul(fs) => Expr::mul(fs.iter().map(f).collect()),
            Node::Pow(b, e) => Expr::pow(&f(b), e.clone()),
            Node::Fun(func, u) => Expr::func(*func, &f(u)),
            Node::Atan2(a, b) => Expr::atan2(&f(a), &f(b)),
        }
    }

    // ----- sums -------------------------------------------------------

    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut map: BTreeMap<Expr, Rational> = BTreeMap::new();
        for t in terms {
            accumulate(&mut map, &mut constant, &t, &Rational::one());
        }
        map.retain(|_, c| !c.is_zero());
        fold_trig(&mut map, &mut constant);

        let mut out = Vec::with_capacity(map.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        for (rest, c) in map {
            out.push(make_term(c, rest));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::wrap(Node::Add(out)),
        }
    }

    // ----- products ---------------------------------------------------

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut coeff = Rational::one();
        let mut bases: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        let mut sums: Vec<Expr> = Vec::new();

        fn collect(
            f: &Expr,
            coeff: &mut Rational,
            bases: &mut BTreeMap<Expr, Rational>,
            exp_args: &mut Vec<Expr>,
        ) {
            match f.node() {
                Node::Num(r) => *coeff *= r,
                Node::Mul(fs) => {
                    for g in fs {
                        collect(g, coeff, bases, exp_args);
                    }
                }
                Node::Pow(b, e) => *bases.entry(b.clone()).or_insert_with(Rational::zero) += e,
                Node::Fun(Func::Exp, u) => exp_args.push(u.clone()),
                Node::Add(_) => *bases.entry(f.clone()).or_insert_with(Rational::zero) += Rational::one(),
                _ => *bases.entry(f.clone()).or_insert_with(Rational::zero) += Rational::one(),
            }
        }

        for f in &factors {
            collect(f, &mut coeff, &mut bases, &mut exp_args);
        }
        if coeff.is_zero() {
            return Expr::zero();
        }

        let mut out: Vec<Expr> = Vec::new();
        let mut refold = false;
        for (b, e) in bases {
            if e.is_zero() {
                continue;
            }
            let p = Expr::pow(&b, e);
            match p.node() {
                Node::Num(r) => coeff *= r,
                Node::Add(_) => sums.push(p.clone()),
                Node::Mul(_) | Node::Fun(Func::Exp, _) => {
                    refold = true;
                    out.push(p.clone());
                }
                _ => out.push(p.clone()),
            }
        }
        if !exp_args.is_empty() {
            let e = Expr::func(Func::Exp, &Expr::add(exp_args));
            match e.node() {
                Node::Num(r) => coeff *= r,
                _ => out.push(e),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if refold {
            out.push(Expr::num(coeff));
            out.extend(sums);
            return Expr::mul(out);
        }

        if !sums.is_empty() {
            let mut head = out;
            head.push(Expr::num(coeff));
            let mut terms = vec![Expr::mul(head)];
            for s in sums {
                let Node::Add(ts) = s.node() else { unreachable!() };
                let mut next = Vec::with_capacity(terms.len() * ts.len());
                for t in &terms {
                    for u in ts {
                        next.push(Expr::mul(vec![t.clone(), u.clone()]));
                    }
                }
                terms = next;
            }
            return Expr::add(terms);
        }

        out.sort();
        if out.is_empty() {
            return Expr::num(coeff);
        }
        if coeff.is_one() && out.len() == 1 {
            return out.pop().unwrap();
        }
        if !coeff.is_one() {
            out.insert(0, Expr::num(coeff));
        }
        Expr::wrap(Node::Mul(out))
    }

    // ----- powers -----------------------------------------------------

    pub fn pow(base: &Expr, e: Rational) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return base.clone();
        }
        match base.node() {
            Node::Num(r) => num_pow(r, &e),
            Node::Pow(b2, e2) if e.is_integer() => Expr::pow(b2, e2 * &e),
            Node::Mul(fs) if e.is_integer() => {
                Expr::mul(fs.iter().map(|f| Expr::pow(f, e.clone())).collect())
            }
            Node::Fun(Func::Exp, u) => Expr::func(Func::Exp, &Expr::mul(vec![Expr::num(e), u.clone()])),
            Node::Add(_)
                if e.is_integer() && e.is_positive() && e.to_integer() <= BigInt::from(MAX_EXPAND_POWER) =>
            {
                let n = e.to_integer().to_usize().unwrap();
                (1..n).fold(base.clone(), |acc, _| distribute(&acc, base))
            }
            _ => Expr::wrap(Node::Pow(base.clone(), e)),
        }
    }

    pub fn powi(&self, n: i64) -> Expr {
        Expr::pow(self, rint(n))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::pow(self, rat(1, 2))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    // ----- functions --------------------------------------------------

    pub fn func(f: Func, u: &Expr) -> Expr {
        match f {
            Func::Sin | Func::Atan => {
                if u.is_zero() {
                    return Expr::zero();
                }
                if let Some(m) = negated_form(u) {
                    return -Expr::func(f, &m);
                }
            }
            Func::Cos => {
                if u.is_zero() {
                    return Expr::one();
                }
                if let Some(m) = negated_form(u) {
                    return Expr::func(f, &m);
                }
            }
            Func::Exp => {
                if u.is_zero() {
                    return Expr::one();
                }
                if let Node::Fun(Func::Ln, w) = u.node() {
                    return w.clone();
                }
            }
            Func::Ln => {
                if u.is_one() {
                    return Expr::zero();
                }
                if let Node::Fun(Func::Exp, w) = u.node() {
                    return w.clone();
                }
            }
        }
        Expr::wrap(Node::Fun(f, u.clone()))
    }

    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self)
    }
    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self)
    }
    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self)
    }
    pub fn ln(&self) -> Expr {
        Expr::func(Func::Ln, self)
    }
    pub fn atan(&self) -> Expr {
        Expr::func(Func::Atan, self)
    }

    /// `arctan(num/den)` with the quadrant of `(den, num)`.
    pub fn atan2(num: &Expr, den: &Expr) -> Expr {
        if num.is_zero() && den.as_num().is_some_and(|r| r.is_positive()) {
            return Expr::zero();
        }
        Expr::wrap(Node::Atan2(num.clone(), den.clone()))
    }
}

/// Expanded product of two expressions, at least one of them a sum.
fn distribute(a: &Expr, b: &Expr) -> Expr {
    let terms = |e: &Expr| match e.node() {
        Node::Add(ts) => ts.clone(),
        _ => vec![e.clone()],
    };
    let (ta, tb) = (terms(a), terms(b));
    let mut out = Vec::with_capacity(ta.len() * tb.len());
    for u in &ta {
        for v in &tb {
            out.push(Expr::mul(vec![u.clone(), v.clone()]));
        }
    }
    Expr::add(out)
}

/// `-u` when `u` carries an explicit negative sign, used to normalize odd and
/// even function arguments.
fn negated_form(u: &Expr) -> Option<Expr> {
    match u.node() {
        Node::Num(r) if r.is_negative() => Some(Expr::num(-r)),
        Node::Mul(fs) => match fs[0].node() {
            Node::Num(r) if r.is_negative() => Some(-u.clone()),
            _ => None,
        },
        _ => None,
    }
}

fn num_pow(r: &Rational, e: &Rational) -> Expr {
    if r.is_zero() {
        return if e.is_positive() {
            Expr::zero()
        } else {
            Expr::wrap(Node::Pow(Expr::num(r.clone()), e.clone()))
        };
    }
    if r.is_one() {
        return Expr::one();
    }
    let whole = e.floor();
    let fracpart = e - &whole;
    let n = whole.to_integer();
    let Some(n) = n.to_i32().filter(|n| n.abs() <= 256) else {
        return Expr::wrap(Node::Pow(Expr::num(r.clone()), e.clone()));
    };
    let int_part = num_traits::Pow::pow(r, n);
    if fracpart.is_zero() {
        return Expr::num(int_part);
    }
    if r.is_negative() {
        return Expr::wrap(Node::Pow(Expr::num(r.clone()), e.clone()));
    }
    // exact root when numerator and denominator are perfect powers
    let q = fracpart.denom().to_u32();
    if let Some(q) = q {
        let rn = r.numer().nth_root(q);
        let rd = r.denom().nth_root(q);
        if num_traits::Pow::pow(&rn, q) == *r.numer() && num_traits::Pow::pow(&rd, q) == *r.denom() {
            let root = Ratio::new(rn, rd);
            let p = fracpart.numer().to_i32().unwrap();
            return Expr::num(int_part * num_traits::Pow::pow(&root, p));
        }
    }
    let radical = Expr::wrap(Node::Pow(Expr::num(r.clone()), fracpart));
    if int_part.is_one() {
        radical
    } else {
        Expr::wrap(Node::Mul(vec![Expr::num(int_part), radical]))
    }
}

/// Splits a term into its rational coefficient and the remaining product.
pub(crate) fn split_coeff(t: &Expr) -> (Rational, Expr) {
    if let Node::Mul(fs) = t.node() {
        if let Node::Num(c) = fs[0].node() {
            let rest = if fs.len() == 2 {
                fs[1].clone()
            } else {
                Expr::wrap(Node::Mul(fs[1..].to_vec()))
            };
            return (c.clone(), rest);
        }
    }
    (Rational::one(), t.clone())
}

fn make_term(c: Rational, rest: Expr) -> Expr {
    if c.is_one() {
        return rest;
    }
    match rest.node() {
        Node::Mul(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::num(c));
            v.extend(fs.iter().cloned());
            Expr::wrap(Node::Mul(v))
        }
        _ => Expr::wrap(Node::Mul(vec![Expr::num(c), rest])),
    }
}

fn accumulate(map: &mut BTreeMap<Expr, Rational>, constant: &mut Rational, t: &Expr, scale: &Rational) {
    match t.node() {
        Node::Num(r) => *constant += r * scale,
        Node::Add(ts) => {
            for u in ts {
                accumulate(map, constant, u, scale);
            }
        }
        _ => {
            let (c, rest) = split_coeff(t);
            *map.entry(rest).or_insert_with(Rational::zero) += c * scale;
        }
    }
}

fn factor_list(e: &Expr) -> Vec<Expr> {
    match e.node() {
        Node::Mul(fs) => fs.clone(),
        _ => vec![e.clone()],
    }
}

fn fun_arg(e: &Expr, f: Func) -> Option<&Expr> {
    match e.node() {
        Node::Fun(g, u) if *g == f => Some(u),
        _ => None,
    }
}

/// Built-in trigonometric identities on a collected sum:
/// `sin²u + cos²u = 1` and the angle-sum/difference formulas.
fn fold_trig(map: &mut BTreeMap<Expr, Rational>, constant: &mut Rational) {
    let two = rint(2);
    loop {
        let mut hit: Option<(Expr, Expr, Rational, Expr)> = None;
        'scan: for (k, c) in map.iter() {
            let fs = factor_list(k);
            for (i, f) in fs.iter().enumerate() {
                if let Node::Pow(b, e) = f.node() {
                    if *e == two {
                        if let Some(u) = fun_arg(b, Func::Sin) {
                            let mut other = fs.clone();
                            other[i] = u.cos().powi(2);
                            let key = Expr::mul(other);
                            if map.get(&key) == Some(c) {
                                let mut rest = fs.clone();
                                rest.remove(i);
                                hit = Some((k.clone(), key, c.clone(), Expr::mul(rest)));
                                break 'scan;
                            }
                        }
                    }
                }
            }
            for i in 0..fs.len() {
                for j in 0..fs.len() {
                    if i == j {
                        continue;
                    }
                    let replaced = |a: Expr, b: Expr| {
                        let mut v = fs.clone();
                        v[i] = a;
                        v[j] = b;
                        Expr::mul(v)
                    };
                    let without = || {
                        let v: Vec<Expr> =
                            fs.iter().enumerate().filter(|(n, _)| *n != i && *n != j).map(|(_, f)| f.clone()).collect();
                        Expr::mul(v)
                    };
                    if let (Some(a), Some(b)) = (fun_arg(&fs[i], Func::Cos), fun_arg(&fs[j], Func::Cos)) {
                        if i > j {
                            continue;
                        }
                        let key = replaced(a.sin(), b.sin());
                        if key == *k {
                            continue;
                        }
                        if let Some(c2) = map.get(&key) {
                            let folded = if *c2 == -c.clone() {
                                Some((a.clone() + b.clone()).cos())
                            } else if c2 == c {
                                Some((a.clone() - b.clone()).cos())
                            } else {
                                None
                            };
                            if let Some(fl) = folded {
                                hit = Some((k.clone(), key, c.clone(), Expr::mul(vec![without(), fl])));
                                break 'scan;
                            }
                        }
                    }
                    if let (Some(a), Some(b)) = (fun_arg(&fs[i], Func::Sin), fun_arg(&fs[j], Func::Cos)) {
                        let key = replaced(a.cos(), b.sin());
                        if key == *k {
                            continue;
                        }
                        if let Some(c2) = map.get(&key) {
                            let folded = if c2 == c {
                                Some((a.clone() + b.clone()).sin())
                            } else if *c2 == -c.clone() {
                                Some((a.clone() - b.clone()).sin())
                            } else {
                                None
                            };
                            if let Some(fl) = folded {
                                hit = Some((k.clone(), key, c.clone(), Expr::mul(vec![without(), fl])));
                                break 'scan;
                            }
                        }
                    }
                }
            }
        }
        let Some((k1, k2, c, replacement)) = hit else { break };
        map.remove(&k1);
        map.remove(&k2);
        accumulate(map, constant, &replacement, &c);
        map.retain(|_, c| !c.is_zero());
    }
}

// ----- operator sugar -------------------------------------------------

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, rhs])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::add(vec![self, -rhs])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs])
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::mul(vec![self, rhs.recip()])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self])
    }
}

macro_rules! ref_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                ops::$tr::$m(self.clone(), rhs.clone())
            }
        }
    )*};
}
ref_ops!(Add add, Sub sub, Mul mul, Div div);

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

#[cfg(test)]
mod tests;
