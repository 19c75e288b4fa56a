use std::collections::{BTreeSet, HashMap};

use num_traits::One;

use super::{Expr, Func, Node};

impl Expr {
    /// Partial derivative with respect to the symbol `s`; every other symbol
    /// is held constant.
    pub fn diff(&self, s: &str) -> Expr {
        if !self.depends_on(s) {
            return Expr::zero();
        }
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Sym(name) => {
                if name == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(ts) => Expr::add(ts.iter().map(|t| t.diff(s)).collect()),
            Node::Mul(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for (i, f) in fs.iter().enumerate() {
                    let d = f.diff(s);
                    if d.is_zero() {
                        continue;
                    }
                    let mut prod: Vec<Expr> = fs.clone();
                    prod[i] = d;
                    terms.push(Expr::mul(prod));
                }
                Expr::add(terms)
            }
            Node::Pow(b, e) => {
                let db = b.diff(s);
                Expr::mul(vec![Expr::num(e.clone()), Expr::pow(b, e - num_rational::BigRational::one()), db])
            }
            Node::Fun(f, u) => {
                let du = u.diff(s);
                let outer = match f {
                    Func::Sin => u.cos(),
                    Func::Cos => -u.sin(),
                    Func::Exp => self.clone(),
                    Func::Ln => u.recip(),
                    Func::Atan => (Expr::one() + u.powi(2)).recip(),
                };
                outer * du
            }
            Node::Atan2(n, d) => {
                let dn = n.diff(s);
                let dd = d.diff(s);
                (d * &dn - n * &dd) / (n.powi(2) + d.powi(2))
            }
        }
    }

    /// Repeated partial derivative, e.g. `diff_n("x", 2)`.
    pub fn diff_n(&self, s: &str, n: usize) -> Expr {
        (0..n).fold(self.clone(), |e, _| e.diff(s))
    }

    pub fn depends_on(&self, s: &str) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(name) => name == s,
            Node::Add(v) | Node::Mul(v) => v.iter().any(|e| e.depends_on(s)),
            Node::Pow(b, _) => b.depends_on(s),
            Node::Fun(_, u) => u.depends_on(s),
            Node::Atan2(a, b) => a.depends_on(s) || b.depends_on(s),
        }
    }

    /// Free symbols (variables and parameters alike).
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Sym(name) => {
                out.insert(name.clone());
            }
            Node::Add(v) | Node::Mul(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Node::Pow(b, _) => b.collect_symbols(out),
            Node::Fun(_, u) => u.collect_symbols(out),
            Node::Atan2(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    /// Simultaneous substitution of symbols by expressions.
    pub fn subs(&self, map: &HashMap<String, Expr>) -> Expr {
        match self.node() {
            Node::Sym(name) => map.get(name).cloned().unwrap_or_else(|| self.clone()),
            Node::Num(_) => self.clone(),
            _ => self.map_children(&|e| e.subs(map)),
        }
    }

    /// Substitutes a single symbol.
    pub fn subs1(&self, name: &str, value: &Expr) -> Expr {
        let mut map = HashMap::new();
        map.insert(name.to_string(), value.clone());
        self.subs(&map)
    }
}
