use std::fmt;

use num_traits::{One, Signed};

use super::{rat, split_coeff, Expr, Node, Rational};

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Atoms print without parentheses in a power base.
fn is_atomic(e: &Expr) -> bool {
    match e.node() {
        Node::Sym(_) | Node::Fun(..) | Node::Atan2(..) => true,
        Node::Num(r) => r.is_integer() && !r.is_negative(),
        Node::Pow(_, ex) => *ex == rat(1, 2),
        _ => false,
    }
}

fn fmt_factor(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Add(_) => write!(f, "({e})"),
        Node::Num(r) if r.is_negative() => write!(f, "({e})"),
        _ => write!(f, "{e}"),
    }
}

/// Prints a product whose coefficient is known to be positive.
fn fmt_product(coeff: &Rational, rest: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if !coeff.is_one() {
        fmt_rational(coeff, f)?;
        write!(f, "*")?;
    }
    match rest.node() {
        Node::Mul(fs) => {
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                fmt_factor(g, f)?;
            }
            Ok(())
        }
        _ => fmt_factor(rest, f),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(r) => fmt_rational(r, f),
            Node::Sym(s) => write!(f, "{s}"),
            Node::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    let (c, rest) = split_coeff(t);
                    match (i, t.node()) {
                        (0, Node::Num(_)) => write!(f, "{t}")?,
                        (_, Node::Num(r)) => {
                            write!(f, "{}", if r.is_negative() { " - " } else { " + " })?;
                            fmt_rational(&r.abs(), f)?;
                        }
                        _ => {
                            if c.is_negative() {
                                write!(f, "{}", if i == 0 { "-" } else { " - " })?;
                            } else if i > 0 {
                                write!(f, " + ")?;
                            }
                            fmt_product(&c.abs(), &rest, f)?;
                        }
                    }
                }
                Ok(())
            }
            Node::Mul(_) => {
                let (c, rest) = split_coeff(self);
                if c.is_negative() {
                    write!(f, "-")?;
                }
                fmt_product(&c.abs(), &rest, f)
            }
            Node::Pow(b, e) => {
                if *e == rat(1, 2) {
                    return write!(f, "sqrt({b})");
                }
                if is_atomic(b) {
                    write!(f, "{b}")?;
                } else {
                    write!(f, "({b})")?;
                }
                if e.is_integer() {
                    write!(f, "^{}", e.numer())
                } else {
                    write!(f, "^({}/{})", e.numer(), e.denom())
                }
            }
            Node::Fun(func, u) => write!(f, "{}({u})", func.name()),
            Node::Atan2(a, b) => write!(f, "arctan2({a}, {b})"),
        }
    }
}
