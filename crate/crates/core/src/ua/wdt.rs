use std::fmt;

use serde::Serialize;

use super::{commutator, con_lattice, FiniteAlgebra, UaError};
use crate::partition::Partition;

/// A term over an algebra's operation symbols, written `f(t1, .., tk)`.
/// Nullary symbols are written `e()`; bare identifiers are variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermExpr {
    Var(String),
    App(String, Vec<TermExpr>),
}

impl fmt::Display for TermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermExpr::Var(v) => f.write_str(v),
            TermExpr::App(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn err(&self, message: &str) -> UaError {
        UaError::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn ident(&mut self) -> Result<String, UaError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|&c| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an identifier"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<TermExpr, UaError> {
        let name = self.ident()?;
        if !self.eat(b'(') {
            return Ok(TermExpr::Var(name));
        }
        let mut args = Vec::new();
        if !self.eat(b')') {
            loop {
                args.push(self.term()?);
                if self.eat(b')') {
                    break;
                }
                if !self.eat(b',') {
                    return Err(self.err("expected `,` or `)`"));
                }
            }
        }
        Ok(TermExpr::App(name, args))
    }
}

impl TermExpr {
    pub fn parse(text: &str) -> Result<Self, UaError> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }

    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            TermExpr::Var(v) => out.push(v),
            TermExpr::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Checks every symbol against the signature of `a`.
    pub fn check_signature(&self, a: &FiniteAlgebra) -> Result<(), UaError> {
        match self {
            TermExpr::Var(_) => Ok(()),
            TermExpr::App(name, args) => {
                let op = a
                    .op(name)
                    .ok_or_else(|| UaError::UnknownOperation(name.clone()))?;
                if op.arity != args.len() {
                    return Err(UaError::Arity(format!(
                        "`{name}` takes {} arguments, got {}",
                        op.arity,
                        args.len()
                    )));
                }
                args.iter().try_for_each(|t| t.check_signature(a))
            }
        }
    }

    /// Evaluates under `env`, looked up by variable name. The signature must
    /// already have been checked.
    pub fn eval(&self, a: &FiniteAlgebra, env: &dyn Fn(&str) -> usize) -> usize {
        match self {
            TermExpr::Var(v) => env(v),
            TermExpr::App(name, args) => {
                let vals: Vec<usize> = args.iter().map(|t| t.eval(a, env)).collect();
                a.op(name)
                    .expect("signature checked")
                    .apply(a.size(), &vals)
            }
        }
    }
}

/// The pair `(a, b)` and congruence `theta` where one of the two
/// weak-difference conditions breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WdtViolation {
    pub a: usize,
    pub b: usize,
    pub theta: Partition,
    pub theta_commutator: Partition,
    /// `"d(a,b,b) ~ a"` or `"d(a,a,b) ~ b"`.
    pub condition: String,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WdtReport {
    pub holds: bool,
    pub violation: Option<WdtViolation>,
}

/// Scans every congruence `theta` and every pair in it. The term's
/// variables, in the order `x, y, z`, are its three arguments.
pub fn check_weak_difference_term(a: &FiniteAlgebra, d: &TermExpr) -> Result<WdtReport, UaError> {
    d.check_signature(a)?;
    let vars = d.variables();
    if let Some(v) = vars.iter().find(|v| !["x", "y", "z"].contains(v)) {
        return Err(UaError::Arity(format!(
            "a ternary term may only use x, y, z; found `{v}`"
        )));
    }
    let d3 = |x: usize, y: usize, z: usize| {
        d.eval(a, &|v| match v {
            "x" => x,
            "y" => y,
            _ => z,
        })
    };
    let n = a.size();
    let con = con_lattice(a)?;
    for theta in con.partitions() {
        let cc = commutator(a, theta, theta)?;
        for x in 0..n {
            for y in (0..n).filter(|&y| theta.related(x, y)) {
                let (left, right) = (d3(x, y, y), d3(x, x, y));
                let bad = if !cc.related(x, left) {
                    Some(("d(a,b,b) ~ a", left))
                } else if !cc.related(right, y) {
                    Some(("d(a,a,b) ~ b", right))
                } else {
                    None
                };
                if let Some((condition, value)) = bad {
                    let violation = WdtViolation {
                        a: x,
                        b: y,
                        theta: theta.clone(),
                        theta_commutator: cc,
                        condition: condition.into(),
                        value,
                    };
                    return Ok(WdtReport {
                        holds: false,
                        violation: Some(violation),
                    });
                }
            }
        }
    }
    Ok(WdtReport {
        holds: true,
        violation: None,
    })
}
