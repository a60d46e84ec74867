//! Lattice terms, equations and quasi-equations.
//!
//! Concrete syntax: `+` is join, `*` is meet and binds tighter, `=` and `<=`
//! separate the sides of an identity, and `->` ends the `&`-separated
//! premises of a quasi-identity.

mod eval;
mod generators;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

pub use eval::{
    check, compare_per_assignment, eval, Assignment, CheckMode, CompiledTerms, LatticeOps,
    PartitionOps, Verdict,
};
pub use generators::{
    builtin, d_n, d_n_star, modular_law, semidistributive, two_distributive, BUILTIN_NAMES,
};
pub use parser::{parse, parse_identity, parse_quasi, parse_term, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Arc<str>),
    Join(Box<Term>, Box<Term>),
    Meet(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        assert!(!name.is_empty(), "variable names are nonempty");
        Term::Var(name.into())
    }

    pub fn join(self, other: Term) -> Self {
        Term::Join(Box::new(self), Box::new(other))
    }

    pub fn meet(self, other: Term) -> Self {
        Term::Meet(Box::new(self), Box::new(other))
    }

    /// Left-nested join of a nonempty sequence.
    pub fn join_all(terms: impl IntoIterator<Item = Term>) -> Self {
        terms
            .into_iter()
            .reduce(Term::join)
            .expect("join of an empty family")
    }

    /// Left-nested meet of a nonempty sequence.
    pub fn meet_all(terms: impl IntoIterator<Item = Term>) -> Self {
        terms
            .into_iter()
            .reduce(Term::meet)
            .expect("meet of an empty family")
    }

    pub fn variables(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Join(a, b) | Term::Meet(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Replaces variables by terms; unmapped variables are kept.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => map(v).unwrap_or_else(|| self.clone()),
            Term::Join(a, b) => a.substitute(map).join(b.substitute(map)),
            Term::Meet(a, b) => a.substitute(map).meet(b.substitute(map)),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Join(a, b) | Term::Meet(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, top_level: bool) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Join(a, b) => {
                a.write(f, top_level)?;
                f.write_str(if top_level { " + " } else { "+" })?;
                // right operand that is itself a join needs parentheses to keep
                // the tree shape
                if matches!(**b, Term::Join(..)) {
                    f.write_str("(")?;
                    b.write(f, false)?;
                    f.write_str(")")
                } else {
                    b.write(f, top_level)
                }
            }
            Term::Meet(a, b) => {
                a.write_factor(f, false)?;
                f.write_str("*")?;
                b.write_factor(f, true)
            }
        }
    }

    fn write_factor(&self, f: &mut fmt::Formatter<'_>, right: bool) -> fmt::Result {
        match self {
            Term::Join(..) => {
                f.write_str("(")?;
                self.write(f, false)?;
                f.write_str(")")
            }
            Term::Meet(..) if right => {
                f.write_str("(")?;
                self.write(f, false)?;
                f.write_str(")")
            }
            _ => self.write(f, false),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityKind {
    Equation,
    /// `s <= t`, checked as `s + t = t`.
    Inequation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
    pub kind: IdentityKind,
}

impl Identity {
    pub fn equation(lhs: Term, rhs: Term) -> Self {
        Self {
            lhs,
            rhs,
            kind: IdentityKind::Equation,
        }
    }

    pub fn inequation(lhs: Term, rhs: Term) -> Self {
        Self {
            lhs,
            rhs,
            kind: IdentityKind::Inequation,
        }
    }

    pub fn variables(&self) -> BTreeSet<Arc<str>> {
        let mut v = self.lhs.variables();
        v.extend(self.rhs.variables());
        v
    }

    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Term>) -> Identity {
        Identity {
            lhs: self.lhs.substitute(map),
            rhs: self.rhs.substitute(map),
            kind: self.kind,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.kind {
            IdentityKind::Equation => "=",
            IdentityKind::Inequation => "<=",
        };
        write!(f, "{} {} {}", self.lhs, rel, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuasiIdentity {
    pub premises: Vec<Identity>,
    pub conclusion: Identity,
}

impl QuasiIdentity {
    pub fn variables(&self) -> BTreeSet<Arc<str>> {
        let mut v = self.conclusion.variables();
        for p in &self.premises {
            v.extend(p.variables());
        }
        v
    }
}

impl fmt::Display for QuasiIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{p}")?;
        }
        if !self.premises.is_empty() {
            f.write_str(" -> ")?;
        }
        write!(f, "{}", self.conclusion)
    }
}

/// Anything the parser can return.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Term(Term),
    Identity(Identity),
    Quasi(QuasiIdentity),
}

impl Formula {
    /// Views an identity as a quasi-identity with no premises.
    pub fn into_quasi(self) -> Option<QuasiIdentity> {
        match self {
            Formula::Term(_) => None,
            Formula::Identity(id) => Some(QuasiIdentity {
                premises: Vec::new(),
                conclusion: id,
            }),
            Formula::Quasi(q) => Some(q),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Term(t) => t.fmt(f),
            Formula::Identity(i) => i.fmt(f),
            Formula::Quasi(q) => q.fmt(f),
        }
    }
}

impl Serialize for Identity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for QuasiIdentity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("variable `{0}` is not bound by the assignment")]
    UnboundVariable(String),
    #[error("n must be at least 3, got {0}")]
    InvalidN(usize),
    #[error("exhaustive check needs {needed} evaluations, budget is {budget}; use sampled mode")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("unknown builtin identity `{0}`")]
    UnknownBuiltin(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}
