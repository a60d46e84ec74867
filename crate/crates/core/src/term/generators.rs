//! Fixed and parametric identities.

use super::{Identity, QuasiIdentity, Term, TermError};
use crate::lattice::Side;

fn x(i: usize) -> Term {
    Term::var(&format!("x{i}"))
}

fn xp(i: usize) -> Term {
    Term::var(&format!("x{i}'"))
}

/// `y_i = (x_i + x_{i+1}) * (x_i' + x_{i+1}')`, indices mod `n`.
fn cross_term(i: usize, n: usize) -> Term {
    let j = (i + 1) % n;
    x(i).join(x(j)).meet(xp(i).join(xp(j)))
}

/// `x_1 + [(x_0' + x_1') * (y_1 + ... + y_{n-1})]`, shared by both families.
fn right_core(n: usize) -> Term {
    let ys = Term::join_all((1..n).map(|i| cross_term(i, n)));
    x(1).join(xp(0).join(xp(1)).meet(ys))
}

fn check_n(n: usize) -> Result<(), TermError> {
    if n < 3 {
        Err(TermError::InvalidN(n))
    } else {
        Ok(())
    }
}

/// `x0 * (x0' + prod_{i=1}^{n-1} (x_i + x_i')) <= x1 + [(x0' + x1') * sum_{i=1}^{n-1} y_i]`.
pub fn d_n(n: usize) -> Result<Identity, TermError> {
    check_n(n)?;
    let pairs = Term::meet_all((1..n).map(|i| x(i).join(xp(i))));
    let lhs = x(0).meet(xp(0).join(pairs));
    Ok(Identity::inequation(lhs, right_core(n)))
}

/// `prod_{i=0}^{n-1} (x_i + x_i') <= x0' + (x0 * (x1 + [(x0' + x1') * sum_{i=1}^{n-1} y_i]))`.
pub fn d_n_star(n: usize) -> Result<Identity, TermError> {
    check_n(n)?;
    let lhs = Term::meet_all((0..n).map(|i| x(i).join(xp(i))));
    let rhs = xp(0).join(x(0).meet(right_core(n)));
    Ok(Identity::inequation(lhs, rhs))
}

/// `u*(x+y+z) = u*(x+y) + u*(x+z) + u*(y+z)`.
pub fn two_distributive() -> Identity {
    let [u, x, y, z] = ["u", "x", "y", "z"].map(Term::var);
    let lhs = u
        .clone()
        .meet(Term::join_all([x.clone(), y.clone(), z.clone()]));
    let rhs = Term::join_all([
        u.clone().meet(x.clone().join(y.clone())),
        u.clone().meet(x.join(z.clone())),
        u.meet(y.join(z)),
    ]);
    Identity::equation(lhs, rhs)
}

/// The modular law as an equation: `x + y*(x+z) = (x+y)*(x+z)`.
pub fn modular_law() -> Identity {
    let [x, y, z] = ["x", "y", "z"].map(Term::var);
    let xz = x.clone().join(z);
    Identity::equation(
        x.clone().join(y.clone().meet(xz.clone())),
        x.join(y).meet(xz),
    )
}

/// Meet side: `x*y = x*z -> x*y = x*(y+z)`; join side is the dual.
pub fn semidistributive(side: Side) -> QuasiIdentity {
    let [x, y, z] = ["x", "y", "z"].map(Term::var);
    let (op, dual): (fn(Term, Term) -> Term, fn(Term, Term) -> Term) = match side {
        Side::Meet => (Term::meet, Term::join),
        Side::Join => (Term::join, Term::meet),
    };
    QuasiIdentity {
        premises: vec![Identity::equation(
            op(x.clone(), y.clone()),
            op(x.clone(), z.clone()),
        )],
        conclusion: Identity::equation(op(x.clone(), y.clone()), op(x, dual(y, z))),
    }
}

pub const BUILTIN_NAMES: [&str; 7] = [
    "modular",
    "2dist",
    "sd-meet",
    "sd-join",
    "dn",
    "dn-star",
    "arguesian-d3",
];

/// Looks up a builtin by its command-line name. `n` is used by the
/// parametric families.
pub fn builtin(name: &str, n: usize) -> Result<QuasiIdentity, TermError> {
    let bare = |id: Identity| QuasiIdentity {
        premises: Vec::new(),
        conclusion: id,
    };
    Ok(match name {
        "modular" => bare(modular_law()),
        "2dist" => bare(two_distributive()),
        "sd-meet" => semidistributive(Side::Meet),
        "sd-join" => semidistributive(Side::Join),
        "dn" => bare(d_n(n)?),
        "dn-star" => bare(d_n_star(n)?),
        // (D_3*) is equivalent to the Arguesian law
        "arguesian-d3" => bare(d_n_star(3)?),
        other => return Err(TermError::UnknownBuiltin(other.to_string())),
    })
}
