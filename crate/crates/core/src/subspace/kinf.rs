//! Membership in the class of finite modular 2-distributive lattices.

use serde::Serialize;

use crate::lattice::{find_two_diamond, FiniteLattice, TwoDiamond};
use crate::term::{check, two_distributive, Assignment, CheckMode, QuasiIdentity, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KInfinityReport {
    pub member: bool,
    pub modular: bool,
    /// `(a, b, c)` with `a <= c` and `a + b*c != (a+b)*c`.
    pub modular_counterexample: Option<(usize, usize, usize)>,
    /// First assignment violating 2-distributivity, if checked and found.
    pub two_distributive_failure: Option<Assignment>,
    pub two_diamond: Option<TwoDiamond>,
}

/// Decides modularity plus 2-distributivity. For modular input both the
/// identity check and the 2-diamond search run, and they must agree.
pub fn k_infinity_member(l: &FiniteLattice) -> KInfinityReport {
    if let Some(t) = l.modularity_counterexample() {
        return KInfinityReport {
            member: false,
            modular: false,
            modular_counterexample: Some(t),
            two_distributive_failure: None,
            two_diamond: None,
        };
    }
    let q = QuasiIdentity {
        premises: Vec::new(),
        conclusion: two_distributive(),
    };
    let mode = CheckMode::Exhaustive { budget: u64::MAX };
    let failure = match check(l, &q, mode).expect("budget is unbounded") {
        Verdict::Fails { assignment } => Some(assignment),
        _ => None,
    };
    let diamond = find_two_diamond(l);
    assert_eq!(
        failure.is_some(),
        diamond.is_some(),
        "2-distributivity check and 2-diamond search disagree on a modular lattice"
    );
    KInfinityReport {
        member: failure.is_none(),
        modular: true,
        modular_counterexample: None,
        two_distributive_failure: failure,
        two_diamond: diamond,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{boolean, direct_product, m3, n5};
    use crate::subspace::subspace_lattice;

    #[test]
    fn decisions() {
        assert!(k_infinity_member(&m3()).member);
        assert!(k_infinity_member(&boolean(3)).member);
        let r = k_infinity_member(&n5());
        assert!(!r.member && !r.modular && r.modular_counterexample.is_some());
        let sub = subspace_lattice(3, 2).unwrap();
        let r = k_infinity_member(sub.lattice());
        assert!(!r.member && r.modular);
        let d = r.two_diamond.unwrap();
        assert_eq!(sub.lattice().bottom(), d.bottom);
        assert_eq!(sub.lattice().top(), d.top);
        assert!(r.two_distributive_failure.is_some());
    }

    #[test]
    fn products_of_members_stay_members() {
        let l = direct_product(&m3(), &m3()).unwrap();
        assert!(k_infinity_member(&l).member);
    }
}
