use super::{FiniteLattice, LatticeError};

fn labelled(size: usize, covers: &[(usize, usize)], labels: &[&str]) -> FiniteLattice {
    FiniteLattice::from_cover_relation(size, covers)
        .and_then(|l| l.with_labels(labels.iter().map(|s| s.to_string()).collect()))
        .expect("built-in lattice is valid")
}

pub fn singleton() -> FiniteLattice {
    chain(1)
}

/// The `n`-element chain `0 < 1 < ... < n-1`.
pub fn chain(n: usize) -> FiniteLattice {
    assert!(n > 0, "a chain needs at least one element");
    let covers: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    FiniteLattice::from_cover_relation(n, &covers).expect("chain is a lattice")
}

/// `M_k`: bottom `0`, atoms `1..=k`, top `k+1`.
pub fn diamond(k: usize) -> FiniteLattice {
    let top = k + 1;
    let mut covers = Vec::new();
    for a in 1..=k {
        covers.push((0, a));
        covers.push((a, top));
    }
    if k == 0 {
        covers.push((0, 1));
    }
    let mut labels = vec!["0".to_string()];
    labels.extend((1..=k).map(|i| format!("a{i}")));
    labels.push("1".into());
    FiniteLattice::from_cover_relation(k + 2, &covers)
        .and_then(|l| l.with_labels(labels))
        .expect("M_k is a lattice")
}

/// The canonical `M3`: `0`, atoms `a`, `b`, `c` (indices 1, 2, 3), `1`.
pub fn m3() -> FiniteLattice {
    labelled(
        5,
        &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        &["0", "a", "b", "c", "1"],
    )
}

/// The pentagon: `0 < a < c < 1` and `0 < b < 1`.
pub fn n5() -> FiniteLattice {
    labelled(
        5,
        &[(0, 1), (1, 3), (3, 4), (0, 2), (2, 4)],
        &["0", "a", "b", "c", "1"],
    )
}

/// The Boolean lattice of subsets of a `k`-set, indexed by bitmask.
pub fn boolean(k: usize) -> FiniteLattice {
    let n = 1usize << k;
    FiniteLattice::from_operations(n, |a, b| a | b, |a, b| a & b).expect("Boolean lattice")
}

pub fn direct_product(
    left: &FiniteLattice,
    right: &FiniteLattice,
) -> Result<FiniteLattice, LatticeError> {
    direct_product_capped(left, right, crate::cap::lattice_cap())
}

/// Componentwise product; element `(i, j)` has index `i * right.size() + j`.
pub fn direct_product_capped(
    left: &FiniteLattice,
    right: &FiniteLattice,
    cap: usize,
) -> Result<FiniteLattice, LatticeError> {
    let (n1, n2) = (left.size(), right.size());
    let size = n1.saturating_mul(n2);
    if size > cap {
        return Err(LatticeError::SizeLimit { size, cap });
    }
    let prod = FiniteLattice::from_operations(
        size,
        |a, b| left.join(a / n2, b / n2) * n2 + right.join(a % n2, b % n2),
        |a, b| left.meet(a / n2, b / n2) * n2 + right.meet(a % n2, b % n2),
    )?;
    let labels = (0..size)
        .map(|x| format!("({},{})", left.label(x / n2), right.label(x % n2)))
        .collect();
    prod.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_chain_from_single_cover() {
        let l = FiniteLattice::from_cover_relation(2, &[(0, 1)]).unwrap();
        assert_eq!(l.join(0, 1), 1);
        assert_eq!(l.meet(0, 1), 0);
        assert_eq!((l.bottom(), l.top()), (0, 1));
    }

    #[test]
    fn n5_from_covers_is_valid() {
        let l = n5();
        l.check_laws().unwrap();
        assert_eq!(l.join(1, 2), 4);
        assert_eq!(l.meet(3, 2), 0);
        assert!(l.lt(1, 3));
    }

    #[test]
    fn diamond_with_extra_edge_closes_to_a_chain() {
        // (1,2) on top of the four-element diamond makes the closure the
        // chain 0 < 1 < 2 < 3, which is a lattice.
        let l = FiniteLattice::from_cover_relation(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)])
            .unwrap();
        assert_eq!(l.covers(), vec![(0, 1), (1, 2), (2, 3)]);
        // Adding the reverse edge closes a cycle.
        let err = FiniteLattice::from_cover_relation(
            4,
            &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 2), (2, 1)],
        );
        assert_eq!(err, Err(LatticeError::NotAPartialOrder(1, 2)));
    }

    #[test]
    fn two_minimal_elements_is_not_a_lattice() {
        let err = FiniteLattice::from_cover_relation(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(
            err,
            Err(LatticeError::NotALattice {
                a: 0,
                b: 1,
                bound: super::super::Bound::Join
            })
        );
        let err = FiniteLattice::from_cover_relation(3, &[(0, 1), (0, 2)]);
        assert!(matches!(
            err,
            Err(LatticeError::NotALattice { a: 1, b: 2, .. })
        ));
    }

    #[test]
    fn cover_indices_are_checked() {
        assert_eq!(
            FiniteLattice::from_cover_relation(2, &[(0, 5)]),
            Err(LatticeError::IndexOutOfRange { index: 5, size: 2 })
        );
        assert_eq!(
            FiniteLattice::from_cover_relation(0, &[]),
            Err(LatticeError::Empty)
        );
    }

    #[test]
    fn product_of_two_chains_is_the_boolean_square() {
        let sq = direct_product(&chain(2), &chain(2)).unwrap();
        assert_eq!(sq.size(), 4);
        assert_eq!(sq.atoms(), vec![1, 2]);
        assert_eq!(sq.join(1, 2), 3);
        assert_eq!(sq.meet(1, 2), 0);
    }

    #[test]
    fn m3_times_two_chain() {
        let l = direct_product(&m3(), &chain(2)).unwrap();
        assert_eq!(l.size(), 10);
        l.check_laws().unwrap();
        assert!(l.is_modular());
        assert!(!l.is_distributive());
    }

    #[test]
    fn product_with_singleton_is_identity() {
        let l = direct_product(&n5(), &singleton()).unwrap();
        let base = n5();
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(l.join(a, b), base.join(a, b));
                assert_eq!(l.meet(a, b), base.meet(a, b));
            }
        }
    }

    #[test]
    fn product_respects_the_cap() {
        let err = direct_product_capped(&m3(), &m3(), 20).unwrap_err();
        assert_eq!(err, LatticeError::SizeLimit { size: 25, cap: 20 });
    }

    #[test]
    fn intervals() {
        let l = m3();
        let (whole, map) = l.interval(l.bottom(), l.top()).unwrap();
        assert_eq!(whole, l);
        assert_eq!(map, vec![0, 1, 2, 3, 4]);
        let (two, _) = l.interval(0, 1).unwrap();
        assert_eq!(two.size(), 2);
        let p = n5();
        let (three, map) = p.interval(0, 3).unwrap();
        assert_eq!(map, vec![0, 1, 3]);
        assert_eq!(three.length(), 2);
        assert_eq!(
            p.interval(2, 3),
            Err(LatticeError::NotComparable { lo: 2, hi: 3 })
        );
    }

    #[test]
    fn sublattice_closure_examples() {
        let l = m3();
        assert_eq!(l.sublattice_closure(&[0]), vec![0]);
        assert_eq!(l.sublattice_closure(&[1, 2]), vec![0, 1, 2, 4]);
        assert_eq!(l.sublattice_closure(&[1, 2, 3]), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn boolean_and_diamonds() {
        let b3 = boolean(3);
        assert_eq!(b3.size(), 8);
        assert!(b3.is_distributive());
        let m5 = diamond(5);
        assert_eq!(m5.atoms().len(), 5);
        assert!(m5.is_modular() && !m5.is_distributive());
    }
}
