use super::{FiniteAlgebra, Operation};

fn group(
    size: usize,
    mul: impl Fn(usize, usize) -> usize,
    inv: impl Fn(usize) -> usize,
    e: usize,
) -> FiniteAlgebra {
    FiniteAlgebra::new(
        size,
        vec![
            Operation::from_fn("mul", 2, size, |a| mul(a[0], a[1])),
            Operation::from_fn("inv", 1, size, |a| inv(a[0])),
            Operation::from_fn("e", 0, size, |_| e),
        ],
    )
    .expect("group tables are valid")
}

/// `Z_n` with `mul` = addition mod `n`, `inv` and the constant `e = 0`.
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    group(n, |a, b| (a + b) % n, |a| (n - a) % n, 0)
}

/// Direct product of two groups built by this module; pairs `(a, b)` are
/// encoded as `a * |B| + b`.
pub fn group_product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    let (na, nb) = (a.size(), b.size());
    let op = |g: &FiniteAlgebra, name: &str| g.op(name).expect("group signature").clone();
    let (ma, mb) = (op(a, "mul"), op(b, "mul"));
    let (ia, ib) = (op(a, "inv"), op(b, "inv"));
    let (ea, eb) = (op(a, "e"), op(b, "e"));
    group(
        na * nb,
        |x, y| ma.apply(na, &[x / nb, y / nb]) * nb + mb.apply(nb, &[x % nb, y % nb]),
        |x| ia.apply(na, &[x / nb]) * nb + ib.apply(nb, &[x % nb]),
        ea.table[0] * nb + eb.table[0],
    )
}

/// The symmetric group on three letters. Elements are the permutations of
/// `{0, 1, 2}` in lexicographic order of their one-line notation, so 0 is the
/// identity and `{0, 3, 4}` is the alternating subgroup.
pub fn s3() -> FiniteAlgebra {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
    // (p * q)(i) = p(q(i))
    let mul = |a: usize, b: usize| {
        let (p, q) = (perms[a], perms[b]);
        index([p[q[0]], p[q[1]], p[q[2]]])
    };
    let inv = |a: usize| {
        let p = perms[a];
        let mut r = [0; 3];
        for i in 0..3 {
            r[p[i]] = i;
        }
        index(r)
    };
    group(6, mul, inv, 0)
}

/// `{0, 1}` with `meet` = minimum.
pub fn semilattice2() -> FiniteAlgebra {
    FiniteAlgebra::new(
        2,
        vec![Operation::from_fn("meet", 2, 2, |a| a[0].min(a[1]))],
    )
    .unwrap()
}

/// `{0, 1, 2}` with the ternary majority operation that returns the repeated
/// value when two arguments agree and the first argument otherwise.
pub fn majority3() -> FiniteAlgebra {
    let maj = |a: &[usize]| if a[1] == a[2] { a[1] } else { a[0] };
    FiniteAlgebra::new(3, vec![Operation::from_fn("maj", 3, 3, maj)]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_group(g: &FiniteAlgebra) -> bool {
        let n = g.size();
        let (m, i) = (g.op("mul").unwrap(), g.op("inv").unwrap());
        let e = g.op("e").unwrap().table[0];
        (0..n).all(|a| {
            m.apply(n, &[a, e]) == a
                && m.apply(n, &[a, i.apply(n, &[a])]) == e
                && (0..n).all(|b| {
                    (0..n).all(|c| {
                        m.apply(n, &[m.apply(n, &[a, b]), c])
                            == m.apply(n, &[a, m.apply(n, &[b, c])])
                    })
                })
        })
    }

    #[test]
    fn fixtures_are_groups() {
        for g in [
            cyclic_group(2),
            cyclic_group(3),
            cyclic_group(4),
            group_product(&cyclic_group(2), &cyclic_group(2)),
            s3(),
        ] {
            assert!(is_group(&g));
        }
        let s = s3();
        let m = s.op("mul").unwrap();
        assert!((0..6).any(|a| (0..6).any(|b| m.apply(6, &[a, b]) != m.apply(6, &[b, a]))));
    }

    #[test]
    fn majority_is_a_majority_operation() {
        let a = majority3();
        let m = a.op("maj").unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(m.apply(3, &[x, x, y]), x);
                assert_eq!(m.apply(3, &[x, y, x]), x);
                assert_eq!(m.apply(3, &[y, x, x]), x);
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = cyclic_group(3);
        let back = FiniteAlgebra::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(back, g);
        assert!(FiniteAlgebra::from_json_str(
            r#"{"size":2,"ops":[{"name":"f","arity":1,"table":[0,2]}]}"#
        )
        .is_err());
        assert!(FiniteAlgebra::from_json_str(
            r#"{"size":2,"ops":[{"name":"f","arity":2,"table":[0,1]}]}"#
        )
        .is_err());
        assert!(FiniteAlgebra::from_json_str(
            r#"{"size":1,"ops":[{"name":"f","arity":0,"table":[0]},{"name":"f","arity":0,"table":[0]}]}"#
        )
        .is_err());
    }
}
