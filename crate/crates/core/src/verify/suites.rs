use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{Check, Outcome, Suite};
use crate::lattice::{diamond, homomorphisms, m3, FiniteLattice, LatticeHom, Side};
use crate::m3proj::{abx_check, m3_witness};
use crate::partition::{
    all_partitions, full_partition_lattice, random_permuting_instance, verify_dn_permuting,
    Partition,
};
use crate::subspace::{k_infinity_member, subspace_lattice};
use crate::term::{compare_per_assignment, d_n, d_n_star, Assignment, CheckMode, Identity};
use crate::ua::{
    abelian_interval, centrality, check_weak_difference_term, commutator, con_lattice,
    construct_delta, is_solvable_interval, verify_embedding_construction, ConLattice,
    FiniteAlgebra, TermExpr,
};

pub(super) fn checks(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::All => Vec::new(),
        Suite::Idequiv => idequiv(),
        Suite::Dnperm => dnperm(),
        Suite::Abx => abx(),
        Suite::M3proj => m3proj(),
        Suite::Commutator => commutator_suite(),
        Suite::Embedding => embedding(),
        Suite::Kinf => kinf(),
        Suite::Structure => structure(),
    }
}

fn err(e: impl std::fmt::Display) -> Outcome {
    Outcome::fail(json!({ "error": e.to_string() }))
}

fn idequiv() -> Vec<Check> {
    let mut out = Vec::new();
    for n in [3, 4] {
        for name in ["m3", "m3x2", "sub_2_2", "sub_2_3", "sub_3_2"] {
            let sampled = name == "sub_3_2";
            let property = if sampled {
                "D_n and D_n* agree at every sampled assignment"
            } else {
                "D_n and D_n* agree at every assignment"
            };
            out.push(Check::new(format!("idequiv/{name}/n{n}"), property, move |c, cfg| {
                let mode = if sampled {
                    CheckMode::Sampled { count: cfg.samples, seed: cfg.seed }
                } else {
                    CheckMode::Exhaustive { budget: cfg.budget }
                };
                let (a, b) = (d_n(n).expect("n >= 3"), d_n_star(n).expect("n >= 3"));
                match compare_per_assignment(c.lattice(name), &a, &b, mode) {
                    Ok(r) => Outcome::new(
                        r.discrepancy.is_none(),
                        json!({ "checked": r.checked, "sampled": sampled, "discrepancy": r.discrepancy }),
                    ),
                    Err(e) => err(e),
                }
            }));
        }
    }
    out
}

fn dnperm() -> Vec<Check> {
    vec![Check::new(
        "dnperm/coset_families",
        "D_n* holds for coset partitions of abelian groups paired so that each pair permutes",
        |_, cfg| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut per_n = [0usize; 3];
            let mut first_failure = None;
            let mut failures = 0usize;
            for i in 0..cfg.instances {
                let n = rng.gen_range(3..=5);
                per_n[n - 3] += 1;
                let (alphas, primes) = random_permuting_instance(&mut rng, n);
                match verify_dn_permuting(&alphas, &primes) {
                    Ok(r) if r.holds => {}
                    Ok(r) => {
                        failures += 1;
                        first_failure.get_or_insert(json!({ "instance": i, "alphas": alphas, "primes": primes, "lhs": r.lhs, "rhs": r.rhs }));
                    }
                    Err(e) => {
                        failures += 1;
                        first_failure
                            .get_or_insert(json!({ "instance": i, "error": e.to_string() }));
                    }
                }
            }
            Outcome::new(
                failures == 0,
                json!({ "instances": cfg.instances, "per_n": { "3": per_n[0], "4": per_n[1], "5": per_n[2] }, "failures": failures, "first_failure": first_failure }),
            )
        },
    )]
}

fn abx() -> Vec<Check> {
    [
        "m3",
        "m3x2",
        "sub_2_2",
        "sub_2_3",
        "sub_3_2",
        "figure2_left",
    ]
    .into_iter()
    .map(|name| {
        Check::new(
            format!("abx/{name}"),
            "the ABx biconditional holds for every qualifying 4-tuple",
            move |c, _| match abx_check(c.lattice(name)) {
                Ok(v) => Outcome::new(
                    v.holds(),
                    json!({ "qualifying": v.qualifying, "counterexample": v.counterexample }),
                ),
                Err(e) => err(e),
            },
        )
    })
    .collect()
}

/// Runs the pipeline for every surjection onto `M3` (up to `limit`) and
/// every choice of atom preimages.
fn witness_all(l: &FiniteLattice, limit: usize) -> Result<Value, Value> {
    let target = m3();
    let homs: Vec<Vec<usize>> = homomorphisms(l, &target, limit)
        .into_iter()
        .filter(|h| (0..5).all(|y| h.contains(&y)))
        .collect();
    let mut runs = 0usize;
    for map in &homs {
        let h = LatticeHom::new(l, &target, map.clone()).expect("search yields homomorphisms");
        let pre = |a: usize| (0..l.size()).filter(move |&x| map[x] == a);
        for x in pre(1) {
            for y in pre(2) {
                for z in pre(3) {
                    runs += 1;
                    let r =
                        m3_witness(&h, x, y, z).map_err(|e| json!({ "error": e.to_string() }))?;
                    if !r.success() || r.stages.iter().any(|s| !s.ok) {
                        return Err(json!({ "hom": map, "report": r }));
                    }
                }
            }
        }
    }
    Ok(json!({ "surjections": homs.len(), "runs": runs }))
}

fn m3proj() -> Vec<Check> {
    let mut out: Vec<Check> = ["m3", "m3x2", "pi3", "sub_2_2", "sub_2_3", "sub_3_2", "figure2_left", "figure2_right"]
        .into_iter()
        .map(|name| {
            Check::new(
                format!("m3proj/{name}"),
                "on a modular lattice every surjection onto M3 yields an M3 over the atoms, with images preserved at every stage",
                move |c, _| {
                    let l = c.lattice(name);
                    if let Some(t) = l.modularity_counterexample() {
                        return Outcome::fail(json!({ "not_modular": t }));
                    }
                    match witness_all(l, 10_000) {
                        Ok(w) => Outcome::new(true, w),
                        Err(w) => Outcome::fail(w),
                    }
                },
            )
        })
        .collect();
    out.push(Check::new(
        "m3proj/con_z2z2",
        "Con(Z2 x Z2) with the identity surjection yields its own M3",
        |c, _| {
            let con = match con_lattice(c.algebra("z2z2")) {
                Ok(con) => con,
                Err(e) => return err(e),
            };
            let target = m3();
            let Some(iso) = con.lattice().isomorphism_from(&target) else {
                return Outcome::fail(json!({ "error": "Con(Z2 x Z2) is not M3" }));
            };
            let mut inverse = vec![0; 5];
            for (x, &y) in iso.map().iter().enumerate() {
                inverse[y] = x;
            }
            let h = LatticeHom::new(con.lattice(), &target, inverse)
                .expect("inverse of an isomorphism");
            let pre = |a: usize| iso.apply(a);
            match m3_witness(&h, pre(1), pre(2), pre(3)) {
                Ok(r) => Outcome::new(r.success() && r.m == 0, json!(r)),
                Err(e) => err(e),
            }
        },
    ));
    out.push(Check::new(
        "m3proj/failure_fixture",
        "on the non-modular failure fixture the pipeline reports failure at the verify stage",
        |c, _| {
            let target = m3();
            let h = match c.failure_hom(&target) {
                Ok(h) => h,
                Err(e) => return err(e),
            };
            let [x, y, z] = c.failure.preimages;
            match m3_witness(&h, x, y, z) {
                Ok(r) => {
                    let images_kept = r.stages.iter().all(|s| s.ok || s.stage == "verify");
                    Outcome::new(r.failed_stage == Some("verify") && images_kept, json!(r))
                }
                Err(e) => err(e),
            }
        },
    ));
    out
}

/// Every copy of `M3` as `[bottom, x, y, z, top]` with `x < y < z`.
fn m3_copies(l: &FiniteLattice) -> Vec<[usize; 5]> {
    let n = l.size();
    let mut out = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let (lo, hi) = (l.meet(x, y), l.join(x, y));
            if lo == x || lo == y {
                continue;
            }
            for z in (y + 1)..n {
                if l.meet(x, z) == lo
                    && l.meet(y, z) == lo
                    && l.join(x, z) == hi
                    && l.join(y, z) == hi
                {
                    out.push([lo, x, y, z, hi]);
                }
            }
        }
    }
    out
}

/// Ternary terms known to be weak difference terms for the corpus
/// algebras; each is verified before use.
fn wdt_candidate(a: &FiniteAlgebra) -> Option<&'static str> {
    if a.op("mul").is_some() && a.op("inv").is_some() {
        Some("mul(mul(x,inv(y)),z)")
    } else if a.op("maj").is_some() {
        Some("maj(x,y,z)")
    } else if a.op("meet").is_some() {
        Some("x")
    } else {
        None
    }
}

fn has_verified_wdt(a: &FiniteAlgebra) -> bool {
    wdt_candidate(a)
        .and_then(|t| TermExpr::parse(t).ok())
        .and_then(|d| check_weak_difference_term(a, &d).ok())
        .is_some_and(|r| r.holds)
}

/// The coset partition of the subgroup generated by all commutators.
fn derived_subgroup_partition(g: &FiniteAlgebra) -> Partition {
    let n = g.size();
    let (m, i) = (g.op("mul").expect("group"), g.op("inv").expect("group"));
    let mul = |a, b| m.apply(n, &[a, b]);
    let inv = |a| i.apply(n, &[a]);
    let mut h: BTreeSet<usize> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| mul(mul(inv(a), inv(b)), mul(a, b)))
        .collect();
    loop {
        let products: Vec<usize> = h
            .iter()
            .flat_map(|&x| h.iter().map(move |&y| (x, y)))
            .map(|(x, y)| mul(x, y))
            .collect();
        let before = h.len();
        h.extend(products);
        if h.len() == before {
            break;
        }
    }
    let labels: Vec<usize> = (0..n)
        .map(|x| {
            (0..n)
                .find(|&y| h.contains(&mul(inv(y), x)))
                .expect("coset")
        })
        .collect();
    Partition::from_labels(&labels)
}

fn per_algebra(
    id: &'static str,
    property: &'static str,
    names: &'static [&'static str],
    body: fn(&FiniteAlgebra, &ConLattice) -> Result<Value, Value>,
) -> Vec<Check> {
    names
        .iter()
        .map(|&name| {
            Check::new(format!("commutator/{id}/{name}"), property, move |c, _| {
                let a = c.algebra(name);
                let con = match con_lattice(a) {
                    Ok(con) => con,
                    Err(e) => return err(e),
                };
                match body(a, &con) {
                    Ok(w) => Outcome::new(true, w),
                    Err(w) => Outcome::fail(w),
                }
            })
        })
        .collect()
}

const ALGEBRAS: &[&str] = &["z2", "z3", "z4", "z2z2", "s3", "semilattice2", "majority3"];
const GROUPS: &[&str] = &["z2", "z3", "z4", "z2z2", "s3"];

fn commutator_suite() -> Vec<Check> {
    let mut out = per_algebra(
        "group_oracle",
        "the term-condition commutator [1,1] equals the congruence of the commutator subgroup",
        GROUPS,
        |a, _| {
            let one = Partition::indiscrete(a.size());
            let tc = commutator(a, &one, &one).map_err(|e| json!({ "error": e.to_string() }))?;
            let expected = derived_subgroup_partition(a);
            let w = json!({ "commutator": tc, "derived_subgroup": expected });
            if tc == expected {
                Ok(w)
            } else {
                Err(w)
            }
        },
    );
    out.extend(per_algebra(
        "wdt",
        "the listed ternary term is a weak difference term",
        ALGEBRAS,
        |a, _| {
            let term = wdt_candidate(a).ok_or_else(|| json!({ "error": "no candidate term" }))?;
            let d = TermExpr::parse(term).map_err(|e| json!({ "error": e.to_string() }))?;
            let r =
                check_weak_difference_term(a, &d).map_err(|e| json!({ "error": e.to_string() }))?;
            let w = json!({ "term": term, "report": r });
            if r.holds {
                Ok(w)
            } else {
                Err(w)
            }
        },
    ));
    out.extend(per_algebra(
        "m3_atoms",
        "in every M3 of Con(A) each atom satisfies [x,x] <= bottom, and with a weak difference term the atoms permute",
        ALGEBRAS,
        |a, con| {
            let l = con.lattice();
            let copies = m3_copies(l);
            let wdt = has_verified_wdt(a);
            for copy in &copies {
                let bottom = con.partition(copy[0]);
                for &x in &copy[1..4] {
                    let p = con.partition(x);
                    let cc = commutator(a, p, p).map_err(|e| json!({ "error": e.to_string() }))?;
                    if !cc.leq(bottom) {
                        return Err(json!({ "m3": copy, "atom": x, "commutator": cc }));
                    }
                }
                if wdt {
                    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
                        if !con.partition(copy[i]).permutes_with(con.partition(copy[j])) {
                            return Err(json!({ "m3": copy, "not_permuting": [copy[i], copy[j]] }));
                        }
                    }
                }
            }
            Ok(json!({ "m3_copies": copies.len(), "weak_difference_term": wdt }))
        },
    ));
    out.extend(per_algebra(
        "transfer",
        "with a weak difference term, C(a,a;b) transfers to C(a/\\g,a/\\g;b/\\g) and C(a\\/d,a\\/d;b\\/d)",
        ALGEBRAS,
        |a, con| {
            if !has_verified_wdt(a) {
                return Ok(json!({ "skipped": "no weak difference term" }));
            }
            let ps = con.partitions();
            let mut instances = 0usize;
            for al in ps {
                for be in ps.iter().filter(|b| b.leq(al)) {
                    if !centrality(a, al, al, be) {
                        continue;
                    }
                    for g in ps {
                        instances += 1;
                        let (am, bm) = (al.meet(g), be.meet(g));
                        let (aj, bj) = (al.join(g), be.join(g));
                        if !centrality(a, &am, &am, &bm) || !centrality(a, &aj, &aj, &bj) {
                            return Err(json!({ "alpha": al, "beta": be, "gamma": g }));
                        }
                    }
                }
            }
            Ok(json!({ "instances": instances }))
        },
    ));
    out.extend(per_algebra(
        "solvable_permute",
        "with a weak difference term, congruences inside a solvable interval permute",
        ALGEBRAS,
        |a, con| {
            if !has_verified_wdt(a) {
                return Ok(json!({ "skipped": "no weak difference term" }));
            }
            let ps = con.partitions();
            let mut intervals = 0usize;
            for al in ps {
                for be in ps.iter().filter(|b| b.leq(al)) {
                    if !is_solvable_interval(a, be, al)
                        .map_err(|e| json!({ "error": e.to_string() }))?
                    {
                        continue;
                    }
                    intervals += 1;
                    let inside: Vec<&Partition> =
                        ps.iter().filter(|x| be.leq(x) && x.leq(al)).collect();
                    for x in &inside {
                        for y in &inside {
                            if !x.permutes_with(y) {
                                return Err(json!({ "interval": [be, al], "pair": [x, y] }));
                            }
                        }
                    }
                }
            }
            Ok(json!({ "solvable_intervals": intervals }))
        },
    ));
    out.extend(per_algebra(
        "dn_star_on_m3_atoms",
        "with a weak difference term, D_3* holds whenever each pair (x_i, x_i') is two atoms of one M3 in Con(A)",
        ALGEBRAS,
        |a, con| {
            if !has_verified_wdt(a) {
                return Ok(json!({ "skipped": "no weak difference term" }));
            }
            let l = con.lattice();
            let mut pairs = BTreeSet::new();
            for copy in m3_copies(l) {
                for i in 1..4 {
                    for j in 1..4 {
                        if i != j {
                            pairs.insert((copy[i], copy[j]));
                        }
                    }
                }
            }
            let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
            let id: Identity = d_n_star(3).expect("n = 3");
            let mut instances = 0usize;
            for p0 in &pairs {
                for p1 in &pairs {
                    for p2 in &pairs {
                        instances += 1;
                        let env: Assignment = [p0, p1, p2]
                            .iter()
                            .enumerate()
                            .flat_map(|(i, &&(x, y))| [(format!("x{i}").into(), x), (format!("x{i}'").into(), y)])
                            .collect();
                        if !id.holds_at(l, &env).expect("all variables bound") {
                            return Err(json!({ "assignment": env }));
                        }
                    }
                }
            }
            Ok(json!({ "pairs": pairs.len(), "instances": instances }))
        },
    ));
    out.extend(per_algebra(
        "abelian_above_meet",
        "in algebras of congruence-modular varieties, a\\/b = a\\/g implies I[a\\/(b/\\g), a\\/b] is abelian",
        &["z2", "z3", "z4", "z2z2", "s3", "majority3"],
        |a, con| {
            let ps = con.partitions();
            let mut instances = 0usize;
            for al in ps {
                for be in ps {
                    for g in ps {
                        if al.join(be) != al.join(g) {
                            continue;
                        }
                        instances += 1;
                        let top = al.join(be);
                        let bottom = al.join(&be.meet(g));
                        if !abelian_interval(a, &bottom, &top) {
                            return Err(json!({ "alpha": al, "beta": be, "gamma": g }));
                        }
                    }
                }
            }
            Ok(json!({ "instances": instances }))
        },
    ));
    out.extend(per_algebra(
        "neutrality",
        "records whether [x,x] = x for all x alongside meet semidistributivity of Con(A); informational",
        ALGEBRAS,
        |a, con| {
            let mut neutral = true;
            for p in con.partitions() {
                neutral &= commutator(a, p, p).map_err(|e| json!({ "error": e.to_string() }))? == *p;
            }
            let sd = con.lattice().is_semidistributive(Side::Meet);
            Ok(json!({ "neutral": neutral, "meet_semidistributive": sd, "agree": neutral == sd }))
        },
    ));
    out.push(Check::new(
        "commutator/s3_series",
        "S3 has solvable series 1 > A3 > 0",
        |c, _| {
            let s3 = c.algebra("s3");
            let one = Partition::indiscrete(6);
            match crate::ua::solvable_series(s3, &one, 10) {
                Ok(series) => {
                    let ok = series.len() == 3
                        && series[1].block_count() == 2
                        && series[2] == Partition::discrete(6);
                    Outcome::new(ok, json!({ "series": series }))
                }
                Err(e) => err(e),
            }
        },
    ));
    out
}

fn embedding() -> Vec<Check> {
    let cases: [(&'static str, &'static str, usize, &'static str); 3] = [
        ("z2", "n2", 2, "m3"),
        ("z2", "n3", 3, "sub_3_2"),
        ("z3", "n2", 2, "m4"),
    ];
    let mut out: Vec<Check> = cases
        .into_iter()
        .map(|(alg, tag, n, expect)| {
            Check::new(
                format!("embedding/{alg}/{tag}"),
                "L_n = I[0, alpha-bar] in Con(A^n(alpha)) passes every structural check and is isomorphic to the expected subspace lattice",
                move |c, _| {
                    let a = c.algebra(alg);
                    let r = match verify_embedding_construction(a, &Partition::indiscrete(a.size()), n) {
                        Ok(r) => r,
                        Err(e) => return err(e),
                    };
                    let target = match expect {
                        "m4" => diamond(4),
                        name => c.lattice(name).clone(),
                    };
                    let iso = r.interval.isomorphism_from(&target).map(|h| h.map().to_vec());
                    Outcome::new(
                        r.passed() && iso.is_some(),
                        json!({ "report": r, "expected": expect, "isomorphism": iso }),
                    )
                },
            )
        })
        .collect();
    out.push(Check::new(
        "embedding/z2/delta",
        "Delta on Z2^2 is {{00,11},{01,10}} and complements both projection kernels",
        |c, _| match construct_delta(c.algebra("z2"), &Partition::indiscrete(2)) {
            Ok(r) => {
                let expected = Partition::from_labels(&[0, 1, 1, 0]);
                let ok = r.delta == expected && r.abelian && r.checks.iter().all(|k| k.passed);
                Outcome::new(ok, json!({ "delta": r.delta, "checks": r.checks }))
            }
            Err(e) => err(e),
        },
    ));
    out
}

fn kinf() -> Vec<Check> {
    [("m3", true), ("figure2_left", true), ("figure2_right", true), ("sub_3_2", false), ("n5", false)]
        .into_iter()
        .map(|(name, expected)| {
            Check::new(
                format!("kinf/{name}"),
                "membership in the class of finite modular 2-distributive lattices, with agreeing certificates",
                move |c, _| {
                    let r = k_infinity_member(c.lattice(name));
                    let certificates_agree = r.two_distributive_failure.is_some() == r.two_diamond.is_some();
                    Outcome::new(r.member == expected && certificates_agree, json!({ "expected": expected, "report": r }))
                },
            )
        })
        .collect()
}

/// Bell numbers from the Bell triangle.
fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 1..n {
        let mut next = vec![*row.last().expect("nonempty")];
        for &x in &row {
            next.push(next.last().expect("nonempty") + x);
        }
        row = next;
    }
    *row.last().expect("nonempty")
}

/// Number of subspaces of GF(q)^n from the Gaussian binomial product formula.
fn gaussian_total(n: u32, q: u64) -> u64 {
    (0..=n)
        .map(|k| {
            let (mut num, mut den) = (1u64, 1u64);
            for i in 0..k {
                num *= q.pow(n - i) - 1;
                den *= q.pow(i + 1) - 1;
            }
            num / den
        })
        .sum()
}

fn structure() -> Vec<Check> {
    let mut out: Vec<Check> = [(3usize, 5u64), (4, 15), (5, 52), (6, 203)]
        .into_iter()
        .map(|(n, expected)| {
            Check::new(format!("structure/bell/{n}"), "the partition lattice has Bell-number size", move |_, _| {
                let enumerated = all_partitions(n).len() as u64;
                let lattice = full_partition_lattice(n).map(|l| l.size() as u64);
                let ok = enumerated == expected && bell(n) == expected && lattice.ok() == Some(expected);
                Outcome::new(ok, json!({ "expected": expected, "enumerated": enumerated, "triangle": bell(n) }))
            })
        })
        .collect();
    for (dim, p, expected) in [(2usize, 2u32, 5u64), (3, 2, 16), (2, 3, 6), (4, 2, 67)] {
        out.push(Check::new(
            format!("structure/subspaces/{dim}_{p}"),
            "the subspace lattice has the Gaussian-binomial size",
            move |_, _| {
                let built = subspace_lattice(dim, p).map(|s| s.size() as u64);
                let formula = gaussian_total(dim as u32, p as u64);
                let ok = built.as_ref().ok() == Some(&expected) && formula == expected;
                Outcome::new(
                    ok,
                    json!({ "expected": expected, "built": built.ok(), "formula": formula }),
                )
            },
        ));
    }
    out
}
