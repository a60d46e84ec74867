//! One PASS/FAIL line per acceptance criterion. Each criterion combines the
//! relevant verify checks with an oracle computed here from first principles.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use congforge::fixtures::Corpus;
use congforge::lattice::{m3, FiniteLattice, LatticeHom};
use congforge::m3proj::{abx_check, m3_witness, M3Error};
use congforge::partition::{full_partition_lattice, random_permuting_instance, Partition};
use congforge::subspace::{k_infinity_member, subspace_lattice};
use congforge::term::{d_n, d_n_star, two_distributive, Identity, IdentityKind, Term};
use congforge::ua::{
    commutator, con_lattice, cyclic_group, group_product, verify_embedding_construction,
    FiniteAlgebra,
};
use congforge::verify::{run_suite, Suite, SuiteResult, VerifyConfig};

type Verdict = Result<String, String>;

struct Ctx {
    corpus: Corpus,
    all: SuiteResult,
}

impl Ctx {
    /// Every verify check whose id starts with `prefix` passed; returns how
    /// many there were.
    fn suite_ok(&self, prefix: &str) -> Result<usize, String> {
        let hits: Vec<_> = self
            .all
            .checks
            .iter()
            .filter(|c| c.id.starts_with(prefix))
            .collect();
        if hits.is_empty() {
            return Err(format!("no verify checks under {prefix}"));
        }
        match hits.iter().find(|c| !c.passed) {
            Some(c) => Err(format!(
                "{} failed: {}",
                c.id,
                c.witness.clone().unwrap_or_default()
            )),
            None => Ok(hits.len()),
        }
    }

    fn witness(&self, id: &str) -> Result<serde_json::Value, String> {
        self.all
            .check(id)
            .and_then(|c| c.witness.clone())
            .ok_or_else(|| format!("{id} has no witness"))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Plain recursive evaluation, sharing nothing with the library evaluator.
fn ev<E: Clone>(
    t: &Term,
    join: &dyn Fn(&E, &E) -> E,
    meet: &dyn Fn(&E, &E) -> E,
    env: &dyn Fn(&str) -> E,
) -> E {
    match t {
        Term::Var(v) => env(v),
        Term::Join(a, b) => join(&ev(a, join, meet, env), &ev(b, join, meet, env)),
        Term::Meet(a, b) => meet(&ev(a, join, meet, env), &ev(b, join, meet, env)),
    }
}

fn holds_in_lattice(l: &FiniteLattice, id: &Identity, env: &dyn Fn(&str) -> usize) -> bool {
    let j = |a: &usize, b: &usize| l.join(*a, *b);
    let m = |a: &usize, b: &usize| l.meet(*a, *b);
    let (s, t) = (ev(&id.lhs, &j, &m, env), ev(&id.rhs, &j, &m, env));
    match id.kind {
        IdentityKind::Equation => s == t,
        IdentityKind::Inequation => l.leq(s, t),
    }
}

fn var_index(v: &str) -> usize {
    let digits: String = v.chars().filter(char::is_ascii_digit).collect();
    let i: usize = digits.parse().expect("indexed variable");
    2 * i + usize::from(v.ends_with('\''))
}

fn c1_identity_agreement(cx: &Ctx) -> Verdict {
    cx.suite_ok("idequiv/")?;
    let mut total_ms = 0.0;
    for (name, sampled) in [
        ("m3", false),
        ("m3x2", false),
        ("sub_2_2", false),
        ("sub_3_2", true),
    ] {
        let size = cx.corpus.lattice(name).size() as u64;
        for n in [3u32, 4] {
            let id = format!("idequiv/{name}/n{n}");
            let w = cx.witness(&id)?;
            let want = if sampled { 1_000_000 } else { size.pow(2 * n) };
            ensure(w["checked"] == want, || {
                format!("{id} checked {} assignments, expected {want}", w["checked"])
            })?;
            total_ms += cx.all.check(&id).map_or(0.0, |c| c.elapsed_ms);
        }
    }
    ensure(total_ms <= 300_000.0, || format!("took {total_ms:.0} ms"))?;

    // Independent spot check with a separate evaluator.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["m3x2", "sub_3_2"] {
        let l = cx.corpus.lattice(name);
        for n in [3usize, 4] {
            let (a, b) = (d_n(n).unwrap(), d_n_star(n).unwrap());
            for _ in 0..20_000 {
                let vals: Vec<usize> = (0..2 * n).map(|_| rng.gen_range(0..l.size())).collect();
                let env = |v: &str| vals[var_index(v)];
                ensure(
                    holds_in_lattice(l, &a, &env) == holds_in_lattice(l, &b, &env),
                    || format!("{name} n={n}: D_n and D_n* disagree at {vals:?}"),
                )?;
            }
        }
    }
    Ok(format!(
        "exhaustive on m3, m3x2, sub_2_2; 1e6 samples on sub_3_2; {:.1} s",
        total_ms / 1e3
    ))
}

fn permute(a: &Partition, b: &Partition) -> bool {
    let n = a.base_size();
    // a∘b ⊆ b∘a, checked pointwise; symmetric relations make this enough.
    (0..n).all(|x| {
        (0..n).all(|z| {
            let ab = (0..n).any(|y| a.related(x, y) && b.related(y, z));
            let ba = (0..n).any(|y| b.related(x, y) && a.related(y, z));
            ab == ba
        })
    })
}

fn c2_dn_permuting(cx: &Ctx) -> Verdict {
    cx.suite_ok("dnperm/")?;
    let w = cx.witness("dnperm/coset_families")?;
    ensure(w["instances"] == 10_000 && w["failures"] == 0, || {
        format!("dnperm witness {w}")
    })?;
    for n in ["3", "4", "5"] {
        ensure(w["per_n"][n].as_u64().unwrap_or(0) > 0, || {
            format!("no instances with n={n}")
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..300 {
        let n = rng.gen_range(3..=5);
        let (xs, ps) = random_permuting_instance(&mut rng, n);
        for i in 0..n {
            ensure(permute(&xs[i], &ps[i]), || {
                format!("pair {i} does not permute")
            })?;
        }
        let q = d_n_star(n).unwrap();
        let env = |v: &str| {
            let i = var_index(v);
            if i.is_multiple_of(2) {
                xs[i / 2].clone()
            } else {
                ps[i / 2].clone()
            }
        };
        let j = |a: &Partition, b: &Partition| a.join(b);
        let m = |a: &Partition, b: &Partition| a.meet(b);
        let (s, t) = (ev(&q.lhs, &j, &m, &env), ev(&q.rhs, &j, &m, &env));
        ensure(s.leq(&t), || format!("D_{n}* fails on a permuting family"))?;
    }
    Ok("10000 instances, n in {3,4,5}".into())
}

/// Counts qualifying tuples and sides that disagree.
fn abx_brute(l: &FiniteLattice) -> (usize, usize) {
    let n = l.size();
    let (mut q, mut bad) = (0, 0);
    for x in 0..n {
        for xp in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if !l.leq(l.meet(x, xp), b) || !l.leq(a, l.join(x, xp)) {
                        continue;
                    }
                    q += 1;
                    let left = l.leq(a, l.join(xp, l.meet(x, b)));
                    let right = l.leq(l.meet(x, l.join(xp, a)), b);
                    bad += usize::from(left != right);
                }
            }
        }
    }
    (q, bad)
}

fn c3_abx(cx: &Ctx) -> Verdict {
    cx.suite_ok("abx/")?;
    for name in ["m3", "sub_2_2", "sub_3_2", "m3x2"] {
        let l = cx.corpus.lattice(name);
        let v = abx_check(l).map_err(|e| e.to_string())?;
        let (q, bad) = abx_brute(l);
        ensure(v.holds() && bad == 0 && v.qualifying == q as u64, || {
            format!(
                "{name}: library {} tuples, brute force {q} with {bad} failures",
                v.qualifying
            )
        })?;
    }
    ensure(
        matches!(
            abx_check(cx.corpus.lattice("n5")),
            Err(M3Error::NotModular(..))
        ),
        || "N5 not rejected".into(),
    )?;
    Ok("m3, sub_2_2, sub_3_2, m3x2".into())
}

fn mul(g: &FiniteAlgebra, x: usize, y: usize) -> usize {
    g.op("mul").expect("group").apply(g.size(), &[x, y])
}

/// Cosets of the subgroup generated by all group commutators.
fn derived_cosets(g: &FiniteAlgebra) -> Partition {
    let n = g.size();
    let e = (0..n)
        .find(|&e| (0..n).all(|x| mul(g, e, x) == x))
        .expect("identity");
    let inv = |x: usize| (0..n).find(|&y| mul(g, x, y) == e).expect("inverse");
    let mut h: BTreeSet<usize> = BTreeSet::from([e]);
    for x in 0..n {
        for y in 0..n {
            h.insert(mul(g, mul(g, inv(x), inv(y)), mul(g, x, y)));
        }
    }
    loop {
        let next: BTreeSet<usize> = h
            .iter()
            .flat_map(|&a| h.iter().map(move |&b| (a, b)))
            .map(|(a, b)| mul(g, a, b))
            .collect();
        if next == h {
            break;
        }
        h = next;
    }
    Partition::from_labels(
        &(0..n)
            .map(|x| h.iter().map(|&k| mul(g, x, k)).min().unwrap())
            .collect::<Vec<_>>(),
    )
}

fn c4_group_commutator(cx: &Ctx) -> Verdict {
    cx.suite_ok("commutator/")?;
    for name in ["z2", "z3", "z4", "z2z2", "s3"] {
        let g = cx.corpus.algebra(name);
        let top = Partition::indiscrete(g.size());
        let c = commutator(g, &top, &top).map_err(|e| e.to_string())?;
        let want = derived_cosets(g);
        ensure(c == want, || {
            format!("{name}: [1,1] = {c}, derived cosets {want}")
        })?;
    }
    Ok("Z2, Z3, Z4, Z2xZ2, S3".into())
}

fn c5_m3_atoms(cx: &Ctx) -> Verdict {
    cx.suite_ok("commutator/")?;
    let (z2, z3) = (cyclic_group(2), cyclic_group(3));
    let mut algebras: Vec<(String, FiniteAlgebra)> =
        cx.corpus.algebras.clone().into_iter().collect();
    algebras.push(("z2^3".into(), group_product(&group_product(&z2, &z2), &z2)));
    algebras.push(("z3^2".into(), group_product(&z3, &z3)));
    algebras.push((
        "bare set of 3".into(),
        FiniteAlgebra::new(3, Vec::new()).map_err(|e| e.to_string())?,
    ));
    let mut copies = 0;
    for (name, a) in &algebras {
        let con = con_lattice(a).map_err(|e| e.to_string())?;
        let (l, ps) = (con.lattice(), con.partitions());
        let has_wdt = a.op("mul").is_some() || a.op("maj").is_some();
        let k = l.size();
        for d in 0..k {
            for x in 0..k {
                for y in x + 1..k {
                    for z in y + 1..k {
                        let [xy, xz, yz] =
                            [(x, y), (x, z), (y, z)].map(|(p, q)| (l.meet(p, q), l.join(p, q)));
                        let top = xy.1;
                        if [x, y, z].contains(&d) || [xy, xz, yz].iter().any(|&m| m != (d, top)) {
                            continue;
                        }
                        copies += 1;
                        for (p, q) in [(x, y), (x, z), (y, z)] {
                            let c = commutator(a, &ps[p], &ps[q]).map_err(|e| e.to_string())?;
                            ensure(c.leq(&ps[d]), || {
                                format!("{name}: [{}, {}] = {c} above {}", ps[p], ps[q], ps[d])
                            })?;
                            ensure(!has_wdt || permute(&ps[p], &ps[q]), || {
                                format!("{name}: atoms {p}, {q} do not permute")
                            })?;
                        }
                    }
                }
            }
        }
    }
    ensure(copies > 0, || {
        "no M3 found in any congruence lattice".into()
    })?;
    Ok(format!(
        "{copies} M3 copies across {} algebras",
        algebras.len()
    ))
}

fn c6_embedding(cx: &Ctx) -> Verdict {
    cx.suite_ok("embedding/")?;
    for (name, n, p, profile) in [
        ("z2", 2, 2, vec![1, 3, 1]),
        ("z2", 3, 2, vec![1, 7, 7, 1]),
        ("z3", 2, 3, vec![1, 4, 1]),
    ] {
        let a = cx.corpus.algebra(name);
        let r = verify_embedding_construction(a, &Partition::indiscrete(a.size()), n)
            .map_err(|e| e.to_string())?;
        ensure(r.passed(), || {
            format!("{name} n={n}: construction checks failed")
        })?;
        let mut got = vec![0; r.interval.length() + 1];
        for h in r.interval.heights() {
            got[h] += 1;
        }
        ensure(got == profile, || {
            format!("{name} n={n}: rank profile {got:?}, expected {profile:?}")
        })?;
        let sub = subspace_lattice(n, p).map_err(|e| e.to_string())?;
        ensure(r.interval.isomorphism_from(sub.lattice()).is_some(), || {
            format!("{name} n={n}: not Sub({n},{p})")
        })?;
    }
    Ok("Z2: L_2 = M3, L_3 = Sub(3,2); Z3: L_2 = M4".into())
}

fn c7_kinf(cx: &Ctx) -> Verdict {
    cx.suite_ok("kinf/")?;
    for name in ["m3", "figure2_left", "figure2_right"] {
        let r = k_infinity_member(cx.corpus.lattice(name));
        ensure(r.member, || format!("{name} should be in K_infinity"))?;
    }
    let l = cx.corpus.lattice("sub_3_2");
    let r = k_infinity_member(l);
    ensure(r.modular && !r.member, || {
        "sub_3_2 should be modular and outside K_infinity".into()
    })?;
    let asg = r
        .two_distributive_failure
        .as_ref()
        .ok_or("no 2-distributivity witness")?;
    let env = |v: &str| asg[v];
    ensure(!holds_in_lattice(l, &two_distributive(), &env), || {
        "2-distributivity witness does not fail".into()
    })?;
    let d = r.two_diamond.as_ref().ok_or("no 2-diamond witness")?;
    let e = d.elements;
    for tri in [
        [e[0], e[1], e[2]],
        [e[0], e[1], e[3]],
        [e[0], e[2], e[3]],
        [e[1], e[2], e[3]],
    ] {
        for i in 0..3 {
            let rest = l.join(tri[(i + 1) % 3], tri[(i + 2) % 3]);
            ensure(l.meet(tri[i], rest) == d.bottom, || {
                format!("2-diamond triple {tri:?} is not independent")
            })?;
        }
        ensure(l.join_all(tri) == d.top, || {
            format!("2-diamond triple {tri:?} misses the top")
        })?;
    }
    let n5 = k_infinity_member(cx.corpus.lattice("n5"));
    let (a, b, c) = n5
        .modular_counterexample
        .ok_or("no modularity witness for N5")?;
    let l = cx.corpus.lattice("n5");
    ensure(
        !n5.member && l.leq(a, c) && l.join(a, l.meet(b, c)) != l.meet(l.join(a, b), c),
        || "N5 witness is not a modular-law failure".into(),
    )?;
    Ok("in: m3, figure2_left, figure2_right; out: sub_3_2, n5".into())
}

fn c8_m3proj(cx: &Ctx) -> Verdict {
    cx.suite_ok("m3proj/")?;
    let target = m3();
    for name in [
        "m3",
        "m3x2",
        "pi3",
        "sub_2_2",
        "sub_3_2",
        "figure2_left",
        "figure2_right",
    ] {
        ensure(cx.all.check(&format!("m3proj/{name}")).is_some(), || {
            format!("m3proj/{name} missing")
        })?;
    }
    ensure(cx.all.check("m3proj/con_z2z2").is_some(), || {
        "con_z2z2 missing".into()
    })?;

    // Identity on M3: the witness is the lattice itself.
    let l = cx.corpus.lattice("m3");
    let [a, b, c] = [0, 1, 2].map(|i| l.atoms()[i]);
    let r = m3_witness(&LatticeHom::identity(l), a, b, c).map_err(|e| e.to_string())?;
    ensure(
        r.success() && r.sublattice() == Some([l.bottom(), a, b, c, l.top()]),
        || "identity on M3".into(),
    )?;

    let hom = cx.corpus.failure_hom(&target).map_err(|e| e.to_string())?;
    let [p, q, s] = cx.corpus.failure.preimages;
    let r = m3_witness(&hom, p, q, s).map_err(|e| e.to_string())?;
    ensure(r.failed_stage == Some("verify"), || {
        format!("failure fixture stopped at {:?}", r.failed_stage)
    })?;
    for st in &r.stages {
        if st.stage == "verify" {
            continue;
        }
        let images: Vec<usize> = st.triple.iter().map(|&x| hom.apply(x)).collect();
        let want: Vec<usize> = [p, q, s].iter().map(|&x| hom.apply(x)).collect();
        ensure(images == want, || {
            format!("stage {} moved images to {images:?}", st.stage)
        })?;
    }
    Ok("modular fixtures and Con(Z2xZ2) succeed; failure fixture fails at verify".into())
}

fn c9_counts(_: &Ctx) -> Verdict {
    for (n, bell) in [(3, 5), (4, 15), (5, 52), (6, 203)] {
        let got = full_partition_lattice(n).map_err(|e| e.to_string())?.size();
        ensure(got == bell, || {
            format!("Pi_{n} has {got} elements, expected {bell}")
        })?;
    }
    for (dim, p, count) in [(2, 2, 5), (3, 2, 16), (2, 3, 6), (4, 2, 67)] {
        let got = subspace_lattice(dim, p).map_err(|e| e.to_string())?.size();
        ensure(got == count, || {
            format!("Sub({dim},{p}) has {got} elements, expected {count}")
        })?;
    }
    Ok("Bell 5/15/52/203; subspaces 5/16/6/67".into())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let corpus = Corpus::embedded();
    let all = run_suite(Suite::All, &corpus, &VerifyConfig::default());
    let cx = Ctx { corpus, all };
    let criteria: [(&str, fn(&Ctx) -> Verdict); 9] = [
        ("identity-agreement", c1_identity_agreement),
        ("dn-permuting", c2_dn_permuting),
        ("abx", c3_abx),
        ("group-commutator", c4_group_commutator),
        ("m3-atoms", c5_m3_atoms),
        ("embedding", c6_embedding),
        ("k-infinity", c7_kinf),
        ("m3-projectivity", c8_m3proj),
        ("counts", c9_counts),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f(&cx) {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    println!(
        "{} of 9 criteria passed in {:.1} s",
        9 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
