//! Evaluation of terms and checking of (quasi-)identities.
//!
//! Exhaustive checks compile every side of the formula into one hash-consed
//! straight-line program. Nodes are sorted by the position of the last
//! variable they depend on, so when the odometer bumps variable `i` only the
//! nodes at level `>= i` are recomputed.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Identity, IdentityKind, QuasiIdentity, Term, TermError};
use crate::cap::DEFAULT_EVAL_BUDGET;
use crate::lattice::FiniteLattice;
use crate::partition::Partition;

/// Variable name to element. Iteration order is the enumeration order.
pub type Assignment<E = usize> = BTreeMap<Arc<str>, E>;

/// Anything with a join and a meet.
pub trait LatticeOps {
    type Elem: Clone + PartialEq;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
}

impl LatticeOps for FiniteLattice {
    type Elem = usize;
    fn join(&self, a: &usize, b: &usize) -> usize {
        FiniteLattice::join(self, *a, *b)
    }
    fn meet(&self, a: &usize, b: &usize) -> usize {
        FiniteLattice::meet(self, *a, *b)
    }
}

/// The lattice of all partitions of a fixed base set, without building it.
pub struct PartitionOps;

impl LatticeOps for PartitionOps {
    type Elem = Partition;
    fn join(&self, a: &Partition, b: &Partition) -> Partition {
        a.join(b)
    }
    fn meet(&self, a: &Partition, b: &Partition) -> Partition {
        a.meet(b)
    }
}

pub fn eval<L: LatticeOps + ?Sized>(
    l: &L,
    t: &Term,
    env: &Assignment<L::Elem>,
) -> Result<L::Elem, TermError> {
    Ok(match t {
        Term::Var(v) => env
            .get(v)
            .cloned()
            .ok_or_else(|| TermError::UnboundVariable(v.to_string()))?,
        Term::Join(a, b) => l.join(&eval(l, a, env)?, &eval(l, b, env)?),
        Term::Meet(a, b) => l.meet(&eval(l, a, env)?, &eval(l, b, env)?),
    })
}

impl Identity {
    /// Whether this identity holds at one assignment.
    pub fn holds_at<L: LatticeOps + ?Sized>(
        &self,
        l: &L,
        env: &Assignment<L::Elem>,
    ) -> Result<bool, TermError> {
        let s = eval(l, &self.lhs, env)?;
        let t = eval(l, &self.rhs, env)?;
        Ok(match self.kind {
            IdentityKind::Equation => s == t,
            IdentityKind::Inequation => l.join(&s, &t) == t,
        })
    }
}

impl QuasiIdentity {
    pub fn holds_at<L: LatticeOps + ?Sized>(
        &self,
        l: &L,
        env: &Assignment<L::Elem>,
    ) -> Result<bool, TermError> {
        for p in &self.premises {
            if !p.holds_at(l, env)? {
                return Ok(true);
            }
        }
        self.conclusion.holds_at(l, env)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Enumerate all `|L|^k` assignments, refusing if that exceeds `budget`.
    Exhaustive { budget: u64 },
    /// Draw `count` assignments from a ChaCha8 stream seeded with `seed`.
    Sampled { count: u64, seed: u64 },
}

impl CheckMode {
    pub fn exhaustive() -> Self {
        CheckMode::Exhaustive {
            budget: DEFAULT_EVAL_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Verdict {
    Holds,
    Fails { assignment: Assignment },
    SampledPass { samples: u64 },
}

impl Verdict {
    /// True for `Holds` and `SampledPass`.
    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Fails { .. })
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Var(u32),
    Join(u32, u32),
    Meet(u32, u32),
}

/// Several terms compiled into one incremental program over shared variables.
#[derive(Debug, Clone)]
pub struct CompiledTerms {
    vars: Vec<Arc<str>>,
    ops: Vec<Op>,
    /// `level_start[i]` is the first op depending on variable `i` or later.
    level_start: Vec<usize>,
    roots: Vec<usize>,
}

impl CompiledTerms {
    pub fn new(terms: &[&Term]) -> Self {
        let mut names = std::collections::BTreeSet::new();
        for t in terms {
            names.extend(t.variables());
        }
        let vars: Vec<Arc<str>> = names.into_iter().collect();
        let index: HashMap<&str, u32> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (&**v, i as u32))
            .collect();

        let mut b = Builder {
            index: &index,
            ops: Vec::new(),
            level: Vec::new(),
            seen: HashMap::new(),
        };
        let raw_roots: Vec<usize> = terms.iter().map(|t| b.add(t)).collect();

        // stable sort by level keeps children before parents
        let mut order: Vec<usize> = (0..b.ops.len()).collect();
        order.sort_by_key(|&i| b.level[i]);
        let mut new_index = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new as u32;
        }
        let ops = order
            .iter()
            .map(|&old| match b.ops[old] {
                Op::Var(v) => Op::Var(v),
                Op::Join(x, y) => Op::Join(new_index[x as usize], new_index[y as usize]),
                Op::Meet(x, y) => Op::Meet(new_index[x as usize], new_index[y as usize]),
            })
            .collect();
        let levels: Vec<u32> = order.iter().map(|&old| b.level[old]).collect();
        let level_start = (0..=vars.len())
            .map(|i| levels.partition_point(|&lv| (lv as usize) < i))
            .collect();
        let roots = raw_roots.iter().map(|&r| new_index[r] as usize).collect();
        Self {
            vars,
            ops,
            level_start,
            roots,
        }
    }

    pub fn variables(&self) -> &[Arc<str>] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Recomputes every node depending on variable `from` or later.
    #[inline]
    fn run(
        &self,
        join: &[u32],
        meet: &[u32],
        n: usize,
        assign: &[u32],
        vals: &mut [u32],
        from: usize,
    ) {
        for i in self.level_start[from]..self.ops.len() {
            vals[i] = match self.ops[i] {
                Op::Var(v) => assign[v as usize],
                Op::Join(a, b) => join[vals[a as usize] as usize * n + vals[b as usize] as usize],
                Op::Meet(a, b) => meet[vals[a as usize] as usize * n + vals[b as usize] as usize],
            };
        }
    }

    /// Values of all roots at one assignment (indexed like [`Self::variables`]).
    pub fn evaluate(&self, l: &FiniteLattice, assign: &[usize]) -> Vec<usize> {
        let a: Vec<u32> = assign.iter().map(|&x| x as u32).collect();
        let mut vals = vec![0u32; self.ops.len()];
        self.run(l.join_table(), l.meet_table(), l.size(), &a, &mut vals, 0);
        self.roots.iter().map(|&r| vals[r] as usize).collect()
    }

    fn to_assignment(&self, a: &[u32]) -> Assignment {
        self.vars
            .iter()
            .cloned()
            .zip(a.iter().map(|&x| x as usize))
            .collect()
    }

    /// First assignment (in enumeration order, or sample order) where `bad`
    /// fires on the root values, plus the number of assignments examined.
    fn search<F>(
        &self,
        l: &FiniteLattice,
        mode: CheckMode,
        bad: F,
    ) -> Result<(Option<Vec<u32>>, u64), TermError>
    where
        F: Fn(&[u32]) -> bool + Sync,
    {
        let n = l.size();
        let k = self.vars.len();
        let (join, meet) = (l.join_table(), l.meet_table());
        let check = |vals: &[u32], roots: &mut Vec<u32>| {
            roots.clear();
            roots.extend(self.roots.iter().map(|&r| vals[r]));
            bad(roots)
        };
        match mode {
            CheckMode::Exhaustive { budget } => {
                let needed = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
                if needed > budget as u128 {
                    return Err(TermError::BudgetExceeded { needed, budget });
                }
                // split on a prefix of the variables so rayon has work units
                let mut split = 0;
                let mut blocks: u64 = 1;
                while split < k && blocks < 256 {
                    blocks *= n as u64;
                    split += 1;
                }
                let found = (0..blocks).into_par_iter().find_map_first(|block| {
                    let mut a = vec![0u32; k];
                    let mut rest = block;
                    for i in (0..split).rev() {
                        a[i] = (rest % n as u64) as u32;
                        rest /= n as u64;
                    }
                    let mut vals = vec![0u32; self.ops.len()];
                    let mut roots = Vec::with_capacity(self.roots.len());
                    self.run(join, meet, n, &a, &mut vals, 0);
                    loop {
                        if check(&vals, &mut roots) {
                            return Some(a);
                        }
                        let mut i = k;
                        loop {
                            if i == split {
                                return None;
                            }
                            i -= 1;
                            a[i] += 1;
                            if (a[i] as usize) < n {
                                break;
                            }
                            a[i] = 0;
                        }
                        self.run(join, meet, n, &a, &mut vals, i);
                    }
                });
                Ok((found, needed as u64))
            }
            CheckMode::Sampled { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut a = vec![0u32; k];
                let mut vals = vec![0u32; self.ops.len()];
                let mut roots = Vec::with_capacity(self.roots.len());
                for done in 0..count {
                    for x in a.iter_mut() {
                        *x = rng.gen_range(0..n as u32);
                    }
                    self.run(join, meet, n, &a, &mut vals, 0);
                    if check(&vals, &mut roots) {
                        return Ok((Some(a), done + 1));
                    }
                }
                Ok((None, count))
            }
        }
    }
}

struct Builder<'a> {
    index: &'a HashMap<&'a str, u32>,
    ops: Vec<Op>,
    level: Vec<u32>,
    seen: HashMap<(u8, u32, u32), usize>,
}

impl Builder<'_> {
    fn add(&mut self, t: &Term) -> usize {
        let (key, level) = match t {
            Term::Var(v) => {
                let i = self.index[&**v];
                ((0, i, 0), i)
            }
            Term::Join(a, b) | Term::Meet(a, b) => {
                let (x, y) = (self.add(a) as u32, self.add(b) as u32);
                let tag = if matches!(t, Term::Join(..)) { 1 } else { 2 };
                (
                    (tag, x, y),
                    self.level[x as usize].max(self.level[y as usize]),
                )
            }
        };
        if let Some(&id) = self.seen.get(&key) {
            return id;
        }
        let op = match key {
            (0, i, _) => Op::Var(i),
            (1, x, y) => Op::Join(x, y),
            (_, x, y) => Op::Meet(x, y),
        };
        self.ops.push(op);
        self.level.push(level);
        self.seen.insert(key, self.ops.len() - 1);
        self.ops.len() - 1
    }
}

/// Identity truth from a pair of root values.
#[inline]
fn sides_agree(l: &FiniteLattice, kind: IdentityKind, s: u32, t: u32) -> bool {
    match kind {
        IdentityKind::Equation => s == t,
        IdentityKind::Inequation => l.leq(s as usize, t as usize),
    }
}

fn identity_terms<'a>(ids: &[&'a Identity]) -> Vec<&'a Term> {
    ids.iter().flat_map(|id| [&id.lhs, &id.rhs]).collect()
}

/// Checks a quasi-identity (an identity is one with no premises) in `l`.
pub fn check(
    l: &FiniteLattice,
    phi: &QuasiIdentity,
    mode: CheckMode,
) -> Result<Verdict, TermError> {
    let ids: Vec<&Identity> = phi
        .premises
        .iter()
        .chain(std::iter::once(&phi.conclusion))
        .collect();
    let kinds: Vec<IdentityKind> = ids.iter().map(|id| id.kind).collect();
    let prog = CompiledTerms::new(&identity_terms(&ids));
    let last = kinds.len() - 1;
    let (found, samples) = prog.search(l, mode, |r| {
        (0..last).all(|i| sides_agree(l, kinds[i], r[2 * i], r[2 * i + 1]))
            && !sides_agree(l, kinds[last], r[2 * last], r[2 * last + 1])
    })?;
    Ok(match (found, mode) {
        (Some(a), _) => Verdict::Fails {
            assignment: prog.to_assignment(&a),
        },
        (None, CheckMode::Exhaustive { .. }) => Verdict::Holds,
        (None, CheckMode::Sampled { .. }) => Verdict::SampledPass { samples },
    })
}

/// Result of comparing two identities assignment by assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub checked: u64,
    /// First assignment at which exactly one of the two holds.
    pub discrepancy: Option<Assignment>,
}

/// Compares the truth values of `a` and `b` at every assignment of their
/// joint variables.
pub fn compare_per_assignment(
    l: &FiniteLattice,
    a: &Identity,
    b: &Identity,
    mode: CheckMode,
) -> Result<Comparison, TermError> {
    let prog = CompiledTerms::new(&identity_terms(&[a, b]));
    let (ka, kb) = (a.kind, b.kind);
    let (found, checked) = prog.search(l, mode, |r| {
        sides_agree(l, ka, r[0], r[1]) != sides_agree(l, kb, r[2], r[3])
    })?;
    Ok(Comparison {
        checked,
        discrepancy: found.map(|a| prog.to_assignment(&a)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{boolean, chain, direct_product, m3, n5, LatticeHom, Side};
    use crate::term::{d_n, d_n_star, modular_law, parse_term, semidistributive, two_distributive};
    use proptest::prelude::*;

    fn env(pairs: &[(&str, usize)]) -> Assignment {
        pairs.iter().map(|&(k, v)| (Arc::from(k), v)).collect()
    }

    fn bare(id: Identity) -> QuasiIdentity {
        QuasiIdentity {
            premises: Vec::new(),
            conclusion: id,
        }
    }

    /// Plain recursive enumeration, sharing nothing with the compiled path.
    fn naive_first_failure(l: &FiniteLattice, q: &QuasiIdentity) -> Option<Assignment> {
        let vars: Vec<Arc<str>> = q.variables().into_iter().collect();
        let k = vars.len();
        let total = l.size().pow(k as u32);
        (0..total).find_map(|mut code| {
            let mut vals = vec![0; k];
            for i in (0..k).rev() {
                vals[i] = code % l.size();
                code /= l.size();
            }
            let e: Assignment = vars.iter().cloned().zip(vals).collect();
            (!q.holds_at(l, &e).unwrap()).then_some(e)
        })
    }

    #[test]
    fn join_on_a_chain() {
        let t = parse_term("x + y").unwrap();
        assert_eq!(eval(&chain(2), &t, &env(&[("x", 0), ("y", 1)])).unwrap(), 1);
    }

    #[test]
    fn meet_is_idempotent() {
        let t = parse_term("x*x").unwrap();
        let l = n5();
        for a in 0..l.size() {
            assert_eq!(eval(&l, &t, &env(&[("x", a)])).unwrap(), a);
        }
    }

    #[test]
    fn unbound_variable() {
        let t = parse_term("x + y").unwrap();
        assert_eq!(
            eval(&chain(2), &t, &env(&[("x", 0)])),
            Err(TermError::UnboundVariable("y".into()))
        );
    }

    #[test]
    fn modular_law_fails_in_n5_at_the_pentagon_triple() {
        let l = n5();
        let v = check(&l, &bare(modular_law()), CheckMode::exhaustive()).unwrap();
        let Verdict::Fails { assignment } = v else {
            panic!("N5 is not modular")
        };
        let labels: Vec<String> = assignment.values().map(|&x| l.label(x)).collect();
        assert_eq!(labels, ["a", "b", "c"]);
    }

    #[test]
    fn two_distributivity_holds_in_m3() {
        assert_eq!(
            check(&m3(), &bare(two_distributive()), CheckMode::exhaustive()).unwrap(),
            Verdict::Holds
        );
    }

    #[test]
    fn semidistributivity_on_chains_and_m3() {
        assert_eq!(
            check(
                &chain(4),
                &semidistributive(Side::Meet),
                CheckMode::exhaustive()
            )
            .unwrap(),
            Verdict::Holds
        );
        assert!(!check(
            &m3(),
            &semidistributive(Side::Join),
            CheckMode::exhaustive()
        )
        .unwrap()
        .passed());
    }

    #[test]
    fn compiled_check_matches_naive_enumeration() {
        let formulas = [
            bare(modular_law()),
            bare(two_distributive()),
            semidistributive(Side::Meet),
            semidistributive(Side::Join),
            bare(d_n_star(3).unwrap()),
        ];
        let lattices = [
            m3(),
            n5(),
            chain(3),
            boolean(2),
            direct_product(&n5(), &chain(2)).unwrap(),
        ];
        for l in &lattices {
            for q in &formulas {
                if l.size().pow(q.variables().len() as u32) > 2_000_000 {
                    continue;
                }
                let expected = match naive_first_failure(l, q) {
                    Some(assignment) => Verdict::Fails { assignment },
                    None => Verdict::Holds,
                };
                assert_eq!(
                    check(l, q, CheckMode::exhaustive()).unwrap(),
                    expected,
                    "{q}"
                );
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let q = bare(d_n(4).unwrap());
        let err = check(&m3(), &q, CheckMode::Exhaustive { budget: 1000 }).unwrap_err();
        assert_eq!(
            err,
            TermError::BudgetExceeded {
                needed: 390_625,
                budget: 1000
            }
        );
    }

    #[test]
    fn sampling_is_reproducible() {
        let l = direct_product(&m3(), &chain(2)).unwrap();
        let q = bare(d_n_star(3).unwrap());
        let mode = CheckMode::Sampled {
            count: 5000,
            seed: 7,
        };
        assert_eq!(
            check(&l, &q, mode).unwrap(),
            Verdict::SampledPass { samples: 5000 }
        );
        let sd = semidistributive(Side::Join);
        let a = check(
            &m3(),
            &sd,
            CheckMode::Sampled {
                count: 5000,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(
            a,
            check(
                &m3(),
                &sd,
                CheckMode::Sampled {
                    count: 5000,
                    seed: 3
                }
            )
            .unwrap()
        );
        assert!(!a.passed());
    }

    #[test]
    fn d3_and_d3_star_agree_in_m3() {
        let c = compare_per_assignment(
            &m3(),
            &d_n(3).unwrap(),
            &d_n_star(3).unwrap(),
            CheckMode::exhaustive(),
        )
        .unwrap();
        assert_eq!(
            c,
            Comparison {
                checked: 15_625,
                discrepancy: None
            }
        );
    }

    #[test]
    fn dn_star_forces_modularity() {
        // x0 -> x, x_i -> y+z, x_i' -> y*z turns (D_n*) into a law N5 violates
        let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));
        for n in [3, 4] {
            let id = d_n_star(n).unwrap();
            let sub = id.substitute(&|v: &str| {
                Some(match v {
                    "x0" => x.clone(),
                    _ if v.ends_with('\'') => y.clone().meet(z.clone()),
                    _ => y.clone().join(z.clone()),
                })
            });
            assert_eq!(sub.variables().len(), 3);
            assert!(!check(&n5(), &bare(sub.clone()), CheckMode::exhaustive())
                .unwrap()
                .passed());
            assert_eq!(
                check(&m3(), &bare(sub), CheckMode::exhaustive()).unwrap(),
                Verdict::Holds
            );
        }
    }

    #[test]
    fn hash_consing_shares_subterms() {
        let t = parse_term("(x+y)*(x+y) + (x+y)").unwrap();
        let p = CompiledTerms::new(&[&t]);
        // x, y, x+y, (x+y)*(x+y), top join
        assert_eq!(p.len(), 5);
        let l = chain(3);
        assert_eq!(p.evaluate(&l, &[1, 2]), vec![2]);
    }

    proptest! {
        #[test]
        fn evaluation_commutes_with_homomorphisms(vals in prop::collection::vec(0usize..10, 6)) {
            let base = m3();
            let prod = direct_product(&base, &chain(2)).unwrap();
            let proj = LatticeHom::new(&prod, &base, (0..10).map(|x| x / 2).collect()).unwrap();
            let id = d_n_star(3).unwrap();
            let names: Vec<Arc<str>> = id.variables().into_iter().collect();
            let e: Assignment = names.iter().cloned().zip(vals.iter().copied()).collect();
            let img: Assignment = names.iter().cloned().zip(vals.iter().map(|&v| proj.apply(v))).collect();
            for side in [&id.lhs, &id.rhs] {
                prop_assert_eq!(proj.apply(eval(&prod, side, &e).unwrap()), eval(&base, side, &img).unwrap());
            }
        }
    }
}
