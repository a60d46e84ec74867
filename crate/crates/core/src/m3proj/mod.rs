//! Pulling a copy of `M3` back along a lattice homomorphism onto `M3`.
//!
//! Given preimages of the three atoms, the pipeline stabilizes the pair
//! `(beta, gamma)`, adjusts `alpha`, and applies the two "priming" steps.
//! Every intermediate element is mapped back to check that its image stays
//! on the right atom.

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{FiniteLattice, LatticeHom};
use crate::ua::beta_gamma_iteration;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum M3Error {
    #[error("homomorphism is not onto its target")]
    NotSurjective,
    #[error("target is not isomorphic to M3")]
    TargetNotM3,
    #[error("image mismatch: {0}")]
    ImageMismatch(String),
    #[error("lattice is not modular: ({0}, {1}, {2}) violates the modular law")]
    NotModular(usize, usize, usize),
}

pub const STAGES: [&str; 5] = [
    "stabilize",
    "adjoin_meet",
    "prime",
    "double_prime",
    "verify",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    pub ok: bool,
    pub triple: [usize; 3],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct M3WitnessReport {
    pub input: [usize; 3],
    /// The atoms `a, b, c` of the target that the triple maps to.
    pub atoms: [usize; 3],
    pub m: usize,
    pub beta_trace: Vec<usize>,
    pub gamma_trace: Vec<usize>,
    pub adjusted: [usize; 3],
    pub primed: [usize; 3],
    pub double_primed: [usize; 3],
    /// Whether `I[(alpha /\ beta) \/ (alpha /\ gamma), beta \/ gamma]` is
    /// modular, for the adjusted triple.
    pub interval_modular: bool,
    pub stages: Vec<StageReport>,
    pub failed_stage: Option<&'static str>,
    /// `(bottom, top)` of the copy of `M3` on success.
    pub bounds: Option<(usize, usize)>,
}

impl M3WitnessReport {
    pub fn success(&self) -> bool {
        self.failed_stage.is_none()
    }

    /// The five elements `0', alpha'', beta'', gamma'', 1'` on success.
    pub fn sublattice(&self) -> Option<[usize; 5]> {
        let (lo, hi) = self.bounds?;
        let [a, b, c] = self.double_primed;
        Some([lo, a, b, c, hi])
    }
}

fn is_m3(l: &FiniteLattice) -> bool {
    let atoms = l.atoms();
    l.size() == 5 && atoms.len() == 3 && atoms.iter().all(|&a| l.is_cover(a, l.top()))
}

/// Runs the five stages. Failures of a stage are recorded in the report;
/// only malformed inputs are errors.
pub fn m3_witness(
    hom: &LatticeHom<'_>,
    alpha: usize,
    beta: usize,
    gamma: usize,
) -> Result<M3WitnessReport, M3Error> {
    let (l, t) = (hom.source(), hom.target());
    if !is_m3(t) {
        return Err(M3Error::TargetNotM3);
    }
    if !hom.is_surjective() {
        return Err(M3Error::NotSurjective);
    }
    let input = [alpha, beta, gamma];
    let atoms = input.map(|x| hom.apply(x));
    let target_atoms = t.atoms();
    if !atoms.iter().all(|a| target_atoms.contains(a))
        || atoms[0] == atoms[1]
        || atoms[1] == atoms[2]
        || atoms[0] == atoms[2]
    {
        return Err(M3Error::ImageMismatch(format!(
            "images {atoms:?} are not three distinct atoms"
        )));
    }
    let mut stages = Vec::new();
    let mut failed = None;
    let names = ["alpha", "beta", "gamma"];
    let image_violations = |triple: [usize; 3]| -> Vec<String> {
        (0..3)
            .filter(|&i| hom.apply(triple[i]) != atoms[i])
            .map(|i| {
                format!(
                    "{} maps to {} instead of {}",
                    names[i],
                    t.label(hom.apply(triple[i])),
                    t.label(atoms[i])
                )
            })
            .collect()
    };
    let mut record = |stage: &'static str,
                      triple: [usize; 3],
                      mut violations: Vec<String>,
                      stages: &mut Vec<StageReport>| {
        violations.extend(image_violations(triple));
        let ok = violations.is_empty();
        if !ok && failed.is_none() {
            failed = Some(stage);
        }
        stages.push(StageReport {
            stage,
            ok,
            triple,
            violations,
        });
    };

    // stabilize
    let bg = beta_gamma_iteration(l, alpha, beta, gamma, l.size() + 1);
    let (m, beta_trace, gamma_trace) = (bg.m, bg.beta, bg.gamma);
    let (bm, gm) = (beta_trace[m], gamma_trace[m]);
    let mut v = Vec::new();
    for (k, (&b, &g)) in beta_trace.iter().zip(&gamma_trace).enumerate() {
        if hom.apply(b) != atoms[1] || hom.apply(g) != atoms[2] {
            v.push(format!("step {k} leaves the preimages of b and c"));
        }
    }
    if l.join(alpha, bm) != l.join(alpha, gm) {
        v.push("alpha \\/ beta^m != alpha \\/ gamma^m".into());
    }
    record(STAGES[0], [alpha, bm, gm], v, &mut stages);

    // adjoin_meet
    let a1 = l.join(alpha, l.meet(bm, gm));
    let (b1, g1) = (bm, gm);
    let mut v = Vec::new();
    if !l.leq(l.meet(b1, g1), a1) {
        v.push("beta /\\ gamma not below alpha".into());
    }
    if l.join(a1, b1) != l.join(a1, g1) {
        v.push("alpha \\/ beta != alpha \\/ gamma".into());
    }
    let adjusted = [a1, b1, g1];
    record(STAGES[1], adjusted, v, &mut stages);

    // prime
    let lo = l.join(l.meet(a1, b1), l.meet(a1, g1));
    let hi = l.join(b1, g1);
    let interval_modular = l.leq(lo, hi)
        && l.interval(lo, hi)
            .map(|(i, _)| i.is_modular())
            .unwrap_or(false);
    let primed = [
        l.meet(a1, hi),
        l.join(b1, l.meet(a1, g1)),
        l.join(g1, l.meet(a1, b1)),
    ];
    record(STAGES[2], primed, Vec::new(), &mut stages);

    // double_prime
    let [ap, bp, gp] = primed;
    let double_primed = [
        l.join(ap, l.meet(bp, gp)),
        l.meet(bp, l.join(ap, gp)),
        l.meet(gp, l.join(ap, bp)),
    ];
    record(STAGES[3], double_primed, Vec::new(), &mut stages);

    // verify
    let [x, y, z] = double_primed;
    let meets = [l.meet(x, y), l.meet(x, z), l.meet(y, z)];
    let joins = [l.join(x, y), l.join(x, z), l.join(y, z)];
    let mut v = Vec::new();
    if meets.iter().any(|&e| e != meets[0]) {
        v.push(format!("pairwise meets differ: {meets:?}"));
    }
    if joins.iter().any(|&e| e != joins[0]) {
        v.push(format!("pairwise joins differ: {joins:?}"));
    }
    let five = [meets[0], x, y, z, joins[0]];
    let distinct = (0..5).all(|i| (i + 1..5).all(|j| five[i] != five[j]));
    if !distinct {
        v.push(format!("elements {five:?} are not distinct"));
    }
    record(STAGES[4], double_primed, v, &mut stages);

    let bounds = failed.is_none().then_some((meets[0], joins[0]));
    Ok(M3WitnessReport {
        input,
        atoms,
        m,
        beta_trace,
        gamma_trace,
        adjusted,
        primed,
        double_primed,
        interval_modular,
        stages,
        failed_stage: failed,
        bounds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbxVerdict {
    /// Number of qualifying 4-tuples examined.
    pub qualifying: u64,
    /// `(x0, x0', A, B)` where the two sides disagree.
    pub counterexample: Option<[usize; 4]>,
}

impl AbxVerdict {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// For all `x0, x0', A, B` with `x0 /\ x0' <= B` and `A <= x0 \/ x0'`:
/// `A <= x0' \/ (x0 /\ B)` iff `x0 /\ (x0' \/ A) <= B`.
pub fn abx_check(l: &FiniteLattice) -> Result<AbxVerdict, M3Error> {
    if let Some((x, y, z)) = l.modularity_counterexample() {
        return Err(M3Error::NotModular(x, y, z));
    }
    Ok(abx_scan(l))
}

/// The same scan without the modularity gate.
pub fn abx_scan(l: &FiniteLattice) -> AbxVerdict {
    let n = l.size();
    let mut qualifying = 0;
    for x in 0..n {
        for xp in 0..n {
            let (lo, hi) = (l.meet(x, xp), l.join(x, xp));
            for a in (0..n).filter(|&a| l.leq(a, hi)) {
                for b in (0..n).filter(|&b| l.leq(lo, b)) {
                    qualifying += 1;
                    let left = l.leq(a, l.join(xp, l.meet(x, b)));
                    let right = l.leq(l.meet(x, l.join(xp, a)), b);
                    if left != right {
                        return AbxVerdict {
                            qualifying,
                            counterexample: Some([x, xp, a, b]),
                        };
                    }
                }
            }
        }
    }
    AbxVerdict {
        qualifying,
        counterexample: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{chain, direct_product, m3, n5};

    #[test]
    fn identity_on_m3() {
        let l = m3();
        let h = LatticeHom::identity(&l);
        let r = m3_witness(&h, 1, 2, 3).unwrap();
        assert!(r.success());
        assert_eq!(r.m, 0);
        assert_eq!(r.double_primed, [1, 2, 3]);
        assert_eq!(r.sublattice(), Some([0, 1, 2, 3, 4]));
        let names: Vec<_> = r.stages.iter().map(|s| s.stage).collect();
        assert_eq!(names, STAGES);
    }

    #[test]
    fn m3_times_two_by_hand() {
        let (m, two) = (m3(), chain(2));
        let l = direct_product(&m, &two).unwrap();
        let e = |x: usize, y: usize| x * 2 + y;
        let h = LatticeHom::new(&l, &m, (0..10).map(|x| x / 2).collect()).unwrap();
        let r = m3_witness(&h, e(1, 1), e(2, 0), e(3, 1)).unwrap();
        assert!(r.success(), "{r:?}");
        assert_eq!(r.m, 0);
        assert_eq!(r.adjusted, [e(1, 1), e(2, 0), e(3, 1)]);
        assert_eq!(r.primed, [e(1, 1), e(2, 1), e(3, 1)]);
        assert_eq!(r.double_primed, [e(1, 1), e(2, 1), e(3, 1)]);
        assert_eq!(r.bounds, Some((e(0, 1), e(4, 1))));
        assert!(r.interval_modular);
    }

    #[test]
    fn bad_inputs() {
        let l = m3();
        let h = LatticeHom::identity(&l);
        assert!(matches!(
            m3_witness(&h, 1, 1, 3),
            Err(M3Error::ImageMismatch(_))
        ));
        assert!(matches!(
            m3_witness(&h, 0, 2, 3),
            Err(M3Error::ImageMismatch(_))
        ));
        let two = chain(2);
        let into = LatticeHom::new(&two, &l, vec![0, 4]).unwrap();
        assert!(matches!(
            m3_witness(&into, 0, 1, 1),
            Err(M3Error::NotSurjective)
        ));
        let n = n5();
        assert!(matches!(
            m3_witness(&LatticeHom::identity(&n), 1, 2, 3),
            Err(M3Error::TargetNotM3)
        ));
    }

    /// Oracle: qualifying tuples counted from the definition alone.
    #[test]
    fn abx_on_small_modular_lattices() {
        for l in [m3(), chain(3), direct_product(&m3(), &chain(2)).unwrap()] {
            let v = abx_check(&l).unwrap();
            assert!(v.holds());
            let n = l.size();
            let mut count = 0u64;
            for x in 0..n {
                for y in 0..n {
                    for a in 0..n {
                        for b in 0..n {
                            if l.leq(l.meet(x, y), b) && l.leq(a, l.join(x, y)) {
                                count += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(v.qualifying, count);
        }
    }

    #[test]
    fn abx_needs_modularity() {
        assert!(matches!(abx_check(&n5()), Err(M3Error::NotModular(..))));
        // and the biconditional really does break there
        assert!(!abx_scan(&n5()).holds());
    }
}
