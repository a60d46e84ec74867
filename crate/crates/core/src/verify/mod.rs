//! Corpus-wide verification suites with a JSON report.

mod suites;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::cap::DEFAULT_EVAL_BUDGET;
use crate::fixtures::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Idequiv,
    Dnperm,
    Abx,
    M3proj,
    Commutator,
    Embedding,
    Kinf,
    Structure,
}

impl Suite {
    pub const NAMES: [&'static str; 9] = [
        "all",
        "idequiv",
        "dnperm",
        "abx",
        "m3proj",
        "commutator",
        "embedding",
        "kinf",
        "structure",
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Idequiv,
                Suite::Dnperm,
                Suite::Abx,
                Suite::M3proj,
                Suite::Commutator,
                Suite::Embedding,
                Suite::Kinf,
                Suite::Structure,
            ],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        const ALL: [Suite; 9] = [
            Suite::All,
            Suite::Idequiv,
            Suite::Dnperm,
            Suite::Abx,
            Suite::M3proj,
            Suite::Commutator,
            Suite::Embedding,
            Suite::Kinf,
            Suite::Structure,
        ];
        ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            format!(
                "unknown suite `{s}`; expected one of {}",
                Self::NAMES.join(", ")
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Evaluation budget for each exhaustive identity check.
    pub budget: u64,
    /// Samples for identity checks too large to enumerate.
    pub samples: u64,
    /// Random permuting families drawn by the `dnperm` suite.
    pub instances: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            budget: DEFAULT_EVAL_BUDGET,
            samples: 1_000_000,
            instances: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    /// The property the check establishes, in words.
    pub property: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub seed: u64,
    pub budget: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteResult {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }
}

pub(crate) struct Outcome {
    passed: bool,
    witness: Option<Value>,
}

impl Outcome {
    pub(crate) fn new(passed: bool, witness: Value) -> Self {
        Self {
            passed,
            witness: Some(witness),
        }
    }

    pub(crate) fn fail(witness: Value) -> Self {
        Self::new(false, witness)
    }
}

type Runner = Box<dyn Fn(&Corpus, &VerifyConfig) -> Outcome + Send + Sync>;

pub(crate) struct Check {
    id: String,
    property: &'static str,
    run: Runner,
}

impl Check {
    pub(crate) fn new(
        id: impl Into<String>,
        property: &'static str,
        run: impl Fn(&Corpus, &VerifyConfig) -> Outcome + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            property,
            run: Box::new(run),
        }
    }
}

/// Runs every check of `suite` over `corpus`. Checks run in parallel; the
/// report lists them sorted by id.
pub fn run_suite(suite: Suite, corpus: &Corpus, cfg: &VerifyConfig) -> SuiteResult {
    let checks: Vec<Check> = suite
        .members()
        .into_iter()
        .flat_map(suites::checks)
        .collect();
    let mut results: Vec<CheckResult> = checks
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let out = (c.run)(corpus, cfg);
            let witness = match (out.passed, out.witness) {
                (false, None) => Some(Value::String("no witness recorded".into())),
                (_, w) => w,
            };
            CheckResult {
                id: c.id.clone(),
                property: c.property.to_string(),
                passed: out.passed,
                witness,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    debug_assert!(
        results.windows(2).all(|w| w[0].id != w[1].id),
        "check ids are unique"
    );
    SuiteResult {
        suite: suite.name().to_string(),
        seed: cfg.seed,
        budget: cfg.budget,
        passed: results.iter().all(|r| r.passed),
        checks: results,
    }
}
