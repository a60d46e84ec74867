use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use congforge::cap::DEFAULT_EVAL_BUDGET;
use congforge::fixtures::Corpus;
use congforge::lattice::{chain, diamond, direct_product, m3, n5, FiniteLattice};
use congforge::partition::{full_partition_lattice, Partition};
use congforge::subspace::subspace_lattice;
use congforge::term::{builtin, check, parse, CheckMode, Verdict, BUILTIN_NAMES};
use congforge::ua::{
    check_weak_difference_term, commutator, con_lattice, is_congruence, principal_congruence,
    verify_embedding_construction, FiniteAlgebra, TermExpr,
};
use congforge::verify::{run_suite, Suite, VerifyConfig};

/// Finite lattices, identities and congruence computations.
#[derive(Parser)]
#[command(name = "congforge", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Machine-readable output (the default).
    #[arg(long, global = true, conflicts_with = "human")]
    json: bool,
    /// Short human-readable summary instead of JSON.
    #[arg(long, global = true)]
    human: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check an identity or quasi-identity in a lattice. Exit 0 if it
    /// holds, 1 if it fails.
    Check(CheckArgs),
    /// Print a standard lattice as JSON.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Congruence computations on a finite algebra.
    Alg {
        algebra: PathBuf,
        #[command(subcommand)]
        action: AlgCmd,
    },
    /// Run a verification suite over the fixture corpus. Exit 0 iff every
    /// check passes.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CheckArgs {
    lattice: PathBuf,
    /// Formula text, e.g. "x*(y+z) = x*y + x*z".
    formula: Option<String>,
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(BUILTIN_NAMES), conflicts_with = "formula")]
    builtin: Option<String>,
    /// Size parameter for the dn and dn-star families.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Sample this many random assignments instead of enumerating.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_EVAL_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum GenKind {
    /// Partition lattice of an n-element set.
    Pi {
        #[arg(long)]
        n: usize,
    },
    /// Subspace lattice of GF(p)^dim.
    Sub {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        p: u32,
    },
    M3,
    N5,
    Chain {
        #[arg(long)]
        n: usize,
    },
    /// M_n: n atoms between a bottom and a top.
    Diamond {
        #[arg(long)]
        n: usize,
    },
    /// Direct product of two lattice files.
    Product {
        left: PathBuf,
        right: PathBuf,
    },
}

#[derive(Subcommand)]
enum AlgCmd {
    /// The congruence lattice.
    Con,
    /// The commutator of two congruences.
    Commutator { alpha: String, beta: String },
    /// Check a ternary term in x, y, z as a weak difference term.
    Wdt { term: String },
    /// Build Con(A^n(alpha)) and check the interval below alpha-bar.
    EmbedConstruct {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_parser = |s: &str| s.parse::<Suite>())]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_EVAL_BUDGET)]
    budget: u64,
    /// Samples for identity checks too large to enumerate.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Random families for the dnperm suite.
    #[arg(long, default_value_t = 10_000)]
    instances: usize,
    /// Load fixtures from this directory instead of the built-in copy.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

/// What a command produced: a JSON document, a one-screen summary, and
/// whether the property it checked held.
struct Report {
    json: Value,
    human: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(r) => {
            let text = if cli.human {
                r.human
            } else {
                serde_json::to_string_pretty(&r.json).expect("reports serialize")
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<Report> {
    match cmd {
        Cmd::Check(args) => cmd_check(args),
        Cmd::Gen { kind } => cmd_gen(kind),
        Cmd::Alg { algebra, action } => cmd_alg(&algebra, action),
        Cmd::Verify(args) => cmd_verify(args),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_lattice(path: &Path) -> Result<FiniteLattice> {
    FiniteLattice::from_json_str(&read(path)?)
        .with_context(|| format!("loading {}", path.display()))
}

fn load_algebra(path: &Path) -> Result<FiniteAlgebra> {
    FiniteAlgebra::from_json_str(&read(path)?)
        .with_context(|| format!("loading {}", path.display()))
}

fn cmd_check(args: CheckArgs) -> Result<Report> {
    let l = load_lattice(&args.lattice)?;
    let phi = match (&args.builtin, &args.formula) {
        (Some(name), _) => builtin(name, args.n)?,
        (None, Some(text)) => parse(text)
            .map_err(|e| anyhow!("{e}"))?
            .into_quasi()
            .ok_or_else(|| anyhow!("expected an identity, got a bare term"))?,
        (None, None) => bail!("give a formula or --builtin"),
    };
    let mode = match args.samples {
        Some(count) => CheckMode::Sampled {
            count,
            seed: args.seed,
        },
        None => CheckMode::Exhaustive {
            budget: args.budget,
        },
    };
    let verdict = check(&l, &phi, mode)?;
    let ok = verdict.passed();
    let mut json = json!({ "formula": phi, "lattice_size": l.size() });
    json.as_object_mut().expect("object").extend(
        serde_json::to_value(&verdict)
            .expect("verdicts serialize")
            .as_object()
            .expect("tagged enum")
            .clone(),
    );
    let human = match &verdict {
        Verdict::Holds => format!("holds: {phi}"),
        Verdict::SampledPass { samples } => format!("no failure in {samples} samples: {phi}"),
        Verdict::Fails { assignment } => {
            let labels: serde_json::Map<String, Value> = assignment
                .iter()
                .map(|(k, &v)| (k.to_string(), Value::String(l.label(v))))
                .collect();
            json["labels"] = Value::Object(labels.clone());
            let parts: Vec<String> = labels
                .iter()
                .map(|(k, v)| format!("{k}={}", v.as_str().unwrap_or("")))
                .collect();
            format!("fails at {}: {phi}", parts.join(", "))
        }
    };
    Ok(Report { json, human, ok })
}

fn cmd_gen(kind: GenKind) -> Result<Report> {
    let l = match kind {
        GenKind::Pi { n } => full_partition_lattice(n)?.into_lattice(),
        GenKind::Sub { dim, p } => subspace_lattice(dim, p)?.into_lattice(),
        GenKind::M3 => m3(),
        GenKind::N5 => n5(),
        GenKind::Chain { n } if n > 0 => chain(n),
        GenKind::Chain { .. } => bail!("a chain needs at least one element"),
        GenKind::Diamond { n } => diamond(n),
        GenKind::Product { left, right } => {
            direct_product(&load_lattice(&left)?, &load_lattice(&right)?)?
        }
    };
    let json = serde_json::to_value(l.to_json())?;
    let human = format!(
        "lattice with {} elements and {} covers",
        l.size(),
        l.covers().len()
    );
    Ok(Report {
        json,
        human,
        ok: true,
    })
}

/// `top`, `bottom`, `cg:a,b`, a list of blocks, or a partition object.
fn parse_congruence(a: &FiniteAlgebra, text: &str) -> Result<Partition> {
    let n = a.size();
    let t = text.trim();
    let p = match t {
        "top" | "1" => Partition::indiscrete(n),
        "bottom" | "0" => Partition::discrete(n),
        _ if t.starts_with("cg:") => {
            let pair: Vec<usize> = t[3..]
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .with_context(|| format!("bad generator pair `{t}`"))?;
            match pair[..] {
                [x, y] if x < n && y < n => principal_congruence(a, x, y),
                _ => bail!("`{t}` needs two elements below {n}"),
            }
        }
        _ if t.starts_with('[') => {
            let blocks: Vec<Vec<usize>> = serde_json::from_str(t).context("parsing blocks")?;
            Partition::from_blocks(n, &blocks)?
        }
        _ if t.starts_with('{') => serde_json::from_str(t).context("parsing partition")?,
        _ => {
            bail!("cannot read `{t}` as a congruence; use top, bottom, cg:a,b or a list of blocks")
        }
    };
    if p.base_size() != n {
        bail!(
            "partition of {} elements for an algebra of size {n}",
            p.base_size()
        );
    }
    is_congruence(a, &p)?;
    Ok(p)
}

fn cmd_alg(path: &Path, action: AlgCmd) -> Result<Report> {
    let a = load_algebra(path)?;
    match action {
        AlgCmd::Con => {
            let con = con_lattice(&a)?;
            let json = json!({
                "size": con.size(),
                "congruences": con.partitions(),
                "lattice": con.lattice().to_json(),
            });
            let list: Vec<String> = con.partitions().iter().map(|p| p.to_string()).collect();
            let human = format!("{} congruences: {}", con.size(), list.join("  "));
            Ok(Report {
                json,
                human,
                ok: true,
            })
        }
        AlgCmd::Commutator { alpha, beta } => {
            let (x, y) = (parse_congruence(&a, &alpha)?, parse_congruence(&a, &beta)?);
            let c = commutator(&a, &x, &y)?;
            let human = format!("[{x}, {y}] = {c}");
            Ok(Report {
                json: json!({ "alpha": x, "beta": y, "commutator": c }),
                human,
                ok: true,
            })
        }
        AlgCmd::Wdt { term } => {
            let d = TermExpr::parse(&term)?;
            let r = check_weak_difference_term(&a, &d)?;
            let human = match &r.violation {
                None => format!("{d} is a weak difference term"),
                Some(v) => format!(
                    "{d} fails {} at a={}, b={} (value {})",
                    v.condition, v.a, v.b, v.value
                ),
            };
            Ok(Report {
                json: json!({ "term": d.to_string(), "report": r }),
                human,
                ok: r.holds,
            })
        }
        AlgCmd::EmbedConstruct { alpha, n } => {
            let p = parse_congruence(&a, &alpha)?;
            let r = verify_embedding_construction(&a, &p, n)?;
            let sub = iso_to_subspaces(&r.interval, n, a.size());
            let mut lines = vec![format!("L_{n} has {} elements", r.interval_size)];
            lines.extend(
                r.checks
                    .iter()
                    .map(|c| format!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name)),
            );
            if let Some((p, found)) = sub {
                lines.push(format!("isomorphic to Sub(GF({p})^{n}): {found}"));
            }
            let json = json!({
                "report": r,
                "interval": r.interval.to_json(),
                "subspace_isomorphism": sub.map(|(p, found)| json!({ "p": p, "dim": n, "found": found })),
            });
            Ok(Report {
                json,
                human: lines.join("\n"),
                ok: r.passed(),
            })
        }
    }
}

/// When `|A|` is prime, compares `L_n` with `Sub(GF(|A|)^n)`.
fn iso_to_subspaces(l: &FiniteLattice, n: usize, size: usize) -> Option<(u32, bool)> {
    let p = u32::try_from(size).ok()?;
    let sub = subspace_lattice(n, p).ok()?;
    Some((p, l.isomorphism_from(sub.lattice()).is_some()))
}

fn cmd_verify(args: VerifyArgs) -> Result<Report> {
    let corpus = match &args.fixtures {
        Some(dir) => Corpus::load(dir)?,
        None => Corpus::embedded(),
    };
    let cfg = VerifyConfig {
        seed: args.seed,
        budget: args.budget,
        samples: args.samples,
        instances: args.instances,
    };
    let r = run_suite(args.suite, &corpus, &cfg);
    let mut lines: Vec<String> = r
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {} ({:.0} ms)",
                if c.passed { "PASS" } else { "FAIL" },
                c.id,
                c.elapsed_ms
            )
        })
        .collect();
    let failed = r.failures().count();
    lines.push(format!(
        "{}: {} checks, {failed} failed",
        r.suite,
        r.checks.len()
    ));
    Ok(Report {
        json: serde_json::to_value(&r)?,
        human: lines.join("\n"),
        ok: r.passed,
    })
}
