mod report;
mod tables;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use rgdiff::bounds::{bound_report, published_discrepancy};
use rgdiff::decompose::{sufficient_membership, Membership};
use rgdiff::diffpoly::{set_order, set_weight};
use rgdiff::linearbridge::{cross_check, seeded_systems};
use rgdiff::parse::parse_alg_poly;
use rgdiff::reduction::{full_reduce, partial_reduce, triangular};
use rgdiff::{
    parse_poly, parse_system, rosenfeld_groebner, DecomposeOptions, Decomposition, Error, ProblemSpec,
    WeightVector, WeightedRanking,
};

use report::*;

/// Exit status for an exhausted step budget.
const EXIT_BUDGET: u8 = 2;

#[derive(Parser)]
#[command(name = "rgdiff", version, about = "Rosenfeld-Gröbner decomposition with order and weight bounds")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose the radical differential ideal {F}:K^∞ of a problem file.
    Decompose {
        file: PathBuf,
        /// Maximum number of processed quadruples.
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// Write the full quadruple log and branch records as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Process each generation of quadruples in parallel.
        #[arg(long)]
        parallel: bool,
    },
    /// Antichain length and weight bounds, e.g. `bounds m=2 n=1 h=5 w=[1,1]`.
    Bounds {
        /// `key=value` pairs: m, n, h and optionally w.
        params: Vec<String>,
        /// Take m, n, w and h from a problem file instead.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Reproduce the bound tables.
    Tables,
    /// Reduce a polynomial by the generators of a problem file, which must
    /// form a triangular set.
    Reduce {
        file: PathBuf,
        poly: String,
        /// Partial reduction (proper derivatives of leaders only).
        #[arg(long)]
        partial: bool,
    },
    /// Sufficient membership test against the decomposition of a problem file.
    Member {
        file: PathBuf,
        poly: String,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    /// Compare the decomposition of linear systems with reduced Gröbner bases.
    LinearCheck {
        /// Seed for the random systems.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random systems.
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Check this system instead: polynomials in x1..xm separated by `;`.
        #[arg(long, requires = "m")]
        system: Option<String>,
        #[arg(long)]
        m: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::BudgetExhausted { .. }) => ExitCode::from(EXIT_BUDGET),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Decompose { file, budget, trace, parallel } => decompose(cli.json, file, *budget, trace.as_deref(), *parallel),
        Command::Bounds { params, file } => bounds(cli.json, params, file.as_deref()),
        Command::Tables => {
            if cli.json {
                print_json(&tables::report()?)?;
            } else {
                print!("{}", tables::text()?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce { file, poly, partial } => reduce(cli.json, file, poly, *partial),
        Command::Member { file, poly, budget } => member(cli.json, file, poly, *budget),
        Command::LinearCheck { seed, count, system, m } => linear_check(cli.json, *seed, *count, system.as_deref(), *m),
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn load(path: &Path) -> Result<ProblemSpec> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_system(&src).with_context(|| format!("parsing {}", path.display()))
}

/// `(h, W(F ∪ K) = H(F ∪ K))`.
fn input_weight(spec: &ProblemSpec) -> (u64, bool) {
    let all = || spec.f.iter().chain(&spec.k);
    let w = set_weight(all(), &spec.weights).unwrap_or(0);
    (w, w == set_order(all()).unwrap_or(0))
}

fn run_decomposition(spec: &ProblemSpec, budget: usize, parallel: bool, log: bool) -> Result<Decomposition> {
    let r = WeightedRanking::new(spec.weights.clone());
    let opts = DecomposeOptions {
        budget,
        parallel,
        log_quadruples: log,
    };
    match rosenfeld_groebner(&spec.f, &spec.k, &r, &opts) {
        Err(Error::BudgetExhausted { budget, partial }) => {
            eprintln!(
                "budget of {budget} steps exhausted: {} systems found, {} quadruples pending, max weight seen {}",
                partial.systems.len(),
                partial.pending,
                partial.trace.max_weight_seen
            );
            Err(Error::BudgetExhausted { budget, partial }.into())
        }
        other => Ok(other?),
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn decompose(json: bool, file: &Path, budget: usize, trace: Option<&Path>, parallel: bool) -> Result<ExitCode> {
    let spec = load(file)?;
    let (h, w_eq_h) = input_weight(&spec);
    let dec = run_decomposition(&spec, budget, parallel, trace.is_some())?;
    if let Some(path) = trace {
        let text = serde_json::to_string_pretty(&TraceReport::new(&dec.trace))?;
        fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    let r = WeightedRanking::new(spec.weights.clone());
    let (m, n) = (spec.ring.m(), spec.ring.n());
    let bounds = bound_report(m, n as u64, h, &spec.weights)?;
    let max_out = dec.systems.iter().map(|s| s.weight(&r)).max().unwrap_or(0);
    let seen = dec.trace.max_weight_seen;
    let rep = DecomposeReport {
        kind: "decompose",
        m,
        n,
        weights: spec.weights.components().to_vec(),
        h,
        weight_equals_order: w_eq_h,
        inconsistent: dec.is_inconsistent(),
        systems: dec.systems.iter().map(|s| SystemOut::new(s, s.weight(&r))).collect(),
        branches: dec
            .trace
            .branches
            .iter()
            .map(|b| BranchOut {
                outcome: outcome_name(&b.outcome),
                witness: b.witness.iter().map(|v| v.to_string()).collect(),
            })
            .collect(),
        steps: dec.trace.steps,
        max_weight_seen: seen,
        output_bound: BoundCheck {
            pass: bounds.weight_bound >= max_out.into(),
            bound: bounds.weight_bound.to_string(),
            observed: max_out,
        },
        quadruple_bound: BoundCheck {
            pass: bounds.quadruple_bound >= seen.into(),
            bound: bounds.quadruple_bound.to_string(),
            observed: seen,
        },
    };
    if json {
        print_json(&rep)?;
        return Ok(ExitCode::SUCCESS);
    }
    if rep.inconsistent {
        println!("INCONSISTENT");
    }
    for (i, s) in rep.systems.iter().enumerate() {
        println!("system {}:", i + 1);
        println!("  A: {}", s.a.join("; "));
        println!("  H: {}", s.h.join("; "));
        println!("  coherence: {}", s.coherence);
    }
    println!("witnesses:");
    for (i, b) in dec.trace.branches.iter().enumerate() {
        println!("  branch {} ({}): {}", i + 1, outcome_name(&b.outcome), witness_text(&b.witness));
    }
    println!("m = {m}, n = {n}, w = {}, h = {h}, W = H: {}", spec.weights, yes_no(w_eq_h));
    println!("steps: {}", rep.steps);
    println!("max weight seen: {seen}");
    println!(
        "output weight {} <= bound {}: {}",
        rep.output_bound.observed,
        rep.output_bound.bound,
        pass(rep.output_bound.pass)
    );
    println!(
        "quadruple weight {seen} <= bound {}: {}",
        rep.quadruple_bound.bound,
        pass(rep.quadruple_bound.pass)
    );
    Ok(ExitCode::SUCCESS)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn parse_weights(s: &str) -> Result<WeightVector> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| anyhow!("weights must look like [c1,...,cm], got {s}"))?;
    let cs = inner
        .split(',')
        .map(|c| c.trim().parse::<u64>().with_context(|| format!("bad weight {c:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightVector::new(cs)?)
}

fn bounds(json: bool, params: &[String], file: Option<&Path>) -> Result<ExitCode> {
    let (m, n, h, w, flag) = if let Some(path) = file {
        if !params.is_empty() {
            bail!("give either --file or key=value parameters, not both");
        }
        let spec = load(path)?;
        let (h, eq) = input_weight(&spec);
        (spec.ring.m(), spec.ring.n() as u64, h, spec.weights.clone(), Some(eq))
    } else {
        let (mut m, mut n, mut h, mut w) = (None, None, None, None);
        for p in params {
            let (k, v) = p.split_once('=').ok_or_else(|| anyhow!("expected key=value, got {p}"))?;
            let int = || v.parse::<u64>().with_context(|| format!("bad value in {p}"));
            match k {
                "m" => m = Some(int()? as usize),
                "n" => n = Some(int()?),
                "h" => h = Some(int()?),
                "w" => w = Some(parse_weights(v)?),
                _ => bail!("unknown parameter {k}"),
            }
        }
        let m = m.ok_or_else(|| anyhow!("missing m"))?;
        let w = w.unwrap_or_else(|| WeightVector::uniform(m));
        (m, n.ok_or_else(|| anyhow!("missing n"))?, h.ok_or_else(|| anyhow!("missing h"))?, w, None)
    };
    let rep = bound_report(m, n, h, &w)?;
    let out = BoundsReport::new(&rep, w.components().to_vec(), flag, published_discrepancy(m, n, h));
    if json {
        print_json(&out)?;
        return Ok(ExitCode::SUCCESS);
    }
    println!("m = {m}, n = {n}, h = {h}, w = {w}");
    println!("antichain length: {} ({})", out.length, out.route);
    println!("growth: {}", out.growth);
    println!("weight bound: {}", out.weight_bound);
    println!("quadruple bound: {}", out.quadruple_bound);
    for (i, b) in out.per_derivation.iter().enumerate() {
        println!("order bound d{}: {b}", i + 1);
    }
    match flag {
        Some(eq) => println!("W = H: {}", yes_no(eq)),
        None => println!("order bounds assume W(F ∪ K) = H(F ∪ K)"),
    }
    if let Some(note) = out.note {
        println!("note: {note}");
    }
    Ok(ExitCode::SUCCESS)
}

fn reduce(json: bool, file: &Path, poly: &str, partial: bool) -> Result<ExitCode> {
    let spec = load(file)?;
    let r = WeightedRanking::new(spec.weights.clone());
    let set = triangular(&spec.f, &r).context("the generators do not form a triangular set")?;
    let f = parse_poly(poly, &spec.ring)?;
    let cert = if partial { partial_reduce(&f, &set, &r) } else { full_reduce(&f, &set, &r) };
    let rep = ReduceReport::new(&f, &set, &cert, partial);
    if json {
        print_json(&rep)?;
        return Ok(ExitCode::SUCCESS);
    }
    println!("remainder: {}", rep.remainder);
    println!("scale: {}", rep.scale);
    for m in &rep.multiplier {
        println!("multiplier: {}({})^{}", m.kind, rep.set[m.element], m.power);
    }
    for t in &rep.combination {
        println!("term: ({}) * theta{:?}({})", t.cofactor, t.theta, rep.set[t.element]);
    }
    println!("certificate verified: {}", yes_no(rep.verified));
    Ok(ExitCode::SUCCESS)
}

fn member(json: bool, file: &Path, poly: &str, budget: usize) -> Result<ExitCode> {
    let spec = load(file)?;
    let (_, w_eq_h) = input_weight(&spec);
    let f = parse_poly(poly, &spec.ring)?;
    let dec = run_decomposition(&spec, budget, false, false)?;
    let r = WeightedRanking::new(spec.weights.clone());
    let answer = match sufficient_membership(&f, &dec.systems, &r) {
        Membership::Yes => "yes",
        Membership::Unknown => "unknown",
    };
    let rep = MemberReport {
        kind: "member",
        poly: f.to_string(),
        answer,
        systems: dec.systems.len(),
        weight_equals_order: w_eq_h,
    };
    if json {
        print_json(&rep)?;
    } else {
        println!("{answer}");
        println!("W = H: {}", yes_no(w_eq_h));
    }
    Ok(ExitCode::SUCCESS)
}

fn linear_check(json: bool, seed: u64, count: usize, system: Option<&str>, m: Option<usize>) -> Result<ExitCode> {
    let (systems, seed) = match (system, m) {
        (Some(text), Some(m)) => {
            let polys = text
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_alg_poly(s, m))
                .collect::<rgdiff::Result<Vec<_>>>()?;
            (vec![(m, polys)], None)
        }
        _ => (seeded_systems(seed, count), Some(seed)),
    };
    let checks = systems
        .iter()
        .map(|(m, f)| Ok(CrossCheckOut::new(*m, &cross_check(f, *m)?)))
        .collect::<Result<Vec<_>>>()?;
    let failures = checks.iter().filter(|c| !c.passed).count();
    let rep = LinearCheckReport {
        kind: "linear-check",
        seed,
        checks,
        failures,
    };
    if json {
        print_json(&rep)?;
    } else {
        for c in &rep.checks {
            println!("[{}] m={} {{{}}}", pass(c.passed), c.m, c.input.join(", "));
            println!("  groebner: {}", c.groebner.join(", "));
            println!("  image:    {}", c.image.join(", "));
        }
        println!("{} of {} passed", rep.checks.len() - failures, rep.checks.len());
    }
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
