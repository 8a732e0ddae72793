//! `gruss`: condition checks, bound chains, reverse Jensen reports and
//! sharpness searches over JSON instance files.
//!
//! Exit codes: 0 success, 1 a hypothesis or inequality concern (including a
//! failed gradient check), 2 a usage or input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use gruss::bounds::{self, BoundChain, EquationTag, Holder, Hypothesis, CHAIN_TOL};
use gruss::conditions::{fit_enclosure, ConditionReport, Disc, Enclosure, FitMode};
use gruss::error::Error;
use gruss::instance::Instance;
use gruss::jensen::{self, JensenOptions, ScaledGradient};
use gruss::sharpness::{self, SharpnessResult, Target};
use gruss::space::{Space, Vector};

#[derive(Parser)]
#[command(name = "gruss", version, about = "Grüss-type bounds for weighted vector sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every sequence against its enclosure (box and ball forms).
    Check(CheckArgs),
    /// Evaluate one bound chain.
    Bound(BoundArgs),
    /// Reverse Jensen report for a convex oracle.
    Jensen(JensenArgs),
    /// Search for instances approaching a best-possible constant.
    Sharpness(SharpnessArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Fit enclosures that the instance does not provide.
    #[arg(long)]
    fit: bool,
    /// bounding-sphere or antipodal-pair.
    #[arg(long, default_value = "bounding-sphere")]
    fit_mode: String,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundArgs {
    file: PathBuf,
    /// Equation tag of the chain, e.g. 2.3 or R2.7.
    #[arg(long)]
    which: String,
    #[command(flatten)]
    fit: FitArgs,
    /// Evaluate even when a hypothesis fails.
    #[arg(long)]
    unchecked: bool,
    /// Hölder exponent for the forward-difference bounds (number or `inf`).
    #[arg(long)]
    holder_p: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct JensenArgs {
    file: PathBuf,
    /// Overrides the instance's `oracle`.
    #[arg(long)]
    oracle: Option<String>,
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long)]
    unchecked: bool,
    /// Multiply the oracle's gradient by this factor before validating it.
    #[arg(long)]
    inject_grad_scale: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SharpnessArgs {
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the witness instance (with results) to this file.
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// What went wrong, mapped onto the exit-code contract.
enum Failure {
    Concern(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::HypothesisViolated { .. }
            | Error::InequalityViolated { .. }
            | Error::GradientCheck { .. }
            | Error::FittingFailure { .. }
            | Error::NegativeVariance { .. } => Failure::Concern(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check(a) => cmd_check(&a),
        Command::Bound(a) => cmd_bound(&a),
        Command::Jensen(a) => cmd_jensen(&a),
        Command::Sharpness(a) => cmd_sharpness(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Concern(msg)) => {
            eprintln!("gruss: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("gruss: error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Input {
    instance: Instance,
    sha256: String,
}

fn load(path: &Path) -> Result<Input, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::Usage(format!("{}: not valid UTF-8", path.display())))?;
    let instance = Instance::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(Input {
        instance,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

fn fit_mode(args: &FitArgs) -> Result<FitMode, Failure> {
    Ok(args.fit_mode.parse::<FitMode>()?)
}

fn report(instance: &Instance, results: Value) -> String {
    let mut file = instance.to_file();
    file.results = Some(results);
    file.to_json_pretty()
}

fn sci(v: f64) -> String {
    format!("{v:>24.16e}")
}

// ---------------------------------------------------------------- check

/// Disc for the alphas, fitted as a ball in the scalar field.
fn fit_disc(inst: &Instance, mode: FitMode) -> Result<Disc, Error> {
    let alphas = inst.require_alphas()?;
    let line = Space::new(1, inst.space.field())?;
    let points: Vec<Vector> = alphas.iter().map(|&a| Vector::new(vec![a])).collect::<Result<_, _>>()?;
    let encl = fit_enclosure(&line, &points, mode)?;
    Disc::new(encl.lo().coords()[0], encl.hi().coords()[0])
}

/// Fills in the enclosures named in `which` that are missing but whose sequence is present.
fn fit_missing(inst: &mut Instance, which: &[&str], mode: FitMode) -> Result<Vec<&'static str>, Error> {
    let mut fitted = Vec::new();
    let space = inst.space.clone();
    for &name in which {
        match name {
            "xs" if inst.x_enclosure.is_none() && inst.xs.is_some() => {
                inst.x_enclosure = Some(fit_enclosure(&space, inst.require_xs()?, mode)?);
                fitted.push("xs");
            }
            "ys" if inst.y_enclosure.is_none() && inst.ys.is_some() => {
                inst.y_enclosure = Some(fit_enclosure(&space, inst.require_ys()?, mode)?);
                fitted.push("ys");
            }
            "zs" if inst.z_enclosure.is_none() && inst.zs.is_some() => {
                inst.z_enclosure = Some(fit_enclosure(&space, inst.require_zs()?, mode)?);
                fitted.push("zs");
            }
            "alphas" if inst.disc.is_none() && inst.alphas.is_some() => {
                inst.disc = Some(fit_disc(inst, mode)?);
                fitted.push("alphas");
            }
            _ => {}
        }
    }
    Ok(fitted)
}

fn cmd_check(args: &CheckArgs) -> Outcome {
    let Input { mut instance, sha256 } = load(&args.file)?;
    let fitted = if args.fit.fit {
        fit_missing(&mut instance, &["xs", "ys", "alphas", "zs"], fit_mode(&args.fit)?)?
    } else {
        Vec::new()
    };

    let mut checks: Vec<(&str, ConditionReport)> = Vec::new();
    let mut unchecked = Vec::new();
    let pairs: [(&str, bool, Option<&Enclosure>); 3] = [
        ("xs", instance.xs.is_some(), instance.x_enclosure.as_ref()),
        ("ys", instance.ys.is_some(), instance.y_enclosure.as_ref()),
        ("zs", instance.zs.is_some(), instance.z_enclosure.as_ref()),
    ];
    for (name, present, encl) in pairs {
        match (present, encl) {
            (true, Some(e)) => {
                let seq = match name {
                    "xs" => instance.require_xs()?,
                    "ys" => instance.require_ys()?,
                    _ => instance.require_zs()?,
                };
                checks.push((name, e.check_ball(seq)?));
            }
            (true, None) => unchecked.push(name),
            _ => {}
        }
    }
    match (&instance.alphas, &instance.disc) {
        (Some(a), Some(d)) => checks.push(("alphas", d.check(a)?)),
        (Some(_), None) => unchecked.push("alphas"),
        _ => {}
    }
    if checks.is_empty() {
        return Err(Failure::Usage(
            "nothing to check: no sequence has an enclosure (pass --fit to derive them)".into(),
        ));
    }

    let failing: Vec<(&str, Vec<usize>)> = checks
        .iter()
        .map(|(name, r)| (*name, r.failures()))
        .filter(|(_, f)| !f.is_empty())
        .collect();
    let agree = checks
        .iter()
        .all(|(_, r)| r.box_holds == r.ball_holds);

    if args.json {
        let conditions: serde_json::Map<String, Value> = checks
            .iter()
            .map(|(name, r)| (name.to_string(), serde_json::to_value(r).expect("report serializes")))
            .collect();
        let results = json!({
            "command": "check",
            "input_sha256": sha256,
            "fitted": fitted,
            "unchecked": unchecked,
            "conditions": conditions,
            "box_ball_agree": agree,
            "verdict": if failing.is_empty() { "ok" } else { "hypothesis_violated" },
        });
        println!("{}", report(&instance, results));
    } else {
        for name in &fitted {
            println!("fitted enclosure for {name}");
        }
        println!(
            "{:<8} {:>6} {:>24} {:>24}  verdict",
            "sequence", "index", "box slack", "ball slack"
        );
        for (name, r) in &checks {
            for i in 0..r.len() {
                let ok = r.ball_holds[i] && r.box_holds[i];
                println!(
                    "{:<8} {:>6} {} {}  {}",
                    name,
                    i,
                    sci(r.box_slack[i]),
                    sci(r.ball_slack[i]),
                    if ok { "ok" } else { "OUTSIDE" }
                );
            }
        }
        for name in &unchecked {
            println!("{name}: no enclosure, not checked");
        }
    }

    if failing.is_empty() {
        Ok(())
    } else {
        let detail: Vec<String> = failing
            .iter()
            .map(|(name, idx)| format!("{name} at index {}", join(idx)))
            .collect();
        Err(Failure::Concern(format!("condition fails for {}", detail.join("; "))))
    }
}

fn join(idx: &[usize]) -> String {
    idx.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------- bound

fn valid_tags() -> String {
    EquationTag::ALL.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(", ")
}

fn need_encl<'a, T>(value: Option<&'a T>, what: &str) -> Result<&'a T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("this chain needs {what}; supply it or pass --fit")))
}

/// Evaluates the chain named by `tag` on `inst`.
fn evaluate_chain(inst: &Instance, tag: EquationTag, mode: Hypothesis, holder: Holder) -> Result<BoundChain, Failure> {
    use EquationTag::*;
    let chain = match tag {
        E2_3 => bounds::chain_thm23(
            need_encl(inst.x_enclosure.as_ref(), "x_lo/x_hi")?,
            &inst.weighted_sequence(true, false)?,
            mode,
        )?,
        E1_4 | E2_7 => bounds::chain_rem24(
            need_encl(inst.x_enclosure.as_ref(), "x_lo/x_hi")?,
            need_encl(inst.y_enclosure.as_ref(), "y_lo/y_hi")?,
            &inst.weighted_sequence(true, false)?,
            mode,
        )?,
        E1_5 | E2_8 => bounds::chain_selfadjoint(
            need_encl(inst.x_enclosure.as_ref(), "x_lo/x_hi")?,
            &inst.space,
            &inst.probability()?,
            inst.require_xs()?,
            mode,
        )?,
        E2_9 => bounds::chain_thm25(
            need_encl(inst.x_enclosure.as_ref(), "x_lo/x_hi")?,
            None,
            &inst.weighted_sequence(false, true)?,
            mode,
        )?,
        E1_2 | E2_11 => bounds::chain_thm25(
            need_encl(inst.x_enclosure.as_ref(), "x_lo/x_hi")?,
            Some(need_encl(inst.disc.as_ref(), "a/A")?),
            &inst.weighted_sequence(false, true)?,
            mode,
        )?,
        R2_7 => bounds::chain_complex(
            need_encl(inst.disc.as_ref(), "a/A")?,
            &inst.probability()?,
            inst.require_alphas()?,
            mode,
        )?,
        E1_6 => bounds::chain_forward_difference(&inst.weighted_sequence(true, false)?, holder)?,
        E1_7 => bounds::chain_forward_difference_equal(&inst.weighted_sequence(true, false)?, holder)?,
        E1_8 => bounds::chain_forward_difference_self(&inst.space, &inst.probability()?, inst.require_xs()?, holder)?,
        E1_9 => {
            bounds::chain_forward_difference_self_equal(&inst.space, &inst.probability()?, inst.require_xs()?, holder)?
        }
        E3_4 | E3_5 | E3_9 => {
            return Err(Failure::Usage(format!(
                "chain {tag} bounds a Jensen gap; use the `jensen` subcommand"
            )))
        }
    };
    Ok(chain)
}

/// Enclosures each chain reads from.
fn enclosures_for(tag: EquationTag) -> &'static [&'static str] {
    use EquationTag::*;
    match tag {
        E2_3 | E1_5 | E2_8 | E2_9 => &["xs"],
        E1_4 | E2_7 => &["xs", "ys"],
        E1_2 | E2_11 => &["xs", "alphas"],
        R2_7 => &["alphas"],
        _ => &[],
    }
}

fn chain_table(chain: &BoundChain) {
    let kind = match chain.kind {
        bounds::ChainKind::Ordered => "ordered",
        bounds::ChainKind::Parallel => "parallel",
    };
    let hyp = if chain.hypothesis_verified { "verified" } else { "NOT verified" };
    println!("chain {} ({kind}), hypotheses {hyp}", chain.equation);
    println!("  {:<44} {:>6} {}", "functional", "", sci(chain.functional_value));
    for (k, link) in chain.links.iter().enumerate() {
        let mark = if chain.tightest == Some(k) { "  <- tightest" } else { "" };
        println!("  {:<44} {:>6} {}{mark}", link.label, link.equation.as_str(), sci(link.value));
    }
}

fn cmd_bound(args: &BoundArgs) -> Outcome {
    let tag: EquationTag = args
        .which
        .parse()
        .map_err(|_| Failure::Usage(format!("unknown tag `{}`; valid tags: {}", args.which, valid_tags())))?;
    let Input { mut instance, sha256 } = load(&args.file)?;
    let holder = match &args.holder_p {
        Some(s) => s.parse::<Holder>()?,
        None => instance.holder.unwrap_or_default(),
    };
    let fitted = if args.fit.fit {
        fit_missing(&mut instance, enclosures_for(tag), fit_mode(&args.fit)?)?
    } else {
        Vec::new()
    };

    let chain = evaluate_chain(&instance, tag, Hypothesis::Unchecked, holder)?;
    let violations = chain.violations(CHAIN_TOL);
    let verdict = if !violations.is_empty() {
        "inequality_violated"
    } else if chain.hypothesis_verified {
        "ok"
    } else if args.unchecked {
        "unverified"
    } else {
        "hypothesis_violated"
    };

    if args.json {
        let results = json!({
            "command": "bound",
            "input_sha256": sha256,
            "which": tag,
            "holder_p": holder_value(holder),
            "fitted": fitted,
            "chain": chain,
            "violations": violations,
            "verdict": verdict,
        });
        println!("{}", report(&instance, results));
    } else {
        for name in &fitted {
            println!("fitted enclosure for {name}");
        }
        chain_table(&chain);
        println!("verdict: {verdict}");
    }

    match verdict {
        "inequality_violated" => Err(Failure::Concern(format!(
            "chain {tag} fails at link {}",
            join(&violations)
        ))),
        "hypothesis_violated" => {
            let detail: Vec<String> = chain
                .hypothesis_reports
                .iter()
                .filter(|r| !r.report.holds)
                .map(|r| format!("{} at index {}", r.sequence, join(&r.report.failures())))
                .collect();
            Err(Failure::Concern(format!(
                "hypothesis fails for {} (pass --unchecked to evaluate anyway)",
                detail.join("; ")
            )))
        }
        _ => Ok(()),
    }
}

fn holder_value(h: Holder) -> Value {
    match h {
        Holder::Finite(p) => json!(p),
        Holder::Infinite => json!("inf"),
    }
}

// ---------------------------------------------------------------- jensen

fn cmd_jensen(args: &JensenArgs) -> Outcome {
    let Input { mut instance, sha256 } = load(&args.file)?;
    if !instance.space.is_real() {
        return Err(Failure::Usage(
            "the Jensen bounds need a real space: convexity and gradients are real notions".into(),
        ));
    }
    let name = args
        .oracle
        .clone()
        .or_else(|| instance.oracle.clone())
        .ok_or_else(|| {
            Failure::Usage(format!(
                "no oracle given; pass --oracle with one of: {}",
                jensen::CATALOG.join(", ")
            ))
        })?;
    if !jensen::CATALOG.contains(&name.as_str()) {
        return Err(Failure::Usage(format!(
            "unknown oracle `{name}`; available: {}",
            jensen::CATALOG.join(", ")
        )));
    }
    let space = instance.space.clone();
    let base = jensen::oracle_by_name(&name, &space)?;
    let oracle: Box<dyn jensen::ConvexOracle> = match args.inject_grad_scale {
        Some(factor) => Box::new(jensen::register(ScaledGradient { inner: base, factor }, &space)?),
        None => base,
    };
    instance.oracle = Some(name.clone());

    let zs = instance.require_zs()?.to_vec();
    let q = match &instance.weights {
        Some(w) => w.clone(),
        None => vec![1.0; zs.len()],
    };
    let options = JensenOptions {
        grad_enclosure: instance.grad_enclosure.clone(),
        z_enclosure: instance.z_enclosure.clone(),
        fit_z: args.fit.fit,
        fit_mode: fit_mode(&args.fit)?,
        hypothesis: if args.unchecked { Hypothesis::Unchecked } else { Hypothesis::Checked },
    };
    let rep = jensen::reverse_jensen(&oracle, &space, &q, &zs, &options)?;
    instance.grad_enclosure = rep.grad_enclosure.clone();
    instance.z_enclosure = rep.z_enclosure.clone();

    let holds = rep.holds(CHAIN_TOL);
    let verdict = if !holds {
        "inequality_violated"
    } else if rep.chain.hypothesis_verified {
        "ok"
    } else {
        "unverified"
    };
    if args.json {
        let results = json!({
            "command": "jensen",
            "input_sha256": sha256,
            "oracle": name,
            "gap": rep.gap,
            "pairing_gap": rep.pairing_gap,
            "chain": rep.chain,
            "improvement_ratio": rep.improvement_ratio,
            "verdict": verdict,
        });
        println!("{}", report(&instance, results));
    } else {
        println!("oracle {name}");
        println!("  {:<44} {:>6} {}", "jensen gap", "", sci(rep.gap));
        println!("  {:<44} {:>6} {}", "gradient pairing gap", "", sci(rep.pairing_gap));
        chain_table(&rep.chain);
        if let Some(r) = rep.improvement_ratio {
            println!("  {:<44} {:>6} {}", "improvement ratio", "", sci(r));
        }
        println!("verdict: {verdict}");
    }
    if holds {
        Ok(())
    } else {
        Err(Failure::Concern("Jensen chain does not hold".into()))
    }
}

// ---------------------------------------------------------------- sharpness

fn sharpness_results(r: &SharpnessResult) -> Value {
    json!({
        "command": "sharpness",
        "target": r.target.name(),
        "which": r.target.tag(),
        "link": r.target.link(),
        "target_constant": r.target_constant,
        "achieved_ratio": r.achieved_ratio,
        "functional": r.functional,
        "bound": r.bound,
        "trials": r.trials,
        "seed": r.seed,
        "n": r.n,
        "dim": r.dim,
    })
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_sharpness(args: &SharpnessArgs) -> Outcome {
    let target: Target = args.target.parse().map_err(|_| {
        let names: Vec<&str> = Target::ALL.iter().map(|t| t.name()).collect();
        Failure::Usage(format!("unknown target `{}`; valid targets: {}", args.target, names.join(", ")))
    })?;
    let result = match sharpness::search(target, args.n, args.dim, args.budget, args.seed) {
        Ok(r) => r,
        Err(Error::InequalityViolated { target, ratio, witness }) => {
            let doc = report(&witness, json!({ "command": "sharpness", "target": target, "ratio": ratio }));
            match &args.witness {
                Some(path) => write_file(path, &doc)?,
                None => println!("{doc}"),
            }
            return Err(Failure::Concern(format!(
                "ratio {ratio} exceeds 1 for {target}; witness dumped"
            )));
        }
        Err(e) => return Err(e.into()),
    };

    let doc = report(&result.witness, sharpness_results(&result));
    if let Some(path) = &args.witness {
        write_file(path, &doc)?;
    }
    if args.json {
        println!("{doc}");
    } else {
        println!("target {} (constant {}, chain {} link {})", target, result.target_constant, target.tag(), target.link());
        println!("  {:<20} {}", "achieved ratio", sci(result.achieved_ratio));
        println!("  {:<20} {}", "functional", sci(result.functional));
        println!("  {:<20} {}", "bound", sci(result.bound));
        println!("  {:<20} {:>24}", "trials", result.trials);
        println!("  {:<20} {:>24}", "seed", result.seed);
        if let Some(path) = &args.witness {
            println!("witness written to {}", path.display());
        }
    }
    Ok(())
}
