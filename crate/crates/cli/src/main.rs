use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use causal_blocking::blocking::{verify_blocking_set, verify_minimality, BlockingError, Minimality};
use causal_blocking::experiment::{replicate_designs, Design};
use causal_blocking::par::{configure_threads, threads_from_env};
use causal_blocking::scm::{load_model, true_effect_with, DiscreteScm};
use causal_blocking::{c_components, parse_graph, stable_causal_blocking, Admg, BlockingReport, NodeSet};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "causal-blocking", version, about = "Stable blocking sets for randomized experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Graph document
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Model document (simulate)
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Comma-separated blocking set overriding the computed or baseline sets
    #[arg(long, global = true)]
    blocking: Option<String>,
    /// Units per experiment
    #[arg(long, global = true, default_value_t = 100)]
    n: usize,
    /// Replications per design
    #[arg(long, global = true, default_value_t = 10)]
    reps: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Midpoint quadrature points per latent
    #[arg(long, global = true, default_value_t = 32)]
    quadrature: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the stable blocking set
    Block { path: Option<PathBuf> },
    /// Print the c-component partition
    Ccomp { path: Option<PathBuf> },
    /// Check separation, stability and minimality
    Verify { path: Option<PathBuf> },
    /// Simulate completely randomized and blocked experiments
    Simulate { path: Option<PathBuf> },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Output {
    Json,
    Csv,
    Text,
}

/// Usage or input error (exit 2).
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Outcome {
    stdout: String,
    failed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = std::panic::catch_unwind(|| run(&cli));
    match result {
        Ok(Ok(out)) => {
            print!("{}", out.stdout);
            ExitCode::from(if out.failed { 1 } else { 0 })
        }
        Ok(Err(Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Usage> {
    configure_threads(threads_from_env().map_err(Usage)?);
    match &cli.command {
        Command::Block { path } => cmd_block(cli, &load_graph(path, &cli.graph)?),
        Command::Ccomp { path } => cmd_ccomp(cli, &load_graph(path, &cli.graph)?),
        Command::Verify { path } => cmd_verify(cli, &load_graph(path, &cli.graph)?),
        Command::Simulate { path } => {
            let path = path
                .as_ref()
                .or(cli.model.as_ref())
                .ok_or_else(|| Usage("simulate needs a model (--model PATH)".into()))?;
            cmd_simulate(cli, path)
        }
    }
}

fn load_graph(positional: &Option<PathBuf>, flag: &Option<PathBuf>) -> Result<Admg, Usage> {
    let path = positional
        .as_ref()
        .or(flag.as_ref())
        .ok_or_else(|| Usage("no graph given (--graph PATH)".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn no_csv(cli: &Cli, what: &str) -> Result<(), Usage> {
    if cli.output == Output::Csv {
        return Err(Usage(format!("csv output is not available for {what}")));
    }
    Ok(())
}

fn list(set: &NodeSet) -> String {
    set.names().join(", ")
}

fn cmd_block(cli: &Cli, graph: &Admg) -> Result<Outcome, Usage> {
    no_csv(cli, "block")?;
    let report = stable_causal_blocking(graph);
    let stdout = match cli.output {
        Output::Text => block_text(&report),
        _ => render_json(&report.to_json()),
    };
    Ok(Outcome { stdout, failed: false })
}

fn flag_text(v: Option<bool>) -> String {
    v.map_or("unverified: size".to_string(), |b| b.to_string())
}

fn block_text(r: &BlockingReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "treatment: {}", r.treatment);
    let _ = writeln!(s, "response: {}", r.response);
    let _ = writeln!(s, "z_star: {}", list(&r.z_star));
    let _ = writeln!(s, "pre_stability_set: {}", list(&r.pre_stability_set));
    let _ = writeln!(s, "post_treatment_set: {}", list(&r.post_treatment_set));
    let _ = writeln!(s, "c_component_of_y: {}", list(&r.c_component_of_y));
    let _ = writeln!(s, "c_component_parents: {}", list(&r.c_component_parents));
    let _ = writeln!(s, "removed_no_path: {}", list(&r.trace.removed_no_path));
    let _ = writeln!(s, "removed_non_ancestors: {}", list(&r.trace.removed_non_ancestors));
    let _ = writeln!(s, "verified_d_separation: {}", flag_text(r.verified_d_separation));
    let _ = writeln!(s, "verified_stable: {}", flag_text(r.verified_stable));
    for note in &r.notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

fn cmd_ccomp(cli: &Cli, graph: &Admg) -> Result<Outcome, Usage> {
    no_csv(cli, "ccomp")?;
    let p = c_components(graph);
    let stdout = match cli.output {
        Output::Text => p.components.iter().map(|c| format!("{{{}}}\n", list(c))).collect(),
        _ => render_json(&json!({ "components": p.components })),
    };
    Ok(Outcome { stdout, failed: false })
}

fn cmd_verify(cli: &Cli, graph: &Admg) -> Result<Outcome, Usage> {
    no_csv(cli, "verify")?;
    let mut report = stable_causal_blocking(graph);
    let (set, d_sep, stable) = match &cli.blocking {
        Some(list) => {
            let z = NodeSet::parse_list(list)?;
            let v = verify_blocking_set(graph, &report, &z)?;
            report.pre_stability_set = z.union(&report.post_treatment_set);
            (z, Some(v.d_separation), Some(v.stable))
        }
        None => (
            report.z_star.clone(),
            report.verified_d_separation,
            report.verified_stable,
        ),
    };
    let (minimality, min_ok) = match verify_minimality(&report) {
        Ok(Minimality::Minimal) => (json!("minimal"), true),
        Ok(Minimality::SmallerSet(s)) => (json!({ "smaller_set": s }), false),
        Ok(Minimality::NotSeparating) => (json!("not separating"), false),
        Err(BlockingError::TooLarge { .. }) => (json!("skipped: size"), true),
        Err(e) => return Err(Usage(e.to_string())),
    };
    let failed = d_sep == Some(false) || stable == Some(false) || !min_ok;
    let flag = |v: Option<bool>| v.map_or(json!("unverified: size"), Value::Bool);
    let doc = json!({
        "blocking_set": set,
        "d_separation": flag(d_sep),
        "stable": flag(stable),
        "minimality": minimality,
        "passed": !failed,
    });
    let stdout = match cli.output {
        Output::Text => {
            let min_text = match &doc["minimality"] {
                Value::String(s) => s.clone(),
                other => format!("smaller set {}", other["smaller_set"]),
            };
            format!(
                "blocking_set: {}\nd_separation: {}\nstable: {}\nminimality: {}\npassed: {}\n",
                list(&set),
                flag_text(d_sep),
                flag_text(stable),
                min_text,
                !failed
            )
        }
        _ => render_json(&doc),
    };
    Ok(Outcome { stdout, failed })
}

/// Blocking sets listed one per line in `<model stem>.baselines`; `-` or an
/// empty list is the empty set.
fn baseline_designs(model_path: &Path, model: &DiscreteScm) -> Result<Vec<Design>, Usage> {
    let manifest = model_path.with_extension("baselines");
    if !manifest.exists() {
        let z = stable_causal_blocking(model.graph()).z_star;
        return Ok(vec![Design::Crd, Design::from_blocking(z)]);
    }
    let text = std::fs::read_to_string(&manifest)
        .map_err(|e| Usage(format!("{}: {e}", manifest.display())))?;
    let mut designs = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let entry = if line == "-" { "" } else { line };
        let z = NodeSet::parse_list(entry).map_err(|e| Usage(format!("{}: {e}", manifest.display())))?;
        designs.push(Design::from_blocking(z));
    }
    if designs.is_empty() {
        return Err(Usage(format!("{}: no blocking sets listed", manifest.display())));
    }
    Ok(designs)
}

fn cmd_simulate(cli: &Cli, model_path: &Path) -> Result<Outcome, Usage> {
    if cli.n < 2 {
        return Err(Usage("--n must be at least 2".into()));
    }
    if cli.reps < 1 {
        return Err(Usage("--reps must be at least 1".into()));
    }
    let model = load_model(model_path).map_err(|e| Usage(format!("{}: {e}", model_path.display())))?;
    let designs = match &cli.blocking {
        Some(list) => vec![Design::from_blocking(NodeSet::parse_list(list)?)],
        None => baseline_designs(model_path, &model)?,
    };
    let table = replicate_designs(&model, &designs, cli.n, cli.reps, cli.seed)?;
    let stdout = match cli.output {
        Output::Csv => table.to_csv(),
        Output::Json => {
            let beta = true_effect_with(&model, cli.quadrature, Default::default())?;
            let mut doc = table.to_json();
            doc["true_effect"] = json!(beta);
            doc["quadrature"] = json!(cli.quadrature);
            render_json(&doc)
        }
        Output::Text => {
            let beta = true_effect_with(&model, cli.quadrature, Default::default())?;
            let mut s = format!(
                "n = {}, reps = {}, seed = {}, true effect = {beta:.6}\n",
                cli.n, cli.reps, cli.seed
            );
            let _ = writeln!(
                s,
                "{:<6} {:<48} {:>10} {:>10} {:>10} {:>10}",
                "design", "blocking set", "effect", "response", "var(Y)", "pooled"
            );
            for d in table.summaries() {
                let z = d.design.blocking();
                let label = if z.is_empty() { "-".to_string() } else { list(&z) };
                let _ = writeln!(
                    s,
                    "{:<6} {:<48} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
                    d.design.kind(),
                    label,
                    d.mean_effect,
                    d.mean_response,
                    d.mean_response_variance,
                    d.pooled_response_variance
                );
            }
            s
        }
    };
    Ok(Outcome { stdout, failed: false })
}
