//! Command line front end: path reduction, independence reports, hyph
//! construction and refinement, generalized connections, integration, and
//! gauge operations.
//!
//! Results print on stdout.  Malformed input exits 2; a violated check
//! (failed invariance probe, inconsistent refinement, broken internal
//! invariant) exits 3.

mod expr;
mod format;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hyphal::connection::{ExtensionPolicy, GeneralizedConnection};
use hyphal::gauge::{integrate_quotient, wilson_loop, GaugeTransform};
use hyphal::geometry::{point_at, rat, subpath};
use hyphal::germs::{is_hyph, is_independent, FreeSide};
use hyphal::group::GroupDescriptor;
use hyphal::groupoid::{equivalent, reduce, PathWord, ReducedPath};
use hyphal::hyph::{build_hyph, factorize, refine, Hyph};
use hyphal::measure::{
    consistency_check, integrate, CylindricalFunction, IntegrationMode, IntegrationResult,
    McParams, MeasureValue,
};

use format::{
    exact_to_f64, format_c64, format_cexact, format_element, format_element_list, format_point,
    format_reduced, format_word, load_connection, load_paths, load_table_body, parse_element,
    parse_element_list, parse_path_word, parse_transform, parse_word, path_breakpoints,
    save_connection,
};

#[derive(Debug)]
pub enum CliError {
    /// Malformed or unusable input: exit 2.
    Input(String),
    /// A checked property failed to hold: exit 3.
    Violation(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Violation(m) => write!(f, "{m}"),
        }
    }
}

impl From<hyphal::Error> for CliError {
    fn from(e: hyphal::Error) -> Self {
        match e {
            hyphal::Error::InternalInvariant { .. } | hyphal::Error::InvarianceProbeFailed => {
                CliError::Violation(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "hyphal",
    version,
    about = "Piecewise-linear path groupoids, hyphs, connections, and their uniform measure"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a word of named paths to its canonical representative.
    Reduce(ReduceArgs),
    /// Decide whether two words of named paths are the same reduced path.
    Relations(RelationsArgs),
    /// Report a free point per path, or which paths lack one.
    Independent(FamilyArgs),
    /// Decompose arbitrary paths into an independent edge family.
    Hyph(FamilyArgs),
    /// Merge two independent families into a common refinement.
    Refine(RefineArgs),
    /// Express a path as a signed word over an independent family.
    Factorize(FactorizeArgs),
    /// Evaluate, pin, prescribe, or project a generalized connection.
    #[command(subcommand)]
    Connection(ConnCmd),
    /// Integrate a cylindrical function against the uniform measure.
    Integrate(IntegrateArgs),
    /// Gauge actions, loop observables, and quotient integrals.
    #[command(subcommand)]
    Gauge(GaugeCmd),
}

#[derive(Args)]
struct ReduceArgs {
    /// JSON path-set file.
    #[arg(long)]
    paths: PathBuf,
    /// Word in named paths, e.g. "a * a^-1".
    word: String,
    /// Emit a path-set file instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RelationsArgs {
    #[arg(long)]
    paths: PathBuf,
    left: String,
    right: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    paths: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RefineArgs {
    /// Path-set file for the first family.
    #[arg(long)]
    coarse: PathBuf,
    /// Path-set file for the second family.
    #[arg(long)]
    fine: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FactorizeArgs {
    /// Path-set file whose entries form the independent family.
    #[arg(long)]
    family: PathBuf,
    /// Path-set file naming the letters of the word to factorize.
    #[arg(long)]
    paths: PathBuf,
    /// Word in named paths.
    word: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ConnSource {
    /// Starting connection file; omit to start fresh with --group.
    #[arg(long)]
    conn: Option<PathBuf>,
    /// Group tag for a fresh connection: Z<n>, Q8, U1, SU2.
    #[arg(long)]
    group: Option<String>,
    /// Equality tolerance for Lie backends.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Value rule for edges created by extension: identity or haar.
    #[arg(long, default_value = "identity")]
    policy: String,
    /// Seed for the haar policy stream.
    #[arg(long, default_value_t = 0)]
    policy_seed: u64,
}

impl ConnSource {
    fn resolve(&self) -> CliResult<GeneralizedConnection> {
        if let Some(file) = &self.conn {
            return load_connection(file);
        }
        let tag = self
            .group
            .as_deref()
            .ok_or_else(|| CliError::Input("give --conn FILE or --group TAG".into()))?;
        let group = GroupDescriptor::from_tag(tag)?.with_tolerance(self.tolerance);
        let policy = match self.policy.as_str() {
            "identity" => ExtensionPolicy::Identity,
            "haar" => ExtensionPolicy::Haar {
                seed: self.policy_seed,
            },
            other => {
                return Err(CliError::Input(format!(
                    "unknown policy {other:?} (expected identity or haar)"
                )))
            }
        };
        Ok(GeneralizedConnection::new(group, policy))
    }
}

#[derive(Subcommand)]
enum ConnCmd {
    /// Evaluate the connection on a word of named paths.
    Eval(ConnEvalArgs),
    /// Return a connection taking a target value on one edge.
    Modify(ConnModifyArgs),
    /// Return a connection with chosen values on an independent family.
    Prescribe(ConnPrescribeArgs),
    /// Evaluate the connection on every edge of an independent family.
    Project(ConnProjectArgs),
}

#[derive(Args)]
struct ConnEvalArgs {
    #[command(flatten)]
    source: ConnSource,
    #[arg(long)]
    paths: PathBuf,
    /// Word in named paths to evaluate.
    word: String,
    /// Write the post-evaluation connection (support may have grown).
    #[arg(long)]
    save: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ConnModifyArgs {
    #[command(flatten)]
    source: ConnSource,
    #[arg(long)]
    paths: PathBuf,
    /// Word in named paths giving the edge to pin.
    #[arg(long)]
    edge: String,
    /// Target element in the backend's plain form.
    #[arg(long)]
    target: String,
    #[arg(long)]
    save: Option<PathBuf>,
}

#[derive(Args)]
struct ConnPrescribeArgs {
    #[command(flatten)]
    source: ConnSource,
    /// Path-set file listing the family, in value order.
    #[arg(long)]
    paths: PathBuf,
    /// Semicolon-separated target elements, one per path.
    #[arg(long)]
    values: String,
    #[arg(long)]
    save: Option<PathBuf>,
}

#[derive(Args)]
struct ConnProjectArgs {
    #[command(flatten)]
    source: ConnSource,
    #[arg(long)]
    paths: PathBuf,
    #[arg(long)]
    save: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long)]
    paths: PathBuf,
    /// Group tag: Z<n>, Q8, U1, SU2.
    #[arg(long)]
    group: String,
    /// Equality tolerance for Lie backends.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Body expression over x1..xn; omit when --body-table is given.
    body: Option<String>,
    /// JSON table of exact values for a finite backend.
    #[arg(long)]
    body_table: Option<PathBuf>,
    /// Monte Carlo sample count for Lie backends.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Re-integrate on a midpoint refinement and require agreement.
    #[arg(long)]
    check_refinement: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum GaugeCmd {
    /// Apply a gauge transform to an edge configuration.
    Act(GaugeActArgs),
    /// Class value of a closed signed word in an edge configuration.
    Wilson(GaugeWilsonArgs),
    /// Integrate a gauge-invariant function over the quotient.
    #[command(name = "integrate-quotient")]
    IntegrateQuotient(IntegrateArgs),
}

#[derive(Args)]
struct GaugeActArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long)]
    paths: PathBuf,
    /// Semicolon-separated edge values, one per path.
    #[arg(long)]
    config: String,
    /// Semicolon-separated point assignments, e.g. "(0,0):2;(1,0):5".
    #[arg(long)]
    transform: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GaugeWilsonArgs {
    #[arg(long)]
    group: String,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long)]
    paths: PathBuf,
    #[arg(long)]
    config: String,
    /// Comma-separated signed 1-based edge indices, e.g. "1,-2".
    #[arg(long)]
    word: String,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Violation(m)) => {
            eprintln!("violation: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Reduce(a) => cmd_reduce(a),
        Cmd::Relations(a) => cmd_relations(a),
        Cmd::Independent(a) => cmd_independent(a),
        Cmd::Hyph(a) => cmd_hyph(a),
        Cmd::Refine(a) => cmd_refine(a),
        Cmd::Factorize(a) => cmd_factorize(a),
        Cmd::Connection(c) => match c {
            ConnCmd::Eval(a) => cmd_conn_eval(a),
            ConnCmd::Modify(a) => cmd_conn_modify(a),
            ConnCmd::Prescribe(a) => cmd_conn_prescribe(a),
            ConnCmd::Project(a) => cmd_conn_project(a),
        },
        Cmd::Integrate(a) => cmd_integrate(a),
        Cmd::Gauge(g) => match g {
            GaugeCmd::Act(a) => cmd_gauge_act(a),
            GaugeCmd::Wilson(a) => cmd_gauge_wilson(a),
            GaugeCmd::IntegrateQuotient(a) => cmd_gauge_quotient(a),
        },
    }
}

fn cmd_reduce(a: ReduceArgs) -> CliResult<()> {
    let set = load_paths(&a.paths)?;
    let word = parse_path_word(&a.word, &set)?;
    let r = reduce(&word)?;
    if a.json {
        let breakpoints = path_breakpoints(r.carrier())?;
        let out = json!({
            "dimension": set.dimension,
            "paths": [{"name": "reduced", "breakpoints": breakpoints}],
        });
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("{}", format_reduced(&r));
    }
    Ok(())
}

fn cmd_relations(a: RelationsArgs) -> CliResult<()> {
    let set = load_paths(&a.paths)?;
    let left = parse_path_word(&a.left, &set)?;
    let right = parse_path_word(&a.right, &set)?;
    let same = equivalent(&left, &right)?;
    if a.json {
        println!("{}", json!({ "equivalent": same }));
    } else {
        println!("{}", if same { "equivalent" } else { "different" });
    }
    Ok(())
}

fn cmd_independent(a: FamilyArgs) -> CliResult<()> {
    let set = load_paths(&a.paths)?;
    let edges = set.reduced()?;
    match is_hyph(&edges)? {
        Some(witnesses) => {
            let mut rows = Vec::new();
            for (i, (e, w)) in edges.iter().zip(&witnesses).enumerate() {
                let at = point_at(e.carrier(), &w.location)?;
                let side = match w.side {
                    FreeSide::Outgoing => "outgoing",
                    FreeSide::Incoming => "incoming",
                };
                rows.push((i, side, at));
            }
            if a.json {
                let list: Vec<_> = rows
                    .iter()
                    .map(|(i, side, at)| {
                        json!({
                            "name": set.names[*i],
                            "side": side,
                            "point": format_point(at),
                        })
                    })
                    .collect();
                println!("{}", json!({ "independent": true, "witnesses": list }));
            } else {
                println!("independent");
                for (i, side, at) in rows {
                    println!(
                        "  {} : free {} germ at {}",
                        set.names[i],
                        side,
                        format_point(&at)
                    );
                }
            }
        }
        None => {
            let mut failing = Vec::new();
            for i in 0..edges.len() {
                let family: Vec<&ReducedPath> = edges
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, e)| e)
                    .collect();
                if is_independent(&edges[i], &family)?.is_none() {
                    failing.push(set.names[i].clone());
                }
            }
            if a.json {
                println!("{}", json!({ "independent": false, "failing": failing }));
            } else {
                println!("not independent");
                for name in failing {
                    println!("  {name} : no free germ");
                }
            }
        }
    }
    Ok(())
}

fn cmd_hyph(a: FamilyArgs) -> CliResult<()> {
    let set = load_paths(&a.paths)?;
    let inputs = set.reduced()?;
    let (h, words) = build_hyph(&inputs)?;
    if a.json {
        let edges = h
            .edges()
            .iter()
            .map(|e| path_breakpoints(e.carrier()))
            .collect::<CliResult<Vec<_>>>()?;
        let word_rows: Vec<_> = set
            .names
            .iter()
            .zip(&words)
            .map(|(n, w)| json!({ "name": n, "word": format_word(w) }))
            .collect();
        println!("{}", json!({ "edges": edges, "words": word_rows }));
    } else {
        println!("edges: {}", h.len());
        for (i, e) in h.edges().iter().enumerate() {
            println!("  {}: {}", i + 1, format_reduced(e));
        }
        println!("words:");
        for (name, w) in set.names.iter().zip(&words) {
            println!("  {} = {}", name, format_word(w));
        }
    }
    Ok(())
}

fn cmd_refine(a: RefineArgs) -> CliResult<()> {
    let cset = load_paths(&a.coarse)?;
    let fset = load_paths(&a.fine)?;
    if cset.dimension != fset.dimension {
        return Err(CliError::Input(format!(
            "dimension mismatch: {} vs {}",
            cset.dimension, fset.dimension
        )));
    }
    let h1 = Hyph::new(cset.reduced()?)?;
    let h2 = Hyph::new(fset.reduced()?)?;
    let (h, w1, w2) = refine(&h1, &h2)?;
    if a.json {
        let edges = h
            .edges()
            .iter()
            .map(|e| path_breakpoints(e.carrier()))
            .collect::<CliResult<Vec<_>>>()?;
        let rows = |names: &[String], ws: &[hyphal::hyph::Factorization]| -> Vec<serde_json::Value> {
            names
                .iter()
                .zip(ws)
                .map(|(n, w)| json!({ "name": n, "word": format_word(w) }))
                .collect()
        };
        println!(
            "{}",
            json!({
                "edges": edges,
                "first": rows(&cset.names, &w1),
                "second": rows(&fset.names, &w2),
            })
        );
    } else {
        println!("edges: {}", h.len());
        for (i, e) in h.edges().iter().enumerate() {
            println!("  {}: {}", i + 1, format_reduced(e));
        }
        println!("first family:");
        for (name, w) in cset.names.iter().zip(&w1) {
            println!("  {} = {}", name, format_word(w));
        }
        println!("second family:");
        for (name, w) in fset.names.iter().zip(&w2) {
            println!("  {} = {}", name, format_word(w));
        }
    }
    Ok(())
}

fn cmd_factorize(a: FactorizeArgs) -> CliResult<()> {
    let fam = load_paths(&a.family)?;
    let set = load_paths(&a.paths)?;
    let h = Hyph::new(fam.reduced()?)?;
    let target = reduce(&parse_path_word(&a.word, &set)?)?;
    match factorize(&target, &h) {
        Some(w) => {
            if a.json {
                println!("{}", json!({ "word": format_word(&w) }));
            } else {
                println!("{}", format_word(&w));
            }
        }
        None => {
            if a.json {
                println!("{}", json!({ "word": null }));
            } else {
                println!("not a word over this family");
            }
        }
    }
    Ok(())
}

fn cmd_conn_eval(a: ConnEvalArgs) -> CliResult<()> {
    let mut conn = a.source.resolve()?;
    let set = load_paths(&a.paths)?;
    let word = parse_path_word(&a.word, &set)?;
    let v = conn.evaluate(&word)?;
    if let Some(file) = &a.save {
        save_connection(file, &conn)?;
    }
    if a.json {
        println!("{}", json!({ "value": format_element(&v) }));
    } else {
        println!("{}", format_element(&v));
    }
    Ok(())
}

fn cmd_conn_modify(a: ConnModifyArgs) -> CliResult<()> {
    let conn = a.source.resolve()?;
    let set = load_paths(&a.paths)?;
    let edge = reduce(&parse_path_word(&a.edge, &set)?)?;
    let target = parse_element(conn.group(), &a.target)?;
    let out = conn.modify(&edge, target)?;
    if let Some(file) = &a.save {
        save_connection(file, &out)?;
    }
    println!("modifiers: {}", out.modifiers().len());
    Ok(())
}

fn cmd_conn_prescribe(a: ConnPrescribeArgs) -> CliResult<()> {
    let conn = a.source.resolve()?;
    let set = load_paths(&a.paths)?;
    let edges = set.reduced()?;
    let values = parse_element_list(conn.group(), &a.values)?;
    let out = conn.prescribe(&edges, &values)?;
    if let Some(file) = &a.save {
        save_connection(file, &out)?;
    }
    println!(
        "prescribed {} edges; modifiers: {}",
        edges.len(),
        out.modifiers().len()
    );
    Ok(())
}

fn cmd_conn_project(a: ConnProjectArgs) -> CliResult<()> {
    let mut conn = a.source.resolve()?;
    let set = load_paths(&a.paths)?;
    let h = Hyph::new(set.reduced()?)?;
    let values = conn.project(&h)?;
    if let Some(file) = &a.save {
        save_connection(file, &conn)?;
    }
    if a.json {
        let list: Vec<String> = values.iter().map(format_element).collect();
        println!("{}", json!({ "values": list }));
    } else {
        println!("{}", format_element_list(&values));
    }
    Ok(())
}

struct IntegrateSetup {
    group: GroupDescriptor,
    f: CylindricalFunction,
    params: McParams,
}

fn setup_integrate(a: &IntegrateArgs) -> CliResult<IntegrateSetup> {
    let group = GroupDescriptor::from_tag(&a.group)?.with_tolerance(a.tolerance);
    let set = load_paths(&a.paths)?;
    let support = Hyph::new(set.reduced()?)?;
    let f = match (&a.body, &a.body_table) {
        (Some(src), None) => expr::compile_body(src, &group, support)?,
        (None, Some(file)) => load_table_body(file, &group, support)?,
        _ => {
            return Err(CliError::Input(
                "give a body expression or --body-table, not both".into(),
            ))
        }
    };
    Ok(IntegrateSetup {
        group,
        f,
        params: McParams {
            samples: a.samples,
            seed: a.seed,
        },
    })
}

/// Splits every support edge at its halfway point and rebuilds; the result
/// dominates the support, so integrals must agree on it.
fn midpoint_refinement(support: &Hyph) -> CliResult<Hyph> {
    let mut pieces = Vec::new();
    for e in support.edges() {
        let c = e.carrier();
        let end = c.global(&c.end_location());
        let mid = c.location_at_global(&(end / rat(2, 1)));
        let first = subpath(c, &c.start_location(), &mid)?;
        let second = subpath(c, &mid, &c.end_location())?;
        pieces.push(reduce(&PathWord::single(first))?);
        pieces.push(reduce(&PathWord::single(second))?);
    }
    let (h, _) = build_hyph(&pieces)?;
    Ok(h)
}

fn format_value(v: &MeasureValue) -> String {
    match v {
        MeasureValue::Exact(z) => format_cexact(z),
        MeasureValue::Float(c) => format_c64(c),
    }
}

fn print_result(r: &IntegrationResult, as_json: bool, refinement: Option<bool>) {
    if as_json {
        let c = r.value.as_complex();
        let mut obj = json!({
            "re": c.re,
            "im": c.im,
            "mode": match r.mode {
                IntegrationMode::Exact => "exact",
                IntegrationMode::MonteCarlo => "monte_carlo",
            },
            "standard_error": r.standard_error,
            "samples": r.sample_count,
        });
        if let MeasureValue::Exact(z) = &r.value {
            obj["exact_re"] = json!(format::format_rat(&z.re));
            obj["exact_im"] = json!(format::format_rat(&z.im));
            obj["re"] = json!(exact_to_f64(&z.re));
            obj["im"] = json!(exact_to_f64(&z.im));
        }
        if let Some(ok) = refinement {
            obj["refinement_consistent"] = json!(ok);
        }
        println!("{obj}");
    } else {
        match (&r.value, r.mode) {
            (MeasureValue::Exact(_), _) => println!("{} (exact)", format_value(&r.value)),
            (MeasureValue::Float(_), IntegrationMode::Exact) => {
                println!("{} (enumerated)", format_value(&r.value))
            }
            (_, IntegrationMode::MonteCarlo) => println!(
                "{} (monte carlo, standard error {}, samples {})",
                format_value(&r.value),
                r.standard_error,
                r.sample_count
            ),
        }
        if refinement == Some(true) {
            println!("refinement check: consistent");
        }
    }
}

fn run_refinement_check(setup: &IntegrateSetup) -> CliResult<IntegrationResult> {
    let fine = midpoint_refinement(setup.f.support())?;
    let report = consistency_check(&setup.group, &setup.f, &fine, &setup.params)
        .map_err(|e| CliError::Violation(e.to_string()))?;
    if !report.consistent {
        return Err(CliError::Violation(format!(
            "integral changed under refinement: coarse {} vs fine {}",
            format_value(&report.coarse.value),
            format_value(&report.fine.value)
        )));
    }
    Ok(report.coarse)
}

fn cmd_integrate(a: IntegrateArgs) -> CliResult<()> {
    let setup = setup_integrate(&a)?;
    let (result, refinement) = if a.check_refinement {
        (run_refinement_check(&setup)?, Some(true))
    } else {
        (integrate(&setup.group, &setup.f, &setup.params)?, None)
    };
    print_result(&result, a.json, refinement);
    Ok(())
}

fn cmd_gauge_act(a: GaugeActArgs) -> CliResult<()> {
    let group = GroupDescriptor::from_tag(&a.group)?.with_tolerance(a.tolerance);
    let set = load_paths(&a.paths)?;
    let h = Hyph::new(set.reduced()?)?;
    let config = parse_element_list(&group, &a.config)?;
    let t = GaugeTransform::new(group, parse_transform(&group, set.dimension, &a.transform)?)?;
    let moved = t.act(&h, &config)?;
    if a.json {
        let list: Vec<String> = moved.iter().map(format_element).collect();
        println!("{}", json!({ "values": list }));
    } else {
        println!("{}", format_element_list(&moved));
    }
    Ok(())
}

fn cmd_gauge_wilson(a: GaugeWilsonArgs) -> CliResult<()> {
    let group = GroupDescriptor::from_tag(&a.group)?.with_tolerance(a.tolerance);
    let set = load_paths(&a.paths)?;
    let h = Hyph::new(set.reduced()?)?;
    let config = parse_element_list(&group, &a.config)?;
    let word = parse_word(&a.word)?;
    let v = wilson_loop(&group, &h, &word, &config)?;
    if a.json {
        println!("{}", json!({ "re": v.re, "im": v.im }));
    } else {
        println!("{}", format_c64(&v));
    }
    Ok(())
}

fn cmd_gauge_quotient(a: IntegrateArgs) -> CliResult<()> {
    let setup = setup_integrate(&a)?;
    let refinement = if a.check_refinement {
        run_refinement_check(&setup)?;
        Some(true)
    } else {
        None
    };
    let result = integrate_quotient(&setup.group, &setup.f, &setup.params)?;
    print_result(&result, a.json, refinement);
    Ok(())
}
