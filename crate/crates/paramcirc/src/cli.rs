//! Argument grammar and dispatch. Every command is a thin wrapper around one
//! or two library calls and returns a [`Report`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use paramcirc_core::algebra::{Rational, VarNames};
use paramcirc_core::arithmetize::{count_satisfying, standard_arithmetization, CountOptions};
use paramcirc_core::circuit::{Circuit, DivisionClass, Robustness};
use paramcirc_core::elim::{
    eliminate_enum, eliminate_enum_truncated, eliminate_multmatrix, family_with_rng, witness_delta_rank,
    witness_l_independence, ElimResult, Family, FamilyKind,
};
use paramcirc_core::identity::{equiv, Mode, Verdict};
use paramcirc_core::pochhammer::{gen_chain, verify_chain, ChainVerdict, PochChain, RejectReason};
use paramcirc_core::semantics::{eval_numeric, interpret, restrict, Budget};
use paramcirc_core::transforms::{join, reduce};

use crate::formats::{parse_bool, parse_circ, parse_manifest, render_circ, render_manifest};
use crate::report::{exit, Failure, Report};

pub const MANIFEST: &str = "chain.manifest";

#[derive(Debug, Parser)]
#[command(name = "paramcirc", version, about = "Parameterized arithmetic circuits over exact rationals")]
pub struct Cli {
    /// Emit one JSON document instead of text lines.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every random choice; drawn from OS entropy and printed when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Cap on the number of terms of any intermediate polynomial.
    #[arg(long, global = true, default_value_t = paramcirc_core::DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Arithmetic circuits.
    #[command(subcommand)]
    Circ(CircCommand),
    /// Boolean circuits.
    #[command(subcommand)]
    Bool(BoolCommand),
    /// Satisfiability counting.
    #[command(subcommand)]
    Count(CountCommand),
    /// Elimination families, oracles and witnesses.
    #[command(subcommand)]
    Elim(ElimCommand),
    /// Falling-factorial chains.
    #[command(subcommand)]
    Poch(PochCommand),
}

#[derive(Debug, Subcommand)]
pub enum CircCommand {
    /// Size measures and node classification.
    Stats { file: PathBuf },
    /// Merge nodes with equal intermediate results.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Feed outputs of the first circuit into the inputs of the second.
    Join {
        first: PathBuf,
        second: PathBuf,
        /// 0-based output positions of FIRST, one per input of SECOND.
        #[arg(long, value_delimiter = ',')]
        map: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace parameters by constants, e.g. `--assign 1=2,3=-1/2`.
    Restrict {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        assign: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identity test between two circuits.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = EquivMode::Exact)]
        mode: EquivMode,
        #[arg(long, default_value_t = 8)]
        trials: u32,
    },
    /// Evaluate at a point, or symbolically with `--symbolic`.
    Eval {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
        #[arg(long)]
        symbolic: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquivMode {
    Exact,
    Modular,
}

#[derive(Debug, Subcommand)]
pub enum BoolCommand {
    /// Standard arithmetization as a `.circ` circuit.
    Arith {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CountCommand {
    /// Count satisfying inputs at a parameter assignment given as bits, e.g. `--assign 10`.
    Sat {
        file: PathBuf,
        #[arg(long, default_value = "")]
        assign: String,
        /// Read the formulas through F^q.
        #[arg(long, default_value_t = 1)]
        q: u32,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub name: FamilyName,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Basic,
    Hat,
    Boolhard,
    Points,
}

impl From<FamilyName> for FamilyKind {
    fn from(f: FamilyName) -> Self {
        match f {
            FamilyName::Basic => FamilyKind::Basic,
            FamilyName::Hat => FamilyKind::Hat,
            FamilyName::Boolhard => FamilyKind::BoolHard,
            FamilyName::Points => FamilyKind::Points,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ElimCommand {
    /// Encoding circuit or problem of a family member.
    Family {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = Emit::Circ)]
        emit: Emit,
    },
    /// Elimination polynomial F.
    Oracle {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = OracleMethod::Enum)]
        method: OracleMethod,
    },
    /// Rank witnesses read off F.
    Witness {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        which: WitnessKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Circ,
    Problem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMethod {
    Enum,
    Multmatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    DeltaRank,
    LIndep,
}

#[derive(Debug, Subcommand)]
pub enum PochCommand {
    /// Write Γ₀…Γ_n and a manifest into a directory.
    Gen {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify the chain listed in DIR/chain.manifest.
    Verify {
        dir: PathBuf,
        #[arg(long, default_value_t = 8)]
        trials: u32,
    },
}

/// Final streams and exit code of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

struct Ctx {
    budget: Budget,
    seed: Option<u64>,
}

impl Ctx {
    /// Seeded generator; records the seed in the report.
    fn rng(&self, report: &mut Report) -> ChaCha8Rng {
        let seed = self.seed.unwrap_or_else(rand::random);
        report.input("seed", seed).line(format!("seed {seed}"));
        ChaCha8Rng::seed_from_u64(seed)
    }
}

pub fn run(cli: Cli) -> Outcome {
    let ctx = Ctx { budget: Budget::new(cli.max_terms), seed: cli.seed };
    let name = command_name(&cli.command);
    match dispatch(&cli.command, &ctx) {
        Ok(report) => {
            let stdout = if cli.json { report.json() } else { report.text() };
            Outcome { stdout, stderr: String::new(), code: report.code }
        }
        Err(f) => {
            let mut report = Report::new(&name);
            report.verdict("error", f.code).metric("error", f.message.clone());
            let stdout = if cli.json { report.json() } else { String::new() };
            Outcome { stdout, stderr: format!("error: {}\n", f.message), code: f.code }
        }
    }
}

/// Parses `args` (program name first) and runs; usage errors exit 2.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let text = e.render().to_string();
            if code == exit::OK {
                Outcome { stdout: text, stderr: String::new(), code }
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            }
        }
    }
}

fn command_name(c: &Command) -> String {
    let (group, sub) = match c {
        Command::Circ(c) => (
            "circ",
            match c {
                CircCommand::Stats { .. } => "stats",
                CircCommand::Reduce { .. } => "reduce",
                CircCommand::Join { .. } => "join",
                CircCommand::Restrict { .. } => "restrict",
                CircCommand::Equiv { .. } => "equiv",
                CircCommand::Eval { .. } => "eval",
            },
        ),
        Command::Bool(_) => ("bool", "arith"),
        Command::Count(_) => ("count", "sat"),
        Command::Elim(c) => (
            "elim",
            match c {
                ElimCommand::Family { .. } => "family",
                ElimCommand::Oracle { .. } => "oracle",
                ElimCommand::Witness { .. } => "witness",
            },
        ),
        Command::Poch(c) => ("poch", if matches!(c, PochCommand::Gen { .. }) { "gen" } else { "verify" }),
    };
    format!("{group} {sub}")
}

fn dispatch(c: &Command, ctx: &Ctx) -> Result<Report, Failure> {
    let mut r = Report::new(&command_name(c));
    match c {
        Command::Circ(c) => circ(c, ctx, &mut r)?,
        Command::Bool(BoolCommand::Arith { file, out }) => bool_arith(file, out.as_deref(), &mut r)?,
        Command::Count(CountCommand::Sat { file, assign, q }) => count_sat(file, assign, *q, ctx, &mut r)?,
        Command::Elim(c) => elim(c, ctx, &mut r)?,
        Command::Poch(PochCommand::Gen { n, out }) => poch_gen(*n, out, &mut r)?,
        Command::Poch(PochCommand::Verify { dir, trials }) => poch_verify(dir, *trials, ctx, &mut r)?,
    }
    Ok(r)
}

pub fn read_circ(path: &Path) -> Result<Circuit, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_circ(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn path_value(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

/// Writes `text` to `out`, or appends it to the report when there is no
/// destination.
fn emit(text: &str, out: Option<&Path>, key: &str, r: &mut Report) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text)?;
            r.input("out", path_value(path)).line(format!("wrote {}", path.display()));
        }
        None => {
            r.metric(key, text);
            r.lines.extend(text.lines().map(String::from));
        }
    }
    Ok(())
}

fn parse_rational(word: &str) -> Result<Rational, Failure> {
    let bad = || Failure::usage(format!("expected a rational number, found `{word}`"));
    let (n, d) = word.split_once('/').unwrap_or((word, "1"));
    let n: num_bigint::BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: num_bigint::BigInt = d.trim().parse().map_err(|_| bad())?;
    if d == 0.into() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn division_class_name(d: DivisionClass) -> &'static str {
    match d {
        DivisionClass::TotallyDivisionFree => "totally-division-free",
        DivisionClass::EssentiallyDivisionFree => "essentially-division-free",
        DivisionClass::General => "general",
    }
}

fn circ(c: &CircCommand, ctx: &Ctx, r: &mut Report) -> Result<(), Failure> {
    match c {
        CircCommand::Stats { file } => {
            let circuit = read_circ(file)?;
            r.input("file", path_value(file));
            let m = circuit.metrics();
            let class = circuit.division_class()?;
            let robust = match circuit.robustness()? {
                Robustness::Robust => "robust",
                Robustness::Unknown => "unknown",
            };
            r.line(format!(
                "circuit {}: {} params, {} inputs, {} nodes",
                circuit.name(),
                circuit.params(),
                circuit.inputs(),
                m.total_nodes
            ));
            r.line(format!("nonscalar_size {}", m.nonscalar_size))
                .line(format!("nonscalar_depth {}", m.nonscalar_depth))
                .line(format!("essential_mul_count {}", m.essential_mul_count))
                .line(format!("param_mul_count {}", m.param_mul_count))
                .line(format!("division_class {}", division_class_name(class)))
                .line(format!("robustness {robust}"));
            r.metric("total_nodes", m.total_nodes)
                .metric("internal_nodes", m.internal_nodes)
                .metric("nonscalar_size", m.nonscalar_size)
                .metric("nonscalar_depth", m.nonscalar_depth)
                .metric("essential_mul_count", m.essential_mul_count)
                .metric("param_mul_count", m.param_mul_count)
                .metric("division_class", division_class_name(class))
                .metric("robustness", robust);
            let mut classes = Vec::new();
            for f in circuit.classify() {
                let mut tags = vec![if f.is_parameter_node { "parameter" } else { "input-dependent" }];
                if f.is_essential {
                    tags.push("essential");
                }
                if f.counts_nonscalar {
                    tags.push("nonscalar");
                }
                r.line(format!("node {}: {}", f.id, tags.join(" ")));
                classes.push(json!({ "id": f.id, "tags": tags }));
            }
            r.metric("classification", classes);
        }
        CircCommand::Reduce { file, out } => {
            let circuit = read_circ(file)?;
            r.input("file", path_value(file));
            let reduced = reduce(&circuit, ctx.budget)?;
            r.metric("nodes_before", circuit.nodes().len()).metric("nodes_after", reduced.nodes().len());
            r.line(format!("nodes {} -> {}", circuit.nodes().len(), reduced.nodes().len()));
            emit(&render_circ(&reduced), out.as_deref(), "circuit", r)?;
        }
        CircCommand::Join { first, second, map, out } => {
            let (a, b) = (read_circ(first)?, read_circ(second)?);
            r.input("first", path_value(first)).input("second", path_value(second)).input("map", map.clone());
            let joined = join(&a, &b, map, ctx.budget)?;
            r.metric("nodes", joined.nodes().len()).metric("nonscalar_size", joined.metrics().nonscalar_size);
            r.line(format!("nodes {}, nonscalar_size {}", joined.nodes().len(), joined.metrics().nonscalar_size));
            emit(&render_circ(&joined), out.as_deref(), "circuit", r)?;
        }
        CircCommand::Restrict { file, assign, out } => {
            let circuit = read_circ(file)?;
            r.input("file", path_value(file)).input("assign", assign.clone());
            let mut assignment = BTreeMap::new();
            for a in assign {
                let (k, v) = a.split_once('=').ok_or_else(|| Failure::usage(format!("expected k=value, found `{a}`")))?;
                let k: u32 = k.trim().parse().map_err(|_| Failure::usage(format!("bad parameter index `{k}`")))?;
                if k == 0 || k > circuit.params() {
                    return Err(Failure::usage(format!("parameter {k} outside 1..={}", circuit.params())));
                }
                assignment.insert(k, parse_rational(v)?);
            }
            let restricted = restrict(&circuit, &assignment);
            let consistent = interpret(&restricted, ctx.budget).is_ok();
            r.metric("consistent", consistent).line(format!("consistent {consistent}"));
            emit(&render_circ(&restricted), out.as_deref(), "circuit", r)?;
            if !consistent {
                r.verdict("inconsistent", exit::INCONSISTENT);
            }
        }
        CircCommand::Equiv { a, b, mode, trials } => {
            let (ca, cb) = (read_circ(a)?, read_circ(b)?);
            r.input("a", path_value(a)).input("b", path_value(b));
            let mode = match mode {
                EquivMode::Exact => {
                    r.input("mode", "exact");
                    Mode::Exact
                }
                EquivMode::Modular => {
                    r.input("mode", "modular").input("trials", *trials);
                    Mode::Modular { trials: *trials }
                }
            };
            let mut rng = match mode {
                Mode::Exact => ChaCha8Rng::seed_from_u64(0),
                Mode::Modular { .. } => ctx.rng(r),
            };
            let report = equiv(&ca, &cb, mode, ctx.budget, &mut rng)?;
            r.metric("trials_run", report.trials_run)
                .metric("trials_skipped", report.trials_skipped)
                .metric("primes", report.primes.clone());
            match report.verdict {
                Verdict::Equal => {
                    r.verdict("Equal", exit::OK).line("Equal");
                }
                Verdict::Distinct { output, witness } => {
                    r.verdict("Distinct", exit::NEGATIVE).line(format!("Distinct at output {output}"));
                    let mut w = json!({ "output": output });
                    if let Some(wit) = witness {
                        r.line(format!(
                            "witness prime {} params {:?} inputs {:?}: {} vs {}",
                            wit.prime, wit.params, wit.inputs, wit.left, wit.right
                        ));
                        w = json!({
                            "output": output,
                            "prime": wit.prime,
                            "params": wit.params,
                            "inputs": wit.inputs,
                            "left": wit.left,
                            "right": wit.right,
                        });
                    }
                    r.witness = Some(w);
                }
                Verdict::Unknown => {
                    r.verdict("Unknown", exit::USAGE).line("Unknown");
                }
            }
        }
        CircCommand::Eval { file, params, inputs, symbolic } => {
            let circuit = read_circ(file)?;
            r.input("file", path_value(file));
            if *symbolic {
                let interp = interpret(&circuit, ctx.budget)?;
                let names = VarNames::new();
                let finals: Vec<String> = interp.finals().iter().map(|f| f.render(&names)).collect();
                for (o, f) in circuit.outputs().iter().zip(&finals) {
                    r.line(format!("output {o}: {f}"));
                }
                r.metric("finals", finals);
            } else {
                let p = params.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
                let x = inputs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
                r.input("params", params.clone()).input("inputs", inputs.clone());
                let values: Vec<String> = eval_numeric(&circuit, &p, &x)?.iter().map(ToString::to_string).collect();
                for (o, v) in circuit.outputs().iter().zip(&values) {
                    r.line(format!("output {o}: {v}"));
                }
                r.metric("values", values);
            }
        }
    }
    Ok(())
}

fn bool_arith(file: &Path, out: Option<&Path>, r: &mut Report) -> Result<(), Failure> {
    let b = parse_bool(&fs::read_to_string(file)?)?;
    r.input("file", path_value(file));
    let arith = standard_arithmetization(&b);
    r.metric("nodes", arith.circuit.nodes().len())
        .metric("nonscalar_size", arith.circuit.metrics().nonscalar_size)
        .metric("node_map", arith.node_map.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>());
    emit(&render_circ(&arith.circuit), out, "circuit", r)
}

fn count_sat(file: &Path, assign: &str, q: u32, ctx: &Ctx, r: &mut Report) -> Result<(), Failure> {
    let b = parse_bool(&fs::read_to_string(file)?)?;
    r.input("file", path_value(file)).input("assign", assign).input("q", q);
    let u = assign
        .chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Failure::usage(format!("assignment bits must be 0 or 1, found `{other}`"))),
        })
        .collect::<Result<Vec<bool>, _>>()?;
    if u.len() != b.params() as usize {
        return Err(Failure::usage(format!("expected {} assignment bits, found {}", b.params(), u.len())));
    }
    let opts = CountOptions { q, budget: ctx.budget, ..CountOptions::default() };
    let rep = count_satisfying(&b, &u, opts)?;
    let show = |x: Option<u64>| x.map_or("undefined".to_string(), |k| k.to_string());
    r.line(format!("inputs {}, q {}", rep.inputs, rep.q))
        .line(format!("order at Y=0: {}", rep.order))
        .line(format!("phi1: {}", rep.phi1))
        .line(format!("count by order: {}", show(rep.by_order)))
        .line(format!("count by trace: {}", show(rep.by_trace)))
        .line(format!("count by truth table: {}", rep.by_truth_table))
        .line(format!("deg_U phi1 = {} <= deg_U H = {}", rep.phi1_degree, rep.h_degree));
    r.metric("order", rep.order)
        .metric("phi1", rep.phi1.to_string())
        .metric("by_order", rep.by_order)
        .metric("by_trace", rep.by_trace)
        .metric("by_truth_table", rep.by_truth_table)
        .metric("phi1_degree", rep.phi1_degree)
        .metric("h_degree", rep.h_degree);
    if rep.is_consistent() {
        r.verdict("PASS", exit::OK).line(format!("count {} PASS", rep.by_truth_table));
    } else {
        r.verdict("FAIL", exit::NEGATIVE).line("counts disagree FAIL");
    }
    Ok(())
}

fn load_family(args: &FamilyArgs, ctx: &Ctx, r: &mut Report) -> Result<Family, Failure> {
    let kind = FamilyKind::from(args.name);
    r.input("name", kind.name()).input("n", args.n);
    if kind == FamilyKind::Points {
        let mut rng = ctx.rng(r);
        Ok(family_with_rng(kind, args.n, &mut rng)?)
    } else {
        Ok(family_with_rng(kind, args.n, &mut ChaCha8Rng::seed_from_u64(0))?)
    }
}

fn render_f(res: &ElimResult, names: &VarNames, r: &mut Report) {
    let f = res.f.render(names);
    r.metric("terms", res.f.num_terms()).metric("degree", res.degree()).metric("F", f.clone());
    r.line(format!("terms {}", res.f.num_terms())).line(format!("degree {}", res.degree())).line(format!("F = {f}"));
}

fn elim(c: &ElimCommand, ctx: &Ctx, r: &mut Report) -> Result<(), Failure> {
    match c {
        ElimCommand::Family { family, emit: what } => {
            let fam = load_family(family, ctx, r)?;
            r.input("emit", if *what == Emit::Circ { "circ" } else { "problem" });
            r.metric("nonscalar_size", fam.circuit.metrics().nonscalar_size);
            match what {
                Emit::Circ => emit(&render_circ(&fam.circuit), None, "circuit", r)?,
                Emit::Problem => {
                    let names = &fam.problem.names;
                    let eqs: Vec<String> = fam.problem.equations.iter().map(|g| g.render(names)).collect();
                    for (i, g) in eqs.iter().enumerate() {
                        r.line(format!("G{} = {g}", i + 1));
                    }
                    let h = fam.problem.h.render(names);
                    r.line(format!("H = {h}"));
                    r.metric("equations", eqs).metric("H", h);
                    if let Some(p) = &fam.points {
                        r.line(format!("points {}", p.xi.set.points.len())).line(p.formula.clone());
                        r.metric("points", p.xi.set.points.len()).metric("formula", p.formula.clone());
                    }
                }
            }
        }
        ElimCommand::Oracle { family, method } => {
            let fam = load_family(family, ctx, r)?;
            let res = match method {
                OracleMethod::Enum => {
                    r.input("method", "enum");
                    eliminate_enum(&fam.problem, ctx.budget)?
                }
                OracleMethod::Multmatrix => {
                    r.input("method", "multmatrix");
                    eliminate_multmatrix(&fam.problem, ctx.budget)?
                }
            };
            render_f(&res, &fam.problem.names, r);
        }
        ElimCommand::Witness { family, which } => {
            let fam = load_family(family, ctx, r)?;
            let n = family.n;
            let res = if fam.problem.is_boolean() {
                eliminate_enum_truncated(&fam.problem, 1, ctx.budget)?
            } else {
                eliminate_multmatrix(&fam.problem, ctx.budget)?
            };
            let (label, w) = match which {
                WitnessKind::DeltaRank => ("delta-rank", witness_delta_rank(&res, n)),
                WitnessKind::LIndep => ("l-indep", witness_l_independence(&res, n)?),
            };
            r.input("which", label);
            let verdict = if w.passed() { "PASS" } else { "FAIL" };
            let rel = if w.passed() { "=" } else { "!=" };
            r.line(format!("rank {} {rel} 2^{n} {verdict}", w.rank));
            r.metric("rank", w.rank).metric("target", w.target);
            r.verdict(verdict, if w.passed() { exit::OK } else { exit::NEGATIVE });
        }
    }
    Ok(())
}

fn level_file(j: usize) -> String {
    format!("gamma_{j}.circ")
}

fn poch_gen(n: u32, out: &Path, r: &mut Report) -> Result<(), Failure> {
    let chain = gen_chain(n)?;
    r.input("n", n).input("out", path_value(out));
    fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let mut sizes = Vec::new();
    for (j, c) in chain.levels.iter().enumerate() {
        let name = level_file(j);
        fs::write(out.join(&name), render_circ(c))?;
        let size = c.metrics().nonscalar_size;
        r.line(format!("{name}: {} nodes, nonscalar_size {size}", c.nodes().len()));
        sizes.push(size);
        files.push(name);
    }
    fs::write(out.join(MANIFEST), render_manifest(&files))?;
    r.line(format!("wrote {}", out.join(MANIFEST).display()));
    r.metric("levels", chain.levels.len()).metric("nonscalar_sizes", sizes);
    Ok(())
}

pub fn read_chain(dir: &Path) -> Result<PochChain, Failure> {
    let manifest = dir.join(MANIFEST);
    let text = fs::read_to_string(&manifest).map_err(|e| Failure::usage(format!("{}: {e}", manifest.display())))?;
    let files = parse_manifest(&text).map_err(|e| Failure::usage(format!("{}: {e}", manifest.display())))?;
    let levels = files.iter().map(|f| read_circ(&dir.join(f))).collect::<Result<Vec<_>, _>>()?;
    Ok(PochChain { levels })
}

fn poch_verify(dir: &Path, trials: u32, ctx: &Ctx, r: &mut Report) -> Result<(), Failure> {
    let chain = read_chain(dir)?;
    r.input("dir", path_value(dir)).input("trials", trials);
    let mut rng = ctx.rng(r);
    let rep = verify_chain(&chain, trials, &mut rng);
    let mut transcript = Vec::new();
    for level in &rep.transcript {
        let points: Vec<String> = level.points.iter().map(ToString::to_string).collect();
        r.line(format!(
            "level {}: prime {} L {} bits {} points {}",
            level.level,
            level.prime,
            level.nonscalar,
            level.bits,
            points.join(" ")
        ));
        transcript.push(json!({
            "level": level.level,
            "prime": level.prime,
            "nonscalar": level.nonscalar,
            "bits": level.bits,
            "points": points,
        }));
    }
    r.metric("levels_checked", rep.levels_checked).metric("transcript", transcript);
    match rep.verdict {
        ChainVerdict::Accept => {
            r.verdict("Accept", exit::OK).line("Accept");
        }
        ChainVerdict::Reject(rej) => {
            let reason = match &rej.reason {
                RejectReason::Malformed(why) => format!("malformed: {why}"),
                RejectReason::BaseMismatch => "base level does not compute T".into(),
                RejectReason::LevelMismatch => "doubling identity fails".into(),
            };
            r.verdict("Reject", exit::NEGATIVE).line(format!("Reject at level {}: {reason}", rej.level));
            let mut w = json!({ "level": rej.level, "reason": reason });
            if let Some(cw) = rej.witness {
                let confirmed = cw.confirm(&chain, rej.level);
                r.line(format!(
                    "witness point {} prime {}: doubling {} vs claimed {} (confirmed {confirmed})",
                    cw.point, cw.prime, cw.expected, cw.claimed
                ));
                w = json!({
                    "level": rej.level,
                    "reason": reason,
                    "point": cw.point.to_string(),
                    "prime": cw.prime,
                    "expected": cw.expected,
                    "claimed": cw.claimed,
                    "confirmed": confirmed,
                });
            }
            r.witness = Some(w);
        }
    }
    Ok(())
}
