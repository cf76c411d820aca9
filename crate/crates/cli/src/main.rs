use std::fs;
use std::io::{self, Read, Write};
use std::ops::RangeInclusive;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use leibniz_core::derivations::{derivation_space, max_nil_independent};
use leibniz_core::extensions::{build_extension_problem, eliminate, generate_constraints, parse_hypotheses, replay_consistent};
use leibniz_core::families::family_catalog;
use leibniz_core::verify::{run_all, run_conjecture, run_scenario, scenarios, N_MAX};
use leibniz_core::{format_rational, io as afile, Algebra, FamilyId, FamilySpec, LieVariant, Report, SolveOutcome, Subspace};

#[derive(Parser)]
#[command(name = "leibniz", version, about = "Exact computations with Leibniz algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Leibniz identity on an algebra file (`-` for stdin)
    Check { file: String },
    /// Lower central and derived series
    Series { file: String },
    /// Derivation space of an algebra
    Derive {
        file: String,
        /// Also report the maximal number of nil-independent derivations
        #[arg(long)]
        nil_independent: bool,
    },
    /// Build a member of a named family
    Family {
        /// Family name; `list` prints the catalog
        id: String,
        #[arg(long)]
        n: Option<usize>,
        /// Parameters as k=v,... with exact rational values
        #[arg(long, default_value = "")]
        params: String,
        /// Output file, `-` for stdout
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Solve for solvable extensions of a nilradical by one generator
    Extend {
        file: String,
        #[arg(long, default_value = "general")]
        template: String,
        /// Normalizations such as a0=1,b1=0
        #[arg(long, default_value = "")]
        hypotheses: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run registered scenarios (`all` or an id; `list` prints the registry)
    Verify {
        id: String,
        /// Range such as 5..8 or a single value
        #[arg(long, default_value = "5..8")]
        n: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Include transcripts in text output
        #[arg(long, short)]
        verbose: bool,
    },
    /// Random trials of the parameter-removal change of basis
    Conjecture {
        #[arg(long)]
        variant: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, short)]
        verbose: bool,
    },
}

/// Exit 1: the computation ran and the answer is negative.
/// Exit 2: input, usage or I/O problem.
enum Outcome {
    Pass,
    Fail,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<Outcome, Usage> {
    match cmd {
        Command::Check { file } => check(&file),
        Command::Series { file } => series(&file),
        Command::Derive { file, nil_independent } => derive(&file, nil_independent),
        Command::Family { id, n, params, out } => family(&id, n, &params, &out),
        Command::Extend { file, template, hypotheses, format } => extend(&file, &template, &hypotheses, format),
        Command::Verify { id, n, seed, format, verbose } => verify(&id, &n, seed, format, verbose),
        Command::Conjecture { variant, n, trials, seed, format, verbose } => conjecture(&variant, n, trials, seed, format, verbose),
    }
}

fn read_input(path: &str) -> Result<String, Usage> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Usage(format!("{path}: {e}")))
    }
}

fn load(path: &str) -> Result<Algebra, Usage> {
    let text = read_input(path)?;
    let name = if path == "-" { "stdin" } else { path };
    afile::from_json(&text).map_err(|e| Usage(format!("{name}: {e}")))
}

fn emit(out: &str, text: &str) -> Result<(), Usage> {
    if out == "-" {
        io::stdout().write_all(text.as_bytes()).map_err(|e| Usage(format!("stdout: {e}")))
    } else {
        fs::write(out, text).map_err(|e| Usage(format!("{out}: {e}")))
    }
}

fn check(path: &str) -> Result<Outcome, Usage> {
    let a = load(path)?;
    let failures = a.leibniz_check();
    if failures.is_empty() {
        println!("pass: Leibniz identity holds on all {} basis triples", a.dim().pow(3));
        return Ok(Outcome::Pass);
    }
    println!("fail: {} basis triples violate the Leibniz identity", failures.len());
    let labels = a.labels();
    for f in failures.iter().take(10) {
        let (x, y, z) = f.triple;
        println!("  ({}, {}, {}): defect {}", labels[x], labels[y], labels[z], a.format_vector(&f.defect));
    }
    if failures.len() > 10 {
        println!("  ...");
    }
    Ok(Outcome::Fail)
}

fn dims(s: &[Subspace]) -> String {
    s.iter().map(|v| v.dim().to_string()).collect::<Vec<_>>().join(", ")
}

fn series(path: &str) -> Result<Outcome, Usage> {
    let a = load(path)?;
    println!("dimension: {}", a.dim());
    println!("lower central series: [{}]", dims(&a.lower_central_series()));
    println!("derived series: [{}]", dims(&a.derived_series()));
    match a.nilpotency_index() {
        Some(k) => println!("nilpotent: yes (index {k})"),
        None => println!("nilpotent: no"),
    }
    println!("solvable: {}", if a.is_solvable() { "yes" } else { "no" });
    println!("filiform: {}", if a.is_filiform() { "yes" } else { "no" });
    println!("right annihilator dimension: {}", a.right_annihilator().dim());
    Ok(Outcome::Pass)
}

fn derive(path: &str, nil_independent: bool) -> Result<Outcome, Usage> {
    let a = load(path)?;
    let space = derivation_space(&a);
    println!("derivation space dimension: {}", space.dimension());
    for (name, m) in space.names().iter().zip(space.basis()) {
        println!("{name}:");
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(format_rational).collect();
            println!("  d({}) = [{}]", a.labels()[i], row.join(", "));
        }
    }
    if nil_independent {
        let r = max_nil_independent(&space)?;
        println!("nil-independent derivations: {} ({})", r.rank, r.method());
    }
    Ok(Outcome::Pass)
}

fn catalog_hint() -> String {
    let names: Vec<&str> = family_catalog().iter().map(|t| t.id.name()).collect();
    format!("known families: {} (see `leibniz family list`)", names.join(", "))
}

fn family(id: &str, n: Option<usize>, params: &str, out: &str) -> Result<Outcome, Usage> {
    if id == "list" {
        for t in family_catalog() {
            let cons = if t.constraints.is_empty() { String::new() } else { format!("; {}", t.constraints.join("; ")) };
            println!("{:<8} params [{}]{cons}  {}", t.id.name(), t.params.join(", "), t.summary);
        }
        return Ok(Outcome::Pass);
    }
    let fid: FamilyId = id.parse().map_err(|e| Usage(format!("{e}; {}", catalog_hint())))?;
    let n = n.ok_or_else(|| Usage("--n is required".into()))?;
    let spec = FamilySpec::new(fid, n).parse_params(params)?;
    let a = leibniz_core::families::make_family(&spec)?;
    emit(out, &afile::to_json(&a))?;
    Ok(Outcome::Pass)
}

fn extend(path: &str, template: &str, hypotheses: &str, format: Format) -> Result<Outcome, Usage> {
    if template != "general" {
        return Err(Usage(format!("unknown template `{template}`; available: general")));
    }
    let nil = load(path)?;
    let hyps = parse_hypotheses(hypotheses)?;
    let space = derivation_space(&nil);
    let problem = build_extension_problem(&nil, space.template())?;
    let sys = generate_constraints(&problem).with_hypotheses(&hyps);
    let outcome = eliminate(&sys);
    let labels = problem.table().labels().to_vec();
    let replays = replay_consistent(&sys, &outcome);
    match format {
        Format::Machine => {
            let mut out = String::new();
            for s in outcome.log() {
                let rec = json!({
                    "rule": "substitute",
                    "equation": s.equation.to_string(),
                    "substitution": {"var": s.var.name(), "value": s.value.to_string()},
                    "origin": s.origin.describe(&labels),
                });
                out.push_str(&rec.to_string());
                out.push('\n');
            }
            let last = match &outcome {
                SolveOutcome::Contradiction { witness, .. } => json!({
                    "rule": "contradiction",
                    "equation": witness.original.to_string(),
                    "value": format_rational(&witness.value),
                    "origin": witness.origin.describe(&labels),
                    "replays": replays,
                }),
                SolveOutcome::Family { residuals, free, .. } => json!({
                    "rule": "family",
                    "residuals": residuals.iter().map(|(o, p)| json!({"equation": p.to_string(), "origin": o.describe(&labels)})).collect::<Vec<_>>(),
                    "free": free.iter().map(|v| v.name()).collect::<Vec<_>>(),
                    "replays": replays,
                }),
            };
            out.push_str(&last.to_string());
            out.push('\n');
            emit("-", &out)?;
        }
        Format::Text => {
            println!("{} unknowns, {} equations", problem.unknowns().len(), sys.len());
            for (k, s) in outcome.log().iter().enumerate() {
                println!("{:>4}. {} := {}   [{}]", k + 1, s.var, s.value, s.origin.describe(&labels));
            }
            match &outcome {
                SolveOutcome::Contradiction { witness, .. } => {
                    println!(
                        "contradiction: {} gives {} = 0, which reduces to {}",
                        witness.origin.describe(&labels),
                        witness.original,
                        format_rational(&witness.value)
                    );
                }
                SolveOutcome::Family { residuals, free, .. } => {
                    println!("family: {} residual equations", residuals.len());
                    for (o, p) in residuals {
                        println!("  {p} = 0   [{}]", o.describe(&labels));
                    }
                    let f: Vec<&str> = free.iter().map(|v| v.name()).collect();
                    println!("free: {}", f.join(" "));
                }
            }
            println!("replay: {}", if replays { "consistent" } else { "MISMATCH" });
        }
    }
    Ok(if replays { Outcome::Pass } else { Outcome::Fail })
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, Usage> {
    let bad = || Usage(format!("bad range `{s}`; expected a..b or a single value"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    Ok(a..=b)
}

fn print_reports(reports: &[Report], format: Format, verbose: bool) -> Outcome {
    let mut out = String::new();
    for r in reports {
        match format {
            Format::Text => out.push_str(&r.to_text(verbose)),
            Format::Machine => {
                out.push_str(&r.to_json());
                out.push('\n');
            }
        }
    }
    if format == Format::Text && reports.len() > 1 {
        let pass = reports.iter().filter(|r| r.passed()).count();
        out.push_str(&format!("{pass}/{} reports pass\n", reports.len()));
    }
    print!("{out}");
    if reports.iter().all(Report::passed) {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn verify(id: &str, n: &str, seed: u64, format: Format, verbose: bool) -> Result<Outcome, Usage> {
    if id == "list" {
        for s in scenarios() {
            println!("{:<16} {:?} n, expects {:?}: {}", s.id, s.parity, s.expected, s.summary);
        }
        return Ok(Outcome::Pass);
    }
    let range = parse_range(n)?;
    if *range.end() > N_MAX {
        return Err(Usage(format!("n={} exceeds {N_MAX}: constraint systems grow like (n+2)^3", range.end())));
    }
    let reports = if id == "all" {
        run_all(range, seed)?
    } else {
        let sc = leibniz_core::verify::scenario(id).ok_or_else(|| {
            let ids: Vec<&str> = scenarios().iter().map(|s| s.id).collect();
            Usage(format!("unknown scenario `{id}`; known: {} (see `leibniz verify list`)", ids.join(", ")))
        })?;
        let ns: Vec<usize> = range.clone().filter(|&k| leibniz_core::verify::admissible(sc, k).is_ok()).collect();
        if ns.is_empty() {
            // report the rule for the first value
            let first = *range.start();
            leibniz_core::verify::admissible(sc, first)?;
            return Err(Usage(format!("no admissible n in {n} for {id}")));
        }
        ns.into_iter().map(|k| run_scenario(id, k, seed)).collect::<Result<Vec<_>, _>>()?
    };
    Ok(print_reports(&reports, format, verbose))
}

fn conjecture(variant: &str, n: usize, trials: usize, seed: u64, format: Format, verbose: bool) -> Result<Outcome, Usage> {
    let v: LieVariant = variant.parse()?;
    let report = run_conjecture(v, n, trials, seed)?;
    Ok(print_reports(&[report], format, verbose))
}
