use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pgcolor_core::certificate::{self, CertError, Certificate};
use pgcolor_core::coloring::checkers::CheckerRegistry;
use pgcolor_core::construct::{bounds_table, shape, theorem1_coloring, ConstructError};
use pgcolor_core::geometry::{build_space, build_space_with_cap, GeometryError, SpaceModel, DEFAULT_LINE_CAP};
use pgcolor_core::packings::{build_packing_structure5, packing_containing_spread, PackingError, DEFAULT_BUDGET};
use pgcolor_core::pg32::{self, exclude19::Verdict, Frame32};
use pgcolor_core::spreads::registry::SpreadRegistry;
use pgcolor_core::spreads::{is_geometric_spread, is_regular_spread};

#[derive(Parser)]
#[command(name = "pgcolor", version, about = "Complete line colorings of finite projective spaces")]
struct Cli {
    /// Node budget for searches.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Point, line and pencil counts of PG(n,q).
    Space { n: usize, q: usize },
    /// Build a line spread and optionally write its certificate.
    Spread {
        n: usize,
        q: usize,
        #[arg(long, default_value = "field-reduction")]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Packing of PG(3,q) through the geometric spread, or the carrier packings of PG(5,q).
    Packing {
        n: usize,
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the packing coloring of PG(n,q) and write its certificate.
    Construct {
        n: usize,
        q: usize,
        path: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate.
    Verify {
        path: PathBuf,
        #[arg(long, default_value = "owner-sweep")]
        checker: String,
    },
    /// Table of lower and upper bounds.
    Bounds {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [2u128, 3])]
        q: Vec<u128>,
        #[arg(long)]
        json: bool,
    },
    /// The PG(3,2) case.
    Pg32 {
        #[command(subcommand)]
        cmd: Pg32Cmd,
    },
}

#[derive(Subcommand)]
enum Pg32Cmd {
    /// Emit the 18-class complete coloring certificate.
    Certificate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a PG(3,2) coloring certificate.
    Verify { path: PathBuf },
    /// Search for a complete coloring with 19 classes.
    Exclude19,
}

/// Exit statuses: 1 for a failed verification, 2 for bad input, 3 for an exhausted budget.
enum Failure {
    Verification(String),
    Input(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Input(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<CertError> for Failure {
    fn from(e: CertError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<PackingError> for Failure {
    fn from(e: PackingError) -> Self {
        match e {
            PackingError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<ConstructError> for Failure {
    fn from(e: ConstructError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<pg32::Pg32Error> for Failure {
    fn from(e: pg32::Pg32Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let budget = cli.budget;
    match cli.cmd {
        Cmd::Space { n, q } => cmd_space(n, q),
        Cmd::Spread { n, q, method, out } => cmd_spread(n, q, &method, out.as_deref()),
        Cmd::Packing { n, q, out } => cmd_packing(n, q, budget.unwrap_or(DEFAULT_BUDGET), out.as_deref()),
        Cmd::Construct { n, q, path, out } => {
            cmd_construct(n, q, budget.unwrap_or(DEFAULT_BUDGET), out.as_deref().or(path.as_deref()))
        }
        Cmd::Verify { path, checker } => cmd_verify(&path, &checker, false),
        Cmd::Bounds { n, q, json } => cmd_bounds(&n, &q, json),
        Cmd::Pg32 { cmd } => match cmd {
            Pg32Cmd::Certificate { out } => cmd_pg32_certificate(out.as_deref()),
            Pg32Cmd::Verify { path } => cmd_verify(&path, "owner-sweep", true),
            Pg32Cmd::Exclude19 => cmd_exclude19(budget.unwrap_or(1_000_000_000)),
        },
    }
}

/// Writes next to the target and renames, so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> Outcome {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".part");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| Failure::Input(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Failure::Input(format!("renaming to {}: {e}", path.display())))
}

fn emit(cert: &Certificate, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => {
            write_atomic(p, &cert.to_json())?;
            println!("certificate written to {}", p.display());
            Ok(())
        }
        None => {
            println!("{}", cert.to_json());
            Ok(())
        }
    }
}

fn space(n: usize, q: usize) -> Result<SpaceModel, Failure> {
    Ok(build_space_with_cap(n, q, DEFAULT_LINE_CAP)?)
}

fn cmd_space(n: usize, q: usize) -> Outcome {
    let s = space(n, q)?;
    println!("{} points, {} lines, {} lines/point", s.num_points(), s.num_lines(), s.lines_per_point());
    let d = s.descriptor();
    println!("GF({}) = GF({})[x]/({:?}), line table sha256 {}", d.q, d.p, d.irreducible, d.line_table_sha256);
    Ok(())
}

fn cmd_spread(n: usize, q: usize, method: &str, out: Option<&Path>) -> Outcome {
    let s = space(n, q)?;
    let registry = SpreadRegistry::with_defaults();
    let c = registry
        .get(method)
        .ok_or_else(|| Failure::Input(format!("unknown method {method:?}; known: {}", registry.names().join(", "))))?;
    let sp = c.build(&s, 1).map_err(|e| Failure::Input(e.to_string()))?;
    let geometric = is_geometric_spread(&s, &sp);
    print!("{}: {} lines, geometric={geometric}", c.name(), sp.len());
    if n == 3 {
        let regular = is_regular_spread(&s, &sp).map_err(|e| Failure::Input(e.to_string()))?;
        print!(", regular={regular}");
    }
    println!();
    if let Some(p) = out {
        emit(&certificate::spread_certificate(&s, &sp, vec![format!("method {method}")]), Some(p))?;
    }
    Ok(())
}

fn cmd_packing(n: usize, q: usize, budget: u64, out: Option<&Path>) -> Outcome {
    let s = space(n, q)?;
    match n {
        3 => {
            let sp = pgcolor_core::spreads::geometric_spread(&s, 1).map_err(|e| Failure::Input(e.to_string()))?;
            let p = packing_containing_spread(&s, &sp, budget)?;
            println!("packing of PG(3,{q}): {} spreads of {} lines", p.len(), p.spreads[0].len());
            if let Some(path) = out {
                emit(&certificate::packing_certificate(&s, &p, vec![]), Some(path))?;
            }
        }
        5 => {
            let st = build_packing_structure5(&s, budget)?;
            println!(
                "PG(5,{q}): base spread of {} lines, {} carriers packed, {} search nodes",
                st.base_spread.len(),
                st.carriers.len(),
                st.search_nodes
            );
            if let Some(path) = out {
                emit(&certificate::structure_certificate(&s, &st, vec![]), Some(path))?;
            }
        }
        _ => return Err(Failure::Input(format!("packings are built for n = 3 and n = 5, not {n}"))),
    }
    Ok(())
}

fn cmd_construct(n: usize, q: usize, budget: u64, out: Option<&Path>) -> Outcome {
    shape(n)?;
    if n != 5 {
        return Err(Failure::Input(format!("PG({n},{q}) is beyond the supported size; only n = 5 is built")));
    }
    let s = space(n, q)?;
    let st = build_packing_structure5(&s, budget)?;
    let col = theorem1_coloring(&s, &st)?;
    let notes = vec![format!("packing coloring of PG(5,{q}); {} packing search nodes", st.search_nodes)];
    let cert = certificate::coloring_certificate(&s, &col, notes);
    let v = &cert.verdicts;
    println!(
        "PG({n},{q}): {} lines, k={}, proper={}, complete={}",
        s.num_lines(),
        v.colors.unwrap_or(0),
        v.proper.unwrap_or(false),
        v.complete.unwrap_or(false)
    );
    if out.is_some() {
        emit(&cert, out)?;
    }
    Ok(())
}

fn read_cert(path: &Path) -> Result<Certificate, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("reading {}: {e}", path.display())))?;
    Ok(Certificate::from_json(&text)?)
}

fn cmd_verify(path: &Path, checker: &str, pg32_only: bool) -> Outcome {
    let cert = read_cert(path)?;
    if pg32_only && (cert.header.space.n, cert.header.space.q) != (3, 2) {
        return Err(Failure::Input(format!("expected a PG(3,2) certificate, got PG({},{})", cert.header.space.n, cert.header.space.q)));
    }
    let registry = CheckerRegistry::with_defaults();
    let c = registry
        .get(checker)
        .ok_or_else(|| Failure::Input(format!("unknown checker {checker:?}; known: {}", registry.names().join(", "))))?;
    let report = certificate::verify_with(&cert, c)?;
    let v = &report.recomputed;
    let show = |o: Option<String>| o.unwrap_or_else(|| "-".into());
    println!(
        "kind={:?} colors={} proper={} complete={} partition={} parts={}",
        cert.kind,
        show(v.colors.map(|x| x.to_string())),
        show(v.proper.map(|x| x.to_string())),
        show(v.complete.map(|x| x.to_string())),
        show(v.partition.map(|x| x.to_string())),
        show(v.parts.map(|x| x.to_string())),
    );
    for n in &cert.notes {
        println!("note: {n}");
    }
    match report.discrepancies.first() {
        None => {
            println!("verified");
            Ok(())
        }
        Some(first) => Err(Failure::Verification(format!(
            "{} discrepancies; first: {first}",
            report.discrepancies.len()
        ))),
    }
}

fn cmd_bounds(ns: &[usize], qs: &[u128], json: bool) -> Outcome {
    let rows = bounds_table(ns, qs)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| Failure::Input(e.to_string()))?);
        return Ok(());
    }
    println!("{:>3} {:>3} {:>8} {:>10} {:>6} {:>12} {:>10} {:>10} {:>8}", "n", "q", "v", "lines", "r", "lower_alpha", "upper_psi", "quad_psi", "chi_up");
    for r in rows {
        let lower = r.lower_alpha.map_or("-".to_string(), |a| a.to_string());
        let mut line = format!(
            "{:>3} {:>3} {:>8} {:>10} {:>6} {:>12} {:>10} {:>10} {:>8}",
            r.n, r.q, r.v, r.lines, r.r, lower, r.upper_psi, r.quadratic_psi, r.chromatic_upper
        );
        if let Some(v) = r.plane_exact {
            line.push_str(&format!("  (plane: all indices equal {v})"));
        }
        println!("{line}");
    }
    Ok(())
}

fn cmd_pg32_certificate(out: Option<&Path>) -> Outcome {
    let s = build_space(3, 2)?;
    let frame = Frame32::new(&s)?;
    let col = pg32::explicit_18_coloring(&s, &frame)?;
    let mismatches = pg32::check_witness_tables(&s, &frame)?;
    if !mismatches.is_empty() {
        return Err(Failure::Verification(format!("witness table entries fail: {mismatches:?}")));
    }
    let mut notes: Vec<String> = vec!["explicit complete coloring of PG(3,2) with 18 classes".into()];
    notes.extend(pg32::NORMALIZATION_NOTES.iter().map(|s| s.to_string()));
    let names: Vec<&str> = pg32::EIGHTEEN_CLASSES.iter().map(|(n, _)| *n).collect();
    notes.push(format!("colors 1..18 are classes {}", names.join(", ")));
    emit(&certificate::coloring_certificate(&s, &col, notes), out)
}

fn cmd_exclude19(budget: u64) -> Outcome {
    let s = build_space(3, 2)?;
    let out = pg32::exclude_19(&s, budget)?;
    for c in &out.cases {
        println!("case {}: {} symmetries, {} nodes, {:?}", c.name, c.symmetries, c.nodes, c.result);
    }
    println!("verdict: {:?} after {} nodes", out.verdict, out.nodes);
    match out.verdict {
        Verdict::Refuted => Ok(()),
        Verdict::Inconclusive => Err(Failure::Budget(format!("search stopped after {} nodes", out.nodes))),
    }
}
