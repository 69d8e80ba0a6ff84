use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use basis_forge::construction::Construction;
use basis_forge::format::{parse_set, parse_target, BasisFile};
use basis_forge::growth::{first_failure, growth_rows, write_csv};
use basis_forge::sumset::{full_rep_table, rep_table};
use basis_forge::useq::{extremal_target, u_bound, USequence};
use basis_forge::verify::verify_basis;
use basis_forge::{ChoicePolicy, Error, RunConfig, TargetFunction};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "basis-forge", version, about = "Build and check integer sets with a prescribed representation function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the construction and write a basis file.
    Construct {
        target: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long)]
        restricted: bool,
        /// min-abs, stream:HEXBITS or seed:N
        #[arg(long, default_value = "min-abs")]
        policy: ChoicePolicy,
        #[arg(long)]
        out: PathBuf,
        /// Window constant (order 3 and up only).
        #[arg(long)]
        c: Option<i64>,
        /// Materialize the exclusion census at every order-2 step.
        #[arg(long)]
        census: bool,
    },
    /// Re-check a basis file against its target; prints a JSON report.
    Verify {
        basis: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 100)]
        window: i64,
    },
    /// Tabulate the counting-function bound as CSV.
    Growth {
        basis: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Number of log-spaced sample points.
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Print the first terms of the enumeration sequence U.
    EnumerateU {
        #[arg(required_unless_present = "extremal", conflicts_with = "extremal")]
        target: Option<PathBuf>,
        /// Use the built-in extremal target with this many zeros.
        #[arg(long)]
        extremal: Option<usize>,
        #[arg(long)]
        count: usize,
    },
    /// Print representation counts of a set.
    Oracle {
        set: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long)]
        restricted: bool,
        /// Rows for |n| <= N.
        #[arg(long, conflicts_with = "range", allow_negative_numbers = true)]
        window: Option<i64>,
        /// Rows for LO <= n <= HI.
        #[arg(long, value_name = "LO,HI", allow_hyphen_values = true, value_parser = parse_range)]
        range: Option<(i64, i64)>,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

enum Failure {
    Core(Error),
    Io(String),
    /// A verification or growth check failed.
    Check(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::InvalidTarget(_) | Error::Format(_) | Error::InvalidParameter(_)) => 2,
            Failure::Core(Error::WindowExhausted { .. } | Error::TargetExhausted { .. }) => 3,
            Failure::Core(Error::AuditFailed { .. }) | Failure::Check(_) => 4,
            Failure::Core(Error::Overflow(_)) | Failure::Io(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) | Failure::Check(e) => f.write_str(e),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_target(path: &Path) -> Result<TargetFunction, Failure> {
    Ok(parse_target(&read(path)?)?)
}

fn load_basis(path: &Path) -> Result<BasisFile, Failure> {
    Ok(BasisFile::parse(&read(path)?)?)
}

#[allow(clippy::too_many_arguments)]
fn construct(
    target: &Path,
    steps: usize,
    order: usize,
    restricted: bool,
    policy: ChoicePolicy,
    out: &Path,
    c: Option<i64>,
    census: bool,
) -> Result<(), Failure> {
    let f = load_target(target)?;
    let mut config = RunConfig::new(policy, restricted);
    config.census = census && order == 2;
    let mut run = Construction::new(f, order, &config, c)?;
    for _ in 0..steps {
        let s = run.step()?.clone();
        println!(
            "k={} i_k={} u={} a={} window={} admissible={}",
            s.k, s.i_k, s.u, s.a, s.window, s.admissible_found
        );
        let report = run.audit();
        if !report.passed() {
            return Err(Error::AuditFailed { k: s.k, failures: report.failure_summary() }.into());
        }
    }
    write(out, &run.to_basis_file().to_text())?;
    log::info!("wrote {} elements to {}", run.elements().len(), out.display());
    Ok(())
}

fn verify(basis: &Path, target: &Path, window: i64) -> Result<(), Failure> {
    let b = load_basis(basis)?;
    let f = load_target(target)?;
    let outcome = verify_basis(&b, &f, window);
    println!("{}", serde_json::to_string_pretty(&outcome).expect("report serializes"));
    if outcome.passed {
        Ok(())
    } else {
        Err(Failure::Check(format!("verification failed: {}", outcome.report.failure_summary())))
    }
}

fn growth(basis: &Path, csv: Option<&Path>, points: usize) -> Result<(), Failure> {
    let b = load_basis(basis)?;
    let set = b.elements.iter().copied().collect();
    let c = b.c.unsigned_abs();
    let rows = growth_rows(&set, c, b.k, b.order, points);
    let text = write_csv(&rows);
    match csv {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    if let Some(x) = first_failure(&set, c, b.k, b.order) {
        return Err(Failure::Check(format!("growth bound fails at x = {x} ({failed} sampled rows fail)")));
    }
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} growth rows fail")));
    }
    Ok(())
}

fn enumerate_u(target: Option<&Path>, extremal: Option<usize>, count: usize) -> Result<(), Failure> {
    println!("k,u_k,m_k,margin");
    if let Some(delta) = extremal {
        let (_, mut seq) = extremal_target(delta);
        for (i, u) in seq.prefix(count).into_iter().enumerate() {
            let margin = u_bound(i + 1, delta) as i64 - u.abs();
            println!("{},{u},-,{margin}", i + 1);
        }
        return Ok(());
    }
    let f = load_target(target.expect("clap requires a target"))?;
    let delta = f.delta();
    let mut seq = USequence::new(f);
    for (i, t) in seq.prefix(count)?.iter().enumerate() {
        let margin = u_bound(i + 1, delta) as i64 - t.value.abs();
        println!("{},{},{},{margin}", i + 1, t.value, t.source);
    }
    Ok(())
}

fn oracle(
    set: &Path,
    order: usize,
    restricted: bool,
    window: Option<i64>,
    range: Option<(i64, i64)>,
) -> Result<(), Failure> {
    let a = parse_set(&read(set)?)?;
    if order == 0 {
        return Err(Error::InvalidParameter("order must be positive".into()).into());
    }
    let table = match (window, range) {
        (Some(n), _) => rep_table(&a, order, restricted, -n.abs(), n.abs())?,
        (None, Some((lo, hi))) if lo <= hi => rep_table(&a, order, restricted, lo, hi)?,
        (None, Some(_)) => return Err(Error::InvalidParameter("empty range".into()).into()),
        (None, None) => full_rep_table(&a, order, restricted)?,
    };
    println!("n,r");
    for (n, r) in table.rows() {
        println!("{n},{r}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BASIS_FORGE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct { target, steps, order, restricted, policy, out, c, census } => {
            construct(&target, steps, order, restricted, policy, &out, c, census)
        }
        Command::Verify { basis, target, window } => verify(&basis, &target, window),
        Command::Growth { basis, csv, points } => growth(&basis, csv.as_deref(), points),
        Command::EnumerateU { target, extremal, count } => enumerate_u(target.as_deref(), extremal, count),
        Command::Oracle { set, order, restricted, window, range } => {
            oracle(&set, order, restricted, window, range)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
