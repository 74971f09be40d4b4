use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cubeorder::oracle::{self, LawReport, OracleConfig, RandomSuite, DEFAULT_BUDGET};
use cubeorder::projections::profile;
use cubeorder::{
    decompose, format_pointset, initial_segment_capped, lambda_segment, parse_pointset, rank, rearrange_to_segment,
    sigma_profile, sigma_segment, unrank, Error, Point, PointSet, ProfileKind, DEFAULT_SEGMENT_CAP,
};
use serde::Serialize;

/// Cube order, extremal projection sums, rearrangement and brute-force checks.
#[derive(Debug, Parser)]
#[command(name = "cubeorder", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for enumeration and law suites (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest number of candidate subsets an oracle run may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Largest initial segment that may be materialized.
    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_CAP)]
    cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Sigma,
    Lambda,
}

impl From<Kind> for ProfileKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Sigma => ProfileKind::Hyperplane,
            Kind::Lambda => ProfileKind::Axis,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Sub,
    Restate,
    Idt,
    Hz19,
    Lw,
    Stability,
    Lambda,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the initial segment I_n(m), one point per line.
    Segment { n: usize, m: u64 },
    /// Print the position of a point in the cube order.
    Rank {
        #[arg(required = true, num_args = 1..)]
        coords: Vec<u64>,
    },
    /// Print the point at position m of the cube order in dimension n.
    Unrank { n: usize, m: u64 },
    /// Print sigma_n(m), the least hyperplane projection sum of m points.
    Sigma { n: usize, m: u64 },
    /// Print lambda_n(m), the least axis projection sum of m points.
    Lambda { n: usize, m: u64 },
    /// Projection profile of a point-set file ("-" for stdin).
    Profile {
        #[arg(long, value_enum, default_value_t = Kind::Sigma)]
        kind: Kind,
        file: PathBuf,
    },
    /// Rearrange a point set into the initial segment of the same size.
    Minimise {
        file: PathBuf,
        /// Print every intermediate set.
        #[arg(long)]
        trace: bool,
        /// Leave out point lists of sets larger than this in JSON traces.
        #[arg(long, default_value_t = 1000)]
        elide: usize,
    },
    /// Exhaustive minimum over all m-subsets of a box.
    Oracle {
        #[arg(long, value_enum, default_value_t = Kind::Sigma)]
        kind: Kind,
        n: usize,
        m: u64,
        /// Box sides, comma separated (default: K+1 on every axis).
        #[arg(long = "box", value_delimiter = ',')]
        sides: Option<Vec<u64>>,
        /// Number of minimisers to print.
        #[arg(long, default_value_t = 4)]
        witnesses: usize,
    },
    /// Run a law suite; exits with status 1 if any case fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Dimension (largest dimension for restate and random).
        #[arg(long)]
        n: Option<usize>,
        /// Largest size argument (largest part for restate, largest set for random).
        #[arg(long)]
        mmax: Option<u64>,
        /// Largest multiplier (lambda) or number of parts (restate).
        #[arg(long)]
        smax: Option<u64>,
        /// Number of random cases.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest coordinate of random sets.
        #[arg(long, default_value_t = 15)]
        coord_max: u64,
        /// Edge K of the closed size (K+1)^i K^(n-i) for stability.
        #[arg(long, default_value_t = 2)]
        k: u64,
        /// Number of long edges i for stability.
        #[arg(long, default_value_t = 0)]
        i: usize,
        /// Profile minimised by the stability suite.
        #[arg(long, value_enum, default_value_t = Kind::Sigma)]
        kind: Kind,
        /// Box for stability, comma separated (default: K+2 on every axis).
        #[arg(long = "box", value_delimiter = ',')]
        sides: Option<Vec<u64>>,
    },
}

enum Failure {
    Violation(String),
    Usage(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            Error::Invariant { .. } => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn emit_json<T: Serialize>(out: &mut impl Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

fn read_set(path: &PathBuf) -> Result<PointSet, Failure> {
    let set = if path.as_os_str() == "-" {
        parse_pointset(io::stdin().lock())
    } else {
        let file = File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        parse_pointset(BufReader::new(file))
    };
    let name = if path.as_os_str() == "-" { "stdin".into() } else { path.display().to_string() };
    set.map_err(|e| Failure::Usage(format!("{name}: {e}")))
}

fn value(out: &mut impl Write, json: bool, name: &str, n: usize, m: u64, v: u64) -> Outcome {
    if json {
        #[derive(Serialize)]
        struct Value<'a> {
            kind: &'a str,
            n: usize,
            m: u64,
            value: u64,
        }
        emit_json(out, &Value { kind: name, n, m, value: v })?;
    } else {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

fn reports(out: &mut impl Write, json: bool, reports: &[LawReport]) -> Outcome {
    if json {
        emit_json(out, &reports)?;
    } else {
        for r in reports {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(
                out,
                "{status} {} [{}] cases={} violations={}",
                r.law, r.domain, r.cases_checked, r.violation_count
            )?;
            for v in &r.violations {
                writeln!(out, "  {v}")?;
            }
        }
    }
    match reports.iter().filter(|r| !r.passed()).count() {
        0 => Ok(()),
        bad => Err(Failure::Violation(format!("{bad} law(s) violated"))),
    }
}

fn positive(what: &str, n: usize) -> Result<usize, Failure> {
    if n == 0 {
        return Err(Failure::Usage(format!("{what} must be at least 1")));
    }
    Ok(n)
}

fn run(cli: Cli, out: &mut impl Write) -> Outcome {
    let json = cli.json;
    let cfg = OracleConfig { budget: cli.budget, ..OracleConfig::default() };
    match cli.command {
        Command::Segment { n, m } => {
            let seg = initial_segment_capped(positive("n", n)?, m, cli.cap)?;
            if json {
                emit_json(out, &seg.to_coords())?;
            } else {
                write!(out, "{}", format_pointset(&seg))?;
            }
        }
        Command::Rank { coords } => {
            let p = Point::new(coords)?;
            let r = rank(&p)?;
            value(out, json, "rank", p.dim(), r, r)?;
        }
        Command::Unrank { n, m } => {
            let p = unrank(positive("n", n)?, m)?;
            if json {
                emit_json(out, &p)?;
            } else {
                let text: Vec<String> = p.coords().iter().map(u64::to_string).collect();
                writeln!(out, "{}", text.join(" "))?;
            }
        }
        Command::Sigma { n, m } => value(out, json, "sigma", n, m, sigma_segment(positive("n", n)?, m)?)?,
        Command::Lambda { n, m } => value(out, json, "lambda", n, m, lambda_segment(positive("n", n)?, m)?)?,
        Command::Profile { kind, file } => {
            let p = profile(kind.into(), &read_set(&file)?);
            if json {
                emit_json(out, &p)?;
            } else {
                let per: Vec<String> = p.per_axis.iter().map(u64::to_string).collect();
                writeln!(out, "{} {}", p.total, per.join(" "))?;
            }
        }
        Command::Minimise { file, trace, elide } => {
            let a = read_set(&file)?;
            let t = rearrange_to_segment(&a)?;
            match (trace, json) {
                (true, true) => emit_json(out, &t.entries(Some(elide)))?,
                (true, false) => {
                    for (k, s) in t.steps.iter().enumerate() {
                        writeln!(out, "# {k} {} size={} sigma={}", s.label, s.set.len(), s.sigma)?;
                    }
                    write!(out, "{}", format_pointset(&t.final_set))?;
                }
                (false, true) => {
                    #[derive(Serialize)]
                    struct Minimised {
                        n: usize,
                        size: usize,
                        sigma_before: u64,
                        sigma_after: u64,
                        iterations: u64,
                        points: Vec<Vec<u64>>,
                    }
                    emit_json(
                        out,
                        &Minimised {
                            n: a.dim(),
                            size: a.len(),
                            sigma_before: sigma_profile(&a).total,
                            sigma_after: t.steps.last().map_or(0, |s| s.sigma),
                            iterations: t.iterations,
                            points: t.final_set.to_coords(),
                        },
                    )?;
                }
                (false, false) => write!(out, "{}", format_pointset(&t.final_set))?,
            }
        }
        Command::Oracle { kind, n, m, sides, witnesses } => {
            let n = positive("n", n)?;
            let sides = match sides {
                Some(s) => s,
                None => vec![decompose(n, m).map_or(1, |d| d.side + 1); n],
            };
            let r =
                oracle::brute_force_min(kind.into(), n, m, &sides, &OracleConfig { witness_cap: witnesses, ..cfg })?;
            if json {
                emit_json(out, &r)?;
            } else {
                writeln!(out, "min {} minimisers {}", r.min_value, r.minimiser_count)?;
                for w in &r.witnesses {
                    let pts: Vec<String> = w
                        .iter()
                        .map(|p| format!("({})", p.iter().map(u64::to_string).collect::<Vec<_>>().join(",")))
                        .collect();
                    writeln!(out, "  {}", pts.join(" "))?;
                }
            }
        }
        Command::Verify { suite, n, mmax, smax, trials, seed, coord_max, k, i, kind, sides } => {
            let list = match suite {
                Suite::Sub => oracle::check_subadditivity(positive("n", n.unwrap_or(2))?, mmax.unwrap_or(300))?,
                Suite::Restate => vec![oracle::random_restate_suite(
                    trials.unwrap_or(10_000),
                    n.unwrap_or(4),
                    smax.unwrap_or(5) as usize,
                    mmax.unwrap_or(50),
                    seed,
                )?],
                Suite::Idt => {
                    let m = mmax.unwrap_or(2000);
                    vec![oracle::check_idt(n.unwrap_or(3), m, m.min(300))?]
                }
                Suite::Hz19 => {
                    vec![oracle::check_lambda_increment(positive("n", n.unwrap_or(3))?, mmax.unwrap_or(10_000))?]
                }
                Suite::Lw => vec![oracle::check_lw_agm(positive("n", n.unwrap_or(3))?, mmax.unwrap_or(10_000))?],
                Suite::Lambda => {
                    oracle::check_lambda_laws(positive("n", n.unwrap_or(3))?, mmax.unwrap_or(2000), smax.unwrap_or(20))?
                }
                Suite::Stability => {
                    let n = positive("n", n.unwrap_or(2))?;
                    let sides = sides.unwrap_or_else(|| vec![k + 2; n]);
                    vec![oracle::check_stability(kind.into(), n, k, i, &sides, &cfg)?]
                }
                Suite::Random => oracle::random_lower_bound_suite(&RandomSuite {
                    trials: trials.unwrap_or(1000),
                    n_min: 1,
                    n_max: positive("n", n.unwrap_or(4))?,
                    size_max: mmax.unwrap_or(40),
                    coord_max,
                    seed,
                })?,
            };
            reports(out, json, &list)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Err(Failure::Violation(msg)), _) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        (Err(Failure::Usage(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        (Err(Failure::Budget(msg)), _) => {
            eprintln!("refused: {msg}");
            ExitCode::from(3)
        }
        // a closed pipe on stdout is not worth a diagnostic
        (Ok(()), Err(_)) => ExitCode::from(2),
    }
}
