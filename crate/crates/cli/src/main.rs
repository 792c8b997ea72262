use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use genus2_core::chabauty::{determine_rational_points, DetermineOptions, DEFAULT_PMAX};
use genus2_core::curve::HypCurve;
use genus2_core::descent::selmer_set;
use genus2_core::integer::primes_up_to;
use genus2_core::ipoly::to_coeff_list;
use genus2_core::jacobian::{group_structure_fp, to_odd_degree_model, DivRecord};
use genus2_core::local::{everywhere_locally, solvable_qp, solvable_r};
use genus2_core::pipeline::{
    decide_cached, merge_census, parse_and_normalize, run_census, Cache, CensusConfig,
    DecideOptions, DecisionRecord, GeneratorSpec, Stage, Status, FULL_BOUND,
};
use genus2_core::search::{brute_search, search, DEFAULT_MODULI};
use genus2_core::sieve::{coset_eliminate, run_sieve, MWInput, SieveOptions, DEFAULT_CAP};
use genus2_core::Error;

const EXIT_UNDECIDED: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "genus2",
    version,
    about = "Rational points on genus-2 curves y^2 = f(x)"
)]
struct Cli {
    /// Seed for every randomized stage.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cache directory (defaults to $GENUS2_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Emit JSON lines instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CurveArg {
    /// Coefficient list (leading first) or an expression in x.
    #[arg(long, allow_hyphen_values = true)]
    curve: String,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    curve: CurveArg,
    /// JSON file with generators on the odd-degree model.
    #[arg(long)]
    generators: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum StopAfter {
    Search,
    Local,
    Descent,
    Determine,
}

impl From<StopAfter> for Stage {
    fn from(s: StopAfter) -> Stage {
        match s {
            StopAfter::Search => Stage::Search,
            StopAfter::Local => Stage::Local,
            StopAfter::Descent => Stage::Descent,
            StopAfter::Determine => Stage::Determine,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for rational points of height at most H.
    Search {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long, default_value_t = FULL_BOUND)]
        bound: u64,
        /// Use the unsieved reference search.
        #[arg(long)]
        brute: bool,
    },
    /// Local solvability everywhere, or at one place (`real` or a prime).
    Local {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        place: Option<String>,
    },
    /// Two-cover descent over all factorizations of f.
    Descent {
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Odd-degree model, and the group J(F_p) when a prime is given.
    Jacobian {
        #[command(flatten)]
        curve: CurveArg,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Mordell-Weil sieve of A/nA, or of the cosets of one class of A/NA.
    Sieve {
        #[command(flatten)]
        gens: GenArgs,
        #[arg(long)]
        n: u64,
        /// Comma-separated primes; `a..b` expands to the primes in the range.
        #[arg(long)]
        primes: String,
        /// Class c0 in A/NA as comma-separated coordinates.
        #[arg(long, requires = "modulus")]
        coset: Option<String>,
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Rank 0 or rank 1 determination of C(Q).
    Chabauty {
        #[command(flatten)]
        gens: GenArgs,
        #[arg(long, default_value_t = DEFAULT_PMAX)]
        pmax: u64,
    },
    /// Run the decision chain on one curve or a file of curves (`-` for stdin).
    Decide {
        #[arg(long, conflicts_with = "input", allow_hyphen_values = true)]
        curve: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        generators: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "determine")]
        stop_after: StopAfter,
    },
    /// Statistics over the coefficient box.
    Census {
        #[arg(long, default_value_t = 3)]
        bound: u64,
        /// Comma-separated degrees from {5, 6}.
        #[arg(long, default_value = "5,6")]
        degrees: String,
        /// Sample size; omit with --full to enumerate the box.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 0)]
        shard: u64,
        #[arg(long, default_value_t = 1)]
        shards: u64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, value_enum, default_value = "descent")]
        stop_after: StopAfter,
        /// Resume log directory (defaults to the cache directory).
        #[arg(long)]
        log_dir: Option<PathBuf>,
        /// Combine existing shard logs instead of computing.
        #[arg(long)]
        merge: bool,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::InvalidInput(_)
            | Error::DegreeOutOfRange(_)
            | Error::DegreeTooLarge(_)
            | Error::NotSquarefree
            | Error::ZeroPolynomial
            | Error::NotPrime(_)
            | Error::BadPrime(_)
            | Error::BadReduction(_)
            | Error::NoRationalWeierstrass
            | Error::CapExceeded { .. } => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

type Out = Result<u8, Failure>;

fn input_err<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Input(msg.into()))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn curve(arg: &str) -> Result<HypCurve, Failure> {
    Ok(parse_and_normalize(arg)?)
}

fn mw_input(g: &GenArgs) -> Result<(HypCurve, MWInput), Failure> {
    let c = curve(&g.curve.curve)?;
    let spec = GeneratorSpec::from_json(&read_file(&g.generators)?)?;
    let input = spec.to_input(&c)?;
    Ok((c, input))
}

fn parse_list(s: &str) -> Result<Vec<u64>, Failure> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((a, b)) = tok.split_once("..") {
            let (a, b): (u64, u64) = match (a.parse(), b.parse()) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return input_err(format!("bad range {tok:?}")),
            };
            out.extend(primes_up_to(b).into_iter().filter(|&p| p >= a));
        } else {
            match tok.parse() {
                Ok(v) => out.push(v),
                Err(_) => return input_err(format!("bad integer {tok:?}")),
            }
        }
    }
    Ok(out)
}

fn emit(json_mode: bool, v: &Value, text: impl FnOnce() -> String) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    if json_mode {
        writeln!(out, "{}", serde_json::to_string(v)?)?;
    } else {
        writeln!(out, "{}", text())?;
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap_or_default()
}

fn open_cache(dir: Option<&Path>) -> Result<Option<Mutex<Cache>>, Failure> {
    match Cache::resolve_dir(dir) {
        Some(d) => Ok(Some(Mutex::new(Cache::open(&d)?))),
        None => Ok(None),
    }
}

fn summarize(rec: &DecisionRecord) -> String {
    let mut s = format!("{}  {:?}", rec.curve, rec.status);
    if rec.complete {
        s.push_str(" (complete)");
    }
    for p in &rec.points {
        s.push_str(&format!(
            "\n  {}",
            serde_json::to_string(p).unwrap_or_default()
        ));
    }
    for d in &rec.diagnostics {
        s.push_str(&format!("\n  note: {d}"));
    }
    s
}

fn run(cli: Cli) -> Out {
    let seed = cli.seed;
    let json_mode = cli.json;
    match cli.cmd {
        Cmd::Search {
            curve: c,
            bound,
            brute,
        } => {
            let c = curve(&c.curve)?;
            let rep = if brute {
                brute_search(&c, bound)
            } else {
                search(&c, bound, &DEFAULT_MODULI)
            };
            let v = json!({"curve": to_coeff_list(c.f()), "search": rep});
            emit(json_mode, &v, || pretty(&v))?;
            Ok(0)
        }
        Cmd::Local { curve: c, place } => {
            let c = curve(&c.curve)?;
            let v = match place.as_deref() {
                None => json!({"curve": to_coeff_list(c.f()), "els": everywhere_locally(&c)?}),
                Some("real") => json!({"curve": to_coeff_list(c.f()), "place": solvable_r(&c)}),
                Some(p) => {
                    let p: u64 = p
                        .parse()
                        .map_err(|_| Failure::Input(format!("bad place {p:?}")))?;
                    json!({"curve": to_coeff_list(c.f()), "place": solvable_qp(&c, p)?})
                }
            };
            emit(json_mode, &v, || pretty(&v))?;
            Ok(0)
        }
        Cmd::Descent { curve: c } => {
            let c = curve(&c.curve)?;
            let v = json!({"curve": to_coeff_list(c.f()), "descent": selmer_set(&c)?});
            emit(json_mode, &v, || pretty(&v))?;
            Ok(0)
        }
        Cmd::Jacobian { curve: c, prime } => {
            let c = curve(&c.curve)?;
            let m = to_odd_degree_model(&c)?;
            let mut v = json!({
                "curve": to_coeff_list(c.f()),
                "odd_model": to_coeff_list(m.curve.f()),
                "map": m.map,
            });
            if let Some(p) = prime {
                let g = group_structure_fp(&m, p, seed)?;
                v["prime"] = json!(p.to_string());
                v["order"] = json!(g.order.to_string());
                v["invariants"] = json!(g
                    .invariants()
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>());
                v["basis"] = json!(g
                    .basis()
                    .iter()
                    .map(|d| DivRecord::from_fp(d, p))
                    .collect::<Vec<_>>());
            }
            emit(json_mode, &v, || pretty(&v))?;
            Ok(0)
        }
        Cmd::Sieve {
            gens,
            n,
            primes,
            coset,
            modulus,
            cap,
        } => {
            let (_, input) = mw_input(&gens)?;
            let primes = parse_list(&primes)?;
            let opts = SieveOptions { cap, seed };
            let v = match (coset, modulus) {
                (Some(c0), Some(big_n)) => {
                    let c0 = parse_list(&c0)?;
                    if n % big_n != 0 || n == big_n {
                        return input_err("--n must be a proper multiple of --modulus");
                    }
                    let out = coset_eliminate(&input, &c0, big_n, &primes, &[n / big_n], opts)?;
                    json!({"coset": out})
                }
                _ => json!({"sieve": run_sieve(&input, n, &primes, opts)?}),
            };
            emit(json_mode, &v, || pretty(&v))?;
            Ok(0)
        }
        Cmd::Chabauty { gens, pmax } => {
            let (c, input) = mw_input(&gens)?;
            let known = search(&c, FULL_BOUND, &DEFAULT_MODULI).points;
            let opts = DetermineOptions {
                pmax,
                seed,
                ..Default::default()
            };
            let det = determine_rational_points(&input, &known, &opts)?;
            let decided = det.status == genus2_core::chabauty::DeterminationStatus::ProvenComplete;
            let v = json!({"curve": to_coeff_list(c.f()), "determination": det});
            emit(json_mode, &v, || pretty(&v))?;
            Ok(if decided { 0 } else { EXIT_UNDECIDED })
        }
        Cmd::Decide {
            curve: one,
            input,
            generators,
            stop_after,
        } => {
            let generators = match generators {
                Some(p) => Some(GeneratorSpec::from_json(&read_file(&p)?)?),
                None => None,
            };
            let opts = DecideOptions {
                seed,
                generators,
                stop_after: stop_after.into(),
                ..Default::default()
            };
            let lines: Vec<String> = match (one, input) {
                (Some(c), _) => vec![c],
                (None, Some(p)) if p.as_os_str() == "-" => {
                    std::io::stdin().lock().lines().collect::<Result<_, _>>()?
                }
                (None, Some(p)) => BufReader::new(
                    std::fs::File::open(&p)
                        .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
                )
                .lines()
                .collect::<Result<_, _>>()?,
                (None, None) => return input_err("give --curve or --input"),
            };
            let cache = open_cache(cli.cache_dir.as_deref())?;
            let mut input_errors = false;
            let mut undecided = false;
            for (i, line) in lines.iter().enumerate() {
                let body = line.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    continue;
                }
                let c = match parse_and_normalize(line) {
                    Ok(c) => c,
                    Err(e) => {
                        input_errors = true;
                        let v = json!({"line": (i + 1).to_string(), "input": line, "error": e.to_string()});
                        emit(json_mode, &v, || format!("line {}: {e}", i + 1))?;
                        continue;
                    }
                };
                let (rec, _) = decide_cached(&c, &opts, cache.as_ref())?;
                undecided |= rec.status == Status::Undecided;
                emit(json_mode, &serde_json::to_value(&rec)?, || summarize(&rec))?;
            }
            Ok(if input_errors {
                EXIT_INPUT
            } else if undecided {
                EXIT_UNDECIDED
            } else {
                0
            })
        }
        Cmd::Census {
            bound,
            degrees,
            samples,
            full,
            shard,
            shards,
            budget,
            stop_after,
            log_dir,
            merge,
        } => {
            let config = CensusConfig {
                bound,
                degrees: parse_list(&degrees)?,
                samples: if full { None } else { Some(samples) },
                seed,
                stop_after: stop_after.into(),
                budget,
                shard,
                shards,
                ..Default::default()
            };
            let dir = log_dir.or_else(|| Cache::resolve_dir(cli.cache_dir.as_deref()));
            let report = if merge {
                let Some(d) = dir else {
                    return input_err("--merge needs --log-dir or a cache directory");
                };
                merge_census(&d, &config)?
            } else {
                run_census(&config, dir.as_deref())?
            };
            let v = serde_json::to_value(&report)?;
            emit(json_mode, &v, || pretty(&v))?;
            let undecided = report
                .outcomes
                .iter()
                .any(|(o, f)| *o == genus2_core::pipeline::Outcome::Undecided && f.num > 0);
            Ok(if undecided { EXIT_UNDECIDED } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
