use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use virpath::bosonic::CharacterParams;
use virpath::harness::{emit_character, run_sweep, CharacterModel, OutputFormat, Suite, SweepConfig};
use virpath::paths::{enumerate_abf, enumerate_half};
use virpath::transforms::{c_decompose, c_transform, Partition};
use virpath::{Error, HalfInt};

#[derive(Parser)]
#[command(
    name = "virpath",
    version,
    about = "Exact checks of lattice-path character identities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a JSON report.
    Sweep(SweepArgs),
    /// Tabulate a truncated character with every applicable fermionic form.
    Character(CharacterArgs),
    /// List the paths of one length with their weights.
    PathDump(PathArgs),
    /// Apply the composite transform to every path of one length.
    TransformDemo(TransformArgs),
}

/// Comma-separated values; `x..y` and `x..=y` expand to inclusive ranges.
#[derive(Clone, Debug)]
struct List<T>(Vec<T>);

impl FromStr for List<i64> {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            if let Some((lo, hi)) = item.split_once("..") {
                let hi = hi.trim_start_matches('=');
                let lo: i64 = lo.parse().map_err(|_| format!("bad range start in {item:?}"))?;
                let hi: i64 = hi.parse().map_err(|_| format!("bad range end in {item:?}"))?;
                out.extend(lo..=hi);
            } else {
                out.push(item.parse().map_err(|_| format!("bad integer {item:?}"))?);
            }
        }
        Ok(List(out))
    }
}

impl FromStr for List<HalfInt> {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<HalfInt>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()
            .map(List)
    }
}

impl FromStr for List<u8> {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let ints: List<i64> = s.parse()?;
        ints.0
            .into_iter()
            .map(|x| u8::try_from(x).map_err(|_| format!("flag {x} out of range")))
            .collect::<Result<_, _>>()
            .map(List)
    }
}

fn parse_model(s: &str) -> Result<(i64, i64), String> {
    let (p, pp) = s.split_once(':').ok_or_else(|| format!("model {s:?} is not p:p'"))?;
    let p = p.trim().parse().map_err(|_| format!("bad model {s:?}"))?;
    let pp = pp.trim().parse().map_err(|_| format!("bad model {s:?}"))?;
    Ok((p, pp))
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    suite: Suite,
    /// Band parameters, e.g. `3,4,5` or `3..7`.
    #[arg(long)]
    p: Option<List<i64>>,
    /// Half-lattice parameters, e.g. `2,5/2,3`.
    #[arg(long)]
    t: Option<List<HalfInt>>,
    /// Restrict start heights.
    #[arg(long)]
    a: Option<List<HalfInt>>,
    /// Restrict end heights.
    #[arg(long)]
    b: Option<List<HalfInt>>,
    #[arg(long)]
    e: Option<List<u8>>,
    #[arg(long)]
    f: Option<List<u8>>,
    /// Length bound; doubled for half-lattice suites.
    #[arg(long)]
    lmax: Option<i64>,
    #[arg(long)]
    order: Option<i64>,
    /// Models for the characters suite, as `p:p'`; repeatable.
    #[arg(long = "model", value_parser = parse_model)]
    models: Vec<(i64, i64)>,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "VIRPATH_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct CharacterArgs {
    #[arg(long)]
    p: Option<HalfInt>,
    #[arg(long = "p-prime")]
    p_prime: Option<i64>,
    #[arg(long)]
    r: Option<HalfInt>,
    #[arg(long)]
    s: Option<i64>,
    /// Half-lattice parameter; selects chi^{t,2t+1}_{b,2a}.
    #[arg(long, conflicts_with_all = ["p", "p_prime", "r", "s"])]
    t: Option<HalfInt>,
    #[arg(long, requires = "t")]
    a: Option<i64>,
    #[arg(long, requires = "t")]
    b: Option<i64>,
    #[arg(long, default_value_t = 20)]
    order: i64,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PathArgs {
    #[arg(long, conflicts_with = "t")]
    p: Option<i64>,
    #[arg(long)]
    t: Option<HalfInt>,
    #[arg(long)]
    a: HalfInt,
    #[arg(long)]
    b: HalfInt,
    #[arg(long, default_value_t = 0)]
    e: u8,
    #[arg(long, default_value_t = 0)]
    f: u8,
    /// Path length.
    #[arg(long)]
    lmax: HalfInt,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    p: i64,
    #[arg(long)]
    a: i64,
    #[arg(long)]
    b: i64,
    #[arg(long, default_value_t = 0)]
    e: u8,
    #[arg(long, default_value_t = 0)]
    f: u8,
    /// Path length.
    #[arg(long)]
    lmax: usize,
    /// Number of inserted particles.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Wave partition, e.g. `2,1`.
    #[arg(long, default_value = "")]
    lambda: List<i64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Identity(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidParameters(_) | Error::MalformedInput(_) | Error::ExcludedCase { .. } => {
                Failure::Usage(err.to_string())
            }
            other => Failure::Identity(other.to_string()),
        }
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut config = SweepConfig::new(args.suite);
    if let Some(List(p)) = args.p {
        config.p = p;
    }
    if let Some(List(t)) = args.t {
        config.t = t;
    }
    config.a = args.a.map(|l| l.0);
    config.b = args.b.map(|l| l.0);
    if let Some(List(e)) = args.e {
        config.e = e;
    }
    if let Some(List(f)) = args.f {
        config.f = f;
    }
    if let Some(l) = args.lmax {
        config.l_max = l;
    }
    if let Some(o) = args.order {
        config.order = o;
    }
    if !args.models.is_empty() {
        config.models = args.models;
    }
    config.jobs = args.jobs;

    let report = run_sweep(&config)?;
    let mut json = report.to_json();
    json.push('\n');
    write_output(&args.out, &json)?;
    eprintln!("{}: {} checks, {} failed", report.suite, report.total, report.failed);
    if report.pass {
        Ok(())
    } else {
        for r in report.failures().take(10) {
            eprintln!("  FAIL {} {}", r.identity, r.indices);
        }
        Err(Failure::Identity(format!("{} failing checks", report.failed)))
    }
}

fn character(args: CharacterArgs) -> Result<(), Failure> {
    let model = match args.t {
        Some(t) => {
            let (Some(a), Some(b)) = (args.a, args.b) else {
                return Err(Failure::Usage("--t needs --a and --b".into()));
            };
            CharacterModel::HalfLattice { t, r: b, a }
        }
        None => {
            let (Some(p), Some(pp), Some(r), Some(s)) = (args.p, args.p_prime, args.r, args.s) else {
                return Err(Failure::Usage("give --p --p-prime --r --s, or --t --a --b".into()));
            };
            CharacterModel::Virasoro(CharacterParams::new(p, pp, r, s)?)
        }
    };
    let text = emit_character(&model, args.order, args.format)?;
    write_output(&args.out, &text)
}

fn path_dump(args: PathArgs) -> Result<(), Failure> {
    let mut text = String::new();
    match (args.p, args.t) {
        (Some(p), None) => {
            let int = |h: HalfInt, name: &str| {
                h.to_int()
                    .ok_or_else(|| Failure::Usage(format!("--{name} must be an integer for ABF paths")))
            };
            let (a, b) = (int(args.a, "a")?, int(args.b, "b")?);
            let l = int(args.lmax, "lmax")?;
            let l = usize::try_from(l).map_err(|_| Failure::Usage("negative length".into()))?;
            for path in enumerate_abf(p, a, b, args.e, args.f, l)? {
                text.push_str(&path.dump_line());
                text.push('\n');
            }
        }
        (None, Some(t)) => {
            for path in enumerate_half(t, args.a, args.b, args.e, args.f, args.lmax)? {
                text.push_str(&path.dump_line());
                text.push('\n');
            }
        }
        _ => return Err(Failure::Usage("give exactly one of --p, --t".into())),
    }
    write_output(&args.out, &text)
}

fn transform_demo(args: TransformArgs) -> Result<(), Failure> {
    let parts = args
        .lambda
        .0
        .iter()
        .map(|&x| usize::try_from(x).map_err(|_| Failure::Usage("negative part".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let lambda = Partition::new(parts);
    let mut text = String::new();
    let mut failed = 0;
    for h in enumerate_abf(args.p, args.a, args.b, args.e, args.f, args.lmax)? {
        let image = match c_transform(&h, args.n, &lambda) {
            Ok(image) => image,
            Err(err) => {
                text.push_str(&format!("{}  ->  not applicable: {err}\n", h.dump_line()));
                continue;
            }
        };
        let back = c_decompose(&image, None)?;
        let ok = back.base == h && back.n == args.n && back.lambda == lambda;
        if !ok {
            failed += 1;
        }
        text.push_str(&format!(
            "{}  ->  {}  [{}]\n",
            h.dump_line(),
            image.dump_line(),
            if ok { "round trip ok" } else { "ROUND TRIP FAILED" }
        ));
    }
    write_output(&args.out, &text)?;
    if failed > 0 {
        return Err(Failure::Identity(format!("{failed} round trips failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Character(args) => character(args),
        Command::PathDump(args) => path_dump(args),
        Command::TransformDemo(args) => transform_demo(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Identity(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
