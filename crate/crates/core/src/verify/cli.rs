//! Command line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::checks::*;
use super::{Engine, Mode, Report, Settings, DEFAULT_MAX_TUPLES};
use crate::algebra::{BracketSum, Fp, Monomial, VarSet, Vars};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_with_ceiling, PartitionTuple, DEFAULT_LOW_DIM_CEILING, DEFAULT_SOLID_CEILING};
use crate::series::{f_t, ClosedForm, Series};
use crate::vertex::WeightRecord;

#[derive(Parser, Debug)]
#[command(
    name = "magvertex",
    version,
    about = "Solid-partition vertex weights, generating series and their checks"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Weight cache directory.
    #[arg(long, global = true, env = "MAGVERTEX_CACHE")]
    cache_dir: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized comparisons.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `exact` compares every order exactly; `random` only orders up to 2.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Random)]
    mode: ModeArg,
    /// Truncation order (the default depends on the command).
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Rank, the number of partitions in a tuple.
    #[arg(long, global = true)]
    r: Option<usize>,
    /// Random points per randomized comparison.
    #[arg(long, global = true, default_value_t = crate::algebra::pit::DEFAULT_TRIALS)]
    trials: u32,
    /// Largest number of tuples one series may sum over.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TUPLES)]
    max_tuples: usize,
    /// Fraction of cache hits recomputed and compared.
    #[arg(long, global = true, default_value_t = 0.0)]
    audit: f64,
    /// Report every duration as 0, for byte-identical reruns.
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count partitions of each size in a box dimension.
    Count {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
    },
    /// Weight of one partition tuple.
    Weight {
        /// Tuple JSON, e.g. '{"parts":[{"boxes":[[0,0,0,0]]}]}'.
        #[arg(long)]
        tuple: String,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Coefficients of a localization or closed-form series.
    Series {
        #[arg(long, value_enum, default_value_t = Kind::Localization)]
        kind: Kind,
        /// Plethystic logarithm divided by F_t.
        #[arg(long)]
        reduced_log: bool,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Run a check and print its report.
    Verify {
        #[arg(value_enum)]
        check: Check,
    },
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Substitutions such as `y1=t4,y2=t4`.
    #[arg(long)]
    specialize: Option<String>,
    /// Evaluate at a point of the prime field: comma-separated fourth roots
    /// of the variables, in variable order.
    #[arg(long)]
    at: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Localization,
    Magnificent,
    Dt3,
    AwataKanno,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    Main,
    Reduction,
    AwataKanno,
    WIndependence,
    LogStructure,
    Offdiag,
    Identities,
    Counts,
    Permutations,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code: 0 on success, 1 when a check fails, 2 on errors.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout().lock();
    match run(&cli) {
        Ok((text, ok)) => {
            let _ = out.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = out.write_all(b"\n");
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn engine(g: &Global) -> Result<Engine> {
    let jobs = g.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let mut e = Engine::new(jobs)?
        .with_max_tuples(g.max_tuples)
        .with_audit(g.audit)
        .with_timings(!g.no_timings);
    if let Some(dir) = &g.cache_dir {
        e = e.with_cache(dir)?;
    }
    Ok(e)
}

fn settings(g: &Global) -> Settings {
    Settings {
        mode: match g.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Random => Mode::Random,
        },
        seed: g.seed,
        trials: g.trials,
    }
}

fn render(g: &Global, v: &Value, text: impl FnOnce() -> String) -> String {
    match g.format {
        Format::Json => serde_json::to_string_pretty(v).expect("json values serialize"),
        Format::Text => text(),
    }
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    let g = &cli.global;
    match &cli.command {
        Command::Count { dim, max_size } => {
            let ceiling = if *dim == 4 {
                DEFAULT_SOLID_CEILING
            } else {
                DEFAULT_LOW_DIM_CEILING
            };
            let counts: Vec<usize> = (0..=*max_size)
                .map(|n| enumerate_with_ceiling(*dim, n, ceiling.max(*max_size)).map(|v| v.len()))
                .collect::<Result<_>>()?;
            let v = json!({ "dim": dim, "counts": counts });
            let text = || {
                let mut s = String::new();
                for (n, c) in counts.iter().enumerate() {
                    s.push_str(&format!("{n} {c}\n"));
                }
                s
            };
            Ok((render(g, &v, text), true))
        }
        Command::Weight { tuple, eval } => {
            let t = PartitionTuple::from_json_str(tuple)?;
            let vars = VarSet::standard(t.rank(), &[]);
            let rec = WeightRecord::compute(&vars, &t)?;
            let mut w = rec.weight()?;
            if let Some(spec) = &eval.specialize {
                w = w.substitute(&vars, &specialization(&vars, spec)?)?;
            }
            let mut v = json!({
                "tuple": serde_json::to_value(&rec.tuple)?,
                "mu": rec.mu,
                "k": rec.k,
                "weight": serde_json::to_value(w.to_json())?,
            });
            if let Some(at) = &eval.at {
                let pt = parse_point(&vars, at)?;
                v["value"] = json!(BracketSum::from(&w).eval(&pt)?.value());
            }
            let text = || {
                let mut s = format!("mu={} k={}\nweight = {w}\n", rec.mu, rec.k);
                if let Some(x) = v.get("value") {
                    s.push_str(&format!("value = {x}\n"));
                }
                s
            };
            Ok((render(g, &v, text), true))
        }
        Command::Series {
            kind,
            reduced_log,
            eval,
        } => {
            let r = g.r.unwrap_or(1);
            let order = g.order.unwrap_or(3);
            let vars = VarSet::standard(r, &[]);
            let mut s = build_series(g, *kind, &vars, r, order)?;
            if let Some(spec) = &eval.specialize {
                s = s.substitute(&vars, &specialization(&vars, spec)?)?;
            }
            if *reduced_log {
                s = s.pleth_log()?.mul_factored(&f_t(&vars)?.inv()?);
            }
            match &eval.at {
                Some(at) => {
                    let pt = parse_point(&vars, at)?;
                    let values: Vec<u64> = s
                        .coeffs()
                        .iter()
                        .map(|c| Ok(c.eval(&pt)?.value()))
                        .collect::<Result<_>>()?;
                    let v = json!({ "order": order, "point": pt.iter().map(|x| x.value()).collect::<Vec<_>>(), "values": values });
                    let text = || {
                        values
                            .iter()
                            .enumerate()
                            .map(|(n, x)| format!("c{n} = {x}\n"))
                            .collect()
                    };
                    Ok((render(g, &v, text), true))
                }
                None => {
                    let j = s.to_json()?;
                    let v = serde_json::to_value(&j)?;
                    let text = || {
                        s.coeffs()
                            .iter()
                            .enumerate()
                            .map(|(n, c)| {
                                let e = c.expand().expect("expanded above");
                                format!("c{n} = ({}) / ({})\n", e.num(), e.den())
                            })
                            .collect()
                    };
                    Ok((render(g, &v, text), true))
                }
            }
        }
        Command::Verify { check } => {
            let e = engine(g)?;
            let s = settings(g);
            let rep = run_check(&e, &s, *check, g.r, g.order)?;
            let ok = rep.passed();
            let v = serde_json::to_value(&rep)?;
            Ok((render(g, &v, || rep.to_text()), ok))
        }
    }
}

fn build_series(
    g: &Global,
    kind: Kind,
    vars: &Vars,
    r: usize,
    order: usize,
) -> Result<Series<BracketSum>> {
    match kind {
        Kind::Localization => engine(g)?.localization_series(r, order),
        Kind::Magnificent => ClosedForm::magnificent(vars)?.series(vars, order),
        Kind::Dt3 => ClosedForm::Dt3.series(vars, order),
        Kind::AwataKanno => ClosedForm::AwataKanno(r as u32).series(vars, order),
    }
}

fn run_check(
    e: &Engine,
    s: &Settings,
    check: Check,
    r: Option<usize>,
    order: Option<usize>,
) -> Result<Report> {
    match check {
        Check::Main => verify_main(e, r.unwrap_or(1), order.unwrap_or(4), s),
        Check::Reduction => verify_reduction(e, order.unwrap_or(4), s),
        Check::AwataKanno => verify_awata_kanno(e, r.unwrap_or(2), order.unwrap_or(3), s),
        Check::WIndependence => verify_w_independence(e, r.unwrap_or(2), order.unwrap_or(3), s),
        Check::LogStructure => verify_log_structure(e, order.unwrap_or(3), s),
        Check::Offdiag => verify_offdiag(e, r.unwrap_or(2), order.unwrap_or(2), s),
        Check::Identities => verify_identities(e, s),
        Check::Counts => verify_counts(e, order.unwrap_or(6), s),
        Check::Permutations => verify_permutations(e, order.unwrap_or(4), s),
    }
}

/// `name=monomial` pairs separated by commas; unnamed variables are fixed.
fn specialization(vars: &Vars, spec: &str) -> Result<Vec<Monomial>> {
    let mut images = vars.embedding(vars)?;
    for item in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, image) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected name=monomial, got `{item}`")))?;
        images[vars.index(name.trim())?] = vars.parse_monomial(image.trim())?;
    }
    Ok(images)
}

fn parse_point(vars: &Vars, s: &str) -> Result<Vec<Fp>> {
    let pt: Vec<Fp> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map(Fp::new)
                .map_err(|_| Error::Parse(format!("bad field element `{x}`")))
        })
        .collect::<Result<_>>()?;
    if pt.len() != vars.len() {
        return Err(Error::ArityMismatch(format!(
            "point has {} values for variables {:?}",
            pt.len(),
            vars.names()
        )));
    }
    Ok(pt)
}
