//! Command-line front end. Every subcommand emits one report envelope.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::abc::{abc_quality, roth_scan_ff, roth_scan_q};
use crate::arith::{parse_ext_rational, parse_rational, Ext, ExtRational};
use crate::cache::{default_path, map_hash, zsigmondy_cached};
use crate::error::{Error, Result};
use crate::expr::{parse_ff_element, parse_qpoly, parse_ratfn, parse_zpoly};
use crate::galois::{disc_recursion_check, tower_report, MAX_DISC_LEVEL};
use crate::heights::{canonical_height, classify_point, multi_height, phi_height_bound, weil_height, weil_height_ff};
use crate::map::{FfMap, RationalMap};
use crate::places_q::DEFAULT_FACTOR_BUDGET;
use crate::places_qt::{mason_check, FFElement};
use crate::report::Report;
use crate::zsigmondy::{ff_orbit, ff_zsigmondy_report, orbit, prop_old_diagnostic, zsigmondy_report, ZsigmondyConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Q,
    Qt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "dynzsig", version, about = "Primitive prime divisors in orbits of rational maps over Q and Q(t)")]
pub struct Cli {
    /// Base field: q for the rationals, qt for Q(t).
    #[arg(long, global = true, value_enum, default_value = "q")]
    pub field: FieldArg,

    #[arg(long, global = true, value_enum, default_value = "json")]
    #[serde(skip)]
    pub format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub jobs: Option<usize>,

    /// Rho iterations allowed per factorization.
    #[arg(long, global = true, default_value_t = DEFAULT_FACTOR_BUDGET)]
    pub budget: u64,

    /// Orbit cache file for `zsigmondy`.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub cache: Option<PathBuf>,

    /// Directory holding one cache file per scan.
    #[arg(long, global = true, env = "DYNZSIG_CACHE_DIR")]
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct MapPoint {
    /// Map expression in x, e.g. "x^2+1" or "(x^2-2)/(3x)".
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,
    /// Starting point: a rational, "inf", or an element of Q(t).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Values φ(α), …, φ^N(α).
    Orbit {
        #[command(flatten)]
        #[serde(flatten)]
        target: MapPoint,
        #[arg(long, default_value_t = 10)]
        max_n: u32,
    },
    /// Primitive and square-free primitive prime divisors along an orbit.
    Zsigmondy {
        #[command(flatten)]
        #[serde(flatten)]
        target: MapPoint,
        #[arg(long, default_value_t = 12)]
        max_n: u32,
        /// Levels for which the primitive part is factored.
        #[arg(long, default_value_t = 7)]
        squarefree_max_n: u32,
        #[arg(long, default_value_t = 3)]
        ramification_depth: u32,
    },
    /// Weil height of one value, or the multi-height of several.
    Height {
        #[arg(required = true, allow_hyphen_values = true)]
        values: Vec<String>,
    },
    /// Canonical height with a rigorous error radius.
    CanonicalHeight {
        #[command(flatten)]
        #[serde(flatten)]
        target: MapPoint,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Preperiodic or wandering.
    Classify {
        #[command(flatten)]
        #[serde(flatten)]
        target: MapPoint,
    },
    /// Bad reduction, power-map test, height bound and ramification.
    MapAnalyze {
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Non-primitive mass along F(φ^(n-i)(α)).
    PropOld {
        #[command(flatten)]
        #[serde(flatten)]
        target: MapPoint,
        /// Integer polynomial dividing the i-th iterate numerator.
        #[arg(long, allow_hyphen_values = true)]
        factor: String,
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long, default_value_t = 10)]
        max_n: u32,
        #[arg(long, default_value_t = 0.125)]
        delta: f64,
    },
    /// Quality of the triple a + b = c.
    Abc {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Radical margins of a squarefree polynomial over a point family.
    RothScan {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Over Q: all reduced p/q with q and |p| at most this bound.
        #[arg(long, default_value_t = 20)]
        height_bound: u64,
        /// Over Q(t): largest degree of the sampled polynomials.
        #[arg(long, default_value_t = 1)]
        max_degree: usize,
        /// Over Q(t): coefficient range of the sampled polynomials.
        #[arg(long, default_value_t = 2)]
        coeff_bound: i64,
    },
    /// Mason–Stothers check for polynomials in t.
    Mason {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Certificates for the iterated tower of x^2 + a.
    GaloisTower {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = 4)]
        max_n: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Orbit { .. } => "orbit",
            Command::Zsigmondy { .. } => "zsigmondy",
            Command::Height { .. } => "height",
            Command::CanonicalHeight { .. } => "canonical-height",
            Command::Classify { .. } => "classify",
            Command::MapAnalyze { .. } => "map-analyze",
            Command::PropOld { .. } => "prop-old",
            Command::Abc { .. } => "abc",
            Command::RothScan { .. } => "roth-scan",
            Command::Mason { .. } => "mason",
            Command::GaloisTower { .. } => "galois-tower",
        }
    }
}

fn require_q(cli: &Cli) -> Result<()> {
    if cli.field == FieldArg::Qt {
        return Err(Error::invalid(format!("`{}` is only available over Q", cli.command.name())));
    }
    Ok(())
}

fn render_ff(z: &Ext<FFElement>) -> String {
    match z {
        Ext::Finite(f) => f.render(),
        Ext::Infinity => "inf".into(),
    }
}

fn parse_ff_point(s: &str) -> Result<Ext<FFElement>> {
    if s.trim() == "inf" {
        Ok(Ext::Infinity)
    } else {
        Ok(Ext::Finite(parse_ff_element(s)?))
    }
}

fn q_target(t: &MapPoint) -> Result<(RationalMap, ExtRational)> {
    Ok((RationalMap::parse(&t.map)?, parse_ext_rational(&t.alpha)?))
}

fn integer(s: &str) -> Result<BigInt> {
    let r = parse_rational(s)?;
    if !r.is_integer() {
        return Err(Error::invalid(format!("{s} is not an integer")));
    }
    Ok(r.to_integer())
}

fn to_value(v: &impl Serialize) -> Result<serde_json::Value> {
    serde_json::to_value(v).map_err(|e| Error::Invariant(e.to_string()))
}

fn compute(cli: &Cli) -> Result<serde_json::Value> {
    match &cli.command {
        Command::Orbit { target, max_n } => match cli.field {
            FieldArg::Q => {
                let (map, alpha) = q_target(target)?;
                let o = orbit(&map, &alpha, *max_n);
                let values: Vec<String> = o.values.iter().map(ToString::to_string).collect();
                Ok(json!({"map": map.render(), "alpha": alpha.to_string(), "max_n": max_n, "values": values, "termination": to_value(&o.termination)?}))
            }
            FieldArg::Qt => {
                let map = FfMap::parse(&target.map)?;
                let alpha = parse_ff_point(&target.alpha)?;
                let o = ff_orbit(&map, &alpha, *max_n);
                let values: Vec<String> = o.values.iter().map(render_ff).collect();
                Ok(json!({"map": map.render(), "alpha": render_ff(&alpha), "max_n": max_n, "values": values, "termination": to_value(&o.termination)?}))
            }
        },
        Command::Zsigmondy {
            target,
            max_n,
            squarefree_max_n,
            ramification_depth,
        } => match cli.field {
            FieldArg::Q => {
                let (map, alpha) = q_target(target)?;
                let cfg = ZsigmondyConfig {
                    max_n: *max_n,
                    squarefree_max_n: *squarefree_max_n,
                    budget: cli.budget,
                    ramification_depth: *ramification_depth,
                };
                let path = cli
                    .cache
                    .clone()
                    .or_else(|| cli.cache_dir.as_ref().map(|d| default_path(d, &map_hash(&map, &alpha, cli.budget))));
                let report = match path {
                    Some(p) => zsigmondy_cached(&map, &alpha, &cfg, &p)?,
                    None => zsigmondy_report(&map, &alpha, &cfg)?,
                };
                to_value(&report)
            }
            FieldArg::Qt => {
                let map = FfMap::parse(&target.map)?;
                let alpha = parse_ff_point(&target.alpha)?;
                to_value(&ff_zsigmondy_report(&map, &alpha, *max_n))
            }
        },
        Command::Height { values } => match cli.field {
            FieldArg::Q if values.len() == 1 => {
                let z = parse_ext_rational(&values[0])?;
                Ok(json!({"values": [z.to_string()], "height": to_value(&weil_height(&z))?}))
            }
            FieldArg::Q => {
                let zs = values.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                let rendered: Vec<String> = zs.iter().map(ToString::to_string).collect();
                Ok(json!({"values": rendered, "height": to_value(&multi_height(&zs)?)?}))
            }
            FieldArg::Qt => {
                if values.len() != 1 {
                    return Err(Error::invalid("multi-heights are only available over Q"));
                }
                let z = parse_ff_point(&values[0])?;
                Ok(json!({"values": [render_ff(&z)], "height": to_value(&weil_height_ff(&z))?}))
            }
        },
        Command::CanonicalHeight { target, tol } => {
            require_q(cli)?;
            let (map, alpha) = q_target(target)?;
            let est = canonical_height(&map, &alpha, *tol)?;
            Ok(json!({"map": map.render(), "alpha": alpha.to_string(), "estimate": to_value(&est)?}))
        }
        Command::Classify { target } => {
            require_q(cli)?;
            let (map, alpha) = q_target(target)?;
            Ok(json!({"map": map.render(), "alpha": alpha.to_string(), "classification": to_value(&classify_point(&map, &alpha))?}))
        }
        Command::MapAnalyze { map, depth } => {
            require_q(cli)?;
            let map = RationalMap::parse(map)?;
            let profiles = (1..=*depth).map(|n| map.ramification_profile(n)).collect::<Result<Vec<_>>>()?;
            Ok(json!({
                "map": map.render(),
                "degree": map.degree(),
                "bad_reduction": to_value(&map.bad_reduction_primes(cli.budget))?,
                "power_map": map.is_power_map(),
                "height_bound": to_value(&phi_height_bound(&map))?,
                "ramification": to_value(&profiles)?,
                "dynamical_ramification": to_value(&map.dynamical_ramification_verdict(*depth, None)?)?,
            }))
        }
        Command::PropOld {
            target,
            factor,
            level,
            max_n,
            delta,
        } => {
            require_q(cli)?;
            let (map, alpha) = q_target(target)?;
            let f = parse_zpoly(factor, "x")?;
            to_value(&prop_old_diagnostic(&map, &alpha, &f, *level, *max_n, *delta, cli.budget)?)
        }
        Command::Abc { a, b } => {
            require_q(cli)?;
            to_value(&abc_quality(&parse_rational(a)?, &parse_rational(b)?, cli.budget)?)
        }
        Command::RothScan {
            poly,
            epsilon,
            height_bound,
            max_degree,
            coeff_bound,
        } => match cli.field {
            FieldArg::Q => to_value(&roth_scan_q(&parse_zpoly(poly, "x")?, *epsilon, *height_bound, cli.budget)?),
            FieldArg::Qt => {
                let f = parse_ratfn::<FFElement>(poly, "x")?;
                if !f.denom.is_constant() {
                    return Err(Error::invalid("roth-scan needs a polynomial in x"));
                }
                let f = f.numer.checked_div(&f.denom).expect("constant divisor");
                to_value(&roth_scan_ff(&f, *epsilon, *max_degree, *coeff_bound)?)
            }
        },
        Command::Mason { a, b } => to_value(&mason_check(&parse_qpoly(a, "t")?, &parse_qpoly(b, "t")?)?),
        Command::GaloisTower { a, max_n } => {
            require_q(cli)?;
            let a = integer(a)?;
            let tower = tower_report(&a, *max_n, cli.budget)?;
            let checks = (1..=(*max_n).clamp(1, MAX_DISC_LEVEL.min(4)))
                .map(|m| disc_recursion_check(&a, m))
                .collect::<Result<Vec<_>>>()?;
            let mut v = to_value(&tower)?;
            v["disc_checks"] = to_value(&checks)?;
            Ok(v)
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<String> {
    let result = match cli.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::invalid(e.to_string()))?
            .install(|| compute(cli))?,
        None => compute(cli)?,
    };
    let report = Report::new(cli.command.name(), cli, &result)?;
    match cli.format {
        Format::Json => Ok(report.to_json()),
        Format::Table => Ok(report.to_table()),
        Format::Csv => report.to_csv(),
    }
}
