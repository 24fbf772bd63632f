//! Command-line front end. Every subcommand prints flat `key=value` lines,
//! except `suite`, which prints the text or machine report.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::coverage::{is_projectable, mcss, mnss, projection_interval};
use crate::density::Sample;
use crate::equivalence::{class_grid, same_class, tilt};
use crate::error::{Error, Result};
use crate::estimator::{closed_form_mle, Estimator, SolverOptions};
use crate::extended::ExtendedReal;
use crate::family::{parse_params, Family, FamilySpec, Tabulated};
use crate::forge::{forge_odd_h, verify_counterexample, HSpec};
use crate::score::{KindTag, ProbeConfig};
use crate::suite::{emit_report, run_suite, ReportFormat, SuiteConfig};
use crate::catalog::KindStatus;

const TABULATION_POINTS: usize = 2001;
const TABULATION_DROP: f64 = 60.0;

#[derive(Debug, Parser)]
#[command(name = "mlechar", version, about = "Characterize density families by their maximum-likelihood estimator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score image, MCSS and MNSS of a family.
    Analyze {
        #[arg(long)]
        family: String,
        /// Extra parameters, `key=value,...`.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        kind: KindTag,
    },
    /// Minimal covering sample size of an image `(-p_minus, p_plus)`.
    Mcss {
        #[arg(long, allow_hyphen_values = true)]
        p_minus: ExtendedReal,
        #[arg(long, allow_hyphen_values = true)]
        p_plus: ExtendedReal,
        /// Also report projectability at this sample size.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Maximum-likelihood estimate from a one-value-per-line data file.
    Mle {
        #[arg(long)]
        family: String,
        #[arg(long)]
        kind: KindTag,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Use the family's closed form instead of the root finder.
        #[arg(long)]
        closed_form: bool,
    },
    /// Member of the family's class with exponent `d`.
    Tilt {
        #[arg(long)]
        family: String,
        #[arg(long)]
        kind: KindTag,
        #[arg(long)]
        d: f64,
        /// Write the tilted density as a tabulated family file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Whether two densities share a class, and the exponent if so.
    SameClass {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        kind: KindTag,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Counterexample density sharing the target's two-point location MLE.
    Forge {
        #[arg(long)]
        target: String,
        /// `odd-power:d=..,p=..` or `cosine:a=..,b=..`.
        #[arg(long)]
        h: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Empirical agreement of two location MLEs on samples drawn from `f`.
    VerifyCounterexample {
        #[arg(long)]
        f: String,
        /// Second density; mutually exclusive with `--h`.
        #[arg(long, conflicts_with = "h", required_unless_present = "h")]
        g: Option<String>,
        /// Forge the second density from `f` with this `h`.
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Full verification run.
    Suite {
        /// JSON configuration; defaults to the acceptance configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
        /// Also write the machine report here.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
    },
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn family(arg: &str) -> Result<Family> {
    FamilySpec::parse_arg(arg)?.resolve()
}

fn read_sample(path: &Path) -> Result<Sample> {
    let text = std::fs::read_to_string(path)?;
    let values = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.trim_end_matches(',')
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: `{l}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Sample::new(values)
}

fn emit_tabulated(model: &crate::density::DensityModel, path: &Path) -> Result<()> {
    let spec = FamilySpec::Tabulated(Tabulated::from_model(model, TABULATION_POINTS, TABULATION_DROP)?);
    std::fs::write(path, serde_json::to_vec(&spec)?)?;
    Ok(())
}

macro_rules! kv {
    ($out:expr, $key:expr, $($arg:tt)*) => {
        writeln!($out, "{}={}", $key, format!($($arg)*))?
    };
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Analyze { family: fam, params, kind } => {
            let mut spec = FamilySpec::parse_arg(&fam)?;
            if let (FamilySpec::Catalog { params: p, .. }, Some(extra)) = (&mut spec, params) {
                p.extend(parse_params(&extra)?);
            }
            let fam = spec.resolve()?;
            let name = fam.entry.as_ref().map_or("tabulated".to_string(), |e| e.name.clone());
            kv!(out, "family", "{name}");
            if let Some(e) = &fam.entry {
                let p: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                kv!(out, "params", "{}", p.join(","));
            }
            kv!(out, "kind", "{kind}");
            let kentry = fam.entry.as_ref().and_then(|e| e.kind(kind));
            kv!(out, "formula", "{}", kentry.map_or("numeric", |k| k.formula));
            if let Some(k) = kentry {
                if k.status != KindStatus::Characterizable {
                    kv!(out, "characterizable", "false");
                    kv!(out, "reason", "{}", serde_json::to_value(k.status)?.as_str().unwrap_or("excluded"));
                    return Ok(0);
                }
            }
            let profiles = fam.profiles(kind, &ProbeConfig::default())?;
            for (i, p) in profiles.iter().enumerate() {
                let prefix = if profiles.len() > 1 { format!("piece{i}.") } else { String::new() };
                kv!(out, format!("{prefix}domain"), "{}", p.domain);
                kv!(out, format!("{prefix}p_minus"), "{}", p.p_minus);
                kv!(out, format!("{prefix}p_plus"), "{}", p.p_plus);
                kv!(out, format!("{prefix}provenance"), "{}", p.provenance);
                kv!(out, format!("{prefix}mcss"), "{}", mcss(p.p_minus, p.p_plus)?.value);
            }
            let m = mnss(&profiles)?;
            kv!(out, "mnss", "{}", m.value);
            match fam.entry.as_ref().map(|e| crate::catalog::expected_mnss(e, kind)) {
                Some(Ok(v)) => kv!(out, "expected_mnss", "{v}"),
                _ => kv!(out, "expected_mnss", "none"),
            }
            kv!(out, "characterizable", "true");
            kv!(
                out,
                "needs_scale_identification",
                "{}",
                fam.entry.as_ref().is_some_and(|e| e.needs_scale_identification)
            );
        }
        Command::Mcss { p_minus, p_plus, n } => {
            let m = mcss(p_minus, p_plus)?;
            kv!(out, "p_minus", "{p_minus}");
            kv!(out, "p_plus", "{p_plus}");
            kv!(out, "mcss", "{}", m.value);
            kv!(out, "mnss", "{}", m.value.max(crate::coverage::SampleSize::Finite(3)));
            if let Some(n) = n {
                kv!(out, "n", "{n}");
                kv!(out, "projectable", "{}", is_projectable(p_minus, p_plus, n)?);
                kv!(out, "projection", "{}", projection_interval(p_minus, p_plus, n));
            }
        }
        Command::Mle { family: fam, kind, data, tol, closed_form } => {
            let fam = family(&fam)?;
            let sample = read_sample(&data)?;
            let result = if closed_form {
                let entry = fam.entry.as_ref().ok_or_else(|| Error::NoClosedForm("tabulated family".into()))?;
                closed_form_mle(entry, kind, &sample)?
            } else {
                let k = fam.parameter_kind(kind)?;
                Estimator::new(fam.score_model(kind), &k, SolverOptions::with_tol(tol))?.solve(&sample)?
            };
            kv!(out, "kind", "{kind}");
            kv!(out, "n", "{}", sample.n());
            kv!(out, "theta_hat", "{}", result.theta_hat);
            if let Some(s) = result.sigma_hat {
                kv!(out, "sigma_hat", "{s}");
            }
            kv!(out, "residual", "{:e}", result.residual);
            match &result.method {
                crate::estimator::Method::ClosedForm { name } => kv!(out, "method", "closed_form({name})"),
                crate::estimator::Method::BracketedRoot { iterations, bracket } => {
                    kv!(out, "method", "bracketed_root");
                    kv!(out, "iterations", "{iterations}");
                    kv!(out, "bracket", "[{}, {}]", bracket.0, bracket.1);
                }
            }
        }
        Command::Tilt { family: fam, kind, d, emit } => {
            let fam = family(&fam)?;
            let k = fam.parameter_kind(kind)?;
            let t = tilt(fam.score_model(kind), d, &k)?;
            kv!(out, "kind", "{kind}");
            kv!(out, "d", "{d}");
            kv!(out, "normalizer", "{}", t.spec.normalizer.map_or("none".into(), |c| c.to_string()));
            if let Some(path) = emit {
                emit_tabulated(&t.model, &path)?;
                kv!(out, "emitted", "{}", path.display());
            }
        }
        Command::SameClass { f, g, kind, tol } => {
            let f = family(&f)?;
            let g = family(&g)?;
            let k = f.parameter_kind(kind)?;
            let fm = f.score_model(kind);
            let r = same_class(fm, g.score_model(kind), &k, &class_grid(&fm.support()), tol)?;
            kv!(out, "kind", "{kind}");
            kv!(out, "same_class", "{}", r.is_some());
            if let Some(d) = r {
                kv!(out, "d", "{d}");
            }
        }
        Command::Forge { target, h, emit } => {
            let f = family(&target)?;
            let spec: HSpec = h.parse()?;
            let g = forge_odd_h(&f.model, &spec)?;
            kv!(out, "target", "{target}");
            kv!(out, "h", "{spec:?}");
            kv!(out, "linear_h", "{}", spec.is_linear());
            for x in [-2.0, 0.0, 2.0] {
                kv!(out, format!("log_pdf({x})"), "{}", g.log_pdf(x));
            }
            if let Some(path) = emit {
                emit_tabulated(&g, &path)?;
                kv!(out, "emitted", "{}", path.display());
            }
        }
        Command::VerifyCounterexample { f, g, h, n, trials, seed, tol } => {
            let fm = family(&f)?.model;
            let gm = match (g, h) {
                (Some(g), _) => family(&g)?.model,
                (None, Some(h)) => forge_odd_h(&fm, &h.parse()?)?,
                (None, None) => unreachable!("clap requires one of --g and --h"),
            };
            let r = verify_counterexample(&fm, &gm, n, trials, seed, tol)?;
            kv!(out, "n", "{}", r.n);
            kv!(out, "trials", "{}", r.trials);
            kv!(out, "seed", "{}", r.seed);
            kv!(out, "tol", "{:e}", r.tol);
            kv!(out, "agreed", "{}", r.agreed);
            kv!(out, "fraction", "{}", r.fraction);
            kv!(out, "max_gap", "{:e}", r.max_gap);
            if let Some(w) = r.worst {
                let s: Vec<String> = w.sample.iter().map(|v| v.to_string()).collect();
                kv!(out, "worst_sample", "{}", s.join(","));
                kv!(out, "worst_theta_f", "{}", w.theta_f);
                kv!(out, "worst_theta_g", "{}", w.theta_g);
            }
        }
        Command::Suite { config, format, output, seed, trials } => {
            let mut cfg = match config {
                Some(path) => SuiteConfig::from_json(&std::fs::read_to_string(path)?)?,
                None => SuiteConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if output.is_some() {
                cfg.output_path = output;
            }
            let report = run_suite(&cfg)?;
            out.write_all(&emit_report(&report, format)?)?;
            return Ok(if report.passed { 0 } else { 1 });
        }
    }
    Ok(0)
}
