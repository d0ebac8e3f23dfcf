//! The `hlb` command line. [`run`] does all the work and returns the text to
//! print, so tests can drive it without spawning processes.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hlb_core::bounds::{
    bound_clarkson, bound_dimant, bound_gbh_jfapel, bound_gbh_thispel, bound_numeric, bound_poly,
    littlewood_norm_upper, BoundRecord, Method,
};
use hlb_core::forms::{make_littlewood, make_tilde, DEFAULT_EXPAND_LIMIT};
use hlb_core::optimizer::{DEFAULT_MAX_SWEEPS, DEFAULT_STARTS, DEFAULT_SWEEP_TOL};
use hlb_core::polynomials::{make_q, poly_pow, DEFAULT_TERM_CAP};
use hlb_core::FormExpr;

use crate::cache::{ResultCache, DEFAULT_CACHE_DIR};
use crate::formats::{bounds_to_csv, BoundJson, OptimizeJson, PolynomialJson, TensorJson};
use crate::manifest::{RunConfig, RunManifest};
use crate::parallel::{optimize_cached, RunSettings};
use crate::rational::{parse_seed, Rational};
use crate::tables::{compute_table, render_csv, render_json, render_md, TableName, TableOptions};
use crate::verify::{self, fraction, Report};

#[derive(Debug, Parser)]
#[command(name = "hlb", version, about = "Lower bounds for Hardy-Littlewood and Bohnenblust-Hille constants")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Optimizer starts per run.
    #[arg(long, global = true, default_value_t = DEFAULT_STARTS)]
    pub starts: usize,
    /// Master seed, decimal or 0x-hex.
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0x484C2015")]
    pub seed: u64,
    /// Relative per-sweep improvement that ends an ascent run.
    #[arg(long, global = true, default_value_t = DEFAULT_SWEEP_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Md)]
    pub format: Format,
    #[arg(long, global = true, default_value = DEFAULT_CACHE_DIR)]
    pub cache_dir: PathBuf,
    /// Neither read nor write the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a run manifest (invocation, configuration, output digest) here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Md,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Dell99,
    T44,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Optimal3,
    Sandwich,
    Oracles,
    Eqm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Littlewood,
    Tilde,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Littlewood => "littlewood",
            Family::Tilde => "tilde",
        }
    }

    fn build(self, m: usize) -> hlb_core::Result<FormExpr> {
        match self {
            Family::Littlewood => make_littlewood(m),
            Family::Tilde => make_tilde(m),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute a numeric table with reference values and deviations.
    Table {
        #[arg(value_enum)]
        name: TableArg,
        #[arg(long, default_value_t = 2)]
        min_m: usize,
        #[arg(long, default_value_t = 16)]
        max_m: usize,
        /// Also run rows that take hours (the 256-variable row).
        #[arg(long)]
        include_heavy: bool,
    },
    /// Evaluate one lower-bound formula.
    Bound {
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[arg(long)]
        m: Option<usize>,
        /// Exponent: integer, a/b, decimal or inf.
        #[arg(long)]
        p: Option<Rational>,
        #[arg(long)]
        alpha: Option<Rational>,
        /// Power of the polynomial for the poly method.
        #[arg(long)]
        n: Option<u32>,
        /// Form family for the numeric method.
        #[arg(long, value_enum, default_value_t = Family::Littlewood)]
        family: Family,
    },
    /// Run an invariant suite; exit code 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        max_m: Option<u32>,
        #[arg(long)]
        max_n: Option<u32>,
    },
    /// Estimate a form's norm; prints the optimizer result.
    Sup {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: Rational,
    },
    /// Print the expanded coefficient tensor of a form as JSON.
    Coeffs {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        m: usize,
    },
    /// Print Q_d^n as JSON.
    Poly {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Re-run a manifest and compare the output digest.
    Replay { manifest: PathBuf },
}

fn parse_method(s: &str) -> Result<Method, String> {
    let normalized = s.replace('_', "-");
    Method::from_name(&normalized).ok_or_else(|| {
        format!("unknown method {s:?}; expected clarkson, dimant, numeric, gbh-jfapel, gbh-thispel or poly")
    })
}

/// How a command ended, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad or missing arguments, or parameters outside a formula's domain: exit 2.
    Usage(anyhow::Error),
    /// A verification did not hold, or a run could not complete: exit 1.
    Check(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) => 1,
        }
    }
}

/// Output of a command. `ok = false` means a verification failed; the
/// output is still printed.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub ok: bool,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

fn domain(e: hlb_core::Error) -> Failure {
    Failure::Usage(e.into())
}

// Core errors from an optimizer run are parameter problems; anything else
// (cache IO) is a failed run.
fn run_failure(e: anyhow::Error) -> Failure {
    match e.downcast::<hlb_core::Error>() {
        Ok(core) => domain(core),
        Err(other) => Failure::Check(other),
    }
}

fn settings(g: &Global) -> RunSettings {
    RunSettings { starts: g.starts, seed: g.seed, sweep_tol: g.tol, max_sweeps: g.max_sweeps }
}

fn cache(g: &Global) -> Option<ResultCache> {
    (!g.no_cache).then(|| ResultCache::new(&g.cache_dir))
}

fn run_config(g: &Global, cmd: &Command) -> RunConfig {
    let mut c = RunConfig {
        starts: g.starts,
        seed: g.seed,
        sweep_tol: g.tol,
        max_sweeps: g.max_sweeps,
        format: format!("{:?}", g.format).to_lowercase(),
        ..RunConfig::default()
    };
    match cmd {
        Command::Bound { m, p, alpha, n, .. } => {
            c.m = *m;
            c.p = p.map(|p| p.to_string());
            c.alpha = alpha.map(|a| a.to_string());
            c.n = *n;
        }
        Command::Sup { m, p, .. } => {
            c.m = Some(*m);
            c.p = Some(p.to_string());
        }
        Command::Coeffs { m, .. } => c.m = Some(*m),
        Command::Poly { d, n } => {
            c.m = Some(*d);
            c.n = Some(*n);
        }
        Command::Table { .. } | Command::Verify { .. } | Command::Replay { .. } => {}
    }
    c
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Table { .. } => "table",
        Command::Bound { .. } => "bound",
        Command::Verify { .. } => "verify",
        Command::Sup { .. } => "sup",
        Command::Coeffs { .. } => "coeffs",
        Command::Poly { .. } => "poly",
        Command::Replay { .. } => "replay",
    }
}

fn bound_record(cli: &Global, cmd: &Command, log: &mut dyn FnMut(String)) -> Result<(BoundRecord, Rational), Failure> {
    let Command::Bound { method, m, p, alpha, n, family } = cmd else { unreachable!("called for bound only") };
    let need_m = || m.ok_or_else(|| usage(format!("--m is required for method {}", method.name())));
    let need_p = || p.ok_or_else(|| usage(format!("--p is required for method {}", method.name())));
    let need_alpha = || alpha.ok_or_else(|| usage(format!("--alpha is required for method {}", method.name())));
    let record = match method {
        Method::Clarkson => {
            let p = need_p()?;
            (bound_clarkson(need_m()?, p.to_f64()).map_err(domain)?, p)
        }
        Method::Dimant => {
            let p = need_p()?;
            (bound_dimant(need_m()?, p.to_f64()).map_err(domain)?, p)
        }
        Method::GbhJfapel => (bound_gbh_jfapel(need_m()?, need_alpha()?.to_f64()).map_err(domain)?, Rational::Infinite),
        Method::GbhThispel => {
            (bound_gbh_thispel(need_m()?, need_alpha()?.to_f64()).map_err(domain)?, Rational::Infinite)
        }
        Method::Poly => {
            let m = u32::try_from(need_m()?).map_err(|_| usage("--m too large"))?;
            let n = n.ok_or_else(|| usage("--n is required for method poly"))?;
            (bound_poly(m, n).map_err(domain)?, Rational::Infinite)
        }
        Method::Numeric => {
            let (m, p) = (need_m()?, need_p()?);
            let form = family.build(m).map_err(domain)?;
            hlb_core::norms::hl_exponent(m, p.to_f64()).map_err(domain)?;
            let (res, _) =
                optimize_cached(family.name(), &form, p, &settings(cli), cache(cli).as_ref()).map_err(run_failure)?;
            log(format!(
                "numeric bound from {} starts, {:.0}% converged",
                res.per_start.len(),
                100.0 * res.converged_fraction
            ));
            let mut rec = bound_numeric(&form, m, p.to_f64(), &res).map_err(domain)?;
            if *family == Family::Littlewood && p.to_f64() >= 2.0 {
                rec = rec.certify(littlewood_norm_upper(m, p.to_f64()).map_err(domain)?);
            }
            (rec, p)
        }
    };
    Ok(record)
}

fn render_bound(row: &BoundJson, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(row).expect("bound rows serialize");
            s.push('\n');
            s
        }
        Format::Csv => bounds_to_csv(std::slice::from_ref(row)),
        Format::Md => {
            let p = if row.p_den == 1 { row.p_num.clone() } else { format!("{}/{}", row.p_num, row.p_den) };
            let exponent = match &row.exponent {
                crate::formats::ExponentJson::Scalar(v) => fraction(*v),
                crate::formats::ExponentJson::Vector(v) => {
                    format!("({})", v.iter().map(|&x| fraction(x)).collect::<Vec<_>>().join(", "))
                }
            };
            let mut s = String::new();
            let _ = writeln!(s, "| method | m | p | exponent | numerator | norm | bound |");
            let _ = writeln!(s, "|---|---|---|---|---|---|---|");
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                row.method, row.m, p, exponent, row.numerator, row.norm, row.bound
            );
            if let Some(lower) = row.certified_bound_lower {
                let _ = writeln!(s);
                let _ = writeln!(
                    s,
                    "certified: norm ≤ {} gives bound ≥ {lower}",
                    row.certified_norm_upper.expect("set together")
                );
            }
            s
        }
    }
}

fn render_report(r: &Report, format: Format) -> String {
    match format {
        Format::Md => r.render_text(),
        Format::Csv => r.render_csv(),
        Format::Json => r.render_json(),
    }
}

fn json_line<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("values serialize");
    s.push('\n');
    s
}

/// Runs a parsed command. Progress notes go to `log`, never to the output.
pub fn execute(cli: &Cli, log: &mut dyn FnMut(String)) -> Result<Outcome, Failure> {
    let g = &cli.global;
    let ok = |output| Ok(Outcome { output, ok: true });
    match &cli.command {
        Command::Table { name, min_m, max_m, include_heavy } => {
            let name = match name {
                TableArg::Dell99 => TableName::Dell99,
                TableArg::T44 => TableName::T44,
            };
            if min_m > max_m {
                return Err(usage("--min-m exceeds --max-m"));
            }
            let opts = TableOptions {
                settings: settings(g),
                min_m: *min_m,
                max_m: *max_m,
                include_heavy: *include_heavy,
                cache: cache(g),
            };
            let t = compute_table(name, &opts, log);
            for r in t.rows.iter().filter_map(|r| r.error.as_ref().map(|e| (r.m, e))) {
                log(format!("row m={} failed: {}", r.0, r.1));
            }
            let output = match g.format {
                Format::Md => render_md(&t),
                Format::Csv => render_csv(&t),
                Format::Json => render_json(&t),
            };
            Ok(Outcome { output, ok: t.all_ok() })
        }
        cmd @ Command::Bound { .. } => {
            let (record, p) = bound_record(g, cmd, log)?;
            ok(render_bound(&BoundJson::new(&record, p), g.format))
        }
        Command::Verify { suite, max_m, max_n } => {
            let report = match suite {
                SuiteArg::Optimal3 => verify::optimal3(),
                SuiteArg::Sandwich => verify::sandwich(&settings(g), max_m.unwrap_or(5) as usize),
                SuiteArg::Oracles => verify::oracles(&settings(g)),
                SuiteArg::Eqm => verify::eqm(max_m.unwrap_or(2), max_n.unwrap_or(3)),
            };
            Ok(Outcome { output: render_report(&report, g.format), ok: report.passed() })
        }
        Command::Sup { family, m, p } => {
            let form = family.build(*m).map_err(domain)?;
            let (res, _) =
                optimize_cached(family.name(), &form, *p, &settings(g), cache(g).as_ref()).map_err(run_failure)?;
            let output = match g.format {
                Format::Json => json_line(&OptimizeJson::new(&res, *p)),
                Format::Csv => {
                    let mut s = String::from("family,m,p,best,starts,seed,converged_fraction\n");
                    let _ = writeln!(
                        s,
                        "{},{m},{p},{},{},{},{}",
                        family.name(),
                        res.best_value,
                        res.per_start.len(),
                        res.master_seed,
                        res.converged_fraction
                    );
                    s
                }
                Format::Md => format!(
                    "‖{} T_{m}‖ on l_{p} ≥ {} ({} starts, seed {:#x}, {:.0}% converged)\n",
                    family.name(),
                    res.best_value,
                    res.per_start.len(),
                    res.master_seed,
                    100.0 * res.converged_fraction
                ),
            };
            ok(output)
        }
        Command::Coeffs { family, m } => {
            let t = family.build(*m).and_then(|f| f.expand_coeffs(DEFAULT_EXPAND_LIMIT)).map_err(domain)?;
            ok(json_line(&TensorJson::from(&t)))
        }
        Command::Poly { d, n } => {
            let q = make_q(*d).and_then(|q| poly_pow(&q, *n, DEFAULT_TERM_CAP)).map_err(domain)?;
            ok(json_line(&PolynomialJson::from(&q)))
        }
        Command::Replay { manifest } => {
            let text = std::fs::read_to_string(manifest)
                .with_context(|| format!("reading {}", manifest.display()))
                .map_err(Failure::Usage)?;
            let m: RunManifest = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", manifest.display()))
                .map_err(Failure::Usage)?;
            let argv = std::iter::once("hlb".to_string()).chain(m.args.iter().cloned());
            let mut inner = Cli::try_parse_from(argv).map_err(|e| Failure::Usage(e.into()))?;
            if matches!(inner.command, Command::Replay { .. }) {
                return Err(usage("a manifest cannot replay another manifest"));
            }
            inner.global.out = None;
            inner.global.manifest = None;
            let replayed = execute(&inner, log)?;
            let same = m.matches(&replayed.output);
            let verdict = if same { "matches" } else { "DIFFERS from" };
            let output = format!("replay of `hlb {}`: output {verdict} digest {}\n", m.args.join(" "), m.output_sha256);
            Ok(Outcome { output, ok: same })
        }
    }
}

/// Parses `args` (including the program name), runs the command, writes
/// output and manifest, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let mut log = |line: String| {
        let _ = writeln!(stderr, "{line}");
    };
    let outcome = match execute(&cli, &mut log) {
        Ok(o) => o,
        Err(f) => {
            let code = f.exit_code();
            let (Failure::Usage(e) | Failure::Check(e)) = f;
            let _ = writeln!(stderr, "error: {e:#}");
            return code;
        }
    };
    let write_result = (|| -> anyhow::Result<()> {
        match &cli.global.out {
            Some(path) => {
                std::fs::write(path, &outcome.output).with_context(|| format!("writing {}", path.display()))?
            }
            None => stdout.write_all(outcome.output.as_bytes())?,
        }
        if let Some(path) = &cli.global.manifest {
            let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
            let manifest = RunManifest::new(
                command_name(&cli.command),
                args,
                run_config(&cli.global, &cli.command),
                &outcome.output,
            );
            let text = serde_json::to_string_pretty(&manifest)? + "\n";
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    })();
    if let Err(e) = write_result {
        let _ = writeln!(stderr, "error: {e:#}");
        return 1;
    }
    u8::from(!outcome.ok)
}

pub fn main_exit() -> ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["hlb", "--no-cache"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    use crate::parallel::DEFAULT_SEED;

    #[test]
    fn methods_parse_with_either_separator() {
        assert_eq!(parse_method("gbh_thispel"), Ok(Method::GbhThispel));
        assert_eq!(parse_method("clarkson"), Ok(Method::Clarkson));
        assert!(parse_method("nope").is_err());
    }

    #[test]
    fn clarkson_bound() {
        let (code, out, _) = run_args(&["bound", "--method", "clarkson", "--m", "2", "--p", "4", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["bound"].as_f64().unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["bound", "--method", "clarkson", "--m", "2"]).0, 2);
        assert_eq!(run_args(&["bound", "--method", "clarkson", "--m", "2", "--p", "3"]).0, 2);
        assert_eq!(run_args(&["bound", "--method", "bogus"]).0, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["--seed", "0xHL2015", "verify", "optimal3"]).0, 2);
        assert_eq!(run_args(&["sup", "--family", "tilde", "--m", "3", "--p", "6"]).0, 2);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("table"));
    }

    #[test]
    fn default_seed_matches_constant() {
        let cli = Cli::try_parse_from(["hlb", "verify", "optimal3"]).unwrap();
        assert_eq!(cli.global.seed, DEFAULT_SEED);
        assert_eq!(cli.global.starts, DEFAULT_STARTS);
        assert_eq!(cli.global.format, Format::Md);
    }
}
