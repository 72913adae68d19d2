use clap::{Parser, Subcommand, ValueEnum};
use modcurv::error::Error;
use modcurv::modular::{derive_curvature, CurvatureReport, Operator};
use modcurv::oracle::{gauss_bonnet_residual, residual_ratio_test};
use modcurv::theta::{parse_element, SkewMatrix, C64};
use modcurv::verify::{gauss_bonnet_h, run_suite, Suite, VerifyOptions};
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "modcurv", version, about = "Modular curvature of conformally perturbed Laplacians on noncommutative tori")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OpArg {
    Kdelta,
    Nc4tori,
}

impl From<OpArg> for Operator {
    fn from(o: OpArg) -> Operator {
        match o {
            OpArg::Kdelta => Operator::Kdelta,
            OpArg::Nc4tori => Operator::Nc4tori,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Which {
    #[value(name = "K")]
    K,
    #[value(name = "G")]
    G,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Algebra,
    Symbols,
    Integrals,
    Matrix,
    GaussBonnet,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Algebra => Suite::Algebra,
            SuiteArg::Symbols => Suite::Symbols,
            SuiteArg::Integrals => Suite::Integrals,
            SuiteArg::Matrix => Suite::Matrix,
            SuiteArg::GaussBonnet => Suite::GaussBonnet,
            SuiteArg::All => Suite::All,
        }
    }
}

/// `a:b:n`, `n >= 1` evenly spaced points from `a` to `b`.
#[derive(Clone, Debug)]
struct Range {
    a: f64,
    b: f64,
    n: usize,
}

impl Range {
    fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.a];
        }
        (0..self.n).map(|i| self.a + (self.b - self.a) * i as f64 / (self.n - 1) as f64).collect()
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("expected a:b:n, got '{s}'");
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n == 0 {
        return Err("range needs at least one point".into());
    }
    Ok(Range { a, b, n })
}

fn parse_dim(s: &str) -> Result<usize, String> {
    let m: usize = s.parse().map_err(|_| format!("dimension must be an integer, got '{s}'"))?;
    if m < 2 || m % 2 == 1 {
        return Err(format!("dimension must be even and at least 2, got {m}"));
    }
    Ok(m)
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Derive K, G and the scalar coefficient.
    Derive {
        #[arg(long, value_parser = parse_dim, default_value = "2")]
        dim: usize,
        #[arg(long, value_enum, default_value = "kdelta")]
        operator: OpArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<String>,
    },
    /// Evaluate K(s) or G(s,t).
    #[command(allow_negative_numbers = true)]
    Eval {
        #[arg(long, value_parser = parse_dim, default_value = "2")]
        dim: usize,
        #[arg(long, value_enum, default_value = "kdelta")]
        operator: OpArg,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Tabulate K and G as CSV with header s,t,K,G.
    #[command(allow_negative_numbers = true)]
    Table {
        #[arg(long, value_parser = parse_dim, default_value = "2")]
        dim: usize,
        #[arg(long, value_enum, default_value = "kdelta")]
        operator: OpArg,
        #[arg(long = "s-range", value_parser = parse_range, allow_hyphen_values = true)]
        s_range: Range,
        #[arg(long = "t-range", value_parser = parse_range, allow_hyphen_values = true)]
        t_range: Option<Range>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Run an oracle suite; exit status 1 on any failure.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Gauss–Bonnet residual of the dim-2 curvature for k = e^h.
    #[command(allow_negative_numbers = true)]
    GaussBonnet {
        /// Modes of h as `r1,r2 : re,im` entries separated by `;`.
        #[arg(long)]
        h: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long, default_value_t = 40)]
        cap: i64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Verify,
    Pipeline(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Usage(m) => Failure::Usage(m),
            e => Failure::Pipeline(e),
        }
    }
}

fn emit(text: &str, out: &Option<String>) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(dim: usize, op: OpArg) -> Result<CurvatureReport, Failure> {
    Ok(derive_curvature(dim, op.into())?)
}

/// Shortest text that reads back to the same `f64`.
fn fmt_value(v: f64) -> String {
    v.to_string()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.verb {
        Verb::Derive { dim, operator, format, out } => {
            let r = report(dim, operator)?;
            let text = match format {
                Format::Text => r.to_text(),
                Format::Json => r.to_json() + "\n",
                Format::Csv => r.to_csv(),
            };
            emit(&text, &out)
        }
        Verb::Eval { dim, operator, which, s, t, format } => {
            let r = report(dim, operator)?;
            let v = match which {
                Which::K => {
                    if t.is_some() {
                        return Err(Failure::Usage("K takes only --s".into()));
                    }
                    r.k.eval(s, 1.0)?
                }
                Which::G => r.g.eval(s, t.ok_or_else(|| Failure::Usage("G needs --t".into()))?)?,
            };
            let name = if which == Which::K { "K" } else { "G" };
            let text = match format {
                Format::Text => format!("{}\n", fmt_value(v)),
                Format::Json => format!("{}\n", serde_json::json!({ "which": name, "s": s, "t": t, "value": v })),
                Format::Csv => format!("s,t,{name}\n{s},{},{}\n", t.map(|x| x.to_string()).unwrap_or_default(), fmt_value(v)),
            };
            emit(&text, &None)
        }
        Verb::Table { dim, operator, s_range, t_range, out } => {
            let r = report(dim, operator)?;
            let mut text = String::from("s,t,K,G\n");
            for s in s_range.points() {
                let k = r.k.eval(s, 1.0)?;
                match &t_range {
                    None => {
                        let _ = writeln!(text, "{s},,{},", fmt_value(k));
                    }
                    Some(tr) => {
                        for t in tr.points() {
                            let g = r.g.eval(s, t)?;
                            let _ = writeln!(text, "{s},{t},{},{}", fmt_value(k), fmt_value(g));
                        }
                    }
                }
            }
            emit(&text, &out)
        }
        Verb::Verify { suite, seed, tol, jobs, out } => {
            if let Some(t) = tol {
                if !(t > 0.0) {
                    return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
                }
            }
            let opts = VerifyOptions { seed, tol };
            let checks = match jobs {
                Some(0) => return Err(Failure::Usage("--jobs must be at least 1".into())),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Failure::Usage(format!("cannot start {n} workers: {e}")))?
                    .install(|| run_suite(suite.into(), &opts))?,
                None => run_suite(suite.into(), &opts)?,
            };
            let text: String = checks.iter().map(|c| format!("{c}\n")).collect();
            emit(&text, &out)?;
            if checks.iter().all(|c| c.pass) {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
        Verb::GaussBonnet { h, theta, order, cap, tol, format } => {
            let h = match h {
                Some(src) => parse_element::<C64>(&src.replace(';', "\n"), 2)?,
                None => gauss_bonnet_h(),
            };
            let th = SkewMatrix::theta2(theta);
            let res = gauss_bonnet_residual(&h, &th, order, cap)?;
            let ratio = residual_ratio_test(&h, &th, order, cap, &[0.5, 0.25])?;
            let pass = res <= tol && ratio.pass;
            let text = match format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::json!({ "residual": res, "tol": tol, "ratio_test": ratio.pass, "scaled": ratio.scaled, "pass": pass })
                ),
                Format::Csv => format!("residual,tol,ratio_test,pass\n{res:e},{tol:e},{},{pass}\n", ratio.pass),
                Format::Text => {
                    let mut s = format!("residual: {res:.3e}\n");
                    for (e, r) in &ratio.scaled {
                        let _ = writeln!(s, "residual at {e}*h: {r:.3e}");
                    }
                    let _ = writeln!(s, "ratio test: {}", if ratio.pass { "PASS" } else { "FAIL" });
                    s
                }
            };
            emit(&text, &None)?;
            if pass {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Pipeline(e)) => {
            eprintln!("error in {}: {e}", e.stage());
            ExitCode::from(3)
        }
    }
}
