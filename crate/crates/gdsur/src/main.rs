use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use gdsur::config::{parse_plan, McMode};
use gdsur::empirical::{run_empirical, EmpiricalOptions, FactorModel};
use gdsur::error::{AppError, AppResult, DataError};
use gdsur::fdb::fdb_test_par;
use gdsur::fixedb::{FixedBCache, TableSpec};
use gdsur::io::{load_csv_panel, load_simulated_panel, write_panel_csv, CsvPanelSchema, DateRange};
use gdsur::montecarlo::{self, parse_qr_sign, McAccuracy, McConfig, McRejection};
use gdsur::report::{self, BiasBootstrap, FitReport, McManifest, McResults, McRows, TestReport, SCHEMA_VERSION};
use gdsur_core::bootstrap::bc_gd_fit;
use gdsur_core::dgp::{build_block_var, simulate, DesignConfig, Panel, Regime, SystemParams};
use gdsur_core::estimators::{fit, select_lag_bic, Method};
use gdsur_core::inference::{grs_test, har_fixed_b_test, wald, LinearRestriction, TestMethod};
use gdsur_core::numerics::QrSign;
use gdsur_core::RngStream;

#[derive(Clone, Copy, Debug)]
enum Lag {
    Auto,
    Fixed(usize),
}

fn parse_lag(s: &str) -> Result<Lag, String> {
    match s {
        "auto" => Ok(Lag::Auto),
        _ => match s.parse::<usize>() {
            Ok(p) if p >= 1 => Ok(Lag::Fixed(p)),
            _ => Err(format!("expected 'auto' or a positive integer, got {s:?}")),
        },
    }
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    Regime::parse(s).ok_or_else(|| format!("expected bd, gexog or ebd, got {s:?}"))
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::parse(s).ok_or_else(|| format!("expected ols, fgls-co, fgls-d, gd or bc-gd, got {s:?}"))
}

fn parse_test(s: &str) -> Result<TestMethod, String> {
    TestMethod::parse(s).ok_or_else(|| format!("expected wald-gd, wald-fgls-d, wald-fgls-co, grs, har or fdb, got {s:?}"))
}

fn parse_sign(s: &str) -> Result<QrSign, String> {
    parse_qr_sign(s).ok_or_else(|| format!("expected householder or positive-diagonal, got {s:?}"))
}

fn parse_model(s: &str) -> Result<FactorModel, String> {
    FactorModel::parse(s).ok_or_else(|| format!("expected ff3, ff5 or custom, got {s:?}"))
}

fn parse_null(s: &str) -> Result<String, String> {
    if s == "alpha-zero" {
        Ok(s.into())
    } else {
        Err(format!("only the alpha-zero null is supported, got {s:?}"))
    }
}

/// Generalized Durbin estimation and specification tests for multi-equation
/// time-series regressions.
#[derive(Parser)]
#[command(name = "gdsur", version)]
struct Cli {
    /// Cap on worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a panel from the baseline design of a regime.
    Simulate {
        #[arg(long, value_parser = parse_regime)]
        regime: Regime,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        burn_in: usize,
        /// α₁ (all other intercepts stay zero).
        #[arg(long, default_value_t = 0.0)]
        alpha_shift: f64,
        #[arg(long, default_value = "householder", value_parser = parse_sign)]
        qr_sign: QrSign,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the system.
    Fit {
        #[arg(long, value_parser = parse_method)]
        method: Method,
        #[arg(long, default_value = "auto", value_parser = parse_lag)]
        p: Lag,
        #[arg(long, default_value_t = 4)]
        p_max: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// Column schema (JSON) for files not written by `simulate`.
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed of the bias-correction bootstrap.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 199)]
        b_bias: usize,
    },
    /// Test α = 0.
    Test {
        #[arg(long, value_parser = parse_test)]
        method: TestMethod,
        #[arg(long, default_value = "alpha-zero", value_parser = parse_null)]
        null: String,
        #[arg(long, default_value_t = 199)]
        b1: usize,
        /// HAR bandwidth as a fraction of T.
        #[arg(long, default_value_t = gdsur_core::inference::DEFAULT_B)]
        b: f64,
        #[arg(long, default_value = "auto", value_parser = parse_lag)]
        p: Lag,
        #[arg(long, default_value_t = 4)]
        p_max: usize,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = gdsur_core::inference::DEFAULT_N_GRID)]
        n_grid: usize,
        #[arg(long, default_value_t = gdsur_core::inference::DEFAULT_N_SIMS)]
        n_sims: usize,
    },
    /// Run a Monte Carlo job file.
    Mc {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for tables, results.json and manifest.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Test a factor model on return data.
    Empirical {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long, value_parser = parse_model)]
        model: FactorModel,
        #[arg(long)]
        out: Option<PathBuf>,
        /// First date kept, in the file's date notation.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        end: Option<String>,
        #[arg(long, default_value = "auto", value_parser = parse_lag)]
        p: Lag,
        #[arg(long, default_value_t = 4)]
        p_max: usize,
        #[arg(long, default_value_t = 199)]
        b1: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> AppResult<()> {
    let res = match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().lock().write_all(bytes).map_err(|e| e.to_string()),
    };
    res.map_err(AppError::Output)
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> AppResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| AppError::Output(e.to_string()))?;
    bytes.push(b'\n');
    write_out(path, &bytes)
}

fn load_panel(input: &Path, schema: Option<&Path>) -> AppResult<Panel> {
    Ok(match schema {
        Some(s) => load_csv_panel(input, &CsvPanelSchema::from_json_file(s)?, &DateRange::all())?,
        None => load_simulated_panel(input)?,
    })
}

fn resolve_lag(panel: &Panel, p: Lag, p_max: usize) -> AppResult<usize> {
    Ok(match p {
        Lag::Fixed(p) => p,
        Lag::Auto => select_lag_bic(panel, p_max)?,
    })
}

fn cmd_simulate(
    regime: Regime,
    (n, r, t): (usize, usize, usize),
    seed: u64,
    burn_in: usize,
    alpha_shift: f64,
    qr_sign: QrSign,
    out: Option<&Path>,
) -> AppResult<()> {
    let stream = RngStream::new(seed, 0);
    let design = DesignConfig { qr_sign, ..DesignConfig::baseline(regime, r, n) };
    let spec = build_block_var(&design, stream.substream(0))?;
    let params = SystemParams::alternative(n, r, alpha_shift);
    let panel = simulate(&spec, &params, t, burn_in, stream.substream(1))?;
    let mut buf = Vec::new();
    write_panel_csv(&panel, &mut buf).map_err(|e| AppError::Output(e.to_string()))?;
    write_out(out, &buf)
}

fn cmd_test(
    method: TestMethod,
    panel: &Panel,
    p: Lag,
    p_max: usize,
    (b1, b, n_grid, n_sims): (usize, f64, usize, usize),
    seed: u64,
) -> AppResult<TestReport> {
    let restr = LinearRestriction::alpha_zero(panel.n(), panel.r());
    let q = restr.q();
    let gls = |m: Method| -> AppResult<TestReport> {
        let p = resolve_lag(panel, p, p_max)?;
        Ok(TestReport::new(&wald(&fit(panel, m, p)?, &restr)?, q, None))
    };
    match method {
        TestMethod::WaldGd => gls(Method::Gd),
        TestMethod::WaldFglsD => gls(Method::FglsD),
        TestMethod::WaldFglsCo => gls(Method::FglsCo),
        TestMethod::Grs => Ok(TestReport::new(&grs_test(panel)?, q, None)),
        TestMethod::Har => {
            let spec = TableSpec { n_grid, n_sims, ..TableSpec::new(b, q) };
            let table = FixedBCache::global().table(spec)?;
            Ok(TestReport::new(&har_fixed_b_test(panel, &restr, &table)?, q, None))
        }
        TestMethod::Fdb => {
            let p = resolve_lag(panel, p, p_max)?;
            let out = fdb_test_par(panel, &restr, p, b1, RngStream::new(seed, 0))?;
            Ok(TestReport::new(&out, q, Some(seed)))
        }
    }
}

fn write_file(dir: &Path, name: &str, text: &str, files: &mut Vec<String>) -> AppResult<()> {
    write_out(Some(&dir.join(name)), text.as_bytes())?;
    files.push(name.into());
    Ok(())
}

fn dump_csv(rows: &[McAccuracy], cfg: &McConfig) -> String {
    let k = cfg.n * (1 + cfg.r);
    let mut out = String::from("T,rep,method");
    for j in 0..k {
        out.push_str(&format!(",kappa{}", j + 1));
    }
    out.push('\n');
    for row in rows {
        let Some(d) = &row.dump else { continue };
        for (rep, est) in d.iter().enumerate() {
            for (m, e) in cfg.estimators.iter().zip(est) {
                out.push_str(&format!("{},{},{}", row.t, rep, m.as_str()));
                match e {
                    Some(kh) => kh.iter().for_each(|v| out.push_str(&format!(",{v}"))),
                    None => (0..k).for_each(|_| out.push(',')),
                }
                out.push('\n');
            }
        }
    }
    out
}

fn cmd_mc(config: &Path, out: &Path) -> AppResult<()> {
    let text = std::fs::read_to_string(config).map_err(|source| DataError::Io { path: config.into(), source })?;
    let plan = parse_plan(&text).map_err(|m| AppError::Usage(format!("{}: {m}", config.display())))?;
    std::fs::create_dir_all(out).map_err(|e| AppError::Output(format!("{}: {e}", out.display())))?;
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut files = Vec::new();
    let mode = plan.mode;
    let rows = match mode {
        McMode::Accuracy => {
            let rows = plan.cells().map(|c| montecarlo::run_accuracy(&c)).collect::<Result<Vec<_>, _>>()?;
            write_file(out, "accuracy.csv", &montecarlo::accuracy_table_csv(&rows), &mut files)?;
            write_file(out, "accuracy_cells.csv", &montecarlo::accuracy_cells_csv(&rows), &mut files)?;
            if plan.base.dump {
                write_file(out, "accuracy_dump.csv", &dump_csv(&rows, &plan.base), &mut files)?;
            }
            McRows::Accuracy(rows)
        }
        McMode::Size => {
            let rows = plan.cells().map(|c| montecarlo::run_size(&c)).collect::<Result<Vec<_>, _>>()?;
            write_file(out, "size.csv", &montecarlo::rejection_table_csv(&rows), &mut files)?;
            write_file(out, "size_cells.csv", &montecarlo::rejection_cells_csv(&rows), &mut files)?;
            McRows::Size(rows)
        }
        McMode::Power => {
            let mut null: Vec<McRejection> = Vec::new();
            let mut power = Vec::new();
            for c in plan.cells() {
                let pw = montecarlo::run_power(&c)?;
                null.push(pw.null);
                power.push(pw.power);
            }
            write_file(out, "power.csv", &montecarlo::rejection_table_csv(&power), &mut files)?;
            write_file(out, "power_cells.csv", &montecarlo::rejection_cells_csv(&power), &mut files)?;
            write_file(out, "power_null_cells.csv", &montecarlo::rejection_cells_csv(&null), &mut files)?;
            McRows::Power { null, power }
        }
    };
    let results = McResults {
        schema_version: SCHEMA_VERSION,
        kind: "mc-results",
        mode: mode.as_str(),
        config: plan.base.clone(),
        t_values: plan.t_values.clone(),
        rows,
    };
    write_json(Some(&out.join("results.json")), &results)?;
    files.push("results.json".into());
    let manifest = McManifest {
        schema_version: SCHEMA_VERSION,
        kind: "mc-manifest",
        mode: mode.as_str(),
        config: plan.base.clone(),
        t_values: plan.t_values.clone(),
        seed: plan.base.seed,
        stream_layout: report::STREAM_LAYOUT,
        git_describe: report::git_describe(),
        threads: rayon::current_num_threads(),
        started_unix,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        files,
    };
    write_json(Some(&out.join("manifest.json")), &manifest)
}

#[allow(clippy::too_many_arguments)]
fn cmd_empirical(
    data: &Path,
    schema: &Path,
    model: FactorModel,
    range: DateRange,
    p: Lag,
    p_max: usize,
    b1: usize,
    seed: u64,
) -> AppResult<report::EmpiricalReport> {
    let mut schema = CsvPanelSchema::from_json_file(schema)?;
    if let Some(f) = model.factors() {
        schema.factor_columns = f.iter().map(|s| s.to_string()).collect();
    }
    let panel = load_csv_panel(data, &schema, &range)?;
    let opts = EmpiricalOptions {
        p: match p {
            Lag::Auto => None,
            Lag::Fixed(p) => Some(p),
        },
        p_max,
        b1,
        seed,
    };
    run_empirical(&panel, model, &schema.factor_columns, &schema.portfolio_columns, (range.start, range.end), &opts)
}

fn run(cli: Cli) -> AppResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(AppError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Usage(format!("cannot configure threads: {e}")))?;
    }
    match cli.cmd {
        Cmd::Simulate { regime, n, r, t, seed, burn_in, alpha_shift, qr_sign, out } => {
            cmd_simulate(regime, (n, r, t), seed, burn_in, alpha_shift, qr_sign, out.as_deref())
        }
        Cmd::Fit { method, p, p_max, input, schema, out, seed, b_bias } => {
            let panel = load_panel(&input, schema.as_deref())?;
            let (f, boot) = match method {
                Method::Ols => (fit(&panel, Method::Ols, 1)?, None),
                Method::BcGd => {
                    let p = resolve_lag(&panel, p, p_max)?;
                    let f = bc_gd_fit(&panel, p, b_bias, RngStream::new(seed, 0))?;
                    (f, Some(BiasBootstrap { replications: b_bias, seed }))
                }
                m => (fit(&panel, m, resolve_lag(&panel, p, p_max)?)?, None),
            };
            write_json(out.as_deref(), &FitReport::new(&f, panel.t(), boot))
        }
        Cmd::Test { method, null: _, b1, b, p, p_max, input, schema, out, seed, n_grid, n_sims } => {
            let panel = load_panel(&input, schema.as_deref())?;
            let rep = cmd_test(method, &panel, p, p_max, (b1, b, n_grid, n_sims), seed)?;
            write_json(out.as_deref(), &rep)
        }
        Cmd::Mc { config, out } => cmd_mc(&config, &out),
        Cmd::Empirical { data, schema, model, out, start, end, p, p_max, b1, seed } => {
            let rep = cmd_empirical(&data, &schema, model, DateRange { start, end }, p, p_max, b1, seed)?;
            write_json(out.as_deref(), &rep)
        }
    }
}

fn report_error(e: &AppError) {
    let body = serde_json::json!({
        "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() }
    });
    eprintln!("{body}");
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = AppError::Usage(e.render().to_string().trim().to_string());
            report_error(&err);
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(&e);
            ExitCode::from(e.exit_code())
        }
    }
}
