use std::path::PathBuf;
use std::process::ExitCode;

use ncindex_cli::{emit_report, run_config, OutputFormat};

struct Args {
    config: PathBuf,
    format: OutputFormat,
    out: Option<PathBuf>,
    tol_scale: f64,
    methods: Option<String>,
    seed: Option<u64>,
}

const USAGE: &str = "usage: ncindex --config PATH [--format csv|jsonl|table] [--out PATH] \
[--tol-scale FLOAT] [--methods LIST] [--seed INT]";

fn parse_args() -> Result<Args, String> {
    let mut config = None;
    let mut format = OutputFormat::Table;
    let mut out = None;
    let mut tol_scale = 1.0f64;
    let mut methods = None;
    let mut seed = None;
    let mut it = std::env::args().skip(1);
    while let Some(arg) = it.next() {
        let mut take = |name: &str| it.next().ok_or(format!("{name} needs a value"));
        match arg.as_str() {
            "--config" => config = Some(PathBuf::from(take("--config")?)),
            "--format" => format = OutputFormat::parse(&take("--format")?)?,
            "--out" => out = Some(PathBuf::from(take("--out")?)),
            "--tol-scale" => {
                tol_scale = take("--tol-scale")?.parse().map_err(|e| format!("--tol-scale: {e}"))?
            }
            "--methods" => methods = Some(take("--methods")?),
            "--seed" => seed = Some(take("--seed")?.parse().map_err(|e| format!("--seed: {e}"))?),
            "--help" | "-h" => return Err(USAGE.to_string()),
            other => return Err(format!("unexpected argument {other:?}\n{USAGE}")),
        }
    }
    Ok(Args {
        config: config.ok_or(format!("--config is required\n{USAGE}"))?,
        format,
        out,
        tol_scale,
        methods,
        seed,
    })
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    // the seed only drives randomized property suites; recorded for the log
    if let Some(seed) = args.seed {
        if std::env::var("NCINDEX_LOG").as_deref() == Ok("debug") {
            eprintln!("seed {seed} recorded (used by the randomized test suites only)");
        }
    }
    let report = match run_config(&args.config, args.methods.as_deref(), args.tol_scale) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("ncindex: {e}");
            return ExitCode::from(2);
        }
    };
    let emit_result = match &args.out {
        Some(path) => std::fs::File::create(path)
            .and_then(|mut f| emit_report(&report, args.format, &mut f)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit_report(&report, args.format, &mut lock)
        }
    };
    if let Err(e) = emit_result {
        eprintln!("ncindex: emit failed: {e}");
        return ExitCode::from(2);
    }
    if report.verdict() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
