use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use amdyn::cli::{commands_help, error_json, export, parse_config, run, Format};
use amdyn::Error;

/// Random dynamics of two piecewise-affine interval maps.
#[derive(Parser, Debug)]
#[command(name = "amdyn", version, after_help = commands_help())]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for batched simulations.
    #[arg(long)]
    threads: Option<usize>,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("{}", error_json(e));
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AMDYN_LOG", "warn")).init();
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => return fail(&Error::Io(format!("{}: {e}", args.config.display()))),
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(f) = &args.format {
        cfg.format = Format::parse(f).expect("clap restricts the values");
    }
    if args.output.is_some() {
        cfg.output = args.output.clone();
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .expect("thread pool");
    let out = match pool.install(|| run(&cfg)) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    if let Err(e) = export(&out.artifact.render(cfg.format), cfg.output.as_deref()) {
        return fail(&e);
    }
    match out.warning {
        Some(w) => fail(&w),
        None => ExitCode::SUCCESS,
    }
}
