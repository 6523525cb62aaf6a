//! Command-line front end: model checking runs, parameter sweeps and
//! bimatrix solving.

pub mod args;
pub mod nfg;
pub mod report;
pub mod run;
pub mod sweep;

use std::io::{self, Write};

use csgnash::nash::NashSettings;

use args::{CheckArgs, Cli, Command, Format, NfgArgs};
use report::Report;
use run::{check_property, load_model, stats, status, Failure, Options, PropertySource, EXIT_USAGE};

/// Runs the parsed command line and returns the process exit status.
pub fn execute(cli: Cli) -> i32 {
    let result = match &cli.command {
        Some(Command::SolveNfg(a)) => solve_nfg(a),
        None => check(&cli.check),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure::usage(format!("output: {e}"))
}

fn solve_nfg(a: &NfgArgs) -> Result<i32, Failure> {
    let z1 = nfg::parse_matrix(&a.z1).map_err(Failure::usage)?;
    let z2 = nfg::parse_matrix(&a.z2).map_err(Failure::usage)?;
    let r = nfg::solve(z1, z2).map_err(Failure::usage)?;
    let out = io::stdout().lock();
    match a.format {
        Format::Human => nfg::write_human(&mut { out }, &r),
        Format::Json => report::write_json(out, &r),
        Format::Csv => nfg::write_csv(out, &r),
    }
    .map_err(io_failure)?;
    Ok(0)
}

fn options(a: &CheckArgs) -> Options {
    Options {
        settings: NashSettings {
            conv_epsilon: a.conv_epsilon,
            max_iters: a.max_iters,
            exact: a.exact,
            strict: a.strict_assumptions,
            trace: Vec::new(),
        },
        verify: a.verify.then_some(a.epsilon),
        export: a.export_strategy.is_some(),
        trace: a.trace.clone(),
    }
}

fn check(a: &CheckArgs) -> Result<i32, Failure> {
    let path = a.model.as_deref().ok_or_else(|| Failure::usage("--model is required"))?;
    let file = match &a.property_file {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let source = PropertySource { inline: a.property.clone(), file };
    let opts = options(a);
    if let Some(range) = &a.sweep {
        if a.export_strategy.is_some() {
            return Err(Failure::usage("--export-strategy cannot be combined with --sweep"));
        }
        if source.is_empty() {
            return Err(Failure::usage("--sweep needs at least one property"));
        }
        let (r, code) = sweep::run(a, range, &source, &opts)?;
        let out = io::stdout().lock();
        match a.format {
            Format::Json => report::write_json(out, &r),
            Format::Human | Format::Csv => sweep::write_csv(out, &r),
        }
        .map_err(io_failure)?;
        return Ok(code);
    }

    let (g, constr) = load_model(path, &a.consts)?;
    let mut results = Vec::new();
    let mut exports = Vec::new();
    for (text, f) in source.parse(&g)? {
        let checked = check_property(&g, &text, &f, &opts)?;
        results.push(checked.record);
        exports.extend(checked.export);
    }
    if let Some(p) = &a.export_strategy {
        let file = std::fs::File::create(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
        report::write_json(io::BufWriter::new(file), &exports).map_err(io_failure)?;
    }
    let r = Report {
        model: path.display().to_string(),
        constants: a.consts.clone(),
        stats: stats(&g),
        constr_s: constr.as_secs_f64(),
        results,
    };
    let mut out = io::stdout().lock();
    match a.format {
        Format::Human => report::write_human(&mut out, &r),
        Format::Json => report::write_json(&mut out, &r),
        Format::Csv => report::write_csv(&mut out, &r),
    }
    .and_then(|_| out.flush())
    .map_err(io_failure)?;
    Ok(status(&r.results))
}

/// Sizes the global thread pool from `CSG_THREADS` when set.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CSG_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| Failure::usage(format!("CSG_THREADS: not a count: `{v}`")))?;
    if n == 0 {
        return Err(Failure { code: EXIT_USAGE, message: "CSG_THREADS must be positive".into() });
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))
}
