//! The `domscan` command line: `run`, `verify`, `gen` and `bench`.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 input error, 3 usage
//! error.

pub mod args;
pub mod gen;
pub mod io;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;

use crate::monoid::{Count, Max, Min, Monoid, Sum};
use crate::oracle::brute_force;
use crate::pipeline::{run, ExpansionStats, PhaseTiming, PipelineConfig, Point, QueryResult, RunOutput};

use args::{BenchArgs, Cli, Command, EngineArgs, GenArgs, InputArgs, MonoidArg, RunArgs, VerifyArgs};
use gen::{generate, render_table, Instance};
use io::{input_error, read_results, read_table, render_results, write_output, CliError, CliValue, Row};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    main_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Gen(a) => cmd_gen(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportResult {
    pub id: u64,
    pub value: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub monoid: &'static str,
    pub variant: &'static str,
    pub backend: &'static str,
    pub threads: usize,
    pub results: Vec<ReportResult>,
    pub stats: ExpansionStats,
    pub phases: Vec<PhaseTiming>,
    pub total_millis: f64,
}

fn monoid_name(m: MonoidArg) -> &'static str {
    match m {
        MonoidArg::Count => "count",
        MonoidArg::Sum => "sum",
        MonoidArg::Min => "min",
        MonoidArg::Max => "max",
    }
}

fn load(input: &InputArgs) -> Result<Instance, CliError> {
    let data = read_table(&input.data)?;
    let queries = read_table(&input.queries)?;
    for (path, table) in [(&input.data, &data), (&input.queries, &queries)] {
        if let (Some(want), Some(have)) = (input.dim, table.dims) {
            if want != have {
                return Err(input_error(
                    path,
                    format!("header declares {have} coordinates but --dim is {want}"),
                ));
            }
        }
    }
    if let (Some(d), Some(q)) = (data.dims, queries.dims) {
        if d != q {
            return Err(CliError::Input(format!(
                "data file has {d} coordinates but query file has {q}"
            )));
        }
    }
    let dims = input.dim.or(queries.dims).or(data.dims).unwrap_or(1);
    Ok(Instance {
        dims,
        data: data.rows,
        queries: queries.rows,
    })
}

type Points<A> = (Vec<Point<f64, A>>, Vec<Point<f64, A>>);

fn points<A: Default>(inst: &Instance, weight: impl Fn(&Row) -> A) -> Points<A> {
    let data = inst
        .data
        .iter()
        .map(|r| Point::data(r.id, r.coords.clone(), weight(r)))
        .collect();
    let queries = inst
        .queries
        .iter()
        .map(|r| Point::query(r.id, r.coords.clone()))
        .collect();
    (data, queries)
}

fn config(dims: usize, engine: &EngineArgs) -> PipelineConfig {
    PipelineConfig::new(dims)
        .variant(engine.variant.into())
        .fast_path(engine.fast_path.into())
        .backend(engine.backend())
}

/// Calls `$body` with `$m` bound to the selected monoid and `$pts` to the
/// instance's points weighted for it. Count ignores the weight column.
macro_rules! with_monoid {
    ($arg:expr, $inst:expr, |$m:ident, $pts:ident| $body:expr) => {
        match $arg {
            MonoidArg::Count => {
                let $m = Count;
                let $pts = points($inst, |_| 1u64);
                $body
            }
            MonoidArg::Sum => {
                let $m = Sum::<f64>::new();
                let $pts = points($inst, |r| r.weight.unwrap_or(1.0));
                $body
            }
            MonoidArg::Min => {
                let $m = Min::<f64>::new();
                let $pts = points($inst, |r| r.weight.unwrap_or(1.0));
                $body
            }
            MonoidArg::Max => {
                let $m = Max::<f64>::new();
                let $pts = points($inst, |r| r.weight.unwrap_or(1.0));
                $body
            }
        }
    };
}

fn execute<M>(monoid: &M, pts: &Points<M::Value>, cfg: &PipelineConfig) -> Result<(RunOutput<M::Value>, f64), CliError>
where
    M: Monoid,
{
    let start = Instant::now();
    let output = run(&pts.0, &pts.1, monoid, cfg).map_err(|e| CliError::Input(e.to_string()))?;
    Ok((output, start.elapsed().as_secs_f64() * 1e3))
}

fn write_report<A: CliValue>(
    path: &Path,
    engine: &EngineArgs,
    output: RunOutput<A>,
    total_millis: f64,
) -> Result<(), CliError> {
    let report = RunReport {
        monoid: monoid_name(engine.monoid),
        variant: crate::pipeline::Variant::from(engine.variant).name(),
        backend: engine.backend().name(),
        threads: engine.threads,
        results: output
            .results
            .iter()
            .map(|r| ReportResult {
                id: r.id,
                value: r.value.to_json(),
            })
            .collect(),
        stats: output.stats,
        phases: output.phases,
        total_millis,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(path, text + "\n").map_err(|e| input_error(path, e))
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = load(&args.input)?;
    let cfg = config(inst.dims, &args.engine);
    with_monoid!(args.engine.monoid, &inst, |monoid, pts| {
        let (output, millis) = execute(&monoid, &pts, &cfg)?;
        write_output(args.output.as_deref(), &render_results(&output.results), out)?;
        if let Some(path) = &args.stats {
            write_report(path, &args.engine, output, millis)?;
        }
        Ok(())
    })
}

/// First position where two id-sorted result lists disagree.
fn first_difference<M: Monoid>(
    monoid: &M,
    got: &[QueryResult<M::Value>],
    want: &[QueryResult<M::Value>],
) -> Option<usize> {
    let n = got.len().min(want.len());
    (0..n)
        .find(|&i| got[i].id != want[i].id || !monoid.equivalent(&got[i].value, &want[i].value))
        .or((got.len() != want.len()).then_some(n))
}

fn describe<A: CliValue>(results: &[QueryResult<A>], i: usize) -> String {
    results
        .get(i)
        .map_or_else(|| "nothing".into(), |r| format!("{} for query {}", r.value.render(), r.id))
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let inst = load(&args.input)?;
    let cfg = config(inst.dims, &args.engine);
    with_monoid!(args.engine.monoid, &inst, |monoid, pts| {
        let (output, millis) = execute(&monoid, &pts, &cfg)?;
        let oracle = brute_force(&pts.0, &pts.1, &monoid);
        if let Some(i) = first_difference(&monoid, &output.results, &oracle) {
            return Err(CliError::Mismatch(format!(
                "pipeline gave {}, oracle gave {}",
                describe(&output.results, i),
                describe(&oracle, i)
            )));
        }
        if let Some(path) = &args.expected {
            let expected = read_results(path)?;
            if let Some(i) = first_difference(&monoid, &output.results, &expected) {
                return Err(CliError::Mismatch(format!(
                    "pipeline gave {}, {} has {}",
                    describe(&output.results, i),
                    path.display(),
                    describe(&expected, i)
                )));
            }
        }
        let _ = writeln!(
            out,
            "ok: {} queries match ({}, {}, {})",
            output.results.len(),
            monoid_name(args.engine.monoid),
            cfg.variant.name(),
            cfg.backend.name()
        );
        if let Some(path) = &args.stats {
            write_report(path, &args.engine, output, millis)?;
        }
        Ok(())
    })
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.dim == 0 {
        return Err(CliError::Input("--dim must be positive".into()));
    }
    let inst = generate(args.points, args.queries, args.dim, args.seed, args.distribution);
    std::fs::write(&args.data_out, render_table(&inst.data, inst.dims, true))
        .map_err(|e| input_error(&args.data_out, e))?;
    std::fs::write(&args.queries_out, render_table(&inst.queries, inst.dims, false))
        .map_err(|e| input_error(&args.queries_out, e))?;
    let _ = writeln!(
        out,
        "wrote {} data points to {} and {} queries to {}",
        inst.data.len(),
        args.data_out.display(),
        inst.queries.len(),
        args.queries_out.display()
    );
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.dim == 0 {
        return Err(CliError::Input("--dim must be positive".into()));
    }
    let cfg = config(args.dim, &args.engine);
    let _ = writeln!(
        out,
        "{:>9} {:>12} {:>14} {:>7} {:>12}",
        "n", "expanded", "elements", "calls", "millis"
    );
    for step in 0..args.steps {
        let n = args.start << step;
        let inst = generate(n / 2, n - n / 2, args.dim, args.seed, args.distribution);
        let (stats, millis) = with_monoid!(args.engine.monoid, &inst, |monoid, pts| {
            execute(&monoid, &pts, &cfg).map(|(o, ms)| (o.stats, ms))?
        });
        let _ = writeln!(
            out,
            "{:>9} {:>12} {:>14} {:>7} {:>12.3}",
            n, stats.expanded, stats.elements_processed, stats.primitive_calls, millis
        );
    }
    Ok(())
}
