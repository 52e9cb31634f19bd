//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on bad input, 2 on an internal contract
//! violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::approx::{evaluate_grid, matching_distance_approx_threads, GridSpec};
use crate::arrangement::{generate_lines_for, LineFamily};
use crate::bottleneck::{bottleneck_bars, Side, WitnessKind};
use crate::diagram::{format_bars, parse_bars, Bar};
use crate::error::Error;
use crate::exact::{matching_distance_exact_with, ExactOptions, Witness};
use crate::numeric::{parse_rational, to_f64, Rational};
use crate::presentation::{parse_presentation, GradedPresentation};
use crate::slice::{slice_diagram, Slice};

#[derive(Debug, Parser)]
#[command(
    name = "matchdist",
    version,
    about = "Exact matching distance between bipersistence modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact matching distance between two presentations.
    Exact(ExactArgs),
    /// Lower bound from a grid of slices.
    Approx(ApproxArgs),
    /// Barcode of a presentation restricted to one slice.
    Diagram(DiagramArgs),
    /// Bottleneck distance between two barcode files.
    Bottleneck(BottleneckArgs),
}

#[derive(Debug, Args)]
struct ExactArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long, env = "MATCHDIST_THREADS")]
    threads: Option<usize>,
    /// Write the arrangement lines as `A B C` triples.
    #[arg(long, value_name = "PATH")]
    dump_lines: Option<PathBuf>,
    /// Build the arrangement from every pair of grades.
    #[arg(long)]
    all_pairs: bool,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_name = "N")]
    grid_s: usize,
    #[arg(long, value_name = "M")]
    grid_t: usize,
    /// Fixed offset interval; the grid uses its interior nodes.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true, value_parser = rational_arg)]
    t_range: Option<Vec<Rational>>,
    #[arg(long)]
    json: bool,
    /// Write every sample as an `s,t,F` row.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    #[arg(long, env = "MATCHDIST_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct DiagramArgs {
    file: PathBuf,
    #[arg(long, num_args = 2, value_names = ["S", "T"], required = true, allow_negative_numbers = true, value_parser = rational_arg)]
    slice: Vec<Rational>,
    /// Weighted slice coordinates, exact (default).
    #[arg(long, conflicts_with = "unscaled")]
    scaled: bool,
    /// Arc-length coordinates along the slice, as floating point.
    #[arg(long)]
    unscaled: bool,
}

#[derive(Debug, Args)]
struct BottleneckArgs {
    d1: PathBuf,
    d2: PathBuf,
}

fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<GradedPresentation, Failure> {
    parse_presentation(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_bars(path: &Path) -> Result<Vec<Bar<Rational>>, Failure> {
    parse_bars(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Failure {
    Failure::Input(format!("cannot write output: {e}"))
}

fn exact(args: ExactArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let pm = load(&args.a)?;
    let pn = load(&args.b)?;
    let family = if args.all_pairs {
        LineFamily::AllPairs
    } else {
        LineFamily::WeightBearing
    };
    if let Some(path) = &args.dump_lines {
        let set = generate_lines_for(&pm, &pn, family);
        write_file(path, &set.lines.iter().map(|l| format!("{l}\n")).collect::<String>())?;
    }
    let options = ExactOptions {
        threads: args.threads,
        family,
    };
    let result = matching_distance_exact_with(&pm, &pn, &options);
    if matches!(result.witness, Witness::InfiniteBars { .. }) {
        writeln!(err, "note: the modules have different numbers of essential bars").map_err(io)?;
    }
    if args.json {
        let report = json!({ "distance": result.value, "witness": result.witness });
        writeln!(out, "{report}").map_err(io)?;
    } else {
        writeln!(out, "{}", result.value).map_err(io)?;
    }
    Ok(())
}

fn approx(args: ApproxArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let pm = load(&args.a)?;
    let pn = load(&args.b)?;
    let grid = GridSpec {
        slope_samples: args.grid_s,
        offset_samples: args.grid_t,
        offset_range: args.t_range.map(|v| (v[0].clone(), v[1].clone())),
    };
    if let Some(path) = &args.csv {
        let mut csv = String::from("s,t,F\n");
        for (ell, value) in evaluate_grid(&pm, &pn, &grid)? {
            csv.push_str(&format!("{},{},{}\n", ell.s(), ell.t(), value));
        }
        write_file(path, &csv)?;
    }
    let result = matching_distance_approx_threads(&pm, &pn, &grid, args.threads)?;
    if args.json {
        let report = json!({
            "lowerBound": result.lower_bound,
            "slice": result.best_slice,
        });
        writeln!(out, "{report}").map_err(io)?;
    } else {
        writeln!(out, "{}", result.lower_bound).map_err(io)?;
        writeln!(out, "{}", result.best_slice).map_err(io)?;
    }
    Ok(())
}

fn diagram(args: DiagramArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let p = load(&args.file)?;
    let ell = Slice::new(args.slice[0].clone(), args.slice[1].clone())?;
    let bars = slice_diagram(&p, &ell).bars();
    if args.unscaled {
        let w = ell.weight();
        let unscaled: Vec<Bar<f64>> = bars
            .iter()
            .map(|b| Bar::new(to_f64(&b.birth) / w, b.death.as_ref().map(|d| to_f64(d) / w)))
            .collect();
        write!(out, "{}", format_bars(&unscaled)).map_err(io)?;
    } else {
        write!(out, "{}", format_bars(&bars)).map_err(io)?;
    }
    Ok(())
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::First => "first",
        Side::Second => "second",
    }
}

fn bottleneck(args: BottleneckArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let a = load_bars(&args.d1)?;
    let b = load_bars(&args.d2)?;
    let result = bottleneck_bars(&a, &b);
    writeln!(out, "{}", result.value).map_err(io)?;
    let witness = match result.witness {
        None => serde_json::Value::Null,
        Some(w) if w.kind == WitnessKind::Unmatched => {
            let bars = if w.side == Side::First { &a } else { &b };
            json!({
                "kind": w.kind,
                "side": side_name(w.side),
                "bar": bars[w.index].to_string(),
            })
        }
        Some(w) => json!({
            "kind": w.kind,
            "first": a[w.index].to_string(),
            "second": b[w.partner.expect("matched witness has a partner")].to_string(),
        }),
    };
    writeln!(out, "{witness}").map_err(io)?;
    Ok(())
}

/// Runs the command line `argv` (program name first).
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Exact(args) => exact(args, out, err),
        Command::Approx(args) => approx(args, out),
        Command::Diagram(args) => diagram(args, out),
        Command::Bottleneck(args) => bottleneck(args, out),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Input(message)) => {
            let _ = writeln!(err, "error: {message}");
            1
        }
        Err(Failure::Internal(message)) => {
            let _ = writeln!(err, "internal error: {message}");
            2
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
