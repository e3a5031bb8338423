use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rauzy_cli::document::load_surface;
use rauzy_cli::logfmt::render_orbit_log;
use rauzy_cli::{classify, render_svg, CliError, Phase, RenderSpec, RenderTarget};
use rauzy_core::geometry::{
    enumerate_saddle_connections, minimality_probe, trace_horizontal, MinimalityVerdict, TraceStart,
};
use rauzy_core::iet::Symbol;
use rauzy_core::induction::{
    backward_orbit, completeness_report, forward_orbit, CompletenessReport, OrbitLog, StopReason,
};
use rauzy_core::numeric::{decimal_approx, parse_rational, Basis, SymbolicReal, UNIT};
use rauzy_core::suspension::{Corner, Surface, VertexId};

#[derive(Parser)]
#[command(
    name = "rauzy",
    version,
    about = "Exact Rauzy-Veech induction on suspended interval exchanges"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a surface file and print its derived data.
    Inspect { surface: PathBuf },
    /// Run forward induction, shortening from the right.
    Forward {
        surface: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Write the orbit log (JSON lines) here.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        checkpoint_every: usize,
    },
    /// Run backward induction, growing the interval.
    Backward {
        surface: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Write the orbit log (JSON lines) here.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        checkpoint_every: usize,
    },
    /// Enumerate horizontal saddle connections up to a length bound.
    Saddles {
        surface: PathBuf,
        /// Length bound, as a rational like "10" or "7/2".
        #[arg(long)]
        max_length: String,
    },
    /// Probe minimality of the horizontal flow along the backward orbit.
    Minimality {
        surface: PathBuf,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        /// Length bound for the connection search, as a rational.
        #[arg(long)]
        max_length: String,
    },
    /// Write an SVG drawing of the surface.
    Render {
        surface: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = TargetArg::Polygon)]
        target: TargetArg,
        /// Pixels per unit length, as a rational.
        #[arg(long, default_value = "40")]
        scale: String,
        /// Trace budget for the trace target, as a rational.
        #[arg(long, default_value = "10")]
        max_length: String,
        /// Where the traced separatrix starts: "origin", "top:K", or
        /// "bottom:K".
        #[arg(long, default_value = "origin")]
        start: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Polygon,
    Zippered,
    Trace,
}

impl From<TargetArg> for RenderTarget {
    fn from(t: TargetArg) -> RenderTarget {
        match t {
            TargetArg::Polygon => RenderTarget::Polygon,
            TargetArg::Zippered => RenderTarget::Zippered,
            TargetArg::Trace => RenderTarget::Trace,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Inspect { surface } => inspect(&surface),
        Cmd::Forward {
            surface,
            steps,
            log,
            checkpoint_every,
        } => orbit(&surface, steps, log.as_deref(), checkpoint_every, false),
        Cmd::Backward {
            surface,
            steps,
            log,
            checkpoint_every,
        } => orbit(&surface, steps, log.as_deref(), checkpoint_every, true),
        Cmd::Saddles {
            surface,
            max_length,
        } => saddles(&surface, &max_length),
        Cmd::Minimality {
            surface,
            steps,
            max_length,
        } => minimality(&surface, steps, &max_length),
        Cmd::Render {
            surface,
            out,
            target,
            scale,
            max_length,
            start,
        } => render(&surface, &out, target, &scale, &max_length, &start),
    }
}

fn parse_bound(text: &str) -> Result<SymbolicReal, CliError> {
    let q = parse_rational(text).map_err(|e| classify(e, Phase::Load))?;
    Ok(SymbolicReal::from_rational(q))
}

/// Exact value, with a 12-digit decimal hint when it is not plainly
/// rational.
fn show(v: &SymbolicReal, basis: &Basis) -> Result<String, CliError> {
    if v.terms().all(|(name, _)| name == UNIT) {
        return Ok(v.to_string());
    }
    let approx = v.eval_witness(basis).map_err(|e| classify(e, Phase::Run))?;
    Ok(format!("{v} (~ {})", decimal_approx(&approx, 12)))
}

fn corner_label(c: Corner) -> String {
    match c {
        Corner::Origin => "origin".into(),
        Corner::Upper(k) => format!("a{k}"),
        Corner::Lower(j) => format!("b{j}"),
        Corner::Closing => "closing".into(),
    }
}

fn vertex_label(v: VertexId) -> String {
    match v {
        VertexId::Top(k) => format!("a{k}"),
        VertexId::Bottom(k) => format!("b{k}"),
    }
}

fn names(s: &Surface, syms: &[Symbol]) -> String {
    syms.iter()
        .map(|&y| s.alphabet.name(y))
        .collect::<Vec<_>>()
        .join(" ")
}

fn word_names(s: &Surface, syms: &[Symbol]) -> String {
    if syms.is_empty() {
        "-".into()
    } else {
        names(s, syms)
    }
}

fn per_symbol_lines(s: &Surface, values: &[SymbolicReal]) -> Result<String, CliError> {
    let mut out = String::new();
    for sym in s.alphabet.symbols() {
        out.push_str(&format!(
            "  {} = {}\n",
            s.alphabet.name(sym),
            show(&values[sym.0], &s.basis)?
        ));
    }
    Ok(out)
}

fn inspect(path: &Path) -> Result<(), CliError> {
    let (_, s) = load_surface(path)?;
    let basis = &s.basis;
    let run = |e| classify(e, Phase::Run);

    println!("surface: d = {}", s.d());
    println!(
        "alphabet: {}",
        s.alphabet.names().collect::<Vec<_>>().join(" ")
    );
    println!("top:      {}", names(&s, s.perm.top()));
    println!("bottom:   {}", names(&s, s.perm.bottom()));
    for name in basis.names().filter(|n| *n != UNIT) {
        let w = basis.witness(name).expect("listed name");
        println!("basis: {name} ~ {}", decimal_approx(w, 20));
    }
    println!("lambda:");
    print!("{}", per_symbol_lines(&s, &s.lengths)?);
    println!("total length = {}", show(&s.total_length(), basis)?);
    println!("tau:");
    print!("{}", per_symbol_lines(&s, &s.tau)?);
    println!("sum tau = {}", show(&s.total_tau(), basis)?);

    println!("pairing omega:");
    for row in s.perm.omega_matrix() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>2}")).collect();
        println!("  [{}]", cells.join(" "));
    }
    println!("displacements (omega lambda):");
    print!("{}", per_symbol_lines(&s, &s.iet().displacements())?);
    println!("heights (omega^T tau):");
    let heights = s.heights().map_err(run)?;
    print!("{}", per_symbol_lines(&s, &heights)?);
    // The exact area needs a rational factor in every λ·h term; the decimal
    // is available regardless.
    let mut area_approx = rauzy_core::numeric::Rational::from_integer(0.into());
    for (l, h) in s.lengths.iter().zip(&heights) {
        area_approx += l.eval_witness(basis).map_err(|e| classify(e, Phase::Run))?
            * h.eval_witness(basis).map_err(|e| classify(e, Phase::Run))?;
    }
    match s.area().map_err(run)? {
        Some(exact) => println!("area = {}", show(&exact, basis)?),
        None => println!("area ~ {}", decimal_approx(&area_approx, 12)),
    }

    let classes = s.singularity_classes().map_err(run)?;
    println!("singularity classes: {}", classes.classes.len());
    for (i, class) in classes.classes.iter().enumerate() {
        println!(
            "  class {i}: angle {} half-turns, {} rightward germs",
            class.half_turns, class.rightward_germs
        );
        let corners: Vec<String> = class.corners.iter().map(|&c| corner_label(c)).collect();
        println!("    corners: {}", corners.join(" "));
        let vertices: Vec<String> = class.vertices.iter().map(|&v| vertex_label(v)).collect();
        println!("    vertices: {}", vertices.join(" "));
    }
    println!("validation: ok (irreducible, cone conditions strict, lengths and heights positive)");
    Ok(())
}

fn stop_line(stop: StopReason, executed: usize) -> String {
    match stop {
        StopReason::Completed => format!("stop: completed {executed} step(s)"),
        StopReason::SigmaTauZero { step } => format!(
            "stop: sum of tau reached zero attempting step {step} ({executed} step(s) executed)"
        ),
        StopReason::ForwardTie { step } => {
            format!("stop: exact length tie attempting step {step} ({executed} step(s) executed)")
        }
    }
}

fn print_completeness(s: &Surface, report: &CompletenessReport) {
    let frozen: Vec<&str> = report
        .frozen_symbols
        .iter()
        .map(|&y| s.alphabet.name(y))
        .collect();
    if frozen.is_empty() {
        println!("frozen symbols: none");
    } else {
        println!(
            "frozen symbols (no win in the trailing {} step(s)): {}",
            report.horizon.div_ceil(2),
            frozen.join(" ")
        );
    }
    let d = s.d();
    match report.all_but_one_step {
        Some(n) => println!("all but one symbol reached {} wins by step {n}", 2 * d - 2),
        None => println!(
            "all but one symbol reached {} wins: not within horizon",
            2 * d - 2
        ),
    }
    match (report.positivity_step, report.matrix_positive) {
        (Some(n), Some(p)) => println!(
            "transport matrix entrywise positive at checkpoint {n}: {}",
            if p { "yes" } else { "no" }
        ),
        _ if report.all_but_one_step.is_none() => {
            println!("transport matrix positivity: not checked (win threshold not reached)")
        }
        _ => println!("transport matrix positivity: not checked (no checkpoint after threshold)"),
    }
}

fn print_orbit_summary(log: &OrbitLog) -> Result<(), CliError> {
    let s = &log.final_surface;
    println!(
        "{} induction on {} symbols",
        log.direction.as_str(),
        log.initial.d()
    );
    println!("{}", stop_line(log.stop, log.executed_steps()));
    let wins: Vec<String> = s
        .alphabet
        .symbols()
        .map(|y| format!("{}={}", s.alphabet.name(y), log.win_counts[y.0]))
        .collect();
    println!("win counts: {}", wins.join(" "));
    print_completeness(s, &completeness_report(log));
    println!("final top:    {}", names(s, s.perm.top()));
    println!("final bottom: {}", names(s, s.perm.bottom()));
    println!("final lambda:");
    print!("{}", per_symbol_lines(s, &s.lengths)?);
    println!(
        "final total length = {}",
        show(&s.total_length(), &s.basis)?
    );
    println!("final tau:");
    print!("{}", per_symbol_lines(s, &s.tau)?);
    Ok(())
}

fn orbit(
    path: &Path,
    steps: usize,
    log_path: Option<&Path>,
    checkpoint_every: usize,
    backward: bool,
) -> Result<(), CliError> {
    let (_, s) = load_surface(path)?;
    let log = if backward {
        backward_orbit(&s, steps, checkpoint_every)
    } else {
        forward_orbit(&s, steps, checkpoint_every)
    }
    .map_err(|e| classify(e, Phase::Run))?;
    print_orbit_summary(&log)?;
    if let Some(p) = log_path {
        std::fs::write(p, render_orbit_log(&log))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display())))?;
        println!("log written to {}", p.display());
    }
    Ok(())
}

fn saddles(path: &Path, max_length: &str) -> Result<(), CliError> {
    let (_, s) = load_surface(path)?;
    let bound = parse_bound(max_length)?;
    let found = enumerate_saddle_connections(&s, &bound).map_err(|e| classify(e, Phase::Run))?;
    println!(
        "saddle connections within length {max_length}: {}",
        found.len()
    );
    for (i, c) in found.iter().enumerate() {
        println!(
            "  {}. {} (class {}) -> {} (class {}), length {}, word: {}",
            i + 1,
            corner_label(c.start_corner),
            c.start_class,
            vertex_label(c.end_vertex),
            c.end_class,
            show(&c.length, &s.basis)?,
            word_names(&s, &c.word),
        );
    }
    Ok(())
}

fn minimality(path: &Path, steps: usize, max_length: &str) -> Result<(), CliError> {
    let (_, s) = load_surface(path)?;
    let bound = parse_bound(max_length)?;
    let report = minimality_probe(&s, &bound, steps).map_err(|e| classify(e, Phase::Run))?;
    println!(
        "connections within length {max_length}: {}",
        report.connections.len()
    );
    for (i, c) in report.connections.iter().enumerate() {
        let matched = match report.first_match_step[i] {
            Some(n) => format!("first horizontal at step {n}"),
            None => "never horizontal within the horizon".into(),
        };
        println!(
            "  {}. {} (class {}) -> {} (class {}), length {}: {matched}",
            i + 1,
            corner_label(c.start_corner),
            c.start_class,
            vertex_label(c.end_vertex),
            c.end_class,
            show(&c.length, &s.basis)?,
        );
    }
    println!("{}", stop_line(report.stop, report.steps_executed));
    print_completeness(&s, &report.completeness);
    match report.verdict {
        MinimalityVerdict::MinimalEvidence { simultaneous_step } => println!(
            "verdict: minimal_evidence (every connection horizontal simultaneously at step {simultaneous_step})"
        ),
        MinimalityVerdict::NonminimalEvidence => println!(
            "verdict: nonminimal_evidence (unmatched connection with a frozen alphabet over the full horizon)"
        ),
        MinimalityVerdict::Inconclusive => println!(
            "verdict: inconclusive (horizon too short or no certificate either way)"
        ),
    }
    Ok(())
}

fn parse_start(text: &str, d: usize) -> Result<TraceStart, CliError> {
    if text == "origin" {
        return Ok(TraceStart::Origin);
    }
    let bad = || {
        CliError::Validation(format!(
            "cannot parse start `{text}`: expected origin, top:K, or bottom:K with K in 0..={d}"
        ))
    };
    let (side, k) = text.split_once(':').ok_or_else(bad)?;
    let k: usize = k.parse().map_err(|_| bad())?;
    if k > d {
        return Err(bad());
    }
    match side {
        "top" => Ok(TraceStart::Vertex(VertexId::Top(k))),
        "bottom" => Ok(TraceStart::Vertex(VertexId::Bottom(k))),
        _ => Err(bad()),
    }
}

fn render(
    path: &Path,
    out: &Path,
    target: TargetArg,
    scale: &str,
    max_length: &str,
    start: &str,
) -> Result<(), CliError> {
    let (_, s) = load_surface(path)?;
    let scale = parse_rational(scale).map_err(|e| classify(e, Phase::Load))?;
    let spec = RenderSpec::new(target.into(), scale)?;
    let trace = if spec.target == RenderTarget::Trace {
        let bound = parse_bound(max_length)?;
        let start = parse_start(start, s.d())?;
        Some(trace_horizontal(&s, start, &bound).map_err(|e| classify(e, Phase::Run))?)
    } else {
        None
    };
    let svg = render_svg(&s, &spec, trace.as_ref())?;
    std::fs::write(out, svg)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    println!(
        "wrote {} drawing to {}",
        match spec.target {
            RenderTarget::Polygon => "polygon",
            RenderTarget::Zippered => "zippered-rectangle",
            RenderTarget::Trace => "trace",
        },
        out.display()
    );
    Ok(())
}
