//! Command-line surface for `holonomy`.
//!
//! Every command writes one JSON document (or CSV where it makes sense) to
//! stdout or `--out`. Exit codes: 0 success, 2 usage or validation error,
//! 3 incomplete spectrum when `--strict` is set.

use clap::{Args, Parser, Subcommand, ValueEnum};
use holonomy_core::diagnostics::{
    charsum_cancellation_report, equidist_discrepancy, pgt_report, primitivity_gap_report, DiagnosticReport,
};
use holonomy_core::enumeration::{
    ball_enumerate, build_spectrum, EnumerationOptions, SpectrumOptions, DEFAULT_BALL_CAP, DEFAULT_BUCKET_TOL,
};
use holonomy_core::io::{import_presentation, import_spectral, import_spectrum, spectrum_to_string};
use holonomy_core::measures::{ManifoldConstants, SpectralDatum};
use holonomy_core::spectrum::SpectrumTable;
use holonomy_core::sums::{ambient_count, weighted_sum_with, ClassFilter, LengthWindow, SumSpec, WeightMode};
use holonomy_core::test_functions::CutoffDescriptor;
use holonomy_core::trace_formula::{even_tf_sides_grouped, odd_tf_sides, weyl_window_report, EvenGrouping};
use holonomy_core::Error;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "holonomy", version, about = "Length/holonomy spectra, geodesic sums and trace formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Exit with status 3 when a result depends on classes beyond the
    /// spectrum's horizon.
    #[arg(long, global = true)]
    strict: bool,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate a word ball and build its spectrum up to --y.
    Enumerate(EnumerateArgs),
    /// Validate a spectrum file and summarize it.
    SpectrumCheck(SpectrumArg),
    /// Holonomy character sum K_n(y) over primitive classes.
    Charsum(CharsumArgs),
    /// Count primitive classes in a length × holonomy box.
    Count(CountArgs),
    /// Sharp sums S, S^P, T, T^P at y, and smooth T^cos/T^sin when --eta is given.
    Sums(SumsArgs),
    /// Both sides of the even trace formula.
    TfEven(TfArgs),
    /// Both sides of the odd trace formula.
    TfOdd(TfArgs),
    /// Spectral multiplicity near R against the Plancherel prediction.
    WeylWindow(WeylArgs),
    /// Prime geodesic counts against the main term.
    Pgt(PgtArgs),
    /// Holonomy equidistribution discrepancy.
    Equidist(EquidistArgs),
    /// Character-sum or primitivity-gap trend report.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct SpectrumArg {
    #[arg(long)]
    spectrum: PathBuf,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    presentation: PathBuf,
    #[arg(long, default_value_t = 3)]
    max_word_len: usize,
    /// Matrix comparison tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Complex-length grouping tolerance.
    #[arg(long, default_value_t = DEFAULT_BUCKET_TOL)]
    bucket_tol: f64,
    #[arg(long, default_value_t = DEFAULT_BALL_CAP)]
    cap: usize,
    /// Length horizon of the spectrum.
    #[arg(long)]
    y: f64,
    /// Keep m and m⁻¹ as separate elements (oriented classes).
    #[arg(long)]
    oriented: bool,
    /// Assert that the ball contains every class with length ≤ y.
    #[arg(long)]
    assert_complete: bool,
}

#[derive(Args, Debug)]
struct CharsumArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[arg(long)]
    y: f64,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    l_min: f64,
    #[arg(long)]
    l_max: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -std::f64::consts::PI)]
    hol_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::PI)]
    hol_max: f64,
}

#[derive(Args, Debug)]
struct SumsArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    #[arg(long)]
    y: f64,
    /// Smoothing width for T^cos[g_{y,η}] and T^sin[h_{y,η}].
    #[arg(long)]
    eta: Option<f64>,
}

#[derive(Args, Debug)]
struct TfArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    spectral_data: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    /// Volume of Γ\G.
    #[arg(long)]
    vol: f64,
    /// Length scale: y of g_{y,η}/h_{y,η}, or t of the tilted functions.
    #[arg(long)]
    y: f64,
    #[arg(long)]
    eta: f64,
    /// Use the tilted functions g^λ/h^λ with this λ ∈ [0, 1].
    #[arg(long)]
    lambda: Option<f64>,
    /// Fold trivial and complementary terms into ∫g dϖ* (even formula only).
    #[arg(long)]
    measure_grouping: bool,
}

#[derive(Args, Debug)]
struct WeylArgs {
    #[arg(long)]
    spectral_data: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    n: i64,
    /// Window centre R.
    #[arg(long)]
    r: f64,
    #[arg(long)]
    vol: f64,
}

#[derive(Args, Debug)]
struct PgtArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    spectral_data: Option<PathBuf>,
    /// Comma-separated y values (each ≥ 2).
    #[arg(long, value_delimiter = ',', required = true)]
    y_grid: Vec<f64>,
}

#[derive(Args, Debug)]
struct EquidistArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    y: f64,
    #[arg(long, default_value_t = 64)]
    grid_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    Charsum,
    Gaps,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long, value_enum)]
    diagnostic: ReportKind,
    /// Comma-separated frequencies.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    n: Vec<i64>,
    #[arg(long, value_delimiter = ',', required = true)]
    y_grid: Vec<f64>,
}

/// Settings shared by all commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub threads: usize,
}

impl RunConfig {
    fn validate(&self) -> Result<(), Failure> {
        if self.threads == 0 {
            return Err(Failure::invalid("--threads must be a positive integer"));
        }
        Ok(())
    }

    fn parallel(&self) -> bool {
        self.threads > 1
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

struct Ctx {
    config: RunConfig,
    /// Whether any result used by the command is incomplete.
    incomplete: bool,
}

impl Ctx {
    fn core(&self, e: Error) -> Failure {
        let code = match e {
            Error::IncompleteSpectrum { .. } if self.config.strict => EXIT_INCOMPLETE,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }

    fn note(&mut self, complete: bool) -> bool {
        if !complete {
            self.incomplete = true;
        }
        complete
    }

    fn csv_unsupported(&self, command: &str) -> Result<(), Failure> {
        if self.config.format == Format::Csv {
            return Err(Failure::invalid(format!("--format csv is not available for `{command}`")));
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::invalid(format!("--{name} must be positive, got {v}")))
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn load_spectrum(ctx: &Ctx, path: &Path) -> Result<SpectrumTable, Failure> {
    import_spectrum(path).map_err(|e| ctx.core(e).with_context(path))
}

fn load_spectral(ctx: &Ctx, path: Option<&Path>) -> Result<Vec<SpectralDatum>, Failure> {
    match path {
        Some(p) => import_spectral(p).map_err(|e| ctx.core(e).with_context(p)),
        None => Ok(Vec::new()),
    }
}

impl Failure {
    fn with_context(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialization");
    s.push('\n');
    s
}

fn report_output(ctx: &Ctx, report: &DiagnosticReport) -> String {
    match ctx.config.format {
        Format::Json => to_json(report),
        Format::Csv => report.to_csv(),
    }
}

fn execute(command: Command, ctx: &mut Ctx) -> Result<String, Failure> {
    let parallel = ctx.config.parallel();
    match command {
        Command::Enumerate(a) => {
            let p = import_presentation(&a.presentation).map_err(|e| ctx.core(e).with_context(&a.presentation))?;
            positive("tol", a.tol)?;
            positive("bucket-tol", a.bucket_tol)?;
            positive("y", a.y)?;
            if a.cap == 0 {
                return Err(Failure::invalid("--cap must be a positive integer"));
            }
            let opts = EnumerationOptions {
                max_word_len: a.max_word_len,
                tol: a.tol,
                cap: a.cap,
                identify_inverses: !a.oriented,
                parallel,
            };
            let ball = ball_enumerate(&p, &opts).map_err(|e| ctx.core(e))?;
            let sopts = SpectrumOptions {
                tol: a.tol,
                bucket_tol: a.bucket_tol,
                identify_inverses: !a.oriented,
                assert_complete: a.assert_complete,
            };
            let built = build_spectrum(&ball.elements, a.y, &sopts).map_err(|e| ctx.core(e))?;
            ctx.note(built.table.complete());
            Ok(match ctx.config.format {
                Format::Csv => spectrum_to_string(&built.table),
                Format::Json => to_json(&json!({
                    "presentation": p.name,
                    "generators": p.generators().len(),
                    "max_word_len": a.max_word_len,
                    "ball_size": ball.ball_size,
                    "elements": ball.elements.len(),
                    "undecided_pairs": built.undecided_pairs,
                    "rejected": built.rejected,
                    "complete": built.table.complete(),
                    "horizon": built.table.horizon(),
                    "systole": built.table.systole(),
                    "classes": built.table.classes(),
                })),
            })
        }
        Command::SpectrumCheck(a) => {
            let t = load_spectrum(ctx, &a.spectrum)?;
            ctx.note(t.complete());
            Ok(match ctx.config.format {
                Format::Csv => spectrum_to_string(&t),
                Format::Json => to_json(&json!({
                    "classes": t.len(),
                    "primitive_count": t.primitive_count(),
                    "systole": t.systole(),
                    "horizon": t.horizon(),
                    "max_length": t.max_length(),
                    "complete": t.complete(),
                })),
            })
        }
        Command::Charsum(a) => {
            ctx.csv_unsupported("charsum")?;
            let t = load_spectrum(ctx, &a.spectrum)?;
            let spec = SumSpec {
                weight_mode: WeightMode::Unit,
                class_filter: ClassFilter::PrimitiveOnly,
                length_window: LengthWindow::up_to(a.y),
                holonomy_weight: holonomy_core::sums::HolonomyWeight::Character(a.n),
            };
            let r = weighted_sum_with(&t, &spec, parallel).map_err(|e| ctx.core(e))?;
            let complete = ctx.note(r.complete);
            Ok(to_json(&json!({
                "n": a.n,
                "y": a.y,
                "value": complex_json(r.value),
                "complete": complete,
            })))
        }
        Command::Count(a) => {
            ctx.csv_unsupported("count")?;
            let t = load_spectrum(ctx, &a.spectrum)?;
            let r = ambient_count(&t, (a.l_min, a.l_max), (a.hol_min, a.hol_max)).map_err(|e| ctx.core(e))?;
            let complete = ctx.note(r.complete);
            Ok(to_json(&json!({
                "l_min": a.l_min,
                "l_max": a.l_max,
                "hol_min": a.hol_min,
                "hol_max": a.hol_max,
                "count": r.value,
                "complete": complete,
            })))
        }
        Command::Sums(a) => {
            ctx.csv_unsupported("sums")?;
            let t = load_spectrum(ctx, &a.spectrum)?;
            let mut out = serde_json::Map::new();
            out.insert("n".into(), json!(a.n));
            out.insert("y".into(), json!(a.y));
            let sharp = [
                ("s", WeightMode::ExpWeight, ClassFilter::All),
                ("s_p", WeightMode::ExpWeight, ClassFilter::PrimitiveOnly),
                ("t", WeightMode::TraceWeight, ClassFilter::All),
                ("t_p", WeightMode::TraceWeight, ClassFilter::PrimitiveOnly),
            ];
            let mut all_complete = true;
            for (name, mode, filter) in sharp {
                let r = weighted_sum_with(&t, &SumSpec::sharp(mode, filter, a.n, a.y), parallel)
                    .map_err(|e| ctx.core(e))?;
                all_complete &= r.complete;
                out.insert(name.into(), complex_json(r.value));
            }
            if let Some(eta) = a.eta {
                let g = CutoffDescriptor::g_y_eta(a.y, eta).map_err(|e| ctx.core(e))?;
                let h = CutoffDescriptor::h_y_eta(a.y, eta).map_err(|e| ctx.core(e))?;
                let c = weighted_sum_with(&t, &SumSpec::t_cos(a.n, g), parallel).map_err(|e| ctx.core(e))?;
                let s = weighted_sum_with(&t, &SumSpec::t_sin(a.n, h), parallel).map_err(|e| ctx.core(e))?;
                all_complete &= c.complete && s.complete;
                out.insert("eta".into(), json!(eta));
                out.insert("t_cos_smooth".into(), json!(c.value.re));
                out.insert("t_sin_smooth".into(), json!(s.value.re));
            }
            out.insert("complete".into(), json!(ctx.note(all_complete)));
            Ok(to_json(&Value::Object(out)))
        }
        Command::TfEven(a) => trace_formula(ctx, a, true),
        Command::TfOdd(a) => trace_formula(ctx, a, false),
        Command::WeylWindow(a) => {
            ctx.csv_unsupported("weyl-window")?;
            let spectral = load_spectral(ctx, a.spectral_data.as_deref())?;
            let mc = ManifoldConstants::new(a.vol, 1.0).map_err(|e| ctx.core(e))?;
            let w = weyl_window_report(&spectral, a.r, a.n, &mc).map_err(|e| ctx.core(e))?;
            Ok(to_json(&json!({
                "n": a.n,
                "r": a.r,
                "vol": a.vol,
                "count": w.count,
                "plancherel_term": w.plancherel_term,
            })))
        }
        Command::Pgt(a) => {
            let t = load_spectrum(ctx, &a.spectrum)?;
            let comp = load_spectral(ctx, a.spectral_data.as_deref())?;
            ctx.note(t.complete());
            let r = pgt_report(&t, &comp, &a.y_grid).map_err(|e| ctx.core(e))?;
            Ok(report_output(ctx, &r))
        }
        Command::Equidist(a) => {
            ctx.csv_unsupported("equidist")?;
            let t = load_spectrum(ctx, &a.spectrum)?;
            let d = equidist_discrepancy(&t, a.y, a.grid_size).map_err(|e| ctx.core(e))?;
            let complete = ctx.note(t.complete() && a.y <= t.horizon());
            Ok(to_json(&json!({
                "y": a.y,
                "grid_size": a.grid_size,
                "discrepancy": d,
                "complete": complete,
            })))
        }
        Command::Report(a) => {
            let t = load_spectrum(ctx, &a.spectrum)?;
            ctx.note(t.complete());
            let r = match a.diagnostic {
                ReportKind::Charsum => charsum_cancellation_report(&t, &a.n, &a.y_grid),
                ReportKind::Gaps => primitivity_gap_report(&t, &a.n, &a.y_grid),
            }
            .map_err(|e| ctx.core(e))?;
            Ok(report_output(ctx, &r))
        }
    }
}

fn trace_formula(ctx: &mut Ctx, a: TfArgs, even: bool) -> Result<String, Failure> {
    ctx.csv_unsupported(if even { "tf-even" } else { "tf-odd" })?;
    let t = load_spectrum(ctx, &a.spectrum)?;
    let spectral = load_spectral(ctx, a.spectral_data.as_deref())?;
    let mc = ManifoldConstants::new(a.vol, t.systole().max(f64::MIN_POSITIVE)).map_err(|e| ctx.core(e))?;
    let g = match (a.lambda, even) {
        (None, true) => CutoffDescriptor::g_y_eta(a.y, a.eta),
        (None, false) => CutoffDescriptor::h_y_eta(a.y, a.eta),
        (Some(l), true) => CutoffDescriptor::g_lambda(a.y, a.eta, l),
        (Some(l), false) => CutoffDescriptor::h_lambda(a.y, a.eta, l),
    }
    .map_err(|e| ctx.core(e))?;
    let report = if even {
        let grouping = if a.measure_grouping {
            EvenGrouping::Measure
        } else {
            EvenGrouping::Standard
        };
        even_tf_sides_grouped(&g, a.n, &spectral, &t, &mc, grouping)
    } else {
        if a.measure_grouping {
            return Err(Failure::invalid("--measure-grouping applies to tf-even only"));
        }
        odd_tf_sides(&g, a.n, &spectral, &t, &mc)
    }
    .map_err(|e| ctx.core(e))?;
    ctx.note(report.geodesic_sum_complete);
    Ok(to_json(&json!({
        "test_function": g,
        "n": a.n,
        "vol": a.vol,
        "report": report,
    })))
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code. Output goes to `stdout` or `--out`; diagnostics to `stderr`.
pub fn run_command<W: Write, E: Write>(argv: &[String], stdout: &mut W, stderr: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_INVALID,
            };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    let config = RunConfig {
        format: cli.format,
        out: cli.out,
        strict: cli.strict,
        threads: cli.threads.unwrap_or(1),
    };
    if let Err(f) = config.validate() {
        let _ = writeln!(stderr, "error: {}", f.message);
        return f.code;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start thread pool: {e}");
            return EXIT_INVALID;
        }
    };
    let mut ctx = Ctx {
        config,
        incomplete: false,
    };
    let result = pool.install(|| execute(cli.command, &mut ctx));
    let text = match result {
        Ok(t) => t,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    let written = match &ctx.config.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_INVALID;
    }
    if ctx.incomplete {
        let _ = writeln!(stderr, "warning: result depends on classes beyond the spectrum's horizon");
        if ctx.config.strict {
            return EXIT_INCOMPLETE;
        }
    }
    EXIT_OK
}
