//! `asnp`: Newton polygons of Artin–Schreier L-functions from the command line.

mod job;
mod report;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use asnp_core::dwork::{traces_for, truncation_dim};
use asnp_core::oracle::{oracle_np, ORACLE_MAX_ELEMENTS};
use asnp_core::padic::{PadicCtx, PiRing};
use asnp_core::scan::{scan_lambda, search_family, ScanOptions};
use clap::{Args, Parser, Subcommand};

use job::{Flags, Format, JobSpec};

/// Exit status for polygons that stayed uncertified at the requested precision.
const EXIT_INSUFFICIENT: u8 = 3;
/// Exit status for a search that found λ-dependent polygons.
const EXIT_WITNESSES: u8 = 2;

#[derive(Parser)]
#[command(
    name = "asnp",
    version,
    about = "Newton polygons of Artin-Schreier L-functions via Dwork traces"
)]
struct Cli {
    /// Worker threads for scans, searches and the oracle.
    #[arg(long, env = "ASNP_THREADS", global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    a: usize,
    /// Irreducible monic polynomial for F_q, coefficients low to high.
    #[arg(long)]
    min_poly: Option<String>,
}

impl FieldArgs {
    fn min_poly(&self) -> Result<Option<Vec<u64>>, job::SpecError> {
        self.min_poly
            .as_deref()
            .map(|s| job::parse_min_poly(s, self.p))
            .transpose()
    }

    fn field(&self) -> Result<asnp_core::FieldCtx, job::SpecError> {
        job::field_ctx(self.p, self.a, self.min_poly()?.as_ref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient valuations and the certified Newton polygon of L_{λf}.
    Np(NpArgs),
    /// Tr(M^k) as π-power coordinate arrays.
    Traces(TracesArgs),
    /// Compare polygons across all λ^(p-1) classes.
    Scan(ScanArgs),
    /// Scan every polynomial in a family; JSON lines, exit 2 on witnesses.
    Search(SearchArgs),
    /// Exact L-polynomial by character-sum enumeration.
    Oracle(OracleArgs),
    /// Render an `np` JSON report as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct NpArgs {
    /// Read the whole job from a JSON file; other job flags are ignored.
    #[arg(long, conflicts_with_all = ["p", "f"])]
    spec: Option<PathBuf>,
    #[arg(long, required_unless_present = "spec")]
    p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    a: usize,
    #[arg(long)]
    min_poly: Option<String>,
    /// Coefficients of f low to high; "k0;k1" gives F_q coordinates.
    #[arg(long, required_unless_present = "spec", allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    lambda: String,
    /// Target precision N; escalates 2..=p when omitted.
    #[arg(long)]
    prec: Option<u32>,
    /// Number of traces m.
    #[arg(long)]
    traces: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    include_trivial: bool,
    #[arg(long)]
    dump_f_table: bool,
    #[arg(long)]
    dump_traces: bool,
}

impl NpArgs {
    fn job(&self) -> Result<JobSpec> {
        if let Some(path) = &self.spec {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()));
        }
        let p = self.p.expect("clap enforces p");
        Ok(JobSpec {
            p,
            a: self.a,
            min_poly: self
                .min_poly
                .as_deref()
                .map(|s| job::parse_min_poly(s, p))
                .transpose()?,
            f: job::parse_coeff_list("f", self.f.as_deref().expect("clap enforces f"))?,
            lambda: job::parse_int_list("lambda", &self.lambda)?,
            n: self.prec,
            m: self.traces,
            format: self.format,
            flags: Flags {
                include_trivial: self.include_trivial,
                dump_f_table: self.dump_f_table,
                dump_traces: self.dump_traces,
            },
        })
    }
}

#[derive(Args)]
struct TracesArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    lambda: String,
    #[arg(long, default_value_t = 3)]
    prec: u32,
    /// Number of traces.
    #[arg(long, default_value_t = 3)]
    count: usize,
    /// Matrix dimension; defaults to d·N.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Fixed precision instead of the escalation ladder.
    #[arg(long)]
    prec: Option<u32>,
    #[arg(long)]
    traces: Option<usize>,
    /// Re-run a second λ in one class and compare valuation vectors.
    #[arg(long)]
    cross_check: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Degrees, e.g. "2,3,4" or "1-8".
    #[arg(long)]
    degrees: String,
    /// Allowed coefficient values in F_p.
    #[arg(long, default_value = "0,1")]
    coeffs: String,
    /// Also try non-monic leading coefficients.
    #[arg(long)]
    all_leading: bool,
    #[arg(long)]
    prec: Option<u32>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    /// Largest extension field enumerated.
    #[arg(long, default_value_t = ORACLE_MAX_ELEMENTS)]
    limit: u64,
}

#[derive(Args)]
struct PlotArgs {
    /// JSON report written by `np`.
    #[arg(long)]
    input: PathBuf,
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(value)? + "\n")
}

fn cmd_np(cli: &Cli, args: &NpArgs) -> Result<ExitCode> {
    let job = args.job()?;
    let valid = job.validate()?;
    let report = report::np_report(&job, &valid)?;
    let text = match job.format {
        Format::Json => json_line(&report)?,
        Format::Tsv => report::tsv(&report),
        Format::Svg => svg::render(&report::plot_data(&report)),
    };
    emit(cli.output.as_ref(), &text)?;
    if report.status == "certified" {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "polygon not certified at N = {}: hull vertices {:?} rest on bounds; raise --prec (at most {}) or --traces",
            report.precision,
            report.blocking,
            asnp_core::dwork::max_precision(job.p)
        );
        Ok(ExitCode::from(EXIT_INSUFFICIENT))
    }
}

fn cmd_traces(cli: &Cli, args: &TracesArgs) -> Result<ExitCode> {
    let field = args.field.field()?;
    let f = job::poly(&field, &job::parse_coeff_list("f", &args.f)?)?.without_constant(&field);
    let lambda = job::lambda(&field, &job::parse_int_list("lambda", &args.lambda)?)?;
    let ring = PiRing::quotient(PadicCtx::new(field.clone(), args.prec)?);
    let dim = args
        .dim
        .unwrap_or_else(|| truncation_dim(field.p(), field.degree(), f.degree(), args.prec));
    let traces = traces_for(&field, &f, &lambda, &ring, dim, args.count)?;
    let out = report::TracesReport {
        p: field.p(),
        a: field.degree(),
        min_poly: field.min_poly().to_vec(),
        f: f.display(&field),
        lambda: lambda.coords().to_vec(),
        precision: args.prec,
        dim,
        traces: traces
            .iter()
            .enumerate()
            .map(|(k, t)| report::trace_entry(&ring, k + 1, t))
            .collect(),
    };
    emit(cli.output.as_ref(), &json_line(&out)?)?;
    Ok(ExitCode::SUCCESS)
}

fn scan_options(prec: Option<u32>, traces: Option<usize>, cross_check: bool) -> ScanOptions {
    ScanOptions {
        precision: prec,
        num_traces: traces,
        cross_check,
    }
}

fn cmd_scan(cli: &Cli, args: &ScanArgs) -> Result<ExitCode> {
    let field = args.field.field()?;
    let f = job::poly(&field, &job::parse_coeff_list("f", &args.f)?)?;
    let report = scan_lambda(
        &field,
        &f,
        &scan_options(args.prec, args.traces, args.cross_check),
    )?;
    emit(cli.output.as_ref(), &json_line(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

/// "1-8" or "2,3,7".
fn parse_degrees(s: &str) -> Result<Vec<usize>, job::SpecError> {
    let err = |m: String| job::SpecError {
        field: "degrees",
        message: m,
    };
    if let Some((lo, hi)) = s.split_once('-') {
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|_| err(format!("bad range start {lo:?}")))?;
        let hi: usize = hi
            .trim()
            .parse()
            .map_err(|_| err(format!("bad range end {hi:?}")))?;
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|d| {
            d.trim()
                .parse()
                .map_err(|_| err(format!("cannot parse {d:?}")))
        })
        .collect()
}

fn cmd_search(cli: &Cli, args: &SearchArgs) -> Result<ExitCode> {
    let field = args.field.field()?;
    let degrees = parse_degrees(&args.degrees)?;
    let coeffs: Vec<u64> = job::parse_int_list("coeffs", &args.coeffs)?
        .into_iter()
        .map(|c| c.rem_euclid(field.p() as i64) as u64)
        .collect();
    let report = search_family(
        &field,
        &degrees,
        &coeffs,
        !args.all_leading,
        &scan_options(args.prec, None, false),
    );
    let mut text = String::new();
    for w in &report.witnesses {
        text.push_str(&serde_json::to_string(w)?);
        text.push('\n');
    }
    text.push_str(&serde_json::to_string(&report::search_summary(&report))?);
    text.push('\n');
    emit(cli.output.as_ref(), &text)?;
    if report.witnesses.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_WITNESSES))
    }
}

fn cmd_oracle(cli: &Cli, args: &OracleArgs) -> Result<ExitCode> {
    let field = args.field.field()?;
    let f = job::poly(&field, &job::parse_coeff_list("f", &args.f)?)?;
    let oracle = oracle_np(&field, &f, args.limit)?;
    let out = report::oracle_report(&field, &f, &oracle);
    emit(cli.output.as_ref(), &json_line(&out)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(cli: &Cli, args: &PlotArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let data = report::plot_data_from_json(&text)?;
    emit(cli.output.as_ref(), &svg::render(&data))?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Np(a) => cmd_np(cli, a),
        Command::Traces(a) => cmd_traces(cli, a),
        Command::Scan(a) => cmd_scan(cli, a),
        Command::Search(a) => cmd_search(cli, a),
        Command::Oracle(a) => cmd_oracle(cli, a),
        Command::Plot(a) => cmd_plot(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
