//! Serializable reports. Every valuation is an exact "n/d" string.

use anyhow::{Context, Result};
use asnp_core::dwork::{run_pipeline, PipelineOptions, PipelineReport};
use asnp_core::oracle::OracleReport;
use asnp_core::padic::{PadicCtx, PiElement, PiRing};
use asnp_core::polygon::NewtonPolygon;
use asnp_core::scan::{SearchFailure, SearchRegion, SearchReport};
use asnp_core::splitting::{artin_hasse, splitting_coeffs};
use asnp_core::valuation::{fmt_rational, parse_rational};
use asnp_core::{FieldCtx, PolyFq, Valuation};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::job::{JobSpec, Validated};
use crate::svg::PlotData;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffRow {
    pub index: usize,
    pub ord: String,
    /// "exact" or "lower_bound".
    pub exactness: String,
}

impl CoeffRow {
    fn new(index: usize, v: &Valuation) -> Self {
        let exactness = if v.is_exact() { "exact" } else { "lower_bound" };
        CoeffRow {
            index,
            ord: fmt_rational(v.value()),
            exactness: exactness.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceEntry {
    pub k: usize,
    /// Z_q coordinates of each π^i component, i = 0..p-2.
    pub components: Vec<Vec<u64>>,
    /// The same components as integers when all of them lie in Z_p.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ints: Option<Vec<u64>>,
}

pub fn trace_entry(ring: &PiRing, k: usize, t: &PiElement) -> TraceEntry {
    let p = ring.padic().p() as usize;
    TraceEntry {
        k,
        components: (0..p - 1)
            .map(|i| ring.component(t, i).coords().to_vec())
            .collect(),
        ints: ring.int_components(t),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TracesReport {
    pub p: u64,
    pub a: usize,
    pub min_poly: Vec<u64>,
    pub f: String,
    pub lambda: Vec<u64>,
    pub precision: u32,
    pub dim: usize,
    pub traces: Vec<TraceEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NpReport {
    pub job: JobSpec,
    pub min_poly: Vec<u64>,
    pub f: String,
    pub lambda: Vec<u64>,
    pub degree: usize,
    pub precision: u32,
    pub working_precision: u32,
    pub dim: usize,
    pub attempts: Vec<u32>,
    /// "certified" or "insufficient_precision".
    pub status: String,
    pub blocking: Vec<usize>,
    pub valuations: Vec<CoeffRow>,
    /// Polygon of L_{λf}, or of L* with the trivial slope-0 factor when requested.
    pub polygon: NewtonPolygon,
    pub hodge: NewtonPolygon,
    pub points: Vec<asnp_core::polygon::ValuationPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<Vec<TraceEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_table: Option<Vec<Vec<Vec<u64>>>>,
}

fn f_table(field: &FieldCtx, r: &PipelineReport) -> Result<Vec<Vec<Vec<u64>>>> {
    let ring = PiRing::quotient(PadicCtx::new(field.clone(), r.working_precision)?);
    let truncation = field.p() as usize * r.dim - 1;
    let ah = artin_hasse(field.p(), r.working_precision, truncation)?;
    let table = splitting_coeffs(field, &r.f, &r.lambda, &ring, &ah, truncation)?;
    Ok(table
        .coeffs
        .iter()
        .map(|c| trace_entry(&ring, 0, c).components)
        .collect())
}

pub fn np_report(job: &JobSpec, v: &Validated) -> Result<NpReport> {
    let opts = PipelineOptions {
        precision: job.n,
        num_traces: job.m,
        dim: None,
    };
    let r = run_pipeline(&v.field, &v.f, &v.lambda, &opts)?;
    let traces = if job.flags.dump_traces {
        let ring = PiRing::quotient(PadicCtx::new(v.field.clone(), r.working_precision)?);
        Some(
            r.traces
                .iter()
                .enumerate()
                .map(|(k, t)| trace_entry(&ring, k + 1, t))
                .collect(),
        )
    } else {
        None
    };
    let f_table = if job.flags.dump_f_table {
        Some(f_table(&v.field, &r)?)
    } else {
        None
    };
    let (polygon, hodge) = if job.flags.include_trivial {
        (r.polygon.with_trivial_slope(), r.hodge.with_trivial_slope())
    } else {
        (r.polygon.clone(), r.hodge.clone())
    };
    Ok(NpReport {
        job: job.clone(),
        min_poly: v.field.min_poly().to_vec(),
        f: r.f.display(&v.field),
        lambda: v.lambda.coords().to_vec(),
        degree: r.degree,
        precision: r.precision,
        working_precision: r.working_precision,
        dim: r.dim,
        attempts: r.attempts.clone(),
        status: if r.polygon.certified {
            "certified"
        } else {
            "insufficient_precision"
        }
        .into(),
        blocking: r.polygon.blocking.clone(),
        valuations: r
            .valuations()
            .iter()
            .enumerate()
            .map(|(i, v)| CoeffRow::new(i + 1, v))
            .collect(),
        polygon,
        hodge,
        points: if job.flags.include_trivial {
            Vec::new()
        } else {
            r.points.clone()
        },
        traces,
        f_table,
    })
}

/// Columns: index, ord_num, ord_den, exactness.
pub fn tsv(r: &NpReport) -> String {
    let mut out = String::from("index\tord_num\tord_den\texactness\n");
    for row in &r.valuations {
        let q = parse_rational(&row.ord).expect("ord strings are n/d");
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            row.index,
            q.numer(),
            q.denom(),
            row.exactness
        ));
    }
    out
}

pub fn plot_data(r: &NpReport) -> PlotData {
    PlotData {
        polygon: r.polygon.vertices.clone(),
        hodge: r.hodge.vertices.clone(),
        points: r
            .points
            .iter()
            .map(|p| (p.index as i64, p.val.value(), p.val.is_exact()))
            .collect(),
    }
}

#[derive(Deserialize)]
struct PolygonIn {
    vertices: Vec<(i64, String)>,
}

#[derive(Deserialize)]
struct PointIn {
    index: i64,
    ord: String,
    exact: bool,
}

#[derive(Deserialize)]
struct PlotIn {
    polygon: PolygonIn,
    hodge: PolygonIn,
    #[serde(default)]
    points: Vec<PointIn>,
}

fn rational(s: &str) -> Result<Rational64> {
    parse_rational(s).with_context(|| format!("{s:?} is not a rational n/d"))
}

fn vertices(p: &PolygonIn) -> Result<Vec<(i64, Rational64)>> {
    p.vertices
        .iter()
        .map(|(x, y)| Ok((*x, rational(y)?)))
        .collect()
}

pub fn plot_data_from_json(text: &str) -> Result<PlotData> {
    let input: PlotIn = serde_json::from_str(text).context("expected an np JSON report")?;
    Ok(PlotData {
        polygon: vertices(&input.polygon)?,
        hodge: vertices(&input.hodge)?,
        points: input
            .points
            .iter()
            .map(|p| Ok((p.index, rational(&p.ord)?, p.exact)))
            .collect::<Result<_>>()?,
    })
}

#[derive(Serialize)]
pub struct SearchSummary<'a> {
    pub region: &'a SearchRegion,
    pub scanned: usize,
    pub inconclusive: usize,
    pub witnesses: Vec<&'a str>,
    pub failures: &'a [SearchFailure],
}

pub fn search_summary(r: &SearchReport) -> SearchSummary<'_> {
    SearchSummary {
        region: &r.region,
        scanned: r.scanned,
        inconclusive: r.inconclusive,
        witnesses: r.witnesses.iter().map(|w| w.f.as_str()).collect(),
        failures: &r.failures,
    }
}

#[derive(Serialize)]
pub struct OracleOut<'a> {
    pub p: u64,
    pub a: usize,
    pub min_poly: Vec<u64>,
    pub f: String,
    pub sums: &'a [asnp_core::oracle::CyclotomicInt],
    pub coeffs: &'a [asnp_core::oracle::CyclotomicInt],
    pub degree_checked: bool,
    /// ord_p of each L* coefficient; null where it vanishes.
    pub valuations: Vec<Option<String>>,
    pub polygon: &'a NewtonPolygon,
    pub full: &'a NewtonPolygon,
}

pub fn oracle_report<'a>(field: &FieldCtx, f: &PolyFq, o: &'a OracleReport) -> OracleOut<'a> {
    OracleOut {
        p: field.p(),
        a: field.degree(),
        min_poly: field.min_poly().to_vec(),
        f: f.display(field),
        sums: &o.l.sums,
        coeffs: &o.l.coeffs,
        degree_checked: o.l.degree_checked,
        valuations: o.valuations.iter().map(|v| v.map(fmt_rational)).collect(),
        polygon: &o.polygon,
        full: &o.full,
    }
}
