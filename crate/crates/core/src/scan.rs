//! λ-sweeps over F_q^× and family searches for polynomials whose Newton
//! polygon depends on λ.

use rayon::prelude::*;
use serde::Serialize;

use crate::dwork::{max_precision, run_pipeline, PipelineOptions, PipelineReport};
use crate::error::Result;
use crate::finite_field::{lambda_classes, solve_lambda_power, FieldCtx, FqElem, PolyFq};
use crate::polygon::{polygon_eq, NewtonPolygon, PolygonDiff};
use crate::valuation::Valuation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Constant,
    Varies,
    Inconclusive,
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    /// Fixed (N, m); `None` runs the escalation ladder.
    pub precision: Option<u32>,
    pub num_traces: Option<usize>,
    /// Re-run a second member of one class and compare valuations.
    pub cross_check: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassResult {
    /// λ^{p-1}
    pub class: FqElem,
    pub lambda: FqElem,
    pub polygon: NewtonPolygon,
    #[serde(serialize_with = "ser_vals")]
    pub valuations: Vec<Valuation>,
    pub precision: u32,
    pub num_traces: usize,
}

fn ser_vals<S: serde::Serializer>(v: &[Valuation], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    strs.serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub class: FqElem,
    pub lambda: FqElem,
    pub mu: FqElem,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub p: u64,
    pub a: usize,
    pub min_poly: Vec<u64>,
    pub f: String,
    pub f_coeffs: Vec<FqElem>,
    pub classes: Vec<ClassResult>,
    pub verdict: Verdict,
    /// Two λ with distinct certified polygons, when the verdict is `varies`.
    pub witnesses: Vec<FqElem>,
    pub diff: Option<PolygonDiff>,
    pub cross_check: Option<CrossCheck>,
}

/// (N, m) pairs tried in order: (2, 2), then (min(p, 4), ⌈(d-1)/2⌉), then (p, ⌈(d-1)/2⌉).
pub fn escalation_ladder(p: u64, d: usize) -> Vec<(u32, usize)> {
    let top = max_precision(p).min(p as u32);
    let full = (d.saturating_sub(1)).div_ceil(2).max(1);
    let mut out = vec![
        (2.min(top), 2.min(full)),
        ((p as u32).min(4).min(top), full),
        (top, full),
    ];
    out.dedup();
    out
}

fn run_class(
    field: &FieldCtx,
    f: &PolyFq,
    lambda: &FqElem,
    opts: &ScanOptions,
) -> Result<PipelineReport> {
    let d = f.degree();
    let ladder = match opts.precision {
        Some(n) => vec![(
            n,
            opts.num_traces
                .unwrap_or((d.saturating_sub(1)).div_ceil(2).max(1)),
        )],
        None => escalation_ladder(field.p(), d),
    };
    let mut last = None;
    for (n, m) in ladder {
        let r = run_pipeline(
            field,
            f,
            lambda,
            &PipelineOptions {
                precision: Some(n),
                num_traces: Some(m),
                dim: None,
            },
        )?;
        let done = r.polygon.certified;
        last = Some(r);
        if done {
            break;
        }
    }
    Ok(last.expect("ladder is nonempty"))
}

/// One pipeline run per λ^{p-1}-class.
pub fn scan_lambda(field: &FieldCtx, f: &PolyFq, opts: &ScanOptions) -> Result<ScanReport> {
    let classes = lambda_classes(field);
    let reports: Vec<PipelineReport> = classes
        .par_iter()
        .map(|c| run_class(field, f, &c.representative, opts))
        .collect::<Result<_>>()?;
    let results: Vec<ClassResult> = classes
        .iter()
        .zip(&reports)
        .map(|(c, r)| ClassResult {
            class: c.value.clone(),
            lambda: c.representative.clone(),
            polygon: r.polygon.clone(),
            valuations: r.coeffs.valuations.clone(),
            precision: r.precision,
            num_traces: r.coeffs.valuations.len(),
        })
        .collect();

    let mut verdict = Verdict::Constant;
    let mut witnesses = Vec::new();
    let mut diff = None;
    let certified: Vec<&ClassResult> = results.iter().filter(|c| c.polygon.certified).collect();
    if let Some(first) = certified.first() {
        for other in &certified[1..] {
            let cmp = polygon_eq(&first.polygon, &other.polygon)?;
            if !cmp.equal {
                verdict = Verdict::Varies;
                witnesses = vec![first.lambda.clone(), other.lambda.clone()];
                diff = Some(cmp);
                break;
            }
        }
    }
    if verdict != Verdict::Varies && certified.len() < results.len() {
        verdict = Verdict::Inconclusive;
    }

    let cross_check = if opts.cross_check {
        cross_check_class(field, f, &classes, &results)?
    } else {
        None
    };

    Ok(ScanReport {
        p: field.p(),
        a: field.degree(),
        min_poly: field.min_poly().to_vec(),
        f: f.display(field),
        f_coeffs: f.coeffs().to_vec(),
        classes: results,
        verdict,
        witnesses,
        diff,
        cross_check,
    })
}

fn cross_check_class(
    field: &FieldCtx,
    f: &PolyFq,
    classes: &[crate::finite_field::LambdaClass],
    results: &[ClassResult],
) -> Result<Option<CrossCheck>> {
    for (c, res) in classes.iter().zip(results) {
        let members = solve_lambda_power(field, &c.value);
        if let Some(mu) = members.into_iter().find(|m| *m != c.representative) {
            let fixed = ScanOptions {
                precision: Some(res.precision),
                num_traces: Some(res.num_traces),
                cross_check: false,
            };
            let r = run_class(field, f, &mu, &fixed)?;
            return Ok(Some(CrossCheck {
                class: c.value.clone(),
                lambda: c.representative.clone(),
                mu,
                agree: r.coeffs.valuations == res.valuations,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchRegion {
    pub p: u64,
    pub a: usize,
    pub degrees: Vec<usize>,
    pub coefficients: Vec<u64>,
    pub monic: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchFailure {
    pub f: String,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub region: SearchRegion,
    pub scanned: usize,
    pub inconclusive: usize,
    pub witnesses: Vec<ScanReport>,
    pub failures: Vec<SearchFailure>,
}

/// Candidates in search order: degree ascending, then coefficient vectors
/// (c_d, ..., c_1) lexicographically over `coefficients`. Degrees divisible by
/// p are skipped; constant terms are always zero. With `monic`, c_d = 1: the
/// fiber of c·f over λ ∈ F_q^× is the fiber of f for c ∈ F_p^×.
pub fn candidates(
    field: &FieldCtx,
    degrees: &[usize],
    coefficients: &[u64],
    monic: bool,
) -> Vec<PolyFq> {
    let p = field.p();
    let mut coeffs: Vec<u64> = coefficients.iter().map(|c| c % p).collect();
    coeffs.sort();
    coeffs.dedup();
    let leading: Vec<u64> = if monic {
        vec![1]
    } else {
        coeffs.iter().copied().filter(|&c| c != 0).collect()
    };
    let mut degs: Vec<usize> = degrees
        .iter()
        .copied()
        .filter(|&d| d >= 1 && !(d as u64).is_multiple_of(p))
        .collect();
    degs.sort();
    degs.dedup();
    let mut out = Vec::new();
    for d in degs {
        let lower = d - 1;
        let base = coeffs.len();
        let total = base.checked_pow(lower as u32).unwrap_or(0);
        for &lc in &leading {
            for idx in 0..total {
                // most significant digit is c_{d-1}
                let mut v = vec![0i64; d + 1];
                v[d] = lc as i64;
                let mut t = idx;
                for c in &mut v[1..=lower] {
                    *c = coeffs[t % base] as i64;
                    t /= base;
                }
                out.push(PolyFq::from_ints(field, &v));
            }
        }
    }
    out
}

pub fn search_family(
    field: &FieldCtx,
    degrees: &[usize],
    coefficients: &[u64],
    monic: bool,
    opts: &ScanOptions,
) -> SearchReport {
    let cands = candidates(field, degrees, coefficients, monic);
    let outcomes: Vec<std::result::Result<ScanReport, SearchFailure>> = cands
        .par_iter()
        .map(|f| {
            scan_lambda(field, f, opts).map_err(|e| SearchFailure {
                f: f.display(field),
                error: e.to_string(),
            })
        })
        .collect();
    let mut witnesses = Vec::new();
    let mut failures = Vec::new();
    let mut inconclusive = 0;
    for o in outcomes {
        match o {
            Ok(r) if r.verdict == Verdict::Varies => witnesses.push(r),
            Ok(r) if r.verdict == Verdict::Inconclusive => inconclusive += 1,
            Ok(_) => {}
            Err(e) => failures.push(e),
        }
    }
    let mut degs: Vec<usize> = degrees.to_vec();
    degs.sort();
    degs.dedup();
    SearchReport {
        region: SearchRegion {
            p: field.p(),
            a: field.degree(),
            degrees: degs,
            coefficients: coefficients.to_vec(),
            monic,
        },
        scanned: cands.len(),
        inconclusive,
        witnesses,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_shape() {
        assert_eq!(escalation_ladder(5, 8), vec![(2, 2), (4, 4), (5, 4)]);
        assert_eq!(escalation_ladder(3, 4), vec![(2, 2), (3, 2)]);
        assert_eq!(escalation_ladder(5, 2), vec![(2, 1), (4, 1), (5, 1)]);
    }

    #[test]
    fn candidate_order() {
        let f = FieldCtx::with_default(5, 1).unwrap();
        let c = candidates(&f, &[5, 2, 1], &[0, 1], true);
        let shown: Vec<String> = c.iter().map(|g| g.display(&f)).collect();
        assert_eq!(shown, vec!["x", "x^2", "x^2+x"]);
    }

    #[test]
    fn prime_field_scan_is_constant() {
        let f = FieldCtx::with_default(5, 1).unwrap();
        let g = PolyFq::from_ints(&f, &[0, 1, 0, 2, 1]);
        let r = scan_lambda(&f, &g, &ScanOptions::default()).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.verdict, Verdict::Constant);
    }

    #[test]
    fn gauss_sum_case() {
        let f = FieldCtx::with_default(5, 2).unwrap();
        let g = PolyFq::from_ints(&f, &[0, 0, 1]);
        let r = scan_lambda(
            &f,
            &g,
            &ScanOptions {
                cross_check: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.classes.len(), 6);
        assert_eq!(r.verdict, Verdict::Constant);
        for c in &r.classes {
            assert_eq!(
                c.polygon.slope_list(),
                vec![num_rational::Rational64::from_integer(1)]
            );
        }
        assert!(r.cross_check.unwrap().agree);
    }
}
