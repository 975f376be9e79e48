//! Truncated Dwork–Frobenius matrix, power traces in T, and the
//! characteristic-series coefficients C_i of det(1 - φ s) on B₀.
//!
//! The operator acts on the span of x^1, x^2, ...; the constant row and column
//! of the full matrix are (1, 0, 0, ...) and split off the (1 - s) factor.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FqElem, PolyFq};
use crate::padic::pi::Accumulator;
use crate::padic::{Approx, PadicCtx, PiElement, PiRing};
use crate::polygon::{certify, hodge_polygon, symmetry_bounds, NewtonPolygon, ValuationPoint};
use crate::splitting::{artin_hasse, splitting_coeffs, SplittingCoefficients};
use crate::valuation::Valuation;

/// Dimension n = d·N.
///
/// A closed path through indices w_0 → ... → w_0 in Tr(M^k) picks up
/// Π F_{p·w_{l-1} - w_l}, whose π-adic order is at least (p-1)·Σw/d. A path
/// that visits an index above d·N therefore has ord_p > N and vanishes.
pub fn truncation_dim(_p: u64, _a: usize, d: usize, precision: u32) -> usize {
    d * precision as usize
}

/// Square matrix of T-elements, row-major, indices 1..=n stored from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DworkMatrix {
    pub n: usize,
    pub entries: Vec<PiElement>,
}

impl DworkMatrix {
    /// Entry (i, j), 1-based.
    pub fn get(&self, i: usize, j: usize) -> &PiElement {
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    fn at(&self, i: usize, j: usize) -> &PiElement {
        &self.entries[i * self.n + j]
    }

    pub fn map(&self, f: impl Fn(&PiElement) -> PiElement) -> DworkMatrix {
        DworkMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> PiElement) -> DworkMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                entries.push(f(i, j));
            }
        }
        DworkMatrix { n, entries }
    }
}

/// A = [F_{p·i - j}]_{1 <= i, j <= n}, zero where p·i - j < 0.
pub fn build_matrix(table: &SplittingCoefficients, ring: &PiRing, n: usize) -> Result<DworkMatrix> {
    let p = ring.padic().p() as usize;
    let need = p * n - 1;
    if table.truncation < need {
        return Err(Error::TruncationTooShort {
            have: table.truncation,
            need,
        });
    }
    Ok(DworkMatrix::from_fn(n, |i, j| {
        if p * i >= j {
            table.coeffs[p * i - j].clone()
        } else {
            ring.zero()
        }
    }))
}

pub fn mat_mul(ring: &PiRing, x: &DworkMatrix, y: &DworkMatrix) -> DworkMatrix {
    let n = x.n;
    let x_nz: Vec<bool> = x.entries.iter().map(|e| !ring.is_zero(e)).collect();
    let y_nz: Vec<bool> = y.entries.iter().map(|e| !ring.is_zero(e)).collect();
    let mut acc = Accumulator::new(ring);
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if x_nz[i * n + k] && y_nz[k * n + j] {
                    acc.add_product(x.at(i, k), y.at(k, j));
                }
            }
            entries.push(acc.finish());
        }
    }
    DworkMatrix { n, entries }
}

/// M = A · τ^{-1}(A) ⋯ τ^{-(a-1)}(A), with τ applied entry-wise.
pub fn frobenius_power_matrix(ring: &PiRing, a_mat: &DworkMatrix) -> DworkMatrix {
    let a = ring.padic().degree() as i64;
    let mut m = a_mat.clone();
    for i in 1..a {
        let twisted = a_mat.map(|e| ring.frobenius_pow(e, -i));
        m = mat_mul(ring, &m, &twisted);
    }
    m
}

pub fn trace(ring: &PiRing, m: &DworkMatrix) -> PiElement {
    (0..m.n).fold(ring.zero(), |acc, i| ring.add(&acc, m.at(i, i)))
}

/// Tr(M^k) for k = 1..=count.
pub fn power_traces(ring: &PiRing, m: &DworkMatrix, count: usize) -> Vec<PiElement> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(trace(ring, m));
    let n = m.n;
    let mut power = m.clone();
    let mut acc = Accumulator::new(ring);
    for k in 2..=count {
        // Tr(P·M) = Σ_{i,j} P_ij M_ji, without forming the last product
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (power.at(i, j), m.at(j, i));
                if !ring.is_zero(x) && !ring.is_zero(y) {
                    acc.add_product(x, y);
                }
            }
        }
        out.push(acc.finish());
        if k < count {
            power = mat_mul(ring, &power, m);
        }
    }
    out
}

/// C_1..C_m with their valuations.
#[derive(Clone, Debug)]
pub struct CharCoeffs {
    pub coeffs: Vec<Approx>,
    pub valuations: Vec<Valuation>,
}

impl CharCoeffs {
    /// C_i for 1 <= i <= m.
    pub fn get(&self, i: usize) -> &Approx {
        &self.coeffs[i - 1]
    }

    pub fn valuation(&self, i: usize) -> Valuation {
        self.valuations[i - 1]
    }
}

/// Newton's identities i·C_i = -Σ_{k=1..i} t_k·C_{i-k}, C_0 = 1.
///
/// The unit part of i is inverted mod p^N; each factor of p is divided out
/// exactly and costs one digit of precision on that coefficient. A
/// coefficient whose precision reaches zero is reported as bound-only.
pub fn char_coeffs_from_traces(ring: &PiRing, traces: &[PiElement]) -> Result<CharCoeffs> {
    let padic = ring.padic();
    let p = padic.p();
    let full = padic.precision();
    let mut coeffs: Vec<Approx> = vec![Approx {
        value: ring.one(),
        precision: full,
    }];
    for i in 1..=traces.len() {
        let mut sum = ring.zero();
        let mut prec = full;
        for k in 1..=i {
            let prev = &coeffs[i - k];
            prec = prec.min(prev.precision);
            sum = ring.add(&sum, &ring.mul(&traces[k - 1], &prev.value));
        }
        let mut value = ring.neg(&sum);
        let (mut unit, mut e) = (i as u64, 0u32);
        while unit % p == 0 {
            unit /= p;
            e += 1;
        }
        let inv = padic
            .inv_int(unit % padic.modulus())
            .expect("unit part is prime to p");
        value = ring.scale_int(&value, inv as i64);
        for _ in 0..e {
            if prec == 0 {
                break;
            }
            value = ring.truncate(&value, prec);
            value = ring.div_p(&value).ok_or(Error::InexactDivision(p))?;
            prec -= 1;
        }
        let value = ring.truncate(&value, prec);
        coeffs.push(Approx {
            value,
            precision: prec,
        });
    }
    coeffs.remove(0);
    let valuations = coeffs
        .iter()
        .map(|c| ring.ord_with_precision(&c.value, c.precision))
        .collect();
    Ok(CharCoeffs { coeffs, valuations })
}

/// Tr(M^k), k = 1..=count, for λf in the given ring (either model).
pub fn traces_for(
    field: &FieldCtx,
    f: &PolyFq,
    lambda: &FqElem,
    ring: &PiRing,
    n: usize,
    count: usize,
) -> Result<Vec<PiElement>> {
    let p = field.p() as usize;
    let truncation = p * n - 1;
    let ah = artin_hasse(field.p(), ring.padic().precision(), truncation)?;
    let table = splitting_coeffs(field, f, lambda, ring, &ah, truncation)?;
    let a_mat = build_matrix(&table, ring, n)?;
    let m = frobenius_power_matrix(ring, &a_mat);
    Ok(power_traces(ring, &m, count))
}

#[derive(Clone, Debug, Default)]
pub struct PipelineOptions {
    /// Working precision N; `None` escalates from 2 up to p.
    pub precision: Option<u32>,
    /// Number of traces m; defaults to ⌈(d-1)/2⌉.
    pub num_traces: Option<usize>,
    /// Matrix dimension; defaults to [`truncation_dim`].
    pub dim: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub f: PolyFq,
    pub lambda: FqElem,
    pub degree: usize,
    /// Target precision N.
    pub precision: u32,
    /// N plus the division buffer; traces are computed modulo p^working.
    pub working_precision: u32,
    pub dim: usize,
    pub traces: Vec<PiElement>,
    pub coeffs: CharCoeffs,
    /// Measured coefficient points, then their reflections.
    pub points: Vec<ValuationPoint>,
    pub polygon: NewtonPolygon,
    pub hodge: NewtonPolygon,
    /// Precisions tried, in order.
    pub attempts: Vec<u32>,
}

impl PipelineReport {
    pub fn valuations(&self) -> &[Valuation] {
        &self.coeffs.valuations
    }

    pub fn status(&self) -> PipelineStatus {
        if self.polygon.certified {
            PipelineStatus::Certified
        } else {
            PipelineStatus::InsufficientPrecision {
                blocking: self.polygon.blocking.clone(),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PipelineStatus {
    Certified,
    /// Hull vertices rest on bound-only points; increase N or m.
    InsufficientPrecision {
        blocking: Vec<usize>,
    },
}

/// Largest precision whose modulus p^N fits the residue bound.
pub fn max_precision(p: u64) -> u32 {
    (1..)
        .take_while(|&n| {
            crate::arith::checked_pow(p, n)
                .is_some_and(|m| m < (1u64 << crate::padic::MODULUS_BITS))
        })
        .last()
        .unwrap_or(1)
}

/// Extra digits carried while dividing by multiples of p in the Newton
/// identities: ⌊log_p m⌋ + 1 once m >= p, none before.
pub fn precision_buffer(p: u64, m: usize) -> u32 {
    let mut b = 0;
    let mut pk = p as usize;
    while pk <= m {
        b += 1;
        pk = pk.saturating_mul(p as usize);
    }
    if b == 0 {
        0
    } else {
        b + 1
    }
}

/// End-to-end: normalize f, compute traces and C_i, certify NP(L_{λf}).
///
/// Without an explicit precision, N runs from 2 up to p until the polygon
/// is certified.
pub fn run_pipeline(
    field: &FieldCtx,
    f: &PolyFq,
    lambda: &FqElem,
    opts: &PipelineOptions,
) -> Result<PipelineReport> {
    if field.is_zero(lambda) {
        return Err(Error::ZeroLambda);
    }
    let g = f.without_constant(field);
    let d = g.degree();
    if g.is_zero() || (d as u64).is_multiple_of(field.p()) {
        return Err(Error::DegreeNotCoprime { d, p: field.p() });
    }
    let top = (field.p() as u32).min(max_precision(field.p()));
    let ladder: Vec<u32> = match opts.precision {
        Some(n) => vec![n],
        None => (2.min(top)..=top).collect(),
    };
    let mut attempts = Vec::new();
    let mut last = None;
    for n in ladder {
        attempts.push(n);
        let mut report = run_once(field, &g, lambda, n, opts)?;
        let done = report.polygon.certified;
        report.attempts = attempts.clone();
        last = Some(report);
        if done {
            break;
        }
    }
    Ok(last.expect("at least one precision tried"))
}

fn run_once(
    field: &FieldCtx,
    g: &PolyFq,
    lambda: &FqElem,
    precision: u32,
    opts: &PipelineOptions,
) -> Result<PipelineReport> {
    let d = g.degree();
    let a = field.degree();
    let top = d - 1;
    let count = opts.num_traces.unwrap_or(top.div_ceil(2).max(1)).min(top);
    let working = precision + precision_buffer(field.p(), count);
    let n = opts
        .dim
        .unwrap_or_else(|| truncation_dim(field.p(), a, d, working));
    let ring = PiRing::quotient(PadicCtx::new(field.clone(), working)?);
    let traces = if count > 0 {
        traces_for(field, g, lambda, &ring, n, count)?
    } else {
        Vec::new()
    };
    let mut coeffs = char_coeffs_from_traces(&ring, &traces)?;
    // report N digits at most
    for (c, v) in coeffs.coeffs.iter_mut().zip(coeffs.valuations.iter_mut()) {
        c.precision = c.precision.min(precision);
        c.value = ring.truncate(&c.value, c.precision);
        *v = ring.ord_with_precision(&c.value, c.precision);
    }
    let measured: Vec<ValuationPoint> = coeffs
        .valuations
        .iter()
        .enumerate()
        .map(|(k, v)| ValuationPoint {
            index: k + 1,
            val: *v,
            origin: crate::polygon::Origin::Coefficient,
        })
        .collect();
    let reflected = symmetry_bounds(&measured, d, a);
    let polygon = certify(&measured, &reflected, d, a);
    let mut points = measured;
    points.extend(reflected);
    Ok(PipelineReport {
        f: g.clone(),
        lambda: lambda.clone(),
        degree: d,
        precision,
        working_precision: working,
        dim: n,
        traces,
        coeffs,
        points,
        polygon,
        hodge: hodge_polygon(d, a),
        attempts: vec![precision],
    })
}

/// Pipeline from raw parameters: F_p integer coefficients for f (low-to-high)
/// and λ as coordinates.
pub fn np_pipeline(
    p: u64,
    a: usize,
    min_poly: Option<Vec<u64>>,
    f: &[i64],
    lambda: &[u64],
    precision: Option<u32>,
    num_traces: Option<usize>,
) -> Result<(CharCoeffs, NewtonPolygon)> {
    let field = match min_poly {
        Some(poly) => FieldCtx::new(p, a, poly)?,
        None => FieldCtx::with_default(p, a)?,
    };
    let f = PolyFq::from_ints(&field, f);
    let lambda = field.elem(lambda)?;
    let report = run_pipeline(
        &field,
        &f,
        &lambda,
        &PipelineOptions {
            precision,
            num_traces,
            dim: None,
        },
    )?;
    Ok((report.coeffs, report.polygon))
}

/// π-adic order of a T-element as a rational multiple of 1/(p-1) scaled to π units.
pub fn ord_pi(ring: &PiRing, x: &PiElement) -> Valuation {
    let p1 = Rational64::from_integer(ring.padic().p() as i64 - 1);
    match ring.ord(x) {
        Valuation::Exact(v) => Valuation::Exact(v * p1),
        Valuation::AtLeast(v) => Valuation::AtLeast(v * p1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_rule() {
        assert_eq!(truncation_dim(5, 2, 8, 3), 24);
        assert_eq!(truncation_dim(3, 1, 2, 1), 2);
        // f-specific diagonal bound at i = 21, k = 1: ⌈104/8⌉ + 1 = 14 > 3·(p-1)
        assert_eq!((5 * 21 - 1usize).div_ceil(8) + 1, 14);
    }

    #[test]
    fn zero_matrix_has_zero_traces() {
        let field = FieldCtx::with_default(5, 2).unwrap();
        let ring = PiRing::quotient(PadicCtx::new(field, 3).unwrap());
        let z = DworkMatrix::from_fn(4, |_, _| ring.zero());
        for t in power_traces(&ring, &z, 3) {
            assert!(ring.is_zero(&t));
        }
        let c = char_coeffs_from_traces(&ring, &power_traces(&ring, &z, 3)).unwrap();
        assert!(c.valuations.iter().all(|v| !v.is_exact()));
    }

    #[test]
    fn constant_matrices_square_under_frobenius() {
        let field = FieldCtx::with_default(5, 2).unwrap();
        let ring = PiRing::quotient(PadicCtx::new(field, 3).unwrap());
        let a = DworkMatrix::from_fn(3, |i, j| ring.from_ints(&[(i * 7 + j) as i64, 1]));
        assert_eq!(frobenius_power_matrix(&ring, &a), mat_mul(&ring, &a, &a));
        let f5 = FieldCtx::with_default(5, 1).unwrap();
        let r1 = PiRing::quotient(PadicCtx::new(f5, 3).unwrap());
        let b = DworkMatrix::from_fn(3, |i, j| r1.from_ints(&[(i + j) as i64]));
        assert_eq!(frobenius_power_matrix(&r1, &b), b);
    }

    #[test]
    fn newton_identities_match_closed_forms() {
        let field = FieldCtx::with_default(7, 1).unwrap();
        let ring = PiRing::quotient(PadicCtx::new(field, 3).unwrap());
        let t: Vec<PiElement> = vec![
            ring.from_ints(&[3, 1]),
            ring.from_ints(&[5, 0, 2]),
            ring.from_ints(&[1, 4]),
        ];
        let c = char_coeffs_from_traces(&ring, &t).unwrap();
        let inv = |k: u64| ring.padic().inv_int(k).unwrap() as i64;
        let c1 = ring.neg(&t[0]);
        let t1sq = ring.mul(&t[0], &t[0]);
        let c2 = ring.scale_int(&ring.sub(&t1sq, &t[1]), inv(2));
        let t1cube = ring.mul(&t1sq, &t[0]);
        let c3 = ring.sub(
            &ring.add(
                &ring.neg(&ring.scale_int(&t1cube, inv(6))),
                &ring.scale_int(&ring.mul(&t[0], &t[1]), inv(2)),
            ),
            &ring.scale_int(&t[2], inv(3)),
        );
        assert_eq!(c.get(1).value, c1);
        assert_eq!(c.get(2).value, c2);
        assert_eq!(c.get(3).value, c3);
    }

    #[test]
    fn division_by_p_costs_a_digit() {
        // traces of diag(1, 1, 1) over p = 3: det(1 - s)^3 = 1 - 3s + 3s^2 - s^3
        let field = FieldCtx::with_default(3, 1).unwrap();
        let ring = PiRing::quotient(PadicCtx::new(field, 3).unwrap());
        let t = vec![ring.from_int(3); 3];
        let c = char_coeffs_from_traces(&ring, &t).unwrap();
        assert_eq!(c.get(3).precision, 2);
        assert_eq!(c.get(3).value, ring.truncate(&ring.from_int(-1), 2));
        assert_eq!(c.valuation(3), Valuation::exact(0, 1));
        assert_eq!(c.valuation(2), Valuation::exact(1, 1));
    }
}
