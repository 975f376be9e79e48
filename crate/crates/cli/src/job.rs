//! Validated description of one `np` run.

use asnp_core::finite_field::conway_polynomial;
use asnp_core::{FieldCtx, FqElem, PolyFq};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Tsv,
    Svg,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Report the polygon of L*, with the slope-0 segment of the trivial factor.
    #[serde(default)]
    pub include_trivial: bool,
    #[serde(default)]
    pub dump_f_table: bool,
    #[serde(default)]
    pub dump_traces: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub p: u64,
    pub a: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_poly: Option<Vec<u64>>,
    /// Coefficients of f, low to high; each is a coordinate vector in F_q.
    pub f: Vec<Vec<i64>>,
    /// Coordinates of λ.
    pub lambda: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub flags: Flags,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid {field}: {message}")]
pub struct SpecError {
    pub field: &'static str,
    pub message: String,
}

fn bad(field: &'static str, message: impl Into<String>) -> SpecError {
    SpecError {
        field,
        message: message.into(),
    }
}

/// Parses "c0,c1,..." where each entry is an integer or "k0;k1;..." coordinates.
pub fn parse_coeff_list(field: &'static str, s: &str) -> Result<Vec<Vec<i64>>, SpecError> {
    s.split(',')
        .map(|entry| {
            entry
                .split(';')
                .map(|c| {
                    c.trim()
                        .parse::<i64>()
                        .map_err(|_| bad(field, format!("cannot parse {c:?} as an integer")))
                })
                .collect()
        })
        .collect()
}

pub fn parse_int_list(field: &'static str, s: &str) -> Result<Vec<i64>, SpecError> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| bad(field, format!("cannot parse {c:?} as an integer")))
        })
        .collect()
}

/// Minimal polynomial coefficients low to high, reduced into [0, p).
pub fn parse_min_poly(s: &str, p: u64) -> Result<Vec<u64>, SpecError> {
    Ok(parse_int_list("min_poly", s)?
        .into_iter()
        .map(|c| c.rem_euclid(p as i64) as u64)
        .collect())
}

pub fn field_ctx(p: u64, a: usize, min_poly: Option<&Vec<u64>>) -> Result<FieldCtx, SpecError> {
    if !asnp_core::arith::is_prime(p) || p == 2 {
        return Err(bad("p", format!("{p} is not an odd prime")));
    }
    if a == 0 {
        return Err(bad("a", "extension degree must be at least 1"));
    }
    let poly = match min_poly {
        Some(poly) => poly.clone(),
        None => conway_polynomial(p, a).ok_or_else(|| {
            bad(
                "min_poly",
                format!("no built-in entry for p = {p}, a = {a}"),
            )
        })?,
    };
    FieldCtx::new(p, a, poly).map_err(|e| match e {
        asnp_core::Error::FieldTooLarge { .. } => bad("a", e.to_string()),
        _ => bad("min_poly", e.to_string()),
    })
}

fn element(field: &FieldCtx, name: &'static str, coords: &[i64]) -> Result<FqElem, SpecError> {
    if coords.is_empty() || coords.len() > field.degree() {
        return Err(bad(
            name,
            format!(
                "expected 1 to {} coordinates, got {}",
                field.degree(),
                coords.len()
            ),
        ));
    }
    let p = field.p() as i64;
    let reduced: Vec<u64> = coords.iter().map(|c| c.rem_euclid(p) as u64).collect();
    field.elem(&reduced).map_err(|e| bad(name, e.to_string()))
}

pub fn poly(field: &FieldCtx, coeffs: &[Vec<i64>]) -> Result<PolyFq, SpecError> {
    let elems = coeffs
        .iter()
        .map(|c| element(field, "f", c))
        .collect::<Result<Vec<_>, _>>()?;
    PolyFq::new(field, elems).map_err(|e| bad("f", e.to_string()))
}

pub fn lambda(field: &FieldCtx, coords: &[i64]) -> Result<FqElem, SpecError> {
    let l = element(field, "lambda", coords)?;
    if field.is_zero(&l) {
        return Err(bad("lambda", "must be nonzero"));
    }
    Ok(l)
}

pub struct Validated {
    pub field: FieldCtx,
    pub f: PolyFq,
    pub lambda: FqElem,
}

impl JobSpec {
    pub fn validate(&self) -> Result<Validated, SpecError> {
        let field = field_ctx(self.p, self.a, self.min_poly.as_ref())?;
        let f = poly(&field, &self.f)?;
        let degree = f.without_constant(&field).degree();
        if f.without_constant(&field).is_zero() {
            return Err(bad("f", "f must have a nonconstant term"));
        }
        if (degree as u64).is_multiple_of(self.p) {
            return Err(bad(
                "f",
                format!("degree {degree} is divisible by p = {}", self.p),
            ));
        }
        let lambda = lambda(&field, &self.lambda)?;
        if let Some(n) = self.n {
            let top = asnp_core::dwork::max_precision(self.p);
            if n == 0 || n > top {
                return Err(bad(
                    "n",
                    format!("precision must lie in 1..={top} for p = {}", self.p),
                ));
            }
        }
        if self.m == Some(0) {
            return Err(bad("m", "at least one trace is required"));
        }
        Ok(Validated { field, f, lambda })
    }
}
