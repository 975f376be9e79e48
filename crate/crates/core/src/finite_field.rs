//! Arithmetic in F_p and F_q = F_p(xi).
//!
//! Elements are coordinate vectors in the power basis 1, xi, ..., xi^(a-1),
//! low-to-high. All operations go through a [`FieldCtx`], which is immutable
//! once built and can be shared freely between threads.

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, is_prime};
use crate::error::{Error, Result};

/// Default cap on q for contexts built with [`FieldCtx::new`].
pub const DEFAULT_MAX_ORDER: u64 = 15_625;

/// Conway polynomials, low-to-high including the leading 1.
const CONWAY: &[(u64, &[u64])] = &[
    (3, &[1, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (5, &[3, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 4, 4, 0, 1]),
    (7, &[4, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
    (11, &[9, 1]),
    (11, &[2, 7, 1]),
    (13, &[11, 1]),
    (13, &[2, 12, 1]),
];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FqElem(pub Vec<u64>);

impl FqElem {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    degree: usize,
    min_poly: Vec<u64>,
    order: u64,
    // coordinates of xi^(a+j), j = 0..a-1
    reduce: Vec<Vec<u64>>,
    // Tr_{F_q/F_p}(xi^i)
    basis_traces: Vec<u64>,
}

/// Built-in minimal polynomial for (p, a), if tabulated.
pub fn conway_polynomial(p: u64, a: usize) -> Option<Vec<u64>> {
    CONWAY
        .iter()
        .find(|(q, poly)| *q == p && poly.len() == a + 1)
        .map(|(_, poly)| poly.to_vec())
}

impl FieldCtx {
    /// Field with the built-in minimal polynomial, or the first irreducible
    /// monic polynomial in lexicographic order when none is tabulated.
    pub fn with_default(p: u64, a: usize) -> Result<Self> {
        Self::build(p, a, None, DEFAULT_MAX_ORDER)
    }

    pub fn new(p: u64, a: usize, min_poly: Vec<u64>) -> Result<Self> {
        Self::build(p, a, Some(min_poly), DEFAULT_MAX_ORDER)
    }

    pub fn with_limit(
        p: u64,
        a: usize,
        min_poly: Option<Vec<u64>>,
        max_order: u64,
    ) -> Result<Self> {
        Self::build(p, a, min_poly, max_order)
    }

    fn build(p: u64, a: usize, min_poly: Option<Vec<u64>>, max_order: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if a == 0 {
            return Err(Error::InvalidDegree);
        }
        let order = (p as u128).checked_pow(a as u32).unwrap_or(u128::MAX);
        if order > max_order as u128 {
            return Err(Error::FieldTooLarge {
                order,
                limit: max_order,
            });
        }
        let min_poly = match min_poly {
            Some(poly) => poly,
            None => match conway_polynomial(p, a) {
                Some(poly) => poly,
                None => first_irreducible(p, a),
            },
        };
        if min_poly.len() != a + 1 || min_poly[a] != 1 || min_poly.iter().any(|&c| c >= p) {
            return Err(Error::MalformedMinPoly(min_poly));
        }
        if !is_irreducible(&min_poly, p) {
            return Err(Error::ReducibleMinPoly { poly: min_poly, p });
        }
        let mut reduce = Vec::with_capacity(a.saturating_sub(1));
        let mut row: Vec<u64> = min_poly[..a].iter().map(|&c| (p - c) % p).collect();
        for _ in 0..a.saturating_sub(1) {
            reduce.push(row.clone());
            // multiply by xi
            let top = row[a - 1];
            let mut next = vec![0u64; a];
            for i in (1..a).rev() {
                next[i] = row[i - 1];
            }
            for (i, n) in next.iter_mut().enumerate() {
                *n = (*n + top * ((p - min_poly[i]) % p)) % p;
            }
            row = next;
        }
        let mut ctx = FieldCtx {
            p,
            degree: a,
            min_poly,
            order: order as u64,
            reduce,
            basis_traces: Vec::new(),
        };
        ctx.basis_traces = (0..a)
            .map(|i| {
                let mut e = ctx.zero();
                e.0[i] = 1;
                ctx.trace_slow(&e)
            })
            .collect();
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn min_poly(&self) -> &[u64] {
        &self.min_poly
    }

    pub fn zero(&self) -> FqElem {
        FqElem(vec![0; self.degree])
    }

    pub fn one(&self) -> FqElem {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> FqElem {
        let mut v = vec![0; self.degree];
        v[0] = c.rem_euclid(self.p as i64) as u64;
        FqElem(v)
    }

    /// The class of y in F_p[y]/(min_poly).
    pub fn generator(&self) -> FqElem {
        if self.degree == 1 {
            return self.from_int(-(self.min_poly[0] as i64));
        }
        let mut v = vec![0; self.degree];
        v[1] = 1;
        FqElem(v)
    }

    /// Build an element from coordinates; shorter vectors are zero-padded.
    pub fn elem(&self, coords: &[u64]) -> Result<FqElem> {
        if coords.len() > self.degree || coords.iter().any(|&c| c >= self.p) {
            return Err(Error::ForeignElement(coords.to_vec()));
        }
        let mut v = coords.to_vec();
        v.resize(self.degree, 0);
        Ok(FqElem(v))
    }

    pub fn check(&self, x: &FqElem) -> Result<()> {
        if x.0.len() != self.degree || x.0.iter().any(|&c| c >= self.p) {
            return Err(Error::ForeignElement(x.0.clone()));
        }
        Ok(())
    }

    pub fn is_zero(&self, x: &FqElem) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    /// Element in F_p (all higher coordinates zero).
    pub fn is_prime_field(&self, x: &FqElem) -> bool {
        x.0[1..].iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &FqElem, y: &FqElem) -> FqElem {
        FqElem(
            x.0.iter()
                .zip(&y.0)
                .map(|(a, b)| (a + b) % self.p)
                .collect(),
        )
    }

    pub fn sub(&self, x: &FqElem, y: &FqElem) -> FqElem {
        FqElem(
            x.0.iter()
                .zip(&y.0)
                .map(|(a, b)| (a + self.p - b) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, x: &FqElem) -> FqElem {
        FqElem(x.0.iter().map(|a| (self.p - a) % self.p).collect())
    }

    pub fn mul(&self, x: &FqElem, y: &FqElem) -> FqElem {
        let a = self.degree;
        let p = self.p;
        let mut prod = vec![0u64; 2 * a - 1];
        for (i, &xi) in x.0.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.0.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj) % p;
            }
        }
        let mut out = prod[..a].to_vec();
        for (j, &c) in prod[a..].iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, r) in out.iter_mut().zip(&self.reduce[j]) {
                *o = (*o + c * r) % p;
            }
        }
        FqElem(out)
    }

    pub fn pow(&self, x: &FqElem, mut e: u64) -> FqElem {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: &FqElem) -> Result<FqElem> {
        if self.is_zero(x) {
            return Err(Error::ZeroInverse);
        }
        if self.degree == 1 {
            return Ok(self.from_int(inv_mod(x.0[0], self.p).expect("nonzero mod prime") as i64));
        }
        Ok(self.pow(x, self.order - 2))
    }

    pub fn frobenius(&self, x: &FqElem) -> FqElem {
        self.pow(x, self.p)
    }

    fn trace_slow(&self, x: &FqElem) -> u64 {
        let mut acc = self.zero();
        let mut y = x.clone();
        for _ in 0..self.degree {
            acc = self.add(&acc, &y);
            y = self.frobenius(&y);
        }
        debug_assert!(self.is_prime_field(&acc));
        acc.0[0]
    }

    /// Absolute trace Tr_{F_q/F_p}(x).
    pub fn trace(&self, x: &FqElem) -> u64 {
        x.0.iter()
            .zip(&self.basis_traces)
            .fold(0, |acc, (c, t)| (acc + c * t) % self.p)
    }

    /// Element whose base-p digits are its coordinates.
    pub fn from_index(&self, mut idx: u64) -> FqElem {
        let mut v = vec![0; self.degree];
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FqElem(v)
    }

    pub fn index(&self, x: &FqElem) -> u64 {
        x.0.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (0..self.order).map(move |i| self.from_index(i))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        (1..self.order).map(move |i| self.from_index(i))
    }
}

fn poly_rem(num: &[u64], den: &[u64], p: u64) -> Vec<u64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let lead_inv = inv_mod(den[dd], p).expect("monic divisor");
    while r.len() > dd {
        let top = r.pop().unwrap();
        if top == 0 {
            continue;
        }
        let c = top * lead_inv % p;
        let shift = r.len() - dd;
        for (i, &d) in den[..dd].iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * d % p) % p;
        }
    }
    r
}

/// Trial division by every monic polynomial of degree at most a/2.
pub fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let a = poly.len() - 1;
    for k in 1..=a / 2 {
        let count = p.pow(k as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(k + 1);
            let mut t = idx;
            for _ in 0..k {
                div.push(t % p);
                t /= p;
            }
            div.push(1);
            if poly_rem(poly, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

pub fn first_irreducible(p: u64, a: usize) -> Vec<u64> {
    let count = p.pow(a as u32);
    for idx in 0..count {
        let mut poly = Vec::with_capacity(a + 1);
        let mut t = idx;
        for _ in 0..a {
            poly.push(t % p);
            t /= p;
        }
        poly.push(1);
        if poly[0] != 0 && is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// f(x) = sum coeffs[i] x^i over F_q, trimmed so the last entry is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyFq {
    coeffs: Vec<FqElem>,
}

impl PolyFq {
    pub fn new(ctx: &FieldCtx, coeffs: Vec<FqElem>) -> Result<Self> {
        for c in &coeffs {
            ctx.check(c)?;
        }
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| ctx.is_zero(c)) {
            coeffs.pop();
        }
        Ok(PolyFq { coeffs })
    }

    /// Polynomial with F_p coefficients given as integers, low-to-high.
    pub fn from_ints(ctx: &FieldCtx, coeffs: &[i64]) -> Self {
        PolyFq::new(ctx, coeffs.iter().map(|&c| ctx.from_int(c)).collect())
            .expect("integers embed in F_p")
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, ctx: &FieldCtx, i: usize) -> FqElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero())
    }

    pub fn has_prime_field_coeffs(&self, ctx: &FieldCtx) -> bool {
        self.coeffs.iter().all(|c| ctx.is_prime_field(c))
    }

    pub fn eval(&self, ctx: &FieldCtx, x: &FqElem) -> FqElem {
        self.coeffs
            .iter()
            .rev()
            .fold(ctx.zero(), |acc, c| ctx.add(&ctx.mul(&acc, x), c))
    }

    pub fn scale(&self, ctx: &FieldCtx, lambda: &FqElem) -> PolyFq {
        PolyFq::new(
            ctx,
            self.coeffs.iter().map(|c| ctx.mul(c, lambda)).collect(),
        )
        .expect("same field")
    }

    /// f - f(0).
    pub fn without_constant(&self, ctx: &FieldCtx) -> PolyFq {
        let mut coeffs = self.coeffs.clone();
        if let Some(c) = coeffs.first_mut() {
            *c = ctx.zero();
        }
        PolyFq::new(ctx, coeffs).expect("same field")
    }

    /// Indices k >= 1 with a nonzero coefficient.
    pub fn support(&self, ctx: &FieldCtx) -> Vec<usize> {
        (1..self.coeffs.len())
            .filter(|&k| !ctx.is_zero(&self.coeffs[k]))
            .collect()
    }

    /// Human-readable form over F_p, e.g. "x^8+x^6+x^2".
    pub fn display(&self, ctx: &FieldCtx) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if ctx.is_zero(c) {
                continue;
            }
            let coeff = if ctx.degree() == 1 || ctx.is_prime_field(c) {
                if c.0[0] == 1 && k > 0 {
                    String::new()
                } else {
                    c.0[0].to_string()
                }
            } else {
                format!("({})", display_elem(c))
            };
            terms.push(match k {
                0 => {
                    if coeff.is_empty() {
                        "1".into()
                    } else {
                        coeff
                    }
                }
                1 => format!("{coeff}x"),
                _ => format!("{coeff}x^{k}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// Renders coordinates in xi, e.g. [2, 1] as "xi+2".
pub fn display_elem(x: &FqElem) -> String {
    let mut terms = Vec::new();
    for (i, &c) in x.0.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coeff = if c == 1 && i > 0 {
            String::new()
        } else {
            c.to_string()
        };
        terms.push(match i {
            0 => coeff,
            1 => format!("{coeff}xi"),
            _ => format!("{coeff}xi^{i}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// One λ^(p-1) class: its value c and a representative λ with λ^(p-1) = c.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaClass {
    pub value: FqElem,
    pub representative: FqElem,
}

/// Image of λ ↦ λ^(p-1) on F_q^×, with the first preimage in index order.
pub fn lambda_classes(ctx: &FieldCtx) -> Vec<LambdaClass> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for lambda in ctx.nonzero_elements() {
        let value = ctx.pow(&lambda, ctx.p() - 1);
        if seen.insert(value.clone()) {
            out.push(LambdaClass {
                value,
                representative: lambda,
            });
        }
    }
    out
}

/// All λ in F_q^× with λ^(p-1) = c, by exhaustive scan.
pub fn solve_lambda_power(ctx: &FieldCtx, c: &FqElem) -> Vec<FqElem> {
    ctx.nonzero_elements()
        .filter(|l| &ctx.pow(l, ctx.p() - 1) == c)
        .collect()
}
