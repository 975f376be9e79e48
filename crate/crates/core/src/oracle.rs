//! Exact character sums in Z[ζ_p] by field enumeration, the L-polynomial they
//! generate, and its Newton polygon. Shares nothing with the Dwork pipeline.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FqElem, PolyFq};
use crate::polygon::{lower_hull, NewtonPolygon, Origin, ValuationPoint};
use crate::valuation::Valuation;

/// Default bound on the number of elements enumerated per sum.
pub const ORACLE_MAX_ELEMENTS: u64 = 10_000_000;

const CHUNK: u64 = 4096;

/// Σ c_i ζ^i over the basis 1, ζ, ..., ζ^{p-2} of Z[ζ_p].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    p: u64,
    coeffs: Vec<BigInt>,
}

impl Serialize for CyclotomicInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl CyclotomicInt {
    pub fn zero(p: u64) -> Self {
        CyclotomicInt {
            p,
            coeffs: vec![BigInt::zero(); p as usize - 1],
        }
    }

    pub fn from_int(p: u64, c: i64) -> Self {
        let mut x = Self::zero(p);
        x.coeffs[0] = BigInt::from(c);
        x
    }

    /// ζ^e, reduced by ζ^{p-1} = -(1 + ζ + ... + ζ^{p-2}).
    pub fn zeta_pow(p: u64, e: u64) -> Self {
        let e = (e % p) as usize;
        let mut x = Self::zero(p);
        if e == p as usize - 1 {
            x.coeffs.iter_mut().for_each(|c| *c = -BigInt::one());
        } else {
            x.coeffs[e] = BigInt::one();
        }
        x
    }

    /// From an unreduced vector Σ v_i ζ^i, i < p.
    pub fn from_powers(p: u64, v: &[BigInt]) -> Self {
        let mut x = Self::zero(p);
        for (i, c) in v.iter().enumerate() {
            let term = Self::zeta_pow(p, i as u64);
            x = x.add(&term.scale(c));
        }
        x
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, y: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CyclotomicInt { p: self.p, coeffs }
    }

    pub fn sub(&self, y: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CyclotomicInt { p: self.p, coeffs }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        CyclotomicInt {
            p: self.p,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, y: &Self) -> Self {
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); 2 * p - 3];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coeffs.iter().enumerate() {
                full[i + j] += a * b;
            }
        }
        // ζ^p = 1, then fold ζ^{p-1}
        let mut v = vec![BigInt::zero(); p];
        for (k, c) in full.into_iter().enumerate() {
            v[k % p] += c;
        }
        let top = v.pop().unwrap();
        let coeffs = v.into_iter().map(|c| c - &top).collect();
        CyclotomicInt { p: self.p, coeffs }
    }

    /// Exact division by an integer; fails unless every coefficient divides.
    pub fn div_exact(&self, n: &BigInt) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = c.div_rem(n);
            if !r.is_zero() {
                return Err(Error::InexactDivision(n.to_u64().unwrap_or(0)));
            }
            coeffs.push(q);
        }
        Ok(CyclotomicInt { p: self.p, coeffs })
    }

    /// Image under ζ ↦ ζ^t, t prime to p.
    pub fn galois(&self, t: u64) -> Self {
        let mut out = Self::zero(self.p);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&Self::zeta_pow(self.p, i as u64 * t).scale(c));
            }
        }
        out
    }
}

/// ord_p as m/(p-1), m the number of exact divisions by 1 - ζ; `None` for 0.
pub fn cyc_ord(x: &CyclotomicInt) -> Option<Rational64> {
    if x.is_zero() {
        return None;
    }
    let p = x.p;
    let pb = BigInt::from(p);
    // Π_{k=2}^{p-1} (1 - ζ^k) = p / (1 - ζ)
    let mut cofactor = CyclotomicInt::from_int(p, 1);
    for k in 2..p {
        cofactor = cofactor.mul(&CyclotomicInt::from_int(p, 1).sub(&CyclotomicInt::zeta_pow(p, k)));
    }
    let mut cur = x.clone();
    let mut m: i64 = 0;
    loop {
        if cur.coeffs.iter().all(|c| c.is_multiple_of(&pb)) {
            cur = cur.div_exact(&pb).expect("checked divisibility");
            m += p as i64 - 1;
            continue;
        }
        let sum: BigInt = cur.coeffs.iter().sum();
        if !sum.is_multiple_of(&pb) {
            break;
        }
        cur = cur.mul(&cofactor).div_exact(&pb).expect("1 - zeta divides");
        m += 1;
    }
    Some(Rational64::new(m, p as i64 - 1))
}

/// F_{q^k} with an embedding of the base field.
struct Extension {
    big: FieldCtx,
    // image of the base-field generator ξ
    xi: FqElem,
}

impl Extension {
    fn new(field: &FieldCtx, k: usize, limit: u64) -> Result<Self> {
        let p = field.p();
        let a = field.degree();
        let size = (field.order() as u128)
            .checked_pow(k as u32)
            .unwrap_or(u128::MAX);
        if size > limit as u128 {
            return Err(Error::OracleTooLarge { size, limit });
        }
        let big = if k == 1 {
            field.clone()
        } else {
            FieldCtx::with_limit(p, a * k, None, limit)?
        };
        let xi = if k == 1 {
            field.generator()
        } else {
            find_root(field, &big)
        };
        Ok(Extension { big, xi })
    }

    fn embed(&self, x: &FqElem) -> FqElem {
        let mut acc = self.big.zero();
        for c in x.0.iter().rev() {
            acc = self
                .big
                .add(&self.big.mul(&acc, &self.xi), &self.big.from_int(*c as i64));
        }
        acc
    }
}

fn eval_min_poly(field: &FieldCtx, big: &FieldCtx, x: &FqElem) -> bool {
    let mut acc = big.zero();
    for c in field.min_poly().iter().rev() {
        acc = big.add(&big.mul(&acc, x), &big.from_int(*c as i64));
    }
    big.is_zero(&acc)
}

/// A root of the base minimal polynomial inside the extension. Norms
/// r^{(Q-1)/(q-1)} land in F_q^×; once one generates it, its powers hit a root.
fn find_root(field: &FieldCtx, big: &FieldCtx) -> FqElem {
    let q = field.order();
    let e = (big.order() - 1) / (q - 1);
    for idx in 2..big.order() {
        let s = big.pow(&big.from_index(idx), e);
        let mut t = s.clone();
        for _ in 0..q - 1 {
            if eval_min_poly(field, big, &t) {
                return t;
            }
            t = big.mul(&t, &s);
        }
    }
    unreachable!("F_q embeds in F_(q^k)")
}

/// S*_f(k) = Σ_{x ∈ F_{q^k}^×} ζ^{Tr(f(x))}.
pub fn char_sum(field: &FieldCtx, f: &PolyFq, k: usize, limit: u64) -> Result<CyclotomicInt> {
    let ext = Extension::new(field, k, limit)?;
    let coeffs: Vec<FqElem> = f.coeffs().iter().map(|c| ext.embed(c)).collect();
    let big = &ext.big;
    let p = field.p() as usize;
    let order = big.order();
    let chunks = order.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![0u64; p];
            for idx in (c * CHUNK).max(1)..((c + 1) * CHUNK).min(order) {
                let x = big.from_index(idx);
                let mut acc = big.zero();
                for co in coeffs.iter().rev() {
                    acc = big.add(&big.mul(&acc, &x), co);
                }
                hist[big.trace(&acc) as usize] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; p],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    let v: Vec<BigInt> = counts.into_iter().map(BigInt::from).collect();
    Ok(CyclotomicInt::from_powers(field.p(), &v))
}

/// c_0..c_d of L*_f(s) = exp(Σ S_k s^k / k).
#[derive(Clone, Debug, Serialize)]
pub struct LPolynomial {
    pub sums: Vec<CyclotomicInt>,
    pub coeffs: Vec<CyclotomicInt>,
    /// Whether c_{d+1} = 0 was verified.
    pub degree_checked: bool,
}

pub fn l_polynomial(field: &FieldCtx, f: &PolyFq, limit: u64) -> Result<LPolynomial> {
    let d = f.degree();
    let p = field.p();
    let extra = (field.order() as u128)
        .checked_pow(d as u32 + 1)
        .is_some_and(|s| s <= limit as u128);
    let top = if extra { d + 1 } else { d };
    let sums: Vec<CyclotomicInt> = (1..=top)
        .map(|k| char_sum(field, f, k, limit))
        .collect::<Result<_>>()?;
    let mut coeffs = vec![CyclotomicInt::from_int(p, 1)];
    for n in 1..=top {
        let mut acc = CyclotomicInt::zero(p);
        for k in 1..=n {
            acc = acc.add(&sums[k - 1].mul(&coeffs[n - k]));
        }
        coeffs.push(acc.div_exact(&BigInt::from(n))?);
    }
    if extra {
        if !coeffs[d + 1].is_zero() {
            return Err(Error::DegreeMismatch {
                degree: d,
                index: d + 1,
            });
        }
        coeffs.pop();
    }
    Ok(LPolynomial {
        sums,
        coeffs,
        degree_checked: extra,
    })
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub l: LPolynomial,
    /// ord_p c_n, `None` where c_n = 0.
    pub valuations: Vec<Option<Rational64>>,
    /// Polygon of L*_f.
    pub full: NewtonPolygon,
    /// Polygon of L_f: one slope-0 unit removed when f(0) = 0.
    pub polygon: NewtonPolygon,
}

pub fn oracle_np(field: &FieldCtx, f: &PolyFq, limit: u64) -> Result<OracleReport> {
    let l = l_polynomial(field, f, limit)?;
    let valuations: Vec<Option<Rational64>> = l.coeffs.iter().map(cyc_ord).collect();
    let points: Vec<ValuationPoint> = valuations
        .iter()
        .enumerate()
        .filter_map(|(n, v)| {
            v.map(|v| ValuationPoint {
                index: n,
                val: Valuation::Exact(v),
                origin: Origin::Coefficient,
            })
        })
        .collect();
    let full = lower_hull(&points)?;
    let polygon = if field.is_zero(&f.coeff(field, 0)) {
        full.strip_trivial_slope()
    } else {
        full.clone()
    };
    Ok(OracleReport {
        l,
        valuations,
        full,
        polygon,
    })
}

/// Is every coefficient a multiple of p? Used to sanity-check sums.
pub fn divisible_by_p(x: &CyclotomicInt) -> bool {
    let pb = BigInt::from(x.p);
    x.coeffs.iter().all(|c| c.is_multiple_of(&pb))
}

/// Largest coefficient magnitude, for reporting.
pub fn height(x: &CyclotomicInt) -> BigInt {
    x.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
}
