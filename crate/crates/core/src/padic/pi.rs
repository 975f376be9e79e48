//! Series in π with Z_q/p^N coefficients.
//!
//! Two models share one element type:
//!
//! * [`PiMode::Quotient`] is the ring T = (Z_q/p^N)[π]/(π^(p-1) - t₀), with
//!   p-1 components. From Σ π^(p^k)/p^k = 0 the power t = π^(p-1) is the
//!   root of order 1 of p + t + t^(p+1)/p + t^(p²+p+1)/p² + ..., so t₀ lies
//!   in Z_p and t₀ ≡ -p mod p^p. For N <= p this is the familiar relation
//!   π^(p-1) = -p.
//! * [`PiMode::Formal`] keeps π as a free variable truncated at
//!   π^(N(p-1)); every dropped monomial has order >= N. Substituting
//!   π ↦ uπ is a ring automorphism here for every unit u, which the
//!   quotient model only has when u^(p-1) = 1.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{PadicCtx, UnramifiedScalar};
use crate::arith::vp_capped;
use crate::error::{Error, Result};
use crate::valuation::Valuation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PiMode {
    Quotient,
    Formal,
}

/// Σ comps[i] π^i, stored flat: component i is `data[i*a..(i+1)*a]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiElement {
    data: Vec<u64>,
}

impl PiElement {
    pub fn raw(&self) -> &[u64] {
        &self.data
    }
}

/// A value known modulo p^precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approx {
    pub value: PiElement,
    pub precision: u32,
}

#[derive(Clone, Debug)]
pub struct PiRing {
    padic: PadicCtx,
    mode: PiMode,
    len: usize,
    // t₀ mod p^N
    relation: u64,
}

/// t₀ = π^(p-1) modulo p^n, by fixed-point iteration of
/// t = -p - Σ_{k>=1} t^(1+p+...+p^k) / p^k.
pub fn pi_power_constant(p: u64, n: u32) -> u64 {
    let pb = BigInt::from(p);
    let modulus = pb.pow(n);
    let mut t = -pb.clone();
    for _ in 0..=n {
        let mut next = -pb.clone();
        let (mut e, mut k) = (1u64 + p, 1u32);
        // term k has order e - k
        while e - (k as u64) < n as u64 {
            let m = pb.pow(n + k);
            let term = t.modpow(&BigInt::from(e), &m);
            debug_assert!((&term % pb.pow(k)).is_zero());
            next -= term / pb.pow(k);
            e = e * p + 1;
            k += 1;
        }
        t = ((next % &modulus) + &modulus) % &modulus;
    }
    t.to_u64().expect("reduced below p^n")
}

impl PiRing {
    pub fn new(padic: PadicCtx, mode: PiMode) -> Self {
        let p = padic.p() as usize;
        let len = match mode {
            PiMode::Quotient => p - 1,
            PiMode::Formal => padic.precision() as usize * (p - 1),
        };
        let relation = pi_power_constant(padic.p(), padic.precision());
        PiRing {
            padic,
            mode,
            len,
            relation,
        }
    }

    pub fn quotient(padic: PadicCtx) -> Self {
        Self::new(padic, PiMode::Quotient)
    }

    pub fn formal(padic: PadicCtx) -> Self {
        Self::new(padic, PiMode::Formal)
    }

    pub fn padic(&self) -> &PadicCtx {
        &self.padic
    }

    pub fn mode(&self) -> PiMode {
        self.mode
    }

    /// Number of π-power components.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn a(&self) -> usize {
        self.padic.degree()
    }

    fn m(&self) -> u64 {
        self.padic.modulus()
    }

    pub fn zero(&self) -> PiElement {
        PiElement {
            data: vec![0; self.len * self.a()],
        }
    }

    pub fn one(&self) -> PiElement {
        self.from_scalar(&self.padic.one())
    }

    pub fn from_int(&self, c: i64) -> PiElement {
        self.from_scalar(&self.padic.from_int(c))
    }

    pub fn from_scalar(&self, s: &UnramifiedScalar) -> PiElement {
        self.monomial(0, s)
    }

    pub fn pi(&self) -> PiElement {
        self.monomial(1, &self.padic.one())
    }

    /// Σ ints[i] π^i with Z/p^N coefficients; longer inputs are reduced.
    pub fn from_ints(&self, ints: &[i64]) -> PiElement {
        let mut out = self.zero();
        for (i, &c) in ints.iter().enumerate() {
            let term = self.monomial(i, &self.padic.from_int(c));
            out = self.add(&out, &term);
        }
        out
    }

    /// π^n · s, reduced or dropped according to the mode.
    pub fn monomial(&self, n: usize, s: &UnramifiedScalar) -> PiElement {
        let mut out = self.zero();
        let a = self.a();
        let (slot, factor) = match self.mode {
            PiMode::Formal => {
                if n >= self.len {
                    return out;
                }
                (n, self.padic.one())
            }
            PiMode::Quotient => {
                let p = self.padic.p() as usize;
                let (q, r) = (n / (p - 1), n % (p - 1));
                if q >= self.padic.precision() as usize {
                    return out;
                }
                let t0 = self.padic.from_int(self.relation as i64);
                (r, self.padic.pow(&t0, q as u64))
            }
        };
        let c = self.padic.mul(s, &factor);
        out.data[slot * a..(slot + 1) * a].copy_from_slice(&c.0);
        out
    }

    pub fn component(&self, x: &PiElement, i: usize) -> UnramifiedScalar {
        let a = self.a();
        UnramifiedScalar(x.data[i * a..(i + 1) * a].to_vec())
    }

    /// Integer value of each π-component; `None` if any θ-coordinate is nonzero.
    pub fn int_components(&self, x: &PiElement) -> Option<Vec<u64>> {
        (0..self.len)
            .map(|i| self.padic.as_int(&self.component(x, i)))
            .collect()
    }

    pub fn is_zero(&self, x: &PiElement) -> bool {
        x.data.iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &PiElement, y: &PiElement) -> PiElement {
        let m = self.m();
        PiElement {
            data: x
                .data
                .iter()
                .zip(&y.data)
                .map(|(a, b)| (a + b) % m)
                .collect(),
        }
    }

    pub fn sub(&self, x: &PiElement, y: &PiElement) -> PiElement {
        let m = self.m();
        PiElement {
            data: x
                .data
                .iter()
                .zip(&y.data)
                .map(|(a, b)| (a + m - b) % m)
                .collect(),
        }
    }

    pub fn neg(&self, x: &PiElement) -> PiElement {
        let m = self.m();
        PiElement {
            data: x.data.iter().map(|a| (m - a) % m).collect(),
        }
    }

    pub fn scale_int(&self, x: &PiElement, c: i64) -> PiElement {
        let m = self.m() as u128;
        let c = c.rem_euclid(self.m() as i64) as u128;
        PiElement {
            data: x.data.iter().map(|&v| (v as u128 * c % m) as u64).collect(),
        }
    }

    pub fn mul(&self, x: &PiElement, y: &PiElement) -> PiElement {
        let mut acc = Accumulator::new(self);
        acc.add_product(x, y);
        acc.finish()
    }

    pub fn pow(&self, x: &PiElement, mut e: u64) -> PiElement {
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

    fn map_components(
        &self,
        x: &PiElement,
        f: impl Fn(usize, &UnramifiedScalar) -> UnramifiedScalar,
    ) -> PiElement {
        let a = self.a();
        let mut out = self.zero();
        for i in 0..self.len {
            let c = self.component(x, i);
            out.data[i * a..(i + 1) * a].copy_from_slice(&f(i, &c).0);
        }
        out
    }

    /// τ applied coefficient-wise; π is fixed.
    pub fn frobenius(&self, x: &PiElement) -> PiElement {
        self.map_components(x, |_, c| self.padic.frobenius(c))
    }

    pub fn frobenius_pow(&self, x: &PiElement, k: i64) -> PiElement {
        self.map_components(x, |_, c| self.padic.frobenius_pow(c, k))
    }

    /// h(π) ↦ h(uπ): component i is multiplied by u^i.
    ///
    /// In the formal model this is the honest substitution. In the quotient
    /// model it rescales the representatives H_i of h = Σ π^i H_i, which
    /// agrees with the true substitution exactly when u^(p-1) = 1 and
    /// preserves valuations whenever u is a unit.
    pub fn substitute(&self, x: &PiElement, u: &UnramifiedScalar) -> Result<PiElement> {
        if !self.padic.is_unit(u) {
            return Err(Error::NonUnit(u.0.clone()));
        }
        let mut power = self.padic.one();
        let mut powers = Vec::with_capacity(self.len);
        for _ in 0..self.len {
            powers.push(power.clone());
            power = self.padic.mul(&power, u);
        }
        Ok(self.map_components(x, |i, c| self.padic.mul(c, &powers[i])))
    }

    /// Image in the quotient ring T over the same p-adic context.
    pub fn to_quotient(&self, x: &PiElement) -> PiElement {
        match self.mode {
            PiMode::Quotient => x.clone(),
            PiMode::Formal => {
                let t = PiRing::quotient(self.padic.clone());
                let mut out = t.zero();
                for i in 0..self.len {
                    let c = self.component(x, i);
                    if self.padic.is_zero(&c) {
                        continue;
                    }
                    out = t.add(&out, &t.monomial(i, &c));
                }
                out
            }
        }
    }

    /// Every coordinate reduced modulo p^k.
    pub fn truncate(&self, x: &PiElement, k: u32) -> PiElement {
        let mk = self.padic.p().pow(k.min(self.padic.precision()));
        PiElement {
            data: x.data.iter().map(|c| c % mk).collect(),
        }
    }

    /// x / p when every coordinate is divisible by p.
    pub fn div_p(&self, x: &PiElement) -> Option<PiElement> {
        let p = self.padic.p();
        if x.data.iter().any(|c| c % p != 0) {
            return None;
        }
        Some(PiElement {
            data: x.data.iter().map(|c| c / p).collect(),
        })
    }

    /// Valuation at full working precision.
    pub fn ord(&self, x: &PiElement) -> Valuation {
        self.ord_with_precision(x, self.padic.precision())
    }

    /// ord_p of an element known modulo p^prec:
    /// min over i of i/(p-1) + ord_p(H_i), or the bound >= prec if it vanishes.
    pub fn ord_with_precision(&self, x: &PiElement, prec: u32) -> Valuation {
        let t = self.to_quotient(x);
        let p = self.padic.p();
        let a = self.a();
        let mut best: Option<Rational64> = None;
        for i in 0..(p as usize - 1) {
            let v = t.data[i * a..(i + 1) * a]
                .iter()
                .map(|&c| vp_capped(c, p, prec))
                .min()
                .unwrap_or(prec);
            if v >= prec {
                continue;
            }
            let val = Rational64::new(i as i64, p as i64 - 1) + Rational64::from_integer(v as i64);
            if best.is_none_or(|b| val < b) {
                best = Some(val);
            }
        }
        match best {
            Some(v) => Valuation::Exact(v),
            None => Valuation::AtLeast(Rational64::from_integer(prec as i64)),
        }
    }

    /// Lift to the formal model: component i becomes the coefficient of π^i.
    pub fn embed_formal(&self, formal: &PiRing, x: &PiElement) -> PiElement {
        let a = self.a();
        let mut out = formal.zero();
        let n = self.len.min(formal.len);
        out.data[..n * a].copy_from_slice(&x.data[..n * a]);
        out
    }
}

/// Sums of products in T without intermediate reductions.
pub struct Accumulator<'a> {
    ring: &'a PiRing,
    width: usize,
    buf: Vec<u128>,
    pending: u64,
}

const PENDING_LIMIT: u64 = 1 << 24;

impl<'a> Accumulator<'a> {
    pub fn new(ring: &'a PiRing) -> Self {
        let a = ring.a();
        let width = 2 * a - 1;
        Accumulator {
            ring,
            width,
            buf: vec![0; (2 * ring.len - 1) * width],
            pending: 0,
        }
    }

    pub fn add_product(&mut self, x: &PiElement, y: &PiElement) {
        let a = self.ring.a();
        let len = self.ring.len;
        let formal = self.ring.mode == PiMode::Formal;
        for i in 0..len {
            let xs = &x.data[i * a..(i + 1) * a];
            if xs.iter().all(|&c| c == 0) {
                continue;
            }
            let jmax = if formal { len - i } else { len };
            for j in 0..jmax {
                let ys = &y.data[j * a..(j + 1) * a];
                let base = (i + j) * self.width;
                for (e, &xe) in xs.iter().enumerate() {
                    if xe == 0 {
                        continue;
                    }
                    for (f, &yf) in ys.iter().enumerate() {
                        self.buf[base + e + f] += xe as u128 * yf as u128;
                    }
                }
            }
        }
        self.pending += 1;
        if self.pending >= PENDING_LIMIT {
            let m = self.ring.m() as u128;
            self.buf.iter_mut().for_each(|c| *c %= m);
            self.pending = 0;
        }
    }

    /// Reduce and reset.
    pub fn finish(&mut self) -> PiElement {
        let ring = self.ring;
        let a = ring.a();
        let m = ring.m() as u128;
        let p = ring.padic.p() as usize;
        let wrap = ring.relation as u128;
        let mut out = vec![0u128; ring.len * a];
        for s in 0..(2 * ring.len - 1) {
            let slot = &mut self.buf[s * self.width..(s + 1) * self.width];
            if slot.iter().all(|&c| c == 0) {
                continue;
            }
            let c = ring.padic.fold(slot);
            slot.iter_mut().for_each(|v| *v = 0);
            if s < ring.len {
                for (o, &v) in out[s * a..(s + 1) * a].iter_mut().zip(&c.0) {
                    *o += v as u128;
                }
            } else {
                let t = s - (p - 1);
                for (o, &v) in out[t * a..(t + 1) * a].iter_mut().zip(&c.0) {
                    *o += v as u128 * wrap;
                }
            }
        }
        self.pending = 0;
        PiElement {
            data: out.into_iter().map(|v| (v % m) as u64).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::FieldCtx;

    fn t(p: u64, a: usize, n: u32) -> PiRing {
        PiRing::quotient(PadicCtx::new(FieldCtx::with_default(p, a).unwrap(), n).unwrap())
    }

    #[test]
    fn pi_power_constant_values() {
        assert_eq!(pi_power_constant(5, 3), 120);
        assert_eq!(pi_power_constant(5, 5), 5u64.pow(5) - 5);
        assert_eq!(pi_power_constant(5, 8), 387_495);
        assert_eq!(pi_power_constant(3, 6), 456);
        for p in [3u64, 5, 7] {
            for n in 1..=p as u32 {
                let m = p.pow(n);
                assert_eq!(pi_power_constant(p, n), (m - p % m) % m, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn artin_hasse_at_pi_is_a_pth_root_of_unity() {
        for (p, n) in [(3u64, 7u32), (5, 8), (7, 5)] {
            let r = t(p, 1, n);
            let len = (p as usize - 1) * n as usize;
            let ah = crate::splitting::artin_hasse(p, n, len).unwrap();
            let mut zeta = r.zero();
            let mut pk = r.one();
            for &u in &ah.coeffs {
                zeta = r.add(&zeta, &r.scale_int(&pk, u as i64));
                pk = r.mul(&pk, &r.pi());
            }
            assert_ne!(zeta, r.one());
            assert_eq!(r.pow(&zeta, p), r.one(), "p={p} N={n}");
        }
    }

    #[test]
    fn defining_relation() {
        let r = t(5, 1, 3);
        let lhs = r.mul(&r.pow(&r.pi(), 3), &r.pi());
        assert_eq!(lhs, r.from_int(-5));
        assert_eq!(r.int_components(&lhs).unwrap(), vec![120, 0, 0, 0]);
    }

    #[test]
    fn identity_and_difference_of_squares() {
        let r = t(5, 2, 3);
        let x = r.from_ints(&[3, 7, 11, 2]);
        assert_eq!(r.mul(&x, &r.one()), x);
        let a = r.from_ints(&[1, 1]);
        let b = r.from_ints(&[1, -1]);
        assert_eq!(r.mul(&a, &b), r.from_ints(&[1, 0, -1]));
    }

    #[test]
    fn valuation_examples() {
        let r = t(5, 1, 3);
        let x = r.from_ints(&[50, 10, 0, 1]);
        assert_eq!(r.ord(&x), Valuation::exact(3, 4));
        let r2 = t(5, 1, 2);
        let y = r2.from_ints(&[0, 5, 5, 5]);
        assert_eq!(r2.ord(&y), Valuation::exact(5, 4));
        assert_eq!(r.ord(&r.zero()), Valuation::at_least(3, 1));
    }

    #[test]
    fn substitution_examples() {
        let r = t(5, 1, 3);
        let x = r.from_ints(&[4, 9, 1, 2]);
        assert_eq!(r.substitute(&x, &r.padic().one()).unwrap(), x);
        let minus = r.padic().from_int(-1);
        assert_eq!(r.substitute(&r.pi(), &minus).unwrap(), r.neg(&r.pi()));
        let pi2 = r.from_ints(&[0, 0, 1]);
        let u = r.padic().from_int(57);
        assert_eq!(r.substitute(&pi2, &u).unwrap(), r.from_ints(&[0, 0, 124]));
        assert!(r.substitute(&x, &r.padic().from_int(10)).is_err());
    }

    #[test]
    fn formal_reduces_to_quotient() {
        let padic = PadicCtx::new(FieldCtx::with_default(5, 2).unwrap(), 3).unwrap();
        let formal = PiRing::formal(padic.clone());
        let quot = PiRing::quotient(padic);
        let x = formal.from_ints(&[1, 2, 0, 0, 3, 0, 0, 0, 0, 1]);
        let y = formal.from_ints(&[0, 1, 1, 0, 0, 7]);
        let lhs = formal.to_quotient(&formal.mul(&x, &y));
        let rhs = quot.mul(&formal.to_quotient(&x), &formal.to_quotient(&y));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn divide_by_p() {
        let r = t(5, 1, 3);
        let x = r.from_ints(&[25, 5, 0, 10]);
        assert_eq!(r.div_p(&x).unwrap(), r.from_ints(&[5, 1, 0, 2]));
        assert!(r.div_p(&r.from_ints(&[1])).is_none());
    }
}
