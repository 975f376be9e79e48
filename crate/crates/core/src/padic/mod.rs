//! Truncated p-adic arithmetic.
//!
//! [`PadicCtx`] models the unramified ring Z_q / p^N as Z/p^N[θ]/(g(θ)),
//! where g is the coefficient-wise lift of the minimal polynomial of xi.
//! The ramified quotient T = (Z_q/p^N)[π]/(π^(p-1) + p) lives in [`pi`].

pub mod pi;

use serde::{Deserialize, Serialize};

use crate::arith::{checked_pow, inv_mod, vp_capped};
use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FqElem};

pub use pi::{Approx, PiElement, PiMode, PiRing};

/// Residues must stay below 2^40 so that sums of products fit in u128.
pub const MODULUS_BITS: u32 = 40;

/// Element of Z_q / p^N, coordinates in the power basis of θ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnramifiedScalar(pub Vec<u64>);

impl UnramifiedScalar {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct PadicCtx {
    field: FieldCtx,
    precision: u32,
    modulus: u64,
    lifted_min_poly: Vec<u64>,
    // coordinates of θ^(a+j), j = 0..a-2
    reduce: Vec<Vec<u64>>,
    frob_image: UnramifiedScalar,
    // coordinates of τ(θ)^i, i = 0..a-1
    frob_powers: Vec<Vec<u64>>,
}

pub(crate) fn reduction_table(poly: &[u64], m: u64) -> Vec<Vec<u64>> {
    let a = poly.len() - 1;
    let neg: Vec<u64> = poly[..a].iter().map(|&c| (m - c % m) % m).collect();
    let mut rows = Vec::new();
    let mut row = neg.clone();
    for _ in 0..a.saturating_sub(1) {
        rows.push(row.clone());
        let top = row[a - 1] as u128;
        let mut next = vec![0u64; a];
        for i in 0..a {
            let shifted = if i == 0 { 0 } else { row[i - 1] as u128 };
            next[i] = ((shifted + top * neg[i] as u128) % m as u128) as u64;
        }
        row = next;
    }
    rows
}

impl PadicCtx {
    /// Context for Z_q / p^N with 1 <= N <= p.
    pub fn new(field: FieldCtx, precision: u32) -> Result<Self> {
        let p = field.p();
        if precision == 0 {
            return Err(Error::InvalidPrecision { n: precision, p });
        }
        let modulus = checked_pow(p, precision)
            .filter(|&m| m < (1u64 << MODULUS_BITS))
            .ok_or(Error::ModulusTooLarge { p, n: precision })?;
        let lifted_min_poly = field.min_poly().to_vec();
        let reduce = reduction_table(&lifted_min_poly, modulus);
        let a = field.degree();
        let mut ctx = PadicCtx {
            field,
            precision,
            modulus,
            lifted_min_poly,
            reduce,
            frob_image: UnramifiedScalar(vec![0; a]),
            frob_powers: Vec::new(),
        };
        ctx.frob_image = ctx.hensel_frobenius_root();
        let mut powers = Vec::with_capacity(a);
        let mut acc = ctx.one();
        for _ in 0..a {
            powers.push(acc.0.clone());
            acc = ctx.mul(&acc, &ctx.frob_image);
        }
        ctx.frob_powers = powers;
        Ok(ctx)
    }

    fn theta(&self) -> UnramifiedScalar {
        let a = self.degree();
        if a == 1 {
            // θ is the root of y + c: -c
            return self.from_int(-(self.lifted_min_poly[0] as i64));
        }
        let mut v = vec![0; a];
        v[1] = 1;
        UnramifiedScalar(v)
    }

    fn eval_lifted(&self, x: &UnramifiedScalar, derivative: bool) -> UnramifiedScalar {
        let g = &self.lifted_min_poly;
        let mut acc = self.zero();
        for (i, &c) in g.iter().enumerate().rev() {
            let coeff = if derivative {
                if i == 0 {
                    continue;
                }
                (c as u128 * i as u128 % self.modulus as u128) as u64
            } else {
                c
            };
            acc = self.add(&self.mul(&acc, x), &self.from_int(coeff as i64));
        }
        acc
    }

    /// Root of g congruent to θ^p mod p, by Newton iteration.
    fn hensel_frobenius_root(&self) -> UnramifiedScalar {
        let theta_p = self.field.pow(&self.field.generator(), self.field.p());
        let mut r = self.lift(&theta_p);
        if self.degree() == 1 {
            return self.theta();
        }
        let steps = 2 + (32 - self.precision.leading_zeros());
        for _ in 0..steps {
            let value = self.eval_lifted(&r, false);
            if value.0.iter().all(|&c| c == 0) {
                break;
            }
            let slope = self.eval_lifted(&r, true);
            let inv = self.inv(&slope).expect("separable minimal polynomial");
            r = self.sub(&r, &self.mul(&value, &inv));
        }
        debug_assert!(self.eval_lifted(&r, false).0.iter().all(|&c| c == 0));
        r
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// p^N.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn lifted_min_poly(&self) -> &[u64] {
        &self.lifted_min_poly
    }

    pub fn frob_image(&self) -> &UnramifiedScalar {
        &self.frob_image
    }

    pub fn zero(&self) -> UnramifiedScalar {
        UnramifiedScalar(vec![0; self.degree()])
    }

    pub fn one(&self) -> UnramifiedScalar {
        self.from_int(1)
    }

    pub fn from_int(&self, c: i64) -> UnramifiedScalar {
        let mut v = vec![0; self.degree()];
        v[0] = c.rem_euclid(self.modulus as i64) as u64;
        UnramifiedScalar(v)
    }

    pub fn from_coords(&self, coords: &[u64]) -> UnramifiedScalar {
        let mut v: Vec<u64> = coords.iter().map(|c| c % self.modulus).collect();
        v.resize(self.degree(), 0);
        UnramifiedScalar(v)
    }

    /// Coordinate-wise lift with entries in [0, p).
    pub fn lift(&self, x: &FqElem) -> UnramifiedScalar {
        UnramifiedScalar(x.coords().to_vec())
    }

    pub fn reduce_mod_p(&self, x: &UnramifiedScalar) -> FqElem {
        FqElem(x.0.iter().map(|c| c % self.p()).collect())
    }

    pub fn is_zero(&self, x: &UnramifiedScalar) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &UnramifiedScalar, y: &UnramifiedScalar) -> UnramifiedScalar {
        let m = self.modulus;
        UnramifiedScalar(x.0.iter().zip(&y.0).map(|(a, b)| (a + b) % m).collect())
    }

    pub fn sub(&self, x: &UnramifiedScalar, y: &UnramifiedScalar) -> UnramifiedScalar {
        let m = self.modulus;
        UnramifiedScalar(x.0.iter().zip(&y.0).map(|(a, b)| (a + m - b) % m).collect())
    }

    pub fn neg(&self, x: &UnramifiedScalar) -> UnramifiedScalar {
        let m = self.modulus;
        UnramifiedScalar(x.0.iter().map(|a| (m - a) % m).collect())
    }

    pub fn scale_int(&self, x: &UnramifiedScalar, c: i64) -> UnramifiedScalar {
        let m = self.modulus as u128;
        let c = c.rem_euclid(self.modulus as i64) as u128;
        UnramifiedScalar(x.0.iter().map(|&a| (a as u128 * c % m) as u64).collect())
    }

    pub fn mul(&self, x: &UnramifiedScalar, y: &UnramifiedScalar) -> UnramifiedScalar {
        let a = self.degree();
        let mut prod = vec![0u128; 2 * a - 1];
        for (i, &xi) in x.0.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.0.iter().enumerate() {
                prod[i + j] += xi as u128 * yj as u128;
            }
        }
        self.fold(&mut prod)
    }

    /// Reduce a length 2a-1 product vector modulo (p^N, g(θ)).
    pub(crate) fn fold(&self, prod: &mut [u128]) -> UnramifiedScalar {
        let a = self.degree();
        let m = self.modulus as u128;
        let mut out: Vec<u128> = prod[..a].iter().map(|c| c % m).collect();
        for (j, c) in prod[a..].iter().enumerate() {
            let c = c % m;
            if c == 0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&self.reduce[j]) {
                *o += c * r as u128;
            }
        }
        UnramifiedScalar(out.into_iter().map(|c| (c % m) as u64).collect())
    }

    pub fn pow(&self, x: &UnramifiedScalar, mut e: u64) -> UnramifiedScalar {
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

    pub fn is_unit(&self, x: &UnramifiedScalar) -> bool {
        !self.field.is_zero(&self.reduce_mod_p(x))
    }

    /// Inverse of a unit: invert mod p, then Newton steps y <- y(2 - xy).
    pub fn inv(&self, x: &UnramifiedScalar) -> Result<UnramifiedScalar> {
        let residue = self.reduce_mod_p(x);
        if self.field.is_zero(&residue) {
            return Err(Error::NonUnit(x.0.clone()));
        }
        let mut y = self.lift(&self.field.inv(&residue)?);
        let two = self.from_int(2);
        for _ in 0..=(32 - self.precision.leading_zeros()) {
            y = self.mul(&y, &self.sub(&two, &self.mul(x, &y)));
        }
        debug_assert_eq!(self.mul(x, &y), self.one());
        Ok(y)
    }

    /// Largest k <= N with p^k dividing every coordinate.
    pub fn ord_p(&self, x: &UnramifiedScalar) -> u32 {
        x.0.iter()
            .map(|&c| vp_capped(c, self.p(), self.precision))
            .min()
            .unwrap_or(self.precision)
    }

    /// x reduced modulo p^k (k <= N), keeping the same modulus.
    pub fn truncate(&self, x: &UnramifiedScalar, k: u32) -> UnramifiedScalar {
        let mk = self.p().pow(k.min(self.precision));
        UnramifiedScalar(x.0.iter().map(|c| c % mk).collect())
    }

    /// Ring automorphism τ: θ ↦ τ(θ), lifting x ↦ x^p.
    pub fn frobenius(&self, x: &UnramifiedScalar) -> UnramifiedScalar {
        let a = self.degree();
        let m = self.modulus as u128;
        let mut out = vec![0u128; a];
        for (i, &c) in x.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(&self.frob_powers[i]) {
                *o += c as u128 * b as u128;
            }
        }
        UnramifiedScalar(out.into_iter().map(|c| (c % m) as u64).collect())
    }

    /// τ^k for any integer k (τ^a is the identity).
    pub fn frobenius_pow(&self, x: &UnramifiedScalar, k: i64) -> UnramifiedScalar {
        let a = self.degree() as i64;
        let mut y = x.clone();
        for _ in 0..k.rem_euclid(a) {
            y = self.frobenius(&y);
        }
        y
    }

    /// Teichmüller lift: iterate t ↦ t^q from any lift until fixed mod p^N.
    pub fn teichmuller(&self, c: &FqElem) -> UnramifiedScalar {
        if self.field.is_zero(c) {
            return self.zero();
        }
        let q = self.field.order();
        let mut t = self.lift(c);
        for _ in 0..=self.precision {
            let next = self.pow(&t, q);
            if next == t {
                return t;
            }
            t = next;
        }
        debug_assert_eq!(self.pow(&t, q), t);
        t
    }

    /// Integer value of an element of Z/p^N (θ-coordinates must vanish).
    pub fn as_int(&self, x: &UnramifiedScalar) -> Option<u64> {
        x.0[1..].iter().all(|&c| c == 0).then_some(x.0[0])
    }

    pub fn inv_int(&self, c: u64) -> Option<u64> {
        inv_mod(c, self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, a: usize, n: u32) -> PadicCtx {
        PadicCtx::new(FieldCtx::with_default(p, a).unwrap(), n).unwrap()
    }

    #[test]
    fn teichmuller_examples() {
        let c = ctx(5, 1, 3);
        let f = c.field().clone();
        assert_eq!(c.teichmuller(&f.from_int(4)), c.from_int(124));
        assert_eq!(c.teichmuller(&f.from_int(1)), c.one());
        assert_eq!(c.teichmuller(&f.from_int(2)), c.from_int(57));
        assert_eq!(c.teichmuller(&f.zero()), c.zero());
    }

    #[test]
    fn frobenius_on_constants_and_involution() {
        let c = ctx(5, 2, 3);
        assert_eq!(c.frobenius(&c.from_int(7)), c.from_int(7));
        let x = c.from_coords(&[17, 88]);
        assert_eq!(c.frobenius(&c.frobenius(&x)), x);
        assert_ne!(c.frobenius(&x), x);
    }

    #[test]
    fn frobenius_of_teichmuller_generator() {
        let c = ctx(5, 2, 3);
        let f = c.field().clone();
        let xi = f.generator();
        let lhs = c.frobenius(&c.teichmuller(&xi));
        let rhs = c.teichmuller(&f.pow(&xi, 5));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn frob_image_is_a_root() {
        for (p, a, n) in [(5, 2, 3), (3, 3, 3), (7, 2, 7), (5, 4, 5)] {
            let c = ctx(p, a, n);
            assert!(c.is_zero(&c.eval_lifted(c.frob_image(), false)));
            let theta_p = c.field().pow(&c.field().generator(), p);
            assert_eq!(c.reduce_mod_p(c.frob_image()), theta_p);
        }
    }

    #[test]
    fn precision_bounds() {
        let f = FieldCtx::with_default(5, 2).unwrap();
        assert!(matches!(
            PadicCtx::new(f.clone(), 0),
            Err(Error::InvalidPrecision { .. })
        ));
        assert!(PadicCtx::new(f.clone(), 6).is_ok());
        assert!(matches!(
            PadicCtx::new(f, 18),
            Err(Error::ModulusTooLarge { .. })
        ));
        let f = FieldCtx::with_default(13, 1).unwrap();
        assert!(matches!(
            PadicCtx::new(f, 13),
            Err(Error::ModulusTooLarge { .. })
        ));
    }

    #[test]
    fn unit_inverse() {
        let c = ctx(5, 2, 3);
        let x = c.from_coords(&[7, 31]);
        let y = c.inv(&x).unwrap();
        assert_eq!(c.mul(&x, &y), c.one());
        assert!(c.inv(&c.from_coords(&[5, 10])).is_err());
    }

    #[test]
    fn scalar_order() {
        let c = ctx(5, 2, 3);
        assert_eq!(c.ord_p(&c.from_coords(&[50, 25])), 2);
        assert_eq!(c.ord_p(&c.zero()), 3);
        assert_eq!(c.ord_p(&c.from_coords(&[50, 1])), 0);
    }
}
