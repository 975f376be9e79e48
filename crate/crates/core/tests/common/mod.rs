#![allow(dead_code)]

use asnp_core::oracle::{char_sum, CyclotomicInt, ORACLE_MAX_ELEMENTS};
use asnp_core::padic::{PiElement, PiRing};
use asnp_core::splitting::artin_hasse;
use asnp_core::{FieldCtx, FqElem, PolyFq};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// F_25 = F_5[y]/(y^2 + 4y + 2).
pub fn f25() -> FieldCtx {
    FieldCtx::new(5, 2, vec![2, 4, 1]).unwrap()
}

/// x^8 + x^6 + x^2
pub fn octic(field: &FieldCtx) -> PolyFq {
    PolyFq::from_ints(field, &[0, 0, 1, 0, 0, 0, 1, 0, 1])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed)
}

pub fn random_nonzero(field: &FieldCtx, rng: &mut ChaCha8Rng) -> FqElem {
    field.from_index(rng.gen_range(1..field.order()))
}

/// Random f with f(0) = 0 and degree drawn from `degrees`; coefficients in
/// F_p when `prime` is set.
pub fn random_poly(
    field: &FieldCtx,
    rng: &mut ChaCha8Rng,
    degrees: &[usize],
    prime: bool,
) -> PolyFq {
    let d = degrees[rng.gen_range(0..degrees.len())];
    let draw = |rng: &mut ChaCha8Rng, nonzero: bool| {
        let lo = u64::from(nonzero);
        if prime {
            field.from_int(rng.gen_range(lo..field.p()) as i64)
        } else {
            field.from_index(rng.gen_range(lo..field.order()))
        }
    };
    let mut coeffs = vec![field.zero()];
    for _ in 1..d {
        coeffs.push(draw(rng, false));
    }
    coeffs.push(draw(rng, true));
    PolyFq::new(field, coeffs).unwrap()
}

/// ζ_p = E(π) in the ring, summing u_k π^k while π^k survives mod p^N.
pub fn zeta_in(ring: &PiRing) -> PiElement {
    let p = ring.padic().p();
    let n = ring.padic().precision();
    let top = (p as usize - 1) * n as usize;
    let ah = artin_hasse(p, n, top).unwrap();
    let mut acc = ring.zero();
    let mut pk = ring.one();
    for &u in &ah.coeffs {
        acc = ring.add(&acc, &ring.scale_int(&pk, u as i64));
        pk = ring.mul(&pk, &ring.pi());
    }
    acc
}

/// Image of Σ c_i ζ^i under ζ ↦ E(π).
pub fn cyclotomic_to_ring(ring: &PiRing, x: &CyclotomicInt) -> PiElement {
    let m = BigInt::from(ring.padic().modulus());
    let z = zeta_in(ring);
    let mut acc = ring.zero();
    let mut zk = ring.one();
    for c in x.coeffs() {
        let c = c.mod_floor(&m).to_i64().unwrap();
        acc = ring.add(&acc, &ring.scale_int(&zk, c));
        zk = ring.mul(&zk, &z);
    }
    acc
}

/// Tr(M^k) through the trace formula: S*(k) / (q^k - 1) - 1, the 1 being the
/// constant-term eigenvalue split off with B₀.
pub fn trace_by_enumeration(
    field: &FieldCtx,
    f: &PolyFq,
    lambda: &FqElem,
    ring: &PiRing,
    k: usize,
) -> PiElement {
    let g = f.scale(field, lambda);
    let s = char_sum(field, &g, k, ORACLE_MAX_ELEMENTS).unwrap();
    let padic = ring.padic();
    let qk = field.order().pow(k as u32) % padic.modulus();
    let inv = padic
        .inv_int((qk + padic.modulus() - 1) % padic.modulus())
        .unwrap();
    let full = ring.scale_int(&cyclotomic_to_ring(ring, &s), inv as i64);
    ring.sub(&full, &ring.one())
}
