//! Artin–Hasse coefficients and the splitting-function table
//! F(x) = Π_k E(π·ω(λ a_k)·x^k) = Σ F_i(π) x^i.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FqElem, PolyFq};
use crate::padic::{PiElement, PiRing};
use crate::valuation::Valuation;

/// Coefficients u_0..u_D of E(x) = exp(Σ x^(p^i)/p^i), reduced mod p^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinHasseTable {
    pub p: u64,
    pub precision: u32,
    pub coeffs: Vec<u64>,
}

/// Exact rational coefficients via k·u_k = Σ_{p^i <= k} u_{k - p^i}.
pub fn artin_hasse_exact(p: u64, degree: usize) -> Vec<BigRational> {
    let mut powers = Vec::new();
    let mut pp: usize = 1;
    while pp <= degree.max(1) {
        powers.push(pp);
        pp = match pp.checked_mul(p as usize) {
            Some(v) => v,
            None => break,
        };
    }
    let mut u: Vec<BigRational> = Vec::with_capacity(degree + 1);
    u.push(BigRational::one());
    for k in 1..=degree {
        let mut sum = BigRational::zero();
        for &pp in powers.iter().take_while(|&&pp| pp <= k) {
            sum += &u[k - pp];
        }
        u.push(sum / BigRational::from_integer(BigInt::from(k)));
    }
    u
}

fn reduce_rational(r: &BigRational, modulus: u64) -> Option<u64> {
    let m = BigInt::from(modulus);
    let num = r.numer().mod_floor(&m).to_u64()?;
    let den = r.denom().mod_floor(&m).to_u64()?;
    let inv = crate::arith::inv_mod(den, modulus)?;
    Some(crate::arith::mul_mod(num, inv, modulus))
}

/// Coefficients through degree `degree`, exact then reduced mod p^N.
pub fn artin_hasse(p: u64, precision: u32, degree: usize) -> Result<ArtinHasseTable> {
    let modulus = crate::arith::checked_pow(p, precision)
        .ok_or(Error::ModulusTooLarge { p, n: precision })?;
    let exact = artin_hasse_exact(p, degree);
    let pb = BigInt::from(p);
    let coeffs = exact
        .iter()
        .enumerate()
        .map(|(k, r)| {
            if r.denom().is_multiple_of(&pb) || r.denom().is_negative() {
                return Err(Error::NotIntegral(k));
            }
            reduce_rational(r, modulus).ok_or(Error::NotIntegral(k))
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(ArtinHasseTable {
        p,
        precision,
        coeffs,
    })
}

/// 0 for i = 0, otherwise ⌈i/d⌉: every index vector in I_i has |n| >= i/d.
pub fn decay_bound(i: usize, d: usize) -> usize {
    if i == 0 {
        0
    } else {
        i.div_ceil(d)
    }
}

#[derive(Clone, Debug)]
pub struct SplittingCoefficients {
    pub f: PolyFq,
    pub lambda: FqElem,
    /// Largest x-degree kept.
    pub truncation: usize,
    pub coeffs: Vec<PiElement>,
}

impl SplittingCoefficients {
    pub fn get(&self, i: usize) -> Option<&PiElement> {
        self.coeffs.get(i)
    }

    /// Indices whose π-adic order falls below ⌈i/d⌉ (empty when the table is sound).
    pub fn decay_violations(&self, ring: &PiRing) -> Vec<usize> {
        let d = self.f.degree();
        let p1 = ring.padic().p() as i64 - 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, c)| match ring.ord(c) {
                Valuation::Exact(v) => {
                    v * Rational64::from_integer(p1)
                        < Rational64::from_integer(decay_bound(*i, d) as i64)
                }
                Valuation::AtLeast(_) => false,
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Splitting coefficients F_0..F_D of λf, one sparse factor per nonzero
/// monomial of f. Monomials π^n with n >= N(p-1) vanish at working precision.
pub fn splitting_coeffs(
    field: &FieldCtx,
    f: &PolyFq,
    lambda: &FqElem,
    ring: &PiRing,
    ah: &ArtinHasseTable,
    truncation: usize,
) -> Result<SplittingCoefficients> {
    if field.is_zero(lambda) {
        return Err(Error::ZeroLambda);
    }
    let d = f.degree();
    let p = field.p();
    if f.is_zero() || (d as u64).is_multiple_of(p) {
        return Err(Error::DegreeNotCoprime { d, p });
    }
    if !field.is_zero(&f.coeff(field, 0)) {
        return Err(Error::ConstantTerm);
    }
    let padic = ring.padic();
    let max_pi = padic.precision() as usize * (p as usize - 1);
    let mut table: Vec<PiElement> = vec![ring.zero(); truncation + 1];
    table[0] = ring.one();
    for k in f.support(field) {
        let w = padic.teichmuller(&field.mul(lambda, &f.coeff(field, k)));
        let mut terms: Vec<(usize, PiElement)> = Vec::new();
        let mut wn = padic.one();
        for n in 1..max_pi {
            if k * n > truncation || n >= ah.coeffs.len() {
                break;
            }
            wn = padic.mul(&wn, &w);
            let coeff = padic.scale_int(&wn, ah.coeffs[n] as i64);
            let term = ring.monomial(n, &coeff);
            if !ring.is_zero(&term) {
                terms.push((k * n, term));
            }
        }
        // in place from the top: lower entries still hold the old product
        for i in (1..=truncation).rev() {
            let mut acc = table[i].clone();
            for (shift, term) in &terms {
                if *shift > i {
                    break;
                }
                let lower = &table[i - shift];
                if ring.is_zero(lower) {
                    continue;
                }
                acc = ring.add(&acc, &ring.mul(term, lower));
            }
            table[i] = acc;
        }
    }
    Ok(SplittingCoefficients {
        f: f.clone(),
        lambda: lambda.clone(),
        truncation,
        coeffs: table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicCtx;

    #[test]
    fn artin_hasse_examples() {
        let t = artin_hasse(5, 3, 10).unwrap();
        assert_eq!(t.coeffs[0], 1);
        assert_eq!(t.coeffs[1], 1);
        assert_eq!(t.coeffs[2], 63);
        assert_eq!(t.coeffs[5], 120);
        let exact = artin_hasse_exact(5, 5);
        assert_eq!(exact[5], BigRational::new(5.into(), 24.into()));
    }

    #[test]
    fn artin_hasse_integral_and_factorial_prefix() {
        for p in [3u64, 5, 7] {
            let t = artin_hasse(p, 3, 200).unwrap();
            let m = p.pow(3);
            let mut fact = 1u64;
            for k in 0..p as usize {
                if k > 0 {
                    fact *= k as u64;
                }
                assert_eq!(
                    crate::arith::mul_mod(t.coeffs[k], fact, m),
                    1,
                    "p={p} k={k}"
                );
            }
        }
    }

    #[test]
    fn decay_examples() {
        assert_eq!(decay_bound(0, 8), 0);
        assert_eq!(decay_bound(9, 8), 2);
        assert_eq!(decay_bound(16, 8), 2);
    }

    fn octic_table(lambda: &[u64]) -> (PiRing, SplittingCoefficients) {
        let field = FieldCtx::new(5, 2, vec![2, 4, 1]).unwrap();
        let ring = PiRing::quotient(PadicCtx::new(field.clone(), 3).unwrap());
        let f = PolyFq::from_ints(&field, &[0, 0, 1, 0, 0, 0, 1, 0, 1]);
        let ah = artin_hasse(5, 3, 119).unwrap();
        let lambda = field.elem(lambda).unwrap();
        let table = splitting_coeffs(&field, &f, &lambda, &ring, &ah, 119).unwrap();
        (ring, table)
    }

    #[test]
    fn octic_entries() {
        let (ring, table) = octic_table(&[1]);
        assert_eq!(table.coeffs[0], ring.one());
        assert_eq!(table.coeffs[2], ring.pi());
        assert_eq!(table.coeffs[6], ring.from_ints(&[0, 1, 0, 21]));
        for i in (1..=119).step_by(2) {
            assert!(ring.is_zero(&table.coeffs[i]), "F_{i}");
        }
        // ord_π F_4 >= 2
        let v = ring.ord(&table.coeffs[4]);
        assert!(v.value() >= Rational64::new(2, 4));
        assert!(table.decay_violations(&ring).is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        let field = FieldCtx::with_default(5, 1).unwrap();
        let ring = PiRing::quotient(PadicCtx::new(field.clone(), 2).unwrap());
        let ah = artin_hasse(5, 2, 20).unwrap();
        let f = PolyFq::from_ints(&field, &[0, 0, 1]);
        assert_eq!(
            splitting_coeffs(&field, &f, &field.zero(), &ring, &ah, 20).unwrap_err(),
            Error::ZeroLambda
        );
        let g = PolyFq::from_ints(&field, &[0, 0, 0, 0, 0, 1]);
        assert!(matches!(
            splitting_coeffs(&field, &g, &field.one(), &ring, &ah, 20),
            Err(Error::DegreeNotCoprime { .. })
        ));
        let h = PolyFq::from_ints(&field, &[1, 0, 1]);
        assert_eq!(
            splitting_coeffs(&field, &h, &field.one(), &ring, &ah, 20).unwrap_err(),
            Error::ConstantTerm
        );
    }
}
