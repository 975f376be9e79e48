use std::cmp::Ordering;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

/// A p-adic order known exactly, or only bounded below because the value
/// vanished at working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Exact(Rational64),
    AtLeast(Rational64),
}

impl Valuation {
    pub fn exact(num: i64, den: i64) -> Self {
        Valuation::Exact(Rational64::new(num, den))
    }

    pub fn at_least(num: i64, den: i64) -> Self {
        Valuation::AtLeast(Rational64::new(num, den))
    }

    /// The exact value or the bound.
    pub fn value(&self) -> Rational64 {
        match *self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    /// Comparison that only answers when the order is forced by what is known.
    pub fn try_cmp(&self, other: &Valuation) -> Option<Ordering> {
        use Valuation::*;
        match (self, other) {
            (Exact(x), Exact(y)) => Some(x.cmp(y)),
            (Exact(x), AtLeast(y)) if x < y => Some(Ordering::Less),
            (AtLeast(x), Exact(y)) if x > y => Some(Ordering::Greater),
            _ => None,
        }
    }

    pub fn shift(&self, by: Rational64) -> Valuation {
        match *self {
            Valuation::Exact(v) => Valuation::Exact(v + by),
            Valuation::AtLeast(v) => Valuation::AtLeast(v + by),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{}", fmt_rational(*v)),
            Valuation::AtLeast(v) => write!(f, ">={}", fmt_rational(*v)),
        }
    }
}

/// "num/den", always with an explicit denominator.
pub fn fmt_rational(r: Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Rational64::new(n.trim().parse().ok()?, d))
        }
        None => Some(Rational64::from_integer(s.parse().ok()?)),
    }
}
