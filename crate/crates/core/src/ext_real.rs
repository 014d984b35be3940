//! Arithmetic on the nonnegative extended reals `[0, ∞]`.
//!
//! Values, rates and exponents in risk-sensitive control may legitimately be
//! infinite, and the standard conventions
//!
//! ```text
//! 0/0 := 0,   0·∞ := 0,   a/0 := +∞ (a > 0)
//! ```
//!
//! are load-bearing: `0·∞ := 0` is what makes the no-jump utility term vanish
//! when the exit rate accumulates infinite mass. IEEE semantics would turn
//! `0·∞` into NaN, so infinity is a tagged variant here, never an `f64`
//! infinity, and every operation spells its convention out in code.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Div, Mul};

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Repr {
    /// Invariant: finite and `>= 0`, never NaN.
    Finite(f64),
    Inf,
}

/// A nonnegative extended real in `[0, ∞]`.
///
/// Negative values and NaN are not representable; construction goes through
/// [`ExtReal::from_f64`] or [`ExtReal::finite`]. Finite values compare by
/// magnitude and `∞` compares strictly greater than every finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(Repr);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(Repr::Finite(0.0));
    pub const ONE: ExtReal = ExtReal(Repr::Finite(1.0));
    pub const INFINITY: ExtReal = ExtReal(Repr::Inf);

    /// Converts an `f64`, mapping `+∞` to the tagged infinity.
    /// Returns `None` for NaN or negative input.
    pub fn from_f64(v: f64) -> Option<ExtReal> {
        if v.is_nan() || v < 0.0 {
            None
        } else if v.is_infinite() {
            Some(ExtReal::INFINITY)
        } else {
            Some(ExtReal(Repr::Finite(v)))
        }
    }

    /// Wraps a finite nonnegative value.
    ///
    /// Panics if `v` is negative, NaN or infinite; use [`ExtReal::from_f64`]
    /// for fallible conversion.
    pub fn finite(v: f64) -> ExtReal {
        assert!(
            v.is_finite() && v >= 0.0,
            "ExtReal::finite requires a finite nonnegative value, got {v}"
        );
        ExtReal(Repr::Finite(v))
    }

    pub fn is_finite(self) -> bool {
        matches!(self.0, Repr::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self.0, Repr::Inf)
    }

    /// The finite payload, or `None` for `∞`.
    pub fn finite_value(self) -> Option<f64> {
        match self.0 {
            Repr::Finite(v) => Some(v),
            Repr::Inf => None,
        }
    }

    /// Collapses to `f64`, with `∞` becoming `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self.0 {
            Repr::Finite(v) => v,
            Repr::Inf => f64::INFINITY,
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Clamps a finite arithmetic result back into the invariant: overflow to
    /// `f64::INFINITY` becomes the tagged infinity.
    fn from_finite_op(v: f64) -> ExtReal {
        debug_assert!(!v.is_nan() && v >= 0.0);
        if v.is_finite() {
            ExtReal(Repr::Finite(v))
        } else {
            ExtReal::INFINITY
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (Repr::Inf, Repr::Inf) => Ordering::Equal,
            (Repr::Inf, Repr::Finite(_)) => Ordering::Greater,
            (Repr::Finite(_), Repr::Inf) => Ordering::Less,
            // Neither side can be NaN.
            (Repr::Finite(a), Repr::Finite(b)) => a.partial_cmp(&b).unwrap(),
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self.0, rhs.0) {
            (Repr::Finite(a), Repr::Finite(b)) => ExtReal::from_finite_op(a + b),
            _ => ExtReal::INFINITY,
        }
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;

    /// Extended product with `0·∞ := 0`.
    fn mul(self, rhs: ExtReal) -> ExtReal {
        match (self.0, rhs.0) {
            (Repr::Finite(a), Repr::Finite(b)) => ExtReal::from_finite_op(a * b),
            (Repr::Finite(0.0), Repr::Inf) | (Repr::Inf, Repr::Finite(0.0)) => ExtReal::ZERO,
            _ => ExtReal::INFINITY,
        }
    }
}

impl Div for ExtReal {
    type Output = ExtReal;

    /// Extended quotient with `0/0 := 0`, `a/0 := ∞` for `a > 0`,
    /// `a/∞ := 0` for finite `a`, and `∞/b := ∞`.
    fn div(self, rhs: ExtReal) -> ExtReal {
        match (self.0, rhs.0) {
            (Repr::Finite(0.0), Repr::Finite(0.0)) => ExtReal::ZERO,
            (Repr::Finite(_), Repr::Finite(0.0)) => ExtReal::INFINITY,
            (Repr::Finite(a), Repr::Finite(b)) => ExtReal::from_finite_op(a / b),
            (Repr::Finite(_), Repr::Inf) => ExtReal::ZERO,
            (Repr::Inf, _) => ExtReal::INFINITY,
        }
    }
}

impl Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, |acc, v| acc + v)
    }
}

/// Utility contribution of never jumping again: `e^{-Q}·e^{C}` for the total
/// exit-rate mass `Q = ∫₀^∞ q ds` and total cost mass `C = ∫₀^∞ c ds`.
///
/// With `Q = ∞` the factor `e^{-Q}` vanishes and kills the term regardless of
/// `C` (the product is read through `0·∞ := 0`); with finite `Q` and `C = ∞`
/// the term is `∞`; otherwise it is `e^{C-Q}`.
pub fn no_jump_term(q_total: ExtReal, c_total: ExtReal) -> ExtReal {
    match (q_total.0, c_total.0) {
        (Repr::Inf, _) => ExtReal::ZERO,
        (Repr::Finite(_), Repr::Inf) => ExtReal::INFINITY,
        (Repr::Finite(q), Repr::Finite(c)) => ExtReal::from_finite_op((c - q).exp()),
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            // {:?} renders the shortest decimal that round-trips.
            Repr::Finite(v) => write!(f, "{v:?}"),
            Repr::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Repr::Finite(v) => serializer.serialize_f64(v),
            Repr::Inf => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<ExtReal, D::Error> {
        struct ExtRealVisitor;

        impl Visitor<'_> for ExtRealVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtReal, E> {
                ExtReal::from_f64(v)
                    .ok_or_else(|| E::custom(format!("expected a nonnegative number, got {v}")))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtReal, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtReal, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<ExtReal, E> {
                if s == "inf" {
                    Ok(ExtReal::INFINITY)
                } else {
                    Err(E::custom(format!(
                        "expected \"inf\" or a nonnegative number, got {s:?}"
                    )))
                }
            }
        }

        deserializer.deserialize_any(ExtRealVisitor)
    }
}
