//! Weak values `⟨f|U A|in⟩ / ⟨f|U|in⟩` and zero detection.
//!
//! A projector weak value is read as "the system was in this channel" when
//! nonzero and "it was not" when zero. Zero-ness is decided on the
//! numerator, which is what drives the meter, so the verdict stays
//! well-defined even when the denominator is small.

use crate::error::{Error, Result};
use crate::expr::evaluate_str;
use crate::linalg::{Amplitude, Operator, SCALAR_TOL};
use crate::scenario::Scenario;

/// Absolute tolerance on `|⟨f|U A|in⟩|` below which a weak value is zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Below this `|⟨f|U|in⟩|` no weak value is defined.
pub const POLE_TOL: f64 = 1e-12;
/// Below this `|⟨f|U|in⟩|` the value is flagged as near a pole. Such weak
/// values may not be representative of a meter reading.
pub const NEAR_POLE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValue {
    pub value: Amplitude,
    pub numerator: Amplitude,
    pub denominator: Amplitude,
    pub is_zero: bool,
    pub near_pole: bool,
}

impl WeakValue {
    fn from_parts(numerator: Amplitude, denominator: Amplitude) -> Result<Self> {
        if denominator.norm() <= POLE_TOL {
            return Err(Error::VanishingOverlap);
        }
        Ok(WeakValue {
            value: numerator / denominator,
            numerator,
            denominator,
            is_zero: numerator.norm() <= ZERO_TOL,
            near_pole: denominator.norm() < NEAR_POLE,
        })
    }
}

pub fn weak_value(s: &Scenario, a: &Operator) -> Result<WeakValue> {
    if a.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: a.dim(),
        });
    }
    WeakValue::from_parts(s.transition(a)?, s.overlap())
}

/// Parse `text` over the scenario's channels and take its weak value.
pub fn weak_value_expr(s: &Scenario, text: &str) -> Result<WeakValue> {
    let op = evaluate_str(text, s.channels())?;
    weak_value(s, &op)
}

/// True when two weak values agree to [`SCALAR_TOL`].
pub fn approx_eq(a: Amplitude, b: Amplitude) -> bool {
    (a - b).norm() <= SCALAR_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};
    use crate::scenario::catalog;

    fn wv(name: &str, e: &str) -> WeakValue {
        weak_value_expr(&catalog(name).unwrap(), e).unwrap()
    }

    #[test]
    fn pigeonhole_pair_values() {
        assert!(approx_eq(wv("pigeonhole2", "L1*L2").value, c(0.0, 0.5)));
        assert!(approx_eq(wv("pigeonhole2", "R1*R2").value, c(0.0, -0.5)));
        let same = wv("pigeonhole2", "same12");
        assert!(same.is_zero);
        assert!(!same.near_pole);
        assert!(wv("pigeonhole2", "L1*L2 + R1*R2").is_zero);
        assert!(!wv("pigeonhole2", "L1*L2").is_zero);
    }

    #[test]
    fn pigeonhole_triple() {
        let t = wv("pigeonhole3", "same123");
        assert!(approx_eq(t.numerator, c(0.125, 0.125)));
        assert!(approx_eq(t.denominator, c(-0.25, -0.25)));
        assert!(approx_eq(t.value, c(-0.5, 0.0)));
    }

    #[test]
    fn hardy_values() {
        assert!(approx_eq(wv("hardy", "NpIe").value, ONE));
        assert!(approx_eq(wv("hardy", "IpNe").value, ONE));
        assert!(approx_eq(wv("hardy", "NpNe").value, -ONE));
        assert!(wv("hardy", "Np").is_zero);
        assert!(wv("hardy", "Ne").is_zero);
        assert!(wv("hardy", "Ip*Ie").is_zero);
        assert!(approx_eq(wv("hardy", "Ip").value, ONE));
        assert!(approx_eq(wv("hardy", "Ie").value, ONE));
    }

    #[test]
    fn three_box_values() {
        assert!(approx_eq(wv("three-box", "A").value, ONE));
        assert!(approx_eq(wv("three-box", "C").value, -ONE));
        assert!(wv("three-box", "A + C").is_zero);
        assert!(approx_eq(wv("three-box", "A + B").value, c(2.0, 0.0)));
    }

    #[test]
    fn identity_weak_value_is_one() {
        for name in crate::scenario::CATALOG {
            let s = catalog(name).unwrap();
            let w = weak_value(&s, &Operator::identity(s.dim())).unwrap();
            assert!(approx_eq(w.value, ONE), "{name}");
        }
    }

    #[test]
    fn vanishing_overlap_and_pole_flag() {
        assert_eq!(
            WeakValue::from_parts(ONE, c(1e-13, 0.0)).unwrap_err(),
            Error::VanishingOverlap
        );
        let w = WeakValue::from_parts(ONE, c(1e-8, 0.0)).unwrap();
        assert!(w.near_pole);
        assert!(!w.is_zero);
    }

    #[test]
    fn errors_propagate_from_expressions() {
        let s = catalog("three-box").unwrap();
        assert!(matches!(weak_value_expr(&s, "A +"), Err(Error::Parse(_))));
        assert_eq!(weak_value_expr(&s, "D").unwrap_err(), Error::UnboundName("D".into()));
        assert!(matches!(
            weak_value(&s, &Operator::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
