//! Closed probability intervals.

use std::fmt;

use crate::error::CoreError;

/// A closed subinterval `[lo, hi]` of `[0, 1]`.
///
/// Intervals produced by the inference calculus may be *empty* (`lo > hi`);
/// an empty interval is how a derivation reports that its premises cannot
/// all hold. Such values are built with [`ProbInterval::raw`] and are never
/// accepted as user input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbInterval {
    lo: f64,
    hi: f64,
}

impl ProbInterval {
    /// `[0, 1]`, the identity of [`meet`](Self::meet).
    pub const UNIT: ProbInterval = ProbInterval { lo: 0.0, hi: 1.0 };
    pub const ZERO: ProbInterval = ProbInterval { lo: 0.0, hi: 0.0 };
    pub const ONE: ProbInterval = ProbInterval { lo: 1.0, hi: 1.0 };

    /// A valid interval: `0 <= lo <= hi <= 1`.
    pub fn new(lo: f64, hi: f64) -> Result<Self, CoreError> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 1.0 {
            return Err(CoreError::OutOfRange { lo, hi });
        }
        if lo > hi {
            return Err(CoreError::IntervalOrder { lo, hi });
        }
        Ok(ProbInterval { lo: lo + 0.0, hi: hi + 0.0 })
    }

    pub fn point(p: f64) -> Result<Self, CoreError> {
        Self::new(p, p)
    }

    /// Builds an interval without validation. Used for derived bounds, which
    /// may be empty.
    pub fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(!lo.is_nan() && !hi.is_nan(), "NaN bound [{lo}, {hi}]");
        ProbInterval { lo, hi }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_unit(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 1.0
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Componentwise intersection: `[max(lo), min(hi)]`. The result is empty
    /// when the inputs are disjoint.
    pub fn meet(&self, other: &ProbInterval) -> ProbInterval {
        ProbInterval { lo: self.lo.max(other.lo), hi: self.hi.min(other.hi) }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }

    /// Set containment for nonempty intervals.
    pub fn is_subset_of(&self, other: &ProbInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

/// Free-function form of [`ProbInterval::meet`].
pub fn interval_meet(p: &ProbInterval, q: &ProbInterval) -> ProbInterval {
    p.meet(q)
}

/// Shortest decimal text that parses back to exactly `p`.
pub fn format_prob(p: f64) -> String {
    // normalizes -0
    let p = p + 0.0;
    format!("{p}")
}

impl fmt::Display for ProbInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_prob(self.lo), format_prob(self.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> ProbInterval {
        ProbInterval::new(lo, hi).unwrap()
    }

    #[test]
    fn meet_examples() {
        assert_eq!(iv(0.2, 0.8).meet(&iv(0.5, 0.9)), iv(0.5, 0.8));
        assert_eq!(iv(0.3, 0.7).meet(&iv(0.3, 0.7)), iv(0.3, 0.7));
        assert!(iv(0.1, 0.3).meet(&iv(0.5, 0.9)).is_empty());
    }

    #[test]
    fn validation() {
        assert!(matches!(ProbInterval::new(0.5, 0.2), Err(CoreError::IntervalOrder { .. })));
        assert!(matches!(ProbInterval::new(-0.1, 0.2), Err(CoreError::OutOfRange { .. })));
        assert!(matches!(ProbInterval::new(0.1, 1.2), Err(CoreError::OutOfRange { .. })));
        assert!(ProbInterval::new(f64::NAN, 0.2).is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(iv(0.0, 0.625).to_string(), "[0, 0.625]");
        assert_eq!(iv(0.0, 1.0).to_string(), "[0, 1]");
        assert_eq!(ProbInterval::raw(-0.0, 1e-7).to_string(), "[0, 0.0000001]");
    }

    fn interval() -> impl Strategy<Value = ProbInterval> {
        (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(a, b)| iv(a.min(b), a.max(b)))
    }

    proptest! {
        #[test]
        fn meet_is_a_semilattice(p in interval(), q in interval(), r in interval()) {
            prop_assert_eq!(p.meet(&p), p);
            prop_assert_eq!(p.meet(&q), q.meet(&p));
            prop_assert_eq!(p.meet(&q).meet(&r), p.meet(&q.meet(&r)));
            prop_assert_eq!(p.meet(&ProbInterval::UNIT), p);
        }

        #[test]
        fn meet_is_contained_in_both(p in interval(), q in interval()) {
            let m = p.meet(&q);
            if !m.is_empty() {
                prop_assert!(m.is_subset_of(&p) && m.is_subset_of(&q));
            }
        }

        #[test]
        fn printed_bounds_round_trip(a in 0.0..=1.0f64) {
            prop_assert_eq!(format_prob(a).parse::<f64>().unwrap(), a);
        }
    }
}
