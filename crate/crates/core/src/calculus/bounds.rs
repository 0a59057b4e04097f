//! Interval kernels of the inference rules.
//!
//! Each function takes the premise intervals and returns the concluded
//! interval. Results may be empty (`lo > hi`) when the premises are jointly
//! impossible; callers decide what to do with that. Case guards compare the
//! stored values exactly.

use super::CalculusError;
use crate::interval::ProbInterval;

/// `A -> F C : x`, `A -> !F C : y` gives `A -> C : [x1 + y1, min(1, x2 + y2)]`.
pub fn chain_complementary(x: ProbInterval, y: ProbInterval) -> ProbInterval {
    ProbInterval::raw(x.lo() + y.lo(), (x.hi() + y.hi()).min(1.0))
}

/// `A -> B C : x` gives `A -> C : [x1, 1]`.
pub fn chain_weaken(x: ProbInterval) -> ProbInterval {
    ProbInterval::raw(x.lo(), 1.0)
}

/// `A -> B : x` with `x1 > 0` and `A -> B C : y` give
/// `A B -> C : [y1 / x2, min(1, y2 / x1)]`.
pub fn conjunction_left(x: ProbInterval, y: ProbInterval) -> Result<ProbInterval, CalculusError> {
    if x.lo() <= 0.0 {
        return Err(CalculusError::Precondition("conjunction left needs a positive lower bound on P(B|A)"));
    }
    Ok(ProbInterval::raw(y.lo() / x.hi(), (y.hi() / x.lo()).min(1.0)))
}

/// `A -> B : x` and `A B -> C : y` give `A -> B C : [x1 y1, x2 y2]`.
pub fn conjunction_right(x: ProbInterval, y: ProbInterval) -> ProbInterval {
    ProbInterval::raw(x.lo() * y.lo(), x.hi() * y.hi())
}

/// `v` bounds `P(A|B)` with `v1 > 0`, `B -> C : y`; concludes
/// `A B -> C : [max(0, (v1 + y1 - 1) / v1), min(1, y2 / v1)]`.
pub fn weak_conjunction_left(
    v: ProbInterval,
    y: ProbInterval,
) -> Result<ProbInterval, CalculusError> {
    let v1 = v.lo();
    if v1 <= 0.0 {
        return Err(CalculusError::Precondition("weak conjunction left needs a positive lower bound on P(A|B)"));
    }
    Ok(ProbInterval::raw(((v1 + y.lo() - 1.0) / v1).max(0.0), (y.hi() / v1).min(1.0)))
}

/// `A -> B : x` gives `A -> B C : [0, x2]`.
pub fn weak_conjunction_right(x: ProbInterval) -> ProbInterval {
    ProbInterval::raw(0.0, x.hi())
}

/// `A -> B : x` and `B -> C : [y, y]` with `y` either 0 or 1.
pub fn weak_conjunction_right_certain(
    x: ProbInterval,
    y: ProbInterval,
) -> Result<ProbInterval, CalculusError> {
    if y == ProbInterval::ZERO {
        Ok(ProbInterval::ZERO)
    } else if y == ProbInterval::ONE {
        Ok(x)
    } else {
        Err(CalculusError::Precondition("weak conjunction right needs B -> C with bounds [0, 0] or [1, 1]"))
    }
}

/// `A -> F : x` gives `A -> !F : [1 - x2, 1 - x1]`.
pub fn negate(x: ProbInterval) -> ProbInterval {
    ProbInterval::raw(1.0 - x.hi(), 1.0 - x.lo())
}

/// `A -> C : x` and `A -> F C : y` give `A -> !F C : [max(0, x1 - y2), x2 - y1]`.
pub fn conjunction_right_negation(x: ProbInterval, y: ProbInterval) -> ProbInterval {
    ProbInterval::raw((x.lo() - y.hi()).max(0.0), x.hi() - y.lo())
}

/// `A <-> F` (`u` forward, `v` backward) and `F <-> C` (`x` forward, `y`
/// backward), with `v1 > 0` and `y1 > 0`, give
/// `A -> !F C : [0, min(1, (1 - y1) u2 x2 / (v1 y1))]`.
pub fn weak_conjunction_right_negation(
    u: ProbInterval,
    v: ProbInterval,
    x: ProbInterval,
    y: ProbInterval,
) -> Result<ProbInterval, CalculusError> {
    let (v1, y1) = (v.lo(), y.lo());
    if v1 <= 0.0 || y1 <= 0.0 {
        return Err(CalculusError::Precondition(
            "weak conjunction right with negation needs positive lower bounds on P(A|F) and P(F|C)",
        ));
    }
    let upper = (1.0 - y1) * (u.hi() * x.hi()) / (v1 * y1);
    Ok(ProbInterval::raw(0.0, upper.min(1.0)))
}

/// Rule chaining over `A <-> B <-> C`: `u = P(B|A)`, `v = P(A|B)`,
/// `x = P(C|B)`, `y = P(B|C)`. Sound but not always the tightest bound.
pub fn rule_chaining(
    u: ProbInterval,
    v: ProbInterval,
    x: ProbInterval,
    y: ProbInterval,
) -> ProbInterval {
    let (u1, u2, v1, x1, x2, y1) = (u.lo(), u.hi(), v.lo(), x.lo(), x.hi(), y.lo());
    let z1 = if v1 > 0.0 {
        u1 / v1 * (v1 + x1 - 1.0).max(0.0)
    } else if x1 == 1.0 {
        u1
    } else {
        0.0
    };
    let z2 = if v1 > 0.0 && y1 > 0.0 {
        let tau = u2 * x2 / (v1 * y1);
        min_of(&[1.0, u2 + tau * (1.0 - y1), 1.0 - u1 + tau * y1, tau])
    } else if v1 > 0.0 {
        (1.0 - u1 + u2 * x2 / v1).min(1.0)
    } else if x2 == 0.0 {
        1.0 - u1
    } else {
        1.0
    };
    ProbInterval::raw(z1, z2)
}

/// Result of precise rule chaining, with the case numbers that produced
/// each bound (lower: 1 to 3, upper: 4 to 8).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainingBounds {
    pub bounds: ProbInterval,
    pub lower_case: u8,
    pub upper_case: u8,
}

/// Tightest bounds on `P(C|A)` given `u = P(B|A)`, `v = P(A|B)`,
/// `x = P(C|B)`, `y = P(B|C)`.
///
/// The upper bound in the generic case (`v1 > 0`, `y1 > 0`) is the min of the
/// linear terms in `u` plus the value at their crossing point
/// `x2 / (y1 (v1 - x2) + x2)`; the remaining cases cover zero lower bounds on
/// `v` and `y`, where the generic formula is undefined.
pub fn precise_rule_chaining(
    u: ProbInterval,
    v: ProbInterval,
    x: ProbInterval,
    y: ProbInterval,
) -> ChainingBounds {
    let (u1, u2, v1, x1, x2, y1) = (u.lo(), u.hi(), v.lo(), x.lo(), x.hi(), y.lo());
    // Case 1 equals max(0, u1 (1 - (1 - x1) / v1)); written in the plain
    // chaining form so the two lower bounds agree bit for bit.
    let (z1, lower_case) = if v1 > 0.0 {
        (u1 / v1 * (v1 + x1 - 1.0).max(0.0), 1)
    } else if x1 == 1.0 {
        (u1, 2)
    } else {
        (0.0, 3)
    };
    // The upper cases 4 and 5 take the minimum together with the plain
    // chaining terms. Those terms are never smaller in exact arithmetic, so
    // the value is unchanged, but the rounded result can then never exceed
    // the plain chaining bound.
    let (z2, upper_case) = if v1 > 0.0 && y1 > 0.0 {
        let tau = u2 * x2 / (v1 * y1);
        let terms = [
            1.0,
            tau,
            // u2 (1 - x2 / v1 (1 - 1 / y1))
            u2 + tau * (1.0 - y1),
            1.0 - u1 * (1.0 - x2 / v1),
            1.0 - u1 + tau * y1,
            // denominator equals v1 y1 + x2 (1 - y1) > 0
            x2 / (y1 * (v1 - x2) + x2),
        ];
        (min_of(&terms), 4)
    } else if v1 > 0.0 {
        let plain = 1.0 - u1 + u2 * x2 / v1;
        (min_of(&[1.0, 1.0 - u1 * (1.0 - x2 / v1), plain]), 5)
    } else if x2 == 0.0 {
        (1.0 - u1, 6)
    } else if y1 == 1.0 {
        (u2, 7)
    } else {
        (1.0, 8)
    };
    ChainingBounds { bounds: ProbInterval::raw(z1, z2), lower_case, upper_case }
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Point chaining under `I(A,B,C)` and `I(A,!B,C)`: returns
/// `w = P(C|A) = u x + (1 - u) y` and, when `w > 0`, `z = P(B|A C) = u x / w`.
pub fn rci_point(u: f64, x: f64, y: f64) -> (f64, Option<f64>) {
    let w = u * x + (1.0 - u) * y;
    let z = (w > 0.0).then(|| u * x / w);
    (w, z)
}

/// Tightest bounds on `P(C|A)` from `u = P(B|A)`, `x = P(C|B)`, `y = P(C|!B)`
/// under `I(A,B,C)` and `I(A,!B,C)`. The mixture `u x + (1 - u) y` is linear
/// in each variable, so the extremes sit at box vertices.
pub fn prci_forward(u: ProbInterval, x: ProbInterval, y: ProbInterval) -> ProbInterval {
    let mix = |u: f64, x: f64, y: f64| u * x + (1.0 - u) * y;
    let z1 = if x.lo() > y.lo() {
        mix(u.lo(), x.lo(), y.lo())
    } else {
        mix(u.hi(), x.lo(), y.lo())
    };
    let z2 = if x.hi() > y.hi() {
        mix(u.hi(), x.hi(), y.hi())
    } else {
        mix(u.lo(), x.hi(), y.hi())
    };
    ProbInterval::raw(z1, z2)
}

/// Tightest bounds on `P(B|A C)` under the premises of [`prci_forward`].
/// Needs `x1 > 0` or `y1 > 0` so that `P(A C) > 0`.
///
/// `u x / (u x + (1 - u) y)` increases in `u` and `x` and decreases in `y`.
/// The two documented special cases resolve `0/0` at the box corner; the
/// other zero-denominator corners (`u1 = 1` with `x1 = 0`, `u2 = 0` with
/// `y1 = 0`) are excluded by the independence premises, which force
/// `0 < P(B|A) < 1`, and get their one-sided limits.
pub fn prci_update(
    u: ProbInterval,
    x: ProbInterval,
    y: ProbInterval,
) -> Result<ProbInterval, CalculusError> {
    if x.lo() <= 0.0 && y.lo() <= 0.0 {
        return Err(CalculusError::Precondition("chaining update needs x1 > 0 or y1 > 0"));
    }
    let ratio = |u: f64, x: f64, y: f64, limit: f64| {
        let num = u * x;
        let den = num + (1.0 - u) * y;
        if den > 0.0 {
            num / den
        } else {
            limit
        }
    };
    let z1 = if u.lo() == 0.0 && y.hi() == 0.0 {
        1.0
    } else {
        ratio(u.lo(), x.lo(), y.hi(), 0.0)
    };
    let z2 = if u.hi() == 1.0 && x.hi() == 0.0 {
        0.0
    } else {
        ratio(u.hi(), x.hi(), y.lo(), 1.0)
    };
    Ok(ProbInterval::raw(z1, z2))
}
