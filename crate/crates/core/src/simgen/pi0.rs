//! Piecewise null-probability curve used by the first simulation scenario.

use crate::error::{Error, Result};

const A1: f64 = 1.2;
const A2: f64 = -0.2;

/// Null probability as a function of the reduced covariate `x* in [0, 1]`.
///
/// A flat plateau at 1 for `x* <= 0.5`, a parabolic crest over (0.5, 0.7),
/// and a decaying right tail past 0.7, combined as `f1 + 1.5 f2 + 0.9 f3`
/// and clamped into `[0, 1]`. The branch knots make the curve continuous.
pub fn pi0_fn(xstar: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xstar) || xstar.is_nan() {
        return Err(Error::Domain(format!(
            "x* must lie in [0, 1], got {xstar}"
        )));
    }
    let a = 4.0 / ((A1 - A2) * (A1 - A2));

    let f1 = if xstar <= (A1 + A2) / 2.0 {
        1.0
    } else if xstar < 0.7 {
        -a * (xstar - A1) * (xstar - A2)
    } else {
        -a * (0.7 - A1) * (0.7 - A2)
    };

    let f2 = if xstar >= 0.7 {
        -2.5 * (xstar - 0.7) * (xstar - 0.7)
    } else {
        0.0
    };

    let f3 = if xstar <= 0.1 {
        0.0
    } else if xstar < 0.7 {
        -(xstar - 0.1) * (xstar - 0.1)
    } else {
        -0.36
    };

    Ok((f1 + 1.5 * f2 + 0.9 * f3).clamp(0.0, 1.0))
}
