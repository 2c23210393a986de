use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-linear membership function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self> {
        check_ordered(&[a, b, c])?;
        Ok(MembershipFunction::Triangular { a, b, c })
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        check_ordered(&[a, b, c, d])?;
        Ok(MembershipFunction::Trapezoidal { a, b, c, d })
    }

    /// Degree of membership of `x`, always in [0, 1].
    pub fn degree(&self, x: f64) -> f64 {
        match *self {
            MembershipFunction::Triangular { a, b, c } => ramp(x, a, b, b, c),
            MembershipFunction::Trapezoidal { a, b, c, d } => ramp(x, a, b, c, d),
        }
    }

    /// Closure of the set where the degree is positive.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            MembershipFunction::Triangular { a, c, .. } => (a, c),
            MembershipFunction::Trapezoidal { a, d, .. } => (a, d),
        }
    }

    /// Interval where the degree is 1.
    pub fn core(&self) -> (f64, f64) {
        match *self {
            MembershipFunction::Triangular { b, .. } => (b, b),
            MembershipFunction::Trapezoidal { b, c, .. } => (b, c),
        }
    }
}

pub fn membership(mf: &MembershipFunction, x: f64) -> f64 {
    mf.degree(x)
}

fn check_ordered(params: &[f64]) -> Result<()> {
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidMembership(format!("non-finite parameter in {params:?}")));
    }
    if params.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidMembership(format!("parameters must be non-decreasing, got {params:?}")));
    }
    if params[0] == params[params.len() - 1] {
        return Err(Error::InvalidMembership(format!("zero-width support {params:?}")));
    }
    Ok(())
}

// Rising edge a..b, plateau b..c, falling edge c..d. Degenerate edges
// (a == b or c == d) are vertical, so the plateau value wins.
fn ramp(x: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    if x < a || x > d {
        0.0
    } else if x >= b && x <= c {
        1.0
    } else if x < b {
        (x - a) / (b - a)
    } else {
        (d - x) / (d - c)
    }
}
