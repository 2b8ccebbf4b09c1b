use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

/// A value in `]-inf, +inf]`.
///
/// `+inf` is a distinct state rather than `f64::INFINITY`, so reductions never
/// see NaN from `inf - inf`. `-inf` cannot be represented; constructors that
/// would produce it return [`Error::NegativeInfinity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

pub use ExtReal::{Finite, PosInf};

impl ExtReal {
    pub const ZERO: ExtReal = Finite(0.0);

    /// Wraps a float, rejecting NaN and `-inf`. `+inf` maps to [`PosInf`].
    pub fn from_f64(v: f64, context: &str) -> Result<Self> {
        if v.is_nan() {
            return Err(Error::Invalid(format!("NaN in {context}")));
        }
        if v == f64::NEG_INFINITY {
            return Err(Error::NegativeInfinity {
                point: String::from("?"),
                context: context.to_string(),
            });
        }
        if v == f64::INFINITY {
            return Ok(PosInf);
        }
        Ok(Finite(v))
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(v) => Some(v),
            PosInf => None,
        }
    }

    /// `self - r`; `+inf` absorbs.
    pub fn sub_real(self, r: f64) -> ExtReal {
        match self {
            Finite(v) => Finite(v - r),
            PosInf => PosInf,
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Difference `self - other` where `other` is finite. Returns `None` when
    /// `other` is `+inf`.
    pub fn minus(self, other: ExtReal) -> Option<ExtReal> {
        match (self, other) {
            (_, PosInf) => None,
            (PosInf, Finite(_)) => Some(PosInf),
            (Finite(a), Finite(b)) => Some(Finite(a - b)),
        }
    }

    /// Fixed 17-significant-digit rendering used by all reports.
    pub fn render(self) -> String {
        match self {
            Finite(v) => fmt_f64(v),
            PosInf => String::from("inf"),
        }
    }
}

/// 17 significant digits, scientific notation. `-0` prints as `0`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return String::from("0.0000000000000000e0");
    }
    format!("{v:.16e}")
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        match self {
            Finite(a) => Finite(a + rhs),
            PosInf => PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), PosInf) => Some(Ordering::Less),
            (PosInf, Finite(_)) => Some(Ordering::Greater),
            (PosInf, PosInf) => Some(Ordering::Equal),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        debug_assert!(!v.is_nan() && v != f64::NEG_INFINITY);
        if v == f64::INFINITY {
            PosInf
        } else {
            Finite(v)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
