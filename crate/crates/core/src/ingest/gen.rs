use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest generator parameter accepted; keeps labels far from `u32` overflow.
pub const MAX_GEN_N: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocShape {
    /// `r` with children `a_i(b_i(c_i))`; the last `b` also holds a `d`.
    Demo,
    /// `a(a(b_1..b_n), b)`: a recursive `a` over a run of `b` children.
    Suboptimal,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("n must be in 1..={MAX_GEN_N}, got {0}")]
    OutOfRange(usize),
    #[error("unknown document shape '{0}' (expected demo or suboptimal)")]
    UnknownShape(String),
}

impl FromStr for DocShape {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        match s {
            "demo" => Ok(DocShape::Demo),
            "suboptimal" => Ok(DocShape::Suboptimal),
            other => Err(GenError::UnknownShape(other.to_string())),
        }
    }
}

impl fmt::Display for DocShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DocShape::Demo => "demo",
            DocShape::Suboptimal => "suboptimal",
        })
    }
}

pub fn gen_doc(shape: DocShape, n: usize) -> Result<String, GenError> {
    if n == 0 || n > MAX_GEN_N {
        return Err(GenError::OutOfRange(n));
    }
    let mut out = String::new();
    match shape {
        DocShape::Demo => {
            out.reserve(20 * n + 16);
            out.push_str("<r>");
            for _ in 1..n {
                out.push_str("<a><b><c/></b></a>");
            }
            out.push_str("<a><b><c/><d/></b></a></r>");
        }
        DocShape::Suboptimal => {
            out.reserve(4 * n + 24);
            out.push_str("<a><a>");
            for _ in 0..n {
                out.push_str("<b/>");
            }
            out.push_str("</a><b/></a>");
        }
    }
    Ok(out)
}
