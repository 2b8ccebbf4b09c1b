//! Scenario file format (TOML).

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;

/// A rational literal: an integer or a string such as `"-3/4"` or `"0.25"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Str(String),
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Int(v) => write!(f, "{v}"),
            Num::Str(s) => f.write_str(s),
        }
    }
}

/// Either one value broadcast to every axis or one value per axis.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PerAxis {
    One(Num),
    Many(Vec<Num>),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub grids: BTreeMap<String, GridSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionSpec>,
    #[serde(default)]
    pub setups: BTreeMap<String, SetupSpec>,
    #[serde(default)]
    pub ranges: BTreeMap<String, RangeSpec>,
    #[serde(default)]
    pub reprs: BTreeMap<String, ReprSpec>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

/// A lattice box `lo..=hi` with spacing `step` (origin 0), or a product of
/// named grids.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: Option<usize>,
    pub lo: Option<PerAxis>,
    pub hi: Option<PerAxis>,
    pub step: Option<PerAxis>,
    pub product: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub rows: Option<Vec<Vec<Num>>>,
    pub identity: Option<usize>,
    pub scalar: Option<Num>,
    pub dim: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub grid: String,
    pub expr: Expr,
}

/// Polytope given by vertices or as a box.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolySpec {
    pub vertices: Option<Vec<Vec<Num>>>,
    pub lo: Option<Vec<Num>>,
    pub hi: Option<Vec<Num>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Expr {
    /// `xᵀQx + lᵀx + c`.
    Quadratic {
        q: Vec<Vec<Num>>,
        l: Option<Vec<Num>>,
        c: Option<Num>,
    },
    /// `scale · sum_i |x_i - center_i|`.
    Abs { scale: Option<Num>, center: Option<Vec<Num>> },
    Indicator(PolySpec),
    /// Indicator of a finite point set.
    Points(Vec<Vec<Num>>),
    Support(PolySpec),
    /// `max_j <a_j, x> + b_j`.
    MaxAffine { slopes: Vec<Vec<Num>>, offsets: Option<Vec<Num>> },
    /// `<x, x*>` on a grid over `E×E*`.
    Pairing {},
    Sum(Vec<Expr>),
    Scale { by: Num, of: Box<Expr> },
    /// Row-major samples; the string `"inf"` marks `+inf`.
    Values(Vec<Num>),
    Example6 { k: PolySpec, ystar: Vec<Num> },
    Example7 { y: Vec<Num>, k: PolySpec },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DualsSpec {
    /// `"bracketing"`: primal lattices widened to the slope brackets.
    Auto(String),
    Named { x: String, u: String, y: String, v: String },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SetupSpec {
    /// `general` (default), `sum` or `parallel`.
    pub form: Option<String>,
    pub f: String,
    pub g: String,
    pub x_dim: usize,
    pub y_dim: usize,
    pub a: Option<String>,
    pub b: Option<String>,
    pub duals: DualsSpec,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub k: String,
    pub w_dim: usize,
    pub c: String,
    pub d: String,
    pub x_grid: String,
    pub u_grid: String,
    pub x_dual: String,
    pub u_dual: String,
    pub k_dual: String,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReprSpec {
    /// `sampled`, `separable`, `example6` or `example7`.
    pub kind: String,
    pub function: Option<String>,
    pub grid: Option<String>,
    pub dual: Option<String>,
    pub k: Option<PolySpec>,
    pub y: Option<Vec<Num>>,
    pub ystar: Option<Vec<Num>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub x: Vec<Num>,
    pub s: Vec<Num>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub identity: Option<String>,
    pub pairs: Option<Vec<PairSpec>>,
    pub graph_of: Option<String>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    /// `star` (uses `y`) or `space` (uses `ystar`).
    pub kind: String,
    pub c: PolySpec,
    pub y: Option<Vec<Num>>,
    pub ystar: Option<Vec<Num>>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub kind: String,
    pub name: Option<String>,
    pub setup: Option<String>,
    pub range: Option<String>,
    pub repr: Option<String>,
    pub operator: Option<String>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub map: Option<String>,
    pub variant: Option<String>,
    pub grid: Option<String>,
    pub window: Option<String>,
    pub instances: Option<Vec<InstanceSpec>>,
    pub strong: Option<bool>,
    pub exact: Option<bool>,
    pub expect_subspace: Option<bool>,
    pub tolerance: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub points: Option<Vec<PairSpec>>,
    pub generators: Option<Vec<Vec<Num>>>,
    #[serde(rename = "box")]
    pub box_grid: Option<String>,
    pub suite: Option<String>,
    pub cases: Option<usize>,
}

/// A parse failure with a 1-based position.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

pub fn parse(src: &str) -> Result<Scenario, ParseError> {
    toml::from_str(src).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| position(src, s.start));
        ParseError {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_scenario() {
        let s = parse(
            r#"
name = "m"
[grids.P]
lo = -1
hi = 1
[functions.f]
grid = "P"
expr = { abs = { scale = "1/2" } }
"#,
        )
        .unwrap();
        assert_eq!(s.name, "m");
        assert_eq!(s.functions["f"].expr, Expr::Abs { scale: Some(Num::Str("1/2".into())), center: None });
    }

    #[test]
    fn reports_line_and_column() {
        let e = parse("name = \"x\"\n[grids.P]\nlo = -1\nhi = [1,\n").unwrap_err();
        assert!(e.line >= 4, "{e}");
        let e = parse("name = \"x\"\nbogus = 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1), "{e}");
    }
}
