//! Rectangular evaluation grids and tabular output of primal, transform and
//! bidual values.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ext::{gamma_point, ExtPos, LiftedPoint};
use crate::function::FunctionOracle;
use crate::sets::SCHEMA;
use crate::transform::{bidual, DualHandle, Sense, TransformSettings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!(
                "axis count must be >= 2, got {count}"
            )));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "axis bounds must satisfy lo < hi, got {lo}:{hi}"
            )));
        }
        Ok(Axis { lo, hi, count })
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.lo, self.hi, self.count)
    }
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                lo + step * i as f64
            }
        })
        .collect()
}

/// Axis ranges, one per dimension. Textual form `lo:hi:count[,lo:hi:count]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// All grid points in row-major order (last axis fastest).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let vals: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        let mut out = vec![Vec::new()];
        for v in &vals {
            out = out
                .into_iter()
                .flat_map(|p| {
                    v.iter().map(move |&c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .split(',')
            .map(|part| {
                let bits: Vec<&str> = part.trim().split(':').collect();
                let bad =
                    || Error::InvalidArgument(format!("bad axis `{part}`; expected lo:hi:count"));
                if bits.len() != 3 {
                    return Err(bad());
                }
                let lo: f64 = bits[0].trim().parse().map_err(|_| bad())?;
                let hi: f64 = bits[1].trim().parse().map_err(|_| bad())?;
                let count: usize = bits[2].trim().parse().map_err(|_| bad())?;
                Axis::new(lo, hi, count)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridSpec { axes })
    }
}

/// Which column groups to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Emit {
    pub primal: bool,
    pub upper: bool,
    pub lower: bool,
    pub bidual: bool,
    /// Image `Γ(x, f(x))` of each graph point.
    pub graph: bool,
}

impl FromStr for Emit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut e = Emit::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match item {
                "primal" => e.primal = true,
                "dual" | "upper" => e.upper = true,
                "lower" => e.lower = true,
                "bidual" => e.bidual = true,
                "graph" => e.graph = true,
                other => {
                    return Err(Error::InvalidArgument(format!(
                    "unknown column group `{other}` (expected primal, dual, lower, bidual, graph)"
                )))
                }
            }
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Real(f64),
    Ext(ExtPos),
}

impl Cell {
    fn csv(&self, out: &mut String) {
        match self {
            Cell::Real(v) if v.is_nan() => out.push_str("nan"),
            Cell::Real(v) if v.is_infinite() => out.push_str("inf"),
            Cell::Real(v) => {
                let _ = write!(out, "{v:.16e}");
            }
            Cell::Ext(ExtPos::Zero) => out.push('0'),
            Cell::Ext(ExtPos::Infinity) => out.push_str("inf"),
            Cell::Ext(e) => {
                let _ = write!(out, "{:.16e}", e.value());
            }
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(v) if v.is_nan() => Value::Null,
            Cell::Real(v) if v.is_infinite() => json!("inf"),
            Cell::Real(v) => json!(v),
            Cell::Ext(e) => serde_json::to_value(e).unwrap_or(Value::Null),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Cell::Real(v) => *v,
            Cell::Ext(e) => e.value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].value()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({
            "schema": SCHEMA,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_string_pretty(&doc).expect("tables always serialize")
    }
}

/// Evaluates the requested column groups on every grid point. Rows are
/// computed in parallel and returned in grid order.
pub fn tabulate(
    f: &FunctionOracle,
    spec: &GridSpec,
    emit: Emit,
    settings: &TransformSettings,
) -> Result<Table> {
    if spec.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: spec.dim(),
        });
    }
    let n = f.dim();
    let mut columns: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    if emit.primal {
        columns.push("f".into());
    }
    if emit.upper {
        columns.push("f_upper".into());
    }
    if emit.lower {
        columns.push("f_lower".into());
    }
    if emit.bidual {
        columns.push("f_bidual".into());
        columns.push("residual".into());
    }
    if emit.graph {
        columns.extend((0..n).map(|i| format!("graph_y{i}")));
        columns.push("graph_v".into());
    }
    let upper = DualHandle::new(f.clone(), Sense::Upper, *settings)?;
    let lower = DualHandle::new(f.clone(), Sense::Lower, *settings)?;
    let bd = bidual(f, settings)?;

    let rows = spec
        .points()
        .par_iter()
        .map(|x| -> Result<Vec<Cell>> {
            let mut row: Vec<Cell> = x.iter().map(|&c| Cell::Real(c)).collect();
            let fx = f.eval(x)?;
            if emit.primal {
                row.push(Cell::Ext(fx));
            }
            if emit.upper {
                row.push(Cell::Ext(upper.value(x)?));
            }
            if emit.lower {
                row.push(Cell::Ext(lower.value(x)?));
            }
            if emit.bidual {
                let b = bd.value(x)?;
                row.push(Cell::Ext(b));
                row.push(Cell::Real(b.distance(fx)));
            }
            if emit.graph {
                match fx.as_finite() {
                    Some(u) => {
                        let p = gamma_point(&LiftedPoint::new(x.clone(), u)?)?;
                        row.extend(p.x.into_iter().map(Cell::Real));
                        row.push(Cell::Real(p.u));
                    }
                    None => row.extend((0..=n).map(|_| Cell::Real(f64::NAN))),
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table { columns, rows })
}
