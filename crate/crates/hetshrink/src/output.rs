//! CSV and JSON writers. CSV files start with a `#` line naming the schema
//! and the library version; read them with `#` as the comment character.

use std::io::Write;

use hetshrink_core::risk::RiskCurve;
use serde::Serialize;

use crate::commands::BoundRow;

pub const RISK_CURVE_SCHEMA: &str = "hetshrink.risk_curves/1";
pub const BOUNDS_SCHEMA: &str = "hetshrink.bounds/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn header<W: Write>(w: &mut W, schema: &str) -> std::io::Result<()> {
    writeln!(w, "# schema={schema} version={VERSION}")
}

fn csv_err(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

#[derive(Serialize)]
struct CurveRow<'a> {
    estimator: &'a str,
    kind: String,
    eta: f64,
    risk: f64,
    se: f64,
    n_rep: usize,
    seed: u64,
}

/// Columns `estimator, kind, eta, risk, se, n_rep, seed`; one row per
/// grid point.
pub fn write_curves_csv<W: Write>(mut w: W, curves: &[RiskCurve]) -> std::io::Result<()> {
    header(&mut w, RISK_CURVE_SCHEMA)?;
    let mut out = csv::Writer::from_writer(w);
    for c in curves {
        for i in 0..c.eta_grid.len() {
            out.serialize(CurveRow {
                estimator: &c.estimator,
                kind: c.direction_kind.name(),
                eta: c.eta_grid[i],
                risk: c.risk[i],
                se: c.std_err[i],
                n_rep: c.n_rep,
                seed: c.seed,
            })
            .map_err(csv_err)?;
        }
    }
    out.flush()
}

#[derive(Serialize)]
struct BoundCsvRow<'a> {
    bound: &'a str,
    direction: &'a str,
    value: Option<f64>,
    applicable: bool,
    assumptions: &'a str,
}

/// Columns `bound, direction, value, applicable, assumptions`.
pub fn write_bounds_csv<W: Write>(mut w: W, rows: &[BoundRow]) -> std::io::Result<()> {
    header(&mut w, BOUNDS_SCHEMA)?;
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(BoundCsvRow {
            bound: &r.bound,
            direction: &r.direction,
            value: r.value,
            applicable: r.applicable(),
            assumptions: &r.assumptions,
        })
        .map_err(csv_err)?;
    }
    out.flush()
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::other)?;
    writeln!(w)
}
