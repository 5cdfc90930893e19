//! CSV and JSON writers. Every float is written with 17 significant digits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use lagflow_core::curve::ClosedCurve;
use lagflow_core::diagnostics::DiagnosticsRecord;
use lagflow_core::PotentialGrid;
use serde::Serialize;

pub const DIAGNOSTICS_HEADER: &str = "time,volume,dissipation,meanzero_residual,intA2,intDA2,intD2A2,supA,theta_residual,slope_margin,isoperimetric";

pub const SCHEMA_VERSION: u32 = 1;

/// `v` in scientific notation with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

pub fn diagnostics_row(r: &DiagnosticsRecord) -> String {
    [
        fmt17(r.time),
        fmt17(r.volume),
        fmt17(r.dissipation),
        fmt17(r.meanzero_residual),
        fmt17(r.a_norms[0]),
        fmt17(r.a_norms[1]),
        fmt17(r.a_norms[2]),
        fmt17(r.sup_a),
        opt(r.theta_residual),
        opt(r.slope_margin),
        opt(r.isoperimetric),
    ]
    .join(",")
}

pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    for r in records {
        writeln!(w, "{}", diagnostics_row(r))?;
    }
    w.flush()
}

const AXES: [&str; 3] = ["x", "y", "z"];

/// One row per node: coordinates then the full potential.
pub fn write_scalar_snapshot(path: &Path, grid: &PotentialGrid) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let header: Vec<&str> = AXES[..grid.dim()].iter().copied().chain(["phi"]).collect();
    writeln!(w, "{}", header.join(","))?;
    for idx in 0..grid.node_count() {
        let mut row: Vec<String> = grid.coords(idx).into_iter().map(fmt17).collect();
        row.push(fmt17(grid.total_value(idx)));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()
}

pub fn write_curve_snapshot(path: &Path, curve: &ClosedCurve) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,y")?;
    for p in curve.points() {
        writeln!(w, "{},{}", fmt17(p[0]), fmt17(p[1]))?;
    }
    w.flush()
}

/// serde_json formatter that writes floats through [`fmt17`].
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with 17-digit floats. Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // round-trip through Value so NaN and infinities map to null
    let value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = to_json(value).map_err(io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}
