//! Serialization helpers shared by the subcommands.

use std::io::Write;

use qftadm_core::{CMatrix, Cplx};
use serde::Serialize;
use serde_json::ser::Formatter;

/// JSON formatter that prints every float with 17 significant digits so
/// output diffs exactly across runs.
pub struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out)?)
}

/// One complex entry as a "re+imi" cell.
pub fn complex_cell(z: Cplx) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

/// One CSV line per matrix row.
pub fn matrix_csv(m: &CMatrix) -> String {
    let mut lines = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols()).map(|c| complex_cell(m.get(r, c))).collect();
        lines.push(cells.join(","));
    }
    lines.join("\n")
}
