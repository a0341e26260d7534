//! Deterministic text output shared by the exporters.
//!
//! CSV files carry `#`-prefixed metadata lines, a single header line, and
//! numbers printed with 12 significant digits so reruns are byte-identical.

use std::io::Write;

use crate::error::Result;

/// Formats a float with 12 significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// Writes `# key = value` metadata lines.
pub fn write_metadata<W: Write>(w: &mut W, meta: &[(&str, String)]) -> Result<()> {
    writeln!(w, "# generator = qlink {}", env!("CARGO_PKG_VERSION"))?;
    for (k, v) in meta {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

pub fn write_row<W: Write>(w: &mut W, cells: &[f64]) -> Result<()> {
    let line = cells
        .iter()
        .map(|&x| fmt_num(x))
        .collect::<Vec<_>>()
        .join(",");
    writeln!(w, "{line}")?;
    Ok(())
}
