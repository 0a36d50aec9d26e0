//! Plain-text serialization helpers shared by the CSV writers.

/// Format a float with 9 significant digits in scientific notation.
///
/// All CSV outputs use this one formatter so that identical runs produce
/// byte-identical files.
pub fn fmt_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Parse a float, reporting the 1-based source line on failure.
pub fn parse_f64(field: &str, line: usize) -> crate::error::Result<f64> {
    field.trim().parse::<f64>().map_err(|_| crate::error::Error::Parse {
        line,
        message: format!("expected a number, got {field:?}"),
    })
}
