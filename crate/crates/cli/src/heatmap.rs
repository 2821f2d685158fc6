//! Grayscale PGM rendering of per-feature scores.

use std::path::Path;

use crate::error::CliError;
use crate::output::write_atomic;

/// Binary PGM (P5, maxval 255) with one pixel per feature in row-major
/// order; the largest score maps to white.
pub fn render_pgm(scores: &[f64], width: usize, height: usize) -> Result<Vec<u8>, CliError> {
    if width * height != scores.len() {
        return Err(CliError::Config(format!(
            "dimension mismatch: {width}x{height} grid for {} features",
            scores.len()
        )));
    }
    let max = scores.iter().copied().fold(0.0f64, f64::max);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(scores.iter().map(|&s| {
        if max > 0.0 {
            (255.0 * s / max).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    Ok(out)
}

pub fn emit_heatmap(
    scores: &[f64],
    width: usize,
    height: usize,
    path: &Path,
) -> Result<(), CliError> {
    let bytes = render_pgm(scores, width, height)?;
    write_atomic(path, &bytes)
}
