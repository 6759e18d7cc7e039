use crate::error::{Error, Result};

/// Norm below which a vector is treated as having no direction.
pub const ZERO_NORM: f64 = 1e-12;

/// Cosine of the angle between `a` and `b`.
///
/// Returns 0 when either vector has (near) zero norm, so an all-zero frame
/// never matches an existing mode.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(cosine_unchecked(a, b))
}

pub(crate) fn cosine_unchecked(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let (na, nb) = (na.sqrt(), nb.sqrt());
    if na < ZERO_NORM || nb < ZERO_NORM {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}
