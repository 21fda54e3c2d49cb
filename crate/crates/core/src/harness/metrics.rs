use crate::error::{HyperboxError, Result};
use crate::hyperbox::ClassLabel;

/// Fraction of positions where the two label sequences agree.
pub fn accuracy(y_true: &[ClassLabel], y_pred: &[ClassLabel]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(HyperboxError::InvalidInput(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(HyperboxError::EmptyData);
    }
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / y_true.len() as f64)
}
