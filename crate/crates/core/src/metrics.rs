//! Error measures for surrogate studies.

use crate::mech::VoigtStress;

/// `E_S = (1/6) Σ_points Σ_components (ŝ − s)²`
pub fn stress_error(pred: &[VoigtStress], truth: &[VoigtStress]) -> f64 {
    assert_eq!(pred.len(), truth.len(), "prediction/reference length mismatch");
    pred.iter()
        .zip(truth)
        .map(|(p, t)| p.0.iter().zip(&t.0).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
        .sum::<f64>()
        / 6.0
}

/// Mean squared error of each stress component, normalized by the mean
/// square of that component over the reference set.
pub fn component_nmse(pred: &[VoigtStress], truth: &[VoigtStress]) -> [f64; 6] {
    assert_eq!(pred.len(), truth.len(), "prediction/reference length mismatch");
    let mut err = [0.0; 6];
    let mut norm = [0.0; 6];
    for (p, t) in pred.iter().zip(truth) {
        for k in 0..6 {
            err[k] += (p.0[k] - t.0[k]).powi(2);
            norm[k] += t.0[k].powi(2);
        }
    }
    std::array::from_fn(|k| if norm[k] > 0.0 { err[k] / norm[k] } else { err[k] })
}
