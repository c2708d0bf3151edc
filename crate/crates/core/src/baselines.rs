//! One-nearest-neighbor regression over the training rows.

use crate::dataset::TrainingSet;
use crate::error::{Error, Result};
use crate::mech::{TangentVoigt, VoigtStrain, VoigtStress};
use crate::neighbors::NeighborIndex;

/// Stored `(s, d)` of the row nearest to `c` (lowest row id on ties).
pub fn knn1_evaluate(idx: &NeighborIndex, ts: &TrainingSet, c: &VoigtStrain) -> Result<(VoigtStress, TangentVoigt)> {
    if ts.is_empty() || idx.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let row = &ts.rows[idx.nearest(&c.0).id];
    Ok((row.s, row.d))
}
