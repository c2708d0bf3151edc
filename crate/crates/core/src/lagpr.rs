//! Local approximate GP surrogates: one small GP per query, fitted on the
//! query's nearest training rows.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::dataset::{TrainingSet, OUTPUT_WIDTH};
use crate::error::{Error, Result};
use crate::gpr::{fit_gp, optimize_theta, FittedGp, Theta, ThetaSet, ThetaSharing, THETA_MAX, THETA_MIN};
use crate::mech::{TangentVoigt, VoigtStrain, VoigtStress};
use crate::neighbors::NeighborIndex;
use crate::optim::PatternSearch;

pub const DEFAULT_N_LOCAL: usize = 100;
pub const MIN_N_LOCAL: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ThetaPolicy {
    /// Re-optimize `θ` on every local fit, starting from the warm start.
    #[default]
    Optimize,
    /// Reuse the warm start (or the model default) without optimizing.
    Frozen,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagprConfig {
    pub n_local: usize,
    pub sharing: ThetaSharing,
    pub policy: ThetaPolicy,
    pub search: PatternSearch,
}

impl Default for LagprConfig {
    fn default() -> Self {
        LagprConfig {
            n_local: DEFAULT_N_LOCAL,
            sharing: ThetaSharing::PerChannel,
            policy: ThetaPolicy::Optimize,
            search: PatternSearch::default(),
        }
    }
}

impl LagprConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_local < MIN_N_LOCAL {
            return Err(Error::InvalidArgs(format!(
                "n_local must be at least {MIN_N_LOCAL} (got {})",
                self.n_local
            )));
        }
        Ok(())
    }
}

/// Result of a neighbor query.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborQuery {
    pub ids: Vec<usize>,
    pub nearest_distance: f64,
    pub extrapolating: bool,
}

/// A GP fitted on the neighbors of one anchor strain.
#[derive(Clone, Debug)]
pub struct LocalSurrogate {
    pub anchor: VoigtStrain,
    /// Training row ids, ascending.
    pub neighbors: Vec<usize>,
    pub gp: FittedGp,
    /// Distance from the anchor to its nearest training row.
    pub nearest_distance: f64,
    pub extrapolating: bool,
    fingerprint: u64,
}

impl LocalSurrogate {
    pub fn theta(&self) -> ThetaSet {
        self.gp.theta()
    }

    /// Hash of the neighbor set and fitted weights; equal fingerprints mean
    /// the same predictor.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn predict_raw(&self, c: &VoigtStrain) -> [f64; OUTPUT_WIDTH] {
        let mut y = [0.0; OUTPUT_WIDTH];
        self.gp.predict_into(&c.0, &mut y);
        y
    }

    /// Stress and major-symmetrized tangent at `c`.
    pub fn evaluate(&self, c: &VoigtStrain) -> (VoigtStress, TangentVoigt) {
        let y = self.predict_raw(c);
        let mut s = [0.0; 6];
        s.copy_from_slice(&y[..6]);
        let mut d = [0.0; 36];
        d.copy_from_slice(&y[6..]);
        (VoigtStress(s), TangentVoigt(d).symmetrized())
    }
}

fn fingerprint(neighbors: &[usize], gp: &FittedGp) -> u64 {
    let mut h = DefaultHasher::new();
    neighbors.hash(&mut h);
    for b in gp.blocks() {
        b.theta.0.map(f64::to_bits).hash(&mut h);
        b.nugget.to_bits().hash(&mut h);
        for v in b.mu_hat.iter().chain(&b.alpha) {
            v.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

/// Training data, neighbor index and `θ` defaults shared by all local fits.
#[derive(Debug)]
pub struct LagprModel {
    inputs: Vec<[f64; 6]>,
    targets: Vec<[f64; OUTPUT_WIDTH]>,
    index: NeighborIndex,
    cfg: LagprConfig,
    default_theta: ThetaSet,
    extrapolation_radius: Option<f64>,
    extrapolations: AtomicUsize,
}

impl LagprModel {
    pub fn new(ts: &TrainingSet, cfg: LagprConfig) -> Result<Self> {
        cfg.validate()?;
        if ts.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if cfg.n_local > ts.len() {
            return Err(Error::InvalidArgs(format!(
                "n_local = {} exceeds the {} training rows",
                cfg.n_local,
                ts.len()
            )));
        }
        let inputs = ts.inputs();
        Ok(LagprModel {
            index: NeighborIndex::build(inputs.clone())?,
            inputs,
            targets: ts.rows.iter().map(|r| r.target()).collect(),
            cfg,
            default_theta: ThetaSet::uniform(OUTPUT_WIDTH, Theta::log_mid(), cfg.sharing),
            extrapolation_radius: ts.meta.layer_spacing(),
            extrapolations: AtomicUsize::new(0),
        })
    }

    pub fn config(&self) -> &LagprConfig {
        &self.cfg
    }

    pub fn index(&self) -> &NeighborIndex {
        &self.index
    }

    pub fn default_theta(&self) -> &ThetaSet {
        &self.default_theta
    }

    pub fn set_default_theta(&mut self, theta: ThetaSet) -> Result<()> {
        if theta.width() != OUTPUT_WIDTH {
            return Err(Error::InvalidArgs(format!(
                "theta set covers {} channels",
                theta.width()
            )));
        }
        self.default_theta = theta;
        Ok(())
    }

    /// Nearest-neighbor distance above which a query counts as extrapolation.
    pub fn set_extrapolation_radius(&mut self, radius: Option<f64>) {
        self.extrapolation_radius = radius;
    }

    pub fn extrapolation_count(&self) -> usize {
        self.extrapolations.load(Ordering::Relaxed)
    }

    pub fn reset_extrapolation_count(&self) {
        self.extrapolations.store(0, Ordering::Relaxed);
    }

    /// The `n_local` nearest training rows of `c`, sorted by id so that the
    /// fit depends only on the set. Counts the query as an extrapolation
    /// when its nearest row is farther than the radius.
    pub fn query_neighbors(&self, c: &VoigtStrain) -> NeighborQuery {
        let found = self.index.knn(&c.0, self.cfg.n_local);
        let nearest_distance = found[0].dist2.sqrt();
        let extrapolating = self.extrapolation_radius.is_some_and(|r| nearest_distance > r);
        if extrapolating {
            self.extrapolations.fetch_add(1, Ordering::Relaxed);
        }
        let mut ids: Vec<usize> = found.iter().map(|n| n.id).collect();
        ids.sort_unstable();
        NeighborQuery {
            ids,
            nearest_distance,
            extrapolating,
        }
    }

    /// Fits a GP on the `n_local` nearest rows of `c_star`. `theta_init`
    /// overrides the model default as start value (or as the fixed value
    /// under [`ThetaPolicy::Frozen`]).
    pub fn local_fit(&self, c_star: &VoigtStrain, theta_init: Option<&ThetaSet>) -> Result<LocalSurrogate> {
        let query = self.query_neighbors(c_star);
        self.fit_on(c_star, query, theta_init)
    }

    /// Fits a GP on a neighbor set obtained from [`Self::query_neighbors`].
    pub fn fit_on(
        &self,
        c_star: &VoigtStrain,
        query: NeighborQuery,
        theta_init: Option<&ThetaSet>,
    ) -> Result<LocalSurrogate> {
        let NeighborQuery {
            ids: neighbors,
            nearest_distance,
            extrapolating,
        } = query;
        let x: Vec<[f64; 6]> = neighbors.iter().map(|&i| self.inputs[i]).collect();
        let y: Vec<&[f64]> = neighbors.iter().map(|&i| &self.targets[i][..]).collect();
        let start = theta_init.unwrap_or(&self.default_theta);
        let theta = match self.cfg.policy {
            ThetaPolicy::Frozen => start.clone(),
            ThetaPolicy::Optimize => optimize_theta(&x, &y, start, &self.cfg.search)?,
        };
        let mut gp = fit_gp(&x, &y, &theta)?;
        gp.release_factors();
        Ok(LocalSurrogate {
            fingerprint: fingerprint(&neighbors, &gp),
            anchor: *c_star,
            neighbors,
            gp,
            nearest_distance,
            extrapolating,
        })
    }

    /// Fits and immediately evaluates at the anchor.
    pub fn predict(&self, c: &VoigtStrain) -> Result<(VoigtStress, TangentVoigt)> {
        Ok(self.local_fit(c, None)?.evaluate(c))
    }

    /// Optimizes `θ` on local fits at the given anchors and sets the model
    /// default to the per-channel geometric mean. Used to choose a fixed
    /// `θ` for [`ThetaPolicy::Frozen`] runs.
    pub fn calibrate_theta(&mut self, anchors: &[VoigtStrain]) -> Result<ThetaSet> {
        if anchors.is_empty() {
            return Err(Error::InvalidArgs("theta calibration needs at least one anchor".into()));
        }
        let fits: Vec<ThetaSet> = anchors
            .par_iter()
            .map(|a| {
                let found = self.index.knn(&a.0, self.cfg.n_local);
                let x: Vec<[f64; 6]> = found.iter().map(|n| self.inputs[n.id]).collect();
                let y: Vec<&[f64]> = found.iter().map(|n| &self.targets[n.id][..]).collect();
                optimize_theta(&x, &y, &self.default_theta, &self.cfg.search)
            })
            .collect::<Result<_>>()?;
        let groups = self
            .default_theta
            .groups()
            .iter()
            .enumerate()
            .map(|(g, (range, _))| {
                let mut t = [0.0; 6];
                for (k, tk) in t.iter_mut().enumerate() {
                    let mean_log = fits.iter().map(|f| f.groups()[g].1 .0[k].ln()).sum::<f64>() / fits.len() as f64;
                    *tk = mean_log.exp().clamp(THETA_MIN, THETA_MAX);
                }
                (range.clone(), Theta(t))
            })
            .collect();
        let set = ThetaSet::new(groups)?;
        self.default_theta = set.clone();
        Ok(set)
    }
}
