//! Constitutive back-ends evaluated at Gauss points.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use crate::baselines::knn1_evaluate;
use crate::dataset::TrainingSet;
use crate::error::Result;
use crate::fem::element::MaterialResponse;
use crate::gpr::ThetaSet;
use crate::lagpr::{LagprModel, LocalSurrogate};
use crate::mech::{HyperelasticLaw, Oracle, VoigtStrain};
use crate::neighbors::NeighborIndex;

/// Surrogate update rule applied at every Gauss point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreezeRule {
    pub enabled: bool,
    /// Frobenius distance between the current `C` and the `C` a surrogate
    /// was built at, below which the surrogate is frozen.
    pub c_tol: f64,
}

/// What a Gauss point did during one evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateKind {
    /// The law is evaluated directly; there is no surrogate.
    Direct,
    Refit,
    Frozen,
}

/// A constitutive model with per-Gauss-point state.
pub trait MaterialBackend: Sync {
    type State: Send + Sync;

    fn name(&self) -> &'static str;

    fn init_state(&self) -> Self::State;

    /// Called at every Gauss point when a new load step starts.
    fn begin_load_step(&self, _state: &mut Self::State) {}

    /// Called once before every global assembly.
    fn begin_pass(&self) {}

    fn evaluate(
        &self,
        state: &mut Self::State,
        c: &VoigtStrain,
        rule: &FreezeRule,
    ) -> Result<(MaterialResponse, UpdateKind)>;

    /// Surrogate queries flagged as outside the training data so far.
    fn extrapolations(&self) -> usize {
        0
    }
}

/// Direct evaluation of an analytical law.
pub struct OracleBackend(pub Oracle);

impl MaterialBackend for OracleBackend {
    type State = ();

    fn name(&self) -> &'static str {
        "oracle"
    }

    fn init_state(&self) {}

    fn evaluate(&self, _: &mut (), c: &VoigtStrain, _: &FreezeRule) -> Result<(MaterialResponse, UpdateKind)> {
        let (s, d) = self.0.response(c)?;
        Ok((MaterialResponse { s, d }, UpdateKind::Direct))
    }
}

/// Nearest training row.
pub struct KnnBackend {
    ts: TrainingSet,
    index: NeighborIndex,
    radius: Option<f64>,
    extrapolations: std::sync::atomic::AtomicUsize,
}

impl KnnBackend {
    pub fn new(ts: TrainingSet) -> Result<Self> {
        let index = NeighborIndex::build(ts.inputs())?;
        Ok(KnnBackend {
            radius: ts.meta.layer_spacing(),
            ts,
            index,
            extrapolations: Default::default(),
        })
    }
}

impl MaterialBackend for KnnBackend {
    type State = ();

    fn name(&self) -> &'static str {
        "knn"
    }

    fn init_state(&self) {}

    fn evaluate(&self, _: &mut (), c: &VoigtStrain, _: &FreezeRule) -> Result<(MaterialResponse, UpdateKind)> {
        if let Some(r) = self.radius {
            if self.index.nearest(&c.0).dist2.sqrt() > r {
                self.extrapolations.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            }
        }
        let (s, d) = knn1_evaluate(&self.index, &self.ts, c)?;
        Ok((MaterialResponse { s, d }, UpdateKind::Direct))
    }

    fn extrapolations(&self) -> usize {
        self.extrapolations.load(std::sync::atomic::Ordering::Relaxed)
    }
}

/// Surrogate bookkeeping of one Gauss point.
#[derive(Clone, Debug, Default)]
pub struct GaussPointState {
    /// `C` at which the current surrogate was built.
    pub c_ref: Option<VoigtStrain>,
    pub surrogate: Option<Arc<LocalSurrogate>>,
    pub frozen: bool,
    /// Set at the start of a load step; forces the next evaluation to refit.
    pub stale: bool,
}

type CacheKey = (Vec<usize>, u64);

/// Local GP surrogates refitted or frozen per Gauss point.
///
/// Fits are memoized on (neighbor set, start `θ`): the fitted predictor
/// depends on nothing else, so Gauss points whose queries share a
/// neighborhood share one surrogate. The memo keeps the current and the
/// previous assembly pass.
pub struct LagprBackend {
    model: LagprModel,
    cache: Mutex<[HashMap<CacheKey, Arc<LocalSurrogate>>; 2]>,
}

fn theta_key(theta: &ThetaSet) -> u64 {
    let mut h = DefaultHasher::new();
    for (r, t) in theta.groups() {
        r.start.hash(&mut h);
        r.end.hash(&mut h);
        t.0.map(f64::to_bits).hash(&mut h);
    }
    h.finish()
}

impl LagprBackend {
    pub fn new(model: LagprModel) -> Self {
        LagprBackend {
            model,
            cache: Mutex::new([HashMap::new(), HashMap::new()]),
        }
    }

    pub fn model(&self) -> &LagprModel {
        &self.model
    }

    fn fit(&self, c: &VoigtStrain, warm: Option<&ThetaSet>) -> Result<Arc<LocalSurrogate>> {
        let start = warm.unwrap_or(self.model.default_theta());
        let query = self.model.query_neighbors(c);
        let key = (query.ids.clone(), theta_key(start));
        {
            let cache = self.cache.lock().expect("cache lock");
            if let Some(hit) = cache[0].get(&key).or_else(|| cache[1].get(&key)) {
                return Ok(hit.clone());
            }
        }
        let fitted = Arc::new(self.model.fit_on(c, query, Some(start))?);
        self.cache.lock().expect("cache lock")[0].insert(key, fitted.clone());
        Ok(fitted)
    }
}

impl MaterialBackend for LagprBackend {
    type State = GaussPointState;

    fn name(&self) -> &'static str {
        "lagpr"
    }

    fn init_state(&self) -> GaussPointState {
        GaussPointState::default()
    }

    fn begin_load_step(&self, state: &mut GaussPointState) {
        state.stale = true;
        state.frozen = false;
    }

    fn begin_pass(&self) {
        let mut cache = self.cache.lock().expect("cache lock");
        let current = std::mem::take(&mut cache[0]);
        cache[1] = current;
    }

    fn evaluate(
        &self,
        state: &mut GaussPointState,
        c: &VoigtStrain,
        rule: &FreezeRule,
    ) -> Result<(MaterialResponse, UpdateKind)> {
        let refit = match (&state.surrogate, state.c_ref) {
            (Some(_), Some(c_ref)) if !state.stale && rule.enabled => {
                if state.frozen {
                    false
                } else if c.frobenius_distance(&c_ref) > rule.c_tol {
                    true
                } else {
                    state.frozen = true;
                    false
                }
            }
            _ => true,
        };
        if refit {
            let warm = state.surrogate.as_ref().map(|s| s.theta());
            state.surrogate = Some(self.fit(c, warm.as_ref())?);
            state.c_ref = Some(*c);
            state.stale = false;
            state.frozen = false;
        }
        let surrogate = state.surrogate.as_ref().expect("surrogate present after refit");
        let (s, d) = surrogate.evaluate(c);
        let kind = if refit { UpdateKind::Refit } else { UpdateKind::Frozen };
        Ok((MaterialResponse { s, d }, kind))
    }

    fn extrapolations(&self) -> usize {
        self.model.extrapolation_count()
    }
}
