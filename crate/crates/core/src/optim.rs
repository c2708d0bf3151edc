//! Bound-constrained Hooke-Jeeves pattern search.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternSearch {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evals: usize,
}

impl Default for PatternSearch {
    fn default() -> Self {
        PatternSearch {
            initial_step: 0.5,
            min_step: 1e-3,
            max_evals: 200,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PatternSearchResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// Objective at the start point and after every accepted move.
    pub accepted: Vec<f64>,
}

struct Counted<F> {
    f: F,
    evals: usize,
    budget: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn exhausted(&self) -> bool {
        self.evals >= self.budget
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Coordinate-wise exploratory moves around `x`.
fn explore<F: FnMut(&[f64]) -> f64>(
    obj: &mut Counted<F>,
    x: &[f64],
    fx: f64,
    step: f64,
    lower: &[f64],
    upper: &[f64],
) -> (Vec<f64>, f64) {
    let mut best = x.to_vec();
    let mut fbest = fx;
    for k in 0..x.len() {
        for dir in [1.0, -1.0] {
            if obj.exhausted() {
                return (best, fbest);
            }
            let trial_k = (best[k] + dir * step).clamp(lower[k], upper[k]);
            if trial_k == best[k] {
                continue;
            }
            let mut trial = best.clone();
            trial[k] = trial_k;
            let ft = obj.eval(&trial);
            if ft < fbest {
                best = trial;
                fbest = ft;
                break;
            }
        }
    }
    (best, fbest)
}

/// Minimizes `f` over the box `[lower, upper]`. Stops once the step falls
/// below `min_step` or the evaluation budget is spent. Non-finite objective
/// values count as `+∞`.
pub fn hooke_jeeves<F: FnMut(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &PatternSearch,
) -> PatternSearchResult {
    let mut obj = Counted {
        f,
        evals: 0,
        budget: opts.max_evals.max(1),
    };
    let mut base = x0.to_vec();
    clamp_into(&mut base, lower, upper);
    let mut fbase = obj.eval(&base);
    let mut accepted = vec![fbase];
    let mut step = opts.initial_step;

    while step >= opts.min_step && !obj.exhausted() {
        let (xe, fe) = explore(&mut obj, &base, fbase, step, lower, upper);
        if fe < fbase {
            let mut prev = std::mem::replace(&mut base, xe);
            fbase = fe;
            accepted.push(fbase);
            while !obj.exhausted() {
                let mut xp: Vec<f64> = base.iter().zip(&prev).map(|(b, p)| 2.0 * b - p).collect();
                clamp_into(&mut xp, lower, upper);
                let fp = obj.eval(&xp);
                let (xe2, fe2) = explore(&mut obj, &xp, fp, step, lower, upper);
                if fe2 < fbase {
                    prev = std::mem::replace(&mut base, xe2);
                    fbase = fe2;
                    accepted.push(fbase);
                } else {
                    break;
                }
            }
        } else {
            step *= 0.5;
        }
    }

    PatternSearchResult {
        x: base,
        value: fbase,
        evals: obj.evals,
        accepted,
    }
}
