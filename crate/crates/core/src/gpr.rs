//! Ordinary kriging with a product Matérn 3/2 correlation.
//!
//! Outputs are modelled as independent scalar processes that share the
//! input set. Channels may be grouped so that a group shares one
//! length-scale vector and hence one correlation matrix; with one channel
//! per group every output gets its own `θ`.
//!
//! Hyperparameters are fitted by minimising the concentrated restricted
//! negative log-likelihood of constant-mean kriging,
//!
//! ```text
//! ½ [ (n − 1) ln σ̂² + ln |R| + ln(1ᵀR⁻¹1) ],   σ̂² = (y − 1μ̂)ᵀR⁻¹(y − 1μ̂) / (n − 1),
//! ```
//!
//! with a Hooke-Jeeves search over `log10 θ`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::optim::{hooke_jeeves, PatternSearch};

pub const THETA_MIN: f64 = 1e-4;
pub const THETA_MAX: f64 = 1e2;
/// Upper end of the nugget escalation.
pub const MAX_NUGGET: f64 = 1e-4;
const INITIAL_NUGGET_FACTOR: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 2;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Per-coordinate length-scales of one correlation function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theta(pub [f64; 6]);

impl Theta {
    pub fn new(values: [f64; 6]) -> Result<Self> {
        for v in values {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidTheta(v));
            }
        }
        Ok(Theta(values))
    }

    pub fn splat(v: f64) -> Self {
        Theta([v; 6])
    }

    /// Geometric midpoint of the admissible range.
    pub fn log_mid() -> Self {
        Theta::splat((THETA_MIN * THETA_MAX).sqrt())
    }

    pub fn clamped(&self) -> Self {
        Theta(self.0.map(|v| v.clamp(THETA_MIN, THETA_MAX)))
    }

    fn weights(&self) -> [f64; 6] {
        self.0.map(|t| SQRT3 / t)
    }
}

/// Which output channels share a length-scale vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ThetaSharing {
    /// One `θ` per output channel.
    #[default]
    PerChannel,
    /// One `θ` for the six stress channels and one for the tangent channels.
    StressTangent,
}

impl ThetaSharing {
    pub fn groups(&self, width: usize) -> Vec<Range<usize>> {
        match self {
            ThetaSharing::PerChannel => (0..width).map(|c| c..c + 1).collect(),
            ThetaSharing::StressTangent if width > 6 => vec![0..6, 6..width],
            ThetaSharing::StressTangent => std::iter::once(0..width).collect(),
        }
    }
}

/// Length-scales for every channel group of a multi-output GP.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSet {
    groups: Vec<(Range<usize>, Theta)>,
}

impl ThetaSet {
    /// Groups must tile `0..width` in order.
    pub fn new(groups: Vec<(Range<usize>, Theta)>) -> Result<Self> {
        let mut next = 0;
        for (r, t) in &groups {
            if r.start != next || r.is_empty() {
                return Err(Error::InvalidArgs("theta groups must tile the output channels".into()));
            }
            Theta::new(t.0)?;
            next = r.end;
        }
        if groups.is_empty() {
            return Err(Error::InvalidArgs("theta set has no groups".into()));
        }
        Ok(ThetaSet { groups })
    }

    pub fn uniform(width: usize, theta: Theta, sharing: ThetaSharing) -> Self {
        ThetaSet {
            groups: sharing.groups(width).into_iter().map(|r| (r, theta)).collect(),
        }
    }

    pub fn per_channel(thetas: &[Theta]) -> Self {
        ThetaSet {
            groups: thetas.iter().enumerate().map(|(c, t)| (c..c + 1, *t)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.groups.last().map_or(0, |(r, _)| r.end)
    }

    pub fn groups(&self) -> &[(Range<usize>, Theta)] {
        &self.groups
    }

    pub fn channel(&self, ch: usize) -> Theta {
        self.groups
            .iter()
            .find(|(r, _)| r.contains(&ch))
            .map(|(_, t)| *t)
            .expect("channel within theta set width")
    }
}

/// `∏ₖ (1 + √3|Δₖ|/θₖ) exp(−√3|Δₖ|/θₖ)`
pub fn matern32(a: &[f64; 6], b: &[f64; 6], theta: &Theta) -> Result<f64> {
    Theta::new(theta.0)?;
    let mut diff = [0.0; 6];
    for k in 0..6 {
        diff[k] = (a[k] - b[k]).abs();
    }
    Ok(correlation(&diff, &theta.weights()))
}

#[inline]
fn correlation(absdiff: &[f64; 6], weights: &[f64; 6]) -> f64 {
    let mut prod = 1.0;
    let mut sum = 0.0;
    for k in 0..6 {
        let s = absdiff[k] * weights[k];
        prod *= 1.0 + s;
        sum += s;
    }
    prod * (-sum).exp()
}

/// Absolute coordinate differences of all pairs `i > j`, packed row-wise.
struct PairDiffs {
    n: usize,
    diffs: Vec<[f64; 6]>,
}

impl PairDiffs {
    fn new(inputs: &[[f64; 6]]) -> Self {
        let n = inputs.len();
        let mut diffs = Vec::with_capacity(n * (n - 1) / 2);
        for i in 1..n {
            for j in 0..i {
                let mut d = [0.0; 6];
                for k in 0..6 {
                    d[k] = (inputs[i][k] - inputs[j][k]).abs();
                }
                diffs.push(d);
            }
        }
        PairDiffs { n, diffs }
    }

    /// Row-major correlation matrix (lower triangle and unit diagonal filled,
    /// upper triangle mirrored).
    fn correlation_matrix(&self, theta: &Theta) -> Vec<f64> {
        let n = self.n;
        let w = theta.weights();
        let mut r = vec![0.0; n * n];
        let mut p = 0;
        for i in 0..n {
            for j in 0..i {
                let v = correlation(&self.diffs[p], &w);
                r[i * n + j] = v;
                r[j * n + i] = v;
                p += 1;
            }
            r[i * n + i] = 1.0;
        }
        r
    }
}

/// Factors `R + νI`, escalating ν by decades from `1e-10·tr(R)/n`.
fn factor_with_nugget(mut r: Vec<f64>, n: usize) -> Result<(Cholesky, f64)> {
    let trace: f64 = (0..n).map(|i| r[i * n + i]).sum();
    let mut nugget = INITIAL_NUGGET_FACTOR * trace / n as f64;
    let mut applied = 0.0;
    loop {
        for i in 0..n {
            r[i * n + i] += nugget - applied;
        }
        applied = nugget;
        if let Some(ch) = Cholesky::factor(&r, n) {
            return Ok((ch, nugget));
        }
        if nugget * 10.0 > MAX_NUGGET * (1.0 + 1e-12) {
            return Err(Error::CholeskyFailure { max_nugget: nugget });
        }
        nugget *= 10.0;
    }
}

fn is_degenerate(column: &[f64]) -> bool {
    let (lo, hi, big) = column
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0f64), |(lo, hi, big), &v| {
            (lo.min(v), hi.max(v), big.max(v.abs()))
        });
    hi - lo <= 1e-12 * big.max(1.0)
}

/// Concentrated restricted likelihood of one channel group for a fixed θ.
struct GroupObjective<'a> {
    pairs: &'a PairDiffs,
    columns: Vec<Vec<f64>>,
}

impl GroupObjective<'_> {
    fn value(&self, theta: &Theta) -> Result<f64> {
        let n = self.pairs.n;
        let (ch, _) = factor_with_nugget(self.pairs.correlation_matrix(theta), n)?;
        let mut u = vec![1.0; n];
        ch.forward(&mut u);
        let uu: f64 = u.iter().map(|x| x * x).sum();
        let k = self.columns.len() as f64;
        let mut total = 0.5 * k * (ch.log_det() + uu.ln());
        let mut v = vec![0.0; n];
        for col in &self.columns {
            v.copy_from_slice(col);
            ch.forward(&mut v);
            let mu = u.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / uu;
            let quad: f64 = v.iter().zip(&u).map(|(vi, ui)| (vi - mu * ui).powi(2)).sum();
            let sigma2 = quad / (n - 1) as f64;
            total += 0.5 * (n - 1) as f64 * sigma2.ln();
        }
        Ok(total)
    }
}

fn validate_inputs(inputs: &[[f64; 6]]) -> Result<()> {
    if inputs.len() < 2 {
        return Err(Error::InvalidArgs(format!(
            "GP needs at least 2 inputs (got {})",
            inputs.len()
        )));
    }
    let mut sorted: Vec<(usize, [u64; 6])> = inputs
        .iter()
        .enumerate()
        .map(|(i, x)| (i, x.map(|v| (v + 0.0).to_bits())))
        .collect();
    sorted.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
    for w in sorted.windows(2) {
        if w[0].1 == w[1].1 {
            return Err(Error::DuplicateInputs(w[0].0, w[1].0));
        }
    }
    Ok(())
}

fn column<R: AsRef<[f64]>>(targets: &[R], ch: usize) -> Vec<f64> {
    targets.iter().map(|row| row.as_ref()[ch]).collect()
}

fn check_targets<R: AsRef<[f64]>>(inputs: &[[f64; 6]], targets: &[R], width: usize) -> Result<()> {
    if targets.len() != inputs.len() {
        return Err(Error::InvalidArgs(format!(
            "{} inputs but {} target rows",
            inputs.len(),
            targets.len()
        )));
    }
    if let Some(bad) = targets.iter().position(|t| t.as_ref().len() != width) {
        return Err(Error::InvalidArgs(format!(
            "target row {bad} does not have {width} channels"
        )));
    }
    Ok(())
}

/// Negative concentrated restricted log-likelihood of a single channel.
pub fn neg_restricted_loglik(inputs: &[[f64; 6]], targets: &[f64], theta: &Theta) -> Result<f64> {
    validate_inputs(inputs)?;
    Theta::new(theta.0)?;
    if targets.len() != inputs.len() {
        return Err(Error::InvalidArgs("target length differs from input count".into()));
    }
    let pairs = PairDiffs::new(inputs);
    GroupObjective {
        pairs: &pairs,
        columns: vec![targets.to_vec()],
    }
    .value(theta)
}

/// Fits every channel group's `θ` independently, starting from `theta0`.
/// Groups whose channels are all constant keep their start value.
pub fn optimize_theta<R: AsRef<[f64]>>(
    inputs: &[[f64; 6]],
    targets: &[R],
    theta0: &ThetaSet,
    search: &PatternSearch,
) -> Result<ThetaSet> {
    validate_inputs(inputs)?;
    check_targets(inputs, targets, theta0.width())?;
    let pairs = PairDiffs::new(inputs);
    let lower = [THETA_MIN.log10(); 6];
    let upper = [THETA_MAX.log10(); 6];
    let mut groups = Vec::with_capacity(theta0.groups.len());
    for (range, start) in &theta0.groups {
        let columns: Vec<Vec<f64>> = range
            .clone()
            .map(|ch| column(targets, ch))
            .filter(|c| !is_degenerate(c))
            .collect();
        if columns.is_empty() {
            groups.push((range.clone(), start.clamped()));
            continue;
        }
        let objective = GroupObjective { pairs: &pairs, columns };
        let x0 = start.clamped().0.map(f64::log10);
        let best = hooke_jeeves(
            |x| {
                let mut t = [0.0; 6];
                for k in 0..6 {
                    t[k] = 10f64.powf(x[k]);
                }
                objective.value(&Theta(t)).unwrap_or(f64::INFINITY)
            },
            &x0,
            &lower,
            &upper,
            search,
        );
        let mut t = [0.0; 6];
        for k in 0..6 {
            t[k] = 10f64.powf(best.x[k]).clamp(THETA_MIN, THETA_MAX);
        }
        groups.push((range.clone(), Theta(t)));
    }
    Ok(ThetaSet { groups })
}

/// One channel group of a fitted GP.
#[derive(Clone, Debug)]
pub struct GpBlock {
    pub channels: Range<usize>,
    pub theta: Theta,
    pub nugget: f64,
    /// GLS constant mean per channel of the group.
    pub mu_hat: Vec<f64>,
    /// Kriging weights solving `R α = y − 1μ̂` (refined from the
    /// `(R + νI)⁻¹` solve), row-major `n × channels.len()`.
    pub alpha: Vec<f64>,
    chol: Option<Cholesky>,
}

impl GpBlock {
    pub fn factor(&self) -> Option<&Cholesky> {
        self.chol.as_ref()
    }
}

#[derive(Clone, Debug)]
pub struct FittedGp {
    inputs: Vec<[f64; 6]>,
    blocks: Vec<GpBlock>,
    width: usize,
}

/// Iterative refinement of `R w = y − 1μ` preconditioned by the
/// nugget-regularized factor, so training targets are reproduced up to
/// round-off rather than up to the nugget.
fn refine_weights<R: AsRef<[f64]>>(
    r: &[f64],
    ch: &Cholesky,
    targets: &[R],
    chn: usize,
    mu: f64,
    w: &mut [f64],
    scratch: &mut [f64],
) {
    let n = w.len();
    for _ in 0..REFINEMENT_STEPS {
        for i in 0..n {
            let row = &r[i * n..(i + 1) * n];
            let rw: f64 = row.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            scratch[i] = targets[i].as_ref()[chn] - mu - rw;
        }
        ch.solve_in_place(scratch);
        for (wi, d) in w.iter_mut().zip(scratch.iter()) {
            *wi += d;
        }
    }
}

/// Fits the GLS mean and kriging weights of every channel for fixed `θ`.
pub fn fit_gp<R: AsRef<[f64]>>(inputs: &[[f64; 6]], targets: &[R], theta: &ThetaSet) -> Result<FittedGp> {
    validate_inputs(inputs)?;
    let width = theta.width();
    check_targets(inputs, targets, width)?;
    let n = inputs.len();
    let pairs = PairDiffs::new(inputs);
    let mut blocks = Vec::with_capacity(theta.groups.len());
    for (range, th) in &theta.groups {
        Theta::new(th.0)?;
        let r = pairs.correlation_matrix(th);
        let (ch, nugget) = factor_with_nugget(r.clone(), n)?;
        let mut r1 = vec![1.0; n];
        ch.solve_in_place(&mut r1);
        let denom: f64 = r1.iter().sum();
        let k = range.len();
        let mut alpha = vec![0.0; n * k];
        let mut mu_hat = Vec::with_capacity(k);
        let mut ry = vec![0.0; n];
        let mut w = vec![0.0; n];
        for (local, chn) in range.clone().enumerate() {
            for (slot, row) in ry.iter_mut().zip(targets) {
                *slot = row.as_ref()[chn];
            }
            ch.solve_in_place(&mut ry);
            let mu = ry.iter().sum::<f64>() / denom;
            for i in 0..n {
                w[i] = ry[i] - mu * r1[i];
            }
            refine_weights(&r, &ch, targets, chn, mu, &mut w, &mut ry);
            for i in 0..n {
                alpha[i * k + local] = w[i];
            }
            mu_hat.push(mu);
        }
        blocks.push(GpBlock {
            channels: range.clone(),
            theta: *th,
            nugget,
            mu_hat,
            alpha,
            chol: Some(ch),
        });
    }
    Ok(FittedGp {
        inputs: inputs.to_vec(),
        blocks,
        width,
    })
}

impl FittedGp {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn inputs(&self) -> &[[f64; 6]] {
        &self.inputs
    }

    pub fn blocks(&self) -> &[GpBlock] {
        &self.blocks
    }

    pub fn theta(&self) -> ThetaSet {
        ThetaSet {
            groups: self.blocks.iter().map(|b| (b.channels.clone(), b.theta)).collect(),
        }
    }

    /// Drops the Cholesky factors; prediction needs only the weights.
    pub fn release_factors(&mut self) {
        for b in &mut self.blocks {
            b.chol = None;
        }
    }

    /// Kriging mean `μ̂ + r(c⋆)ᵀ α` for every channel.
    pub fn predict(&self, c_star: &[f64; 6]) -> Vec<f64> {
        let mut out = vec![0.0; self.width];
        self.predict_into(c_star, &mut out);
        out
    }

    pub fn predict_into(&self, c_star: &[f64; 6], out: &mut [f64]) {
        let n = self.inputs.len();
        let mut r = vec![0.0; n];
        let mut diff = [0.0; 6];
        for b in &self.blocks {
            let w = b.theta.weights();
            for (ri, x) in r.iter_mut().zip(&self.inputs) {
                for k in 0..6 {
                    diff[k] = (c_star[k] - x[k]).abs();
                }
                *ri = correlation(&diff, &w);
            }
            let k = b.channels.len();
            let dst = &mut out[b.channels.clone()];
            dst.copy_from_slice(&b.mu_hat);
            for (i, ri) in r.iter().enumerate() {
                let row = &b.alpha[i * k..(i + 1) * k];
                for (o, a) in dst.iter_mut().zip(row) {
                    *o += ri * a;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_inputs(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 6]> {
        (0..n)
            .map(|_| std::array::from_fn(|_| rng.gen_range(0.0..1.0)))
            .collect()
    }

    /// Dense Gauss-Jordan inverse with partial pivoting.
    fn gauss_jordan_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
                .unwrap();
            m.swap(col, piv);
            let p = m[col][col];
            for v in m[col].iter_mut() {
                *v /= p;
            }
            let pivot_row = m[col].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != col {
                    let f = row[col];
                    if f != 0.0 {
                        for (v, pv) in row.iter_mut().zip(&pivot_row) {
                            *v -= f * pv;
                        }
                    }
                }
            }
        }
        m.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    /// Textbook ordinary kriging with an explicit inverse of `R + νI`.
    fn textbook_predict(inputs: &[[f64; 6]], y: &[f64], theta: &Theta, nugget: f64, x: &[f64; 6]) -> f64 {
        let n = inputs.len();
        let r: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| matern32(&inputs[i], &inputs[j], theta).unwrap() + if i == j { nugget } else { 0.0 })
                    .collect()
            })
            .collect();
        let rinv = gauss_jordan_inverse(&r);
        let rinv_1: Vec<f64> = rinv.iter().map(|row| row.iter().sum()).collect();
        let rinv_y: Vec<f64> = rinv
            .iter()
            .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
            .collect();
        let mu = rinv_y.iter().sum::<f64>() / rinv_1.iter().sum::<f64>();
        let resid: Vec<f64> = y.iter().map(|v| v - mu).collect();
        let w: Vec<f64> = rinv
            .iter()
            .map(|row| row.iter().zip(&resid).map(|(a, b)| a * b).sum())
            .collect();
        mu + inputs
            .iter()
            .zip(&w)
            .map(|(xi, wi)| matern32(x, xi, theta).unwrap() * wi)
            .sum::<f64>()
    }

    #[test]
    fn matern_examples() {
        let a = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        let theta = Theta([0.3, 0.5, 0.7, 0.2, 0.9, 1.1]);
        assert_eq!(matern32(&a, &a, &theta).unwrap(), 1.0);
        let mut b = a;
        b[3] += theta.0[3];
        let expected = (1.0 + 3f64.sqrt()) * (-(3f64.sqrt())).exp();
        assert!((matern32(&a, &b, &theta).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.48335).abs() < 1e-5);
        // product over active coordinates
        let mut c = a;
        c[0] += 0.2;
        c[4] -= 0.4;
        let mut only0 = a;
        only0[0] += 0.2;
        let mut only4 = a;
        only4[4] -= 0.4;
        let lhs = matern32(&a, &c, &theta).unwrap();
        let rhs = matern32(&a, &only0, &theta).unwrap() * matern32(&a, &only4, &theta).unwrap();
        assert!((lhs - rhs).abs() < 1e-15);
        assert!(matches!(
            matern32(&a, &b, &Theta::splat(0.0)),
            Err(Error::InvalidTheta(_))
        ));
    }

    #[test]
    fn two_point_interpolation() {
        let inputs = [[0.0; 6], [0.5, 0.0, 0.0, 0.0, 0.0, 0.0]];
        let targets = [[0.0], [1.0]];
        let gp = fit_gp(
            &inputs,
            &targets,
            &ThetaSet::uniform(1, Theta::splat(0.3), ThetaSharing::PerChannel),
        )
        .unwrap();
        assert!(gp.predict(&inputs[0])[0].abs() < 1e-6);
        assert!((gp.predict(&inputs[1])[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn constant_targets_give_constant_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inputs = random_inputs(&mut rng, 15);
        let targets = vec![[3.5]; 15];
        let gp = fit_gp(
            &inputs,
            &targets,
            &ThetaSet::uniform(1, Theta::splat(0.5), ThetaSharing::PerChannel),
        )
        .unwrap();
        let b = &gp.blocks()[0];
        assert!((b.mu_hat[0] - 3.5).abs() < 1e-10);
        assert!(b.alpha.iter().all(|a| a.abs() < 1e-8));
    }

    #[test]
    fn rejects_bad_inputs() {
        let t = ThetaSet::uniform(1, Theta::splat(0.5), ThetaSharing::PerChannel);
        assert!(matches!(fit_gp(&[[0.0; 6]], &[[1.0]], &t), Err(Error::InvalidArgs(_))));
        let dup = [[0.1; 6], [0.2; 6], [0.1; 6]];
        assert!(matches!(
            fit_gp(&dup, &[[1.0], [2.0], [3.0]], &t),
            Err(Error::DuplicateInputs(0, 2))
        ));
    }

    #[test]
    fn matches_textbook_kriging() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inputs = random_inputs(&mut rng, 20);
        let targets: Vec<[f64; 2]> = inputs
            .iter()
            .map(|x| [(3.0 * x[0]).sin() + x[1] * x[2], 100.0 * (x[3] - x[4]).powi(2)])
            .collect();
        let thetas = ThetaSet::per_channel(&[
            Theta([0.4, 0.5, 0.6, 0.7, 0.8, 0.9]),
            Theta([0.9, 0.3, 0.6, 0.5, 0.4, 1.0]),
        ]);
        let gp = fit_gp(&inputs, &targets, &thetas).unwrap();
        for _ in 0..50 {
            let q: [f64; 6] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
            let pred = gp.predict(&q);
            for ch in 0..2 {
                let y: Vec<f64> = targets.iter().map(|t| t[ch]).collect();
                let b = &gp.blocks()[ch];
                let oracle = textbook_predict(&inputs, &y, &b.theta, b.nugget, &q);
                let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                assert!((pred[ch] - oracle).abs() <= 1e-8 * scale, "{} vs {}", pred[ch], oracle);
            }
        }
    }

    /// Stacked multi-output formulation with A = I: Σ is `(m·n)²` with
    /// block-diagonal per-point covariances, F = 1ₙ ⊗ Iₘ.
    #[test]
    fn per_channel_equals_stacked_formulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 5;
        let m = 3;
        let inputs = random_inputs(&mut rng, n);
        let targets: Vec<[f64; 3]> = inputs
            .iter()
            .map(|x| [x[0] + x[1], (2.0 * x[2]).cos(), x[3] * x[5]])
            .collect();
        let thetas: Vec<Theta> = (0..m).map(|c| Theta::splat(0.3 + 0.2 * c as f64)).collect();
        let gp = fit_gp(&inputs, &targets, &ThetaSet::per_channel(&thetas)).unwrap();
        let nug: Vec<f64> = gp.blocks().iter().map(|b| b.nugget).collect();

        let dim = n * m;
        let mut sigma = vec![vec![0.0; dim]; dim];
        for i in 0..n {
            for j in 0..n {
                for c in 0..m {
                    let mut v = matern32(&inputs[i], &inputs[j], &thetas[c]).unwrap();
                    if i == j {
                        v += nug[c];
                    }
                    sigma[i * m + c][j * m + c] = v;
                }
            }
        }
        let sinv = gauss_jordan_inverse(&sigma);
        let y: Vec<f64> = targets.iter().flat_map(|t| t.iter().copied()).collect();
        // F = 1ₙ ⊗ Iₘ: row i·m + c has a one in column c.
        let f = |row: usize, col: usize| if row % m == col { 1.0 } else { 0.0 };
        let mut ftsf = vec![vec![0.0; m]; m];
        let mut ftsy = vec![0.0; m];
        for a in 0..m {
            for r in 0..dim {
                for s in 0..dim {
                    let w = f(r, a) * sinv[r][s];
                    if w != 0.0 {
                        for b in 0..m {
                            ftsf[a][b] += w * f(s, b);
                        }
                        ftsy[a] += w * y[s];
                    }
                }
            }
        }
        let inv = gauss_jordan_inverse(&ftsf);
        let mu: Vec<f64> = (0..m).map(|a| (0..m).map(|b| inv[a][b] * ftsy[b]).sum()).collect();
        let resid: Vec<f64> = (0..dim).map(|r| y[r] - mu[r % m]).collect();
        let w: Vec<f64> = (0..dim)
            .map(|r| (0..dim).map(|s| sinv[r][s] * resid[s]).sum())
            .collect();
        for _ in 0..10 {
            let q: [f64; 6] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
            let pred = gp.predict(&q);
            for c in 0..m {
                let stacked = mu[c]
                    + (0..n)
                        .map(|j| matern32(&q, &inputs[j], &thetas[c]).unwrap() * w[j * m + c])
                        .sum::<f64>();
                assert!((pred[c] - stacked).abs() < 1e-10, "{c}: {} vs {stacked}", pred[c]);
            }
        }
    }

    #[test]
    fn correlation_matrix_is_valid_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let inputs = random_inputs(&mut rng, 30);
        let theta = Theta([0.2, 0.4, 0.1, 0.8, 0.3, 0.5]);
        let pairs = PairDiffs::new(&inputs);
        let r = pairs.correlation_matrix(&theta);
        let n = inputs.len();
        let m = nalgebra::DMatrix::from_row_slice(n, n, &r);
        assert_eq!(m, m.transpose());
        assert!((0..n).all(|i| m[(i, i)] == 1.0));
        let eig = m.symmetric_eigenvalues();
        assert!(eig.min() > -1e-10);
    }

    #[test]
    fn prediction_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inputs = random_inputs(&mut rng, 12);
        let targets: Vec<[f64; 1]> = inputs.iter().map(|x| [x.iter().sum::<f64>().sin()]).collect();
        let t = ThetaSet::uniform(1, Theta::splat(0.6), ThetaSharing::PerChannel);
        let gp = fit_gp(&inputs, &targets, &t).unwrap();
        let mut order: Vec<usize> = (0..12).collect();
        order.reverse();
        order.swap(2, 7);
        let pin: Vec<[f64; 6]> = order.iter().map(|&i| inputs[i]).collect();
        let ptg: Vec<[f64; 1]> = order.iter().map(|&i| targets[i]).collect();
        let gp2 = fit_gp(&pin, &ptg, &t).unwrap();
        for _ in 0..20 {
            let q: [f64; 6] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
            assert!((gp.predict(&q)[0] - gp2.predict(&q)[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn far_queries_revert_to_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let inputs = random_inputs(&mut rng, 20);
        let targets: Vec<[f64; 1]> = inputs.iter().map(|x| [10.0 * x[0] - 4.0 * x[2]]).collect();
        let gp = fit_gp(
            &inputs,
            &targets,
            &ThetaSet::uniform(1, Theta::splat(0.05), ThetaSharing::PerChannel),
        )
        .unwrap();
        let spread = 14.0;
        let far = [100.0; 6];
        assert!((gp.predict(&far)[0] - gp.blocks()[0].mu_hat[0]).abs() < 1e-3 * spread);
    }

    #[test]
    fn likelihood_argmin_ignores_constant_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let inputs = random_inputs(&mut rng, 10);
        let y: Vec<f64> = inputs.iter().map(|x| (2.0 * x[0]).sin() + x[1]).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + 250.0).collect();
        let grid: Vec<f64> = (0..25).map(|i| 10f64.powf(-2.0 + 0.125 * i as f64)).collect();
        let argmin = |ys: &[f64]| {
            grid.iter()
                .map(|&t| neg_restricted_loglik(&inputs, ys, &Theta::splat(t)).unwrap())
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0
        };
        assert_eq!(argmin(&y), argmin(&shifted));
        let a = neg_restricted_loglik(&inputs, &y, &Theta::splat(0.3)).unwrap();
        let b = neg_restricted_loglik(&inputs, &y, &Theta::splat(0.3)).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn short_length_scale_is_less_likely_for_smooth_data() {
        let inputs: Vec<[f64; 6]> = (0..25)
            .map(|i| {
                let mut x = [0.0; 6];
                x[0] = i as f64 / 24.0;
                x
            })
            .collect();
        let y: Vec<f64> = inputs.iter().map(|x| (1.5 * x[0]).sin()).collect();
        let tiny = neg_restricted_loglik(&inputs, &y, &Theta::splat(1e-4)).unwrap();
        let wide = neg_restricted_loglik(&inputs, &y, &Theta::splat(1.0)).unwrap();
        assert!(wide < tiny);
    }

    /// Draws one sample path with a single active coordinate and checks the
    /// fitted length-scale of that coordinate.
    #[test]
    fn recovers_length_scale_of_synthetic_draw() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 120;
        let true_theta = 0.25;
        let inputs = random_inputs(&mut rng, n);
        let active = Theta([true_theta, 1e6, 1e6, 1e6, 1e6, 1e6]);
        let r: Vec<f64> = (0..n)
            .flat_map(|i| {
                let xi = inputs[i];
                let inputs = &inputs;
                (0..n).map(move |j| matern32(&xi, &inputs[j], &active).unwrap() + if i == j { 1e-8 } else { 0.0 })
            })
            .collect();
        let l = nalgebra::DMatrix::from_row_slice(n, n, &r).cholesky().unwrap().l();
        let z = nalgebra::DVector::from_fn(n, |_, _| {
            // Box-Muller
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        });
        let y = l * z;
        let targets: Vec<[f64; 1]> = y.iter().map(|v| [*v]).collect();
        let fitted = optimize_theta(
            &inputs,
            &targets,
            &ThetaSet::uniform(1, Theta::splat(1.0), ThetaSharing::PerChannel),
            &PatternSearch::default(),
        )
        .unwrap();
        let t0 = fitted.channel(0).0[0];
        assert!(t0 > true_theta / 3.0 && t0 < true_theta * 3.0, "θ₀ = {t0}");
    }

    #[test]
    fn optimization_improves_objective_and_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let inputs = random_inputs(&mut rng, 30);
        let y: Vec<f64> = inputs.iter().map(|x| (4.0 * x[0]).sin() * x[1] + x[2]).collect();
        let targets: Vec<[f64; 1]> = y.iter().map(|v| [*v]).collect();
        for start in [
            Theta::splat(THETA_MIN),
            Theta::splat(THETA_MAX),
            Theta([THETA_MIN, THETA_MAX, THETA_MIN, THETA_MAX, THETA_MIN, THETA_MAX]),
        ] {
            let set = ThetaSet::uniform(1, start, ThetaSharing::PerChannel);
            let fitted = optimize_theta(&inputs, &targets, &set, &PatternSearch::default()).unwrap();
            let th = fitted.channel(0);
            assert!(th.0.iter().all(|v| (THETA_MIN..=THETA_MAX).contains(v)));
            let before = neg_restricted_loglik(&inputs, &y, &start).unwrap_or(f64::INFINITY);
            let after = neg_restricted_loglik(&inputs, &y, &th).unwrap();
            assert!(after <= before);
        }
    }

    #[test]
    fn shared_groups_share_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let inputs = random_inputs(&mut rng, 10);
        let targets: Vec<Vec<f64>> = inputs
            .iter()
            .map(|x| (0..42).map(|c| x[c % 6] * c as f64).collect())
            .collect();
        let set = ThetaSet::uniform(42, Theta::splat(0.5), ThetaSharing::StressTangent);
        let gp = fit_gp(&inputs, &targets, &set).unwrap();
        assert_eq!(gp.blocks().len(), 2);
        assert_eq!(gp.blocks()[1].channels, 6..42);
        let per = fit_gp(
            &inputs,
            &targets,
            &ThetaSet::uniform(42, Theta::splat(0.5), ThetaSharing::PerChannel),
        )
        .unwrap();
        let q = [0.3; 6];
        for (a, b) in gp.predict(&q).iter().zip(per.predict(&q)) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }
}
