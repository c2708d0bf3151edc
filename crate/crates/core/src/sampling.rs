//! Training and test designs in applied-stretch space.
//!
//! Training points come from nested hypercubes grown around the reference
//! stretch `[1, 1, 1, 0, 0, 0]`: every layer holds all `3^6` combinations of
//! the offsets `{−Δc, 0, +Δc}` with `Δc` growing linearly up to the domain
//! half-width. Test points are drawn by plain Latin hypercube sampling with
//! the ChaCha8 generator of `rand_chacha` 0.3 (seeded via `seed_from_u64`)
//! and `rand` 0.8's Fisher-Yates `shuffle`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mech::AppliedStretch;

/// Points per layer, `3^6`.
pub const LAYER_SIZE: usize = 729;

#[derive(Clone, Debug, PartialEq)]
pub struct HypercubeDesign {
    pub delta_t: f64,
    pub layers: usize,
    pub points: Vec<AppliedStretch>,
}

impl HypercubeDesign {
    /// Spacing between consecutive layers, `ΔT / n_h`.
    pub fn layer_spacing(&self) -> f64 {
        self.delta_t / self.layers as f64
    }

    /// `729 + (n_h − 1)·728`
    pub fn expected_len(layers: usize) -> usize {
        LAYER_SIZE + (layers - 1) * (LAYER_SIZE - 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhsDesign {
    pub delta_t: f64,
    pub seed: u64,
    pub points: Vec<AppliedStretch>,
}

/// Nested-hypercube design: the reference point first, then each layer
/// `i = 0..n_h` in odometer order (last coordinate fastest) with the
/// reference point left out.
pub fn hypercube_layers(delta_t: f64, layers: usize) -> Result<HypercubeDesign> {
    if !(delta_t > 0.0 && delta_t.is_finite()) || layers == 0 {
        return Err(Error::InvalidArgs(format!(
            "hypercube design needs delta_T > 0 and n_h >= 1 (got {delta_t}, {layers})"
        )));
    }
    let origin = AppliedStretch::REFERENCE.0;
    let mut points = Vec::with_capacity(HypercubeDesign::expected_len(layers));
    points.push(AppliedStretch::REFERENCE);
    for layer in 0..layers {
        // The fraction is exactly 1.0 on the outermost layer, so the
        // extremes land on ±delta_t.
        let dc = delta_t * ((layer + 1) as f64 / layers as f64);
        let offsets = [-dc, 0.0, dc];
        for code in 0..LAYER_SIZE {
            let mut digits = [0usize; 6];
            let mut rest = code;
            for d in digits.iter_mut().rev() {
                *d = rest % 3;
                rest /= 3;
            }
            if digits.iter().all(|&d| d == 1) {
                continue;
            }
            let mut p = origin;
            for (v, &d) in p.iter_mut().zip(&digits) {
                *v += offsets[d];
            }
            points.push(AppliedStretch(p));
        }
    }
    Ok(HypercubeDesign {
        delta_t,
        layers,
        points,
    })
}

/// Latin hypercube over `[f0 − ΔT, f0 + ΔT]^6`: each coordinate gets one
/// uniformly placed sample in each of `n_t` equal bins.
pub fn lhs_sample(delta_t: f64, n_t: usize, seed: u64) -> Result<LhsDesign> {
    if !(delta_t > 0.0 && delta_t.is_finite()) || n_t == 0 {
        return Err(Error::InvalidArgs(format!(
            "LHS needs delta_T > 0 and n_t >= 1 (got {delta_t}, {n_t})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = AppliedStretch::REFERENCE.0;
    let width = 2.0 * delta_t;
    let mut points = vec![origin; n_t];
    for dim in 0..6 {
        let mut bins: Vec<usize> = (0..n_t).collect();
        bins.shuffle(&mut rng);
        for (p, &bin) in points.iter_mut().zip(&bins) {
            let u: f64 = rng.gen();
            p[dim] = origin[dim] - delta_t + width * ((bin as f64 + u) / n_t as f64);
        }
    }
    Ok(LhsDesign {
        delta_t,
        seed,
        points: points.into_iter().map(AppliedStretch).collect(),
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::mech::compose_f;

    fn bits(p: &AppliedStretch) -> [u64; 6] {
        p.0.map(f64::to_bits)
    }

    /// Enumerates every layer in full and deduplicates through a set union.
    fn brute_force_count(delta_t: f64, layers: usize) -> usize {
        let mut set = BTreeSet::new();
        for layer in 0..layers {
            let dc = delta_t * ((layer + 1) as f64 / layers as f64);
            let axis = [-dc, 0.0, dc];
            for a in axis {
                for b in axis {
                    for c in axis {
                        for d in axis {
                            for e in axis {
                                for f in axis {
                                    set.insert(bits(&AppliedStretch([1.0 + a, 1.0 + b, 1.0 + c, d, e, f])));
                                }
                            }
                        }
                    }
                }
            }
        }
        set.len()
    }

    #[test]
    fn single_layer_spans_the_domain() {
        let d = hypercube_layers(0.175, 1).unwrap();
        assert_eq!(d.points.len(), 729);
        assert_eq!(d.points[0], AppliedStretch::REFERENCE);
        for k in 0..6 {
            let lo = d.points.iter().map(|p| p.0[k]).fold(f64::INFINITY, f64::min);
            let hi = d.points.iter().map(|p| p.0[k]).fold(f64::NEG_INFINITY, f64::max);
            let f0 = AppliedStretch::REFERENCE.0[k];
            assert_eq!(lo, f0 - 0.175);
            assert_eq!(hi, f0 + 0.175);
        }
    }

    #[test]
    fn twenty_layers_give_14561_points() {
        assert_eq!(hypercube_layers(0.175, 20).unwrap().points.len(), 14561);
    }

    #[test]
    fn count_matches_set_union() {
        for layers in 1..=20 {
            let d = hypercube_layers(0.175, layers).unwrap();
            assert_eq!(d.points.len(), HypercubeDesign::expected_len(layers));
            assert_eq!(d.points.len(), brute_force_count(0.175, layers), "layers = {layers}");
            let unique: BTreeSet<_> = d.points.iter().map(bits).collect();
            assert_eq!(unique.len(), d.points.len());
            assert_eq!(d.points[0], AppliedStretch::REFERENCE);
        }
    }

    #[test]
    fn all_corners_present() {
        let d = hypercube_layers(0.175, 5).unwrap();
        let set: BTreeSet<_> = d.points.iter().map(bits).collect();
        for mask in 0..64u32 {
            let mut p = AppliedStretch::REFERENCE.0;
            for (k, v) in p.iter_mut().enumerate() {
                *v += if mask & (1 << k) != 0 { 0.175 } else { -0.175 };
            }
            assert!(set.contains(&bits(&AppliedStretch(p))), "missing corner {mask:06b}");
        }
    }

    #[test]
    fn designs_are_invertible() {
        for layers in [1, 7, 20] {
            for p in hypercube_layers(0.175, layers).unwrap().points {
                assert!(compose_f(&p).determinant() > 0.0);
            }
        }
    }

    #[test]
    fn odometer_order_within_layer() {
        let d = hypercube_layers(0.1, 2).unwrap();
        // first point of layer 0 after the reference: all offsets at −Δc
        assert_eq!(d.points[1].0, [0.95, 0.95, 0.95, -0.05, -0.05, -0.05]);
        // last coordinate varies fastest
        assert_eq!(d.points[2].0, [0.95, 0.95, 0.95, -0.05, -0.05, 0.0]);
        // layer 1 starts at index 729 with Δc = 0.1
        assert_eq!(d.points[729].0, [0.9, 0.9, 0.9, -0.1, -0.1, -0.1]);
    }

    #[test]
    fn invalid_hypercube_args() {
        assert!(hypercube_layers(0.0, 3).is_err());
        assert!(hypercube_layers(0.1, 0).is_err());
        assert!(lhs_sample(0.1, 0, 1).is_err());
        assert!(lhs_sample(-0.1, 4, 1).is_err());
    }

    fn assert_stratified(d: &LhsDesign, n: usize) {
        for k in 0..6 {
            let lo = AppliedStretch::REFERENCE.0[k] - d.delta_t;
            let mut seen = vec![false; n];
            for p in &d.points {
                let bin = (((p.0[k] - lo) / (2.0 * d.delta_t)) * n as f64).floor() as usize;
                let bin = bin.min(n - 1);
                assert!(!seen[bin], "coordinate {k}: bin {bin} hit twice");
                seen[bin] = true;
            }
        }
    }

    #[test]
    fn lhs_is_stratified() {
        let d = lhs_sample(0.175, 4, 99).unwrap();
        assert_stratified(&d, 4);
        let d = lhs_sample(0.175, 1000, 5).unwrap();
        assert_stratified(&d, 1000);
        let one = lhs_sample(0.175, 1, 0).unwrap();
        assert_eq!(one.points.len(), 1);
        for (v, f0) in one.points[0].0.iter().zip(AppliedStretch::REFERENCE.0) {
            assert!((v - f0).abs() <= 0.175);
        }
    }

    #[test]
    fn lhs_is_reproducible() {
        let a = lhs_sample(0.175, 50, 42).unwrap();
        let b = lhs_sample(0.175, 50, 42).unwrap();
        let c = lhs_sample(0.175, 50, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.points, c.points);
    }
}
