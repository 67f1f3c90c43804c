//! Polar evaluation grids on the unit disk and the hyperbolically weighted
//! sup estimator built on them.
//!
//! A grid is a set of rings `0 < r_1 < … < r_m < 1`, each sampled at the same
//! number of equispaced angles, plus the center. Refinement doubles the
//! angular count (up to a cap) and adds one ring halfway between the current
//! outermost ring and the unit circle, so every refined grid contains its
//! predecessor. Sup estimates are therefore nondecreasing along a refinement
//! sequence; they are lower bounds, never certified upper bounds.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefinementPolicy {
    /// Uniform rings filling `(0, 1 - initial_gap]`.
    pub base_rings: usize,
    pub initial_angular: usize,
    pub max_angular: usize,
    /// `1 - r_max` of the unrefined grid.
    pub initial_gap: f64,
    /// Hard cap on the outermost ring.
    pub r_cap: f64,
    pub min_levels: usize,
    pub max_levels: usize,
    /// Stop once the relative change between levels drops below this.
    pub rel_tol: f64,
    /// Local pattern-search polish of the best grid nodes.
    pub polish: bool,
}

impl Default for RefinementPolicy {
    fn default() -> Self {
        RefinementPolicy {
            base_rings: 16,
            initial_angular: 32,
            max_angular: 512,
            initial_gap: 1.0 / 16.0,
            r_cap: 1.0 - 1e-9,
            min_levels: 3,
            max_levels: 40,
            rel_tol: 1e-6,
            polish: true,
        }
    }
}

impl RefinementPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.base_rings == 0 || self.initial_angular < 8 {
            return Err(Error::Config(
                "grid needs at least one ring and 8 angular samples".into(),
            ));
        }
        if !(self.initial_gap > 0.0 && self.initial_gap < 1.0) {
            return Err(Error::Config("initial_gap must lie in (0, 1)".into()));
        }
        if !(self.r_cap < 1.0 && self.r_cap >= 1.0 - self.initial_gap) {
            return Err(Error::Config("r_cap must lie in [1 - initial_gap, 1)".into()));
        }
        if !(self.rel_tol > 0.0) || self.max_levels == 0 {
            return Err(Error::Config("rel_tol and max_levels must be positive".into()));
        }
        Ok(())
    }

    /// Cheaper single-level policy for bulk scans.
    pub fn coarse() -> Self {
        RefinementPolicy {
            min_levels: 1,
            max_levels: 1,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    radii: Vec<f64>,
    angular: usize,
}

/// Compact description of a grid for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rings: usize,
    pub angular: usize,
    pub r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub r: f64,
    pub theta: f64,
    pub z: C64,
}

impl EvaluationGrid {
    pub fn new(mut radii: Vec<f64>, angular: usize) -> Result<Self> {
        radii.sort_by(|a, b| a.total_cmp(b));
        radii.dedup();
        if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidArgument(
                "grid radii must lie strictly inside (0, 1)".into(),
            ));
        }
        if angular < 8 {
            return Err(Error::InvalidArgument(
                "grid needs at least 8 angular samples per ring".into(),
            ));
        }
        Ok(EvaluationGrid { radii, angular })
    }

    pub fn initial(policy: &RefinementPolicy) -> Self {
        let outer = 1.0 - policy.initial_gap;
        let radii = (1..=policy.base_rings)
            .map(|k| outer * k as f64 / policy.base_rings as f64)
            .collect();
        EvaluationGrid {
            radii,
            angular: policy.initial_angular.max(8),
        }
    }

    /// Next grid in the nested sequence, or `None` once both the angular
    /// count and the outer ring have hit their caps.
    pub fn refined(&self, policy: &RefinementPolicy) -> Option<Self> {
        let mut radii = self.radii.clone();
        let r_max = self.r_max();
        let next = 1.0 - 0.5 * (1.0 - r_max);
        let grew_ring = next <= policy.r_cap && next > r_max;
        if grew_ring {
            radii.push(next);
        }
        let angular = if self.angular * 2 <= policy.max_angular {
            self.angular * 2
        } else {
            self.angular
        };
        if !grew_ring && angular == self.angular {
            return None;
        }
        Some(EvaluationGrid { radii, angular })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.last().expect("grid has rings")
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            rings: self.radii.len(),
            angular: self.angular,
            r_max: self.r_max(),
        }
    }

    /// Number of nodes including the center.
    pub fn len(&self) -> usize {
        1 + self.radii.len() * self.angular
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Center first, then ring by ring, angles in increasing order.
    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        let m = self.angular;
        std::iter::once(Node {
            r: 0.0,
            theta: 0.0,
            z: C64::new(0.0, 0.0),
        })
        .chain(self.radii.iter().flat_map(move |&r| {
            (0..m).map(move |j| {
                let theta = TAU * j as f64 / m as f64;
                Node {
                    r,
                    theta,
                    z: C64::from_polar(r, theta),
                }
            })
        }))
    }

    /// Equispaced points on the unit circle at this grid's angular count.
    pub fn boundary_angles(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.angular;
        (0..m).map(move |j| TAU * j as f64 / m as f64)
    }
}

/// `(1 - r^2)^power`, computed without cancellation near `r = 1`.
pub fn hyperbolic_weight(r: f64, power: i32) -> f64 {
    ((1.0 - r) * (1.0 + r)).powi(power)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    #[serde(with = "crate::complex_serde::single")]
    pub argmax: C64,
    pub grid: GridSpec,
    /// Running maximum after each refinement level.
    pub history: Vec<f64>,
}

/// Estimates `sup_{|z|<1} (1-|z|^2)^power |f(z)|` by nested grid refinement.
pub fn weighted_sup<F>(f: F, power: i32, policy: &RefinementPolicy) -> NormEstimate
where
    F: Fn(C64) -> C64,
{
    let weighted = |r: f64, theta: f64| -> f64 {
        let v = hyperbolic_weight(r, power) * f(C64::from_polar(r, theta)).norm();
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut grid = EvaluationGrid::initial(policy);
    let mut history: Vec<f64> = Vec::new();
    let mut best = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut level = 0;
    loop {
        let dr = grid.r_max() / policy.base_rings as f64;
        let dtheta = TAU / grid.angular() as f64;
        let samples: Vec<(f64, f64, f64)> = grid
            .nodes()
            .map(|node| (weighted(node.r, node.theta), node.r, node.theta))
            .collect();
        let mut top = distinct_peaks(samples, 3, 2.0 * dr, 2.0 * dtheta);
        if policy.polish {
            for cand in top.iter_mut() {
                if cand.0.is_finite() {
                    *cand = polish(&weighted, *cand, grid.r_max(), dr, dtheta);
                }
            }
        }
        for cand in &top {
            if cand.0 > best.0 {
                best = *cand;
            }
        }
        let prev = history.last().copied();
        history.push(best.0);
        level += 1;

        let settled = match prev {
            Some(p) => best.0 - p <= policy.rel_tol * best.0 || !best.0.is_finite(),
            None => false,
        };
        if level >= policy.max_levels || (level >= policy.min_levels && settled) {
            break;
        }
        if level >= policy.min_levels && best.0 == 0.0 {
            break;
        }
        match grid.refined(policy) {
            Some(g) => grid = g,
            None => break,
        }
    }
    NormEstimate {
        value: best.0,
        argmax: C64::from_polar(best.1, best.2),
        grid: grid.spec(),
        history,
    }
}

/// Best samples that are pairwise separated, so the polish explores distinct
/// local maxima instead of neighbours of one peak.
fn distinct_peaks(
    mut samples: Vec<(f64, f64, f64)>,
    keep: usize,
    min_dr: f64,
    min_dtheta: f64,
) -> Vec<(f64, f64, f64)> {
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut chosen: Vec<(f64, f64, f64)> = Vec::with_capacity(keep);
    for cand in samples.into_iter().take(256) {
        let separated = chosen.iter().all(|c| {
            let dth = (c.2 - cand.2).rem_euclid(TAU);
            let dth = dth.min(TAU - dth);
            (c.1 - cand.1).abs() > min_dr || dth > min_dtheta
        });
        if separated {
            chosen.push(cand);
            if chosen.len() == keep {
                break;
            }
        }
    }
    chosen
}

/// Compass search in `(r, θ)` with `r ∈ [0, r_max]`.
fn polish<F>(w: &F, start: (f64, f64, f64), r_max: f64, dr0: f64, dt0: f64) -> (f64, f64, f64)
where
    F: Fn(f64, f64) -> f64,
{
    let (mut best, mut r, mut t) = start;
    let mut dr = dr0;
    let mut dt = dt0;
    let mut iters = 0;
    while (dr > 1e-14 || dt > 1e-14) && iters < 4000 {
        iters += 1;
        let mut moved = false;
        for (nr, nt) in [(r + dr, t), (r - dr, t), (r, t + dt), (r, t - dt)] {
            let nr = nr.clamp(0.0, r_max);
            let v = w(nr, nt);
            if v > best {
                best = v;
                r = nr;
                t = nt;
                moved = true;
                break;
            }
        }
        if !moved {
            dr *= 0.5;
            dt *= 0.5;
        }
    }
    (best, r, t.rem_euclid(TAU))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_is_nested() {
        let policy = RefinementPolicy::default();
        let g0 = EvaluationGrid::initial(&policy);
        let g1 = g0.refined(&policy).unwrap();
        assert_eq!(g1.angular(), 2 * g0.angular());
        for r in g0.radii() {
            assert!(g1.radii().contains(r));
        }
        assert!(g1.r_max() > g0.r_max() && g1.r_max() < 1.0);
    }

    #[test]
    fn constant_attains_at_center() {
        let est = weighted_sup(|_| C64::new(0.0, 3.0), 1, &RefinementPolicy::default());
        assert!((est.value - 3.0).abs() < 1e-12);
        assert!(est.argmax.norm() < 1e-6);
    }

    #[test]
    fn linear_function_calculus_oracle() {
        // max_r r (1 - r^2) = 2/(3 sqrt 3) at r = 1/sqrt 3.
        let est = weighted_sup(|z| z, 1, &RefinementPolicy::default());
        let expected = 2.0 / (3.0 * 3f64.sqrt());
        assert!((est.value - expected).abs() < 1e-12);
        assert!(est.history.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(EvaluationGrid::new(vec![0.5, 1.0], 16).is_err());
        assert!(EvaluationGrid::new(vec![0.5], 4).is_err());
        assert!(EvaluationGrid::new(vec![0.2, 0.9], 16).is_ok());
    }
}
