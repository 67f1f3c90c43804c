//! Hyperbolically weighted sup-norms and the distances built on them.
//!
//! All sups are grid lower bounds (see [`weighted_sup`]). Distances evaluate
//! the two operands separately and subtract pointwise, which keeps
//! `d(f, g) = d(g, f)` exact in floating point.

use serde::{Deserialize, Serialize};

use crate::complex_serde;
use crate::disk_map::DiskMap;
use crate::error::{Error, Result};
use crate::grid::{weighted_sup, NormEstimate, RefinementPolicy};
use crate::operators::{pre_schwarzian, schwarzian, OneDifferential, QuadDifferential};
use crate::poly::C64;

/// `‖φ‖_{1,∞} = sup (1 − |z|²)|φ(z)|`
pub fn norm_a1(phi: &OneDifferential, policy: &RefinementPolicy) -> NormEstimate {
    weighted_sup(|z| phi.eval(z), 1, policy)
}

/// `‖ψ‖_{2,∞} = sup (1 − |z|²)²|ψ(z)|`
pub fn norm_a2(psi: &QuadDifferential, policy: &RefinementPolicy) -> NormEstimate {
    weighted_sup(|z| psi.eval(z), 2, policy)
}

/// `φ` with its `‖·‖_{1,∞}` estimate cached.
pub fn with_norm_a1(phi: OneDifferential, policy: &RefinementPolicy) -> OneDifferential {
    let v = norm_a1(&phi, policy).value;
    phi.set_norm(v)
}

pub fn with_norm_a2(psi: QuadDifferential, policy: &RefinementPolicy) -> QuadDifferential {
    let v = norm_a2(&psi, policy).value;
    psi.set_norm(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub metric: String,
    pub value: f64,
    /// The differential part of the distance.
    pub norm: NormEstimate,
    /// `|f'(0) − g'(0)|` for `d_o`, zero otherwise.
    pub scalar_gap: f64,
}

/// `d_s(f, g) = ‖𝒮(f) − 𝒮(g)‖_{2,∞}`
pub fn d_s(f: &DiskMap, g: &DiskMap, policy: &RefinementPolicy) -> Result<Distance> {
    let (a, b) = (schwarzian(f)?, schwarzian(g)?);
    let norm = weighted_sup(|z| a.eval(z) - b.eval(z), 2, policy);
    Ok(Distance {
        metric: "s".into(),
        value: norm.value,
        norm,
        scalar_gap: 0.0,
    })
}

/// `d_ps(f, g) = ‖𝒜(f) − 𝒜(g)‖_{1,∞}`
pub fn d_ps(f: &DiskMap, g: &DiskMap, policy: &RefinementPolicy) -> Result<Distance> {
    let (a, b) = (pre_schwarzian(f)?, pre_schwarzian(g)?);
    let norm = weighted_sup(|z| a.eval(z) - b.eval(z), 1, policy);
    Ok(Distance {
        metric: "ps".into(),
        value: norm.value,
        norm,
        scalar_gap: 0.0,
    })
}

/// `d_o(f, g) = ‖𝒜(f) − 𝒜(g)‖_{1,∞} + |f'(0) − g'(0)|`
pub fn d_o(f: &DiskMap, g: &DiskMap, policy: &RefinementPolicy) -> Result<Distance> {
    let ps = d_ps(f, g, policy)?;
    let gap = (f.a1() - g.a1()).norm();
    Ok(Distance {
        metric: "o".into(),
        value: ps.value + gap,
        norm: ps.norm,
        scalar_gap: gap,
    })
}

/// Complex dilatation sampled on a grid in the exterior disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeltramiSample {
    #[serde(with = "complex_serde::vec")]
    points: Vec<C64>,
    #[serde(with = "complex_serde::vec")]
    values: Vec<C64>,
    k: f64,
}

impl BeltramiSample {
    pub fn new(points: Vec<C64>, values: Vec<C64>) -> Result<Self> {
        if points.len() != values.len() || points.is_empty() {
            return Err(Error::InvalidArgument(
                "dilatation sample needs one value per grid point".into(),
            ));
        }
        if let Some(p) = points.iter().find(|p| p.norm() <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "dilatation grid point {p} is not in the exterior disk"
            )));
        }
        let k = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(k < 1.0) {
            return Err(Error::Dilatation(k));
        }
        Ok(BeltramiSample { points, values, k })
    }

    /// Polar grid `{ρ_i e^{iθ_j}}` with `ρ_i = 1/r_i` for `r_i` evenly spaced in (0, 1).
    pub fn exterior_grid(rings: usize, angular: usize) -> Vec<C64> {
        let mut pts = Vec::with_capacity(rings * angular);
        for i in 1..=rings {
            let r = i as f64 / (rings + 1) as f64;
            for j in 0..angular {
                pts.push(C64::from_polar(
                    1.0 / r,
                    std::f64::consts::TAU * j as f64 / angular as f64,
                ));
            }
        }
        pts
    }

    pub fn from_fn<F: Fn(C64) -> C64>(points: Vec<C64>, mu: F) -> Result<Self> {
        let values = points.iter().map(|&z| mu(z)).collect();
        BeltramiSample::new(points, values)
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `sup |μ|`
    pub fn k(&self) -> f64 {
        self.k
    }
}

/// `½ log((1 + κ)/(1 − κ))` with `κ = sup |(μ − ν)/(1 − ν̄μ)|`: the
/// Teichmüller distance bound obtained from these two particular extensions.
pub fn teich_distance_upper(mu: &BeltramiSample, nu: &BeltramiSample) -> Result<f64> {
    if mu.points != nu.points {
        return Err(Error::InvalidArgument(
            "dilatation samples live on different grids".into(),
        ));
    }
    let kappa = mu
        .values
        .iter()
        .zip(&nu.values)
        .map(|(&m, &n)| (m - n).norm() / (C64::new(1.0, 0.0) - n.conj() * m).norm())
        .fold(0.0, f64::max);
    if !(kappa < 1.0) {
        return Err(Error::Dilatation(kappa));
    }
    Ok(0.5 * ((1.0 + kappa) / (1.0 - kappa)).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Poly, Rational};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn policy() -> RefinementPolicy {
        RefinementPolicy::default()
    }

    #[test]
    fn constant_and_linear_norms() {
        let b = c(0.3, -0.4);
        let n = norm_a1(&OneDifferential::constant(b), &policy());
        assert!((n.value - 0.5).abs() < 1e-12);
        assert!(n.argmax.norm() < 1e-9);
        // max of r(1 − r²) is 2/(3√3) at r = 1/√3
        let z = OneDifferential::from_series(Poly::from_real(&[0.0, 1.0]));
        let n = norm_a1(&z, &policy());
        assert!((n.value - 2.0 / (3.0 * 3f64.sqrt())).abs() < 1e-9);
        assert!((n.argmax.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-4);
        assert_eq!(norm_a2(&QuadDifferential::zero(), &policy()).value, 0.0);
        assert!((norm_a2(&QuadDifferential::constant(b), &policy()).value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn koebe_norms_reach_six() {
        let one = Poly::from_real(&[1.0, 0.0, -1.0]);
        let a = OneDifferential::from_rational(
            Rational::new(Poly::from_real(&[4.0, 2.0]), one.clone()),
            32,
        );
        let n = norm_a1(&a, &policy());
        assert!(n.value <= 6.0 + 1e-6 && n.value >= 6.0 - 1e-3, "{}", n.value);
        assert!(n.history.windows(2).all(|w| w[0] <= w[1]));
        let s = QuadDifferential::from_rational(
            Rational::new(Poly::from_real(&[-6.0]), &one * &one),
            32,
        );
        let n = norm_a2(&s, &policy());
        assert!((n.value - 6.0).abs() <= 1e-3, "{}", n.value);
    }

    #[test]
    fn distance_examples() {
        let id = DiskMap::identity();
        let f = DiskMap::new(vec![c(1.0, 0.0), c(0.2, 0.0)], 1.5).unwrap();
        assert_eq!(d_s(&f, &f, &policy()).unwrap().value, 0.0);
        assert_eq!(d_o(&f, &f, &policy()).unwrap().value, 0.0);
        let two = DiskMap::linear(c(2.0, 0.0));
        assert_eq!(d_o(&id, &two, &policy()).unwrap().value, 1.0);

        let ps = d_ps(&id, &f, &policy()).unwrap().value;
        let direct = norm_a1(&pre_schwarzian(&f).unwrap(), &policy()).value;
        assert!((ps - direct).abs() < 1e-12);
        assert_eq!(d_o(&id, &f, &policy()).unwrap().value, ps);
        // For real r, (1 − r²)·0.4/(1 − 0.4r) peaks at r = 0.2087...
        let oracle = (0..=200_000)
            .map(|i| {
                let r = -(i as f64) / 200_000.0;
                (1.0 - r * r) * 0.4 / (1.0 + 0.4 * r)
            })
            .fold(0.0, f64::max);
        assert!((ps - oracle).abs() < 1e-9, "{ps} vs {oracle}");
    }

    #[test]
    fn schwarzian_distance_ignores_mobius() {
        let f = DiskMap::new(vec![c(1.0, 0.0), c(0.1, 0.05)], 1.5).unwrap();
        // T(w) = w/(1 + 0.2w) composed exactly.
        let tf = Poly::new(f.as_poly().div_series(
            &(&f.as_poly().scale(c(0.2, 0.0)) + &Poly::one()),
            80,
        ).into_coeffs());
        let tf = DiskMap::from_poly(&tf, 1.5).unwrap();
        assert!(d_s(&f, &tf, &policy()).unwrap().value < 1e-9);
    }

    #[test]
    fn teichmuller_bound_examples() {
        let pts = BeltramiSample::exterior_grid(4, 16);
        let zero = BeltramiSample::from_fn(pts.clone(), |_| c(0.0, 0.0)).unwrap();
        let half = BeltramiSample::from_fn(pts.clone(), |_| c(0.5, 0.0)).unwrap();
        assert_eq!(teich_distance_upper(&half, &half).unwrap(), 0.0);
        let d = teich_distance_upper(&half, &zero).unwrap();
        assert!((d - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert_eq!(d, teich_distance_upper(&zero, &half).unwrap());

        let wavy = BeltramiSample::from_fn(pts.clone(), |z| 0.3 / (z * z)).unwrap();
        assert_eq!(
            teich_distance_upper(&wavy, &half).unwrap(),
            teich_distance_upper(&half, &wavy).unwrap()
        );
        assert!(matches!(
            BeltramiSample::from_fn(pts, |_| c(1.0, 0.0)),
            Err(Error::Dilatation(_))
        ));
    }
}
