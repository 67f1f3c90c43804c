//! Conformal welding of smooth near-identity circle maps.
//!
//! `weld(γ, m)` finds `f` on 𝔻 and `g` on 𝔻* with `g(e^{iγ(θ)}) = f(e^{iθ})`,
//! `f(0) = 0`, `|f'(0)| = e^m`, `g(∞) = ∞`, `g'(∞) > 0`. `unweld(f)` goes back
//! by computing the exterior map of `f(𝔻̄)` from the equilibrium measure of
//! its boundary.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex_serde;
use crate::disk_map::{DiskMap, RHO_CAP};
use crate::error::{Error, Result};
use crate::poly::{Poly, C64};
use crate::polyline;

/// `γ(θ) = θ + u(θ)` with `u(θ) = c_0 + 2 Re Σ_{k=1}^{M} c_k e^{ikθ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircleMapWire", into = "CircleMapWire")]
pub struct CircleMap {
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct CircleMapWire {
    modes: usize,
    #[serde(with = "complex_serde::vec")]
    u_coeffs: Vec<C64>,
}

impl From<CircleMap> for CircleMapWire {
    fn from(g: CircleMap) -> Self {
        CircleMapWire {
            modes: g.modes(),
            u_coeffs: g.coeffs,
        }
    }
}

impl TryFrom<CircleMapWire> for CircleMap {
    type Error = Error;
    fn try_from(w: CircleMapWire) -> Result<Self> {
        if w.u_coeffs.len() != w.modes + 1 {
            return Err(Error::CircleMap(format!(
                "expected {} coefficients for {} modes, got {}",
                w.modes + 1,
                w.modes,
                w.u_coeffs.len()
            )));
        }
        CircleMap::new(w.u_coeffs)
    }
}

const MARGIN_SAMPLES: usize = 1024;

impl CircleMap {
    /// `coeffs = [c_0, …, c_M]`; `c_0` must be real.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::CircleMap("coefficients must be finite".into()));
        }
        if coeffs[0].im.abs() > 1e-14 {
            return Err(Error::CircleMap("c_0 must be real".into()));
        }
        let g = CircleMap { coeffs };
        let margin = g.margin();
        if margin <= 0.0 {
            return Err(Error::CircleMap(format!(
                "lift is not increasing (min 1 + u' = {margin:.4})"
            )));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        CircleMap {
            coeffs: vec![C64::new(0.0, 0.0)],
        }
    }

    pub fn rotation(theta0: f64) -> Self {
        CircleMap {
            coeffs: vec![C64::new(theta0, 0.0)],
        }
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn u(&self, theta: f64) -> f64 {
        let e = C64::from_polar(1.0, theta);
        let mut p = e;
        let mut acc = self.coeffs[0].re;
        for c in &self.coeffs[1..] {
            acc += 2.0 * (c * p).re;
            p *= e;
        }
        acc
    }

    pub fn u_prime(&self, theta: f64) -> f64 {
        let e = C64::from_polar(1.0, theta);
        let mut p = e;
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            acc += 2.0 * (C64::new(0.0, k as f64) * c * p).re;
            p *= e;
        }
        acc
    }

    pub fn angle(&self, theta: f64) -> f64 {
        theta + self.u(theta)
    }

    /// `min 1 + u'(θ)` over a dense sample.
    pub fn margin(&self) -> f64 {
        (0..MARGIN_SAMPLES)
            .map(|j| 1.0 + self.u_prime(TAU * j as f64 / MARGIN_SAMPLES as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// `Σ_{k≠0} |c_k|` over both signs of `k`; the rotation `c_0` is free.
    pub fn l1_mass(&self) -> f64 {
        2.0 * self.coeffs[1..].iter().map(|c| c.norm()).sum::<f64>()
    }

    /// Least-squares fit of `u` from samples of `γ` at `θ_j = 2πj/n`.
    pub fn fit(gamma: &[f64], modes: usize) -> Result<Self> {
        let n = gamma.len();
        if n < 2 * modes + 1 {
            return Err(Error::CircleMap("too few samples for the requested modes".into()));
        }
        let u: Vec<f64> = gamma
            .iter()
            .enumerate()
            .map(|(j, g)| g - TAU * j as f64 / n as f64)
            .collect();
        let coeffs = (0..=modes)
            .map(|k| {
                let s: C64 = u
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v * C64::from_polar(1.0, -TAU * (j * k % n) as f64 / n as f64))
                    .sum();
                if k == 0 {
                    C64::new(s.re / n as f64, 0.0)
                } else {
                    s / n as f64
                }
            })
            .collect();
        CircleMap::new(coeffs)
    }

    /// Largest `|γ(θ) − other(θ)|` (mod 2π) over `n` samples.
    pub fn angle_distance(&self, other: &CircleMap, n: usize) -> f64 {
        (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                wrap(self.angle(t) - other.angle(t)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Reduce to `(−π, π]`.
pub fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// A near-identity circle map with `M` modes, `|c_k| ∝ k^{-2}` random
/// phases, two-sided ℓ¹ mass `budget`, rotation in `[−0.5, 0.5]`, rescaled
/// if needed so that `1 + u' ≥ min_margin`.
pub fn random_circle_map(rng: &mut ChaCha8Rng, modes: usize, budget: f64, min_margin: f64) -> CircleMap {
    let mut coeffs: Vec<C64> = (1..=modes)
        .map(|k| {
            C64::from_polar(
                rng.random_range(0.2..1.0) / (k * k) as f64,
                rng.random_range(-PI..PI),
            )
        })
        .collect();
    let mass: f64 = 2.0 * coeffs.iter().map(|c| c.norm()).sum::<f64>();
    for c in coeffs.iter_mut() {
        *c *= budget / mass;
    }
    let c0 = C64::new(rng.random_range(-0.5..0.5), 0.0);
    let mut all = vec![c0];
    all.extend(coeffs);
    let mut g = CircleMap { coeffs: all };
    while g.margin() < min_margin {
        for c in g.coeffs[1..].iter_mut() {
            *c *= 0.5;
        }
    }
    g
}

/// `g(w) = b w + b_0 + Σ_{k≥1} b_k w^{−k}` on `|w| ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorMap {
    pub b: f64,
    #[serde(with = "complex_serde::single")]
    pub b0: C64,
    /// `coeffs[k-1] = b_k`
    #[serde(with = "complex_serde::vec")]
    pub coeffs: Vec<C64>,
}

impl ExteriorMap {
    pub fn identity() -> Self {
        ExteriorMap {
            b: 1.0,
            b0: C64::new(0.0, 0.0),
            coeffs: Vec::new(),
        }
    }

    pub fn eval(&self, w: C64) -> C64 {
        let inv = C64::new(1.0, 0.0) / w;
        let tail = self
            .coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| (acc + c) * inv);
        self.b * w + self.b0 + tail
    }

    pub fn scaled(&self, s: f64) -> Self {
        ExteriorMap {
            b: self.b * s,
            b0: self.b0 * s,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldingPair {
    pub f: DiskMap,
    pub g: ExteriorMap,
    pub m: f64,
    pub iterations: usize,
    /// Sup of `|g(e^{iγ}) − f(e^{iθ})|` on the solver's nodes.
    pub solver_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeldConfig {
    /// Coefficients kept in each of `f` and `g`.
    pub terms: usize,
    /// Collocation nodes on the circle.
    pub samples: usize,
    pub max_iterations: usize,
    /// Required sup residual on the nodes.
    pub tol: f64,
    pub l1_budget: f64,
    pub min_margin: f64,
}

impl Default for WeldConfig {
    fn default() -> Self {
        WeldConfig {
            terms: 64,
            samples: 256,
            max_iterations: 8,
            tol: 1e-8,
            l1_budget: 0.1,
            min_margin: 0.5,
        }
    }
}

fn check_admissible(gamma: &CircleMap, cfg: &WeldConfig) -> Result<()> {
    if gamma.l1_mass() > cfg.l1_budget {
        return Err(Error::CircleMap(format!(
            "Fourier mass {:.4} exceeds the budget {}",
            gamma.l1_mass(),
            cfg.l1_budget
        )));
    }
    if gamma.margin() < cfg.min_margin {
        return Err(Error::CircleMap(format!(
            "monotonicity margin {:.4} is below {}",
            gamma.margin(),
            cfg.min_margin
        )));
    }
    Ok(())
}

/// Unknowns `x = (a_1..a_K, b_0, b_1..b_K)` with `b = 1` fixed. Row `j` of
/// the residual is `f(e^{iθ_j}) − g(e^{iγ(θ_j)})`, affine in `x`.
struct WeldSystem {
    jac: DMatrix<C64>,
    rhs: DVector<C64>,
}

impl WeldSystem {
    fn new(gamma: &CircleMap, k: usize, l: usize) -> Self {
        let mut jac = DMatrix::zeros(l, 2 * k + 1);
        let mut rhs = DVector::zeros(l);
        for j in 0..l {
            let theta = TAU * j as f64 / l as f64;
            let z = C64::from_polar(1.0, theta);
            let w = C64::from_polar(1.0, gamma.angle(theta));
            let winv = w.conj();
            let mut zp = z;
            let mut wp = winv;
            for i in 0..k {
                jac[(j, i)] = zp;
                jac[(j, k + 1 + i)] = -wp;
                zp *= z;
                wp *= winv;
            }
            jac[(j, k)] = C64::new(-1.0, 0.0);
            rhs[j] = w;
        }
        WeldSystem { jac, rhs }
    }

    fn residual(&self, x: &DVector<C64>) -> DVector<C64> {
        &self.jac * x - &self.rhs
    }

    /// Least-squares step `−J⁺ r` by thin QR.
    fn step(&self, r: &DVector<C64>) -> Result<DVector<C64>> {
        let qr = self.jac.clone().qr();
        let qtr = qr.q().adjoint() * r;
        let sol = qr
            .r()
            .solve_upper_triangular(&qtr)
            .ok_or_else(|| Error::NonConvergence {
                iterations: 0,
                residual: f64::INFINITY,
            })?;
        Ok(-sol)
    }
}

fn sup(v: &DVector<C64>) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Welds from the start `f = z`, `g = w`.
pub fn weld(gamma: &CircleMap, m: f64, cfg: &WeldConfig) -> Result<WeldingPair> {
    weld_from(gamma, m, cfg, None)
}

/// Gauss–Newton on the collocated welding equation. The equation is affine in
/// the coefficients once `b` is fixed, so the first step already lands on
/// the least-squares solution; the second confirms a vanishing step.
/// `start` overrides the initial coefficient vector (length `2K + 1`).
pub fn weld_from(
    gamma: &CircleMap,
    m: f64,
    cfg: &WeldConfig,
    start: Option<Vec<C64>>,
) -> Result<WeldingPair> {
    check_admissible(gamma, cfg)?;
    let k = cfg.terms;
    let l = cfg.samples.max(2 * k + 2);
    let sys = WeldSystem::new(gamma, k, l);
    let mut x = match start {
        Some(v) if v.len() == 2 * k + 1 => DVector::from_vec(v),
        Some(_) => {
            return Err(Error::InvalidArgument(format!(
                "start vector must have {} entries",
                2 * k + 1
            )))
        }
        None => {
            let mut v = DVector::zeros(2 * k + 1);
            v[0] = C64::new(1.0, 0.0);
            v
        }
    };
    let mut r = sys.residual(&x);
    let mut iterations = 0;
    loop {
        let dx = sys.step(&r)?;
        x += &dx;
        r = sys.residual(&x);
        iterations += 1;
        let small_step = sup(&dx) <= 1e-12 * sup(&x).max(1.0);
        if small_step && sup(&r) <= cfg.tol {
            break;
        }
        if iterations >= cfg.max_iterations {
            return Err(Error::NonConvergence {
                iterations,
                residual: sup(&r),
            });
        }
    }

    let a1 = x[0];
    if a1.norm() < 1e-12 {
        return Err(Error::DegenerateDerivative(a1.norm()));
    }
    let s = m.exp() / a1.norm();
    let f_coeffs: Poly = Poly::new(
        std::iter::once(C64::new(0.0, 0.0))
            .chain((0..k).map(|i| x[i] * s))
            .collect(),
    );
    let rho = f_coeffs.convergence_radius_estimate(1e-13).min(RHO_CAP);
    if rho <= 1.0 {
        return Err(Error::CircleMap(
            "welding map is not analytic past the circle at this resolution".into(),
        ));
    }
    let f = DiskMap::from_poly(&f_coeffs, rho)?;
    let g = ExteriorMap {
        b: s,
        b0: x[k] * s,
        coeffs: (0..k).map(|i| x[k + 1 + i] * s).collect(),
    };
    Ok(WeldingPair {
        f,
        g,
        m,
        iterations,
        solver_residual: sup(&r) * s,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldingResidual {
    pub sup: f64,
    pub l2: f64,
    pub samples: usize,
    /// `|f(0)|`
    pub f_origin: f64,
    /// `||f'(0)| − e^m|`
    pub derivative_modulus: f64,
    /// `g'(∞)`, required real and positive.
    pub g_derivative_at_infinity: f64,
}

/// Seam residual `g(e^{iγ(θ)}) − f(e^{iθ})` at `n` midpoints
/// `θ = 2π(j + ½)/n`, plus the normalization residuals.
pub fn verify_welding(pair: &WeldingPair, gamma: &CircleMap, n: usize) -> WeldingResidual {
    let mut sup: f64 = 0.0;
    let mut sq = 0.0;
    for j in 0..n {
        let theta = TAU * (j as f64 + 0.5) / n as f64;
        let d = (pair.g.eval(C64::from_polar(1.0, gamma.angle(theta)))
            - pair.f.boundary_point(theta))
        .norm();
        sup = sup.max(d);
        sq += d * d;
    }
    WeldingResidual {
        sup,
        l2: (sq / n as f64).sqrt(),
        samples: n,
        f_origin: pair.f.coeff(0).norm(),
        derivative_modulus: (pair.f.a1().norm() - pair.m.exp()).abs(),
        g_derivative_at_infinity: pair.g.b,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnweldConfig {
    /// Boundary nodes (even).
    pub nodes: usize,
    /// Fourier modes of the returned circle map.
    pub modes: usize,
    /// Laurent terms of the returned exterior map.
    pub terms: usize,
}

impl Default for UnweldConfig {
    fn default() -> Self {
        UnweldConfig {
            nodes: 512,
            modes: 64,
            terms: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unwelded {
    pub gamma: CircleMap,
    pub m: f64,
    pub g: ExteriorMap,
    /// `e^C` from the equilibrium potential; equals `g'(∞)`.
    pub capacity: f64,
    /// `|b̃| − e^C`, where `b̃` is the mode-one moment used for the rotation.
    pub capacity_mismatch: f64,
}

/// `(g⁻¹∘f|_{S¹}, log|f'(0)|)` with `g` the normalized exterior map of `f(𝔻̄)`.
///
/// On `Γ = f(S¹)`, parametrized by `ζ(s) = f(e^{is})`, the equilibrium
/// density `σ` solves `∫ log|ζ(t) − ζ(s)| σ(s) ds = C`, `∫σ = 1`, with the
/// logarithmic singularity integrated by Kress's product quadrature. Then
/// `arg g⁻¹(ζ(s)) = θ_0 + 2π∫_0^s σ`, `g'(∞) = e^C`, and `θ_0` comes from
/// `(1/2π)∮ ζ e^{−iψ} dψ = g'(∞)`.
pub fn unweld(f: &DiskMap, cfg: &UnweldConfig) -> Result<Unwelded> {
    f.require_nondegenerate()?;
    let n = cfg.nodes;
    if n < 16 || n % 2 != 0 {
        return Err(Error::InvalidArgument("unweld needs an even node count ≥ 16".into()));
    }
    let zeta = f.boundary_polyline(n);
    if let Some(cross) = polyline::self_intersection(&zeta) {
        return Err(Error::SelfIntersection(format!(
            "f(S^1) crosses itself near {}",
            cross.point
        )));
    }
    let dzeta = f.derivative(1);
    let s: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let h = TAU / n as f64;
    let p = n / 2;

    // Kress weights depend only on i − j.
    let kress: Vec<f64> = (0..n)
        .map(|d| {
            let x = TAU * d as f64 / n as f64;
            let mut acc = 0.0;
            for mm in 1..p {
                acc += (mm as f64 * x).cos() / mm as f64;
            }
            acc += (p as f64 * x).cos() / (2.0 * p as f64);
            -h * acc
        })
        .collect();

    let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            let smooth = if i == j {
                let z = C64::from_polar(1.0, s[i]);
                (dzeta.eval(z) * C64::new(0.0, 1.0) * z).norm().ln()
            } else {
                let d = 2.0 * ((s[i] - s[j]) / 2.0).sin();
                ((zeta[i] - zeta[j]).norm() / d.abs()).ln()
            };
            a[(i, j)] = kress[(i + n - j) % n] + h * smooth;
        }
        a[(i, n)] = -1.0;
    }
    for j in 0..n {
        a[(n, j)] = h;
    }
    let mut rhs = DVector::<f64>::zeros(n + 1);
    rhs[n] = 1.0;
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::ExteriorSolver("singular boundary system".into()))?;
    let sigma: Vec<f64> = (0..n).map(|j| sol[j]).collect();
    let c = sol[n];
    if sigma.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::ExteriorSolver(
            "equilibrium density is not positive; boundary under-resolved".into(),
        ));
    }

    // γ₁(s) = 2π∫_0^s σ from the DFT of σ.
    let sig_hat: Vec<C64> = (0..n)
        .map(|k| {
            sigma
                .iter()
                .enumerate()
                .map(|(j, &v)| v * C64::from_polar(1.0, -TAU * (j * k % n) as f64 / n as f64))
                .sum::<C64>()
                / n as f64
        })
        .collect();
    let gamma1 = |t: f64| -> f64 {
        let mut acc = sig_hat[0].re * t;
        for k in 1..p {
            let ik = C64::new(0.0, k as f64);
            // modes k and −k together
            let term = sig_hat[k] * ((ik * t).exp() - 1.0) / ik;
            acc += 2.0 * term.re;
        }
        TAU * acc
    };
    let g1: Vec<f64> = s.iter().map(|&t| gamma1(t)).collect();

    let b_tilde: C64 = (0..n)
        .map(|j| zeta[j] * C64::from_polar(1.0, -g1[j]) * TAU * sigma[j])
        .sum::<C64>()
        / n as f64;
    let theta0 = b_tilde.arg();
    let capacity = c.exp();

    let gamma_samples: Vec<f64> = g1.iter().map(|g| g + theta0).collect();
    let gamma = CircleMap::fit(&gamma_samples, cfg.modes.min(p - 1))?;

    // Laurent coefficients of g from ζ(s) = g(e^{iψ(s)}), dψ = 2πσ ds.
    let moment = |k: i64| -> C64 {
        (0..n)
            .map(|j| {
                zeta[j] * C64::from_polar(1.0, k as f64 * gamma_samples[j]) * TAU * sigma[j]
            })
            .sum::<C64>()
            / n as f64
    };
    let g = ExteriorMap {
        b: capacity,
        b0: moment(0),
        coeffs: (1..=cfg.terms.min(p - 1) as i64).map(moment).collect(),
    };

    Ok(Unwelded {
        gamma,
        m: f.a1().norm().ln(),
        g,
        capacity,
        capacity_mismatch: b_tilde.norm() - capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sine(eps: f64) -> CircleMap {
        CircleMap::new(vec![c(0.0, 0.0), c(0.0, -eps / 2.0)]).unwrap()
    }

    #[test]
    fn circle_map_evaluation() {
        let g = sine(0.1);
        for t in [0.0, 0.7, 2.0, 4.5] {
            assert!((g.u(t) - 0.1 * t.sin()).abs() < 1e-15);
            assert!((g.u_prime(t) - 0.1 * t.cos()).abs() < 1e-15);
        }
        assert!((g.margin() - 0.9).abs() < 1e-6);
        assert!((g.l1_mass() - 0.1).abs() < 1e-15);
        assert!(CircleMap::new(vec![c(0.0, 0.0), c(0.0, -0.6)]).is_err());
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.starts_with("{\"modes\":1,\"u_coeffs\":"));
        assert_eq!(serde_json::from_str::<CircleMap>(&text).unwrap(), g);
    }

    #[test]
    fn weld_identity_and_scale() {
        let cfg = WeldConfig::default();
        let p = weld(&CircleMap::identity(), 0.0, &cfg).unwrap();
        assert!((p.f.a1() - c(1.0, 0.0)).norm() < 1e-12);
        assert!(p.f.coeffs()[1..].iter().all(|a| a.norm() < 1e-12));
        assert!((p.g.b - 1.0).abs() < 1e-12);
        let m = 0.3;
        let q = weld(&CircleMap::identity(), m, &cfg).unwrap();
        assert!((q.f.a1() - c(m.exp(), 0.0)).norm() < 1e-12);
        assert!((q.g.b - m.exp()).abs() < 1e-12);
    }

    #[test]
    fn weld_rotation() {
        let theta0 = 0.4;
        let p = weld(&CircleMap::rotation(theta0), 0.0, &WeldConfig::default()).unwrap();
        assert!((p.f.a1() - C64::from_polar(1.0, theta0)).norm() < 1e-12);
        assert!((p.g.b - 1.0).abs() < 1e-12);
        assert!(p.g.b0.norm() < 1e-12 && p.g.coeffs.iter().all(|b| b.norm() < 1e-12));
    }

    #[test]
    fn perturbed_pair_residual() {
        // f = z, g = w against γ = θ + 0.1 sin θ: sup |e^{0.1 i sin θ} − 1| = 2 sin(0.05).
        let pair = WeldingPair {
            f: DiskMap::identity(),
            g: ExteriorMap::identity(),
            m: 0.0,
            iterations: 0,
            solver_residual: 0.0,
        };
        let r = verify_welding(&pair, &sine(0.1), 4096);
        assert!((r.sup - 2.0 * 0.05f64.sin()).abs() < 1e-6);
        assert_eq!(verify_welding(&pair, &CircleMap::identity(), 256).sup, 0.0);
    }

    #[test]
    fn weld_sine_converges_with_small_seam() {
        let g = sine(0.08);
        let pair = weld(&g, 0.2, &WeldConfig::default()).unwrap();
        assert!(pair.iterations <= 2);
        let r = verify_welding(&pair, &g, 256);
        assert!(r.sup < 1e-10, "{r:?}");
        assert!(r.derivative_modulus < 1e-12 && r.f_origin == 0.0 && r.g_derivative_at_infinity > 0.0);
    }

    #[test]
    fn weld_is_scale_equivariant_and_start_independent() {
        let mut rng = corpus::rng(11);
        let g = random_circle_map(&mut rng, 16, 0.05, 0.5);
        let cfg = WeldConfig::default();
        let p0 = weld(&g, 0.0, &cfg).unwrap();
        let p1 = weld(&g, 0.5, &cfg).unwrap();
        assert!(p1.f.max_coeff_diff(&p0.f.scaled(c(0.5f64.exp(), 0.0))) < 1e-10);
        let start: Vec<C64> = (0..2 * cfg.terms + 1)
            .map(|_| c(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)))
            .collect();
        let p2 = weld_from(&g, 0.0, &cfg, Some(start)).unwrap();
        assert!(p2.f.max_coeff_diff(&p0.f) < 1e-8);
    }

    #[test]
    fn rejects_rough_maps() {
        let g = CircleMap::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.1, 0.0)]).unwrap();
        assert!(matches!(weld(&g, 0.0, &WeldConfig::default()), Err(Error::CircleMap(_))));
    }

    #[test]
    fn unweld_examples() {
        let cfg = UnweldConfig::default();
        let u = unweld(&DiskMap::linear(c(0.5f64.exp(), 0.0)), &cfg).unwrap();
        assert!((u.m - 0.5).abs() < 1e-15);
        assert!(u.gamma.angle_distance(&CircleMap::identity(), 512) < 1e-10);
        assert!((u.capacity - 0.5f64.exp()).abs() < 1e-10);

        let theta0 = -0.7;
        let u = unweld(&DiskMap::linear(C64::from_polar(1.0, theta0)), &cfg).unwrap();
        assert!(u.m.abs() < 1e-15);
        assert!(u.gamma.angle_distance(&CircleMap::rotation(theta0), 512) < 1e-10);
    }

    #[test]
    fn unweld_recovers_exterior_map_of_ellipse_like_curve() {
        // f(z) = z + 0.1 z² bounds a domain whose exterior map we compare
        // against its own boundary: g(e^{iγ(θ)}) must reproduce f(e^{iθ}).
        let f = DiskMap::new(vec![c(1.0, 0.0), c(0.1, 0.0)], 1.5).unwrap();
        let u = unweld(&f, &UnweldConfig::default()).unwrap();
        assert!(u.capacity_mismatch.abs() < 1e-10);
        let pair = WeldingPair {
            f: f.clone(),
            g: u.g.clone(),
            m: 0.0,
            iterations: 0,
            solver_residual: 0.0,
        };
        assert!(verify_welding(&pair, &u.gamma, 256).sup < 1e-8);
    }

    #[test]
    fn unweld_rejects_self_intersecting_boundary() {
        let mut coeffs = Vec::new();
        let mut term = 0.25;
        for k in 1..=40 {
            term *= 4.0 / k as f64;
            coeffs.push(c(term, 0.0));
        }
        let f = DiskMap::new(coeffs, 1.5).unwrap();
        assert!(matches!(
            unweld(&f, &UnweldConfig::default()),
            Err(Error::SelfIntersection(_))
        ));
    }

    #[test]
    fn round_trip() {
        let mut rng = corpus::rng(5);
        for m in [-0.5, 0.0, 0.5] {
            let g = random_circle_map(&mut rng, 16, 0.05, 0.5);
            let pair = weld(&g, m, &WeldConfig::default()).unwrap();
            let u = unweld(&pair.f, &UnweldConfig::default()).unwrap();
            assert!((u.m - m).abs() < 1e-6);
            let err = u.gamma.angle_distance(&g, 1024);
            assert!(err < 1e-4, "angle error {err}");
        }
    }
}
