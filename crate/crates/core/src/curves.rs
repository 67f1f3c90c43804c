//! Holomorphic curves `t ↦ f_t` through a base map, and numerical checks
//! that `f ↦ 𝒜(h∘f)` is holomorphic along them.
//!
//! A curve is the preimage under `χ` of the complex line
//! `t ↦ (𝒜(f_0) + tφ, q(t))`, which has the explicit form
//!
//! ```text
//! f_t(z) = q(t)/f_0'(0) · ∫_0^z f_0'(u) exp(t Φ(u)) du,   Φ = ∫_0^u φ.
//! ```
//!
//! Writing `I_k = ∫ f_0' Φ^k e^{tΦ}`, the t-derivatives are finite sums of
//! `I_0, I_1, I_2` with `q, q', q''` weights, so they are computed exactly on
//! coefficients rather than by differencing.
//!
//! For a left map `h` put `A = h''/h'` and `α(t) = A(f_t)·f_t'`, so that
//! `𝒜(h∘f_t) = α(t) + 𝒜(f_t)`. Then
//!
//! ```text
//! α̇ = A'(f) ḟ f' + A(f) ḟ'
//! α̈ = A''(f) ḟ² f' + A'(f) (f̈ f' + 2 ḟ ḟ') + A(f) f̈'
//! A' = h'''/h' − (h''/h')²
//! A'' = h''''/h' − 3 h'' h'''/h'² + 2 (h''/h')³
//! ```

use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::disk_map::{compose_left, image_bound, ClosedDisk, DiskMap, RHO_CAP};
use crate::error::{Error, Result};
use crate::grid::{weighted_sup, EvaluationGrid, RefinementPolicy};
use crate::operators::{pre_schwarzian, OneDifferential};
use crate::poly::{Poly, C64};

const BOUNDARY_SAMPLES: usize = 256;
const T_DOMAIN_CAP: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveSpec")]
pub struct HolomorphicCurve {
    f0: DiskMap,
    phi: OneDifferential,
    /// Polynomial in `t` with `q(0) = f_0'(0)`.
    q: Poly,
    /// Compact set that must contain `f_t(𝔻̄)` for `|t| ≤ t_domain`.
    k: ClosedDisk,
    t_domain: f64,
    truncation: usize,
}

/// On-disk form of a curve; `t_domain` and `truncation` are optional.
#[derive(Deserialize)]
struct CurveSpec {
    f0: DiskMap,
    phi: OneDifferential,
    q: Poly,
    k: ClosedDisk,
    #[serde(default)]
    t_domain: Option<f64>,
    #[serde(default)]
    truncation: Option<usize>,
}

impl TryFrom<CurveSpec> for HolomorphicCurve {
    type Error = Error;
    fn try_from(s: CurveSpec) -> Result<Self> {
        let n = s.truncation.unwrap_or(crate::disk_map::DEFAULT_TRUNCATION);
        match s.t_domain {
            None => HolomorphicCurve::new(s.f0, s.phi, s.q, s.k, n),
            Some(t) => {
                let c = HolomorphicCurve::unchecked(s.f0, s.phi, s.q, s.k, n, t)?;
                if !(t > 0.0) {
                    return Err(Error::InvalidArgument("t_domain must be positive".into()));
                }
                Ok(c)
            }
        }
    }
}

/// A curve point and its t- and z-derivatives as truncated series in `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    pub f: Poly,
    pub f_prime: Poly,
    pub fdot: Poly,
    pub fdot_prime: Poly,
    pub fddot: Poly,
    pub fddot_prime: Poly,
}

impl HolomorphicCurve {
    /// Builds the curve and finds `t_domain` by bisection: the largest
    /// radius (capped at 1) such that `f_t(𝔻̄) ⊂ K` on sampled `|t| = τ`.
    pub fn new(
        f0: DiskMap,
        phi: OneDifferential,
        q: Poly,
        k: ClosedDisk,
        truncation: usize,
    ) -> Result<Self> {
        let mut c = HolomorphicCurve::unchecked(f0, phi, q, k, truncation, 0.0)?;
        if !c.image_inside(C64::new(0.0, 0.0)) {
            return Err(Error::Containment("f_0(D) is not inside K".into()));
        }
        let all_inside = |c: &HolomorphicCurve, tau: f64| {
            (0..8).all(|j| {
                c.image_inside(C64::from_polar(tau, std::f64::consts::TAU * j as f64 / 8.0))
            })
        };
        c.t_domain = if all_inside(&c, T_DOMAIN_CAP) {
            T_DOMAIN_CAP
        } else {
            let (mut lo, mut hi) = (0.0, T_DOMAIN_CAP);
            for _ in 0..30 {
                let mid = 0.5 * (lo + hi);
                if all_inside(&c, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        if c.t_domain <= 0.0 {
            return Err(Error::Containment("no t-disk keeps f_t(D) inside K".into()));
        }
        Ok(c)
    }

    fn unchecked(
        f0: DiskMap,
        phi: OneDifferential,
        q: Poly,
        k: ClosedDisk,
        truncation: usize,
        t_domain: f64,
    ) -> Result<Self> {
        f0.require_nondegenerate()?;
        let scale = f0.a1().norm();
        if (q.coeff(0) - f0.a1()).norm() > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "q(0) = {} must equal f0'(0) = {}",
                q.coeff(0),
                f0.a1()
            )));
        }
        if phi.rational().pole_radius() <= 1.0 {
            return Err(Error::InvalidArgument(
                "direction is not holomorphic past the closed disk".into(),
            ));
        }
        if truncation < f0.degree() {
            return Err(Error::InvalidArgument(format!(
                "truncation {truncation} is below the base map degree {}",
                f0.degree()
            )));
        }
        Ok(HolomorphicCurve {
            f0,
            phi,
            q,
            k,
            t_domain,
            truncation,
        })
    }

    pub fn f0(&self) -> &DiskMap {
        &self.f0
    }

    pub fn phi(&self) -> &OneDifferential {
        &self.phi
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    pub fn k(&self) -> &ClosedDisk {
        &self.k
    }

    pub fn t_domain(&self) -> f64 {
        self.t_domain
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn check_t(&self, t: C64) -> Result<()> {
        if t.norm() > self.t_domain {
            return Err(Error::Domain {
                z: t.to_string(),
                rho: self.t_domain,
            });
        }
        Ok(())
    }

    fn rho(&self) -> f64 {
        self.f0
            .rho()
            .min(self.phi.rational().pole_radius())
            .min(RHO_CAP)
    }

    fn image_inside(&self, t: C64) -> bool {
        let f = self.jet_unchecked(t, false).f;
        (0..BOUNDARY_SAMPLES).all(|j| {
            let z = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / BOUNDARY_SAMPLES as f64);
            self.k.contains(f.eval(z))
        })
    }

    fn jet_unchecked(&self, t: C64, derivatives: bool) -> CurveJet {
        let n = self.truncation;
        let big_phi = self.phi.rational().series(n).integral().truncate(n);
        let e = big_phi.scale(t).exp_series(n);
        let p0 = self.f0.derivative(1).mul_trunc(&e, n);
        let inv = C64::new(1.0, 0.0) / self.f0.a1();
        let qd = self.q.derivative();
        let (q0, q1, q2) = (
            self.q.eval(t) * inv,
            qd.eval(t) * inv,
            qd.derivative().eval(t) * inv,
        );
        let i0 = p0.integral().truncate(n);
        let f = i0.scale(q0);
        if !derivatives {
            return CurveJet {
                f_prime: f.derivative(),
                f,
                fdot: Poly::zero(),
                fdot_prime: Poly::zero(),
                fddot: Poly::zero(),
                fddot_prime: Poly::zero(),
            };
        }
        let p1 = p0.mul_trunc(&big_phi, n);
        let p2 = p1.mul_trunc(&big_phi, n);
        let i1 = p1.integral().truncate(n);
        let i2 = p2.integral().truncate(n);
        let fdot = &i0.scale(q1) + &i1.scale(q0);
        let fddot = &(&i0.scale(q2) + &i1.scale(2.0 * q1)) + &i2.scale(q0);
        CurveJet {
            f_prime: f.derivative(),
            fdot_prime: fdot.derivative(),
            fddot_prime: fddot.derivative(),
            f,
            fdot,
            fddot,
        }
    }

    /// `(ḟ_t, ḟ_t', f̈_t, f̈_t')` together with `f_t, f_t'`.
    pub fn t_derivatives(&self, t: C64) -> Result<CurveJet> {
        self.check_t(t)?;
        Ok(self.jet_unchecked(t, true))
    }
}

/// `f_t`, truncated at the curve's degree.
pub fn curve_at(c: &HolomorphicCurve, t: C64) -> Result<DiskMap> {
    c.check_t(t)?;
    DiskMap::from_poly(&c.jet_unchecked(t, false).f, c.rho())
}

/// `A = h''/h'` and its first two derivatives at `w`.
pub fn log_derivative_jet<H: Analytic + ?Sized>(h: &H, w: C64) -> [C64; 3] {
    let [_, h1, h2, h3, h4] = h.jet(w);
    let a = h2 / h1;
    let b = h3 / h1;
    [a, b - a * a, h4 / h1 - 3.0 * a * b + 2.0 * a * a * a]
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSamples {
    pub z: Vec<C64>,
    pub alpha: Vec<C64>,
    pub alpha_dot: Vec<C64>,
    pub alpha_ddot: Vec<C64>,
}

fn ensure_admissible<H: Analytic + ?Sized>(h: &H, c: &HolomorphicCurve) -> Result<()> {
    if let Some(p) = h.exceptional_points().iter().find(|p| c.k.contains(**p)) {
        return Err(Error::Containment(format!(
            "left map is singular or not locally injective at {p}, inside K"
        )));
    }
    Ok(())
}

fn alpha_at<H: Analytic + ?Sized>(h: &H, jet: &CurveJet, z: C64) -> Result<[C64; 3]> {
    let w = jet.f.eval(z);
    let [a, da, dda] = log_derivative_jet(h, w);
    if !(a.is_finite() && da.is_finite() && dda.is_finite()) {
        return Err(Error::DegenerateDerivative(h.jet(w)[1].norm()));
    }
    let fp = jet.f_prime.eval(z);
    let fd = jet.fdot.eval(z);
    let fdp = jet.fdot_prime.eval(z);
    let fdd = jet.fddot.eval(z);
    let fddp = jet.fddot_prime.eval(z);
    Ok([
        a * fp,
        da * fd * fp + a * fdp,
        dda * fd * fd * fp + da * (fdd * fp + 2.0 * fd * fdp) + a * fddp,
    ])
}

/// `α(t), α̇(t), α̈(t)` sampled at the given points of the disk.
pub fn alpha_samples<H: Analytic + ?Sized>(
    h: &H,
    c: &HolomorphicCurve,
    t: C64,
    zs: &[C64],
) -> Result<AlphaSamples> {
    ensure_admissible(h, c)?;
    let jet = c.t_derivatives(t)?;
    let mut out = AlphaSamples {
        z: zs.to_vec(),
        alpha: Vec::with_capacity(zs.len()),
        alpha_dot: Vec::with_capacity(zs.len()),
        alpha_ddot: Vec::with_capacity(zs.len()),
    };
    for &z in zs {
        let [a, ad, add] = alpha_at(h, &jet, z)?;
        out.alpha.push(a);
        out.alpha_dot.push(ad);
        out.alpha_ddot.push(add);
    }
    Ok(out)
}

pub fn alpha<H: Analytic + ?Sized>(h: &H, c: &HolomorphicCurve, t: C64, zs: &[C64]) -> Result<Vec<C64>> {
    Ok(alpha_samples(h, c, t, zs)?.alpha)
}

pub fn alpha_dot<H: Analytic + ?Sized>(h: &H, c: &HolomorphicCurve, t: C64, zs: &[C64]) -> Result<Vec<C64>> {
    Ok(alpha_samples(h, c, t, zs)?.alpha_dot)
}

pub fn alpha_ddot<H: Analytic + ?Sized>(h: &H, c: &HolomorphicCurve, t: C64, zs: &[C64]) -> Result<Vec<C64>> {
    Ok(alpha_samples(h, c, t, zs)?.alpha_ddot)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateauxConfig {
    /// Step magnitudes for the difference quotient.
    pub ts: Vec<f64>,
    /// Unit direction in the t-plane.
    #[serde(with = "crate::complex_serde::single")]
    pub direction: C64,
    /// Step for the real/imaginary central differences.
    pub cr_step: f64,
    pub policy: RefinementPolicy,
    /// Nodes for the second-order bound.
    pub bound_rings: usize,
    pub bound_angular: usize,
    /// Samples of `s` on the segment `[0, t]` when taking `sup |α̈(s)|`.
    pub segment_samples: usize,
    pub min_slope: f64,
    pub max_cr_residual: f64,
}

impl Default for GateauxConfig {
    fn default() -> Self {
        GateauxConfig {
            ts: vec![1e-2, 1e-3, 1e-4, 1e-5],
            direction: C64::new(1.0, 0.0),
            cr_step: 1e-4,
            policy: RefinementPolicy::default(),
            bound_rings: 8,
            bound_angular: 32,
            segment_samples: 8,
            min_slope: 0.9,
            max_cr_residual: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateauxRow {
    pub t: f64,
    /// `‖(1/t)(𝒜(h∘f_t) − 𝒜(h∘f_0)) − (α̇(t) + φ)‖_{1,∞}`
    pub residual: f64,
    /// `max |α(t) − α(0) − tα̇(t)|` over the bound grid.
    pub second_order_lhs: f64,
    /// Largest `|α(t) − α(0) − tα̇(t)| / (sup|α̈| |t|²)` over the bound grid.
    pub observed_constant: f64,
    pub bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateauxReport {
    pub rows: Vec<GateauxRow>,
    /// Fitted `d log(residual) / d log(t)`; `None` when every residual is
    /// at rounding level.
    pub slope: Option<f64>,
    pub exact: bool,
    /// `‖D_re − D_im‖_{1,∞}` for the central differences of `t ↦ 𝒜(h∘f_t)`
    /// at `t = 0` along the real and imaginary axes.
    pub cr_residual: f64,
    /// `‖D_re − (α̇(0) + φ)‖_{1,∞}`
    pub derivative_mismatch: f64,
    pub bound_holds: bool,
    pub passed: bool,
}

/// `z ↦ 𝒜(h∘f_t)(z)`, from the formal composition.
fn composed_pre_schwarzian<H: Analytic + ?Sized>(
    h: &H,
    c: &HolomorphicCurve,
    t: C64,
    grid: &EvaluationGrid,
) -> Result<OneDifferential> {
    let ft = curve_at(c, t)?;
    let hf = compose_left(h, &ft, &c.k, c.truncation, grid)?;
    pre_schwarzian(&hf.value)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Difference-quotient test of holomorphy of `f ↦ 𝒜(h∘f)` along `c`.
pub fn gateaux_check<H: Analytic + ?Sized>(
    h: &H,
    c: &HolomorphicCurve,
    cfg: &GateauxConfig,
) -> Result<GateauxReport> {
    ensure_admissible(h, c)?;
    if cfg.ts.len() < 2 || cfg.ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidArgument("need at least two positive steps".into()));
    }
    let boundary = EvaluationGrid::new(vec![0.5], BOUNDARY_SAMPLES)?;
    let zero = C64::new(0.0, 0.0);
    let dir = cfg.direction / cfg.direction.norm();
    let a0 = composed_pre_schwarzian(h, c, zero, &boundary)?;
    let jet0 = c.t_derivatives(zero)?;

    let bound_grid = EvaluationGrid::new(
        (1..=cfg.bound_rings)
            .map(|i| 0.98 * i as f64 / cfg.bound_rings as f64)
            .collect(),
        cfg.bound_angular,
    )?;
    let nodes: Vec<C64> = bound_grid.nodes().map(|n| n.z).collect();
    let base = alpha_samples(h, c, zero, &nodes)?;

    let mut rows = Vec::with_capacity(cfg.ts.len());
    for &tau in &cfg.ts {
        let t = dir * tau;
        let at = composed_pre_schwarzian(h, c, t, &boundary)?;
        let jet = c.t_derivatives(t)?;
        let residual = weighted_sup(
            |z| {
                let ad = alpha_at(h, &jet, z).map(|a| a[1]).unwrap_or(C64::new(f64::NAN, 0.0));
                (at.eval(z) - a0.eval(z)) / t - (ad + c.phi.eval(z))
            },
            1,
            &cfg.policy,
        )
        .value;

        let here = alpha_samples(h, c, t, &nodes)?;
        let mut sup_ddot = vec![0.0f64; nodes.len()];
        let mut s_values: Vec<C64> = (0..=cfg.segment_samples)
            .map(|j| t * (j as f64 / cfg.segment_samples as f64))
            .collect();
        s_values.extend((0..8).map(|j| C64::from_polar(tau, std::f64::consts::TAU * j as f64 / 8.0)));
        for s in s_values {
            let ddot = alpha_ddot(h, c, s, &nodes)?;
            for (m, v) in sup_ddot.iter_mut().zip(&ddot) {
                *m = m.max(v.norm());
            }
        }
        let (mut lhs_max, mut ratio_max, mut holds) = (0.0f64, 0.0f64, true);
        for i in 0..nodes.len() {
            let lhs = (here.alpha[i] - base.alpha[i] - t * here.alpha_dot[i]).norm();
            let rounding = 64.0
                * f64::EPSILON
                * (here.alpha[i].norm() + base.alpha[i].norm() + (t * here.alpha_dot[i]).norm());
            let rhs = sup_ddot[i] * tau * tau;
            if lhs > rhs + rounding {
                holds = false;
            }
            lhs_max = lhs_max.max(lhs);
            if rhs > 0.0 {
                ratio_max = ratio_max.max(lhs / rhs);
            }
        }
        rows.push(GateauxRow {
            t: tau,
            residual,
            second_order_lhs: lhs_max,
            observed_constant: ratio_max,
            bound_holds: holds,
        });
    }

    let scale = weighted_sup(|z| a0.eval(z), 1, &RefinementPolicy::coarse()).value.max(1.0);
    let exact = rows.iter().all(|r| r.residual <= 1e-12 * scale);
    let slope = if exact {
        None
    } else {
        let xs: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.residual.max(f64::MIN_POSITIVE)).collect();
        Some(loglog_slope(&xs, &ys))
    };

    let eps = cfg.cr_step;
    let i = C64::new(0.0, 1.0);
    let ap = composed_pre_schwarzian(h, c, C64::new(eps, 0.0), &boundary)?;
    let am = composed_pre_schwarzian(h, c, C64::new(-eps, 0.0), &boundary)?;
    let bp = composed_pre_schwarzian(h, c, i * eps, &boundary)?;
    let bm = composed_pre_schwarzian(h, c, -i * eps, &boundary)?;
    let d_re = |z: C64| (ap.eval(z) - am.eval(z)) / (2.0 * eps);
    let d_im = |z: C64| (bp.eval(z) - bm.eval(z)) / (2.0 * eps * i);
    let cr_residual = weighted_sup(|z| d_re(z) - d_im(z), 1, &cfg.policy).value;
    let derivative_mismatch = weighted_sup(
        |z| {
            let ad = alpha_at(h, &jet0, z).map(|a| a[1]).unwrap_or(C64::new(f64::NAN, 0.0));
            d_re(z) - (ad + c.phi.eval(z))
        },
        1,
        &cfg.policy,
    )
    .value;

    let bound_holds = rows.iter().all(|r| r.bound_holds);
    let slope_ok = exact || slope.is_some_and(|s| s >= cfg.min_slope);
    Ok(GateauxReport {
        passed: slope_ok && cr_residual <= cfg.max_cr_residual && bound_holds,
        rows,
        slope,
        exact,
        cr_residual,
        derivative_mismatch,
        bound_holds,
    })
}

/// Sampled versions of the uniform estimates on a closed t-disk of
/// radius `r1`, with `r' = 3r₁/4` for the Cauchy estimate and
/// `r₂ = r₁/2` for the region where `ḟ_s, f̈_s` are bounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformBounds {
    pub r1: f64,
    pub r2: f64,
    /// `sup |f_s|` over `|s| ≤ r₁`, `z ∈ 𝔻`.
    pub m1: f64,
    /// `sup |ḟ_s|` over `|s| ≤ r₂`.
    pub m2: f64,
    /// `sup |f̈_s|` over `|s| ≤ r₂`.
    pub m3: f64,
    /// `sup_K |A|, |A'|, |A''|`
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    /// `max (1 − |z|²)|f_s'(z)|`, to be compared with `m1`.
    pub schwarz_lhs: f64,
    pub schwarz_holds: bool,
    pub cauchy_rhs: f64,
    pub cauchy_holds: bool,
    /// `max (1 − |z|²)|α̈(s)(z)|` over `|s| ≤ r₂`.
    pub final_lhs: f64,
    /// `c1·m1·m2² + c2·(m3·m1 + 2m2²) + c3·m3`
    pub final_rhs: f64,
    pub final_holds: bool,
}

pub fn uniform_bounds<H: Analytic + ?Sized>(
    h: &H,
    c: &HolomorphicCurve,
    r1: f64,
) -> Result<UniformBounds> {
    ensure_admissible(h, c)?;
    if !(r1 > 0.0 && r1 <= c.t_domain) {
        return Err(Error::InvalidArgument(format!(
            "radius {r1} must lie in (0, t_domain = {}]",
            c.t_domain
        )));
    }
    let r2 = 0.5 * r1;
    let rp = 0.75 * r1;
    let disk_samples = |r: f64| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0)];
        for i in 1..=4 {
            for j in 0..12 {
                v.push(C64::from_polar(
                    r * i as f64 / 4.0,
                    std::f64::consts::TAU * j as f64 / 12.0,
                ));
            }
        }
        v
    };
    let grid = EvaluationGrid::new((1..=8).map(|i| 0.98 * i as f64 / 8.0).collect(), 32)?;
    let nodes: Vec<C64> = grid.nodes().map(|n| n.z).collect();
    let circle = EvaluationGrid::new(vec![0.5], BOUNDARY_SAMPLES)?;
    let on_circle: Vec<C64> = circle.boundary_angles().map(|t| C64::from_polar(1.0, t)).collect();
    let weight = |z: C64| 1.0 - z.norm_sqr();

    let (mut m1, mut schwarz_lhs) = (0.0f64, 0.0f64);
    for s in disk_samples(r1) {
        let jet = c.t_derivatives(s)?;
        let f = DiskMap::from_poly(&jet.f, c.rho())?;
        m1 = m1.max(image_bound(&f, &circle).max_modulus);
        for &z in &nodes {
            schwarz_lhs = schwarz_lhs.max(weight(z) * jet.f_prime.eval(z).norm());
        }
    }

    let (mut m2, mut m3, mut final_lhs) = (0.0f64, 0.0f64, 0.0f64);
    for s in disk_samples(r2) {
        let jet = c.t_derivatives(s)?;
        for &z in &on_circle {
            m2 = m2.max(jet.fdot.eval(z).norm());
            m3 = m3.max(jet.fddot.eval(z).norm());
        }
        for &z in &nodes {
            let [_, _, add] = alpha_at(h, &jet, z)?;
            final_lhs = final_lhs.max(weight(z) * add.norm());
        }
    }

    let (mut c1, mut c2, mut c3) = (0.0f64, 0.0f64, 0.0f64);
    for j in 0..1024 {
        let w = c.k.center + C64::from_polar(c.k.radius, std::f64::consts::TAU * j as f64 / 1024.0);
        let [a, da, dda] = log_derivative_jet(h, w);
        c3 = c3.max(a.norm());
        c2 = c2.max(da.norm());
        c1 = c1.max(dda.norm());
    }

    let cauchy_rhs = rp * m1 / (r1 - rp).powi(2);
    let final_rhs = c1 * m1 * m2 * m2 + c2 * (m3 * m1 + 2.0 * m2 * m2) + c3 * m3;
    Ok(UniformBounds {
        r1,
        r2,
        m1,
        m2,
        m3,
        c3,
        c2,
        c1,
        schwarz_lhs,
        schwarz_holds: schwarz_lhs <= m1 + 1e-9,
        cauchy_rhs,
        cauchy_holds: m2 <= cauchy_rhs,
        final_lhs,
        final_rhs,
        final_holds: final_lhs <= final_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{Mobius, PolynomialMap};
    use crate::corpus;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn geo() -> Mobius {
        Mobius::new(c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0))
    }

    fn simple(b: C64) -> HolomorphicCurve {
        HolomorphicCurve::new(
            DiskMap::identity(),
            OneDifferential::constant(b),
            Poly::one(),
            ClosedDisk::centered(3.0),
            40,
        )
        .unwrap()
    }

    /// f0 = 0.2z, φ = z, q ≡ 0.2 with K = {|w| ≤ 0.5}.
    fn reference() -> HolomorphicCurve {
        HolomorphicCurve::new(
            DiskMap::linear(c(0.2, 0.0)),
            OneDifferential::from_series(Poly::from_real(&[0.0, 1.0])),
            Poly::from_real(&[0.2]),
            ClosedDisk::centered(0.5),
            64,
        )
        .unwrap()
    }

    fn zs() -> Vec<C64> {
        vec![c(0.0, 0.0), c(0.3, 0.2), c(-0.6, 0.1), c(0.1, -0.9), c(0.95, 0.0)]
    }

    #[test]
    fn curve_at_zero_is_base() {
        let curve = reference();
        let f = curve_at(&curve, c(0.0, 0.0)).unwrap();
        assert!(f.max_coeff_diff(curve.f0()) < 1e-16);
        assert!(curve.t_domain() > 0.1);
    }

    #[test]
    fn exponential_curve_closed_form() {
        // f_t = (e^{tbz} − 1)/(tb)
        let b = c(0.4, -0.3);
        let curve = simple(b);
        let t = c(0.2, 0.1);
        let f = curve_at(&curve, t).unwrap();
        for &z in &zs() {
            let exact = ((t * b * z).exp() - 1.0) / (t * b);
            assert!((f.evaluate(z).unwrap() - exact).norm() < 1e-14);
        }
        // ḟ_0 = b z² / 2
        let jet = curve.t_derivatives(c(0.0, 0.0)).unwrap();
        assert!((jet.fdot.coeff(2) - b / 2.0).norm() < 1e-15);
        assert!(jet.fdot.coeffs().iter().enumerate().all(|(k, a)| k == 2 || a.norm() < 1e-15));
    }

    #[test]
    fn zero_direction_is_constant_curve() {
        let curve = simple(c(0.0, 0.0));
        let jet = curve.t_derivatives(c(0.1, 0.0)).unwrap();
        assert!(jet.fdot.sup_coeff() == 0.0 && jet.fddot.sup_coeff() == 0.0);
    }

    #[test]
    fn construction_identity() {
        let curve = reference();
        let t = c(0.05, 0.03);
        let a0 = pre_schwarzian(curve.f0()).unwrap();
        let at = pre_schwarzian(&curve_at(&curve, t).unwrap()).unwrap();
        let n = curve.truncation() - 2;
        let lhs = at.rational().series(n);
        let rhs = &a0.rational().series(n) + &curve.phi().rational().series(n).scale(t);
        assert!(lhs.max_coeff_diff(&rhs, n) < 1e-10);
    }

    #[test]
    fn t_derivatives_match_finite_differences() {
        let mut rng = corpus::rng(3);
        let seed = corpus::random_curve_seed(&mut rng, 0.25, 0.5);
        let curve = HolomorphicCurve::new(
            seed.f0,
            OneDifferential::from_series(seed.phi),
            seed.q,
            seed.k,
            48,
        )
        .unwrap();
        let t0 = c(0.01, -0.02);
        let jet = curve.t_derivatives(t0).unwrap();
        let mut errs = Vec::new();
        for h in [1e-2, 5e-3] {
            let ht = c(h, 0.0);
            let fp = curve.t_derivatives(t0 + ht).unwrap();
            let fm = curve.t_derivatives(t0 - ht).unwrap();
            let mut err: f64 = 0.0;
            for &z in &zs() {
                let d1 = (fp.f.eval(z) - fm.f.eval(z)) / (2.0 * ht);
                let d2 = (fp.fdot.eval(z) - fm.fdot.eval(z)) / (2.0 * ht);
                err = err
                    .max((d1 - jet.fdot.eval(z)).norm())
                    .max((d2 - jet.fddot.eval(z)).norm());
            }
            errs.push(err);
        }
        // Central differences: halving h divides the error by about 4.
        assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
        assert!(errs[0] < 1e-5);
    }

    #[test]
    fn alpha_for_identity_vanishes() {
        let curve = reference();
        let s = alpha_samples(&Mobius::identity(), &curve, c(0.05, 0.0), &zs()).unwrap();
        assert!(s.alpha.iter().chain(&s.alpha_dot).chain(&s.alpha_ddot).all(|v| v.norm() == 0.0));
    }

    #[test]
    fn alpha_closed_form_for_geometric_map() {
        // h''/h' = 2/(1 − w)
        let curve = reference();
        let t = c(0.1, 0.05);
        let a = alpha(&geo(), &curve, t, &zs()).unwrap();
        let jet = curve.t_derivatives(t).unwrap();
        for (z, v) in zs().iter().zip(&a) {
            let exact = 2.0 * jet.f_prime.eval(*z) / (1.0 - jet.f.eval(*z));
            assert!((v - exact).norm() < 1e-14);
        }
    }

    #[test]
    fn log_derivative_jet_matches_differences() {
        // A'' checked against differences of A' for a map with all four
        // derivatives nonzero.
        let h = PolynomialMap::new(Poly::new(vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.3, 0.1),
            c(-0.2, 0.05),
            c(0.1, 0.0),
        ]));
        let w = c(0.2, -0.1);
        let d = 1e-4;
        let p = log_derivative_jet(&h, w + d);
        let m = log_derivative_jet(&h, w - d);
        let j = log_derivative_jet(&h, w);
        assert!(((p[0] - m[0]) / (2.0 * d) - j[1]).norm() < 1e-7);
        assert!(((p[1] - m[1]) / (2.0 * d) - j[2]).norm() < 1e-7);
        // w/(1 − w): A = 2/(1 − w), A'' = 4/(1 − w)³
        let j = log_derivative_jet(&geo(), w);
        assert!((j[2] - 4.0 / (1.0 - w).powu(3)).norm() < 1e-13);
    }

    #[test]
    fn alpha_derivatives_match_finite_differences() {
        let curve = reference();
        let t0 = c(0.05, 0.02);
        let s = alpha_samples(&geo(), &curve, t0, &zs()).unwrap();
        let d = 1e-4;
        let p = alpha_samples(&geo(), &curve, t0 + d, &zs()).unwrap();
        let m = alpha_samples(&geo(), &curve, t0 - d, &zs()).unwrap();
        for i in 0..zs().len() {
            let fd1 = (p.alpha[i] - m.alpha[i]) / (2.0 * d);
            let fd2 = (p.alpha_dot[i] - m.alpha_dot[i]) / (2.0 * d);
            assert!((fd1 - s.alpha_dot[i]).norm() < 1e-8);
            assert!((fd2 - s.alpha_ddot[i]).norm() < 1e-8);
        }
    }

    #[test]
    fn gateaux_trivial_maps_are_exact() {
        let curve = reference();
        let cfg = GateauxConfig {
            policy: RefinementPolicy::coarse(),
            ..GateauxConfig::default()
        };
        for h in [Mobius::identity(), Mobius::affine(c(2.0, 0.0), c(0.0, 0.0))] {
            let rep = gateaux_check(&h, &curve, &cfg).unwrap();
            assert!(rep.exact, "{rep:?}");
            assert!(rep.passed);
        }
    }

    #[test]
    fn gateaux_geometric_map_decays_linearly() {
        let rep = gateaux_check(&geo(), &reference(), &GateauxConfig::default()).unwrap();
        let slope = rep.slope.unwrap();
        assert!(slope >= 0.9, "{rep:?}");
        assert!(rep.cr_residual <= 1e-6, "{rep:?}");
        assert!(rep.derivative_mismatch <= 1e-6, "{rep:?}");
        assert!(rep.bound_holds);
        // Taylor gives ½; below t = 1e-4 rounding in α dominates the remainder.
        assert!(rep.rows.iter().filter(|r| r.t >= 1e-4).all(|r| r.observed_constant <= 0.5 + 1e-3), "{:?}", rep.rows);
        assert!(rep.passed);
    }

    #[test]
    fn uniform_bounds_hold_for_reference_curve() {
        let curve = reference();
        let b = uniform_bounds(&geo(), &curve, 0.5 * curve.t_domain()).unwrap();
        assert!(b.schwarz_holds && b.cauchy_holds && b.final_holds, "{b:?}");
    }

    #[test]
    fn rejects_pole_in_k() {
        let curve = HolomorphicCurve::new(
            DiskMap::linear(c(0.2, 0.0)),
            OneDifferential::zero(),
            Poly::from_real(&[0.2]),
            ClosedDisk::centered(1.5),
            16,
        )
        .unwrap();
        assert!(matches!(
            gateaux_check(&geo(), &curve, &GateauxConfig::default()),
            Err(Error::Containment(_))
        ));
    }

    #[test]
    fn curve_json_round_trip() {
        let curve = reference();
        let text = serde_json::to_string(&curve).unwrap();
        let back: HolomorphicCurve = serde_json::from_str(&text).unwrap();
        assert_eq!(back, curve);
    }
}
