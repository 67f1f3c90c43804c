//! Holomorphic maps of the unit disk fixing the origin, stored as truncated
//! power series `f(z) = Σ_{k=1}^{N} a_k z^k`.
//!
//! Every map carries a radius `ρ > 1` on which it is asserted univalent. That
//! assertion is what places a map in the quasiconformally extendible class:
//! a map univalent on `|z| < ρ` restricts to one with a quasiconformal
//! extension to a neighbourhood of the closed disk. Nothing here proves
//! univalence; [`check_univalence`] is a sampled necessary-condition test.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::complex_serde;
use crate::error::{Error, Result};
use crate::grid::EvaluationGrid;
use crate::poly::{Poly, C64};
use crate::polyline;

/// Default truncation degree `N`.
pub const DEFAULT_TRUNCATION: usize = 64;

/// Largest univalence radius ever claimed for a derived map.
pub const RHO_CAP: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiskMapWire")]
pub struct DiskMap {
    rho: f64,
    /// `coeffs[0] = a_1`.
    #[serde(with = "complex_serde::vec")]
    coeffs: Vec<C64>,
}

#[derive(Deserialize)]
struct DiskMapWire {
    rho: f64,
    #[serde(with = "complex_serde::vec")]
    coeffs: Vec<C64>,
}

impl TryFrom<DiskMapWire> for DiskMap {
    type Error = Error;
    fn try_from(w: DiskMapWire) -> Result<Self> {
        DiskMap::new(w.coeffs, w.rho)
    }
}

/// A truncated result together with the size of what was cut off, measured
/// as `Σ_{N<k≤2N} |c_k|` (the sup of the discarded part on the closed disk,
/// up to the part beyond `2N`).
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    pub tail: f64,
    pub warnings: Vec<String>,
}

impl DiskMap {
    pub fn new(coeffs: Vec<C64>, rho: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidMap("no coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidMap("non-finite coefficient".into()));
        }
        if !(rho > 1.0 && rho.is_finite()) {
            return Err(Error::InvalidMap(format!(
                "univalence radius must exceed 1, got {rho}"
            )));
        }
        Ok(DiskMap { rho, coeffs })
    }

    /// From a series whose constant term must vanish.
    pub fn from_poly(p: &Poly, rho: f64) -> Result<Self> {
        if p.coeff(0).norm() > 1e-14 * p.sup_coeff().max(1.0) {
            return Err(Error::InvalidMap(format!(
                "constant term {} is not zero",
                p.coeff(0)
            )));
        }
        let coeffs = if p.len() <= 1 {
            vec![C64::new(0.0, 0.0)]
        } else {
            p.coeffs()[1..].to_vec()
        };
        DiskMap::new(coeffs, rho)
    }

    pub fn identity() -> Self {
        DiskMap {
            rho: RHO_CAP,
            coeffs: vec![C64::new(1.0, 0.0)],
        }
    }

    /// `a z` with no finite-radius constraint beyond the cap.
    pub fn linear(a: C64) -> Self {
        DiskMap {
            rho: RHO_CAP,
            coeffs: vec![a],
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `a_k`, zero past the stored degree and for `k = 0`.
    pub fn coeff(&self, k: usize) -> C64 {
        if k == 0 {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs.get(k - 1).copied().unwrap_or_default()
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `f'(0)`
    pub fn a1(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn as_poly(&self) -> Poly {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(C64::new(0.0, 0.0));
        c.extend_from_slice(&self.coeffs);
        Poly::new(c)
    }

    /// Rejects maps with `f'(0) = 0`, which cannot be one-to-one.
    pub fn require_nondegenerate(&self) -> Result<()> {
        let a1 = self.a1().norm();
        if a1 <= 1e-12 {
            return Err(Error::DegenerateDerivative(a1));
        }
        Ok(())
    }

    pub fn scaled(&self, s: C64) -> DiskMap {
        DiskMap {
            rho: self.rho,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn with_rho(&self, rho: f64) -> Result<DiskMap> {
        DiskMap::new(self.coeffs.clone(), rho)
    }

    /// `f(z)` by Horner's rule; `|z|` must be below `ρ`.
    pub fn evaluate(&self, z: C64) -> Result<C64> {
        if z.norm() >= self.rho {
            return Err(Error::Domain {
                z: z.to_string(),
                rho: self.rho,
            });
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c) * z
    }

    /// Exact coefficient-shift derivative of the given order.
    pub fn derivative(&self, order: usize) -> Poly {
        self.as_poly().nth_derivative(order)
    }

    /// Max coefficient difference, padding the shorter map with zeros.
    pub fn max_coeff_diff(&self, other: &DiskMap) -> f64 {
        let n = self.degree().max(other.degree());
        (1..=n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    pub fn boundary_point(&self, theta: f64) -> C64 {
        self.eval_unchecked(C64::from_polar(1.0, theta))
    }

    /// `f(e^{iθ_j})` at `m` equispaced angles starting at `θ = 0`.
    pub fn boundary_polyline(&self, m: usize) -> Vec<C64> {
        (0..m)
            .map(|j| self.boundary_point(TAU * j as f64 / m as f64))
            .collect()
    }
}

/// Closed round disk, used for the compact sets `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedDisk {
    #[serde(with = "complex_serde::single")]
    pub center: C64,
    pub radius: f64,
}

impl ClosedDisk {
    pub fn new(center: C64, radius: f64) -> Self {
        ClosedDisk { center, radius }
    }

    pub fn centered(radius: f64) -> Self {
        ClosedDisk::new(C64::new(0.0, 0.0), radius)
    }

    pub fn contains(&self, w: C64) -> bool {
        (w - self.center).norm() <= self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageBound {
    /// `max |f|` over the closed disk, attained on the circle.
    pub max_modulus: f64,
    pub argmax: C64,
    /// `(θ, f(e^{iθ}))`
    pub boundary: Vec<(f64, C64)>,
}

impl ImageBound {
    pub fn polyline(&self) -> Vec<C64> {
        self.boundary.iter().map(|p| p.1).collect()
    }

    /// Whether every boundary sample lies in `k`. For a round `k` this is
    /// containment of the whole closed image, by the maximum principle.
    pub fn inside(&self, k: &ClosedDisk) -> bool {
        self.boundary.iter().all(|p| k.contains(p.1))
    }

    pub fn max_distance_from(&self, c: C64) -> f64 {
        self.boundary
            .iter()
            .map(|p| (p.1 - c).norm())
            .fold(0.0, f64::max)
    }
}

/// Samples `f` on the unit circle at the grid's angular resolution.
pub fn image_bound(f: &DiskMap, grid: &EvaluationGrid) -> ImageBound {
    let boundary: Vec<(f64, C64)> = grid
        .boundary_angles()
        .map(|t| (t, f.boundary_point(t)))
        .collect();
    let (mut max_modulus, mut argmax) = (0.0, C64::new(1.0, 0.0));
    for &(t, w) in &boundary {
        if w.norm() > max_modulus {
            max_modulus = w.norm();
            argmax = C64::from_polar(1.0, t);
        }
    }
    ImageBound {
        max_modulus,
        argmax,
        boundary,
    }
}

/// Formal composition `h ∘ f` truncated at degree `n`.
///
/// Requires `f(𝔻̄) ⊂ k` (checked on the boundary polyline of `boundary_grid`),
/// no singular or critical point of `h` in `k`, and `h(0) = 0`. Möbius and
/// polynomial `h` compose exactly on coefficients; any other `h` is sampled
/// on the unit circle and refit by discrete least squares (the DFT).
pub fn compose_left<H: Analytic + ?Sized>(
    h: &H,
    f: &DiskMap,
    k: &ClosedDisk,
    n: usize,
    boundary_grid: &EvaluationGrid,
) -> Result<Truncated<DiskMap>> {
    let bound = image_bound(f, boundary_grid);
    if !bound.inside(k) {
        return Err(Error::Containment(format!(
            "f(S^1) reaches distance {:.6} from the center of K (radius {})",
            bound.max_distance_from(k.center),
            k.radius
        )));
    }
    let exceptional = h.exceptional_points();
    if let Some(p) = exceptional.iter().find(|p| k.contains(**p)) {
        return Err(Error::Containment(format!(
            "left map is singular or not locally injective at {p}, inside K"
        )));
    }
    let h0 = h.eval(C64::new(0.0, 0.0));
    if h0.norm() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "left map must fix the origin, h(0) = {h0}"
        )));
    }

    let fp = f.as_poly();
    let wide = match h.compose_exact(&fp, 2 * n) {
        Some(p) => p,
        None => sampled_composition(h, f, 2 * n),
    };
    let tail = (n + 1..=2 * n).map(|j| wide.coeff(j).norm()).sum();
    let mut series = wide.truncate(n);
    series = Poly::new({
        let mut c = series.into_coeffs();
        c[0] = C64::new(0.0, 0.0);
        c
    });

    let mut warnings = Vec::new();
    let min_dh = bound
        .boundary
        .iter()
        .map(|p| h.jet(p.1)[1].norm())
        .chain(
            boundary_grid
                .nodes()
                .map(|node| h.jet(f.eval_unchecked(node.z))[1].norm()),
        )
        .fold(f64::INFINITY, f64::min);
    if min_dh < 1e-10 {
        warnings.push(format!("h' nearly vanishes on f(D): min |h'| = {min_dh:e}"));
    }

    let rho = composed_radius(f, &exceptional)?;
    Ok(Truncated {
        value: DiskMap::from_poly(&series, rho)?,
        tail,
        warnings,
    })
}

fn sampled_composition<H: Analytic + ?Sized>(h: &H, f: &DiskMap, n: usize) -> Poly {
    let m = 4 * (n + 1);
    let samples: Vec<C64> = (0..m)
        .map(|j| h.eval(f.boundary_point(TAU * j as f64 / m as f64)))
        .collect();
    let coeffs = (0..=n)
        .map(|k| {
            samples
                .iter()
                .enumerate()
                .map(|(j, &v)| v * C64::from_polar(1.0, -TAU * (j * k % m) as f64 / m as f64))
                .sum::<C64>()
                / m as f64
        })
        .collect();
    Poly::new(coeffs)
}

/// Largest `r ≤ ρ(f)` such that `f(|z| ≤ r)` avoids every exceptional point
/// of the left map; by containment this exceeds 1.
fn composed_radius(f: &DiskMap, exceptional: &[C64]) -> Result<f64> {
    if exceptional.is_empty() {
        return Ok(f.rho());
    }
    let fp = f.as_poly();
    let avoids = |r: f64| {
        let pts: Vec<C64> = (0..256)
            .map(|j| fp.eval(C64::from_polar(r, TAU * j as f64 / 256.0)))
            .collect();
        exceptional.iter().all(|&p| {
            let shifted: Vec<C64> = pts.iter().map(|&w| w - p).collect();
            polyline::argument_winding(&shifted, 1.0) == Some(0)
        })
    };
    if avoids(f.rho()) {
        return Ok(f.rho());
    }
    let (mut lo, mut hi) = (1.0, f.rho());
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if avoids(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo <= 1.0 {
        return Err(Error::Containment(
            "composition is not analytic past the closed disk".into(),
        ));
    }
    Ok(lo)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnivalenceWitness {
    /// `f'` vanishes here.
    CriticalPoint {
        #[serde(with = "complex_serde::single")]
        z: C64,
    },
    /// Two boundary points with (approximately) the same image.
    Collision {
        #[serde(with = "complex_serde::single")]
        z1: C64,
        #[serde(with = "complex_serde::single")]
        z2: C64,
        #[serde(with = "complex_serde::single")]
        value: C64,
    },
    /// The boundary curve does not wind once around `f(0)`.
    Winding { turns: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivalenceReport {
    pub passed: bool,
    pub witness: Option<UnivalenceWitness>,
    /// Winding number of `f'` along the unit circle (zeros of `f'` in 𝔻).
    pub derivative_winding: Option<i32>,
}

/// Sampled univalence test on the closed disk.
///
/// Checks that `f'` has no zero in 𝔻̄ (roots of `f'`, cross-checked by the
/// argument principle on the circle) and that `f(S¹)` is a simple closed
/// curve winding once around `0`. For a map analytic on `|z| < ρ`, `ρ > 1`,
/// the second condition implies injectivity on 𝔻̄; both are only checked on
/// a polyline, so a pass is evidence rather than proof.
pub fn check_univalence(f: &DiskMap, grid: &EvaluationGrid) -> UnivalenceReport {
    let df = f.derivative(1);
    let fail = |w: UnivalenceWitness, dw: Option<i32>| UnivalenceReport {
        passed: false,
        witness: Some(w),
        derivative_winding: dw,
    };

    let mut m = grid.angular().max(8 * f.degree()).max(64);
    let mut derivative_winding = None;
    for _ in 0..6 {
        let vals: Vec<C64> = (0..m)
            .map(|j| df.eval(C64::from_polar(1.0, TAU * j as f64 / m as f64)))
            .collect();
        if let Some(pos) = vals.iter().position(|v| v.norm() == 0.0) {
            return fail(
                UnivalenceWitness::CriticalPoint {
                    z: C64::from_polar(1.0, TAU * pos as f64 / m as f64),
                },
                None,
            );
        }
        derivative_winding = polyline::argument_winding(&vals, std::f64::consts::FRAC_PI_4);
        if derivative_winding.is_some() {
            break;
        }
        m *= 2;
    }

    let scale = f.a1().norm().max(df.sup_coeff());
    if let Some(z) = df
        .roots()
        .into_iter()
        .filter(|z| z.norm() <= 1.0 + 1e-12)
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
    {
        return fail(UnivalenceWitness::CriticalPoint { z }, derivative_winding);
    }
    if df.coeff(0).norm() <= 1e-14 * scale {
        return fail(
            UnivalenceWitness::CriticalPoint {
                z: C64::new(0.0, 0.0),
            },
            derivative_winding,
        );
    }
    if let Some(w) = derivative_winding.filter(|&w| w != 0) {
        // Roots missed a zero the argument principle sees; report the grid
        // node with the smallest |f'|.
        let z = grid
            .nodes()
            .min_by(|a, b| df.eval(a.z).norm().total_cmp(&df.eval(b.z).norm()))
            .map(|n| n.z)
            .unwrap_or_default();
        let _ = w;
        return fail(UnivalenceWitness::CriticalPoint { z }, derivative_winding);
    }

    let pts = f.boundary_polyline(m);
    if let Some(cross) = polyline::self_intersection(&pts) {
        let theta = |(seg, s): (usize, f64)| TAU * (seg as f64 + s) / m as f64;
        return fail(
            UnivalenceWitness::Collision {
                z1: C64::from_polar(1.0, theta(cross.first)),
                z2: C64::from_polar(1.0, theta(cross.second)),
                value: cross.point,
            },
            derivative_winding,
        );
    }
    let turns = polyline::winding_number(&pts, C64::new(0.0, 0.0));
    if turns != 1 {
        return fail(UnivalenceWitness::Winding { turns }, derivative_winding);
    }
    UnivalenceReport {
        passed: true,
        witness: None,
        derivative_winding,
    }
}
