//! Maps into the sphere with distinguished points: configurations, Möbius
//! charts at the punctures, chart lifts, non-overlap of closed images, and
//! chart transitions.
//!
//! Distances on `ℂ̄` are chordal, `2|z − w| / √((1+|z|²)(1+|w|²))`, so the
//! sphere has diameter 2.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::analytic::Mobius;
use crate::disk_map::{compose_left, image_bound, ClosedDisk, DiskMap, DEFAULT_TRUNCATION};
use crate::error::{Error, Result};
use crate::grid::EvaluationGrid;
use crate::operators::{chi, chi_inverse, ChiPoint, OneDifferential};
use crate::poly::{Poly, C64};
use crate::polyline;

/// A point of `ℂ̄`. JSON: `[re, im]` or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointWire", into = "PointWire")]
pub enum SpherePoint {
    Finite(C64),
    Infinity,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointWire {
    Finite([f64; 2]),
    Named(String),
}

impl From<SpherePoint> for PointWire {
    fn from(p: SpherePoint) -> Self {
        match p {
            SpherePoint::Finite(z) => PointWire::Finite([z.re, z.im]),
            SpherePoint::Infinity => PointWire::Named("inf".into()),
        }
    }
}

impl TryFrom<PointWire> for SpherePoint {
    type Error = String;
    fn try_from(w: PointWire) -> std::result::Result<Self, String> {
        match w {
            PointWire::Finite([re, im]) if re.is_finite() && im.is_finite() => {
                Ok(SpherePoint::Finite(C64::new(re, im)))
            }
            PointWire::Finite(_) => Err("point coordinates must be finite".into()),
            PointWire::Named(s) if s == "inf" || s == "∞" => Ok(SpherePoint::Infinity),
            PointWire::Named(s) => Err(format!("unknown point {s:?}; expected [re, im] or \"inf\"")),
        }
    }
}

impl From<C64> for SpherePoint {
    fn from(z: C64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl SpherePoint {
    pub fn finite(&self) -> Option<C64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }
}

pub fn chordal(a: SpherePoint, b: SpherePoint) -> f64 {
    match (a, b) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

/// Möbius action on `ℂ̄`.
pub fn apply_sphere(m: &Mobius, p: SpherePoint) -> SpherePoint {
    match p {
        SpherePoint::Finite(z) => match m.apply(z) {
            Some(w) => SpherePoint::Finite(w),
            None => SpherePoint::Infinity,
        },
        SpherePoint::Infinity => match m.value_at_infinity() {
            Some(w) => SpherePoint::Finite(w),
            None => SpherePoint::Infinity,
        },
    }
}

/// The rotation of the sphere `(z − p)/(1 + p̄z)` taking `p` to 0 (`1/z` for `p = ∞`).
pub fn rotation_to_origin(p: SpherePoint) -> Mobius {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match p {
        SpherePoint::Finite(p) => Mobius::new(one, -p, p.conj(), one),
        SpherePoint::Infinity => Mobius::new(zero, one, one, zero),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuncturedSphereConfig {
    pub points: Vec<SpherePoint>,
    /// Smallest pairwise chordal distance (2 for a single point).
    pub separation: f64,
}

pub fn make_config(points: Vec<SpherePoint>) -> Result<PuncturedSphereConfig> {
    if points.is_empty() {
        return Err(Error::Config("a configuration needs at least one point".into()));
    }
    let mut separation: f64 = 2.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = chordal(points[i], points[j]);
            if d <= 1e-12 {
                return Err(Error::Config(format!("points {i} and {j} coincide")));
            }
            separation = separation.min(d);
        }
    }
    Ok(PuncturedSphereConfig { points, separation })
}

impl PuncturedSphereConfig {
    /// Chordal distance from point `i` to its nearest neighbour.
    pub fn nearest(&self, i: usize) -> f64 {
        (0..self.points.len())
            .filter(|&j| j != i)
            .map(|j| chordal(self.points[i], self.points[j]))
            .fold(2.0, f64::min)
    }
}

/// A chordal cap `{z : chordal(z, center) < radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: SpherePoint,
    pub radius: f64,
}

impl Cap {
    pub fn contains(&self, p: SpherePoint) -> bool {
        chordal(self.center, p) < self.radius
    }

    pub fn disjoint(&self, other: &Cap) -> bool {
        chordal(self.center, other.center) >= self.radius + other.radius
    }
}

/// `ζ_i`, a Möbius map with `ζ_i(p_i) = 0`, on the domain `B_i`, with the
/// compact `K_i` in the chart plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalChart {
    pub index: usize,
    pub point: SpherePoint,
    pub zeta: Mobius,
    /// `None` when the chart is used on the whole sphere minus its pole.
    pub domain: Option<Cap>,
    pub k: ClosedDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartOptions {
    /// `B_i` radius as a fraction of the distance to the nearest other point.
    pub domain_factor: f64,
    pub k_radius: f64,
}

impl Default for ChartOptions {
    fn default() -> Self {
        ChartOptions {
            domain_factor: 1.0 / 3.0,
            k_radius: 0.9,
        }
    }
}

pub fn default_chart(config: &PuncturedSphereConfig, i: usize) -> Result<LocalChart> {
    chart_with(config, i, &ChartOptions::default())
}

/// `B_i` is the cap about `p_i` of chordal radius `δ = factor·nearest(i)`;
/// `ζ_i = R_{p_i}/r` with `R_p` the rotation taking `p` to 0 and
/// `r = δ/√(4 − δ²)`, so that `ζ_i(B_i) = 𝔻`.
pub fn chart_with(config: &PuncturedSphereConfig, i: usize, opts: &ChartOptions) -> Result<LocalChart> {
    let p = *config
        .points
        .get(i)
        .ok_or_else(|| Error::InvalidArgument(format!("no point with index {i}")))?;
    if !(opts.domain_factor > 0.0 && opts.domain_factor < 0.5) || !(opts.k_radius > 0.0 && opts.k_radius < 1.0) {
        return Err(Error::Config("chart factors must satisfy 0 < factor < 1/2, 0 < K < 1".into()));
    }
    let delta = opts.domain_factor * config.nearest(i);
    let r = delta / (4.0 - delta * delta).sqrt();
    let rot = rotation_to_origin(p);
    let zeta = Mobius::affine(C64::new(1.0 / r, 0.0), C64::new(0.0, 0.0)).compose(&rot);
    Ok(LocalChart {
        index: i,
        point: p,
        zeta,
        domain: Some(Cap {
            center: p,
            radius: delta,
        }),
        k: ClosedDisk::centered(opts.k_radius),
    })
}

pub fn default_atlas(config: &PuncturedSphereConfig) -> Result<Vec<LocalChart>> {
    (0..config.points.len()).map(|i| default_chart(config, i)).collect()
}

impl LocalChart {
    /// A chart at `p` given directly by `ζ`.
    pub fn custom(index: usize, point: SpherePoint, zeta: Mobius, k: ClosedDisk) -> Result<Self> {
        let at_p = apply_sphere(&zeta, point);
        if at_p.finite().is_none_or(|w| w.norm() > 1e-12) {
            return Err(Error::InvalidArgument("chart must send its point to 0".into()));
        }
        if zeta.determinant().norm() == 0.0 {
            return Err(Error::InvalidArgument("chart Möbius map is degenerate".into()));
        }
        Ok(LocalChart {
            index,
            point,
            zeta,
            domain: None,
            k,
        })
    }

    /// The chart `m ∘ ζ` at the same point; `m(0) = 0` is required.
    pub fn reparametrized(&self, m: &Mobius, k: ClosedDisk) -> Result<Self> {
        LocalChart::custom(self.index, self.point, m.compose(&self.zeta), k).map(|c| LocalChart {
            domain: self.domain,
            ..c
        })
    }

    pub fn inverse(&self) -> Mobius {
        self.zeta.inverse()
    }
}

const CONTAINMENT_GRID: [f64; 2] = [0.5, 0.9];

fn containment_grid() -> EvaluationGrid {
    EvaluationGrid::new(CONTAINMENT_GRID.to_vec(), 256).expect("static grid")
}

/// `ψ_i = ζ_i ∘ φ_i` for each chart of the tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonOverlappingTuple {
    pub charts: Vec<LocalChart>,
    pub maps: Vec<DiskMap>,
}

impl NonOverlappingTuple {
    /// Checks chart tags, `ψ_i(0) = 0` and `ψ_i(𝔻̄) ⊂ K_i`; non-overlap is
    /// a separate report ([`check_nonoverlap`]).
    pub fn new(charts: Vec<LocalChart>, maps: Vec<DiskMap>) -> Result<Self> {
        if charts.len() != maps.len() || charts.is_empty() {
            return Err(Error::InvalidArgument("need one chart per map".into()));
        }
        let grid = containment_grid();
        for (i, (c, psi)) in charts.iter().zip(&maps).enumerate() {
            if c.index != i {
                return Err(Error::InvalidArgument(format!(
                    "map {i} is tagged with chart {}",
                    c.index
                )));
            }
            if psi.coeff(0).norm() > 1e-12 {
                return Err(Error::InvalidMap(format!("map {i} does not fix the origin")));
            }
            if !image_bound(psi, &grid).inside(&c.k) {
                return Err(Error::Containment(format!("map {i} leaves K_{i}")));
            }
        }
        Ok(NonOverlappingTuple { charts, maps })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// `φ_i(e^{iθ_j})` on the sphere.
    pub fn boundary(&self, i: usize, samples: usize) -> Vec<SpherePoint> {
        let inv = self.charts[i].inverse();
        self.maps[i]
            .boundary_polyline(samples)
            .into_iter()
            .map(|w| apply_sphere(&inv, SpherePoint::Finite(w)))
            .collect()
    }

    /// Same tuple with the maps listed in the order `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let charts = perm
            .iter()
            .enumerate()
            .map(|(k, &i)| LocalChart {
                index: k,
                ..self.charts[i].clone()
            })
            .collect();
        let maps = perm.iter().map(|&i| self.maps[i].clone()).collect();
        NonOverlappingTuple::new(charts, maps)
    }
}

/// A map `φ_i` expressed in some chart at `p_i` (not necessarily the atlas one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedMap {
    pub chart: LocalChart,
    pub map: DiskMap,
}

/// `(ζ_1∘φ_1, …, ζ_n∘φ_n)` in the atlas charts.
pub fn lift(data: &[TaggedMap], atlas: &[LocalChart]) -> Result<NonOverlappingTuple> {
    if data.len() != atlas.len() {
        return Err(Error::InvalidArgument(format!(
            "{} maps for {} charts",
            data.len(),
            atlas.len()
        )));
    }
    let maps = data
        .iter()
        .zip(atlas)
        .map(|(t, c)| {
            if t.chart.index != c.index {
                return Err(Error::InvalidArgument(format!(
                    "map tagged with chart {} sits in slot {}",
                    t.chart.index, c.index
                )));
            }
            transition(&t.chart, c, &t.map)
        })
        .collect::<Result<Vec<_>>>()?;
    NonOverlappingTuple::new(atlas.to_vec(), maps)
}

/// `ζ' ∘ ζ⁻¹ ∘ ψ` by exact series composition, truncated at
/// `max(64, deg ψ)`. Both charts must be centred at the same point.
pub fn transition(chart: &LocalChart, chart2: &LocalChart, psi: &DiskMap) -> Result<DiskMap> {
    if chordal(chart.point, chart2.point) > 1e-12 {
        return Err(Error::InvalidArgument(
            "transition needs two charts at the same point".into(),
        ));
    }
    if chart.zeta == chart2.zeta {
        return Ok(psi.clone());
    }
    let h = chart2.zeta.compose(&chart.inverse());
    let n = DEFAULT_TRUNCATION.max(psi.degree());
    let out = compose_left(&h, psi, &chart.k, n, &containment_grid())?;
    Ok(out.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolomorphyReport {
    pub step: f64,
    /// Per direction: `max_k |D(iv)_k − i D(v)_k|` over the `χ` coordinates.
    pub residuals: Vec<f64>,
    pub cr_residual: f64,
}

/// A `χ`-space direction `(φ, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiDirection {
    pub phi: Poly,
    pub c: C64,
}

fn transition_chi(chart: &LocalChart, chart2: &LocalChart, p: &ChiPoint, n: usize) -> Result<Vec<C64>> {
    let psi = chi_inverse(p, n)?.value;
    let out = transition(chart, chart2, &psi)?;
    let q = chi(&out)?;
    let mut v: Vec<C64> = (0..=n).map(|k| q.one.rational().series(n + 1).coeff(k)).collect();
    v.push(q.c);
    Ok(v)
}

/// Central difference quotients of the transition in `χ` coordinates along
/// `v` and `iv`; holomorphy makes `D(iv) = i D(v)`.
pub fn transition_holomorphy_check(
    chart: &LocalChart,
    chart2: &LocalChart,
    psi: &DiskMap,
    directions: &[ChiDirection],
    step: f64,
) -> Result<HolomorphyReport> {
    let n = 32;
    let base = chi(psi)?;
    let shifted = |d: &ChiDirection, s: C64| ChiPoint {
        one: base.one.add(&OneDifferential::from_series(d.phi.scale(s))),
        c: base.c + d.c * s,
    };
    let quotient = |d: &ChiDirection, u: C64| -> Result<Vec<C64>> {
        let plus = transition_chi(chart, chart2, &shifted(d, u * step), n)?;
        let minus = transition_chi(chart, chart2, &shifted(d, -u * step), n)?;
        Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * step)).collect())
    };
    let i = C64::new(0.0, 1.0);
    let mut residuals = Vec::with_capacity(directions.len());
    for d in directions {
        let dv = quotient(d, C64::new(1.0, 0.0))?;
        let div = quotient(d, i)?;
        residuals.push(
            dv.iter()
                .zip(&div)
                .map(|(a, b)| (b - i * a).norm())
                .fold(0.0, f64::max),
        );
    }
    Ok(HolomorphyReport {
        step,
        cr_residual: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OverlapWitness {
    Crossing { point: SpherePoint },
    Contained { inner: usize, outer: usize, point: SpherePoint },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub verdict: Verdict,
    /// Polyline distance in the normalized plane.
    pub distance: f64,
    pub margin: f64,
    pub witness: Option<OverlapWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonoverlapReport {
    pub verdict: Verdict,
    /// The point sent to `∞` before the planar tests.
    pub pole: SpherePoint,
    pub samples: usize,
    pub pairs: Vec<PairReport>,
}

fn fibonacci_sphere(n: usize) -> Vec<SpherePoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut pts = vec![SpherePoint::Infinity];
    for k in 0..n {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let (x, y) = (r * (golden * k as f64).cos(), r * (golden * k as f64).sin());
        pts.push(SpherePoint::Finite(C64::new(x, y) / (1.0 - z)));
    }
    pts
}

fn outside_image(tuple: &NonOverlappingTuple, i: usize, planar: &[C64], q: SpherePoint) -> bool {
    match apply_sphere(&tuple.charts[i].zeta, q) {
        SpherePoint::Infinity => true,
        SpherePoint::Finite(w) => polyline::winding_number(planar, w) == 0,
    }
}

/// Pairwise disjointness of the closed images `φ_i(𝔻̄)` on the sphere.
///
/// A point `q` far from every image is sent to `∞` by `1/R_q`; then, per
/// pair, crossing boundary polylines or one centre `φ_j(0)` inside the other
/// boundary means overlap, and a gap below twice the summed chord-sagitta
/// estimates is reported as indeterminate.
pub fn check_nonoverlap(tuple: &NonOverlappingTuple, samples: usize) -> Result<NonoverlapReport> {
    if samples < 8 {
        return Err(Error::DegeneratePolyline("need at least 8 boundary samples".into()));
    }
    let n = tuple.len();
    let chart_polys: Vec<Vec<C64>> = tuple.maps.iter().map(|m| m.boundary_polyline(samples)).collect();
    for (i, p) in chart_polys.iter().enumerate() {
        if polyline::self_intersection(p).is_some() {
            return Err(Error::DegeneratePolyline(format!("boundary of map {i} crosses itself")));
        }
    }
    let sphere: Vec<Vec<SpherePoint>> = (0..n).map(|i| tuple.boundary(i, samples)).collect();

    let pole = fibonacci_sphere(256)
        .into_iter()
        .filter(|&q| (0..n).all(|i| outside_image(tuple, i, &chart_polys[i], q)))
        .map(|q| {
            let d = sphere
                .iter()
                .flatten()
                .map(|&b| chordal(q, b))
                .fold(f64::INFINITY, f64::min);
            (q, d)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(q, _)| q)
        .ok_or_else(|| Error::DegeneratePolyline("the images cover the sphere".into()))?;
    let t = {
        let r = rotation_to_origin(pole);
        Mobius::new(r.c, r.d, r.a, r.b)
    };
    let to_plane = |p: SpherePoint| -> Result<C64> {
        p.finite()
            .ok_or_else(|| Error::DegeneratePolyline("an image passes through the chosen pole".into()))
    };

    let mut planar = Vec::with_capacity(n);
    let mut sagitta = Vec::with_capacity(n);
    let mut centers = Vec::with_capacity(n);
    for i in 0..n {
        let m = t.compose(&tuple.charts[i].inverse());
        let pts: Vec<C64> = chart_polys[i]
            .iter()
            .map(|&w| to_plane(apply_sphere(&m, SpherePoint::Finite(w))))
            .collect::<Result<_>>()?;
        let mut err: f64 = 0.0;
        for j in 0..samples {
            let mid = tuple.maps[i].boundary_point(TAU * (j as f64 + 0.5) / samples as f64);
            let mid = to_plane(apply_sphere(&m, SpherePoint::Finite(mid)))?;
            err = err.max((mid - 0.5 * (pts[j] + pts[(j + 1) % samples])).norm());
        }
        sagitta.push(err);
        centers.push(to_plane(apply_sphere(&m, SpherePoint::Finite(C64::new(0.0, 0.0))))?);
        planar.push(pts);
    }
    let inv_t = t.inverse();
    let back = |w: C64| apply_sphere(&inv_t, SpherePoint::Finite(w));

    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let margin = 2.0 * (sagitta[i] + sagitta[j]);
            let distance = polyline::polyline_distance(&planar[i], &planar[j]);
            let witness = if let Some(c) = polyline::curves_intersection(&planar[i], &planar[j]) {
                Some(OverlapWitness::Crossing { point: back(c.point) })
            } else if polyline::winding_number(&planar[i], centers[j]) != 0 {
                Some(OverlapWitness::Contained {
                    inner: j,
                    outer: i,
                    point: back(centers[j]),
                })
            } else if polyline::winding_number(&planar[j], centers[i]) != 0 {
                Some(OverlapWitness::Contained {
                    inner: i,
                    outer: j,
                    point: back(centers[i]),
                })
            } else {
                None
            };
            let verdict = if witness.is_some() {
                Verdict::Fail
            } else if distance <= margin {
                Verdict::Indeterminate
            } else {
                Verdict::Pass
            };
            pairs.push(PairReport {
                i,
                j,
                verdict,
                distance: if witness.is_some() { 0.0 } else { distance },
                margin,
                witness,
            });
        }
    }
    let verdict = if pairs.iter().any(|p| p.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if pairs.iter().any(|p| p.verdict == Verdict::Indeterminate) {
        Verdict::Indeterminate
    } else {
        Verdict::Pass
    };
    Ok(NonoverlapReport {
        verdict,
        pole,
        samples,
        pairs,
    })
}

/// Two maps onto the closed disks of radius ½ about `±(½ + ε)`, in the
/// charts `ζ_i = z − p_i`. The closed images touch at `ε = 0`.
pub fn tangent_disk_family(eps: f64) -> Result<NonOverlappingTuple> {
    let k = ClosedDisk::centered(0.9);
    let centers = [-(0.5 + eps), 0.5 + eps];
    let charts = centers
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            LocalChart::custom(
                i,
                SpherePoint::Finite(C64::new(p, 0.0)),
                Mobius::affine(C64::new(1.0, 0.0), C64::new(-p, 0.0)),
                k,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let psi = DiskMap::linear(C64::new(0.5, 0.0));
    NonOverlappingTuple::new(charts, vec![psi.clone(), psi])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::d_o;
    use crate::grid::RefinementPolicy;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fin(re: f64, im: f64) -> SpherePoint {
        SpherePoint::Finite(c(re, im))
    }

    #[test]
    fn config_examples() {
        let cfg = make_config(vec![fin(0.0, 0.0), fin(1.0, 0.0), SpherePoint::Infinity]).unwrap();
        assert_eq!(cfg.points.len(), 3);
        assert!(make_config(vec![fin(0.0, 0.0), fin(0.0, 0.0)]).is_err());
        // {0, 1, i, −1}: pairwise chordal distances are √2 (to 0) and 2/√2·… — brute force.
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        let cfg = make_config(pts.iter().map(|&z| z.into()).collect()).unwrap();
        let mut oracle = f64::INFINITY;
        for a in 0..4 {
            for b in a + 1..4 {
                let (p, q) = (pts[a], pts[b]);
                // unit-sphere embedding
                let emb = |z: C64| {
                    let s = 1.0 + z.norm_sqr();
                    [2.0 * z.re / s, 2.0 * z.im / s, (z.norm_sqr() - 1.0) / s]
                };
                let (u, v) = (emb(p), emb(q));
                let d = ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt();
                oracle = oracle.min(d);
            }
        }
        assert!((cfg.separation - oracle).abs() < 1e-14);
        assert!((oracle - 2f64.sqrt()).abs() < 1e-14);
        let json = r#"{"points": [[0, 0], "inf"], "separation": 2.0}"#;
        let parsed: PuncturedSphereConfig = serde_json::from_str(json).unwrap();
        assert_eq!(parsed.points[1], SpherePoint::Infinity);
    }

    #[test]
    fn default_charts() {
        let cfg = make_config(vec![fin(0.0, 0.0), SpherePoint::Infinity]).unwrap();
        let ch = default_chart(&cfg, 0).unwrap();
        // δ = 2/3 gives r = 1/(2√2).
        let r = 1.0 / (2.0 * 2f64.sqrt());
        for z in [c(0.1, 0.0), c(-0.2, 0.3)] {
            assert!((ch.zeta.apply(z).unwrap() - z / r).norm() < 1e-14);
        }
        // ζ maps ∂B onto the unit circle.
        let on_edge = fin(r, 0.0);
        assert!((chordal(on_edge, ch.point) - ch.domain.unwrap().radius).abs() < 1e-14);
        let inf_chart = default_chart(&cfg, 1).unwrap();
        assert_eq!(apply_sphere(&inf_chart.zeta, SpherePoint::Infinity), fin(0.0, 0.0));

        let cfg = make_config(vec![fin(0.0, 0.0), fin(1.0, 0.0), SpherePoint::Infinity]).unwrap();
        let atlas = default_atlas(&cfg).unwrap();
        for ch in &atlas {
            assert_eq!(apply_sphere(&ch.zeta, ch.point), fin(0.0, 0.0));
            let b = ch.domain.unwrap();
            for t in 0..16 {
                let w = C64::from_polar(1.0, t as f64);
                let z = apply_sphere(&ch.inverse(), SpherePoint::Finite(w));
                assert!((chordal(z, b.center) - b.radius).abs() < 1e-12);
            }
        }
        for a in 0..3 {
            for b in a + 1..3 {
                assert!(atlas[a].domain.unwrap().disjoint(&atlas[b].domain.unwrap()));
            }
        }
    }

    #[test]
    fn lift_examples() {
        let id_chart = LocalChart::custom(0, fin(0.0, 0.0), Mobius::identity(), ClosedDisk::centered(0.9)).unwrap();
        let phi = DiskMap::linear(c(0.5, 0.0));
        let t = lift(
            &[TaggedMap {
                chart: id_chart.clone(),
                map: phi.clone(),
            }],
            std::slice::from_ref(&id_chart),
        )
        .unwrap();
        assert_eq!(t.maps[0], phi);
        let doubled = id_chart
            .reparametrized(&Mobius::affine(c(2.0, 0.0), c(0.0, 0.0)), ClosedDisk::centered(1.5))
            .unwrap();
        let phi = DiskMap::linear(c(0.3, 0.0));
        let t = lift(&[TaggedMap { chart: id_chart, map: phi.clone() }], &[doubled]).unwrap();
        assert!(t.maps[0].max_coeff_diff(&phi.scaled(c(2.0, 0.0))) < 1e-15);
    }

    #[test]
    fn transition_examples() {
        let k = ClosedDisk::centered(0.3);
        let a = LocalChart::custom(0, fin(0.0, 0.0), Mobius::identity(), k).unwrap();
        let b = a
            .reparametrized(&Mobius::new(c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)), k)
            .unwrap();
        let psi = DiskMap::new(vec![c(0.2, 0.0), c(0.05, 0.01)], 1.5).unwrap();
        let out = transition(&a, &b, &psi).unwrap();
        // w/(1 − w) ∘ ψ = Σ ψ^k, from an independent expansion.
        let mut oracle = Poly::zero();
        let mut pow = Poly::one();
        for _ in 0..80 {
            pow = pow.mul_trunc(&psi.as_poly(), 64);
            oracle = &oracle + &pow;
        }
        assert!(out.as_poly().max_coeff_diff(&oracle, 64) < 1e-9);
        assert_eq!(transition(&a, &a, &psi).unwrap(), psi);
        let big = DiskMap::linear(c(0.5, 0.0));
        assert!(matches!(transition(&a, &b, &big), Err(Error::Containment(_))));
    }

    fn pair_of_charts() -> (LocalChart, LocalChart, LocalChart) {
        let cfg = make_config(vec![fin(0.0, 0.0), fin(1.0, 0.0), SpherePoint::Infinity]).unwrap();
        let c1 = default_chart(&cfg, 2).unwrap();
        let k = ClosedDisk::centered(0.9);
        let c2 = c1
            .reparametrized(&Mobius::new(c(2.0, 0.0), c(0.0, 0.0), c(0.3, 0.1), c(1.0, 0.0)), k)
            .unwrap();
        let c3 = c1
            .reparametrized(&Mobius::new(c(0.0, 1.2), c(0.0, 0.0), c(-0.2, 0.0), c(1.0, 0.0)), k)
            .unwrap();
        (c1, c2, c3)
    }

    #[test]
    fn cocycle_and_inverse() {
        let (c1, c2, c3) = pair_of_charts();
        let psi = DiskMap::new(vec![c(0.25, 0.05), c(0.03, -0.02), c(0.01, 0.0)], 1.5).unwrap();
        let direct = transition(&c1, &c3, &psi).unwrap();
        let via = transition(&c2, &c3, &transition(&c1, &c2, &psi).unwrap()).unwrap();
        assert!(direct.max_coeff_diff(&via) < 1e-8);
        let back = transition(&c2, &c1, &transition(&c1, &c2, &psi).unwrap()).unwrap();
        assert!(back.max_coeff_diff(&psi) < 1e-8);
    }

    #[test]
    fn holomorphy_examples() {
        let k = ClosedDisk::centered(0.6);
        let a = LocalChart::custom(0, fin(0.0, 0.0), Mobius::identity(), k).unwrap();
        let dirs = [
            ChiDirection { phi: Poly::one(), c: c(0.0, 0.0) },
            ChiDirection { phi: Poly::from_real(&[0.0, 1.0]), c: c(0.0, 0.0) },
        ];
        let psi = DiskMap::linear(c(0.2, 0.0));
        let r = transition_holomorphy_check(&a, &a, &psi, &dirs, 1e-4).unwrap();
        assert!(r.cr_residual < 1e-9, "{r:?}");
        let two = a.reparametrized(&Mobius::affine(c(2.0, 0.0), c(0.0, 0.0)), k).unwrap();
        let r = transition_holomorphy_check(&a, &two, &psi, &dirs, 1e-4).unwrap();
        assert!(r.cr_residual < 1e-9, "{r:?}");
        let h = a
            .reparametrized(&Mobius::new(c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)), k)
            .unwrap();
        let r = transition_holomorphy_check(&a, &h, &psi, &dirs, 1e-4).unwrap();
        assert!(r.cr_residual < 1e-6, "{r:?}");
    }

    #[test]
    fn nonoverlap_examples() {
        let ok = tangent_disk_family(1e-3).unwrap();
        assert_eq!(check_nonoverlap(&ok, 512).unwrap().verdict, Verdict::Pass);
        let bad = tangent_disk_family(-1e-3).unwrap();
        let r = check_nonoverlap(&bad, 512).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(matches!(r.pairs[0].witness, Some(OverlapWitness::Crossing { .. })));
        let touching = tangent_disk_family(0.0).unwrap();
        assert_ne!(check_nonoverlap(&touching, 512).unwrap().verdict, Verdict::Pass);

        // Identical images: same disk about 0 through two different charts.
        let k = ClosedDisk::centered(0.9);
        let a = LocalChart::custom(0, fin(0.0, 0.0), Mobius::identity(), k).unwrap();
        let b = LocalChart::custom(1, fin(0.0, 0.0), Mobius::identity(), k).unwrap();
        let psi = DiskMap::linear(c(0.3, 0.0));
        let same = NonOverlappingTuple::new(vec![a, b], vec![psi.clone(), psi]).unwrap();
        assert_eq!(check_nonoverlap(&same, 256).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn nonoverlap_on_default_atlas_is_symmetric() {
        let cfg = make_config(vec![fin(0.0, 0.0), fin(1.0, 0.0), SpherePoint::Infinity]).unwrap();
        let atlas = default_atlas(&cfg).unwrap();
        let maps = vec![
            DiskMap::new(vec![c(0.8, 0.0), c(0.05, 0.0)], 1.5).unwrap(),
            DiskMap::linear(c(0.0, 0.7)),
            DiskMap::new(vec![c(0.6, 0.2), c(0.0, 0.1)], 1.5).unwrap(),
        ];
        let t = NonOverlappingTuple::new(atlas, maps).unwrap();
        let r = check_nonoverlap(&t, 256).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        for perm in [[2, 0, 1], [1, 2, 0], [0, 2, 1]] {
            assert_eq!(check_nonoverlap(&t.permuted(&perm).unwrap(), 256).unwrap().verdict, Verdict::Pass);
        }
        // Distinct lifts are at positive d_o distance.
        let other = t.maps[0].scaled(c(1.0 + 1e-6, 0.0));
        assert!(d_o(&t.maps[0], &other, &RefinementPolicy::coarse()).unwrap().value > 0.0);
    }

    #[test]
    fn chart_at_infinity_is_separated() {
        let cfg = make_config(vec![
            SpherePoint::Finite(C64::new(0.0, 0.0)),
            SpherePoint::Finite(C64::new(1.0, 0.0)),
            SpherePoint::Infinity,
        ])
        .unwrap();
        let maps = vec![DiskMap::linear(C64::new(0.5, 0.0)); 3];
        let t = NonOverlappingTuple::new(default_atlas(&cfg).unwrap(), maps).unwrap();
        let r = check_nonoverlap(&t, 128).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }
}
