//! Property suites over seeded corpora. Every report carries its seed and is
//! a pure function of the options, so a failure replays exactly.

use std::f64::consts::TAU;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::Mobius;
use crate::atlas::{
    check_nonoverlap, default_atlas, default_chart, make_config, tangent_disk_family, transition,
    transition_holomorphy_check, ChiDirection, LocalChart, NonOverlappingTuple, SpherePoint, Verdict,
};
use crate::config::RunConfig;
use crate::corpus::{self, CORPUS_RHO};
use crate::curves::{curve_at, gateaux_check, uniform_bounds, GateauxConfig, HolomorphicCurve};
use crate::disk_map::{ClosedDisk, DiskMap};
use crate::error::{Error, Result};
use crate::grid::RefinementPolicy;
use crate::metrics::{d_o, d_ps, d_s, norm_a1, norm_a2, Distance};
use crate::operators::{
    beta, beta_hat, chi, chi_inverse, pre_schwarzian, psi, psi_hat, schwarzian, OneDifferential, QuadDifferential,
};
use crate::poly::{Poly, Rational, C64};
use crate::welding::{random_circle_map, unweld, verify_welding, weld, weld_from, UnweldConfig, WeldConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Metrics,
    Bounds,
    Curves,
    Welding,
    Atlas,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Identities,
        Suite::Metrics,
        Suite::Bounds,
        Suite::Curves,
        Suite::Welding,
        Suite::Atlas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Metrics => "metrics",
            Suite::Bounds => "bounds",
            Suite::Curves => "curves",
            Suite::Welding => "welding",
            Suite::Atlas => "atlas",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown suite {s:?}; expected identities, metrics, bounds, curves, welding, atlas or all"
                ))
            })
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub truncation: usize,
    pub policy: RefinementPolicy,
    pub corpus_size: usize,
    /// Replaces the seeded map corpus (e.g. a corpus file from the CLI).
    pub corpus: Option<Vec<DiskMap>>,
    pub newton_tol: f64,
    pub fd_step: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions::from(&RunConfig::default())
    }
}

impl From<&RunConfig> for VerifyOptions {
    fn from(cfg: &RunConfig) -> Self {
        VerifyOptions {
            seed: cfg.seed,
            truncation: cfg.truncation,
            policy: cfg.policy(),
            corpus_size: cfg.corpus_size,
            corpus: None,
            newton_tol: cfg.tolerances.newton,
            fd_step: cfg.tolerances.fd_step,
        }
    }
}

impl VerifyOptions {
    fn corpus(&self) -> Vec<DiskMap> {
        self.corpus
            .clone()
            .unwrap_or_else(|| corpus::univalent_corpus(self.seed, self.corpus_size, 10))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value (residual, error, or count); absent when every
    /// case failed before producing one.
    pub value: Option<f64>,
    /// Required bound on `value`, with `comparison` saying which side.
    pub bound: f64,
    pub comparison: String,
    pub checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<String>,
}

/// Accumulates a worst value over many cases.
struct Property {
    name: &'static str,
    bound: f64,
    at_most: bool,
    worst: f64,
    checked: usize,
    failures: Vec<String>,
}

impl Property {
    fn at_most(name: &'static str, bound: f64) -> Self {
        Property {
            name,
            bound,
            at_most: true,
            worst: f64::NEG_INFINITY,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn at_least(name: &'static str, bound: f64) -> Self {
        Property {
            name,
            bound,
            at_most: false,
            worst: f64::INFINITY,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, case: impl std::fmt::Display, value: f64) {
        self.checked += 1;
        let ok = if self.at_most { value <= self.bound } else { value >= self.bound };
        if self.at_most {
            self.worst = self.worst.max(value);
        } else {
            self.worst = self.worst.min(value);
        }
        if !ok {
            let side = if self.at_most { ">" } else { "<" };
            self.failures.push(format!("{case}: {value:e} {side} {:e}", self.bound));
        }
    }

    fn check(&mut self, case: impl std::fmt::Display, ok: bool, why: &str) {
        self.checked += 1;
        if !ok {
            self.failures.push(format!("{case}: {why}"));
        }
    }

    fn error(&mut self, case: impl std::fmt::Display, e: &Error) {
        self.checked += 1;
        self.failures.push(format!("{case}: {e}"));
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            name: self.name.to_string(),
            passed: self.failures.is_empty() && self.checked > 0,
            value: self.worst.is_finite().then_some(self.worst),
            bound: self.bound,
            comparison: if self.at_most { "<=" } else { ">=" }.into(),
            checked: self.checked,
            failures: self.failures,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, properties: Vec<Property>) -> Self {
        let properties: Vec<PropertyResult> = properties.into_iter().map(Property::finish).collect();
        SuiteReport {
            suite: suite.name().into(),
            seed,
            passed: properties.iter().all(|p| p.passed),
            properties,
        }
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

/// Failure manifest: one entry per failed case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
    pub failures: Vec<FailureEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub suite: String,
    pub property: String,
    pub case: String,
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> VerifyReport {
    run_timed(suite, opts).0
}

/// Also returns wall time per suite (kept out of the report so that the
/// report stays byte-identical between runs).
pub fn run_timed(suite: Suite, opts: &VerifyOptions) -> (VerifyReport, Vec<(Suite, Duration)>) {
    let list: Vec<Suite> = match suite {
        Suite::All => Suite::EACH.to_vec(),
        s => vec![s],
    };
    let mut suites = Vec::new();
    let mut times = Vec::new();
    for s in list {
        let start = Instant::now();
        suites.push(run_one(s, opts));
        times.push((s, start.elapsed()));
    }
    let failures = suites
        .iter()
        .flat_map(|s| {
            s.properties.iter().flat_map(move |p| {
                let cases: Vec<String> = if p.failures.is_empty() && !p.passed {
                    vec!["no cases checked".into()]
                } else {
                    p.failures.clone()
                };
                cases.into_iter().map(move |case| FailureEntry {
                    suite: s.suite.clone(),
                    property: p.name.clone(),
                    case,
                })
            })
        })
        .collect();
    (
        VerifyReport {
            seed: opts.seed,
            passed: suites.iter().all(|s| s.passed),
            suites,
            failures,
        },
        times,
    )
}

pub fn run_one(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    match suite {
        Suite::Identities => identities(opts),
        Suite::Metrics => metrics(opts),
        Suite::Bounds => bounds(opts),
        Suite::Curves => curves(opts),
        Suite::Welding => welding(opts),
        Suite::Atlas => atlas(opts),
        Suite::All => unreachable!("expanded by run_timed"),
    }
}

/// Ψ∘𝒜 = 𝒮, Ψ̂∘β̂ = β and χ⁻¹∘χ = id on the map corpus.
pub fn identities(opts: &VerifyOptions) -> SuiteReport {
    let maps = opts.corpus();
    let n = opts.truncation;
    let mut size = Property::at_least("corpus_size", 100.0);
    size.record("corpus", maps.len() as f64);
    let mut degree = Property::at_most("corpus_max_degree", 10.0);
    let mut schw = Property::at_most("psi_of_pre_schwarzian_equals_schwarzian", 1e-9);
    let mut bers = Property::at_most("psi_hat_of_beta_hat_equals_beta", 1e-9);
    let mut round = Property::at_most("chi_round_trip_relative_error", 1e-9);
    for (i, f) in maps.iter().enumerate() {
        let case = format!("map {i}");
        degree.record(&case, f.degree() as f64);
        if let Err(e) = f.require_nondegenerate() {
            for p in [&mut schw, &mut bers, &mut round] {
                p.error(format!("{case} (precondition)"), &e);
            }
            continue;
        }
        match pre_schwarzian(f).and_then(|a| Ok((a, schwarzian(f)?))) {
            Ok((a, s)) => schw.record(&case, psi(&a).max_coeff_diff(&s, n)),
            Err(e) => schw.error(&case, &e),
        }
        match beta_hat(f).and_then(|b| Ok((b, beta(f)?))) {
            Ok((bh, b)) => {
                let p = psi_hat(&bh);
                bers.record(&case, p.quad.max_coeff_diff(&b.quad, n).max((p.c - b.c).norm()));
            }
            Err(e) => bers.error(&case, &e),
        }
        match chi(f).and_then(|x| chi_inverse(&x, n.min(32))) {
            Ok(g) => {
                let scale = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
                round.record(&case, g.value.max_coeff_diff(f) / scale);
            }
            Err(e) => round.error(&case, &e),
        }
    }
    SuiteReport::new(Suite::Identities, opts.seed, vec![size, degree, schw, bers, round])
}

/// Koebe's `𝒜` and `𝒮` as exact rationals.
pub fn koebe_differentials(n: usize) -> (OneDifferential, QuadDifferential) {
    let den = Poly::from_real(&[1.0, 0.0, -1.0]);
    let a = OneDifferential::from_rational(Rational::new(Poly::from_real(&[4.0, 2.0]), den.clone()), n);
    let s = QuadDifferential::from_rational(Rational::new(Poly::from_real(&[-6.0]), &den * &den), n);
    (a, s)
}

fn curve_corpus(seed: u64, count: usize) -> Vec<Result<HolomorphicCurve>> {
    let mut rng = corpus::rng(seed ^ 0xC0_FFEE);
    (0..count)
        .map(|_| {
            let s = corpus::random_curve_seed(&mut rng, 0.25, 0.5);
            HolomorphicCurve::new(s.f0, OneDifferential::from_series(s.phi), s.q, s.k, 64)
        })
        .collect()
}

/// `w/(1 − w)`
pub fn geometric_left_map() -> Mobius {
    let one = C64::new(1.0, 0.0);
    Mobius::new(one, C64::new(0.0, 0.0), -one, one)
}

/// Sharp Koebe norms, the `‖𝒜‖ ≤ 6` bound over the corpus, and the
/// uniform estimates along random curves.
pub fn bounds(opts: &VerifyOptions) -> SuiteReport {
    let (ka, ks) = koebe_differentials(opts.truncation);
    let na = norm_a1(&ka, &opts.policy).value;
    let ns = norm_a2(&ks, &opts.policy).value;
    let mut koebe_a_upper = Property::at_most("koebe_pre_schwarzian_norm_upper", 6.0 + 1e-6);
    koebe_a_upper.record("koebe", na);
    let mut koebe_a_lower = Property::at_least("koebe_pre_schwarzian_norm_lower", 6.0 - 1e-3);
    koebe_a_lower.record("koebe", na);
    let mut koebe_s = Property::at_most("koebe_schwarzian_norm_deviation", 1e-3);
    koebe_s.record("koebe", (ns - 6.0).abs());

    let mut corpus_bound = Property::at_most("corpus_pre_schwarzian_norm", 6.0 + 1e-6);
    for (i, f) in opts.corpus().iter().enumerate() {
        match pre_schwarzian(f) {
            Ok(a) => corpus_bound.record(format!("map {i}"), norm_a1(&a, &opts.policy).value),
            Err(e) => corpus_bound.error(format!("map {i} (precondition)"), &e),
        }
    }

    let h = geometric_left_map();
    let mut schwarz = Property::at_most("schwarz_lemma_bound", 0.0);
    let mut cauchy = Property::at_most("cauchy_bound", 0.0);
    let mut fin = Property::at_most("second_derivative_uniform_bound", 0.0);
    for (i, c) in curve_corpus(opts.seed, 5).into_iter().enumerate() {
        let case = format!("curve {i}");
        match c.and_then(|c| uniform_bounds(&h, &c, 0.5 * c.t_domain())) {
            Ok(b) => {
                schwarz.record(&case, b.schwarz_lhs - b.m1);
                cauchy.record(&case, b.m2 - b.cauchy_rhs);
                fin.record(&case, b.final_lhs - b.final_rhs);
            }
            Err(e) => {
                for p in [&mut schwarz, &mut cauchy, &mut fin] {
                    p.error(&case, &e);
                }
            }
        }
    }
    SuiteReport::new(
        Suite::Bounds,
        opts.seed,
        vec![koebe_a_upper, koebe_a_lower, koebe_s, corpus_bound, schwarz, cauchy, fin],
    )
}

/// Symmetry and triangle inequality for `d_s, d_ps, d_o` on random triples,
/// and monotone boundary convergence along dilations `f(r z)/r`, `r ↑ 1`.
pub fn metrics(opts: &VerifyOptions) -> SuiteReport {
    let maps = opts.corpus();
    let mut rng = corpus::rng(opts.seed ^ 0x7E1A);
    let mut symmetry = Property::at_most("distance_symmetry_gap", 0.0);
    let mut triangle = Property::at_most("triangle_inequality_violation", 1e-9);
    let metrics: [(&str, fn(&DiskMap, &DiskMap, &RefinementPolicy) -> Result<Distance>); 3] =
        [("d_s", d_s), ("d_ps", d_ps), ("d_o", d_o)];
    for t in 0..200 {
        let idx: Vec<usize> = (0..3).map(|_| rng.random_range(0..maps.len())).collect();
        let (f, g, h) = (&maps[idx[0]], &maps[idx[1]], &maps[idx[2]]);
        for (name, d) in metrics {
            let case = format!("triple {t} {idx:?} {name}");
            let all = (|| -> Result<[f64; 4]> {
                Ok([
                    d(f, g, &opts.policy)?.value,
                    d(g, f, &opts.policy)?.value,
                    d(g, h, &opts.policy)?.value,
                    d(f, h, &opts.policy)?.value,
                ])
            })();
            match all {
                Ok([fg, gf, gh, fh]) => {
                    symmetry.record(&case, (fg - gf).abs());
                    triangle.record(&case, fh - fg - gh);
                }
                Err(e) => {
                    symmetry.error(&case, &e);
                    triangle.error(&case, &e);
                }
            }
        }
    }

    let mut distances_decrease = Property::at_most("dilation_distance_increase", 0.0);
    let mut boundary = Property::at_most("boundary_deviation_increase", 1e-8);
    for (i, f) in maps.iter().take(5).enumerate() {
        let case = format!("map {i}");
        let family: Vec<DiskMap> = (1..=8)
            .map(|k| {
                let r = 1.0 - 0.5f64.powi(k);
                let coeffs = f
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * r.powi(j as i32))
                    .collect();
                DiskMap::new(coeffs, CORPUS_RHO).expect("dilations keep rho")
            })
            .collect();
        let mut prev_d = f64::INFINITY;
        let mut prev_b = f64::INFINITY;
        for (k, fk) in family.iter().enumerate() {
            let dk = match d_o(fk, f, &opts.policy) {
                Ok(d) => d.value,
                Err(e) => {
                    distances_decrease.error(&case, &e);
                    break;
                }
            };
            let bk = (0..512)
                .map(|j| {
                    let t = TAU * j as f64 / 512.0;
                    (fk.boundary_point(t) - f.boundary_point(t)).norm()
                })
                .fold(0.0, f64::max);
            if k > 0 {
                distances_decrease.record(format!("{case} step {k}"), dk - prev_d);
                boundary.record(format!("{case} step {k}"), bk - prev_b);
            }
            prev_d = dk;
            prev_b = bk;
        }
    }
    SuiteReport::new(
        Suite::Metrics,
        opts.seed,
        vec![symmetry, triangle, distances_decrease, boundary],
    )
}

/// Curve identity on 20 random curves; Gâteaux slope, complex linearity and
/// the second-order bound for `h = w/(1 − w)` on the first 10.
pub fn curves(opts: &VerifyOptions) -> SuiteReport {
    let mut identity = Property::at_most("curve_identity_residual", 1e-10);
    let mut slope = Property::at_least("gateaux_loglog_slope", 0.9);
    let mut cr = Property::at_most("gateaux_cr_residual", 1e-6);
    let mut second = Property::at_most("second_order_bound_violations", 0.0);
    let mut rng = corpus::rng(opts.seed ^ 0x7);
    let h = geometric_left_map();
    let cfg = GateauxConfig {
        cr_step: opts.fd_step,
        policy: opts.policy,
        ..GateauxConfig::default()
    };
    for (i, c) in curve_corpus(opts.seed, 20).into_iter().enumerate() {
        let case = format!("curve {i}");
        let c = match c {
            Ok(c) => c,
            Err(e) => {
                identity.error(&case, &e);
                continue;
            }
        };
        let t = C64::from_polar(
            0.5 * c.t_domain() * rng.random_range(0.1..1.0),
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        let n = c.truncation() - 2;
        let res = (|| -> Result<f64> {
            let a0 = pre_schwarzian(c.f0())?;
            let at = pre_schwarzian(&curve_at(&c, t)?)?;
            let rhs = &a0.rational().series(n) + &c.phi().rational().series(n).scale(t);
            Ok(at.rational().series(n).max_coeff_diff(&rhs, n))
        })();
        match res {
            Ok(r) => identity.record(format!("{case} t={t:.4}"), r),
            Err(e) => identity.error(&case, &e),
        }
        if i >= 10 {
            continue;
        }
        match gateaux_check(&h, &c, &cfg) {
            Ok(rep) => {
                slope.record(&case, if rep.exact { f64::INFINITY } else { rep.slope.unwrap_or(f64::NAN) });
                cr.record(&case, rep.cr_residual);
                let bad = rep.rows.iter().filter(|r| !r.bound_holds).count();
                second.record(&case, bad as f64);
            }
            Err(e) => {
                for p in [&mut slope, &mut cr, &mut second] {
                    p.error(&case, &e);
                }
            }
        }
    }
    SuiteReport::new(Suite::Curves, opts.seed, vec![identity, slope, cr, second])
}

/// 20 random circle maps (ℓ¹ mass 0.05, 16 modes) × m ∈ {−½, 0, ½}.
pub fn welding(opts: &VerifyOptions) -> SuiteReport {
    let mut newton = Property::at_most("newton_iterations", 8.0);
    let mut seam = Property::at_most("seam_residual_sup", 1e-6);
    let mut angle = Property::at_most("round_trip_angle_error", 1e-4);
    let mut m_err = Property::at_most("round_trip_m_error", 1e-6);
    let mut scale = Property::at_most("scale_equivariance_error", 1e-10);
    let mut unique = Property::at_most("uniqueness_probe_difference", 1e-8);
    let mut rng = corpus::rng(opts.seed ^ 0x3E1D);
    let cfg = WeldConfig {
        tol: opts.newton_tol,
        ..WeldConfig::default()
    };
    let ucfg = UnweldConfig::default();
    for i in 0..20 {
        let gamma = random_circle_map(&mut rng, 16, 0.05, 0.5);
        let mut at_zero = None;
        for m in [-0.5, 0.0, 0.5] {
            let case = format!("gamma {i} m={m}");
            let pair = match weld(&gamma, m, &cfg) {
                Ok(p) => p,
                Err(e) => {
                    newton.error(&case, &e);
                    continue;
                }
            };
            newton.record(&case, pair.iterations as f64);
            seam.record(&case, verify_welding(&pair, &gamma, 256).sup);
            match unweld(&pair.f, &ucfg) {
                Ok(u) => {
                    angle.record(&case, u.gamma.angle_distance(&gamma, 1024));
                    m_err.record(&case, (u.m - m).abs());
                }
                Err(e) => {
                    angle.error(&case, &e);
                    m_err.error(&case, &e);
                }
            }
            if m == 0.0 {
                at_zero = Some(pair);
            } else if let Some(p0) = &at_zero {
                let s = C64::new(m.exp(), 0.0);
                scale.record(&case, pair.f.max_coeff_diff(&p0.f.scaled(s)) / m.exp());
            }
        }
        if i < 3 {
            let case = format!("gamma {i}");
            let start: Vec<C64> = (0..2 * cfg.terms + 1)
                .map(|_| C64::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)))
                .collect();
            match (weld(&gamma, 0.0, &cfg), weld_from(&gamma, 0.0, &cfg, Some(start))) {
                (Ok(a), Ok(b)) => unique.record(&case, a.f.max_coeff_diff(&b.f)),
                (Err(e), _) | (_, Err(e)) => unique.error(&case, &e),
            }
        }
    }
    SuiteReport::new(Suite::Welding, opts.seed, vec![newton, seam, angle, m_err, scale, unique])
}

fn random_reparametrization(rng: &mut rand_chacha::ChaCha8Rng) -> Mobius {
    let a = C64::from_polar(rng.random_range(0.8..1.2), rng.random_range(-3.0..3.0));
    let b = C64::from_polar(rng.random_range(0.0..0.3), rng.random_range(-3.0..3.0));
    Mobius::new(a, C64::new(0.0, 0.0), b, C64::new(1.0, 0.0))
}

/// Chart transitions (cocycle, inverse, holomorphy) and non-overlap.
pub fn atlas(opts: &VerifyOptions) -> SuiteReport {
    let mut cocycle = Property::at_most("transition_cocycle_error", 1e-8);
    let mut inverse = Property::at_most("transition_inverse_error", 1e-8);
    let mut holo = Property::at_most("transition_cr_residual", 1e-6);
    let mut tangent = Property::at_most("tangent_family_misclassified", 0.0);
    let mut relabel = Property::at_most("nonoverlap_relabeling_mismatch", 0.0);
    let mut rng = corpus::rng(opts.seed ^ 0xA71A5);
    let k = ClosedDisk::centered(0.9);

    let config = make_config(vec![
        SpherePoint::Finite(C64::new(0.0, 0.0)),
        SpherePoint::Finite(C64::new(1.0, 0.0)),
        SpherePoint::Infinity,
    ]);
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            cocycle.error("config", &e);
            return SuiteReport::new(Suite::Atlas, opts.seed, vec![cocycle]);
        }
    };
    for t in 0..10 {
        let case = format!("trial {t}");
        let res = (|| -> Result<(f64, f64)> {
            let c1 = default_chart(&config, t % 3)?;
            let c2 = c1.reparametrized(&random_reparametrization(&mut rng), k)?;
            let c3 = c1.reparametrized(&random_reparametrization(&mut rng), k)?;
            let a1 = C64::from_polar(rng.random_range(0.2..0.35), rng.random_range(-3.0..3.0));
            let degree = rng.random_range(2..=6);
            let psi = corpus::random_map(&mut rng, degree, a1, 1.5, 0.5);
            let direct = transition(&c1, &c3, &psi)?;
            let via = transition(&c2, &c3, &transition(&c1, &c2, &psi)?)?;
            let back = transition(&c2, &c1, &transition(&c1, &c2, &psi)?)?;
            Ok((direct.max_coeff_diff(&via), back.max_coeff_diff(&psi)))
        })();
        match res {
            Ok((a, b)) => {
                cocycle.record(&case, a);
                inverse.record(&case, b);
            }
            Err(e) => {
                cocycle.error(&case, &e);
                inverse.error(&case, &e);
            }
        }
    }

    let dirs = [
        ChiDirection {
            phi: Poly::one(),
            c: C64::new(0.0, 0.0),
        },
        ChiDirection {
            phi: Poly::from_real(&[0.0, 1.0]),
            c: C64::new(0.0, 0.0),
        },
        ChiDirection {
            phi: Poly::zero(),
            c: C64::new(0.05, 0.02),
        },
    ];
    let holo_case = |chart: &LocalChart, chart2: &LocalChart, psi: &DiskMap| {
        transition_holomorphy_check(chart, chart2, psi, &dirs, opts.fd_step).map(|r| r.cr_residual)
    };
    let base = LocalChart::custom(
        0,
        SpherePoint::Finite(C64::new(0.0, 0.0)),
        Mobius::identity(),
        ClosedDisk::centered(0.6),
    );
    match base.and_then(|b| Ok((b.reparametrized(&geometric_left_map(), ClosedDisk::centered(0.9))?, b))) {
        Ok((h, b)) => {
            match holo_case(&b, &h, &DiskMap::linear(C64::new(0.2, 0.0))) {
                Ok(r) => holo.record("w/(1-w), psi = 0.2z", r),
                Err(e) => holo.error("w/(1-w), psi = 0.2z", &e),
            }
            for t in 0..3 {
                let a1 = C64::from_polar(rng.random_range(0.1..0.25), rng.random_range(-3.0..3.0));
                let psi = corpus::random_map(&mut rng, 4, a1, 1.5, 0.4);
                match holo_case(&b, &h, &psi) {
                    Ok(r) => holo.record(format!("random psi {t}"), r),
                    Err(e) => holo.error(format!("random psi {t}"), &e),
                }
            }
        }
        Err(e) => holo.error("charts", &e),
    }

    for (eps, expect) in [(1e-3, Verdict::Pass), (-1e-3, Verdict::Fail)] {
        let case = format!("eps={eps}");
        match tangent_disk_family(eps).and_then(|t| check_nonoverlap(&t, 512)) {
            Ok(r) => tangent.record(&case, if r.verdict == expect { 0.0 } else { 1.0 }),
            Err(e) => tangent.error(&case, &e),
        }
    }

    let tuple = default_atlas(&config).and_then(|atlas| {
        let maps = (0..3)
            .map(|_| {
                let a1 = C64::from_polar(rng.random_range(0.4..0.8), rng.random_range(-3.0..3.0));
                corpus::random_map(&mut rng, 3, a1, 1.5, 0.2)
            })
            .collect();
        NonOverlappingTuple::new(atlas, maps)
    });
    match tuple {
        Ok(t) => {
            let verdicts = |t: &NonOverlappingTuple| check_nonoverlap(t, 256).map(|r| r.verdict);
            match verdicts(&t) {
                Ok(v0) => {
                    relabel.check("identity order", v0 == Verdict::Pass, "disjoint default-atlas tuple not accepted");
                    for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
                        let case = format!("permutation {perm:?}");
                        match t.permuted(&perm).and_then(|p| verdicts(&p)) {
                            Ok(v) => relabel.record(&case, if v == v0 { 0.0 } else { 1.0 }),
                            Err(e) => relabel.error(&case, &e),
                        }
                    }
                }
                Err(e) => relabel.error("identity order", &e),
            }
        }
        Err(e) => relabel.error("tuple", &e),
    }

    SuiteReport::new(Suite::Atlas, opts.seed, vec![cocycle, inverse, holo, tangent, relabel])
}
