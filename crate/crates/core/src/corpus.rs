//! Seeded random test objects.
//!
//! Polynomial maps are made univalent on `|z| < ρ` by scaling the higher
//! coefficients so that `Σ_{k≥2} k|a_k|ρ^{k−1} ≤ s|a_1|` with `s < 1`. Then
//! `|f'(z)/a_1 − 1| < 1` on that disk, so `Re(f'/a_1) > 0` and `f` is
//! univalent there (Noshiro–Warschawski).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::disk_map::{ClosedDisk, DiskMap};
use crate::poly::{Poly, C64};

/// Radius on which every corpus map is univalent.
pub const CORPUS_RHO: f64 = 1.2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// A polynomial map of the given degree with `f'(0) = a1`, univalent on
/// `|z| < rho` with derivative contraction `s ∈ (0, 1)`.
pub fn random_map(rng: &mut ChaCha8Rng, degree: usize, a1: C64, rho: f64, s: f64) -> DiskMap {
    let raw: Vec<C64> = (2..=degree).map(|_| unit_complex(rng)).collect();
    let weight: f64 = raw
        .iter()
        .enumerate()
        .map(|(j, a)| (j + 2) as f64 * a.norm() * rho.powi(j as i32 + 1))
        .sum();
    let factor = if weight > 0.0 { s * a1.norm() / weight } else { 0.0 };
    let mut coeffs = vec![a1];
    coeffs.extend(raw.iter().map(|a| a * factor));
    DiskMap::new(coeffs, rho).expect("rho > 1")
}

/// `count` maps of degree `2..=max_degree`, univalent on `|z| < 1.2`, with
/// `|f'(0)| ∈ [0.5, 2]` and arbitrary rotation.
pub fn univalent_corpus(seed: u64, count: usize, max_degree: usize) -> Vec<DiskMap> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let degree = rng.random_range(2..=max_degree.max(2));
            let a1 = C64::from_polar(
                rng.random_range(0.5..2.0),
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            );
            let s = rng.random_range(0.1..0.9);
            random_map(&mut rng, degree, a1, CORPUS_RHO, s)
        })
        .collect()
}

/// Ingredients of a random holomorphic curve: a base map whose image stays
/// in `|w| ≤ scale·(1 + s)`, a direction `φ` of degree ≤ 3, and a `q(t)`
/// of degree ≤ 2 with `q(0) = f_0'(0)`.
pub struct CurveSeed {
    pub f0: DiskMap,
    pub phi: Poly,
    pub q: Poly,
    pub k: ClosedDisk,
}

pub fn random_curve_seed(rng: &mut ChaCha8Rng, scale: f64, k_radius: f64) -> CurveSeed {
    let degree = rng.random_range(2..=6);
    let a1 = C64::from_polar(scale, rng.random_range(-3.1..3.1));
    let s = rng.random_range(0.1..0.6);
    let f0 = random_map(rng, degree, a1, CORPUS_RHO, s);
    let phi_deg = rng.random_range(0..=3);
    let phi = Poly::new((0..=phi_deg).map(|_| unit_complex(rng)).collect());
    let q = Poly::new(vec![a1, 0.1 * scale * unit_complex(rng), 0.05 * scale * unit_complex(rng)]);
    CurveSeed {
        f0,
        phi,
        q,
        k: ClosedDisk::centered(k_radius),
    }
}
