//! Dense complex polynomials and truncated power series.
//!
//! A [`Poly`] stores coefficients from the constant term upwards. The same
//! type doubles as a truncated power series; the `*_series` and `*_trunc`
//! methods take an explicit highest degree `n` and discard everything above it.
//! [`Rational`] is a quotient of two polynomials with a nonvanishing
//! denominator at the origin, i.e. a function holomorphic near `0`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex_serde;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    #[serde(with = "complex_serde::vec")]
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// `c * z^k`
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero past the stored length.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Number of stored coefficients (not trimmed).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree after ignoring exact trailing zeros; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn trimmed(mut self) -> Self {
        let len = self.degree().map_or(0, |d| d + 1);
        self.coeffs.truncate(len);
        self
    }

    /// Keeps degrees `0..=n`.
    pub fn truncate(&self, n: usize) -> Self {
        let mut coeffs: Vec<C64> = self.coeffs.iter().take(n + 1).copied().collect();
        coeffs.resize(n + 1, ZERO);
        Poly { coeffs }
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Poly { coeffs }
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative vanishing at the origin.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k + 1) as f64),
        );
        Poly { coeffs }
    }

    pub fn scale(&self, s: C64) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Product keeping degrees `0..=n`.
    pub fn mul_trunc(&self, other: &Poly, n: usize) -> Self {
        let mut out = vec![ZERO; n + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a == ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Poly { coeffs: out }
    }

    /// Series coefficients `0..=n` of `self / den`; requires `den(0) != 0`.
    pub fn div_series(&self, den: &Poly, n: usize) -> Self {
        let d0 = den.coeff(0);
        assert!(d0 != ZERO, "series division by a polynomial vanishing at 0");
        let inv = ONE / d0;
        let mut q = vec![ZERO; n + 1];
        for k in 0..=n {
            let mut acc = self.coeff(k);
            let lo = k.saturating_sub(den.len().saturating_sub(1));
            for (j, qj) in q.iter().enumerate().take(k).skip(lo) {
                acc -= *qj * den.coeff(k - j);
            }
            q[k] = acc * inv;
        }
        Poly { coeffs: q }
    }

    /// Series of `exp(self)` to degree `n`.
    pub fn exp_series(&self, n: usize) -> Self {
        let c0 = self.coeff(0).exp();
        let mut e = vec![ZERO; n + 1];
        e[0] = ONE;
        for k in 1..=n {
            let mut acc = ZERO;
            for j in 1..=k.min(self.len().saturating_sub(1)) {
                acc += self.coeff(j) * e[k - j] * j as f64;
            }
            e[k] = acc / k as f64;
        }
        Poly { coeffs: e }.scale(c0)
    }

    /// Formal composition `self ∘ inner` to degree `n`. Exact on the
    /// retained degrees when `inner(0) = 0`.
    pub fn compose_series(&self, inner: &Poly, n: usize) -> Self {
        let mut acc = Poly::zero().truncate(n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_trunc(inner, n);
            acc.coeffs[0] += c;
        }
        acc
    }

    pub fn sup_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Maximum coefficient difference over degrees `0..=n`.
    pub fn max_coeff_diff(&self, other: &Poly, n: usize) -> f64 {
        (0..=n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// All complex roots (Aberth–Ehrlich iteration).
    pub fn roots(&self) -> Vec<C64> {
        let p = self.clone().trimmed();
        let deg = match p.degree() {
            Some(d) if d > 0 => d,
            _ => return Vec::new(),
        };
        let lead = p.coeff(deg);
        let monic = p.scale(ONE / lead);
        // Cauchy bound for the initial circle.
        let bound = 1.0
            + (0..deg)
                .map(|k| monic.coeff(k).norm())
                .fold(0.0, f64::max);
        let mut z: Vec<C64> = (0..deg)
            .map(|k| {
                let angle = std::f64::consts::TAU * (k as f64 + 0.25) / deg as f64 + 0.4;
                C64::from_polar(0.5 * bound, angle)
            })
            .collect();
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..deg {
                let (v, dv) = monic.eval_with_derivative(z[i]);
                if v == ZERO {
                    continue;
                }
                let ratio = v / dv;
                let repulsion: C64 = (0..deg)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let d = z[i] - z[j];
                        if d == ZERO {
                            ZERO
                        } else {
                            ONE / d
                        }
                    })
                    .sum();
                let step = ratio / (ONE - ratio * repulsion);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        z
    }

    /// Rough radius of convergence from the coefficient decay: fits the
    /// geometric rate `|c_k| ~ R^{-k}` over the upper half of the stored
    /// degrees that sit above `noise`. Returns `f64::INFINITY` when the tail
    /// is pure noise.
    pub fn convergence_radius_estimate(&self, noise: f64) -> f64 {
        let scale = self.sup_coeff().max(f64::MIN_POSITIVE);
        let pts: Vec<(f64, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(self.len() / 2)
            .filter(|(k, c)| *k > 0 && c.norm() > noise * scale)
            .map(|(k, c)| (k as f64, (c.norm() / scale).ln()))
            .collect();
        if pts.len() < 3 {
            return f64::INFINITY;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        if slope >= 0.0 {
            1.0
        } else {
            (-slope).exp()
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-ONE)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_empty() || rhs.is_empty() {
            return Poly::zero();
        }
        self.mul_trunc(rhs, self.len() + rhs.len() - 2)
    }
}

/// `num / den` with `den(0) != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub num: Poly,
    pub den: Poly,
}

impl Rational {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(
            den.coeff(0) != ZERO,
            "rational function must be holomorphic at the origin"
        );
        Rational { num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        Rational {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn constant(c: C64) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree().unwrap_or(0) == 0
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Taylor coefficients at `0` up to degree `n`.
    pub fn series(&self, n: usize) -> Poly {
        self.num.div_series(&self.den, n)
    }

    pub fn value_at_zero(&self) -> C64 {
        self.num.coeff(0) / self.den.coeff(0)
    }

    pub fn derivative(&self) -> Self {
        if self.is_polynomial() {
            let d0 = self.den.coeff(0);
            return Rational::from_poly(self.num.derivative().scale(ONE / d0));
        }
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Rational::new(num, &self.den * &self.den)
    }

    pub fn scale(&self, s: C64) -> Self {
        Rational {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Rational) -> Self {
        if self.den == other.den {
            return Rational::new(&self.num + &other.num, self.den.clone());
        }
        Rational::new(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }

    pub fn sub(&self, other: &Rational) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &Rational) -> Self {
        Rational::new(&self.num * &other.num, &self.den * &other.den)
    }

    /// Smallest modulus of a denominator root, `INFINITY` for polynomials.
    pub fn pole_radius(&self) -> f64 {
        if self.is_polynomial() {
            return f64::INFINITY;
        }
        self.den
            .roots()
            .into_iter()
            .map(|r| r.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn derivative_shifts_coefficients() {
        let p = Poly::from_real(&[0.0, 1.0, 0.2]);
        assert_eq!(p.derivative(), Poly::from_real(&[1.0, 0.4]));
        assert!(Poly::from_real(&[0.0, 1.0]).nth_derivative(2).is_zero());
    }

    #[test]
    fn geometric_series_division() {
        let one = Poly::one();
        let den = Poly::from_real(&[1.0, -0.5]);
        let q = one.div_series(&den, 10);
        for k in 0..=10 {
            assert!((q.coeff(k) - c(0.5f64.powi(k as i32), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn exp_series_matches_factorials() {
        let p = Poly::from_real(&[0.0, 2.0]);
        let e = p.exp_series(12);
        let mut fact = 1.0;
        for k in 0..=12 {
            if k > 0 {
                fact *= k as f64;
            }
            let expected = 2f64.powi(k as i32) / fact;
            assert!((e.coeff(k).re - expected).abs() < 1e-14 * expected.max(1.0));
        }
    }

    #[test]
    fn roots_of_quadratic() {
        // (z - 1)(z + 2i)
        let p = &Poly::new(vec![c(-1.0, 0.0), ONE]) * &Poly::new(vec![c(0.0, 2.0), ONE]);
        let mut roots = p.roots();
        roots.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((roots[0] - c(0.0, -2.0)).norm() < 1e-12);
        assert!((roots[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn compose_series_with_geometric_inner() {
        // (w + w^2) ∘ (z/(1-z)) truncated.
        let outer = Poly::from_real(&[0.0, 1.0, 1.0]);
        let inner = Poly::from_real(&[0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let got = outer.compose_series(&inner, 6);
        // z/(1-z) + z^2/(1-z)^2 has coefficients k-th: 1 + (k-1) = k.
        for k in 1..=6 {
            assert!((got.coeff(k).re - k as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn rational_derivative_and_series() {
        // 1/(1-z): derivative 1/(1-z)^2 has coefficients k+1.
        let r = Rational::new(Poly::one(), Poly::from_real(&[1.0, -1.0]));
        let s = r.derivative().series(8);
        for k in 0..=8 {
            assert!((s.coeff(k).re - (k + 1) as f64).abs() < 1e-13);
        }
        assert!((r.pole_radius() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convergence_radius_from_decay() {
        let p = Poly::new((0..64).map(|k| c(0.8f64.powi(k), 0.0)).collect());
        assert!((p.convergence_radius_estimate(1e-14) - 1.25).abs() < 1e-9);
        assert!(Poly::from_real(&[0.0, 1.0]).convergence_radius_estimate(1e-14).is_infinite());
    }
}
