//! Pre-Schwarzian and Schwarzian derivatives and the maps built from them.
//!
//! For polynomial `f`, `𝒜(f) = f''/f'` and `𝒮(f)` are rational, so they are
//! carried as exact [`Rational`] functions and expanded into series only on
//! demand. This matters for norms: the weighted sup of `𝒜(Koebe)` is only
//! approached at the boundary, where a truncated series is useless.

use serde::{Deserialize, Serialize};

use crate::complex_serde;
use crate::disk_map::{DiskMap, Truncated, DEFAULT_TRUNCATION, RHO_CAP};
use crate::error::{Error, Result};
use crate::poly::{Poly, Rational, C64};

const DEGENERATE_A1: f64 = 1e-12;

macro_rules! differential {
    ($name:ident, $wire:ident, $wire_str:literal, $tag:literal) => {
        /// A holomorphic function on the disk, stored exactly as a rational
        /// function together with the series truncation used for output.
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(into = $wire_str, try_from = $wire_str)]
        pub struct $name {
            func: Rational,
            truncation: usize,
            norm: Option<f64>,
        }

        #[derive(Serialize, Deserialize)]
        #[serde(tag = "kind", rename = $tag)]
        struct $wire {
            coeffs: Poly,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            rational: Option<Rational>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            norm: Option<f64>,
        }

        impl From<$name> for $wire {
            fn from(d: $name) -> Self {
                $wire {
                    coeffs: d.coeffs(),
                    rational: (!d.func.is_polynomial()).then_some(d.func),
                    norm: d.norm,
                }
            }
        }

        impl TryFrom<$wire> for $name {
            type Error = Error;
            fn try_from(w: $wire) -> Result<Self> {
                if w.coeffs.coeffs().iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite coefficient".into()));
                }
                let truncation = w.coeffs.len().saturating_sub(1);
                let func = match w.rational {
                    Some(r) if r.den.coeff(0) == C64::new(0.0, 0.0) => {
                        return Err(Error::InvalidArgument(
                            "rational denominator vanishes at the origin".into(),
                        ))
                    }
                    Some(r) => r,
                    None => Rational::from_poly(w.coeffs),
                };
                Ok($name {
                    func,
                    truncation,
                    norm: w.norm,
                })
            }
        }

        impl $name {
            pub fn from_series(p: Poly) -> Self {
                let truncation = p.len().saturating_sub(1);
                $name {
                    func: Rational::from_poly(p),
                    truncation,
                    norm: None,
                }
            }

            pub fn from_rational(func: Rational, truncation: usize) -> Self {
                $name {
                    func,
                    truncation,
                    norm: None,
                }
            }

            pub fn zero() -> Self {
                Self::from_series(Poly::zero())
            }

            pub fn constant(c: C64) -> Self {
                Self::from_series(Poly::constant(c))
            }

            pub fn rational(&self) -> &Rational {
                &self.func
            }

            pub fn truncation(&self) -> usize {
                self.truncation
            }

            /// Taylor coefficients `0..=N`.
            pub fn coeffs(&self) -> Poly {
                self.func.series(self.truncation)
            }

            pub fn coeff(&self, k: usize) -> C64 {
                self.func.series(k).coeff(k)
            }

            pub fn eval(&self, z: C64) -> C64 {
                self.func.eval(z)
            }

            pub fn value_at_zero(&self) -> C64 {
                self.func.value_at_zero()
            }

            pub fn cached_norm(&self) -> Option<f64> {
                self.norm
            }

            pub(crate) fn set_norm(mut self, value: f64) -> Self {
                self.norm = Some(value);
                self
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self::from_rational(
                    self.func.sub(&other.func),
                    self.truncation.max(other.truncation),
                )
            }

            pub fn add(&self, other: &Self) -> Self {
                Self::from_rational(
                    self.func.add(&other.func),
                    self.truncation.max(other.truncation),
                )
            }

            pub fn scale(&self, s: C64) -> Self {
                Self::from_rational(self.func.scale(s), self.truncation)
            }

            /// Largest coefficient difference over degrees `0..=n`.
            pub fn max_coeff_diff(&self, other: &Self, n: usize) -> f64 {
                self.func.series(n).max_coeff_diff(&other.func.series(n), n)
            }
        }
    };
}

differential!(OneDifferential, OneDifferentialWire, "OneDifferentialWire", "one_differential");
differential!(QuadDifferential, QuadDifferentialWire, "QuadDifferentialWire", "quad_differential");

/// A point of `A²_∞ ⊕ ℂ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "bers_point")]
pub struct BersPoint {
    pub quad: QuadDifferential,
    #[serde(with = "complex_serde::single")]
    pub c: C64,
}

/// A point of `A¹_∞ ⊕ ℂ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename = "chi_point")]
pub struct ChiPoint {
    pub one: OneDifferential,
    #[serde(with = "complex_serde::single")]
    pub c: C64,
}

fn truncation_for(f: &DiskMap) -> usize {
    DEFAULT_TRUNCATION.max(f.degree())
}

fn first_derivative(f: &DiskMap) -> Result<Poly> {
    f.require_nondegenerate()?;
    let df = f.derivative(1);
    if df.coeff(0).norm() <= DEGENERATE_A1 {
        return Err(Error::DegenerateDerivative(df.coeff(0).norm()));
    }
    Ok(df)
}

/// `𝒜(f) = f''/f'`
pub fn pre_schwarzian(f: &DiskMap) -> Result<OneDifferential> {
    let df = first_derivative(f)?;
    let func = Rational::new(df.derivative(), df);
    Ok(OneDifferential::from_rational(func, truncation_for(f)))
}

/// `𝒮(f) = f'''/f' − (3/2)(f''/f')²`, as `(f'''f' − (3/2)f''²)/f'²`.
pub fn schwarzian(f: &DiskMap) -> Result<QuadDifferential> {
    let d1 = first_derivative(f)?;
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let num = &(&d3 * &d1) - &(&d2 * &d2).scale(C64::new(1.5, 0.0));
    let func = Rational::new(num, &d1 * &d1);
    Ok(QuadDifferential::from_rational(func, truncation_for(f)))
}

/// `Ψ(g) = g' − g²/2`
pub fn psi(g: &OneDifferential) -> QuadDifferential {
    let r = g.rational();
    let func = r.derivative().sub(&r.mul(r).scale(C64::new(0.5, 0.0)));
    QuadDifferential::from_rational(func, g.truncation())
}

/// `Ψ̂(g) = (Ψ(g), ½ g(0))`
pub fn psi_hat(g: &OneDifferential) -> BersPoint {
    BersPoint {
        quad: psi(g),
        c: 0.5 * g.value_at_zero(),
    }
}

/// `β(f) = (𝒮(f), ½ 𝒜(f)(0))`; the second entry is `a_2/a_1`.
pub fn beta(f: &DiskMap) -> Result<BersPoint> {
    let a = pre_schwarzian(f)?;
    Ok(BersPoint {
        quad: schwarzian(f)?,
        c: 0.5 * a.value_at_zero(),
    })
}

/// `β̂(f) = 𝒜(f)`
pub fn beta_hat(f: &DiskMap) -> Result<OneDifferential> {
    pre_schwarzian(f)
}

/// `χ(f) = (𝒜(f), f'(0))`
pub fn chi(f: &DiskMap) -> Result<ChiPoint> {
    Ok(ChiPoint {
        one: pre_schwarzian(f)?,
        c: f.a1(),
    })
}

/// Inverse of [`chi`]: `f(z) = c ∫_0^z exp(∫_0^u φ) du`, truncated at
/// degree `n`. The reported tail is `Σ_{n<k≤2n} |a_k|`.
///
/// The radius attached to the result is where the formula is analytic
/// (the nearest pole of `φ`, or the coefficient decay rate), capped at 2.
/// It is not a univalence certificate.
pub fn chi_inverse(p: &ChiPoint, n: usize) -> Result<Truncated<DiskMap>> {
    if p.c.norm() <= DEGENERATE_A1 {
        return Err(Error::DegenerateDerivative(p.c.norm()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("truncation degree must be positive".into()));
    }
    let wide = integrate_exp(&p.one.rational().series(2 * n), 2 * n).scale(p.c);
    let tail = (n + 1..=2 * n).map(|k| wide.coeff(k).norm()).sum();
    let series = wide.truncate(n);

    let pole = p.one.rational().pole_radius();
    let decay = wide.convergence_radius_estimate(1e-13);
    let rho = pole.min(decay).min(RHO_CAP);
    if rho <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "differential is not analytic past the closed disk (radius {rho:.6})"
        )));
    }
    let mut warnings = Vec::new();
    if tail > 1e-8 * p.c.norm() {
        warnings.push(format!("truncation tail {tail:e} is not negligible"));
    }
    Ok(Truncated {
        value: DiskMap::from_poly(&series, rho)?,
        tail,
        warnings,
    })
}

/// `∫_0^z exp(∫_0^u φ) du` to degree `n`.
fn integrate_exp(phi: &Poly, n: usize) -> Poly {
    phi.integral().truncate(n).exp_series(n).integral().truncate(n)
}

/// `f / f'(0)`
pub fn normalize(f: &DiskMap) -> Result<DiskMap> {
    f.require_nondegenerate()?;
    Ok(f.scaled(C64::new(1.0, 0.0) / f.a1()))
}
