//! Holomorphic maps `h` applied on the left of disk maps.

use serde::{Deserialize, Serialize};

use crate::complex_serde;
use crate::poly::{Poly, C64};

/// Values `h, h', h'', h''', h''''` at a point.
pub type Jet = [C64; 5];

/// A holomorphic function on a region `A ⊂ ℂ`.
pub trait Analytic {
    fn jet(&self, w: C64) -> Jet;

    fn eval(&self, w: C64) -> C64 {
        self.jet(w)[0]
    }

    /// Points where `h` is singular or fails to be locally injective.
    /// A region avoiding all of them is where `h` is usable on the left.
    fn exceptional_points(&self) -> Vec<C64> {
        Vec::new()
    }

    /// Exact formal composition `h ∘ f` to degree `n`, when `h` allows one.
    fn compose_exact(&self, _f: &Poly, _n: usize) -> Option<Poly> {
        None
    }
}

/// `(a w + b) / (c w + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    #[serde(with = "complex_serde::single")]
    pub a: C64,
    #[serde(with = "complex_serde::single")]
    pub b: C64,
    #[serde(with = "complex_serde::single")]
    pub c: C64,
    #[serde(with = "complex_serde::single")]
    pub d: C64,
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mobius { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::affine(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    /// `s w + t`
    pub fn affine(s: C64, t: C64) -> Self {
        Mobius::new(s, t, C64::new(0.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn determinant(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_affine(&self) -> bool {
        self.c == C64::new(0.0, 0.0)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    pub fn inverse(&self) -> Mobius {
        Mobius::new(self.d, -self.b, -self.c, self.a)
    }

    /// Finite pole, if any.
    pub fn pole(&self) -> Option<C64> {
        if self.is_affine() {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    /// Image of `∞` (`None` when it is `∞` itself).
    pub fn value_at_infinity(&self) -> Option<C64> {
        if self.is_affine() {
            None
        } else {
            Some(self.a / self.c)
        }
    }

    /// Evaluation on the finite plane; `None` at the pole.
    pub fn apply(&self, w: C64) -> Option<C64> {
        let den = self.c * w + self.d;
        if den.norm() == 0.0 {
            None
        } else {
            Some((self.a * w + self.b) / den)
        }
    }
}

impl Analytic for Mobius {
    fn jet(&self, w: C64) -> Jet {
        let u = self.c * w + self.d;
        let det = self.determinant();
        let inv = C64::new(1.0, 0.0) / u;
        let mut jet = [C64::new(0.0, 0.0); 5];
        jet[0] = (self.a * w + self.b) * inv;
        // h^(k) = det (-c)^{k-1} k! / u^{k+1}
        let mut factor = det * inv * inv;
        for (k, slot) in jet.iter_mut().enumerate().skip(1) {
            *slot = factor;
            factor *= -self.c * inv * (k as f64 + 1.0);
        }
        jet
    }

    fn exceptional_points(&self) -> Vec<C64> {
        self.pole().into_iter().collect()
    }

    fn compose_exact(&self, f: &Poly, n: usize) -> Option<Poly> {
        let num = &f.scale(self.a) + &Poly::constant(self.b);
        let den = &f.scale(self.c) + &Poly::constant(self.d);
        if den.coeff(0).norm() == 0.0 {
            return None;
        }
        Some(num.div_series(&den, n))
    }
}

/// Polynomial map `h(w) = Σ c_k w^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialMap {
    pub coeffs: Poly,
}

impl PolynomialMap {
    pub fn new(coeffs: Poly) -> Self {
        PolynomialMap { coeffs }
    }
}

impl Analytic for PolynomialMap {
    fn jet(&self, w: C64) -> Jet {
        let mut jet = [C64::new(0.0, 0.0); 5];
        let mut p = self.coeffs.clone();
        for slot in jet.iter_mut() {
            *slot = p.eval(w);
            p = p.derivative();
        }
        jet
    }

    fn exceptional_points(&self) -> Vec<C64> {
        self.coeffs.derivative().roots()
    }

    fn compose_exact(&self, f: &Poly, n: usize) -> Option<Poly> {
        Some(self.coeffs.compose_series(f, n))
    }
}

/// Serializable left map, as read from `--h` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticMap {
    Mobius(Mobius),
    Polynomial(PolynomialMap),
}

impl AnalyticMap {
    pub fn identity() -> Self {
        AnalyticMap::Mobius(Mobius::identity())
    }
}

impl Analytic for AnalyticMap {
    fn jet(&self, w: C64) -> Jet {
        match self {
            AnalyticMap::Mobius(m) => m.jet(w),
            AnalyticMap::Polynomial(p) => p.jet(w),
        }
    }

    fn exceptional_points(&self) -> Vec<C64> {
        match self {
            AnalyticMap::Mobius(m) => m.exceptional_points(),
            AnalyticMap::Polynomial(p) => p.exceptional_points(),
        }
    }

    fn compose_exact(&self, f: &Poly, n: usize) -> Option<Poly> {
        match self {
            AnalyticMap::Mobius(m) => m.compose_exact(f, n),
            AnalyticMap::Polynomial(p) => p.compose_exact(f, n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_jet_matches_closed_form() {
        // w/(1-w): h^(k) = k!/(1-w)^{k+1}
        let h = Mobius::new(
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(1.0, 0.0),
        );
        let w = C64::new(0.2, 0.1);
        let jet = h.jet(w);
        let u = C64::new(1.0, 0.0) - w;
        let facts = [1.0, 1.0, 2.0, 6.0, 24.0];
        assert!((jet[0] - w / u).norm() < 1e-15);
        for k in 1..5 {
            let expected = facts[k] / u.powu(k as u32 + 1);
            assert!((jet[k] - expected).norm() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn mobius_compose_and_inverse() {
        let m = Mobius::new(
            C64::new(2.0, 1.0),
            C64::new(0.5, 0.0),
            C64::new(0.3, -0.2),
            C64::new(1.0, 0.0),
        );
        let id = m.compose(&m.inverse());
        let w = C64::new(0.1, 0.4);
        assert!((id.apply(w).unwrap() - w).norm() < 1e-14);
    }

    #[test]
    fn analytic_map_json_tagging() {
        let h = AnalyticMap::Mobius(Mobius::identity());
        let text = serde_json::to_string(&h).unwrap();
        assert!(text.contains("\"kind\":\"mobius\""));
        let back: AnalyticMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, h);
    }
}
