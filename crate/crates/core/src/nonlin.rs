//! The smoothed-amplitude nonlinearity and its proximal representations.
//!
//! For `δ > 0` the pseudo-Huber map is `φ_δ(z) = √(|z|²+δ²) − δ` with Wirtinger
//! derivative `φ'_δ(z) = z / √(|z|²+δ²)`. Both pieces of the data-term gradient
//! are proximal maps of the convex function `f_δ(z) = δ² f(z/δ)`:
//!
//! * `prox_{f_δ}(z)  = δ z / √(|z|²+δ²) = δ φ'_δ(z)`
//! * `prox_{f_δ*}(z) = z − prox_{f_δ}(z) = φ_δ(z) φ'_δ(z)`
//!
//! All maps are evaluated from these closed forms.

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoHuber {
    delta: f64,
}

impl PseudoHuber {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pseudo-Huber scale must be positive and finite, got {delta}"
            )));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn radius(&self, z: C64) -> f64 {
        z.norm().hypot(self.delta)
    }

    pub fn phi(&self, z: C64) -> f64 {
        // √(r²+δ²) − δ = r² / (√(r²+δ²) + δ), stable for small r
        let r2 = z.norm_sqr();
        r2 / (self.radius(z) + self.delta)
    }

    pub fn phi_prime(&self, z: C64) -> C64 {
        z / self.radius(z)
    }

    pub fn prox(&self, z: C64) -> C64 {
        z * (self.delta / self.radius(z))
    }

    pub fn prox_conjugate(&self, z: C64) -> C64 {
        z * (self.phi(z) / self.radius(z))
    }

    /// `γ(x) = √(x + δ²) − δ`, the map from raw intensity to transformed data.
    pub fn transform(&self, intensity: f64) -> f64 {
        intensity / ((intensity + self.delta * self.delta).sqrt() + self.delta)
    }

    /// Inverse of [`transform`](Self::transform): `(g + δ)² − δ²`.
    pub fn inverse_transform(&self, g: f64) -> f64 {
        g * (g + 2.0 * self.delta)
    }
}

/// `prox_{φ₁}(y) = y / √(1 + y²)`, the proximal map of the even function
/// `φ₁(x) = −x²/2 − √(1 − x²)` on `[−1, 1]`.
pub fn prox_phi1(y: f64) -> f64 {
    y / (1.0 + y * y).sqrt()
}

/// `φ₁` itself, `+∞` outside `[−1, 1]`. Used to check the prox by direct
/// minimisation.
pub fn phi1(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        -0.5 * x * x - (1.0 - x * x).sqrt()
    } else {
        f64::INFINITY
    }
}

/// The nonlinearity applied to `AΦz` inside the unrolled network.
///
/// `Linear` (`φ(z) = z`, `φ' ≡ 1`) turns each stage into a plain ISTA
/// gradient step; its derivative has Lipschitz constant 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    PseudoHuber(PseudoHuber),
    Linear,
}

impl Nonlinearity {
    pub fn pseudo_huber(delta: f64) -> Result<Self> {
        PseudoHuber::new(delta).map(Self::PseudoHuber)
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            Self::PseudoHuber(h) => Some(h.delta()),
            Self::Linear => None,
        }
    }

    pub fn value(&self, z: C64) -> C64 {
        match self {
            Self::PseudoHuber(h) => C64::new(h.phi(z), 0.0),
            Self::Linear => z,
        }
    }

    pub fn derivative(&self, z: C64) -> C64 {
        match self {
            Self::PseudoHuber(h) => h.phi_prime(z),
            Self::Linear => C64::new(1.0, 0.0),
        }
    }

    /// Residual-times-derivative `(φ(u) − g) φ'(u)` evaluated directly.
    pub fn weighted_residual(&self, u: C64, g: f64) -> C64 {
        (self.value(u) - g) * self.derivative(u)
    }

    /// The conjugate-prox piece `T(u)`: `prox_{f_δ*}(u)` or the identity.
    pub fn t_map(&self, u: C64) -> C64 {
        match self {
            Self::PseudoHuber(h) => h.prox_conjugate(u),
            Self::Linear => u,
        }
    }

    /// The data-weighted prox piece `S^g(u)`: `(g/δ) prox_{f_δ}(u)` or `g`.
    pub fn s_map(&self, u: C64, g: f64) -> C64 {
        match self {
            Self::PseudoHuber(h) => h.prox(u) * (g / h.delta()),
            Self::Linear => C64::new(g, 0.0),
        }
    }

    /// Lipschitz constant of `φ'`: `1/δ` or `0`.
    pub fn derivative_lipschitz(&self) -> f64 {
        match self {
            Self::PseudoHuber(h) => 1.0 / h.delta(),
            Self::Linear => 0.0,
        }
    }

    /// Recovers raw intensities from transformed measurements.
    pub fn intensity(&self, g: f64) -> f64 {
        match self {
            Self::PseudoHuber(h) => h.inverse_transform(g),
            Self::Linear => g * g,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::PseudoHuber(h) => format!("pseudo_huber({})", h.delta()),
            Self::Linear => "linear".to_string(),
        }
    }
}
