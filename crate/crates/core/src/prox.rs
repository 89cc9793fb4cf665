//! Regularizer proximal maps and the output clipping map σ.

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, C64};

/// The regularizer `R` applied to sparse codes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Regularizer {
    #[default]
    None,
    /// `λ ‖z‖₁` with the complex modulus entrywise.
    L1 { lambda: f64 },
}

impl Regularizer {
    pub fn l1(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("l1 weight must be ≥ 0, got {lambda}")));
        }
        Ok(Self::L1 { lambda })
    }

    /// From a weight: zero selects [`Regularizer::None`].
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            Ok(Self::None)
        } else {
            Self::l1(lambda)
        }
    }

    pub fn value(&self, z: &ComplexVector) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::L1 { lambda } => lambda * z.iter().map(|v| v.norm()).sum::<f64>(),
        }
    }

    /// `prox_{t R}(z)`. Complex soft thresholding shrinks each modulus and
    /// keeps the phase.
    pub fn prox(&self, t: f64, z: &ComplexVector) -> Result<ComplexVector> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("prox scale must be ≥ 0, got {t}")));
        }
        Ok(match *self {
            Self::None => z.clone(),
            Self::L1 { lambda } => {
                let thr = t * lambda;
                z.map(|v| soft_threshold(v, thr))
            }
        })
    }

    pub fn label(&self) -> String {
        match *self {
            Self::None => "none".into(),
            Self::L1 { lambda } => format!("l1({lambda})"),
        }
    }
}

fn soft_threshold(v: C64, thr: f64) -> C64 {
    let r = v.norm();
    if r <= thr {
        C64::new(0.0, 0.0)
    } else {
        v * ((r - thr) / r)
    }
}

/// Radii of the input-signal ball and the output clipping ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipRadius {
    c_in: f64,
    c_out: f64,
}

impl ClipRadius {
    pub fn new(c_in: f64, c_out: f64) -> Result<Self> {
        for (name, v) in [("C_in", c_in), ("C_out", c_out)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { c_in, c_out })
    }

    /// `C_out = C_in = c`.
    pub fn uniform(c: f64) -> Result<Self> {
        Self::new(c, c)
    }

    pub fn c_in(&self) -> f64 {
        self.c_in
    }

    pub fn c_out(&self) -> f64 {
        self.c_out
    }

    /// Radial projection onto the closed ball of radius `C_out`.
    pub fn clip(&self, x: &ComplexVector) -> ComplexVector {
        let n = x.norm();
        if n <= self.c_out {
            x.clone()
        } else {
            x * C64::new(self.c_out / n, 0.0)
        }
    }
}
