//! Unrolled proximal networks for phase retrieval with learned unitary
//! dictionaries, together with their perturbation and generalization bounds.

pub mod bounds;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod exper;
pub mod linalg;
pub mod matio;
pub mod model;
pub mod nonlin;
pub mod prox;
pub mod rng;
pub mod unitary;
pub mod unroll;

pub use ensemble::{DictionaryOperator, MeasurementEnsemble};
pub use error::{Error, Result};
pub use nonlin::{Nonlinearity, PseudoHuber};
pub use prox::{ClipRadius, Regularizer};
pub use rng::SeededRng;
pub use unitary::UnitaryMatrix;
pub use unroll::{UnrollConfig, UnrollOutput};
