//! Experiments built on the library: synthetic datasets, the depth sweep of
//! the dictionary-perturbation lower bound, and the consolidated invariant
//! suite.

pub mod dataset;
pub mod figure1;
pub mod suite;

pub use dataset::{generate_dataset, Dataset, DatasetParams, WeightsKind};
pub use figure1::{figure1, Figure1Config, Figure1Result, Figure1Row};
pub use suite::{property_suite, PropertyEntry, PropertyReport, SuiteConfig};
