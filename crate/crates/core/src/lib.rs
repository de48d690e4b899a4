//! Convolutional text classification of ICU clinical narratives with a
//! scaled dot-product attention head, end to end: cohort extraction from
//! MIMIC-shaped CSV tables, text normalization and encoding, CBOW and
//! StarSpace word embeddings, 5-fold cross-validated training with early
//! stopping, exact ranking metrics, and attention-based explanations
//! rendered as word clouds.
//!
//! The numeric core is a small reverse-mode kernel in [`kernel`] that
//! implements exactly the operations the two model heads need, plus Adam
//! and a finite-difference gradient checker.

pub mod corpus;
pub mod embed;
pub mod error;
pub mod explain;
pub mod kernel;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod text;
pub mod train;

pub use error::{Error, Result};
