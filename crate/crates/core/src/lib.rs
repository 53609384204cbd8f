//! Speech emotion recognition from prosodic (energy, pitch) and spectral
//! (MFCC, LPCC) utterance features with a one-vs-one RBF support vector
//! machine, plus tooling for cross-validated evaluation, surrogate corpora
//! and human listening tests.

pub mod annotation;
pub mod audio;
pub mod cli;
pub mod emotion;
pub mod eval;
pub mod features;
pub mod manifest;
pub mod numfmt;
pub mod svm;
