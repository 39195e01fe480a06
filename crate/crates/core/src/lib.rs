//! Cross-domain prerequisite chain learning with a domain-adversarial
//! variational graph autoencoder.
//!
//! The pipeline: load concept vocabularies, annotated prerequisite relations
//! and precomputed embeddings ([`dataset`]), assemble concept graphs with
//! annotation / cosine-similarity / PMI edges ([`graph`]), train a variational
//! GCN (or GAT) encoder with a DistMult decoder and an adversarial domain
//! discriminator ([`model`], [`trainer`]), score target-domain concept pairs
//! ([`evaluator`]) and analyse the recovered prerequisite graph ([`paths`]).
//!
//! All linear algebra and gradients are written out by hand on top of the
//! small dense/sparse kernels in [`numeric`]; a finite-difference oracle in
//! the same module keeps every derivative honest.

pub mod dataset;
pub mod evaluator;
pub mod graph;
pub mod model;
pub mod numeric;
pub mod paths;
pub mod synth;
pub mod trainer;

pub use numeric::{DenseMatrix, RngState, SparseMatrix};
