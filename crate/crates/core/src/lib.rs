//! Bayesian nonparametric inference for heterogeneous block maxima.
//!
//! Block maxima that arise from several groups with different tail
//! behaviour are modelled by a Dirichlet-process mixture of GEV kernels,
//! truncated at a fixed number of stick-breaking components and fitted with
//! a blocked Gibbs sampler. The crate provides the distribution primitives
//! ([`gev`], [`mixture`]), the sampler ([`sampler`]), posterior summaries and
//! model checks ([`diagnostics`]) and simulation tools ([`simdata`]).

pub mod data;
pub mod diagnostics;
pub mod error;
pub mod gev;
pub mod mixture;
pub mod rng;
pub mod roots;
pub mod sampler;
pub mod simdata;
pub mod special;

pub use data::BlockMaximaSeries;
pub use error::{Error, Result};
pub use gev::{GevParams, SupportBounds};
pub use mixture::{GevMixture, StickWeights};
pub use sampler::{fit, run_chain, ChainConfig, MixtureState, PosteriorDraws, PriorSpec};
