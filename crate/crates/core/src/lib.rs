//! Integer factorization with Gauss sums.
//!
//! A trial factor `l` of `N` is tested through the normalized sum
//! `(1/(M+1)) Σ_{m=0}^{M} exp(2πi m^n N / l)`, whose magnitude is exactly 1
//! when `l` divides `N`. Truncating the sum lets non-factors close to a
//! factor ("ghost factors") read close to 1 as well; this crate evaluates the
//! truncated, randomized and higher-order variants that suppress them, the
//! curlicue-function view of the same sums, and a spin-1/2 simulation of the
//! rf pulse trains that realize them physically.
//!
//! - [`numtheory`]: exact phase arithmetic, `ε(N, l)`, factor tests
//! - [`sums`]: complete, truncated, randomized and curlicue sums
//! - [`ghost`]: classification, suppression search, scaling studies
//! - [`spinsim`]: pulse propagators and magnetization readout
//! - [`cli`], [`figures`], [`output`]: the command-line tool and its formats

pub mod cli;
pub mod error;
pub mod figures;
pub mod ghost;
pub mod numtheory;
pub mod output;
pub mod rng;
pub mod spinsim;
pub mod sums;

pub use error::{Error, Result};
pub use ghost::{ClassifiedTrial, TrialClass};
pub use numtheory::{Epsilon, Natural, PhaseFraction};
pub use sums::{Strategy, SumSpec, SumValue};
