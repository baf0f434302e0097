//! Updating credal sets under maxmin expected utility.
//!
//! Beliefs are polytopes of priors over a finite state space. The crate
//! implements full Bayesian, maximum likelihood, relative maximum likelihood
//! and likelihood-ratio updating, executable checks of the behavioural axioms
//! that characterize them, and two worked applications: ambiguous signals
//! about a binary state and persuasion with an ambiguous device.

pub mod axioms;
pub mod credal;
pub mod error;
mod lp;
pub mod persuasion;
pub mod prior;
pub mod refinement;
pub mod sampling;
pub mod signals;
pub mod space;
pub mod update;

pub use credal::{
    contract, event_prob_bounds, hull_reduce, hull_reduce_with_tol, max_likelihood_face, meu_minimizers, meu_value,
    CredalSet, TAU_GEOM,
};
pub use error::{Error, Result};
pub use prior::{bayes_update, splice, splice_const, Act, Prior, TAU_NORM};
pub use space::{Event, StateSpace};
pub use update::{conditional_ce, retained_set, update, UpdateRule};
