//! Exact integer model of block exceptional collections on Del Pezzo
//! surfaces, at the level of the numerical Grothendieck group.
//!
//! The crate is layered bottom-up:
//!
//! * [`picard`]: Picard lattices, canonical classes, (-1)-curves and roots.
//! * [`kclass`]: classes `(rank, c1, 2 ch2)` with the Euler form.
//! * [`blockcalc`]: blocks, collections, mutations, dual bases.
//! * [`markov`]: the Markov-type equations governing 3-block collections,
//!   their solutions and solution graphs.
//! * [`catalog`]: explicit 3-block collections built by mutation words.
//! * [`weyl`]: Weyl group actions and orbit counts.
//! * [`cli`]: the command line front end.

pub mod blockcalc;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod kclass;
pub mod markov;
pub mod picard;
pub mod weyl;

pub use blockcalc::{Block, Collection, Move, MutationKind, MutationType};
pub use error::{Error, Result};
pub use kclass::{KClass, Slope};
pub use picard::{ClassKind, DivisorClass, SurfaceId};
