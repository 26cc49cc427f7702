//! Fox-calculus resolutions of two-dimensional groups, their duals, diagonal
//! approximations and chain-level cup products.

pub mod cupcoh;
pub mod diagonal;
pub mod error;
pub mod foxres;
pub mod groupring;
pub mod modules;
pub mod presentation;

pub use error::{Error, Result};
