//! Exact computations around definable henselian valuations on almost real
//! closed fields.

pub mod convex;
pub mod error;
pub mod hahn;
pub mod interval;
pub mod logic;
pub mod oag;
pub mod primes;
mod syntax;
pub mod valuations;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/cuts.md")]
    mod cuts {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/valuations.md")]
    mod valuations {}
}
