//! Exact, chart-based engine for resolution of multi-ideals in characteristic
//! zero, with a partial extension to multi-ideals over ℚ[ε]/(ε^m).
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod poly;
pub mod charts;
pub mod ideals;
pub mod pairs;
pub mod multiideal;
pub mod invariants;
pub mod monomial;
pub mod resolution;
pub mod artinian;

pub use error::{Error, Result};
