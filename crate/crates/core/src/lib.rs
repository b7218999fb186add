//! Calculus of contact forms with b^m singularities along a hypersurface.
//!
//! The crate is organized bottom-up: [`scalar`] expressions, [`chart`]s and
//! [`grid`] sampling, the b^m exterior algebra in [`exterior`], and on top of
//! it [`contact`], [`jacobi`], the deformations in [`singular`], and the
//! example [`catalog`].

pub mod chart;
pub mod contact;
pub mod exterior;
pub mod grid;
pub mod jacobi;
pub mod linsolve;
pub mod scalar;
pub mod catalog;
pub mod singular;

pub use chart::Chart;
pub use grid::GridConfig;
pub use scalar::{parse_scalar, Point, ScalarExpr};
