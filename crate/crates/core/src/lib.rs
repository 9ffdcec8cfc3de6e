//! Curvature and paracontact-structure verification for 3-dimensional
//! pseudo-Riemannian manifolds of signature (+,−,+).
//!
//! The crate is organised bottom-up:
//!
//! - [`jet`]: truncated Taylor arithmetic, the exact-derivative number type;
//! - [`expr`]: the scalar expression language used for chart components;
//! - [`geometry`]: manifold instances, connection and curvature;
//! - [`paracontact`]: the (φ, ξ, η, g) structure, its invariants and classification;
//! - [`qps`]: identity checks specific to quasi-para-Sasakian structures;
//! - [`zoo`]: built-in example manifolds with reference values;
//! - [`spec`], [`runner`], [`report`]: JSON manifold specs, suite orchestration and reports.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod expr;
pub mod geometry;
pub mod jet;
pub mod paracontact;
pub mod qps;
pub mod report;
pub mod residual;
pub mod runner;
pub mod sampling;
pub mod spec;
pub mod tensor;
pub mod zoo;
