// Copyright 2026 The adnoise Authors
// SPDX-License-Identifier: Apache-2.0

//! Electric-field noise from adatoms hopping between vibrational bound states
//! of a surface potential, and the resulting heating of a trapped ion.
//!
//! The pipeline runs bottom up:
//! [`potential`] → [`boundstates`] → [`dipoles`] and [`phonons`] →
//! [`spectrum`] → [`trapnoise`]. [`pipeline`] wires the stages together for
//! the `adnoise` binary.

// `!(x > 0.0)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundstates;
pub mod config;
pub mod dipoles;
pub mod error;
pub mod numerics;
pub mod phonons;
pub mod pipeline;
pub mod potential;
pub mod spectrum;
pub mod table;
pub mod trapnoise;
pub mod units;
pub mod validate;

pub use error::{Error, ErrorKind, Result};
