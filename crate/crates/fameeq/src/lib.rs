//! Link-level simulation, fixtures and command-line front end for the
//! `fameeq-core` equalizers.
//!
//! - [`config`]: TOML schema.
//! - [`simkit`]: coded BER sweeps.
//! - [`studies`]: variance check, oracle gap, quantization demo.
//! - [`io`]: channel dumps and JSON fixtures.
//! - [`cli`]: the `fameeq` binary.

#![warn(missing_docs)]

pub mod cli;
pub mod config;
pub mod io;
pub mod simkit;
pub mod studies;
