//! Soft-output finite-alphabet spatial equalization for massive MU-MIMO uplink.
//!
//! This crate holds the algorithmic core and is `no_std` (it only needs
//! `alloc`). Everything here is a pure function of its inputs plus an
//! explicit random stream where randomness is involved:
//!
//! - [`numerics`]: dense complex vectors/matrices, Gram matrices, Cholesky
//!   solves and power iteration.
//! - [`channel`]: i.i.d. Rayleigh and clustered plane-wave channels, power
//!   control and the noisy input-output relation.
//! - [`modem`]: Gray-labeled QPSK/16-QAM and exact log-sum-exp LLRs.
//! - [`equalize`]: L-MMSE, FL-MMSE, FAME-FBS and the exhaustive FAME oracle,
//!   together with optimal scaling and post-equalization NPI variance.
//! - [`fec`]: K=7 (133,171) convolutional code punctured to rate 3/4 and a
//!   soft-input Viterbi decoder.
//! - [`rng`]: derivation of independent, reproducible per-trial streams.
#![no_std]
#![warn(missing_docs)]
// Negated comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod equalize;
pub mod fec;
pub mod modem;
pub mod numerics;
pub mod rng;

pub use num_complex::Complex64;
