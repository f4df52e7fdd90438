//! Reproducible random streams.
//!
//! Every random draw in a simulation comes from a ChaCha8 stream keyed by the
//! master seed. The 64-bit ChaCha stream id packs the trial index and a
//! purpose tag, so `(master_seed, trial, purpose)` pins a stream that does not
//! depend on which worker runs the trial or in what order.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Channel realization and power-control draws.
    Channel,
    /// Information bits.
    Bits,
    /// Receiver noise at the given SNR point.
    Noise(u16),
    /// Free-form tag for auxiliary studies.
    Other(u16),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Channel => 1,
            Purpose::Bits => 2,
            Purpose::Noise(i) => 0x1_0000 + i as u64,
            Purpose::Other(i) => 0x2_0000 + i as u64,
        }
    }
}

/// Stream for `(master_seed, trial, purpose)`.
///
/// # Panics
///
/// Panics if `trial >= 2^46`.
pub fn derive_rng(master_seed: u64, trial: u64, purpose: Purpose) -> ChaCha8Rng {
    assert!(trial < (1 << 46), "trial index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((trial << 18) | purpose.tag());
    rng
}
