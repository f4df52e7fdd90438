//! Fixture files.
//!
//! Channel dumps are little-endian binary:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `FAMEQCH1` |
//! | 3 × 8 | `u64` antennas, users, subcarriers |
//! | rest  | per subcarrier, `H_w` row-major as interleaved `re, im` `f64` |
//!
//! Equalizer and quantization fixtures are JSON.

use std::io::{Read, Write};

use fameeq_core::channel::ChannelRealization;
use fameeq_core::equalize::FiniteAlphabetEqualizer;
use fameeq_core::numerics::CMatrix;
use fameeq_core::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAGIC: &[u8; 8] = b"FAMEQCH1";

/// Fixture read/write errors.
#[derive(Debug, Error)]
pub enum FixtureError {
    /// Underlying IO failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// Bad magic, truncated data or impossible dimensions.
    #[error("malformed channel dump: {0}")]
    Malformed(String),
}

/// Writes `ch` in the binary dump format.
pub fn write_channel<W: Write>(ch: &ChannelRealization, mut out: W) -> Result<(), FixtureError> {
    out.write_all(MAGIC)?;
    for d in [ch.antennas(), ch.users(), ch.subcarriers()] {
        out.write_all(&(d as u64).to_le_bytes())?;
    }
    for m in ch.matrices() {
        for z in m.as_slice() {
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a binary channel dump.
pub fn read_channel<R: Read>(mut input: R) -> Result<ChannelRealization, FixtureError> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(FixtureError::Malformed("bad magic".into()));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        let mut b = [0u8; 8];
        input.read_exact(&mut b)?;
        *d = usize::try_from(u64::from_le_bytes(b)).map_err(|_| FixtureError::Malformed("dimension overflow".into()))?;
    }
    let [b, u, w] = dims;
    if b == 0 || u == 0 || w == 0 {
        return Err(FixtureError::Malformed(format!("zero dimension in {b}x{u}x{w}")));
    }
    let total = b
        .checked_mul(u)
        .and_then(|n| n.checked_mul(w))
        .and_then(|n| n.checked_mul(16))
        .ok_or_else(|| FixtureError::Malformed("dimension overflow".into()))?;
    let mut raw = Vec::new();
    input.read_to_end(&mut raw)?;
    if raw.len() != total {
        return Err(FixtureError::Malformed(format!("expected {total} payload bytes, found {}", raw.len())));
    }
    let f = |i: usize| f64::from_le_bytes(raw[8 * i..8 * i + 8].try_into().unwrap());
    let per = b * u;
    let mats = (0..w)
        .map(|k| {
            let data = (0..per).map(|i| Complex64::new(f(2 * (k * per + i)), f(2 * (k * per + i) + 1))).collect();
            CMatrix::from_row_major(b, u, data).map_err(|e| FixtureError::Malformed(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ChannelRealization::new(mats).map_err(|e| FixtureError::Malformed(e.to_string()))
}

/// One finite-alphabet row in a fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFixture {
    /// User index.
    pub user: usize,
    /// Odd-integer `(re, im)` entries of `x_u`; empty if degenerate.
    pub integers: Vec<(i32, i32)>,
    /// `beta_u` as `[re, im]`.
    pub beta: [f64; 2],
    /// NPI variance.
    pub nu_sq: f64,
    /// FAME objective.
    pub objective: f64,
    /// Failure message for degenerate rows.
    pub error: Option<String>,
}

/// A finite-alphabet equalizer for one channel matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualizerFixture {
    /// Producing algorithm.
    pub algorithm: String,
    /// Resolution.
    pub bits: u32,
    /// Antennas.
    pub antennas: usize,
    /// Regularization `No / Es`.
    pub rho: f64,
    /// Per-user rows.
    pub rows: Vec<RowFixture>,
}

impl EqualizerFixture {
    /// Captures `eq` for serialization.
    pub fn new(algorithm: &str, rho: f64, eq: &FiniteAlphabetEqualizer) -> Self {
        let rows = eq
            .rows
            .iter()
            .enumerate()
            .map(|(u, r)| match r {
                Ok(r) => RowFixture {
                    user: u,
                    integers: r.integer_parts(),
                    beta: [r.beta.re, r.beta.im],
                    nu_sq: r.nu_sq,
                    objective: r.objective,
                    error: None,
                },
                Err(e) => RowFixture {
                    user: u,
                    integers: Vec::new(),
                    beta: [0.0; 2],
                    nu_sq: f64::NAN,
                    objective: f64::NAN,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        Self {
            algorithm: algorithm.to_string(),
            bits: eq.bits,
            antennas: eq.antennas,
            rho,
            rows,
        }
    }
}

/// Uniform quantization of one vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationFixture {
    /// Resolution.
    pub bits: u32,
    /// Input entries as `[re, im]`.
    pub input: Vec<[f64; 2]>,
    /// Largest real or imaginary magnitude.
    pub w_max: f64,
    /// Bin width `2 w_max / 2^bits`.
    pub bin_width: f64,
    /// Odd-integer labels as `[re, im]`.
    pub integers: Vec<[i32; 2]>,
    /// Bin centroids as `[re, im]`.
    pub centroids: Vec<[f64; 2]>,
}
