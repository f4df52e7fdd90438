//! Gray-labeled constellations, bit mapping and soft demapping.
//!
//! Points are stored indexed by their label, and labels are read MSB first:
//! bit `q` of label `l` is `(l >> (Q - 1 - q)) & 1`.
//!
//! 16-QAM label table (per axis, `sign inner`):
//!
//! | bits | level |
//! |------|-------|
//! | `00` | -3    |
//! | `01` | -1    |
//! | `11` | +1    |
//! | `10` | +3    |
//!
//! Bits 0 and 1 select the real level, bits 2 and 3 the imaginary level,
//! and the levels are scaled by `sqrt(Es / 10)`. QPSK uses bit 0 for the
//! sign of the real part and bit 1 for the sign of the imaginary part.
//!
//! LLRs are natural-log ratios with positive values favouring bit 1.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;
use thiserror::Error;

use crate::numerics::CVector;

/// LLR magnitudes are clamped to this value.
pub const LLR_CLAMP: f64 = 80.0;

/// Modem errors.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ModemError {
    /// Bit count not a multiple of the bits per symbol, or output slice of
    /// the wrong size.
    #[error("length mismatch: {len} is not compatible with {bits_per_symbol} bits per symbol")]
    LengthMismatch {
        /// Offending length.
        len: usize,
        /// Bits per symbol of the constellation.
        bits_per_symbol: usize,
    },
    /// The NPI variance passed to the demapper was not positive.
    #[error("non-positive variance {0}")]
    NonpositiveVariance(f64),
    /// Symbol energy not positive.
    #[error("invalid symbol energy {0}")]
    InvalidEnergy(f64),
}

/// How the per-bit log-sum-exp is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LlrMethod {
    /// Exact log-sum-exp.
    #[default]
    Exact,
    /// Max-log approximation.
    MaxLog,
}

/// Complex constellation with Gray bit labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: &'static str,
    es: f64,
    bits_per_symbol: usize,
    /// `points[label]`.
    points: Vec<Complex64>,
    /// For each bit position: labels with the bit set, labels with it clear.
    subsets: Vec<(Vec<usize>, Vec<usize>)>,
}

fn axis_level(sign: u32, inner: u32) -> f64 {
    match (sign, inner) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        _ => 3.0,
    }
}

impl Constellation {
    fn from_points(name: &'static str, es: f64, bits_per_symbol: usize, points: Vec<Complex64>) -> Self {
        let subsets = (0..bits_per_symbol)
            .map(|q| {
                let shift = bits_per_symbol - 1 - q;
                let (ones, zeros): (Vec<usize>, Vec<usize>) =
                    (0..points.len()).partition(|l| (l >> shift) & 1 == 1);
                (ones, zeros)
            })
            .collect();
        Self {
            name,
            es,
            bits_per_symbol,
            points,
            subsets,
        }
    }

    /// Gray-labeled 16-QAM with average energy `es`.
    pub fn qam16(es: f64) -> Result<Self, ModemError> {
        if !(es > 0.0 && es.is_finite()) {
            return Err(ModemError::InvalidEnergy(es));
        }
        let scale = (es / 10.0).sqrt();
        let points = (0..16u32)
            .map(|l| {
                let re = axis_level((l >> 3) & 1, (l >> 2) & 1);
                let im = axis_level((l >> 1) & 1, l & 1);
                Complex64::new(re * scale, im * scale)
            })
            .collect();
        Ok(Self::from_points("qam16", es, 4, points))
    }

    /// Gray-labeled QPSK with average energy `es`.
    pub fn qpsk(es: f64) -> Result<Self, ModemError> {
        if !(es > 0.0 && es.is_finite()) {
            return Err(ModemError::InvalidEnergy(es));
        }
        let a = (es / 2.0).sqrt();
        let sgn = |bit: usize| if bit == 1 { a } else { -a };
        let points = (0..4usize)
            .map(|l| Complex64::new(sgn((l >> 1) & 1), sgn(l & 1)))
            .collect();
        Ok(Self::from_points("qpsk", es, 2, points))
    }

    /// Short identifier (`"qam16"`, `"qpsk"`).
    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Average symbol energy.
    pub fn es(&self) -> f64 {
        self.es
    }

    /// Bits per symbol `Q`.
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Points indexed by label.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Labels whose bit `q` is 1 and 0, in increasing label order.
    pub fn subsets(&self, q: usize) -> (&[usize], &[usize]) {
        let (ones, zeros) = &self.subsets[q];
        (ones, zeros)
    }

    /// Bits of `label`, MSB first.
    pub fn label_bits(&self, label: usize) -> Vec<u8> {
        (0..self.bits_per_symbol)
            .map(|q| ((label >> (self.bits_per_symbol - 1 - q)) & 1) as u8)
            .collect()
    }

    /// Maps consecutive groups of `Q` bits to points.
    pub fn map_bits(&self, bits: &[u8]) -> Result<CVector, ModemError> {
        let q = self.bits_per_symbol;
        if !bits.len().is_multiple_of(q) {
            return Err(ModemError::LengthMismatch {
                len: bits.len(),
                bits_per_symbol: q,
            });
        }
        Ok(bits
            .chunks_exact(q)
            .map(|chunk| {
                let label = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.points[label]
            })
            .collect())
    }

    /// Label of the nearest point.
    pub fn nearest_label(&self, s: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (l, p) in self.points.iter().enumerate() {
            let d = (s - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = l;
            }
        }
        best
    }

    /// Nearest-point hard decisions, `Q` bits per symbol.
    pub fn hard_demap(&self, symbols: &[Complex64]) -> Vec<u8> {
        symbols
            .iter()
            .flat_map(|&s| self.label_bits(self.nearest_label(s)))
            .collect()
    }

    /// Exact LLRs of one symbol estimate with NPI variance `nu_sq`.
    pub fn soft_demap(&self, s_hat: Complex64, nu_sq: f64) -> Result<Vec<f64>, ModemError> {
        let mut out = vec![0.0; self.bits_per_symbol];
        self.soft_demap_into(s_hat, nu_sq, LlrMethod::Exact, &mut out)?;
        Ok(out)
    }

    /// Writes the `Q` LLRs of `s_hat` into `out`.
    ///
    /// `Lambda_q = log sum_{s in S_q^1} exp(-|s_hat - s|^2 / nu_sq)
    ///           - log sum_{s in S_q^0} exp(-|s_hat - s|^2 / nu_sq)`,
    /// evaluated with a max-shifted log-sum-exp and clamped to
    /// `+-LLR_CLAMP`.
    pub fn soft_demap_into(
        &self,
        s_hat: Complex64,
        nu_sq: f64,
        method: LlrMethod,
        out: &mut [f64],
    ) -> Result<(), ModemError> {
        if !(nu_sq > 0.0) {
            return Err(ModemError::NonpositiveVariance(nu_sq));
        }
        if out.len() != self.bits_per_symbol {
            return Err(ModemError::LengthMismatch {
                len: out.len(),
                bits_per_symbol: self.bits_per_symbol,
            });
        }
        // at most 16 points
        let mut buf = [0.0f64; 16];
        let metric = &mut buf[..self.points.len()];
        for (m, p) in metric.iter_mut().zip(&self.points) {
            *m = -(s_hat - p).norm_sqr() / nu_sq;
        }
        for (q, o) in out.iter_mut().enumerate() {
            let (ones, zeros) = self.subsets(q);
            let llr = match method {
                LlrMethod::Exact => log_sum_exp(metric, ones) - log_sum_exp(metric, zeros),
                LlrMethod::MaxLog => max_of(metric, ones) - max_of(metric, zeros),
            };
            *o = llr.clamp(-LLR_CLAMP, LLR_CLAMP);
        }
        Ok(())
    }
}

fn max_of(metric: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| metric[i]).fold(f64::NEG_INFINITY, f64::max)
}

fn log_sum_exp(metric: &[f64], idx: &[usize]) -> f64 {
    let m = max_of(metric, idx);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = idx.iter().map(|&i| (metric[i] - m).exp()).sum();
    m + s.ln()
}
