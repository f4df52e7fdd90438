//! Punctured convolutional coding with soft-input Viterbi decoding.
//!
//! The default code is the K=7 (133, 171) rate-1/2 mother code punctured to
//! rate 3/4 with the pattern `[1 1 0; 1 0 1]`, so every three input bits
//! produce `A0 B0 A1 B2`. Frames are terminated with `K - 1` zero tail bits.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// FEC errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FecError {
    /// LLR count does not match the coded length of the frame.
    #[error("expected {expected} LLRs, got {got}")]
    LengthMismatch {
        /// Coded length implied by the info length.
        expected: usize,
        /// Supplied length.
        got: usize,
    },
    /// Nothing to encode.
    #[error("empty information block")]
    EmptyInput,
    /// Code description out of the supported range.
    #[error("invalid codec: {0}")]
    InvalidSpec(&'static str),
}

/// Convolutional code, puncturing pattern and termination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecSpec {
    /// Constraint length `K` (2..=7).
    pub constraint_length: u32,
    /// Generator polynomials; the MSB taps the current input bit.
    pub generators: [u32; 2],
    /// `pattern[j][p]`: keep output `j` at period position `p`.
    pub puncture_pattern: [Vec<bool>; 2],
}

impl Default for CodecSpec {
    fn default() -> Self {
        Self::rate_3_4()
    }
}

impl CodecSpec {
    /// K=7 (133, 171) punctured to rate 3/4.
    pub fn rate_3_4() -> Self {
        Self {
            constraint_length: 7,
            generators: [0o133, 0o171],
            puncture_pattern: [vec![true, true, false], vec![true, false, true]],
        }
    }

    /// K=7 (133, 171) without puncturing.
    pub fn rate_1_2() -> Self {
        Self {
            constraint_length: 7,
            generators: [0o133, 0o171],
            puncture_pattern: [vec![true], vec![true]],
        }
    }

    /// Checks the constraint length, generators and pattern.
    pub fn validate(&self) -> Result<(), FecError> {
        let k = self.constraint_length;
        if !(2..=7).contains(&k) {
            return Err(FecError::InvalidSpec("constraint length must be in 2..=7"));
        }
        if self.generators.iter().any(|&g| g == 0 || g >> k != 0) {
            return Err(FecError::InvalidSpec("generator does not fit the constraint length"));
        }
        let [a, b] = &self.puncture_pattern;
        if a.is_empty() || a.len() != b.len() {
            return Err(FecError::InvalidSpec("puncture rows must be non-empty and equal length"));
        }
        if a.iter().zip(b).all(|(x, y)| !x && !y) {
            return Err(FecError::InvalidSpec("puncture pattern keeps nothing"));
        }
        Ok(())
    }

    /// Number of tail bits, `K - 1`.
    pub fn tail_bits(&self) -> usize {
        self.constraint_length as usize - 1
    }

    fn period(&self) -> usize {
        self.puncture_pattern[0].len()
    }

    fn kept(&self, step: usize, j: usize) -> bool {
        self.puncture_pattern[j][step % self.period()]
    }

    /// Transmitted bits for `info_len` information bits.
    pub fn coded_len(&self, info_len: usize) -> usize {
        let steps = info_len + self.tail_bits();
        let period = self.period();
        let per_period: usize = (0..period).map(|p| self.kept(p, 0) as usize + self.kept(p, 1) as usize).sum();
        let rem: usize = (0..steps % period)
            .map(|p| self.kept(p, 0) as usize + self.kept(p, 1) as usize)
            .sum();
        steps / period * per_period + rem
    }

    /// Largest information length whose coded length fits in `coded_bits`.
    pub fn max_info_len(&self, coded_bits: usize) -> usize {
        let mut k = coded_bits;
        while k > 0 && self.coded_len(k) > coded_bits {
            k -= 1;
        }
        k
    }

    /// Mother-code outputs for register contents `reg` (K bits).
    #[inline]
    fn outputs(&self, reg: u32) -> [u8; 2] {
        [
            ((reg & self.generators[0]).count_ones() & 1) as u8,
            ((reg & self.generators[1]).count_ones() & 1) as u8,
        ]
    }
}

/// Encodes `info` (bits as 0/1 bytes) with tail termination and puncturing.
pub fn encode(spec: &CodecSpec, info: &[u8]) -> Result<Vec<u8>, FecError> {
    spec.validate()?;
    if info.is_empty() {
        return Err(FecError::EmptyInput);
    }
    let k = spec.constraint_length;
    let mut out = Vec::with_capacity(spec.coded_len(info.len()));
    let mut state = 0u32;
    let tail = core::iter::repeat_n(0u8, spec.tail_bits());
    for (step, bit) in info.iter().copied().chain(tail).enumerate() {
        let reg = ((bit as u32 & 1) << (k - 1)) | state;
        let o = spec.outputs(reg);
        for (j, &c) in o.iter().enumerate() {
            if spec.kept(step, j) {
                out.push(c);
            }
        }
        state = reg >> 1;
    }
    Ok(out)
}

/// Expands punctured LLRs to one `[A, B]` pair per trellis step, with zero
/// (erasure) at punctured positions.
pub fn depuncture(spec: &CodecSpec, llrs: &[f64], info_len: usize) -> Result<Vec<[f64; 2]>, FecError> {
    let expected = spec.coded_len(info_len);
    if llrs.len() != expected {
        return Err(FecError::LengthMismatch {
            expected,
            got: llrs.len(),
        });
    }
    let steps = info_len + spec.tail_bits();
    let mut it = llrs.iter();
    Ok((0..steps)
        .map(|step| {
            let mut pair = [0.0; 2];
            for (j, p) in pair.iter_mut().enumerate() {
                if spec.kept(step, j) {
                    *p = *it.next().expect("length checked above");
                }
            }
            pair
        })
        .collect())
}

/// Soft-input Viterbi decoding of a terminated, punctured frame.
///
/// LLRs are positive for bit 1. The path metric maximizes
/// `sum (+-llr / 2)` over the hypothesized coded bits; the trellis starts and
/// ends in the zero state. Ties prefer the predecessor whose oldest register
/// bit is 0.
pub fn viterbi_soft(spec: &CodecSpec, llrs: &[f64], info_len: usize) -> Result<Vec<u8>, FecError> {
    spec.validate()?;
    if info_len == 0 {
        return Err(FecError::EmptyInput);
    }
    let steps = depuncture(spec, llrs, info_len)?;
    let k = spec.constraint_length;
    let n_states = 1usize << (k - 1);
    let mask = n_states - 1;
    // branch outputs indexed by the K-bit register
    let outs: Vec<[u8; 2]> = (0..(1u32 << k)).map(|reg| spec.outputs(reg)).collect();
    let mut metric = vec![f64::NEG_INFINITY; n_states];
    let mut next = vec![f64::NEG_INFINITY; n_states];
    metric[0] = 0.0;
    let mut decisions: Vec<u64> = Vec::with_capacity(steps.len());
    for pair in &steps {
        let half = [0.5 * pair[0], 0.5 * pair[1]];
        let bm = |reg: usize| {
            let o = outs[reg];
            let a = if o[0] == 1 { half[0] } else { -half[0] };
            let b = if o[1] == 1 { half[1] } else { -half[1] };
            a + b
        };
        let mut word = 0u64;
        for (s_next, nm) in next.iter_mut().enumerate() {
            let input = s_next >> (k - 2);
            let base = (s_next << 1) & mask;
            let (p0, p1) = (base, base | 1);
            let reg0 = (input << (k - 1)) | p0;
            let reg1 = (input << (k - 1)) | p1;
            let m0 = metric[p0] + bm(reg0);
            let m1 = metric[p1] + bm(reg1);
            if m1 > m0 {
                *nm = m1;
                word |= 1 << s_next;
            } else {
                *nm = m0;
            }
        }
        decisions.push(word);
        core::mem::swap(&mut metric, &mut next);
    }
    let mut state = 0usize;
    let mut bits = vec![0u8; decisions.len()];
    for (t, word) in decisions.iter().enumerate().rev() {
        bits[t] = (state >> (k - 2)) as u8 & 1;
        let low = ((word >> state) & 1) as usize;
        state = ((state << 1) & mask) | low;
    }
    bits.truncate(info_len);
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coded_length_formula() {
        let spec = CodecSpec::rate_3_4();
        for info in 1..40usize {
            let n = info + 6;
            assert_eq!(spec.coded_len(info), (4 * n).div_ceil(3), "info = {info}");
        }
        assert_eq!(spec.coded_len(894), 1200);
        assert_eq!(spec.max_info_len(1200), 894);
        assert_eq!(CodecSpec::rate_1_2().coded_len(10), 32);
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let spec = CodecSpec::default();
        let out = encode(&spec, &[0; 30]).unwrap();
        assert_eq!(out.len(), spec.coded_len(30));
        assert!(out.iter().all(|&b| b == 0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = CodecSpec::default();
        assert_eq!(encode(&spec, &[]), Err(FecError::EmptyInput));
        assert_eq!(
            viterbi_soft(&spec, &[0.0; 5], 3),
            Err(FecError::LengthMismatch { expected: 12, got: 5 })
        );
        let bad = CodecSpec {
            constraint_length: 9,
            ..CodecSpec::default()
        };
        assert!(encode(&bad, &[1]).is_err());
        let bad = CodecSpec {
            puncture_pattern: [vec![false], vec![false]],
            ..CodecSpec::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn all_zero_llrs_decode_to_something() {
        let spec = CodecSpec::default();
        let n = spec.coded_len(20);
        let bits = viterbi_soft(&spec, &vec![0.0; n], 20).unwrap();
        assert_eq!(bits.len(), 20);
    }
}
