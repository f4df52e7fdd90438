//! Monte-Carlo link-level simulation.
//!
//! A frame is one channel realization held constant over `ofdm_symbols`
//! OFDM symbols of `subcarriers` tones. Every user encodes one codeword per
//! frame; coded bits fill that user's symbols subcarrier by subcarrier, then
//! symbol by symbol, without interleaving. The codeword carries the largest
//! information block that fits and is zero-padded to the frame.
//!
//! SNR axis: `snr_db` is the receive SNR per antenna with unit average
//! channel gain and all `U` users transmitting, so `No = U Es / 10^(snr/10)`.
//!
//! Frame `t` draws its channel, bits and noise from streams derived from
//! `(master_seed, t)`, so all equalizers and all SNR points see the same
//! channels and bits, and the noise at a given SNR point is shared between
//! equalizers. Results do not depend on the worker count.

use std::num::NonZeroUsize;
use std::time::Instant;

use fameeq_core::channel::{apply_power_control, geometric, rayleigh_iid, transmit, ChannelRealization, LinkNoise};
use fameeq_core::equalize::{fame_fbs_equalizer, flmmse_from_lmmse, lmmse, EqualizeError, UnbiasedRow};
use fameeq_core::fec::{encode, viterbi_soft, CodecSpec};
use fameeq_core::modem::{Constellation, LlrMethod};
use fameeq_core::numerics::CVector;
use fameeq_core::rng::{derive_rng, Purpose};
use fameeq_core::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, EqualizerSpec, SimConfig};

/// NPI variances below `NU_SQ_FLOOR * Es` are raised to it before demapping.
/// Only reachable with (near) noiseless links, where the LLRs saturate anyway.
pub const NU_SQ_FLOOR: f64 = 1e-12;

/// Runtime failures of the simulator.
#[derive(Debug, Error)]
pub enum SimError {
    /// The configuration is inconsistent.
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// A library call failed outside the per-user degeneracy path.
    #[error("{context}: {message}")]
    Library {
        /// What was being computed.
        context: &'static str,
        /// Underlying error.
        message: String,
    },
    /// The worker pool could not be created.
    #[error("thread pool: {0}")]
    Pool(String),
}

fn lib_err<E: std::fmt::Display>(context: &'static str) -> impl Fn(E) -> SimError {
    move |e| SimError::Library {
        context,
        message: e.to_string(),
    }
}

/// Noise variance for `snr_db` on the simulation axis.
pub fn snr_to_no(snr_db: f64, es: f64, users: usize) -> f64 {
    users as f64 * es / 10f64.powf(snr_db / 10.0)
}

/// Codec, constellation and frame geometry derived from a config.
#[derive(Debug, Clone)]
pub struct FrameLayout {
    /// Channel code.
    pub codec: CodecSpec,
    /// Constellation with `Es = 1`.
    pub constellation: Constellation,
    /// Coded bits each user sends per frame.
    pub coded_bits: usize,
    /// Information bits per user per frame.
    pub info_bits: usize,
    /// Symbols per user per frame.
    pub symbols: usize,
}

impl FrameLayout {
    /// Layout for `cfg`.
    pub fn new(cfg: &SimConfig) -> Self {
        let codec = CodecSpec::rate_3_4();
        let constellation = cfg.modulation.constellation();
        let coded_bits = cfg.coded_bits_per_user();
        Self {
            info_bits: codec.max_info_len(coded_bits),
            symbols: coded_bits / constellation.bits_per_symbol(),
            codec,
            constellation,
            coded_bits,
        }
    }
}

/// Equalizer-independent contents of one frame at one SNR point.
#[derive(Debug, Clone)]
pub struct Frame {
    /// Channel, one matrix per subcarrier.
    pub channel: ChannelRealization,
    /// Noise statistics.
    pub noise: LinkNoise,
    /// Information bits per user.
    pub info: Vec<Vec<u8>>,
    /// Received vectors, indexed `ofdm_symbol * W + subcarrier`.
    pub received: Vec<CVector>,
}

/// Draws the channel of trial `trial` (including power control).
pub fn draw_channel(cfg: &SimConfig, trial: u64) -> Result<ChannelRealization, SimError> {
    let mut rng = derive_rng(cfg.master_seed, trial, Purpose::Channel);
    let (b, u, w) = (cfg.antennas.get(), cfg.users.get(), cfg.subcarriers.get());
    let mut ch = match cfg.channel.geometric_params() {
        None => rayleigh_iid(b, u, w, &mut rng),
        Some(p) => geometric(b, u, w, &p, &mut rng).map_err(lib_err("channel"))?,
    };
    apply_power_control(&mut ch, cfg.channel.power_control_db, &mut rng);
    Ok(ch)
}

impl Frame {
    /// Generates trial `trial` at SNR point `snr_index`.
    pub fn generate(cfg: &SimConfig, layout: &FrameLayout, trial: u64, snr_index: usize) -> Result<Self, SimError> {
        let channel = draw_channel(cfg, trial)?;
        let users = cfg.users.get();
        let w = cfg.subcarriers.get();
        let es = layout.constellation.es();
        let snr = cfg.snr_db.as_slice()[snr_index];
        let noise = LinkNoise::new(es, snr_to_no(snr, es, users)).map_err(lib_err("noise"))?;

        let mut bit_rng = derive_rng(cfg.master_seed, trial, Purpose::Bits);
        let info: Vec<Vec<u8>> = (0..users)
            .map(|_| (0..layout.info_bits).map(|_| bit_rng.random_range(0..2u8)).collect())
            .collect();
        let mut tx = Vec::with_capacity(users);
        for bits in &info {
            let mut coded = encode(&layout.codec, bits).map_err(lib_err("encode"))?;
            coded.resize(layout.coded_bits, 0);
            tx.push(layout.constellation.map_bits(&coded).map_err(lib_err("map"))?);
        }

        let tag = u16::try_from(snr_index).map_err(|_| SimError::Config(ConfigError::Invalid("too many SNR points".into())))?;
        let mut noise_rng = derive_rng(cfg.master_seed, trial, Purpose::Noise(tag));
        let received = (0..layout.symbols)
            .map(|k| {
                let s: Vec<Complex64> = tx.iter().map(|t| t[k]).collect();
                transmit(channel.matrix(k % w), &s, &noise, &mut noise_rng)
            })
            .collect::<Result<_, _>>()
            .map_err(lib_err("transmit"))?;
        Ok(Self {
            channel,
            noise,
            info,
            received,
        })
    }

    /// Equalizer rows for every subcarrier; entry `[w][u]`.
    pub fn equalizer_rows(&self, eq: &EqualizerSpec) -> Result<Vec<Vec<Result<UnbiasedRow, EqualizeError>>>, SimError> {
        let rho = self.noise.rho();
        self.channel
            .matrices()
            .iter()
            .map(|h| {
                let users = h.cols();
                Ok(match eq {
                    EqualizerSpec::LmmseInf => {
                        let l = lmmse(h, rho).map_err(lib_err("L-MMSE"))?;
                        (0..users).map(|u| l.unbiased_row(h, &self.noise, u)).collect()
                    }
                    EqualizerSpec::Flmmse { bits } => {
                        let l = lmmse(h, rho).map_err(lib_err("L-MMSE"))?;
                        let fl = flmmse_from_lmmse(h, &self.noise, &l, bits.get()).map_err(lib_err("FL-MMSE"))?;
                        fl.rows.into_iter().map(|r| r.map(|r| r.row)).collect()
                    }
                    EqualizerSpec::FameFbs { bits, .. } => {
                        let sched = eq.fbs_params().expect("FBS spec").schedule();
                        let fbs = fame_fbs_equalizer(h, &self.noise, bits.get(), &sched).map_err(lib_err("FAME-FBS"))?;
                        fbs.rows.into_iter().map(|r| r.map(|r| r.row)).collect()
                    }
                })
            })
            .collect()
    }

    /// Equalizes, demaps and decodes every user with `eq`.
    pub fn decode(&self, layout: &FrameLayout, eq: &EqualizerSpec) -> Result<Vec<UserOutcome>, SimError> {
        let rows = self.equalizer_rows(eq)?;
        let w = rows.len();
        let q = layout.constellation.bits_per_symbol();
        let floor = NU_SQ_FLOOR * layout.constellation.es();
        let coded_len = layout.codec.coded_len(layout.info_bits);
        let mut out = Vec::with_capacity(self.info.len());
        let mut llrs = vec![0.0; layout.coded_bits];
        for (u, info) in self.info.iter().enumerate() {
            let mut degenerate = false;
            for (k, y) in self.received.iter().enumerate() {
                match &rows[k % w][u] {
                    Ok(row) => layout
                        .constellation
                        .soft_demap_into(row.estimate(y), row.nu_sq.max(floor), LlrMethod::Exact, &mut llrs[k * q..(k + 1) * q])
                        .map_err(lib_err("demap"))?,
                    Err(EqualizeError::DegenerateDirection { .. }) => {
                        degenerate = true;
                        break;
                    }
                    Err(e) => return Err(lib_err("equalizer row")(e)),
                }
            }
            let decoded = if degenerate {
                None
            } else {
                Some(viterbi_soft(&layout.codec, &llrs[..coded_len], layout.info_bits).map_err(lib_err("decode"))?)
            };
            out.push(UserOutcome {
                info: info.clone(),
                decoded,
            });
        }
        Ok(out)
    }
}

/// Transmitted and decoded bits of one user in one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserOutcome {
    /// Information bits.
    pub info: Vec<u8>,
    /// Decoder output; `None` when the equalizer row was degenerate.
    pub decoded: Option<Vec<u8>>,
}

impl UserOutcome {
    /// Bit errors, counting every bit of a degenerate user as wrong.
    pub fn bit_errors(&self) -> u64 {
        match &self.decoded {
            Some(d) => self.info.iter().zip(d).filter(|(a, b)| a != b).count() as u64,
            None => self.info.len() as u64,
        }
    }
}

/// One frame of the pipeline for a single equalizer.
pub fn run_frame(cfg: &SimConfig, eq: &EqualizerSpec, snr_index: usize, trial: u64) -> Result<Vec<UserOutcome>, SimError> {
    let layout = FrameLayout::new(cfg);
    Frame::generate(cfg, &layout, trial, snr_index)?.decode(&layout, eq)
}

/// Error counts, summed over frames.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    /// Frames simulated.
    pub frames: u64,
    /// Wrong information bits.
    pub bit_errors: u64,
    /// Information bits sent.
    pub bits_counted: u64,
    /// Codewords with at least one wrong bit.
    pub codeword_errors: u64,
    /// Codewords sent (`frames * U`).
    pub codewords: u64,
    /// User-frames lost to a degenerate equalizer row.
    pub degenerate: u64,
}

impl Counts {
    /// Counts of one frame.
    pub fn from_frame(outcomes: &[UserOutcome]) -> Self {
        let mut c = Counts {
            frames: 1,
            ..Self::default()
        };
        for o in outcomes {
            let e = o.bit_errors();
            c.bit_errors += e;
            c.bits_counted += o.info.len() as u64;
            c.codeword_errors += (e > 0) as u64;
            c.codewords += 1;
            c.degenerate += o.decoded.is_none() as u64;
        }
        c
    }
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Self) {
        self.frames += o.frames;
        self.bit_errors += o.bit_errors;
        self.bits_counted += o.bits_counted;
        self.codeword_errors += o.codeword_errors;
        self.codewords += o.codewords;
        self.degenerate += o.degenerate;
    }
}

/// Result for one equalizer at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResult {
    /// SNR in dB.
    pub snr_db: f64,
    /// Equalizer name.
    pub equalizer: &'static str,
    /// Resolution, `None` for infinite precision.
    pub bits: Option<u32>,
    /// Position of the equalizer in the config.
    pub equalizer_index: usize,
    /// Raw counts.
    #[serde(flatten)]
    pub counts: Counts,
}

impl PointResult {
    /// `bit_errors / bits_counted`.
    pub fn ber(&self) -> f64 {
        ratio(self.counts.bit_errors, self.counts.bits_counted)
    }

    /// Codeword error rate.
    pub fn fer(&self) -> f64 {
        ratio(self.counts.codeword_errors, self.counts.codewords)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Outcome of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct BerReport {
    /// Master seed.
    pub seed: u64,
    /// Configuration echo.
    pub config: SimConfig,
    /// Information bits per user per frame.
    pub info_bits_per_user: usize,
    /// Workers used.
    pub threads: usize,
    /// Wall-clock time in seconds.
    pub wall_time_s: f64,
    /// SNR-major, then in config order.
    pub points: Vec<PointResult>,
}

/// Exact CSV header.
pub const CSV_HEADER: &str = "snr_db,equalizer,bits,ber,fer,bit_errors,bits_counted,frames";

impl BerReport {
    /// CSV text, one row per SNR point and equalizer.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for p in &self.points {
            let bits = p.bits.map_or_else(|| "inf".to_string(), |b| b.to_string());
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                p.snr_db,
                p.equalizer,
                bits,
                p.ber(),
                p.fer(),
                p.counts.bit_errors,
                p.counts.bits_counted,
                p.counts.frames
            ));
        }
        s
    }

    /// Pretty JSON including the config echo.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report is serializable");
        if let Some(points) = v.get_mut("points").and_then(|p| p.as_array_mut()) {
            for (p, r) in points.iter_mut().zip(&self.points) {
                p["ber"] = r.ber().into();
                p["fer"] = r.fer().into();
            }
        }
        serde_json::to_string_pretty(&v).expect("report is serializable")
    }

    /// `(snr_db, ber)` pairs of equalizer `index`.
    pub fn curve(&self, index: usize) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.equalizer_index == index)
            .map(|p| (p.snr_db, p.ber()))
            .collect()
    }
}

/// How frames are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Current thread only.
    Serial,
    /// Rayon pool with the given number of workers.
    Parallel(NonZeroUsize),
}

impl Execution {
    /// Worker count.
    pub fn threads(self) -> usize {
        match self {
            Execution::Serial => 1,
            Execution::Parallel(n) => n.get(),
        }
    }
}

/// Worker count: `FAMEEQ_THREADS` caps the configured or available count.
pub fn resolve_threads(configured: Option<NonZeroUsize>) -> NonZeroUsize {
    let base = configured
        .or_else(|| std::thread::available_parallelism().ok())
        .unwrap_or(NonZeroUsize::MIN);
    let cap = std::env::var("FAMEEQ_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<NonZeroUsize>().ok());
    match cap {
        Some(c) => base.min(c),
        None => base,
    }
}

/// Sweeps with the default worker count.
pub fn sweep(cfg: &SimConfig) -> Result<BerReport, SimError> {
    sweep_with(cfg, Execution::Parallel(resolve_threads(None)))
}

/// Sweeps every SNR point, stopping each equalizer independently.
///
/// Frames run in batches of `stop.batch_frames` and the stop rule is checked
/// between batches, so counts are identical for any worker count.
pub fn sweep_with(cfg: &SimConfig, exec: Execution) -> Result<BerReport, SimError> {
    cfg.validate()?;
    let start = Instant::now();
    let pool = match exec {
        Execution::Serial => None,
        Execution::Parallel(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.get())
                .build()
                .map_err(|e| SimError::Pool(e.to_string()))?,
        ),
    };
    let layout = FrameLayout::new(cfg);
    let n_eq = cfg.equalizers.len();
    let mut retired = vec![false; n_eq];
    let mut points = Vec::new();
    for (si, &snr) in cfg.snr_db.as_slice().iter().enumerate() {
        let mut counts = vec![Counts::default(); n_eq];
        let mut active: Vec<usize> = (0..n_eq).filter(|&e| !retired[e]).collect();
        let mut next_trial = 0u64;
        let max_frames = cfg.stop.max_frames.get() as u64;
        while !active.is_empty() {
            let end = (next_trial + cfg.stop.batch_frames.get() as u64).min(max_frames);
            let run = |t: u64| -> Result<Vec<Counts>, SimError> {
                let frame = Frame::generate(cfg, &layout, t, si)?;
                active
                    .iter()
                    .map(|&e| Ok(Counts::from_frame(&frame.decode(&layout, &cfg.equalizers[e])?)))
                    .collect()
            };
            let batch: Vec<Vec<Counts>> = match &pool {
                None => (next_trial..end).map(run).collect::<Result<_, _>>()?,
                Some(p) => p.install(|| (next_trial..end).into_par_iter().map(run).collect::<Result<_, _>>())?,
            };
            for frame in batch {
                for (&e, c) in active.iter().zip(frame) {
                    counts[e] += c;
                }
            }
            next_trial = end;
            active.retain(|&e| next_trial < max_frames && counts[e].bit_errors < cfg.stop.min_bit_errors);
        }
        for (e, eq) in cfg.equalizers.iter().enumerate() {
            if retired[e] {
                continue;
            }
            let p = PointResult {
                snr_db: snr,
                equalizer: eq.name(),
                bits: eq.bits(),
                equalizer_index: e,
                counts: counts[e],
            };
            if let Some(floor) = cfg.stop.ber_floor {
                retired[e] = p.ber() < floor;
            }
            points.push(p);
        }
    }
    Ok(BerReport {
        seed: cfg.master_seed,
        config: cfg.clone(),
        info_bits_per_user: layout.info_bits,
        threads: exec.threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
        points,
    })
}

/// SNR where a BER curve crosses `target`, interpolating `log10(ber)`
/// linearly between the first bracketing pair of points.
pub fn snr_at_ber(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    let mut c: Vec<(f64, f64)> = curve.to_vec();
    c.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in c.windows(2) {
        let ((s0, b0), (s1, b1)) = (pair[0], pair[1]);
        if b0 >= target && b1 < target {
            if b1 <= 0.0 {
                return None;
            }
            let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
            return Some(s0 + (s1 - s0) * (l0 - lt) / (l0 - l1));
        }
    }
    None
}

/// One-sided two-proportion z statistic for `k1/n1 > k2/n2`.
pub fn two_proportion_z(k1: u64, n1: u64, k2: u64, n2: u64) -> f64 {
    let (p1, p2) = (k1 as f64 / n1 as f64, k2 as f64 / n2 as f64);
    let p = (k1 + k2) as f64 / (n1 + n2) as f64;
    let se = (p * (1.0 - p) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        0.0
    } else {
        (p1 - p2) / se
    }
}
