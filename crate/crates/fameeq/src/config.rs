//! TOML configuration.
//!
//! A config file has a few top-level keys and one table per tool:
//!
//! ```toml
//! seed = 1
//! threads = 4            # optional worker cap
//!
//! [sim]
//! antennas = 256
//! users = 16
//! subcarriers = 300
//! ofdm_symbols = 1
//! modulation = "qam16"   # or "qpsk"
//! snr_db = [0.0, 1.0, 2.0]
//!
//! [sim.channel]
//! model = "rayleigh"     # "geo_los", "geo_nlos"
//! power_control_db = 3.0
//!
//! [sim.stop]
//! min_bit_errors = 500
//! max_frames = 2000
//! batch_frames = 8
//!
//! [[sim.equalizer]]
//! kind = "lmmse_inf"
//!
//! [[sim.equalizer]]
//! kind = "fame_fbs"
//! bits = 3
//! t_max = 5
//! init = "mrc"
//!
//! [mse_check]
//! [oracle_gap]
//! ```
//!
//! Every field has a default, so an empty file is valid. Type and range
//! errors are reported with the line and column of the offending value.

use std::fmt;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use fameeq_core::channel::GeometricChannelParams;
use fameeq_core::equalize::{FbsInit, FbsSchedule, ProxSchedule, StepSize, MAX_BITS};
use fameeq_core::modem::Constellation;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Configuration errors. All of them map to exit code 2.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// The file could not be read.
    #[error("cannot read config {path}: {source}")]
    Io {
        /// Offending path.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// Syntax, type or range error; the message carries the location.
    #[error("{path}: {message}")]
    Parse {
        /// Offending path, or `<inline>` for strings.
        path: String,
        /// Location-anchored description.
        message: String,
    },
    /// A value that only fails in combination with others.
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Resolution in bits, `1..=8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Bits(u32);

impl Bits {
    /// Wraps `b` if it is a supported resolution.
    pub fn new(b: u32) -> Result<Self, String> {
        if (1..=MAX_BITS).contains(&b) {
            Ok(Self(b))
        } else {
            Err(format!("bits must be in 1..={MAX_BITS}, got {b}"))
        }
    }

    /// The raw bit count.
    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Bits {
    type Error = String;
    fn try_from(b: u32) -> Result<Self, String> {
        Self::new(b)
    }
}

impl From<Bits> for u32 {
    fn from(b: Bits) -> u32 {
        b.0
    }
}

/// Non-empty list of finite SNR points in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SnrList(Vec<f64>);

impl SnrList {
    /// Validates `v`.
    pub fn new(v: Vec<f64>) -> Result<Self, String> {
        if v.is_empty() {
            return Err("snr_db must not be empty".into());
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err("snr_db values must be finite".into());
        }
        Ok(Self(v))
    }

    /// The points.
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for SnrList {
    type Error = String;
    fn try_from(v: Vec<f64>) -> Result<Self, String> {
        Self::new(v)
    }
}

impl From<SnrList> for Vec<f64> {
    fn from(s: SnrList) -> Vec<f64> {
        s.0
    }
}

/// Modulation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    /// Gray-labelled 16-QAM.
    #[default]
    Qam16,
    /// Gray-labelled QPSK.
    Qpsk,
}

impl Modulation {
    /// Constellation with unit average symbol energy.
    pub fn constellation(self) -> Constellation {
        match self {
            Modulation::Qam16 => Constellation::qam16(1.0),
            Modulation::Qpsk => Constellation::qpsk(1.0),
        }
        .expect("unit energy is valid")
    }
}

/// Channel generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    /// I.i.d. Rayleigh fading, independent across subcarriers.
    #[default]
    Rayleigh,
    /// Clustered plane waves with a dominant line-of-sight path.
    GeoLos,
    /// Clustered plane waves without line of sight.
    GeoNlos,
}

/// `[sim.channel]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    /// Generator.
    pub model: ChannelModel,
    /// Per-user receive power is drawn uniformly in `+-power_control_db`.
    pub power_control_db: f64,
    /// Geometric model: clusters per user.
    pub num_clusters: Option<usize>,
    /// Geometric model: rays per cluster.
    pub rays_per_cluster: Option<usize>,
    /// Geometric model: angular spread of rays within a cluster.
    pub angle_spread_deg: Option<f64>,
    /// Geometric model: width of the user sector.
    pub sector_deg: Option<f64>,
    /// Geometric model: cluster delay spread in samples.
    pub delay_spread_samples: Option<f64>,
    /// Geometric model: power decay per cluster.
    pub per_cluster_power_decay_db: Option<f64>,
    /// Geometric model: element spacing in wavelengths.
    pub antenna_spacing: Option<f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            model: ChannelModel::Rayleigh,
            power_control_db: 3.0,
            num_clusters: None,
            rays_per_cluster: None,
            angle_spread_deg: None,
            sector_deg: None,
            delay_spread_samples: None,
            per_cluster_power_decay_db: None,
            antenna_spacing: None,
        }
    }
}

impl ChannelConfig {
    /// Geometric parameters with overrides applied; `None` for Rayleigh.
    pub fn geometric_params(&self) -> Option<GeometricChannelParams> {
        let mut p = match self.model {
            ChannelModel::Rayleigh => return None,
            ChannelModel::GeoLos => GeometricChannelParams::los(),
            ChannelModel::GeoNlos => GeometricChannelParams::non_los(),
        };
        if let Some(v) = self.num_clusters {
            p.num_clusters = v;
        }
        if let Some(v) = self.rays_per_cluster {
            p.rays_per_cluster = v;
        }
        if let Some(v) = self.angle_spread_deg {
            p.angle_spread_deg = v;
        }
        if let Some(v) = self.sector_deg {
            p.sector_deg = v;
        }
        if let Some(v) = self.delay_spread_samples {
            p.delay_spread_samples = v;
        }
        if let Some(v) = self.per_cluster_power_decay_db {
            p.per_cluster_power_decay_db = v;
        }
        if let Some(v) = self.antenna_spacing {
            p.antenna_spacing = v;
        }
        Some(p)
    }
}

/// `[sim.stop]`: per SNR point and equalizer, frames run until
/// `min_bit_errors` is reached or `max_frames` have been simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StopRule {
    /// Bit errors to collect before stopping.
    pub min_bit_errors: u64,
    /// Hard cap on frames.
    pub max_frames: NonZeroUsize,
    /// Frames simulated between stop checks. Fixed so results do not depend
    /// on the worker count.
    pub batch_frames: NonZeroUsize,
    /// Once an equalizer's BER at some point falls below this value, later
    /// (higher) SNR points are skipped for it.
    pub ber_floor: Option<f64>,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_bit_errors: 500,
            max_frames: NonZeroUsize::new(1000).unwrap(),
            batch_frames: NonZeroUsize::new(8).unwrap(),
            ber_floor: None,
        }
    }
}

/// FBS initializer as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    /// Maximum-ratio combining.
    #[default]
    Mrc,
    /// Quantized L-MMSE row.
    Flmmse,
}

/// FBS parameters; omitted lists fall back to the automatic schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FbsParams {
    /// Iterations.
    pub t_max: usize,
    /// Initializer.
    pub init: InitName,
    /// Signal weights (one value broadcasts).
    pub gamma: Vec<f64>,
    /// Absolute step sizes.
    pub tau: Option<Vec<f64>>,
    /// Step sizes as multiples of `1 / lambda_max(H H^H)`; used when `tau`
    /// is absent. Both absent means a multiple of one.
    pub tau_scale: Option<Vec<f64>>,
    /// Prox sharpness; geometric ramp to `2^bits` when absent.
    pub eta: Option<Vec<f64>>,
}

impl Default for FbsParams {
    fn default() -> Self {
        Self {
            t_max: 5,
            init: InitName::Mrc,
            gamma: vec![2.0],
            tau: None,
            tau_scale: None,
            eta: None,
        }
    }
}

impl FbsParams {
    /// The core schedule.
    pub fn schedule(&self) -> FbsSchedule {
        FbsSchedule {
            tau: match (&self.tau, &self.tau_scale) {
                (Some(t), _) => StepSize::Fixed(t.clone()),
                (None, Some(r)) => StepSize::Relative(r.clone()),
                (None, None) => StepSize::Auto,
            },
            eta: self.eta.clone().map_or(ProxSchedule::Auto, ProxSchedule::Fixed),
            gamma: self.gamma.clone(),
            t_max: self.t_max,
            init: match self.init {
                InitName::Mrc => FbsInit::Mrc,
                InitName::Flmmse => FbsInit::Flmmse,
            },
        }
    }
}

/// One equalizer under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EqualizerSpec {
    /// Infinite-precision L-MMSE.
    #[serde(alias = "LMMSE_INF")]
    LmmseInf,
    /// Quantized L-MMSE rows.
    #[serde(alias = "FLMMSE")]
    Flmmse {
        /// Resolution.
        bits: Bits,
    },
    /// Forward-backward splitting.
    #[serde(alias = "FAME_FBS")]
    FameFbs {
        /// Resolution.
        bits: Bits,
        /// Iterations.
        #[serde(default = "default_t_max")]
        t_max: usize,
        /// Initializer.
        #[serde(default)]
        init: InitName,
        /// Signal weights.
        #[serde(default = "default_gamma")]
        gamma: Vec<f64>,
        /// Step sizes.
        #[serde(default)]
        tau: Option<Vec<f64>>,
        /// Relative step sizes.
        #[serde(default)]
        tau_scale: Option<Vec<f64>>,
        /// Prox sharpness.
        #[serde(default)]
        eta: Option<Vec<f64>>,
    },
}

fn default_t_max() -> usize {
    5
}

fn default_gamma() -> Vec<f64> {
    vec![2.0]
}

impl EqualizerSpec {
    /// Name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            EqualizerSpec::LmmseInf => "LMMSE_INF",
            EqualizerSpec::Flmmse { .. } => "FLMMSE",
            EqualizerSpec::FameFbs { .. } => "FAME_FBS",
        }
    }

    /// Resolution, `None` for infinite precision.
    pub fn bits(&self) -> Option<u32> {
        match self {
            EqualizerSpec::LmmseInf => None,
            EqualizerSpec::Flmmse { bits } | EqualizerSpec::FameFbs { bits, .. } => Some(bits.get()),
        }
    }

    /// FBS with the default schedule.
    pub fn fbs(bits: u32) -> Self {
        Self::fbs_with(bits, FbsParams::default())
    }

    /// FBS with explicit parameters.
    pub fn fbs_with(bits: u32, p: FbsParams) -> Self {
        EqualizerSpec::FameFbs {
            bits: Bits::new(bits).expect("valid resolution"),
            t_max: p.t_max,
            init: p.init,
            gamma: p.gamma,
            tau: p.tau,
            tau_scale: p.tau_scale,
            eta: p.eta,
        }
    }

    /// FL-MMSE at `bits`.
    pub fn flmmse(bits: u32) -> Self {
        EqualizerSpec::Flmmse {
            bits: Bits::new(bits).expect("valid resolution"),
        }
    }

    /// FBS parameters, if this is FBS.
    pub fn fbs_params(&self) -> Option<FbsParams> {
        match self {
            EqualizerSpec::FameFbs {
                t_max,
                init,
                gamma,
                tau,
                tau_scale,
                eta,
                ..
            } => Some(FbsParams {
                t_max: *t_max,
                init: *init,
                gamma: gamma.clone(),
                tau: tau.clone(),
                tau_scale: tau_scale.clone(),
                eta: eta.clone(),
            }),
            _ => None,
        }
    }

    /// Parses the `name[,bits]` form used on the command line.
    pub fn parse_flag(s: &str) -> Result<Self, String> {
        let (name, bits) = match s.split_once(',') {
            Some((n, b)) => {
                let b: u32 = b.trim().parse().map_err(|_| format!("bad bit count in {s:?}"))?;
                (n.trim(), Some(Bits::new(b)?))
            }
            None => (s.trim(), None),
        };
        let norm = name.to_ascii_lowercase().replace('-', "_");
        match (norm.as_str(), bits) {
            ("lmmse_inf" | "lmmse", None) => Ok(EqualizerSpec::LmmseInf),
            ("lmmse_inf" | "lmmse", Some(_)) => Err("LMMSE_INF takes no bit count".into()),
            ("flmmse", Some(bits)) => Ok(EqualizerSpec::Flmmse { bits }),
            ("fame_fbs" | "fbs", Some(bits)) => Ok(Self::fbs(bits.get())),
            ("flmmse" | "fame_fbs" | "fbs", None) => Err(format!("{name} needs a bit count, e.g. {name},3")),
            _ => Err(format!("unknown equalizer {name:?}")),
        }
    }
}

impl fmt::Display for EqualizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bits() {
            Some(b) => write!(f, "{}({b})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// Link-level simulation parameters (`[sim]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Master seed; set from the top-level `seed`.
    #[serde(skip)]
    pub master_seed: u64,
    /// Basestation antennas `B`.
    pub antennas: NonZeroUsize,
    /// Single-antenna users `U`.
    pub users: NonZeroUsize,
    /// Subcarriers `W`.
    pub subcarriers: NonZeroUsize,
    /// OFDM symbols per frame; each user's codeword spans all of them.
    pub ofdm_symbols: NonZeroUsize,
    /// Modulation.
    pub modulation: Modulation,
    /// SNR points in dB (see [`crate::simkit::snr_to_no`]).
    pub snr_db: SnrList,
    /// Channel generator.
    pub channel: ChannelConfig,
    /// Stopping rule.
    pub stop: StopRule,
    /// Equalizers under test.
    #[serde(rename = "equalizer")]
    pub equalizers: Vec<EqualizerSpec>,
}

impl Default for SimConfig {
    fn default() -> Self {
        let nz = |n| NonZeroUsize::new(n).unwrap();
        Self {
            master_seed: 1,
            antennas: nz(256),
            users: nz(16),
            subcarriers: nz(300),
            ofdm_symbols: nz(1),
            modulation: Modulation::Qam16,
            snr_db: SnrList::new(vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap(),
            channel: ChannelConfig::default(),
            stop: StopRule::default(),
            equalizers: vec![EqualizerSpec::LmmseInf, EqualizerSpec::flmmse(3), EqualizerSpec::fbs(3)],
        }
    }
}

impl SimConfig {
    /// Cross-field checks that serde cannot express.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.equalizers.is_empty() {
            return Err(ConfigError::Invalid("at least one [[sim.equalizer]] is required".into()));
        }
        for e in &self.equalizers {
            if let Some(p) = e.fbs_params() {
                if p.tau.is_some() && p.tau_scale.is_some() {
                    return Err(ConfigError::Invalid(format!("{e}: set tau or tau_scale, not both")));
                }
                p.schedule()
                    .validate()
                    .map_err(|err| ConfigError::Invalid(format!("{e}: {err}")))?;
            }
        }
        if !(self.channel.power_control_db >= 0.0 && self.channel.power_control_db.is_finite()) {
            return Err(ConfigError::Invalid("power_control_db must be finite and >= 0".into()));
        }
        if let Some(p) = self.channel.geometric_params() {
            p.validate()
                .map_err(|err| ConfigError::Invalid(format!("channel: {err}")))?;
        }
        if let Some(f) = self.stop.ber_floor {
            if !(f > 0.0 && f < 1.0) {
                return Err(ConfigError::Invalid("ber_floor must be in (0, 1)".into()));
            }
        }
        let coded = self.coded_bits_per_user();
        if coded < 4 * 7 {
            return Err(ConfigError::Invalid(format!(
                "a frame carries only {coded} coded bits per user, too few for one terminated codeword"
            )));
        }
        Ok(())
    }

    /// Coded bits each user transmits per frame.
    pub fn coded_bits_per_user(&self) -> usize {
        self.subcarriers.get() * self.ofdm_symbols.get() * self.modulation.constellation().bits_per_symbol()
    }
}

/// `[mse_check]`: analytic versus Monte-Carlo NPI variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MseCheckConfig {
    /// Random `(H, x, rho)` instances.
    pub instances: NonZeroUsize,
    /// Monte-Carlo draws per instance.
    pub draws: NonZeroUsize,
    /// Antennas.
    pub antennas: NonZeroUsize,
    /// Users.
    pub users: NonZeroUsize,
    /// Allowed relative deviation.
    pub tolerance: f64,
    /// Append a single-user instance with vanishing noise.
    pub include_noiseless: bool,
}

impl Default for MseCheckConfig {
    fn default() -> Self {
        let nz = |n| NonZeroUsize::new(n).unwrap();
        Self {
            instances: nz(20),
            draws: nz(100_000),
            antennas: nz(16),
            users: nz(4),
            tolerance: 0.03,
            include_noiseless: true,
        }
    }
}

/// `[oracle_gap]`: heuristics versus exhaustive search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleGapConfig {
    /// Random channel instances.
    pub instances: NonZeroUsize,
    /// Antennas (keep small; the search is exponential).
    pub antennas: NonZeroUsize,
    /// Users.
    pub users: NonZeroUsize,
    /// Resolution.
    pub bits: Bits,
    /// SNR in dB, converted like the simulation axis.
    pub snr_db: f64,
    /// FBS parameters.
    pub fbs: FbsParams,
}

impl Default for OracleGapConfig {
    fn default() -> Self {
        let nz = |n| NonZeroUsize::new(n).unwrap();
        Self {
            instances: nz(50),
            antennas: nz(4),
            users: nz(2),
            bits: Bits(1),
            snr_db: 10.0,
            fbs: FbsParams::default(),
        }
    }
}

/// A whole config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Master seed for every tool.
    pub seed: u64,
    /// Worker cap; `FAMEEQ_THREADS` takes precedence.
    pub threads: Option<NonZeroUsize>,
    /// Link-level simulation.
    pub sim: SimConfig,
    /// Variance check.
    pub mse_check: MseCheckConfig,
    /// Oracle gap study.
    pub oracle_gap: OracleGapConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: None,
            sim: SimConfig::default(),
            mse_check: MseCheckConfig::default(),
            oracle_gap: OracleGapConfig::default(),
        }
    }
}

impl Config {
    /// Parses TOML text; `origin` names the source in error messages.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })?;
        cfg.sim.master_seed = cfg.seed;
        Ok(cfg)
    }

    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// Sets the seed everywhere it is used.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.sim.master_seed = seed;
    }

    /// Serializes back to TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = Config::from_toml_str("", "t").unwrap();
        assert_eq!(c, Config::default());
        c.sim.validate().unwrap();
    }

    #[test]
    fn errors_name_the_line() {
        let text = "seed = 3\n[sim]\nusers = 0\n";
        let err = Config::from_toml_str(text, "cfg.toml").unwrap_err().to_string();
        assert!(err.contains("cfg.toml"), "{err}");
        assert!(err.contains("line 3"), "{err}");

        let text = "[sim]\nantennas = 8\n\n[[sim.equalizer]]\nkind = \"flmmse\"\nbits = 12\n";
        let err = Config::from_toml_str(text, "c").unwrap_err().to_string();
        assert!(err.contains("bits must be in"), "{err}");
        assert!(err.contains("line "), "{err}");

        let err = Config::from_toml_str("[sim]\nsnr_db = []\n", "c").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");

        let err = Config::from_toml_str("[sim]\nbogus = 1\n", "c").unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("line 2"), "{err}");
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = Config::default();
        c.sim.equalizers.push(EqualizerSpec::fbs_with(
            2,
            FbsParams {
                t_max: 7,
                init: InitName::Flmmse,
                gamma: vec![1.5],
                tau: Some(vec![0.01]),
                tau_scale: None,
                eta: None,
            },
        ));
        c.sim.channel.model = ChannelModel::GeoNlos;
        c.sim.channel.sector_deg = Some(90.0);
        c.set_seed(99);
        let back = Config::from_toml_str(&c.to_toml(), "rt").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn equalizer_flags() {
        assert_eq!(EqualizerSpec::parse_flag("LMMSE_INF").unwrap(), EqualizerSpec::LmmseInf);
        assert_eq!(EqualizerSpec::parse_flag("flmmse,3").unwrap(), EqualizerSpec::flmmse(3));
        assert_eq!(EqualizerSpec::parse_flag("FAME-FBS, 2").unwrap(), EqualizerSpec::fbs(2));
        assert!(EqualizerSpec::parse_flag("flmmse").is_err());
        assert!(EqualizerSpec::parse_flag("flmmse,9").is_err());
        assert!(EqualizerSpec::parse_flag("zf,2").is_err());
    }

    #[test]
    fn uppercase_kind_alias() {
        let c = Config::from_toml_str("[[sim.equalizer]]\nkind = \"FAME_FBS\"\nbits = 1\ninit = \"flmmse\"\n", "c").unwrap();
        let p = c.sim.equalizers[0].fbs_params().unwrap();
        assert_eq!(p.init, InitName::Flmmse);
        assert_eq!(p.t_max, 5);
    }
}
