//! Channel realizations and the noisy per-subcarrier input-output relation
//! `y = H s + n`.
//!
//! Two generators are provided. [`rayleigh_iid`] draws every entry from
//! `CN(0, 1)`. [`geometric`] builds each user's channel from a handful of
//! clusters of plane waves impinging on a uniform linear array; it is a
//! simplified stand-in for ray-tracing style mmWave channel generators and
//! only aims to capture the LoS/non-LoS distinction (one dominant path
//! versus a few comparable scattered paths with strong angular structure).

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::numerics::{norm_sqr, CMatrix, CVector};

/// Ratio between the line-of-sight cluster power and the combined power of
/// all scattered clusters.
pub const LOS_POWER_RATIO: f64 = 10.0;

/// Channel module errors.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ChannelError {
    /// `Es` or `No` not strictly positive (or not finite).
    #[error("invalid noise parameters: Es = {es}, No = {no}")]
    InvalidNoise {
        /// Transmit energy.
        es: f64,
        /// Noise variance.
        no: f64,
    },
    /// Geometric parameters out of range.
    #[error("invalid geometric channel parameters: {0}")]
    InvalidParams(&'static str),
    /// Vector lengths do not match the channel matrix.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// Expected length.
        expected: usize,
        /// Actual length.
        got: usize,
    },
}

/// Per-symbol transmit energy and per-antenna complex noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkNoise {
    es: f64,
    no: f64,
}

impl LinkNoise {
    /// Validated constructor; both quantities must be finite and positive.
    pub fn new(es: f64, no: f64) -> Result<Self, ChannelError> {
        if !(es > 0.0 && no > 0.0 && es.is_finite() && no.is_finite()) {
            return Err(ChannelError::InvalidNoise { es, no });
        }
        Ok(Self { es, no })
    }

    /// Transmit energy per symbol.
    pub fn es(&self) -> f64 {
        self.es
    }

    /// Noise variance per receive antenna.
    pub fn no(&self) -> f64 {
        self.no
    }

    /// Regularization `rho = No / Es`.
    pub fn rho(&self) -> f64 {
        self.no / self.es
    }
}

/// One channel matrix per subcarrier, all `B x U`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    antennas: usize,
    users: usize,
    per_subcarrier: Vec<CMatrix>,
}

impl ChannelRealization {
    /// Wraps per-subcarrier matrices after checking they share a shape.
    pub fn new(per_subcarrier: Vec<CMatrix>) -> Result<Self, ChannelError> {
        let first = per_subcarrier
            .first()
            .ok_or(ChannelError::InvalidParams("at least one subcarrier is required"))?;
        let (antennas, users) = (first.rows(), first.cols());
        for m in &per_subcarrier {
            if m.rows() != antennas || m.cols() != users {
                return Err(ChannelError::DimensionMismatch {
                    expected: antennas * users,
                    got: m.rows() * m.cols(),
                });
            }
        }
        Ok(Self {
            antennas,
            users,
            per_subcarrier,
        })
    }

    /// Number of BS antennas `B`.
    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// Number of users `U`.
    pub fn users(&self) -> usize {
        self.users
    }

    /// Number of subcarriers `W`.
    pub fn subcarriers(&self) -> usize {
        self.per_subcarrier.len()
    }

    /// Channel matrix of subcarrier `w`.
    pub fn matrix(&self, w: usize) -> &CMatrix {
        &self.per_subcarrier[w]
    }

    /// All matrices.
    pub fn matrices(&self) -> &[CMatrix] {
        &self.per_subcarrier
    }

    /// `||h_u||^2` averaged over subcarriers.
    pub fn user_average_power(&self, user: usize) -> f64 {
        let total: f64 = self
            .per_subcarrier
            .iter()
            .map(|m| (0..m.rows()).map(|b| m[(b, user)].norm_sqr()).sum::<f64>())
            .sum();
        total / self.per_subcarrier.len() as f64
    }
}

/// Draws a `CN(0, variance)` sample.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// I.i.d. Rayleigh fading: every entry of every `H_w` is `CN(0, 1)`.
pub fn rayleigh_iid<R: Rng + ?Sized>(
    antennas: usize,
    users: usize,
    subcarriers: usize,
    rng: &mut R,
) -> ChannelRealization {
    let per_subcarrier = (0..subcarriers)
        .map(|_| CMatrix::from_fn(antennas, users, |_, _| complex_gaussian(rng, 1.0)))
        .collect();
    ChannelRealization {
        antennas,
        users,
        per_subcarrier,
    }
}

/// Parameters of the clustered plane-wave model.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricChannelParams {
    /// Antenna spacing in wavelengths.
    pub antenna_spacing: f64,
    /// Number of clusters per user (the first one is the LoS path if `los`).
    pub num_clusters: usize,
    /// Plane waves per scattered cluster.
    pub rays_per_cluster: usize,
    /// Whether cluster 1 is a dominant line-of-sight path.
    pub los: bool,
    /// Power decay between consecutive scattered clusters, in dB.
    pub per_cluster_power_decay_db: f64,
    /// Full width of the ray angle spread inside a cluster, in degrees.
    pub angle_spread_deg: f64,
    /// Users and clusters are placed within `+-sector_deg` of broadside.
    pub sector_deg: f64,
    /// Largest cluster delay, in samples of a `W`-point OFDM grid.
    pub delay_spread_samples: f64,
}

impl GeometricChannelParams {
    /// Line-of-sight defaults.
    pub fn los() -> Self {
        Self {
            los: true,
            ..Self::non_los()
        }
    }

    /// Non-line-of-sight defaults.
    pub fn non_los() -> Self {
        Self {
            antenna_spacing: 0.5,
            num_clusters: 4,
            rays_per_cluster: 8,
            los: false,
            per_cluster_power_decay_db: 3.0,
            angle_spread_deg: 5.0,
            sector_deg: 60.0,
            delay_spread_samples: 4.0,
        }
    }

    /// Rejects empty clusters and non-positive or non-finite geometry.
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.num_clusters == 0 {
            return Err(ChannelError::InvalidParams("num_clusters must be >= 1"));
        }
        if self.rays_per_cluster == 0 {
            return Err(ChannelError::InvalidParams("rays_per_cluster must be >= 1"));
        }
        if !(self.antenna_spacing > 0.0) {
            return Err(ChannelError::InvalidParams("antenna spacing must be > 0"));
        }
        if !(self.angle_spread_deg >= 0.0 && self.sector_deg >= 0.0) {
            return Err(ChannelError::InvalidParams("angles must be >= 0"));
        }
        if !(self.delay_spread_samples >= 0.0) {
            return Err(ChannelError::InvalidParams("delay spread must be >= 0"));
        }
        Ok(())
    }

    /// Relative cluster powers, summing to one.
    ///
    /// Scattered clusters decay exponentially. With `los` set, the first
    /// cluster carries [`LOS_POWER_RATIO`] times the power of the rest.
    pub fn cluster_powers(&self) -> Vec<f64> {
        let decay = |k: usize| 10f64.powf(-self.per_cluster_power_decay_db * k as f64 / 10.0);
        if self.los {
            let scattered: Vec<f64> = (0..self.num_clusters - 1).map(decay).collect();
            let total: f64 = scattered.iter().sum();
            let mut powers = Vec::with_capacity(self.num_clusters);
            if total == 0.0 {
                powers.push(1.0);
                return powers;
            }
            let norm = 1.0 + LOS_POWER_RATIO;
            powers.push(LOS_POWER_RATIO / norm);
            powers.extend(scattered.iter().map(|p| p / total / norm));
            powers
        } else {
            let raw: Vec<f64> = (0..self.num_clusters).map(decay).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|p| p / total).collect()
        }
    }
}

/// One propagation cluster as seen by a single user.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    /// Relative power.
    pub power: f64,
    /// Delay in samples of a `W`-point grid.
    pub delay_samples: f64,
    /// Common phase of the cluster.
    pub phase: f64,
    /// `(angle of arrival [rad], ray phase)` of each constituent plane wave.
    pub rays: Vec<(f64, f64)>,
}

/// ULA response `a(theta)_b = exp(j 2 pi d b sin(theta))`.
pub fn plane_wave(antennas: usize, spacing: f64, angle_rad: f64) -> CVector {
    let k = 2.0 * PI * spacing * angle_rad.sin();
    (0..antennas)
        .map(|b| Complex64::from_polar(1.0, k * b as f64))
        .collect()
}

/// Per-subcarrier channel vector of one user built from explicit clusters.
///
/// Every returned vector is normalized so that `||h||^2 = B` exactly (up to
/// rounding) unless it vanishes.
pub fn user_channel_from_clusters(
    antennas: usize,
    subcarriers: usize,
    spacing: f64,
    clusters: &[Cluster],
) -> Vec<CVector> {
    let responses: Vec<CVector> = clusters
        .iter()
        .map(|c| {
            let mut acc = CVector::zeros(antennas);
            let amp = (1.0 / c.rays.len() as f64).sqrt();
            for &(angle, phase) in &c.rays {
                let a = plane_wave(antennas, spacing, angle);
                let g = Complex64::from_polar(amp, phase);
                for (s, v) in acc.iter_mut().zip(a.iter()) {
                    *s += g * v;
                }
            }
            acc.scaled(Complex64::from_polar(c.power.sqrt(), c.phase))
        })
        .collect();
    (0..subcarriers)
        .map(|w| {
            let mut h = CVector::zeros(antennas);
            for (c, a) in clusters.iter().zip(&responses) {
                let rot = Complex64::from_polar(
                    1.0,
                    -2.0 * PI * w as f64 * c.delay_samples / subcarriers as f64,
                );
                for (s, v) in h.iter_mut().zip(a.iter()) {
                    *s += rot * v;
                }
            }
            let n = norm_sqr(&h);
            if n > 0.0 {
                let scale = (antennas as f64 / n).sqrt();
                h.iter_mut().for_each(|z| *z *= scale);
            }
            h
        })
        .collect()
}

/// Draws random clusters for one user.
pub fn draw_clusters<R: Rng + ?Sized>(params: &GeometricChannelParams, rng: &mut R) -> Vec<Cluster> {
    let sector = params.sector_deg.to_radians();
    let half_spread = 0.5 * params.angle_spread_deg.to_radians();
    let uniform_angle = |rng: &mut R| {
        if sector > 0.0 {
            rng.random_range(-sector..=sector)
        } else {
            0.0
        }
    };
    let powers = params.cluster_powers();
    let mut clusters = Vec::with_capacity(powers.len());
    for (k, &power) in powers.iter().enumerate() {
        let centre = uniform_angle(rng);
        let los_path = params.los && k == 0;
        let delay_samples = if los_path || params.delay_spread_samples == 0.0 {
            0.0
        } else {
            rng.random_range(0.0..=params.delay_spread_samples)
        };
        let phase = rng.random_range(0.0..2.0 * PI);
        let rays = if los_path {
            alloc::vec![(centre, 0.0)]
        } else {
            (0..params.rays_per_cluster)
                .map(|_| {
                    let off = if half_spread > 0.0 {
                        rng.random_range(-half_spread..=half_spread)
                    } else {
                        0.0
                    };
                    (centre + off, rng.random_range(0.0..2.0 * PI))
                })
                .collect()
        };
        clusters.push(Cluster {
            power,
            delay_samples,
            phase,
            rays,
        });
    }
    clusters
}

/// Clustered plane-wave channel; each `(subcarrier, user)` column has
/// `||h_u||^2 = B` before power control.
pub fn geometric<R: Rng + ?Sized>(
    antennas: usize,
    users: usize,
    subcarriers: usize,
    params: &GeometricChannelParams,
    rng: &mut R,
) -> Result<ChannelRealization, ChannelError> {
    params.validate()?;
    let mut per_subcarrier = alloc::vec![CMatrix::zeros(antennas, users); subcarriers];
    for u in 0..users {
        let clusters = draw_clusters(params, rng);
        let cols =
            user_channel_from_clusters(antennas, subcarriers, params.antenna_spacing, &clusters);
        for (m, h) in per_subcarrier.iter_mut().zip(cols) {
            for (b, z) in h.iter().enumerate() {
                m[(b, u)] = *z;
            }
        }
    }
    Ok(ChannelRealization {
        antennas,
        users,
        per_subcarrier,
    })
}

/// Rescales every user so that its subcarrier-averaged receive power is
/// `B * g_u`, with `g_u` uniform in dB over `[-range_db, +range_db]`.
///
/// Returns the drawn gains in dB. With `range_db == 0` nothing is drawn and
/// all users end up with average power exactly `B`.
pub fn apply_power_control<R: Rng + ?Sized>(
    ch: &mut ChannelRealization,
    range_db: f64,
    rng: &mut R,
) -> Vec<f64> {
    assert!(range_db >= 0.0, "power control range must be non-negative");
    let target = ch.antennas as f64;
    let mut gains = Vec::with_capacity(ch.users);
    for u in 0..ch.users {
        let g_db = if range_db > 0.0 {
            rng.random_range(-range_db..=range_db)
        } else {
            0.0
        };
        let p = ch.user_average_power(u);
        if p > 0.0 {
            let scale = (target * 10f64.powf(g_db / 10.0) / p).sqrt();
            for m in &mut ch.per_subcarrier {
                m.scale_col(u, scale);
            }
        }
        gains.push(g_db);
    }
    gains
}

/// `y = H s + n` with `n ~ CN(0, No I_B)`.
pub fn transmit<R: Rng + ?Sized>(
    h: &CMatrix,
    s: &[Complex64],
    noise: &LinkNoise,
    rng: &mut R,
) -> Result<CVector, ChannelError> {
    if s.len() != h.cols() {
        return Err(ChannelError::DimensionMismatch {
            expected: h.cols(),
            got: s.len(),
        });
    }
    let mut y = h.mul_vec(s);
    for z in y.iter_mut() {
        *z += complex_gaussian(rng, noise.no);
    }
    Ok(y)
}
