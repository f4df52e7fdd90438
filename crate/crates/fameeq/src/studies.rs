//! Small numerical studies behind the `mse-check`, `oracle-gap` and
//! `quantize-demo` commands.

use fameeq_core::channel::{complex_gaussian, transmit, LinkNoise};
use fameeq_core::equalize::{
    bruteforce_candidates, fame_bruteforce, fame_fbs, flmmse, quantize_row, EqualizeError, UnbiasedRow,
    BRUTEFORCE_BUDGET,
};
use fameeq_core::modem::Constellation;
use fameeq_core::numerics::{CMatrix, CVector};
use fameeq_core::rng::{derive_rng, Purpose};
use fameeq_core::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::config::{MseCheckConfig, OracleGapConfig};
use crate::io::QuantizationFixture;
use crate::simkit::snr_to_no;

const TAG_MSE_SETUP: u16 = 1;
const TAG_MSE_DRAWS: u16 = 2;
const TAG_ORACLE: u16 = 3;

fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, 1.0))
}

/// One row of the variance check.
#[derive(Debug, Clone, Serialize)]
pub struct MseInstance {
    /// Antennas.
    pub antennas: usize,
    /// Users.
    pub users: usize,
    /// `No / Es`.
    pub rho: f64,
    /// Closed-form NPI variance.
    pub analytic: f64,
    /// Empirical MSE of the unbiased estimate.
    pub monte_carlo: f64,
    /// `|mc - analytic| / analytic`.
    pub rel_dev: f64,
}

/// Result of the variance check.
#[derive(Debug, Clone, Serialize)]
pub struct MseReport {
    /// Per-instance results.
    pub instances: Vec<MseInstance>,
    /// Largest relative deviation.
    pub max_rel_dev: f64,
    /// Threshold applied.
    pub tolerance: f64,
}

impl MseReport {
    /// Whether every instance is within tolerance.
    pub fn passed(&self) -> bool {
        self.max_rel_dev <= self.tolerance
    }
}

/// Empirical MSE of `row` over `draws` 16-QAM transmissions.
pub fn monte_carlo_mse<R: Rng>(
    h: &CMatrix,
    noise: &LinkNoise,
    row: &UnbiasedRow,
    c: &Constellation,
    draws: usize,
    rng: &mut R,
) -> f64 {
    let points = c.points();
    let mut acc = 0.0;
    let mut s = vec![Complex64::new(0.0, 0.0); h.cols()];
    for _ in 0..draws {
        for v in s.iter_mut() {
            *v = points[rng.random_range(0..points.len())];
        }
        let y = transmit(h, &s, noise, rng).expect("dimensions match");
        acc += (row.estimate(&y) - s[row.user]).norm_sqr();
    }
    acc / draws as f64
}

/// Compares the closed-form NPI variance with Monte-Carlo MSEs on random
/// `(H, x, rho)`; optionally adds a single-user, almost noiseless instance.
pub fn mse_check(cfg: &MseCheckConfig, seed: u64) -> Result<MseReport, EqualizeError> {
    let c = Constellation::qam16(1.0).expect("unit energy");
    let mut instances = Vec::new();
    let n = cfg.instances.get();
    for i in 0..n + cfg.include_noiseless as usize {
        let mut setup = derive_rng(seed, i as u64, Purpose::Other(TAG_MSE_SETUP));
        let (b, u, rho, h, x) = if i < n {
            let (b, u) = (cfg.antennas.get(), cfg.users.get());
            let h = gaussian_matrix(b, u, &mut setup);
            let rho = 10f64.powf(setup.random_range(-2.0..0.5));
            let x: CVector = (0..b).map(|_| complex_gaussian(&mut setup, 1.0)).collect();
            (b, u, rho, h, x)
        } else {
            let b = cfg.antennas.get();
            let h = gaussian_matrix(b, 1, &mut setup);
            let x = h.col(0);
            (b, 1, 1e-12, h, x)
        };
        let noise = LinkNoise::new(1.0, rho).expect("positive noise");
        let row = UnbiasedRow::new(&h, &noise, 0, x)?;
        let mut draws = derive_rng(seed, i as u64, Purpose::Other(TAG_MSE_DRAWS));
        let mc = monte_carlo_mse(&h, &noise, &row, &c, cfg.draws.get(), &mut draws);
        instances.push(MseInstance {
            antennas: b,
            users: u,
            rho,
            analytic: row.nu_sq,
            monte_carlo: mc,
            rel_dev: (mc - row.nu_sq).abs() / row.nu_sq,
        });
    }
    let max_rel_dev = instances.iter().map(|i| i.rel_dev).fold(0.0, f64::max);
    Ok(MseReport {
        instances,
        max_rel_dev,
        tolerance: cfg.tolerance,
    })
}

/// Objectives of one user on one instance.
#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    /// Instance index.
    pub instance: usize,
    /// User.
    pub user: usize,
    /// Exhaustive-search optimum.
    pub bruteforce: f64,
    /// FL-MMSE objective (`inf` if degenerate).
    pub flmmse: f64,
    /// FAME-FBS objective.
    pub fame_fbs: f64,
}

impl GapRow {
    /// FL-MMSE over optimum.
    pub fn flmmse_ratio(&self) -> f64 {
        self.flmmse / self.bruteforce
    }

    /// FBS over optimum.
    pub fn fbs_ratio(&self) -> f64 {
        self.fame_fbs / self.bruteforce
    }
}

/// Header of the oracle-gap CSV.
pub const GAP_CSV_HEADER: &str = "instance,user,bruteforce,flmmse,fame_fbs,flmmse_ratio,fbs_ratio";

/// Result of the oracle-gap study.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    /// Per (instance, user) rows.
    pub rows: Vec<GapRow>,
}

impl GapReport {
    /// CSV text.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(GAP_CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.instance,
                r.user,
                r.bruteforce,
                r.flmmse,
                r.fame_fbs,
                r.flmmse_ratio(),
                r.fbs_ratio()
            ));
        }
        s
    }

    /// Empirical quantile `q` of `f` over all rows (nearest rank).
    pub fn quantile(&self, q: f64, f: impl Fn(&GapRow) -> f64) -> f64 {
        let mut v: Vec<f64> = self.rows.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        let idx = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
        v[idx]
    }

    /// Rows where FBS is at least as good as FL-MMSE.
    pub fn fbs_not_worse(&self) -> usize {
        self.rows.iter().filter(|r| r.fame_fbs <= r.flmmse).count()
    }
}

/// Compares FL-MMSE and FAME-FBS against exhaustive search.
///
/// Fails with [`EqualizeError::BudgetExceeded`] before doing any work if the
/// search space is too large.
pub fn oracle_gap(cfg: &OracleGapConfig, seed: u64) -> Result<GapReport, EqualizeError> {
    let (b, u, bits) = (cfg.antennas.get(), cfg.users.get(), cfg.bits.get());
    let candidates = bruteforce_candidates(b, bits);
    if candidates > BRUTEFORCE_BUDGET as u128 {
        return Err(EqualizeError::BudgetExceeded {
            candidates,
            budget: BRUTEFORCE_BUDGET,
        });
    }
    let noise = LinkNoise::new(1.0, snr_to_no(cfg.snr_db, 1.0, u)).expect("positive noise");
    let sched = cfg.fbs.schedule();
    sched.validate()?;
    let mut rows = Vec::new();
    for i in 0..cfg.instances.get() {
        let h = gaussian_matrix(b, u, &mut derive_rng(seed, i as u64, Purpose::Other(TAG_ORACLE)));
        let fl = flmmse(&h, &noise, bits)?;
        for user in 0..u {
            let bf = fame_bruteforce(&h, &noise, user, bits)?;
            let fbs = fame_fbs(&h, &noise, user, bits, &sched)?;
            rows.push(GapRow {
                instance: i,
                user,
                bruteforce: bf.objective,
                flmmse: fl.rows[user].as_ref().map_or(f64::INFINITY, |r| r.objective),
                fame_fbs: fbs.objective,
            });
        }
    }
    Ok(GapReport { rows })
}

/// Quantizes `values` to `bits` and describes the binning.
pub fn quantize_demo(values: &[Complex64], bits: u32) -> Result<QuantizationFixture, EqualizeError> {
    let q = quantize_row(values, bits, None)?;
    let w_max = values.iter().flat_map(|z| [z.re.abs(), z.im.abs()]).fold(0.0, f64::max);
    let levels = (1u32 << bits) as f64;
    let scale = w_max / levels;
    Ok(QuantizationFixture {
        bits,
        input: values.iter().map(|z| [z.re, z.im]).collect(),
        w_max,
        bin_width: 2.0 * w_max / levels,
        integers: q.iter().map(|z| [z.re as i32, z.im as i32]).collect(),
        centroids: q.iter().map(|z| [z.re * scale, z.im * scale]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::num::NonZeroUsize;

    #[test]
    fn quantize_demo_bins() {
        let v = [Complex64::new(1.0, -0.1), Complex64::new(0.0, -1.0), Complex64::new(0.49, 0.51)];
        let f = quantize_demo(&v, 2).unwrap();
        assert_eq!(f.w_max, 1.0);
        assert_eq!(f.bin_width, 0.5);
        assert_eq!(f.integers, vec![[3, -1], [1, -3], [1, 3]]);
        assert_eq!(f.centroids[0], [0.75, -0.25]);
    }

    #[test]
    fn oracle_gap_refuses_large_searches() {
        let cfg = OracleGapConfig {
            antennas: NonZeroUsize::new(20).unwrap(),
            ..OracleGapConfig::default()
        };
        assert!(matches!(oracle_gap(&cfg, 1), Err(EqualizeError::BudgetExceeded { .. })));
    }

    #[test]
    fn small_mse_check_is_close() {
        let cfg = MseCheckConfig {
            instances: NonZeroUsize::new(2).unwrap(),
            draws: NonZeroUsize::new(20_000).unwrap(),
            tolerance: 0.1,
            ..MseCheckConfig::default()
        };
        let r = mse_check(&cfg, 5).unwrap();
        assert_eq!(r.instances.len(), 3);
        assert!(r.passed(), "{r:?}");
        assert!(r.instances[2].analytic < 1e-11);
    }
}
