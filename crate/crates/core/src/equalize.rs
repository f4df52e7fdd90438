//! Linear and finite-alphabet spatial equalizers.
//!
//! A finite-alphabet equalizer row is `v_u^H = conj(beta_u) x_u^H`, where
//! `x_u` has real and imaginary parts in the odd-integer alphabet
//! `{+-1, +-3, ..., +-(2^b - 1)}`. Symbol estimates are always formed in the
//! unbiased way, `s_hat_u = x_u^H y / (x_u^H h_u)`, so `beta_u` cancels and
//! only enters through the post-equalization NPI variance
//!
//! ```text
//! nu_u^2 = Es * (1 / (beta_u h_u^H x_u) - 1),
//! beta_u = x_u^H h_u / (||H^H x_u||^2 + rho ||x_u||^2).
//! ```
//!
//! Three ways of picking `x_u` are provided: quantizing the L-MMSE row
//! ([`flmmse`]), forward-backward splitting on the FAME objective
//! ([`fame_fbs`]) and exhaustive search ([`fame_bruteforce`]) for small `B`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow these when std is linked
use num_traits::Float;
use thiserror::Error;

use crate::channel::LinkNoise;
use crate::numerics::{
    dot_h, gram, hpd_solve, norm_sqr, spectral_norm_sq_estimate, CMatrix, CVector, NumericsError,
};

/// Relative threshold on `|h_u^H x|^2 / (||x||^2 ||h_u||^2)` below which a
/// direction is considered unable to equalize user `u`.
pub const DEGENERACY_EPS: f64 = 1e-18;

/// Largest supported resolution per real dimension.
pub const MAX_BITS: u32 = 8;

/// Default exhaustive-search budget, in candidates before symmetry pruning.
pub const BRUTEFORCE_BUDGET: u64 = 1 << 24;

/// Power-iteration steps used for the automatic FBS step size.
pub const AUTO_TAU_POWER_ITERS: usize = 30;

/// Equalizer errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EqualizeError {
    /// Failure in the underlying linear algebra.
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    /// `h_u^H x` vanishes (relative to [`DEGENERACY_EPS`]).
    #[error("direction cannot equalize user {user}")]
    DegenerateDirection {
        /// Affected user.
        user: usize,
    },
    /// `beta_u h_u^H x_u` outside `(0, 1]`.
    #[error("bias factor {0} outside (0, 1]")]
    InvalidBias(f64),
    /// Quantizing an all-zero vector without an explicit range.
    #[error("cannot quantize an all-zero vector without a w_max override")]
    ZeroVector,
    /// Exhaustive search would exceed its budget.
    #[error("exhaustive search needs {candidates} candidates, budget is {budget}")]
    BudgetExceeded {
        /// Candidates before symmetry pruning.
        candidates: u128,
        /// Allowed budget.
        budget: u64,
    },
    /// Resolution outside `1..=MAX_BITS`.
    #[error("unsupported resolution of {0} bits")]
    InvalidBits(u32),
    /// Regularization not strictly positive.
    #[error("rho must be positive, got {0}")]
    InvalidRho(f64),
    /// FBS schedule inconsistent.
    #[error("invalid FBS schedule: {0}")]
    InvalidSchedule(&'static str),
    /// User index out of range.
    #[error("user {user} out of range for {users} users")]
    UserOutOfRange {
        /// Requested user.
        user: usize,
        /// Number of users.
        users: usize,
    },
    /// Vector length does not match the channel.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// Expected length.
        expected: usize,
        /// Actual length.
        got: usize,
    },
}

type Result<T> = core::result::Result<T, EqualizeError>;

fn check_user(h: &CMatrix, u: usize) -> Result<()> {
    if u >= h.cols() {
        return Err(EqualizeError::UserOutOfRange {
            user: u,
            users: h.cols(),
        });
    }
    Ok(())
}

fn check_len(h: &CMatrix, x: &[Complex64]) -> Result<()> {
    if x.len() != h.rows() {
        return Err(EqualizeError::DimensionMismatch {
            expected: h.rows(),
            got: x.len(),
        });
    }
    Ok(())
}

fn check_bits(bits: u32) -> Result<()> {
    if bits == 0 || bits > MAX_BITS {
        return Err(EqualizeError::InvalidBits(bits));
    }
    Ok(())
}

/// Quadratic-form pieces of a candidate direction `x` for user `u`.
#[derive(Debug, Clone, Copy)]
struct Projections {
    /// `h_u^H x`
    signal: Complex64,
    /// `||H^H x||^2`
    total: f64,
    /// `||x||^2`
    x_norm_sq: f64,
}

impl Projections {
    fn compute(h: &CMatrix, u: usize, x: &[Complex64], scratch: &mut [Complex64]) -> Self {
        h.adjoint_mul_vec_into(x, scratch);
        Self {
            signal: scratch[u],
            total: norm_sqr(scratch),
            x_norm_sq: norm_sqr(x),
        }
    }

    fn is_degenerate(&self, h_u_norm_sq: f64) -> bool {
        !(self.signal.norm_sqr() >= DEGENERACY_EPS * self.x_norm_sq * h_u_norm_sq)
            || self.signal.norm_sqr() == 0.0
    }

    fn denominator(&self, rho: f64) -> f64 {
        self.total + rho * self.x_norm_sq
    }
}

fn column_norm_sq(h: &CMatrix, u: usize) -> f64 {
    (0..h.rows()).map(|b| h[(b, u)].norm_sqr()).sum()
}

fn objective_with(h: &CMatrix, rho: f64, u: usize, x: &[Complex64], scratch: &mut [Complex64], hu: f64) -> Option<f64> {
    let p = Projections::compute(h, u, x, scratch);
    if p.is_degenerate(hu) {
        None
    } else {
        Some(p.denominator(rho) / p.signal.norm_sqr())
    }
}

/// The FAME objective `(||H^H x||^2 + rho ||x||^2) / |h_u^H x|^2`.
pub fn fame_objective(h: &CMatrix, rho: f64, u: usize, x: &[Complex64]) -> Result<f64> {
    check_user(h, u)?;
    check_len(h, x)?;
    let mut scratch = vec![Complex64::new(0.0, 0.0); h.cols()];
    objective_with(h, rho, u, x, &mut scratch, column_norm_sq(h, u))
        .ok_or(EqualizeError::DegenerateDirection { user: u })
}

/// Optimal scaling `beta = x^H h_u / (||H^H x||^2 + rho ||x||^2)`.
pub fn beta_of(h: &CMatrix, rho: f64, u: usize, x: &[Complex64]) -> Result<Complex64> {
    check_user(h, u)?;
    check_len(h, x)?;
    let mut scratch = vec![Complex64::new(0.0, 0.0); h.cols()];
    let p = Projections::compute(h, u, x, &mut scratch);
    if p.is_degenerate(column_norm_sq(h, u)) {
        return Err(EqualizeError::DegenerateDirection { user: u });
    }
    Ok(p.signal.conj() / p.denominator(rho))
}

/// NPI variance `Es (1 / bias_factor - 1)` for `bias_factor` in `(0, 1]`.
pub fn npi_variance(es: f64, bias_factor: f64) -> Result<f64> {
    if !(bias_factor > 0.0 && bias_factor <= 1.0 + 1e-12) {
        return Err(EqualizeError::InvalidBias(bias_factor));
    }
    Ok((es * (1.0 / bias_factor - 1.0)).max(0.0))
}

/// Unbiased estimate `x^H y / (x^H h_u)`.
pub fn equalize_unbiased(h: &CMatrix, x: &[Complex64], u: usize, y: &[Complex64]) -> Result<Complex64> {
    check_user(h, u)?;
    check_len(h, x)?;
    check_len(h, y)?;
    let hu = h.col(u);
    let gain = dot_h(x, &hu);
    if !(gain.norm_sqr() >= DEGENERACY_EPS * norm_sqr(x) * hu.norm_sqr()) || gain.norm_sqr() == 0.0 {
        return Err(EqualizeError::DegenerateDirection { user: u });
    }
    Ok(dot_h(x, y) / gain)
}

/// Biased estimate `w^H y`.
pub fn equalize_biased(w: &[Complex64], y: &[Complex64]) -> Complex64 {
    dot_h(w, y)
}

/// An equalization direction for one user together with everything needed
/// to produce unbiased estimates and LLRs from it.
#[derive(Debug, Clone, PartialEq)]
pub struct UnbiasedRow {
    /// User index `u`.
    pub user: usize,
    /// Direction `x_u` (length `B`).
    pub x: CVector,
    /// `x_u^H h_u`, the unbiasing denominator.
    pub gain: Complex64,
    /// Optimal scaling `beta_u`.
    pub beta: Complex64,
    /// `beta_u h_u^H x_u`, real and in `(0, 1]`.
    pub bias_factor: f64,
    /// Post-equalization NPI variance `nu_u^2`.
    pub nu_sq: f64,
    /// FAME objective of `x_u`.
    pub objective: f64,
}

impl UnbiasedRow {
    /// Attaches scaling and variance to direction `x` for user `u`.
    pub fn new(h: &CMatrix, noise: &LinkNoise, u: usize, x: CVector) -> Result<Self> {
        check_user(h, u)?;
        check_len(h, &x)?;
        let mut scratch = vec![Complex64::new(0.0, 0.0); h.cols()];
        Self::with_scratch(h, noise, u, x, &mut scratch, column_norm_sq(h, u))
    }

    fn with_scratch(
        h: &CMatrix,
        noise: &LinkNoise,
        u: usize,
        x: CVector,
        scratch: &mut [Complex64],
        hu: f64,
    ) -> Result<Self> {
        let rho = noise.rho();
        let p = Projections::compute(h, u, &x, scratch);
        if p.is_degenerate(hu) {
            return Err(EqualizeError::DegenerateDirection { user: u });
        }
        let den = p.denominator(rho);
        let signal_sq = p.signal.norm_sqr();
        let beta = p.signal.conj() / den;
        let bias_factor = signal_sq / den;
        let nu_sq = npi_variance(noise.es(), bias_factor)?;
        Ok(Self {
            user: u,
            gain: p.signal.conj(),
            x,
            beta,
            bias_factor,
            nu_sq,
            objective: den / signal_sq,
        })
    }

    /// Unbiased estimate `x^H y / (x^H h_u)`.
    #[inline]
    pub fn estimate(&self, y: &[Complex64]) -> Complex64 {
        dot_h(&self.x, y) / self.gain
    }
}

/// Infinite-precision L-MMSE equalizer `W^H = (rho I + H^H H)^{-1} H^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct LmmseEqualizer {
    wh: CMatrix,
    rho: f64,
}

impl LmmseEqualizer {
    /// The `U x B` matrix `W^H`.
    pub fn wh(&self) -> &CMatrix {
        &self.wh
    }

    /// Regularization used.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Column `w_u` of `W` (the conjugated `u`th row of `W^H`).
    pub fn w(&self, u: usize) -> CVector {
        self.wh.row(u).iter().map(|z| z.conj()).collect()
    }

    /// Unbiased row built from `w_u`.
    pub fn unbiased_row(&self, h: &CMatrix, noise: &LinkNoise, u: usize) -> Result<UnbiasedRow> {
        UnbiasedRow::new(h, noise, u, self.w(u))
    }
}

/// L-MMSE equalization matrix via a Cholesky solve.
pub fn lmmse(h: &CMatrix, rho: f64) -> Result<LmmseEqualizer> {
    if !(rho > 0.0) {
        return Err(EqualizeError::InvalidRho(rho));
    }
    let mut a = gram(h);
    for i in 0..a.rows() {
        a[(i, i)].re += rho;
    }
    let wh = hpd_solve(&a, &h.adjoint())?;
    Ok(LmmseEqualizer { wh, rho })
}

/// Index of the uniform bin of `v` among `levels` bins over `[-1, 1]`
/// (`v` already divided by `w_max`). Edges go to the upper bin.
#[inline]
fn bin_index(v: f64, levels: i64) -> i64 {
    let k = ((v + 1.0) * (levels as f64 / 2.0)).floor() as i64;
    k.clamp(0, levels - 1)
}

/// Quantizes real and imaginary parts to `2^bits` uniform bins over
/// `[-w_max, w_max]` and returns the bin centroids scaled by `2^bits / w_max`,
/// which are the odd integers `+-1, +-3, ..., +-(2^bits - 1)`.
///
/// `w_max` is the largest magnitude among all real and imaginary parts unless
/// overridden. Values beyond the range land in the outermost bins; values on
/// a bin edge go to the upper bin, so zero maps to `+1`.
pub fn quantize_row(w: &[Complex64], bits: u32, w_max_override: Option<f64>) -> Result<CVector> {
    check_bits(bits)?;
    let w_max = match w_max_override {
        Some(m) if m > 0.0 && m.is_finite() => m,
        Some(_) => return Err(EqualizeError::ZeroVector),
        None => {
            let m = w
                .iter()
                .flat_map(|z| [z.re.abs(), z.im.abs()])
                .fold(0.0, f64::max);
            if !(m > 0.0) {
                return Err(EqualizeError::ZeroVector);
            }
            m
        }
    };
    let levels = 1i64 << bits;
    let level = |v: f64| (2 * bin_index(v / w_max, levels) + 1 - levels) as f64;
    Ok(w.iter().map(|z| Complex64::new(level(z.re), level(z.im))).collect())
}

/// Row of a finite-alphabet equalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAlphabetRow {
    /// Resolution per real dimension.
    pub bits: u32,
    /// Direction (odd-integer parts), scaling and variance.
    pub row: UnbiasedRow,
}

impl FiniteAlphabetRow {
    fn new(
        h: &CMatrix,
        noise: &LinkNoise,
        u: usize,
        x: CVector,
        bits: u32,
        scratch: &mut [Complex64],
        hu: f64,
    ) -> Result<Self> {
        Ok(Self {
            bits,
            row: UnbiasedRow::with_scratch(h, noise, u, x, scratch, hu)?,
        })
    }

    /// Integer real/imaginary parts of `x_u`.
    pub fn integer_parts(&self) -> Vec<(i32, i32)> {
        self.row
            .x
            .iter()
            .map(|z| (z.re.round() as i32, z.im.round() as i32))
            .collect()
    }
}

impl core::ops::Deref for FiniteAlphabetRow {
    type Target = UnbiasedRow;
    fn deref(&self) -> &UnbiasedRow {
        &self.row
    }
}

/// Finite-alphabet equalizer `V^H = diag(conj(beta)) X^H`; failures are
/// reported per user.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAlphabetEqualizer {
    /// Resolution per real dimension.
    pub bits: u32,
    /// Number of antennas `B`.
    pub antennas: usize,
    /// One entry per user.
    pub rows: Vec<Result<FiniteAlphabetRow>>,
}

impl FiniteAlphabetEqualizer {
    /// Number of users.
    pub fn users(&self) -> usize {
        self.rows.len()
    }

    /// True if every row was computed.
    pub fn is_complete(&self) -> bool {
        self.rows.iter().all(|r| r.is_ok())
    }
}

/// FL-MMSE: quantize every L-MMSE row with its own `w_max`.
pub fn flmmse(h: &CMatrix, noise: &LinkNoise, bits: u32) -> Result<FiniteAlphabetEqualizer> {
    check_bits(bits)?;
    let eq = lmmse(h, noise.rho())?;
    flmmse_from_lmmse(h, noise, &eq, bits)
}

/// FL-MMSE reusing an already computed L-MMSE matrix.
pub fn flmmse_from_lmmse(
    h: &CMatrix,
    noise: &LinkNoise,
    lmmse: &LmmseEqualizer,
    bits: u32,
) -> Result<FiniteAlphabetEqualizer> {
    check_bits(bits)?;
    let mut scratch = vec![Complex64::new(0.0, 0.0); h.cols()];
    let rows = (0..h.cols())
        .map(|u| {
            let x = quantize_row(&lmmse.w(u), bits, None)?;
            FiniteAlphabetRow::new(h, noise, u, x, bits, &mut scratch, column_norm_sq(h, u))
        })
        .collect();
    Ok(FiniteAlphabetEqualizer {
        bits,
        antennas: h.rows(),
        rows,
    })
}

/// FBS initializer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbsInit {
    /// Maximum-ratio combining, `x = h_u`.
    Mrc,
    /// The FL-MMSE row at the same resolution.
    Flmmse,
}

/// FBS step size.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSize {
    /// `1 / lambda_max(H H^H)` from power iteration, constant over iterations.
    Auto,
    /// Explicit per-iteration values (length 1 broadcasts).
    Fixed(Vec<f64>),
    /// Per-iteration multiples of the automatic step (length 1 broadcasts).
    Relative(Vec<f64>),
}

/// Prox sharpness `eta^(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProxSchedule {
    /// Geometric ramp from 1 to `2^bits` over the iterations.
    Auto,
    /// Explicit per-iteration values (length 1 broadcasts).
    Fixed(Vec<f64>),
}

/// Per-iteration parameters of FAME-FBS.
#[derive(Debug, Clone, PartialEq)]
pub struct FbsSchedule {
    /// Step sizes `tau^(t)`.
    pub tau: StepSize,
    /// Prox parameters `eta^(t)`.
    pub eta: ProxSchedule,
    /// Signal weights `gamma^(t)` (length 1 broadcasts).
    pub gamma: Vec<f64>,
    /// Number of iterations.
    pub t_max: usize,
    /// Initial iterate.
    pub init: FbsInit,
}

impl Default for FbsSchedule {
    fn default() -> Self {
        Self {
            tau: StepSize::Auto,
            eta: ProxSchedule::Auto,
            gamma: vec![2.0],
            t_max: 5,
            init: FbsInit::Mrc,
        }
    }
}

fn broadcast(values: &[f64], t: usize) -> f64 {
    if values.len() == 1 {
        values[0]
    } else {
        values[t]
    }
}

fn valid_list(values: &[f64], t_max: usize) -> bool {
    (values.len() == 1 || values.len() >= t_max) && values.iter().all(|v| v.is_finite())
}

impl FbsSchedule {
    /// Default schedule with the given iteration count and initializer.
    pub fn new(t_max: usize, init: FbsInit) -> Self {
        Self {
            t_max,
            init,
            ..Self::default()
        }
    }

    /// Checks list lengths and `t_max >= 1`.
    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 {
            return Err(EqualizeError::InvalidSchedule("t_max must be >= 1"));
        }
        if !valid_list(&self.gamma, self.t_max) {
            return Err(EqualizeError::InvalidSchedule("gamma needs 1 or >= t_max finite values"));
        }
        if let StepSize::Fixed(v) | StepSize::Relative(v) = &self.tau {
            if !valid_list(v, self.t_max) {
                return Err(EqualizeError::InvalidSchedule("tau needs 1 or >= t_max finite values"));
            }
        }
        if let ProxSchedule::Fixed(v) = &self.eta {
            if !valid_list(v, self.t_max) || v.iter().any(|&e| e <= 0.0) {
                return Err(EqualizeError::InvalidSchedule("eta needs 1 or >= t_max positive values"));
            }
        }
        Ok(())
    }

    /// `eta^(t)` for iteration `t` (0-based).
    pub fn eta_at(&self, t: usize, bits: u32) -> f64 {
        match &self.eta {
            ProxSchedule::Fixed(v) => broadcast(v, t),
            ProxSchedule::Auto => {
                let top = (1u64 << bits) as f64;
                if self.t_max <= 1 {
                    top
                } else {
                    top.powf(t as f64 / (self.t_max - 1) as f64)
                }
            }
        }
    }

    /// `tau^(t)` for iteration `t`, given the automatic value.
    pub fn tau_at(&self, t: usize, auto: f64) -> f64 {
        match &self.tau {
            StepSize::Auto => auto,
            StepSize::Fixed(v) => broadcast(v, t),
            StepSize::Relative(v) => broadcast(v, t) * auto,
        }
    }

    /// `gamma^(t)` for iteration `t`.
    pub fn gamma_at(&self, t: usize) -> f64 {
        broadcast(&self.gamma, t)
    }

    fn needs_auto_tau(&self) -> bool {
        !matches!(self.tau, StepSize::Fixed(_))
    }
}

/// `1 / lambda_max(H^H H)`, the default FBS step.
pub fn auto_step_size(h: &CMatrix) -> f64 {
    let l = spectral_norm_sq_estimate(h, AUTO_TAU_POWER_ITERS);
    if l > 0.0 {
        1.0 / l
    } else {
        0.0
    }
}

/// `sgn(v) min(eta |v|, 1)` on one real dimension.
#[inline]
fn prox(v: f64, eta: f64) -> f64 {
    let m = (eta * v.abs()).min(1.0);
    if v >= 0.0 {
        m
    } else {
        -m
    }
}

/// Scales `v` so its largest real/imaginary magnitude is one.
fn into_box(v: &[Complex64]) -> CVector {
    let m = v
        .iter()
        .flat_map(|z| [z.re.abs(), z.im.abs()])
        .fold(0.0, f64::max);
    if m > 0.0 {
        v.iter().map(|z| z / m).collect()
    } else {
        v.iter().copied().collect()
    }
}

/// Shared inputs of the per-user FBS runs on one channel matrix.
struct FbsContext<'a> {
    h: &'a CMatrix,
    noise: &'a LinkNoise,
    bits: u32,
    sched: &'a FbsSchedule,
    auto_tau: f64,
}

impl FbsContext<'_> {
    /// Runs FBS for user `u` from the (box-scaled) start point `x0`.
    fn run(&self, u: usize, x0: CVector, scratch: &mut [Complex64]) -> Result<FiniteAlphabetRow> {
        let h = self.h;
        let rho = self.noise.rho();
        let hu = column_norm_sq(h, u);
        let mut x = x0;
        let mut best = quantize_row(&x, self.bits, Some(1.0))?;
        let mut best_obj = objective_with(h, rho, u, &best, scratch, hu).unwrap_or(f64::INFINITY);
        let mut last = best.clone();
        let mut grad = CVector::zeros(h.rows());
        for t in 0..self.sched.t_max {
            let tau = self.sched.tau_at(t, self.auto_tau);
            let gamma = self.sched.gamma_at(t);
            let eta = self.sched.eta_at(t, self.bits);
            // z = x - tau H (I - gamma e_u e_u^H) H^H x
            h.adjoint_mul_vec_into(&x, scratch);
            scratch[u] *= 1.0 - gamma;
            h.mul_vec_into(scratch, &mut grad);
            for (xi, g) in x.iter_mut().zip(grad.iter()) {
                let z = *xi - g * tau;
                *xi = Complex64::new(prox(z.re, eta), prox(z.im, eta));
            }
            let q = quantize_row(&x, self.bits, Some(1.0))?;
            if q != last {
                if let Some(obj) = objective_with(h, rho, u, &q, scratch, hu) {
                    if obj < best_obj {
                        best_obj = obj;
                        best = q.clone();
                    }
                }
                last = q;
            }
        }
        FiniteAlphabetRow::new(h, self.noise, u, best, self.bits, scratch, hu)
    }

    fn start(&self, u: usize, flmmse_row: Option<&FiniteAlphabetRow>) -> CVector {
        match (self.sched.init, flmmse_row) {
            (FbsInit::Flmmse, Some(r)) => {
                let s = 1.0 / (1u64 << self.bits) as f64;
                r.row.x.iter().map(|z| z * s).collect()
            }
            _ => into_box(&self.h.col(u)),
        }
    }
}

/// FAME-FBS for a single user.
///
/// Iterates `z = (I - tau H (I - gamma e_u e_u^H) H^H) x`, `x = prox(z)`,
/// quantizes every iterate with `w_max = 1` and returns the quantized
/// candidate (including the quantized initializer) with the smallest FAME
/// objective. The MRC start point `h_u` is scaled into the unit box first;
/// the FL-MMSE start point is the FL-MMSE row divided by `2^bits`.
pub fn fame_fbs(
    h: &CMatrix,
    noise: &LinkNoise,
    u: usize,
    bits: u32,
    sched: &FbsSchedule,
) -> Result<FiniteAlphabetRow> {
    check_bits(bits)?;
    check_user(h, u)?;
    sched.validate()?;
    let ctx = FbsContext {
        h,
        noise,
        bits,
        sched,
        auto_tau: if sched.needs_auto_tau() { auto_step_size(h) } else { 0.0 },
    };
    let mut scratch = vec![Complex64::new(0.0, 0.0); h.cols()];
    let init_row = match sched.init {
        FbsInit::Flmmse => {
            let eq = lmmse(h, noise.rho())?;
            let x = quantize_row(&eq.w(u), bits, None)?;
            FiniteAlphabetRow::new(h, noise, u, x, bits, &mut scratch, column_norm_sq(h, u)).ok()
        }
        FbsInit::Mrc => None,
    };
    ctx.run(u, ctx.start(u, init_row.as_ref()), &mut scratch)
}

/// FAME-FBS for every user of one channel matrix, sharing the step-size
/// estimate and (for FL-MMSE starts) the L-MMSE solve.
pub fn fame_fbs_equalizer(
    h: &CMatrix,
    noise: &LinkNoise,
    bits: u32,
    sched: &FbsSchedule,
) -> Result<FiniteAlphabetEqualizer> {
    check_bits(bits)?;
    sched.validate()?;
    let fl = match sched.init {
        FbsInit::Flmmse => Some(flmmse(h, noise, bits)?),
        FbsInit::Mrc => None,
    };
    let ctx = FbsContext {
        h,
        noise,
        bits,
        sched,
        auto_tau: if sched.needs_auto_tau() { auto_step_size(h) } else { 0.0 },
    };
    let mut scratch = vec![Complex64::new(0.0, 0.0); h.cols()];
    let rows = (0..h.cols())
        .map(|u| {
            let init = fl.as_ref().and_then(|f| f.rows[u].as_ref().ok());
            ctx.run(u, ctx.start(u, init), &mut scratch)
        })
        .collect();
    Ok(FiniteAlphabetEqualizer {
        bits,
        antennas: h.rows(),
        rows,
    })
}

/// Number of candidates exhaustive search would visit before pruning.
pub fn bruteforce_candidates(antennas: usize, bits: u32) -> u128 {
    let exp = 2 * antennas as u128 * bits as u128;
    if exp >= 128 {
        u128::MAX
    } else {
        1u128 << exp
    }
}

/// Exhaustive minimization of the FAME objective over `A_b^B`.
///
/// `x` and `-x` have the same objective, so the first real part is fixed
/// positive, halving the search. Ties keep the first candidate in
/// lexicographic order of the part indices (real part of antenna 0 first).
pub fn fame_bruteforce(
    h: &CMatrix,
    noise: &LinkNoise,
    u: usize,
    bits: u32,
) -> Result<FiniteAlphabetRow> {
    fame_bruteforce_with_budget(h, noise, u, bits, BRUTEFORCE_BUDGET)
}

/// [`fame_bruteforce`] with an explicit candidate budget.
pub fn fame_bruteforce_with_budget(
    h: &CMatrix,
    noise: &LinkNoise,
    u: usize,
    bits: u32,
    budget: u64,
) -> Result<FiniteAlphabetRow> {
    check_bits(bits)?;
    check_user(h, u)?;
    let b_ant = h.rows();
    let candidates = bruteforce_candidates(b_ant, bits);
    if candidates > budget as u128 {
        return Err(EqualizeError::BudgetExceeded { candidates, budget });
    }
    let rho = noise.rho();
    let hu = column_norm_sq(h, u);
    let levels = 1usize << bits;
    let alphabet: Vec<f64> = (0..levels)
        .map(|k| (2 * k as i64 + 1 - levels as i64) as f64)
        .collect();
    let parts = 2 * b_ant;
    // digits[2b] / digits[2b + 1]: alphabet index of Re / Im of antenna b.
    let mut digits = vec![0usize; parts];
    digits[0] = levels / 2;
    let mut x = CVector::zeros(b_ant);
    let mut scratch = vec![Complex64::new(0.0, 0.0); h.cols()];
    let mut best: Option<(f64, CVector)> = None;
    'search: loop {
        for (b, z) in x.iter_mut().enumerate() {
            *z = Complex64::new(alphabet[digits[2 * b]], alphabet[digits[2 * b + 1]]);
        }
        if let Some(obj) = objective_with(h, rho, u, &x, &mut scratch, hu) {
            if best.as_ref().is_none_or(|(o, _)| obj < *o) {
                best = Some((obj, x.clone()));
            }
        }
        // Odometer, last part varying fastest; stops once the first part
        // runs past the top of the alphabet.
        let mut i = parts;
        loop {
            if i == 0 {
                break 'search;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < levels {
                break;
            }
            digits[i] = 0;
        }
    }
    let (_, xb) = best.ok_or(EqualizeError::DegenerateDirection { user: u })?;
    FiniteAlphabetRow::new(h, noise, u, xb, bits, &mut scratch, hu)
}
