//! Monte-Carlo temperature estimation from Gaussian measurement outcomes.
//!
//! Outcomes are zero-mean Gaussian with a temperature-dependent variance
//! v(T). The maximum-likelihood estimate solves v(T̂) = Σx²/n, found by
//! bisection. Variances use the physical quadrature scale v = σ/2; any fixed
//! rescaling changes neither the Fisher information nor T̂.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::fisher::joint_lambda;

/// Interrogation time used for "steady state": γt = 40, where e^{−γt} is
/// below the channel's clamp and the state is exactly thermal.
pub const STEADY_STATE_GAMMA_T: f64 = 40.0;

/// Relative tolerance of the MLE bisection.
pub const MLE_REL_TOL: f64 = 1e-10;

/// Interior points probed when checking that v(T) increases on a bracket.
const MONOTONE_PROBES: usize = 16;

/// Temperature dependence of the outcome variance of one repetition.
pub trait VarianceModel: Clone + Send + Sync {
    /// Variance of each outcome at temperature `temperature`.
    fn variance(&self, temperature: f64) -> Result<f64>;

    /// ∂v/∂T.
    fn variance_derivative(&self, temperature: f64) -> Result<f64>;

    /// Interrogation time of one repetition.
    fn time(&self) -> f64;

    /// Independent outcomes per repetition, all with variance v(T).
    fn channels(&self) -> usize {
        1
    }

    /// Fisher information of one repetition: channels · ½ (v′/v)².
    fn fisher_per_repetition(&self, temperature: f64) -> Result<f64> {
        let v = self.variance(temperature)?;
        let dv = self.variance_derivative(temperature)?;
        Ok(self.channels() as f64 * 0.5 * (dv / v).powi(2))
    }
}

/// Homodyne of x (with added noise L) on an evolved squeezed vacuum:
/// v = (σ₁₁ + L)/2 with σ₁₁ = e^{−γt} r + (1 − e^{−γt}) ν(T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneModel {
    pub gamma: f64,
    pub omega: f64,
    pub r: f64,
    pub t: f64,
    pub l: f64,
}

impl HomodyneModel {
    pub fn new(gamma: f64, omega: f64, r: f64, t: f64, l: f64) -> Result<Self> {
        ChannelParams::new(gamma, omega, 1.0)?;
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::param("r", format!("r must be in (0,1], got {r}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::param(
                "t",
                format!("must be finite and >= 0, got {t}"),
            ));
        }
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::param("L", format!("must be in [0,1], got {l}")));
        }
        Ok(Self {
            gamma,
            omega,
            r,
            t,
            l,
        })
    }

    /// Thermalised probe (γt = 40); r is irrelevant there.
    pub fn steady_state(gamma: f64, omega: f64, l: f64) -> Result<Self> {
        Self::new(gamma, omega, 1.0, STEADY_STATE_GAMMA_T / gamma, l)
    }

    fn params(&self, temperature: f64) -> Result<ChannelParams> {
        ChannelParams::new(self.gamma, self.omega, temperature)
    }

    /// [σ_t]₁₁ at `temperature`.
    pub fn sigma11(&self, temperature: f64) -> Result<f64> {
        let p = self.params(temperature)?;
        Ok(p.decay(self.t) * self.r + p.thermalized_fraction(self.t) * p.nu())
    }
}

impl VarianceModel for HomodyneModel {
    fn variance(&self, temperature: f64) -> Result<f64> {
        Ok(0.5 * (self.sigma11(temperature)? + self.l))
    }

    fn variance_derivative(&self, temperature: f64) -> Result<f64> {
        let p = self.params(temperature)?;
        Ok(0.5 * p.thermalized_fraction(self.t) * p.dnu_dt())
    }

    fn time(&self) -> f64 {
        self.t
    }
}

/// Joint ansatz: two independent homodyne outcomes per repetition, each
/// with variance [σ′_t]₁₁/2 = λ/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointModel {
    pub gamma: f64,
    pub omega: f64,
    pub r: f64,
    pub t: f64,
}

impl JointModel {
    pub fn new(gamma: f64, omega: f64, r: f64, t: f64) -> Result<Self> {
        let p = ChannelParams::new(gamma, omega, 1.0)?;
        joint_lambda(r, &p, t)?;
        Ok(Self { gamma, omega, r, t })
    }

    fn lambda(&self, temperature: f64) -> Result<(f64, f64)> {
        joint_lambda(
            self.r,
            &ChannelParams::new(self.gamma, self.omega, temperature)?,
            self.t,
        )
    }
}

impl VarianceModel for JointModel {
    fn variance(&self, temperature: f64) -> Result<f64> {
        Ok(0.25 * self.lambda(temperature)?.0)
    }

    fn variance_derivative(&self, temperature: f64) -> Result<f64> {
        Ok(0.25 * self.lambda(temperature)?.1)
    }

    fn channels(&self) -> usize {
        2
    }

    fn time(&self) -> f64 {
        self.t
    }
}

/// Outcomes of M repetitions (channel-interleaved) with their generator.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch<V> {
    pub outcomes: Vec<f64>,
    pub model: V,
    pub seed: u64,
    pub temperature: f64,
}

impl<V: VarianceModel> SampleBatch<V> {
    pub fn repetitions(&self) -> usize {
        self.outcomes.len() / self.model.channels()
    }

    /// Σx²/n, the ML estimate of the variance of a zero-mean Gaussian.
    pub fn second_moment(&self) -> Result<f64> {
        if self.outcomes.is_empty() {
            return Err(Error::EmptyBatch);
        }
        Ok(self.outcomes.iter().map(|x| x * x).sum::<f64>() / self.outcomes.len() as f64)
    }

    /// Outcomes of channel `k` of every repetition.
    pub fn channel(&self, k: usize) -> Vec<f64> {
        let c = self.model.channels();
        self.outcomes.iter().skip(k).step_by(c).copied().collect()
    }
}

/// Generator for trial `trial` of a study with base seed `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws `m` repetitions from `model` at `temperature`.
pub fn sample_with<V: VarianceModel>(
    model: &V,
    temperature: f64,
    m: usize,
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Result<SampleBatch<V>> {
    let sd = model.variance(temperature)?.sqrt();
    let n = m * model.channels();
    let outcomes = (0..n)
        .map(|_| sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
        .collect();
    Ok(SampleBatch {
        outcomes,
        model: model.clone(),
        seed,
        temperature,
    })
}

/// `m` homodyne outcomes, deterministic in `seed`.
pub fn sample_homodyne(
    model: &HomodyneModel,
    temperature: f64,
    m: usize,
    seed: u64,
) -> Result<SampleBatch<HomodyneModel>> {
    sample_with(
        model,
        temperature,
        m,
        &mut ChaCha8Rng::seed_from_u64(seed),
        seed,
    )
}

/// `m` pairs (x of output 1, p of output 2), interleaved.
pub fn sample_joint(
    model: &JointModel,
    temperature: f64,
    m: usize,
    seed: u64,
) -> Result<SampleBatch<JointModel>> {
    sample_with(
        model,
        temperature,
        m,
        &mut ChaCha8Rng::seed_from_u64(seed),
        seed,
    )
}

/// Which end of the bracket an estimate was clipped to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clip {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleEstimate {
    pub temperature: f64,
    pub clipped: Option<Clip>,
}

/// Checks that v(T) increases on `[lo, hi]`.
pub fn check_monotone<V: VarianceModel>(model: &V, lo: f64, hi: f64) -> Result<()> {
    let mut prev = model.variance(lo)?;
    for k in 1..=MONOTONE_PROBES + 1 {
        let temp = lo + (hi - lo) * k as f64 / (MONOTONE_PROBES + 1) as f64;
        let v = model.variance(temp)?;
        if !(v > prev) {
            return Err(Error::NonMonotoneModel { lo, hi });
        }
        prev = v;
    }
    Ok(())
}

/// Maximum-likelihood temperature: solves v(T̂) = Σx²/n on `bracket`.
///
/// Outside the model's range on the bracket the estimate is clipped to the
/// nearer end and flagged.
pub fn mle_temperature<V: VarianceModel>(
    batch: &SampleBatch<V>,
    bracket: (f64, f64),
) -> Result<MleEstimate> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::param(
            "bracket",
            format!("need 0 < lo < hi, got [{lo}, {hi}]"),
        ));
    }
    let s2 = batch.second_moment()?;
    check_monotone(&batch.model, lo, hi)?;
    mle_from_second_moment(&batch.model, s2, bracket)
}

fn mle_from_second_moment<V: VarianceModel>(
    model: &V,
    s2: f64,
    (lo, hi): (f64, f64),
) -> Result<MleEstimate> {
    if s2 <= model.variance(lo)? {
        return Ok(MleEstimate {
            temperature: lo,
            clipped: Some(Clip::Low),
        });
    }
    if s2 >= model.variance(hi)? {
        return Ok(MleEstimate {
            temperature: hi,
            clipped: Some(Clip::High),
        });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= MLE_REL_TOL * mid {
            break;
        }
        if model.variance(mid)? < s2 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(MleEstimate {
        temperature: 0.5 * (a + b),
        clipped: None,
    })
}

/// Default bracket (T/10, 10T).
pub fn default_bracket(temperature: f64) -> (f64, f64) {
    (temperature / 10.0, temperature * 10.0)
}

/// Summary of a Cramér–Rao study.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationReport {
    pub temperature: f64,
    pub t: f64,
    pub repetitions: usize,
    pub trials: usize,
    pub seed: u64,
    /// Mean of T̂ over trials.
    pub t_hat_mean: f64,
    pub empirical_mse: f64,
    /// Fisher information of one repetition.
    pub fisher: f64,
    /// 1/(M·F).
    pub crb: f64,
    pub ratio: f64,
    pub clipped: usize,
}

impl EstimationReport {
    /// `|mean(T̂) − T| < 3·√(MSE/trials)`.
    pub fn is_consistent(&self) -> bool {
        (self.t_hat_mean - self.temperature).abs()
            < 3.0 * (self.empirical_mse / self.trials as f64).sqrt()
    }

    /// `key=value` lines in a fixed order.
    pub fn to_key_value(&self) -> String {
        format!(
            "T_true={}\nt={}\nM={}\ntrials={}\nseed={}\nT_hat={}\nempirical_mse={}\nfisher={}\ncrb={}\nratio={}\nclipped={}\n",
            self.temperature,
            self.t,
            self.repetitions,
            self.trials,
            self.seed,
            self.t_hat_mean,
            self.empirical_mse,
            self.fisher,
            self.crb,
            self.ratio,
            self.clipped
        )
    }
}

/// Runs `trials` independent experiments of `m` repetitions each.
///
/// Trial k draws from stream k of a ChaCha8 generator keyed by `seed`, so
/// the report does not depend on how trials are scheduled on threads.
pub fn mse_study<V: VarianceModel>(
    model: &V,
    temperature: f64,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<EstimationReport> {
    if trials < 100 {
        return Err(Error::param(
            "trials",
            format!("must be at least 100, got {trials}"),
        ));
    }
    if m < 2 {
        return Err(Error::param("M", format!("must be at least 2, got {m}")));
    }
    let bracket = default_bracket(temperature);
    check_monotone(model, bracket.0, bracket.1)?;
    let estimates: Vec<MleEstimate> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, k as u64);
            let batch = sample_with(model, temperature, m, &mut rng, seed)?;
            mle_from_second_moment(model, batch.second_moment()?, bracket)
        })
        .collect::<Result<_>>()?;

    let n = trials as f64;
    let t_hat_mean = estimates.iter().map(|e| e.temperature).sum::<f64>() / n;
    let empirical_mse = estimates
        .iter()
        .map(|e| (e.temperature - temperature).powi(2))
        .sum::<f64>()
        / n;
    let fisher = model.fisher_per_repetition(temperature)?;
    let crb = 1.0 / (m as f64 * fisher);
    Ok(EstimationReport {
        temperature,
        t: model.time(),
        repetitions: m,
        trials,
        seed,
        t_hat_mean,
        empirical_mse,
        fisher,
        crb,
        ratio: empirical_mse / crb,
        clipped: estimates.iter().filter(|e| e.clipped.is_some()).count(),
    })
}

/// Writes a homodyne batch as `# seed=.. T=.. t=.. L=..` plus one outcome
/// per line.
pub fn write_samples<W: Write>(
    out: &mut W,
    batch: &SampleBatch<HomodyneModel>,
) -> std::io::Result<()> {
    writeln!(
        out,
        "# seed={} T={} t={} L={}",
        batch.seed, batch.temperature, batch.model.t, batch.model.l
    )?;
    for x in &batch.outcomes {
        writeln!(out, "{x}")?;
    }
    Ok(())
}

/// Fisher information of N(0, v(T)) by central differences of ν, used as a
/// model-independent check of [`VarianceModel::fisher_per_repetition`].
pub fn numeric_fisher<V: VarianceModel>(model: &V, temperature: f64, rel_step: f64) -> Result<f64> {
    let h = rel_step * temperature;
    let v = model.variance(temperature)?;
    let dv = (model.variance(temperature + h)? - model.variance(temperature - h)?) / (2.0 * h);
    Ok(model.channels() as f64 * 0.5 * (dv / v).powi(2))
}
