//! Quantum and classical Fisher information for temperature estimation.
//!
//! Conventions: the mean term of both the QFI and the Gaussian CFI carries a
//! factor 2 (outcomes of a Gaussian measurement have covariance
//! (σ + σᴹ)/2 in the σ_vac = I normalization). In this model ∂_T d_t = 0, so
//! the factor never affects a number produced here.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::channel::{cov_temperature_derivative, evolve_state, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::{
    apply_symplectic, beamsplitter_50_50, check_physical, check_symmetric, squeezed_vacuum,
    symmetrize, tmsv, williamson, GaussianState, RankOneMeasurement,
};
use crate::optimize::{argmax, golden_section_max_log, log_grid, Maximum};

/// Relative singular-value cutoff of the QFI pseudoinverse.
pub const PINV_CUTOFF: f64 = 1e-10;

/// A Fisher information together with its rate F/t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherResult {
    pub value: f64,
    pub rate: f64,
    pub t: f64,
}

impl FisherResult {
    /// Rate is `value / t`, and zero at `t = 0`.
    pub fn new(value: f64, t: f64) -> Self {
        let rate = if t > 0.0 { value / t } else { 0.0 };
        Self { value, rate, t }
    }

    pub fn from_rate(rate: f64, t: f64) -> Self {
        Self {
            value: rate * t,
            rate,
            t,
        }
    }
}

/// How ∂σ_t/∂T is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeSpec {
    Analytic,
    /// Central differences with step `rel_step · T`.
    FiniteDifference {
        rel_step: f64,
    },
}

impl DerivativeSpec {
    pub fn finite_difference(rel_step: f64) -> Result<Self> {
        if !(1e-8..=1e-3).contains(&rel_step) {
            return Err(Error::param(
                "fd_step",
                format!("must be in [1e-8, 1e-3], got {rel_step}"),
            ));
        }
        Ok(Self::FiniteDifference { rel_step })
    }
}

/// ∂d/∂T and ∂σ/∂T.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl StateDerivative {
    pub fn zeros(num_modes: usize) -> Self {
        let n = 2 * num_modes;
        Self {
            mean: DVector::zeros(n),
            cov: DMatrix::zeros(n, n),
        }
    }
}

/// Evolves `initial` through the channel and returns the state with its
/// temperature derivative.
pub fn evolve_with_derivative(
    initial: &GaussianState,
    params: &ChannelParams,
    t: f64,
    spec: DerivativeSpec,
) -> Result<(GaussianState, StateDerivative)> {
    let state = evolve_state(initial, params, t)?;
    let deriv = match spec {
        DerivativeSpec::Analytic => StateDerivative {
            mean: DVector::zeros(state.mean().len()),
            cov: cov_temperature_derivative(state.num_modes(), params, t)?,
        },
        DerivativeSpec::FiniteDifference { rel_step } => {
            DerivativeSpec::finite_difference(rel_step)?;
            let temp = params.temperature();
            let h = rel_step * temp;
            let hi = evolve_state(initial, &params.with_temperature(temp + h)?, t)?;
            let lo = evolve_state(initial, &params.with_temperature(temp - h)?, t)?;
            StateDerivative {
                mean: (hi.mean() - lo.mean()) / (2.0 * h),
                cov: symmetrize((hi.cov() - lo.cov()) / (2.0 * h)),
            }
        }
    };
    Ok((state, deriv))
}

/// Squeezed vacuum diag(r, 1/r) after time `t`, with analytic derivative.
pub fn squeezed_probe(
    r: f64,
    params: &ChannelParams,
    t: f64,
) -> Result<(GaussianState, StateDerivative)> {
    evolve_with_derivative(&squeezed_vacuum(r)?, params, t, DerivativeSpec::Analytic)
}

/// TMSV with mode 0 exposed to the bath for time `t`.
pub fn tmsv_probe(
    r: f64,
    params: &ChannelParams,
    t: f64,
) -> Result<(GaussianState, StateDerivative)> {
    evolve_with_derivative(&tmsv(r)?, params, t, DerivativeSpec::Analytic)
}

fn check_dims(
    cov: &DMatrix<f64>,
    dcov: &DMatrix<f64>,
    mean: &DVector<f64>,
    dmean: &DVector<f64>,
) -> Result<usize> {
    let n = cov.nrows();
    let ok = n > 0
        && n % 2 == 0
        && cov.ncols() == n
        && dcov.shape() == (n, n)
        && mean.len() == n
        && dmean.len() == n;
    if !ok {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n} covariances and length-{n} means"),
            actual: format!(
                "cov {:?}, dcov {:?}, mean {}, dmean {}",
                cov.shape(),
                dcov.shape(),
                mean.len(),
                dmean.len()
            ),
        });
    }
    check_symmetric(dcov)?;
    Ok(n)
}

/// QFI of a Gaussian family:
/// 2 ∂dᵀ σ⁻¹ ∂d + ½ ⟨vec ∂σ| (σ⊗σ − Ω⊗Ω)⁺ |vec ∂σ⟩.
///
/// The linear system is solved in the Williamson frame of σ, where it
/// becomes (D⊗D − Ω⊗Ω) and is singular only along directions with
/// νⱼνₖ = 1. Eigenvalues below `PINV_CUTOFF` times the largest are
/// dropped.
pub fn qfi_general(
    cov: &DMatrix<f64>,
    dcov: &DMatrix<f64>,
    mean: &DVector<f64>,
    dmean: &DVector<f64>,
) -> Result<f64> {
    check_dims(cov, dcov, mean, dmean)?;
    let phys = check_physical(cov)?;
    if !phys.is_physical {
        return Err(Error::Unphysical(phys.min_symplectic_eigenvalue));
    }

    let mut value = 0.0;
    if dmean.amax() > 0.0 {
        let chol = cov.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        value += 2.0 * dmean.dot(&chol.solve(dmean));
    }
    if dcov.amax() > 0.0 {
        let w = williamson(cov)?;
        let s_inv = w.transform.inverse();
        let s_inv = s_inv.matrix();
        let x = symmetrize(s_inv * dcov * s_inv.transpose());
        value += 0.5 * williamson_frame_form(&x, &w.eigenvalues);
    }
    Ok(value.max(0.0))
}

/// ⟨vec x| (D⊗D − Ω⊗Ω)⁺ |vec x⟩ for D = ⊕ νₖ I₂.
///
/// Ω⊗Ω only couples entry (p, q) with (p', q'), where p' is the other
/// quadrature of the same mode, so the operator is a sum of 2×2 blocks
/// [[μ, −c], [−c, μ]] with μ = ν_{p}ν_{q} and c = ±1.
fn williamson_frame_form(x: &DMatrix<f64>, nus: &[f64]) -> f64 {
    let n = x.nrows();
    let nu = |p: usize| nus[p / 2];
    // Ω e_p = sign(p) e_p'
    let sign = |p: usize| if p % 2 == 0 { -1.0 } else { 1.0 };
    let top = nus.iter().fold(0.0f64, |m, &v| m.max(v * v)) + 1.0;
    let cut = PINV_CUTOFF * top;
    let inv = |lambda: f64| if lambda > cut { 1.0 / lambda } else { 0.0 };
    let mut sum = 0.0;
    for p in 0..n {
        for q in 0..n {
            let (pp, qq) = (p ^ 1, q ^ 1);
            let mu = nu(p) * nu(q);
            let c = sign(p) * sign(q);
            let (xa, xb) = (x[(p, q)], x[(pp, qq)]);
            // eigenvalue μ − c along (1, 1), μ + c along (1, −1)
            let along = 0.5 * (xa + xb) * inv(mu - c);
            let across = 0.5 * (xa - xb) * inv(mu + c);
            sum += xa * (along + across);
        }
    }
    sum
}

/// [`qfi_general`] on a state and its derivative.
pub fn qfi(state: &GaussianState, deriv: &StateDerivative) -> Result<f64> {
    qfi_general(state.cov(), &deriv.cov, state.mean(), &deriv.mean)
}

/// A Gaussian measurement: outcomes y = P x + noise, with y distributed as
/// N(P d, (P σ Pᵀ + N)/2).
///
/// A general-dyne measurement with covariance σᴹ on all modes is P = I,
/// N = σᴹ; homodyne of quadrature q is P = qᵀ, N = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasurement {
    readout: DMatrix<f64>,
    noise: DMatrix<f64>,
}

impl GaussianMeasurement {
    pub fn new(readout: DMatrix<f64>, noise: DMatrix<f64>) -> Result<Self> {
        let k = readout.nrows();
        if k == 0 || noise.shape() != (k, k) {
            return Err(Error::DimensionMismatch {
                expected: format!("{k}x{k} noise for {k} readout rows"),
                actual: format!("{:?}", noise.shape()),
            });
        }
        check_symmetric(&noise)?;
        Ok(Self { readout, noise })
    }

    /// Measurement with covariance σᴹ on every mode.
    pub fn general(sigma_m: DMatrix<f64>) -> Result<Self> {
        let n = sigma_m.nrows();
        Self::new(DMatrix::identity(n, n), sigma_m)
    }

    /// Noiseless readout of the quadratures given as rows.
    pub fn quadratures(rows: DMatrix<f64>) -> Result<Self> {
        let k = rows.nrows();
        Self::new(rows, DMatrix::zeros(k, k))
    }

    /// A rank-one measurement on `mode` of an `num_modes`-mode state.
    pub fn rank_one(meas: &RankOneMeasurement, mode: usize, num_modes: usize) -> Result<Self> {
        if mode >= num_modes {
            return Err(Error::param("mode", format!("index {mode} out of range")));
        }
        let n = 2 * num_modes;
        match meas.covariance() {
            None => {
                let [c, s] = meas.quadrature();
                let mut row = DMatrix::zeros(1, n);
                row[(0, 2 * mode)] = c;
                row[(0, 2 * mode + 1)] = s;
                Self::quadratures(row)
            }
            Some(cm) => {
                let mut p = DMatrix::zeros(2, n);
                p[(0, 2 * mode)] = 1.0;
                p[(1, 2 * mode + 1)] = 1.0;
                Self::new(p, DMatrix::from_column_slice(2, 2, cm.as_slice()))
            }
        }
    }

    pub fn readout(&self) -> &DMatrix<f64> {
        &self.readout
    }

    pub fn noise(&self) -> &DMatrix<f64> {
        &self.noise
    }
}

/// CFI of a Gaussian measurement:
/// 2 ∂dᵀ(σ + σᴹ)⁻¹∂d + ½ Tr[((σ + σᴹ)⁻¹ ∂σ)²], after projecting onto the
/// measured quadratures.
pub fn cfi_gaussian(
    cov: &DMatrix<f64>,
    dcov: &DMatrix<f64>,
    mean: &DVector<f64>,
    dmean: &DVector<f64>,
    meas: &GaussianMeasurement,
) -> Result<f64> {
    let n = check_dims(cov, dcov, mean, dmean)?;
    let p = &meas.readout;
    if p.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("readout with {n} columns"),
            actual: format!("{:?}", p.shape()),
        });
    }
    let s = symmetrize(p * cov * p.transpose() + &meas.noise);
    let ds = p * dcov * p.transpose();
    let dm = p * dmean;
    let chol = s
        .clone()
        .cholesky()
        .ok_or(Error::Singular("sigma + sigma_M"))?;
    let a = chol.solve(&ds);
    let mut value = 0.5 * (&a * &a).trace();
    if dm.amax() > 0.0 {
        value += 2.0 * dm.dot(&chol.solve(&dm));
    }
    Ok(value.max(0.0))
}

/// Single-mode covariance-term CFI for a rank-one measurement.
pub fn cfi_single_mode(cov: &Matrix2<f64>, dcov: &Matrix2<f64>, meas: &RankOneMeasurement) -> f64 {
    match meas.covariance() {
        None => {
            let [c, s] = meas.quadrature();
            let v = c * c * cov[(0, 0)] + 2.0 * c * s * cov[(0, 1)] + s * s * cov[(1, 1)];
            let dv = c * c * dcov[(0, 0)] + 2.0 * c * s * dcov[(0, 1)] + s * s * dcov[(1, 1)];
            0.5 * (dv / v).powi(2)
        }
        Some(_) => {
            // work in the frame where σᴹ = diag(L, 1/L)
            let rot = meas.rotation();
            let s = rot.transpose() * cov * rot;
            let ds = rot.transpose() * dcov * rot;
            let l = meas.l();
            let (a, b, c) = (
                s[(0, 0)] + l,
                s[(1, 1)] + 1.0 / l,
                0.5 * (s[(0, 1)] + s[(1, 0)]),
            );
            let det = a * b - c * c;
            let inv = Matrix2::new(b, -c, -c, a) / det;
            let m = inv * ds;
            0.5 * (m * m).trace()
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("r", format!("r must be in (0,1], got {r}")))
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            "t",
            format!("must be finite and >= 0, got {t}"),
        ))
    }
}

/// Closed-form QFI of an evolved squeezed vacuum diag(r, 1/r):
/// (1−e^{−γt})²(∂ν)²(a² + b² + 2) / (2(a²b² − 1)) with a, b the evolved
/// diagonal.
pub fn qfi_rate_single_closed(r: f64, params: &ChannelParams, t: f64) -> Result<FisherResult> {
    check_r(r)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    let e = params.decay(t);
    let f = params.thermalized_fraction(t);
    let (nu, nm1, dnu) = (params.nu(), params.nu_minus_one(), params.dnu_dt());
    let a = e * r + f * nu;
    let b = e / r + f * nu;
    // ab − 1 = f · bracket, with every term of bracket nonnegative
    let bracket = e * (nu * (1.0 - r).powi(2) / r + 2.0 * nm1) + f * nm1 * (nu + 1.0);
    let value = f * dnu * dnu * (a * a + b * b + 2.0) / (2.0 * bracket * (a * b + 1.0));
    Ok(FisherResult::new(value, t))
}

/// Short-time, strong-squeezing QFI rate γ(∂ν)² / (2(γtν² + 2νr)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTimeRate {
    pub result: FisherResult,
    /// False when r ≥ 0.1 or γt ≥ 0.1.
    pub in_regime: bool,
}

pub fn qfi_rate_single_short(r: f64, params: &ChannelParams, t: f64) -> Result<ShortTimeRate> {
    check_r(r)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    let (g, nu, dnu) = (params.gamma(), params.nu(), params.dnu_dt());
    let rate = g * dnu * dnu / (2.0 * (g * t * nu * nu + 2.0 * nu * r));
    Ok(ShortTimeRate {
        result: FisherResult::from_rate(rate, t),
        in_regime: r < 0.1 && g * t < 0.1,
    })
}

/// Exact CFI of the diagonal measurement diag(L, 1/L) on an evolved
/// squeezed vacuum; `l = 0` is homodyne of x.
pub fn cfi_homodyne_closed(r: f64, params: &ChannelParams, t: f64, l: f64) -> Result<FisherResult> {
    check_r(r)?;
    check_t(t)?;
    if !(0.0..=1.0).contains(&l) {
        return Err(Error::param("L", format!("must be in [0,1], got {l}")));
    }
    let e = params.decay(t);
    let f = params.thermalized_fraction(t);
    let (nu, dnu) = (params.nu(), params.dnu_dt());
    let first = 1.0 / (r * e + l + nu * f).powi(2);
    let second = (l * r / (r + l * e + l * nu * r * f)).powi(2);
    let value = 0.5 * (f * dnu).powi(2) * (first + second);
    Ok(FisherResult::new(value, t))
}

/// Homodyne CFI for γt ≪ 1: (γt ∂ν)² / (2(r + νγt)²).
pub fn cfi_homodyne_approx(r: f64, params: &ChannelParams, t: f64) -> Result<FisherResult> {
    check_r(r)?;
    check_t(t)?;
    let gt = params.gamma() * t;
    let value = (gt * params.dnu_dt()).powi(2) / (2.0 * (r + params.nu() * gt).powi(2));
    Ok(FisherResult::new(value, t))
}

/// CFI of a rank-one measurement R(θ)diag(L, 1/L)R(θ)ᵀ on a diagonal
/// evolved covariance diag(σ₁₁, σ₂₂) with ∂σ = (1−e^{−γt})∂ν I₂.
pub fn cfi_rank1_general(
    sigma11: f64,
    sigma22: f64,
    params: &ChannelParams,
    t: f64,
    meas: &RankOneMeasurement,
) -> Result<FisherResult> {
    check_t(t)?;
    if !(sigma11 > 0.0 && sigma22 > 0.0) {
        return Err(Error::param("sigma", "diagonal entries must be positive"));
    }
    let ds = params.thermalized_fraction(t) * params.dnu_dt();
    let (a, b) = (sigma11, sigma22);
    let tr = a + b;
    let c2 = (2.0 * meas.theta()).cos();
    let l = meas.l();
    let num =
        1.0 + l * (tr + l * (l * l + a * a + b * b + l * tr)) - l * (l * l - 1.0) * (b - a) * c2;
    let den = (tr + l * (2.0 + 2.0 * a * b + l * tr) + (l * l - 1.0) * (b - a) * c2).powi(2);
    Ok(FisherResult::new(2.0 * ds * ds * num / den, t))
}

/// λ = (1 + e^{−γt})/r + ν(1 − e^{−γt}) − 2e^{−γt/2}√(r⁻² − 1), evaluated
/// without cancellation, together with ∂λ/∂T.
pub fn joint_lambda(r: f64, params: &ChannelParams, t: f64) -> Result<(f64, f64)> {
    check_r(r)?;
    check_t(t)?;
    if r == 1.0 {
        return Err(Error::param(
            "r",
            "joint measurement needs r < 1 (r = 1 has no probe-auxiliary correlations)",
        ));
    }
    let f = params.thermalized_fraction(t);
    let (sqrt_e, one_minus_sqrt_e) = if params.decay(t) == 0.0 {
        (0.0, 1.0)
    } else {
        let h = -0.5 * params.gamma() * t;
        (h.exp(), -h.exp_m1())
    };
    let lambda = (one_minus_sqrt_e.powi(2)
        + 2.0 * sqrt_e * r * r / (1.0 + ((1.0 - r) * (1.0 + r)).sqrt()))
        / r
        + params.nu() * f;
    Ok((lambda, f * params.dnu_dt()))
}

/// CFI of the joint ansatz: inverse 50:50 beamsplitter on (probe,
/// auxiliary), then homodyne of x on output 1 and p on output 2.
/// Value (∂λ/λ)², rate (∂λ)²/(tλ²).
pub fn cfi_joint_two_mode(r: f64, params: &ChannelParams, t: f64) -> Result<FisherResult> {
    let (lambda, dlambda) = joint_lambda(r, params, t)?;
    Ok(FisherResult::new((dlambda / lambda).powi(2), t))
}

/// Short-time joint rate 16r²γ²t(∂ν)² / [(γt)² + 4r² + 4rγtν]².
pub fn cfi_joint_short(r: f64, params: &ChannelParams, t: f64) -> Result<FisherResult> {
    check_r(r)?;
    check_t(t)?;
    let (g, nu, dnu) = (params.gamma(), params.nu(), params.dnu_dt());
    let gt = g * t;
    let den = gt * gt + 4.0 * r * r + 4.0 * r * gt * nu;
    Ok(FisherResult::from_rate(
        16.0 * r * r * g * g * t * dnu * dnu / (den * den),
        t,
    ))
}

/// State after the inverse beamsplitter S_BSᵀ used by the joint ansatz.
pub fn joint_output_state(state: &GaussianState) -> Result<GaussianState> {
    apply_symplectic(&beamsplitter_50_50().transpose(), state)
}

/// Derivative of [`joint_output_state`].
pub fn joint_output_derivative(deriv: &StateDerivative) -> StateDerivative {
    let s = beamsplitter_50_50();
    let st = s.matrix().transpose();
    StateDerivative {
        mean: &st * &deriv.mean,
        cov: symmetrize(&st * &deriv.cov * s.matrix()),
    }
}

/// Homodyne of x on mode 0 and p on mode 1.
pub fn joint_readout() -> GaussianMeasurement {
    let mut rows = DMatrix::zeros(2, 4);
    rows[(0, 0)] = 1.0;
    rows[(1, 3)] = 1.0;
    GaussianMeasurement {
        readout: rows,
        noise: DMatrix::zeros(2, 2),
    }
}

/// Heuristic optimal interrogation time t* = r/(γν).
pub fn optimal_time_heuristic(r: f64, params: &ChannelParams) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::param("r", format!("must be positive, got {r}")));
    }
    Ok(r / (params.gamma() * params.nu()))
}

/// Maximises `rate(t)` by golden-section search in log t over
/// [t*/10, 10 t*].
pub fn refine_optimal_time<F>(rate: F, t_star: f64) -> Result<Maximum>
where
    F: Fn(f64) -> f64,
{
    if !(t_star > 0.0 && t_star.is_finite()) {
        return Err(Error::param(
            "t_star",
            format!("must be positive, got {t_star}"),
        ));
    }
    golden_section_max_log(rate, t_star / 10.0, t_star * 10.0, 1e-10, 500)
}

/// Optimal time and rate of homodyne detection on an evolved squeezed
/// vacuum.
pub fn homodyne_optimum(r: f64, params: &ChannelParams) -> Result<FisherResult> {
    let t_star = optimal_time_heuristic(r, params)?;
    let m = refine_optimal_time(
        |t| cfi_homodyne_closed(r, params, t, 0.0).map_or(f64::NAN, |f| f.rate),
        t_star,
    )?;
    Ok(FisherResult::from_rate(m.value, m.x))
}

/// Optimal time and rate of the joint two-mode ansatz.
pub fn joint_optimum(r: f64, params: &ChannelParams) -> Result<FisherResult> {
    let t_star = optimal_time_heuristic(r, params)?;
    let m = refine_optimal_time(
        |t| cfi_joint_two_mode(r, params, t).map_or(f64::NAN, |f| f.rate),
        t_star,
    )?;
    Ok(FisherResult::from_rate(m.value, m.x))
}

/// Number of θ grid points in [0, π).
pub const THETA_POINTS: usize = 181;
/// Number of log-spaced L grid points in [L_MIN, 1].
pub const L_POINTS: usize = 60;
pub const L_MIN: f64 = 1e-6;
/// Relative tolerance under which grid values are treated as equal.
pub const ARGMAX_TIE: f64 = 1e-12;

/// CFI over a (θ, L) grid, row-major in θ.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementGrid {
    pub thetas: Vec<f64>,
    pub ls: Vec<f64>,
    pub values: Vec<f64>,
}

impl MeasurementGrid {
    pub fn get(&self, i_theta: usize, i_l: usize) -> f64 {
        self.values[i_theta * self.ls.len() + i_l]
    }

    /// Index of the best θ for the `i_l`-th L. Values within `ARGMAX_TIE`
    /// (relative) of the maximum count as ties and the first one wins;
    /// at L = 1 the measurement is θ-independent.
    pub fn argmax_theta(&self, i_l: usize) -> usize {
        let col: Vec<f64> = (0..self.thetas.len()).map(|i| self.get(i, i_l)).collect();
        let Some(best) = argmax(&col) else { return 0 };
        let floor = col[best] - ARGMAX_TIE * col[best].abs();
        col.iter().position(|&v| v >= floor).unwrap_or(best)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn default_thetas() -> Vec<f64> {
    (0..THETA_POINTS)
        .map(|i| std::f64::consts::PI * i as f64 / THETA_POINTS as f64)
        .collect()
}

pub fn default_ls() -> Vec<f64> {
    log_grid(L_MIN, 1.0, L_POINTS).expect("static grid")
}

fn as_matrix2(m: &DMatrix<f64>) -> Result<Matrix2<f64>> {
    if m.shape() != (2, 2) {
        return Err(Error::DimensionMismatch {
            expected: "2x2".into(),
            actual: format!("{:?}", m.shape()),
        });
    }
    Ok(Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]))
}

/// Evaluates the single-mode CFI on a (θ, L) grid.
pub fn measurement_grid(
    cov: &DMatrix<f64>,
    dcov: &DMatrix<f64>,
    thetas: &[f64],
    ls: &[f64],
) -> Result<MeasurementGrid> {
    let (s, ds) = (as_matrix2(cov)?, as_matrix2(dcov)?);
    let mut values = Vec::with_capacity(thetas.len() * ls.len());
    for &theta in thetas {
        for &l in ls {
            values.push(cfi_single_mode(
                &s,
                &ds,
                &RankOneMeasurement::new(l, theta)?,
            ));
        }
    }
    Ok(MeasurementGrid {
        thetas: thetas.to_vec(),
        ls: ls.to_vec(),
        values,
    })
}

/// Best rank-one Gaussian measurement found by the grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalMeasurement {
    pub measurement: RankOneMeasurement,
    /// CFI (not rate) of `measurement`.
    pub value: f64,
    /// Largest value on the coarse grid.
    pub grid_max: f64,
}

/// Searches rank-one measurements on a single-mode state.
///
/// A 181-point θ grid times a 60-point log grid in L ∈ [1e-6, 1] is scanned,
/// then L is refined by golden-section search at the best θ. Homodyne
/// (L = 0, handled exactly) at every grid θ is also compared.
pub fn optimize_gaussian_measurement(
    cov: &DMatrix<f64>,
    dcov: &DMatrix<f64>,
) -> Result<OptimalMeasurement> {
    let (s, ds) = (as_matrix2(cov)?, as_matrix2(dcov)?);
    let thetas = default_thetas();
    let ls = default_ls();
    let grid = measurement_grid(cov, dcov, &thetas, &ls)?;
    let best = argmax(&grid.values).ok_or_else(|| Error::Numerical("empty grid".into()))?;
    let (i_theta, i_l) = (best / ls.len(), best % ls.len());
    let theta = thetas[i_theta];
    let grid_max = grid.values[best];

    let lo = ls[i_l.saturating_sub(1)];
    let hi = ls[(i_l + 1).min(ls.len() - 1)];
    let f = |l: f64| {
        RankOneMeasurement::new(l, theta).map_or(f64::NAN, |m| cfi_single_mode(&s, &ds, &m))
    };
    let refined = golden_section_max_log(f, lo, hi, 1e-10, 200)?;
    let mut out = if refined.value >= grid_max {
        OptimalMeasurement {
            measurement: RankOneMeasurement::new(refined.x, theta)?,
            value: refined.value,
            grid_max,
        }
    } else {
        OptimalMeasurement {
            measurement: RankOneMeasurement::new(ls[i_l], theta)?,
            value: grid_max,
            grid_max,
        }
    };

    for &th in &thetas {
        let m = RankOneMeasurement::homodyne(th)?;
        let v = cfi_single_mode(&s, &ds, &m);
        if v > out.value {
            out.measurement = m;
            out.value = v;
        }
    }
    Ok(out)
}

/// Vacuum-probe QFI rate, which bounds every classical probe.
pub fn classical_bound(params: &ChannelParams, t: f64) -> Result<FisherResult> {
    qfi_rate_single_closed(1.0, params, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::vacuum;
    use approx::assert_relative_eq;

    const NU: f64 = 2.163_953_413_738_652_8;
    const DNU: f64 = 1.841_347_188_415_584_6;

    fn params() -> ChannelParams {
        ChannelParams::new(0.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn thermal_qfi() {
        let s = DMatrix::identity(2, 2) * NU;
        let ds = DMatrix::identity(2, 2) * DNU;
        let z = DVector::zeros(2);
        let q = qfi_general(&s, &ds, &z, &z).unwrap();
        assert_relative_eq!(q, 0.920_673_594_207_792_2, max_relative = 1e-12);
    }

    #[test]
    fn qfi_zero_derivative_pure_state() {
        let s = squeezed_vacuum(1e-3).unwrap();
        let z = StateDerivative::zeros(1);
        assert_eq!(qfi(&s, &z).unwrap(), 0.0);
    }

    #[test]
    fn qfi_rejects_unphysical() {
        let s = DMatrix::identity(2, 2) * 0.5;
        let ds = DMatrix::identity(2, 2);
        let z = DVector::zeros(2);
        assert!(matches!(
            qfi_general(&s, &ds, &z, &z),
            Err(Error::Unphysical(_))
        ));
    }

    #[test]
    fn qfi_mean_term() {
        // coherent family with d = T·(1, 0): 2 ∂dᵀ σ⁻¹ ∂d = 2
        let s = DMatrix::identity(2, 2);
        let dm = DVector::from_vec(vec![1.0, 0.0]);
        let q = qfi_general(&s, &DMatrix::zeros(2, 2), &DVector::zeros(2), &dm).unwrap();
        assert_relative_eq!(q, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn steady_state_cfi() {
        let s = DMatrix::identity(2, 2) * NU;
        let ds = DMatrix::identity(2, 2) * DNU;
        let z = DVector::zeros(2);
        let het = GaussianMeasurement::general(DMatrix::identity(2, 2)).unwrap();
        assert_relative_eq!(
            cfi_gaussian(&s, &ds, &z, &z, &het).unwrap(),
            0.338_696_887_338_465_8,
            max_relative = 1e-12
        );
        let hom = GaussianMeasurement::rank_one(&RankOneMeasurement::homodyne(0.0).unwrap(), 0, 1)
            .unwrap();
        assert_relative_eq!(
            cfi_gaussian(&s, &ds, &z, &z, &hom).unwrap(),
            0.362_030_830_483_155_15,
            max_relative = 1e-12
        );
        let zero = DMatrix::zeros(2, 2);
        assert_eq!(cfi_gaussian(&s, &zero, &z, &z, &het).unwrap(), 0.0);
    }

    #[test]
    fn eq8_matches_pipeline_vacuum_and_squeezed() {
        let p = params();
        for r in [1.0, 0.3, 1e-3] {
            for t in [1e-4, 1e-2, 1.0, 30.0] {
                let (s, d) = squeezed_probe(r, &p, t).unwrap();
                let generic = qfi(&s, &d).unwrap() / t;
                let closed = qfi_rate_single_closed(r, &p, t).unwrap().rate;
                assert_relative_eq!(closed, generic, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn short_time_example() {
        let p = params();
        let s = qfi_rate_single_short(1e-3, &p, 1e-3).unwrap();
        assert!(s.in_regime);
        assert_relative_eq!(s.result.rate, 64.404_87, max_relative = 1e-6);
        let exact = qfi_rate_single_closed(1e-3, &p, 1e-3).unwrap().rate;
        assert!((exact / s.result.rate - 1.0).abs() < 0.1);
        assert!(!qfi_rate_single_short(0.5, &p, 1e-3).unwrap().in_regime);
        let r2 = qfi_rate_single_short(1e-2, &p, 1e-3).unwrap().result.rate;
        assert!(s.result.rate > r2);
    }

    #[test]
    fn homodyne_limits() {
        let p = params();
        let late = cfi_homodyne_closed(1e-3, &p, 400.0, 0.0).unwrap();
        assert_relative_eq!(
            late.value,
            DNU * DNU / (2.0 * NU * NU),
            max_relative = 1e-12
        );
        assert_eq!(cfi_homodyne_closed(1e-3, &p, 0.0, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn rank1_matches_generic_and_homodyne() {
        let p = params();
        for (r, t, l, th) in [
            (1e-3, 1e-2, 0.3, 0.0),
            (0.4, 2.0, 1e-3, 1.1),
            (0.9, 0.5, 1.0, 2.5),
        ] {
            let (s, d) = squeezed_probe(r, &p, t).unwrap();
            let m = RankOneMeasurement::new(l, th).unwrap();
            let g = cfi_gaussian(
                s.cov(),
                &d.cov,
                s.mean(),
                &d.mean,
                &GaussianMeasurement::rank_one(&m, 0, 1).unwrap(),
            )
            .unwrap();
            let c = cfi_rank1_general(s.cov()[(0, 0)], s.cov()[(1, 1)], &p, t, &m).unwrap();
            assert_relative_eq!(c.value, g, max_relative = 1e-10);
        }
        let (s, _) = squeezed_probe(1e-3, &p, 0.1).unwrap();
        let h = cfi_rank1_general(
            s.cov()[(0, 0)],
            s.cov()[(1, 1)],
            &p,
            0.1,
            &RankOneMeasurement::homodyne(0.0).unwrap(),
        )
        .unwrap();
        let e12 = cfi_homodyne_closed(1e-3, &p, 0.1, 0.0).unwrap();
        assert_relative_eq!(h.value, e12.value, max_relative = 1e-12);
    }

    #[test]
    fn joint_matches_pipeline() {
        let p = params();
        for (r, t) in [(1e-3, 1e-3), (0.5, 0.7), (0.99, 20.0)] {
            // the pipeline subtracts entries of size 1/r to get λ ~ r
            let tol = if r < 0.01 { 1e-8 } else { 1e-10 };
            let (s, d) = tmsv_probe(r, &p, t).unwrap();
            let out = joint_output_state(&s).unwrap();
            let dout = joint_output_derivative(&d);
            assert_relative_eq!(out.cov()[(0, 0)], out.cov()[(3, 3)], max_relative = 1e-12);
            let (lambda, _) = joint_lambda(r, &p, t).unwrap();
            assert_relative_eq!(lambda, 2.0 * out.cov()[(0, 0)], max_relative = tol);
            let g = cfi_gaussian(
                out.cov(),
                &dout.cov,
                out.mean(),
                &dout.mean,
                &joint_readout(),
            )
            .unwrap();
            let c = cfi_joint_two_mode(r, &p, t).unwrap();
            assert_relative_eq!(c.value, g, max_relative = tol);
        }
        assert!(cfi_joint_two_mode(1.0, &p, 1.0).is_err());
        assert_eq!(cfi_joint_two_mode(0.5, &p, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn joint_short_form() {
        let p = params();
        for gt in [1e-5, 1e-4, 1e-3] {
            let t = gt / 0.2;
            let a = cfi_joint_short(1e-3, &p, t).unwrap().rate;
            let b = cfi_joint_two_mode(1e-3, &p, t).unwrap().rate;
            assert!((a / b - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn two_mode_qfi_reference() {
        // 60-digit reference solves of the full linear system
        let p = params();
        for (r, t, want) in [
            (1e-3, 1e-4, 195.099_677_9),
            (1e-3, 1e-2, 62.997_616_3),
            (1e-3, 1.0, 0.916_848_03),
            (0.5, 1e-4, 0.490_505_084),
            (0.5, 1e-2, 0.488_412_347),
            (0.5, 1.0, 0.341_563_170),
        ] {
            // entries ~1/r carry rounding ~1e-13, which alone moves the
            // r = 1e-3 values by ~2e-8 relative
            let tol = if r < 0.01 { 5e-8 } else { 1e-9 };
            let (s, d) = tmsv_probe(r, &p, t).unwrap();
            assert_relative_eq!(qfi(&s, &d).unwrap() / t, want, max_relative = tol);
        }
    }

    #[test]
    fn optimal_time() {
        let p = params();
        let ts = optimal_time_heuristic(1e-3, &p).unwrap();
        assert_relative_eq!(ts, 2.310_585_786_3e-3, max_relative = 1e-9);
        let h = homodyne_optimum(1e-3, &p).unwrap();
        assert_relative_eq!(h.t, 2.311_12e-3, max_relative = 1e-4);
        assert_relative_eq!(h.rate, 39.1799, max_relative = 1e-4);
        let j = joint_optimum(1e-3, &p).unwrap();
        assert_relative_eq!(j.rate / h.rate, 1.9066, max_relative = 1e-3);
    }

    #[test]
    fn optimizer_prefers_homodyne_at_short_times() {
        let p = params();
        let (s, d) = squeezed_probe(1e-3, &p, 1e-3 / 0.2).unwrap();
        let best = optimize_gaussian_measurement(s.cov(), &d.cov).unwrap();
        assert!(best.measurement.is_homodyne());
        assert_eq!(best.measurement.theta(), 0.0);
        assert!(best.value >= best.grid_max);
    }

    #[test]
    fn vacuum_surface_is_flat_in_theta() {
        let p = params();
        let (s, d) =
            evolve_with_derivative(&vacuum(1).unwrap(), &p, 0.3, DerivativeSpec::Analytic).unwrap();
        let grid = measurement_grid(s.cov(), &d.cov, &default_thetas(), &default_ls()).unwrap();
        for j in 0..grid.ls.len() {
            let col: Vec<f64> = (0..grid.thetas.len()).map(|i| grid.get(i, j)).collect();
            let spread = col.iter().cloned().fold(f64::MIN, f64::max)
                - col.iter().cloned().fold(f64::MAX, f64::min);
            assert!(spread <= 1e-12 * col[0].max(1.0), "spread {spread}");
        }
    }

    #[test]
    fn classical_bound_values() {
        let p = params();
        let t = 1e-2 / 0.2;
        let ratio = qfi_rate_single_closed(1e-3, &p, t).unwrap().rate
            / classical_bound(&p, t).unwrap().rate;
        assert!(ratio > 5.0, "{ratio}");
        let late = classical_bound(&p, 400.0).unwrap();
        assert_relative_eq!(late.value, 0.920_673_594_207_792_2, max_relative = 1e-12);
    }

    #[test]
    fn finite_difference_derivative() {
        let p = params();
        let init = squeezed_vacuum(0.2).unwrap();
        let (_, a) = evolve_with_derivative(&init, &p, 0.7, DerivativeSpec::Analytic).unwrap();
        let fd = DerivativeSpec::finite_difference(1e-6).unwrap();
        let (_, n) = evolve_with_derivative(&init, &p, 0.7, fd).unwrap();
        assert_relative_eq!(a.cov[(0, 0)], n.cov[(0, 0)], max_relative = 1e-5);
        assert!(DerivativeSpec::finite_difference(1e-2).is_err());
    }

    #[test]
    fn fisher_result_rate() {
        let f = FisherResult::new(3.0, 1.5);
        assert_eq!(f.rate, 2.0);
        assert_eq!(FisherResult::new(0.0, 0.0).rate, 0.0);
    }
}
