//! Temperature-encoding thermal channel.
//!
//! In the interaction picture a single probe mode evolves as
//! σ_t = e^{−γt} σ + (1 − e^{−γt}) ν I₂ with ν = coth(ω/2T), and its mean
//! decays as e^{−γt/2}. An auxiliary mode that does not touch the bath keeps
//! its block, and probe–auxiliary correlations decay as e^{−γt/2}.
//!
//! The module also carries an independent oracle: fourth-order Runge–Kutta
//! integration of the moment equations dσ/dt = Aσ + σAᵀ + D, dd/dt = Ad in
//! the lab frame (free rotation at ω included).

use nalgebra::{DMatrix, DVector, Matrix2, SVector, Vector2};

use crate::error::{Error, Result};
use crate::gaussian::{symmetrize, GaussianState};

/// Below this value e^{−γt} is clamped to zero so that long-time states are
/// exactly thermal.
pub const DECAY_FLOOR: f64 = 1e-15;

/// Bath and probe parameters with the derived thermal quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    gamma: f64,
    omega: f64,
    temperature: f64,
    nu: f64,
    nu_minus_one: f64,
    dnu_dt: f64,
}

impl ChannelParams {
    pub fn new(gamma: f64, omega: f64, temperature: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::param(
                "gamma",
                format!("must be positive, got {gamma}"),
            ));
        }
        let (nu, dnu_dt) = nu_and_derivative(omega, temperature)?;
        let x = omega / temperature;
        // coth(x/2) − 1 = 2/(eˣ − 1)
        let nu_minus_one = 2.0 / x.exp_m1();
        Ok(Self {
            gamma,
            omega,
            temperature,
            nu,
            nu_minus_one,
            dnu_dt,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// ν = coth(ω/2T) = 2N + 1.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// ν − 1 = 2N, without cancellation at low temperature.
    pub fn nu_minus_one(&self) -> f64 {
        self.nu_minus_one
    }

    /// ∂ν/∂T.
    pub fn dnu_dt(&self) -> f64 {
        self.dnu_dt
    }

    /// Bose–Einstein occupation N(ω, T).
    pub fn mean_occupation(&self) -> f64 {
        0.5 * (self.nu - 1.0)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.gamma, self.omega, temperature)
    }

    /// e^{−γt}, clamped to 0 once it drops below [`DECAY_FLOOR`].
    pub fn decay(&self, t: f64) -> f64 {
        let e = (-self.gamma * t).exp();
        if e < DECAY_FLOOR {
            0.0
        } else {
            e
        }
    }

    /// 1 − e^{−γt}, accurate for small γt.
    pub fn thermalized_fraction(&self, t: f64) -> f64 {
        if self.decay(t) == 0.0 {
            1.0
        } else {
            -(-self.gamma * t).exp_m1()
        }
    }
}

/// ν = coth(ω/2T) and ∂ν/∂T = (ω/2T²)·csch²(ω/2T).
pub fn nu_and_derivative(omega: f64, temperature: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::param(
            "omega",
            format!("must be positive, got {omega}"),
        ));
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::param(
            "T",
            format!("must be positive, got {temperature}"),
        ));
    }
    let x = omega / (2.0 * temperature);
    // with q = e^{−2x}: coth x = 1 + 2q/(1−q), csch² x = 4q/(1−q)²
    let q = (-2.0 * x).exp();
    let one_minus_q = -(-2.0 * x).exp_m1();
    let nu = 1.0 + 2.0 * q / one_minus_q;
    let csch2 = 4.0 * q / (one_minus_q * one_minus_q);
    let dnu = omega / (2.0 * temperature * temperature) * csch2;
    Ok((nu, dnu))
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            "t",
            format!("must be finite and >= 0, got {t}"),
        ))
    }
}

fn check_dim(cov: &DMatrix<f64>, n: usize) -> Result<()> {
    if cov.nrows() != n || cov.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n}x{n}"),
            actual: format!("{}x{}", cov.nrows(), cov.ncols()),
        });
    }
    Ok(())
}

/// σ_t = e^{−γt} σ + (1 − e^{−γt}) ν I₂ for a single mode.
pub fn evolve_single(cov: &DMatrix<f64>, params: &ChannelParams, t: f64) -> Result<DMatrix<f64>> {
    check_time(t)?;
    check_dim(cov, 2)?;
    let e = params.decay(t);
    let f = params.thermalized_fraction(t);
    let mut out = cov * e;
    out[(0, 0)] += f * params.nu();
    out[(1, 1)] += f * params.nu();
    Ok(out)
}

/// Two-mode evolution with the bath acting on mode 0 only:
/// A → e^{−γt}A + (1−e^{−γt})νI₂, C → e^{−γt/2}C, B unchanged.
pub fn evolve_two_mode(cov: &DMatrix<f64>, params: &ChannelParams, t: f64) -> Result<DMatrix<f64>> {
    check_time(t)?;
    check_dim(cov, 4)?;
    let e = params.decay(t);
    let half = if e == 0.0 {
        0.0
    } else {
        (-0.5 * params.gamma() * t).exp()
    };
    let f = params.thermalized_fraction(t);
    let mut out = cov.clone();
    for i in 0..4 {
        for j in 0..4 {
            let (pi, pj) = (i < 2, j < 2);
            out[(i, j)] = match (pi, pj) {
                (true, true) => e * cov[(i, j)] + if i == j { f * params.nu() } else { 0.0 },
                (false, false) => cov[(i, j)],
                _ => half * cov[(i, j)],
            };
        }
    }
    Ok(out)
}

/// ∂σ_t/∂T: (1 − e^{−γt}) ∂ν/∂T on the probe diagonal, zero elsewhere.
pub fn cov_temperature_derivative(
    num_modes: usize,
    params: &ChannelParams,
    t: f64,
) -> Result<DMatrix<f64>> {
    check_time(t)?;
    let n = 2 * num_modes;
    let mut d = DMatrix::zeros(n, n);
    let v = params.thermalized_fraction(t) * params.dnu_dt();
    d[(0, 0)] = v;
    d[(1, 1)] = v;
    Ok(d)
}

/// Evolves a one- or two-mode state (probe = mode 0) in the interaction
/// picture.
pub fn evolve_state(
    state: &GaussianState,
    params: &ChannelParams,
    t: f64,
) -> Result<GaussianState> {
    check_time(t)?;
    let cov = match state.num_modes() {
        1 => evolve_single(state.cov(), params, t)?,
        2 => evolve_two_mode(state.cov(), params, t)?,
        m => {
            return Err(Error::DimensionMismatch {
                expected: "1 or 2 modes".into(),
                actual: format!("{m} modes"),
            })
        }
    };
    let amp = if params.decay(t) == 0.0 {
        0.0
    } else {
        (-0.5 * params.gamma() * t).exp()
    };
    let mut mean = state.mean().clone();
    mean[0] *= amp;
    mean[1] *= amp;
    GaussianState::from_moments(mean, symmetrize(cov))
}

/// Free rotation O_t = [[cos ωt, sin ωt], [−sin ωt, cos ωt]].
pub fn free_rotation(params: &ChannelParams, t: f64) -> Matrix2<f64> {
    let (s, c) = (params.omega() * t).sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Lab-frame closed form: d_t = e^{−γt/2} O_t d,
/// σ_t = e^{−γt} O_t σ O_tᵀ + (1 − e^{−γt}) ν I₂.
pub fn evolve_single_lab_frame(
    state: &GaussianState,
    params: &ChannelParams,
    t: f64,
) -> Result<GaussianState> {
    check_time(t)?;
    if state.num_modes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: "single-mode state".into(),
            actual: format!("{} modes", state.num_modes()),
        });
    }
    let o = free_rotation(params, t);
    let sigma = state.block(0, 0);
    let rotated = o * sigma * o.transpose();
    let e = params.decay(t);
    let f = params.thermalized_fraction(t);
    let cov = rotated * e + Matrix2::identity() * (f * params.nu());
    let d = Vector2::new(state.mean()[0], state.mean()[1]);
    let d = o * d * (-0.5 * params.gamma() * t).exp();
    GaussianState::from_moments(
        DVector::from_column_slice(d.as_slice()),
        symmetrize(DMatrix::from_column_slice(2, 2, cov.as_slice())),
    )
}

/// Drift matrix A = [[−γ/2, ω], [−ω, −γ/2]].
pub fn drift_matrix(params: &ChannelParams) -> Matrix2<f64> {
    let g = 0.5 * params.gamma();
    Matrix2::new(-g, params.omega(), -params.omega(), -g)
}

/// Diffusion matrix D = γ ν I₂.
pub fn diffusion_matrix(params: &ChannelParams) -> Matrix2<f64> {
    Matrix2::identity() * (params.gamma() * params.nu())
}

/// Output of the ODE oracle: the lab-frame state and ∂σ/∂T obtained from the
/// sensitivity equation d(∂σ)/dt = A(∂σ) + (∂σ)Aᵀ + γ (∂ν/∂T) I₂.
#[derive(Debug, Clone)]
pub struct LyapunovSolution {
    pub state: GaussianState,
    pub cov_temperature_derivative: DMatrix<f64>,
    pub steps: usize,
}

type OdeState = SVector<f64, 10>;

fn pack(d: &Vector2<f64>, s: &Matrix2<f64>, ds: &Matrix2<f64>) -> OdeState {
    let mut y = OdeState::zeros();
    y.fixed_rows_mut::<2>(0).copy_from(d);
    y.fixed_rows_mut::<4>(2).copy_from_slice(s.as_slice());
    y.fixed_rows_mut::<4>(6).copy_from_slice(ds.as_slice());
    y
}

fn unpack(y: &OdeState) -> (Vector2<f64>, Matrix2<f64>, Matrix2<f64>) {
    let d = Vector2::new(y[0], y[1]);
    let s = Matrix2::from_column_slice(&y.as_slice()[2..6]);
    let ds = Matrix2::from_column_slice(&y.as_slice()[6..10]);
    (d, s, ds)
}

fn rk4_step<F>(f: &F, y: &OdeState, h: f64) -> OdeState
where
    F: Fn(&OdeState) -> OdeState,
{
    let k1 = f(y);
    let k2 = f(&(y + k1 * (0.5 * h)));
    let k3 = f(&(y + k2 * (0.5 * h)));
    let k4 = f(&(y + k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Integrates the single-mode moment equations with classical RK4.
///
/// Uses `n = ⌈t/dt⌉` equal steps of size `t/n`. Requires `0 < dt < t`.
pub fn lyapunov_ode_evolve_with_sensitivity(
    state: &GaussianState,
    params: &ChannelParams,
    t: f64,
    dt: f64,
) -> Result<LyapunovSolution> {
    if state.num_modes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: "single-mode state".into(),
            actual: format!("{} modes", state.num_modes()),
        });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if !(t.is_finite() && dt < t) {
        return Err(Error::param(
            "dt",
            format!("must be smaller than t = {t}, got {dt}"),
        ));
    }
    let a = drift_matrix(params);
    let at = a.transpose();
    let diff = diffusion_matrix(params);
    let ddiff = Matrix2::identity() * (params.gamma() * params.dnu_dt());
    let rhs = |y: &OdeState| {
        let (d, s, ds) = unpack(y);
        pack(
            &(a * d),
            &(a * s + s * at + diff),
            &(a * ds + ds * at + ddiff),
        )
    };

    let steps = (t / dt).ceil() as usize;
    let h = t / steps as f64;
    let d0 = Vector2::new(state.mean()[0], state.mean()[1]);
    let mut y = pack(&d0, &state.block(0, 0), &Matrix2::zeros());
    for _ in 0..steps {
        y = rk4_step(&rhs, &y, h);
    }
    let (d, s, ds) = unpack(&y);
    let cov = symmetrize(DMatrix::from_column_slice(2, 2, s.as_slice()));
    let dcov = symmetrize(DMatrix::from_column_slice(2, 2, ds.as_slice()));
    Ok(LyapunovSolution {
        state: GaussianState::from_moments(DVector::from_column_slice(d.as_slice()), cov)?,
        cov_temperature_derivative: dcov,
        steps,
    })
}

/// State part of [`lyapunov_ode_evolve_with_sensitivity`].
pub fn lyapunov_ode_evolve(
    state: &GaussianState,
    params: &ChannelParams,
    t: f64,
    dt: f64,
) -> Result<GaussianState> {
    Ok(lyapunov_ode_evolve_with_sensitivity(state, params, t, dt)?.state)
}
