//! Gaussian states of bosonic modes.
//!
//! Quadratures are ordered `(x₁, p₁, …, x_m, p_m)` and the vacuum has unit
//! covariance (ħ = 1, σ = Tr[ρ R∘Rᵀ] − 2ddᵀ). A state is physical iff
//! σ + iΩ ⪰ 0, i.e. every symplectic eigenvalue is at least one.

use nalgebra::{Complex, DMatrix, DVector, Matrix2, SymmetricEigen};

type Complex64 = Complex<f64>;

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check on covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Slack on symplectic eigenvalues when deciding physicality.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Absolute tolerance (scaled by ‖S‖²) on S Ω Sᵀ = Ω.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// The symplectic form Ω = ⊕ [[0, 1], [−1, 0]] on `m` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    omega: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(num_modes: usize) -> Self {
        let n = 2 * num_modes;
        let mut omega = DMatrix::zeros(n, n);
        for k in 0..num_modes {
            omega[(2 * k, 2 * k + 1)] = 1.0;
            omega[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { omega }
    }

    pub fn num_modes(&self) -> usize {
        self.omega.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.omega
    }
}

/// Shorthand for `SymplecticForm::new(m).into_matrix()`.
pub fn omega(num_modes: usize) -> DMatrix<f64> {
    SymplecticForm::new(num_modes).into_matrix()
}

/// A real symplectic matrix S (S Ω Sᵀ = Ω).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

impl SymplecticTransform {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || n != matrix.ncols() || n % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: "non-empty square matrix of even size".into(),
                actual: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        let om = omega(n / 2);
        let dev = (&matrix * &om * matrix.transpose() - &om).amax();
        let scale = matrix.amax().powi(2).max(1.0);
        if dev > SYMPLECTIC_TOL * scale {
            return Err(Error::NotSymplectic(dev));
        }
        Ok(Self { matrix })
    }

    pub fn identity(num_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * num_modes, 2 * num_modes),
        }
    }

    /// Single-mode phase rotation R(θ) = [[cos θ, sin θ], [−sin θ, cos θ]].
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
        }
    }

    /// Single-mode squeezer diag(√s, 1/√s): maps the vacuum to diag(s, 1/s).
    pub fn squeezer(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::param("s", format!("must be positive, got {s}")));
        }
        let q = s.sqrt();
        Ok(Self {
            matrix: DMatrix::from_diagonal(&DVector::from_vec(vec![q, 1.0 / q])),
        })
    }

    pub fn num_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// S⁻¹ = −Ω Sᵀ Ω.
    pub fn inverse(&self) -> Self {
        let om = omega(self.num_modes());
        Self {
            matrix: -(&om * self.matrix.transpose() * &om),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.matrix.nrows() != other.matrix.nrows() {
            return Err(dim_mismatch(self.matrix.nrows(), other.matrix.nrows()));
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// Block-diagonal S₁ ⊕ S₂ acting on disjoint modes.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.matrix.nrows(), other.matrix.nrows());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.matrix);
        m.view_mut((a, a), (b, b)).copy_from(&other.matrix);
        Self { matrix: m }
    }
}

/// Balanced beamsplitter on two modes:
///
/// ```text
///          ⎡ 1  0  1  0 ⎤
/// S = 1/√2 ⎢ 0  1  0  1 ⎥
///          ⎢−1  0  1  0 ⎥
///          ⎣ 0 −1  0  1 ⎦
/// ```
pub fn beamsplitter_50_50() -> SymplecticTransform {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
         h,  0.0, h,   0.0,
         0.0, h,  0.0, h,
        -h,  0.0, h,   0.0,
         0.0, -h, 0.0, h,
    ]);
    SymplecticTransform { matrix: m }
}

/// First and second moments of an `m`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state, checking dimensions, symmetry and physicality.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::from_moments(mean, cov)?;
        state.check_physical()?.into_result()?;
        Ok(state)
    }

    /// Like [`GaussianState::new`] but without the physicality check.
    pub fn from_moments(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = cov.nrows();
        if n == 0 || n % 2 != 0 || cov.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: "2m x 2m covariance".into(),
                actual: format!("{}x{}", cov.nrows(), cov.ncols()),
            });
        }
        if mean.len() != n {
            return Err(dim_mismatch(n, mean.len()));
        }
        check_symmetric(&cov)?;
        Ok(Self { mean, cov })
    }

    pub fn num_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn with_mean(mut self, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != self.mean.len() {
            return Err(dim_mismatch(self.mean.len(), mean.len()));
        }
        self.mean = mean;
        Ok(self)
    }

    pub fn check_physical(&self) -> Result<Physicality> {
        check_physical(&self.cov)
    }

    /// 2×2 block (i, j) of the covariance matrix.
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    /// Reduced state of a single mode.
    pub fn mode(&self, k: usize) -> Result<GaussianState> {
        if k >= self.num_modes() {
            return Err(Error::param("mode", format!("index {k} out of range")));
        }
        Ok(Self {
            mean: self.mean.rows(2 * k, 2).into_owned(),
            cov: DMatrix::from_iterator(2, 2, self.block(k, k).iter().copied()),
        })
    }
}

/// Vacuum on `m` modes: zero mean, identity covariance.
pub fn vacuum(num_modes: usize) -> Result<GaussianState> {
    if num_modes == 0 {
        return Err(Error::param("num_modes", "must be at least 1"));
    }
    let n = 2 * num_modes;
    Ok(GaussianState {
        mean: DVector::zeros(n),
        cov: DMatrix::identity(n, n),
    })
}

/// Coherent state with the given quadrature means (vacuum covariance).
pub fn coherent(mean: DVector<f64>) -> Result<GaussianState> {
    if mean.is_empty() || mean.len() % 2 != 0 {
        return Err(Error::param("mean", "length must be 2m with m >= 1"));
    }
    let n = mean.len();
    Ok(GaussianState {
        mean,
        cov: DMatrix::identity(n, n),
    })
}

fn check_squeezing(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("r", format!("r must be in (0,1], got {r}")))
    }
}

/// x-squeezed vacuum with covariance diag(r, 1/r), 0 < r ≤ 1.
///
/// p-squeezed states are obtained by a π/2 rotation.
pub fn squeezed_vacuum(r: f64) -> Result<GaussianState> {
    check_squeezing(r)?;
    Ok(GaussianState {
        mean: DVector::zeros(2),
        cov: DMatrix::from_diagonal(&DVector::from_vec(vec![r, 1.0 / r])),
    })
}

/// Two-mode squeezed vacuum
///
/// ```text
/// ⎡ r⁻¹ I        √(r⁻²−1) Z ⎤
/// ⎣ √(r⁻²−1) Z   r⁻¹ I      ⎦,   Z = diag(1, −1).
/// ```
pub fn tmsv(r: f64) -> Result<GaussianState> {
    check_squeezing(r)?;
    let a = 1.0 / r;
    // √(r⁻² − 1) without cancellation near r = 1
    let c = ((1.0 - r) * (1.0 + r)).sqrt() / r;
    #[rustfmt::skip]
    let cov = DMatrix::from_row_slice(4, 4, &[
        a,   0.0, c,   0.0,
        0.0, a,   0.0, -c,
        c,   0.0, a,   0.0,
        0.0, -c,  0.0, a,
    ]);
    Ok(GaussianState {
        mean: DVector::zeros(4),
        cov,
    })
}

/// Mean d → S d, covariance σ → S σ Sᵀ.
pub fn apply_symplectic(s: &SymplecticTransform, state: &GaussianState) -> Result<GaussianState> {
    let n = state.cov.nrows();
    if s.matrix.nrows() != n {
        return Err(dim_mismatch(n, s.matrix.nrows()));
    }
    let cov = &s.matrix * &state.cov * s.matrix.transpose();
    Ok(GaussianState {
        mean: &s.matrix * &state.mean,
        cov: symmetrize(cov),
    })
}

/// Result of a physicality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub is_physical: bool,
    pub min_symplectic_eigenvalue: f64,
}

impl Physicality {
    pub fn into_result(self) -> Result<Self> {
        if self.is_physical {
            Ok(self)
        } else {
            Err(Error::Unphysical(self.min_symplectic_eigenvalue))
        }
    }
}

/// Physical iff every symplectic eigenvalue is ≥ 1 − [`PHYSICALITY_TOL`].
///
/// A covariance that is not even positive definite is reported as
/// unphysical with minimum eigenvalue 0.
pub fn check_physical(cov: &DMatrix<f64>) -> Result<Physicality> {
    match symplectic_eigenvalues(cov) {
        Ok(nu) => {
            let min = nu[0];
            Ok(Physicality {
                is_physical: min >= 1.0 - PHYSICALITY_TOL,
                min_symplectic_eigenvalue: min,
            })
        }
        Err(Error::NotPositiveDefinite) => Ok(Physicality {
            is_physical: false,
            min_symplectic_eigenvalue: 0.0,
        }),
        Err(e) => Err(e),
    }
}

/// Symplectic eigenvalues of a positive definite σ, ascending.
///
/// They are the moduli of the eigenvalues of iΩσ. For m > 1 they are read
/// off the Hermitian matrix i·LᵀΩL with σ = LLᵀ (similar to iΩσ), whose
/// spectrum is {±νₖ}.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = cov.nrows();
    if n == 0 || n % 2 != 0 || cov.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: "2m x 2m covariance".into(),
            actual: format!("{}x{}", cov.nrows(), cov.ncols()),
        });
    }
    check_symmetric(cov)?;
    let l = cholesky_factor(cov)?;
    let m = n / 2;
    if m == 1 {
        // ν = √det σ for a single mode
        let det = cov[(0, 0)] * cov[(1, 1)] - cov[(0, 1)] * cov[(1, 0)];
        return Ok(vec![det.sqrt()]);
    }
    let k = symmetrize_anti(l.transpose() * omega(m) * &l);
    let (vals, _) = antisymmetric_spectrum(&k)?;
    let mut nus: Vec<f64> = vals.into_iter().take(m).collect();
    nus.sort_by(f64::total_cmp);
    Ok(nus)
}

fn cholesky_factor(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    cov.clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite)
}

/// Spectral data of a real antisymmetric, nonsingular 2m×2m matrix A.
///
/// Returns the m positive values λₖ (descending) with iA eigenvalues ±λₖ,
/// and an orthogonal K with Kᵀ A K = ⊕ λₖ [[0, 1], [−1, 0]].
fn antisymmetric_spectrum(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let m = n / 2;
    let herm = a.map(|v| Complex64::new(0.0, v));
    let eig = SymmetricEigen::try_new(herm, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut lambdas = Vec::with_capacity(m);
    let mut k = DMatrix::zeros(n, n);
    for (slot, &idx) in order.iter().take(m).enumerate() {
        let lambda = eig.eigenvalues[idx];
        if !(lambda > 0.0) {
            return Err(Error::Numerical("degenerate symplectic spectrum".into()));
        }
        // iA w = λw with w = a + ib gives A a = λ b, A b = −λ a
        let w = eig.eigenvectors.column(idx);
        let re = DVector::from_iterator(n, w.iter().map(|z| z.re));
        let im = DVector::from_iterator(n, w.iter().map(|z| z.im));
        let s2 = std::f64::consts::SQRT_2;
        k.set_column(2 * slot, &(im * s2));
        k.set_column(2 * slot + 1, &(re * s2));
        lambdas.push(lambda);
    }
    Ok((lambdas, k))
}

/// Williamson normal form σ = S · (⊕ νₖ I₂) · Sᵀ with S symplectic.
#[derive(Debug, Clone)]
pub struct Williamson {
    pub transform: SymplecticTransform,
    /// Symplectic eigenvalues, one per mode, in the order of S's columns.
    pub eigenvalues: Vec<f64>,
}

/// Computes the Williamson decomposition of a positive definite σ.
///
/// With σ = LLᵀ and L⁻¹ Ω L⁻ᵀ = K (⊕ ν⁻¹ₖ Ω₂) Kᵀ, S = L K D^{−1/2}.
pub fn williamson(cov: &DMatrix<f64>) -> Result<Williamson> {
    let n = cov.nrows();
    if n == 0 || n % 2 != 0 || cov.ncols() != n {
        return Err(dim_mismatch(n, cov.ncols()));
    }
    check_symmetric(cov)?;
    let m = n / 2;
    let l = cholesky_factor(cov)?;
    let singular = || Error::Singular("Cholesky factor");
    let z = l.solve_lower_triangular(&omega(m)).ok_or_else(singular)?;
    let g = l
        .solve_lower_triangular(&z.transpose())
        .ok_or_else(singular)?;
    let a = symmetrize_anti(g.transpose());
    let (inv_nus, k) = antisymmetric_spectrum(&a)?;
    let nus: Vec<f64> = inv_nus.iter().map(|l| 1.0 / l).collect();
    let d = DVector::from_iterator(n, nus.iter().flat_map(|&v| [1.0 / v.sqrt(); 2]));
    let s = l * k * DMatrix::from_diagonal(&d);
    Ok(Williamson {
        transform: SymplecticTransform { matrix: s },
        eigenvalues: nus,
    })
}

/// Gaussian rank-one measurement with covariance R(θ)·diag(L, 1/L)·R(θ)ᵀ.
///
/// `L = 1` is heterodyne. Homodyne (L → 0) is a separate flag so that
/// callers can take the analytic limit instead of inverting a matrix with a
/// 1/L entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneMeasurement {
    l: f64,
    theta: f64,
    homodyne: bool,
}

impl RankOneMeasurement {
    /// `l ∈ (0, 1]`; `theta` is reduced modulo π.
    pub fn new(l: f64, theta: f64) -> Result<Self> {
        if !(l > 0.0 && l <= 1.0) {
            return Err(Error::param("L", format!("must be in (0,1], got {l}")));
        }
        Ok(Self {
            l,
            theta: reduce_angle(theta)?,
            homodyne: false,
        })
    }

    /// Homodyne detection of the quadrature cos θ·x − sin θ·p.
    pub fn homodyne(theta: f64) -> Result<Self> {
        Ok(Self {
            l: 0.0,
            theta: reduce_angle(theta)?,
            homodyne: true,
        })
    }

    pub fn heterodyne() -> Self {
        Self {
            l: 1.0,
            theta: 0.0,
            homodyne: false,
        }
    }

    /// L, with homodyne reported as 0.
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_homodyne(&self) -> bool {
        self.homodyne
    }

    /// R(θ), the frame in which σ^M is diag(L, 1/L).
    pub fn rotation(&self) -> Matrix2<f64> {
        let (s, c) = self.theta.sin_cos();
        Matrix2::new(c, s, -s, c)
    }

    /// σ^M for L > 0, `None` for homodyne.
    pub fn covariance(&self) -> Option<Matrix2<f64>> {
        if self.homodyne {
            return None;
        }
        let rot = self.rotation();
        let d = Matrix2::new(self.l, 0.0, 0.0, 1.0 / self.l);
        let m = rot * d * rot.transpose();
        Some((m + m.transpose()) * 0.5)
    }

    /// Unit vector of the least-noisy quadrature, R(θ)·e_x = (cos θ, −sin θ).
    pub fn quadrature(&self) -> [f64; 2] {
        let (s, c) = self.theta.sin_cos();
        [c, -s]
    }
}

fn reduce_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::param("theta", "must be finite"));
    }
    let t = theta.rem_euclid(std::f64::consts::PI);
    Ok(if t >= std::f64::consts::PI { 0.0 } else { t })
}

/// Covariance of one mode of a two-mode state after a rank-one Gaussian
/// measurement on the other mode: A − C (B + σ^M)⁻¹ Cᵀ.
///
/// The covariance does not depend on the outcome. The returned mean is the
/// conditional mean for an outcome equal to its expectation, i.e. the
/// unmeasured mode's prior mean.
pub fn condition_on_measurement(
    state: &GaussianState,
    measured_mode: usize,
    meas: &RankOneMeasurement,
) -> Result<GaussianState> {
    if state.num_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "two-mode state".into(),
            actual: format!("{} modes", state.num_modes()),
        });
    }
    if measured_mode > 1 {
        return Err(Error::param("measured_mode", "must be 0 or 1"));
    }
    let kept = 1 - measured_mode;
    let a = state.block(kept, kept);
    let b = state.block(measured_mode, measured_mode);
    let c = state.block(kept, measured_mode);

    let cond = match meas.covariance() {
        Some(sm) => {
            let inv = (b + sm).try_inverse().ok_or(Error::Singular("B + σ^M"))?;
            a - c * inv * c.transpose()
        }
        None => {
            let q = nalgebra::Vector2::from(meas.quadrature());
            let v = (q.transpose() * b * q)[(0, 0)];
            if !(v > 0.0) {
                return Err(Error::Singular("homodyne variance of measured mode"));
            }
            let cq = c * q;
            a - cq * cq.transpose() / v
        }
    };
    let cond = (cond + cond.transpose()) * 0.5;
    Ok(GaussianState {
        mean: state.mean.rows(2 * kept, 2).into_owned(),
        cov: DMatrix::from_iterator(2, 2, cond.iter().copied()),
    })
}

pub(crate) fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asym = (m - m.transpose()).amax() / scale;
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn symmetrize_anti(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m - m.transpose()) * 0.5
}

fn dim_mismatch(expected: usize, actual: usize) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}
