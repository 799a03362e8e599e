//! Manifold models, curvature profiles along geodesics, the root-Ricci
//! statistic, class testing, and the mixed sectional/Ricci bound β.
//!
//! The central object is the curvature operator seen along a unit-speed
//! geodesic: a field `t ↦ R(t)` of symmetric `(n−1)×(n−1)` matrices. The
//! root-Ricci statistic of a single operator is
//!
//! ```text
//! √Ric(ρ, u) = Tr( sqrt(ρ·I − R) )
//! ```
//!
//! defined whenever every sectional curvature in the plane spanned by the
//! geodesic satisfies `K ≤ ρ`. A geodesic (or manifold) is of *class (ρ, κ)*
//! when `K ≤ ρ` and `√Ric(ρ, u)/(n−1) ≥ √(ρ−κ)` everywhere; `κ` plays the
//! role of an effective constant-curvature bound that interpolates between a
//! sectional bound (at `ρ = κ`) and a Ricci bound (as `ρ → ∞`).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::symmat::SymMatrix;
use crate::{Error, Result};

/// Tolerance for the `holds` verdict of [`is_ric_class`].
pub const CLASS_TOL: f64 = 1e-9;

/// Rank-one symmetric families: real, complex, quaternionic and octonionic
/// hyperbolic spaces.
///
/// Along any geodesic the curvature operator of these spaces is diagonal with
/// eigenvalues `−4` (multiplicity `d₁`) and `−1` (multiplicity `d₂`):
/// `R: (0, n−1)`, `C: (1, n−2)`, `H: (3, n−4)`, `O: (7, 8)` in terms of the
/// real dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    R,
    C,
    H,
    O,
}

impl Family {
    /// Eigenvalue multiplicities `(d₁, d₂)` for curvatures `(−4, −1)`, after
    /// validating the admissible real dimensions of the family.
    pub fn multiplicities(self, n_real: usize) -> Result<(usize, usize)> {
        match self {
            Family::R if n_real >= 2 => Ok((0, n_real - 1)),
            Family::C if n_real >= 4 && n_real.is_multiple_of(2) => Ok((1, n_real - 2)),
            Family::H if n_real >= 8 && n_real.is_multiple_of(4) => Ok((3, n_real - 4)),
            Family::O if n_real == 16 => Ok((7, 8)),
            _ => Err(Error::InvalidParams(format!(
                "family {self:?} does not admit real dimension {n_real}"
            ))),
        }
    }
}

/// Curvature operator field along a geodesic, sampled on a strictly
/// increasing grid `t₀ = 0 < … < t_m = r` and evaluated in between by
/// entrywise piecewise-linear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    grid: Vec<f64>,
    samples: Vec<SymMatrix>,
}

impl CurvatureProfile {
    /// Builds a profile from grid nodes and one operator sample per node.
    pub fn new(grid: Vec<f64>, samples: Vec<SymMatrix>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidParams("profile grid needs ≥ 2 nodes".into()));
        }
        if grid.len() != samples.len() {
            return Err(Error::GridMismatch(format!(
                "{} grid nodes vs {} samples",
                grid.len(),
                samples.len()
            )));
        }
        if grid[0] != 0.0 {
            return Err(Error::InvalidParams(format!(
                "profile grid must start at 0, got {}",
                grid[0]
            )));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) || !grid.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidParams(
                "profile grid must be finite and strictly increasing".into(),
            ));
        }
        let dim = samples[0].dim();
        if samples.iter().any(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "profile samples have mixed dimensions".into(),
            ));
        }
        Ok(Self { grid, samples })
    }

    /// Constant-operator profile on `[0, r]` (two nodes suffice under linear
    /// interpolation).
    pub fn constant(operator: SymMatrix, r: f64) -> Result<Self> {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "profile length must be positive, got {r}"
            )));
        }
        Ok(Self {
            grid: vec![0.0, r],
            samples: vec![operator.clone(), operator],
        })
    }

    /// Codimension of the geodesic: the matrix dimension `n − 1`.
    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    /// Ambient manifold dimension `n`.
    pub fn n(&self) -> usize {
        self.dim() + 1
    }

    /// End time of the grid (the profile is defined on `[0, r]`).
    pub fn r(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn samples(&self) -> &[SymMatrix] {
        &self.samples
    }

    /// Evaluates `R(t)` by piecewise-linear interpolation. Times outside
    /// `[0, r]` by more than `1e-12·r` are rejected.
    pub fn at(&self, t: f64) -> Result<SymMatrix> {
        let r = self.r();
        let slop = 1e-12 * r;
        if !t.is_finite() || t < -slop || t > r + slop {
            return Err(Error::InvalidParams(format!(
                "evaluation time {t} outside profile domain [0, {r}]"
            )));
        }
        let t = t.clamp(0.0, r);
        // Index of the first node strictly greater than t.
        let hi = self.grid.partition_point(|&g| g <= t);
        if hi == self.grid.len() {
            return Ok(self.samples.last().unwrap().clone());
        }
        let lo = hi - 1;
        let (t0, t1) = (self.grid[lo], self.grid[hi]);
        let theta = (t - t0) / (t1 - t0);
        if theta == 0.0 {
            return Ok(self.samples[lo].clone());
        }
        self.samples[lo]
            .scale(1.0 - theta)
            .add_scaled(&self.samples[hi], theta)
    }

    /// Time-reversed profile `t ↦ R(r − t)` used by candle-symmetry checks.
    pub fn reversed(&self) -> Self {
        let r = self.r();
        let mut grid: Vec<f64> = self.grid.iter().rev().map(|&t| r - t).collect();
        grid[0] = 0.0;
        *grid.last_mut().unwrap() = r;
        let samples: Vec<SymMatrix> = self.samples.iter().rev().cloned().collect();
        Self { grid, samples }
    }

    /// Largest operator eigenvalue over all grid nodes (the sharpest constant
    /// `ρ` with `R(t) ≤ ρ·I` on the grid).
    pub fn max_eigenvalue(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| *s.eigenvalues().last().unwrap())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A manifold model reduced to what candle computations need: the curvature
/// operator field along a geodesic.
///
/// Construct through [`ManifoldModel::constant`], [`ManifoldModel::rank_one`],
/// [`ManifoldModel::rank_one_scaled`] or [`ManifoldModel::explicit`]; the
/// constructors validate the variant invariants (dimension parities, positive
/// scale).
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldModel {
    /// Constant sectional curvature `kappa` in dimension `n`: operator `κ·I`.
    ConstantCurvature { kappa: f64, n: usize },
    /// Rank-one symmetric space of real dimension `n_real`; all eigenvalues
    /// are multiplied by `scale > 0` (the unscaled normalization pins the
    /// totally real planes to curvature −1, hence eigenvalues −4/−1).
    RankOneSymmetric {
        family: Family,
        n_real: usize,
        scale: f64,
    },
    /// Explicit operator field along one geodesic.
    ExplicitProfile(CurvatureProfile),
}

impl ManifoldModel {
    /// Space of constant curvature `kappa` and dimension `n ≥ 2`.
    pub fn constant(kappa: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!(
                "manifold dimension must be ≥ 2, got {n}"
            )));
        }
        if !kappa.is_finite() {
            return Err(Error::InvalidParams("curvature must be finite".into()));
        }
        Ok(ManifoldModel::ConstantCurvature { kappa, n })
    }

    /// Rank-one symmetric space in its standard normalization (eigenvalues
    /// −4 and −1).
    pub fn rank_one(family: Family, n_real: usize) -> Result<Self> {
        Self::rank_one_scaled(family, n_real, 1.0)
    }

    /// Rank-one symmetric space with all eigenvalues multiplied by `scale`.
    pub fn rank_one_scaled(family: Family, n_real: usize, scale: f64) -> Result<Self> {
        family.multiplicities(n_real)?;
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "scale must be positive, got {scale}"
            )));
        }
        Ok(ManifoldModel::RankOneSymmetric {
            family,
            n_real,
            scale,
        })
    }

    /// Wraps an explicit profile along a single geodesic.
    pub fn explicit(profile: CurvatureProfile) -> Self {
        ManifoldModel::ExplicitProfile(profile)
    }

    /// Ambient dimension `n`.
    pub fn n(&self) -> usize {
        match self {
            ManifoldModel::ConstantCurvature { n, .. } => *n,
            ManifoldModel::RankOneSymmetric { n_real, .. } => *n_real,
            ManifoldModel::ExplicitProfile(p) => p.n(),
        }
    }

    /// Matrix dimension `n − 1`.
    pub fn dim(&self) -> usize {
        self.n() - 1
    }

    /// Whether the curvature operator is the same along every geodesic (true
    /// for the constant and rank-one models).
    pub fn is_homogeneous(&self) -> bool {
        !matches!(self, ManifoldModel::ExplicitProfile(_))
    }

    /// The single curvature operator of a homogeneous model; `None` for
    /// explicit profiles.
    pub fn operator(&self) -> Option<SymMatrix> {
        match self {
            ManifoldModel::ConstantCurvature { kappa, n } => {
                Some(SymMatrix::scaled_identity(n - 1, *kappa))
            }
            ManifoldModel::RankOneSymmetric {
                family,
                n_real,
                scale,
            } => {
                let (d1, d2) = family.multiplicities(*n_real).ok()?;
                let mut diag = vec![-4.0 * scale; d1];
                diag.extend(std::iter::repeat_n(-1.0 * scale, d2));
                Some(SymMatrix::diagonal(&diag))
            }
            ManifoldModel::ExplicitProfile(_) => None,
        }
    }

    /// Curvature profile on `[0, r]` along a geodesic of this model.
    ///
    /// For homogeneous models this is the constant-operator profile; for
    /// explicit profiles `r` must not exceed the stored end time.
    pub fn profile(&self, r: f64) -> Result<CurvatureProfile> {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "geodesic length must be positive, got {r}"
            )));
        }
        match self {
            ManifoldModel::ExplicitProfile(p) => {
                if r > p.r() * (1.0 + 1e-12) {
                    return Err(Error::InvalidParams(format!(
                        "requested length {r} exceeds profile end {}",
                        p.r()
                    )));
                }
                Ok(p.clone())
            }
            _ => CurvatureProfile::constant(self.operator().unwrap(), r),
        }
    }

    /// Largest sectional eigenvalue attained by the model's operator(s).
    pub fn max_eigenvalue(&self) -> f64 {
        match self {
            ManifoldModel::ExplicitProfile(p) => p.max_eigenvalue(),
            _ => *self.operator().unwrap().eigenvalues().last().unwrap(),
        }
    }

    /// Infimum of `√Ric(ρ, u)` over the model's sampled operators: exact for
    /// homogeneous models (one operator), the grid minimum for explicit
    /// profiles.
    pub fn root_ricci_inf(&self, rho: f64) -> Result<f64> {
        match self {
            ManifoldModel::ExplicitProfile(p) => {
                let mut inf = f64::INFINITY;
                for s in p.samples() {
                    inf = inf.min(root_ricci(s, rho)?);
                }
                Ok(inf)
            }
            _ => root_ricci(&self.operator().unwrap(), rho),
        }
    }
}

/// Class parameters `(ρ, κ)` with `ρ ≥ 0` and `κ ≤ ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicClassParams {
    rho: f64,
    kappa: f64,
}

impl RicClassParams {
    pub fn new(rho: f64, kappa: f64) -> Result<Self> {
        if !rho.is_finite() || !kappa.is_finite() || rho < 0.0 || kappa > rho {
            return Err(Error::InvalidParams(format!(
                "class parameters need ρ ≥ 0 and κ ≤ ρ, got ρ = {rho}, κ = {kappa}"
            )));
        }
        Ok(Self { rho, kappa })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `√(ρ − κ)`, the per-direction class threshold.
    pub fn threshold(&self) -> f64 {
        (self.rho - self.kappa).sqrt()
    }

    /// Trace budget `α = (n−1)·√(ρ − κ)`.
    ///
    /// The per-eigenvalue form `√(ρ−κ)` also occurs as a normalization of the
    /// same quantity; the trace constraint `Tr(A) = α` over the `n−1`
    /// eigendirections fixes the factor `n−1` used here.
    pub fn alpha(&self, n: usize) -> f64 {
        (n as f64 - 1.0) * self.threshold()
    }
}

/// Root-Ricci statistic `√Ric(ρ, u) = Tr(sqrt(ρ·I − R))` of a single
/// curvature operator.
///
/// Requires the sectional bound `K ≤ ρ`, i.e. `R ≤ ρ·I` up to the relative
/// tolerance `1e-10·max(1, ‖R‖)`; otherwise reports
/// [`Error::NotPositiveSemidefinite`].
pub fn root_ricci(r_op: &SymMatrix, rho: f64) -> Result<f64> {
    let diff = SymMatrix::scaled_identity(r_op.dim(), rho).add_scaled(r_op, -1.0)?;
    let tol = 1e-10 * r_op.spectral_norm().max(1.0);
    let eigs = diff.eigenvalues();
    if eigs[0] < -tol {
        return Err(Error::NotPositiveSemidefinite {
            lambda_min: eigs[0],
            tol,
        });
    }
    Ok(eigs.iter().map(|l| l.max(0.0).sqrt()).sum())
}

/// Clamped variant used for margin reporting: negative eigenvalues of
/// `ρ·I − R` contribute zero instead of erroring, so a violated sectional
/// bound still yields a finite (conservative) statistic.
fn root_ricci_clamped(r_op: &SymMatrix, rho: f64) -> f64 {
    let diff = SymMatrix::scaled_identity(r_op.dim(), rho)
        .add_scaled(r_op, -1.0)
        .expect("same dimension by construction");
    diff.eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum()
}

/// Outcome of a class test: the verdict, the worst normalized margin
/// `√Ric(ρ,u)/(n−1) − √(ρ−κ)`, and whether the sectional bound `K ≤ ρ` held
/// at every sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassCheck {
    pub holds: bool,
    pub margin: f64,
    pub sectional_ok: bool,
}

/// Tests membership in the √Ric class `(ρ, κ)`.
///
/// The margin is the infimum over sampled operators of
/// `√Ric(ρ,u)/(n−1) − √(ρ−κ)`; the class holds when the margin is
/// ≥ −[`CLASS_TOL`] *and* `K ≤ ρ` at every sample. For homogeneous models the
/// infimum is exact; for explicit profiles it is the grid minimum.
pub fn is_ric_class(model: &ManifoldModel, params: &RicClassParams) -> Result<ClassCheck> {
    let nm1 = model.dim() as f64;
    let threshold = params.threshold();
    let mut margin = f64::INFINITY;
    let mut sectional_ok = true;

    let mut visit = |op: &SymMatrix| {
        let tol = 1e-10 * op.spectral_norm().max(1.0);
        if *op.eigenvalues().last().unwrap() > params.rho + tol {
            sectional_ok = false;
        }
        margin = margin.min(root_ricci_clamped(op, params.rho) / nm1 - threshold);
    };

    match model {
        ManifoldModel::ExplicitProfile(p) => p.samples().iter().for_each(&mut visit),
        _ => visit(&model.operator().unwrap()),
    }

    Ok(ClassCheck {
        holds: sectional_ok && margin >= -CLASS_TOL,
        margin,
        sectional_ok,
    })
}

/// Least class parameter: `κ* = ρ − (inf_u √Ric(ρ,u)/(n−1))²`.
///
/// `is_ric_class(model, (ρ, κ))` holds exactly for `κ ≤ κ*` (up to the class
/// tolerance). Requires `K ≤ ρ`.
pub fn classify_kappa(model: &ManifoldModel, rho: f64) -> Result<f64> {
    let inf = model.root_ricci_inf(rho)?;
    let nm1 = model.dim() as f64;
    Ok(rho - (inf / nm1).powi(2))
}

/// Mixed bound β(κ, α, ρ): the sharpest constant-curvature Ricci coefficient
/// implied by a sectional bound `K ≤ α` together with class-(ρ, κ) data,
///
/// ```text
/// β = ρ + (n−2)·α − ( (n−1)·√(ρ−κ) − (n−2)·√(ρ−α) )²
/// ```
///
/// nonincreasing in `α` on `[κ, ρ]`, with `β(κ, κ, ρ) = (n−1)·κ` exactly.
/// See also [`beta_endpoint_variant`] for an alternative closed form at
/// `α = ρ` that disagrees with this formula when `ρ ≠ 0`.
pub fn beta_mixed(kappa: f64, alpha_bound: f64, rho: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("β needs n ≥ 2, got {n}")));
    }
    if !(kappa <= alpha_bound && alpha_bound <= rho) {
        return Err(Error::InvalidParams(format!(
            "β needs κ ≤ α ≤ ρ, got κ = {kappa}, α = {alpha_bound}, ρ = {rho}"
        )));
    }
    let nf = n as f64;
    if alpha_bound == kappa {
        // The general formula collapses exactly: ρ + (n−2)κ − (ρ−κ) = (n−1)κ.
        return Ok((nf - 1.0) * kappa);
    }
    let term = (nf - 1.0) * (rho - kappa).sqrt() - (nf - 2.0) * (rho - alpha_bound).sqrt();
    Ok(rho + (nf - 2.0) * alpha_bound - term * term)
}

/// Alternative closed form for β at the endpoint `α = ρ`:
/// `(n−1)²·κ − n·(n−1)·ρ`.
///
/// Substituting `α = ρ` into the general [`beta_mixed`] formula instead gives
/// `(n−1)·ρ − (n−1)²·(ρ−κ)`; the two agree at `ρ = 0` and differ otherwise.
/// Both values are exposed so reports can carry the discrepancy; neither is
/// silently preferred.
pub fn beta_endpoint_variant(kappa: f64, rho: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("β needs n ≥ 2, got {n}")));
    }
    let nf = n as f64;
    Ok((nf - 1.0).powi(2) * kappa - nf * (nf - 1.0) * rho)
}

/// Deterministic random profile that satisfies the class-(ρ, κ) hypothesis at
/// every grid node by construction, with unit perturbation amplitude.
///
/// See [`make_random_class_profile_with_amplitude`] for the construction and
/// the amplitude knob.
pub fn make_random_class_profile(
    n: usize,
    params: &RicClassParams,
    r: f64,
    seed: u64,
    grid_size: usize,
) -> Result<CurvatureProfile> {
    make_random_class_profile_with_amplitude(n, params, r, seed, grid_size, 1.0)
}

/// Deterministic random class-(ρ, κ) profile with an explicit perturbation
/// amplitude.
///
/// Construction: draw smooth positive curves `σᵢ(t) = exp(gᵢ(t))` from a
/// low-order trigonometric series, rescale them pointwise so that
/// `Σᵢ σᵢ(t) = α·(1 + slack)` with a per-run slack ≥ 0, set the operator
/// eigenvalues to `λᵢ(t) = ρ − σᵢ(t)²`, and conjugate by a smoothly varying
/// orthogonal path `Q(t)` built from Givens rotations. Then `K ≤ ρ` holds
/// pointwise and `√Ric(ρ, u) = Σᵢ σᵢ(t) ≥ α`, so the class hypothesis holds
/// with margin `slack·√(ρ−κ) ≥ 0`. Amplitude `0` degenerates to the constant
/// profile `κ·I` exactly.
pub fn make_random_class_profile_with_amplitude(
    n: usize,
    params: &RicClassParams,
    r: f64,
    seed: u64,
    grid_size: usize,
    amplitude: f64,
) -> Result<CurvatureProfile> {
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "manifold dimension must be ≥ 2, got {n}"
        )));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "profile length must be positive, got {r}"
        )));
    }
    if grid_size < 2 {
        return Err(Error::InvalidParams(format!(
            "grid_size must be ≥ 2, got {grid_size}"
        )));
    }
    if !amplitude.is_finite() || amplitude < 0.0 {
        return Err(Error::InvalidParams(format!(
            "amplitude must be ≥ 0, got {amplitude}"
        )));
    }

    let dim = n - 1;
    let m = grid_size - 1;
    let grid: Vec<f64> = (0..=m).map(|i| r * (i as f64) / (m as f64)).collect();

    if amplitude == 0.0 {
        let op = SymMatrix::scaled_identity(dim, params.kappa());
        let samples = vec![op; grid_size];
        return CurvatureProfile::new(grid, samples);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slack: f64 = rng.gen_range(0.05..0.5);
    let target = params.alpha(n) * (1.0 + slack);

    // Smooth log-eigenvalue curves: gᵢ(t) = a·Σₖ (aₖ sin + bₖ cos)(kπt/r)/k.
    const MODES: usize = 3;
    let mut coeffs = Vec::with_capacity(dim);
    for _ in 0..dim {
        let c: Vec<(f64, f64)> = (0..MODES)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        coeffs.push(c);
    }

    // Smooth rotation angles per coordinate pair, vanishing at t = 0.
    let mut angles = Vec::new();
    for _ in 0..dim * (dim.saturating_sub(1)) / 2 {
        let a1: f64 = rng.gen_range(-1.0..1.0);
        let a2: f64 = rng.gen_range(-1.0..1.0);
        let b1: f64 = rng.gen_range(-1.0..1.0);
        angles.push((a1, a2, b1));
    }

    let mut samples = Vec::with_capacity(grid_size);
    for &t in &grid {
        let phase = std::f64::consts::PI * t / r;
        let sigma: Vec<f64> = coeffs
            .iter()
            .map(|c| {
                let g: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(k, &(a, b))| {
                        let kf = (k + 1) as f64;
                        (a * (kf * phase).sin() + b * (kf * phase).cos()) / kf
                    })
                    .sum();
                (amplitude * g).exp()
            })
            .collect();
        let total: f64 = sigma.iter().sum();
        let lambda: Vec<f64> = sigma
            .iter()
            .map(|s| {
                let s_hat = s * target / total;
                params.rho() - s_hat * s_hat
            })
            .collect();

        let mut q = DMatrix::<f64>::identity(dim, dim);
        let mut pair = 0;
        for p in 0..dim {
            for qq in (p + 1)..dim {
                let (a1, a2, b1) = angles[pair];
                pair += 1;
                let theta = amplitude
                    * (a1 * phase.sin()
                        + 0.5 * a2 * (2.0 * phase).sin()
                        + 0.5 * b1 * (1.0 - (2.0 * phase).cos()));
                let (s, c) = theta.sin_cos();
                // Right-multiply by the Givens rotation in the (p, qq) plane.
                for row in 0..dim {
                    let xp = q[(row, p)];
                    let xq = q[(row, qq)];
                    q[(row, p)] = c * xp + s * xq;
                    q[(row, qq)] = -s * xp + c * xq;
                }
            }
        }

        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&lambda));
        let op = &q * diag * q.transpose();
        samples.push(SymMatrix::from_matrix(&op)?);
    }

    CurvatureProfile::new(grid, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ch2() -> ManifoldModel {
        ManifoldModel::rank_one(Family::C, 4).unwrap()
    }

    #[test]
    fn rank_one_validation() {
        assert!(ManifoldModel::rank_one(Family::C, 3).is_err());
        assert!(ManifoldModel::rank_one(Family::C, 5).is_err());
        assert!(ManifoldModel::rank_one(Family::H, 6).is_err());
        assert!(ManifoldModel::rank_one(Family::H, 4).is_err());
        assert!(ManifoldModel::rank_one(Family::O, 8).is_err());
        assert!(ManifoldModel::rank_one(Family::O, 16).is_ok());
        assert!(ManifoldModel::rank_one_scaled(Family::C, 4, 0.0).is_err());
    }

    #[test]
    fn rank_one_operators() {
        let op = ch2().operator().unwrap();
        assert_eq!(op.dim(), 3);
        assert_eq!(op.eigenvalues(), vec![-4.0, -1.0, -1.0]);

        let hh2 = ManifoldModel::rank_one(Family::H, 8)
            .unwrap()
            .operator()
            .unwrap();
        assert_eq!(
            hh2.eigenvalues(),
            vec![-4.0, -4.0, -4.0, -1.0, -1.0, -1.0, -1.0]
        );

        let rh3 = ManifoldModel::rank_one(Family::R, 3)
            .unwrap()
            .operator()
            .unwrap();
        assert_eq!(rh3.eigenvalues(), vec![-1.0, -1.0]);

        let scaled = ManifoldModel::rank_one_scaled(Family::C, 4, 2.0).unwrap();
        assert_eq!(
            scaled.operator().unwrap().eigenvalues(),
            vec![-8.0, -2.0, -2.0]
        );
    }

    #[test]
    fn root_ricci_examples() {
        // ℂH² at ρ = 0: √4 + √1 + √1 = 4.
        let v = root_ricci(&ch2().operator().unwrap(), 0.0).unwrap();
        assert_abs_diff_eq!(v, 4.0, epsilon = 1e-12);

        // Isotropic case: κ·I gives (n−1)·√(ρ−κ).
        for (kappa, rho, n) in [(-1.0, 0.0, 3), (-2.0, 1.0, 5), (0.5, 0.5, 2)] {
            let op = SymMatrix::scaled_identity(n - 1, kappa);
            let expect = (n as f64 - 1.0) * (rho - kappa).sqrt();
            assert_abs_diff_eq!(root_ricci(&op, rho).unwrap(), expect, epsilon = 1e-12);
        }

        // ℍH²: 3·√4 + 4·√1 = 10.
        let hh2 = ManifoldModel::rank_one(Family::H, 8).unwrap();
        assert_abs_diff_eq!(
            root_ricci(&hh2.operator().unwrap(), 0.0).unwrap(),
            10.0,
            epsilon = 1e-12
        );

        // Sectional bound violated: ρ below an eigenvalue.
        let op = SymMatrix::diagonal(&[0.5, -1.0]);
        assert!(matches!(
            root_ricci(&op, 0.0),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn class_membership_examples() {
        // ℂH² is exactly of class (0, −16/9): √Ric/3 = 4/3 = √(16/9).
        let p = RicClassParams::new(0.0, -16.0 / 9.0).unwrap();
        let check = is_ric_class(&ch2(), &p).unwrap();
        assert!(check.holds && check.sectional_ok);
        assert_abs_diff_eq!(check.margin, 0.0, epsilon = 1e-12);

        // Constant curvature is of class (ρ, κ) with margin 0 for any ρ ≥ κ.
        for rho in [0.0, 0.5, 3.0] {
            let m = ManifoldModel::constant(-1.0, 4).unwrap();
            let p = RicClassParams::new(rho, -1.0).unwrap();
            let check = is_ric_class(&m, &p).unwrap();
            assert!(check.holds);
            assert_abs_diff_eq!(check.margin, 0.0, epsilon = 1e-12);
        }

        // ℂH² fails class (0, −2): margin 4/3 − √2 ≈ −0.08088.
        let p = RicClassParams::new(0.0, -2.0).unwrap();
        let check = is_ric_class(&ch2(), &p).unwrap();
        assert!(!check.holds && check.sectional_ok);
        assert_abs_diff_eq!(check.margin, 4.0 / 3.0 - 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn class_params_validation() {
        assert!(RicClassParams::new(-1.0, -2.0).is_err());
        assert!(RicClassParams::new(1.0, 2.0).is_err());
        let p = RicClassParams::new(1.0, -3.0).unwrap();
        assert_abs_diff_eq!(p.alpha(3), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn classify_kappa_examples() {
        // ℂH² at ρ = 0: κ* = −(4/3)² = −16/9.
        let k = classify_kappa(&ch2(), 0.0).unwrap();
        assert_abs_diff_eq!(k, -16.0 / 9.0, epsilon = 1e-12);

        // Constant curvature at ρ = κ recovers κ.
        let m = ManifoldModel::constant(-2.5, 3).unwrap();
        assert_abs_diff_eq!(classify_kappa(&m, -2.5).unwrap(), -2.5, epsilon = 1e-12);

        // Large-ρ limit approaches the normalized Ricci value −6/3 = −2.
        let k = classify_kappa(&ch2(), 1e4).unwrap();
        assert!((k - (-2.0)).abs() < 1e-3, "κ*(10⁴) = {k}");

        // κ* is the exact class boundary: κ ≥ κ* weakens the √Ric threshold
        // √(ρ−κ), so membership holds above the boundary and fails below.
        let rho = 0.7;
        let kstar = classify_kappa(&ch2(), rho).unwrap();
        let above = RicClassParams::new(rho, kstar + 1e-6).unwrap();
        let below = RicClassParams::new(rho, kstar - 1e-6).unwrap();
        assert!(is_ric_class(&ch2(), &above).unwrap().holds);
        assert!(!is_ric_class(&ch2(), &below).unwrap().holds);
    }

    #[test]
    fn ricci_limit_error_decreases() {
        // ρ − (√Ric(ρ)/(n−1))² → Tr(R)/(n−1), error O(1/√ρ).
        let mut prev = f64::INFINITY;
        for rho in [1e2, 1e3, 1e4] {
            let err = (classify_kappa(&ch2(), rho).unwrap() - (-2.0)).abs();
            assert!(err < prev, "error not decreasing at ρ = {rho}");
            prev = err;
        }
        assert!(prev <= 0.05);
    }

    #[test]
    fn rho_monotonicity() {
        // Class membership survives raising ρ.
        let params = RicClassParams::new(0.3, -1.2).unwrap();
        for seed in 0..10u64 {
            let profile = make_random_class_profile(4, &params, 1.0, seed, 33).unwrap();
            let model = ManifoldModel::explicit(profile);
            assert!(is_ric_class(&model, &params).unwrap().holds);
            for drho in [0.2, 1.0, 5.0] {
                let lifted = RicClassParams::new(params.rho() + drho, params.kappa()).unwrap();
                assert!(
                    is_ric_class(&model, &lifted).unwrap().holds,
                    "monotonicity failed at seed {seed}, Δρ = {drho}"
                );
            }
        }
    }

    #[test]
    fn sectional_implies_class() {
        // R ≤ κ·I implies class (ρ, κ) for every ρ ≥ κ.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let dim = rng.gen_range(1..=4);
            let kappa = rng.gen_range(-2.0..0.5);
            // Shift a random negative-semidefinite matrix below κ·I.
            let raw: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = DMatrix::from_row_slice(dim, dim, &raw);
            let neg = SymMatrix::from_matrix(&(-(b.transpose() * &b))).unwrap();
            let op = neg.add_scaled(&SymMatrix::identity(dim), kappa).unwrap();
            let model = ManifoldModel::explicit(CurvatureProfile::constant(op, 1.0).unwrap());
            for drho in [0.0, 0.7, 2.0] {
                let params = RicClassParams::new((kappa + drho).max(0.0), kappa).unwrap();
                assert!(is_ric_class(&model, &params).unwrap().holds);
            }
        }
    }

    #[test]
    fn beta_examples() {
        // β(κ, κ, ρ) = (n−1)·κ exactly, including in floating point.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let kappa = rng.gen_range(-3.0..1.0);
            let rho = kappa + rng.gen_range(0.0..4.0);
            let n = rng.gen_range(2..=8);
            let b = beta_mixed(kappa, kappa, rho.max(kappa), n).unwrap();
            assert_eq!(b, (n as f64 - 1.0) * kappa);
        }

        // Direct evaluation: (κ, α, ρ, n) = (−1, −0.5, 0, 3).
        let b = beta_mixed(-1.0, -0.5, 0.0, 3).unwrap();
        let expect = -0.5 - (2.0 - 0.5_f64.sqrt()).powi(2);
        assert_abs_diff_eq!(b, expect, epsilon = 1e-14);
        assert_abs_diff_eq!(b, -2.17157, epsilon = 1e-5);

        // At ρ = 0 the general formula and the endpoint variant agree.
        let general = beta_mixed(-1.0, 0.0, 0.0, 3).unwrap();
        assert_abs_diff_eq!(general, -4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            beta_endpoint_variant(-1.0, 0.0, 3).unwrap(),
            -4.0,
            epsilon = 1e-14
        );

        // For ρ ≠ 0 they differ; both are exposed, neither is corrected.
        let rho = 1.0;
        let general = beta_mixed(-1.0, rho, rho, 3).unwrap();
        let variant = beta_endpoint_variant(-1.0, rho, 3).unwrap();
        assert!((general - variant).abs() > 0.1);

        assert!(beta_mixed(0.0, -1.0, 1.0, 3).is_err());
        assert!(beta_mixed(0.0, 2.0, 1.0, 3).is_err());
    }

    #[test]
    fn beta_nonincreasing_in_alpha() {
        for (kappa, rho, n) in [(-1.0, 0.0, 3), (-2.0, 1.0, 5), (-0.5, 0.25, 2)] {
            let mut prev = f64::INFINITY;
            for i in 0..=50 {
                let alpha = kappa + (rho - kappa) * (i as f64) / 50.0;
                let b = beta_mixed(kappa, alpha, rho, n).unwrap();
                assert!(b <= prev + 1e-12, "β increased at α = {alpha}");
                prev = b;
            }
        }
    }

    #[test]
    fn profile_interpolation() {
        let s0 = SymMatrix::diagonal(&[1.0, 2.0]);
        let s1 = SymMatrix::diagonal(&[3.0, 0.0]);
        let p = CurvatureProfile::new(vec![0.0, 1.0], vec![s0, s1]).unwrap();
        let mid = p.at(0.5).unwrap();
        assert_abs_diff_eq!(mid.entry(0, 0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mid.entry(1, 1), 1.0, epsilon = 1e-15);
        assert!(p.at(1.5).is_err());
        assert!(p.at(-0.1).is_err());
        // Endpoint slop within 1e-12·r is clamped.
        assert!(p.at(1.0 + 1e-13).is_ok());
    }

    #[test]
    fn profile_validation() {
        let s = SymMatrix::identity(2);
        assert!(CurvatureProfile::new(vec![0.0], vec![s.clone()]).is_err());
        assert!(CurvatureProfile::new(vec![0.5, 1.0], vec![s.clone(), s.clone()]).is_err());
        assert!(CurvatureProfile::new(vec![0.0, 0.0], vec![s.clone(), s.clone()]).is_err());
        assert!(
            CurvatureProfile::new(vec![0.0, 1.0], vec![s.clone(), SymMatrix::identity(3)]).is_err()
        );
        assert!(CurvatureProfile::new(vec![0.0, 1.0], vec![s.clone(), s]).is_ok());
    }

    #[test]
    fn reversed_profile() {
        let p = make_random_class_profile(3, &RicClassParams::new(0.0, -1.0).unwrap(), 2.0, 1, 17)
            .unwrap();
        let rev = p.reversed();
        assert_eq!(rev.grid()[0], 0.0);
        assert_eq!(rev.r(), 2.0);
        for &t in &[0.0, 0.3, 1.1, 2.0] {
            let a = p.at(t).unwrap();
            let b = rev.at(2.0 - t).unwrap();
            assert!((a.as_matrix() - b.as_matrix()).amax() < 1e-12);
        }
        // Reversing twice gives back the original.
        assert_eq!(rev.reversed(), p);
    }

    #[test]
    fn random_profile_postconditions() {
        let params = RicClassParams::new(0.0, -1.0).unwrap();
        let profile = make_random_class_profile(3, &params, 1.0, 7, 65).unwrap();
        assert_eq!(profile.grid().len(), 65);
        assert_eq!(profile.dim(), 2);
        // Every node satisfies √Ric(0, u) ≥ α = 2, i.e. margin ≥ 0.
        for s in profile.samples() {
            assert!(root_ricci(s, 0.0).unwrap() >= 2.0);
        }
        let check = is_ric_class(&ManifoldModel::explicit(profile), &params).unwrap();
        assert!(check.holds && check.margin >= 0.0);

        // Positive ρ with anisotropy.
        let params = RicClassParams::new(1.0, -0.5).unwrap();
        for seed in [0u64, 3, 11] {
            let profile = make_random_class_profile(5, &params, 1.5, seed, 33).unwrap();
            let check = is_ric_class(&ManifoldModel::explicit(profile), &params).unwrap();
            assert!(check.holds && check.sectional_ok, "seed {seed}: {check:?}");
            assert!(
                check.margin >= -1e-13,
                "seed {seed}: margin {}",
                check.margin
            );
        }
    }

    #[test]
    fn random_profile_determinism() {
        let params = RicClassParams::new(0.5, -1.0).unwrap();
        let a = make_random_class_profile(4, &params, 1.0, 42, 33).unwrap();
        let b = make_random_class_profile(4, &params, 1.0, 42, 33).unwrap();
        assert_eq!(a, b);
        let c = make_random_class_profile(4, &params, 1.0, 43, 33).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_profile_zero_amplitude() {
        let params = RicClassParams::new(0.5, -1.0).unwrap();
        let p = make_random_class_profile_with_amplitude(3, &params, 1.0, 9, 17, 0.0).unwrap();
        for s in p.samples() {
            assert_eq!(s, &SymMatrix::scaled_identity(2, -1.0));
        }
    }

    #[test]
    fn model_profile_roundtrip() {
        let model = ch2();
        let p = model.profile(2.0).unwrap();
        assert_eq!(p.r(), 2.0);
        assert_eq!(p.at(1.3).unwrap(), model.operator().unwrap());
        assert!(model.profile(-1.0).is_err());

        let explicit = ManifoldModel::explicit(p);
        assert!(explicit.profile(2.5).is_err());
        assert!(explicit.profile(2.0).is_ok());
        assert!(!explicit.is_homogeneous());
        assert_eq!(explicit.n(), 4);
    }
}
