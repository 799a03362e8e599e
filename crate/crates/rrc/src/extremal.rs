//! The extremal problem behind the comparison theorem: minimize the
//! logarithmic candle derivative over all curvature fields of a given √Ric
//! class.
//!
//! For Dirichlet data `Y(0) = 0`, `Y(r) = I` the energy
//!
//! ```text
//! E(R, Y) = ∫₀^r ( ⟨Y′, Y′⟩ − ⟨Y, R·Y⟩ ) dt,     ⟨A, B⟩ = Tr(AᵀB),
//! ```
//!
//! is a positive-definite quadratic in `Y` as long as `R ≤ ρ·I` with
//! `√ρ·r < π`, and its unique minimizer is the Jacobi solution, whose energy
//! equals `(log s(r))′`. Substituting `R = ρ·I − A²` with the trace budget
//! `Tr A = α = (n−1)√(ρ−κ)` makes `E` quadratic in `A` too, with the exact
//! minimizer `A = α·(YYᵀ)⁻¹ / Tr((YYᵀ)⁻¹)`. Alternating the two exact
//! substeps descends to the extremal configuration, which is isotropic —
//! `Y`, `A`, `R` all scalar — and reproduces the constant-curvature value
//! `(log s_κ(r))′`: the content of the comparison theorem, here verified
//! numerically rather than assumed.

use nalgebra::DMatrix;

use crate::candle::{composite_quadrature, integrate_jacobi, Boundary, JacobiSolution};
use crate::comparison::model_candle;
use crate::curvature::{CurvatureProfile, RicClassParams};
use crate::symmat::SymMatrix;
use crate::{Error, Result};

/// Energy-decrease threshold declaring the alternation converged.
pub const CONVERGENCE_TOL: f64 = 1e-12;

/// Alternation budget before [`Error::NoConvergence`].
pub const MAX_ALTERNATIONS: usize = 500;

/// Regularized start `w(0⁺) = ε` of the scalar phase-diagram trajectories
/// (the singular endpoint `w(0) = 0` of `w″ = β/w − ρw` carries no classical
/// initial slope for β ≠ 0).
pub const PHASE_EPS: f64 = 1e-9;

/// Endpoint constraint tag of a [`MatrixPath`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointTag {
    Free,
    Zero,
    Identity,
}

/// Matrix-valued path on a uniform grid over `[0, r]` with tagged endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPath {
    grid: Vec<f64>,
    values: Vec<DMatrix<f64>>,
    start: EndpointTag,
    end: EndpointTag,
}

impl MatrixPath {
    /// Builds a path, validating grid uniformity (to relative `1e-9`) and the
    /// endpoint tags (`Zero`/`Identity` values must match to `1e-12`).
    pub fn new(
        grid: Vec<f64>,
        values: Vec<DMatrix<f64>>,
        start: EndpointTag,
        end: EndpointTag,
    ) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "path needs matching grid/values with ≥ 2 nodes, got {} and {}",
                grid.len(),
                values.len()
            )));
        }
        if grid[0] != 0.0 {
            return Err(Error::GridMismatch(format!(
                "path grid must start at 0, got {}",
                grid[0]
            )));
        }
        let h = grid[1] - grid[0];
        if h.is_nan()
            || h <= 0.0
            || grid
                .windows(2)
                .any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h)
        {
            return Err(Error::GridMismatch(
                "path grid must be uniform and increasing".into(),
            ));
        }
        let dim = values[0].nrows();
        if values.iter().any(|v| v.nrows() != dim || v.ncols() != dim) {
            return Err(Error::DimensionMismatch(
                "path values must be square of equal size".into(),
            ));
        }
        let check = |v: &DMatrix<f64>, tag: EndpointTag, which: &str| -> Result<()> {
            let ok = match tag {
                EndpointTag::Free => true,
                EndpointTag::Zero => v.amax() <= 1e-12,
                EndpointTag::Identity => (v - DMatrix::<f64>::identity(dim, dim)).amax() <= 1e-12,
            };
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!(
                    "path {which} endpoint does not match its tag"
                )))
            }
        };
        check(&values[0], start, "start")?;
        check(values.last().unwrap(), end, "end")?;
        Ok(Self {
            grid,
            values,
            start,
            end,
        })
    }

    /// Converts a Jacobi solution into the path of its `Y` matrices.
    pub fn from_jacobi(sol: &JacobiSolution) -> Self {
        let end = match sol.boundary() {
            Boundary::Dirichlet => EndpointTag::Identity,
            Boundary::InitialVelocity => EndpointTag::Free,
        };
        Self {
            grid: sol.grid().to_vec(),
            values: sol.y().to_vec(),
            start: EndpointTag::Zero,
            end,
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[DMatrix<f64>] {
        &self.values
    }

    pub fn h(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn r(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn dim(&self) -> usize {
        self.values[0].nrows()
    }

    pub fn tags(&self) -> (EndpointTag, EndpointTag) {
        (self.start, self.end)
    }
}

/// Extremal configuration returned by [`extremal_solve`].
#[derive(Debug, Clone)]
pub struct ExtremalResult {
    /// Minimized logarithmic candle derivative `Tr(Y′(r))`.
    pub min_log_deriv: f64,
    pub y_path: MatrixPath,
    pub a_path: MatrixPath,
    /// Maximum over the grid of the relative singular-value spread of `Y`
    /// and `A` — zero exactly at an isotropic configuration.
    pub isotropy_defect: f64,
    /// `(log s_κ(r))′` of the constant-curvature model.
    pub model_value: f64,
    /// `min_log_deriv − model_value` (sharpness residual).
    pub gap: f64,
    /// Independent value from shooting on the isotropic scalar reduction
    /// `w″ = ((α/(n−1))² − ρ)·w`.
    pub scalar_value: f64,
    /// Alternations performed.
    pub iterations: usize,
    /// Energy after each Y-substep (nonincreasing).
    pub energy_trace: Vec<f64>,
}

/// Discretized energy `E(R, Y) = ∫ (⟨Y′,Y′⟩ − ⟨Y,RY⟩) dt` with Hilbert–
/// Schmidt inner products.
///
/// `Y′` comes from 4th-order five-point central stencils (one-sided at the
/// ends), the integral from composite 4th-order quadrature, so the value
/// matches the continuum energy to `O(h⁴)`.
pub fn energy(profile: &CurvatureProfile, y: &MatrixPath) -> Result<f64> {
    if y.values.len() < 5 {
        return Err(Error::GridMismatch(format!(
            "energy stencils need ≥ 5 nodes, got {}",
            y.values.len()
        )));
    }
    if y.r() > profile.r() * (1.0 + 1e-12) {
        return Err(Error::GridMismatch(format!(
            "path end {} exceeds profile end {}",
            y.r(),
            profile.r()
        )));
    }
    let yd = differentiate(&y.values, y.h());
    let mut integrand = Vec::with_capacity(y.values.len());
    for (i, (v, d)) in y.values.iter().zip(&yd).enumerate() {
        let r_op = profile.at(y.grid[i])?;
        let kinetic = d.iter().map(|x| x * x).sum::<f64>();
        let potential = (v.transpose() * r_op.as_matrix() * v).trace();
        integrand.push(kinetic - potential);
    }
    Ok(composite_quadrature(&integrand, y.h()))
}

/// 4th-order first derivatives of a matrix sequence on a uniform grid.
fn differentiate(values: &[DMatrix<f64>], h: f64) -> Vec<DMatrix<f64>> {
    let m = values.len() - 1;
    let c = 1.0 / (12.0 * h);
    let mut out = Vec::with_capacity(values.len());
    for i in 0..=m {
        let d = if i == 0 {
            (-25.0 * &values[0] + 48.0 * &values[1] - 36.0 * &values[2] + 16.0 * &values[3]
                - 3.0 * &values[4])
                * c
        } else if i == 1 {
            (-3.0 * &values[0] - 10.0 * &values[1] + 18.0 * &values[2] - 6.0 * &values[3]
                + &values[4])
                * c
        } else if i == m - 1 {
            (3.0 * &values[m] + 10.0 * &values[m - 1] - 18.0 * &values[m - 2]
                + 6.0 * &values[m - 3]
                - &values[m - 4])
                * c
        } else if i == m {
            (25.0 * &values[m] - 48.0 * &values[m - 1] + 36.0 * &values[m - 2]
                - 16.0 * &values[m - 3]
                + 3.0 * &values[m - 4])
                * c
        } else {
            (&values[i - 2] - 8.0 * &values[i - 1] + 8.0 * &values[i + 1] - &values[i + 2]) * c
        };
        out.push(d);
    }
    out
}

/// Exact minimizer of the energy over trace-constrained fields:
/// `A(t) = α·(Y Yᵀ)⁻¹ / Tr((Y Yᵀ)⁻¹)`, extended to `t = 0` by continuity
/// from the first interior node.
///
/// `A(t)` is symmetric positive semidefinite with `Tr A(t) = α` at every
/// node. Fails with [`Error::SingularY`] when `Y(t)` is singular for some
/// `t > 0` (normalized determinant below `1e-12`); the normalized form keeps
/// `A` bounded along Jacobi solutions even though `(Y Yᵀ)⁻¹` itself blows up
/// as `t → 0`.
pub fn optimal_a(y: &MatrixPath, alpha: f64) -> Result<MatrixPath> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParams(format!(
            "trace budget must be ≥ 0, got {alpha}"
        )));
    }
    let dim = y.dim();
    let mut values = vec![DMatrix::zeros(dim, dim)];
    for (i, v) in y.values.iter().enumerate().skip(1) {
        let gram = SymMatrix::from_matrix(&(v * v.transpose()))?;
        let eig = gram.eigen();
        let lam_max = *eig.values.last().unwrap();
        // Scale-invariant singularity test: det(Y/‖Y‖)² = Π(λᵢ/λ_max).
        let det_normalized_sq: f64 = eig.values.iter().map(|l| (l / lam_max).max(0.0)).product();
        if lam_max.is_nan() || lam_max <= 0.0 || det_normalized_sq < 1e-24 {
            return Err(Error::SingularY(y.grid[i]));
        }
        let inv: Vec<f64> = eig.values.iter().map(|l| 1.0 / l).collect();
        let total: f64 = inv.iter().sum();
        let weights = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            inv.iter().map(|w| alpha * w / total),
        ));
        values.push(&eig.vectors * weights * eig.vectors.transpose());
    }
    values[0] = values[1].clone();
    MatrixPath::new(y.grid.clone(), values, EndpointTag::Free, EndpointTag::Free)
}

/// Minimizes the energy over Dirichlet paths `Y(0) = 0`, `Y(r) = I` for a
/// fixed curvature profile: the unique minimizer (inside the positive-
/// definiteness window `√ρ·r < π`, `ρ` the largest profile eigenvalue) is the
/// Dirichlet Jacobi solution.
pub fn minimize_energy_y(profile: &CurvatureProfile, r: f64, steps: usize) -> Result<MatrixPath> {
    let rho_max = profile.max_eigenvalue();
    if rho_max > 0.0 && rho_max.sqrt() * r >= std::f64::consts::PI {
        return Err(Error::OutOfWindow(rho_max.sqrt() * r));
    }
    let sol = integrate_jacobi(profile, r, steps, Boundary::Dirichlet)?;
    Ok(MatrixPath::from_jacobi(&sol))
}

/// Minimizes `(log s(r))′` over class-(ρ, κ) curvature fields by alternating
/// the exact `A` and `Y` substeps.
///
/// Valid inside the comparison window `2r√ρ ≤ π`. The alternation starts from
/// a deliberately anisotropic trace-α field and stops when the energy
/// decreases by less than [`CONVERGENCE_TOL`]; the result carries the
/// isotropy defect of the minimizer, the constant-curvature model value with
/// its gap, and an independent scalar shooting cross-check.
pub fn extremal_solve(
    rho: f64,
    kappa: f64,
    n: usize,
    r: f64,
    steps: usize,
) -> Result<ExtremalResult> {
    let params = RicClassParams::new(rho, kappa)?;
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "extremal problem needs n ≥ 2, got {n}"
        )));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "extremal problem needs r > 0, got {r}"
        )));
    }
    let window = 2.0 * r * rho.sqrt();
    if window > std::f64::consts::PI * (1.0 + 1e-12) {
        return Err(Error::WindowViolated(window));
    }

    let dim = n - 1;
    let alpha = params.alpha(n);
    let grid: Vec<f64> = (0..=steps).map(|i| r * i as f64 / steps as f64).collect();

    // Anisotropic start: diagonal weights 1, 1.5, …, normalized to trace α.
    let raw: Vec<f64> = (0..dim).map(|i| 1.0 + 0.5 * i as f64).collect();
    let total: f64 = raw.iter().sum();
    let a0 = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        raw.iter().map(|w| alpha * w / total),
    ));
    let mut a_path = MatrixPath::new(
        grid.clone(),
        vec![a0; steps + 1],
        EndpointTag::Free,
        EndpointTag::Free,
    )?;

    let mut energy_trace = Vec::new();
    let mut prev_e = f64::INFINITY;
    let mut converged = None;

    for iteration in 1..=MAX_ALTERNATIONS {
        let profile = induced_profile(&a_path, rho)?;
        let sol = integrate_jacobi(&profile, r, steps, Boundary::Dirichlet)?;
        let e = sol.yp().last().unwrap().trace();
        energy_trace.push(e);
        let y_path = MatrixPath::from_jacobi(&sol);
        let decrease = prev_e - e;
        if decrease < CONVERGENCE_TOL {
            // The energy is quadratic in the anisotropy, so the ΔE test can
            // fire while the defect is still ~√ΔE; polish until the defect
            // is comfortably inside its certificate or the energy stalls at
            // floating-point resolution.
            let defect = path_defect(&y_path).max(path_defect(&a_path));
            if defect <= 1e-7 || decrease <= 4.0 * f64::EPSILON * e.abs().max(1.0) {
                converged = Some((iteration, e, y_path));
                break;
            }
        }
        prev_e = e;
        a_path = optimal_a(&y_path, alpha)?;
    }

    let (iterations, min_log_deriv, y_path) =
        converged.ok_or(Error::NoConvergence(MAX_ALTERNATIONS))?;

    let isotropy_defect = path_defect(&y_path).max(path_defect(&a_path));
    let model_value = model_candle(kappa, n, r)?.log_deriv;
    let scalar_value = scalar_shooting(params.threshold(), rho, n, r, steps)?;

    Ok(ExtremalResult {
        min_log_deriv,
        y_path,
        a_path,
        isotropy_defect,
        model_value,
        gap: min_log_deriv - model_value,
        scalar_value,
        iterations,
        energy_trace,
    })
}

/// Curvature profile `R = ρ·I − A²` induced by a trace-constrained field.
fn induced_profile(a: &MatrixPath, rho: f64) -> Result<CurvatureProfile> {
    let dim = a.dim();
    let samples: Result<Vec<SymMatrix>> = a
        .values
        .iter()
        .map(|m| {
            let r_op = DMatrix::identity(dim, dim) * rho - m * m;
            SymMatrix::from_matrix(&r_op)
        })
        .collect();
    CurvatureProfile::new(a.grid.clone(), samples?)
}

/// Maximum relative singular-value spread along a path, ignoring nodes that
/// are negligibly small relative to the path's scale (the `Y(0) = 0` node).
fn path_defect(path: &MatrixPath) -> f64 {
    let svals: Vec<nalgebra::DVector<f64>> = path
        .values
        .iter()
        .map(|v| v.clone().singular_values())
        .collect();
    let scale = svals.iter().map(|s| s[0]).fold(0.0_f64, f64::max);
    let mut defect = 0.0_f64;
    for s in &svals {
        let (max, min) = (s[0], s[s.len() - 1]);
        if max > 1e-13 * scale {
            defect = defect.max((max - min) / max);
        }
    }
    defect
}

/// Shooting solution of the isotropic scalar reduction
/// `w″ = ((α/(n−1))² − ρ)·w`, `w(0) = 0`, `w(r) = 1`, returning
/// `(n−1)·w′(r)`.
///
/// The reduction comes from substituting `Y = w·I`, `A = (α/(n−1))·I` into
/// `Y″ = (A² − ρ)Y`; its coefficient equals `−κ`, so the shot value is an
/// independent check of the matrix minimum. A scalar form with the
/// time-dependent coefficient `β(t) = α/Tr((YYᵀ)⁻¹)²` does not reduce to an
/// entry-independent equation when substituted back; the dynamics here are
/// derived from the unambiguous matrix equation instead, and the two readings
/// coincide at the isotropic minimizer.
fn scalar_shooting(threshold: f64, rho: f64, n: usize, r: f64, steps: usize) -> Result<f64> {
    let coeff = threshold * threshold - rho; // (α/(n−1))² − ρ = −κ
    let integrate = |slope: f64| -> (f64, f64) {
        let h = r / steps as f64;
        let (mut w, mut v) = (0.0_f64, slope);
        for _ in 0..steps {
            let k1w = v;
            let k1v = coeff * w;
            let k2w = v + 0.5 * h * k1v;
            let k2v = coeff * (w + 0.5 * h * k1w);
            let k3w = v + 0.5 * h * k2v;
            let k3v = coeff * (w + 0.5 * h * k2w);
            let k4w = v + h * k3v;
            let k4v = coeff * (w + h * k3w);
            w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        (w, v)
    };

    let mut slope = 1.0 / r;
    for _ in 0..20 {
        let (w_end, v_end) = integrate(slope);
        if (w_end - 1.0).abs() <= 1e-12 {
            return Ok((n as f64 - 1.0) * v_end);
        }
        if w_end.is_nan() || w_end.abs() <= 1e-300 {
            return Err(Error::FitFailure("scalar shooting degenerated".into()));
        }
        slope /= w_end;
    }
    Err(Error::FitFailure(
        "scalar shooting did not converge in 20 iterations".into(),
    ))
}

/// Arrival time at `w = 1` of the phase-diagram trajectory of
/// `w″ = β·w⁻¹ − ρ·w` started at `w(0) = ε` ([`PHASE_EPS`]) with slope
/// `w′(0) = slope`.
///
/// Uses the first integral `w′² = slope² + 2β·ln(w/ε) − ρ(w² − ε²)` and
/// integrates `dt = dw/w′` on a logarithmic grid, which is exact ODE
/// integration by conserved energy and keeps the singular origin harmless.
/// Fails when the slope is too small for the trajectory to stay rising
/// (`w′ > 0`) all the way to `w = 1`.
pub fn phase_arrival_time(rho: f64, beta_const: f64, slope: f64) -> Result<f64> {
    travel_time(rho, beta_const, slope, PHASE_EPS, 1.0).ok_or_else(|| {
        Error::InvalidParams(format!(
            "slope {slope} stalls before w = 1 (β = {beta_const}, ρ = {rho})"
        ))
    })
}

/// Quadrature of `dt = dw/w′` from `w_lo` to `w_hi` along the energy level
/// fixed by `w′ = slope` at `w = ε`; `None` if `w′²` is not strictly positive
/// throughout.
fn travel_time(rho: f64, beta: f64, slope: f64, w_lo: f64, w_hi: f64) -> Option<f64> {
    const INTERVALS: usize = 8192;
    let span = (w_hi / w_lo).ln();
    let hv = span / INTERVALS as f64;
    let mut integrand = Vec::with_capacity(INTERVALS + 1);
    for j in 0..=INTERVALS {
        let w = w_lo * (hv * j as f64).exp();
        let wp_sq = slope * slope + 2.0 * beta * (w / PHASE_EPS).ln()
            - rho * (w * w - PHASE_EPS * PHASE_EPS);
        if wp_sq.is_nan() || wp_sq <= 0.0 {
            return None;
        }
        integrand.push(w / wp_sq.sqrt());
    }
    Some(composite_quadrature(&integrand, hv))
}

/// Verifies the phase-diagram uniqueness mechanism: along a ladder of
/// `shots ≥ 2` initial slopes, the arrival times at `w = 1` of the
/// trajectories of `w″ = β·w⁻¹ − ρ·w` are strictly monotone (decreasing) in
/// the slope, so trajectories never cross and the Dirichlet solution through
/// `w(r) = 1` is unique. Requires `r < π/(2√ρ)` when `ρ > 0`.
///
/// Returns `true` iff every trajectory in the ladder keeps `w′ > 0` and the
/// times are strictly decreasing. All times share one quadrature grid, so the
/// comparison inherits the pointwise monotonicity of the integrand exactly.
pub fn phase_uniqueness_check(rho: f64, beta_const: f64, r: f64, shots: usize) -> Result<bool> {
    if shots < 2 {
        return Err(Error::InvalidParams(format!(
            "slope ladder needs ≥ 2 shots, got {shots}"
        )));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "phase check needs r > 0, got {r}"
        )));
    }
    if rho > 0.0 && r >= 0.5 * std::f64::consts::PI / rho.sqrt() {
        return Err(Error::WindowViolated(2.0 * r * rho.sqrt()));
    }

    // Base slope large enough that w′² stays positive up to w = 1 for every
    // rung: covers the −2|β|·ln(1/ε) and −ρ·w² dips, scaled to arrive near r.
    let base = ((1.0 / r).powi(2)
        + 2.0 * beta_const.min(0.0).abs() * (1.0 / PHASE_EPS).ln()
        + rho.max(0.0))
    .sqrt();

    let mut prev = f64::INFINITY;
    for j in 0..shots {
        let slope = base * (1.0 + j as f64 / (shots - 1) as f64);
        match travel_time(rho, beta_const, slope, PHASE_EPS, 1.0) {
            Some(t) if t < prev => prev = t,
            _ => return Ok(false),
        }
    }
    Ok(true)
}
