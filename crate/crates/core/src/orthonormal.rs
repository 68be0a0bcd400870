//! Orthonormality constraints on the admissible families.
//!
//! For qubits the family has parameters `α_{0,1} = γ+iδ`, `α_{1,1} = α+iβ`;
//! [`qubit_branches`] enumerates every real `(α, β)` that makes the ensemble
//! orthonormal, split into the closed-form branches by which of γ, δ vanish.
//!
//! For qutrits the parameters are `α_{0,1} = x0+iy0`, `α_{1,1} = x1+iy1`,
//! `α_{1,2} = x2+iy2`, and orthonormality is the real polynomial system
//!
//! ```text
//! f1 = x0²+y0²+x1²+y1²+x2²+y2² − 1
//! f2 = (x1+x2+2x0)² + (y1+y2+2y0)² + 2(x0²+y0²) − 1
//! f3 = (x1+x2+2x0)x0 + (y1+y2+2y0)y0 + x0x1+y0y1 + x0x2+y0y2
//! f4 = x0²+y0² + 2x1x2 + 2y1y2
//! ```
//!
//! The imaginary parts of the Gram conditions cancel identically, so these
//! four real equations are the complete system. Closed-form branches cover
//! the `x0 = y0 = 0`, `y0 = 0`, and all-real strata; a deterministic
//! multistart Gauss–Newton solver handles arbitrary fixed imaginary parts.
//!
//! The ± / ∓ sign notation in the closed-form branches
//! under-specifies which signs pair, so branch constructors generate every
//! combination and keep the ones that actually satisfy the constraints
//! (residual below 1e-9).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commutant::{closed_form_family, FamilyParams};
use crate::ensemble::{check_qft_admissible, family_to_ensemble, gram_deviation};
use crate::linalg::{rank, CMatrix, Cplx};
use crate::{Error, Result, DEFAULT_RANK_TOL};

/// Residual bound below which a generated sign combination counts as a
/// genuine solution.
const BRANCH_VALIDATE_TOL: f64 = 1e-9;

/// A sign choice in a closed-form branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

// ---------------------------------------------------------------------------
// Qubit branches
// ---------------------------------------------------------------------------

/// Which closed-form qubit branch produced a solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitBranch {
    /// γ = δ = 0; the one-parameter trivial family.
    BothZero,
    /// γ = 0, δ ≠ 0.
    GammaZero,
    /// δ = 0, γ ≠ 0.
    DeltaZero,
    /// Both nonzero; the sign is the ± choice in the closed form.
    General(Sign),
}

/// One orthonormal qubit solution: `α_{0,1} = γ+iδ`, `α_{1,1} = α+iβ`.
#[derive(Clone, Copy, Debug)]
pub struct QubitBranchSolution {
    pub gamma: f64,
    pub delta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub branch: QubitBranch,
}

impl QubitBranchSolution {
    pub fn family_params(&self) -> FamilyParams {
        FamilyParams::qubit(
            Cplx::new(self.gamma, self.delta),
            Cplx::new(self.alpha, self.beta),
        )
    }
}

/// Output of [`qubit_branches`]: either a concrete solution or, for
/// γ = δ = 0, the one-parameter family α = ±√(1−β²) over free β.
#[derive(Clone, Copy, Debug)]
pub enum QubitSolution {
    Point(QubitBranchSolution),
    BetaFamily { sign: Sign },
}

/// Evaluates the γ = δ = 0 family at a concrete β, requiring |β| ≤ 1.
pub fn beta_family_point(sign: Sign, beta: f64) -> Result<QubitBranchSolution> {
    if !beta.is_finite() || beta.abs() > 1.0 {
        return Err(Error::DomainViolation(format!(
            "beta must lie in [-1, 1], got {beta}"
        )));
    }
    Ok(QubitBranchSolution {
        gamma: 0.0,
        delta: 0.0,
        alpha: sign.value() * (1.0 - beta * beta).sqrt(),
        beta,
        branch: QubitBranch::BothZero,
    })
}

/// All real `(α, β)` making the qubit family orthonormal at the given
/// `(γ, δ)`. Negative radicands are reported as domain violations, never
/// clamped.
pub fn qubit_branches(gamma: f64, delta: f64) -> Result<Vec<QubitSolution>> {
    if !gamma.is_finite() || !delta.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut out = Vec::new();
    if gamma == 0.0 && delta == 0.0 {
        out.push(QubitSolution::BetaFamily { sign: Sign::Plus });
        out.push(QubitSolution::BetaFamily { sign: Sign::Minus });
        return Ok(out);
    }
    if gamma == 0.0 {
        // β = −δ, α = ±√(1−2δ²).
        let rad = 1.0 - 2.0 * delta * delta;
        if rad < 0.0 {
            return Err(Error::DomainViolation(format!(
                "1 - 2δ² = {rad} is negative for δ = {delta}"
            )));
        }
        for sign in [Sign::Plus, Sign::Minus] {
            out.push(QubitSolution::Point(QubitBranchSolution {
                gamma,
                delta,
                alpha: sign.value() * rad.sqrt(),
                beta: -delta,
                branch: QubitBranch::GammaZero,
            }));
        }
    } else if delta == 0.0 {
        // α = −γ, β = ±√(1−2γ²).
        let rad = 1.0 - 2.0 * gamma * gamma;
        if rad < 0.0 {
            return Err(Error::DomainViolation(format!(
                "1 - 2γ² = {rad} is negative for γ = {gamma}"
            )));
        }
        for sign in [Sign::Plus, Sign::Minus] {
            out.push(QubitSolution::Point(QubitBranchSolution {
                gamma,
                delta,
                alpha: -gamma,
                beta: sign.value() * rad.sqrt(),
                branch: QubitBranch::DeltaZero,
            }));
        }
    } else {
        // General branch: with s = γ²+δ²,
        //   α = (δ/(γs))·(δs ± γ√(s−2s²)) − s/γ,  β = −(δs ± γ√(s−2s²))/s.
        let s = gamma * gamma + delta * delta;
        let rad = s - 2.0 * s * s;
        if rad < 0.0 {
            return Err(Error::DomainViolation(format!(
                "γ²+δ² = {s} exceeds 1/2; the radicand s−2s² = {rad} is negative"
            )));
        }
        let root = rad.sqrt();
        for sign in [Sign::Plus, Sign::Minus] {
            let inner = delta * s + sign.value() * gamma * root;
            out.push(QubitSolution::Point(QubitBranchSolution {
                gamma,
                delta,
                alpha: delta / (gamma * s) * inner - s / gamma,
                beta: -inner / s,
                branch: QubitBranch::General(sign),
            }));
        }
    }
    for sol in &out {
        if let QubitSolution::Point(p) = sol {
            let a = closed_form_family(&p.family_params())?;
            let e = family_to_ensemble(&a)?;
            let dev = gram_deviation(&e);
            if dev >= 1e-10 {
                return Err(Error::NumericalBreakdown(format!(
                    "qubit branch produced a non-orthonormal ensemble, deviation {dev:.3e}"
                )));
            }
            let max_res = check_qft_admissible(&e)?
                .into_iter()
                .fold(0.0, f64::max);
            if max_res >= 1e-10 {
                return Err(Error::NumericalBreakdown(format!(
                    "qubit branch produced a non-admissible ensemble, residual {max_res:.3e}"
                )));
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Qutrit constraint system
// ---------------------------------------------------------------------------

/// Provenance of a qutrit solution point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QutritBranch {
    X0Y0Zero,
    Y0Zero,
    Real,
    Numeric,
}

/// Record of the sign choices a closed-form branch made; zero fields mean
/// the coordinate was fixed or the choice does not apply.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SignChoices {
    /// Sub-family (1 or 2); 0 for the degenerate fallback and
    /// numeric solutions.
    pub family: u8,
    pub sx0: i8,
    pub sx1: i8,
    pub sx2: i8,
}

/// A point `(x0, y0, x1, y1, x2, y2)` of the qutrit orthonormality variety
/// with its branch provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QutritPoint {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub branch: QutritBranch,
    pub signs: SignChoices,
}

impl QutritPoint {
    pub fn from_coords(c: [f64; 6], branch: QutritBranch, signs: SignChoices) -> Self {
        QutritPoint {
            x0: c[0],
            y0: c[1],
            x1: c[2],
            y1: c[3],
            x2: c[4],
            y2: c[5],
            branch,
            signs,
        }
    }

    pub fn coords(&self) -> [f64; 6] {
        [self.x0, self.y0, self.x1, self.y1, self.x2, self.y2]
    }

    /// The qutrit family parameters induced by the point.
    pub fn family_params(&self) -> FamilyParams {
        FamilyParams::qutrit(
            Cplx::new(self.x0, self.y0),
            Cplx::new(self.x1, self.y1),
            Cplx::new(self.x2, self.y2),
        )
    }

    /// Serializable record with the constraint residuals attached.
    pub fn record(&self) -> QutritPointRecord {
        QutritPointRecord {
            branch: self.branch,
            signs: self.signs,
            point: self.coords(),
            residuals: qutrit_constraints(self),
        }
    }
}

/// JSON wire shape:
/// `{"branch":"...","signs":{...},"point":[x0,y0,x1,y1,x2,y2],"residuals":[f1,f2,f3,f4]}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QutritPointRecord {
    pub branch: QutritBranch,
    pub signs: SignChoices,
    pub point: [f64; 6],
    pub residuals: [f64; 4],
}

fn constraints_at(c: &[f64; 6]) -> [f64; 4] {
    let [x0, y0, x1, y1, x2, y2] = *c;
    let sx = x1 + x2 + 2.0 * x0;
    let sy = y1 + y2 + 2.0 * y0;
    [
        x0 * x0 + y0 * y0 + x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2 - 1.0,
        sx * sx + sy * sy + 2.0 * (x0 * x0 + y0 * y0) - 1.0,
        sx * x0 + sy * y0 + x0 * x1 + y0 * y1 + x0 * x2 + y0 * y2,
        x0 * x0 + y0 * y0 + 2.0 * x1 * x2 + 2.0 * y1 * y2,
    ]
}

fn jacobian_at(c: &[f64; 6]) -> [[f64; 6]; 4] {
    let [x0, y0, x1, y1, x2, y2] = *c;
    let sx = x1 + x2 + 2.0 * x0;
    let sy = y1 + y2 + 2.0 * y0;
    [
        [2.0 * x0, 2.0 * y0, 2.0 * x1, 2.0 * y1, 2.0 * x2, 2.0 * y2],
        [
            4.0 * sx + 4.0 * x0,
            4.0 * sy + 4.0 * y0,
            2.0 * sx,
            2.0 * sy,
            2.0 * sx,
            2.0 * sy,
        ],
        [
            sx + 2.0 * x0 + x1 + x2,
            sy + 2.0 * y0 + y1 + y2,
            2.0 * x0,
            2.0 * y0,
            2.0 * x0,
            2.0 * y0,
        ],
        [2.0 * x0, 2.0 * y0, 2.0 * x2, 2.0 * y2, 2.0 * x1, 2.0 * y1],
    ]
}

/// The residuals `(f1, f2, f3, f4)` at a point.
pub fn qutrit_constraints(p: &QutritPoint) -> [f64; 4] {
    constraints_at(&p.coords())
}

/// Analytic 4×6 Jacobian `∂f_i/∂(x0,y0,x1,y1,x2,y2)`.
pub fn qutrit_jacobian(p: &QutritPoint) -> [[f64; 6]; 4] {
    jacobian_at(&p.coords())
}

/// Numerical rank of the Jacobian at a point; 3 at smooth points of the
/// solution variety (the variety has dimension 6 − 3 = 3).
pub fn qutrit_jacobian_rank(p: &QutritPoint) -> usize {
    let j = qutrit_jacobian(p);
    let data: Vec<Cplx> = j
        .iter()
        .flat_map(|row| row.iter().map(|&v| Cplx::new(v, 0.0)))
        .collect();
    let m = CMatrix::new(4, 6, data).expect("finite Jacobian entries");
    rank(&m, DEFAULT_RANK_TOL).expect("valid tolerance")
}

fn max_abs_residual(c: &[f64; 6]) -> f64 {
    constraints_at(c)
        .iter()
        .fold(0.0, |acc, &r| acc.max(r.abs()))
}

/// Keeps candidates that satisfy the constraints, deduplicates coincident
/// ones (degenerate radicands make families collapse onto each other), and
/// orders the result lexicographically by coordinates.
fn validate_candidates(
    candidates: Vec<([f64; 6], SignChoices)>,
    branch: QutritBranch,
) -> Vec<QutritPoint> {
    let mut kept: Vec<QutritPoint> = Vec::new();
    for (coords, signs) in candidates {
        if !coords.iter().all(|v| v.is_finite()) {
            continue;
        }
        if max_abs_residual(&coords) >= BRANCH_VALIDATE_TOL {
            continue;
        }
        let duplicate = kept.iter().any(|p| {
            euclidean_distance(&p.coords(), &coords) < 1e-9
        });
        if !duplicate {
            kept.push(QutritPoint::from_coords(coords, branch, signs));
        }
    }
    sort_points(&mut kept);
    kept
}

fn euclidean_distance(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn sort_points(points: &mut [QutritPoint]) {
    points.sort_by(|a, b| {
        a.coords()
            .partial_cmp(&b.coords())
            .expect("finite coordinates")
    });
}

/// Solutions on the `x0 = y0 = 0` stratum.
///
/// For `y1·y2 ≠ 0` these are the two radical families (all sign
/// combinations generated, then filtered by residual). The radical
/// formulas divide by `y1·y2`, so for `y1·y2 = 0` the reduced system
/// `{x1·x2 = 0, x1²+x2² = 1−y1²−y2²}` is solved directly instead.
pub fn branch_x0y0_zero(y1: f64, y2: f64) -> Result<Vec<QutritPoint>> {
    if !y1.is_finite() || !y2.is_finite() {
        return Err(Error::NonFinite);
    }
    let s = y1 * y1 + y2 * y2;
    if s > 1.0 {
        return Err(Error::DomainViolation(format!(
            "y1²+y2² = {s} exceeds 1; no solutions with x0 = y0 = 0"
        )));
    }
    let mut candidates = Vec::new();
    if y1 * y2 == 0.0 {
        // Degenerate denominators: f4 forces x1·x2 = 0 and f1 forces
        // x1²+x2² = 1−s (f2, f3 then hold automatically on this stratum).
        let t = (1.0 - s).sqrt();
        for (x1, x2, sx1, sx2) in [
            (t, 0.0, 1i8, 0i8),
            (-t, 0.0, -1, 0),
            (0.0, t, 0, 1),
            (0.0, -t, 0, -1),
        ] {
            candidates.push((
                [0.0, 0.0, x1, y1, x2, y2],
                SignChoices {
                    family: 0,
                    sx0: 0,
                    sx1,
                    sx2,
                },
            ));
        }
    } else {
        let rad = (s - 1.0) * (s - 1.0) - 4.0 * y1 * y1 * y2 * y2;
        if rad < 0.0 {
            return Err(Error::DomainViolation(format!(
                "(y1²+y2²−1)² − 4y1²y2² = {rad} is negative; the radical families do not exist"
            )));
        }
        let root = rad.sqrt();
        for (family, root_sign) in [(1u8, -1.0), (2u8, 1.0)] {
            // family 1 uses 1−s−√rad, family 2 uses 1−s+√rad.
            let inner = (1.0 - s + root_sign * root).max(0.0);
            let x2_mag = (inner / 2.0).sqrt();
            let x1_base =
                (s - 1.0 + root_sign * root) * inner.sqrt() / (2.0 * 2f64.sqrt() * y1 * y2);
            for sx1 in [1i8, -1i8] {
                for sx2 in [1i8, -1i8] {
                    candidates.push((
                        [
                            0.0,
                            0.0,
                            f64::from(sx1) * x1_base,
                            y1,
                            f64::from(sx2) * x2_mag,
                            y2,
                        ],
                        SignChoices {
                            family,
                            sx0: 0,
                            sx1,
                            sx2,
                        },
                    ));
                }
            }
        }
    }
    Ok(validate_candidates(candidates, QutritBranch::X0Y0Zero))
}

/// Solutions on the `y0 = 0` stratum: the two families
///
/// ```text
/// x0 = ±√((1−(y1+y2)²)/3)
/// x1 = ∓√(1−(y1+y2)²)/(2√3) ∓′ √(1−(y1−y2)²)/2
/// x2 = ∓√(1−(y1+y2)²)/(2√3) ±′ √(1−(y1−y2)²)/2
/// ```
///
/// with all sign pairings generated and filtered by residual.
pub fn branch_y0_zero(y1: f64, y2: f64) -> Result<Vec<QutritPoint>> {
    if !y1.is_finite() || !y2.is_finite() {
        return Err(Error::NonFinite);
    }
    let sum_sq = (y1 + y2) * (y1 + y2);
    let diff_sq = (y1 - y2) * (y1 - y2);
    if sum_sq > 1.0 {
        return Err(Error::DomainViolation(format!(
            "(y1+y2)² = {sum_sq} exceeds 1"
        )));
    }
    if diff_sq > 1.0 {
        return Err(Error::DomainViolation(format!(
            "(y1−y2)² = {diff_sq} exceeds 1"
        )));
    }
    let x0_mag = ((1.0 - sum_sq) / 3.0).sqrt();
    let a = (1.0 - sum_sq).sqrt() / (2.0 * 3f64.sqrt());
    let b = (1.0 - diff_sq).sqrt() / 2.0;
    let mut candidates = Vec::new();
    for (family, b_sign) in [(1u8, -1.0), (2u8, 1.0)] {
        for sx0 in [1i8, -1i8] {
            for si in [1i8, -1i8] {
                let x0 = f64::from(sx0) * x0_mag;
                let x1 = f64::from(si) * a + b_sign * b;
                let x2 = f64::from(si) * a - b_sign * b;
                candidates.push((
                    [x0, 0.0, x1, y1, x2, y2],
                    SignChoices {
                        family,
                        sx0,
                        sx1: si,
                        sx2: si,
                    },
                ));
            }
        }
    }
    Ok(validate_candidates(candidates, QutritBranch::Y0Zero))
}

/// The four all-real solutions: `x0 = ±1/√3` with
/// `(x1, x2) = (∓1/(2√3)−1/2, ∓1/(2√3)+1/2)` and the swapped pair.
pub fn real_solutions() -> [QutritPoint; 4] {
    let x0 = 1.0 / 3f64.sqrt();
    let h = 1.0 / (2.0 * 3f64.sqrt());
    let mk = |family: u8, sx0: i8, x1: f64, x2: f64| {
        QutritPoint::from_coords(
            [f64::from(sx0) * x0, 0.0, x1, 0.0, x2, 0.0],
            QutritBranch::Real,
            SignChoices {
                family,
                sx0,
                sx1: -sx0,
                sx2: -sx0,
            },
        )
    };
    [
        mk(1, 1, -h - 0.5, -h + 0.5),
        mk(1, -1, h - 0.5, h + 0.5),
        mk(2, 1, -h + 0.5, -h - 0.5),
        mk(2, -1, h + 0.5, h - 0.5),
    ]
}

/// The closed-radical reference solution on the `y0 = y1 = y2 = 1/10` slice.
pub fn radical_point_y_tenth() -> QutritPoint {
    let s1909 = 1909f64.sqrt();
    let q = 44.0 + s1909;
    let x0 = (11.0 / 75.0 + s1909 / 300.0).sqrt();
    let x1 = (90.0 + 2.0 * 3f64.sqrt() * q.powf(1.5)
        - 135.0 * (3.0 * q).sqrt()
        - (5727.0 * q).sqrt())
        / 180.0;
    let x2 = (-47.0 * (3.0 * q).sqrt() + (5727.0 * q).sqrt()
        - (2862.0 + 54.0 * s1909 + 12354.0 * q - 282.0 * s1909 * q).sqrt())
        / 180.0;
    QutritPoint::from_coords(
        [x0, 0.1, x1, 0.1, x2, 0.1],
        QutritBranch::Numeric,
        SignChoices::default(),
    )
}

// ---------------------------------------------------------------------------
// Multistart Gauss–Newton solver
// ---------------------------------------------------------------------------

/// Configuration of the multistart solver. `residual_tol` bounds the sum of
/// squared constraint residuals at an accepted root.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub residual_tol: f64,
    pub max_iters: usize,
    pub num_starts: usize,
    pub start_box: f64,
    pub dedup_tol: f64,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            residual_tol: 1e-12,
            max_iters: 200,
            num_starts: 64,
            start_box: 1.2,
            dedup_tol: 1e-6,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("residual_tol", self.residual_tol),
            ("start_box", self.start_box),
            ("dedup_tol", self.dedup_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.max_iters == 0 || self.num_starts == 0 {
            return Err(Error::InvalidConfig(
                "max_iters and num_starts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Solver result: deduplicated roots plus convergence diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct SolveOutcome {
    pub points: Vec<QutritPoint>,
    pub converged_starts: usize,
    pub total_starts: usize,
    pub total_iterations: usize,
}

/// The constraint system restricted to a subset of free coordinates, the
/// rest held fixed.
struct MaskedSystem {
    fixed: [f64; 6],
    free_idx: &'static [usize],
}

impl MaskedSystem {
    fn coords(&self, x: &[f64]) -> [f64; 6] {
        let mut c = self.fixed;
        for (slot, &idx) in self.free_idx.iter().enumerate() {
            c[idx] = x[slot];
        }
        c
    }

    fn residuals(&self, x: &[f64]) -> [f64; 4] {
        constraints_at(&self.coords(x))
    }

    /// 4 × k Jacobian restricted to the free coordinates.
    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let full = jacobian_at(&self.coords(x));
        full.iter()
            .map(|row| self.free_idx.iter().map(|&idx| row[idx]).collect())
            .collect()
    }
}

/// Gaussian elimination with partial pivoting for the small (≤6×6) normal
/// equations; `None` when the system is numerically singular.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let b_col = b[col];
        let (pivot_rows, rest) = a.split_at_mut(col + 1);
        let pivot = &pivot_rows[col];
        for (offset, row_vals) in rest.iter_mut().enumerate() {
            let factor = row_vals[col] / pivot[col];
            for (rv, pv) in row_vals[col..].iter_mut().zip(&pivot[col..]) {
                *rv -= factor * pv;
            }
            b[col + 1 + offset] -= factor * b_col;
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn sum_sq(r: &[f64; 4]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// One Gauss–Newton run with Levenberg damping: damping grows when a step
/// fails to reduce the sum of squares and shrinks when it succeeds. The run
/// stops on a negligible accepted step, on stalling after the residual
/// target is met, or at the iteration cap; iterating past the first
/// sub-tolerance residual polishes accepted roots to machine precision,
/// which the quadratic tail reaches in one or two extra steps.
fn gauss_newton(sys: &MaskedSystem, start: &[f64], cfg: &SolverConfig) -> (Vec<f64>, f64, usize) {
    let k = start.len();
    let mut x = start.to_vec();
    let mut res = sys.residuals(&x);
    let mut ss = sum_sq(&res);
    let mut lambda = 1e-3;
    let mut iters = 0;
    while iters < cfg.max_iters && ss > 0.0 {
        iters += 1;
        let jac = sys.jacobian(&x);
        let mut jtj = vec![vec![0.0; k]; k];
        let mut jtf = vec![0.0; k];
        for (jr, &r) in jac.iter().zip(res.iter()) {
            for (i, &ji) in jr.iter().enumerate() {
                jtf[i] += ji * r;
                for (j, &jj) in jr.iter().enumerate() {
                    jtj[i][j] += ji * jj;
                }
            }
        }
        let mut a = jtj.clone();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += lambda;
        }
        let rhs: Vec<f64> = jtf.iter().map(|v| -v).collect();
        let step_attempt = solve_linear(a, rhs).and_then(|delta| {
            let xn: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v + d).collect();
            let res_n = sys.residuals(&xn);
            let ss_n = sum_sq(&res_n);
            if ss_n < ss {
                Some((delta, xn, res_n, ss_n))
            } else {
                None
            }
        });
        match step_attempt {
            Some((delta, xn, res_n, ss_n)) => {
                let step = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
                x = xn;
                res = res_n;
                ss = ss_n;
                lambda = (lambda / 10.0).max(1e-12);
                if step < 1e-14 {
                    break;
                }
            }
            None => {
                lambda = (lambda * 10.0).min(1e12);
                if ss < cfg.residual_tol {
                    break;
                }
            }
        }
    }
    (x, ss, iters)
}

fn multistart(sys: &MaskedSystem, cfg: &SolverConfig, branch: QutritBranch) -> SolveOutcome {
    let k = sys.free_idx.len();
    let mut converged: Vec<[f64; 6]> = Vec::new();
    let mut converged_starts = 0;
    let mut total_iterations = 0;
    for start_index in 0..cfg.num_starts {
        // Per-start RNG stream: results are independent of evaluation order.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(start_index as u64);
        let start: Vec<f64> = (0..k)
            .map(|_| rng.gen::<f64>() * 2.0 * cfg.start_box - cfg.start_box)
            .collect();
        let (x, ss, iters) = gauss_newton(sys, &start, cfg);
        total_iterations += iters;
        if ss < cfg.residual_tol {
            converged_starts += 1;
            converged.push(sys.coords(&x));
        }
    }
    converged.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    let mut unique: Vec<[f64; 6]> = Vec::new();
    for c in converged {
        if !unique
            .iter()
            .any(|u| euclidean_distance(u, &c) < cfg.dedup_tol)
        {
            unique.push(c);
        }
    }
    let points = unique
        .into_iter()
        .map(|c| QutritPoint::from_coords(c, branch, SignChoices::default()))
        .collect();
    SolveOutcome {
        points,
        converged_starts,
        total_starts: cfg.num_starts,
        total_iterations,
    }
}

/// Multistart Gauss–Newton solve for `(x0, x1, x2)` with the imaginary parts
/// held at the given values. Converged roots (sum of squared residuals below
/// `cfg.residual_tol`) are deduplicated within `cfg.dedup_tol` and sorted by
/// coordinates; an empty list means no start converged. Deterministic for a
/// fixed `cfg.rng_seed`.
pub fn solve_fixed_imag(y0: f64, y1: f64, y2: f64, cfg: &SolverConfig) -> Result<SolveOutcome> {
    if !y0.is_finite() || !y1.is_finite() || !y2.is_finite() {
        return Err(Error::NonFinite);
    }
    cfg.validate()?;
    let sys = MaskedSystem {
        fixed: [0.0, y0, 0.0, y1, 0.0, y2],
        free_idx: &[0, 2, 4],
    };
    Ok(multistart(&sys, cfg, QutritBranch::Numeric))
}

/// Multistart solve over all six coordinates; converged points are samples
/// of the three-dimensional solution variety.
pub fn solve_full(cfg: &SolverConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    let sys = MaskedSystem {
        fixed: [0.0; 6],
        free_idx: &[0, 1, 2, 3, 4, 5],
    };
    Ok(multistart(&sys, cfg, QutritBranch::Numeric))
}
