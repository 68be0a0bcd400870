//! State ensembles: the columns of an admissible matrix viewed as state
//! vectors, with admissibility residuals computed directly from the defining
//! transform equation (independently of the commutant machinery) and Gram
//! matrices under the convention that the first argument is conjugated.

use serde::{Deserialize, Serialize};

use crate::linalg::{qft_matrix, CMatrix, Cplx};
use crate::{Error, Result};

/// An ordered list of n state vectors `|ψ_0⟩ … |ψ_{n−1}⟩`, each of length n.
/// States are not auto-normalized; normalization is checked where a context
/// requires it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "EnsembleWire", try_from = "EnsembleWire")]
pub struct Ensemble {
    n: usize,
    states: Vec<Vec<Cplx>>,
}

/// JSON wire shape: `{"n":N,"states":[[[re,im],...],...]}`, states outer,
/// amplitudes inner, amplitude index matching `|0⟩ … |n−1⟩`.
#[derive(Serialize, Deserialize)]
struct EnsembleWire {
    n: usize,
    states: Vec<Vec<[f64; 2]>>,
}

impl From<Ensemble> for EnsembleWire {
    fn from(e: Ensemble) -> Self {
        EnsembleWire {
            n: e.n,
            states: e
                .states
                .iter()
                .map(|s| s.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<EnsembleWire> for Ensemble {
    type Error = Error;

    fn try_from(w: EnsembleWire) -> Result<Self> {
        let states = w
            .states
            .iter()
            .map(|s| s.iter().map(|&[re, im]| Cplx::new(re, im)).collect())
            .collect();
        Ensemble::new(w.n, states)
    }
}

impl Ensemble {
    /// Builds an ensemble, requiring exactly n states of length n with finite
    /// amplitudes and n ≥ 2.
    pub fn new(n: usize, states: Vec<Vec<Cplx>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall { n, min: 2 });
        }
        if states.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} states, got {}",
                states.len()
            )));
        }
        for (j, s) in states.iter().enumerate() {
            if s.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "state {j} has {} amplitudes, expected {n}",
                    s.len()
                )));
            }
            if !s.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Ensemble { n, states })
    }

    /// The standard basis `|0⟩ … |n−1⟩`.
    pub fn standard_basis(n: usize) -> Result<Self> {
        let states = (0..n)
            .map(|j| {
                let mut s = vec![Cplx::new(0.0, 0.0); n];
                s[j] = Cplx::new(1.0, 0.0);
                s
            })
            .collect();
        Ensemble::new(n, states)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[Vec<Cplx>] {
        &self.states
    }

    pub fn state(&self, j: usize) -> &[Cplx] {
        &self.states[j]
    }

    /// Largest deviation of a state 2-norm from 1.
    pub fn norm_deviation(&self) -> f64 {
        self.states
            .iter()
            .map(|s| {
                let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                (norm - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Reads the states off the columns of a square matrix: state j = column j.
pub fn family_to_ensemble(a: &CMatrix) -> Result<Ensemble> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    Ensemble::new(n, (0..n).map(|j| a.col(j)).collect())
}

/// Inverse of [`family_to_ensemble`].
pub fn ensemble_to_family(e: &Ensemble) -> CMatrix {
    let n = e.n();
    let mut m = CMatrix::zeros(n, n);
    for (j, s) in e.states().iter().enumerate() {
        for (i, &z) in s.iter().enumerate() {
            m.set(i, j, z);
        }
    }
    m
}

/// Per-state admissibility residuals
/// `‖U_n|ψ_j⟩ − (1/√n) Σ_k ω^{jk} |ψ_k⟩‖₂`, evaluated from the defining
/// equation itself so the check is independent of the commutant route.
pub fn check_qft_admissible(e: &Ensemble) -> Result<Vec<f64>> {
    let n = e.n();
    let u = qft_matrix(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    // Unit-root table read back from row 1 of the transform so the residual
    // uses the same ω^p values, including exact quarter-period entries.
    let omega: Vec<Cplx> = (0..n).map(|p| u.get(1, p).scale((n as f64).sqrt())).collect();
    let mut residuals = Vec::with_capacity(n);
    for j in 0..n {
        let lhs = u.apply(e.state(j))?;
        let mut rhs = vec![Cplx::new(0.0, 0.0); n];
        for k in 0..n {
            let w = omega[(j * k) % n] * scale;
            for (i, acc) in rhs.iter_mut().enumerate() {
                *acc += w * e.state(k)[i];
            }
        }
        let res = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residuals.push(res);
    }
    Ok(residuals)
}

/// Gram matrix with entry `(u,v) = ⟨ψ_u|ψ_v⟩`, conjugate-linear in the first
/// argument.
pub fn gram(e: &Ensemble) -> CMatrix {
    let n = e.n();
    let mut g = CMatrix::zeros(n, n);
    for u in 0..n {
        for v in 0..n {
            let dot: Cplx = e
                .state(u)
                .iter()
                .zip(e.state(v))
                .map(|(a, b)| a.conj() * b)
                .sum();
            g.set(u, v, dot);
        }
    }
    g
}

/// Deviation of the Gram matrix from the identity; zero exactly for
/// orthonormal ensembles.
pub fn gram_deviation(e: &Ensemble) -> f64 {
    let g = gram(e);
    let id = CMatrix::identity(e.n());
    g.sub(&id).expect("same shape").frobenius_norm()
}

/// Applies `U_n` to every state.
pub fn apply_qft(e: &Ensemble) -> Result<Ensemble> {
    let u = qft_matrix(e.n())?;
    let states = e
        .states()
        .iter()
        .map(|s| u.apply(s))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(e.n(), states)
}
