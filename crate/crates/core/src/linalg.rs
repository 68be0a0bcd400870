//! Dense complex linear algebra sized for this problem: matrices stay within
//! 64×64 on the core paths, so everything is straightforward O(n³) dense code
//! with accuracy favored over speed.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Complex scalar; finite components are required by every public operation.
pub type Cplx = Complex<f64>;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixWire", try_from = "MatrixWire")]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cplx>,
}

/// JSON wire shape: `{"rows":R,"cols":C,"data":[[re,im],...]}` row-major.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl From<CMatrix> for MatrixWire {
    fn from(m: CMatrix) -> Self {
        MatrixWire {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixWire> for CMatrix {
    type Error = Error;

    fn try_from(w: MatrixWire) -> Result<Self> {
        let data = w.data.iter().map(|&[re, im]| Cplx::new(re, im)).collect();
        CMatrix::new(w.rows, w.cols, data)
    }
}

impl CMatrix {
    /// Builds a matrix from row-major data; rejects length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Cplx>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "data length {} does not equal {rows}x{cols}",
                data.len()
            )));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Cplx::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Cplx::new(1.0, 0.0));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry access.
    pub fn get(&self, r: usize, c: usize) -> Cplx {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Cplx) {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[Cplx] {
        &self.data
    }

    pub fn col(&self, c: usize) -> Vec<Cplx> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Plain transpose, no conjugation.
    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(Cplx, Cplx) -> Cplx) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: Cplx) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Cplx]) -> Result<Vec<Cplx>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c) * v[c])
                    .sum::<Cplx>()
            })
            .collect())
    }

    pub fn trace(&self) -> Result<Cplx> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// The QFT matrix `U_n` with entry `(j,k) = ω^{jk}/√n`, `ω = e^{2πi/n}`.
///
/// The phase exponent is reduced mod n before evaluation so entries are exact
/// roots of unity up to one trig rounding, independent of j·k magnitude.
/// Quarter-period phases are emitted exactly (no trig noise on ±1, ±i).
pub fn qft_matrix(n: usize) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    let scale = 1.0 / (n as f64).sqrt();
    let root = |e: usize| -> Cplx {
        if (4 * e).is_multiple_of(n) {
            match 4 * e / n {
                0 => Cplx::new(1.0, 0.0),
                1 => Cplx::new(0.0, 1.0),
                2 => Cplx::new(-1.0, 0.0),
                _ => Cplx::new(0.0, -1.0),
            }
        } else {
            let arg = std::f64::consts::TAU * (e as f64) / (n as f64);
            Cplx::new(arg.cos(), arg.sin())
        }
    };
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            m.set(j, k, root((j * k) % n).scale(scale));
        }
    }
    Ok(m)
}

/// Standard complex matrix product.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = CMatrix::zeros(a.rows, b.cols);
    for r in 0..a.rows {
        for k in 0..a.cols {
            let arc = a.get(r, k);
            if arc == Cplx::new(0.0, 0.0) {
                continue;
            }
            for c in 0..b.cols {
                let v = out.get(r, c) + arc * b.get(k, c);
                out.set(r, c, v);
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.transpose().conj()
}

/// Applies the phase-folded Jacobi rotation to column pair (p, q) in place.
fn rotate_pair(cols: &mut [Vec<Cplx>], p: usize, q: usize, phase: Cplx, cs: f64, sn: f64) {
    let (head, tail) = cols.split_at_mut(q);
    for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let (xv, yv) = (*x, *y);
        *x = xv * cs - yv * phase.conj() * sn;
        *y = xv * phase * sn + yv * cs;
    }
}

/// Singular values in descending order together with the matching right
/// singular vectors (columns of the returned matrix), via one-sided Jacobi:
/// columns of a working copy are repeatedly rotated pairwise until mutually
/// orthogonal, accumulating the rotations into V. For the ≤64-column systems
/// here this is simple and accurate to machine precision.
fn jacobi_svd_right(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let cols = m.cols;
    // Working columns of A and V, kept as contiguous vectors per column.
    let mut a: Vec<Vec<Cplx>> = (0..cols).map(|c| m.col(c)).collect();
    let mut v: Vec<Vec<Cplx>> = (0..cols)
        .map(|c| {
            let mut e = vec![Cplx::new(0.0, 0.0); cols];
            e[c] = Cplx::new(1.0, 0.0);
            e
        })
        .collect();
    let eps = 1e-14;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let app: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let aqq: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let apq: Cplx = a[p]
                    .iter()
                    .zip(&a[q])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let off = apq.norm();
                if off <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // Zero the (p,q) Gram entry: fold the phase of ⟨A_p,A_q⟩ into
                // the rotation, then a real Jacobi angle from tan2θ = 2|g|/(aqq−app).
                let phase = Cplx::from_polar(1.0, apq.arg());
                let tau = (aqq - app) / (2.0 * off);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_pair(&mut a, p, q, phase, cs, sn);
                rotate_pair(&mut v, p, q, phase, cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    let sigma: Vec<f64> = a
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    let singular: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    let mut vm = CMatrix::zeros(cols, cols);
    for (out_c, &src) in order.iter().enumerate() {
        for (r, &val) in v[src].iter().enumerate() {
            vm.set(r, out_c, val);
        }
    }
    (singular, vm)
}

/// Singular values of `m` in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    jacobi_svd_right(m).0
}

/// Numerical rank: the number of singular values exceeding `tol` times the
/// largest one. Complements [`nullspace`] (rank + nullity = columns).
pub fn rank(m: &CMatrix, tol: f64) -> Result<usize> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    Ok(sv.iter().filter(|&&s| s > tol * smax).count())
}

/// Orthonormal basis of the numerical nullspace of `m`: the right singular
/// vectors whose singular values are at most `tol` times the largest singular
/// value. A zero matrix therefore yields a full basis and a well-conditioned
/// square matrix an empty one.
pub fn nullspace(m: &CMatrix, tol: f64) -> Result<Vec<Vec<Cplx>>> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let (sv, v) = jacobi_svd_right(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let mut basis = Vec::new();
    for (j, &s) in sv.iter().enumerate() {
        if s <= tol * smax {
            basis.push(v.col(j));
        }
    }
    Ok(basis)
}

/// Multiplicities of the eigenvalues of `U_n`. Since `U_n⁴ = I`, the spectrum
/// is contained in `{1, −1, i, −i}` and each multiplicity is the trace of the
/// corresponding projector `P_λ = (1/4) Σ_m λ^{−m} U_n^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EigenMultiplicities {
    pub n: usize,
    pub m_plus1: usize,
    pub m_minus1: usize,
    pub m_plusi: usize,
    pub m_minusi: usize,
}

impl EigenMultiplicities {
    pub fn as_array(&self) -> [usize; 4] {
        [self.m_plus1, self.m_minus1, self.m_plusi, self.m_minusi]
    }

    pub fn sum(&self) -> usize {
        self.m_plus1 + self.m_minus1 + self.m_plusi + self.m_minusi
    }

    /// True when every eigenvalue of `U_n` is simple.
    pub fn all_distinct(&self) -> bool {
        self.as_array().iter().all(|&m| m <= 1)
    }

    /// Σ multiplicity²: the dimension of the commutant of `U_n`.
    pub fn commutant_dim(&self) -> usize {
        self.as_array().iter().map(|&m| m * m).sum()
    }
}

/// Eigenvalue multiplicities of `U_n` via the projector identity. Fails if
/// `U_n⁴` deviates from the identity by more than 1e-10 in Frobenius norm or
/// if a projector trace is further than 1e-8 from an integer, both of which
/// would signal numerical breakdown rather than a property of `U_n`.
pub fn qft_eigen_multiplicities(n: usize) -> Result<EigenMultiplicities> {
    let u = qft_matrix(n)?;
    let u2 = matmul(&u, &u)?;
    let u3 = matmul(&u2, &u)?;
    let u4 = matmul(&u2, &u2)?;
    let id = CMatrix::identity(n);
    let dev = u4.sub(&id)?.frobenius_norm();
    if dev >= 1e-10 {
        return Err(Error::NumericalBreakdown(format!(
            "U_{n}^4 deviates from the identity by {dev:.3e}"
        )));
    }
    let traces = [
        id.trace()?,
        u.trace()?,
        u2.trace()?,
        u3.trace()?,
    ];
    let lambdas = [
        Cplx::new(1.0, 0.0),
        Cplx::new(-1.0, 0.0),
        Cplx::new(0.0, 1.0),
        Cplx::new(0.0, -1.0),
    ];
    let mut counts = [0usize; 4];
    for (slot, lambda) in lambdas.iter().enumerate() {
        let mut tr = Cplx::new(0.0, 0.0);
        for (m, t) in traces.iter().enumerate() {
            // λ^{−m} = conj(λ)^m for unimodular λ.
            tr += lambda.conj().powu(m as u32) * t;
        }
        tr /= 4.0;
        let rounded = tr.re.round();
        if (tr.re - rounded).abs() > 1e-8 || tr.im.abs() > 1e-8 || rounded < -0.5 {
            return Err(Error::NumericalBreakdown(format!(
                "projector trace {tr} for eigenvalue {lambda} is not a non-negative integer"
            )));
        }
        counts[slot] = rounded as usize;
    }
    let result = EigenMultiplicities {
        n,
        m_plus1: counts[0],
        m_minus1: counts[1],
        m_plusi: counts[2],
        m_minusi: counts[3],
    };
    if result.sum() != n {
        return Err(Error::NumericalBreakdown(format!(
            "multiplicities {:?} do not sum to {n}",
            result.as_array()
        )));
    }
    Ok(result)
}
