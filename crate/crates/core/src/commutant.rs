//! The commutant of `U_n`: the linear space of matrices `A` with
//! `U_n A = A U_n`, whose columns are exactly the admissible ensembles.
//!
//! Vectorization is column-stacking throughout, so `vec(UA) = (I⊗U)vec(A)`
//! and `vec(AU) = (Uᵀ⊗I)vec(A)`; the commutation condition becomes the linear
//! system `K·vec(A) = 0` with `K = (I⊗U) − (Uᵀ⊗I)`.

use num_complex::Complex;

use crate::linalg::{
    matmul, nullspace, qft_eigen_multiplicities, qft_matrix, rank, CMatrix, Cplx,
};
use crate::{Error, Result, DEFAULT_RANK_TOL};

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = (a.rows(), a.cols());
    let (br, bc) = (b.rows(), b.cols());
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a.get(i, j);
            for k in 0..br {
                for l in 0..bc {
                    out.set(i * br + k, j * bc + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization: `v[j·rows + i] = m[i][j]`.
pub fn vec_cols(m: &CMatrix) -> Vec<Cplx> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            v.push(m.get(i, j));
        }
    }
    v
}

/// Inverse of [`vec_cols`] for square matrices.
pub fn unvec_cols(n: usize, v: &[Cplx]) -> Result<CMatrix> {
    if v.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} is not {n}²",
            v.len()
        )));
    }
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            m.set(i, j, v[j * n + i]);
        }
    }
    Ok(m)
}

/// The n²×n² operator `K = (I⊗U) − (Uᵀ⊗I)` with `K·vec(A) = vec(UA − AU)`
/// under column-stacking.
pub fn commutator_operator(u: &CMatrix) -> Result<CMatrix> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let id = CMatrix::identity(u.rows());
    kron(&id, u).sub(&kron(&u.transpose(), &id))
}

/// An orthonormalized basis of the commutant of `U_n`.
#[derive(Clone, Debug)]
pub struct CommutantBasis {
    pub n: usize,
    pub basis: Vec<CMatrix>,
    pub dim: usize,
}

/// Computes the commutant of `U_n` as the nullspace of the commutator
/// operator, devectorized into matrices. The dimension is cross-checked
/// against `Σ multiplicity²` from the eigenvalue projectors; disagreement
/// means the numerical rank decision is unstable and is reported as an error.
pub fn commutant_basis(n: usize, tol: f64) -> Result<CommutantBasis> {
    let u = qft_matrix(n)?;
    let k = commutator_operator(&u)?;
    let vectors = nullspace(&k, tol)?;
    let dim = vectors.len();
    let expected = qft_eigen_multiplicities(n)?.commutant_dim();
    if dim != expected {
        return Err(Error::NumericalBreakdown(format!(
            "commutant dimension {dim} from the nullspace disagrees with {expected} from eigenvalue multiplicities"
        )));
    }
    let mut basis = Vec::with_capacity(dim);
    for v in &vectors {
        let b = unvec_cols(n, v)?;
        let residual = matmul(&u, &b)?.sub(&matmul(&b, &u)?)?.frobenius_norm();
        if residual >= 1e-10 {
            return Err(Error::NumericalBreakdown(format!(
                "basis element fails to commute, residual {residual:.3e}"
            )));
        }
        basis.push(b);
    }
    Ok(CommutantBasis { n, basis, dim })
}

/// Free parameters of the closed-form families.
///
/// Ordering: n=2 takes `(α_{0,1}, α_{1,1})`; n=3 takes
/// `(α_{0,1}, α_{1,1}, α_{1,2})`; n=4 takes
/// `(α_{2,2}, α_{3,2}, α_{0,3}, α_{1,3}, α_{2,3}, α_{3,3})`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyParams {
    n: usize,
    params: Vec<Cplx>,
}

impl FamilyParams {
    pub fn new(n: usize, params: Vec<Cplx>) -> Result<Self> {
        let expected = Self::param_count(n)?;
        if params.len() != expected {
            return Err(Error::ParamCount {
                n,
                expected,
                got: params.len(),
            });
        }
        if !params.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(FamilyParams { n, params })
    }

    /// Number of free parameters for dimension `n` (2, 3, 6 for n = 2, 3, 4).
    pub fn param_count(n: usize) -> Result<usize> {
        match n {
            2 => Ok(2),
            3 => Ok(3),
            4 => Ok(6),
            _ => Err(Error::UnsupportedFamily(n)),
        }
    }

    pub fn qubit(a01: Cplx, a11: Cplx) -> Self {
        FamilyParams {
            n: 2,
            params: vec![a01, a11],
        }
    }

    pub fn qutrit(a01: Cplx, a11: Cplx, a12: Cplx) -> Self {
        FamilyParams {
            n: 3,
            params: vec![a01, a11, a12],
        }
    }

    pub fn ququart(params: [Cplx; 6]) -> Self {
        FamilyParams {
            n: 4,
            params: params.to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &[Cplx] {
        &self.params
    }
}

/// Builds the closed-form commutant member `A_n` for n ∈ {2, 3, 4};
/// column j is the state `|ψ_j⟩`.
pub fn closed_form_family(p: &FamilyParams) -> Result<CMatrix> {
    let prm = &p.params;
    match p.n {
        2 => {
            let (a01, a11) = (prm[0], prm[1]);
            CMatrix::new(
                2,
                2,
                vec![
                    2.0 * a01 + a11, a01, //
                    a01, a11,
                ],
            )
        }
        3 => {
            let (a01, a11, a12) = (prm[0], prm[1], prm[2]);
            CMatrix::new(
                3,
                3,
                vec![
                    a11 + a12 + 2.0 * a01, a01, a01, //
                    a01, a11, a12, //
                    a01, a12, a11,
                ],
            )
        }
        4 => {
            let (a22, a32, a03, a13, a23, a33) =
                (prm[0], prm[1], prm[2], prm[3], prm[4], prm[5]);
            let psi0 = [
                a22 + 2.0 * a32 + 2.0 * a03,
                a03,
                a22 + 2.0 * a32 + a03 - a13 - a23 - a33,
                a03,
            ];
            let psi1 = [a32 + a03 - a23, a33, a32, a13];
            let psi2 = [a22 + a03 - a13 + a23 - a33, a23, a22, a23];
            let psi3 = [a32 + a03 - a23, a13, a32, a33];
            let cols = [psi0, psi1, psi2, psi3];
            let mut m = CMatrix::zeros(4, 4);
            for (j, col) in cols.iter().enumerate() {
                for (i, &z) in col.iter().enumerate() {
                    m.set(i, j, z);
                }
            }
            Ok(m)
        }
        other => Err(Error::UnsupportedFamily(other)),
    }
}

/// Commutation residual `‖U_n A − A U_n‖_F`; zero exactly on commutant
/// members, so callers compare the returned value against their tolerance.
pub fn verify_membership(a: &CMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let u = qft_matrix(a.rows())?;
    Ok(matmul(&u, a)?.sub(&matmul(a, &u)?)?.frobenius_norm())
}

/// Whether every commutant basis element is symmetric under the plain
/// (unconjugated) transpose, with a witness when not.
#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub n: usize,
    pub all_symmetric: bool,
    /// Largest `‖B − Bᵀ‖_F` over the computed basis.
    pub max_asymmetry: f64,
    /// Unit-Frobenius-norm commutant member with `‖W − Wᵀ‖_F = 2`, present
    /// exactly when `all_symmetric` is false.
    pub witness: Option<CMatrix>,
}

/// Tests symmetry of the whole commutant. Since the commutant is a linear
/// space, symmetry of any basis is equivalent to symmetry of the space, and
/// because `U_n` is itself symmetric the commutant is closed under transpose;
/// the normalized antisymmetric part of a nonsymmetric basis element is
/// therefore again a commutant member and serves as the witness.
pub fn symmetry_report(n: usize) -> Result<SymmetryReport> {
    let cb = commutant_basis(n, DEFAULT_RANK_TOL)?;
    let mut max_asymmetry = 0.0;
    let mut worst: Option<&CMatrix> = None;
    for b in &cb.basis {
        let asym = b.sub(&b.transpose())?.frobenius_norm();
        if asym > max_asymmetry {
            max_asymmetry = asym;
            worst = Some(b);
        }
    }
    if max_asymmetry < 1e-9 {
        return Ok(SymmetryReport {
            n,
            all_symmetric: true,
            max_asymmetry,
            witness: None,
        });
    }
    let b = worst.expect("nonsymmetric element exists when max_asymmetry > 0");
    let skew = b.sub(&b.transpose())?;
    let witness = skew.scale(Cplx::new(1.0 / skew.frobenius_norm(), 0.0));
    let membership = verify_membership(&witness)?;
    if membership >= 1e-9 {
        return Err(Error::NumericalBreakdown(format!(
            "symmetry witness drifted out of the commutant, residual {membership:.3e}"
        )));
    }
    Ok(SymmetryReport {
        n,
        all_symmetric: false,
        max_asymmetry,
        witness: Some(witness),
    })
}

/// A parameterized builder of commutant members: the closed forms for
/// n ∈ {2, 3, 4} and coordinates in a computed commutant basis otherwise.
#[derive(Clone, Debug)]
pub enum AdmissibleFamily {
    ClosedForm { n: usize },
    Basis(CommutantBasis),
}

impl AdmissibleFamily {
    pub fn for_dimension(n: usize, tol: f64) -> Result<Self> {
        match n {
            2..=4 => Ok(AdmissibleFamily::ClosedForm { n }),
            _ => Ok(AdmissibleFamily::Basis(commutant_basis(n, tol)?)),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AdmissibleFamily::ClosedForm { n } => *n,
            AdmissibleFamily::Basis(cb) => cb.n,
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            AdmissibleFamily::ClosedForm { n } => {
                FamilyParams::param_count(*n).expect("closed form exists")
            }
            AdmissibleFamily::Basis(cb) => cb.dim,
        }
    }

    /// Builds `A_n` from free parameters: the closed-form map for small n,
    /// otherwise the linear combination `Σ params[k]·B_k` of basis elements.
    pub fn build(&self, params: &[Cplx]) -> Result<CMatrix> {
        match self {
            AdmissibleFamily::ClosedForm { n } => {
                closed_form_family(&FamilyParams::new(*n, params.to_vec())?)
            }
            AdmissibleFamily::Basis(cb) => {
                if params.len() != cb.dim {
                    return Err(Error::ParamCount {
                        n: cb.n,
                        expected: cb.dim,
                        got: params.len(),
                    });
                }
                let mut acc = CMatrix::zeros(cb.n, cb.n);
                for (coef, b) in params.iter().zip(&cb.basis) {
                    acc = acc.add(&b.scale(*coef))?;
                }
                Ok(acc)
            }
        }
    }
}

/// Rank of the stacked vectorized closed-form family over the canonical
/// parameter basis (each parameter set to 1 then to i). Equality with the
/// commutant dimension certifies that the closed forms span the whole
/// commutant.
pub fn closed_form_span_rank(n: usize, tol: f64) -> Result<usize> {
    let p = FamilyParams::param_count(n)?;
    let mut columns: Vec<Vec<Cplx>> = Vec::with_capacity(2 * p);
    for unit in [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)] {
        for k in 0..p {
            let mut params = vec![Cplx::new(0.0, 0.0); p];
            params[k] = unit;
            let a = closed_form_family(&FamilyParams::new(n, params)?)?;
            columns.push(vec_cols(&a));
        }
    }
    let mut stacked = CMatrix::zeros(n * n, columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            stacked.set(i, j, z);
        }
    }
    rank(&stacked, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn random_params(n: usize, rng: &mut ChaCha8Rng) -> FamilyParams {
        let count = FamilyParams::param_count(n).unwrap();
        let params = (0..count)
            .map(|_| c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        FamilyParams::new(n, params).unwrap()
    }

    #[test]
    fn commutator_operator_of_identity_is_zero() {
        let id = CMatrix::identity(3);
        let k = commutator_operator(&id).unwrap();
        assert!(k.frobenius_norm() < 1e-15);
    }

    #[test]
    fn commutator_operator_annihilates_u_itself() {
        let u = qft_matrix(3).unwrap();
        let k = commutator_operator(&u).unwrap();
        let kv = k.apply(&vec_cols(&u)).unwrap();
        let res: f64 = kv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-12);
    }

    #[test]
    fn commutator_operator_annihilates_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = closed_form_family(&random_params(2, &mut rng)).unwrap();
        let u = qft_matrix(2).unwrap();
        let k = commutator_operator(&u).unwrap();
        let kv = k.apply(&vec_cols(&a)).unwrap();
        let res: f64 = kv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(res < 1e-12);
    }

    #[test]
    fn commutator_operator_rejects_non_square() {
        assert!(commutator_operator(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn commutator_matches_direct_commutator_on_random_input() {
        let u = qft_matrix(3).unwrap();
        let k = commutator_operator(&u).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = CMatrix::new(
            3,
            3,
            (0..9)
                .map(|_| c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
                .collect(),
        )
        .unwrap();
        let direct = vec_cols(&matmul(&u, &a).unwrap().sub(&matmul(&a, &u).unwrap()).unwrap());
        let via_k = k.apply(&vec_cols(&a)).unwrap();
        let dev: f64 = direct
            .iter()
            .zip(&via_k)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dev < 1e-13);
    }

    #[test]
    fn commutant_dimensions_2_to_8() {
        let expected = [(2, 2), (3, 3), (4, 6), (5, 7), (6, 10), (7, 13), (8, 18)];
        for (n, dim) in expected {
            let cb = commutant_basis(n, DEFAULT_RANK_TOL).unwrap();
            assert_eq!(cb.dim, dim, "n={n}");
            assert_eq!(cb.basis.len(), dim);
        }
    }

    #[test]
    fn commutant_basis_vectors_are_independent() {
        let cb = commutant_basis(4, DEFAULT_RANK_TOL).unwrap();
        // Gram matrix of the vectorized basis should be the identity because
        // nullspace output is orthonormal.
        for (i, a) in cb.basis.iter().enumerate() {
            for (j, b) in cb.basis.iter().enumerate() {
                let dot: Cplx = vec_cols(a)
                    .iter()
                    .zip(&vec_cols(b))
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot.norm() - expected).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn closed_form_n2_standard_basis() {
        let a = closed_form_family(&FamilyParams::qubit(c(0.0, 0.0), c(1.0, 0.0))).unwrap();
        assert_eq!(a, CMatrix::identity(2));
    }

    #[test]
    fn closed_form_n3_first_reference_ensemble() {
        let a = closed_form_family(&FamilyParams::qutrit(
            c(0.0, 0.0),
            c(0.5, -0.5),
            c(0.5, 0.5),
        ))
        .unwrap();
        // ψ0 = |0⟩, ψ1 = ((1−i)/2)|1⟩ + ((1+i)/2)|2⟩, ψ2 = ((1+i)/2)|1⟩ + ((1−i)/2)|2⟩.
        assert!((a.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(a.get(1, 0).norm() < 1e-15 && a.get(2, 0).norm() < 1e-15);
        assert!((a.get(1, 1) - c(0.5, -0.5)).norm() < 1e-15);
        assert!((a.get(2, 1) - c(0.5, 0.5)).norm() < 1e-15);
        assert!((a.get(1, 2) - c(0.5, 0.5)).norm() < 1e-15);
        assert!((a.get(2, 2) - c(0.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn closed_form_members_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2usize, 3, 4] {
            for _ in 0..100 {
                let a = closed_form_family(&random_params(n, &mut rng)).unwrap();
                assert!(verify_membership(&a).unwrap() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn closed_form_rejects_wrong_param_count() {
        assert!(FamilyParams::new(2, vec![c(1.0, 0.0)]).is_err());
        assert!(FamilyParams::new(5, vec![c(1.0, 0.0); 5]).is_err());
    }

    #[test]
    fn membership_examples() {
        assert!(verify_membership(&CMatrix::identity(3)).unwrap() < 1e-15);
        let u = qft_matrix(5).unwrap();
        assert!(verify_membership(&u).unwrap() < 1e-12);
        let mut proj = CMatrix::zeros(3, 3);
        proj.set(0, 0, c(1.0, 0.0));
        assert!(verify_membership(&proj).unwrap() > 0.1);
    }

    #[test]
    fn symmetry_small_dimensions() {
        assert!(symmetry_report(2).unwrap().all_symmetric);
        assert!(symmetry_report(3).unwrap().all_symmetric);
        let r4 = symmetry_report(4).unwrap();
        assert!(!r4.all_symmetric);
        let w = r4.witness.expect("witness for n=4");
        assert!((w.frobenius_norm() - 1.0).abs() < 1e-12);
        let asym = w.sub(&w.transpose()).unwrap().frobenius_norm();
        assert!(asym > 0.1);
        assert!(verify_membership(&w).unwrap() < 1e-9);
    }

    #[test]
    fn symmetry_tracks_eigenvalue_distinctness() {
        for n in 2..=8 {
            let distinct = qft_eigen_multiplicities(n).unwrap().all_distinct();
            let report = symmetry_report(n).unwrap();
            assert_eq!(report.all_symmetric, distinct, "n={n}");
            assert_eq!(report.witness.is_some(), !distinct, "n={n}");
        }
    }

    #[test]
    fn closed_form_spans_match_commutant() {
        for n in [2usize, 3, 4] {
            let r = closed_form_span_rank(n, DEFAULT_RANK_TOL).unwrap();
            let dim = commutant_basis(n, DEFAULT_RANK_TOL).unwrap().dim;
            assert_eq!(r, dim, "n={n}");
        }
    }

    #[test]
    fn admissible_family_builder() {
        let fam2 = AdmissibleFamily::for_dimension(2, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(fam2.param_count(), 2);
        let a = fam2.build(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(a, CMatrix::identity(2));

        let fam5 = AdmissibleFamily::for_dimension(5, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(fam5.param_count(), 7);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let coords: Vec<Cplx> = (0..7)
            .map(|_| c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        let a5 = fam5.build(&coords).unwrap();
        assert!(verify_membership(&a5).unwrap() < 1e-9);
        assert!(fam5.build(&coords[..3]).is_err());
    }

    #[test]
    fn kron_and_vec_round_trip() {
        let u = qft_matrix(2).unwrap();
        let m = unvec_cols(2, &vec_cols(&u)).unwrap();
        assert_eq!(m, u);
        let id = CMatrix::identity(2);
        let k = kron(&id, &u);
        assert_eq!(k.rows(), 4);
        assert!((k.get(0, 0) - u.get(0, 0)).norm() < 1e-15);
        assert!((k.get(2, 2) - u.get(0, 0)).norm() < 1e-15);
    }
}
