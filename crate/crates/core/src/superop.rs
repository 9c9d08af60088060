//! Superoperators and their two actions.
//!
//! A superoperator on a `D`-dimensional system is stored as its left-right
//! matrix `S_{αβ} = (τ_α|S|τ_β)` over the outer-product basis
//! `τ_{jk} = |j⟩⟨k|`, with composite index `α = j·D + k`. The matrix element
//! `S_{lj,mk}` equals `⟨l|S(|j⟩⟨k|)|m⟩`, which ties the left-right action
//! (a plain matrix-vector product on row-major operator coordinates) to the
//! ordinary action `A ↦ Σ S_{αβ} τ_α A τ_β†`.
//!
//! The Choi operator lives on `R ⊗ Q` with the reference index major. For
//! the standard frame it is a pure index reshuffle of the left-right matrix.

use crate::error::{Error, Result};
use crate::linalg::{
    c64, check_finite, eig_hermitian, flatten_row_major, hermiticity_defect, hs_inner, identity,
    kron, max_abs, max_abs_diff, polar_unitary, psd_order, trace, unflatten_row_major,
    unitarity_defect, ComplexMatrix, ComplexVector, HermitianEig, C64,
};

/// An operator viewed as a vector `|A)` under the trace inner product `(A|B) = tr(A†B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKet(pub ComplexMatrix);

impl OperatorKet {
    pub fn inner(&self, other: &OperatorKet) -> C64 {
        hs_inner(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }
}

/// System basis `e_j`, reference basis `f_j` and the unnormalized maximally
/// entangled vector `Ψ = Σ_j f_j ⊗ e_j`.
#[derive(Debug, Clone)]
pub struct ReferenceFrame {
    dim: usize,
    system: ComplexMatrix,
    reference: ComplexMatrix,
    psi: ComplexVector,
}

impl ReferenceFrame {
    /// Standard bases on both factors.
    pub fn standard(dim: usize) -> Self {
        Self::build(identity(dim), identity(dim))
    }

    /// Custom bases given as columns of unitary matrices.
    pub fn new(system: ComplexMatrix, reference: ComplexMatrix) -> Result<Self> {
        if system.shape() != reference.shape() || !system.is_square() {
            return Err(Error::DimensionMismatch(
                "frame bases must be square and of equal size".into(),
            ));
        }
        for m in [&system, &reference] {
            let defect = unitarity_defect(m);
            if defect > 1e-10 {
                return Err(Error::DimensionMismatch(format!(
                    "frame basis is not orthonormal ({defect:e})"
                )));
            }
        }
        Ok(Self::build(system, reference))
    }

    fn build(system: ComplexMatrix, reference: ComplexMatrix) -> Self {
        let dim = system.nrows();
        let mut psi = ComplexVector::zeros(dim * dim);
        for j in 0..dim {
            let term = reference.column(j).kronecker(&system.column(j));
            psi += term;
        }
        ReferenceFrame {
            dim,
            system,
            reference,
            psi,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn psi(&self) -> &ComplexVector {
        &self.psi
    }

    pub fn system_basis(&self) -> &ComplexMatrix {
        &self.system
    }

    pub fn reference_basis(&self) -> &ComplexMatrix {
        &self.reference
    }

    /// `|Φ_A⟩ = (1 ⊗ A)|Ψ⟩`.
    pub fn vec(&self, a: &ComplexMatrix) -> Result<ComplexVector> {
        self.check_operator(a)?;
        let mut out = ComplexVector::zeros(self.dim * self.dim);
        for j in 0..self.dim {
            let image = a * self.system.column(j);
            out += self.reference.column(j).kronecker(&image);
        }
        Ok(out)
    }

    /// Inverse of [`ReferenceFrame::vec`], via `⟨f_j, e_k|Φ_A⟩ = ⟨e_k|A|e_j⟩`.
    pub fn unvec(&self, v: &ComplexVector) -> Result<ComplexMatrix> {
        let d = self.dim;
        if v.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for frame of dim {d}",
                v.len()
            )));
        }
        let mut coeffs = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            for k in 0..d {
                let bra = self.reference.column(j).kronecker(&self.system.column(k));
                coeffs[(k, j)] = bra.dotc(v);
            }
        }
        Ok(&self.system * coeffs * self.system.adjoint())
    }

    /// Transpose of `m` with respect to the frame: `Σ_{jk} |f_j⟩⟨f_k| ⟨e_k|m|e_j⟩`.
    pub fn transpose_to_reference(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operator(m)?;
        let in_e = self.system.adjoint() * m * &self.system;
        Ok(&self.reference * in_e.transpose() * self.reference.adjoint())
    }

    fn check_operator(&self, a: &ComplexMatrix) -> Result<()> {
        if a.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, frame dimension is {}",
                a.nrows(),
                a.ncols(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// Linear map on `D × D` operators, stored as its left-right matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    lr: ComplexMatrix,
}

fn check_square_dim(m: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if m.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected {dim}x{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

impl Superoperator {
    pub fn from_lr_matrix(dim: usize, lr: ComplexMatrix) -> Result<Self> {
        check_square_dim(&lr, dim * dim, "left-right matrix")?;
        check_finite(&lr)?;
        Ok(Superoperator { dim, lr })
    }

    pub fn zero(dim: usize) -> Self {
        Superoperator {
            dim,
            lr: ComplexMatrix::zeros(dim * dim, dim * dim),
        }
    }

    /// The identity of the ordinary action, `1 ⊗ 1`.
    pub fn identity_ordinary(dim: usize) -> Self {
        Self::from_kraus(&[identity(dim)]).expect("identity is square")
    }

    /// The identity of the left-right action.
    pub fn identity_leftright(dim: usize) -> Self {
        Superoperator {
            dim,
            lr: identity(dim * dim),
        }
    }

    /// `Σ_i L_i ⊗ R_i†`, i.e. the map `A ↦ Σ_i L_i A R_i†`.
    pub fn from_operator_pairs(pairs: &[(ComplexMatrix, ComplexMatrix)]) -> Result<Self> {
        let dim = pairs
            .first()
            .map(|p| p.0.nrows())
            .ok_or_else(|| Error::DimensionMismatch("no operator pairs given".into()))?;
        let mut lr = ComplexMatrix::zeros(dim * dim, dim * dim);
        for (l, r) in pairs {
            check_square_dim(l, dim, "left operator")?;
            check_square_dim(r, dim, "right operator")?;
            let lv = flatten_row_major(l);
            let rv = flatten_row_major(r);
            lr.ger(c64(1.0, 0.0), &lv, &rv.conjugate(), c64(1.0, 0.0));
        }
        check_finite(&lr)?;
        Ok(Superoperator { dim, lr })
    }

    /// `A ↦ Σ_α A_α A A_α†`.
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let pairs: Vec<_> = kraus.iter().map(|a| (a.clone(), a.clone())).collect();
        Self::from_operator_pairs(&pairs)
    }

    /// Reads matrix elements `⟨l|f(|j⟩⟨k|)|m⟩` from an arbitrary linear map.
    pub fn from_ordinary_fn(
        dim: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        let mut lr = ComplexMatrix::zeros(dim * dim, dim * dim);
        for j in 0..dim {
            for k in 0..dim {
                let image = f(&crate::linalg::basis_outer(dim, j, k));
                check_square_dim(&image, dim, "image")?;
                for l in 0..dim {
                    for m in 0..dim {
                        lr[(l * dim + j, m * dim + k)] = image[(l, m)];
                    }
                }
            }
        }
        check_finite(&lr)?;
        Ok(Superoperator { dim, lr })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lr_matrix(&self) -> &ComplexMatrix {
        &self.lr
    }

    /// `S_{lj,mk}`.
    pub fn element(&self, l: usize, j: usize, m: usize, k: usize) -> C64 {
        let d = self.dim;
        self.lr[(l * d + j, m * d + k)]
    }

    /// Matrix `N` with `rowmajor(S(A)) = N · rowmajor(A)`.
    pub fn natural_matrix(&self) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d * d, d * d, |row, col| {
            let (l, m) = (row / d, row % d);
            let (j, k) = (col / d, col % d);
            self.lr[(l * d + j, m * d + k)]
        })
    }

    pub fn from_natural_matrix(dim: usize, natural: &ComplexMatrix) -> Result<Self> {
        check_square_dim(natural, dim * dim, "natural matrix")?;
        let d = dim;
        let lr = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
            let (l, j) = (row / d, row % d);
            let (m, k) = (col / d, col % d);
            natural[(l * d + m, j * d + k)]
        });
        Ok(Superoperator { dim, lr })
    }

    fn check_operand(&self, a: &ComplexMatrix) -> Result<()> {
        check_square_dim(a, self.dim, "operand")
    }

    fn check_same_dim(&self, other: &Superoperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "superoperators of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// Ordinary action `S(A) = Σ S_{αβ} τ_α A τ_β†`.
    pub fn apply_ordinary(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operand(a)?;
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d, d);
        for l in 0..d {
            for m in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..d {
                    for k in 0..d {
                        acc += self.lr[(l * d + j, m * d + k)] * a[(j, k)];
                    }
                }
                out[(l, m)] = acc;
            }
        }
        Ok(out)
    }

    /// Left-right action `S|A) = Σ S_{αβ} |τ_α)(τ_β|A)`.
    pub fn apply_leftright(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operand(a)?;
        let v = &self.lr * flatten_row_major(a);
        Ok(unflatten_row_major(&v, self.dim, self.dim))
    }

    /// Product with respect to the left-right action: `(T S)_{αβ} = Σ_γ T_{αγ} S_{γβ}`.
    pub fn lr_multiply(&self, s: &Superoperator) -> Result<Superoperator> {
        self.check_same_dim(s)?;
        Ok(Superoperator {
            dim: self.dim,
            lr: &self.lr * &s.lr,
        })
    }

    /// Composition `self ∘ s` of ordinary actions.
    pub fn ordinary_compose(&self, s: &Superoperator) -> Result<Superoperator> {
        self.check_same_dim(s)?;
        let natural = self.natural_matrix() * s.natural_matrix();
        Self::from_natural_matrix(self.dim, &natural)
    }

    /// Adjoint with respect to the left-right action.
    pub fn lr_adjoint(&self) -> Superoperator {
        Superoperator {
            dim: self.dim,
            lr: self.lr.adjoint(),
        }
    }

    /// Adjoint `S^×` with respect to the ordinary action, defined by
    /// `tr([S^×(B)]† A) = tr(B† S(A))`.
    pub fn ordinary_adjoint(&self) -> Superoperator {
        let natural = self.natural_matrix().adjoint();
        Self::from_natural_matrix(self.dim, &natural).expect("shape preserved")
    }

    /// `(A|S|B)`.
    pub fn sandwich(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
        self.check_operand(a)?;
        Ok(hs_inner(a, &self.apply_leftright(b)?))
    }

    /// `(I ⊗ S)(|Ψ⟩⟨Ψ|) = Σ_{jk} |f_j⟩⟨f_k| ⊗ S(|e_j⟩⟨e_k|)`.
    pub fn choi(&self, frame: &ReferenceFrame) -> Result<ComplexMatrix> {
        let d = self.dim;
        if frame.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "frame dim {} vs superoperator dim {d}",
                frame.dim()
            )));
        }
        let e = frame.system_basis();
        let f = frame.reference_basis();
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for j in 0..d {
            for k in 0..d {
                let ejk = e.column(j) * e.column(k).adjoint();
                let block = self.apply_ordinary(&ejk)?;
                let fjk = f.column(j) * f.column(k).adjoint();
                out += kron(&fjk, &block);
            }
        }
        Ok(out)
    }

    /// Inverse of [`Superoperator::choi`].
    pub fn from_choi(choi: &ComplexMatrix, frame: &ReferenceFrame) -> Result<Self> {
        let d = frame.dim();
        check_square_dim(choi, d * d, "Choi operator")?;
        let e = frame.system_basis();
        let f = frame.reference_basis();
        // blocks[j][k] = S(|e_j⟩⟨e_k|) = (⟨f_j| ⊗ 1) C (|f_k⟩ ⊗ 1)
        let mut blocks = vec![vec![ComplexMatrix::zeros(d, d); d]; d];
        for (j, row) in blocks.iter_mut().enumerate() {
            for (k, block) in row.iter_mut().enumerate() {
                for a in 0..d {
                    for b in 0..d {
                        let w = f[(a, j)].conj() * f[(b, k)];
                        if w == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let sub = choi.view((a * d, b * d), (d, d));
                        *block += sub.map(|z| z * w);
                    }
                }
            }
        }
        let mut lr = ComplexMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                // |a⟩⟨b| = Σ_{jk} conj(e_j[a]) e_k[b] |e_j⟩⟨e_k|
                let mut image = ComplexMatrix::zeros(d, d);
                for j in 0..d {
                    for k in 0..d {
                        let w = e[(a, j)].conj() * e[(b, k)];
                        if w != C64::new(0.0, 0.0) {
                            image += blocks[j][k].map(|z| z * w);
                        }
                    }
                }
                for l in 0..d {
                    for m in 0..d {
                        lr[(l * d + a, m * d + b)] = image[(l, m)];
                    }
                }
            }
        }
        Ok(Superoperator { dim: d, lr })
    }

    /// Spectrum of the left-right matrix (requires it to be Hermitian).
    pub fn lr_eig(&self, tol: f64) -> Result<HermitianEig> {
        eig_hermitian(&self.lr, tol.max(1e-12 * (1.0 + max_abs(&self.lr))))
    }

    /// Complete positivity is positivity of the left-right matrix.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        let htol = tol.max(1e-12 * (1.0 + max_abs(&self.lr)));
        if hermiticity_defect(&self.lr) > htol {
            return false;
        }
        match eig_hermitian(&self.lr, htol) {
            Ok(eig) => eig.min() >= -tol,
            Err(_) => false,
        }
    }

    /// `S^×(1) ≤ 1`.
    pub fn is_trace_nonincreasing(&self, tol: f64) -> bool {
        let x = self
            .ordinary_adjoint()
            .apply_ordinary(&identity(self.dim))
            .expect("dims match");
        hermiticity_defect(&x) <= tol.max(1e-12)
            && psd_order(&identity(self.dim), &x, tol).unwrap_or(false)
    }

    /// `S^×(1) = 1`, checked as both operator inequalities.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let x = self
            .ordinary_adjoint()
            .apply_ordinary(&identity(self.dim))
            .expect("dims match");
        let one = identity(self.dim);
        hermiticity_defect(&x) <= tol.max(1e-12)
            && psd_order(&one, &x, tol).unwrap_or(false)
            && psd_order(&x, &one, tol).unwrap_or(false)
    }

    /// Orthogonal decomposition: `A_α = √λ_α · unvec(v_α)` over the Choi
    /// eigenpairs whose eigenvalue exceeds `1e-12 · λ_max`.
    pub fn kraus(&self, tol: f64) -> Result<Vec<ComplexMatrix>> {
        let frame = ReferenceFrame::standard(self.dim);
        let choi = self.choi(&frame)?;
        let htol = tol.max(1e-12 * (1.0 + max_abs(&choi)));
        let defect = hermiticity_defect(&choi);
        if defect > htol {
            return Err(Error::NotHermitian(defect));
        }
        let eig = eig_hermitian(&choi, htol)?;
        if eig.min() < -tol {
            return Err(Error::NotCompletelyPositive(eig.min()));
        }
        let cutoff = KRAUS_CUTOFF * eig.max().max(0.0);
        let mut out = Vec::new();
        for (k, &w) in eig.eigenvalues.iter().enumerate() {
            if w <= cutoff || w <= 0.0 {
                continue;
            }
            let a = frame.unvec(&eig.vector(k))?;
            out.push(a.scale(w.sqrt()));
        }
        Ok(out)
    }

    /// `Tr(S) = Σ_α (τ_α|S|τ_α)`.
    pub fn supertrace(&self) -> C64 {
        trace(&self.lr)
    }

    pub fn scale(&self, factor: f64) -> Superoperator {
        Superoperator {
            dim: self.dim,
            lr: self.lr.scale(factor),
        }
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        max_abs_diff(&self.lr, &other.lr)
    }
}

/// Relative eigenvalue cutoff for Kraus extraction.
pub const KRAUS_CUTOFF: f64 = 1e-12;

/// Finds the unitary `V` with `B_β = Σ_α V_{βα} A_α`, padding the shorter list
/// with zero operators. Fails with `NotEquivalent` when no such unitary
/// exists, i.e. the two decompositions describe different operations.
pub fn unitary_relating(
    first: &[ComplexMatrix],
    second: &[ComplexMatrix],
    tol: f64,
) -> Result<ComplexMatrix> {
    let dim = first
        .first()
        .or(second.first())
        .map(|a| a.nrows())
        .ok_or_else(|| Error::DimensionMismatch("empty decompositions".into()))?;
    for a in first.iter().chain(second) {
        check_square_dim(a, dim, "decomposition operator")?;
    }
    let n = first.len().max(second.len());
    let stack = |ops: &[ComplexMatrix]| {
        let mut m = ComplexMatrix::zeros(dim * dim, n);
        for (i, a) in ops.iter().enumerate() {
            m.set_column(i, &flatten_row_major(a));
        }
        m
    };
    let a = stack(first);
    let b = stack(second);
    // B = A Vᵀ; the polar factor of A†B gives Vᵀ whenever such a unitary exists.
    let vt = polar_unitary(&(a.adjoint() * &b))?;
    let residual = max_abs_diff(&(&a * &vt), &b);
    let scale = 1.0 + max_abs(&a).max(max_abs(&b));
    if residual > tol * scale {
        return Err(Error::NotEquivalent(residual));
    }
    Ok(vt.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_outer, sigma_x, sigma_z, zeros};
    use crate::random::{random_channel, random_ginibre, random_unitary, rng_for};

    fn proj(d: usize, i: usize) -> ComplexMatrix {
        basis_outer(d, i, i)
    }

    fn dephasing() -> Superoperator {
        Superoperator::from_operator_pairs(&[(proj(2, 0), proj(2, 0)), (proj(2, 1), proj(2, 1))])
            .unwrap()
    }

    #[test]
    fn identity_pair_leftright_action() {
        let s = Superoperator::from_operator_pairs(&[(identity(2), identity(2))]).unwrap();
        assert!(max_abs(&s.apply_leftright(&sigma_x()).unwrap()) < 1e-15);
        let one = s.apply_leftright(&identity(2)).unwrap();
        assert!(max_abs_diff(&one, &identity(2).scale(2.0)) < 1e-15);
        for a in [sigma_x(), sigma_z(), basis_outer(2, 0, 1)] {
            assert!(max_abs_diff(&s.apply_ordinary(&a).unwrap(), &a) < 1e-15);
        }
    }

    #[test]
    fn bit_flip_pair_flips() {
        let s = Superoperator::from_operator_pairs(&[(sigma_x(), sigma_x())]).unwrap();
        let out = s.apply_ordinary(&proj(2, 0)).unwrap();
        assert!(max_abs_diff(&out, &proj(2, 1)) < 1e-15);
        let twice = s.ordinary_compose(&s).unwrap();
        assert!(twice.max_abs_diff(&Superoperator::identity_ordinary(2)) < 1e-15);
        assert!(s.ordinary_adjoint().max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn dephasing_matrix_and_action() {
        let s = dephasing();
        let mut expected = zeros(4);
        expected[(0, 0)] = c64(1., 0.);
        expected[(3, 3)] = c64(1., 0.);
        assert!(max_abs_diff(s.lr_matrix(), &expected) < 1e-15);
        assert!(max_abs(&s.apply_ordinary(&sigma_x()).unwrap()) < 1e-15);
    }

    #[test]
    fn leftright_identity_acts_trivially() {
        let s = Superoperator::identity_leftright(3);
        let mut rng = rng_for(21, 0);
        let a = random_ginibre(3, &mut rng);
        assert!(max_abs_diff(&s.apply_leftright(&a).unwrap(), &a) < 1e-15);
    }

    #[test]
    fn two_actions_agree_on_basis() {
        let mut rng = rng_for(22, 0);
        let pairs: Vec<_> = (0..3)
            .map(|_| (random_ginibre(3, &mut rng), random_ginibre(3, &mut rng)))
            .collect();
        let s = Superoperator::from_operator_pairs(&pairs).unwrap();
        let d = 3;
        for j in 0..d {
            for k in 0..d {
                let img = s.apply_ordinary(&basis_outer(d, j, k)).unwrap();
                for l in 0..d {
                    for m in 0..d {
                        assert!((img[(l, m)] - s.element(l, j, m, k)).norm() < 1e-13);
                    }
                }
            }
        }
        let rebuilt = Superoperator::from_ordinary_fn(d, |a| {
            pairs
                .iter()
                .map(|(l, r)| l * a * r.adjoint())
                .fold(zeros(d), |acc, x| acc + x)
        })
        .unwrap();
        assert!(rebuilt.max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn compose_on_basis() {
        let mut rng = rng_for(23, 0);
        let mk = |rng: &mut _| {
            let pairs: Vec<_> = (0..2)
                .map(|_| (random_ginibre(2, rng), random_ginibre(2, rng)))
                .collect();
            Superoperator::from_operator_pairs(&pairs).unwrap()
        };
        let s = mk(&mut rng);
        let t = mk(&mut rng);
        let ts = t.ordinary_compose(&s).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                let a = basis_outer(2, j, k);
                let lhs = ts.apply_ordinary(&a).unwrap();
                let rhs = t.apply_ordinary(&s.apply_ordinary(&a).unwrap()).unwrap();
                assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
            }
        }
        let prod = t.lr_multiply(&s).unwrap();
        assert!(max_abs_diff(prod.lr_matrix(), &(t.lr_matrix() * s.lr_matrix())) < 1e-12);
        assert!(t.lr_adjoint().lr_adjoint().max_abs_diff(&t) == 0.0);
    }

    #[test]
    fn ordinary_adjoint_pairing_identity() {
        let mut rng = rng_for(24, 0);
        let pairs: Vec<_> = (0..2)
            .map(|_| (random_ginibre(3, &mut rng), random_ginibre(3, &mut rng)))
            .collect();
        let s = Superoperator::from_operator_pairs(&pairs).unwrap();
        let daggered: Vec<_> = pairs
            .iter()
            .map(|(l, r)| (l.adjoint(), r.adjoint()))
            .collect();
        let expected = Superoperator::from_operator_pairs(&daggered).unwrap();
        let adj = s.ordinary_adjoint();
        assert!(adj.max_abs_diff(&expected) < 1e-12);
        let a = random_ginibre(3, &mut rng);
        let b = random_ginibre(3, &mut rng);
        let lhs = hs_inner(&adj.apply_ordinary(&b).unwrap(), &a);
        let rhs = hs_inner(&b, &s.apply_ordinary(&a).unwrap());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn vec_examples() {
        let frame = ReferenceFrame::standard(3);
        let v = frame.vec(&identity(3)).unwrap();
        assert!((v.clone() - frame.psi()).norm() == 0.0);
        assert!((v.norm_squared() - 3.0).abs() < 1e-15);

        let rho = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![
            c64(0.25, 0.),
            c64(0.75, 0.),
        ]));
        let root = crate::linalg::sqrt_psd(&rho).unwrap();
        let f2 = ReferenceFrame::standard(2);
        let phi = f2.vec(&root).unwrap();
        let pure = &phi * phi.adjoint();
        let reduced = crate::linalg::partial_trace(&pure, &[2, 2], &[1]).unwrap();
        assert!(max_abs_diff(&reduced, &rho) < 1e-14);

        let mut rng = rng_for(25, 0);
        let a = random_ginibre(3, &mut rng);
        let b = random_ginibre(3, &mut rng);
        let lhs = frame.vec(&a).unwrap().dotc(&frame.vec(&b).unwrap());
        assert!((lhs - hs_inner(&a, &b)).norm() < 1e-13);
        assert!(max_abs_diff(&frame.unvec(&frame.vec(&a).unwrap()).unwrap(), &a) < 1e-14);
    }

    #[test]
    fn vec_with_rotated_frame() {
        let mut rng = rng_for(26, 0);
        let frame =
            ReferenceFrame::new(random_unitary(3, &mut rng), random_unitary(3, &mut rng)).unwrap();
        assert!((frame.psi().norm_squared() - 3.0).abs() < 1e-12);
        let a = random_ginibre(3, &mut rng);
        let b = random_ginibre(3, &mut rng);
        let lhs = frame.vec(&a).unwrap().dotc(&frame.vec(&b).unwrap());
        assert!((lhs - hs_inner(&a, &b)).norm() < 1e-12);
        assert!(max_abs_diff(&frame.unvec(&frame.vec(&a).unwrap()).unwrap(), &a) < 1e-12);

        let s = Superoperator::from_operator_pairs(&[(a.clone(), b.clone())]).unwrap();
        let choi = s.choi(&frame).unwrap();
        let back = Superoperator::from_choi(&choi, &frame).unwrap();
        assert!(back.max_abs_diff(&s) < 1e-12);
        let x = random_ginibre(3, &mut rng);
        let y = random_ginibre(3, &mut rng);
        let lhs = frame
            .vec(&x)
            .unwrap()
            .dotc(&(&choi * frame.vec(&y).unwrap()));
        assert!((lhs - s.sandwich(&x, &y).unwrap()).norm() < 1e-11);
    }

    #[test]
    fn choi_examples() {
        let frame = ReferenceFrame::standard(2);
        let id = Superoperator::identity_ordinary(2);
        let psi = frame.psi();
        assert!(max_abs_diff(&id.choi(&frame).unwrap(), &(psi * psi.adjoint())) < 1e-15);

        let mut expected = zeros(4);
        expected[(0, 0)] = c64(1., 0.);
        expected[(3, 3)] = c64(1., 0.);
        assert!(max_abs_diff(&dephasing().choi(&frame).unwrap(), &expected) < 1e-15);
    }

    #[test]
    fn cp_and_trace_examples() {
        let id = Superoperator::identity_ordinary(2);
        assert!(id.is_completely_positive(1e-12));
        assert!(id.is_trace_preserving(1e-12));

        let transpose = Superoperator::from_ordinary_fn(2, |a| a.transpose()).unwrap();
        assert!(!transpose.is_completely_positive(1e-9));
        let eig = transpose.lr_eig(1e-12).unwrap();
        assert!((eig.min() + 1.0).abs() < 1e-14);

        let proj0 = Superoperator::from_kraus(&[proj(2, 0)]).unwrap();
        assert!(proj0.is_completely_positive(1e-12));
        assert!(proj0.is_trace_nonincreasing(1e-12));
        assert!(!proj0.is_trace_preserving(1e-12));
        assert!(matches!(
            transpose.kraus(1e-9),
            Err(Error::NotCompletelyPositive(_))
        ));
    }

    #[test]
    fn kraus_extraction_examples() {
        let id = Superoperator::identity_ordinary(2).kraus(1e-10).unwrap();
        assert_eq!(id.len(), 1);
        assert!(max_abs_diff(&id[0], &identity(2)) < 1e-14);

        let deph = dephasing().kraus(1e-10).unwrap();
        assert_eq!(deph.len(), 2);
        let rebuilt = Superoperator::from_kraus(&deph).unwrap();
        assert!(rebuilt.max_abs_diff(&dephasing()) < 1e-14);
        for k in &deph {
            let is_p0 = max_abs_diff(k, &proj(2, 0)) < 1e-14;
            let is_p1 = max_abs_diff(k, &proj(2, 1)) < 1e-14;
            assert!(is_p0 || is_p1);
        }

        let mut rng = rng_for(27, 0);
        let u = random_unitary(3, &mut rng);
        let k = Superoperator::from_kraus(std::slice::from_ref(&u))
            .unwrap()
            .kraus(1e-10)
            .unwrap();
        assert_eq!(k.len(), 1);
        let phase = hs_inner(&u, &k[0]) / 3.0;
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(&k[0], &u.map(|z| z * phase)) < 1e-12);
    }

    #[test]
    fn kraus_round_trip_random() {
        let mut rng = rng_for(28, 0);
        let op = random_channel(3, 4, &mut rng);
        let s = op.superoperator();
        let k = s.kraus(1e-10).unwrap();
        assert!(Superoperator::from_kraus(&k).unwrap().max_abs_diff(&s) < 1e-10);
    }

    #[test]
    fn unitary_relating_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let k1 = vec![proj(2, 0), proj(2, 1)];
        let k2 = vec![identity(2).scale(r), sigma_z().scale(r)];
        let v = unitary_relating(&k1, &k2, 1e-10).unwrap();
        let expected =
            ComplexMatrix::from_row_slice(2, 2, &[c64(r, 0.), c64(r, 0.), c64(r, 0.), c64(-r, 0.)]);
        assert!(max_abs_diff(&v, &expected) < 1e-12);
        for beta in 0..2 {
            let combo = k1
                .iter()
                .enumerate()
                .fold(zeros(2), |acc, (a, op)| acc + op.map(|z| z * v[(beta, a)]));
            assert!(max_abs_diff(&combo, &k2[beta]) < 1e-12);
        }

        let same = unitary_relating(&k1, &k1, 1e-10).unwrap();
        assert!(unitarity_defect(&same) < 1e-12);

        assert!(matches!(
            unitary_relating(&[identity(2)], &[sigma_x()], 1e-10),
            Err(Error::NotEquivalent(_))
        ));
    }

    #[test]
    fn unitary_relating_pads_with_zeros() {
        let mut rng = rng_for(29, 0);
        let op = random_channel(2, 2, &mut rng);
        let mix = random_unitary(4, &mut rng);
        let padded: Vec<ComplexMatrix> = op
            .kraus()
            .iter()
            .cloned()
            .chain([zeros(2), zeros(2)])
            .collect();
        let mixed: Vec<ComplexMatrix> = (0..4)
            .map(|b| {
                padded
                    .iter()
                    .enumerate()
                    .fold(zeros(2), |acc, (a, k)| acc + k.map(|z| z * mix[(b, a)]))
            })
            .collect();
        let v = unitary_relating(op.kraus(), &mixed, 1e-10).unwrap();
        assert_eq!(v.shape(), (4, 4));
        assert!(unitarity_defect(&v) < 1e-10);
    }

    #[test]
    fn supertrace_examples() {
        let id = Superoperator::identity_ordinary(2);
        assert!((id.supertrace() - c64(2.0, 0.0)).norm() < 1e-15);
        let via_action = trace(&id.apply_ordinary(&identity(2)).unwrap());
        assert!((via_action - id.supertrace()).norm() < 1e-15);
        assert_eq!(Superoperator::zero(3).supertrace(), c64(0., 0.));
    }
}
