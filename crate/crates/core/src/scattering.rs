//! Linear algebra on `ker Δ_Y`: pairs of symmetric involutions `S_1(0), S_2(0)`,
//! their eigenspaces `V_i^±`, the operator `C_12`, the counts `h` and `h_12`, the
//! block operator `S`, and the Gram matrices `A` and `B_r`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Principal angles with `sin θ` below this are treated as zero.
pub const ANGLE_TOL: f64 = 1e-9;

/// Orthonormal basis (columns) of a subspace of `R^n`.
pub type Basis = DMatrix<f64>;

fn empty(n: usize) -> Basis {
    DMatrix::zeros(n, 0)
}

fn hcat(a: &Basis, b: &Basis) -> Basis {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.columns_mut(0, a.ncols()).copy_from(a);
    m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    m
}

/// Orthonormal basis of the `±1` eigenspace of a symmetric involution.
fn eigenspace(s: &DMatrix<f64>, sign: f64) -> Basis {
    let n = s.nrows();
    if n == 0 {
        return empty(0);
    }
    let eig = nalgebra::SymmetricEigen::new(s.clone());
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| (eig.eigenvalues[i] - sign).abs() < 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        empty(n)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Intersection of two subspaces via principal angles. The sines are the singular
/// values of `(Id - UUᵀ)W`, which resolves small angles that the cosines of `UᵀW`
/// cannot.
pub fn intersection(u: &Basis, w: &Basis) -> Basis {
    let n = u.nrows();
    if u.ncols() == 0 || w.ncols() == 0 {
        return empty(n);
    }
    let m = w - u * (u.transpose() * w);
    // n ≥ k, so the thin SVD carries all k sines
    let svd = svd(&m);
    let cols: Vec<DVector<f64>> = (0..svd.sigma.len())
        .filter(|&i| svd.sigma[i] < ANGLE_TOL)
        .map(|i| {
            let v = w * svd.v.column(i);
            let nv = v.norm();
            v / nv
        })
        .collect();
    if cols.is_empty() {
        empty(n)
    } else {
        orthonormalize(&DMatrix::from_columns(&cols))
    }
}

/// Thin SVD by one-sided Jacobi rotations: `m = U diag(σ) Vᵀ` with `U` having the
/// normalized columns of `mV` (zero where `σ = 0`). Singular values carry absolute
/// error of order `eps·‖m‖`, including the small ones. nalgebra's bidiagonal SVD is
/// not used because it returns inaccurate factors on some rank-deficient inputs.
struct Svd {
    sigma: Vec<f64>,
    u: DMatrix<f64>,
    v: DMatrix<f64>,
}

fn svd(m: &DMatrix<f64>) -> Svd {
    let k = m.ncols();
    let mut a = m.clone();
    let mut v = DMatrix::identity(k, k);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let (x, y) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = c * x - s * y;
                        mat[(i, q)] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    let mut u = a;
    for (j, &sj) in sigma.iter().enumerate() {
        let mut c = u.column_mut(j);
        if sj > 0.0 {
            c /= sj;
        }
    }
    Svd { sigma, u, v }
}

fn orthonormalize(m: &DMatrix<f64>) -> Basis {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = svd(m);
    let scale = svd.sigma.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = (0..svd.sigma.len())
        .filter(|&i| svd.sigma[i] > ANGLE_TOL * scale.max(1.0))
        .map(|i| svd.u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        empty(m.nrows())
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the orthogonal complement of `span(b)` in `R^n`.
pub fn complement(b: &Basis) -> Basis {
    let n = b.nrows();
    let mut p = DMatrix::identity(n, n);
    if b.ncols() > 0 {
        p -= b * b.transpose();
    }
    orthonormalize(&p)
}

/// Orthonormal basis of the complement of `span(sub)` inside `span(space)`.
pub fn relative_complement(space: &Basis, sub: &Basis) -> Basis {
    if space.ncols() == 0 {
        return space.clone();
    }
    let mut p = space.clone();
    if sub.ncols() > 0 {
        p -= sub * (sub.transpose() * space);
    }
    orthonormalize(&p)
}

/// Two symmetric involutions on `ker Δ_Y ≅ R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvolutionPair {
    pub s1: DMatrix<f64>,
    pub s2: DMatrix<f64>,
}

impl InvolutionPair {
    /// Checks symmetry and `S² = Id` to `1e-10`.
    pub fn new(s1: DMatrix<f64>, s2: DMatrix<f64>) -> Result<Self> {
        let n = s1.nrows();
        for s in [&s1, &s2] {
            if s.nrows() != n || s.ncols() != n {
                return Err(invalid("involutions must be square of equal size"));
            }
            if (s - s.transpose()).abs().max() > 1e-10 {
                return Err(invalid("involution is not symmetric"));
            }
            if n > 0 && (s * s - DMatrix::identity(n, n)).abs().max() > 1e-10 {
                return Err(invalid("matrix does not square to the identity"));
            }
        }
        Ok(Self { s1, s2 })
    }

    /// `S = Q diag(signs) Qᵀ`.
    pub fn involution(q: &DMatrix<f64>, signs: &[f64]) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(signs));
        q * d * q.transpose()
    }

    /// Random pair on `R^n`. With `shared > 0` the two eigenbases share their first
    /// `shared` vectors, so the `±` intersections are typically nontrivial.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, shared: usize) -> Self {
        let q1 = random_orthogonal(rng, n);
        let mut q2 = random_orthogonal(rng, n);
        let k = shared.min(n);
        if k > 0 {
            // keep k columns of q1 and rotate the rest inside their complement
            let keep = q1.columns(0, k).into_owned();
            let rest = q1.columns(k, n - k).into_owned();
            let rot = random_orthogonal(rng, n - k);
            q2 = hcat(&keep, &(rest * rot));
        }
        let mut sign = |_| if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let d1: Vec<f64> = (0..n).map(&mut sign).collect();
        let d2: Vec<f64> = (0..n).map(&mut sign).collect();
        let s1 = Self::involution(&q1, &d1);
        let s2 = Self::involution(&q2, &d2);
        Self {
            s1: symmetrize(&s1),
            s2: symmetrize(&s2),
        }
    }

    pub fn dim(&self) -> usize {
        self.s1.nrows()
    }

    pub fn v_plus(&self, i: usize) -> Basis {
        eigenspace(if i == 1 { &self.s1 } else { &self.s2 }, 1.0)
    }

    pub fn v_minus(&self, i: usize) -> Basis {
        eigenspace(if i == 1 { &self.s1 } else { &self.s2 }, -1.0)
    }

    /// `V_1^+ ∩ V_2^+`.
    pub fn plus_intersection(&self) -> Basis {
        intersection(&self.v_plus(1), &self.v_plus(2))
    }

    /// `V_1^- ∩ V_2^-`.
    pub fn minus_intersection(&self) -> Basis {
        intersection(&self.v_minus(1), &self.v_minus(2))
    }

    /// Orthogonal complement of `(V_1^+ ∩ V_2^+) ⊕ (V_1^- ∩ V_2^-)`.
    pub fn c12_space(&self) -> Basis {
        complement(&hcat(&self.plus_intersection(), &self.minus_intersection()))
    }

    /// `C_12`: `S_1 S_2` restricted to [`Self::c12_space`], in that basis.
    pub fn c12(&self) -> DMatrix<f64> {
        let b = self.c12_space();
        b.transpose() * &self.s1 * &self.s2 * &b
    }

    /// `h = dim V_1^+ + dim V_2^+ - 2 dim(V_1^+ ∩ V_2^+)`.
    pub fn h(&self) -> usize {
        self.v_plus(1).ncols() + self.v_plus(2).ncols() - 2 * self.h12()
    }

    /// `h_12 = dim(V_1^+ ∩ V_2^+)`.
    pub fn h12(&self) -> usize {
        self.plus_intersection().ncols()
    }

    /// `det((Id - C_12)/2)`; 1 on the empty space.
    pub fn det_half_id_minus_c12(&self) -> f64 {
        let c = self.c12();
        let k = c.nrows();
        if k == 0 {
            return 1.0;
        }
        ((DMatrix::identity(k, k) - c) * 0.5).determinant()
    }

    /// `det S` with `S = (Id, -P_1; -P_2, Id)` on `U_1 ⊕ U_2`, where `U_i` is the
    /// complement of `L = V_1^+ ∩ V_2^+` in `V_i^+` and `P_i` projects onto `U_i`.
    pub fn det_s_block(&self) -> f64 {
        let l = self.plus_intersection();
        let u1 = relative_complement(&self.v_plus(1), &l);
        let u2 = relative_complement(&self.v_plus(2), &l);
        let (k1, k2) = (u1.ncols(), u2.ncols());
        if k1 + k2 == 0 {
            return 1.0;
        }
        let mut s = DMatrix::identity(k1 + k2, k1 + k2);
        if k1 > 0 && k2 > 0 {
            let g = u1.transpose() * &u2;
            s.view_mut((0, k1), (k1, k2)).copy_from(&(-&g));
            s.view_mut((k1, 0), (k2, k1)).copy_from(&(-g.transpose()));
        }
        s.determinant()
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Haar-distributed orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut c = q.column_mut(j);
            c *= -1.0;
        }
    }
    q
}

/// Gram matrix `a_ij = ⟨ψ_i, ψ_j⟩` of boundary traces given as mode-coefficient vectors.
pub fn gram_a(traces: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let k = traces.len();
    if k == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let n = traces[0].len();
    if traces.iter().any(|t| t.len() != n) {
        return Err(invalid("traces must have equal length"));
    }
    let g = DMatrix::from_fn(k, k, |i, j| traces[i].dot(&traces[j]));
    let eig = nalgebra::SymmetricEigen::new(g.clone());
    let max = eig.eigenvalues.max();
    if eig.eigenvalues.min() <= 1e-12 * max.max(1e-300) {
        return Err(Error::DegenerateInput("boundary traces are linearly dependent".into()));
    }
    Ok(g)
}

/// Determinant of a Gram matrix; 1 for the empty basis.
pub fn gram_det(g: &DMatrix<f64>) -> f64 {
    if g.nrows() == 0 {
        1.0
    } else {
        g.determinant()
    }
}

/// `B_r = 2 (G_0 + 2r Id)^(-1)`: inverse Gram matrix of the kernel elements of the
/// glued product model, where `G_0` collects the cap contributions to their norms.
/// Then `r^q det B_r = det(Id + G_0/(2r))^(-1) = 1 + O(1/r)`.
pub fn gram_b_r(g0: &DMatrix<f64>, r: f64) -> Result<DMatrix<f64>> {
    let q = g0.nrows();
    if g0.ncols() != q {
        return Err(invalid("G_0 must be square"));
    }
    if !(r > 0.0) {
        return Err(invalid(format!("r must be positive, got {r}")));
    }
    let g = g0 + DMatrix::identity(q, q) * (2.0 * r);
    let inv = g
        .try_inverse()
        .ok_or_else(|| Error::DegenerateInput("kernel Gram matrix is singular".into()))?;
    Ok(inv * 2.0)
}

/// Product-model `G_0`: each kernel element is constant across caps of lengths `a1, a2`.
pub fn product_model_g0(q: usize, a1: f64, a2: f64) -> DMatrix<f64> {
    DMatrix::identity(q, q) * (a1 + a2)
}

/// Result of a brute-force block-determinant comparison over random pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleCheck {
    pub trials: usize,
    pub max_dim: usize,
    pub max_deviation: f64,
    /// Trials with a nontrivial `V_1^+ ∩ V_2^+` or `V_1^- ∩ V_2^-`.
    pub with_intersection: usize,
    pub min_det: f64,
    pub max_det: f64,
}

/// Compares `det S` and `det((Id - C_12)/2)` over random pairs of dimension `1..=max_dim`.
pub fn block_identity_ensemble<R: Rng + ?Sized>(rng: &mut R, trials: usize, max_dim: usize) -> Result<EnsembleCheck> {
    if max_dim == 0 {
        return Err(invalid("max_dim must be positive"));
    }
    let mut out = EnsembleCheck {
        trials,
        max_dim,
        max_deviation: 0.0,
        with_intersection: 0,
        min_det: f64::INFINITY,
        max_det: f64::NEG_INFINITY,
    };
    for t in 0..trials {
        let n = rng.random_range(1..=max_dim);
        let shared = if t % 2 == 0 { rng.random_range(0..=n) } else { 0 };
        let p = InvolutionPair::random(rng, n, shared);
        if p.plus_intersection().ncols() + p.minus_intersection().ncols() > 0 {
            out.with_intersection += 1;
        }
        let a = p.det_s_block();
        let b = p.det_half_id_minus_c12();
        out.max_deviation = out.max_deviation.max((a - b).abs());
        out.min_det = out.min_det.min(b);
        out.max_det = out.max_det.max(b);
    }
    Ok(out)
}
