//! Dense complex matrix arithmetic and spectral primitives.
//!
//! Everything in the crate runs on [`CMat`] (dense row-major complex
//! matrices) and [`HermMat`] (Hermitian matrices, symmetrized on
//! construction). The eigensolver reduces a Hermitian matrix to real
//! symmetric tridiagonal form by Householder reflections and then applies
//! implicit-shift QL iterations, accumulating eigenvectors when requested.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest square dimension any spectral routine accepts.
pub const DIM_CAP: usize = 512;
/// Largest product dimension [`kron`] will build.
pub const KRON_CAP: usize = 1024;

/// Relative asymmetry tolerated by [`HermMat::new`].
const HERM_ASYM_TOL: f64 = 1e-12;
/// QL iteration cap per eigenvalue.
const QL_ITER_CAP: usize = 50;

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for CMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    /// Zero matrix. Panics if either dimension is zero (internal misuse);
    /// user-facing constructors validate instead.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        CMat { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Validating constructor from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        let m = CMat { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::NonFiniteEntry);
        }
        Ok(m)
    }

    /// Validating constructor from real row-major data.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        CMat::from_vec(rows, cols, data.iter().map(|&x| c64(x, 0.0)).collect())
    }

    /// 1x1 matrix holding a single complex scalar.
    pub fn scalar(z: Complex64) -> Self {
        CMat { rows: 1, cols: 1, data: vec![z] }
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

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                let lhs_row = r * rhs.cols;
                let rhs_row = k * rhs.cols;
                for c in 0..rhs.cols {
                    out.data[lhs_row + c] += a * rhs.data[rhs_row + c];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        CMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub dimension mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        CMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, z: Complex64) -> CMat {
        let data = self.data.iter().map(|a| a * z).collect();
        CMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Copy of the `height x width` block anchored at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, height: usize, width: usize) -> CMat {
        assert!(r0 + height <= self.rows && c0 + width <= self.cols, "block out of range");
        let mut out = CMat::zeros(height, width);
        for r in 0..height {
            for c in 0..width {
                out[(r, c)] = self[(r0 + r, c0 + c)];
            }
        }
        out
    }

    /// Overwrite the block anchored at `(r0, c0)` with `m`.
    pub fn set_block(&mut self, r0: usize, c0: usize, m: &CMat) {
        assert!(r0 + m.rows <= self.rows && c0 + m.cols <= self.cols, "block out of range");
        for r in 0..m.rows {
            for c in 0..m.cols {
                self[(r0 + r, c0 + c)] = m[(r, c)];
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Hermitian matrix. Construction symmetrizes via `(M + M*)/2` after
/// checking that the asymmetry is within `1e-12 * (1 + max |entry|)`;
/// iterative solvers that accumulate harmless asymmetry use
/// [`HermMat::hermitian_part`], which symmetrizes unconditionally.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMat {
    mat: CMat,
}

impl HermMat {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let mut asym = 0.0f64;
        for r in 0..m.rows() {
            for c in r..m.cols() {
                asym = asym.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        let tol = HERM_ASYM_TOL * (1.0 + m.max_abs_entry());
        if asym > tol {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(Self::symmetrize(m))
    }

    /// Hermitian part `(M + M*)/2` of a square matrix, with no asymmetry
    /// tolerance check.
    pub fn hermitian_part(m: &CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimMismatch(format!(
                "Hermitian part of a non-square {}x{} matrix",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Self::symmetrize(m.clone()))
    }

    fn symmetrize(mut m: CMat) -> Self {
        let n = m.rows();
        for r in 0..n {
            m[(r, r)] = c64(m[(r, r)].re, 0.0);
            for c in r + 1..n {
                let avg = 0.5 * (m[(r, c)] + m[(c, r)].conj());
                m[(r, c)] = avg;
                m[(c, r)] = avg.conj();
            }
        }
        HermMat { mat: m }
    }

    pub fn identity(n: usize) -> Self {
        HermMat { mat: CMat::identity(n) }
    }

    pub fn zeros(n: usize) -> Self {
        HermMat { mat: CMat::zeros(n, n) }
    }

    pub fn scaled_identity(n: usize, t: f64) -> Self {
        HermMat { mat: CMat::identity(n).scale(c64(t, 0.0)) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.mat[(r, c)]
    }

    pub fn add(&self, rhs: &HermMat) -> HermMat {
        HermMat { mat: self.mat.add(&rhs.mat) }
    }

    pub fn sub(&self, rhs: &HermMat) -> HermMat {
        HermMat { mat: self.mat.sub(&rhs.mat) }
    }

    /// Scaling by a real factor (preserves Hermiticity).
    pub fn scale(&self, t: f64) -> HermMat {
        HermMat { mat: self.mat.scale(c64(t, 0.0)) }
    }

    /// `M + t * I`.
    pub fn add_scaled_identity(&self, t: f64) -> HermMat {
        let mut mat = self.mat.clone();
        for i in 0..mat.rows() {
            let d = mat[(i, i)];
            mat[(i, i)] = c64(d.re + t, 0.0);
        }
        HermMat { mat }
    }

    /// Real linear combination `a * m1 + b * m2` of two Hermitian matrices.
    pub fn combine(a: f64, m1: &HermMat, b: f64, m2: &HermMat) -> HermMat {
        assert_eq!(m1.dim(), m2.dim(), "combine dimension mismatch");
        let data = m1
            .mat
            .data
            .iter()
            .zip(&m2.mat.data)
            .map(|(x, y)| x * a + y * b)
            .collect();
        HermMat { mat: CMat { rows: m1.dim(), cols: m1.dim(), data } }
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and a
/// unitary matrix whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

/// Householder reduction of a Hermitian matrix to real symmetric
/// tridiagonal form. Returns the diagonal `d`, the subdiagonal `e`
/// (length `n - 1`), and, when `want_q`, the unitary `Q` with
/// `Q* M Q = tridiag(d, e)`.
fn tridiagonalize(m: &CMat, want_q: bool) -> (Vec<f64>, Vec<f64>, Option<CMat>) {
    let n = m.rows();
    let mut a = m.clone();
    let mut q = if want_q { Some(CMat::identity(n)) } else { None };
    let mut v = vec![Complex64::ZERO; n];
    let mut p = vec![Complex64::ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::ONE };
        let alpha = -phase * norm;

        // Householder vector v (supported on k+1..n), reflector I - tau v v*.
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // Rank-2 update of the trailing block: B <- B - v w* - w v*
        // with p = tau B v and w = p - (tau/2)(v* p) v.
        for i in k + 1..n {
            let mut acc = Complex64::ZERO;
            for j in k + 1..n {
                acc += a[(i, j)] * v[j];
            }
            p[i] = acc * tau;
        }
        let vp: Complex64 = (k + 1..n).map(|i| v[i].conj() * p[i]).sum();
        let half = 0.5 * tau * vp;
        for i in k + 1..n {
            p[i] -= half * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                let cur = a[(i, j)];
                a[(i, j)] = cur - upd;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            a[(i, k)] = Complex64::ZERO;
            a[(k, i)] = Complex64::ZERO;
        }

        if let Some(q) = q.as_mut() {
            // Q <- Q (I - tau v v*)
            for r in 0..n {
                let mut qv = Complex64::ZERO;
                for i in k + 1..n {
                    qv += q[(r, i)] * v[i];
                }
                qv *= tau;
                for i in k + 1..n {
                    let sub = qv * v[i].conj();
                    let cur = q[(r, i)];
                    q[(r, i)] = cur - sub;
                }
            }
        }
    }

    // Phase-rotate so the subdiagonal becomes real nonnegative.
    let d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![0.0f64; n.saturating_sub(1)];
    let mut phi = Complex64::ONE;
    let mut phases = vec![Complex64::ONE; n];
    for k in 0..n.saturating_sub(1) {
        let ek = a[(k + 1, k)];
        let abs = ek.norm();
        if abs > 0.0 {
            // Subdiagonal of Phi* T Phi is conj(phi_{k+1}) e_k phi_k; this
            // choice makes it the real number |e_k|.
            phi *= ek / abs;
        }
        e[k] = abs;
        phases[k + 1] = phi;
    }
    if let Some(q) = q.as_mut() {
        for r in 0..n {
            for (cidx, ph) in phases.iter().enumerate() {
                let cur = q[(r, cidx)];
                q[(r, cidx)] = cur * ph;
            }
        }
    }
    (d, e, q)
}

/// Implicit-shift QL iterations on a real symmetric tridiagonal matrix.
/// Eigenvalues land in `d` (unsorted); when `z` is given, its columns are
/// rotated along so that on entry `z = Q` yields eigenvectors of the
/// original Hermitian matrix.
fn ql_implicit(d: &mut [f64], subdiag: &[f64], mut z: Option<&mut CMat>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // One scratch slot past the real subdiagonal, as in the classic routine.
    let mut e: Vec<f64> = subdiag.iter().copied().chain(std::iter::once(0.0)).collect();
    let e = &mut e[..];
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_ITER_CAP {
                return Err(Error::EigNonConvergence { dim: n });
            }
            // Wilkinson shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                if f.abs() >= g.abs() {
                    c = g / f;
                    r = c.hypot(1.0);
                    e[i + 1] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = s.hypot(1.0);
                    e[i + 1] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..z.rows() {
                        let f = z[(k, i + 1)];
                        let zi = z[(k, i)];
                        z[(k, i + 1)] = zi.scale(s) + f.scale(c);
                        z[(k, i)] = zi.scale(c) - f.scale(s);
                    }
                }
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn check_spectral_dim(n: usize) -> Result<()> {
    if n > DIM_CAP {
        return Err(Error::DimCapExceeded { dim: n, cap: DIM_CAP });
    }
    Ok(())
}

/// Full eigendecomposition with ascending eigenvalues.
pub fn herm_eig(m: &HermMat) -> Result<Spectrum> {
    check_spectral_dim(m.dim())?;
    let (mut d, e, q) = tridiagonalize(m.mat(), true);
    let mut q = q.expect("eigenvector accumulation requested");
    ql_implicit(&mut d, &e, Some(&mut q))?;

    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut eigenvectors = CMat::zeros(n, n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, new_c)] = q[(r, old_c)];
        }
    }
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Ascending eigenvalues only (no eigenvector accumulation). `m` is
/// treated as Hermitian; only callers that guarantee Hermiticity use this.
pub(crate) fn eigvals_herm(m: &CMat) -> Result<Vec<f64>> {
    check_spectral_dim(m.rows())?;
    let (mut d, e, _) = tridiagonalize(m, false);
    ql_implicit(&mut d, &e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

pub fn lambda_min(m: &HermMat) -> Result<f64> {
    let vals = eigvals_herm(m.mat())?;
    Ok(vals[0])
}

pub fn lambda_max(m: &HermMat) -> Result<f64> {
    let vals = eigvals_herm(m.mat())?;
    Ok(*vals.last().expect("nonempty spectrum"))
}

/// `lambda_min(M) >= delta`, the strict-positivity test at margin `delta`
/// (boundary counts as positive).
pub fn is_strictly_positive(m: &HermMat, delta: f64) -> Result<bool> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "strictness margin must be finite and >= 0, got {delta}"
        )));
    }
    Ok(lambda_min(m)? >= delta)
}

/// Kronecker product, capped at a product dimension of [`KRON_CAP`] per side.
pub fn kron(a: &CMat, b: &CMat) -> Result<CMat> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let dim = rows.max(cols);
    if dim > KRON_CAP {
        return Err(Error::DimCapExceeded { dim, cap: KRON_CAP });
    }
    let mut out = CMat::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// `M^{-1/2}` by spectral calculus; requires `lambda_min(M) >= delta > 0`.
pub fn inv_sqrt(m: &HermMat, delta: f64) -> Result<HermMat> {
    if delta <= 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "inv_sqrt margin must be finite and > 0, got {delta}"
        )));
    }
    let spec = herm_eig(m)?;
    if spec.eigenvalues[0] < delta {
        return Err(Error::NotStrictlyPositive { lambda_min: spec.eigenvalues[0] });
    }
    let n = m.dim();
    let v = &spec.eigenvectors;
    // V diag(lambda^{-1/2}) V*
    let mut scaled = v.clone();
    for c in 0..n {
        let f = 1.0 / spec.eigenvalues[c].sqrt();
        for r in 0..n {
            let cur = scaled[(r, c)];
            scaled[(r, c)] = cur.scale(f);
        }
    }
    HermMat::hermitian_part(&scaled.mul(&v.adjoint()))
}

/// Largest singular value, computed as `sqrt(lambda_max(M* M))` on the
/// smaller Gram side.
pub fn op_norm(m: &CMat) -> Result<f64> {
    let gram = if m.cols() <= m.rows() {
        m.adjoint().mul(m)
    } else {
        m.mul(&m.adjoint())
    };
    let vals = eigvals_herm(&gram)?;
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    Ok(top.sqrt())
}

/// Cholesky factor `L` (lower triangular) of a Hermitian positive definite
/// matrix; `None` when a pivot fails, which doubles as the strict
/// positivity test inside the interior-point solver.
pub(crate) struct CholFactor {
    l: CMat,
}

pub(crate) fn cholesky(m: &CMat) -> Option<CholFactor> {
    let n = m.rows();
    debug_assert!(m.is_square());
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut s = m[(j, j)].re;
        for k in 0..j {
            s -= l[(j, k)].norm_sqr();
        }
        if s <= 0.0 || !s.is_finite() {
            return None;
        }
        let piv = s.sqrt();
        l[(j, j)] = c64(piv, 0.0);
        for i in j + 1..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                let t = l[(i, k)] * l[(j, k)].conj();
                acc -= t;
            }
            l[(i, j)] = acc.scale(1.0 / piv);
        }
    }
    Some(CholFactor { l })
}

impl CholFactor {
    pub(crate) fn log_det(&self) -> f64 {
        (0..self.l.rows()).map(|i| 2.0 * self.l[(i, i)].re.ln()).sum()
    }

    /// Inverse of the factored matrix, `A^{-1} = (L^{-1})* L^{-1}`.
    pub(crate) fn inverse(&self) -> CMat {
        let n = self.l.rows();
        // Forward substitution for L^{-1} (lower triangular).
        let mut linv = CMat::zeros(n, n);
        for j in 0..n {
            linv[(j, j)] = c64(1.0 / self.l[(j, j)].re, 0.0);
            for i in j + 1..n {
                let mut acc = Complex64::ZERO;
                for k in j..i {
                    acc += self.l[(i, k)] * linv[(k, j)];
                }
                linv[(i, j)] = -acc.scale(1.0 / self.l[(i, i)].re);
            }
        }
        let mut inv = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::ZERO;
                for k in i.max(j)..n {
                    acc += linv[(k, i)].conj() * linv[(k, j)];
                }
                inv[(i, j)] = acc;
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn randn(rng: &mut ChaCha12Rng) -> f64 {
        StandardNormal.sample(rng)
    }

    fn random_cmat(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> CMat {
        let data = (0..rows * cols)
            .map(|_| c64(randn(rng), randn(rng)).scale(std::f64::consts::FRAC_1_SQRT_2))
            .collect();
        CMat::from_vec(rows, cols, data).unwrap()
    }

    fn random_herm(n: usize, rng: &mut ChaCha12Rng) -> HermMat {
        let g = random_cmat(n, n, rng);
        HermMat::hermitian_part(&g).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {a} close to {b} (tol {tol})");
    }

    #[test]
    fn rejects_non_finite_entries() {
        let err = CMat::from_vec(1, 2, vec![c64(1.0, 0.0), c64(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry));
        let err = CMat::from_vec(1, 1, vec![c64(f64::INFINITY, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry));
    }

    #[test]
    fn rejects_empty_matrices() {
        assert!(matches!(CMat::from_vec(0, 3, vec![]), Err(Error::EmptyMatrix)));
        assert!(matches!(CMat::from_vec(3, 0, vec![]), Err(Error::EmptyMatrix)));
    }

    #[test]
    fn herm_mat_tolerance_gate() {
        // Asymmetry far above tolerance is rejected.
        let bad = CMat::from_vec(
            2,
            2,
            vec![c64(1.0, 0.0), c64(0.5, 0.0), c64(0.5 + 1e-6, 0.0), c64(1.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(HermMat::new(bad), Err(Error::NotHermitian { .. })));

        // Asymmetry below tolerance is symmetrized away.
        let almost = CMat::from_vec(
            2,
            2,
            vec![c64(1.0, 0.0), c64(0.5, 0.0), c64(0.5 + 1e-13, 0.0), c64(1.0, 0.0)],
        )
        .unwrap();
        let h = HermMat::new(almost).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        assert_close(h.get(0, 1).re, 0.5 + 0.5e-13, 1e-15);
    }

    #[test]
    fn herm_eig_identity_and_diagonal() {
        let spec = herm_eig(&HermMat::identity(3)).unwrap();
        for v in &spec.eigenvalues {
            assert_close(*v, 1.0, 1e-14);
        }

        let d = HermMat::new(CMat::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]).unwrap()).unwrap();
        let spec = herm_eig(&d).unwrap();
        assert_close(spec.eigenvalues[0], 1.0, 1e-14);
        assert_close(spec.eigenvalues[1], 2.0, 1e-14);
    }

    #[test]
    fn herm_eig_symmetry_forced_pair() {
        let x = HermMat::new(CMat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()).unwrap();
        let spec = herm_eig(&x).unwrap();
        assert_close(spec.eigenvalues[0], -1.0, 1e-14);
        assert_close(spec.eigenvalues[1], 1.0, 1e-14);
    }

    #[test]
    fn herm_eig_reconstruction_random() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in [1usize, 2, 3, 5, 8, 13, 21, 32] {
            let m = random_herm(n, &mut rng);
            let spec = herm_eig(&m).unwrap();
            let v = &spec.eigenvectors;
            // Orthonormality.
            let vtv = v.adjoint().mul(v);
            let orth = vtv.sub(&CMat::identity(n)).frobenius_norm();
            assert!(orth <= 1e-10, "orthonormality residual {orth} at dim {n}");
            // Reconstruction.
            let mut vl = v.clone();
            for c in 0..n {
                for r in 0..n {
                    let cur = vl[(r, c)];
                    vl[(r, c)] = cur.scale(spec.eigenvalues[c]);
                }
            }
            let recon = vl.mul(&v.adjoint());
            let res = recon.sub(m.mat()).frobenius_norm();
            let bound = 1e-10 * (1.0 + m.mat().frobenius_norm());
            assert!(res <= bound, "reconstruction residual {res} at dim {n}");
            // Eigenvalue-only path agrees.
            let vals = eigvals_herm(m.mat()).unwrap();
            for (a, b) in vals.iter().zip(&spec.eigenvalues) {
                assert_close(*a, *b, 1e-11 * (1.0 + m.mat().frobenius_norm()));
            }
        }
    }

    #[test]
    fn herm_eig_zero_matrix() {
        let spec = herm_eig(&HermMat::zeros(4)).unwrap();
        for v in &spec.eigenvalues {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn herm_eig_dim_cap() {
        let err = herm_eig(&HermMat::identity(DIM_CAP + 1)).unwrap_err();
        assert!(matches!(err, Error::DimCapExceeded { .. }));
    }

    #[test]
    fn lambda_extremes() {
        assert_close(lambda_min(&HermMat::identity(3)).unwrap(), 1.0, 1e-14);
        let d = HermMat::new(CMat::from_real(2, 2, &[-2.0, 0.0, 0.0, 5.0]).unwrap()).unwrap();
        assert_close(lambda_min(&d).unwrap(), -2.0, 1e-14);
        assert_close(lambda_max(&HermMat::zeros(3)).unwrap(), 0.0, 1e-14);
    }

    #[test]
    fn strict_positivity_boundary_semantics() {
        assert!(is_strictly_positive(&HermMat::identity(2), 0.5).unwrap());
        let d = HermMat::new(CMat::from_real(2, 2, &[0.3, 0.0, 0.0, 1.0]).unwrap()).unwrap();
        assert!(!is_strictly_positive(&d, 0.5).unwrap());
        // Boundary: the zero matrix at margin zero counts as positive.
        assert!(is_strictly_positive(&HermMat::zeros(2), 0.0).unwrap());
    }

    #[test]
    fn kron_basics() {
        let i6 = kron(&CMat::identity(2), &CMat::identity(3)).unwrap();
        assert_eq!(i6.sub(&CMat::identity(6)).frobenius_norm(), 0.0);

        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let m = random_cmat(3, 3, &mut rng);
        let two = CMat::scalar(c64(2.0, 0.0));
        let scaled = kron(&two, &m).unwrap();
        assert!(scaled.sub(&m.scale(c64(2.0, 0.0))).frobenius_norm() <= 1e-15);

        let nilpotent = CMat::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let k = kron(&nilpotent, &CMat::identity(2)).unwrap();
        assert_eq!(k.block(0, 2, 2, 2).sub(&CMat::identity(2)).frobenius_norm(), 0.0);
        assert_eq!(k.block(0, 0, 2, 2).frobenius_norm(), 0.0);
        assert_eq!(k.block(2, 0, 2, 4).frobenius_norm(), 0.0);
    }

    #[test]
    fn kron_cap() {
        let a = CMat::identity(40);
        let err = kron(&a, &a).unwrap_err();
        assert!(matches!(err, Error::DimCapExceeded { dim: 1600, cap: KRON_CAP }));
    }

    #[test]
    fn kron_spectra_multiply() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_herm(3, &mut rng);
            let b = random_herm(4, &mut rng);
            let k = HermMat::hermitian_part(&kron(a.mat(), b.mat()).unwrap()).unwrap();
            let mut expected: Vec<f64> = herm_eig(&a)
                .unwrap()
                .eigenvalues
                .iter()
                .flat_map(|x| herm_eig(&b).unwrap().eigenvalues.iter().map(|y| x * y).collect::<Vec<_>>())
                .collect();
            expected.sort_by(|p, q| p.partial_cmp(q).unwrap());
            let got = herm_eig(&k).unwrap().eigenvalues;
            for (g, e) in got.iter().zip(&expected) {
                assert_close(*g, *e, 1e-9);
            }
        }
    }

    #[test]
    fn inv_sqrt_examples() {
        let r = inv_sqrt(&HermMat::identity(3), 0.5).unwrap();
        assert!(r.mat().sub(&CMat::identity(3)).frobenius_norm() <= 1e-12);

        let d = HermMat::new(CMat::from_real(2, 2, &[4.0, 0.0, 0.0, 9.0]).unwrap()).unwrap();
        let r = inv_sqrt(&d, 1.0).unwrap();
        assert_close(r.get(0, 0).re, 0.5, 1e-12);
        assert_close(r.get(1, 1).re, 1.0 / 3.0, 1e-12);

        let quarter = HermMat::scaled_identity(2, 0.25);
        let r = inv_sqrt(&quarter, 0.1).unwrap();
        assert!(r.mat().sub(&CMat::identity(2).scale(c64(2.0, 0.0))).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn inv_sqrt_congruence_and_rejection() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..10 {
            let g = random_cmat(4, 4, &mut rng);
            let psd = HermMat::hermitian_part(&g.adjoint().mul(&g)).unwrap()
                .add_scaled_identity(0.5);
            let half = inv_sqrt(&psd, 1e-9).unwrap();
            let prod = half.mat().mul(psd.mat()).mul(half.mat());
            let res = prod.sub(&CMat::identity(4)).frobenius_norm();
            assert!(res <= 1e-9, "congruence residual {res}");
        }
        let neg = HermMat::new(CMat::from_real(2, 2, &[-1.0, 0.0, 0.0, 1.0]).unwrap()).unwrap();
        match inv_sqrt(&neg, 1e-9) {
            Err(Error::NotStrictlyPositive { lambda_min }) => assert_close(lambda_min, -1.0, 1e-12),
            other => panic!("expected NotStrictlyPositive, got {other:?}"),
        }
    }

    #[test]
    fn op_norm_examples() {
        assert_close(op_norm(&CMat::identity(4)).unwrap(), 1.0, 1e-12);
        let n = CMat::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        assert_close(op_norm(&n).unwrap(), 2.0, 1e-12);
        // Pythagorean row of scalars.
        let row = CMat::from_real(1, 2, &[0.3, 0.4]).unwrap();
        assert_close(op_norm(&row).unwrap(), 0.5, 1e-12);
    }

    #[test]
    fn op_norm_unitary_invariance() {
        use crate::numrad::haar_unitary;
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..10 {
            let m = random_cmat(5, 5, &mut rng);
            let u = haar_unitary(5, &mut rng);
            let v = haar_unitary(5, &mut rng);
            let rotated = u.mul(&m).mul(&v);
            assert_close(op_norm(&rotated).unwrap(), op_norm(&m).unwrap(), 1e-9);
        }
    }

    #[test]
    fn cholesky_factor_and_inverse() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for n in [1usize, 2, 5, 9] {
            let g = random_cmat(n, n, &mut rng);
            let a = HermMat::hermitian_part(&g.adjoint().mul(&g)).unwrap()
                .add_scaled_identity(0.3);
            let f = cholesky(a.mat()).expect("positive definite");
            let recon = f.l.mul(&f.l.adjoint());
            assert!(recon.sub(a.mat()).frobenius_norm() <= 1e-10 * (1.0 + a.mat().frobenius_norm()));
            let inv = f.inverse();
            let prod = inv.mul(a.mat());
            assert!(prod.sub(&CMat::identity(n)).frobenius_norm() <= 1e-8);
            // log det agrees with the eigenvalue sum.
            let logdet: f64 = herm_eig(&a).unwrap().eigenvalues.iter().map(|v| v.ln()).sum();
            assert_close(f.log_det(), logdet, 1e-8 * (1.0 + logdet.abs()));
        }
        // Indefinite input is refused.
        let neg = CMat::from_real(2, 2, &[-1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(cholesky(&neg).is_none());
    }

    #[test]
    fn eig_handles_degenerate_spectra() {
        // Repeated eigenvalues from a projector: eigenvalues {0, 0, 1, 1}.
        let mut p = CMat::zeros(4, 4);
        p.set_block(0, 0, &CMat::identity(2));
        let h = HermMat::new(p).unwrap();
        let vals = herm_eig(&h).unwrap().eigenvalues;
        assert_close(vals[0], 0.0, 1e-14);
        assert_close(vals[1], 0.0, 1e-14);
        assert_close(vals[2], 1.0, 1e-14);
        assert_close(vals[3], 1.0, 1e-14);
    }
}
