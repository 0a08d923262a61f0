//! Interior-point solver for the maximal strict-positivity margin of a
//! block-tridiagonal completion with a fixed diagonal sum.
//!
//! Given off-diagonal blocks `X_1..X_{n-1}` and a Hermitian target sum `S`,
//! it maximizes `s` subject to `M(A) >= s I` over Hermitian diagonal blocks
//! `A_1..A_n` with `sum A_j = S`, where `M(A)` is the assembled
//! block-tridiagonal matrix. The sum constraint is eliminated
//! (`A_n = S - sum_{j<n} A_j`) and the remaining unconstrained concave
//! program `max s + mu log det(M(A) - s I)` is solved by damped Newton
//! steps along a decreasing barrier path; the central values at `mu` and
//! `mu/2` are Richardson-extrapolated to the exact margin.
//!
//! This is the inner feasibility oracle for the diagonal-sum bisection:
//! alternating-projection solvers locate comfortably feasible points well
//! but cannot resolve feasibility boundaries to the accuracy the
//! optimization layer needs, while the central path gets within
//! `O(mu^2)` of the true margin.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{c64, cholesky, eigvals_herm, CMat, HermMat};

/// Barrier path terminus; the extrapolated margin is accurate to roughly
/// the square of this.
const MU_FINAL: f64 = 1e-9;
/// Factor by which the barrier weight shrinks per stage.
const MU_SHRINK: f64 = 8.0;
/// Newton iteration cap per barrier stage.
const NEWTON_CAP: usize = 80;
/// Line-search halving cap.
const BACKTRACK_CAP: usize = 60;

/// Outcome of the margin maximization.
pub(crate) struct MaxMargin {
    /// Extrapolated maximal margin `h = max { lambda_min(M(A)) }`.
    pub h: f64,
    /// Diagonal blocks of the final central point (their sum is exactly
    /// `S` by construction).
    pub blocks: Vec<HermMat>,
    /// Total Newton steps across all barrier stages.
    pub newton_steps: usize,
}

/// Sparse Hermitian basis element of a `p x p` block: a list of
/// `(row, col, coefficient)` entries.
struct BasisElem {
    entries: Vec<(usize, usize, Complex64)>,
}

/// Real basis of the Hermitian `p x p` matrices: diagonal units, symmetric
/// pairs, and antisymmetric (imaginary) pairs; `p^2` elements.
fn herm_basis(p: usize) -> Vec<BasisElem> {
    let mut basis = Vec::with_capacity(p * p);
    for a in 0..p {
        basis.push(BasisElem { entries: vec![(a, a, Complex64::ONE)] });
    }
    for a in 0..p {
        for b in a + 1..p {
            basis.push(BasisElem {
                entries: vec![(a, b, Complex64::ONE), (b, a, Complex64::ONE)],
            });
        }
    }
    for a in 0..p {
        for b in a + 1..p {
            basis.push(BasisElem {
                entries: vec![(a, b, c64(0.0, 1.0)), (b, a, c64(0.0, -1.0))],
            });
        }
    }
    basis
}

/// Coordinates of a Hermitian matrix in [`herm_basis`] order.
fn herm_coords(m: &HermMat) -> Vec<f64> {
    let p = m.dim();
    let mut coords = Vec::with_capacity(p * p);
    for a in 0..p {
        coords.push(m.get(a, a).re);
    }
    for a in 0..p {
        for b in a + 1..p {
            coords.push(m.get(a, b).re);
        }
    }
    for a in 0..p {
        for b in a + 1..p {
            coords.push(m.get(a, b).im);
        }
    }
    coords
}

/// Dense real linear solve by Gaussian elimination with partial pivoting;
/// `a` is row-major `m x m`, consumed. Returns `None` on a zero pivot.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    debug_assert_eq!(a.len(), m * m);
    for k in 0..m {
        let mut piv = k;
        for r in k + 1..m {
            if a[r * m + k].abs() > a[piv * m + k].abs() {
                piv = r;
            }
        }
        if a[piv * m + k] == 0.0 {
            return None;
        }
        if piv != k {
            for c in 0..m {
                a.swap(k * m + c, piv * m + c);
            }
            b.swap(k, piv);
        }
        let d = a[k * m + k];
        for r in k + 1..m {
            let f = a[r * m + k] / d;
            if f == 0.0 {
                continue;
            }
            for c in k..m {
                a[r * m + c] -= f * a[k * m + c];
            }
            b[r] -= f * b[k];
        }
    }
    for k in (0..m).rev() {
        let mut acc = b[k];
        for c in k + 1..m {
            acc -= a[k * m + c] * b[c];
        }
        b[k] = acc / a[k * m + k];
    }
    Some(b)
}

struct Program<'a> {
    offdiag: &'a [CMat],
    target: &'a HermMat,
    basis: Vec<BasisElem>,
    n: usize,
    p: usize,
    /// Coordinates: `(n-1) p^2` block coefficients followed by `s`.
    y: Vec<f64>,
}

impl<'a> Program<'a> {
    fn new(offdiag: &'a [CMat], target: &'a HermMat) -> Result<Self> {
        let p = target.dim();
        let n = offdiag.len() + 1;
        let basis = herm_basis(p);
        // Start at the affine-feasible equal split A_j = S / n.
        let share = target.scale(1.0 / n as f64);
        let share_coords = herm_coords(&share);
        let mut y = Vec::with_capacity((n - 1) * p * p + 1);
        for _ in 0..n - 1 {
            y.extend_from_slice(&share_coords);
        }
        y.push(0.0);
        let mut prog = Program { offdiag, target, basis, n, p, y };
        let m0 = prog.assemble();
        let lam = eigvals_herm(&m0)?[0];
        let s_len = prog.y.len();
        prog.y[s_len - 1] = lam - 1.0;
        Ok(prog)
    }

    fn s(&self) -> f64 {
        *self.y.last().expect("nonempty coordinates")
    }

    /// Diagonal blocks reconstructed from coordinates; the last block is
    /// the eliminated `A_n = S - sum_{j<n} A_j`.
    fn blocks(&self) -> Vec<HermMat> {
        let (n, p) = (self.n, self.p);
        let pp = p * p;
        let mut blocks = Vec::with_capacity(n);
        let mut last = self.target.mat().clone();
        for j in 0..n - 1 {
            let mut blk = CMat::zeros(p, p);
            for (idx, elem) in self.basis.iter().enumerate() {
                let coef = self.y[j * pp + idx];
                if coef == 0.0 {
                    continue;
                }
                for &(r, c, w) in &elem.entries {
                    let cur = blk[(r, c)];
                    blk[(r, c)] = cur + w.scale(coef);
                }
            }
            last = last.sub(&blk);
            blocks.push(HermMat::hermitian_part(&blk).expect("square block"));
        }
        blocks.push(HermMat::hermitian_part(&last).expect("square block"));
        blocks
    }

    /// Assembled block-tridiagonal matrix at the current coordinates.
    fn assemble(&self) -> CMat {
        let (n, p) = (self.n, self.p);
        let big = n * p;
        let mut m = CMat::zeros(big, big);
        for (j, blk) in self.blocks().iter().enumerate() {
            m.set_block(j * p, j * p, blk.mat());
        }
        for (j, x) in self.offdiag.iter().enumerate() {
            m.set_block(j * p, (j + 1) * p, x);
            m.set_block((j + 1) * p, j * p, &x.adjoint());
        }
        m
    }

    /// `Z = M - s I`; `None` when not strictly positive definite.
    fn z_factor(&self) -> Option<(crate::linalg::CholFactor, CMat)> {
        let mut z = self.assemble();
        let s = self.s();
        for i in 0..z.rows() {
            let d = z[(i, i)];
            z[(i, i)] = c64(d.re - s, 0.0);
        }
        cholesky(&z).map(|f| (f, z))
    }

    fn objective(&self, mu: f64) -> Option<f64> {
        self.z_factor().map(|(f, _)| self.s() + mu * f.log_det())
    }

    /// One barrier stage: damped Newton ascent of `s + mu log det Z`.
    fn newton(&mut self, mu: f64) -> usize {
        let (n, p) = (self.n, self.p);
        let pp = p * p;
        let q = n - 1; // index of the eliminated block
        let mdim = (n - 1) * pp + 1;
        let mut steps = 0usize;

        // tr(W[br,bc] B) for a sparse basis element B.
        let tr_block = |w: &CMat, br: usize, bc: usize, elem: &BasisElem| -> Complex64 {
            let mut acc = Complex64::ZERO;
            for &(r, c, coef) in &elem.entries {
                acc += coef * w[(br * p + c, bc * p + r)];
            }
            acc
        };

        for _ in 0..NEWTON_CAP {
            let (factor, _z) = match self.z_factor() {
                Some(fz) => fz,
                None => return steps, // invariant violated; caller's line search prevents this
            };
            let w = factor.inverse();
            let w2 = w.mul(&w);

            let mut grad = vec![0.0f64; mdim];
            for j in 0..n - 1 {
                for (idx, elem) in self.basis.iter().enumerate() {
                    let t = tr_block(&w, j, j, elem) - tr_block(&w, q, q, elem);
                    grad[j * pp + idx] = mu * t.re;
                }
            }
            let trw: Complex64 = (0..w.rows()).map(|i| w[(i, i)]).sum();
            grad[mdim - 1] = 1.0 - mu * trw.re;

            // T(a,b;P,Q) = tr(W inj_a(P) W inj_b(Q)), expanded entrywise.
            let t_term = |a: usize, b: usize, pe: &BasisElem, qe: &BasisElem| -> f64 {
                let mut acc = Complex64::ZERO;
                for &(rp, cp, alpha) in &pe.entries {
                    for &(rq, cq, beta) in &qe.entries {
                        acc += alpha
                            * beta
                            * w[(b * p + cq, a * p + rp)]
                            * w[(a * p + cp, b * p + rq)];
                    }
                }
                acc.re
            };

            let mut hess = vec![0.0f64; mdim * mdim];
            for j in 0..n - 1 {
                for (i1, e1) in self.basis.iter().enumerate() {
                    let row = j * pp + i1;
                    for k in j..n - 1 {
                        let start = if k == j { i1 } else { 0 };
                        for (i2, e2) in self.basis.iter().enumerate().skip(start) {
                            let col = k * pp + i2;
                            let v = -mu
                                * (t_term(j, k, e1, e2) - t_term(j, q, e1, e2)
                                    - t_term(q, k, e1, e2)
                                    + t_term(q, q, e1, e2));
                            hess[row * mdim + col] = v;
                            hess[col * mdim + row] = v;
                        }
                    }
                    // Mixed s / block entries.
                    let t = tr_block(&w2, j, j, e1) - tr_block(&w2, q, q, e1);
                    let v = mu * t.re;
                    hess[row * mdim + (mdim - 1)] = v;
                    hess[(mdim - 1) * mdim + row] = v;
                }
            }
            let trw2: Complex64 = (0..w2.rows()).map(|i| w2[(i, i)]).sum();
            hess[(mdim - 1) * mdim + (mdim - 1)] = -mu * trw2.re;

            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = match solve_dense(hess, rhs) {
                Some(s) => s,
                None => return steps,
            };
            let decrement: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
            steps += 1;
            if !decrement.is_finite() {
                return steps;
            }

            // Backtracking line search keeping Z strictly positive definite.
            let base = self.objective(mu).expect("current point is interior");
            let saved = self.y.clone();
            let mut t = 1.0f64;
            let mut accepted = false;
            for _ in 0..BACKTRACK_CAP {
                for (yi, (s0, st)) in self.y.iter_mut().zip(saved.iter().zip(&step)) {
                    *yi = s0 + t * st;
                }
                if let Some(val) = self.objective(mu) {
                    if val >= base + 0.25 * t * decrement {
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                self.y = saved;
                return steps;
            }
            if decrement.abs() < 1e-18 * (1.0 + self.s().abs()) {
                return steps;
            }
        }
        steps
    }
}

/// Maximize `lambda_min(M(A))` over completions with `sum A_j = S`.
pub(crate) fn max_margin(offdiag: &[CMat], target: &HermMat) -> Result<MaxMargin> {
    let mut prog = Program::new(offdiag, target)?;
    let mut steps = 0usize;
    let mut mu = 1.0f64;
    loop {
        steps += prog.newton(mu);
        if mu <= MU_FINAL {
            break;
        }
        mu = (mu / MU_SHRINK).max(MU_FINAL);
    }
    let s_mu = prog.s();
    steps += prog.newton(MU_FINAL / 2.0);
    let s_half = prog.s();
    // Central values obey s(mu) = h - c mu + O(mu^2).
    let h = 2.0 * s_half - s_mu;
    Ok(MaxMargin { h, blocks: prog.blocks(), newton_steps: steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lambda_min;
    use crate::numrad::{gaussian_matrix, numerical_radius};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {a} close to {b} (tol {tol})");
    }

    #[test]
    fn scalar_margin_closed_form() {
        // n = 2 scalars, sum t, offdiag x: optimum splits the diagonal
        // evenly, margin h(t) = t/2 - |x|.
        for (x, t) in [(0.4, 1.0), (0.25, 0.3), (0.5, 2.0)] {
            let off = [CMat::scalar(c64(x, 0.0))];
            let target = HermMat::scaled_identity(1, t);
            let res = max_margin(&off, &target).unwrap();
            assert_close(res.h, t / 2.0 - x, 1e-10);
            // Returned blocks sum to the target exactly and realize ~h.
            let sum: f64 = res.blocks.iter().map(|b| b.get(0, 0).re).sum();
            assert_close(sum, t, 1e-12);
        }
    }

    #[test]
    fn margin_is_linear_in_t() {
        // Shifting every block by c I moves the sum by n c and the margin
        // by exactly c, so h(t) = h(0) + t/n.
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for n_blocks in [2usize, 3] {
            let p = 3;
            let offs: Vec<CMat> =
                (0..n_blocks - 1).map(|_| gaussian_matrix(p, p, &mut rng)).collect();
            let h0 = max_margin(&offs, &HermMat::zeros(p)).unwrap().h;
            for t in [0.7, 2.3] {
                let ht = max_margin(&offs, &HermMat::scaled_identity(p, t)).unwrap().h;
                assert_close(ht, h0 + t / n_blocks as f64, 1e-8);
            }
        }
    }

    #[test]
    fn margin_matches_radius_for_pairs() {
        // For n = 2 the margin at sum t I crosses zero at t = 2 w(X).
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for p in [2usize, 3] {
            let x = gaussian_matrix(p, p, &mut rng);
            let w = numerical_radius(&x).unwrap().value;
            let off = [x];
            let h0 = max_margin(&off, &HermMat::zeros(p)).unwrap().h;
            // h(t) = t/2 + h(0) vanishes at t = -2 h(0) = 2 w.
            assert_close(-2.0 * h0, 2.0 * w, 1e-7);
        }
    }

    #[test]
    fn blocks_achieve_the_margin() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let p = 3;
        let offs = [gaussian_matrix(p, p, &mut rng), gaussian_matrix(p, p, &mut rng)];
        let target = HermMat::scaled_identity(p, 6.0);
        let res = max_margin(&offs, &target).unwrap();
        // Assemble and compare the realized margin to the reported one.
        let n = 3;
        let mut m = CMat::zeros(n * p, n * p);
        for (j, b) in res.blocks.iter().enumerate() {
            m.set_block(j * p, j * p, b.mat());
        }
        for (j, x) in offs.iter().enumerate() {
            m.set_block(j * p, (j + 1) * p, x);
            m.set_block((j + 1) * p, j * p, &x.adjoint());
        }
        let lam = lambda_min(&HermMat::hermitian_part(&m).unwrap()).unwrap();
        assert_close(lam, res.h, 1e-7);
        // Sum constraint holds exactly.
        let mut sum = res.blocks[0].mat().clone();
        for b in &res.blocks[1..] {
            sum = sum.add(b.mat());
        }
        assert!(sum.sub(target.mat()).frobenius_norm() <= 1e-12);
    }
}
