//! Block-tridiagonal strictly positive completions.
//!
//! A completion problem fixes the off-diagonal blocks `X_1..X_{n-1}` of an
//! `n x n` block-tridiagonal Hermitian matrix and asks for diagonal blocks
//! `A_1..A_n` with a prescribed sum `S` making the assembled matrix
//! strictly positive at margin `delta`. This module decides feasibility
//! with an alternating-projection solver that emits checkable
//! certificates, minimizes the diagonal-sum norm `t` for `S = t I` by
//! bisection over an interior-point margin oracle, builds the 2x2
//! single-block certificate by truncated continued-fraction recursion,
//! and provides the three-block equivalences between tridiagonal
//! positivity and row contractions.

use crate::barrier;
use crate::error::{Error, Result};
use crate::linalg::{
    herm_eig, inv_sqrt, lambda_min, op_norm, CMat, HermMat, DIM_CAP,
};
use crate::numrad::{free_radius_lower_bound, FreeRadiusEstimate};

/// Default iteration budget for the alternating-projection solver.
pub const DEFAULT_MAX_ITER: usize = 50_000;
/// Default bisection tolerance (absolute, in `t`).
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default truncation depth for the 2x2 certificate recursion.
pub const DEFAULT_TRUNCATION: usize = 200;

/// Certificates may undershoot the requested margin by this much.
const LAMBDA_SLACK: f64 = 1e-7;
/// Early-accept slack for the projection iteration.
const ACCEPT_SLACK: f64 = 1e-8;
/// Residual threshold declaring the projection iteration converged.
const RESIDUAL_TOL: f64 = 1e-10;
/// Maximal allowed Frobenius residual of the block sum.
const SUM_TOL: f64 = 1e-9;
/// Margin the bisection oracle demands from the interior-point solver.
const DELTA_WORK: f64 = 1e-9;
/// Additive slack on the upper bisection bracket `2 sum ||X_j||`; the
/// closed-form bracket is attained exactly by aligned scalar data, so a
/// strict-feasibility oracle needs headroom above it.
const BRACKET_SLACK: f64 = 1.0;
/// Default margin for boolean strictness verdicts.
const DEFAULT_MARGIN: f64 = 1e-9;
/// Smallest acceptable Schur pivot eigenvalue in the 2x2 recursion.
const PIVOT_FLOOR: f64 = 1e-12;

/// A Hermitian block-tridiagonal matrix given by its diagonal blocks and
/// the blocks directly above the diagonal.
#[derive(Clone, Debug)]
pub struct BlockTridiag {
    diag: Vec<HermMat>,
    superdiag: Vec<CMat>,
}

impl BlockTridiag {
    /// `superdiag` must have exactly one block fewer than `diag`, and all
    /// blocks must be square of a common dimension.
    pub fn new(diag: Vec<HermMat>, superdiag: Vec<CMat>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidParameter(
                "block tridiagonal needs at least one diagonal block".into(),
            ));
        }
        if superdiag.len() + 1 != diag.len() {
            return Err(Error::DimMismatch(format!(
                "{} diagonal blocks need {} off-diagonal blocks, got {}",
                diag.len(),
                diag.len() - 1,
                superdiag.len()
            )));
        }
        let p = diag[0].dim();
        for (j, d) in diag.iter().enumerate() {
            if d.dim() != p {
                return Err(Error::DimMismatch(format!(
                    "diagonal block {j} has dim {}, expected {p}",
                    d.dim()
                )));
            }
        }
        for (j, x) in superdiag.iter().enumerate() {
            if !x.is_square() || x.rows() != p {
                return Err(Error::DimMismatch(format!(
                    "off-diagonal block {j} is {}x{}, expected {p}x{p}",
                    x.rows(),
                    x.cols()
                )));
            }
            if !x.is_finite() {
                return Err(Error::NonFiniteEntry);
            }
        }
        Ok(BlockTridiag { diag, superdiag })
    }

    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn block_dim(&self) -> usize {
        self.diag[0].dim()
    }

    pub fn diag(&self) -> &[HermMat] {
        &self.diag
    }

    pub fn superdiag(&self) -> &[CMat] {
        &self.superdiag
    }

    /// The assembled `(n p) x (n p)` Hermitian matrix.
    pub fn assemble(&self) -> HermMat {
        let p = self.block_dim();
        let n = self.n_blocks();
        let mut m = CMat::zeros(n * p, n * p);
        for (j, d) in self.diag.iter().enumerate() {
            m.set_block(j * p, j * p, d.mat());
        }
        for (j, x) in self.superdiag.iter().enumerate() {
            m.set_block(j * p, (j + 1) * p, x);
            m.set_block((j + 1) * p, j * p, &x.adjoint());
        }
        HermMat::hermitian_part(&m).expect("assembled matrix is square")
    }
}

/// Feasibility problem: find diagonal blocks summing to `target_sum` that
/// make the tridiagonal assembly strictly positive at margin `delta`.
#[derive(Clone, Debug)]
pub struct CompletionProblem {
    offdiag: Vec<CMat>,
    target_sum: HermMat,
    delta: f64,
}

impl CompletionProblem {
    pub fn new(offdiag: Vec<CMat>, target_sum: HermMat, delta: f64) -> Result<Self> {
        if offdiag.is_empty() {
            return Err(Error::InvalidParameter(
                "completion problem needs at least one off-diagonal block".into(),
            ));
        }
        let p = target_sum.dim();
        for (j, x) in offdiag.iter().enumerate() {
            if !x.is_square() || x.rows() != p {
                return Err(Error::DimMismatch(format!(
                    "off-diagonal block {j} is {}x{}, expected {p}x{p}",
                    x.rows(),
                    x.cols()
                )));
            }
            if !x.is_finite() {
                return Err(Error::NonFiniteEntry);
            }
        }
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "strictness margin must be finite and >= 0, got {delta}"
            )));
        }
        Ok(CompletionProblem { offdiag, target_sum, delta })
    }

    /// Problem with `target_sum = I`.
    pub fn with_identity_sum(offdiag: Vec<CMat>, delta: f64) -> Result<Self> {
        if offdiag.is_empty() {
            return Err(Error::InvalidParameter(
                "completion problem needs at least one off-diagonal block".into(),
            ));
        }
        let p = offdiag[0].rows();
        Self::new(offdiag, HermMat::scaled_identity(p, 1.0), delta)
    }

    pub fn offdiag(&self) -> &[CMat] {
        &self.offdiag
    }

    pub fn target_sum(&self) -> &HermMat {
        &self.target_sum
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n_blocks(&self) -> usize {
        self.offdiag.len() + 1
    }

    pub fn block_dim(&self) -> usize {
        self.target_sum.dim()
    }
}

/// A feasible completion together with the quantities a verifier recomputes.
#[derive(Clone, Debug)]
pub struct CompletionCertificate {
    /// Diagonal blocks `A_1..A_n`.
    pub blocks: Vec<HermMat>,
    /// Smallest eigenvalue of the assembled matrix (recomputed at emission).
    pub lambda_min_assembled: f64,
    /// `|| sum A_j - S ||_F`.
    pub sum_residual: f64,
    /// Iterations the producing solver spent.
    pub iterations: usize,
}

/// Diagnostics for a failed feasibility search.
#[derive(Clone, Debug)]
pub struct InfeasibleReport {
    /// Projection rounds performed.
    pub iterations: usize,
    /// Best assembled smallest eigenvalue seen along the iteration.
    pub best_lambda_min: f64,
    /// Final distance moved by the cone projection.
    pub cone_residual: f64,
    /// Final distance moved by the affine projection.
    pub affine_residual: f64,
}

#[derive(Clone, Debug)]
pub enum CompletionOutcome {
    Feasible(CompletionCertificate),
    Infeasible(InfeasibleReport),
}

impl CompletionOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CompletionOutcome::Feasible(_))
    }
}

/// Independent re-check of a certificate against its problem.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub lambda_min_assembled: f64,
    pub sum_residual: f64,
    /// `lambda_min_assembled >= delta - 1e-7`.
    pub lambda_min_pass: bool,
    /// `sum_residual <= 1e-9`.
    pub sum_pass: bool,
    pub pass: bool,
}

fn tridiag_from_parts(blocks: &[HermMat], offdiag: &[CMat]) -> Result<BlockTridiag> {
    BlockTridiag::new(blocks.to_vec(), offdiag.to_vec())
}

/// Spectral clip of a Hermitian matrix onto the cone `{ M >= delta I }`.
fn clip_to_cone(m: &HermMat, delta: f64) -> Result<CMat> {
    let spec = herm_eig(m)?;
    let n = m.dim();
    let v = &spec.eigenvectors;
    let mut scaled = v.clone();
    for c in 0..n {
        let lam = spec.eigenvalues[c].max(delta);
        for r in 0..n {
            let cur = scaled[(r, c)];
            scaled[(r, c)] = cur.scale(lam);
        }
    }
    Ok(scaled.mul(&v.adjoint()))
}

/// Nearest matrix (in Frobenius norm) with the prescribed band and block
/// sum: off-band entries are zeroed, the off-diagonal band is restored,
/// and the diagonal blocks are shifted by a common correction to make
/// their sum exactly `target`.
fn project_affine(y: &CMat, offdiag: &[CMat], target: &HermMat) -> Result<BlockTridiag> {
    let p = target.dim();
    let n = offdiag.len() + 1;
    let mut blocks: Vec<HermMat> = (0..n)
        .map(|j| HermMat::hermitian_part(&y.block(j * p, j * p, p, p)))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = blocks[0].clone();
    for b in &blocks[1..] {
        sum = sum.add(b);
    }
    let correction = sum.sub(target).scale(1.0 / n as f64);
    for b in &mut blocks {
        *b = b.sub(&correction);
    }
    tridiag_from_parts(&blocks, offdiag)
}

fn certificate_from(
    blocks: Vec<HermMat>,
    offdiag: &[CMat],
    target: &HermMat,
    iterations: usize,
) -> Result<CompletionCertificate> {
    let bt = tridiag_from_parts(&blocks, offdiag)?;
    let lam = lambda_min(&bt.assemble())?;
    let mut sum = blocks[0].clone();
    for b in &blocks[1..] {
        sum = sum.add(b);
    }
    let sum_residual = sum.sub(target).mat().frobenius_norm();
    Ok(CompletionCertificate {
        blocks,
        lambda_min_assembled: lam,
        sum_residual,
        iterations,
    })
}

/// Alternating-projection (Dykstra) feasibility search.
///
/// The iterate alternates between the strict-positivity cone
/// `{ M >= delta I }` (with the standard correction term) and the affine
/// set of banded matrices with the prescribed off-diagonal blocks and
/// diagonal-block sum. The affine iterate is checked each round and
/// accepted as soon as its smallest eigenvalue clears
/// `delta - 1e-8`. If both projection residuals drop below `1e-10` the
/// sets intersect at the iterate (feasible) or the iteration has stalled
/// at an infeasible problem; if the budget runs out first, the report
/// carries the best margin seen and the final residuals.
pub fn feasible_completion(
    prob: &CompletionProblem,
    max_iter: usize,
) -> Result<CompletionOutcome> {
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
    }
    let n = prob.n_blocks();
    let share = prob.target_sum.scale(1.0 / n as f64);
    let start = tridiag_from_parts(&vec![share; n], &prob.offdiag)?;
    let big = n * prob.block_dim();
    if big > DIM_CAP {
        return Err(Error::DimCapExceeded { dim: big, cap: DIM_CAP });
    }

    let mut m = start.assemble().into_mat();
    let mut correction = CMat::zeros(big, big);
    let mut best_lambda = f64::NEG_INFINITY;
    let (mut cone_res, mut aff_res) = (f64::INFINITY, f64::INFINITY);

    for it in 0..max_iter {
        let mh = HermMat::hermitian_part(&m)?;
        let lam = lambda_min(&mh)?;
        best_lambda = best_lambda.max(lam);
        if lam >= prob.delta - ACCEPT_SLACK {
            let bt = project_affine(&m, &prob.offdiag, &prob.target_sum)?;
            let cert =
                certificate_from(bt.diag().to_vec(), &prob.offdiag, &prob.target_sum, it)?;
            return Ok(CompletionOutcome::Feasible(cert));
        }

        let t = m.add(&correction);
        let y = clip_to_cone(&HermMat::hermitian_part(&t)?, prob.delta)?;
        correction = t.sub(&y);
        let next = project_affine(&y, &prob.offdiag, &prob.target_sum)?.assemble().into_mat();
        cone_res = y.sub(&m).frobenius_norm();
        aff_res = next.sub(&y).frobenius_norm();
        m = next;

        if cone_res < RESIDUAL_TOL && aff_res < RESIDUAL_TOL {
            // The projections agree; decide by the margin of the iterate.
            let mh = HermMat::hermitian_part(&m)?;
            let lam = lambda_min(&mh)?;
            best_lambda = best_lambda.max(lam);
            if lam >= prob.delta - ACCEPT_SLACK {
                let bt = project_affine(&m, &prob.offdiag, &prob.target_sum)?;
                let cert = certificate_from(
                    bt.diag().to_vec(),
                    &prob.offdiag,
                    &prob.target_sum,
                    it + 1,
                )?;
                return Ok(CompletionOutcome::Feasible(cert));
            }
            return Ok(CompletionOutcome::Infeasible(InfeasibleReport {
                iterations: it + 1,
                best_lambda_min: best_lambda,
                cone_residual: cone_res,
                affine_residual: aff_res,
            }));
        }
    }

    Ok(CompletionOutcome::Infeasible(InfeasibleReport {
        iterations: max_iter,
        best_lambda_min: best_lambda,
        cone_residual: cone_res,
        affine_residual: aff_res,
    }))
}

/// Recompute a certificate's invariants against the problem it claims to
/// solve.
pub fn validate_certificate(
    prob: &CompletionProblem,
    cert: &CompletionCertificate,
) -> Result<ValidationReport> {
    if cert.blocks.len() != prob.n_blocks() {
        return Err(Error::DimMismatch(format!(
            "certificate has {} blocks, problem needs {}",
            cert.blocks.len(),
            prob.n_blocks()
        )));
    }
    let p = prob.block_dim();
    for (j, b) in cert.blocks.iter().enumerate() {
        if b.dim() != p {
            return Err(Error::DimMismatch(format!(
                "certificate block {j} has dim {}, expected {p}",
                b.dim()
            )));
        }
    }
    let bt = tridiag_from_parts(&cert.blocks, &prob.offdiag)?;
    let lam = lambda_min(&bt.assemble())?;
    let mut sum = cert.blocks[0].clone();
    for b in &cert.blocks[1..] {
        sum = sum.add(b);
    }
    let sum_residual = sum.sub(&prob.target_sum).mat().frobenius_norm();
    let lambda_min_pass = lam >= prob.delta - LAMBDA_SLACK;
    let sum_pass = sum_residual <= SUM_TOL;
    Ok(ValidationReport {
        lambda_min_assembled: lam,
        sum_residual,
        lambda_min_pass,
        sum_pass,
        pass: lambda_min_pass && sum_pass,
    })
}

/// Result of the diagonal-sum norm minimization.
#[derive(Clone, Debug)]
pub struct MinSumResult {
    /// Least `t` (within tolerance) such that some completion with
    /// `sum A_j = t I` is strictly positive.
    pub t_star: f64,
    /// Certificate at the final feasible `t`; its `iterations` field
    /// counts the Newton steps of the certifying margin solve.
    pub certificate: CompletionCertificate,
    /// Bisection rounds performed.
    pub bisection_steps: usize,
}

/// Minimize `t` over strictly positive completions with `sum A_j = t I`,
/// by bisection on `t` with an interior-point maximal-margin oracle:
/// `t` counts as feasible when the maximal achievable margin exceeds
/// `1e-9`. The bracket starts at `[0, 2 sum_j ||X_j|| + 1]`; the upper
/// end is always feasible (the oracle margin there is at least `1/(2n)`
/// of the slack) and `t = 0` never is, because the diagonal blocks of a
/// strictly positive matrix have positive trace.
pub fn min_sum_norm(offdiag: &[CMat], tol: f64) -> Result<MinSumResult> {
    if offdiag.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one off-diagonal block".into(),
        ));
    }
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bisection tolerance must be finite and > 0, got {tol}"
        )));
    }
    let p = offdiag[0].rows();
    for (j, x) in offdiag.iter().enumerate() {
        if !x.is_square() || x.rows() != p {
            return Err(Error::DimMismatch(format!(
                "off-diagonal block {j} is {}x{}, expected {p}x{p}",
                x.rows(),
                x.cols()
            )));
        }
        if !x.is_finite() {
            return Err(Error::NonFiniteEntry);
        }
    }

    let mut norm_sum = 0.0;
    for x in offdiag {
        norm_sum += op_norm(x)?;
    }
    let mut lo = 0.0f64;
    let mut hi = 2.0 * norm_sum + BRACKET_SLACK;

    let solve = |t: f64| barrier::max_margin(offdiag, &HermMat::scaled_identity(p, t));
    let top = solve(hi)?;
    assert!(
        top.h >= DELTA_WORK,
        "bisection bracket must be feasible (margin {} at t = {hi})",
        top.h
    );

    let mut steps = 0usize;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if solve(mid)?.h >= DELTA_WORK {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }

    let fin = solve(hi)?;
    let certificate = certificate_from(
        fin.blocks,
        offdiag,
        &HermMat::scaled_identity(p, hi),
        fin.newton_steps,
    )?;
    Ok(MinSumResult { t_star: hi, certificate, bisection_steps: steps })
}

/// The 2x2 single-block certificate: Hermitian `a, b` with `a + b = I`
/// and `[[a, x], [x*, b]] >= 0`.
#[derive(Clone, Debug)]
pub struct BunceResult {
    pub a: HermMat,
    pub b: HermMat,
    /// Depth of the truncated recursion that produced `a`.
    pub truncation: usize,
    /// `|| a_N - a_{N-1} ||_F`, the movement in the final recursion step.
    pub tail_change: f64,
}

/// Smallest eigenvalue of the depth-`n` tridiagonal Toeplitz matrix with
/// identity diagonal and `x` above it (diagnostic for pivot failures).
fn toeplitz_lambda_min(x: &CMat, n: usize) -> Result<f64> {
    let p = x.rows();
    let eye = HermMat::scaled_identity(p, 1.0);
    let bt = BlockTridiag::new(vec![eye; n], vec![x.clone(); n - 1])?;
    lambda_min(&bt.assemble())
}

/// Build `a, b` as the truncated limit of the descending Schur pivots of
/// the deep tridiagonal Toeplitz matrix: `d_1 = I`,
/// `d_k = I - x* d_{k-1}^{-1} x`, then `a = d_N` and `b = I - a`. At the
/// fixed point `b = x* a^{-1} x` exactly, which is the boundary case of
/// the Schur criterion for `[[a, x], [x*, b]] >= 0`; at depth `N` the
/// Schur gap equals `d_{N+1} - d_N`, so the assembly is positive up to
/// the reported tail change. The pivots stay strictly positive whenever
/// the numerical radius of `x` is below `1/2` (enforced by the caller); a
/// nonpositive pivot aborts with the smallest eigenvalue of the depth-`N`
/// Toeplitz matrix as evidence (or of the failing pivot itself when that
/// matrix would exceed the dimension cap).
pub fn bunce_certificate(x: &CMat, truncation: usize) -> Result<BunceResult> {
    if !x.is_square() {
        return Err(Error::DimMismatch(format!(
            "certificate needs a square block, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFiniteEntry);
    }
    if truncation < 2 {
        return Err(Error::InvalidParameter(format!(
            "truncation must be >= 2, got {truncation}"
        )));
    }
    let p = x.rows();
    let eye = CMat::identity(p);
    let xadj = x.adjoint();
    let evidence = |pivot_lambda: f64| -> Result<Error> {
        let lam = if truncation * p <= DIM_CAP {
            toeplitz_lambda_min(x, truncation)?
        } else {
            pivot_lambda
        };
        Ok(Error::NotStrictlyPositive { lambda_min: lam })
    };

    let mut d = HermMat::scaled_identity(p, 1.0);
    let mut prev = d.clone();
    for k in 2..=truncation {
        let spec = herm_eig(&d)?;
        if spec.eigenvalues[0] <= PIVOT_FLOOR {
            return Err(evidence(spec.eigenvalues[0])?);
        }
        // Spectral inverse of the previous pivot.
        let v = &spec.eigenvectors;
        let mut scaled = v.clone();
        for c in 0..p {
            let f = 1.0 / spec.eigenvalues[c];
            for r in 0..p {
                let cur = scaled[(r, c)];
                scaled[(r, c)] = cur.scale(f);
            }
        }
        let dinv = scaled.mul(&v.adjoint());
        let next = HermMat::hermitian_part(&eye.sub(&xadj.mul(&dinv.mul(x))))?;
        if k == truncation {
            prev = d.clone();
        }
        d = next;
    }
    let final_lambda = lambda_min(&d)?;
    if final_lambda <= PIVOT_FLOOR {
        return Err(evidence(final_lambda)?);
    }

    let a = d;
    let tail_change = a.sub(&prev).mat().frobenius_norm();
    // Entrywise subtraction: diagonal entries of `a` lie in [0, 1], so
    // (1 - a_ii) + a_ii rounds back to exactly 1 and a + b = I exactly.
    let b = HermMat::scaled_identity(p, 1.0).sub(&a);
    Ok(BunceResult { a, b, truncation, tail_change })
}

/// Two routes to the same strict-positivity verdict for the three-block
/// tridiagonal matrix with identity diagonal.
#[derive(Clone, Debug)]
pub struct Lemma63Report {
    /// `lambda_min of [[I, x1, 0], [x1*, I, x2], [0, x2*, I]] >= delta`.
    pub via_matrix: bool,
    /// `lambda_min of I - x1* x1 - x2 x2* >= delta`.
    pub via_row: bool,
    pub matrix_lambda_min: f64,
    pub row_lambda_min: f64,
}

/// Evaluate both sides of the tridiagonal/row equivalence at margin
/// `delta`. The verdicts agree whenever both margins are comfortably away
/// from the boundary (beyond `1e-6`).
pub fn lemma63_check(x1: &CMat, x2: &CMat, delta: f64) -> Result<Lemma63Report> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "strictness margin must be finite and >= 0, got {delta}"
        )));
    }
    let p = x1.rows();
    if !x1.is_square() || !x2.is_square() || x2.rows() != p {
        return Err(Error::DimMismatch(format!(
            "both blocks must be square of a common dim, got {}x{} and {}x{}",
            x1.rows(),
            x1.cols(),
            x2.rows(),
            x2.cols()
        )));
    }
    if !x1.is_finite() || !x2.is_finite() {
        return Err(Error::NonFiniteEntry);
    }
    let eye = HermMat::scaled_identity(p, 1.0);
    let bt = BlockTridiag::new(vec![eye.clone(); 3], vec![x1.clone(), x2.clone()])?;
    let matrix_lambda_min = lambda_min(&bt.assemble())?;

    let row_gram = eye
        .into_mat()
        .sub(&x1.adjoint().mul(x1))
        .sub(&x2.mul(&x2.adjoint()));
    let row_lambda_min = lambda_min(&HermMat::hermitian_part(&row_gram)?)?;

    Ok(Lemma63Report {
        via_matrix: matrix_lambda_min >= delta,
        via_row: row_lambda_min >= delta,
        matrix_lambda_min,
        row_lambda_min,
    })
}

/// The row-contraction reformulation of three-block tridiagonal strict
/// positivity with prescribed strictly positive diagonal `A, B, C`.
#[derive(Clone, Debug)]
pub struct RowFormReport {
    /// `|| [ B^{-1/2} X1 A^{-1/2}, B^{-1/2} X2 C^{-1/2} ] ||`.
    pub row_norm: f64,
    /// Strict positivity of the tridiagonal assembly with diagonal
    /// `(A, B, C)` and off-diagonal `(X1*, X2)`.
    pub equivalent_matrix_strict: bool,
    pub matrix_lambda_min: f64,
}

/// Compute the contraction row and the matrix-side verdict. Requires
/// `A, B, C >= delta I` with `delta > 0` and `A + B + C = I` (Frobenius
/// residual at most `1e-9`). `row_norm < 1` holds exactly when the
/// assembled matrix is strictly positive; the boolean verdicts agree
/// whenever both margins exceed `1e-6`.
pub fn row_contraction_form(
    a: &HermMat,
    b: &HermMat,
    c: &HermMat,
    x1: &CMat,
    x2: &CMat,
    delta: f64,
) -> Result<RowFormReport> {
    if delta <= 0.0 || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "strictness margin must be finite and > 0, got {delta}"
        )));
    }
    let p = a.dim();
    if b.dim() != p || c.dim() != p {
        return Err(Error::DimMismatch(format!(
            "diagonal blocks must share a dimension, got {p}, {}, {}",
            b.dim(),
            c.dim()
        )));
    }
    for (name, x) in [("X1", x1), ("X2", x2)] {
        if !x.is_square() || x.rows() != p {
            return Err(Error::DimMismatch(format!(
                "{name} is {}x{}, expected {p}x{p}",
                x.rows(),
                x.cols()
            )));
        }
        if !x.is_finite() {
            return Err(Error::NonFiniteEntry);
        }
    }
    for m in [a, b, c] {
        let lam = lambda_min(m)?;
        if lam < delta {
            return Err(Error::NotStrictlyPositive { lambda_min: lam });
        }
    }
    let mut sum = a.add(b).add(c).into_mat();
    for i in 0..p {
        let cur = sum[(i, i)];
        sum[(i, i)] = cur - num_complex::Complex64::ONE;
    }
    let sum_residual = sum.frobenius_norm();
    if sum_residual > SUM_TOL {
        return Err(Error::InvalidParameter(format!(
            "A + B + C must equal the identity (residual {sum_residual:.3e})"
        )));
    }

    let ai = inv_sqrt(a, delta)?;
    let bi = inv_sqrt(b, delta)?;
    let ci = inv_sqrt(c, delta)?;
    let left = bi.mat().mul(&x1.mul(ai.mat()));
    let right = bi.mat().mul(&x2.mul(ci.mat()));
    let mut row = CMat::zeros(p, 2 * p);
    row.set_block(0, 0, &left);
    row.set_block(0, p, &right);
    let row_norm = op_norm(&row)?;

    let bt = BlockTridiag::new(
        vec![a.clone(), b.clone(), c.clone()],
        vec![x1.adjoint(), x2.clone()],
    )?;
    let matrix_lambda_min = lambda_min(&bt.assemble())?;

    Ok(RowFormReport {
        row_norm,
        equivalent_matrix_strict: matrix_lambda_min >= DEFAULT_MARGIN,
        matrix_lambda_min,
    })
}

/// Two-sided estimate of the free joint numerical radius: the sampling
/// lower bound together with the exact upper bound `t_star / 2` from the
/// diagonal-sum minimization.
pub fn free_radius_estimate(
    xs: &[CMat],
    unitary_dim: usize,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<FreeRadiusEstimate> {
    let mut est = free_radius_lower_bound(xs, unitary_dim, samples, seed)?;
    let ms = min_sum_norm(xs, tol)?;
    est.upper = Some(ms.t_star / 2.0);
    Ok(est)
}
