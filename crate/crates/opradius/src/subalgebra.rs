//! Unital *-subalgebras of the `d x d` complex matrices, the
//! trace-preserving conditional expectation onto them, and the transfer
//! of strictly positive block-tridiagonal completions from the ambient
//! algebra into the subalgebra.
//!
//! A subalgebra is carried as an orthonormal basis under the normalized
//! Hilbert-Schmidt inner product `<a, b> = tr(a* b) / d`. The conditional
//! expectation is the orthogonal projection onto the span; because the
//! span is a unital *-subalgebra, that projection is unital, positive,
//! trace-preserving, a bimodule map, and completely positive. Applying it
//! entrywise to the diagonal blocks of a strictly positive completion
//! (whose off-diagonal data already lies in the subalgebra) yields a
//! completion inside the subalgebra with the same positivity margin.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::completion::{BlockTridiag, CompletionCertificate, CompletionProblem};
use crate::error::{Error, Result};
use crate::linalg::{lambda_min, CMat, HermMat};
use crate::numrad::gaussian_matrix;

/// Residual below which a Gram-Schmidt candidate counts as dependent.
const DROP_TOL: f64 = 1e-10;
/// Relative membership tolerance for off-diagonal data.
const MEMBERSHIP_TOL: f64 = 1e-9;
/// Transferred completions may undershoot the margin by this much.
const LAMBDA_SLACK: f64 = 1e-7;
/// Tolerances for the basis self-checks.
const SPAN_TOL: f64 = 1e-10;
const PRODUCT_TOL: f64 = 1e-9;
/// Complete-positivity spot checks tolerate eigenvalues down to this.
const CP_FLOOR: f64 = -1e-9;

/// Orthonormal basis (normalized Hilbert-Schmidt) of a unital
/// *-subalgebra of the `d x d` matrices.
#[derive(Clone, Debug)]
pub struct StarAlgebraBasis {
    ambient_dim: usize,
    basis: Vec<CMat>,
}

fn hs_inner(a: &CMat, b: &CMat, d: usize) -> Complex64 {
    let mut acc = Complex64::ZERO;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    acc.scale(1.0 / d as f64)
}

fn hs_norm(a: &CMat, d: usize) -> f64 {
    hs_inner(a, a, d).re.max(0.0).sqrt()
}

impl StarAlgebraBasis {
    /// Wrap a caller-supplied basis without any checks. Intended for
    /// adversarial inputs in tests (e.g. spans that are not *-closed);
    /// everything built on a raw basis is only as good as that basis.
    pub fn from_raw_parts(ambient_dim: usize, basis: Vec<CMat>) -> Self {
        StarAlgebraBasis { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Linear dimension of the subalgebra.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Orthogonal projection onto the span: for a genuine basis this is
    /// the trace-preserving conditional expectation.
    pub fn expect(&self, m: &CMat) -> Result<CMat> {
        let d = self.ambient_dim;
        if m.rows() != d || m.cols() != d {
            return Err(Error::DimMismatch(format!(
                "expectation input is {}x{}, ambient dim is {d}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFiniteEntry);
        }
        let mut out = CMat::zeros(d, d);
        for b in &self.basis {
            let coef = hs_inner(b, m, d);
            if coef == Complex64::ZERO {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    let cur = out[(i, j)];
                    out[(i, j)] = cur + coef * b[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// `|| M - E(M) ||_F`, the distance witnessing (non-)membership.
    pub fn membership_residual(&self, m: &CMat) -> Result<f64> {
        Ok(m.sub(&self.expect(m)?).frobenius_norm())
    }

    /// Re-derive the structural invariants: the identity lies in the
    /// span, the span is closed under adjoints and products, and the
    /// basis is orthonormal.
    pub fn verify(&self) -> Result<()> {
        let d = self.ambient_dim;
        let eye = CMat::identity(d);
        let id_res = self.membership_residual(&eye)?;
        if id_res > SPAN_TOL {
            return Err(Error::InvalidParameter(format!(
                "identity is not in the span (residual {id_res:.3e})"
            )));
        }
        for (k, b) in self.basis.iter().enumerate() {
            let adj_res = self.membership_residual(&b.adjoint())?;
            if adj_res > SPAN_TOL {
                return Err(Error::InvalidParameter(format!(
                    "span is not *-closed at basis element {k} (residual {adj_res:.3e})"
                )));
            }
        }
        for (i, bi) in self.basis.iter().enumerate() {
            for (j, bj) in self.basis.iter().enumerate() {
                let prod_res = self.membership_residual(&bi.mul(bj))?;
                if prod_res > PRODUCT_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "span is not product-closed at ({i}, {j}) (residual {prod_res:.3e})"
                    )));
                }
            }
        }
        for (i, bi) in self.basis.iter().enumerate() {
            for (j, bj) in self.basis.iter().enumerate() {
                let g = hs_inner(bi, bj, d);
                let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
                if (g - want).norm() > SPAN_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "basis is not orthonormal at ({i}, {j}): {g}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Project `c` onto the orthocomplement of `basis` (two passes for
/// numerical orthogonality) and append it normalized unless dependent.
fn absorb(basis: &mut Vec<CMat>, c: &CMat, d: usize) -> bool {
    let scale = hs_norm(c, d);
    if scale <= 1e-14 {
        return false;
    }
    let mut r = c.scale(Complex64::ONE.scale(1.0 / scale));
    for _ in 0..2 {
        for b in basis.iter() {
            let coef = hs_inner(b, &r, d);
            if coef == Complex64::ZERO {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    let cur = r[(i, j)];
                    r[(i, j)] = cur - coef * b[(i, j)];
                }
            }
        }
    }
    let norm = hs_norm(&r, d);
    if norm <= DROP_TOL {
        return false;
    }
    basis.push(r.scale(Complex64::ONE.scale(1.0 / norm)));
    true
}

/// Orthonormal basis of the unital *-algebra generated by `generators`
/// inside the `ambient_dim x ambient_dim` matrices: seed the span with
/// the identity, the generators, and their adjoints, then close under
/// products until stable. The linear dimension is at most
/// `ambient_dim^2`, which bounds the closure loop.
pub fn build_algebra(ambient_dim: usize, generators: &[CMat]) -> Result<StarAlgebraBasis> {
    if ambient_dim == 0 {
        return Err(Error::EmptyMatrix);
    }
    let d = ambient_dim;
    for (k, g) in generators.iter().enumerate() {
        if g.rows() != d || g.cols() != d {
            return Err(Error::DimMismatch(format!(
                "generator {k} is {}x{}, ambient dim is {d}",
                g.rows(),
                g.cols()
            )));
        }
        if !g.is_finite() {
            return Err(Error::NonFiniteEntry);
        }
    }

    let mut basis: Vec<CMat> = Vec::new();
    absorb(&mut basis, &CMat::identity(d), d);
    for g in generators {
        absorb(&mut basis, g, d);
        absorb(&mut basis, &g.adjoint(), d);
    }

    loop {
        let len = basis.len();
        let mut grew = false;
        for i in 0..len {
            for j in 0..len {
                let prod = basis[i].mul(&basis[j]);
                if absorb(&mut basis, &prod, d) {
                    grew = true;
                }
            }
        }
        assert!(
            basis.len() <= d * d,
            "algebra closure exceeded the ambient dimension bound"
        );
        if !grew {
            break;
        }
    }

    let alg = StarAlgebraBasis { ambient_dim: d, basis };
    alg.verify()?;
    Ok(alg)
}

/// Apply the expectation to every `d x d` sub-block of a `(p d) x (p d)`
/// matrix (the level-`p` amplification `id_p (x) E`).
pub fn expect_blockwise(alg: &StarAlgebraBasis, m: &CMat, p: usize) -> Result<CMat> {
    let d = alg.ambient_dim();
    if m.rows() != p * d || m.cols() != p * d {
        return Err(Error::DimMismatch(format!(
            "blockwise expectation input is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            p * d,
            p * d
        )));
    }
    let mut out = CMat::zeros(p * d, p * d);
    for i in 0..p {
        for j in 0..p {
            let sub = m.block(i * d, j * d, d, d);
            out.set_block(i * d, j * d, &alg.expect(&sub)?);
        }
    }
    Ok(out)
}

/// Outcome of transferring an ambient completion into the subalgebra.
#[derive(Clone, Debug)]
pub struct TransferReport {
    /// Margin of the ambient completion (recomputed).
    pub original_lambda_min: f64,
    /// Diagonal blocks after the blockwise expectation.
    pub transferred_blocks: Vec<HermMat>,
    /// Margin of the transferred completion.
    pub transferred_lambda_min: f64,
    /// `|| X_j - E(X_j) ||_F` for each off-diagonal block.
    pub membership_residuals: Vec<f64>,
    /// `|| sum of transferred blocks - target ||_F`.
    pub sum_residual: f64,
}

/// Transfer a feasible ambient completion into the subalgebra by
/// applying the blockwise conditional expectation to its diagonal
/// blocks.
///
/// The off-diagonal data must already lie in (matrices over) the
/// subalgebra — membership is checked to relative tolerance `1e-9` and
/// violations abort with the offending index. The ambient completion's
/// margin is recomputed and must clear `delta - 1e-7`. Since the
/// amplified expectation is unital and completely positive and fixes the
/// off-diagonal blocks, the transferred completion keeps the margin; the
/// report carries both margins so a verifier can see it.
pub fn wep_transfer(
    alg: &StarAlgebraBasis,
    prob: &CompletionProblem,
    cert: &CompletionCertificate,
) -> Result<TransferReport> {
    let d = alg.ambient_dim();
    let big = prob.block_dim();
    if big == 0 || !big.is_multiple_of(d) {
        return Err(Error::DimMismatch(format!(
            "problem blocks are {big}x{big}, not a multiple of the ambient dim {d}"
        )));
    }
    let p = big / d;
    if cert.blocks.len() != prob.n_blocks() {
        return Err(Error::DimMismatch(format!(
            "certificate has {} blocks, problem needs {}",
            cert.blocks.len(),
            prob.n_blocks()
        )));
    }
    for (j, b) in cert.blocks.iter().enumerate() {
        if b.dim() != big {
            return Err(Error::DimMismatch(format!(
                "certificate block {j} has dim {}, expected {big}",
                b.dim()
            )));
        }
    }

    let mut membership_residuals = Vec::with_capacity(prob.offdiag().len());
    for (j, x) in prob.offdiag().iter().enumerate() {
        let residual = x.sub(&expect_blockwise(alg, x, p)?).frobenius_norm();
        if residual > MEMBERSHIP_TOL * (1.0 + x.frobenius_norm()) {
            return Err(Error::MembershipViolation { index: j, residual });
        }
        membership_residuals.push(residual);
    }

    let ambient = BlockTridiag::new(cert.blocks.clone(), prob.offdiag().to_vec())?;
    let original_lambda_min = lambda_min(&ambient.assemble())?;
    if original_lambda_min < prob.delta() - LAMBDA_SLACK {
        return Err(Error::NotStrictlyPositive { lambda_min: original_lambda_min });
    }

    let transferred_blocks: Vec<HermMat> = cert
        .blocks
        .iter()
        .map(|b| {
            let e = expect_blockwise(alg, b.mat(), p)?;
            HermMat::hermitian_part(&e)
        })
        .collect::<Result<Vec<_>>>()?;

    let transferred =
        BlockTridiag::new(transferred_blocks.clone(), prob.offdiag().to_vec())?;
    let transferred_lambda_min = lambda_min(&transferred.assemble())?;

    let mut sum = transferred_blocks[0].clone();
    for b in &transferred_blocks[1..] {
        sum = sum.add(b);
    }
    let sum_residual = sum.sub(prob.target_sum()).mat().frobenius_norm();

    Ok(TransferReport {
        original_lambda_min,
        transferred_blocks,
        transferred_lambda_min,
        membership_residuals,
        sum_residual,
    })
}

/// Result of the complete-positivity spot check.
#[derive(Clone, Debug)]
pub struct CpReport {
    /// Whether every amplified expectation of a PSD input stayed PSD
    /// (eigenvalues above `-1e-9`).
    pub pass: bool,
    /// Amplification level checked.
    pub level: usize,
    pub trials: usize,
    /// Smallest eigenvalue seen across all trials.
    pub worst_lambda_min: f64,
}

/// Randomized check that `id_level (x) E` maps positive semidefinite
/// matrices to positive semidefinite matrices: normalized Wishart inputs
/// `G* G / ||G* G||` at dimension `level * d`, seeded per trial. A
/// genuine conditional expectation passes at every level; a projection
/// onto a span that is not a *-subalgebra is allowed to fail.
pub fn cp_spot_check(
    alg: &StarAlgebraBasis,
    level: usize,
    trials: usize,
    seed: u64,
) -> Result<CpReport> {
    if !(1..=3).contains(&level) {
        return Err(Error::InvalidParameter(format!(
            "spot-check level must be 1, 2, or 3, got {level}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let d = alg.ambient_dim();
    let n = level * d;
    let mut worst = f64::INFINITY;
    for t in 0..trials {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(1 + t as u64);
        let g = gaussian_matrix(n, n, &mut rng);
        let wish = g.adjoint().mul(&g);
        let top = crate::linalg::op_norm(&wish)?.max(1e-12);
        let psd = wish.scale(Complex64::ONE.scale(1.0 / top));
        let mapped = expect_blockwise(alg, &psd, level)?;
        let lam = lambda_min(&HermMat::hermitian_part(&mapped)?)?;
        worst = worst.min(lam);
    }
    Ok(CpReport {
        pass: worst >= CP_FLOOR,
        level,
        trials,
        worst_lambda_min: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{feasible_completion, CompletionOutcome};
    use crate::linalg::c64;
    use crate::numrad::gaussian_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {a} close to {b} (tol {tol})");
    }

    fn unit(d: usize, i: usize, j: usize) -> CMat {
        let mut m = CMat::zeros(d, d);
        m[(i, j)] = Complex64::ONE;
        m
    }

    fn diag(entries: &[f64]) -> CMat {
        let d = entries.len();
        let mut m = CMat::zeros(d, d);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = c64(x, 0.0);
        }
        m
    }

    #[test]
    fn scalar_algebra_is_one_dimensional() {
        let alg = build_algebra(4, &[]).unwrap();
        assert_eq!(alg.dim(), 1);
        // E is the normalized trace times the identity.
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = c64(2.0, 0.0);
        m[(1, 3)] = c64(5.0, -1.0);
        let e = alg.expect(&m).unwrap();
        for i in 0..4 {
            assert_close(e[(i, i)].re, 0.5, 1e-14);
        }
        assert_close(e[(1, 3)].norm(), 0.0, 1e-14);
    }

    #[test]
    fn diagonal_algebra_from_multiplicity_free_generator() {
        let alg = build_algebra(4, &[diag(&[1.0, 2.0, 3.0, 4.0])]).unwrap();
        assert_eq!(alg.dim(), 4);
        // E keeps the diagonal and kills the rest.
        let mut m = CMat::zeros(4, 4);
        m[(2, 2)] = c64(7.0, 0.0);
        m[(0, 1)] = c64(3.0, 4.0);
        let e = alg.expect(&m).unwrap();
        assert_close(e[(2, 2)].re, 7.0, 1e-12);
        assert_close(e[(0, 1)].norm(), 0.0, 1e-12);
    }

    #[test]
    fn matrix_unit_chain_generates_full_algebra() {
        let d = 3;
        let alg = build_algebra(d, &[unit(d, 0, 1), unit(d, 1, 2)]).unwrap();
        assert_eq!(alg.dim(), d * d);
        // E is the identity map on a full matrix algebra.
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let m = gaussian_matrix(d, d, &mut rng);
        let e = alg.expect(&m).unwrap();
        assert!(m.sub(&e).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn block_diag_algebra_dimension() {
        // e01 spans a 2x2 corner, e23 + e34 + e45 span a 4x4 corner.
        let d = 6;
        let alg = build_algebra(
            d,
            &[unit(d, 0, 1), unit(d, 2, 3), unit(d, 3, 4), unit(d, 4, 5)],
        )
        .unwrap();
        assert_eq!(alg.dim(), 4 + 16);
        // Cross-corner entries are not in the algebra.
        let res = alg.membership_residual(&unit(d, 0, 2)).unwrap();
        assert!(res > 0.9, "cross block should be orthogonal, residual {res}");
    }

    #[test]
    fn expectation_laws() {
        let d = 4;
        let algs = [
            build_algebra(d, &[]).unwrap(),
            build_algebra(d, &[diag(&[1.0, 2.0, 3.0, 4.0])]).unwrap(),
            build_algebra(d, &[unit(d, 0, 1)]).unwrap(),
        ];
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for alg in &algs {
            alg.verify().unwrap();
            for _ in 0..20 {
                let m = gaussian_matrix(d, d, &mut rng);
                let e = alg.expect(&m).unwrap();
                // Idempotence.
                assert!(alg.expect(&e).unwrap().sub(&e).frobenius_norm() <= 1e-10);
                // *-compatibility.
                let lhs = alg.expect(&m.adjoint()).unwrap();
                assert!(lhs.sub(&e.adjoint()).frobenius_norm() <= 1e-10);
                // Trace preservation.
                assert!((e.trace() - m.trace()).norm() <= 1e-9);
                // Bimodule property over algebra elements.
                let a = alg.expect(&gaussian_matrix(d, d, &mut rng)).unwrap();
                let b = alg.expect(&gaussian_matrix(d, d, &mut rng)).unwrap();
                let lhs = alg.expect(&a.mul(&m.mul(&b))).unwrap();
                let rhs = a.mul(&e.mul(&b));
                assert!(
                    lhs.sub(&rhs).frobenius_norm() <= 1e-8,
                    "bimodule residual {}",
                    lhs.sub(&rhs).frobenius_norm()
                );
            }
            // Unitality.
            let eye = CMat::identity(d);
            assert!(alg.expect(&eye).unwrap().sub(&eye).frobenius_norm() <= 1e-10);
        }
    }

    #[test]
    fn cp_spot_checks_pass_for_genuine_algebras() {
        let d = 4;
        let algs = [
            build_algebra(d, &[]).unwrap(),
            build_algebra(d, &[diag(&[1.0, 2.0, 3.0, 4.0])]).unwrap(),
            build_algebra(d, &[unit(d, 0, 1), unit(d, 2, 3)]).unwrap(),
        ];
        for alg in &algs {
            for level in 1..=3 {
                let rep = cp_spot_check(alg, level, 25, 7).unwrap();
                assert!(
                    rep.pass,
                    "level {level} failed: worst {}",
                    rep.worst_lambda_min
                );
            }
        }
    }

    #[test]
    fn cp_spot_check_can_fail_for_non_star_span() {
        // span{e01, e10} is not unital and not an algebra; the projection
        // onto it is not positive, and the check is allowed to say so.
        let d = 2;
        let raw = StarAlgebraBasis::from_raw_parts(
            d,
            vec![
                unit(d, 0, 1).scale(c64((d as f64).sqrt(), 0.0)),
                unit(d, 1, 0).scale(c64((d as f64).sqrt(), 0.0)),
            ],
        );
        assert!(raw.verify().is_err());
        let rep = cp_spot_check(&raw, 1, 10, 5).unwrap();
        assert!(!rep.pass, "projection onto a non-algebra should fail: {rep:?}");
    }

    #[test]
    fn cp_spot_check_validates_parameters() {
        let alg = build_algebra(2, &[]).unwrap();
        assert!(cp_spot_check(&alg, 0, 5, 1).is_err());
        assert!(cp_spot_check(&alg, 4, 5, 1).is_err());
        assert!(cp_spot_check(&alg, 1, 0, 1).is_err());
    }

    /// An in-algebra off-diagonal tuple small enough that the projection
    /// solver certifies quickly, with the certificate blocks then pushed
    /// off the subalgebra by a zero-sum ambient Hermitian perturbation
    /// (small enough to keep the margin), so the transfer has real work
    /// to do.
    fn transfer_fixture(
        alg: &StarAlgebraBasis,
        p: usize,
        seed: u64,
    ) -> (CompletionProblem, CompletionCertificate) {
        let d = alg.ambient_dim();
        let big = p * d;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let offs: Vec<CMat> = (0..2)
            .map(|_| {
                let raw = gaussian_matrix(big, big, &mut rng);
                let proj = expect_blockwise(alg, &raw, p).unwrap();
                let norm = crate::linalg::op_norm(&proj).unwrap().max(1e-12);
                proj.scale(c64(0.07 / norm, 0.0))
            })
            .collect();
        let prob = CompletionProblem::with_identity_sum(offs, 1e-4).unwrap();
        let cert = match feasible_completion(&prob, 10_000).unwrap() {
            CompletionOutcome::Feasible(c) => c,
            CompletionOutcome::Infeasible(r) => panic!("fixture infeasible: {r:?}"),
        };

        let ambient_herm = |rng: &mut ChaCha12Rng| {
            let raw = HermMat::hermitian_part(&gaussian_matrix(big, big, rng)).unwrap();
            let norm = crate::linalg::op_norm(raw.mat()).unwrap().max(1e-12);
            raw.scale(0.01 / norm)
        };
        let c1 = ambient_herm(&mut rng);
        let c2 = ambient_herm(&mut rng);
        let c3 = c1.add(&c2).scale(-1.0);
        let blocks = vec![
            cert.blocks[0].add(&c1),
            cert.blocks[1].add(&c2),
            cert.blocks[2].add(&c3),
        ];
        (prob, CompletionCertificate { blocks, ..cert })
    }

    #[test]
    fn transfer_keeps_margin_and_membership() {
        let d = 4;
        let alg = build_algebra(d, &[diag(&[1.0, 2.0, 3.0, 4.0])]).unwrap();
        for p in [1usize, 2] {
            let (prob, cert) = transfer_fixture(&alg, p, 100 + p as u64);
            // The fixture's ambient blocks genuinely leave the subalgebra.
            let off_span: f64 = cert
                .blocks
                .iter()
                .map(|b| {
                    let e = expect_blockwise(&alg, b.mat(), p).unwrap();
                    e.sub(b.mat()).frobenius_norm()
                })
                .sum();
            assert!(off_span > 1e-4, "perturbation should be visible, got {off_span}");

            let rep = wep_transfer(&alg, &prob, &cert).unwrap();
            assert!(
                rep.transferred_lambda_min >= prob.delta() - 1e-7,
                "p={p}: transferred margin {}",
                rep.transferred_lambda_min
            );
            assert!(rep.sum_residual <= 1e-9, "p={p}: sum residual {}", rep.sum_residual);
            for r in &rep.membership_residuals {
                assert!(*r <= 1e-9);
            }
            // Transferred blocks are genuinely in M_p(algebra).
            for b in &rep.transferred_blocks {
                let back = expect_blockwise(&alg, b.mat(), p).unwrap();
                assert!(back.sub(b.mat()).frobenius_norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn transfer_rejects_foreign_offdiagonal() {
        let d = 3;
        let alg = build_algebra(d, &[]).unwrap(); // scalars only
        let mut off = CMat::zeros(d, d);
        off[(0, 1)] = c64(0.2, 0.0); // not a scalar multiple of I
        let prob = CompletionProblem::with_identity_sum(vec![off], 1e-6).unwrap();
        let cert = CompletionCertificate {
            blocks: vec![
                HermMat::scaled_identity(d, 0.5),
                HermMat::scaled_identity(d, 0.5),
            ],
            lambda_min_assembled: 0.0,
            sum_residual: 0.0,
            iterations: 0,
        };
        match wep_transfer(&alg, &prob, &cert) {
            Err(Error::MembershipViolation { index, residual }) => {
                assert_eq!(index, 0);
                assert!(residual > 0.1);
            }
            other => panic!("expected MembershipViolation, got {other:?}"),
        }
    }

    #[test]
    fn transfer_rejects_infeasible_ambient() {
        let d = 2;
        let alg = build_algebra(d, &[]).unwrap();
        let off = CMat::identity(d).scale(c64(0.6, 0.0));
        let prob = CompletionProblem::with_identity_sum(vec![off], 1e-6).unwrap();
        // The even split is not a feasible certificate for |x| = 0.6.
        let cert = CompletionCertificate {
            blocks: vec![
                HermMat::scaled_identity(d, 0.5),
                HermMat::scaled_identity(d, 0.5),
            ],
            lambda_min_assembled: -0.1,
            sum_residual: 0.0,
            iterations: 0,
        };
        assert!(matches!(
            wep_transfer(&alg, &prob, &cert),
            Err(Error::NotStrictlyPositive { .. })
        ));
    }

    #[test]
    fn blockwise_expectation_shape_checks() {
        let alg = build_algebra(3, &[]).unwrap();
        assert!(expect_blockwise(&alg, &CMat::zeros(6, 6), 2).is_ok());
        assert!(expect_blockwise(&alg, &CMat::zeros(5, 5), 2).is_err());
        assert!(wep_transfer(
            &alg,
            &CompletionProblem::with_identity_sum(vec![CMat::zeros(4, 4)], 0.0).unwrap(),
            &CompletionCertificate {
                blocks: vec![HermMat::scaled_identity(4, 0.5); 2],
                lambda_min_assembled: 0.0,
                sum_residual: 0.0,
                iterations: 0,
            },
        )
        .is_err());
    }
}
