//! Numerical radius, the unit-circle strict-positivity test, Haar-unitary
//! sampling, and sampling lower bounds for the free joint numerical radius.
//!
//! The radius is computed from the classical identity
//! `w(X) = max_theta lambda_max(Re(e^{i theta} X))`, where
//! `Re(e^{i theta} X) = cos(theta) H - sin(theta) G` for the Cartesian
//! decomposition `X = H + iG`. The maximization runs on a uniform
//! 1024-point grid followed by golden-section refinement of the leading
//! local-max brackets.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c64, eigvals_herm, CMat, HermMat};

/// Grid density for the angular sweeps.
pub const THETA_GRID: usize = 1024;
/// Golden-section brackets are narrowed below this width.
const REFINE_TOL: f64 = 1e-12;
/// Number of leading local-extremum brackets refined after the grid pass.
const REFINE_BRACKETS: usize = 8;
/// Points per variable in the deterministic phase-tuple grid.
const PHASE_GRID: usize = 8;
/// Cap on the number of deterministic phase tuples.
const PHASE_TUPLE_CAP: usize = 64;

/// Result of a numerical-radius computation.
#[derive(Clone, Debug)]
pub struct RadiusResult {
    /// The radius `w(X) >= 0`.
    pub value: f64,
    /// Angle in `[0, 2*pi)` at which the rotated Hermitian part attains it.
    pub argmax_theta: f64,
    /// Size of the angular grid that seeded the search.
    pub grid_points: usize,
    /// Whether golden-section refinement improved on the best grid point.
    pub refined: bool,
}

/// Result of the unit-circle strict-positivity sweep.
#[derive(Clone, Debug)]
pub struct CircleReport {
    /// Whether `I + e^{i theta} x + e^{-i theta} x*` stays `>= delta` on the
    /// whole circle.
    pub holds: bool,
    /// Angle minimizing the smallest eigenvalue.
    pub worst_theta: f64,
    /// The minimal smallest eigenvalue over the circle.
    pub worst_lambda_min: f64,
}

/// Sampling estimate for the free joint numerical radius.
///
/// `lower` is exact-by-construction as a lower bound: it is the maximum of
/// genuine radius evaluations. `upper`, when present, comes from the
/// diagonal-sum optimization in the completion module (`t_star / 2`);
/// `lower <= upper + 1e-8` whenever both are present.
#[derive(Clone, Debug)]
pub struct FreeRadiusEstimate {
    pub lower: f64,
    pub upper: Option<f64>,
    /// The unitary tuple attaining `lower`.
    pub witness_unitaries: Vec<CMat>,
    /// Dimension of the sampled unitaries.
    pub witness_dim: usize,
    /// Number of Haar samples evaluated (deterministic tuples not counted).
    pub samples_used: usize,
    /// RNG seed the Haar samples were drawn from.
    pub seed: u64,
}

/// Cartesian decomposition of a square matrix, cached for angular sweeps.
pub(crate) struct RotatedParts {
    h: HermMat,
    g: HermMat,
}

impl RotatedParts {
    pub(crate) fn new(x: &CMat) -> Result<Self> {
        if !x.is_square() {
            return Err(Error::DimMismatch(format!(
                "numerical radius needs a square matrix, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let h = HermMat::hermitian_part(x)?;
        // G = (X - X*) / (2i); Hermitian because (X - X*) is skew-Hermitian.
        let skew = x.sub(&x.adjoint()).scale(c64(0.0, -0.5));
        let g = HermMat::hermitian_part(&skew)?;
        Ok(RotatedParts { h, g })
    }

    /// `Re(e^{i theta} X) = cos(theta) H - sin(theta) G`.
    pub(crate) fn rotated(&self, theta: f64) -> HermMat {
        HermMat::combine(theta.cos(), &self.h, -theta.sin(), &self.g)
    }

    fn support(&self, theta: f64) -> Result<f64> {
        let m = self.rotated(theta);
        let vals = eigvals_herm(m.mat())?;
        Ok(*vals.last().expect("nonempty spectrum"))
    }
}

/// Grid sweep plus golden-section refinement of the leading local-max
/// brackets. Returns `(argmax, max, improved_by_refinement)`.
fn grid_refine_max<F: Fn(f64) -> Result<f64>>(f: F) -> Result<(f64, f64, bool)> {
    let step = 2.0 * std::f64::consts::PI / THETA_GRID as f64;
    let mut values = Vec::with_capacity(THETA_GRID);
    for k in 0..THETA_GRID {
        values.push(f(k as f64 * step)?);
    }
    let mut best_k = 0usize;
    for k in 1..THETA_GRID {
        if values[k] > values[best_k] {
            best_k = k;
        }
    }
    let grid_best = values[best_k];

    // Local maxima on the circular grid, strongest first (stable order).
    let mut candidates: Vec<usize> = (0..THETA_GRID)
        .filter(|&k| {
            let prev = values[(k + THETA_GRID - 1) % THETA_GRID];
            let next = values[(k + 1) % THETA_GRID];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    candidates.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite values"));
    candidates.truncate(REFINE_BRACKETS);

    let mut best_theta = best_k as f64 * step;
    let mut best_val = grid_best;
    let ratio = (5.0f64.sqrt() - 1.0) / 2.0;
    for &k in &candidates {
        let mut a = (k as f64 - 1.0) * step;
        let mut b = (k as f64 + 1.0) * step;
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let mut fc = f(c)?;
        let mut fd = f(d)?;
        while b - a > REFINE_TOL {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = f(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = f(d)?;
            }
            let (t, v) = if fc >= fd { (c, fc) } else { (d, fd) };
            if v > best_val {
                best_val = v;
                best_theta = t;
            }
        }
    }
    let improved = best_val > grid_best;
    let tau = 2.0 * std::f64::consts::PI;
    Ok((best_theta.rem_euclid(tau), best_val, improved))
}

/// Numerical radius `w(X)` of a square matrix.
pub fn numerical_radius(x: &CMat) -> Result<RadiusResult> {
    let parts = RotatedParts::new(x)?;
    let (argmax_theta, value, refined) = grid_refine_max(|t| parts.support(t))?;
    Ok(RadiusResult { value, argmax_theta, grid_points: THETA_GRID, refined })
}

/// Sweep of `lambda_min(I + e^{i theta} x + e^{-i theta} x*)` over the unit
/// circle; `holds` iff the minimum stays `>= delta`.
pub fn circle_check(x: &CMat, delta: f64) -> Result<CircleReport> {
    if !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("circle margin must be finite, got {delta}")));
    }
    let parts = RotatedParts::new(x)?;
    let objective = |t: f64| -> Result<f64> {
        // I + e^{it} x + e^{-it} x* = I + 2 Re(e^{it} x).
        let m = parts.rotated(t).scale(2.0).add_scaled_identity(1.0);
        let vals = eigvals_herm(m.mat())?;
        Ok(-vals[0])
    };
    let (worst_theta, neg_min, _) = grid_refine_max(objective)?;
    let worst_lambda_min = -neg_min;
    Ok(CircleReport { holds: worst_lambda_min >= delta, worst_theta, worst_lambda_min })
}

/// Matrix with independent standard complex Gaussian entries
/// (`(N(0,1) + i N(0,1)) / sqrt(2)`).
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
    let mut m = CMat::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(r, c)] = c64(re, im).scale(std::f64::consts::FRAC_1_SQRT_2);
        }
    }
    m
}

/// Haar-distributed random unitary: QR of a complex Ginibre matrix in the
/// positive-diagonal-R convention (modified Gram-Schmidt normalizes each
/// pivot to a positive real, which is exactly the diagonal phase
/// correction that makes the factor Haar).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    assert!(dim >= 1, "haar_unitary needs dim >= 1");
    'regen: loop {
        let g = gaussian_matrix(dim, dim, rng);
        let mut q = g.clone();
        for j in 0..dim {
            // Two orthogonalization passes for numerical orthonormality.
            for _pass in 0..2 {
                for prev in 0..j {
                    let mut proj = Complex64::ZERO;
                    for r in 0..dim {
                        proj += q[(r, prev)].conj() * q[(r, j)];
                    }
                    for r in 0..dim {
                        let sub = proj * q[(r, prev)];
                        let cur = q[(r, j)];
                        q[(r, j)] = cur - sub;
                    }
                }
            }
            let norm: f64 = (0..dim).map(|r| q[(r, j)].norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                // Numerically singular draw (probability ~0): redraw.
                continue 'regen;
            }
            for r in 0..dim {
                let cur = q[(r, j)];
                q[(r, j)] = cur.scale(1.0 / norm);
            }
        }
        return q;
    }
}

/// Deterministic phase tuples: each variable ranges over an 8-point phase
/// grid, enumerated lexicographically and capped at 64 tuples.
fn phase_tuples(n: usize, unitary_dim: usize) -> Vec<Vec<CMat>> {
    let total: usize = PHASE_GRID
        .checked_pow(n as u32)
        .unwrap_or(usize::MAX)
        .min(PHASE_TUPLE_CAP);
    let eye = CMat::identity(unitary_dim);
    let mut tuples = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut tuple = Vec::with_capacity(n);
        for _ in 0..n {
            let k = rem % PHASE_GRID;
            rem /= PHASE_GRID;
            let theta = 2.0 * std::f64::consts::PI * k as f64 / PHASE_GRID as f64;
            tuple.push(eye.scale(c64(theta.cos(), theta.sin())));
        }
        tuples.push(tuple);
    }
    tuples
}

fn eval_tuple(xs: &[CMat], tuple: &[CMat]) -> Result<f64> {
    let mut sum: Option<CMat> = None;
    for (x, u) in xs.iter().zip(tuple) {
        let term = crate::linalg::kron(x, u)?;
        sum = Some(match sum {
            Some(acc) => acc.add(&term),
            None => term,
        });
    }
    Ok(numerical_radius(&sum.expect("nonempty tuple"))?.value)
}

/// Sampling lower bound for the free joint numerical radius
/// `w(X_1, ..., X_n)`: the maximum of `w(sum_j X_j (x) U_j)` over the
/// all-identity tuple, a deterministic phase-tuple grid, and `samples`
/// Haar-unitary tuples drawn from a counter-seeded RNG (sample `s` uses
/// stream `s`, so the estimate is monotone in `samples` for a fixed seed).
pub fn free_radius_lower_bound(
    xs: &[CMat],
    unitary_dim: usize,
    samples: usize,
    seed: u64,
) -> Result<FreeRadiusEstimate> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("need at least one matrix".into()));
    }
    if unitary_dim < 1 {
        return Err(Error::InvalidParameter("unitary_dim must be >= 1".into()));
    }
    if samples < 1 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let d = xs[0].rows();
    for (j, x) in xs.iter().enumerate() {
        if !x.is_square() || x.rows() != d {
            return Err(Error::DimMismatch(format!(
                "matrix {j} is {}x{}, expected square of common dim {d}",
                x.rows(),
                x.cols()
            )));
        }
    }

    let mut tuples: Vec<Vec<CMat>> = Vec::new();
    tuples.push(vec![CMat::identity(unitary_dim); xs.len()]);
    tuples.extend(phase_tuples(xs.len(), unitary_dim));
    for s in 0..samples {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(1 + s as u64);
        tuples.push((0..xs.len()).map(|_| haar_unitary(unitary_dim, &mut rng)).collect());
    }

    let values: Vec<f64> = tuples
        .par_iter()
        .map(|tuple| eval_tuple(xs, tuple))
        .collect::<Result<Vec<f64>>>()?;

    let mut best = 0usize;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    Ok(FreeRadiusEstimate {
        lower: values[best],
        upper: None,
        witness_unitaries: tuples.swap_remove(best),
        witness_dim: unitary_dim,
        samples_used: samples,
        seed,
    })
}
