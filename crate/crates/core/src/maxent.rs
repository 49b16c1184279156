//! Maximum-entropy inference over the numerical range.
//!
//! For a target `z ∈ W` the MaxEnt state maximizes the von Neumann entropy
//! among density matrices with `tr(ρA) = z`. In the interior it is a Gibbs
//! state `exp(μ0 H0 + μ1 H1)/Z`; at an extreme point with inner normal
//! `e^{iθ}` it is the normalized projection onto the span of the eigenvectors
//! whose boundary generating point `z_k(θ)` equals `z`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dual::golden_min;
use crate::eigencurves::{angle_diff, bisect, generating_point, min_of_frame, wrap_angle};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryShape, ExtremeKind, NumericalRange};
use crate::linalg::{dot, eigh, inner, unit, CVector, EigenSystem, Hermitian, Matrix, IMAG};

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Hermitian);

impl DensityMatrix {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(m: Matrix) -> Result<Self> {
        let h = Hermitian::new(m)?;
        let tr = h.matrix().trace().re;
        if (tr - 1.0).abs() > Self::TOLERANCE {
            return Err(Error::InvalidInput(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = eigh(&h).values[0];
        if min < -Self::TOLERANCE {
            return Err(Error::InvalidInput(format!("density matrix has negative eigenvalue {min:.3e}")));
        }
        Ok(Self(h))
    }

    /// Normalizes a positive semidefinite matrix to unit trace.
    pub(crate) fn from_psd(m: Matrix) -> Self {
        let tr = m.trace().re;
        Self(Hermitian::new_unchecked(m.scale_real(1.0 / tr)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(Hermitian::new_unchecked(Matrix::identity(d).scale_real(1.0 / d as f64)))
    }

    pub fn matrix(&self) -> &Matrix {
        self.0.matrix()
    }

    pub fn hermitian(&self) -> &Hermitian {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn spectrum(&self) -> Vec<f64> {
        eigh(&self.0).values
    }

    /// `−tr ρ log ρ` in nats with `0·log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        self.spectrum().iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
    }

    /// `tr(ρH)`.
    pub fn expectation(&self, h: &Hermitian) -> f64 {
        let (a, b) = (self.matrix(), h.matrix());
        let d = self.dim();
        let mut s = Complex64::new(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                s += a[(r, c)] * b[(c, r)];
            }
        }
        s.re
    }

    /// `tr(ρA)` for a general matrix.
    pub fn moment(&self, a: &Matrix) -> Complex64 {
        self.matrix().mul(a).trace()
    }

    /// `½‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = Hermitian::new_unchecked(self.matrix().sub(other.matrix()));
        0.5 * eigh(&diff).values.iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Smallest eigenvalue must exceed `1e-12` for the logarithm to exist.
    pub fn log(&self) -> Result<Hermitian> {
        let min = self.spectrum()[0];
        if min <= 1e-12 {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        Ok(self.0.map_spectrum(f64::ln))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::new(Matrix::from_json_str(s)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxEntKind {
    Interior,
    Extreme,
    FacetRelativeInterior,
}

impl MaxEntKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MaxEntKind::Interior => "interior",
            MaxEntKind::Extreme => "extreme",
            MaxEntKind::FacetRelativeInterior => "facet_relative_interior",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MaxEntResult {
    pub state: DensityMatrix,
    pub kind: MaxEntKind,
    /// `(μ0, μ1)` of the Gibbs form, interior targets only.
    pub dual_params: Option<(f64, f64)>,
    pub entropy: f64,
    /// `|tr(ρH0) − Re z| + |tr(ρH1) − Im z|`.
    pub residual: f64,
    /// Boundary normal used for extreme and facet targets.
    pub normal: Option<f64>,
}

/// Newton target on the moment residual.
const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 500;
const HESSIAN_SHIFT: f64 = 1e-12;
/// Interior margin, relative to `‖A‖`, below which the Gibbs form is refused.
pub const INTERIOR_MARGIN: f64 = 1e-6;

fn residual_of(state: &DensityMatrix, range: &NumericalRange, z: Complex64) -> f64 {
    let p = range.table().parts();
    (state.expectation(&p.h0) - z.re).abs() + (state.expectation(&p.h1) - z.im).abs()
}

/// Branches whose generating point at `θ` is `z`.
pub fn index_set(range: &NumericalRange, z: Complex64, theta: f64) -> Result<Vec<usize>> {
    let tol = 1e-7 * (1.0 + range.table().norm());
    let f = range.table().frame_at(theta);
    let ks: Vec<usize> = (0..f.dim()).filter(|&k| (generating_point(&f, k) - z).norm() <= tol).collect();
    if ks.is_empty() {
        return Err(Error::ToleranceBreakdown(format!("no eigenvector of the normal {theta} maps to {z}")));
    }
    Ok(ks)
}

fn index_vectors(range: &NumericalRange, z: Complex64, theta: f64) -> Result<Vec<CVector>> {
    let ks = index_set(range, z, theta)?;
    let f = range.table().frame_at(theta);
    Ok(ks.into_iter().map(|k| f.vectors[k].clone()).collect())
}

/// Orthogonal projection onto the span of the branch vectors in the index set.
pub fn ground_projection(range: &NumericalRange, z: Complex64, theta: f64) -> Result<Matrix> {
    let vs = index_vectors(range, z, theta)?;
    let refs: Vec<&CVector> = vs.iter().collect();
    Ok(Matrix::projector(&refs, range.matrix().dim()))
}

/// MaxEnt value `p/tr p` at an extreme point with inner normal `e^{iθ}`.
pub fn maxent_extreme(range: &NumericalRange, z: Complex64, theta: f64) -> Result<MaxEntResult> {
    let vs = index_vectors(range, z, theta)?;
    let refs: Vec<&CVector> = vs.iter().collect();
    let state = DensityMatrix::from_psd(Matrix::projector(&refs, range.matrix().dim()));
    let residual = residual_of(&state, range, z);
    Ok(MaxEntResult {
        entropy: (vs.len() as f64).ln(),
        state,
        kind: MaxEntKind::Extreme,
        dual_params: None,
        residual,
        normal: Some(wrap_angle(theta)),
    })
}

/// Smallest grid value of `⟨e^{iθ}, z⟩ − λ(θ)` and where it is attained.
pub fn support_margin(range: &NumericalRange, z: Complex64) -> (f64, f64) {
    let grid = range.table().grid();
    (0..grid.len())
        .map(|j| {
            let t = grid.angle(j);
            (dot(unit(t), z) - range.table().frame(j).values.iter().copied().fold(f64::INFINITY, f64::min), t)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("non-empty grid")
}

/// Interior MaxEnt state by Newton's method on the log-partition function.
pub fn maxent_interior(range: &NumericalRange, z: Complex64) -> Result<MaxEntResult> {
    let scale = range.scale();
    let (margin, _) = support_margin(range, z);
    if margin < -1e-9 * scale {
        return Err(Error::Infeasible { violation: -margin });
    }
    if margin < INTERIOR_MARGIN * scale {
        return Err(Error::BoundaryProximity { margin });
    }
    let parts = range.table().parts();
    let tol = NEWTON_TOL * scale.max(1.0);
    let gibbs = solve_gibbs(&[parts.h0.clone(), parts.h1.clone()], &[z.re, z.im], tol)?;
    let residual = residual_of(&gibbs.state, range, z);
    Ok(MaxEntResult {
        entropy: gibbs.state.entropy(),
        state: gibbs.state,
        kind: MaxEntKind::Interior,
        dual_params: Some((gibbs.mu[0], gibbs.mu[1])),
        residual,
        normal: None,
    })
}

/// Solution of a moment-matching exponential family.
#[derive(Clone, Debug)]
pub struct Gibbs {
    pub mu: Vec<f64>,
    pub state: DensityMatrix,
    pub iterations: usize,
}

struct GibbsEval {
    log_z: f64,
    moments: Vec<f64>,
    es: EigenSystem,
    weights: Vec<f64>,
    shift: f64,
}

fn eval_gibbs(ops: &[Hermitian], mu: &[f64]) -> GibbsEval {
    let d = ops[0].dim();
    let mut x = Matrix::zeros(d);
    for (op, &m) in ops.iter().zip(mu) {
        x = x.add(&op.matrix().scale_real(m));
    }
    let es = eigh(&Hermitian::new_unchecked(x));
    let shift = es.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = es.values.iter().map(|g| (g - shift).exp()).collect();
    let z: f64 = w.iter().sum();
    let weights: Vec<f64> = w.iter().map(|x| x / z).collect();
    let moments = ops
        .iter()
        .map(|op| es.vectors.iter().zip(&weights).map(|(v, p)| p * op.expectation(v)).sum())
        .collect();
    GibbsEval { log_z: shift + z.ln(), moments, es, weights, shift }
}

/// `(e^x − e^y)/(x − y)`, continuous across `x = y`.
fn divided_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    let gap = hi - lo;
    if gap < 1e-12 {
        return (0.5 * (x + y)).exp();
    }
    lo.exp() * gap.exp_m1() / gap
}

/// Kubo–Mori covariance `∂²log Z/∂μ_i∂μ_j`.
fn covariance(ops: &[Hermitian], ev: &GibbsEval) -> Vec<Vec<f64>> {
    let d = ev.es.values.len();
    let g: Vec<f64> = ev.es.values.iter().map(|v| v - ev.shift).collect();
    let z: f64 = g.iter().map(|x| x.exp()).sum();
    let blocks: Vec<Vec<Vec<Complex64>>> = ops
        .iter()
        .map(|op| {
            let hv: Vec<CVector> = ev.es.vectors.iter().map(|v| op.matrix().matvec(v)).collect();
            (0..d).map(|a| (0..d).map(|b| inner(&ev.es.vectors[a], &hv[b])).collect()).collect()
        })
        .collect();
    let n = ops.len();
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for a in 0..d {
                for b in 0..d {
                    s += (blocks[i][a][b] * blocks[j][b][a]).re * divided_exp(g[a], g[b]);
                }
            }
            h[i][j] = s / z - ev.moments[i] * ev.moments[j];
        }
        h[i][i] += HESSIAN_SHIFT;
    }
    h
}

fn solve_small(h: &[Vec<f64>], r: &[f64]) -> Vec<f64> {
    match r.len() {
        1 => vec![r[0] / h[0][0]],
        2 => {
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            vec![(h[1][1] * r[0] - h[0][1] * r[1]) / det, (h[0][0] * r[1] - h[1][0] * r[0]) / det]
        }
        _ => unreachable!("at most two constraints"),
    }
}

/// Finds `μ` with `tr(ρ(μ) H_i) = target_i` for `ρ(μ) ∝ exp(Σ μ_i H_i)`.
/// Newton steps on `F(μ) = log Z(μ) − μ·target` with backtracking, started
/// at `μ = 0`.
pub fn solve_gibbs(ops: &[Hermitian], target: &[f64], tol: f64) -> Result<Gibbs> {
    let n = ops.len();
    let mut mu = vec![0.0; n];
    let objective = |ev: &GibbsEval, mu: &[f64]| ev.log_z - mu.iter().zip(target).map(|(m, t)| m * t).sum::<f64>();
    let mut ev = eval_gibbs(ops, &mu);
    let mut best_res = f64::INFINITY;
    for iter in 0..NEWTON_MAX_ITER {
        let grad: Vec<f64> = ev.moments.iter().zip(target).map(|(m, t)| m - t).collect();
        let res: f64 = grad.iter().map(|g| g.abs()).sum();
        best_res = best_res.min(res);
        let hess = covariance(ops, &ev);
        let step: Vec<f64> = solve_small(&hess, &grad).into_iter().map(|s| -s).collect();
        if res <= tol {
            // One more full step, kept only if it lowers the residual.
            let polished: Vec<f64> = mu.iter().zip(&step).map(|(m, s)| m + s).collect();
            let pev = eval_gibbs(ops, &polished);
            let pres: f64 = pev.moments.iter().zip(target).map(|(m, t)| (m - t).abs()).sum();
            if pres < res {
                return Ok(Gibbs { state: state_of(&pev), mu: polished, iterations: iter + 1 });
            }
            return Ok(Gibbs { state: state_of(&ev), mu, iterations: iter });
        }
        let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        let f0 = objective(&ev, &mu);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-14 {
            let trial: Vec<f64> = mu.iter().zip(&step).map(|(m, s)| m + t * s).collect();
            let tev = eval_gibbs(ops, &trial);
            let armijo = objective(&tev, &trial) <= f0 + 1e-4 * t * slope.min(0.0);
            // Close to the solution the decrease of F is below rounding in
            // log Z; the moment residual still measures progress.
            let trial_res: f64 = tev.moments.iter().zip(target).map(|(m, t)| (m - t).abs()).sum();
            if armijo || trial_res < (1.0 - 1e-4 * t) * res {
                accepted = Some((trial, tev));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((m, e)) => {
                mu = m;
                ev = e;
            }
            None => break,
        }
    }
    Err(Error::ToleranceBreakdown(format!("MaxEnt Newton iteration stalled at residual {best_res:.3e}")))
}

fn state_of(ev: &GibbsEval) -> DensityMatrix {
    let d = ev.es.values.len();
    let mut m = Matrix::zeros(d);
    for (v, &p) in ev.es.vectors.iter().zip(&ev.weights) {
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] += v[r] * v[c].conj() * p;
            }
        }
    }
    DensityMatrix::from_psd(m)
}

/// MaxEnt on the relative interior of the facet with singular normal `α`:
/// the state lives on the ground space of `Re(e^{-iα}A)` and only the
/// coordinate along the facet remains as a constraint.
pub fn maxent_facet(range: &NumericalRange, z: Complex64, alpha: f64) -> Result<MaxEntResult> {
    let table = range.table();
    let f = table.frame_at(alpha);
    let m = min_of_frame(&f, table.tie_tol(), 1e-9 * range.scale());
    let basis: Vec<&CVector> = m.active.iter().map(|&k| &f.vectors[k]).collect();
    let g = basis.len();
    let along = table.parts().rotated_imag(alpha);
    let mut compressed = Matrix::zeros(g);
    for a in 0..g {
        for b in 0..g {
            compressed[(a, b)] = along.sandwich(basis[a], basis[b]);
        }
    }
    let t = Hermitian::new_unchecked(compressed);
    let target = (unit(-alpha) * z).im;
    let gibbs = solve_gibbs(&[t], &[target], NEWTON_TOL * range.scale().max(1.0))?;
    let d = range.matrix().dim();
    let mut full = Matrix::zeros(d);
    let small = gibbs.state.matrix();
    for a in 0..g {
        for b in 0..g {
            for r in 0..d {
                for c in 0..d {
                    full[(r, c)] += basis[a][r] * small[(a, b)] * basis[b][c].conj();
                }
            }
        }
    }
    let state = DensityMatrix::from_psd(full);
    let residual = residual_of(&state, range, z);
    Ok(MaxEntResult {
        entropy: gibbs.state.entropy(),
        state,
        kind: MaxEntKind::FacetRelativeInterior,
        dual_params: None,
        residual,
        normal: Some(alpha),
    })
}

/// Dispatches on the location of `z`: interior, extreme point, or facet.
pub fn maxent(range: &NumericalRange, z: Complex64) -> Result<MaxEntResult> {
    let scale = range.scale();
    let (margin, t0) = support_margin(range, z);
    if margin < -1e-9 * scale {
        return Err(Error::Infeasible { violation: -margin });
    }
    if margin >= INTERIOR_MARGIN * scale {
        return maxent_interior(range, z);
    }
    let step = range.table().grid().step();
    let gap = |t: f64| dot(unit(t), z) - range.support(t).lambda;
    let mut theta = wrap_angle(golden_min(gap, t0 - step, t0 + step));
    // The gap is quadratic at a smooth minimum, so polish on its slope.
    let slope = |t: f64| dot(IMAG * unit(t), z) - range.support(t).right_deriv;
    let h = 1e-6;
    if range.support(theta).is_regular_normal && slope(theta - h) < 0.0 && slope(theta + h) > 0.0 {
        theta = wrap_angle(bisect(slope, theta - h, theta + h));
    }
    let normals = range.singular_normals();
    if let Some(&alpha) = normals.iter().find(|&&a| angle_diff(a, theta).abs() < 1e-4 && gap(a).abs() <= 1e-8 * scale) {
        theta = alpha;
    }
    let refined = gap(theta);
    if refined < -1e-8 * scale {
        return Err(Error::Infeasible { violation: -refined });
    }
    if refined > 1e-8 * scale {
        return Err(Error::BoundaryProximity { margin: refined });
    }
    let s = range.support(theta);
    let tol = range.tolerances().facet;
    if !s.is_regular_normal && (z - s.x_plus).norm() > tol && (z - s.x_minus).norm() > tol {
        return maxent_facet(range, z, theta);
    }
    maxent_extreme(range, z, theta)
}

/// Prior-dependent inference `p e^{p log ρ p} / tr(·)` at an extreme point.
pub fn prior_inference(range: &NumericalRange, z: Complex64, theta: f64, prior: &DensityMatrix) -> Result<DensityMatrix> {
    if prior.dim() != range.matrix().dim() {
        return Err(Error::InvalidInput(format!(
            "prior dimension {} does not match matrix dimension {}",
            prior.dim(),
            range.matrix().dim()
        )));
    }
    let log_prior = prior.log()?;
    let basis = index_vectors(range, z, theta)?;
    let g = basis.len();
    let mut compressed = Matrix::zeros(g);
    for a in 0..g {
        for b in 0..g {
            compressed[(a, b)] = log_prior.sandwich(&basis[a], &basis[b]);
        }
    }
    let es = eigh(&Hermitian::new_unchecked(compressed));
    let top = es.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let d = range.matrix().dim();
    let mut m = Matrix::zeros(d);
    for (w, val) in es.vectors.iter().zip(&es.values) {
        let weight = (val - top).exp();
        let v: CVector = (0..d).map(|r| (0..g).map(|a| basis[a][r] * w[a]).sum()).collect();
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] += v[r] * v[c].conj() * weight;
            }
        }
    }
    Ok(DensityMatrix::from_psd(m))
}

/// Continuity verdict at one classified boundary point.
#[derive(Clone, Debug)]
pub struct PointContinuity {
    pub z: Complex64,
    pub kind: ExtremeKind,
    pub theta: f64,
    pub index_set: Vec<usize>,
    pub maxent_continuous: bool,
    pub f_inv_strong: bool,
    pub f_inv_weak: bool,
    /// Non-identical branch pair sharing `z`, when there is one.
    pub witness: Option<Witness>,
}

/// Two branches that meet at `θ` with equal value and slope without being
/// the same function.
#[derive(Clone, Copy, Debug)]
pub struct Witness {
    pub branches: (usize, usize),
    pub value_gap: f64,
    pub slope_gap: f64,
    pub exponent: f64,
}

#[derive(Clone, Debug)]
pub struct ContinuityReport {
    pub points: Vec<PointContinuity>,
    /// Distinct points where the MaxEnt map is discontinuous.
    pub discontinuities: Vec<Complex64>,
}

/// Offsets at which the local order of two branches is read off.
const LOCAL_STEPS: [f64; 6] = [1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2];

/// Sign of `λ_k − λ_l` just to one side of `θ`, 0 if below noise everywhere.
fn local_sign(range: &NumericalRange, k: usize, l: usize, theta: f64, side: f64) -> i8 {
    let noise = 1e-12 * range.scale();
    for h in LOCAL_STEPS {
        let f = range.table().frame_at(theta + side * h);
        let delta = f.values[k] - f.values[l];
        if delta.abs() > noise {
            return if delta > 0.0 { 1 } else { -1 };
        }
    }
    0
}

/// Whether branch `k` stays minimal among `others` on both sides of `θ`.
fn two_sided_minimal(range: &NumericalRange, k: usize, others: &[usize], theta: f64) -> bool {
    others.iter().filter(|&&l| l != k && !range.table().identical(k, l)).all(|&l| {
        local_sign(range, k, l, theta, -1.0) <= 0 && local_sign(range, k, l, theta, 1.0) <= 0
    })
}

fn assess(range: &NumericalRange, z: Complex64, theta: f64, kind: ExtremeKind) -> Result<PointContinuity> {
    let table = range.table();
    let ks = index_set(range, z, theta)?;
    let mut witness = None;
    let mut strong = true;
    for (i, &k) in ks.iter().enumerate() {
        for &l in &ks[i + 1..] {
            if !table.identical(k, l) {
                strong = false;
                if witness.is_none() {
                    let f = table.frame_at(theta);
                    witness = Some(Witness {
                        branches: (k, l),
                        value_gap: (f.values[k] - f.values[l]).abs(),
                        slope_gap: (f.d1[k] - f.d1[l]).abs(),
                        exponent: table.contact_fit(k, l, theta).exponent,
                    });
                }
            }
        }
    }
    let weak = match kind {
        ExtremeKind::Corner | ExtremeKind::NonExposed => true,
        ExtremeKind::RegularExposed => strong || ks.iter().any(|&k| two_sided_minimal(range, k, &ks, theta)),
    };
    Ok(PointContinuity {
        z,
        kind,
        theta,
        maxent_continuous: strong || kind == ExtremeKind::Corner,
        f_inv_strong: strong,
        f_inv_weak: weak,
        index_set: ks,
        witness,
    })
}

/// Boundary points examined by the scans: corners (at the middle of their
/// normal arc), non-exposed points, and the regular exposed samples of the
/// classification.
pub fn scan_candidates(range: &NumericalRange) -> Result<Vec<(Complex64, f64, ExtremeKind)>> {
    let shape = range.classify()?;
    let BoundaryShape::Regular(cl) = shape else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for p in &cl.extreme_points {
        let theta = match p.kind {
            ExtremeKind::Corner => {
                let (a, mut b) = p.normal;
                if b <= a {
                    b += std::f64::consts::TAU;
                }
                wrap_angle(0.5 * (a + b))
            }
            _ => p.normal.0,
        };
        out.push((p.z, theta, p.kind));
    }
    Ok(out)
}

/// Continuity of the MaxEnt map and of the inverse numerical range map at
/// every classified boundary point.
pub fn scan_discontinuities(range: &NumericalRange) -> Result<ContinuityReport> {
    let candidates = scan_candidates(range)?;
    let points = candidates
        .par_iter()
        .map(|&(z, theta, kind)| assess(range, z, theta, kind))
        .collect::<Result<Vec<_>>>()?;
    let mut discontinuities: Vec<Complex64> = Vec::new();
    let tol = 1e-6 * range.scale();
    for p in points.iter().filter(|p| !p.maxent_continuous) {
        if discontinuities.iter().all(|q| (q - p.z).norm() > tol) {
            discontinuities.push(p.z);
        }
    }
    Ok(ContinuityReport { points, discontinuities })
}

/// Offsets along the boundary for the jump test, smallest first.
const JUMP_STEPS: [f64; 4] = [1e-4, 2e-4, 5e-4, 1e-3];
/// Trace distance above which a jump is reported.
pub const JUMP_THRESHOLD: f64 = 1e-2;

/// Points where the prior-dependent inference map jumps along the boundary:
/// `Ψ(z)` is compared with `Ψ` at the boundary points of the normals
/// `θ ± h` on the curved side(s) of each exposed or non-exposed point.
pub fn jump_scan(range: &NumericalRange, prior: &DensityMatrix) -> Result<Vec<Complex64>> {
    let candidates = scan_candidates(range)?;
    let flagged = candidates
        .par_iter()
        .filter(|(_, _, kind)| *kind != ExtremeKind::Corner)
        .map(|&(z, theta, kind)| -> Result<Option<Complex64>> {
            let here = prior_inference(range, z, theta, prior)?;
            let mut jump: f64 = 0.0;
            for side in [-1.0, 1.0] {
                // Branches with high-order contact stay clustered at the
                // smallest offsets.
                let Some((t, s)) = JUMP_STEPS
                    .iter()
                    .map(|h| theta + side * h)
                    .map(|t| (t, range.support(t)))
                    .find(|(_, s)| s.is_regular_normal)
                else {
                    continue;
                };
                if kind == ExtremeKind::NonExposed {
                    // Only the curved side is along the boundary of an arc.
                    let facet = range.support(theta);
                    let on_arc_side = if (z - facet.x_plus).norm() < (z - facet.x_minus).norm() { 1.0 } else { -1.0 };
                    if side != on_arc_side {
                        continue;
                    }
                }
                let there = prior_inference(range, s.x_plus, t, prior)?;
                jump = jump.max(here.trace_distance(&there));
            }
            Ok((jump > JUMP_THRESHOLD).then_some(z))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Complex64> = Vec::new();
    let tol = 1e-6 * range.scale();
    for z in flagged.into_iter().flatten() {
        if out.iter().all(|q| (q - z).norm() > tol) {
            out.push(z);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigencurves::AngleGrid;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn range(a: &Matrix) -> NumericalRange {
        NumericalRange::new(a, AngleGrid::default()).unwrap()
    }

    fn disk() -> Matrix {
        Matrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap()
    }

    fn segment_plus_disk() -> Matrix {
        Matrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]).direct_sum(&disk())
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(Matrix::identity(2)).is_err());
        let m = DensityMatrix::maximally_mixed(4);
        assert!((m.entropy() - 4f64.ln()).abs() < 1e-14);
        let pure = DensityMatrix::new(Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap()).unwrap();
        assert!(pure.entropy().abs() < 1e-15);
        assert!(matches!(pure.log(), Err(Error::NotPositiveDefinite { .. })));
        assert!((pure.trace_distance(&DensityMatrix::maximally_mixed(2)) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn index_sets() {
        let w = range(&segment_plus_disk());
        assert_eq!(index_set(&w, c(1.0, 0.0), PI).unwrap().len(), 2);
        let d = range(&disk());
        assert_eq!(index_set(&d, c(-1.0, 0.0), 0.0).unwrap().len(), 1);
        let seg = range(&Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]));
        assert_eq!(index_set(&seg, c(1.0, 0.0), 5.0 * FRAC_PI_4).unwrap().len(), 1);
        assert!(matches!(index_set(&d, c(0.0, 0.0), 0.0), Err(Error::ToleranceBreakdown(_))));
    }

    #[test]
    fn disk_ground_projection() {
        let d = range(&disk());
        let p = ground_projection(&d, c(-1.0, 0.0), 0.0).unwrap();
        let want = Matrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]).unwrap();
        assert!(p.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn extreme_values() {
        let w = range(&segment_plus_disk());
        let r = maxent_extreme(&w, c(1.0, 0.0), PI).unwrap();
        assert!((r.entropy - 2f64.ln()).abs() < 1e-14);
        assert!(r.residual < 1e-8);
        let d = range(&disk());
        let r = maxent_extreme(&d, c(-1.0, 0.0), 0.0).unwrap();
        assert!(r.entropy.abs() < 1e-15 && r.state.entropy().abs() < 1e-10);
    }

    #[test]
    fn barycenter_is_maximally_mixed() {
        let a = Matrix::from_rows(&[
            vec![c(0.3, 0.1), c(1.0, -0.5), c(0.0, 0.2)],
            vec![c(-0.2, 0.0), c(0.1, 0.9), c(0.4, 0.0)],
            vec![c(0.0, 0.3), c(0.5, 0.5), c(-0.6, -0.2)],
        ])
        .unwrap();
        let w = range(&a);
        let r = maxent_interior(&w, w.barycenter()).unwrap();
        let (m0, m1) = r.dual_params.unwrap();
        assert!(m0.abs() <= 1e-10 && m1.abs() <= 1e-10);
        assert!(r.state.trace_distance(&DensityMatrix::maximally_mixed(3)) < 1e-12);
    }

    #[test]
    fn interior_moments_and_refusals() {
        let d = range(&disk());
        let r = maxent_interior(&d, c(0.3, -0.4)).unwrap();
        assert!(r.residual <= 1e-10);
        assert!(matches!(maxent_interior(&d, c(1.5, 0.0)), Err(Error::Infeasible { .. })));
        assert!(matches!(maxent_interior(&d, c(1.0 - 1e-8, 0.0)), Err(Error::BoundaryProximity { .. })));
    }

    #[test]
    fn classical_two_level() {
        // Commuting parts: ρ = diag(p, 1−p) with p·1 + (1−p)·(−1) = x.
        let a = Matrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)]);
        let w = range(&a);
        let z = c(0.1, 0.2);
        let r = maxent_interior(&w, z).unwrap();
        // Classical exponential family over the three eigenvalues.
        let pts = [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)];
        let (m0, m1) = r.dual_params.unwrap();
        let ws: Vec<f64> = pts.iter().map(|p| (m0 * p.re + m1 * p.im).exp()).collect();
        let zsum: f64 = ws.iter().sum();
        for (k, wk) in ws.iter().enumerate() {
            assert!((r.state.matrix()[(k, k)].re - wk / zsum).abs() < 1e-12);
        }
    }

    #[test]
    fn facet_midpoint_of_segment_is_balanced() {
        let w = range(&Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, -1.0)]));
        let r = maxent(&w, c(0.5, 0.5)).unwrap();
        assert_eq!(r.kind, MaxEntKind::FacetRelativeInterior);
        assert!((r.state.matrix()[(0, 0)].re - 0.5).abs() < 1e-10);
        assert!((r.entropy - 2f64.ln()).abs() < 1e-10);
        assert!(r.residual < 1e-8);
    }

    #[test]
    fn dispatcher_paths() {
        let d = range(&disk());
        assert_eq!(maxent(&d, c(0.0, 0.0)).unwrap().kind, MaxEntKind::Interior);
        assert_eq!(maxent(&d, c(0.0, 1.0)).unwrap().kind, MaxEntKind::Extreme);
        assert!(matches!(maxent(&d, c(2.0, 0.0)), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn prior_with_uniform_matches_maxent() {
        let w = range(&segment_plus_disk());
        let psi = prior_inference(&w, c(1.0, 0.0), PI, &DensityMatrix::maximally_mixed(4)).unwrap();
        let rho = maxent_extreme(&w, c(1.0, 0.0), PI).unwrap().state;
        assert!(psi.trace_distance(&rho) < 1e-12);
    }

    #[test]
    fn segment_plus_disk_discontinuities() {
        let w = range(&segment_plus_disk());
        let report = scan_discontinuities(&w).unwrap();
        let mut found = report.discontinuities.clone();
        found.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_eq!(found.len(), 2, "{found:?}");
        assert!((found[0] + 1.0).norm() < 1e-9 && (found[1] - 1.0).norm() < 1e-9);
        for p in &report.points {
            assert!(!p.f_inv_strong || p.f_inv_weak);
        }
    }
}
