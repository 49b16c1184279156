//! Analytic eigenvalue branches of the rotated real part `Re(e^{-iθ}A)`.
//!
//! The spectrum is sampled on a uniform angle grid and consecutive samples are
//! matched by eigenvector overlap, so that branch `k` follows one analytic
//! eigenvalue curve `λ_k(θ)` through crossings. Where eigenvalues coincide the
//! eigenspace basis is fixed by degenerate perturbation theory (first and
//! second order), which selects the analytic continuation.
//!
//! Derivatives along a branch come from perturbation identities:
//! `λ_k' = ⟨ψ_k|Im(e^{-iθ}A)|ψ_k⟩` and
//! `λ_k'' = −λ_k + 2 Σ_{m∉cluster} |⟨ψ_m|Im(e^{-iθ}A)|ψ_k⟩|² / (λ_k − λ_m)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigh, fix_phase, inner, CVector, Hermitian, Matrix, RealParts, IMAG};

/// Uniform periodic grid `θ_j = 2πj/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AngleGrid {
    n: usize,
}

impl AngleGrid {
    pub const DEFAULT_SIZE: usize = 4096;
    pub const MIN_SIZE: usize = 512;
    pub const MAX_SIZE: usize = 1 << 20;

    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() || !(Self::MIN_SIZE..=Self::MAX_SIZE).contains(&n) {
            return Err(Error::GridSize(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * (j % self.n) as f64 / self.n as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.angle(j))
    }

    /// Index of the grid angle closest to `theta` (circularly).
    pub fn nearest(&self, theta: f64) -> usize {
        let t = wrap_angle(theta);
        ((t / self.step()).round() as usize) % self.n
    }
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self { n: Self::DEFAULT_SIZE }
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Signed circular distance `a − b` reduced to `(−π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

/// Spectral data at one angle. Entry `k` of every field belongs to branch
/// `k` once the frame has been labelled by the tracker; a freshly solved frame
/// is in ascending order.
#[derive(Clone, Debug)]
pub struct Frame {
    pub theta: f64,
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl Frame {
    fn permuted(&self, perm: &[usize]) -> Frame {
        Frame {
            theta: self.theta,
            values: perm.iter().map(|&m| self.values[m]).collect(),
            vectors: perm.iter().map(|&m| self.vectors[m].clone()).collect(),
            d1: perm.iter().map(|&m| self.d1[m]).collect(),
            d2: perm.iter().map(|&m| self.d2[m]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Groups ascending values into runs whose consecutive gaps are below `tol`.
fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Rotates `basis` by the eigenvectors of the Hermitian `g×g` matrix `m`.
/// Returns the rotated vectors in ascending order of the eigenvalues of `m`.
fn rotate_basis(basis: &[CVector], m: Matrix) -> (Vec<f64>, Vec<CVector>) {
    let es = eigh(&Hermitian::new_unchecked(m));
    let dim = basis[0].len();
    let rotated = es
        .vectors
        .iter()
        .map(|w| {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            for (a, b) in basis.iter().enumerate() {
                for r in 0..dim {
                    v[r] += b[r] * w[a];
                }
            }
            v
        })
        .collect();
    (es.values, rotated)
}

/// Solves the rotated eigenproblem at `theta` and fixes degenerate bases.
///
/// `cluster_tol` is the absolute eigenvalue gap below which eigenvalues are
/// treated as one cluster; `deriv_tol` plays the same role for first
/// derivatives inside a cluster.
pub(crate) fn solve_frame(parts: &RealParts, theta: f64, cluster_tol: f64, deriv_tol: f64) -> Frame {
    let h = parts.rotated(theta);
    let hp = parts.rotated_imag(theta);
    let es = eigh(&h);
    let d = h.dim();
    let mut values = es.values.clone();
    let mut vectors = es.vectors;
    let groups = clusters(&values, cluster_tol);

    for g in &groups {
        if g.len() < 2 {
            continue;
        }
        let basis: Vec<CVector> = vectors[g.clone()].to_vec();
        let first = projected(&hp, &basis);
        let (slopes, rotated) = rotate_basis(&basis, first);
        let mut rotated = rotated;
        // Sub-clusters with equal slopes are resolved at second order.
        for sub in clusters(&slopes, deriv_tol) {
            if sub.len() < 2 {
                continue;
            }
            let lam = g.clone().map(|k| values[k]).sum::<f64>() / g.len() as f64;
            let sub_basis: Vec<CVector> = rotated[sub.clone()].to_vec();
            let g_len = sub_basis.len();
            let mut second = Matrix::zeros(g_len);
            let hp_sub: Vec<CVector> = sub_basis.iter().map(|v| hp.matrix().matvec(v)).collect();
            for m in (0..d).filter(|m| !g.contains(m)) {
                let gap = lam - values[m];
                let couplings: Vec<Complex64> =
                    hp_sub.iter().map(|hv| inner(&vectors[m], hv)).collect();
                for a in 0..g_len {
                    for b in 0..g_len {
                        second[(a, b)] += couplings[a].conj() * couplings[b] * (2.0 / gap);
                    }
                }
            }
            for a in 0..g_len {
                second[(a, a)] -= Complex64::new(lam, 0.0);
            }
            let (_, resolved) = rotate_basis(&sub_basis, second);
            for (i, v) in sub.clone().zip(resolved) {
                rotated[i] = v;
            }
        }
        for (i, v) in g.clone().zip(rotated) {
            values[i] = h.expectation(&v);
            vectors[i] = v;
        }
    }

    for v in vectors.iter_mut() {
        fix_phase(v);
    }
    let hp_vecs: Vec<CVector> = vectors.iter().map(|v| hp.matrix().matvec(v)).collect();
    let mut d1 = vec![0.0; d];
    let mut d2 = vec![0.0; d];
    let mut owner = vec![0; d];
    for (gi, g) in groups.iter().enumerate() {
        for k in g.clone() {
            owner[k] = gi;
        }
    }
    for k in 0..d {
        d1[k] = inner(&vectors[k], &hp_vecs[k]).re;
        let mut sum = 0.0;
        for m in 0..d {
            if owner[m] == owner[k] {
                continue;
            }
            sum += inner(&vectors[m], &hp_vecs[k]).norm_sqr() / (values[k] - values[m]);
        }
        d2[k] = -values[k] + 2.0 * sum;
    }
    Frame { theta, values, vectors, d1, d2 }
}

fn projected(op: &Hermitian, basis: &[CVector]) -> Matrix {
    let g = basis.len();
    let mut m = Matrix::zeros(g);
    for a in 0..g {
        let ov = op.matrix().matvec(&basis[a]);
        for b in 0..g {
            m[(b, a)] = inner(&basis[b], &ov);
        }
    }
    m
}

/// Greedy assignment on the overlap matrix `|⟨prev_k|next_m⟩|`: returns
/// `perm` with `perm[k]` the index in `next` continuing branch `k`.
/// Equal overlaps are taken in `(k, m)` lexicographic order.
pub(crate) fn match_frames(prev: &Frame, next: &Frame) -> Vec<usize> {
    let d = prev.dim();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for k in 0..d {
        for m in 0..d {
            pairs.push((inner(&prev.vectors[k], &next.vectors[m]).norm(), k, m));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut perm = vec![usize::MAX; d];
    let mut taken = vec![false; d];
    let mut assigned = 0;
    for (_, k, m) in pairs {
        if perm[k] == usize::MAX && !taken[m] {
            perm[k] = m;
            taken[m] = true;
            assigned += 1;
            if assigned == d {
                break;
            }
        }
    }
    perm
}

/// A point where two branches meet.
#[derive(Clone, Debug, Serialize)]
pub struct CrossingRecord {
    pub theta: f64,
    pub branches: (usize, usize),
    /// Order of the first differing derivative minus one (0 = transversal).
    pub contact_order: u32,
    /// Fitted leading exponent of `|λ_k − λ_l|` in `|θ − θ*|`.
    pub exponent: f64,
    pub fit_residual: f64,
    pub involves_minimum: bool,
}

/// Leading-order behaviour of a branch difference near a point.
#[derive(Clone, Copy, Debug)]
pub struct ContactFit {
    pub exponent: f64,
    pub residual: f64,
    /// Sign of `λ_k − λ_l` just left / right of the point (0 when below noise).
    pub sign_left: i8,
    pub sign_right: i8,
}

/// Minimum eigenvalue with its one-sided derivatives and active branches.
#[derive(Clone, Debug)]
pub struct MinEigen {
    pub lambda: f64,
    pub left_deriv: f64,
    pub right_deriv: f64,
    /// Branches attaining the minimum (within the cluster tolerance).
    pub active: Vec<usize>,
    /// Branch equal to `λ` just right of `θ`, and its second derivative.
    pub right_branch: usize,
    pub right_second: f64,
    /// Branch equal to `λ` just left of `θ`, and its second derivative.
    pub left_branch: usize,
    pub left_second: f64,
}

const CONTACT_STENCIL_START: f64 = 0.1;
const CONTACT_STENCIL_RATIO: f64 = 0.7;
const CONTACT_STENCIL_POINTS: usize = 8;
const CONTACT_FIT_MAX_RESIDUAL: f64 = 0.1;

/// Branch-tracked eigenvalue curves of `Re(e^{-iθ}A)` on a periodic grid.
#[derive(Clone, Debug)]
pub struct EigenCurveTable {
    matrix: Matrix,
    parts: RealParts,
    norm: f64,
    grid: AngleGrid,
    frames: Vec<Frame>,
    /// `order[j][k]`: ascending position at `θ_j` of branch `k`.
    order: Vec<Vec<usize>>,
}

impl EigenCurveTable {
    /// Relative eigenvalue gap that defines a degenerate cluster.
    pub const CLUSTER_TOL: f64 = 1e-8;
    /// Relative tolerance for "equal as functions" over the whole grid.
    pub const EQUAL_TOL: f64 = 1e-7;
    /// Relative tolerance for `λ_k(θ) = λ(θ)` in the active set: rounding
    /// level, since nearby branches with different slopes are not tied.
    pub const TIE_TOL: f64 = 1e-12;

    /// Tracks the branches, doubling the grid until the labels close up
    /// around the circle.
    pub fn track(a: &Matrix, grid: AngleGrid) -> Result<Self> {
        let parts = RealParts::new(a);
        let norm = a.norm2();
        let mut n = grid.len();
        loop {
            let grid = AngleGrid::new(n)?;
            let table = Self::track_once(a.clone(), parts.clone(), norm, grid);
            if table.closes_up() {
                return Ok(table);
            }
            n *= 2;
            if n > AngleGrid::MAX_SIZE {
                return Err(Error::ToleranceBreakdown("unresolved branch monodromy".into()));
            }
        }
    }

    fn track_once(matrix: Matrix, parts: RealParts, norm: f64, grid: AngleGrid) -> Self {
        let scale = if norm > 0.0 { norm } else { 1.0 };
        let ctol = Self::CLUSTER_TOL * scale;
        let dtol = 1e-9 * scale;
        let raw: Vec<Frame> = (0..grid.len())
            .into_par_iter()
            .map(|j| solve_frame(&parts, grid.angle(j), ctol, dtol))
            .collect();
        let d = matrix.dim();
        let mut frames = Vec::with_capacity(grid.len());
        let mut order = Vec::with_capacity(grid.len());
        let identity: Vec<usize> = (0..d).collect();
        frames.push(raw[0].clone());
        order.push(identity);
        for j in 1..grid.len() {
            let perm = match_frames(&frames[j - 1], &raw[j]);
            frames.push(raw[j].permuted(&perm));
            order.push(perm);
        }
        Self { matrix, parts, norm, grid, frames, order }
    }

    /// Whether the branch labels after a full turn return to themselves,
    /// up to permutations among branches that are identical as functions.
    fn closes_up(&self) -> bool {
        let last = self.frames.last().expect("non-empty grid");
        let mut wrapped = self.frames[0].clone();
        wrapped.theta = TAU;
        let perm = match_frames(last, &wrapped);
        perm.iter().enumerate().all(|(k, &m)| k == m || self.identical(k, m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn parts(&self) -> &RealParts {
        &self.parts
    }

    /// Spectral norm of `A`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `‖A‖`, or 1 for the zero matrix; the unit for relative tolerances.
    pub fn scale(&self) -> f64 {
        if self.norm > 0.0 {
            self.norm
        } else {
            1.0
        }
    }

    pub fn grid(&self) -> AngleGrid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, j: usize) -> &Frame {
        &self.frames[j % self.grid.len()]
    }

    /// Permutation trace: ascending position of each branch at grid index `j`.
    pub fn permutation(&self, j: usize) -> &[usize] {
        &self.order[j]
    }

    pub fn cluster_tol(&self) -> f64 {
        Self::CLUSTER_TOL * self.scale()
    }

    pub fn tie_tol(&self) -> f64 {
        Self::TIE_TOL * self.scale()
    }

    /// Branch-labelled spectral data at an arbitrary angle. Off-grid angles
    /// are re-solved and matched against the nearest grid frame.
    pub fn frame_at(&self, theta: f64) -> Frame {
        let j = self.grid.nearest(theta);
        let base = &self.frames[j];
        if angle_diff(theta, base.theta).abs() <= 1e-13 {
            return base.clone();
        }
        let raw = solve_frame(&self.parts, theta, self.cluster_tol(), 1e-9 * self.scale());
        let perm = match_frames(base, &raw);
        raw.permuted(&perm)
    }

    fn check_branch(&self, k: usize) -> Result<()> {
        if k >= self.dim() {
            return Err(Error::BranchOutOfRange { index: k, dim: self.dim() });
        }
        Ok(())
    }

    pub fn branch_value(&self, k: usize, theta: f64) -> Result<f64> {
        self.check_branch(k)?;
        Ok(self.frame_at(theta).values[k])
    }

    /// `λ_k'(θ) = ⟨ψ_k|Im(e^{-iθ}A)|ψ_k⟩`.
    pub fn branch_derivative(&self, k: usize, theta: f64) -> Result<f64> {
        self.check_branch(k)?;
        Ok(self.frame_at(theta).d1[k])
    }

    pub fn branch_second_derivative(&self, k: usize, theta: f64) -> Result<f64> {
        self.check_branch(k)?;
        Ok(self.frame_at(theta).d2[k])
    }

    /// `z_k(θ) = e^{iθ}(λ_k(θ) + i λ_k'(θ))`.
    pub fn boundary_generating_point(&self, k: usize, theta: f64) -> Result<Complex64> {
        self.check_branch(k)?;
        let f = self.frame_at(theta);
        Ok(generating_point(&f, k))
    }

    /// Whether branches `k` and `l` agree on every grid angle.
    pub fn identical(&self, k: usize, l: usize) -> bool {
        if k == l {
            return true;
        }
        let tol = Self::EQUAL_TOL * self.scale();
        self.frames.iter().all(|f| (f.values[k] - f.values[l]).abs() <= tol)
    }

    /// Minimum eigenvalue with one-sided derivatives.
    pub fn min_eigenvalue(&self, theta: f64) -> MinEigen {
        min_of_frame(&self.frame_at(theta), self.tie_tol(), 1e-9 * self.scale())
    }

    /// Ground state energy of `H0 + g H1`: `√(1+g²)·λ(arctan g)`.
    pub fn ground_state_energy(&self, g: f64) -> f64 {
        (1.0 + g * g).sqrt() * self.min_eigenvalue(g.atan()).lambda
    }

    fn diff_at(&self, k: usize, l: usize, theta: f64) -> (f64, f64, f64) {
        let f = self.frame_at(theta);
        (f.values[k] - f.values[l], f.d1[k] - f.d1[l], f.d2[k] - f.d2[l])
    }

    /// Fits the leading exponent of `|λ_k − λ_l|` around `theta` on a
    /// geometric stencil of 8 points per side.
    pub fn contact_fit(&self, k: usize, l: usize, theta: f64) -> ContactFit {
        let noise = 1e-11 * self.scale();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut sign_left = 0i8;
        let mut sign_right = 0i8;
        let mut h = CONTACT_STENCIL_START;
        let mut steps = Vec::with_capacity(CONTACT_STENCIL_POINTS);
        for _ in 0..CONTACT_STENCIL_POINTS {
            steps.push(h);
            h *= CONTACT_STENCIL_RATIO;
        }
        // Signs are read from the smallest offset that rises above noise.
        for &h in steps.iter() {
            for (side, sign) in [(-1.0, &mut sign_left), (1.0, &mut sign_right)] {
                let delta = self.diff_at(k, l, theta + side * h).0;
                if delta.abs() > noise {
                    xs.push(h.ln());
                    ys.push(delta.abs().ln());
                    *sign = if delta > 0.0 { 1 } else { -1 };
                }
            }
        }
        if xs.len() < 4 {
            return ContactFit { exponent: f64::INFINITY, residual: 0.0, sign_left, sign_right };
        }
        let (slope, residual) = least_squares_slope(&xs, &ys);
        ContactFit { exponent: slope, residual, sign_left, sign_right }
    }

    /// All crossings between distinct (non-identical) branch pairs.
    pub fn find_crossings(&self) -> Vec<CrossingRecord> {
        let d = self.dim();
        let mut out = Vec::new();
        for k in 0..d {
            for l in k + 1..d {
                if self.identical(k, l) {
                    continue;
                }
                out.extend(self.pair_crossings(k, l));
            }
        }
        out.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.branches.cmp(&b.branches)));
        out
    }

    fn pair_crossings(&self, k: usize, l: usize) -> Vec<CrossingRecord> {
        let n = self.grid.len();
        let h = self.grid.step();
        let scale = self.scale();
        let zero_tol = 1e-12 * scale;
        let tangency_gap = 4.0 * h * h * scale;
        let delta: Vec<f64> = self.frames.iter().map(|f| f.values[k] - f.values[l]).collect();
        let slope: Vec<f64> = self.frames.iter().map(|f| f.d1[k] - f.d1[l]).collect();
        let sign = |x: f64, tol: f64| if x > tol { 1 } else if x < -tol { -1 } else { 0 };

        let mut brackets: Vec<(f64, f64)> = Vec::new();
        for j in 0..n {
            let jn = (j + 1) % n;
            let t0 = self.grid.angle(j);
            let t1 = t0 + h;
            let (s0, s1) = (sign(delta[j], zero_tol), sign(delta[jn], zero_tol));
            if s0 == 0 {
                brackets.push((t0 - 0.5 * h, t0 + 0.5 * h));
            } else if s0 * s1 < 0 {
                brackets.push((t0, t1));
            } else if s1 != 0 {
                let (p0, p1) = (sign(slope[j], 0.0), sign(slope[jn], 0.0));
                if p0 * p1 < 0 && delta[j].abs().min(delta[jn].abs()) <= tangency_gap {
                    brackets.push((t0, t1));
                }
            }
        }

        let mut roots: Vec<f64> = Vec::new();
        for (lo, hi) in brackets {
            if let Some(t) = self.polish_crossing(k, l, lo, hi) {
                let t = wrap_angle(t);
                if roots.iter().all(|&r| angle_diff(r, t).abs() > 1e-6) {
                    roots.push(t);
                }
            }
        }

        roots
            .into_iter()
            .map(|t| {
                let fit = self.contact_fit(k, l, t);
                let (_, d1, _) = self.diff_at(k, l, t);
                let contact_order = if fit.residual <= CONTACT_FIT_MAX_RESIDUAL && fit.exponent.is_finite() {
                    (fit.exponent.round().max(1.0) as u32) - 1
                } else if d1.abs() <= 1e-7 * scale {
                    1
                } else {
                    0
                };
                let m = self.min_eigenvalue(t);
                let f = self.frame_at(t);
                let tol = self.cluster_tol();
                let involves_minimum =
                    (f.values[k] - m.lambda).abs() <= tol && (f.values[l] - m.lambda).abs() <= tol;
                CrossingRecord {
                    theta: t,
                    branches: (k, l),
                    contact_order,
                    exponent: fit.exponent,
                    fit_residual: fit.residual,
                    involves_minimum,
                }
            })
            .collect()
    }

    /// Root-polishes a crossing of branches `k`, `l` inside `[lo, hi]`.
    ///
    /// Transversal crossings are bisected on the value difference; tangencies
    /// are bisected on the first or second derivative difference, whichever
    /// changes sign.
    fn polish_crossing(&self, k: usize, l: usize, lo: f64, hi: f64) -> Option<f64> {
        let scale = self.scale();
        let value = |t: f64| self.diff_at(k, l, t).0;
        let first = |t: f64| self.diff_at(k, l, t).1;
        let second = |t: f64| self.diff_at(k, l, t).2;

        let mut t = if value(lo) * value(hi) < 0.0 {
            bisect(value, lo, hi)
        } else if first(lo) * first(hi) < 0.0 {
            bisect(first, lo, hi)
        } else {
            let (vl, vh) = (value(lo).abs(), value(hi).abs());
            if vl <= vh {
                lo
            } else {
                hi
            }
        };

        if first(t).abs() <= 1e-7 * scale {
            let w = 1e-3;
            if first(t - w) * first(t + w) < 0.0 {
                t = bisect(first, t - w, t + w);
            } else if second(t - w) * second(t + w) < 0.0 {
                t = bisect(second, t - w, t + w);
            }
        }
        (value(t).abs() <= 1e-8 * scale).then_some(t)
    }

    /// CSV export: `theta,k,lambda_k,dlambda_k,re_z_k,im_z_k`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,k,lambda_k,dlambda_k,re_z_k,im_z_k\n");
        for f in &self.frames {
            for k in 0..f.dim() {
                let z = generating_point(f, k);
                s.push_str(&format!("{},{},{},{},{},{}\n", f.theta, k, f.values[k], f.d1[k], z.re, z.im));
            }
        }
        s
    }
}

pub(crate) fn generating_point(f: &Frame, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, f.theta) * (f.values[k] + IMAG * f.d1[k])
}

pub(crate) fn min_of_frame(f: &Frame, tie_tol: f64, deriv_tol: f64) -> MinEigen {
    let lambda = f.values.iter().copied().fold(f64::INFINITY, f64::min);
    let active: Vec<usize> = (0..f.dim()).filter(|&k| f.values[k] - lambda <= tie_tol).collect();
    let right_deriv = active.iter().map(|&k| f.d1[k]).fold(f64::INFINITY, f64::min);
    let left_deriv = active.iter().map(|&k| f.d1[k]).fold(f64::NEG_INFINITY, f64::max);
    // Just right of θ the smallest slope wins, ties broken by the smaller
    // second derivative; just left the largest slope wins.
    let pick = |key: &dyn Fn(usize) -> f64| -> usize {
        let best = active.iter().map(|&k| key(k)).fold(f64::INFINITY, f64::min);
        let tied: Vec<usize> = active.iter().copied().filter(|&k| key(k) - best <= deriv_tol).collect();
        *tied
            .iter()
            .min_by(|&&a, &&b| f.d2[a].total_cmp(&f.d2[b]).then(a.cmp(&b)))
            .expect("active set non-empty")
    };
    let right_branch = pick(&|k| f.d1[k]);
    let left_branch = pick(&|k| -f.d1[k]);
    MinEigen {
        lambda,
        left_deriv,
        right_deriv,
        right_second: f.d2[right_branch],
        left_second: f.d2[left_branch],
        active,
        right_branch,
        left_branch,
    }
}

/// Bisection on a sign change of `f` over `[lo, hi]`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-15 {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ordinary least-squares slope and RMS residual.
fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_grid() -> AngleGrid {
        AngleGrid::new(1024).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(AngleGrid::new(4096).is_ok());
        assert!(matches!(AngleGrid::new(256), Err(Error::GridSize(256))));
        assert!(AngleGrid::new(1000).is_err());
        assert!(AngleGrid::new(1 << 21).is_err());
        let g = AngleGrid::new(512).unwrap();
        assert_eq!(g.nearest(TAU - 1e-9), 0);
        assert_eq!(g.nearest(PI), 256);
    }

    #[test]
    fn diag_one_i_branches_are_cos_and_sin() {
        let a = Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let t = EigenCurveTable::track(&a, small_grid()).unwrap();
        // Branch 0 starts as the smaller value at θ = 0: sin 0 = 0 < cos 0 = 1.
        for f in t.frames() {
            assert!((f.values[0] - f.theta.sin()).abs() < 1e-14);
            assert!((f.values[1] - f.theta.cos()).abs() < 1e-14);
        }
        assert!((t.branch_derivative(1, 0.0).unwrap()).abs() < 1e-15);
        assert!((t.branch_derivative(1, FRAC_PI_2).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(t.branch_derivative(2, 0.0), Err(Error::BranchOutOfRange { .. })));
    }

    #[test]
    fn nilpotent_branches_are_constant() {
        let a = Matrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        let t = EigenCurveTable::track(&a, small_grid()).unwrap();
        for f in t.frames() {
            assert!((f.values[0] + 1.0).abs() < 1e-13 && (f.values[1] - 1.0).abs() < 1e-13);
            assert!(f.d1[0].abs() < 1e-13);
            let z = generating_point(f, 0);
            assert!((z + Complex64::from_polar(1.0, f.theta)).norm() < 1e-13);
        }
        assert!(t.find_crossings().is_empty());
    }

    #[test]
    fn min_eigenvalue_at_facet_normal() {
        let a = Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let t = EigenCurveTable::track(&a, small_grid()).unwrap();
        let m = t.min_eigenvalue(5.0 * FRAC_PI_4);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.lambda + r).abs() < 1e-14);
        assert!((m.right_deriv + r).abs() < 1e-14);
        assert!((m.left_deriv - r).abs() < 1e-14);
        let m = t.min_eigenvalue(PI);
        assert!((m.lambda + 1.0).abs() < 1e-14);
        assert!(m.left_deriv.abs() < 1e-14 && m.right_deriv.abs() < 1e-14);
    }

    #[test]
    fn transversal_crossings_of_cos_and_sin() {
        let a = Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let t = EigenCurveTable::track(&a, small_grid()).unwrap();
        let xs = t.find_crossings();
        assert_eq!(xs.len(), 2);
        assert!((xs[0].theta - FRAC_PI_4).abs() < 1e-12);
        assert!((xs[1].theta - 5.0 * FRAC_PI_4).abs() < 1e-12);
        for x in &xs {
            assert_eq!(x.contact_order, 0);
            assert!((x.exponent - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn hermitian_diagonal_branches() {
        let a = Matrix::from_real_rows(&[&[2.0, 0.0], &[0.0, -0.5]]).unwrap();
        let t = EigenCurveTable::track(&a, small_grid()).unwrap();
        let xs = t.find_crossings();
        let angles: Vec<f64> = xs.iter().map(|x| x.theta).collect();
        assert_eq!(angles.len(), 2);
        assert!((angles[0] - FRAC_PI_2).abs() < 1e-12 && (angles[1] - 3.0 * FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn tangency_has_contact_order_one() {
        let a = Matrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)])
            .direct_sum(&Matrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap());
        let t = EigenCurveTable::track(&a, AngleGrid::default()).unwrap();
        let xs = t.find_crossings();
        let at_pi: Vec<_> = xs.iter().filter(|x| (x.theta - PI).abs() < 1e-9 && x.involves_minimum).collect();
        assert_eq!(at_pi.len(), 1, "{xs:?}");
        assert_eq!(at_pi[0].contact_order, 1);
        assert!((at_pi[0].exponent - 2.0).abs() < 0.05);
    }

    #[test]
    fn second_derivative_matches_branch_shape() {
        let a = Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let t = EigenCurveTable::track(&a, small_grid()).unwrap();
        for theta in [0.3, 1.1, 2.5, 4.0] {
            let f = t.frame_at(theta);
            assert!((f.d2[0] + theta.sin()).abs() < 1e-12);
            assert!((f.d2[1] + theta.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_state_energy_rescaling() {
        let a = Matrix::from_rows(&[vec![c(0.3, 1.0), c(0.5, -0.2)], vec![c(-0.4, 0.1), c(-1.0, 0.2)]])
            .unwrap();
        let t = EigenCurveTable::track(&a, small_grid()).unwrap();
        for g in [-3.0, -0.5, 0.0, 0.7, 10.0] {
            let h = t.parts().h0.combine(1.0, &t.parts().h1, g);
            let e0 = eigh(&h).values[0];
            assert!((t.ground_state_energy(g) - e0).abs() < 1e-12);
        }
    }
}
