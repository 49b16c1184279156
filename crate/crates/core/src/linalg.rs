//! Dense complex matrices, the Hermitian/skew decomposition `A = H0 + i H1`,
//! and a cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Everything here is small-dimensional (d up to a few hundred) and
//! deterministic: identical input gives bit-identical output.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CVector = Vec<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        Self::new(dim, rows.concat())
    }

    /// Convenience constructor from real entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<CVector> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &z) in diag.iter().enumerate() {
            m[(k, k)] = z;
        }
        m
    }

    /// Block-diagonal matrix `self ⊕ other`.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let dim = self.dim + other.dim;
        let mut m = Matrix::zeros(dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m[(r, c)] = self[(r, c)];
            }
        }
        for r in 0..other.dim {
            for c in 0..other.dim {
                m[(self.dim + r, self.dim + c)] = other[(r, c)];
            }
        }
        m
    }

    /// Outer product `Σ_k v_k v_k*` of a family of vectors.
    pub fn projector(vectors: &[&CVector], dim: usize) -> Matrix {
        let mut m = Matrix::zeros(dim);
        for v in vectors {
            for r in 0..dim {
                for c in 0..dim {
                    m[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m[(c, r)] = self[(r, c)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut m = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    m.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        m
    }

    pub fn matvec(&self, x: &[Complex64]) -> CVector {
        (0..self.dim).map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute entry difference to `other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Spectral norm, computed from the largest eigenvalue of `A*A`.
    pub fn norm2(&self) -> f64 {
        let gram = Hermitian::new_unchecked(self.adjoint().mul(self));
        let top = eigh(&gram).values.last().copied().unwrap_or(0.0);
        top.max(0.0).sqrt()
    }

    /// Max deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// `(B + B*)/2`, exactly Hermitian.
    fn symmetrized(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m[(r, c)] = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

/// A Hermitian matrix. Construction checks the symmetry and then stores the
/// exactly symmetrized matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(Matrix);

impl Hermitian {
    /// Relative Hermitian tolerance used by [`Hermitian::new`].
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(m: Matrix) -> Result<Self> {
        let deviation = m.hermitian_defect();
        if deviation > Self::TOLERANCE * m.norm_fro().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(m.symmetrized()))
    }

    pub(crate) fn new_unchecked(m: Matrix) -> Self {
        Self(m.symmetrized())
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    /// `⟨x|H|x⟩`, real for Hermitian `H`.
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        inner(x, &self.0.matvec(x)).re
    }

    /// `⟨x|H|y⟩`.
    pub fn sandwich(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        inner(x, &self.0.matvec(y))
    }

    /// `a·self + b·other`, a real linear combination.
    pub fn combine(&self, a: f64, other: &Hermitian, b: f64) -> Hermitian {
        let data = self.0.data.iter().zip(&other.0.data).map(|(x, y)| x * a + y * b).collect();
        Hermitian(Matrix { dim: self.0.dim, data })
    }

    /// Applies a real function to the spectrum: `V f(Λ) V*`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Hermitian {
        let es = eigh(self);
        let d = self.dim();
        let mut m = Matrix::zeros(d);
        for (k, v) in es.vectors.iter().enumerate() {
            let w = f(es.values[k]);
            for r in 0..d {
                for c in 0..d {
                    m[(r, c)] += v[r] * v[c].conj() * w;
                }
            }
        }
        Hermitian(m.symmetrized())
    }
}

/// `⟨x|y⟩ = Σ conj(x_i) y_i`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `(H0, H1)` with `H0 = (A + A*)/2` and `H1 = (A − A*)/(2i)`.
pub fn split(a: &Matrix) -> (Hermitian, Hermitian) {
    let adj = a.adjoint();
    let h0 = a.add(&adj).scale_real(0.5);
    let h1 = a.sub(&adj).scale(Complex64::new(0.0, -0.5));
    (Hermitian::new_unchecked(h0), Hermitian::new_unchecked(h1))
}

/// `Re(e^{-iθ}A) = H0 cos θ + H1 sin θ`.
pub fn rotated_real_part(a: &Matrix, theta: f64) -> Hermitian {
    let (h0, h1) = split(a);
    h0.combine(theta.cos(), &h1, theta.sin())
}

/// The real and imaginary parts of a matrix, precomputed for repeated
/// evaluation of the rotated family.
#[derive(Clone, Debug)]
pub struct RealParts {
    pub h0: Hermitian,
    pub h1: Hermitian,
}

impl RealParts {
    pub fn new(a: &Matrix) -> Self {
        let (h0, h1) = split(a);
        Self { h0, h1 }
    }

    /// `Re(e^{-iθ}A)`.
    pub fn rotated(&self, theta: f64) -> Hermitian {
        self.h0.combine(theta.cos(), &self.h1, theta.sin())
    }

    /// `Im(e^{-iθ}A) = d/dθ Re(e^{-iθ}A)`.
    pub fn rotated_imag(&self, theta: f64) -> Hermitian {
        self.h0.combine(-theta.sin(), &self.h1, theta.cos())
    }
}

/// `⟨x|Ax⟩` for a unit vector `x`.
pub fn numerical_range_map(a: &Matrix, x: &[Complex64]) -> Result<Complex64> {
    if x.len() != a.dim() {
        return Err(Error::InvalidInput(format!(
            "vector length {} does not match matrix dimension {}",
            x.len(),
            a.dim()
        )));
    }
    let norm = vec_norm(x);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(inner(x, &a.matvec(x)))
}

/// Spectral decomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
}

/// Relative off-diagonal threshold at which the Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;
/// Components below this modulus are skipped when fixing the phase.
const PHASE_THRESHOLD: f64 = 1e-8;

/// Cyclic complex Jacobi eigensolver.
///
/// Eigenvectors are normalized so that their first component with modulus
/// above `1e-8` is real and positive.
pub fn eigh(h: &Hermitian) -> EigenSystem {
    let n = h.dim();
    let mut a = h.0.clone();
    let mut v = Matrix::identity(n);
    let scale = a.norm_fro();
    let target = JACOBI_TOL * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 || r < 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Skip rotations that cannot change the diagonal in floating point.
                if r < 1e-18 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U acts on columns p,q: U_pp = c, U_pq = s, U_qp = -s e^{-iφ}, U_qq = c e^{-iφ}.
                let em = phase.conj();
                let upp = Complex64::new(c, 0.0);
                let upq = Complex64::new(s, 0.0);
                let uqp = em * (-s);
                let uqq = em * c;
                // A <- A U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                }
                // A <- U* A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                // V <- V U
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the sweep order for exactly equal eigenvalues.
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: CVector = (0..n).map(|r| v[(r, k)]).collect();
            fix_phase(&mut col);
            col
        })
        .collect();
    EigenSystem { values, vectors }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Rotates `v` so that its first significant component is real positive.
pub fn fix_phase(v: &mut [Complex64]) {
    if let Some(&pivot) = v.iter().find(|z| z.norm() > PHASE_THRESHOLD) {
        let rot = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// Serializable complex entry `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// The matrix file format: `{"dim": d, "entries": [[{"re":..,"im":..},..],..]}`,
/// row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<ComplexJson>>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        let entries =
            (0..m.dim()).map(|r| m.row(r).iter().map(|&z| z.into()).collect()).collect();
        Self { dim: m.dim(), entries }
    }
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Matrix> {
        if j.entries.len() != j.dim {
            return Err(Error::InvalidInput(format!(
                "\"dim\" is {} but {} rows were given",
                j.dim,
                j.entries.len()
            )));
        }
        let rows: Vec<CVector> =
            j.entries.into_iter().map(|r| r.into_iter().map(Complex64::from).collect()).collect();
        Matrix::from_rows(&rows)
    }
}

impl Matrix {
    pub fn from_json_str(s: &str) -> Result<Matrix> {
        let j: MatrixJson = serde_json::from_str(s)?;
        Matrix::try_from(j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&MatrixJson::from(self)).expect("matrix serializes")
    }
}

/// `e^{iθ}`.
pub fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Euclidean inner product of the plane: `⟨z1, z2⟩ = Re(conj(z1) z2)`.
pub fn dot(z1: Complex64, z2: Complex64) -> f64 {
    (z1.conj() * z2).re
}

pub(crate) const IMAG: Complex64 = I;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn nilpotent() -> Matrix {
        Matrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap()
    }

    #[test]
    fn split_of_nilpotent() {
        let a = nilpotent();
        let (h0, h1) = split(&a);
        let want0 = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let want1 = Matrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
            .unwrap();
        assert!(h0.matrix().max_abs_diff(&want0) < 1e-15);
        assert!(h1.matrix().max_abs_diff(&want1) < 1e-15);
        let back = h0.matrix().add(&h1.matrix().scale(IMAG));
        assert!(back.max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn split_symmetry_cases() {
        let h = Matrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 1.0)], vec![c(2.0, -1.0), c(-3.0, 0.0)]])
            .unwrap();
        let (h0, h1) = split(&h);
        assert!(h0.matrix().max_abs_diff(&h) < 1e-15);
        assert!(h1.matrix().norm_fro() < 1e-15);

        let (g0, g1) = split(&h.scale(IMAG));
        assert!(g0.matrix().norm_fro() < 1e-15);
        assert!(g1.matrix().max_abs_diff(&h) < 1e-15);
    }

    #[test]
    fn rotation_quarter_turns() {
        let a = Matrix::from_rows(&[vec![c(1.0, 2.0), c(0.5, -1.0)], vec![c(3.0, 0.0), c(0.0, -1.0)]])
            .unwrap();
        let (h0, h1) = split(&a);
        assert!(rotated_real_part(&a, 0.0).matrix().max_abs_diff(h0.matrix()) < 1e-15);
        assert!(rotated_real_part(&a, std::f64::consts::FRAC_PI_2).matrix().max_abs_diff(h1.matrix()) < 1e-15);
    }

    #[test]
    fn nilpotent_rotations_have_unit_spectrum() {
        let a = nilpotent();
        for k in 0..16 {
            let theta = 0.41 * k as f64;
            let es = eigh(&rotated_real_part(&a, theta));
            assert!((es.values[0] + 1.0).abs() < 1e-14);
            assert!((es.values[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn eigh_diagonal_input() {
        let m = Matrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]).unwrap();
        let es = eigh(&Hermitian::new(m).unwrap());
        assert_eq!(es.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(es.vectors[0], vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(es.vectors[1], vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(es.vectors[2], vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn eigh_pauli_x() {
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let es = eigh(&Hermitian::new(m).unwrap());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((es.values[0] + 1.0).abs() < 1e-15 && (es.values[1] - 1.0).abs() < 1e-15);
        // Phase convention: first component real positive.
        assert!((es.vectors[0][0] - c(r, 0.0)).norm() < 1e-15);
        assert!((es.vectors[0][1] - c(-r, 0.0)).norm() < 1e-15);
        assert!((es.vectors[1][0] - c(r, 0.0)).norm() < 1e-15);
        assert!((es.vectors[1][1] - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigh_identity_is_degenerate_but_orthonormal() {
        let es = eigh(&Hermitian::new(Matrix::identity(4)).unwrap());
        assert_eq!(es.values, vec![1.0; 4]);
        for i in 0..4 {
            for j in 0..4 {
                let g = inner(&es.vectors[i], &es.vectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(Hermitian::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn numerical_range_map_examples() {
        let a = Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(numerical_range_map(&a, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), c(1.0, 0.0));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let x = [c(r, 0.0), c(r, 0.0)];
        assert!((numerical_range_map(&a, &x).unwrap() - c(0.5, 0.5)).norm() < 1e-15);
        assert!((numerical_range_map(&nilpotent(), &x).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            numerical_range_map(&a, &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::NotUnitVector { .. })
        ));
    }

    #[test]
    fn json_round_trip_and_schema() {
        let a = Matrix::from_rows(&[vec![c(1.0, -2.0), c(0.25, 0.0)], vec![c(0.0, 1.0), c(-1.0, 0.5)]])
            .unwrap();
        let s = a.to_json_string();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["entries"][0][0]["re"], 1.0);
        assert_eq!(v["entries"][0][0]["im"], -2.0);
        assert_eq!(Matrix::from_json_str(&s).unwrap(), a);
        assert!(Matrix::from_json_str(r#"{"dim": 2, "entries": [[{"re":1,"im":0}]]}"#).is_err());
    }
}
