//! Polar dual `K* = {u : 1 + ⟨u, z⟩ ≥ 0 for all z ∈ K}` of the numerical
//! range `K = W − c`, with `c = tr(A)/d` moved to the origin.
//!
//! The radial function of `K*` is `r(φ) = −1/h(φ)` where `h` is the support
//! function of `K`, so the dual boundary is `φ ↦ e^{iφ} r(φ)`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::NumericalRange;
use crate::linalg::{dot, unit, IMAG};

/// One boundary sample of the dual body.
#[derive(Clone, Copy, Debug)]
pub struct DualSample {
    pub phi: f64,
    pub r: f64,
    pub point: Complex64,
}

/// Sampled boundary of `K*`.
#[derive(Clone, Debug)]
pub struct DualBody {
    pub origin_shift: Complex64,
    pub samples: Vec<DualSample>,
}

/// Step of the central differences used for normals of the dual curve.
const NORMAL_STEP: f64 = 1e-5;

/// Samples the dual body on the range's angle grid.
pub fn dualize(range: &NumericalRange) -> Result<DualBody> {
    if range.degenerate_shape().is_some() {
        return Err(Error::DualUndefined);
    }
    let grid = range.table().grid();
    let samples = grid
        .angles()
        .map(|phi| {
            let h = range.centered_support(phi);
            let r = -1.0 / h;
            DualSample { phi, r, point: unit(phi) * r }
        })
        .collect::<Vec<_>>();
    if let Some(bad) = samples.iter().find(|s| !(s.r.is_finite() && s.r > 0.0)) {
        return Err(Error::ToleranceBreakdown(format!("barycenter not interior at φ = {}", bad.phi)));
    }
    Ok(DualBody { origin_shift: range.barycenter(), samples })
}

impl DualBody {
    /// Vertices of the polygon dual to the sampled points, i.e. of the
    /// polygon circumscribed to `K` by the supporting lines at the sample
    /// angles.
    pub fn bidual_vertices(&self) -> Vec<Complex64> {
        let n = self.samples.len();
        (0..n)
            .map(|j| {
                let a = &self.samples[j];
                let b = &self.samples[(j + 1) % n];
                // Lines ⟨e^{iφ}, z⟩ = −1/r.
                let (la, lb) = (-1.0 / a.r, -1.0 / b.r);
                let det = (b.phi - a.phi).sin();
                Complex64::new(
                    (la * b.phi.sin() - lb * a.phi.sin()) / det,
                    (a.phi.cos() * lb - b.phi.cos() * la) / det,
                )
            })
            .collect()
    }

    /// Support function of `(K*)*` at the sample angles, from the polygon
    /// vertices alone.
    pub fn bidual_support(&self) -> Vec<f64> {
        let vertices = self.bidual_vertices();
        self.samples
            .iter()
            .map(|s| {
                let e = unit(s.phi);
                vertices.iter().map(|&v| dot(e, v)).fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Support function of `K*` in direction `e^{iψ}` over the samples.
    pub fn support(&self, psi: f64) -> f64 {
        let e = unit(psi);
        self.samples.iter().map(|s| dot(e, s.point)).fold(f64::INFINITY, f64::min)
    }

    /// CSV export: `phi,r,re_dual,im_dual`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("phi,r,re_dual,im_dual\n");
        for d in &self.samples {
            let _ = writeln!(s, "{},{},{},{}", d.phi, d.r, d.point.re, d.point.im);
        }
        s
    }
}

/// Dual boundary point in direction `φ`, evaluated from the range.
fn dual_point(range: &NumericalRange, phi: f64) -> Complex64 {
    unit(phi) * (-1.0 / range.centered_support(phi))
}

/// Inner unit normal of the dual curve at direction `φ`.
fn dual_inner_normal(range: &NumericalRange, phi: f64) -> Complex64 {
    let t = dual_point(range, phi + NORMAL_STEP) - dual_point(range, phi - NORMAL_STEP);
    let n = IMAG * t;
    n / n.norm()
}

/// Largest angle between the inner normal of `K*` at the dual point and the
/// direction of the corresponding boundary point of `K`, over grid angles
/// away from singular normals.
pub fn gauss_map_deviation(range: &NumericalRange) -> f64 {
    let normals = range.singular_normals();
    let c = range.barycenter();
    range
        .table()
        .grid()
        .angles()
        .filter(|&phi| normals.iter().all(|&a| crate::eigencurves::angle_diff(phi, a).abs() > 4.0 * NORMAL_STEP))
        .map(|phi| {
            let z = range.boundary_point(phi) - c;
            let n = dual_inner_normal(range, phi);
            (n / (z / z.norm())).arg().abs()
        })
        .fold(0.0, f64::max)
}

/// Dual regular exposed point conjugate to the boundary point `z` of `W`
/// (given in the original coordinates). The result is in the coordinates of
/// the dual body, whose origin is the barycenter of `W`.
pub fn conjugate_face(range: &NumericalRange, z: Complex64) -> Result<Complex64> {
    let theta = regular_normal_of(range, z)?;
    Ok(dual_point(range, theta))
}

/// Inner normal angle of a regular exposed point, or an error when `z` is a
/// corner, lies on a facet or off the boundary.
pub fn regular_normal_of(range: &NumericalRange, z: Complex64) -> Result<f64> {
    let grid = range.table().grid();
    let scale = range.scale();
    let (j, _) = (0..grid.len())
        .map(|j| (j, (range.support_at_grid(j).x_plus - z).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let t0 = grid.angle(j);
    let step = grid.step();
    let theta = golden_min(|t| (range.boundary_point(t) - z).norm(), t0 - step, t0 + step);
    let s = range.support(theta);
    let hit = (s.x_plus - z).norm();
    if hit > 1e-6 * scale {
        return Err(Error::NotRegularExposed);
    }
    let partition = range.arc_partition();
    let near_singular = partition
        .singular_normals
        .iter()
        .any(|&a| crate::eigencurves::angle_diff(theta, a).abs() < 1e-6);
    let in_corner = partition.arc_of(theta).is_some_and(|i| partition.arcs[i].corner.is_some());
    if near_singular || in_corner || !s.is_regular_normal {
        return Err(Error::NotRegularExposed);
    }
    Ok(crate::eigencurves::wrap_angle(theta))
}

/// Maps a dual point back to `W` using only the dual body's radial function:
/// the inner normal `n` of `K*` at `u` and `n · (−1/h_{K*}(n))`, shifted back
/// to the original coordinates.
pub fn conjugate_back(range: &NumericalRange, dual: &DualBody, u: Complex64) -> Complex64 {
    let n = dual_inner_normal(range, u.arg());
    let psi = n.arg();
    // The dual support minimizer is near the direction of u; bracket it on
    // the samples and polish on the continuous radial function.
    let e = unit(psi);
    let (j, _) = dual
        .samples
        .iter()
        .enumerate()
        .map(|(j, s)| (j, dot(e, s.point)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty dual");
    let phi0 = dual.samples[j].phi;
    let step = range.table().grid().step();
    let phi = golden_min(|p| dot(e, dual_point(range, p)), phi0 - step, phi0 + step);
    let h = dot(e, dual_point(range, phi));
    n * (-1.0 / h) + dual.origin_shift
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}
