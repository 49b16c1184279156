//! Boundary of the numerical range from its support function.
//!
//! For an inner normal `e^{iθ}` the supporting line of `W` is
//! `{z : ⟨e^{iθ}, z⟩ = λ(θ)}` and it touches `W` in the segment between
//! `x_−(θ)` and `x_+(θ)`, built from the one-sided derivatives of `λ`.
//! Angles where the two differ are singular normals (facets); the arcs between
//! them either collapse to a corner or sweep a curved piece of the boundary.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::eigencurves::{angle_diff, bisect, min_of_frame, wrap_angle, AngleGrid, EigenCurveTable, MinEigen};
use crate::error::{Error, Result};
use crate::linalg::{eigh, unit, vec_norm, Matrix, RealParts, IMAG};

/// Absolute tolerances derived from `‖A‖`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Minimal facet length; shorter supporting segments count as points.
    pub facet: f64,
    /// Upper bound for `λ + λ''` on a collapsed (corner) arc.
    pub flat: f64,
}

impl Tolerances {
    pub fn for_norm(norm: f64) -> Self {
        Self { facet: 1e-7 * (1.0 + norm), flat: 1e-8 * norm.max(f64::MIN_POSITIVE) }
    }
}

/// Side of a boundary point along the counter-clockwise boundary orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Towards decreasing normal angle.
    Clockwise,
    /// Towards increasing normal angle.
    CounterClockwise,
}

/// Support data at one normal angle.
#[derive(Clone, Debug)]
pub struct BoundarySample {
    pub theta: f64,
    pub lambda: f64,
    pub left_deriv: f64,
    pub right_deriv: f64,
    /// `λ''` when both one-sided second derivatives agree.
    pub second: Option<f64>,
    pub x_plus: Complex64,
    pub x_minus: Complex64,
    pub is_regular_normal: bool,
}

#[derive(Clone, Debug)]
pub struct FacetRecord {
    pub alpha: f64,
    /// `(x_−(α), x_+(α))`.
    pub endpoints: (Complex64, Complex64),
    pub length: f64,
}

#[derive(Clone, Debug)]
pub struct CornerRecord {
    pub z: Complex64,
    pub facet_angles: (f64, f64),
    pub splitting_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremeKind {
    RegularExposed,
    NonExposed,
    Corner,
}

impl ExtremeKind {
    pub fn facet_count(self) -> usize {
        match self {
            ExtremeKind::RegularExposed => 0,
            ExtremeKind::NonExposed => 1,
            ExtremeKind::Corner => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ExtremeKind::RegularExposed => "regular_exposed",
            ExtremeKind::NonExposed => "non_exposed",
            ExtremeKind::Corner => "corner",
        }
    }
}

/// Smoothness of the boundary at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothnessOrder {
    Analytic,
    /// The boundary is `C^k` but not `C^{k+1}` there.
    Finite(u32),
}

#[derive(Clone, Debug)]
pub struct ExtremePointRecord {
    pub z: Complex64,
    pub kind: ExtremeKind,
    /// Normal cone `[start, end]`; a single angle for exposed points.
    pub normal: (f64, f64),
    /// `(ρ_−, ρ_+)`, `+∞` on the side of a facet.
    pub radii: (f64, f64),
    pub maximal_order: Option<SmoothnessOrder>,
    /// Branch pair whose crossing at this normal makes the point special.
    pub crossing: Option<(usize, usize)>,
}

impl ExtremePointRecord {
    pub fn facet_count(&self) -> usize {
        self.kind.facet_count()
    }
}

/// Open arc of regular normals between two consecutive singular normals.
/// `end` may exceed `2π` when the arc wraps.
#[derive(Clone, Debug)]
pub struct NormalArc {
    pub start: f64,
    pub end: f64,
    /// Set when the whole arc maps to one boundary point.
    pub corner: Option<Complex64>,
}

impl NormalArc {
    pub fn contains(&self, theta: f64) -> bool {
        let t = wrap_angle(theta - self.start);
        t > 0.0 && t < self.end - self.start
    }

    pub fn midpoint(&self) -> f64 {
        wrap_angle(0.5 * (self.start + self.end))
    }
}

#[derive(Clone, Debug)]
pub struct ArcPartition {
    pub singular_normals: Vec<f64>,
    /// `arcs[i]` starts at `singular_normals[i]`; a single full circle when
    /// there are no singular normals.
    pub arcs: Vec<NormalArc>,
}

impl ArcPartition {
    /// Index of the arc containing `theta`, `None` on a singular normal.
    pub fn arc_of(&self, theta: f64) -> Option<usize> {
        if self.singular_normals.is_empty() {
            return Some(0);
        }
        self.arcs.iter().position(|a| a.contains(theta))
    }

    pub fn corner_arcs(&self) -> impl Iterator<Item = (usize, &NormalArc)> {
        self.arcs.iter().enumerate().filter(|(_, a)| a.corner.is_some())
    }
}

/// `W` when it has empty interior.
#[derive(Clone, Debug, PartialEq)]
pub enum DegenerateRange {
    Point(Complex64),
    Segment(Complex64, Complex64),
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub facets: Vec<FacetRecord>,
    pub corners: Vec<CornerRecord>,
    pub extreme_points: Vec<ExtremePointRecord>,
    pub partition: ArcPartition,
}

/// Either a full classification or the degenerate description.
#[derive(Clone, Debug)]
pub enum BoundaryShape {
    Regular(Classification),
    Degenerate(DegenerateRange),
}

/// Orientation rate `α'` of the reverse Gauss map sampled on the grid.
#[derive(Clone, Debug)]
pub struct OrientationReport {
    pub positive: bool,
    pub min_rate: f64,
}

/// Numerical range of a matrix with its tracked eigenvalue branches.
#[derive(Clone, Debug)]
pub struct NumericalRange {
    table: EigenCurveTable,
    tol: Tolerances,
    barycenter: Complex64,
}

/// Regular exposed samples emitted per classification, spread over the grid.
const REGULAR_SAMPLE_TARGET: usize = 256;

impl NumericalRange {
    pub fn new(a: &Matrix, grid: AngleGrid) -> Result<Self> {
        let table = EigenCurveTable::track(a, grid)?;
        let tol = Tolerances::for_norm(table.norm());
        let barycenter = a.trace() / a.dim() as f64;
        Ok(Self { table, tol, barycenter })
    }

    /// Overrides the facet tolerance.
    pub fn with_facet_tolerance(mut self, facet: f64) -> Result<Self> {
        if !(facet.is_finite() && facet > 0.0) {
            return Err(Error::InvalidInput(format!("facet tolerance must be positive, got {facet}")));
        }
        self.tol.facet = facet;
        Ok(self)
    }

    pub fn table(&self) -> &EigenCurveTable {
        &self.table
    }

    pub fn matrix(&self) -> &Matrix {
        self.table.matrix()
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol
    }

    pub fn barycenter(&self) -> Complex64 {
        self.barycenter
    }

    pub fn scale(&self) -> f64 {
        self.table.scale()
    }

    fn min_at_grid(&self, j: usize) -> MinEigen {
        min_of_frame(self.table.frame(j), self.table.tie_tol(), 1e-9 * self.scale())
    }

    fn sample_from(&self, theta: f64, m: &MinEigen) -> BoundarySample {
        let e = unit(theta);
        let x_plus = e * (m.lambda + IMAG * m.right_deriv);
        let x_minus = e * (m.lambda + IMAG * m.left_deriv);
        let second = ((m.right_second - m.left_second).abs() <= 1e-7 * self.scale()).then_some(m.right_second);
        BoundarySample {
            theta,
            lambda: m.lambda,
            left_deriv: m.left_deriv,
            right_deriv: m.right_deriv,
            second,
            x_plus,
            x_minus,
            is_regular_normal: (x_plus - x_minus).norm() <= self.tol.facet,
        }
    }

    /// Support data at inner normal `e^{iθ}`.
    pub fn support(&self, theta: f64) -> BoundarySample {
        self.sample_from(theta, &self.table.min_eigenvalue(theta))
    }

    /// Support data at grid angle `j`.
    pub fn support_at_grid(&self, j: usize) -> BoundarySample {
        let theta = self.table.grid().angle(j);
        self.sample_from(theta, &self.min_at_grid(j))
    }

    /// Reverse Gauss map `x_W(e^{iθ})`, i.e. `x_+(θ)`.
    pub fn boundary_point(&self, theta: f64) -> Complex64 {
        self.support(theta).x_plus
    }

    /// Angles whose supporting line meets `W` in a facet, ascending.
    pub fn singular_normals(&self) -> Vec<f64> {
        let n = self.table.grid().len();
        let mins: Vec<MinEigen> = (0..n).map(|j| self.min_at_grid(j)).collect();
        let mut out: Vec<f64> = Vec::new();
        for j in 0..n {
            let m0 = &mins[j];
            let t0 = self.table.grid().angle(j);
            if m0.left_deriv - m0.right_deriv > self.tol.facet {
                out.push(t0);
                continue;
            }
            let m1 = &mins[(j + 1) % n];
            if m1.left_deriv - m1.right_deriv > self.tol.facet {
                continue;
            }
            let (k, l) = (m0.right_branch, m1.left_branch);
            if k == l || self.table.identical(k, l) {
                continue;
            }
            let t1 = t0 + self.table.grid().step();
            let diff = |t: f64| {
                let f = self.table.frame_at(t);
                f.values[k] - f.values[l]
            };
            if diff(t0) * diff(t1) >= 0.0 {
                continue;
            }
            let alpha = bisect(diff, t0, t1);
            let s = self.support(alpha);
            if !s.is_regular_normal {
                out.push(wrap_angle(alpha));
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| angle_diff(*a, *b).abs() < 1e-9);
        if out.len() > 1 && angle_diff(out[0], *out.last().unwrap()).abs() < 1e-9 {
            out.pop();
        }
        out
    }

    /// Splits the normal circle at the singular normals and marks the arcs
    /// on which the reverse Gauss map is constant.
    pub fn arc_partition(&self) -> ArcPartition {
        let normals = self.singular_normals();
        let m = normals.len();
        let mut arcs = Vec::with_capacity(m.max(1));
        if m == 0 {
            arcs.push(NormalArc { start: 0.0, end: TAU, corner: None });
        }
        for i in 0..m {
            let start = normals[i];
            let mut end = normals[(i + 1) % m];
            if end <= start {
                end += TAU;
            }
            let mut arc = NormalArc { start, end, corner: None };
            if self.arc_is_constant(&arc) {
                arc.corner = Some(self.line_intersection(start, end));
            }
            arcs.push(arc);
        }
        ArcPartition { singular_normals: normals, arcs }
    }

    /// An arc collapses to a point when `λ + λ''` vanishes along it, tested
    /// at interior points together with the spread of `x_W`.
    fn arc_is_constant(&self, arc: &NormalArc) -> bool {
        const PROBES: usize = 9;
        let width = arc.end - arc.start;
        let points: Vec<Complex64> = (1..=PROBES)
            .map(|i| {
                let t = arc.start + width * i as f64 / (PROBES + 1) as f64;
                let s = self.table.min_eigenvalue(t);
                if (s.lambda + s.right_second).abs() > self.tol.flat.max(1e-12) {
                    return Complex64::new(f64::NAN, f64::NAN);
                }
                self.sample_from(t, &s).x_plus
            })
            .collect();
        points.iter().all(|p| (p - points[0]).norm() <= self.tol.facet)
    }

    /// Intersection of the supporting lines at `a` and `b`.
    fn line_intersection(&self, a: f64, b: f64) -> Complex64 {
        let (la, lb) = (self.support(a).lambda, self.support(b).lambda);
        let det = (b - a).sin();
        let x = (la * b.sin() - lb * a.sin()) / det;
        let y = (a.cos() * lb - b.cos() * la) / det;
        Complex64::new(x, y)
    }

    /// Corners with their splitting residual
    /// `max(‖Ax − zx‖, ‖A*x − z̄x‖)` on a ground vector of the arc.
    pub fn detect_corners(&self) -> Result<Vec<CornerRecord>> {
        corners_of(self, &self.arc_partition())
    }

    /// One-sided radius of curvature `−(λ + λ'')` of the boundary at the
    /// point with normal `θ`; `+∞` at singular normals.
    pub fn radius_of_curvature(&self, theta: f64, side: Side) -> Result<f64> {
        let m = self.table.min_eigenvalue(theta);
        if m.left_deriv - m.right_deriv > self.tol.facet {
            return Ok(f64::INFINITY);
        }
        let rho = self.one_sided_radius(&m, side);
        if rho <= self.tol.flat.max(1e-12) {
            return Err(Error::NormalConeInterior);
        }
        Ok(rho)
    }

    fn one_sided_radius(&self, m: &MinEigen, side: Side) -> f64 {
        match side {
            Side::Clockwise => -(m.lambda + m.left_second),
            Side::CounterClockwise => -(m.lambda + m.right_second),
        }
    }

    /// `W` reduced to a point or segment when `A − tr(A)/d` is a multiple of
    /// a Hermitian matrix.
    pub fn degenerate_shape(&self) -> Option<DegenerateRange> {
        degenerate_shape(self.matrix())
    }

    /// Full extreme-point classification.
    pub fn classify(&self) -> Result<BoundaryShape> {
        if let Some(d) = self.degenerate_shape() {
            return Ok(BoundaryShape::Degenerate(d));
        }
        let partition = self.arc_partition();
        let corners = corners_of(self, &partition)?;
        let m = partition.singular_normals.len();
        let mut facets = Vec::with_capacity(m);
        let mut points = Vec::new();

        for c in &corners {
            points.push(ExtremePointRecord {
                z: c.z,
                kind: ExtremeKind::Corner,
                normal: c.facet_angles,
                radii: (f64::INFINITY, f64::INFINITY),
                maximal_order: None,
                crossing: None,
            });
        }

        for (i, &alpha) in partition.singular_normals.iter().enumerate() {
            let mm = self.table.min_eigenvalue(alpha);
            let s = self.sample_from(alpha, &mm);
            facets.push(FacetRecord {
                alpha,
                endpoints: (s.x_minus, s.x_plus),
                length: (s.x_plus - s.x_minus).norm(),
            });
            let before = &partition.arcs[(i + m - 1) % m];
            let after = &partition.arcs[i];
            if before.corner.is_none() {
                points.push(ExtremePointRecord {
                    z: s.x_minus,
                    kind: ExtremeKind::NonExposed,
                    normal: (alpha, alpha),
                    radii: (self.one_sided_radius(&mm, Side::Clockwise), f64::INFINITY),
                    maximal_order: Some(SmoothnessOrder::Finite(1)),
                    crossing: None,
                });
            }
            if after.corner.is_none() {
                points.push(ExtremePointRecord {
                    z: s.x_plus,
                    kind: ExtremeKind::NonExposed,
                    normal: (alpha, alpha),
                    radii: (f64::INFINITY, self.one_sided_radius(&mm, Side::CounterClockwise)),
                    maximal_order: Some(SmoothnessOrder::Finite(1)),
                    crossing: None,
                });
            }
        }

        points.extend(self.regular_samples(&partition));
        Ok(BoundaryShape::Regular(Classification { facets, corners, extreme_points: points, partition }))
    }

    /// Regular exposed points: a spread of grid normals plus every normal at
    /// which two minimal branches touch without a kink.
    fn regular_samples(&self, partition: &ArcPartition) -> Vec<ExtremePointRecord> {
        let grid = self.table.grid();
        let stride = (grid.len() / REGULAR_SAMPLE_TARGET).max(1);
        let regular = |t: f64| partition.arc_of(t).is_some_and(|i| partition.arcs[i].corner.is_none());
        let mut out = Vec::new();
        let record = |t: f64, m: &MinEigen, order, crossing| ExtremePointRecord {
            z: self.sample_from(t, m).x_plus,
            kind: ExtremeKind::RegularExposed,
            normal: (t, t),
            radii: (self.one_sided_radius(m, Side::Clockwise), self.one_sided_radius(m, Side::CounterClockwise)),
            maximal_order: Some(order),
            crossing,
        };
        let crossings: Vec<_> = self
            .table
            .find_crossings()
            .into_iter()
            .filter(|c| c.involves_minimum && c.contact_order >= 1 && regular(c.theta))
            .collect();
        for j in (0..grid.len()).step_by(stride) {
            let t = grid.angle(j);
            if !regular(t) || crossings.iter().any(|c| angle_diff(c.theta, t).abs() < 1e-9) {
                continue;
            }
            out.push(record(t, &self.min_at_grid(j), SmoothnessOrder::Analytic, None));
        }
        for c in crossings {
            let e = c.exponent.round() as i64;
            // The minimum swaps branches only across an odd-order contact.
            let order = if e >= 3 && e % 2 == 1 { SmoothnessOrder::Finite(e as u32 - 1) } else { SmoothnessOrder::Analytic };
            out.push(record(c.theta, &self.table.min_eigenvalue(c.theta), order, Some(c.branches)));
        }
        out.sort_by(|a, b| a.normal.0.total_cmp(&b.normal.0));
        out
    }

    /// Support function and its derivatives after moving the barycenter to 0.
    fn shifted(&self, theta: f64, m: &MinEigen) -> (f64, f64, f64) {
        let rot = unit(-theta) * self.barycenter;
        let h = m.lambda - rot.re;
        let dh = m.right_deriv - rot.im;
        let curv = m.lambda + m.right_second;
        (h, dh, curv)
    }

    /// Samples `α' = h (h + h'') / (h² + h'²)` of the reverse Gauss map in
    /// polar angle, with the barycenter as origin.
    pub fn orientation_check(&self) -> OrientationReport {
        let n = self.table.grid().len();
        let mut min_rate = f64::INFINITY;
        for j in 0..n {
            let m = self.min_at_grid(j);
            if m.left_deriv - m.right_deriv > self.tol.facet {
                continue;
            }
            let (h, dh, curv) = self.shifted(self.table.grid().angle(j), &m);
            let rate = h * curv / (h * h + dh * dh);
            min_rate = min_rate.min(rate);
        }
        OrientationReport { positive: min_rate >= -1e-9, min_rate }
    }

    /// Largest `(λ + λ'')/‖A‖` over grid normals on curved arcs.
    pub fn concavity_defect(&self) -> f64 {
        let n = self.table.grid().len();
        (0..n)
            .map(|j| self.min_at_grid(j))
            .filter(|m| m.left_deriv - m.right_deriv <= self.tol.facet)
            .map(|m| (m.lambda + m.right_second) / self.scale())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Support function of the range with the barycenter moved to the origin.
    pub fn centered_support(&self, theta: f64) -> f64 {
        self.support(theta).lambda - (unit(-theta) * self.barycenter).re
    }

    /// CSV export over the grid.
    pub fn boundary_csv(&self, partition: &ArcPartition) -> String {
        let mut s = String::from("theta,lambda,dl_left,dl_right,re_x_plus,im_x_plus,re_x_minus,im_x_minus,kind\n");
        for j in 0..self.table.grid().len() {
            let b = self.support_at_grid(j);
            let kind = if !b.is_regular_normal {
                "singular"
            } else {
                match partition.arc_of(b.theta) {
                    Some(i) if partition.arcs[i].corner.is_some() => "corner",
                    Some(_) => "regular",
                    None => "singular",
                }
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                b.theta, b.lambda, b.left_deriv, b.right_deriv, b.x_plus.re, b.x_plus.im, b.x_minus.re, b.x_minus.im, kind
            );
        }
        s
    }

    /// Static SVG of the boundary with facets and special points marked.
    pub fn boundary_svg(&self, shape: &BoundaryShape) -> String {
        let n = self.table.grid().len();
        let mut pts: Vec<Complex64> = Vec::with_capacity(2 * n);
        for j in 0..n {
            let b = self.support_at_grid(j);
            pts.push(b.x_minus);
            pts.push(b.x_plus);
        }
        svg_document(&pts, shape)
    }
}

fn corners_of(range: &NumericalRange, partition: &ArcPartition) -> Result<Vec<CornerRecord>> {
    let a = range.matrix();
    let adj = a.adjoint();
    let mut out = Vec::new();
    for (_, arc) in partition.corner_arcs() {
        let z = arc.corner.expect("corner arc");
        let mid = arc.midpoint();
        let f = range.table.frame_at(mid);
        let m = min_of_frame(&f, range.table.tie_tol(), 1e-9 * range.scale());
        let x = &f.vectors[m.right_branch];
        let ax = a.matvec(x);
        let adx = adj.matvec(x);
        let r1: Vec<Complex64> = ax.iter().zip(x).map(|(p, q)| p - z * q).collect();
        let r2: Vec<Complex64> = adx.iter().zip(x).map(|(p, q)| p - z.conj() * q).collect();
        let residual = vec_norm(&r1).max(vec_norm(&r2));
        if residual > 1e-7 * range.scale() {
            return Err(Error::ToleranceBreakdown(format!(
                "corner candidate {z} fails the splitting test (residual {residual:.3e})"
            )));
        }
        out.push(CornerRecord { z, facet_angles: (arc.start, wrap_angle(arc.end)), splitting_residual: residual });
    }
    Ok(out)
}

/// Detects `A − c·I = e^{iφ}K` with `K` Hermitian, `c = tr(A)/d`.
pub fn degenerate_shape(a: &Matrix) -> Option<DegenerateRange> {
    let d = a.dim();
    let c = a.trace() / d as f64;
    let shifted = a.sub(&Matrix::identity(d).scale(c));
    let parts = RealParts::new(&shifted);
    let (p, q) = (parts.h0.matrix(), parts.h1.matrix());
    let ip = |x: &Matrix, y: &Matrix| x.data().iter().zip(y.data()).map(|(u, v)| (u.conj() * v).re).sum::<f64>();
    // ‖H1 cos φ − H0 sin φ‖² as a quadratic form in (cos φ, sin φ).
    let (g11, g12, g22) = (ip(q, q), -ip(q, p), ip(p, p));
    let mean = 0.5 * (g11 + g22);
    let rad = (0.25 * (g11 - g22).powi(2) + g12 * g12).sqrt();
    let min_eig = (mean - rad).max(0.0);
    let tol = 1e-9 * a.norm_fro().max(1.0);
    if min_eig.sqrt() > tol {
        return None;
    }
    // Eigenvector of the smaller eigenvalue gives (cos φ, sin φ).
    let phi = if rad == 0.0 { 0.0 } else { (min_eig - g11).atan2(g12) };
    let phi = if g12 == 0.0 && rad != 0.0 { if g11 <= g22 { 0.0 } else { std::f64::consts::FRAC_PI_2 } } else { phi };
    let k = parts.h0.combine(phi.cos(), &parts.h1, phi.sin());
    let es = eigh(&k);
    let lo = es.values[0];
    let hi = es.values[d - 1];
    let dir = unit(phi);
    if hi - lo <= tol {
        Some(DegenerateRange::Point(c))
    } else {
        Some(DegenerateRange::Segment(c + dir * lo, c + dir * hi))
    }
}

fn svg_document(path: &[Complex64], shape: &BoundaryShape) -> String {
    let mut xs: Vec<f64> = path.iter().map(|p| p.re).collect();
    let mut ys: Vec<f64> = path.iter().map(|p| p.im).collect();
    if let BoundaryShape::Degenerate(d) = shape {
        let (a, b) = match d {
            DegenerateRange::Point(p) => (*p, *p),
            DegenerateRange::Segment(a, b) => (*a, *b),
        };
        xs.extend([a.re, b.re]);
        ys.extend([a.im, b.im]);
    }
    let fold = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let (x0, x1) = fold(&xs);
    let (y0, y1) = fold(&ys);
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = 0.08 * span;
    let stroke = span / 300.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}" width="600" height="600">"#,
        x0 - pad,
        -(y1 + pad),
        x1 - x0 + 2.0 * pad,
        y1 - y0 + 2.0 * pad
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke:.6}">"#);
    match shape {
        BoundaryShape::Degenerate(DegenerateRange::Point(p)) => {
            let _ = writeln!(s, r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="black"/>"#, p.re, p.im, 3.0 * stroke);
        }
        BoundaryShape::Degenerate(DegenerateRange::Segment(a, b)) => {
            let _ = writeln!(
                s,
                r#"<line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="black"/>"#,
                a.re, a.im, b.re, b.im
            );
        }
        BoundaryShape::Regular(c) => {
            // Values that print as zero are written without a sign.
            let coord = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
            let mut vertices: Vec<String> =
                path.iter().map(|p| format!("{:.6} {:.6}", coord(p.re), coord(p.im))).collect();
            vertices.dedup();
            while vertices.len() > 1 && vertices.first() == vertices.last() {
                vertices.pop();
            }
            s.push_str(r#"<path stroke="black" d=""#);
            for (i, v) in vertices.iter().enumerate() {
                let _ = write!(s, "{}{v} ", if i == 0 { "M" } else { "L" });
            }
            s.push_str("Z\"/>\n");
            for f in &c.facets {
                let (a, b) = f.endpoints;
                let _ = writeln!(
                    s,
                    r#"<line class="facet" x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="steelblue" stroke-width="{:.6}"/>"#,
                    a.re,
                    a.im,
                    b.re,
                    b.im,
                    2.0 * stroke
                );
            }
            for p in &c.extreme_points {
                match p.kind {
                    ExtremeKind::Corner => {
                        let _ = writeln!(
                            s,
                            r#"<circle class="corner" cx="{:.6}" cy="{:.6}" r="{:.6}" fill="red" stroke="none"/>"#,
                            p.z.re,
                            p.z.im,
                            4.0 * stroke
                        );
                    }
                    ExtremeKind::NonExposed => {
                        let w = 6.0 * stroke;
                        let _ = writeln!(
                            s,
                            r#"<rect class="non-exposed" x="{:.6}" y="{:.6}" width="{w:.6}" height="{w:.6}" fill="green" stroke="none"/>"#,
                            p.z.re - 0.5 * w,
                            p.z.im - 0.5 * w
                        );
                    }
                    ExtremeKind::RegularExposed => {}
                }
            }
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}
