//! Serializable report documents. Every top-level document carries
//! `"schema_version": 1`.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::dual::{gauss_map_deviation, DualBody};
use crate::eigencurves::CrossingRecord;
use crate::error::Result;
use crate::geometry::{BoundaryShape, DegenerateRange, ExtremePointRecord, NumericalRange, SmoothnessOrder};
use crate::linalg::{ComplexJson, MatrixJson};
use crate::maxent::{maxent_extreme, prior_inference, ContinuityReport, DensityMatrix, MaxEntResult};
use crate::oracle;

pub const SCHEMA_VERSION: u32 = 1;

/// Real number that may be `+∞`, written as the string `"inf"`.
#[derive(Clone, Copy, Debug)]
pub struct Extended(pub f64);

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Serialize)]
pub struct DegenerateJson {
    pub kind: &'static str,
    pub points: Vec<ComplexJson>,
}

impl From<&DegenerateRange> for DegenerateJson {
    fn from(d: &DegenerateRange) -> Self {
        match d {
            DegenerateRange::Point(p) => Self { kind: "point", points: vec![(*p).into()] },
            DegenerateRange::Segment(a, b) => Self { kind: "segment", points: vec![(*a).into(), (*b).into()] },
        }
    }
}

/// Document written when the range is a point or a segment.
#[derive(Serialize)]
pub struct DegenerateDoc {
    pub schema_version: u32,
    pub degenerate: DegenerateJson,
}

pub fn degenerate_json(d: &DegenerateRange) -> DegenerateDoc {
    DegenerateDoc { schema_version: SCHEMA_VERSION, degenerate: d.into() }
}

#[derive(Serialize)]
pub struct FacetJson {
    pub alpha: f64,
    pub endpoints: [ComplexJson; 2],
    pub length: f64,
}

#[derive(Serialize)]
pub struct CornerJson {
    pub z: ComplexJson,
    pub facet_angles: [f64; 2],
    pub splitting_residual: f64,
}

#[derive(Serialize)]
pub struct ExtremePointJson {
    pub z: ComplexJson,
    pub kind: &'static str,
    pub normal: [f64; 2],
    pub facet_count: usize,
    pub radii: [Extended; 2],
    /// `"analytic"`, an integer order, or null.
    pub maximal_order: serde_json::Value,
    pub crossing: Option<[usize; 2]>,
}

impl From<&ExtremePointRecord> for ExtremePointJson {
    fn from(p: &ExtremePointRecord) -> Self {
        let maximal_order = match p.maximal_order {
            Some(SmoothnessOrder::Analytic) => serde_json::Value::from("analytic"),
            Some(SmoothnessOrder::Finite(k)) => serde_json::Value::from(k),
            None => serde_json::Value::Null,
        };
        Self {
            z: p.z.into(),
            kind: p.kind.as_str(),
            normal: [p.normal.0, p.normal.1],
            facet_count: p.facet_count(),
            radii: [Extended(p.radii.0), Extended(p.radii.1)],
            maximal_order,
            crossing: p.crossing.map(|(k, l)| [k, l]),
        }
    }
}

#[derive(Serialize)]
pub struct OrientationJson {
    pub positive: bool,
    pub min_rate: f64,
}

#[derive(Serialize)]
pub struct ClassificationJson {
    pub schema_version: u32,
    pub dim: usize,
    pub norm: f64,
    pub grid: usize,
    pub degenerate: Option<DegenerateJson>,
    pub singular_normals: Vec<f64>,
    pub facets: Vec<FacetJson>,
    pub corners: Vec<CornerJson>,
    pub extreme_points: Vec<ExtremePointJson>,
    pub orientation: Option<OrientationJson>,
    pub concavity_defect: Option<f64>,
}

pub fn classification_json(range: &NumericalRange, shape: &BoundaryShape) -> ClassificationJson {
    let mut doc = ClassificationJson {
        schema_version: SCHEMA_VERSION,
        dim: range.matrix().dim(),
        norm: range.table().norm(),
        grid: range.table().grid().len(),
        degenerate: None,
        singular_normals: Vec::new(),
        facets: Vec::new(),
        corners: Vec::new(),
        extreme_points: Vec::new(),
        orientation: None,
        concavity_defect: None,
    };
    match shape {
        BoundaryShape::Degenerate(d) => doc.degenerate = Some(d.into()),
        BoundaryShape::Regular(c) => {
            doc.singular_normals = c.partition.singular_normals.clone();
            doc.facets = c
                .facets
                .iter()
                .map(|f| FacetJson { alpha: f.alpha, endpoints: [f.endpoints.0.into(), f.endpoints.1.into()], length: f.length })
                .collect();
            doc.corners = c
                .corners
                .iter()
                .map(|k| CornerJson {
                    z: k.z.into(),
                    facet_angles: [k.facet_angles.0, k.facet_angles.1],
                    splitting_residual: k.splitting_residual,
                })
                .collect();
            doc.extreme_points = c.extreme_points.iter().map(ExtremePointJson::from).collect();
            let o = range.orientation_check();
            doc.orientation = Some(OrientationJson { positive: o.positive, min_rate: o.min_rate });
            doc.concavity_defect = Some(range.concavity_defect());
        }
    }
    doc
}

#[derive(Serialize)]
pub struct CrossingJson {
    pub theta: f64,
    pub branches: [usize; 2],
    pub contact_order: u32,
    pub exponent: Extended,
    pub fit_residual: f64,
    pub involves_minimum: bool,
}

impl From<&CrossingRecord> for CrossingJson {
    fn from(c: &CrossingRecord) -> Self {
        Self {
            theta: c.theta,
            branches: [c.branches.0, c.branches.1],
            contact_order: c.contact_order,
            exponent: Extended(c.exponent),
            fit_residual: c.fit_residual,
            involves_minimum: c.involves_minimum,
        }
    }
}

#[derive(Serialize)]
pub struct WitnessJson {
    pub branches: [usize; 2],
    pub value_gap: f64,
    pub slope_gap: f64,
    pub exponent: Extended,
}

#[derive(Serialize)]
pub struct ScanPointJson {
    pub z: ComplexJson,
    pub kind: &'static str,
    pub theta: f64,
    pub index_set: Vec<usize>,
    pub maxent_continuous: bool,
    pub f_inv_strong: bool,
    pub f_inv_weak: bool,
    pub witness: Option<WitnessJson>,
    pub maxent_state: MatrixJson,
    pub prior_state: Option<MatrixJson>,
}

#[derive(Serialize)]
pub struct ScanJson {
    pub schema_version: u32,
    pub crossings: Vec<CrossingJson>,
    pub points: Vec<ScanPointJson>,
    pub discontinuities: Vec<ComplexJson>,
    /// Jump points of the prior-dependent map, when a prior was given.
    pub prior_discontinuities: Option<Vec<ComplexJson>>,
}

pub fn scan_json(
    range: &NumericalRange,
    report: &ContinuityReport,
    prior: Option<(&DensityMatrix, &[Complex64])>,
) -> Result<ScanJson> {
    let points = report
        .points
        .iter()
        .map(|p| {
            let state = maxent_extreme(range, p.z, p.theta)?.state;
            let prior_state = match prior {
                Some((rho, _)) => Some(MatrixJson::from(prior_inference(range, p.z, p.theta, rho)?.matrix())),
                None => None,
            };
            Ok(ScanPointJson {
                z: p.z.into(),
                kind: p.kind.as_str(),
                theta: p.theta,
                index_set: p.index_set.clone(),
                maxent_continuous: p.maxent_continuous,
                f_inv_strong: p.f_inv_strong,
                f_inv_weak: p.f_inv_weak,
                witness: p.witness.map(|w| WitnessJson {
                    branches: [w.branches.0, w.branches.1],
                    value_gap: w.value_gap,
                    slope_gap: w.slope_gap,
                    exponent: Extended(w.exponent),
                }),
                maxent_state: MatrixJson::from(state.matrix()),
                prior_state,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanJson {
        schema_version: SCHEMA_VERSION,
        crossings: range.table().find_crossings().iter().map(CrossingJson::from).collect(),
        points,
        discontinuities: report.discontinuities.iter().map(|&z| z.into()).collect(),
        prior_discontinuities: prior.map(|(_, jumps)| jumps.iter().map(|&z| z.into()).collect()),
    })
}

#[derive(Serialize)]
pub struct MaxEntJson {
    pub schema_version: u32,
    pub target: ComplexJson,
    pub kind: &'static str,
    pub state: MatrixJson,
    pub dual_params: Option<[f64; 2]>,
    pub entropy: f64,
    pub residual: f64,
    pub normal: Option<f64>,
    /// Prior-dependent value at an extreme target, when a prior was given.
    pub prior_state: Option<MatrixJson>,
}

pub fn maxent_json(z: Complex64, r: &MaxEntResult, prior_state: Option<&DensityMatrix>) -> MaxEntJson {
    MaxEntJson {
        schema_version: SCHEMA_VERSION,
        target: z.into(),
        kind: r.kind.as_str(),
        state: MatrixJson::from(r.state.matrix()),
        dual_params: r.dual_params.map(|(a, b)| [a, b]),
        entropy: r.entropy,
        residual: r.residual,
        normal: r.normal,
        prior_state: prior_state.map(|p| MatrixJson::from(p.matrix())),
    }
}

#[derive(Serialize)]
pub struct DualJson {
    pub origin_shift: ComplexJson,
    pub samples: usize,
    /// Largest `|h_{(K*)*} − h_K|` over the sample angles.
    pub biduality_error: f64,
    /// Largest angle between the dual normal and the primal point direction.
    pub gauss_map_deviation: f64,
}

pub fn dual_json(range: &NumericalRange, dual: &DualBody) -> DualJson {
    let bidual = dual.bidual_support();
    let biduality_error = dual
        .samples
        .iter()
        .zip(&bidual)
        .map(|(s, b)| (b + 1.0 / s.r).abs())
        .fold(0.0, f64::max);
    DualJson {
        origin_shift: dual.origin_shift.into(),
        samples: dual.samples.len(),
        biduality_error,
        gauss_map_deviation: gauss_map_deviation(range),
    }
}

#[derive(Serialize)]
pub struct OracleJson {
    pub seed: u64,
    pub samples: usize,
    pub support_violation: f64,
    pub hausdorff: f64,
}

pub fn oracle_json(range: &NumericalRange, samples: usize, seed: u64) -> OracleJson {
    let cloud = oracle::sample_range(range.matrix(), samples, seed);
    OracleJson {
        seed,
        samples,
        support_violation: oracle::support_violation(range.table(), &cloud),
        hausdorff: oracle::hausdorff_to_range(range.table(), &cloud),
    }
}

/// Umbrella document of the `report` command.
#[derive(Serialize)]
pub struct FullReport {
    pub schema_version: u32,
    pub classification: ClassificationJson,
    pub scan: Option<ScanJson>,
    pub dual: Option<DualJson>,
    pub oracle: OracleJson,
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}
