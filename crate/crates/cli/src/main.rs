//! `nrange`: batch analyses of the numerical range of a matrix read from JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use nrange::dual::dualize;
use nrange::geometry::BoundaryShape;
use nrange::maxent::{jump_scan, maxent, prior_inference, scan_discontinuities, DensityMatrix, MaxEntKind};
use nrange::report::{
    classification_json, degenerate_json, dual_json, maxent_json, oracle_json, scan_json, to_pretty, FullReport,
    ScanJson, SCHEMA_VERSION,
};
use nrange::{AngleGrid, Error, Matrix, NumericalRange, Result};

#[derive(Parser)]
#[command(name = "nrange", version, about = "Numerical range boundary geometry and MaxEnt inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Matrix JSON: {"dim": d, "entries": [[{"re": .., "im": ..}, ..], ..]}
    #[arg(long)]
    input: PathBuf,
    /// Directory for the output files (created if missing).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Angle grid size, a power of two in [512, 2^20].
    #[arg(long, default_value_t = AngleGrid::DEFAULT_SIZE)]
    grid: usize,
    /// Seed for the Monte Carlo cross-check in `report`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Minimal facet length (default 1e-7·(1 + ‖A‖)).
    #[arg(long)]
    tol_facet: Option<f64>,
    /// Also write boundary.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct Extras {
    /// Also compute the dual body and write dual.csv.
    #[arg(long)]
    dual: bool,
    /// Prior density matrix JSON (positive definite) for the prior-dependent map.
    #[arg(long)]
    prior: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary samples (boundary.csv, branches.csv) and boundary.svg.
    Boundary(Common),
    /// Facets, corners and extreme points (classification.json).
    Classify(Common),
    /// MaxEnt state for one target (maxent.json).
    Maxent {
        #[command(flatten)]
        common: Common,
        /// Target point as "re,im".
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Prior density matrix JSON for the prior-dependent state at extreme targets.
        #[arg(long)]
        prior: Option<PathBuf>,
    },
    /// Continuity scan of the MaxEnt map (scan.json).
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        extras: Extras,
    },
    /// All analyses bundled in report.json.
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        extras: Extras,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(written) => {
            for p in written {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

struct Session {
    range: NumericalRange,
    out_dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Session {
    fn open(c: &Common) -> Result<Self> {
        let text = fs::read_to_string(&c.input)?;
        let a = Matrix::from_json_str(&text)?;
        let mut range = NumericalRange::new(&a, AngleGrid::new(c.grid)?)?;
        if let Some(t) = c.tol_facet {
            range = range.with_facet_tolerance(t)?;
        }
        fs::create_dir_all(&c.out_dir)?;
        Ok(Self { range, out_dir: c.out_dir.clone(), written: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        fs::write(&path, contents)?;
        self.written.push(path);
        Ok(())
    }

    fn svg(&mut self, shape: &BoundaryShape) -> Result<()> {
        let svg = self.range.boundary_svg(shape);
        self.write("boundary.svg", &svg)
    }
}

fn read_prior(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::from_json_str(&fs::read_to_string(path)?)
}

fn parse_target(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidInput(format!("target must be \"re,im\", got {s:?}"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn run(command: Command) -> Result<Vec<PathBuf>> {
    match command {
        Command::Boundary(c) => {
            let mut s = Session::open(&c)?;
            let shape = s.range.classify()?;
            let partition = match &shape {
                BoundaryShape::Regular(cl) => cl.partition.clone(),
                BoundaryShape::Degenerate(_) => s.range.arc_partition(),
            };
            let csv = s.range.boundary_csv(&partition);
            s.write("boundary.csv", &csv)?;
            let branches = s.range.table().to_csv();
            s.write("branches.csv", &branches)?;
            s.svg(&shape)?;
            if let BoundaryShape::Degenerate(d) = &shape {
                let doc = to_pretty(&degenerate_json(d))?;
                s.write("degenerate.json", &doc)?;
            }
            Ok(s.written)
        }
        Command::Classify(c) => {
            let mut s = Session::open(&c)?;
            let shape = s.range.classify()?;
            let doc = to_pretty(&classification_json(&s.range, &shape))?;
            s.write("classification.json", &doc)?;
            if c.svg {
                s.svg(&shape)?;
            }
            Ok(s.written)
        }
        Command::Maxent { common, target, prior } => {
            let z = parse_target(&target)?;
            let prior = prior.as_deref().map(read_prior).transpose()?;
            let mut s = Session::open(&common)?;
            let r = maxent(&s.range, z)?;
            let prior_state = match (&prior, r.kind, r.normal) {
                (Some(p), MaxEntKind::Extreme, Some(theta)) => Some(prior_inference(&s.range, z, theta, p)?),
                _ => None,
            };
            let doc = to_pretty(&maxent_json(z, &r, prior_state.as_ref()))?;
            s.write("maxent.json", &doc)?;
            Ok(s.written)
        }
        Command::Scan { common, extras } => {
            let prior = extras.prior.as_deref().map(read_prior).transpose()?;
            let mut s = Session::open(&common)?;
            let doc = to_pretty(&scan_document(&s.range, prior.as_ref())?)?;
            s.write("scan.json", &doc)?;
            if extras.dual {
                let csv = dualize(&s.range)?.to_csv();
                s.write("dual.csv", &csv)?;
            }
            if common.svg {
                let shape = s.range.classify()?;
                s.svg(&shape)?;
            }
            Ok(s.written)
        }
        Command::Report { common, extras } => {
            let prior = extras.prior.as_deref().map(read_prior).transpose()?;
            let mut s = Session::open(&common)?;
            let shape = s.range.classify()?;
            let degenerate = matches!(shape, BoundaryShape::Degenerate(_));
            let dual = if extras.dual && !degenerate { Some(dualize(&s.range)?) } else { None };
            let doc = FullReport {
                schema_version: SCHEMA_VERSION,
                classification: classification_json(&s.range, &shape),
                scan: if degenerate { None } else { Some(scan_document(&s.range, prior.as_ref())?) },
                dual: dual.as_ref().map(|d| dual_json(&s.range, d)),
                oracle: oracle_json(&s.range, 20_000, common.seed),
            };
            let text = to_pretty(&doc)?;
            s.write("report.json", &text)?;
            if let Some(d) = dual {
                s.write("dual.csv", &d.to_csv())?;
            }
            if common.svg {
                s.svg(&shape)?;
            }
            Ok(s.written)
        }
    }
}

fn scan_document(range: &NumericalRange, prior: Option<&DensityMatrix>) -> Result<ScanJson> {
    let report = scan_discontinuities(range)?;
    match prior {
        Some(p) => {
            let jumps = jump_scan(range, p)?;
            scan_json(range, &report, Some((p, &jumps)))
        }
        None => scan_json(range, &report, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;
    use tempfile::TempDir;

    fn data(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
    }

    /// Runs `args` with `--input` and `--out-dir` appended.
    fn exec(args: &[&str], input: &Path, out: &Path) -> Result<Vec<PathBuf>> {
        let mut argv = vec!["nrange"];
        argv.extend_from_slice(args);
        argv.extend(["--input", input.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
        run(Cli::try_parse_from(argv).map_err(|e| Error::InvalidInput(e.to_string()))?.command)
    }

    fn exec_on(args: &[&str], input: &str, out: &Path) -> Result<Vec<PathBuf>> {
        exec(args, &data(input), out)
    }

    fn json(path: PathBuf) -> Value {
        serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
    }

    fn kinds(doc: &Value) -> Vec<&str> {
        doc["extreme_points"].as_array().unwrap().iter().map(|p| p["kind"].as_str().unwrap()).collect()
    }

    #[test]
    fn disk_boundary_is_the_unit_circle() {
        let dir = TempDir::new().unwrap();
        let written = exec_on(&["boundary"], "disk.json", dir.path()).unwrap();
        assert_eq!(written.len(), 3);
        let csv = fs::read_to_string(dir.path().join("boundary.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "theta,lambda,dl_left,dl_right,re_x_plus,im_x_plus,re_x_minus,im_x_minus,kind");
        let mut rows = 0;
        for line in lines {
            let f: Vec<f64> = line.split(',').take(8).map(|x| x.parse().unwrap()).collect();
            assert!((f[4].hypot(f[5]) - 1.0).abs() < 1e-9);
            rows += 1;
        }
        assert_eq!(rows, 4096);
        let svg = fs::read_to_string(dir.path().join("boundary.svg")).unwrap();
        assert!(svg.starts_with("<svg") && !svg.contains("class=\"facet\""));
    }

    #[test]
    fn square_boundary_is_a_four_segment_polygon() {
        let dir = TempDir::new().unwrap();
        exec_on(&["boundary"], "square.json", dir.path()).unwrap();
        let svg = fs::read_to_string(dir.path().join("boundary.svg")).unwrap();
        let path = svg.lines().find(|l| l.starts_with("<path")).unwrap();
        assert_eq!(path.matches('L').count(), 3);
        assert_eq!(svg.matches("class=\"facet\"").count(), 4);
        assert_eq!(svg.matches("class=\"corner\"").count(), 4);
    }

    #[test]
    fn hermitian_input_reports_a_degenerate_range() {
        let dir = TempDir::new().unwrap();
        exec_on(&["boundary"], "hermitian_2x2.json", dir.path()).unwrap();
        let doc = json(dir.path().join("degenerate.json"));
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["degenerate"]["kind"], "segment");

        let dir = TempDir::new().unwrap();
        exec_on(&["boundary"], "hermitian_1x1.json", dir.path()).unwrap();
        assert_eq!(json(dir.path().join("degenerate.json"))["degenerate"]["kind"], "point");
    }

    #[test]
    fn classify_examples() {
        let dir = TempDir::new().unwrap();
        exec_on(&["classify"], "disk.json", dir.path()).unwrap();
        let doc = json(dir.path().join("classification.json"));
        assert!(kinds(&doc).iter().all(|&k| k == "regular_exposed"));
        assert!(doc["facets"].as_array().unwrap().is_empty());

        exec_on(&["classify"], "disk_plus_point.json", dir.path()).unwrap();
        let doc = json(dir.path().join("classification.json"));
        let k = kinds(&doc);
        assert_eq!(k.iter().filter(|&&k| k == "corner").count(), 1);
        assert_eq!(k.iter().filter(|&&k| k == "non_exposed").count(), 2);
        assert_eq!(doc["facets"].as_array().unwrap().len(), 2);
        for p in doc["extreme_points"].as_array().unwrap().iter().filter(|p| p["kind"] == "non_exposed") {
            let radii = p["radii"].as_array().unwrap();
            assert!(radii.iter().any(|r| r == "inf"));
            assert!(radii.iter().any(|r| r.as_f64().is_some_and(|r| (r - 0.5).abs() < 1e-6)));
        }

        let written = exec_on(&["classify", "--svg"], "square.json", dir.path()).unwrap();
        assert_eq!(written.len(), 2);
        let doc = json(dir.path().join("classification.json"));
        assert_eq!(doc["corners"].as_array().unwrap().len(), 4);
        assert_eq!(doc["facets"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn maxent_targets() {
        let dir = TempDir::new().unwrap();
        exec_on(&["maxent", "--target", "0,0"], "square.json", dir.path()).unwrap();
        let doc = json(dir.path().join("maxent.json"));
        assert_eq!(doc["kind"], "interior");
        for (r, row) in doc["state"]["entries"].as_array().unwrap().iter().enumerate() {
            for (c, z) in row.as_array().unwrap().iter().enumerate() {
                let want = if r == c { 0.25 } else { 0.0 };
                assert!((z["re"].as_f64().unwrap() - want).abs() < 1e-12);
            }
        }

        let prior = data("prior_2x2.json");
        exec_on(&["maxent", "--target", "0.6,0.8", "--prior", prior.to_str().unwrap()], "disk.json", dir.path()).unwrap();
        let doc = json(dir.path().join("maxent.json"));
        assert_eq!(doc["kind"], "extreme");
        assert!(doc["residual"].as_f64().unwrap() < 1e-12);
        assert!(doc["prior_state"].is_object());

        exec_on(&["maxent", "--target=0.5,0.5"], "square.json", dir.path()).unwrap();
        assert_eq!(json(dir.path().join("maxent.json"))["kind"], "facet_relative_interior");
    }

    #[test]
    fn exit_codes() {
        let dir = TempDir::new().unwrap();
        let code = |r: Result<Vec<PathBuf>>| r.unwrap_err().exit_code();
        let e = exec_on(&["maxent", "--target", "3,0"], "disk.json", dir.path()).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("infeasible"));

        let bad = dir.path().join("bad.json");
        fs::write(&bad, "{\"dim\": 2, \"entries\": [[").unwrap();
        assert_eq!(code(exec(&["classify"], &bad, dir.path())), 2);
        assert_eq!(code(exec(&["classify"], &dir.path().join("missing.json"), dir.path())), 2);
        assert_eq!(code(exec_on(&["classify", "--grid", "1000"], "disk.json", dir.path())), 2);
        assert_eq!(code(exec_on(&["classify", "--tol-facet", "-1"], "disk.json", dir.path())), 2);
        assert_eq!(code(exec_on(&["maxent", "--target", "x"], "disk.json", dir.path())), 2);
        let prior = data("prior_2x2.json");
        assert_eq!(code(exec_on(&["scan", "--prior", prior.to_str().unwrap()], "square.json", dir.path())), 2);
    }

    #[test]
    fn scan_examples() {
        let dir = TempDir::new().unwrap();
        exec_on(&["scan", "--dual"], "square.json", dir.path()).unwrap();
        let doc = json(dir.path().join("scan.json"));
        assert!(doc["discontinuities"].as_array().unwrap().is_empty());
        assert!(doc["prior_discontinuities"].is_null());
        let dual = fs::read_to_string(dir.path().join("dual.csv")).unwrap();
        assert!(dual.starts_with("phi,r,re_dual,im_dual\n"));

        let prior = data("prior_4x4.json");
        exec_on(&["scan", "--prior", prior.to_str().unwrap()], "segment_plus_disk.json", dir.path()).unwrap();
        let doc = json(dir.path().join("scan.json"));
        let flagged = doc["discontinuities"].as_array().unwrap();
        let near = |z: &Value, re: f64| (z["re"].as_f64().unwrap() - re).abs() < 1e-9 && z["im"].as_f64().unwrap().abs() < 1e-9;
        assert!(flagged.iter().any(|z| near(z, 1.0)));
        let jumps = doc["prior_discontinuities"].as_array().unwrap();
        assert_eq!(jumps.len(), flagged.len());
        assert!(flagged.iter().all(|z| jumps.iter().any(|q| near(q, z["re"].as_f64().unwrap()))));
    }

    #[test]
    fn report_bundles_every_section() {
        let dir = TempDir::new().unwrap();
        let written = exec_on(&["report", "--dual", "--svg", "--seed", "5"], "disk_plus_point.json", dir.path()).unwrap();
        assert_eq!(written.len(), 3);
        let doc = json(dir.path().join("report.json"));
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["oracle"]["seed"], 5);
        assert!(doc["scan"].is_object() && doc["dual"].is_object());
        assert!(doc["oracle"]["support_violation"].as_f64().unwrap() <= 1e-9);

        exec_on(&["report"], "hermitian_2x2.json", dir.path()).unwrap();
        let doc = json(dir.path().join("report.json"));
        assert!(doc["scan"].is_null());
        assert_eq!(doc["classification"]["degenerate"]["kind"], "segment");
    }
}
