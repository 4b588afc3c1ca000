//! Problem files and trace export.
//!
//! A problem instance is a single JSON document:
//!
//! ```json
//! {
//!   "dims": [3, 2],
//!   "a": [[...], [...]],
//!   "c1": { "base": {"type": "box", "lower": [...], "upper": [...]},
//!           "translation": {"type": "scaling", "s": 0.05} },
//!   "c2": { "base": {"type": "whole_space"} },
//!   "f1": {"type": "affine", "matrix": [[...]], "offset": [...]},
//!   "f2": {"type": "affine", "matrix": [[...]], "offset": [...]},
//!   "g1": {"type": "scaling", "s": 1.0},
//!   "g2": {"type": "scaling", "s": 1.0},
//!   "known_solution": [...],
//!   "default_params": {"rho1": 1.0, "rho2": 0.8, "gamma": 0.4,
//!                      "alpha": {"type": "constant", "value": 0.5},
//!                      "max_iters": 10000, "tol": 1e-10}
//! }
//! ```
//!
//! Matrices are row-major nested arrays. Omitting a moving set's
//! `translation` makes it a fixed set. Operator dimensions are taken from
//! `dims`, so scalar descriptors need no explicit dimension. Traces export
//! as CSV with the fixed columns `iter,residual,error,bound_factor`, plus
//! one column per coordinate when coordinate dumps are requested.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::operators::{GMap, OperatorModel};
use crate::sets::{ConvexSet, MovingSet};
use crate::solver::{AlphaSchedule, IterateTrace, ProblemSpec, SolverParams};

#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    dims: [usize; 2],
    a: Vec<Vec<f64>>,
    c1: MovingSetFile,
    c2: MovingSetFile,
    f1: OperatorFile,
    f2: OperatorFile,
    g1: OperatorFile,
    g2: OperatorFile,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    known_solution: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    default_params: Option<ParamsFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MovingSetFile {
    base: SetFile,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    translation: Option<OperatorFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum SetFile {
    WholeSpace,
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    AffineSet {
        basis: Vec<Vec<f64>>,
        point: Vec<f64>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum OperatorFile {
    Zero,
    Scaling {
        s: f64,
    },
    Translation {
        c: Vec<f64>,
    },
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum AlphaFile {
    Constant { value: f64 },
    Harmonic,
}

#[derive(Debug, Serialize, Deserialize)]
struct ParamsFile {
    rho1: f64,
    rho2: f64,
    gamma: f64,
    #[serde(default = "default_alpha")]
    alpha: AlphaFile,
    #[serde(default = "default_max_iters")]
    max_iters: usize,
    #[serde(default = "default_tol")]
    tol: f64,
}

fn default_alpha() -> AlphaFile {
    AlphaFile::Constant { value: 0.5 }
}

fn default_max_iters() -> usize {
    10_000
}

fn default_tol() -> f64 {
    1e-10
}

fn vector_from(entries: Vec<f64>, dim: usize, what: &str) -> Result<Vector> {
    if entries.len() != dim {
        return Err(Error::Parse(format!(
            "{what}: expected {dim} entries, got {}",
            entries.len()
        )));
    }
    Vector::new(entries).map_err(|_| Error::Parse(format!("{what}: entries must be finite")))
}

fn matrix_from(
    rows: Vec<Vec<f64>>,
    want_rows: usize,
    want_cols: usize,
    what: &str,
) -> Result<Matrix> {
    let m = Matrix::from_rows(&rows).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
    if m.rows() != want_rows || m.cols() != want_cols {
        return Err(Error::Parse(format!(
            "{what}: expected a {want_rows}×{want_cols} matrix, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m)
}

fn set_from(sf: SetFile, dim: usize, what: &str) -> Result<ConvexSet> {
    let built = match sf {
        SetFile::WholeSpace => Ok(ConvexSet::whole_space(dim)),
        SetFile::Box { lower, upper } => ConvexSet::box_set(
            vector_from(lower, dim, what)?,
            vector_from(upper, dim, what)?,
        ),
        SetFile::Ball { center, radius } => {
            ConvexSet::ball(vector_from(center, dim, what)?, radius)
        }
        SetFile::Halfspace { normal, offset } => {
            ConvexSet::halfspace(vector_from(normal, dim, what)?, offset)
        }
        SetFile::AffineSet { basis, point } => {
            let point = vector_from(point, dim, what)?;
            let basis =
                Matrix::from_rows(&basis).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
            if basis.rows() != dim {
                return Err(Error::Parse(format!(
                    "{what}: basis has {} rows, expected {dim}",
                    basis.rows()
                )));
            }
            ConvexSet::affine_set(basis, point)
        }
    };
    built.map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn set_to(set: &ConvexSet) -> SetFile {
    match set {
        ConvexSet::WholeSpace { .. } => SetFile::WholeSpace,
        ConvexSet::Box { lower, upper } => SetFile::Box {
            lower: lower.as_slice().to_vec(),
            upper: upper.as_slice().to_vec(),
        },
        ConvexSet::Ball { center, radius } => SetFile::Ball {
            center: center.as_slice().to_vec(),
            radius: *radius,
        },
        ConvexSet::Halfspace { normal, offset } => SetFile::Halfspace {
            normal: normal.as_slice().to_vec(),
            offset: *offset,
        },
        ConvexSet::Affine { basis, point } => SetFile::AffineSet {
            basis: basis.row_major(),
            point: point.as_slice().to_vec(),
        },
    }
}

fn operator_from(of: OperatorFile, dim: usize, what: &str) -> Result<OperatorModel> {
    let built = match of {
        OperatorFile::Zero => Ok(OperatorModel::zero(dim)),
        OperatorFile::Scaling { s } => OperatorModel::scaling(dim, s),
        OperatorFile::Translation { c } => {
            Ok(OperatorModel::translation(vector_from(c, dim, what)?))
        }
        OperatorFile::Affine { matrix, offset } => OperatorModel::affine(
            matrix_from(matrix, dim, dim, what)?,
            vector_from(offset, dim, what)?,
        ),
    };
    built.map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn operator_to(op: &OperatorModel) -> OperatorFile {
    match op {
        OperatorModel::Zero { .. } => OperatorFile::Zero,
        OperatorModel::Scaling { factor, .. } => OperatorFile::Scaling { s: *factor },
        OperatorModel::Translation { shift } => OperatorFile::Translation {
            c: shift.as_slice().to_vec(),
        },
        OperatorModel::Affine { matrix, offset } => OperatorFile::Affine {
            matrix: matrix.row_major(),
            offset: offset.as_slice().to_vec(),
        },
    }
}

fn moving_set_from(mf: MovingSetFile, dim: usize, what: &str) -> Result<MovingSet> {
    let base = set_from(mf.base, dim, what)?;
    let translation = match mf.translation {
        None => OperatorModel::zero(dim),
        Some(of) => operator_from(of, dim, &format!("{what}.translation"))?,
    };
    MovingSet::new(base, translation).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn moving_set_to(m: &MovingSet) -> MovingSetFile {
    let translation = match m.translation() {
        OperatorModel::Zero { .. } => None,
        op => Some(operator_to(op)),
    };
    MovingSetFile {
        base: set_to(m.base()),
        translation,
    }
}

fn params_from(pf: ParamsFile) -> Result<SolverParams> {
    let schedule = match pf.alpha {
        AlphaFile::Constant { value } => AlphaSchedule::Constant(value),
        AlphaFile::Harmonic => AlphaSchedule::Harmonic,
    };
    let params = SolverParams {
        rho1: pf.rho1,
        rho2: pf.rho2,
        gamma: pf.gamma,
        schedule,
        max_iters: pf.max_iters,
        tol: pf.tol,
    };
    params
        .validate()
        .map_err(|e| Error::Parse(format!("default_params: {e}")))?;
    Ok(params)
}

fn params_to(p: &SolverParams) -> ParamsFile {
    ParamsFile {
        rho1: p.rho1,
        rho2: p.rho2,
        gamma: p.gamma,
        alpha: match &p.schedule {
            AlphaSchedule::Constant(v) => AlphaFile::Constant { value: *v },
            AlphaSchedule::Harmonic => AlphaFile::Harmonic,
        },
        max_iters: p.max_iters,
        tol: p.tol,
    }
}

/// Parses a problem instance from its JSON form.
pub fn problem_from_json(text: &str) -> Result<ProblemSpec> {
    let pf: ProblemFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem file: {e}")))?;
    let [n1, n2] = pf.dims;
    let a = matrix_from(pf.a, n2, n1, "a")?;
    let spec = ProblemSpec::new(
        a,
        moving_set_from(pf.c1, n1, "c1")?,
        moving_set_from(pf.c2, n2, "c2")?,
        operator_from(pf.f1, n1, "f1")?,
        operator_from(pf.f2, n2, "f2")?,
        GMap::new(operator_from(pf.g1, n1, "g1")?).map_err(|e| Error::Parse(format!("g1: {e}")))?,
        GMap::new(operator_from(pf.g2, n2, "g2")?).map_err(|e| Error::Parse(format!("g2: {e}")))?,
    )
    .map_err(|e| Error::Parse(e.to_string()))?;
    let spec = match pf.default_params {
        Some(p) => spec
            .with_default_params(params_from(p)?)
            .map_err(|e| Error::Parse(e.to_string()))?,
        None => spec,
    };
    match pf.known_solution {
        Some(x) => {
            let x = vector_from(x, spec.dims().0, "known_solution")?;
            spec.with_known_solution(x)
                .map_err(|e| Error::Parse(e.to_string()))
        }
        None => Ok(spec),
    }
}

/// Serializes a problem instance to pretty-printed JSON.
pub fn problem_to_json(spec: &ProblemSpec) -> String {
    let pf = ProblemFile {
        dims: [spec.dims().0, spec.dims().1],
        a: spec.a().row_major(),
        c1: moving_set_to(spec.c1()),
        c2: moving_set_to(spec.c2()),
        f1: operator_to(spec.f1()),
        f2: operator_to(spec.f2()),
        g1: operator_to(spec.g1().op()),
        g2: operator_to(spec.g2().op()),
        known_solution: spec.known_solution().map(|x| x.as_slice().to_vec()),
        default_params: spec.default_params().map(params_to),
    };
    let mut text = serde_json::to_string_pretty(&pf).expect("serializable");
    text.push('\n');
    text
}

pub fn read_problem(path: &Path) -> Result<ProblemSpec> {
    let text = fs::read_to_string(path)?;
    problem_from_json(&text)
}

pub fn write_problem(path: &Path, spec: &ProblemSpec) -> Result<()> {
    Ok(fs::write(path, problem_to_json(spec))?)
}

/// Writes a trace as CSV. Columns are fixed as
/// `iter,residual,error,bound_factor`; with `with_coords` one extra column
/// per coordinate of x is appended.
pub fn write_trace_csv<W: Write>(
    mut w: W,
    trace: &IterateTrace,
    with_coords: bool,
) -> std::io::Result<()> {
    write!(w, "iter,residual,error,bound_factor")?;
    if with_coords {
        if let Some(first) = trace.records.first() {
            for i in 0..first.x.dim() {
                write!(w, ",x{i}")?;
            }
        }
    }
    writeln!(w)?;
    for rec in &trace.records {
        write!(w, "{},{}", rec.n, rec.residual)?;
        match rec.error {
            Some(e) => write!(w, ",{e}")?,
            None => write!(w, ",")?,
        }
        match rec.bound_factor {
            Some(b) => write!(w, ",{b}")?,
            None => write!(w, ",")?,
        }
        if with_coords {
            for i in 0..rec.x.dim() {
                write!(w, ",{}", rec.x[i])?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn trace_csv_string(trace: &IterateTrace, with_coords: bool) -> String {
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, trace, with_coords).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family, GeneratorConfig};
    use crate::solver::solve;

    #[test]
    fn round_trip_is_field_exact() {
        for seed in 0..10 {
            let cfg = GeneratorConfig::new(3, 2, 300 + seed, Family::InteriorZero);
            let spec = generate(&cfg).unwrap();
            let text = problem_to_json(&spec);
            let parsed = problem_from_json(&text).unwrap();
            assert_eq!(spec, parsed);
            // And the serialized form itself is stable.
            assert_eq!(text, problem_to_json(&parsed));
        }
    }

    #[test]
    fn parse_reports_field_errors() {
        let err = problem_from_json("{ not json").unwrap_err();
        assert!(err.to_string().contains("parse error"));

        let cfg = GeneratorConfig::new(2, 2, 1, Family::InteriorZero);
        let spec = generate(&cfg).unwrap();
        let text = problem_to_json(&spec);
        // Corrupt the stored solution so that it no longer solves.
        let bad = text.replace("\"known_solution\": [", "\"known_solution\": [9.5, ");
        let bad = bad.replacen(", \n", "\n", 0);
        let err = problem_from_json(&bad);
        assert!(err.is_err());
    }

    #[test]
    fn minimal_hand_written_file_parses() {
        let text = r#"{
            "dims": [1, 1],
            "a": [[1.0]],
            "c1": {"base": {"type": "whole_space"}},
            "c2": {"base": {"type": "whole_space"}},
            "f1": {"type": "affine", "matrix": [[1.0]], "offset": [0.0]},
            "f2": {"type": "affine", "matrix": [[1.0]], "offset": [0.0]},
            "g1": {"type": "scaling", "s": 1.0},
            "g2": {"type": "scaling", "s": 1.0},
            "known_solution": [0.0]
        }"#;
        let spec = problem_from_json(text).unwrap();
        assert_eq!(spec.dims(), (1, 1));
        assert!(spec.default_params().is_none());
    }

    #[test]
    fn trace_csv_has_fixed_columns() {
        let cfg = GeneratorConfig::new(2, 2, 9, Family::InteriorZero);
        let spec = generate(&cfg).unwrap();
        let params = spec.default_params().unwrap().clone();
        let result = solve(&spec, &params, &Vector::zeros(2), None).unwrap();
        let csv = trace_csv_string(&result.trace, false);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "iter,residual,error,bound_factor");
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 4);
        assert!(first.starts_with("0,"));

        let with_coords = trace_csv_string(&result.trace, true);
        assert!(with_coords.lines().next().unwrap().ends_with(",x0,x1"));
    }
}
