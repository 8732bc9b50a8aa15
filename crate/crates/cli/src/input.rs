use std::fs;
use std::io::Read;
use std::path::Path;

use choquet::convexify::ConvexTraceSpec;
use choquet::io::{self, Instance};
use choquet::sets::PointSet;
use choquet::{Error, FunctionSystem, Result, ScalarField};

use crate::Global;

pub fn load_instance(g: &Global) -> Result<Instance> {
    if let Some(path) = &g.basis_csv {
        let system = io::read_basis_csv(fs::File::open(path)?)?;
        return Ok(Instance { system, expected: None });
    }
    match &g.instance {
        Some(p) if p.as_os_str() != "-" => io::read_instance(fs::File::open(p)?),
        _ => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            if text.trim().is_empty() {
                return Err(Error::InvalidInput("no instance given (use --instance or pipe one in)".into()));
            }
            io::parse_instance(&text)
        }
    }
}

pub fn point(sys: &FunctionSystem, label: &str) -> Result<usize> {
    sys.space().index_of(label).ok_or_else(|| Error::InvalidInput(format!("unknown point label {label:?}")))
}

pub fn set(sys: &FunctionSystem, labels: Option<&Vec<String>>) -> Result<PointSet> {
    match labels {
        None => Ok(PointSet::full(sys.n())),
        Some(l) => {
            let s = io::labels_to_set(sys.space(), l)?;
            if s.is_empty() {
                return Err(Error::InvalidInput("empty point set".into()));
            }
            Ok(s)
        }
    }
}

/// Inline JSON array, or a file holding a JSON array or a CSV column.
pub fn field(sys: &FunctionSystem, arg: &str) -> Result<ScalarField> {
    let f = if arg.trim_start().starts_with('[') {
        io::parse_field(arg)?
    } else {
        io::parse_field(&fs::read_to_string(arg)?)?
    };
    sys.check_field(&f)?;
    Ok(f)
}

pub fn spec(path: &Path, d: usize) -> Result<ConvexTraceSpec> {
    let spec: ConvexTraceSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
    spec.validate(d)?;
    Ok(spec)
}

pub fn specs(path: &Path, d: usize) -> Result<Vec<ConvexTraceSpec>> {
    let specs: Vec<ConvexTraceSpec> = serde_json::from_str(&fs::read_to_string(path)?)?;
    for s in &specs {
        s.validate(d)?;
    }
    Ok(specs)
}

pub fn tolerance(name: &str, given: Option<f64>, default: f64, strict: bool) -> Result<f64> {
    match given {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            Err(Error::InvalidInput(format!("--{name} must be positive and finite, got {t}")))
        }
        Some(t) => Ok(t),
        None if strict => Ok(STRICT_TOL),
        None => Ok(default),
    }
}

/// Tolerance used under `--strict` when none is given explicitly.
pub const STRICT_TOL: f64 = 1e-12;
