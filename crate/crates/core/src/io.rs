//! File formats: instance JSON, basis CSV, fields, point sets and CSV reports.
//!
//! Instance JSON:
//!
//! ```json
//! {"labels": ["1", "2"], "coords": null, "basis": [[1, 1], [1, 0.5]]}
//! ```
//!
//! Generated instances add an `"expected"` block with the ground-truth
//! boundary (as labels) and generator metadata. An optional `"ideal"` list of
//! labels marks points of the compactification outside the ambient set.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::generators::{GeneratedInstance, InstanceNotes};
use crate::measures::BoundaryReport;
use crate::sets::PointSet;
use crate::space::{FiniteSpace, FunctionSystem, ScalarField};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedBlock {
    pub boundary: Vec<String>,
    #[serde(flatten)]
    pub notes: InstanceNotes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub labels: Vec<String>,
    pub coords: Option<Vec<[f64; 2]>>,
    pub basis: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ideal: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedBlock>,
}

/// A parsed instance: the system plus any ground truth it carried.
#[derive(Debug, Clone)]
pub struct Instance {
    pub system: FunctionSystem,
    pub expected: Option<ExpectedBlock>,
}

impl Instance {
    pub fn expected_boundary(&self) -> Result<Option<PointSet>> {
        self.expected.as_ref().map(|e| labels_to_set(self.system.space(), &e.boundary)).transpose()
    }
}

impl InstanceFile {
    pub fn from_system(sys: &FunctionSystem) -> Self {
        let space = sys.space();
        InstanceFile {
            labels: space.labels().to_vec(),
            coords: space.coords().map(<[_]>::to_vec),
            basis: sys.basis_rows(),
            ideal: (0..sys.n()).filter(|&j| space.is_ideal(j)).map(|j| space.label(j).to_string()).collect(),
            expected: None,
        }
    }

    pub fn from_generated(inst: &GeneratedInstance) -> Self {
        let mut file = Self::from_system(&inst.system);
        file.expected = Some(ExpectedBlock {
            boundary: set_to_labels(inst.system.space(), &inst.expected_boundary),
            notes: inst.notes.clone(),
        });
        file
    }

    pub fn into_instance(self) -> Result<Instance> {
        let mut space = FiniteSpace::new(self.labels)?;
        if let Some(coords) = self.coords {
            space = space.with_coords(coords)?;
        }
        if !self.ideal.is_empty() {
            let ideal_set = labels_to_set(&space, &self.ideal)?;
            let flags = (0..space.len()).map(|j| ideal_set.contains(j)).collect();
            space = space.with_ideal(flags)?;
        }
        let system = FunctionSystem::new(space, self.basis)?;
        Ok(Instance { system, expected: self.expected })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn read_instance<R: Read>(reader: R) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_reader(reader)?;
    file.into_instance()
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    read_instance(text.as_bytes())
}

fn is_number(s: &str) -> bool {
    s.trim().parse::<f64>().is_ok()
}

/// Basis matrix from CSV: one row per basis function, one column per point.
/// A first row that does not parse as numbers is taken as point labels.
pub fn read_basis_csv<R: Read>(reader: R) -> Result<FunctionSystem> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        records.push(rec?);
    }
    let Some(first) = records.first() else {
        return Err(Error::InvalidInput("basis CSV is empty".into()));
    };
    let (labels, body) = if first.iter().all(is_number) {
        ((0..first.len()).map(|j| j.to_string()).collect(), &records[..])
    } else {
        (first.iter().map(str::to_string).collect(), &records[1..])
    };
    let mut rows = Vec::with_capacity(body.len());
    for (i, rec) in body.iter().enumerate() {
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::InvalidInput(format!("basis CSV row {i}: {s:?} is not a number"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    FunctionSystem::new(FiniteSpace::new(labels)?, rows)
}

/// A field given either as a JSON array or as a single CSV column
/// (optionally with a header line).
pub fn parse_field(text: &str) -> Result<ScalarField> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        let values: Vec<f64> = serde_json::from_str(trimmed)?;
        return ScalarField::new(values);
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cell = rec.get(0).unwrap_or("");
        match cell.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::InvalidInput(format!("field CSV line {}: {cell:?} is not a number", i + 1))),
        }
    }
    ScalarField::new(values)
}

pub fn labels_to_set(space: &FiniteSpace, labels: &[String]) -> Result<PointSet> {
    labels
        .iter()
        .map(|l| space.index_of(l).ok_or_else(|| Error::InvalidInput(format!("unknown point label {l:?}"))))
        .collect::<Result<Vec<_>>>()
        .map(PointSet::new)
}

pub fn set_to_labels(space: &FiniteSpace, set: &PointSet) -> Vec<String> {
    set.indices().iter().map(|&j| space.label(j).to_string()).collect()
}

/// One row per point: label, boundary flag, minimal self-mass, vertex test.
pub fn boundary_csv(space: &FiniteSpace, report: &BoundaryReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "is_boundary", "min_self_mass", "vertex_test"])?;
    for p in &report.points {
        w.write_record([
            space.label(p.index).to_string(),
            p.is_boundary.to_string(),
            format!("{:.12e}", p.min_self_mass),
            p.vertex_test.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Values of a field as a single CSV column with a header.
pub fn field_csv(space: &FiniteSpace, columns: &[(&str, &ScalarField)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["label".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header)?;
    for j in 0..space.len() {
        let mut rec = vec![space.label(j).to_string()];
        rec.extend(columns.iter().map(|(_, f)| format!("{:.12e}", f.get(j))));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
