//! Finite spaces, function systems and the objects living on them.
//!
//! A [`FunctionSystem`] is a `d × n` matrix whose row `i` holds the values of
//! the basis function `φᵢ` on the `n` points; column `j` is the image of
//! point `j` under the Dirac embedding into the dual of the span.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Residual allowed when expressing the constant function in the basis.
pub const CONSTANTS_TOL: f64 = 1e-9;
/// Minimum sup-distance between two embedded points.
pub const SEPARATION_TOL: f64 = 1e-9;
const PROBABILITY_NEG_TOL: f64 = 1e-12;
const PROBABILITY_MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteSpace {
    labels: Vec<String>,
    coords: Option<Vec<[f64; 2]>>,
    /// Points that belong to the compactification but not to the ambient set.
    ideal: Vec<bool>,
}

impl FiniteSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidInput("a space needs at least one point".into()));
        }
        let mut sorted: Vec<&String> = labels.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("duplicate point label {:?}", w[0])));
        }
        let n = labels.len();
        Ok(FiniteSpace { labels, coords: None, ideal: vec![false; n] })
    }

    /// Points labelled `0, 1, …, n-1`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|j| j.to_string()).collect())
    }

    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != self.len() {
            return Err(Error::Dimension(format!(
                "{} coordinates for {} points",
                coords.len(),
                self.len()
            )));
        }
        if coords.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("plot coordinates".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn with_ideal(mut self, ideal: Vec<bool>) -> Result<Self> {
        if ideal.len() != self.len() {
            return Err(Error::Dimension(format!("{} ideal flags for {} points", ideal.len(), self.len())));
        }
        self.ideal = ideal;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub fn is_ideal(&self, j: usize) -> bool {
        self.ideal[j]
    }

    pub fn ideal_flags(&self) -> &[bool] {
        &self.ideal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub constants_ok: bool,
    pub constants_residual: f64,
    pub separation_ok: bool,
    /// Smallest sup-distance between two columns (`inf` when `n = 1`).
    pub min_separation: f64,
    /// Closest pair, when `n ≥ 2`.
    pub closest_pair: Option<(usize, usize)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.constants_ok && self.separation_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSystem {
    space: FiniteSpace,
    basis: DMatrix<f64>,
    report: ValidationReport,
    /// Least-squares coefficients of the constant function `1`.
    unit: DVector<f64>,
}

impl FunctionSystem {
    /// Builds a system from basis rows, one row per basis function.
    ///
    /// Only shape and finiteness are enforced here; the standing hypotheses
    /// (constants, separation) are recorded in [`FunctionSystem::validate`]
    /// and enforced by [`FunctionSystem::ensure_valid`].
    pub fn new(space: FiniteSpace, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = space.len();
        let d = rows.len();
        if d == 0 {
            return Err(Error::Dimension("basis has no rows".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!("basis row {i} has {} entries, expected {n}", r.len())));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("basis matrix".into()));
        }
        let basis = DMatrix::from_fn(d, n, |i, j| rows[i][j]);
        Ok(Self::from_matrix(space, basis))
    }

    fn from_matrix(space: FiniteSpace, basis: DMatrix<f64>) -> Self {
        let (d, n) = basis.shape();
        // min ‖Bᵀw − 1‖ through the SVD of Bᵀ.
        let bt = basis.transpose();
        let ones = DVector::from_element(n, 1.0);
        let unit = bt
            .clone()
            .svd(true, true)
            .solve(&ones, 1e-12)
            .unwrap_or_else(|_| DVector::zeros(d));
        let constants_residual = (&bt * &unit - &ones).amax();

        let mut min_separation = f64::INFINITY;
        let mut closest_pair = None;
        for a in 0..n {
            for b in (a + 1)..n {
                let dist = (basis.column(a) - basis.column(b)).amax();
                if dist < min_separation {
                    min_separation = dist;
                    closest_pair = Some((a, b));
                }
            }
        }
        let report = ValidationReport {
            constants_ok: constants_residual <= CONSTANTS_TOL,
            constants_residual,
            separation_ok: min_separation > SEPARATION_TOL,
            min_separation,
            closest_pair,
        };
        FunctionSystem { space, basis, report, unit }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.basis.ncols()
    }

    /// Number of basis functions.
    pub fn d(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<f64>> {
        self.basis.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn validate(&self) -> &ValidationReport {
        &self.report
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let r = &self.report;
        if !r.constants_ok {
            return Err(Error::InvalidSystem(format!(
                "constant functions are not in the span (residual {:.3e})",
                r.constants_residual
            )));
        }
        if !r.separation_ok {
            let (a, b) = r.closest_pair.unwrap_or((0, 0));
            return Err(Error::InvalidSystem(format!(
                "points {:?} and {:?} are not separated (distance {:.3e})",
                self.space.label(a),
                self.space.label(b),
                r.min_separation
            )));
        }
        Ok(())
    }

    pub fn check_index(&self, j: usize) -> Result<()> {
        if j < self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: j, len: self.n() })
        }
    }

    /// Column `j` of the basis matrix: the embedded point.
    pub fn embed(&self, j: usize) -> Result<Vec<f64>> {
        self.check_index(j)?;
        Ok(self.basis.column(j).iter().copied().collect())
    }

    pub(crate) fn column(&self, j: usize) -> Vec<f64> {
        self.basis.column(j).iter().copied().collect()
    }

    pub fn evaluate(&self, phi: &PhiFunction) -> Result<ScalarField> {
        if phi.coeffs.len() != self.d() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a basis of size {}",
                phi.coeffs.len(),
                self.d()
            )));
        }
        let c = DVector::from_column_slice(&phi.coeffs);
        let values = self.basis.tr_mul(&c);
        Ok(ScalarField::new_unchecked(values.iter().copied().collect()))
    }

    /// Coefficients of the constant function `1`.
    pub fn unit_coeffs(&self) -> Vec<f64> {
        self.unit.iter().copied().collect()
    }

    /// Residual of the least-squares fit of `f` by the span of the rows.
    pub fn span_residual(&self, f: &ScalarField) -> Result<f64> {
        self.check_field(f)?;
        let bt = self.basis.transpose();
        let rhs = DVector::from_column_slice(f.values());
        let w = bt
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok((&bt * w - rhs).amax())
    }

    pub fn check_field(&self, f: &ScalarField) -> Result<()> {
        if f.len() != self.n() {
            return Err(Error::Dimension(format!("field has {} values, space has {} points", f.len(), self.n())));
        }
        Ok(())
    }

    /// Same points, extra basis rows appended.
    pub fn extended(&self, extra_rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut rows = self.basis_rows();
        rows.extend(extra_rows);
        Self::new(self.space.clone(), rows)
    }
}

/// Values of a function on the points of a finite space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field".into()));
        }
        Ok(ScalarField(values))
    }

    pub(crate) fn new_unchecked(values: Vec<f64>) -> Self {
        ScalarField(values)
    }

    pub fn constant(n: usize, value: f64) -> Self {
        ScalarField(vec![value; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        ScalarField(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        ScalarField(self.0.iter().map(|v| v * s).collect())
    }

    /// `‖self − other‖_∞`
    pub fn sup_distance(&self, other: &ScalarField) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for ScalarField {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        ScalarField::new(values)
    }
}

impl From<ScalarField> for Vec<f64> {
    fn from(f: ScalarField) -> Self {
        f.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureKind {
    Signed,
    Probability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    weights: Vec<f64>,
    kind: MeasureKind,
}

impl Measure {
    pub fn signed(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("measure weights".into()));
        }
        Ok(Measure { weights, kind: MeasureKind::Signed })
    }

    pub fn probability(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("measure weights".into()));
        }
        if let Some(w) = weights.iter().find(|&&w| w < -PROBABILITY_NEG_TOL) {
            return Err(Error::InvalidInput(format!("negative probability weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_MASS_TOL {
            return Err(Error::InvalidInput(format!("probability weights sum to {total}")));
        }
        Ok(Measure { weights, kind: MeasureKind::Probability })
    }

    pub fn dirac(n: usize, j: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[j] = 1.0;
        Measure { weights, kind: MeasureKind::Probability }
    }

    pub fn uniform(n: usize) -> Self {
        Measure { weights: vec![1.0 / n as f64; n], kind: MeasureKind::Probability }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Barycenter `Bμ` of the measure in embedding coordinates.
    pub fn barycenter(&self, sys: &FunctionSystem) -> Result<Vec<f64>> {
        if self.len() != sys.n() {
            return Err(Error::Dimension(format!("measure has {} weights, space has {} points", self.len(), sys.n())));
        }
        let w = DVector::from_column_slice(&self.weights);
        Ok((sys.basis() * w).iter().copied().collect())
    }
}

/// `∫ f dμ`
pub fn pair(mu: &Measure, f: &ScalarField) -> Result<f64> {
    if mu.len() != f.len() {
        return Err(Error::Dimension(format!("measure has {} weights, field has {} values", mu.len(), f.len())));
    }
    Ok(mu.weights.iter().zip(f.values()).map(|(a, b)| a * b).sum())
}

/// Coefficient vector `c` of `φ = Σ cᵢ φᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PhiFunction {
    pub coeffs: Vec<f64>,
}

impl PhiFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("function coefficients".into()));
        }
        Ok(PhiFunction { coeffs })
    }

    pub fn zero(d: usize) -> Self {
        PhiFunction { coeffs: vec![0.0; d] }
    }
}

impl TryFrom<Vec<f64>> for PhiFunction {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        PhiFunction::new(v)
    }
}

impl From<PhiFunction> for Vec<f64> {
    fn from(p: PhiFunction) -> Self {
        p.coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naturals() -> FunctionSystem {
        let space = FiniteSpace::new(["1", "2", "3", "4"].map(String::from).to_vec()).unwrap();
        FunctionSystem::new(space, vec![vec![1.0; 4], vec![1.0, 0.5, 1.0 / 3.0, 0.25]]).unwrap()
    }

    #[test]
    fn naturals_validates() {
        let sys = naturals();
        assert!(sys.validate().constants_ok);
        assert!(sys.validate().separation_ok);
        sys.ensure_valid().unwrap();
    }

    #[test]
    fn duplicated_columns_fail_separation() {
        let space = FiniteSpace::indexed(3).unwrap();
        let sys = FunctionSystem::new(space, vec![vec![1.0; 3], vec![0.0, 1.0, 1.0]]).unwrap();
        let r = sys.validate();
        assert!(r.constants_ok);
        assert!(!r.separation_ok);
        assert_eq!(r.closest_pair, Some((1, 2)));
        assert!(matches!(sys.ensure_valid(), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn missing_constants() {
        let space = FiniteSpace::indexed(2).unwrap();
        let sys = FunctionSystem::new(space, vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(!sys.validate().constants_ok);
        assert!(sys.validate().separation_ok);
    }

    #[test]
    fn constants_through_other_basis() {
        // rows t and 1 - t span constants without a literal ones row
        let space = FiniteSpace::indexed(3).unwrap();
        let sys = FunctionSystem::new(space, vec![vec![0.0, 0.5, 1.0], vec![1.0, 0.5, 0.0]]).unwrap();
        assert!(sys.validate().passed());
        let one = sys.evaluate(&PhiFunction::new(sys.unit_coeffs()).unwrap()).unwrap();
        assert!(one.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn embed_and_evaluate() {
        let sys = naturals();
        assert_eq!(sys.embed(1).unwrap(), vec![1.0, 0.5]);
        assert!(matches!(sys.embed(4), Err(Error::IndexOutOfRange { .. })));
        let b = sys.evaluate(&PhiFunction::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(b.values(), &[1.0, 0.5, 1.0 / 3.0, 0.25]);
        let z = sys.evaluate(&PhiFunction::zero(2)).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        let g = sys.evaluate(&PhiFunction::new(vec![1.0, -1.0]).unwrap()).unwrap();
        let expect = [0.0, 0.5, 2.0 / 3.0, 0.75];
        for (a, b) in g.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(sys.evaluate(&PhiFunction::zero(3)).is_err());
    }

    #[test]
    fn pairing() {
        let f = ScalarField::new(vec![1.0, 0.5, 1.0 / 3.0, 0.25]).unwrap();
        assert_eq!(pair(&Measure::dirac(4, 2), &f).unwrap(), 1.0 / 3.0);
        let mu = Measure::probability(vec![1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0]).unwrap();
        assert!((pair(&mu, &f).unwrap() - 0.5).abs() < 1e-15);
        let one = ScalarField::constant(4, 1.0);
        assert!((pair(&Measure::uniform(4), &one).unwrap() - 1.0).abs() < 1e-15);
        assert!(pair(&Measure::uniform(3), &one).is_err());
    }

    #[test]
    fn probability_checks() {
        assert!(Measure::probability(vec![0.5, 0.6]).is_err());
        assert!(Measure::probability(vec![-0.1, 1.1]).is_err());
        assert!(Measure::probability(vec![0.5, 0.5]).is_ok());
        assert!(Measure::signed(vec![-3.0, 1.0]).is_ok());
    }

    #[test]
    fn labels_must_be_unique() {
        assert!(FiniteSpace::new(vec!["a".into(), "a".into()]).is_err());
        assert!(FiniteSpace::new(vec![]).is_err());
    }

    #[test]
    fn non_finite_basis_rejected() {
        let space = FiniteSpace::indexed(2).unwrap();
        assert!(matches!(
            FunctionSystem::new(space, vec![vec![1.0, f64::NAN]]),
            Err(Error::NonFinite(_))
        ));
    }
}
