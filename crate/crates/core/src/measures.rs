//! Representing measures and the Choquet boundary.
//!
//! `M_x` is the polytope of probability weight vectors `μ` with `Bμ = B e_x`.
//! A point is in the Choquet boundary when `M_x = {δ_x}`. Two independent
//! linear programs decide this: the smallest mass `μ_x` over `M_x`, and
//! whether column `x` lies in the convex hull of the remaining columns.

use serde::{Deserialize, Serialize};

use crate::lp::{self, LinearProgram, LpStatus, Relation};
use crate::sets::PointSet;
use crate::space::{FunctionSystem, Measure, ScalarField};
use crate::{par_map, Error, Result};

/// `min μ_x ≥ 1 − BOUNDARY_TOL` classifies `x` as a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyInterval {
    pub lo: f64,
    pub hi: f64,
}

impl KeyInterval {
    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lo - tol <= v && v <= self.hi + tol
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointBoundary {
    pub index: usize,
    pub is_boundary: bool,
    pub min_self_mass: f64,
    pub vertex_test: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub points: Vec<PointBoundary>,
}

impl BoundaryReport {
    pub fn boundary(&self) -> PointSet {
        PointSet::from_sorted(self.points.iter().filter(|p| p.is_boundary).map(|p| p.index).collect())
    }

    pub fn agrees(&self) -> bool {
        self.points.iter().all(|p| p.is_boundary == p.vertex_test)
    }
}

/// Constraints `μ ≥ 0`, `Σμ = 1`, `Bμ = b_x`, optionally minimizing `∫ objective dμ`.
pub fn representing_measure_lp(sys: &FunctionSystem, x: usize, objective: Option<&ScalarField>) -> LinearProgram {
    let n = sys.n();
    let b = sys.basis();
    let mut lp = LinearProgram::new(n);
    if let Some(f) = objective {
        lp.objective = f.values().to_vec();
    }
    for i in 0..sys.d() {
        lp.constrain(b.row(i).iter().copied().collect(), Relation::Eq, b[(i, x)]);
    }
    lp.constrain(vec![1.0; n], Relation::Eq, 1.0);
    lp
}

/// LP deciding whether column `target` lies in the convex hull of `of`.
pub fn hull_membership_lp(sys: &FunctionSystem, target: usize, of: &[usize]) -> LinearProgram {
    let b = sys.basis();
    let mut lp = LinearProgram::new(of.len());
    for i in 0..sys.d() {
        lp.constrain(of.iter().map(|&j| b[(i, j)]).collect(), Relation::Eq, b[(i, target)]);
    }
    lp.constrain(vec![1.0; of.len()], Relation::Eq, 1.0);
    lp
}

fn prepare(sys: &FunctionSystem, x: usize) -> Result<()> {
    sys.ensure_valid()?;
    sys.check_index(x)
}

/// A member of `M_x`, minimizing `∫ objective dμ` when an objective is given.
pub fn representing_measure(sys: &FunctionSystem, x: usize, objective: Option<&ScalarField>) -> Result<Measure> {
    prepare(sys, x)?;
    if let Some(f) = objective {
        sys.check_field(f)?;
    }
    let out = lp::solve(&representing_measure_lp(sys, x, objective))?;
    match (out.status, out.point) {
        (LpStatus::Optimal, Some(w)) => Measure::probability(w),
        (status, _) => Err(Error::Verification(format!(
            "representing-measure LP for point {x} returned {status:?}, but δ_x is always feasible"
        ))),
    }
}

fn optimize_over_representing(sys: &FunctionSystem, x: usize, objective: &ScalarField) -> Result<f64> {
    let out = lp::solve(&representing_measure_lp(sys, x, Some(objective)))?;
    out.value.ok_or_else(|| {
        Error::Verification(format!("representing-measure LP for point {x} returned {:?}", out.status))
    })
}

/// `[min ∫f dμ, max ∫f dμ]` over `μ ∈ M_x`.
pub fn key_interval(sys: &FunctionSystem, f: &ScalarField, x: usize) -> Result<KeyInterval> {
    prepare(sys, x)?;
    sys.check_field(f)?;
    let lo = optimize_over_representing(sys, x, f)?;
    let hi = -optimize_over_representing(sys, x, &f.scale(-1.0))?;
    Ok(KeyInterval { lo, hi })
}

/// Boundary verdict together with the minimal self-mass `min_{μ∈M_x} μ_x`.
pub fn is_boundary(sys: &FunctionSystem, x: usize) -> Result<(bool, f64)> {
    prepare(sys, x)?;
    let mut e = vec![0.0; sys.n()];
    e[x] = 1.0;
    let mass = optimize_over_representing(sys, x, &ScalarField::new_unchecked(e))?;
    Ok((mass >= 1.0 - BOUNDARY_TOL, mass))
}

/// Whether column `target` is a convex combination of the columns in `of`.
pub fn in_convex_hull(sys: &FunctionSystem, target: usize, of: &[usize]) -> Result<bool> {
    sys.check_index(target)?;
    if let Some(&j) = of.iter().find(|&&j| j >= sys.n()) {
        return Err(Error::IndexOutOfRange { index: j, len: sys.n() });
    }
    if of.contains(&target) {
        return Ok(true);
    }
    if of.is_empty() {
        return Ok(false);
    }
    Ok(lp::feasible(&hull_membership_lp(sys, target, of))?.is_some())
}

/// Whether column `x` is an extreme point of the hull of all columns.
pub fn is_vertex(sys: &FunctionSystem, x: usize) -> Result<bool> {
    prepare(sys, x)?;
    let others: Vec<usize> = (0..sys.n()).filter(|&j| j != x).collect();
    Ok(!in_convex_hull(sys, x, &others)?)
}

/// Runs both boundary tests on every point and checks they agree.
pub fn choquet_boundary(sys: &FunctionSystem) -> Result<BoundaryReport> {
    sys.ensure_valid()?;
    let points = par_map(sys.n(), |x| -> Result<PointBoundary> {
        let (is_boundary, min_self_mass) = is_boundary(sys, x)?;
        let vertex_test = is_vertex(sys, x)?;
        Ok(PointBoundary { index: x, is_boundary, min_self_mass, vertex_test })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let report = BoundaryReport { points };
    if let Some(p) = report.points.iter().find(|p| p.is_boundary != p.vertex_test) {
        return Err(Error::Verification(format!(
            "boundary tests disagree at point {:?}: min self-mass {:.3e}, vertex test {}",
            sys.space().label(p.index),
            p.min_self_mass,
            p.vertex_test
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::space::{pair, PhiFunction};

    fn naturals() -> FunctionSystem {
        generators::gen_naturals(4).unwrap().system
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn minimal_self_mass_measures() {
        let sys = naturals();
        // the optimum μ_x = 0 is attained on a whole face; check the value and membership
        for (x, witness) in [(1, [1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0]), (2, [1.0 / 9.0, 0.0, 0.0, 8.0 / 9.0])] {
            let mut e = vec![0.0; 4];
            e[x] = 1.0;
            let mu = representing_measure(&sys, x, Some(&ScalarField::new(e).unwrap())).unwrap();
            assert!(mu.weights()[x].abs() < 1e-12, "{mu:?}");
            assert!(close(&mu.barycenter(&sys).unwrap(), &sys.embed(x).unwrap(), 1e-12));
            let w = Measure::probability(witness.to_vec()).unwrap();
            assert!(close(&w.barycenter(&sys).unwrap(), &sys.embed(x).unwrap(), 1e-15));
        }
        // a unique optimum: minimize mass on the interior points
        let interior = ScalarField::new(vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let mu = representing_measure(&sys, 1, Some(&interior)).unwrap();
        assert!(close(mu.weights(), &[1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0], 1e-12), "{mu:?}");
        let mu = representing_measure(&sys, 2, Some(&interior)).unwrap();
        assert!(close(mu.weights(), &[1.0 / 9.0, 0.0, 0.0, 8.0 / 9.0], 1e-12), "{mu:?}");
    }

    #[test]
    fn boundary_point_has_only_dirac() {
        let sys = naturals();
        let f = ScalarField::new(vec![3.0, -1.0, 2.0, 0.5]).unwrap();
        for x in [0, 3] {
            let mu = representing_measure(&sys, x, Some(&f)).unwrap();
            assert!(close(mu.weights(), Measure::dirac(4, x).weights(), 1e-12));
        }
    }

    #[test]
    fn key_intervals() {
        let sys = naturals();
        let f = ScalarField::new(vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let k = key_interval(&sys, &f, 1).unwrap();
        assert!(k.lo.abs() < 1e-12 && (k.hi - 1.0).abs() < 1e-12, "{k:?}");
        let k = key_interval(&sys, &f, 0).unwrap();
        assert!(k.width().abs() < 1e-12 && k.lo.abs() < 1e-12);
        let phi = sys.evaluate(&PhiFunction::new(vec![0.3, -2.0]).unwrap()).unwrap();
        for x in 0..4 {
            let k = key_interval(&sys, &phi, x).unwrap();
            assert!((k.lo - phi.get(x)).abs() < 1e-12 && (k.hi - phi.get(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_and_vertex_tests() {
        let sys = naturals();
        let (b, m) = is_boundary(&sys, 0).unwrap();
        assert!(b && (m - 1.0).abs() < 1e-12);
        let (b, m) = is_boundary(&sys, 1).unwrap();
        assert!(!b && m.abs() < 1e-12);
        assert!(is_vertex(&sys, 3).unwrap());
        assert!(!is_vertex(&sys, 2).unwrap());
        let report = choquet_boundary(&sys).unwrap();
        assert_eq!(report.boundary().indices(), &[0, 3]);
        assert!(report.agrees());
    }

    #[test]
    fn single_point_space() {
        let sys = FunctionSystem::new(crate::FiniteSpace::indexed(1).unwrap(), vec![vec![1.0]]).unwrap();
        assert!(is_vertex(&sys, 0).unwrap());
        assert!(is_boundary(&sys, 0).unwrap().0);
    }

    #[test]
    fn interval_endpoints() {
        let sys = generators::gen_interval_affine(11).unwrap().system;
        assert!(is_boundary(&sys, 0).unwrap().0);
        assert!(!is_boundary(&sys, 5).unwrap().0);
    }

    #[test]
    fn invertible_basis_makes_every_point_boundary() {
        let sys = generators::gen_interval_full(6).unwrap().system;
        assert_eq!(choquet_boundary(&sys).unwrap().boundary().len(), 6);
    }

    #[test]
    fn dirac_reproduces_field_values() {
        let sys = naturals();
        let f = ScalarField::new(vec![0.2, 0.1, 0.7, 0.4]).unwrap();
        for x in 0..4 {
            let mu = representing_measure(&sys, x, None).unwrap();
            assert!(close(&mu.barycenter(&sys).unwrap(), &sys.embed(x).unwrap(), 1e-12));
            assert_eq!(pair(&Measure::dirac(4, x), &f).unwrap(), f.get(x));
        }
    }

    #[test]
    fn index_errors() {
        let sys = naturals();
        assert!(matches!(is_boundary(&sys, 9), Err(Error::IndexOutOfRange { .. })));
        let f = ScalarField::constant(3, 0.0);
        assert!(matches!(key_interval(&sys, &f, 0), Err(Error::Dimension(_))));
    }
}
