//! Convex-trace sets: hulls, separation, Φ-extreme points and Ky Fan segments.
//!
//! A set `C` is trace-convex when every point whose embedding falls in the
//! convex hull of the embedded `C` already belongs to `C`. Points flagged as
//! ideal (belonging to the compactification only) are never added to a hull.

use serde::{Deserialize, Serialize};

use crate::lp::{self, Bound, LinearProgram, Relation};
use crate::measures::in_convex_hull;
use crate::space::{FunctionSystem, PhiFunction};
use crate::{par_map, Error, Result};

/// Smallest normalized margin that counts as a strict separation.
pub const SEPARATION_TOL: f64 = 1e-9;

/// Sorted, duplicate-free point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct PointSet(Vec<usize>);

impl PointSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        PointSet(indices)
    }

    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        PointSet(indices)
    }

    pub fn full(n: usize) -> Self {
        PointSet((0..n).collect())
    }

    pub fn singleton(j: usize) -> Self {
        PointSet(vec![j])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.iter().all(|&j| other.contains(j))
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet(self.0.iter().copied().filter(|&j| other.contains(j)).collect())
    }

    pub fn without(&self, j: usize) -> Vec<usize> {
        self.0.iter().copied().filter(|&i| i != j).collect()
    }

    pub fn check(&self, sys: &FunctionSystem) -> Result<()> {
        match self.0.last() {
            Some(&j) if j >= sys.n() => Err(Error::IndexOutOfRange { index: j, len: sys.n() }),
            _ => Ok(()),
        }
    }

    fn require_nonempty(&self, what: &str) -> Result<()> {
        if self.is_empty() {
            Err(Error::Precondition(format!("{what} needs a nonempty point set")))
        } else {
            Ok(())
        }
    }
}

impl From<Vec<usize>> for PointSet {
    fn from(v: Vec<usize>) -> Self {
        PointSet::new(v)
    }
}

impl From<PointSet> for Vec<usize> {
    fn from(s: PointSet) -> Self {
        s.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub separable: bool,
    pub witness: Option<PhiFunction>,
    /// `φ(x̄) − max_C φ` for the witness (capped at one); zero when not separable.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KreinMilmanReport {
    pub hull: PointSet,
    pub extreme: PointSet,
    pub extreme_hull: PointSet,
    pub holds: bool,
}

fn prepare(sys: &FunctionSystem, s: &PointSet, what: &str) -> Result<()> {
    sys.ensure_valid()?;
    s.check(sys)?;
    s.require_nonempty(what)
}

/// Smallest trace-convex set containing `s`.
pub fn trace_hull(sys: &FunctionSystem, s: &PointSet) -> Result<PointSet> {
    prepare(sys, s, "trace_hull")?;
    let members = par_map(sys.n(), |x| -> Result<bool> {
        if s.contains(x) {
            return Ok(true);
        }
        if sys.space().is_ideal(x) {
            return Ok(false);
        }
        in_convex_hull(sys, x, s.indices())
    });
    let mut out = Vec::new();
    for (x, m) in members.into_iter().enumerate() {
        if m? {
            out.push(x);
        }
    }
    Ok(PointSet::from_sorted(out))
}

pub fn is_trace_convex(sys: &FunctionSystem, c: &PointSet) -> Result<bool> {
    Ok(&trace_hull(sys, c)? == c)
}

/// Variables `(c, t)`: maximize `t` subject to `φ_c(x_j) + t ≤ φ_c(x̄)` on `C`,
/// `|cᵢ| ≤ 1`, `t ≤ 1`.
pub fn separation_lp(sys: &FunctionSystem, c: &PointSet, xbar: usize) -> LinearProgram {
    let d = sys.d();
    let mut objective = vec![0.0; d + 1];
    objective[d] = -1.0;
    let mut bounds = vec![Bound::boxed(-1.0, 1.0); d];
    bounds.push(Bound::new(None, Some(1.0)));
    let mut lp = LinearProgram::new(d + 1).with_objective(objective).with_bounds(bounds);
    let bx = sys.column(xbar);
    for &j in c.indices() {
        let mut row: Vec<f64> = sys.column(j).iter().zip(&bx).map(|(a, b)| a - b).collect();
        row.push(1.0);
        lp.constrain(row, Relation::Le, 0.0);
    }
    lp
}

/// A coefficient vector with `|cᵢ| ≤ 1` maximizing `φ(x̄) − max_C φ`, when
/// that margin exceeds [`SEPARATION_TOL`].
pub fn separating_function(sys: &FunctionSystem, c: &PointSet, xbar: usize) -> Result<Option<(PhiFunction, f64)>> {
    let out = lp::solve(&separation_lp(sys, c, xbar))?;
    match (out.value, out.point) {
        (Some(v), Some(mut p)) if -v > SEPARATION_TOL => {
            p.truncate(sys.d());
            Ok(Some((PhiFunction::new(p)?, -v)))
        }
        (Some(_), Some(_)) => Ok(None),
        _ => Err(Error::Verification(format!("separation LP returned {:?}; it is bounded and feasible", out.status))),
    }
}

/// Looks for `φ` with `sup_C φ < φ(x̄)` and cross-checks the answer against
/// hull membership of `x̄`.
pub fn separate(sys: &FunctionSystem, c: &PointSet, xbar: usize) -> Result<SeparationResult> {
    sys.ensure_valid()?;
    c.check(sys)?;
    sys.check_index(xbar)?;
    if c.contains(xbar) {
        return Err(Error::Precondition(format!(
            "point {:?} belongs to the set it should be separated from",
            sys.space().label(xbar)
        )));
    }
    let result = match separating_function(sys, c, xbar)? {
        Some((witness, margin)) => SeparationResult { separable: true, witness: Some(witness), margin },
        None => SeparationResult { separable: false, witness: None, margin: 0.0 },
    };
    let in_hull = in_convex_hull(sys, xbar, c.indices())?;
    if result.separable == in_hull {
        return Err(Error::Verification(format!(
            "separation ({}) disagrees with hull membership ({}) for point {:?}",
            result.separable,
            in_hull,
            sys.space().label(xbar)
        )));
    }
    Ok(result)
}

/// Points of `s` whose embedding is extreme in the hull of the embedded `s`.
pub fn phi_extreme_points(sys: &FunctionSystem, s: &PointSet) -> Result<PointSet> {
    prepare(sys, s, "phi_extreme_points")?;
    let flags = par_map(s.len(), |k| -> Result<bool> {
        let x = s.indices()[k];
        Ok(!in_convex_hull(sys, x, &s.without(x))?)
    });
    let mut out = Vec::new();
    for (k, f) in flags.into_iter().enumerate() {
        if f? {
            out.push(s.indices()[k]);
        }
    }
    Ok(PointSet::from_sorted(out))
}

/// Computes the hull of `s` and the hull of its Φ-extreme points.
pub fn krein_milman_verify(sys: &FunctionSystem, s: &PointSet) -> Result<KreinMilmanReport> {
    prepare(sys, s, "krein_milman_verify")?;
    let hull = trace_hull(sys, s)?;
    let extreme = phi_extreme_points(sys, s)?;
    let extreme_hull = trace_hull(sys, &extreme)?;
    let holds = hull == extreme_hull;
    Ok(KreinMilmanReport { hull, extreme, extreme_hull, holds })
}

/// `{c : φ(x) ≤ φ(y), φ(x) ≤ φ(z), φ(y) + φ(z) − 2φ(x) ≥ 1}`; feasible iff
/// the segment implication fails for `x`.
pub fn kyfan_lp(sys: &FunctionSystem, x: usize, y: usize, z: usize) -> LinearProgram {
    let d = sys.d();
    let (bx, by, bz) = (sys.column(x), sys.column(y), sys.column(z));
    let mut lp = LinearProgram::new(d).with_bounds(vec![Bound::FREE; d]);
    lp.constrain((0..d).map(|i| by[i] - bx[i]).collect(), Relation::Ge, 0.0);
    lp.constrain((0..d).map(|i| bz[i] - bx[i]).collect(), Relation::Ge, 0.0);
    lp.constrain((0..d).map(|i| by[i] + bz[i] - 2.0 * bx[i]).collect(), Relation::Ge, 1.0);
    lp
}

/// Whether every `φ` with `φ(x) ≤ min{φ(y), φ(z)}` has `φ(x) = φ(y) = φ(z)`.
pub fn kyfan_implication(sys: &FunctionSystem, x: usize, y: usize, z: usize) -> Result<bool> {
    for j in [x, y, z] {
        sys.check_index(j)?;
    }
    if x == y && y == z {
        return Ok(true);
    }
    // Basis rows and their negatives are cheap candidate witnesses.
    let b = sys.basis();
    for i in 0..sys.d() {
        for sign in [1.0, -1.0] {
            let (px, py, pz) = (sign * b[(i, x)], sign * b[(i, y)], sign * b[(i, z)]);
            if px <= py && px <= pz && (py - px) + (pz - px) > 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(lp::feasible(&kyfan_lp(sys, x, y, z))?.is_none())
}

/// The Ky Fan segment `[y, z]_Φ`, endpoints included.
pub fn kyfan_segment(sys: &FunctionSystem, y: usize, z: usize) -> Result<PointSet> {
    sys.ensure_valid()?;
    sys.check_index(y)?;
    sys.check_index(z)?;
    let flags = par_map(sys.n(), |x| -> Result<bool> {
        if x == y || x == z {
            return Ok(true);
        }
        kyfan_implication(sys, x, y, z)
    });
    let mut out = Vec::new();
    for (x, f) in flags.into_iter().enumerate() {
        if f? {
            out.push(x);
        }
    }
    Ok(PointSet::from_sorted(out))
}

/// Points `x ∈ s` that lie in no segment `[y, z]_Φ` with `y, z ∈ s ∖ {x}`.
pub fn kyfan_extreme_points(sys: &FunctionSystem, s: &PointSet) -> Result<PointSet> {
    prepare(sys, s, "kyfan_extreme_points")?;
    let flags = par_map(s.len(), |k| -> Result<bool> {
        let x = s.indices()[k];
        let others = s.without(x);
        for (a, &y) in others.iter().enumerate() {
            for &z in &others[a..] {
                if kyfan_implication(sys, x, y, z)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    });
    let mut out = Vec::new();
    for (k, f) in flags.into_iter().enumerate() {
        if f? {
            out.push(s.indices()[k]);
        }
    }
    Ok(PointSet::from_sorted(out))
}
