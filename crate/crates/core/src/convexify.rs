//! Φ-conjugates, the Choquet biconjugate and the trace-convexifications.
//!
//! `f^××(x) = sup{φ(x) : φ ∈ Φ, φ ≤ f}` is computed per point as a linear
//! program over the coefficients of `φ`. The same value appears as the lower
//! end of [`crate::measures::key_interval`]; the two computations are dual to
//! each other and are cross-checked in the test suites.
//!
//! Two trace-convexifications are provided. [`hat_positive`] minimizes
//! `⟨ν, f⟩` over nonnegative `ν` representing `x` and coincides with the
//! biconjugate. [`hat_signed`] drops the sign constraint; on a finite space
//! that infimum is either `f(x)` (when `f` lies in the span) or the lower
//! edge of the strip `min f − α`.

use serde::{Deserialize, Serialize};

use crate::lp::{self, Bound, LinearProgram, LpStatus, Relation};
use crate::space::{FunctionSystem, PhiFunction, ScalarField};
use crate::{par_map, Error, Result};

/// Default sup-norm tolerance for `f = f^××`.
pub const CONVEX_TOL: f64 = 1e-7;
/// Half-width padding of the pairing strip used by the trace-convexifications.
pub const DEFAULT_STRIP: f64 = 1.0;

/// `x ↦ a·δ(x) + β`, an affine functional in embedding coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub a: Vec<f64>,
    pub beta: f64,
}

/// Maximum of finitely many affine functionals, composed with the embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexTraceSpec {
    pub pieces: Vec<AffinePiece>,
}

impl ConvexTraceSpec {
    pub fn new(pieces: Vec<AffinePiece>) -> Self {
        ConvexTraceSpec { pieces }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if self.pieces.is_empty() {
            return Err(Error::InvalidInput("convex-trace spec has no pieces".into()));
        }
        for (k, p) in self.pieces.iter().enumerate() {
            if p.a.len() != d {
                return Err(Error::Dimension(format!("piece {k} has {} coefficients, basis has {d}", p.a.len())));
            }
            if !p.beta.is_finite() || p.a.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("piece {k}")));
            }
        }
        Ok(())
    }

    /// `F(q) = max_k (a_k·q + β_k)`
    pub fn eval(&self, q: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.a.iter().zip(q).map(|(a, v)| a * v).sum::<f64>() + p.beta)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `f^×(φ) = max_j (φ(x_j) − f(x_j))`
pub fn phi_conjugate(sys: &FunctionSystem, f: &ScalarField, phi: &PhiFunction) -> Result<f64> {
    sys.check_field(f)?;
    let values = sys.evaluate(phi)?;
    Ok(values.values().iter().zip(f.values()).map(|(p, v)| p - v).fold(f64::NEG_INFINITY, f64::max))
}

/// `maximize φ_c(x)` subject to `φ_c ≤ f` on every point.
pub fn biconjugate_lp(sys: &FunctionSystem, f: &ScalarField, x: usize) -> LinearProgram {
    let d = sys.d();
    let objective = sys.column(x).into_iter().map(|v| -v).collect();
    let mut lp = LinearProgram::new(d).with_objective(objective).with_bounds(vec![Bound::FREE; d]);
    for j in 0..sys.n() {
        lp.constrain(sys.column(j), Relation::Le, f.get(j));
    }
    lp
}

fn prepare(sys: &FunctionSystem, f: &ScalarField) -> Result<()> {
    sys.ensure_valid()?;
    sys.check_field(f)
}

/// Largest minorant from the span, evaluated at `x`, with its coefficients.
pub fn biconjugate_at(sys: &FunctionSystem, f: &ScalarField, x: usize) -> Result<(f64, PhiFunction)> {
    prepare(sys, f)?;
    sys.check_index(x)?;
    let out = lp::solve(&biconjugate_lp(sys, f, x))?;
    match (out.status, out.value, out.point) {
        (LpStatus::Optimal, Some(v), Some(c)) => Ok((-v, PhiFunction::new(c)?)),
        (status, ..) => Err(Error::Verification(format!(
            "minorant LP at point {x} returned {status:?}; it is always feasible and bounded"
        ))),
    }
}

pub fn biconjugate(sys: &FunctionSystem, f: &ScalarField) -> Result<ScalarField> {
    prepare(sys, f)?;
    let values = par_map(sys.n(), |x| biconjugate_at(sys, f, x).map(|(v, _)| v))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    ScalarField::new(values)
}

/// `‖f − f^××‖_∞`
pub fn convexity_gap(sys: &FunctionSystem, f: &ScalarField) -> Result<f64> {
    Ok(f.sup_distance(&biconjugate(sys, f)?))
}

pub fn is_choquet_convex(sys: &FunctionSystem, f: &ScalarField, tol: f64) -> Result<bool> {
    Ok(convexity_gap(sys, f)? <= tol)
}

fn hat_lp(sys: &FunctionSystem, f: &ScalarField, x: usize, alpha: f64, positive: bool) -> LinearProgram {
    let n = sys.n();
    let bound = if positive { Bound::NONNEG } else { Bound::FREE };
    let mut lp = LinearProgram::new(n).with_objective(f.values().to_vec()).with_bounds(vec![bound; n]);
    let b = sys.basis();
    for i in 0..sys.d() {
        lp.constrain(b.row(i).iter().copied().collect(), Relation::Eq, b[(i, x)]);
    }
    lp.constrain(f.values().to_vec(), Relation::Ge, f.min() - alpha);
    lp.constrain(f.values().to_vec(), Relation::Le, f.max() + alpha);
    lp
}

/// LP for [`hat_positive`] at point `x`.
pub fn hat_positive_lp(sys: &FunctionSystem, f: &ScalarField, x: usize) -> LinearProgram {
    hat_lp(sys, f, x, DEFAULT_STRIP, true)
}

/// LP for [`hat_signed`] at point `x`.
pub fn hat_signed_lp(sys: &FunctionSystem, f: &ScalarField, x: usize, alpha: f64) -> LinearProgram {
    hat_lp(sys, f, x, alpha, false)
}

fn hat_values(sys: &FunctionSystem, build: impl Fn(usize) -> LinearProgram + Sync + Send) -> Result<ScalarField> {
    let values = par_map(sys.n(), |x| -> Result<f64> {
        let out = lp::solve(&build(x))?;
        out.value.ok_or_else(|| {
            Error::Verification(format!(
                "trace-convexification LP at point {x} returned {:?}; the Dirac mass is feasible",
                out.status
            ))
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    ScalarField::new(values)
}

/// Infimum of `⟨ν, f⟩` over nonnegative `ν` with the same barycenter as `δ_x`.
pub fn hat_positive(sys: &FunctionSystem, f: &ScalarField) -> Result<ScalarField> {
    prepare(sys, f)?;
    hat_values(sys, |x| hat_positive_lp(sys, f, x))
}

/// Infimum of `⟨ν, f⟩` over signed `ν` with the same barycenter as `δ_x`,
/// restricted to the closed strip `min f − α ≤ ⟨ν, f⟩ ≤ max f + α`.
pub fn hat_signed(sys: &FunctionSystem, f: &ScalarField, alpha: f64) -> Result<ScalarField> {
    prepare(sys, f)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("strip width must be positive, got {alpha}")));
    }
    hat_values(sys, |x| hat_signed_lp(sys, f, x, alpha))
}

/// Pointwise maximum of Choquet-convex fields.
pub fn sup_family(sys: &FunctionSystem, fields: &[ScalarField], tol: f64) -> Result<ScalarField> {
    sys.ensure_valid()?;
    if fields.is_empty() {
        return Err(Error::InvalidInput("sup_family needs at least one field".into()));
    }
    for (k, f) in fields.iter().enumerate() {
        sys.check_field(f)?;
        let gap = convexity_gap(sys, f)?;
        if gap > tol {
            return Err(Error::Precondition(format!("field {k} is not Choquet convex (gap {gap:.3e})")));
        }
    }
    let values = (0..sys.n())
        .map(|j| fields.iter().map(|f| f.get(j)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let sup = ScalarField::new(values)?;
    let gap = convexity_gap(sys, &sup)?;
    if gap > tol {
        return Err(Error::Verification(format!("supremum of Choquet-convex fields has gap {gap:.3e}")));
    }
    Ok(sup)
}

/// `f(x_j) = max_k (a_k·δ(x_j) + β_k)`
pub fn realize_convex_trace(sys: &FunctionSystem, spec: &ConvexTraceSpec) -> Result<ScalarField> {
    spec.validate(sys.d())?;
    ScalarField::new((0..sys.n()).map(|j| spec.eval(&sys.column(j))).collect())
}
