//! Maximum principles on finite spaces.
//!
//! Convex-trace fields are given as maxima of affine functionals composed
//! with the embedding ([`ConvexTraceSpec`]). Their maximum over the space is
//! always attained on the Choquet boundary; a family with a common maximizer
//! has a common maximizer on the boundary; each boundary point is the strict
//! maximizer of some element of the span.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convexify::{realize_convex_trace, AffinePiece, ConvexTraceSpec};
use crate::measures::{choquet_boundary, is_boundary};
use crate::sets::{separating_function, PointSet};
use crate::space::{FunctionSystem, PhiFunction, ScalarField};
use crate::{par_map, Error, Result};

/// Values within this distance of the maximum count as maximizers.
pub const ARGMAX_TOL: f64 = 1e-9;
/// Default tie tolerance for the genericity experiment.
pub const TIE_TOL: f64 = 1e-9;
/// Random specs tried when refuting a non-boundary point.
pub const CHARACTERIZATION_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxReport {
    pub argmax: PointSet,
    pub max_value: f64,
    pub boundary: PointSet,
    pub boundary_argmax: PointSet,
    pub boundary_max: f64,
    pub bauer_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiMaxVerdict {
    /// A common maximizer exists and one of them is a boundary point.
    Verified,
    /// The argmax sets have empty intersection; nothing to check.
    HypothesisVoid,
    /// Common maximizers exist but none is on the boundary.
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiMaxReport {
    pub argmax_sets: Vec<PointSet>,
    pub common_argmax: PointSet,
    pub common_boundary_argmax: PointSet,
    pub verdict: MultiMaxVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenericityConfig {
    pub trials: usize,
    /// Half-width of the coefficient box the perturbations are drawn from.
    pub epsilon: f64,
    pub seed: u64,
    pub tie_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub argmax_size: usize,
    pub argmax_first: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericityReport {
    pub trials: usize,
    pub unique_count: usize,
    pub unique_fraction: f64,
    pub perturbation_norm: f64,
    pub seed: u64,
    pub tie_tol: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub outcomes: Vec<TrialOutcome>,
}

/// `{j : f_j ≥ max f − tol}`
pub fn argmax_set(f: &ScalarField, tol: f64) -> PointSet {
    let m = f.max();
    PointSet::new((0..f.len()).filter(|&j| f.get(j) >= m - tol).collect())
}

fn max_over(f: &ScalarField, s: &PointSet) -> f64 {
    s.indices().iter().map(|&j| f.get(j)).fold(f64::NEG_INFINITY, f64::max)
}

/// Realizes `spec` and checks that its maximum is attained on the boundary.
pub fn bauer_verify(sys: &FunctionSystem, spec: &ConvexTraceSpec) -> Result<MaxReport> {
    let boundary = choquet_boundary(sys)?.boundary();
    bauer_verify_with_boundary(sys, spec, &boundary)
}

/// [`bauer_verify`] with a precomputed boundary.
pub fn bauer_verify_with_boundary(sys: &FunctionSystem, spec: &ConvexTraceSpec, boundary: &PointSet) -> Result<MaxReport> {
    sys.ensure_valid()?;
    boundary.check(sys)?;
    let f = realize_convex_trace(sys, spec)?;
    let argmax = argmax_set(&f, ARGMAX_TOL);
    let max_value = f.max();
    // the max of F over the embedded points is the same finite max
    let column_max = (0..sys.n()).map(|j| spec.eval(&sys.column(j))).fold(f64::NEG_INFINITY, f64::max);
    if column_max != max_value {
        return Err(Error::Verification(format!(
            "max over embedded points {column_max} differs from field max {max_value}"
        )));
    }
    let boundary_argmax = argmax.intersection(boundary);
    let boundary_max = max_over(&f, boundary);
    let bauer_ok = !boundary_argmax.is_empty() && (max_value - boundary_max).abs() <= ARGMAX_TOL;
    Ok(MaxReport { argmax, max_value, boundary: boundary.clone(), boundary_argmax, boundary_max, bauer_ok })
}

/// Checks that a family with a common maximizer has one on the boundary.
pub fn multi_max_verify(sys: &FunctionSystem, specs: &[ConvexTraceSpec]) -> Result<MultiMaxReport> {
    let boundary = choquet_boundary(sys)?.boundary();
    multi_max_verify_with_boundary(sys, specs, &boundary)
}

pub fn multi_max_verify_with_boundary(sys: &FunctionSystem, specs: &[ConvexTraceSpec], boundary: &PointSet) -> Result<MultiMaxReport> {
    sys.ensure_valid()?;
    if specs.is_empty() {
        return Err(Error::InvalidInput("multi-max needs a nonempty family".into()));
    }
    let argmax_sets = specs
        .iter()
        .map(|s| realize_convex_trace(sys, s).map(|f| argmax_set(&f, ARGMAX_TOL)))
        .collect::<Result<Vec<_>>>()?;
    let common_argmax = argmax_sets.iter().skip(1).fold(argmax_sets[0].clone(), |acc, s| acc.intersection(s));
    let common_boundary_argmax = common_argmax.intersection(boundary);
    let verdict = if common_argmax.is_empty() {
        MultiMaxVerdict::HypothesisVoid
    } else if common_boundary_argmax.is_empty() {
        MultiMaxVerdict::Violated
    } else {
        MultiMaxVerdict::Verified
    };
    Ok(MultiMaxReport { argmax_sets, common_argmax, common_boundary_argmax, verdict })
}

/// An element of the span whose unique maximizer is the boundary point `xbar`,
/// normalized so that it exceeds every other value by at least one.
pub fn expose(sys: &FunctionSystem, xbar: usize) -> Result<PhiFunction> {
    sys.ensure_valid()?;
    sys.check_index(xbar)?;
    let (boundary, mass) = is_boundary(sys, xbar)?;
    if !boundary {
        return Err(Error::Precondition(format!(
            "point {:?} is not a boundary point (min self-mass {mass:.3e})",
            sys.space().label(xbar)
        )));
    }
    let others = PointSet::new((0..sys.n()).filter(|&j| j != xbar).collect());
    let (phi, margin) = separating_function(sys, &others, xbar)?.ok_or_else(|| {
        Error::Verification(format!("boundary point {:?} admits no exposing function", sys.space().label(xbar)))
    })?;
    let phi = PhiFunction::new(phi.coeffs.iter().map(|c| c / margin).collect())?;
    let field = sys.evaluate(&phi)?;
    if argmax_set(&field, ARGMAX_TOL) != PointSet::singleton(xbar) {
        return Err(Error::Verification(format!(
            "exposing function for {:?} has a tied maximum",
            sys.space().label(xbar)
        )));
    }
    Ok(phi)
}

/// Uniform random max-of-affine spec with `1..=max_pieces` pieces and entries in `[-1, 1]`.
pub fn random_spec<R: Rng>(rng: &mut R, d: usize, max_pieces: usize) -> ConvexTraceSpec {
    let k = rng.random_range(1..=max_pieces.max(1));
    ConvexTraceSpec::new(
        (0..k)
            .map(|_| AffinePiece {
                a: (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect(),
                beta: rng.random_range(-1.0..=1.0),
            })
            .collect(),
    )
}

/// Adds a randomly scaled copy of the exposing function of boundary point `x`,
/// shifted so its value at `x` equals the current maximum. The new piece is
/// below that maximum everywhere else, so `x` joins the maximizers and the
/// existing ones stay.
pub fn plant_maximizer<R: Rng>(sys: &FunctionSystem, spec: &mut ConvexTraceSpec, x: usize, rng: &mut R) -> Result<()> {
    let exposing = expose(sys, x)?;
    let f = realize_convex_trace(sys, spec)?;
    let s = rng.random_range(0.1..=1.0);
    let a: Vec<f64> = exposing.coeffs.iter().map(|c| s * c).collect();
    let at_x: f64 = a.iter().zip(sys.column(x)).map(|(a, b)| a * b).sum();
    spec.pieces.push(AffinePiece { a, beta: f.max() - at_x });
    Ok(())
}

/// A random piece through the current maximum at `x`; for a point inside the
/// hull of the others it must reach that value somewhere else too.
fn lift_at<R: Rng>(sys: &FunctionSystem, spec: &mut ConvexTraceSpec, x: usize, rng: &mut R) -> Result<()> {
    let f = realize_convex_trace(sys, spec)?;
    let a: Vec<f64> = (0..sys.d()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let at_x: f64 = a.iter().zip(sys.column(x)).map(|(a, b)| a * b).sum();
    spec.pieces.push(AffinePiece { a, beta: f.max() - at_x });
    Ok(())
}

/// Adds the exposing function of boundary point `x`, shifted to dominate,
/// so `x` is the unique maximizer of the enlarged spec.
pub fn plant_strict_maximizer(sys: &FunctionSystem, spec: &mut ConvexTraceSpec, x: usize, exposing: &PhiFunction) -> Result<()> {
    let f = realize_convex_trace(sys, spec)?;
    let e = sys.evaluate(exposing)?;
    spec.pieces.push(AffinePiece { a: exposing.coeffs.clone(), beta: f.max() + 1.0 - e.get(x) });
    Ok(())
}

/// Decides boundary membership through maximizers of convex-trace fields
/// and checks the answer against the self-mass test.
///
/// A boundary point is confirmed by an exposing function. For any other
/// point the exposing LP must be infeasible, and every sampled spec made
/// to attain its maximum at the point must attain it elsewhere as well.
pub fn boundary_characterization(sys: &FunctionSystem, xbar: usize, samples: usize, seed: u64) -> Result<bool> {
    sys.ensure_valid()?;
    sys.check_index(xbar)?;
    let (boundary, _) = is_boundary(sys, xbar)?;
    if boundary {
        expose(sys, xbar)?;
        return Ok(true);
    }
    let others = PointSet::new((0..sys.n()).filter(|&j| j != xbar).collect());
    if separating_function(sys, &others, xbar)?.is_some() {
        return Err(Error::Verification(format!(
            "non-boundary point {:?} is strictly exposed",
            sys.space().label(xbar)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut spec = random_spec(&mut rng, sys.d(), 4);
        lift_at(sys, &mut spec, xbar, &mut rng)?;
        let f = realize_convex_trace(sys, &spec)?;
        let argmax = argmax_set(&f, ARGMAX_TOL);
        if argmax == PointSet::singleton(xbar) {
            return Err(Error::Verification(format!(
                "non-boundary point {:?} is the unique maximizer of a convex-trace field",
                sys.space().label(xbar)
            )));
        }
    }
    Ok(false)
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Perturbs `f` by random elements of the span and counts how often the
/// maximizer is unique.
pub fn genericity_experiment(sys: &FunctionSystem, f: &ScalarField, cfg: &GenericityConfig) -> Result<GenericityReport> {
    sys.ensure_valid()?;
    sys.check_field(f)?;
    if cfg.trials == 0 {
        return Err(Error::InvalidInput("genericity experiment needs at least one trial".into()));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {}", cfg.epsilon)));
    }
    if !(cfg.tie_tol >= 0.0) {
        return Err(Error::InvalidInput(format!("tie tolerance must be nonnegative, got {}", cfg.tie_tol)));
    }
    let outcomes = par_map(cfg.trials, |trial| -> Result<TrialOutcome> {
        let mut rng = trial_rng(cfg.seed, trial);
        let coeffs = (0..sys.d()).map(|_| rng.random_range(-cfg.epsilon..=cfg.epsilon)).collect();
        let g = f.add(&sys.evaluate(&PhiFunction::new(coeffs)?)?);
        let argmax = argmax_set(&g, cfg.tie_tol);
        Ok(TrialOutcome { trial, argmax_size: argmax.len(), argmax_first: argmax.indices()[0] })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let unique_count = outcomes.iter().filter(|o| o.argmax_size == 1).count();
    Ok(GenericityReport {
        trials: cfg.trials,
        unique_count,
        unique_fraction: unique_count as f64 / cfg.trials as f64,
        perturbation_norm: cfg.epsilon,
        seed: cfg.seed,
        tie_tol: cfg.tie_tol,
        outcomes,
    })
}
