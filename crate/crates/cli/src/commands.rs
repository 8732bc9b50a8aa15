use serde::Serialize;
use serde_json::json;

use choquet::convexify::{
    biconjugate, biconjugate_lp, convexity_gap, hat_positive, hat_positive_lp, hat_signed, hat_signed_lp,
    realize_convex_trace, CONVEX_TOL,
};
use choquet::generators::{self, GeneratedInstance};
use choquet::io::{self, Instance, InstanceFile};
use choquet::lp::LinearProgram;
use choquet::maxprinciple::{
    argmax_set, bauer_verify_with_boundary, expose, genericity_experiment, multi_max_verify_with_boundary,
    GenericityConfig, MultiMaxVerdict, TIE_TOL,
};
use choquet::measures::{choquet_boundary, hull_membership_lp, key_interval, representing_measure_lp};
use choquet::sets::{
    krein_milman_verify, kyfan_extreme_points, kyfan_lp, kyfan_segment, phi_extreme_points, separate,
    separation_lp, trace_hull, PointSet,
};
use choquet::{FunctionSystem, Result, ScalarField};

use crate::input::{self, tolerance};
use crate::{plot, Cli, Command, GenCommand, Outcome};

/// Slack allowed when checking the ordering of the convexifications.
const ORDER_TOL: f64 = 1e-7;

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn labels(sys: &FunctionSystem, s: &PointSet) -> Vec<String> {
    io::set_to_labels(sys.space(), s)
}

fn unit(n: usize, j: usize) -> ScalarField {
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    ScalarField::new(e).expect("finite")
}

fn others(n: usize, x: usize) -> Vec<usize> {
    (0..n).filter(|&j| j != x).collect()
}

fn boundary_lps(sys: &FunctionSystem) -> Vec<LinearProgram> {
    (0..sys.n())
        .flat_map(|x| {
            [representing_measure_lp(sys, x, Some(&unit(sys.n(), x))), hull_membership_lp(sys, x, &others(sys.n(), x))]
        })
        .collect()
}

struct Ctx<'a> {
    cli: &'a Cli,
    want_lps: bool,
}

impl Ctx<'_> {
    fn svg(&self, sys: &FunctionSystem, boundary: &PointSet, overlay: Option<&PointSet>) -> Result<Option<String>> {
        if self.cli.global.plot.is_none() {
            return Ok(None);
        }
        plot::render(sys, boundary, overlay, self.cli.global.axes.as_deref()).map(Some)
    }

    fn lps(&self, build: impl FnOnce() -> Vec<LinearProgram>) -> Vec<LinearProgram> {
        if self.want_lps {
            build()
        } else {
            Vec::new()
        }
    }

    fn convex_tol(&self) -> Result<f64> {
        tolerance("convex-tol", self.cli.global.convex_tol, CONVEX_TOL, self.cli.global.strict)
    }

    fn tie_tol(&self) -> Result<f64> {
        tolerance("tie-tol", self.cli.global.tie_tol, TIE_TOL, self.cli.global.strict)
    }
}

fn outcome(report: String, lps: Vec<LinearProgram>, svg: Option<String>) -> Outcome {
    Outcome { report, lps, svg, violation: None }
}

pub fn dispatch(cli: &Cli) -> Result<Outcome> {
    let ctx = Ctx { cli, want_lps: cli.global.dump_lp.is_some() };
    if let Command::Gen(g) = &cli.command {
        return generate(&ctx, g);
    }
    let inst = input::load_instance(&cli.global)?;
    inst.system.ensure_valid()?;
    match &cli.command {
        Command::Gen(_) => unreachable!(),
        Command::Boundary => boundary(&ctx, &inst),
        Command::Hull(s) => hull(&ctx, &inst.system, s.set.as_ref()),
        Command::Separate { set, point } => separation(&ctx, &inst.system, set.set.as_ref(), point),
        Command::Extreme { set, kyfan } => extreme(&ctx, &inst.system, set.set.as_ref(), *kyfan),
        Command::Kyfan { y, z } => kyfan(&ctx, &inst.system, y, z),
        Command::Convexify { field, alpha } => convexify(&ctx, &inst.system, &field.field, *alpha),
        Command::CheckConvex(field) => check_convex(&ctx, &inst.system, &field.field),
        Command::Keyinterval { field, point } => keyinterval(&ctx, &inst.system, &field.field, point.as_deref()),
        Command::Bauer { spec } => bauer(&ctx, &inst.system, spec),
        Command::Multimax { specs } => multimax(&ctx, &inst.system, specs),
        Command::Expose { point } => exposing(&ctx, &inst.system, point),
        Command::Generic { field, epsilon, trials, outcomes } => {
            generic(&ctx, &inst.system, field.as_deref(), *epsilon, *trials, *outcomes)
        }
        Command::Plot(s) => plot_only(&ctx, &inst.system, s.set.as_ref()),
    }
}

fn generate(ctx: &Ctx, g: &GenCommand) -> Result<Outcome> {
    let inst: GeneratedInstance = match *g {
        GenCommand::Naturals { n } => generators::gen_naturals(n)?,
        GenCommand::Interval { n, full: false } => generators::gen_interval_affine(n)?,
        GenCommand::Interval { n, full: true } => generators::gen_interval_full(n)?,
        GenCommand::Cantor { level, points_per_cell } => generators::gen_cantor(level, points_per_cell)?,
        GenCommand::Disk { n_circle, rings, degree } => generators::gen_disk(n_circle, rings, degree)?,
        GenCommand::Random { n, d } => generators::gen_random(n, d, ctx.cli.global.seed)?,
    };
    let report = InstanceFile::from_generated(&inst).to_json()? + "\n";
    let svg = ctx.svg(&inst.system, &inst.expected_boundary, None)?;
    Ok(outcome(report, Vec::new(), svg))
}

#[derive(Serialize)]
struct PointRow {
    label: String,
    is_boundary: bool,
    min_self_mass: f64,
    vertex_test: bool,
}

#[derive(Serialize)]
struct BoundaryOut {
    boundary: Vec<String>,
    points: Vec<PointRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matches_expected: Option<bool>,
}

fn boundary(ctx: &Ctx, inst: &Instance) -> Result<Outcome> {
    let sys = &inst.system;
    let report = choquet_boundary(sys)?;
    let b = report.boundary();
    let expected = inst.expected_boundary()?;
    let matches = expected.as_ref().map(|e| e == &b);
    let text = if ctx.cli.global.csv {
        io::boundary_csv(sys.space(), &report)?
    } else {
        to_json(&BoundaryOut {
            boundary: labels(sys, &b),
            points: report
                .points
                .iter()
                .map(|p| PointRow {
                    label: sys.space().label(p.index).to_string(),
                    is_boundary: p.is_boundary,
                    min_self_mass: p.min_self_mass,
                    vertex_test: p.vertex_test,
                })
                .collect(),
            expected: expected.as_ref().map(|e| labels(sys, e)),
            matches_expected: matches,
        })?
    };
    let mut out = outcome(text, ctx.lps(|| boundary_lps(sys)), ctx.svg(sys, &b, None)?);
    if ctx.cli.global.strict && matches == Some(false) {
        out.violation = Some("boundary differs from the instance's expected boundary".into());
    }
    Ok(out)
}

fn hull(ctx: &Ctx, sys: &FunctionSystem, set: Option<&Vec<String>>) -> Result<Outcome> {
    let s = input::set(sys, set)?;
    let h = trace_hull(sys, &s)?;
    let report = to_json(&json!({
        "set": labels(sys, &s),
        "hull": labels(sys, &h),
        "trace_convex": h == s,
    }))?;
    let lps = ctx.lps(|| {
        (0..sys.n())
            .filter(|&x| !s.contains(x) && !sys.space().is_ideal(x))
            .map(|x| hull_membership_lp(sys, x, s.indices()))
            .collect()
    });
    let svg = if ctx.cli.global.plot.is_some() {
        ctx.svg(sys, &choquet_boundary(sys)?.boundary(), Some(&h))?
    } else {
        None
    };
    Ok(outcome(report, lps, svg))
}

fn separation(ctx: &Ctx, sys: &FunctionSystem, set: Option<&Vec<String>>, point: &str) -> Result<Outcome> {
    let x = input::point(sys, point)?;
    let c = match set {
        Some(_) => input::set(sys, set)?,
        None => PointSet::new(others(sys.n(), x)),
    };
    let r = separate(sys, &c, x)?;
    let values = r.witness.as_ref().map(|w| sys.evaluate(w)).transpose()?;
    let report = to_json(&json!({
        "point": point,
        "set": labels(sys, &c),
        "separable": r.separable,
        "witness": r.witness.as_ref().map(|w| &w.coeffs),
        "witness_values": values.as_ref().map(|v| v.values()),
        "margin": r.margin,
    }))?;
    Ok(outcome(report, ctx.lps(|| vec![separation_lp(sys, &c, x)]), None))
}

fn extreme(ctx: &Ctx, sys: &FunctionSystem, set: Option<&Vec<String>>, with_kyfan: bool) -> Result<Outcome> {
    let s = input::set(sys, set)?;
    let km = krein_milman_verify(sys, &s)?;
    let phi = phi_extreme_points(sys, &s)?;
    let kf = if with_kyfan { Some(kyfan_extreme_points(sys, &s)?) } else { None };
    let report = to_json(&json!({
        "set": labels(sys, &s),
        "phi_extreme": labels(sys, &phi),
        "kyfan_extreme": kf.as_ref().map(|k| labels(sys, k)),
        "hull": labels(sys, &km.hull),
        "extreme_hull": labels(sys, &km.extreme_hull),
        "krein_milman": km.holds,
    }))?;
    let lps = ctx.lps(|| s.indices().iter().map(|&x| hull_membership_lp(sys, x, &s.without(x))).collect());
    let mut out = outcome(report, lps, ctx.svg(sys, &phi, Some(&s))?);
    if !km.holds {
        out.violation = Some("hull of the Φ-extreme points differs from the hull of the set".into());
    } else if kf.as_ref().is_some_and(|k| !phi.is_subset(k)) {
        out.violation = Some("a Φ-extreme point is not Ky Fan extreme".into());
    }
    Ok(out)
}

fn kyfan(ctx: &Ctx, sys: &FunctionSystem, y: &str, z: &str) -> Result<Outcome> {
    let (yi, zi) = (input::point(sys, y)?, input::point(sys, z)?);
    let seg = kyfan_segment(sys, yi, zi)?;
    let report = to_json(&json!({ "y": y, "z": z, "segment": labels(sys, &seg) }))?;
    let lps = ctx.lps(|| (0..sys.n()).filter(|&x| x != yi && x != zi).map(|x| kyfan_lp(sys, x, yi, zi)).collect());
    Ok(outcome(report, lps, None))
}

fn convexify(ctx: &Ctx, sys: &FunctionSystem, field: &str, alpha: f64) -> Result<Outcome> {
    let f = input::field(sys, field)?;
    let g = biconjugate(sys, &f)?;
    let hp = hat_positive(sys, &f)?;
    let hs = hat_signed(sys, &f, alpha)?;
    let residual = sys.span_residual(&f)?;
    let discrepancy = hs.sup_distance(&hp);
    let text = if ctx.cli.global.csv {
        io::field_csv(sys.space(), &[("f", &f), ("biconjugate", &g), ("hat_positive", &hp), ("hat_signed", &hs)])?
    } else {
        to_json(&json!({
            "labels": sys.space().labels(),
            "f": f.values(),
            "biconjugate": g.values(),
            "hat_positive": hp.values(),
            "hat_signed": hs.values(),
            "alpha": alpha,
            "span_residual": residual,
            "signed_discrepancy": discrepancy,
        }))?
    };
    let lps = ctx.lps(|| {
        (0..sys.n())
            .flat_map(|x| [biconjugate_lp(sys, &f, x), hat_positive_lp(sys, &f, x), hat_signed_lp(sys, &f, x, alpha)])
            .collect()
    });
    let mut out = outcome(text, lps, None);
    let bad = (0..sys.n()).find(|&x| {
        hs.get(x) > hp.get(x) + ORDER_TOL || (hp.get(x) - g.get(x)).abs() > ORDER_TOL || g.get(x) > f.get(x) + ORDER_TOL
    });
    if let Some(x) = bad {
        out.violation = Some(format!("convexification order fails at {:?}", sys.space().label(x)));
    }
    Ok(out)
}

fn check_convex(ctx: &Ctx, sys: &FunctionSystem, field: &str) -> Result<Outcome> {
    let f = input::field(sys, field)?;
    let tol = ctx.convex_tol()?;
    let gap = convexity_gap(sys, &f)?;
    let report = to_json(&json!({ "choquet_convex": gap <= tol, "gap": gap, "tol": tol }))?;
    Ok(outcome(report, ctx.lps(|| (0..sys.n()).map(|x| biconjugate_lp(sys, &f, x)).collect()), None))
}

fn keyinterval(ctx: &Ctx, sys: &FunctionSystem, field: &str, point: Option<&str>) -> Result<Outcome> {
    let f = input::field(sys, field)?;
    let points: Vec<usize> = match point {
        Some(p) => vec![input::point(sys, p)?],
        None => (0..sys.n()).collect(),
    };
    let mut rows = Vec::new();
    let mut violation = None;
    for &x in &points {
        let k = key_interval(sys, &f, x)?;
        if !k.contains(f.get(x), ORDER_TOL) && violation.is_none() {
            violation = Some(format!("f({:?}) lies outside its key interval", sys.space().label(x)));
        }
        rows.push(json!({ "label": sys.space().label(x), "value": f.get(x), "lo": k.lo, "hi": k.hi }));
    }
    let neg = f.scale(-1.0);
    let lps = ctx.lps(|| {
        points
            .iter()
            .flat_map(|&x| [representing_measure_lp(sys, x, Some(&f)), representing_measure_lp(sys, x, Some(&neg))])
            .collect()
    });
    let mut out = outcome(to_json(&rows)?, lps, None);
    out.violation = violation;
    Ok(out)
}

fn bauer(ctx: &Ctx, sys: &FunctionSystem, spec: &std::path::Path) -> Result<Outcome> {
    let spec = input::spec(spec, sys.d())?;
    let b = choquet_boundary(sys)?.boundary();
    let r = bauer_verify_with_boundary(sys, &spec, &b)?;
    let values = realize_convex_trace(sys, &spec)?;
    let report = to_json(&json!({
        "argmax": labels(sys, &r.argmax),
        "max_value": r.max_value,
        "boundary": labels(sys, &r.boundary),
        "boundary_argmax": labels(sys, &r.boundary_argmax),
        "boundary_max": r.boundary_max,
        "bauer_ok": r.bauer_ok,
        "values": values.values(),
    }))?;
    let mut out = outcome(report, ctx.lps(|| boundary_lps(sys)), ctx.svg(sys, &b, Some(&r.argmax))?);
    if !r.bauer_ok {
        out.violation = Some("maximum not attained on the boundary".into());
    }
    Ok(out)
}

fn multimax(ctx: &Ctx, sys: &FunctionSystem, specs: &std::path::Path) -> Result<Outcome> {
    let specs = input::specs(specs, sys.d())?;
    let b = choquet_boundary(sys)?.boundary();
    let r = multi_max_verify_with_boundary(sys, &specs, &b)?;
    let report = to_json(&json!({
        "argmax_sets": r.argmax_sets.iter().map(|s| labels(sys, s)).collect::<Vec<_>>(),
        "common_argmax": labels(sys, &r.common_argmax),
        "common_boundary_argmax": labels(sys, &r.common_boundary_argmax),
        "verdict": r.verdict,
    }))?;
    let mut out = outcome(report, ctx.lps(|| boundary_lps(sys)), None);
    if r.verdict == MultiMaxVerdict::Violated {
        out.violation = Some("common maximizers exist but none is on the boundary".into());
    }
    Ok(out)
}

fn exposing(ctx: &Ctx, sys: &FunctionSystem, point: &str) -> Result<Outcome> {
    let x = input::point(sys, point)?;
    let phi = expose(sys, x)?;
    let values = sys.evaluate(&phi)?;
    let runner_up = others(sys.n(), x).into_iter().map(|j| values.get(j)).fold(f64::NEG_INFINITY, f64::max);
    let report = to_json(&json!({
        "point": point,
        "coeffs": phi.coeffs,
        "values": values.values(),
        "argmax": labels(sys, &argmax_set(&values, choquet::maxprinciple::ARGMAX_TOL)),
        "margin": values.get(x) - runner_up,
    }))?;
    let lps = ctx.lps(|| vec![separation_lp(sys, &PointSet::new(others(sys.n(), x)), x)]);
    Ok(outcome(report, lps, None))
}

fn generic(
    ctx: &Ctx,
    sys: &FunctionSystem,
    field: Option<&str>,
    epsilon: f64,
    trials: usize,
    with_outcomes: bool,
) -> Result<Outcome> {
    let f = match field {
        Some(a) => input::field(sys, a)?,
        None => ScalarField::constant(sys.n(), 0.0),
    };
    let cfg = GenericityConfig { trials, epsilon, seed: ctx.cli.global.seed, tie_tol: ctx.tie_tol()? };
    let r = genericity_experiment(sys, &f, &cfg)?;
    let outcomes: Option<Vec<_>> = with_outcomes.then(|| {
        r.outcomes
            .iter()
            .map(|o| json!({ "trial": o.trial, "argmax_size": o.argmax_size, "argmax_first": sys.space().label(o.argmax_first) }))
            .collect()
    });
    let report = to_json(&json!({
        "trials": r.trials,
        "unique_count": r.unique_count,
        "unique_fraction": r.unique_fraction,
        "epsilon": r.perturbation_norm,
        "seed": r.seed,
        "tie_tol": r.tie_tol,
        "outcomes": outcomes,
    }))?;
    Ok(outcome(report, Vec::new(), None))
}

fn plot_only(ctx: &Ctx, sys: &FunctionSystem, set: Option<&Vec<String>>) -> Result<Outcome> {
    let overlay = set.map(|_| input::set(sys, set)).transpose()?;
    let b = choquet_boundary(sys)?.boundary();
    let svg = plot::render(sys, &b, overlay.as_ref(), ctx.cli.global.axes.as_deref())?;
    let extra = ctx.svg(sys, &b, overlay.as_ref())?;
    Ok(outcome(svg, ctx.lps(|| boundary_lps(sys)), extra))
}
