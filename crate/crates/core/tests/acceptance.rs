//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use choquet::convexify::{
    biconjugate, hat_positive, hat_signed, realize_convex_trace,
};
use choquet::generators::{gen_cantor, gen_disk, gen_interval_affine, gen_interval_full, gen_naturals, gen_random, GeneratedInstance};
use choquet::io::InstanceFile;
use choquet::maxprinciple::{
    bauer_verify_with_boundary, genericity_experiment, multi_max_verify_with_boundary, plant_maximizer, random_spec,
    GenericityConfig, MultiMaxVerdict,
};
use choquet::measures::{choquet_boundary, key_interval};
use choquet::sets::{
    is_trace_convex, krein_milman_verify, kyfan_extreme_points, kyfan_segment, phi_extreme_points, separate, PointSet,
};
use choquet::{FunctionSystem, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn within(start: Instant, limit_secs: u64) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(limit_secs), "took {t:.2?}, limit {limit_secs} s");
    Ok(t)
}

fn random_field(rng: &mut ChaCha8Rng, n: usize) -> ScalarField {
    ScalarField::new((0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()).unwrap()
}

fn random_system(rng: &mut ChaCha8Rng, max_n: usize, max_d: usize) -> FunctionSystem {
    let n = rng.random_range(3..=max_n);
    let d = rng.random_range(2..=max_d.min(n));
    gen_random(n, d, rng.random()).unwrap().system
}

fn fixtures() -> Vec<(String, GeneratedInstance)> {
    let mut out = vec![
        ("naturals(4)".to_string(), gen_naturals(4).unwrap()),
        ("interval(101)".to_string(), gen_interval_affine(101).unwrap()),
        ("interval_full(21)".to_string(), gen_interval_full(21).unwrap()),
    ];
    for level in 1..=3 {
        out.push((format!("cantor({level})"), gen_cantor(level, 2).unwrap()));
    }
    out.push(("disk(64,4,8)".to_string(), gen_disk(64, 4, 8).unwrap()));
    out
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let sys = gen_naturals(4).map_err(|e| e.to_string())?.system;
    let boundary = ok(choquet_boundary(&sys))?.boundary();
    ensure!(boundary == PointSet::new(vec![0, 3]), "boundary {boundary:?}");
    let mut convex = 0;
    for mask in 1u32..16 {
        let s = PointSet::new((0..4).filter(|&j| mask & (1 << j) != 0).collect());
        let idx = s.indices();
        let interval = idx[idx.len() - 1] - idx[0] + 1 == idx.len();
        let tc = ok(is_trace_convex(&sys, &s))?;
        ensure!(tc == interval, "subset {idx:?}: trace-convex {tc}, order interval {interval}");
        convex += tc as usize;
        ensure!(ok(krein_milman_verify(&sys, &s))?.holds, "Krein-Milman fails on {idx:?}");
    }
    ensure!(convex == 10, "{convex} trace-convex subsets");
    let t = within(start, 1)?;
    Ok(format!("boundary {{1,4}}, 10/15 trace-convex, Krein-Milman holds ({t:.2?})"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let affine = gen_interval_affine(101).unwrap().system;
    let b = ok(choquet_boundary(&affine))?.boundary();
    ensure!(b == PointSet::new(vec![0, 100]), "affine boundary {b:?}");
    let full = gen_interval_full(101).unwrap().system;
    let b = ok(choquet_boundary(&full))?.boundary();
    ensure!(b == PointSet::full(101), "full-space boundary has {} points", b.len());
    let t = within(start, 5)?;
    Ok(format!("affine boundary {{0,1}}, full-space boundary all 101 ({t:.2?})"))
}

fn removed_midpoints(level: u32) -> Vec<f64> {
    let mut cells = vec![(0.0f64, 1.0f64)];
    let mut mids = Vec::new();
    for _ in 0..level {
        let mut next = Vec::new();
        for (a, b) in cells {
            let w = (b - a) / 3.0;
            mids.push((a + b) / 2.0);
            next.push((a, a + w));
            next.push((b - w, b));
        }
        cells = next;
    }
    mids
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut sizes = Vec::new();
    for level in 1..=3 {
        let sys = gen_cantor(level, 2).unwrap().system;
        let coords = sys.space().coords().unwrap();
        let mids = removed_midpoints(level);
        let expected = PointSet::new(
            (0..sys.n()).filter(|&j| !mids.iter().any(|m| (coords[j][0] - m).abs() < 1e-12)).collect(),
        );
        ensure!(expected.len() + mids.len() == sys.n(), "level {level}: midpoints not all on the grid");
        let b = ok(choquet_boundary(&sys))?.boundary();
        ensure!(b == expected, "level {level}: boundary {b:?}, expected {expected:?}");
        sizes.push(format!("L{level}: {}/{}", b.len(), sys.n()));
    }
    let t = within(start, 5)?;
    Ok(format!("grid minus removed midpoints [{}] ({t:.2?})", sizes.join(", ")))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let inst = gen_disk(64, 4, 8).unwrap();
    let sys = &inst.system;
    let report = ok(choquet_boundary(sys))?;
    let b = report.boundary();
    ensure!(b == PointSet::new((0..64).collect()), "disk boundary has {} points, circle has 64", b.len());

    let coords = sys.space().coords().unwrap();
    let radius = |j: usize| coords[j][0].hypot(coords[j][1]);
    let center = sys.space().index_of("o").ok_or("no center point")?;
    let annulus = PointSet::new((0..sys.n()).filter(|&j| radius(j) >= 0.6 - 1e-12).collect());
    let ring = (0..sys.n()).filter(|&j| (radius(j) - 0.6).abs() < 1e-12).count();
    ensure!(ring > 16, "ring at radius 0.6 has {ring} samples, need more than 16");
    let sep = ok(separate(sys, &annulus, center))?;
    ensure!(!sep.separable, "center separated from annulus with margin {}", sep.margin);

    let neg_sq: Vec<f64> = (0..sys.n()).map(|j| -radius(j).powi(2)).collect();
    let f = ScalarField::new(neg_sq.clone()).unwrap();
    let g8 = ok(biconjugate(sys, &f))?;
    ensure!(g8.get(center) <= -0.9, "f^××(center) = {}", g8.get(center));

    let mut prev: Option<ScalarField> = None;
    for degree in [4, 6, 8] {
        let s = gen_disk(64, 4, degree).unwrap().system;
        let g = ok(biconjugate(&s, &ScalarField::new(neg_sq.clone()).unwrap()))?;
        if let Some(p) = &prev {
            let worst = (0..s.n()).map(|j| p.get(j) - g.get(j)).fold(f64::NEG_INFINITY, f64::max);
            ensure!(worst <= 1e-9, "f^×× decreases by {worst:.3e} at degree {degree}");
        }
        prev = Some(g);
    }
    let t = within(start, 60)?;
    Ok(format!(
        "64/64 circle boundary, annulus separation infeasible, f^××(0) = {:.4}, monotone in degree ({t:.2?})",
        g8.get(center)
    ))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let sys = random_system(&mut rng, 12, 4);
        let f = random_field(&mut rng, sys.n());
        let g = ok(biconjugate(&sys, &f))?;
        for x in 0..sys.n() {
            let lo = ok(key_interval(&sys, &f, x))?.lo;
            worst = worst.max((g.get(x) - lo).abs());
        }
    }
    ensure!(worst <= 1e-7, "max |f^×× − lo| = {worst:.3e}");
    Ok(format!("200 systems, max |f^×× − key lo| = {worst:.1e}"))
}

fn criterion_6() -> Check {
    let mut points = 0;
    let mut systems: Vec<(String, FunctionSystem)> = fixtures().into_iter().map(|(name, g)| (name, g.system)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for k in 0..100 {
        systems.push((format!("random #{k}"), random_system(&mut rng, 12, 4)));
    }
    for (name, sys) in &systems {
        let r = choquet_boundary(sys).map_err(|e| format!("{name}: {e}"))?;
        ensure!(r.agrees(), "{name}: tests disagree");
        points += r.points.len();
    }
    Ok(format!("{points} points over {} systems, 100% agreement", systems.len()))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    let mut specs = 0;
    while specs < 500 {
        let sys = random_system(&mut rng, 12, 4);
        let boundary = ok(choquet_boundary(&sys))?.boundary();
        for _ in 0..10 {
            let spec = random_spec(&mut rng, sys.d(), 5);
            let r = ok(bauer_verify_with_boundary(&sys, &spec, &boundary))?;
            if !r.bauer_ok || (r.max_value - r.boundary_max).abs() > 1e-9 {
                violations += 1;
            }
            specs += 1;
        }
    }
    ensure!(violations == 0, "{violations} Bauer violations in {specs} specs");

    let mut found = 0;
    for _ in 0..200 {
        let sys = random_system(&mut rng, 12, 4);
        let boundary = ok(choquet_boundary(&sys))?.boundary();
        let x = boundary.indices()[rng.random_range(0..boundary.len())];
        let size = rng.random_range(2..=5);
        let mut family = Vec::with_capacity(size);
        for _ in 0..size {
            let mut spec = random_spec(&mut rng, sys.d(), 4);
            ok(plant_maximizer(&sys, &mut spec, x, &mut rng))?;
            family.push(spec);
        }
        let r = ok(multi_max_verify_with_boundary(&sys, &family, &boundary))?;
        if r.verdict == MultiMaxVerdict::Verified && r.common_boundary_argmax.contains(x) {
            found += 1;
        }
    }
    ensure!(found == 200, "common boundary maximizer found in {found}/200 families");
    Ok(format!("{specs} specs, 0 violations; 200/200 planted families verified"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    for (name, inst) in fixtures() {
        let sys = &inst.system;
        let n = sys.n();
        let fields = [random_field(&mut rng, n), ScalarField::new((0..n).map(|j| (j as f64 * 0.37).sin()).collect()).unwrap()];
        for f in &fields {
            let g = ok(biconjugate(sys, f))?;
            let hp = ok(hat_positive(sys, f))?;
            let hs = ok(hat_signed(sys, f, 1.0))?;
            for x in 0..n {
                ensure!(hs.get(x) <= hp.get(x) + 1e-9, "{name}: hat_signed > hat_positive at {x}");
                ensure!((hp.get(x) - g.get(x)).abs() <= 1e-7, "{name}: hat_positive ≠ f^×× at {x}");
                ensure!(g.get(x) <= f.get(x) + 1e-9, "{name}: f^×× > f at {x}");
            }
            let gg = ok(biconjugate(sys, &g))?;
            ensure!(gg.sup_distance(&g) <= 1e-9, "{name}: idempotence off by {:.3e}", gg.sup_distance(&g));
            checked += 1;
        }
        for _ in 0..2 {
            let h = ok(realize_convex_trace(sys, &random_spec(&mut rng, sys.d(), 4)))?;
            let gap = ok(biconjugate(sys, &h))?.sup_distance(&h);
            ensure!(gap <= 1e-9, "{name}: realized convex-trace field has gap {gap:.3e}");
            checked += 1;
        }
    }
    Ok(format!("{checked} fields on all fixtures: order, equality on convex-trace fields, idempotence"))
}

fn criterion_9() -> Check {
    for (name, inst) in fixtures() {
        let full = PointSet::full(inst.system.n());
        let phi = ok(phi_extreme_points(&inst.system, &full))?;
        let kf = ok(kyfan_extreme_points(&inst.system, &full))?;
        ensure!(phi.is_subset(&kf), "{name}: Φ-extreme points not all Ky Fan extreme");
    }
    let disk = gen_disk(64, 4, 8).unwrap().system;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let y = rng.random_range(0..disk.n());
        let z = loop {
            let z = rng.random_range(0..disk.n());
            if z != y {
                break z;
            }
        };
        let seg = ok(kyfan_segment(&disk, y, z))?;
        ensure!(seg == PointSet::new(vec![y, z]), "disk segment [{y},{z}] = {seg:?}");
    }
    let nat = gen_naturals(4).unwrap().system;
    let seg = ok(kyfan_segment(&nat, 0, 3))?;
    ensure!(seg == PointSet::full(4), "[1,4] = {seg:?}");
    Ok("Φ-extreme ⊆ Ky Fan extreme on all fixtures, 50 trivial disk segments, [1,4] = {1,2,3,4}".into())
}

fn criterion_10() -> Check {
    let start = Instant::now();
    let sys = gen_naturals(4).unwrap().system;
    let cfg = GenericityConfig { trials: 1000, epsilon: 0.1, seed: 10, tie_tol: 1e-9 };
    let r = ok(genericity_experiment(&sys, &ScalarField::constant(4, 0.0), &cfg))?;
    ensure!(r.unique_fraction >= 0.99, "unique fraction {}", r.unique_fraction);
    let t = within(start, 10)?;
    Ok(format!("unique fraction {:.3} over 1000 trials ({t:.2?})", r.unique_fraction))
}

fn seeded_reports() -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let inst = ok(gen_random(10, 4, 11))?;
    out.push(ok(InstanceFile::from_generated(&inst).to_json())?);
    out.push(ok(serde_json::to_string(&ok(choquet_boundary(&inst.system))?))?);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let spec = random_spec(&mut rng, inst.system.d(), 4);
    let boundary = inst.expected_boundary.clone();
    out.push(ok(serde_json::to_string(&ok(bauer_verify_with_boundary(&inst.system, &spec, &boundary))?))?);
    out.push(ok(serde_json::to_string(&ok(biconjugate(&inst.system, &random_field(&mut rng, 10)))?))?);
    let nat = gen_naturals(4).unwrap().system;
    let cfg = GenericityConfig { trials: 200, epsilon: 0.1, seed: 11, tie_tol: 1e-9 };
    out.push(ok(serde_json::to_string(&ok(genericity_experiment(&nat, &ScalarField::constant(4, 0.0), &cfg))?))?);
    Ok(out)
}

fn criterion_11() -> Check {
    let pool = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let first = seeded_reports()?;
    let second = seeded_reports()?;
    let single = pool(1).install(seeded_reports)?;
    let many = pool(4).install(seeded_reports)?;
    ensure!(first == second, "repeated runs differ");
    ensure!(first == single && first == many, "reports depend on the thread count");
    Ok(format!("{} seeded reports byte-identical across runs and thread counts", first.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("naturals fixture", criterion_1),
        ("interval fixtures", criterion_2),
        ("cantor fixtures", criterion_3),
        ("disk fixture", criterion_4),
        ("duality suite", criterion_5),
        ("boundary-test agreement", criterion_6),
        ("Bauer and multi-max suites", criterion_7),
        ("convexification order", criterion_8),
        ("Ky Fan suite", criterion_9),
        ("genericity experiment", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
