//! Instance generators: the interval with affine or full function spaces, a
//! Cantor-type subspace, harmonic polynomials on a disk grid, the naturals
//! with `span{1, 1/k}`, and seeded random systems.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::measures::choquet_boundary;
use crate::sets::PointSet;
use crate::space::{FiniteSpace, FunctionSystem};
use crate::{Error, Result};

/// Largest disk-interior radius.
pub const DISK_INTERIOR_RADIUS: f64 = 0.8;
/// Interior ring `k` carries `DISK_RING_POINTS * k` equispaced points.
pub const DISK_RING_POINTS: usize = 6;
const MAX_CANTOR_LEVEL: u32 = 8;
const RANDOM_RESAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceNotes {
    pub generator: String,
    pub params: Value,
    pub remarks: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub system: FunctionSystem,
    pub expected_boundary: PointSet,
    pub notes: InstanceNotes,
}

fn finish(system: FunctionSystem, expected: Vec<usize>, generator: &str, params: Value, remarks: Vec<String>) -> Result<GeneratedInstance> {
    system.ensure_valid()?;
    Ok(GeneratedInstance {
        system,
        expected_boundary: PointSet::new(expected),
        notes: InstanceNotes { generator: generator.into(), params, remarks },
    })
}

fn grid(n_grid: usize) -> Result<Vec<f64>> {
    if n_grid < 2 {
        return Err(Error::InvalidInput(format!("interval grid needs at least 2 points, got {n_grid}")));
    }
    Ok((0..n_grid).map(|j| j as f64 / (n_grid - 1) as f64).collect())
}

fn grid_space(t: &[f64]) -> Result<FiniteSpace> {
    FiniteSpace::new(t.iter().map(|v| v.to_string()).collect())?.with_coords(t.iter().map(|&v| [v, 0.0]).collect())
}

/// `[0, 1]` sampled at `n_grid` equispaced points, `Φ = span{1, t}`.
pub fn gen_interval_affine(n_grid: usize) -> Result<GeneratedInstance> {
    let t = grid(n_grid)?;
    let system = FunctionSystem::new(grid_space(&t)?, vec![vec![1.0; n_grid], t])?;
    finish(
        system,
        vec![0, n_grid - 1],
        "interval-affine",
        json!({ "n_grid": n_grid }),
        vec!["affine functions on a grid; boundary is the two endpoints".into()],
    )
}

/// `[0, 1]` sampled at `n_grid` points with every function allowed (identity basis).
pub fn gen_interval_full(n_grid: usize) -> Result<GeneratedInstance> {
    let t = grid(n_grid)?;
    let rows = (0..n_grid)
        .map(|i| (0..n_grid).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let system = FunctionSystem::new(grid_space(&t)?, rows)?;
    finish(
        system,
        (0..n_grid).collect(),
        "interval-full",
        json!({ "n_grid": n_grid }),
        vec!["all functions on the grid; every point is a boundary point".into()],
    )
}

fn fraction_label(num: u64, den: u64) -> String {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(num, den).max(1);
    match (num / g, den / g) {
        (0, _) => "0".into(),
        (p, 1) => p.to_string(),
        (p, q) => format!("{p}/{q}"),
    }
}

/// Cantor-type surrogate: level-`level` cells each sampled at
/// `points_per_cell` points (endpoints included), plus the midpoint of every
/// removed interval. The basis is the piecewise-linear hat functions on the
/// cell samples, so every function is affine across each removed interval.
pub fn gen_cantor(level: u32, points_per_cell: usize) -> Result<GeneratedInstance> {
    if !(1..=MAX_CANTOR_LEVEL).contains(&level) {
        return Err(Error::InvalidInput(format!("cantor level must be in 1..={MAX_CANTOR_LEVEL}, got {level}")));
    }
    if points_per_cell < 2 {
        return Err(Error::InvalidInput("each cantor cell needs at least its two endpoints".into()));
    }
    let width = 3u64.pow(level);
    let step = 2 * (points_per_cell as u64 - 1);
    // positions in units of 1 / (width * step)
    let den = width * step;

    // (lo, hi) in units of 1 / width
    let mut cells = vec![(0u64, width)];
    let mut midpoints = Vec::new();
    for _ in 0..level {
        let mut next = Vec::with_capacity(cells.len() * 2);
        for (lo, hi) in cells {
            let third = (hi - lo) / 3;
            next.push((lo, lo + third));
            next.push((hi - third, hi));
            midpoints.push((lo + hi) * step / 2);
        }
        cells = next;
    }
    let mut nodes: Vec<u64> = Vec::new();
    for (lo, _) in &cells {
        for i in 0..points_per_cell as u64 {
            nodes.push(lo * step + 2 * i);
        }
    }
    nodes.sort_unstable();
    nodes.dedup();

    let mut points: Vec<(u64, bool)> = nodes.iter().map(|&p| (p, true)).chain(midpoints.iter().map(|&p| (p, false))).collect();
    points.sort_unstable();

    let m = nodes.len();
    let n = points.len();
    let mut rows = vec![vec![0.0; n]; m];
    for (j, &(p, is_node)) in points.iter().enumerate() {
        if is_node {
            let k = nodes.binary_search(&p).expect("node");
            rows[k][j] = 1.0;
        } else {
            let right = nodes.partition_point(|&q| q < p);
            let (a, b) = (nodes[right - 1], nodes[right]);
            let w = (b - p) as f64 / (b - a) as f64;
            rows[right - 1][j] = w;
            rows[right][j] = 1.0 - w;
        }
    }
    let labels = points.iter().map(|&(p, _)| fraction_label(p, den)).collect();
    let coords = points.iter().map(|&(p, _)| [p as f64 / den as f64, 0.0]).collect();
    let space = FiniteSpace::new(labels)?.with_coords(coords)?;
    let system = FunctionSystem::new(space, rows)?;
    let expected = points.iter().enumerate().filter(|(_, &(_, node))| node).map(|(j, _)| j).collect();
    finish(
        system,
        expected,
        "cantor",
        json!({ "level": level, "points_per_cell": points_per_cell }),
        vec![
            format!("finite surrogate of the Cantor set at level {level}"),
            "one sample (the midpoint) inside each removed interval".into(),
        ],
    )
}

/// Disk grid: `n_circle` equispaced unit-circle points, the center, and
/// `n_interior_rings` rings up to radius 0.8. Basis `1, Re zᵏ, Im zᵏ` for
/// `k = 1..=degree`.
pub fn gen_disk(n_circle: usize, n_interior_rings: usize, degree: usize) -> Result<GeneratedInstance> {
    if degree == 0 {
        return Err(Error::InvalidInput("degree 0 leaves only constants, which do not separate points".into()));
    }
    if n_circle < 2 * degree + 2 {
        return Err(Error::InvalidInput(format!(
            "n_circle = {n_circle} aliases degree-{degree} harmonics; need at least {}",
            2 * degree + 2
        )));
    }
    let mut labels = Vec::new();
    let mut polar = Vec::new();
    for j in 0..n_circle {
        labels.push(format!("c{j}"));
        polar.push((1.0, 2.0 * PI * j as f64 / n_circle as f64));
    }
    labels.push("o".into());
    polar.push((0.0, 0.0));
    for k in 1..=n_interior_rings {
        let r = DISK_INTERIOR_RADIUS * k as f64 / n_interior_rings as f64;
        let count = DISK_RING_POINTS * k;
        for i in 0..count {
            labels.push(format!("r{k}_{i}"));
            polar.push((r, 2.0 * PI * (i as f64 + 0.5) / count as f64));
        }
    }
    let n = polar.len();
    let mut rows = vec![vec![1.0; n]];
    for k in 1..=degree {
        let kf = k as f64;
        rows.push(polar.iter().map(|&(r, th)| r.powi(k as i32) * (kf * th).cos()).collect());
        rows.push(polar.iter().map(|&(r, th)| r.powi(k as i32) * (kf * th).sin()).collect());
    }
    let coords = polar.iter().map(|&(r, th)| [r * th.cos(), r * th.sin()]).collect();
    let space = FiniteSpace::new(labels)?.with_coords(coords)?;
    let system = FunctionSystem::new(space, rows)?;
    finish(
        system,
        (0..n_circle).collect(),
        "disk",
        json!({ "n_circle": n_circle, "n_interior_rings": n_interior_rings, "degree": degree }),
        vec![
            format!("harmonic polynomials up to degree {degree} stand in for all harmonic functions"),
            format!("interior ring k has {DISK_RING_POINTS}k points, radii up to {DISK_INTERIOR_RADIUS}"),
        ],
    )
}

/// Points `1..=n` with `Φ = span{1, b}`, `b_k = 1/k`. Point `n` stands in for
/// the point at infinity.
pub fn gen_naturals(n: usize) -> Result<GeneratedInstance> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("naturals truncation needs n >= 2, got {n}")));
    }
    let labels = (1..=n).map(|k| k.to_string()).collect();
    let b = (1..=n).map(|k| 1.0 / k as f64).collect();
    let system = FunctionSystem::new(FiniteSpace::new(labels)?, vec![vec![1.0; n], b])?;
    finish(
        system,
        vec![0, n - 1],
        "naturals",
        json!({ "n": n }),
        vec![
            format!("truncation of the naturals; point {n} plays the role of infinity"),
            "trace-convex sets are exactly the order intervals".into(),
        ],
    )
}

/// A ones row plus `d − 1` rows of seeded uniform values in `[0, 1)`.
pub fn gen_random(n: usize, d: usize, seed: u64) -> Result<GeneratedInstance> {
    if d < 2 || d > n {
        return Err(Error::InvalidInput(format!("random system needs 2 <= d <= n, got d = {d}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_RESAMPLES {
        let mut rows = vec![vec![1.0; n]];
        for _ in 1..d {
            rows.push((0..n).map(|_| rng.random::<f64>()).collect());
        }
        let system = FunctionSystem::new(FiniteSpace::indexed(n)?, rows)?;
        if !system.validate().passed() {
            continue;
        }
        let expected = choquet_boundary(&system)?.boundary();
        return finish(
            system,
            expected.indices().to_vec(),
            "random",
            json!({ "n": n, "d": d, "seed": seed }),
            vec!["expected boundary computed by the boundary LPs themselves".into()],
        );
    }
    Err(Error::InvalidInput(format!("no separating random system after {RANDOM_RESAMPLES} draws")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_shapes() {
        let inst = gen_interval_affine(5).unwrap();
        assert_eq!(inst.expected_boundary.indices(), &[0, 4]);
        assert_eq!(inst.system.space().label(4), "1");
        assert_eq!(gen_interval_affine(2).unwrap().expected_boundary.len(), 2);
        assert!(gen_interval_affine(1).is_err());
    }

    #[test]
    fn cantor_level_one_grid() {
        let inst = gen_cantor(1, 3).unwrap();
        let labels: Vec<&str> = inst.system.space().labels().iter().map(String::as_str).collect();
        assert_eq!(labels, ["0", "1/6", "1/3", "1/2", "2/3", "5/6", "1"]);
        assert_eq!(inst.expected_boundary.indices(), &[0, 1, 2, 4, 5, 6]);
        let mid = inst.system.embed(3).unwrap();
        let left = inst.system.embed(2).unwrap();
        let right = inst.system.embed(4).unwrap();
        for i in 0..mid.len() {
            assert_eq!(mid[i], 0.5 * (left[i] + right[i]));
        }
    }

    #[test]
    fn cantor_level_two_midpoints() {
        let inst = gen_cantor(2, 3).unwrap();
        let sp = inst.system.space();
        let excluded: Vec<&str> = (0..inst.system.n())
            .filter(|&j| !inst.expected_boundary.contains(j))
            .map(|j| sp.label(j))
            .collect();
        assert_eq!(excluded, ["1/6", "1/2", "5/6"]);
        assert!(gen_cantor(0, 3).is_err());
        assert!(gen_cantor(2, 1).is_err());
    }

    #[test]
    fn disk_embedding_and_limits() {
        let inst = gen_disk(64, 4, 8).unwrap();
        assert_eq!(inst.system.d(), 17);
        assert_eq!(inst.system.n(), 64 + 1 + 6 * (1 + 2 + 3 + 4));
        let th = 2.0 * PI * 5.0 / 64.0;
        let col = inst.system.embed(5).unwrap();
        let expect = [1.0, th.cos(), th.sin(), (2.0 * th).cos(), (2.0 * th).sin()];
        for (a, b) in col.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(gen_disk(64, 4, 0).is_err());
        assert!(gen_disk(17, 2, 8).is_err());
        assert!(gen_disk(18, 2, 8).is_ok());
    }

    #[test]
    fn naturals_embedding() {
        let inst = gen_naturals(4).unwrap();
        assert_eq!(inst.system.embed(1).unwrap(), vec![1.0, 0.5]);
        assert_eq!(inst.expected_boundary.indices(), &[0, 3]);
        assert!(gen_naturals(1).is_err());
    }

    #[test]
    fn random_is_reproducible() {
        let a = gen_random(6, 3, 1).unwrap();
        let b = gen_random(6, 3, 1).unwrap();
        assert_eq!(a.system, b.system);
        assert!(a.system.validate().passed());
        let full = gen_random(5, 5, 9).unwrap();
        assert_eq!(full.expected_boundary.len(), 5);
        assert!(gen_random(3, 4, 0).is_err());
    }
}
