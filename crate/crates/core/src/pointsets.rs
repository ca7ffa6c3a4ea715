//! Node sets on the sphere and their geometry: mesh norm, separation radius, mesh ratio.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Result, SpdoError};
use crate::spectral::dot;

/// Default icosphere subdivision level for mesh-norm estimation (40962 vertices).
pub const DEFAULT_MESH_REFINEMENT: usize = 6;
/// Points closer than this (radians) are considered duplicates.
pub const DUPLICATE_DISTANCE: f64 = 1e-10;
/// Rows whose norm is within this of 1 are normalized on load.
pub const LOAD_UNIT_SLACK: f64 = 1e-6;

fn geodesic(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / r, v[1] / r, v[2] / r]
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Mesh-norm estimate: `value <= h_X <= value + error_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshNormEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// `N` distinct unit vectors on `S^{n-1}`, stored row-major.
#[derive(Debug, Clone)]
pub struct PointSet {
    n: usize,
    coords: Vec<f64>,
    q_x: f64,
    h_x: Option<MeshNormEstimate>,
}

impl PointSet {
    /// Builds a point set from unit vectors; mesh norm is computed for `n = 3`.
    pub fn new(n: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_refinement(n, points, DEFAULT_MESH_REFINEMENT)
    }

    pub fn with_refinement(n: usize, points: Vec<Vec<f64>>, refinement: usize) -> Result<Self> {
        if n < 3 {
            return Err(SpdoError::UnsupportedDimension(n));
        }
        if points.is_empty() {
            return Err(SpdoError::TooFewPoints { needed: 1, got: 0 });
        }
        let mut coords = Vec::with_capacity(n * points.len());
        for p in &points {
            if p.len() != n {
                return Err(SpdoError::DimensionMismatch(format!(
                    "point with {} components on S^{}",
                    p.len(),
                    n - 1
                )));
            }
            let norm = dot(p, p).sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(SpdoError::NotUnitVector(norm));
            }
            coords.extend_from_slice(p);
        }
        let mut set = Self {
            n,
            coords,
            q_x: f64::INFINITY,
            h_x: None,
        };
        if let Some((i, j)) = set.closest_pair_below(DUPLICATE_DISTANCE) {
            return Err(SpdoError::DuplicatePoints {
                first: i + 1,
                second: j + 1,
            });
        }
        set.q_x = separation_radius(&set);
        if n == 3 {
            set.h_x = Some(mesh_norm(&set, refinement));
        }
        Ok(set)
    }

    fn closest_pair_below(&self, threshold: f64) -> Option<(usize, usize)> {
        for i in 0..self.len() {
            for j in 0..i {
                if geodesic(self.point(i), self.point(j)) < threshold {
                    return Some((j, i));
                }
            }
        }
        None
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.n)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(|p| p.to_vec()).collect()
    }

    /// Separation radius `q_X` (infinite for a single point).
    pub fn q_x(&self) -> f64 {
        self.q_x
    }

    /// Mesh norm `h_X` (lower estimate; see [`MeshNormEstimate`]). `n = 3` only.
    pub fn h_x(&self) -> Option<f64> {
        self.h_x.map(|h| h.value)
    }

    pub fn mesh_norm_estimate(&self) -> Option<MeshNormEstimate> {
        self.h_x
    }

    /// Mesh ratio `rho_X = h_X / q_X`.
    pub fn rho_x(&self) -> Option<f64> {
        self.h_x().map(|h| h / self.q_x)
    }

    /// Gram of dot products `x_i . x_j`.
    pub fn dot(&self, i: usize, j: usize) -> f64 {
        dot(self.point(i), self.point(j)).clamp(-1.0, 1.0)
    }

    /// The same points in a different order.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len()
            || perm
                .iter()
                .any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true))
        {
            return Err(SpdoError::DimensionMismatch("not a permutation".into()));
        }
        Ok(Self {
            n: self.n,
            coords: perm.iter().flat_map(|&i| self.point(i).to_vec()).collect(),
            q_x: self.q_x,
            h_x: self.h_x,
        })
    }
}

/// Spherical Fibonacci lattice with `N >= 2` points on `S^2`.
pub fn fibonacci_points(count: usize) -> Result<PointSet> {
    PointSet::new(3, fibonacci_vectors(count)?)
}

fn fibonacci_vectors(count: usize) -> Result<Vec<Vec<f64>>> {
    if count < 2 {
        return Err(SpdoError::TooFewPoints { needed: 2, got: count });
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    Ok((0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let s = (1.0 - z * z).sqrt();
            let theta = golden * i as f64;
            let p = normalize3([s * theta.cos(), s * theta.sin(), z]);
            p.to_vec()
        })
        .collect())
}

/// Parses whitespace-separated coordinates, one point per line; `#` starts a comment.
pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut lines: Vec<usize> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let row = line
            .split_whitespace()
            .map(|s| {
                s.parse::<f64>().map_err(|e| SpdoError::PointFile {
                    line: lineno,
                    message: format!("`{s}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(SpdoError::PointFile {
                    line: lineno,
                    message: format!("expected {} components, found {}", first.len(), row.len()),
                });
            }
        }
        let norm = dot(&row, &row).sqrt();
        if (norm - 1.0).abs() > LOAD_UNIT_SLACK {
            return Err(SpdoError::PointFile {
                line: lineno,
                message: format!("row has norm {norm}, not a unit vector"),
            });
        }
        rows.push(row.iter().map(|v| v / norm).collect());
        lines.push(lineno);
    }
    let n = rows
        .first()
        .map(|r| r.len())
        .ok_or(SpdoError::TooFewPoints { needed: 1, got: 0 })?;
    for i in 0..rows.len() {
        for j in 0..i {
            if geodesic(&rows[i], &rows[j]) < DUPLICATE_DISTANCE {
                return Err(SpdoError::DuplicatePoints {
                    first: lines[j],
                    second: lines[i],
                });
            }
        }
    }
    PointSet::new(n, rows)
}

pub fn load_points(path: impl AsRef<Path>) -> Result<PointSet> {
    parse_points(&std::fs::read_to_string(path)?)
}

/// Writes one point per line.
pub fn format_points(set: &PointSet) -> String {
    set.points()
        .map(|p| p.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

/// `q_X = 1/2 min_{i != j} arccos(x_i . x_j)`, exact pairwise scan.
pub fn separation_radius(set: &PointSet) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..set.len() {
        for j in 0..i {
            best = best.min(geodesic(set.point(i), set.point(j)));
        }
    }
    0.5 * best
}

/// Icosphere vertices at the given subdivision level plus the largest
/// geodesic edge length.
pub fn icosphere(level: usize) -> (Vec<[f64; 3]>, f64) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalize3)
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(normalize3([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let max_edge = faces
        .iter()
        .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
        .map(|(a, b)| geodesic(&verts[a], &verts[b]))
        .fold(0.0, f64::max);
    (verts, max_edge)
}

fn nearest(set: &PointSet, y: &[f64], k: usize) -> Vec<(f64, usize)> {
    let mut d: Vec<(f64, usize)> = set.points().enumerate().map(|(j, x)| (geodesic(x, y), j)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0));
    d.truncate(k);
    d
}

fn min_distance(set: &PointSet, y: &[f64]) -> f64 {
    set.points().map(|x| geodesic(x, y)).fold(f64::INFINITY, f64::min)
}

/// Mesh norm `h_X = sup_y min_j arccos(x_j . y)` on `S^2`.
///
/// Candidates: all icosphere vertices at `refinement`, the antipode of each
/// node, and the spherical circumcentres of the nearest node triples around
/// the best grid candidates (Voronoi vertices, where the supremum is attained).
/// Every candidate yields a valid lower bound; since `y -> min_j d(y, x_j)` is
/// 1-Lipschitz, the grid result is at most one covering radius short of `h_X`.
pub fn mesh_norm(set: &PointSet, refinement: usize) -> MeshNormEstimate {
    assert_eq!(set.n(), 3, "mesh norm is implemented for S^2");
    let (grid, max_edge) = icosphere(refinement);
    let mut scored: Vec<(f64, usize)> = grid
        .iter()
        .enumerate()
        .map(|(i, y)| (min_distance(set, y), i))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].0;

    for x in set.points() {
        let anti = [-x[0], -x[1], -x[2]];
        best = best.max(min_distance(set, &anti));
    }

    let polish = scored.len().min(64);
    for &(_, gi) in &scored[..polish] {
        let y = grid[gi];
        let near = nearest(set, &y, 4);
        if near.len() < 3 {
            if near.len() == 2 {
                // Pole of the great circle through both nodes.
                let (a, b) = (set.point(near[0].1), set.point(near[1].1));
                let c = cross(a, b);
                if dot(&c, &c) > 0.0 {
                    let p = normalize3(c);
                    best = best.max(min_distance(set, &p));
                }
            }
            continue;
        }
        for combo in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            let Some(&(_, ia)) = near.get(combo[0]) else { continue };
            let Some(&(_, ib)) = near.get(combo[1]) else { continue };
            let Some(&(_, ic)) = near.get(combo[2]) else { continue };
            let (a, b, c) = (set.point(ia), set.point(ib), set.point(ic));
            let ab = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let ac = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let normal = cross(&ab, &ac);
            if dot(&normal, &normal) < 1e-30 {
                continue;
            }
            let centre = normalize3(normal);
            for sign in [1.0, -1.0] {
                let p = [sign * centre[0], sign * centre[1], sign * centre[2]];
                best = best.max(min_distance(set, &p));
            }
        }
    }
    MeshNormEstimate {
        value: best,
        error_bound: max_edge,
    }
}
