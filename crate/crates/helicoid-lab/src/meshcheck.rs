//! Triangle-mesh topology, symmetry, and level-set structure checks.
//!
//! Meshes carry an optional per-vertex branch angle `theta` (a continuous
//! branch, so adjacent vertices may not jump by `pi` or more). The leaf
//! functional `F = theta - z` is what the structure checks revolve around:
//! its range, and the arrangement of its level sets, encode how a surface
//! meets the family of rotated half-helicoids.

use crate::geometry::{apply_screw, Point3, ScrewMotion, Vec3};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    theta: Option<Vec<f64>>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(Error::invalid(
                        "triangles",
                        format!("triangle {t} references vertex {v} of {}", vertices.len()),
                    ));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::invalid("triangles", format!("triangle {t} repeats a vertex")));
            }
        }
        Ok(TriMesh {
            vertices,
            triangles,
            theta: None,
        })
    }

    /// Attach a per-vertex branch angle; rejects fields that jump by `pi`
    /// or more across an edge, since those cannot be a continuous branch.
    pub fn with_theta(mut self, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != self.vertices.len() {
            return Err(Error::invalid(
                "theta",
                format!("expected {} values, got {}", self.vertices.len(), theta.len()),
            ));
        }
        for tri in &self.triangles {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let jump = (theta[a] - theta[b]).abs();
                if jump >= std::f64::consts::PI {
                    return Err(Error::ThetaJump { v0: a, v1: b, jump });
                }
            }
        }
        self.theta = Some(theta);
        Ok(self)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn theta(&self) -> Option<&[f64]> {
        self.theta.as_deref()
    }

    pub fn median_edge_length(&self) -> f64 {
        let mut lengths: Vec<f64> = Vec::with_capacity(self.triangles.len() * 3);
        for tri in &self.triangles {
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                lengths.push((self.vertices[a] - self.vertices[b]).norm());
            }
        }
        if lengths.is_empty() {
            return 0.0;
        }
        lengths.sort_by(f64::total_cmp);
        lengths[lengths.len() / 2]
    }

    pub fn diameter(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(&v.coords);
            hi = hi.sup(&v.coords);
        }
        (hi - lo).norm()
    }

    /// Disconnected union; theta fields merge when both sides carry one.
    pub fn merge(mut self, other: TriMesh) -> TriMesh {
        let offset = self.vertices.len();
        self.vertices.extend(other.vertices);
        self.triangles
            .extend(other.triangles.iter().map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]));
        self.theta = match (self.theta.take(), other.theta) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            _ => None,
        };
        self
    }

    // -- OBJ ----------------------------------------------------------------

    /// OBJ export: `v` lines at 9 significant digits, 1-based `f` lines.
    pub fn to_obj_string(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {:.8e} {:.8e} {:.8e}", v.x, v.y, v.z);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        out
    }

    /// OBJ import: `v` and `f` records (polygons are fan-triangulated,
    /// `a/b/c` index forms and negative indices are accepted); all other
    /// record types are ignored.
    pub fn from_obj_str(text: &str) -> Result<Self> {
        let mut vertices: Vec<Point3> = Vec::new();
        let mut triangles: Vec<[usize; 3]> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tok = line.split_whitespace();
            match tok.next() {
                Some("v") => {
                    let mut xyz = [0.0f64; 3];
                    for slot in &mut xyz {
                        let t = tok.next().ok_or_else(|| Error::Parse {
                            line: k + 1,
                            reason: "vertex needs three coordinates".into(),
                        })?;
                        *slot = t.parse().map_err(|_| Error::Parse {
                            line: k + 1,
                            reason: format!("bad coordinate `{t}`"),
                        })?;
                        if !slot.is_finite() {
                            return Err(Error::Parse {
                                line: k + 1,
                                reason: "non-finite coordinate".into(),
                            });
                        }
                    }
                    vertices.push(Point3::new(xyz[0], xyz[1], xyz[2]));
                }
                Some("f") => {
                    let mut idx: Vec<usize> = Vec::new();
                    for t in tok {
                        let first = t.split('/').next().unwrap_or("");
                        let raw_ix: i64 = first.parse().map_err(|_| Error::Parse {
                            line: k + 1,
                            reason: format!("bad face index `{t}`"),
                        })?;
                        let resolved = if raw_ix > 0 {
                            (raw_ix - 1) as usize
                        } else if raw_ix < 0 && (-raw_ix) as usize <= vertices.len() {
                            vertices.len() - (-raw_ix) as usize
                        } else {
                            return Err(Error::Parse {
                                line: k + 1,
                                reason: format!("face index {raw_ix} out of range"),
                            });
                        };
                        if resolved >= vertices.len() {
                            return Err(Error::Parse {
                                line: k + 1,
                                reason: format!("face references vertex {} of {}", resolved + 1, vertices.len()),
                            });
                        }
                        idx.push(resolved);
                    }
                    if idx.len() < 3 {
                        return Err(Error::Parse {
                            line: k + 1,
                            reason: "face needs at least three vertices".into(),
                        });
                    }
                    for i in 1..idx.len() - 1 {
                        let tri = [idx[0], idx[i], idx[i + 1]];
                        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                            return Err(Error::Parse {
                                line: k + 1,
                                reason: "degenerate face (repeated vertex)".into(),
                            });
                        }
                        triangles.push(tri);
                    }
                }
                _ => {}
            }
        }
        TriMesh::new(vertices, triangles)
    }

    pub fn write_obj(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_obj_string())?;
        Ok(())
    }

    pub fn read_obj(path: &std::path::Path) -> Result<Self> {
        TriMesh::from_obj_str(&std::fs::read_to_string(path)?)
    }
}

/// Sidecar CSV (`index,theta`) carrying a branch-angle field keyed by
/// vertex index. Every vertex must get exactly one value.
pub fn parse_theta_csv(text: &str, vertex_count: usize) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r').trim() == "index,theta" => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                reason: format!("expected header `index,theta`, got `{}`", h.trim()),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                reason: "empty input".into(),
            })
        }
    }
    let mut theta = vec![f64::NAN; vertex_count];
    let mut seen = vec![false; vertex_count];
    for (k, raw) in lines {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let ix_tok = parts.next().unwrap_or("").trim();
        let th_tok = parts.next().unwrap_or("").trim();
        if parts.next().is_some() {
            return Err(Error::Parse {
                line: k + 1,
                reason: "too many columns".into(),
            });
        }
        let ix: usize = ix_tok.parse().map_err(|_| Error::Parse {
            line: k + 1,
            reason: format!("bad vertex index `{ix_tok}`"),
        })?;
        let th: f64 = th_tok.parse().map_err(|_| Error::Parse {
            line: k + 1,
            reason: format!("bad angle `{th_tok}`"),
        })?;
        if ix >= vertex_count {
            return Err(Error::Parse {
                line: k + 1,
                reason: format!("vertex index {ix} out of range ({vertex_count} vertices)"),
            });
        }
        if seen[ix] {
            return Err(Error::Parse {
                line: k + 1,
                reason: format!("duplicate entry for vertex {ix}"),
            });
        }
        if !th.is_finite() {
            return Err(Error::Parse {
                line: k + 1,
                reason: "non-finite angle".into(),
            });
        }
        seen[ix] = true;
        theta[ix] = th;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Parse {
            line: 0,
            reason: format!("vertex {missing} has no angle entry"),
        });
    }
    Ok(theta)
}

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TopologyReport {
    pub chi: i64,
    pub boundary_loops: usize,
    /// Present for closed surfaces only: `(2 - chi) / 2`.
    pub genus: Option<i64>,
}

/// Euler characteristic `V - E + F` (over referenced vertices), boundary
/// loop count by half-edge traversal, and the genus when the mesh is
/// closed. Rejects non-manifold and inconsistently oriented meshes.
pub fn euler_genus(mesh: &TriMesh) -> Result<TopologyReport> {
    let mut undirected: HashMap<(usize, usize), usize> = HashMap::new();
    let mut referenced = vec![false; mesh.vertices.len()];
    for tri in &mesh.triangles {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            referenced[a] = true;
            let key = (a.min(b), a.max(b));
            let u = undirected.entry(key).or_insert(0);
            *u += 1;
            if *u > 2 {
                return Err(Error::NonManifoldEdge(key.0, key.1));
            }
        }
    }
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for tri in &mesh.triangles {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            let d = directed.entry((a, b)).or_insert(0);
            *d += 1;
            if *d > 1 {
                return Err(Error::InconsistentOrientation(a, b));
            }
        }
    }
    let v = referenced.iter().filter(|&&r| r).count() as i64;
    let e = undirected.len() as i64;
    let f = mesh.triangles.len() as i64;
    let chi = v - e + f;

    // boundary half-edges: directed edges with no opposite
    let mut next_boundary: HashMap<usize, usize> = HashMap::new();
    for &(a, b) in directed.keys() {
        if !directed.contains_key(&(b, a)) {
            if next_boundary.insert(a, b).is_some() {
                return Err(Error::invalid(
                    "mesh",
                    format!("boundary is not a 1-manifold at vertex {a}"),
                ));
            }
        }
    }
    let mut loops = 0usize;
    let mut visited: HashMap<usize, bool> = HashMap::new();
    for &start in next_boundary.keys() {
        if visited.get(&start).copied().unwrap_or(false) {
            continue;
        }
        loops += 1;
        let mut cur = start;
        loop {
            visited.insert(cur, true);
            cur = *next_boundary.get(&cur).ok_or_else(|| {
                Error::invalid("mesh", format!("open boundary chain at vertex {cur}"))
            })?;
            if cur == start {
                break;
            }
        }
    }

    Ok(TopologyReport {
        chi,
        boundary_loops: loops,
        genus: if loops == 0 { Some((2 - chi) / 2) } else { None },
    })
}

// ---------------------------------------------------------------------------
// F = theta - z: range and level sets
// ---------------------------------------------------------------------------

/// Range of `F = theta - z` over the vertices.
///
/// On the helicoid multigraph itself the range degenerates to `[0, 0]`.
/// For a surface component that stays between two rotations of a
/// half-helicoid, the range sits inside `[0, pi]`: each value of `F`
/// labels the rotated leaf the surface is crossing, and `0` and `pi` are
/// the two halves of the reference helicoid. On approximate meshes the
/// inclusion holds up to discretization error; how much slack to accept
/// is the report consumer's call.
pub fn f_range(mesh: &TriMesh) -> Result<(f64, f64)> {
    let theta = mesh.theta().ok_or(Error::MissingThetaField)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (v, &th) in mesh.vertices.iter().zip(theta) {
        let f = th - v.z;
        lo = lo.min(f);
        hi = hi.max(f);
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointClass {
    /// Within the axis collar, above the origin.
    ZPlus,
    /// Within the axis collar, below the origin.
    ZMinus,
    /// On the mesh boundary away from the axis.
    Boundary,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelComponent {
    pub points: Vec<[f64; 3]>,
    pub closed: bool,
    /// Endpoint classes for open arcs, in traversal order.
    pub endpoints: Option<(EndpointClass, EndpointClass)>,
}

/// Extract the level set `{F = alpha}` of `F = theta - z` by marching
/// triangles; see [`scalar_level_set`] for the component classification.
pub fn level_set(mesh: &TriMesh, alpha: f64) -> Result<Vec<LevelComponent>> {
    let theta = mesh.theta().ok_or(Error::MissingThetaField)?;
    let field: Vec<f64> = mesh
        .vertices
        .iter()
        .zip(theta)
        .map(|(v, &th)| th - v.z)
        .collect();
    scalar_level_set(mesh, &field, alpha)
}

/// Extract the level set `{field = alpha}` of a per-vertex scalar by
/// marching triangles, and classify each component: a closed interior
/// loop, or an arc whose endpoints land on the axis collar
/// (`r < 2 x median edge`) above or below the origin, or elsewhere on the
/// mesh boundary.
pub fn scalar_level_set(mesh: &TriMesh, field: &[f64], alpha: f64) -> Result<Vec<LevelComponent>> {
    if field.len() != mesh.vertices.len() {
        return Err(Error::invalid(
            "field",
            format!("expected {} vertex values, got {}", mesh.vertices.len(), field.len()),
        ));
    }
    let g: Vec<f64> = field.iter().map(|&v| v - alpha).collect();
    // sign convention: exact zeros count as positive, so every triangle has
    // 0 or 2 crossing edges
    let positive = |v: usize| g[v] >= 0.0;

    let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
    for tri in &mesh.triangles {
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            *edge_use.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }

    let crossing_point = |a: usize, b: usize| -> Point3 {
        let t = g[a] / (g[a] - g[b]);
        let pa = mesh.vertices[a];
        let pb = mesh.vertices[b];
        Point3::from(pa.coords * (1.0 - t) + pb.coords * t)
    };

    // segment graph: crossed edge -> neighbouring crossed edges
    let mut links: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for tri in &mesh.triangles {
        let mut crossed: Vec<(usize, usize)> = Vec::new();
        for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            if positive(a) != positive(b) {
                crossed.push((a.min(b), a.max(b)));
            }
        }
        if crossed.len() == 2 {
            links.entry(crossed[0]).or_default().push(crossed[1]);
            links.entry(crossed[1]).or_default().push(crossed[0]);
        }
    }

    let delta = 2.0 * mesh.median_edge_length();
    let classify = |p: &Point3| -> EndpointClass {
        let r = (p.x * p.x + p.y * p.y).sqrt();
        if r < delta {
            if p.z >= 0.0 {
                EndpointClass::ZPlus
            } else {
                EndpointClass::ZMinus
            }
        } else {
            EndpointClass::Boundary
        }
    };

    let mut visited: HashMap<(usize, usize), bool> = HashMap::new();
    let mut components = Vec::new();
    // open chains start at crossed boundary edges (one incident triangle)
    let mut starts: Vec<(usize, usize)> = links
        .keys()
        .filter(|e| edge_use.get(e).copied().unwrap_or(0) == 1)
        .copied()
        .collect();
    starts.sort_unstable();
    let mut all_edges: Vec<(usize, usize)> = links.keys().copied().collect();
    all_edges.sort_unstable();

    let walk = |start: (usize, usize),
                    visited: &mut HashMap<(usize, usize), bool>|
     -> (Vec<(usize, usize)>, bool) {
        let mut chain = vec![start];
        visited.insert(start, true);
        let mut current = start;
        let closed = loop {
            let next = links[&current]
                .iter()
                .find(|e| !visited.get(*e).copied().unwrap_or(false))
                .copied();
            match next {
                Some(e) => {
                    visited.insert(e, true);
                    chain.push(e);
                    current = e;
                }
                // either an open end or back at a neighbour of the start
                None => break links[&current].contains(&start) && chain.len() > 2,
            }
        };
        (chain, closed)
    };

    for start in starts.into_iter().chain(all_edges) {
        if visited.get(&start).copied().unwrap_or(false) {
            continue;
        }
        let (chain, closed) = walk(start, &mut visited);
        let points: Vec<[f64; 3]> = chain
            .iter()
            .map(|&(a, b)| {
                let p = crossing_point(a, b);
                [p.x, p.y, p.z]
            })
            .collect();
        let endpoints = if closed {
            None
        } else {
            let first = Point3::new(points[0][0], points[0][1], points[0][2]);
            let last = {
                let p = points.last().expect("nonempty chain");
                Point3::new(p[0], p[1], p[2])
            };
            Some((classify(&first), classify(&last)))
        };
        components.push(LevelComponent {
            points,
            closed,
            endpoints,
        });
    }
    Ok(components)
}

// ---------------------------------------------------------------------------
// Symmetry
// ---------------------------------------------------------------------------

/// The involutions and screw-compositions used in the structure checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryOp {
    /// Rotation by pi about the x-axis: `(x, -y, -z)`.
    RhoX,
    /// Rotation by pi about the y-axis: `(-x, y, -z)`.
    RhoY,
    /// Rotation by pi about the z-axis: `(-x, -y, z)`.
    RhoZ,
    /// Screw by (angle h, lift h) composed with the rotation about X.
    ScrewRhoX { h: f64 },
}

impl SymmetryOp {
    pub fn apply(&self, p: &Point3) -> Point3 {
        match *self {
            SymmetryOp::RhoX => Point3::new(p.x, -p.y, -p.z),
            SymmetryOp::RhoY => Point3::new(-p.x, p.y, -p.z),
            SymmetryOp::RhoZ => Point3::new(-p.x, -p.y, p.z),
            SymmetryOp::ScrewRhoX { h } => {
                let rotated = Point3::new(p.x, -p.y, -p.z);
                apply_screw(&ScrewMotion::new(h, h), &rotated)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    /// One-sided Hausdorff distance from the transformed vertices to the
    /// mesh (nearest-triangle distance).
    pub hausdorff: f64,
    /// For meshes with a branch angle and the rotation about Y: sup of
    /// `|theta(rho_Y p) + theta(p) - pi|` over matched vertex pairs.
    pub theta_relation: Option<f64>,
}

/// Distance from the image of the mesh under `op` back to the mesh.
pub fn symmetry_deviation(mesh: &TriMesh, op: SymmetryOp) -> Result<SymmetryReport> {
    if mesh.triangles.is_empty() {
        return Err(Error::invalid("mesh", "no triangles"));
    }
    let index = VertexGrid::build(mesh);
    let max_edge = mesh
        .triangles
        .iter()
        .flat_map(|t| {
            [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
                .map(|(a, b)| (mesh.vertices[a] - mesh.vertices[b]).norm())
        })
        .fold(0.0f64, f64::max);

    let mut hausdorff = 0.0f64;
    for v in &mesh.vertices {
        let q = op.apply(v);
        let d = index.distance_to_mesh(mesh, &q, max_edge);
        hausdorff = hausdorff.max(d);
    }

    // theta relation for rho_Y, over vertex pairs matched by position
    let theta_relation = match (op, mesh.theta()) {
        (SymmetryOp::RhoY, Some(theta)) => {
            let tol = 1e-6 * (1.0 + mesh.diameter());
            let mut sup: Option<f64> = None;
            for (k, v) in mesh.vertices.iter().enumerate() {
                let q = op.apply(v);
                if let Some(m) = index.nearest_vertex_within(mesh, &q, tol) {
                    let dev = (theta[m] + theta[k] - std::f64::consts::PI).abs();
                    sup = Some(sup.unwrap_or(0.0).max(dev));
                }
            }
            sup
        }
        _ => None,
    };

    Ok(SymmetryReport {
        hausdorff,
        theta_relation,
    })
}

/// Uniform spatial hash over vertices, with incident triangles, for
/// nearest-triangle queries.
struct VertexGrid {
    cell: f64,
    origin: Vec3,
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
    incident: Vec<Vec<usize>>,
}

impl VertexGrid {
    fn build(mesh: &TriMesh) -> Self {
        let cell = (mesh.median_edge_length() * 2.0).max(1e-12);
        let mut lo = Vec3::repeat(f64::INFINITY);
        for v in &mesh.vertices {
            lo = lo.inf(&v.coords);
        }
        let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (k, v) in mesh.vertices.iter().enumerate() {
            let key = Self::key_of(&(v.coords - lo), cell);
            buckets.entry(key).or_default().push(k);
        }
        let mut incident = vec![Vec::new(); mesh.vertices.len()];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for &v in tri {
                incident[v].push(t);
            }
        }
        VertexGrid {
            cell,
            origin: lo,
            buckets,
            incident,
        }
    }

    fn key_of(d: &Vec3, cell: f64) -> (i64, i64, i64) {
        (
            (d.x / cell).floor() as i64,
            (d.y / cell).floor() as i64,
            (d.z / cell).floor() as i64,
        )
    }

    fn for_ring(&self, center: (i64, i64, i64), ring: i64, mut f: impl FnMut(usize)) {
        for dx in -ring..=ring {
            for dy in -ring..=ring {
                for dz in -ring..=ring {
                    if dx.abs().max(dy.abs()).max(dz.abs()) != ring {
                        continue;
                    }
                    if let Some(list) = self.buckets.get(&(center.0 + dx, center.1 + dy, center.2 + dz)) {
                        for &v in list {
                            f(v);
                        }
                    }
                }
            }
        }
    }

    fn nearest_vertex(&self, mesh: &TriMesh, p: &Point3) -> (usize, f64) {
        let key = Self::key_of(&(p.coords - self.origin), self.cell);
        let mut best = (usize::MAX, f64::INFINITY);
        let mut ring = 0i64;
        loop {
            self.for_ring(key, ring, |v| {
                let d = (mesh.vertices[v] - p).norm();
                if d < best.1 {
                    best = (v, d);
                }
            });
            // once something is found, one extra ring guarantees optimality
            if best.0 != usize::MAX && (ring as f64 - 1.0) * self.cell > best.1 {
                break;
            }
            ring += 1;
            if ring > 2_000 {
                break;
            }
        }
        best
    }

    fn nearest_vertex_within(&self, mesh: &TriMesh, p: &Point3, tol: f64) -> Option<usize> {
        let (v, d) = self.nearest_vertex(mesh, p);
        (v != usize::MAX && d <= tol).then_some(v)
    }

    /// Exact nearest-triangle distance: every triangle within reach of the
    /// nearest vertex (plus the longest edge) is a candidate.
    fn distance_to_mesh(&self, mesh: &TriMesh, p: &Point3, max_edge: f64) -> f64 {
        let (_, dv) = self.nearest_vertex(mesh, p);
        let reach = dv + max_edge;
        let key = Self::key_of(&(p.coords - self.origin), self.cell);
        let rings = (reach / self.cell).ceil() as i64 + 1;
        let mut best = dv;
        let mut seen_tri: HashMap<usize, ()> = HashMap::new();
        for ring in 0..=rings {
            self.for_ring(key, ring, |v| {
                for &t in &self.incident[v] {
                    if seen_tri.insert(t, ()).is_none() {
                        let tri = mesh.triangles[t];
                        let d = point_triangle_distance(
                            p,
                            &mesh.vertices[tri[0]],
                            &mesh.vertices[tri[1]],
                            &mesh.vertices[tri[2]],
                        );
                        if d < best {
                            best = d;
                        }
                    }
                }
            });
        }
        best
    }
}

/// Euclidean distance from `p` to the closed triangle `(a, b, c)`.
pub fn point_triangle_distance(p: &Point3, a: &Point3, b: &Point3, c: &Point3) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm();
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm();
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return (ap - ab * t).norm();
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm();
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return (ap - ac * t).norm();
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp - (c - b) * t).norm();
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (ap - ab * v - ac * w).norm()
}

// ---------------------------------------------------------------------------
// Synthetic meshes
// ---------------------------------------------------------------------------

/// Constructors for the closed-form meshes the checks and tests run on.
pub mod synthetic {
    use super::*;

    /// Rectangular parameter grid triangulated into `2 (nu-1)(nv-1)`
    /// consistently oriented triangles.
    pub fn parametric(
        nu: usize,
        nv: usize,
        pos: impl Fn(usize, usize) -> Point3,
    ) -> TriMesh {
        let mut vertices = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                vertices.push(pos(i, j));
            }
        }
        let idx = |i: usize, j: usize| i * nv + j;
        let mut triangles = Vec::with_capacity(2 * (nu - 1) * (nv - 1));
        for i in 0..nu - 1 {
            for j in 0..nv - 1 {
                triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        TriMesh::new(vertices, triangles).expect("grid indices are in range")
    }

    pub fn tetrahedron() -> TriMesh {
        let vertices = vec![
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(1.0, -1.0, -1.0),
            Point3::new(-1.0, 1.0, -1.0),
            Point3::new(-1.0, -1.0, 1.0),
        ];
        let triangles = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
        TriMesh::new(vertices, triangles).expect("static indices")
    }

    /// Closed torus with major radius `big_r` and minor radius `rho`.
    pub fn torus(big_r: f64, rho: f64, nu: usize, nv: usize) -> TriMesh {
        let tau = std::f64::consts::TAU;
        let mut vertices = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            let u = tau * i as f64 / nu as f64;
            for j in 0..nv {
                let v = tau * j as f64 / nv as f64;
                let w = big_r + rho * v.cos();
                vertices.push(Point3::new(w * u.cos(), w * u.sin(), rho * v.sin()));
            }
        }
        let idx = |i: usize, j: usize| (i % nu) * nv + (j % nv);
        let mut triangles = Vec::with_capacity(2 * nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        TriMesh::new(vertices, triangles).expect("torus indices wrap")
    }

    /// Flat annulus strip between radii `r0 < r1`.
    pub fn annulus(r0: f64, r1: f64, nu: usize, nv: usize) -> TriMesh {
        let tau = std::f64::consts::TAU;
        let mut vertices = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            let t = tau * i as f64 / nu as f64;
            for j in 0..nv {
                let r = r0 + (r1 - r0) * j as f64 / (nv - 1) as f64;
                vertices.push(Point3::new(r * t.cos(), r * t.sin(), 0.0));
            }
        }
        let idx = |i: usize, j: usize| (i % nu) * nv + j;
        let mut triangles = Vec::new();
        for i in 0..nu {
            for j in 0..nv - 1 {
                triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        TriMesh::new(vertices, triangles).expect("annulus indices wrap")
    }

    /// Icosphere of the given radius after `level` 1-to-4 subdivisions.
    pub fn icosphere(radius: f64, level: usize) -> TriMesh {
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let mut vertices: Vec<Point3> = [
            (-1.0, phi, 0.0),
            (1.0, phi, 0.0),
            (-1.0, -phi, 0.0),
            (1.0, -phi, 0.0),
            (0.0, -1.0, phi),
            (0.0, 1.0, phi),
            (0.0, -1.0, -phi),
            (0.0, 1.0, -phi),
            (phi, 0.0, -1.0),
            (phi, 0.0, 1.0),
            (-phi, 0.0, -1.0),
            (-phi, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Point3::from(Vec3::new(x, y, z).normalize() * radius))
        .collect();
        let mut triangles: Vec<[usize; 3]> = vec![
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
            let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(triangles.len() * 4);
            for tri in &triangles {
                let mut mid = [0usize; 3];
                for (k, (a, b)) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]
                    .into_iter()
                    .enumerate()
                {
                    let key = (a.min(b), a.max(b));
                    mid[k] = *midpoints.entry(key).or_insert_with(|| {
                        let m = (vertices[a].coords + vertices[b].coords) / 2.0;
                        vertices.push(Point3::from(m.normalize() * radius));
                        vertices.len() - 1
                    });
                }
                next.push([tri[0], mid[0], mid[2]]);
                next.push([tri[1], mid[1], mid[0]]);
                next.push([tri[2], mid[2], mid[1]]);
                next.push([mid[0], mid[1], mid[2]]);
            }
            triangles = next;
        }
        TriMesh::new(vertices, triangles).expect("icosphere construction")
    }

    /// Half-helicoid patch `(r cos t, r sin t, pitch t)` with branch field
    /// `theta = t`, over `r in [r0, r1]`, `t in [t0, t1]`.
    pub fn helicoid_patch(
        pitch: f64,
        r0: f64,
        r1: f64,
        t0: f64,
        t1: f64,
        nr: usize,
        nt: usize,
    ) -> TriMesh {
        let pos = |i: usize, j: usize| {
            let r = r0 + (r1 - r0) * i as f64 / (nr - 1) as f64;
            let t = t0 + (t1 - t0) * j as f64 / (nt - 1) as f64;
            Point3::new(r * t.cos(), r * t.sin(), pitch * t)
        };
        let mesh = parametric(nr, nt, pos);
        let theta: Vec<f64> = (0..nr)
            .flat_map(|_| (0..nt).map(move |j| t0 + (t1 - t0) * j as f64 / (nt - 1) as f64))
            .collect();
        mesh.with_theta(theta).expect("branch field is continuous")
    }

    /// Graph `z = theta - w(r, theta)` over a polar rectangle, with branch
    /// field `theta`; `F = theta - z = w` on this mesh.
    pub fn perturbed_graph(
        w: impl Fn(f64, f64) -> f64,
        r0: f64,
        r1: f64,
        t0: f64,
        t1: f64,
        nr: usize,
        nt: usize,
    ) -> TriMesh {
        let coords = |i: usize, j: usize| {
            let r = r0 + (r1 - r0) * i as f64 / (nr - 1) as f64;
            let t = t0 + (t1 - t0) * j as f64 / (nt - 1) as f64;
            (r, t)
        };
        let mesh = parametric(nr, nt, |i, j| {
            let (r, t) = coords(i, j);
            Point3::new(r * t.cos(), r * t.sin(), t - w(r, t))
        });
        let theta: Vec<f64> = (0..nr)
            .flat_map(|i| (0..nt).map(move |j| coords(i, j).1))
            .collect();
        mesh.with_theta(theta).expect("branch field is continuous")
    }
}
