//! Polygonal domains, conforming triangulations, uniform refinement, and
//! the geometric subsets (boundary band, dyadic annuli) that the stability
//! measurements are taken on.
//!
//! Initial meshes are canonical macro-triangulations (unit square, L-shape)
//! or a user-supplied macro mesh; uniform red refinement then preserves the
//! quasi-uniformity constant exactly, so no general-purpose mesher is
//! needed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::{
    point_in_triangle, segment_segment_dist, segments_cross, signed_area2, tri_area, tri_diameter,
    tri_inradius, Point2,
};

/// A simple polygon with counterclockwise vertex order.
#[derive(Debug, Clone)]
pub struct Polygon {
    vertices: Vec<Point2>,
    is_convex: bool,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Polygon> {
        if vertices.len() < 3 {
            return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
        }
        let n = vertices.len();
        let mut area2 = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            area2 += a.cross(b);
        }
        if area2 <= 0.0 {
            return Err(Error::Geometry(
                "polygon must be counterclockwise with positive area".into(),
            ));
        }
        // Simplicity: no two non-adjacent edges may cross or touch.
        for i in 0..n {
            let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
            for j in (i + 1)..n {
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
                if segments_cross(a1, a2, b1, b2) {
                    return Err(Error::Geometry(format!(
                        "polygon edges {i} and {j} intersect"
                    )));
                }
            }
        }
        let mut is_convex = true;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if signed_area2(a, b, c) < -1e-14 {
                is_convex = false;
            }
        }
        Ok(Polygon {
            vertices,
            is_convex,
        })
    }

    /// The unit square `[0,1]^2`.
    pub fn unit_square() -> Polygon {
        Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .expect("unit square is a valid polygon")
    }

    /// The L-shaped domain `[0,1]^2 \ (1/2,1]^2` with a reentrant corner at
    /// `(1/2, 1/2)`.
    pub fn l_shape() -> Polygon {
        Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.5),
            Point2::new(0.5, 0.5),
            Point2::new(0.5, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .expect("L-shape is a valid polygon")
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn is_convex(&self) -> bool {
        self.is_convex
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut area2 = 0.0;
        for i in 0..n {
            area2 += self.vertices[i].cross(self.vertices[(i + 1) % n]);
        }
        0.5 * area2
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in self.vertices.iter().skip(i + 1) {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Distance from an interior point to the polygon boundary.
    pub fn boundary_dist(&self, p: Point2) -> f64 {
        let n = self.vertices.len();
        let mut d = f64::INFINITY;
        for i in 0..n {
            d = d.min(crate::geom::point_segment_dist(
                p,
                self.vertices[i],
                self.vertices[(i + 1) % n],
            ));
        }
        d
    }

    fn edge(&self, marker: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[marker], self.vertices[(marker + 1) % n])
    }
}

/// A conforming triangulation of a polygon.
///
/// `boundary_edges` lists node pairs lying on polygon edges, each carrying
/// the index of the polygon edge it lies on as its marker. `parent_tri[t]`
/// is the index of the triangle at the previous refinement level that `t`
/// was split from (empty at level 0).
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Point2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<(usize, usize, usize)>,
    /// Largest element diameter.
    pub h: f64,
    /// Refinement depth below the macro mesh.
    pub level: u32,
    pub parent_tri: Vec<usize>,
    polygon: Polygon,
}

impl Mesh {
    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn tri_points(&self, t: usize) -> (Point2, Point2, Point2) {
        let [i, j, k] = self.triangles[t];
        (self.nodes[i], self.nodes[j], self.nodes[k])
    }

    pub fn tri_area(&self, t: usize) -> f64 {
        let (a, b, c) = self.tri_points(t);
        tri_area(a, b, c)
    }

    pub fn barycenter(&self, t: usize) -> Point2 {
        let (a, b, c) = self.tri_points(t);
        Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    /// Lowest-index triangle containing `p` (with tolerance), if any.
    pub fn locate(&self, p: Point2) -> Option<usize> {
        let tol = 1e-12;
        (0..self.triangles.len()).find(|&t| {
            let (a, b, c) = self.tri_points(t);
            point_in_triangle(p, a, b, c, tol)
        })
    }

    /// Node indices lying on the polygon boundary.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut flag = vec![false; self.nodes.len()];
        for &(i, j, _) in &self.boundary_edges {
            flag[i] = true;
            flag[j] = true;
        }
        (0..self.nodes.len()).filter(|&i| flag[i]).collect()
    }

    /// Structural validation: positive areas, conformity, boundary edges on
    /// polygon edges, area conservation.
    pub fn validate(&self) -> Result<()> {
        let mut area = 0.0;
        for t in 0..self.triangles.len() {
            let (a, b, c) = self.tri_points(t);
            let s = signed_area2(a, b, c);
            if s <= 0.0 {
                return Err(Error::Geometry(format!(
                    "triangle {t} has non-positive orientation/area"
                )));
            }
            area += 0.5 * s;
        }
        if (area - self.polygon.area()).abs() > 1e-12 * self.polygon.area().max(1.0) {
            return Err(Error::Geometry(format!(
                "mesh area {} differs from polygon area {}",
                area,
                self.polygon.area()
            )));
        }
        // Conformity: each undirected edge appears in exactly 2 triangles,
        // or exactly 1 if it is a boundary edge.
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &self.triangles {
            for e in 0..3 {
                let (i, j) = (tri[e], tri[(e + 1) % 3]);
                let key = (i.min(j), i.max(j));
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        let mut boundary: std::collections::BTreeSet<(usize, usize)> = Default::default();
        for &(i, j, _) in &self.boundary_edges {
            boundary.insert((i.min(j), i.max(j)));
        }
        for (&key, &cnt) in &counts {
            let expect = if boundary.contains(&key) { 1 } else { 2 };
            if cnt != expect {
                return Err(Error::Geometry(format!(
                    "edge {key:?} shared by {cnt} triangles, expected {expect}"
                )));
            }
        }
        for &(i, j, m) in &self.boundary_edges {
            let (a, b) = self.polygon.edge(m);
            let d = crate::geom::point_segment_dist(self.nodes[i], a, b)
                .max(crate::geom::point_segment_dist(self.nodes[j], a, b));
            if d > 1e-12 {
                return Err(Error::Geometry(format!(
                    "boundary edge ({i},{j}) not on polygon edge {m}"
                )));
            }
        }
        Ok(())
    }
}

/// A subset of mesh elements with a descriptive label.
#[derive(Debug, Clone)]
pub struct Region {
    pub element_ids: Vec<usize>,
    pub description: String,
}

impl Region {
    pub fn new(mut element_ids: Vec<usize>, description: impl Into<String>) -> Region {
        element_ids.sort_unstable();
        element_ids.dedup();
        Region {
            element_ids,
            description: description.into(),
        }
    }

    pub fn whole(mesh: &Mesh, description: impl Into<String>) -> Region {
        Region {
            element_ids: (0..mesh.num_triangles()).collect(),
            description: description.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.element_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_ids.is_empty()
    }
}

/// Dyadic space(-time) decomposition around an anchor `x0` with radii
/// `d_j = 2^-j` down to the innermost star radius `d_* = C_* h`.
#[derive(Debug, Clone)]
pub struct AnnulusDecomposition {
    pub x0: Point2,
    pub c_star: f64,
    pub j_star: u32,
    /// `d_j = 2^-j` for `j = 0..=j_star`.
    pub radii: Vec<f64>,
    pub star_radius: f64,
    /// `space_regions[j]` holds `Omega_j` for `j = 0..=j_star`.
    pub space_regions: Vec<Region>,
    pub star_region: Region,
    /// Parabolic time band `(d_j^2, 4 d_j^2)` paired with each annulus.
    pub time_bands: Vec<(f64, f64)>,
    pub star_time_band: (f64, f64),
}

impl AnnulusDecomposition {
    pub fn total_assigned(&self) -> usize {
        self.space_regions.iter().map(Region::len).sum::<usize>() + self.star_region.len()
    }
}

/// Build a level-0 mesh for a polygon.
///
/// With `template = None` the canonical macro-triangulations are used for
/// the unit square and L-shape; any other polygon is ear-clipped on its own
/// vertices. A caller-supplied template must cover the polygon exactly.
pub fn build_polygon_mesh(polygon: &Polygon, template: Option<&Mesh>) -> Result<Mesh> {
    if let Some(t) = template {
        let mesh = Mesh {
            nodes: t.nodes.clone(),
            triangles: t.triangles.clone(),
            boundary_edges: t.boundary_edges.clone(),
            h: t.h,
            level: 0,
            parent_tri: Vec::new(),
            polygon: polygon.clone(),
        };
        mesh.validate()?;
        return Ok(mesh);
    }
    let nodes;
    let triangles;
    if same_vertices(polygon, &Polygon::unit_square()) {
        nodes = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        triangles = vec![[0, 1, 2], [0, 2, 3]];
    } else if same_vertices(polygon, &Polygon::l_shape()) {
        // Three half-squares, each split along the diagonal pointing at the
        // reentrant corner region.
        nodes = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 0.5),
            Point2::new(0.5, 0.5),
            Point2::new(1.0, 0.5),
            Point2::new(0.0, 1.0),
            Point2::new(0.5, 1.0),
        ];
        triangles = vec![
            [0, 1, 4],
            [0, 4, 3],
            [1, 2, 5],
            [1, 5, 4],
            [3, 4, 7],
            [3, 7, 6],
        ];
    } else {
        nodes = polygon.vertices().to_vec();
        triangles = ear_clip(polygon)?;
    }
    finish_macro_mesh(polygon, nodes, triangles)
}

fn same_vertices(a: &Polygon, b: &Polygon) -> bool {
    let (va, vb) = (a.vertices(), b.vertices());
    va.len() == vb.len()
        && va
            .iter()
            .zip(vb)
            .all(|(p, q)| (p.x - q.x).abs() < 1e-14 && (p.y - q.y).abs() < 1e-14)
}

fn ear_clip(polygon: &Polygon) -> Result<Vec<[usize; 3]>> {
    let pts = polygon.vertices();
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut tris = Vec::new();
    let mut guard = 0;
    while idx.len() > 3 {
        guard += 1;
        if guard > 10_000 {
            return Err(Error::Geometry("ear clipping failed to terminate".into()));
        }
        let m = idx.len();
        let mut clipped = false;
        for i in 0..m {
            let (ia, ib, ic) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            if signed_area2(a, b, c) <= 1e-14 {
                continue;
            }
            let contains_other = idx.iter().any(|&j| {
                j != ia && j != ib && j != ic && point_in_triangle(pts[j], a, b, c, -1e-12)
            });
            if contains_other {
                continue;
            }
            tris.push([ia, ib, ic]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            return Err(Error::Geometry("no ear found; polygon degenerate?".into()));
        }
    }
    tris.push([idx[0], idx[1], idx[2]]);
    Ok(tris)
}

fn finish_macro_mesh(
    polygon: &Polygon,
    nodes: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
) -> Result<Mesh> {
    // Boundary edges: element edges used once; find the polygon edge each
    // lies on.
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for tri in &triangles {
        for e in 0..3 {
            let (i, j) = (tri[e], tri[(e + 1) % 3]);
            *counts.entry((i.min(j), i.max(j))).or_insert(0) += 1;
        }
    }
    let mut boundary_edges = Vec::new();
    for (&(i, j), &cnt) in &counts {
        if cnt == 1 {
            let marker = polygon_edge_of(polygon, nodes[i], nodes[j]).ok_or_else(|| {
                Error::Geometry(format!(
                    "template boundary edge ({i},{j}) does not lie on the polygon boundary"
                ))
            })?;
            boundary_edges.push((i, j, marker));
        }
    }
    let h = (0..triangles.len())
        .map(|t| {
            let [i, j, k] = triangles[t];
            tri_diameter(nodes[i], nodes[j], nodes[k])
        })
        .fold(0.0f64, f64::max);
    let mesh = Mesh {
        nodes,
        triangles,
        boundary_edges,
        h,
        level: 0,
        parent_tri: Vec::new(),
        polygon: polygon.clone(),
    };
    mesh.validate()?;
    Ok(mesh)
}

fn polygon_edge_of(polygon: &Polygon, a: Point2, b: Point2) -> Option<usize> {
    let n = polygon.vertices().len();
    (0..n).find(|&m| {
        let (p, q) = polygon.edge(m);
        crate::geom::point_segment_dist(a, p, q) < 1e-12
            && crate::geom::point_segment_dist(b, p, q) < 1e-12
    })
}

/// Red refinement: each triangle splits into 4 congruent children through
/// its edge midpoints. `h` halves exactly and the quasi-uniformity constant
/// is preserved (children are similar to their parent).
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    // Collect unique edges and create midpoint nodes; new nodes within this
    // level are ordered lexicographically by (y, x).
    let mut edge_mid: BTreeMap<(usize, usize), Point2> = BTreeMap::new();
    for tri in &mesh.triangles {
        for e in 0..3 {
            let (i, j) = (tri[e], tri[(e + 1) % 3]);
            let key = (i.min(j), i.max(j));
            edge_mid
                .entry(key)
                .or_insert_with(|| mesh.nodes[key.0].midpoint(mesh.nodes[key.1]));
        }
    }
    let mut new_entries: Vec<((usize, usize), Point2)> =
        edge_mid.iter().map(|(&k, &p)| (k, p)).collect();
    new_entries.sort_by(|a, b| {
        (a.1.y, a.1.x)
            .partial_cmp(&(b.1.y, b.1.x))
            .unwrap()
            .then(a.0.cmp(&b.0))
    });
    let mut nodes = mesh.nodes.clone();
    let mut mid_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (key, p) in new_entries {
        mid_index.insert(key, nodes.len());
        nodes.push(p);
    }
    let mid = |i: usize, j: usize| mid_index[&(i.min(j), i.max(j))];

    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    let mut parent_tri = Vec::with_capacity(4 * mesh.triangles.len());
    for (t, &[i, j, k]) in mesh.triangles.iter().enumerate() {
        let (mij, mjk, mki) = (mid(i, j), mid(j, k), mid(k, i));
        for tri in [[i, mij, mki], [mij, j, mjk], [mki, mjk, k], [mij, mjk, mki]] {
            triangles.push(tri);
            parent_tri.push(t);
        }
    }
    let mut boundary_edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for &(i, j, m) in &mesh.boundary_edges {
        let mp = mid(i, j);
        boundary_edges.push((i, mp, m));
        boundary_edges.push((mp, j, m));
    }
    boundary_edges.sort_unstable();
    Mesh {
        nodes,
        triangles,
        boundary_edges,
        h: 0.5 * mesh.h,
        level: mesh.level + 1,
        parent_tri,
        polygon: mesh.polygon.clone(),
    }
}

/// Refine `levels` times.
pub fn refine_to_level(mesh: &Mesh, levels: u32) -> Mesh {
    let mut m = mesh.clone();
    for _ in 0..levels {
        m = refine_uniform(&m);
    }
    m
}

/// Smallest `K` with `K^-1 h <= rho_l <= h_l <= K h` over all elements,
/// from exact per-element diameters and inradii.
pub fn quasi_uniformity(mesh: &Mesh) -> Result<f64> {
    let mut k = 1.0f64;
    for t in 0..mesh.num_triangles() {
        let (a, b, c) = mesh.tri_points(t);
        if tri_area(a, b, c) <= 0.0 {
            return Err(Error::Geometry(format!("triangle {t} has zero area")));
        }
        let rho = tri_inradius(a, b, c);
        k = k.max(mesh.h / rho);
    }
    Ok(k)
}

/// Elements intersecting the band `{dist(x, boundary) <= width}`; superset
/// semantics (an element is included as soon as any of its points
/// qualifies).
pub fn boundary_band(mesh: &Mesh, width: f64) -> Result<Region> {
    if width <= 0.0 {
        return Err(Error::invalid("band width must be positive"));
    }
    let poly = mesh.polygon();
    let npoly = poly.vertices().len();
    let mut ids = Vec::new();
    for t in 0..mesh.num_triangles() {
        let (a, b, c) = mesh.tri_points(t);
        let tri_edges = [(a, b), (b, c), (c, a)];
        let mut dist = f64::INFINITY;
        for m in 0..npoly {
            let (p, q) = poly.edge(m);
            for &(u, v) in &tri_edges {
                dist = dist.min(segment_segment_dist(u, v, p, q));
            }
        }
        if dist <= width {
            ids.push(t);
        }
    }
    Ok(Region::new(ids, format!("D_h band width {width}")))
}

/// Dyadic annuli around `x0`.
///
/// Requires `h < 1/(4 C_*)`; the innermost radius is the nearest attainable
/// dyadic level to `C_* h`, and every element is assigned to exactly one
/// region by its barycenter.
pub fn dyadic_annuli(mesh: &Mesh, x0: Point2, c_star: f64) -> Result<AnnulusDecomposition> {
    if c_star < 16.0 {
        return Err(Error::invalid("C_* must be at least 16"));
    }
    if mesh.locate(x0).is_none() {
        return Err(Error::invalid("anchor x0 must lie in the domain"));
    }
    if mesh.h >= 1.0 / (4.0 * c_star) {
        return Err(Error::invalid(format!(
            "mesh size h = {} too large: need h < 1/(4 C_*) = {}",
            mesh.h,
            1.0 / (4.0 * c_star)
        )));
    }
    let j_star = (1.0 / (c_star * mesh.h)).log2().round().max(2.0) as u32;
    let star_radius = 0.5f64.powi(j_star as i32);
    let radii: Vec<f64> = (0..=j_star).map(|j| 0.5f64.powi(j as i32)).collect();

    let mut per_ring: Vec<Vec<usize>> = vec![Vec::new(); (j_star + 1) as usize];
    let mut star_ids = Vec::new();
    for t in 0..mesh.num_triangles() {
        let ds = mesh.barycenter(t).dist(x0);
        if ds <= star_radius {
            star_ids.push(t);
        } else {
            // ring j covers [2^-j, 2^{-j+1});  j <= 0 goes to Omega_0.
            let j = (-ds.log2()).floor() + 1.0;
            let j = j.clamp(0.0, j_star as f64) as usize;
            per_ring[j].push(t);
        }
    }
    let space_regions: Vec<Region> = per_ring
        .into_iter()
        .enumerate()
        .map(|(j, ids)| Region::new(ids, format!("annulus Omega_{j}")))
        .collect();
    let time_bands: Vec<(f64, f64)> = radii.iter().map(|d| (d * d, 4.0 * d * d)).collect();
    Ok(AnnulusDecomposition {
        x0,
        c_star,
        j_star,
        radii,
        star_radius,
        space_regions,
        star_region: Region::new(star_ids, "innermost Omega_*"),
        time_bands,
        star_time_band: (0.0, star_radius * star_radius),
    })
}

/// Serialize in the plain text format:
/// `nodes N triangles T boundary B`, then `x y` lines, `i j k` lines and
/// `i j marker` lines.
pub fn write_mesh_text(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "nodes {} triangles {} boundary {}",
        mesh.num_nodes(),
        mesh.num_triangles(),
        mesh.boundary_edges.len()
    );
    for p in &mesh.nodes {
        let _ = writeln!(s, "{:.16e} {:.16e}", p.x, p.y);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    for &(i, j, m) in &mesh.boundary_edges {
        let _ = writeln!(s, "{i} {j} {m}");
    }
    s
}

/// Parse the text format back; the polygon is reconstructed from the
/// boundary-edge markers' geometry via the supplied polygon.
pub fn read_mesh_text(text: &str, polygon: &Polygon) -> Result<Mesh> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 6 || toks[0] != "nodes" || toks[2] != "triangles" || toks[4] != "boundary" {
        return Err(Error::Parse(format!("bad mesh header: {header}")));
    }
    let parse = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Parse(format!("bad integer {s}")))
    };
    let (n, t, b) = (parse(toks[1])?, parse(toks[3])?, parse(toks[5])?);
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated node list".into()))?;
        let mut it = line.split_whitespace();
        let x: f64 = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad node line: {line}")))?;
        let y: f64 = it
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad node line: {line}")))?;
        nodes.push(Point2::new(x, y));
    }
    let mut triangles = Vec::with_capacity(t);
    for _ in 0..t {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated triangle list".into()))?;
        let v: Vec<usize> = line
            .split_whitespace()
            .map(parse)
            .collect::<Result<Vec<_>>>()?;
        if v.len() != 3 {
            return Err(Error::Parse(format!("bad triangle line: {line}")));
        }
        triangles.push([v[0], v[1], v[2]]);
    }
    let mut boundary_edges = Vec::with_capacity(b);
    for _ in 0..b {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated boundary list".into()))?;
        let v: Vec<usize> = line
            .split_whitespace()
            .map(parse)
            .collect::<Result<Vec<_>>>()?;
        if v.len() != 3 {
            return Err(Error::Parse(format!("bad boundary line: {line}")));
        }
        boundary_edges.push((v[0], v[1], v[2]));
    }
    let h = (0..triangles.len())
        .map(|i| {
            let [a, b, c] = triangles[i];
            tri_diameter(nodes[a], nodes[b], nodes[c])
        })
        .fold(0.0f64, f64::max);
    let mesh = Mesh {
        nodes,
        triangles,
        boundary_edges,
        h,
        level: 0,
        parent_tri: Vec::new(),
        polygon: polygon.clone(),
    };
    mesh.validate()?;
    Ok(mesh)
}
