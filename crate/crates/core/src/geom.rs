//! Small 2D geometric primitives shared by the mesh and FE modules.

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product `self × o`.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        self.sub(o).norm()
    }

    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Twice the signed area of the triangle `(a, b, c)` (positive when CCW).
pub fn signed_area2(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// Area of the triangle `(a, b, c)` regardless of orientation.
pub fn tri_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * signed_area2(a, b, c).abs()
}

/// Diameter of the triangle: its longest edge.
pub fn tri_diameter(a: Point2, b: Point2, c: Point2) -> f64 {
    a.dist(b).max(b.dist(c)).max(c.dist(a))
}

/// Inradius of the triangle: `area / s` with `s` the semi-perimeter.
pub fn tri_inradius(a: Point2, b: Point2, c: Point2) -> f64 {
    let s = 0.5 * (a.dist(b) + b.dist(c) + c.dist(a));
    if s == 0.0 {
        0.0
    } else {
        tri_area(a, b, c) / s
    }
}

/// Barycentric coordinates of `p` with respect to the triangle `(a, b, c)`.
pub fn barycentric(p: Point2, a: Point2, b: Point2, c: Point2) -> (f64, f64, f64) {
    let det = signed_area2(a, b, c);
    let l0 = signed_area2(p, b, c) / det;
    let l1 = signed_area2(a, p, c) / det;
    let l2 = 1.0 - l0 - l1;
    (l0, l1, l2)
}

/// Inclusion test with a tolerance in barycentric coordinates.
pub fn point_in_triangle(p: Point2, a: Point2, b: Point2, c: Point2, tol: f64) -> bool {
    let (l0, l1, l2) = barycentric(p, a, b, c);
    l0 >= -tol && l1 >= -tol && l2 >= -tol
}

/// Distance from a point to a closed segment.
pub fn point_segment_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.add(ab.scale(t)))
}

/// Whether the open segments `(a, b)` and `(c, d)` properly intersect
/// (crossing in their interiors).
pub fn segments_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = signed_area2(c, d, a);
    let d2 = signed_area2(c, d, b);
    let d3 = signed_area2(a, b, c);
    let d4 = signed_area2(a, b, d);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0)
}

/// Minimum distance between two segments that do not properly cross.
pub fn segment_segment_dist(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    point_segment_dist(a, c, d)
        .min(point_segment_dist(b, c, d))
        .min(point_segment_dist(c, a, b))
        .min(point_segment_dist(d, a, b))
}
