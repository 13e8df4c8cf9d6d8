//! Plane primitives: points, tangent vectors, the four-fold symmetry, corner
//! charts, and the transit window set used for visit frequencies.

use serde::Serialize;

/// Closed disk radius.
pub const DISK_RADIUS: f64 = 2.0;
/// Corner square side; `C_0 = [-1/2, -5/12]^2`.
pub const CORNER_SIDE: f64 = 1.0 / 12.0;
/// Chart scale mapping the corner square onto `[0, 2]^2`.
pub const CHART_SCALE: f64 = 24.0;

/// A tangent vector (also used as a free 2-vector).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.x, c * self.y)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.x / n, self.y / n)
    }
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn scale(self, s: f64) -> Mat2 {
        Mat2::new(s * self.a, s * self.b, s * self.c, s * self.d)
    }

    /// Outer product `u v^T`.
    pub fn outer(u: Vec2, v: Vec2) -> Mat2 {
        Mat2::new(u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y)
    }

    /// Operator norm (largest singular value).
    pub fn op_norm(self) -> f64 {
        let g11 = self.a * self.a + self.c * self.c;
        let g22 = self.b * self.b + self.d * self.d;
        let g12 = self.a * self.b + self.c * self.d;
        let tr = g11 + g22;
        let disc = ((g11 - g22) * (g11 - g22) + 4.0 * g12 * g12).sqrt();
        (0.5 * (tr + disc)).sqrt()
    }
}

/// A point of the closed disk `D = {x^2 + y^2 <= 4}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn in_disk(self) -> bool {
        self.norm_sq() <= DISK_RADIUS * DISK_RADIUS * (1.0 + 1e-12)
    }

    pub fn sup_norm(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn dist(self, o: Self) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }

    pub fn offset(self, v: Vec2) -> Self {
        Self::new(self.x + v.x, self.y + v.y)
    }
}

/// The rotation `tau_i` (0: id, 1: (x,y)->(y,-x), 2: -id, 3: (x,y)->(-y,x)).
pub fn tau(i: usize, p: DiskPoint) -> DiskPoint {
    match i & 3 {
        0 => p,
        1 => DiskPoint::new(p.y, -p.x),
        2 => DiskPoint::new(-p.x, -p.y),
        _ => DiskPoint::new(-p.y, p.x),
    }
}

/// Inverse rotation `tau_i^{-1}` (equals `tau_{4-i}`).
pub fn tau_inv(i: usize, p: DiskPoint) -> DiskPoint {
    tau((4 - (i & 3)) & 3, p)
}

/// `D tau_i` applied to a tangent vector (the same linear rotation).
pub fn tau_vec(i: usize, v: Vec2) -> Vec2 {
    match i & 3 {
        0 => v,
        1 => Vec2::new(v.y, -v.x),
        2 => Vec2::new(-v.x, -v.y),
        _ => Vec2::new(-v.y, v.x),
    }
}

/// Inverse of [`tau_vec`].
pub fn tau_vec_inv(i: usize, v: Vec2) -> Vec2 {
    tau_vec((4 - (i & 3)) & 3, v)
}

/// Conjugate a matrix by the rotation: `tau_i . M . tau_i^{-1}`.
/// Conjugation by `tau_1` and `tau_3` coincide because `tau_3 = -tau_1`.
pub fn tau_conj(i: usize, m: Mat2) -> Mat2 {
    match i & 3 {
        0 | 2 => m,
        _ => Mat2::new(m.d, -m.c, -m.b, m.a),
    }
}

/// Chart coordinates of a point relative to corner `i`: the corner square
/// `tau_i(C_0)` maps onto `[0, 2]^2`, with the hyperbolic fixed point at the
/// origin, the contracting axis along `x` and the expanding axis along `y`.
pub fn chart_from_disk(i: usize, p: DiskPoint) -> Vec2 {
    let q = tau_inv(i, p);
    Vec2::new(CHART_SCALE * (q.x + 0.5), CHART_SCALE * (q.y + 0.5))
}

/// Inverse of [`chart_from_disk`].
pub fn disk_from_chart(i: usize, c: Vec2) -> DiskPoint {
    let q = DiskPoint::new(c.x / CHART_SCALE - 0.5, c.y / CHART_SCALE - 0.5);
    tau(i, q)
}

/// Tangent vector expressed in corner-`i` chart axes (rotation only; the
/// uniform chart scale cancels in every quantity we form from directions).
pub fn chart_vec(i: usize, v: Vec2) -> Vec2 {
    tau_vec_inv(i, v)
}

/// Index of the corner square containing `p`, if any. Membership uses the
/// closed square, so boundary grazing resolves toward membership.
pub fn corner_of(p: DiskPoint) -> Option<usize> {
    for i in 0..4 {
        let q = tau_inv(i, p);
        if q.x >= -0.5 && q.x <= -0.5 + CORNER_SIDE && q.y >= -0.5 && q.y <= -0.5 + CORNER_SIDE {
            return Some(i);
        }
    }
    None
}

/// Membership in the transit window `Delta`: the union over `i` of
/// `tau_i( ]2/5, 5/12] x [-1/2, -1/10] )`.
pub fn in_delta(p: DiskPoint) -> bool {
    for i in 0..4 {
        let q = tau_inv(i, p);
        if q.x > 0.4 && q.x <= 5.0 / 12.0 && q.y >= -0.5 && q.y <= -0.1 {
            return true;
        }
    }
    false
}
