//! The vector field whose time-1 map is the homoclinic base map.
//!
//! The field is assembled in layers:
//!
//! * `v0` — the bottom-strip template `alpha_L(x,y) * (X0(x), A0(x)(y+1/2))`,
//!   affine near the corners, with a thin slowdown band at `x ~ 42/440` whose
//!   crossing time scales with `L`;
//! * `v1` — the four-fold symmetric extension of `v0` via the rotations
//!   `tau_i`, dispatched by the angular sector of the point;
//! * `field` — `v1` blended over the annulus between `[-1/10,1/10]^2` and
//!   `[-1/6,1/6]^2` with a radial repeller at the origin, then multiplied by
//!   a speed factor below 1 near the central square and near the disk rim.
//!
//! Values and spatial Jacobians are produced together; the Jacobian feeds the
//! variational equation of the flow.

use crate::geometry::{tau_conj, tau_inv, tau_vec, DiskPoint, Mat2, Vec2};
use crate::params::Params;
use crate::smooth::{bump, bump_deriv, flat_cutoff, flat_cutoff_deriv};

/// Field value and spatial Jacobian at a point.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub v: Vec2,
    pub jac: Mat2,
}

const THIRTEENTH: f64 = 1.0 / 13.0;
const TWELFTH: f64 = 1.0 / 12.0;
const ELEVENTH: f64 = 1.0 / 11.0;

/// Horizontal speed profile along the bottom strip, and its derivative.
/// Affine `-kappa (x + 1/2)` left of `1/13`, affine `-lambda (1/2 - x)` right
/// of `1/12`, bump-blended in between.
pub fn x0_speed(x: f64, params: &Params) -> (f64, f64) {
    let kappa = params.kappa();
    let lambda = params.lambda();
    if x <= THIRTEENTH {
        (-kappa * (x + 0.5), -kappa)
    } else if x >= TWELFTH {
        (-lambda * (0.5 - x), lambda)
    } else {
        let u = 156.0 * x - 12.0;
        let s = bump(u);
        let ds = 156.0 * bump_deriv(u);
        let left = -kappa * (x + 0.5);
        let right = -lambda * (0.5 - x);
        (
            s * left + (1.0 - s) * right,
            ds * (left - right) - s * kappa + (1.0 - s) * lambda,
        )
    }
}

/// Vertical rate profile: `lambda` left of `-1/11`, `-kappa` right of
/// `-1/12`, bump-blended in between. Returns the rate and its derivative.
pub fn a0_rate(x: f64, params: &Params) -> (f64, f64) {
    let kappa = params.kappa();
    let lambda = params.lambda();
    if x <= -ELEVENTH {
        (lambda, 0.0)
    } else if x >= -TWELFTH {
        (-kappa, 0.0)
    } else {
        let u = 132.0 * x + 12.0;
        let s = bump(u);
        let ds = 132.0 * bump_deriv(u);
        (s * lambda - (1.0 - s) * kappa, ds * (lambda + kappa))
    }
}

/// Support/slowdown factor `alpha_L` and its partial derivatives.
///
/// The first factor equals `1/L` on the band `41/440 <= x <= 43/440`
/// (the slow strip) and 1 outside `[40/440, 44/440]`; the second, radial
/// factor equals 1 on `x^2 + y^2 <= 1/2` and vanishes at the disk rim.
pub fn alpha_l(x: f64, y: f64, params: &Params) -> (f64, f64, f64) {
    let inv_l = 1.0 / params.l;
    let u = (440.0 * x - 42.0).abs() - 1.0;
    // 1 - bump(u) rises from 0 on the slow core to 1 away from it.
    let f = inv_l + (1.0 - inv_l) * flat_cutoff(u);
    let df = if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        (1.0 - inv_l) * flat_cutoff_deriv(u) * 440.0 * (440.0 * x - 42.0).signum()
    };

    let s = (2.0 / 7.0) * (x * x + y * y) - 1.0 / 7.0;
    let rad = bump(s);
    let drad = bump_deriv(s);
    let rad_x = drad * (4.0 / 7.0) * x;
    let rad_y = drad * (4.0 / 7.0) * y;

    (f * rad, df * rad + f * rad_x, f * rad_y)
}

/// Bottom-strip field template with Jacobian.
pub fn v0(p: DiskPoint, params: &Params) -> FieldSample {
    let (g, g_x, g_y) = alpha_l(p.x, p.y, params);
    let (x0, dx0) = x0_speed(p.x, params);
    let (a0, da0) = a0_rate(p.x, params);
    let ybar = p.y + 0.5;
    let w = Vec2::new(x0, a0 * ybar);
    FieldSample {
        v: w.scale(g),
        jac: Mat2::new(
            g_x * w.x + g * dx0,
            g_y * w.x,
            g_x * w.y + g * da0 * ybar,
            g_y * w.y + g * a0,
        ),
    }
}

/// Angular sector of a point: the index `i` such that `tau_i^{-1}(p)` lies in
/// the southern cone `{ y <= -|x| }`. Deterministic on the diagonals.
pub fn sector_of(p: DiskPoint) -> usize {
    if p.y <= -p.x.abs() {
        0
    } else if p.x <= -p.y.abs() {
        1
    } else if p.y >= p.x.abs() {
        2
    } else {
        3
    }
}

/// Symmetric extension of `v0` to the complement of the central square,
/// evaluated through the sector rotation.
pub fn v1(p: DiskPoint, params: &Params) -> FieldSample {
    let i = sector_of(p);
    let s = v0(tau_inv(i, p), params);
    FieldSample {
        v: tau_vec(i, s.v),
        jac: tau_conj(i, s.jac),
    }
}

const Q0_HALF: f64 = 0.1;
const Q_HALF: f64 = 1.0 / 6.0;
/// Reciprocal width of the blend annulus between the two squares.
const BLEND_RATE: f64 = 15.0;

/// Weight of the inner radial field: exactly 1 on `[-1/10,1/10]^2`, exactly 0
/// outside `[-1/6,1/6]^2`. Returns the weight and its gradient.
fn inner_weight(p: DiskPoint) -> (f64, Vec2) {
    let ux = BLEND_RATE * (p.x.abs() - Q0_HALF);
    let uy = BLEND_RATE * (p.y.abs() - Q0_HALF);
    let wx = bump(ux);
    let wy = bump(uy);
    let gx = BLEND_RATE * p.x.signum() * bump_deriv(ux) * wy;
    let gy = BLEND_RATE * p.y.signum() * bump_deriv(uy) * wx;
    (wx * wy, Vec2::new(gx, gy))
}

/// Speed factor below 1 on a neighborhood of the central square and of the
/// outer region, with its gradient. The transition bands sit strictly inside
/// `(1/6, 1/4)` and `(7/12, 2/3)` in the sup norm, clear of the dynamics the
/// transit estimates depend on.
fn damping(p: DiskPoint, params: &Params) -> (f64, Vec2) {
    let m = p.sup_norm();
    let uq = (m - Q_HALF) * 12.0;
    let uo = (m - 7.0 / 12.0) * 12.0;
    let bq = bump(uq);
    let bo = flat_cutoff(uo);
    let drop = 1.0 - params.inner_slowdown;
    let s = 1.0 - drop * (bq + bo);
    let dmag = -drop * (bump_deriv(uq) + flat_cutoff_deriv(uo)) * 12.0;
    let grad = if dmag == 0.0 {
        Vec2::new(0.0, 0.0)
    } else if p.x.abs() >= p.y.abs() {
        Vec2::new(dmag * p.x.signum(), 0.0)
    } else {
        Vec2::new(0.0, dmag * p.y.signum())
    };
    (s, grad)
}

/// The full field with Jacobian.
pub fn field(p: DiskPoint, params: &Params) -> FieldSample {
    let m = p.sup_norm();
    let (v, jac) = if m >= Q_HALF {
        let s = v1(p, params);
        (s.v, s.jac)
    } else {
        let lambda = params.lambda();
        let vin = Vec2::new(lambda * p.x, lambda * p.y);
        let jin = Mat2::new(lambda, 0.0, 0.0, lambda);
        let (w, gw) = inner_weight(p);
        if w == 1.0 {
            (vin, jin)
        } else {
            let s = v1(p, params);
            let v = vin.scale(w).add(s.v.scale(1.0 - w));
            let jac = jin
                .scale(w)
                .add(s.jac.scale(1.0 - w))
                .add(Mat2::outer(vin.sub(s.v), gw));
            (v, jac)
        }
    };
    let (sf, gs) = damping(p, params);
    if sf == 1.0 && gs.x == 0.0 && gs.y == 0.0 {
        FieldSample { v, jac }
    } else {
        FieldSample {
            v: v.scale(sf),
            jac: jac.scale(sf).add(Mat2::outer(v, gs)),
        }
    }
}
