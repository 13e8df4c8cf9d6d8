//! The wiggle perturbations applied inside the four corner squares.
//!
//! Two variants share the dispatch machinery:
//!
//! * the entropy wiggle `g` lifts points upward by `Lambda^(-T_n) * (2 + sin)`
//!   inside `R_n = [a_n, b_n] x [-l_n/N_n, l_n/N_n]` (chart coordinates),
//!   never downward;
//! * the large-exponent wiggle pushes by `exp(-(log n)^2) * cos(10 pi n^4 x)`
//!   inside `[a_n, b_n] x [-1/n^4, 1/n^4]`, with both signs.
//!
//! The perturbed map composes the wiggle with the base map; off every support
//! rectangle it is bit-identical to the base map.

use crate::flow::{BaseMap, PlanarMap};
use crate::geometry::{chart_from_disk, disk_from_chart, tau_vec, tau_vec_inv, DiskPoint, Vec2};
use crate::params::Params;
use crate::sampling::r2_sequence;
use crate::smooth::{
    flat_cutoff, flat_cutoff_deriv, plateau_cutoff, plateau_cutoff_deriv, PerturbationSchedule,
    ScheduleEntry,
};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Which wiggle family the perturbed map uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WiggleVariant {
    /// Upward pushes of size `Lambda^(-T_n)`, the entropy-creating family.
    EntropyWiggle,
    /// Signed pushes of size `exp(-(log n)^2)`, the large-exponent family.
    ExponentWiggle,
}

/// A point's host wiggle window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionHit {
    pub n: u32,
    pub corner: usize,
}

/// The base map composed with the wiggle family.
#[derive(Debug, Clone)]
pub struct PerturbedMap {
    pub base: BaseMap,
    pub schedule: PerturbationSchedule,
    pub variant: WiggleVariant,
    entries: Vec<ScheduleEntry>,
}

impl PerturbedMap {
    pub fn new(base: BaseMap, schedule: PerturbationSchedule, variant: WiggleVariant) -> Self {
        let entries = schedule.entries();
        Self {
            base,
            schedule,
            variant,
            entries,
        }
    }

    pub fn entries(&self) -> &[ScheduleEntry] {
        &self.entries
    }

    fn half_height(&self, e: &ScheduleEntry) -> f64 {
        match self.variant {
            WiggleVariant::EntropyWiggle => e.half_height(),
            WiggleVariant::ExponentWiggle => e.ell,
        }
    }

    /// The unique wiggle window containing `p`, if any.
    pub fn region_of(&self, p: DiskPoint) -> Option<RegionHit> {
        for corner in 0..4 {
            let c = chart_from_disk(corner, p);
            if !(0.0..=2.0).contains(&c.x) || c.y.abs() > 0.5 {
                continue;
            }
            for e in &self.entries {
                if c.x >= e.a && c.x <= e.b && c.y.abs() <= self.half_height(e) {
                    return Some(RegionHit { n: e.n, corner });
                }
                // Entries are ordered by decreasing a_n.
                if c.x > e.b {
                    break;
                }
            }
        }
        None
    }

    fn entry(&self, n: u32) -> &ScheduleEntry {
        self.entries
            .iter()
            .find(|e| e.n == n)
            .expect("entry for scheduled n")
    }

    /// Chart-coordinate wiggle displacement and its partial derivatives
    /// `(d, d_x, d_y)`; the wiggle sends `(x, y)` to `(x, y + d)`.
    pub fn displacement(&self, e: &ScheduleEntry, x: f64, y: f64) -> (f64, f64, f64) {
        match self.variant {
            WiggleVariant::EntropyWiggle => {
                let rate = e.wiggles as f64 / e.ell;
                let u1 = rate * (x - e.a);
                let u2 = rate * (e.b - x);
                let uy = rate * y;
                let a1 = flat_cutoff(u1);
                let a2 = flat_cutoff(u2);
                let by = plateau_cutoff(uy);
                let cut = a1 * a2 * by;
                let amp = e.amplitude();
                let phase = PI * rate * (x - e.a);
                let s = 2.0 + phase.sin();
                let d = cut * amp * s;
                let cut_x = rate * (flat_cutoff_deriv(u1) * a2 - a1 * flat_cutoff_deriv(u2)) * by;
                let cut_y = rate * a1 * a2 * plateau_cutoff_deriv(uy);
                let d_x = cut_x * amp * s + cut * amp * PI * rate * phase.cos();
                let d_y = cut_y * amp * s;
                (d, d_x, d_y)
            }
            WiggleVariant::ExponentWiggle => {
                let n4 = (e.n as f64).powi(4);
                let u1 = 10.0 * n4 * (x - e.a);
                let u2 = 10.0 * n4 * (e.b - x);
                let uy = n4 * y;
                let a1 = flat_cutoff(u1);
                let a2 = flat_cutoff(u2);
                let by = plateau_cutoff(uy);
                let cut = a1 * a2 * by;
                let amp = (-(e.n as f64).ln().powi(2)).exp();
                let freq = 10.0 * PI * n4;
                let c = (freq * x).cos();
                let d = cut * amp * c;
                let cut_x =
                    10.0 * n4 * (flat_cutoff_deriv(u1) * a2 - a1 * flat_cutoff_deriv(u2)) * by;
                let cut_y = n4 * a1 * a2 * plateau_cutoff_deriv(uy);
                let d_x = cut_x * amp * c - cut * amp * freq * (freq * x).sin();
                let d_y = cut_y * amp * c;
                (d, d_x, d_y)
            }
        }
    }

    /// The wiggle alone, in disk coordinates. Identity wherever the cutoff
    /// vanishes, including bit-exact identity off the support rectangles.
    pub fn wiggle(&self, p: DiskPoint) -> DiskPoint {
        match self.region_of(p) {
            None => p,
            Some(hit) => {
                let e = self.entry(hit.n);
                let c = chart_from_disk(hit.corner, p);
                let (d, _, _) = self.displacement(e, c.x, c.y);
                if d == 0.0 {
                    p
                } else {
                    disk_from_chart(hit.corner, Vec2::new(c.x, c.y + d))
                }
            }
        }
    }
}

impl PlanarMap for PerturbedMap {
    fn apply(&self, p: DiskPoint) -> Result<DiskPoint> {
        self.base.f0(self.wiggle(p))
    }

    fn apply_with_tangent(&self, p: DiskPoint, v: Vec2) -> Result<(DiskPoint, Vec2)> {
        match self.region_of(p) {
            None => self.base.df0(p, v),
            Some(hit) => {
                let e = self.entry(hit.n);
                let c = chart_from_disk(hit.corner, p);
                let (d, d_x, d_y) = self.displacement(e, c.x, c.y);
                let vc = tau_vec_inv(hit.corner, v);
                let wc = Vec2::new(vc.x, d_x * vc.x + (1.0 + d_y) * vc.y);
                let w = tau_vec(hit.corner, wc);
                let q = if d == 0.0 {
                    p
                } else {
                    disk_from_chart(hit.corner, Vec2::new(c.x, c.y + d))
                };
                self.base.df0(q, w)
            }
        }
    }

    fn params(&self) -> &Params {
        &self.base.params
    }
}

/// Outcome of the derivative-bound scan over one wiggle window.
#[derive(Debug, Clone, Serialize)]
pub struct DerivativeBoundReport {
    pub n: u32,
    pub r: f64,
    pub samples: usize,
    /// Maximum of `|d f_2 / d x| / f_2^(1 - 1/r)` over the sample grid,
    /// with the corner-affine form `f_2 = Lambda g_2`.
    pub max_ratio: f64,
    /// Chart location realizing the maximum.
    pub argmax: (f64, f64),
    /// Samples skipped because `f_2 <= 0` (possible for starting heights
    /// below the axis); the bound concerns the upward-pushed image.
    pub skipped: usize,
    pub pass: bool,
}

/// Scan `|d f_2 / d x| <= f_2^(1 - 1/r)` over a deterministic grid in the
/// window of index `n`.
pub fn check_derivative_bound(
    map: &PerturbedMap,
    n: u32,
    samples: usize,
) -> Result<DerivativeBoundReport> {
    if map.variant != WiggleVariant::EntropyWiggle {
        return Err(Error::InvalidParam(
            "derivative bound applies to the entropy wiggle".into(),
        ));
    }
    let e = *map.entry(n);
    let r = map.schedule.r;
    let lam = map.base.params.cap_lambda();
    let hh = e.half_height();
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = (e.a, 0.0);
    let mut skipped = 0usize;
    for (u, v) in r2_sequence(samples) {
        let x = e.a + u * e.ell;
        let y = (2.0 * v - 1.0) * hh;
        let (d, d_x, _) = map.displacement(&e, x, y);
        let df2_dx = lam * d_x;
        let f2 = lam * (y + d);
        let denom = if r == 1.0 {
            1.0
        } else if f2 > 0.0 {
            f2.powf(1.0 - 1.0 / r)
        } else {
            skipped += 1;
            continue;
        };
        let ratio = df2_dx.abs() / denom;
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = (x, y);
        }
    }
    Ok(DerivativeBoundReport {
        n,
        r,
        samples,
        max_ratio,
        argmax,
        skipped,
        pass: max_ratio <= 1.0,
    })
}

/// One row of the smoothness-distance trend: finite-difference bounds on the
/// partial derivatives of the wiggle displacement over its window.
#[derive(Debug, Clone, Serialize)]
pub struct CrProxyRow {
    pub n: u32,
    /// Per-order maxima, index `s` holding the order-`s` estimate.
    pub order_max: Vec<f64>,
    /// Fractional-order difference quotient at scale 1e-4 when `r` is not an
    /// integer.
    pub holder_part: Option<f64>,
    /// The overall proxy: maximum over the listed orders.
    pub proxy: f64,
}

/// Sample the displacement's partial derivatives up to order `ceil(r)` on a
/// grid over each scheduled window; under the default schedule the sequence
/// shrinks toward zero as `n` grows.
pub fn cr_distance_trend(map: &PerturbedMap) -> Vec<CrProxyRow> {
    let r = map.schedule.r;
    let top = r.ceil() as usize;
    let frac = r - r.floor();
    let h = 1e-4;
    map.entries()
        .iter()
        .map(|e| {
            let grid_x = 33;
            let grid_y = 7;
            let hh = map.half_height(e);
            let disp = |x: f64, y: f64| map.displacement(e, x, y).0;
            let mut order_max = vec![0.0f64; top + 1];
            let mut holder: f64 = 0.0;
            for ix in 0..grid_x {
                for iy in 0..grid_y {
                    let x = e.a + e.ell * ix as f64 / (grid_x - 1) as f64;
                    let y = -hh + 2.0 * hh * iy as f64 / (grid_y - 1) as f64;
                    for sx in 0..=top {
                        for sy in 0..=(top - sx) {
                            let s = sx + sy;
                            let v = fd_partial(&disp, x, y, sx, sy, h).abs();
                            if v > order_max[s] {
                                order_max[s] = v;
                            }
                            if frac > 0.0 && s + 1 == top {
                                let shifted = fd_partial(&disp, x + h, y, sx, sy, h)
                                    - fd_partial(&disp, x, y, sx, sy, h);
                                let qt = shifted.abs() / h.powf(frac);
                                if qt > holder {
                                    holder = qt;
                                }
                            }
                        }
                    }
                }
            }
            let holder_part = (frac > 0.0).then_some(holder);
            let proxy = order_max
                .iter()
                .copied()
                .chain(holder_part)
                .fold(0.0f64, f64::max);
            CrProxyRow {
                n: e.n,
                order_max,
                holder_part,
                proxy,
            }
        })
        .collect()
}

/// Central-difference mixed partial of order `(sx, sy)`.
fn fd_partial(f: &dyn Fn(f64, f64) -> f64, x: f64, y: f64, sx: usize, sy: usize, h: f64) -> f64 {
    if sx > 0 {
        (fd_partial(f, x + 0.5 * h, y, sx - 1, sy, h) - fd_partial(f, x - 0.5 * h, y, sx - 1, sy, h))
            / h
    } else if sy > 0 {
        (fd_partial(f, x, y + 0.5 * h, sx, sy - 1, h) - fd_partial(f, x, y - 0.5 * h, sx, sy - 1, h))
            / h
    } else {
        f(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::ReturnTimes;

    fn surrogate() -> PerturbedMap {
        let base = BaseMap::new(Params::default());
        let sched = PerturbationSchedule::new(2, 1.0, ReturnTimes::Linear { t0: 20 }, 4).unwrap();
        PerturbedMap::new(base, sched, WiggleVariant::EntropyWiggle)
    }

    #[test]
    fn region_membership() {
        let m = surrogate();
        // Chart (1.28, 0) sits inside the n = 2 window.
        let p = disk_from_chart(0, Vec2::new(1.28, 0.0));
        assert_eq!(m.region_of(p), Some(RegionHit { n: 2, corner: 0 }));
        // Far from every window.
        let q = disk_from_chart(0, Vec2::new(0.5, 0.5));
        assert_eq!(m.region_of(q), None);
        // Symmetric copies carry the corner index.
        for corner in 1..4 {
            let pc = disk_from_chart(corner, Vec2::new(1.26, 0.0));
            assert_eq!(m.region_of(pc), Some(RegionHit { n: 2, corner }));
        }
        // n = 3 window.
        let e3 = m.schedule.entry(3).unwrap();
        let p3 = disk_from_chart(0, Vec2::new(e3.a + 0.3 * e3.ell, 0.0));
        assert_eq!(m.region_of(p3), Some(RegionHit { n: 3, corner: 0 }));
    }

    #[test]
    fn plateau_push_is_two_amplitudes() {
        let m = surrogate();
        let e = m.schedule.entry(2).unwrap();
        // x on an interior sine zero (phase = j pi), y = 0: cutoff is 1.
        let j = 20.0;
        let x = e.a + j * e.ell / e.wiggles as f64;
        let (d, _, _) = m.displacement(&e, x, 0.0);
        let expect = 2.0 * e.amplitude();
        assert!((d - expect).abs() < 1e-12 * expect, "push {d} vs {expect}");
    }

    #[test]
    fn push_is_upward_and_bounded() {
        let m = surrogate();
        let e = m.schedule.entry(2).unwrap();
        let cap = 3.0 * e.amplitude();
        for (u, v) in r2_sequence(5000) {
            let x = e.a + u * e.ell;
            let y = (2.0 * v - 1.0) * e.half_height();
            let (d, _, _) = m.displacement(&e, x, y);
            assert!(d >= 0.0, "downward push at ({x},{y})");
            assert!(d <= cap * (1.0 + 1e-12), "push too large at ({x},{y})");
        }
    }

    #[test]
    fn identity_off_support_is_exact() {
        let m = surrogate();
        for &(x, y) in &[(0.3, -0.2), (-0.45, -0.45), (1.1, 0.4), (-0.47, -0.499)] {
            let p = DiskPoint::new(x, y);
            if m.region_of(p).is_some() {
                continue;
            }
            assert_eq!(m.apply(p).unwrap(), m.base.f0(p).unwrap());
        }
        // Inside the window but on the vertical cutoff boundary the wiggle is
        // exactly the identity.
        let e = m.schedule.entry(2).unwrap();
        let p = disk_from_chart(0, Vec2::new(e.a + 0.5 * e.ell, e.half_height()));
        assert_eq!(m.wiggle(p), p);
    }

    #[test]
    fn displacement_derivatives_match_fd() {
        let m = surrogate();
        let e = m.schedule.entry(2).unwrap();
        let h = 1e-9;
        for &(u, v) in &[(0.2, 0.1), (0.5, -0.4), (0.013, 0.0), (0.987, 0.3)] {
            let x = e.a + u * e.ell;
            let y = v * e.half_height();
            let (_, d_x, d_y) = m.displacement(&e, x, y);
            let fd_x =
                (m.displacement(&e, x + h, y).0 - m.displacement(&e, x - h, y).0) / (2.0 * h);
            let fd_y =
                (m.displacement(&e, x, y + h).0 - m.displacement(&e, x, y - h).0) / (2.0 * h);
            assert!(
                (d_x - fd_x).abs() < 1e-5 * (1.0 + d_x.abs()),
                "d_x at ({u},{v})"
            );
            assert!(
                (d_y - fd_y).abs() < 1e-5 * (1.0 + d_y.abs()),
                "d_y at ({u},{v})"
            );
        }
    }

    #[test]
    fn wiggle_keeps_x_fixed() {
        let m = surrogate();
        let e = m.schedule.entry(2).unwrap();
        let x = e.a + 0.37 * e.ell;
        let (d, _, _) = m.displacement(&e, x, 0.0);
        assert!(d > 0.0);
        let p = disk_from_chart(0, Vec2::new(x, 0.0));
        let q = m.wiggle(p);
        let cq = chart_from_disk(0, q);
        assert!((cq.x - x).abs() < 1e-12, "x must be unchanged");
        assert!(cq.y > 0.0);
    }

    #[test]
    fn derivative_bound_needs_large_n0() {
        // At the surrogate n0 = 2, r = 1 the bound fails by the schedule
        // arithmetic itself (the sine slope alone is pi N Lambda^(-T)/l ~ 1.5
        // and Lambda times that exceeds 1); with n0 = 10 it holds.
        let m = surrogate();
        let rep = check_derivative_bound(&m, 2, 20_000).unwrap();
        assert!(rep.max_ratio > 1.0, "measured {}", rep.max_ratio);

        let base = BaseMap::new(Params::default());
        let sched = PerturbationSchedule::new(10, 1.0, ReturnTimes::Linear { t0: 7 }, 10).unwrap();
        let big = PerturbedMap::new(base, sched, WiggleVariant::EntropyWiggle);
        let rep = check_derivative_bound(&big, 10, 20_000).unwrap();
        assert!(rep.pass, "measured {}", rep.max_ratio);
    }

    #[test]
    fn exponent_wiggle_signs_and_plateau() {
        let base = BaseMap::new(Params::default());
        let sched = PerturbationSchedule::new(4, 1.0, ReturnTimes::Linear { t0: 20 }, 4).unwrap();
        let m = PerturbedMap::new(base, sched, WiggleVariant::ExponentWiggle);
        let e = m.schedule.entry(4).unwrap();
        let amp = (-(4.0f64.ln().powi(2))).exp();
        // Plateau point with cos = 1: x with 10 pi n^4 x at a multiple of 2 pi.
        let n4 = 256.0;
        let k = (5.0 * n4 * (e.a + 0.4 * e.ell)).ceil();
        let x = k / (5.0 * n4);
        assert!(x > e.a && x < e.b);
        let (d, _, _) = m.displacement(&e, x, 0.0);
        assert!((d - amp).abs() < 1e-9, "plateau push {d} vs {amp}");
        // Signed: both signs occur on a grid.
        let mut pos = false;
        let mut neg = false;
        for i in 0..200 {
            let xs = e.a + e.ell * i as f64 / 199.0;
            let (ds, _, _) = m.displacement(&e, xs, 0.0);
            pos |= ds > 0.0;
            neg |= ds < 0.0;
        }
        assert!(pos && neg, "cosine push must take both signs");
        // Cutoff-zero point.
        let (d, _, _) = m.displacement(&e, e.a, 0.0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn cr_trend_decreases() {
        let m = surrogate();
        let rows = cr_distance_trend(&m);
        assert_eq!(rows.len(), 3);
        // Order-0 maximum is the displacement bound 3 Lambda^(-T_n).
        for row in &rows {
            let e = m.schedule.entry(row.n).unwrap();
            assert!(row.order_max[0] <= 3.0 * e.amplitude() * (1.0 + 1e-9));
        }
        for w in rows.windows(2) {
            assert!(
                w[1].proxy < w[0].proxy,
                "proxy must decrease: {} then {}",
                w[0].proxy,
                w[1].proxy
            );
        }
    }

    #[test]
    fn perturbed_tangent_matches_fd() {
        let m = surrogate();
        let e = m.schedule.entry(2).unwrap();
        let p = disk_from_chart(0, Vec2::new(e.a + 0.31 * e.ell, 0.2 * e.half_height()));
        let v = Vec2::new(0.6, 0.8);
        let (_, w) = m.apply_with_tangent(p, v).unwrap();
        let h = 1e-8;
        let a = m
            .apply(DiskPoint::new(p.x + h * v.x, p.y + h * v.y))
            .unwrap();
        let b = m
            .apply(DiskPoint::new(p.x - h * v.x, p.y - h * v.y))
            .unwrap();
        let fd = Vec2::new((a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h));
        let rel = fd.sub(w).norm() / w.norm();
        assert!(rel < 1e-5, "tangent mismatch rel = {rel}");
    }
}
