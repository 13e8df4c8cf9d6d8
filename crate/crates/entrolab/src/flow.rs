//! Time-1 map of the field, its tangent map, and the transit measurements.
//!
//! The integrator is a fixed-step classical Runge-Kutta scheme (256 substeps
//! per unit time by default, so runs are bit-reproducible), with an optional
//! step-halving mode that refines until two successive answers agree to the
//! requested tolerance. The tangent map integrates the variational equation
//! alongside the base point.

use crate::field::field;
use crate::geometry::{chart_from_disk, corner_of, DiskPoint, Vec2, CHART_SCALE};
use crate::params::Params;
use crate::{Error, Result};
use serde::Serialize;

/// Fixed-step integrator settings.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Integrator {
    /// Substeps per unit time in fixed mode (the default 256 gives local
    /// error well under 1e-9 per unit time on the affine regions).
    pub substeps: u32,
    /// Agreement tolerance for the adaptive mode.
    pub tol: f64,
    /// When set, halve the step until two successive answers agree to `tol`.
    pub adaptive: bool,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            substeps: 256,
            tol: 1e-9,
            adaptive: false,
        }
    }
}

/// Maps of the disk that carry tangent vectors.
pub trait PlanarMap {
    fn apply(&self, p: DiskPoint) -> Result<DiskPoint>;
    fn apply_with_tangent(&self, p: DiskPoint, v: Vec2) -> Result<(DiskPoint, Vec2)>;
    fn params(&self) -> &Params;
}

/// The homoclinic base map: time-1 flow of the field.
#[derive(Debug, Clone)]
pub struct BaseMap {
    pub params: Params,
    pub integrator: Integrator,
}

impl BaseMap {
    pub fn new(params: Params) -> Self {
        Self {
            params,
            integrator: Integrator::default(),
        }
    }

    fn rk4_span(&self, p: DiskPoint, t: f64, n: u32) -> DiskPoint {
        let h = t / n as f64;
        let mut q = p;
        for _ in 0..n {
            let k1 = field(q, &self.params).v;
            let k2 = field(q.offset(k1.scale(0.5 * h)), &self.params).v;
            let k3 = field(q.offset(k2.scale(0.5 * h)), &self.params).v;
            let k4 = field(q.offset(k3.scale(h)), &self.params).v;
            let inc = k1.add(k2.scale(2.0)).add(k3.scale(2.0)).add(k4).scale(h / 6.0);
            q = q.offset(inc);
        }
        q
    }

    fn rk4_span_tangent(&self, p: DiskPoint, v: Vec2, t: f64, n: u32) -> (DiskPoint, Vec2) {
        let h = t / n as f64;
        let mut q = p;
        let mut w = v;
        for _ in 0..n {
            let s1 = field(q, &self.params);
            let l1 = s1.jac.apply(w);
            let q2 = q.offset(s1.v.scale(0.5 * h));
            let s2 = field(q2, &self.params);
            let l2 = s2.jac.apply(w.add(l1.scale(0.5 * h)));
            let q3 = q.offset(s2.v.scale(0.5 * h));
            let s3 = field(q3, &self.params);
            let l3 = s3.jac.apply(w.add(l2.scale(0.5 * h)));
            let q4 = q.offset(s3.v.scale(h));
            let s4 = field(q4, &self.params);
            let l4 = s4.jac.apply(w.add(l3.scale(h)));
            let inc = s1.v.add(s2.v.scale(2.0)).add(s3.v.scale(2.0)).add(s4.v).scale(h / 6.0);
            let vin = l1.add(l2.scale(2.0)).add(l3.scale(2.0)).add(l4).scale(h / 6.0);
            q = q.offset(inc);
            w = w.add(vin);
        }
        (q, w)
    }

    /// Flow the point for time `t`.
    pub fn flow(&self, p: DiskPoint, t: f64) -> Result<DiskPoint> {
        if !p.in_disk() {
            return Err(Error::OutOfDomain(p.x, p.y));
        }
        if t == 0.0 {
            return Ok(p);
        }
        let base_n = (self.integrator.substeps as f64 * t.abs()).ceil().max(1.0) as u32;
        let mut q = self.rk4_span(p, t, base_n);
        if self.integrator.adaptive {
            let mut n = base_n;
            loop {
                let n2 = n.checked_mul(2).ok_or(Error::StepUnderflow)?;
                if (n2 as f64 * t.abs().recip()).is_infinite() {
                    return Err(Error::StepUnderflow);
                }
                let q2 = self.rk4_span(p, t, n2);
                if q.dist(q2) < self.integrator.tol {
                    q = q2;
                    break;
                }
                if n2 > 1 << 22 {
                    return Err(Error::StepUnderflow);
                }
                q = q2;
                n = n2;
            }
        }
        if !q.in_disk() {
            return Err(Error::OutOfDomain(q.x, q.y));
        }
        Ok(q)
    }

    /// Time-1 map.
    pub fn f0(&self, p: DiskPoint) -> Result<DiskPoint> {
        self.flow(p, 1.0)
    }

    /// Time-1 map together with its derivative applied to `v`.
    pub fn df0(&self, p: DiskPoint, v: Vec2) -> Result<(DiskPoint, Vec2)> {
        if !p.in_disk() {
            return Err(Error::OutOfDomain(p.x, p.y));
        }
        let (q, w) = self.rk4_span_tangent(p, v, 1.0, self.integrator.substeps);
        if !q.in_disk() {
            return Err(Error::OutOfDomain(q.x, q.y));
        }
        Ok((q, w))
    }
}

impl PlanarMap for BaseMap {
    fn apply(&self, p: DiskPoint) -> Result<DiskPoint> {
        self.f0(p)
    }

    fn apply_with_tangent(&self, p: DiskPoint, v: Vec2) -> Result<(DiskPoint, Vec2)> {
        self.df0(p, v)
    }

    fn params(&self) -> &Params {
        &self.params
    }
}

/// First-entry time of the iterated map into the corner square of the given
/// index. Errors when the budget is exhausted, which signals a parameter
/// regime where the transit estimates do not apply.
pub fn transition_time<M: PlanarMap>(
    map: &M,
    p: DiskPoint,
    target_corner: usize,
    budget: u32,
) -> Result<(u32, DiskPoint)> {
    let mut q = p;
    for n in 1..=budget {
        q = map.apply(q)?;
        if corner_of(q) == Some(target_corner) {
            return Ok((n, q));
        }
    }
    Err(Error::IterationBudget(budget))
}

/// Result of the corner-to-corner contraction measurement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ContractionCheck {
    pub x1: f64,
    pub steps: u32,
    /// Ratio of the arrival expanding offset to the departure transverse
    /// offset; below 1 means the loop contracts toward the skeleton.
    pub ratio: f64,
    pub pass: bool,
}

/// Follow a point that has just left the corner square, with transverse
/// offset `x1`, to its entry into the next corner and compare offsets.
pub fn check_contraction(map: &BaseMap, x1: f64, budget: u32) -> Result<ContractionCheck> {
    if !(x1 > 0.0 && x1 <= 1.0 / 12.0) {
        return Err(Error::InvalidParam(format!("x1 = {x1} outside (0, 1/12]")));
    }
    let seed = DiskPoint::new(-0.5 + x1, -0.41);
    let (steps, arrival) = transition_time(map, seed, 1, budget)?;
    let arr_offset = chart_from_disk(1, arrival).y / CHART_SCALE;
    let ratio = arr_offset / x1;
    Ok(ContractionCheck {
        x1,
        steps,
        ratio,
        pass: ratio < 1.0,
    })
}

/// Trapping measurement: iterate seeds from the square minus the central
/// square and report the first step after which every orbit stays outside
/// `[-5/12, 5/12]^2`, plus whether distances to the square boundary shrink.
#[derive(Debug, Clone, Serialize)]
pub struct TrappingReport {
    pub k0: Option<u32>,
    pub horizon: u32,
    pub final_max_boundary_dist: f64,
    pub monotone_after_k0: bool,
}

pub fn trapping_scan(map: &BaseMap, seeds: &[DiskPoint], horizon: u32) -> Result<TrappingReport> {
    let inner = 5.0 / 12.0;
    let mut orbits: Vec<DiskPoint> = seeds.to_vec();
    let mut last_inside = None;
    let mut dist_hist: Vec<f64> = Vec::with_capacity(horizon as usize);
    for k in 0..horizon {
        let mut max_dist: f64 = 0.0;
        for q in orbits.iter_mut() {
            *q = map.apply(*q)?;
            if q.sup_norm() <= inner {
                last_inside = Some(k);
            }
            max_dist = max_dist.max((0.5 - q.sup_norm()).abs());
        }
        dist_hist.push(max_dist);
    }
    let k0 = match last_inside {
        None => Some(0),
        Some(k) if k + 1 < horizon => Some(k + 1),
        Some(_) => None,
    };
    let monotone_after_k0 = match k0 {
        Some(k) => {
            let tail = &dist_hist[k as usize..];
            tail.windows(2).all(|w| w[1] <= w[0] + 1e-12)
        }
        None => false,
    };
    Ok(TrappingReport {
        k0,
        horizon,
        final_max_boundary_dist: *dist_hist.last().unwrap_or(&f64::NAN),
        monotone_after_k0,
    })
}
