//! Bump and cutoff profiles, and the wiggle parameter schedule.
//!
//! Everything downstream (the vector field, the perturbations, the cutoff
//! windows) is assembled from three scalar profiles:
//!
//! * `bump` — nonincreasing, exactly 1 on `t <= 0` and exactly 0 on `t >= 1`;
//! * `flat_cutoff` — nondecreasing mirror image, flat to all orders at 0;
//! * `plateau_cutoff` — even window, 1 on `|t| <= 1/2`, 0 on `|t| >= 1`.
//!
//! All three are mollifier quotients of `theta(s) = exp(-1/s)`, so the
//! plateau values are bit-exact, not approximate.

use crate::{Error, Result};

/// `exp(-1/s)` for `s > 0`, exactly 0 otherwise.
#[inline]
pub fn theta(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Derivative of [`theta`]: `theta(s)/s^2` for `s > 0`, 0 otherwise.
#[inline]
pub fn theta_deriv(s: f64) -> f64 {
    if s > 0.0 {
        theta(s) / (s * s)
    } else {
        0.0
    }
}

/// Nonincreasing bump `psi`: exactly 1 for `t <= 0`, exactly 0 for `t >= 1`.
#[inline]
pub fn bump(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = theta(1.0 - t);
        a / (a + theta(t))
    }
}

/// Derivative of [`bump`]; exactly 0 on both plateaus.
#[inline]
pub fn bump_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        let a = theta(1.0 - t);
        let b = theta(t);
        let da = -theta_deriv(1.0 - t);
        let db = theta_deriv(t);
        let denom = a + b;
        (da * b - a * db) / (denom * denom)
    }
}

/// Nondecreasing cutoff `alpha = 1 - bump`: exactly 0 for `t <= 0`, 1 for `t >= 1`.
///
/// Near 0 it behaves like `e * exp(-1/t)`, so `|alpha'| / alpha^(1-1/r) -> 0`
/// as `t -> 0+` for every finite `r >= 1`.
#[inline]
pub fn flat_cutoff(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let b = theta(t);
        b / (b + theta(1.0 - t))
    }
}

/// Derivative of [`flat_cutoff`]; exactly 0 on both plateaus.
#[inline]
pub fn flat_cutoff_deriv(t: f64) -> f64 {
    -bump_deriv(t)
}

/// `ln alpha(t)` for `t` in `(0,1)`, computed without underflow.
pub fn ln_flat_cutoff(t: f64) -> f64 {
    assert!(t > 0.0 && t < 1.0);
    // ln alpha = -1/t - ln(exp(-1/t) + exp(-1/(1-t))), stabilized.
    let u = -1.0 / t;
    let v = -1.0 / (1.0 - t);
    let m = u.max(v);
    u - (m + ((u - m).exp() + (v - m).exp()).ln())
}

/// `ln |alpha'(t)|` for `t` in `(0,1)`, computed without underflow.
pub fn ln_flat_cutoff_deriv(t: f64) -> f64 {
    assert!(t > 0.0 && t < 1.0);
    // alpha' = (theta'(t) theta(1-t) + theta(t) theta'(1-t)) / (theta+theta)^2
    //        = theta(t) theta(1-t) (1/t^2 + 1/(1-t)^2) / (...)^2.
    let u = -1.0 / t;
    let v = -1.0 / (1.0 - t);
    let m = u.max(v);
    let ln_denom = m + ((u - m).exp() + (v - m).exp()).ln();
    let poly = 1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t));
    u + v + poly.ln() - 2.0 * ln_denom
}

/// Log of the `o(alpha^(1-1/r))` ratio `|alpha'(t)| / alpha(t)^(1-1/r)`.
pub fn ln_flatness_ratio(t: f64, r: f64) -> Result<f64> {
    if r < 1.0 {
        return Err(Error::InvalidParam(format!("smoothness order r = {r} < 1")));
    }
    Ok(ln_flat_cutoff_deriv(t) - (1.0 - 1.0 / r) * ln_flat_cutoff(t))
}

/// Even plateau window `beta(t) = bump(2|t| - 1)`.
#[inline]
pub fn plateau_cutoff(t: f64) -> f64 {
    bump(2.0 * t.abs() - 1.0)
}

/// Derivative of [`plateau_cutoff`]; exactly 0 on plateaus and at `t = 0`.
#[inline]
pub fn plateau_cutoff_deriv(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        2.0 * t.signum() * bump_deriv(2.0 * t.abs() - 1.0)
    }
}

/// Expansion factor of the corner maps; fixed to 6/5 throughout.
pub const CAP_LAMBDA: f64 = 6.0 / 5.0;

/// How `T_n` is produced from `n`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub enum ReturnTimes {
    /// `T_n = t0 * n`.
    Linear { t0: u32 },
    /// Explicit table; must cover every scheduled `n` and be strictly increasing.
    Explicit(Vec<(u32, u32)>),
}

impl ReturnTimes {
    fn lookup(&self, n: u32) -> Result<u32> {
        match self {
            ReturnTimes::Linear { t0 } => Ok(t0 * n),
            ReturnTimes::Explicit(table) => table
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, t)| *t)
                .ok_or_else(|| Error::InvalidParam(format!("no T_n entry for n = {n}"))),
        }
    }
}

/// One resolved row of the schedule: the wiggle window of index `n`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ScheduleEntry {
    pub n: u32,
    /// Left edge `a_n = 1 + 1/n^2` of the support interval (chart coordinates).
    pub a: f64,
    /// Right edge `b_n = a_n + 1/n^4`.
    pub b: f64,
    /// Interval length `l_n = 1/n^4`.
    pub ell: f64,
    /// Return-time parameter `T_n`.
    pub t: u32,
    /// Wiggle count `N_n = floor(Lambda^(T_n/r) / n^5)`.
    pub wiggles: u64,
}

impl ScheduleEntry {
    /// Vertical half-width `l_n / N_n` of the support rectangle.
    pub fn half_height(&self) -> f64 {
        self.ell / self.wiggles as f64
    }

    /// Wiggle amplitude scale `Lambda^(-T_n)`.
    pub fn amplitude(&self) -> f64 {
        CAP_LAMBDA.powi(-(self.t as i32))
    }
}

/// Parameter schedule for the wiggle family: `n0`, smoothness order `r`,
/// the `T_n` rule, and the finite truncation `n_max`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PerturbationSchedule {
    pub n0: u32,
    pub r: f64,
    pub times: ReturnTimes,
    pub n_max: u32,
}

impl PerturbationSchedule {
    pub fn new(n0: u32, r: f64, times: ReturnTimes, n_max: u32) -> Result<Self> {
        if n0 < 2 {
            return Err(Error::InvalidParam(format!("n0 = {n0} < 2")));
        }
        if r < 1.0 {
            return Err(Error::InvalidParam(format!("r = {r} < 1")));
        }
        if n_max < n0 {
            return Err(Error::InvalidParam(format!("n_max = {n_max} < n0 = {n0}")));
        }
        let sched = Self { n0, r, times, n_max };
        // Validate every scheduled row now: N_n >= 2, T_n strictly increasing,
        // and pairwise disjoint support rectangles.
        let mut prev: Option<ScheduleEntry> = None;
        for n in n0..=n_max {
            let e = sched.entry(n)?;
            if let Some(p) = &prev {
                if e.t <= p.t {
                    return Err(Error::ScheduleRejected {
                        n,
                        reason: format!("T_{n} = {} not greater than T_{} = {}", e.t, p.n, p.t),
                    });
                }
                if e.b >= p.a {
                    return Err(Error::ScheduleRejected {
                        n,
                        reason: format!("support [{}, {}] overlaps previous window", e.a, e.b),
                    });
                }
            }
            prev = Some(e);
        }
        Ok(sched)
    }

    /// Resolve the window for index `n` (must satisfy `n >= n0`).
    pub fn entry(&self, n: u32) -> Result<ScheduleEntry> {
        if n < self.n0 {
            return Err(Error::InvalidParam(format!("n = {n} below n0 = {}", self.n0)));
        }
        let nf = n as f64;
        let a = 1.0 + 1.0 / (nf * nf);
        let ell = 1.0 / (nf * nf * nf * nf);
        let t = self.times.lookup(n)?;
        let growth = CAP_LAMBDA.powf(t as f64 / self.r);
        let wiggles = (growth / nf.powi(5)).floor();
        if !wiggles.is_finite() || wiggles < 2.0 {
            return Err(Error::ScheduleRejected {
                n,
                reason: format!("N_n = floor(Lambda^(T/r)/n^5) = {wiggles} < 2"),
            });
        }
        Ok(ScheduleEntry {
            n,
            a,
            b: a + ell,
            ell,
            t,
            wiggles: wiggles as u64,
        })
    }

    /// All scheduled entries `n0 ..= n_max`.
    pub fn entries(&self) -> Vec<ScheduleEntry> {
        (self.n0..=self.n_max)
            .map(|n| self.entry(n).expect("validated at construction"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_plateaus_are_exact() {
        assert_eq!(bump(-3.0), 1.0);
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(2.0), 0.0);
        assert_eq!(flat_cutoff(-1.0), 0.0);
        assert_eq!(flat_cutoff(5.0), 1.0);
        assert_eq!(plateau_cutoff(0.3), 1.0);
        assert_eq!(plateau_cutoff(-0.5), 1.0);
        assert_eq!(plateau_cutoff(-1.5), 0.0);
        assert_eq!(plateau_cutoff(1.0), 0.0);
    }

    #[test]
    fn bump_midpoint_is_half() {
        // theta(1/2) on both sides of the quotient.
        assert!((bump(0.5) - 0.5).abs() < 1e-15);
        assert!((plateau_cutoff(0.75) - 0.5).abs() < 1e-15);
        assert_eq!(plateau_cutoff(0.75), plateau_cutoff(-0.75));
    }

    #[test]
    fn bump_monotone_and_interior() {
        let mut prev = 1.0;
        for i in 1..200 {
            let t = i as f64 / 200.0;
            let v = bump(t);
            // Strict interior values are only resolvable away from the
            // plateau ends, where the quotient rounds to 0 or 1.
            if (0.05..=0.95).contains(&t) {
                assert!(v > 0.0 && v < 1.0, "interior value at t={t}");
            }
            assert!(v <= prev, "nonincreasing at t={t}");
            prev = v;
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for &t in &[0.1, 0.25, 0.5, 0.77, 0.9] {
            let fd = (bump(t + h) - bump(t - h)) / (2.0 * h);
            assert!((bump_deriv(t) - fd).abs() < 1e-6 * (1.0 + fd.abs()));
            let fd = (flat_cutoff(t + h) - flat_cutoff(t - h)) / (2.0 * h);
            assert!((flat_cutoff_deriv(t) - fd).abs() < 1e-6 * (1.0 + fd.abs()));
        }
        for &t in &[-0.9, -0.6, 0.6, 0.9] {
            let fd = (plateau_cutoff(t + h) - plateau_cutoff(t - h)) / (2.0 * h);
            assert!((plateau_cutoff_deriv(t) - fd).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn symmetric_differences_flat_at_plateau_ends() {
        // 4th-order symmetric differences stay bounded across t = 0 and t = 1
        // and shrink as the stencil approaches the plateau from outside.
        let h = 0.05;
        let d4 = |t: f64| {
            (bump(t - 2.0 * h) - 4.0 * bump(t - h) + 6.0 * bump(t) - 4.0 * bump(t + h)
                + bump(t + 2.0 * h))
                / h.powi(4)
        };
        for &t in &[0.0, 1.0] {
            assert!(d4(t).abs() < 100.0, "4th difference blows up at {t}");
        }
        // Flatness: with the stencil fully inside [-0.2, 0.05] the plateau
        // dominates and the difference is tiny.
        assert!(d4(-0.05).abs() < 1e-2);
        assert!(d4(1.05).abs() < 1e-2);
    }

    #[test]
    fn flatness_ratio_decreases_to_zero() {
        // |alpha'| / alpha^(1-1/r) -> 0 as t -> 0+, checked in log space on a
        // log-spaced grid for several r.
        for &r in &[1.0, 1.5, 2.0, 3.0, 5.0] {
            let mut prev = f64::INFINITY;
            for &t in &[1e-1, 1e-2, 1e-3, 1e-4] {
                let lr = ln_flatness_ratio(t, r).unwrap();
                assert!(lr < prev, "ratio not decreasing at t={t}, r={r}");
                prev = lr;
            }
            assert!(prev < -100.0, "ratio not tending to 0 for r={r}");
        }
        assert!(ln_flatness_ratio(0.5, 0.5).is_err());
    }

    #[test]
    fn flatness_ratio_fd_oracle_at_representable_scale() {
        // Same ratio via raw finite differences where nothing underflows.
        let r = 2.0;
        let h = 1e-7;
        for &t in &[0.2, 0.35, 0.5] {
            let fd = (flat_cutoff(t + h) - flat_cutoff(t - h)) / (2.0 * h);
            let direct = fd.abs() / flat_cutoff(t).powf(1.0 - 1.0 / r);
            let via_log = ln_flatness_ratio(t, r).unwrap().exp();
            assert!((direct - via_log).abs() < 1e-5 * direct);
        }
    }

    #[test]
    fn schedule_surrogate_row_matches_exact_arithmetic() {
        // N_2 = floor(1.2^40 / 32) checked against exact integer arithmetic:
        // floor(6^40 / (5^40 * 32)) = 45.
        let num = 6u128.pow(40);
        let den = 5u128.pow(40) * 32;
        assert_eq!(num / den, 45);

        let sched =
            PerturbationSchedule::new(2, 1.0, ReturnTimes::Linear { t0: 20 }, 8).unwrap();
        let e = sched.entry(2).unwrap();
        assert_eq!(e.t, 40);
        assert_eq!(e.wiggles, 45);
        assert_eq!(e.a, 1.25);
        assert_eq!(e.ell, 0.0625);
        assert_eq!(e.b, 1.3125);
    }

    #[test]
    fn schedule_rejects_small_wiggle_count() {
        // r = 2 halves the exponent: floor(1.2^20 / 32) = 1 < 2.
        let err = PerturbationSchedule::new(
            2,
            2.0,
            ReturnTimes::Explicit(vec![(2, 40)]),
            2,
        )
        .unwrap_err();
        match err {
            Error::ScheduleRejected { n, .. } => assert_eq!(n, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn schedule_entries_are_disjoint_and_deterministic() {
        let sched =
            PerturbationSchedule::new(2, 1.0, ReturnTimes::Linear { t0: 20 }, 8).unwrap();
        let rows = sched.entries();
        for w in rows.windows(2) {
            assert!(w[1].b < w[0].a, "windows must be pairwise disjoint");
        }
        let again = sched.entries();
        for (a, b) in rows.iter().zip(again.iter()) {
            assert_eq!(a, b);
        }
        assert!(sched.entry(1).is_err());
    }
}
