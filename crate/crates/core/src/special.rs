//! The complementary error function and the fourth Painlevé transcendent.
//!
//! P4 is taken in the form
//! f'' = f'²/(2f) + (3/2)f³ + 4zf² + 2(z² − α)f + β/f.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jet::Jet2;

const TWO_OVER_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;
const DENOM_EPS: f64 = 1e-12;
const ESCAPE: f64 = 1e6;
const ZERO_GUARD: f64 = 1e-8;

/// erfc(z) = (2/√π) ∫_z^∞ e^{-t²} dt.
pub fn erfc(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z.abs() <= 2.0 {
        1.0 - erf_series(z)
    } else if z > 0.0 {
        erfc_cf(z)
    } else {
        2.0 - erfc_cf(-z)
    }
}

/// erf via the all-positive series (2/√π) e^{-z²} Σ 2ⁿ z^{2n+1} / (2n+1)!!.
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * z2 / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    TWO_OVER_SQRT_PI * (-z2).exp() * sum
}

/// Continued fraction erfc(z) = e^{-z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …)))), z > 0.
fn erfc_cf(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = z;
    let mut c = f;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = n as f64 * 0.5;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / (PI.sqrt() * f)
}

fn erfc_jet(j: Jet2) -> Jet2 {
    let g = (-j.v * j.v).exp();
    j.compose(erfc(j.v), -TWO_OVER_SQRT_PI * g, 2.0 * TWO_OVER_SQRT_PI * j.v * g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P4Params {
    pub alpha: f64,
    pub beta: f64,
}

impl P4Params {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }
}

/// Rational entries of the catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rational {
    /// α = 5, β = −8: 4z(2z²−1)(2z²+3) / ((2z²+1)(4z⁴+3)).
    A,
    /// α = 0, β = −2/9: −2z/3.
    B,
    /// α = −1, β = −32/9: −2z/3 − (2z²−3)/(z(2z²+3)). Simple pole at z = 0.
    C,
}

impl Rational {
    pub fn params(self) -> P4Params {
        match self {
            Rational::A => P4Params::new(5.0, -8.0),
            Rational::B => P4Params::new(0.0, -2.0 / 9.0),
            Rational::C => P4Params::new(-1.0, -32.0 / 9.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum P4Kind {
    Rational(Rational),
    /// f = −2z − Ψ, Ψ = 2t e^{-z²} / (√π (1 − t erfc z)), at α = 0, β = −2.
    Erfc {
        t: f64,
    },
    Integrated(Trajectory),
}

#[derive(Debug, Clone, PartialEq)]
pub struct P4Solution {
    pub params: P4Params,
    pub kind: P4Kind,
}

impl P4Solution {
    pub fn rational(r: Rational) -> Self {
        Self { params: r.params(), kind: P4Kind::Rational(r) }
    }

    /// The erfc family is regular on the real line only for t < 1/2.
    pub fn erfc_family(t: f64) -> Result<Self> {
        if !(t < 0.5) || !t.is_finite() {
            return Err(Error::Config(alloc::format!("erfc family needs t < 1/2, got {t}")));
        }
        Ok(Self { params: P4Params::new(0.0, -2.0), kind: P4Kind::Erfc { t } })
    }

    /// Real poles of f, if known in closed form.
    pub fn poles(&self) -> &'static [f64] {
        match self.kind {
            P4Kind::Rational(Rational::C) => &[0.0],
            _ => &[],
        }
    }

    /// (f, f', f'') at z.
    pub fn jet(&self, z: f64) -> Result<Jet2> {
        let x = Jet2::var(z);
        match &self.kind {
            P4Kind::Rational(Rational::A) => {
                let z2 = x * x;
                let den = (2.0 * z2 + 1.0) * (4.0 * z2 * z2 + 3.0);
                if den.v.abs() < DENOM_EPS {
                    return Err(Error::Pole { z });
                }
                Ok(4.0 * x * (2.0 * z2 - 1.0) * (2.0 * z2 + 3.0) / den)
            }
            P4Kind::Rational(Rational::B) => Ok(x.scale(-2.0 / 3.0)),
            P4Kind::Rational(Rational::C) => {
                let z2 = x * x;
                let den = x * (2.0 * z2 + 3.0);
                if den.v.abs() < DENOM_EPS {
                    return Err(Error::Pole { z });
                }
                Ok(x.scale(-2.0 / 3.0) - (2.0 * z2 - 3.0) / den)
            }
            P4Kind::Erfc { t } => {
                let psi = erfc_psi(x, *t).ok_or(Error::Domain { what: "1 - t erfc(z) is not positive", z })?;
                Ok(x.scale(-2.0) - psi)
            }
            P4Kind::Integrated(tr) => {
                let (f, fp) = tr.eval(z)?;
                Ok(Jet2::new(f, fp, p4_rhs(f, fp, z, self.params)))
            }
        }
    }

    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        let j = self.jet(z)?;
        Ok((j.v, j.d1))
    }
}

fn erfc_psi(x: Jet2, t: f64) -> Option<Jet2> {
    let den = 1.0 - erfc_jet(x).scale(t);
    if !(den.v > DENOM_EPS) {
        return None;
    }
    Some((-x * x).exp().scale(t * TWO_OVER_SQRT_PI) / den)
}

pub fn p4_eval(sol: &P4Solution, z: f64) -> Result<(f64, f64)> {
    sol.eval(z)
}

/// Right-hand side of P4 solved for f''.
pub fn p4_rhs(f: f64, fp: f64, z: f64, p: P4Params) -> f64 {
    (fp * fp + 2.0 * p.beta) / (2.0 * f) + 1.5 * f * f * f + 4.0 * z * f * f + 2.0 * (z * z - p.alpha) * f
}

/// f'' minus the P4 right-hand side.
pub fn p4_residual(f: f64, fp: f64, fpp: f64, z: f64, params: P4Params) -> Result<f64> {
    if f.abs() < DENOM_EPS {
        return Err(Error::Domain { what: "f vanishes in the residual", z });
    }
    Ok(fpp - p4_rhs(f, fp, z, params))
}

/// One accepted Dormand–Prince step with its dense-output coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    z0: f64,
    h: f64,
    r: [[f64; 2]; 5],
}

impl Segment {
    fn eval(&self, z: f64) -> (f64, f64) {
        let th = (z - self.z0) / self.h;
        let th1 = 1.0 - th;
        let y = |i: usize| {
            let r = &self.r;
            r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])))
        };
        (y(0), y(1))
    }

    fn covers(&self, z: f64) -> bool {
        let (a, b) = (self.z0, self.z0 + self.h);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        z >= lo && z <= hi
    }
}

/// Dense output of an integration, on both sides of the initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub z0: f64,
    pub y0: (f64, f64),
    forward: Vec<Segment>,
    backward: Vec<Segment>,
}

impl Trajectory {
    /// Closed interval on which the solution is available.
    pub fn range(&self) -> (f64, f64) {
        let hi = self.forward.last().map_or(self.z0, |s| s.z0 + s.h);
        let lo = self.backward.last().map_or(self.z0, |s| s.z0 + s.h);
        (lo, hi)
    }

    pub fn steps(&self) -> usize {
        self.forward.len() + self.backward.len()
    }

    pub fn eval(&self, z: f64) -> Result<(f64, f64)> {
        if z == self.z0 {
            return Ok(self.y0);
        }
        let segs = if z > self.z0 { &self.forward } else { &self.backward };
        // segments are ordered away from z0; find the first that covers z
        let idx = segs.partition_point(|s| far_side(s, self.z0, z));
        match segs.get(idx) {
            Some(s) if s.covers(z) => Ok(s.eval(z)),
            _ => Err(Error::Domain { what: "outside the integrated range", z }),
        }
    }
}

fn far_side(s: &Segment, z0: f64, z: f64) -> bool {
    let end = s.z0 + s.h;
    (end - z0).abs() < (z - z0).abs()
}

/// Integration stopped early; `partial` holds everything computed before the halt.
#[derive(Debug, Clone, PartialEq)]
pub struct Halted {
    pub reason: Error,
    pub partial: P4Solution,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

fn deriv(z: f64, y: [f64; 2], p: P4Params) -> [f64; 2] {
    [y[1], p4_rhs(y[0], y[1], z, p)]
}

struct Sweep {
    segs: Vec<Segment>,
    halt: Option<Error>,
}

fn sweep(p: P4Params, z0: f64, y0: [f64; 2], z_end: f64, tol: f64) -> Sweep {
    let mut segs = Vec::new();
    let dir = if z_end >= z0 { 1.0 } else { -1.0 };
    let span = (z_end - z0).abs();
    if span == 0.0 {
        return Sweep { segs, halt: None };
    }
    let mut z = z0;
    let mut y = y0;
    let mut h = dir * span.min(1e-2);
    let mut k1 = deriv(z, y, p);
    let h_min = 1e-13 * (1.0 + z0.abs().max(z_end.abs()));
    while (z_end - z) * dir > 0.0 {
        if (z + h - z_end) * dir > 0.0 {
            h = z_end - z;
        }
        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                ys[0] += h * A[s][j] * kj[0];
                ys[1] += h * A[s][j] * kj[1];
            }
            k[s] = deriv(z + C[s] * h, ys, p);
        }
        let mut y1 = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            y1[0] += h * A[6][j] * kj[0];
            y1[1] += h * A[6][j] * kj[1];
        }
        let mut err = 0.0;
        for i in 0..2 {
            let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
            let sc = tol + tol * y[i].abs().max(y1[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / 2.0).sqrt();
        let finite = y1.iter().chain(k.iter().flatten()).all(|v| v.is_finite());
        if !finite || err > 1.0 {
            let fac = if finite { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.1 };
            h *= fac;
            if h.abs() < h_min {
                let reason = if y[0].abs() > 1.0 { Error::PoleEscape { z } } else { Error::ZeroCrossing { z } };
                return Sweep { segs, halt: Some(reason) };
            }
            continue;
        }
        let mut r = [[0.0; 2]; 5];
        for i in 0..2 {
            let dy = y1[i] - y[i];
            let bspl = h * k[0][i] - dy;
            r[0][i] = y[i];
            r[1][i] = dy;
            r[2][i] = bspl;
            r[3][i] = dy - h * k[6][i] - bspl;
            r[4][i] = h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>();
        }
        let seg = Segment { z0: z, h, r };
        if y[0] * y1[0] <= 0.0 || y1[0].abs() < ZERO_GUARD {
            let zc = locate_zero(&seg, y[0]);
            return Sweep { segs, halt: Some(Error::ZeroCrossing { z: zc }) };
        }
        segs.push(seg);
        z += h;
        y = y1;
        k1 = k[6];
        if y[0].abs() > ESCAPE {
            return Sweep { segs, halt: Some(Error::PoleEscape { z }) };
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Sweep { segs, halt: None }
}

fn locate_zero(seg: &Segment, f0: f64) -> f64 {
    let (mut a, mut b) = (seg.z0, seg.z0 + seg.h);
    if seg.eval(b).0 * f0 > 0.0 {
        return b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if seg.eval(m).0 * f0 > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Integrates P4 from (z0, f0, f0') over the hull of `z_targets`, in both
/// directions when needed. `tol` bounds the local error per step.
pub fn p4_integrate(
    params: P4Params,
    z0: f64,
    f0: f64,
    f0prime: f64,
    z_targets: &[f64],
    tol: f64,
) -> core::result::Result<P4Solution, Halted> {
    let mut tr = Trajectory { z0, y0: (f0, f0prime), forward: Vec::new(), backward: Vec::new() };
    let wrap = |tr: Trajectory| P4Solution { params, kind: P4Kind::Integrated(tr) };
    if !(tol > 0.0) {
        return Err(Halted {
            reason: Error::Config(alloc::format!("tolerance must be positive, got {tol}")),
            partial: wrap(tr),
        });
    }
    if f0.abs() < ZERO_GUARD {
        return Err(Halted { reason: Error::ZeroCrossing { z: z0 }, partial: wrap(tr) });
    }
    let hi = z_targets.iter().copied().fold(z0, f64::max);
    let lo = z_targets.iter().copied().fold(z0, f64::min);
    let fwd = sweep(params, z0, [f0, f0prime], hi, tol);
    tr.forward = fwd.segs;
    if let Some(reason) = fwd.halt {
        return Err(Halted { reason, partial: wrap(tr) });
    }
    let bwd = sweep(params, z0, [f0, f0prime], lo, tol);
    tr.backward = bwd.segs;
    if let Some(reason) = bwd.halt {
        return Err(Halted { reason, partial: wrap(tr) });
    }
    Ok(wrap(tr))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_fixed_points() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(1.0) - 0.157_299_207_050_285_1).abs() < 1e-15);
        assert!((erfc(-0.7) - (2.0 - erfc(0.7))).abs() < 1e-15);
        assert!(erfc(30.0) == 0.0);
        assert!((erfc(-30.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn erfc_branches_agree_at_the_switch() {
        // continued fraction evaluated just inside the series region
        let z = 2.0;
        let rel = (erf_series_complement(z) - erfc_cf(z)).abs() / erfc_cf(z);
        assert!(rel < 1e-13, "{rel}");
    }

    fn erf_series_complement(z: f64) -> f64 {
        1.0 - erf_series(z)
    }

    #[test]
    fn catalogue_values() {
        let a = P4Solution::rational(Rational::A).eval(1.0).unwrap().0;
        assert!((a - 20.0 / 21.0).abs() < 1e-15);
        let b = P4Solution::rational(Rational::B).eval(1.0).unwrap().0;
        assert!((b + 2.0 / 3.0).abs() < 1e-15);
        let c = P4Solution::rational(Rational::C).eval(1.0).unwrap().0;
        assert!((c + 7.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn pole_of_c_is_reported() {
        let c = P4Solution::rational(Rational::C);
        assert_eq!(c.eval(0.0), Err(Error::Pole { z: 0.0 }));
    }

    #[test]
    fn erfc_family_window() {
        assert!(P4Solution::erfc_family(0.5).is_err());
        assert!(P4Solution::erfc_family(0.49).is_ok());
        assert!(P4Solution::erfc_family(-3.0).is_ok());
    }

    #[test]
    fn residual_hand_case() {
        let r = p4_residual(1.0, 0.0, 0.0, 0.0, P4Params::new(1.5, 0.0)).unwrap();
        assert!((r - 1.5).abs() < 1e-15);
        assert!(p4_residual(0.0, 1.0, 0.0, 0.0, P4Params::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn linear_solution_d0_has_zero_residual() {
        let d = P4Solution::erfc_family(0.0).unwrap();
        let j = d.jet(2.0).unwrap();
        let r = p4_residual(j.v, j.d1, j.d2, 2.0, d.params).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn integration_identity_at_start() {
        let p = P4Params::new(5.0, -8.0);
        let s = p4_integrate(p, 1.0, 0.3, -0.2, &[1.0], 1e-10).unwrap();
        assert_eq!(s.eval(1.0).unwrap(), (0.3, -0.2));
    }

    #[test]
    fn tiny_initial_value_is_a_zero_crossing() {
        let p = P4Params::new(0.0, -2.0 / 9.0);
        let h = p4_integrate(p, 0.0, -1e-9, -2.0 / 3.0, &[1.0], 1e-10).unwrap_err();
        assert_eq!(h.reason, Error::ZeroCrossing { z: 0.0 });
    }
}
