//! The separable potential V(x, y) = g1(x) + g2(y) built from a P4 solution,
//! and independent closed forms for the catalogue cases.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{CaseId, ModelParams};
use crate::special::{erfc, P4Solution};

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    FromP4(P4Solution),
    ClosedForm(CaseId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub params: ModelParams,
}

impl PotentialSpec {
    pub fn from_p4(sol: P4Solution, params: ModelParams) -> Self {
        Self { kind: PotentialKind::FromP4(sol), params }
    }

    pub fn closed(case: CaseId, params: ModelParams) -> Result<Self> {
        case.check(&params)?;
        Ok(Self { kind: PotentialKind::ClosedForm(case), params })
    }

    /// The P4 route for a catalogue case.
    pub fn catalogue(case: CaseId, hbar: f64, omega: f64) -> Result<Self> {
        Ok(Self::from_p4(case.solution()?, case.params(hbar, omega)?))
    }

    pub fn g1(&self, x: f64) -> Result<f64> {
        g1(self, x)
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        Ok(g1(self, x)? + g2(&self.params, y))
    }
}

/// g1(x) = ω²x²/2 + ε(ħω/2)f' + (ħω/2)f² + ω√(ħω) x f + (ħω/3)(ε − α), z = √(ω/ħ) x.
pub fn g1(spec: &PotentialSpec, x: f64) -> Result<f64> {
    let p = &spec.params;
    match &spec.kind {
        PotentialKind::FromP4(sol) => {
            let (f, fp) = sol.eval(p.z_scale() * x)?;
            let q = p.quantum();
            Ok(0.5 * p.omega * p.omega * x * x
                + p.eps() * 0.5 * q * fp
                + 0.5 * q * f * f
                + p.omega * q.sqrt() * x * f
                + q / 3.0 * (p.eps() - p.alpha))
        }
        PotentialKind::ClosedForm(case) => closed_form(*case, p, x, 0.0),
    }
}

pub fn g2(params: &ModelParams, y: f64) -> f64 {
    0.5 * params.omega * params.omega * y * y
}

/// Full 2D potential of a catalogue case, written out without reference to f.
pub fn closed_form(case: CaseId, params: &ModelParams, x: f64, y: f64) -> Result<f64> {
    case.check(params)?;
    let (h, w) = (params.hbar, params.omega);
    let x2 = x * x;
    let osc = 0.5 * w * w * (x2 + y * y);
    let v = match case {
        CaseId::A => {
            let d = 2.0 * w * x2 + h;
            osc - 8.0 * h * h * h * w / (d * d) + 4.0 * h * h * w / d + 2.0 * h * w / 3.0
        }
        CaseId::AMinus => {
            let d = 4.0 * w * w * x2 * x2 + 3.0 * h * h;
            osc - 192.0 * h.powi(4) * w * w * x2 / (d * d) + 16.0 * h * h * w * w * x2 / d
        }
        CaseId::B => 0.5 * w * w * (x2 / 9.0 + y * y),
        CaseId::C => {
            let d = 2.0 * w * x2 + 3.0 * h;
            0.5 * w * w * (x2 / 9.0 + y * y) - 24.0 * h * h * h * w / (d * d) + 4.0 * h * h * w / d
        }
        CaseId::D { t } => {
            let z = (w / h).sqrt() * x;
            let den = 1.0 - t * erfc(z);
            if !(den > 0.0) {
                return Err(Error::Domain { what: "1 - t erfc(z) is not positive", z });
            }
            let psi = 2.0 * t * (-z * z).exp() / (PI.sqrt() * den);
            osc - 2.0 * h * w / 3.0 + h * w * (2.0 * z * psi + psi * psi)
        }
        CaseId::E { .. } => osc + 2.0 * h * w / 3.0,
    };
    Ok(v)
}

/// The x-part of the closed form, i.e. `closed_form(case, params, x, 0)`.
pub fn closed_form_x(case: CaseId, params: &ModelParams, x: f64) -> Result<f64> {
    closed_form(case, params, x, 0.0)
}

/// Constant c with g1_from_p4(x) − closed_x(x) = c on `grid`. Points where
/// either side is undefined are skipped.
pub fn consistency_offset(spec_from_p4: &PotentialSpec, case: CaseId, grid: &[f64]) -> Result<f64> {
    case.check(&spec_from_p4.params)?;
    let mut n = 0usize;
    let mut sum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in grid {
        let (Ok(a), Ok(b)) = (g1(spec_from_p4, x), closed_form_x(case, &spec_from_p4.params, x)) else {
            continue;
        };
        let d = a - b;
        n += 1;
        sum += d;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if n == 0 {
        return Err(Error::Config(alloc::string::String::from("no grid point where both potentials are defined")));
    }
    let c = sum / n as f64;
    let spread = (hi - c).max(c - lo);
    if spread > 1e-9 * c.abs().max(1.0) {
        return Err(Error::Inconsistent { offset: c, spread });
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Epsilon;

    fn unit(case: CaseId) -> ModelParams {
        case.params(1.0, 1.0).unwrap()
    }

    #[test]
    fn case_b_is_a_slow_oscillator() {
        let s = PotentialSpec::catalogue(CaseId::B, 1.0, 1.0).unwrap();
        for x in [-2.0, 0.0, 0.4, 3.0] {
            assert!((g1(&s, x).unwrap() - x * x / 18.0).abs() < 1e-14);
        }
    }

    #[test]
    fn case_d_at_t0_is_shifted_oscillator() {
        let s = PotentialSpec::catalogue(CaseId::D { t: 0.0 }, 1.0, 1.0).unwrap();
        for x in [-1.5, 0.0, 2.5] {
            assert!((g1(&s, x).unwrap() - (x * x / 2.0 - 2.0 / 3.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn case_a_tends_to_oscillator_plus_two_thirds() {
        let s = PotentialSpec::catalogue(CaseId::A, 1.0, 1.0).unwrap();
        let x: f64 = 200.0;
        assert!((g1(&s, x).unwrap() - x * x / 2.0 - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn closed_form_origin_values() {
        let a = closed_form(CaseId::A, &unit(CaseId::A), 0.0, 0.0).unwrap();
        assert!((a + 10.0 / 3.0).abs() < 1e-14);
        let am = closed_form(CaseId::AMinus, &unit(CaseId::AMinus), 0.0, 0.0).unwrap();
        assert_eq!(am, 0.0);
        let c = closed_form(CaseId::C, &unit(CaseId::C), 0.0, 0.0).unwrap();
        assert!((c + 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_rejects_wrong_params() {
        let p = ModelParams::new(5.0, -8.0, Epsilon::Minus, 1.0, 1.0).unwrap();
        assert!(matches!(closed_form(CaseId::A, &p, 0.0, 0.0), Err(Error::Config(_))));
    }

    #[test]
    fn g2_values() {
        let p = ModelParams::new(0.0, 0.0, Epsilon::Plus, 1.0, 3.0).unwrap();
        assert_eq!(g2(&p, 1.0), 4.5);
        assert_eq!(g2(&unit(CaseId::B), 2.0), 2.0);
    }

    #[test]
    fn offset_detects_non_constant_difference() {
        let sol = CaseId::A.solution().unwrap();
        let spec = PotentialSpec::from_p4(sol, unit(CaseId::A));
        let grid: alloc::vec::Vec<f64> = (0..20).map(|i| -2.0 + 0.2 * i as f64).collect();
        assert!(consistency_offset(&spec, CaseId::A, &grid).unwrap().abs() < 1e-12);
        let wrong = PotentialSpec::from_p4(CaseId::C.solution().unwrap(), unit(CaseId::A));
        assert!(matches!(consistency_offset(&wrong, CaseId::A, &grid), Err(Error::Inconsistent { .. })));
    }
}
