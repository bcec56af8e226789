//! Cubic algebra of the integrals of motion, its Casimir, the structure
//! function Φ of the deformed-oscillator realization and the unitary
//! representations that fix the spectrum.

use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{Epsilon, ModelParams};

const REL_TOL: f64 = 1e-9;

/// Coefficients of the cubic algebra, ζ = ζ0 + ζ1 H + ζ2 H² + ζ3 H³ and so on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicAlgebraCoeffs {
    pub delta0: f64,
    pub delta1: f64,
    pub mu0: f64,
    pub nu0: f64,
    pub nu1: f64,
    pub xi0: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub zeta0: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub zeta3: f64,
}

impl CubicAlgebraCoeffs {
    pub fn from_params(p: &ModelParams) -> Self {
        let (a, b, e, h, w) = (p.alpha, p.beta, p.eps(), p.hbar, p.omega);
        let h2 = h * h;
        let h4 = h2 * h2;
        Self {
            delta0: 16.0 * w * w * h2,
            delta1: 0.0,
            mu0: -2.0 * h2,
            nu0: 0.0,
            nu1: -6.0 * h2,
            xi0: w * w * h4 / 3.0 * (4.0 * a * a - 20.0 - 6.0 * b - 8.0 * e * a),
            xi1: 0.0,
            xi2: 0.0,
            zeta0: h4 * h * w.powi(3) / 27.0
                * (-8.0 * a.powi(3) - 24.0 * a - 36.0 * a * b + 24.0 * e * a * a + 8.0 * e + 36.0 * e * b),
            zeta1: -8.0 * w * w * h4,
            zeta2: 0.0,
            zeta3: 8.0 * h2,
        }
    }

    fn at(&self, e: f64) -> (f64, f64, f64, f64, f64) {
        let delta = self.delta0 + self.delta1 * e;
        let nu = self.nu0 + self.nu1 * e;
        let xi = self.xi0 + self.xi1 * e + self.xi2 * e * e;
        let zeta = self.zeta0 + self.zeta1 * e + self.zeta2 * e * e + self.zeta3 * e * e * e;
        (delta, self.mu0, nu, xi, zeta)
    }
}

/// Coefficients of Φ as a polynomial in y = x + u, lowest power first,
/// with H replaced by `e` and the Casimir by `k`.
pub fn general_coefficients(c: &CubicAlgebraCoeffs, k: f64, e: f64) -> Result<[f64; 5]> {
    let (delta, mu, nu, xi, zeta) = c.at(e);
    if !(delta > 0.0) {
        return Err(Error::Domain { what: "delta must be positive", z: e });
    }
    let sd = delta.sqrt();
    Ok([
        k / (-4.0 * delta) - zeta / (4.0 * sd),
        -xi / 4.0 + zeta / (2.0 * sd) + nu * sd / 12.0,
        -nu * sd / 4.0 + xi / 4.0 + mu * delta / 8.0,
        nu * sd / 6.0 - mu * delta / 4.0,
        mu * delta / 8.0,
    ])
}

pub fn structure_function_general(c: &CubicAlgebraCoeffs, k: f64, e: f64, u: f64, x: f64) -> Result<f64> {
    let co = general_coefficients(c, k, e)?;
    let y = x + u;
    Ok(co.iter().rev().fold(0.0, |acc, &ci| acc * y + ci))
}

/// The Casimir as printed, a quartic polynomial in H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirValue {
    pub value: f64,
    /// Coefficients of H⁰..H⁴.
    pub coefficients: [f64; 5],
}

pub fn casimir_value(p: &ModelParams, e: f64) -> CasimirValue {
    let (a, b, s, h, w) = (p.alpha, p.beta, p.eps(), p.hbar, p.omega);
    let c = [
        -4.0 * h.powi(6) * w.powi(4) / 3.0 * (4.0 * a - 8.0 * s * a - 8.0 - 6.0 * b),
        -4.0 * h.powi(5) * w.powi(3) / 27.0
            * (8.0 * a.powi(3) - 24.0 * s * a * a + 24.0 * a + 36.0 * a * b - 8.0 * s - 36.0 * s * b),
        4.0 * h.powi(4) * w * w / 3.0 * (4.0 * a * a - 8.0 * a + 4.0 - a * b),
        0.0,
        -16.0 * h * h,
    ];
    let value = c.iter().rev().fold(0.0, |acc, &ci| acc * e + ci);
    CasimirValue { value, coefficients: c }
}

/// The Casimir value for which the general Φ reproduces the factored Φ.
pub fn implied_casimir(p: &ModelParams, e: f64) -> f64 {
    let c = CubicAlgebraCoeffs::from_params(p);
    let (delta, _, _, _, zeta) = c.at(e);
    let f0 = factored_coefficients(p, e)[0];
    -4.0 * delta * (f0 + zeta / (4.0 * delta.sqrt()))
}

fn shifts(p: &ModelParams) -> [Complex64; 3] {
    let s = Complex64::new(-p.beta / 2.0, 0.0).sqrt();
    let a = p.alpha;
    match p.epsilon {
        Epsilon::Plus => [
            Complex64::new(5.0 / 6.0 - a / 3.0, 0.0),
            (Complex64::new(a + 2.0, 0.0) + s * 3.0) / 6.0,
            (Complex64::new(a + 2.0, 0.0) - s * 3.0) / 6.0,
        ],
        Epsilon::Minus => [
            Complex64::new(1.0 / 6.0 - a / 3.0, 0.0),
            (Complex64::new(a + 4.0, 0.0) + s * 3.0) / 6.0,
            (Complex64::new(a + 4.0, 0.0) - s * 3.0) / 6.0,
        ],
    }
}

/// Zeros r₁..r₄ of Φ in the variable y = x + u. For β > 0, r₂ and r₃ form a
/// conjugate pair.
pub fn roots(p: &ModelParams, e: f64) -> [Complex64; 4] {
    let eh = e / (2.0 * p.quantum());
    let c = shifts(p);
    [c[0] - eh, c[1] - eh, c[2] - eh, Complex64::new(eh + 0.5, 0.0)]
}

/// The four values of u with Φ(0) = 0; they coincide with the roots.
pub fn u_candidates(p: &ModelParams, e: f64) -> [Complex64; 4] {
    roots(p, e)
}

pub fn leading(p: &ModelParams) -> f64 {
    -4.0 * p.omega * p.omega * p.hbar.powi(4)
}

/// Coefficients (lowest power first, in y) of leading·∏(y − rᵢ).
pub fn factored_coefficients(p: &ModelParams, e: f64) -> [f64; 5] {
    let r = roots(p, e);
    let mut c = [Complex64::new(0.0, 0.0); 5];
    c[0] = Complex64::new(1.0, 0.0);
    for (n, ri) in r.iter().enumerate() {
        for j in (0..=n + 1).rev() {
            let lower = if j > 0 { c[j - 1] } else { Complex64::new(0.0, 0.0) };
            c[j] = lower - c[j] * ri;
        }
    }
    let l = leading(p);
    let mut out = [0.0; 5];
    for (o, ci) in out.iter_mut().zip(c.iter()) {
        *o = l * ci.re;
    }
    out
}

/// Per-coefficient comparison of the general Φ (with the printed Casimir)
/// against the factored Φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyReport {
    pub energy: f64,
    pub general: [f64; 5],
    pub factored: [f64; 5],
    /// |general − factored| / max(1, |factored|) per power of y.
    pub relative: [f64; 5],
    pub printed_casimir: f64,
    pub implied_casimir: f64,
}

impl DiscrepancyReport {
    pub fn agrees(&self, power: usize, tol: f64) -> bool {
        self.relative[power] <= tol
    }
}

pub fn structure_discrepancy(p: &ModelParams, e: f64) -> Result<DiscrepancyReport> {
    let c = CubicAlgebraCoeffs::from_params(p);
    let k = casimir_value(p, e).value;
    let general = general_coefficients(&c, k, e)?;
    let factored = factored_coefficients(p, e);
    let mut relative = [0.0; 5];
    for i in 0..5 {
        relative[i] = (general[i] - factored[i]).abs() / factored[i].abs().max(1.0);
    }
    Ok(DiscrepancyReport {
        energy: e,
        general,
        factored,
        relative,
        printed_casimir: k,
        implied_casimir: implied_casimir(p, e),
    })
}

/// Φ(x) = leading · ∏(x + u − rᵢ) for one candidate representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureFunction {
    pub leading: f64,
    pub roots: [Complex64; 4],
    pub u: f64,
    pub energy: f64,
    pub p: Option<u32>,
}

impl StructureFunction {
    pub fn new(params: &ModelParams, energy: f64, u: f64, p: Option<u32>) -> Self {
        Self { leading: leading(params), roots: roots(params, energy), u, energy, p }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let y = Complex64::new(x + self.u, 0.0);
        self.roots.iter().fold(Complex64::new(self.leading, 0.0), |acc, r| acc * (y - r))
    }

    /// Magnitude against which Φ(x) is compared.
    pub fn scale(&self, x: f64) -> f64 {
        let y = (x + self.u).abs();
        self.roots.iter().fold(self.leading.abs(), |acc, r| acc * (y + r.norm()))
    }

    /// Zeros in the x variable.
    pub fn x_roots(&self) -> [Complex64; 4] {
        self.roots.map(|r| r - self.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validation {
    pub valid: bool,
    pub phi_at_zero: f64,
    pub phi_at_end: f64,
    /// Smallest Φ(x)/scale(x) over the interior integers, +∞ if there are none.
    pub min_interior: f64,
    pub max_imag: f64,
}

/// Φ(0) = Φ(p+1) = 0, Φ real, and Φ(x) > 0 at the integers 1..=p.
pub fn validate_representation(phi: &StructureFunction, p: u32) -> Validation {
    let end = f64::from(p) + 1.0;
    let v0 = phi.eval(0.0);
    let ve = phi.eval(end);
    let mut max_imag =
        (v0.im.abs() / phi.scale(0.0).max(f64::MIN_POSITIVE)).max(ve.im.abs() / phi.scale(end).max(f64::MIN_POSITIVE));
    let mut min_interior = f64::INFINITY;
    for x in 1..=p {
        let x = f64::from(x);
        let v = phi.eval(x);
        let s = phi.scale(x).max(f64::MIN_POSITIVE);
        max_imag = max_imag.max(v.im.abs() / s);
        min_interior = min_interior.min(v.re / s);
    }
    let zero_ok = v0.norm() <= REL_TOL * phi.scale(0.0);
    let end_ok = ve.norm() <= REL_TOL * phi.scale(end);
    let valid = zero_ok && end_ok && max_imag <= REL_TOL && min_interior > REL_TOL;
    Validation { valid, phi_at_zero: v0.re, phi_at_end: ve.re, min_interior, max_imag }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeriesKind {
    Case1,
    Case2,
    Case3,
    Case4a,
    Case4b,
    Case4c,
    BetaPosA,
    BetaPosB,
}

impl SeriesKind {
    /// Index of u among the roots and of the partner root that Φ(p+1) hits.
    fn indices(self) -> (usize, usize) {
        match self {
            SeriesKind::Case1 | SeriesKind::BetaPosA => (0, 3),
            SeriesKind::Case2 => (1, 3),
            SeriesKind::Case3 => (2, 3),
            SeriesKind::Case4a | SeriesKind::BetaPosB => (3, 0),
            SeriesKind::Case4b => (3, 1),
            SeriesKind::Case4c => (3, 2),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SeriesKind::Case1 => "case1",
            SeriesKind::Case2 => "case2",
            SeriesKind::Case3 => "case3",
            SeriesKind::Case4a => "case4a",
            SeriesKind::Case4b => "case4b",
            SeriesKind::Case4c => "case4c",
            SeriesKind::BetaPosA => "beta-pos-a",
            SeriesKind::BetaPosB => "beta-pos-b",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeriesId {
    pub epsilon: Epsilon,
    pub kind: SeriesKind,
}

impl fmt::Display for SeriesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eps{}:{}", self.epsilon, self.kind.label())
    }
}

/// One energy ladder E(p) = base + slope·p of a unitary representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    pub id: SeriesId,
    pub base: f64,
    pub slope: f64,
    pub finite: bool,
    pub valid_p: Vec<u32>,
    pub p_max: u32,
    /// Other case ids that produced the same series.
    pub coincident: Vec<SeriesId>,
    params: ModelParams,
}

impl SpectrumSeries {
    pub fn energy_at(&self, p: u32) -> f64 {
        self.base + self.slope * f64::from(p)
    }

    pub fn structure_function(&self, p: u32) -> StructureFunction {
        let e = self.energy_at(p);
        let (iu, _) = self.id.kind.indices();
        let u = roots(&self.params, e)[iu].re;
        StructureFunction::new(&self.params, e, u, Some(p))
    }

    /// Relative size of Φ(p+1), which vanishes by construction.
    pub fn closure_residual(&self, p: u32) -> f64 {
        let phi = self.structure_function(p);
        let x = f64::from(p) + 1.0;
        phi.eval(x).norm() / phi.scale(x).max(f64::MIN_POSITIVE)
    }

    pub fn is_coincident(&self) -> bool {
        !self.coincident.is_empty()
    }
}

fn series_kinds(beta: f64) -> &'static [SeriesKind] {
    if beta > 0.0 {
        &[SeriesKind::BetaPosA, SeriesKind::BetaPosB]
    } else {
        &[
            SeriesKind::Case1,
            SeriesKind::Case2,
            SeriesKind::Case3,
            SeriesKind::Case4a,
            SeriesKind::Case4b,
            SeriesKind::Case4c,
        ]
    }
}

/// Instantiates every case applicable to sign(β) and ε, keeps the p ≤ p_max
/// that pass `validate_representation`, and merges coincident series.
pub fn derive_spectra(params: &ModelParams, p_max: u32) -> Vec<SpectrumSeries> {
    let q = params.quantum();
    let c = shifts(params);
    let mut out: Vec<SpectrumSeries> = Vec::new();
    for &kind in series_kinds(params.beta) {
        let (iu, ip) = kind.indices();
        let (base, slope) = if ip == 3 { (q * (0.5 + c[iu].re), q) } else { (q * (c[ip].re - 1.5), -q) };
        let id = SeriesId { epsilon: params.epsilon, kind };
        let mut s = SpectrumSeries {
            id,
            base,
            slope,
            finite: true,
            valid_p: Vec::new(),
            p_max,
            coincident: Vec::new(),
            params: *params,
        };
        s.valid_p = (0..=p_max).filter(|&p| validate_representation(&s.structure_function(p), p).valid).collect();
        if s.valid_p.is_empty() {
            continue;
        }
        s.finite = s.valid_p.len() != p_max as usize + 1;
        let tol = REL_TOL * q.max(base.abs());
        if let Some(prev) = out
            .iter_mut()
            .find(|o| (o.base - s.base).abs() <= tol && (o.slope - s.slope).abs() <= tol && o.valid_p == s.valid_p)
        {
            prev.coincident.push(id);
            continue;
        }
        out.push(s);
    }
    out
}

/// Φ for the representation of `series` at p is positive on the whole open
/// interval (0, p+1).
pub fn positive_on_interval(phi: &StructureFunction, p: u32) -> bool {
    let end = f64::from(p) + 1.0;
    let tol = REL_TOL * (1.0 + end);
    let mut inner: Vec<f64> = Vec::new();
    for r in phi.x_roots() {
        if r.im.abs() > tol {
            continue;
        }
        inner.push(r.re);
    }
    // drop one root at 0 and one at p+1, which every valid Φ has
    for target in [0.0, end] {
        if let Some(i) = inner.iter().position(|&r| (r - target).abs() <= tol) {
            inner.remove(i);
        }
    }
    match inner.as_slice() {
        [] => true,
        [a, b] => (*a <= tol && *b <= tol) || (*a >= end - tol && *b >= end - tol),
        _ => false,
    }
}

/// Energies of the x motion alone (2D energies minus ħω/2) predicted by the
/// series, ascending and deduplicated, below `e_max`.
///
/// Only ladders with slope +ħω count. An infinite series contributes its
/// whole ladder. A finite series valid for p = 0..=P contributes E(0..=P)
/// when Φ at p = P is positive on the whole interval (0, P+1).
pub fn x_part_levels(series: &[SpectrumSeries], params: &ModelParams, e_max: f64) -> Vec<f64> {
    let q = params.quantum();
    let mut levels: Vec<f64> = Vec::new();
    for s in series.iter().filter(|s| s.slope > 0.0) {
        let base = s.base - 0.5 * q;
        let count = if !s.finite {
            if base > e_max {
                0
            } else {
                ((e_max - base) / q).floor() as u32 + 1
            }
        } else {
            let contiguous = s.valid_p.iter().enumerate().all(|(i, &p)| p as usize == i);
            let last = *s.valid_p.last().unwrap_or(&0);
            if !contiguous || !positive_on_interval(&s.structure_function(last), last) {
                0
            } else {
                last + 1
            }
        };
        for n in 0..count {
            let e = base + q * f64::from(n);
            if e <= e_max {
                levels.push(e);
            }
        }
    }
    levels.sort_by(|a, b| a.total_cmp(b));
    levels.dedup_by(|a, b| (*a - *b).abs() <= REL_TOL * q.max(a.abs()));
    levels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CaseId;

    fn unit(alpha: f64, beta: f64, eps: Epsilon) -> ModelParams {
        ModelParams::new(alpha, beta, eps, 1.0, 1.0).unwrap()
    }

    #[test]
    fn u_candidate_values() {
        let p = unit(5.0, -8.0, Epsilon::Plus);
        let u = u_candidates(&p, 0.0);
        assert!((u[1].re - 13.0 / 6.0).abs() < 1e-15);
        let one = u_candidates(&p, 1.0);
        assert!((one[3].re - 1.0).abs() < 1e-15);
        let m = unit(5.0, -8.0, Epsilon::Minus);
        assert!((u_candidates(&m, 0.0)[0].re + 1.5).abs() < 1e-15);
    }

    #[test]
    fn positive_beta_has_a_conjugate_pair() {
        let p = unit(0.0, 4.0, Epsilon::Plus);
        let r = roots(&p, 0.3);
        assert!(r[1].im > 0.0);
        assert_eq!(r[1], r[2].conj());
    }

    #[test]
    fn casimir_printed_example() {
        let p = unit(0.0, 0.0, Epsilon::Plus);
        assert!((casimir_value(&p, 1.0).value - 32.0 / 27.0).abs() < 1e-14);
        assert_eq!(casimir_value(&p, 1.0).coefficients[4], -16.0);
    }

    #[test]
    fn zero_coefficients_give_zero_phi() {
        let mut c = CubicAlgebraCoeffs::from_params(&unit(1.0, -1.0, Epsilon::Plus));
        c.mu0 = 0.0;
        c.nu1 = 0.0;
        c.xi0 = 0.0;
        c.zeta0 = 0.0;
        c.zeta1 = 0.0;
        c.zeta3 = 0.0;
        for x in [0.0, 1.5, 3.0] {
            assert_eq!(structure_function_general(&c, 0.0, 0.7, 0.2, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn nonpositive_delta_is_a_domain_error() {
        let mut c = CubicAlgebraCoeffs::from_params(&unit(1.0, -1.0, Epsilon::Plus));
        c.delta0 = 0.0;
        assert!(structure_function_general(&c, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn quartic_coefficient_is_leading() {
        let p = ModelParams::new(2.0, -3.0, Epsilon::Minus, 0.7, 1.9).unwrap();
        let c = CubicAlgebraCoeffs::from_params(&p);
        let g = general_coefficients(&c, 0.0, 0.4).unwrap();
        assert!((g[4] - leading(&p)).abs() < 1e-12 * leading(&p).abs());
    }

    #[test]
    fn printed_validation_examples() {
        // Φ(x) = 4x(p+1−x)(x+3)(x+2) at p = 3: roots in y are 0, 4, −3, −2
        let p = unit(5.0, -8.0, Epsilon::Plus);
        let e = 3.0 + 8.0 / 3.0;
        let series = derive_spectra(&p, 8);
        let case2 = series.iter().find(|s| s.id.kind == SeriesKind::Case2).unwrap();
        assert!((case2.energy_at(3) - e).abs() < 1e-14);
        let phi = case2.structure_function(3);
        let vals: alloc::vec::Vec<f64> = [1.0, 2.0, 3.0].iter().map(|&x| phi.eval(x).re).collect();
        assert!((vals[0] - 144.0).abs() < 1e-9);
        assert!((vals[1] - 320.0).abs() < 1e-9);
        assert!((vals[2] - 360.0).abs() < 1e-9);
        assert!(validate_representation(&phi, 3).valid);
        // case 1 at p = 1 has a root on the interior integer 1
        let case1 = series.iter().find(|s| s.id.kind == SeriesKind::Case1).unwrap();
        assert!(!validate_representation(&case1.structure_function(1), 1).valid);
    }

    #[test]
    fn p0_is_vacuous() {
        let p = unit(5.0, -8.0, Epsilon::Plus);
        let phi = StructureFunction::new(&p, 0.5, roots(&p, 0.5)[3].re, Some(0));
        let v = validate_representation(&phi, 0);
        assert_eq!(v.min_interior, f64::INFINITY);
    }

    #[test]
    fn coincident_series_merge() {
        let s = derive_spectra(&unit(0.0, -2.0, Epsilon::Plus), 8);
        let merged = s.iter().find(|s| s.is_coincident()).unwrap();
        assert!((merged.base - 4.0 / 3.0).abs() < 1e-12);
        assert!(!merged.finite);
    }

    #[test]
    fn x_levels_of_catalogue() {
        let want: [(CaseId, &[f64]); 4] = [
            (CaseId::A, &[-5.0 / 6.0, 13.0 / 6.0, 19.0 / 6.0]),
            (CaseId::AMinus, &[-1.5, -0.5, 2.5, 3.5]),
            (CaseId::B, &[1.0 / 6.0, 0.5, 5.0 / 6.0, 7.0 / 6.0]),
            (CaseId::E { t: 0.0 }, &[7.0 / 6.0, 13.0 / 6.0]),
        ];
        for (case, levels) in want {
            let p = case.params(1.0, 1.0).unwrap();
            let got = x_part_levels(&derive_spectra(&p, 8), &p, levels[levels.len() - 1] + 0.01);
            assert_eq!(got.len(), levels.len(), "{case}: {got:?}");
            for (g, w) in got.iter().zip(levels) {
                assert!((g - w).abs() < 1e-12, "{case}: {got:?}");
            }
        }
    }
}
