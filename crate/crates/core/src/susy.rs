//! Third-order shape invariance: superpotentials, zero modes and ladder
//! operators acting on sampled wavefunctions.
//!
//! SUSY units: H = −∂² + V, so physical energies are (ħ²/2)E plus a constant
//! offset measured against g1.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::params::{CaseId, Epsilon, ModelParams};
use crate::potentials::{self, PotentialSpec};
use crate::special::P4Solution;

pub const LADDER_MIN_POINTS: usize = 64;
pub const INTERTWINING_MIN_POINTS: usize = 256;
/// Interior margin excluded from residual norms.
const MARGIN: usize = 4;
const NORM_WIDTHS: [f64; 3] = [8.0, 12.0, 16.0];
const NORM_TOL: f64 = 1e-6;
const CELLS_PER_UNIT: f64 = 64.0;

const GL_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

fn gauss(a: f64, b: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (t, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        s += w * f(m + r * t)?;
    }
    Ok(s * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SusyParams {
    pub lambda: f64,
    pub gamma: f64,
    pub d: f64,
}

impl SusyParams {
    /// √(−d) in the reducible regime.
    pub fn s(&self) -> Option<f64> {
        (self.d <= 0.0).then(|| (-self.d).sqrt())
    }

    pub fn reducible(&self) -> bool {
        self.d <= 0.0
    }
}

pub fn map_params(p: &ModelParams) -> SusyParams {
    let lambda = p.omega / p.hbar;
    SusyParams { lambda, gamma: lambda * (p.alpha - 1.0), d: p.beta * lambda * lambda / 2.0 }
}

/// V1 belongs to ε = −1, V2 to ε = +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    V1,
    V2,
}

impl Variant {
    pub fn for_epsilon(e: Epsilon) -> Self {
        match e {
            Epsilon::Minus => Variant::V1,
            Epsilon::Plus => Variant::V2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Annihilation,
    Creation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Raise,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Which {
    W1,
    W2,
    W3,
}

/// h, W₁, W₂, W₃ and b built from a P4 solution, with the zeros and poles of h
/// located on a window around the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Superpotentials {
    pub sp: SusyParams,
    sol: P4Solution,
    reach: f64,
    singular: Vec<f64>,
}

impl Superpotentials {
    /// `half_width` is the largest |x| the caller intends to sample.
    pub fn new(sp: SusyParams, sol: P4Solution, half_width: f64) -> Result<Self> {
        let sl = sp.lambda.sqrt();
        let reach = half_width.max(NORM_WIDTHS[2] / sl) + 1.0;
        let mut singular: Vec<f64> = sol.poles().iter().map(|z| z / sl).collect();
        let zmax = reach * sl;
        let steps = (2.0 * zmax * 1000.0).ceil() as usize;
        let dz = 2.0 * zmax / steps as f64;
        let near_pole = |z: f64| sol.poles().iter().any(|p| (z - p).abs() < 2.0 * dz);
        let value = |z: f64| sol.eval(z).map(|(f, _)| f);
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=steps {
            let z = -zmax + dz * i as f64;
            if near_pole(z) {
                prev = None;
                continue;
            }
            let f = value(z)?;
            if f == 0.0 {
                singular.push(z / sl);
                prev = None;
                continue;
            }
            if let Some((zp, fp)) = prev {
                if fp * f < 0.0 {
                    let (mut a, mut b, mut fa) = (zp, z, fp);
                    for _ in 0..200 {
                        let m = 0.5 * (a + b);
                        if m <= a || m >= b {
                            break;
                        }
                        let fm = value(m)?;
                        if fm == 0.0 {
                            a = m;
                            b = m;
                            break;
                        }
                        if fa * fm < 0.0 {
                            b = m;
                        } else {
                            a = m;
                            fa = fm;
                        }
                    }
                    singular.push(0.5 * (a + b) / sl);
                }
            }
            prev = Some((z, f));
        }
        singular.sort_by(|a, b| a.total_cmp(b));
        Ok(Self { sp, sol, reach, singular })
    }

    /// Zeros of h and poles of f, in x.
    pub fn singular_points(&self) -> &[f64] {
        &self.singular
    }

    /// (h, h′) with h(x) = ½√λ f(√λ x).
    pub fn h(&self, x: f64) -> Result<(f64, f64)> {
        let l = self.sp.lambda;
        let (f, fp) = self.sol.eval(l.sqrt() * x)?;
        Ok((0.5 * l.sqrt() * f, 0.5 * l * fp))
    }

    pub fn w3(&self, x: f64) -> Result<f64> {
        Ok(-2.0 * self.h(x)?.0 - self.sp.lambda * x)
    }

    /// (W₁, W₂); only defined for d ≤ 0 and h ≠ 0.
    pub fn w12(&self, x: f64) -> Result<(f64, f64)> {
        let s = self.sp.s().ok_or(Error::Domain { what: "W1 and W2 need d <= 0", z: x })?;
        let (h, hp) = self.h(x)?;
        if h == 0.0 {
            return Err(Error::Domain { what: "W1 and W2 are singular where h = 0", z: x });
        }
        let t = (hp - s) / (2.0 * h);
        Ok((-h + t, -h - t))
    }

    fn w(&self, which: Which, x: f64) -> Result<f64> {
        match which {
            Which::W1 => Ok(self.w12(x)?.0),
            Which::W2 => Ok(self.w12(x)?.1),
            Which::W3 => self.w3(x),
        }
    }

    /// b = −h′ − 2h² − 4λxh − λ²x² + λ + γ.
    pub fn b(&self, x: f64) -> Result<f64> {
        let (h, hp) = self.h(x)?;
        let SusyParams { lambda: l, gamma: g, .. } = self.sp;
        Ok(-hp - 2.0 * h * h - 4.0 * l * x * h - l * l * x * x + l + g)
    }

    pub fn potential(&self, variant: Variant, x: f64) -> Result<f64> {
        let (h, hp) = self.h(x)?;
        let l = self.sp.lambda;
        let v1 = -2.0 * hp + 4.0 * h * h + 4.0 * l * x * h + l * l * x * x - l;
        Ok(match variant {
            Variant::V1 => v1,
            Variant::V2 => v1 + 4.0 * hp,
        })
    }
}

/// V₁ or V₂ of a P4 solution in SUSY units.
pub fn susy_potentials(sp: SusyParams, f: P4Solution, variant: Variant) -> impl Fn(f64) -> Result<f64> {
    let l = sp.lambda;
    move |x| {
        let (fz, fpz) = f.eval(l.sqrt() * x)?;
        let (h, hp) = (0.5 * l.sqrt() * fz, 0.5 * l * fpz);
        let v1 = -2.0 * hp + 4.0 * h * h + 4.0 * l * x * h + l * l * x * x - l;
        Ok(match variant {
            Variant::V1 => v1,
            Variant::V2 => v1 + 4.0 * hp,
        })
    }
}

/// Closed forms of (W₁, W₂, W₃) printed for the catalogue cases that have a
/// consistent transcription. Returns `None` for the others.
pub fn printed_superpotentials(case: CaseId, params: &ModelParams, x: f64) -> Option<(f64, f64, f64)> {
    let (h, w) = (params.hbar, params.omega);
    let x2 = x * x;
    match case {
        CaseId::A => {
            let w1 = -(-h + 2.0 * w * x2)
                * (9.0 * h.powi(3) + 27.0 * h * h * w * x2 + 12.0 * h * w * w * x2 * x2 + 4.0 * w.powi(3) * x2.powi(3))
                / (h * x * (3.0 * h + 2.0 * w * x2) * (3.0 * h * h + 4.0 * w * w * x2 * x2));
            let w2 = -(h - 2.0 * w * x2) * (3.0 * h * h + 3.0 * h * w * x2 + 2.0 * w * w * x2 * x2)
                / (h * x * (3.0 * h * h + 8.0 * h * w * x2 + 4.0 * w * w * x2 * x2));
            let w3 = -w
                * x
                * (-9.0 * h.powi(3)
                    + 22.0 * h * h * w * x2
                    + 20.0 * h * w * w * x2 * x2
                    + 8.0 * w.powi(3) * x2.powi(3))
                / (h * (h + 2.0 * w * x2) * (3.0 * h * h + 4.0 * w * w * x2 * x2));
            Some((w1, w2, w3))
        }
        CaseId::B => Some((1.0 / x + w * x / (3.0 * h), -1.0 / x + w * x / (3.0 * h), -w * x / (3.0 * h))),
        _ => None,
    }
}

/// exp(σ∫₀ˣ W) = ∏(x − xⱼ)^{σrⱼ} · exp(σ∫₀ˣ R), R = W − Σ rⱼ/(x − xⱼ).
#[derive(Debug, Clone, PartialEq)]
struct ExpIntegral {
    which: Which,
    sign: f64,
    residues: Vec<(f64, i32)>,
    cell: f64,
    /// cum[k] = ∫₀^{(k − offset)·cell} R.
    cum: Vec<f64>,
    offset: usize,
}

impl ExpIntegral {
    fn new(w: &Superpotentials, which: Which, sign: f64) -> Result<Self> {
        let sl = w.sp.lambda.sqrt();
        let delta = 1e-6 / sl;
        let mut residues = Vec::new();
        for &xj in &w.singular {
            let r = 0.5 * delta * (w.w(which, xj + delta)? - w.w(which, xj - delta)?);
            let ri = r.round();
            if (r - ri).abs() > 1e-3 {
                return Err(Error::SingularWavefunction { x: xj });
            }
            if ri != 0.0 {
                residues.push((xj, ri as i32));
            }
        }
        let cell = 1.0 / (CELLS_PER_UNIT * sl);
        let k = (w.reach / cell).ceil() as usize;
        let mut me = Self { which, sign, residues, cell, cum: vec![0.0; 2 * k + 1], offset: k };
        for i in 0..k {
            let a = i as f64 * cell;
            let up = gauss(a, a + cell, |t| me.regular(w, t))?;
            me.cum[k + i + 1] = me.cum[k + i] + up;
            let down = gauss(-a - cell, -a, |t| me.regular(w, t))?;
            me.cum[k - i - 1] = me.cum[k - i] - down;
        }
        Ok(me)
    }

    fn regular(&self, w: &Superpotentials, x: f64) -> Result<f64> {
        let mut v = w.w(self.which, x)?;
        for &(xj, r) in &self.residues {
            v -= f64::from(r) / (x - xj);
        }
        Ok(v)
    }

    fn eval(&self, w: &Superpotentials, x: f64) -> Result<f64> {
        let k = (x / self.cell).floor();
        let idx = k as isize + self.offset as isize;
        if idx < 0 || idx as usize >= self.cum.len() {
            return Err(Error::Domain { what: "outside the integration window", z: x });
        }
        let a = k * self.cell;
        let mut integral = self.cum[idx as usize];
        if x > a {
            integral += gauss(a, x, |t| self.regular(w, t))?;
        }
        let mut v = (self.sign * integral).exp();
        for &(xj, r) in &self.residues {
            v *= (x - xj).powi(r * self.sign as i32);
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Prefactor {
    One,
    MinusTwoH,
    /// h + λx − (h′ − s)/(2h)
    V1Psi2,
    /// s + h′ − 2h² − 2λxh
    V1Psi3,
    /// γ + 2λ + h′ − 2h² − 2λxh
    V1Phi3,
    /// γ − h′ − 2h² − 2λxh
    V2Psi1,
    /// W₁ − W₃
    V2Phi2,
    /// −s − h′ − 2h² − 2λxh
    V2Phi3,
}

impl Prefactor {
    fn eval(self, w: &Superpotentials, x: f64) -> f64 {
        let Ok((h, hp)) = w.h(x) else { return f64::NAN };
        let SusyParams { lambda: l, gamma: g, .. } = w.sp;
        let s = w.sp.s().unwrap_or(0.0);
        let q = -2.0 * h * h - 2.0 * l * x * h;
        match self {
            Prefactor::One => 1.0,
            Prefactor::MinusTwoH => -2.0 * h,
            Prefactor::V1Psi2 => h + l * x - (hp - s) / (2.0 * h),
            Prefactor::V1Psi3 => s + hp + q,
            Prefactor::V1Phi3 => g + 2.0 * l + hp + q,
            Prefactor::V2Psi1 => g - hp + q,
            Prefactor::V2Phi2 => h + l * x + (hp - s) / (2.0 * h),
            Prefactor::V2Phi3 => -s - hp + q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeStatus {
    Normalizable,
    NotNormalizable,
    /// The prefactor vanishes identically.
    Vanishing,
    Singular {
        x: f64,
    },
    /// Proportional to an earlier normalizable candidate of the same energy.
    Duplicate {
        of: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMode {
    pub label: &'static str,
    /// SUSY units.
    pub energy: f64,
    pub status: ModeStatus,
    /// ∫ψ² over [−L, L] for L = 8, 12, 16 in units of λ^{−1/2}.
    pub norms: [f64; 3],
    prefactor: Prefactor,
    exp: usize,
}

impl ZeroMode {
    pub fn is_normalizable(&self) -> bool {
        self.status == ModeStatus::Normalizable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeSet {
    pub variant: Variant,
    pub operator: Operator,
    pub modes: Vec<ZeroMode>,
    w: Superpotentials,
    exps: Vec<ExpIntegral>,
}

impl ZeroModeSet {
    pub fn normalizable(&self) -> impl Iterator<Item = &ZeroMode> {
        self.modes.iter().filter(|m| m.is_normalizable())
    }

    fn eval_raw(&self, mode: &ZeroMode, x: f64) -> Result<f64> {
        let e = &self.exps[mode.exp];
        let at = |x: f64| -> f64 {
            match e.eval(&self.w, x) {
                Ok(v) => mode.prefactor.eval(&self.w, x) * v,
                Err(_) => f64::NAN,
            }
        };
        let v = at(x);
        if v.is_finite() {
            return Ok(v);
        }
        // exactly on a singular point: average the two sides
        let d = 1e-3 / self.w.sp.lambda.sqrt();
        let v = 0.5 * (at(x - d) + at(x + d));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::SingularWavefunction { x })
        }
    }

    /// Unnormalized ψ(x) of the `i`-th candidate.
    pub fn eval(&self, i: usize, x: f64) -> Result<f64> {
        self.eval_raw(&self.modes[i], x)
    }

    /// Samples candidate `i`; normalizable modes come out with unit norm.
    pub fn sample(&self, i: usize, half_width: f64, n: usize) -> Result<GridFunction> {
        let mode = &self.modes[i];
        if let ModeStatus::Singular { x } = mode.status {
            return Err(Error::SingularWavefunction { x });
        }
        let h = 2.0 * half_width / (n.max(2) - 1) as f64;
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            values.push(self.eval_raw(mode, -half_width + h * k as f64)?);
        }
        let mut g = GridFunction::new(half_width, values)?;
        if mode.is_normalizable() && mode.norms[2] > 0.0 {
            let c = 1.0 / mode.norms[2].sqrt();
            for v in g.values.iter_mut() {
                *v *= c;
            }
        }
        Ok(g)
    }

    fn norm_integrals(&self, mode: &ZeroMode) -> Result<[f64; 3]> {
        let sl = self.w.sp.lambda.sqrt();
        let cell = 1.0 / (CELLS_PER_UNIT * sl);
        let mut out = [0.0; 3];
        let mut acc = 0.0;
        let mut done = 0.0;
        for (o, &width) in out.iter_mut().zip(NORM_WIDTHS.iter()) {
            let cells = ((width / sl - done) / cell).round() as usize;
            for c in 0..cells {
                let a = done + c as f64 * cell;
                acc += gauss(a, a + cell, |x| Ok(self.eval_raw(mode, x)?.powi(2)))?;
                acc += gauss(-a - cell, -a, |x| Ok(self.eval_raw(mode, x)?.powi(2)))?;
            }
            done += cells as f64 * cell;
            *o = acc;
        }
        Ok(out)
    }

    fn diverges_at_singularity(&self, mode: &ZeroMode) -> Option<f64> {
        let sl = self.w.sp.lambda.sqrt();
        for &xj in &self.w.singular {
            if xj.abs() > NORM_WIDTHS[2] / sl {
                continue;
            }
            // a pole of ψ grows ≥ 10× between these two distances; closer
            // probes would drown in the cancellation between h′ and h²
            for side in [-1.0, 1.0] {
                let far = self.eval_raw(mode, xj + side * 1e-2 / sl).map(f64::abs);
                let near = self.eval_raw(mode, xj + side * 1e-3 / sl).map(f64::abs);
                match (far, near) {
                    (Ok(f), Ok(n)) if n <= 5.0 * f + 1e-300 => {}
                    _ => return Some(xj),
                }
            }
        }
        None
    }

    fn proportional(&self, a: &ZeroMode, b: &ZeroMode) -> bool {
        if (a.energy - b.energy).abs() > 1e-9 * (1.0 + a.energy.abs()) {
            return false;
        }
        let sl = self.w.sp.lambda.sqrt();
        let mut ratio: Option<f64> = None;
        for k in 0..7 {
            let x = (-2.9 + 0.83 * k as f64) / sl;
            let (Ok(u), Ok(v)) = (self.eval_raw(a, x), self.eval_raw(b, x)) else { return false };
            if u.abs() < 1e-8 * (u.abs() + v.abs()) {
                return false;
            }
            let r = v / u;
            match ratio {
                None => ratio = Some(r),
                Some(r0) if (r - r0).abs() <= 1e-6 * r0.abs() => {}
                Some(_) => return false,
            }
        }
        true
    }

    fn vanishes(&self, mode: &ZeroMode) -> bool {
        let sp = self.w.sp;
        let scale = 1.0 + sp.gamma.abs() + 2.0 * sp.lambda + sp.s().unwrap_or(0.0);
        let width = NORM_WIDTHS[0] / sp.lambda.sqrt();
        let mut seen = false;
        for k in 0..64 {
            let x = -width + 2.0 * width * (k as f64 + 0.37) / 64.0;
            let p = mode.prefactor.eval(&self.w, x);
            if !p.is_finite() {
                continue;
            }
            seen = true;
            if p.abs() > 1e-10 * scale {
                return false;
            }
        }
        seen
    }
}

type Candidate = (&'static str, f64, Prefactor, Which, f64);

fn candidates(sp: &SusyParams, variant: Variant, op: Operator) -> Vec<Candidate> {
    let (l, g) = (sp.lambda, sp.gamma);
    let Some(s) = sp.s() else {
        return match (variant, op) {
            (Variant::V1, Operator::Annihilation) => vec![("psi1", 0.0, Prefactor::One, Which::W3, 1.0)],
            (Variant::V2, Operator::Annihilation) => vec![("psi1", 0.0, Prefactor::V2Psi1, Which::W3, 1.0)],
            _ => Vec::new(),
        };
    };
    match (variant, op) {
        (Variant::V1, Operator::Annihilation) => vec![
            ("psi1", 0.0, Prefactor::One, Which::W3, 1.0),
            ("psi2", g + 2.0 * l + s, Prefactor::V1Psi2, Which::W2, -1.0),
            ("psi3", g + 2.0 * l - s, Prefactor::V1Psi3, Which::W1, -1.0),
        ],
        (Variant::V1, Operator::Creation) => vec![
            ("phi1", g - s, Prefactor::One, Which::W1, 1.0),
            ("phi2", g + s, Prefactor::MinusTwoH, Which::W2, 1.0),
            ("phi3", -2.0 * l, Prefactor::V1Phi3, Which::W3, -1.0),
        ],
        (Variant::V2, Operator::Annihilation) => vec![
            ("psi1", 0.0, Prefactor::V2Psi1, Which::W3, 1.0),
            ("psi2", g - s, Prefactor::MinusTwoH, Which::W1, -1.0),
            ("psi3", g + s, Prefactor::One, Which::W2, -1.0),
        ],
        (Variant::V2, Operator::Creation) => vec![
            ("phi1", -2.0 * l, Prefactor::One, Which::W3, -1.0),
            ("phi2", g - 2.0 * l - s, Prefactor::V2Phi2, Which::W1, 1.0),
            ("phi3", g - 2.0 * l + s, Prefactor::V2Phi3, Which::W2, 1.0),
        ],
    }
}

/// The three candidate zero modes (one for d > 0) of `op` for `variant`,
/// each classified numerically.
pub fn zero_modes(w: &Superpotentials, variant: Variant, op: Operator) -> Result<ZeroModeSet> {
    let mut set = ZeroModeSet { variant, operator: op, modes: Vec::new(), w: w.clone(), exps: Vec::new() };
    for (label, energy, prefactor, which, sign) in candidates(&w.sp, variant, op) {
        let exp = match set.exps.iter().position(|e| e.which == which && e.sign == sign) {
            Some(i) => i,
            None => {
                match ExpIntegral::new(w, which, sign) {
                    Ok(e) => set.exps.push(e),
                    Err(Error::SingularWavefunction { x }) => {
                        set.modes.push(ZeroMode {
                            label,
                            energy,
                            status: ModeStatus::Singular { x },
                            norms: [f64::NAN; 3],
                            prefactor,
                            exp: usize::MAX,
                        });
                        continue;
                    }
                    Err(e) => return Err(e),
                }
                set.exps.len() - 1
            }
        };
        let mut mode = ZeroMode { label, energy, status: ModeStatus::NotNormalizable, norms: [0.0; 3], prefactor, exp };
        if set.vanishes(&mode) {
            mode.status = ModeStatus::Vanishing;
        } else if let Some(x) = set.diverges_at_singularity(&mode) {
            mode.status = ModeStatus::Singular { x };
        } else {
            match set.norm_integrals(&mode) {
                Ok(n) => {
                    mode.norms = n;
                    let converged =
                        n.iter().all(|v| v.is_finite() && *v > 0.0) && (n[2] - n[1]).abs() <= NORM_TOL * n[2];
                    if converged {
                        mode.status = ModeStatus::Normalizable;
                    }
                }
                Err(Error::SingularWavefunction { x }) => mode.status = ModeStatus::Singular { x },
                Err(e) => return Err(e),
            }
        }
        if mode.is_normalizable() {
            if let Some(of) = set.modes.iter().find(|m| m.is_normalizable() && set.proportional(m, &mode)) {
                mode.status = ModeStatus::Duplicate { of: of.label };
            }
        }
        set.modes.push(mode);
    }
    Ok(set)
}

/// h, h′, b, W₃ and V sampled on the nodes of `psi`.
struct Coefficients {
    h: Vec<f64>,
    hp: Vec<f64>,
    b: Vec<f64>,
    w3: Vec<f64>,
    v: Vec<f64>,
}

fn coefficients(w: &Superpotentials, variant: Variant, psi: &GridFunction) -> Result<Coefficients> {
    let n = psi.n();
    let mut c = Coefficients {
        h: Vec::with_capacity(n),
        hp: Vec::with_capacity(n),
        b: Vec::with_capacity(n),
        w3: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
    };
    for i in 0..n {
        let x = psi.x(i);
        let (h, hp) = w.h(x)?;
        c.h.push(h);
        c.hp.push(hp);
        c.b.push(w.b(x)?);
        c.w3.push(w.w3(x)?);
        c.v.push(w.potential(variant, x)?);
    }
    Ok(c)
}

fn q_op(psi: &GridFunction, c: &Coefficients, dagger: bool) -> GridFunction {
    let d1 = psi.d1();
    let s = if dagger { 1.0 } else { -1.0 };
    psi.with_values((0..psi.n()).map(|i| s * d1[i] + c.w3[i] * psi.values[i]).collect())
}

fn m_op(psi: &GridFunction, c: &Coefficients, dagger: bool) -> GridFunction {
    let (d1, d2) = (psi.d1(), psi.d2());
    let values = (0..psi.n())
        .map(|i| {
            let p = psi.values[i];
            if dagger {
                d2[i] - 2.0 * c.h[i] * d1[i] + c.b[i] * p
            } else {
                d2[i] + 2.0 * c.h[i] * d1[i] + (2.0 * c.hp[i] + c.b[i]) * p
            }
        })
        .collect();
    psi.with_values(values)
}

fn ladder(psi: &GridFunction, c: &Coefficients, dir: Direction, variant: Variant) -> GridFunction {
    let mut out = match (dir, variant) {
        (Direction::Lower, Variant::V1) => m_op(&q_op(psi, c, false), c, true),
        (Direction::Lower, Variant::V2) => q_op(&m_op(psi, c, true), c, false),
        (Direction::Raise, Variant::V1) => q_op(&m_op(psi, c, false), c, true),
        (Direction::Raise, Variant::V2) => m_op(&q_op(psi, c, true), c, false),
    };
    out.extrapolate_ends(2);
    out
}

fn hamiltonian(psi: &GridFunction, c: &Coefficients) -> GridFunction {
    let d2 = psi.d2();
    let mut out = psi.with_values((0..psi.n()).map(|i| -d2[i] + c.v[i] * psi.values[i]).collect());
    out.extrapolate_ends(1);
    out
}

fn interior_dot(a: &GridFunction, b: &GridFunction) -> f64 {
    let n = a.n();
    a.values[MARGIN..n - MARGIN].iter().zip(&b.values[MARGIN..n - MARGIN]).map(|(x, y)| x * y).sum::<f64>()
        * a.spacing()
}

/// a (lower) or a† (raise) for the variant: a = M†q, a† = q†M on V₁ and
/// a = qM†, a† = Mq† on V₂, with q = −∂ + W₃.
pub fn apply_ladder(w: &Superpotentials, dir: Direction, variant: Variant, psi: &GridFunction) -> Result<GridFunction> {
    if psi.n() < LADDER_MIN_POINTS {
        return Err(Error::GridTooCoarse { n: psi.n(), min: LADDER_MIN_POINTS });
    }
    let c = coefficients(w, variant, psi)?;
    Ok(ladder(psi, &c, dir, variant))
}

/// −ψ″ + Vψ.
pub fn apply_hamiltonian(w: &Superpotentials, variant: Variant, psi: &GridFunction) -> Result<GridFunction> {
    let c = coefficients(w, variant, psi)?;
    Ok(hamiltonian(psi, &c))
}

pub fn rayleigh_quotient(w: &Superpotentials, variant: Variant, psi: &GridFunction) -> Result<f64> {
    let hp = apply_hamiltonian(w, variant, psi)?;
    Ok(interior_dot(psi, &hp) / interior_dot(psi, psi))
}

/// P(E) with a†a = P(H).
pub fn product_polynomial(sp: &SusyParams, variant: Variant, e: f64) -> f64 {
    let shift = match variant {
        Variant::V1 => sp.gamma + 2.0 * sp.lambda,
        Variant::V2 => sp.gamma,
    };
    e * ((e - shift).powi(2) + sp.d)
}

/// |⟨ψ|a†a|ψ⟩/⟨ψ|ψ⟩ − P(E)|.
pub fn product_identity_residual(w: &Superpotentials, variant: Variant, psi: &GridFunction, e: f64) -> Result<f64> {
    if psi.n() < LADDER_MIN_POINTS {
        return Err(Error::GridTooCoarse { n: psi.n(), min: LADDER_MIN_POINTS });
    }
    let c = coefficients(w, variant, psi)?;
    let down = ladder(psi, &c, Direction::Lower, variant);
    let up = ladder(&down, &c, Direction::Raise, variant);
    Ok((interior_dot(psi, &up) / interior_dot(psi, psi) - product_polynomial(&w.sp, variant, e)).abs())
}

/// ‖(H a† − a†(H + 2λ))ψ‖ / ‖a†ψ‖ on interior points; 0 for ψ = 0.
pub fn intertwining_residual(w: &Superpotentials, variant: Variant, psi: &GridFunction) -> Result<f64> {
    if psi.n() < INTERTWINING_MIN_POINTS {
        return Err(Error::GridTooCoarse { n: psi.n(), min: INTERTWINING_MIN_POINTS });
    }
    let c = coefficients(w, variant, psi)?;
    let up = ladder(psi, &c, Direction::Raise, variant);
    let lhs = hamiltonian(&up, &c);
    let mut shifted = hamiltonian(psi, &c);
    for (s, p) in shifted.values.iter_mut().zip(&psi.values) {
        *s += 2.0 * w.sp.lambda * p;
    }
    let rhs = ladder(&shifted, &c, Direction::Raise, variant);
    let diff = lhs.with_values(lhs.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect());
    let den = up.interior_norm(MARGIN);
    let num = diff.interior_norm(MARGIN);
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(num / den)
}

/// ‖aψ‖/‖ψ‖ on interior points.
pub fn annihilation_residual(w: &Superpotentials, variant: Variant, psi: &GridFunction) -> Result<f64> {
    let down = apply_ladder(w, Direction::Lower, variant, psi)?;
    Ok(down.interior_norm(MARGIN) / psi.interior_norm(MARGIN))
}

/// Rayleigh quotients of ψ, a†ψ, (a†)²ψ, …, `rungs` raises in total.
pub fn ladder_rayleigh(w: &Superpotentials, variant: Variant, psi: &GridFunction, rungs: usize) -> Result<Vec<f64>> {
    let c = coefficients(w, variant, psi)?;
    let mut cur = psi.clone();
    let mut out = Vec::with_capacity(rungs + 1);
    for k in 0..=rungs {
        let hp = hamiltonian(&cur, &c);
        out.push(interior_dot(&cur, &hp) / interior_dot(&cur, &cur));
        if k < rungs {
            cur = ladder(&cur, &c, Direction::Raise, variant);
        }
    }
    Ok(out)
}

/// SUSY energies below `e_max`: each normalizable annihilation mode seeds a
/// ladder of step 2λ, which ends at the first normalizable creation energy
/// it reaches.
pub fn ladder_energies(ann: &ZeroModeSet, cre: &ZeroModeSet, lambda: f64, e_max: f64) -> Vec<f64> {
    let tol = 1e-9 * (1.0 + e_max.abs());
    let stops: Vec<f64> = cre.normalizable().map(|m| m.energy).collect();
    let mut out = Vec::new();
    for seed in ann.normalizable() {
        let mut e = seed.energy;
        while e <= e_max + tol {
            out.push(e);
            if stops.iter().any(|s| (s - e).abs() <= tol) {
                break;
            }
            e += 2.0 * lambda;
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup_by(|a, b| (*a - *b).abs() <= tol);
    out
}

/// c = g1(x) − (ħ²/2)V(x), checked to be constant on the sample points.
pub fn calibration_offset(params: &ModelParams, w: &Superpotentials, variant: Variant, xs: &[f64]) -> Result<f64> {
    let spec = PotentialSpec::from_p4(w.sol.clone(), *params);
    let k = 0.5 * params.hbar * params.hbar;
    let mut vals = Vec::new();
    for &x in xs {
        let sl = w.sp.lambda.sqrt();
        if w.sol.poles().iter().any(|p| (p / sl - x).abs() < 0.05 / sl) {
            continue;
        }
        let (Ok(g), Ok(v)) = (potentials::g1(&spec, x), w.potential(variant, x)) else { continue };
        vals.push(g - k * v);
    }
    if vals.is_empty() {
        return Err(Error::Config(format!("no usable calibration point among {} samples", xs.len())));
    }
    let c = vals.iter().sum::<f64>() / vals.len() as f64;
    let spread = vals.iter().fold(0.0f64, |m, v| m.max((v - c).abs()));
    if spread > 1e-8 * c.abs().max(params.quantum()) {
        return Err(Error::Inconsistent { offset: c, spread });
    }
    Ok(c)
}

/// [`calibration_offset`] on 41 points of [−4, 4] in units of λ^{−1/2}.
pub fn calibrate(params: &ModelParams, w: &Superpotentials, variant: Variant) -> Result<f64> {
    let sl = w.sp.lambda.sqrt();
    let xs: Vec<f64> = (0..41).map(|i| (-4.0 + 0.2 * i as f64 + 0.013) / sl).collect();
    calibration_offset(params, w, variant, &xs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SusySpectrum {
    pub variant: Variant,
    pub annihilation: ZeroModeSet,
    pub creation: ZeroModeSet,
    pub offset: f64,
    pub susy_levels: Vec<f64>,
    /// 1D x-part energies (ħ²/2)E + offset.
    pub physical_levels: Vec<f64>,
}

/// Zero modes, ladders and physical x-part levels below `e_max` for the
/// variant selected by ε.
pub fn susy_spectrum(params: &ModelParams, sol: &P4Solution, e_max: f64) -> Result<SusySpectrum> {
    let sp = map_params(params);
    let variant = Variant::for_epsilon(params.epsilon);
    let w = Superpotentials::new(sp, sol.clone(), 0.0)?;
    let annihilation = zero_modes(&w, variant, Operator::Annihilation)?;
    let creation = zero_modes(&w, variant, Operator::Creation)?;
    let offset = calibrate(params, &w, variant)?;
    let k = 0.5 * params.hbar * params.hbar;
    let susy_levels = ladder_energies(&annihilation, &creation, sp.lambda, (e_max - offset) / k);
    let physical_levels = susy_levels.iter().map(|e| k * e + offset).collect();
    Ok(SusySpectrum { variant, annihilation, creation, offset, susy_levels, physical_levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(case: CaseId) -> (ModelParams, Superpotentials) {
        let p = case.params(1.0, 1.0).unwrap();
        let w = Superpotentials::new(map_params(&p), case.solution().unwrap(), 12.0).unwrap();
        (p, w)
    }

    #[test]
    fn parameter_map() {
        let p = CaseId::A.params(1.0, 1.0).unwrap();
        let sp = map_params(&p);
        assert_eq!((sp.lambda, sp.gamma, sp.d), (1.0, 4.0, -4.0));
        assert_eq!(sp.s(), Some(2.0));
        let b = map_params(&CaseId::B.params(1.0, 1.0).unwrap());
        assert!((b.gamma + 1.0).abs() < 1e-15 && (b.d + 1.0 / 9.0).abs() < 1e-15);
        let fixed = map_params(&ModelParams::new(1.0, 0.0, Epsilon::Plus, 2.0, 3.0).unwrap());
        assert_eq!((fixed.gamma, fixed.d), (0.0, 0.0));
    }

    #[test]
    fn case_b_potential() {
        let (_, w) = setup(CaseId::B);
        for x in [-2.0, 0.3, 1.7] {
            let v1 = w.potential(Variant::V1, x).unwrap();
            assert!((v1 - (x * x / 9.0 - 1.0 / 3.0)).abs() < 1e-13);
            let v2 = w.potential(Variant::V2, x).unwrap();
            assert!((v2 - v1 - 4.0 * w.h(x).unwrap().1).abs() < 1e-13);
        }
    }

    #[test]
    fn w_identities() {
        for case in [CaseId::A, CaseId::B, CaseId::C, CaseId::D { t: 0.3 }] {
            let (_, w) = setup(case);
            for x in [-1.9, -0.45, 0.21, 1.3, 2.7] {
                let (h, hp) = w.h(x).unwrap();
                let (w1, w2) = w.w12(x).unwrap();
                assert!((w1 + w2 + 2.0 * h).abs() < 1e-10);
                assert!((w1 - w2 - (hp - w.sp.s().unwrap()) / h).abs() < 1e-10 * (1.0 + (hp / h).abs()));
                assert!((w.w3(x).unwrap() + 2.0 * h + w.sp.lambda * x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn printed_superpotentials_match() {
        for case in [CaseId::A, CaseId::B] {
            let p = case.params(0.8, 1.7).unwrap();
            let w = Superpotentials::new(map_params(&p), case.solution().unwrap(), 4.0).unwrap();
            for x in [-2.2, -0.7, 0.4, 1.1, 3.0] {
                let (w1, w2) = w.w12(x).unwrap();
                let (a, b, c) = printed_superpotentials(case, &p, x).unwrap();
                assert!((w1 - a).abs() < 1e-8 * (1.0 + a.abs()), "{case} W1 at {x}");
                assert!((w2 - b).abs() < 1e-8 * (1.0 + b.abs()), "{case} W2 at {x}");
                assert!((w.w3(x).unwrap() - c).abs() < 1e-8 * (1.0 + c.abs()), "{case} W3 at {x}");
            }
        }
    }

    #[test]
    fn reduced_b_matches_ode_form_off_zeros() {
        // b from M† = (∂ + W₁)(∂ + W₂): b = W₁W₂ + W₂′
        let (_, w) = setup(CaseId::A);
        for x in [-1.3, 0.4, 2.2] {
            let e = 1e-5;
            let w2p = (w.w12(x + e).unwrap().1 - w.w12(x - e).unwrap().1) / (2.0 * e);
            let (w1, w2) = w.w12(x).unwrap();
            assert!((w.b(x).unwrap() - (w1 * w2 + w2p)).abs() < 1e-6);
        }
    }

    #[test]
    fn singular_points_of_catalogue() {
        let (_, a) = setup(CaseId::A);
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(a.singular_points().len(), 3);
        assert!((a.singular_points()[0] + r).abs() < 1e-12);
        let (_, c) = setup(CaseId::C);
        assert!(c.singular_points().contains(&0.0));
    }

    #[test]
    fn case_a_zero_modes() {
        let (_, w) = setup(CaseId::A);
        let ann = zero_modes(&w, Variant::V2, Operator::Annihilation).unwrap();
        let cre = zero_modes(&w, Variant::V2, Operator::Creation).unwrap();
        let e: Vec<f64> = ann.normalizable().map(|m| m.energy).collect();
        assert_eq!(e, vec![0.0, 6.0]);
        let c: Vec<f64> = cre.normalizable().map(|m| m.energy).collect();
        assert_eq!(c, vec![0.0]);
        // ψ₁ ∝ e^{−x²/2}/(1 + 2x²)
        let i = ann.modes.iter().position(|m| m.label == "psi1").unwrap();
        let r = ann.eval(i, 1.3).unwrap() / ann.eval(i, 0.0).unwrap();
        assert!((r - (-1.3f64 * 1.3 / 2.0).exp() / (1.0 + 2.0 * 1.69)).abs() < 1e-10);
    }

    #[test]
    fn d_at_t0_has_vanishing_candidates() {
        let (_, w) = setup(CaseId::D { t: 0.0 });
        let ann = zero_modes(&w, Variant::V2, Operator::Annihilation).unwrap();
        assert_eq!(ann.modes[0].status, ModeStatus::Vanishing);
    }

    #[test]
    fn zero_grid_maps_to_zero() {
        let (_, w) = setup(CaseId::A);
        let z = GridFunction::zeros(12.0, 300).unwrap();
        assert!(apply_ladder(&w, Direction::Raise, Variant::V2, &z).unwrap().values.iter().all(|v| *v == 0.0));
        assert_eq!(intertwining_residual(&w, Variant::V2, &z).unwrap(), 0.0);
        let small = GridFunction::zeros(12.0, 40).unwrap();
        assert!(matches!(apply_ladder(&w, Direction::Raise, Variant::V2, &small), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn case_b_intertwining_converges() {
        let (_, w) = setup(CaseId::B);
        let r = |n| {
            let g = GridFunction::sample(12.0, n, |x| (-x * x).exp()).unwrap();
            intertwining_residual(&w, Variant::V2, &g).unwrap()
        };
        let (a, b) = (r(2000), r(4000));
        assert!(a < 1e-3 && a / b > 3.5, "{a} {b}");
    }

    #[test]
    fn product_polynomial_values() {
        let sp = SusyParams { lambda: 1.0, gamma: 4.0, d: -4.0 };
        assert_eq!(product_polynomial(&sp, Variant::V2, 0.0), 0.0);
        assert_eq!(product_polynomial(&sp, Variant::V2, 6.0), 6.0 * (4.0 - 4.0));
        assert_eq!(product_polynomial(&sp, Variant::V1, 8.0), 8.0 * (4.0 - 4.0));
    }

    #[test]
    fn offsets_of_catalogue() {
        let want = [
            (CaseId::A, -5.0 / 6.0),
            (CaseId::AMinus, -1.5),
            (CaseId::B, 5.0 / 6.0),
            (CaseId::C, 7.0 / 6.0),
            (CaseId::D { t: 0.3 }, 5.0 / 6.0),
            (CaseId::E { t: 0.0 }, 1.0 / 6.0),
        ];
        for (case, c) in want {
            let p = case.params(1.0, 1.0).unwrap();
            let s = susy_spectrum(&p, &case.solution().unwrap(), 4.0).unwrap();
            assert!((s.offset - c).abs() < 1e-9, "{case}: {}", s.offset);
        }
    }
}
