//! Verification suites. Each check records what was measured against which
//! tolerance; errors inside a check turn into a failed check.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cubic_algebra::{derive_spectra, structure_discrepancy, x_part_levels, SeriesKind};
use crate::eigen;
use crate::error::Result;
use crate::grid::GridFunction;
use crate::params::{CaseId, ModelParams};
use crate::potentials::closed_form_x;
use crate::special::{p4_integrate, p4_residual, P4Solution, Rational};
use crate::susy::{self, Operator, Superpotentials, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Painleve,
    Algebra,
    Susy,
    Spectra,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Painleve, Suite::Algebra, Suite::Susy, Suite::Spectra];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Painleve => "painleve",
            Suite::Algebra => "algebra",
            Suite::Susy => "susy",
            Suite::Spectra => "spectra",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    /// Report-only checks log a number without gating the suite.
    pub required: bool,
    pub detail: String,
}

impl Check {
    fn below(name: String, measured: f64, tolerance: f64) -> Self {
        Self { passed: measured < tolerance, name, measured, tolerance, required: true, detail: String::new() }
    }

    fn above(name: String, measured: f64, tolerance: f64) -> Self {
        Self { passed: measured >= tolerance, name, measured, tolerance, required: true, detail: String::new() }
    }

    fn flag(name: String, passed: bool, detail: String) -> Self {
        let measured = if passed { 1.0 } else { 0.0 };
        Self { name, passed, measured, tolerance: 1.0, required: true, detail }
    }

    fn report(name: String, measured: f64, detail: String) -> Self {
        Self { name, passed: true, measured, tolerance: f64::NAN, required: false, detail }
    }

    fn failed(name: String, err: crate::Error) -> Self {
        Self { name, passed: false, measured: f64::NAN, tolerance: f64::NAN, required: true, detail: format!("{err}") }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = detail;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.required)
    }
}

fn push(out: &mut Vec<Check>, name: String, r: Result<Check>) {
    out.push(r.unwrap_or_else(|e| Check::failed(name, e)));
}

pub fn run(suite: Suite) -> SuiteReport {
    let checks = match suite {
        Suite::Painleve => painleve_checks(),
        Suite::Algebra => algebra_checks(),
        Suite::Susy => susy_checks(),
        Suite::Spectra => spectra_checks(),
    };
    SuiteReport { suite, checks }
}

/// Catalogue cases with the erfc members at the given t values.
pub fn catalogue(ts: &[f64]) -> Vec<CaseId> {
    let mut v = alloc::vec![CaseId::A, CaseId::AMinus, CaseId::B, CaseId::C];
    for &t in ts {
        v.push(CaseId::D { t });
    }
    for &t in ts {
        v.push(CaseId::E { t });
    }
    v
}

/// Largest P4 residual on `points` samples of [−5, 5], relative to
/// 1 + |f''|, skipping a 0.05 neighbourhood of poles.
pub fn p4_max_residual(sol: &P4Solution, points: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..points {
        let z = -5.0 + 10.0 * i as f64 / (points - 1) as f64;
        if sol.poles().iter().any(|p| (z - p).abs() < 0.05) {
            continue;
        }
        let j = sol.jet(z)?;
        let r = p4_residual(j.v, j.d1, j.d2, z, sol.params)?;
        worst = worst.max(r.abs() / (1.0 + j.d2.abs()));
    }
    Ok(worst)
}

/// Max |f − f_exact| on [1, 4] after integrating from the exact data at z = 1.
pub fn integrator_deviation(r: Rational) -> Result<f64> {
    let exact = P4Solution::rational(r);
    let (f0, fp0) = exact.eval(1.0)?;
    let sol = p4_integrate(exact.params, 1.0, f0, fp0, &[4.0], 1e-14).map_err(|h| h.reason)?;
    let mut worst = 0.0f64;
    for i in 0..=300 {
        let z = 1.0 + 3.0 * i as f64 / 300.0;
        worst = worst.max((sol.eval(z)?.0 - exact.eval(z)?.0).abs());
    }
    Ok(worst)
}

fn painleve_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let mut seen: Vec<P4Solution> = Vec::new();
    for case in catalogue(&[0.0, 0.3, -1.0]) {
        let name = format!("p4_residual[{case}]");
        let sol = match case.solution() {
            Ok(s) => s,
            Err(e) => {
                out.push(Check::failed(name, e));
                continue;
            }
        };
        if seen.contains(&sol) {
            continue;
        }
        push(&mut out, name.clone(), p4_max_residual(&sol, 400).map(|r| Check::below(name, r, 1e-8)));
        seen.push(sol);
    }
    for r in [Rational::A, Rational::B] {
        let name = format!("integrator_reproduces[{r:?}]");
        push(&mut out, name.clone(), integrator_deviation(r).map(|d| Check::below(name, d, 1e-8)));
    }
    out
}

/// Zero-based series with slope +ħω that never fail on 0..=p_max.
fn infinite_positive_bases(p: &ModelParams, p_max: u32) -> Vec<f64> {
    derive_spectra(p, p_max).iter().filter(|s| !s.finite && s.slope > 0.0).map(|s| s.base).collect()
}

fn algebra_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for case in catalogue(&[0.3]) {
        let Ok(p) = case.params(1.0, 1.0) else { continue };
        for &e in &[-0.7, 0.5, 2.25] {
            match structure_discrepancy(&p, e) {
                Ok(rep) => {
                    let worst = rep.relative[1..].iter().fold(0.0f64, |m, v| m.max(*v));
                    out.push(Check::below(format!("phi_general_vs_factored_y1_y4[{case},E={e}]"), worst, 1e-10));
                    out.push(Check::report(
                        format!("phi_constant_with_printed_casimir[{case},E={e}]"),
                        rep.relative[0],
                        format!(
                            "printed K = {:.12e}, implied K = {:.12e}; the printed Casimir does not reproduce the constant term",
                            rep.printed_casimir, rep.implied_casimir
                        ),
                    ));
                }
                Err(err) => out.push(Check::failed(format!("phi_general_vs_factored[{case},E={e}]"), err)),
            }
        }
        let mut worst = 0.0f64;
        for s in derive_spectra(&p, 8) {
            for q in 0..=5 {
                worst = worst.max(s.closure_residual(q));
            }
        }
        out.push(Check::below(format!("phi_closure_p_le_5[{case}]"), worst, 1e-10));
    }
    let unit = |c: CaseId| c.params(1.0, 1.0).expect("catalogue parameters are valid");
    let a = derive_spectra(&unit(CaseId::A), 8);
    let second = a.iter().find(|s| (s.base + 1.0 / 3.0).abs() < 1e-12);
    out.push(Check::flag(
        String::from("validity[a]:series_minus_1_3_only_p0"),
        second.is_some_and(|s| s.valid_p == [0]),
        format!("{:?}", second.map(|s| &s.valid_p)),
    ));
    let am = derive_spectra(&unit(CaseId::AMinus), 8);
    let finite = am.iter().find(|s| s.slope > 0.0 && s.finite && s.valid_p.len() > 1);
    out.push(Check::flag(
        String::from("validity[a-minus]:finite_series_p0_p1"),
        finite.is_some_and(|s| s.valid_p == [0, 1]),
        format!("{:?}", finite.map(|s| &s.valid_p)),
    ));
    let d = derive_spectra(&unit(CaseId::D { t: 0.0 }), 8);
    out.push(Check::flag(
        String::from("validity[d]:coincident_series_merge"),
        d.iter().any(|s| s.is_coincident() && s.id.kind == SeriesKind::Case1),
        String::new(),
    ));
    let mut b = infinite_positive_bases(&unit(CaseId::B), 8);
    b.sort_by(|x, y| x.total_cmp(y));
    let want = [2.0 / 3.0, 1.0, 4.0 / 3.0];
    let ok = b.len() == 3 && b.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-12);
    out.push(Check::flag(String::from("series[b]:three_infinite_ladders"), ok, format!("{b:?}")));
    out
}

/// Zero-mode data of a catalogue case on its own variant.
pub struct CaseModes {
    pub params: ModelParams,
    pub w: Superpotentials,
    pub variant: Variant,
    pub ann: susy::ZeroModeSet,
    pub cre: susy::ZeroModeSet,
}

pub fn case_modes(case: CaseId, half_width: f64) -> Result<CaseModes> {
    let params = case.params(1.0, 1.0)?;
    let w = Superpotentials::new(susy::map_params(&params), case.solution()?, half_width)?;
    let variant = Variant::for_epsilon(params.epsilon);
    let ann = susy::zero_modes(&w, variant, Operator::Annihilation)?;
    let cre = susy::zero_modes(&w, variant, Operator::Creation)?;
    Ok(CaseModes { params, w, variant, ann, cre })
}

/// Intertwining residual of e^{−x²} at n = 2000 and 4000 on [−12, 12].
pub fn intertwining_pair(case: CaseId) -> Result<(f64, f64)> {
    let m = case_modes(case, 12.0)?;
    let r = |n| -> Result<f64> {
        let g = GridFunction::sample(12.0, n, |x| (-x * x).exp())?;
        susy::intertwining_residual(&m.w, m.variant, &g)
    };
    Ok((r(2000)?, r(4000)?))
}

/// Worst ‖aψ‖/‖ψ‖ over the normalizable annihilation zero modes at n points.
pub fn annihilation_worst(case: CaseId, n: usize) -> Result<f64> {
    let m = case_modes(case, 12.0)?;
    let mut worst = 0.0f64;
    for (i, mode) in m.ann.modes.iter().enumerate() {
        if !mode.is_normalizable() {
            continue;
        }
        let psi = m.ann.sample(i, 12.0, n)?;
        worst = worst.max(susy::annihilation_residual(&m.w, m.variant, &psi)?);
    }
    Ok(worst)
}

/// Largest relative deviation of successive Rayleigh-quotient gaps from 2λ
/// when raising the first normalizable annihilation zero mode of positive
/// energy `rungs` times.
pub fn ladder_spacing_error(case: CaseId, rungs: usize, n: usize) -> Result<f64> {
    let m = case_modes(case, 12.0)?;
    let i = m.ann.modes.iter().position(|z| z.is_normalizable() && z.energy > 0.0).unwrap_or(0);
    let psi = m.ann.sample(i, 12.0, n)?;
    let q = susy::ladder_rayleigh(&m.w, m.variant, &psi, rungs)?;
    let step = 2.0 * m.w.sp.lambda;
    Ok(q.windows(2).fold(0.0f64, |acc, w| acc.max(((w[1] - w[0]) - step).abs() / step)))
}

fn susy_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for case in catalogue(&[0.0, 0.3, -1.0]) {
        let name = format!("w_identities[{case}]");
        let r = (|| -> Result<f64> {
            let m = case_modes(case, 6.0)?;
            let mut worst = 0.0f64;
            for i in 0..240 {
                let x = -6.0 + 0.05 * i as f64 + 0.0123;
                let Ok((h, _)) = m.w.h(x) else { continue };
                worst = worst.max((m.w.w3(x)? + 2.0 * h + m.w.sp.lambda * x).abs());
                if let Ok((w1, w2)) = m.w.w12(x) {
                    worst = worst.max((w1 + w2 + 2.0 * h).abs() / (1.0 + h.abs()));
                }
            }
            Ok(worst)
        })();
        push(&mut out, name.clone(), r.map(|v| Check::below(name, v, 1e-10)));
        let name = format!("zero_mode_count[{case}]");
        let r = case_modes(case, 12.0).map(|m| {
            let n = m.ann.normalizable().count() + m.cre.normalizable().count();
            let labels: Vec<String> =
                m.ann.normalizable().chain(m.cre.normalizable()).map(|z| format!("{}@{}", z.label, z.energy)).collect();
            Check { passed: n <= 3, ..Check::below(name.clone(), n as f64, 3.5) }.with_detail(labels.join(" "))
        });
        push(&mut out, name, r);
    }
    for case in [CaseId::A, CaseId::B] {
        let name = format!("printed_superpotentials[{case}]");
        let r = (|| -> Result<f64> {
            let p = case.params(1.0, 1.0)?;
            let w = Superpotentials::new(susy::map_params(&p), case.solution()?, 5.0)?;
            let mut worst = 0.0f64;
            for i in 0..200 {
                let x = -5.0 + 0.05 * i as f64 + 0.0071;
                let (a, b, c) = susy::printed_superpotentials(case, &p, x).unwrap_or((0.0, 0.0, 0.0));
                let (w1, w2) = w.w12(x)?;
                for (u, v) in [(w1, a), (w2, b), (w.w3(x)?, c)] {
                    worst = worst.max((u - v).abs() / (1.0 + v.abs()));
                }
            }
            Ok(worst)
        })();
        push(&mut out, name.clone(), r.map(|v| Check::below(name, v, 1e-8)));

        let name = format!("intertwining_n2000[{case}]");
        match intertwining_pair(case) {
            Ok((a, b)) => {
                out.push(Check::below(name, a, 1e-3));
                out.push(Check::above(format!("intertwining_ratio_4000_over_2000[{case}]"), a / b, 3.5));
            }
            Err(e) => out.push(Check::failed(name, e)),
        }
        let name = format!("annihilation_residual_n2000[{case}]");
        push(&mut out, name.clone(), annihilation_worst(case, 2000).map(|v| Check::below(name, v, 1e-4)));
        let name = format!("ladder_spacing_4_rungs[{case}]");
        push(&mut out, name.clone(), ladder_spacing_error(case, 4, 2000).map(|v| Check::below(name, v, 2e-3)));
    }

    let name = String::from("product_identity_ground[a]");
    let r = (|| -> Result<f64> {
        let m = case_modes(CaseId::A, 12.0)?;
        let psi = m.ann.sample(0, 12.0, 2000)?;
        susy::product_identity_residual(&m.w, m.variant, &psi, 0.0)
    })();
    push(&mut out, name.clone(), r.map(|v| Check::below(name, v, 1e-3)));

    let name = String::from("product_identity_first_excited_v1[b]");
    let r = (|| -> Result<f64> {
        let p = CaseId::B.params(1.0, 1.0)?;
        let w = Superpotentials::new(susy::map_params(&p), CaseId::B.solution()?, 12.0)?;
        let v = |x: f64| w.potential(Variant::V1, x).unwrap_or(f64::NAN);
        // −ψ″ + Vψ is the solver's operator with ħ = √2
        let disc = eigen::discretize(v, 12.0, 2000, core::f64::consts::SQRT_2)?;
        let res = eigen::eigen_lowest(&disc, 2)?;
        let lvl = &res.levels[1];
        susy::product_identity_residual(&w, Variant::V1, &lvl.psi, lvl.energy)
    })();
    push(&mut out, name.clone(), r.map(|v| Check::below(name, v, 1e-3)));

    for case in catalogue(&[0.3]) {
        let name = format!("spectra_agreement_susy_vs_algebra[{case}]");
        let r = (|| -> Result<Check> {
            let p = case.params(1.0, 1.0)?;
            let e_max = 6.0;
            let s = susy::susy_spectrum(&p, &case.solution()?, e_max)?;
            let alg = x_part_levels(&derive_spectra(&p, 12), &p, e_max);
            let worst = level_distance(&s.physical_levels, &alg);
            Ok(Check::below(name.clone(), worst, 1e-6)
                .with_detail(format!("susy {:?} algebra {:?}", s.physical_levels, alg)))
        })();
        push(&mut out, name, r);
    }
    out
}

/// Max pointwise distance of two sorted level lists, +∞ on a count mismatch.
pub fn level_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Half-width that keeps the x-part potential above `e_max + 20ħω` at the edges.
pub fn half_width_for(v: impl Fn(f64) -> f64, params: &ModelParams, e_max: f64) -> f64 {
    let unit = (params.hbar / params.omega).sqrt();
    let mut l = 12.0 * unit;
    while l < 200.0 * unit && v(l).min(v(-l)) < e_max + 20.0 * params.quantum() {
        l += 2.0 * unit;
    }
    l
}

/// Refined x-part levels of a catalogue case below `e_max`, plus the first
/// level above it.
pub fn oracle_levels(case: CaseId, params: &ModelParams, e_max: f64, tol: f64) -> Result<Vec<f64>> {
    let v = |x: f64| closed_form_x(case, params, x).unwrap_or(f64::NAN);
    let l = half_width_for(v, params, e_max);
    let probe = eigen::discretize(v, l, 2001, params.hbar)?;
    let k = probe.count_below(e_max) + 1;
    let res = eigen::refine(v, k, l, params.hbar, tol, 2001)?;
    Ok(res.energies())
}

fn spectra_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for case in catalogue(&[0.0, 0.3, -1.0]) {
        let name = format!("oracle_vs_algebra[{case}]");
        let r = (|| -> Result<Check> {
            let p = case.params(1.0, 1.0)?;
            let e_max = 6.0 * p.quantum();
            let alg = x_part_levels(&derive_spectra(&p, 12), &p, e_max);
            let mut num = oracle_levels(case, &p, e_max, 1e-7)?;
            let above = num.pop().unwrap_or(f64::INFINITY);
            let worst = level_distance(&num, &alg);
            let tol = 1e-4 * p.quantum();
            let check = if above > e_max - tol { worst } else { f64::INFINITY };
            Ok(Check::below(name.clone(), check, tol).with_detail(format!("oracle {num:?} algebra {alg:?}")))
        })();
        push(&mut out, name, r);
    }
    out
}
