use painleve_core::cubic_algebra::derive_spectra;
use painleve_core::eigen::{self, Discretization, EigenResult};
use painleve_core::potentials::{closed_form_x, g1, PotentialSpec};
use painleve_core::susy::{self, ModeStatus, Operator, Superpotentials, Variant};
use painleve_core::verify;
use rayon::prelude::*;

use crate::config::{RunConfig, Source, SuiteArg};
use crate::output::{Cell, Report, Table};
use crate::CliError;

pub fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut cols = vec!["series", "epsilon", "kind", "base", "slope", "finite", "valid_p", "p_max", "coincident"];
    cols.extend(["root1_re", "root1_im", "root2_re", "root2_im", "root3_re", "root3_im", "root4_re", "root4_im"]);
    let mut table = Table::new("series", &cols);
    for s in derive_spectra(&cfg.params, cfg.p_max) {
        let mut row: Vec<Cell> = vec![
            s.id.to_string().into(),
            s.id.epsilon.to_string().into(),
            s.id.kind.label().into(),
            s.base.into(),
            s.slope.into(),
            s.finite.into(),
            Cell::List(s.valid_p.iter().map(|&p| p.into()).collect()),
            s.p_max.into(),
            Cell::List(s.coincident.iter().map(|c| c.to_string().into()).collect()),
        ];
        // roots of Φ in x at the lowest valid p
        let roots = s.structure_function(s.valid_p[0]).x_roots();
        for r in roots {
            row.push(r.re.into());
            row.push(r.im.into());
        }
        table.push(row);
    }
    let mut report = Report::new("spectrum", meta(cfg, &[("p_max", cfg.p_max.to_string())]));
    report.tables.push(table);
    Ok(report)
}

fn meta(cfg: &RunConfig, extra: &[(&'static str, String)]) -> Vec<(&'static str, String)> {
    let mut m = cfg.metadata();
    m.extend(extra.iter().cloned());
    m
}

/// The x-part potential of the configured source.
fn x_potential(cfg: &RunConfig, half_width: f64) -> Result<Box<dyn Fn(f64) -> f64 + Sync>, CliError> {
    let p = cfg.params;
    match cfg.source {
        Source::Case(case) => Ok(Box::new(move |x| closed_form_x(case, &p, x).unwrap_or(f64::NAN))),
        _ => {
            let spec = PotentialSpec::from_p4(cfg.solution(half_width)?, p);
            Ok(Box::new(move |x| g1(&spec, x).unwrap_or(f64::NAN)))
        }
    }
}

fn parallel_lowest(disc: &Discretization, k: usize) -> Vec<f64> {
    (0..k).into_par_iter().map(|i| eigen::eigenvalue(disc, i)).collect()
}

/// Widens the default window until the potential at the edges clears the
/// k-th level by a margin.
fn solve_half_width(cfg: &RunConfig) -> Result<f64, CliError> {
    if let Some(l) = cfg.half_width {
        return Ok(l);
    }
    let l0 = cfg.default_half_width();
    if !matches!(cfg.source, Source::Case(_)) {
        return Ok(l0);
    }
    let v = x_potential(cfg, l0)?;
    let probe = eigen::discretize(&v, l0, cfg.points, cfg.params.hbar)?;
    let top = eigen::eigenvalue(&probe, cfg.levels - 1);
    Ok(verify::half_width_for(&v, &cfg.params, top).max(l0))
}

fn solve(cfg: &RunConfig) -> Result<(f64, EigenResult), CliError> {
    let l = solve_half_width(cfg)?;
    let v = x_potential(cfg, l)?;
    let res = eigen::refine_by(&v, cfg.levels, l, cfg.params.hbar, cfg.tol, cfg.points, parallel_lowest)?;
    Ok((l, res))
}

pub fn eigensolve(cfg: &RunConfig, with_y: bool) -> Result<Report, CliError> {
    let (l, res) = solve(cfg)?;
    let extra = [("half_width", l.to_string()), ("tol", cfg.tol.to_string())];
    let mut report = Report::new("eigensolve", meta(cfg, &extra));
    report.summary.push(("final_points", res.n.into()));
    if !with_y {
        let mut t = Table::new("levels", &["level", "energy", "error_estimate"]);
        for (i, lv) in res.levels.iter().enumerate() {
            t.push(vec![i.into(), lv.energy.into(), lv.error_estimate.into()]);
        }
        report.tables.push(t);
        return Ok(report);
    }
    let q = cfg.params.quantum();
    let mut t = Table::new("levels", &["part", "level", "energy", "error_estimate", "x_level", "y_quanta"]);
    for (i, lv) in res.levels.iter().enumerate() {
        t.push(vec!["x".into(), i.into(), lv.energy.into(), lv.error_estimate.into(), i.into(), Cell::Null]);
    }
    // every 2D level up to the top x level plus the y zero point is complete
    let top = res.levels.last().map_or(f64::NEG_INFINITY, |l| l.energy) + 0.5 * q;
    let mut sums = Vec::new();
    for (i, lv) in res.levels.iter().enumerate() {
        let mut m = 0usize;
        loop {
            let e = lv.energy + q * (m as f64 + 0.5);
            if e > top + 1e-12 * q {
                break;
            }
            sums.push((e, lv.error_estimate, i, m));
            m += 1;
        }
    }
    sums.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    for (j, (e, err, i, m)) in sums.into_iter().take(cfg.levels).enumerate() {
        t.push(vec!["xy".into(), j.into(), e.into(), err.into(), i.into(), m.into()]);
    }
    report.tables.push(t);
    Ok(report)
}

fn status_text(s: ModeStatus) -> String {
    match s {
        ModeStatus::Normalizable => "normalizable".into(),
        ModeStatus::NotNormalizable => "not-normalizable".into(),
        ModeStatus::Vanishing => "vanishing".into(),
        ModeStatus::Singular { x } => format!("singular@{x:e}"),
        ModeStatus::Duplicate { of } => format!("duplicate-of-{of}"),
    }
}

pub fn zero_modes(cfg: &RunConfig, samples: bool) -> Result<Report, CliError> {
    let Some(case) = cfg.case() else {
        return Err(CliError::Usage("zero-modes needs --case".into()));
    };
    let l = cfg.half_width.unwrap_or_else(|| cfg.default_half_width());
    let p = cfg.params;
    let w = Superpotentials::new(susy::map_params(&p), case.solution()?, l)?;
    let variant = Variant::for_epsilon(p.epsilon);
    let offset = susy::calibrate(&p, &w, variant)?;
    let k = 0.5 * p.hbar * p.hbar;
    let variant_name = match variant {
        Variant::V1 => "V1",
        Variant::V2 => "V2",
    };
    let mut extra = vec![("variant", variant_name.to_owned()), ("offset", offset.to_string())];
    if samples {
        extra.push(("half_width", l.to_string()));
    }
    let mut report = Report::new("zero-modes", meta(cfg, &extra));
    let mut modes =
        Table::new("modes", &["operator", "label", "susy_energy", "physical_energy", "status", "normalizable"]);
    let mut table = Table::new("samples", &["operator", "label", "x", "psi"]);
    for (op, name) in [(Operator::Annihilation, "annihilation"), (Operator::Creation, "creation")] {
        let set = susy::zero_modes(&w, variant, op)?;
        for (i, m) in set.modes.iter().enumerate() {
            modes.push(vec![
                name.into(),
                m.label.into(),
                m.energy.into(),
                (k * m.energy + offset).into(),
                status_text(m.status).into(),
                m.is_normalizable().into(),
            ]);
            if samples && m.is_normalizable() {
                let g = set.sample(i, l, cfg.points)?;
                for (x, v) in g.xs().into_iter().zip(&g.values) {
                    table.push(vec![name.into(), m.label.into(), x.into(), (*v).into()]);
                }
            }
        }
    }
    report.tables.push(modes);
    if samples {
        report.tables.push(table);
        report.csv_table = 1;
    }
    Ok(report)
}

pub fn potential(cfg: &RunConfig) -> Result<Report, CliError> {
    let l = cfg.half_width.unwrap_or_else(|| cfg.default_half_width());
    let n = cfg.points;
    let h = 2.0 * l / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| -l + h * i as f64).collect();
    let mut report = Report::new("potential", meta(cfg, &[("half_width", l.to_string())]));
    let p = cfg.params;
    let table = match cfg.source {
        Source::Case(case) => {
            let spec = PotentialSpec::catalogue(case, p.hbar, p.omega)?;
            let mut t = Table::new("samples", &["x", "v", "v_from_p4"]);
            for x in xs {
                let closed = closed_form_x(case, &p, x).unwrap_or(f64::NAN);
                let via = g1(&spec, x).unwrap_or(f64::NAN);
                t.push(vec![x.into(), closed.into(), via.into()]);
            }
            t
        }
        _ => {
            let v = x_potential(cfg, l)?;
            let mut t = Table::new("samples", &["x", "v"]);
            for x in xs {
                t.push(vec![x.into(), v(x).into()]);
            }
            t
        }
    };
    report.tables.push(table);
    Ok(report)
}

/// Runs the suites; the bool is true iff every required check passed.
pub fn verify_suites(suite: SuiteArg) -> (Report, bool) {
    let mut t = Table::new("checks", &["suite", "check", "passed", "required", "measured", "tolerance", "detail"]);
    let mut all = true;
    for s in suite.suites() {
        let rep = verify::run(s);
        all &= rep.passed();
        for c in rep.checks {
            t.push(vec![
                s.name().into(),
                c.name.into(),
                c.passed.into(),
                c.required.into(),
                c.measured.into(),
                c.tolerance.into(),
                c.detail.into(),
            ]);
        }
    }
    let mut report = Report::new("verify", Vec::new());
    report.summary.push(("passed", all.into()));
    report.tables.push(t);
    (report, all)
}
