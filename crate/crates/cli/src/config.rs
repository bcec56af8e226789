//! Flag parsing and validation. Nothing here touches the solvers.

use clap::{Args, Parser, Subcommand, ValueEnum};
use painleve_core::special::{p4_integrate, P4Params, P4Solution};
use painleve_core::verify::Suite;
use painleve_core::{CaseId, Epsilon, ModelParams};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "painleve-spectra", version, about = "Spectra of superintegrable potentials built from Painlevé IV")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the energy series of every unitary representation.
    Spectrum,
    /// Solve the 1D x-part numerically.
    Eigensolve {
        /// Also list 2D levels, adding the y oscillator.
        #[arg(long)]
        with_y: bool,
    },
    /// Zero modes of the SUSY ladder operators of a catalogue case.
    ZeroModes {
        /// Emit (x, ψ) samples of the normalizable modes.
        #[arg(long)]
        samples: bool,
    },
    /// Tabulate the x-part of the potential.
    Potential,
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Painleve,
    Algebra,
    Susy,
    Spectra,
    All,
}

impl SuiteArg {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Painleve => vec![Suite::Painleve],
            SuiteArg::Algebra => vec![Suite::Algebra],
            SuiteArg::Susy => vec![Suite::Susy],
            SuiteArg::Spectra => vec![Suite::Spectra],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    A,
    AMinus,
    B,
    C,
    D,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A real number, optionally written as a fraction `p/q`.
fn real(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
            if b == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            a / b
        }
        None => s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Catalogue case.
    #[arg(long, value_enum, global = true, conflicts_with_all = ["alpha", "beta", "epsilon"])]
    pub case: Option<CaseArg>,
    /// Parameter of the erfc family (cases d and e), t < 1/2.
    #[arg(long, value_parser = real, global = true, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, value_parser = real, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Accepts fractions such as -2/9.
    #[arg(long, value_parser = real, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// +1 or -1; defaults to +1.
    #[arg(long, value_parser = real, global = true, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[arg(long, value_parser = real, global = true, default_value = "1")]
    pub hbar: f64,
    #[arg(long, value_parser = real, global = true, default_value = "1")]
    pub omega: f64,
    /// Grid half-width L; defaults to 12·sqrt(ħ/ω), widened for high levels.
    #[arg(long, value_parser = real, global = true)]
    pub half_width: Option<f64>,
    /// Grid points, the starting resolution of refinement.
    #[arg(long, global = true, default_value_t = 2000)]
    pub points: usize,
    #[arg(long, global = true, default_value_t = 8)]
    pub p_max: u32,
    /// Number of levels to solve for.
    #[arg(long, global = true, default_value_t = 8)]
    pub levels: usize,
    #[arg(long, value_parser = real, global = true, default_value = "1e-6")]
    pub tol: f64,
    /// P4 initial point z0 for a potential without a closed form.
    #[arg(long, value_parser = real, global = true, allow_hyphen_values = true, requires_all = ["f0", "fp0"])]
    pub z0: Option<f64>,
    /// f(z0).
    #[arg(long, value_parser = real, global = true, allow_hyphen_values = true, requires = "z0")]
    pub f0: Option<f64>,
    /// f'(z0).
    #[arg(long, value_parser = real, global = true, allow_hyphen_values = true, requires = "z0")]
    pub fp0: Option<f64>,
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
}

pub const MAX_P: u32 = 10_000;
const INTEGRATOR_TOL: f64 = 1e-12;

/// Where the potential comes from.
#[derive(Debug, Clone)]
pub enum Source {
    Case(CaseId),
    Seed {
        z0: f64,
        f0: f64,
        fp0: f64,
    },
    /// Parameters only; enough for the algebraic spectrum.
    Bare,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub source: Source,
    pub half_width: Option<f64>,
    pub points: usize,
    pub p_max: u32,
    pub levels: usize,
    pub tol: f64,
    pub format: Format,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    /// Checks every flag. `needs_params` is false only for `verify`.
    pub fn from_opts(o: &Opts, needs_params: bool) -> Result<Self, CliError> {
        if !(o.hbar > 0.0) || !(o.omega > 0.0) {
            return Err(usage(format!("--hbar and --omega must be positive, got {} and {}", o.hbar, o.omega)));
        }
        if !(o.tol >= 1e-10) {
            return Err(usage(format!("--tol must be at least 1e-10, got {}", o.tol)));
        }
        if o.points < painleve_core::eigen::MIN_POINTS || o.points > painleve_core::eigen::MAX_POINTS / 2 {
            return Err(usage(format!(
                "--points must lie in [{}, {}], got {}",
                painleve_core::eigen::MIN_POINTS,
                painleve_core::eigen::MAX_POINTS / 2,
                o.points
            )));
        }
        if o.levels == 0 || o.levels > o.points / 4 {
            return Err(usage(format!("--levels must lie in [1, points/4], got {}", o.levels)));
        }
        if o.p_max > MAX_P {
            return Err(usage(format!("--p-max must be at most {MAX_P}, got {}", o.p_max)));
        }
        if let Some(l) = o.half_width {
            if !(l > 0.0) {
                return Err(usage(format!("--half-width must be positive, got {l}")));
            }
        }
        let t = o.t.unwrap_or(0.0);
        if !(t < 0.5) {
            return Err(usage(format!("--t must be below 1/2, got {t}")));
        }
        if o.t.is_some() && !matches!(o.case, Some(CaseArg::D | CaseArg::E)) {
            return Err(usage("--t only applies to --case d or e"));
        }
        let (params, source) = match o.case {
            Some(c) => {
                if o.z0.is_some() {
                    return Err(usage("--z0 cannot be combined with --case"));
                }
                let case = match c {
                    CaseArg::A => CaseId::A,
                    CaseArg::AMinus => CaseId::AMinus,
                    CaseArg::B => CaseId::B,
                    CaseArg::C => CaseId::C,
                    CaseArg::D => CaseId::D { t },
                    CaseArg::E => CaseId::E { t },
                };
                let p = case.params(o.hbar, o.omega).map_err(|e| usage(e.to_string()))?;
                (p, Source::Case(case))
            }
            None => {
                let (Some(alpha), Some(beta)) = (o.alpha, o.beta) else {
                    if !needs_params {
                        let p = CaseId::A.params(o.hbar, o.omega).map_err(|e| usage(e.to_string()))?;
                        return Ok(Self::assemble(o, p, Source::Bare));
                    }
                    return Err(usage("give --case, or both --alpha and --beta"));
                };
                let eps = Epsilon::from_value(o.epsilon.unwrap_or(1.0)).map_err(|e| usage(e.to_string()))?;
                let p = ModelParams::new(alpha, beta, eps, o.hbar, o.omega).map_err(|e| usage(e.to_string()))?;
                let source = match (o.z0, o.f0, o.fp0) {
                    (Some(z0), Some(f0), Some(fp0)) => Source::Seed { z0, f0, fp0 },
                    _ => Source::Bare,
                };
                (p, source)
            }
        };
        Ok(Self::assemble(o, params, source))
    }

    fn assemble(o: &Opts, params: ModelParams, source: Source) -> Self {
        Self {
            params,
            source,
            half_width: o.half_width,
            points: o.points,
            p_max: o.p_max,
            levels: o.levels,
            tol: o.tol,
            format: o.format,
        }
    }

    pub fn case(&self) -> Option<CaseId> {
        match self.source {
            Source::Case(c) => Some(c),
            _ => None,
        }
    }

    pub fn default_half_width(&self) -> f64 {
        12.0 * (self.params.hbar / self.params.omega).sqrt()
    }

    /// The P4 solution behind the potential, integrating a seed over
    /// z ∈ [−zL, zL].
    pub fn solution(&self, half_width: f64) -> Result<P4Solution, CliError> {
        match self.source {
            Source::Case(c) => Ok(c.solution()?),
            Source::Seed { z0, f0, fp0 } => {
                let zl = self.params.z_scale() * half_width;
                let p4 = P4Params::new(self.params.alpha, self.params.beta);
                p4_integrate(p4, z0, f0, fp0, &[-zl, zl], INTEGRATOR_TOL).map_err(|h| CliError::Compute(h.reason))
            }
            Source::Bare => Err(usage("this command needs --case or a P4 seed (--z0, --f0, --fp0)")),
        }
    }

    /// Key/value pairs describing the run, for the metadata line.
    pub fn metadata(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        let mut m = Vec::new();
        match &self.source {
            Source::Case(c) => m.push(("case", c.to_string())),
            Source::Seed { z0, f0, fp0 } => {
                m.push(("seed", format!("z0={z0};f0={f0};fp0={fp0}")));
            }
            Source::Bare => {}
        }
        m.push(("alpha", p.alpha.to_string()));
        m.push(("beta", p.beta.to_string()));
        m.push(("epsilon", p.epsilon.to_string()));
        m.push(("hbar", p.hbar.to_string()));
        m.push(("omega", p.omega.to_string()));
        m
    }
}
