use alloc::format;
use alloc::string::String;
use core::fmt;

use crate::error::{Error, Result};
use crate::special::{P4Solution, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Epsilon::Plus)
        } else if v == -1.0 {
            Ok(Epsilon::Minus)
        } else {
            Err(Error::Config(format!("epsilon must be +1 or -1, got {v}")))
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::Plus => "+1",
            Epsilon::Minus => "-1",
        })
    }
}

/// Physical parameters (α, β, ε, ħ, ω) of the potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: Epsilon,
    pub hbar: f64,
    pub omega: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, epsilon: Epsilon, hbar: f64, omega: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Config(format!("hbar and omega must be positive, got {hbar} and {omega}")));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Config(String::from("alpha and beta must be finite")));
        }
        Ok(Self { alpha, beta, epsilon, hbar, omega })
    }

    pub fn eps(&self) -> f64 {
        self.epsilon.value()
    }

    /// Conversion factor z = scale · x.
    pub fn z_scale(&self) -> f64 {
        (self.omega / self.hbar).sqrt()
    }

    /// Quantum ħω.
    pub fn quantum(&self) -> f64 {
        self.hbar * self.omega
    }
}

/// The special cases with closed-form P4 solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseId {
    /// α = 5, β = −8, ε = +1.
    A,
    /// α = 5, β = −8, ε = −1.
    AMinus,
    /// α = 0, β = −2/9, ε = +1.
    B,
    /// α = −1, β = −32/9, ε = +1.
    C,
    /// erfc family, ε = +1.
    D { t: f64 },
    /// erfc family, ε = −1.
    E { t: f64 },
}

impl CaseId {
    pub fn epsilon(self) -> Epsilon {
        match self {
            CaseId::AMinus | CaseId::E { .. } => Epsilon::Minus,
            _ => Epsilon::Plus,
        }
    }

    pub fn alpha_beta(self) -> (f64, f64) {
        match self {
            CaseId::A | CaseId::AMinus => (5.0, -8.0),
            CaseId::B => (0.0, -2.0 / 9.0),
            CaseId::C => (-1.0, -32.0 / 9.0),
            CaseId::D { .. } | CaseId::E { .. } => (0.0, -2.0),
        }
    }

    pub fn params(self, hbar: f64, omega: f64) -> Result<ModelParams> {
        let (a, b) = self.alpha_beta();
        ModelParams::new(a, b, self.epsilon(), hbar, omega)
    }

    pub fn solution(self) -> Result<P4Solution> {
        match self {
            CaseId::A | CaseId::AMinus => Ok(P4Solution::rational(Rational::A)),
            CaseId::B => Ok(P4Solution::rational(Rational::B)),
            CaseId::C => Ok(P4Solution::rational(Rational::C)),
            CaseId::D { t } | CaseId::E { t } => P4Solution::erfc_family(t),
        }
    }

    /// Checks that `p` carries this case's (α, β, ε).
    pub fn check(self, p: &ModelParams) -> Result<()> {
        let (a, b) = self.alpha_beta();
        if (p.alpha - a).abs() > 1e-12 || (p.beta - b).abs() > 1e-12 || p.epsilon != self.epsilon() {
            return Err(Error::Config(format!(
                "case {self} needs (alpha, beta, epsilon) = ({a}, {b}, {}), got ({}, {}, {})",
                self.epsilon(),
                p.alpha,
                p.beta,
                p.epsilon
            )));
        }
        Ok(())
    }

    pub fn all(t: f64) -> [CaseId; 6] {
        [CaseId::A, CaseId::AMinus, CaseId::B, CaseId::C, CaseId::D { t }, CaseId::E { t }]
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseId::A => f.write_str("a"),
            CaseId::AMinus => f.write_str("a-minus"),
            CaseId::B => f.write_str("b"),
            CaseId::C => f.write_str("c"),
            CaseId::D { t } => write!(f, "d(t={t})"),
            CaseId::E { t } => write!(f, "e(t={t})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_units() {
        assert!(ModelParams::new(0.0, 0.0, Epsilon::Plus, 0.0, 1.0).is_err());
        assert!(ModelParams::new(0.0, 0.0, Epsilon::Plus, 1.0, -1.0).is_err());
    }

    #[test]
    fn case_check_catches_mismatch() {
        let p = CaseId::A.params(1.0, 1.0).unwrap();
        assert!(CaseId::A.check(&p).is_ok());
        assert!(CaseId::AMinus.check(&p).is_err());
        assert!(CaseId::B.check(&p).is_err());
    }

    #[test]
    fn epsilon_parsing() {
        assert_eq!(Epsilon::from_value(-1.0).unwrap(), Epsilon::Minus);
        assert!(Epsilon::from_value(0.5).is_err());
    }
}
