//! Finite-difference bound states of −(ħ²/2)ψ'' + Vψ = Eψ on [−L, L] with
//! Dirichlet ends.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

pub const MIN_POINTS: usize = 64;
pub const MAX_POINTS: usize = (1 << 20) + 1;
const BISECT_TOL: f64 = 1e-12;
const MAX_INVERSE_ITER: usize = 50;
const RESIDUAL_TOL: f64 = 1e-10;
/// Inverse iterations always run; each one shrinks leakage from other levels.
const MIN_INVERSE_ITER: usize = 3;
const DEGENERATE_GAP: f64 = 1e-9;

/// Symmetric tridiagonal operator on the interior nodes x₁..x_{n−2}.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub half_width: f64,
    pub n: usize,
    pub hbar: f64,
    pub diag: Vec<f64>,
    pub offdiag: f64,
}

impl Discretization {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn norm_inf(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs() + 2.0 * self.offdiag.abs()))
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let e2 = self.offdiag * self.offdiag;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + self.offdiag.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.offdiag.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, &d| m.min(d - r));
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d + r));
        (lo, hi)
    }
}

pub fn discretize(v: impl Fn(f64) -> f64, half_width: f64, n: usize, hbar: f64) -> Result<Discretization> {
    if n < MIN_POINTS {
        return Err(Error::GridTooCoarse { n, min: MIN_POINTS });
    }
    if !(half_width > 0.0) || !(hbar > 0.0) {
        return Err(Error::Config(format!("need L > 0 and hbar > 0, got {half_width} and {hbar}")));
    }
    let h = 2.0 * half_width / (n - 1) as f64;
    let kin = hbar * hbar / (h * h);
    let mut diag = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        let x = -half_width + h * i as f64;
        let vx = v(x);
        if !(vx.abs() <= 1e12) {
            return Err(Error::SingularPotential { x });
        }
        diag.push(kin + vx);
    }
    Ok(Discretization { half_width, n, hbar, diag, offdiag: -0.5 * kin })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub psi: GridFunction,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub levels: Vec<Level>,
    /// Points of the finest grid used.
    pub n: usize,
}

impl EigenResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

/// The `index`-th lowest eigenvalue (from 0) by Sturm bisection.
pub fn eigenvalue(disc: &Discretization, index: usize) -> f64 {
    let (mut lo, mut hi) = disc.gershgorin();
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if disc.count_below(mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves (T − σ)x = b for tridiagonal T by Gaussian elimination with
/// partial pivoting.
fn shifted_solve(disc: &Discretization, sigma: f64, b: &[f64]) -> Vec<f64> {
    let m = disc.dim();
    let e = disc.offdiag;
    let tiny = f64::EPSILON * disc.norm_inf();
    // rows hold (u0, u1, u2): diagonal and two superdiagonals after pivoting
    let mut u0 = vec![0.0; m];
    let mut u1 = vec![0.0; m];
    let mut u2 = vec![0.0; m];
    let mut rhs = b.to_vec();
    let mut cur = (disc.diag[0] - sigma, if m > 1 { e } else { 0.0 }, 0.0);
    for i in 0..m {
        if i + 1 == m {
            u0[i] = if cur.0.abs() < tiny { tiny } else { cur.0 };
            u1[i] = 0.0;
            u2[i] = 0.0;
            break;
        }
        let next = (e, disc.diag[i + 1] - sigma, if i + 2 < m { e } else { 0.0 });
        let (top, bot, swap) = if next.0.abs() > cur.0.abs() {
            ((next.0, next.1, next.2), (cur.0, cur.1, cur.2), true)
        } else {
            ((cur.0, cur.1, cur.2), (next.0, next.1, next.2), false)
        };
        if swap {
            rhs.swap(i, i + 1);
        }
        let piv = if top.0.abs() < tiny { tiny } else { top.0 };
        let l = bot.0 / piv;
        u0[i] = piv;
        u1[i] = top.1;
        u2[i] = top.2;
        rhs[i + 1] -= l * rhs[i];
        cur = (bot.1 - l * top.1, bot.2 - l * top.2, 0.0);
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = rhs[i];
        if i + 1 < m {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < m {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / u0[i];
    }
    x
}

fn apply(disc: &Discretization, x: &[f64]) -> Vec<f64> {
    let m = disc.dim();
    (0..m)
        .map(|i| {
            let mut s = disc.diag[i] * x[i];
            if i > 0 {
                s += disc.offdiag * x[i - 1];
            }
            if i + 1 < m {
                s += disc.offdiag * x[i + 1];
            }
            s
        })
        .collect()
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvectors for given eigenvalues (ascending) by shifted inverse iteration.
pub fn eigenvectors(disc: &Discretization, energies: &[f64]) -> Result<EigenResult> {
    for (i, w) in energies.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::Convergence { level: i + 1 });
        }
    }
    let m = disc.dim();
    let tol = RESIDUAL_TOL * disc.norm_inf().max(1.0);
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(energies.len());
    for (k, &e) in energies.iter().enumerate() {
        let mut x: Vec<f64> = (0..m).map(|i| 1.0 + 0.1 * ((i * 7 + k * 3) % 11) as f64).collect();
        normalize(&mut x);
        let close: Vec<usize> = (0..k).filter(|&j| (energies[j] - e).abs() < DEGENERATE_GAP).collect();
        let mut converged = false;
        for it in 0..MAX_INVERSE_ITER {
            x = shifted_solve(disc, e, &x);
            for &j in &close {
                let c = dot(&x, &vecs[j]);
                for (xi, vj) in x.iter_mut().zip(&vecs[j]) {
                    *xi -= c * vj;
                }
            }
            normalize(&mut x);
            let ax = apply(disc, &x);
            let r = ax.iter().zip(&x).map(|(a, xi)| (a - e * xi).powi(2)).sum::<f64>().sqrt();
            if r < tol && it + 1 >= MIN_INVERSE_ITER {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence { level: k });
        }
        vecs.push(x);
    }
    let h = disc.spacing();
    let levels = energies
        .iter()
        .zip(vecs)
        .map(|(&energy, v)| {
            let imax = v.iter().enumerate().fold(0, |b, (i, a)| if a.abs() > v[b].abs() { i } else { b });
            let sign = if v[imax] < 0.0 { -1.0 } else { 1.0 };
            let scale = sign / h.sqrt();
            let mut values = Vec::with_capacity(disc.n);
            values.push(0.0);
            values.extend(v.iter().map(|a| a * scale));
            values.push(0.0);
            Level {
                energy,
                psi: GridFunction { half_width: disc.half_width, values, extrapolated: 0 },
                error_estimate: f64::NAN,
            }
        })
        .collect();
    Ok(EigenResult { levels, n: disc.n })
}

pub fn lowest_eigenvalues(disc: &Discretization, k: usize) -> Vec<f64> {
    (0..k).map(|i| eigenvalue(disc, i)).collect()
}

/// The `k` lowest eigenpairs of the discrete operator.
pub fn eigen_lowest(disc: &Discretization, k: usize) -> Result<EigenResult> {
    if k == 0 || k > disc.n / 4 {
        return Err(Error::Config(format!("need 1 <= k <= n/4, got k = {k}, n = {}", disc.n)));
    }
    eigenvectors(disc, &lowest_eigenvalues(disc, k))
}

/// Grid-doubling refinement with order-2 Richardson extrapolation, starting
/// from `n0` points. Stops when two successive extrapolations agree to `tol`.
pub fn refine(
    v: impl Fn(f64) -> f64,
    k: usize,
    half_width: f64,
    hbar: f64,
    tol: f64,
    n0: usize,
) -> Result<EigenResult> {
    refine_by(v, k, half_width, hbar, tol, n0, lowest_eigenvalues)
}

/// As [`refine`], with the eigenvalue search supplied by the caller (for
/// example a parallel one). `values(disc, k)` must return the k lowest.
pub fn refine_by(
    v: impl Fn(f64) -> f64,
    k: usize,
    half_width: f64,
    hbar: f64,
    tol: f64,
    n0: usize,
    values: impl Fn(&Discretization, usize) -> Vec<f64>,
) -> Result<EigenResult> {
    if !(tol >= 1e-10) {
        return Err(Error::Config(format!("tolerance must be at least 1e-10, got {tol}")));
    }
    if k == 0 || k > n0 / 4 {
        return Err(Error::Config(format!("need 1 <= k <= n/4, got k = {k}, n = {n0}")));
    }
    let mut n = n0;
    let mut disc = discretize(&v, half_width, n, hbar)?;
    let mut coarse = values(&disc, k);
    let mut prev: Option<Vec<f64>> = None;
    loop {
        n = 2 * (n - 1) + 1;
        if n > MAX_POINTS {
            return Err(Error::BudgetExceeded { n });
        }
        disc = discretize(&v, half_width, n, hbar)?;
        let fine = values(&disc, k);
        let extra: Vec<f64> = fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
        if let Some(p) = &prev {
            let diffs: Vec<f64> = extra.iter().zip(p).map(|(a, b)| (a - b).abs()).collect();
            if diffs.iter().all(|d| *d < tol) {
                let mut res = eigenvectors(&disc, &fine)?;
                for ((l, e), d) in res.levels.iter_mut().zip(extra).zip(diffs) {
                    l.energy = e;
                    l.error_estimate = d;
                }
                return Ok(res);
            }
        }
        prev = Some(extra);
        coarse = fine;
    }
}
