//! Brute-force Fock-space check of the photon-subtraction model.
//!
//! After the tap beam splitter the tripartite state is
//! `Σ_n Σ_m √(1−ξ²) ξⁿ √(C(n,m)(1−T)^m T^(n−m)) |n, m, n−m⟩`.
//! Projecting the tap onto `|k⟩` leaves the unnormalized bipartite state
//! `Σ_{n≥k} d_n |n, n−k⟩`, whose norm is the heralding probability. Second
//! moments are then read off with ladder operators, without using any of the
//! closed forms from [`crate::source`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::source::{self, SourceParams};

/// Default ceiling on the truncation photon number.
pub const DEFAULT_MAX_PHOTONS: usize = 10_000;

/// Projected state `Σ_{n=k}^{N_max} d_n |n, n−k⟩`, unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedBipartiteState {
    pub k: usize,
    /// `coeffs[i]` is `d_{k+i}`.
    pub coeffs: Vec<f64>,
    pub n_max: usize,
    /// Upper bound on the probability mass dropped beyond `n_max`.
    pub tail_bound: f64,
}

impl TruncatedBipartiteState {
    /// Amplitude of `|n_a, n_b⟩`.
    fn amplitude(&self, n_a: usize, n_b: usize) -> f64 {
        if n_a < self.k || n_a - self.k != n_b {
            return 0.0;
        }
        self.coeffs.get(n_a - self.k).copied().unwrap_or(0.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|d| d * d).sum()
    }

    /// `⟨ψ| ops[0] ops[1] … |ψ⟩`, operators applied right to left.
    fn expect(&self, ops: &[(Mode, Ladder)]) -> f64 {
        let mut total = 0.0;
        for (i, &d) in self.coeffs.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let mut n = [self.k + i, i];
            let mut weight = d;
            for &(mode, op) in ops.iter().rev() {
                let slot = &mut n[mode as usize];
                match op {
                    Ladder::Lower => {
                        if *slot == 0 {
                            weight = 0.0;
                            break;
                        }
                        weight *= (*slot as f64).sqrt();
                        *slot -= 1;
                    }
                    Ladder::Raise => {
                        *slot += 1;
                        weight *= (*slot as f64).sqrt();
                    }
                }
            }
            if weight != 0.0 {
                total += weight * self.amplitude(n[0], n[1]);
            }
        }
        total
    }

    /// Unnormalized `⟨q₁ q₂ …⟩` for a product of quadratures.
    fn quadrature_moment(&self, quads: &[(Mode, Quadrature)]) -> Complex64 {
        // Expand each quadrature into its two ladder terms.
        let mut sum = Complex64::new(0.0, 0.0);
        let terms = 1usize << quads.len();
        for mask in 0..terms {
            let mut coeff = Complex64::new(1.0, 0.0);
            let ops: Vec<(Mode, Ladder)> = quads
                .iter()
                .enumerate()
                .map(|(j, &(mode, q))| {
                    let raise = mask & (1 << j) != 0;
                    let (ladder, c) = q.term(raise);
                    coeff *= c;
                    (mode, ladder)
                })
                .collect();
            sum += coeff * self.expect(&ops);
        }
        sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Kept = 0,
    Sent = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    Lower,
    Raise,
}

/// `x = a + a†`, `p = −i(a − a†)`; vacuum variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quadrature {
    X,
    P,
}

impl Quadrature {
    fn term(self, raise: bool) -> (Ladder, Complex64) {
        match (self, raise) {
            (Quadrature::X, false) => (Ladder::Lower, Complex64::new(1.0, 0.0)),
            (Quadrature::X, true) => (Ladder::Raise, Complex64::new(1.0, 0.0)),
            (Quadrature::P, false) => (Ladder::Lower, Complex64::new(0.0, -1.0)),
            (Quadrature::P, true) => (Ladder::Raise, Complex64::new(0.0, 1.0)),
        }
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| (((n - k + i) as f64) / i as f64).ln()).sum()
}

/// Smallest `N ≥ 0` with `ξ^(2(N+1)) < tol`.
fn truncation_photons(xi_sq: f64, tol: f64, cap: usize) -> Result<usize> {
    if xi_sq == 0.0 {
        return Ok(0);
    }
    let estimate = (tol.ln() / xi_sq.ln()).floor().max(0.0);
    if estimate > cap as f64 + 2.0 {
        return Err(Error::Truncation { needed: estimate as usize, cap });
    }
    let mut n = (estimate as usize).saturating_sub(2);
    while xi_sq.powi(n as i32 + 1) >= tol {
        n += 1;
    }
    if n > cap {
        return Err(Error::Truncation { needed: n, cap });
    }
    Ok(n)
}

pub fn build_projected_state(v: f64, t_ps: f64, k: usize, tol: f64) -> Result<TruncatedBipartiteState> {
    build_projected_state_capped(v, t_ps, k, tol, DEFAULT_MAX_PHOTONS)
}

pub fn build_projected_state_capped(
    v: f64,
    t_ps: f64,
    k: usize,
    tol: f64,
    cap: usize,
) -> Result<TruncatedBipartiteState> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(Error::Domain(format!("EPR variance V = {v} must be ≥ 1")));
    }
    if !(t_ps > 0.0 && t_ps <= 1.0) || (t_ps == 1.0 && k > 0) {
        return Err(Error::Domain(format!("T_PS = {t_ps} is invalid for k = {k}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain(format!("truncation tolerance {tol} must lie in (0, 1)")));
    }
    let xi_sq = (v - 1.0) / (v + 1.0);
    let n_max = truncation_photons(xi_sq, tol, cap)?.max(k);
    let tail_bound = xi_sq.powi(n_max as i32 + 1);

    let coeffs = (k..=n_max)
        .map(|n| {
            if xi_sq == 0.0 {
                return if n == 0 { 1.0 } else { 0.0 };
            }
            let mut ln_d = 0.5 * (1.0 - xi_sq).ln() + 0.5 * n as f64 * xi_sq.ln();
            let mut ln_split = ln_binomial(n, k);
            if k > 0 {
                ln_split += k as f64 * (1.0 - t_ps).ln();
            }
            if n > k {
                ln_split += (n - k) as f64 * t_ps.ln();
            }
            ln_d += 0.5 * ln_split;
            ln_d.exp()
        })
        .collect();

    Ok(TruncatedBipartiteState { k, coeffs, n_max, tail_bound })
}

/// Normalized moments of the projected state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleMoments {
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Tolerance for the structural checks on moments that vanish identically.
const STRUCTURE_TOL: f64 = 1e-10;

pub fn oracle_moments(state: &TruncatedBipartiteState) -> Result<OracleMoments> {
    use Mode::*;
    use Quadrature::*;

    let p = state.norm_sq();
    if !(p >= 10.0 * state.tail_bound) || p == 0.0 {
        return Err(Error::UnreliableNormalization { probability: p, tail: state.tail_bound });
    }
    let m = |q: &[(Mode, Quadrature)]| state.quadrature_moment(q) / p;

    for q in [(Kept, X), (Kept, P), (Sent, X), (Sent, P)] {
        let first = m(&[q]);
        if first.norm() > 1e-12 {
            return Err(Error::Structure(format!("first moment {q:?} = {first}")));
        }
    }

    let xa = m(&[(Kept, X), (Kept, X)]);
    let pa = m(&[(Kept, P), (Kept, P)]);
    let xb = m(&[(Sent, X), (Sent, X)]);
    let pb = m(&[(Sent, P), (Sent, P)]);
    let xx = m(&[(Kept, X), (Sent, X)]);
    let pp = m(&[(Kept, P), (Sent, P)]);
    let xp = m(&[(Kept, X), (Sent, P)]);
    let px = m(&[(Kept, P), (Sent, X)]);

    let scale = xa.re.abs().max(1.0);
    let check = |what: &str, value: Complex64| -> Result<()> {
        if value.norm() > STRUCTURE_TOL * scale {
            return Err(Error::Structure(format!("{what} = {value}")));
        }
        Ok(())
    };
    check("<x_A x_A> - <p_A p_A>", xa - pa)?;
    check("<x_B x_B> - <p_B p_B>", xb - pb)?;
    check("<x_A p_B>", xp)?;
    check("<p_A x_B>", px)?;
    check("<x_A x_B> + <p_A p_B>", xx + pp)?;
    for (what, value) in [("<x_A x_A>", xa), ("<x_B x_B>", xb), ("<x_A x_B>", xx)] {
        check(&format!("Im {what}"), Complex64::new(0.0, value.im))?;
    }

    Ok(OracleMoments { p, x: xa.re, y: xb.re, z: xx.re })
}

/// Comparison of the closed forms against the Fock oracle at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub v: f64,
    pub t_ps: f64,
    pub k: u32,
    pub err_p: f64,
    pub err_x: f64,
    pub err_y: f64,
    pub err_z: f64,
    pub tail_bound: f64,
    pub pass: bool,
}

impl ValidationReport {
    pub fn max_error(&self) -> f64 {
        self.err_p.max(self.err_x).max(self.err_y).max(self.err_z)
    }
}

fn relative_error(measured: f64, reference: f64) -> f64 {
    let diff = (measured - reference).abs();
    if reference == 0.0 {
        diff
    } else {
        diff / reference.abs()
    }
}

/// Truncation tolerance used when none is given, relative to the heralding
/// probability.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-15;

pub fn validate_against_analytic(
    v: f64,
    t_ps: f64,
    k: u32,
    tol: f64,
    truncation_tol: f64,
) -> Result<ValidationReport> {
    let analytic = source::subtracted_covariance(&SourceParams::new(v, k, t_ps)?)?;
    // Moments are compared relatively, so the dropped mass is bounded
    // relative to the heralding probability.
    let state = build_projected_state(v, t_ps, k as usize, truncation_tol * analytic.p.min(1.0))?;
    let oracle = oracle_moments(&state)?;

    let err_p = relative_error(oracle.p, analytic.p);
    let err_x = relative_error(oracle.x, analytic.x);
    let err_y = relative_error(oracle.y, analytic.y);
    let err_z = relative_error(oracle.z, analytic.z);
    let p_ok = err_p <= tol || (oracle.p - analytic.p).abs() <= state.tail_bound;
    let pass = p_ok && err_x <= tol && err_y <= tol && err_z <= tol;
    Ok(ValidationReport { v, t_ps, k, err_p, err_x, err_y, err_z, tail_bound: state.tail_bound, pass })
}

/// The reference grid `V × T_PS × k`.
pub fn acceptance_grid() -> Vec<(f64, f64, u32)> {
    let mut grid = Vec::new();
    for v in [3.0, 15.0, 60.0] {
        for t in [0.5, 0.857, 0.95] {
            for k in 0..=3 {
                grid.push((v, t, k));
            }
        }
    }
    grid
}

/// Runs [`validate_against_analytic`] over `grid`, in parallel, keeping order.
pub fn validate_grid(
    grid: &[(f64, f64, u32)],
    tol: f64,
    truncation_tol: f64,
) -> Vec<Result<ValidationReport>> {
    grid.par_iter()
        .map(|&(v, t, k)| validate_against_analytic(v, t, k, tol, truncation_tol))
        .collect()
}
