//! Ground-state correlators of the anisotropic XY chain in a transverse
//! field, and the two-spin reduced density matrix they determine.
//!
//! Everything is built from the sequence
//!
//! ```text
//! G_r = ⟨ [(h − cos φ) cos(rφ) + γ sin φ sin(rφ)] / Λ(φ) ⟩,
//! Λ(φ) = √((h − cos φ)² + γ² sin² φ),
//! ```
//!
//! where the average is `(1/N) Σ_k` over the antiperiodic momenta
//! `φ_k = π(2k + 1)/N` for a ring of odd length `N`, or `(1/π) ∫_0^π dφ` in
//! the thermodynamic limit. At `h = 0` the numerator reduces to
//! `−cos φ cos(rφ) + γ sin φ sin(rφ)`.
//!
//! The half-ring average `(1/M) Σ_{k=1}^{M}` over `φ_k = 2πk/N`
//! (`N = 2M + 1`) has the same limit and is available as
//! [`g_r_finite_printed`]. It is not the correlation function of any
//! fermionic state, and near the factorizing field `h² + γ² = 1` the
//! reduced density matrix it produces has eigenvalues of order `−1/N`;
//! the chain therefore uses the antiperiodic sum.
//!
//! With that sequence,
//! `⟨σᶻ⟩ = −G₀`, `⟨σᶻ_i σᶻ_{i+r}⟩ = G₀² − G_r G_{−r}`, and the transverse
//! correlators are r×r Toeplitz determinants:
//! `⟨σˣσˣ⟩ = det[G_{m−n−1}]`, `⟨σʸσʸ⟩ = det[G_{m−n+1}]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::qstate::TwoQubitState;
use crate::quadrature::{integrate, QuadOptions};

/// Largest supported site separation for the Toeplitz determinants.
pub const MAX_SEPARATION: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainSize {
    /// A ring of odd length `N ≥ 3`.
    Finite(usize),
    Thermodynamic,
}

impl ChainSize {
    pub fn validate(self) -> Result<Self> {
        if let ChainSize::Finite(n) = self {
            if n < 3 || n % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "chain length must be odd and at least 3, got {n}"
                )));
            }
        }
        Ok(self)
    }

    /// `N` as a number, infinite in the thermodynamic limit.
    pub fn as_f64(self) -> f64 {
        match self {
            ChainSize::Finite(n) => n as f64,
            ChainSize::Thermodynamic => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for ChainSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChainSize::Finite(n) => write!(f, "{n}"),
            ChainSize::Thermodynamic => f.write_str("inf"),
        }
    }
}

/// Anisotropy, field, chain size and the separation of the spin pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainParams {
    pub gamma: f64,
    pub h: f64,
    pub size: ChainSize,
    pub r: usize,
}

impl ChainParams {
    pub fn new(gamma: f64, h: f64, size: ChainSize, r: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "anisotropy must lie in [0, 1], got {gamma}"
            )));
        }
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "field must be finite and non-negative, got {h}"
            )));
        }
        if r == 0 || r > MAX_SEPARATION {
            return Err(Error::InvalidParameter(format!(
                "site separation must be in 1..={MAX_SEPARATION}, got {r}"
            )));
        }
        Ok(ChainParams {
            gamma,
            h,
            size: size.validate()?,
            r,
        })
    }

    pub fn thermodynamic(gamma: f64, h: f64, r: usize) -> Result<Self> {
        Self::new(gamma, h, ChainSize::Thermodynamic, r)
    }

    pub fn finite(gamma: f64, h: f64, n: usize, r: usize) -> Result<Self> {
        Self::new(gamma, h, ChainSize::Finite(n), r)
    }

    pub fn with_h(self, h: f64) -> Result<Self> {
        Self::new(self.gamma, h, self.size, self.r)
    }

    /// G_k for this chain, dispatching on size.
    pub fn g(&self, k: i64) -> Result<f64> {
        match self.size {
            ChainSize::Finite(n) => g_r_finite(self.gamma, self.h, n, k),
            ChainSize::Thermodynamic => g_r_limit(self.gamma, self.h, k),
        }
    }
}

fn numerator(gamma: f64, h: f64, r: i64, phi: f64) -> f64 {
    let rp = r as f64 * phi;
    (h - phi.cos()) * rp.cos() + gamma * phi.sin() * rp.sin()
}

fn dispersion(gamma: f64, h: f64, phi: f64) -> f64 {
    let a = h - phi.cos();
    let b = gamma * phi.sin();
    a.hypot(b)
}

/// G_r on a ring of odd length `n`, averaged over the antiperiodic momenta
/// `π(2k + 1)/n`, `k = 0..n`.
pub fn g_r_finite(gamma: f64, h: f64, n: usize, r: i64) -> Result<f64> {
    ChainSize::Finite(n).validate()?;
    let m = (n - 1) / 2;
    let term = |k: usize| {
        let phi = PI * (2 * k + 1) as f64 / n as f64;
        let lambda = dispersion(gamma, h, phi);
        if lambda == 0.0 {
            return Err(Error::DegenerateMode { k, n });
        }
        Ok(numerator(gamma, h, r, phi) / lambda)
    };
    // The summand is even in φ, so momenta k and n − 1 − k pair up and
    // φ = π (k = m) is left over.
    let mut sum = 0.0;
    for k in 0..m {
        sum += term(k)?;
    }
    Ok((2.0 * sum + term(m)?) / n as f64)
}

/// G_r as the half-ring average `(1/M) Σ_{k=1}^{M}` over `φ_k = 2πk/n`.
///
/// Converges to the same thermodynamic limit as [`g_r_finite`] but does not
/// yield positive reduced states at finite `n`; kept for comparison.
pub fn g_r_finite_printed(gamma: f64, h: f64, n: usize, r: i64) -> Result<f64> {
    ChainSize::Finite(n).validate()?;
    let m = (n - 1) / 2;
    let mut sum = 0.0;
    for k in 1..=m {
        let phi = 2.0 * PI * k as f64 / n as f64;
        let lambda = dispersion(gamma, h, phi);
        if lambda == 0.0 {
            return Err(Error::DegenerateMode { k, n });
        }
        sum += numerator(gamma, h, r, phi) / lambda;
    }
    Ok(sum / m as f64)
}

/// G_r in the thermodynamic limit, by adaptive quadrature to 1e-10.
///
/// At γ = 0 and h < 1 the integrand jumps at φ = arccos h; the interval is
/// split there.
pub fn g_r_limit(gamma: f64, h: f64, r: i64) -> Result<f64> {
    g_r_limit_with(gamma, h, r, QuadOptions::default())
}

pub fn g_r_limit_with(gamma: f64, h: f64, r: i64, opts: QuadOptions) -> Result<f64> {
    let mut breaks = Vec::new();
    if gamma == 0.0 && h < 1.0 {
        breaks.push(h.acos());
    }
    // Near the critical field the integrand varies on the scale |h − 1|/γ
    // close to φ = 0.
    let delta = (h - 1.0).abs();
    if gamma > 0.0 && delta > 0.0 && delta < 0.1 {
        let scale = delta / gamma;
        breaks.extend([scale, 10.0 * scale].iter().filter(|x| **x < 1.0));
    }
    let f = |phi: f64| {
        let lambda = dispersion(gamma, h, phi);
        if lambda == 0.0 {
            // Measure-zero point; only reachable if a node lands on arccos h.
            0.0
        } else {
            numerator(gamma, h, r, phi) / lambda
        }
    };
    let res = integrate(
        f,
        0.0,
        PI,
        &breaks,
        QuadOptions {
            abs_tol: opts.abs_tol * PI,
            ..opts
        },
    )?;
    Ok(res.value / PI)
}

/// G_k over the window needed for separation `r`, plus the derived
/// single-site and two-site correlators.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorSet {
    pub r: usize,
    /// G_k for k = −r−1 ..= r+1, stored at index `k + r + 1`.
    g: Vec<f64>,
    pub sz: f64,
    pub szsz: f64,
    pub sxsx: f64,
    pub sysy: f64,
}

impl CorrelatorSet {
    /// G_k for |k| ≤ r + 1.
    pub fn g(&self, k: i64) -> f64 {
        let idx = k + self.r as i64 + 1;
        assert!(
            idx >= 0 && (idx as usize) < self.g.len(),
            "G_{k} outside stored window for r = {}",
            self.r
        );
        self.g[idx as usize]
    }

    pub fn g_window(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let off = self.r as i64 + 1;
        self.g
            .iter()
            .enumerate()
            .map(move |(i, v)| (i as i64 - off, *v))
    }

    /// Builds the correlators from a G_k window; `g` must cover −r−1..=r+1.
    pub fn from_g(r: usize, g: Vec<f64>) -> Self {
        assert_eq!(g.len(), 2 * r + 3);
        let mut set = CorrelatorSet {
            r,
            g,
            sz: 0.0,
            szsz: 0.0,
            sxsx: 0.0,
            sysy: 0.0,
        };
        let ri = r as i64;
        let g0 = set.g(0);
        set.sz = -g0;
        set.szsz = g0 * g0 - set.g(ri) * set.g(-ri);
        set.sxsx = toeplitz_det(r, |d| set.g(d - 1));
        set.sysy = toeplitz_det(r, |d| set.g(d + 1));
        set
    }
}

/// det of the r×r matrix with entries `entry(m − n)`.
fn toeplitz_det(r: usize, entry: impl Fn(i64) -> f64) -> f64 {
    if r == 1 {
        return entry(0);
    }
    let rows = (0..r)
        .map(|m| (0..r).map(|n| entry(m as i64 - n as i64)).collect())
        .collect();
    determinant(rows)
}

pub fn correlators(params: &ChainParams) -> Result<CorrelatorSet> {
    let ri = params.r as i64;
    let g = (-ri - 1..=ri + 1)
        .map(|k| params.g(k))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelatorSet::from_g(params.r, g))
}

/// The two-spin reduced density matrix at separation `params.r`.
pub fn reduced_state(params: &ChainParams) -> Result<TwoQubitState> {
    let c = correlators(params)?;
    state_from_correlators(&c)
}

pub fn state_from_correlators(c: &CorrelatorSet) -> Result<TwoQubitState> {
    TwoQubitState::from_pauli(c.sz, c.sz, c.szsz, c.sxsx, c.sysy)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct transcriptions of the two finite sums with no shared helpers.
    fn summand(gamma: f64, h: f64, r: i64, p: f64) -> f64 {
        let l = ((gamma * p.sin()).powi(2) + (h - p.cos()).powi(2)).sqrt();
        ((h - p.cos()) * (r as f64 * p).cos() + gamma * p.sin() * (r as f64 * p).sin()) / l
    }

    fn brute_printed(gamma: f64, h: f64, n: usize, r: i64) -> f64 {
        let m = (n - 1) / 2;
        (1..=m)
            .map(|k| summand(gamma, h, r, 2.0 * PI * k as f64 / n as f64))
            .sum::<f64>()
            / m as f64
    }

    fn brute_antiperiodic(gamma: f64, h: f64, n: usize, r: i64) -> f64 {
        (0..n)
            .map(|k| summand(gamma, h, r, PI * (2 * k + 1) as f64 / n as f64))
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn ising_zero_field_finite_sum() {
        for n in [3, 11, 101] {
            assert!((g_r_finite(1.0, 0.0, n, -1).unwrap() + 1.0).abs() < 1e-12);
            assert!((g_r_finite_printed(1.0, 0.0, n, -1).unwrap() + 1.0).abs() < 1e-12);
            // The antiperiodic momenta are the n-th roots of −1, whose cosines sum to 0.
            assert!(g_r_finite(1.0, 0.0, n, 0).unwrap().abs() < 1e-12);
        }
        // Half-ring average of −cos φ_k is 1/(2M).
        let n = 1001;
        assert!(g_r_finite_printed(1.0, 0.0, n, 0).unwrap().abs() < 2.0 / n as f64);
    }

    #[test]
    fn finite_sums_match_hand_sums() {
        let v = g_r_finite_printed(0.6, 0.5, 11, 1).unwrap();
        assert!((v - brute_printed(0.6, 0.5, 11, 1)).abs() < 1e-15);
        for r in [-3, 0, 1, 4] {
            let v = g_r_finite(0.6, 0.5, 11, r).unwrap();
            assert!((v - brute_antiperiodic(0.6, 0.5, 11, r)).abs() < 1e-14);
        }
    }

    #[test]
    fn printed_zero_field_form() {
        // At h = 0 the half-ring sum is
        // (1/M) Σ [−cos φ cos rφ + γ sin φ sin rφ]/√(γ² sin² φ + cos² φ).
        let (gamma, n, r) = (0.6, 21, 2);
        let m = 10;
        let printed: f64 = (1..=m)
            .map(|k| {
                let p = 2.0 * PI * k as f64 / n as f64;
                let l = ((gamma * p.sin()).powi(2) + p.cos().powi(2)).sqrt();
                (-p.cos() * (r as f64 * p).cos() + gamma * p.sin() * (r as f64 * p).sin()) / l
            })
            .sum::<f64>()
            / m as f64;
        assert!((g_r_finite_printed(gamma, 0.0, n, r as i64).unwrap() - printed).abs() < 1e-14);
    }

    #[test]
    fn printed_sum_breaks_positivity() {
        let (gamma, h, n) = (0.6, 0.856, 101);
        let g = (-2..=2)
            .map(|k| g_r_finite_printed(gamma, h, n, k).unwrap())
            .collect();
        let c = CorrelatorSet::from_g(1, g);
        assert!(matches!(
            state_from_correlators(&c),
            Err(Error::NotPositive { min_eigenvalue }) if min_eigenvalue < -1e-3
        ));
        assert!(reduced_state(&ChainParams::finite(gamma, h, n, 1).unwrap()).is_ok());
    }

    #[test]
    fn finite_size_validation() {
        assert!(matches!(
            g_r_finite(0.5, 0.5, 10, 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            g_r_finite(0.5, 0.5, 1, 0),
            Err(Error::InvalidParameter(_))
        ));
        // At γ = 0 the dispersion vanishes where h = cos φ_k.
        let n = 7;
        let h = (PI / n as f64).cos();
        assert_eq!(
            g_r_finite(0.0, h, n, 0),
            Err(Error::DegenerateMode { k: 0, n })
        );
        let h = (2.0 * PI / n as f64).cos();
        assert_eq!(
            g_r_finite_printed(0.0, h, n, 0),
            Err(Error::DegenerateMode { k: 1, n })
        );
    }

    #[test]
    fn ising_zero_field_limit() {
        assert!(g_r_limit(1.0, 0.0, 2).unwrap().abs() < 1e-10);
        assert!((g_r_limit(1.0, 0.0, -1).unwrap() + 1.0).abs() < 1e-10);
        assert!(g_r_limit(1.0, 0.0, 0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn xx_chain_jump_is_handled() {
        // γ = 0, h < 1: integrand is −1 below arccos h and +1 above, times cos(rφ).
        let h: f64 = 0.3;
        let phi0 = h.acos();
        let g0 = g_r_limit(0.0, h, 0).unwrap();
        assert!((g0 - (PI - 2.0 * phi0) / PI).abs() < 1e-12);
        let g1 = g_r_limit(0.0, h, 1).unwrap();
        assert!((g1 - (-2.0 * phi0.sin()) / PI).abs() < 1e-12);
    }

    #[test]
    fn limit_is_large_n_limit_of_sum() {
        let lim = g_r_limit(0.6, 0.5, 1).unwrap();
        let fin = g_r_finite(0.6, 0.5, 4001, 1).unwrap();
        assert!((lim - fin).abs() < 1e-3);
        let printed = g_r_finite_printed(0.6, 0.5, 4001, 1).unwrap();
        assert!((lim - printed).abs() < 1e-3);
    }

    #[test]
    fn ising_zero_field_correlators() {
        let p = ChainParams::thermodynamic(1.0, 0.0, 1).unwrap();
        let c = correlators(&p).unwrap();
        assert!(c.sz.abs() < 1e-10);
        assert!((c.sxsx + 1.0).abs() < 1e-10);
        assert!(c.sysy.abs() < 1e-10);
        assert!(c.szsz.abs() < 1e-10);
    }

    #[test]
    fn toeplitz_reduces_at_unit_separation() {
        let p = ChainParams::finite(0.6, 0.7, 51, 1).unwrap();
        let c = correlators(&p).unwrap();
        assert_eq!(c.sxsx, c.g(-1));
        assert_eq!(c.sysy, c.g(1));
        assert_eq!(c.szsz, c.g(0) * c.g(0) - c.g(1) * c.g(-1));
        assert_eq!(c.g_window().count(), 5);
    }

    #[test]
    fn toeplitz_two_by_two() {
        let p = ChainParams::finite(0.6, 0.7, 51, 2).unwrap();
        let c = correlators(&p).unwrap();
        let xx = c.g(-1) * c.g(-1) - c.g(-2) * c.g(0);
        let yy = c.g(1) * c.g(1) - c.g(2) * c.g(0);
        assert!((c.sxsx - xx).abs() < 1e-15);
        assert!((c.sysy - yy).abs() < 1e-15);
    }

    #[test]
    fn param_validation() {
        assert!(ChainParams::thermodynamic(1.2, 0.5, 1).is_err());
        assert!(ChainParams::thermodynamic(0.5, -0.1, 1).is_err());
        assert!(ChainParams::thermodynamic(0.5, 0.1, 0).is_err());
        assert!(ChainParams::finite(0.5, 0.1, 8, 1).is_err());
        assert!(ChainParams::finite(0.5, 0.1, 9, 1).is_ok());
    }

    #[test]
    fn ising_zero_field_state() {
        let s = reduced_state(&ChainParams::thermodynamic(1.0, 0.0, 1).unwrap()).unwrap();
        let ev = s.pt_eigenvalues().values();
        for (v, e) in ev.iter().zip([0.0, 0.0, 0.5, 0.5]) {
            assert!((v - e).abs() < 1e-9, "{ev:?}");
        }
        assert!(s.steerability().abs() < 1e-9);
    }
}
