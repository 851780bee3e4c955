//! N-setting EPR-steering inequalities of the form
//!
//! ```text
//! S_N = (1/N) Σ_k ⟨A_k σ·n_k⟩ ≤ C_N
//! ```
//!
//! Bob measures spin along fixed axes `n_k`; Alice may choose any projective
//! measurement per setting. For a given correlation matrix `T` the best she
//! can do on setting `k` is measure along `T n_k / ‖T n_k‖`, giving `‖T n_k‖`.
//! The orientation of the axis set relative to the chain frame is either
//! fixed or optimized over SO(3).

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::qstate::{Pauli, TwoQubitState};

/// C₁₀ as quoted for the dodecahedral ten-setting inequality (four figures).
/// Not π/6, which rounds to the same digits.
#[allow(clippy::approx_constant)]
pub const C10: f64 = 0.5236;

/// Local-hidden-state bound for the canonical axis sets.
pub fn lhs_bound(n_settings: usize) -> Option<f64> {
    match n_settings {
        2 => Some(std::f64::consts::FRAC_1_SQRT_2),
        3 => Some(1.0 / 3f64.sqrt()),
        10 => Some(C10),
        _ => None,
    }
}

/// Bob's measurement axes together with the bound they are tested against.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisSet {
    axes: Vec<Vector3<f64>>,
    bound: Option<f64>,
}

impl AxisSet {
    /// The canonical axis sets.
    ///
    /// * 2: x̂ and ẑ.
    /// * 3: x̂, ŷ, ẑ.
    /// * 10: one vertex from each antipodal pair of the regular dodecahedron
    ///   with vertices (±1, ±1, ±1), (0, ±1/φ, ±φ), (±1/φ, ±φ, 0), (±φ, 0, ±1/φ),
    ///   φ the golden ratio. Equivalently, icosahedron face normals.
    pub fn canonical(n_settings: usize) -> Result<Self> {
        let axes = match n_settings {
            2 => vec![Vector3::x(), Vector3::z()],
            3 => vec![Vector3::x(), Vector3::y(), Vector3::z()],
            10 => dodecahedron_axes().to_vec(),
            n => {
                return Err(Error::InvalidParameter(format!(
                    "unsupported number of settings {n}; expected 2, 3 or 10"
                )))
            }
        };
        Ok(AxisSet {
            axes,
            bound: lhs_bound(n_settings),
        })
    }

    /// Arbitrary axes, each normalized. Returns a warning for every axis whose
    /// norm differed from 1 by more than 1e-6.
    pub fn custom(raw: &[[f64; 3]], bound: Option<f64>) -> Result<(Self, Vec<String>)> {
        if raw.is_empty() {
            return Err(Error::InvalidParameter("axis set is empty".into()));
        }
        let mut warnings = Vec::new();
        let mut axes = Vec::with_capacity(raw.len());
        for (i, v) in raw.iter().enumerate() {
            let v = Vector3::from(*v);
            let norm = v.norm();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "axis {} has norm {norm}",
                    i + 1
                )));
            }
            if (norm - 1.0).abs() > 1e-6 {
                warnings.push(format!("axis {} had norm {norm}; renormalized", i + 1));
            }
            axes.push(v / norm);
        }
        Ok((AxisSet { axes, bound }, warnings))
    }

    /// Parses one axis per line as three reals separated by whitespace or
    /// commas. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str, bound: Option<f64>) -> Result<(Self, Vec<String>)> {
        let mut raw = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidParameter(format!("axes line {}: {e}", lineno + 1)))?;
            if nums.len() != 3 {
                return Err(Error::InvalidParameter(format!(
                    "axes line {}: expected 3 numbers, found {}",
                    lineno + 1,
                    nums.len()
                )));
            }
            raw.push([nums[0], nums[1], nums[2]]);
        }
        Self::custom(&raw, bound)
    }

    pub fn n_settings(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vector3<f64>] {
        &self.axes
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }
}

fn dodecahedron_axes() -> [Vector3<f64>; 10] {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let ip = 1.0 / phi;
    let raw = [
        [1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0],
        [0.0, ip, phi],
        [0.0, ip, -phi],
        [ip, phi, 0.0],
        [ip, -phi, 0.0],
        [phi, 0.0, ip],
        [phi, 0.0, -ip],
    ];
    raw.map(|v| Vector3::from(v).normalize())
}

/// `t[a][b] = ⟨σᵃ ⊗ σᵇ⟩` with Alice on the row index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationMatrix(pub Matrix3<f64>);

impl CorrelationMatrix {
    pub fn from_state(state: &TwoQubitState) -> Self {
        const P: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
        let t = Matrix3::from_fn(|a, b| state.expectation(P[a], P[b]));
        CorrelationMatrix(t)
    }

    pub fn singular_values(&self) -> Vector3<f64> {
        self.0.singular_values()
    }

    /// Mean over settings of `‖T R n_k‖`.
    pub fn value(&self, axes: &AxisSet, rotation: &Rotation3<f64>) -> f64 {
        let m = self.0 * rotation.matrix();
        axes.axes.iter().map(|n| (m * n).norm()).sum::<f64>() / axes.axes.len() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Orientation {
    /// Axes exactly as listed in the [`AxisSet`].
    Canonical,
    Fixed(Rotation3<f64>),
    /// Maximize over all rotations.
    Optimize,
}

/// Quantum value of the N-setting steering functional.
pub fn quantum_value(state: &TwoQubitState, axes: &AxisSet, orientation: Orientation) -> f64 {
    let t = CorrelationMatrix::from_state(state);
    match orientation {
        Orientation::Canonical => t.value(axes, &Rotation3::identity()),
        Orientation::Fixed(r) => t.value(axes, &r),
        Orientation::Optimize => optimize_orientation(&t, axes).1,
    }
}

fn zyz(a: f64, b: f64, c: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Vector3::z_axis(), a)
        * Rotation3::from_axis_angle(&Vector3::y_axis(), b)
        * Rotation3::from_axis_angle(&Vector3::z_axis(), c)
}

const GRID_STEP_DEG: f64 = 15.0;
const REFINE_TOL: f64 = 1e-6;
const REFINE_STARTS: usize = 32;
const FD_STEP: f64 = 1e-4;
const NEWTON_MAX_ITER: usize = 50;
const NEWTON_HANDOFF_STEP: f64 = 1e-3;

/// Best orientation of the axis set for a correlation matrix.
///
/// A 15° grid in ZYZ Euler angles picks the starting points; each is then
/// refined by Newton steps in body-frame rotation coordinates, and finished
/// with a pattern search whose step is driven below 1e-6 rad. The pattern
/// search also handles maxima on kinks of the objective, where Newton stalls.
pub fn optimize_orientation(t: &CorrelationMatrix, axes: &AxisSet) -> (Rotation3<f64>, f64) {
    optimize_orientation_with(t, axes, REFINE_STARTS)
}

/// [`optimize_orientation`] refining from the `starts` best local maxima of
/// the grid with distinct values. The objective repeats under the symmetries
/// of the axis set and of `T`, so most grid maxima are copies of a few basins.
pub fn optimize_orientation_with(
    t: &CorrelationMatrix,
    axes: &AxisSet,
    starts: usize,
) -> (Rotation3<f64>, f64) {
    let step = GRID_STEP_DEG.to_radians();
    let n_az = (360.0 / GRID_STEP_DEG).round() as usize;
    let n_pol = (180.0 / GRID_STEP_DEG).round() as usize + 1;

    let idx = |i: usize, j: usize, k: usize| (i * n_pol + j) * n_az + k;
    let mut grid: Vec<(Rotation3<f64>, f64)> = Vec::with_capacity(n_az * n_az * n_pol);
    for i in 0..n_az {
        for j in 0..n_pol {
            for k in 0..n_az {
                let r = zyz(i as f64 * step, j as f64 * step, k as f64 * step);
                let v = t.value(axes, &r);
                grid.push((r, v));
            }
        }
    }

    // Discrete local maxima; the azimuthal angles wrap, the polar one does not.
    let mut peaks: Vec<usize> = Vec::new();
    for i in 0..n_az {
        for j in 0..n_pol {
            for k in 0..n_az {
                let v = grid[idx(i, j, k)].1;
                let mut is_peak = true;
                'nb: for di in [n_az - 1, 0, 1] {
                    for dj in [-1i64, 0, 1] {
                        for dk in [n_az - 1, 0, 1] {
                            let jj = j as i64 + dj;
                            if jj < 0 || jj >= n_pol as i64 {
                                continue;
                            }
                            let nb = idx((i + di) % n_az, jj as usize, (k + dk) % n_az);
                            if grid[nb].1 > v {
                                is_peak = false;
                                break 'nb;
                            }
                        }
                    }
                }
                if is_peak {
                    peaks.push(idx(i, j, k));
                }
            }
        }
    }
    // Stable sort keeps ties in grid order.
    peaks.sort_by(|&a, &b| grid[b].1.total_cmp(&grid[a].1));

    // Peaks related by a symmetry share their value exactly (up to rounding);
    // one representative per value is refined.
    let mut best = grid[peaks[0]];
    let mut refined: Vec<f64> = Vec::new();
    for &p in &peaks {
        let (start, v0) = grid[p];
        if refined
            .iter()
            .any(|&u| (u - v0).abs() <= 1e-12 * u.abs().max(1.0))
        {
            continue;
        }
        if refined.len() == starts {
            break;
        }
        refined.push(v0);
        let (r, v) = newton_ascent(t, axes, start, v0);
        let (r, v) = pattern_search(t, axes, r, v, NEWTON_HANDOFF_STEP);
        if v > best.1 {
            best = (r, v);
        }
    }
    best
}

fn explore(
    t: &CorrelationMatrix,
    axes: &AxisSet,
    mut r: Rotation3<f64>,
    mut v: f64,
    step: f64,
) -> (Rotation3<f64>, f64) {
    for axis in [Vector3::x_axis(), Vector3::y_axis(), Vector3::z_axis()] {
        for sign in [1.0, -1.0] {
            let trial = compose(&r, &Rotation3::from_axis_angle(&axis, sign * step));
            let tv = t.value(axes, &trial);
            if improves(tv, v) {
                r = trial;
                v = tv;
                break;
            }
        }
    }
    (r, v)
}

// Products are renormalized; drift off SO(3) would inflate the objective and be
// mistaken for progress.
fn compose(a: &Rotation3<f64>, b: &Rotation3<f64>) -> Rotation3<f64> {
    let mut r = a * b;
    r.renormalize();
    r
}

fn newton_ascent(
    t: &CorrelationMatrix,
    axes: &AxisSet,
    mut r: Rotation3<f64>,
    mut v: f64,
) -> (Rotation3<f64>, f64) {
    let at = |r: &Rotation3<f64>, d: Vector3<f64>| t.value(axes, &(r * Rotation3::new(d)));
    for _ in 0..NEWTON_MAX_ITER {
        let e = |i: usize| Vector3::ith(i, FD_STEP);
        let mut g = Vector3::zeros();
        let mut hess = Matrix3::zeros();
        for i in 0..3 {
            let (fp, fm) = (at(&r, e(i)), at(&r, -e(i)));
            g[i] = (fp - fm) / (2.0 * FD_STEP);
            hess[(i, i)] = (fp - 2.0 * v + fm) / (FD_STEP * FD_STEP);
            for j in 0..i {
                let mixed = at(&r, e(i) + e(j)) - at(&r, e(i) - e(j)) - at(&r, e(j) - e(i))
                    + at(&r, -e(i) - e(j));
                hess[(i, j)] = mixed / (4.0 * FD_STEP * FD_STEP);
                hess[(j, i)] = hess[(i, j)];
            }
        }
        // Shift away any non-negative curvature so the step is always uphill.
        let top = hess.symmetric_eigenvalues().max();
        if top >= 0.0 {
            hess -= Matrix3::identity() * (top + g.norm().max(1e-3));
        }
        let Some(chol) = (-hess).cholesky() else {
            break;
        };
        let mut delta = chol.solve(&g);
        if delta.norm() > 0.5 {
            delta *= 0.5 / delta.norm();
        }
        let mut accepted = false;
        for _ in 0..20 {
            let trial = compose(&r, &Rotation3::new(delta));
            let tv = t.value(axes, &trial);
            if improves(tv, v) {
                r = trial;
                v = tv;
                accepted = true;
                break;
            }
            delta *= 0.5;
        }
        if !accepted || delta.norm() < REFINE_TOL {
            break;
        }
    }
    (r, v)
}

// Gains at rounding level would let the search wander along flat directions.
fn improves(new: f64, old: f64) -> bool {
    new > old + 4.0 * f64::EPSILON * old.abs().max(1.0)
}

fn pattern_search(
    t: &CorrelationMatrix,
    axes: &AxisSet,
    mut base: Rotation3<f64>,
    mut base_v: f64,
    mut step: f64,
) -> (Rotation3<f64>, f64) {
    while step > REFINE_TOL {
        let (mut x, mut xv) = explore(t, axes, base, base_v, step);
        if !improves(xv, base_v) {
            step *= 0.5;
            continue;
        }
        loop {
            // Repeat the last successful displacement, then explore around it.
            let jump = base.inverse() * x;
            base = x;
            base_v = xv;
            let pattern = compose(&x, &jump);
            let pv = t.value(axes, &pattern);
            let (y, yv) = explore(t, axes, pattern, pv, step);
            if improves(yv, base_v) {
                x = y;
                xv = yv;
            } else {
                break;
            }
        }
    }
    (base, base_v)
}

/// Outcome of testing one state against an N-setting inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    /// Value at the optimal orientation.
    pub value: f64,
    /// Value with the axes in their listed orientation.
    pub canonical_value: f64,
    pub bound: f64,
    pub violated: bool,
}

pub fn violation(state: &TwoQubitState, n_settings: usize) -> Result<Violation> {
    let axes = AxisSet::canonical(n_settings)?;
    violation_with(state, &axes)
}

pub fn violation_with(state: &TwoQubitState, axes: &AxisSet) -> Result<Violation> {
    let bound = axes.bound.ok_or_else(|| {
        Error::InvalidParameter("axis set has no local-hidden-state bound".into())
    })?;
    let t = CorrelationMatrix::from_state(state);
    let value = optimize_orientation(&t, axes).1;
    Ok(Violation {
        value,
        canonical_value: t.value(axes, &Rotation3::identity()),
        bound,
        violated: value > bound,
    })
}

/// Applies the spin rotation corresponding to `r` on Bob's qubit:
/// `ρ → (I ⊗ U) ρ (I ⊗ U†)` with `U σ·m U† = σ·(R m)`.
pub fn rotate_bob(state: &TwoQubitState, r: &Rotation3<f64>) -> Result<TwoQubitState> {
    let (axis, angle) = match r.axis_angle() {
        Some((axis, angle)) => (axis, angle),
        None => (Unit::new_unchecked(Vector3::z()), 0.0),
    };
    let c = Complex64::new((angle / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(angle / 2.0).sin());
    let mut u = [[c, Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), c]];
    for (p, w) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().zip(axis.iter()) {
        let m = p.matrix();
        for i in 0..2 {
            for j in 0..2 {
                u[i][j] += s * *w * m[i][j];
            }
        }
    }
    let full = Mat4::kron(&Pauli::I.matrix(), &u);
    TwoQubitState::from_matrix(full * *state.matrix() * full.adjoint())
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    fn werner(p: f64) -> TwoQubitState {
        TwoQubitState::from_pauli(0.0, 0.0, p, p, -p).unwrap()
    }

    #[test]
    fn canonical_sets() {
        let two = AxisSet::canonical(2).unwrap();
        assert_eq!(two.n_settings(), 2);
        assert!((two.bound().unwrap() - 0.707_106_781_186_547_5).abs() < 1e-15);
        assert_eq!(two.axes()[0].dot(&two.axes()[1]), 0.0);
        let three = AxisSet::canonical(3).unwrap();
        assert!((three.bound().unwrap() - 0.577_350_269_189_625_8).abs() < 1e-15);
        let ten = AxisSet::canonical(10).unwrap();
        assert_eq!(ten.bound(), Some(0.5236));
        for a in ten.axes() {
            assert!((a.norm() - 1.0).abs() < 1e-12);
        }
        assert!(AxisSet::canonical(4).is_err());
    }

    #[test]
    fn dodecahedral_angles() {
        let ten = AxisSet::canonical(10).unwrap();
        let (third, golden) = (1.0 / 3.0, 5f64.sqrt() / 3.0);
        let (mut n_third, mut n_golden) = (0, 0);
        for i in 0..10 {
            for j in (i + 1)..10 {
                let d = ten.axes()[i].dot(&ten.axes()[j]).abs();
                if (d - third).abs() < 1e-12 {
                    n_third += 1;
                } else if (d - golden).abs() < 1e-12 {
                    n_golden += 1;
                } else {
                    panic!("unexpected |dot| {d}");
                }
            }
        }
        // Each axis has 3 nearest-neighbour axes at arccos(√5/3).
        assert_eq!((n_golden, n_third), (15, 30));
    }

    #[test]
    fn trivial_values() {
        let mixed = TwoQubitState::from_pauli(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let bell = werner(1.0);
        for n in [2, 3, 10] {
            let axes = AxisSet::canonical(n).unwrap();
            assert_eq!(quantum_value(&mixed, &axes, Orientation::Canonical), 0.0);
            let r = zyz(0.3, 1.1, -0.4);
            assert!((quantum_value(&bell, &axes, Orientation::Fixed(r)) - 1.0).abs() < 1e-12);
            for p in [0.3, 0.5236, 0.8] {
                let v = quantum_value(&werner(p), &axes, Orientation::Fixed(r));
                assert!((v - p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn violation_reports() {
        let v = violation(&werner(1.0), 10).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12 && v.violated && v.bound == 0.5236);
        let mixed = TwoQubitState::from_pauli(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let v = violation(&mixed, 10).unwrap();
        assert!(v.value == 0.0 && !v.violated);
        assert!(!violation(&werner(0.52), 10).unwrap().violated);
        assert!(violation(&werner(0.53), 10).unwrap().violated);
    }

    #[test]
    fn parse_axes_file() {
        let text = "# three axes\n1 0 0\n0, 2, 0\n\n0 0 1 # z\n";
        let (axes, warnings) = AxisSet::parse(text, Some(0.6)).unwrap();
        assert_eq!(axes.n_settings(), 3);
        assert_eq!(warnings.len(), 1);
        assert_eq!(axes.axes()[1], Vector3::y());
        assert!(AxisSet::parse("1 0\n", None).is_err());
        assert!(AxisSet::parse("0 0 0\n", None).is_err());
        assert!(AxisSet::parse("", None).is_err());
        let (no_bound, _) = AxisSet::parse("1 0 0", None).unwrap();
        assert!(violation_with(&werner(0.5), &no_bound).is_err());
    }

    #[test]
    fn bob_rotation_moves_correlations() {
        let s = TwoQubitState::from_pauli(0.1, -0.2, 0.3, 0.4, -0.2).unwrap();
        let r = zyz(0.7, 0.4, 1.9);
        let rotated = rotate_bob(&s, &r).unwrap();
        let t = CorrelationMatrix::from_state(&s).0;
        let t2 = CorrelationMatrix::from_state(&rotated).0;
        assert!((t2 - t * r.matrix().transpose()).norm() < 1e-12);
    }
}
