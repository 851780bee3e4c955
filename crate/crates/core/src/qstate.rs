//! Two-qubit density matrices: construction from Pauli correlations, the
//! partial transpose on the second qubit, its spectrum, the steerability
//! function built from that spectrum, and concurrence as an entanglement
//! cross-check.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with `σᶻ|0⟩ = |0⟩`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat4;

/// Allowed distance from Hermiticity and from unit trace.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `(-POSITIVITY_TOL, 0)` are treated as rounding noise.
pub const POSITIVITY_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);
const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[C1, C0], [C0, C1]],
            Pauli::X => [[C0, C1], [C1, C0]],
            Pauli::Y => [[C0, -CI], [CI, C0]],
            Pauli::Z => [[C1, C0], [C0, -C1]],
        }
    }

    /// `a ⊗ b` as a 4×4 matrix.
    pub fn pair(a: Pauli, b: Pauli) -> Mat4 {
        Mat4::kron(&a.matrix(), &b.matrix())
    }
}

/// Pauli expectation values of a two-qubit state that has no local x/y
/// magnetization. `xy` and `yx` are the cross correlators ⟨σˣ⊗σʸ⟩, ⟨σʸ⊗σˣ⟩.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PauliCorrelations {
    pub z1: f64,
    pub z2: f64,
    pub zz: f64,
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
    pub yx: f64,
}

impl PauliCorrelations {
    pub fn to_matrix(&self) -> Mat4 {
        let terms = [
            (Pauli::I, Pauli::I, 1.0),
            (Pauli::Z, Pauli::I, self.z1),
            (Pauli::I, Pauli::Z, self.z2),
            (Pauli::Z, Pauli::Z, self.zz),
            (Pauli::X, Pauli::X, self.xx),
            (Pauli::Y, Pauli::Y, self.yy),
            (Pauli::X, Pauli::Y, self.xy),
            (Pauli::Y, Pauli::X, self.yx),
        ];
        terms
            .iter()
            .filter(|(_, _, c)| *c != 0.0)
            .fold(Mat4::zeros(), |acc, &(a, b, c)| {
                acc + Pauli::pair(a, b).scale(c)
            })
            .scale(0.25)
    }
}

/// A validated two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    matrix: Mat4,
    pauli: Option<PauliCorrelations>,
}

impl TwoQubitState {
    /// ρ = ¼(I + z1 σᶻ⊗I + z2 I⊗σᶻ + zz σᶻ⊗σᶻ + xx σˣ⊗σˣ + yy σʸ⊗σʸ).
    ///
    /// Cross terms σˣ⊗σʸ and σʸ⊗σˣ are zero. Fails with the offending
    /// minimum eigenvalue when the correlators do not describe a state.
    pub fn from_pauli(z1: f64, z2: f64, zz: f64, xx: f64, yy: f64) -> Result<Self> {
        for (name, v) in [("z1", z1), ("z2", z2), ("zz", zz), ("xx", xx), ("yy", yy)] {
            if !v.is_finite() || v.abs() > 1.0 + HERMITIAN_TOL {
                return Err(Error::InvalidParameter(format!(
                    "correlator {name} = {v} is outside [-1, 1]"
                )));
            }
        }
        let pauli = PauliCorrelations {
            z1,
            z2,
            zz,
            xx,
            yy,
            xy: 0.0,
            yx: 0.0,
        };
        let state = TwoQubitState {
            matrix: pauli.to_matrix(),
            pauli: Some(pauli),
        };
        state.check_positive()?;
        Ok(state)
    }

    /// Validates an arbitrary matrix as a density matrix.
    pub fn from_matrix(matrix: Mat4) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - C1).norm() > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        let state = TwoQubitState {
            matrix,
            pauli: None,
        };
        state.check_positive()?;
        Ok(state)
    }

    fn check_positive(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    /// The correlators this state was built from, if it came from
    /// [`TwoQubitState::from_pauli`].
    pub fn pauli(&self) -> Option<&PauliCorrelations> {
        self.pauli.as_ref()
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        self.matrix.eigvalsh()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Tr(ρ · (a ⊗ b)).
    pub fn expectation(&self, a: Pauli, b: Pauli) -> f64 {
        (self.matrix * Pauli::pair(a, b)).trace().re
    }

    /// Recomputes the correlator set from the matrix entries, including
    /// the cross terms.
    pub fn measured_correlations(&self) -> PauliCorrelations {
        use Pauli::*;
        PauliCorrelations {
            z1: self.expectation(Z, I),
            z2: self.expectation(I, Z),
            zz: self.expectation(Z, Z),
            xx: self.expectation(X, X),
            yy: self.expectation(Y, Y),
            xy: self.expectation(X, Y),
            yx: self.expectation(Y, X),
        }
    }

    pub fn partial_transpose_b(&self) -> Mat4 {
        partial_transpose_b(&self.matrix)
    }

    /// Ascending spectrum of the partial transpose, in closed form for
    /// X-shaped matrices and by Jacobi iteration otherwise.
    pub fn pt_eigenvalues(&self) -> PtEigenvalues {
        let pt = self.partial_transpose_b();
        match x_state_eigenvalues(&pt) {
            Some(vals) => PtEigenvalues::from_unsorted(vals),
            None => PtEigenvalues::from_unsorted(pt.eigvalsh()),
        }
    }

    /// Spectrum of the partial transpose from the generic eigensolver only.
    pub fn pt_eigenvalues_generic(&self) -> PtEigenvalues {
        PtEigenvalues::from_unsorted(self.partial_transpose_b().eigvalsh())
    }

    /// S = λ₁ + λ₂ − (λ₁ − λ₂)²; negative values certify steering.
    pub fn steerability(&self) -> f64 {
        self.pt_eigenvalues().steerability()
    }

    /// Wootters concurrence.
    pub fn concurrence(&self) -> f64 {
        let yy = Pauli::pair(Pauli::Y, Pauli::Y);
        let flipped = yy * self.matrix.conj() * yy;
        let sqrt_rho = self.matrix.eigh().reconstruct_with(|x| x.max(0.0).sqrt());
        let r = sqrt_rho * flipped * sqrt_rho;
        let mut l: Vec<f64> = r.eigvalsh().iter().map(|x| x.max(0.0).sqrt()).collect();
        l.sort_by(|a, b| b.total_cmp(a));
        (l[0] - l[1] - l[2] - l[3]).max(0.0)
    }

    /// ½ Σ |eig(ρ − σ)|.
    pub fn trace_distance(&self, other: &TwoQubitState) -> f64 {
        0.5 * (self.matrix - other.matrix)
            .eigvalsh()
            .iter()
            .map(|x| x.abs())
            .sum::<f64>()
    }

    /// 16 whitespace-separated `re im` pairs in row-major order.
    pub fn to_debug_string(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.matrix.0.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i + j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{} {}", v.re, v.im);
            }
        }
        out
    }

    pub fn from_debug_string(s: &str) -> Result<Self> {
        let nums = s
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::InvalidState(format!("bad number {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if nums.len() != 32 {
            return Err(Error::InvalidState(format!(
                "expected 32 numbers, found {}",
                nums.len()
            )));
        }
        let mut m = Mat4::zeros();
        for (k, pair) in nums.chunks(2).enumerate() {
            m.0[k / 4][k % 4] = Complex64::new(pair[0], pair[1]);
        }
        Self::from_matrix(m)
    }
}

/// Transposes the second qubit's indices: `(a b, a' b') ← (a b', a' b)`.
pub fn partial_transpose_b(m: &Mat4) -> Mat4 {
    let mut out = Mat4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    out.0[2 * a + b][2 * a2 + b2] = m.0[2 * a + b2][2 * a2 + b];
                }
            }
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix supported on the diagonal and
/// anti-diagonal, or `None` if any other entry is nonzero.
fn x_state_eigenvalues(m: &Mat4) -> Option<[f64; 4]> {
    for i in 0..4 {
        for j in 0..4 {
            if i != j && i + j != 3 && m.0[i][j] != C0 {
                return None;
            }
        }
    }
    let block = |p: usize, q: usize| {
        let a = m.0[p][p].re;
        let d = m.0[q][q].re;
        let c = m.0[p][q].norm();
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + c * c).sqrt();
        (mean - rad, mean + rad)
    };
    let (a0, a1) = block(0, 3);
    let (b0, b1) = block(1, 2);
    Some([a0, a1, b0, b1])
}

/// Spectrum of ρ^{T_B} in ascending order.
///
/// The steerability function is symmetric in λ₁ and λ₂, so ties between
/// the two smallest values need no tie-break.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtEigenvalues(pub [f64; 4]);

impl PtEigenvalues {
    pub fn from_unsorted(mut vals: [f64; 4]) -> Self {
        vals.sort_by(f64::total_cmp);
        PtEigenvalues(vals)
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }

    pub fn steerability(&self) -> f64 {
        let [l1, l2, _, _] = self.0;
        l1 + l2 - (l1 - l2) * (l1 - l2)
    }

    /// True when the partial transpose is positive (no NPT entanglement).
    pub fn is_ppt(&self) -> bool {
        self.0[0] >= 0.0
    }
}
