//! Small dense linear algebra: 4×4 complex matrices with a cyclic Jacobi
//! Hermitian eigensolver, and an LU determinant for the Toeplitz blocks.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

/// Off-diagonal Frobenius norm at which the Jacobi sweep stops.
pub const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// A dense 4×4 complex matrix in row-major order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[Complex64::new(0.0, 0.0); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        let mut m = Self::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.0[i][j] = Complex64::new(*v, 0.0);
            }
        }
        m
    }

    /// Kronecker product of two 2×2 matrices, `a ⊗ b`.
    #[allow(clippy::needless_range_loop)]
    pub fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    /// Distance from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    s += self.0[i][j].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Only the Hermitian part is used; the caller is responsible for
    /// checking Hermiticity first. Eigenvalues come back ascending, and
    /// column `k` of the returned vectors belongs to eigenvalue `k`.
    pub fn eigh(&self) -> HermitianEigen {
        let mut a = *self;
        // Symmetrize so rounding in the input cannot bias the rotation angles.
        for i in 0..4 {
            a.0[i][i] = Complex64::new(a.0[i][i].re, 0.0);
            for j in (i + 1)..4 {
                let v = (a.0[i][j] + a.0[j][i].conj()) * 0.5;
                a.0[i][j] = v;
                a.0[j][i] = v.conj();
            }
        }
        let mut v = Mat4::identity();
        let scale = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| a.0[i][j].norm())
            .fold(1.0_f64, f64::max);

        for _ in 0..JACOBI_MAX_SWEEPS {
            if a.off_diagonal_norm() <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..3 {
                for q in (p + 1)..4 {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }

        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
        let mut values = [0.0; 4];
        let mut vectors = Mat4::zeros();
        for (k, &src) in order.iter().enumerate() {
            values[k] = a.0[src][src].re;
            for row in 0..4 {
                vectors.0[row][k] = v.0[row][src];
            }
        }
        HermitianEigen { values, vectors }
    }

    /// Ascending eigenvalues of a Hermitian matrix.
    pub fn eigvalsh(&self) -> [f64; 4] {
        self.eigh().values
    }
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut Mat4, v: &mut Mat4, p: usize, q: usize) {
    let apq = a.0[p][q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    // Phase rotation diag(1, e^{-i phi}) makes the pivot real, then a real
    // Jacobi rotation zeroes it. The combined unitary is `u`.
    let phase = apq / mag;
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    // a <- a u
    for k in 0..4 {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * u_pp + akq * u_qp;
        a.0[k][q] = akp * u_pq + akq * u_qq;
    }
    // a <- u^† a
    for k in 0..4 {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a.0[q][k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a.0[p][q] = Complex64::new(0.0, 0.0);
    a.0[q][p] = Complex64::new(0.0, 0.0);
    a.0[p][p] = Complex64::new(a.0[p][p].re, 0.0);
    a.0[q][q] = Complex64::new(a.0[q][q].re, 0.0);
    // v <- v u
    for k in 0..4 {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * u_pp + vkq * u_qp;
        v.0[k][q] = vkp * u_pq + vkq * u_qq;
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HermitianEigen {
    pub values: [f64; 4],
    /// Unitary whose columns are the eigenvectors.
    pub vectors: Mat4,
}

impl HermitianEigen {
    /// Rebuilds `V f(D) V^†` for a function applied to the spectrum.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Mat4 {
        let mut out = Mat4::zeros();
        for k in 0..4 {
            let fk = f(self.values[k]);
            for i in 0..4 {
                for j in 0..4 {
                    out.0[i][j] += self.vectors.0[i][k] * self.vectors.0[j][k].conj() * fk;
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(mut self, rhs: Mat4) -> Mat4 {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(mut self, rhs: Mat4) -> Mat4 {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let aik = self.0[i][k];
                for j in 0..4 {
                    out.0[i][j] += aik * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Determinant of a square row-major matrix by LU with partial pivoting.
///
/// `a` is consumed as scratch space. Returns 0 for an exactly singular pivot.
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in (col + 1)..n {
            let factor = a[row][col] / p;
            if factor != 0.0 {
                let (upper, lower) = a.split_at_mut(row);
                for (x, &y) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                    *x -= factor * y;
                }
            }
        }
    }
    det
}
