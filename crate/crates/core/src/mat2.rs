//! Dense 2x2 complex matrices.
//!
//! Everything the reduced dynamics needs (products, adjoints, Hermitian
//! eigenpairs, trace distance) has a closed form in two dimensions, so this
//! module implements it directly instead of pulling in a general solver.

use num_complex::Complex64;

/// A 2x2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

/// Eigenpairs of a Hermitian 2x2 matrix, ordered by descending eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEig {
    pub values: [f64; 2],
    /// Orthonormal column eigenvectors, `vectors[k]` belongs to `values[k]`.
    pub vectors: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Mat2(m)
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[one, zero], [zero, one]])
    }

    pub fn zero() -> Self {
        Mat2([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = self.0;
        for (row, rhs_row) in out.iter_mut().zip(&rhs.0) {
            for (cell, r) in row.iter_mut().zip(rhs_row) {
                *cell -= *r;
            }
        }
        Mat2(out)
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let mut out = self.0;
        for row in &mut out {
            for entry in row {
                *entry *= s;
            }
        }
        Mat2(out)
    }

    pub fn adjoint(&self) -> Mat2 {
        let a = &self.0;
        Mat2([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn matvec(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from the Hermitian condition A = A^dagger.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs_entry()
    }

    /// Largest deviation from unitarity, measured as max |(A^dagger A - I)_ij|.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).sub(&Mat2::identity()).max_abs_entry()
    }

    /// Analytic eigendecomposition of a Hermitian matrix.
    ///
    /// Off-diagonal conjugacy is assumed, not checked; callers validate with
    /// [`Mat2::hermiticity_defect`] where the input is not Hermitian by
    /// construction. Eigenvalues come out in descending order and the
    /// eigenvectors are orthonormal even at degeneracy.
    pub fn eig_hermitian(&self) -> HermitianEig {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let mean = 0.5 * (a + d);
        let delta = 0.5 * (a - d);
        let radius = delta.hypot(b.norm());

        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        // The plus-branch eigenvector solves conj(b) v0 = (delta + radius) v1.
        // Of the two algebraically equivalent forms pick the one whose norm
        // stays away from zero, which depends on the sign of delta.
        let plus = if b.norm() == 0.0 {
            if delta >= 0.0 {
                [one, zero]
            } else {
                [zero, one]
            }
        } else if delta >= 0.0 {
            [Complex64::new(delta + radius, 0.0), b.conj()]
        } else {
            [b, Complex64::new(radius - delta, 0.0)]
        };
        let norm = (plus[0].norm_sqr() + plus[1].norm_sqr()).sqrt();
        let plus = [plus[0] / norm, plus[1] / norm];
        // The orthogonal complement in two dimensions is unique up to phase.
        let minus = [-plus[1].conj(), plus[0].conj()];

        HermitianEig {
            values: [mean + radius, mean - radius],
            vectors: [plus, minus],
        }
    }

    /// Trace distance (1/2)*Tr|A - B| for Hermitian A and B.
    pub fn trace_distance(&self, rhs: &Mat2) -> f64 {
        let diff = self.sub(rhs);
        let eig = diff.eig_hermitian();
        0.5 * (eig.values[0].abs() + eig.values[1].abs())
    }
}
