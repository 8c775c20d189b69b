//! Dense complex matrix kernel and the lazy orthogonal span tracker.
//!
//! Everything here is sized for machine dimensions up to a few dozen:
//! storage is a flat row-major `Vec<Complex64>`, products are the naive
//! O(n³) loops, and no attempt is made to exploit sparsity.

mod span;

pub use span::SpanTracker;

pub type Complex = num_complex::Complex64;

/// Dense complex matrix, row-major.
///
/// Entry (i, j) lives at `entries[i * cols + j]`. All shape mismatches
/// panic; callers validate dimensions at construction boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from nested rows.
    ///
    /// # Panics
    /// Panics when rows are empty or ragged.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        assert!(cols > 0, "matrix needs at least one column");
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            entries.extend_from_slice(row);
        }
        ComplexMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    /// Builds a matrix from real-valued nested rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let lifted: Vec<Vec<Complex>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&lifted)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Flat row-major entries.
    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.entries[i * self.cols + j] = v;
    }

    /// Matrix product `self * rhs`.
    ///
    /// # Panics
    /// Panics when `self.cols() != rhs.rows()`.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.entries[lhs_row + j] += a * rhs.entries[rhs_row + j];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Sum of diagonal entries.
    ///
    /// # Panics
    /// Panics on non-square matrices.
    pub fn trace(&self) -> Complex {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Block-diagonal direct sum `self ⊕ rhs`.
    pub fn direct_sum(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = Self::zeros(self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out.set(self.rows + i, self.cols + j, rhs.get(i, j));
            }
        }
        out
    }

    /// Entrywise real part (imaginary parts dropped).
    pub fn real_part(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|z| Complex::new(z.re, 0.0))
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Entrywise sum.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Entrywise difference `self - rhs`.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Identity except for a rotation by `angle` in the (i, j) coordinate
    /// plane. Multiplying by it perturbs a unitary while keeping it
    /// unitary.
    pub fn plane_rotation(dim: usize, i: usize, j: usize, angle: f64) -> ComplexMatrix {
        assert!(i < dim && j < dim && i != j);
        let mut out = Self::identity(dim);
        let (sin, cos) = angle.sin_cos();
        out.set(i, i, Complex::new(cos, 0.0));
        out.set(j, j, Complex::new(cos, 0.0));
        out.set(i, j, Complex::new(-sin, 0.0));
        out.set(j, i, Complex::new(sin, 0.0));
        out
    }

    /// Kronecker (tensor) product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for p in 0..rhs.rows {
                    for q in 0..rhs.cols {
                        out.set(i * rhs.rows + p, j * rhs.cols + q, a * rhs.get(p, q));
                    }
                }
            }
        }
        out
    }

    /// Frobenius inner product ⟨A, B⟩ = tr(A†B) = Σᵢⱼ conj(Aᵢⱼ)·Bᵢⱼ.
    ///
    /// Conjugate-linear in `self`, linear in `rhs`.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn frobenius_inner(&self, rhs: &ComplexMatrix) -> Complex {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "frobenius_inner shape mismatch"
        );
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Squared Frobenius norm, Σ |entry|².
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference |self - rhs|.
    ///
    /// # Panics
    /// Panics on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "max_abs_diff shape mismatch"
        );
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the Hermitian condition A = A†.
    pub fn hermitian_error(&self) -> f64 {
        assert!(self.is_square(), "hermitian_error of a non-square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Conjugation `m * self * m†`, the evolution step for operators.
    ///
    /// # Panics
    /// Panics when shapes are incompatible.
    pub fn conjugate_by(&self, m: &ComplexMatrix) -> ComplexMatrix {
        m.matmul(self).matmul(&m.adjoint())
    }

    /// Factors a Hermitian positive semidefinite matrix as `C·C†` using a
    /// diagonally pivoted Cholesky decomposition. Rank deficiency is fine:
    /// once every remaining diagonal pivot drops below `tolerance` the
    /// trailing columns stay zero. Returns `None` when a pivot is negative
    /// beyond `tolerance` or the matrix is visibly non-Hermitian, since the
    /// factorization then does not exist.
    ///
    /// # Panics
    /// Panics on a non-square matrix.
    pub fn psd_factor(&self, tolerance: f64) -> Option<ComplexMatrix> {
        assert!(self.is_square(), "psd_factor of a non-square matrix");
        let n = self.rows;
        if self.hermitian_error() > tolerance.max(1e-12) * 10.0 {
            return None;
        }
        let mut work = self.clone();
        let mut low = ComplexMatrix::zeros(n, n);
        let mut perm: Vec<usize> = (0..n).collect();
        for step in 0..n {
            let pivot = (step..n)
                .max_by(|&p, &q| work.get(p, p).re.total_cmp(&work.get(q, q).re))
                .expect("nonempty pivot range");
            let head = work.get(pivot, pivot).re;
            if head < -tolerance {
                return None;
            }
            if head <= tolerance {
                break;
            }
            if pivot != step {
                perm.swap(step, pivot);
                for j in 0..n {
                    let a = work.get(step, j);
                    let b = work.get(pivot, j);
                    work.set(step, j, b);
                    work.set(pivot, j, a);
                }
                for i in 0..n {
                    let a = work.get(i, step);
                    let b = work.get(i, pivot);
                    work.set(i, step, b);
                    work.set(i, pivot, a);
                }
                for j in 0..n {
                    let a = low.get(step, j);
                    let b = low.get(pivot, j);
                    low.set(step, j, b);
                    low.set(pivot, j, a);
                }
            }
            let root = head.sqrt();
            low.set(step, step, Complex::new(root, 0.0));
            for i in (step + 1)..n {
                low.set(i, step, work.get(i, step) / root);
            }
            for i in (step + 1)..n {
                for j in (step + 1)..n {
                    let update = low.get(i, step) * low.get(j, step).conj();
                    work.set(i, j, work.get(i, j) - update);
                }
            }
        }
        // The loop factored P·A·Pᵀ = L·L†, so A = (Pᵀ·L)(Pᵀ·L)†: row i of
        // the result is row i of L sent back to original position perm[i].
        let mut factor = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                factor.set(perm[i], j, low.get(i, j));
            }
        }
        Some(factor)
    }
}

/// Solves A·x = b by Gaussian elimination with partial pivoting. A zero
/// pivot column is skipped, leaving that coordinate at zero; callers clamp
/// the quantities derived from near-singular systems.
pub(crate) fn solve_dense(mut a: Vec<Vec<Complex>>, mut b: Vec<Complex>) -> Vec<Complex> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()))
            .expect("nonempty pivot range");
        if a[pivot][col].norm() == 0.0 {
            continue;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..k {
            let factor = a[row][col] / a[col][col];
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..k {
                let sub = factor * a[col][c];
                a[row][c] -= sub;
            }
            let sub = factor * b[col];
            b[row] -= sub;
        }
    }
    let mut x = vec![Complex::new(0.0, 0.0); k];
    for col in (0..k).rev() {
        if a[col][col].norm() == 0.0 {
            continue;
        }
        let mut acc = b[col];
        for c in (col + 1)..k {
            acc -= a[col][c] * x[c];
        }
        x[col] = acc / a[col][col];
    }
    x
}
