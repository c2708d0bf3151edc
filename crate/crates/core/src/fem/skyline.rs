//! Symmetric profile (skyline) storage with an in-place `LDLᵀ` factorization.
//!
//! Only the lower triangle is stored, row by row from the first structurally
//! nonzero column to the diagonal. No pivoting is done, so indefinite
//! matrices are accepted as long as no pivot vanishes.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SkylineMatrix {
    n: usize,
    /// First stored column of each row.
    first: Vec<usize>,
    /// Offset of each row's first stored entry; `ptr[n]` is the length.
    ptr: Vec<usize>,
    values: Vec<f64>,
    factored: bool,
}

impl SkylineMatrix {
    /// `first[i] ≤ i` is the leftmost column that may be nonzero in row `i`.
    pub fn with_profile(first: Vec<usize>) -> Self {
        let n = first.len();
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        for (i, &f) in first.iter().enumerate() {
            debug_assert!(f <= i);
            ptr.push(ptr[i] + (i - f + 1));
        }
        SkylineMatrix {
            n,
            values: vec![0.0; ptr[n]],
            first,
            ptr,
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn stored_entries(&self) -> usize {
        self.values.len()
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
        self.factored = false;
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && j >= self.first[i], "({i}, {j}) outside the profile");
        self.ptr[i] + (j - self.first[i])
    }

    /// Adds `v` at `(i, j)` of the symmetric matrix; callers pass each
    /// off-diagonal pair once (either orientation).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let s = self.slot(r, c);
        self.values[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if c < self.first[r] {
            0.0
        } else {
            self.values[self.slot(r, c)]
        }
    }

    /// `y = A x` (before factorization).
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert!(!self.factored, "matrix already factored");
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let f = self.first[i];
            let row = &self.values[self.ptr[i]..self.ptr[i + 1]];
            for (k, a) in row.iter().enumerate() {
                let j = f + k;
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// Overwrites the storage with `L` (unit diagonal implied) and `D`.
    /// Fails with the row index if a pivot is zero or not finite.
    pub fn factor(&mut self) -> Result<()> {
        let n = self.n;
        let scale = (0..n)
            .map(|i| self.values[self.ptr[i + 1] - 1].abs())
            .fold(0.0, f64::max);
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        for i in 0..n {
            let fi = self.first[i];
            let pi = self.ptr[i];
            // g_ij = a_ij − Σ_k l_ik g_jk over the overlapping profile, kept
            // unscaled until the diagonal update.
            for j in fi..i {
                let fj = self.first[j];
                let start = fi.max(fj);
                let pj = self.ptr[j];
                let mut acc = self.values[pi + (j - fi)];
                for k in start..j {
                    acc -= self.values[pi + (k - fi)] * self.values[pj + (k - fj)];
                }
                self.values[pi + (j - fi)] = acc;
            }
            let mut diag = self.values[pi + (i - fi)];
            for j in fi..i {
                let g = self.values[pi + (j - fi)];
                let dj = self.values[self.ptr[j + 1] - 1];
                let l = g / dj;
                diag -= l * g;
                self.values[pi + (j - fi)] = l;
            }
            if !diag.is_finite() || diag.abs() <= tiny {
                return Err(Error::LinearSolveFailure(i));
            }
            self.values[pi + (i - fi)] = diag;
        }
        self.factored = true;
        Ok(())
    }

    /// Solves with the factored matrix, overwriting `b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert!(self.factored, "factor() must succeed before solving");
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.ptr[i]..self.ptr[i + 1] - 1];
            let s: f64 = row.iter().zip(&b[fi..i]).map(|(l, x)| l * x).sum();
            b[i] -= s;
        }
        for i in 0..n {
            b[i] /= self.values[self.ptr[i + 1] - 1];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let bi = b[i];
            let row = &self.values[self.ptr[i]..self.ptr[i + 1] - 1];
            for (l, x) in row.iter().zip(&mut b[fi..i]) {
                *x -= l * bi;
            }
        }
    }

    /// Number of negative pivots, i.e. the negative inertia of the matrix.
    pub fn negative_pivots(&self) -> usize {
        assert!(self.factored);
        (0..self.n).filter(|&i| self.values[self.ptr[i + 1] - 1] < 0.0).count()
    }
}
