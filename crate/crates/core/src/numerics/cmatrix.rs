//! Small dense complex matrices (row-major).

use crate::C64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Mul, Sub};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        CMatrix { rows: r, cols: c, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let c = cols.len();
        let r = if c == 0 { 0 } else { cols[0].len() };
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..r {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        CMatrix { rows, cols, data }
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Columns `[a | b]`.
    pub fn hcat(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> CMatrix {
        let mut m = Self::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                m[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        m
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> CMatrix {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `self - s I`.
    pub fn shift(&self, s: C64) -> CMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= s;
        }
        m
    }

    pub fn lu(&self) -> Lu {
        assert_eq!(self.rows, self.cols, "LU of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[(k, k)];
            if piv.norm() == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = a[(i, k)] / piv;
                a[(i, k)] = f;
                for j in k + 1..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        Lu { a, perm, sign }
    }

    pub fn det(&self) -> C64 {
        self.lu().det()
    }

    pub fn inverse(&self) -> Option<CMatrix> {
        let lu = self.lu();
        if lu.is_singular() {
            return None;
        }
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            let x = lu.solve(&e);
            inv.set_column(j, &x);
        }
        Some(inv)
    }

    pub fn solve(&self, b: &[C64]) -> Option<Vec<C64>> {
        let lu = self.lu();
        if lu.is_singular() {
            None
        } else {
            Some(lu.solve(b))
        }
    }

    /// `self * other` written into `out` (resized by the caller).
    pub fn mul_into(&self, other: &CMatrix, out: &mut CMatrix) {
        assert_eq!(self.cols, other.rows);
        assert_eq!(out.rows, self.rows);
        assert_eq!(out.cols, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..self.cols {
                    s += self.data[i * self.cols + k] * other.data[k * other.cols + j];
                }
                out.data[i * other.cols + j] = s;
            }
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        self.mul_into(rhs, &mut out);
        out
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Packed LU factors with partial pivoting.
pub struct Lu {
    a: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn det(&self) -> C64 {
        let mut d = C64::new(self.sign, 0.0);
        for i in 0..self.a.rows {
            d *= self.a[(i, i)];
        }
        d
    }

    pub fn is_singular(&self) -> bool {
        (0..self.a.rows).any(|i| self.a[(i, i)].norm() == 0.0)
    }

    /// Smallest pivot modulus.
    pub fn min_pivot(&self) -> f64 {
        (0..self.a.rows).map(|i| self.a[(i, i)].norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.a.rows;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.a[(i, k)] * x[k];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.a[(i, k)] * x[k];
                x[i] -= t;
            }
            x[i] /= self.a[(i, i)];
        }
        x
    }

    /// Solve with tiny pivots replaced by `floor` (inverse iteration).
    pub fn solve_regularized(&self, b: &[C64], floor: f64) -> Vec<C64> {
        let n = self.a.rows;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.a[(i, k)] * x[k];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.a[(i, k)] * x[k];
                x[i] -= t;
            }
            let mut p = self.a[(i, i)];
            if p.norm() < floor {
                p = if p.norm() == 0.0 { C64::new(floor, 0.0) } else { p * (floor / p.norm()) };
            }
            x[i] /= p;
        }
        x
    }
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn vnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b> = a* b`.
pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
