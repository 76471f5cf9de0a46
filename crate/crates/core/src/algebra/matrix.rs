//! Dense matrices over a [`Field`]: echelon forms, kernels, solving and
//! characteristic polynomials.

use std::fmt;

use super::field::Field;
use super::poly::Poly;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> Matrix<F> {
    pub fn zero(field: F, rows: usize, cols: usize) -> Self {
        let data = vec![field.zero(); rows * cols];
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, m.field.one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(field: F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Result<Self, AlgebraError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(AlgebraError::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(Matrix {
            field,
            rows: n,
            cols,
            data,
        })
    }

    pub fn from_i64(field: F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_rows(field, cols, rows).expect("rectangular input")
    }

    pub fn field(&self) -> &F {
        &self.field
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.field.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    fn zip(&self, other: &Self, op: impl Fn(&F::Elem, &F::Elem) -> F::Elem) -> Result<Self, AlgebraError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| op(a, b)).collect();
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip(other, |a, b| self.field.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip(other, |a, b| self.field.sub(a, b))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = self.field.mul(x, c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zero(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let v = f.add(out.get(i, j), &f.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// `M v` for a column vector v.
    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "vector length");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    /// `v M` for a row vector v.
    pub fn vec_mul(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.rows, "vector length");
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if f.is_zero(vi) {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(o, &f.mul(vi, self.get(i, j)));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Result<Self, AlgebraError> {
        let mut base = self.clone();
        let mut acc = Self::identity(self.field.clone(), self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(i, fc));
                }
                v
            })
            .collect()
    }

    /// Basis of the left kernel `{v : v M = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<F::Elem>> {
        self.transpose().kernel()
    }

    /// Some solution of `M x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let f = &self.field;
        let mut aug = Self::zero(f.clone(), self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let f = &self.field;
        let mut aug = Self::zero(f.clone(), n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, f.one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(AlgebraError::Singular);
        }
        let mut out = Self::zero(f.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(out)
    }

    pub fn det(&self) -> Result<F::Elem, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("determinant of a non-square matrix".into()));
        }
        let f = &self.field;
        let mut m = self.clone();
        let n = self.rows;
        let mut det = f.one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !f.is_zero(m.get(i, c))) else {
                return Ok(f.zero());
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = f.neg(&det);
            }
            let piv = m.get(c, c).clone();
            det = f.mul(&det, &piv);
            let inv = f.inv(&piv).expect("nonzero pivot");
            for i in c + 1..n {
                if f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = f.mul(m.get(i, c), &inv);
                for j in c..n {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Characteristic polynomial `det(x I - M)` via reduction to upper
    /// Hessenberg form.
    pub fn charpoly(&self) -> Result<Poly<F>, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("charpoly of a non-square matrix".into()));
        }
        let f = self.field.clone();
        let n = self.rows;
        let mut h = self.clone();
        for m in 1..n.saturating_sub(1) {
            let Some(i) = (m..n).find(|&i| !f.is_zero(h.get(i, m - 1))) else {
                continue;
            };
            if i != m {
                h.swap_rows(i, m);
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + m);
                }
            }
            let inv = f.inv(h.get(m, m - 1)).expect("nonzero pivot");
            for i in m + 1..n {
                if f.is_zero(h.get(i, m - 1)) {
                    continue;
                }
                let u = f.mul(h.get(i, m - 1), &inv);
                for j in 0..n {
                    let v = f.sub(h.get(i, j), &f.mul(&u, h.get(m, j)));
                    h.set(i, j, v);
                }
                for r in 0..n {
                    let v = f.add(h.get(r, m), &f.mul(&u, h.get(r, i)));
                    h.set(r, m, v);
                }
            }
        }
        // p[k] = charpoly of the leading k x k block.
        let x = Poly::x(f.clone());
        let mut p: Vec<Poly<F>> = vec![Poly::one(f.clone())];
        for k in 1..=n {
            let diag = Poly::constant(f.clone(), h.get(k - 1, k - 1).clone());
            let mut next = x.sub(&diag).mul(&p[k - 1]);
            let mut prod = f.one();
            for i in (1..k).rev() {
                prod = f.mul(&prod, h.get(i, i - 1));
                let c = f.mul(h.get(i - 1, k - 1), &prod);
                next = next.sub(&p[i - 1].scale(&c));
            }
            p.push(next);
        }
        Ok(p.pop().expect("nonempty"))
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| self.field.render(x)).collect();
            writeln!(out, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
