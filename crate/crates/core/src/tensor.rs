//! Dense tensors over a fixed dimension, stored row-major.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Field, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T, const R: usize> {
    n: usize,
    data: Vec<T>,
}

pub type Matrix<T> = Tensor<T, 2>;

/// All multi-indices of length `R` over `0..n`, in row-major order.
pub fn indices<const R: usize>(n: usize) -> impl Iterator<Item = [usize; R]> {
    let total = n.pow(R as u32);
    (0..total).map(move |mut flat| {
        let mut idx = [0; R];
        for slot in idx.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    })
}

impl<T: Field, const R: usize> Tensor<T, R> {
    pub fn zeros(n: usize) -> Self {
        Tensor {
            n,
            data: vec![T::zero(); n.pow(R as u32)],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut([usize; R]) -> T) -> Self {
        Tensor {
            n,
            data: indices::<R>(n).map(&mut f).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    fn offset(&self, idx: [usize; R]) -> usize {
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.n);
            acc * self.n + i
        })
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Tensor {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.n, other.n);
        Tensor {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|x| x * s)
    }

    /// Components in a new basis: `T'_{a…} = Σ T_{i…} M_{i a} …`, where column
    /// `a` of `m` holds the new basis vector `a` in old components.
    pub fn change_frame(&self, m: &Matrix<T>) -> Self {
        let n = self.n;
        let mut cur = self.clone();
        for mode in 0..R {
            let stride = n.pow((R - 1 - mode) as u32);
            let mut next = Tensor::zeros(n);
            for (flat, slot) in next.data.iter_mut().enumerate() {
                let a = (flat / stride) % n;
                let base = flat - a * stride;
                let mut acc = T::zero();
                for i in 0..n {
                    acc = acc + cur.data[base + i * stride] * m[[i, a]];
                }
                *slot = acc;
            }
            cur = next;
        }
        cur
    }
}

impl<T: Real, const R: usize> Tensor<T, R> {
    /// Frobenius norm over all components.
    pub fn norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn distance(&self, other: &Self) -> T {
        self.zip_with(other, |a, b| a - b).norm()
    }
}

impl<T, const R: usize> Index<[usize; R]> for Tensor<T, R>
where
    T: Field,
{
    type Output = T;
    fn index(&self, idx: [usize; R]) -> &T {
        &self.data[self.offset(idx)]
    }
}

impl<T: Field, const R: usize> IndexMut<[usize; R]> for Tensor<T, R> {
    fn index_mut(&mut self, idx: [usize; R]) -> &mut T {
        let o = self.offset(idx);
        &mut self.data[o]
    }
}

impl<T: Field> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |[i, j]| if i == j { T::one() } else { T::zero() })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |[i, j]| self[[j, i]])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |[i, j]| {
            (0..n).fold(T::zero(), |acc, k| acc + self[[i, k]] * rhs[[k, j]])
        })
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self[[i, i]])
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|i| self[[i, j]]).collect()
    }
}

impl<T: Real> Matrix<T> {
    /// Lower-triangular `L` with `self = L Lᵀ`.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[[j, j]];
            for k in 0..j {
                d = d - l[[j, k]] * l[[j, k]];
            }
            if !(d > T::zero()) {
                return Err(Error::NotPositiveDefinite);
            }
            let djj = d.sqrt();
            l[[j, j]] = djj;
            for i in j + 1..n {
                let mut s = self[[i, j]];
                for k in 0..j {
                    s = s - l[[i, k]] * l[[j, k]];
                }
                l[[i, j]] = s / djj;
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix.
    pub fn lower_inverse(&self) -> Self {
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            inv[[j, j]] = self[[j, j]].recip();
            for i in j + 1..n {
                let mut s = T::zero();
                for k in j..i {
                    s = s + self[[i, k]] * inv[[k, j]];
                }
                inv[[i, j]] = -s / self[[i, i]];
            }
        }
        inv
    }

    pub fn determinant(&self) -> T {
        match self.n {
            0 => T::one(),
            1 => self[[0, 0]],
            2 => self[[0, 0]] * self[[1, 1]] - self[[0, 1]] * self[[1, 0]],
            3 => {
                let m = |i, j| self[[i, j]];
                m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                    - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
            }
            n => {
                // Gaussian elimination with partial pivoting
                let mut a = self.clone();
                let mut det = T::one();
                for c in 0..n {
                    let p = (c..n)
                        .max_by(|&x, &y| a[[x, c]].abs().partial_cmp(&a[[y, c]].abs()).unwrap())
                        .unwrap();
                    if a[[p, c]] == T::zero() {
                        return T::zero();
                    }
                    if p != c {
                        for k in 0..n {
                            let t = a[[p, k]];
                            a[[p, k]] = a[[c, k]];
                            a[[c, k]] = t;
                        }
                        det = -det;
                    }
                    det = det * a[[c, c]];
                    for r in c + 1..n {
                        let f = a[[r, c]] / a[[c, c]];
                        for k in c..n {
                            a[[r, k]] = a[[r, k]] - f * a[[c, k]];
                        }
                    }
                }
                det
            }
        }
    }
}
