//! Linear algebra on Λ²(ℝⁿ): curvature operators, the Bianchi map, the Ricci
//! contraction and the orthogonal projection onto Weyl operators.
//!
//! Bivectors use the orthonormal basis `e_i ∧ e_j`, `i < j`, in
//! lexicographic order. Symmetric operators on Λ² are identified with
//! vectors of length `N(N+1)/2` (diagonal entries as is, off-diagonal ones
//! scaled by √2) so that the Frobenius inner product becomes the Euclidean
//! one; projections and ranks are computed in those coordinates.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::curvature::Tensor4;
use crate::error::{Error, Result};
use crate::scalar::{Field, Real};
use crate::tensor::Matrix;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivectorBasis {
    n: usize,
    pairs: Vec<(usize, usize)>,
    lookup: Vec<Option<usize>>,
}

impl BivectorBasis {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::new();
        let mut lookup = vec![None; n * n];
        for i in 0..n {
            for j in i + 1..n {
                lookup[i * n + j] = Some(pairs.len());
                pairs.push((i, j));
            }
        }
        BivectorBasis { n, pairs, lookup }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// `N = n(n−1)/2`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, a: usize) -> (usize, usize) {
        self.pairs[a]
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Flat index and sign of `e_i ∧ e_j`; `None` when `i == j`.
    pub fn index_of(&self, i: usize, j: usize) -> Option<(usize, bool)> {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.lookup[i * self.n + j].map(|a| (a, true)),
            std::cmp::Ordering::Greater => self.lookup[j * self.n + i].map(|a| (a, false)),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Coordinates of `x ∧ y`.
    pub fn wedge<T: Field>(&self, x: &[T], y: &[T]) -> Vec<T> {
        self.pairs
            .iter()
            .map(|&(i, j)| x[i] * y[j] - x[j] * y[i])
            .collect()
    }

    /// Matrix of the map induced on Λ² by `q`; column `(k,l)` holds
    /// `q e_k ∧ q e_l`.
    pub fn lift<T: Field>(&self, q: &Matrix<T>) -> Matrix<T> {
        Matrix::from_fn(self.len(), |[a, b]| {
            let (i, j) = self.pairs[a];
            let (k, l) = self.pairs[b];
            q[[i, k]] * q[[j, l]] - q[[i, l]] * q[[j, k]]
        })
    }
}

/// Symmetric operator on Λ²(ℝⁿ) in the orthonormal bivector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureOperator<T> {
    n: usize,
    matrix: Matrix<T>,
}

impl<T: Field> CurvatureOperator<T> {
    /// Wraps an `N × N` matrix; it must already be symmetric.
    pub fn from_matrix(n: usize, matrix: Matrix<T>) -> Self {
        assert_eq!(matrix.dim(), n * (n - 1) / 2, "operator size does not match dimension");
        CurvatureOperator { n, matrix }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_matrix(n, Matrix::zeros(n * (n - 1) / 2))
    }

    /// `ρ(e_i∧e_j, e_k∧e_l) = R_ijkl` without symmetry checks.
    pub fn from_tensor(r: &Tensor4<T>) -> Self {
        let basis = BivectorBasis::new(r.dim());
        let matrix = Matrix::from_fn(basis.len(), |[a, b]| {
            let (i, j) = basis.pair(a);
            let (k, l) = basis.pair(b);
            r[[i, j, k, l]]
        });
        CurvatureOperator { n: r.dim(), matrix }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn basis(&self) -> BivectorBasis {
        BivectorBasis::new(self.n)
    }

    /// `ρ(e_i∧e_j, e_k∧e_l)` for arbitrary index pairs.
    pub fn entry(&self, basis: &BivectorBasis, i: usize, j: usize, k: usize, l: usize) -> T {
        match (basis.index_of(i, j), basis.index_of(k, l)) {
            (Some((a, sa)), Some((b, sb))) => {
                let v = self.matrix[[a, b]];
                if sa == sb {
                    v
                } else {
                    -v
                }
            }
            _ => T::zero(),
        }
    }

    /// The (0,4) tensor with all Riemann symmetries.
    pub fn to_tensor(&self) -> Tensor4<T> {
        let basis = self.basis();
        Tensor4::from_fn(self.n, |[i, j, k, l]| self.entry(&basis, i, j, k, l))
    }

    /// `L ρ Lᵀ` with `L` the Λ²-lift of `q`.
    pub fn conjugate(&self, q: &Matrix<T>) -> Self {
        let l = self.basis().lift(q);
        CurvatureOperator {
            n: self.n,
            matrix: l.matmul(&self.matrix).matmul(&l.transpose()),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        CurvatureOperator {
            n: self.n,
            matrix: self.matrix.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        CurvatureOperator {
            n: self.n,
            matrix: self.matrix.zip_with(&other.matrix, |a, b| a + b),
        }
    }

    /// `ρ(B₁, B₂)` for bivectors in basis coordinates.
    pub fn pairing(&self, b1: &[T], b2: &[T]) -> T {
        let n = b1.len();
        let mut acc = T::zero();
        for a in 0..n {
            for b in 0..n {
                acc = acc + b1[a] * self.matrix[[a, b]] * b2[b];
            }
        }
        acc
    }
}

impl<T: Real> CurvatureOperator<T> {
    pub fn norm(&self) -> T {
        self.matrix.norm()
    }

    pub fn asymmetry(&self) -> T {
        self.matrix.distance(&self.matrix.transpose())
    }
}

/// Operator of a (0,4) tensor, rejecting inputs that lack the pair symmetries.
pub fn to_operator<T: Real>(r: &Tensor4<T>) -> Result<CurvatureOperator<T>> {
    let n = r.dim();
    let scale = r.norm();
    let tol = T::lit(1e-8) * scale;
    for [i, j, k, l] in crate::tensor::indices::<4>(n) {
        let v = r[[i, j, k, l]];
        let worst = (v + r[[j, i, k, l]])
            .abs()
            .max((v + r[[i, j, l, k]]).abs())
            .max((v - r[[k, l, i, j]]).abs());
        if worst > tol {
            return Err(Error::InvalidArgument(format!(
                "tensor lacks curvature symmetries at ({i},{j},{k},{l})"
            )));
        }
    }
    Ok(CurvatureOperator::from_tensor(r))
}

/// Sorted quadruples `i<j<k<l`, the basis of Λ⁴.
pub fn quadruples(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    out.push([i, j, k, l]);
                }
            }
        }
    }
    out
}

/// `b(ρ)(x,y,z,t) = ⅓(ρ(x∧y, z∧t) + ρ(y∧z, x∧t) + ρ(z∧x, y∧t))` on each
/// sorted quadruple.
pub fn bianchi_map<T: Field>(op: &CurvatureOperator<T>) -> Vec<T> {
    let basis = op.basis();
    let third = T::one() / T::from_usize_exact(3);
    quadruples(op.n)
        .into_iter()
        .map(|[x, y, z, t]| {
            (op.entry(&basis, x, y, z, t) + op.entry(&basis, y, z, x, t) + op.entry(&basis, z, x, y, t))
                * third
        })
        .collect()
}

/// `r(ρ)(x, y) = Σ_i ρ(x∧e_i, y∧e_i)`.
pub fn ricci_contraction<T: Field>(op: &CurvatureOperator<T>) -> Matrix<T> {
    let basis = op.basis();
    let n = op.n;
    Matrix::from_fn(n, |[x, y]| {
        (0..n).fold(T::zero(), |acc, i| acc + op.entry(&basis, x, i, y, i))
    })
}

/// `dim S²(Λ²) − dim Λ⁴ − dim S²(ℝⁿ) = n²(n²−1)/12 − n(n+1)/2`.
pub fn weyl_space_dim(n: usize) -> usize {
    n * n * (n * n - 1) / 12 - n * (n + 1) / 2
}

fn operator_space_len(n: usize) -> usize {
    let big = n * (n - 1) / 2;
    big * (big + 1) / 2
}

/// Orthonormal coordinates of a symmetric operator.
pub fn to_coordinates(op: &CurvatureOperator<f64>) -> DVector<f64> {
    let big = op.matrix.dim();
    let mut v = Vec::with_capacity(operator_space_len(op.n));
    for a in 0..big {
        v.push(op.matrix[[a, a]]);
        for b in a + 1..big {
            v.push(std::f64::consts::SQRT_2 * 0.5 * (op.matrix[[a, b]] + op.matrix[[b, a]]));
        }
    }
    DVector::from_vec(v)
}

pub fn from_coordinates(n: usize, v: &DVector<f64>) -> CurvatureOperator<f64> {
    let big = n * (n - 1) / 2;
    let mut m = Matrix::zeros(big);
    let mut it = v.iter();
    for a in 0..big {
        m[[a, a]] = *it.next().expect("coordinate vector too short");
        for b in a + 1..big {
            let x = *it.next().expect("coordinate vector too short") / std::f64::consts::SQRT_2;
            m[[a, b]] = x;
            m[[b, a]] = x;
        }
    }
    CurvatureOperator::from_matrix(n, m)
}

/// Orthogonal projector onto the kernel of a stack of linear constraints.
#[derive(Debug, Clone)]
pub struct KernelProjector {
    n: usize,
    matrix: DMatrix<f64>,
    constraint_rank: usize,
}

impl KernelProjector {
    fn build(n: usize, with_ricci: bool) -> Self {
        let m = operator_space_len(n);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut columns = Vec::with_capacity(m);
        for c in 0..m {
            let mut e = DVector::zeros(m);
            e[c] = 1.0;
            let op = from_coordinates(n, &e);
            let mut col = bianchi_map(&op);
            if with_ricci {
                let r = ricci_contraction(&op);
                for x in 0..n {
                    for y in x..n {
                        col.push(r[[x, y]]);
                    }
                }
            }
            columns.push(col);
        }
        let rcount = columns.first().map_or(0, Vec::len);
        for r in 0..rcount {
            rows.push(columns.iter().map(|c| c[r]).collect());
        }
        let a = DMatrix::from_fn(rows.len(), m, |i, j| rows[i][j]);
        let (constraint_rank, row_space) = if a.nrows() == 0 {
            (0, DMatrix::zeros(0, m))
        } else {
            let svd = a.svd(false, true);
            let vt = svd.v_t.expect("requested V^T");
            let smax = svd.singular_values.max();
            let keep: Vec<usize> = (0..svd.singular_values.len())
                .filter(|&k| svd.singular_values[k] > RANK_THRESHOLD * smax)
                .collect();
            let rs = DMatrix::from_fn(keep.len(), m, |i, j| vt[(keep[i], j)]);
            (keep.len(), rs)
        };
        let matrix = DMatrix::identity(m, m) - row_space.transpose() * &row_space;
        KernelProjector {
            n,
            matrix,
            constraint_rank,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Dimension of the image computed from the constraint rank.
    pub fn image_dim(&self) -> usize {
        self.matrix.nrows() - self.constraint_rank
    }

    /// Numerical rank of the projector matrix itself. Its singular values
    /// are 0 or 1, so the threshold is absolute.
    pub fn numerical_rank(&self) -> usize {
        self.matrix
            .singular_values()
            .iter()
            .filter(|&&x| x > RANK_THRESHOLD)
            .count()
    }

    pub fn apply(&self, op: &CurvatureOperator<f64>) -> CurvatureOperator<f64> {
        from_coordinates(self.n, &(&self.matrix * to_coordinates(op)))
    }
}

pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let s = m.singular_values();
    let smax = s.max();
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > RANK_THRESHOLD * smax).count()
}

const CACHE: usize = crate::dsl::MAX_DIMENSION + 1;

fn check_dim(n: usize) -> Result<()> {
    if !(3..CACHE).contains(&n) {
        return Err(Error::Dimension(n));
    }
    Ok(())
}

/// Projector onto `ker b ∩ ker r`, built once per dimension.
pub fn weyl_projector(n: usize) -> Result<&'static KernelProjector> {
    static CELLS: [OnceLock<KernelProjector>; CACHE] = [const { OnceLock::new() }; CACHE];
    check_dim(n)?;
    Ok(CELLS[n].get_or_init(|| KernelProjector::build(n, true)))
}

/// Projector onto `ker b`, the algebraic curvature operators.
pub fn curvature_projector(n: usize) -> Result<&'static KernelProjector> {
    static CELLS: [OnceLock<KernelProjector>; CACHE] = [const { OnceLock::new() }; CACHE];
    check_dim(n)?;
    Ok(CELLS[n].get_or_init(|| KernelProjector::build(n, false)))
}

/// A symmetric operator in `ker b ∩ ker r`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylOperator(CurvatureOperator<f64>);

/// Relative tolerance for the Weyl-space membership check.
pub const WEYL_TOLERANCE: f64 = 1e-10;

impl WeylOperator {
    /// Accepts `op` if its Bianchi and Ricci parts are below
    /// `WEYL_TOLERANCE · ‖op‖` (with an absolute floor of 1e-12).
    pub fn new(op: CurvatureOperator<f64>) -> Result<Self> {
        let d = weyl_defects(&op);
        let tol = WEYL_TOLERANCE * op.norm().max(1e-2);
        if d.asymmetry > tol || d.bianchi > tol || d.ricci > tol {
            return Err(Error::InvalidArgument(format!(
                "not a Weyl operator: asymmetry {:.3e}, bianchi {:.3e}, ricci {:.3e}",
                d.asymmetry, d.bianchi, d.ricci
            )));
        }
        Ok(WeylOperator(op))
    }

    pub fn new_unchecked(op: CurvatureOperator<f64>) -> Self {
        WeylOperator(op)
    }

    pub fn zeros(n: usize) -> Self {
        WeylOperator(CurvatureOperator::zeros(n))
    }

    pub fn operator(&self) -> &CurvatureOperator<f64> {
        &self.0
    }

    pub fn into_operator(self) -> CurvatureOperator<f64> {
        self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.n
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        WeylOperator(self.0.scale(s))
    }

    pub fn conjugate(&self, q: &Matrix<f64>) -> Self {
        WeylOperator(self.0.conjugate(q))
    }
}

/// Norms of the parts of an operator that a Weyl operator must lack.
#[derive(Debug, Clone, Copy)]
pub struct WeylDefects {
    pub asymmetry: f64,
    pub bianchi: f64,
    pub ricci: f64,
}

pub fn weyl_defects(op: &CurvatureOperator<f64>) -> WeylDefects {
    WeylDefects {
        asymmetry: op.asymmetry(),
        bianchi: bianchi_map(op).iter().map(|x| x * x).sum::<f64>().sqrt(),
        ricci: ricci_contraction(op).norm(),
    }
}

/// Orthogonal projection onto the Weyl operators.
pub fn project_weyl(op: &CurvatureOperator<f64>) -> Result<WeylOperator> {
    Ok(WeylOperator(weyl_projector(op.n)?.apply(op)))
}
