//! Dense complex matrices and the Hermitian eigensolver behind every spectrum.
//!
//! [`MatrixC`] stores entries in row-major order. Products skip zero entries of
//! the left factor, which keeps ladder-operator algebra (a few nonzeros per row)
//! cheap without a separate sparse type.
//!
//! [`hermitian_eigen`] first splits the matrix into the connected components of
//! its sparsity graph and diagonalizes each block separately. For the Hamiltonians
//! in this crate that split is exact and typically yields 2 to 4 independent
//! blocks (orbital parity times spinor pairing), which is what makes
//! `4·n_max²`-dimensional Dirac problems tractable on one core.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra as na;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct MatrixC {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl MatrixC {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries. Fails if the count is not `rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-abs entry of the anti-Hermitian part `(A - A†)/2`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] - self[(j, i)].conj()) * 0.5;
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "subtract")?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m) = (self.rows, other.cols);
        let mut out = vec![ZERO; n * m];
        for i in 0..n {
            let out_row = &mut out[i * m..(i + 1) * m];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { rows: n, cols: m, data: out })
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Kronecker product `self ⊗ other`; `self` carries the slow (outer) index.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = vec![ZERO; r * c];
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self[(i1, j1)];
                if a == ZERO {
                    continue;
                }
                for i2 in 0..other.rows {
                    let row = (i1 * other.rows + i2) * c + j1 * other.cols;
                    for (o, &b) in out[row..row + other.cols].iter_mut().zip(other.row(i2)) {
                        *o = a * b;
                    }
                }
            }
        }
        Self { rows: r, cols: c, data: out }
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if !self.is_square() || !other.is_square() || self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "commutator needs equal square matrices, got {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.try_matmul(other)?.try_sub(&other.try_matmul(self)?)
    }

    /// `A B + B A`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        if !self.is_square() || !other.is_square() || self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "anticommutator needs equal square matrices, got {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.try_matmul(other)?.try_add(&other.try_matmul(self)?)
    }

    /// `P A P` for a diagonal 0/1 projector given as a mask.
    pub fn project(&self, keep: &[bool]) -> Self {
        assert_eq!(keep.len(), self.rows);
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| if keep[i] && keep[j] { self[(i, j)] } else { ZERO })
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    /// Rectangular block starting at `(row0, col0)`.
    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)])
    }

    /// Entrywise equality including the sign of zero.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits())
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot {what} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub(crate) fn to_nalgebra(&self) -> na::DMatrix<C64> {
        na::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &na::DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for MatrixC {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatrixC {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for MatrixC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixC {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for z in self.row(i).iter().take(8) {
                write!(f, "{:>8.3}{:+.3}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator sugar for same-shape arithmetic. These panic on shape mismatch;
// fallible callers use the `try_*` methods.
impl Add for &MatrixC {
    type Output = MatrixC;
    fn add(self, rhs: &MatrixC) -> MatrixC {
        self.try_add(rhs).expect("matrix shapes differ")
    }
}

impl Sub for &MatrixC {
    type Output = MatrixC;
    fn sub(self, rhs: &MatrixC) -> MatrixC {
        self.try_sub(rhs).expect("matrix shapes differ")
    }
}

impl Mul for &MatrixC {
    type Output = MatrixC;
    fn mul(self, rhs: &MatrixC) -> MatrixC {
        self.try_matmul(rhs).expect("inner dimensions differ")
    }
}

impl Mul<C64> for &MatrixC {
    type Output = MatrixC;
    fn mul(self, rhs: C64) -> MatrixC {
        self.scale(rhs)
    }
}

impl Mul<f64> for &MatrixC {
    type Output = MatrixC;
    fn mul(self, rhs: f64) -> MatrixC {
        self.scale_real(rhs)
    }
}

impl Neg for &MatrixC {
    type Output = MatrixC;
    fn neg(self) -> MatrixC {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&MatrixC> for MatrixC {
    fn add_assign(&mut self, rhs: &MatrixC) {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix shapes differ");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&MatrixC> for MatrixC {
    fn sub_assign(&mut self, rhs: &MatrixC) {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "matrix shapes differ");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
///
/// Column `k` of `vectors` (when present) is the normalized eigenvector of `values[k]`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<MatrixC>,
}

/// Absolute anti-Hermitian tolerance, scaled by `max(1, max_abs(H))`.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn check_hermitian(h: &MatrixC) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", h.rows, h.cols)));
    }
    let res = h.hermiticity_residual();
    let scale = h.max_abs().max(1.0);
    if res.is_nan() || res > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { residual: res });
    }
    Ok(())
}

/// Connected components of the sparsity graph (`i ~ j` when `H[i,j] != 0`).
/// Components are ordered by smallest member; members ascend.
pub fn sparsity_blocks(h: &MatrixC) -> Vec<Vec<usize>> {
    let n = h.rows;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if h[(i, j)] != ZERO || h[(j, i)] != ZERO {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => blocks[k].push(i),
            None => {
                roots.push(r);
                blocks.push(vec![i]);
            }
        }
    }
    blocks
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigen(h: &MatrixC) -> Result<Eigen> {
    eigen_impl(h, true)
}

/// Eigenvalues only (roughly three times cheaper than [`hermitian_eigen`]).
pub fn hermitian_eigenvalues(h: &MatrixC) -> Result<Vec<f64>> {
    Ok(eigen_impl(h, false)?.values)
}

/// (value, block, local index, sparse column `(row, entry)`)
type EigenPair = (f64, usize, usize, Option<Vec<(usize, C64)>>);

fn eigen_impl(h: &MatrixC, want_vectors: bool) -> Result<Eigen> {
    check_hermitian(h)?;
    let n = h.rows;
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(n);
    for (b, idx) in sparsity_blocks(h).iter().enumerate() {
        let sub = h.submatrix(idx).to_nalgebra();
        if want_vectors {
            let eig = na::SymmetricEigen::new(sub);
            for k in 0..idx.len() {
                let col: Vec<(usize, C64)> =
                    idx.iter().enumerate().map(|(r, &g)| (g, eig.eigenvectors[(r, k)])).collect();
                pairs.push((eig.eigenvalues[k], b, k, Some(col)));
            }
        } else {
            let vals = sub.symmetric_eigenvalues();
            for k in 0..idx.len() {
                pairs.push((vals[k], b, k, None));
            }
        }
    }
    if pairs.iter().any(|p| !p.0.is_finite()) {
        return Err(Error::Numerical("eigensolver produced a non-finite eigenvalue".into()));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = want_vectors.then(|| {
        let mut v = MatrixC::zeros(n, n);
        for (k, p) in pairs.iter().enumerate() {
            for &(g, z) in p.3.as_ref().expect("vectors requested") {
                v[(g, k)] = z;
            }
        }
        v
    });
    Ok(Eigen { values, vectors })
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn solve(a: &MatrixC, b: &[C64]) -> Result<Vec<C64>> {
    if !a.is_square() || a.rows != b.len() {
        return Err(Error::Dimension(format!(
            "cannot solve {}x{} system with right-hand side of length {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    let lu = a.to_nalgebra().lu();
    let rhs = na::DVector::from_column_slice(b);
    let x = lu.solve(&rhs).ok_or(Error::Singular)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(x.iter().copied().collect())
}

pub fn inverse(a: &MatrixC) -> Result<MatrixC> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("cannot invert {}x{} matrix", a.rows, a.cols)));
    }
    let inv = a.to_nalgebra().try_inverse().ok_or(Error::Singular)?;
    Ok(MatrixC::from_nalgebra(&inv))
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨u|v⟩` (conjugate-linear in `u`).
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_places_outer_factor_slow() {
        let a = MatrixC::from_row_major(2, 2, vec![c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]).unwrap();
        let b = MatrixC::identity(2);
        let k = a.kron(&b);
        assert_eq!(k[(0, 2)], c(2., 0.));
        assert_eq!(k[(1, 3)], c(2., 0.));
        assert_eq!(k[(0, 1)], ZERO);
        assert_eq!(k[(2, 0)], c(3., 0.));
    }

    #[test]
    fn matmul_matches_hand_product() {
        let a = MatrixC::from_row_major(2, 2, vec![c(1., 1.), c(0., 2.), c(3., 0.), c(0., 0.)]).unwrap();
        let b = MatrixC::from_row_major(2, 1, vec![c(1., 0.), c(0., 1.)]).unwrap();
        let p = &a * &b;
        assert_eq!(p[(0, 0)], c(1., 1.) + c(0., 2.) * c(0., 1.));
        assert_eq!(p[(1, 0)], c(3., 0.));
    }

    #[test]
    fn shape_errors_are_reported() {
        let a = MatrixC::zeros(2, 3);
        let b = MatrixC::zeros(2, 3);
        assert!(matches!(a.try_matmul(&b), Err(Error::Dimension(_))));
        assert!(matches!(a.commutator(&b), Err(Error::Dimension(_))));
        assert!(MatrixC::from_row_major(2, 2, vec![ZERO; 3]).is_err());
    }

    #[test]
    fn eigen_of_block_diagonal_matrix_is_sorted_and_orthonormal() {
        // two decoupled 2x2 blocks interleaved
        let mut h = MatrixC::zeros(4, 4);
        h[(0, 0)] = c(1., 0.);
        h[(0, 2)] = c(0., 1.);
        h[(2, 0)] = c(0., -1.);
        h[(2, 2)] = c(1., 0.);
        h[(1, 1)] = c(-3., 0.);
        h[(3, 3)] = c(5., 0.);
        assert_eq!(sparsity_blocks(&h), vec![vec![0, 2], vec![1], vec![3]]);
        let e = hermitian_eigen(&h).unwrap();
        let expect = [-3.0, 0.0, 2.0, 5.0];
        for (v, x) in e.values.iter().zip(expect) {
            assert!((v - x).abs() < 1e-14, "{v} vs {x}");
        }
        let v = e.vectors.unwrap();
        let g = &v.adjoint() * &v;
        assert!((&g - &MatrixC::identity(4)).max_abs() < 1e-14);
        let hv = &h * &v;
        let vl = &v * &MatrixC::from_diagonal(&e.values.iter().map(|&x| c(x, 0.)).collect::<Vec<_>>());
        assert!((&hv - &vl).max_abs() < 1e-13);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut h = MatrixC::identity(3);
        h[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eigen(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn solve_and_inverse_agree() {
        let a = MatrixC::from_row_major(2, 2, vec![c(2., 0.), c(0., 1.), c(0., -1.), c(3., 0.)]).unwrap();
        let x = solve(&a, &[c(1., 0.), c(0., 0.)]).unwrap();
        let inv = inverse(&a).unwrap();
        assert!((x[0] - inv[(0, 0)]).norm() < 1e-15);
        assert!((x[1] - inv[(1, 0)]).norm() < 1e-15);
        let sing = MatrixC::zeros(2, 2);
        assert!(matches!(solve(&sing, &[ONE, ONE]), Err(Error::Singular)));
    }
}
