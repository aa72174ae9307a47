//! Dense matrices over an exact field and fraction-free (Bareiss) elimination.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Exact field operations needed by elimination.
pub trait Field: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Exact quotient; `rhs` must be nonzero.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self.try_div(rhs).expect("division by a nonzero pivot")
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

pub type QMatrix = Matrix<Rational>;

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = F::zero();
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if !a.is_zero() {
                    acc = acc.add(&a.mul(&rhs[(l, j)]));
                }
            }
            acc
        }))
    }

    fn zip(&self, rhs: &Self, op: impl Fn(&F, &F) -> F) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| op(a, b))
                .collect(),
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, F::add)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip(rhs, F::sub)
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc.add(&self[(i, i)]))
    }

    /// Submatrix of the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    /// Determinant by Bareiss elimination.
    pub fn det(&self) -> Result<F> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(F::one());
        }
        let mut a = self.to_rows();
        let mut prev = F::one();
        let mut negate = false;
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Ok(F::zero());
            };
            if p != c {
                a.swap(p, c);
                negate = !negate;
            }
            for i in c + 1..n {
                for j in c + 1..n {
                    let v = a[c][c].mul(&a[i][j]).sub(&a[i][c].mul(&a[c][j]));
                    a[i][j] = v.div(&prev);
                }
                a[i][c] = F::zero();
            }
            prev = a[c][c].clone();
        }
        Ok(if negate { prev.neg() } else { prev })
    }

    /// Classical adjugate via cofactors, so it stays polynomial for polynomial input.
    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(
                "adjugate of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(Self::identity(1));
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let minor = self.select(&rows, &cols).det()?;
                out[(i, j)] = if (i + j) % 2 == 0 { minor } else { minor.neg() };
            }
        }
        Ok(out)
    }

    /// Inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Self::identity(n).to_rows();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(p, c);
            inv.swap(p, c);
            let piv = a[c][c].clone();
            for j in 0..n {
                a[c][j] = a[c][j].div(&piv);
                inv[c][j] = inv[c][j].div(&piv);
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].sub(&f.mul(&a[c][j]));
                    inv[r][j] = inv[r][j].sub(&f.mul(&inv[c][j]));
                }
            }
        }
        Some(Matrix::from_rows(inv).expect("square"))
    }

    /// Rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let rhs = vec![F::zero(); self.rows];
        let e = eliminate(self.to_rows(), rhs);
        e.pivots.len()
    }
}

impl QMatrix {
    pub fn from_ints(rows: &[&[i64]]) -> QMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| Rational::from_integer(v.into()))
                        .collect()
                })
                .collect(),
        )
        .expect("rectangular literal")
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<F: fmt::Display> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

struct Echelon<F> {
    a: Vec<Vec<F>>,
    b: Vec<F>,
    pivots: Vec<usize>,
}

fn eliminate<F: Field>(mut a: Vec<Vec<F>>, mut b: Vec<F>) -> Echelon<F> {
    let m = a.len();
    let u = a.first().map_or(0, Vec::len);
    let mut prev = F::one();
    let mut pivots = Vec::new();
    for col in 0..u {
        let r = pivots.len();
        let Some(p) = (r..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        b.swap(p, r);
        let piv = a[r][col].clone();
        for i in r + 1..m {
            let f = a[i][col].clone();
            if f.is_zero() {
                // Row untouched by this pivot, but Bareiss keeps every row at the same scale.
                for x in a[i][col + 1..u].iter_mut().filter(|x| !x.is_zero()) {
                    *x = piv.mul(x).div(&prev);
                }
                if !b[i].is_zero() {
                    b[i] = piv.mul(&b[i]).div(&prev);
                }
                continue;
            }
            let (upper, lower) = a.split_at_mut(i);
            for (x, y) in lower[0][col + 1..u].iter_mut().zip(&upper[r][col + 1..u]) {
                *x = piv.mul(x).sub(&f.mul(y)).div(&prev);
            }
            b[i] = piv.mul(&b[i]).sub(&f.mul(&b[r])).div(&prev);
            a[i][col] = F::zero();
        }
        prev = piv;
        pivots.push(col);
    }
    Echelon { a, b, pivots }
}

/// Result of solving `A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution<F> {
    Unique(Vec<F>),
    Inconsistent,
    Underdetermined { kernel_dim: usize },
}

/// Solve `A x = b` exactly. Rows are equations, columns unknowns.
pub fn solve<F: Field>(a: Vec<Vec<F>>, b: Vec<F>) -> Solution<F> {
    assert_eq!(a.len(), b.len(), "one right-hand side per row");
    let u = a.first().map_or(0, Vec::len);
    let Echelon { a, b, pivots } = eliminate(a, b);
    let rank = pivots.len();
    if b[rank..].iter().any(|v| !v.is_zero()) {
        return Solution::Inconsistent;
    }
    if rank < u {
        return Solution::Underdetermined {
            kernel_dim: u - rank,
        };
    }
    let mut x = vec![F::zero(); u];
    for r in (0..rank).rev() {
        let c = pivots[r];
        let mut acc = b[r].clone();
        for j in c + 1..u {
            if !a[r][j].is_zero() && !x[j].is_zero() {
                acc = acc.sub(&a[r][j].mul(&x[j]));
            }
        }
        x[c] = acc.div(&a[r][c]);
    }
    Solution::Unique(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, parse_scalar, rat};
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_ints(rows)
    }

    #[test]
    fn det_and_inverse() {
        let m = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det().unwrap(), int(18));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), QMatrix::identity(3));
        let adj = m.adjugate().unwrap();
        assert_eq!(adj, inv.scale(&int(18)));
        assert!(q(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn symbolic_adjugate_is_polynomial() {
        let s = |t: &str| parse_scalar(t).unwrap();
        let m = Matrix::from_rows(vec![vec![s("a"), s("b")], vec![s("c"), s("d")]]).unwrap();
        assert_eq!(m.det().unwrap(), s("a*d - b*c"));
        let adj = m.adjugate().unwrap();
        assert_eq!(adj[(0, 0)], s("d"));
        assert_eq!(adj[(0, 1)], s("-b"));
        assert!(adj[(1, 0)].is_polynomial());
    }

    #[test]
    fn solve_outcomes() {
        let a = q(&[&[1, 1], &[1, -1], &[2, 0]]).to_rows();
        let b = vec![int(3), int(1), int(4)];
        assert_eq!(solve(a.clone(), b), Solution::Unique(vec![int(2), int(1)]));
        assert_eq!(
            solve(a, vec![int(3), int(1), int(5)]),
            Solution::Inconsistent
        );
        let a = q(&[&[1, 2], &[2, 4]]).to_rows();
        assert_eq!(
            solve(a, vec![int(1), int(2)]),
            Solution::Underdetermined { kernel_dim: 1 }
        );
    }

    #[test]
    fn symbolic_right_hand_side() {
        let s = |t: &str| parse_scalar(t).unwrap();
        let a = vec![vec![s("1"), s("0")], vec![s("1"), s("2")]];
        let b = vec![s("x1"), s("x1 + y1")];
        assert_eq!(solve(a, b), Solution::Unique(vec![s("x1"), s("1/2*y1")]));
    }

    proptest! {
        #[test]
        fn solve_recovers_planted_solution(
            entries in prop::collection::vec(-5i64..6, 9),
            xs in prop::collection::vec(-5i64..6, 3),
        ) {
            let m = QMatrix::from_fn(3, 3, |i, j| int(entries[3 * i + j]));
            let x: Vec<Rational> = xs.iter().map(|&v| int(v)).collect();
            let b: Vec<Rational> = (0..3)
                .map(|i| (0..3).fold(int(0), |acc, j| acc + &m[(i, j)] * &x[j]))
                .collect();
            match solve(m.to_rows(), b) {
                Solution::Unique(sol) => {
                    prop_assert!(m.det().unwrap() != int(0));
                    prop_assert_eq!(sol, x);
                }
                Solution::Underdetermined { kernel_dim } => {
                    prop_assert_eq!(m.det().unwrap(), int(0));
                    prop_assert_eq!(kernel_dim, 3 - m.rank());
                }
                Solution::Inconsistent => prop_assert!(false, "planted system is consistent"),
            }
        }

        #[test]
        fn det_is_multiplicative(
            a in prop::collection::vec(-4i64..5, 4),
            b in prop::collection::vec(-4i64..5, 4),
        ) {
            let ma = QMatrix::from_fn(2, 2, |i, j| rat(a[2 * i + j], 1));
            let mb = QMatrix::from_fn(2, 2, |i, j| rat(b[2 * i + j], 1));
            let prod = ma.mul(&mb).unwrap();
            prop_assert_eq!(prod.det().unwrap(), ma.det().unwrap() * mb.det().unwrap());
        }
    }
}
