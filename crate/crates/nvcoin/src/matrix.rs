//! Dense exact matrices over big integers and big rationals, with the
//! normal-form algorithms everything else is built on.
//!
//! Conventions: matrices act on column vectors. Hermite normal form is
//! column-style, `H = M * U` with `U` unimodular; pivots sit on strictly
//! increasing rows, are positive, and entries to the left of a pivot in its
//! pivot row are reduced into `[0, pivot)`. That form is unique per column
//! span, so lattice equality is basis equality.

use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::rational::{div_floor, rat_of, Int, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IMat = Mat<Int>;
pub type QMat = Mat<Rat>;
pub type IVec = Vec<Int>;
pub type QVec = Vec<Rat>;

impl<T: Clone + Zero> Mat<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<T>>) -> Self {
        let c = cols.len();
        assert!(cols.iter().all(|col| col.len() == rows), "ragged columns");
        Mat::from_fn(rows, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T: Clone + Zero + One> Mat<T> {
    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

macro_rules! impl_arith {
    ($t:ty) => {
        impl Mat<$t> {
            pub fn mul(&self, rhs: &Self) -> Self {
                assert_eq!(self.cols, rhs.rows, "matrix product shape");
                Mat::from_fn(self.rows, rhs.cols, |i, j| {
                    let mut acc = <$t>::zero();
                    for l in 0..self.cols {
                        acc += &self[(i, l)] * &rhs[(l, j)];
                    }
                    acc
                })
            }

            pub fn mul_vec(&self, v: &[$t]) -> Vec<$t> {
                assert_eq!(self.cols, v.len(), "matrix-vector shape");
                (0..self.rows)
                    .map(|i| {
                        let mut acc = <$t>::zero();
                        for l in 0..self.cols {
                            acc += &self[(i, l)] * &v[l];
                        }
                        acc
                    })
                    .collect()
            }

            pub fn add(&self, rhs: &Self) -> Self {
                assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
                Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
            }

            pub fn sub(&self, rhs: &Self) -> Self {
                assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
                Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
            }

            pub fn neg(&self) -> Self {
                Mat::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
            }

            pub fn scale(&self, s: &$t) -> Self {
                Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * s)
            }

            pub fn is_zero(&self) -> bool {
                self.data.iter().all(|x| x.is_zero())
            }
        }
    };
}

impl_arith!(Int);
impl_arith!(Rat);

impl IMat {
    pub fn to_rat(&self) -> QMat {
        Mat::from_fn(self.rows, self.cols, |i, j| rat_of(&self[(i, j)]))
    }

    /// Column-style Hermite normal form: returns `(H, U)` with `H = self * U`,
    /// `U` unimodular, `H` canonical.
    pub fn hermite_normal_form(&self) -> (IMat, IMat) {
        let mut h = self.clone();
        let mut u = IMat::identity(self.cols);
        let mut next_col = 0usize;
        for row in 0..self.rows {
            if next_col >= self.cols {
                break;
            }
            // clear row `row` to a single nonzero among columns >= next_col
            loop {
                let mut pivot: Option<usize> = None;
                for j in next_col..self.cols {
                    if !h[(row, j)].is_zero() {
                        pivot = match pivot {
                            None => Some(j),
                            Some(p) => {
                                if h[(row, j)].abs() < h[(row, p)].abs() {
                                    Some(j)
                                } else {
                                    Some(p)
                                }
                            }
                        };
                    }
                }
                let Some(p) = pivot else { break };
                h.swap_cols(next_col, p);
                u.swap_cols(next_col, p);
                let mut others = false;
                for j in next_col + 1..self.cols {
                    if h[(row, j)].is_zero() {
                        continue;
                    }
                    others = true;
                    let q = div_floor(&h[(row, j)], &h[(row, next_col)]);
                    for i in 0..self.rows {
                        let t = &h[(i, j)] - &(&q * &h[(i, next_col)]);
                        h[(i, j)] = t;
                    }
                    for i in 0..self.cols {
                        let t = &u[(i, j)] - &(&q * &u[(i, next_col)]);
                        u[(i, j)] = t;
                    }
                }
                if !others {
                    break;
                }
            }
            if h[(row, next_col)].is_zero() {
                continue;
            }
            if h[(row, next_col)].is_negative() {
                for i in 0..self.rows {
                    h[(i, next_col)] = -h[(i, next_col)].clone();
                }
                for i in 0..self.cols {
                    u[(i, next_col)] = -u[(i, next_col)].clone();
                }
            }
            // reduce earlier pivot columns against the new pivot
            for j in 0..next_col {
                let q = div_floor(&h[(row, j)], &h[(row, next_col)]);
                if q.is_zero() {
                    continue;
                }
                for i in 0..self.rows {
                    let t = &h[(i, j)] - &(&q * &h[(i, next_col)]);
                    h[(i, j)] = t;
                }
                for i in 0..self.cols {
                    let t = &u[(i, j)] - &(&q * &u[(i, next_col)]);
                    u[(i, j)] = t;
                }
            }
            next_col += 1;
        }
        (h, u)
    }

    /// Smith normal form: returns `(D, U, V)` with `D = U * self * V` diagonal,
    /// the diagonal nonnegative with each entry dividing the next, `U`, `V`
    /// unimodular.
    pub fn smith_normal_form(&self) -> (IMat, IMat, IMat) {
        let mut d = self.clone();
        let mut u = IMat::identity(self.rows);
        let mut v = IMat::identity(self.cols);
        let n = self.rows.min(self.cols);

        for t in 0..n {
            'pivot: loop {
                // move a smallest-magnitude nonzero entry of the trailing block to (t, t)
                let mut best: Option<(usize, usize)> = None;
                for i in t..self.rows {
                    for j in t..self.cols {
                        if !d[(i, j)].is_zero() {
                            best = match best {
                                None => Some((i, j)),
                                Some((bi, bj)) => {
                                    if d[(i, j)].abs() < d[(bi, bj)].abs() {
                                        Some((i, j))
                                    } else {
                                        Some((bi, bj))
                                    }
                                }
                            };
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    break 'pivot;
                };
                d.swap_rows(t, bi);
                u.swap_rows(t, bi);
                d.swap_cols(t, bj);
                v.swap_cols(t, bj);

                let mut dirty = false;
                for j in t + 1..self.cols {
                    if d[(t, j)].is_zero() {
                        continue;
                    }
                    let q = div_floor(&d[(t, j)], &d[(t, t)]);
                    for i in 0..self.rows {
                        let val = &d[(i, j)] - &(&q * &d[(i, t)]);
                        d[(i, j)] = val;
                    }
                    for i in 0..self.cols {
                        let val = &v[(i, j)] - &(&q * &v[(i, t)]);
                        v[(i, j)] = val;
                    }
                    if !d[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
                for i in t + 1..self.rows {
                    if d[(i, t)].is_zero() {
                        continue;
                    }
                    let q = div_floor(&d[(i, t)], &d[(t, t)]);
                    for j in 0..self.cols {
                        let val = &d[(i, j)] - &(&q * &d[(t, j)]);
                        d[(i, j)] = val;
                    }
                    for j in 0..self.rows {
                        let val = &u[(i, j)] - &(&q * &u[(t, j)]);
                        u[(i, j)] = val;
                    }
                    if !d[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    continue 'pivot;
                }
                // divisibility: fold any non-divisible entry into row t and retry
                let mut fixed = true;
                'scan: for i in t + 1..self.rows {
                    for j in t + 1..self.cols {
                        if !(&d[(i, j)] % &d[(t, t)]).is_zero() {
                            for jj in 0..self.cols {
                                let val = &d[(t, jj)] + &d[(i, jj)];
                                d[(t, jj)] = val;
                            }
                            for jj in 0..self.rows {
                                let val = &u[(t, jj)] + &u[(i, jj)];
                                u[(t, jj)] = val;
                            }
                            fixed = false;
                            break 'scan;
                        }
                    }
                }
                if fixed {
                    break 'pivot;
                }
            }
            if d[(t, t)].is_negative() {
                for j in 0..self.cols {
                    d[(t, j)] = -d[(t, j)].clone();
                }
                for j in 0..self.rows {
                    u[(t, j)] = -u[(t, j)].clone();
                }
            }
        }
        (d, u, v)
    }

    /// Basis of `{x : self * x = 0}` over the integers, as matrix columns.
    pub fn integer_kernel(&self) -> IMat {
        let (h, u) = self.hermite_normal_form();
        let zero_cols: Vec<usize> = (0..self.cols)
            .filter(|&j| (0..self.rows).all(|i| h[(i, j)].is_zero()))
            .collect();
        Mat::from_fn(self.cols, zero_cols.len(), |i, k| u[(i, zero_cols[k])].clone())
    }

    pub fn det(&self) -> Int {
        let d = self.to_rat().det();
        d.to_integer()
    }

    /// True when the matrix is square with determinant +-1.
    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

impl QMat {
    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for k in 0..n {
            let pivot = (k..n).find(|&i| !m[(i, k)].is_zero());
            let Some(p) = pivot else {
                return Rat::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                det = -det;
            }
            det *= m[(k, k)].clone();
            for i in k + 1..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let factor = &m[(i, k)] / &m[(k, k)];
                for j in k..n {
                    let t = &m[(i, j)] - &(&factor * &m[(k, j)]);
                    m[(i, j)] = t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<QMat> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = QMat::identity(n);
        for k in 0..n {
            let pivot = (k..n).find(|&i| !m[(i, k)].is_zero()).ok_or(Error::SingularMatrix)?;
            m.swap_rows(pivot, k);
            inv.swap_rows(pivot, k);
            let p = m[(k, k)].clone();
            for j in 0..n {
                m[(k, j)] = &m[(k, j)] / &p;
                inv[(k, j)] = &inv[(k, j)] / &p;
            }
            for i in 0..n {
                if i == k || m[(i, k)].is_zero() {
                    continue;
                }
                let factor = m[(i, k)].clone();
                for j in 0..n {
                    let t = &m[(i, j)] - &(&factor * &m[(k, j)]);
                    m[(i, j)] = t;
                    let t = &inv[(i, j)] - &(&factor * &inv[(k, j)]);
                    inv[(i, j)] = t;
                }
            }
        }
        Ok(inv)
    }

    /// Writes `self = A / q` with `A` integral and `q` the positive lcm of all
    /// denominators.
    pub fn clear_denominators(&self) -> (IMat, Int) {
        let mut q = Int::one();
        for x in &self.data {
            q = num_integer::lcm(q, x.denom().clone());
        }
        let a = Mat::from_fn(self.rows, self.cols, |i, j| {
            let e = &self[(i, j)];
            e.numer() * (&q / e.denom())
        });
        (a, q)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.denom().is_one())
    }

    pub fn to_int(&self) -> Option<IMat> {
        if !self.is_integral() {
            return None;
        }
        Some(Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].numer().clone()
        }))
    }
}

pub fn ivec(vals: &[i64]) -> IVec {
    vals.iter().map(|&v| Int::from(v)).collect()
}

pub fn ivec_zero(d: usize) -> IVec {
    vec![Int::zero(); d]
}

pub fn ivec_add(a: &[Int], b: &[Int]) -> IVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn ivec_sub(a: &[Int], b: &[Int]) -> IVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn ivec_neg(a: &[Int]) -> IVec {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn ivec_scale(k: &Int, a: &[Int]) -> IVec {
    a.iter().map(|x| k * x).collect()
}

pub fn ivec_is_zero(a: &[Int]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn ivec_to_rat(a: &[Int]) -> QVec {
    a.iter().map(rat_of).collect()
}

pub fn qvec_zero(d: usize) -> QVec {
    vec![Rat::zero(); d]
}

pub fn qvec_add(a: &[Rat], b: &[Rat]) -> QVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn qvec_sub(a: &[Rat], b: &[Rat]) -> QVec {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn qvec_neg(a: &[Rat]) -> QVec {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn qvec_is_integral(a: &[Rat]) -> bool {
    a.iter().all(|x| x.denom().is_one())
}

pub fn qvec_to_int(a: &[Rat]) -> Option<IVec> {
    if !qvec_is_integral(a) {
        return None;
    }
    Some(a.iter().map(|x| x.numer().clone()).collect())
}

/// Lexicographic comparison of integer vectors.
pub fn ivec_cmp(a: &[Int], b: &[Int]) -> std::cmp::Ordering {
    a.cmp(b)
}
