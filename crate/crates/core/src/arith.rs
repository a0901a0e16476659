//! Exact integer and rational linear algebra.
//!
//! Everything downstream (pairings, dual cones, lattice quotients, regularity
//! certificates) is computed here without floating point. Integers are
//! arbitrary precision; rationals are always kept in lowest terms with a
//! positive denominator by `num-rational`.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;
pub type IntVector = Vec<Int>;
pub type RatVector = Vec<Rat>;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_from_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

pub fn ivec(entries: &[i64]) -> IntVector {
    entries.iter().map(|&e| Int::from(e)).collect()
}

pub fn rvec(entries: &[i64]) -> RatVector {
    entries
        .iter()
        .map(|&e| Rat::from_integer(Int::from(e)))
        .collect()
}

pub fn to_rat_vec(v: &[Int]) -> RatVector {
    v.iter().map(rat_from_int).collect()
}

/// Returns the integer vector if every entry is integral.
pub fn to_int_vec(v: &[Rat]) -> Option<IntVector> {
    v.iter()
        .map(|x| x.is_integer().then(|| x.to_integer()))
        .collect()
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Int::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int_rat(a: &[Int], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, y)| acc + y * rat_from_int(x))
}

pub fn add_vec(a: &[Int], b: &[Int]) -> IntVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Int], b: &[Int]) -> IntVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(a: &[Int], k: &Int) -> IntVector {
    a.iter().map(|x| x * k).collect()
}

pub fn is_zero_vec<T: Zero>(v: &[T]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn unit_vector(dim: usize, index: usize) -> IntVector {
    let mut v = vec![Int::zero(); dim];
    v[index] = Int::one();
    v
}

pub fn gcd_all(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |acc, x| acc.gcd(x))
}

/// Divides out the content of a nonzero integer vector.
pub fn primitive(v: &[Int]) -> Result<IntVector> {
    let g = gcd_all(v);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// The primitive integer vector on the ray through a nonzero rational vector.
pub fn primitive_from_rat(v: &[Rat]) -> Result<IntVector> {
    let l = v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: IntVector = v
        .iter()
        .map(|x| (x * rat_from_int(&l)).to_integer())
        .collect();
    primitive(&scaled)
}

/// Least common multiple of the denominators of a rational vector.
pub fn denominator_lcm<'a, I: IntoIterator<Item = &'a Rat>>(values: I) -> Int {
    values
        .into_iter()
        .fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

/// Lexicographic comparison used for all canonical orderings.
pub fn lex_cmp<T: Ord>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    a.cmp(b)
}

pub fn fmt_vec<T: fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<Int>;
pub type RatMatrix = Matrix<Rat>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Builds a matrix from rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::RaggedMatrix);
            }
            data.extend(row.iter().cloned());
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }
}

impl<'a, T> Mul for &'a Matrix<T>
where
    T: Clone + Zero + Add<Output = T>,
    for<'x> &'x T: Mul<&'x T, Output = T>,
{
    type Output = Matrix<T>;

    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).clone() + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let converted: Vec<IntVector> = rows.iter().map(|r| ivec(r)).collect();
        Matrix::from_rows(cols, &converted)
    }

    pub fn to_rat(&self) -> RatMatrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(rat_from_int).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Int]) -> IntVector {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &Int) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(target, j) + factor * self.get(source, j);
            self.set(target, j, v);
        }
    }

    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &Int) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, target) + factor * self.get(i, source);
            self.set(i, target, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl RatMatrix {
    pub fn mul_vec(&self, v: &[Rat]) -> RatVector {
        (0..self.rows).map(|i| dot_rat(self.row(i), v)).collect()
    }
}

/// `A = U·S·V` with `U`, `V` unimodular and `S` diagonal with
/// `d_1 | d_2 | … | d_k`, all nonnegative. The inverses of `U` and `V` are
/// kept alongside since cokernel and kernel presentations read off them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries of `S` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }

    pub fn invariant_factors(&self) -> Vec<Int> {
        self.diagonal()
            .into_iter()
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

struct SnfState {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfState {
    // row_i += c * row_j on S
    fn row_add(&mut self, i: usize, j: usize, c: &Int) {
        self.s.add_row_multiple(i, j, c);
        self.u_inv.add_row_multiple(i, j, c);
        self.u.add_col_multiple(j, i, &-c);
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        self.s.swap_rows(i, j);
        self.u_inv.swap_rows(i, j);
        self.u.swap_cols(i, j);
    }

    fn row_negate(&mut self, i: usize) {
        self.s.negate_row(i);
        self.u_inv.negate_row(i);
        self.u.negate_col(i);
    }

    // col_j += c * col_i on S
    fn col_add(&mut self, j: usize, i: usize, c: &Int) {
        self.s.add_col_multiple(j, i, c);
        self.v_inv.add_col_multiple(j, i, c);
        self.v.add_row_multiple(i, j, &-c);
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        self.s.swap_cols(i, j);
        self.v_inv.swap_cols(i, j);
        self.v.swap_rows(i, j);
    }
}

/// Smith normal form by elementary row and column operations, choosing the
/// smallest available entry as pivot.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut st = SnfState {
        s: a.clone(),
        u: Matrix::identity(m),
        u_inv: Matrix::identity(m),
        v: Matrix::identity(n),
        v_inv: Matrix::identity(n),
    };
    for t in 0..m.min(n) {
        let Some((pi, pj)) = smallest_entry(&st.s, t, t..m, t..n) else {
            break;
        };
        st.row_swap(t, pi);
        st.col_swap(t, pj);
        loop {
            let pivot = st.s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                if !st.s.get(i, t).is_zero() {
                    let q = st.s.get(i, t) / &pivot;
                    st.row_add(i, t, &-q);
                    clean &= st.s.get(i, t).is_zero();
                }
            }
            for j in t + 1..n {
                if !st.s.get(t, j).is_zero() {
                    let q = st.s.get(t, j) / &pivot;
                    st.col_add(j, t, &-q);
                    clean &= st.s.get(t, j).is_zero();
                }
            }
            if !clean {
                // a remainder is now smaller than the pivot; bring it in
                let (bi, bj) = smallest_in_cross(&st.s, t);
                st.row_swap(t, bi);
                st.col_swap(t, bj);
                continue;
            }
            let offender = (t + 1..m).find_map(|i| {
                (t + 1..n)
                    .find(|&j| !st.s.get(i, j).is_multiple_of(&pivot))
                    .map(|_| i)
            });
            match offender {
                Some(i) => st.row_add(t, i, &Int::one()),
                None => break,
            }
        }
        if st.s.get(t, t).is_negative() {
            st.row_negate(t);
        }
    }
    SmithDecomposition {
        u: st.u,
        s: st.s,
        v: st.v,
        u_inv: st.u_inv,
        v_inv: st.v_inv,
    }
}

fn smallest_entry(
    s: &IntMatrix,
    _t: usize,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, Int)> = None;
    for i in rows {
        for j in cols.clone() {
            let v = s.get(i, j).abs();
            if v.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| &v < b) {
                best = Some((i, j, v));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn smallest_in_cross(s: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t, s.get(t, t).abs());
    for i in t + 1..s.rows() {
        let v = s.get(i, t).abs();
        if !v.is_zero() && v < best.2 {
            best = (i, t, v);
        }
    }
    for j in t + 1..s.cols() {
        let v = s.get(t, j).abs();
        if !v.is_zero() && v < best.2 {
            best = (t, j, v);
        }
    }
    (best.0, best.1)
}

/// Integer lattice basis of `{x ∈ Z^n : A x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<IntVector> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    (r..a.cols()).map(|j| snf.v_inv.column(j)).collect()
}

/// Row-style Hermite normal form: echelon rows with positive pivots and
/// entries above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(a: &IntMatrix) -> IntMatrix {
    let mut h = a.clone();
    let (m, n) = (h.rows(), h.cols());
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let mut best: Option<(usize, Int)> = None;
            for i in r..m {
                let v = h.get(i, c).abs();
                if !v.is_zero() && best.as_ref().is_none_or(|(_, b)| &v < b) {
                    best = Some((i, v));
                }
            }
            let Some((bi, _)) = best else { break };
            h.swap_rows(r, bi);
            let mut done = true;
            for i in r + 1..m {
                if !h.get(i, c).is_zero() {
                    let q = h.get(i, c).div_floor(h.get(r, c));
                    h.add_row_multiple(i, r, &-q);
                    done &= h.get(i, c).is_zero();
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
        }
        let pivot = h.get(r, c).clone();
        for i in 0..r {
            let q = h.get(i, c).div_floor(&pivot);
            h.add_row_multiple(i, r, &-q);
        }
        r += 1;
    }
    let rows: Vec<IntVector> = (0..r).map(|i| h.row(i).to_vec()).collect();
    Matrix::from_rows(n, &rows).expect("rows share the matrix width")
}

/// Equality of the integer row lattices of two matrices of equal width.
pub fn row_lattice_equal(a: &IntMatrix, b: &IntMatrix) -> bool {
    a.cols() == b.cols() && hermite_normal_form(a) == hermite_normal_form(b)
}

/// Reduced row echelon form over Q; returns the pivot columns.
pub fn rref(a: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        let Some(p) = (r..m.rows()).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        m.swap_rows(r, p);
        let inv = m.get(r, c).recip();
        for j in 0..m.cols() {
            let v = m.get(r, j) * &inv;
            m.set(r, j, v);
        }
        for i in 0..m.rows() {
            if i == r || m.get(i, c).is_zero() {
                continue;
            }
            let f = m.get(i, c).clone();
            for j in 0..m.cols() {
                let v = m.get(i, j) - &f * m.get(r, j);
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank_rat(a: &RatMatrix) -> usize {
    rref(a).1.len()
}

pub fn rank_int(a: &IntMatrix) -> usize {
    rank_rat(&a.to_rat())
}

/// Rank of a list of integer vectors of common length `dim`.
pub fn rank_of_vectors(dim: usize, vectors: &[IntVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank_int(&Matrix::from_rows(dim, vectors).expect("vectors share a length"))
}

/// Basis of the rational nullspace `{x : A x = 0}`.
pub fn nullspace_rat(a: &RatMatrix) -> Vec<RatVector> {
    let (r, pivots) = rref(a);
    let n = a.cols();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); n];
            x[f] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                x[p] = -r.get(row, f).clone();
            }
            x
        })
        .collect()
}

/// Solution set of `A x = b` over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionSet {
    None,
    Unique(RatVector),
    /// `particular + span(kernel)`; the particular solution has zeros in all
    /// free coordinates.
    Affine {
        particular: RatVector,
        kernel: Vec<RatVector>,
    },
}

impl SolutionSet {
    /// Some solution, if any exists.
    pub fn any(&self) -> Option<&RatVector> {
        match self {
            SolutionSet::None => None,
            SolutionSet::Unique(x) => Some(x),
            SolutionSet::Affine { particular, .. } => Some(particular),
        }
    }
}

pub fn solve_rational(a: &RatMatrix, b: &[Rat]) -> Result<SolutionSet> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: b.len(),
        });
    }
    let n = a.cols();
    let mut aug = Matrix::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let (r, pivots) = rref(&aug);
    if pivots.contains(&n) {
        return Ok(SolutionSet::None);
    }
    let mut x = vec![Rat::zero(); n];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, n).clone();
    }
    if pivots.len() == n {
        Ok(SolutionSet::Unique(x))
    } else {
        Ok(SolutionSet::Affine {
            particular: x,
            kernel: nullspace_rat(a),
        })
    }
}

/// Determinant over Q by elimination.
pub fn determinant(a: &RatMatrix) -> Rat {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    let mut m = a.clone();
    let n = m.rows();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap_rows(p, c);
            det = -det;
        }
        let pivot = m.get(c, c).clone();
        det *= &pivot;
        for i in c + 1..n {
            if m.get(i, c).is_zero() {
                continue;
            }
            let f = m.get(i, c) / &pivot;
            for j in c..n {
                let v = m.get(i, j) - &f * m.get(c, j);
                m.set(i, j, v);
            }
        }
    }
    det
}

/// A linear inequality `coeffs·x + constant > 0` (strict) or `≥ 0` (weak).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub coeffs: RatVector,
    pub constant: Rat,
    pub strict: bool,
}

impl Inequality {
    pub fn weak(coeffs: RatVector, constant: Rat) -> Self {
        Inequality {
            coeffs,
            constant,
            strict: false,
        }
    }

    pub fn strict(coeffs: RatVector, constant: Rat) -> Self {
        Inequality {
            coeffs,
            constant,
            strict: true,
        }
    }

    pub fn evaluate(&self, x: &[Rat]) -> Rat {
        dot_rat(&self.coeffs, x) + &self.constant
    }

    pub fn is_satisfied_by(&self, x: &[Rat]) -> bool {
        let v = self.evaluate(x);
        if self.strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    }

    fn is_constant(&self) -> bool {
        is_zero_vec(&self.coeffs)
    }

    fn constant_holds(&self) -> bool {
        if self.strict {
            self.constant.is_positive()
        } else {
            !self.constant.is_negative()
        }
    }

    /// Positive rescaling making the coefficients a primitive integer vector.
    fn normalized(&self) -> Inequality {
        if self.is_constant() {
            let constant = Rat::from_integer(self.constant.numer().signum());
            return Inequality {
                coeffs: self.coeffs.clone(),
                constant,
                strict: self.strict,
            };
        }
        let l = denominator_lcm(self.coeffs.iter());
        let scaled: IntVector = self
            .coeffs
            .iter()
            .map(|c| (c * rat_from_int(&l)).to_integer())
            .collect();
        let g = gcd_all(&scaled);
        let factor = Rat::new(l, g);
        Inequality {
            coeffs: self.coeffs.iter().map(|c| c * &factor).collect(),
            constant: &self.constant * &factor,
            strict: self.strict,
        }
    }

    /// Whether `self` implies `other` when both have identical coefficients.
    fn at_least_as_tight(&self, other: &Inequality) -> bool {
        self.constant < other.constant
            || (self.constant == other.constant && (self.strict || !other.strict))
    }
}

#[derive(Clone, Debug)]
struct Tracked {
    ineq: Inequality,
    history: Vec<u64>,
}

fn history_union(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x | y).collect()
}

fn history_size(h: &[u64]) -> u32 {
    h.iter().map(|w| w.count_ones()).sum()
}

/// Combines an inequality with positive coefficient on `var` and one with a
/// negative coefficient so that `var` cancels. Strict if either input is.
fn combine(pos: &Inequality, neg: &Inequality, var: usize) -> Inequality {
    let a = pos.coeffs[var].clone();
    let b = -neg.coeffs[var].clone();
    let coeffs = pos
        .coeffs
        .iter()
        .zip(&neg.coeffs)
        .map(|(p, n)| p * &b + n * &a)
        .collect::<RatVector>();
    let mut ineq = Inequality {
        coeffs,
        constant: &pos.constant * &b + &neg.constant * &a,
        strict: pos.strict || neg.strict,
    };
    ineq.coeffs[var] = Rat::zero();
    ineq
}

/// Keeps one tightest representative per coefficient direction and drops
/// constant inequalities that hold.
fn prune(list: Vec<Tracked>) -> Vec<Tracked> {
    let mut out: Vec<Tracked> = Vec::with_capacity(list.len());
    let mut index: std::collections::HashMap<RatVector, usize> = std::collections::HashMap::new();
    for t in list {
        if t.ineq.is_constant() && t.ineq.constant_holds() {
            continue;
        }
        match index.get(&t.ineq.coeffs) {
            Some(&k) => {
                if t.ineq.at_least_as_tight(&out[k].ineq)
                    && (t.ineq != out[k].ineq
                        || history_size(&t.history) < history_size(&out[k].history))
                {
                    out[k] = t;
                }
            }
            None => {
                index.insert(t.ineq.coeffs.clone(), out.len());
                out.push(t);
            }
        }
    }
    out
}

fn eliminate_tracked(system: &[Tracked], var: usize, max_history: Option<u32>) -> Vec<Tracked> {
    let mut kept = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for t in system {
        let c = &t.ineq.coeffs[var];
        if c.is_positive() {
            pos.push(t);
        } else if c.is_negative() {
            neg.push(t);
        } else {
            kept.push(t.clone());
        }
    }
    for p in &pos {
        for n in &neg {
            let history = history_union(&p.history, &n.history);
            if let Some(limit) = max_history {
                if history_size(&history) > limit {
                    continue;
                }
            }
            kept.push(Tracked {
                ineq: combine(&p.ineq, &n.ineq, var).normalized(),
                history,
            });
        }
    }
    prune(kept)
}

fn track(system: &[Inequality]) -> Vec<Tracked> {
    let words = system.len().div_ceil(64).max(1);
    let tracked = system
        .iter()
        .enumerate()
        .map(|(i, ineq)| {
            let mut history = vec![0u64; words];
            history[i / 64] |= 1 << (i % 64);
            Tracked {
                ineq: ineq.normalized(),
                history,
            }
        })
        .collect();
    prune(tracked)
}

/// Projects out variable `var`: the reduced system (with a zero coefficient
/// on `var`) is feasible iff the input is, and any solution of it lifts.
pub fn fourier_motzkin_eliminate(system: &[Inequality], var: usize) -> Vec<Inequality> {
    eliminate_tracked(&track(system), var, None)
        .into_iter()
        .map(|t| t.ineq)
        .collect()
}

/// Decides feasibility of a mixed strict/weak system over `nvars` rational
/// variables by eliminating every variable in turn (with Chernikov pruning),
/// then recovers a witness by back-substitution.
pub fn fm_feasible(system: &[Inequality], nvars: usize) -> Option<RatVector> {
    for ineq in system {
        assert_eq!(ineq.coeffs.len(), nvars, "inequality width mismatch");
    }
    let mut levels: Vec<Vec<Tracked>> = Vec::with_capacity(nvars + 1);
    let mut current = track(system);
    for var in 0..nvars {
        levels.push(current.clone());
        current = eliminate_tracked(&current, var, Some(var as u32 + 2));
    }
    if current.iter().any(|t| !t.ineq.constant_holds()) {
        return None;
    }
    let mut x = vec![Rat::zero(); nvars];
    for var in (0..nvars).rev() {
        x[var] = choose_value(&levels[var], var, &x)?;
    }
    debug_assert!(system.iter().all(|i| i.is_satisfied_by(&x)));
    Some(x)
}

struct Bound {
    value: Rat,
    strict: bool,
}

fn choose_value(system: &[Tracked], var: usize, x: &[Rat]) -> Option<Rat> {
    let mut lower: Option<Bound> = None;
    let mut upper: Option<Bound> = None;
    for t in system {
        let c = &t.ineq.coeffs[var];
        if c.is_zero() {
            continue;
        }
        // c*x_var + rest (>|>=) 0, with x_var currently zero in `x`
        let rest = t.ineq.evaluate(x) - c * &x[var];
        let value = -rest / c;
        let strict = t.ineq.strict;
        if c.is_positive() {
            let replace = lower
                .as_ref()
                .is_none_or(|b| value > b.value || (value == b.value && strict));
            if replace {
                lower = Some(Bound { value, strict });
            }
        } else {
            let replace = upper
                .as_ref()
                .is_none_or(|b| value < b.value || (value == b.value && strict));
            if replace {
                upper = Some(Bound { value, strict });
            }
        }
    }
    let above = |v: &Rat, b: &Bound| {
        if b.strict {
            v > &b.value
        } else {
            v >= &b.value
        }
    };
    let below = |v: &Rat, b: &Bound| {
        if b.strict {
            v < &b.value
        } else {
            v <= &b.value
        }
    };
    match (lower, upper) {
        (None, None) => Some(Rat::zero()),
        (Some(l), None) => Some(Rat::from_integer(l.value.floor().to_integer() + 1)),
        (None, Some(u)) => Some(Rat::from_integer(u.value.ceil().to_integer() - 1)),
        (Some(l), Some(u)) => {
            if l.value == u.value {
                return (!l.strict && !u.strict).then(|| l.value.clone());
            }
            if l.value > u.value {
                return None;
            }
            let zero = Rat::zero();
            if above(&zero, &l) && below(&zero, &u) {
                return Some(zero);
            }
            let candidate = Rat::from_integer(l.value.floor().to_integer() + 1);
            if above(&candidate, &l) && below(&candidate, &u) {
                return Some(candidate);
            }
            Some((&l.value + &u.value) / rat(2, 1))
        }
    }
}
