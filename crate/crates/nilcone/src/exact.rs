//! Exact linear algebra over ℚ and ℚ(i).
//!
//! Matrices act on column vectors. Subspaces are stored by a reduced
//! row-echelon basis so that equality of subspaces is equality of values.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("matrix is singular")]
    Singular,
    #[error("cannot parse number {0:?}")]
    Parse(String),
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rat(s: &str) -> Result<Rat, ExactError> {
    let t = s.trim();
    let bad = || ExactError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => Ok(Rat::from_integer(BigInt::from_str(t).map_err(|_| bad())?)),
    }
}

/// Element of ℚ(i) stored as a pair of rationals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gauss {
    pub re: Rat,
    pub im: Rat,
}

impl Gauss {
    pub fn new(re: Rat, im: Rat) -> Self {
        Gauss { re, im }
    }

    pub fn i() -> Self {
        Gauss::new(Rat::zero(), Rat::one())
    }

    pub fn real(re: Rat) -> Self {
        Gauss::new(re, Rat::zero())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `i^k` for any integer k.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Gauss::one(),
            1 => Gauss::i(),
            2 => -Gauss::one(),
            _ => -Gauss::i(),
        }
    }

    pub fn norm(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl FromStr for Gauss {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || ExactError::Parse(s.to_string());
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Gauss::real(parse_rat(&t)?));
        };
        let split = body.char_indices().filter(|&(k, c)| k > 0 && (c == '+' || c == '-')).map(|(k, _)| k).next_back();
        let (re, im) = match split {
            Some(k) => (parse_rat(&body[..k])?, &body[k..]),
            None => (Rat::zero(), body),
        };
        let im = match im {
            "" | "+" => Rat::one(),
            "-" => -Rat::one(),
            other => parse_rat(other.strip_prefix('+').unwrap_or(other)).map_err(|_| bad())?,
        };
        Ok(Gauss::new(re, im))
    }
}

impl Add for Gauss {
    type Output = Gauss;
    fn add(self, o: Gauss) -> Gauss {
        Gauss::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Gauss {
    type Output = Gauss;
    fn sub(self, o: Gauss) -> Gauss {
        Gauss::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Gauss {
    type Output = Gauss;
    fn mul(self, o: Gauss) -> Gauss {
        Gauss::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Div for Gauss {
    type Output = Gauss;
    fn div(self, o: Gauss) -> Gauss {
        let n = o.norm();
        let num = self * o.conj();
        Gauss::new(num.re / &n, num.im / n)
    }
}

impl Neg for Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss::new(-self.re, -self.im)
    }
}

impl Zero for Gauss {
    fn zero() -> Self {
        Gauss::real(Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Gauss {
    fn one() -> Self {
        Gauss::real(Rat::one())
    }
}

/// Scalars the linear algebra runs over: ℚ and ℚ(i).
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;
    fn from_rat(r: &Rat) -> Self;

    fn mul_ref(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }

    /// `self += a·b` without cloning the operands.
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self = std::mem::replace(self, Self::zero()) + a.mul_ref(b);
    }

    /// `self -= a·b` without cloning the operands.
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self = std::mem::replace(self, Self::zero()) - a.mul_ref(b);
    }
}

impl Field for Rat {
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

impl Field for Gauss {
    fn conj(&self) -> Self {
        Gauss::new(self.re.clone(), -self.im.clone())
    }
    fn from_rat(r: &Rat) -> Self {
        Gauss::real(r.clone())
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Gauss::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
    fn add_mul(&mut self, a: &Self, b: &Self) {
        if a.im.is_zero() && b.im.is_zero() {
            self.re += &a.re * &b.re;
            return;
        }
        let p = a.mul_ref(b);
        self.re += p.re;
        self.im += p.im;
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        if a.im.is_zero() && b.im.is_zero() {
            self.re -= &a.re * &b.re;
            return;
        }
        let p = a.mul_ref(b);
        self.re -= p.re;
        self.im -= p.im;
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |mut acc, (x, y)| {
        acc.add_mul(x, y);
        acc
    })
}

pub fn scale_vec<F: Field>(c: &F, v: &[F]) -> Vec<F> {
    v.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn add_vec<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub_vec<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn conj_vec<F: Field>(v: &[F]) -> Vec<F> {
    v.iter().map(F::conj).collect()
}

pub fn lift_vec(v: &[Rat]) -> Vec<Gauss> {
    v.iter().map(Gauss::from_rat).collect()
}

pub fn unit_vec<F: Field>(n: usize, k: usize) -> Vec<F> {
    (0..n).map(|j| if j == k { F::one() } else { F::zero() }).collect()
}

/// Scale a rational vector to the primitive integer vector on the same ray.
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn int_to_rat(v: &[BigInt]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

pub type RationalMatrix = Matrix<Rat>;
pub type GaussianMatrix = Matrix<Gauss>;

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(ExactError::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<F>], n: usize) -> Result<Self, ExactError> {
        let mut m = Self::zeros(n, cols.len());
        for (j, v) in cols.iter().enumerate() {
            if v.len() != n {
                return Err(ExactError::DimensionMismatch { expected: n, found: v.len() });
            }
            for (i, x) in v.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
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

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn conj(&self) -> Self {
        self.map(F::conj)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product dimension mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        m.data[i * o.cols + j].add_mul(a, b);
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|x| c.clone() * x.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Bilinear pairing `xᵀ · self · y`.
    pub fn pair(&self, x: &[F], y: &[F]) -> F {
        dot(x, &self.apply(y))
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let cols = m.cols;
            let inv = F::one() / m.get(r, c).clone();
            for j in c..cols {
                if !m.data[r * cols + j].is_zero() {
                    m.data[r * cols + j] = m.data[r * cols + j].mul_ref(&inv);
                }
            }
            let pivot_row: Vec<F> = m.data[r * cols..(r + 1) * cols].to_vec();
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..cols {
                    if !pivot_row[j].is_zero() {
                        m.data[i * cols + j].sub_mul(&f, &pivot_row[j]);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
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

    /// Basis of the right kernel `{x : self · x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, F::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> F {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return F::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = det * piv.clone();
            for i in c + 1..n {
                let f = m.get(i, c).clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).clone() - f.clone() * m.get(c, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Sub-matrix on the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Smallest `m ≤ n` with `self^m = 0`, if any.
    pub fn nilpotency_order(&self) -> Option<usize> {
        let n = self.rows;
        let mut p = Self::identity(n);
        for m in 0..=n {
            if p.is_zero() {
                return Some(m);
            }
            p = p.mul(self);
        }
        None
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.nilpotency_order().is_some()
    }
}

impl RationalMatrix {
    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
            .expect("ragged integer matrix")
    }

    pub fn to_gauss(&self) -> GaussianMatrix {
        self.map(Gauss::from_rat)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Least common denominator of all entries.
    pub fn denominator(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

impl GaussianMatrix {
    pub fn is_real(&self) -> bool {
        self.data.iter().all(Gauss::is_real)
    }

    pub fn real_part(&self) -> RationalMatrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.re.clone()).collect() }
    }
}

/// Exponential of a nilpotent matrix by its finite series.
pub fn exp_nilpotent<F: Field>(n: &Matrix<F>) -> Result<Matrix<F>, ExactError> {
    if !n.is_square() {
        return Err(ExactError::NotNilpotent);
    }
    let order = n.nilpotency_order().ok_or(ExactError::NotNilpotent)?;
    let mut acc = Matrix::identity(n.rows);
    let mut term = Matrix::identity(n.rows);
    for k in 1..order {
        term = term.mul(n).scale(&(F::one() / F::from_rat(&rat(k as i64))));
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Logarithm of a unipotent matrix by its finite series.
pub fn log_unipotent<F: Field>(t: &Matrix<F>) -> Result<Matrix<F>, ExactError> {
    if !t.is_square() {
        return Err(ExactError::NotUnipotent);
    }
    let u = t.sub(&Matrix::identity(t.rows));
    let order = u.nilpotency_order().ok_or(ExactError::NotUnipotent)?;
    let mut acc = Matrix::zeros(t.rows, t.rows);
    let mut pow = Matrix::identity(t.rows);
    for k in 1..order {
        pow = pow.mul(&u);
        let c = F::from_rat(&frac(if k % 2 == 1 { 1 } else { -1 }, k as i64));
        acc = acc.add(&pow.scale(&c));
    }
    Ok(acc)
}

/// Coefficients `c` with `Σ c_j basis_j = v` for linearly independent `basis`, if any.
pub fn solve_in<F: Field>(basis: &[Vec<F>], v: &[F]) -> Option<Vec<F>> {
    let k = basis.len();
    if v.is_empty() {
        return (k == 0).then(Vec::new);
    }
    let rows: Vec<Vec<F>> = (0..v.len())
        .map(|i| basis.iter().map(|b| b[i].clone()).chain(std::iter::once(v[i].clone())).collect())
        .collect();
    let (r, pivots) = Matrix::from_rows(rows).ok()?.rref();
    if pivots.len() != k || pivots.contains(&k) {
        return None;
    }
    Some((0..k).map(|i| r.get(i, k).clone()).collect())
}

/// A linear subspace stored by its reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Matrix<F>,
}

impl<F: Field> fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl<F: Field> Subspace<F> {
    pub fn span(vectors: &[Vec<F>], ambient: usize) -> Result<Self, ExactError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(ExactError::DimensionMismatch { expected: ambient, found: v.len() });
            }
        }
        Ok(Self::span_unchecked(vectors, ambient))
    }

    fn span_unchecked(vectors: &[Vec<F>], ambient: usize) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = Matrix::from_rows(vectors.to_vec()).expect("vector lengths checked");
        let (r, pivots) = m.rref();
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect::<Vec<_>>();
        let basis = if rows.is_empty() { Matrix::zeros(0, ambient) } else { Matrix::from_rows(rows).unwrap() };
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(ambient) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> Vec<Vec<F>> {
        self.basis.row_vecs()
    }

    pub fn basis_matrix(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn contains(&self, v: &[F]) -> bool {
        let mut vs = self.basis();
        vs.push(v.to_vec());
        Self::span_unchecked(&vs, self.ambient).dim() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        self.sum(other).dim() == self.dim()
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut vs = self.basis();
        vs.extend(other.basis());
        Self::span_unchecked(&vs, self.ambient)
    }

    /// `{x : b · x = 0 for every basis vector b}` (no conjugation).
    pub fn annihilator(&self) -> Self {
        if self.dim() == 0 {
            return Self::full(self.ambient);
        }
        Self::span_unchecked(&self.basis.nullspace(), self.ambient)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        if self.is_full() {
            return other.clone();
        }
        if other.is_full() {
            return self.clone();
        }
        // x·A = y·B, read off the kernel of [Aᵀ | -Bᵀ]
        let (da, db) = (self.dim(), other.dim());
        let mut m = Matrix::zeros(self.ambient, da + db);
        for i in 0..da {
            for j in 0..self.ambient {
                m.set(j, i, self.basis.get(i, j).clone());
            }
        }
        for i in 0..db {
            for j in 0..self.ambient {
                m.set(j, da + i, -other.basis.get(i, j).clone());
            }
        }
        let vs: Vec<Vec<F>> = m
            .nullspace()
            .iter()
            .map(|k| {
                let mut v = vec![F::zero(); self.ambient];
                for (i, c) in k[..da].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (j, x) in v.iter_mut().enumerate() {
                        x.add_mul(c, self.basis.get(i, j));
                    }
                }
                v
            })
            .collect();
        Self::span_unchecked(&vs, self.ambient)
    }

    /// Image under a square matrix acting on column vectors.
    pub fn image(&self, m: &Matrix<F>) -> Self {
        let vs: Vec<Vec<F>> = self.basis().iter().map(|v| m.apply(v)).collect();
        Self::span_unchecked(&vs, m.rows())
    }

    /// `{x : m · x ∈ self}`.
    pub fn preimage(&self, m: &Matrix<F>) -> Self {
        let ann = self.annihilator();
        if ann.dim() == 0 {
            return Self::full(m.cols());
        }
        let a = ann.basis.mul(m);
        Self::span_unchecked(&a.nullspace(), m.cols())
    }

    /// `{x : Q(b, x) = 0 for every basis vector b}`.
    pub fn orthogonal(&self, q: &Matrix<F>) -> Self {
        if self.dim() == 0 {
            return Self::full(self.ambient);
        }
        let a = self.basis.mul(q);
        Self::span_unchecked(&a.nullspace(), self.ambient)
    }

    pub fn conj(&self) -> Self {
        Self::span_unchecked(&self.basis.conj().row_vecs(), self.ambient)
    }

    /// Extend a basis of `self` to one of `big` using the canonical basis vectors of `big`;
    /// returns the added vectors.
    pub fn complement_in(&self, big: &Self) -> Vec<Vec<F>> {
        let mut cur = self.clone();
        let mut added = Vec::new();
        for v in big.basis() {
            if cur.dim() == big.dim() {
                break;
            }
            if !cur.contains(&v) {
                cur = cur.sum(&Self::span_unchecked(std::slice::from_ref(&v), self.ambient));
                added.push(v);
            }
        }
        added
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        let b = &self.basis;
        if b.rows() == 0 {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        let (_, pivots) = b.rref();
        let c: Vec<F> = pivots.iter().map(|&p| v[p].clone()).collect();
        let back = (0..b.cols())
            .map(|j| (0..b.rows()).fold(F::zero(), |acc, i| acc + c[i].clone() * b.get(i, j).clone()))
            .collect::<Vec<_>>();
        (back == v).then_some(c)
    }
}

impl Subspace<Rat> {
    pub fn to_gauss(&self) -> Subspace<Gauss> {
        Subspace { ambient: self.ambient, basis: self.basis.to_gauss() }
    }
}

impl Subspace<Gauss> {
    /// True when the subspace is stable under conjugation.
    pub fn is_real(&self) -> bool {
        self.basis.is_real()
    }
}

/// Canonical span of a list of vectors.
pub fn canonical_subspace<F: Field>(vectors: &[Vec<F>], ambient: usize) -> Result<Subspace<F>, ExactError> {
    Subspace::span(vectors, ambient)
}

fn rat_str(x: &Rat) -> String {
    x.to_string()
}

impl Serialize for Matrix<Rat> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows).map(|i| self.row(i).iter().map(rat_str).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix<Rat> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Matrix::from_rows(parsed).map_err(D::Error::custom)
    }
}

impl Serialize for Matrix<Gauss> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix<Gauss> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|x| x.parse::<Gauss>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Matrix::from_rows(parsed).map_err(D::Error::custom)
    }
}

/// Serde helpers for vectors of exact numbers written as strings.
pub mod serde_vec {
    use super::*;

    pub fn rat_to_strings(v: &[Rat]) -> Vec<String> {
        v.iter().map(rat_str).collect()
    }

    pub fn gauss_to_strings(v: &[Gauss]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    pub fn rats_from_strings(v: &[String]) -> Result<Vec<Rat>, ExactError> {
        v.iter().map(|x| parse_rat(x)).collect()
    }

    pub fn gauss_from_strings(v: &[String]) -> Result<Vec<Gauss>, ExactError> {
        v.iter().map(|x| x.parse()).collect()
    }
}
