//! Max-plus scalars, vectors and square matrices.
//!
//! Scalars are `f64` with `-inf` as the semiring zero and `0.0` as the unity.
//! All arithmetic goes through [`oplus`] and [`otimes`]; no `+inf` or NaN is
//! ever stored.

use std::fmt;

use crate::error::{Error, Result};

/// Semiring zero.
pub const ZERO: f64 = f64::NEG_INFINITY;
/// Semiring unity.
pub const UNIT: f64 = 0.0;

/// `a ⊕ b = max(a, b)`.
#[inline]
pub fn oplus(a: f64, b: f64) -> f64 {
    if a >= b {
        a
    } else {
        b
    }
}

/// `a ⊗ b = a + b`, with `-inf` absorbing.
#[inline]
pub fn otimes(a: f64, b: f64) -> f64 {
    if a == ZERO || b == ZERO {
        ZERO
    } else {
        a + b
    }
}

#[inline]
pub fn is_zero(a: f64) -> bool {
    a == ZERO
}

/// Absolute tolerance used when comparing derived quantities (cycle means,
/// critical-edge tests) of a matrix whose finite entries are bounded by `scale`.
pub(crate) fn tolerance(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

fn check_scalar(row: usize, col: usize, value: f64) -> Result<()> {
    if value.is_nan() || value == f64::INFINITY {
        return Err(Error::InvalidEntry { row, col, value });
    }
    Ok(())
}

#[derive(Clone, PartialEq)]
pub struct TropicalVector {
    entries: Vec<f64>,
}

impl TropicalVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        for (i, &v) in entries.iter().enumerate() {
            check_scalar(i, 0, v)?;
        }
        Ok(Self { entries })
    }

    /// All-zero (`-inf`) vector.
    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![ZERO; n],
        }
    }

    /// Unit vector `e_i`: unity at `i`, zero elsewhere.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[i] = UNIT;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| !is_zero(self.entries[i]))
            .collect()
    }

    pub fn is_zero_vector(&self) -> bool {
        self.entries.iter().all(|&v| is_zero(v))
    }

    pub fn oplus(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| oplus(a, b))
                .collect(),
        })
    }

    /// Same `-inf` pattern and finite entries within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(&a, &b)| scalar_approx_eq(a, b, tol))
    }
}

impl fmt::Debug for TropicalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.entries.iter().map(|&v| DisplayScalar(v)))
            .finish()
    }
}

pub(crate) fn scalar_approx_eq(a: f64, b: f64, tol: f64) -> bool {
    match (is_zero(a), is_zero(b)) {
        (true, true) => true,
        (false, false) => (a - b).abs() <= tol,
        _ => false,
    }
}

struct DisplayScalar(f64);

impl fmt::Debug for DisplayScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_zero(self.0) {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Square max-plus matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct TropicalMatrix {
    n: usize,
    data: Vec<f64>,
}

impl TropicalMatrix {
    /// The all-`-inf` matrix.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, UNIT);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                check_scalar(i, j, v)?;
            }
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    /// Build from a closure over `(i, j)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = f(i, j);
                debug_assert!(!v.is_nan() && v != f64::INFINITY);
                data.push(v);
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// Largest absolute value of a finite entry, 0 if there is none.
    pub fn max_abs_finite(&self) -> f64 {
        self.data
            .iter()
            .filter(|v| !is_zero(**v))
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// `self ⊗ other`.
    pub fn otimes(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.otimes_unchecked(other))
    }

    pub(crate) fn otimes_unchecked(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let aik = self.data[i * n + k];
                if is_zero(aik) {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                    // -inf + finite stays -inf, so no guard is needed here.
                    let v = aik + bkj;
                    if v > *o {
                        *o = v;
                    }
                }
            }
        }
        Self { n, data: out }
    }

    /// `self ⊕ other`, entrywise maximum.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| oplus(a, b))
                .collect(),
        })
    }

    /// `λ ⊗ self`: adds `λ` to every finite entry.
    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&a| otimes(lambda, a)).collect(),
        }
    }

    /// `self^t` by repeated squaring; `self^0 = I`.
    pub fn pow(&self, mut t: u64) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut first = true;
        while t > 0 {
            if t & 1 == 1 {
                result = if first {
                    base.clone()
                } else {
                    result.otimes_unchecked(&base)
                };
                first = false;
            }
            t >>= 1;
            if t > 0 {
                base = base.otimes_unchecked(&base);
            }
        }
        result
    }

    /// `self ⊗ x`.
    pub fn apply(&self, x: &TropicalVector) -> Result<TropicalVector> {
        if x.dim() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: x.dim(),
            });
        }
        let entries = self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(x.entries())
                    .fold(ZERO, |acc, (&a, &b)| oplus(acc, otimes(a, b)))
            })
            .collect();
        Ok(TropicalVector { entries })
    }

    /// True iff the `-inf` patterns coincide and finite entries differ by at
    /// most `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> Result<bool> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .all(|(&a, &b)| scalar_approx_eq(a, b, tol)))
    }

    /// Entrywise `self <= other + tol`, treating `-inf` as the bottom element.
    pub fn approx_le(&self, other: &Self, tol: f64) -> Result<bool> {
        self.check_same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .all(|(&a, &b)| is_zero(a) || (!is_zero(b) && a <= b + tol)))
    }

    /// Keep entries with both indices in `keep`, set the rest to `-inf`.
    pub fn restrict(&self, keep: &[bool]) -> Self {
        Self::from_fn(self.n, |i, j| {
            if keep[i] && keep[j] {
                self.get(i, j)
            } else {
                ZERO
            }
        })
    }

    pub fn has_finite_entry(&self) -> bool {
        self.data.iter().any(|v| !is_zero(*v))
    }

    /// Finite-entry pattern.
    pub fn support(&self) -> Vec<Vec<bool>> {
        self.rows()
            .map(|row| row.iter().map(|v| !is_zero(*v)).collect())
            .collect()
    }
}

impl fmt::Debug for TropicalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TropicalMatrix({}x{}) [", self.n, self.n)?;
        for row in self.rows() {
            write!(f, "  ")?;
            for v in row {
                if is_zero(*v) {
                    write!(f, "{:>8}", "-inf")?;
                } else {
                    write!(f, "{:>8}", format!("{}", v))?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
