//! Dense matrices over an exact ring: arithmetic, fraction-free determinants
//! and the plain-text dump format for operator matrices.

use crate::poly::{Poly, PolyRat};
use crate::ratfunc::RatFunc;
use crate::scalar::{Rat, Ring};
use num_traits::Zero;
use std::str::FromStr;
use thiserror::Error;

#[derive(Clone, PartialEq, Debug)]
pub struct Mat<T: Ring> {
    pub n: usize,
    pub m: usize,
    pub data: Vec<T>,
}

impl<T: Ring> Mat<T> {
    pub fn zeros(n: usize, m: usize) -> Self {
        Mat { n, m, data: vec![T::zero(); n * m] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Mat::zeros(n, n);
        for i in 0..n {
            *a.at_mut(i, i) = T::one();
        }
        a
    }

    pub fn from_fn(n: usize, m: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                data.push(f(i, j));
            }
        }
        Mat { n, m, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.m + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.m + j]
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.n, self.m), (o.n, o.m));
        Mat {
            n: self.n,
            m: self.m,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add_ref(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.n, self.m), (o.n, o.m));
        Mat {
            n: self.n,
            m: self.m,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub_ref(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Mat { n: self.n, m: self.m, data: self.data.iter().map(|a| a.neg_ref()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.m, o.n, "shape mismatch");
        let mut out = Mat::<T>::zeros(self.n, o.m);
        for i in 0..self.n {
            for k in 0..self.m {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.m {
                    let b = o.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a.mul_ref(b);
                    *out.at_mut(i, j) = out.at(i, j).add_ref(&t);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        Mat { n: self.n, m: self.m, data: self.data.iter().map(|a| a.mul_ref(c)).collect() }
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&T) -> S) -> Mat<S> {
        Mat { n: self.n, m: self.m, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.m, self.n, |i, j| self.at(j, i).clone())
    }

    /// Fraction-free Bareiss determinant; divisions are exact in the ring.
    pub fn det_bareiss(&self) -> T {
        assert_eq!(self.n, self.m, "determinant of a non-square matrix");
        let n = self.n;
        if n == 0 {
            return T::one();
        }
        let mut a = self.data.clone();
        let mut sign_flip = false;
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                // pivot search
                let mut found = None;
                for r in k + 1..n {
                    if !a[r * n + k].is_zero() {
                        found = Some(r);
                        break;
                    }
                }
                match found {
                    None => return T::zero(),
                    Some(r) => {
                        for c in 0..n {
                            a.swap(k * n + c, r * n + c);
                        }
                        sign_flip = !sign_flip;
                    }
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = a[i * n + j]
                        .mul_ref(&a[k * n + k])
                        .sub_ref(&a[i * n + k].mul_ref(&a[k * n + j]));
                    a[i * n + j] = t.exact_div(&prev);
                }
                a[i * n + k] = T::zero();
            }
            prev = a[k * n + k].clone();
        }
        let d = a[n * n - 1].clone();
        if sign_flip {
            d.neg_ref()
        } else {
            d
        }
    }

    /// Cofactor-expansion determinant, the independent cross-check route.
    pub fn det_cofactor(&self) -> T {
        assert_eq!(self.n, self.m);
        fn go<T: Ring>(a: &Mat<T>, rows: &[usize], cols: &[usize]) -> T {
            if rows.is_empty() {
                return T::one();
            }
            let mut acc = T::zero();
            let r = rows[0];
            for (k, &c) in cols.iter().enumerate() {
                let e = a.at(r, c);
                if e.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> =
                    cols.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, &c)| c).collect();
                let minor = go(a, &rows[1..], &sub_cols);
                let term = e.mul_ref(&minor);
                acc = if k % 2 == 0 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
            }
            acc
        }
        let idx: Vec<usize> = (0..self.n).collect();
        go(self, &idx, &idx)
    }

    /// Determinant via Bareiss (the default exact route).
    pub fn det(&self) -> T {
        self.det_bareiss()
    }

    /// Trace.
    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            acc = acc.add_ref(self.at(i, i));
        }
        acc
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Self) -> Self {
        Mat::from_fn(self.n * o.n, self.m * o.m, |i, j| {
            let (i1, i2) = (i / o.n, i % o.n);
            let (j1, j2) = (j / o.m, j % o.m);
            self.at(i1, j1).mul_ref(o.at(i2, j2))
        })
    }
}

/// Solve A x = b over the rationals by Gaussian elimination.
/// Returns None when the system is inconsistent or underdetermined columns
/// remain without a pivot (callers here always have full column rank).
pub fn solve_rational(a: &Mat<Rat>, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(a.n, b.len());
    let (n, m) = (a.n, a.m);
    let mut aug: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = (0..m).map(|j| a.at(i, j).clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut pivot_of_col = vec![usize::MAX; m];
    let mut r = 0;
    for c in 0..m {
        let mut piv = None;
        for i in r..n {
            if !Zero::is_zero(&aug[i][c]) {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        aug.swap(r, p);
        let inv = aug[r][c].clone();
        for j in c..=m {
            aug[r][j] = &aug[r][j] / &inv;
        }
        for i in 0..n {
            if i != r && !Zero::is_zero(&aug[i][c]) {
                let f = aug[i][c].clone();
                for j in c..=m {
                    let t = &aug[r][j] * &f;
                    aug[i][j] -= t;
                }
            }
        }
        pivot_of_col[c] = r;
        r += 1;
        if r == n {
            break;
        }
    }
    // consistency
    for i in r..n {
        if !Zero::is_zero(&aug[i][m]) {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); m];
    for c in 0..m {
        if pivot_of_col[c] != usize::MAX {
            x[c] = aug[pivot_of_col[c]][m].clone();
        } else {
            return None;
        }
    }
    Some(x)
}

/// Column space basis of a rational matrix: indices of pivot columns plus the
/// reduced columns themselves.
pub fn column_space_basis(a: &Mat<Rat>) -> Vec<Vec<Rat>> {
    let (n, m) = (a.n, a.m);
    let mut work: Vec<Vec<Rat>> = (0..n).map(|i| (0..m).map(|j| a.at(i, j).clone()).collect()).collect();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..m {
        let mut piv = None;
        for i in r..n {
            if !Zero::is_zero(&work[i][c]) {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        work.swap(r, p);
        let inv = work[r][c].clone();
        for j in c..m {
            work[r][j] = &work[r][j] / &inv;
        }
        for i in 0..n {
            if i != r && !Zero::is_zero(&work[i][c]) {
                let f = work[i][c].clone();
                for j in c..m {
                    let t = &work[r][j] * &f;
                    work[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == n {
            break;
        }
    }
    pivots
        .into_iter()
        .map(|c| (0..n).map(|i| a.at(i, c).clone()).collect())
        .collect()
}

/// Matrix of polynomials in the spectral variable u.
pub type MatPolyU = Mat<PolyRat>;
/// Matrix of polynomials in u whose coefficients carry one symbolic slot z.
pub type MatPolyURf = Mat<Poly<RatFunc>>;

/// Evaluate a polynomial matrix at u = u0 (Horner per entry).
pub fn matpoly_eval(m: &MatPolyU, u0: &Rat) -> Mat<Rat> {
    m.map(|p| p.eval(u0))
}

/// Substitute u -> u + shift in every entry.
pub fn matpoly_shift(m: &MatPolyU, shift: &Rat) -> MatPolyU {
    m.map(|p| p.shift_var(shift))
}

/// Maximal entry degree, -1 for the zero matrix.
pub fn matpoly_degree(m: &MatPolyU) -> i64 {
    m.data.iter().map(|p| p.degree()).max().unwrap_or(-1)
}

#[derive(Error, Debug)]
pub enum DumpError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Scalar kinds understood by the dump format.
pub trait DumpScalar: Ring {
    fn kind_name() -> &'static str;
    fn render(&self) -> String;
    fn parse(s: &str) -> Option<Self>;
}

impl DumpScalar for Rat {
    fn kind_name() -> &'static str {
        "rational"
    }
    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn parse(s: &str) -> Option<Self> {
        let (n, d) = s.split_once('/')?;
        let n = num_bigint::BigInt::from_str(n).ok()?;
        let d = num_bigint::BigInt::from_str(d).ok()?;
        if Zero::is_zero(&d) {
            return None;
        }
        Some(Rat::new(n, d))
    }
}

impl DumpScalar for RatFunc {
    fn kind_name() -> &'static str {
        "ratfunc-z"
    }
    fn render(&self) -> String {
        let side = |p: &PolyRat| {
            p.coeffs.iter().map(|c| format!("{},{}", c.numer(), c.denom())).collect::<Vec<_>>().join(";")
        };
        format!("{}|{}", side(&self.num), side(&self.den))
    }
    fn parse(s: &str) -> Option<Self> {
        let (n, d) = s.split_once('|')?;
        let side = |t: &str| -> Option<PolyRat> {
            if t.is_empty() {
                return Some(Poly::zero());
            }
            let mut coeffs = vec![];
            for pair in t.split(';') {
                let (a, b) = pair.split_once(',')?;
                let a = num_bigint::BigInt::from_str(a).ok()?;
                let b = num_bigint::BigInt::from_str(b).ok()?;
                coeffs.push(Rat::new(a, b));
            }
            Some(Poly::from_coeffs(coeffs))
        };
        let num = side(n)?;
        let den = side(d)?;
        if den.is_zero() {
            return None;
        }
        Some(RatFunc::new(num, den))
    }
}

/// Dump a square matrix of u-polynomials: header line then one entry per
/// line, row-major, coefficients low to high separated by spaces.
pub fn dump_matpoly<T: DumpScalar>(m: &Mat<Poly<T>>) -> String {
    assert_eq!(m.n, m.m);
    let deg = m.data.iter().map(|p| p.degree()).max().unwrap_or(-1);
    let mut out = String::new();
    out.push_str(&format!("tauspin-matrix v1 dim={} degree={} scalar={}\n", m.n, deg, T::kind_name()));
    for i in 0..m.n {
        for j in 0..m.m {
            let p = m.at(i, j);
            let mut fields = vec![];
            for k in 0..=deg.max(0) as usize {
                if (k as i64) <= p.degree() {
                    fields.push(p.coeff(k).render());
                } else {
                    fields.push(T::zero().render());
                }
            }
            if deg < 0 {
                fields.push(T::zero().render());
            }
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parse the dump format back; the round trip is bit-exact on canonical forms.
pub fn load_matpoly<T: DumpScalar>(text: &str) -> Result<Mat<Poly<T>>, DumpError> {
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines.next().ok_or(DumpError::Parse { line: 0, msg: "empty input".into() })?;
    let mut dim = None;
    let mut scalar_ok = false;
    for tok in header.split_whitespace() {
        if let Some(v) = tok.strip_prefix("dim=") {
            dim = v.parse::<usize>().ok();
        }
        if let Some(v) = tok.strip_prefix("scalar=") {
            scalar_ok = v == T::kind_name();
        }
    }
    let dim = dim.ok_or(DumpError::Parse { line: ln + 1, msg: "missing dim".into() })?;
    if !scalar_ok {
        return Err(DumpError::Parse { line: ln + 1, msg: "scalar kind mismatch".into() });
    }
    let mut data = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        let (ln, row) = lines
            .next()
            .ok_or(DumpError::Parse { line: 0, msg: "truncated entry list".into() })?;
        let mut coeffs = vec![];
        for f in row.split_whitespace() {
            let c = T::parse(f).ok_or(DumpError::Parse { line: ln + 1, msg: format!("bad coefficient {f:?}") })?;
            coeffs.push(c);
        }
        data.push(Poly::from_coeffs(coeffs));
    }
    Ok(Mat { n: dim, m: dim, data })
}
