//! Partitions, Frobenius coordinates, complete homogeneous and Schur
//! polynomials in the hierarchy times, Miwa maps and GL(N) characters.

use crate::matrix::Mat;
use crate::scalar::{rat_i, rat_pow, Rat};
use itertools::Itertools;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, PartialEq)]
pub enum SymFuncError {
    #[error("eigenvalues must be pairwise distinct and nonzero")]
    RepeatedEigenvalue,
    #[error("Miwa spec contains a symbolic point")]
    SymbolicPoint,
    #[error("invalid partition string {0:?}")]
    BadPartition(String),
}

/// A Young diagram: weakly decreasing positive parts, empty list for the
/// empty diagram. Trailing zeros are stripped on construction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: &[u32]) -> Self {
        let mut v: Vec<u32> = parts.iter().copied().filter(|&p| p > 0).collect();
        assert!(v.windows(2).all(|w| w[0] >= w[1]), "parts must be weakly decreasing");
        v.shrink_to_fit();
        Partition { parts: v }
    }

    pub fn empty() -> Self {
        Partition { parts: vec![] }
    }

    /// Hook diagram (a|b) in Frobenius coordinates: (a+1, 1^b).
    pub fn hook(arm: u32, leg: u32) -> Self {
        let mut parts = vec![arm + 1];
        parts.extend(std::iter::repeat(1).take(leg as usize));
        Partition { parts }
    }

    pub fn one_row(s: u32) -> Self {
        if s == 0 {
            Partition::empty()
        } else {
            Partition { parts: vec![s] }
        }
    }

    pub fn one_column(a: u32) -> Self {
        Partition { parts: vec![1; a as usize] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn transpose(&self) -> Partition {
        if self.is_empty() {
            return Partition::empty();
        }
        let w = self.parts[0] as usize;
        let mut t = vec![0u32; w];
        for &p in &self.parts {
            for c in t.iter_mut().take(p as usize) {
                *c += 1;
            }
        }
        Partition { parts: t }
    }

    /// Serialize as comma separated parts, the empty diagram as "0".
    pub fn to_compact_string(&self) -> String {
        if self.is_empty() {
            "0".to_string()
        } else {
            self.parts.iter().map(|p| p.to_string()).join(",")
        }
    }

    pub fn from_compact_string(s: &str) -> Result<Self, SymFuncError> {
        let s = s.trim();
        if s == "0" {
            return Ok(Partition::empty());
        }
        let mut parts = vec![];
        for tok in s.split(',') {
            let p: u32 = tok.trim().parse().map_err(|_| SymFuncError::BadPartition(s.into()))?;
            if p == 0 {
                return Err(SymFuncError::BadPartition(s.into()));
            }
            parts.push(p);
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(SymFuncError::BadPartition(s.into()));
        }
        Ok(Partition { parts })
    }

    /// Frobenius data: arm lengths, leg lengths and the diagonal size.
    pub fn frobenius(&self) -> (Vec<i64>, Vec<i64>, usize) {
        let t = self.transpose();
        let d = (0..self.parts.len()).take_while(|&i| self.parts[i] as usize >= i + 1).count();
        let alphas = (0..d).map(|i| self.parts[i] as i64 - i as i64 - 1).collect();
        let betas = (0..d).map(|i| t.parts[i] as i64 - i as i64 - 1).collect();
        (alphas, betas, d)
    }

    /// Sign exponent sum(beta_i + 1) attached to the diagram basis states.
    pub fn b_sign_exponent(&self) -> i64 {
        let (_, betas, d) = self.frobenius();
        betas.iter().sum::<i64>() + d as i64
    }

    /// Number of boxes in the main diagonal.
    pub fn diagonal(&self) -> usize {
        self.frobenius().2
    }

    /// Rebuild a diagram from strictly decreasing nonnegative Frobenius
    /// coordinates (alpha_i | beta_i).
    pub fn from_frobenius(alphas: &[i64], betas: &[i64]) -> Partition {
        assert_eq!(alphas.len(), betas.len());
        let d = alphas.len();
        assert!(alphas.windows(2).all(|w| w[0] > w[1]));
        assert!(betas.windows(2).all(|w| w[0] > w[1]));
        if d == 0 {
            return Partition::empty();
        }
        // row lengths: lambda_i = alpha_i + i for i <= d; below the diagonal
        // the transpose columns determine the rest.
        let rows = (betas[0] + 1) as usize;
        let mut parts = vec![0u32; rows.max(d)];
        for i in 0..d {
            parts[i] = (alphas[i] + i as i64 + 1) as u32;
        }
        // column lengths beta_j + j + 1 give the transpose; fill rows below d.
        let mut tparts = vec![0u32; alphas[0] as usize + 1];
        for (j, &b) in betas.iter().enumerate() {
            tparts[j] = (b + j as i64 + 1) as u32;
        }
        for i in d..rows.max(d) {
            parts[i] = tparts.iter().take_while(|&&c| c as usize >= i + 1).count() as u32;
        }
        let p = Partition::new(&parts);
        debug_assert_eq!(p.frobenius(), (alphas.to_vec(), betas.to_vec(), d));
        p
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_compact_string())
    }
}

/// Enumerate all partitions of total size <= max_size, optionally bounding
/// the number of rows and the first part.
pub fn partitions_up_to(max_size: u32, max_len: usize, max_part: u32) -> Vec<Partition> {
    let mut out = vec![Partition::empty()];
    fn go(out: &mut Vec<Partition>, prefix: &mut Vec<u32>, remaining: u32, max_len: usize, cap: u32) {
        if prefix.len() >= max_len {
            return;
        }
        let hi = cap.min(remaining);
        for p in 1..=hi {
            prefix.push(p);
            out.push(Partition::new(prefix));
            go(out, prefix, remaining - p, max_len, p);
            prefix.pop();
        }
    }
    let mut prefix = vec![];
    go(&mut out, &mut prefix, max_size, max_len, max_part.min(max_size));
    out.sort();
    out.dedup();
    out
}

/// The times t_1, t_2, ... with finite support, exact rational values.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct TimesVector {
    /// index k >= 1 mapped to t_k; absent means zero.
    entries: BTreeMap<u32, Rat>,
}

impl TimesVector {
    pub fn zero() -> Self {
        TimesVector::default()
    }

    pub fn from_pairs(pairs: &[(u32, Rat)]) -> Self {
        let mut t = TimesVector::zero();
        for (k, v) in pairs {
            assert!(*k >= 1);
            t.set(*k, v.clone());
        }
        t
    }

    pub fn get(&self, k: u32) -> Rat {
        self.entries.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set(&mut self, k: u32, v: Rat) {
        if Zero::is_zero(&v) {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, v);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut t = self.clone();
        for (k, v) in &o.entries {
            t.set(*k, t.get(*k) + v);
        }
        t
    }

    pub fn negated(&self) -> Self {
        TimesVector { entries: self.entries.iter().map(|(k, v)| (*k, -v)).collect() }
    }

    pub fn support(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn max_index(&self) -> u32 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }
}

/// Times in Miwa form: a finite-support background plus signed evaluation
/// points, each contributing sign * value^(-k) * mult / k to t_k.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct MiwaSpec {
    pub background: TimesVector,
    pub points: Vec<MiwaPoint>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct MiwaPoint {
    pub value: Rat,
    pub sign: i8,
    pub mult: u32,
}

impl MiwaSpec {
    pub fn empty() -> Self {
        MiwaSpec::default()
    }

    pub fn from_points(points: &[(Rat, i8, u32)]) -> Self {
        MiwaSpec {
            background: TimesVector::zero(),
            points: points
                .iter()
                .map(|(value, sign, mult)| {
                    assert!(*sign == 1 || *sign == -1);
                    assert!(!Zero::is_zero(value));
                    MiwaPoint { value: value.clone(), sign: *sign, mult: *mult }
                })
                .collect(),
        }
    }

    pub fn with_point(&self, value: Rat, sign: i8, mult: u32) -> Self {
        let mut m = self.clone();
        m.points.push(MiwaPoint { value, sign, mult });
        m
    }

    /// Explicit t_k up to index kmax.
    pub fn to_times(&self, kmax: u32) -> TimesVector {
        let mut t = TimesVector::zero();
        for k in 1..=kmax {
            let mut v = self.background.get(k);
            for p in &self.points {
                let term = rat_pow(&p.value, -(k as i64)) * rat_i(p.mult as i64)
                    / rat_i(k as i64);
                if p.sign > 0 {
                    v += term;
                } else {
                    v -= term;
                }
            }
            t.set(k, v);
        }
        t
    }

    /// Exact e^{xi(t, x)} when the background vanishes: the finite product
    /// prod (1 - x/value)^(-sign*mult). The background contributes
    /// exp of a polynomial which is not rational, hence the restriction.
    pub fn exp_xi(&self, x: &Rat) -> Result<Rat, SymFuncError> {
        if self.background != TimesVector::zero() {
            return Err(SymFuncError::SymbolicPoint);
        }
        let mut acc = Rat::one();
        for p in &self.points {
            let base = Rat::one() - x / &p.value;
            assert!(!Zero::is_zero(&base), "Miwa point collides with evaluation point");
            acc *= rat_pow(&base, -(p.sign as i64) * p.mult as i64);
        }
        Ok(acc)
    }

    /// xi'(t,x), xi''(t,x), ... up to order r for a pure-point spec:
    /// derivative in x of sum_s -sign*mult*ln(1 - x/value).
    pub fn xi_derivatives(&self, x: &Rat, r: u32) -> Result<Vec<Rat>, SymFuncError> {
        let mut out = vec![];
        for order in 1..=r {
            let mut v = Rat::zero();
            for (k, tk) in self.background.support() {
                // d^order/dx^order of t_k x^k
                if k >= order {
                    v += tk * crate::scalar::falling(&rat_i(k as i64), order) * rat_pow(x, (k - order) as i64);
                }
            }
            for p in &self.points {
                // d^order/dx^order of -s*m*ln(1-x/v) = s*m*(order-1)!/(v-x)^order
                let f = crate::scalar::factorial(order - 1) * rat_i(p.sign as i64 * p.mult as i64);
                v += f * rat_pow(&(&p.value - x), -(order as i64));
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// Complete homogeneous polynomial h_k(t): the z^k coefficient of
/// exp(sum t_j z^j). Zero for k < 0.
pub fn complete_h(k: i64, t: &TimesVector) -> Rat {
    if k < 0 {
        return Rat::zero();
    }
    let kk = k as usize;
    // k h_k = sum_{j=1..k} j t_j h_{k-j}
    let mut h = vec![Rat::zero(); kk + 1];
    h[0] = Rat::one();
    for m in 1..=kk {
        let mut acc = Rat::zero();
        for (j, tj) in t.support() {
            let j = j as usize;
            if j > m {
                break;
            }
            acc += rat_i(j as i64) * tj * &h[m - j];
        }
        h[m] = acc / rat_i(m as i64);
    }
    h[kk].clone()
}

/// Schur polynomial s_lambda(t) via the determinant of h's.
pub fn schur_poly(lambda: &Partition, t: &TimesVector) -> Rat {
    let l = lambda.len();
    if l == 0 {
        return Rat::one();
    }
    let m = Mat::from_fn(l, l, |i, j| {
        complete_h(lambda.part(i) as i64 - i as i64 + j as i64, t)
    });
    m.det()
}

/// Power sums of the given values packed as times: t_k = sum_i p_i^k / k.
pub fn power_sum_times(p: &[Rat], kmax: u32) -> TimesVector {
    let mut t = TimesVector::zero();
    for k in 1..=kmax {
        let mut v = Rat::zero();
        for x in p {
            v += rat_pow(x, k as i64);
        }
        t.set(k, v / rat_i(k as i64));
    }
    t
}

/// GL(N) character of the diagonal element with the given eigenvalues,
/// by the ratio of alternants. Returns 0 when the diagram has more rows
/// than N.
pub fn char_eval(lambda: &Partition, p: &[Rat]) -> Result<Rat, SymFuncError> {
    let n = p.len();
    for i in 0..n {
        if Zero::is_zero(&p[i]) {
            return Err(SymFuncError::RepeatedEigenvalue);
        }
        for j in i + 1..n {
            if p[i] == p[j] {
                return Err(SymFuncError::RepeatedEigenvalue);
            }
        }
    }
    if lambda.len() > n {
        return Ok(Rat::zero());
    }
    // exponent lambda_i - i + N with 1-based i
    let numer = Mat::from_fn(n, n, |i, j| {
        rat_pow(&p[j], lambda.part(i) as i64 - (i as i64 + 1) + n as i64)
    });
    let mut den = Rat::one();
    for l in 0..n {
        for k in l + 1..n {
            den *= &p[l] - &p[k];
        }
    }
    Ok(numer.det() / den)
}

/// Weyl dimension of the GL(N) irreducible labeled by lambda.
pub fn weyl_dim(lambda: &Partition, n: u32) -> u64 {
    if lambda.len() > n as usize {
        return 0;
    }
    let t = lambda.transpose();
    let mut num = Rat::one();
    let mut den = Rat::one();
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row as usize {
            let arm = row as i64 - 1 - j as i64;
            let leg = t.part(j) as i64 - 1 - i as i64;
            num *= rat_i(n as i64 + j as i64 - i as i64);
            den *= rat_i(arm + leg + 1);
        }
    }
    let d = num / den;
    assert!(d.is_integer());
    d.to_integer().try_into().unwrap()
}

/// Miwa to explicit times; errors if a symbolic slot were present (the
/// numeric-only MiwaSpec cannot carry one, so this is total here).
pub fn miwa_to_times(m: &MiwaSpec, kmax: u32) -> TimesVector {
    m.to_times(kmax)
}

/// s_lambda as a polynomial in the power-sum symbols: a map from the
/// multiset of power-sum indices (as a sorted partition of |lambda|) to the
/// rational coefficient of prod_k tr g^{mu_k}.
pub fn schur_in_power_sums(lambda: &Partition) -> BTreeMap<Partition, Rat> {
    // h_m = sum_{mu |- m} p_mu / z_mu with z_mu = prod k^{m_k} m_k!
    fn h_in_p(m: i64) -> BTreeMap<Partition, Rat> {
        let mut out = BTreeMap::new();
        if m < 0 {
            return out;
        }
        if m == 0 {
            out.insert(Partition::empty(), Rat::one());
            return out;
        }
        for mu in partitions_up_to(m as u32, m as usize, m as u32) {
            if mu.size() != m as u32 {
                continue;
            }
            let mut z = Rat::one();
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for &part in mu.parts() {
                *counts.entry(part).or_insert(0) += 1;
            }
            for (k, c) in counts {
                z *= rat_pow(&rat_i(k as i64), c as i64) * crate::scalar::factorial(c);
            }
            out.insert(mu, Rat::one() / z);
        }
        out
    }
    fn mul_maps(a: &BTreeMap<Partition, Rat>, b: &BTreeMap<Partition, Rat>) -> BTreeMap<Partition, Rat> {
        let mut out: BTreeMap<Partition, Rat> = BTreeMap::new();
        for (pa, ca) in a {
            for (pb, cb) in b {
                let mut parts: Vec<u32> = pa.parts().iter().chain(pb.parts()).copied().collect();
                parts.sort_unstable_by(|x, y| y.cmp(x));
                let key = Partition::new(&parts);
                let e = out.entry(key).or_insert_with(Rat::zero);
                *e += ca * cb;
            }
        }
        out.retain(|_, v| !Zero::is_zero(v));
        out
    }
    // Jacobi-Trudi determinant expanded by permutations (small sizes only).
    let l = lambda.len();
    if l == 0 {
        let mut out = BTreeMap::new();
        out.insert(Partition::empty(), Rat::one());
        return out;
    }
    let mut acc: BTreeMap<Partition, Rat> = BTreeMap::new();
    for perm in (0..l).permutations(l) {
        let mut sign = Rat::one();
        // inversion parity
        let mut inv = 0;
        for i in 0..l {
            for j in i + 1..l {
                if perm[i] > perm[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 1 {
            sign = -sign;
        }
        let mut term: BTreeMap<Partition, Rat> = BTreeMap::new();
        term.insert(Partition::empty(), sign);
        let mut dead = false;
        for (i, &j) in perm.iter().enumerate() {
            let deg = lambda.part(i) as i64 - (i as i64 + 1) + (j as i64 + 1);
            let h = h_in_p(deg);
            if h.is_empty() {
                dead = true;
                break;
            }
            term = mul_maps(&term, &h);
        }
        if dead {
            continue;
        }
        for (k, v) in term {
            let e = acc.entry(k).or_insert_with(Rat::zero);
            *e += v;
        }
    }
    acc.retain(|_, v| !Zero::is_zero(v));
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn frobenius_examples() {
        assert_eq!(Partition::new(&[3, 1]).frobenius(), (vec![2], vec![1], 1));
        assert_eq!(Partition::empty().frobenius(), (vec![], vec![], 0));
        // brute-force box count for (2,2): diagonal hits boxes (1,1),(2,2)
        assert_eq!(Partition::new(&[2, 2]).frobenius(), (vec![1, 0], vec![1, 0], 2));
    }

    #[test]
    fn transpose_involution() {
        for lam in partitions_up_to(7, 7, 7) {
            assert_eq!(lam.transpose().transpose(), lam);
        }
    }

    #[test]
    fn complete_h_examples() {
        let t = TimesVector::from_pairs(&[(1, rat(1, 2)), (2, rat(1, 3))]);
        assert_eq!(complete_h(0, &t), rat_i(1));
        assert_eq!(complete_h(1, &t), rat(1, 2));
        // t1^2/2 + t2 = 1/8 + 1/3
        assert_eq!(complete_h(2, &t), rat(1, 8) + rat(1, 3));
        assert_eq!(complete_h(-3, &t), rat_i(0));
    }

    #[test]
    fn schur_examples() {
        let t = TimesVector::from_pairs(&[(1, rat(2, 1)), (2, rat(-1, 2))]);
        assert_eq!(schur_poly(&Partition::one_row(1), &t), rat_i(2));
        // t1^2/2 - t2
        assert_eq!(schur_poly(&Partition::new(&[1, 1]), &t), rat_i(2) + rat(1, 2));
        assert_eq!(schur_poly(&Partition::empty(), &t), rat_i(1));
    }

    #[test]
    fn char_examples() {
        let p = vec![rat_i(2), rat_i(3)];
        assert_eq!(char_eval(&Partition::one_row(1), &p).unwrap(), rat_i(5));
        assert_eq!(char_eval(&Partition::new(&[1, 1]), &p).unwrap(), rat_i(6));
        // Sym^2 with eigenvalues 2,3: 4 + 6 + 9
        assert_eq!(char_eval(&Partition::one_row(2), &p).unwrap(), rat_i(19));
        assert_eq!(char_eval(&Partition::new(&[1, 1, 1]), &p).unwrap(), rat_i(0));
        assert!(char_eval(&Partition::one_row(1), &[rat_i(2), rat_i(2)]).is_err());
    }

    #[test]
    fn char_equals_schur_at_power_sums() {
        for n in 2..=4usize {
            let p: Vec<Rat> = (0..n).map(|i| rat(i as i64 + 2, 1)).collect();
            for lam in partitions_up_to(6, 6, 6) {
                let t = power_sum_times(&p, lam.size().max(1));
                let c = char_eval(&lam, &p).unwrap();
                assert_eq!(c, schur_poly(&lam, &t), "lambda = {lam}");
            }
        }
    }

    #[test]
    fn giambelli_for_characters() {
        let p = vec![rat_i(2), rat_i(3), rat(1, 2)];
        for lam in partitions_up_to(6, 3, 6) {
            let (alphas, betas, d) = lam.frobenius();
            if d == 0 {
                continue;
            }
            let m = Mat::from_fn(d, d, |i, j| {
                char_eval(&Partition::hook(alphas[i] as u32, betas[j] as u32), &p).unwrap()
            });
            assert_eq!(m.det(), char_eval(&lam, &p).unwrap(), "lambda = {lam}");
        }
    }

    #[test]
    fn miwa_examples() {
        let m = MiwaSpec::from_points(&[(rat_i(2), 1, 1)]);
        let t = miwa_to_times(&m, 2);
        assert_eq!(t.get(1), rat(1, 2));
        assert_eq!(t.get(2), rat(1, 8));
        assert_eq!(miwa_to_times(&MiwaSpec::empty(), 5), TimesVector::zero());
        let c = MiwaSpec::from_points(&[(rat_i(2), 1, 1), (rat_i(2), -1, 1)]);
        assert_eq!(miwa_to_times(&c, 4), TimesVector::zero());
    }

    #[test]
    fn exp_xi_is_finite_product() {
        let m = MiwaSpec::from_points(&[(rat_i(2), 1, 1), (rat_i(5), -1, 2)]);
        // (1 - x/2)^{-1} (1 - x/5)^{2} at x = 1
        let v = m.exp_xi(&rat_i(1)).unwrap();
        assert_eq!(v, rat_i(2) * rat(16, 25));
    }

    #[test]
    fn partition_serialization() {
        let p = Partition::new(&[3, 1]);
        assert_eq!(p.to_compact_string(), "3,1");
        assert_eq!(Partition::from_compact_string("3,1").unwrap(), p);
        assert_eq!(Partition::from_compact_string("0").unwrap(), Partition::empty());
        assert!(Partition::from_compact_string("1,3").is_err());
    }

    #[test]
    fn weyl_dims() {
        assert_eq!(weyl_dim(&Partition::one_row(2), 2), 3);
        assert_eq!(weyl_dim(&Partition::new(&[2, 1]), 3), 8);
        assert_eq!(weyl_dim(&Partition::new(&[1, 1, 1]), 3), 1);
        assert_eq!(weyl_dim(&Partition::new(&[1, 1, 1]), 2), 0);
    }

    #[test]
    fn power_sum_expansion_matches_direct_eval() {
        let p = vec![rat_i(2), rat(1, 3), rat_i(-1)];
        for lam in partitions_up_to(5, 4, 5) {
            let expansion = schur_in_power_sums(&lam);
            let mut acc = Rat::zero();
            for (mu, c) in &expansion {
                let mut prod = c.clone();
                for &k in mu.parts() {
                    let mut ps = Rat::zero();
                    for x in &p {
                        ps += rat_pow(x, k as i64);
                    }
                    prod *= ps;
                }
                acc += prod;
            }
            assert_eq!(acc, char_eval(&lam, &p).unwrap(), "lambda = {lam}");
        }
    }
}
