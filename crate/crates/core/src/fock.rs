//! Brute-force free-fermion oracle on a finite mode window.
//!
//! States are spanned by occupation bitmasks over the window modes; modes
//! below the window are always empty and modes at or above its upper edge are
//! always occupied, so the shifted vacuum with charge n is the set of
//! occupied window modes >= n. Mode operators act with the sign
//! (-1)^(number of occupied modes below), `psi` removes a mode and
//! `psi_star` adds one; on the shifted vacua this realizes
//! psi_n|n> = |n+1> and psi*_n|n+1> = |n>.
//!
//! Window truncation is exact for every quantity asserted here: hopping
//! flows and pure annihilator strings cannot leak amplitude across the
//! window edges against the Pauli blocking of the frozen exterior.

use crate::scalar::{falling, rat_i, rat_pow, Rat};
use crate::symfunc::{Partition, TimesVector};
use crate::matrix::Mat;
use num_traits::{One, Zero};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Error, Debug, PartialEq)]
pub enum FockError {
    #[error("mode {0} is outside the window")]
    ModeOutOfWindow(i64),
    #[error("one-row coefficient table is singular")]
    Singular,
}

/// Modes n_min..n_max-1.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ModeWindow {
    pub n_min: i64,
    pub n_max: i64,
}

impl ModeWindow {
    pub fn new(n_min: i64, n_max: i64) -> Self {
        let w = n_max - n_min;
        assert!(w >= 1 && w <= 16, "window width out of supported range");
        ModeWindow { n_min, n_max }
    }

    /// Default window used by the identity suites.
    pub fn default_w12() -> Self {
        ModeWindow::new(-6, 6)
    }

    pub fn width(&self) -> usize {
        (self.n_max - self.n_min) as usize
    }

    pub fn contains(&self, mode: i64) -> bool {
        mode >= self.n_min && mode < self.n_max
    }

    pub fn bit(&self, mode: i64) -> Result<u32, FockError> {
        if !self.contains(mode) {
            return Err(FockError::ModeOutOfWindow(mode));
        }
        Ok((mode - self.n_min) as u32)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        self.n_min..self.n_max
    }
}

/// One fermionic mode operator.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum ModeOp {
    /// Removes the mode (annihilates when empty).
    Psi(i64),
    /// Adds the mode (annihilates when occupied).
    PsiStar(i64),
}

/// Finitely supported vector in the window Fock space.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct FockVector {
    pub amplitudes: BTreeMap<u16, Rat>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn from_mask(mask: u16) -> Self {
        let mut v = FockVector::zero();
        v.amplitudes.insert(mask, Rat::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn add_term(&mut self, mask: u16, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.amplitudes.entry(mask).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.amplitudes.remove(&mask);
        }
    }

    pub fn add_scaled(&mut self, other: &FockVector, c: &Rat) {
        for (m, a) in &other.amplitudes {
            self.add_term(*m, a * c);
        }
    }

    pub fn scale(&self, c: &Rat) -> FockVector {
        if c.is_zero() {
            return FockVector::zero();
        }
        FockVector { amplitudes: self.amplitudes.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    /// Euclidean pairing; all coefficients are real rationals here.
    pub fn inner(&self, other: &FockVector) -> Rat {
        let (small, big) = if self.amplitudes.len() <= other.amplitudes.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Rat::zero();
        for (m, a) in &small.amplitudes {
            if let Some(b) = big.amplitudes.get(m) {
                acc += a * b;
            }
        }
        acc
    }
}

fn sign_below(mask: u16, bit: u32) -> Rat {
    let below = mask & ((1u16 << bit) - 1);
    if below.count_ones() % 2 == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Mode operator at the raw bit level: create or remove the bit with the
/// fermionic sign, no window translation.
fn apply_bit(create: bool, bit: u32, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (mask, a) in &v.amplitudes {
        let occupied = mask & (1 << bit) != 0;
        if create == occupied {
            continue;
        }
        let s = sign_below(*mask, bit);
        out.add_term(mask ^ (1 << bit), a * s);
    }
    out
}

/// Shifted Dirac vacuum |n>: window modes >= n occupied.
pub fn vacuum(n: i64, w: &ModeWindow) -> Result<FockVector, FockError> {
    if n < w.n_min || n > w.n_max {
        return Err(FockError::ModeOutOfWindow(n));
    }
    let mut mask = 0u16;
    for m in n..w.n_max {
        mask |= 1 << w.bit(m)?;
    }
    Ok(FockVector::from_mask(mask))
}

/// Apply a single mode operator.
pub fn apply_mode(op: ModeOp, v: &FockVector, w: &ModeWindow) -> Result<FockVector, FockError> {
    let (mode, create) = match op {
        ModeOp::Psi(m) => (m, false),
        ModeOp::PsiStar(m) => (m, true),
    };
    let bit = w.bit(mode)?;
    let mut out = FockVector::zero();
    for (mask, a) in &v.amplitudes {
        let occupied = mask & (1 << bit) != 0;
        if create == occupied {
            continue;
        }
        let s = sign_below(*mask, bit);
        out.add_term(mask ^ (1 << bit), a * s);
    }
    Ok(out)
}

/// Apply a string of mode operators right to left (the rightmost acts first).
pub fn apply_ops(ops: &[ModeOp], v: &FockVector, w: &ModeWindow) -> Result<FockVector, FockError> {
    let mut cur = v.clone();
    for op in ops.iter().rev() {
        cur = apply_mode(*op, &cur, w)?;
        if cur.is_zero() {
            break;
        }
    }
    Ok(cur)
}

/// Linear combination of psi's or psi_star's over window modes.
#[derive(Clone, Debug)]
pub struct ModeCombo {
    pub star: bool,
    pub coeffs: Vec<(i64, Rat)>,
}

impl ModeCombo {
    pub fn apply(&self, v: &FockVector, w: &ModeWindow) -> Result<FockVector, FockError> {
        let mut out = FockVector::zero();
        for (mode, c) in &self.coeffs {
            let op = if self.star { ModeOp::PsiStar(*mode) } else { ModeOp::Psi(*mode) };
            let t = apply_mode(op, v, w)?;
            out.add_scaled(&t, c);
        }
        Ok(out)
    }

    /// The adjoint swaps psi and psi_star (coefficients are rational).
    pub fn dagger(&self) -> ModeCombo {
        ModeCombo { star: !self.star, coeffs: self.coeffs.clone() }
    }

    /// Window truncation of the generating field at z: psi(z) = sum psi_k z^k
    /// or psi*(z) = sum psi*_k z^{-k}, optionally differentiated m times in z.
    pub fn field_at(star: bool, z: &Rat, deriv: u32, w: &ModeWindow) -> ModeCombo {
        let mut coeffs = vec![];
        for k in w.modes() {
            let e = if star { -k } else { k };
            // d^m/dz^m z^e = e(e-1)...(e-m+1) z^{e-m}
            let f = falling(&rat_i(e), deriv);
            if f.is_zero() {
                continue;
            }
            let c = f * rat_pow(z, e - deriv as i64);
            coeffs.push((k, c));
        }
        ModeCombo { star, coeffs }
    }
}

/// The basis state |lambda, n> with the standard operator ordering and signs.
pub fn basis_state(lambda: &Partition, n: i64, w: &ModeWindow) -> Result<FockVector, FockError> {
    let (alphas, betas, d) = lambda.frobenius();
    let mut ops = vec![];
    for i in 0..d {
        ops.push(ModeOp::PsiStar(n - betas[i] - 1));
    }
    for i in (0..d).rev() {
        ops.push(ModeOp::Psi(n + alphas[i]));
    }
    apply_ops(&ops, &vacuum(n, w)?, w)
}

/// Diagrams whose basis state fits the window at charge n: those inside the
/// box of height n - n_min and width n_max - n, capped at max_size boxes.
pub fn in_window_partitions(n: i64, w: &ModeWindow, max_size: u32) -> Vec<Partition> {
    let width = (w.n_max - n).max(0) as u32;
    let height = (n - w.n_min).max(0) as u32;
    let cap = max_size.min(width * height);
    crate::symfunc::partitions_up_to(cap, height as usize, width)
        .into_iter()
        .filter(|lam| {
            let (a, b, _) = lam.frobenius();
            a.iter().all(|&x| w.contains(n + x)) && b.iter().all(|&x| w.contains(n - x - 1))
        })
        .collect()
}

/// Every diagram fitting the window at charge n (the full charge sector).
pub fn all_window_partitions(n: i64, w: &ModeWindow) -> Vec<Partition> {
    in_window_partitions(n, w, u32::MAX)
}

/// Ordering of the bilinear exponent.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Ordering {
    /// All psi_star to the left of all psi (empty-state ordering).
    Bare,
    /// Creation operators relative to the Dirac sea to the left.
    Dirac,
}

/// A group-like element given as the ordered exponent of a one-body bilinear
/// form, expanded exactly as a finite sum of monomials weighted by minors.
pub struct GroupElement {
    pub w: ModeWindow,
    pub b: Mat<Rat>,
    pub ordering: Ordering,
    minor_cache: RefCell<HashMap<(u16, u16), Rat>>,
}

impl GroupElement {
    pub fn new(b: Mat<Rat>, ordering: Ordering, w: ModeWindow) -> Self {
        assert_eq!(b.n, w.width());
        assert_eq!(b.m, w.width());
        GroupElement { w, b, ordering, minor_cache: RefCell::new(HashMap::new()) }
    }

    pub fn identity(w: ModeWindow) -> Self {
        GroupElement::new(Mat::zeros(w.width(), w.width()), Ordering::Bare, w)
    }

    fn minor(&self, rows: &[u32], cols: &[u32]) -> Rat {
        let key = (
            rows.iter().fold(0u16, |m, &r| m | (1 << r)),
            cols.iter().fold(0u16, |m, &c| m | (1 << c)),
        );
        if let Some(v) = self.minor_cache.borrow().get(&key) {
            return v.clone();
        }
        let m = Mat::from_fn(rows.len(), cols.len(), |i, j| {
            self.b.at(rows[i] as usize, cols[j] as usize).clone()
        });
        let d = m.det();
        self.minor_cache.borrow_mut().insert(key, d.clone());
        d
    }

    /// Action on a vector. The bare-ordered exponent is the nested sum over
    /// occupied subsets K of W*_{k_1}..W*_{k_m} psi_{k_m}..psi_{k_1} with
    /// W*_k = sum_i B_{ik} psi*_i, evaluated by recursion over modes; this
    /// reproduces the minor expansion sum_{I,K} det(B[I,K]) psi*_I psi_K
    /// without forming determinants.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        match self.ordering {
            Ordering::Bare => {
                let width = self.w.width() as u32;
                let cols: Vec<Vec<(u32, Rat)>> = (0..width)
                    .map(|k| {
                        (0..width)
                            .filter_map(|i| {
                                let c = self.b.at(i as usize, k as usize);
                                if c.is_zero() {
                                    None
                                } else {
                                    Some((i, c.clone()))
                                }
                            })
                            .collect()
                    })
                    .collect();
                fn rec(k: u32, width: u32, v: FockVector, cols: &[Vec<(u32, Rat)>]) -> FockVector {
                    if v.is_zero() || k == width {
                        return v;
                    }
                    let hop = if cols[k as usize].is_empty() {
                        FockVector::zero()
                    } else {
                        let removed = apply_bit(false, k, &v);
                        if removed.is_zero() {
                            FockVector::zero()
                        } else {
                            let inner = rec(k + 1, width, removed, cols);
                            let mut acc = FockVector::zero();
                            for (i, c) in &cols[k as usize] {
                                let t = apply_bit(true, *i, &inner);
                                acc.add_scaled(&t, c);
                            }
                            acc
                        }
                    };
                    let mut out = rec(k + 1, width, v, cols);
                    out.add_scaled(&hop, &Rat::one());
                    out
                }
                rec(0, width, v.clone(), &cols)
            }
            Ordering::Dirac => self.apply_minor_sum(v),
        }
    }

    /// Direct minor expansion; exponential in the window width, kept as the
    /// independent route for cross-checks and for Dirac-ordered exponents.
    pub fn apply_minor_sum(&self, v: &FockVector) -> FockVector {
        let width = self.w.width() as u32;
        let mut out = FockVector::zero();
        for (mask, amp) in &v.amplitudes {
            let occ: Vec<u32> = (0..width).filter(|b| mask & (1 << b) != 0).collect();
            for kmask in subsets_of(&occ) {
                let ksize = kmask.count_ones();
                let removed = mask & !kmask;
                let avail: Vec<u32> =
                    (0..width).filter(|b| removed & (1 << *b) == 0).collect();
                for imask in subsets_of_size(&avail, ksize) {
                    let rows: Vec<u32> = bits_of(imask);
                    let cols: Vec<u32> = bits_of(kmask);
                    let det = self.minor(&rows, &cols);
                    if det.is_zero() {
                        continue;
                    }
                    let (sign, target) = monomial_action(*mask, kmask, imask, self.ordering, &self.w);
                    if sign == 0 {
                        continue;
                    }
                    let c = amp * det * rat_i(sign);
                    out.add_term(target, c);
                }
            }
        }
        out
    }

    /// Left action: <x| G as a vector, computed through the transpose.
    pub fn apply_left(&self, bra: &FockVector) -> FockVector {
        let g = GroupElement::new(self.b.transpose(), self.ordering, self.w);
        g.apply(bra)
    }

    /// Induced one-body rotation matrix: psi_n G = sum_l R_{nl} G psi_l.
    pub fn rotation(&self) -> Mat<Rat> {
        match self.ordering {
            Ordering::Bare => Mat::identity(self.w.width()).add(&self.b),
            Ordering::Dirac => unimplemented!("rotation matrix is used for bare-ordered elements"),
        }
    }
}

fn bits_of(mask: u16) -> Vec<u32> {
    (0..16).filter(|b| mask & (1 << b) != 0).collect()
}

fn subsets_of(bits: &[u32]) -> Vec<u16> {
    let mut out = vec![0u16];
    for &b in bits {
        let cur = out.clone();
        for m in cur {
            out.push(m | (1 << b));
        }
    }
    out
}

fn subsets_of_size(bits: &[u32], size: u32) -> Vec<u16> {
    let mut out = vec![];
    fn go(bits: &[u32], size: u32, from: usize, acc: u16, out: &mut Vec<u16>) {
        if size == 0 {
            out.push(acc);
            return;
        }
        if bits.len() - from < size as usize {
            return;
        }
        for i in from..bits.len() {
            go(bits, size - 1, i + 1, acc | (1 << bits[i]), out);
        }
    }
    go(bits, size, 0, 0, &mut out);
    out
}

/// Action of psi*_{i_1}..psi*_{i_m} psi_{k_m}..psi_{k_1} on a basis mask, for
/// the given exponent ordering. Returns (sign, target mask); sign 0 kills.
fn monomial_action(mask: u16, kmask: u16, imask: u16, ordering: Ordering, w: &ModeWindow) -> (i64, u16) {
    // Operator list written left to right, applied right to left.
    let is: Vec<u32> = bits_of(imask);
    let ks: Vec<u32> = bits_of(kmask);
    let mut ops: Vec<(bool, u32)> = vec![];
    for &i in &is {
        ops.push((true, i));
    }
    for &k in ks.iter().rev() {
        ops.push((false, k));
    }
    let mut sign = 1i64;
    if ordering == Ordering::Dirac {
        let (s, reordered) = dirac_reorder(&ops, w);
        sign = s;
        ops = reordered;
    }
    let mut cur = mask;
    for &(star, bit) in ops.iter().rev() {
        let occupied = cur & (1 << bit) != 0;
        if star == occupied {
            return (0, 0);
        }
        let below = cur & ((1u16 << bit) - 1);
        if below.count_ones() % 2 == 1 {
            sign = -sign;
        }
        cur ^= 1 << bit;
    }
    (sign, cur)
}

/// Reorder distinct fermion operators so that creation operators relative to
/// the Dirac sea (psi at modes >= 0, psi* at modes < 0) stand to the left,
/// with the fermionic sign of the permutation. Normal ordering of a monomial
/// in pairwise distinct operators is exactly this signed reordering.
fn dirac_reorder(ops: &[(bool, u32)], w: &ModeWindow) -> (i64, Vec<(bool, u32)>) {
    let creation = |op: &(bool, u32)| -> bool {
        let (star, b) = *op;
        let mode = w.n_min + b as i64;
        (!star && mode >= 0) || (star && mode < 0)
    };
    let mut sign = 1i64;
    let mut list = ops.to_vec();
    let n = list.len();
    for i in 0..n {
        let mut next = None;
        for (j, op) in list.iter().enumerate().skip(i) {
            if creation(op) {
                next = Some(j);
                break;
            }
        }
        match next {
            Some(j) => {
                for k in (i..j).rev() {
                    list.swap(k, k + 1);
                    sign = -sign;
                }
            }
            None => break,
        }
    }
    (sign, list)
}

/// e^{J_+(t)} with J_k = sum_j psi_j psi*_{j+k}, expanded as the terminating
/// series of a strictly mode-sum-raising operator.
pub fn apply_j_plus(t: &TimesVector, v: &FockVector, w: &ModeWindow) -> FockVector {
    apply_hop_exp(t, v, w, true)
}

/// e^{sum_k t_k J_{-k}}, the adjoint flow, used for left coherent states.
pub fn apply_j_minus(t: &TimesVector, v: &FockVector, w: &ModeWindow) -> FockVector {
    apply_hop_exp(t, v, w, false)
}

fn apply_hop_exp(t: &TimesVector, v: &FockVector, w: &ModeWindow, plus: bool) -> FockVector {
    let width = w.width() as i64;
    let hop = |x: &FockVector| -> FockVector {
        let mut out = FockVector::zero();
        for (k, tk) in t.support() {
            let k = k as i64;
            if k >= width {
                break;
            }
            for j in w.n_min..w.n_max - k {
                // J_k term psi_j psi*_{j+k}: add mode j+k then remove mode j.
                // The adjoint J_{-k} term is psi_{j+k} psi*_j.
                let (add, rm) = if plus { (j + k, j) } else { (j, j + k) };
                let s1 = apply_mode(ModeOp::PsiStar(add), x, w).unwrap();
                if s1.is_zero() {
                    continue;
                }
                let s2 = apply_mode(ModeOp::Psi(rm), &s1, w).unwrap();
                out.add_scaled(&s2, tk);
            }
        }
        out
    };
    let mut acc = v.clone();
    let mut term = v.clone();
    let mut m = 1i64;
    loop {
        term = hop(&term);
        if term.is_zero() {
            break;
        }
        term = term.scale(&(Rat::one() / rat_i(m)));
        acc.add_scaled(&term, &Rat::one());
        m += 1;
        assert!(m < 200, "hop expansion failed to terminate");
    }
    acc
}

/// tau value <n| e^{J_+(t)} G |n> for a precomputed vector u = G|n>.
pub fn tau_vev_from(u: &FockVector, n: i64, t: &TimesVector, w: &ModeWindow) -> Rat {
    let bra = vacuum(n, w).unwrap();
    // <n| e^{J_+} u = <(e^{J_+})^dagger n | u> with dagger flow J_{-k}
    let left = apply_j_minus(t, &bra, w);
    left.inner(u)
}

/// tau value <n| e^{J_+(t)} G |n>.
pub fn tau_vev(g: &GroupElement, n: i64, t: &TimesVector) -> Rat {
    let u = g.apply(&vacuum(n, &g.w).unwrap());
    tau_vev_from(&u, n, t, &g.w)
}

/// Schur-expansion coefficient c_lambda(n) = (-1)^{b(lambda)} <lambda,n|G|n>
/// extracted from the precomputed vector u = G|n>.
pub fn plucker_coeff_from(u: &FockVector, lambda: &Partition, n: i64, w: &ModeWindow) -> Result<Rat, FockError> {
    let bra = basis_state(lambda, n, w)?;
    let sign = if lambda.b_sign_exponent() % 2 == 0 { Rat::one() } else { -Rat::one() };
    Ok(sign * bra.inner(u))
}

pub fn plucker_coeff(g: &GroupElement, lambda: &Partition, n: i64) -> Result<Rat, FockError> {
    let u = g.apply(&vacuum(n, &g.w).unwrap());
    plucker_coeff_from(&u, lambda, n, &g.w)
}

/// Strictly upper-triangular one-body matrix reproducing the given one-row
/// coefficients c_s(n) (with c_0 = 1) through its bare-ordered exponent.
pub fn g_from_onerow(
    c: impl Fn(i64, i64) -> Rat,
    w: &ModeWindow,
) -> Result<Mat<Rat>, FockError> {
    let width = w.width();
    // C_{nm} = c_{m-n}(n+1) on window indices; unit upper triangular.
    let cmat = Mat::from_fn(width, width, |i, j| {
        let n = w.n_min + i as i64;
        let m = w.n_min + j as i64;
        if m < n {
            Rat::zero()
        } else {
            c(m - n, n + 1)
        }
    });
    for i in 0..width {
        if !(cmat.at(i, i).clone() - Rat::one()).is_zero() {
            return Err(FockError::Singular);
        }
    }
    // invert the unit upper-triangular matrix exactly
    let mut inv = Mat::<Rat>::identity(width);
    for j in 0..width {
        for i in (0..j).rev() {
            let mut acc = Rat::zero();
            for k in i + 1..=j {
                acc += cmat.at(i, k) * inv.at(k, j);
            }
            *inv.at_mut(i, j) = -acc;
        }
    }
    let mut b = inv;
    for i in 0..width {
        *b.at_mut(i, i) -= Rat::one();
    }
    Ok(b)
}

/// Single factor of a rational solution state: a combination of z-derivatives
/// of the field psi at fixed points.
#[derive(Clone, Debug)]
pub struct PsiFactor {
    /// (point, derivative order, coefficient)
    pub terms: Vec<(Rat, u32, Rat)>,
}

/// The state Psi_{I_1}...Psi_{I_N} |n-N>, window truncated.
pub fn psi_product_state(
    factors: &[PsiFactor],
    n: i64,
    w: &ModeWindow,
) -> Result<FockVector, FockError> {
    let nn = factors.len() as i64;
    let mut v = vacuum(n - nn, w)?;
    for f in factors.iter().rev() {
        let mut combo = ModeCombo { star: false, coeffs: vec![] };
        for (p, m, a) in &f.terms {
            let field = ModeCombo::field_at(false, p, *m, w);
            for (mode, c) in field.coeffs {
                combo.coeffs.push((mode, c * a));
            }
        }
        v = combo.apply(&v, w)?;
        if v.is_zero() {
            break;
        }
    }
    Ok(v)
}
