//! Finite Coxeter groups of types A and BC in signed-permutation form.
//!
//! An element is stored through its window `[w(1), ..., w(N)]`. For type BC
//! the values `w(-i) = -w(i)` are implicit, so the element permutes
//! `{-N..-1, 1..N}` and preserves every pair `{-i, i}`.
//!
//! Generators are `s_i = (i i+1)(-i -i-1)` for `1 <= i < N` and, in type BC
//! only, `s_0 = (-1 1)`. Products compose as functions: `(a*b)(i) = a(b(i))`,
//! so right multiplication by `s_i` swaps window entries and left
//! multiplication swaps values.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default ceiling on the number of group elements any enumeration may touch.
pub const DEFAULT_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `A_{N-1}`, the symmetric group on `N` letters.
    A,
    /// `BC_N`, signed permutations of `N` letters.
    BC,
}

/// A Coxeter system of type `A_{N-1}` or `BC_N`, identified by `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoxeterType {
    pub family: Family,
    pub rank: usize,
}

impl CoxeterType {
    pub fn a(rank: usize) -> Self {
        Self { family: Family::A, rank }
    }

    pub fn bc(rank: usize) -> Self {
        Self { family: Family::BC, rank }
    }

    pub fn is_bc(&self) -> bool {
        self.family == Family::BC
    }

    /// Indices of the simple generators, in increasing order.
    pub fn generators(&self) -> Vec<usize> {
        let start = if self.is_bc() { 0 } else { 1 };
        (start..self.rank).collect()
    }

    /// Entry `m_ij` of the Coxeter matrix.
    ///
    /// In type BC the only entry equal to 4 is `m_01`; `s_0` commutes with
    /// every `s_i`, `i >= 2`.
    pub fn coxeter_matrix_entry(&self, i: usize, j: usize) -> u32 {
        if i == j {
            return 1;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        if self.is_bc() && lo == 0 {
            return if hi == 1 { 4 } else { 2 };
        }
        if hi - lo == 1 {
            3
        } else {
            2
        }
    }

    /// `|W|`: `N!` or `2^N N!`.
    pub fn order(&self) -> u128 {
        let fact: u128 = (1..=self.rank as u128).product();
        match self.family {
            Family::A => fact,
            Family::BC => fact << self.rank,
        }
    }

    /// Exponents of the reflection representation.
    pub fn exponents(&self) -> Vec<u32> {
        match self.family {
            Family::A => (1..self.rank as u32).collect(),
            Family::BC => (1..=self.rank as u32).map(|i| 2 * i - 1).collect(),
        }
    }

    fn check_generator(&self, i: usize) -> Result<()> {
        if i >= self.rank || (i == 0 && !self.is_bc()) {
            return Err(Error::Domain(format!("s_{i} is not a generator of {self}")));
        }
        Ok(())
    }
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::A => write!(f, "A:{}", self.rank),
            Family::BC => write!(f, "BC:{}", self.rank),
        }
    }
}

/// Group element in window notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPermutation {
    ctype: CoxeterType,
    window: Vec<i32>,
}

impl SignedPermutation {
    pub fn identity(ctype: CoxeterType) -> Self {
        Self { ctype, window: (1..=ctype.rank as i32).collect() }
    }

    pub fn generator(ctype: CoxeterType, i: usize) -> Result<Self> {
        ctype.check_generator(i)?;
        let mut w = Self::identity(ctype);
        w.swap_right(i);
        Ok(w)
    }

    /// Builds an element from its window, validating the group invariants.
    pub fn from_window(ctype: CoxeterType, window: Vec<i32>) -> Result<Self> {
        let n = ctype.rank;
        if window.len() != n {
            return Err(Error::Structural(format!("window of length {} for rank {n}", window.len())));
        }
        let mut seen = vec![false; n + 1];
        for &v in &window {
            let a = v.unsigned_abs() as usize;
            if a == 0 || a > n || seen[a] {
                return Err(Error::Domain(format!("{window:?} is not a signed permutation")));
            }
            if v < 0 && !ctype.is_bc() {
                return Err(Error::Domain(format!("negative entry in type A window {window:?}")));
            }
            seen[a] = true;
        }
        Ok(Self { ctype, window })
    }

    pub fn ctype(&self) -> CoxeterType {
        self.ctype
    }

    pub fn window(&self) -> &[i32] {
        &self.window
    }

    pub fn rank(&self) -> usize {
        self.ctype.rank
    }

    pub fn is_identity(&self) -> bool {
        self.window.iter().enumerate().all(|(k, &v)| v == k as i32 + 1)
    }

    /// `w(i)` for `i` in `{-N..-1, 1..N}`.
    pub fn apply(&self, i: i32) -> i32 {
        debug_assert!(i != 0);
        if i > 0 {
            self.window[i as usize - 1]
        } else {
            -self.window[(-i) as usize - 1]
        }
    }

    /// `a * b`, acting as `i -> a(b(i))`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.ctype != other.ctype {
            return Err(Error::Structural(format!("cannot multiply {} by {}", self.ctype, other.ctype)));
        }
        Ok(self.compose(other))
    }

    pub(crate) fn compose(&self, other: &Self) -> Self {
        Self { ctype: self.ctype, window: other.window.iter().map(|&v| self.apply(v)).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0i32; self.rank()];
        for (k, &v) in self.window.iter().enumerate() {
            let pos = k as i32 + 1;
            if v > 0 {
                inv[v as usize - 1] = pos;
            } else {
                inv[(-v) as usize - 1] = -pos;
            }
        }
        Self { ctype: self.ctype, window: inv }
    }

    /// Coxeter length, computed from (signed) inversions.
    pub fn length(&self) -> usize {
        let w = &self.window;
        let n = w.len();
        match self.ctype.family {
            Family::A => {
                let mut inv = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if w[i] > w[j] {
                            inv += 1;
                        }
                    }
                }
                inv
            }
            Family::BC => {
                // values on -N..-1, 1..N in increasing order of the argument
                let full: Vec<i32> = w.iter().rev().map(|v| -v).chain(w.iter().copied()).collect();
                let mut inv = 0;
                for i in 0..full.len() {
                    for j in i + 1..full.len() {
                        if full[i] > full[j] {
                            inv += 1;
                        }
                    }
                }
                let neg = w.iter().filter(|&&v| v < 0).count();
                (inv + neg) / 2
            }
        }
    }

    /// `l(w s_i) < l(w)`.
    pub fn has_right_descent(&self, i: usize) -> bool {
        if i == 0 {
            self.window[0] < 0
        } else {
            self.window[i - 1] > self.window[i]
        }
    }

    /// `l(s_i w) < l(w)`.
    pub fn has_left_descent(&self, i: usize) -> bool {
        self.inverse().has_right_descent(i)
    }

    /// `w * s_i`.
    pub fn right_mul_gen(&self, i: usize) -> Self {
        let mut w = self.clone();
        w.swap_right(i);
        w
    }

    /// `s_i * w`.
    pub fn left_mul_gen(&self, i: usize) -> Self {
        let mut w = self.clone();
        w.swap_left(i);
        w
    }

    fn swap_right(&mut self, i: usize) {
        if i == 0 {
            self.window[0] = -self.window[0];
        } else {
            self.window.swap(i - 1, i);
        }
    }

    fn swap_left(&mut self, i: usize) {
        let i = i as i32;
        for v in self.window.iter_mut() {
            if i == 0 {
                if v.abs() == 1 {
                    *v = -*v;
                }
            } else if v.abs() == i {
                *v = v.signum() * (i + 1);
            } else if v.abs() == i + 1 {
                *v = v.signum() * i;
            }
        }
    }

    /// A reduced word `[i_1, ..., i_l]` with `w = s_{i_1} ... s_{i_l}`.
    pub fn reduced_word(&self) -> Vec<usize> {
        let gens = self.ctype.generators();
        let mut w = self.clone();
        let mut emitted = Vec::new();
        'outer: loop {
            for &g in &gens {
                if w.has_right_descent(g) {
                    w.swap_right(g);
                    emitted.push(g);
                    continue 'outer;
                }
            }
            break;
        }
        emitted.reverse();
        emitted
    }

    /// Product of a word of generators.
    pub fn from_word(ctype: CoxeterType, word: &[usize]) -> Result<Self> {
        let mut w = Self::identity(ctype);
        for &g in word {
            ctype.check_generator(g)?;
            w.swap_right(g);
        }
        Ok(w)
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[", self.ctype)?;
        for (k, v) in self.window.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for SignedPermutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse group element {s:?}"));
        let mut parts = s.splitn(3, ':');
        let fam = parts.next().ok_or_else(bad)?;
        let rank: usize = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        let body = parts.next().ok_or_else(bad)?.trim();
        let body = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(bad)?;
        let window = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',').map(|t| t.trim().parse::<i32>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?
        };
        let ctype = match fam.trim() {
            "A" => CoxeterType::a(rank),
            "BC" => CoxeterType::bc(rank),
            _ => return Err(bad()),
        };
        Self::from_window(ctype, window)
    }
}

/// Parabolic subgroup `S(N_1) x ... x S(N_n)`, optionally extended by `s_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParabolicSpec {
    ctype: CoxeterType,
    blocks: Vec<usize>,
    includes_s0: bool,
}

impl ParabolicSpec {
    pub fn new(ctype: CoxeterType, blocks: Vec<usize>, includes_s0: bool) -> Result<Self> {
        if blocks.iter().any(|&b| b == 0) {
            return Err(Error::Domain(format!("composition {blocks:?} has a zero part")));
        }
        let total: usize = blocks.iter().sum();
        if total != ctype.rank {
            return Err(Error::Structural(format!("composition {blocks:?} sums to {total}, expected {}", ctype.rank)));
        }
        if includes_s0 && !ctype.is_bc() {
            return Err(Error::Domain("s_0 only exists in type BC".into()));
        }
        Ok(Self { ctype, blocks, includes_s0 })
    }

    /// The trivial subgroup.
    pub fn trivial(ctype: CoxeterType) -> Self {
        Self { ctype, blocks: vec![1; ctype.rank], includes_s0: false }
    }

    /// The whole group.
    pub fn full(ctype: CoxeterType) -> Self {
        Self { ctype, blocks: vec![ctype.rank], includes_s0: ctype.is_bc() }
    }

    pub fn ctype(&self) -> CoxeterType {
        self.ctype
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn includes_s0(&self) -> bool {
        self.includes_s0
    }

    /// Simple generators lying in the subgroup.
    pub fn generators(&self) -> Vec<usize> {
        let mut cuts = HashSet::new();
        let mut acc = 0;
        for &b in &self.blocks {
            acc += b;
            cuts.insert(acc);
        }
        let mut gens = Vec::new();
        if self.includes_s0 {
            gens.push(0);
        }
        gens.extend((1..self.ctype.rank).filter(|i| !cuts.contains(i)));
        gens
    }

    /// Block index (0-based) of the letter `|v|`.
    pub fn block_of(&self, v: i32) -> usize {
        let a = v.unsigned_abs() as usize;
        let mut acc = 0;
        for (k, &b) in self.blocks.iter().enumerate() {
            acc += b;
            if a <= acc {
                return k;
            }
        }
        unreachable!("letter {v} outside rank {}", self.ctype.rank)
    }

    /// Membership test from the block structure (independent of lengths).
    pub fn contains(&self, w: &SignedPermutation) -> bool {
        if w.ctype() != self.ctype {
            return false;
        }
        w.window().iter().enumerate().all(|(k, &v)| {
            let pos = k as i32 + 1;
            let same_block = self.block_of(pos) == self.block_of(v);
            let sign_ok = v > 0 || (self.includes_s0 && self.block_of(pos) == 0);
            same_block && sign_ok
        })
    }

    /// `|W_H|`.
    pub fn order(&self) -> u128 {
        let mut ord: u128 = self.blocks.iter().map(|&b| (1..=b as u128).product::<u128>()).product();
        if self.includes_s0 {
            ord <<= self.blocks[0];
        }
        ord
    }
}

fn closure(ctype: CoxeterType, gens: &[usize], order: u128, cap: u128) -> Result<Vec<SignedPermutation>> {
    if order > cap {
        return Err(Error::Resource(format!("enumeration of {order} elements exceeds cap {cap}")));
    }
    let e = SignedPermutation::identity(ctype);
    let mut seen = HashSet::new();
    seen.insert(e.clone());
    let mut out = vec![e.clone()];
    let mut queue = VecDeque::from([e]);
    while let Some(w) = queue.pop_front() {
        for &g in gens {
            let next = w.right_mul_gen(g);
            if seen.insert(next.clone()) {
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(out)
}

/// All elements of `W`, in breadth-first order from the identity.
pub fn enumerate_group(ctype: CoxeterType) -> Result<Vec<SignedPermutation>> {
    enumerate_group_capped(ctype, DEFAULT_CAP)
}

pub fn enumerate_group_capped(ctype: CoxeterType, cap: u128) -> Result<Vec<SignedPermutation>> {
    closure(ctype, &ctype.generators(), ctype.order(), cap)
}

/// All elements of the parabolic subgroup `W_H`.
pub fn enumerate_parabolic(h: &ParabolicSpec) -> Result<Vec<SignedPermutation>> {
    enumerate_parabolic_capped(h, DEFAULT_CAP)
}

pub fn enumerate_parabolic_capped(h: &ParabolicSpec, cap: u128) -> Result<Vec<SignedPermutation>> {
    closure(h.ctype, &h.generators(), h.order(), cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Representative of the left coset `wH` (minimal `x` with `w = x b`).
    Right,
    /// Representative of the right coset `Hw` (minimal `x` with `w = b x`).
    Left,
}

/// Minimal-length element of `wH` (`Side::Right`) or `Hw` (`Side::Left`),
/// found by greedy descent inside `H`.
pub fn min_coset_rep(w: &SignedPermutation, h: &ParabolicSpec, side: Side) -> SignedPermutation {
    let gens = h.generators();
    let mut x = w.clone();
    'outer: loop {
        for &g in &gens {
            match side {
                Side::Right if x.has_right_descent(g) => {
                    x = x.right_mul_gen(g);
                    continue 'outer;
                }
                Side::Left if x.has_left_descent(g) => {
                    x = x.left_mul_gen(g);
                    continue 'outer;
                }
                _ => {}
            }
        }
        return x;
    }
}

/// Minimal-length element of the double coset `H' w H`.
pub fn double_coset_rep(w: &SignedPermutation, hp: &ParabolicSpec, h: &ParabolicSpec) -> SignedPermutation {
    let mut x = w.clone();
    loop {
        let y = min_coset_rep(&min_coset_rep(&x, hp, Side::Left), h, Side::Right);
        if y == x {
            return x;
        }
        x = y;
    }
}

/// `true` iff `w` has no right descent in `H` (i.e. `w` lies in `D_H`).
pub fn is_min_right(w: &SignedPermutation, h: &ParabolicSpec) -> bool {
    h.generators().iter().all(|&g| !w.has_right_descent(g))
}

/// `true` iff `w` has no left descent in `H` (i.e. `w` lies in `D_H^{-1}`).
pub fn is_min_left(w: &SignedPermutation, h: &ParabolicSpec) -> bool {
    h.generators().iter().all(|&g| !w.has_left_descent(g))
}

/// Distinguished left-coset representatives `D_H` (or `D_H^{-1}` for `Side::Left`).
pub fn enumerate_coset_reps(h: &ParabolicSpec, side: Side) -> Result<Vec<SignedPermutation>> {
    Ok(enumerate_group(h.ctype)?
        .into_iter()
        .filter(|w| match side {
            Side::Right => is_min_right(w, h),
            Side::Left => is_min_left(w, h),
        })
        .collect())
}

/// `D_{H',H} = D_{H'}^{-1} ∩ D_H`.
pub fn enumerate_dcoset_reps(hp: &ParabolicSpec, h: &ParabolicSpec) -> Result<Vec<SignedPermutation>> {
    if hp.ctype != h.ctype {
        return Err(Error::Structural("parabolic subgroups of different groups".into()));
    }
    Ok(enumerate_group(h.ctype)?.into_iter().filter(|w| is_min_left(w, hp) && is_min_right(w, h)).collect())
}

/// Polynomial in `q` with non-negative integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSeries(pub Vec<u64>);

impl QSeries {
    pub fn one() -> Self {
        QSeries(vec![1])
    }

    /// `[n]_q = 1 + q + ... + q^{n-1}`.
    pub fn q_integer(n: usize) -> Self {
        QSeries(vec![1; n])
    }

    /// `prod_i [e_i + 1]_q` over the exponents of `ctype`.
    pub fn product_formula(ctype: CoxeterType) -> Self {
        ctype.exponents().into_iter().fold(Self::one(), |acc, e| acc.mul(&Self::q_integer(e as usize + 1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return QSeries(Vec::new());
        }
        let mut c = vec![0u64; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QSeries(c).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.len() > 1 && *self.0.last().unwrap() == 0 {
            self.0.pop();
        }
        self
    }

    pub fn eval<S: Scalar>(&self, q: &S) -> S {
        self.0.iter().rev().fold(S::zero(), |acc, &c| acc * q.clone() + S::from_int(c as i64))
    }
}

/// `Y(q) = sum_{w in Y} q^{l(w)}`.
pub fn poincare_series(ys: &[SignedPermutation]) -> QSeries {
    let mut coeffs = Vec::new();
    for w in ys {
        let l = w.length();
        if coeffs.len() <= l {
            coeffs.resize(l + 1, 0);
        }
        coeffs[l] += 1;
    }
    QSeries(coeffs).trimmed()
}

/// The q-exchangeable law `P(y) = q^{l(y)} / Y(q)` on a finite set, in the input order.
pub fn q_exchangeable<S: Scalar>(ys: &[SignedPermutation], q: &S) -> Result<Vec<(SignedPermutation, S)>> {
    if *q <= S::zero() {
        return Err(Error::Domain(format!("q must be positive, got {q:?}")));
    }
    if ys.is_empty() {
        return Err(Error::Domain("q-exchangeable law on an empty set".into()));
    }
    let weights: Vec<S> = ys.iter().map(|w| q.powi(w.length() as u32)).collect();
    let z = weights.iter().cloned().fold(S::zero(), |a, b| a + b);
    Ok(ys.iter().cloned().zip(weights).map(|(w, wt)| (w, wt / z.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn sp(s: &str) -> SignedPermutation {
        s.parse().unwrap()
    }

    #[test]
    fn identity_is_neutral_and_generators_are_involutions() {
        for ct in [CoxeterType::a(3), CoxeterType::bc(3)] {
            let e = SignedPermutation::identity(ct);
            for w in enumerate_group(ct).unwrap() {
                assert_eq!(e.multiply(&w).unwrap(), w);
                assert_eq!(w.multiply(&e).unwrap(), w);
            }
            for g in ct.generators() {
                let s = SignedPermutation::generator(ct, g).unwrap();
                assert!(s.multiply(&s).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn bc2_composition_convention() {
        let ct = CoxeterType::bc(2);
        let s0 = SignedPermutation::generator(ct, 0).unwrap();
        let s1 = SignedPermutation::generator(ct, 1).unwrap();
        assert_eq!(s0.window(), &[-1, 2]);
        assert_eq!(s1.window(), &[2, 1]);
        // apply s_0 first, then s_1
        assert_eq!(s1.multiply(&s0).unwrap().window(), &[-2, 1]);
        assert_eq!(s0.multiply(&s1).unwrap().window(), &[2, -1]);
    }

    #[test]
    fn mismatched_types_are_rejected() {
        let a = SignedPermutation::identity(CoxeterType::a(2));
        let b = SignedPermutation::identity(CoxeterType::bc(2));
        assert!(matches!(a.multiply(&b), Err(Error::Structural(_))));
    }

    #[test]
    fn coxeter_relations_hold() {
        for ct in [CoxeterType::a(4), CoxeterType::bc(4)] {
            for i in ct.generators() {
                for j in ct.generators() {
                    let m = ct.coxeter_matrix_entry(i, j) as usize;
                    let word: Vec<usize> = [i, j].iter().copied().cycle().take(2 * m).collect();
                    assert!(SignedPermutation::from_word(ct, &word).unwrap().is_identity());
                    // and no smaller power vanishes
                    for k in 1..m {
                        let w: Vec<usize> = [i, j].iter().copied().cycle().take(2 * k).collect();
                        assert!(!SignedPermutation::from_word(ct, &w).unwrap().is_identity());
                    }
                }
            }
        }
        assert_eq!(CoxeterType::bc(3).coxeter_matrix_entry(0, 1), 4);
        assert_eq!(CoxeterType::bc(3).coxeter_matrix_entry(2, 0), 2);
    }

    #[test]
    fn inverse_examples() {
        let w = sp("A:3:[3,1,2]");
        assert_eq!(w.inverse().window(), &[2, 3, 1]);
        assert!(w.multiply(&w.inverse()).unwrap().is_identity());
        assert_eq!(w.inverse().inverse(), w);
    }

    #[test]
    fn length_examples() {
        assert_eq!(sp("A:4:[4,3,2,1]").length(), 6);
        assert_eq!(sp("BC:2:[-1,-2]").length(), 4);
        assert_eq!(sp("BC:2:[-1,2]").length(), 1);
        assert_eq!(sp("BC:1:[1]").length(), 0);
    }

    #[test]
    fn descent_tests_match_lengths() {
        for ct in [CoxeterType::a(4), CoxeterType::bc(3)] {
            for w in enumerate_group(ct).unwrap() {
                for g in ct.generators() {
                    assert_eq!(w.has_right_descent(g), w.right_mul_gen(g).length() < w.length());
                    assert_eq!(w.has_left_descent(g), w.left_mul_gen(g).length() < w.length());
                    let s = SignedPermutation::generator(ct, g).unwrap();
                    assert_eq!(w.left_mul_gen(g), s.multiply(&w).unwrap());
                    assert_eq!(w.right_mul_gen(g), w.multiply(&s).unwrap());
                }
            }
        }
    }

    #[test]
    fn reduced_words_reproduce_elements() {
        assert!(SignedPermutation::identity(CoxeterType::a(3)).reduced_word().is_empty());
        let s2 = SignedPermutation::generator(CoxeterType::a(3), 2).unwrap();
        assert_eq!(s2.reduced_word(), vec![2]);
        for ct in [CoxeterType::a(4), CoxeterType::bc(3)] {
            for w in enumerate_group(ct).unwrap() {
                let word = w.reduced_word();
                assert_eq!(word.len(), w.length());
                assert_eq!(SignedPermutation::from_word(ct, &word).unwrap(), w);
            }
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(enumerate_group(CoxeterType::a(3)).unwrap().len(), 6);
        assert_eq!(enumerate_group(CoxeterType::bc(2)).unwrap().len(), 8);
        assert_eq!(enumerate_group(CoxeterType::bc(3)).unwrap().len(), 48);
        assert!(matches!(enumerate_group_capped(CoxeterType::a(5), 100), Err(Error::Resource(_))));
    }

    #[test]
    fn parabolic_examples() {
        let a3 = CoxeterType::a(3);
        let triv = ParabolicSpec::new(a3, vec![1, 1, 1], false).unwrap();
        assert_eq!(enumerate_parabolic(&triv).unwrap().len(), 1);
        let h = ParabolicSpec::new(a3, vec![2, 1], false).unwrap();
        let els = enumerate_parabolic(&h).unwrap();
        assert_eq!(els.len(), 2);
        assert!(els.contains(&SignedPermutation::generator(a3, 1).unwrap()));
        let h0 = ParabolicSpec::new(CoxeterType::bc(2), vec![2], true).unwrap();
        assert_eq!(enumerate_parabolic(&h0).unwrap().len(), 8);
        let h1 = ParabolicSpec::new(CoxeterType::bc(3), vec![1, 2], true).unwrap();
        assert_eq!(enumerate_parabolic(&h1).unwrap().len(), 4);
        assert!(ParabolicSpec::new(a3, vec![3], true).is_err());
        assert!(ParabolicSpec::new(a3, vec![2, 2], false).is_err());
    }

    #[test]
    fn membership_matches_closure() {
        let ct = CoxeterType::bc(3);
        for (blocks, s0) in [(vec![2, 1], true), (vec![1, 2], false), (vec![1, 1, 1], true)] {
            let h = ParabolicSpec::new(ct, blocks, s0).unwrap();
            let sub: HashSet<_> = enumerate_parabolic(&h).unwrap().into_iter().collect();
            for w in enumerate_group(ct).unwrap() {
                assert_eq!(h.contains(&w), sub.contains(&w), "{w}");
            }
            assert_eq!(sub.len() as u128, h.order());
        }
    }

    #[test]
    fn coset_rep_example() {
        let a3 = CoxeterType::a(3);
        let w = SignedPermutation::from_word(a3, &[2, 1]).unwrap();
        let h = ParabolicSpec::new(a3, vec![2, 1], false).unwrap();
        let x = min_coset_rep(&w, &h, Side::Right);
        let coset: Vec<_> = enumerate_parabolic(&h).unwrap().iter().map(|b| w.compose(b)).collect();
        let best = coset.iter().min_by_key(|v| v.length()).unwrap();
        assert_eq!(&x, best);
        assert!(h.contains(&x.inverse().compose(&w)));
        let hw = min_coset_rep(&SignedPermutation::generator(a3, 1).unwrap(), &h, Side::Right);
        assert!(hw.is_identity());
    }

    #[test]
    fn double_coset_partition_s3() {
        let a3 = CoxeterType::a(3);
        let hp = ParabolicSpec::new(a3, vec![2, 1], false).unwrap();
        let h = ParabolicSpec::new(a3, vec![1, 2], false).unwrap();
        let reps = enumerate_dcoset_reps(&hp, &h).unwrap();
        let hp_el = enumerate_parabolic(&hp).unwrap();
        let h_el = enumerate_parabolic(&h).unwrap();
        let mut covered = HashSet::new();
        for x in &reps {
            for a in &hp_el {
                for b in &h_el {
                    covered.insert(a.compose(x).compose(b));
                }
            }
        }
        assert_eq!(covered.len(), 6);
        assert_eq!(reps.len(), 2);
        let full = ParabolicSpec::full(a3);
        assert_eq!(enumerate_dcoset_reps(&full, &full).unwrap().len(), 1);
        let triv = ParabolicSpec::trivial(a3);
        assert_eq!(enumerate_dcoset_reps(&triv, &triv).unwrap().len(), 6);
    }

    #[test]
    fn poincare_examples() {
        let e = SignedPermutation::identity(CoxeterType::a(3));
        assert_eq!(poincare_series(&[e]), QSeries::one());
        let a2 = enumerate_group(CoxeterType::a(3)).unwrap();
        assert_eq!(poincare_series(&a2), QSeries(vec![1, 2, 2, 1]));
        let b2 = enumerate_group(CoxeterType::bc(2)).unwrap();
        assert_eq!(poincare_series(&b2), QSeries(vec![1, 2, 2, 2, 1]));
        assert_eq!(QSeries::product_formula(CoxeterType::bc(2)), QSeries(vec![1, 2, 2, 2, 1]));
    }

    #[test]
    fn q_exchangeable_examples() {
        let e = SignedPermutation::identity(CoxeterType::a(2));
        let p = q_exchangeable(&[e.clone()], &rat(3, 7)).unwrap();
        assert_eq!(p[0].1, rat(1, 1));
        let s2 = enumerate_group(CoxeterType::a(2)).unwrap();
        let p = q_exchangeable(&s2, &1.0f64).unwrap();
        assert!(p.iter().all(|(_, x)| (*x - 0.5).abs() < 1e-15));
        let s3 = enumerate_group(CoxeterType::a(3)).unwrap();
        let q = rat(1, 2);
        let p = q_exchangeable(&s3, &q).unwrap();
        let z = QSeries::product_formula(CoxeterType::a(3)).eval(&q);
        for (w, pr) in &p {
            assert_eq!(pr.clone() * z.clone(), q.powi(w.length() as u32));
        }
        let total: Rational = p.iter().map(|(_, x)| x.clone()).sum();
        assert_eq!(total, rat(1, 1));
        assert!(matches!(q_exchangeable(&s3, &0.0f64), Err(Error::Domain(_))));
    }

    #[test]
    fn text_form_round_trips() {
        for s in ["A:3:[2,3,1]", "BC:2:[-2,1]"] {
            assert_eq!(sp(s).to_string(), s);
        }
        assert!("BC:2:[1,1]".parse::<SignedPermutation>().is_err());
        assert!("A:2:[-1,2]".parse::<SignedPermutation>().is_err());
    }
}
