//! Markov operators on the group algebra `C[W]`.
//!
//! `L_{s,x}` multiplies by `s` on the left with probability `x` (or `qx` when
//! that shortens the element); the right action `L̃_{s,x}` does the same with
//! right multiplication. All operators in one computation share the `q` of
//! their [`OpContext`].

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coxeter::{CoxeterType, SignedPermutation};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Finitely supported element of `C[W]`, kept in sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupVector<S> {
    ctype: CoxeterType,
    entries: BTreeMap<SignedPermutation, S>,
}

impl<S: Scalar> GroupVector<S> {
    pub fn zero(ctype: CoxeterType) -> Self {
        Self { ctype, entries: BTreeMap::new() }
    }

    /// Point mass at `w`.
    pub fn delta(w: SignedPermutation) -> Self {
        let ctype = w.ctype();
        let mut entries = BTreeMap::new();
        entries.insert(w, S::one());
        Self { ctype, entries }
    }

    pub fn identity(ctype: CoxeterType) -> Self {
        Self::delta(SignedPermutation::identity(ctype))
    }

    pub fn ctype(&self) -> CoxeterType {
        self.ctype
    }

    /// Coefficient of `w`, zero off the support.
    pub fn get(&self, w: &SignedPermutation) -> S {
        self.entries.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&mut self, w: SignedPermutation, c: S) -> Result<()> {
        if w.ctype() != self.ctype {
            return Err(Error::Structural(format!("{w} does not belong to {}", self.ctype)));
        }
        self.push(w, c);
        Ok(())
    }

    fn push(&mut self, w: SignedPermutation, c: S) {
        if c.is_zero() {
            return;
        }
        let slot = self.entries.entry(w).or_insert_with(S::zero);
        *slot = slot.clone() + c;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SignedPermutation, &S)> {
        self.entries.iter()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn mass(&self) -> S {
        self.entries.values().cloned().fold(S::zero(), |a, b| a + b)
    }

    /// Drops exact zeros left behind by cancellation.
    pub fn prune(&mut self) {
        self.entries.retain(|_, c| !c.is_zero());
    }

    /// `max_w |self(w) - other(phi(w))|` with `phi` applied to the support of `other`.
    pub fn max_discrepancy_by(&self, other: &Self, phi: impl Fn(&SignedPermutation) -> SignedPermutation) -> S {
        let mut mapped: BTreeMap<SignedPermutation, S> = BTreeMap::new();
        for (w, c) in &other.entries {
            mapped.insert(phi(w), c.clone());
        }
        let mut worst = S::zero();
        for (w, c) in &self.entries {
            let d = (c.clone() - mapped.get(w).cloned().unwrap_or_else(S::zero)).abs_val();
            if d > worst {
                worst = d;
            }
        }
        for (w, c) in &mapped {
            if !self.entries.contains_key(w) && c.abs_val() > worst {
                worst = c.abs_val();
            }
        }
        worst
    }

    pub fn max_discrepancy(&self, other: &Self) -> S {
        self.max_discrepancy_by(other, |w| w.clone())
    }
}

/// One factor `L_{s_i, x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSpec<S> {
    pub generator: usize,
    pub x: S,
}

impl<S> StepSpec<S> {
    pub fn new(generator: usize, x: S) -> Self {
        Self { generator, x }
    }
}

/// Order in which a step sequence is applied to `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Order {
    /// `s_{i_1}` first.
    Forward,
    /// `s_{i_n}` first.
    Reversed,
}

/// Whether the generator multiplies on the left or on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ActionSide {
    Left,
    Right,
}

/// Fixes `W` and the single `q` shared by every operator.
#[derive(Debug, Clone)]
pub struct OpContext<S> {
    ctype: CoxeterType,
    q: S,
    check_range: bool,
}

impl<S: Scalar> OpContext<S> {
    pub fn new(ctype: CoxeterType, q: S) -> Result<Self> {
        if q < S::zero() {
            return Err(Error::Domain(format!("q = {q:?} must be non-negative")));
        }
        Ok(Self { ctype, q, check_range: true })
    }

    /// Allows parameters outside the stochastic range (exact identities only).
    pub fn without_range_check(mut self) -> Self {
        self.check_range = false;
        self
    }

    pub fn ctype(&self) -> CoxeterType {
        self.ctype
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    fn check(&self, s: usize, x: &S) -> Result<()> {
        if !self.ctype.generators().contains(&s) {
            return Err(Error::Domain(format!("s_{s} is not a generator of {}", self.ctype)));
        }
        if self.check_range {
            let qx = self.q.clone() * x.clone();
            let unit = |v: &S| *v >= S::zero() && *v <= S::one();
            if !unit(x) || !unit(&qx) {
                return Err(Error::Domain(format!("x = {x:?} leaves [0,1] for x or qx")));
            }
        }
        Ok(())
    }

    fn step(&self, v: &GroupVector<S>, s: usize, x: &S, side: ActionSide) -> Result<GroupVector<S>> {
        if v.ctype != self.ctype {
            return Err(Error::Structural(format!("vector over {} used in {}", v.ctype, self.ctype)));
        }
        self.check(s, x)?;
        let mut out = GroupVector::zero(self.ctype);
        for (w, c) in &v.entries {
            let sw = match side {
                ActionSide::Left => w.left_mul_gen(s),
                ActionSide::Right => w.right_mul_gen(s),
            };
            let p = if sw.length() > w.length() { x.clone() } else { self.q.clone() * x.clone() };
            out.push(w.clone(), c.clone() * (S::one() - p.clone()));
            out.push(sw, c.clone() * p);
        }
        out.prune();
        Ok(out)
    }

    /// `L_{s,x} v`.
    pub fn left_step(&self, v: &GroupVector<S>, s: usize, x: &S) -> Result<GroupVector<S>> {
        self.step(v, s, x, ActionSide::Left)
    }

    /// `v L̃_{s,x}`.
    pub fn right_step(&self, v: &GroupVector<S>, s: usize, x: &S) -> Result<GroupVector<S>> {
        self.step(v, s, x, ActionSide::Right)
    }

    /// Applies a step sequence to `δ_e`.
    pub fn f_coeffs(&self, steps: &[StepSpec<S>], order: Order, side: ActionSide) -> Result<GroupVector<S>> {
        let mut v = GroupVector::identity(self.ctype);
        let apply = |v: &GroupVector<S>, st: &StepSpec<S>| self.step(v, st.generator, &st.x, side);
        match order {
            Order::Forward => {
                for st in steps {
                    v = apply(&v, st)?;
                }
            }
            Order::Reversed => {
                for st in steps.iter().rev() {
                    v = apply(&v, st)?;
                }
            }
        }
        Ok(v)
    }

    /// Computes `f_n`, `f̃_n`, `g̃_n` from `e` and compares them.
    pub fn check_colpos(&self, steps: &[StepSpec<S>]) -> Result<ColPosReport<S>> {
        let f = self.f_coeffs(steps, Order::Forward, ActionSide::Left)?;
        let ft = self.f_coeffs(steps, Order::Reversed, ActionSide::Left)?;
        let gt = self.f_coeffs(steps, Order::Reversed, ActionSide::Right)?;
        Ok(ColPosReport {
            steps: steps.len(),
            colpos: f.max_discrepancy_by(&ft, SignedPermutation::inverse),
            l1: gt.max_discrepancy_by(&ft, SignedPermutation::inverse),
            left_right: f.max_discrepancy(&gt),
        })
    }

    /// Both sides of `(L_{s_i,x_1} w) L̃_{s_j,x_2} = L_{s_i,x_1} (w L̃_{s_j,x_2})`.
    pub fn check_associativity(
        &self,
        w: &SignedPermutation,
        i: usize,
        j: usize,
        x1: &S,
        x2: &S,
    ) -> Result<AssocReport<S>> {
        let case = classify_associativity(w, i, j)?;
        let d = GroupVector::delta(w.clone());
        let lhs = self.right_step(&self.left_step(&d, i, x1)?, j, x2)?;
        let rhs = self.left_step(&self.right_step(&d, j, x2)?, i, x1)?;
        let (braid, eq_k) = if case >= 5 {
            let braid = w.left_mul_gen(i) == w.right_mul_gen(j);
            let (x, y, q) = (x1.clone(), x2.clone(), self.q.clone());
            let a = (S::one() - x.clone()) * y.clone() + x.clone() * (S::one() - q.clone() * y.clone());
            let b = x.clone() * (S::one() - y.clone()) + (S::one() - q * x) * y;
            (Some(braid), Some((a - b).abs_val()))
        } else {
            (None, None)
        };
        Ok(AssocReport { case, discrepancy: lhs.max_discrepancy(&rhs), braid, eq_k })
    }
}

/// Maximal pointwise differences for the three colour–position identities.
#[derive(Debug, Clone, PartialEq)]
pub struct ColPosReport<S> {
    pub steps: usize,
    /// `f_n(e→π)` against `f̃_n(e→π⁻¹)`.
    pub colpos: S,
    /// `g̃_n(e→π)` against `f̃_n(e→π⁻¹)`.
    pub l1: S,
    /// `f_n(e→π)` against `g̃_n(e→π)`.
    pub left_right: S,
}

impl<S: Scalar> ColPosReport<S> {
    pub fn max(&self) -> S {
        let mut m = self.colpos.clone();
        for v in [&self.l1, &self.left_right] {
            if *v > m {
                m = v.clone();
            }
        }
        m
    }

    pub fn holds(&self, tol: &S) -> bool {
        self.max() <= *tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssocReport<S> {
    pub case: u8,
    pub discrepancy: S,
    /// `s_i w == w s_j`, checked in cases 5 and 6.
    pub braid: Option<bool>,
    /// Residual of `(1-x)y + x(1-qy) = x(1-y) + (1-qx)y`, cases 5 and 6.
    pub eq_k: Option<S>,
}

impl<S: Scalar> AssocReport<S> {
    pub fn holds(&self, tol: &S) -> bool {
        self.discrepancy <= *tol && self.braid.unwrap_or(true) && self.eq_k.as_ref().map_or(true, |r| *r <= *tol)
    }
}

/// Length-sign pattern of `(w, s_i, s_j)`, numbered 1..=6.
///
/// Patterns are `(l(s_i w) > l(w), l(w s_j) > l(w), l(s_i w s_j) > l(w s_j), l(s_i w s_j) > l(s_i w))`.
pub fn classify_associativity(w: &SignedPermutation, i: usize, j: usize) -> Result<u8> {
    let ct = w.ctype();
    for g in [i, j] {
        if !ct.generators().contains(&g) {
            return Err(Error::Domain(format!("s_{g} is not a generator of {ct}")));
        }
    }
    let l = w.length();
    let sw = w.left_mul_gen(i);
    let ws = w.right_mul_gen(j);
    let sws = sw.right_mul_gen(j);
    let ls = sws.length();
    let pattern = (sw.length() > l, ws.length() > l, ls > ws.length(), ls > sw.length());
    match pattern {
        (true, true, true, true) => Ok(1),
        (false, true, false, true) => Ok(2),
        (true, false, true, false) => Ok(3),
        (false, false, false, false) => Ok(4),
        (true, true, false, false) => Ok(5),
        (false, false, true, true) => Ok(6),
        p => Err(Error::Structural(format!("length pattern {p:?} for {w}, s_{i}, s_{j} is impossible"))),
    }
}
