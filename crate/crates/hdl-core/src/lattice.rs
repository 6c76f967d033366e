//! Truncated lattice model of the affine Grassmannian in equal
//! characteristic.
//!
//! The local field is `F_q((t))` with integers `O = F_q[[t]]`; a lattice `E`
//! with `t^N Λ₀ ⊆ E ⊆ t^{-N} Λ₀` is stored as its `t`-stable image in the
//! `2Nn`-dimensional window `t^{-N}Λ₀ / t^N Λ₀`, in canonical RREF form.
//! Duals are taken for the anti-diagonal form on `Λ₀`; under the standard
//! coordinates the window inherits exactly the anti-diagonal bilinear
//! pairing in dimension `2Nn`, so the dual is a single orthogonal
//! complement. The unitary modification Frobenius is
//! `Φ(E) = σ(E^∨)`, with `σ` the arithmetic `q`-power on coefficients
//! (`t` is fixed); `Φ∘Φ = σ²` and `(E^∨)^∨ = E` hold on the nose.
//!
//! Window overflow (an operation whose honest result is not representable
//! in the window) is a hard error, never a silent truncation.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::ff::Field;
use crate::linalg::{
    enumerate_subspaces, q_steps, LinalgError, Pairing, SubQuotient, Subspace,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice spaces differ (window/field/rank)")]
    SpaceMismatch,
    #[error("subspace is not t-stable")]
    NotTStable,
    #[error("window overflow: result of {0} escapes t^[-N,N]")]
    WindowOverflow(&'static str),
    #[error("cocharacter is not dominant")]
    NotDominant,
    #[error("dominance comparison of unequal totals ({0} vs {1})")]
    UnequalTotals(i64, i64),
    #[error("pair invariant identity d1 + d2 = l failed: d1={d1} d2={d2} l={l}")]
    PairInvariantViolation { d1: usize, d2: usize, l: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// An integer cocharacter: `GL_n`-part in the `ε_1..ε_n` basis plus the
/// central `ε_0` coefficient.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Cochar {
    gl: Vec<i64>,
    gm: i64,
}

impl Cochar {
    pub fn new(gl: Vec<i64>, gm: i64) -> Cochar {
        Cochar { gl, gm }
    }

    pub fn from_gl(gl: Vec<i64>) -> Cochar {
        Cochar { gl, gm: 0 }
    }

    pub fn zero(n: usize) -> Cochar {
        Cochar {
            gl: vec![0; n],
            gm: 0,
        }
    }

    pub fn gl(&self) -> &[i64] {
        &self.gl
    }
    pub fn gm(&self) -> i64 {
        self.gm
    }
    pub fn rank(&self) -> usize {
        self.gl.len()
    }
    pub fn total(&self) -> i64 {
        self.gl.iter().sum()
    }

    pub fn is_dominant(&self) -> bool {
        self.gl.windows(2).all(|w| w[0] >= w[1])
    }

    /// Duality `*`: negate and reverse the `GL`-part, negate the center.
    pub fn star(&self) -> Cochar {
        Cochar {
            gl: self.gl.iter().rev().map(|&a| -a).collect(),
            gm: -self.gm,
        }
    }

    /// Dominance order: all partial sums of `self` at most those of `other`,
    /// with equal totals and equal central parts.
    pub fn dominance_leq(&self, other: &Cochar) -> Result<bool, LatticeError> {
        if !self.is_dominant() || !other.is_dominant() {
            return Err(LatticeError::NotDominant);
        }
        if self.total() != other.total() || self.gm != other.gm {
            return Err(LatticeError::UnequalTotals(self.total(), other.total()));
        }
        let mut a = 0i64;
        let mut b = 0i64;
        for (x, y) in self.gl.iter().zip(&other.gl) {
            a += x;
            b += y;
            if a > b {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

struct SpaceInner {
    field: Field,
    q: u32,
    n: usize,
    window: i64,
}

/// Shared context for lattices: coefficient field `F_{q^{2k}}`, arithmetic
/// `q`, rank `n`, window size `N`.
#[derive(Clone)]
pub struct LatticeSpace(Arc<SpaceInner>);

impl PartialEq for LatticeSpace {
    fn eq(&self, other: &Self) -> bool {
        self.0.field == other.0.field
            && self.0.q == other.0.q
            && self.0.n == other.0.n
            && self.0.window == other.0.window
    }
}
impl Eq for LatticeSpace {}

impl std::fmt::Debug for LatticeSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LatticeSpace(n={}, q={}, {:?}, N={})",
            self.0.n, self.0.q, self.0.field, self.0.window
        )
    }
}

impl LatticeSpace {
    pub fn new(field: &Field, q: u32, n: usize, window: i64) -> LatticeSpace {
        let s = q_steps(field, q);
        assert!(
            field.degree() % (2 * s) == 0,
            "coefficient field must contain F_{{q^2}}"
        );
        assert!(window >= 1);
        LatticeSpace(Arc::new(SpaceInner {
            field: field.clone(),
            q,
            n,
            window,
        }))
    }

    pub fn field(&self) -> &Field {
        &self.0.field
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn rank(&self) -> usize {
        self.0.n
    }
    pub fn window(&self) -> i64 {
        self.0.window
    }
    pub fn window_dim(&self) -> usize {
        2 * self.0.window as usize * self.0.n
    }

    /// Flat window coordinate of `t^j e_i` (`j` in `[-N, N)`, `i` in `0..n`).
    pub fn flat(&self, j: i64, i: usize) -> usize {
        let n = self.0.n;
        debug_assert!((-self.0.window..self.0.window).contains(&j) && i < n);
        ((j + self.0.window) as usize) * n + i
    }

    /// `t^k Λ₀` as a window lattice (`k` in `[-N, N]`).
    pub fn scaled_std(&self, k: i64) -> TLattice {
        assert!((-self.0.window..=self.0.window).contains(&k));
        let mut rows = Vec::new();
        for j in k..self.0.window {
            for i in 0..self.0.n {
                let mut r = vec![0u32; self.window_dim()];
                r[self.flat(j, i)] = 1;
                rows.push(r);
            }
        }
        TLattice {
            space: self.clone(),
            body: Subspace::span(&self.0.field, self.window_dim(), rows),
        }
    }

    pub fn std_lattice(&self) -> TLattice {
        self.scaled_std(0)
    }

    /// Diagonal lattice with basis `t^{a_i} e_i`.
    pub fn from_divisors(&self, divisors: &[i64]) -> TLattice {
        assert_eq!(divisors.len(), self.0.n);
        let mut rows = Vec::new();
        for (i, &a) in divisors.iter().enumerate() {
            assert!((-self.0.window..=self.0.window).contains(&a));
            for j in a..self.0.window {
                let mut r = vec![0u32; self.window_dim()];
                r[self.flat(j, i)] = 1;
                rows.push(r);
            }
        }
        TLattice {
            space: self.clone(),
            body: Subspace::span(&self.0.field, self.window_dim(), rows),
        }
    }

    fn window_pairing(&self) -> Pairing {
        // The residue of the anti-diagonal form on the window is exactly the
        // anti-diagonal bilinear pairing in dimension 2Nn: t^a e_i pairs with
        // t^b e_{n+1-i} iff a + b = -1, and the flat indices of the two slots
        // sum to 2Nn - 1.
        Pairing::bilinear(self.window_dim())
    }
}

/// A `t`-stable lattice in the window, canonical by its RREF body.
#[derive(Clone, PartialEq, Eq)]
pub struct TLattice {
    space: LatticeSpace,
    body: Subspace,
}

impl PartialOrd for TLattice {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for TLattice {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.body.cmp(&other.body)
    }
}

impl std::fmt::Debug for TLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TLattice(dim {} in {:?})", self.body.dim(), self.space)
    }
}

impl TLattice {
    pub fn from_body(space: &LatticeSpace, body: Subspace) -> Result<TLattice, LatticeError> {
        if body.ambient() != space.window_dim() || body.field() != space.field() {
            return Err(LatticeError::SpaceMismatch);
        }
        let lat = TLattice {
            space: space.clone(),
            body,
        };
        if !lat.is_t_stable() {
            return Err(LatticeError::NotTStable);
        }
        Ok(lat)
    }

    pub fn space(&self) -> &LatticeSpace {
        &self.space
    }
    pub fn body(&self) -> &Subspace {
        &self.body
    }

    fn shift_vec(&self, v: &[u32], k: i64) -> Vec<u32> {
        let sp = &self.space;
        let n = sp.rank();
        let w = sp.window();
        let mut out = vec![0u32; sp.window_dim()];
        for j in -w..w {
            let jj = j + k;
            if !(-w..w).contains(&jj) {
                continue;
            }
            for i in 0..n {
                let val = v[sp.flat(j, i)];
                if val != 0 {
                    out[sp.flat(jj, i)] = val;
                }
            }
        }
        out
    }

    fn is_t_stable(&self) -> bool {
        self.body
            .rows()
            .iter()
            .all(|r| self.body.contains_vec(&self.shift_vec(r, 1)))
    }

    fn check_space(&self, other: &TLattice) -> Result<(), LatticeError> {
        if self.space != other.space {
            return Err(LatticeError::SpaceMismatch);
        }
        Ok(())
    }

    pub fn sum(&self, other: &TLattice) -> Result<TLattice, LatticeError> {
        self.check_space(other)?;
        Ok(TLattice {
            space: self.space.clone(),
            body: self.body.sum(&other.body)?,
        })
    }

    pub fn intersect(&self, other: &TLattice) -> Result<TLattice, LatticeError> {
        self.check_space(other)?;
        Ok(TLattice {
            space: self.space.clone(),
            body: self.body.intersect(&other.body)?,
        })
    }

    pub fn contains(&self, other: &TLattice) -> Result<bool, LatticeError> {
        self.check_space(other)?;
        Ok(self.body.contains(&other.body)?)
    }

    /// `t^k`-multiple. Errors when the honest result escapes the window.
    pub fn shift(&self, k: i64) -> Result<TLattice, LatticeError> {
        let sp = &self.space;
        let w = sp.window();
        if k == 0 {
            return Ok(self.clone());
        }
        if k > 0 {
            // t^k E contains t^N Λ₀ iff E contains t^{N-k} Λ₀
            let need = sp.scaled_std((w - k).max(-w));
            if w - k < -w || !self.body.contains(need.body())? {
                return Err(LatticeError::WindowOverflow("shift"));
            }
        } else {
            // t^k E fits under t^{-N} Λ₀ iff E has no support below level -N-k
            let bound = -w - k;
            for r in self.body.rows() {
                for j in -w..(-w).max(bound.min(w)) {
                    for i in 0..sp.rank() {
                        if j < bound && r[sp.flat(j, i)] != 0 {
                            return Err(LatticeError::WindowOverflow("shift"));
                        }
                    }
                }
            }
        }
        let rows: Vec<Vec<u32>> = self
            .body
            .rows()
            .iter()
            .map(|r| self.shift_vec(r, k))
            .collect();
        let mut body = Subspace::span(sp.field(), sp.window_dim(), rows);
        if k < 0 {
            // the honest lattice is span(shifted generators) + t^{N+k} Λ₀;
            // the floor is implicit (zero) in the window only for k >= 0
            body = body.sum(sp.scaled_std(sp.window() + k).body())?;
        }
        Ok(TLattice {
            space: sp.clone(),
            body,
        })
    }

    /// Dual lattice for the anti-diagonal form: a single orthogonal
    /// complement in the window. Always representable, `dual∘dual = id`.
    pub fn dual(&self) -> TLattice {
        let body = self
            .space
            .window_pairing()
            .perp(&self.body)
            .expect("window pairing matches ambient");
        let lat = TLattice {
            space: self.space.clone(),
            body,
        };
        debug_assert!(lat.is_t_stable());
        lat
    }

    /// Coefficientwise `q^e`-power (`t` is Frobenius-fixed); `e` may be
    /// negative, acting through the inverse of the field Frobenius.
    pub fn frob(&self, e: i64) -> TLattice {
        let sp = &self.space;
        let s = q_steps(sp.field(), sp.q()) as i64;
        let m = sp.field().degree() as i64;
        let k = (s * e).rem_euclid(m) as u32;
        TLattice {
            space: sp.clone(),
            body: self.body.frob_p(k),
        }
    }

    /// The unitary modification Frobenius `Φ(E) = σ(E^∨)`.
    pub fn gu_phi(&self) -> TLattice {
        self.dual().frob(1)
    }

    /// Elementary divisors of `self` relative to `base`: the decreasing
    /// vector `(a_i)` such that `self` has a basis `(t^{a_i} b_i)` for a
    /// basis `(b_i)` of `base`; `t^{-1} Λ₀` maps to `(-1,…,-1)`.
    pub fn inv_pos(&self, base: &TLattice) -> Result<Cochar, LatticeError> {
        self.check_space(base)?;
        let sp = &self.space;
        let w = sp.window();
        let n = sp.rank();

        let mut lo = None;
        for j in (-w..=w).rev() {
            if let Ok(shifted) = base.shift(j) {
                if shifted.body.contains(&self.body)? {
                    lo = Some(j);
                    break;
                }
            }
        }
        let mut hi = None;
        for j in -w..=w {
            if let Ok(shifted) = base.shift(j) {
                if self.body.contains(shifted.body())? {
                    hi = Some(j);
                    break;
                }
            }
        }
        let (lo, hi) = match (lo, hi) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(LatticeError::WindowOverflow("inv_pos")),
        };
        debug_assert!(lo <= hi);

        // c_j = #{ i : a_i <= j } via the staircase
        // dim((E ∩ t^j B + t^{j+1} B) / t^{j+1} B)
        let mut counts = Vec::new(); // (divisor value, multiplicity)
        let mut prev_c = 0usize;
        for j in lo..hi {
            let tjb = base.shift(j).map_err(|_| LatticeError::WindowOverflow("inv_pos"))?;
            let tj1b = base
                .shift(j + 1)
                .map_err(|_| LatticeError::WindowOverflow("inv_pos"))?;
            let inter = self.body.intersect(tjb.body())?;
            let c = inter.sum(tj1b.body())?.dim() - tj1b.body().dim();
            counts.push((j, c - prev_c));
            prev_c = c;
        }
        counts.push((hi, n - prev_c));

        let mut gl = Vec::with_capacity(n);
        for &(j, mult) in counts.iter().rev() {
            for _ in 0..mult {
                gl.push(j);
            }
        }
        debug_assert_eq!(gl.len(), n);
        Ok(Cochar::from_gl(gl))
    }

    /// `inv_pos(self, base) ≼ mu` (dominance; unequal totals are an error).
    pub fn bounded_by(&self, base: &TLattice, mu: &Cochar) -> Result<bool, LatticeError> {
        self.inv_pos(base)?.dominance_leq(mu)
    }

    /// `inv_pos(self, base) = mu` exactly.
    pub fn exact_pos(&self, base: &TLattice, mu: &Cochar) -> Result<bool, LatticeError> {
        if !mu.is_dominant() {
            return Err(LatticeError::NotDominant);
        }
        Ok(self.inv_pos(base)?.gl() == mu.gl())
    }

    /// Window image of `t^k self`, i.e. the lattice `t^k self + t^N Λ₀`.
    /// Exact as an operand of sums and intersections with honest window
    /// lattices (those contain the floor, so the clipped part is absorbed);
    /// never exposed outside the crate.
    pub(crate) fn shift_clipped(&self, k: i64) -> Result<TLattice, LatticeError> {
        let sp = &self.space;
        if k < 0 {
            // upward overflow is a real unrepresentability
            return self.shift(k);
        }
        let rows: Vec<Vec<u32>> = self
            .body
            .rows()
            .iter()
            .map(|r| self.shift_vec(r, k))
            .collect();
        Ok(TLattice {
            space: sp.clone(),
            body: Subspace::span(sp.field(), sp.window_dim(), rows),
        })
    }

    /// Length of `self / other` for `other ⊆ self` (k-dimension of the
    /// window quotient).
    pub fn length_over(&self, other: &TLattice) -> Result<usize, LatticeError> {
        self.check_space(other)?;
        debug_assert!(self.body.contains(&other.body)?);
        Ok(self.body.dim() - other.body.dim())
    }

    /// The residue chart `self / t·self`, an `n`-dimensional quotient.
    pub fn residue_chart(&self) -> Result<SubQuotient, LatticeError> {
        let sub = self.shift(1)?;
        Ok(SubQuotient::new(&self.body, sub.body())?)
    }
}

/// The pair invariants of two standard-position lattices:
/// `l = length(Λx / Λx ∩ Λx')`,
/// `d1 = dim((t²Λx' + tΛx)/tΛx)`, `d2 = dim(((Λx ∩ tΛx') + tΛx)/tΛx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairInvariants {
    pub l: usize,
    pub d1: usize,
    pub d2: usize,
}

pub fn pair_invariants(lx: &TLattice, lxp: &TLattice) -> Result<PairInvariants, LatticeError> {
    lx.check_space(lxp)?;
    let inter = lx.intersect(lxp)?;
    let l = lx.body().dim() - inter.body().dim();
    let t_lx = lx.shift(1)?;
    // t²Λx' and tΛx' are combined with lattices containing the floor, so the
    // clipped shifts are exact here even when they escape the window alone.
    let t2_lxp = lxp.shift_clipped(2)?;
    let d1 = t2_lxp.sum(&t_lx)?.body().dim() - t_lx.body().dim();
    let t_lxp = lxp.shift_clipped(1)?;
    let d2 = lx.intersect(&t_lxp)?.sum(&t_lx)?.body().dim() - t_lx.body().dim();
    if d1 + d2 != l {
        return Err(LatticeError::PairInvariantViolation { d1, d2, l });
    }
    Ok(PairInvariants { l, d1, d2 })
}

/// `E⁺_{x,x'} = (Ex + Ex') ∩ t^{-1} Ex`.
pub fn exx_plus(lx: &TLattice, lxp: &TLattice) -> Result<TLattice, LatticeError> {
    lx.sum(lxp)?.intersect(&lx.shift(-1)?)
}

/// `E⁻_{x,x'} = (Ex ∩ Ex') + t Ex`.
pub fn exx_minus(lx: &TLattice, lxp: &TLattice) -> Result<TLattice, LatticeError> {
    lx.intersect(lxp)?.sum(&lx.shift(1)?)
}

/// `E_{+,-} = E₊ ∩ (E₋ + Ex')`.
pub fn e_plusminus(
    e_plus: &TLattice,
    e_minus: &TLattice,
    lxp: &TLattice,
) -> Result<TLattice, LatticeError> {
    e_plus.intersect(&e_minus.sum(lxp)?)
}

/// All lattices `E` with `inv_pos(E, base) ≼ mu`, each exactly once, in
/// canonical order. Non-minuscule bounds are enumerated by composing
/// minuscule column steps (convolution-style), with deduplication.
pub fn enumerate_bounded(
    base: &TLattice,
    mu: &Cochar,
    budget: &Budget,
) -> Result<Vec<TLattice>, LatticeError> {
    if !mu.is_dominant() {
        return Err(LatticeError::NotDominant);
    }
    let sp = base.space().clone();
    let n = sp.rank();
    assert_eq!(mu.rank(), n);
    let floor = *mu.gl().last().unwrap();
    let lam: Vec<i64> = mu.gl().iter().map(|&a| a - floor).collect();
    let height = |level: i64| lam.iter().filter(|&&a| a >= level).count();

    let start = base.shift(floor)?;
    let mut current: BTreeSet<TLattice> = BTreeSet::new();
    current.insert(start);
    let max_level = lam[0];
    for level in 1..=max_level {
        let h = height(level);
        let mut next = BTreeSet::new();
        for m in &current {
            let quo = m.residue_chart()?;
            let tm = m.shift(1)?;
            for s in enumerate_subspaces(sp.field(), n, n - h, budget)? {
                budget.charge(1)?;
                let lifted = quo.lift_subspace(&s);
                let body = lifted.sum(tm.body())?;
                next.insert(TLattice {
                    space: sp.clone(),
                    body,
                });
            }
        }
        current = next;
    }
    Ok(current.into_iter().collect())
}
