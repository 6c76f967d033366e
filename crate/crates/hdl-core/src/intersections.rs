//! Intersections of pairs of irreducible components: pair-invariant strata,
//! the flag- and fiber-level stratum permutations, brute-force open
//! intersections with their stratum decomposition, the two-equation
//! (Frobenius and Frobenius-cube) locus at a shared basepoint, the
//! isotropic-pair intersection for even rank, and the full `n = 6` catalog.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::components::{
    self, ComponentError, ComponentKind, ComponentPoint, FiberChart, YPoint,
};
use crate::ff::Field;
use crate::flags::{Flag, FlagType, FlagsError, GuAmbient, RelPos};
use crate::lattice::{
    e_plusminus, exx_minus, exx_plus, pair_invariants, Cochar, LatticeError, LatticeSpace,
    PairInvariants, TLattice,
};
use crate::linalg::{enumerate_subspaces, LinalgError, SubQuotient, Subspace};
use crate::perm::Perm;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntersectError {
    #[error("invalid stratum parameters: {0}")]
    InvalidStratum(&'static str),
    #[error("bad parameters: {0}")]
    BadParameters(&'static str),
    #[error("structural claim falsified: {0}")]
    Falsified(String),
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Flags(#[from] FlagsError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Indexing data of one stratum of an open intersection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StratumKey {
    pub i: usize,
    pub i_prime: usize,
    pub d1: usize,
    pub d2: usize,
    pub j1: usize,
    pub j2: usize,
}

impl StratumKey {
    /// The constraint system bounding the admissible `(j1, j2)`, together
    /// with the nonemptiness premise `1 <= l <= i + i' - 1` on the pair.
    pub fn is_admissible(&self, n: usize) -> bool {
        let (i, ip) = (self.i as i64, self.i_prime as i64);
        let (d1, d2) = (self.d1 as i64, self.d2 as i64);
        let (j1, j2) = (self.j1 as i64, self.j2 as i64);
        let n = n as i64;
        let l = d1 + d2;
        (1..=i + ip - 1).contains(&l)
            && j1 + d2 - i <= j2
            && j2 <= j1 + d2 - i + 1
            && i - 1 - d2 <= j1
            && j1 <= i - 1 - d1
            && ip - i - d1 <= j2
            && j2 <= ((ip - i + d2 - d1).div_euclid(2)).min(n - i - d2 - j1)
    }

    /// All admissible keys for the given pair data, in lexicographic order.
    pub fn admissible(
        n: usize,
        i: usize,
        i_prime: usize,
        inv: PairInvariants,
    ) -> Vec<StratumKey> {
        let mut out = Vec::new();
        for j1 in 0..=n {
            for j2 in 0..=n {
                let key = StratumKey {
                    i,
                    i_prime,
                    d1: inv.d1,
                    d2: inv.d2,
                    j1,
                    j2,
                };
                if key.is_admissible(n) {
                    out.push(key);
                }
            }
        }
        out
    }

    /// Fiber step dimension `d_{j1,j2} = j2 - j1 + 2i - 1 - d2`.
    pub fn fiber_step(&self) -> i64 {
        self.j2 as i64 - self.j1 as i64 + 2 * self.i as i64 - 1 - self.d2 as i64
    }

    /// Fiber shift length `l_{j1,j2} = i' - 1 - j2 - d1`.
    pub fn fiber_shift(&self) -> i64 {
        self.i_prime as i64 - 1 - self.j2 as i64 - self.d1 as i64
    }
}

fn build_piecewise(m: usize, image: impl Fn(i64) -> i64) -> Result<Perm, IntersectError> {
    let mut images = Vec::with_capacity(m);
    for j in 1..=m as i64 {
        let v = image(j);
        if v < 1 || v > m as i64 {
            return Err(IntersectError::InvalidStratum("image out of range"));
        }
        images.push(v as usize);
    }
    Perm::from_images(images).map_err(|_| IntersectError::InvalidStratum("not a bijection"))
}

/// The flag-level stratum permutation `w_{j1,j2}` in `S_n`.
pub fn flag_stratum_perm(
    n: usize,
    i: usize,
    d2: usize,
    j1: usize,
    j2: usize,
) -> Result<Perm, IntersectError> {
    let (ni, ii, dd2, jj1, jj2) = (n as i64, i as i64, d2 as i64, j1 as i64, j2 as i64);
    build_piecewise(n, |j| {
        let mut hits = Vec::new();
        if ii - jj1 <= j && j <= dd2 {
            hits.push(j + jj1);
        }
        if dd2 + 1 <= j && j <= dd2 + jj1 {
            hits.push(j + ii - jj1 - dd2 - 1);
        }
        if ni - jj2 - ii + 1 <= j && j <= ni - dd2 {
            hits.push(j + jj2);
        }
        if ni - dd2 + 1 <= j && j <= ni - dd2 + jj2 {
            hits.push(j + dd2 - ii - jj2);
        }
        match hits.len() {
            0 => j,
            1 => hits[0],
            // overlapping branches signal parameters outside the admissible
            // set; surfaced as a non-bijection below when images collide
            _ => hits[0],
        }
    })
}

/// The fiber-level stratum permutation `s_{j1,j2}` in `S_{2i-1}`.
pub fn fiber_stratum_perm(
    i: usize,
    i_prime: usize,
    d1: usize,
    d2: usize,
    j1: usize,
    j2: usize,
) -> Result<Perm, IntersectError> {
    let key = StratumKey {
        i,
        i_prime,
        d1,
        d2,
        j1,
        j2,
    };
    if 2 * i - 1 == 1 {
        // no fiber direction at the minuscule end
        return Ok(Perm::identity(1));
    }
    let l = key.fiber_shift();
    let d = key.fiber_step();
    let ii = i as i64;
    if l < 0 {
        return Err(IntersectError::InvalidStratum("negative fiber shift"));
    }
    build_piecewise(2 * i - 1, |j| {
        if ii - l <= j && j <= d {
            j + l
        } else if d + 1 <= j && j <= d + l {
            j + ii - 1 - d - l
        } else {
            j
        }
    })
}

/// A constructed basepoint pair with verified invariants. `Λx` is the
/// standard lattice; `Λx'` is the self-dual diagonal lattice realizing the
/// requested `(l, d1, d2)`.
pub struct PairContext {
    pub space: LatticeSpace,
    pub base_x: TLattice,
    pub base_xp: TLattice,
    pub inv: PairInvariants,
    pub e_plus_xx: TLattice,
    pub e_minus_xx: TLattice,
    /// Collapsed filtration flag of the pair in the residue of `Λx`,
    /// with the dimensions that survived collapsing.
    pub pxx_flag: Option<Flag>,
    pub divisors: Vec<i64>,
}

/// Collapse a weakly increasing chain of subspaces to a strict flag,
/// dropping zero, full and repeated members. Repeated dimensions must be
/// equal subspaces (a filtration), otherwise this errors.
pub fn collapse_chain(
    d: usize,
    spaces: &[Subspace],
) -> Result<Option<Flag>, IntersectError> {
    let mut kept: Vec<Subspace> = Vec::new();
    for s in spaces {
        if s.dim() == 0 || s.dim() == d {
            continue;
        }
        if let Some(last) = kept.last() {
            if s.dim() == last.dim() {
                if s != last {
                    return Err(IntersectError::BadParameters(
                        "chain members of equal dimension differ",
                    ));
                }
                continue;
            }
            if s.dim() < last.dim() || !s.contains(last)? {
                return Err(IntersectError::BadParameters("chain is not nested"));
            }
        }
        kept.push(s.clone());
    }
    if kept.is_empty() {
        return Ok(None);
    }
    let dims: Vec<usize> = kept.iter().map(|s| s.dim()).collect();
    let ty = FlagType::new(d, dims)?;
    Ok(Some(Flag::new(ty, kept)?))
}

impl PairContext {
    /// Build the standard pair for the requested invariants: `d1` divisor
    /// pairs `±2`, `d2 - d1` pairs `±1`, zeros elsewhere.
    pub fn standard(
        field: &Field,
        q: u32,
        n: usize,
        l: usize,
        d1: usize,
        d2: usize,
    ) -> Result<PairContext, IntersectError> {
        if d1 + d2 != l || d1 > d2 || 2 * d2 > n {
            return Err(IntersectError::BadParameters(
                "need d1 + d2 = l, d1 <= d2, 2 d2 <= n",
            ));
        }
        let window = if d1 > 0 { 4 } else { 3 };
        let space = LatticeSpace::new(field, q, n, window);
        let mut divisors = vec![0i64; n];
        for k in 0..d1 {
            divisors[k] = -2;
            divisors[n - 1 - k] = 2;
        }
        for k in 0..(d2 - d1) {
            divisors[d1 + k] = -1;
            divisors[n - 1 - d1 - k] = 1;
        }
        let base_x = space.std_lattice();
        let base_xp = space.from_divisors(&divisors);
        debug_assert_eq!(base_xp.dual(), base_xp);
        Self::new(space, base_x, base_xp, divisors)
    }

    pub fn new(
        space: LatticeSpace,
        base_x: TLattice,
        base_xp: TLattice,
        divisors: Vec<i64>,
    ) -> Result<PairContext, IntersectError> {
        let inv = pair_invariants(&base_x, &base_xp)?;
        let e_plus_xx = exx_plus(&base_x, &base_xp)?;
        let e_minus_xx = exx_minus(&base_x, &base_xp)?;

        // residue filtration: tΛx ⊂ t²Λx' + tΛx ⊂ (Λx ∩ tΛx') + tΛx
        //                     ⊂ (Λx ∩ Λx') + tΛx ⊂ Λx
        let chart = base_x.residue_chart()?;
        let t_x = base_x.shift(1)?;
        // t²Λx' may escape the window alone; its sum with tΛx is exact
        let m1 = base_xp.shift_clipped(2)?.sum(&t_x)?;
        let m2 = base_x.intersect(&base_xp.shift_clipped(1)?)?.sum(&t_x)?;
        let m3 = base_x.intersect(&base_xp)?.sum(&t_x)?;
        let s1 = chart.project_subspace(m1.body())?;
        let s2 = chart.project_subspace(m2.body())?;
        let s3 = chart.project_subspace(m3.body())?;
        debug_assert_eq!(s1.dim(), inv.d1);
        debug_assert_eq!(s2.dim(), inv.d2);
        let pxx_flag = collapse_chain(space.rank(), &[s1, s2, s3])?;

        Ok(PairContext {
            space,
            base_x,
            base_xp,
            inv,
            e_plus_xx,
            e_minus_xx,
            pxx_flag,
            divisors,
        })
    }

    /// Membership in the linear subspace `P_{x,x',+}` of the colength-one
    /// moduli: `t E⁺_{x,x'} ⊆ E`.
    pub fn in_p_plus(&self, e: &TLattice) -> Result<bool, IntersectError> {
        Ok(e.contains(&self.e_plus_xx.shift(1)?)?)
    }

    /// Membership in `P_{x,x',-}`: `E⁻_{x,x'} ⊆ E`.
    pub fn in_p_minus(&self, e: &TLattice) -> Result<bool, IntersectError> {
        Ok(e.contains(&self.e_minus_xx)?)
    }
}

/// One point of an open intersection with its stratum assignment.
#[derive(Clone, Debug)]
pub struct IntersectionPoint {
    pub e: TLattice,
    pub envelope: YPoint,
    pub key: StratumKey,
}

/// The brute-force open intersection of the component for `i` at `Λx` with
/// the component for `i'` at `Λx'`.
#[derive(Debug)]
pub struct OpenIntersection {
    pub i: usize,
    pub i_prime: usize,
    pub inv: PairInvariants,
    pub points: Vec<IntersectionPoint>,
    pub by_stratum: BTreeMap<(usize, usize), Vec<usize>>,
    pub x_side_total: usize,
}

/// Enumerate the open-stratum points of the component family `i` at `base`,
/// as lattice/envelope pairs. For `i = 1` the minuscule component is its
/// own open stratum and carries the degenerate envelope `(Λx, E)`.
pub fn open_points(
    base: &TLattice,
    i: usize,
    budget: &Budget,
) -> Result<Vec<ComponentPoint>, IntersectError> {
    if i == 1 {
        let pts = components::enumerate_component(ComponentKind::Hypersurface, base, budget)?;
        Ok(pts
            .into_iter()
            .map(|p| ComponentPoint {
                envelope: Some(YPoint {
                    e_plus: base.clone(),
                    e_minus: p.e.clone(),
                }),
                e: p.e,
            })
            .collect())
    } else {
        Ok(components::enumerate_component(
            ComponentKind::OpenStratum { i },
            base,
            budget,
        )?)
    }
}

/// Test whether `e` lies in the open stratum of the component family `i`
/// at `base` (used for the second basepoint of an intersection).
pub fn in_open_rel(e: &TLattice, base: &TLattice, i: usize) -> Result<bool, IntersectError> {
    let n = base.space().rank();
    if i == 1 {
        return Ok(components::in_hypersurface_component(e, base)?);
    }
    let inv = e.inv_pos(base)?;
    if inv.gl() != components::bundle_bound(n, i).gl() {
        return Ok(false);
    }
    let y = YPoint {
        e_plus: e.sum(base)?,
        e_minus: e.intersect(base)?,
    };
    if !components::in_bundle_base(&y, base, i)? {
        return Ok(false);
    }
    Ok(components::in_open_stratum(e, &y, base, i)?)
}

pub fn open_intersection(
    ctx: &PairContext,
    i: usize,
    i_prime: usize,
    budget: &Budget,
) -> Result<OpenIntersection, IntersectError> {
    if i > i_prime {
        return Err(IntersectError::BadParameters("need i <= i'"));
    }
    if ctx.base_x == ctx.base_xp {
        return Err(IntersectError::BadParameters(
            "open_intersection needs distinct basepoints",
        ));
    }
    let n = ctx.space.rank();
    let x_side = open_points(&ctx.base_x, i, budget)?;
    let x_side_total = x_side.len();
    let mut points = Vec::new();
    let mut by_stratum: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();

    for p in x_side {
        if !in_open_rel(&p.e, &ctx.base_xp, i_prime)? {
            continue;
        }
        let envelope = p.envelope.clone().expect("open points carry envelopes");
        // stratum lengths
        let j1 = envelope.e_plus.sum(&ctx.e_plus_xx)?.body().dim() - ctx.e_plus_xx.body().dim();
        let j2 = envelope.e_minus.sum(&ctx.e_minus_xx)?.body().dim()
            - ctx.e_minus_xx.body().dim();
        let key = StratumKey {
            i,
            i_prime,
            d1: ctx.inv.d1,
            d2: ctx.inv.d2,
            j1,
            j2,
        };
        if !key.is_admissible(n) {
            return Err(IntersectError::Falsified(format!(
                "intersection point with inadmissible stratum key {key:?}"
            )));
        }
        // the two displayed length identities
        let epm = e_plusminus(&envelope.e_plus, &envelope.e_minus, &ctx.base_xp)?;
        let len_e = p.e.sum(&epm)?.body().dim() - epm.body().dim();
        if len_e + j2 != i_prime - 1 - ctx.inv.d1 {
            return Err(IntersectError::Falsified(format!(
                "length identity failed: {len_e} + {j2} != {} - 1 - {}",
                i_prime, ctx.inv.d1
            )));
        }
        let idx = points.len();
        by_stratum.entry((j1, j2)).or_default().push(idx);
        points.push(IntersectionPoint {
            e: p.e,
            envelope,
            key,
        });
    }

    if !points.is_empty() {
        let l = ctx.inv.l;
        if l < 1 || l > i + i_prime - 1 {
            return Err(IntersectError::Falsified(format!(
                "nonempty intersection with l = {l} outside [1, {}]",
                i + i_prime - 1
            )));
        }
    }
    Ok(OpenIntersection {
        i,
        i_prime,
        inv: ctx.inv,
        points,
        by_stratum,
        x_side_total,
    })
}

/// The flag of an open point in the residue of `Λx`:
/// `(t E₊ / tΛx ⊂ E₋ / tΛx)`, collapsed for the minuscule end.
pub fn point_residue_flag(
    ctx: &PairContext,
    envelope: &YPoint,
) -> Result<Option<Flag>, IntersectError> {
    let chart = ctx.base_x.residue_chart()?;
    let small = chart.project_subspace(envelope.e_plus.shift(1)?.body())?;
    let big = chart.project_subspace(envelope.e_minus.body())?;
    collapse_chain(ctx.space.rank(), &[small, big])
}

/// Relative position of an open point's residue flag against the pair
/// filtration flag, or `None` when either side is trivial.
pub fn point_flag_position(
    ctx: &PairContext,
    amb: &GuAmbient,
    envelope: &YPoint,
) -> Result<Option<RelPos>, IntersectError> {
    let pf = point_residue_flag(ctx, envelope)?;
    match (&pf, &ctx.pxx_flag) {
        (Some(f), Some(g)) => Ok(Some(amb.relpos(f, g)?)),
        _ => Ok(None),
    }
}

/// The expected flag position of a stratum: the coset of `w_{j1,j2}` for the
/// collapsed type pair, or `None` when either side is trivial.
pub fn stratum_flag_position(
    ctx: &PairContext,
    amb: &GuAmbient,
    key: &StratumKey,
) -> Result<Option<RelPos>, IntersectError> {
    let n = ctx.space.rank();
    let w = flag_stratum_perm(n, key.i, key.d2, key.j1, key.j2)?;
    let point_dims: Vec<usize> = [key.i - 1, n - key.i]
        .into_iter()
        .filter(|&d| d >= 1 && d <= n - 1)
        .collect();
    let pxx = match &ctx.pxx_flag {
        Some(f) => f.ty().clone(),
        None => return Ok(None),
    };
    if point_dims.is_empty() {
        return Ok(None);
    }
    let left = FlagType::new(n, point_dims)?;
    Ok(Some(amb.relpos_of_perm(&left, &pxx, &w)))
}

/// Fiber data of an open point: the chart subspaces of `E` and `E_{+,-}`.
pub struct FiberPosition {
    pub w: Subspace,
    pub step: Subspace,
}

pub fn fiber_position(
    ctx: &PairContext,
    point: &TLattice,
    envelope: &YPoint,
    i: usize,
) -> Result<FiberPosition, IntersectError> {
    let chart = FiberChart::new(&ctx.base_x, envelope, i)?;
    let epm = e_plusminus(&envelope.e_plus, &envelope.e_minus, &ctx.base_xp)?;
    Ok(FiberPosition {
        w: chart.project(point)?,
        step: chart.project(&epm)?,
    })
}

/// Check one point against the full relative-position description of a
/// stratum: residue-flag position `[w_{j1,j2}]` and fiber position
/// `[s_{j1,j2}]` of `W` against the step flag of `E_{+,-}`.
pub fn matches_stratum_description(
    ctx: &PairContext,
    point: &TLattice,
    envelope: &YPoint,
    key: &StratumKey,
) -> Result<bool, IntersectError> {
    let n = ctx.space.rank();
    let field = ctx.space.field().clone();
    let q = ctx.space.q();
    let amb = GuAmbient::new(&field, q, n);

    let actual = point_flag_position(ctx, &amb, envelope)?;
    let expected = stratum_flag_position(ctx, &amb, key)?;
    match (&actual, &expected) {
        (Some(a), Some(b)) => {
            if a != b {
                return Ok(false);
            }
        }
        (None, None) => {}
        _ => return Ok(false),
    }

    if key.i == 1 {
        // no fiber direction at the minuscule end
        return Ok(true);
    }
    let fiber = fiber_position(ctx, point, envelope, key.i)?;
    let d = key.fiber_step();
    if d < 0 || fiber.step.dim() as i64 != d {
        return Ok(false);
    }
    let m = 2 * key.i - 1;
    let s = fiber_stratum_perm(key.i, key.i_prime, key.d1, key.d2, key.j1, key.j2)?;
    let fiber_amb = GuAmbient::new(&field, q, m);
    // collapse degenerate step flags: no condition remains
    let step_flag = collapse_chain(m, &[fiber.step.clone()])?;
    let w_flag = collapse_chain(m, &[fiber.w.clone()])?;
    match (step_flag, w_flag) {
        (Some(sf), Some(wf)) => {
            let actual = fiber_amb.relpos(&sf, &wf)?;
            let expected = fiber_amb.relpos_of_perm(sf.ty(), wf.ty(), &s);
            Ok(actual == expected)
        }
        _ => Ok(true),
    }
}

/// Projective points (lines) of `F^n` satisfying both twisted equations
/// `Σ x_a x_{n+1-a}^q = 0` and `Σ x_a x_{n+1-a}^{q³} = 0`, in enumeration
/// order.
pub fn double_fermat_locus(
    field: &Field,
    q: u32,
    n: usize,
    budget: &Budget,
) -> Result<Vec<Subspace>, IntersectError> {
    let s = crate::linalg::q_steps(field, q);
    let m = field.degree();
    let mut out = Vec::new();
    for line in enumerate_subspaces(field, n, 1, budget)? {
        let x = &line.rows()[0];
        let mut acc1 = 0u32;
        let mut acc3 = 0u32;
        for a in 0..n {
            let rev = x[n - 1 - a];
            acc1 = field.add(acc1, field.mul(x[a], field.frob_p(rev, s)));
            acc3 = field.add(acc3, field.mul(x[a], field.frob_p(rev, (3 * s) % m)));
        }
        if acc1 == 0 && acc3 == 0 {
            out.push(line);
        }
    }
    Ok(out)
}

/// Projective points of the diagonalized two-equation locus
/// `Σ x_a^{q+1} = 0`, `Σ x_a^{q³+1} = 0`.
pub fn diagonal_fermat_locus(
    field: &Field,
    q: u32,
    n: usize,
    budget: &Budget,
) -> Result<Vec<Subspace>, IntersectError> {
    let s = crate::linalg::q_steps(field, q);
    let m = field.degree();
    let mut out = Vec::new();
    for line in enumerate_subspaces(field, n, 1, budget)? {
        let x = &line.rows()[0];
        let mut acc1 = 0u32;
        let mut acc3 = 0u32;
        for &v in x.iter() {
            acc1 = field.add(acc1, field.mul(v, field.frob_p(v, s)));
            acc3 = field.add(acc3, field.mul(v, field.frob_p(v, (3 * s) % m)));
        }
        if acc1 == 0 && acc3 == 0 {
            out.push(line);
        }
    }
    Ok(out)
}

/// An invertible change of basis over `F_{q²}` taking the anti-diagonal
/// hermitian form `Σ x_a^q y_{n+1-a}` to the identity Gram matrix, found by
/// constructive Gram-Schmidt. Rows of the returned matrix are the new basis
/// vectors `u_a`, so `h(u_a, u_b) = δ_{ab}`.
pub fn hermitian_diagonalize(
    field: &Field,
    q: u32,
    n: usize,
) -> Result<Vec<Vec<u32>>, IntersectError> {
    let s = crate::linalg::q_steps(field, q);
    let h = |x: &[u32], y: &[u32]| -> u32 {
        let mut acc = 0u32;
        for a in 0..n {
            acc = field.add(acc, field.mul(field.frob_p(x[a], s), y[n - 1 - a]));
        }
        acc
    };
    // iterate over vectors of a subspace in a deterministic odometer order
    fn vectors_of(field: &Field, space: &Subspace) -> Vec<Vec<u32>> {
        let k = space.dim();
        let n = space.ambient();
        let order = field.order() as u64;
        let mut out = Vec::new();
        let total = order.pow(k as u32);
        for mut idx in 1..total {
            let mut v = vec![0u32; n];
            for row in space.rows() {
                let c = (idx % order) as u32;
                idx /= order;
                if c != 0 {
                    for j in 0..n {
                        v[j] = field.add(v[j], field.mul(c, row[j]));
                    }
                }
            }
            out.push(v);
        }
        out
    }

    let mut remaining = Subspace::full(field, n);
    let mut basis: Vec<Vec<u32>> = Vec::new();
    for _ in 0..n {
        let v = vectors_of(field, &remaining)
            .into_iter()
            .find(|v| h(v, v) != 0)
            .ok_or(IntersectError::BadParameters(
                "no anisotropic vector found (degenerate form?)",
            ))?;
        // normalize: h(αv, αv) = α^{q+1} h(v,v); the norm is onto F_q
        let target = field.inv(h(&v, &v));
        let alpha = field
            .elements()
            .find(|&a| a != 0 && field.mul(field.frob_p(a, s), a) == target)
            .expect("norm map is surjective");
        let u: Vec<u32> = v.iter().map(|&c| field.mul(alpha, c)).collect();
        debug_assert_eq!(h(&u, &u), 1);
        // orthogonal complement of u inside the remaining space
        let eqs: Vec<Vec<u32>> = vec![{
            let mut eq = vec![0u32; n];
            for a in 0..n {
                eq[n - 1 - a] = field.frob_p(u[a], s);
            }
            eq
        }];
        let perp = Subspace::span(field, n, eqs).annihilator();
        remaining = remaining.intersect(&perp)?;
        basis.push(u);
    }
    for (a, ua) in basis.iter().enumerate() {
        for (b, ub) in basis.iter().enumerate() {
            debug_assert_eq!(h(ua, ub), u32::from(a == b));
        }
    }
    Ok(basis)
}

/// Search for a nondegenerate hermitian Gram matrix whose projective zero
/// locus is exactly `points` inside `P(F^dim)`: solve the linear system for
/// sesquilinear forms vanishing on the points, then scan the solution space
/// for a hermitian, nondegenerate representative with the exact locus.
pub fn fit_hermitian_form(
    field: &Field,
    q: u32,
    dim: usize,
    points: &[Vec<u32>],
    budget: &Budget,
) -> Result<Option<Vec<Vec<u32>>>, IntersectError> {
    let s = crate::linalg::q_steps(field, q);
    let eqs: Vec<Vec<u32>> = points
        .iter()
        .map(|x| {
            let mut row = vec![0u32; dim * dim];
            for a in 0..dim {
                for b in 0..dim {
                    row[a * dim + b] = field.mul(x[a], field.frob_p(x[b], s));
                }
            }
            row
        })
        .collect();
    let solutions = Subspace::span(field, dim * dim, eqs).annihilator();
    if solutions.dim() == 0 || solutions.dim() > 6 {
        return Ok(None);
    }
    // scan the (small) solution space
    let order = field.order() as u64;
    let total = order.pow(solutions.dim() as u32);
    'combo: for mut idx in 1..total {
        let mut g = vec![0u32; dim * dim];
        for row in solutions.rows() {
            let c = (idx % order) as u32;
            idx /= order;
            if c != 0 {
                for j in 0..dim * dim {
                    g[j] = field.add(g[j], field.mul(c, row[j]));
                }
            }
        }
        // hermitian: G[b][a] = G[a][b]^q
        for a in 0..dim {
            for b in 0..dim {
                if g[b * dim + a] != field.frob_p(g[a * dim + b], s) {
                    continue 'combo;
                }
            }
        }
        // nondegenerate
        let rows: Vec<Vec<u32>> = (0..dim).map(|a| g[a * dim..(a + 1) * dim].to_vec()).collect();
        if Subspace::span(field, dim, rows).dim() != dim {
            continue;
        }
        // exact zero locus
        let mut count = 0usize;
        for line in enumerate_subspaces(field, dim, 1, budget)? {
            let x = &line.rows()[0];
            let mut acc = 0u32;
            for a in 0..dim {
                for b in 0..dim {
                    acc = field.add(
                        acc,
                        field.mul(field.mul(x[a], g[a * dim + b]), field.frob_p(x[b], s)),
                    );
                }
            }
            if acc == 0 {
                count += 1;
                if !points.iter().any(|p| p == x) {
                    continue 'combo;
                }
            }
        }
        if count == points.len() {
            let gm: Vec<Vec<u32>> = (0..dim)
                .map(|a| g[a * dim..(a + 1) * dim].to_vec())
                .collect();
            return Ok(Some(gm));
        }
    }
    Ok(None)
}

/// Result of the shared-basepoint intersection analysis for the bundle
/// component `i` against the component `i - s`.
#[derive(Debug)]
pub struct SameBasepointReport {
    pub i: usize,
    pub s: usize,
    /// Bundle points whose lattice lies in the smaller component.
    pub over_smaller: Vec<ComponentPoint>,
    /// Bundle points with `F^{-1}(E₊^∨) = E`.
    pub closed_locus: Vec<ComponentPoint>,
    /// `F^{-1}(E₊^∨) ⊆ E` points (the containment the paper proves for all
    /// `i`); for `i = 2` equality with `over_smaller` is asserted upstream.
    pub contained_locus: Vec<ComponentPoint>,
    pub equality: bool,
}

pub fn same_basepoint_intersection(
    base: &TLattice,
    i: usize,
    s: usize,
    budget: &Budget,
) -> Result<SameBasepointReport, IntersectError> {
    let n = base.space().rank();
    if s == 0 || s >= i {
        return Err(IntersectError::BadParameters("need 1 <= i - s < i"));
    }
    components::check_bundle_index(n, i)?;
    let pts = components::enumerate_component(ComponentKind::Bundle { i }, base, budget)?;
    // lattice-level point set of the smaller component
    let small_kind = if i - s == 1 {
        ComponentKind::Hypersurface
    } else {
        ComponentKind::Bundle { i: i - s }
    };
    let small: std::collections::BTreeSet<TLattice> =
        components::enumerate_component(small_kind, base, budget)?
            .into_iter()
            .map(|p| p.e)
            .collect();

    let mut over_smaller = Vec::new();
    let mut closed_locus = Vec::new();
    let mut contained_locus = Vec::new();
    for p in pts {
        let env = p.envelope.as_ref().expect("bundle points carry envelopes");
        let pre = env.e_plus.dual().frob(-1);
        if small.contains(&p.e) {
            over_smaller.push(p.clone());
        }
        if pre == p.e {
            closed_locus.push(p.clone());
        }
        if p.e.contains(&pre)? {
            contained_locus.push(p.clone());
        }
    }
    let eq_sets = |a: &[ComponentPoint], b: &[ComponentPoint]| {
        let sa: std::collections::BTreeSet<_> = a.iter().map(|p| (&p.e, &p.envelope)).collect();
        let sb: std::collections::BTreeSet<_> = b.iter().map(|p| (&p.e, &p.envelope)).collect();
        sa == sb
    };
    let equality = eq_sets(&over_smaller, &closed_locus);
    Ok(SameBasepointReport {
        i,
        s,
        over_smaller,
        closed_locus,
        contained_locus,
        equality,
    })
}

/// The isotropic-pair intersection for even rank: the subquotient model
/// `{ H ∈ Gr(r-1-l, t^{-1}(Λx ∩ Λx')/(Λx + Λx')) : H ⊆ Frob(H^⊥) }`
/// together with the lattice-level description, and the bijection between
/// them.
#[derive(Debug)]
pub struct IsotropicIntersection {
    pub l: usize,
    pub lattice_points: Vec<TLattice>,
    pub model_points: Vec<Subspace>,
    pub bijection_ok: bool,
}

pub fn isotropic_intersection(
    ctx: &PairContext,
    budget: &Budget,
) -> Result<IsotropicIntersection, IntersectError> {
    let n = ctx.space.rank();
    if n % 2 != 0 {
        return Err(IntersectError::BadParameters("isotropic pairs need even n"));
    }
    let r = n / 2;
    // necessary condition from the pair: tΛx ⊆ Λx'
    if !ctx.base_xp.contains(&ctx.base_x.shift(1)?)? {
        return Err(IntersectError::BadParameters("pair must satisfy tΛx ⊆ Λx'"));
    }
    let l = ctx.inv.l;
    if l < 1 || l + 1 > r {
        return Err(IntersectError::BadParameters("need 1 <= l <= r - 1"));
    }

    // lattice-level: isotropic-component points for both basepoints
    let bound = components::isotropic_bound(n);
    let mut lattice_points = Vec::new();
    for e in crate::lattice::enumerate_bounded(&ctx.base_x, &bound, budget)? {
        if !components::in_isotropic_component(&e, &ctx.base_x)? {
            continue;
        }
        let inv = e.inv_pos(&ctx.base_xp)?;
        if inv.gl() != bound.gl() {
            continue;
        }
        lattice_points.push(e);
    }

    // subquotient model: Q = t^{-1}(Λx ∩ Λx')/(Λx + Λx') with the residue
    // of the scaled form and the coefficient Frobenius
    let inter = ctx.base_x.intersect(&ctx.base_xp)?;
    let sum = ctx.base_x.sum(&ctx.base_xp)?;
    let up = inter.shift(-1)?;
    let q_chart = SubQuotient::new(up.body(), sum.body())?;
    let m = q_chart.dim();
    debug_assert_eq!(m, n - 2 * l);
    let field = ctx.space.field().clone();
    let wp = crate::linalg::Pairing::bilinear(ctx.space.window_dim());
    // Gram matrix of the residue pairing (u, v) ↦ [t <u,v>] on the chart
    let gram: Vec<Vec<u32>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| {
                    let ua = &q_chart.lifts()[a];
                    let vb = &q_chart.lifts()[b];
                    // coefficient of t^{-2} in <u,v> = window pairing of (t·u, v)
                    let tu = shift_window_vec(&ctx.space, ua, 1);
                    wp.eval(&field, &tu, vb)
                })
                .collect()
        })
        .collect();
    let dim_h = r - 1 - l;
    let s_steps = crate::linalg::q_steps(&field, ctx.space.q());
    let mut model_points = Vec::new();
    for h in enumerate_subspaces(&field, m, dim_h, budget)? {
        // H^⊥ for the residue bilinear form
        let eqs: Vec<Vec<u32>> = h
            .rows()
            .iter()
            .map(|x| {
                (0..m)
                    .map(|b| {
                        let mut acc = 0u32;
                        for a in 0..m {
                            acc = field.add(acc, field.mul(x[a], gram[a][b]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let perp = Subspace::span(&field, m, eqs).annihilator();
        let frob_perp = perp.frob_p(s_steps);
        if frob_perp.contains(&h)? {
            model_points.push(h);
        }
    }

    // bijection: E ↦ E/(Λx + Λx')
    let mut images: Vec<Subspace> = Vec::new();
    for e in &lattice_points {
        images.push(q_chart.project_subspace(e.body())?);
    }
    images.sort();
    images.dedup();
    let mut model_sorted = model_points.clone();
    model_sorted.sort();
    let bijection_ok = images.len() == lattice_points.len() && images == model_sorted;

    Ok(IsotropicIntersection {
        l,
        lattice_points,
        model_points,
        bijection_ok,
    })
}

fn shift_window_vec(space: &LatticeSpace, v: &[u32], k: i64) -> Vec<u32> {
    let n = space.rank();
    let w = space.window();
    let mut out = vec![0u32; space.window_dim()];
    for j in -w..w {
        let jj = j + k;
        if !(-w..w).contains(&jj) {
            continue;
        }
        for i in 0..n {
            let val = v[space.flat(j, i)];
            if val != 0 {
                out[space.flat(jj, i)] = val;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_perm_examples() {
        // n=6, i=2, d2=1, j1=0, j2=0: identity
        let w = flag_stratum_perm(6, 2, 1, 0, 0).unwrap();
        assert!(w.is_identity());
        // n=6, i=2, d2=1, j1=0, j2=1: the 3-cycle (4 5 6)
        let w = flag_stratum_perm(6, 2, 1, 0, 1).unwrap();
        assert_eq!(w.one_line(), &[1, 2, 3, 5, 6, 4]);
        // zero shifts are always the identity
        for (n, i, d2) in [(6usize, 2usize, 2usize), (8, 3, 1), (7, 2, 3)] {
            let w = flag_stratum_perm(n, i, d2, 0, 0).unwrap();
            assert!(w.is_identity());
        }
    }

    #[test]
    fn fiber_perm_examples() {
        // i=i'=2, d1=0, d2=1, j1=j2=0: l=1, d=2, the 3-cycle (1 2 3)
        let s = fiber_stratum_perm(2, 2, 0, 1, 0, 0).unwrap();
        assert_eq!(s.one_line(), &[2, 3, 1]);
        // zero shift: identity
        let s = fiber_stratum_perm(2, 2, 0, 1, 0, 1).unwrap();
        assert!(s.is_identity());
    }

    #[test]
    fn perm_bijectivity_sweep() {
        // every admissible parameter tuple gives bijections, n <= 8
        for n in 4..=8usize {
            for i in 1..=(n - 1) / 2 {
                for ip in i..=(n - 1) / 2 {
                    for d1 in 0..=n {
                        for d2 in d1..=n {
                            if d1 + d2 == 0 || 2 * d2 > n {
                                continue;
                            }
                            let inv = PairInvariants {
                                l: d1 + d2,
                                d1,
                                d2,
                            };
                            for key in StratumKey::admissible(n, i, ip, inv) {
                                flag_stratum_perm(n, i, d2, key.j1, key.j2).unwrap();
                                fiber_stratum_perm(i, ip, d1, d2, key.j1, key.j2).unwrap();
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn standard_pairs_have_requested_invariants() {
        let f4 = Field::new(2, 2).unwrap();
        for (l, d1, d2) in [(1, 0, 1), (2, 0, 2), (3, 0, 3), (2, 1, 1), (3, 1, 2)] {
            let ctx = PairContext::standard(&f4, 2, 6, l, d1, d2).unwrap();
            assert_eq!(ctx.inv, PairInvariants { l, d1, d2 });
            assert_eq!(ctx.base_xp.dual(), ctx.base_xp);
        }
    }

    #[test]
    fn remark_case_has_no_keys() {
        // (d1, d2) = (1, 1) for i=1, i'=2: no admissible j2
        let inv = PairInvariants { l: 2, d1: 1, d2: 1 };
        assert!(StratumKey::admissible(6, 1, 2, inv).is_empty());
    }
}
