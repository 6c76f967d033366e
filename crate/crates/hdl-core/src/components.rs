//! Membership predicates and enumerators for the irreducible components of
//! the basic unitary affine Deligne-Lusztig variety at a hyperspecial
//! basepoint `Λx`.
//!
//! The two minuscule ends have direct lattice descriptions: the
//! *hypersurface* component (colength-one sublattices `E ⊆ Λx` with
//! `tΦ(E) ⊆ E`, a hermitian hypersurface in the dual residue coordinates)
//! and, for even rank, the *isotropic* component (`E ⊇ Λx` of length `r-1`
//! inside `t^{-1}Λx` with `tE ⊆ Φ(E)`). The middle components are carried by
//! a flag bundle: a base locus of lattice pairs `(E₊, E₋)` and, over each
//! base point, rank-`(i-1)` subspaces `W` of the `(2i-1)`-dimensional fiber
//! `E₊/E₋` cut out by the orthogonality condition `φ₁(W) ⊆ F(W^⊥)`.

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::ff::Field;
use crate::flags::{Flag, FlagType, FlagsError};
use crate::lattice::{Cochar, LatticeError, LatticeSpace, TLattice};
use crate::linalg::{enumerate_subspaces, LinalgError, SubQuotient, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComponentError {
    #[error("bundle index i = {i} out of range 2..=(n-1)/2 for n = {n}")]
    BadIndex { i: usize, n: usize },
    #[error("the isotropic component requires even rank, got n = {0}")]
    OddRank(usize),
    #[error("fiber subspace has the wrong dimension")]
    FiberDim,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Flags(#[from] FlagsError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Bound for the hypersurface component: colength one below the basepoint.
pub fn hypersurface_bound(n: usize) -> Cochar {
    let mut gl = vec![0i64; n];
    gl[0] = 1;
    Cochar::from_gl(gl)
}

/// Bound for the isotropic component (`n` even, `r = n/2`): length `r-1`
/// above the basepoint, inside `t^{-1}Λx`.
pub fn isotropic_bound(n: usize) -> Cochar {
    let r = n / 2;
    let mut gl = vec![0i64; n];
    for a in gl.iter_mut().skip(n - (r - 1)) {
        *a = -1;
    }
    Cochar::from_gl(gl)
}

/// Bound for the middle component with index `i`.
pub fn bundle_bound(n: usize, i: usize) -> Cochar {
    let mut gl = vec![0i64; n];
    for a in gl.iter_mut().take(i) {
        *a = 1;
    }
    for a in gl.iter_mut().skip(n - (i - 1)) {
        *a = -1;
    }
    Cochar::from_gl(gl)
}

/// Bound for the upper envelope `E₊` of a bundle point.
pub fn bundle_upper_bound(n: usize, i: usize) -> Cochar {
    let mut gl = vec![0i64; n];
    for a in gl.iter_mut().skip(n - (i - 1)) {
        *a = -1;
    }
    Cochar::from_gl(gl)
}

/// Bound for the lower envelope `E₋` of a bundle point.
pub fn bundle_lower_bound(n: usize, i: usize) -> Cochar {
    let mut gl = vec![0i64; n];
    for a in gl.iter_mut().take(i) {
        *a = 1;
    }
    Cochar::from_gl(gl)
}

fn check_basepoint(base: &TLattice) {
    debug_assert_eq!(
        &base.dual(),
        base,
        "component basepoints must be self-dual lattices"
    );
}

/// `E` is a point of the hypersurface component at `base`:
/// `inv(E, base)` is the colength-one bound and `tΦ(E) ⊆ E`.
/// A total mismatch is "not a point", not an error.
pub fn in_hypersurface_component(e: &TLattice, base: &TLattice) -> Result<bool, ComponentError> {
    check_basepoint(base);
    let n = base.space().rank();
    let inv = e.inv_pos(base)?;
    if inv.gl() != hypersurface_bound(n).gl() {
        return Ok(false);
    }
    let t_phi = e.gu_phi().shift(1)?;
    Ok(e.contains(&t_phi)?)
}

/// `E` is a point of the isotropic component at `base` (`n` even):
/// `inv(E, base)` is the isotropic bound and `tE ⊆ Φ(E)`.
pub fn in_isotropic_component(e: &TLattice, base: &TLattice) -> Result<bool, ComponentError> {
    check_basepoint(base);
    let n = base.space().rank();
    if n % 2 != 0 {
        return Err(ComponentError::OddRank(n));
    }
    let inv = e.inv_pos(base)?;
    if inv.gl() != isotropic_bound(n).gl() {
        return Ok(false);
    }
    Ok(e.gu_phi().contains(&e.shift(1)?)?)
}

/// A point of the bundle base: the envelope pair.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct YPoint {
    pub e_plus: TLattice,
    pub e_minus: TLattice,
}

pub fn check_bundle_index(n: usize, i: usize) -> Result<(), ComponentError> {
    if i < 2 || 2 * i + 1 > n {
        return Err(ComponentError::BadIndex { i, n });
    }
    Ok(())
}

/// Membership in the bundle base: exact envelope bounds, the chain
/// `tE₊ ⊆ E₋`, and the three twist inclusions
/// `E₊ ⊆ Φ(E₋)`, `E₋ ⊆ Φ(E₊)`, `tΦ(E₋) ⊆ E₋`.
pub fn in_bundle_base(y: &YPoint, base: &TLattice, i: usize) -> Result<bool, ComponentError> {
    check_basepoint(base);
    let n = base.space().rank();
    check_bundle_index(n, i)?;
    let inv_p = y.e_plus.inv_pos(base)?;
    if inv_p.gl() != bundle_upper_bound(n, i).gl() {
        return Ok(false);
    }
    let inv_m = y.e_minus.inv_pos(base)?;
    if inv_m.gl() != bundle_lower_bound(n, i).gl() {
        return Ok(false);
    }
    if !y.e_minus.contains(&y.e_plus.shift(1)?)? {
        return Ok(false);
    }
    let phi_minus = y.e_minus.gu_phi();
    let phi_plus = y.e_plus.gu_phi();
    Ok(phi_minus.contains(&y.e_plus)?
        && phi_plus.contains(&y.e_minus)?
        && y.e_minus.contains(&phi_minus.shift(1)?)?)
}

/// The materialized fiber of a bundle-base point: explicit bases for
/// `E₊/E₋` (dimension `2i-1`), the twisted target `Φ(E₋)/Φ(E₊)`, and the
/// two structure maps. All lift/reduce maps are fixed once per base point,
/// so well-definedness (independence of lift) is testable.
pub struct FiberChart {
    i: usize,
    base: TLattice,
    y: YPoint,
    quo: SubQuotient,
    phi_quo: SubQuotient,
}

impl FiberChart {
    pub fn new(base: &TLattice, y: &YPoint, i: usize) -> Result<FiberChart, ComponentError> {
        if !in_bundle_base(y, base, i)? {
            return Err(ComponentError::FiberDim);
        }
        let quo = SubQuotient::new(y.e_plus.body(), y.e_minus.body())?;
        debug_assert_eq!(quo.dim(), 2 * i - 1);
        let phi_minus = y.e_minus.gu_phi();
        let phi_plus = y.e_plus.gu_phi();
        let phi_quo = SubQuotient::new(phi_minus.body(), phi_plus.body())?;
        debug_assert_eq!(phi_quo.dim(), 2 * i - 1);
        Ok(FiberChart {
            i,
            base: base.clone(),
            y: y.clone(),
            quo,
            phi_quo,
        })
    }

    pub fn fiber_dim(&self) -> usize {
        2 * self.i - 1
    }

    pub fn field(&self) -> &Field {
        self.base.space().field()
    }

    /// The lattice `E` with `E/E₋ = W`.
    pub fn lift(&self, w: &Subspace) -> Result<TLattice, ComponentError> {
        if w.ambient() != self.fiber_dim() {
            return Err(ComponentError::FiberDim);
        }
        let body = self.quo.lift_subspace(w);
        Ok(TLattice::from_body(self.base.space(), body)?)
    }

    /// Fiber coordinates of a lattice `E₋ ⊆ E ⊆ E₊`.
    pub fn project(&self, e: &TLattice) -> Result<Subspace, ComponentError> {
        Ok(self.quo.project_subspace(e.body())?)
    }

    /// `φ₁(W)`: the image of `W ⊆ E₊/E₋` in `Φ(E₋)/Φ(E₊)`.
    pub fn phi1(&self, w: &Subspace) -> Result<Subspace, ComponentError> {
        let e = self.lift(w)?;
        Ok(self.phi_quo.project_subspace(e.body())?)
    }

    /// The twisted annihilator `F(W^⊥) ⊆ Φ(E₋)/Φ(E₊)`: the image of
    /// `Φ(E_W)` (whose chart class depends only on `W`).
    pub fn twisted_annihilator(&self, w: &Subspace) -> Result<Subspace, ComponentError> {
        let e = self.lift(w)?;
        Ok(self.phi_quo.project_subspace(e.gu_phi().body())?)
    }

    /// `φ₂(F(tW^⊥))`: the image of `tΦ(E_W)` in `E₊/E₋`.
    pub fn phi2_image(&self, w: &Subspace) -> Result<Subspace, ComponentError> {
        let e = self.lift(w)?;
        let t_phi = e.gu_phi().shift(1)?;
        Ok(self.quo.project_subspace(t_phi.body())?)
    }

    /// The orthogonality condition cutting the bundle component out of the
    /// flag bundle: `φ₁(W) ⊆ F(W^⊥)`.
    pub fn orthogonality(&self, w: &Subspace) -> Result<bool, ComponentError> {
        Ok(self
            .twisted_annihilator(w)?
            .contains(&self.phi1(w)?)?)
    }

    /// The second (redundant) condition: `φ₂(F(tW^⊥)) ⊆ W`.
    pub fn second_condition(&self, w: &Subspace) -> Result<bool, ComponentError> {
        Ok(w.contains(&self.phi2_image(w)?)?)
    }
}

/// Membership in the bundle component `X_i`: a bundle-base point together
/// with a fiber subspace of rank `i-1` satisfying the orthogonality
/// condition. `e` must lie between the envelopes with the right fiber rank.
pub fn in_bundle_component(
    e: &TLattice,
    y: &YPoint,
    base: &TLattice,
    i: usize,
) -> Result<bool, ComponentError> {
    let n = base.space().rank();
    check_bundle_index(n, i)?;
    if !in_bundle_base(y, base, i)? {
        return Ok(false);
    }
    let chart = FiberChart::new(base, y, i)?;
    let w = chart.project(e)?;
    if w.dim() != i - 1 {
        return Err(ComponentError::FiberDim);
    }
    chart.orthogonality(&w)
}

/// Membership in the open stratum: `E ⊆ Φ(E)` and `E ∩ Λx = E₋`.
pub fn in_open_stratum(
    e: &TLattice,
    y: &YPoint,
    base: &TLattice,
    i: usize,
) -> Result<bool, ComponentError> {
    let n = base.space().rank();
    check_bundle_index(n, i)?;
    if !in_bundle_base(y, base, i)? {
        return Ok(false);
    }
    let w_dim = SubQuotient::new(y.e_plus.body(), y.e_minus.body())?
        .project_subspace(e.body())?
        .dim();
    if w_dim != i - 1 || !y.e_plus.contains(e)? || !e.contains(&y.e_minus)? {
        return Err(ComponentError::FiberDim);
    }
    Ok(e.gu_phi().contains(e)? && e.intersect(base)? == y.e_minus)
}

/// All bundle-base points at `base`, in deterministic order: enumerate the
/// residue flags `(t E₊/tΛx ⊂ E₋/tΛx)` filtered by the twist inclusions.
pub fn enumerate_bundle_base(
    base: &TLattice,
    i: usize,
    budget: &Budget,
) -> Result<Vec<YPoint>, ComponentError> {
    check_basepoint(base);
    let n = base.space().rank();
    check_bundle_index(n, i)?;
    let field = base.space().field().clone();
    let chart = base.residue_chart()?;
    let t_base = base.shift(1)?;

    let mut out = Vec::new();
    for small in enumerate_subspaces(&field, n, i - 1, budget)? {
        // E₊ = t^{-1} M where M reduces to the small residue subspace
        let m = TLattice::from_body(
            base.space(),
            chart.lift_subspace(&small).sum(t_base.body())?,
        )?;
        let e_plus = match m.shift(-1) {
            Ok(l) => l,
            Err(LatticeError::WindowOverflow(_)) => {
                return Err(ComponentError::Lattice(LatticeError::WindowOverflow(
                    "bundle base enumeration",
                )))
            }
            Err(e) => return Err(e.into()),
        };
        let phi_plus = e_plus.gu_phi();
        // E₋ must contain t E₊ = M and sit inside Φ(E₊) ∩ Λx
        let v = chart.project_subspace(&phi_plus.intersect(base)?.body().clone())?;
        if !v.contains(&small)? {
            continue;
        }
        let inner = SubQuotient::new(&v, &small)?;
        let want = (n - i) - (i - 1);
        if inner.dim() < want {
            continue;
        }
        for s_rel in enumerate_subspaces(&field, inner.dim(), want, budget)? {
            budget.charge(1)?;
            let s = inner.lift_subspace(&s_rel);
            let e_minus = TLattice::from_body(
                base.space(),
                chart.lift_subspace(&s).sum(t_base.body())?,
            )?;
            let y = YPoint {
                e_plus: e_plus.clone(),
                e_minus,
            };
            // remaining conditions: E₊ ⊆ Φ(E₋), tΦ(E₋) ⊆ E₋, E₋ ⊆ Φ(E₊)
            let phi_minus = y.e_minus.gu_phi();
            if phi_minus.contains(&y.e_plus)?
                && y.e_minus.contains(&phi_minus.shift(1)?)?
                && phi_plus.contains(&y.e_minus)?
            {
                debug_assert!(in_bundle_base(&y, base, i)?);
                out.push(y);
            }
        }
    }
    Ok(out)
}

/// Which component family to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Hypersurface,
    Isotropic,
    Bundle { i: usize },
    OpenStratum { i: usize },
}

/// A point of a component: the lattice, with the envelope pair for the
/// bundle families.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ComponentPoint {
    pub e: TLattice,
    pub envelope: Option<YPoint>,
}

/// Exhaustive enumeration of a component's points at `base`, factorized as
/// envelopes-then-fiber for the bundle families.
pub fn enumerate_component(
    kind: ComponentKind,
    base: &TLattice,
    budget: &Budget,
) -> Result<Vec<ComponentPoint>, ComponentError> {
    let n = base.space().rank();
    match kind {
        ComponentKind::Hypersurface => {
            let cands = crate::lattice::enumerate_bounded(base, &hypersurface_bound(n), budget)?;
            let mut out = Vec::new();
            for e in cands {
                if in_hypersurface_component(&e, base)? {
                    out.push(ComponentPoint { e, envelope: None });
                }
            }
            Ok(out)
        }
        ComponentKind::Isotropic => {
            if n % 2 != 0 {
                return Err(ComponentError::OddRank(n));
            }
            let cands = crate::lattice::enumerate_bounded(base, &isotropic_bound(n), budget)?;
            let mut out = Vec::new();
            for e in cands {
                if in_isotropic_component(&e, base)? {
                    out.push(ComponentPoint { e, envelope: None });
                }
            }
            Ok(out)
        }
        ComponentKind::Bundle { i } | ComponentKind::OpenStratum { i } => {
            let open_only = matches!(kind, ComponentKind::OpenStratum { .. });
            let field = base.space().field().clone();
            let mut out = Vec::new();
            for y in enumerate_bundle_base(base, i, budget)? {
                let chart = FiberChart::new(base, &y, i)?;
                for w in enumerate_subspaces(&field, 2 * i - 1, i - 1, budget)? {
                    budget.charge(1)?;
                    let e = chart.lift(&w)?;
                    let keep = if open_only {
                        in_open_stratum(&e, &y, base, i)?
                    } else {
                        chart.orthogonality(&w)?
                    };
                    if keep {
                        out.push(ComponentPoint {
                            e,
                            envelope: Some(y.clone()),
                        });
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Result of the exhaustive orthogonality-redundancy sweep: over every
/// fiber point of every bundle-base point, the first condition must imply
/// the second.
#[derive(Clone, Debug, Default)]
pub struct RedundancyReport {
    pub base_points: u64,
    pub fiber_points: u64,
    pub in_component: u64,
    pub counterexamples: u64,
}

/// Verify over the whole flag bundle that the orthogonality condition
/// implies the second condition (the content of the reduced description of
/// the bundle component). Expected: zero counterexamples.
pub fn orthogonality_redundancy_check(
    base: &TLattice,
    i: usize,
    budget: &Budget,
) -> Result<RedundancyReport, ComponentError> {
    let field = base.space().field().clone();
    let mut rep = RedundancyReport::default();
    for y in enumerate_bundle_base(base, i, budget)? {
        rep.base_points += 1;
        let chart = FiberChart::new(base, &y, i)?;
        for w in enumerate_subspaces(&field, 2 * i - 1, i - 1, budget)? {
            budget.charge(1)?;
            rep.fiber_points += 1;
            if chart.orthogonality(&w)? {
                rep.in_component += 1;
                if !chart.second_condition(&w)? {
                    rep.counterexamples += 1;
                }
            }
        }
    }
    Ok(rep)
}

/// The residue flag of a bundle-base point at the standard basepoint:
/// `(tE₊/tΛ₀ ⊂ E₋/tΛ₀)` in the `n`-dimensional residue coordinates.
pub fn bundle_base_flag(base: &TLattice, y: &YPoint, i: usize) -> Result<Flag, ComponentError> {
    let n = base.space().rank();
    let chart = base.residue_chart()?;
    let small = chart.project_subspace(y.e_plus.shift(1)?.body())?;
    let big = chart.project_subspace(y.e_minus.body())?;
    let ty = FlagType::new(n, vec![i - 1, n - i])?;
    Ok(Flag::new(ty, vec![small, big])?)
}

/// Residue line of the dual lattice of a hypersurface-component point: the
/// image of `E^∨/Λ₀` in the coordinates of `t^{-1}Λ₀/Λ₀`.
pub fn dual_residue_line(base: &TLattice, e: &TLattice) -> Result<Subspace, ComponentError> {
    let up = base.shift(-1)?;
    let chart = SubQuotient::new(up.body(), base.body())?;
    Ok(chart.project_subspace(e.dual().body())?)
}

/// Residue subspace of an isotropic-component point: the image of `E/Λ₀`.
pub fn residue_subspace_above(
    base: &TLattice,
    e: &TLattice,
) -> Result<Subspace, ComponentError> {
    let up = base.shift(-1)?;
    let chart = SubQuotient::new(up.body(), base.body())?;
    Ok(chart.project_subspace(e.body())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::GuAmbient;
    use crate::perm::Perm;

    fn space(n: usize, window: i64) -> LatticeSpace {
        let f4 = Field::new(2, 2).unwrap();
        LatticeSpace::new(&f4, 2, n, window)
    }

    #[test]
    fn hypersurface_count_matches_fermat_n4() {
        let sp = space(4, 2);
        let base = sp.std_lattice();
        let budget = Budget::unlimited();
        let pts = enumerate_component(ComponentKind::Hypersurface, &base, &budget).unwrap();
        assert_eq!(pts.len(), 45);
        // bijection with the hermitian-line stratum via the dual residue line
        let field = sp.field().clone();
        let amb = GuAmbient::new(&field, 2, 4);
        let ty = FlagType::new(4, vec![1]).unwrap();
        let tw = vec![amb.twist_exact(&ty, 1, &Perm::identity(4))];
        let stratum = amb.dl_enumerate(&ty, &tw, &budget).unwrap();
        let mut images: Vec<Subspace> = pts
            .iter()
            .map(|p| dual_residue_line(&base, &p.e).unwrap())
            .collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), pts.len());
        let mut lines: Vec<Subspace> = stratum
            .into_iter()
            .map(|f| f.spaces()[0].clone())
            .collect();
        lines.sort();
        assert_eq!(images, lines);
    }

    #[test]
    fn basepoint_itself_is_not_a_point() {
        let sp = space(4, 2);
        let base = sp.std_lattice();
        assert!(!in_hypersurface_component(&base, &base).unwrap());
    }

    #[test]
    fn isotropic_count_matches_fermat_n4() {
        let sp = space(4, 2);
        let base = sp.std_lattice();
        let budget = Budget::unlimited();
        let pts = enumerate_component(ComponentKind::Isotropic, &base, &budget).unwrap();
        assert_eq!(pts.len(), 45);
        // model bijection: E ↦ E/Λ₀ lands in the r-1 = 1 dimensional stratum
        let field = sp.field().clone();
        let amb = GuAmbient::new(&field, 2, 4);
        let ty = FlagType::new(4, vec![1]).unwrap();
        let tw = vec![amb.twist_exact(&ty, 1, &Perm::identity(4))];
        let stratum = amb.dl_enumerate(&ty, &tw, &budget).unwrap();
        let mut images: Vec<Subspace> = pts
            .iter()
            .map(|p| residue_subspace_above(&base, &p.e).unwrap())
            .collect();
        images.sort();
        let mut lines: Vec<Subspace> = stratum
            .into_iter()
            .map(|f| f.spaces()[0].clone())
            .collect();
        lines.sort();
        assert_eq!(images, lines);
    }

    #[test]
    fn isotropic_rejects_odd_rank() {
        let sp = space(5, 2);
        let base = sp.std_lattice();
        assert!(matches!(
            in_isotropic_component(&base, &base),
            Err(ComponentError::OddRank(5))
        ));
    }

    #[test]
    fn bundle_index_range() {
        let sp = space(5, 2);
        let base = sp.std_lattice();
        let budget = Budget::unlimited();
        assert!(matches!(
            enumerate_bundle_base(&base, 1, &budget),
            Err(ComponentError::BadIndex { .. })
        ));
        assert!(matches!(
            enumerate_bundle_base(&base, 3, &budget),
            Err(ComponentError::BadIndex { .. })
        ));
    }

    #[test]
    fn bundle_base_matches_flag_stratum_n5() {
        // the base locus for i = 2 is the (i-1, n-i) flag stratum at twist 1
        let sp = space(5, 2);
        let base = sp.std_lattice();
        let budget = Budget::unlimited();
        let ys = enumerate_bundle_base(&base, 2, &budget).unwrap();
        assert!(!ys.is_empty());

        let field = sp.field().clone();
        let amb = GuAmbient::new(&field, 2, 5);
        let ty = FlagType::new(5, vec![1, 3]).unwrap();
        let tw = vec![amb.twist_exact(&ty, 1, &Perm::identity(5))];
        let stratum = amb.dl_enumerate(&ty, &tw, &budget).unwrap();

        let mut images: Vec<Flag> = ys
            .iter()
            .map(|y| bundle_base_flag(&base, y, 2).unwrap())
            .collect();
        images.sort();
        images.dedup();
        assert_eq!(images.len(), ys.len());
        let mut flags = stratum;
        flags.sort();
        assert_eq!(images, flags);
    }

    #[test]
    fn chart_maps_well_defined() {
        // phi1 factors through the quotient: perturbing a lift by E₋ does
        // not change the image
        let sp = space(5, 2);
        let base = sp.std_lattice();
        let budget = Budget::unlimited();
        let ys = enumerate_bundle_base(&base, 2, &budget).unwrap();
        let y = &ys[0];
        let chart = FiberChart::new(&base, y, 2).unwrap();
        let field = sp.field().clone();
        for w in enumerate_subspaces(&field, 3, 1, &budget).unwrap() {
            let e = chart.lift(&w).unwrap();
            let perturbed = e.sum(&y.e_minus).unwrap();
            assert_eq!(e, perturbed);
            assert_eq!(chart.project(&e).unwrap(), w);
            // zero fiber subspace has zero image
        }
        let zero = Subspace::zero(&field, 3);
        assert!(chart.phi1(&zero).unwrap().is_zero());
    }

    #[test]
    fn open_stratum_contained_in_component_n5() {
        let sp = space(5, 2);
        let base = sp.std_lattice();
        let budget = Budget::unlimited();
        let open = enumerate_component(ComponentKind::OpenStratum { i: 2 }, &base, &budget).unwrap();
        let comp = enumerate_component(ComponentKind::Bundle { i: 2 }, &base, &budget).unwrap();
        assert!(!open.is_empty());
        let comp_set: std::collections::BTreeSet<_> = comp.into_iter().collect();
        for p in &open {
            assert!(comp_set.contains(p));
        }
    }

    #[test]
    fn redundancy_check_n5() {
        let sp = space(5, 2);
        let base = sp.std_lattice();
        let budget = Budget::unlimited();
        let rep = orthogonality_redundancy_check(&base, 2, &budget).unwrap();
        assert!(rep.base_points > 0);
        assert_eq!(rep.counterexamples, 0);
        assert!(rep.in_component > 0);
    }

    #[test]
    fn fiber_counts_consistent_n5() {
        // two enumeration orders agree: total points = sum of fiber counts
        let sp = space(5, 2);
        let base = sp.std_lattice();
        let budget = Budget::unlimited();
        let pts = enumerate_component(ComponentKind::Bundle { i: 2 }, &base, &budget).unwrap();
        let ys = enumerate_bundle_base(&base, 2, &budget).unwrap();
        let field = sp.field().clone();
        let mut total = 0usize;
        for y in &ys {
            let chart = FiberChart::new(&base, y, 2).unwrap();
            for w in enumerate_subspaces(&field, 3, 1, &budget).unwrap() {
                if chart.orthogonality(&w).unwrap() {
                    total += 1;
                }
            }
        }
        assert_eq!(total, pts.len());
    }
}

