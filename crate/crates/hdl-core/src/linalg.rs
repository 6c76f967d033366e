//! Exact linear algebra over a [`Field`]: canonical subspaces in reduced
//! row-echelon form, sums and intersections, anti-diagonal bilinear and
//! hermitian pairings with orthogonal complements, and exhaustive subspace
//! enumeration in a fixed deterministic order.

use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::ff::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("subspaces live over different fields")]
    FieldMismatch,
    #[error("expected a subspace of the reference space")]
    NotContained,
    #[error("pairing dimension {0} does not match ambient {1}")]
    PairingMismatch(usize, usize),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Plain Gaussian elimination to reduced row-echelon form.
/// Returns the nonzero rows and their pivot columns.
fn rref(field: &Field, ambient: usize, mut rows: Vec<Vec<u32>>) -> (Vec<Vec<u32>>, Vec<usize>) {
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..ambient {
        if let Some(idx) = rows
            .iter()
            .position(|r| r[col] != 0 && r[..col].iter().all(|&v| v == 0))
        {
            let mut piv = rows.swap_remove(idx);
            let inv = field.inv(piv[col]);
            for v in piv.iter_mut() {
                *v = field.mul(*v, inv);
            }
            for r in rows.iter_mut() {
                let c = r[col];
                if c != 0 {
                    for j in col..ambient {
                        r[j] = field.sub(r[j], field.mul(c, piv[j]));
                    }
                }
            }
            for r in out.iter_mut() {
                let c = r[col];
                if c != 0 {
                    for j in 0..ambient {
                        r[j] = field.sub(r[j], field.mul(c, piv[j]));
                    }
                }
            }
            out.push(piv);
            pivots.push(col);
        }
    }
    (out, pivots)
}

/// A linear subspace of `F^n` in canonical form: the basis matrix is in
/// reduced row-echelon form with pivot columns leftmost, so equal subspaces
/// have identical representations and compare bitwise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Subspace(dim {} of {:?}^{}; rows {:?})",
            self.dim(),
            self.field,
            self.ambient,
            self.rows
        )
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then_with(|| self.rows.cmp(&other.rows))
    }
}

impl Subspace {
    pub fn span(field: &Field, ambient: usize, vectors: Vec<Vec<u32>>) -> Subspace {
        for v in &vectors {
            assert_eq!(v.len(), ambient, "vector length mismatch");
        }
        let (rows, pivots) = rref(field, ambient, vectors);
        Subspace {
            field: field.clone(),
            ambient,
            rows,
            pivots,
        }
    }

    pub fn zero(field: &Field, ambient: usize) -> Subspace {
        Subspace {
            field: field.clone(),
            ambient,
            rows: vec![],
            pivots: vec![],
        }
    }

    pub fn full(field: &Field, ambient: usize) -> Subspace {
        let mut rows = Vec::with_capacity(ambient);
        for i in 0..ambient {
            let mut r = vec![0u32; ambient];
            r[i] = 1;
            rows.push(r);
        }
        Subspace {
            field: field.clone(),
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn line(field: &Field, v: &[u32]) -> Subspace {
        Subspace::span(field, v.len(), vec![v.to_vec()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, other.ambient));
        }
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch);
        }
        Ok(())
    }

    /// Residual of `v` after eliminating against the basis.
    pub fn reduce_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.ambient);
        let f = &self.field;
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = out[p];
            if c != 0 {
                for j in p..self.ambient {
                    out[j] = f.sub(out[j], f.mul(c, row[j]));
                }
            }
        }
        out
    }

    pub fn contains_vec(&self, v: &[u32]) -> bool {
        self.reduce_vec(v).iter().all(|&x| x == 0)
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_compatible(other)?;
        Ok(other.rows.iter().all(|r| self.contains_vec(r)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compatible(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Subspace::span(&self.field, self.ambient, rows))
    }

    /// Annihilator under the standard dot product; the intersection below is
    /// computed through it (kernel of the stacked system).
    pub fn annihilator(&self) -> Subspace {
        let f = &self.field;
        let n = self.ambient;
        let mut piv_set = vec![false; n];
        for &p in &self.pivots {
            piv_set[p] = true;
        }
        let mut basis: Vec<Vec<u32>> = Vec::with_capacity(n - self.dim());
        for free in 0..n {
            if piv_set[free] {
                continue;
            }
            let mut v = vec![0u32; n];
            v[free] = 1;
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                v[p] = f.neg(row[free]);
            }
            basis.push(v);
        }
        Subspace::span(f, n, basis)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compatible(other)?;
        let a = self.annihilator();
        let b = other.annihilator();
        Ok(a.sum(&b)?.annihilator())
    }

    /// Entrywise `p^k`-power image. Frobenius is a field automorphism, so the
    /// image of an RREF basis is again RREF with the same pivots.
    pub fn frob_p(&self, k: u32) -> Subspace {
        let f = &self.field;
        let rows: Vec<Vec<u32>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&v| f.frob_p(v, k)).collect())
            .collect();
        Subspace {
            field: f.clone(),
            ambient: self.ambient,
            rows,
            pivots: self.pivots.clone(),
        }
    }
}

/// The anti-diagonal pairings of the hermitian model.
///
/// `Bilinear` evaluates `<x,y> = sum_i x_i y_{d+1-i}`; `Hermitian` twists the
/// first argument by `q`: `<x,y> = sum_i x_i^q y_{d+1-i}` where `q` is the
/// order of the fixed subfield.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pairing {
    Bilinear { dim: usize },
    Hermitian { dim: usize, q: u32 },
}

impl Pairing {
    pub fn bilinear(dim: usize) -> Pairing {
        Pairing::Bilinear { dim }
    }

    pub fn hermitian(dim: usize, q: u32) -> Pairing {
        Pairing::Hermitian { dim, q }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Pairing::Bilinear { dim } => dim,
            Pairing::Hermitian { dim, .. } => dim,
        }
    }

    fn twist(&self, field: &Field, v: u32) -> u32 {
        match *self {
            Pairing::Bilinear { .. } => v,
            Pairing::Hermitian { q, .. } => field.frob_p(v, q_steps(field, q)),
        }
    }

    pub fn eval(&self, field: &Field, x: &[u32], y: &[u32]) -> u32 {
        let d = self.dim();
        assert_eq!(x.len(), d);
        assert_eq!(y.len(), d);
        let mut acc = 0u32;
        for i in 0..d {
            acc = field.add(acc, field.mul(self.twist(field, x[i]), y[d - 1 - i]));
        }
        acc
    }

    /// Orthogonal complement `{ y : <x,y> = 0 for all x in V }`, taken inside
    /// the same ambient space. The twist acts on the first argument.
    pub fn perp(&self, v: &Subspace) -> Result<Subspace, LinalgError> {
        let d = self.dim();
        if v.ambient() != d {
            return Err(LinalgError::PairingMismatch(d, v.ambient()));
        }
        let field = v.field().clone();
        if let Pairing::Hermitian { q, .. } = *self {
            // needs the full q^2-structure on the coefficient field
            let s = q_steps(&field, q);
            if field.degree() % (2 * s) != 0 {
                return Err(LinalgError::PairingMismatch(d, v.ambient()));
            }
        }
        let equations: Vec<Vec<u32>> = v
            .rows()
            .iter()
            .map(|x| {
                let mut eq = vec![0u32; d];
                for j in 0..d {
                    eq[d - 1 - j] = self.twist(&field, x[j]);
                }
                eq
            })
            .collect();
        Ok(Subspace::span(&field, d, equations).annihilator())
    }

    /// Non-degeneracy: the perp of the full space must be zero.
    pub fn is_nondegenerate(&self, field: &Field) -> Result<bool, LinalgError> {
        Ok(self.perp(&Subspace::full(field, self.dim()))?.is_zero())
    }
}

/// Number of prime-Frobenius steps realizing `x -> x^q` on `field`.
/// Panics if `q` is not a power of the characteristic.
pub fn q_steps(field: &Field, q: u32) -> u32 {
    let p = field.p();
    let mut s = 0u32;
    let mut acc = 1u64;
    while acc < q as u64 {
        acc *= p as u64;
        s += 1;
    }
    assert_eq!(acc, q as u64, "q = {q} is not a power of p = {p}");
    s
}

/// Gaussian binomial `[n choose k]_q`.
pub fn gaussian_binomial(n: u64, k: u64, q: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// Exhaustive enumeration of the `k`-dimensional subspaces of `F^n`, each
/// exactly once: iterate over RREF shapes (pivot column sets in lexicographic
/// order), then over the free entries (last position fastest).
pub struct SubspaceIter {
    field: Field,
    n: usize,
    k: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    vals: Vec<u32>,
    done: bool,
    fresh_shape: bool,
    budget: Budget,
}

pub fn enumerate_subspaces(
    field: &Field,
    n: usize,
    k: usize,
    budget: &Budget,
) -> Result<SubspaceIter, LinalgError> {
    assert!(k <= n, "k must be at most n");
    budget.require(gaussian_binomial(n as u64, k as u64, field.order() as u128))?;
    let mut it = SubspaceIter {
        field: field.clone(),
        n,
        k,
        pivots: (0..k).collect(),
        free: vec![],
        vals: vec![],
        done: false,
        fresh_shape: true,
        budget: budget.clone(),
    };
    it.reset_shape();
    Ok(it)
}

impl SubspaceIter {
    fn reset_shape(&mut self) {
        self.free.clear();
        for r in 0..self.k {
            for c in self.pivots[r] + 1..self.n {
                if !self.pivots.contains(&c) {
                    self.free.push((r, c));
                }
            }
        }
        self.vals = vec![0; self.free.len()];
        self.fresh_shape = true;
    }

    fn advance_shape(&mut self) -> bool {
        let (k, n) = (self.k, self.n);
        if k == 0 {
            return false;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if self.pivots[i] < n - (k - i) {
                self.pivots[i] += 1;
                for j in i + 1..k {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                return true;
            }
        }
    }

    fn current(&self) -> Subspace {
        let mut rows = Vec::with_capacity(self.k);
        for r in 0..self.k {
            let mut row = vec![0u32; self.n];
            row[self.pivots[r]] = 1;
            rows.push(row);
        }
        for (idx, &(r, c)) in self.free.iter().enumerate() {
            rows[r][c] = self.vals[idx];
        }
        Subspace {
            field: self.field.clone(),
            ambient: self.n,
            rows,
            pivots: self.pivots.clone(),
        }
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        if self.k == 0 {
            self.done = true;
            return Some(Subspace::zero(&self.field, self.n));
        }
        if self.fresh_shape {
            self.fresh_shape = false;
        } else {
            let order = self.field.order();
            let mut i = self.vals.len();
            loop {
                if i == 0 {
                    if !self.advance_shape() {
                        self.done = true;
                        return None;
                    }
                    self.reset_shape();
                    self.fresh_shape = false;
                    break;
                }
                i -= 1;
                self.vals[i] += 1;
                if self.vals[i] < order {
                    break;
                }
                self.vals[i] = 0;
            }
        }
        self.budget.charge(1).ok()?;
        Some(self.current())
    }
}

/// A materialized quotient `total/sub` with fixed lift and projection maps.
/// The lift basis is canonical (rows of `total` reduced against `sub` and
/// re-echelonized), so charts are reproducible across runs and lift
/// independence is a testable property rather than an assumption.
#[derive(Clone)]
pub struct SubQuotient {
    sub: Subspace,
    total: Subspace,
    lifts: Vec<Vec<u32>>,
    // reduced = transform * (sub rows ++ lifts); projection solves through it
    red: Subspace,
    transform: Vec<Vec<u32>>,
}

impl SubQuotient {
    pub fn new(total: &Subspace, sub: &Subspace) -> Result<SubQuotient, LinalgError> {
        if !total.contains(sub)? {
            return Err(LinalgError::NotContained);
        }
        let field = total.field().clone();
        let n = total.ambient();
        let reduced: Vec<Vec<u32>> = total
            .rows()
            .iter()
            .map(|r| sub.reduce_vec(r))
            .filter(|r| r.iter().any(|&v| v != 0))
            .collect();
        let lifts = Subspace::span(&field, n, reduced).rows().to_vec();
        debug_assert_eq!(lifts.len(), total.dim() - sub.dim());

        // Row-reduce the combined basis while tracking the transform.
        let m = total.dim();
        let mut combined: Vec<Vec<u32>> = sub.rows().to_vec();
        combined.extend(lifts.iter().cloned());
        let mut aug: Vec<Vec<u32>> = combined
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                let mut tr = vec![0u32; m];
                tr[i] = 1;
                row.extend(tr);
                row
            })
            .collect();
        let (red_aug, _) = rref(&field, n + m, std::mem::take(&mut aug));
        let mut red_rows = Vec::with_capacity(m);
        let mut transform = Vec::with_capacity(m);
        for row in red_aug {
            red_rows.push(row[..n].to_vec());
            transform.push(row[n..].to_vec());
        }
        let red = Subspace::span(&field, n, red_rows.clone());
        debug_assert_eq!(red.rows(), &red_rows[..]);

        Ok(SubQuotient {
            sub: sub.clone(),
            total: total.clone(),
            lifts,
            red,
            transform,
        })
    }

    pub fn dim(&self) -> usize {
        self.lifts.len()
    }
    pub fn sub(&self) -> &Subspace {
        &self.sub
    }
    pub fn total(&self) -> &Subspace {
        &self.total
    }
    /// Canonical lift basis of the quotient.
    pub fn lifts(&self) -> &[Vec<u32>] {
        &self.lifts
    }

    /// Coordinates of `v + sub` in the lift basis; `None` when `v` is not in
    /// `total`.
    pub fn project_vec(&self, v: &[u32]) -> Option<Vec<u32>> {
        let f = self.total.field();
        let n = self.total.ambient();
        assert_eq!(v.len(), n);
        let m = self.transform.len();
        let mut out = v.to_vec();
        let mut acc = vec![0u32; m];
        for (i, (row, &p)) in self
            .red
            .rows()
            .iter()
            .zip(self.red.pivots())
            .enumerate()
        {
            let c = out[p];
            if c != 0 {
                for j in p..n {
                    out[j] = f.sub(out[j], f.mul(c, row[j]));
                }
                for j in 0..m {
                    acc[j] = f.add(acc[j], f.mul(c, self.transform[i][j]));
                }
            }
        }
        if out.iter().any(|&x| x != 0) {
            return None;
        }
        Some(acc[self.sub.dim()..].to_vec())
    }

    /// Ambient representative of quotient coordinates `c`.
    pub fn lift_coords(&self, c: &[u32]) -> Vec<u32> {
        let f = self.total.field();
        let n = self.total.ambient();
        assert_eq!(c.len(), self.dim());
        let mut out = vec![0u32; n];
        for (coeff, lift) in c.iter().zip(&self.lifts) {
            if *coeff != 0 {
                for j in 0..n {
                    out[j] = f.add(out[j], f.mul(*coeff, lift[j]));
                }
            }
        }
        out
    }

    /// Image of `s` in the quotient: `((s ∩ total) + sub)/sub`.
    pub fn project_subspace(&self, s: &Subspace) -> Result<Subspace, LinalgError> {
        let f = self.total.field();
        let inside = s.intersect(&self.total)?;
        let rows: Vec<Vec<u32>> = inside
            .rows()
            .iter()
            .map(|r| self.project_vec(r).expect("row of s ∩ total not in total"))
            .collect();
        Ok(Subspace::span(f, self.dim(), rows))
    }

    /// Preimage of a quotient subspace: `sub + span(lifted basis)`.
    pub fn lift_subspace(&self, q: &Subspace) -> Subspace {
        let f = self.total.field();
        let n = self.total.ambient();
        assert_eq!(q.ambient(), self.dim());
        let mut rows = self.sub.rows().to_vec();
        for r in q.rows() {
            rows.push(self.lift_coords(r));
        }
        Subspace::span(f, n, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::new(2, 1).unwrap()
    }
    fn f3() -> Field {
        Field::new(3, 1).unwrap()
    }
    fn f4() -> Field {
        Field::new(2, 2).unwrap()
    }

    #[test]
    fn span_idempotent_ops() {
        let f = f2();
        let v = Subspace::span(&f, 3, vec![vec![1, 1, 0], vec![0, 1, 1]]);
        assert_eq!(v.sum(&v).unwrap(), v);
        assert_eq!(v.intersect(&v).unwrap(), v);
        assert!(v.contains(&v).unwrap());
    }

    #[test]
    fn sum_of_axes() {
        let f = f2();
        let e1 = Subspace::line(&f, &[1, 0, 0]);
        let e2 = Subspace::line(&f, &[0, 1, 0]);
        assert_eq!(e1.sum(&e2).unwrap().dim(), 2);
        assert_eq!(e1.intersect(&e2).unwrap().dim(), 0);
    }

    #[test]
    fn dim_formula_random() {
        // dim(A+B) + dim(A∩B) = dim A + dim B over a deterministic sample
        let f = f3();
        let b = Budget::unlimited();
        let all: Vec<Subspace> = enumerate_subspaces(&f, 4, 2, &b).unwrap().collect();
        for a in all.iter().step_by(7) {
            for c in all.iter().step_by(11) {
                let s = a.sum(c).unwrap();
                let i = a.intersect(c).unwrap();
                assert_eq!(s.dim() + i.dim(), a.dim() + c.dim());
            }
        }
    }

    #[test]
    fn canonical_across_generating_sets() {
        let f = f4();
        let v1 = vec![1u32, 2, 3];
        let v2 = vec![0u32, 1, 1];
        let a = Subspace::span(&f, 3, vec![v1.clone(), v2.clone()]);
        // same space, different generators: (2·v1, v1 + v2)
        let r1: Vec<u32> = v1.iter().map(|&x| f.mul(2, x)).collect();
        let r2: Vec<u32> = v1.iter().zip(&v2).map(|(&x, &y)| f.add(x, y)).collect();
        let b = Subspace::span(&f, 3, vec![r1, r2]);
        assert_eq!(a, b);
    }

    #[test]
    fn line_count_f2_cubed() {
        let f = f2();
        let b = Budget::unlimited();
        let lines: Vec<_> = enumerate_subspaces(&f, 3, 1, &b).unwrap().collect();
        assert_eq!(lines.len(), 7);
        // brute force over the 8 vectors
        let mut distinct = std::collections::BTreeSet::new();
        for bits in 1u32..8 {
            let v = vec![bits & 1, (bits >> 1) & 1, (bits >> 2) & 1];
            distinct.insert(Subspace::line(&f, &v));
        }
        assert_eq!(distinct.len(), 7);
        let set: std::collections::BTreeSet<_> = lines.into_iter().collect();
        assert_eq!(set, distinct);
    }

    #[test]
    fn enumeration_matches_gaussian_binomial() {
        let cases = [(4usize, 2usize, 3u32, 130u128), (3, 1, 2, 7), (4, 0, 2, 1)];
        for (n, k, p, expect) in cases {
            let f = Field::new(p, 1).unwrap();
            let b = Budget::unlimited();
            let count = enumerate_subspaces(&f, n, k, &b).unwrap().count();
            assert_eq!(count as u128, expect);
            assert_eq!(gaussian_binomial(n as u64, k as u64, p as u128), expect);
        }
    }

    #[test]
    fn enumeration_unique_and_deterministic() {
        let f = f4();
        let b = Budget::unlimited();
        let one: Vec<_> = enumerate_subspaces(&f, 4, 2, &b).unwrap().collect();
        let two: Vec<_> = enumerate_subspaces(&f, 4, 2, &Budget::unlimited())
            .unwrap()
            .collect();
        assert_eq!(one, two);
        let set: std::collections::BTreeSet<_> = one.iter().cloned().collect();
        assert_eq!(set.len(), one.len());
    }

    #[test]
    fn budget_exceeded_reports_required() {
        let f = f4();
        let b = Budget::new(10);
        match enumerate_subspaces(&f, 4, 2, &b) {
            Err(LinalgError::Budget(e)) => {
                assert_eq!(e.required, Some(gaussian_binomial(4, 2, 4)))
            }
            _ => panic!("expected budget error"),
        }
    }

    #[test]
    fn bilinear_perp_of_axis() {
        // F_2^4, anti-diagonal pairing: perp(span{e1}) pairs against slot 4
        let f = f2();
        let p = Pairing::bilinear(4);
        let v = Subspace::line(&f, &[1, 0, 0, 0]);
        let perp = p.perp(&v).unwrap();
        let expect = Subspace::span(
            &f,
            4,
            vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0]],
        );
        assert_eq!(perp, expect);
    }

    #[test]
    fn perp_dimension_and_involution() {
        let f = f3();
        let p = Pairing::bilinear(4);
        let b = Budget::unlimited();
        for v in enumerate_subspaces(&f, 4, 2, &b).unwrap() {
            let w = p.perp(&v).unwrap();
            assert_eq!(w.dim(), 2);
            assert_eq!(p.perp(&w).unwrap(), v);
        }
    }

    #[test]
    fn hermitian_perp_isotropic_line() {
        // F_4 with q = 2, d = 2: perp(span{(1,1)}) = span{(1,1)}
        let f = f4();
        let p = Pairing::hermitian(2, 2);
        let v = Subspace::line(&f, &[1, 1]);
        assert_eq!(p.perp(&v).unwrap(), v);
        // and the pairing is non-degenerate
        assert!(p.is_nondegenerate(&f).unwrap());
    }

    #[test]
    fn hermitian_perp_q2_twist() {
        // perp∘perp = coordinatewise q^2-power on subspaces
        let f16 = Field::new(2, 4).unwrap();
        let p = Pairing::hermitian(3, 2);
        let b = Budget::unlimited();
        for v in enumerate_subspaces(&f16, 3, 1, &b).unwrap().step_by(3) {
            let pp = p.perp(&p.perp(&v).unwrap()).unwrap();
            assert_eq!(pp, v.frob_p(2));
        }
    }

    #[test]
    fn perp_inclusion_reversing_exhaustive() {
        for (p, n) in [(2u32, 4usize), (3, 3)] {
            let f = Field::new(p, 1).unwrap();
            let pairing = Pairing::bilinear(n);
            let b = Budget::unlimited();
            let mut all: Vec<Subspace> = vec![];
            for k in 0..=n {
                all.extend(enumerate_subspaces(&f, n, k, &b).unwrap());
            }
            for a in &all {
                for c in &all {
                    if c.contains(a).unwrap() {
                        let pa = pairing.perp(a).unwrap();
                        let pc = pairing.perp(c).unwrap();
                        assert!(pa.contains(&pc).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn modular_law_sample() {
        // A ∩ (B + (A ∩ C)) = (A ∩ B) + (A ∩ C)
        let f = f2();
        let b = Budget::unlimited();
        let all: Vec<Subspace> = (0..=4)
            .flat_map(|k| enumerate_subspaces(&f, 4, k, &b).unwrap().collect::<Vec<_>>())
            .collect();
        for (i, a) in all.iter().enumerate().step_by(3) {
            for (j, x) in all.iter().enumerate().step_by(5) {
                let c = &all[(i * 7 + j * 11) % all.len()];
                let ac = a.intersect(c).unwrap();
                let lhs = a.intersect(&x.sum(&ac).unwrap()).unwrap();
                let rhs = a.intersect(x).unwrap().sum(&ac).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn frob_subspace_rationality_and_composition() {
        let f4 = f4();
        // line spanned by (1, g): image spanned by (1, g+1) since g^2 = g+1
        let g = f4.generator();
        let v = Subspace::line(&f4, &[1, g]);
        let fv = v.frob_p(1);
        assert_eq!(fv, Subspace::line(&f4, &[1, f4.add(g, 1)]));
        // rational subspaces are fixed
        let rational = Subspace::span(&f4, 3, vec![vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(rational.frob_p(1), rational);
        // functoriality
        assert_eq!(v.frob_p(1).frob_p(1), v.frob_p(2));
    }

    #[test]
    fn subquotient_roundtrip() {
        let f = f4();
        let total = Subspace::span(&f, 4, vec![vec![1, 0, 0, 2], vec![0, 1, 0, 0], vec![0, 0, 1, 3]]);
        let sub = Subspace::line(&f, &[0, 1, 0, 0]);
        let q = SubQuotient::new(&total, &sub).unwrap();
        assert_eq!(q.dim(), 2);
        for r in total.rows() {
            let c = q.project_vec(r).unwrap();
            let lifted = q.lift_coords(&c);
            // lifted differs from r by an element of sub
            let mut diff = vec![0u32; 4];
            for j in 0..4 {
                diff[j] = f.sub(r[j], lifted[j]);
            }
            assert!(sub.contains_vec(&diff));
        }
        assert!(q.project_vec(&[1, 0, 0, 0]).is_none());
        // subspace round trip
        let through = q.project_subspace(&total).unwrap();
        assert_eq!(through.dim(), 2);
        assert_eq!(q.lift_subspace(&through), total);
    }
}
