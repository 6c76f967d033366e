//! Exact arithmetic in small finite fields `F_{p^m}`.
//!
//! Fields are constructed from a deterministic modulus (the irreducible monic
//! polynomial of the requested degree whose packed coefficient value
//! `sum c_i p^i` is least), so two fields with the same `(p, m)` are
//! interchangeable and elements compare bitwise. Elements are stored as the
//! packed base-`p` value of their coefficient vector; multiplication goes
//! through exp/log tables built from a primitive element, addition is
//! digitwise (XOR when `p = 2`).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("field order {p}^{m} exceeds the supported bound 2^20")]
    TooLarge { p: u32, m: u32 },
    #[error("no irreducible modulus of degree {m} over F_{p} (internal bug)")]
    NoIrreducible { p: u32, m: u32 },
    #[error("F_{src} does not embed into F_{tgt}")]
    NoEmbedding { src: u64, tgt: u64 },
    #[error("F_{base} is not a subfield of F_{field}")]
    NotSubfield { base: u64, field: u64 },
    #[error("element of F_{actual} used where F_{expected} was expected")]
    FieldMismatch { expected: u64, actual: u64 },
}

struct FieldInner {
    p: u32,
    m: u32,
    order: u32,
    modulus: Vec<u32>,
    // exp[i] = g^i for 0 <= i < 2*(order-1); log[exp[i]] = i mod order-1.
    exp: Vec<u32>,
    log: Vec<u32>,
    generator: u32,
}

/// A finite field descriptor. Cheap to clone and shareable across threads;
/// all arithmetic goes through `&self` and is pure.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        // The modulus is a deterministic function of (p, m).
        self.0.p == other.0.p && self.0.m == other.0.m
    }
}
impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.0.m.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.order)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n as u64 {
        if n as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense little-endian polynomials over F_p, used only during construction.
mod poly {
    pub fn trim(v: &mut Vec<u32>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r: Vec<u32> = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let da = r.len() - 1;
            let c = (r[da] as u64 * lead_inv as u64 % p as u64) as u32;
            for i in 0..=db {
                let t = (c as u64 * b[i] as u64) % p as u64;
                let idx = da - db + i;
                r[idx] = ((r[idx] as u64 + p as u64 - t) % p as u64) as u32;
            }
            trim(&mut r);
            if r.is_empty() {
                break;
            }
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        out
    }

    fn inv_mod(a: u32, p: u32) -> u32 {
        // p is prime and small; Fermat.
        let mut r = 1u64;
        let mut b = a as u64 % p as u64;
        let mut e = p as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }
}

fn decode(val: u32, p: u32, m: u32) -> Vec<u32> {
    let mut v = val;
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push(v % p);
        v /= p;
    }
    out
}

fn encode(digits: &[u32], p: u32) -> u32 {
    let mut out = 0u64;
    for &d in digits.iter().rev() {
        out = out * p as u64 + d as u64;
    }
    out as u32
}

/// Brute-force irreducibility test: trial division by every monic polynomial
/// of degree up to `deg(f)/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for packed in 0..count {
            let mut g = decode(packed as u32, p, d as u32);
            g.push(1); // monic of degree d
            if poly::rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Field {
    pub fn new(p: u32, m: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (p as u64)
            .checked_pow(m)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or(FieldError::TooLarge { p, m })? as u32;

        let modulus = Self::least_irreducible(p, m, order)?;

        // Slow multiplication used to bootstrap the tables.
        let mul_slow = |a: u32, b: u32| -> u32 {
            let pa = decode(a, p, m);
            let pb = decode(b, p, m);
            let mut prod = poly::mul(&pa, &pb, p);
            poly::trim(&mut prod);
            if prod.is_empty() {
                return 0;
            }
            let r = poly::rem(&prod, &modulus, p);
            encode(&r, p)
        };
        let pow_slow = |mut a: u32, mut e: u64| -> u32 {
            let mut r = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    r = mul_slow(r, a);
                }
                a = mul_slow(a, a);
                e >>= 1;
            }
            r
        };

        let group = (order - 1) as u64;
        let mut prime_factors = Vec::new();
        {
            let mut n = group;
            let mut d = 2u64;
            while d * d <= n {
                if n % d == 0 {
                    prime_factors.push(d);
                    while n % d == 0 {
                        n /= d;
                    }
                }
                d += 1;
            }
            if n > 1 {
                prime_factors.push(n);
            }
        }
        let mut generator = 1u32;
        if order > 2 {
            generator = (2..order)
                .find(|&g| prime_factors.iter().all(|&l| pow_slow(g, group / l) != 1))
                .ok_or(FieldError::NoIrreducible { p, m })?;
        }

        let mut exp = vec![0u32; 2 * group as usize];
        let mut log = vec![u32::MAX; order as usize];
        let mut acc = 1u32;
        for i in 0..group as usize {
            exp[i] = acc;
            exp[i + group as usize] = acc;
            log[acc as usize] = i as u32;
            acc = mul_slow(acc, generator);
        }
        debug_assert_eq!(acc, 1);

        Ok(Field(Arc::new(FieldInner {
            p,
            m,
            order,
            modulus,
            exp,
            log,
            generator,
        })))
    }

    /// The monic irreducible of degree `m` whose packed low-coefficient value
    /// is least. For `m = 1` this is the polynomial `x`.
    fn least_irreducible(p: u32, m: u32, order: u32) -> Result<Vec<u32>, FieldError> {
        if m == 1 {
            return Ok(vec![0, 1]);
        }
        for packed in 0..order as u64 {
            let mut f = decode(packed as u32, p, m);
            f.push(1);
            if is_irreducible(&f, p) {
                return Ok(f);
            }
        }
        Err(FieldError::NoIrreducible { p, m })
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn degree(&self) -> u32 {
        self.0.m
    }
    pub fn order(&self) -> u32 {
        self.0.order
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    /// A fixed primitive element (the least one).
    pub fn generator(&self) -> u32 {
        self.0.generator
    }
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.0.order
    }

    pub fn elem(&self, val: u32) -> FieldElem {
        assert!(val < self.0.order, "value out of range");
        FieldElem {
            field: self.clone(),
            val,
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let f = &*self.0;
        if f.p == 2 {
            return a ^ b;
        }
        let mut out = 0u64;
        let mut pa = a;
        let mut pb = b;
        let mut mult = 1u64;
        for _ in 0..f.m {
            let d = (pa % f.p + pb % f.p) % f.p;
            out += d as u64 * mult;
            mult *= f.p as u64;
            pa /= f.p;
            pb /= f.p;
        }
        out as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        let f = &*self.0;
        if f.p == 2 {
            return a;
        }
        let mut out = 0u64;
        let mut pa = a;
        let mut mult = 1u64;
        for _ in 0..f.m {
            let d = (f.p - pa % f.p) % f.p;
            out += d as u64 * mult;
            mult *= f.p as u64;
            pa /= f.p;
        }
        out as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let f = &*self.0;
        f.exp[(f.log[a as usize] + f.log[b as usize]) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let f = &*self.0;
        let g = (f.order - 1) as usize;
        f.exp[g - f.log[a as usize] as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let f = &*self.0;
        let g = (f.order - 1) as u64;
        let l = f.log[a as usize] as u64;
        f.exp[(l * (e % g) % g) as usize]
    }

    /// `a^(p^k)`, the absolute Frobenius iterated `k` times.
    pub fn frob_p(&self, a: u32, k: u32) -> u32 {
        if a == 0 {
            return 0;
        }
        let f = &*self.0;
        let g = (f.order - 1) as u64;
        let mut e = 1u64;
        for _ in 0..k % f.m {
            e = e * f.p as u64 % g;
        }
        f.exp[(f.log[a as usize] as u64 * e % g) as usize]
    }

    pub fn is_subfield_of(&self, other: &Field) -> bool {
        self.0.p == other.0.p && other.0.m % self.0.m == 0
    }
}

/// A field element carrying its owner. Comparisons require matching owners;
/// representations are canonical so equality is bitwise.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    field: Field,
    val: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.val, self.field)
    }
}

impl FieldElem {
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn val(&self) -> u32 {
        self.val
    }
    pub fn add(&self, other: &FieldElem) -> FieldElem {
        assert_eq!(self.field, other.field);
        self.field.elem(self.field.add(self.val, other.val))
    }
    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        assert_eq!(self.field, other.field);
        self.field.elem(self.field.mul(self.val, other.val))
    }
    pub fn inv(&self) -> FieldElem {
        self.field.elem(self.field.inv(self.val))
    }
    pub fn pow(&self, e: u64) -> FieldElem {
        self.field.elem(self.field.pow(self.val, e))
    }
}

/// `x^(|base|^e)`: the `e`-th power of the Frobenius relative to `base`.
pub fn frobenius(x: &FieldElem, e: u32, base: &Field) -> Result<FieldElem, FieldError> {
    let owner = x.field();
    if !base.is_subfield_of(owner) {
        return Err(FieldError::NotSubfield {
            base: base.order() as u64,
            field: owner.order() as u64,
        });
    }
    let k = base.degree() * e;
    Ok(owner.elem(owner.frob_p(x.val, k)))
}

/// A subfield embedding `F_{p^a} -> F_{p^b}` with `a | b`, sending the source
/// generator of the polynomial representation (the class of `x`) to the root
/// of the source modulus with least packed value. Ring-homomorphic and
/// injective; functoriality along towers is asserted by test.
pub struct Embedding {
    src: Field,
    tgt: Field,
    x_image: u32,
}

impl Embedding {
    pub fn new(src: &Field, tgt: &Field) -> Result<Embedding, FieldError> {
        if !src.is_subfield_of(tgt) {
            return Err(FieldError::NoEmbedding {
                src: src.order() as u64,
                tgt: tgt.order() as u64,
            });
        }
        // Roots of the source modulus inside the target, by exhaustion.
        let root = tgt
            .elements()
            .find(|&v| {
                let mut acc = 0u32;
                for &c in src.modulus().iter().rev() {
                    acc = tgt.add(tgt.mul(acc, v), c % tgt.p());
                }
                acc == 0
            })
            .ok_or(FieldError::NoEmbedding {
                src: src.order() as u64,
                tgt: tgt.order() as u64,
            })?;
        Ok(Embedding {
            src: src.clone(),
            tgt: tgt.clone(),
            x_image: root,
        })
    }

    pub fn src(&self) -> &Field {
        &self.src
    }
    pub fn tgt(&self) -> &Field {
        &self.tgt
    }

    pub fn apply(&self, val: u32) -> u32 {
        let digits = decode(val, self.src.p(), self.src.degree());
        let mut acc = 0u32;
        for &c in digits.iter().rev() {
            acc = self.tgt.add(self.tgt.mul(acc, self.x_image), c);
        }
        acc
    }

    pub fn apply_elem(&self, x: &FieldElem) -> FieldElem {
        assert_eq!(x.field(), &self.src);
        self.tgt.elem(self.apply(x.val()))
    }
}

/// Convenience wrapper constructing the embedding on the fly.
pub fn embed(x: &FieldElem, target: &Field) -> Result<FieldElem, FieldError> {
    Ok(Embedding::new(x.field(), target)?.apply_elem(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_f2() {
        let f = Field::new(2, 1).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.mul(1, 1), 1);
    }

    #[test]
    fn f4_structure() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.order(), 4);
        // x^2 + x + 1 is the only irreducible quadratic over F_2.
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // multiplicative group of order 3
        let g = f.generator();
        assert_eq!(f.pow(g, 3), 1);
        assert_ne!(f.pow(g, 1), 1);
        assert_ne!(f.pow(g, 2), 1);
        // g = x (packed 2); g^2 = g + 1
        assert_eq!(f.mul(2, 2), f.add(2, 1));
    }

    #[test]
    fn f9_generator_order() {
        let f = Field::new(3, 2).unwrap();
        let g = f.generator();
        // brute-force check of all powers
        let mut pows = vec![];
        let mut acc = 1;
        for _ in 0..8 {
            acc = f.mul(acc, g);
            pows.push(acc);
        }
        assert_eq!(pows[7], 1);
        assert!(pows[..7].iter().all(|&v| v != 1));
        assert_eq!(pows[3], f.neg(1)); // g^4 = -1
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(
            Field::new(2, 21).unwrap_err(),
            FieldError::TooLarge { .. }
        ));
        assert_eq!(Field::new(2, 0).unwrap_err(), FieldError::ZeroDegree);
    }

    #[test]
    fn modulus_is_verified_irreducible() {
        for (p, m) in [(2u32, 4u32), (2, 6), (3, 2), (3, 3), (5, 2)] {
            let f = Field::new(p, m).unwrap();
            assert!(is_irreducible(f.modulus(), p));
        }
    }

    fn axioms_exhaustive(f: &Field) {
        let n = f.order();
        for a in 0..n {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            for b in 0..n {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..n {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_small_fields() {
        for (p, m) in [(2, 2), (2, 3), (3, 2), (5, 1), (7, 1)] {
            axioms_exhaustive(&Field::new(p, m).unwrap());
        }
    }

    #[test]
    fn frobenius_fixes_exactly_base() {
        let f16 = Field::new(2, 4).unwrap();
        let f4 = Field::new(2, 2).unwrap();
        let emb = Embedding::new(&f4, &f16).unwrap();
        let image: Vec<u32> = f4.elements().map(|v| emb.apply(v)).collect();
        for v in f16.elements() {
            let fixed = frobenius(&f16.elem(v), 1, &f4).unwrap().val() == v;
            assert_eq!(fixed, image.contains(&v), "v={v}");
        }
        // multiplicativity
        for a in f16.elements() {
            for b in f16.elements() {
                let fa = frobenius(&f16.elem(a), 1, &f4).unwrap().val();
                let fb = frobenius(&f16.elem(b), 1, &f4).unwrap().val();
                let fab = frobenius(&f16.elem(f16.mul(a, b)), 1, &f4).unwrap().val();
                assert_eq!(f16.mul(fa, fb), fab);
                let sab = frobenius(&f16.elem(f16.add(a, b)), 1, &f4).unwrap().val();
                assert_eq!(f16.add(fa, fb), sab);
            }
        }
    }

    #[test]
    fn frobenius_relative_degree_is_identity() {
        let f16 = Field::new(2, 4).unwrap();
        let f4 = Field::new(2, 2).unwrap();
        for v in f16.elements() {
            assert_eq!(frobenius(&f16.elem(v), 2, &f4).unwrap().val(), v);
        }
    }

    #[test]
    fn embedding_ring_hom_and_tower() {
        let f2 = Field::new(2, 1).unwrap();
        let f4 = Field::new(2, 2).unwrap();
        let f16 = Field::new(2, 4).unwrap();

        // prime subfield maps identically
        let e24 = Embedding::new(&f2, &f4).unwrap();
        assert_eq!(e24.apply(0), 0);
        assert_eq!(e24.apply(1), 1);

        let e_4_16 = Embedding::new(&f4, &f16).unwrap();
        // ring homomorphism, exhaustive
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(
                    e_4_16.apply(f4.add(a, b)),
                    f16.add(e_4_16.apply(a), e_4_16.apply(b))
                );
                assert_eq!(
                    e_4_16.apply(f4.mul(a, b)),
                    f16.mul(e_4_16.apply(a), e_4_16.apply(b))
                );
            }
        }
        // injectivity
        let mut img: Vec<u32> = f4.elements().map(|v| e_4_16.apply(v)).collect();
        img.sort_unstable();
        img.dedup();
        assert_eq!(img.len(), 4);

        // image of the generator satisfies the F_4 modulus inside F_16
        let root = e_4_16.apply(2);
        let sq = f16.mul(root, root);
        assert_eq!(f16.add(f16.add(sq, root), 1), 0);

        // functoriality F_2 -> F_4 -> F_16 equals direct embedding
        let e216 = Embedding::new(&f2, &f16).unwrap();
        for v in f2.elements() {
            assert_eq!(e216.apply(v), e_4_16.apply(e24.apply(v)));
        }
    }

    #[test]
    fn embed_commutes_with_frobenius() {
        let f4 = Field::new(2, 2).unwrap();
        let f16 = Field::new(2, 4).unwrap();
        let f2 = Field::new(2, 1).unwrap();
        let e = Embedding::new(&f4, &f16).unwrap();
        for v in f4.elements() {
            let a = e.apply(frobenius(&f4.elem(v), 1, &f2).unwrap().val());
            let b = frobenius(&f16.elem(e.apply(v)), 1, &f2).unwrap().val();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn no_embedding_error() {
        let f8 = Field::new(2, 3).unwrap();
        let f4 = Field::new(2, 2).unwrap();
        assert!(Embedding::new(&f4, &f8).is_err());
    }
}
