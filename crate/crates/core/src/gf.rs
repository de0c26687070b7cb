//! Exact arithmetic in GF(p^s).
//!
//! Elements are stored in polynomial basis, packed as the radix-p integer of
//! their coefficient vector; that integer also defines the canonical total
//! ordering used everywhere (file formats, primitive-element selection).
//! All operations are exact and go through a [`FieldSpec`], which fixes the
//! modulus and the designated primitive element deterministically so that two
//! runs (or two implementations) agree bit for bit.
//!
//! Multiplications and inversions bump a thread-local counter, which the
//! decoder benchmarks read. Additions are deliberately not counted.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order for which exp/log tables are built (extension fields
/// only; prime fields multiply directly).
const TABLE_LIMIT: u64 = 1 << 16;

/// Extension degrees are bounded by the table limit with p = 2.
const MAX_DEGREE: usize = 16;

#[derive(Debug, Error)]
pub enum GfError {
    #[error("q = {q} is not a prime power ({factorization})")]
    NotPrimePower { q: u64, factorization: String },
    #[error("q must be at least 2, got {q}")]
    OrderTooSmall { q: u64 },
    #[error("division by zero in GF({q})")]
    DivisionByZero { q: u64 },
    #[error("element {value} of GF({q}) has multiplicative order {order}, not {expected}; it is not primitive")]
    NotPrimitive {
        value: u64,
        q: u64,
        order: u64,
        expected: u64,
    },
    #[error("negative exponent {exponent} of the zero element is undefined")]
    NegativePowerOfZero { exponent: i64 },
    #[error("value {value} is out of range for GF({q})")]
    OutOfRange { value: u64, q: u64 },
}

thread_local! {
    static FIELD_OPS: Cell<u64> = const { Cell::new(0) };
}

/// Resets this thread's multiplication/inversion counter to zero.
pub fn reset_op_count() {
    FIELD_OPS.with(|c| c.set(0));
}

/// Number of field multiplications and inversions performed on this thread
/// since the last [`reset_op_count`].
pub fn op_count() -> u64 {
    FIELD_OPS.with(|c| c.get())
}

/// Runs `f` and returns its result along with the number of counted field
/// operations it performed on this thread.
pub fn with_op_count<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let before = op_count();
    let out = f();
    (out, op_count() - before)
}

#[inline]
fn bump_op_count() {
    FIELD_OPS.with(|c| c.set(c.get() + 1));
}

/// An element of GF(p^s), packed as the radix-p value of its coefficient
/// vector (coefficient of X^0 is the least significant digit).
///
/// The zero element is `0`, the one element is `1`, and the derived `Ord`
/// is the canonical ordering of the field specification.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// The canonical radix-p integer in [0, q).
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Discrete exp/log tables over the designated primitive element; built for
/// extension fields of small order so multiplication avoids the generic
/// polynomial-basis path.
struct Tables {
    /// exp[i] = alpha^i for i in [0, 2(q-1)); doubled so a log sum needs no
    /// reduction before lookup.
    exp: Vec<u64>,
    /// log[v] = discrete log of v base alpha; log[0] is unused.
    log: Vec<u64>,
}

/// A concrete GF(p^s): characteristic, extension degree, modulus, and the
/// designated primitive element, all chosen deterministically by
/// [`field_new`].
#[derive(Clone)]
pub struct FieldSpec {
    p: u64,
    s: u32,
    q: u64,
    /// Monic irreducible of degree s over GF(p), low-degree-first, length
    /// s + 1. For s = 1 this is the placeholder X (coefficients [0, 1]) and
    /// is never used in arithmetic.
    modulus: Vec<u64>,
    alpha: FieldElement,
    tables: Option<Arc<Tables>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.s == other.s && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("s", &self.s)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)
    }
}

/// Builds the field of order `q`, rejecting non-prime-powers with the
/// offending factorization.
///
/// The modulus is the lexicographically smallest monic irreducible of degree
/// s over GF(p) (coefficients compared low-degree-first) and the primitive
/// element is the smallest in canonical ordering, so the construction is
/// reproducible without a Conway-polynomial table.
pub fn field_new(q: u64) -> Result<FieldSpec, GfError> {
    if q < 2 {
        return Err(GfError::OrderTooSmall { q });
    }
    let (p, s) = prime_power_split(q)?;
    let modulus = if s == 1 {
        vec![0, 1]
    } else {
        smallest_irreducible(p, s)
    };
    let mut spec = FieldSpec {
        p,
        s,
        q,
        modulus,
        alpha: FieldElement::ZERO,
        tables: None,
    };
    spec.alpha = spec.find_primitive_element();
    if spec.s > 1 && spec.q <= TABLE_LIMIT {
        spec.tables = Some(Arc::new(spec.build_tables()));
    }
    Ok(spec)
}

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus coefficients, low-degree-first, length s + 1.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// The designated primitive element (smallest in canonical ordering).
    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    /// Checked constructor from a canonical value.
    pub fn element(&self, value: u64) -> Result<FieldElement, GfError> {
        if value < self.q {
            Ok(FieldElement(value))
        } else {
            Err(GfError::OutOfRange { value, q: self.q })
        }
    }

    /// All field elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// Embeds an integer (of either sign) into the prime subfield.
    pub fn natural_map(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u64)
    }

    #[inline]
    fn digits(&self, v: u64) -> [u64; MAX_DEGREE] {
        let mut d = [0u64; MAX_DEGREE];
        let mut v = v;
        for slot in d.iter_mut().take(self.s as usize) {
            *slot = v % self.p;
            v /= self.p;
        }
        d
    }

    #[inline]
    fn pack(&self, d: &[u64]) -> u64 {
        let mut v = 0u64;
        for i in (0..self.s as usize).rev() {
            v = v * self.p + d[i];
        }
        v
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.s == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let da = self.digits(a.0);
        let db = self.digits(b.0);
        let mut out = [0u64; MAX_DEGREE];
        for i in 0..self.s as usize {
            out[i] = (da[i] + db[i]) % self.p;
        }
        FieldElement(self.pack(&out))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.s == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let da = self.digits(a.0);
        let mut out = [0u64; MAX_DEGREE];
        for i in 0..self.s as usize {
            out[i] = (self.p - da[i]) % self.p;
        }
        FieldElement(self.pack(&out))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// Field multiplication; counted.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        bump_op_count();
        self.mul_raw(a, b)
    }

    fn mul_raw(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.s == 1 {
            return FieldElement(mod_mul(a.0, b.0, self.p));
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if let Some(t) = &self.tables {
            let idx = (t.log[a.0 as usize] + t.log[b.0 as usize]) as usize;
            return FieldElement(t.exp[idx]);
        }
        self.mul_generic(a, b)
    }

    /// Polynomial-basis multiply-and-reduce; the fallback when no tables.
    fn mul_generic(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = self.s as usize;
        let da = self.digits(a.0);
        let db = self.digits(b.0);
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..s {
            if da[i] == 0 {
                continue;
            }
            for j in 0..s {
                prod[i + j] = (prod[i + j] + mod_mul(da[i], db[j], self.p)) % self.p;
            }
        }
        // reduce by the monic modulus, top degree down
        for i in (s..2 * s - 1).rev() {
            let f = prod[i];
            if f == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..s {
                let sub = mod_mul(f, self.modulus[j], self.p);
                prod[i - s + j] = (prod[i - s + j] + self.p - sub) % self.p;
            }
        }
        FieldElement(self.pack(&prod[..s]))
    }

    /// Multiplicative inverse; counted. Fails on zero.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.0 == 0 {
            return Err(GfError::DivisionByZero { q: self.q });
        }
        bump_op_count();
        if self.s == 1 {
            return Ok(FieldElement(mod_inv(a.0, self.p)));
        }
        if let Some(t) = &self.tables {
            let idx = ((self.q - 1) - t.log[a.0 as usize]) as usize;
            return Ok(FieldElement(t.exp[idx]));
        }
        Ok(self.pow_raw(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        let ib = self.inv(b)?;
        Ok(self.mul(a, ib))
    }

    /// a^e by square-and-multiply, with the convention 0^0 = 1. Not counted.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        self.pow_raw(a, e)
    }

    fn pow_raw(&self, a: FieldElement, mut e: u64) -> FieldElement {
        if a.0 == 0 {
            return if e == 0 {
                FieldElement::ONE
            } else {
                FieldElement::ZERO
            };
        }
        // nonzero base: reduce the exponent in the cyclic group
        if e >= self.q - 1 && self.q > 2 {
            e %= self.q - 1;
        }
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// a^e for signed e; a negative exponent requires a nonzero base.
    pub fn pow_signed(&self, a: FieldElement, e: i64) -> Result<FieldElement, GfError> {
        if e >= 0 {
            return Ok(self.pow_raw(a, e as u64));
        }
        if a.0 == 0 {
            return Err(GfError::NegativePowerOfZero { exponent: e });
        }
        let group = (self.q - 1) as i64;
        Ok(self.pow_raw(a, e.rem_euclid(group) as u64))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElement) -> Result<u64, GfError> {
        if a.0 == 0 {
            return Err(GfError::DivisionByZero { q: self.q });
        }
        let mut ord = self.q - 1;
        for (r, _) in factorize(self.q - 1) {
            while ord % r == 0 && self.pow_raw(a, ord / r) == FieldElement::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Errors unless `a` generates the multiplicative group.
    pub fn require_primitive(&self, a: FieldElement) -> Result<(), GfError> {
        let expected = self.q - 1;
        let order = self.order(a)?;
        if order == expected {
            Ok(())
        } else {
            Err(GfError::NotPrimitive {
                value: a.0,
                q: self.q,
                order,
                expected,
            })
        }
    }

    fn find_primitive_element(&self) -> FieldElement {
        for v in 1..self.q {
            let e = FieldElement(v);
            if self.order(e).expect("nonzero") == self.q - 1 {
                return e;
            }
        }
        unreachable!("every finite field has a primitive element")
    }

    fn build_tables(&self) -> Tables {
        let n = (self.q - 1) as usize;
        let mut exp = vec![0u64; 2 * n];
        let mut log = vec![0u64; self.q as usize];
        let mut acc = FieldElement::ONE;
        for (i, slot) in exp.iter_mut().enumerate().take(n) {
            *slot = acc.0;
            log[acc.0 as usize] = i as u64;
            acc = self.mul_generic(acc, self.alpha);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        Tables { exp, log }
    }
}

/// Deterministic primitive element of the field, recomputed from scratch
/// (exposed as an operation in its own right; `FieldSpec::alpha` caches it).
pub fn primitive_element(spec: &FieldSpec) -> FieldElement {
    spec.find_primitive_element()
}

fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Inverse mod a prime by the extended Euclidean algorithm.
fn mod_inv(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_t, mut t) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_t, t) = (t, old_t - quot * t);
    }
    debug_assert_eq!(old_r, 1, "inverse of a nonunit");
    old_t.rem_euclid(p as i128) as u64
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn format_factorization(q: u64) -> String {
    let parts: Vec<String> = factorize(q)
        .into_iter()
        .map(|(p, e)| {
            if e == 1 {
                format!("{p}")
            } else {
                format!("{p}^{e}")
            }
        })
        .collect();
    format!("{q} = {}", parts.join(" * "))
}

fn prime_power_split(q: u64) -> Result<(u64, u32), GfError> {
    let factors = factorize(q);
    if factors.len() != 1 {
        return Err(GfError::NotPrimePower {
            q,
            factorization: format_factorization(q),
        });
    }
    let (p, s) = factors[0];
    Ok((p, s))
}

/// Lexicographically smallest (low-degree-first) monic irreducible of degree
/// s over GF(p), as a coefficient list of length s + 1.
fn smallest_irreducible(p: u64, s: u32) -> Vec<u64> {
    let s = s as usize;
    let count = (p as u128).pow(s as u32);
    let mut idx: u128 = 0;
    while idx < count {
        // idx enumerates lower-coefficient tuples (c_0, ..., c_{s-1}) in
        // lexicographic order: c_0 is the most significant digit.
        let mut coeffs = vec![0u64; s + 1];
        coeffs[s] = 1;
        let mut rem = idx;
        for i in (0..s).rev() {
            coeffs[i] = (rem % p as u128) as u64;
            rem /= p as u128;
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
        idx += 1;
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}

/// Trial division by every monic polynomial of degree up to s/2.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let s = poly.len() - 1;
    for d in 1..=s / 2 {
        let count = (p as u128).pow(d as u32);
        for idx in 0..count {
            let mut div = vec![0u64; d + 1];
            div[d] = 1;
            let mut rem = idx;
            for c in div.iter_mut().take(d) {
                *c = (rem % p as u128) as u64;
                rem /= p as u128;
            }
            if poly_rem_is_zero(poly, &div, p) {
                return false;
            }
        }
    }
    true
}

/// True iff `num` is divisible by the monic `div` in GF(p)[X].
fn poly_rem_is_zero(num: &[u64], div: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = num.to_vec();
    let dd = div.len() - 1;
    for i in (dd..rem.len()).rev() {
        let f = rem[i];
        if f == 0 {
            continue;
        }
        rem[i] = 0;
        for j in 0..dd {
            let sub = mod_mul(f, div[j], p);
            rem[i - dd + j] = (rem[i - dd + j] + p - sub) % p;
        }
    }
    rem.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> FieldSpec {
        field_new(q).unwrap()
    }

    #[test]
    fn field_new_gf3() {
        let f = gf(3);
        assert_eq!((f.p(), f.s(), f.q()), (3, 1, 3));
        assert_eq!(f.alpha().value(), 2);
    }

    #[test]
    fn field_new_gf4_modulus_and_alpha() {
        let f = gf(4);
        assert_eq!((f.p(), f.s()), (2, 2));
        // X^2 + X + 1, low-degree-first
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // alpha = X, i.e. digit vector (0, 1)
        assert_eq!(f.alpha().value(), 2);
    }

    #[test]
    fn field_new_rejects_non_prime_power() {
        let err = field_new(6).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("6 = 2 * 3"), "got: {msg}");
        assert!(field_new(12).is_err());
        assert!(field_new(1).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let f3 = gf(3);
        let two = f3.element(2).unwrap();
        assert_eq!(f3.add(two, two).value(), 1);

        let f4 = gf(4);
        let x = f4.alpha();
        // X * X = X + 1 mod X^2 + X + 1
        assert_eq!(f4.mul(x, x).value(), 3);

        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = gf(q);
            assert_eq!(f.pow(f.alpha(), q - 1), FieldElement::ONE);
        }
    }

    #[test]
    fn inv_of_zero_fails() {
        let f = gf(5);
        assert!(matches!(
            f.inv(FieldElement::ZERO),
            Err(GfError::DivisionByZero { q: 5 })
        ));
    }

    #[test]
    fn natural_map_examples() {
        assert_eq!(gf(4).natural_map(6).value(), 0);
        assert_eq!(gf(3).natural_map(-1).value(), 2);
        assert_eq!(gf(5).natural_map(7).value(), 2);
    }

    #[test]
    fn natural_map_is_ring_homomorphism() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for q in [2u64, 3, 4, 9, 25, 49] {
            let f = gf(q);
            for _ in 0..200 {
                let a: i64 = rng.random_range(-1_000_000..1_000_000);
                let b: i64 = rng.random_range(-1_000_000..1_000_000);
                assert_eq!(
                    f.natural_map(a + b),
                    f.add(f.natural_map(a), f.natural_map(b))
                );
                assert_eq!(
                    f.natural_map(a * b),
                    f.mul(f.natural_map(a), f.natural_map(b))
                );
            }
        }
    }

    #[test]
    fn primitive_element_examples() {
        assert_eq!(gf(2).alpha().value(), 1);
        assert_eq!(gf(3).alpha().value(), 2);
        assert_eq!(gf(5).alpha().value(), 2);
        // brute-force order cross-check for GF(5): 2 has order 4
        let f = gf(5);
        let mut acc = FieldElement::ONE;
        let mut ord = 0;
        loop {
            acc = f.mul(acc, f.element(2).unwrap());
            ord += 1;
            if acc == FieldElement::ONE {
                break;
            }
        }
        assert_eq!(ord, 4);
    }

    #[test]
    fn alpha_powers_enumerate_nonzero_elements() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = gf(q);
            let mut seen = vec![false; q as usize];
            let mut acc = FieldElement::ONE;
            for _ in 0..q - 1 {
                assert!(!seen[acc.value() as usize], "repeated power in GF({q})");
                seen[acc.value() as usize] = true;
                acc = f.mul(acc, f.alpha());
            }
            assert!(seen[1..].iter().all(|&b| b));
            assert!(!seen[0]);
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = gf(q);
            let elems: Vec<_> = f.elements().collect();
            for &a in &elems {
                for &b in &elems {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &elems {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                    }
                }
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    let ai = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, ai), FieldElement::ONE);
                }
            }
        }
    }

    #[test]
    fn field_axioms_larger_orders() {
        use rand::{Rng, SeedableRng};
        // inverses and the Frobenius identity exhaustively, associativity and
        // distributivity on random triples
        for q in [32u64, 49, 64] {
            let f = gf(q);
            for a in f.elements() {
                assert_eq!(f.pow(a, q), f.mul(a, FieldElement::ONE));
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(q);
            for _ in 0..2000 {
                let a = f.element(rng.random_range(0..q)).unwrap();
                let b = f.element(rng.random_range(0..q)).unwrap();
                let c = f.element(rng.random_range(0..q)).unwrap();
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            }
        }
    }

    #[test]
    fn frobenius_exhaustive_small() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = gf(q);
            for a in f.elements() {
                assert_eq!(f.pow(a, q), a);
            }
        }
    }

    #[test]
    fn pow_signed_negative_exponents() {
        let f = gf(3);
        let two = f.element(2).unwrap();
        // 2^(-1) = 2 in GF(3)
        assert_eq!(f.pow_signed(two, -1).unwrap().value(), 2);
        assert_eq!(f.pow_signed(two, -2).unwrap().value(), 1);
        assert!(f.pow_signed(FieldElement::ZERO, -1).is_err());
    }

    #[test]
    fn op_counter_counts_mul_and_inv_only() {
        let f = gf(7);
        let a = f.element(3).unwrap();
        let b = f.element(5).unwrap();
        let ((), n) = with_op_count(|| {
            f.add(a, b);
            f.sub(a, b);
            let _ = f.mul(a, b);
            let _ = f.inv(a).unwrap();
        });
        assert_eq!(n, 2);
    }

    #[test]
    fn table_and_generic_paths_agree() {
        for q in [4u64, 8, 9, 16, 27] {
            let f = gf(q);
            assert!(f.tables.is_some());
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul_raw(a, b), f.mul_generic(a, b));
                }
            }
        }
    }
}
