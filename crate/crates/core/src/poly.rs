//! Dense univariate polynomials over GF(q).
//!
//! Carries the machinery the polynomial-evaluation view of the matrix
//! families rests on: Hasse derivatives (the well-behaved derivative in
//! positive characteristic), Taylor expansion around arbitrary field points,
//! an evaluation-at-infinity convention that reads top coefficients in
//! reverse, root multiplicities, and binomial coefficients reduced modulo
//! the characteristic via Lucas digit products.

use std::fmt;

use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec, GfError};

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("evaluation at infinity needs derivative order below the context length: n = {n}, K = {k}")]
    InfinityOrderOutOfRange { n: usize, k: usize },
    #[error("evaluation at infinity needs the context length to exceed the degree: deg = {deg}, K = {k}")]
    InfinityDegreeTooLarge { deg: isize, k: usize },
    #[error("root multiplicity of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error(transparent)]
    Field(#[from] GfError),
}

/// A point a Hasse derivative can be evaluated at: a field element or the
/// formal point at infinity (which reads coefficients from the top).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EvalPoint {
    Finite(FieldElement),
    Infinity,
}

impl fmt::Display for EvalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalPoint::Finite(e) => write!(f, "{e}"),
            EvalPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Dense polynomial, coefficients indexed by power. Trailing zeros are
/// stripped after every operation; the zero polynomial has no coefficients
/// and degree -1.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{self}]")
    }
}

impl fmt::Display for Poly {
    /// Low-degree-first, comma-separated coefficient values.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![FieldElement::ONE],
        }
    }

    /// Builds from low-degree-first coefficients, stripping trailing zeros.
    pub fn from_coeffs(coeffs: Vec<FieldElement>) -> Self {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    /// The monomial c X^k.
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElement::ZERO; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial at the sentinel -1.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    /// Coefficient of X^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn add(&self, other: &Poly, spec: &FieldSpec) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| spec.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Poly, spec: &FieldSpec) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| spec.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: FieldElement, spec: &FieldSpec) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| spec.mul(c, a)).collect())
    }

    pub fn mul(&self, other: &Poly, spec: &FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = spec.add(out[i + j], spec.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Multiplies by the linear factor (X - beta) in place-friendly form.
    pub fn mul_linear(&self, beta: FieldElement, spec: &FieldSpec) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let n = self.coeffs.len();
        let neg_beta = spec.neg(beta);
        let mut out = vec![FieldElement::ZERO; n + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            out[i + 1] = spec.add(out[i + 1], a);
            out[i] = spec.add(out[i], spec.mul(neg_beta, a));
        }
        Poly::from_coeffs(out)
    }

    /// Plain evaluation by Horner's rule.
    pub fn eval(&self, x: FieldElement, spec: &FieldSpec) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = spec.add(spec.mul(acc, x), c);
        }
        acc
    }

    /// The i-th Hasse derivative: coefficient j of the result is
    /// C(i+j, i) * a_{i+j}.
    pub fn hasse_derivative(&self, i: usize, spec: &FieldSpec) -> Poly {
        if self.coeffs.len() <= i {
            return Poly::zero();
        }
        let coeffs = (i..self.coeffs.len())
            .map(|k| {
                let b = binomial_mod_p(k as u64, i as u64, spec);
                spec.mul(b, self.coeffs[k])
            })
            .collect();
        Poly::from_coeffs(coeffs)
    }

    /// Evaluates the n-th Hasse derivative at a finite point without
    /// materializing the derivative polynomial (Horner over the shifted
    /// coefficients).
    pub fn hasse_point_eval(&self, n: usize, beta: FieldElement, spec: &FieldSpec) -> FieldElement {
        if self.coeffs.len() <= n {
            return FieldElement::ZERO;
        }
        let mut acc = FieldElement::ZERO;
        for k in (n..self.coeffs.len()).rev() {
            let b = binomial_mod_p(k as u64, n as u64, spec);
            let term = spec.mul(b, self.coeffs[k]);
            acc = spec.add(spec.mul(acc, beta), term);
        }
        acc
    }

    /// Evaluates the n-th Hasse derivative at a finite point or at infinity.
    ///
    /// At infinity the value is the coefficient u_{K-1-n}, which requires the
    /// context length K to exceed the degree and n < K.
    pub fn hasse_eval(
        &self,
        n: usize,
        point: EvalPoint,
        k: usize,
        spec: &FieldSpec,
    ) -> Result<FieldElement, PolyError> {
        match point {
            EvalPoint::Finite(beta) => Ok(self.hasse_point_eval(n, beta, spec)),
            EvalPoint::Infinity => {
                if n >= k {
                    return Err(PolyError::InfinityOrderOutOfRange { n, k });
                }
                if self.degree() >= k as isize {
                    return Err(PolyError::InfinityDegreeTooLarge {
                        deg: self.degree(),
                        k,
                    });
                }
                Ok(self.coeff(k - 1 - n))
            }
        }
    }

    /// Taylor expansion around beta: coefficient n is the n-th Hasse
    /// derivative evaluated at beta.
    pub fn taylor_expand(&self, beta: FieldElement, spec: &FieldSpec) -> TaylorCoeffs {
        let coeffs = (0..self.coeffs.len())
            .map(|n| self.hasse_point_eval(n, beta, spec))
            .collect();
        TaylorCoeffs { beta, coeffs }
    }

    /// Multiplicity of beta as a root: the smallest n whose Taylor
    /// coefficient around beta is nonzero. Undefined for the zero polynomial.
    pub fn root_multiplicity(
        &self,
        beta: FieldElement,
        spec: &FieldSpec,
    ) -> Result<usize, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        for n in 0..self.coeffs.len() {
            if !self.hasse_point_eval(n, beta, spec).is_zero() {
                return Ok(n);
            }
        }
        unreachable!("top Taylor coefficient equals the leading coefficient")
    }
}

/// Taylor coefficients of a polynomial around an expansion point; index n
/// multiplies (X - beta)^n in the reconstruction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TaylorCoeffs {
    pub beta: FieldElement,
    pub coeffs: Vec<FieldElement>,
}

/// Inverse of [`Poly::taylor_expand`]: a_k = sum_n t_n C(n,k) (-beta)^{n-k}.
pub fn taylor_reconstruct(t: &TaylorCoeffs, spec: &FieldSpec) -> Poly {
    let d = t.coeffs.len();
    let neg_beta = spec.neg(t.beta);
    let mut coeffs = vec![FieldElement::ZERO; d];
    for (k, slot) in coeffs.iter_mut().enumerate() {
        let mut acc = FieldElement::ZERO;
        // powers of (-beta) built incrementally over n - k = 0, 1, ...
        let mut pw = FieldElement::ONE;
        for n in k..d {
            let b = binomial_mod_p(n as u64, k as u64, spec);
            acc = spec.add(acc, spec.mul(spec.mul(t.coeffs[n], b), pw));
            pw = spec.mul(pw, neg_beta);
        }
        *slot = acc;
    }
    Poly::from_coeffs(coeffs)
}

/// C(k, n) mod p embedded in the prime subfield, via Lucas digit products.
/// Returns zero when k < n.
pub fn binomial_mod_p(k: u64, n: u64, spec: &FieldSpec) -> FieldElement {
    spec.natural_map(lucas_binomial(k, n, spec.p()) as i64)
}

/// C(k, n) mod p as a bare integer in [0, p).
pub fn lucas_binomial(mut k: u64, mut n: u64, p: u64) -> u64 {
    if n > k {
        return 0;
    }
    let mut acc = 1u64;
    while n > 0 {
        let (kd, nd) = (k % p, n % p);
        if nd > kd {
            return 0;
        }
        acc = acc * binomial_digit(kd, nd, p) % p;
        if acc == 0 {
            return 0;
        }
        k /= p;
        n /= p;
    }
    acc
}

/// C(a, b) mod p for digits b <= a < p, by the multiplicative formula; every
/// factor is a unit because a < p.
fn binomial_digit(a: u64, b: u64, p: u64) -> u64 {
    let b = b.min(a - b);
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 1..=b {
        num = num * ((a - b + i) % p) % p;
        den = den * (i % p) % p;
    }
    num * mod_inv_prime(den, p) % p
}

fn mod_inv_prime(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p
    let mut base = a % p;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Checks the composition identity D^{i1} D^{i2} = C(i1+i2, i1) D^{i1+i2}
/// on a concrete polynomial; a test oracle, true for every input.
pub fn hasse_compose_check(a: &Poly, i1: usize, i2: usize, spec: &FieldSpec) -> bool {
    let lhs = a.hasse_derivative(i2, spec).hasse_derivative(i1, spec);
    let c = binomial_mod_p((i1 + i2) as u64, i1 as u64, spec);
    let rhs = a.hasse_derivative(i1 + i2, spec).scale(c, spec);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_new;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(q: u64) -> FieldSpec {
        field_new(q).unwrap()
    }

    fn poly(vals: &[u64], spec: &FieldSpec) -> Poly {
        Poly::from_coeffs(vals.iter().map(|&v| spec.element(v).unwrap()).collect())
    }

    fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, spec: &FieldSpec) -> Poly {
        let d = rng.random_range(0..=max_deg);
        Poly::from_coeffs(
            (0..=d)
                .map(|_| spec.element(rng.random_range(0..spec.q())).unwrap())
                .collect(),
        )
    }

    /// Exact quotient-and-remainder division by (X - beta); test oracle,
    /// independent of the Hasse machinery.
    fn divide_by_linear(a: &Poly, beta: FieldElement, spec: &FieldSpec) -> (Poly, FieldElement) {
        let mut q = vec![FieldElement::ZERO; a.coeffs().len().saturating_sub(1)];
        let mut carry = FieldElement::ZERO;
        for k in (0..a.coeffs().len()).rev() {
            let c = spec.add(a.coeff(k), spec.mul(carry, beta));
            if k == 0 {
                return (Poly::from_coeffs(q), c);
            }
            q[k - 1] = c;
            carry = c;
        }
        (Poly::zero(), FieldElement::ZERO)
    }

    #[test]
    fn degree_conventions() {
        let f = gf(3);
        assert_eq!(Poly::zero().degree(), -1);
        assert_eq!(poly(&[0, 0, 0], &f).degree(), -1);
        assert_eq!(poly(&[2, 0, 1, 0], &f).degree(), 2);
    }

    #[test]
    fn binomial_examples() {
        let f3 = gf(3);
        assert_eq!(binomial_mod_p(2, 1, &f3).value(), 2);
        let f2 = gf(2);
        assert_eq!(binomial_mod_p(4, 2, &f2).value(), 0);
        for p in [2u64, 3, 5, 7] {
            let f = gf(p);
            for k in 0..40 {
                assert_eq!(binomial_mod_p(k, k, &f), FieldElement::ONE);
            }
        }
        assert_eq!(lucas_binomial(3, 5, 7), 0);
    }

    #[test]
    fn binomial_agrees_with_big_integer_oracle() {
        // Pascal's triangle in u128 never overflows at this size
        let mut table = vec![vec![0u128; 65]; 65];
        for k in 0..65 {
            table[k][0] = 1;
            for n in 1..=k {
                table[k][n] = table[k - 1][n - 1] + if n <= k - 1 { table[k - 1][n] } else { 0 };
            }
        }
        for p in [2u64, 3, 5, 7] {
            for k in 0..=64u64 {
                for n in 0..=64u64 {
                    let expect = if n > k {
                        0
                    } else {
                        (table[k as usize][n as usize] % p as u128) as u64
                    };
                    assert_eq!(lucas_binomial(k, n, p), expect, "C({k},{n}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn hasse_derivative_examples() {
        let f2 = gf(2);
        // D^2(X^3) = C(3,2) X = X over GF(2)
        let x3 = poly(&[0, 0, 0, 1], &f2);
        assert_eq!(x3.hasse_derivative(2, &f2), poly(&[0, 1], &f2));

        let f3 = gf(3);
        // first Hasse derivative of X^3 vanishes in characteristic 3
        let x3 = poly(&[0, 0, 0, 1], &f3);
        assert!(x3.hasse_derivative(1, &f3).is_zero());

        let c = poly(&[2], &f3);
        assert!(c.hasse_derivative(1, &f3).is_zero());
        assert_eq!(c.hasse_derivative(0, &f3), c);
    }

    #[test]
    fn hasse_compose_examples() {
        let f3 = gf(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = random_poly(&mut rng, 7, &f3);
            assert!(hasse_compose_check(&a, 1, 1, &f3));
        }
        let f2 = gf(2);
        let x4 = poly(&[0, 0, 0, 0, 1], &f2);
        assert!(hasse_compose_check(&x4, 1, 1, &f2));
        // both sides are zero there since C(2,1) = 0 mod 2
        assert!(x4
            .hasse_derivative(1, &f2)
            .hasse_derivative(1, &f2)
            .is_zero());
        assert!(hasse_compose_check(&Poly::zero(), 3, 2, &f2));
    }

    #[test]
    fn taylor_expand_examples() {
        let f3 = gf(3);
        let x2 = poly(&[0, 0, 1], &f3);
        let one = f3.element(1).unwrap();
        let t = x2.taylor_expand(one, &f3);
        assert_eq!(
            t.coeffs,
            vec![
                f3.element(1).unwrap(),
                f3.element(2).unwrap(),
                f3.element(1).unwrap()
            ]
        );

        // beta = 0 keeps the plain coefficients
        let a = poly(&[2, 1, 0, 2], &f3);
        let t0 = a.taylor_expand(FieldElement::ZERO, &f3);
        assert_eq!(t0.coeffs, a.coeffs().to_vec());

        // (X - beta)^m expands to the unit vector at index m
        for q in [3u64, 4, 5] {
            let f = gf(q);
            for beta in f.elements() {
                for m in 0..5usize {
                    let mut p = Poly::one();
                    for _ in 0..m {
                        p = p.mul_linear(beta, &f);
                    }
                    let t = p.taylor_expand(beta, &f);
                    for (n, c) in t.coeffs.iter().enumerate() {
                        let expect = if n == m {
                            FieldElement::ONE
                        } else {
                            FieldElement::ZERO
                        };
                        assert_eq!(*c, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn taylor_reconstruct_examples() {
        let f3 = gf(3);
        let t = TaylorCoeffs {
            beta: f3.element(1).unwrap(),
            coeffs: vec![
                f3.element(1).unwrap(),
                f3.element(2).unwrap(),
                f3.element(1).unwrap(),
            ],
        };
        assert_eq!(taylor_reconstruct(&t, &f3), poly(&[0, 0, 1], &f3));

        // reconstruct(e_m, beta) = (X - beta)^m
        let f5 = gf(5);
        let beta = f5.element(3).unwrap();
        let mut coeffs = vec![FieldElement::ZERO; 4];
        coeffs[3] = FieldElement::ONE;
        let rec = taylor_reconstruct(&TaylorCoeffs { beta, coeffs }, &f5);
        let mut expect = Poly::one();
        for _ in 0..3 {
            expect = expect.mul_linear(beta, &f5);
        }
        assert_eq!(rec, expect);

        // beta = 0 copies the coefficients through
        let t0 = TaylorCoeffs {
            beta: FieldElement::ZERO,
            coeffs: vec![f3.element(2).unwrap(), f3.element(1).unwrap()],
        };
        assert_eq!(taylor_reconstruct(&t0, &f3), poly(&[2, 1], &f3));
    }

    #[test]
    fn taylor_round_trip_randomized() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = gf(q);
            let mut rng = ChaCha8Rng::seed_from_u64(q);
            for _ in 0..40 {
                let a = random_poly(&mut rng, 8, &f);
                for beta in f.elements() {
                    let t = a.taylor_expand(beta, &f);
                    assert_eq!(taylor_reconstruct(&t, &f), a, "q={q} beta={beta}");
                }
            }
        }
    }

    #[test]
    fn hasse_eval_examples() {
        let f3 = gf(3);
        // 1 + 2L + L^2, n = 0 at infinity with K = 3 reads the top coefficient
        let a = poly(&[1, 2, 1], &f3);
        assert_eq!(
            a.hasse_eval(0, EvalPoint::Infinity, 3, &f3).unwrap().value(),
            1
        );
        // X^2: first Hasse derivative is 2X, at 1 that is 2
        let x2 = poly(&[0, 0, 1], &f3);
        assert_eq!(
            x2.hasse_eval(1, EvalPoint::Finite(f3.element(1).unwrap()), 3, &f3)
                .unwrap()
                .value(),
            2
        );
        // zero polynomial evaluates to zero everywhere
        assert_eq!(
            Poly::zero()
                .hasse_eval(1, EvalPoint::Infinity, 4, &f3)
                .unwrap(),
            FieldElement::ZERO
        );
        assert!(a.hasse_eval(3, EvalPoint::Infinity, 3, &f3).is_err());
        assert!(a.hasse_eval(0, EvalPoint::Infinity, 2, &f3).is_err());
    }

    #[test]
    fn hasse_point_eval_matches_derivative_polynomial() {
        for q in [3u64, 4, 7, 9] {
            let f = gf(q);
            let mut rng = ChaCha8Rng::seed_from_u64(100 + q);
            for _ in 0..30 {
                let a = random_poly(&mut rng, 9, &f);
                for n in 0..6 {
                    for beta in f.elements() {
                        assert_eq!(
                            a.hasse_point_eval(n, beta, &f),
                            a.hasse_derivative(n, &f).eval(beta, &f)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn root_multiplicity_examples() {
        let f3 = gf(3);
        let one = f3.element(1).unwrap();
        let two = f3.element(2).unwrap();
        // (X-1)^2 (X-2)
        let a = Poly::one()
            .mul_linear(one, &f3)
            .mul_linear(one, &f3)
            .mul_linear(two, &f3);
        assert_eq!(a.root_multiplicity(one, &f3).unwrap(), 2);
        assert_eq!(a.root_multiplicity(FieldElement::ZERO, &f3).unwrap(), 0);
        assert!(!a.eval(FieldElement::ZERO, &f3).is_zero());

        let xm = Poly::monomial(FieldElement::ONE, 4);
        assert_eq!(xm.root_multiplicity(FieldElement::ZERO, &f3).unwrap(), 4);

        assert!(matches!(
            Poly::zero().root_multiplicity(one, &f3),
            Err(PolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn root_multiplicity_agrees_with_division_oracle() {
        for q in [3u64, 5, 8] {
            let f = gf(q);
            let mut rng = ChaCha8Rng::seed_from_u64(7 * q);
            for _ in 0..60 {
                // random product of linear factors times a random unit
                let mut a = Poly::from_coeffs(vec![f
                    .element(rng.random_range(1..f.q()))
                    .unwrap()]);
                for _ in 0..rng.random_range(0..6) {
                    let r = f.element(rng.random_range(0..f.q())).unwrap();
                    a = a.mul_linear(r, &f);
                }
                for beta in f.elements() {
                    let got = a.root_multiplicity(beta, &f).unwrap();
                    // strip (X - beta) factors until the remainder is nonzero
                    let mut m = 0;
                    let mut cur = a.clone();
                    loop {
                        let (quot, rem) = divide_by_linear(&cur, beta, &f);
                        if !rem.is_zero() {
                            break;
                        }
                        m += 1;
                        cur = quot;
                    }
                    assert_eq!(got, m, "q={q} beta={beta} a={a}");
                }
            }
        }
    }

    #[test]
    fn hasse_product_rule_randomized() {
        for q in [2u64, 3, 5, 9] {
            let f = gf(q);
            let mut rng = ChaCha8Rng::seed_from_u64(13 * q);
            for _ in 0..40 {
                let a = random_poly(&mut rng, 6, &f);
                let b = random_poly(&mut rng, 6, &f);
                let prod = a.mul(&b, &f);
                for i in 0..=5usize {
                    let lhs = prod.hasse_derivative(i, &f);
                    let mut rhs = Poly::zero();
                    for i1 in 0..=i {
                        rhs = rhs.add(
                            &a.hasse_derivative(i1, &f)
                                .mul(&b.hasse_derivative(i - i1, &f), &f),
                            &f,
                        );
                    }
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn hasse_three_factor_rule() {
        let f = gf(5);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let fs = [
                random_poly(&mut rng, 3, &f),
                random_poly(&mut rng, 3, &f),
                random_poly(&mut rng, 3, &f),
            ];
            let prod = fs[0].mul(&fs[1], &f).mul(&fs[2], &f);
            for i in 0..=4usize {
                let lhs = prod.hasse_derivative(i, &f);
                let mut rhs = Poly::zero();
                for i0 in 0..=i {
                    for i1 in 0..=(i - i0) {
                        let i2 = i - i0 - i1;
                        let term = fs[0]
                            .hasse_derivative(i0, &f)
                            .mul(&fs[1].hasse_derivative(i1, &f), &f)
                            .mul(&fs[2].hasse_derivative(i2, &f), &f);
                        rhs = rhs.add(&term, &f);
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn hasse_linearity() {
        let f = gf(9);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let a = random_poly(&mut rng, 7, &f);
            let b = random_poly(&mut rng, 7, &f);
            let c = f.element(rng.random_range(0..f.q())).unwrap();
            let d = f.element(rng.random_range(0..f.q())).unwrap();
            for i in 0..5 {
                let lhs = a.scale(c, &f).add(&b.scale(d, &f), &f).hasse_derivative(i, &f);
                let rhs = a
                    .hasse_derivative(i, &f)
                    .scale(c, &f)
                    .add(&b.hasse_derivative(i, &f).scale(d, &f), &f);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn hasse_power_rule_exhaustive() {
        // D^i((X-g)^k) = C(k,i) (X-g)^{k-i} for k <= 8, all g, q <= 9
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = gf(q);
            for gamma in f.elements() {
                let mut pw = Poly::one();
                for k in 0..=8usize {
                    for i in 0..=k {
                        let lhs = pw.hasse_derivative(i, &f);
                        let mut base = Poly::one();
                        for _ in 0..k - i {
                            base = base.mul_linear(gamma, &f);
                        }
                        let rhs = base.scale(binomial_mod_p(k as u64, i as u64, &f), &f);
                        assert_eq!(lhs, rhs, "q={q} gamma={gamma} k={k} i={i}");
                    }
                    pw = pw.mul_linear(gamma, &f);
                }
            }
        }
    }
}
