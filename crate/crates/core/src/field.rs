//! Finite fields GF(p^a) with exp/log tables.
//!
//! Elements are encoded as integers `0..q` whose base-`p` digits are the
//! coefficients of a polynomial in the primitive element `x` (digit `i` is the
//! coefficient of `x^i`). The modulus is the lexicographically smallest monic
//! primitive polynomial of degree `a`, so the class of the polynomial variable
//! generates the multiplicative group and `exp[1]` is that generator.

use thiserror::Error;

/// Field element, encoded as base-`p` coefficients.
pub type Elem = u32;

/// Largest field order built by [`Field::new`].
pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{degree} exceeds the bound {}", MAX_ORDER)]
    TooLarge { p: u32, degree: u32 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("element {elem} out of range for field of order {order}")]
    OutOfRange { elem: Elem, order: u32 },
    #[error("zero raised to a negative power")]
    ZeroInverse,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^a` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut rest, mut a) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        a += 1;
    }
    (rest == 1).then_some((p, a))
}

#[derive(Debug, Clone)]
pub struct Field {
    p: u32,
    degree: u32,
    order: u32,
    /// Coefficients `m_0..m_a` of the monic modulus, constant term first.
    modulus: Vec<u32>,
    exp: Vec<Elem>,
    log: Vec<u32>,
    add: AddRule,
}

#[derive(Debug, Clone)]
enum AddRule {
    Xor,
    Table(Vec<Elem>),
    Digits,
}

impl Field {
    /// Builds GF(p^a).
    pub fn new(p: u32, degree: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if degree == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = (0..degree)
            .try_fold(1u64, |acc, _| {
                let next = acc * p as u64;
                (next <= MAX_ORDER as u64).then_some(next)
            })
            .ok_or(FieldError::TooLarge { p, degree })? as u32;

        let top = order / p;
        // Candidates enumerated by the integer code of (m_{a-1}, ..., m_0),
        // i.e. lexicographically with the highest coefficient first.
        for code in 0..order {
            if code % p == 0 {
                continue;
            }
            let lower = digits(code, p, degree);
            if let Some(exp) = power_cycle(p, order, top, &lower) {
                let mut modulus = lower;
                modulus.push(1);
                let mut log = vec![0u32; order as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                let add = if p == 2 {
                    AddRule::Xor
                } else if order <= 256 {
                    let n = order as usize;
                    let mut table = vec![0; n * n];
                    for u in 0..order {
                        for v in 0..order {
                            table[u as usize * n + v as usize] = digit_add(p, u, v);
                        }
                    }
                    AddRule::Table(table)
                } else {
                    AddRule::Digits
                };
                return Ok(Field { p, degree, order, modulus, exp, log, add });
            }
        }
        unreachable!("every finite field has a primitive polynomial")
    }

    /// Builds GF(q) for a prime power `q`.
    pub fn of_order(q: u32) -> Result<Self, FieldError> {
        let (p, a) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::new(p, a)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Powers of the primitive element, `exp[i] = x^i` for `0 <= i < q-1`.
    pub fn exp_table(&self) -> &[Elem] {
        &self.exp
    }

    /// Discrete logarithm of a nonzero element.
    pub fn log(&self, u: Elem) -> Option<u32> {
        (u != 0 && u < self.order).then(|| self.log[u as usize])
    }

    pub fn primitive(&self) -> Elem {
        self.exp[1 % self.exp.len()]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order
    }

    fn check(&self, u: Elem) -> Result<Elem, FieldError> {
        if u < self.order {
            Ok(u)
        } else {
            Err(FieldError::OutOfRange { elem: u, order: self.order })
        }
    }

    /// Sum of two elements. Panics on out-of-range operands.
    pub fn add(&self, u: Elem, v: Elem) -> Elem {
        assert!(u < self.order && v < self.order, "field operand out of range");
        match &self.add {
            AddRule::Xor => u ^ v,
            AddRule::Table(t) => t[u as usize * self.order as usize + v as usize],
            AddRule::Digits => digit_add(self.p, u, v),
        }
    }

    pub fn neg(&self, u: Elem) -> Elem {
        assert!(u < self.order, "field operand out of range");
        if self.p == 2 {
            return u;
        }
        let (mut rest, mut place, mut out) = (u, 1, 0);
        while rest > 0 {
            let d = rest % self.p;
            out += ((self.p - d) % self.p) * place;
            rest /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, u: Elem, v: Elem) -> Elem {
        self.add(u, self.neg(v))
    }

    /// Product of two elements. Panics on out-of-range operands.
    pub fn mul(&self, u: Elem, v: Elem) -> Elem {
        assert!(u < self.order && v < self.order, "field operand out of range");
        if u == 0 || v == 0 {
            return 0;
        }
        let n = self.order - 1;
        self.exp[((self.log[u as usize] + self.log[v as usize]) % n) as usize]
    }

    pub fn inv(&self, u: Elem) -> Option<Elem> {
        (u != 0).then(|| self.pow(u, -1))
    }

    /// `u^n`, with negative exponents allowed for nonzero `u`. `0^0 = 1`.
    /// Panics on `0` to a negative power.
    pub fn pow(&self, u: Elem, n: i64) -> Elem {
        self.checked_pow(u, n).expect("invalid power")
    }

    /// `x^n` for the primitive element `x`.
    pub fn exp(&self, n: i64) -> Elem {
        let m = (self.order - 1) as i64;
        self.exp[n.rem_euclid(m) as usize]
    }

    pub fn checked_add(&self, u: Elem, v: Elem) -> Result<Elem, FieldError> {
        Ok(self.add(self.check(u)?, self.check(v)?))
    }

    pub fn checked_mul(&self, u: Elem, v: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(self.check(u)?, self.check(v)?))
    }

    pub fn checked_pow(&self, u: Elem, n: i64) -> Result<Elem, FieldError> {
        self.check(u)?;
        if u == 0 {
            return match n {
                0 => Ok(1),
                n if n > 0 => Ok(0),
                _ => Err(FieldError::ZeroInverse),
            };
        }
        let m = (self.order - 1) as i64;
        Ok(self.exp(self.log[u as usize] as i64 * n.rem_euclid(m)))
    }
}

fn digits(mut code: u32, p: u32, len: u32) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

fn digit_add(p: u32, mut u: u32, mut v: u32) -> u32 {
    let (mut place, mut out) = (1, 0);
    while u > 0 || v > 0 {
        out += ((u % p + v % p) % p) * place;
        u /= p;
        v /= p;
        place *= p;
    }
    out
}

/// Walks the powers of the polynomial variable modulo `t^a + lower`; returns
/// the exp table when the variable has multiplicative order `q - 1`.
fn power_cycle(p: u32, order: u32, top: u32, lower: &[u32]) -> Option<Vec<Elem>> {
    // Reduction of t^a: the negated lower coefficients.
    let reduce: Vec<u32> = lower.iter().map(|&m| (p - m) % p).collect();
    let times_t = |e: u32| -> u32 {
        let lead = e / top;
        let mut shifted = digits((e % top) * p, p, lower.len() as u32);
        for (d, r) in shifted.iter_mut().zip(&reduce) {
            *d = (*d + lead * r) % p;
        }
        shifted.iter().rev().fold(0, |acc, &d| acc * p + d)
    };
    let n = (order - 1) as usize;
    let mut exp = Vec::with_capacity(n);
    let mut e = 1;
    for _ in 0..n {
        if !exp.is_empty() && e == 1 {
            return None;
        }
        exp.push(e);
        e = times_t(e);
    }
    (e == 1).then_some(exp)
}

/// Polynomial remainder over GF(p); coefficients constant term first.
fn poly_rem(p: u32, num: &[u32], den: &[u32]) -> Vec<u32> {
    let mut r = num.to_vec();
    let dl = den.len();
    let lead_inv = (1..p).find(|i| i * den[dl - 1] % p == 1).unwrap();
    while r.len() >= dl {
        let c = r[r.len() - 1] * lead_inv % p;
        let shift = r.len() - dl;
        for (i, &d) in den.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - c * d % p) % p;
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r
}

/// Irreducibility over GF(p) by trial division against every monic polynomial
/// of degree `1..=deg/2`. Coefficients are constant term first.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let deg = poly.len().saturating_sub(1);
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for code in 0..p.pow(d as u32) {
            let mut divisor = digits(code, p, d as u32);
            divisor.push(1);
            if poly_rem(p, poly, &divisor).is_empty() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_modulus_is_the_only_irreducible_quadratic() {
        // Oracle: the four monic quadratics over GF(2).
        let irreducible: Vec<Vec<u32>> = (0..4)
            .map(|c| vec![c % 2, c / 2, 1])
            .filter(|m| is_irreducible(2, m))
            .collect();
        assert_eq!(irreducible, vec![vec![1, 1, 1]]);
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.order(), 4);
    }

    #[test]
    fn gf3_primitive_is_two() {
        let f = Field::new(3, 1).unwrap();
        // 1 has order 1 and 2 has order 2 = q - 1 modulo 3.
        assert_eq!(f.primitive(), 2);
        assert_eq!(f.exp_table(), &[1, 2]);
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(Field::new(2, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(Field::new(2, 17), Err(FieldError::TooLarge { .. })));
        assert!(Field::new(2, 16).is_ok());
        assert_eq!(Field::of_order(6).unwrap_err(), FieldError::NotPrimePower(6));
    }

    #[test]
    fn small_arithmetic() {
        let f4 = Field::new(2, 2).unwrap();
        for u in f4.elements() {
            assert_eq!(f4.add(u, u), 0);
            assert_eq!(f4.mul(u, 1), u);
            assert_eq!(f4.mul(u, 0), 0);
        }
        assert_eq!(f4.add(2, 3), 1);
        assert_eq!(f4.mul(2, 2), 3);
        let f3 = Field::new(3, 1).unwrap();
        assert_eq!(f3.add(1, 2), 0);
        assert_eq!(f3.neg(1), 2);
        assert_eq!(f3.sub(0, 2), 1);
    }

    #[test]
    fn checked_ops_reject_out_of_range() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.checked_add(4, 0), Err(FieldError::OutOfRange { elem: 4, order: 4 }));
        assert!(f.checked_mul(1, 9).is_err());
        assert!(f.checked_pow(7, 1).is_err());
        assert_eq!(f.checked_pow(0, -1), Err(FieldError::ZeroInverse));
        assert_eq!(f.checked_pow(0, 0), Ok(1));
        assert_eq!(f.checked_pow(0, 3), Ok(0));
    }

    #[test]
    fn powers_of_primitive() {
        for (p, a) in [(2, 1), (2, 4), (3, 2), (5, 1), (7, 2), (2, 8)] {
            let f = Field::new(p, a).unwrap();
            let q = f.order() as i64;
            let x = f.primitive();
            assert_eq!(f.pow(x, q - 1), 1);
            for u in 1..f.order() {
                assert_eq!(f.pow(u, 0), 1);
                assert_eq!(f.mul(u, f.inv(u).unwrap()), 1);
            }
            assert!(is_irreducible(p, f.modulus()));
        }
        let f16 = Field::new(2, 4).unwrap();
        let mut seen: Vec<_> = (0..15).map(|i| f16.pow(f16.primitive(), i)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn large_odd_field_uses_digit_addition() {
        let f = Field::new(3, 6).unwrap();
        assert_eq!(f.order(), 729);
        for u in (0..729).step_by(37) {
            assert_eq!(f.add(u, f.neg(u)), 0);
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
