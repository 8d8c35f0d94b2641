//! Prime-field arithmetic.
//!
//! All matrix entries, evaluation points and interpolation weights live in a
//! prime field `GF(p)` with `p < 2^64`. Elements are always kept as their least
//! nonnegative residue, so two equal elements have identical bit patterns.
//!
//! [`PrimeField`] exposes unchecked arithmetic on raw residues (`u64`), which
//! the matrix kernels use, while [`FieldElement`] carries its modulus and
//! rejects operands from a different field.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime field `GF(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// `GF(65537)`, the default for tests and fixtures.
    pub const P65537: PrimeField = PrimeField { p: 65537 };
    /// `GF(2^31 - 1)`, for larger runs.
    pub const MERSENNE31: PrimeField = PrimeField { p: (1 << 31) - 1 };

    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeField { p })
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Wraps an arbitrary integer into the field.
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.p,
            p: self.p,
        }
    }

    /// Maps a signed integer to its residue class.
    pub fn elem_i64(&self, value: i64) -> FieldElement {
        self.elem((value as i128).rem_euclid(self.p as i128) as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        self.elem(rng.gen_range(0..self.p))
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            // a < b < p, so the difference fits.
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Multiplicative inverse of a canonical residue by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::DivisionByZero { index: None });
        }
        let (mut old_r, mut r) = (a as i128, self.p as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let quot = old_r / r;
            (old_r, r) = (r, old_r - quot * r);
            (old_s, s) = (s, old_s - quot * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(old_s.rem_euclid(self.p as i128) as u64)
    }

    /// Inverts every residue with a single field inversion (Montgomery's trick).
    pub fn batch_inv_raw(&self, values: &[u64]) -> Result<Vec<u64>> {
        let mut prefix = Vec::with_capacity(values.len());
        let mut acc = 1u64;
        for (index, &v) in values.iter().enumerate() {
            if v % self.p == 0 {
                return Err(Error::DivisionByZero { index: Some(index) });
            }
            prefix.push(acc);
            acc = self.mul(acc, v);
        }
        let mut inv_acc = self.inv(acc)?;
        let mut out = vec![0; values.len()];
        for i in (0..values.len()).rev() {
            out[i] = self.mul(inv_acc, prefix[i]);
            inv_acc = self.mul(inv_acc, values[i]);
        }
        Ok(out)
    }

    fn check(&self, e: FieldElement) -> Result<u64> {
        if e.p == self.p {
            Ok(e.value)
        } else {
            Err(Error::FieldMismatch {
                left: self.p,
                right: e.p,
            })
        }
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// An element of some [`PrimeField`], tagged with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    p: u64,
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
}

/// Applies a binary field operation, rejecting operands from different fields.
pub fn field_op(kind: FieldOp, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
    let field = a.field();
    let (x, y) = (a.value, field.check(b)?);
    let value = match kind {
        FieldOp::Add => field.add(x, y),
        FieldOp::Sub => field.sub(x, y),
        FieldOp::Mul => field.mul(x, y),
    };
    Ok(FieldElement { value, p: field.p })
}

pub fn field_inv(a: FieldElement) -> Result<FieldElement> {
    let field = a.field();
    Ok(FieldElement {
        value: field.inv(a.value)?,
        p: field.p,
    })
}

/// Inverts a whole sequence. A zero entry is reported with its index.
pub fn batch_inv(values: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let Some(first) = values.first() else {
        return Ok(Vec::new());
    };
    let field = first.field();
    let raw = values
        .iter()
        .map(|&v| field.check(v))
        .collect::<Result<Vec<_>>>()?;
    Ok(field
        .batch_inv_raw(&raw)?
        .into_iter()
        .map(|value| FieldElement { value, p: field.p })
        .collect())
}

/// Deterministic Miller-Rabin, exact for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for &a in &WITNESSES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    // Extended Euclid over arbitrary-precision integers, kept apart from the
    // i128 implementation above.
    fn bigint_inverse(a: u64, p: u64) -> u64 {
        let (mut r0, mut r1) = (BigInt::from(a), BigInt::from(p));
        let (mut s0, mut s1) = (BigInt::from(1), BigInt::from(0));
        while r1 != BigInt::from(0) {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let s2 = &s0 - &q * &s1;
            (r0, r1, s0, s1) = (r1, r2, s1, s2);
        }
        let p = BigInt::from(p);
        let inv = ((s0 % &p) + &p) % &p;
        inv.try_into().unwrap()
    }

    #[test]
    fn small_field_ops() {
        let f = f7();
        assert_eq!(
            field_op(FieldOp::Add, f.elem(3), f.elem(5)).unwrap(),
            f.elem(1)
        );
        for x in 0..7 {
            assert_eq!(
                field_op(FieldOp::Mul, f.one(), f.elem(x)).unwrap(),
                f.elem(x)
            );
        }
        assert_eq!(
            field_op(FieldOp::Sub, f.elem(2), f.elem(5)).unwrap(),
            f.elem(4)
        );
    }

    #[test]
    fn square_of_minus_one() {
        let f = PrimeField::P65537;
        let got = field_op(FieldOp::Mul, f.elem(65536), f.elem(65536)).unwrap();
        let oracle = (BigInt::from(65536u64) * BigInt::from(65536u64)) % BigInt::from(65537u64);
        assert_eq!(BigInt::from(got.value()), oracle);
        assert_eq!(got.value(), 1);
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = f7().elem(1);
        let b = PrimeField::P65537.elem(1);
        assert_eq!(
            field_op(FieldOp::Add, a, b),
            Err(Error::FieldMismatch {
                left: 7,
                right: 65537
            })
        );
        assert!(batch_inv(&[a, b]).is_err());
    }

    #[test]
    fn inverses() {
        let f = f7();
        assert_eq!(field_inv(f.elem(2)).unwrap(), f.elem(4));
        assert_eq!(field_inv(f.elem(1)).unwrap(), f.elem(1));
        assert_eq!(
            field_inv(f.zero()),
            Err(Error::DivisionByZero { index: None })
        );

        let g = PrimeField::P65537;
        let inv3 = field_inv(g.elem(3)).unwrap().value();
        assert_eq!(inv3, bigint_inverse(3, 65537));
        assert_eq!(inv3, 21846);
        assert_eq!(3 * 21846 % 65537, 1);
    }

    #[test]
    fn batch_inverses() {
        let f = f7();
        let got = batch_inv(&[f.elem(2), f.elem(3)]).unwrap();
        let want: Vec<_> = [2, 3]
            .iter()
            .map(|&x| f.elem(bigint_inverse(x, 7)))
            .collect();
        assert_eq!(got, want);
        assert_eq!(got, vec![f.elem(4), f.elem(5)]);
        assert_eq!(batch_inv(&[f.one()]).unwrap(), vec![f.one()]);
        assert_eq!(
            batch_inv(&[f.elem(2), f.zero(), f.elem(3)]),
            Err(Error::DivisionByZero { index: Some(1) })
        );
        assert!(batch_inv(&[]).unwrap().is_empty());
    }

    #[test]
    fn primality() {
        let primes = [
            2u64,
            3,
            5,
            7,
            65537,
            (1 << 31) - 1,
            (1 << 61) - 1,
            18446744073709551557,
        ];
        for p in primes {
            assert!(is_prime(p), "{p}");
        }
        // Carmichael numbers and strong pseudoprimes to small bases.
        for c in [0u64, 1, 4, 561, 1105, 2047, 3215031751, 3825123056546413051] {
            assert!(!is_prime(c), "{c}");
        }
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert_eq!(PrimeField::new(65537).unwrap(), PrimeField::P65537);
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let f = PrimeField::P65537;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            let add = |x, y| field_op(FieldOp::Add, x, y).unwrap();
            let mul = |x, y| field_op(FieldOp::Mul, x, y).unwrap();
            assert_eq!(add(a, b), add(b, a));
            assert_eq!(mul(a, b), mul(b, a));
            assert_eq!(mul(a, add(b, c)), add(mul(a, b), mul(a, c)));
        }
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(x in 1u64..65537) {
            let f = PrimeField::P65537;
            let a = f.elem(x);
            let inv = field_inv(a).unwrap();
            prop_assert_eq!(field_op(FieldOp::Mul, a, inv).unwrap(), f.one());
        }

        #[test]
        fn batch_matches_elementwise(xs in proptest::collection::vec(1u64..2147483647, 0..40)) {
            let f = PrimeField::MERSENNE31;
            let elems: Vec<_> = xs.iter().map(|&x| f.elem(x)).collect();
            let batch = batch_inv(&elems).unwrap();
            let single: Vec<_> = elems.iter().map(|&e| field_inv(e).unwrap()).collect();
            prop_assert_eq!(batch, single);
        }

        #[test]
        fn values_stay_canonical(a in any::<u64>(), b in any::<u64>()) {
            let f = PrimeField::MERSENNE31;
            let (x, y) = (f.elem(a), f.elem(b));
            for op in [FieldOp::Add, FieldOp::Sub, FieldOp::Mul] {
                prop_assert!(field_op(op, x, y).unwrap().value() < f.modulus());
            }
        }
    }
}
