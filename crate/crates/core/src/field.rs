//! Prime-field arithmetic.
//!
//! A [`Field`] is just the modulus; elements are [`Fe`] residues. All
//! operations go through the field so that a single `Fe` type can serve any
//! runtime-chosen `q`.

use core::fmt;

use crate::error::{Error, Result};

/// GF(q) for a prime `q < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    q: u32,
}

/// A canonical residue in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

/// Least prime strictly greater than `n`. By Bertrand's postulate this is
/// below `2n` for every `n > 1`.
pub fn smallest_prime_gt(n: u32) -> u32 {
    let mut c = n as u64 + 1;
    while !is_prime(c) {
        c += 1;
    }
    c as u32
}

impl Field {
    pub fn new(q: u32) -> Result<Self> {
        if !is_prime(q as u64) || q >= 1 << 31 {
            return Err(Error::NotPrime(q));
        }
        Ok(Field { q })
    }

    /// The default field for `n` nodes.
    pub fn for_nodes(n: usize) -> Self {
        Field {
            q: smallest_prime_gt(n as u32),
        }
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn elem(&self, v: u64) -> Fe {
        Fe((v % self.q as u64) as u32)
    }

    /// Reduces a signed integer into the field.
    #[inline]
    pub fn from_i64(&self, v: i64) -> Fe {
        Fe(v.rem_euclid(self.q as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let s = a.0 + b.0;
        Fe(if s >= self.q { s - self.q } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        if a.0 >= b.0 {
            Fe(a.0 - b.0)
        } else {
            Fe(a.0 + self.q - b.0)
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            a
        } else {
            Fe(self.q - a.0)
        }
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(((a.0 as u64 * b.0 as u64) % self.q as u64) as u32)
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::ZeroInverse(self.q));
        }
        // Extended Euclid; q is prime so gcd is 1.
        let (mut r0, mut r1) = (self.q as i64, a.0 as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        Ok(self.from_i64(t0))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `(-1)^k` as a field element.
    #[inline]
    pub fn sign(&self, k: usize) -> Fe {
        if k.is_multiple_of(2) {
            Fe::ONE
        } else {
            Fe(self.q - 1)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }
}
