//! Small finite fields GF(p^k), q <= 4096.
//!
//! Elements are encoded as integers `sum c_i p^i` over the coefficient
//! vector of their polynomial representative. Extension fields use the
//! fixed primitive moduli below, so `x` generates the multiplicative group
//! and the log/antilog tables are built by repeated multiplication by `x`.

use crate::error::{domain, Result};

pub type Fe = u32;

pub const MAX_ORDER: u32 = 4096;

/// Primitive moduli `x^k + c_{k-1} x^{k-1} + ... + c_0`, stored as
/// `(p, k, [c_0, .., c_{k-1}])`. Each is the smallest primitive monic
/// polynomial of its degree under the integer encoding.
const MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1]),
    (2, 3, &[1, 1, 0]),
    (2, 4, &[1, 1, 0, 0]),
    (2, 5, &[1, 0, 1, 0, 0]),
    (2, 6, &[1, 1, 0, 0, 0, 0]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0]),
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0]),
    (2, 9, &[1, 0, 0, 0, 1, 0, 0, 0, 0]),
    (2, 10, &[1, 0, 0, 1, 0, 0, 0, 0, 0, 0]),
    (2, 11, &[1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0]),
    (2, 12, &[1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0]),
    (3, 2, &[2, 1]),
    (3, 3, &[1, 2, 0]),
    (3, 4, &[2, 1, 0, 0]),
    (3, 5, &[1, 2, 0, 0, 0]),
    (3, 6, &[2, 1, 0, 0, 0, 0]),
    (3, 7, &[1, 2, 1, 0, 0, 0, 0]),
    (5, 2, &[2, 1]),
    (5, 3, &[2, 3, 0]),
    (5, 4, &[2, 2, 1, 0]),
    (5, 5, &[2, 4, 0, 0, 0]),
    (7, 2, &[3, 1]),
    (7, 3, &[2, 3, 0]),
    (7, 4, &[5, 3, 1, 0]),
    (11, 2, &[7, 1]),
    (11, 3, &[4, 1, 0]),
    (13, 2, &[2, 1]),
    (13, 3, &[6, 1, 0]),
    (17, 2, &[3, 1]),
    (19, 2, &[2, 1]),
    (23, 2, &[7, 1]),
    (29, 2, &[3, 1]),
    (31, 2, &[12, 1]),
    (37, 2, &[5, 1]),
    (41, 2, &[12, 1]),
    (43, 2, &[3, 1]),
    (47, 2, &[13, 1]),
    (53, 2, &[5, 1]),
    (59, 2, &[2, 1]),
    (61, 2, &[2, 1]),
];

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<Fe>,
    log: Vec<u32>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus == other.modulus
    }
}

impl FiniteField {
    pub fn new(q: u32) -> Result<Self> {
        let Some((p, k)) = prime_power(q) else {
            return domain(format!("{q} is not a prime power"));
        };
        if q > MAX_ORDER {
            return domain(format!("field order {q} exceeds {MAX_ORDER}"));
        }
        let modulus: Vec<u32> = if k == 1 {
            Vec::new()
        } else {
            MODULI
                .iter()
                .find(|(mp, mk, _)| *mp == p && *mk == k)
                .map(|(_, _, c)| c.to_vec())
                .expect("modulus table covers every prime power up to 4096")
        };
        let mut field = FiniteField { p, k, q, modulus, exp: Vec::new(), log: Vec::new() };
        field.build_tables();
        Ok(field)
    }

    fn build_tables(&mut self) {
        let n = (self.q - 1) as usize;
        let generator = if self.k == 1 { self.primitive_root() } else { self.p };
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![u32::MAX; self.q as usize];
        let mut cur: Fe = 1;
        for i in 0..n {
            assert_eq!(log[cur as usize], u32::MAX, "generator of GF({}) is not primitive", self.q);
            log[cur as usize] = i as u32;
            exp.push(cur);
            cur = self.mul_slow(cur, generator);
        }
        assert_eq!(cur, 1);
        self.exp = exp;
        self.log = log;
    }

    fn primitive_root(&self) -> Fe {
        let p = self.p;
        (1..p.max(2))
            .find(|&g| {
                let mut x = 1u64;
                (1..p - 1).all(|_| {
                    x = x * g as u64 % p as u64;
                    x != 1
                })
            })
            .unwrap_or(1)
    }

    fn digits(&self, mut a: Fe) -> Vec<u32> {
        (0..self.k)
            .map(|_| {
                let d = a % self.p;
                a /= self.p;
                d
            })
            .collect()
    }

    fn undigits(&self, d: &[u32]) -> Fe {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as Fe;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let k = self.k as usize;
        let mut prod = vec![0u32; 2 * k];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for d in (k..2 * k).rev() {
            let c = prod[d];
            if c != 0 {
                for (t, &m) in self.modulus.iter().enumerate() {
                    let sub = c * m % self.p;
                    prod[d - k + t] = (prod[d - k + t] + self.p - sub) % self.p;
                }
                prod[d] = 0;
            }
        }
        self.undigits(&prod[..k])
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Coefficients `c_0..c_{k-1}` of the monic modulus (empty for prime fields).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.q
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            a ^ b
        } else if self.k == 1 {
            (a + b) % self.p
        } else {
            let (da, db) = (self.digits(a), self.digits(b));
            let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
            self.undigits(&sum)
        }
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            a
        } else if self.k == 1 {
            (self.p - a) % self.p
        } else {
            let d: Vec<u32> = self.digits(a).iter().map(|x| (self.p - x) % self.p).collect();
            self.undigits(&d)
        }
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[e as usize]
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        (a != 0).then(|| {
            let l = self.log[a as usize];
            self.exp[((self.q - 1 - l) % (self.q - 1)) as usize]
        })
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64 * (e % (self.q as u64 - 1)) % (self.q as u64 - 1);
        self.exp[l as usize]
    }

    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p as u64)
    }

    /// Field homomorphism from `self` into `big`, as a lookup table.
    ///
    /// The generator `x` of `self` is sent to the smallest root of the
    /// modulus of `self` inside `big`.
    pub fn embedding_into(&self, big: &FiniteField) -> Result<Vec<Fe>> {
        if self.p != big.p || !big.k.is_multiple_of(self.k) {
            return domain(format!(
                "GF({}) is not a subfield of GF({})",
                self.q, big.q
            ));
        }
        if self.k == 1 {
            return Ok(self.elements().collect());
        }
        let eval_modulus = |beta: Fe| {
            let mut acc = big.pow(beta, self.k as u64);
            for (i, &c) in self.modulus.iter().enumerate() {
                acc = big.add(acc, big.mul(c, big.pow(beta, i as u64)));
            }
            acc
        };
        let beta = big
            .elements()
            .find(|&b| eval_modulus(b) == 0)
            .ok_or_else(|| crate::error::Error::Internal("modulus has no root in extension".into()))?;
        Ok(self
            .elements()
            .map(|a| {
                self.digits(a).iter().enumerate().fold(0, |acc, (i, &c)| {
                    big.add(acc, big.mul(c, big.pow(beta, i as u64)))
                })
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(4096), Some((2, 12)));
        assert_eq!(prime_power(2187), Some((3, 7)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert!(FiniteField::new(6).is_err());
        assert!(FiniteField::new(8192).is_err());
    }

    #[test]
    fn every_table_modulus_is_primitive() {
        // Construction asserts that x has multiplicative order q - 1.
        for &(p, k, _) in MODULI {
            let f = FiniteField::new(p.pow(k)).unwrap();
            assert_eq!(f.exp.len() as u32, f.order() - 1);
        }
    }

    #[test]
    fn field_axioms_gf9_and_gf8() {
        for q in [8, 9, 25] {
            let f = FiniteField::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                    for c in [0, 1, q - 1] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_an_automorphism() {
        let f = FiniteField::new(27).unwrap();
        let mut images: Vec<Fe> = f.elements().map(|a| f.frobenius(a)).collect();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
            }
        }
        images.sort_unstable();
        assert_eq!(images, f.elements().collect::<Vec<_>>());
    }

    #[test]
    fn subfield_embedding_is_a_homomorphism() {
        for (small, big) in [(2, 4), (4, 16), (3, 9), (9, 729), (8, 64)] {
            let (fs, fb) = (FiniteField::new(small).unwrap(), FiniteField::new(big).unwrap());
            let emb = fs.embedding_into(&fb).unwrap();
            for a in fs.elements() {
                for b in fs.elements() {
                    assert_eq!(emb[fs.add(a, b) as usize], fb.add(emb[a as usize], emb[b as usize]));
                    assert_eq!(emb[fs.mul(a, b) as usize], fb.mul(emb[a as usize], emb[b as usize]));
                }
            }
        }
        let f4 = FiniteField::new(4).unwrap();
        assert!(f4.embedding_into(&FiniteField::new(8).unwrap()).is_err());
    }
}
