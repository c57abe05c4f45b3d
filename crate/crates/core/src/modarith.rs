//! Modular arithmetic kernel.
//!
//! Everything local in the reductions happens in one of three rings: `Z/pZ`,
//! `Z/lZ` or `Z/l^2Z`. [`Residue`] is an integer class together with its
//! modulus; the free functions cover exponentiation, inversion, Legendre
//! symbols, square roots modulo a prime, the Hensel step to `l^2` and the
//! decomposition of a unit of `(Z/l^2Z)^x` as `xi * (1 + l)^y`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModArithError {
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: BigUint, modulus: BigUint },
    #[error("{value} is not a quadratic residue modulo {modulus}")]
    NonResidue { value: BigUint, modulus: BigUint },
    #[error("square root of zero requested")]
    ZeroInput,
    #[error("Hensel lift from a root that vanishes modulo {0}")]
    SingularLift(BigUint),
    #[error("{root} is not a square root of {value} modulo {modulus}")]
    NotARoot { root: BigUint, value: BigInt, modulus: BigUint },
    #[error("{value} is not a unit modulo {modulus}")]
    NotUnit { value: BigUint, modulus: BigUint },
    #[error("residue modulo {found} where modulo {expected} was required")]
    WrongModulus { expected: BigUint, found: BigUint },
}

/// An integer class `value mod modulus`, always stored in canonical form
/// `0 <= value < modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    value: BigUint,
    modulus: BigUint,
}

impl Residue {
    /// Reduces `value` modulo `modulus`. Panics if `modulus < 2`.
    pub fn new(value: BigUint, modulus: &BigUint) -> Self {
        assert!(*modulus >= BigUint::from(2u8), "modulus must be at least 2");
        Residue {
            value: value % modulus,
            modulus: modulus.clone(),
        }
    }

    /// Reduces a signed integer, mapping negatives into `[0, modulus)`.
    pub fn from_int(value: &BigInt, modulus: &BigUint) -> Self {
        let m = BigInt::from(modulus.clone());
        let reduced = value.mod_floor(&m);
        Residue::new(reduced.to_biguint().expect("mod_floor is nonnegative"), modulus)
    }

    pub fn from_u64(value: u64, modulus: &BigUint) -> Self {
        Residue::new(BigUint::from(value), modulus)
    }

    pub fn zero(modulus: &BigUint) -> Self {
        Residue::new(BigUint::zero(), modulus)
    }

    pub fn one(modulus: &BigUint) -> Self {
        Residue::new(BigUint::one(), modulus)
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// The canonical representative as a signed integer.
    pub fn to_int(&self) -> BigInt {
        BigInt::from(self.value.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn pow(&self, exp: &BigUint) -> Residue {
        Residue {
            value: self.value.modpow(exp, &self.modulus),
            modulus: self.modulus.clone(),
        }
    }

    pub fn inv(&self) -> Result<Residue, ModArithError> {
        let a = BigInt::from(self.value.clone());
        let m = BigInt::from(self.modulus.clone());
        let ext = a.extended_gcd(&m);
        if !ext.gcd.is_one() {
            return Err(ModArithError::NotInvertible {
                value: self.value.clone(),
                modulus: self.modulus.clone(),
            });
        }
        Ok(Residue::from_int(&ext.x, &self.modulus))
    }

    /// Reinterprets the class modulo a divisor of the current modulus.
    pub fn reduce_to(&self, modulus: &BigUint) -> Residue {
        debug_assert!((&self.modulus % modulus).is_zero());
        Residue::new(self.value.clone(), modulus)
    }

    fn check_same(&self, other: &Residue) {
        assert_eq!(
            self.modulus, other.modulus,
            "arithmetic between residues of different moduli"
        );
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl<'a> Add<&'a Residue> for &'a Residue {
    type Output = Residue;
    fn add(self, rhs: &Residue) -> Residue {
        self.check_same(rhs);
        Residue::new(&self.value + &rhs.value, &self.modulus)
    }
}

impl<'a> Sub<&'a Residue> for &'a Residue {
    type Output = Residue;
    fn sub(self, rhs: &Residue) -> Residue {
        self.check_same(rhs);
        Residue::new(&self.value + &self.modulus - &rhs.value, &self.modulus)
    }
}

impl<'a> Mul<&'a Residue> for &'a Residue {
    type Output = Residue;
    fn mul(self, rhs: &Residue) -> Residue {
        self.check_same(rhs);
        Residue::new(&self.value * &rhs.value, &self.modulus)
    }
}

impl Neg for &Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue::new(&self.modulus - &self.value, &self.modulus)
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<Residue> for Residue {
            type Output = Residue;
            fn $method(self, rhs: Residue) -> Residue {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Residue> for Residue {
            type Output = Residue;
            fn $method(self, rhs: &Residue) -> Residue {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        -&self
    }
}

/// The unique factorization `w = xi * (1 + l)^y` of a unit modulo `l^2`,
/// with `xi^(l-1) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeichmullerParts {
    pub xi: Residue,
    pub y: Residue,
}

pub fn mod_pow(base: &Residue, exp: &BigUint) -> Residue {
    base.pow(exp)
}

pub fn mod_inv(a: &Residue) -> Result<Residue, ModArithError> {
    a.inv()
}

/// Legendre symbol `(a / l)` by Euler's criterion. `l` must be an odd prime.
pub fn legendre(a: &BigInt, l: &BigUint) -> i8 {
    let r = Residue::from_int(a, l);
    if r.is_zero() {
        return 0;
    }
    let e = (l - 1u8) >> 1;
    if r.pow(&e).is_one() {
        1
    } else {
        -1
    }
}

/// Square root modulo an odd prime by Tonelli–Shanks. Of the two roots the
/// smaller canonical representative is returned.
pub fn sqrt_mod_prime(a: &Residue) -> Result<Residue, ModArithError> {
    let l = a.modulus();
    if a.is_zero() {
        return Err(ModArithError::ZeroInput);
    }
    if legendre(&a.to_int(), l) != 1 {
        return Err(ModArithError::NonResidue {
            value: a.value().clone(),
            modulus: l.clone(),
        });
    }

    let one = BigUint::one();
    // l - 1 = q * 2^s with q odd
    let mut q = l - 1u8;
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }

    let root = if s == 1 {
        a.pow(&((l + 1u8) >> 2))
    } else {
        let mut z = BigUint::from(2u8);
        while legendre(&BigInt::from(z.clone()), l) != -1 {
            z += 1u8;
        }
        let mut m = s;
        let mut c = Residue::new(z, l).pow(&q);
        let mut t = a.pow(&q);
        let mut r = a.pow(&((&q + &one) >> 1));
        while !t.is_one() {
            // least i with t^(2^i) = 1
            let mut i = 0u32;
            let mut probe = t.clone();
            while !probe.is_one() {
                probe = &probe * &probe;
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = &b * &b;
            }
            m = i;
            c = &b * &b;
            t = &t * &c;
            r = &r * &b;
        }
        r
    };

    let other = -&root;
    Ok(if other.value() < root.value() { other } else { root })
}

/// Lifts a simple square root of `a` modulo `l` to the unique root modulo
/// `l^2` congruent to it.
pub fn hensel_sqrt_lift(
    a: &BigInt,
    root_mod_l: &Residue,
    l: &BigUint,
) -> Result<Residue, ModArithError> {
    if root_mod_l.modulus() != l {
        return Err(ModArithError::WrongModulus {
            expected: l.clone(),
            found: root_mod_l.modulus().clone(),
        });
    }
    if root_mod_l.is_zero() {
        return Err(ModArithError::SingularLift(l.clone()));
    }
    if &(root_mod_l * root_mod_l) != &Residue::from_int(a, l) {
        return Err(ModArithError::NotARoot {
            root: root_mod_l.value().clone(),
            value: a.clone(),
            modulus: l.clone(),
        });
    }
    let l2 = l * l;
    let r = Residue::new(root_mod_l.value().clone(), &l2);
    let target = Residue::from_int(a, &l2);
    // r' = r - (r^2 - a) / (2r)
    let two_r = &r + &r;
    let correction = &(&(&r * &r) - &target) * &two_r.inv()?;
    Ok(&r - &correction)
}

/// Splits a unit `w` modulo `l^2` as `xi * (1 + l)^y`.
pub fn teichmuller_decompose(
    w: &Residue,
    l: &BigUint,
) -> Result<TeichmullerParts, ModArithError> {
    let l2 = l * l;
    if w.modulus() != &l2 {
        return Err(ModArithError::WrongModulus {
            expected: l2,
            found: w.modulus().clone(),
        });
    }
    if (w.value() % l).is_zero() {
        return Err(ModArithError::NotUnit {
            value: w.value().clone(),
            modulus: l2,
        });
    }
    let xi = w.pow(l);
    // w / xi = 1 + y*l (mod l^2)
    let ratio = w * &xi.inv()?;
    let y = Residue::new((ratio.value() + &l2 - 1u8) / l, l);
    Ok(TeichmullerParts { xi, y })
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
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

pub fn is_prime(n: &BigUint) -> bool {
    match u64::try_from(n) {
        Ok(small) => is_prime_u64(small),
        Err(_) => {
            // beyond desk scale; fall back to Fermat-style Miller-Rabin with fixed bases
            let one = BigUint::one();
            let nm1 = n - 1u8;
            let mut d = nm1.clone();
            let mut s = 0;
            while d.is_even() {
                d >>= 1;
                s += 1;
            }
            'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
                let mut x = BigUint::from(a).modpow(&d, n);
                if x == one || x == nm1 {
                    continue;
                }
                for _ in 1..s {
                    x = (&x * &x) % n;
                    if x == nm1 {
                        continue 'witness;
                    }
                }
                return false;
            }
            true
        }
    }
}

/// Trial-division factorization as `(prime, exponent)` pairs in increasing
/// order of the prime. Intended for desk-scale group orders.
pub fn factor_trial(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut rest = n.clone();
    let mut out = Vec::new();
    if rest <= BigUint::one() {
        return out;
    }
    let mut push = |p: BigUint, rest: &mut BigUint| {
        let mut e = 0;
        while (&*rest % &p).is_zero() {
            *rest /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(BigUint::from(2u8), &mut rest);
    let mut p = BigUint::from(3u8);
    while &p * &p <= rest {
        push(p.clone(), &mut rest);
        p += 2u8;
    }
    if rest > BigUint::one() {
        out.push((rest, 1));
    }
    out
}
