//! Arithmetic in `F_p` and `F_{p^2} = F_p(sqrt(t))` for a fixed quadratic
//! non-residue `t`.

use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::modarith::{legendre, ModArithError, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("{t} is not a quadratic non-residue modulo {p}")]
    NotNonResidue { p: BigUint, t: BigUint },
    #[error("inverse of zero")]
    DivisionByZero,
    #[error("factorization does not describe p^2 - 1 = {order}")]
    BadFactorization { order: BigUint },
    #[error("{l} does not divide the group order {order}")]
    BadDivisor { l: BigUint, order: BigUint },
    #[error("zero is not in the multiplicative group")]
    ZeroElement,
    #[error(transparent)]
    Arith(#[from] ModArithError),
}

/// The field `F_p(sqrt(t))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fp2Ctx {
    p: BigUint,
    t: BigUint,
}

impl Fp2Ctx {
    pub fn new(p: &BigUint, t: &BigUint) -> Result<Self, GfError> {
        if legendre(&BigInt::from(t.clone()), p) != -1 {
            return Err(GfError::NotNonResidue {
                p: p.clone(),
                t: t.clone(),
            });
        }
        Ok(Fp2Ctx {
            p: p.clone(),
            t: t % p,
        })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn t(&self) -> &BigUint {
        &self.t
    }

    /// `p^2 - 1`, the order of the multiplicative group.
    pub fn order(&self) -> BigUint {
        &self.p * &self.p - 1u8
    }

    pub fn elem(&self, a0: &BigInt, b0: &BigInt) -> Fp2Elem {
        Fp2Elem {
            a0: Residue::from_int(a0, &self.p),
            b0: Residue::from_int(b0, &self.p),
            ctx: self.clone(),
        }
    }

    pub fn from_parts(&self, a0: Residue, b0: Residue) -> Fp2Elem {
        assert!(a0.modulus() == &self.p && b0.modulus() == &self.p);
        Fp2Elem {
            a0,
            b0,
            ctx: self.clone(),
        }
    }

    pub fn from_fp(&self, a0: &Residue) -> Fp2Elem {
        self.from_parts(a0.clone(), Residue::zero(&self.p))
    }

    pub fn one(&self) -> Fp2Elem {
        self.from_parts(Residue::one(&self.p), Residue::zero(&self.p))
    }

    pub fn zero(&self) -> Fp2Elem {
        self.from_parts(Residue::zero(&self.p), Residue::zero(&self.p))
    }

    /// The element `sqrt(t)`.
    pub fn sqrt_t(&self) -> Fp2Elem {
        self.from_parts(Residue::zero(&self.p), Residue::one(&self.p))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp2Elem {
        loop {
            let a0 = rng.gen_biguint_below(&self.p);
            let b0 = rng.gen_biguint_below(&self.p);
            if !(a0.is_zero() && b0.is_zero()) {
                return self.from_parts(Residue::new(a0, &self.p), Residue::new(b0, &self.p));
            }
        }
    }
}

/// `a0 + b0 * sqrt(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fp2Elem {
    a0: Residue,
    b0: Residue,
    ctx: Fp2Ctx,
}

impl Fp2Elem {
    pub fn a0(&self) -> &Residue {
        &self.a0
    }

    pub fn b0(&self) -> &Residue {
        &self.b0
    }

    pub fn ctx(&self) -> &Fp2Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.b0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a0.is_one() && self.b0.is_zero()
    }

    /// True when the element lies in the prime field.
    pub fn in_base_field(&self) -> bool {
        self.b0.is_zero()
    }

    fn t_res(&self) -> Residue {
        Residue::new(self.ctx.t.clone(), &self.ctx.p)
    }

    pub fn add(&self, rhs: &Fp2Elem) -> Fp2Elem {
        assert_eq!(self.ctx, rhs.ctx);
        self.ctx.from_parts(&self.a0 + &rhs.a0, &self.b0 + &rhs.b0)
    }

    pub fn sub(&self, rhs: &Fp2Elem) -> Fp2Elem {
        assert_eq!(self.ctx, rhs.ctx);
        self.ctx.from_parts(&self.a0 - &rhs.a0, &self.b0 - &rhs.b0)
    }

    pub fn neg(&self) -> Fp2Elem {
        self.ctx.from_parts(-&self.a0, -&self.b0)
    }

    /// `(a + b sqrt t)(c + d sqrt t) = (ac + bdt) + (ad + bc) sqrt t`.
    pub fn mul(&self, rhs: &Fp2Elem) -> Fp2Elem {
        assert_eq!(self.ctx, rhs.ctx);
        let t = self.t_res();
        let a0 = &(&self.a0 * &rhs.a0) + &(&(&self.b0 * &rhs.b0) * &t);
        let b0 = &(&self.a0 * &rhs.b0) + &(&self.b0 * &rhs.a0);
        self.ctx.from_parts(a0, b0)
    }

    pub fn pow(&self, exp: &BigUint) -> Fp2Elem {
        let mut acc = self.ctx.one();
        for i in (0..exp.bits()).rev() {
            acc = acc.mul(&acc);
            if exp.bit(i) {
                acc = acc.mul(self);
            }
        }
        acc
    }

    /// Galois conjugate `a0 - b0 sqrt t`, which equals `x^p`.
    pub fn conj(&self) -> Fp2Elem {
        self.ctx.from_parts(self.a0.clone(), -&self.b0)
    }

    pub fn norm(&self) -> Residue {
        &(&self.a0 * &self.a0) - &(&(&self.b0 * &self.b0) * &self.t_res())
    }

    pub fn inv(&self) -> Result<Fp2Elem, GfError> {
        if self.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let n_inv = self.norm().inv()?;
        let c = self.conj();
        Ok(self.ctx.from_parts(&c.a0 * &n_inv, &c.b0 * &n_inv))
    }
}

impl fmt::Display for Fp2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + {}*sqrt({}) (mod {})",
            self.a0.value(),
            self.b0.value(),
            self.ctx.t,
            self.ctx.p
        )
    }
}

/// Samples uniformly from `[1, p)` until a quadratic non-residue turns up.
pub fn find_nonresidue<R: Rng + ?Sized>(p: &BigUint, rng: &mut R) -> BigUint {
    loop {
        let t = rng.gen_biguint_range(&BigUint::one(), p);
        if legendre(&BigInt::from(t.clone()), p) == -1 {
            return t;
        }
    }
}

pub fn norm(x: &Fp2Elem) -> Residue {
    x.norm()
}

fn check_factorization(order: &BigUint, factors: &[(BigUint, u32)]) -> Result<(), GfError> {
    let product = factors
        .iter()
        .fold(BigUint::one(), |acc, (q, e)| acc * q.pow(*e));
    let all_prime = factors.iter().all(|(q, _)| crate::modarith::is_prime(q));
    if product != *order || !all_prime {
        return Err(GfError::BadFactorization {
            order: order.clone(),
        });
    }
    Ok(())
}

/// Factorization of `p^2 - 1`, assembled from those of `p - 1` and `p + 1`.
pub fn order_factorization(p: &BigUint) -> Vec<(BigUint, u32)> {
    let mut merged: std::collections::BTreeMap<BigUint, u32> = Default::default();
    for half in [p - 1u8, p + 1u8] {
        for (q, e) in crate::modarith::factor_trial(&half) {
            *merged.entry(q).or_insert(0) += e;
        }
    }
    merged.into_iter().collect()
}

/// True iff `g` generates `F_{p^2}^x`, given the factorization of `p^2 - 1`.
pub fn is_generator(g: &Fp2Elem, factors: &[(BigUint, u32)]) -> Result<bool, GfError> {
    let order = g.ctx().order();
    check_factorization(&order, factors)?;
    if g.is_zero() {
        return Ok(false);
    }
    Ok(factors
        .iter()
        .all(|(q, _)| !g.pow(&(&order / q)).is_one()))
}

pub fn find_generator<R: Rng + ?Sized>(
    ctx: &Fp2Ctx,
    factors: &[(BigUint, u32)],
    rng: &mut R,
) -> Result<Fp2Elem, GfError> {
    check_factorization(&ctx.order(), factors)?;
    loop {
        let g = ctx.random_nonzero(rng);
        if is_generator(&g, factors)? {
            return Ok(g);
        }
    }
}

/// True iff `x` is an `l`-th power in `F_{p^2}^x`.
pub fn is_lth_power(x: &Fp2Elem, l: &BigUint) -> Result<bool, GfError> {
    let order = x.ctx().order();
    if !(&order % l).is_zero() {
        return Err(GfError::BadDivisor {
            l: l.clone(),
            order,
        });
    }
    if x.is_zero() {
        return Err(GfError::ZeroElement);
    }
    Ok(x.pow(&(order / l)).is_one())
}

/// Same test in `F_p^x`.
pub fn is_lth_power_fp(x: &Residue, l: &BigUint) -> Result<bool, GfError> {
    let order = x.modulus() - 1u8;
    if !(&order % l).is_zero() {
        return Err(GfError::BadDivisor {
            l: l.clone(),
            order,
        });
    }
    if x.is_zero() {
        return Err(GfError::ZeroElement);
    }
    Ok(x.pow(&(order / l)).is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modarith::factor_trial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn ctx(p: u64, t: u64) -> Fp2Ctx {
        Fp2Ctx::new(&u(p), &u(t)).unwrap()
    }

    fn el(c: &Fp2Ctx, a: i64, b: i64) -> Fp2Elem {
        c.elem(&BigInt::from(a), &BigInt::from(b))
    }

    #[test]
    fn nonresidue_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(find_nonresidue(&u(3), &mut rng), u(2));
        for _ in 0..20 {
            let t = find_nonresidue(&u(7), &mut rng);
            assert!([u(3), u(5), u(6)].contains(&t));
        }
        let a = find_nonresidue(&u(13), &mut ChaCha8Rng::seed_from_u64(99));
        let b = find_nonresidue(&u(13), &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
        assert!(Fp2Ctx::new(&u(7), &u(2)).is_err());
    }

    #[test]
    fn f9_arithmetic() {
        let c = ctx(3, 2);
        let x = el(&c, 1, 1);
        // (1 + sqrt2)^2 = 1 + 2 + 2 sqrt2 = 0 + 2 sqrt2 in F_9
        assert_eq!(x.mul(&x), el(&c, 0, 2));
        assert_eq!(x.pow(&u(8)), c.one());
        assert_eq!(c.zero().inv(), Err(GfError::DivisionByZero));
    }

    #[test]
    fn inverse_and_lagrange_sampled() {
        let c = ctx(41, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = c.random_nonzero(&mut rng);
            assert!(x.mul(&x.inv().unwrap()).is_one());
            assert!(x.pow(&c.order()).is_one());
        }
    }

    #[test]
    fn norm_cases() {
        let c = ctx(7, 3);
        assert_eq!(norm(&el(&c, 2, 1)), Residue::from_u64(1, &u(7)));
        assert!(norm(&c.zero()).is_zero());
        let c = ctx(23, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let x = c.random_nonzero(&mut rng);
            let by_power = x.pow(&u(24));
            assert!(by_power.in_base_field());
            assert_eq!(&norm(&x), by_power.a0());
        }
    }

    #[test]
    fn norm_multiplicative_and_frobenius() {
        let c = ctx(83, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = c.random_nonzero(&mut rng);
            let y = c.random_nonzero(&mut rng);
            assert_eq!(norm(&x.mul(&y)), &norm(&x) * &norm(&y));
        }
        for _ in 0..100 {
            let x = c.random_nonzero(&mut rng);
            assert_eq!(x.pow(&u(83)), x.conj());
        }
    }

    #[test]
    fn generators() {
        let c = ctx(3, 2);
        let f = factor_trial(&c.order());
        assert!(is_generator(&el(&c, 1, 1), &f).unwrap());
        assert!(!is_generator(&el(&c, 1, 0), &f).unwrap());
        assert_eq!(
            is_generator(&el(&c, 1, 1), &[(u(2), 2)]),
            Err(GfError::BadFactorization { order: u(8) })
        );
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (p, t) in [(3u64, 2u64), (13, 2), (29, 2), (41, 3)] {
            let c = ctx(p, t);
            let f = factor_trial(&c.order());
            let g = find_generator(&c, &f, &mut rng).unwrap();
            let half = g.pow(&(c.order() / 2u8));
            assert_eq!(half, c.one().neg());
        }
    }

    #[test]
    fn order_factorization_matches_trial_division() {
        for p in [3u64, 13, 41, 83, 65537, 1_000_003] {
            let direct = factor_trial(&u(p * p - 1));
            assert_eq!(order_factorization(&u(p)), direct, "p={p}");
        }
    }

    #[test]
    fn conjugate_of_norm_one_part_has_order_p_plus_one() {
        for (p, t) in [(3u64, 2u64), (5, 2), (7, 3), (11, 2), (13, 2), (17, 3), (19, 2)] {
            let c = ctx(p, t);
            let f = factor_trial(&c.order());
            let g = find_generator(&c, &f, &mut ChaCha8Rng::seed_from_u64(p)).unwrap();
            let gt = g.pow(&u(p - 1));
            assert!(norm(&gt).is_one());
            let mut acc = gt.clone();
            let mut ord = 1;
            while !acc.is_one() {
                acc = acc.mul(&gt);
                ord += 1;
            }
            assert_eq!(ord, p + 1);
        }
    }

    #[test]
    fn lth_powers() {
        let c = ctx(13, 2);
        let f = factor_trial(&c.order());
        let g = find_generator(&c, &f, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
        let l = u(7);
        assert!(!is_lth_power(&g, &l).unwrap());
        assert!(is_lth_power(&g.pow(&l), &l).unwrap());
        assert!(is_lth_power(&c.one(), &l).unwrap());
        assert!(matches!(
            is_lth_power(&g, &u(5)),
            Err(GfError::BadDivisor { .. })
        ));
        assert!(!is_lth_power_fp(&Residue::from_u64(2, &u(11)), &u(5)).unwrap());
        assert!(is_lth_power_fp(&Residue::from_u64(10, &u(11)), &u(5)).unwrap());
    }
}
