//! Discrete logarithms in small cyclic groups: baby-step/giant-step,
//! Pohlig–Hellman and a plain scan, over any group implementing
//! [`CyclicGroup`].

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::gf::{Fp2Ctx, Fp2Elem};
use crate::modarith::{is_prime, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DlpError {
    #[error("target is not in the subgroup generated by the base")]
    NotInSubgroup,
    #[error("factorization does not multiply out to the order {order}")]
    BadFactorization { order: BigUint },
    #[error("base does not have order {order}")]
    WrongOrder { order: BigUint },
    #[error("{l} does not divide the order {order}")]
    BadDivisor { l: BigUint, order: BigUint },
    #[error("group order {0} is too large for this oracle")]
    TooLarge(BigUint),
}

/// Multiplicative group operations. Elements are hashed directly, so `Hash`
/// must be injective on the group, which holds for the canonical
/// representatives used by [`Residue`] and [`Fp2Elem`].
pub trait CyclicGroup {
    type Elem: Clone + Eq + Hash + Debug;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn identity(&self) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, exp: &BigUint) -> Self::Elem {
        let mut acc = self.identity();
        for i in (0..exp.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if exp.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }
}

/// `F_p^x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeFieldGroup {
    p: BigUint,
}

impl PrimeFieldGroup {
    pub fn new(p: &BigUint) -> Self {
        PrimeFieldGroup { p: p.clone() }
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }
}

impl CyclicGroup for PrimeFieldGroup {
    type Elem = Residue;

    fn mul(&self, a: &Residue, b: &Residue) -> Residue {
        a * b
    }

    fn inv(&self, a: &Residue) -> Residue {
        a.inv().expect("group elements are invertible")
    }

    fn identity(&self) -> Residue {
        Residue::one(&self.p)
    }

    fn pow(&self, a: &Residue, exp: &BigUint) -> Residue {
        a.pow(exp)
    }
}

/// `F_{p^2}^x` and its subgroups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fp2Group {
    ctx: Fp2Ctx,
}

impl Fp2Group {
    pub fn new(ctx: &Fp2Ctx) -> Self {
        Fp2Group { ctx: ctx.clone() }
    }
}

impl CyclicGroup for Fp2Group {
    type Elem = Fp2Elem;

    fn mul(&self, a: &Fp2Elem, b: &Fp2Elem) -> Fp2Elem {
        a.mul(b)
    }

    fn inv(&self, a: &Fp2Elem) -> Fp2Elem {
        a.inv().expect("group elements are invertible")
    }

    fn identity(&self) -> Fp2Elem {
        self.ctx.one()
    }

    fn pow(&self, a: &Fp2Elem, exp: &BigUint) -> Fp2Elem {
        a.pow(exp)
    }
}

/// A group with a known (sub)group order and its factorization.
#[derive(Clone, Debug)]
pub struct CyclicGroupHandle<G> {
    pub group: G,
    order: BigUint,
    factorization: Vec<(BigUint, u32)>,
}

impl<G: CyclicGroup> CyclicGroupHandle<G> {
    pub fn new(
        group: G,
        order: &BigUint,
        factorization: Vec<(BigUint, u32)>,
    ) -> Result<Self, DlpError> {
        check_factorization(order, &factorization)?;
        Ok(CyclicGroupHandle {
            group,
            order: order.clone(),
            factorization,
        })
    }

    /// Factors the order by trial division.
    pub fn with_trial_factorization(group: G, order: &BigUint) -> Result<Self, DlpError> {
        let f = crate::modarith::factor_trial(order);
        Self::new(group, order, f)
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn factorization(&self) -> &[(BigUint, u32)] {
        &self.factorization
    }
}

fn check_factorization(order: &BigUint, factors: &[(BigUint, u32)]) -> Result<(), DlpError> {
    let product = factors
        .iter()
        .fold(BigUint::one(), |acc, (q, e)| acc * q.pow(*e));
    if order.is_zero() || product != *order || !factors.iter().all(|(q, _)| is_prime(q)) {
        return Err(DlpError::BadFactorization {
            order: order.clone(),
        });
    }
    Ok(())
}

/// Least `x >= 0` with `g^x = a`, assuming the order of `g` is at most `n`.
pub fn bsgs<G: CyclicGroup>(
    group: &G,
    g: &G::Elem,
    a: &G::Elem,
    n: &BigUint,
) -> Result<BigUint, DlpError> {
    let m = n.sqrt() + 1u8;
    let m_usize = m.to_usize().ok_or_else(|| DlpError::TooLarge(n.clone()))?;
    let mut table: HashMap<G::Elem, usize> = HashMap::with_capacity(m_usize);
    let mut cur = group.identity();
    for j in 0..m_usize {
        table.entry(cur.clone()).or_insert(j);
        cur = group.mul(&cur, g);
    }
    let giant = group.inv(&group.pow(g, &m));
    let mut y = a.clone();
    for i in 0..m_usize {
        if let Some(j) = table.get(&y) {
            return Ok(BigUint::from(i) * &m + *j);
        }
        y = group.mul(&y, &giant);
    }
    Err(DlpError::NotInSubgroup)
}

/// `x mod order` with `g^x = a`, where `order` is the exact order of `g`.
pub fn pohlig_hellman<G: CyclicGroup>(
    group: &G,
    g: &G::Elem,
    a: &G::Elem,
    order: &BigUint,
    factors: &[(BigUint, u32)],
) -> Result<BigUint, DlpError> {
    check_factorization(order, factors)?;
    let id = group.identity();
    let wrong_order = || DlpError::WrongOrder {
        order: order.clone(),
    };
    if group.pow(g, order) != id {
        return Err(wrong_order());
    }
    if factors.iter().any(|(q, _)| group.pow(g, &(order / q)) == id) {
        return Err(wrong_order());
    }

    let mut residue = BigUint::zero();
    let mut modulus = BigUint::one();
    for (q, e) in factors {
        let qe = q.pow(*e);
        let cofactor = order / &qe;
        let gq = group.pow(g, &cofactor);
        let aq = group.pow(a, &cofactor);
        let gamma = group.pow(&gq, &q.pow(e - 1));
        let gq_inv = group.inv(&gq);
        let mut x = BigUint::zero();
        let mut qj = BigUint::one();
        for j in 0..*e {
            let shifted = group.mul(&group.pow(&gq_inv, &x), &aq);
            let h = group.pow(&shifted, &q.pow(e - 1 - j));
            let digit = bsgs(group, &gamma, &h, q)?;
            x += digit * &qj;
            qj *= q;
        }
        residue = crt(&residue, &modulus, &x, &qe);
        modulus *= qe;
    }
    if group.pow(g, &residue) != *a {
        return Err(DlpError::NotInSubgroup);
    }
    Ok(residue)
}

/// Solution of `x = r1 mod m1`, `x = r2 mod m2` for coprime moduli.
fn crt(r1: &BigUint, m1: &BigUint, r2: &BigUint, m2: &BigUint) -> BigUint {
    use num_bigint::BigInt;
    let (m1i, m2i) = (BigInt::from(m1.clone()), BigInt::from(m2.clone()));
    let e = m1i.extended_gcd(&m2i);
    debug_assert!(e.gcd.is_one());
    let diff = BigInt::from(r2.clone()) - BigInt::from(r1.clone());
    let t = (diff * e.x).mod_floor(&m2i);
    (BigInt::from(r1.clone()) + t * m1i)
        .to_biguint()
        .expect("nonnegative")
}

/// Least `x` in `[0, n)` with `g^x = a`, by walking the powers of `g`.
pub fn exhaustive_log<G: CyclicGroup>(
    group: &G,
    g: &G::Elem,
    a: &G::Elem,
    n: &BigUint,
) -> Result<BigUint, DlpError> {
    let n = n.to_u64().ok_or_else(|| DlpError::TooLarge(n.clone()))?;
    let mut cur = group.identity();
    for x in 0..n {
        if cur == *a {
            return Ok(BigUint::from(x));
        }
        cur = group.mul(&cur, g);
    }
    Err(DlpError::NotInSubgroup)
}

/// `log_g a mod l`, computed in the quotient of order `l`.
pub fn dlog_mod_l<G: CyclicGroup>(
    group: &G,
    g: &G::Elem,
    a: &G::Elem,
    l: &BigUint,
    order: &BigUint,
    oracle: Oracle,
) -> Result<Residue, DlpError> {
    if l.is_zero() || !(order % l).is_zero() {
        return Err(DlpError::BadDivisor {
            l: l.clone(),
            order: order.clone(),
        });
    }
    let cofactor = order / l;
    let gl = group.pow(g, &cofactor);
    let al = group.pow(a, &cofactor);
    if gl == group.identity() {
        return Err(DlpError::WrongOrder {
            order: order.clone(),
        });
    }
    let x = oracle.log(group, &gl, &al, l, &[(l.clone(), 1)])?;
    Ok(Residue::new(x, l))
}

/// Choice of discrete log algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Oracle {
    Bsgs,
    PohligHellman,
    Exhaustive,
}

impl Oracle {
    pub const ALL: [Oracle; 3] = [Oracle::Bsgs, Oracle::PohligHellman, Oracle::Exhaustive];

    /// `log_g a` where `g` has exact order `order`, factored as `factors`.
    pub fn log<G: CyclicGroup>(
        self,
        group: &G,
        g: &G::Elem,
        a: &G::Elem,
        order: &BigUint,
        factors: &[(BigUint, u32)],
    ) -> Result<BigUint, DlpError> {
        match self {
            Oracle::Bsgs => bsgs(group, g, a, order),
            Oracle::PohligHellman => pohlig_hellman(group, g, a, order, factors),
            Oracle::Exhaustive => exhaustive_log(group, g, a, order),
        }
    }

    /// Same, reading order and factorization from a handle.
    pub fn log_in<G: CyclicGroup>(
        self,
        handle: &CyclicGroupHandle<G>,
        g: &G::Elem,
        a: &G::Elem,
    ) -> Result<BigUint, DlpError> {
        self.log(&handle.group, g, a, &handle.order, &handle.factorization)
    }

    pub fn name(self) -> &'static str {
        match self {
            Oracle::Bsgs => "bsgs",
            Oracle::PohligHellman => "pohlig-hellman",
            Oracle::Exhaustive => "exhaustive",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{find_generator, find_nonresidue};
    use crate::modarith::{factor_trial, is_prime_u64};
    use num_bigint::RandBigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn fp_generator(p: u64) -> Residue {
        let pm1 = n(p - 1);
        let factors = factor_trial(&pm1);
        (2..p)
            .map(|c| Residue::from_u64(c, &n(p)))
            .find(|g| factors.iter().all(|(q, _)| !g.pow(&(&pm1 / q)).is_one()))
            .unwrap()
    }

    #[test]
    fn f13_examples() {
        let grp = PrimeFieldGroup::new(&n(13));
        let g = Residue::from_u64(2, &n(13));
        let lg = |a: u64| bsgs(&grp, &g, &Residue::from_u64(a, &n(13)), &n(12)).unwrap();
        assert_eq!(lg(8), n(3));
        assert_eq!(lg(6), n(5));
        assert_eq!(lg(1), n(0));
        let f = factor_trial(&n(12));
        let ph = pohlig_hellman(&grp, &g, &Residue::from_u64(6, &n(13)), &n(12), &f).unwrap();
        assert_eq!(ph, n(5));
    }

    #[test]
    fn f9_example() {
        let ctx = Fp2Ctx::new(&n(3), &n(2)).unwrap();
        let grp = Fp2Group::new(&ctx);
        let g = ctx.elem(&1.into(), &1.into());
        let a = g.pow(&n(5));
        let f = factor_trial(&n(8));
        assert_eq!(pohlig_hellman(&grp, &g, &a, &n(8), &f).unwrap(), n(5));
        assert_eq!(bsgs(&grp, &g, &a, &n(8)).unwrap(), n(5));
    }

    #[test]
    fn not_in_subgroup_and_bad_inputs() {
        let grp = PrimeFieldGroup::new(&n(13));
        // 3 has order 3
        let g = Residue::from_u64(3, &n(13));
        let a = Residue::from_u64(2, &n(13));
        assert_eq!(bsgs(&grp, &g, &a, &n(3)), Err(DlpError::NotInSubgroup));
        assert_eq!(exhaustive_log(&grp, &g, &a, &n(3)), Err(DlpError::NotInSubgroup));
        let f3 = vec![(n(3), 1)];
        assert_eq!(pohlig_hellman(&grp, &g, &a, &n(3), &f3), Err(DlpError::NotInSubgroup));
        assert!(matches!(
            pohlig_hellman(&grp, &g, &a, &n(12), &factor_trial(&n(12))),
            Err(DlpError::WrongOrder { .. })
        ));
        assert!(matches!(
            pohlig_hellman(&grp, &g, &a, &n(3), &[(n(2), 1)]),
            Err(DlpError::BadFactorization { .. })
        ));
        assert!(matches!(
            CyclicGroupHandle::new(grp.clone(), &n(12), vec![(n(4), 1), (n(3), 1)]),
            Err(DlpError::BadFactorization { .. })
        ));
    }

    #[test]
    fn random_trials_self_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [10007u64, 65537, 1_000_003] {
            let grp = PrimeFieldGroup::new(&n(p));
            let g = fp_generator(p);
            let handle = CyclicGroupHandle::with_trial_factorization(grp.clone(), &n(p - 1)).unwrap();
            for _ in 0..200 / 3 + 1 {
                let m = rng.gen_biguint_below(&n(p - 1));
                let a = g.pow(&m);
                assert_eq!(Oracle::PohligHellman.log_in(&handle, &g, &a).unwrap(), m);
                assert_eq!(Oracle::Bsgs.log_in(&handle, &g, &a).unwrap(), m);
            }
        }
        let p = n(103);
        let t = find_nonresidue(&p, &mut rng);
        let ctx = Fp2Ctx::new(&p, &t).unwrap();
        let order = ctx.order();
        let factors = factor_trial(&order);
        let g = find_generator(&ctx, &factors, &mut rng).unwrap();
        let grp = Fp2Group::new(&ctx);
        for _ in 0..200 {
            let m = rng.gen_biguint_below(&order);
            let a = g.pow(&m);
            assert_eq!(pohlig_hellman(&grp, &g, &a, &order, &factors).unwrap(), m);
        }
    }

    #[test]
    fn dlog_mod_l_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = 71u64;
        let grp = PrimeFieldGroup::new(&n(p));
        let g = fp_generator(p);
        let l = n(7);
        for oracle in Oracle::ALL {
            let gl = g.pow(&l);
            assert!(dlog_mod_l(&grp, &g, &gl, &l, &n(p - 1), oracle).unwrap().is_zero());
        }
        for _ in 0..200 {
            let m = rng.gen_biguint_below(&n(p - 1));
            let a = g.pow(&m);
            let r = dlog_mod_l(&grp, &g, &a, &l, &n(p - 1), Oracle::Bsgs).unwrap();
            assert_eq!(r.value(), &(&m % &l));
            let lth = crate::gf::is_lth_power_fp(&a, &l).unwrap();
            assert_eq!(lth, r.is_zero());
        }
        assert!(matches!(
            dlog_mod_l(&grp, &g, &g, &n(11), &n(p - 1), Oracle::Bsgs),
            Err(DlpError::BadDivisor { .. })
        ));
    }

    #[test]
    fn oracles_agree_on_small_prime_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in (3u64..1200).filter(|v| is_prime_u64(*v)) {
            let grp = PrimeFieldGroup::new(&n(p));
            let g = fp_generator(p);
            let order = n(p - 1);
            let f = factor_trial(&order);
            for _ in 0..3 {
                let a = Residue::new(rng.gen_biguint_range(&n(1), &n(p)), &n(p));
                let logs: Vec<_> = Oracle::ALL
                    .iter()
                    .map(|o| o.log(&grp, &g, &a, &order, &f).unwrap())
                    .collect();
                assert!(logs.iter().all(|x| *x == logs[0]), "p={p}");
                assert_eq!(g.pow(&logs[0]), a);
            }
        }
    }
}
