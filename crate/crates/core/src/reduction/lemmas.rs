//! Numerical checks of the two counting/lifting facts the construction
//! relies on.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::construct::lift_condition;
use super::ReductionError;
use crate::modarith::{
    hensel_sqrt_lift, is_prime, is_prime_u64, legendre, sqrt_mod_prime, Residue,
};

/// Sizes of the fibres of `a -> ((a^2 - c) / l)` over `0`, `1` and `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Lemma31Counts {
    pub zero: u64,
    pub plus: u64,
    pub minus: u64,
}

fn check_odd_prime(l: u64) -> Result<(), ReductionError> {
    if l == 2 || !is_prime_u64(l) {
        return Err(ReductionError::PreconditionViolated(format!(
            "{l} is not an odd prime"
        )));
    }
    Ok(())
}

/// Counts the fibres by running over all of `Z/l`.
pub fn verify_lemma31(l: u64, c: u64) -> Result<Lemma31Counts, ReductionError> {
    check_odd_prime(l)?;
    if c % l == 0 {
        return Err(ReductionError::PreconditionViolated(format!(
            "c = {c} vanishes modulo {l}"
        )));
    }
    let lb = BigUint::from(l);
    let mut counts = Lemma31Counts {
        zero: 0,
        plus: 0,
        minus: 0,
    };
    for a in 0..l {
        let v = BigInt::from(a * a) - BigInt::from(c);
        match legendre(&v, &lb) {
            0 => counts.zero += 1,
            1 => counts.plus += 1,
            _ => counts.minus += 1,
        }
    }
    Ok(counts)
}

/// The closed-form fibre sizes, which depend only on whether `c` is a square.
pub fn lemma31_expected(l: u64, c: u64) -> Lemma31Counts {
    if legendre(&BigInt::from(c), &BigUint::from(l)) == 1 {
        Lemma31Counts {
            zero: 2,
            plus: (l - 3) / 2,
            minus: (l - 1) / 2,
        }
    } else {
        Lemma31Counts {
            zero: 0,
            plus: (l - 1) / 2,
            minus: (l + 1) / 2,
        }
    }
}

/// Probability that a uniform `k` passes the shift search.
pub fn k_success_prediction(l: u64, c: i64) -> f64 {
    let c_mod = c.rem_euclid(l as i64) as u64;
    lemma31_expected(l, c_mod).plus as f64 / l as f64
}

/// Successes among `samples` uniform draws of `k` for `((t + k p)^2 - c / l) = 1`.
pub fn k_search_rate<R: Rng + ?Sized>(
    t: &BigInt,
    p: &BigUint,
    l: u64,
    c: i64,
    samples: u64,
    rng: &mut R,
) -> u64 {
    let lb = BigUint::from(l);
    let p = BigInt::from(p.clone());
    (0..samples)
        .filter(|_| {
            let a1 = t + &p * rng.gen_range(0..l);
            legendre(&(&a1 * &a1 - c), &lb) == 1
        })
        .count() as u64
}

/// Checks the shift lemma on one tuple: if `(a + sqrt(a^2 - c))^(l-1) = 1`
/// mod `l^2`, then both `(a + p l) +- sqrt((a + p l)^2 - c)` escape it.
pub fn verify_lemma32(
    l: &BigUint,
    p: &BigUint,
    a: &BigInt,
    c: i64,
) -> Result<bool, ReductionError> {
    let bad = |m: String| Err(ReductionError::PreconditionViolated(m));
    if !is_prime(l) || !is_prime(p) || l == p || l.to_u64() == Some(2) || p.to_u64() == Some(2) {
        return bad(format!("l = {l} and p = {p} must be distinct odd primes"));
    }
    let l2 = l * l;
    if !Residue::from_int(&BigInt::from(c), &l2).pow(&(l - 1u8)).is_one() {
        return bad(format!("c^(l-1) != 1 mod l^2 for c = {c}"));
    }
    let n = a * a - c;
    if legendre(&n, l) != 1 {
        return bad(format!("a^2 - c is not a nonzero square mod {l}"));
    }
    let root = hensel_sqrt_lift(&n, &sqrt_mod_prime(&Residue::from_int(&n, l))?, l)?;
    let w = &Residue::from_int(a, &l2) + &root;
    if !w.pow(&(l - 1u8)).is_one() {
        return bad("(a + sqrt(a^2 - c))^(l-1) != 1 mod l^2".into());
    }
    lift_condition(&(a + BigInt::from(p * l)), c, l)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma32Sample {
    pub l: BigUint,
    pub p: BigUint,
    pub a: BigInt,
    pub c: i64,
}

/// Draws a tuple meeting the shift lemma's hypotheses. `a` is solved from
/// `a + sqrt(a^2 - c) = w` with `w` a Teichmüller representative mod `l^2`,
/// then moved by a random multiple of `l^2`.
pub fn sample_lemma32<R: Rng + ?Sized>(c: i64, rng: &mut R) -> Lemma32Sample {
    let primes: Vec<u64> = (3..200).filter(|v| is_prime_u64(*v)).collect();
    loop {
        let l = *primes.choose(rng).unwrap();
        let p = *primes.choose(rng).unwrap();
        if p == l {
            continue;
        }
        let lb = BigUint::from(l);
        let l2 = &lb * &lb;
        let w = Residue::from_u64(rng.gen_range(1..l), &l2).pow(&lb);
        let cr = Residue::from_int(&BigInt::from(c), &l2);
        // a^2 - c = ((w^2 - c) / 2w)^2 must be a unit
        let diff = &(&w * &w) - &cr;
        if (diff.value() % &lb).is_zero() {
            continue;
        }
        let two_w = &w + &w;
        let a = &(&(&w * &w) + &cr) * &two_w.inv().expect("unit");
        let shift = BigInt::from(rng.gen_range(0u64..1000)) * BigInt::from(l2.clone());
        let a = a.to_int() + shift;
        return Lemma32Sample {
            l: lb,
            p: BigUint::from(p),
            a,
            c,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn counts(zero: u64, plus: u64, minus: u64) -> Lemma31Counts {
        Lemma31Counts { zero, plus, minus }
    }

    #[test]
    fn lemma31_examples() {
        assert_eq!(verify_lemma31(7, 1).unwrap(), counts(2, 2, 3));
        assert_eq!(verify_lemma31(7, 3).unwrap(), counts(0, 3, 4));
        assert_eq!(verify_lemma31(5, 4).unwrap(), counts(2, 1, 2));
        assert!(verify_lemma31(7, 14).is_err());
        assert!(verify_lemma31(9, 1).is_err());
    }

    #[test]
    fn lemma31_against_square_table() {
        // fibres from an explicit table of squares rather than Euler's criterion
        for l in (3u64..60).filter(|v| is_prime_u64(*v)) {
            let squares: std::collections::HashSet<u64> = (1..l).map(|a| a * a % l).collect();
            for c in 1..l {
                let mut want = counts(0, 0, 0);
                for a in 0..l {
                    let v = (a * a + l - c) % l;
                    if v == 0 {
                        want.zero += 1;
                    } else if squares.contains(&v) {
                        want.plus += 1;
                    } else {
                        want.minus += 1;
                    }
                }
                assert_eq!(verify_lemma31(l, c).unwrap(), want);
                assert_eq!(lemma31_expected(l, c), want, "l={l} c={c}");
            }
        }
    }

    #[test]
    fn lemma32_samples_and_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for c in [1, -1] {
            for _ in 0..100 {
                let s = sample_lemma32(c, &mut rng);
                assert!(verify_lemma32(&s.l, &s.p, &s.a, c).unwrap(), "{s:?}");
            }
        }
        // (3 + sqrt 8)^6 mod 49 is not 1, so the hypothesis fails
        let r = verify_lemma32(&BigUint::from(7u8), &BigUint::from(13u8), &BigInt::from(3), 1);
        assert!(matches!(r, Err(ReductionError::PreconditionViolated(_))));
    }

    #[test]
    fn prediction_values() {
        assert!((k_success_prediction(7, 1) - 2.0 / 7.0).abs() < 1e-12);
        // -1 is a non-residue mod 23
        assert!((k_success_prediction(23, -1) - 11.0 / 23.0).abs() < 1e-12);
    }
}
