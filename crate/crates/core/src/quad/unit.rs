use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::{squarefree_decompose, QuadElem, QuadError};

/// Cap on the continued-fraction period walked by [`fundamental_unit`].
pub const DEFAULT_MAX_PERIOD: usize = 2_000_000;

/// Fundamental unit `(u + v sqrt(disc)) / 2 > 1` of the order of discriminant
/// `disc`, with the period length of the expansion that produced it.
///
/// Expands the reduced number `(b + sqrt(disc)) / 2`, `b` the largest integer
/// below `sqrt(disc)` with `b = disc (mod 2)`. Its expansion is purely
/// periodic; after one period `r` the unit is `B_{r-1} theta + B_{r-2}` where
/// `B_i` are the convergent denominators.
pub fn fundamental_unit_of_disc(
    disc: &BigUint,
    max_period: usize,
) -> Result<(BigInt, BigInt, usize), QuadError> {
    let disc_i = disc
        .to_i128()
        .filter(|v| *v < (1i128 << 100))
        .ok_or(QuadError::Overflow {
            what: "discriminant for the unit computation",
            bound: "2^100".into(),
        })?;
    let s = disc.sqrt().to_i128().unwrap();
    if s * s == disc_i {
        return Err(QuadError::BadRadicand(BigInt::from(disc.clone())));
    }
    let b0 = if (s - disc_i) % 2 == 0 { s } else { s - 1 };
    let (p0, q0) = (b0, 2i128);

    let (mut p, mut q) = (p0, q0);
    let mut prev = BigInt::one(); // B_{i-2}
    let mut cur = BigInt::zero(); // B_{i-1}
    let mut period = 0usize;
    loop {
        let a = (p + s) / q;
        let next = BigInt::from(a) * &cur + &prev;
        prev = std::mem::replace(&mut cur, next);
        p = a * q - p;
        q = (disc_i - p * p) / q;
        period += 1;
        if (p, q) == (p0, q0) {
            break;
        }
        if period >= max_period {
            return Err(QuadError::Overflow {
                what: "continued fraction period",
                bound: max_period.to_string(),
            });
        }
    }
    let u = BigInt::from(2) * &prev + &cur * BigInt::from(b0);
    Ok((u, cur, period))
}

/// Fundamental unit `eps > 1` of the maximal order of `Q(sqrt(D))`, written
/// over the radicand `D` as given.
pub fn fundamental_unit(radicand: &BigInt, max_period: usize) -> Result<QuadElem, QuadError> {
    let d_abs = radicand
        .to_biguint()
        .filter(|v| !v.is_zero())
        .ok_or_else(|| QuadError::BadRadicand(radicand.clone()))?;
    let (kernel, conductor) = squarefree_decompose(&d_abs)?;
    if kernel.is_one() {
        return Err(QuadError::BadRadicand(radicand.clone()));
    }
    let (disc, scale) = if (&kernel % 4u8) == BigUint::one() {
        (kernel.clone(), 1)
    } else {
        (kernel.clone() * 4u8, 2)
    };
    let (u, v, _) = fundamental_unit_of_disc(&disc, max_period)?;
    // sqrt(disc) = scale * sqrt(d) = scale * sqrt(D) / f
    let f = BigInt::from(conductor);
    QuadElem::with_den(&u * &f, v * scale, BigInt::from(2) * f, radicand)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn small_units() {
        let e2 = fundamental_unit(&i(2), DEFAULT_MAX_PERIOD).unwrap();
        assert_eq!((e2.x(), e2.y(), e2.den()), (&i(1), &i(1), &i(1)));
        assert_eq!(e2.norm(), i(-1));
        let e3 = fundamental_unit(&i(3), DEFAULT_MAX_PERIOD).unwrap();
        assert_eq!((e3.x(), e3.y(), e3.den()), (&i(2), &i(1), &i(1)));
        assert_eq!(e3.norm(), i(1));
        let e5 = fundamental_unit(&i(5), DEFAULT_MAX_PERIOD).unwrap();
        assert_eq!((e5.x(), e5.y(), e5.den()), (&i(1), &i(1), &i(2)));
        // D = 8 = 2^2 * 2 gives 1 + sqrt(2) = (2 + sqrt(8)) / 2
        let e8 = fundamental_unit(&i(8), DEFAULT_MAX_PERIOD).unwrap();
        assert_eq!((e8.x(), e8.y(), e8.den()), (&i(2), &i(1), &i(2)));
        for k in 1..=5 {
            assert!(e3.pow(k).is_unit());
            assert!(e5.pow(k).is_unit());
        }
        assert!(fundamental_unit(&i(9), DEFAULT_MAX_PERIOD).is_err());
    }

    #[test]
    fn large_regulator() {
        // d = 94: eps = 2143295 + 221064 sqrt(94)
        let e = fundamental_unit(&i(94), DEFAULT_MAX_PERIOD).unwrap();
        assert_eq!((e.x(), e.y()), (&i(2143295), &i(221064)));
        assert!(fundamental_unit(&i(94), 3).is_err());
    }

    // Smallest v > 0 with disc v^2 +- 4 a perfect square.
    fn pell_scan(disc: u64, limit: u64) -> Option<(u64, u64)> {
        (1..limit).find_map(|v| {
            let base = disc * v * v;
            [base - 4, base + 4].into_iter().find_map(|n| {
                let u = (n as f64).sqrt() as u64;
                (u.saturating_sub(1)..=u + 1)
                    .find(|c| c * c == n)
                    .map(|c| (c, v))
            })
        })
    }

    #[test]
    fn agrees_with_pell_scan() {
        for d in 2u64..=300 {
            let (kernel, conductor) = squarefree_decompose(&BigUint::from(d)).unwrap();
            if !conductor.is_one() || kernel.is_one() {
                continue;
            }
            let disc = if d % 4 == 1 { d } else { 4 * d };
            let (u, v, _) = fundamental_unit_of_disc(&BigUint::from(disc), DEFAULT_MAX_PERIOD).unwrap();
            let norm4 = &u * &u - BigInt::from(disc) * &v * &v;
            assert!(norm4 == i(4) || norm4 == i(-4), "d={d}");
            if let Some((su, sv)) = pell_scan(disc, 20_000) {
                assert_eq!((u, v), (BigInt::from(su), BigInt::from(sv)), "d={d}");
            } else {
                assert!(v > BigInt::from(20_000));
            }
        }
    }
}
