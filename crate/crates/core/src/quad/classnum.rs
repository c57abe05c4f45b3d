use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{forms, ideals, squarefree_decompose, QuadError};

/// Largest field discriminant the form-cycle route accepts by default.
pub const DEFAULT_DISC_LIMIT: u64 = 4_000_000_000;
/// Largest field discriminant the ideal route accepts.
pub const IDEAL_DISC_LIMIT: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassNumberMethod {
    FormCycles,
    BruteForceIdeals,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassNumberReport {
    /// Wide class number of the maximal order.
    pub h: u64,
    pub method: ClassNumberMethod,
    pub l_divides: bool,
    /// Norm of the fundamental unit, known on the form-cycle route
    /// (narrow class number is `2h` when it is `+1`, `h` otherwise).
    pub unit_norm: Option<i8>,
}

/// `(h, narrow h)` for a fundamental discriminant.
pub fn class_number_of_disc(
    disc: u64,
    method: ClassNumberMethod,
) -> Result<(u64, Option<u64>), QuadError> {
    let limit = match method {
        ClassNumberMethod::FormCycles => DEFAULT_DISC_LIMIT,
        ClassNumberMethod::BruteForceIdeals => IDEAL_DISC_LIMIT,
    };
    if disc > limit {
        return Err(QuadError::Overflow {
            what: "field discriminant",
            bound: limit.to_string(),
        });
    }
    let disc = disc as i64;
    Ok(match method {
        ClassNumberMethod::FormCycles => {
            let (narrow, wide) = forms::class_numbers(disc);
            (wide, Some(narrow))
        }
        ClassNumberMethod::BruteForceIdeals => (ideals::class_number(disc), None),
    })
}

/// Class number of the maximal order of `Q(sqrt(D))`, with the
/// divisibility flag for `l`.
pub fn class_number(
    radicand: &BigInt,
    l: &BigUint,
    method: ClassNumberMethod,
) -> Result<ClassNumberReport, QuadError> {
    let d_abs = radicand
        .to_biguint()
        .filter(|v| !v.is_zero())
        .ok_or_else(|| QuadError::BadRadicand(radicand.clone()))?;
    let (kernel, _) = squarefree_decompose(&d_abs)?;
    if kernel.is_one() {
        return Err(QuadError::BadRadicand(radicand.clone()));
    }
    let disc = if (&kernel % 4u8).is_one() {
        kernel
    } else {
        kernel * 4u8
    };
    let disc = disc.to_u64().ok_or(QuadError::Overflow {
        what: "field discriminant",
        bound: DEFAULT_DISC_LIMIT.to_string(),
    })?;
    let (h, narrow) = class_number_of_disc(disc, method)?;
    Ok(ClassNumberReport {
        h,
        method,
        l_divides: (BigUint::from(h) % l).is_zero(),
        unit_norm: narrow.map(|n| if n == h { -1 } else { 1 }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(d: i64, method: ClassNumberMethod) -> ClassNumberReport {
        class_number(&BigInt::from(d), &BigUint::from(2u8), method).unwrap()
    }

    #[test]
    fn spec_examples() {
        for m in [ClassNumberMethod::FormCycles, ClassNumberMethod::BruteForceIdeals] {
            assert_eq!(report(2, m).h, 1);
            assert_eq!(report(10, m).h, 2);
            assert_eq!(report(79, m).h, 3);
            assert_eq!(report(82, m).h, 4);
            // non-squarefree radicands use the kernel: 40 = 2^2 * 10
            assert_eq!(report(40, m).h, 2);
        }
        assert_eq!(report(2, ClassNumberMethod::FormCycles).unit_norm, Some(-1));
        assert_eq!(report(3, ClassNumberMethod::FormCycles).unit_norm, Some(1));
        assert!(report(10, ClassNumberMethod::FormCycles).l_divides);
        assert!(!report(79, ClassNumberMethod::FormCycles).l_divides);
    }

    #[test]
    fn limits_and_bad_input() {
        assert!(matches!(
            class_number(&BigInt::from(49), &BigUint::from(3u8), ClassNumberMethod::FormCycles),
            Err(QuadError::BadRadicand(_))
        ));
        assert!(matches!(
            class_number_of_disc(IDEAL_DISC_LIMIT + 1, ClassNumberMethod::BruteForceIdeals),
            Err(QuadError::Overflow { .. })
        ));
    }

    #[test]
    fn routes_agree_beyond_the_acceptance_range() {
        for d in (301u64..1200).step_by(7) {
            let (k, f) = squarefree_decompose(&BigUint::from(d)).unwrap();
            if !f.is_one() || k.is_one() {
                continue;
            }
            let disc = if d % 4 == 1 { d } else { 4 * d };
            let a = class_number_of_disc(disc, ClassNumberMethod::FormCycles).unwrap().0;
            let b = class_number_of_disc(disc, ClassNumberMethod::BruteForceIdeals).unwrap().0;
            assert_eq!(a, b, "d={d}");
        }
    }
}
