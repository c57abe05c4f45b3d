//! Real quadratic fields `K = Q(sqrt(D))`.
//!
//! `D` is kept exactly as the constructions produce it (`x^2 - 1` or
//! `x^2 + 1`, usually not squarefree). Invariants of the maximal order (class
//! number, fundamental unit) are computed for the squarefree kernel `d` with
//! `D = f^2 d`.
//!
//! Local conventions: `r` is the Hensel lift to `Z/l^2` of the smaller square
//! root of `D` modulo `l`, and the place `u` over `l` is the one where
//! `sqrt(D) -> +r`. At an inert `p`, `sqrt(D) -> s * sqrt(t)` with `s` the
//! smaller root of `D / t` modulo `p`.

mod classnum;
mod forms;
mod ideals;
mod unit;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::gf::{Fp2Ctx, Fp2Elem};
use crate::modarith::{hensel_sqrt_lift, legendre, sqrt_mod_prime, ModArithError, Residue};

pub use classnum::{
    class_number, class_number_of_disc, ClassNumberMethod, ClassNumberReport,
    DEFAULT_DISC_LIMIT, IDEAL_DISC_LIMIT,
};
pub use unit::{fundamental_unit, fundamental_unit_of_disc, DEFAULT_MAX_PERIOD};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("radicand {0} must be a positive non-square")]
    BadRadicand(BigInt),
    #[error("{l} does not split in Q(sqrt({d}))")]
    NotSplitAtL { d: BigInt, l: BigUint },
    #[error("{p} is not inert in Q(sqrt({d}))")]
    NotInert { d: BigInt, p: BigUint },
    #[error("{root} is not a square root of the radicand modulo {modulus}")]
    BadRoot { root: BigUint, modulus: BigUint },
    #[error("element is not a unit at the place over {0}")]
    NotLocalUnit(BigUint),
    #[error("elements of different fields")]
    FieldMismatch,
    #[error("({x} + {y} sqrt(D)) / {den} is not an algebraic integer")]
    NotIntegral { x: BigInt, y: BigInt, den: BigInt },
    #[error("{what} exceeds the configured bound {bound}")]
    Overflow { what: &'static str, bound: String },
    #[error(transparent)]
    Arith(#[from] ModArithError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SplittingType {
    Inert,
    Split,
    Ramified,
}

/// Decomposition type of the odd prime `q` in `Q(sqrt(D))`, read off the
/// Legendre symbol of the radicand.
pub fn splitting_type(d: &BigInt, q: &BigUint) -> SplittingType {
    match legendre(d, q) {
        1 => SplittingType::Split,
        -1 => SplittingType::Inert,
        _ => SplittingType::Ramified,
    }
}

/// How `p` behaves in the field. For a split prime both square roots of `D`
/// modulo `p` are stored, smaller first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeBehavior {
    Inert,
    Split(Residue, Residue),
    Ramified,
}

/// Which of the two places over `l` an embedding uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootSign {
    Plus,
    Minus,
}

/// Writes `D = f^2 d` with `d` squarefree. Trial division runs to the cube
/// root; a leftover cofactor has at most two prime factors, so it is either
/// a prime square or squarefree.
pub fn squarefree_decompose(n: &BigUint) -> Result<(BigUint, BigUint), QuadError> {
    let small = n.to_u128().filter(|v| *v < (1u128 << 90)).ok_or(QuadError::Overflow {
        what: "radicand for squarefree decomposition",
        bound: "2^90".into(),
    })?;
    if small == 0 {
        return Err(QuadError::BadRadicand(BigInt::zero()));
    }
    let mut rest = small;
    let mut kernel: u128 = 1;
    let mut conductor: u128 = 1;
    let mut q: u128 = 2;
    while q * q * q <= rest {
        let mut e = 0;
        while rest % q == 0 {
            rest /= q;
            e += 1;
        }
        conductor *= q.pow(e / 2);
        if e % 2 == 1 {
            kernel *= q;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    let root = BigUint::from(rest).sqrt().to_u128().unwrap();
    if rest > 1 && root * root == rest {
        conductor *= root;
    } else {
        kernel *= rest;
    }
    Ok((BigUint::from(kernel), BigUint::from(conductor)))
}

/// Context of `K = Q(sqrt(D))` together with its chosen local data at the
/// primes `l` (split) and `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadFieldCtx {
    radicand: BigInt,
    kernel: BigUint,
    conductor: BigUint,
    p: BigUint,
    l: BigUint,
    root_l2: Residue,
    behavior_p: PrimeBehavior,
}

impl QuadFieldCtx {
    pub fn new(radicand: &BigInt, p: &BigUint, l: &BigUint) -> Result<Self, QuadError> {
        let d_abs = match radicand.to_biguint() {
            Some(v) if !v.is_zero() && v.sqrt().pow(2) != v => v,
            _ => return Err(QuadError::BadRadicand(radicand.clone())),
        };
        if legendre(radicand, l) != 1 {
            return Err(QuadError::NotSplitAtL {
                d: radicand.clone(),
                l: l.clone(),
            });
        }
        let (kernel, conductor) = squarefree_decompose(&d_abs)?;
        let root_l = sqrt_mod_prime(&Residue::from_int(radicand, l))?;
        let root_l2 = hensel_sqrt_lift(radicand, &root_l, l)?;
        let behavior_p = match splitting_type(radicand, p) {
            SplittingType::Inert => PrimeBehavior::Inert,
            SplittingType::Ramified => PrimeBehavior::Ramified,
            SplittingType::Split => {
                let s = sqrt_mod_prime(&Residue::from_int(radicand, p))?;
                let other = -&s;
                PrimeBehavior::Split(s, other)
            }
        };
        Ok(QuadFieldCtx {
            radicand: radicand.clone(),
            kernel,
            conductor,
            p: p.clone(),
            l: l.clone(),
            root_l2,
            behavior_p,
        })
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    /// Squarefree kernel `d` of the radicand.
    pub fn kernel(&self) -> &BigUint {
        &self.kernel
    }

    /// `f` with `D = f^2 d`.
    pub fn conductor(&self) -> &BigUint {
        &self.conductor
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn l(&self) -> &BigUint {
        &self.l
    }

    /// The canonical square root `r` of `D` modulo `l^2`.
    pub fn root_l2(&self) -> &Residue {
        &self.root_l2
    }

    pub fn behavior_p(&self) -> &PrimeBehavior {
        &self.behavior_p
    }

    pub fn elem(&self, x: BigInt, y: BigInt) -> QuadElem {
        QuadElem::new(x, y, &self.radicand)
    }

    /// Residue map at the inert place over `p`.
    pub fn reduce_at_inert(&self, e: &QuadElem, fp2: &Fp2Ctx) -> Result<Fp2Elem, QuadError> {
        if self.behavior_p != PrimeBehavior::Inert || fp2.p() != &self.p {
            return Err(QuadError::NotInert {
                d: self.radicand.clone(),
                p: self.p.clone(),
            });
        }
        self.check_field(e)?;
        let p = &self.p;
        let t = Residue::new(fp2.t().clone(), p);
        let d_over_t = &Residue::from_int(&self.radicand, p) * &t.inv()?;
        let s = sqrt_mod_prime(&d_over_t)?;
        let den_inv = Residue::from_int(&e.den, p).inv()?;
        let a0 = &Residue::from_int(&e.x, p) * &den_inv;
        let b0 = &(&Residue::from_int(&e.y, p) * &s) * &den_inv;
        Ok(fp2.from_parts(a0, b0))
    }

    /// Residue map at a split place, given by the image `root` of `sqrt(D)`
    /// modulo a prime `q`.
    pub fn reduce_at_split(&self, e: &QuadElem, root: &Residue) -> Result<Residue, QuadError> {
        self.check_field(e)?;
        reduce_at_root(e, root)
    }

    /// Image of `e` in `A_K / I_u^2 = Z/l^2`, with `sqrt(D) -> +r` (place `u`)
    /// or `-r` (the conjugate place).
    pub fn embed_mod_l2(&self, e: &QuadElem, which: RootSign) -> Result<Residue, QuadError> {
        self.check_field(e)?;
        let root = match which {
            RootSign::Plus => self.root_l2.clone(),
            RootSign::Minus => -&self.root_l2,
        };
        reduce_at_root(e, &root)
    }

    /// `e^(l-1) != 1 mod I^2` at the place selected by `which`.
    pub fn unit_condition(&self, e: &QuadElem, which: RootSign) -> Result<bool, QuadError> {
        let w = self.embed_mod_l2(e, which)?;
        if (w.value() % &self.l).is_zero() {
            return Err(QuadError::NotLocalUnit(self.l.clone()));
        }
        Ok(!w.pow(&(&self.l - 1u8)).is_one())
    }

    /// The condition at `u`.
    pub fn unit_condition_at_u(&self, e: &QuadElem) -> Result<bool, QuadError> {
        self.unit_condition(e, RootSign::Plus)
    }

    fn check_field(&self, e: &QuadElem) -> Result<(), QuadError> {
        if e.radicand != self.radicand {
            return Err(QuadError::FieldMismatch);
        }
        Ok(())
    }
}

fn reduce_at_root(e: &QuadElem, root: &Residue) -> Result<Residue, QuadError> {
    let q = root.modulus();
    if &(root * root) != &Residue::from_int(&e.radicand, q) {
        return Err(QuadError::BadRoot {
            root: root.value().clone(),
            modulus: q.clone(),
        });
    }
    let num = &Residue::from_int(&e.x, q) + &(&Residue::from_int(&e.y, q) * root);
    Ok(&num * &Residue::from_int(&e.den, q).inv()?)
}

/// `(x + y sqrt(D)) / den` with `den > 0` and `gcd(x, y, den) = 1`. Every
/// constructed element is an algebraic integer; `den` is 1 except for
/// maximal-order elements outside `Z[sqrt(D)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElem {
    x: BigInt,
    y: BigInt,
    den: BigInt,
    radicand: BigInt,
}

impl QuadElem {
    pub fn new(x: BigInt, y: BigInt, radicand: &BigInt) -> Self {
        QuadElem {
            x,
            y,
            den: BigInt::one(),
            radicand: radicand.clone(),
        }
    }

    /// `(x + y sqrt(D)) / den`, rejected unless integral.
    pub fn with_den(
        x: BigInt,
        y: BigInt,
        den: BigInt,
        radicand: &BigInt,
    ) -> Result<Self, QuadError> {
        if !den.is_positive() {
            return Err(QuadError::NotIntegral { x, y, den });
        }
        let e = QuadElem {
            x,
            y,
            den,
            radicand: radicand.clone(),
        }
        .normalized();
        let den2 = &e.den * &e.den;
        let trace_ok = (BigInt::from(2) * &e.x).is_multiple_of(&e.den);
        let norm_ok = (&e.x * &e.x - &e.radicand * &e.y * &e.y).is_multiple_of(&den2);
        if !(trace_ok && norm_ok) {
            return Err(QuadError::NotIntegral {
                x: e.x,
                y: e.y,
                den: e.den,
            });
        }
        Ok(e)
    }

    pub fn from_int(n: BigInt, radicand: &BigInt) -> Self {
        QuadElem::new(n, BigInt::zero(), radicand)
    }

    pub fn one(radicand: &BigInt) -> Self {
        QuadElem::from_int(BigInt::one(), radicand)
    }

    fn normalized(mut self) -> Self {
        let g = self.x.gcd(&self.y).gcd(&self.den);
        if !g.is_zero() && !g.is_one() {
            self.x /= &g;
            self.y /= &g;
            self.den /= &g;
        }
        self
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn conj(&self) -> QuadElem {
        QuadElem {
            x: self.x.clone(),
            y: -&self.y,
            den: self.den.clone(),
            radicand: self.radicand.clone(),
        }
    }

    pub fn neg(&self) -> QuadElem {
        QuadElem {
            x: -&self.x,
            y: -&self.y,
            den: self.den.clone(),
            radicand: self.radicand.clone(),
        }
    }

    pub fn mul(&self, rhs: &QuadElem) -> QuadElem {
        assert_eq!(self.radicand, rhs.radicand, "elements of different fields");
        QuadElem {
            x: &self.x * &rhs.x + &self.radicand * &self.y * &rhs.y,
            y: &self.x * &rhs.y + &self.y * &rhs.x,
            den: &self.den * &rhs.den,
            radicand: self.radicand.clone(),
        }
        .normalized()
    }

    pub fn pow(&self, mut exp: u64) -> QuadElem {
        let mut acc = QuadElem::one(&self.radicand);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    /// Exact norm `(x^2 - D y^2) / den^2`.
    pub fn norm(&self) -> BigInt {
        (&self.x * &self.x - &self.radicand * &self.y * &self.y) / (&self.den * &self.den)
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.y.is_negative() { '-' } else { '+' };
        let body = format!("{} {sign} {}*sqrt({})", self.x, self.y.magnitude(), self.radicand);
        if self.den.is_one() {
            f.write_str(&body)
        } else {
            write!(f, "({body})/{}", self.den)
        }
    }
}
