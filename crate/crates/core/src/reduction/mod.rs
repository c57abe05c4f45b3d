//! Lifting discrete logarithms to units of real quadratic fields, and back.
//!
//! A target `a = g^m` in `F_{p^2}^x` (or its norm in `F_p^x`) is lifted to a
//! unit `alpha` of `K = Q(sqrt(D))` whose residue at a place `v` over `p` is
//! the target, and whose image at a place `u` over `l` is `xi (1 + l)^y` with
//! `y != 0`. The signature of `U = Spec A_K - {u, v}` is then `-y / m mod l`.

mod construct;
mod lemmas;
mod record;
mod signature;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dlp::DlpError;
use crate::gf::{Fp2Ctx, Fp2Elem, GfError};
use crate::modarith::{ModArithError, Residue};
use crate::quad::{ClassNumberMethod, ClassNumberReport, QuadElem, QuadError, QuadFieldCtx};

pub use construct::{
    case_of, check_invariants, construct_case_a, construct_case_b, construct_case_b_from_fp2,
    hensel_shift_adjust, lift_condition,
};
pub use lemmas::{
    k_search_rate, k_success_prediction, lemma31_expected, sample_lemma32, verify_lemma31,
    verify_lemma32, Lemma31Counts, Lemma32Sample,
};
pub use record::InstanceRecord;
pub use signature::{
    compute_y, local_exponents, recover_dlog, signature_from_dlp, signature_of_unit,
    unit_proportionality_check, Proportionality, Signature,
};

/// `A`: `l | p + 1`, target in the norm-one subgroup of `F_{p^2}^x`.
/// `B`: `l | p - 1`, target in `F_p^x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    A,
    B,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::A => "A",
            Case::B => "B",
        })
    }
}

impl FromStr for Case {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Case::A),
            "B" | "b" => Ok(Case::B),
            _ => Err(ReductionError::InvalidParameters(format!("unknown case {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("degenerate target (square is 1); log is {m_mod_l} mod l")]
    DegenerateTarget { m_mod_l: u64 },
    #[error("target is an l-th power; log is 0 mod l")]
    LthPower,
    #[error("l divides the class number of every one of {fields} fields tried")]
    ClassNumberObstruction { fields: usize, class_numbers: Vec<u64> },
    #[error("no admissible shift k found in {attempts} draws")]
    SearchExhausted { attempts: u64 },
    #[error("discrete log oracle failed: {0}")]
    OracleFailure(#[from] DlpError),
    #[error("signature is zero")]
    ZeroSignature,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("instance invariant violated: {0}")]
    InvariantViolated(String),
    #[error("signature belongs to a different instance")]
    InstanceMismatch,
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Arith(#[from] ModArithError),
}

impl ReductionError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            ReductionError::InvalidParameters(_) => "invalid-parameters",
            ReductionError::DegenerateTarget { .. } => "degenerate-target",
            ReductionError::LthPower => "lth-power",
            ReductionError::ClassNumberObstruction { .. } => "class-number-obstruction",
            ReductionError::SearchExhausted { .. } => "search-exhausted",
            ReductionError::OracleFailure(_) => "oracle-failure",
            ReductionError::ZeroSignature => "zero-signature",
            ReductionError::PreconditionViolated(_) => "precondition-violated",
            ReductionError::InvariantViolated(_) => "invariant-violated",
            ReductionError::InstanceMismatch => "instance-mismatch",
            ReductionError::Quad(QuadError::Overflow { .. }) => "overflow",
            ReductionError::Quad(_) => "quadratic-field",
            ReductionError::Gf(_) => "finite-field",
            ReductionError::Arith(_) => "arithmetic",
        }
    }
}

/// Knobs of the randomized construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructConfig {
    pub seed: u64,
    /// Draws of `k` allowed per field; `None` means `8 l`.
    pub k_budget: Option<u64>,
    /// Fields tried before giving up on `l | h_K`.
    pub max_fields: usize,
    pub class_method: ClassNumberMethod,
}

impl ConstructConfig {
    pub fn new(seed: u64) -> Self {
        ConstructConfig {
            seed,
            ..Default::default()
        }
    }
}

impl Default for ConstructConfig {
    fn default() -> Self {
        ConstructConfig {
            seed: 0,
            k_budget: None,
            max_fields: 20,
            class_method: ClassNumberMethod::FormCycles,
        }
    }
}

/// An element of the residue group at `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RefElem {
    Fp(Residue),
    Fp2(Fp2Elem),
}

impl fmt::Display for RefElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefElem::Fp(r) => write!(f, "{}", r.value()),
            RefElem::Fp2(e) => write!(f, "{} + {}*sqrt({})", e.a0().value(), e.b0().value(), e.ctx().t()),
        }
    }
}

/// Output of a construction: the field, the unit and the local data at `u`
/// and `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftInstance {
    case: Case,
    p: BigUint,
    l: BigUint,
    fp2: Option<Fp2Ctx>,
    g_ref: RefElem,
    a_ref: RefElem,
    /// `b~ = a~^-1`, case B only.
    b_ref: Option<Residue>,
    /// Image of `sqrt(D)` at `v` and at `v'` (case B only).
    v_roots: Option<(Residue, Residue)>,
    k: u64,
    x: BigInt,
    ctx: QuadFieldCtx,
    alpha: QuadElem,
    y: Residue,
    class_report: ClassNumberReport,
    seed: u64,
    k_draws: u64,
    fields_tried: usize,
}

impl LiftInstance {
    pub fn case(&self) -> Case {
        self.case
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn l(&self) -> &BigUint {
        &self.l
    }

    pub fn fp2(&self) -> Option<&Fp2Ctx> {
        self.fp2.as_ref()
    }

    /// `g~`: `g^(p-1)` in case A, `Nm(g)` in case B.
    pub fn g_ref(&self) -> &RefElem {
        &self.g_ref
    }

    /// `a~`, the lifted target.
    pub fn a_ref(&self) -> &RefElem {
        &self.a_ref
    }

    pub fn b_ref(&self) -> Option<&Residue> {
        self.b_ref.as_ref()
    }

    pub fn v_roots(&self) -> Option<&(Residue, Residue)> {
        self.v_roots.as_ref()
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn radicand(&self) -> &BigInt {
        self.ctx.radicand()
    }

    pub fn ctx(&self) -> &QuadFieldCtx {
        &self.ctx
    }

    pub fn alpha(&self) -> &QuadElem {
        &self.alpha
    }

    /// Exponent of `1 + l` in the image of `alpha` at `u`.
    pub fn y(&self) -> &Residue {
        &self.y
    }

    pub fn class_report(&self) -> &ClassNumberReport {
        &self.class_report
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Total draws of `k` over all fields tried.
    pub fn k_draws(&self) -> u64 {
        self.k_draws
    }

    pub fn fields_tried(&self) -> usize {
        self.fields_tried
    }

    /// Order of the cyclic group at `v` that holds `g~` and `a~`.
    pub fn residue_group_order(&self) -> BigUint {
        match self.case {
            Case::A => &self.p + 1u8,
            Case::B => &self.p - 1u8,
        }
    }

    /// Residue of a unit of `K` at `v`.
    pub fn reduce_at_v(&self, e: &QuadElem) -> Result<RefElem, ReductionError> {
        Ok(match (&self.fp2, &self.v_roots) {
            (Some(fp2), _) => RefElem::Fp2(self.ctx.reduce_at_inert(e, fp2)?),
            (None, Some((v, _))) => RefElem::Fp(self.ctx.reduce_at_split(e, v)?),
            (None, None) => unreachable!("every instance has data at v"),
        })
    }

    /// The same instance with `alpha` replaced by another unit; `y`
    /// and `a~` are recomputed, everything else is kept.
    pub fn with_unit(&self, alpha: QuadElem) -> Result<LiftInstance, ReductionError> {
        if self.case == Case::A && !alpha.norm().is_one() {
            return Err(ReductionError::PreconditionViolated(
                "replacement unit must have norm 1".into(),
            ));
        }
        let mut next = self.clone();
        next.a_ref = self.reduce_at_v(&alpha)?;
        if let (Case::B, RefElem::Fp(a)) = (self.case, &next.a_ref) {
            next.b_ref = Some(a.inv()?);
        }
        next.y = signature::unit_y(&self.ctx, &alpha)?;
        next.alpha = alpha;
        Ok(next)
    }
}
