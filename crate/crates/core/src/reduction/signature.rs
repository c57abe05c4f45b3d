use num_traits::Signed;

use super::{Case, LiftInstance, RefElem, ReductionError};
use crate::dlp::{dlog_mod_l, Fp2Group, Oracle, PrimeFieldGroup};
use crate::modarith::{teichmuller_decompose, Residue};
use crate::quad::{fundamental_unit, QuadElem, QuadFieldCtx, RootSign, DEFAULT_MAX_PERIOD};

/// `y` with `e = xi (1 + l)^y` at `u`.
pub(crate) fn unit_y(ctx: &QuadFieldCtx, e: &QuadElem) -> Result<Residue, ReductionError> {
    let w = ctx.embed_mod_l2(e, RootSign::Plus)?;
    Ok(teichmuller_decompose(&w, ctx.l())?.y)
}

/// Recomputes `y` for the instance's unit.
pub fn compute_y(inst: &LiftInstance) -> Result<Residue, ReductionError> {
    unit_y(inst.ctx(), inst.alpha())
}

fn dlog_at_v(inst: &LiftInstance, a: &RefElem, oracle: Oracle) -> Result<Residue, ReductionError> {
    let l = inst.l();
    let order = inst.residue_group_order();
    Ok(match (inst.g_ref(), a) {
        (RefElem::Fp2(g), RefElem::Fp2(a)) => {
            if !a.norm().is_one() {
                return Err(ReductionError::PreconditionViolated(
                    "residue at v is outside the norm-one subgroup".into(),
                ));
            }
            dlog_mod_l(&Fp2Group::new(g.ctx()), g, a, l, &order, oracle)?
        }
        (RefElem::Fp(g), RefElem::Fp(a)) => {
            dlog_mod_l(&PrimeFieldGroup::new(inst.p()), g, a, l, &order, oracle)?
        }
        _ => return Err(ReductionError::InvariantViolated("mixed residue groups".into())),
    })
}

/// `(y, m)` for a unit `e` of `K`: the exponent of `1 + l` at `u` and
/// `log_{g~}` of its residue at `v`, both mod `l`.
pub fn local_exponents(
    inst: &LiftInstance,
    e: &QuadElem,
    oracle: Oracle,
) -> Result<(Residue, Residue), ReductionError> {
    let y = unit_y(inst.ctx(), e)?;
    let m = dlog_at_v(inst, &inst.reduce_at_v(e)?, oracle)?;
    Ok((y, m))
}

/// `-y / m mod l` for an arbitrary unit `e` that is not an `l`-th power at `v`.
pub fn signature_of_unit(
    inst: &LiftInstance,
    e: &QuadElem,
    oracle: Oracle,
) -> Result<Residue, ReductionError> {
    let (y, m) = local_exponents(inst, e, oracle)?;
    if m.is_zero() {
        return Err(ReductionError::PreconditionViolated(
            "unit is an l-th power at v".into(),
        ));
    }
    Ok(-&(&y * &m.inv()?))
}

/// The signature `sigma` of `U` with respect to the reference generator,
/// with the instance it was computed for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    sigma: Residue,
    generator_ref: String,
    instance: LiftInstance,
}

impl Signature {
    /// Wraps an externally obtained value of `sigma`.
    pub fn new(sigma: Residue, instance: &LiftInstance) -> Result<Self, ReductionError> {
        if sigma.modulus() != instance.l() {
            return Err(ReductionError::InvalidParameters(format!(
                "signature must be a residue modulo {}",
                instance.l()
            )));
        }
        Ok(Signature {
            sigma,
            generator_ref: instance.g_ref().to_string(),
            instance: instance.clone(),
        })
    }

    pub fn sigma(&self) -> &Residue {
        &self.sigma
    }

    pub fn generator_ref(&self) -> &str {
        &self.generator_ref
    }

    pub fn instance(&self) -> &LiftInstance {
        &self.instance
    }
}

/// `sigma = -y / m`, with `m = log_{g~} a~ mod l` taken from the oracle.
pub fn signature_from_dlp(inst: &LiftInstance, oracle: Oracle) -> Result<Signature, ReductionError> {
    let m = dlog_at_v(inst, inst.a_ref(), oracle)?;
    if m.is_zero() {
        return Err(ReductionError::InvariantViolated(
            "a~ is an l-th power at v".into(),
        ));
    }
    let y = compute_y(inst)?;
    let sigma = -&(&y * &m.inv()?);
    Signature::new(sigma, inst)
}

pub(crate) fn m_from_parts(y: &Residue, sigma: &Residue) -> Result<Residue, ReductionError> {
    if sigma.is_zero() {
        return Err(ReductionError::ZeroSignature);
    }
    Ok(-&(y * &sigma.inv()?))
}

/// `m = -y / sigma mod l`.
pub fn recover_dlog(inst: &LiftInstance, sig: &Signature) -> Result<Residue, ReductionError> {
    if sig.instance() != inst {
        return Err(ReductionError::InstanceMismatch);
    }
    m_from_parts(inst.y(), sig.sigma())
}

/// Local exponent pairs of a second unit `eps` and of `alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proportionality {
    pub eps: QuadElem,
    pub y_eps: Residue,
    pub m_eps: Residue,
    pub y_alpha: Residue,
    pub m_alpha: Residue,
    pub holds: bool,
}

impl Proportionality {
    /// Compares the pairs of `eps` and of the instance's unit.
    pub fn compute(inst: &LiftInstance, eps: &QuadElem, oracle: Oracle) -> Result<Self, ReductionError> {
        let (y_eps, m_eps) = local_exponents(inst, eps, oracle)?;
        let (y_alpha, m_alpha) = local_exponents(inst, inst.alpha(), oracle)?;
        let holds = &y_eps * &m_alpha == &y_alpha * &m_eps;
        Ok(Proportionality {
            eps: eps.clone(),
            y_eps,
            m_eps,
            y_alpha,
            m_alpha,
            holds,
        })
    }
}

/// `y_eps m_alpha = y_alpha m_eps (mod l)` for the fundamental unit `eps`.
/// In case A a unit of norm -1 is squared first so that its residue lies in
/// the norm-one subgroup.
pub fn unit_proportionality_check(
    inst: &LiftInstance,
    oracle: Oracle,
) -> Result<Proportionality, ReductionError> {
    let mut eps = fundamental_unit(inst.radicand(), DEFAULT_MAX_PERIOD)?;
    if inst.case() == Case::A && !eps.norm().is_positive() {
        eps = eps.mul(&eps);
    }
    Proportionality::compute(inst, &eps, oracle)
}
