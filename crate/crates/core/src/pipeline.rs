//! End-to-end round trip: pick `g` and a random `m`, lift `a = g^m`, sign it
//! with a discrete log oracle and recover `m mod l` from the signature.

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dlp::{dlog_mod_l, Fp2Group, Oracle, PrimeFieldGroup};
use crate::gf::{find_generator, find_nonresidue, order_factorization, Fp2Ctx, Fp2Elem};
use crate::reduction::{
    case_of, check_invariants, construct_case_a, construct_case_b_from_fp2, recover_dlog,
    signature_from_dlp, unit_proportionality_check, Case, ConstructConfig, InstanceRecord,
    LiftInstance, RefElem, ReductionError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// `l` divided every class number tried.
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// A unit was constructed and signed.
    Lifted,
    /// The target is an `l`-th power, so `m = 0 mod l` without a lift.
    LthPower,
    /// The target squares to 1; also `m = 0 mod l`.
    Degenerate,
    ClassNumberObstruction,
}

/// The lifted part of a round trip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiftTrace {
    pub k: String,
    pub k_draws: String,
    pub fields_tried: String,
    pub x: String,
    #[serde(rename = "D")]
    pub d: String,
    pub alpha: String,
    pub h: String,
    pub unit_norm: Option<i8>,
    pub a_ref: String,
    pub g_ref: String,
    /// Residue of `alpha` at `v'`, case B only.
    pub alpha_at_v_prime: Option<String>,
    pub y: String,
    pub sigma: String,
    pub invariants_ok: bool,
    pub proportional: bool,
    pub record: InstanceRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub case: Case,
    pub p: String,
    pub l: String,
    pub seed: String,
    pub oracle: String,
    pub t: String,
    pub g: String,
    pub m: String,
    pub m_mod_l: String,
    pub branch: Branch,
    pub lift: Option<LiftTrace>,
    /// `m mod l` from the signature (or 0 on the short-cut branches).
    pub m_recovered: Option<String>,
    /// `m mod l` recomputed from `a~` by exhaustive search.
    pub m_exhaustive: String,
    pub status: Status,
}

fn exhaustive_m(g: &Fp2Elem, a: &Fp2Elem, case: Case, l: &BigUint) -> Result<BigUint, ReductionError> {
    let p = g.ctx().p();
    let pm1 = p - 1u8;
    let r = match case {
        Case::A => {
            let (gt, at) = (g.pow(&pm1), a.pow(&pm1));
            dlog_mod_l(&Fp2Group::new(g.ctx()), &gt, &at, l, &(p + 1u8), Oracle::Exhaustive)?
        }
        Case::B => {
            let (gt, at) = (g.norm(), a.norm());
            dlog_mod_l(&PrimeFieldGroup::new(p), &gt, &at, l, &pm1, Oracle::Exhaustive)?
        }
    };
    Ok(r.value().clone())
}

fn trace(inst: &LiftInstance, oracle: Oracle) -> Result<(LiftTrace, BigUint), ReductionError> {
    let sig = signature_from_dlp(inst, oracle)?;
    let m_rec = recover_dlog(inst, &sig)?;
    let invariants_ok = check_invariants(inst).is_ok();
    let proportional = unit_proportionality_check(inst, oracle)?.holds;
    let alpha_at_v_prime = match inst.v_roots() {
        Some((_, vp)) => Some(inst.ctx().reduce_at_split(inst.alpha(), vp)?.value().to_string()),
        None => None,
    };
    let report = inst.class_report();
    Ok((
        LiftTrace {
            k: inst.k().to_string(),
            k_draws: inst.k_draws().to_string(),
            fields_tried: inst.fields_tried().to_string(),
            x: inst.x().to_string(),
            d: inst.radicand().to_string(),
            alpha: inst.alpha().to_string(),
            h: report.h.to_string(),
            unit_norm: report.unit_norm,
            a_ref: inst.a_ref().to_string(),
            g_ref: inst.g_ref().to_string(),
            alpha_at_v_prime,
            y: inst.y().value().to_string(),
            sigma: sig.sigma().value().to_string(),
            invariants_ok,
            proportional,
            record: InstanceRecord::from_signature(&sig),
        },
        m_rec.value().clone(),
    ))
}

/// Runs one round trip. `m` defaults to a uniform exponent drawn from the
/// seed. Parameter errors are returned before any work is done; a class
/// number obstruction is reported as [`Status::Rejected`].
pub fn roundtrip(
    p: &BigUint,
    l: &BigUint,
    m: Option<&BigUint>,
    cfg: &ConstructConfig,
    oracle: Oracle,
) -> Result<RoundtripReport, ReductionError> {
    let case = case_of(p, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let t = find_nonresidue(p, &mut rng);
    let fp2 = Fp2Ctx::new(p, &t)?;
    let g = find_generator(&fp2, &order_factorization(p), &mut rng)?;
    let order = fp2.order();
    let m = match m {
        Some(m) => m % &order,
        None => rng.gen_biguint_below(&order),
    };
    let a = g.pow(&m);
    let m_mod_l = &m % l;
    let m_exhaustive = exhaustive_m(&g, &a, case, l)?;

    let built = match case {
        Case::A => construct_case_a(p, l, &g, &a, cfg),
        Case::B => construct_case_b_from_fp2(p, l, &g, &a, cfg),
    };
    let (branch, lift, m_recovered) = match built {
        Ok(inst) => {
            let (tr, m_rec) = trace(&inst, oracle)?;
            (Branch::Lifted, Some(tr), Some(m_rec))
        }
        Err(ReductionError::LthPower) => (Branch::LthPower, None, Some(BigUint::zero())),
        Err(ReductionError::DegenerateTarget { m_mod_l }) => {
            (Branch::Degenerate, None, Some(BigUint::from(m_mod_l)))
        }
        Err(ReductionError::ClassNumberObstruction { .. }) => {
            (Branch::ClassNumberObstruction, None, None)
        }
        Err(e) => return Err(e),
    };

    let status = match &m_recovered {
        None => Status::Rejected,
        Some(r) => {
            let lift_ok = lift.as_ref().map_or(true, |t| t.invariants_ok && t.proportional);
            if *r == m_mod_l && m_exhaustive == m_mod_l && lift_ok {
                Status::Pass
            } else {
                Status::Fail
            }
        }
    };
    Ok(RoundtripReport {
        case,
        p: p.to_string(),
        l: l.to_string(),
        seed: cfg.seed.to_string(),
        oracle: oracle.name().to_string(),
        t: t.to_string(),
        g: RefElem::Fp2(g).to_string(),
        m: m.to_string(),
        m_mod_l: m_mod_l.to_string(),
        branch,
        lift,
        m_recovered: m_recovered.map(|r| r.to_string()),
        m_exhaustive: m_exhaustive.to_string(),
        status,
    })
}
