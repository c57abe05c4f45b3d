use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::signature::unit_y;
use super::{Case, ConstructConfig, LiftInstance, RefElem, ReductionError};
use crate::gf::{is_generator, is_lth_power, order_factorization, Fp2Elem};
use crate::modarith::{
    factor_trial, hensel_sqrt_lift, is_prime, legendre, sqrt_mod_prime, Residue,
};
use crate::quad::{class_number, PrimeBehavior, QuadElem, QuadFieldCtx, RootSign};

fn invalid(msg: impl Into<String>) -> ReductionError {
    ReductionError::InvalidParameters(msg.into())
}

fn broken(msg: impl Into<String>) -> ReductionError {
    ReductionError::InvariantViolated(msg.into())
}

/// Checks that `p`, `l` are distinct odd primes with `l | p^2 - 1` and
/// reports which case applies.
pub fn case_of(p: &BigUint, l: &BigUint) -> Result<Case, ReductionError> {
    for (name, v) in [("p", p), ("l", l)] {
        if !is_prime(v) || v == &BigUint::from(2u8) {
            return Err(invalid(format!("{name} = {v} is not an odd prime")));
        }
    }
    if p == l {
        return Err(invalid("p and l must differ"));
    }
    if l.to_u64().is_none() {
        return Err(invalid(format!("l = {l} does not fit in 64 bits")));
    }
    if ((p + 1u8) % l).is_zero() {
        Ok(Case::A)
    } else if ((p - 1u8) % l).is_zero() {
        Ok(Case::B)
    } else {
        Err(invalid(format!("l = {l} does not divide p^2 - 1 for p = {p}")))
    }
}

/// True iff both `(x + sqrt(x^2 - c))^(l-1)` and `(x - sqrt(x^2 - c))^(l-1)`
/// differ from 1 modulo `l^2`.
pub fn lift_condition(x: &BigInt, c: i64, l: &BigUint) -> Result<bool, ReductionError> {
    let n = x * x - c;
    if legendre(&n, l) != 1 {
        return Err(ReductionError::PreconditionViolated(format!(
            "{n} is not a nonzero square modulo {l}"
        )));
    }
    let root = hensel_sqrt_lift(&n, &sqrt_mod_prime(&Residue::from_int(&n, l))?, l)?;
    let l2 = l * l;
    let xr = Residue::from_int(x, &l2);
    let e = l - 1u8;
    let plus = !(&xr + &root).pow(&e).is_one();
    let minus = !(&xr - &root).pow(&e).is_one();
    Ok(plus && minus)
}

/// Picks `x` in `{a1, a1 + p l}` satisfying [`lift_condition`], testing each
/// candidate directly. `None` only if both fail.
pub fn hensel_shift_adjust(
    a1: &BigInt,
    p: &BigUint,
    l: &BigUint,
    c: i64,
) -> Result<Option<BigInt>, ReductionError> {
    if lift_condition(a1, c, l)? {
        return Ok(Some(a1.clone()));
    }
    let shifted = a1 + BigInt::from(p * l);
    Ok(lift_condition(&shifted, c, l)?.then_some(shifted))
}

struct Found {
    k: u64,
    x: BigInt,
    draws: u64,
}

/// Draws `k` uniformly from `0..l` until `((t + k p)^2 - c / l) = 1` and the
/// adjusted `x` passes the unit test.
fn search_x(
    t: &BigInt,
    p: &BigUint,
    l: &BigUint,
    c: i64,
    budget: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Found, ReductionError> {
    let l64 = l.to_u64().expect("checked by case_of");
    let p_int = BigInt::from(p.clone());
    for draw in 1..=budget {
        let k = rng.gen_range(0..l64);
        let a1 = t + &p_int * k;
        if legendre(&(&a1 * &a1 - c), l) != 1 {
            continue;
        }
        if let Some(x) = hensel_shift_adjust(&a1, p, l, c)? {
            return Ok(Found { k, x, draws: draw });
        }
    }
    Err(ReductionError::SearchExhausted { attempts: budget })
}

fn budget(cfg: &ConstructConfig, l: &BigUint) -> u64 {
    cfg.k_budget
        .unwrap_or_else(|| 8 * l.to_u64().expect("checked by case_of"))
}

fn construct_rng(cfg: &ConstructConfig) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    rng
}

/// Lift for `l | p + 1`. `g` must generate `F_{p^2}^x`; `a` is the target.
pub fn construct_case_a(
    p: &BigUint,
    l: &BigUint,
    g: &Fp2Elem,
    a: &Fp2Elem,
    cfg: &ConstructConfig,
) -> Result<LiftInstance, ReductionError> {
    if case_of(p, l)? != Case::A {
        return Err(invalid(format!("{l} does not divide p + 1 = {}", p + 1u8)));
    }
    let fp2 = g.ctx();
    if fp2.p() != p || a.ctx() != fp2 {
        return Err(invalid("g and a must lie in the same F_{p^2}"));
    }
    if a.is_zero() {
        return Err(ReductionError::PreconditionViolated("target is zero".into()));
    }
    if !is_generator(g, &order_factorization(p))? {
        return Err(ReductionError::PreconditionViolated(format!(
            "{g} does not generate F_{{p^2}}^x"
        )));
    }
    let pm1 = p - 1u8;
    let a_t = a.pow(&pm1);
    let g_t = g.pow(&pm1);
    // b0 = 0 forces a~ = +-1, and -1 = g~^((p+1)/2) is an l-th power
    if a_t.b0().is_zero() {
        return Err(ReductionError::DegenerateTarget { m_mod_l: 0 });
    }
    if is_lth_power(&a_t, l)? {
        return Err(ReductionError::LthPower);
    }

    let a0 = a_t.a0().to_int();
    let mut rng = construct_rng(cfg);
    let mut draws = 0;
    let mut obstructed = Vec::new();
    for field in 1..=cfg.max_fields {
        let found = search_x(&a0, p, l, 1, budget(cfg, l), &mut rng)?;
        draws += found.draws;
        let d = &found.x * &found.x - 1;
        let ctx = QuadFieldCtx::new(&d, p, l)?;
        if ctx.behavior_p() != &PrimeBehavior::Inert {
            return Err(broken(format!("p is not inert in Q(sqrt({d}))")));
        }
        let plus = QuadElem::new(found.x.clone(), BigInt::one(), &d);
        let alpha = if ctx.reduce_at_inert(&plus, fp2)? == a_t {
            plus
        } else {
            plus.conj()
        };
        let report = class_number(&d, l, cfg.class_method)?;
        if report.l_divides {
            obstructed.push(report.h);
            continue;
        }
        let y = unit_y(&ctx, &alpha)?;
        let inst = LiftInstance {
            case: Case::A,
            p: p.clone(),
            l: l.clone(),
            fp2: Some(fp2.clone()),
            g_ref: RefElem::Fp2(g_t),
            a_ref: RefElem::Fp2(a_t),
            b_ref: None,
            v_roots: None,
            k: found.k,
            x: found.x,
            ctx,
            alpha,
            y,
            class_report: report,
            seed: cfg.seed,
            k_draws: draws,
            fields_tried: field,
        };
        check_invariants(&inst)?;
        return Ok(inst);
    }
    Err(ReductionError::ClassNumberObstruction {
        fields: cfg.max_fields,
        class_numbers: obstructed,
    })
}

/// Lift for `l | p - 1`. `g` must generate `F_p^x`; `a` is the target.
pub fn construct_case_b(
    p: &BigUint,
    l: &BigUint,
    g: &Residue,
    a: &Residue,
    cfg: &ConstructConfig,
) -> Result<LiftInstance, ReductionError> {
    if case_of(p, l)? != Case::B {
        return Err(invalid(format!("{l} does not divide p - 1 = {}", p - 1u8)));
    }
    if g.modulus() != p || a.modulus() != p {
        return Err(invalid("g and a must be residues modulo p"));
    }
    if a.is_zero() {
        return Err(ReductionError::PreconditionViolated("target is zero".into()));
    }
    let pm1 = p - 1u8;
    if g.is_zero() || factor_trial(&pm1).iter().any(|(q, _)| g.pow(&(&pm1 / q)).is_one()) {
        return Err(ReductionError::PreconditionViolated(format!(
            "{g} does not generate F_p^x"
        )));
    }
    // a~^2 = 1 means d = 0; -1 = g~^((p-1)/2) is an l-th power
    if (a * a).is_one() {
        return Err(ReductionError::DegenerateTarget { m_mod_l: 0 });
    }
    if a.pow(&(&pm1 / l)).is_one() {
        return Err(ReductionError::LthPower);
    }

    let b = a.inv()?;
    let half = Residue::from_u64(2, p).inv()?;
    let c = &(a + &b) * &half;
    let d = &(a - &b) * &half;
    // c = 0 means a~ has order 4, again an l-th power
    if c.is_zero() {
        return Err(ReductionError::DegenerateTarget { m_mod_l: 0 });
    }

    let d_int = d.to_int();
    let mut rng = construct_rng(cfg);
    let mut draws = 0;
    let mut obstructed = Vec::new();
    for field in 1..=cfg.max_fields {
        let found = search_x(&d_int, p, l, -1, budget(cfg, l), &mut rng)?;
        draws += found.draws;
        let radicand = &found.x * &found.x + 1;
        let ctx = QuadFieldCtx::new(&radicand, p, l)?;
        if !matches!(ctx.behavior_p(), PrimeBehavior::Split(..)) {
            return Err(broken(format!("p does not split in Q(sqrt({radicand}))")));
        }
        let alpha = QuadElem::new(found.x.clone(), BigInt::one(), &radicand);
        let report = class_number(&radicand, l, cfg.class_method)?;
        if report.l_divides {
            obstructed.push(report.h);
            continue;
        }
        let y = unit_y(&ctx, &alpha)?;
        let inst = LiftInstance {
            case: Case::B,
            p: p.clone(),
            l: l.clone(),
            fp2: None,
            g_ref: RefElem::Fp(g.clone()),
            a_ref: RefElem::Fp(a.clone()),
            b_ref: Some(b),
            v_roots: Some((c.clone(), -&c)),
            k: found.k,
            x: found.x,
            ctx,
            alpha,
            y,
            class_report: report,
            seed: cfg.seed,
            k_draws: draws,
            fields_tried: field,
        };
        check_invariants(&inst)?;
        return Ok(inst);
    }
    Err(ReductionError::ClassNumberObstruction {
        fields: cfg.max_fields,
        class_numbers: obstructed,
    })
}

/// Case B starting from `F_{p^2}`: the lift is built for `Nm(a) = Nm(g)^m`.
pub fn construct_case_b_from_fp2(
    p: &BigUint,
    l: &BigUint,
    g: &Fp2Elem,
    a: &Fp2Elem,
    cfg: &ConstructConfig,
) -> Result<LiftInstance, ReductionError> {
    if g.ctx().p() != p || a.ctx() != g.ctx() {
        return Err(invalid("g and a must lie in the same F_{p^2}"));
    }
    construct_case_b(p, l, &g.norm(), &a.norm(), cfg)
}

/// Re-checks every structural property of an instance.
pub fn check_invariants(inst: &LiftInstance) -> Result<(), ReductionError> {
    let ctx = &inst.ctx;
    let alpha = &inst.alpha;
    let l = &inst.l;
    let x2 = &inst.x * &inst.x;

    let norm = alpha.norm();
    match inst.case {
        Case::A => {
            if inst.radicand() != &(&x2 - 1) {
                return Err(broken("D != x^2 - 1"));
            }
            if !norm.is_one() {
                return Err(broken(format!("norm of alpha is {norm}, expected 1")));
            }
        }
        Case::B => {
            if inst.radicand() != &(&x2 + 1) {
                return Err(broken("D != x^2 + 1"));
            }
            if norm.magnitude() != &BigUint::one() {
                return Err(broken(format!("norm of alpha is {norm}, expected -1 or 1")));
            }
        }
    }

    for side in [RootSign::Plus, RootSign::Minus] {
        if !ctx.unit_condition(alpha, side)? {
            return Err(broken(format!("alpha^(l-1) = 1 modulo the square of the {side:?} place over l")));
        }
    }

    match (inst.case, &inst.a_ref) {
        (Case::A, RefElem::Fp2(a_t)) => {
            if ctx.behavior_p() != &PrimeBehavior::Inert {
                return Err(broken("p is not inert"));
            }
            if inst.reduce_at_v(alpha)? != inst.a_ref {
                return Err(broken("alpha does not reduce to a~ at v"));
            }
            if is_lth_power(a_t, l)? {
                return Err(broken("alpha is an l-th power at v"));
            }
        }
        (Case::B, RefElem::Fp(a_t)) => {
            let (vr, vr2) = inst.v_roots.as_ref().ok_or_else(|| broken("missing places over p"))?;
            let (s1, s2) = match ctx.behavior_p() {
                PrimeBehavior::Split(s1, s2) => (s1, s2),
                _ => return Err(broken("p does not split")),
            };
            if !((vr == s1 && vr2 == s2) || (vr == s2 && vr2 == s1)) {
                return Err(broken("places over p do not match sqrt(D) mod p"));
            }
            if &ctx.reduce_at_split(alpha, vr)? != a_t {
                return Err(broken("alpha is not a~ modulo v"));
            }
            let b = inst.b_ref.as_ref().ok_or_else(|| broken("missing b~"))?;
            if (a_t * b) != Residue::one(&inst.p) {
                return Err(broken("a~ b~ != 1"));
            }
            // alpha' = Nm(alpha) / alpha, which is -b~ for the constructed unit
            if ctx.reduce_at_split(alpha, vr2)? != b * &Residue::from_int(&norm, &inst.p) {
                return Err(broken("alpha is not Nm(alpha) b~ modulo v'"));
            }
            if a_t.pow(&((&inst.p - 1u8) / l)).is_one() {
                return Err(broken("alpha is an l-th power at v"));
            }
        }
        _ => return Err(broken("residue data does not match the case")),
    }

    if inst.class_report.l_divides {
        return Err(broken(format!("l divides h = {}", inst.class_report.h)));
    }
    let y = unit_y(ctx, alpha)?;
    if y != inst.y || y.is_zero() {
        return Err(broken("stored y does not match alpha"));
    }
    Ok(())
}
