use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use super::signature::{m_from_parts, unit_y};
use super::{Case, ReductionError, Signature};
use crate::modarith::Residue;
use crate::quad::{QuadElem, QuadFieldCtx};

/// Flat, exact serialization of a signed instance. Every number is a decimal
/// string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub case: Case,
    pub p: String,
    pub l: String,
    /// Non-residue defining `F_{p^2}`, case A only.
    pub t: Option<String>,
    pub k: String,
    pub x: String,
    #[serde(rename = "D")]
    pub d: String,
    pub alpha_x: String,
    pub alpha_y: String,
    pub y: String,
    pub sigma: String,
    pub h: String,
    pub seed: String,
}

fn parse<T: FromStr>(field: &str, v: &str) -> Result<T, ReductionError> {
    v.parse()
        .map_err(|_| ReductionError::InvalidParameters(format!("{field}: cannot parse {v:?}")))
}

impl InstanceRecord {
    pub fn from_signature(sig: &Signature) -> Self {
        let inst = sig.instance();
        InstanceRecord {
            case: inst.case(),
            p: inst.p().to_string(),
            l: inst.l().to_string(),
            t: inst.fp2().map(|f| f.t().to_string()),
            k: inst.k().to_string(),
            x: inst.x().to_string(),
            d: inst.radicand().to_string(),
            alpha_x: inst.alpha().x().to_string(),
            alpha_y: inst.alpha().y().to_string(),
            y: inst.y().value().to_string(),
            sigma: sig.sigma().value().to_string(),
            h: inst.class_report().h.to_string(),
            seed: inst.seed().to_string(),
        }
    }

    /// Rebuilds `y` from `(D, alpha, l)`, checks it against the stored value
    /// and returns `m = -y / sigma mod l`.
    pub fn recover(&self) -> Result<Residue, ReductionError> {
        let p: BigUint = parse("p", &self.p)?;
        let l: BigUint = parse("l", &self.l)?;
        super::case_of(&p, &l)?;
        let x: BigInt = parse("x", &self.x)?;
        let d: BigInt = parse("D", &self.d)?;
        let expected_d = match self.case {
            Case::A => &x * &x - 1,
            Case::B => &x * &x + 1,
        };
        if d != expected_d {
            return Err(ReductionError::InvariantViolated(format!(
                "D = {d} does not match x = {x} for case {}",
                self.case
            )));
        }
        let ctx = QuadFieldCtx::new(&d, &p, &l)?;
        let alpha = QuadElem::new(parse("alpha_x", &self.alpha_x)?, parse("alpha_y", &self.alpha_y)?, &d);
        if !alpha.is_unit() {
            return Err(ReductionError::InvariantViolated("alpha is not a unit".into()));
        }
        let y = unit_y(&ctx, &alpha)?;
        let stored = Residue::new(parse("y", &self.y)?, &l);
        if y != stored {
            return Err(ReductionError::InvariantViolated(format!(
                "stored y = {} but alpha gives {}",
                stored.value(),
                y.value()
            )));
        }
        let sigma = Residue::new(parse("sigma", &self.sigma)?, &l);
        m_from_parts(&y, &sigma)
    }
}
