use std::io::Read;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use sigcalc::dlp::Oracle;
use sigcalc::modarith::{factor_trial, is_prime_u64};
use sigcalc::pipeline::{self, Branch, Status};
use sigcalc::quad::{class_number as class_number_of, fundamental_unit, ClassNumberMethod, DEFAULT_MAX_PERIOD};
use sigcalc::reduction::{
    case_of, lemma31_expected, sample_lemma32, verify_lemma31, verify_lemma32, Case,
    ConstructConfig, InstanceRecord, ReductionError,
};

use crate::output::{Outcome, Verdict};
use crate::{InstanceArgs, MethodArg, Suite};

const MAX_BITS: u32 = 28;
const MAX_LEMMA31_BOUND: u64 = 2_000;
const MAX_CLASS_BOUND: u64 = 20_000;
const MAX_SAMPLES: u64 = 100_000;
const DEFAULT_PAIRS: [(u64, u64); 8] = [
    (13, 7),
    (41, 7),
    (29, 5),
    (83, 7),
    (11, 5),
    (31, 5),
    (29, 7),
    (71, 7),
];

/// `{"command": name, ..fields}` with the command first.
fn tagged(command: &str, body: impl Serialize) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), command.into());
    match serde_json::to_value(body).expect("report serializes") {
        Value::Object(rest) => map.extend(rest),
        other => {
            map.insert("report".into(), other);
        }
    }
    Value::Object(map)
}

fn status_str(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn invalid(command: &str, message: String) -> Outcome {
    Outcome::error(command, "invalid-parameters", message, Verdict::Invalid)
}

pub fn gen_params(bits: u32, case: Case, seed: u64, budget: u64) -> Outcome {
    const CMD: &str = "gen-params";
    if !(2..=MAX_BITS).contains(&bits) {
        return invalid(CMD, format!("bits must lie in 2..={MAX_BITS}, got {bits}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (1u64 << (bits - 1), 1u64 << bits);
    for attempt in 1..=budget {
        let p = rng.gen_range(lo..hi) | 1;
        if p < 5 || !is_prime_u64(p) {
            continue;
        }
        let n = match case {
            Case::A => p + 1,
            Case::B => p - 1,
        };
        let ls: Vec<u64> = factor_trial(&BigUint::from(n))
            .into_iter()
            .map(|(q, _)| q.try_into().expect("factor of a u64"))
            .filter(|q| *q >= 5)
            .collect();
        if let Some(l) = ls.choose(&mut rng) {
            let report = json!({
                "case": case,
                "bits": bits,
                "seed": seed.to_string(),
                "p": p.to_string(),
                "l": l.to_string(),
                "attempts": attempt.to_string(),
                "status": "pass",
            });
            return Outcome::new(tagged(CMD, report), Verdict::Pass);
        }
    }
    Outcome::from_reduction(CMD, &ReductionError::SearchExhausted { attempts: budget })
}

fn validate(command: &str, args: &InstanceArgs) -> Result<ConstructConfig, Outcome> {
    let case = case_of(&args.p, &args.l).map_err(|e| Outcome::from_reduction(command, &e))?;
    if let Some(want) = args.case {
        let want = Case::from(want);
        if want != case {
            return Err(invalid(
                command,
                format!("(p, l) = ({}, {}) is case {case}, not {want}", args.p, args.l),
            ));
        }
    }
    if args.max_fields == 0 {
        return Err(invalid(command, "max-fields must be positive".into()));
    }
    Ok(ConstructConfig {
        seed: args.seed,
        k_budget: args.budget,
        max_fields: args.max_fields,
        ..ConstructConfig::default()
    })
}

fn verdict_of(status: Status) -> Verdict {
    match status {
        Status::Pass => Verdict::Pass,
        Status::Fail => Verdict::Fail,
        Status::Rejected => Verdict::Rejected,
    }
}

fn run(command: &str, args: &InstanceArgs) -> Result<pipeline::RoundtripReport, Outcome> {
    let cfg = validate(command, args)?;
    pipeline::roundtrip(&args.p, &args.l, args.m.as_ref(), &cfg, args.oracle.into())
        .map_err(|e| Outcome::from_reduction(command, &e))
}

pub fn roundtrip(args: &InstanceArgs) -> Outcome {
    match run("roundtrip", args) {
        Ok(r) => Outcome::new(tagged("roundtrip", &r), verdict_of(r.status)),
        Err(o) => o,
    }
}

pub fn signature(args: &InstanceArgs) -> Outcome {
    const CMD: &str = "signature";
    let r = match run(CMD, args) {
        Ok(r) => r,
        Err(o) => return o,
    };
    match r.lift {
        Some(trace) => Outcome::new(tagged(CMD, &trace.record), verdict_of(r.status)),
        None => {
            let message = match r.branch {
                Branch::ClassNumberObstruction => {
                    format!("l = {} divides every class number tried", r.l)
                }
                _ => format!("target needs no lift: m = 0 mod {}", r.l),
            };
            let mut o = Outcome::new(
                tagged(
                    CMD,
                    json!({
                        "status": "no-signature",
                        "branch": r.branch,
                        "m_mod_l": r.m_recovered,
                    }),
                ),
                Verdict::Rejected,
            );
            o.message = Some(message);
            o
        }
    }
}

pub fn recover(input: &Path) -> Outcome {
    const CMD: &str = "recover";
    let text = if input == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(input)
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => return invalid(CMD, format!("cannot read {}: {e}", input.display())),
    };
    let record: InstanceRecord = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return Outcome::error(CMD, "bad-record", e.to_string(), Verdict::Invalid),
    };
    match record.recover() {
        Ok(m) => Outcome::new(
            tagged(
                CMD,
                json!({
                    "case": record.case,
                    "p": record.p,
                    "l": record.l,
                    "D": record.d,
                    "y": record.y,
                    "sigma": record.sigma,
                    "m_mod_l": m.value().to_string(),
                    "status": "pass",
                }),
            ),
            Verdict::Pass,
        ),
        Err(e) => Outcome::from_reduction(CMD, &e),
    }
}

fn check_bound(command: &str, name: &str, v: u64, max: u64) -> Result<u64, Outcome> {
    if v == 0 || v > max {
        Err(invalid(command, format!("{name} must lie in 1..={max}, got {v}")))
    } else {
        Ok(v)
    }
}

pub fn verify(
    suite: Suite,
    bound: Option<u64>,
    samples: Option<u64>,
    seed: u64,
    pair: Option<(BigUint, BigUint)>,
    budget: Option<u64>,
) -> Outcome {
    const CMD: &str = "verify";
    let r = match suite {
        Suite::Lemma31 => check_bound(CMD, "bound", bound.unwrap_or(199), MAX_LEMMA31_BOUND)
            .map(suite_lemma31),
        Suite::Lemma32 => check_bound(CMD, "samples", samples.unwrap_or(500), MAX_SAMPLES)
            .map(|n| suite_lemma32(n, seed)),
        Suite::Classnumbers => check_bound(CMD, "bound", bound.unwrap_or(300), MAX_CLASS_BOUND)
            .and_then(suite_classnumbers),
        Suite::Proportionality => check_bound(CMD, "samples", samples.unwrap_or(20), MAX_SAMPLES)
            .and_then(|n| suite_proportionality(n, seed, pair, budget)),
    };
    r.unwrap_or_else(|o| o)
}

fn suite_lemma31(bound: u64) -> Outcome {
    let mut checked = 0u64;
    let mut mismatches = Vec::new();
    for l in (3..=bound).filter(|v| is_prime_u64(*v)) {
        for c in 1..l {
            checked += 1;
            let got = verify_lemma31(l, c).expect("odd prime, c a unit");
            let want = lemma31_expected(l, c);
            if got != want {
                mismatches.push(json!({ "l": l, "c": c, "got": got, "expected": want }));
            }
        }
    }
    let ok = mismatches.is_empty();
    let report = json!({
        "suite": "lemma31",
        "bound": bound,
        "pairs_checked": checked,
        "mismatches": mismatches,
        "status": status_str(ok),
    });
    Outcome::pass_if(tagged("verify", report), ok)
}

fn suite_lemma32(samples: u64, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for i in 0..samples {
        let c = if i % 2 == 0 { 1 } else { -1 };
        let s = sample_lemma32(c, &mut rng);
        let verdict = verify_lemma32(&s.l, &s.p, &s.a, c);
        if !matches!(verdict, Ok(true)) {
            failures.push(json!({
                "l": s.l.to_string(),
                "p": s.p.to_string(),
                "a": s.a.to_string(),
                "c": c,
                "error": verdict.err().map(|e| e.to_string()),
            }));
        }
    }
    let ok = failures.is_empty();
    let report = json!({
        "suite": "lemma32",
        "samples": samples,
        "seed": seed.to_string(),
        "failures": failures,
        "status": status_str(ok),
    });
    Outcome::pass_if(tagged("verify", report), ok)
}

fn suite_classnumbers(bound: u64) -> Result<Outcome, Outcome> {
    let mut checked = 0u64;
    let mut mismatches = Vec::new();
    let two = BigUint::from(2u8);
    for d in 2..=bound {
        let r = (d as f64).sqrt() as u64;
        if (r.saturating_sub(1)..=r + 1).any(|s| s * s == d) {
            continue;
        }
        checked += 1;
        let d = BigInt::from(d);
        let run = |m| {
            class_number_of(&d, &two, m)
                .map(|r| r.h)
                .map_err(|e| invalid("verify", e.to_string()))
        };
        let (forms, ideals) = (
            run(ClassNumberMethod::FormCycles)?,
            run(ClassNumberMethod::BruteForceIdeals)?,
        );
        if forms != ideals {
            mismatches.push(json!({ "d": d.to_string(), "forms": forms, "ideals": ideals }));
        }
    }
    let ok = mismatches.is_empty();
    let report = json!({
        "suite": "classnumbers",
        "bound": bound,
        "fields_checked": checked,
        "mismatches": mismatches,
        "status": status_str(ok),
    });
    Ok(Outcome::pass_if(tagged("verify", report), ok))
}

fn suite_proportionality(
    samples: u64,
    seed: u64,
    pair: Option<(BigUint, BigUint)>,
    budget: Option<u64>,
) -> Result<Outcome, Outcome> {
    let pairs: Vec<(BigUint, BigUint)> = match pair {
        Some(p) => vec![p],
        None => DEFAULT_PAIRS
            .iter()
            .map(|&(p, l)| (BigUint::from(p), BigUint::from(l)))
            .collect(),
    };
    for (p, l) in &pairs {
        case_of(p, l).map_err(|e| Outcome::from_reduction("verify", &e))?;
    }
    let mut ok = true;
    let mut rows = Vec::new();
    for (p, l) in &pairs {
        let (mut lifted, mut short_cut, mut rejected) = (0u64, 0u64, 0u64);
        let mut failures = Vec::new();
        for i in 0..samples {
            let cfg = ConstructConfig {
                seed: seed.wrapping_add(i),
                k_budget: budget,
                ..ConstructConfig::default()
            };
            match pipeline::roundtrip(p, l, None, &cfg, Oracle::PohligHellman) {
                Ok(r) => match (&r.lift, r.status) {
                    (_, Status::Rejected) => rejected += 1,
                    (Some(t), Status::Pass) if t.proportional => lifted += 1,
                    (None, Status::Pass) => short_cut += 1,
                    _ => failures.push(json!({ "seed": cfg.seed.to_string(), "m": r.m })),
                },
                Err(e) => failures.push(json!({ "seed": cfg.seed.to_string(), "error": e.code() })),
            }
        }
        ok &= failures.is_empty();
        rows.push(json!({
            "p": p.to_string(),
            "l": l.to_string(),
            "lifted": lifted,
            "short_cut": short_cut,
            "rejected": rejected,
            "failures": failures,
        }));
    }
    let report = json!({
        "suite": "proportionality",
        "samples": samples,
        "seed": seed.to_string(),
        "pairs": rows,
        "status": status_str(ok),
    });
    Ok(Outcome::pass_if(tagged("verify", report), ok))
}

pub fn class_number(d: &BigInt, method: MethodArg, l: Option<&BigUint>) -> Outcome {
    const CMD: &str = "class-number";
    if let Some(l) = l {
        if !sigcalc::modarith::is_prime(l) {
            return invalid(CMD, format!("l = {l} is not prime"));
        }
    }
    let probe = l.cloned().unwrap_or_else(|| BigUint::from(2u8));
    let methods: &[(&str, ClassNumberMethod)] = match method {
        MethodArg::Forms => &[("forms", ClassNumberMethod::FormCycles)],
        MethodArg::Ideals => &[("ideals", ClassNumberMethod::BruteForceIdeals)],
        MethodArg::Both => &[
            ("forms", ClassNumberMethod::FormCycles),
            ("ideals", ClassNumberMethod::BruteForceIdeals),
        ],
    };
    let mut results = Map::new();
    let mut hs = Vec::new();
    let mut unit_norm = None;
    let mut l_divides = None;
    for (name, m) in methods {
        match class_number_of(d, &probe, *m) {
            Ok(r) => {
                hs.push(r.h);
                unit_norm = unit_norm.or(r.unit_norm);
                l_divides = l.map(|_| r.l_divides);
                results.insert((*name).into(), json!(r.h));
            }
            Err(e) => return invalid(CMD, e.to_string()),
        }
    }
    let unit = fundamental_unit(d, DEFAULT_MAX_PERIOD).ok().map(|e| e.to_string());
    let ok = hs.windows(2).all(|w| w[0] == w[1]);
    let report = json!({
        "d": d.to_string(),
        "h": hs[0],
        "methods": results,
        "unit_norm": unit_norm,
        "fundamental_unit": unit,
        "l": l.map(|v| v.to_string()),
        "l_divides": l_divides,
        "status": status_str(ok),
    });
    Outcome::pass_if(tagged(CMD, report), ok)
}
