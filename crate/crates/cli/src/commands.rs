//! Command implementations. Each returns the result document and whether a
//! verification failed.

use std::collections::BTreeMap;

use cnc_core::cnc::Witness;
use cnc_core::expr::{parse_chain, parse_generators, parse_ring_expr, print_ring_expr};
use cnc_core::{
    euler_lcm, fermat_bounds, power_chain, ring_order, sample_polynomial_units, verify_cnc,
    CncChain, CncFailure, CncVerdict, Error, Ideal, Result, Ring, Verdict, WMode,
};
use serde_json::{json, Map, Value};

use crate::report::{num, opt_num, strings};

pub struct Outcome {
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub failed: bool,
}

fn ring_inputs(text: &str, cap: u64) -> Result<(Ring, Map<String, Value>)> {
    let expr = parse_ring_expr(text)?;
    let ring = expr.build(cap)?;
    let mut inputs = Map::new();
    inputs.insert("ring".into(), Value::String(print_ring_expr(&expr)));
    inputs.insert("cap".into(), Value::from(cap));
    Ok((ring, inputs))
}

/// `None` when the ring is infinite or over the cap; other errors propagate.
fn tolerant<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::InfiniteRing(_) | Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn info(text: &str, cap: u64) -> Result<Outcome> {
    let (ring, inputs) = ring_inputs(text, cap)?;
    let unit_count = tolerant(ring.unit_count())?;
    let order = match unit_count {
        Some(_) => tolerant(ring_order(&ring))?,
        None => None,
    };
    let result = json!({
        "ring": ring.to_string(),
        "cardinality": ring.cardinality().to_string(),
        "commutative": ring.is_commutative(),
        "enumerable": unit_count.is_some(),
        "unit_count": opt_num(unit_count),
        "ring_order": opt_num(order),
    });
    Ok(Outcome {
        inputs,
        result,
        failed: false,
    })
}

pub fn units(text: &str, cap: u64) -> Result<Outcome> {
    let (ring, inputs) = ring_inputs(text, cap)?;
    let units = ring.units()?;
    let mut histogram: BTreeMap<u128, u128> = BTreeMap::new();
    for u in &units {
        let o = u.mult_order()?.expect("units have an order");
        *histogram.entry(o).or_default() += 1;
    }
    let histogram: Vec<Value> = histogram
        .into_iter()
        .map(|(order, count)| json!({ "order": num(order), "count": num(count) }))
        .collect();
    let result = json!({
        "ring": ring.to_string(),
        "unit_count": units.len(),
        "ring_order": num(ring_order(&ring)?),
        "order_histogram": histogram,
        "units": strings(&units),
    });
    Ok(Outcome {
        inputs,
        result,
        failed: false,
    })
}

fn witness_value(w: &Witness) -> Value {
    let (kind, element) = match w {
        Witness::WholeRing { element } => ("whole_ring", Some(element)),
        Witness::NotContained { element } => ("not_contained", Some(element)),
        Witness::EqualIdeals => ("equal_ideals", None),
        Witness::NonZeroTerminal { element } => ("nonzero_terminal", Some(element)),
        Witness::PowerStalls { element, .. } => ("power_stalls", Some(element)),
        Witness::SmallPrime { element, .. } => ("small_prime", Some(element)),
    };
    let mut m = Map::new();
    m.insert("kind".into(), Value::String(kind.into()));
    m.insert(
        "element".into(),
        element.map_or(Value::Null, |e| Value::String(e.to_string())),
    );
    match w {
        Witness::PowerStalls { power, .. } => {
            m.insert("power".into(), Value::from(*power));
        }
        Witness::SmallPrime {
            order,
            prime,
            nilpotency_index,
            ..
        } => {
            m.insert("additive_order".into(), num(*order));
            m.insert("prime".into(), num(*prime));
            m.insert("nilpotency_index".into(), Value::from(*nilpotency_index));
        }
        _ => {}
    }
    m.insert("description".into(), Value::String(w.to_string()));
    Value::Object(m)
}

fn ideals_value(ideals: &[Ideal]) -> Value {
    Value::Array(
        ideals
            .iter()
            .map(|i| json!({ "ideal": i.to_string(), "size": i.len() }))
            .collect(),
    )
}

fn chain_value(chain: &CncChain) -> Value {
    json!({
        "verdict": "verified",
        "ideals": ideals_value(chain.ideals()),
        "nilpotency_indexes": chain.nilpotency_indexes(),
        "characteristics": chain.characteristics().iter().map(|&s| num(s)).collect::<Vec<_>>(),
        "characteristic_product": num(chain.characteristic_product()),
    })
}

fn failure_value(failure: &CncFailure, ideals: &[Ideal]) -> Result<Value> {
    Ok(json!({
        "verdict": "failed",
        "ideals": ideals_value(ideals),
        "failure": {
            "condition": failure.condition.to_string(),
            "step": failure.step,
            "witness": witness_value(&failure.witness),
            "witness_rechecked": failure.recheck(ideals)?,
        },
    }))
}

fn verdict_value(verdict: &CncVerdict, ideals: &[Ideal]) -> Result<(Value, bool)> {
    match verdict {
        CncVerdict::Verified(chain) => Ok((chain_value(chain), false)),
        CncVerdict::Failed(f) => Ok((failure_value(f, ideals)?, true)),
    }
}

pub fn cnc_verify(text: &str, chain_text: &str, cap: u64) -> Result<Outcome> {
    let (ring, mut inputs) = ring_inputs(text, cap)?;
    inputs.insert("chain".into(), Value::String(chain_text.into()));
    let ideals = parse_chain(&ring, chain_text)?;
    let verdict = verify_cnc(&ring, &ideals)?;
    let (result, failed) = verdict_value(&verdict, &ideals)?;
    Ok(Outcome {
        inputs,
        result,
        failed,
    })
}

pub fn cnc_auto(text: &str, gens_text: &str, cap: u64) -> Result<Outcome> {
    let (ring, mut inputs) = ring_inputs(text, cap)?;
    inputs.insert("generators".into(), Value::String(gens_text.into()));
    let gens = parse_generators(&ring, gens_text)?;
    let verdict = power_chain(&ring, &gens)?;
    let ideals = match &verdict {
        CncVerdict::Verified(c) => c.ideals().to_vec(),
        CncVerdict::Failed(_) => power_ideals(&ring, &gens)?,
    };
    let (result, failed) = verdict_value(&verdict, &ideals)?;
    Ok(Outcome {
        inputs,
        result,
        failed,
    })
}

/// `N, N^2, ...` down to zero, for reporting a failed power chain.
fn power_ideals(ring: &Ring, gens: &[cnc_core::RingElement]) -> Result<Vec<Ideal>> {
    let n = Ideal::generated(ring, gens)?;
    let mut ideals = vec![n.clone()];
    while !ideals.last().expect("nonempty").is_zero() {
        let next = ideals.last().expect("nonempty").product(&n)?;
        ideals.push(next);
    }
    Ok(ideals)
}

pub fn bounds(text: &str, chain_text: &str, w_mode: WMode, cap: u64) -> Result<Outcome> {
    let (ring, mut inputs) = ring_inputs(text, cap)?;
    inputs.insert("chain".into(), Value::String(chain_text.into()));
    inputs.insert("w_mode".into(), Value::String(w_mode.to_string()));
    let ideals = parse_chain(&ring, chain_text)?;
    let chain = match verify_cnc(&ring, &ideals)? {
        CncVerdict::Verified(c) => c,
        CncVerdict::Failed(f) => {
            return Ok(Outcome {
                inputs,
                result: failure_value(&f, &ideals)?,
                failed: true,
            })
        }
    };
    let report = fermat_bounds(&ring, &chain, w_mode)?;
    let mut result = match serde_json::to_value(&report).expect("serializable") {
        Value::Object(m) => m,
        _ => unreachable!("struct serializes to an object"),
    };
    result.insert("chain".into(), chain_value(&chain));
    result.insert(
        "quotient_unit_count".into(),
        num(report.quotient_unit_count),
    );
    result.insert("first_ideal_size".into(), num(report.first_ideal_size));
    result.insert(
        "ordered".into(),
        report.is_ordered().map_or(Value::Null, Value::from),
    );
    result.insert(
        "m1_divides_m2".into(),
        report.m1_divides_m2().map_or(Value::Null, Value::from),
    );
    Ok(Outcome {
        inputs,
        result: Value::Object(result),
        failed: report.any_failed(),
    })
}

pub fn euler(pairs: &[String], cap: u64) -> Result<Outcome> {
    if pairs.is_empty() || !pairs.len().is_multiple_of(2) {
        return Err(Error::PreconditionFailed(
            "euler expects ring and chain arguments in pairs".into(),
        ));
    }
    let mut inputs = Map::new();
    let mut entries = Vec::new();
    let mut listed = Vec::new();
    for pair in pairs.chunks(2) {
        let (ring, ring_in) = ring_inputs(&pair[0], cap)?;
        listed.push(json!({ "ring": ring_in["ring"], "chain": pair[1] }));
        let ideals = parse_chain(&ring, &pair[1])?;
        match verify_cnc(&ring, &ideals)? {
            CncVerdict::Verified(c) => entries.push((ring, c)),
            CncVerdict::Failed(f) => {
                inputs.insert("entries".into(), Value::Array(listed));
                let mut result = failure_value(&f, &ideals)?;
                result["ring"] = Value::String(ring.to_string());
                return Ok(Outcome {
                    inputs,
                    result,
                    failed: true,
                });
            }
        }
    }
    inputs.insert("entries".into(), Value::Array(listed));
    inputs.insert("cap".into(), Value::from(cap));
    let report = euler_lcm(&entries)?;
    Ok(Outcome {
        inputs,
        result: serde_json::to_value(&report).expect("serializable"),
        failed: report.verdict == Verdict::Failed,
    })
}

pub fn sample_poly(p: u64, k: u32, deg: usize, count: usize, seed: u64) -> Result<Outcome> {
    let mut inputs = Map::new();
    inputs.insert("p".into(), Value::from(p));
    inputs.insert("k".into(), Value::from(k));
    inputs.insert("deg".into(), Value::from(deg));
    inputs.insert("count".into(), Value::from(count));
    inputs.insert("seed".into(), Value::from(seed));
    let report = sample_polynomial_units(p, k, deg, count, seed)?;
    Ok(Outcome {
        inputs,
        failed: !report.failures.is_empty(),
        result: serde_json::to_value(&report).expect("serializable"),
    })
}
