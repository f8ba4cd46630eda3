//! Verdicts and count reports shared by every verifier.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// The count is at least the bound.
    Holds,
    /// No solutions: the bound claims nothing.
    Vacuous,
    /// `0 < count < bound`.
    Violated,
    /// The hypothesis of the statement being checked is not met.
    NotApplicable,
}

impl Verdict {
    pub fn judge(count: &BigUint, bound: &BigUint) -> Verdict {
        if count.is_zero() {
            Verdict::Vacuous
        } else if count < bound {
            Verdict::Violated
        } else {
            Verdict::Holds
        }
    }

    pub fn is_violation(self) -> bool {
        self == Verdict::Violated
    }
}

/// A closed-form value of the bound recorded alongside the general one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Specialization {
    pub name: &'static str,
    #[serde(serialize_with = "serialize_biguint")]
    pub value: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    #[serde(serialize_with = "serialize_biguint")]
    pub count: BigUint,
    #[serde(serialize_with = "serialize_biguint")]
    pub bound: BigUint,
    #[serde(serialize_with = "serialize_bigint")]
    pub degree_budget: BigInt,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub specializations: Vec<Specialization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CountReport {
    pub fn new(count: BigUint, bound: BigUint, degree_budget: BigInt) -> Self {
        let verdict = Verdict::judge(&count, &bound);
        CountReport {
            count,
            bound,
            degree_budget,
            verdict,
            specializations: Vec::new(),
            seed: None,
            witness: None,
        }
    }

    pub fn with_specialization(mut self, name: &'static str, value: BigUint) -> Self {
        self.specializations.push(Specialization { name, value });
        self
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn specialization(&self, name: &str) -> Option<&BigUint> {
        self.specializations
            .iter()
            .find(|s| s.name == name)
            .map(|s| &s.value)
    }
}

/// Integers that fit 64 bits are written as JSON numbers, larger ones as strings.
pub fn biguint_json(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

pub fn bigint_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

pub fn serialize_biguint<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    biguint_json(x).serialize(s)
}

pub fn serialize_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    bigint_json(x).serialize(s)
}
