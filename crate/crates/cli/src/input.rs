//! Building core values from command-line flags and instance files.

use crate::parse::{self, ParseOptions};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rvw_core::ring::{FqField, IntegerRing, Ring};
use rvw_core::warning_verify::{fq_point_json, integer_point_json};
use rvw_core::{
    CongruenceSystem, FqElem, FqSystem, GSequence, GroupSpec, MultiPoly, RestrictedBox,
};
use serde_json::{json, Map, Value};
use std::path::Path;

/// Everything that can go wrong before a computation starts.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] rvw_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub type InputResult<T> = std::result::Result<T, InputError>;

pub fn usage<T>(msg: impl Into<String>) -> InputResult<T> {
    Err(InputError::Usage(msg.into()))
}

/// Polynomials as they arrive: expression text or the term-list JSON format.
#[derive(Debug, Clone)]
pub enum PolySource {
    Text(String),
    Json(Value),
}

/// A polynomial problem before the coefficient domain is fixed.
#[derive(Debug, Clone, Default)]
pub struct RawProblem {
    pub prime: Option<u64>,
    pub field: Option<(u64, u32)>,
    pub polys: Vec<PolySource>,
    pub exps: Vec<u32>,
    pub boxes: Vec<Vec<BigInt>>,
    pub caps: Vec<u64>,
    pub nvars: Option<usize>,
}

impl RawProblem {
    pub fn from_flags(
        p: Option<u64>,
        field: Option<&str>,
        polys: &[String],
        exps: &[u32],
        boxes: &[String],
        caps: Option<&str>,
        nvars: Option<usize>,
    ) -> InputResult<Self> {
        let field = field
            .map(parse::parse_field)
            .transpose()
            .map_err(InputError::Usage)?;
        let boxes = boxes
            .iter()
            .map(|b| parse::parse_int_list(b))
            .collect::<Result<Vec<_>, _>>()
            .map_err(InputError::Usage)?;
        let caps = match caps {
            Some(c) => parse::parse_u64_list(c).map_err(InputError::Usage)?,
            None => Vec::new(),
        };
        Ok(RawProblem {
            prime: p,
            field,
            polys: polys.iter().cloned().map(PolySource::Text).collect(),
            exps: exps.to_vec(),
            boxes,
            caps,
            nvars,
        })
    }

    /// `{prime | field: {p, ell}, polys, exps, box, caps}`.
    pub fn from_file(path: &Path) -> InputResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| InputError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> InputResult<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| InputError::Usage("instance must be a JSON object".into()))?;
        let mut raw = RawProblem {
            prime: obj.get("prime").map(as_u64).transpose()?,
            ..Default::default()
        };
        if let Some(f) = obj.get("field") {
            let p = f.get("p").map(as_u64).transpose()?;
            let ell = f.get("ell").map(as_u64).transpose()?.unwrap_or(1);
            let p = p.ok_or_else(|| InputError::Usage("field needs p".into()))?;
            let ell = u32::try_from(ell).map_err(|_| InputError::Usage("ell too large".into()))?;
            raw.field = Some((p, ell));
        }
        for item in obj
            .get("polys")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            raw.polys.push(match item {
                Value::String(s) => PolySource::Text(s.clone()),
                other => PolySource::Json(other.clone()),
            });
        }
        for item in obj
            .get("exps")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let v = as_u64(item)?;
            raw.exps.push(
                u32::try_from(v).map_err(|_| InputError::Usage("exponent too large".into()))?,
            );
        }
        for set in obj
            .get("box")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let items = set
                .as_array()
                .ok_or_else(|| InputError::Usage(format!("box entry {set} is not a list")))?;
            raw.boxes
                .push(items.iter().map(as_int).collect::<InputResult<_>>()?);
        }
        for c in obj
            .get("caps")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            raw.caps.push(as_u64(c)?);
        }
        if let Some(n) = obj.get("nvars") {
            raw.nvars = Some(as_u64(n)? as usize);
        }
        Ok(raw)
    }

    /// Number of variables: the largest of the declared count, the box count
    /// and every variable any polynomial mentions.
    fn arity(&self, generator: bool) -> InputResult<usize> {
        let mut n = self.nvars.unwrap_or(0).max(self.boxes.len());
        for src in &self.polys {
            n = n.max(match src {
                PolySource::Text(t) => {
                    let opts = ParseOptions {
                        nvars: None,
                        generator,
                    };
                    parse::parse_with(t, opts)
                        .map_err(|e| InputError::Usage(format!("polynomial `{t}`: {e}")))?
                        .nvars
                }
                PolySource::Json(v) => json_arity(v)?,
            });
        }
        if let Some(k) = self.nvars {
            if n > k {
                return usage(format!(
                    "--nvars {k} is smaller than the {n} variables in use"
                ));
            }
        }
        Ok(n)
    }

    fn exps_or_default(&self) -> InputResult<Vec<u32>> {
        match self.exps.len() {
            0 => Ok(vec![1; self.polys.len()]),
            k if k == self.polys.len() => Ok(self.exps.clone()),
            1 => Ok(vec![self.exps[0]; self.polys.len()]),
            k => usage(format!(
                "{k} exponents given for {} polynomials",
                self.polys.len()
            )),
        }
    }

    fn replicated_boxes(&self, n: usize) -> InputResult<Vec<Vec<BigInt>>> {
        match self.boxes.len() {
            1 => Ok(vec![self.boxes[0].clone(); n]),
            k if k == n => Ok(self.boxes.clone()),
            k => usage(format!("{k} box sets given for {n} variables")),
        }
    }

    pub fn integer_prime(&self) -> InputResult<u64> {
        if self.field.is_some() {
            return usage("this command works over the integers; use --p instead of --field");
        }
        self.prime
            .ok_or_else(|| InputError::Usage("missing --p".into()))
    }

    pub fn integer_polys(&self) -> InputResult<Vec<MultiPoly<BigInt>>> {
        let n = self.arity(false)?;
        self.polys
            .iter()
            .map(|src| match src {
                PolySource::Text(t) => parse::parse_poly_in(t, n)
                    .map_err(|e| InputError::Usage(format!("polynomial `{t}`: {e}"))),
                PolySource::Json(v) => {
                    Ok(MultiPoly::from_json(&IntegerRing, json_arity(v)?, v)?.widen(n)?)
                }
            })
            .collect()
    }

    /// The congruence system and, when sets were supplied, its box.
    pub fn integer_system(&self) -> InputResult<(CongruenceSystem, Option<RestrictedBox>)> {
        let p = self.integer_prime()?;
        if self.polys.is_empty() {
            return usage("at least one --poly is required");
        }
        let polys = self.integer_polys()?;
        let n = polys[0].nvars();
        let sys = CongruenceSystem::new(p, polys, self.exps_or_default()?)?;
        let boxed = if self.boxes.is_empty() {
            None
        } else {
            Some(RestrictedBox::new(p, self.replicated_boxes(n)?)?)
        };
        Ok((sys, boxed))
    }

    pub fn field(&self) -> InputResult<FqField> {
        match (self.field, self.prime) {
            (Some((p, ell)), _) => Ok(FqField::new(p, ell)?),
            (None, Some(p)) => Ok(FqField::new(p, 1)?),
            (None, None) => usage("missing --field (or --p for a prime field)"),
        }
    }

    /// The field system and its grid; without sets the grid is all of `F_q^n`.
    pub fn field_system(&self) -> InputResult<(FqSystem, Vec<Vec<FqElem>>, bool)> {
        let field = self.field()?;
        if self.polys.is_empty() {
            return usage("at least one --poly is required");
        }
        if self.exps.iter().any(|&v| v != 1) {
            return usage("exponents other than 1 need --p over the integers");
        }
        let n = self.arity(true)?;
        let polys = self
            .polys
            .iter()
            .map(|src| field_poly(src, &field, n))
            .collect::<InputResult<Vec<_>>>()?;
        let sys = FqSystem::new(field.clone(), polys)?;
        if self.boxes.is_empty() {
            let axes = sys.full_grid();
            return Ok((sys, axes, true));
        }
        let axes = self
            .replicated_boxes(n)?
            .iter()
            .map(|set| set.iter().map(|a| field_elem(&field, a)).collect())
            .collect::<InputResult<Vec<_>>>()?;
        Ok((sys, axes, false))
    }
}

/// Integers name prime-field residues when `ell = 1` and element codes otherwise.
pub fn field_elem(field: &FqField, a: &BigInt) -> InputResult<FqElem> {
    if field.degree() == 1 {
        return Ok(field.from_int(a));
    }
    let code = a
        .to_u64()
        .ok_or_else(|| InputError::Usage(format!("field element code {a} out of range")))?;
    Ok(field.elem(code)?)
}

fn field_poly(src: &PolySource, field: &FqField, n: usize) -> InputResult<MultiPoly<FqElem>> {
    match src {
        PolySource::Json(v) => Ok(MultiPoly::from_json(field, json_arity(v)?, v)?.widen(n)?),
        PolySource::Text(t) => {
            let opts = ParseOptions {
                nvars: Some(n),
                generator: true,
            };
            let parsed = parse::parse_with(t, opts)
                .map_err(|e| InputError::Usage(format!("polynomial `{t}`: {e}")))?;
            let g = field.generator();
            let terms = parsed.poly.terms().map(|(m, c)| {
                let e = m.exponents();
                let coeff = field.mul(&field.from_int(c), &field.pow(&g, u64::from(e[n])));
                (e[..n].to_vec(), coeff)
            });
            Ok(MultiPoly::from_terms(field, n, terms.collect::<Vec<_>>())?)
        }
    }
}

fn json_arity(v: &Value) -> InputResult<usize> {
    let first = v
        .as_array()
        .and_then(|terms| terms.first())
        .and_then(|t| t.get(1))
        .and_then(Value::as_array);
    Ok(first.map_or(0, Vec::len))
}

fn as_u64(v: &Value) -> InputResult<u64> {
    v.as_u64()
        .or_else(|| v.as_str().and_then(|s| s.parse().ok()))
        .ok_or_else(|| InputError::Usage(format!("{v} is not a non-negative integer")))
}

fn as_int(v: &Value) -> InputResult<BigInt> {
    match v {
        Value::Number(n) => n.to_string().parse().ok(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
    .ok_or_else(|| InputError::Usage(format!("{v} is not an integer")))
}

pub fn integer_box_json(b: &RestrictedBox) -> Value {
    Value::Array(b.sets().iter().map(|s| integer_point_json(s)).collect())
}

pub fn field_axes_json(field: &FqField, axes: &[Vec<FqElem>]) -> Value {
    Value::Array(axes.iter().map(|a| fq_point_json(field, a)).collect())
}

pub fn integer_system_json(sys: &CongruenceSystem) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("prime".into(), json!(sys.prime()));
    m.insert(
        "polys".into(),
        Value::Array(
            sys.polys()
                .iter()
                .map(|f| f.to_json(&IntegerRing))
                .collect(),
        ),
    );
    m.insert("exps".into(), json!(sys.exps()));
    m
}

pub fn field_system_json(sys: &FqSystem) -> Map<String, Value> {
    let f = sys.field();
    let mut m = Map::new();
    m.insert(
        "field".into(),
        json!({"p": f.characteristic(), "ell": f.degree()}),
    );
    m.insert(
        "polys".into(),
        Value::Array(sys.polys().iter().map(|p| p.to_json(f)).collect()),
    );
    m
}

pub fn group_from_flag(text: &str) -> InputResult<GroupSpec> {
    let (p, exps) = parse::parse_group(text).map_err(InputError::Usage)?;
    Ok(GroupSpec::new(p, exps)?)
}

/// Cyclic groups take `1,2,3`; others take `;`-separated component lists.
pub fn sequence_from_flag(group: &GroupSpec, text: &str) -> InputResult<GSequence> {
    let comps = element_lists(group, text)?;
    Ok(GSequence::from_components(group.clone(), &comps)?)
}

pub fn element_from_flag(group: &GroupSpec, text: Option<&str>) -> InputResult<u64> {
    let Some(text) = text else { return Ok(0) };
    let comps = element_lists(group, text)?;
    match comps.as_slice() {
        [one] => Ok(group.encode(one)?),
        _ => usage(format!("`{text}` is not a single group element")),
    }
}

fn element_lists(group: &GroupSpec, text: &str) -> InputResult<Vec<Vec<u64>>> {
    if group.exps().len() == 1 {
        let flat = text.replace(';', ",");
        let items = parse::parse_u64_list(&flat).map_err(InputError::Usage)?;
        return Ok(items.into_iter().map(|a| vec![a]).collect());
    }
    parse::parse_nested_u64(text).map_err(InputError::Usage)
}

pub fn group_json(group: &GroupSpec) -> Value {
    json!({"p": group.prime(), "exps": group.exps()})
}

pub fn sequence_json(x: &GSequence) -> Value {
    let g = x.group();
    Value::Array(x.entries().iter().map(|&c| g.element_json(c)).collect())
}

/// Weight sets for a sequence of length `len`; a single set is replicated.
pub fn weights_from_flags(p: u64, boxes: &[String], len: usize) -> InputResult<RestrictedBox> {
    let sets = boxes
        .iter()
        .map(|b| parse::parse_int_list(b))
        .collect::<Result<Vec<_>, _>>()
        .map_err(InputError::Usage)?;
    let sets = match sets.len() {
        1 => vec![sets[0].clone(); len],
        k if k == len => sets,
        0 => return usage("missing --box weight sets"),
        k => {
            return usage(format!(
                "{k} weight sets given for a sequence of length {len}"
            ))
        }
    };
    Ok(RestrictedBox::new(p, sets)?)
}
