use crate::app::{
    Command, DavenportArgs, DeltaArgs, EgzArgs, MboundArgs, Report, SeqArgs, SetSystemArgs,
    VerifyArgs, VerifyKind,
};
use crate::input::{self, usage, InputError, InputResult, RawProblem};
use crate::parse;
use num_traits::Signed;
use rvw_core::balls_bins::{greedy_distribution, min_product_detailed, BinProfile};
use rvw_core::instances::{self, CongruenceParams};
use rvw_core::ring::{FqField, PLocalRational};
use rvw_core::schanuel_brink::{build_context, delta_iterates, lift_integer_poly};
use rvw_core::warning_verify::{
    alon_furedi_report, alon_furedi_report_mod_p, brink_report, restricted_chevalley_report,
    rvw2_report_box, rvw2_report_fq, schanuel_box_expand, warning2_report,
};
use rvw_core::zerosum::{
    dags_report, davenport_constant_budgeted, egz_classic_verify, egz_report, extremal_setsystem,
    generalized_nonunique_report, generalized_report, gsum_count, ng_bound_report,
    setsystem_report, SetSystem,
};
use rvw_core::{
    CongruenceSystem, FqElem, FqSystem, GSequence, MultiPoly, RestrictedBox, Verdict, WeightBox,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub fn dispatch(cmd: &Command, seed: u64) -> InputResult<Report> {
    match cmd {
        Command::Mbound(a) => mbound(a),
        Command::Delta(a) => delta(a),
        Command::Verify(a) => verify(a, seed),
        Command::Davenport(a) => davenport(a),
        Command::Ngsum(a) => sequence_command(SeqKind::Ngsum, a, 1, seed),
        Command::Gensub(a) => sequence_command(SeqKind::Gensub, a, 1, seed),
        Command::Dags(a) => sequence_command(SeqKind::Dags, a, 1, seed),
        Command::Egz(a) => egz(a, seed),
        Command::Setsystem(a) => setsystem(a, seed),
    }
}

fn object(v: impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(v).expect("reports serialize") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "HOLDS",
        Verdict::Vacuous => "VACUOUS",
        Verdict::Violated => "VIOLATED",
        Verdict::NotApplicable => "NOT_APPLICABLE",
    }
}

fn mbound(a: &MboundArgs) -> InputResult<Report> {
    let bins = parse::parse_u64_list(&a.bins).map_err(InputError::Usage)?;
    let profile = BinProfile::new(&bins)?;
    let (m, closed_form_used) = min_product_detailed(&profile, a.balls);
    let greedy = greedy_distribution(&profile, a.balls)
        .ok()
        .map(|d| d.counts);
    let mut body = Map::new();
    body.insert("command".into(), json!("mbound"));
    body.insert("bins".into(), json!(bins));
    body.insert("balls".into(), json!(a.balls));
    body.insert("m".into(), rvw_core::report::biguint_json(&m));
    body.insert("greedy".into(), json!(greedy));
    body.insert("closed_form_used".into(), json!(closed_form_used));
    Ok(Report {
        body,
        failed: false,
        summary: format!("mbound: m = {m}"),
    })
}

fn plocal_text(f: &MultiPoly<PLocalRational>) -> String {
    parse::format_poly(f, |c| c.numer().is_negative(), |c| c.to_rational().abs())
}

fn delta(a: &DeltaArgs) -> InputResult<Report> {
    let raw = match &a.instance {
        Some(path) => RawProblem::from_file(path)?,
        None => RawProblem::from_flags(a.p, None, a.poly.as_slice(), &[], &a.boxes, None, a.nvars)?,
    };
    if raw.polys.len() != 1 {
        return usage("delta takes exactly one polynomial");
    }
    if raw.boxes.is_empty() {
        return usage("missing --box");
    }
    let f = raw.integer_polys()?.remove(0);
    let p = raw.integer_prime()?;
    let boxed = RestrictedBox::new(p, replicate(&raw.boxes, f.nvars())?)?;
    let ctx = build_context(&boxed)?;
    let ring = ctx.ring();
    let lifted = lift_integer_poly(&f, ring);
    let iterates = delta_iterates(&lifted, &ctx, a.iterations + 1)?;
    let coeff_lists = |polys: &[MultiPoly<PLocalRational>]| -> InputResult<Value> {
        let mut out = Vec::new();
        for g in polys {
            let cs = g.univariate_coeffs(ring)?;
            out.push(Value::Array(
                cs.iter().map(|c| json!(c.to_string())).collect(),
            ));
        }
        Ok(Value::Array(out))
    };
    let image = iterates.last().expect("f itself");
    let mut body = Map::new();
    body.insert("command".into(), json!("delta"));
    body.insert("p".into(), json!(p));
    body.insert("box".into(), input::integer_box_json(&boxed));
    body.insert("poly".into(), f.to_json(&rvw_core::ring::IntegerRing));
    body.insert("iterations".into(), json!(a.iterations));
    body.insert("taus".into(), coeff_lists(ctx.taus())?);
    body.insert("sigmas".into(), coeff_lists(ctx.sigmas())?);
    body.insert(
        "iterates".into(),
        Value::Array(iterates[1..].iter().map(|g| g.to_json(ring)).collect()),
    );
    body.insert("delta".into(), image.to_json(ring));
    body.insert("delta_text".into(), json!(plocal_text(image)));
    Ok(Report {
        body,
        failed: false,
        summary: format!("delta: {}", plocal_text(image)),
    })
}

fn replicate<T: Clone>(sets: &[Vec<T>], n: usize) -> InputResult<Vec<Vec<T>>> {
    match sets.len() {
        1 => Ok(vec![sets[0].clone(); n]),
        k if k == n => Ok(sets.to_vec()),
        k => usage(format!("{k} box sets given for {n} variables")),
    }
}

/// One checked instance: its JSON and whether it failed.
struct Checked {
    body: Map<String, Value>,
    failed: bool,
    verdict: String,
}

fn verify(a: &VerifyArgs, seed: u64) -> InputResult<Report> {
    let name = format!("verify {}", kind_name(a.kind));
    let problem = &a.problem;
    if let Some(count) = a.random {
        if problem.instance.is_some() || !problem.polys.is_empty() {
            return usage("--random generates its own instances; drop --poly/--instance");
        }
        let field = problem
            .field
            .as_deref()
            .map(parse::parse_field)
            .transpose()
            .map_err(InputError::Usage)?;
        let mut items = Vec::new();
        for i in 0..count {
            let s = seed.wrapping_add(i);
            let mut c = random_verify(a.kind, problem.p, field, s)?;
            c.body.insert("seed".into(), json!(s));
            items.push(c);
        }
        return Ok(batch(&name, items));
    }
    let raw = match &problem.instance {
        Some(path) => RawProblem::from_file(path)?,
        None => RawProblem::from_flags(
            problem.p,
            problem.field.as_deref(),
            &problem.polys,
            &problem.exps,
            &problem.boxes,
            problem.caps.as_deref(),
            problem.nvars,
        )?,
    };
    let c = verify_raw(a.kind, &raw)?;
    let mut body = c.body;
    body.insert("command".into(), json!(name));
    Ok(Report {
        body,
        failed: c.failed,
        summary: format!("{name}: {}", c.verdict),
    })
}

fn kind_name(k: VerifyKind) -> &'static str {
    match k {
        VerifyKind::Rvw2 => "rvw2",
        VerifyKind::Warning2 => "warning2",
        VerifyKind::Chevalley => "chevalley",
        VerifyKind::Brink => "brink",
        VerifyKind::Schanuel => "schanuel",
        VerifyKind::Alonfuredi => "alonfuredi",
    }
}

fn batch(name: &str, items: Vec<Checked>) -> Report {
    let failures = items.iter().filter(|c| c.failed).count();
    let mut tally: std::collections::BTreeMap<String, u64> = Default::default();
    for c in &items {
        *tally.entry(c.verdict.clone()).or_default() += 1;
    }
    let mut body = Map::new();
    body.insert("command".into(), json!(name));
    body.insert("random".into(), json!(items.len()));
    body.insert("failures".into(), json!(failures));
    body.insert("verdicts".into(), json!(tally));
    body.insert(
        "instances".into(),
        Value::Array(items.into_iter().map(|c| Value::Object(c.body)).collect()),
    );
    let parts: Vec<String> = tally.iter().map(|(k, v)| format!("{k} {v}")).collect();
    Report {
        body,
        failed: failures > 0,
        summary: format!("{name}: {}", parts.join(", ")),
    }
}

fn random_verify(
    kind: VerifyKind,
    p: Option<u64>,
    field: Option<(u64, u32)>,
    seed: u64,
) -> InputResult<Checked> {
    let over_field = field.is_some()
        || matches!(kind, VerifyKind::Warning2 | VerifyKind::Chevalley)
        || (kind == VerifyKind::Alonfuredi && p.is_none());
    if over_field {
        let (q_p, ell) = field.unwrap_or((p.unwrap_or(2), 1));
        let f = FqField::new(q_p, ell)?;
        let full = kind == VerifyKind::Warning2;
        let inst = instances::fq_instance(seed, &f, 3, 2, 2, 3, full)?;
        return check_field(kind, &inst.system, &inst.axes, full);
    }
    if kind == VerifyKind::Schanuel {
        return usage("verify schanuel has no random mode");
    }
    let mut params = CongruenceParams::default();
    if let Some(p) = p {
        params.primes = vec![p];
    }
    let inst = instances::congruence_instance(seed, &params)?;
    check_integer(kind, &inst.system, Some(&inst.boxed), &[])
}

fn verify_raw(kind: VerifyKind, raw: &RawProblem) -> InputResult<Checked> {
    let over_field =
        raw.field.is_some() || matches!(kind, VerifyKind::Warning2 | VerifyKind::Chevalley);
    if over_field {
        let (sys, axes, full) = raw.field_system()?;
        if kind == VerifyKind::Warning2 && !full {
            return usage("verify warning2 counts over the whole field; drop --box");
        }
        return check_field(kind, &sys, &axes, full);
    }
    let (sys, boxed) = raw.integer_system()?;
    check_integer(kind, &sys, boxed.as_ref(), &raw.caps)
}

fn count_checked(report: &rvw_core::CountReport, mut body: Map<String, Value>) -> Checked {
    body.extend(object(report));
    Checked {
        body,
        failed: report.verdict.is_violation(),
        verdict: verdict_name(report.verdict).to_string(),
    }
}

fn check_field(
    kind: VerifyKind,
    sys: &FqSystem,
    axes: &[Vec<FqElem>],
    full: bool,
) -> InputResult<Checked> {
    let mut body = input::field_system_json(sys);
    body.insert(
        "box".into(),
        if full {
            json!("full")
        } else {
            input::field_axes_json(sys.field(), axes)
        },
    );
    Ok(match kind {
        VerifyKind::Rvw2 => count_checked(&rvw2_report_fq(sys, axes)?, body),
        VerifyKind::Warning2 => {
            let r = warning2_report(sys)?;
            let v = r.verdict();
            body.extend(object(&r));
            Checked {
                body,
                failed: v.is_violation(),
                verdict: verdict_name(v).into(),
            }
        }
        VerifyKind::Chevalley => {
            let r = restricted_chevalley_report(sys, axes)?;
            let v = r.verdict();
            body.extend(object(&r));
            Checked {
                body,
                failed: v.is_violation(),
                verdict: verdict_name(v).into(),
            }
        }
        VerifyKind::Alonfuredi => {
            let [f] = sys.polys() else {
                return usage("verify alonfuredi takes exactly one polynomial");
            };
            count_checked(&alon_furedi_report(f, sys.field(), axes)?, body)
        }
        VerifyKind::Brink | VerifyKind::Schanuel => {
            return usage(format!(
                "verify {} works over the integers; use --p",
                kind_name(kind)
            ))
        }
    })
}

fn check_integer(
    kind: VerifyKind,
    sys: &CongruenceSystem,
    boxed: Option<&RestrictedBox>,
    caps: &[u64],
) -> InputResult<Checked> {
    let mut body = input::integer_system_json(sys);
    if kind == VerifyKind::Schanuel {
        if caps.is_empty() {
            return usage("verify schanuel needs --caps");
        }
        let out = schanuel_box_expand(sys, caps)?;
        let failed = out.report.violated();
        body.insert(
            "split_system".into(),
            Value::Object(input::integer_system_json(&out.system)),
        );
        body.extend(object(&out.report));
        let verdict = if failed { "VIOLATED" } else { "HOLDS" };
        return Ok(Checked {
            body,
            failed,
            verdict: verdict.into(),
        });
    }
    let Some(boxed) = boxed else {
        return usage(format!("verify {} needs --box", kind_name(kind)));
    };
    body.insert("box".into(), input::integer_box_json(boxed));
    Ok(match kind {
        VerifyKind::Rvw2 => count_checked(&rvw2_report_box(sys, boxed)?, body),
        VerifyKind::Brink => {
            let r = brink_report(sys, boxed)?;
            let v = r.verdict();
            body.extend(object(&r));
            Checked {
                body,
                failed: v.is_violation(),
                verdict: verdict_name(v).into(),
            }
        }
        VerifyKind::Alonfuredi => {
            let [f] = sys.polys() else {
                return usage("verify alonfuredi takes exactly one polynomial");
            };
            count_checked(&alon_furedi_report_mod_p(f, boxed)?, body)
        }
        VerifyKind::Warning2 | VerifyKind::Chevalley | VerifyKind::Schanuel => {
            unreachable!("routed elsewhere")
        }
    })
}

fn davenport(a: &DavenportArgs) -> InputResult<Report> {
    let group = input::group_from_flag(&a.group)?;
    let r = davenport_constant_budgeted(&group, a.max_nodes)?;
    let mut body = Map::new();
    body.insert("command".into(), json!("davenport"));
    body.insert("group".into(), input::group_json(&group));
    body.insert("D".into(), json!(r.davenport));
    body.insert("d".into(), json!(r.lower));
    body.insert(
        "witness".into(),
        Value::Array(r.witness.iter().map(|&c| group.element_json(c)).collect()),
    );
    body.insert("nodes".into(), json!(r.nodes));
    let failed = r.davenport != r.lower;
    Ok(Report {
        body,
        failed,
        summary: format!("davenport: D = {}, d = {}", r.davenport, r.lower),
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SeqKind {
    Ngsum,
    Gensub,
    Dags,
    Egz,
}

impl SeqKind {
    fn name(self) -> &'static str {
        match self {
            SeqKind::Ngsum => "ngsum",
            SeqKind::Gensub => "gensub",
            SeqKind::Dags => "dags",
            SeqKind::Egz => "egz",
        }
    }
}

fn sequence_command(kind: SeqKind, a: &SeqArgs, k: u32, seed: u64) -> InputResult<Report> {
    if let Some(count) = a.random {
        if a.group.is_some() || a.seq.is_some() {
            return usage("--random generates its own instances; drop --group/--seq");
        }
        let mut items = Vec::new();
        for i in 0..count {
            let s = seed.wrapping_add(i);
            let inst = instances::weighted_instance(s, 27, 6, 3, kind == SeqKind::Dags)?;
            let weights = inst.weights.inner().clone();
            let k = k.min(*inst.sequence.group().exps().last().expect("nonempty group"));
            let mut c = check_sequence(kind, &inst.sequence, Some(&weights), inst.target, k)?;
            c.body.insert("seed".into(), json!(s));
            items.push(c);
        }
        return Ok(batch(kind.name(), items));
    }
    let (Some(group), Some(seq)) = (&a.group, &a.seq) else {
        return usage(format!(
            "{} needs --group and --seq (or --random)",
            kind.name()
        ));
    };
    let group = input::group_from_flag(group)?;
    let x = input::sequence_from_flag(&group, seq)?;
    let target = input::element_from_flag(&group, a.target.as_deref())?;
    let weights = match kind {
        SeqKind::Ngsum => None,
        _ => Some(input::weights_from_flags(group.prime(), &a.boxes, x.len())?),
    };
    let c = check_sequence(kind, &x, weights.as_ref(), target, k)?;
    let mut body = c.body;
    body.insert("command".into(), json!(kind.name()));
    Ok(Report {
        body,
        failed: c.failed,
        summary: format!("{}: {}", kind.name(), c.verdict),
    })
}

fn check_sequence(
    kind: SeqKind,
    x: &GSequence,
    weights: Option<&RestrictedBox>,
    target: u64,
    k: u32,
) -> InputResult<Checked> {
    let group = x.group();
    let mut body = Map::new();
    body.insert("group".into(), input::group_json(group));
    body.insert("seq".into(), input::sequence_json(x));
    if kind != SeqKind::Dags {
        body.insert("target".into(), group.element_json(target));
    }
    if let Some(w) = weights {
        body.insert("box".into(), input::integer_box_json(w));
    }
    let weights = || weights.expect("weighted commands carry a box");
    match kind {
        SeqKind::Ngsum => {
            let r = ng_bound_report(x, target)?;
            body.insert("subset_count".into(), json!(gsum_count(x, target)?));
            Ok(count_checked(&r, body))
        }
        SeqKind::Gensub => {
            let r = generalized_report(x, target, weights())?;
            let nonunique = generalized_nonunique_report(x, weights())?;
            let failed = r.verdict.is_violation() || nonunique.verdict.is_violation();
            body.insert(
                "nonunique".into(),
                serde_json::to_value(&nonunique).expect("serializes"),
            );
            let mut c = count_checked(&r, body);
            c.failed = failed;
            if nonunique.verdict.is_violation() {
                c.verdict = "VIOLATED".into();
            }
            Ok(c)
        }
        SeqKind::Dags => {
            let r = dags_report(x, &WeightBox::new(weights().clone())?)?;
            let v = r.report.verdict;
            body.extend(object(&r));
            Ok(Checked {
                body,
                failed: v.is_violation(),
                verdict: verdict_name(v).into(),
            })
        }
        SeqKind::Egz => {
            let r = egz_report(x, &WeightBox::new(weights().clone())?, k, target)?;
            let v = r.report.verdict;
            let failed = v.is_violation() || !r.indicator_cross_check;
            body.extend(object(&r));
            let verdict = if r.indicator_cross_check {
                verdict_name(v)
            } else {
                "CROSS_CHECK_FAILED"
            };
            Ok(Checked {
                body,
                failed,
                verdict: verdict.into(),
            })
        }
    }
}

fn egz(a: &EgzArgs, seed: u64) -> InputResult<Report> {
    let Some(m) = a.classic else {
        return sequence_command(SeqKind::Egz, &a.seq, a.k, seed);
    };
    let r = egz_classic_verify(m)?;
    let failed = !(r.all_pass && r.extremal_has_none);
    let mut body = object(&r);
    body.insert("command".into(), json!("egz"));
    body.insert("classic".into(), json!(m));
    Ok(Report {
        body,
        failed,
        summary: format!(
            "egz classic m = {m}: {} multisets, {}",
            r.multisets_checked,
            if failed { "FAILED" } else { "all pass" }
        ),
    })
}

fn setsystem(a: &SetSystemArgs, seed: u64) -> InputResult<Report> {
    if let Some(count) = a.random {
        let mut items = Vec::new();
        for i in 0..count {
            let s = seed.wrapping_add(i);
            let f = instances::set_system(s, 10, 3, 12);
            let mut c = check_setsystem(&f, a.modulus, a.target % a.modulus.max(1))?;
            c.body.insert("seed".into(), json!(s));
            items.push(c);
        }
        return Ok(batch("setsystem", items));
    }
    let f = match (&a.sets, a.extremal) {
        (Some(s), None) => {
            SetSystem::from_lists(&parse::parse_nested_u64(s).map_err(InputError::Usage)?)
        }
        (None, Some(d)) => extremal_setsystem(d, a.modulus)?,
        _ => return usage("setsystem needs --sets, --extremal or --random"),
    };
    let c = check_setsystem(&f, a.modulus, a.target)?;
    let mut body = c.body;
    body.insert("command".into(), json!("setsystem"));
    if let Some(d) = a.extremal {
        body.insert("extremal".into(), json!(d));
    }
    Ok(Report {
        body,
        failed: c.failed,
        summary: format!("setsystem: {}", c.verdict),
    })
}

fn check_setsystem(f: &SetSystem, m: u64, g: u64) -> InputResult<Checked> {
    let mut body = Map::new();
    let sets: Vec<Vec<u64>> = f
        .sets()
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    body.insert("sets".into(), json!(sets));
    body.insert("modulus".into(), json!(m));
    body.insert("target".into(), json!(g));
    body.insert("max_degree".into(), json!(f.max_degree()));
    Ok(count_checked(&setsystem_report(f, m, g)?, body))
}
