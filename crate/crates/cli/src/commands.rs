use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use grouptest::group::{parse_group_spec, GroupSpec, Subgroup};
use grouptest::lowerbound::run_lower_bound;
use grouptest::oracle_gen::{
    dist_to_ccr, dist_to_larger_period, Instance, InstanceKind, InstanceParams, InstanceSpec, Table,
};
use grouptest::qsim::{
    fourier_sampling_distribution, fourier_sampling_distribution_general,
    fourier_sampling_distribution_pair,
};
use grouptest::rng::derive_seed;
use grouptest::testers::{
    certifies_ccr_acceptance, certifies_period_acceptance, test_common_coset_range,
    test_larger_period, test_larger_period_general, CcrParams, PeriodParams, Verdict,
};
use grouptest::verify::{verify_lemmas as run_suites, VerifyConfig};
use grouptest::{Error, Fraction};

use crate::output::{emit, Report};
use crate::{CcrArgs, GenArgs, InstanceArgs, LowerBoundArgs, PeriodArgs, VerifyArgs};

pub const SCHEMA: u64 = 1;

pub enum Status {
    Ok,
    Violation(String),
}

/// 3 for an exceeded enumeration budget, 2 for every other input problem.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidParameter(msg.into()).into()
}

fn parse_table(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<u64>()
                .map_err(|e| usage(format!("bad table entry {v:?}: {e}")))
        })
        .collect()
}

fn parse_group(text: Option<&str>) -> Result<Option<GroupSpec>> {
    Ok(text.map(parse_group_spec).transpose()?)
}

/// Loads an instance file, builds a custom table, or generates an instance
/// of the requested kind seeded by the master seed.
fn resolve_instance(
    args: &InstanceArgs,
    group: Option<GroupSpec>,
    seed: u64,
    default_kind: InstanceKind,
) -> Result<Instance> {
    if let Some(text) = &args.table {
        let g = group.ok_or_else(|| usage("--group is required with --table"))?;
        let f1 = args.table1.as_deref().map(parse_table).transpose()?;
        return Ok(Instance::custom(g, parse_table(text)?, f1)?);
    }
    if let Some(name) = &args.instance {
        if Path::new(name).is_file() {
            let text = std::fs::read_to_string(name).with_context(|| format!("reading {name}"))?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("{name}: {e}")))?;
            let inst = Instance::from_json(&value)?;
            if let Some(g) = group {
                if &g != inst.group() {
                    return Err(usage(format!(
                        "--group {g} does not match the instance group {}",
                        inst.group()
                    )));
                }
            }
            return Ok(inst);
        }
    }
    let kind = match &args.instance {
        Some(name) => name.parse()?,
        None => default_kind,
    };
    let g = group.ok_or_else(|| usage("--group is required to generate an instance"))?;
    let spec = InstanceSpec {
        group: g,
        kind,
        params: InstanceParams {
            subgroup: args.h.clone(),
            translation: args.u.clone(),
            distance: args.distance,
            values: args.values,
        },
        seed,
    };
    Ok(Instance::generate(&spec)?)
}

fn fraction_json(d: &Fraction, witness: &Subgroup, g: &GroupSpec) -> Value {
    json!({
        "exact": d.to_string(),
        "value": *d.numer() as f64 / *d.denom() as f64,
        "witness": witness.to_spec_string(g),
    })
}

/// Per-trial consistency: `N` samples and exactly `N` queries.
fn check_verdicts(verdicts: &[Verdict]) -> Option<String> {
    verdicts.iter().enumerate().find_map(|(i, v)| {
        (v.samples.len() != v.n || v.queries_used != v.n as u64).then(|| {
            format!(
                "trial {i}: N = {}, samples = {}, queries = {}",
                v.n,
                v.samples.len(),
                v.queries_used
            )
        })
    })
}

fn summary(verdicts: &[Verdict]) -> Value {
    let accepted = verdicts.iter().filter(|v| v.accepted).count();
    let trials = verdicts.len();
    let queries: u64 = verdicts.iter().map(|v| v.queries_used).sum();
    json!({
        "trials": trials,
        "accepted": accepted,
        "accept_rate": accepted as f64 / trials as f64,
        "mean_queries": queries as f64 / trials as f64,
        "N": verdicts.first().map_or(0, |v| v.n),
    })
}

fn verdict_rows(
    command: &str,
    g: &GroupSpec,
    master: u64,
    verdicts: &[Verdict],
) -> Vec<Vec<String>> {
    verdicts
        .iter()
        .enumerate()
        .map(|(i, v)| {
            vec![
                command.to_string(),
                g.to_string(),
                master.to_string(),
                i.to_string(),
                v.seed.to_string(),
                v.accepted.to_string(),
                v.n.to_string(),
                v.queries_used.to_string(),
                v.witness
                    .as_ref()
                    .map(|h| h.to_spec_string(g))
                    .unwrap_or_default(),
            ]
        })
        .collect()
}

const VERDICT_HEADER: [&str; 9] = [
    "command",
    "group",
    "master_seed",
    "trial",
    "seed",
    "accepted",
    "N",
    "queries_used",
    "witness",
];

/// Completeness is exact: a positive instance must carry a support
/// certificate and every trial must accept.
fn completeness_status(positive: bool, certified: bool, verdicts: &[Verdict]) -> Option<String> {
    if positive && !certified {
        return Some("positive instance lacks an acceptance certificate".into());
    }
    if certified && verdicts.iter().any(|v| !v.accepted) {
        return Some("certified instance was rejected".into());
    }
    None
}

fn finish(
    report: Report,
    args: &crate::OutputArgs,
    problems: [Option<String>; 2],
) -> Result<Status> {
    emit(&report, args)?;
    Ok(match problems.into_iter().flatten().next() {
        Some(msg) => Status::Violation(msg),
        None => Status::Ok,
    })
}

pub fn period(a: &PeriodArgs, general: bool) -> Result<Status> {
    let command = if general { "period-general" } else { "period" };
    let seed = a.output.seed;
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let inst = resolve_instance(
        &a.instance,
        parse_group(a.group.as_deref())?,
        seed,
        InstanceKind::Periodic,
    )?;
    let g = inst.group().clone();
    if !general && !g.is_abelian_product() {
        return Err(usage(format!(
            "{g} is not an abelian product; use period-general"
        )));
    }
    let known = match &a.k {
        Some(text) => Subgroup::parse(&g, text)?,
        None => Subgroup::trivial(&g),
    };
    let params = PeriodParams::new(a.delta, known)?;
    let f = inst.function_oracle()?;
    let distance = dist_to_larger_period(&g, f.table(), &params.known)?;
    let dist = if general {
        fourier_sampling_distribution_general(&f)?
    } else {
        fourier_sampling_distribution(&f)?
    };
    let certified = certifies_period_acceptance(&dist, &params.known)?;
    let verdicts: Vec<Verdict> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let oracle = f.clone();
            oracle.reset_counters();
            let s = derive_seed(seed, i);
            if general {
                test_larger_period_general(&oracle, &params, s)
            } else {
                test_larger_period(&oracle, &params, s)
            }
        })
        .collect::<grouptest::Result<_>>()?;
    let positive = distance
        .as_ref()
        .is_some_and(|(d, _)| *d == Fraction::from(0));
    let json = json!({
        "schema": SCHEMA,
        "command": command,
        "config": {
            "group": g.to_string(),
            "K": params.known.to_spec_string(&g),
            "delta": a.delta,
            "trials": a.trials,
            "seed": seed,
        },
        "instance": inst.to_json(),
        "distance": distance.as_ref().map(|(d, h)| fraction_json(d, h, &g)),
        "completeness_certificate": certified,
        "summary": summary(&verdicts),
        "verdicts": verdicts.iter().map(|v| v.to_json(&g)).collect::<Vec<_>>(),
    });
    let report = Report {
        json,
        header: VERDICT_HEADER.to_vec(),
        rows: verdict_rows(command, &g, seed, &verdicts),
    };
    let problems = [
        check_verdicts(&verdicts),
        completeness_status(positive, certified, &verdicts),
    ];
    finish(report, &a.output, problems)
}

pub fn ccr(a: &CcrArgs) -> Result<Status> {
    let seed = a.output.seed;
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let inst = resolve_instance(
        &a.instance,
        parse_group(a.group.as_deref())?,
        seed,
        InstanceKind::HiddenTranslation,
    )?;
    let g = inst.group().clone();
    let params = CcrParams::new(a.delta, a.k, a.t)?.with_budget(a.budget);
    let f = inst.pair_oracle()?;
    let (d, h) = dist_to_ccr(&g, f.f0(), f.f1(), a.k, a.t, a.budget)?;
    let certified = certifies_ccr_acceptance(&fourier_sampling_distribution_pair(&f)?, &params)?;
    let verdicts: Vec<Verdict> = (0..a.trials)
        .into_par_iter()
        .map(|i| {
            let oracle = f.clone();
            oracle.reset_counters();
            test_common_coset_range(&oracle, &params, derive_seed(seed, i))
        })
        .collect::<grouptest::Result<_>>()?;
    let json = json!({
        "schema": SCHEMA,
        "command": "ccr",
        "config": {
            "group": g.to_string(),
            "delta": a.delta,
            "k": a.k,
            "t": a.t,
            "budget": a.budget,
            "trials": a.trials,
            "seed": seed,
        },
        "instance": inst.to_json(),
        "distance": fraction_json(&d, &h, &g),
        "completeness_certificate": certified,
        "summary": summary(&verdicts),
        "verdicts": verdicts.iter().map(|v| v.to_json(&g)).collect::<Vec<_>>(),
    });
    let report = Report {
        json,
        header: VERDICT_HEADER.to_vec(),
        rows: verdict_rows("ccr", &g, seed, &verdicts),
    };
    let positive = d == Fraction::from(0);
    let problems = [
        check_verdicts(&verdicts),
        completeness_status(positive, certified, &verdicts),
    ];
    finish(report, &a.output, problems)
}

pub fn verify_lemmas(a: &VerifyArgs) -> Result<Status> {
    let g = parse_group_spec(&a.group)?;
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if a.values == 0 {
        return Err(usage("--values must be at least 1"));
    }
    let cfg = VerifyConfig {
        trials: a.trials,
        values: a.values,
        seed: a.output.seed,
    };
    let checks = run_suites(&g, &cfg)?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                g.to_string(),
                cfg.seed.to_string(),
                c.name.to_string(),
                c.cases.to_string(),
                format!("{:e}", c.max_deviation),
                format!("{:e}", c.tolerance),
                c.passed.to_string(),
            ]
        })
        .collect();
    let json = json!({
        "schema": SCHEMA,
        "command": "verify-lemmas",
        "config": {
            "group": g.to_string(),
            "trials": a.trials,
            "values": a.values,
            "seed": cfg.seed,
        },
        "checks": checks,
        "passed": failed.is_empty(),
    });
    let report = Report {
        json,
        header: vec![
            "group",
            "master_seed",
            "check",
            "cases",
            "max_deviation",
            "tolerance",
            "passed",
        ],
        rows,
    };
    let problem = (!failed.is_empty()).then(|| format!("failed: {}", failed.join(", ")));
    finish(report, &a.output, [problem, None])
}

pub fn lowerbound(a: &LowerBoundArgs) -> Result<Status> {
    let g = parse_group_spec(&a.group)?;
    let seed = a.output.seed;
    let reports =
        a.q.iter()
            .map(|&q| run_lower_bound(&g, q, a.trials, seed))
            .collect::<grouptest::Result<Vec<_>>>()?;
    // Larger budgets may not do reliably worse: each advantage interval must
    // reach at least the lower end of every smaller budget's interval.
    let mut problem = None;
    for (i, r) in reports.iter().enumerate() {
        for s in &reports[..i] {
            if s.q <= r.q && r.advantage_interval.hi < s.advantage_interval.lo {
                problem = Some(format!("advantage drops from q = {} to q = {}", s.q, r.q));
            }
        }
    }
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.group_order.to_string(),
                seed.to_string(),
                r.q.to_string(),
                r.trials.to_string(),
                r.p1.to_string(),
                r.p2.to_string(),
                r.advantage.to_string(),
                r.p1_interval.lo.to_string(),
                r.p1_interval.hi.to_string(),
                r.p2_interval.lo.to_string(),
                r.p2_interval.hi.to_string(),
            ]
        })
        .collect();
    let json = json!({
        "schema": SCHEMA,
        "command": "lowerbound",
        "config": {
            "group": g.to_string(),
            "q": a.q,
            "trials": a.trials,
            "seed": seed,
        },
        "reports": reports,
    });
    let report = Report {
        json,
        header: vec![
            "group_order",
            "master_seed",
            "q",
            "trials",
            "p1",
            "p2",
            "advantage",
            "p1_lo",
            "p1_hi",
            "p2_lo",
            "p2_hi",
        ],
        rows,
    };
    finish(report, &a.output, [problem, None])
}

pub fn gen_instance(a: &GenArgs) -> Result<Status> {
    let g = parse_group_spec(&a.group)?;
    let kind_given = a.instance.instance.is_some() || a.instance.table.is_some();
    if !kind_given {
        return Err(usage("--instance or --table is required"));
    }
    let inst = resolve_instance(
        &a.instance,
        Some(g.clone()),
        a.output.seed,
        InstanceKind::Periodic,
    )?;
    let mut json = inst.to_json();
    json["schema"] = json!(SCHEMA);
    let (header, rows) = match &inst.table {
        Table::Single(t) => (
            vec!["x", "f"],
            g.elements()
                .map(|x| vec![g.format_element(x), t[x.index()].to_string()])
                .collect(),
        ),
        Table::Pair { f0, f1 } => (
            vec!["x", "f0", "f1"],
            g.elements()
                .map(|x| {
                    vec![
                        g.format_element(x),
                        f0[x.index()].to_string(),
                        f1[x.index()].to_string(),
                    ]
                })
                .collect(),
        ),
    };
    finish(Report { json, header, rows }, &a.output, [None, None])
}
