//! Subcommand bodies. Each returns the text to print; errors carry enough
//! type information for [`exit_code`] to pick the process status.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use localview::capacity::zchain_det::{self, ZChainDet};
use localview::capacity::zchain_gauss::{self, Formulas, ZChainGauss};
use localview::capacity::{alpha, alpha_curve, outer_bound_recipe, AlphaOptions, AlphaResult, BoundKind};
use localview::coded_sets::{search_best_cs, CodedSchedule, CodedScheduleDocument, CS_SEARCH_CAP};
use localview::det_channel::verify_schedule;
use localview::scheduler::{
    conflict_graph, fractional_coloring, mis_optimality_predicate, optimize_mig, EXHAUSTIVE_CAP, XI_STATE_CAP,
};
use localview::topology::{canonical_three_user, classify, diameter, parse_network};
use localview::{Execution, Network};

use crate::{Cli, Command, ZchainArgs, ZchainModel};

/// A size cap was hit and `--approx` was not given.
#[derive(Debug)]
pub struct CapError(pub String);

impl fmt::Display for CapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rerun with --approx to allow heuristic fallbacks)", self.0)
    }
}

impl std::error::Error for CapError {}

/// Bad command-line values or input documents.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            return if e.is_io_error() { 4 } else { 1 };
        }
        if cause.downcast_ref::<CapError>().is_some() {
            return 3;
        }
        if cause.downcast_ref::<UsageError>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<localview::Error>() {
            return match e {
                localview::Error::CapExceeded { .. } => 3,
                localview::Error::NoCase(_) => 1,
                _ => 2,
            };
        }
    }
    1
}

#[derive(Debug, Serialize)]
struct RunReport {
    command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input_digest: Option<String>,
    results: Value,
    warnings: Vec<String>,
}

struct Outcome {
    digest: Option<String>,
    results: Value,
    text: String,
    warnings: Vec<String>,
}

impl Outcome {
    fn new(digest: Option<String>, results: Value, text: String) -> Self {
        Outcome { digest, results, text, warnings: Vec::new() }
    }
}

pub fn run(cli: &Cli, argv: &[String]) -> Result<String> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let out = match &cli.command {
        Command::Classify { file } => cmd_classify(file)?,
        Command::Alpha { file, hops } => cmd_alpha(cli, exec, file, *hops)?,
        Command::Schedule { file, hops, coded, out, trials, seed } => {
            cmd_schedule(cli, exec, file, *hops, *coded, out.as_deref(), *trials, *seed)?
        }
        Command::Verify { file, schedule, trials, seed } => cmd_verify(exec, file, schedule, *trials, *seed)?,
        Command::Coloring { file, kmax } => cmd_coloring(cli, file, *kmax)?,
        Command::Zchain(args) => cmd_zchain(cli, exec, args)?,
        Command::Curve { file, out } => cmd_curve(cli, exec, file, out)?,
    };
    if cli.json {
        let report = RunReport {
            command: argv.to_vec(),
            input_digest: out.digest,
            results: out.results,
            warnings: out.warnings,
        };
        Ok(serde_json::to_string_pretty(&report)? + "\n")
    } else {
        let mut text = out.text;
        for w in &out.warnings {
            text.push_str(&format!("warning: {w}\n"));
        }
        Ok(text)
    }
}

fn load(path: &Path) -> Result<(Network, String)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| UsageError(format!("{} is not UTF-8", path.display())))?;
    let net = parse_network(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok((net, digest))
}

fn one_based(users: &[usize]) -> Vec<usize> {
    users.iter().map(|u| u + 1).collect()
}

fn largest_component(net: &Network) -> usize {
    classify(net).iter().map(|c| c.users.len()).max().unwrap_or(0)
}

fn require_cap(cli: &Cli, size: usize, cap: usize, what: &str) -> Result<Option<String>> {
    if size <= cap {
        return Ok(None);
    }
    if cli.approx {
        Ok(Some(format!("{what} has size {size} above the exact cap {cap}; results use heuristic fallbacks")))
    } else {
        Err(CapError(format!("{what} has size {size}, above the exact-search cap {cap}")).into())
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_classify(file: &Path) -> Result<Outcome> {
    let (net, digest) = load(file)?;
    let comps = classify(&net);
    let mut text = String::new();
    let mut list = Vec::new();
    for c in &comps {
        text.push_str(&format!("component {:?}: {}\n", one_based(&c.users), c.class));
        list.push(json!({ "users": one_based(&c.users), "class": c.class.to_string(), "family": c.class }));
    }
    let diam = diameter(&net);
    text.push_str(&format!("diameter: {diam}\n"));
    let mut results = json!({
        "users": net.users(),
        "model": net.model().name(),
        "diameter": diam,
        "components": list,
    });
    if net.users() == 3 {
        let canon = canonical_three_user(&net)?;
        let letter = localview::topology::three_user_letter(canon.index);
        text.push_str(&format!("three-user class: ({letter})\n"));
        results["three_user"] = json!({ "letter": letter.to_string(), "canonical": canon });
    }
    Ok(Outcome::new(Some(digest), results, text))
}

fn describe(r: &AlphaResult) -> String {
    let pick = |kind: BoundKind, v: &localview::Rational| {
        let mut tags: Vec<&str> =
            r.provenance.iter().filter(|p| p.kind == kind && &p.value == v).map(|p| p.source.as_str()).collect();
        tags.sort_unstable();
        tags.dedup();
        tags.join(", ")
    };
    format!(
        "  lower {} from {}\n  upper {} from {}\n",
        r.lower,
        pick(BoundKind::Lower, &r.lower),
        r.upper,
        pick(BoundKind::Upper, &r.upper)
    )
}

fn alpha_options(exec: Execution) -> AlphaOptions {
    AlphaOptions { exec, ..AlphaOptions::default() }
}

fn cmd_alpha(cli: &Cli, exec: Execution, file: &Path, h: u32) -> Result<Outcome> {
    let (net, digest) = load(file)?;
    let cap = require_cap(cli, largest_component(&net), EXHAUSTIVE_CAP, "largest component")?;
    let r = alpha(&net, h, &alpha_options(exec))?;
    let tag = if r.exact { "exact" } else { "interval" };
    let text = format!("alpha({h}) = {r} ({tag})\n{}", describe(&r));
    let mut out = Outcome::new(Some(digest), json!({ "hops": h, "alpha": r }), text);
    out.warnings.extend(cap);
    out.warnings.extend(r.warnings.iter().cloned());
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_schedule(
    cli: &Cli,
    exec: Execution,
    file: &Path,
    h: u32,
    coded: bool,
    out_path: Option<&Path>,
    trials: usize,
    seed: u64,
) -> Result<Outcome> {
    let (net, digest) = load(file)?;
    let mut warnings = Vec::new();
    let (doc, sched, value, kind) = if coded {
        if h != 1 {
            return Err(UsageError("--coded schedules are defined for --hops 1 only".into()).into());
        }
        warnings.extend(require_cap(cli, net.users(), CS_SEARCH_CAP, "network")?);
        // Nothing above the one-hop outer bound can be feasible.
        let (ceiling, _) = outer_bound_recipe(&net, 1)?;
        let found = search_best_cs(&net.connectivity(), 4, 2, Some(&ceiling), exec)?;
        if !found.exhaustive {
            warnings.push("coded-set search was not exhaustive; the schedule is the MIG seed".into());
        }
        let doc = serde_json::to_value(found.schedule.to_document())?;
        (doc, found.schedule, found.alpha, "coded-set")
    } else {
        warnings.extend(require_cap(cli, net.users(), EXHAUSTIVE_CAP, "network")?);
        let mig = optimize_mig(&net, h, exec)?;
        if !mig.exhaustive {
            warnings.push("independent-subgraph enumeration used the greedy fallback".into());
        }
        if mig.sufficient_only {
            warnings.push("three-hop independence test is sufficient-only".into());
        }
        let plain = mig.schedule.to_document();
        // The declared value must re-derive from the slots.
        let back = plain.to_multiset(net.users()).map_err(|e| anyhow!("emitted schedule is inconsistent: {e}"))?;
        let sched = CodedSchedule::from_multiset(&back)?;
        (serde_json::to_value(&plain)?, sched, mig.value, "independent-graph")
    };
    let report = verify_schedule(&net, &sched, trials, seed, exec)?;
    if !report.all_decoded() {
        return Err(anyhow!("emitted schedule failed simulation on trials {:?}", report.failed_trials));
    }
    warnings.extend(report.unverified.iter().cloned());
    let file_text = serde_json::to_string_pretty(&doc)? + "\n";
    if let Some(p) = out_path {
        write_text(p, &file_text)?;
    }
    let mut text = format!("{kind} schedule, value {value}, t = {}\n", sched.t());
    for (l, slot) in sched.active_per_slot().iter().enumerate() {
        text.push_str(&format!("  slot {}: users {:?}\n", l + 1, one_based(slot)));
    }
    text.push_str(&format!("verified on {} gain draws (seed {}) via {}\n", report.trials, report.seed, report.method));
    let results = json!({ "hops": h, "kind": kind, "value": value, "schedule": doc, "verification": report });
    let mut out = Outcome::new(Some(digest), results, text);
    out.warnings = warnings;
    Ok(out)
}

fn cmd_verify(exec: Execution, file: &Path, schedule: &Path, trials: usize, seed: u64) -> Result<Outcome> {
    let (net, digest) = load(file)?;
    let raw = fs::read_to_string(schedule).with_context(|| format!("reading {}", schedule.display()))?;
    let doc: CodedScheduleDocument =
        serde_json::from_str(&raw).map_err(|e| UsageError(format!("parsing {}: {e}", schedule.display())))?;
    let sched = doc.to_schedule(net.users())?;
    let report = verify_schedule(&net, &sched, trials, seed, exec)?;
    let verdict = if report.all_decoded() { "all-decoded" } else { "decoding-failures" };
    let mut text = format!(
        "{verdict}: {} of {} gain draws decoded (seed {}, {}, payloads {:?})\n",
        report.trials - report.failed_trials.len(),
        report.trials,
        report.seed,
        report.method,
        report.payload_mode
    );
    if !report.failed_trials.is_empty() {
        text.push_str(&format!("failed trials: {:?}\n", report.failed_trials));
    }
    let mut out = Outcome::new(Some(digest), json!({ "verdict": verdict, "report": report }), text);
    out.warnings = report.unverified.clone();
    Ok(out)
}

fn cmd_coloring(cli: &Cli, file: &Path, kmax: u32) -> Result<Outcome> {
    let (net, digest) = load(file)?;
    let g = conflict_graph(&net);
    let states = (kmax as f64 + 1.0).powi(g.vertices() as i32);
    let mut warnings = Vec::new();
    if states > XI_STATE_CAP as f64 {
        match require_cap(cli, states as usize, XI_STATE_CAP, "k-fold chromatic table")? {
            Some(w) => warnings.push(w),
            None => unreachable!("states above cap"),
        }
    }
    let c = fractional_coloring(&g, kmax);
    let optimal = mis_optimality_predicate(&g);
    let mut text = format!("chi_f = {}\nalpha_MIS = {}\n", c.chi_f, c.alpha_mis);
    for (k, x) in c.xi.iter().enumerate() {
        text.push_str(&format!("xi_{} = {x}\n", k + 1));
    }
    if let Some(k) = c.k_star {
        text.push_str(&format!("k* = {k}\n"));
    }
    text.push_str(&format!("MIS scheduling optimal at one hop: {optimal}\n"));
    let edges: Vec<[usize; 2]> = g.edges().into_iter().map(|(a, b)| [a + 1, b + 1]).collect();
    let results = json!({ "conflict_edges": edges, "coloring": c, "mis_optimal": optimal });
    let mut out = Outcome::new(Some(digest), results, text);
    out.warnings = warnings;
    Ok(out)
}

fn parse_gains<T: std::str::FromStr>(gains: &Option<Vec<String>>) -> Result<Vec<T>> {
    let list = gains.as_ref().ok_or_else(|| UsageError("give --gains or --sweep".into()))?;
    list.iter().map(|g| g.trim().parse::<T>().map_err(|_| UsageError(format!("bad gain value {g:?}")).into())).collect()
}

fn cmd_zchain(cli: &Cli, exec: Execution, args: &ZchainArgs) -> Result<Outcome> {
    match args.model {
        ZchainModel::Det => zchain_det_cmd(exec, args),
        ZchainModel::Gauss => zchain_gauss_cmd(cli, exec, args),
    }
}

fn zchain_det_cmd(exec: Execution, args: &ZchainArgs) -> Result<Outcome> {
    if let Some(grid) = &args.sweep {
        let max: u32 =
            grid.trim().parse().map_err(|_| UsageError(format!("det sweep takes the largest gain, got {grid:?}")))?;
        if max > 16 {
            return Err(
                CapError(format!("det sweep up to gain {max} has {} instances", (max as u64 + 1).pow(5))).into()
            );
        }
        let s = zchain_det::sweep(max, exec)?;
        if let Some(p) = &args.out {
            let mut w = csv::Writer::from_path(p).with_context(|| format!("writing {}", p.display()))?;
            w.write_record([
                "n11",
                "n22",
                "n33",
                "n12",
                "n23",
                "case",
                "r1",
                "r2",
                "r3",
                "achievable_sum",
                "region_max",
                "in_region",
            ])?;
            for i in &s.instances {
                let mut row: Vec<String> = i.gains.gains().iter().map(|g| g.to_string()).collect();
                row.extend([
                    i.case.to_string(),
                    i.rates.r1.to_string(),
                    i.rates.r2.to_string(),
                    i.rates.r3.to_string(),
                    i.achievable_sum.to_string(),
                    i.region_max.to_string(),
                    i.violations.is_empty().to_string(),
                ]);
                w.write_record(&row)?;
            }
            w.flush().with_context(|| format!("writing {}", p.display()))?;
        }
        let mut by_case: BTreeMap<u8, (usize, usize)> = BTreeMap::new();
        for i in &s.instances {
            let e = by_case.entry(i.case).or_default();
            e.0 += 1;
            e.1 += usize::from(i.achievable_sum == i.region_max);
        }
        let (hit, asserted) = s.asserted_optimal();
        let violations: Vec<&zchain_det::DetInstance> = s.violating().collect();
        let mut text = format!(
            "{} instances, {} region violations, {} reach the region max ({:.2}%)\nasserted-optimal cases 1, 2, 3, 11: {hit}/{asserted}\n",
            s.total(),
            violations.len(),
            s.optimal_count(),
            100.0 * s.optimal_count() as f64 / s.total() as f64
        );
        for (c, (n, opt)) in &by_case {
            text.push_str(&format!("  case {c}: {n} instances, {opt} optimal\n"));
        }
        let cases: Vec<Value> =
            by_case.iter().map(|(c, (n, o))| json!({ "case": c, "instances": n, "optimal": o })).collect();
        let results = json!({
            "instances": s.total(),
            "violations": violations,
            "optimal": s.optimal_count(),
            "asserted_optimal": { "matching": hit, "total": asserted },
            "cases": cases,
        });
        return Ok(Outcome::new(None, results, text));
    }
    let g: Vec<u32> = parse_gains(&args.gains)?;
    let z = ZChainDet::from_gains(&g).map_err(|e| UsageError(e.to_string()))?;
    let inst = zchain_det::evaluate(z)?;
    let (_, witness) = z.region_max();
    let text = format!(
        "case {}: R = ({}, {}, {}), sum {}, region max {}{}\n",
        inst.case,
        inst.rates.r1,
        inst.rates.r2,
        inst.rates.r3,
        inst.achievable_sum,
        inst.region_max,
        if inst.violations.is_empty() { String::new() } else { format!(", violates {:?}", inst.violations) }
    );
    Ok(Outcome::new(None, json!({ "instance": inst, "region_witness": witness }), text))
}

fn zchain_gauss_cmd(cli: &Cli, exec: Execution, args: &ZchainArgs) -> Result<Outcome> {
    let formulas = if cli.strict_paper { Formulas::Printed } else { Formulas::Corrected };
    if let Some(grid) = &args.sweep {
        let points: Vec<f64> = if grid.trim() == "default" {
            zchain_gauss::default_grid()
        } else {
            grid.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| UsageError(format!("bad dB value {x:?}")).into()))
                .collect::<Result<_>>()?
        };
        if points.len() > 12 {
            return Err(CapError(format!("a {}-point grid has {} instances", points.len(), points.len().pow(5))).into());
        }
        let s = zchain_gauss::sweep(&points, formulas, exec)?;
        if let Some(p) = &args.out {
            let mut w = csv::Writer::from_path(p).with_context(|| format!("writing {}", p.display()))?;
            w.write_record([
                "snr1_db",
                "snr2_db",
                "snr3_db",
                "inr2_db",
                "inr3_db",
                "regime",
                "case",
                "achievable_sum",
                "outer_sum",
                "gap",
            ])?;
            for i in &s.instances {
                let mut row: Vec<String> = i.gains_db.iter().map(|g| g.to_string()).collect();
                row.extend([
                    i.regime.to_string(),
                    i.case.to_string(),
                    i.achievable_sum.to_string(),
                    i.outer_sum.to_string(),
                    i.gap.to_string(),
                ]);
                w.write_record(&row)?;
            }
            w.flush().with_context(|| format!("writing {}", p.display()))?;
        }
        let violations: Vec<&zchain_gauss::GaussInstance> = s.violating().collect();
        let mut text = format!(
            "{} instances ({:?} formulas), gap in [{:.6}, {:.6}] bits, {} outside [0, {}]\n",
            s.instances.len(),
            formulas,
            s.min_gap(),
            s.max_gap(),
            violations.len(),
            zchain_gauss::GAP_BITS
        );
        for v in &violations {
            text.push_str(&format!("  violation {:?} dB: case {}, gap {:.6}\n", v.gains_db, v.case, v.gap));
        }
        let results = json!({
            "formulas": formulas,
            "instances": s.instances.len(),
            "min_gap": s.min_gap(),
            "max_gap": s.max_gap(),
            "violations": violations,
        });
        let mut out = Outcome::new(None, results, text);
        if !violations.is_empty() {
            out.warnings.push(format!(
                "{} instances break the {}-bit gap claim",
                violations.len(),
                zchain_gauss::GAP_BITS
            ));
        }
        return Ok(out);
    }
    let g: Vec<f64> = parse_gains(&args.gains)?;
    let z = if args.db { ZChainGauss::from_db(&g) } else { ZChainGauss::from_gains(&g) }
        .map_err(|e| UsageError(e.to_string()))?;
    let a = z.achievable(formulas);
    let mut text = format!(
        "regime {}{}, case {}: R = ({:.6}, {:.6}, {:.6}) bits\nachievable {:.6}, outer {:.6}, gap {:.6}\n",
        a.outer.regime,
        a.outer.triple.map_or(String::new(), |t| format!(" ({t} triple-sum bound)")),
        a.case,
        a.rates[0],
        a.rates[1],
        a.rates[2],
        a.sum,
        a.outer.sum,
        a.gap
    );
    if !a.gap_ok() {
        text.push_str("gap outside the claimed range\n");
    }
    Ok(Outcome::new(None, json!({ "formulas": formulas, "result": a, "gap_ok": a.gap_ok() }), text))
}

fn cmd_curve(cli: &Cli, exec: Execution, file: &Path, out_path: &Path) -> Result<Outcome> {
    let (net, digest) = load(file)?;
    let cap = require_cap(cli, largest_component(&net), EXHAUSTIVE_CAP, "largest component")?;
    let rows = alpha_curve(&net, &alpha_options(exec))?;
    let mut w = csv::Writer::from_path(out_path).with_context(|| format!("writing {}", out_path.display()))?;
    w.write_record(["h", "alpha_lower", "alpha_upper", "exact", "provenance"])?;
    let mut text = String::new();
    let mut warnings: Vec<String> = cap.into_iter().collect();
    for p in &rows {
        let r = &p.result;
        w.write_record([
            p.h.to_string(),
            r.lower.to_string(),
            r.upper.to_string(),
            r.exact.to_string(),
            r.provenance_summary(),
        ])?;
        text.push_str(&format!("h = {}: {}\n", p.h, r));
        warnings.extend(r.warnings.iter().cloned());
    }
    w.flush().with_context(|| format!("writing {}", out_path.display()))?;
    warnings.sort();
    warnings.dedup();
    let mut out = Outcome::new(Some(digest), json!({ "rows": rows, "csv": out_path.display().to_string() }), text);
    out.warnings = warnings;
    Ok(out)
}
