use std::time::{Duration, Instant};

use deuber_core::hj::{find_mono_line, hj_number, HjBudget};
use deuber_core::hypergraph::SolverBudget;
use deuber_core::ip::{finitistic_ip_vdw_probe, fs, ProbeBudget, ProbeOutcome};
use deuber_core::json;
use deuber_core::lift::{extract, verify_exhaustive, ExtractOutcome, LiftOptions, LiftPlan, NSource, Placement};
use deuber_core::rado::{
    check_columns, check_columns_general, check_columns_general_auto, deuber_reduce, EndomorphismClass,
};
use deuber_core::search::{
    find_mono, min_partition_number, verify_certificate, Claim, DomainFamily, MonoOutcome, SearchBudget,
};
use deuber_core::shape::{from_mpc, generate, join};
use deuber_core::{Certificate, IntMatrix, Point, PolyMap, Polynomial, SeedVector};
use serde_json::{json, Value};

use crate::inputs::{
    load_coloring, load_json, load_pattern, load_word_colors, parse_blocks, parse_matrix, parse_points,
    parse_points_any, parse_rule, rule_colors, rule_colors_count,
};
use crate::record::{CmdResult, Failure, Session, Status};
use crate::verify;
use crate::{CertCmd, HjCmd, IpCmd, LiftCmd, RadoCmd, SearchCmd, ShapeCmd};

fn points_json(points: &[Point]) -> Value {
    Value::Array(points.iter().map(|p| json::ints(p)).collect())
}

fn show_point(p: &Point) -> String {
    match p.as_slice() {
        [x] => x.to_string(),
        _ => format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
    }
}

fn show_points(points: &[Point]) -> String {
    points.iter().map(show_point).collect::<Vec<_>>().join(" ")
}

fn one_based(blocks: &[Vec<usize>]) -> String {
    blocks
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect::<Vec<_>>()
        .join(",")
}

fn show_matrix(a: &IntMatrix) -> String {
    let rows: Vec<String> = (0..a.rows())
        .map(|i| a.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

fn search_budget(s: &Session, strict: bool, max_n: Option<usize>) -> SearchBudget {
    let g = &s.global;
    let mut b = SearchBudget {
        seed_range: g.seed_range,
        max_seconds: g.max_seconds,
        threads: if g.canonical { 1 } else { g.threads },
        strict,
        ..SearchBudget::default()
    };
    if let Some(n) = g.max_nodes {
        b.max_nodes = n;
    }
    if let Some(n) = max_n {
        b.max_n = n;
    }
    b
}

fn solver_budget(s: &Session) -> SolverBudget {
    let g = &s.global;
    SolverBudget {
        max_nodes: g.max_nodes.unwrap_or(SolverBudget::default().max_nodes),
        deadline: g.max_seconds.map(|t| Instant::now() + Duration::from_secs_f64(t.max(0.0))),
        threads: if g.canonical { 1 } else { g.threads },
    }
}

pub fn shape(s: &mut Session, cmd: &ShapeCmd) -> CmdResult {
    match cmd {
        ShapeCmd::Gen { shape, seed } => {
            let pattern = load_pattern(s, "shape", shape)?;
            let sh = pattern.shape();
            let seed = SeedVector::new(parse_points(seed, sh.d())?)?;
            let set = generate(sh, &seed)?;
            let points = pattern.points(seed.points())?;
            s.artifact(
                "configuration.json",
                &json!({
                    "kind": "configuration",
                    "pattern": pattern.to_json(),
                    "shape-hash": pattern.content_hash(),
                    "seed": seed.to_json(),
                    "set": set.to_json(),
                    "points": points_json(&points),
                }),
            )?;
            s.say(format!("{} points: {}", points.len(), show_points(&points)));
            Ok(Status::Ok)
        }
        ShapeCmd::Mpc { m, p, c } => {
            let sh = from_mpc(*m, *p, *c)?;
            s.artifact(
                "shape.json",
                &json!({
                    "kind": "shape",
                    "construction": {"mpc": [m.to_string(), p.to_string(), c.to_string()]},
                    "shape": sh.to_json(),
                    "shape-hash": sh.content_hash(),
                }),
            )?;
            s.say(format!("({m},{p},{c}) shape: family sizes {:?}", sh.family_sizes()));
            Ok(Status::Ok)
        }
        ShapeCmd::Join { first, second } => {
            let a = load_pattern(s, "first", first)?.shape().clone();
            let b = load_pattern(s, "second", second)?.shape().clone();
            let sh = join(&a, &b)?;
            s.artifact(
                "shape.json",
                &json!({
                    "kind": "shape",
                    "construction": {"join": [a.to_json(), b.to_json()]},
                    "shape": sh.to_json(),
                    "shape-hash": sh.content_hash(),
                }),
            )?;
            s.say(format!("joined shape: m = {}, family sizes {:?}", sh.m(), sh.family_sizes()));
            Ok(Status::Ok)
        }
    }
}

pub fn rado(s: &mut Session, cmd: &RadoCmd) -> CmdResult {
    match cmd {
        RadoCmd::Check { matrix } => {
            let a = parse_matrix(matrix)?;
            s.input("matrix", json::content_hash(&json::matrix(&a)));
            let cert = check_columns(&a)?;
            if let Some(c) = &cert {
                if !c.verify(&a)? {
                    return Err(Failure::verify("columns certificate failed its own check"));
                }
            }
            s.artifact(
                "columns.json",
                &json!({
                    "kind": "columns-condition",
                    "matrix": json::matrix(&a),
                    "satisfied": cert.is_some(),
                    "certificate": cert.as_ref().map(|c| c.to_json()),
                }),
            )?;
            match cert {
                Some(c) => s.say(format!("columns condition holds; blocks {}", one_based(&c.blocks))),
                None => s.say("columns condition fails"),
            }
            Ok(Status::Ok)
        }
        RadoCmd::CheckGen { columns, c } => {
            let cols = columns.iter().map(|t| parse_matrix(t)).collect::<Result<Vec<_>, _>>()?;
            let given = c.as_deref().map(parse_matrix).transpose()?;
            let cert = match &given {
                Some(c) => check_columns_general(&cols, c)?,
                None => check_columns_general_auto(&cols)?,
            };
            let class = cert.as_ref().map(|c| EndomorphismClass::of(&c.c)).transpose()?;
            s.artifact(
                "columns-general.json",
                &json!({
                    "kind": "columns-condition-general",
                    "columns": cols.iter().map(json::matrix).collect::<Vec<_>>(),
                    "c": given.as_ref().map(json::matrix),
                    "satisfied": cert.is_some(),
                    "certificate": cert.as_ref().map(|c| c.to_json()),
                    "endomorphism": class.as_ref().map(|k| json!({
                        "central": k.central,
                        "image-index": k.image_index.as_ref().map(json::int),
                        "admissible": k.admissible(),
                    })),
                }),
            )?;
            match (&cert, &class) {
                (Some(c), Some(k)) => s.say(format!(
                    "generalized columns condition holds; blocks {}; c {} ({})",
                    one_based(&c.blocks),
                    show_matrix(&c.c),
                    if k.admissible() { "central or finite index" } else { "neither central nor finite index" }
                )),
                _ => s.say("generalized columns condition fails for the endomorphisms tried"),
            }
            Ok(Status::Ok)
        }
        RadoCmd::Reduce { matrix } => {
            let a = parse_matrix(matrix)?;
            s.input("matrix", json::content_hash(&json::matrix(&a)));
            let cert = check_columns(&a)?
                .ok_or_else(|| Failure::usage("the matrix does not satisfy the columns condition"))?;
            let red = deuber_reduce(&a, &cert)?;
            let kernel = a.mul(&red.b)?.is_zero();
            if !kernel {
                return Err(Failure::verify("A·B is not zero"));
            }
            let pattern = red.pattern()?;
            s.artifact(
                "reduction.json",
                &json!({
                    "kind": "reduction",
                    "matrix": json::matrix(&a),
                    "certificate": cert.to_json(),
                    "reduction": red.to_json(),
                    "pattern": pattern.to_json(),
                }),
            )?;
            s.say(format!("(m,p,c) = ({},{},{}); A·B = 0", red.m, red.p, red.c));
            for i in 0..red.b.rows() {
                let row: Vec<String> = red.b.row(i).iter().map(|x| x.to_string()).collect();
                s.say(format!("  x{} = [{}]·s", i + 1, row.join(" ")));
            }
            Ok(Status::Ok)
        }
    }
}

pub fn search(s: &mut Session, cmd: &SearchCmd) -> CmdResult {
    match cmd {
        SearchCmd::Mono { shape, domain, coloring, colors, strict } => {
            let pattern = load_pattern(s, "shape", shape)?;
            let domain = crate::inputs::parse_domain(domain)?;
            let col = load_coloring(s, coloring, &domain, *colors)?;
            let budget = search_budget(s, *strict, None);
            let cert = match find_mono(&pattern, &col, &budget)? {
                MonoOutcome::Found(cert) => cert,
                MonoOutcome::NoneWithinBudget => Certificate {
                    claim: Claim::BadColoring { coloring: col },
                    pattern,
                    domain,
                    seed_range: budget.seed_range,
                    strict: *strict,
                },
                MonoOutcome::Exhausted { scanned } => {
                    s.artifact(
                        "progress.json",
                        &json!({
                            "kind": "search-progress",
                            "pattern": pattern.to_json(),
                            "coloring": col.to_json(),
                            "seed-range": budget.seed_range.map(|(a, b)| [a.to_string(), b.to_string()]),
                            "strict": strict,
                            "checked": json::count(scanned.saturating_sub(1) as usize),
                        }),
                    )?;
                    s.say(format!("budget exhausted after {} seeds without a monochromatic configuration", scanned - 1));
                    return Ok(Status::BudgetExhausted);
                }
            };
            let check = verify_certificate(&cert, None)?;
            s.artifact("cert.json", &cert.to_json())?;
            if let Claim::MonoWitness { seed, color, .. } = &cert.claim {
                let pts = cert.pattern.points(seed)?;
                s.say(format!("seed {} color {color}: {}", show_points(seed), show_points(&pts)));
            } else {
                s.say("no monochromatic configuration for any seed in range");
            }
            if !check.ok {
                return Err(Failure::verify(check.reason));
            }
            Ok(Status::Ok)
        }
        SearchCmd::Number { shape, colors, family, max_n, strict } => {
            let pattern = load_pattern(s, "shape", shape)?;
            let family = DomainFamily::parse(family)?;
            let budget = search_budget(s, *strict, Some(*max_n));
            let out = min_partition_number(&pattern, *colors, family, &budget)?;
            s.artifact("cert.json", &out.certificate.to_json())?;
            match &out.certificate.claim {
                Claim::MinimalN { n, proof_mode, bad, .. } => {
                    s.say(format!("N = {n} ({}, {} solver nodes)", proof_mode.name(), out.nodes));
                    if let Some(b) = bad {
                        s.say(format!("bad coloring at N = {}: {}", n - 1, b.rle()));
                    }
                    let check = verify_certificate(&out.certificate, None)?;
                    if !check.ok {
                        return Err(Failure::verify(check.reason));
                    }
                    Ok(if out.exhausted { Status::BudgetExhausted } else { Status::Ok })
                }
                Claim::BadColoring { coloring } => {
                    s.say(format!(
                        "budget exhausted; largest box shown insufficient has {} points: {}",
                        coloring.domain().size(),
                        coloring.rle()
                    ));
                    Ok(Status::BudgetExhausted)
                }
                Claim::MonoWitness { .. } => Err(Failure::verify("unexpected claim")),
            }
        }
    }
}

pub fn hj(s: &mut Session, cmd: &HjCmd) -> CmdResult {
    match cmd {
        HjCmd::Line { k, n, coloring, colors } => {
            let total = (*k as usize)
                .checked_pow(*n as u32)
                .filter(|&t| t <= 1 << 24)
                .ok_or_else(|| Failure::usage("cube too large"))?;
            let col = load_word_colors(coloring, total, *colors)?;
            let enc: String = col.iter().map(|&c| char::from_digit(c as u32, 36).expect("base 36")).collect();
            s.input("coloring", json::sha256_hex(enc.as_bytes()));
            let line = find_mono_line(*k, *n, &col)?;
            s.artifact(
                "line.json",
                &json!({
                    "kind": "hj-line",
                    "k": json::count(*k as usize),
                    "n": json::count(*n),
                    "colors": enc,
                    "line": line.as_ref().map(|v| v.letters().iter().map(|x| x.map_or("*".to_string(), |a| a.to_string())).collect::<Vec<_>>()),
                }),
            )?;
            match line {
                Some(v) => s.say(format!("monochromatic line {v}")),
                None => s.say("no monochromatic line"),
            }
            Ok(Status::Ok)
        }
        HjCmd::Number { k, colors, max_n } => {
            let budget = HjBudget {
                max_n: *max_n,
                max_nodes: s.global.max_nodes.unwrap_or(HjBudget::default().max_nodes),
                threads: if s.global.canonical { 1 } else { s.global.threads },
            };
            let out = hj_number(*k, *colors, &budget)?;
            let mut doc = out.to_json();
            doc["kind"] = json!("hj-number");
            s.artifact("hj.json", &doc)?;
            match out.n {
                Some(n) => s.say(format!("HJ({k},{colors}) = {n}")),
                None => s.say(format!("HJ({k},{colors}) > {}", out.bad.as_ref().map_or(0, |b| b.0))),
            }
            if let Some((len, bad)) = &out.bad {
                let enc: String = bad.iter().map(|&c| char::from_digit(c as u32, 36).expect("base 36")).collect();
                s.say(format!("line-free coloring of [{k}]^{len}: {enc}"));
            }
            Ok(if out.n.is_some() { Status::Ok } else { Status::BudgetExhausted })
        }
    }
}

fn case_name(p: Placement) -> &'static str {
    match p {
        Placement::Below => "below",
        Placement::Middle => "middle",
        Placement::Above => "above",
    }
}

pub fn lift(s: &mut Session, cmd: &LiftCmd) -> CmdResult {
    match cmd {
        LiftCmd::Build { shape, colors, k, n, max_maps } => {
            let pattern = load_pattern(s, "shape", shape)?;
            let plan = deuber_core::lift(
                pattern.shape(),
                *colors,
                *k,
                &LiftOptions { n: *n, max_maps: *max_maps, ..LiftOptions::default() },
            )?;
            let mut doc = plan.to_json()?;
            doc["kind"] = json!("lift-plan");
            s.artifact("lift.json", &doc)?;
            let big = plan.big_shape()?;
            s.say(format!(
                "n = {} ({}), N = {}, M = {}, lifted family sizes {:?}",
                plan.n(),
                match plan.n_source() {
                    NSource::Override => "given",
                    NSource::HalesJewett => "Hales-Jewett",
                },
                plan.big_n(),
                plan.big_m(),
                big.family_sizes()
            ));
            Ok(Status::Ok)
        }
        LiftCmd::Verify { plan, seed, exhaustive, coloring } => {
            let doc = load_json(s, "plan", plan)?;
            let plan = LiftPlan::from_json(&doc)?;
            let t = parse_points(seed, plan.input().d())?;
            let report = run_lift_verify(&plan, &t, *exhaustive, coloring.as_deref())?;
            s.artifact("lift-verification.json", &report.doc)?;
            for l in &report.lines {
                s.say(l.clone());
            }
            Ok(if report.ok { Status::Ok } else { Status::VerificationFailed })
        }
    }
}

pub struct LiftReport {
    pub ok: bool,
    pub doc: Value,
    pub lines: Vec<String>,
}

/// Shared by `lift verify` and `cert verify`.
pub fn run_lift_verify(plan: &LiftPlan, t: &[Point], exhaustive: bool, coloring: Option<&str>) -> Result<LiftReport, Failure> {
    let plan_doc = plan.to_json()?;
    let seed = points_json(t);
    if exhaustive {
        let rep = verify_exhaustive(plan, t)?;
        let insufficient_is_error = plan.n_source() == NSource::HalesJewett;
        let ok = rep.failure.is_none() && (!insufficient_is_error || rep.n_insufficient == 0);
        let cases: Vec<&str> = rep.cases.iter().map(|&c| case_name(c)).collect();
        let mut lines = vec![format!(
            "{} colorings: {} extracted, {} with no monochromatic line, {} failed",
            rep.colorings,
            rep.successes,
            rep.n_insufficient,
            rep.colorings - rep.successes - rep.n_insufficient
        )];
        lines.push(format!("line placements used: {}", cases.join(", ")));
        if let Some((_, why)) = &rep.failure {
            lines.push(format!("failure: {why}"));
        }
        let doc = json!({
            "kind": "lift-verification",
            "mode": "exhaustive",
            "plan": plan_doc,
            "seed": seed,
            "colorings": rep.colorings.to_string(),
            "successes": rep.successes.to_string(),
            "n-insufficient": rep.n_insufficient.to_string(),
            "cases": cases,
            "failure": rep.failure.as_ref().map(|(c, why)| json!({
                "colors": c.iter().map(u8::to_string).collect::<String>(),
                "reason": why,
            })),
            "ok": ok,
        });
        return Ok(LiftReport { ok, doc, lines });
    }
    let rule_text = coloring.ok_or_else(|| Failure::usage("give --coloring or --exhaustive"))?;
    let rule = parse_rule(rule_text).ok_or_else(|| Failure::usage(format!("unknown coloring {rule_text:?}")))?;
    let big = plan.big_shape()?;
    let points = big.evaluate(t)?.points().to_vec();
    let r = rule_colors_count(&rule, plan.r());
    let colors = rule_colors(&rule, &points, r);
    let lookup = |p: &Point| points.binary_search(p).ok().map(|i| colors[i] as usize);
    let (ok, result, lines) = match extract(plan, t, &lookup) {
        Ok(ExtractOutcome::Success(ex)) => {
            let cases: Vec<&str> = ex.placements.iter().map(|&(_, c)| case_name(c)).collect();
            let line = vec![
                format!("line {} with wildcards at {:?}", ex.word, ex.a_set),
                format!("small seed {} placed on lines {:?}", show_points(&ex.seed), ex.placements.iter().map(|p| p.0).collect::<Vec<_>>()),
            ];
            (true, json!({
                "outcome": "extracted",
                "small-seed": points_json(&ex.seed),
                "wildcards": ex.a_set,
                "placements": ex.placements.iter().map(|&(l, _)| l).collect::<Vec<_>>(),
                "cases": cases,
                "line-colors": ex.line_colors,
            }), line)
        }
        Ok(ExtractOutcome::NInsufficient) => (
            plan.n_source() != NSource::HalesJewett,
            json!({"outcome": "n-insufficient"}),
            vec!["no monochromatic combinatorial line for this coloring".to_string()],
        ),
        Err(deuber_core::Error::Precondition(why)) => {
            (true, json!({"outcome": "precondition", "reason": why}), vec![format!("precondition not met: {why}")])
        }
        Err(e) => (false, json!({"outcome": "failed", "reason": e.to_string()}), vec![format!("failure: {e}")]),
    };
    let doc = json!({
        "kind": "lift-verification",
        "mode": "single",
        "plan": plan_doc,
        "seed": seed,
        "coloring": rule_text,
        "result": result,
        "ok": ok,
    });
    Ok(LiftReport { ok, doc, lines })
}

pub fn parse_maps(maps: &[String], h: usize) -> Result<Vec<PolyMap>, Failure> {
    maps.iter()
        .map(|t| Ok(PolyMap::new(h, vec![Polynomial::parse(h, t)?])?))
        .collect()
}

pub fn ip(s: &mut Session, cmd: &IpCmd) -> CmdResult {
    match cmd {
        IpCmd::Fs { generators, blocks } => {
            let ip = fs(parse_points_any(generators)?)?;
            let blocks = blocks.as_deref().map(parse_blocks).transpose()?;
            let sub = blocks.as_ref().map(|b| ip.sub_ip(b)).transpose()?;
            let mut doc = ip.to_json();
            doc["kind"] = json!("ip-fs");
            doc["blocks"] = json!(blocks.as_ref().map(|b| b.iter().map(|x| json::counts(x)).collect::<Vec<_>>()));
            doc["sub"] = sub.as_ref().map_or(Value::Null, |x| x.to_json());
            s.artifact("ip.json", &doc)?;
            s.say(format!("FS: {}", show_points(&ip.value_set())));
            if let Some(x) = sub {
                s.say(format!("sub-IP generators {}: {}", show_points(x.generators()), show_points(&x.value_set())));
            }
            Ok(Status::Ok)
        }
        IpCmd::Probe { maps, generators, colors, start, max_len } => {
            let y = fs(parse_points_any(generators)?)?;
            let family = parse_maps(maps, y.d())?;
            let budget = ProbeBudget { start: *start, max_len: *max_len, solver: solver_budget(s) };
            let out = finitistic_ip_vdw_probe(&family, &y, *colors, &budget)?;
            s.artifact(
                "probe.json",
                &json!({
                    "kind": "ip-probe",
                    "maps": family.iter().map(|f| f.coords()[0].to_string()).collect::<Vec<_>>(),
                    "generators": points_json(y.generators()),
                    "r": json::count(*colors),
                    "start": start.to_string(),
                    "max-len": json::count(*max_len),
                    "outcome": out.to_json(),
                }),
            )?;
            match &out {
                ProbeOutcome::Found { lo, hi, minimal, reverified, .. } => {
                    s.say(format!(
                        "I = [{lo},{hi}]{}{}",
                        if *minimal { ", shortest from the start" } else { "" },
                        if *reverified { ", rechecked over all colorings" } else { "" }
                    ));
                    Ok(Status::Ok)
                }
                ProbeOutcome::NoneWithinBudget { refuted, undecided } => {
                    match undecided {
                        Some(l) => s.say(format!("none within budget; length {l} undecided")),
                        None => s.say(format!("none up to length {max_len}")),
                    }
                    if let Some((l, _)) = refuted {
                        s.say(format!("longest refuted interval has length {l}"));
                    }
                    Ok(Status::BudgetExhausted)
                }
            }
        }
    }
}

pub fn cert(s: &mut Session, cmd: &CertCmd) -> CmdResult {
    let CertCmd::Verify { files } = cmd;
    let mut results = Vec::new();
    let mut all = true;
    for f in files {
        let (ok, reason, hash) = match std::fs::read(f) {
            Ok(bytes) => {
                let hash = json::sha256_hex(&bytes);
                s.input(&f.display().to_string(), hash.clone());
                let check = serde_json::from_slice::<Value>(&bytes)
                    .map_err(Failure::from)
                    .and_then(|doc| verify::verify_doc(&doc));
                match check {
                    Ok(c) => (c.ok, c.reason, Some(hash)),
                    Err(e) => (false, e.message, Some(hash)),
                }
            }
            Err(e) => (false, e.to_string(), None),
        };
        all &= ok;
        s.say(format!("{} {}: {reason}", if ok { "PASS" } else { "FAIL" }, f.display()));
        results.push(json!({"file": f.display().to_string(), "sha256": hash, "ok": ok, "reason": reason}));
    }
    s.artifact("verification.json", &json!({"kind": "verification-report", "results": results, "ok": all}))?;
    Ok(if all { Status::Ok } else { Status::VerificationFailed })
}
