use deuber_core::hj::{exhaustive_line_check, find_mono_line, line_hypergraph, HjOutcome, VariableWord};
use deuber_core::hypergraph::{proper_coloring, Colorability, SolverBudget};
use deuber_core::ip::{avoids_all, finitistic_ip_vdw_probe, fs, ProbeBudget, ProbeOutcome};
use deuber_core::json::{as_array, as_str, field, parse_count, parse_int, parse_matrix};
use deuber_core::rado::{
    check_columns, check_columns_general, check_columns_general_auto, deuber_reduce,
};
use deuber_core::search::{verify_certificate, Verification};
use deuber_core::shape::{from_mpc, join};
use deuber_core::{
    Certificate, ColumnsCertificate, GenColumnsCertificate, LiftPlan, Pattern, Point, SeedVector, Shape,
};
use serde_json::Value;

use crate::commands::{parse_maps, run_lift_verify};
use crate::record::Failure;

fn pass(reason: impl Into<String>) -> Result<Verification, Failure> {
    Ok(Verification { ok: true, reason: reason.into() })
}

fn fail(reason: impl Into<String>) -> Result<Verification, Failure> {
    Ok(Verification { ok: false, reason: reason.into() })
}

fn points(v: &Value) -> Result<Vec<Point>, Failure> {
    Ok(as_array(v, "points")?
        .iter()
        .map(deuber_core::json::parse_ints)
        .collect::<Result<_, _>>()?)
}

fn colors(text: &str) -> Result<Vec<u8>, Failure> {
    text.chars()
        .map(|c| c.to_digit(36).map(|x| x as u8).ok_or_else(|| Failure::usage(format!("bad color digit {c:?}"))))
        .collect()
}

/// Re-check an artifact from its own contents, dispatching on `kind`.
pub fn verify_doc(doc: &Value) -> Result<Verification, Failure> {
    let kind = as_str(field(doc, "kind")?, "kind")?;
    match kind {
        "mono-witness" | "bad-coloring" | "minimal-N" => {
            let cert = Certificate::from_json(doc)?;
            Ok(verify_certificate(&cert, None)?)
        }
        "configuration" => configuration(doc),
        "shape" => shape(doc),
        "columns-condition" => columns(doc),
        "columns-condition-general" => columns_general(doc),
        "reduction" => reduction(doc),
        "hj-line" => hj_line(doc),
        "hj-number" => hj_number(doc),
        "lift-plan" => {
            let plan = LiftPlan::from_json(doc)?;
            pass(format!("lifted shape rebuilt from n = {}", plan.n()))
        }
        "lift-verification" => lift_verification(doc),
        "ip-fs" => ip_fs(doc),
        "ip-probe" => ip_probe(doc),
        other => Err(Failure::usage(format!("nothing to verify for kind {other:?}"))),
    }
}

fn configuration(doc: &Value) -> Result<Verification, Failure> {
    let pattern = Pattern::from_json(field(doc, "pattern")?)?;
    let seed = SeedVector::from_json(field(doc, "seed")?)?;
    let got = pattern.points(seed.points())?;
    if got != points(field(doc, "points")?)? {
        return fail("points differ from the pattern evaluated at the seed");
    }
    pass(format!("{} points regenerated", got.len()))
}

fn shape(doc: &Value) -> Result<Verification, Failure> {
    let stored = Shape::from_json(field(doc, "shape")?)?;
    let construction = field(doc, "construction")?;
    let rebuilt = if let Some(mpc) = construction.get("mpc") {
        let a = as_array(mpc, "mpc")?;
        if a.len() != 3 {
            return Err(Failure::usage("mpc needs three entries"));
        }
        let m = parse_count(&a[0])?;
        let p: i64 = parse_int(&a[1])?.try_into().map_err(|_| Failure::usage("p out of range"))?;
        let c: i64 = parse_int(&a[2])?.try_into().map_err(|_| Failure::usage("c out of range"))?;
        from_mpc(m, p, c)?
    } else if let Some(j) = construction.get("join") {
        let a = as_array(j, "join")?;
        if a.len() != 2 {
            return Err(Failure::usage("join needs two shapes"));
        }
        join(&Shape::from_json(&a[0])?, &Shape::from_json(&a[1])?)?
    } else {
        return Err(Failure::usage("unknown construction"));
    };
    if rebuilt.to_json() != stored.to_json() {
        return fail("stored shape differs from its construction");
    }
    pass("shape rebuilt from its construction")
}

fn columns(doc: &Value) -> Result<Verification, Failure> {
    let a = parse_matrix(field(doc, "matrix")?)?;
    let satisfied = field(doc, "satisfied")?.as_bool().ok_or_else(|| Failure::usage("satisfied must be a boolean"))?;
    if satisfied {
        let cert = ColumnsCertificate::from_json(field(doc, "certificate")?)?;
        return if cert.verify(&a)? { pass("partition and coefficients check") } else { fail("certificate does not check") };
    }
    match check_columns(&a)? {
        None => pass("no partition satisfies the columns condition"),
        Some(_) => fail("the matrix does satisfy the columns condition"),
    }
}

fn columns_general(doc: &Value) -> Result<Verification, Failure> {
    let cols = as_array(field(doc, "columns")?, "columns")?
        .iter()
        .map(parse_matrix)
        .collect::<Result<Vec<_>, _>>()?;
    let satisfied = field(doc, "satisfied")?.as_bool().ok_or_else(|| Failure::usage("satisfied must be a boolean"))?;
    if satisfied {
        let cert = GenColumnsCertificate::from_json(field(doc, "certificate")?)?;
        return if cert.verify(&cols)? { pass("blocks and witnesses check") } else { fail("certificate does not check") };
    }
    let found = match doc.get("c") {
        Some(c) if !c.is_null() => check_columns_general(&cols, &parse_matrix(c)?)?,
        _ => check_columns_general_auto(&cols)?,
    };
    match found {
        None => pass("no certificate for the endomorphisms tried"),
        Some(_) => fail("a certificate exists"),
    }
}

fn reduction(doc: &Value) -> Result<Verification, Failure> {
    let a = parse_matrix(field(doc, "matrix")?)?;
    let cert = ColumnsCertificate::from_json(field(doc, "certificate")?)?;
    if !cert.verify(&a)? {
        return fail("columns certificate does not check");
    }
    let red = deuber_reduce(&a, &cert)?;
    if &red.to_json() != field(doc, "reduction")? {
        return fail("stored B differs from the rebuilt reduction");
    }
    if !a.mul(&red.b)?.is_zero() {
        return fail("A·B is not zero");
    }
    if &red.pattern()?.to_json() != field(doc, "pattern")? {
        return fail("stored pattern differs");
    }
    pass(format!("A·B = 0 with (m,p,c) = ({},{},{})", red.m, red.p, red.c))
}

fn hj_line(doc: &Value) -> Result<Verification, Failure> {
    let k = parse_count(field(doc, "k")?)? as u32;
    let n = parse_count(field(doc, "n")?)?;
    let cols = colors(as_str(field(doc, "colors")?, "colors")?)?;
    match field(doc, "line")? {
        Value::Null => match find_mono_line(k, n, &cols)? {
            None => pass("no monochromatic line"),
            Some(v) => fail(format!("{v} is monochromatic")),
        },
        line => {
            let letters = as_array(line, "line")?
                .iter()
                .map(|x| match x.as_str() {
                    Some("*") => Ok(None),
                    Some(t) => t.parse().map(Some).map_err(|_| Failure::usage(format!("bad letter {t:?}"))),
                    None => Err(Failure::usage("letters are strings")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let v = VariableWord::new(k, letters)?;
            if v.len() != n || cols.len() != (k as usize).pow(n as u32) {
                return fail("line or coloring has the wrong size");
            }
            let seen: Vec<u8> = v.line(k).iter().map(|w| cols[w.index(k)]).collect();
            if seen.iter().all(|&c| c == seen[0]) {
                pass(format!("{v} has color {}", seen[0]))
            } else {
                fail(format!("{v} is not monochromatic"))
            }
        }
    }
}

fn hj_number(doc: &Value) -> Result<Verification, Failure> {
    let out = HjOutcome::from_json(doc)?;
    if let Some((len, bad)) = &out.bad {
        if find_mono_line(out.k, *len, bad)?.is_some() {
            return fail(format!("stored coloring of [{}]^{len} has a monochromatic line", out.k));
        }
        if out.n.is_some_and(|n| n != len + 1) {
            return fail("bad coloring is not one below n");
        }
    }
    let Some(n) = out.n else {
        return pass("lower bound coloring checks; n undecided");
    };
    if out.bad.is_none() && n > 1 {
        return fail("no coloring shows n - 1 is too small");
    }
    match exhaustive_line_check(out.k, n, out.r) {
        Ok((count, None)) => pass(format!("all {count} colorings of [{}]^{n} have a monochromatic line", out.k)),
        Ok((_, Some(_))) => fail(format!("a coloring of [{}]^{n} has no monochromatic line", out.k)),
        Err(_) => {
            let report = proper_coloring(&line_hypergraph(out.k, n)?, out.r, &SolverBudget::default());
            match report.outcome {
                Colorability::Uncolorable => pass(format!("solver refutes line-free colorings of [{}]^{n}", out.k)),
                Colorability::Colorable(_) => fail(format!("a coloring of [{}]^{n} has no monochromatic line", out.k)),
                Colorability::Exhausted => fail("solver budget exhausted"),
            }
        }
    }
}

fn lift_verification(doc: &Value) -> Result<Verification, Failure> {
    let plan = LiftPlan::from_json(field(doc, "plan")?)?;
    let t = points(field(doc, "seed")?)?;
    let exhaustive = as_str(field(doc, "mode")?, "mode")? == "exhaustive";
    let coloring = doc.get("coloring").and_then(Value::as_str);
    let report = run_lift_verify(&plan, &t, exhaustive, coloring)?;
    if &report.doc != doc {
        return fail("rerun differs from the stored report");
    }
    if report.ok {
        pass("extraction rerun matches")
    } else {
        fail("extraction rerun matches but reports a failure")
    }
}

fn ip_fs(doc: &Value) -> Result<Verification, Failure> {
    let ip = fs(points(field(doc, "generators")?)?)?;
    if &ip.to_json()["values"] != field(doc, "values")? {
        return fail("subset sums differ");
    }
    if let Some(blocks) = doc.get("blocks").filter(|b| !b.is_null()) {
        let blocks = as_array(blocks, "blocks")?
            .iter()
            .map(deuber_core::json::parse_counts)
            .collect::<Result<Vec<_>, _>>()?;
        if ip.sub_ip(&blocks)?.to_json() != *field(doc, "sub")? {
            return fail("sub-IP-set differs");
        }
    }
    pass(format!("{} subset sums regenerated", ip.value_set().len()))
}

fn ip_probe(doc: &Value) -> Result<Verification, Failure> {
    let y = fs(points(field(doc, "generators")?)?)?;
    let maps: Vec<String> = as_array(field(doc, "maps")?, "maps")?
        .iter()
        .map(|m| as_str(m, "map").map(str::to_string))
        .collect::<Result<_, _>>()?;
    let family = parse_maps(&maps, y.d())?;
    let r = parse_count(field(doc, "r")?)?;
    let start: i64 = parse_int(field(doc, "start")?)?.try_into().map_err(|_| Failure::usage("start out of range"))?;
    let outcome = field(doc, "outcome")?;
    if outcome["found"].as_bool() == Some(true) {
        let iv = as_array(field(outcome, "interval")?, "interval")?;
        let lo: i64 = parse_int(&iv[0])?.try_into().map_err(|_| Failure::usage("interval out of range"))?;
        let hi: i64 = parse_int(&iv[1])?.try_into().map_err(|_| Failure::usage("interval out of range"))?;
        if lo != start || hi < lo {
            return fail("interval does not start at the probe start");
        }
        let budget = ProbeBudget { start, max_len: (hi - lo + 1) as usize, ..ProbeBudget::default() };
        return match finitistic_ip_vdw_probe(&family, &y, r, &budget)? {
            ProbeOutcome::Found { hi: h, .. } if h == hi => pass(format!("[{lo},{hi}] forces a monochromatic configuration")),
            _ => fail(format!("[{lo},{hi}] is not confirmed")),
        };
    }
    match outcome.get("bad-coloring").and_then(Value::as_str) {
        Some(text) => {
            let cols = colors(text)?;
            if avoids_all(&family, &y, start, &cols)? {
                pass(format!("coloring of length {} avoids every configuration", cols.len()))
            } else {
                fail("stored coloring has a monochromatic configuration")
            }
        }
        None => pass("no interval claimed"),
    }
}
