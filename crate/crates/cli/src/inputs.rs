use std::path::Path;

use deuber_core::catalog;
use deuber_core::json::{content_hash, sha256_hex};
use deuber_core::rado::parse_matrix_text;
use deuber_core::{Coloring, Domain, IntMatrix, Pattern, Point};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use crate::record::{Failure, Session};

pub fn parse_range(text: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {text:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad bound {lo:?}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad bound {hi:?}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn int(text: &str) -> Result<BigInt, Failure> {
    text.trim()
        .parse()
        .map_err(|_| Failure::usage(format!("bad integer {text:?}")))
}

/// Points separated by `;`, coordinates by `,`. In dimension 1 a plain
/// list `2,5` or `2 5` also works.
pub fn parse_points(text: &str, d: usize) -> Result<Vec<Point>, Failure> {
    let points: Vec<Point> = if d == 1 && !text.contains(';') {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| int(t).map(|x| vec![x]))
            .collect::<Result<_, _>>()?
    } else {
        text.split(';')
            .filter(|t| !t.trim().is_empty())
            .map(|p| {
                p.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(int)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?
    };
    if points.is_empty() {
        return Err(Failure::usage("no points given"));
    }
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Failure::usage(format!("point {p:?} is not in Z^{d}")));
    }
    Ok(points)
}

/// Points of unknown dimension: taken from the first point.
pub fn parse_points_any(text: &str) -> Result<Vec<Point>, Failure> {
    let d = if text.contains(';') {
        text.split(';')
            .find(|t| !t.trim().is_empty())
            .map_or(1, |p| p.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).count())
    } else {
        1
    };
    parse_points(text, d)
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix, Failure> {
    Ok(parse_matrix_text(text)?)
}

pub fn parse_domain(text: &str) -> Result<Domain, Failure> {
    let (lo, hi): (Vec<i64>, Vec<i64>) = text
        .split(',')
        .map(|t| parse_range(t).map_err(Failure::usage))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .unzip();
    Ok(Domain::new(lo, hi)?)
}

/// 1-based index blocks `"1,2;3"`.
pub fn parse_blocks(text: &str) -> Result<Vec<Vec<usize>>, Failure> {
    text.split(';')
        .map(|b| {
            b.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| Failure::usage(format!("bad index {t:?}"))))
                .collect()
        })
        .collect()
}

/// A JSON file holding a pattern, a shape, or any artifact with a
/// `pattern` field; otherwise a catalog name.
pub fn load_pattern(session: &mut Session, name: &str, arg: &str) -> Result<Pattern, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let doc = session.read_input(name, path)?;
        let inner = doc.get("pattern").unwrap_or(&doc);
        return Ok(Pattern::from_json(inner)?);
    }
    let pattern = catalog::by_name(arg)?;
    session.input(name, format!("catalog:{arg}:{}", content_hash(&pattern.to_json())));
    Ok(pattern)
}

pub fn load_json(session: &mut Session, name: &str, path: &Path) -> Result<Value, Failure> {
    session.read_input(name, path)
}

fn coord_sum(p: &Point) -> BigInt {
    p.iter().sum()
}

/// Color of a point under a named rule; files are handled by the caller.
pub enum Rule {
    Modulus(u32),
    Random(u64),
    Constant,
}

pub fn parse_rule(text: &str) -> Option<Rule> {
    if text == "parity" {
        return Some(Rule::Modulus(2));
    }
    if text == "constant" {
        return Some(Rule::Constant);
    }
    if let Some(k) = text.strip_prefix("mod:") {
        return k.parse().ok().filter(|&k| k > 0).map(Rule::Modulus);
    }
    text.strip_prefix("random:").and_then(|s| s.parse().ok()).map(Rule::Random)
}

/// Colors of `points` (in order) under a rule.
pub fn rule_colors(rule: &Rule, points: &[Point], r: usize) -> Vec<u8> {
    match rule {
        Rule::Modulus(k) => points
            .iter()
            .map(|p| {
                let m = coord_sum(p) % BigInt::from(*k);
                let m = if m < BigInt::from(0) { m + BigInt::from(*k) } else { m };
                u8::try_from(&m).expect("small modulus")
            })
            .collect(),
        Rule::Random(seed) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            points.iter().map(|_| rng.gen_range(0..r as u8)).collect()
        }
        Rule::Constant => vec![0; points.len()],
    }
}

pub fn rule_colors_count(rule: &Rule, r: usize) -> usize {
    match rule {
        Rule::Modulus(k) => *k as usize,
        _ => r,
    }
}

/// `parity`, `mod:K`, `random:SEED`, `constant`, `rle:TEXT`, or a JSON file
/// holding a coloring or an artifact with a `coloring` field.
pub fn load_coloring(session: &mut Session, arg: &str, domain: &Domain, r: usize) -> Result<Coloring, Failure> {
    if let Some(rule) = parse_rule(arg) {
        let points: Vec<Point> = (0..domain.size()).map(|i| domain.point(i)).collect();
        let r = rule_colors_count(&rule, r);
        session.input("coloring", format!("rule:{arg}:r={r}"));
        return Ok(Coloring::new(domain.clone(), r, rule_colors(&rule, &points, r))?);
    }
    if let Some(text) = arg.strip_prefix("rle:") {
        session.input("coloring", sha256_hex(text.as_bytes()));
        return Ok(Coloring::from_rle(domain.clone(), r, text)?);
    }
    let path = Path::new(arg);
    if !path.is_file() {
        return Err(Failure::usage(format!("unknown coloring {arg:?}")));
    }
    let doc = session.read_input("coloring", path)?;
    let col = Coloring::from_json(doc.get("coloring").unwrap_or(&doc))?;
    if col.domain() != domain {
        return Err(Failure::usage("coloring file is for a different domain"));
    }
    Ok(col)
}

/// Word colors for `[k]^n`: base-36 digits or `random:SEED`.
pub fn load_word_colors(arg: &str, total: usize, r: usize) -> Result<Vec<u8>, Failure> {
    if let Some(seed) = arg.strip_prefix("random:") {
        let seed: u64 = seed.parse().map_err(|_| Failure::usage("bad random seed"))?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        return Ok((0..total).map(|_| rng.gen_range(0..r as u8)).collect());
    }
    let colors: Vec<u8> = arg
        .chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| {
            c.to_digit(36)
                .map(|x| x as u8)
                .ok_or_else(|| Failure::usage(format!("bad color digit {c:?}")))
        })
        .collect::<Result<_, _>>()?;
    if colors.len() != total {
        return Err(Failure::usage(format!("expected {total} word colors, got {}", colors.len())));
    }
    Ok(colors)
}
