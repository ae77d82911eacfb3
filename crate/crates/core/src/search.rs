//! Searching colorings for monochromatic configurations, computing the
//! least `N` for which every `r`-coloring of a box of side `N` contains one,
//! and checking the certificates these searches emit.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::hypergraph::{
    brute_force_proper_coloring, brute_force_size, proper_coloring, Colorability, Hypergraph,
    SolverBudget,
};
use crate::json;
use crate::shape::{Pattern, Point};

pub const ENGINE_VERSION: &str = concat!("deuber-core ", env!("CARGO_PKG_VERSION"));

/// Inclusive integer box `∏ [lo_q, hi_q]` in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Domain {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch("box bounds".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidParameter("empty box".into()));
        }
        let dom = Domain { lo, hi };
        dom.checked_size()
            .ok_or_else(|| Error::InvalidParameter("box too large".into()))?;
        Ok(dom)
    }

    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn cube(d: usize, lo: i64, hi: i64) -> Result<Self> {
        Self::new(vec![lo; d], vec![hi; d])
    }

    pub fn d(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    fn side(&self, q: usize) -> usize {
        (self.hi[q] - self.lo[q] + 1) as usize
    }

    fn checked_size(&self) -> Option<usize> {
        (0..self.d()).try_fold(1usize, |acc, q| {
            let side = usize::try_from(self.hi[q].checked_sub(self.lo[q])?.checked_add(1)?).ok()?;
            acc.checked_mul(side).filter(|&s| s <= 1 << 32)
        })
    }

    pub fn size(&self) -> usize {
        self.checked_size().expect("checked at construction")
    }

    /// Row-major index, first coordinate most significant.
    pub fn index(&self, p: &[BigInt]) -> Option<usize> {
        if p.len() != self.d() {
            return None;
        }
        let mut idx = 0usize;
        for (q, x) in p.iter().enumerate() {
            let x = x.to_i64()?;
            if x < self.lo[q] || x > self.hi[q] {
                return None;
            }
            idx = idx * self.side(q) + (x - self.lo[q]) as usize;
        }
        Some(idx)
    }

    pub fn point(&self, mut idx: usize) -> Point {
        let mut out = vec![BigInt::zero(); self.d()];
        for q in (0..self.d()).rev() {
            let side = self.side(q);
            out[q] = BigInt::from(self.lo[q] + (idx % side) as i64);
            idx /= side;
        }
        out
    }

    /// Largest absolute bound, the default seed scan radius.
    pub fn radius(&self) -> i64 {
        self.lo
            .iter()
            .chain(&self.hi)
            .map(|x| x.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        let enc = |v: &[i64]| Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect());
        let mut obj = Map::new();
        obj.insert("lo".into(), enc(&self.lo));
        obj.insert("hi".into(), enc(&self.hi));
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dec = |key: &str| -> Result<Vec<i64>> {
            json::parse_ints(json::field(v, key)?)?
                .into_iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::Format("bound out of range".into())))
                .collect()
        };
        Self::new(dec("lo")?, dec("hi")?)
    }
}

/// Which box of side `N` a partition number refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainFamily {
    /// `[1, N]^d`
    Positive,
    /// `[-N, N]^d`
    Symmetric,
}

impl DomainFamily {
    pub fn at(self, d: usize, n: usize) -> Result<Domain> {
        let n = n as i64;
        match self {
            DomainFamily::Positive => Domain::cube(d, 1, n),
            DomainFamily::Symmetric => Domain::cube(d, -n, n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainFamily::Positive => "positive",
            DomainFamily::Symmetric => "symmetric",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(DomainFamily::Positive),
            "symmetric" => Ok(DomainFamily::Symmetric),
            _ => Err(Error::Format(format!("unknown domain family {s:?}"))),
        }
    }
}

/// Total coloring of a box with colors `0..r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    domain: Domain,
    r: usize,
    colors: Vec<u8>,
}

impl Coloring {
    pub fn new(domain: Domain, r: usize, colors: Vec<u8>) -> Result<Self> {
        if r == 0 || r > crate::hypergraph::MAX_COLORS {
            return Err(Error::InvalidParameter(format!("unsupported color count {r}")));
        }
        if colors.len() != domain.size() {
            return Err(Error::DimensionMismatch(format!(
                "{} colors for a domain of {} points",
                colors.len(),
                domain.size()
            )));
        }
        if colors.iter().any(|&c| c as usize >= r) {
            return Err(Error::InvalidParameter("color out of range".into()));
        }
        Ok(Coloring { domain, r, colors })
    }

    pub fn from_fn(domain: Domain, r: usize, mut f: impl FnMut(&Point) -> usize) -> Result<Self> {
        let colors = (0..domain.size())
            .map(|i| f(&domain.point(i)) as u8)
            .collect();
        Self::new(domain, r, colors)
    }

    pub fn constant(domain: Domain) -> Self {
        let n = domain.size();
        Coloring {
            domain,
            r: 1,
            colors: vec![0; n],
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn color_of(&self, p: &[BigInt]) -> Option<usize> {
        self.domain.index(p).map(|i| self.colors[i] as usize)
    }

    /// Relabel color `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.r];
        for &p in perm {
            if p >= self.r || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        if perm.len() != self.r {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        let colors = self.colors.iter().map(|&c| perm[c as usize] as u8).collect();
        Self::new(self.domain.clone(), self.r, colors)
    }

    /// Run-length encoding `color*run,…` in index order.
    pub fn rle(&self) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.colors.len() {
            let c = self.colors[i];
            let start = i;
            while i < self.colors.len() && self.colors[i] == c {
                i += 1;
            }
            parts.push(format!("{c}*{}", i - start));
        }
        parts.join(",")
    }

    pub fn from_rle(domain: Domain, r: usize, text: &str) -> Result<Self> {
        let mut colors = Vec::new();
        for part in text.split(',').filter(|p| !p.trim().is_empty()) {
            let (c, run) = part
                .trim()
                .split_once('*')
                .ok_or_else(|| Error::Format(format!("bad run {part:?}")))?;
            let c: u8 = c
                .parse()
                .map_err(|_| Error::Format(format!("bad color {c:?}")))?;
            let run: usize = run
                .parse()
                .map_err(|_| Error::Format(format!("bad run length {run:?}")))?;
            if colors.len() + run > domain.size() {
                return Err(Error::Format("coloring longer than its domain".into()));
            }
            colors.extend(std::iter::repeat_n(c, run));
        }
        Self::new(domain, r, colors)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("domain".into(), self.domain.to_json());
        obj.insert("r".into(), json::count(self.r));
        obj.insert("colors".into(), Value::String(self.rle()));
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let domain = Domain::from_json(json::field(v, "domain")?)?;
        let r = json::parse_count(json::field(v, "r")?)?;
        Self::from_rle(domain, r, json::as_str(json::field(v, "colors")?, "colors")?)
    }
}

/// Limits for seed scans and coloring searches.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    /// Inclusive range for every seed coordinate; defaults to
    /// `[-R, R]` with `R` the domain radius.
    pub seed_range: Option<(i64, i64)>,
    pub max_nodes: u64,
    pub max_seconds: Option<f64>,
    pub threads: usize,
    /// Largest side tried by [`min_partition_number`].
    pub max_n: usize,
    /// Require all configuration terms to be distinct.
    pub strict: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            seed_range: None,
            max_nodes: 200_000_000,
            max_seconds: None,
            threads: 0,
            max_n: 64,
            strict: false,
        }
    }
}

impl SearchBudget {
    fn range_for(&self, domain: &Domain) -> (i64, i64) {
        self.seed_range.unwrap_or_else(|| {
            let r = domain.radius();
            (-r, r)
        })
    }

    fn deadline(&self, start: Instant) -> Option<Instant> {
        self.max_seconds
            .map(|s| start + Duration::from_secs_f64(s.max(0.0)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofMode {
    Exhaustive,
    Assumed,
}

impl ProofMode {
    pub fn name(&self) -> &'static str {
        match self {
            ProofMode::Exhaustive => "exhaustive",
            ProofMode::Assumed => "assumed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claim {
    /// `seed` generates a configuration inside the domain colored `color`.
    MonoWitness {
        seed: Vec<Point>,
        color: usize,
        coloring: Coloring,
    },
    /// No seed in the scan range yields a monochromatic configuration.
    BadColoring { coloring: Coloring },
    /// Every `r`-coloring of the side-`n` box has a monochromatic
    /// configuration; `bad` colors the side-`(n-1)` box without one.
    MinimalN {
        n: usize,
        r: usize,
        family: DomainFamily,
        proof_mode: ProofMode,
        bad: Option<Coloring>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub claim: Claim,
    pub pattern: Pattern,
    pub domain: Domain,
    /// Explicit seed range, or `None` for the domain default.
    pub seed_range: Option<(i64, i64)>,
    pub strict: bool,
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self.claim {
            Claim::MonoWitness { .. } => "mono-witness",
            Claim::BadColoring { .. } => "bad-coloring",
            Claim::MinimalN { .. } => "minimal-N",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("kind".into(), Value::String(self.kind().into()));
        obj.insert("shape-hash".into(), Value::String(self.pattern.content_hash()));
        obj.insert("pattern".into(), self.pattern.to_json());
        obj.insert("domain".into(), self.domain.to_json());
        obj.insert(
            "seed-range".into(),
            match self.seed_range {
                Some((lo, hi)) => Value::Array(vec![
                    Value::String(lo.to_string()),
                    Value::String(hi.to_string()),
                ]),
                None => Value::Null,
            },
        );
        obj.insert("strict".into(), Value::Bool(self.strict));
        obj.insert("engine-version".into(), Value::String(ENGINE_VERSION.into()));
        match &self.claim {
            Claim::MonoWitness {
                seed,
                color,
                coloring,
            } => {
                obj.insert(
                    "seed".into(),
                    Value::Array(seed.iter().map(|p| json::ints(p)).collect()),
                );
                obj.insert("color".into(), json::count(*color));
                obj.insert("coloring".into(), coloring.to_json());
            }
            Claim::BadColoring { coloring } => {
                obj.insert("coloring".into(), coloring.to_json());
            }
            Claim::MinimalN {
                n,
                r,
                family,
                proof_mode,
                bad,
            } => {
                obj.insert("N".into(), json::count(*n));
                obj.insert("r".into(), json::count(*r));
                obj.insert("domain-family".into(), Value::String(family.name().into()));
                obj.insert("proof-mode".into(), Value::String(proof_mode.name().into()));
                obj.insert(
                    "bad-coloring".into(),
                    bad.as_ref().map_or(Value::Null, Coloring::to_json),
                );
            }
        }
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let pattern = Pattern::from_json(json::field(v, "pattern")?)?;
        if let Some(h) = v.get("shape-hash") {
            if json::as_str(h, "shape-hash")? != pattern.content_hash() {
                return Err(Error::InvalidCertificate(
                    "shape-hash does not match the embedded pattern".into(),
                ));
            }
        }
        let domain = Domain::from_json(json::field(v, "domain")?)?;
        let seed_range = match v.get("seed-range") {
            None | Some(Value::Null) => None,
            Some(r) => {
                let r = json::parse_ints(r)?;
                match &r[..] {
                    [lo, hi] => Some((
                        lo.to_i64().ok_or_else(|| Error::Format("seed range".into()))?,
                        hi.to_i64().ok_or_else(|| Error::Format("seed range".into()))?,
                    )),
                    _ => return Err(Error::Format("seed-range is a pair".into())),
                }
            }
        };
        let strict = v.get("strict").and_then(Value::as_bool).unwrap_or(false);
        let kind = json::as_str(json::field(v, "kind")?, "kind")?;
        let claim = match kind {
            "mono-witness" => Claim::MonoWitness {
                seed: json::as_array(json::field(v, "seed")?, "seed")?
                    .iter()
                    .map(json::parse_ints)
                    .collect::<Result<_>>()?,
                color: json::parse_count(json::field(v, "color")?)?,
                coloring: Coloring::from_json(json::field(v, "coloring")?)?,
            },
            "bad-coloring" => Claim::BadColoring {
                coloring: Coloring::from_json(json::field(v, "coloring")?)?,
            },
            "minimal-N" => Claim::MinimalN {
                n: json::parse_count(json::field(v, "N")?)?,
                r: json::parse_count(json::field(v, "r")?)?,
                family: DomainFamily::parse(json::as_str(
                    json::field(v, "domain-family")?,
                    "domain-family",
                )?)?,
                proof_mode: match json::as_str(json::field(v, "proof-mode")?, "proof-mode")? {
                    "exhaustive" => ProofMode::Exhaustive,
                    "assumed" => ProofMode::Assumed,
                    other => return Err(Error::Format(format!("unknown proof mode {other:?}"))),
                },
                bad: match v.get("bad-coloring") {
                    None | Some(Value::Null) => None,
                    Some(c) => Some(Coloring::from_json(c)?),
                },
            },
            other => return Err(Error::Format(format!("unknown certificate kind {other:?}"))),
        };
        Ok(Certificate {
            claim,
            pattern,
            domain,
            seed_range,
            strict,
        })
    }
}

/// Seed-scan callback over flattened seeds: `vars = (m+1)·d` coordinates,
/// grouped into `d`-blocks that must each be nonzero. Seeds come in shells
/// of increasing max-norm, lexicographically inside a shell.
pub fn scan_seeds(
    vars: usize,
    d: usize,
    range: (i64, i64),
    mut visit: impl FnMut(&[i64]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let (lo, hi) = range;
    if lo > hi || vars == 0 {
        return ControlFlow::Continue(());
    }
    let radius = lo.abs().max(hi.abs());
    let mut buf = vec![0i64; vars];
    for shell in 1..=radius {
        shell_rec(&mut buf, 0, false, shell, d, (lo, hi), &mut visit)?;
    }
    ControlFlow::Continue(())
}

fn shell_rec(
    buf: &mut [i64],
    pos: usize,
    hit: bool,
    shell: i64,
    d: usize,
    range: (i64, i64),
    visit: &mut impl FnMut(&[i64]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if pos > 0 && pos.is_multiple_of(d) && buf[pos - d..pos].iter().all(|&x| x == 0) {
        return ControlFlow::Continue(());
    }
    if pos == buf.len() {
        return if hit {
            visit(buf)
        } else {
            ControlFlow::Continue(())
        };
    }
    let lo = range.0.max(-shell);
    let hi = range.1.min(shell);
    let last = pos + 1 == buf.len();
    for x in lo..=hi {
        let on_shell = x.abs() == shell;
        if last && !hit && !on_shell {
            continue;
        }
        buf[pos] = x;
        shell_rec(buf, pos + 1, hit || on_shell, shell, d, range, visit)?;
    }
    ControlFlow::Continue(())
}

fn seed_points(flat: &[i64], d: usize) -> Vec<Point> {
    flat.chunks(d)
        .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Domain indices of the configuration generated by `seed`, or `None` if
/// it leaves the domain (or repeats a term under `strict`).
fn configuration_indices(
    pattern: &Pattern,
    seed: &[Point],
    domain: &Domain,
    strict: bool,
) -> Result<Option<Vec<u32>>> {
    let points = pattern.points(seed)?;
    if strict && points.len() != pattern.term_count() {
        return Ok(None);
    }
    let mut idx = Vec::with_capacity(points.len());
    for p in &points {
        match domain.index(p) {
            Some(i) => idx.push(i as u32),
            None => return Ok(None),
        }
    }
    Ok(Some(idx))
}

fn mono_color(coloring: &Coloring, idx: &[u32]) -> Option<usize> {
    let c = coloring.colors[idx[0] as usize];
    idx.iter()
        .all(|&i| coloring.colors[i as usize] == c)
        .then_some(c as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoOutcome {
    Found(Certificate),
    /// The whole seed range was scanned.
    NoneWithinBudget,
    /// Stopped by the node or time limit after `scanned` seeds.
    Exhausted { scanned: u64 },
}

/// First seed in scan order whose configuration lies in the domain and is
/// monochromatic.
pub fn find_mono(pattern: &Pattern, coloring: &Coloring, budget: &SearchBudget) -> Result<MonoOutcome> {
    let shape = pattern.shape();
    let d = shape.d();
    if coloring.domain.d() != d {
        return Err(Error::DimensionMismatch(format!(
            "shape over Z^{d}, coloring over Z^{}",
            coloring.domain.d()
        )));
    }
    let start = Instant::now();
    let deadline = budget.deadline(start);
    let range = budget.range_for(&coloring.domain);
    let vars = (shape.m() + 1) * d;
    let mut scanned = 0u64;
    let mut found = None;
    let mut exhausted = false;
    let mut failure = None;
    let _ = scan_seeds(vars, d, range, |flat| {
        scanned += 1;
        if scanned > budget.max_nodes
            || (scanned.is_multiple_of(4096) && deadline.is_some_and(|t| Instant::now() >= t))
        {
            exhausted = true;
            return ControlFlow::Break(());
        }
        let seed = seed_points(flat, d);
        match configuration_indices(pattern, &seed, &coloring.domain, budget.strict) {
            Ok(Some(idx)) => {
                if let Some(color) = mono_color(coloring, &idx) {
                    found = Some((seed, color));
                    return ControlFlow::Break(());
                }
            }
            Ok(None) => {}
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(match found {
        Some((seed, color)) => MonoOutcome::Found(Certificate {
            claim: Claim::MonoWitness {
                seed,
                color,
                coloring: coloring.clone(),
            },
            pattern: pattern.clone(),
            domain: coloring.domain.clone(),
            seed_range: budget.seed_range,
            strict: budget.strict,
        }),
        None if exhausted => MonoOutcome::Exhausted { scanned },
        None => MonoOutcome::NoneWithinBudget,
    })
}

/// Every configuration inside `domain` reachable from the seed range, as
/// a hypergraph on the domain's points.
pub fn configuration_hypergraph(
    pattern: &Pattern,
    domain: &Domain,
    range: (i64, i64),
    strict: bool,
) -> Result<Hypergraph> {
    let d = pattern.shape().d();
    let vars = (pattern.shape().m() + 1) * d;
    let mut edges = Vec::new();
    let mut failure = None;
    let _ = scan_seeds(vars, d, range, |flat| {
        match configuration_indices(pattern, &seed_points(flat, d), domain, strict) {
            Ok(Some(idx)) => edges.push(idx),
            Ok(None) => {}
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(Hypergraph::new(domain.size(), edges)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberOutcome {
    /// `MinimalN` on success; otherwise `BadColoring` for the largest side
    /// shown insufficient.
    pub certificate: Certificate,
    pub exhausted: bool,
    pub nodes: u64,
}

/// Least `N` such that every `r`-coloring of the side-`N` box contains a
/// monochromatic configuration.
pub fn min_partition_number(
    pattern: &Pattern,
    r: usize,
    family: DomainFamily,
    budget: &SearchBudget,
) -> Result<NumberOutcome> {
    if r == 0 || r > crate::hypergraph::MAX_COLORS {
        return Err(Error::InvalidParameter(format!("unsupported color count {r}")));
    }
    let d = pattern.shape().d();
    let start = Instant::now();
    let solver = SolverBudget {
        max_nodes: budget.max_nodes,
        deadline: budget.deadline(start),
        threads: budget.threads,
    };
    let mut nodes = 0u64;
    let mut best: Option<Coloring> = None;
    for n in 1..=budget.max_n {
        let domain = family.at(d, n)?;
        let range = budget.range_for(&domain);
        let graph = configuration_hypergraph(pattern, &domain, range, budget.strict)?;
        let remaining = SolverBudget {
            max_nodes: solver.max_nodes.saturating_sub(nodes),
            ..solver.clone()
        };
        let report = proper_coloring(&graph, r, &remaining);
        nodes += report.nodes;
        match report.outcome {
            Colorability::Colorable(colors) => {
                best = Some(Coloring::new(domain, r, colors)?);
            }
            Colorability::Uncolorable => {
                return Ok(NumberOutcome {
                    certificate: Certificate {
                        claim: Claim::MinimalN {
                            n,
                            r,
                            family,
                            proof_mode: ProofMode::Exhaustive,
                            bad: best,
                        },
                        pattern: pattern.clone(),
                        domain,
                        seed_range: budget.seed_range,
                        strict: budget.strict,
                    },
                    exhausted: false,
                    nodes,
                });
            }
            Colorability::Exhausted => break,
        }
    }
    match best {
        Some(coloring) => Ok(NumberOutcome {
            certificate: Certificate {
                claim: Claim::BadColoring {
                    coloring: coloring.clone(),
                },
                pattern: pattern.clone(),
                domain: coloring.domain.clone(),
                seed_range: budget.seed_range,
                strict: budget.strict,
            },
            exhausted: true,
            nodes,
        }),
        None => Err(Error::Budget(
            "budget exhausted before any side length was decided".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    pub reason: String,
}

impl Verification {
    fn pass(reason: impl Into<String>) -> Self {
        Verification {
            ok: true,
            reason: reason.into(),
        }
    }

    fn fail(reason: impl Into<String>) -> Self {
        Verification {
            ok: false,
            reason: reason.into(),
        }
    }
}

/// Odometer over `[lo, hi]^vars`, skipping seeds with a zero point.
fn for_each_seed_plain(vars: usize, d: usize, range: (i64, i64), mut visit: impl FnMut(&[i64]) -> bool) {
    let (lo, hi) = range;
    if lo > hi {
        return;
    }
    let mut buf = vec![lo; vars];
    loop {
        if buf.chunks(d).all(|c| c.iter().any(|&x| x != 0)) && !visit(&buf) {
            return;
        }
        let mut i = vars;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if buf[i] < hi {
                buf[i] += 1;
                break;
            }
            buf[i] = lo;
        }
    }
}

fn plain_edges(pattern: &Pattern, domain: &Domain, range: (i64, i64), strict: bool) -> Result<Vec<Vec<u32>>> {
    let d = pattern.shape().d();
    let vars = (pattern.shape().m() + 1) * d;
    let mut edges = Vec::new();
    let mut failure = None;
    for_each_seed_plain(vars, d, range, |flat| {
        match configuration_indices(pattern, &seed_points(flat, d), domain, strict) {
            Ok(Some(idx)) => edges.push(idx),
            Ok(None) => {}
            Err(e) => {
                failure = Some(e);
                return false;
            }
        }
        true
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(edges),
    }
}

fn check_bad(pattern: &Pattern, coloring: &Coloring, range: (i64, i64), strict: bool) -> Result<Verification> {
    for e in plain_edges(pattern, &coloring.domain, range, strict)? {
        if mono_color(coloring, &e).is_some() {
            let pts: Vec<String> = e
                .iter()
                .map(|&i| format!("{:?}", coloring.domain.point(i as usize)))
                .collect();
            return Ok(Verification::fail(format!(
                "monochromatic configuration at {}",
                pts.join(" ")
            )));
        }
    }
    Ok(Verification::pass("no monochromatic configuration in the seed range"))
}

/// Largest coloring count enumerated directly before falling back to the
/// solver when re-deciding a minimal `N`.
const BRUTE_FORCE_LIMIT: u64 = 1 << 22;

/// Re-check a certificate from its own contents. When `pattern` is given
/// it must match the embedded one.
pub fn verify_certificate(cert: &Certificate, pattern: Option<&Pattern>) -> Result<Verification> {
    if let Some(p) = pattern {
        if p.content_hash() != cert.pattern.content_hash() {
            return Ok(Verification::fail("certificate is for a different pattern"));
        }
    }
    let pattern = &cert.pattern;
    let d = pattern.shape().d();
    if cert.domain.d() != d {
        return Ok(Verification::fail("domain dimension differs from the shape"));
    }
    let range_for = |dom: &Domain| {
        cert.seed_range.unwrap_or_else(|| {
            let r = dom.radius();
            (-r, r)
        })
    };
    match &cert.claim {
        Claim::MonoWitness {
            seed,
            color,
            coloring,
        } => {
            if coloring.domain != cert.domain {
                return Ok(Verification::fail("coloring domain differs from the certificate"));
            }
            if seed.len() != pattern.shape().m() + 1 || seed.iter().any(|p| p.len() != d) {
                return Ok(Verification::fail("seed has the wrong shape"));
            }
            if seed.iter().any(|p| p.iter().all(Zero::is_zero)) {
                return Ok(Verification::fail("seed has a zero point"));
            }
            let points = pattern.points(seed)?;
            if cert.strict && points.len() != pattern.term_count() {
                return Ok(Verification::fail("configuration repeats a term"));
            }
            for p in &points {
                match coloring.color_of(p) {
                    None => return Ok(Verification::fail(format!("point {p:?} outside the domain"))),
                    Some(c) if c != *color => {
                        return Ok(Verification::fail(format!(
                            "point {p:?} has color {c}, expected {color}"
                        )))
                    }
                    Some(_) => {}
                }
            }
            Ok(Verification::pass(format!(
                "{} points, all color {color}",
                points.len()
            )))
        }
        Claim::BadColoring { coloring } => {
            if coloring.domain != cert.domain {
                return Ok(Verification::fail("coloring domain differs from the certificate"));
            }
            check_bad(pattern, coloring, range_for(&coloring.domain), cert.strict)
        }
        Claim::MinimalN {
            n,
            r,
            family,
            proof_mode,
            bad,
        } => {
            if *n == 0 {
                return Ok(Verification::fail("N must be positive"));
            }
            let domain = family.at(d, *n)?;
            if domain != cert.domain {
                return Ok(Verification::fail("domain does not match N"));
            }
            match (bad, *n) {
                (None, 1) => {}
                (None, _) => return Ok(Verification::fail("missing bad coloring for N-1")),
                (Some(_), 1) => return Ok(Verification::fail("bad coloring given for N = 1")),
                (Some(c), n) => {
                    if c.domain != family.at(d, n - 1)? || c.r != *r {
                        return Ok(Verification::fail("bad coloring is not an r-coloring of the N-1 box"));
                    }
                    let v = check_bad(pattern, c, range_for(&c.domain), cert.strict)?;
                    if !v.ok {
                        return Ok(Verification::fail(format!("N-1 coloring: {}", v.reason)));
                    }
                }
            }
            if *proof_mode == ProofMode::Assumed {
                return Ok(Verification::pass("N-1 coloring checked; decision at N assumed"));
            }
            let graph = Hypergraph::new(
                domain.size(),
                plain_edges(pattern, &domain, range_for(&domain), cert.strict)?,
            );
            let proper = match brute_force_size(domain.size(), *r) {
                Some(total) if total <= BRUTE_FORCE_LIMIT => brute_force_proper_coloring(&graph, *r),
                _ => match proper_coloring(&graph, *r, &SolverBudget::default()).outcome {
                    Colorability::Colorable(c) => Some(c),
                    Colorability::Uncolorable => None,
                    Colorability::Exhausted => {
                        return Ok(Verification::fail("re-deciding N ran out of budget"))
                    }
                },
            };
            match proper {
                Some(_) => Ok(Verification::fail(format!(
                    "an {r}-coloring of the N = {n} box avoids every configuration"
                ))),
                None => Ok(Verification::pass(format!(
                    "every {r}-coloring of the N = {n} box has a monochromatic configuration"
                ))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::from_mpc;

    fn ones(n: i64) -> Domain {
        Domain::interval(1, n).unwrap()
    }

    #[test]
    fn domain_indexing_round_trips() {
        let dom = Domain::new(vec![-1, 2], vec![1, 4]).unwrap();
        assert_eq!(dom.size(), 9);
        for i in 0..dom.size() {
            assert_eq!(dom.index(&dom.point(i)), Some(i));
        }
        assert_eq!(dom.index(&[BigInt::from(2), BigInt::from(2)]), None);
    }

    #[test]
    fn rle_round_trip() {
        let c = Coloring::new(ones(5), 2, vec![0, 1, 1, 0, 0]).unwrap();
        assert_eq!(c.rle(), "0*1,1*2,0*2");
        assert_eq!(Coloring::from_rle(ones(5), 2, &c.rle()).unwrap(), c);
        assert!(Coloring::from_rle(ones(5), 2, "0*6").is_err());
        assert!(Coloring::from_rle(ones(5), 2, "0*4").is_err());
    }

    #[test]
    fn shells_are_ordered_and_nonzero() {
        let mut seen = Vec::new();
        let _ = scan_seeds(2, 1, (-2, 2), |s| {
            seen.push(s.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen.len(), 16);
        assert_eq!(seen[0], vec![-1, -1]);
        assert_eq!(seen[3], vec![1, 1]);
        assert!(seen.iter().all(|s| s.iter().all(|&x| x != 0)));
        let norms: Vec<i64> = seen.iter().map(|s| s.iter().map(|x| x.abs()).max().unwrap()).collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn constant_coloring_finds_mpc_witness() {
        let pattern = Pattern::whole(from_mpc(1, 1, 1).unwrap());
        let coloring = Coloring::constant(ones(10));
        let MonoOutcome::Found(cert) = find_mono(&pattern, &coloring, &SearchBudget::default()).unwrap()
        else {
            panic!("expected a witness")
        };
        let Claim::MonoWitness { seed, .. } = &cert.claim else { panic!() };
        assert_eq!(seed, &vec![vec![BigInt::from(1)], vec![BigInt::from(2)]]);
        assert!(verify_certificate(&cert, Some(&pattern)).unwrap().ok);
    }

    #[test]
    fn recolored_witness_fails() {
        let pattern = Pattern::whole(from_mpc(1, 1, 1).unwrap());
        let coloring = Coloring::constant(ones(10));
        let MonoOutcome::Found(mut cert) =
            find_mono(&pattern, &coloring, &SearchBudget::default()).unwrap()
        else {
            panic!()
        };
        if let Claim::MonoWitness { coloring, .. } = &mut cert.claim {
            let mut colors = coloring.colors().to_vec();
            colors[2] = 1;
            *coloring = Coloring::new(coloring.domain().clone(), 2, colors).unwrap();
        }
        assert!(!verify_certificate(&cert, None).unwrap().ok);
    }

    #[test]
    fn alternating_coloring_has_no_one_two_three() {
        // {s0} ∪ {s1 - s0, s1, s1 + s0} needs three points in arithmetic progression
        let pattern = Pattern::whole(from_mpc(1, 1, 1).unwrap());
        let coloring = Coloring::from_fn(ones(4), 2, |p| (p[0].to_i64().unwrap() as usize) % 2).unwrap();
        let out = find_mono(&pattern, &coloring, &SearchBudget::default()).unwrap();
        assert_eq!(out, MonoOutcome::NoneWithinBudget);
    }

    #[test]
    fn scan_budget_is_distinct_outcome() {
        let pattern = Pattern::whole(from_mpc(2, 1, 1).unwrap());
        let coloring = Coloring::from_fn(ones(30), 2, |p| (p[0].to_i64().unwrap() as usize) % 2).unwrap();
        let budget = SearchBudget {
            max_nodes: 10,
            ..SearchBudget::default()
        };
        assert!(matches!(
            find_mono(&pattern, &coloring, &budget).unwrap(),
            MonoOutcome::Exhausted { .. }
        ));
    }

    #[test]
    fn single_color_partition_number_is_geometric() {
        // the smallest set {s0, s1 - s0, s1, s1 + s0} inside [1, N] needs N = 3
        let pattern = Pattern::whole(from_mpc(1, 1, 1).unwrap());
        let out = min_partition_number(&pattern, 1, DomainFamily::Positive, &SearchBudget::default()).unwrap();
        let Claim::MinimalN { n, .. } = out.certificate.claim else { panic!() };
        assert_eq!(n, 3);
        assert!(verify_certificate(&out.certificate, None).unwrap().ok);
    }

    #[test]
    fn certificate_json_round_trip() {
        let pattern = Pattern::whole(from_mpc(1, 1, 1).unwrap());
        let out = min_partition_number(&pattern, 2, DomainFamily::Positive, &SearchBudget::default()).unwrap();
        let doc = out.certificate.to_json();
        let back = Certificate::from_json(&doc).unwrap();
        assert_eq!(back, out.certificate);
        assert!(verify_certificate(&back, None).unwrap().ok);
    }
}
