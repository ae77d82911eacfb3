//! Finite IP-sets: the subset sums of a generator sequence, sub-IP-sets
//! by block sums, and a finite probe for the IP polynomial van der Waerden
//! phenomenon in `Z`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hypergraph::{proper_coloring, Colorability, Hypergraph, SolverBudget};
use crate::json;
use crate::linalg::vec_add;
use crate::poly::PolyMap;
use crate::shape::Point;

pub const MAX_GENERATORS: usize = 20;

/// `FS(x_1, …, x_n)`. Values are indexed by nonempty subsets of `[n]`,
/// encoded as bitmasks with bit `i-1` for index `i`. Repeated generators
/// are allowed; [`FiniteIP::value_set`] then collapses equal sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteIP {
    generators: Vec<Point>,
}

pub fn fs(generators: Vec<Point>) -> Result<FiniteIP> {
    FiniteIP::new(generators)
}

impl FiniteIP {
    pub fn new(generators: Vec<Point>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::Empty("generator sequence".into()));
        };
        if generators.len() > MAX_GENERATORS {
            return Err(Error::InvalidParameter(format!(
                "at most {MAX_GENERATORS} generators, got {}",
                generators.len()
            )));
        }
        let d = first.len();
        if d == 0 || generators.iter().any(|g| g.len() != d) {
            return Err(Error::DimensionMismatch("generators need one common positive dimension".into()));
        }
        Ok(FiniteIP { generators })
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn n(&self) -> usize {
        self.generators.len()
    }

    pub fn d(&self) -> usize {
        self.generators[0].len()
    }

    /// `x_α` for the subset encoded by `mask`.
    pub fn value(&self, mask: u64) -> Result<Point> {
        if mask == 0 || mask >> self.n() != 0 {
            return Err(Error::InvalidParameter(format!("{mask:#b} is not a nonempty subset of [{}]", self.n())));
        }
        let mut acc = vec![BigInt::zero(); self.d()];
        for (i, g) in self.generators.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = vec_add(&acc, g);
            }
        }
        Ok(acc)
    }

    /// All `2^n - 1` pairs `(α, x_α)` in mask order.
    pub fn values(&self) -> Vec<(u64, Point)> {
        let n = self.n();
        let mut out: Vec<(u64, Point)> = Vec::with_capacity((1 << n) - 1);
        let mut sums: Vec<Point> = vec![vec![BigInt::zero(); self.d()]; 1 << n];
        for mask in 1u64..1 << n {
            let low = mask.trailing_zeros() as usize;
            let s = vec_add(&sums[(mask & (mask - 1)) as usize], &self.generators[low]);
            sums[mask as usize] = s.clone();
            out.push((mask, s));
        }
        out
    }

    /// The sums as a sorted set.
    pub fn value_set(&self) -> Vec<Point> {
        let set: BTreeSet<Point> = self.values().into_iter().map(|(_, v)| v).collect();
        set.into_iter().collect()
    }

    /// The sub-IP-set generated by `x_{α_1}, …, x_{α_m}`. Blocks are
    /// 1-based index sets with `max α_i < min α_{i+1}`.
    pub fn sub_ip(&self, blocks: &[Vec<usize>]) -> Result<FiniteIP> {
        check_blocks(blocks, self.n())?;
        let gens = blocks
            .iter()
            .map(|b| self.value(mask_of(b)))
            .collect::<Result<_>>()?;
        FiniteIP::new(gens)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "generators": self.generators.iter().map(|g| json::ints(g)).collect::<Vec<_>>(),
            "values": self.value_set().iter().map(|v| json::ints(v)).collect::<Vec<_>>(),
        })
    }
}

fn mask_of(block: &[usize]) -> u64 {
    block.iter().fold(0, |m, &i| m | 1 << (i - 1))
}

fn check_blocks(blocks: &[Vec<usize>], n: usize) -> Result<()> {
    if blocks.is_empty() {
        return Err(Error::Empty("block list".into()));
    }
    let mut prev_max = 0;
    for (t, b) in blocks.iter().enumerate() {
        if b.is_empty() {
            return Err(Error::InvalidParameter(format!("block {} is empty", t + 1)));
        }
        if b.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!("block {} is not strictly increasing", t + 1)));
        }
        if b[0] <= prev_max || b[0] == 0 {
            return Err(Error::InvalidParameter(format!(
                "block {} starts at {} but must start after {prev_max}",
                t + 1,
                b[0]
            )));
        }
        prev_max = *b.last().expect("nonempty");
        if prev_max > n {
            return Err(Error::InvalidParameter(format!("index {prev_max} exceeds {n}")));
        }
    }
    Ok(())
}

/// `B_1 ∘ B_2`: block `t` is the union of the `B_1` blocks indexed by the
/// `t`-th block of `B_2`, so that `sub_ip(sub_ip(x, B_1), B_2)` equals
/// `sub_ip(x, B_1 ∘ B_2)`.
pub fn compose_blocks(outer: &[Vec<usize>], inner: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    check_blocks(inner, outer.len())?;
    Ok(inner
        .iter()
        .map(|b| b.iter().flat_map(|&i| outer[i - 1].iter().copied()).collect())
        .collect())
}

#[derive(Clone, Debug)]
pub struct ProbeBudget {
    /// Candidate sets are the intervals `[start, start + L - 1]`.
    pub start: i64,
    pub max_len: usize,
    pub solver: SolverBudget,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        ProbeBudget {
            start: 1,
            max_len: 24,
            solver: SolverBudget::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// Every `r`-coloring of `[lo, hi]` has a monochromatic configuration.
    /// `minimal` holds when every shorter interval from `lo` was refuted.
    Found {
        lo: i64,
        hi: i64,
        minimal: bool,
        configurations: usize,
        /// Whether the claim was rechecked by enumerating all colorings.
        reverified: bool,
    },
    NoneWithinBudget {
        /// Longest refuted interval length and a coloring avoiding all
        /// configurations on it.
        refuted: Option<(usize, Vec<u8>)>,
        /// First length the solver could not decide, if any.
        undecided: Option<usize>,
    },
}

impl ProbeOutcome {
    pub fn to_json(&self) -> Value {
        match self {
            ProbeOutcome::Found { lo, hi, minimal, configurations, reverified } => json!({
                "found": true,
                "interval": [lo.to_string(), hi.to_string()],
                "minimal": minimal,
                "configurations": json::count(*configurations),
                "reverified": reverified,
            }),
            ProbeOutcome::NoneWithinBudget { refuted, undecided } => json!({
                "found": false,
                "refuted-length": refuted.as_ref().map(|(l, _)| json::count(*l)),
                "bad-coloring": refuted.as_ref().map(|(_, c)| c.iter().map(|&x| char::from_digit(x as u32, 36).expect("at most 32 colors")).collect::<String>()),
                "undecided-length": undecided.map(json::count),
            }),
        }
    }
}

/// The sets `{a} ∪ {a + f(y_α) : f ∈ F}` inside `[lo, lo + len - 1]`, as
/// sorted offsets from `lo`.
fn configurations(offsets: &[Vec<BigInt>], lo: i64, len: usize) -> Vec<Vec<u32>> {
    let mut out = BTreeSet::new();
    let hi = BigInt::from(lo) + BigInt::from(len as i64);
    for a in 0..len as i64 {
        let base = BigInt::from(lo + a);
        'alpha: for shifts in offsets {
            let mut members = BTreeSet::from([a as u32]);
            for s in shifts {
                let p = &base + s;
                if p < BigInt::from(lo) || p >= hi {
                    continue 'alpha;
                }
                let off: i64 = (p - BigInt::from(lo)).try_into().expect("inside the interval");
                members.insert(off as u32);
            }
            out.insert(members.into_iter().collect::<Vec<_>>());
        }
    }
    out.into_iter().collect()
}

fn some_mono(configs: &[Vec<u32>], colors: &[u8]) -> bool {
    configs
        .iter()
        .any(|c| c.iter().all(|&v| colors[v as usize] == colors[c[0] as usize]))
}

fn shift_table(family: &[PolyMap], y: &FiniteIP) -> Result<Vec<Vec<BigInt>>> {
    if family.is_empty() {
        return Err(Error::Empty("map family".into()));
    }
    for f in family {
        if f.inputs() != y.d() || f.outputs() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "maps must send Z^{} to Z, got Z^{} to Z^{}",
                y.d(),
                f.inputs(),
                f.outputs()
            )));
        }
    }
    Ok(y.values()
        .iter()
        .map(|(_, v)| family.iter().map(|f| f.eval(v).remove(0)).collect())
        .collect())
}

/// The probe's configurations inside `[lo, lo + len - 1]`, as sorted
/// offsets from `lo`.
pub fn probe_configurations(family: &[PolyMap], y: &FiniteIP, lo: i64, len: usize) -> Result<Vec<Vec<u32>>> {
    Ok(configurations(&shift_table(family, y)?, lo, len))
}

/// Whether `colors` (one per point of `[lo, lo + len - 1]`) leaves every
/// probe configuration non-monochromatic.
pub fn avoids_all(family: &[PolyMap], y: &FiniteIP, lo: i64, colors: &[u8]) -> Result<bool> {
    Ok(!some_mono(&probe_configurations(family, y, lo, colors.len())?, colors))
}

/// Exhaustive recheck over all `r^len` colorings; `None` if too many.
fn recheck(configs: &[Vec<u32>], len: usize, r: usize) -> Option<bool> {
    let total = (r as u64).checked_pow(len as u32).filter(|&t| t <= 1 << 22)?;
    let mut colors = vec![0u8; len];
    for idx in 0..total {
        let mut x = idx;
        for c in colors.iter_mut() {
            *c = (x % r as u64) as u8;
            x /= r as u64;
        }
        if !some_mono(configs, &colors) {
            return Some(false);
        }
    }
    Some(true)
}

/// Search intervals `I = [start, start + L - 1]`, `L = 1, 2, …`, for the
/// first one where every `r`-coloring of `I` has `a ∈ I` and a nonempty
/// `α` with `{a} ∪ {a + f(y_α) : f ∈ F}` monochromatic and inside `I`.
pub fn finitistic_ip_vdw_probe(
    family: &[PolyMap],
    y: &FiniteIP,
    r: usize,
    budget: &ProbeBudget,
) -> Result<ProbeOutcome> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    let offsets = shift_table(family, y)?;
    let mut refuted = None;
    for len in 1..=budget.max_len {
        let configs = configurations(&offsets, budget.start, len);
        let graph = Hypergraph::new(len, configs.clone());
        let report = proper_coloring(&graph, r, &budget.solver);
        match report.outcome {
            Colorability::Colorable(colors) => {
                if some_mono(&configs, &colors) {
                    return Err(Error::Verification("solver coloring has a monochromatic configuration".into()));
                }
                refuted = Some((len, colors));
            }
            Colorability::Uncolorable => {
                let reverified = match recheck(&configs, len, r) {
                    Some(true) => true,
                    Some(false) => {
                        return Err(Error::Verification(format!(
                            "exhaustive recheck found an avoiding coloring of length {len}"
                        )))
                    }
                    None => false,
                };
                return Ok(ProbeOutcome::Found {
                    lo: budget.start,
                    hi: budget.start + len as i64 - 1,
                    minimal: refuted.as_ref().map_or(len == 1, |(l, _)| *l == len - 1),
                    configurations: configs.len(),
                    reverified,
                });
            }
            Colorability::Exhausted => {
                return Ok(ProbeOutcome::NoneWithinBudget {
                    refuted,
                    undecided: Some(len),
                })
            }
        }
    }
    Ok(ProbeOutcome::NoneWithinBudget {
        refuted,
        undecided: None,
    })
}
