//! The Hales-Jewett lift of a homomorphic shape and the matching
//! extraction of a smaller configuration from a colored lifted one.
//!
//! Input `(m, F⃗, c)` (normalized, concordant through `b` and `a_f`),
//! colors `r`, `0 ≤ k < m` lines already monochromatic and a word length
//! `n`. Write `N = n(m-k)`, `M = N + k`, `⟨n⟩ = {0, …, n-1}` and
//! `T_i = (t_{i(m-k)}, …, t_{i(m-k)+m-k-1})`. The lifted shape `(M, H⃗, C)`
//! has `C = c∘b` and
//!
//! ```text
//! H_N        = { Σ_{i<n} f_i∘b(T_i) : f_i ∈ F_{m-k} }
//! H_{M-m+j}  = { f(u_0, …, u_{j-1}) : f ∈ F_j, ∅ ≠ A ⊆ ⟨n⟩, w_i ∈ F_{m-k} (i ∉ A) }   m-k < j ≤ m
//! H_{a(m-k)+j} = { f(u_0, …, u_{j-1}) + Σ_{i∈A'} C(t_{i(m-k)+j}) : f ∈ F_j, A' ⊆ ⟨a⟩ }  j < m-k
//! ```
//!
//! where in the last family `A = A' ∪ {a}`, `F_0 = {0}`, and the `u_j` are
//!
//! ```text
//! u_j = b(t_{M-m+j})                      m-k < j ≤ m
//! u_j = Σ_{i∈B} a_{w_i}(T_i) + b(t_N)      j = m-k,  B = ⟨n⟩ \ A
//! u_j = Σ_{i∈A} b(t_{i(m-k)+j})            0 ≤ j < m-k
//! ```
//!
//! With `B = ∅` the middle sum is empty and `u_{m-k} = b(t_N)`.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hj::{find_mono_line, hj_number, HjBudget, VariableWord};
use crate::json;
use crate::linalg::IntMatrix;
use crate::poly::PolyMap;
use crate::shape::{concordance_witness, normalize_for_lift, Concordance, Point, Shape};

#[derive(Clone, Debug)]
pub struct LiftOptions {
    /// Word length; computed as `HJ(|F_{m-k}|, r)` when absent.
    pub n: Option<usize>,
    /// Refuse to materialize more maps than this in total.
    pub max_maps: usize,
    pub hj_budget: HjBudget,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            n: None,
            max_maps: 250_000,
            hj_budget: HjBudget {
                max_n: 3,
                max_nodes: 5_000_000,
                threads: 0,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NSource {
    Override,
    HalesJewett,
}

#[derive(Debug)]
pub struct LiftPlan {
    input: Shape,
    r: usize,
    k: usize,
    n: usize,
    n_source: NSource,
    concordance: Concordance,
    family_mk: Vec<IntMatrix>,
    big_c: IntMatrix,
    big: OnceLock<Shape>,
}

impl Clone for LiftPlan {
    fn clone(&self) -> Self {
        let big = OnceLock::new();
        if let Some(s) = self.big.get() {
            let _ = big.set(s.clone());
        }
        LiftPlan {
            input: self.input.clone(),
            r: self.r,
            k: self.k,
            n: self.n,
            n_source: self.n_source,
            concordance: self.concordance.clone(),
            family_mk: self.family_mk.clone(),
            big_c: self.big_c.clone(),
            big,
        }
    }
}

fn proj(d: usize, cols: usize, idx: usize) -> IntMatrix {
    let mut m = IntMatrix::zeros(d, cols * d);
    for q in 0..d {
        m[(q, idx * d + q)] = BigInt::from(1);
    }
    m
}

fn vstack(parts: &[IntMatrix], cols: usize) -> IntMatrix {
    let rows: Vec<Vec<BigInt>> = parts
        .iter()
        .flat_map(|p| (0..p.rows()).map(move |r| p.row(r).to_vec()))
        .collect();
    if rows.is_empty() {
        IntMatrix::zeros(0, cols)
    } else {
        IntMatrix::from_rows(rows).expect("parts share a width")
    }
}

fn add(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.add(b).expect("shapes agree")
}

fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.mul(b).expect("shapes agree")
}

/// Subsets of `⟨n⟩` as sorted index lists, by bitmask.
fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

/// Where line `j` of the small set lands in the big set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placement {
    /// `j < m-k`: line `a(m-k)+j` with `a = max A`.
    Below,
    /// `j = m-k`: line `N`, the combinatorial line itself.
    Middle,
    /// `j > m-k`: line `M-m+j`.
    Above,
}

impl LiftPlan {
    pub fn input(&self) -> &Shape {
        &self.input
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_source(&self) -> NSource {
        self.n_source
    }

    pub fn concordance(&self) -> &Concordance {
        &self.concordance
    }

    fn m(&self) -> usize {
        self.input.m()
    }

    fn mk(&self) -> usize {
        self.m() - self.k
    }

    fn d(&self) -> usize {
        self.input.d()
    }

    /// `N = n(m-k)`.
    pub fn big_n(&self) -> usize {
        self.n * self.mk()
    }

    /// `M = N + k`.
    pub fn big_m(&self) -> usize {
        self.big_n() + self.k
    }

    /// `C = c∘b`.
    pub fn big_c(&self) -> &IntMatrix {
        &self.big_c
    }

    /// The alphabet `F_{m-k}` in family order.
    pub fn alphabet(&self) -> &[IntMatrix] {
        &self.family_mk
    }

    fn b(&self) -> &IntMatrix {
        &self.concordance.b
    }

    fn a_of(&self, letter: usize) -> &IntMatrix {
        &self.concordance.a[self.mk() - 1][letter]
    }

    /// `(m-k)d × cols·d` matrix picking out `T_i`.
    fn t_block(&self, cols: usize, i: usize) -> IntMatrix {
        let mk = self.mk();
        let parts: Vec<IntMatrix> = (0..mk)
            .map(|q| proj(self.d(), cols, i * mk + q))
            .collect();
        vstack(&parts, cols * self.d())
    }

    /// `u_0, …, u_{upto-1}` as maps of `t_0, …, t_{cols-1}`. `word[i]` is
    /// `None` for `i ∈ A` and the letter index otherwise.
    fn u_maps(&self, cols: usize, upto: usize, word: &[Option<usize>]) -> Vec<IntMatrix> {
        let d = self.d();
        let mk = self.mk();
        let b = self.b();
        (0..upto)
            .map(|j| {
                let mut acc = IntMatrix::zeros(d, cols * d);
                if j < mk {
                    for (i, w) in word.iter().enumerate() {
                        if w.is_none() {
                            acc = add(&acc, &mul(b, &proj(d, cols, i * mk + j)));
                        }
                    }
                } else if j == mk {
                    for (i, w) in word.iter().enumerate() {
                        if let Some(letter) = w {
                            acc = add(&acc, &mul(self.a_of(*letter), &self.t_block(cols, i)));
                        }
                    }
                    acc = add(&acc, &mul(b, &proj(d, cols, self.big_n())));
                } else {
                    acc = mul(b, &proj(d, cols, self.big_m() - self.m() + j));
                }
                acc
            })
            .collect()
    }

    /// `f(u_0, …, u_{j-1})` for `f ∈ F_j`, as a map of `cols` arguments.
    fn compose(&self, f: &IntMatrix, us: &[IntMatrix], cols: usize) -> IntMatrix {
        if us.is_empty() {
            return IntMatrix::zeros(self.d(), cols * self.d());
        }
        mul(f, &vstack(us, cols * self.d()))
    }

    /// The `H_N` member for a full word of letter indices.
    pub fn word_map(&self, word: &[usize]) -> IntMatrix {
        let d = self.d();
        let big_n = self.big_n();
        let bold = IntMatrix::block_diag(self.b(), self.mk());
        let mut acc = IntMatrix::zeros(d, big_n * d);
        for (i, &letter) in word.iter().enumerate() {
            let f = &self.family_mk[letter];
            acc = add(&acc, &mul(&mul(f, &bold), &self.t_block(big_n, i)));
        }
        acc
    }

    fn family_j(&self, j: usize) -> Vec<IntMatrix> {
        if j == 0 {
            vec![IntMatrix::zeros(self.d(), 0)]
        } else {
            self.input
                .family_matrices()
                .expect("normalized input is homomorphic")[j - 1]
                .clone()
        }
    }

    /// Upper bound on `|H_L|` before deduplication.
    pub fn family_size_bound(&self, l: usize) -> u128 {
        let big_n = self.big_n();
        let kk = self.family_mk.len() as u128;
        let n = self.n as u32;
        let sizes = self.input.family_sizes();
        let fj = |j: usize| if j == 0 { 1 } else { sizes[j - 1] as u128 };
        if l < big_n {
            let (a, j) = (l / self.mk(), l % self.mk());
            fj(j) << a
        } else if l == big_n {
            kk.saturating_pow(n)
        } else {
            let j = l - big_n + self.mk();
            fj(j) * ((kk + 1).saturating_pow(n) - kk.saturating_pow(n))
        }
    }

    pub fn total_size_bound(&self) -> u128 {
        (1..=self.big_m()).map(|l| self.family_size_bound(l)).sum()
    }

    /// `H_L` for `1 ≤ L ≤ M`, deduplicated in generation order.
    pub fn family(&self, l: usize) -> Result<Vec<IntMatrix>> {
        if l == 0 || l > self.big_m() {
            return Err(Error::InvalidParameter(format!("no family H_{l}")));
        }
        let big_n = self.big_n();
        let mk = self.mk();
        let n = self.n;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut push = |m: IntMatrix| {
            if seen.insert(m.clone()) {
                out.push(m);
            }
        };
        if l < big_n {
            let (a, j) = (l / mk, l % mk);
            for a_prime in subsets(a) {
                let mut word: Vec<Option<usize>> = vec![Some(0); n];
                for &i in &a_prime {
                    word[i] = None;
                }
                word[a] = None;
                let us = self.u_maps(l, j, &word);
                let mut tail = IntMatrix::zeros(self.d(), l * self.d());
                for &i in &a_prime {
                    tail = add(&tail, &mul(&self.big_c, &proj(self.d(), l, i * mk + j)));
                }
                for f in self.family_j(j) {
                    push(add(&self.compose(&f, &us, l), &tail));
                }
            }
        } else if l == big_n {
            let kk = self.family_mk.len();
            let total = kk.pow(n as u32);
            for idx in 0..total {
                push(self.word_map(&digits(idx, kk, n)));
            }
        } else {
            let j = l - big_n + mk;
            let fam = self.family_j(j);
            for word in self.partial_words() {
                let us = self.u_maps(l, j, &word);
                for f in &fam {
                    push(self.compose(f, &us, l));
                }
            }
        }
        Ok(out)
    }

    /// Every `(A, w|_B)` with `A ≠ ∅`, as letter-or-star sequences.
    fn partial_words(&self) -> Vec<Vec<Option<usize>>> {
        let kk = self.family_mk.len();
        let n = self.n;
        let mut out = Vec::new();
        for mask in 1u64..1 << n {
            let b: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
            for idx in 0..kk.pow(b.len() as u32) {
                let letters = digits(idx, kk, b.len());
                let mut word = vec![None; n];
                for (&i, &x) in b.iter().zip(&letters) {
                    word[i] = Some(x);
                }
                out.push(word);
            }
        }
        out
    }

    /// The lifted shape `(M, H⃗, C)`, materialized on first use.
    pub fn big_shape(&self) -> Result<&Shape> {
        if let Some(s) = self.big.get() {
            return Ok(s);
        }
        let families = (1..=self.big_m())
            .map(|l| {
                self.family(l)
                    .map(|fam| fam.iter().map(PolyMap::from_matrix).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let shape = Shape::new(self.d(), self.big_c.clone(), families)?;
        Ok(self.big.get_or_init(|| shape))
    }

    pub fn to_json(&self) -> Result<Value> {
        Ok(json!({
            "input": self.input.to_json(),
            "r": json::count(self.r),
            "k": json::count(self.k),
            "n": json::count(self.n),
            "n-source": match self.n_source {
                NSource::Override => "override",
                NSource::HalesJewett => "hales-jewett",
            },
            "concordance": self.concordance.to_json(),
            "N": json::count(self.big_n()),
            "M": json::count(self.big_m()),
            "C": json::matrix(&self.big_c),
            "shape": self.big_shape()?.to_json(),
        }))
    }

    /// Rebuild from the stored input and parameters; a stored lifted
    /// shape must match the rebuilt one.
    pub fn from_json(v: &Value) -> Result<Self> {
        let input = Shape::from_json(json::field(v, "input")?)?;
        let r = json::parse_count(json::field(v, "r")?)?;
        let k = json::parse_count(json::field(v, "k")?)?;
        let n = json::parse_count(json::field(v, "n")?)?;
        let mut plan = lift(
            &input,
            r,
            k,
            &LiftOptions {
                n: Some(n),
                ..LiftOptions::default()
            },
        )?;
        if v.get("n-source").and_then(Value::as_str) == Some("hales-jewett") {
            plan.n_source = NSource::HalesJewett;
        }
        if let Some(stored) = v.get("shape") {
            if Shape::from_json(stored)? != *plan.big_shape()? {
                return Err(Error::InvalidCertificate(
                    "stored lifted shape differs from the rebuilt one".into(),
                ));
            }
        }
        Ok(plan)
    }
}

fn digits(mut idx: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    out
}

/// Build the lift plan. The input is normalized first.
pub fn lift(shape: &Shape, r: usize, k: usize, opts: &LiftOptions) -> Result<LiftPlan> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    let input = normalize_for_lift(shape)?;
    let m = input.m();
    if m == 0 || k >= m {
        return Err(Error::InvalidParameter(format!("need 0 ≤ k < m, got k = {k}, m = {m}")));
    }
    let concordance = concordance_witness(&input)?.ok_or(Error::NotConcordant)?;
    let family_mk = input
        .family_matrices()
        .expect("normalized input is homomorphic")[m - k - 1]
        .clone();
    let (n, n_source) = match opts.n {
        Some(0) => return Err(Error::InvalidParameter("n must be at least 1".into())),
        Some(n) => (n, NSource::Override),
        None => {
            let out = hj_number(family_mk.len() as u32, r, &opts.hj_budget)?;
            match out.n {
                Some(n) => (n, NSource::HalesJewett),
                None => {
                    return Err(Error::Precondition(format!(
                        "HJ({}, {r}) is not computable within budget; supply n",
                        family_mk.len()
                    )))
                }
            }
        }
    };
    if n > 20 {
        return Err(Error::InvalidParameter(format!("word length {n} is too large")));
    }
    let big_c = mul(input.c(), &concordance.b);
    let plan = LiftPlan {
        input,
        r,
        k,
        n,
        n_source,
        concordance,
        family_mk,
        big_c,
        big: OnceLock::new(),
    };
    let bound = plan.total_size_bound();
    if bound > opts.max_maps as u128 {
        return Err(Error::Budget(format!(
            "lifted shape would have up to {bound} maps (limit {})",
            opts.max_maps
        )));
    }
    Ok(plan)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    /// Seed `u_0, …, u_m` of the small configuration.
    pub seed: Vec<Point>,
    pub word: VariableWord,
    /// `A = {i : w_i = ⋆}` and `B = ⟨n⟩ \ A`.
    pub a_set: Vec<usize>,
    pub b_set: Vec<usize>,
    /// Big-set line holding each small line, and which case applied.
    pub placements: Vec<(usize, Placement)>,
    /// Colors of the small set's lines `m-k, …, m`.
    pub line_colors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtractOutcome {
    Success(Extraction),
    /// No monochromatic combinatorial line in `F_{m-k}^n`: the word length
    /// is too small for this coloring.
    NInsufficient,
}

fn flatten(points: &[Point]) -> Vec<BigInt> {
    points.iter().flatten().cloned().collect()
}

fn line_color(line: &[Point], coloring: &dyn Fn(&Point) -> Option<usize>) -> Result<Option<usize>> {
    let mut color = None;
    for p in line {
        let c = coloring(p).ok_or_else(|| {
            Error::Precondition(format!("point {p:?} of the configuration is uncolored"))
        })?;
        match color {
            None => color = Some(c),
            Some(prev) if prev != c => return Ok(None),
            Some(_) => {}
        }
    }
    Ok(color)
}

/// Extract from a coloring of `D(M, H⃗, C; t)` whose last `k` lines are
/// monochromatic a seed `u` with `D(m, F⃗, c; u) ⊆ D(M, H⃗, C; t)` and its
/// last `k+1` lines monochromatic. Both claims are checked line by line.
pub fn extract(
    plan: &LiftPlan,
    t: &[Point],
    coloring: &dyn Fn(&Point) -> Option<usize>,
) -> Result<ExtractOutcome> {
    let big = plan.big_shape()?;
    let big_m = plan.big_m();
    let big_n = plan.big_n();
    let (m, k, mk, n) = (plan.m(), plan.k, plan.mk(), plan.n);
    if t.len() != big_m + 1 {
        return Err(Error::DimensionMismatch(format!(
            "lifted shape takes {} seed points, got {}",
            big_m + 1,
            t.len()
        )));
    }
    let big_set = big.evaluate(t)?;
    for l in big_m + 1 - k..=big_m {
        if line_color(big_set.line(l), coloring)?.is_none() {
            return Err(Error::Precondition(format!("line {l} of the lifted set is not monochromatic")));
        }
    }
    let flat_t = flatten(&t[..big_n]);
    let c_tn = big.c().mul_vec(&t[big_n])?;
    let kk = plan.family_mk.len();
    let total = kk
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Budget("word cube too large".into()))?;
    let mut colors = Vec::with_capacity(total);
    for idx in 0..total {
        let word = digits(idx, kk, n);
        let point = crate::linalg::vec_add(&plan.word_map(&word).mul_vec(&flat_t)?, &c_tn);
        let c = coloring(&point).ok_or_else(|| {
            Error::Precondition(format!("point {point:?} of line N is uncolored"))
        })?;
        colors.push(c as u8);
    }
    let Some(var) = find_mono_line(kk as u32, n, &colors)? else {
        return Ok(ExtractOutcome::NInsufficient);
    };
    let word: Vec<Option<usize>> = var.letters().iter().map(|x| x.map(|a| a as usize - 1)).collect();
    let a_set = var.stars();
    let b_set: Vec<usize> = (0..n).filter(|i| !a_set.contains(i)).collect();
    let all_t = flatten(t);
    let seed: Vec<Point> = plan
        .u_maps(big_m + 1, m + 1, &word)
        .iter()
        .map(|u| u.mul_vec(&all_t))
        .collect::<Result<_>>()?;
    if let Some(index) = seed.iter().position(|p| p.iter().all(Zero::is_zero)) {
        return Err(Error::ZeroSeed { index });
    }
    let small = plan.input.evaluate(&seed)?;
    let a_max = *a_set.last().expect("variable words have a wildcard");
    let mut placements = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let (target, case) = if j > mk {
            (big_m - m + j, Placement::Above)
        } else if j == mk {
            (big_n, Placement::Middle)
        } else {
            (a_max * mk + j, Placement::Below)
        };
        let line: BTreeSet<&Point> = big_set.line(target).iter().collect();
        if let Some(p) = small.line(j).iter().find(|p| !line.contains(p)) {
            return Err(Error::Verification(format!(
                "point {p:?} of small line {j} is not on line {target} of the lifted set"
            )));
        }
        placements.push((target, case));
    }
    let mut line_colors = Vec::with_capacity(k + 1);
    for j in mk..=m {
        match line_color(small.line(j), coloring)? {
            Some(c) => line_colors.push(c),
            None => {
                return Err(Error::Verification(format!(
                    "small line {j} is not monochromatic"
                )))
            }
        }
    }
    Ok(ExtractOutcome::Success(Extraction {
        seed,
        word: var,
        a_set,
        b_set,
        placements,
        line_colors,
    }))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub colorings: u64,
    pub successes: u64,
    pub n_insufficient: u64,
    /// Which placement cases occurred across all successes.
    pub cases: Vec<Placement>,
    /// First coloring (as colors of the sorted point list) that failed.
    pub failure: Option<(Vec<u8>, String)>,
}

/// Run [`extract`] on every `r`-coloring of `D(M, H⃗, C; t)` whose last `k`
/// lines are monochromatic.
pub fn verify_exhaustive(plan: &LiftPlan, t: &[Point]) -> Result<ExhaustiveReport> {
    let big = plan.big_shape()?;
    let set = big.evaluate(t)?;
    let points = set.points().to_vec();
    let r = plan.r as u64;
    let total = r
        .checked_pow(points.len() as u32)
        .filter(|&x| x <= 1 << 22)
        .ok_or_else(|| {
            Error::Budget(format!("{} points: too many colorings", points.len()))
        })?;
    let constrained: Vec<Vec<usize>> = (plan.big_m() + 1 - plan.k..=plan.big_m())
        .map(|l| {
            set.line(l)
                .iter()
                .map(|p| points.binary_search(p).expect("line point in set"))
                .collect()
        })
        .collect();
    let results: Vec<(bool, Option<ExtractOutcome>, Option<String>, Vec<u8>)> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let colors: Vec<u8> = digits(idx as usize, r as usize, points.len())
                .into_iter()
                .map(|c| c as u8)
                .collect();
            let admissible = constrained
                .iter()
                .all(|line| line.iter().all(|&i| colors[i] == colors[line[0]]));
            if !admissible {
                return None;
            }
            let lookup = |p: &Point| points.binary_search(p).ok().map(|i| colors[i] as usize);
            Some(match extract(plan, t, &lookup) {
                Ok(out) => (true, Some(out), None, colors),
                Err(e) => (false, None, Some(e.to_string()), colors),
            })
        })
        .collect();
    let mut report = ExhaustiveReport::default();
    let mut cases = BTreeSet::new();
    for (ok, out, err, colors) in results {
        report.colorings += 1;
        match (ok, out) {
            (true, Some(ExtractOutcome::Success(ex))) => {
                report.successes += 1;
                cases.extend(ex.placements.into_iter().map(|(_, c)| c));
            }
            (true, Some(ExtractOutcome::NInsufficient)) => report.n_insufficient += 1,
            _ => {
                if report.failure.is_none() {
                    report.failure = Some((colors, err.unwrap_or_default()));
                }
            }
        }
    }
    report.cases = cases.into_iter().collect();
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct FullLiftOptions {
    /// Number of lift iterations; defaults to `m·r`.
    pub iterations: Option<usize>,
    /// Word length used by every lift whose HJ number is unavailable.
    pub n: Option<usize>,
    pub max_maps: usize,
}

impl Default for FullLiftOptions {
    fn default() -> Self {
        FullLiftOptions {
            iterations: None,
            n: None,
            max_maps: 250_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FullLift {
    base: Shape,
    r: usize,
    iterations: usize,
    level0: Option<Shape>,
    /// `plans[i-1]` lifts level `i-1` to level `i` with `k = iterations - i`.
    plans: Vec<LiftPlan>,
}

impl FullLift {
    pub fn base(&self) -> &Shape {
        &self.base
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn plans(&self) -> &[LiftPlan] {
        &self.plans
    }

    /// `(n, H⃗⁽⁰⁾, c)`, absent when `r = 1`.
    pub fn level0(&self) -> Option<&Shape> {
        self.level0.as_ref()
    }

    /// The final shape; the input itself when `r = 1`.
    pub fn top(&self) -> Result<&Shape> {
        match self.plans.last() {
            Some(p) => p.big_shape(),
            None => Ok(&self.base),
        }
    }
}

/// `H⁽⁰⁾_j = { (x_0, …, x_{j-1}) ↦ f(x_{i_1}, …, x_{i_ℓ}) : f ∈ F_ℓ, i_1 < … < i_ℓ < j }`.
pub fn level_zero(shape: &Shape, lines: usize) -> Result<Shape> {
    let fams = shape.family_matrices().ok_or_else(|| {
        Error::NotHomomorphism("lifting needs homomorphic families".into())
    })?;
    let d = shape.d();
    let mut families = Vec::with_capacity(lines);
    for j in 1..=lines {
        let mut fam = Vec::new();
        let mut seen = HashSet::new();
        for ell in 1..=j.min(shape.m()) {
            for idx in subsets(j).filter(|s| s.len() == ell) {
                let parts: Vec<IntMatrix> = idx.iter().map(|&i| proj(d, j, i)).collect();
                let select = vstack(&parts, j * d);
                for f in &fams[ell - 1] {
                    let g = mul(f, &select);
                    if seen.insert(g.clone()) {
                        fam.push(PolyMap::from_matrix(&g));
                    }
                }
            }
        }
        families.push(fam);
    }
    Shape::new(d, shape.c().clone(), families)
}

/// Iterate the lift from `(n, H⃗⁽⁰⁾, c)` with `k = n-1, …, 0`.
pub fn full_lift(shape: &Shape, r: usize, opts: &FullLiftOptions) -> Result<FullLift> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be positive".into()));
    }
    if r == 1 {
        return Ok(FullLift {
            base: shape.clone(),
            r,
            iterations: 0,
            level0: None,
            plans: Vec::new(),
        });
    }
    let normalized = normalize_for_lift(shape)?;
    let iterations = opts.iterations.unwrap_or(shape.m() * r);
    if iterations == 0 {
        return Err(Error::InvalidParameter("iterations must be positive".into()));
    }
    let level0 = level_zero(&normalized, iterations)?;
    let mut plans: Vec<LiftPlan> = Vec::with_capacity(iterations);
    for i in 1..=iterations {
        let k = iterations - i;
        let current = match plans.last() {
            Some(p) => p.big_shape()?.clone(),
            None => level0.clone(),
        };
        let try_hj = LiftOptions {
            n: None,
            max_maps: opts.max_maps,
            ..LiftOptions::default()
        };
        let plan = match lift(&current, r, k, &try_hj) {
            Ok(p) => p,
            Err(Error::Precondition(_)) if opts.n.is_some() => lift(
                &current,
                r,
                k,
                &LiftOptions {
                    n: opts.n,
                    max_maps: opts.max_maps,
                    ..LiftOptions::default()
                },
            )?,
            Err(e) => return Err(e),
        };
        plan.big_shape()?;
        plans.push(plan);
    }
    Ok(FullLift {
        base: shape.clone(),
        r,
        iterations,
        level0: Some(level0),
        plans,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FullExtractOutcome {
    /// Seed of a monochromatic copy of the input configuration, and the
    /// level-zero lines it was read from.
    Success { seed: Vec<Point>, color: usize, lines: Vec<usize> },
    /// The lift at this level had too short a word length.
    NInsufficient { level: usize },
    /// Fewer than `m+1` level-zero lines share a color.
    PigeonholeFailed { line_colors: Vec<usize> },
}

/// Peel the levels off a coloring of a top-level configuration, then read
/// a monochromatic copy of the base configuration off the level-zero lines.
pub fn full_extract(
    fl: &FullLift,
    t: &[Point],
    coloring: &dyn Fn(&Point) -> Option<usize>,
) -> Result<FullExtractOutcome> {
    let m = fl.base.m();
    if fl.plans.is_empty() {
        let set = fl.base.evaluate(t)?;
        return match line_color(set.points(), coloring)? {
            Some(color) => Ok(FullExtractOutcome::Success {
                seed: t.to_vec(),
                color,
                lines: (0..=m).collect(),
            }),
            None => Err(Error::Verification("one color but not monochromatic".into())),
        };
    }
    let mut seed = t.to_vec();
    for (idx, plan) in fl.plans.iter().enumerate().rev() {
        match extract(plan, &seed, coloring)? {
            ExtractOutcome::Success(ex) => seed = ex.seed,
            ExtractOutcome::NInsufficient => {
                return Ok(FullExtractOutcome::NInsufficient { level: idx + 1 })
            }
        }
    }
    let level0 = fl.level0.as_ref().expect("present when r > 1");
    let zero_set = level0.evaluate(&seed)?;
    let mut line_colors = Vec::with_capacity(level0.m() + 1);
    for j in 0..=level0.m() {
        match line_color(zero_set.line(j), coloring)? {
            Some(c) => line_colors.push(c),
            None => {
                return Err(Error::Verification(format!(
                    "level-zero line {j} is not monochromatic"
                )))
            }
        }
    }
    let Some(color) = (0..fl.r).find(|&c| line_colors.iter().filter(|&&x| x == c).count() > m) else {
        return Ok(FullExtractOutcome::PigeonholeFailed { line_colors });
    };
    let lines: Vec<usize> = (0..line_colors.len())
        .filter(|&j| line_colors[j] == color)
        .take(m + 1)
        .collect();
    let s: Vec<Point> = lines.iter().map(|&l| seed[l].clone()).collect();
    let small = fl.base.evaluate(&s)?;
    for j in 0..=m {
        let target: BTreeSet<&Point> = zero_set.line(lines[j]).iter().collect();
        if let Some(p) = small.line(j).iter().find(|p| !target.contains(p)) {
            return Err(Error::Verification(format!(
                "point {p:?} of line {j} is not on level-zero line {}",
                lines[j]
            )));
        }
    }
    if line_color(small.points(), coloring)? != Some(color) {
        return Err(Error::Verification("extracted configuration is not monochromatic".into()));
    }
    Ok(FullExtractOutcome::Success { seed: s, color, lines })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyMap;

    fn b(x: i64) -> BigInt {
        x.into()
    }

    fn scalars(v: &[i64]) -> Vec<Point> {
        v.iter().map(|&x| vec![b(x)]).collect()
    }

    fn zero_id() -> Shape {
        let fam = vec![PolyMap::zero(1, 1), PolyMap::projection(1, 1, 0)];
        Shape::new(1, IntMatrix::identity(1), vec![fam]).unwrap()
    }

    #[test]
    fn one_line_example_sizes() {
        let plan = lift(&zero_id(), 2, 0, &LiftOptions::default()).unwrap();
        assert_eq!(plan.n(), 2);
        assert_eq!(plan.n_source(), NSource::HalesJewett);
        assert_eq!((plan.big_n(), plan.big_m()), (2, 2));
        assert_eq!(plan.big_c(), &IntMatrix::identity(1));
        let big = plan.big_shape().unwrap();
        assert_eq!(big.family_sizes(), vec![2, 4]);
        let set = big.evaluate(&scalars(&[1, 2, 4])).unwrap();
        assert_eq!(set.points(), &scalars(&[1, 2, 3, 4, 5, 6, 7])[..]);
    }

    #[test]
    fn constant_coloring_extracts_everything() {
        let plan = lift(&zero_id(), 2, 0, &LiftOptions::default()).unwrap();
        let t = scalars(&[1, 2, 4]);
        let out = extract(&plan, &t, &|_| Some(0)).unwrap();
        let ExtractOutcome::Success(ex) = out else { panic!() };
        assert_eq!(ex.a_set, vec![0, 1]);
        assert_eq!(ex.seed, scalars(&[3, 4]));
        assert_eq!(ex.placements, vec![(1, Placement::Below), (2, Placement::Middle)]);
    }

    #[test]
    fn all_colorings_of_one_seed() {
        let plan = lift(&zero_id(), 2, 0, &LiftOptions::default()).unwrap();
        let rep = verify_exhaustive(&plan, &scalars(&[1, 2, 4])).unwrap();
        assert_eq!(rep.colorings, 128);
        assert_eq!(rep.successes, 128);
        assert_eq!(rep.failure, None);
    }

    #[test]
    fn scalar_c_gives_scalar_big_c() {
        let fam = vec![PolyMap::projection(1, 1, 0)];
        let shape = Shape::new(1, IntMatrix::scalar(1, b(3)), vec![fam]).unwrap();
        let plan = lift(&shape, 2, 0, &LiftOptions::default()).unwrap();
        assert_eq!(plan.big_c(), &IntMatrix::scalar(1, b(9)));
        assert!(concordance_witness(plan.big_shape().unwrap()).unwrap().is_some());
    }

    #[test]
    fn k_equals_m_minus_one_with_single_letter() {
        // F_1 normalizes to {0, id}; with k = m-1 = 1 the alphabet is F_1
        let shape = Shape::new(
            1,
            IntMatrix::identity(1),
            vec![vec![PolyMap::zero(1, 1)], vec![PolyMap::zero(2, 1)]],
        )
        .unwrap();
        let plan = lift(&shape, 2, 1, &LiftOptions::default()).unwrap();
        assert_eq!(plan.alphabet().len(), 2);
        assert_eq!(plan.big_m(), plan.big_n() + 1);
    }

    #[test]
    fn above_case_with_k_one() {
        let shape = Shape::new(
            1,
            IntMatrix::identity(1),
            vec![vec![PolyMap::zero(1, 1)], vec![PolyMap::zero(2, 1)]],
        )
        .unwrap();
        let plan = lift(&shape, 2, 1, &LiftOptions::default()).unwrap();
        let t = scalars(&[1, 2, 4, 8]);
        let rep = verify_exhaustive(&plan, &t).unwrap();
        assert_eq!(rep.failure, None);
        assert_eq!(rep.successes, rep.colorings);
        assert!(rep.cases.contains(&Placement::Above));
    }

    #[test]
    fn short_words_report_insufficient() {
        let plan = lift(
            &zero_id(),
            2,
            0,
            &LiftOptions {
                n: Some(1),
                ..LiftOptions::default()
            },
        )
        .unwrap();
        let t = scalars(&[1, 2]);
        // line N = {t1, t0 + t1}; color them apart
        let col = |p: &Point| Some(if p[0] == b(3) { 1 } else { 0 });
        assert_eq!(extract(&plan, &t, &col).unwrap(), ExtractOutcome::NInsufficient);
    }

    #[test]
    fn precondition_on_last_lines() {
        let shape = Shape::new(
            1,
            IntMatrix::identity(1),
            vec![vec![PolyMap::zero(1, 1)], vec![PolyMap::zero(2, 1)]],
        )
        .unwrap();
        let plan = lift(&shape, 2, 1, &LiftOptions::default()).unwrap();
        let t = scalars(&[1, 2, 4, 8]);
        let col = |p: &Point| Some(if p[0] == b(8) { 1 } else { 0 });
        assert!(matches!(extract(&plan, &t, &col), Err(Error::Precondition(_))));
    }

    #[test]
    fn single_color_full_lift_is_identity() {
        let fl = full_lift(&zero_id(), 1, &FullLiftOptions::default()).unwrap();
        assert_eq!(fl.top().unwrap(), &zero_id());
    }

    #[test]
    fn level_zero_members() {
        let l0 = level_zero(&normalize_for_lift(&zero_id()).unwrap(), 2).unwrap();
        assert_eq!(l0.family_sizes(), vec![2, 3]);
    }

    fn all_outcomes(fl: &FullLift, t: &[Point]) -> (u32, u32, u32) {
        let set = fl.top().unwrap().evaluate(t).unwrap();
        let points = set.points().to_vec();
        let (mut ok, mut short, mut split) = (0, 0, 0);
        for mask in 0u64..1 << points.len() {
            let col = |p: &Point| points.binary_search(p).ok().map(|i| (mask >> i & 1) as usize);
            match full_extract(fl, t, &col).unwrap() {
                FullExtractOutcome::Success { .. } => ok += 1,
                FullExtractOutcome::NInsufficient { .. } => short += 1,
                FullExtractOutcome::PigeonholeFailed { .. } => split += 1,
            }
        }
        (ok, short, split)
    }

    #[test]
    fn one_iteration_can_miss_pigeonhole() {
        let fl = full_lift(
            &zero_id(),
            2,
            &FullLiftOptions {
                iterations: Some(1),
                ..FullLiftOptions::default()
            },
        )
        .unwrap();
        let (ok, short, split) = all_outcomes(&fl, &scalars(&[1, 2, 4]));
        assert_eq!(short, 0);
        assert!(split > 0 && ok > 0);
    }

    #[test]
    fn two_iterations_never_fail_verification() {
        use rand::{Rng, SeedableRng};
        let fl = full_lift(
            &zero_id(),
            2,
            &FullLiftOptions {
                n: Some(2),
                ..FullLiftOptions::default()
            },
        )
        .unwrap();
        assert_eq!(fl.iterations(), 2);
        assert_eq!(fl.plans()[0].n_source(), NSource::HalesJewett);
        assert_eq!(fl.plans()[1].n_source(), NSource::Override);
        let top = fl.top().unwrap();
        let t: Vec<Point> = (0..=top.m()).map(|i| vec![b(1 << i)]).collect();
        let points = top.evaluate(&t).unwrap().points().to_vec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut ok = 0;
        for _ in 0..200 {
            let colors: Vec<usize> = (0..points.len()).map(|_| rng.gen_range(0..2)).collect();
            let col = |p: &Point| points.binary_search(p).ok().map(|i| colors[i]);
            match full_extract(&fl, &t, &col).unwrap() {
                FullExtractOutcome::Success { .. } => ok += 1,
                FullExtractOutcome::NInsufficient { .. } => {}
                FullExtractOutcome::PigeonholeFailed { .. } => panic!("pigeonhole with m·r lines"),
            }
        }
        assert!(ok > 0);
        let parity = |p: &Point| Some(if p[0].bit(0) { 1 } else { 0 });
        assert!(!matches!(
            full_extract(&fl, &t, &parity).unwrap(),
            FullExtractOutcome::PigeonholeFailed { .. }
        ));
    }

    #[test]
    fn k_one_uses_every_placement() {
        let shape = Shape::new(
            1,
            IntMatrix::identity(1),
            vec![vec![PolyMap::zero(1, 1)], vec![PolyMap::zero(2, 1)]],
        )
        .unwrap();
        let plan = lift(&shape, 2, 1, &LiftOptions::default()).unwrap();
        let rep = verify_exhaustive(&plan, &scalars(&[1, 2, 4, 8])).unwrap();
        assert_eq!(rep.cases, vec![Placement::Below, Placement::Middle, Placement::Above]);
    }

    #[test]
    fn plan_json_round_trip() {
        let plan = lift(&zero_id(), 2, 0, &LiftOptions::default()).unwrap();
        let doc = plan.to_json().unwrap();
        let back = LiftPlan::from_json(&doc).unwrap();
        assert_eq!(back.big_shape().unwrap(), plan.big_shape().unwrap());
        assert_eq!(back.n(), 2);
    }
}
