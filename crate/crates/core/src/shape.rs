//! Shapes `(m, F⃗, c)` over `Z^d` and the point sets they generate.
//!
//! A shape carries `m` finite families of polynomial maps, the `j`-th
//! family acting on `j` arguments from `Z^d`, together with an integer
//! endomorphism `c` of `Z^d`. A seed `s = (s_0, …, s_m)` generates the set
//!
//! ```text
//! line 0:  c(s_0)
//! line k:  f(s_0, …, s_{k-1}) + c(s_k)      for f ∈ F_k
//! ```
//!
//! Maps of arity `j` see their arguments flattened: coordinate `q` of
//! argument `i` is input variable `i·d + q`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{self, solve_integer_linear, IntMatrix};
use crate::poly::{PolyMap, Polynomial};

/// A point of `Z^d`.
pub type Point = Vec<BigInt>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    d: usize,
    c: IntMatrix,
    families: Vec<Vec<PolyMap>>,
}

impl Shape {
    /// `families[j-1]` is `F_j`. Duplicate maps inside a family are removed,
    /// keeping the first occurrence.
    pub fn new(d: usize, c: IntMatrix, families: Vec<Vec<PolyMap>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if c.rows() != d || c.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "endomorphism is {}x{}, expected {d}x{d}",
                c.rows(),
                c.cols()
            )));
        }
        let mut clean = Vec::with_capacity(families.len());
        for (idx, family) in families.into_iter().enumerate() {
            let j = idx + 1;
            for f in &family {
                if f.inputs() != j * d || f.outputs() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "member of F_{j} maps Z^{} -> Z^{}, expected Z^{} -> Z^{d}",
                        f.inputs(),
                        f.outputs(),
                        j * d
                    )));
                }
            }
            clean.push(dedup(family));
        }
        Ok(Shape {
            d,
            c,
            families: clean,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.families.len()
    }

    pub fn c(&self) -> &IntMatrix {
        &self.c
    }

    pub fn families(&self) -> &[Vec<PolyMap>] {
        &self.families
    }

    /// `F_j` for `1 ≤ j ≤ m`.
    pub fn family(&self, j: usize) -> &[PolyMap] {
        &self.families[j - 1]
    }

    pub fn family_sizes(&self) -> Vec<usize> {
        self.families.iter().map(Vec::len).collect()
    }

    /// Upper bound `1 + Σ|F_j|` on the size of a generated set.
    pub fn max_points(&self) -> usize {
        1 + self.families.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_homomorphic(&self) -> bool {
        self.families.iter().flatten().all(PolyMap::is_homomorphism)
    }

    /// Member matrices, `None` when some member is not linear.
    pub fn family_matrices(&self) -> Option<Vec<Vec<IntMatrix>>> {
        self.families
            .iter()
            .map(|fam| fam.iter().map(PolyMap::to_matrix).collect())
            .collect()
    }

    fn require_homomorphic(&self) -> Result<Vec<Vec<IntMatrix>>> {
        self.family_matrices().ok_or_else(|| {
            Error::NotHomomorphism("shape has a non-linear family member".into())
        })
    }

    /// Evaluate the lines for an arbitrary seed tuple. Unlike
    /// [`generate`] this does not insist on nonzero seeds.
    pub fn evaluate(&self, seeds: &[Point]) -> Result<ConfigSet> {
        if seeds.len() != self.m() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "shape has m = {}, seed has {} points",
                self.m(),
                seeds.len()
            )));
        }
        if let Some(bad) = seeds.iter().find(|s| s.len() != self.d) {
            return Err(Error::DimensionMismatch(format!(
                "seed point of dimension {}, expected {}",
                bad.len(),
                self.d
            )));
        }
        let images: Vec<Point> = seeds
            .iter()
            .map(|s| self.c.mul_vec(s).expect("dimensions checked"))
            .collect();
        let mut lines = Vec::with_capacity(self.m() + 1);
        lines.push(vec![images[0].clone()]);
        let mut prefix: Vec<BigInt> = Vec::with_capacity(self.m() * self.d);
        for k in 1..=self.m() {
            prefix.extend_from_slice(&seeds[k - 1]);
            let line = self
                .family(k)
                .iter()
                .map(|f| linalg::vec_add(&f.eval(&prefix), &images[k]))
                .collect();
            lines.push(line);
        }
        Ok(ConfigSet::from_lines(lines))
    }

    pub fn to_json(&self) -> Value {
        let families: Vec<Value> = self
            .families
            .iter()
            .map(|fam| Value::Array(fam.iter().map(|f| map_to_json(f, self.d)).collect()))
            .collect();
        json!({
            "d": json::count(self.d),
            "m": json::count(self.m()),
            "c": json::ints(self.c.data()),
            "families": families,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let d = json::parse_count(json::field(v, "d")?)?;
        let c = IntMatrix::new(d, d, json::parse_ints(json::field(v, "c")?)?)?;
        let fams = json::as_array(json::field(v, "families")?, "families")?;
        if let Some(m) = v.get("m") {
            let m = json::parse_count(m)?;
            if m != fams.len() {
                return Err(Error::Format(format!(
                    "m = {m} but {} families given",
                    fams.len()
                )));
            }
        }
        let mut families = Vec::with_capacity(fams.len());
        for (idx, fam) in fams.iter().enumerate() {
            let inputs = (idx + 1) * d;
            let members = json::as_array(fam, "family")?
                .iter()
                .map(|f| map_from_json(f, inputs, d))
                .collect::<Result<Vec<_>>>()?;
            families.push(members);
        }
        Shape::new(d, c, families)
    }

    /// SHA-256 of the canonical JSON rendering.
    pub fn content_hash(&self) -> String {
        json::content_hash(&self.to_json())
    }
}

fn dedup(family: Vec<PolyMap>) -> Vec<PolyMap> {
    let mut seen = BTreeSet::new();
    family
        .into_iter()
        .filter(|f| seen.insert(f.clone()))
        .collect()
}

fn monomials_json(p: &Polynomial) -> Value {
    Value::Array(
        p.terms()
            .iter()
            .map(|(exps, coeff)| {
                let mut row: Vec<Value> = exps.iter().map(|&e| json::count(e as usize)).collect();
                row.push(json::int(coeff));
                Value::Array(row)
            })
            .collect(),
    )
}

fn map_to_json(f: &PolyMap, d: usize) -> Value {
    if d == 1 {
        json!({ "monomials": monomials_json(&f.coords()[0]) })
    } else {
        let coords: Vec<Value> = f
            .coords()
            .iter()
            .map(|p| json!({ "monomials": monomials_json(p) }))
            .collect();
        json!({ "coords": coords })
    }
}

fn polynomial_from_json(v: &Value, inputs: usize) -> Result<Polynomial> {
    let rows = json::as_array(json::field(v, "monomials")?, "monomials")?;
    let mut terms = Vec::with_capacity(rows.len());
    for row in rows {
        let row = json::as_array(row, "monomial")?;
        if row.len() != inputs + 1 {
            return Err(Error::Format(format!(
                "monomial needs {inputs} exponents and a coefficient, got {} entries",
                row.len()
            )));
        }
        let exps = row[..inputs]
            .iter()
            .map(|e| {
                json::parse_count(e).and_then(|e| {
                    u32::try_from(e).map_err(|_| Error::Format("exponent too large".into()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push((exps, json::parse_int(&row[inputs])?));
    }
    Polynomial::new(inputs, terms)
}

fn map_from_json(v: &Value, inputs: usize, d: usize) -> Result<PolyMap> {
    let coords = if let Some(coords) = v.get("coords") {
        json::as_array(coords, "coords")?
            .iter()
            .map(|p| polynomial_from_json(p, inputs))
            .collect::<Result<Vec<_>>>()?
    } else if d == 1 {
        vec![polynomial_from_json(v, inputs)?]
    } else {
        return Err(Error::Format(
            "maps into Z^d with d > 1 need a `coords` list".into(),
        ));
    };
    if coords.len() != d {
        return Err(Error::Format(format!(
            "map has {} coordinates, expected {d}",
            coords.len()
        )));
    }
    PolyMap::new(inputs, coords)
}

/// A seed `(s_0, …, s_m)` with every `s_i ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedVector(Vec<Point>);

impl SeedVector {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if let Some(index) = points.iter().position(|p| p.iter().all(Zero::is_zero)) {
            return Err(Error::ZeroSeed { index });
        }
        Ok(SeedVector(points))
    }

    /// One-dimensional seed from machine integers.
    pub fn scalars(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![BigInt::from(v)]).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.0
    }

    pub fn into_points(self) -> Vec<Point> {
        self.0
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(|p| json::ints(p)).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let pts = json::as_array(v, "seed")?
            .iter()
            .map(json::parse_ints)
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }
}

/// The lines of a generated set plus their deduplicated union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigSet {
    lines: Vec<Vec<Point>>,
    points: Vec<Point>,
}

impl ConfigSet {
    fn from_lines(lines: Vec<Vec<Point>>) -> Self {
        let points: BTreeSet<Point> = lines.iter().flatten().cloned().collect();
        ConfigSet {
            lines,
            points: points.into_iter().collect(),
        }
    }

    pub fn lines(&self) -> &[Vec<Point>] {
        &self.lines
    }

    pub fn line(&self, k: usize) -> &[Point] {
        &self.lines[k]
    }

    /// Sorted, deduplicated union of the lines.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn is_subset_of(&self, other: &ConfigSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    /// Total number of generated terms, repeats included.
    pub fn term_count(&self) -> usize {
        self.lines.iter().map(Vec::len).sum()
    }

    /// Pairs of `(line, member)` positions that produced the same point.
    pub fn collisions(&self) -> Vec<((usize, usize), (usize, usize))> {
        let positions: Vec<((usize, usize), &Point)> = self
            .lines
            .iter()
            .enumerate()
            .flat_map(|(k, line)| line.iter().enumerate().map(move |(i, p)| ((k, i), p)))
            .collect();
        let mut out = Vec::new();
        for (a, (pa, xa)) in positions.iter().enumerate() {
            for (pb, xb) in &positions[a + 1..] {
                if xa == xb {
                    out.push((*pa, *pb));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let lines: Vec<Value> = self
            .lines
            .iter()
            .map(|l| Value::Array(l.iter().map(|p| json::ints(p)).collect()))
            .collect();
        json!({
            "lines": lines,
            "points": Value::Array(self.points.iter().map(|p| json::ints(p)).collect()),
        })
    }
}

/// The generated set `D(m, F⃗, c; s)`.
pub fn generate(shape: &Shape, seed: &SeedVector) -> Result<ConfigSet> {
    shape.evaluate(seed.points())
}

/// The shape of Deuber's `(m, p, c)`-sets in `Z`: `c̃ = c·id` and `F_j` holds
/// every `x ↦ ⟨x, ξ⟩` with `ξ ∈ {-p, …, p}^j`, listed lexicographically.
pub fn from_mpc(m: usize, p: i64, c: i64) -> Result<Shape> {
    if m == 0 || p <= 0 || c <= 0 {
        return Err(Error::InvalidParameter(format!(
            "(m, p, c) = ({m}, {p}, {c}) must all be positive"
        )));
    }
    let width = (2 * p + 1) as usize;
    let mut families = Vec::with_capacity(m);
    for j in 1..=m {
        let count = width.pow(j as u32);
        let mut fam = Vec::with_capacity(count);
        for mut idx in 0..count {
            let mut xi = vec![BigInt::zero(); j];
            for slot in xi.iter_mut().rev() {
                *slot = BigInt::from((idx % width) as i64 - p);
                idx /= width;
            }
            fam.push(PolyMap::from_matrix(&IntMatrix::new(1, j, xi)?));
        }
        families.push(fam);
    }
    Shape::new(1, IntMatrix::scalar(1, BigInt::from(c)), families)
}

/// The combined shape of two homomorphic shapes with commuting
/// endomorphisms: `c = c₁∘c₂` and `F_n = {f∘c₂ : f ∈ F_n¹} ∪ {f∘c₁ : f ∈ F_n²}`,
/// where `f∘c` applies `c` to every argument. Generated sets of the inputs
/// embed into those of the join via the seeds `c₂(s)` and `c₁(s)`.
pub fn join(first: &Shape, second: &Shape) -> Result<Shape> {
    if first.d != second.d {
        return Err(Error::DimensionMismatch(format!(
            "joining shapes over Z^{} and Z^{}",
            first.d, second.d
        )));
    }
    let c1 = &first.c;
    let c2 = &second.c;
    if c1.mul(c2)? != c2.mul(c1)? {
        return Err(Error::NonCommuting);
    }
    let f1 = first.require_homomorphic()?;
    let f2 = second.require_homomorphic()?;
    let m = first.m().max(second.m());
    let mut families = Vec::with_capacity(m);
    for n in 1..=m {
        let mut fam = Vec::new();
        if let Some(maps) = f1.get(n - 1) {
            let lift = IntMatrix::block_diag(c2, n);
            for f in maps {
                fam.push(PolyMap::from_matrix(&f.mul(&lift)?));
            }
        }
        if let Some(maps) = f2.get(n - 1) {
            let lift = IntMatrix::block_diag(c1, n);
            for f in maps {
                fam.push(PolyMap::from_matrix(&f.mul(&lift)?));
            }
        }
        families.push(fam);
    }
    Shape::new(first.d, c1.mul(c2)?, families)
}

/// Witnesses for `c∘a_f = f∘b` (with `b` applied to every argument).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Concordance {
    pub b: IntMatrix,
    /// `a[j-1][i]` is `a_f` for the `i`-th member of `F_j`.
    pub a: Vec<Vec<IntMatrix>>,
}

impl Concordance {
    /// Recheck every identity exactly. `b` must be nonzero.
    pub fn verify(&self, shape: &Shape) -> Result<bool> {
        if self.b.is_zero() {
            return Ok(false);
        }
        let fams = shape.require_homomorphic()?;
        if self.a.len() != fams.len() {
            return Ok(false);
        }
        for (idx, (fam, wit)) in fams.iter().zip(&self.a).enumerate() {
            if fam.len() != wit.len() {
                return Ok(false);
            }
            let bold = IntMatrix::block_diag(&self.b, idx + 1);
            for (f, a) in fam.iter().zip(wit) {
                if shape.c.mul(a)? != f.mul(&bold)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Value {
        let a: Vec<Value> = self
            .a
            .iter()
            .map(|fam| Value::Array(fam.iter().map(json::matrix).collect()))
            .collect();
        json!({ "b": json::matrix(&self.b), "a": a })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let b = json::parse_matrix(json::field(v, "b")?)?;
        let a = json::as_array(json::field(v, "a")?, "a")?
            .iter()
            .map(|fam| {
                json::as_array(fam, "a family")?
                    .iter()
                    .map(json::parse_matrix)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Concordance { b, a })
    }
}

/// Try `b = c` (identity or scalar `c`) and then `b = id`, solving
/// `c·a_f = f` over the integers member by member.
pub fn concordance_witness(shape: &Shape) -> Result<Option<Concordance>> {
    let fams = shape.require_homomorphic()?;
    let c = &shape.c;
    let d = shape.d;
    if let Some(lambda) = c.scalar_value() {
        if !lambda.is_zero() {
            let b = if lambda.is_one() {
                IntMatrix::identity(d)
            } else {
                c.clone()
            };
            return Ok(Some(Concordance { b, a: fams }));
        }
    }
    let mut a = Vec::with_capacity(fams.len());
    for fam in &fams {
        let mut wit = Vec::with_capacity(fam.len());
        for f in fam {
            if &c.mul(f)? == f {
                wit.push(f.clone());
                continue;
            }
            let mut sol = IntMatrix::zeros(d, f.cols());
            for col in 0..f.cols() {
                let Some(x) = solve_integer_linear(c, &f.column(col))? else {
                    return Ok(None);
                };
                for (row, v) in x.into_iter().enumerate() {
                    sol[(row, col)] = v;
                }
            }
            wit.push(sol);
        }
        a.push(wit);
    }
    Ok(Some(Concordance {
        b: IntMatrix::identity(d),
        a,
    }))
}

/// Close every family under the operations the lift construction assumes:
/// `F_i` gains the zero map, the projections `π_0, …, π_{i-1}` and every
/// `(x_0, …, x_{i-1}) ↦ f(x_0, …, x_{j-1})` with `f ∈ F_j`, `j < i`.
/// Original members keep their positions; the result is idempotent.
pub fn normalize_for_lift(shape: &Shape) -> Result<Shape> {
    let fams = shape.require_homomorphic()?;
    let d = shape.d;
    let mut out: Vec<Vec<IntMatrix>> = Vec::with_capacity(fams.len());
    for (idx, fam) in fams.iter().enumerate() {
        let i = idx + 1;
        let mut members = fam.clone();
        members.push(IntMatrix::zeros(d, i * d));
        for j in 0..i {
            members.push(
                PolyMap::projection(i, d, j)
                    .to_matrix()
                    .expect("projections are linear"),
            );
        }
        for lower in &out {
            for f in lower {
                members.push(pad_columns(f, i * d));
            }
        }
        out.push(members);
    }
    let families = out
        .into_iter()
        .map(|fam| fam.iter().map(PolyMap::from_matrix).collect())
        .collect();
    Shape::new(d, shape.c.clone(), families)
}

/// Treat `f: G^j -> G` as a map on `G^i` ignoring the trailing arguments.
pub(crate) fn pad_columns(f: &IntMatrix, cols: usize) -> IntMatrix {
    let mut out = IntMatrix::zeros(f.rows(), cols);
    for r in 0..f.rows() {
        for c in 0..f.cols() {
            out[(r, c)] = f[(r, c)].clone();
        }
    }
    out
}

/// A shape together with an optional selection of `(line, member)`
/// positions. The configuration for a seed is the set of selected points,
/// or the whole generated set when nothing is selected. This is how linear
/// configurations such as `{a, a+d, a+2d}` that omit `c(s_0)` are searched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    shape: Shape,
    select: Option<Vec<(usize, usize)>>,
}

impl Pattern {
    pub fn whole(shape: Shape) -> Self {
        Pattern {
            shape,
            select: None,
        }
    }

    pub fn with_selection(shape: Shape, select: Vec<(usize, usize)>) -> Result<Self> {
        if select.is_empty() {
            return Err(Error::Empty("selection".into()));
        }
        for &(line, member) in &select {
            let size = match line {
                0 => 1,
                l if l <= shape.m() => shape.family(l).len(),
                _ => 0,
            };
            if member >= size {
                return Err(Error::InvalidParameter(format!(
                    "selection ({line}, {member}) is out of range"
                )));
            }
        }
        Ok(Pattern {
            shape,
            select: Some(select),
        })
    }

    /// One-dimensional linear configuration given by the rows of `rows`:
    /// every row must read `(ξ_0, …, ξ_{t-1}, c, 0, …, 0)`, which is the
    /// point `ξ·(s_0..s_{t-1}) + c·s_t` on line `t`.
    pub fn from_rows(rows: &IntMatrix, c: &BigInt) -> Result<Self> {
        if rows.cols() == 0 || rows.rows() == 0 {
            return Err(Error::Empty("row matrix".into()));
        }
        if c.is_zero() {
            return Err(Error::InvalidParameter("c must be nonzero".into()));
        }
        let m = rows.cols() - 1;
        let mut families: Vec<Vec<PolyMap>> = vec![Vec::new(); m];
        let mut select = Vec::with_capacity(rows.rows());
        for r in 0..rows.rows() {
            let row = rows.row(r);
            let t = row
                .iter()
                .rposition(|x| !x.is_zero())
                .ok_or_else(|| Error::InvalidParameter(format!("row {r} is zero")))?;
            if &row[t] != c {
                return Err(Error::InvalidParameter(format!(
                    "row {r} ends in {} rather than c = {c}",
                    row[t]
                )));
            }
            if t == 0 {
                select.push((0, 0));
                continue;
            }
            let f = PolyMap::from_matrix(&IntMatrix::new(1, t, row[..t].to_vec())?);
            let fam = &mut families[t - 1];
            let idx = fam.iter().position(|g| g == &f).unwrap_or_else(|| {
                fam.push(f);
                fam.len() - 1
            });
            select.push((t, idx));
        }
        let shape = Shape::new(1, IntMatrix::scalar(1, c.clone()), families)?;
        // every line represented and line 0 selected: the selection is the whole set
        let covers_all = (0..=m).all(|t| match t {
            0 => select.contains(&(0, 0)),
            t => (0..shape.family(t).len()).all(|i| select.contains(&(t, i))),
        });
        if covers_all {
            Ok(Pattern::whole(shape))
        } else {
            Pattern::with_selection(shape, select)
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn selection(&self) -> Option<&[(usize, usize)]> {
        self.select.as_deref()
    }

    /// Number of configuration terms, repeats included.
    pub fn term_count(&self) -> usize {
        match &self.select {
            Some(sel) => sel.len(),
            None => self.shape.max_points(),
        }
    }

    /// The sorted, deduplicated configuration generated by `seeds`.
    pub fn points(&self, seeds: &[Point]) -> Result<Vec<Point>> {
        let set = self.shape.evaluate(seeds)?;
        Ok(match &self.select {
            None => set.points().to_vec(),
            Some(sel) => {
                let chosen: BTreeSet<Point> = sel
                    .iter()
                    .map(|&(line, member)| set.line(line)[member].clone())
                    .collect();
                chosen.into_iter().collect()
            }
        })
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("shape".into(), self.shape.to_json());
        if let Some(sel) = &self.select {
            obj.insert(
                "select".into(),
                Value::Array(sel.iter().map(|&(l, i)| json::counts(&[l, i])).collect()),
            );
        }
        Value::Object(obj)
    }

    /// Accepts a pattern document or a bare shape document.
    pub fn from_json(v: &Value) -> Result<Self> {
        let Some(shape) = v.get("shape") else {
            return Ok(Pattern::whole(Shape::from_json(v)?));
        };
        let shape = Shape::from_json(shape)?;
        match v.get("select") {
            None | Some(Value::Null) => Ok(Pattern::whole(shape)),
            Some(sel) => {
                let select = json::as_array(sel, "select")?
                    .iter()
                    .map(|pair| {
                        let pair = json::parse_counts(pair)?;
                        match pair[..] {
                            [l, i] => Ok((l, i)),
                            _ => Err(Error::Format("selection entries are pairs".into())),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Pattern::with_selection(shape, select)
            }
        }
    }

    pub fn content_hash(&self) -> String {
        json::content_hash(&self.to_json())
    }
}
