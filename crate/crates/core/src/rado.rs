//! Rado's columns condition, its endomorphism generalization over `Z^d`,
//! and the reduction of a columns-condition certificate to a matrix `B`
//! whose rows evaluate inside an `(m, p, c)`-set.
//!
//! Block searches enumerate ordered set partitions of the columns. The
//! first block ranges over nonempty column subsets (by size, then
//! lexicographically); later blocks extend the set of columns chosen so
//! far. Dead ends are memoised on the chosen set.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json;
use crate::linalg::{self, denominator_lcm, in_span, index_of_image, IntMatrix, Rat};
use crate::shape::Pattern;

/// Ordered blocking of the columns of `A` witnessing the columns condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnsCertificate {
    /// Column indices (0-based) block by block.
    pub blocks: Vec<Vec<usize>>,
    /// `coefficients[t-1][k]` multiplies column `permutation()[k]` in the
    /// expansion of block `t`'s sum over the earlier columns.
    pub coefficients: Vec<Vec<Rat>>,
}

impl ColumnsCertificate {
    pub fn permutation(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    /// Number of blocks minus one.
    pub fn m(&self) -> usize {
        self.blocks.len().saturating_sub(1)
    }

    /// Re-check the certificate against `a` with exact arithmetic.
    pub fn verify(&self, a: &IntMatrix) -> Result<bool> {
        let perm = self.permutation();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if sorted != (0..a.cols()).collect::<Vec<_>>() {
            return Ok(false);
        }
        if self.blocks.iter().any(Vec::is_empty) || self.coefficients.len() != self.m() {
            return Ok(false);
        }
        let cols = rat_columns(a);
        if !block_sum(&cols, &self.blocks[0]).iter().all(Zero::is_zero) {
            return Ok(false);
        }
        let mut earlier = self.blocks[0].len();
        for (t, coeffs) in self.coefficients.iter().enumerate() {
            if coeffs.len() != earlier {
                return Ok(false);
            }
            let mut residual = block_sum(&cols, &self.blocks[t + 1]);
            for (k, lambda) in coeffs.iter().enumerate() {
                for (r, v) in residual.iter_mut().enumerate() {
                    *v -= lambda * &cols[perm[k]][r];
                }
            }
            if !residual.iter().all(Zero::is_zero) {
                return Ok(false);
            }
            earlier += self.blocks[t + 1].len();
        }
        Ok(true)
    }

    /// JSON with 1-based column labels.
    pub fn to_json(&self) -> Value {
        let one_based = |v: &[usize]| json::counts(&v.iter().map(|i| i + 1).collect::<Vec<_>>());
        json!({
            "permutation": one_based(&self.permutation()),
            "blocks": Value::Array(self.blocks.iter().map(|b| one_based(b)).collect()),
            "coefficients": Value::Array(
                self.coefficients
                    .iter()
                    .map(|c| Value::Array(c.iter().map(json::rat).collect()))
                    .collect()
            ),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let zero_based = |v: &Value| -> Result<Vec<usize>> {
            json::parse_counts(v)?
                .into_iter()
                .map(|i| {
                    i.checked_sub(1)
                        .ok_or_else(|| Error::Format("column labels start at 1".into()))
                })
                .collect()
        };
        let blocks = json::as_array(json::field(v, "blocks")?, "blocks")?
            .iter()
            .map(zero_based)
            .collect::<Result<Vec<_>>>()?;
        let coefficients = json::as_array(json::field(v, "coefficients")?, "coefficients")?
            .iter()
            .map(|c| json::as_array(c, "coefficients")?.iter().map(json::parse_rat).collect())
            .collect::<Result<Vec<_>>>()?;
        let cert = ColumnsCertificate {
            blocks,
            coefficients,
        };
        if let Some(p) = v.get("permutation") {
            if zero_based(p)? != cert.permutation() {
                return Err(Error::Format("permutation disagrees with blocks".into()));
            }
        }
        Ok(cert)
    }
}

fn rat_columns(a: &IntMatrix) -> Vec<Vec<Rat>> {
    let r = a.to_rat();
    (0..a.cols()).map(|j| r.column(j)).collect()
}

fn block_sum(cols: &[Vec<Rat>], block: &[usize]) -> Vec<Rat> {
    let len = cols.first().map_or(0, Vec::len);
    let mut acc = vec![Rat::zero(); len];
    for &j in block {
        for (r, v) in acc.iter_mut().enumerate() {
            *v += &cols[j][r];
        }
    }
    acc
}

/// Nonempty submasks of `mask`, by popcount and then lexicographically by
/// the sorted member list.
fn submasks_by_size(mask: u32) -> Vec<u32> {
    let members: Vec<u32> = (0..32).filter(|b| mask >> b & 1 == 1).collect();
    let n = members.len();
    let mut subsets: Vec<Vec<u32>> = Vec::with_capacity((1 << n) - 1);
    for bits in 1u32..(1 << n) {
        subsets.push(
            (0..n as u32)
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| members[i as usize])
                .collect(),
        );
    }
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .map(|s| s.into_iter().fold(0, |acc, b| acc | 1 << b))
        .collect()
}

fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask >> b & 1 == 1).collect()
}

const MAX_COLUMNS: usize = 16;

/// Decide the columns condition for `a`, allowing any column order.
pub fn check_columns(a: &IntMatrix) -> Result<Option<ColumnsCertificate>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::Empty("matrix".into()));
    }
    if a.cols() > MAX_COLUMNS {
        return Err(Error::InvalidParameter(format!(
            "at most {MAX_COLUMNS} columns supported"
        )));
    }
    let cols = rat_columns(a);
    let full = (1u32 << a.cols()) - 1;
    let mut dead = HashSet::new();
    let mut blocks = Vec::new();
    let mut coefficients = Vec::new();
    if classic_extend(&cols, full, 0, &mut blocks, &mut coefficients, &mut dead)? {
        Ok(Some(ColumnsCertificate {
            blocks,
            coefficients,
        }))
    } else {
        Ok(None)
    }
}

fn classic_extend(
    cols: &[Vec<Rat>],
    full: u32,
    chosen: u32,
    blocks: &mut Vec<Vec<usize>>,
    coefficients: &mut Vec<Vec<Rat>>,
    dead: &mut HashSet<u32>,
) -> Result<bool> {
    if chosen == full {
        return Ok(true);
    }
    if dead.contains(&chosen) {
        return Ok(false);
    }
    let order: Vec<usize> = blocks.iter().flatten().copied().collect();
    for sub in submasks_by_size(full & !chosen) {
        let block = members(sub);
        let sum = block_sum(cols, &block);
        let coeffs = if chosen == 0 {
            if !sum.iter().all(Zero::is_zero) {
                continue;
            }
            None
        } else {
            // prefer the most recently chosen columns as span pivots
            let basis: Vec<Vec<Rat>> = order.iter().rev().map(|&j| cols[j].clone()).collect();
            match in_span(&sum, &basis)? {
                Some(mut c) => {
                    c.reverse();
                    Some(c)
                }
                None => continue,
            }
        };
        blocks.push(block);
        if let Some(c) = &coeffs {
            coefficients.push(c.clone());
        }
        if classic_extend(cols, full, chosen | sub, blocks, coefficients, dead)? {
            return Ok(true);
        }
        blocks.pop();
        if coeffs.is_some() {
            coefficients.pop();
        }
    }
    dead.insert(chosen);
    Ok(false)
}

/// Certificate for the generalized columns condition: columns are maps
/// `c_i: Z^d -> Z^(k·d)` and block sums are cancelled through `c` and
/// integer endomorphisms of `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenColumnsCertificate {
    pub c: IntMatrix,
    pub blocks: Vec<Vec<usize>>,
    /// `witnesses[t-1][k]` is `f_k^(t)` for the `k`-th earlier column in
    /// block order.
    pub witnesses: Vec<Vec<IntMatrix>>,
}

impl GenColumnsCertificate {
    pub fn permutation(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn verify(&self, columns: &[IntMatrix]) -> Result<bool> {
        check_general_dims(columns, &self.c)?;
        let perm = self.permutation();
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        if sorted != (0..columns.len()).collect::<Vec<_>>()
            || self.blocks.iter().any(Vec::is_empty)
            || self.witnesses.len() + 1 != self.blocks.len()
        {
            return Ok(false);
        }
        if !int_block_sum(columns, &self.blocks[0]).mul(&self.c)?.is_zero() {
            return Ok(false);
        }
        let mut earlier = self.blocks[0].len();
        for (t, wit) in self.witnesses.iter().enumerate() {
            if wit.len() != earlier {
                return Ok(false);
            }
            let mut total = int_block_sum(columns, &self.blocks[t + 1]).mul(&self.c)?;
            for (k, f) in wit.iter().enumerate() {
                total = total.add(&columns[perm[k]].mul(f)?)?;
            }
            if !total.is_zero() {
                return Ok(false);
            }
            earlier += self.blocks[t + 1].len();
        }
        Ok(true)
    }

    pub fn to_json(&self) -> Value {
        let one_based = |v: &[usize]| json::counts(&v.iter().map(|i| i + 1).collect::<Vec<_>>());
        json!({
            "c": json::matrix(&self.c),
            "blocks": Value::Array(self.blocks.iter().map(|b| one_based(b)).collect()),
            "witnesses": Value::Array(
                self.witnesses
                    .iter()
                    .map(|w| Value::Array(w.iter().map(json::matrix).collect()))
                    .collect()
            ),
        })
    }
    pub fn from_json(v: &Value) -> Result<Self> {
        let c = json::parse_matrix(json::field(v, "c")?)?;
        let blocks = json::as_array(json::field(v, "blocks")?, "blocks")?
            .iter()
            .map(|b| {
                json::parse_counts(b)?
                    .into_iter()
                    .map(|i| {
                        i.checked_sub(1)
                            .ok_or_else(|| Error::Format("columns are numbered from 1".into()))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let witnesses = json::as_array(json::field(v, "witnesses")?, "witnesses")?
            .iter()
            .map(|w| json::as_array(w, "witness list")?.iter().map(json::parse_matrix).collect())
            .collect::<Result<_>>()?;
        Ok(GenColumnsCertificate { c, blocks, witnesses })
    }
}

fn check_general_dims(columns: &[IntMatrix], c: &IntMatrix) -> Result<()> {
    let Some(first) = columns.first() else {
        return Err(Error::Empty("column map list".into()));
    };
    if !c.is_square() {
        return Err(Error::NotSquare {
            rows: c.rows(),
            cols: c.cols(),
        });
    }
    let d = c.rows();
    if first.cols() != d || first.rows() % d != 0 || first.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "column maps must be (k·{d})x{d}, got {}x{}",
            first.rows(),
            first.cols()
        )));
    }
    if columns
        .iter()
        .any(|m| m.rows() != first.rows() || m.cols() != first.cols())
    {
        return Err(Error::DimensionMismatch(
            "column maps differ in size".into(),
        ));
    }
    if columns.len() > MAX_COLUMNS {
        return Err(Error::InvalidParameter(format!(
            "at most {MAX_COLUMNS} columns supported"
        )));
    }
    Ok(())
}

fn int_block_sum(columns: &[IntMatrix], block: &[usize]) -> IntMatrix {
    let mut acc = IntMatrix::zeros(columns[0].rows(), columns[0].cols());
    for &j in block {
        acc = acc.add(&columns[j]).expect("sizes checked");
    }
    acc
}

/// Decide the generalized columns condition for the given `c`.
pub fn check_columns_general(
    columns: &[IntMatrix],
    c: &IntMatrix,
) -> Result<Option<GenColumnsCertificate>> {
    check_general_dims(columns, c)?;
    let full = (1u32 << columns.len()) - 1;
    let mut dead = HashSet::new();
    let mut blocks = Vec::new();
    let mut witnesses = Vec::new();
    if general_extend(columns, c, full, 0, &mut blocks, &mut witnesses, &mut dead)? {
        Ok(Some(GenColumnsCertificate {
            c: c.clone(),
            blocks,
            witnesses,
        }))
    } else {
        Ok(None)
    }
}

fn general_extend(
    columns: &[IntMatrix],
    c: &IntMatrix,
    full: u32,
    chosen: u32,
    blocks: &mut Vec<Vec<usize>>,
    witnesses: &mut Vec<Vec<IntMatrix>>,
    dead: &mut HashSet<u32>,
) -> Result<bool> {
    if chosen == full {
        return Ok(true);
    }
    if dead.contains(&chosen) {
        return Ok(false);
    }
    let d = c.rows();
    let order: Vec<usize> = blocks.iter().flatten().copied().collect();
    for sub in submasks_by_size(full & !chosen) {
        let block = members(sub);
        let target = int_block_sum(columns, &block).mul(c)?;
        let wit = if chosen == 0 {
            if !target.is_zero() {
                continue;
            }
            None
        } else {
            // Σ c_k·f_k = -target, one column of the f_k at a time
            let mut stacked = columns[order[0]].clone();
            for &j in &order[1..] {
                stacked = stacked.hstack(&columns[j])?;
            }
            let rhs = -&target;
            let mut sol = IntMatrix::zeros(order.len() * d, d);
            let mut solvable = true;
            for q in 0..d {
                match linalg::solve_integer_linear(&stacked, &rhs.column(q))? {
                    Some(x) => {
                        for (r, v) in x.into_iter().enumerate() {
                            sol[(r, q)] = v;
                        }
                    }
                    None => {
                        solvable = false;
                        break;
                    }
                }
            }
            if !solvable {
                continue;
            }
            let per_column = (0..order.len())
                .map(|k| {
                    IntMatrix::from_rows(
                        (k * d..(k + 1) * d).map(|r| sol.row(r).to_vec()).collect(),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Some(per_column)
        };
        blocks.push(block);
        let pushed = wit.is_some();
        if let Some(w) = wit {
            witnesses.push(w);
        }
        if general_extend(columns, c, full, chosen | sub, blocks, witnesses, dead)? {
            return Ok(true);
        }
        blocks.pop();
        if pushed {
            witnesses.pop();
        }
    }
    dead.insert(chosen);
    Ok(false)
}

/// Candidate endomorphisms tried by [`check_columns_general_auto`]: the
/// identity, nonzero scalars up to ±3, and when the column maps are square
/// the maps themselves and their pairwise products.
pub fn candidate_endomorphisms(columns: &[IntMatrix]) -> Vec<IntMatrix> {
    let Some(first) = columns.first() else {
        return Vec::new();
    };
    let d = first.cols();
    let mut out: Vec<IntMatrix> = vec![IntMatrix::identity(d)];
    for s in [-1i64, 2, -2, 3, -3] {
        out.push(IntMatrix::scalar(d, BigInt::from(s)));
    }
    if first.is_square() {
        for a in columns {
            out.push(a.clone());
        }
        for a in columns {
            for b in columns {
                if let Ok(p) = a.mul(b) {
                    out.push(p);
                }
            }
        }
    }
    let mut seen = HashSet::new();
    out.retain(|m| !m.is_zero() && seen.insert(m.clone()));
    out
}

pub fn check_columns_general_auto(
    columns: &[IntMatrix],
) -> Result<Option<GenColumnsCertificate>> {
    for c in candidate_endomorphisms(columns) {
        if let Some(cert) = check_columns_general(columns, &c)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// Whether `c` meets the hypothesis used to turn a generalized certificate
/// into monochromatic solutions: central in `End(Z^d)` (a scalar matrix)
/// or of finite image index (taken as the IP-regularity test).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndomorphismClass {
    pub central: bool,
    pub image_index: Option<BigInt>,
}

impl EndomorphismClass {
    pub fn of(c: &IntMatrix) -> Result<Self> {
        Ok(EndomorphismClass {
            central: c.scalar_value().is_some(),
            image_index: index_of_image(c)?,
        })
    }

    pub fn admissible(&self) -> bool {
        self.central || self.image_index.is_some()
    }
}

/// Result of reducing a columns-condition certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    /// `d × (m+1)`; row `i` reads `(ξ_0, …, ξ_{j-1}, c, 0, …, 0)`.
    pub b: IntMatrix,
    pub m: usize,
    pub p: BigInt,
    pub c: BigInt,
}

impl Reduction {
    /// The configuration `{B·s}` as a searchable pattern.
    pub fn pattern(&self) -> Result<Pattern> {
        Pattern::from_rows(&self.b, &self.c)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "B": json::matrix(&self.b),
            "m": json::count(self.m),
            "p": json::int(&self.p),
            "c": json::int(&self.c),
        })
    }
}

/// Build `B` with `A·B = 0` from a certificate. Block `t` of the
/// certificate becomes line `j = m - t` of the `(m, p, c)`-set: for a
/// column `i` in block `t`,
///
/// ```text
/// x_i = Σ_{ℓ<j} (-c·λ_{m-ℓ, i}) s_ℓ + c·s_j
/// ```
///
/// where `λ_{u, i}` is the coefficient of column `i` in the expansion of
/// block `u`'s sum and `c` clears every denominator.
pub fn deuber_reduce(a: &IntMatrix, cert: &ColumnsCertificate) -> Result<Reduction> {
    if !cert.verify(a)? {
        return Err(Error::InvalidCertificate(
            "certificate does not satisfy the columns condition for this matrix".into(),
        ));
    }
    let m = cert.m();
    let c = denominator_lcm(cert.coefficients.iter().flatten());
    let c_rat = Rat::from_integer(c.clone());
    let perm = cert.permutation();
    let mut block_of = vec![0; a.cols()];
    let mut position = vec![0; a.cols()];
    for (t, block) in cert.blocks.iter().enumerate() {
        for &i in block {
            block_of[i] = t;
        }
    }
    for (k, &i) in perm.iter().enumerate() {
        position[i] = k;
    }
    let mut b = IntMatrix::zeros(a.cols(), m + 1);
    let mut p = BigInt::one();
    for i in 0..a.cols() {
        let j = m - block_of[i];
        for ell in 0..j {
            let u = m - ell;
            let lambda = &cert.coefficients[u - 1][position[i]];
            let entry = -(lambda * &c_rat);
            debug_assert!(entry.is_integer());
            let entry = entry.to_integer();
            if entry.abs() > p {
                p = entry.abs();
            }
            b[(i, ell)] = entry;
        }
        b[(i, j)] = c.clone();
    }
    debug_assert!(a.mul(&b)?.is_zero());
    Ok(Reduction { b, m, p, c })
}

/// Parse `"1 1 -1; 2 0 3"` style matrices: rows split on `;`, entries on
/// whitespace or commas.
pub fn parse_matrix_text(text: &str) -> Result<IntMatrix> {
    let rows = text
        .split(';')
        .map(|row| {
            row.split(|ch: char| ch.is_whitespace() || ch == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<BigInt>()
                        .map_err(|_| Error::Format(format!("not an integer: {t:?}")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .filter(|r| !matches!(r, Ok(v) if v.is_empty()))
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(rows)
}
