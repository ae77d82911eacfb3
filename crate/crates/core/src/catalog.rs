//! Named shapes and patterns used by the CLI and the test suites.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::poly::{PolyMap, Polynomial};
use crate::rado::{check_columns, deuber_reduce};
use crate::shape::{from_mpc, Pattern, Shape};

/// `{s_0, s_1, s_0 + s_1}`: solutions of `x + y = z`, obtained by reducing
/// the columns certificate of `[1 1 -1]`.
pub fn schur() -> Result<Pattern> {
    let a = IntMatrix::from_i64(1, 3, &[1, 1, -1])?;
    let cert = check_columns(&a)?.ok_or_else(|| Error::Precondition("x + y = z".into()))?;
    deuber_reduce(&a, &cert)?.pattern()
}

/// Three-term progressions `{a, a + d, a + 2d}` with `d ≠ 0`.
pub fn ap3() -> Result<Pattern> {
    let rows = IntMatrix::from_i64(3, 2, &[0, 1, 1, 1, 2, 1])?;
    Pattern::from_rows(&rows, &BigInt::from(1))
}

/// `k`-term progressions `{a + i·d : 0 ≤ i < k}`.
pub fn arithmetic_progression(k: usize) -> Result<Pattern> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let data: Vec<i64> = (0..k as i64).flat_map(|i| [i, 1]).collect();
    Pattern::from_rows(&IntMatrix::from_i64(k, 2, &data)?, &BigInt::from(1))
}

fn power(vars: usize, var: usize, e: u32) -> Polynomial {
    let mut exps = vec![0; vars];
    exps[var] = e;
    Polynomial::new(vars, [(exps, BigInt::from(1))]).expect("exponent vector sized")
}

/// `{x, y + x², z, z + y²}`: `F_1 = {x ↦ x²}`, `F_2 = {0, (x, y) ↦ y²}`.
pub fn quadruple() -> Result<Shape> {
    let sq1 = PolyMap::new(1, vec![power(1, 0, 2)])?;
    let sq2 = PolyMap::new(2, vec![power(2, 1, 2)])?;
    Shape::new(
        1,
        IntMatrix::identity(1),
        vec![vec![sq1], vec![PolyMap::zero(2, 1), sq2]],
    )
}

/// Chained configuration `x_0, …, x_k, a_1, …, a_k` with
/// `a_i = x_i + f_i(x_{i-1})`: `F_i = {0, f_i(x_{i-1})}`. Each `f_i` is a
/// univariate polynomial without constant term.
pub fn chained(fs: &[Polynomial]) -> Result<Shape> {
    if fs.is_empty() {
        return Err(Error::Empty("chain".into()));
    }
    let mut families = Vec::with_capacity(fs.len());
    for (idx, f) in fs.iter().enumerate() {
        if f.vars() != 1 {
            return Err(Error::DimensionMismatch("chain maps are univariate".into()));
        }
        let j = idx + 1;
        let terms = f.terms().iter().map(|(e, c)| {
            let mut exps = vec![0; j];
            exps[j - 1] = e[0];
            (exps, c.clone())
        });
        let lifted = PolyMap::new(j, vec![Polynomial::new(j, terms)?])?;
        families.push(vec![PolyMap::zero(j, 1), lifted]);
    }
    Shape::new(1, IntMatrix::identity(1), families)
}

/// `F_j = {0}` for `j = 1, …, m` and `c = id`: the seed points themselves.
/// Its normalization is the smallest shape the lift accepts.
pub fn trivial(m: usize) -> Result<Shape> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    let families = (1..=m).map(|j| vec![PolyMap::zero(j, 1)]).collect();
    Shape::new(1, IntMatrix::identity(1), families)
}

/// `x ↦ x^e` in one variable.
pub fn monomial(e: u32) -> Polynomial {
    power(1, 0, e)
}

/// Look up a catalog entry by name: `schur`, `ap3`, `ap<k>`, `quadruple`,
/// `chain<k>` (squares), `trivial<m>`, `mpc:<m>,<p>,<c>`.
pub fn by_name(name: &str) -> Result<Pattern> {
    let unknown = || Error::InvalidParameter(format!("unknown catalog entry {name:?}"));
    match name {
        "schur" => schur(),
        "ap3" => ap3(),
        "quadruple" => Ok(Pattern::whole(quadruple()?)),
        _ => {
            if let Some(m) = name.strip_prefix("trivial") {
                Ok(Pattern::whole(trivial(m.parse().map_err(|_| unknown())?)?))
            } else if let Some(k) = name.strip_prefix("chain") {
                let k: usize = k.parse().map_err(|_| unknown())?;
                let fs = vec![monomial(2); k];
                Ok(Pattern::whole(chained(&fs)?))
            } else if let Some(k) = name.strip_prefix("ap") {
                arithmetic_progression(k.parse().map_err(|_| unknown())?)
            } else if let Some(args) = name.strip_prefix("mpc:") {
                let v: Vec<i64> = args
                    .split(',')
                    .map(|t| t.trim().parse().map_err(|_| unknown()))
                    .collect::<Result<_>>()?;
                match v[..] {
                    [m, p, c] if m >= 0 => Ok(Pattern::whole(from_mpc(m as usize, p, c)?)),
                    _ => Err(unknown()),
                }
            } else {
                Err(unknown())
            }
        }
    }
}
