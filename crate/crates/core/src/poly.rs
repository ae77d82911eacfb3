//! Sparse multivariate integer polynomials and polynomial maps `Z^n -> Z^d`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Polynomial in a fixed number of integer variables, stored as a sorted
/// list of `(exponents, coefficient)` terms with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    vars: usize,
    terms: Vec<(Vec<u32>, BigInt)>,
}

impl Polynomial {
    pub fn zero(vars: usize) -> Self {
        Polynomial {
            vars,
            terms: Vec::new(),
        }
    }

    /// Collects terms, merging equal exponent vectors and dropping zeros.
    pub fn new(vars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != vars {
                return Err(Error::DimensionMismatch(format!(
                    "monomial has {} exponents, expected {vars}",
                    exps.len()
                )));
            }
            *merged.entry(exps).or_insert_with(BigInt::zero) += coeff;
        }
        Ok(Polynomial {
            vars,
            terms: merged.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    /// Parse text such as `x0^2 - 3*x0*x1 + 2`. Variables are `x0, x1, …`;
    /// `x`, `y`, `z` stand for `x0`, `x1`, `x2`. Products may use `*` or
    /// juxtaposition after a coefficient (`3x^2`).
    pub fn parse(vars: usize, text: &str) -> Result<Self> {
        let bad = |why: &str| Error::Format(format!("polynomial {text:?}: {why}"));
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(bad("empty"));
        }
        let mut pos = 0;
        let mut terms = Vec::new();
        let number = |pos: &mut usize| -> Option<String> {
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            (start < *pos).then(|| chars[start..*pos].iter().collect())
        };
        while pos < chars.len() {
            let mut sign = BigInt::one();
            match chars[pos] {
                '+' => pos += 1,
                '-' => {
                    sign = -sign;
                    pos += 1;
                }
                _ if pos > 0 => return Err(bad("expected + or -")),
                _ => {}
            }
            let mut coeff = sign;
            let mut exps = vec![0u32; vars];
            let mut factors = 0;
            loop {
                if factors > 0 {
                    match chars.get(pos) {
                        Some('*') => pos += 1,
                        Some(c) if c.is_ascii_alphabetic() => {}
                        _ => break,
                    }
                }
                match chars.get(pos) {
                    Some(c) if c.is_ascii_digit() => {
                        let n: BigInt = number(&mut pos).expect("digit").parse().expect("digits");
                        coeff *= n;
                    }
                    Some(&c) if c.is_ascii_alphabetic() => {
                        pos += 1;
                        let v = match (c, number(&mut pos)) {
                            ('x', Some(n)) => n.parse::<usize>().map_err(|_| bad("variable index"))?,
                            ('x', None) => 0,
                            ('y', None) => 1,
                            ('z', None) => 2,
                            _ => return Err(bad(&format!("unknown variable near {c:?}"))),
                        };
                        if v >= vars {
                            return Err(bad(&format!("variable x{v} but only {vars} inputs")));
                        }
                        let mut e = 1;
                        if chars.get(pos) == Some(&'^') {
                            pos += 1;
                            e = number(&mut pos)
                                .ok_or_else(|| bad("exponent"))?
                                .parse()
                                .map_err(|_| bad("exponent"))?;
                        }
                        exps[v] += e;
                    }
                    _ => return Err(bad("expected a number or variable")),
                }
                factors += 1;
            }
            terms.push((exps, coeff));
        }
        Polynomial::new(vars, terms)
    }

    /// `Σ coeffs[v] · x_v`.
    pub fn linear(coeffs: &[BigInt]) -> Self {
        let vars = coeffs.len();
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| {
                let mut e = vec![0; vars];
                e[v] = 1;
                (e, c.clone())
            })
            .collect::<Vec<_>>();
        let mut terms = terms;
        terms.sort();
        Polynomial { vars, terms }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> &[(Vec<u32>, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms
            .iter()
            .find(|(e, _)| e.iter().all(|&x| x == 0))
            .map_or_else(BigInt::zero, |(_, c)| c.clone())
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.terms.iter().all(|(e, _)| e.iter().sum::<u32>() == 1)
    }

    /// Coefficients of a linear polynomial, `None` otherwise.
    pub fn linear_coefficients(&self) -> Option<Vec<BigInt>> {
        if !self.is_linear() {
            return None;
        }
        let mut out = vec![BigInt::zero(); self.vars];
        for (e, c) in &self.terms {
            let v = e.iter().position(|&x| x == 1)?;
            out[v] = c.clone();
        }
        Some(out)
    }

    pub fn eval(&self, x: &[BigInt]) -> BigInt {
        debug_assert_eq!(x.len(), self.vars);
        let mut acc = BigInt::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (base, &e) in x.iter().zip(exps) {
                match e {
                    0 => {}
                    1 => term *= base,
                    _ => term *= num_traits::pow(base.clone(), e as usize),
                }
            }
            acc += term;
        }
        acc
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (exps, coeff)) in self.terms.iter().enumerate() {
            let neg = coeff.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mag = coeff.abs();
            let vars: Vec<String> = exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Polynomial map `Z^inputs -> Z^outputs` with zero constant term in every
/// coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyMap {
    inputs: usize,
    coords: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(inputs: usize, coords: Vec<Polynomial>) -> Result<Self> {
        for (i, p) in coords.iter().enumerate() {
            if p.vars() != inputs {
                return Err(Error::DimensionMismatch(format!(
                    "coordinate {i} has {} variables, expected {inputs}",
                    p.vars()
                )));
            }
            if !p.constant_term().is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {i} has a nonzero constant term"
                )));
            }
        }
        Ok(PolyMap { inputs, coords })
    }

    pub fn zero(inputs: usize, outputs: usize) -> Self {
        PolyMap {
            inputs,
            coords: vec![Polynomial::zero(inputs); outputs],
        }
    }

    /// Linear map given by an `outputs × inputs` integer matrix.
    pub fn from_matrix(m: &IntMatrix) -> Self {
        PolyMap {
            inputs: m.cols(),
            coords: (0..m.rows()).map(|i| Polynomial::linear(m.row(i))).collect(),
        }
    }

    /// Projection `(x_0, …, x_{arity-1}) ↦ x_index` with each `x_i ∈ Z^d`.
    pub fn projection(arity: usize, d: usize, index: usize) -> Self {
        let mut m = IntMatrix::zeros(d, arity * d);
        for q in 0..d {
            m[(q, index * d + q)] = BigInt::one();
        }
        Self::from_matrix(&m)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Polynomial] {
        &self.coords
    }

    pub fn degree(&self) -> u32 {
        self.coords.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// True when every monomial is linear, i.e. the map is a group
    /// homomorphism. The zero map counts.
    pub fn is_homomorphism(&self) -> bool {
        self.coords.iter().all(Polynomial::is_linear)
    }

    pub fn to_matrix(&self) -> Option<IntMatrix> {
        let rows = self
            .coords
            .iter()
            .map(Polynomial::linear_coefficients)
            .collect::<Option<Vec<_>>>()?;
        let mut m = IntMatrix::zeros(self.coords.len(), self.inputs);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Some(m)
    }

    pub fn eval(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.coords.iter().map(|p| p.eval(x)).collect()
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}
