//! Words over `[k] = {1, …, k}`, variable words and combinatorial lines.
//!
//! A word of length `n` is stored by its mixed-radix index: letter `a` at
//! position `i` contributes `(a - 1)·k^(n-1-i)`. Variable words are scanned
//! as base-`(k+1)` numerals with `⋆` as digit 0, so `(⋆, …, ⋆)` comes first.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hypergraph::{
    brute_force_proper_coloring, brute_force_size, proper_coloring, Colorability, Hypergraph,
    SolverBudget,
};
use crate::json;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u32>,
}

impl Word {
    pub fn new(k: u32, letters: Vec<u32>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::Empty("word".into()));
        }
        if let Some(&a) = letters.iter().find(|&&a| a == 0 || a > k) {
            return Err(Error::InvalidParameter(format!("letter {a} outside [1, {k}]")));
        }
        Ok(Word { letters })
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn index(&self, k: u32) -> usize {
        self.letters
            .iter()
            .fold(0usize, |acc, &a| acc * k as usize + (a - 1) as usize)
    }

    pub fn from_index(k: u32, n: usize, mut idx: usize) -> Self {
        let mut letters = vec![0; n];
        for slot in letters.iter_mut().rev() {
            *slot = (idx % k as usize) as u32 + 1;
            idx /= k as usize;
        }
        Word { letters }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.letters.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A word over `[k] ∪ {⋆}` with at least one `⋆` (stored as `None`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableWord {
    letters: Vec<Option<u32>>,
}

impl VariableWord {
    pub fn new(k: u32, letters: Vec<Option<u32>>) -> Result<Self> {
        if !letters.iter().any(Option::is_none) {
            return Err(Error::InvalidParameter("a variable word needs a wildcard".into()));
        }
        if let Some(a) = letters.iter().flatten().find(|&&a| a == 0 || a > k) {
            return Err(Error::InvalidParameter(format!("letter {a} outside [1, {k}]")));
        }
        Ok(VariableWord { letters })
    }

    /// Parse `*` for the wildcard and decimal letters, comma separated.
    pub fn parse(k: u32, text: &str) -> Result<Self> {
        let letters = text
            .split(',')
            .map(|t| match t.trim() {
                "*" => Ok(None),
                s => s
                    .parse::<u32>()
                    .map(Some)
                    .map_err(|_| Error::Format(format!("bad letter {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, letters)
    }

    pub fn letters(&self) -> &[Option<u32>] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Positions holding `⋆`.
    pub fn stars(&self) -> Vec<usize> {
        (0..self.letters.len())
            .filter(|&i| self.letters[i].is_none())
            .collect()
    }

    pub fn instantiate(&self, k: u32, a: u32) -> Result<Word> {
        if a == 0 || a > k {
            return Err(Error::InvalidParameter(format!("letter {a} outside [1, {k}]")));
        }
        Ok(Word {
            letters: self.letters.iter().map(|x| x.unwrap_or(a)).collect(),
        })
    }

    /// The combinatorial line `{w(1), …, w(k)}`.
    pub fn line(&self, k: u32) -> Vec<Word> {
        (1..=k)
            .map(|a| self.instantiate(k, a).expect("letter in range"))
            .collect()
    }

    fn line_indices(&self, k: u32) -> Vec<u32> {
        let n = self.letters.len();
        let mut base = 0usize;
        let mut star_weight = 0usize;
        let mut place = 1usize;
        for i in (0..n).rev() {
            match self.letters[i] {
                Some(a) => base += (a - 1) as usize * place,
                None => star_weight += place,
            }
            place *= k as usize;
        }
        (0..k as usize)
            .map(|a| (base + a * star_weight) as u32)
            .collect()
    }
}

impl fmt::Display for VariableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self
            .letters
            .iter()
            .map(|x| x.map_or_else(|| "*".to_string(), |a| a.to_string()))
            .collect();
        write!(f, "({})", s.join(","))
    }
}

/// All variable words of length `n`, in scan order.
pub fn variable_words(k: u32, n: usize) -> impl Iterator<Item = VariableWord> {
    let total = (k as usize + 1).pow(n as u32);
    (0..total).filter_map(move |mut idx| {
        let mut letters = vec![None; n];
        for slot in letters.iter_mut().rev() {
            let digit = (idx % (k as usize + 1)) as u32;
            idx /= k as usize + 1;
            *slot = (digit > 0).then_some(digit);
        }
        letters
            .iter()
            .any(Option::is_none)
            .then_some(VariableWord { letters })
    })
}

fn cube_size(k: u32, n: usize) -> Result<usize> {
    (k as usize)
        .checked_pow(n as u32)
        .filter(|&s| s <= 1 << 26)
        .ok_or_else(|| Error::Budget(format!("[{k}]^{n} is too large to enumerate")))
}

/// First variable word (in scan order) whose line is single-colored.
/// `coloring[i]` colors the word with index `i`.
pub fn find_mono_line(k: u32, n: usize, coloring: &[u8]) -> Result<Option<VariableWord>> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter("k and n must be positive".into()));
    }
    if coloring.len() != cube_size(k, n)? {
        return Err(Error::DimensionMismatch(format!(
            "coloring has {} entries, [{k}]^{n} has {}",
            coloring.len(),
            (k as usize).pow(n as u32)
        )));
    }
    Ok(variable_words(k, n).find(|w| {
        let idx = w.line_indices(k);
        let c = coloring[idx[0] as usize];
        idx.iter().all(|&i| coloring[i as usize] == c)
    }))
}

/// The lines of `[k]^n` as a hypergraph on word indices.
pub fn line_hypergraph(k: u32, n: usize) -> Result<Hypergraph> {
    let size = cube_size(k, n)?;
    Ok(Hypergraph::new(
        size,
        variable_words(k, n).map(|w| w.line_indices(k)),
    ))
}

#[derive(Clone, Debug)]
pub struct HjBudget {
    pub max_n: usize,
    pub max_nodes: u64,
    pub threads: usize,
}

impl Default for HjBudget {
    fn default() -> Self {
        HjBudget {
            max_n: 4,
            max_nodes: 50_000_000,
            threads: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HjOutcome {
    pub k: u32,
    pub r: usize,
    /// Least `n` forcing a monochromatic line, if decided.
    pub n: Option<usize>,
    /// Coloring of `[k]^(n-1)` without a monochromatic line (largest
    /// length shown insufficient).
    pub bad: Option<(usize, Vec<u8>)>,
}

impl HjOutcome {
    pub fn to_json(&self) -> Value {
        json!({
            "k": json::count(self.k as usize),
            "r": json::count(self.r),
            "n": self.n.map_or(Value::Null, json::count),
            "bad-coloring": self.bad.as_ref().map_or(Value::Null, |(n, c)| json!({
                "n": json::count(*n),
                "colors": c.iter().map(|&x| char::from_digit(x as u32, 36).expect("at most 32 colors")).collect::<String>(),
            })),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let k = json::parse_count(json::field(v, "k")?)? as u32;
        let r = json::parse_count(json::field(v, "r")?)?;
        let n = match json::field(v, "n")? {
            Value::Null => None,
            x => Some(json::parse_count(x)?),
        };
        let bad = match json::field(v, "bad-coloring")? {
            Value::Null => None,
            b => {
                let len = json::parse_count(json::field(b, "n")?)?;
                let colors = json::as_str(json::field(b, "colors")?, "colors")?
                    .chars()
                    .map(|ch| {
                        ch.to_digit(36)
                            .map(|x| x as u8)
                            .ok_or_else(|| Error::Format(format!("color digit {ch:?}")))
                    })
                    .collect::<Result<_>>()?;
                Some((len, colors))
            }
        };
        Ok(HjOutcome { k, r, n, bad })
    }
}

/// Least `n` such that every `r`-coloring of `[k]^n` has a monochromatic
/// combinatorial line.
pub fn hj_number(k: u32, r: usize, budget: &HjBudget) -> Result<HjOutcome> {
    if k == 0 || r == 0 || r > crate::hypergraph::MAX_COLORS {
        return Err(Error::InvalidParameter("k and r must be positive".into()));
    }
    let mut bad = None;
    let mut spent = 0u64;
    for n in 1..=budget.max_n {
        let graph = match line_hypergraph(k, n) {
            Ok(g) => g,
            Err(Error::Budget(_)) => break,
            Err(e) => return Err(e),
        };
        let report = proper_coloring(
            &graph,
            r,
            &SolverBudget {
                max_nodes: budget.max_nodes.saturating_sub(spent),
                deadline: None,
                threads: budget.threads,
            },
        );
        spent += report.nodes;
        match report.outcome {
            Colorability::Colorable(c) => bad = Some((n, c)),
            Colorability::Uncolorable => {
                return Ok(HjOutcome {
                    k,
                    r,
                    n: Some(n),
                    bad,
                })
            }
            Colorability::Exhausted => break,
        }
    }
    Ok(HjOutcome { k, r, n: None, bad })
}

/// Enumerate all `r^(k^n)` colorings of `[k]^n` directly: the number of
/// colorings visited and the first one without a monochromatic line.
pub fn exhaustive_line_check(k: u32, n: usize, r: usize) -> Result<(u64, Option<Vec<u8>>)> {
    let graph = line_hypergraph(k, n)?;
    let total = brute_force_size(graph.vertices(), r)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::Budget("too many colorings to enumerate".into()))?;
    Ok((total, brute_force_proper_coloring(&graph, r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instantiate_examples() {
        let w = VariableWord::parse(2, "*,1").unwrap();
        assert_eq!(w.instantiate(2, 2).unwrap().letters(), &[2, 1]);
        let diag = VariableWord::parse(2, "*,*").unwrap();
        assert_eq!(diag.instantiate(2, 1).unwrap().letters(), &[1, 1]);
        let line: Vec<Vec<u32>> = diag.line(2).iter().map(|w| w.letters().to_vec()).collect();
        assert_eq!(line, vec![vec![1, 1], vec![2, 2]]);
        assert!(w.instantiate(2, 3).is_err());
        assert!(VariableWord::parse(2, "1,2").is_err());
    }

    #[test]
    fn word_index_round_trip() {
        for idx in 0..27 {
            let w = Word::from_index(3, 3, idx);
            assert_eq!(w.index(3), idx);
        }
    }

    #[test]
    fn line_indices_match_instantiation() {
        for w in variable_words(3, 3) {
            let via_words: Vec<u32> = w.line(3).iter().map(|x| x.index(3) as u32).collect();
            assert_eq!(w.line_indices(3), via_words);
        }
    }

    #[test]
    fn scan_starts_with_all_stars() {
        let first = variable_words(2, 3).next().unwrap();
        assert_eq!(first.stars(), vec![0, 1, 2]);
        assert_eq!(variable_words(2, 2).count(), 9 - 4);
    }

    #[test]
    fn bichromatic_single_line() {
        assert_eq!(find_mono_line(2, 1, &[0, 1]).unwrap(), None);
        let w = find_mono_line(2, 2, &[0, 0, 0, 0]).unwrap().unwrap();
        assert_eq!(w.stars(), vec![0, 1]);
    }

    #[test]
    fn small_hj_numbers() {
        let b = HjBudget::default();
        let out = hj_number(2, 2, &b).unwrap();
        assert_eq!(out.n, Some(2));
        let (n, bad) = out.bad.clone().unwrap();
        assert_eq!(n, 1);
        assert_eq!(find_mono_line(2, 1, &bad).unwrap(), None);
        assert_eq!(HjOutcome::from_json(&out.to_json()).unwrap(), out);
        assert_eq!(hj_number(1, 3, &b).unwrap().n, Some(1));
        assert_eq!(hj_number(4, 1, &b).unwrap().n, Some(1));
    }

    #[test]
    fn exhaustive_two_two() {
        let (total, bad) = exhaustive_line_check(2, 2, 2).unwrap();
        assert_eq!(total, 16);
        assert_eq!(bad, None);
        let (total, bad) = exhaustive_line_check(2, 1, 2).unwrap();
        assert_eq!(total, 4);
        assert!(bad.is_some());
    }
}
