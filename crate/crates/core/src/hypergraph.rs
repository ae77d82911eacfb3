//! Proper r-colorings of finite hypergraphs, the engine behind partition
//! numbers, HJ numbers and the IP probe. A coloring is proper when no edge
//! is monochromatic.
//!
//! The search assigns vertices in index order. Colors are tried in
//! ascending order with the usual symmetry break (a vertex may open at most
//! one new color), and an assignment that leaves an edge one vertex short of
//! monochromatic forbids that color on the remaining vertex.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

const UNSET: u8 = u8::MAX;
pub const MAX_COLORS: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: usize,
    edges: Vec<Vec<u32>>,
    incident: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Edges are sorted and deduplicated; vertex ids must be `< vertices`.
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut list: Vec<Vec<u32>> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e.dedup();
                assert!(e.iter().all(|&v| (v as usize) < vertices), "vertex out of range");
                e
            })
            .filter(|e| !e.is_empty())
            .collect();
        list.sort();
        list.dedup();
        let mut incident = vec![Vec::new(); vertices];
        for (i, e) in list.iter().enumerate() {
            for &v in e {
                incident[v as usize].push(i as u32);
            }
        }
        Hypergraph {
            vertices,
            edges: list,
            incident,
        }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// Index of the first monochromatic edge under `colors`.
    pub fn mono_edge(&self, colors: &[u8]) -> Option<usize> {
        self.edges.iter().position(|e| {
            let c = colors[e[0] as usize];
            e.iter().all(|&v| colors[v as usize] == c)
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolverBudget {
    pub max_nodes: u64,
    pub deadline: Option<Instant>,
    /// 0 uses rayon's default pool, 1 runs sequentially.
    pub threads: usize,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            max_nodes: 50_000_000,
            deadline: None,
            threads: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Colorability {
    /// The lexicographically least proper coloring in symmetry-normal form.
    Colorable(Vec<u8>),
    Uncolorable,
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Colorability,
    pub nodes: u64,
}

struct Shared<'a> {
    graph: &'a Hypergraph,
    r: usize,
    budget: &'a SolverBudget,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl Shared<'_> {
    fn charge(&self, n: u64) -> bool {
        let total = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        if total > self.budget.max_nodes
            || self.budget.deadline.is_some_and(|d| Instant::now() >= d)
        {
            self.stop.store(true, Ordering::Relaxed);
        }
        !self.stop.load(Ordering::Relaxed)
    }
}

enum Step {
    Found,
    Fail,
    Budget,
}

struct State<'a, 'b> {
    shared: &'b Shared<'a>,
    colors: Vec<u8>,
    forbid: Vec<u32>,
    trail: Vec<(u32, u32)>,
    pending: u64,
}

impl<'a, 'b> State<'a, 'b> {
    fn new(shared: &'b Shared<'a>) -> Self {
        let n = shared.graph.vertices;
        State {
            shared,
            colors: vec![UNSET; n],
            forbid: vec![0; n],
            trail: Vec::new(),
            pending: 0,
        }
    }

    fn full_mask(&self) -> u32 {
        if self.shared.r >= 32 {
            u32::MAX
        } else {
            (1u32 << self.shared.r) - 1
        }
    }

    /// Assign `v := c` and propagate; false on a conflict.
    fn assign(&mut self, v: usize, c: u8) -> bool {
        self.colors[v] = c;
        let full = self.full_mask();
        for &ei in &self.shared.graph.incident[v] {
            let edge = &self.shared.graph.edges[ei as usize];
            let mut open = None;
            let mut open_count = 0;
            let mut mono = true;
            for &u in edge {
                let cu = self.colors[u as usize];
                if cu == UNSET {
                    open_count += 1;
                    open = Some(u);
                    if open_count > 1 {
                        break;
                    }
                } else if cu != c {
                    mono = false;
                    break;
                }
            }
            if !mono || open_count > 1 {
                continue;
            }
            match open {
                None => return false,
                Some(u) => {
                    let old = self.forbid[u as usize];
                    let new = old | 1 << c;
                    if new != old {
                        self.trail.push((u, old));
                        self.forbid[u as usize] = new;
                        if new & full == full {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn undo(&mut self, v: usize, mark: usize) {
        while self.trail.len() > mark {
            let (u, old) = self.trail.pop().expect("trail nonempty");
            self.forbid[u as usize] = old;
        }
        self.colors[v] = UNSET;
    }

    fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending >= 64 {
            let n = std::mem::take(&mut self.pending);
            return self.shared.charge(n);
        }
        true
    }

    fn flush(&mut self) {
        let n = std::mem::take(&mut self.pending);
        self.shared.charge(n);
    }

    /// Depth-first extension from vertex `v`. With `collect`, every partial
    /// coloring reaching `stop` is recorded and the search continues.
    fn dfs(
        &mut self,
        v: usize,
        used: usize,
        stop: usize,
        collect: &mut Option<&mut Vec<(Vec<u8>, usize)>>,
    ) -> Step {
        if v == stop {
            return match collect {
                Some(out) => {
                    out.push((self.colors[..stop].to_vec(), used));
                    Step::Fail
                }
                None => Step::Found,
            };
        }
        let limit = self.shared.r.min(used + 1);
        for c in 0..limit {
            if self.forbid[v] >> c & 1 == 1 {
                continue;
            }
            if !self.tick() {
                return Step::Budget;
            }
            let mark = self.trail.len();
            if self.assign(v, c as u8) {
                match self.dfs(v + 1, used.max(c + 1), stop, collect) {
                    Step::Found => return Step::Found,
                    Step::Budget => return Step::Budget,
                    Step::Fail => {}
                }
            }
            self.undo(v, mark);
        }
        Step::Fail
    }
}

/// Decide whether `graph` has a proper `r`-coloring.
pub fn proper_coloring(graph: &Hypergraph, r: usize, budget: &SolverBudget) -> SolveReport {
    assert!((1..=MAX_COLORS).contains(&r), "color count out of range");
    let shared = Shared {
        graph,
        r,
        budget,
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
    };
    let n = graph.vertices;
    let outcome = if budget.threads == 1 || n < 20 {
        let mut st = State::new(&shared);
        let step = st.dfs(0, 0, n, &mut None);
        st.flush();
        match step {
            Step::Found => Colorability::Colorable(st.colors),
            Step::Fail => Colorability::Uncolorable,
            Step::Budget => Colorability::Exhausted,
        }
    } else {
        let run = || parallel(&shared);
        if budget.threads == 0 {
            run()
        } else {
            match rayon::ThreadPoolBuilder::new()
                .num_threads(budget.threads)
                .build()
            {
                Ok(pool) => pool.install(run),
                Err(_) => run(),
            }
        }
    };
    let nodes = shared.nodes.load(Ordering::Relaxed);
    SolveReport { outcome, nodes }
}

fn parallel(shared: &Shared<'_>) -> Colorability {
    let n = shared.graph.vertices;
    let depth = 14.min(n);
    let mut prefixes = Vec::new();
    let mut st = State::new(shared);
    let step = st.dfs(0, 0, depth, &mut Some(&mut prefixes));
    st.flush();
    if matches!(step, Step::Budget) {
        return Colorability::Exhausted;
    }
    let results: Vec<Option<Colorability>> = prefixes
        .par_iter()
        .map(|(prefix, used)| {
            if shared.stop.load(Ordering::Relaxed) {
                return Some(Colorability::Exhausted);
            }
            let mut st = State::new(shared);
            for (v, &c) in prefix.iter().enumerate() {
                if !st.assign(v, c) {
                    return None;
                }
            }
            let step = st.dfs(depth, *used, n, &mut None);
            st.flush();
            match step {
                Step::Found => Some(Colorability::Colorable(st.colors)),
                Step::Fail => None,
                Step::Budget => Some(Colorability::Exhausted),
            }
        })
        .collect();
    // earliest subtree wins, unless an earlier one ran out of budget
    for res in results {
        match res {
            Some(Colorability::Colorable(c)) => return Colorability::Colorable(c),
            Some(Colorability::Exhausted) => return Colorability::Exhausted,
            _ => {}
        }
    }
    Colorability::Uncolorable
}

/// Plain enumeration of all `r^n` colorings in lexicographic order; the
/// first proper one, if any. Used to cross-check the solver.
pub fn brute_force_proper_coloring(graph: &Hypergraph, r: usize) -> Option<Vec<u8>> {
    let n = graph.vertices;
    let mut colors = vec![0u8; n];
    loop {
        if graph.mono_edge(&colors).is_none() {
            return Some(colors);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            colors[i] += 1;
            if (colors[i] as usize) < r {
                break;
            }
            colors[i] = 0;
        }
    }
}

/// Number of colorings `brute_force_proper_coloring` would visit.
pub fn brute_force_size(vertices: usize, r: usize) -> Option<u64> {
    (r as u64).checked_pow(u32::try_from(vertices).ok()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq() -> SolverBudget {
        SolverBudget {
            threads: 1,
            ..SolverBudget::default()
        }
    }

    #[test]
    fn triangle_needs_three_colors() {
        let g = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(proper_coloring(&g, 2, &seq()).outcome, Colorability::Uncolorable);
        assert_eq!(
            proper_coloring(&g, 3, &seq()).outcome,
            Colorability::Colorable(vec![0, 1, 2])
        );
    }

    #[test]
    fn singleton_edge_is_never_proper() {
        let g = Hypergraph::new(2, vec![vec![1]]);
        assert_eq!(proper_coloring(&g, 3, &seq()).outcome, Colorability::Uncolorable);
        assert_eq!(brute_force_proper_coloring(&g, 3), None);
    }

    #[test]
    fn no_edges_colors_everything_zero() {
        let g = Hypergraph::new(4, Vec::<Vec<u32>>::new());
        assert_eq!(
            proper_coloring(&g, 2, &seq()).outcome,
            Colorability::Colorable(vec![0; 4])
        );
    }

    #[test]
    fn budget_is_reported() {
        // W(3,3) = 27: no proper 3-coloring of progressions in [0, 27)
        let n = 27u32;
        let edges = (0..n).flat_map(|a| {
            (1..n).filter(move |d| a + 2 * d < n).map(move |d| vec![a, a + d, a + 2 * d])
        });
        let g = Hypergraph::new(n as usize, edges);
        let budget = SolverBudget {
            max_nodes: 100,
            threads: 1,
            deadline: None,
        };
        assert_eq!(proper_coloring(&g, 3, &budget).outcome, Colorability::Exhausted);
    }

    #[test]
    fn parallel_matches_sequential() {
        // 3-term progressions in [0, 24): W(3,2) = 9, so no proper 2-coloring
        let n = 24u32;
        let mut edges = Vec::new();
        for a in 0..n {
            for d in 1..n {
                if a + 2 * d < n {
                    edges.push(vec![a, a + d, a + 2 * d]);
                }
            }
        }
        let g = Hypergraph::new(n as usize, edges);
        let par = SolverBudget::default();
        assert_eq!(proper_coloring(&g, 2, &par).outcome, Colorability::Uncolorable);
        let a = proper_coloring(&g, 3, &par).outcome;
        let b = proper_coloring(&g, 3, &seq()).outcome;
        assert_eq!(a, b);
        let Colorability::Colorable(c) = a else { panic!() };
        assert_eq!(g.mono_edge(&c), None);
    }
}
