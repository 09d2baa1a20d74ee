//! Exact minimum-cost decoding.
//!
//! The Tanner graph is split into connected components. Components with few
//! checks get a precomputed distance table over all syndromes; larger ones
//! are solved per syndrome by branch and bound. Among minimum-cost solutions
//! the lexicographically smallest support is returned.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::{check_priors, llr_weight, DecodeResult, Method, SyndromeDecoder};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

const EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct MleOptions {
    /// Components with at most this many checks use a syndrome table.
    pub table_max_rows: usize,
    /// Upper bound on `2^rows · cols` for a table.
    pub table_max_work: u64,
    /// Branch-and-bound node budget per decode.
    pub node_limit: u64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            table_max_rows: 22,
            table_max_work: 1 << 30,
            node_limit: 1_000_000_000,
        }
    }
}

enum Dist {
    Hops(Vec<u8>),
    Cost(Vec<f64>),
}

struct Table {
    masks: Vec<u32>,
    dist: Dist,
}

impl Table {
    fn build(masks: Vec<u32>, rows: usize, weights: Option<&[f64]>) -> Self {
        let size = 1usize << rows;
        let dist = match weights {
            None => {
                let mut d = vec![u8::MAX; size];
                d[0] = 0;
                let mut queue = VecDeque::from([0u32]);
                while let Some(s) = queue.pop_front() {
                    let next = d[s as usize] + 1;
                    for &m in &masks {
                        let t = (s ^ m) as usize;
                        if d[t] == u8::MAX {
                            d[t] = next;
                            queue.push_back(t as u32);
                        }
                    }
                }
                Dist::Hops(d)
            }
            Some(w) => {
                #[derive(PartialEq)]
                struct Item(f64, u32);
                impl Eq for Item {}
                impl PartialOrd for Item {
                    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                        Some(self.cmp(o))
                    }
                }
                impl Ord for Item {
                    fn cmp(&self, o: &Self) -> Ordering {
                        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
                    }
                }
                let mut d = vec![f64::INFINITY; size];
                d[0] = 0.0;
                let mut heap = BinaryHeap::from([Item(0.0, 0)]);
                while let Some(Item(c, s)) = heap.pop() {
                    if c > d[s as usize] {
                        continue;
                    }
                    for (j, &m) in masks.iter().enumerate() {
                        let t = (s ^ m) as usize;
                        let nc = c + w[j];
                        if nc < d[t] - EPS {
                            d[t] = nc;
                            heap.push(Item(nc, t as u32));
                        }
                    }
                }
                Dist::Cost(d)
            }
        };
        Self { masks, dist }
    }

    fn solve(&self, mut s: u32, weights: &[f64]) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        match &self.dist {
            Dist::Hops(d) => {
                if d[s as usize] == u8::MAX {
                    return None;
                }
                while s != 0 {
                    let here = d[s as usize];
                    let j = (0..self.masks.len()).find(|&j| d[(s ^ self.masks[j]) as usize] + 1 == here)?;
                    out.push(j);
                    s ^= self.masks[j];
                }
            }
            Dist::Cost(d) => {
                if !d[s as usize].is_finite() {
                    return None;
                }
                while s != 0 {
                    let here = d[s as usize];
                    let j = (0..self.masks.len())
                        .find(|&j| (d[(s ^ self.masks[j]) as usize] + weights[j] - here).abs() < EPS * (1.0 + here))?;
                    out.push(j);
                    s ^= self.masks[j];
                }
            }
        }
        Some(out)
    }
}

/// Per-syndrome branch and bound over one component.
struct Search {
    rows: usize,
    words: usize,
    col_synd: Vec<Vec<u64>>,
    row_cols: Vec<Vec<usize>>,
    weights: Vec<f64>,
    uniform: bool,
}

struct SearchState<'a> {
    s: &'a Search,
    synd: Vec<u64>,
    blocked: Vec<bool>,
    chosen: Vec<usize>,
    cost: f64,
    best: Option<(f64, Vec<usize>)>,
    budget: f64,
    nodes: u64,
    node_limit: u64,
}

fn lex_less(a: &[usize], b: &[usize]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a < b
}

impl SearchState<'_> {
    fn is_unsat(&self, r: usize) -> bool {
        (self.synd[r / 64] >> (r % 64)) & 1 == 1
    }

    fn free(&self, c: usize) -> bool {
        !self.blocked[c]
    }

    fn toggle(&mut self, c: usize) {
        for (w, m) in self.synd.iter_mut().zip(&self.s.col_synd[c]) {
            *w ^= m;
        }
    }

    /// Lower bound on the cost still needed, from checks with disjoint free columns
    /// and, for uniform weights, from the largest number of unsatisfied checks a
    /// single free column can clear.
    fn lower_bound(&self, unsat: &[usize]) -> f64 {
        let mut used = vec![0u64; self.blocked.len().div_ceil(64)];
        let mut packed = 0.0;
        let mut max_deg = 1usize;
        for &r in unsat {
            let cols = &self.s.row_cols[r];
            let mut clash = false;
            let mut min_w = f64::INFINITY;
            for &c in cols.iter().filter(|c| self.free(**c)) {
                clash |= (used[c / 64] >> (c % 64)) & 1 == 1;
                min_w = min_w.min(self.s.weights[c]);
                if self.s.uniform {
                    let deg = self.s.col_synd[c]
                        .iter()
                        .zip(&self.synd)
                        .map(|(a, b)| (a & b).count_ones() as usize)
                        .sum::<usize>();
                    max_deg = max_deg.max(deg);
                }
            }
            if !clash {
                for &c in cols.iter().filter(|c| self.free(**c)) {
                    used[c / 64] |= 1 << (c % 64);
                }
                packed += min_w;
            }
        }
        if self.s.uniform {
            packed.max(unsat.len().div_ceil(max_deg) as f64 * self.s.weights[0])
        } else {
            packed
        }
    }

    fn run(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::GuardExceeded(format!(
                "exact decoder exceeded {} search nodes",
                self.node_limit
            )));
        }
        let unsat: Vec<usize> = (0..self.s.rows).filter(|&r| self.is_unsat(r)).collect();
        if unsat.is_empty() {
            let better = match &self.best {
                None => true,
                Some((bc, bs)) => self.cost < bc - EPS || (self.cost < bc + EPS && lex_less(&self.chosen, bs)),
            };
            if better {
                self.best = Some((self.cost, self.chosen.clone()));
                if !self.s.uniform {
                    self.budget = self.budget.min(self.cost);
                }
            }
            return Ok(());
        }
        let lb = self.lower_bound(&unsat);
        if self.cost + lb > self.budget + EPS {
            return Ok(());
        }
        let (row, _) = unsat
            .iter()
            .map(|&r| (r, self.s.row_cols[r].iter().filter(|c| self.free(**c)).count()))
            .min_by_key(|&(_, k)| k)
            .expect("unsat is nonempty");
        let branch: Vec<usize> = self.s.row_cols[row].iter().copied().filter(|c| self.free(*c)).collect();
        for (i, &c) in branch.iter().enumerate() {
            if self.cost + self.s.weights[c] > self.budget + EPS {
                continue;
            }
            for &b in &branch[..i] {
                self.blocked[b] = true;
            }
            self.blocked[c] = true;
            self.toggle(c);
            self.chosen.push(c);
            self.cost += self.s.weights[c];
            let res = self.run();
            self.cost -= self.s.weights[c];
            self.chosen.pop();
            self.toggle(c);
            self.blocked[c] = false;
            for &b in &branch[..i] {
                self.blocked[b] = false;
            }
            res?;
        }
        Ok(())
    }
}

impl Search {
    fn solve(&self, synd: Vec<u64>, node_limit: u64) -> Result<Option<Vec<usize>>> {
        let ncols = self.col_synd.len();
        let mut st = SearchState {
            s: self,
            synd,
            blocked: vec![false; ncols],
            chosen: Vec::new(),
            cost: 0.0,
            best: None,
            budget: f64::INFINITY,
            nodes: 0,
            node_limit,
        };
        if self.uniform {
            // Iterative deepening on the weight; the first feasible budget is optimal.
            let w = self.weights.first().copied().unwrap_or(1.0);
            let unsat: Vec<usize> = (0..self.rows).filter(|&r| st.is_unsat(r)).collect();
            let start = (st.lower_bound(&unsat) / w).round() as usize;
            for budget in start..=ncols {
                st.budget = budget as f64 * w;
                st.run()?;
                if st.best.is_some() {
                    break;
                }
            }
        } else {
            st.run()?;
        }
        Ok(st.best.map(|(_, cols)| cols))
    }
}

enum Solver {
    Table(Table),
    Search(Search),
}

struct Component {
    rows: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    solver: Solver,
}

/// Exact decoder returning a minimum-cost, lexicographically smallest solution.
pub struct MleDecoder {
    h: BitMatrix,
    components: Vec<Component>,
    isolated_rows: Vec<usize>,
    options: MleOptions,
}

impl MleDecoder {
    pub fn new(h: BitMatrix, priors: Vec<f64>, options: MleOptions) -> Result<Self> {
        check_priors(h.cols(), &priors)?;
        let weights: Vec<f64> = priors.iter().map(|&p| llr_weight(p)).collect();
        let uniform = weights.windows(2).all(|w| (w[0] - w[1]).abs() < EPS);

        let adj = h.adjacency();
        let mut parent: Vec<usize> = (0..h.cols()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for cols in &adj {
            for w in cols.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut comp_of = vec![usize::MAX; h.cols()];
        let col_used: Vec<bool> = {
            let mut u = vec![false; h.cols()];
            for cols in &adj {
                for &c in cols {
                    u[c] = true;
                }
            }
            u
        };
        for c in 0..h.cols() {
            if !col_used[c] {
                continue;
            }
            let r = find(&mut parent, c);
            let idx = match roots.iter().position(|&x| x == r) {
                Some(i) => i,
                None => {
                    roots.push(r);
                    roots.len() - 1
                }
            };
            comp_of[c] = idx;
        }
        let mut comp_rows = vec![Vec::new(); roots.len()];
        let mut comp_cols = vec![Vec::new(); roots.len()];
        let mut isolated_rows = Vec::new();
        for (r, cols) in adj.iter().enumerate() {
            match cols.first() {
                Some(&c) => comp_rows[comp_of[c]].push(r),
                None => isolated_rows.push(r),
            }
        }
        for c in 0..h.cols() {
            if comp_of[c] != usize::MAX {
                comp_cols[comp_of[c]].push(c);
            }
        }

        let mut components = Vec::with_capacity(roots.len());
        for (rows, cols) in comp_rows.into_iter().zip(comp_cols) {
            let local_row: std::collections::HashMap<usize, usize> =
                rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
            let w: Vec<f64> = cols.iter().map(|&c| weights[c]).collect();
            let col_rows: Vec<Vec<usize>> = cols
                .iter()
                .map(|&c| {
                    let mut v: Vec<usize> = (0..h.rows()).filter(|&r| h.get(r, c)).map(|r| local_row[&r]).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            let work = (1u64 << rows.len().min(63)).saturating_mul(cols.len() as u64);
            let solver = if rows.len() <= options.table_max_rows && work <= options.table_max_work {
                let masks = col_rows.iter().map(|rs| rs.iter().fold(0u32, |m, &r| m | 1 << r)).collect();
                Solver::Table(Table::build(masks, rows.len(), if uniform { None } else { Some(&w) }))
            } else {
                let words = rows.len().div_ceil(64);
                let col_synd = col_rows
                    .iter()
                    .map(|rs| {
                        let mut v = vec![0u64; words];
                        for &r in rs {
                            v[r / 64] |= 1 << (r % 64);
                        }
                        v
                    })
                    .collect();
                let mut row_cols = vec![Vec::new(); rows.len()];
                for (j, rs) in col_rows.iter().enumerate() {
                    for &r in rs {
                        row_cols[r].push(j);
                    }
                }
                Solver::Search(Search {
                    rows: rows.len(),
                    words,
                    col_synd,
                    row_cols,
                    weights: w.clone(),
                    uniform,
                })
            };
            components.push(Component {
                rows,
                cols,
                weights: w,
                solver,
            });
        }
        Ok(Self {
            h,
            components,
            isolated_rows,
            options,
        })
    }

    /// Number of connected components and how many use a syndrome table.
    pub fn component_summary(&self) -> (usize, usize) {
        let tables = self
            .components
            .iter()
            .filter(|c| matches!(c.solver, Solver::Table(_)))
            .count();
        (self.components.len(), tables)
    }
}

impl SyndromeDecoder for MleDecoder {
    fn decode(&self, syndrome: &BitVector) -> Result<DecodeResult> {
        if syndrome.len() != self.h.rows() {
            return Err(Error::DimensionMismatch {
                what: "syndrome length",
                expected: self.h.rows(),
                found: syndrome.len(),
            });
        }
        if self.isolated_rows.iter().any(|&r| syndrome.get(r)) {
            return Err(Error::InconsistentSyndrome);
        }
        let mut estimate = BitVector::zeros(self.h.cols());
        for comp in &self.components {
            let local: Vec<usize> = comp
                .rows
                .iter()
                .enumerate()
                .filter(|(_, &r)| syndrome.get(r))
                .map(|(i, _)| i)
                .collect();
            if local.is_empty() {
                continue;
            }
            let picked = match &comp.solver {
                Solver::Table(t) => t.solve(local.iter().fold(0u32, |m, &i| m | 1 << i), &comp.weights),
                Solver::Search(s) => {
                    let mut synd = vec![0u64; s.words];
                    for &i in &local {
                        synd[i / 64] |= 1 << (i % 64);
                    }
                    s.solve(synd, self.options.node_limit)?
                }
            }
            .ok_or(Error::InconsistentSyndrome)?;
            for j in picked {
                estimate.flip(comp.cols[j]);
            }
        }
        debug_assert_eq!(&self.h.mul_vec(&estimate), syndrome);
        Ok(DecodeResult {
            estimate,
            converged: true,
            method: Method::Mle,
            soft: Vec::new(),
        })
    }

    fn check_matrix(&self) -> &BitMatrix {
        &self.h
    }
}
