//! Mutable peeling graph shared by the BP and TEP decoders.
//!
//! Both decoders are compositions of two primitives: removing a degree-one
//! check together with the variable it determines, and merging the two
//! variables of a degree-two check. Parallel edges never exist; a merge that
//! would create one cancels both edges instead.

mod ledger;

pub use ledger::ResolutionLedger;

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::channel::ReceivedWord;
use crate::ensemble::CodeGraph;
use crate::error::{Error, Result};

/// Work counters accumulated over the life of a graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounters {
    /// Adjacency entries read or written by the mutation primitives.
    pub touches: u64,
    pub peels: usize,
    pub merges: usize,
    /// Merges whose two variables shared at least one other check.
    pub shared_merges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeReport {
    pub survivor: usize,
    pub removed: usize,
    pub parity: u8,
    /// Checks attached to both variables; each lost two edges.
    pub shared: Vec<usize>,
    pub new_degree1: Vec<usize>,
    /// Checks that dropped to degree zero (parity zero) and were discarded.
    pub emptied: Vec<usize>,
}

/// Snapshot of a (possibly stalled) graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResidualSummary {
    pub alive_vars: usize,
    pub alive_checks: usize,
    pub edges: usize,
    /// Alive variables per degree.
    pub var_degree_hist: Vec<usize>,
    pub check_degree_hist: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TannerGraph {
    check_adj: Vec<Vec<u32>>,
    var_adj: Vec<Vec<u32>>,
    parity: Vec<u8>,
    check_alive: Vec<bool>,
    var_alive: Vec<bool>,
    alive_vars: usize,
    alive_checks: usize,
    edges: usize,
    reference_edges: usize,
    deg1: VecDeque<u32>,
    deg2: VecDeque<u32>,
    var_hist: Vec<usize>,
    check_hist: Vec<usize>,
    mark: Vec<u32>,
    stamp: u32,
    counters: OpCounters,
}

fn bump(hist: &mut Vec<usize>, degree: usize) {
    if hist.len() <= degree {
        hist.resize(degree + 1, 0);
    }
    hist[degree] += 1;
}

fn remove_value(list: &mut Vec<u32>, value: u32) -> bool {
    match list.iter().position(|&x| x == value) {
        Some(pos) => {
            list.swap_remove(pos);
            true
        }
        None => false,
    }
}

impl TannerGraph {
    /// Builds the residual graph of a received word: every known variable is
    /// removed and, when it is one, flips the parity of its checks.
    pub fn initialize(code: &CodeGraph, received: &ReceivedWord) -> Result<Self> {
        let n = code.num_vars();
        let m = code.num_checks();
        if received.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: received.len(),
            });
        }
        let mut g = Self {
            check_adj: Vec::with_capacity(m),
            var_adj: vec![Vec::new(); n],
            parity: Vec::with_capacity(m),
            check_alive: vec![false; m],
            var_alive: vec![false; n],
            alive_vars: 0,
            alive_checks: 0,
            edges: 0,
            reference_edges: code.edge_count(),
            deg1: VecDeque::new(),
            deg2: VecDeque::new(),
            var_hist: Vec::new(),
            check_hist: Vec::new(),
            mark: vec![0; m],
            stamp: 0,
            counters: OpCounters::default(),
        };
        for (c, adj) in code.checks().enumerate() {
            let mut p = code.parity(c);
            let mut alive = Vec::new();
            for &v in adj {
                match received.values[v as usize] {
                    Some(bit) => p ^= bit,
                    None => alive.push(v),
                }
            }
            match alive.len() {
                0 if p == 1 => return Err(Error::Contradiction { check: c }),
                0 => {}
                d => {
                    for &v in &alive {
                        g.var_adj[v as usize].push(c as u32);
                    }
                    g.check_alive[c] = true;
                    g.alive_checks += 1;
                    g.edges += d;
                    bump(&mut g.check_hist, d);
                    match d {
                        1 => g.deg1.push_back(c as u32),
                        2 => g.deg2.push_back(c as u32),
                        _ => {}
                    }
                }
            }
            g.check_adj.push(alive);
            g.parity.push(p);
        }
        for v in received.erased_positions() {
            g.var_alive[v] = true;
            g.alive_vars += 1;
            bump(&mut g.var_hist, g.var_adj[v].len());
        }
        Ok(g)
    }

    pub fn num_vars(&self) -> usize {
        self.var_adj.len()
    }

    pub fn num_checks(&self) -> usize {
        self.check_adj.len()
    }

    pub fn alive_vars(&self) -> usize {
        self.alive_vars
    }

    pub fn alive_checks(&self) -> usize {
        self.alive_checks
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    /// Edge count of the code the graph was built from (the scaling constant
    /// for normalized degree fractions).
    pub fn reference_edges(&self) -> usize {
        self.reference_edges
    }

    pub fn counters(&self) -> OpCounters {
        self.counters
    }

    pub fn is_var_alive(&self, v: usize) -> bool {
        self.var_alive[v]
    }

    pub fn is_check_alive(&self, c: usize) -> bool {
        self.check_alive[c]
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_adj[c].len()
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_adj[v].len()
    }

    pub fn check_neighbors(&self, c: usize) -> &[u32] {
        &self.check_adj[c]
    }

    pub fn var_neighbors(&self, v: usize) -> &[u32] {
        &self.var_adj[v]
    }

    pub fn check_parity(&self, c: usize) -> u8 {
        self.parity[c]
    }

    pub fn alive_var_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vars()).filter(|&v| self.var_alive[v])
    }

    pub fn alive_check_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_checks()).filter(|&c| self.check_alive[c])
    }

    /// Alive variables per degree (index = degree).
    pub fn var_degree_hist(&self) -> &[usize] {
        &self.var_hist
    }

    pub fn check_degree_hist(&self) -> &[usize] {
        &self.check_hist
    }

    pub fn summary(&self) -> ResidualSummary {
        let trim = |h: &[usize]| {
            let end = h.iter().rposition(|&c| c > 0).map_or(0, |i| i + 1);
            h[..end].to_vec()
        };
        ResidualSummary {
            alive_vars: self.alive_vars,
            alive_checks: self.alive_checks,
            edges: self.edges,
            var_degree_hist: trim(&self.var_hist),
            check_degree_hist: trim(&self.check_hist),
        }
    }

    /// Next alive check of degree one, dropping stale queue entries.
    pub fn peek_degree1(&mut self) -> Option<usize> {
        while let Some(&c) = self.deg1.front() {
            let c = c as usize;
            if self.check_alive[c] && self.check_adj[c].len() == 1 {
                return Some(c);
            }
            self.deg1.pop_front();
        }
        None
    }

    /// Next alive check of degree two in discovery order.
    pub fn peek_degree2(&mut self) -> Option<usize> {
        while let Some(&c) = self.deg2.front() {
            let c = c as usize;
            if self.check_alive[c] && self.check_adj[c].len() == 2 {
                return Some(c);
            }
            self.deg2.pop_front();
        }
        None
    }

    fn hist_move(hist: &mut Vec<usize>, from: usize, to: usize) {
        hist[from] -= 1;
        bump(hist, to);
    }

    /// Bookkeeping after check `c` went from degree `old` to its current degree.
    fn check_shrunk(&mut self, c: usize, old: usize) -> Result<()> {
        let d = self.check_adj[c].len();
        match d {
            0 => {
                self.check_hist[old] -= 1;
                if self.parity[c] == 1 {
                    return Err(Error::Contradiction { check: c });
                }
                self.check_alive[c] = false;
                self.alive_checks -= 1;
            }
            _ => {
                Self::hist_move(&mut self.check_hist, old, d);
                if d == 1 {
                    self.deg1.push_back(c as u32);
                } else if d == 2 {
                    self.deg2.push_back(c as u32);
                }
            }
        }
        Ok(())
    }

    fn kill_check(&mut self, c: usize) {
        self.check_hist[self.check_adj[c].len()] -= 1;
        self.edges -= self.check_adj[c].len();
        self.check_adj[c].clear();
        self.check_alive[c] = false;
        self.alive_checks -= 1;
    }

    /// Removes an alive variable whose value is now known, detaching it from
    /// every check and flipping their parities when `bit` is one.
    fn remove_known_var(&mut self, v: usize, bit: u8) -> Result<()> {
        let adj = std::mem::take(&mut self.var_adj[v]);
        self.var_hist[adj.len()] -= 1;
        self.var_alive[v] = false;
        self.alive_vars -= 1;
        self.counters.touches += adj.len() as u64;
        for &c in &adj {
            let c = c as usize;
            let old = self.check_adj[c].len();
            self.counters.touches += old as u64;
            let found = remove_value(&mut self.check_adj[c], v as u32);
            debug_assert!(found, "asymmetric adjacency at ({v}, {c})");
            self.edges -= 1;
            self.parity[c] ^= bit;
            self.check_shrunk(c, old)?;
        }
        Ok(())
    }

    /// One BP step: copies the parity of a degree-one check into its variable
    /// and removes both. Returns `None` when no degree-one check is left.
    pub fn remove_degree1_check(&mut self, ledger: &mut ResolutionLedger) -> Result<Option<(usize, u8)>> {
        let Some(c) = self.peek_degree1() else {
            return Ok(None);
        };
        self.deg1.pop_front();
        self.peel_check(c, ledger).map(Some)
    }

    /// Peels a specific degree-one check, bypassing the queue order.
    pub fn peel_check(&mut self, c: usize, ledger: &mut ResolutionLedger) -> Result<(usize, u8)> {
        if !self.check_alive[c] || self.check_adj[c].len() != 1 {
            return Err(Error::BadCheckDegree {
                check: c,
                degree: self.check_adj[c].len(),
                expected: 1,
            });
        }
        let v = self.check_adj[c][0] as usize;
        let bit = self.parity[c];
        // The check's single edge goes with the variable.
        self.kill_check(c);
        let found = remove_value(&mut self.var_adj[v], c as u32);
        debug_assert!(found);
        Self::hist_move(&mut self.var_hist, self.var_adj[v].len() + 1, self.var_adj[v].len());
        self.remove_known_var(v, bit)?;
        ledger.assign(v, bit);
        self.counters.peels += 1;
        Ok((v, bit))
    }

    /// Eliminates a degree-two check: one of its variables is removed and its
    /// edges are moved onto the other, cancelling edges to checks both already
    /// touch. The higher-degree variable survives (ties to the lower index).
    pub fn merge_variables(&mut self, check: usize, ledger: &mut ResolutionLedger) -> Result<MergeReport> {
        if !self.check_alive[check] || self.check_adj[check].len() != 2 {
            return Err(Error::BadCheckDegree {
                check,
                degree: self.check_adj[check].len(),
                expected: 2,
            });
        }
        let (a, b) = (self.check_adj[check][0] as usize, self.check_adj[check][1] as usize);
        let (da, db) = (self.var_adj[a].len(), self.var_adj[b].len());
        let (survivor, removed) = if da > db || (da == db && a < b) { (a, b) } else { (b, a) };
        let (ds, dr) = (self.var_adj[survivor].len(), self.var_adj[removed].len());
        let parity = self.parity[check];

        self.kill_check(check);
        remove_value(&mut self.var_adj[survivor], check as u32);
        remove_value(&mut self.var_adj[removed], check as u32);
        self.var_hist[ds] -= 1;
        self.var_hist[dr] -= 1;
        self.var_alive[removed] = false;
        self.alive_vars -= 1;

        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.stamp = 1;
        }
        for &c in &self.var_adj[survivor] {
            self.mark[c as usize] = self.stamp;
        }
        self.counters.touches += (ds + dr) as u64;

        let moved = std::mem::take(&mut self.var_adj[removed]);
        let mut shared = Vec::new();
        let mut new_degree1 = Vec::new();
        let mut emptied = Vec::new();
        for &c in &moved {
            let c = c as usize;
            let old = self.check_adj[c].len();
            self.counters.touches += old as u64;
            self.parity[c] ^= parity;
            if self.mark[c] == self.stamp {
                remove_value(&mut self.check_adj[c], removed as u32);
                remove_value(&mut self.check_adj[c], survivor as u32);
                self.edges -= 2;
                shared.push(c);
                self.check_shrunk(c, old)?;
                match self.check_adj[c].len() {
                    0 => emptied.push(c),
                    1 => new_degree1.push(c),
                    _ => {}
                }
            } else {
                let slot = self.check_adj[c]
                    .iter_mut()
                    .find(|x| **x == removed as u32)
                    .expect("asymmetric adjacency");
                *slot = survivor as u32;
                self.var_adj[survivor].push(c as u32);
            }
        }
        if !shared.is_empty() {
            self.var_adj[survivor].retain(|c| !shared.contains(&(*c as usize)));
            self.counters.touches += ds as u64;
            self.counters.shared_merges += 1;
        }
        bump(&mut self.var_hist, self.var_adj[survivor].len());
        ledger.link(removed, survivor, parity);
        self.counters.merges += 1;
        Ok(MergeReport {
            survivor,
            removed,
            parity,
            shared,
            new_degree1,
            emptied,
        })
    }

    /// Walks the whole structure and reports the first broken invariant.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let mut edges = 0;
        let mut check_hist = vec![0usize; self.check_hist.len().max(1)];
        for c in 0..self.num_checks() {
            let adj = &self.check_adj[c];
            if !self.check_alive[c] {
                if !adj.is_empty() {
                    return Err(format!("dead check {c} has neighbors"));
                }
                continue;
            }
            if adj.is_empty() {
                return Err(format!("alive check {c} has degree 0"));
            }
            let mut sorted = adj.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != adj.len() {
                return Err(format!("parallel edge at check {c}"));
            }
            for &v in adj {
                if !self.var_alive[v as usize] || !self.var_adj[v as usize].contains(&(c as u32)) {
                    return Err(format!("asymmetric edge ({v}, {c})"));
                }
            }
            let queue = match adj.len() {
                1 => Some(&self.deg1),
                2 => Some(&self.deg2),
                _ => None,
            };
            if let Some(q) = queue {
                if !q.contains(&(c as u32)) {
                    return Err(format!("check {c} of degree {} missing from queue", adj.len()));
                }
            }
            edges += adj.len();
            bump(&mut check_hist, adj.len());
        }
        let mut var_hist = vec![0usize; self.var_hist.len().max(1)];
        let mut alive_vars = 0;
        for v in 0..self.num_vars() {
            let adj = &self.var_adj[v];
            if !self.var_alive[v] {
                if !adj.is_empty() {
                    return Err(format!("dead variable {v} has neighbors"));
                }
                continue;
            }
            alive_vars += 1;
            let mut sorted = adj.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != adj.len() {
                return Err(format!("parallel edge at variable {v}"));
            }
            for &c in adj {
                if !self.check_alive[c as usize] || !self.check_adj[c as usize].contains(&(v as u32)) {
                    return Err(format!("asymmetric edge ({v}, {c})"));
                }
            }
            bump(&mut var_hist, adj.len());
        }
        if edges != self.edges {
            return Err(format!("edge count {} but counted {edges}", self.edges));
        }
        if alive_vars != self.alive_vars {
            return Err(format!("alive variable count {} but counted {alive_vars}", self.alive_vars));
        }
        if self.check_alive.iter().filter(|&&a| a).count() != self.alive_checks {
            return Err("alive check count mismatch".into());
        }
        let norm = |h: &[usize]| {
            let end = h.iter().rposition(|&c| c > 0).map_or(0, |i| i + 1);
            h[..end].to_vec()
        };
        if norm(&var_hist) != norm(&self.var_hist) {
            return Err("variable degree histogram mismatch".into());
        }
        if norm(&check_hist) != norm(&self.check_hist) {
            return Err("check degree histogram mismatch".into());
        }
        Ok(())
    }

    /// The residual graph in the graph file format, preceded by a
    /// `# stalled-at` comment.
    pub fn dump_residual(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "# stalled-at peels={} merges={} alive_vars={} alive_checks={}",
            self.counters.peels, self.counters.merges, self.alive_vars, self.alive_checks
        )
        .unwrap();
        writeln!(s, "n {} m {} E {}", self.num_vars(), self.num_checks(), self.edges).unwrap();
        for c in self.alive_check_indices() {
            write!(s, "{c} {}", self.parity[c]).unwrap();
            let mut adj = self.check_adj[c].clone();
            adj.sort_unstable();
            for v in adj {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}
