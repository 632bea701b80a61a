//! Immutable parity-check structure shared by every decode trial, plus the
//! plain-text graph file format:
//!
//! ```text
//! n <n> m <m> E <E>
//! <check-index> <parity-bit> <var-index>...
//! ```
//!
//! Lines starting with `#` are comments. Checks that are not listed are empty.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeGraph {
    n: usize,
    // sorted, duplicate-free
    checks: Vec<Vec<u32>>,
    vars: Vec<Vec<u32>>,
    parity: Vec<u8>,
}

impl CodeGraph {
    /// Builds the graph from check adjacency lists. Repeated variables in a
    /// check cancel mod 2. `parity` of `None` means all-zero right-hand side.
    pub fn from_checks(n: usize, checks: Vec<Vec<u32>>, parity: Option<Vec<u8>>) -> Result<Self> {
        let m = checks.len();
        let parity = parity.unwrap_or_else(|| vec![0; m]);
        if parity.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: parity.len(),
            });
        }
        if let Some(&p) = parity.iter().find(|&&p| p > 1) {
            return Err(Error::Parse(format!("parity bit {p} is not 0/1")));
        }
        let mut vars = vec![Vec::new(); n];
        let mut out = Vec::with_capacity(m);
        for (c, mut adj) in checks.into_iter().enumerate() {
            if let Some(&v) = adj.iter().find(|&&v| v as usize >= n) {
                return Err(Error::Parse(format!("check {c}: variable {v} out of range (n={n})")));
            }
            adj.sort_unstable();
            let adj = collapse_mod2(&adj).0;
            for &v in &adj {
                vars[v as usize].push(c as u32);
            }
            out.push(adj);
        }
        Ok(Self {
            n,
            checks: out,
            vars,
            parity,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn edge_count(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    pub fn check(&self, c: usize) -> &[u32] {
        &self.checks[c]
    }

    pub fn var(&self, v: usize) -> &[u32] {
        &self.vars[v]
    }

    pub fn parity(&self, c: usize) -> u8 {
        self.parity[c]
    }

    pub fn checks(&self) -> impl Iterator<Item = &[u32]> {
        self.checks.iter().map(Vec::as_slice)
    }

    /// `H·wᵀ ⊕ parity` for each check.
    pub fn syndrome(&self, word: &[u8]) -> Vec<u8> {
        self.checks
            .iter()
            .zip(&self.parity)
            .map(|(adj, &p)| adj.iter().fold(p, |acc, &v| acc ^ word[v as usize]))
            .collect()
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n && self.syndrome(word).iter().all(|&s| s == 0)
    }

    /// Serializes into the graph file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "n {} m {} E {}", self.n, self.num_checks(), self.edge_count()).unwrap();
        for (c, adj) in self.checks.iter().enumerate() {
            write!(s, "{c} {}", self.parity[c]).unwrap();
            for v in adj {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "n" || h[2] != "m" || h[4] != "E" {
            return Err(Error::Parse(format!("bad header '{header}'")));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad number '{s}' in header")))
        };
        let (n, m, e) = (num(h[1])?, num(h[3])?, num(h[5])?);
        let mut checks: Vec<Option<Vec<u32>>> = vec![None; m];
        let mut parity = vec![0u8; m];
        for (lineno, line) in lines {
            let mut fields = line.split_whitespace().map(|f| {
                f.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {lineno}: bad field '{f}'")))
            });
            let c = fields.next().unwrap()?;
            if c >= m {
                return Err(Error::Parse(format!("line {lineno}: check {c} out of range")));
            }
            let p = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {lineno}: missing parity")))??;
            if p > 1 {
                return Err(Error::Parse(format!("line {lineno}: parity {p}")));
            }
            let adj = fields
                .map(|f| f.map(|v| v as u32))
                .collect::<Result<Vec<_>>>()?;
            if checks[c].replace(adj).is_some() {
                return Err(Error::Parse(format!("line {lineno}: duplicate check {c}")));
            }
            parity[c] = p as u8;
        }
        let graph = Self::from_checks(
            n,
            checks.into_iter().map(Option::unwrap_or_default).collect(),
            Some(parity),
        )?;
        if graph.edge_count() != e {
            return Err(Error::Parse(format!(
                "header says E {e} but file has {} edges",
                graph.edge_count()
            )));
        }
        Ok(graph)
    }
}

/// Collapses a sorted list so that values with even multiplicity vanish.
/// Returns the survivors and the number of values that appeared more than once.
pub(crate) fn collapse_mod2(sorted: &[u32]) -> (Vec<u32>, usize) {
    let mut out = Vec::with_capacity(sorted.len());
    let mut repeated = 0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if j - i > 1 {
            repeated += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(sorted[i]);
        }
        i = j;
    }
    (out, repeated)
}
