use crate::channel::ReceivedWord;
use crate::error::{Error, Result};

/// Parity-tracked forest of variable merges.
///
/// A merged variable points at the variable that absorbed it, together with
/// the parity of the degree-two check that joined them, so that
/// `value(removed) = value(survivor) ⊕ parity` once the survivor is known.
#[derive(Clone, Debug)]
pub struct ResolutionLedger {
    parent: Vec<u32>,
    offset: Vec<u8>,
    value: Vec<Option<u8>>,
    merges: usize,
}

impl ResolutionLedger {
    /// All variables unknown and unlinked.
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            offset: vec![0; n],
            value: vec![None; n],
            merges: 0,
        }
    }

    /// Seeds known values from the channel output.
    pub fn from_received(received: &ReceivedWord) -> Self {
        let mut ledger = Self::new(received.len());
        ledger.value.clone_from(&received.values);
        ledger
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn merges(&self) -> usize {
        self.merges
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.parent[v] as usize == v
    }

    /// Records a de-erased representative.
    pub fn assign(&mut self, v: usize, bit: u8) {
        debug_assert!(self.is_root(v), "assigning a merged variable {v}");
        self.value[v] = Some(bit & 1);
    }

    /// Records that `removed` equals `survivor ⊕ parity`. Both must be roots.
    pub fn link(&mut self, removed: usize, survivor: usize, parity: u8) {
        debug_assert!(self.is_root(removed) && self.is_root(survivor) && removed != survivor);
        self.parent[removed] = survivor as u32;
        self.offset[removed] = parity & 1;
        self.merges += 1;
    }

    /// Representative of `v` and the XOR of parities along the path, with
    /// path compression.
    pub fn find(&mut self, v: usize) -> (usize, u8) {
        let mut path = Vec::new();
        let mut cur = v;
        while !self.is_root(cur) {
            path.push(cur);
            cur = self.parent[cur] as usize;
        }
        let root = cur;
        // walk back from the node nearest the root, accumulating parity
        let mut acc = 0u8;
        for &node in path.iter().rev() {
            acc ^= self.offset[node];
            self.offset[node] = acc;
            self.parent[node] = root as u32;
        }
        (root, self.offset[v] * u8::from(v != root))
    }

    /// Value of `v` if its representative is resolved.
    pub fn value_of(&mut self, v: usize) -> Option<u8> {
        let (root, parity) = self.find(v);
        self.value[root].map(|b| b ^ parity)
    }

    /// Full assignment; `None` where the representative is still erased.
    pub fn resolve(&mut self) -> Vec<Option<u8>> {
        (0..self.len()).map(|v| self.value_of(v)).collect()
    }

    /// Full assignment, or the list of variables that remain erased.
    pub fn resolve_complete(&mut self) -> Result<Vec<u8>> {
        let values = self.resolve();
        let missing: Vec<usize> = values
            .iter()
            .enumerate()
            .filter_map(|(v, b)| b.is_none().then_some(v))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Unresolved(missing));
        }
        Ok(values.into_iter().map(Option::unwrap).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_link() {
        let mut l = ResolutionLedger::new(2);
        l.link(1, 0, 1);
        l.assign(0, 0);
        assert_eq!(l.resolve(), vec![Some(0), Some(1)]);
    }

    #[test]
    fn chain_accumulates_parity() {
        // V3 -> V2 (p=1), V2 -> V1 (p=1), V1 = 1  =>  V3 = 1 ⊕ 1 ⊕ 1
        let mut l = ResolutionLedger::new(4);
        l.link(3, 2, 1);
        l.link(2, 1, 1);
        l.assign(1, 1);
        assert_eq!(l.value_of(3), Some(1));
        assert_eq!(l.value_of(2), Some(0));
        assert_eq!(l.find(3), (1, 0));
    }

    #[test]
    fn no_merges_is_identity() {
        let rw = ReceivedWord {
            values: vec![Some(1), Some(0), Some(1)],
            epsilon: 0.0,
            seed: 0,
        };
        let mut l = ResolutionLedger::from_received(&rw);
        assert_eq!(l.resolve_complete().unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn unresolved_roots_are_reported() {
        let mut l = ResolutionLedger::new(3);
        l.link(2, 1, 0);
        l.assign(0, 1);
        assert_eq!(l.resolve_complete(), Err(Error::Unresolved(vec![1, 2])));
    }

    #[test]
    fn compression_preserves_values() {
        let mut l = ResolutionLedger::new(6);
        l.link(5, 4, 1);
        l.link(4, 3, 0);
        l.link(3, 2, 1);
        l.link(2, 1, 1);
        l.assign(1, 0);
        let before: Vec<_> = (0..6).map(|v| l.value_of(v)).collect();
        let again: Vec<_> = (0..6).map(|v| l.value_of(v)).collect();
        assert_eq!(before, again);
        assert_eq!(before[5], Some(1));
    }
}
