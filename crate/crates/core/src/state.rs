//! State indexing for a family level: a bijection between states and
//! `0..|V(n)|`, a parity class per state, and embeddings into larger levels.

use crate::error::{Error, Result};
use std::collections::HashMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
    pub fn of_steps(t: u64) -> Parity {
        if t.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Index of the designated origin state (root, all-zeros vector, walk start).
/// Families construct their `StateIndex` so the origin is listed first and
/// carries even parity; parity of every other state is its distance parity
/// from the origin.
pub const ORIGIN: u32 = 0;

#[derive(Clone, Debug)]
pub struct StateIndex {
    level: u32,
    keys: Vec<u128>,
    pos: HashMap<u128, u32>,
    parity: Vec<Parity>,
}

impl StateIndex {
    /// `states` lists `(key, parity)` in index order; the origin must come
    /// first with even parity. Keys are the family's intrinsic state
    /// encoding and must be stable across levels.
    pub fn new(level: u32, states: Vec<(u128, Parity)>) -> Self {
        assert!(!states.is_empty(), "state space must be nonempty");
        assert_eq!(states[0].1, Parity::Even, "origin must have even parity");
        let mut pos = HashMap::with_capacity(states.len());
        let mut keys = Vec::with_capacity(states.len());
        let mut parity = Vec::with_capacity(states.len());
        for (i, (key, p)) in states.into_iter().enumerate() {
            let prev = pos.insert(key, i as u32);
            assert!(prev.is_none(), "duplicate state key {key}");
            keys.push(key);
            parity.push(p);
        }
        StateIndex { level, keys, pos, parity }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, index: u32) -> u128 {
        self.keys[index as usize]
    }

    pub fn index_of(&self, key: u128) -> Option<u32> {
        self.pos.get(&key).copied()
    }

    pub fn parity_of(&self, index: u32) -> Parity {
        self.parity[index as usize]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parity
    }

    /// Indices of the even parity class (the class of the origin).
    pub fn even_class(&self) -> Vec<u32> {
        (0..self.len() as u32).filter(|&i| self.parity[i as usize] == Parity::Even).collect()
    }

    /// Maps every index of `self` to its index in `larger`. States keep
    /// their identity across levels, so the map is a key lookup; it errors
    /// if some state of `self` does not exist in `larger`.
    pub fn embed_into(&self, larger: &StateIndex) -> Result<Vec<u32>> {
        let mut map = Vec::with_capacity(self.len());
        for (i, key) in self.keys.iter().enumerate() {
            match larger.index_of(*key) {
                Some(j) => map.push(j),
                None => return Err(Error::EmbeddingMissing { index: i }),
            }
        }
        Ok(map)
    }
}
