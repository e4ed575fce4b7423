//! The rooted binary tree viewed as the free semigroup on `{1, 2}`.
//!
//! A vertex is a finite word over `{1, 2}`; the empty word is the root and
//! appending a letter moves to a child. Vertices are ordered shortlex
//! (first by level, then lexicographically), which coincides with the
//! heap order used throughout the crate: the root has index 0 and the
//! children of index `i` are `2i + 1` and `2i + 2`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Vertex {
    word: Vec<u8>,
}

/// Semigroup elements share the vertex representation.
pub type GroupElement = Vertex;

impl Vertex {
    pub fn root() -> Self {
        Vertex { word: Vec::new() }
    }

    pub fn from_word(word: &[u8]) -> Result<Self> {
        if let Some(bad) = word.iter().find(|&&c| c != 1 && c != 2) {
            return Err(Error::InvalidParameter(format!("vertex letter {bad} not in {{1, 2}}")));
        }
        Ok(Vertex { word: word.to_vec() })
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Distance from the root.
    pub fn level(&self) -> usize {
        self.word.len()
    }

    pub fn is_root(&self) -> bool {
        self.word.is_empty()
    }

    pub fn child(&self, letter: u8) -> Vertex {
        debug_assert!(letter == 1 || letter == 2);
        let mut word = self.word.clone();
        word.push(letter);
        Vertex { word }
    }

    pub fn children(&self) -> [Vertex; 2] {
        [self.child(1), self.child(2)]
    }

    pub fn parent(&self) -> Option<Vertex> {
        if self.is_root() {
            None
        } else {
            Some(Vertex { word: self.word[..self.word.len() - 1].to_vec() })
        }
    }

    /// Position in the heap order of the whole tree.
    pub fn heap_index(&self) -> usize {
        let mut idx = 0usize;
        for &c in &self.word {
            idx = 2 * idx + c as usize;
        }
        idx
    }

    pub fn from_heap_index(mut idx: usize) -> Vertex {
        let mut word = Vec::new();
        while idx > 0 {
            let c = if idx % 2 == 1 { 1 } else { 2 };
            word.push(c);
            idx = (idx - c as usize) / 2;
        }
        word.reverse();
        Vertex { word }
    }

    /// Graph distance between two vertices.
    pub fn distance(&self, other: &Vertex) -> usize {
        let common = self.word.iter().zip(&other.word).take_while(|(a, b)| a == b).count();
        self.word.len() + other.word.len() - 2 * common
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word.len().cmp(&other.word.len()).then_with(|| self.word.cmp(&other.word))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        for c in &self.word {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Number of vertices on levels `0..=n`.
pub fn volume_size(n: usize) -> usize {
    (1usize << (n + 1)) - 1
}

/// Vertices at distance exactly `n` from the root, in lexicographic order.
pub fn level_set(n: usize) -> Vec<Vertex> {
    let start = (1usize << n) - 1;
    (start..start + (1usize << n)).map(Vertex::from_heap_index).collect()
}

/// All vertices on levels `0..=n` in heap order.
pub fn volume(n: usize) -> Vec<Vertex> {
    (0..volume_size(n)).map(Vertex::from_heap_index).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairKind {
    /// Parent and child.
    Nearest,
    /// Two children of the same parent.
    OneLevel,
    /// Grandparent and grandchild.
    Prolonged,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NeighborPair {
    pub kind: PairKind,
    pub a: Vertex,
    pub b: Vertex,
}

/// Interacting pairs of the finite volume on levels `0..=n`.
///
/// With `crossing == false` both endpoints lie in the volume. With
/// `crossing == true` only the pairs that reach outside are returned:
/// nearest pairs from level `n` to level `n + 1` and prolonged pairs from
/// level `n - 1` to level `n + 1`. One-level pairs on level `n + 1` and
/// prolonged pairs from level `n` to `n + 2` do not touch the volume's
/// boundary shell and are never part of the boundary Hamiltonian.
pub fn neighbor_pairs(n: usize, crossing: bool) -> Vec<NeighborPair> {
    let mut out = Vec::new();
    if crossing {
        for x in level_set(n) {
            for c in x.children() {
                out.push(NeighborPair { kind: PairKind::Nearest, a: x.clone(), b: c });
            }
        }
        if n >= 1 {
            for x in level_set(n - 1) {
                for c in x.children() {
                    for g in c.children() {
                        out.push(NeighborPair { kind: PairKind::Prolonged, a: x.clone(), b: g });
                    }
                }
            }
        }
        return out;
    }
    for x in volume(n) {
        let l = x.level();
        if l < n {
            let [c1, c2] = x.children();
            out.push(NeighborPair { kind: PairKind::Nearest, a: x.clone(), b: c1.clone() });
            out.push(NeighborPair { kind: PairKind::Nearest, a: x.clone(), b: c2.clone() });
            out.push(NeighborPair { kind: PairKind::OneLevel, a: c1, b: c2 });
        }
        if l + 1 < n {
            for c in x.children() {
                for g in c.children() {
                    out.push(NeighborPair { kind: PairKind::Prolonged, a: x.clone(), b: g });
                }
            }
        }
    }
    out
}

/// Left translation: the word `g` followed by the word `x`.
pub fn translate(g: &GroupElement, x: &Vertex) -> Vertex {
    let mut word = g.word.clone();
    word.extend_from_slice(&x.word);
    Vertex { word }
}

/// Permutation of the two child letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LetterPermutation {
    Identity,
    Swap,
}

impl LetterPermutation {
    pub fn apply(self, letter: u8) -> u8 {
        match self {
            LetterPermutation::Identity => letter,
            LetterPermutation::Swap => 3 - letter,
        }
    }
}

/// Rotation about `g`: permute the first letter of `x` by `gamma`, then
/// translate by `g`.
pub fn rotate(g: &GroupElement, gamma: LetterPermutation, x: &Vertex) -> Vertex {
    let mut word = g.word.clone();
    if let Some((&first, rest)) = x.word.split_first() {
        word.push(gamma.apply(first));
        word.extend_from_slice(rest);
    }
    Vertex { word }
}

/// Membership in the subsemigroup of words whose length is a multiple of `k`.
pub fn in_subsemigroup(k: usize, x: &Vertex) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidParameter("subsemigroup index must be positive".into()));
    }
    Ok(x.level() % k == 0)
}
