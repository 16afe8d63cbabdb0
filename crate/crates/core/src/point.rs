//! Points of `({0,1}^ell)^n`, variable ids and index vectors.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const MAX_ELL: usize = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointError {
    #[error("empty point")]
    Empty,
    #[error("block {block} has length {len}, expected {ell}")]
    RaggedBlocks {
        block: usize,
        len: usize,
        ell: usize,
    },
    #[error("invalid character {ch:?} at byte {at}")]
    BadChar { ch: char, at: usize },
    #[error("block length {0} outside 1..={MAX_ELL}")]
    BadEll(usize),
    #[error("block {block} has bits beyond length {ell}")]
    Overflow { block: usize, ell: usize },
}

/// Variable `y_{block+1, pos+1}` (stored 0-based, printed 1-based as `i.t`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub block: usize,
    pub pos: usize,
}

impl Var {
    pub fn new(block: usize, pos: usize) -> Self {
        Var { block, pos }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.block + 1, self.pos + 1)
    }
}

/// `n` blocks of `ell` bits; bit `t` of block `i` is `y_{i+1, t+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiftedPoint {
    ell: usize,
    blocks: Vec<u64>,
}

impl LiftedPoint {
    pub fn new(ell: usize, blocks: Vec<u64>) -> Result<Self, PointError> {
        if ell == 0 || ell > MAX_ELL {
            return Err(PointError::BadEll(ell));
        }
        if blocks.is_empty() {
            return Err(PointError::Empty);
        }
        if let Some(block) = blocks.iter().position(|&b| b >> ell != 0) {
            return Err(PointError::Overflow { block, ell });
        }
        Ok(LiftedPoint { ell, blocks })
    }

    pub(crate) fn from_parts(ell: usize, blocks: Vec<u64>) -> Self {
        debug_assert!(blocks.iter().all(|&b| b >> ell == 0));
        LiftedPoint { ell, blocks }
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> u64 {
        self.blocks[i]
    }

    pub fn bit(&self, var: Var) -> bool {
        self.blocks[var.block] >> var.pos & 1 == 1
    }

    pub fn weights(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.count_ones()).collect()
    }

    /// Bitwise `self <= other`.
    pub fn le(&self, other: &LiftedPoint) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a & !b == 0)
    }

    /// Strictly below in the product order.
    pub fn lt(&self, other: &LiftedPoint) -> bool {
        self.le(other) && self != other
    }

    /// All `n * ell` bits packed as `block * ell + pos`, when they fit in 128 bits.
    pub fn flat(&self) -> Option<u128> {
        if self.n() * self.ell > 128 {
            return None;
        }
        Some(
            self.blocks
                .iter()
                .enumerate()
                .fold(0u128, |acc, (i, &b)| acc | (b as u128) << (i * self.ell)),
        )
    }
}

impl fmt::Display for LiftedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            for t in 0..self.ell {
                f.write_str(if b >> t & 1 == 1 { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl FromStr for LiftedPoint {
    type Err = PointError;

    /// Blocks as `ell`-bit strings joined by `.`, e.g. `110.011`.
    fn from_str(s: &str) -> Result<Self, PointError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PointError::Empty);
        }
        let mut blocks = Vec::new();
        let mut ell = None;
        let mut offset = 0;
        for (bi, part) in s.split('.').enumerate() {
            let len = part.chars().count();
            match ell {
                None => {
                    if len == 0 || len > MAX_ELL {
                        return Err(PointError::BadEll(len));
                    }
                    ell = Some(len)
                }
                Some(e) if e != len => {
                    return Err(PointError::RaggedBlocks {
                        block: bi,
                        len,
                        ell: e,
                    })
                }
                _ => {}
            }
            let mut b = 0u64;
            for (t, ch) in part.char_indices() {
                match ch {
                    '0' => {}
                    '1' => b |= 1 << t,
                    _ => return Err(PointError::BadChar { ch, at: offset + t }),
                }
            }
            blocks.push(b);
            offset += part.len() + 1;
        }
        LiftedPoint::new(ell.unwrap(), blocks)
    }
}

/// One position per block, `j_i` in `0..ell` (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexVector(pub Vec<u32>);

impl IndexVector {
    pub fn get(&self, block: usize) -> u32 {
        self.0[block]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True iff `z_{i, j_i} = 1` for every block.
    pub fn is_one_of(&self, z: &LiftedPoint) -> bool {
        self.0.len() == z.n()
            && self
                .0
                .iter()
                .enumerate()
                .all(|(i, &j)| z.block(i) >> j & 1 == 1)
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
