//! Set-cover instances with universe elements identified as `n`-bit vectors.
//!
//! Element `u` is stored as a `u64` mask where bit `i - 1` holds `u_i`, and `u_i = 0`
//! means set `i` covers `u`. Text form writes `u_1` leftmost.

mod generate;
mod params;
mod solve;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{
    planted_instance, planted_instance_with_extras, random_instance, PlantedInstance,
};
pub use params::{gap_params_conjecture, gap_params_lin, GapParams, GapSource};
pub use solve::{greedy_cover, opt_exact, CoverSolution};

pub const MAX_SETS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetCoverError {
    #[error("instance needs at least one set")]
    NoSets,
    #[error("at most {MAX_SETS} sets are supported, got {0}")]
    TooManySets(usize),
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("element {0} is all ones: no set covers it")]
    AllOnesElement(String),
    #[error("element {vector} does not fit in {n} bits")]
    WidthMismatch { vector: String, n: usize },
    #[error("invalid bit string {0:?}")]
    BadBits(String),
    #[error("set index {index} out of range for n = {n}")]
    SetOutOfRange { index: usize, n: usize },
    #[error("cannot draw {requested} distinct elements: only {available} exist")]
    TooManyElements { requested: u64, available: u64 },
    #[error("invalid generator parameter: {0}")]
    BadParameter(String),
    #[error("N = {0} is below 16; the log-log schedule is undefined")]
    NTooSmall(u64),
    #[error("instance JSON: {0}")]
    Json(String),
}

/// Renders the low `n` bits of `mask` with bit 0 leftmost.
pub fn format_bits(mask: u64, n: usize) -> String {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a bit string with the leftmost character as bit 0.
pub fn parse_bits(s: &str) -> Result<(u64, usize), SetCoverError> {
    let s = s.trim();
    if s.is_empty() || s.len() > 64 {
        return Err(SetCoverError::BadBits(s.to_string()));
    }
    let mut mask = 0u64;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => mask |= 1 << i,
            _ => return Err(SetCoverError::BadBits(s.to_string())),
        }
    }
    Ok((mask, s.len()))
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A subset of the sets `[n]`, bit `i - 1` standing for set `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SetSelection(pub u64);

impl SetSelection {
    pub fn from_indices(one_based: impl IntoIterator<Item = usize>) -> Self {
        SetSelection(one_based.into_iter().fold(0, |m, i| m | 1 << (i - 1)))
    }

    pub fn all(n: usize) -> Self {
        SetSelection(full_mask(n))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, one_based: usize) -> bool {
        self.0 >> (one_based - 1) & 1 == 1
    }

    /// 1-based set indices, ascending.
    pub fn indices(&self) -> Vec<usize> {
        crate::combinadic::ones(self.0)
            .map(|t| t as usize + 1)
            .collect()
    }
}

impl fmt::Display for SetSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetCoverInstance {
    n: usize,
    universe: Vec<u64>,
}

/// On-disk form: `{"n": 3, "universe": ["110", "101"]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub universe: Vec<String>,
}

impl SetCoverInstance {
    pub fn from_vectors(n: usize, vectors: &[u64]) -> Result<Self, SetCoverError> {
        Self::from_vectors_reporting(n, vectors).map(|(inst, _)| inst)
    }

    /// Like [`from_vectors`](Self::from_vectors) but also reports how many duplicate
    /// vectors were dropped (first occurrence kept).
    pub fn from_vectors_reporting(
        n: usize,
        vectors: &[u64],
    ) -> Result<(Self, usize), SetCoverError> {
        if n == 0 {
            return Err(SetCoverError::NoSets);
        }
        if n > MAX_SETS {
            return Err(SetCoverError::TooManySets(n));
        }
        let full = full_mask(n);
        let mut universe: Vec<u64> = Vec::with_capacity(vectors.len());
        let mut seen = std::collections::HashSet::new();
        let mut removed = 0;
        for &v in vectors {
            if v & !full != 0 {
                return Err(SetCoverError::WidthMismatch {
                    vector: format!("{v:#b}"),
                    n,
                });
            }
            if v == full {
                return Err(SetCoverError::AllOnesElement(format_bits(v, n)));
            }
            if seen.insert(v) {
                universe.push(v);
            } else {
                removed += 1;
            }
        }
        if universe.is_empty() {
            return Err(SetCoverError::EmptyUniverse);
        }
        if removed > 0 {
            log::debug!("removed {removed} duplicate universe vectors");
        }
        Ok((SetCoverInstance { n, universe }, removed))
    }

    pub fn from_bit_strings<S: AsRef<str>>(n: usize, elems: &[S]) -> Result<Self, SetCoverError> {
        let mut vectors = Vec::with_capacity(elems.len());
        for e in elems {
            let (mask, len) = parse_bits(e.as_ref())?;
            if len != n {
                return Err(SetCoverError::WidthMismatch {
                    vector: e.as_ref().to_string(),
                    n,
                });
            }
            vectors.push(mask);
        }
        Self::from_vectors(n, &vectors)
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self, SetCoverError> {
        Self::from_bit_strings(file.n, &file.universe)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.n,
            universe: self
                .universe
                .iter()
                .map(|&u| format_bits(u, self.n))
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SetCoverError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| SetCoverError::Json(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("instance serializes")
    }

    /// Number of sets.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe(&self) -> &[u64] {
        &self.universe
    }

    pub fn universe_size(&self) -> usize {
        self.universe.len()
    }

    /// Vertex count `N = n + |U|` of the bipartite graph.
    pub fn vertex_count(&self) -> usize {
        self.n + self.universe.len()
    }

    pub fn full(&self) -> u64 {
        full_mask(self.n)
    }

    pub fn contains(&self, x: u64) -> bool {
        self.universe.contains(&x)
    }

    /// Position of `x` in the universe list.
    pub fn position(&self, x: u64) -> Option<usize> {
        self.universe.iter().position(|&u| u == x)
    }

    pub fn check_selection(&self, sel: SetSelection) -> Result<(), SetCoverError> {
        if sel.0 & !self.full() != 0 {
            let index = 64 - sel.0.leading_zeros() as usize;
            return Err(SetCoverError::SetOutOfRange { index, n: self.n });
        }
        Ok(())
    }

    /// True iff every element has a zero coordinate inside `sel`.
    pub fn is_cover(&self, sel: SetSelection) -> bool {
        let full = self.full();
        self.universe.iter().all(|&u| !u & full & sel.0 != 0)
    }
}

impl fmt::Display for SetCoverInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let elems: Vec<String> = self
            .universe
            .iter()
            .map(|&u| format_bits(u, self.n))
            .collect();
        write!(f, "n={} U={{{}}}", self.n, elems.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, elems: &[&str]) -> SetCoverInstance {
        SetCoverInstance::from_bit_strings(n, elems).unwrap()
    }

    #[test]
    fn duplicates_are_dropped_keeping_first() {
        let (m, _) = parse_bits("110").unwrap();
        let (m2, _) = parse_bits("101").unwrap();
        let (i, removed) = SetCoverInstance::from_vectors_reporting(3, &[m, m2, m]).unwrap();
        assert_eq!(i.universe(), &[m, m2]);
        assert_eq!(removed, 1);
        assert_eq!(i.to_file().universe, vec!["110", "101"]);
    }

    #[test]
    fn single_element() {
        let i = inst(2, &["01"]);
        assert_eq!(i.universe_size(), 1);
        assert_eq!(i.vertex_count(), 3);
    }

    #[test]
    fn all_ones_rejected() {
        assert_eq!(
            SetCoverInstance::from_bit_strings(2, &["11"]),
            Err(SetCoverError::AllOnesElement("11".into()))
        );
        assert_eq!(
            SetCoverInstance::from_vectors(2, &[]),
            Err(SetCoverError::EmptyUniverse)
        );
        assert_eq!(
            SetCoverInstance::from_vectors(0, &[0]),
            Err(SetCoverError::NoSets)
        );
        assert!(matches!(
            SetCoverInstance::from_bit_strings(3, &["01"]),
            Err(SetCoverError::WidthMismatch { .. })
        ));
    }

    #[test]
    fn cover_checks() {
        let i = inst(3, &["110", "101"]);
        assert!(i.is_cover(SetSelection::from_indices([2, 3])));
        assert!(!i.is_cover(SetSelection::default()));
        assert!(!i.is_cover(SetSelection::from_indices([3])));
        assert!(i.is_cover(SetSelection::all(3)));
    }

    #[test]
    fn json_round_trip() {
        let i = inst(3, &["110", "101"]);
        let text = i.to_json();
        assert_eq!(text, r#"{"n":3,"universe":["110","101"]}"#);
        assert_eq!(SetCoverInstance::from_json(&text).unwrap(), i);
        assert!(SetCoverInstance::from_json("{").is_err());
    }

    #[test]
    fn selection_display() {
        assert_eq!(SetSelection::from_indices([3, 1]).to_string(), "{1,3}");
        assert_eq!(SetSelection::default().to_string(), "{}");
    }

    #[test]
    fn from_vectors_idempotent() {
        let i = inst(3, &["110", "101", "110", "000"]);
        let again = SetCoverInstance::from_vectors(i.n(), i.universe()).unwrap();
        assert_eq!(again, i);
    }
}
