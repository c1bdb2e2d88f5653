//! Finite key-indexed families of bipartite states.

use crate::error::{Error, Result};
use crate::linalg::{BipartiteState, DensityMatrix};

/// Key lengths above this are rejected outright.
pub const MAX_KEY_LEN: usize = 20;

/// Bitstring of length `key_len` rendered most significant bit first.
pub fn format_key(key: u64, key_len: usize) -> String {
    (0..key_len)
        .rev()
        .map(|i| if (key >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`format_key`]; the empty string is the single key of length 0.
pub fn parse_key(s: &str) -> Result<(u64, usize)> {
    if s.len() > MAX_KEY_LEN {
        return Err(Error::OutOfRange(format!(
            "key '{s}' longer than {MAX_KEY_LEN} bits"
        )));
    }
    let mut k = 0u64;
    for ch in s.chars() {
        k = (k << 1)
            | match ch {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::OutOfRange(format!("key '{s}' is not a bitstring"))),
            };
    }
    Ok((k, s.len()))
}

/// States `{ψ_k}` indexed by keys `k ∈ {0,1}^key_len` on a fixed `dA ⊗ dB`.
///
/// Not every key needs a state; the key set is whatever was supplied, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyedEnsemble {
    key_len: usize,
    d_a: usize,
    d_b: usize,
    entries: Vec<(u64, BipartiteState)>,
}

impl KeyedEnsemble {
    pub fn new(key_len: usize, mut entries: Vec<(u64, BipartiteState)>) -> Result<Self> {
        if key_len > MAX_KEY_LEN {
            return Err(Error::InvalidEnsemble(format!(
                "key length {key_len} exceeds {MAX_KEY_LEN}"
            )));
        }
        let Some((_, first)) = entries.first() else {
            return Err(Error::InvalidEnsemble("empty key set".into()));
        };
        let (d_a, d_b) = first.dims();
        for (k, s) in &entries {
            if *k >> key_len != 0 {
                return Err(Error::InvalidKey { key: *k, key_len });
            }
            if s.dims() != (d_a, d_b) {
                return Err(Error::InvalidEnsemble(format!(
                    "key {} has dims {:?}, expected {:?}",
                    format_key(*k, key_len),
                    s.dims(),
                    (d_a, d_b)
                )));
            }
        }
        entries.sort_by_key(|(k, _)| *k);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidEnsemble(format!(
                "duplicate key {}",
                format_key(w[0].0, key_len)
            )));
        }
        Ok(KeyedEnsemble {
            key_len,
            d_a,
            d_b,
            entries,
        })
    }

    /// One state per key in `{0,1}^key_len`.
    pub fn from_fn(
        key_len: usize,
        mut f: impl FnMut(u64) -> Result<BipartiteState>,
    ) -> Result<Self> {
        if key_len > MAX_KEY_LEN {
            return Err(Error::InvalidEnsemble(format!(
                "key length {key_len} exceeds {MAX_KEY_LEN}"
            )));
        }
        let entries = (0..1u64 << key_len)
            .map(|k| Ok((k, f(k)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(key_len, entries)
    }

    /// Single-key ensemble (`key_len = 0`).
    pub fn single(state: BipartiteState) -> Self {
        Self::new(0, vec![(0, state)]).expect("one well-formed entry")
    }

    pub fn key_len(&self) -> usize {
        self.key_len
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|(k, _)| *k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BipartiteState)> {
        self.entries.iter().map(|(k, s)| (*k, s))
    }

    pub fn entries(&self) -> &[(u64, BipartiteState)] {
        &self.entries
    }

    pub fn get(&self, key: u64) -> Result<&BipartiteState> {
        self.entries
            .binary_search_by_key(&key, |(k, _)| *k)
            .map(|i| &self.entries[i].1)
            .map_err(|_| Error::InvalidKey {
                key,
                key_len: self.key_len,
            })
    }

    pub fn all_pure(&self, tol: f64) -> bool {
        self.entries
            .iter()
            .all(|(_, s)| s.density().purity() >= 1.0 - tol)
    }

    /// Key-uniform mixture `2^-|K| Σ_k ψ_k` over the supplied keys.
    pub fn mixture(&self) -> DensityMatrix {
        DensityMatrix::average(self.entries.iter().map(|(_, s)| s.density()))
            .expect("ensemble is non-empty")
    }

    /// Replaces every state by `f(state)`; dimensions may change uniformly.
    pub fn map(
        &self,
        mut f: impl FnMut(u64, &BipartiteState) -> Result<BipartiteState>,
    ) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|(k, s)| Ok((*k, f(*k, s)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.key_len, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;

    #[test]
    fn key_strings_round_trip() {
        assert_eq!(format_key(0b01, 2), "01");
        assert_eq!(format_key(5, 4), "0101");
        assert_eq!(format_key(0, 0), "");
        assert_eq!(parse_key("0101").unwrap(), (5, 4));
        assert_eq!(parse_key("").unwrap(), (0, 0));
        assert!(parse_key("012").is_err());
    }

    #[test]
    fn rejects_mismatched_and_duplicate_entries() {
        let bell = BipartiteState::pure(PureState::bell(), 2, 2).unwrap();
        let q3 = BipartiteState::mixed(DensityMatrix::maximally_mixed(6), 2, 3).unwrap();
        assert!(KeyedEnsemble::new(1, vec![(0, bell.clone()), (1, q3)]).is_err());
        assert!(KeyedEnsemble::new(1, vec![(0, bell.clone()), (0, bell.clone())]).is_err());
        assert!(KeyedEnsemble::new(1, vec![(2, bell.clone())]).is_err());
        assert!(KeyedEnsemble::new(1, vec![]).is_err());
        let e = KeyedEnsemble::new(1, vec![(1, bell.clone()), (0, bell)]).unwrap();
        assert_eq!(e.keys().collect::<Vec<_>>(), vec![0, 1]);
        assert!(e.get(1).is_ok());
    }
}
