use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Fixed-width bitset over the cells of a grid. Bit `j` stands for cell `j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellMask {
    len: usize,
    words: Vec<u64>,
}

impl CellMask {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut m = Self::empty(len);
        for j in 0..len {
            m.insert(j);
        }
        m
    }

    pub fn from_cells(len: usize, cells: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::empty(len);
        for c in cells {
            m.insert(c);
        }
        m
    }

    /// Parses a cell-order bit string such as `"110"` (cell 0 first).
    pub fn from_bit_str(bits: &str) -> Result<Self> {
        let mut m = Self::empty(bits.len());
        for (j, ch) in bits.chars().enumerate() {
            match ch {
                '1' => m.insert(j),
                '0' => {}
                other => return Err(Error::Malformed(format!("bad bit character {other:?}"))),
            }
        }
        Ok(m)
    }

    pub fn to_bit_str(&self) -> String {
        (0..self.len)
            .map(|j| if self.contains(j) { '1' } else { '0' })
            .collect()
    }

    /// Hex encoding: the mask read as an unsigned integer with cell `j` at
    /// bit `j`, most significant nibble first, padded to `ceil(len/4)`
    /// digits and prefixed by the cell count, e.g. `"3:5"` for cells {0,2}.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut out = String::with_capacity(digits + 8);
        out.push_str(&self.len.to_string());
        out.push(':');
        for d in (0..digits).rev() {
            let mut nib = 0u8;
            for b in 0..4 {
                let j = d * 4 + b;
                if j < self.len && self.contains(j) {
                    nib |= 1 << b;
                }
            }
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let (len, hex) = s
            .split_once(':')
            .ok_or_else(|| Error::Malformed(format!("mask {s:?} lacks the `len:` prefix")))?;
        let len: usize = len
            .parse()
            .map_err(|_| Error::Malformed(format!("bad mask length in {s:?}")))?;
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Malformed(format!(
                "mask {s:?} needs {} hex digits",
                len.div_ceil(4)
            )));
        }
        let mut m = Self::empty(len);
        for (i, ch) in hex.chars().rev().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| Error::Malformed(format!("bad hex digit {ch:?}")))?;
            for b in 0..4 {
                if nib & (1 << b) != 0 {
                    let j = i * 4 + b;
                    if j >= len {
                        return Err(Error::Malformed(format!("mask {s:?} sets bits past {len}")));
                    }
                    m.insert(j);
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, j: usize) -> bool {
        j < self.len && self.words[j / 64] & (1u64 << (j % 64)) != 0
    }

    #[inline]
    pub fn insert(&mut self, j: usize) {
        assert!(j < self.len, "cell {j} out of range for mask of {}", self.len);
        self.words[j / 64] |= 1u64 << (j % 64);
    }

    #[inline]
    pub fn remove(&mut self, j: usize) {
        if j < self.len {
            self.words[j / 64] &= !(1u64 << (j % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.len == other.len
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & b == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&j| self.contains(j))
    }

    fn zip_with(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "mask length mismatch");
        Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for CellMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellMask({})", self.to_bit_str())
    }
}

impl Serialize for CellMask {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CellMask {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CellMask::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_encodes_cell_zero_as_low_bit() {
        let m = CellMask::from_bit_str("101").unwrap();
        assert_eq!(m.to_hex(), "3:5");
        let m = CellMask::from_cells(70, [0, 69]);
        assert_eq!(CellMask::from_hex(&m.to_hex()).unwrap(), m);
    }

    #[test]
    fn hex_rejects_stray_bits() {
        assert!(CellMask::from_hex("3:8").is_err());
        assert!(CellMask::from_hex("5").is_err());
        assert!(CellMask::from_hex("8:1").is_err());
    }

    #[test]
    fn set_algebra() {
        let a = CellMask::from_bit_str("1100").unwrap();
        let b = CellMask::from_bit_str("0110").unwrap();
        assert_eq!(a.intersection(&b).to_bit_str(), "0100");
        assert_eq!(a.union(&b).to_bit_str(), "1110");
        assert_eq!(a.difference(&b).to_bit_str(), "1000");
        assert!(!a.is_disjoint(&b));
        assert!(a.intersection(&b).is_subset(&a));
        assert_eq!(a.ones().collect::<Vec<_>>(), vec![0, 1]);
    }
}
