//! The relator family `r_i = [t1^i a1 t1^-i, t2^i a2 t2^-i][t3^i a3 t3^-i, t4^i a4 t4^-i]`
//! of the base group `G` and its symmetrized closure.
//!
//! The presentation is infinite, so nothing here materializes "all" relators:
//! callers always bound the index range.

use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::words::{Generator, Letter, Word};

/// Sign of a relator occurrence: `r_i` itself or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// Length of `r_i`.
pub fn relator_length(i: usize) -> usize {
    16 * i + 8
}

fn conjugated_a(k: usize, i: usize) -> Word {
    let t = Word::generator(Generator::t(k));
    t.pow(i as i64)
        .concat(&Word::generator(Generator::a(k)))
        .concat(&t.pow(-(i as i64)))
}

fn commutator(x: &Word, y: &Word) -> Word {
    x.concat(y).concat(&x.inverse()).concat(&y.inverse())
}

/// The relator `r_i`.
pub fn relator(i: usize) -> Word {
    let x: Vec<Word> = (1..=4).map(|k| conjugated_a(k, i)).collect();
    let r = commutator(&x[0], &x[1]).concat(&commutator(&x[2], &x[3]));
    assert_eq!(r.len(), relator_length(i), "relator {i} expanded to the wrong length");
    r
}

/// A rotation of `r_i^sign`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrizedRelator {
    pub index: usize,
    pub sign: Sign,
    pub rotation: usize,
    pub word: Word,
}

/// Rotation `rotation` of `r_index^sign`.
pub fn symmetrized_word(index: usize, sign: Sign, rotation: usize) -> Word {
    let base = relator(index);
    match sign {
        Sign::Plus => base.rotation(rotation),
        Sign::Minus => base.inverse().rotation(rotation),
    }
}

fn build_symmetrized(index: usize) -> Vec<SymmetrizedRelator> {
    let r = relator(index);
    let mut out = Vec::with_capacity(2 * r.len());
    for (sign, base) in [(Sign::Plus, r.clone()), (Sign::Minus, r.inverse())] {
        for rotation in 0..base.len() {
            out.push(SymmetrizedRelator {
                index,
                sign,
                rotation,
                word: base.rotation(rotation),
            });
        }
    }
    out
}

fn cache() -> &'static RwLock<Vec<Arc<[SymmetrizedRelator]>>> {
    static CACHE: OnceLock<RwLock<Vec<Arc<[SymmetrizedRelator]>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// The symmetrized forms of a single relator `r_index`: `+` rotations first, then `-`.
/// Memoized process-wide.
pub fn symmetrized_for_index(index: usize) -> Arc<[SymmetrizedRelator]> {
    if let Some(hit) = cache().read().expect("relator cache poisoned").get(index) {
        return hit.clone();
    }
    let mut guard = cache().write().expect("relator cache poisoned");
    while guard.len() <= index {
        let next = guard.len();
        guard.push(build_symmetrized(next).into());
    }
    guard[index].clone()
}

/// All rotations of `r_i` and `r_i^-1` for `0 <= i <= max_index`.
pub fn symmetrized_relators(max_index: usize) -> Vec<SymmetrizedRelator> {
    (0..=max_index)
        .flat_map(|i| symmetrized_for_index(i).iter().cloned().collect::<Vec<_>>())
        .collect()
}

/// Packs the first five letters of a word into a lookup key.
pub(crate) fn prefix_key(letters: &[Letter]) -> u64 {
    letters[..5]
        .iter()
        .fold(0u64, |acc, l| acc << 8 | u64::from(l.code()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    #[test]
    fn relator_zero() {
        let r = relator(0);
        assert_eq!(r, w("a1 a2 a1^-1 a2^-1 a3 a4 a3^-1 a4^-1"));
        assert_eq!(r.len(), 8);
    }

    #[test]
    fn relator_one() {
        assert_eq!(
            relator(1),
            w("t1 a1 t1^-1 t2 a2 t2^-1 t1 a1^-1 t1^-1 t2 a2^-1 t2^-1 \
               t3 a3 t3^-1 t4 a4 t4^-1 t3 a3^-1 t3^-1 t4 a4^-1 t4^-1")
        );
        assert_eq!(relator(1).len(), 24);
        assert_eq!(relator(5).len(), 88);
    }

    #[test]
    fn relators_are_cyclically_reduced_commutator_products() {
        for i in 0..=20 {
            let r = relator(i);
            assert!(r.is_cyclically_reduced(), "r_{i}");
            assert_eq!(r.len(), 16 * i + 8);
            assert!(!r.contains_central());
            assert_eq!(r.exponent_sums(), [0; 9], "r_{i} exponent sums");
        }
    }

    #[test]
    fn symmetrized_counts() {
        assert_eq!(symmetrized_relators(0).len(), 16);
        assert_eq!(symmetrized_relators(1).len(), 64);
        let expected: usize = (0..=6).map(|i| 2 * (16 * i + 8)).sum();
        assert_eq!(symmetrized_relators(6).len(), expected);
    }

    #[test]
    fn symmetrized_words_match_their_labels() {
        for s in symmetrized_relators(2) {
            assert_eq!(s.word, symmetrized_word(s.index, s.sign, s.rotation));
            assert_eq!(s.word.len(), relator_length(s.index));
            // rotations of a cyclically reduced word stay reduced
            assert_eq!(Word::from_letters(s.word.letters().iter().copied()), s.word);
        }
    }
}
