//! Finite-range checks of the metric small-cancellation condition `C'(λ)` and of
//! the no-proper-power property for the relator family.
//!
//! A piece is a common prefix of two distinct words of the symmetrized set.
//! Everything here is verified only up to an explicit `max_index`; nothing claims
//! the condition for the whole infinite family.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::presentation::{relator, relator_length, symmetrized_for_index, Sign, SymmetrizedRelator};
use crate::words::{Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmallCancellationError {
    #[error("lambda must satisfy 0 < lambda < 1, got {0}")]
    LambdaOutOfRange(Ratio<i64>),
}

fn common_prefix(u: &Word, v: &Word) -> usize {
    u.letters()
        .iter()
        .zip(v.letters())
        .take_while(|(a, b)| a == b)
        .count()
}

/// Longest piece between the symmetrized sets of `r_i` and `r_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PieceReport {
    pub relator_index_pair: (usize, usize),
    pub piece: Word,
    pub piece_length: usize,
    /// `min(|r_i|, |r_j|)`; the `C'(λ)` bound for this pair is `λ` times this.
    pub shorter_relator_length: usize,
}

impl PieceReport {
    pub fn bound(&self, lambda: Ratio<i64>) -> Ratio<i64> {
        lambda * Ratio::from_integer(self.shorter_relator_length as i64)
    }
}

fn distinct_words(index: usize) -> Vec<Word> {
    let mut words: Vec<Word> = symmetrized_for_index(index)
        .iter()
        .map(|s| s.word.clone())
        .collect();
    words.sort();
    words.dedup();
    words
}

/// Pairwise scan over the symmetrized sets of `r_i` and `r_j`, skipping a word
/// paired with itself.
pub fn max_piece_length(i: usize, j: usize) -> PieceReport {
    let left = distinct_words(i);
    let right = distinct_words(j);
    let best = left
        .par_iter()
        .map(|u| {
            right
                .iter()
                .filter(|v| *v != u)
                .map(|v| (common_prefix(u, v), u))
                .max_by_key(|(len, _)| *len)
                .unwrap_or((0, u))
        })
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(a.1)))
        .expect("symmetrized sets are nonempty");
    let (len, witness) = best;
    PieceReport {
        relator_index_pair: (i, j),
        piece: Word::from_letters(witness.letters()[..len].iter().copied()),
        piece_length: len,
        shorter_relator_length: relator_length(i.min(j)),
    }
}

/// The worst piece found inside one symmetrized relator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PieceWitness {
    pub relator_index: usize,
    pub sign: Sign,
    pub rotation: usize,
    pub piece: Word,
    pub piece_length: usize,
    pub relator_length: usize,
}

impl PieceWitness {
    pub fn ratio(&self) -> Ratio<i64> {
        Ratio::new(self.piece_length as i64, self.relator_length as i64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub lambda: String,
    pub max_index: usize,
    pub pass: bool,
    /// Symmetrized relator attaining the largest `|piece| / |r|`.
    pub worst: PieceWitness,
    pub worst_ratio: String,
    /// Number of symmetrized words (after dedup) whose longest piece breaks the bound.
    pub violations: usize,
    /// First violating word per relator index.
    pub first_violations: BTreeMap<usize, PieceWitness>,
    pub checked_words: usize,
}

/// Checks `|p| < λ |r|` for every piece `p` that is a prefix of a symmetrized relator
/// `r` of index `<= max_index`.
///
/// Sorts the whole symmetrized set once: the longest common prefix of a word with any
/// other word of the set is attained at one of its sorted neighbours.
pub fn verify_metric_condition(
    lambda: Ratio<i64>,
    max_index: usize,
) -> Result<MetricReport, SmallCancellationError> {
    if lambda <= Ratio::from_integer(0) || lambda >= Ratio::from_integer(1) {
        return Err(SmallCancellationError::LambdaOutOfRange(lambda));
    }
    let tables: Vec<_> = (0..=max_index).map(symmetrized_for_index).collect();
    let mut all: Vec<&SymmetrizedRelator> = tables.iter().flat_map(|t| t.iter()).collect();
    all.sort_by(|a, b| {
        a.word
            .cmp(&b.word)
            .then((a.index, a.sign, a.rotation).cmp(&(b.index, b.sign, b.rotation)))
    });
    all.dedup_by(|later, earlier| later.word == earlier.word);

    let (num, den) = (*lambda.numer(), *lambda.denom());
    let mut worst: Option<PieceWitness> = None;
    let mut violations = 0;
    let mut first_violations = BTreeMap::new();
    for (k, s) in all.iter().enumerate() {
        let before = if k > 0 { common_prefix(&all[k - 1].word, &s.word) } else { 0 };
        let after = all
            .get(k + 1)
            .map_or(0, |next| common_prefix(&s.word, &next.word));
        let piece_length = before.max(after);
        let witness = PieceWitness {
            relator_index: s.index,
            sign: s.sign,
            rotation: s.rotation,
            piece: Word::from_letters(s.word.letters()[..piece_length].iter().copied()),
            piece_length,
            relator_length: s.word.len(),
        };
        if (piece_length as i64) * den >= num * s.word.len() as i64 {
            violations += 1;
            first_violations
                .entry(s.index)
                .or_insert_with(|| witness.clone());
        }
        let replace = match &worst {
            None => true,
            Some(w) => {
                let (a, b) = (witness.ratio(), w.ratio());
                a > b || (a == b && (witness.relator_index, witness.rotation) < (w.relator_index, w.rotation))
            }
        };
        if replace {
            worst = Some(witness);
        }
    }
    let worst = worst.expect("symmetrized set is nonempty");
    Ok(MetricReport {
        lambda: lambda.to_string(),
        max_index,
        pass: violations == 0,
        worst_ratio: worst.ratio().to_string(),
        worst,
        violations,
        first_violations,
        checked_words: all.len(),
    })
}

/// If the cyclic word `w` equals `u^k` with `k >= 2`, returns the shortest such root.
pub fn is_proper_power(w: &Word) -> Result<Option<(Word, usize)>, WordError> {
    if !w.is_cyclically_reduced() {
        return Err(WordError::NotCyclicallyReduced(w.to_string()));
    }
    let letters = w.letters();
    let n = letters.len();
    for period in 1..n {
        if n.is_multiple_of(period) && (period..n).all(|k| letters[k] == letters[k - period]) {
            let root = Word::from_letters(letters[..period].iter().copied());
            return Ok(Some((root, n / period)));
        }
    }
    Ok(None)
}

/// `is_proper_power(r_i)` for each `i <= max_index`; returns the indices that are powers.
pub fn proper_power_relators(max_index: usize) -> Vec<(usize, Word, usize)> {
    (0..=max_index)
        .filter_map(|i| {
            is_proper_power(&relator(i))
                .expect("relators are cyclically reduced")
                .map(|(root, k)| (i, root, k))
        })
        .collect()
}
