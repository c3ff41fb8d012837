//! Dehn's algorithm for the word problem in `G`, with a replayable trace.
//!
//! A move replaces a subword `m` of the current word that is a prefix of some
//! symmetrized relator `s = m·u` with `|m| > |s|/2` by `u^-1`, then freely reduces.
//! Since `|r_i| = 16i + 8`, a move with relator `r_i` needs `8i + 5` matched
//! letters, so a word of length `n` can only use indices `i <= (n - 5) / 8`.
//!
//! Greendlinger's lemma makes this a decision procedure for `C'(1/6)` presentations.
//! The family here has pieces of length `3i + 1` inside `r_i` (ratio approaching
//! 3/16), so completeness is not guaranteed by that lemma; a `true` verdict is
//! always backed by a trace that [`replay`] re-checks from scratch.
//!
//! The trace records which relator rotation each move consumed. The signed
//! relator indices of a trace are what the central-extension arithmetic pairs
//! against a sequence `α`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentation::{prefix_key, relator, relator_length, Sign};
use crate::words::{free_reduce, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DehnError {
    #[error("word `{0}` contains the central letter z; use the extension solver")]
    CentralLetter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("move {step}: relator index/sign/rotation out of range")]
    BadRelator { step: usize },
    #[error("move {step}: matched length {matched} is not more than half of {relator_length}")]
    TooShort {
        step: usize,
        matched: usize,
        relator_length: usize,
    },
    #[error("move {step}: subword at position {position} does not match the relator")]
    Mismatch { step: usize, position: usize },
    #[error("move {step}: replacement does not complete the relator")]
    BadReplacement { step: usize },
    #[error("replay ended at `{got}`, trace claims `{claimed}`")]
    FinalMismatch { got: Word, claimed: Word },
}

/// Tie-breaking rule when several moves apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Leftmost position, then longest match, then smallest relator index,
    /// then smallest rotation, then `+` before `-`.
    #[default]
    Deterministic,
    /// Uniform choice among all applicable moves, driven by a seeded ChaCha stream.
    SeededRandom(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DehnMove {
    pub position: usize,
    pub matched_length: usize,
    pub relator_index: usize,
    pub sign: Sign,
    pub rotation: usize,
    pub replacement: Word,
}

/// Serialized form of a move: enough to recompute the replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub position: usize,
    pub relator_index: usize,
    pub sign: i64,
    pub rotation: usize,
    pub matched_length: usize,
}

impl From<&DehnMove> for MoveRecord {
    fn from(m: &DehnMove) -> Self {
        MoveRecord {
            position: m.position,
            relator_index: m.relator_index,
            sign: m.sign.value(),
            rotation: m.rotation,
            matched_length: m.matched_length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DehnTrace {
    pub initial: Word,
    pub moves: Vec<DehnMove>,
    pub final_word: Word,
}

impl DehnTrace {
    pub fn records(&self) -> Vec<MoveRecord> {
        self.moves.iter().map(MoveRecord::from).collect()
    }

    /// `Σ sign · α(relator_index)` over the moves.
    pub fn signed_sum(&self, alpha: impl Fn(usize) -> i64) -> i64 {
        self.moves
            .iter()
            .map(|m| m.sign.value() * alpha(m.relator_index))
            .sum()
    }

    /// Multiset of `(relator_index, sign)` pairs, sorted.
    pub fn signed_relators(&self) -> Vec<(usize, i64)> {
        let mut out: Vec<_> = self
            .moves
            .iter()
            .map(|m| (m.relator_index, m.sign.value()))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Relators `r_i` and `r_i^-1`, each stored twice in a row so that every rotation
/// is a contiguous slice, plus a lookup from five-letter prefixes to rotations.
#[derive(Default)]
struct MoveIndex {
    doubled: Vec<[Vec<Letter>; 2]>,
    buckets: HashMap<u64, Vec<(usize, Sign, usize)>>,
}

impl MoveIndex {
    fn extend_to(&mut self, max_index: usize) {
        while self.doubled.len() <= max_index {
            let i = self.doubled.len();
            let r = relator(i);
            let forms = [r.clone(), r.inverse()];
            let doubled = forms.map(|f| {
                let mut v = f.letters().to_vec();
                v.extend_from_slice(f.letters());
                v
            });
            let len = r.len();
            for (sign, d) in [(Sign::Plus, &doubled[0]), (Sign::Minus, &doubled[1])] {
                for rotation in 0..len {
                    self.buckets
                        .entry(prefix_key(&d[rotation..]))
                        .or_default()
                        .push((i, sign, rotation));
                }
            }
            self.doubled.push(doubled);
        }
    }

    fn rotation(&self, index: usize, sign: Sign, rotation: usize) -> &[Letter] {
        let d = &self.doubled[index][usize::from(sign == Sign::Minus)];
        &d[rotation..rotation + relator_length(index)]
    }

    /// Every move available at `position`, with the longest match per rotation.
    fn moves_at(&self, letters: &[Letter], position: usize, max_index: usize, out: &mut Vec<Candidate>) {
        let rest = &letters[position..];
        if rest.len() < 5 {
            return;
        }
        let Some(bucket) = self.buckets.get(&prefix_key(rest)) else {
            return;
        };
        for &(index, sign, rotation) in bucket {
            if index > max_index || 8 * index + 5 > rest.len() {
                // entries are in increasing index order
                break;
            }
            let s = self.rotation(index, sign, rotation);
            let matched = s.iter().zip(rest).take_while(|(a, b)| a == b).count();
            if 2 * matched > s.len() {
                out.push(Candidate {
                    position,
                    matched,
                    index,
                    sign,
                    rotation,
                });
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Candidate {
    position: usize,
    matched: usize,
    index: usize,
    sign: Sign,
    rotation: usize,
}

impl Candidate {
    fn priority(&self) -> (usize, std::cmp::Reverse<usize>, usize, usize, Sign) {
        (
            self.position,
            std::cmp::Reverse(self.matched),
            self.index,
            self.rotation,
            self.sign,
        )
    }
}

fn move_index() -> &'static RwLock<MoveIndex> {
    static INDEX: OnceLock<RwLock<MoveIndex>> = OnceLock::new();
    INDEX.get_or_init(|| RwLock::new(MoveIndex::default()))
}

/// Largest relator index a move on a word of length `n` can use.
fn index_bound(n: usize) -> Option<usize> {
    (n >= 5).then(|| (n - 5) / 8)
}

fn with_index<T>(max_index: usize, f: impl FnOnce(&MoveIndex) -> T) -> T {
    {
        let guard = move_index().read().expect("move index poisoned");
        if guard.doubled.len() > max_index {
            return f(&guard);
        }
    }
    move_index()
        .write()
        .expect("move index poisoned")
        .extend_to(max_index);
    f(&move_index().read().expect("move index poisoned"))
}

fn choose(w: &Word, rng: Option<&mut ChaCha8Rng>) -> Option<DehnMove> {
    let max_index = index_bound(w.len())?;
    let letters = w.letters();
    with_index(max_index, |index| {
        let mut candidates = Vec::new();
        let chosen = match rng {
            None => {
                for position in 0..letters.len() {
                    index.moves_at(letters, position, max_index, &mut candidates);
                    if !candidates.is_empty() {
                        break;
                    }
                }
                candidates.iter().min_by_key(|c| c.priority()).copied()
            }
            Some(rng) => {
                for position in 0..letters.len() {
                    index.moves_at(letters, position, max_index, &mut candidates);
                }
                candidates.choose(rng).copied()
            }
        }?;
        let s = index.rotation(chosen.index, chosen.sign, chosen.rotation);
        Some(DehnMove {
            position: chosen.position,
            matched_length: chosen.matched,
            relator_index: chosen.index,
            sign: chosen.sign,
            rotation: chosen.rotation,
            replacement: Word::from_letters(s[chosen.matched..].iter().copied()).inverse(),
        })
    })
}

/// The move the deterministic strategy would make next, if any.
pub fn find_dehn_move(w: &Word) -> Option<DehnMove> {
    choose(w, None)
}

fn apply(w: &Word, m: &DehnMove) -> Word {
    let letters = w.letters();
    free_reduce(
        letters[..m.position]
            .iter()
            .chain(m.replacement.letters())
            .chain(&letters[m.position + m.matched_length..])
            .copied(),
    )
}

/// Applies moves until none fits. Each move strictly shortens the word, so this
/// performs at most `|w|` moves.
pub fn dehn_reduce(w: &Word, strategy: Strategy) -> DehnTrace {
    let mut rng = match strategy {
        Strategy::Deterministic => None,
        Strategy::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut current = w.clone();
    let mut moves = Vec::new();
    while let Some(m) = choose(&current, rng.as_mut()) {
        let next = apply(&current, &m);
        debug_assert!(next.len() < current.len());
        current = next;
        moves.push(m);
    }
    DehnTrace {
        initial: w.clone(),
        moves,
        final_word: current,
    }
}

fn reject_central(w: &Word) -> Result<(), DehnError> {
    if w.contains_central() {
        Err(DehnError::CentralLetter(w.to_string()))
    } else {
        Ok(())
    }
}

/// Decides whether `w` is the identity of `G`, returning the deterministic trace.
pub fn is_trivial_in_g(w: &Word) -> Result<(bool, DehnTrace), DehnError> {
    is_trivial_in_g_with(w, Strategy::Deterministic)
}

pub fn is_trivial_in_g_with(w: &Word, strategy: Strategy) -> Result<(bool, DehnTrace), DehnError> {
    reject_central(w)?;
    let trace = dehn_reduce(w, strategy);
    Ok((trace.final_word.is_empty(), trace))
}

pub fn are_equal_in_g(u: &Word, v: &Word) -> Result<bool, DehnError> {
    reject_central(u)?;
    reject_central(v)?;
    Ok(is_trivial_in_g(&u.concat(&v.inverse()))?.0)
}

/// Re-applies recorded moves to `initial`, recomputing every relator rotation from
/// scratch, and returns the word reached.
pub fn replay(initial: &Word, moves: &[MoveRecord]) -> Result<Word, ReplayError> {
    let mut current = initial.clone();
    for (step, m) in moves.iter().enumerate() {
        let sign = Sign::from_value(m.sign).ok_or(ReplayError::BadRelator { step })?;
        let len = relator_length(m.relator_index);
        if m.rotation >= len {
            return Err(ReplayError::BadRelator { step });
        }
        let base = match sign {
            Sign::Plus => relator(m.relator_index),
            Sign::Minus => relator(m.relator_index).inverse(),
        };
        let s = base.rotation(m.rotation);
        if 2 * m.matched_length <= len || m.matched_length > len {
            return Err(ReplayError::TooShort {
                step,
                matched: m.matched_length,
                relator_length: len,
            });
        }
        let letters = current.letters();
        let end = m.position + m.matched_length;
        if end > letters.len() || letters[m.position..end] != s.letters()[..m.matched_length] {
            return Err(ReplayError::Mismatch {
                step,
                position: m.position,
            });
        }
        let replacement = Word::from_letters(s.letters()[m.matched_length..].iter().copied()).inverse();
        let matched = Word::from_letters(letters[m.position..end].iter().copied());
        // matched · replacement^-1 must spell the relator rotation
        if matched.concat(&replacement.inverse()) != s {
            return Err(ReplayError::BadReplacement { step });
        }
        current = free_reduce(
            letters[..m.position]
                .iter()
                .chain(replacement.letters())
                .chain(&letters[end..])
                .copied(),
        );
    }
    Ok(current)
}

/// Replays a trace and checks it lands on the recorded final word.
pub fn verify_trace(trace: &DehnTrace) -> Result<(), ReplayError> {
    let got = replay(&trace.initial, &trace.records())?;
    if got != trace.final_word {
        return Err(ReplayError::FinalMismatch {
            got,
            claimed: trace.final_word.clone(),
        });
    }
    Ok(())
}
