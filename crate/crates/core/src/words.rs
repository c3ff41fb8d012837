//! Free-group words over the fixed alphabet `a1..a4, t1..t4` plus the central letter `z`.
//!
//! Every [`Word`] is freely reduced: constructors reduce eagerly, so no
//! unreduced sequence of letters is ever observable outside this module.
//!
//! Text form: whitespace-separated tokens, each a generator name optionally
//! followed by `^` and a nonzero integer, e.g. `a1 t2^-3 z^2`. Powers are
//! expanded on parse. Formatting emits one token per letter, `^-1` for
//! inverse letters and no exponent otherwise; the empty word is the empty string.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One of the nine generator symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Generator {
    A1 = 0,
    A2,
    A3,
    A4,
    T1,
    T2,
    T3,
    T4,
    /// Generator of the central kernel `Z` of an extension.
    Z,
}

impl Generator {
    pub const ALL: [Generator; 9] = [
        Generator::A1,
        Generator::A2,
        Generator::A3,
        Generator::A4,
        Generator::T1,
        Generator::T2,
        Generator::T3,
        Generator::T4,
        Generator::Z,
    ];

    /// The eight generators of the base group `G`.
    pub const BASE: [Generator; 8] = [
        Generator::A1,
        Generator::A2,
        Generator::A3,
        Generator::A4,
        Generator::T1,
        Generator::T2,
        Generator::T3,
        Generator::T4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::A1 => "a1",
            Generator::A2 => "a2",
            Generator::A3 => "a3",
            Generator::A4 => "a4",
            Generator::T1 => "t1",
            Generator::T2 => "t2",
            Generator::T3 => "t3",
            Generator::T4 => "t4",
            Generator::Z => "z",
        }
    }

    pub fn from_name(name: &str) -> Option<Generator> {
        Generator::ALL.iter().copied().find(|g| g.name() == name)
    }

    pub fn is_central(self) -> bool {
        self == Generator::Z
    }

    /// `a_k` for `k` in `1..=4`.
    pub fn a(k: usize) -> Generator {
        Generator::BASE[k - 1]
    }

    /// `t_k` for `k` in `1..=4`.
    pub fn t(k: usize) -> Generator {
        Generator::BASE[k + 3]
    }

    fn from_index(index: u8) -> Generator {
        Generator::ALL[index as usize]
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A generator raised to the power `+1` or `-1`.
///
/// Packed into one byte (`2 * generator + inverse_bit`) so that words hash and
/// compare as plain byte strings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: Generator, exponent: i8) -> Letter {
        assert!(exponent == 1 || exponent == -1, "letter exponent must be +1 or -1");
        Letter((generator as u8) << 1 | u8::from(exponent < 0))
    }

    pub fn pos(generator: Generator) -> Letter {
        Letter::new(generator, 1)
    }

    pub fn neg(generator: Generator) -> Letter {
        Letter::new(generator, -1)
    }

    pub fn generator(self) -> Generator {
        Generator::from_index(self.0 >> 1)
    }

    pub fn exponent(self) -> i8 {
        if self.0 & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.0 ^ 1 == other.0
    }

    /// Dense code in `0..18`.
    pub fn code(self) -> u8 {
        self.0
    }

    /// All 16 letters over the base generators, then `z` and `z^-1` when `with_central`.
    pub fn alphabet(with_central: bool) -> Vec<Letter> {
        let gens: &[Generator] = if with_central {
            &Generator::ALL
        } else {
            &Generator::BASE
        };
        gens.iter()
            .flat_map(|&g| [Letter::pos(g), Letter::neg(g)])
            .collect()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent() < 0 {
            write!(f, "{}^-1", self.generator())
        } else {
            write!(f, "{}", self.generator())
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed exponent in token `{0}`")]
    BadExponent(String),
    #[error("exponent in token `{0}` must be nonzero")]
    ZeroExponent(String),
    #[error("word `{0}` is not cyclically reduced")]
    NotCyclicallyReduced(String),
}

/// A freely reduced word.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

/// Freely reduces an arbitrary letter sequence.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for letter in raw {
        match out.last() {
            Some(&last) if last.is_inverse_of(letter) => {
                out.pop();
            }
            _ => out.push(letter),
        }
    }
    Word(out)
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letter(letter: Letter) -> Word {
        Word(vec![letter])
    }

    pub fn generator(generator: Generator) -> Word {
        Word::letter(Letter::pos(generator))
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        free_reduce(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut keep = self.0.len();
        let mut skip = 0;
        while keep > 0 && skip < other.0.len() && self.0[keep - 1].is_inverse_of(other.0[skip]) {
            keep -= 1;
            skip += 1;
        }
        let mut letters = Vec::with_capacity(keep + other.0.len() - skip);
        letters.extend_from_slice(&self.0[..keep]);
        letters.extend_from_slice(&other.0[skip..]);
        Word(letters)
    }

    /// Reduced power `self^k`; negative `k` inverts.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Word::empty(), |acc, _| acc.concat(&base))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&first), Some(&last)) => self.0.len() == 1 || !first.is_inverse_of(last),
            _ => true,
        }
    }

    /// Splits `self = conjugator * core * conjugator^-1` with `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k].is_inverse_of(self.0[n - 1 - k]) {
            k += 1;
        }
        (Word(self.0[k..n - k].to_vec()), Word(self.0[..k].to_vec()))
    }

    /// The rotation starting at letter `k`. Only meaningful for cyclically reduced words,
    /// where every rotation is again reduced.
    pub fn rotation(&self, k: usize) -> Word {
        let n = self.0.len();
        if n == 0 {
            return Word::empty();
        }
        let k = k % n;
        let mut letters = Vec::with_capacity(n);
        letters.extend_from_slice(&self.0[k..]);
        letters.extend_from_slice(&self.0[..k]);
        Word(letters)
    }

    /// All `n` rotations of a cyclically reduced word, in rotation order.
    pub fn cyclic_conjugates(&self) -> Result<Vec<Word>, WordError> {
        if !self.is_cyclically_reduced() {
            return Err(WordError::NotCyclicallyReduced(self.to_string()));
        }
        Ok((0..self.0.len()).map(|k| self.rotation(k)).collect())
    }

    pub fn contains_central(&self) -> bool {
        self.0.iter().any(|l| l.generator().is_central())
    }

    /// Removes every `z^±1` and returns the reduced remainder with the total `z` exponent.
    /// Valid as a group identity because `z` is central.
    pub fn split_central(&self) -> (Word, i64) {
        let mut z = 0i64;
        let rest = free_reduce(self.0.iter().copied().filter(|l| {
            if l.generator().is_central() {
                z += i64::from(l.exponent());
                false
            } else {
                true
            }
        }));
        (rest, z)
    }

    /// Exponent sum of each of the nine generators.
    pub fn exponent_sums(&self) -> [i64; 9] {
        let mut sums = [0i64; 9];
        for l in &self.0 {
            sums[l.generator() as usize] += i64::from(l.exponent());
        }
        sums
    }

    pub fn parse(text: &str) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for token in text.split_whitespace() {
            let (name, exponent) = match token.split_once('^') {
                Some((name, exp)) => {
                    let k: i64 = exp
                        .parse()
                        .map_err(|_| WordError::BadExponent(token.to_string()))?;
                    if k == 0 {
                        return Err(WordError::ZeroExponent(token.to_string()));
                    }
                    (name, k)
                }
                None => (token, 1),
            };
            let generator = Generator::from_name(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            let letter = Letter::new(generator, if exponent < 0 { -1 } else { 1 });
            raw.extend(std::iter::repeat_n(letter, exponent.unsigned_abs() as usize));
        }
        Ok(free_reduce(raw))
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, letter) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Word::parse(&text).map_err(serde::de::Error::custom)
    }
}
