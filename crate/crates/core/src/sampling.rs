//! Seeded generators of random words and of products of conjugated relators.

use rand::Rng;

use crate::presentation::relator;
use crate::words::{Letter, Word};

/// A uniformly random freely reduced word of exactly `len` letters.
pub fn random_reduced_word<R: Rng>(rng: &mut R, len: usize, with_central: bool) -> Word {
    let alphabet = Letter::alphabet(with_central);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = alphabet[rng.gen_range(0..alphabet.len())];
        if letters.last().is_some_and(|last| last.is_inverse_of(l)) {
            continue;
        }
        letters.push(l);
    }
    Word::from_letters(letters)
}

/// Shape of a random product `Π c_k r_{i_k}^{±1} c_k^-1`.
#[derive(Debug, Clone, Copy)]
pub struct ProductShape {
    pub max_factors: usize,
    pub max_index: usize,
    pub max_conjugator_len: usize,
}

impl Default for ProductShape {
    fn default() -> Self {
        ProductShape {
            max_factors: 5,
            max_index: 4,
            max_conjugator_len: 6,
        }
    }
}

/// A product of `1..=max_factors` conjugated relators, freely reduced, together with
/// the `(index, sign)` of each factor in the order used.
pub fn random_relator_product<R: Rng>(rng: &mut R, shape: ProductShape) -> (Word, Vec<(usize, i64)>) {
    let factors = rng.gen_range(1..=shape.max_factors);
    let mut word = Word::empty();
    let mut used = Vec::with_capacity(factors);
    for _ in 0..factors {
        let conj_len = rng.gen_range(0..=shape.max_conjugator_len);
        let c = random_reduced_word(rng, conj_len, false);
        let index = rng.gen_range(0..=shape.max_index);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let r = relator(index).pow(sign);
        word = word.concat(&c).concat(&r).concat(&c.inverse());
        used.push((index, sign));
    }
    (word, used)
}
