//! Central extensions `1 → Z → E_α → G → 1` indexed by an eventually periodic
//! integer sequence `α`, where `α_i` is the value of the class on the 2-cell of `r_i`.
//!
//! `E_α` is presented by the generators of `G` plus a central `z`, with relations
//! `r_i = z^{α_i}`. Elements are carried as `(g_word, z_exp)` representatives. The
//! `z` exponent of a word that is trivial in `G` is read off a Dehn trace: a move
//! that consumes a rotation of `r_i^{±1}` contributes `±α_i`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::cayley::GroupContext;
use crate::dehn::{dehn_reduce, DehnTrace, Strategy};
use crate::presentation::relator;
use crate::words::{Generator, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("malformed sequence: {0}")]
    Parse(String),
    #[error(
        "values at indices 0..={max_index} have gcd {gcd}; no witness for z within this range"
    )]
    NotRichInRange { max_index: usize, gcd: i64 },
}

/// `α_i = prefix[i]` for `i < |prefix|`, then `period` repeats; an empty period is a zero tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlphaSequence {
    prefix: Vec<i64>,
    period: Vec<i64>,
}

impl AlphaSequence {
    pub fn new(prefix: Vec<i64>, period: Vec<i64>) -> AlphaSequence {
        AlphaSequence { prefix, period }
    }

    /// Finitely supported sequence.
    pub fn finite(prefix: Vec<i64>) -> AlphaSequence {
        AlphaSequence::new(prefix, Vec::new())
    }

    /// The indicator sequence `e_k`: 1 at index `k`, 0 elsewhere.
    pub fn indicator(k: usize) -> AlphaSequence {
        let mut prefix = vec![0; k + 1];
        prefix[k] = 1;
        AlphaSequence::finite(prefix)
    }

    pub fn prefix(&self) -> &[i64] {
        &self.prefix
    }

    pub fn period(&self) -> &[i64] {
        &self.period
    }

    pub fn at(&self, i: usize) -> i64 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else if self.period.is_empty() {
            0
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// Number of leading indices that already attain every value of the sequence.
    pub fn representative_len(&self) -> usize {
        self.prefix.len() + self.period.len().max(1)
    }

    /// The values the sequence attains, sorted and deduplicated.
    pub fn value_set(&self) -> Vec<i64> {
        let mut values: Vec<i64> = (0..self.representative_len()).map(|i| self.at(i)).collect();
        values.sort_unstable();
        values.dedup();
        values
    }

    /// `max |α_i|`.
    pub fn bound(&self) -> u64 {
        self.value_set()
            .into_iter()
            .map(i64::unsigned_abs)
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.value_set() == [0]
    }

    pub fn parse(text: &str) -> Result<AlphaSequence, ExtensionError> {
        parse_alpha(text)
    }
}

fn parse_int(token: &str) -> Result<i64, ExtensionError> {
    let t = token.trim();
    t.parse()
        .map_err(|_| ExtensionError::Parse(format!("bad integer `{t}`")))
}

/// Grammar: comma-separated integers, optionally ending in a parenthesized
/// comma-separated period followed by `*`, e.g. `1`, `0,1,(0,1)*`, `(2)*`.
pub fn parse_alpha(text: &str) -> Result<AlphaSequence, ExtensionError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ExtensionError::Parse("empty sequence".into()));
    }
    let (head, period) = match text.find('(') {
        Some(open) => {
            let tail = &text[open..];
            let inner = tail
                .strip_prefix('(')
                .and_then(|t| t.trim_end().strip_suffix('*'))
                .and_then(|t| t.trim_end().strip_suffix(')'))
                .ok_or_else(|| ExtensionError::Parse(format!("bad period `{tail}`")))?;
            if inner.contains(['(', ')']) {
                return Err(ExtensionError::Parse(format!("bad period `{tail}`")));
            }
            let period = inner
                .split(',')
                .map(parse_int)
                .collect::<Result<Vec<_>, _>>()?;
            let head = text[..open].trim_end();
            let head = if head.is_empty() {
                head
            } else {
                head.strip_suffix(',').ok_or_else(|| {
                    ExtensionError::Parse(format!("expected `,` before `{tail}`"))
                })?
            };
            (head, period)
        }
        None => {
            if text.contains([')', '*']) {
                return Err(ExtensionError::Parse(format!("unexpected token in `{text}`")));
            }
            (text, Vec::new())
        }
    };
    let prefix = if head.trim().is_empty() {
        Vec::new()
    } else {
        head.split(',').map(parse_int).collect::<Result<Vec<_>, _>>()?
    };
    if prefix.is_empty() && period.is_empty() {
        return Err(ExtensionError::Parse("empty sequence".into()));
    }
    Ok(AlphaSequence { prefix, period })
}

impl FromStr for AlphaSequence {
    type Err = ExtensionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_alpha(s)
    }
}

impl fmt::Display for AlphaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        match (self.prefix.is_empty(), self.period.is_empty()) {
            (_, true) => write!(f, "{}", join(&self.prefix)),
            (true, false) => write!(f, "({})*", join(&self.period)),
            (false, false) => write!(f, "{},({})*", join(&self.prefix), join(&self.period)),
        }
    }
}

impl Serialize for AlphaSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

pub fn alpha_at(alpha: &AlphaSequence, i: usize) -> i64 {
    alpha.at(i)
}

/// Truncation of the presentation of `E_α` to relators of index `<= max_index`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionPresentation {
    pub alpha: AlphaSequence,
    pub max_index: usize,
    /// `r_i z^{-α_i}` for `i <= max_index`.
    pub relators: Vec<Word>,
    /// `[z, g]` for each generator `g` of `G`.
    pub commutators: Vec<Word>,
}

impl ExtensionPresentation {
    pub fn to_text(&self) -> String {
        let gens: Vec<&str> = Generator::ALL.iter().map(|g| g.name()).collect();
        let mut out = format!("generators: {}\n", gens.join(" "));
        for (i, r) in self.relators.iter().enumerate() {
            out.push_str(&format!("r{i}: {r}\n"));
        }
        for (g, c) in Generator::BASE.iter().zip(&self.commutators) {
            out.push_str(&format!("[z,{g}]: {c}\n"));
        }
        out
    }
}

pub fn extension_presentation(alpha: &AlphaSequence, max_index: usize) -> ExtensionPresentation {
    let z = Word::generator(Generator::Z);
    let relators = (0..=max_index)
        .map(|i| relator(i).concat(&z.pow(-alpha.at(i))))
        .collect();
    let commutators = Generator::BASE
        .iter()
        .map(|&g| {
            let x = Word::generator(g);
            z.concat(&x).concat(&z.inverse()).concat(&x.inverse())
        })
        .collect();
    ExtensionPresentation {
        alpha: alpha.clone(),
        max_index,
        relators,
        commutators,
    }
}

/// Representative of `g_word · z^{z_exp}` in `E_α`. Not a normal form unless
/// `g_word` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ExtensionElement {
    pub g_word: Word,
    pub z_exp: i64,
}

impl ExtensionElement {
    pub fn new(g_word: Word, z_exp: i64) -> ExtensionElement {
        ExtensionElement { g_word, z_exp }
    }

    pub fn identity() -> ExtensionElement {
        ExtensionElement::central(0)
    }

    pub fn central(n: i64) -> ExtensionElement {
        ExtensionElement::new(Word::empty(), n)
    }

    pub fn is_central(&self) -> bool {
        self.g_word.is_empty()
    }

    /// A word over all nine generators spelling this representative.
    pub fn to_word(&self) -> Word {
        self.g_word
            .concat(&Word::generator(Generator::Z).pow(self.z_exp))
    }
}

impl fmt::Display for ExtensionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.g_word, self.z_exp)
    }
}

/// Evaluates a word over all nine generators in `E_α`, returning the Dehn trace of
/// its `G`-part as the certificate for the `z` exponent.
pub fn evaluate_with(
    alpha: &AlphaSequence,
    w: &Word,
    strategy: Strategy,
) -> (ExtensionElement, DehnTrace) {
    let (g_part, explicit) = w.split_central();
    let trace = dehn_reduce(&g_part, strategy);
    let z_exp = explicit + trace.signed_sum(|i| alpha.at(i));
    (
        ExtensionElement::new(trace.final_word.clone(), z_exp),
        trace,
    )
}

pub fn evaluate(alpha: &AlphaSequence, w: &Word) -> ExtensionElement {
    evaluate_with(alpha, w, Strategy::Deterministic).0
}

pub fn are_equal_in_extension(
    alpha: &AlphaSequence,
    e1: &ExtensionElement,
    e2: &ExtensionElement,
) -> bool {
    let d = evaluate(alpha, &e1.g_word.concat(&e2.g_word.inverse()));
    d.g_word.is_empty() && d.z_exp + e1.z_exp - e2.z_exp == 0
}

pub fn multiply(alpha: &AlphaSequence, e1: &ExtensionElement, e2: &ExtensionElement) -> ExtensionElement {
    let mut e = evaluate(alpha, &e1.g_word.concat(&e2.g_word));
    e.z_exp += e1.z_exp + e2.z_exp;
    e
}

pub fn invert_elt(alpha: &AlphaSequence, e: &ExtensionElement) -> ExtensionElement {
    let mut inv = evaluate(alpha, &e.g_word.inverse());
    inv.z_exp -= e.z_exp;
    inv
}

/// Integer coefficients `k_i` (indices `<= max_index`) with `Σ k_i α_i = gcd`,
/// built by folding the extended Euclidean algorithm over the values in index order.
/// Stops as soon as the running gcd reaches 1.
pub(crate) fn gcd_combination(alpha: &AlphaSequence, max_index: usize) -> (i64, Vec<(usize, i64)>) {
    let mut g = 0i64;
    let mut coeffs: Vec<(usize, i64)> = Vec::new();
    for i in 0..=max_index {
        let v = alpha.at(i);
        if v == 0 {
            continue;
        }
        let e = g.extended_gcd(&v);
        let (mut d, mut x, mut y) = (e.gcd, e.x, e.y);
        if d < 0 {
            (d, x, y) = (-d, -x, -y);
        }
        for (_, c) in coeffs.iter_mut() {
            *c *= x;
        }
        coeffs.retain(|&(_, c)| c != 0);
        if y != 0 {
            coeffs.push((i, y));
        }
        g = d;
        if g == 1 {
            break;
        }
    }
    (g, coeffs)
}

/// A word `W = Π r_i^{k_i}` over the generators of `G` with `W = z` in `E_α`, which
/// shows the eight generators of `G` already generate `E_α`.
pub fn express_central_generator(alpha: &AlphaSequence, max_index: usize) -> Result<Word, ExtensionError> {
    let (gcd, coeffs) = gcd_combination(alpha, max_index);
    if gcd != 1 {
        return Err(ExtensionError::NotRichInRange { max_index, gcd });
    }
    Ok(coeffs
        .iter()
        .fold(Word::empty(), |acc, &(i, k)| acc.concat(&relator(i).pow(k))))
}

/// A word `w != 1` with `w^k = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionWitness {
    pub word: Word,
    pub exponent: u32,
}

/// Exhaustively searches reduced words of length `1..=max_word_len` over the
/// context's generators for `w != 1` with `w^k = 1`, `2 <= k <= max_exponent`.
pub fn order_probe(ctx: &GroupContext, max_word_len: usize, max_exponent: u32) -> Vec<TorsionWitness> {
    let alphabet = ctx.letters();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut witnesses = Vec::new();
    for _ in 0..max_word_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.last().is_some_and(|last| last.is_inverse_of(l)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        for letters in &next {
            let w = Word::from_letters(letters.iter().copied());
            if ctx.is_identity(&w) {
                continue;
            }
            for k in 2..=max_exponent {
                if ctx.is_identity(&w.pow(i64::from(k))) {
                    witnesses.push(TorsionWitness {
                        word: w.clone(),
                        exponent: k,
                    });
                    break;
                }
            }
        }
        layer = next;
    }
    witnesses
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(text: &str) -> AlphaSequence {
        parse_alpha(text).unwrap()
    }

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    #[test]
    fn parse_examples() {
        let a = alpha("1");
        assert_eq!((0..4).map(|i| a.at(i)).collect::<Vec<_>>(), [1, 0, 0, 0]);
        let a = alpha("0,1,(0,1)*");
        assert_eq!((0..7).map(|i| a.at(i)).collect::<Vec<_>>(), [0, 1, 0, 1, 0, 1, 0]);
        let a = alpha("(2)*");
        assert!((0..10).all(|i| a.at(i) == 2));
        assert_eq!(alpha(" -3 , 4 ,( 1 , -1 )* ").to_string(), "-3,4,(1,-1)*");
    }

    #[test]
    fn parse_round_trips_display() {
        for text in ["1", "0,1,(0,1)*", "(2)*", "3,(1,2)*", "-1,0"] {
            assert_eq!(alpha(text).to_string(), text);
        }
    }

    #[test]
    fn parse_errors_name_the_token() {
        for bad in ["", "1,,2", "a", "(1", "1,(2)", "(1)*,2", "1(2)*", "()*", "1)*", "((1))*"] {
            assert!(parse_alpha(bad).is_err(), "{bad:?} should not parse");
        }
        let err = parse_alpha("1,x").unwrap_err().to_string();
        assert!(err.contains("`x`"), "{err}");
    }

    #[test]
    fn alpha_at_examples() {
        assert_eq!(alpha_at(&alpha("1"), 0), 1);
        assert_eq!(alpha_at(&alpha("1"), 7), 0);
        assert_eq!(alpha_at(&alpha("0,1,(0,1)*"), 6), 0);
    }

    #[test]
    fn value_set_and_bound() {
        assert_eq!(alpha("1").value_set(), [0, 1]);
        assert_eq!(alpha("3,(1,2)*").value_set(), [1, 2, 3]);
        assert_eq!(alpha("3,(1,2)*").bound(), 3);
        assert_eq!(alpha("-5,(1)*").bound(), 5);
        assert!(alpha("0,0,(0)*").is_zero());
    }

    #[test]
    fn presentation_examples() {
        let p = extension_presentation(&alpha("1"), 0);
        assert_eq!(p.relators, vec![relator(0).concat(&w("z^-1"))]);
        assert_eq!(p.commutators.len(), 8);
        assert_eq!(p.commutators[0], w("z a1 z^-1 a1^-1"));

        let p = extension_presentation(&alpha("0"), 0);
        assert_eq!(p.relators, vec![relator(0)]);

        let p = extension_presentation(&alpha("0,2"), 1);
        assert_eq!(p.relators, vec![relator(0), relator(1).concat(&w("z^-2"))]);
        let text = p.to_text();
        assert!(text.starts_with("generators: a1 a2 a3 a4 t1 t2 t3 t4 z\n"));
        assert!(text.contains("r1: t1 a1 t1^-1"));
        assert!(text.trim_end().ends_with("[z,t4]: z t4 z^-1 t4^-1"));
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&alpha("1"), &relator(0)), ExtensionElement::central(1));
        assert_eq!(evaluate(&alpha("1"), &relator(1)), ExtensionElement::central(0));
        let word = relator(0).concat(&w("z^3")).concat(&relator(1));
        let (e, trace) = evaluate_with(&alpha("0,1"), &word, Strategy::Deterministic);
        assert_eq!(e, ExtensionElement::central(4));
        crate::dehn::verify_trace(&trace).unwrap();
    }

    #[test]
    fn extension_relators_evaluate_to_identity() {
        for a in ["1", "0,1", "2,3", "1,(0,1)*", "(-2,5)*"] {
            let a = alpha(a);
            for r in extension_presentation(&a, 6)
                .relators
                .iter()
                .chain(&extension_presentation(&a, 0).commutators)
            {
                assert_eq!(evaluate(&a, r), ExtensionElement::identity(), "{a}: {r}");
            }
        }
    }

    #[test]
    fn equality_examples() {
        let a1 = alpha("1");
        assert!(are_equal_in_extension(
            &a1,
            &ExtensionElement::new(relator(0), 0),
            &ExtensionElement::central(1)
        ));
        assert!(are_equal_in_extension(
            &a1,
            &ExtensionElement::central(2),
            &ExtensionElement::central(2)
        ));
        assert!(!are_equal_in_extension(
            &alpha("0"),
            &ExtensionElement::new(relator(0), 0),
            &ExtensionElement::central(1)
        ));
        assert!(!are_equal_in_extension(
            &a1,
            &ExtensionElement::new(w("a1"), 0),
            &ExtensionElement::new(w("a2"), 0)
        ));
    }

    #[test]
    fn multiply_and_invert_examples() {
        let a = alpha("1");
        let e = multiply(&a, &ExtensionElement::new(w("a1"), 0), &ExtensionElement::new(w("a1^-1"), 0));
        assert_eq!(e, ExtensionElement::identity());
        let r0 = ExtensionElement::new(relator(0), 0);
        assert_eq!(multiply(&a, &r0, &r0), ExtensionElement::central(2));
        assert_eq!(invert_elt(&a, &ExtensionElement::central(3)), ExtensionElement::central(-3));
        let x = ExtensionElement::new(w("a1 t2 a3^-1"), 5);
        let prod = multiply(&a, &x, &invert_elt(&a, &x));
        assert!(are_equal_in_extension(&a, &prod, &ExtensionElement::identity()));
    }

    #[test]
    fn central_generator_examples() {
        assert_eq!(express_central_generator(&alpha("1"), 0).unwrap(), relator(0));
        let w23 = express_central_generator(&alpha("2,3"), 1).unwrap();
        assert_eq!(w23, relator(0).inverse().concat(&relator(1)));
        assert_eq!(evaluate(&alpha("2,3"), &w23), ExtensionElement::central(1));
        assert_eq!(
            express_central_generator(&alpha("2"), 5),
            Err(ExtensionError::NotRichInRange { max_index: 5, gcd: 2 })
        );
        assert!(matches!(
            express_central_generator(&alpha("0,0,1"), 1),
            Err(ExtensionError::NotRichInRange { gcd: 0, .. })
        ));
        for a in ["-1", "6,10,15", "0,(-3,2)*", "4,6,9"] {
            let a = alpha(a);
            let word = express_central_generator(&a, 5).unwrap();
            assert_eq!(evaluate(&a, &word), ExtensionElement::central(1), "{a}");
        }
    }

    #[test]
    fn torsion_probe_finds_nothing_small() {
        assert!(order_probe(&GroupContext::G, 2, 4).is_empty());
        assert!(order_probe(&GroupContext::Extension(alpha("1")), 2, 4).is_empty());
        assert!(order_probe(&GroupContext::G, 0, 4).is_empty());
    }
}
