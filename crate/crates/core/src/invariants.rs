//! Rich, distinguished and weakly bounded: decision procedures on represented sequences.
//!
//! A sequence `α` determines the homomorphism `f_α` from the span of the 2-cell
//! classes `[c_i]` to `Z`, `[c_i] ↦ α_i`.
//!
//! * rich: `f_α` is onto, i.e. the gcd of the attained values is 1.
//! * distinguished: `ker f_α != ker f_β`. Two nonzero maps to `Z` from a free
//!   abelian group share a kernel exactly when they are proportional, and for
//!   eventually periodic sequences proportionality is a finite check.
//! * weakly bounded: certified (never refuted) by boundedness of the sequence.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::extension::{gcd_combination, AlphaSequence};
use crate::presentation::relator;
use crate::words::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellClassError {
    #[error("bad cell class term `{0}`; expected `index:coefficient`")]
    BadTerm(String),
}

/// A finite integer combination `Σ k_i [c_i]`. Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CellClass {
    coeffs: BTreeMap<usize, i64>,
}

impl CellClass {
    pub fn zero() -> CellClass {
        CellClass::default()
    }

    /// The class `[c_i]`.
    pub fn cell(i: usize) -> CellClass {
        CellClass::from_terms([(i, 1)])
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, i64)>>(terms: I) -> CellClass {
        let mut coeffs = BTreeMap::new();
        for (i, k) in terms {
            *coeffs.entry(i).or_insert(0) += k;
        }
        coeffs.retain(|_, k| *k != 0);
        CellClass { coeffs }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().map(|(&i, &k)| (i, k))
    }

    pub fn coefficient(&self, i: usize) -> i64 {
        self.coeffs.get(&i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Π r_i^{k_i}` in increasing index order: a word that is trivial in `G` and
    /// whose 2-cycle is this class.
    pub fn relator_product(&self) -> Word {
        self.terms()
            .fold(Word::empty(), |acc, (i, k)| acc.concat(&relator(i).pow(k)))
    }

    pub fn parse(text: &str) -> Result<CellClass, CellClassError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(CellClass::zero());
        }
        let terms = text
            .split(',')
            .map(|term| {
                let bad = || CellClassError::BadTerm(term.trim().to_string());
                let (i, k) = term.split_once(':').ok_or_else(bad)?;
                Ok((
                    i.trim().parse::<usize>().map_err(|_| bad())?,
                    k.trim().parse::<i64>().map_err(|_| bad())?,
                ))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CellClass::from_terms(terms))
    }
}

impl FromStr for CellClass {
    type Err = CellClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CellClass::parse(s)
    }
}

/// `index:coefficient` pairs joined by commas; the zero class is the empty string.
impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms().map(|(i, k)| format!("{i}:{k}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for CellClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// The map `f_α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingMap {
    pub alpha: AlphaSequence,
}

impl PairingMap {
    pub fn apply(&self, c: &CellClass) -> i64 {
        pairing(&self.alpha, c)
    }
}

/// `Σ k_i α_i`.
pub fn pairing(alpha: &AlphaSequence, c: &CellClass) -> i64 {
    c.terms().map(|(i, k)| k * alpha.at(i)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RichnessReport {
    pub rich: bool,
    /// gcd of all attained values (0 for the zero sequence).
    pub gcd: i64,
    /// A class pairing to 1, when rich.
    pub witness: Option<CellClass>,
}

pub fn is_rich(alpha: &AlphaSequence) -> RichnessReport {
    let gcd = alpha
        .value_set()
        .into_iter()
        .fold(0i64, |g, v| g.gcd(&v));
    let witness = (gcd == 1).then(|| {
        let (g, coeffs) = gcd_combination(alpha, alpha.representative_len() - 1);
        debug_assert_eq!(g, 1);
        CellClass::from_terms(coeffs)
    });
    RichnessReport {
        rich: gcd == 1,
        gcd,
        witness,
    }
}

/// A class in exactly one of the two kernels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Distinction {
    pub witness: CellClass,
    pub value_alpha: i64,
    pub value_beta: i64,
}

fn lcm_len(a: usize, b: usize) -> usize {
    a.max(1).lcm(&b.max(1))
}

/// Returns a class killed by one of `f_α`, `f_β` but not the other, or `None` when
/// the kernels coincide.
pub fn are_distinguished(alpha: &AlphaSequence, beta: &AlphaSequence) -> Option<Distinction> {
    // The pair sequence (α_i, β_i) is periodic after the longer prefix with period
    // lcm of the two periods, so these indices realize every pair it ever takes.
    let n = alpha.prefix().len().max(beta.prefix().len())
        + lcm_len(alpha.period().len(), beta.period().len());
    let found = |class: CellClass| {
        Some(Distinction {
            value_alpha: pairing(alpha, &class),
            value_beta: pairing(beta, &class),
            witness: class,
        })
    };
    let nonzero = |s: &AlphaSequence| (0..n).find(|&i| s.at(i) != 0);
    match (nonzero(alpha), nonzero(beta)) {
        (None, None) => None,
        (Some(i), None) | (None, Some(i)) => found(CellClass::cell(i)),
        (Some(_), Some(_)) => {
            for i in 0..n {
                for j in i + 1..n {
                    let (ai, aj, bi, bj) = (alpha.at(i), alpha.at(j), beta.at(i), beta.at(j));
                    if i128::from(ai) * i128::from(bj) != i128::from(aj) * i128::from(bi) {
                        return found(CellClass::from_terms([(i, bj), (j, -bi)]));
                    }
                }
            }
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundednessCertificate {
    pub bound: u64,
    pub criterion: String,
}

/// `sup |α_i|`, with the reason a finite bound makes the class weakly bounded.
pub fn weak_boundedness_bound(alpha: &AlphaSequence) -> BoundednessCertificate {
    let bound = alpha.bound();
    BoundednessCertificate {
        bound,
        criterion: format!(
            "bounded sequence: |alpha_i| <= {bound} for every i. A bounded sequence is a \
             sufficient condition for the class to be weakly bounded, hence E_alpha is \
             quasi-isometric to G x Z. (Sufficient only; unbounded sequences are not decided.)"
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{evaluate, parse_alpha, ExtensionElement};

    fn alpha(text: &str) -> AlphaSequence {
        parse_alpha(text).unwrap()
    }

    #[test]
    fn cell_class_text() {
        let c = CellClass::parse("0:1,3:-2").unwrap();
        assert_eq!(c.coefficient(0), 1);
        assert_eq!(c.coefficient(3), -2);
        assert_eq!(c.to_string(), "0:1,3:-2");
        assert_eq!(CellClass::parse("1:2, 1:-2").unwrap(), CellClass::zero());
        assert_eq!(CellClass::parse("").unwrap(), CellClass::zero());
        assert!(CellClass::parse("0").is_err());
        assert!(CellClass::parse("-1:2").is_err());
        assert!(CellClass::parse("0:x").is_err());
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&alpha("1"), &CellClass::cell(0)), 1);
        let c = CellClass::from_terms([(1, 2), (0, -1)]);
        assert_eq!(pairing(&alpha("0,1"), &c), 2);
        assert_eq!(evaluate(&alpha("0,1"), &c.relator_product()), ExtensionElement::central(2));
        assert_eq!(pairing(&alpha("3,(1,2)*"), &CellClass::zero()), 0);
        let map = PairingMap { alpha: alpha("0,1") };
        assert_eq!(map.apply(&c), 2);
    }

    #[test]
    fn richness_examples() {
        let r = is_rich(&alpha("0,0,0,1"));
        assert!(r.rich);
        assert_eq!(r.witness, Some(CellClass::cell(3)));
        assert!(!is_rich(&alpha("0")).rich);
        assert_eq!(is_rich(&alpha("0")).gcd, 0);
        let r = is_rich(&alpha("2,(4)*"));
        assert!(!r.rich);
        assert_eq!(r.gcd, 2);
        assert!(r.witness.is_none());
        let r = is_rich(&alpha("(6,10,15)*"));
        assert!(r.rich);
        assert_eq!(pairing(&alpha("(6,10,15)*"), r.witness.as_ref().unwrap()), 1);
    }

    #[test]
    fn distinguished_examples() {
        let d = are_distinguished(&alpha("1"), &alpha("0,1")).unwrap();
        assert_eq!(d.witness.to_string(), "0:1");
        assert_eq!((d.value_alpha, d.value_beta), (1, 0));
        assert!(are_distinguished(&alpha("(2)*"), &alpha("(2)*")).is_none());
        assert!(are_distinguished(&alpha("1,2"), &alpha("2,4")).is_none());
        assert!(are_distinguished(&alpha("0"), &alpha("0,0,(0)*")).is_none());
        let d = are_distinguished(&alpha("0"), &alpha("0,0,3")).unwrap();
        assert_eq!(d.witness, CellClass::cell(2));
    }

    #[test]
    fn distinguished_needs_the_period_overlap() {
        // Proportional on the prefixes, differ only once both periods are in phase.
        let a = alpha("1,(1,1)*");
        let b = alpha("2,(2,2,2,2,2,4)*");
        let d = are_distinguished(&a, &b).unwrap();
        assert_eq!(d.value_beta, 0);
        assert_ne!(d.value_alpha, 0);
        assert!(are_distinguished(&alpha("(1,2)*"), &alpha("(3,6,3,6)*")).is_none());
    }

    #[test]
    fn boundedness_examples() {
        assert_eq!(weak_boundedness_bound(&alpha("1,(0,1)*")).bound, 1);
        assert_eq!(weak_boundedness_bound(&alpha("0")).bound, 0);
        let cert = weak_boundedness_bound(&alpha("3,(1,2)*"));
        assert_eq!(cert.bound, 3);
        assert!(cert.criterion.contains("bounded sequence"));
    }
}
