//! Balls in the Cayley graphs of `G`, `G x Z` and `E_α`, and linear upper bounds
//! on `|z^n|` in `E_α`.
//!
//! Elements are kept as `(g_word, z_exp)` representatives and deduplicated through
//! each group's equality oracle. Candidates are first bucketed by their image in
//! the abelianization of the `G`-generators (relators have zero exponent sums), so
//! the oracle only runs inside a bucket.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dehn::{are_equal_in_g, dehn_reduce, Strategy};
use crate::extension::{
    are_equal_in_extension, evaluate, express_central_generator, AlphaSequence, ExtensionElement,
    ExtensionError,
};
use crate::words::{Generator, Letter, Word};

pub const DEFAULT_RADIUS_CAP: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CayleyError {
    #[error(
        "radius {radius} exceeds the cap {cap}; oracle-based deduplication grows \
         superexponentially with the radius (raise the cap explicitly to proceed)"
    )]
    RadiusOverCap { radius: usize, cap: usize },
}

/// Which group a computation runs in, with its generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupContext {
    /// `G` with its eight generators.
    G,
    /// `G x Z`, generated by the eight generators of `G` and `z`.
    GxZ,
    /// `E_α`, generated by the eight generators of `G` and `z`.
    Extension(AlphaSequence),
}

impl GroupContext {
    pub fn has_central(&self) -> bool {
        !matches!(self, GroupContext::G)
    }

    /// Directed edge labels: 16 for `G`, 18 otherwise.
    pub fn letters(&self) -> Vec<Letter> {
        Letter::alphabet(self.has_central())
    }

    /// Representative of the element spelled by `w`.
    pub fn evaluate(&self, w: &Word) -> ExtensionElement {
        match self {
            GroupContext::G | GroupContext::GxZ => {
                let (g, z) = w.split_central();
                let reduced = dehn_reduce(&g, Strategy::Deterministic).final_word;
                ExtensionElement::new(reduced, if self.has_central() { z } else { 0 })
            }
            GroupContext::Extension(alpha) => evaluate(alpha, w),
        }
    }

    pub fn equal(&self, a: &ExtensionElement, b: &ExtensionElement) -> bool {
        match self {
            GroupContext::G | GroupContext::GxZ => {
                a.z_exp == b.z_exp && are_equal_in_g(&a.g_word, &b.g_word).expect("no z in G-part")
            }
            GroupContext::Extension(alpha) => are_equal_in_extension(alpha, a, b),
        }
    }

    pub fn is_identity(&self, w: &Word) -> bool {
        if matches!(self, GroupContext::G) && w.contains_central() {
            return false;
        }
        let e = self.evaluate(w);
        e.g_word.is_empty() && e.z_exp == 0
    }

    fn times_letter(&self, e: &ExtensionElement, l: Letter) -> ExtensionElement {
        if l.generator().is_central() {
            return ExtensionElement::new(e.g_word.clone(), e.z_exp + i64::from(l.exponent()));
        }
        let mut next = self.evaluate(&e.g_word.concat(&Word::letter(l)));
        next.z_exp += e.z_exp;
        next
    }

    /// A value that agrees on equal elements.
    fn bucket_key(&self, e: &ExtensionElement) -> [i64; 9] {
        let mut key = e.g_word.exponent_sums();
        key[Generator::Z as usize] = match self {
            GroupContext::G | GroupContext::GxZ => e.z_exp,
            GroupContext::Extension(_) => 0,
        };
        key
    }
}

impl fmt::Display for GroupContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupContext::G => f.write_str("G"),
            GroupContext::GxZ => f.write_str("GxZ"),
            GroupContext::Extension(alpha) => write!(f, "E[{alpha}]"),
        }
    }
}

impl Serialize for GroupContext {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub context: GroupContext,
    pub radii: Vec<usize>,
    /// `counts[r] = |B(r)|`.
    pub counts: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ExtensionElement>>,
}

impl GrowthReport {
    pub fn to_table(&self) -> String {
        let mut out = format!("# {}\nradius\t|B(r)|\n", self.context);
        for (r, c) in self.radii.iter().zip(&self.counts) {
            out.push_str(&format!("{r}\t{c}\n"));
        }
        out
    }
}

struct Ball<'a> {
    ctx: &'a GroupContext,
    elements: Vec<ExtensionElement>,
    seen: HashSet<ExtensionElement>,
    buckets: HashMap<[i64; 9], Vec<usize>>,
}

impl<'a> Ball<'a> {
    fn new(ctx: &'a GroupContext) -> Self {
        let mut ball = Ball {
            ctx,
            elements: Vec::new(),
            seen: HashSet::new(),
            buckets: HashMap::new(),
        };
        ball.insert(ExtensionElement::identity());
        ball
    }

    /// Inserts `e` unless an equal element is already present.
    fn insert(&mut self, e: ExtensionElement) -> bool {
        if self.seen.contains(&e) {
            return false;
        }
        let key = self.ctx.bucket_key(&e);
        let bucket = self.buckets.entry(key).or_default();
        if bucket
            .iter()
            .any(|&k| self.ctx.equal(&self.elements[k], &e))
        {
            self.seen.insert(e);
            return false;
        }
        bucket.push(self.elements.len());
        self.seen.insert(e.clone());
        self.elements.push(e);
        true
    }
}

fn check_cap(radius: usize, cap: usize) -> Result<(), CayleyError> {
    if radius > cap {
        Err(CayleyError::RadiusOverCap { radius, cap })
    } else {
        Ok(())
    }
}

/// Exact sizes `|B(0)|, ..., |B(radius)|` by breadth-first search.
pub fn ball(ctx: &GroupContext, radius: usize, cap: usize) -> Result<GrowthReport, CayleyError> {
    ball_impl(ctx, radius, cap, false)
}

/// As [`ball`], also returning one representative per element.
pub fn ball_with_elements(ctx: &GroupContext, radius: usize, cap: usize) -> Result<GrowthReport, CayleyError> {
    ball_impl(ctx, radius, cap, true)
}

fn ball_impl(ctx: &GroupContext, radius: usize, cap: usize, keep: bool) -> Result<GrowthReport, CayleyError> {
    check_cap(radius, cap)?;
    let letters = ctx.letters();
    let mut ball = Ball::new(ctx);
    let mut counts = vec![1u64];
    let mut sphere = 0..1;
    for _ in 0..radius {
        let candidates: Vec<ExtensionElement> = ball.elements[sphere.clone()]
            .par_iter()
            .flat_map_iter(|e| letters.iter().map(move |&l| ctx.times_letter(e, l)))
            .collect();
        let start = ball.elements.len();
        for c in candidates {
            ball.insert(c);
        }
        sphere = start..ball.elements.len();
        counts.push(ball.elements.len() as u64);
    }
    Ok(GrowthReport {
        context: ctx.clone(),
        radii: (0..=radius).collect(),
        counts,
        elements: keep.then_some(ball.elements),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub left: GrowthReport,
    pub right: GrowthReport,
    /// `left.counts[r] / right.counts[r]`.
    pub ratios: Vec<f64>,
}

impl CompareReport {
    pub fn to_table(&self) -> String {
        let mut out = format!("radius\t{}\t{}\tratio\n", self.left.context, self.right.context);
        for (r, ((a, b), q)) in self
            .left
            .counts
            .iter()
            .zip(&self.right.counts)
            .zip(&self.ratios)
            .enumerate()
        {
            out.push_str(&format!("{r}\t{a}\t{b}\t{q:.6}\n"));
        }
        out
    }
}

pub fn growth_compare(
    left: &GroupContext,
    right: &GroupContext,
    radius: usize,
    cap: usize,
) -> Result<CompareReport, CayleyError> {
    let left = ball(left, radius, cap)?;
    let right = ball(right, radius, cap)?;
    let ratios = left
        .counts
        .iter()
        .zip(&right.counts)
        .map(|(&a, &b)| a as f64 / b as f64)
        .collect();
    Ok(CompareReport { left, right, ratios })
}

/// A word over the generators of `G` equal to `z^n` in `E_α`: the central
/// generator witness repeated `n` times. Its length bounds `|z^n|` from above
/// linearly in `n`.
pub fn central_power_length_upper(
    alpha: &AlphaSequence,
    n: u32,
    max_index: usize,
) -> Result<Word, ExtensionError> {
    let w = express_central_generator(alpha, max_index)?;
    Ok(w.pow(i64::from(n)))
}
