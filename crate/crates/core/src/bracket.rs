//! Goldman bracket as a signed formal sum of conjugacy classes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg};

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::intersections::{
    mutual_intersections_with, self_intersections_with, Enumeration, IntersectionError,
    IntersectionRecord,
};
use crate::sampler::Representation;
use crate::word::{are_conjugate, cyclic_normal_form, CyclicWord, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BracketError {
    #[error(transparent)]
    Intersection(#[from] IntersectionError),
    #[error("{0} and {1} are the same class; use the self bracket")]
    SameClass(String, String),
    #[error("{0} and {1} are conjugate but different words; pass the same word twice")]
    ConjugateWords(String, String),
}

/// Canonical linear combination of conjugacy classes with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormalSum {
    terms: BTreeMap<CyclicWord, i64>,
}

impl FormalSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, class: CyclicWord, coefficient: i64) {
        let e = self.terms.entry(class.clone()).or_insert(0);
        *e += coefficient;
        if *e == 0 {
            self.terms.remove(&class);
        }
    }

    /// Adds `coefficient·⟨w⟩`.
    pub fn add_word(&mut self, w: &Word, coefficient: i64) {
        self.add_term(cyclic_normal_form(w), coefficient);
    }

    pub fn coefficient(&self, class: &CyclicWord) -> i64 {
        self.terms.get(class).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CyclicWord, i64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add for FormalSum {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
        self
    }
}

impl Neg for FormalSum {
    type Output = Self;
    fn neg(mut self) -> Self {
        for v in self.terms.values_mut() {
            *v = -*v;
        }
        self
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, &v)) in self.terms.iter().enumerate() {
            let sign = if v < 0 { "-" } else { "+" };
            if i == 0 {
                if v < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if v.abs() != 1 {
                write!(f, "{}", v.abs())?;
            }
            write!(f, "<{k}>")?;
        }
        Ok(())
    }
}

/// Sorted list of `[class, coefficient]` pairs.
impl Serialize for FormalSum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (k, v) in &self.terms {
            seq.serialize_element(&(k.to_string(), v))?;
        }
        seq.end()
    }
}

/// One signed term before cancellation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketTerm {
    pub class: CyclicWord,
    pub coefficient: i64,
    /// Element `h` such that the term is `⟨α·hβh⁻¹⟩`.
    pub witness: Word,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketResult {
    pub sum: FormalSum,
    pub terms: Vec<BracketTerm>,
    pub records: Vec<IntersectionRecord>,
}

/// `⟨α·hβh⁻¹⟩`, the loop product at the crossing witnessed by `h`.
pub fn term_word(alpha: &Word, beta: &Word, h: &Word) -> Word {
    alpha.compose(&beta.conjugate(h))
}

pub fn bracket(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
    word_bound: usize,
) -> Result<FormalSum, BracketError> {
    Ok(bracket_with(alpha, beta, rep, Enumeration::Bounded(word_bound))?.sum)
}

pub fn bracket_with(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
    mode: Enumeration,
) -> Result<BracketResult, BracketError> {
    if are_conjugate(alpha, beta) {
        return Err(BracketError::SameClass(alpha.to_string(), beta.to_string()));
    }
    let records = mutual_intersections_with(alpha, beta, rep, mode)?;
    let mut sum = FormalSum::zero();
    let mut terms = Vec::with_capacity(records.len());
    for r in &records {
        let class = cyclic_normal_form(&term_word(alpha, beta, &r.witness));
        let coefficient = r.sign as i64;
        sum.add_term(class.clone(), coefficient);
        terms.push(BracketTerm {
            class,
            coefficient,
            witness: r.witness.clone(),
        });
    }
    Ok(BracketResult {
        sum,
        terms,
        records,
    })
}

/// Bracket of `α` with a parallel copy of itself: every self-intersection
/// `(g, ε)` contributes `ε⟨α·α^g⟩ − ε⟨α^g·α⟩`, which cancel.
pub fn bracket_self(
    alpha: &Word,
    rep: &Representation,
    word_bound: usize,
) -> Result<BracketResult, BracketError> {
    bracket_self_with(alpha, rep, Enumeration::Bounded(word_bound))
}

pub fn bracket_self_with(
    alpha: &Word,
    rep: &Representation,
    mode: Enumeration,
) -> Result<BracketResult, BracketError> {
    let records = self_intersections_with(alpha, rep, mode)?;
    let mut sum = FormalSum::zero();
    let mut terms = Vec::with_capacity(2 * records.len());
    for r in &records {
        let g = &r.witness;
        let ag = alpha.conjugate(g);
        let eps = r.sign as i64;
        for (w, c, h) in [
            (alpha.compose(&ag), eps, g.clone()),
            // α^g·α is conjugate to α·α^{g⁻¹}
            (ag.compose(alpha), -eps, g.invert()),
        ] {
            let class = cyclic_normal_form(&w);
            sum.add_term(class.clone(), c);
            terms.push(BracketTerm {
                class,
                coefficient: c,
                witness: h,
            });
        }
    }
    Ok(BracketResult {
        sum,
        terms,
        records,
    })
}

/// Unordered pairs of distinct crossings whose terms `⟨α·β^g⟩`, `⟨α·β^h⟩`
/// are the same class. With `β = α` the fattened self bracket is used, which
/// pairs `g` with `g⁻¹` at every self-intersection.
pub fn equal_term_pairs(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
    word_bound: usize,
) -> Result<Vec<(Word, Word)>, BracketError> {
    equal_term_pairs_with(alpha, beta, rep, Enumeration::Bounded(word_bound))
}

pub fn equal_term_pairs_with(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
    mode: Enumeration,
) -> Result<Vec<(Word, Word)>, BracketError> {
    let terms = if alpha == beta {
        bracket_self_with(alpha, rep, mode)?.terms
    } else if are_conjugate(alpha, beta) {
        return Err(BracketError::ConjugateWords(alpha.to_string(), beta.to_string()));
    } else {
        bracket_with(alpha, beta, rep, mode)?.terms
    };
    let mut pairs = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            if terms[i].class == terms[j].class && terms[i].witness != terms[j].witness {
                pairs.push((terms[i].witness.clone(), terms[j].witness.clone()));
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::sample_representation;
    use crate::word::SurfaceSpec;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn torus(seed: u64) -> Representation {
        sample_representation(&SurfaceSpec::one_holed_torus(), seed, 3.0).unwrap()
    }

    fn pants(seed: u64) -> Representation {
        sample_representation(&SurfaceSpec::pair_of_pants(), seed, 3.0).unwrap()
    }

    #[test]
    fn single_crossing_gives_one_term() {
        let s = bracket(&w("a"), &w("b"), &torus(0), 6).unwrap();
        assert_eq!(s.len(), 1);
        let (class, c) = s.terms().next().unwrap();
        assert_eq!(c.abs(), 1);
        assert!(are_conjugate(class.as_word(), &w("ab")));
    }

    #[test]
    fn antisymmetric() {
        let rep = torus(2);
        for (x, y) in [("a", "b"), ("ab", "aB"), ("aab", "b")] {
            let s = bracket(&w(x), &w(y), &rep, 6).unwrap() + bracket(&w(y), &w(x), &rep, 6).unwrap();
            assert!(s.is_zero(), "{x} {y}: {s}");
        }
    }

    #[test]
    fn boundary_curves_bracket_to_zero() {
        assert!(bracket(&w("a"), &w("b"), &pants(0), 6).unwrap().is_zero());
    }

    #[test]
    fn self_bracket_of_figure_eight() {
        let res = bracket_self(&w("ab"), &pants(0), 6).unwrap();
        assert!(res.sum.is_zero());
        assert_eq!(res.terms.len(), 2);
        assert_eq!(res.terms[0].coefficient, -res.terms[1].coefficient);
        assert_eq!(res.terms[0].class, res.terms[1].class);
        assert!(bracket_self(&w("a"), &pants(0), 6).unwrap().terms.is_empty());
    }

    #[test]
    fn equal_terms() {
        assert!(equal_term_pairs(&w("a"), &w("b"), &torus(0), 6).unwrap().is_empty());
        let pairs = equal_term_pairs(&w("ab"), &w("ab"), &pants(0), 6).unwrap();
        assert_eq!(pairs.len(), 1);
        let (g, h) = &pairs[0];
        let alpha = w("ab");
        assert!(are_conjugate(&term_word(&alpha, &alpha, g), &term_word(&alpha, &alpha, h)));
    }

    #[test]
    fn display_and_serialize() {
        let mut s = FormalSum::zero();
        s.add_word(&w("ba"), 2);
        s.add_word(&w("b"), -1);
        assert_eq!(s.to_string(), "-<b> + 2<ab>");
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"[["b",-1],["ab",2]]"#);
    }
}
