//! Length-equivalent pairs: construction, equal-length checks, exact
//! non-conjugacy, the observed threshold `N`, and filling.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bracket::term_word;
use crate::intersections::{
    mutual_intersections_with, self_intersections_with, Enumeration, IntersectionError,
    IntersectionRecord,
};
use crate::sampler::{Representation, SamplerError};
use crate::trace::{verify_trace_identity_with, TraceReducer};
use crate::word::{
    are_conjugate, cyclic_normal_form, is_conjugate_to_inverse, reduced_words_of_length, Word,
};

/// Default relative tolerance for length comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Intersection(#[from] IntersectionError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error("n must be at least 1")]
    ZeroPower,
    #[error("g and h coincide; the two crossings must be distinct")]
    Degenerate,
    #[error("terms <{0}> and <{1}> are not conjugate")]
    HypothesisViolated(String, String),
    #[error("{0} is not filling (verdict {1:?})")]
    NotFilling(String, Filling),
    #[error("representation is not certified")]
    Uncertified,
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    SelfIntersection { alpha: Word, g: Word, coset_key: String },
    General { alpha: Word, beta: Word, g: Word, h: Word },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurvePair {
    pub left: Word,
    pub right: Word,
    pub n: u32,
    pub provenance: Provenance,
}

/// `αⁿ·α^g` and `(α^g)ⁿ·α`, where `α^g = gαg⁻¹`.
pub fn build_pair_self(alpha: &Word, record: &IntersectionRecord, n: u32) -> Result<CurvePair, PipelineError> {
    if n < 1 {
        return Err(PipelineError::ZeroPower);
    }
    let g = &record.witness;
    let ag = alpha.conjugate(g);
    Ok(CurvePair {
        left: alpha.power(n as i64).compose(&ag),
        right: ag.power(n as i64).compose(alpha),
        n,
        provenance: Provenance::SelfIntersection {
            alpha: alpha.clone(),
            g: g.clone(),
            coset_key: record.coset_key.clone(),
        },
    })
}

/// `αⁿ·β^g` and `αⁿ·β^h` for two crossings with conjugate bracket terms.
pub fn build_pair_general(
    alpha: &Word,
    beta: &Word,
    g: &Word,
    h: &Word,
    n: u32,
) -> Result<CurvePair, PipelineError> {
    if n < 1 {
        return Err(PipelineError::ZeroPower);
    }
    if g == h {
        return Err(PipelineError::Degenerate);
    }
    let tg = term_word(alpha, beta, g);
    let th = term_word(alpha, beta, h);
    if !are_conjugate(&tg, &th) {
        return Err(PipelineError::HypothesisViolated(tg.to_string(), th.to_string()));
    }
    let an = alpha.power(n as i64);
    Ok(CurvePair {
        left: an.compose(&beta.conjugate(g)),
        right: an.compose(&beta.conjugate(h)),
        n,
        provenance: Provenance::General {
            alpha: alpha.clone(),
            beta: beta.clone(),
            g: g.clone(),
            h: h.clone(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepLengths {
    pub seed: u64,
    pub tau_left: f64,
    pub tau_right: f64,
    pub rel_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthCheck {
    pub equal_numeric: bool,
    pub max_deviation: f64,
    pub equal_symbolic: bool,
    pub per_rep: Vec<RepLengths>,
}

fn rel_dev(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

/// Translation lengths of both members on every representation, plus the
/// metric-free check: the exact trace identity for self pairs, and for
/// general pairs equality of the Fricke coordinates `⟨β^g⟩ = ⟨β^h⟩`,
/// `⟨αβ^g⟩ = ⟨αβ^h⟩` (exact) together with the matching numeric traces.
pub fn check_equal_length(
    pair: &CurvePair,
    reps: &[Representation],
    tol: f64,
) -> Result<LengthCheck, PipelineError> {
    check_equal_length_with(pair, reps, tol, &mut TraceReducer::new())
}

pub fn check_equal_length_with(
    pair: &CurvePair,
    reps: &[Representation],
    tol: f64,
    reducer: &mut TraceReducer,
) -> Result<LengthCheck, PipelineError> {
    if reps.iter().any(|r| !r.is_certified()) {
        return Err(PipelineError::Uncertified);
    }
    let per_rep = reps
        .par_iter()
        .map(|rep| -> Result<(RepLengths, f64), PipelineError> {
            let tl = rep.translation_length(&pair.left)?;
            let tr = rep.translation_length(&pair.right)?;
            let mut trace_dev = 0.0f64;
            if let Provenance::General { alpha, beta, g, h } = &pair.provenance {
                let t = |w: &Word| rep.evaluate(w).map(|m| m.trace().abs());
                trace_dev = rel_dev(t(&beta.conjugate(g))?, t(&beta.conjugate(h))?)
                    .max(rel_dev(t(&term_word(alpha, beta, g))?, t(&term_word(alpha, beta, h))?));
            }
            Ok((
                RepLengths {
                    seed: rep.seed,
                    tau_left: tl,
                    tau_right: tr,
                    rel_dev: rel_dev(tl, tr),
                },
                trace_dev,
            ))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let max_deviation = per_rep.iter().map(|(r, _)| r.rel_dev).fold(0.0, f64::max);
    let max_trace_dev = per_rep.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    let equal_symbolic = match &pair.provenance {
        Provenance::SelfIntersection { .. } => verify_trace_identity_with(reducer, pair.n),
        Provenance::General { alpha, beta, g, h } => {
            g != h
                && are_conjugate(&term_word(alpha, beta, g), &term_word(alpha, beta, h))
                && max_trace_dev <= tol
        }
    };
    Ok(LengthCheck {
        equal_numeric: max_deviation <= tol,
        max_deviation,
        equal_symbolic,
        per_rep: per_rep.into_iter().map(|(r, _)| r).collect(),
    })
}

/// `(nonconjugate, not_conjugate_to_inverse)`, decided on words alone.
pub fn check_nonconjugate(pair: &CurvePair) -> (bool, bool) {
    (
        !are_conjugate(&pair.left, &pair.right),
        !is_conjugate_to_inverse(&pair.left, &pair.right),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdRow {
    pub n: u32,
    pub nonconjugate: bool,
    pub not_conjugate_to_inverse: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThresholdScan {
    /// Least `N` such that every scanned `n > N` passes both tests.
    pub n_observed: Option<u32>,
    pub n_max: u32,
    pub table: Vec<ThresholdRow>,
}

pub fn find_min_n(alpha: &Word, record: &IntersectionRecord, n_max: u32) -> Result<ThresholdScan, PipelineError> {
    let mut table = Vec::new();
    for n in 1..=n_max {
        let (nc, ni) = check_nonconjugate(&build_pair_self(alpha, record, n)?);
        table.push(ThresholdRow {
            n,
            nonconjugate: nc,
            not_conjugate_to_inverse: ni,
        });
    }
    let n_observed = if n_max < 2 {
        None
    } else {
        let first_bad_from_top = table
            .iter()
            .rev()
            .find(|r| !(r.nonconjugate && r.not_conjugate_to_inverse))
            .map(|r| r.n);
        match first_bad_from_top {
            None => Some(0),
            Some(n) if n < n_max => Some(n),
            Some(_) => None,
        }
    };
    Ok(ThresholdScan {
        n_observed,
        n_max,
        table,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Filling {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateIntersection {
    pub z: Word,
    pub intersection: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FillingReport {
    pub word: Word,
    pub verdict: Filling,
    pub witness: Option<Word>,
    pub reason: String,
    pub scc_word_bound: usize,
    /// Essential non-peripheral simple classes found, with `i(z, w)`.
    pub candidates: Vec<CandidateIntersection>,
}

/// Primitive, non-peripheral classes of length `≤ bound` whose geodesic is
/// simple, one per unoriented class.
pub fn simple_candidates(rep: &Representation, bound: usize) -> Result<Vec<Word>, PipelineError> {
    let topology = rep.topology().ok_or(PipelineError::Uncertified)?;
    let mut seen = BTreeSet::new();
    let mut classes = Vec::new();
    for len in 1..=bound {
        for w in reduced_words_of_length(rep.rank(), len) {
            if !w.is_cyclically_reduced() {
                continue;
            }
            let c = cyclic_normal_form(&w);
            let key = c.clone().min(c.inverse());
            if !seen.insert(key.clone()) {
                continue;
            }
            let word = key.into_word();
            if word.proper_power().map_err(IntersectionError::from)?.0 || topology.is_peripheral(&word) {
                continue;
            }
            classes.push(word);
        }
    }
    let simple = classes
        .par_iter()
        .map(|z| -> Result<Option<Word>, PipelineError> {
            Ok(self_intersections_with(z, rep, Enumeration::Exact)?
                .is_empty()
                .then(|| z.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(simple.into_iter().flatten().collect())
}

fn intersection_number(z: &Word, w: &Word, rep: &Representation) -> Result<usize, PipelineError> {
    let (_, root, k) = w.proper_power().map_err(IntersectionError::from)?;
    let n = mutual_intersections_with(z, &root, rep, Enumeration::Exact)?.len();
    Ok(n * k as usize)
}

/// Filling test through simple closed curves: `no` when an essential
/// non-peripheral simple class misses `w` (or `w` itself is peripheral),
/// `yes` when the surface has no such classes or every candidate at two
/// successive bounds meets `w`.
pub fn is_filling(w: &Word, rep: &Representation, scc_word_bound: usize) -> Result<FillingReport, PipelineError> {
    if w.is_empty() || !w.is_cyclically_reduced() {
        return Err(PipelineError::Input(format!("{w} is not a nonempty cyclically reduced word")));
    }
    w.check_rank(rep.rank()).map_err(IntersectionError::from)?;
    let topology = rep.topology().ok_or(PipelineError::Uncertified)?;
    let report = |verdict, witness, reason: &str, candidates| FillingReport {
        word: w.clone(),
        verdict,
        witness,
        reason: reason.to_string(),
        scc_word_bound,
        candidates,
    };
    if topology.is_peripheral(w) {
        let (_, root, _) = w.proper_power().map_err(IntersectionError::from)?;
        return Ok(report(Filling::No, Some(root), "peripheral", Vec::new()));
    }
    if topology.complexity() <= 0 {
        return Ok(report(
            Filling::Yes,
            None,
            "no essential non-peripheral simple closed curves on this surface",
            Vec::new(),
        ));
    }
    let candidates = simple_candidates(rep, scc_word_bound)?;
    let mut table = Vec::with_capacity(candidates.len());
    for z in &candidates {
        let i = intersection_number(z, w, rep)?;
        table.push(CandidateIntersection {
            z: z.clone(),
            intersection: i,
        });
        if i == 0 {
            return Ok(report(Filling::No, Some(z.clone()), "disjoint simple class", table));
        }
    }
    let previous_nonempty = candidates.iter().any(|z| z.len() < scc_word_bound);
    if !candidates.is_empty() && previous_nonempty {
        Ok(report(Filling::Yes, None, "every candidate meets the curve", table))
    } else {
        Ok(report(Filling::Inconclusive, None, "candidate set empty at a bound", table))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FillingRow {
    pub n: u32,
    pub left: Filling,
    pub right: Filling,
    /// `(z, 2·i(z, α))` for every candidate used.
    pub context: Vec<(Word, usize)>,
}

pub fn verify_filling_pairs(
    alpha: &Word,
    record: &IntersectionRecord,
    n_range: std::ops::RangeInclusive<u32>,
    rep: &Representation,
    scc_word_bound: usize,
) -> Result<Vec<FillingRow>, PipelineError> {
    let base = is_filling(alpha, rep, scc_word_bound)?;
    if base.verdict != Filling::Yes {
        return Err(PipelineError::NotFilling(alpha.to_string(), base.verdict));
    }
    let context: Vec<(Word, usize)> = base
        .candidates
        .iter()
        .map(|c| (c.z.clone(), 2 * c.intersection))
        .collect();
    n_range
        .map(|n| {
            let pair = build_pair_self(alpha, record, n)?;
            Ok(FillingRow {
                n,
                left: is_filling(&pair.left.cyclic_reduction(), rep, scc_word_bound)?.verdict,
                right: is_filling(&pair.right.cyclic_reduction(), rep, scc_word_bound)?.verdict,
                context: context.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub pair: CurvePair,
    pub equal_length_numeric: bool,
    pub max_deviation: f64,
    pub equal_length_symbolic: bool,
    pub nonconjugate: bool,
    pub not_conjugate_to_inverse: bool,
    pub filling_left: Filling,
    pub filling_right: Filling,
    pub n_observed: Option<u32>,
}

impl EquivalenceVerdict {
    pub fn length_equivalent(&self) -> bool {
        self.equal_length_numeric
            && self.equal_length_symbolic
            && self.nonconjugate
            && self.not_conjugate_to_inverse
    }
}

/// Every check on one pair. Filling is evaluated on `reps[0]`.
pub fn assess_pair(
    pair: &CurvePair,
    reps: &[Representation],
    tol: f64,
    scc_word_bound: usize,
    n_observed: Option<u32>,
) -> Result<EquivalenceVerdict, PipelineError> {
    let first = reps.first().ok_or_else(|| PipelineError::Input("no representations".into()))?;
    let lengths = check_equal_length(pair, reps, tol)?;
    let (nc, ni) = check_nonconjugate(pair);
    let filling = |w: &Word| is_filling(&w.cyclic_reduction(), first, scc_word_bound).map(|r| r.verdict);
    Ok(EquivalenceVerdict {
        pair: pair.clone(),
        equal_length_numeric: lengths.equal_numeric,
        max_deviation: lengths.max_deviation,
        equal_length_symbolic: lengths.equal_symbolic,
        nonconjugate: nc,
        not_conjugate_to_inverse: ni,
        filling_left: filling(&pair.left)?,
        filling_right: filling(&pair.right)?,
        n_observed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::equal_term_pairs_with;
    use crate::intersections::self_intersections;
    use crate::sampler::sample_representation;
    use crate::word::SurfaceSpec;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn pants(seed: u64) -> Representation {
        sample_representation(&SurfaceSpec::pair_of_pants(), seed, 3.0).unwrap()
    }

    fn torus(seed: u64) -> Representation {
        sample_representation(&SurfaceSpec::one_holed_torus(), seed, 3.0).unwrap()
    }

    fn figure_eight() -> (Word, IntersectionRecord) {
        let alpha = w("ab");
        let rec = self_intersections(&alpha, &pants(0), 6).unwrap().remove(0);
        (alpha, rec)
    }

    #[test]
    fn n_one_pair_is_conjugate() {
        let (alpha, rec) = figure_eight();
        let p = build_pair_self(&alpha, &rec, 1).unwrap();
        assert!(are_conjugate(&p.left, &p.right));
        assert_eq!(check_nonconjugate(&p), (false, true));
        assert!(build_pair_self(&alpha, &rec, 0).is_err());
    }

    #[test]
    fn pair_members_have_equal_cyclic_length() {
        let (alpha, rec) = figure_eight();
        for n in 1..=10 {
            let p = build_pair_self(&alpha, &rec, n).unwrap();
            assert_eq!(cyclic_normal_form(&p.left).len(), cyclic_normal_form(&p.right).len());
        }
    }

    #[test]
    fn self_pair_lengths_agree() {
        let (alpha, rec) = figure_eight();
        let reps: Vec<_> = (0..10).map(pants).collect();
        for n in 1..=5 {
            let p = build_pair_self(&alpha, &rec, n).unwrap();
            let c = check_equal_length(&p, &reps, DEFAULT_TOL).unwrap();
            assert!(c.equal_numeric && c.equal_symbolic, "n = {n}: {}", c.max_deviation);
        }
    }

    #[test]
    fn general_constructor_matches_self_constructor() {
        let (alpha, rec) = figure_eight();
        let pairs = equal_term_pairs_with(&alpha, &alpha, &pants(0), Enumeration::Exact).unwrap();
        let (g, h) = &pairs[0];
        for n in 1..=4 {
            let gen = build_pair_general(&alpha, &alpha, g, h, n).unwrap();
            let own = build_pair_self(&alpha, &rec, n).unwrap();
            let same = |x: &Word, y: &Word| are_conjugate(x, y);
            assert!(
                (same(&gen.left, &own.left) && same(&gen.right, &own.right))
                    || (same(&gen.left, &own.right) && same(&gen.right, &own.left))
            );
            let c = check_equal_length(&gen, &[pants(3), pants(4)], DEFAULT_TOL).unwrap();
            assert!(c.equal_numeric && c.equal_symbolic);
        }
        assert_eq!(build_pair_general(&alpha, &alpha, g, g, 2), Err(PipelineError::Degenerate));
    }

    #[test]
    fn scrambled_control_fails() {
        let alpha = w("ab");
        let (g, h) = (w("a"), w("bb"));
        assert!(!are_conjugate(&term_word(&alpha, &alpha, &g), &term_word(&alpha, &alpha, &h)));
        let pair = CurvePair {
            left: alpha.power(3).compose(&alpha.conjugate(&g)),
            right: alpha.power(3).compose(&alpha.conjugate(&h)),
            n: 3,
            provenance: Provenance::General {
                alpha: alpha.clone(),
                beta: alpha.clone(),
                g,
                h,
            },
        };
        let c = check_equal_length(&pair, &[pants(1)], DEFAULT_TOL).unwrap();
        assert!(c.max_deviation > 1e-3);
        assert!(!c.equal_symbolic);
    }

    #[test]
    fn threshold_scan() {
        let (alpha, rec) = figure_eight();
        let scan = find_min_n(&alpha, &rec, 20).unwrap();
        let n = scan.n_observed.unwrap();
        assert!(n <= 5);
        assert!(scan.table.iter().filter(|r| r.n > n).all(|r| r.nonconjugate && r.not_conjugate_to_inverse));
        assert_eq!(find_min_n(&alpha, &rec, 1).unwrap().n_observed, None);
    }

    #[test]
    fn filling_verdicts() {
        let r = is_filling(&w("ab"), &pants(0), 4).unwrap();
        assert_eq!(r.verdict, Filling::Yes);
        let r = is_filling(&w("a"), &pants(0), 4).unwrap();
        assert_eq!((r.verdict, r.witness), (Filling::No, Some(w("a"))));
        let t = torus(0);
        let r = is_filling(&w("a"), &t, 4).unwrap();
        assert_eq!(r.verdict, Filling::No);
        let z = r.witness.unwrap();
        assert!(!t.topology().unwrap().is_peripheral(&z));
        assert_eq!(is_filling(&w("abAB"), &t, 4).unwrap().verdict, Filling::No);
    }

    #[test]
    fn filling_on_the_torus() {
        let t = torus(0);
        let cands = simple_candidates(&t, 3).unwrap();
        for c in ["a", "b", "ab", "aB"] {
            assert!(cands.contains(&w(c)), "{c} missing from {cands:?}");
        }
        assert!(cands.contains(&w("aab")));
        assert!(!cands.contains(&w("aabb")));
        let r = is_filling(&w("aabAB"), &t, 3).unwrap();
        assert_ne!(r.verdict, Filling::Inconclusive);
    }

    #[test]
    fn filling_pairs_propagate() {
        let (alpha, rec) = figure_eight();
        let rows = verify_filling_pairs(&alpha, &rec, 2..=4, &pants(0), 4).unwrap();
        assert!(rows.iter().all(|r| r.left == Filling::Yes && r.right == Filling::Yes));
        let a_rec = rec.clone();
        assert!(verify_filling_pairs(&w("a"), &a_rec, 2..=3, &pants(0), 4).is_err());
    }
}
