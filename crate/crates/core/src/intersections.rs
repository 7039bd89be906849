//! Intersection points of closed geodesics, found as crossing axis translates
//! in the upper half-plane.
//!
//! A point of `α ∩ β` on the surface is a double coset `⟨α⟩ h ⟨β⟩` such that
//! `A_α` crosses `h·A_β`. For self-intersections the cosets of `g` and `g⁻¹`
//! describe the same point and are merged.
//!
//! Two enumeration modes are provided. The bounded mode scans every reduced
//! `h` up to a word length and keeps crossings inside one period of `A_α`.
//! The exact mode uses the fact that two crossing axes in a Schottky group
//! also cross in the Cayley tree, so every double coset has a representative
//! `p·q⁻¹` with `p` a prefix of `α` and `q` a prefix of `β`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::sampler::{Representation, SamplerError};
use crate::sl2::{Axis, HPoint, Mat2, Sl2Error};
use crate::word::{are_conjugate, is_conjugate_to_inverse, Letter, Word, WordError};

/// Endpoint separation guard used inside the local frame of `A_α`.
pub const LOCAL_DEGENERACY_TOL: f64 = 1e-12;
/// Slack on the period window so boundary crossings are never lost.
const WINDOW_SLACK: f64 = 1e-9;
/// Hard cap for [`stabilized_count`].
pub const STABILIZATION_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntersectionError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Geometry(#[from] Sl2Error),
    #[error("{0} is a proper power")]
    ProperPower(String),
    #[error("{0} is not cyclically reduced")]
    NotCyclicallyReduced(String),
    #[error("the empty word has no geodesic")]
    EmptyWord,
    #[error("representation is not certified")]
    Uncertified,
    #[error("counts did not stabilise up to word length {cap}: {counts:?}")]
    Inconclusive { cap: usize, counts: Vec<usize> },
}

/// One intersection point, identified by its double coset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionRecord {
    /// Canonical representative of the double coset.
    pub witness: Word,
    /// Crossing point of `A_α` and `witness·A_β`, moved into the period window.
    pub point: HPoint<f64>,
    /// Position of the point along `A_α`, in `[0, τ_α)`.
    pub coordinate: f64,
    pub sign: i32,
    /// Angle from the direction of `A_α` to that of the translate.
    pub angle: f64,
    pub coset_key: String,
}

/// Which candidate set to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumeration {
    /// All reduced words up to the given length.
    Bounded(usize),
    /// Prefix differences `p·q⁻¹`; complete for certified representations.
    Exact,
}

fn check_curve(w: &Word) -> Result<(), IntersectionError> {
    if w.is_empty() {
        return Err(IntersectionError::EmptyWord);
    }
    if !w.is_cyclically_reduced() {
        return Err(IntersectionError::NotCyclicallyReduced(w.to_string()));
    }
    Ok(())
}

fn check_primitive(w: &Word) -> Result<(), IntersectionError> {
    check_curve(w)?;
    if w.proper_power()?.0 {
        return Err(IntersectionError::ProperPower(w.to_string()));
    }
    Ok(())
}

fn key_string(w: &Word) -> String {
    if w.is_empty() {
        "1".to_string()
    } else {
        w.to_string()
    }
}

/// Least element of `{αⁱ h βʲ}` by (length, lexicographic), searched over a
/// window of exponents that grows until the minimum is stable.
pub fn double_coset_representative(alpha: &Word, h: &Word, beta: &Word) -> Word {
    let step = alpha.len().min(beta.len()).max(1);
    let mut window = (h.len() / step + 2) as i64;
    let mut best = search_window(alpha, h, beta, window);
    loop {
        let wider = search_window(alpha, h, beta, window + 2);
        if wider == best {
            return best;
        }
        best = wider;
        window += 2;
    }
}

fn search_window(alpha: &Word, h: &Word, beta: &Word, window: i64) -> Word {
    let mut best = h.clone();
    for i in -window..=window {
        let left = alpha.power(i).compose(h);
        for j in -window..=window {
            let c = left.compose(&beta.power(j));
            if c < best {
                best = c;
            }
        }
    }
    best
}

/// Self-intersection key: the smaller of the representatives for `g` and `g⁻¹`.
pub fn self_coset_representative(alpha: &Word, g: &Word) -> Word {
    let a = double_coset_representative(alpha, g, alpha);
    let b = double_coset_representative(alpha, &g.invert(), alpha);
    a.min(b)
}

struct Frame {
    axis: Axis<f64>,
    normalize: Mat2<f64>,
    period: f64,
}

impl Frame {
    fn new(rep: &Representation, alpha: &Word) -> Result<Self, IntersectionError> {
        let axis = rep.axis(alpha)?;
        Ok(Self {
            normalize: axis.normalizing_map(),
            period: axis.translation_length,
            axis,
        })
    }

    /// Crossing of `A_α` with `m·A_β`, or `None` when they do not cross.
    /// Coincident or nearly shared endpoints away from the window are skipped.
    fn crossing(
        &self,
        m: &Mat2<f64>,
        beta_axis: &Axis<f64>,
        in_window_only: bool,
    ) -> Result<Option<(HPoint<f64>, f64, i32, f64)>, IntersectionError> {
        let local = self.normalize * *m;
        let (Some(p), Some(q)) = (
            local.act_boundary(beta_axis.repelling).finite(),
            local.act_boundary(beta_axis.attracting).finite(),
        ) else {
            return Ok(None);
        };
        if (p < 0.0) == (q < 0.0) {
            return Ok(None);
        }
        let tiny = |t: f64| t.abs() < LOCAL_DEGENERACY_TOL;
        let huge = |t: f64| t.abs() > 1.0 / LOCAL_DEGENERACY_TOL;
        if (tiny(p) && huge(q)) || (huge(p) && tiny(q)) {
            // same axis up to rounding
            return Ok(None);
        }
        let c = 0.5 * (-p * q).ln();
        let shift = (c / self.period).floor();
        let cw = c - shift * self.period;
        if in_window_only && !(c >= -WINDOW_SLACK && c < self.period + WINDOW_SLACK) {
            return Ok(None);
        }
        if tiny(p) || tiny(q) || huge(p) || huge(q) {
            return Err(Sl2Error::Degenerate(p.abs().min(q.abs())).into());
        }
        let other = beta_axis.image(m);
        let cr = self.axis.crossing_with_tol(&other, LOCAL_DEGENERACY_TOL)?;
        Ok(Some((self.axis.point_at(cw), cw, cr.sign, cr.angle)))
    }
}

fn require_certified(rep: &Representation) -> Result<(), IntersectionError> {
    if rep.is_certified() {
        Ok(())
    } else {
        Err(IntersectionError::Uncertified)
    }
}

fn bounded_candidates(rank: usize, bound: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..bound {
        let mut next = Vec::with_capacity(frontier.len() * (2 * rank - 1));
        for w in &frontier {
            let last = w.letters().last().copied();
            for g in 1..=rank {
                for l in [Letter::gen(g), Letter::gen(g).inverse()] {
                    if Some(l.inverse()) == last {
                        continue;
                    }
                    next.push(Word::from_letters(w.letters().iter().copied().chain([l])));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn exact_candidates(alpha: &Word, beta: &Word) -> Vec<Word> {
    let mut out = Vec::with_capacity(alpha.len() * beta.len());
    for i in 0..alpha.len() {
        let p = alpha.prefix(i);
        for j in 0..beta.len() {
            out.push(p.compose(&beta.prefix(j).invert()));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn collect(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
    mode: Enumeration,
    self_case: bool,
) -> Result<Vec<IntersectionRecord>, IntersectionError> {
    let frame = Frame::new(rep, alpha)?;
    let beta_axis = rep.axis(beta)?;
    let candidates = match mode {
        Enumeration::Bounded(b) => bounded_candidates(rep.rank(), b),
        Enumeration::Exact => exact_candidates(alpha, beta),
    };
    let in_window = matches!(mode, Enumeration::Bounded(_));
    let hits: Vec<Word> = candidates
        .par_iter()
        .map(|h| -> Result<Option<Word>, IntersectionError> {
            if self_case && (h.is_empty() || h.is_power_of(alpha)) {
                return Ok(None);
            }
            let m = rep.evaluate(h)?;
            Ok(frame.crossing(&m, &beta_axis, in_window)?.map(|_| h.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut by_key: BTreeMap<Word, ()> = BTreeMap::new();
    for h in hits {
        let key = if self_case {
            self_coset_representative(alpha, &h)
        } else {
            double_coset_representative(alpha, &h, beta)
        };
        by_key.insert(key, ());
    }
    let mut records = Vec::with_capacity(by_key.len());
    for witness in by_key.into_keys() {
        let m = rep.evaluate(&witness)?;
        let (point, coordinate, sign, angle) = frame
            .crossing(&m, &beta_axis, false)?
            .ok_or(IntersectionError::Geometry(Sl2Error::NoCrossing))?;
        records.push(IntersectionRecord {
            coset_key: key_string(&witness),
            witness,
            point,
            coordinate,
            sign,
            angle,
        });
    }
    records.sort_by(|a, b| a.coset_key.cmp(&b.coset_key));
    Ok(records)
}

/// Self-intersections of the closed geodesic of `alpha`, scanning witnesses
/// up to `word_bound`.
pub fn self_intersections(
    alpha: &Word,
    rep: &Representation,
    word_bound: usize,
) -> Result<Vec<IntersectionRecord>, IntersectionError> {
    self_intersections_with(alpha, rep, Enumeration::Bounded(word_bound))
}

pub fn self_intersections_with(
    alpha: &Word,
    rep: &Representation,
    mode: Enumeration,
) -> Result<Vec<IntersectionRecord>, IntersectionError> {
    check_primitive(alpha)?;
    alpha.check_rank(rep.rank())?;
    require_certified(rep)?;
    collect(alpha, alpha, rep, mode, true)
}

/// Intersections of the geodesics of `alpha` and `beta`. Equal classes are
/// routed to [`self_intersections_with`].
pub fn mutual_intersections(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
    word_bound: usize,
) -> Result<Vec<IntersectionRecord>, IntersectionError> {
    mutual_intersections_with(alpha, beta, rep, Enumeration::Bounded(word_bound))
}

pub fn mutual_intersections_with(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
    mode: Enumeration,
) -> Result<Vec<IntersectionRecord>, IntersectionError> {
    check_curve(alpha)?;
    check_curve(beta)?;
    alpha.check_rank(rep.rank())?;
    beta.check_rank(rep.rank())?;
    require_certified(rep)?;
    if are_conjugate(alpha, beta) || is_conjugate_to_inverse(alpha, beta) {
        let (_, root, _) = alpha.proper_power()?;
        return collect(&root, &root, rep, mode, true);
    }
    collect(alpha, beta, rep, mode, false)
}

/// Result of the stabilisation loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableCount {
    pub count: usize,
    /// Bound at which the count was first seen twice in a row.
    pub bound: usize,
    pub counts: Vec<(usize, usize)>,
}

/// Runs [`mutual_intersections`] at increasing bounds until two successive
/// counts agree, starting from `|α| + |β|`.
pub fn stabilized_count(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
) -> Result<StableCount, IntersectionError> {
    stabilized_count_capped(alpha, beta, rep, STABILIZATION_CAP)
}

pub fn stabilized_count_capped(
    alpha: &Word,
    beta: &Word,
    rep: &Representation,
    cap: usize,
) -> Result<StableCount, IntersectionError> {
    let start = (alpha.len() + beta.len()).min(cap.saturating_sub(1)).max(1);
    let mut counts = Vec::new();
    let mut prev: Option<usize> = None;
    for bound in start..=cap {
        let c = mutual_intersections(alpha, beta, rep, bound)?.len();
        counts.push((bound, c));
        if prev == Some(c) {
            return Ok(StableCount {
                count: c,
                bound,
                counts,
            });
        }
        prev = Some(c);
    }
    Err(IntersectionError::Inconclusive {
        cap,
        counts: counts.into_iter().map(|(_, c)| c).collect(),
    })
}

/// Number of intersection points from the exact candidate set.
pub fn exact_count(alpha: &Word, beta: &Word, rep: &Representation) -> Result<usize, IntersectionError> {
    Ok(mutual_intersections_with(alpha, beta, rep, Enumeration::Exact)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
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

    #[test]
    fn simple_curve_has_no_self_intersections() {
        assert!(self_intersections(&w("a"), &pants(0), 6).unwrap().is_empty());
    }

    #[test]
    fn figure_eight_has_one_point() {
        let rep = pants(0);
        let recs = self_intersections(&w("ab"), &rep, 6).unwrap();
        assert_eq!(recs.len(), 1, "{recs:?}");
        for b in [7, 8] {
            assert_eq!(self_intersections(&w("ab"), &rep, b).unwrap(), recs);
        }
        let exact = self_intersections_with(&w("ab"), &rep, Enumeration::Exact).unwrap();
        assert_eq!(exact.len(), 1);
        assert_eq!(exact[0].coset_key, recs[0].coset_key);
        assert!(recs[0].coordinate >= 0.0 && recs[0].coordinate < rep.translation_length(&w("ab")).unwrap());
    }

    #[test]
    fn a_meets_b_once_on_the_torus() {
        let rep = torus(0);
        let recs = mutual_intersections(&w("a"), &w("b"), &rep, 6).unwrap();
        assert_eq!(recs.len(), 1);
        assert!((recs[0].point.x).abs() < 1e-9 && (recs[0].point.y - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let rep = pants(0);
        assert!(matches!(
            self_intersections(&w("abab"), &rep, 4),
            Err(IntersectionError::ProperPower(_))
        ));
        assert!(self_intersections(&w("bAab"), &rep, 4).is_err());
        let mut bare = rep.clone();
        bare.certificate = None;
        assert_eq!(
            self_intersections(&w("ab"), &bare, 4),
            Err(IntersectionError::Uncertified)
        );
    }

    #[test]
    fn same_class_routes_to_self() {
        let rep = pants(0);
        assert!(mutual_intersections(&w("a"), &w("a"), &rep, 5).unwrap().is_empty());
        assert_eq!(stabilized_count(&w("a"), &w("a"), &rep).unwrap().count, 0);
    }

    #[test]
    fn keys_are_double_coset_invariant() {
        let rep = pants(0);
        let alpha = w("ab");
        for rec in self_intersections(&alpha, &rep, 6).unwrap() {
            for i in -2..=2 {
                for j in -2..=2 {
                    let g = alpha.power(i).compose(&rec.witness).compose(&alpha.power(j));
                    assert_eq!(self_coset_representative(&alpha, &g), rec.witness);
                }
            }
        }
    }

    #[test]
    fn signs_are_antisymmetric() {
        let rep = pants(2);
        let alpha = w("aab");
        for rec in self_intersections(&alpha, &rep, 6).unwrap() {
            let a = rep.axis(&alpha).unwrap();
            let b = a.image(&rep.evaluate(&rec.witness).unwrap());
            assert_eq!(a.crossing(&b).unwrap().sign, -b.crossing(&a).unwrap().sign);
            assert_eq!(a.crossing(&b).unwrap().sign, rec.sign);
        }
    }

    #[test]
    fn bounded_and_exact_agree() {
        let rep = pants(1);
        for (x, y) in [("ab", "a"), ("aB", "ab"), ("aab", "b"), ("abb", "aB")] {
            let s = stabilized_count(&w(x), &w(y), &rep).unwrap();
            assert_eq!(s.count, exact_count(&w(x), &w(y), &rep).unwrap(), "{x} {y}");
        }
        for x in ["ab", "aab", "aaB", "abAB"] {
            let exact = self_intersections_with(&w(x), &rep, Enumeration::Exact).unwrap();
            let bounded = self_intersections(&w(x), &rep, 8).unwrap();
            let keys = |r: &[IntersectionRecord]| r.iter().map(|r| r.coset_key.clone()).collect::<Vec<_>>();
            assert_eq!(keys(&exact), keys(&bounded), "{x}");
        }
    }

    #[test]
    fn powers_multiply_counts() {
        for (rep, x, y) in [(pants(0), "ab", "aab"), (torus(0), "a", "b"), (torus(4), "ab", "aB")] {
            let (alpha, beta) = (w(x), w(y));
            let base = exact_count(&alpha, &beta, &rep).unwrap();
            assert!(base > 0);
            for n in 2..=3 {
                assert_eq!(exact_count(&alpha.power(n), &beta, &rep).unwrap(), n as usize * base);
            }
        }
    }
}
