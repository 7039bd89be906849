//! Discrete free representations of the fundamental group, certified by the
//! ping-pong criterion on the circle at infinity.
//!
//! Every signed generator `x` owns a closed arc `I_x`; the arcs are pairwise
//! disjoint and `x` maps the complement of `I_{x⁻¹}` into `I_x`. The cyclic
//! order of the arcs is a ribbon structure on a one-vertex graph and fixes
//! the topology of the quotient, so the sampler lays the arcs out in an order
//! chosen from the [`SurfaceSpec`] and only varies sizes, positions and twists.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sl2::{three_point_map, Axis, Boundary, HPoint, Mat2, Sl2Error};
use crate::word::{cyclic_normal_form, CyclicWord, Letter, SurfaceSpec, Word, WordError};

/// Smallest accepted `spread`.
pub const MIN_SPREAD: f64 = 1.5;
const MAX_RETRIES: usize = 12;
const SPREAD_GROWTH: f64 = 1.5;
/// Minimal angular gap between certificate arcs.
const ARC_GAP: f64 = 1e-9;
/// Angular slack when checking that endpoint images land inside an arc.
const ARC_SLACK: f64 = 1e-9;
/// Freeness spot-check threshold.
const IDENTITY_DISTANCE: f64 = 1e-6;
const SPOT_CHECK_LEN: usize = 6;
const SPOT_CHECK_BUDGET: u64 = 250_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Geometry(#[from] Sl2Error),
    #[error("spread {0} is below the floor {MIN_SPREAD}")]
    SpreadTooSmall(f64),
    #[error("could not certify a representation after {0} attempts")]
    Exhausted(usize),
    #[error("ping-pong certificate rejected: {0}")]
    NotCertified(String),
    #[error("word uses generator {generator} but the representation has rank {rank}")]
    Alphabet { generator: usize, rank: usize },
}

fn norm_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Closed arc of the circle at infinity, traversed counter-clockwise from
/// `start` to `end` (through ∞ when `end < start` on the real line).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: Boundary<f64>,
    pub end: Boundary<f64>,
}

impl Arc {
    pub fn from_angles(start: f64, end: f64) -> Self {
        Self {
            start: Boundary::from_angle(start),
            end: Boundary::from_angle(end),
        }
    }

    pub fn start_angle(&self) -> f64 {
        self.start.angle()
    }

    pub fn width(&self) -> f64 {
        norm_angle(self.end.angle() - self.start.angle())
    }

    /// Counter-clockwise offset of `theta` from the start of the arc.
    pub fn offset(&self, theta: f64) -> f64 {
        norm_angle(theta - self.start_angle())
    }

    pub fn mid_angle(&self) -> f64 {
        norm_angle(self.start_angle() + self.width() / 2.0)
    }

    /// Angle at fraction `t` of the way through the arc.
    pub fn angle_at(&self, t: f64) -> f64 {
        norm_angle(self.start_angle() + t * self.width())
    }

    pub fn contains_angle(&self, theta: f64, slack: f64) -> bool {
        let o = self.offset(theta);
        o <= self.width() + slack || o >= TAU - slack
    }

    /// The closed complementary arc.
    pub fn complement(&self) -> Arc {
        Arc {
            start: self.end,
            end: self.start,
        }
    }

    fn disjoint_from(&self, other: &Arc, gap: f64) -> bool {
        let o = self.offset(other.start_angle());
        o > self.width() + gap && o + other.width() < TAU - gap
    }
}

/// One arc per signed generator, listed a, A, b, B, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PingPongCertificate {
    pub arcs: Vec<Arc>,
}

fn letter_slot(l: Letter) -> usize {
    l.order_key() as usize
}

fn slot_letter(i: usize) -> Letter {
    let g = (i / 2 + 1) as i32;
    Letter::new(if i.is_multiple_of(2) { g } else { -g }).expect("nonzero")
}

impl PingPongCertificate {
    pub fn arc(&self, l: Letter) -> &Arc {
        &self.arcs[letter_slot(l)]
    }

    pub fn rank(&self) -> usize {
        self.arcs.len() / 2
    }

    /// Signed generators in counter-clockwise order, starting from the arc
    /// whose start angle is smallest.
    pub fn cyclic_order(&self) -> Vec<Letter> {
        let mut idx: Vec<usize> = (0..self.arcs.len()).collect();
        idx.sort_by(|&i, &j| {
            self.arcs[i]
                .start_angle()
                .partial_cmp(&self.arcs[j].start_angle())
                .expect("finite angles")
        });
        idx.into_iter().map(slot_letter).collect()
    }

    pub fn topology(&self) -> RibbonTopology {
        RibbonTopology::from_cyclic_order(&self.cyclic_order())
    }
}

/// Topology of the surface thickening a one-vertex ribbon graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RibbonTopology {
    pub rank: usize,
    pub genus: u32,
    pub ends: u32,
    /// Conjugacy classes of the boundary curves, one orientation each.
    pub peripheral: Vec<CyclicWord>,
}

impl RibbonTopology {
    /// Walk the gaps between consecutive arcs. Leaving the gap that follows
    /// `u` one meets the arc of `v = next(u)`, whose side is glued by `v⁻¹`
    /// to the side of `v⁻¹`; the walk continues in the gap after `v⁻¹`. The
    /// letters met along a cycle spell a boundary word.
    pub fn from_cyclic_order(order: &[Letter]) -> Self {
        let n = order.len();
        let pos = |l: Letter| order.iter().position(|&m| m == l).expect("letter in order");
        let mut seen = vec![false; n];
        let mut peripheral = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut letters = Vec::new();
            let mut g = start;
            while !seen[g] {
                seen[g] = true;
                let v = order[(g + 1) % n];
                letters.push(v);
                g = pos(v.inverse());
            }
            peripheral.push(cyclic_normal_form(&Word::from_letters(letters)));
        }
        peripheral.sort();
        let rank = n / 2;
        let ends = peripheral.len() as u32;
        // χ = 1 − rank = 2 − 2g − ends
        let genus = ((1 + rank as i64 - ends as i64) / 2).max(0) as u32;
        Self {
            rank,
            genus,
            ends,
            peripheral,
        }
    }

    /// `3g − 3 + ends`: zero exactly when every essential simple closed curve
    /// is boundary-parallel.
    pub fn complexity(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.ends as i64
    }

    /// True iff `w` is a nonzero power of a boundary class (either orientation).
    pub fn is_peripheral(&self, w: &Word) -> bool {
        let Ok((_, root, _)) = w.proper_power() else {
            return false;
        };
        let c = cyclic_normal_form(&root);
        let ci = c.inverse();
        self.peripheral.iter().any(|p| *p == c || *p == ci)
    }
}

/// Counter-clockwise arrangement of signed generators realising `surface`:
/// one interleaved block `X y x Y` per handle, then adjacent pairs per
/// additional end, alternating `X x` and `x X`. On the pair of pants this
/// makes `a`, `b` and `aB` the boundary classes, so `ab` is the figure-eight.
pub fn surface_cyclic_order(surface: &SurfaceSpec) -> Vec<Letter> {
    let mut order = Vec::with_capacity(2 * surface.rank());
    let mut next = 1usize;
    for _ in 0..surface.genus {
        let x = Letter::gen(next);
        let y = Letter::gen(next + 1);
        order.extend([x.inverse(), y, x, y.inverse()]);
        next += 2;
    }
    let mut flip = false;
    while next <= surface.rank() {
        let x = Letter::gen(next);
        if flip {
            order.extend([x, x.inverse()]);
        } else {
            order.extend([x.inverse(), x]);
        }
        flip = !flip;
        next += 1;
    }
    order
}

/// Discrete free representation of the surface group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    pub surface: SurfaceSpec,
    #[serde(with = "matrix_list")]
    pub matrices: Vec<Mat2<f64>>,
    pub seed: u64,
    pub spread: f64,
    pub certificate: Option<PingPongCertificate>,
}

mod matrix_list {
    use super::Mat2;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Mat2<f64>], s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|m| m.to_array()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Mat2<f64>>, D::Error> {
        let raw = Vec::<[f64; 4]>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|[a, b, c, d]| Mat2::new(a, b, c, d))
            .collect())
    }
}

impl Representation {
    /// Build from raw generator matrices (each renormalised to determinant one).
    pub fn from_matrices(surface: SurfaceSpec, matrices: Vec<Mat2<f64>>) -> Result<Self, SamplerError> {
        surface.validate()?;
        if matrices.len() != surface.rank() {
            return Err(SamplerError::NotCertified(format!(
                "{} matrices for a rank {} surface",
                matrices.len(),
                surface.rank()
            )));
        }
        let matrices = matrices
            .iter()
            .map(|m| m.normalized())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            surface,
            matrices,
            seed: 0,
            spread: 0.0,
            certificate: None,
        })
    }

    pub fn rank(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_certified(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn letter_matrix(&self, l: Letter) -> Mat2<f64> {
        let m = self.matrices[l.generator() - 1];
        if l.is_inverse() {
            m.inverse()
        } else {
            m
        }
    }

    /// Image of a word; the empty word maps to the identity. Generators are
    /// unimodular, so products are not rescaled: recomputing `ad − bc` on
    /// large entries costs more accuracy than it restores.
    pub fn evaluate(&self, w: &Word) -> Result<Mat2<f64>, SamplerError> {
        if w.max_generator() > self.rank() {
            return Err(SamplerError::Alphabet {
                generator: w.max_generator(),
                rank: self.rank(),
            });
        }
        let mut acc = Mat2::identity();
        for &l in w.letters() {
            acc = acc * self.letter_matrix(l);
        }
        Ok(acc)
    }

    pub fn axis(&self, w: &Word) -> Result<Axis<f64>, SamplerError> {
        Ok(self.evaluate(w)?.axis()?)
    }

    pub fn translation_length(&self, w: &Word) -> Result<f64, SamplerError> {
        Ok(self.evaluate(w)?.translation_length()?)
    }

    pub fn topology(&self) -> Option<RibbonTopology> {
        self.certificate.as_ref().map(|c| c.topology())
    }
}

fn generator_from_arcs(inv_arc: &Arc, arc: &Arc, twist: f64) -> Result<Mat2<f64>, Sl2Error> {
    // x maps the complement of I_{x⁻¹} onto I_x, end-to-start and start-to-end
    let comp = inv_arc.complement();
    three_point_map(
        [
            comp.start,
            Boundary::from_angle(comp.mid_angle()),
            comp.end,
        ],
        [arc.start, Boundary::from_angle(arc.angle_at(twist)), arc.end],
    )
}

fn layout(
    surface: &SurfaceSpec,
    spread: f64,
    rng: Option<&mut ChaCha8Rng>,
) -> Option<(Vec<Mat2<f64>>, PingPongCertificate)> {
    let rank = surface.rank();
    let order = surface_cyclic_order(surface);
    let slot = PI / rank as f64;
    let half = 4.0 * (1.0 / spread).atan() / rank as f64;
    if 2.0 * half >= slot - 1e-6 {
        return None;
    }
    let mut arcs = vec![Arc::from_angles(0.0, 0.0); 2 * rank];
    let mut twists = vec![0.5; rank];
    match rng {
        None => {
            for (j, &l) in order.iter().enumerate() {
                let c = j as f64 * slot;
                arcs[letter_slot(l)] = Arc::from_angles(c - half, c + half);
            }
        }
        Some(rng) => {
            for (j, &l) in order.iter().enumerate() {
                let w = half * rng.gen_range(0.6..1.0);
                let room = slot / 2.0 - w;
                let c = j as f64 * slot + 0.8 * room * rng.gen_range(-1.0..1.0);
                arcs[letter_slot(l)] = Arc::from_angles(c - w, c + w);
            }
            for t in twists.iter_mut() {
                *t = rng.gen_range(0.25..0.75);
            }
        }
    }
    let cert = PingPongCertificate { arcs };
    let mut matrices = Vec::with_capacity(rank);
    for (g, &twist) in twists.iter().enumerate() {
        let x = Letter::gen(g + 1);
        let m = generator_from_arcs(cert.arc(x.inverse()), cert.arc(x), twist).ok()?;
        matrices.push(m.positive_trace());
    }
    Some((matrices, cert))
}

/// Deterministic certified representation. Seed 0 is the symmetric layout;
/// other seeds jitter arc sizes, positions and twists. When the arcs cannot
/// be made disjoint the spread grows geometrically.
pub fn sample_representation(
    surface: &SurfaceSpec,
    seed: u64,
    spread: f64,
) -> Result<Representation, SamplerError> {
    surface.validate()?;
    if !(spread >= MIN_SPREAD) || !spread.is_finite() {
        return Err(SamplerError::SpreadTooSmall(spread));
    }
    let mut s = spread;
    for _ in 0..MAX_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let built = if seed == 0 {
            layout(surface, s, None)
        } else {
            layout(surface, s, Some(&mut rng))
        };
        if let Some((matrices, cert)) = built {
            let rep = Representation {
                surface: *surface,
                matrices,
                seed,
                spread: s,
                certificate: None,
            };
            if verify_certificate(&rep, &cert).is_ok() {
                return Ok(Representation {
                    certificate: Some(cert),
                    ..rep
                });
            }
        }
        s *= SPREAD_GROWTH;
    }
    Err(SamplerError::Exhausted(MAX_RETRIES))
}

/// Check a candidate certificate against the representation, including the
/// freeness spot-check on short words.
pub fn verify_certificate(rep: &Representation, cert: &PingPongCertificate) -> Result<(), SamplerError> {
    let rank = rep.rank();
    if cert.arcs.len() != 2 * rank {
        return Err(SamplerError::NotCertified("wrong number of arcs".into()));
    }
    for (i, a) in cert.arcs.iter().enumerate() {
        if !(a.width() > 0.0 && a.width() < TAU) {
            return Err(SamplerError::NotCertified(format!("arc {i} is degenerate")));
        }
        for b in &cert.arcs[i + 1..] {
            if !a.disjoint_from(b, ARC_GAP) {
                return Err(SamplerError::NotCertified("arcs overlap".into()));
            }
        }
    }
    for g in 1..=rank {
        let x = Letter::gen(g);
        let m = rep.letter_matrix(x);
        let comp = cert.arc(x.inverse()).complement();
        let target = cert.arc(x);
        let probes = [
            comp.start,
            Boundary::from_angle(comp.mid_angle()),
            comp.end,
        ];
        let mut last = -1.0;
        for p in probes {
            let th = m.act_boundary(p).angle();
            if !target.contains_angle(th, ARC_SLACK) {
                return Err(SamplerError::NotCertified(format!(
                    "generator {} does not map into its arc",
                    x.to_char()
                )));
            }
            let mut o = target.offset(th);
            if o > TAU - ARC_SLACK {
                o = 0.0;
            }
            if o + ARC_SLACK < last {
                return Err(SamplerError::NotCertified(format!(
                    "generator {} reverses its arc",
                    x.to_char()
                )));
            }
            last = o;
        }
    }
    spot_check_freeness(rep)
}

fn spot_check_freeness(rep: &Representation) -> Result<(), SamplerError> {
    let rank = rep.rank();
    let mut len = SPOT_CHECK_LEN;
    while len > 1 && crate::word::count_reduced_words(rank, len) > SPOT_CHECK_BUDGET {
        len -= 1;
    }
    let mut stack: Vec<(Letter, Mat2<f64>)> = Vec::new();
    fn rec(
        rep: &Representation,
        len: usize,
        stack: &mut Vec<(Letter, Mat2<f64>)>,
    ) -> Result<(), SamplerError> {
        if let Some((_, m)) = stack.last() {
            if m.distance_from_identity() < IDENTITY_DISTANCE {
                return Err(SamplerError::NotCertified(
                    "a short word evaluates to the identity".into(),
                ));
            }
        }
        if stack.len() == len {
            return Ok(());
        }
        for g in 1..=rep.rank() {
            for l in [Letter::gen(g), Letter::gen(g).inverse()] {
                if stack.last().map(|(p, _)| *p) == Some(l.inverse()) {
                    continue;
                }
                let prev = stack.last().map(|(_, m)| *m).unwrap_or_else(Mat2::identity);
                stack.push((l, prev * rep.letter_matrix(l)));
                let r = rec(rep, len, stack);
                stack.pop();
                r?;
            }
        }
        Ok(())
    }
    rec(rep, len, &mut stack)
}

/// Boundary arc of points nearer `m·o` than `o` (Dirichlet half-plane at infinity).
fn dirichlet_arc(m: &Mat2<f64>, o: HPoint<f64>) -> Option<Arc> {
    let w = m.act(o);
    // |x − w|²/Im w < |x − o|²/Im o, as a quadratic A x² + B x + C < 0
    let qa = 1.0 / w.y - 1.0 / o.y;
    let qb = -2.0 * (w.x / w.y - o.x / o.y);
    let qc = (w.x * w.x + w.y * w.y) / w.y - (o.x * o.x + o.y * o.y) / o.y;
    let fin = Boundary::Finite;
    if qa.abs() < 1e-14 {
        if qb.abs() < 1e-14 {
            return None;
        }
        let r = -qc / qb;
        return Some(if qb > 0.0 {
            Arc {
                start: Boundary::Infinity,
                end: fin(r),
            }
        } else {
            Arc {
                start: fin(r),
                end: Boundary::Infinity,
            }
        });
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let (r1, r2) = {
        let x1 = (-qb - s) / (2.0 * qa);
        let x2 = (-qb + s) / (2.0 * qa);
        (x1.min(x2), x1.max(x2))
    };
    Some(if qa > 0.0 {
        Arc {
            start: fin(r1),
            end: fin(r2),
        }
    } else {
        Arc {
            start: fin(r2),
            end: fin(r1),
        }
    })
}

fn dirichlet_certificate(rep: &Representation, o: HPoint<f64>) -> Option<PingPongCertificate> {
    let mut arcs = Vec::with_capacity(2 * rep.rank());
    for g in 1..=rep.rank() {
        let x = Letter::gen(g);
        arcs.push(dirichlet_arc(&rep.letter_matrix(x), o)?);
        arcs.push(dirichlet_arc(&rep.letter_matrix(x.inverse()), o)?);
    }
    Some(PingPongCertificate { arcs })
}

fn base_points() -> Vec<HPoint<f64>> {
    let mut pts = vec![HPoint::i()];
    for &y in &[1.0, 0.5, 2.0, 0.25, 4.0] {
        for &x in &[0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0] {
            if x == 0.0 && y == 1.0 {
                continue;
            }
            pts.push(HPoint::new(x, y));
        }
    }
    pts
}

/// Certificate keeping the inverse arcs and re-deriving each forward arc as
/// the image of the complement.
fn transported_certificate(rep: &Representation, old: &PingPongCertificate) -> PingPongCertificate {
    let mut arcs = old.arcs.clone();
    for g in 1..=rep.rank() {
        let x = Letter::gen(g);
        let m = rep.letter_matrix(x);
        let comp = old.arc(x.inverse()).complement();
        arcs[letter_slot(x)] = Arc {
            start: m.act_boundary(comp.start),
            end: m.act_boundary(comp.end),
        };
    }
    PingPongCertificate { arcs }
}

/// Find and verify a ping-pong certificate. An attached certificate is tried
/// first, then Dirichlet arcs around a fixed list of base points.
pub fn certify_ping_pong(rep: &Representation) -> Result<PingPongCertificate, SamplerError> {
    for g in 1..=rep.rank() {
        rep.matrices[g - 1].translation_length()?;
    }
    if let Some(c) = &rep.certificate {
        if verify_certificate(rep, c).is_ok() {
            return Ok(c.clone());
        }
        let moved = transported_certificate(rep, c);
        if verify_certificate(rep, &moved).is_ok() {
            return Ok(moved);
        }
    }
    let mut last = SamplerError::NotCertified("no base point gave disjoint arcs".into());
    for o in base_points() {
        if let Some(c) = dirichlet_certificate(rep, o) {
            match verify_certificate(rep, &c) {
                Ok(()) => return Ok(c),
                Err(e) => last = e,
            }
        }
    }
    Err(last)
}

/// Nearby certified representation: each generator is multiplied by a small
/// random unimodular matrix. The magnitude halves until the result certifies
/// with the same arc order.
pub fn perturb(rep: &Representation, seed: u64, magnitude: f64) -> Result<Representation, SamplerError> {
    if magnitude == 0.0 {
        return Ok(rep.clone());
    }
    let order = rep.certificate.as_ref().map(|c| c.cyclic_order());
    let mut mag = magnitude.abs();
    for _ in 0..MAX_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let matrices = rep
            .matrices
            .iter()
            .map(|m| {
                let e = Mat2::new(
                    1.0 + mag * rng.gen_range(-1.0..1.0),
                    mag * rng.gen_range(-1.0..1.0),
                    mag * rng.gen_range(-1.0..1.0),
                    1.0 + mag * rng.gen_range(-1.0..1.0),
                );
                e.normalized().map(|e| *m * e)
            })
            .collect::<Result<Vec<_>, _>>();
        if let Ok(matrices) = matrices {
            let candidate = Representation {
                matrices,
                ..rep.clone()
            };
            if let Ok(cert) = certify_ping_pong(&candidate) {
                if order.as_ref().is_none_or(|o| same_cyclic_order(o, &cert.cyclic_order())) {
                    return Ok(Representation {
                        certificate: Some(cert),
                        ..candidate
                    });
                }
            }
        }
        mag /= 2.0;
    }
    Err(SamplerError::Exhausted(MAX_RETRIES))
}

fn same_cyclic_order(a: &[Letter], b: &[Letter]) -> bool {
    a.len() == b.len() && (0..a.len()).any(|k| (0..a.len()).all(|i| a[i] == b[(i + k) % b.len()]))
}
