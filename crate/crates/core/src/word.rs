//! Free-group words, cyclic normal forms and exact conjugacy decisions.
//!
//! Letters are signed generator indices: `+i` is the i-th generator and `-i`
//! its inverse. Text uses lowercase for generators and uppercase for
//! inverses, so `"aB"` is `a·b⁻¹`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest rank expressible in the one-letter text syntax.
pub const MAX_RANK: usize = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter {letter} is outside the alphabet of rank {rank}")]
    Alphabet { letter: String, rank: usize },
    #[error("unexpected character {0:?} in word")]
    BadChar(char),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("invalid surface: {0}")]
    Surface(String),
}

/// Topological type of an orientable surface with free fundamental group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub genus: u32,
    pub boundary_components: u32,
    pub punctures: u32,
}

impl SurfaceSpec {
    pub fn new(genus: u32, boundary_components: u32, punctures: u32) -> Result<Self, WordError> {
        let s = Self {
            genus,
            boundary_components,
            punctures,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn pair_of_pants() -> Self {
        Self {
            genus: 0,
            boundary_components: 3,
            punctures: 0,
        }
    }

    pub fn one_holed_torus() -> Self {
        Self {
            genus: 1,
            boundary_components: 1,
            punctures: 0,
        }
    }

    pub fn validate(&self) -> Result<(), WordError> {
        if self.euler_characteristic() >= 0 {
            return Err(WordError::Surface(format!(
                "Euler characteristic {} is not negative",
                self.euler_characteristic()
            )));
        }
        if self.ends() == 0 {
            return Err(WordError::Surface(
                "closed surfaces do not have free fundamental group".into(),
            ));
        }
        if self.rank() < 2 {
            return Err(WordError::Surface(format!("rank {} < 2", self.rank())));
        }
        if self.rank() > MAX_RANK {
            return Err(WordError::Surface(format!("rank {} > {MAX_RANK}", self.rank())));
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary_components as i64 - self.punctures as i64
    }

    /// Boundary components plus punctures.
    pub fn ends(&self) -> u32 {
        self.boundary_components + self.punctures
    }

    pub fn rank(&self) -> usize {
        (1 - self.euler_characteristic()) as usize
    }
}

/// A signed generator index, never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    pub fn new(signed_index: i32) -> Option<Self> {
        (signed_index != 0).then_some(Self(signed_index))
    }

    pub fn gen(index: usize) -> Self {
        Self(index as i32)
    }

    pub fn signed_index(self) -> i32 {
        self.0
    }

    /// One-based generator index.
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Self(-self.0)
    }

    /// Position in the order a < A < b < B < ...
    pub fn order_key(self) -> u32 {
        2 * (self.0.unsigned_abs() - 1) + u32::from(self.0 < 0)
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + (self.generator() - 1) as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Result<Self, WordError> {
        if c.is_ascii_lowercase() {
            Ok(Self((c as u8 - b'a' + 1) as i32))
        } else if c.is_ascii_uppercase() {
            Ok(Self(-((c as u8 - b'A' + 1) as i32)))
        } else {
            Err(WordError::BadChar(c))
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

/// A freely reduced word. The empty word is the identity.
///
/// Words order by length first, then lexicographically under a < A < b < B.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Single left-to-right pass with a stack; produces the unique reduced form.
fn reduce_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Reduce a raw letter sequence, checking every letter against `rank`.
pub fn free_reduce(raw: &[Letter], rank: usize) -> Result<Word, WordError> {
    if let Some(bad) = raw.iter().find(|l| l.generator() > rank) {
        return Err(WordError::Alphabet {
            letter: bad.to_char().to_string(),
            rank,
        });
    }
    Ok(Word::from_letters(raw.iter().copied()))
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        Self {
            letters: reduce_letters(raw),
        }
    }

    pub fn generator(index: usize) -> Self {
        Self {
            letters: vec![Letter::gen(index)],
        }
    }

    /// Parse and check the alphabet against `rank`.
    pub fn parse_with_rank(s: &str, rank: usize) -> Result<Self, WordError> {
        let raw = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '·' && *c != '*')
            .map(Letter::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        free_reduce(&raw, rank)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Highest generator index used, 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: usize) -> Result<(), WordError> {
        match self.letters.iter().find(|l| l.generator() > rank) {
            Some(bad) => Err(WordError::Alphabet {
                letter: bad.to_char().to_string(),
                rank,
            }),
            None => Ok(()),
        }
    }

    pub fn compose(&self, other: &Word) -> Word {
        Word::from_letters(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn power(&self, n: i64) -> Word {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let k = n.unsigned_abs() as usize;
        Word::from_letters(
            std::iter::repeat_n(base.letters.iter().copied(), k)
                .flatten(),
        )
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate(&self, g: &Word) -> Word {
        Word::from_letters(
            g.letters
                .iter()
                .copied()
                .chain(self.letters.iter().copied())
                .chain(g.letters.iter().rev().map(|l| l.inverse())),
        )
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(f), Some(l)) => self.letters.len() == 1 || *f != l.inverse(),
            _ => true,
        }
    }

    /// Split `self = c · core · c⁻¹` with `core` cyclically reduced.
    pub fn cyclic_decomposition(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        (
            Word {
                letters: self.letters[..k].to_vec(),
            },
            Word {
                letters: self.letters[k..n - k].to_vec(),
            },
        )
    }

    pub fn cyclic_reduction(&self) -> Word {
        self.cyclic_decomposition().1
    }

    /// Rotation `letters[k..] ++ letters[..k]`; only meaningful on cyclically reduced words.
    pub fn rotation(&self, k: usize) -> Word {
        let n = self.letters.len();
        if n == 0 {
            return Word::identity();
        }
        let k = k % n;
        Word {
            letters: self.letters[k..]
                .iter()
                .chain(self.letters[..k].iter())
                .copied()
                .collect(),
        }
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word {
            letters: self.letters[..k].to_vec(),
        }
    }

    /// Least root `r` and largest `k` with `self = r^k`.
    pub fn proper_power(&self) -> Result<(bool, Word, u32), WordError> {
        if self.is_empty() {
            return Err(WordError::Degenerate("the identity has no root"));
        }
        let (c, core) = self.cyclic_decomposition();
        let n = core.len();
        let period = (1..=n)
            .filter(|d| n % d == 0)
            .find(|&d| (d..n).all(|i| core.letters[i] == core.letters[i - d]))
            .unwrap_or(n);
        let root = Word {
            letters: core.letters[..period].to_vec(),
        }
        .conjugate(&c);
        let k = (n / period) as u32;
        Ok((k > 1, root, k))
    }

    /// True iff `self` is a power (including zeroth and negative) of the cyclically
    /// reduced word `base`.
    pub fn is_power_of(&self, base: &Word) -> bool {
        if self.is_empty() {
            return true;
        }
        if base.is_empty() || !self.len().is_multiple_of(base.len()) {
            return false;
        }
        let b = if self.letters[0] == base.letters[0] {
            base.clone()
        } else {
            base.invert()
        };
        self.letters
            .iter()
            .enumerate()
            .all(|(i, l)| *l == b.letters[i % b.len()])
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Word::parse_with_rank(s, MAX_RANK)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Conjugacy class of a word: the lexicographically least rotation of its
/// cyclic reduction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn as_word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        cyclic_normal_form(&self.0.invert())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for CyclicWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclicWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(cyclic_normal_form(&Word::deserialize(d)?))
    }
}

/// Least rotation index by Booth's algorithm.
fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let key = |i: usize| s[i % n].order_key();
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k: usize = 0;
    for j in 1..2 * n {
        let sj = key(j);
        let mut i = f[j - k - 1];
        while i != -1 && sj != key(k + i as usize + 1) {
            if sj < key(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if i == -1 && sj != key(k) {
            if sj < key(k) {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    k
}

pub fn cyclic_normal_form(u: &Word) -> CyclicWord {
    let core = u.cyclic_reduction();
    let k = least_rotation(core.letters());
    CyclicWord(core.rotation(k))
}

pub fn are_conjugate(u: &Word, v: &Word) -> bool {
    u.len() % 2 == v.len() % 2 && cyclic_normal_form(u) == cyclic_normal_form(v)
}

pub fn is_conjugate_to_inverse(u: &Word, v: &Word) -> bool {
    are_conjugate(u, &v.invert())
}

/// Every reduced word of length exactly `len` over `rank` generators, in
/// lexicographic order.
pub fn reduced_words_of_length(rank: usize, len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (1..=rank as i32)
        .flat_map(|i| [Letter(i), Letter(-i)])
        .collect();
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(len);
    fn rec(alphabet: &[Letter], len: usize, stack: &mut Vec<Letter>, out: &mut Vec<Word>) {
        if stack.len() == len {
            out.push(Word {
                letters: stack.clone(),
            });
            return;
        }
        for &l in alphabet {
            if stack.last() == Some(&l.inverse()) {
                continue;
            }
            stack.push(l);
            rec(alphabet, len, stack, out);
            stack.pop();
        }
    }
    rec(&alphabet, len, &mut stack, &mut out);
    out
}

/// Number of reduced words of length at most `len`.
pub fn count_reduced_words(rank: usize, len: usize) -> u64 {
    let m = 2 * rank as u64;
    let mut total = 1u64;
    let mut at = m;
    for _ in 1..=len {
        total = total.saturating_add(at);
        at = at.saturating_mul(m - 1);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(w("aA"), Word::identity());
        assert_eq!(w("abBAa"), w("a"));
        assert_eq!(w("abBAa").to_string(), "a");
    }

    #[test]
    fn alphabet_errors() {
        assert!(matches!(
            Word::parse_with_rank("ac", 2),
            Err(WordError::Alphabet { .. })
        ));
        assert!(matches!(Word::parse_with_rank("a1", 2), Err(WordError::BadChar('1'))));
        let raw = [Letter::gen(1), Letter::gen(3)];
        assert!(free_reduce(&raw, 2).is_err());
    }

    #[test]
    fn group_operations() {
        assert_eq!(w("a").conjugate(&Word::identity()), w("a"));
        assert_eq!(w("ab").power(2), w("abab"));
        assert_eq!(w("ab").compose(&w("ab").invert()), Word::identity());
        assert_eq!(w("ab").power(0), Word::identity());
        assert_eq!(w("ab").power(-2), w("abab").invert());
        assert_eq!(w("a").conjugate(&w("b")), w("baB"));
    }

    #[test]
    fn cyclic_forms() {
        assert_eq!(cyclic_normal_form(&w("baB")), cyclic_normal_form(&w("a")));
        assert_eq!(cyclic_normal_form(&w("ab")), cyclic_normal_form(&w("ba")));
        assert_eq!(cyclic_normal_form(&w("bA")).to_string(), "Ab");
        assert_eq!(cyclic_normal_form(&Word::identity()), CyclicWord::default());
    }

    #[test]
    fn conjugacy_decisions() {
        assert!(are_conjugate(&w("ab"), &w("ba")));
        assert!(!is_conjugate_to_inverse(&w("a"), &w("a")));
        assert!(is_conjugate_to_inverse(&w("abAB"), &w("baBA")));
    }

    #[test]
    fn proper_powers() {
        assert_eq!(w("abab").proper_power().unwrap(), (true, w("ab"), 2));
        assert_eq!(w("ab").proper_power().unwrap(), (false, w("ab"), 1));
        assert_eq!(w("baaB").proper_power().unwrap(), (true, w("baB"), 2));
        assert!(Word::identity().proper_power().is_err());
    }

    #[test]
    fn power_membership() {
        assert!(w("ababab").is_power_of(&w("ab")));
        assert!(w("BABA").is_power_of(&w("ab")));
        assert!(!w("aba").is_power_of(&w("ab")));
        assert!(Word::identity().is_power_of(&w("ab")));
    }

    #[test]
    fn surface_rank() {
        assert_eq!(SurfaceSpec::pair_of_pants().rank(), 2);
        assert_eq!(SurfaceSpec::one_holed_torus().rank(), 2);
        assert_eq!(SurfaceSpec::new(1, 2, 0).unwrap().rank(), 3);
        assert!(SurfaceSpec::new(2, 0, 0).is_err());
        assert!(SurfaceSpec::new(0, 2, 0).is_err());
    }

    #[test]
    fn word_counts() {
        assert_eq!(count_reduced_words(2, 0), 1);
        assert_eq!(count_reduced_words(2, 2), 1 + 4 + 12);
        assert_eq!(reduced_words_of_length(2, 6).len(), 4 * 3usize.pow(5));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn raw_word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
            let r = rank as i32;
            prop::collection::vec((1..=r, any::<bool>()), 0..=max_len).prop_map(|v| {
                Word::from_letters(v.into_iter().map(|(i, inv)| Letter::new(if inv { -i } else { i }).unwrap()))
            })
        }

        fn oracle(u: &Word) -> Word {
            let c = u.cyclic_reduction();
            (0..c.len().max(1)).map(|k| c.rotation(k)).min().unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn normal_form_is_conjugation_invariant(u in raw_word(3, 12), g in raw_word(3, 8)) {
                prop_assert_eq!(cyclic_normal_form(&u), cyclic_normal_form(&u.conjugate(&g)));
            }

            #[test]
            fn booth_matches_rotation_oracle(u in raw_word(3, 16)) {
                prop_assert_eq!(cyclic_normal_form(&u).into_word(), oracle(&u));
            }

            #[test]
            fn inverse_and_reduction(u in raw_word(2, 14), v in raw_word(2, 14)) {
                prop_assert_eq!(u.compose(&u.invert()), Word::identity());
                prop_assert_eq!(u.compose(&v).invert(), v.invert().compose(&u.invert()));
                prop_assert!(u.cyclic_reduction().is_cyclically_reduced());
                prop_assert_eq!(is_conjugate_to_inverse(&u, &v), are_conjugate(&u, &v.invert()));
            }

            #[test]
            fn conjugacy_is_symmetric_and_transitive(u in raw_word(2, 8), g in raw_word(2, 5), h in raw_word(2, 5)) {
                let v = u.conjugate(&g);
                let x = v.conjugate(&h);
                prop_assert!(are_conjugate(&u, &v) && are_conjugate(&v, &u));
                prop_assert!(are_conjugate(&u, &x));
            }

            #[test]
            fn powers_have_roots(u in raw_word(2, 6), k in 1u32..5) {
                let c = u.cyclic_reduction();
                prop_assume!(!c.is_empty());
                let (_, root, m) = c.power(k as i64).proper_power().unwrap();
                let (_, root1, m1) = c.proper_power().unwrap();
                prop_assert_eq!(m, k * m1);
                prop_assert!(are_conjugate(&root, &root1));
            }

            #[test]
            fn text_round_trip(u in raw_word(4, 20)) {
                prop_assert_eq!(u.to_string().parse::<Word>().unwrap(), u);
            }
        }
    }
}
