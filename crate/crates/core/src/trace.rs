//! Fricke trace polynomials for two-generator words.
//!
//! `tr w(A, B)` is an integer polynomial in `x = tr A`, `y = tr B` and
//! `z = tr AB`. Reduction uses `tr(U v⁻¹) = tr U · tr v − tr(U v)` to clear
//! inverse letters, then `tr(a·aR) = x · tr(aR) − tr R` on repeated letters,
//! and finally the Chebyshev recursion for powers of `a`, `b` or `ab`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::word::{cyclic_normal_form, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("trace polynomials cover two generators; word uses generator {0}")]
    UnsupportedRank(usize),
}

/// Exponent triple `(i, j, k)` of `xⁱ yʲ zᵏ`.
pub type Monomial = (u32, u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TracePolynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl TracePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial((0, 0, 0), BigInt::from(c))
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn x() -> Self {
        Self::monomial((1, 0, 0), BigInt::one())
    }

    pub fn y() -> Self {
        Self::monomial((0, 1, 0), BigInt::one())
    }

    pub fn z() -> Self {
        Self::monomial((0, 0, 1), BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: Monomial) -> BigInt {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j, k)| i + j + k).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        let e = self.terms.entry(m).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Substitute `y := x`, the specialisation to pairs with equal traces.
    pub fn identify_y_with_x(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j, k), c) in &self.terms {
            out.add_term((i + j, 0, k), c.clone());
        }
        out
    }

    /// Substitute a polynomial for `x` in a polynomial of `x` alone.
    fn compose_univariate(&self, p: &Self) -> Self {
        let mut out = Self::zero();
        let mut power = Self::constant(1);
        let top = self.terms.keys().map(|m| m.0).max().unwrap_or(0);
        for i in 0..=top {
            let c = self.coefficient((i, 0, 0));
            if !c.is_zero() {
                out = out + power.scale(&c);
            }
            power = &power * p;
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero();
        for (&m, v) in &self.terms {
            out.add_term(m, v * c);
        }
        out
    }

    pub fn evaluate<T: Scalar>(&self, x: T, y: T, z: T) -> T {
        let mut acc = T::zero();
        for (&(i, j, k), c) in &self.terms {
            let c = T::lit(c.to_f64().expect("finite coefficient"));
            acc = acc + c * x.powi(i as i32) * y.powi(j as i32) * z.powi(k as i32);
        }
        acc
    }

    pub fn evaluate_exact(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for (&(i, j, k), c) in &self.terms {
            acc += c * x.pow(i) * y.pow(j) * z.pow(k);
        }
        acc
    }
}

impl Add for TracePolynomial {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for TracePolynomial {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for TracePolynomial {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for &TracePolynomial {
    type Output = TracePolynomial;
    fn mul(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = TracePolynomial::zero();
        for (&(i, j, k), c) in &self.terms {
            for (&(p, q, r), d) in &rhs.terms {
                out.add_term((i + p, j + q, k + r), c * d);
            }
        }
        out
    }
}

impl Mul for TracePolynomial {
    type Output = TracePolynomial;
    fn mul(self, rhs: TracePolynomial) -> TracePolynomial {
        &self * &rhs
    }
}

/// Graded lexicographic order, highest degree first.
impl fmt::Display for TracePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Monomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| (b.0 + b.1 + b.2, b).cmp(&(a.0 + a.1 + a.2, a)));
        for (n, m) in keys.into_iter().enumerate() {
            let c = &self.terms[m];
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mut body = String::new();
            for (v, e) in [('x', m.0), ('y', m.1), ('z', m.2)] {
                match e {
                    0 => {}
                    1 => body.push(v),
                    _ => body.push_str(&format!("{v}^{e}")),
                }
            }
            if body.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{mag}{body}")?;
            }
        }
        Ok(())
    }
}

/// `p₀ = 2`, `p₁ = x`, `pₙ₊₁ = x·pₙ − pₙ₋₁`: the trace of `aⁿ`.
pub fn chebyshev_power(n: u32) -> TracePolynomial {
    let mut prev = TracePolynomial::constant(2);
    if n == 0 {
        return prev;
    }
    let mut cur = TracePolynomial::x();
    for _ in 1..n {
        let next = &TracePolynomial::x() * &cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Memoising reducer; keys are cyclic normal forms of the word or its
/// inverse, whichever is smaller.
#[derive(Debug, Default)]
pub struct TraceReducer {
    memo: HashMap<Word, TracePolynomial>,
}

impl TraceReducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn trace(&mut self, w: &Word) -> Result<TracePolynomial, TraceError> {
        if w.max_generator() > 2 {
            return Err(TraceError::UnsupportedRank(w.max_generator()));
        }
        Ok(self.reduce(w))
    }

    fn key(w: &Word) -> Word {
        let c = cyclic_normal_form(w).into_word();
        let ci = cyclic_normal_form(&c.invert()).into_word();
        let inv = |u: &Word| u.letters().iter().filter(|l| l.is_inverse()).count();
        // fewer inverse letters first so positive words stay positive
        if (inv(&ci), &ci) < (inv(&c), &c) {
            ci
        } else {
            c
        }
    }

    fn reduce(&mut self, w: &Word) -> TracePolynomial {
        if w.is_empty() {
            return TracePolynomial::constant(2);
        }
        let k = Self::key(w);
        if let Some(p) = self.memo.get(&k) {
            return p.clone();
        }
        let p = self.reduce_key(&k);
        self.memo.insert(k, p.clone());
        p
    }

    fn reduce_key(&mut self, k: &Word) -> TracePolynomial {
        let letters = k.letters();
        let n = letters.len();
        if let Some(pos) = letters.iter().position(|l| l.is_inverse()) {
            // rotate so the inverse letter is last: k ~ U v⁻¹
            let rot = k.rotation((pos + 1) % n);
            let (u, last) = rot.letters().split_at(n - 1);
            let v = last[0].inverse();
            let u = Word::from_letters(u.to_vec());
            let uv = Word::from_letters(u.letters().iter().copied().chain([v]));
            let tv = self.reduce(&Word::from_letters(vec![v]));
            return &self.reduce(&u) * &tv - self.reduce(&uv);
        }
        let a = Letter::gen(1);
        if letters.iter().all(|&l| l == letters[0]) {
            let p = chebyshev_power(n as u32);
            return if letters[0] == a {
                p
            } else {
                p.compose_univariate(&TracePolynomial::y())
            };
        }
        // positive word using both letters; look for a repeated letter
        for i in 0..n {
            if letters[i] == letters[(i + 1) % n] {
                let rot = k.rotation(i);
                let x = rot.letters()[0];
                let rest = Word::from_letters(rot.letters()[1..].to_vec());
                let tail = Word::from_letters(rot.letters()[2..].to_vec());
                let tx = if x == a {
                    TracePolynomial::x()
                } else {
                    TracePolynomial::y()
                };
                return &tx * &self.reduce(&rest) - self.reduce(&tail);
            }
        }
        // alternating positive word (ab)^m
        debug_assert!(letters.iter().zip(letters.iter().skip(1)).all(|(p, q)| p != q));
        chebyshev_power((n / 2) as u32).compose_univariate(&TracePolynomial::z())
    }
}

/// Fricke polynomial of a word in `a`, `b`.
pub fn trace_polynomial(w: &Word) -> Result<TracePolynomial, TraceError> {
    TraceReducer::new().trace(w)
}

/// `tr(aⁿb) = tr(bⁿa)` whenever `tr a = tr b`, which holds for `a = α`,
/// `b = gαg⁻¹`. The comparison is exact after identifying `y` with `x`.
pub fn verify_trace_identity(n: u32) -> bool {
    verify_trace_identity_with(&mut TraceReducer::new(), n)
}

pub fn verify_trace_identity_with(reducer: &mut TraceReducer, n: u32) -> bool {
    let a = Word::generator(1);
    let b = Word::generator(2);
    let left = a.power(n as i64).compose(&b);
    let right = b.power(n as i64).compose(&a);
    let (Ok(l), Ok(r)) = (reducer.trace(&left), reducer.trace(&right)) else {
        return false;
    };
    l.identify_y_with_x() == r.identify_y_with_x()
}
