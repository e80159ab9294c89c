//! `PSL₂(ℤ) = ⟨a, b | a² = b³ = 1⟩` as sign-canonical matrices and as normal
//! form words `a^ε₁ b^δ₁ a b^δ₂ a … a b^δₖ a^ε₂`.
//!
//! Words act left to right, so the matrix of `g₁g₂…gₖ` is `M(gₖ)···M(g₁)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{parse_err, Error, Result};
use crate::farey::ExtRational;
use crate::Sign;

/// A letter of the alphabet `{a, b, B = b⁻¹}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    BInv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'B' => Some(Letter::BInv),
            _ => None,
        }
    }

    pub fn matrix(self) -> Psl2Matrix {
        match self {
            Letter::A => Psl2Matrix::from_i64(0, -1, 1, 0),
            Letter::B => Psl2Matrix::from_i64(0, -1, 1, 1),
            Letter::BInv => Psl2Matrix::from_i64(-1, -1, 1, 0),
        }
    }
}

/// Parses a letter string; `""` and `"e"` denote the empty word.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    let s = s.trim();
    if s == "e" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| {
            Letter::from_char(c)
                .ok_or_else(|| parse_err(format!("unexpected letter {c:?} in word {s:?}")))
        })
        .collect()
}

/// `[[a, b], [c, d]]` with `ad − bc = 1`, stored with the first non-zero
/// entry among `c, d, a` positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Psl2Matrix {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Psl2Matrix {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Error::InvalidMap(format!(
                "[[{a},{b}],[{c},{d}]] does not have determinant 1"
            )));
        }
        Ok(Self::canonical(a, b, c, d))
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into()).expect("determinant 1")
    }

    fn canonical(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        let lead = [&c, &d, &a]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("non-singular");
        if lead.is_negative() {
            Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            Self { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        Self::from_i64(1, 0, 0, 1)
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::canonical(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// The Möbius action `x ↦ (ax + b)/(cx + d)`.
    pub fn apply(&self, x: &ExtRational) -> ExtRational {
        x.mobius(&self.a, &self.b, &self.c, &self.d)
    }
}

pub fn matmul(x: &Psl2Matrix, y: &Psl2Matrix) -> Psl2Matrix {
    x.mul(y)
}

pub fn matinv(x: &Psl2Matrix) -> Psl2Matrix {
    x.inverse()
}

pub fn mateq(x: &Psl2Matrix, y: &Psl2Matrix) -> bool {
    x == y
}

impl fmt::Display for Psl2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for Psl2Matrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("[[")
            .and_then(|r| r.strip_suffix("]]"))
            .ok_or_else(|| parse_err(format!("expected [[a,b],[c,d]], got {s:?}")))?;
        let (row1, row2) = inner
            .split_once("],[")
            .ok_or_else(|| parse_err(format!("expected two rows in {s:?}")))?;
        let mut entries = Vec::with_capacity(4);
        for row in [row1, row2] {
            let (x, y) = row
                .split_once(',')
                .ok_or_else(|| parse_err(format!("bad row {row:?}")))?;
            for v in [x, y] {
                entries.push(
                    v.parse::<BigInt>()
                        .map_err(|_| parse_err(format!("bad entry {v:?}")))?,
                );
            }
        }
        let [a, b, c, d]: [BigInt; 4] = entries
            .try_into()
            .map_err(|_| parse_err("expected four entries"))?;
        Self::new(a, b, c, d).map_err(|e| parse_err(e.to_string()))
    }
}

/// Normal form `a^ε₁ b^δ₁ a b^δ₂ a … a b^δₖ a^ε₂`; for `k = 0` only `1` and `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalWord {
    eps1: bool,
    deltas: Vec<Sign>,
    eps2: bool,
}

impl NormalWord {
    pub fn new(eps1: bool, deltas: Vec<Sign>, eps2: bool) -> Result<Self> {
        if deltas.is_empty() && eps2 {
            return Err(parse_err("a word with k = 0 has eps2 = 0"));
        }
        Ok(Self { eps1, deltas, eps2 })
    }

    pub fn identity() -> Self {
        Self {
            eps1: false,
            deltas: Vec::new(),
            eps2: false,
        }
    }

    pub fn eps1(&self) -> bool {
        self.eps1
    }

    pub fn eps2(&self) -> bool {
        self.eps2
    }

    pub fn deltas(&self) -> &[Sign] {
        &self.deltas
    }

    /// Number of `b`-syllables.
    pub fn k(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_identity(&self) -> bool {
        !self.eps1 && self.deltas.is_empty()
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::with_capacity(2 * self.k() + 1);
        if self.eps1 {
            out.push(Letter::A);
        }
        for (i, d) in self.deltas.iter().enumerate() {
            if i > 0 {
                out.push(Letter::A);
            }
            out.push(if *d == Sign::Plus {
                Letter::B
            } else {
                Letter::BInv
            });
        }
        if self.eps2 {
            out.push(Letter::A);
        }
        out
    }

    pub fn inverse(&self) -> Self {
        let letters: Vec<Letter> = self
            .letters()
            .into_iter()
            .rev()
            .map(Letter::inverse)
            .collect();
        reduce_word(&letters)
    }

    /// The product `self · other` (apply `self` first).
    pub fn mul(&self, other: &Self) -> Self {
        let mut letters = self.letters();
        letters.extend(other.letters());
        reduce_word(&letters)
    }

    /// All normal words with exactly `k` syllables, in a fixed order:
    /// `ε₁`, then `δ` (as a binary counter with `+1` first), then `ε₂`.
    pub fn all_with_k(k: usize) -> Vec<NormalWord> {
        if k == 0 {
            return vec![
                Self::identity(),
                Self {
                    eps1: true,
                    deltas: Vec::new(),
                    eps2: false,
                },
            ];
        }
        let mut out = Vec::with_capacity(4 << k);
        for eps1 in [false, true] {
            for bits in 0u64..(1 << k) {
                let deltas: Vec<Sign> = (0..k)
                    .map(|i| Sign::from_indicator(bits >> (k - 1 - i) & 1 == 0))
                    .collect();
                for eps2 in [false, true] {
                    out.push(Self {
                        eps1,
                        deltas: deltas.clone(),
                        eps2,
                    });
                }
            }
        }
        out
    }
}

impl fmt::Display for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("e");
        }
        self.letters()
            .iter()
            .try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

impl FromStr for NormalWord {
    type Err = Error;

    /// Parses any letter string and reduces it.
    fn from_str(s: &str) -> Result<Self> {
        Ok(reduce_word(&parse_letters(s)?))
    }
}

/// Rewrites with `aa → ε`, `bB, Bb → ε`, `bb → B`, `BB → b` to the normal form.
pub fn reduce_word(letters: &[Letter]) -> NormalWord {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &x in letters {
        match (stack.last().copied(), x) {
            (Some(Letter::A), Letter::A)
            | (Some(Letter::B), Letter::BInv)
            | (Some(Letter::BInv), Letter::B) => {
                stack.pop();
            }
            (Some(Letter::B), Letter::B) => *stack.last_mut().unwrap() = Letter::BInv,
            (Some(Letter::BInv), Letter::BInv) => *stack.last_mut().unwrap() = Letter::B,
            _ => stack.push(x),
        }
    }
    let eps1 = stack.first() == Some(&Letter::A);
    let deltas: Vec<Sign> = stack
        .iter()
        .filter_map(|l| match l {
            Letter::A => None,
            Letter::B => Some(Sign::Plus),
            Letter::BInv => Some(Sign::Minus),
        })
        .collect();
    let eps2 = !deltas.is_empty() && stack.last() == Some(&Letter::A);
    NormalWord { eps1, deltas, eps2 }
}

pub fn word_to_matrix(w: &NormalWord) -> Psl2Matrix {
    letters_to_matrix(&w.letters())
}

pub fn letters_to_matrix(letters: &[Letter]) -> Psl2Matrix {
    letters
        .iter()
        .fold(Psl2Matrix::identity(), |m, l| l.matrix().mul(&m))
}

/// Recovers the normal form of a matrix.
///
/// Uses the Euclidean factorisation `M = Tⁿ·S·M'` with `S = a` and
/// `T = [[1,1],[0,1]] = ba`, which strictly shrinks the lower-left entry,
/// until a power of `T` remains.
pub fn matrix_to_word(m: &Psl2Matrix) -> NormalWord {
    // Factors in matrix order; each is a power of T or S.
    let mut factors: Vec<(i8, BigInt)> = Vec::new();
    let mut cur = m.clone();
    while !cur.c.is_zero() {
        let n = cur.a.div_floor(&cur.c);
        let p = &cur.a - &n * &cur.c;
        let q = &cur.b - &n * &cur.d;
        factors.push((1, n));
        factors.push((0, BigInt::one()));
        cur = Psl2Matrix::canonical(cur.c.clone(), cur.d.clone(), -p, -q);
    }
    factors.push((1, cur.b.clone()));
    let mut letters = Vec::new();
    for (kind, n) in factors.iter().rev() {
        if *kind == 0 {
            letters.push(Letter::A);
            continue;
        }
        let piece: &[Letter] = if n.is_positive() {
            &[Letter::B, Letter::A]
        } else {
            &[Letter::A, Letter::BInv]
        };
        let mut count = n.abs();
        while count.is_positive() {
            letters.extend_from_slice(piece);
            count -= 1;
        }
    }
    reduce_word(&letters)
}

/// `|w|_{a,b}`: `2k − 1 + ε₁ + ε₂` for `k ≥ 1`, and `ε₁` for `k = 0`.
pub fn word_length_ab(w: &NormalWord) -> usize {
    if w.k() == 0 {
        return w.eps1 as usize;
    }
    2 * w.k() - 1 + w.eps1 as usize + w.eps2 as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> NormalWord {
        s.parse().unwrap()
    }

    #[test]
    fn torsion() {
        let a = Letter::A.matrix();
        let b = Letter::B.matrix();
        assert!(matmul(&a, &a).is_identity());
        assert!(matmul(&b, &matmul(&b, &b)).is_identity());
        assert_eq!(matinv(&b), matmul(&b, &b));
        assert_eq!(Letter::BInv.matrix(), matinv(&b));
    }

    #[test]
    fn rewriting() {
        assert_eq!(w("aabB"), NormalWord::identity());
        assert_eq!(
            w("bb"),
            NormalWord::new(false, vec![Sign::Minus], false).unwrap()
        );
        assert_eq!(
            w("abba"),
            NormalWord::new(true, vec![Sign::Minus], true).unwrap()
        );
        assert_eq!(w("abba").to_string(), "aBa");
        assert_eq!(w("bbbbb").to_string(), "B");
        assert_eq!(w("e").to_string(), "e");
        assert!("abx".parse::<NormalWord>().is_err());
    }

    #[test]
    fn matrices_of_words() {
        assert_eq!(word_to_matrix(&w("a")), Psl2Matrix::from_i64(0, -1, 1, 0));
        assert_eq!(word_to_matrix(&w("ab")), Psl2Matrix::from_i64(1, 0, -1, 1));
        assert_eq!(word_to_matrix(&w("ba")), Psl2Matrix::from_i64(1, 1, 0, 1));
        assert!(word_to_matrix(&w("aa")).is_identity());
        assert!(word_to_matrix(&w("bbb")).is_identity());
    }

    #[test]
    fn matrix_words() {
        assert_eq!(
            matrix_to_word(&Psl2Matrix::identity()),
            NormalWord::identity()
        );
        assert_eq!(
            matrix_to_word(&Psl2Matrix::from_i64(1, 1, 0, 1)).to_string(),
            "ba"
        );
        assert_eq!(
            matrix_to_word(&Psl2Matrix::from_i64(0, -1, 1, 0)).to_string(),
            "a"
        );
        assert_eq!(
            matrix_to_word(&Psl2Matrix::from_i64(1, -7, 0, 1)).to_string(),
            "aBaBaBaBaBaBaB"
        );
    }

    #[test]
    fn roundtrip_small_words() {
        let mut seen = std::collections::HashSet::new();
        for k in 0..=8 {
            for word in NormalWord::all_with_k(k) {
                let m = word_to_matrix(&word);
                assert_eq!(matrix_to_word(&m), word);
                if k <= 6 {
                    assert!(seen.insert(m), "{word} collides");
                }
            }
        }
    }

    #[test]
    fn lengths() {
        assert_eq!(word_length_ab(&w("bab")), 3);
        assert_eq!(word_length_ab(&w("abab")), 4);
        assert_eq!(word_length_ab(&w("")), 0);
        assert_eq!(word_length_ab(&w("a")), 1);
        for k in 0..=5 {
            for word in NormalWord::all_with_k(k) {
                assert_eq!(word_length_ab(&word), word.letters().len());
            }
        }
    }

    #[test]
    fn matrix_text() {
        let m: Psl2Matrix = "[[0, 1], [-1, 0]]".parse().unwrap();
        assert_eq!(m.to_string(), "[[0,-1],[1,0]]");
        assert!("[[1,1],[1,1]]".parse::<Psl2Matrix>().is_err());
        assert!("[1,0,0,1]".parse::<Psl2Matrix>().is_err());
    }

    #[test]
    fn mobius_action() {
        let x: ExtRational = "1/1".parse().unwrap();
        assert_eq!(Letter::A.matrix().apply(&x).to_string(), "-1/1");
        assert_eq!(
            Letter::B.matrix().apply(&ExtRational::zero()).to_string(),
            "-1/1"
        );
        assert_eq!(
            Letter::A.matrix().apply(&ExtRational::zero()),
            ExtRational::infinity()
        );
    }
}
