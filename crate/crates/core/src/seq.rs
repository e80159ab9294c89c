//! Slope sequences `S(f)` and the extremal/thin/good conditions on them.
//!
//! Indices follow the interval count: a sequence of length `k` comes from a
//! diagram with `k` leaves. Elements whose reduced diagram has a single
//! leaf are padded to the one-caret partition `{0, 1/2, 1}`.
//!
//! An entry `i` records `Δᵢ(x)`, the width of the `i`-th source leaf, and
//! `Δᵢ(y)`, the width of its image. The mark sits on the entry whose image
//! starts at `0`.

use std::fmt;
use std::str::FromStr;

use crate::circle_maps::{diagram_from_plmap, path_interval, PlMap};
use crate::error::{parse_err, Error, Result};
use crate::farey::Dyadic;
use crate::thin::{small_table, thin_from_weights, weights_from_thin};
use crate::tree_pairs::{BinaryTree, TreePairDiagram};
use crate::Sign;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeqS {
    dx: Vec<Dyadic>,
    dy: Vec<Dyadic>,
    mark: usize,
}

impl SeqS {
    pub fn new(dx: Vec<Dyadic>, dy: Vec<Dyadic>, mark: usize) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidMap(m));
        if dx.len() != dy.len() {
            return Err(Error::LengthMismatch(dx.len(), dy.len()));
        }
        if mark < 1 || mark > dx.len() {
            return invalid(format!("mark {mark} outside [1, {}]", dx.len()));
        }
        let total = |v: &[Dyadic]| v.iter().fold(Dyadic::zero(), |acc, d| &acc + d);
        if total(&dx) != Dyadic::one() || total(&dy) != Dyadic::one() {
            return invalid("interval lengths must sum to 1".into());
        }
        for (x, y) in dx.iter().zip(&dy) {
            if x.is_negative() || x.is_zero() || y.is_negative() || y.is_zero() {
                return invalid("interval lengths must be positive".into());
            }
            if y.ratio_log2(x).is_none() {
                return invalid(format!("{y}/{x} is not a power of two"));
            }
        }
        Ok(Self { dx, dy, mark })
    }

    /// Number of intervals.
    pub fn interval_count(&self) -> usize {
        self.dx.len()
    }

    pub fn dx(&self) -> &[Dyadic] {
        &self.dx
    }

    pub fn dy(&self) -> &[Dyadic] {
        &self.dy
    }

    pub fn mark(&self) -> usize {
        self.mark
    }

    /// `Δ_y°`: the `Δ(y)` sequence read from the marked entry.
    pub fn dy_marked(&self) -> Vec<Dyadic> {
        let p = self.mark - 1;
        self.dy[p..].iter().chain(&self.dy[..p]).cloned().collect()
    }

    /// The slopes `Δᵢ(y)/Δᵢ(x)` as reduced fractions, e.g. `"1/2,o2/1,1/1"`.
    pub fn slopes(&self) -> String {
        let entries: Vec<String> = self
            .dx
            .iter()
            .zip(&self.dy)
            .enumerate()
            .map(|(i, (x, y))| {
                let t = y.ratio_log2(x).expect("validated slope");
                let (p, q) = if t >= 0 {
                    (1u128 << t, 1)
                } else {
                    (1, 1u128 << -t)
                };
                let mark = if i + 1 == self.mark { "o" } else { "" };
                format!("{mark}{p}/{q}")
            })
            .collect();
        entries.join(",")
    }
}

fn exp_of(d: &Dyadic) -> Option<u64> {
    match d.log2_exact() {
        Some(t) if t <= 0 => Some(t.unsigned_abs()),
        _ => None,
    }
}

fn pow_text(d: &Dyadic) -> String {
    match exp_of(d) {
        Some(e) => format!("2^-{e}"),
        None => d.to_string(),
    }
}

impl fmt::Display for SeqS {
    /// Entries `Δᵢ(y)/Δᵢ(x)` written as `2^-a/2^-b`, the marked one prefixed
    /// with `o`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, y)) in self.dx.iter().zip(&self.dy).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if i + 1 == self.mark {
                f.write_str("o")?;
            }
            write!(f, "{}/{}", pow_text(y), pow_text(x))?;
        }
        Ok(())
    }
}

impl FromStr for SeqS {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_pow = |t: &str| -> Result<Dyadic> {
            let t = t.trim();
            let e = t
                .strip_prefix("2^-")
                .or_else(|| (t == "1").then_some("0"))
                .ok_or_else(|| parse_err(format!("expected 2^-n, got {t:?}")))?;
            e.parse::<u64>()
                .map(Dyadic::pow2_neg)
                .map_err(|_| parse_err(format!("bad exponent in {t:?}")))
        };
        let mut dx = Vec::new();
        let mut dy = Vec::new();
        let mut mark = None;
        for (i, item) in s.split(',').enumerate() {
            let mut item = item.trim();
            if let Some(rest) = item.strip_prefix('o') {
                if mark.replace(i + 1).is_some() {
                    return Err(parse_err("more than one marked entry"));
                }
                item = rest;
            }
            let (y, x) = item
                .split_once('/')
                .ok_or_else(|| parse_err(format!("expected 2^-a/2^-b, got {item:?}")))?;
            dy.push(parse_pow(y)?);
            dx.push(parse_pow(x)?);
        }
        let mark = mark.ok_or_else(|| parse_err("no marked entry"))?;
        SeqS::new(dx, dy, mark).map_err(|e| parse_err(e.to_string()))
    }
}

pub fn seq_from_diagram(d: &TreePairDiagram) -> SeqS {
    let d = if d.leaves() == 1 {
        "100:1:100".parse().expect("padding diagram")
    } else {
        d.clone()
    };
    let n = d.leaves();
    let width = |p: &Vec<bool>| Dyadic::pow2_neg(path_interval(p).1);
    let pairs = d.pairs();
    let dx = pairs.iter().map(|(s, _)| width(s)).collect();
    let dy = pairs.iter().map(|(_, t)| width(t)).collect();
    let mark = (1..=n)
        .find(|&i| d.sigma(i) == 1)
        .expect("σ is a bijection");
    SeqS { dx, dy, mark }
}

/// `S(f)`, read off the leaves of the reduced diagram of `f`.
pub fn seq_from_plmap(f: &PlMap) -> SeqS {
    seq_from_diagram(&diagram_from_plmap(f).expect("canonical PL maps have diagrams"))
}

pub fn plmap_from_seq(s: &SeqS) -> PlMap {
    let k = s.interval_count();
    let mut points = Vec::with_capacity(k + 1);
    let mut x = Dyadic::zero();
    let mut y = Dyadic::zero();
    for i in 0..k {
        points.push((x.clone(), y.clone()));
        x = &x + &s.dx[i];
        y = &y + &s.dy[i];
    }
    let offset: Dyadic = s.dy[..s.mark - 1]
        .iter()
        .fold(Dyadic::zero(), |acc, d| &acc + d);
    let y0 = (&Dyadic::one() - &offset).fract();
    let lifted: Vec<(Dyadic, Dyadic)> = points
        .into_iter()
        .map(|(x, y)| (x, &y + &y0))
        .chain(std::iter::once((Dyadic::one(), &y0 + &Dyadic::one())))
        .collect();
    PlMap::new(lifted).expect("valid sequences give PL maps")
}

/// `p[i] = σ(i + 1)`.
pub fn is_k_extremal(p: &[usize]) -> bool {
    let k = p.len();
    if k < 2 {
        return false;
    }
    let mut seen = vec![false; k + 1];
    for &v in p {
        if v < 1 || v > k || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    let (mut lo, mut hi) = (1, k);
    for &v in &p[..k - 2] {
        if v == lo {
            lo += 1;
        } else if v == hi {
            hi -= 1;
        } else {
            return false;
        }
    }
    p[k - 2] == lo && p[k - 1] == hi
}

/// The exponent form of [`is_k_thin`]: `exps[j] = e` for `Δⱼ = 2^{-e}`.
pub fn thin_witness_exps(exps: &[u64]) -> Option<Vec<usize>> {
    let k = exps.len();
    if k < 2 {
        return None;
    }
    let mut sigma = vec![0usize; k];
    let mut smallest = Vec::with_capacity(2);
    for (j, &e) in exps.iter().enumerate() {
        let e = e as usize;
        if e == k - 1 {
            smallest.push(j + 1);
        } else if (1..k - 1).contains(&e) && sigma[e - 1] == 0 {
            sigma[e - 1] = j + 1;
        } else {
            return None;
        }
    }
    if smallest.len() != 2 {
        return None;
    }
    sigma[k - 2] = smallest[0];
    sigma[k - 1] = smallest[1];
    is_k_extremal(&sigma).then_some(sigma)
}

/// The witnessing extremal permutation of a thin sequence, if any.
pub fn is_k_thin(deltas: &[Dyadic]) -> Option<Vec<usize>> {
    let exps: Option<Vec<u64>> = deltas.iter().map(exp_of).collect();
    thin_witness_exps(&exps?)
}

pub fn thin_tree_from_sequence(deltas: &[Dyadic]) -> Result<BinaryTree> {
    let sigma = is_k_thin(deltas).ok_or_else(|| {
        Error::NotThinSequence(
            deltas
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(","),
        )
    })?;
    let k = deltas.len();
    let pivot = sigma[k - 2];
    let weights: Vec<Sign> = sigma[..k - 2]
        .iter()
        .map(|&pos| Sign::from_indicator(pos > pivot))
        .collect();
    Ok(thin_from_weights(&weights))
}

/// The leaf widths of a thin tree.
pub fn sequence_from_thin_tree(t: &BinaryTree) -> Result<Vec<Dyadic>> {
    weights_from_thin(t)?;
    Ok(t.leaf_paths()
        .iter()
        .map(|p| Dyadic::pow2_neg(p.len() as u64))
        .collect())
}

/// (g1) and (g2): both `Δ_x` and `Δ_y°` are thin.
fn thin_both(s: &SeqS) -> bool {
    is_k_thin(&s.dx).is_some() && is_k_thin(&s.dy_marked()).is_some()
}

fn has_pair(s: &SeqS, y: u64, x: u64) -> bool {
    let (y, x) = (Dyadic::pow2_neg(y), Dyadic::pow2_neg(x));
    s.dx.iter().zip(&s.dy).any(|(a, b)| *a == x && *b == y)
}

/// (g3): for `3 ≤ j ≤ k − 2` the entry `2^{−k−1+j} / 2^{−j}` occurs.
fn g3(s: &SeqS) -> bool {
    let k = s.interval_count() as u64;
    (3..k.saturating_sub(1)).all(|j| has_pair(s, k + 1 - j, j))
}

/// (g4): the two shortest source intervals carry `Δ(y) = 2^{−1}` and
/// `2^{−2}`.
fn g4(s: &SeqS) -> bool {
    let k = s.interval_count() as u64;
    has_pair(s, 1, k - 1) && has_pair(s, 2, k - 1)
}

/// The conditions (g1)–(g3) alone.
///
/// For four or more intervals these are necessary but not sufficient: at
/// four intervals they accept 48 reduced diagrams against 16 members. See
/// [`is_k_good`].
pub fn is_k_good_g1_g3(s: &SeqS) -> bool {
    thin_both(s) && g3(s)
}

/// Membership test on slope sequences.
///
/// Up to three intervals the sequence is looked up among those of the ten
/// small diagrams. From four on, (g1)–(g3) are checked together with (g4),
/// which pins the images of the two shortest source intervals as in the
/// four-case analysis of the rotation.
pub fn is_k_good(s: &SeqS) -> bool {
    if s.interval_count() <= 3 {
        return small_table().iter().any(|(_, d)| seq_from_diagram(d) == *s);
    }
    thin_both(s) && g3(s) && g4(s)
}

pub fn is_member_seq(f: &PlMap) -> bool {
    is_k_good(&seq_from_plmap(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_maps::plmap_from_diagram;
    use crate::tree_pairs::generators;

    fn dys(exps: &[u64]) -> Vec<Dyadic> {
        exps.iter().map(|&e| Dyadic::pow2_neg(e)).collect()
    }

    #[test]
    fn extremal() {
        assert!(is_k_extremal(&[5, 1, 2, 3, 4]));
        assert!(is_k_extremal(&[1, 2, 3, 4, 5]));
        assert!(!is_k_extremal(&[2, 1, 3]));
        assert!(!is_k_extremal(&[1, 3, 2]));
        assert!(!is_k_extremal(&[1, 1, 2]));
    }

    #[test]
    fn thin_sequences() {
        assert_eq!(is_k_thin(&dys(&[2, 4, 4, 3, 1])), Some(vec![5, 1, 4, 2, 3]));
        assert_eq!(is_k_thin(&dys(&[1, 1])), Some(vec![1, 2]));
        assert!(is_k_thin(&dys(&[2, 3, 3, 1])).is_some());
        assert!(is_k_thin(&dys(&[1, 3, 2, 3])).is_none());
        assert!(is_k_thin(&dys(&[2, 1, 3, 3])).is_none());
    }

    #[test]
    fn lemma_example() {
        let t = thin_tree_from_sequence(&dys(&[2, 4, 4, 3, 1])).unwrap();
        assert_eq!(
            weights_from_thin(&t).unwrap(),
            vec![Sign::Plus, Sign::Minus, Sign::Plus]
        );
        assert_eq!(sequence_from_thin_tree(&t).unwrap(), dys(&[2, 4, 4, 3, 1]));
        assert_eq!(
            thin_tree_from_sequence(&dys(&[1, 1])).unwrap().to_string(),
            "100"
        );
        assert!(matches!(
            thin_tree_from_sequence(&dys(&[1, 2])),
            Err(Error::NotThinSequence(_))
        ));
    }

    #[test]
    fn sequences_of_generators() {
        let g = generators();
        let a = plmap_from_diagram(&g.a);
        assert_eq!(seq_from_plmap(&a).slopes(), "1/1,o1/1");
        assert_eq!(seq_from_plmap(&PlMap::identity()).slopes(), "o1/1,1/1");
        let b = seq_from_plmap(&plmap_from_diagram(&g.b));
        assert_eq!(b.dx(), dys(&[1, 2, 2]).as_slice());
        assert_eq!(b.slopes(), "1/2,o2/1,1/1");
        assert_eq!(plmap_from_seq(&b), plmap_from_diagram(&g.b));
        assert!(is_member_seq(&a));
        assert!(!is_member_seq(&plmap_from_diagram(&g.big_b)));
    }

    #[test]
    fn seven_good_example() {
        let s: SeqS = "2^-5/2^-3,2^-3/2^-5,2^-2/2^-6,o2^-1/2^-6,2^-4/2^-4,2^-6/2^-2,2^-6/2^-1"
            .parse()
            .unwrap();
        assert_eq!(s.interval_count(), 7);
        assert_eq!(s.mark(), 4);
        assert!(is_k_good(&s));
        assert!(is_k_good_g1_g3(&s));
        assert_eq!(s.to_string().parse::<SeqS>().unwrap(), s);
    }

    #[test]
    fn text_format() {
        assert!("1/1,1/1".parse::<SeqS>().is_err());
        assert!("o2^-1/2^-1,o2^-1/2^-1".parse::<SeqS>().is_err());
        assert!("o2^-1/2^-2,2^-1/2^-2".parse::<SeqS>().is_err());
        let s: SeqS = "2^-1/2^-1,o2^-1/2^-1".parse().unwrap();
        assert_eq!(s.slopes(), "1/1,o1/1");
    }

    #[test]
    fn small_table_slopes() {
        let expected = [
            ("e", "o1/1,1/1"),
            ("a", "1/1,o1/1"),
            ("Ba", "o1/2,1/1,2/1"),
            ("B", "1/2,1/1,o2/1"),
            ("ba", "1/2,2/1,o1/1"),
            ("b", "1/2,o2/1,1/1"),
            ("aba", "2/1,o1/1,1/2"),
            ("ab", "o2/1,1/1,1/2"),
            ("aBa", "1/1,2/1,o1/2"),
            ("aB", "1/1,o2/1,1/2"),
        ];
        let table = small_table();
        for (word, slopes) in expected {
            let w = word.parse().unwrap();
            let (_, d) = table.iter().find(|(x, _)| *x == w).unwrap();
            assert_eq!(seq_from_diagram(d).slopes(), slopes, "{word}");
        }
    }

    #[test]
    fn literal_conditions_are_too_weak() {
        let thin = |n: usize| {
            crate::thin::all_weights(n - 2)
                .into_iter()
                .map(|w| thin_from_weights(&w))
                .collect::<Vec<_>>()
        };
        let trees = thin(4);
        let mut literal = 0;
        let mut members = 0;
        for s in &trees {
            for t in &trees {
                for rot in 1..=4 {
                    let d = TreePairDiagram::new(s.clone(), rot, t.clone()).unwrap();
                    if !d.is_reduced() {
                        continue;
                    }
                    let seq = seq_from_diagram(&d);
                    literal += is_k_good_g1_g3(&seq) as usize;
                    members += is_k_good(&seq) as usize;
                    assert_eq!(is_k_good(&seq), crate::thin::is_member(&d).unwrap(), "{d}");
                }
            }
        }
        assert_eq!((literal, members), (48, 16));
    }
}
