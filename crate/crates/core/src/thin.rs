//! Thin trees, their weights, and membership of tree pair diagrams in the
//! modular subgroup.
//!
//! A thin tree with `k + 2` leaves is encoded by weights `w₀, …, w_{k−1}`:
//! walking down from the root, `wᵢ = +1` when the next internal vertex is a
//! left child and `−1` when it is a right child.
//!
//! For a normal word with `k ≥ 2` syllables the reduced diagram is
//! `(thin(r), rot, thin(s))` with
//!
//! ```text
//! r = (ε⁻¹(ε₁), δ₁, …, δ_{k−1})
//! s = (ε⁻¹(ε₂), −δ_k, …, −δ₂)
//! rot ≡ (3 − s₁)/2 − ε(s₀) − l   (mod k + 2),  l = 1 + #{i : rᵢ = −1}
//! ```
//!
//! and a diagram with at least four leaves lies in the subgroup exactly when
//! both trees are thin and
//!
//! ```text
//! Σ_{i=2}^{k−1} rᵢ s_{k+1−i} = 2 − k                       (E1)
//! l + rot + ε(s₀) ≡ (3 − s₁)/2   (mod k + 2)                (E2)
//! ```

use crate::error::{Error, Result};
use crate::psl2z::NormalWord;
use crate::tree_pairs::{BinaryTree, TreePairDiagram};
use crate::Sign;

pub fn is_thin(t: &BinaryTree) -> bool {
    weights_from_thin(t).is_ok()
}

pub fn weights_from_thin(t: &BinaryTree) -> Result<Vec<Sign>> {
    let not_thin = || Error::NotThin(t.to_string());
    let mut weights = Vec::new();
    let mut cur = t;
    loop {
        let BinaryTree::Caret(l, r) = cur else {
            return Err(not_thin());
        };
        match (l.is_leaf(), r.is_leaf()) {
            (true, true) => return Ok(weights),
            (false, true) => {
                weights.push(Sign::Plus);
                cur = l;
            }
            (true, false) => {
                weights.push(Sign::Minus);
                cur = r;
            }
            (false, false) => return Err(not_thin()),
        }
    }
}

pub fn thin_from_weights(w: &[Sign]) -> BinaryTree {
    w.iter().rev().fold(
        BinaryTree::caret(BinaryTree::Leaf, BinaryTree::Leaf),
        |t, s| match s {
            Sign::Plus => BinaryTree::caret(t, BinaryTree::Leaf),
            Sign::Minus => BinaryTree::caret(BinaryTree::Leaf, t),
        },
    )
}

/// Position `l` of the left leaf of the exposed caret.
pub fn exposed_left_leaf(w: &[Sign]) -> usize {
    1 + w.iter().filter(|&&s| s == Sign::Minus).count()
}

/// (E1).
pub fn check_eq1(r: &[Sign], s: &[Sign]) -> Result<bool> {
    if r.len() != s.len() {
        return Err(Error::LengthMismatch(r.len(), s.len()));
    }
    let k = r.len() as i64;
    let sum: i64 = (2..r.len())
        .map(|i| r[i].value() * s[r.len() + 1 - i].value())
        .sum();
    Ok(sum == 2 - k)
}

/// (E2), with `rot ∈ [1, k + 2]`.
pub fn check_eq2(r: &[Sign], s: &[Sign], rot: usize) -> bool {
    check_eq2_signed(r, s, rot, 1)
}

/// (E2) with `ε(s₀)` entering with the given sign; `eps_sign = 1` is the
/// real equation, `−1` is a deliberately broken variant for mutation tests.
#[doc(hidden)]
pub fn check_eq2_signed(r: &[Sign], s: &[Sign], rot: usize, eps_sign: i64) -> bool {
    let modulus = r.len() as i64 + 2;
    let lhs = exposed_left_leaf(r) as i64 + rot as i64 + eps_sign * s[0].indicator() as i64;
    let rhs = (3 - s[1].value()) / 2;
    (lhs - rhs).rem_euclid(modulus) == 0
}

/// The reduced diagrams with fewer than four leaves, labelled by word.
pub fn small_table() -> Vec<(NormalWord, TreePairDiagram)> {
    [
        ("e", "0:1:0"),
        ("a", "100:2:100"),
        ("b", "10100:3:10100"),
        ("B", "10100:2:10100"),
        ("ab", "11000:1:10100"),
        ("aB", "11000:3:10100"),
        ("ba", "10100:2:11000"),
        ("Ba", "10100:1:11000"),
        ("aba", "11000:3:11000"),
        ("aBa", "11000:2:11000"),
    ]
    .iter()
    .map(|(w, d)| {
        (
            w.parse().expect("table word"),
            d.parse().expect("table diagram"),
        )
    })
    .collect()
}

fn eps_inv(bit: bool) -> Sign {
    Sign::from_indicator(bit)
}

pub fn word_to_diagram(w: &NormalWord) -> TreePairDiagram {
    let k = w.k();
    if k < 2 {
        return small_table()
            .into_iter()
            .find(|(word, _)| word == w)
            .map(|(_, d)| d)
            .expect("every word with k < 2 is tabulated");
    }
    let deltas = w.deltas();
    let mut r = Vec::with_capacity(k);
    r.push(eps_inv(w.eps1()));
    r.extend_from_slice(&deltas[..k - 1]);
    let mut s = Vec::with_capacity(k);
    s.push(eps_inv(w.eps2()));
    s.extend((1..k).map(|i| -deltas[k - i]));
    let modulus = k as i64 + 2;
    let raw = (3 - s[1].value()) / 2 - s[0].indicator() as i64 - exposed_left_leaf(&r) as i64;
    let rot = (raw - 1).rem_euclid(modulus) + 1;
    TreePairDiagram::new(thin_from_weights(&r), rot as usize, thin_from_weights(&s))
        .expect("thin trees of equal size")
}

/// Membership for a reduced diagram.
pub fn is_member(d: &TreePairDiagram) -> Result<bool> {
    if !d.is_reduced() {
        return Err(Error::NotReduced(d.to_string()));
    }
    Ok(is_member_unchecked(d))
}

fn is_member_unchecked(d: &TreePairDiagram) -> bool {
    if d.leaves() < 4 {
        return true;
    }
    let (Ok(r), Ok(s)) = (weights_from_thin(d.source()), weights_from_thin(d.target())) else {
        return false;
    };
    check_eq1(&r, &s).unwrap_or(false) && check_eq2(&r, &s, d.rot())
}

/// Reads the normal word off a member diagram; `None` for non-members and
/// for non-reduced input.
pub fn diagram_to_word(d: &TreePairDiagram) -> Option<NormalWord> {
    if !d.is_reduced() || !is_member_unchecked(d) {
        return None;
    }
    if d.leaves() < 4 {
        return small_table()
            .into_iter()
            .find(|(_, x)| x == d)
            .map(|(w, _)| w);
    }
    let r = weights_from_thin(d.source()).ok()?;
    let s = weights_from_thin(d.target()).ok()?;
    let mut deltas = r[1..].to_vec();
    deltas.push(-s[1]);
    NormalWord::new(r[0] == Sign::Plus, deltas, s[0] == Sign::Plus).ok()
}

/// All sign vectors of length `k`, `+1` first.
pub fn all_weights(k: usize) -> Vec<Vec<Sign>> {
    (0u64..1 << k)
        .map(|bits| {
            (0..k)
                .map(|i| Sign::from_indicator(bits >> (k - 1 - i) & 1 == 0))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Minus as M, Plus as P};

    fn t(s: &str) -> BinaryTree {
        s.parse().unwrap()
    }

    fn d(s: &str) -> TreePairDiagram {
        s.parse().unwrap()
    }

    fn w(s: &str) -> NormalWord {
        s.parse().unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(weights_from_thin(&t("100")).unwrap(), vec![]);
        assert_eq!(weights_from_thin(&t("1110000")).unwrap(), vec![P, P]);
        assert_eq!(weights_from_thin(&t("1011000")).unwrap(), vec![M, P]);
        assert!(matches!(
            weights_from_thin(&t("1100100")),
            Err(Error::NotThin(_))
        ));
        assert!(!is_thin(&t("0")));
        for k in 0..=6 {
            for ws in all_weights(k) {
                let tree = thin_from_weights(&ws);
                assert_eq!(tree.leaf_count(), k + 2);
                assert_eq!(weights_from_thin(&tree).unwrap(), ws);
            }
        }
    }

    #[test]
    fn exposed_leaf() {
        assert_eq!(exposed_left_leaf(&[]), 1);
        assert_eq!(exposed_left_leaf(&[P, P]), 1);
        assert_eq!(exposed_left_leaf(&[M, P]), 2);
    }

    #[test]
    fn equations() {
        assert!(check_eq1(&[P, M], &[M, M]).unwrap());
        assert!(check_eq1(&[M, P, P], &[M, M, M]).unwrap());
        assert!(!check_eq1(&[M, P, P], &[M, M, P]).unwrap());
        assert!(matches!(
            check_eq1(&[M], &[M, P]),
            Err(Error::LengthMismatch(1, 2))
        ));
        assert!(check_eq2(&[M, P], &[M, M], 4));
        assert!(!check_eq2(&[M, P], &[M, M], 1));
        assert!(check_eq2(&[P, P], &[M, M], 1));
    }

    #[test]
    fn words_to_diagrams() {
        assert_eq!(word_to_diagram(&w("bab")), d("1011000:4:1010100"));
        assert_eq!(word_to_diagram(&w("abab")), d("1110000:1:1010100"));
        assert_eq!(word_to_diagram(&w("a")), d("100:2:100"));
        let babab = word_to_diagram(&w("babab"));
        assert_eq!(weights_from_thin(babab.source()).unwrap(), vec![M, P, P]);
        assert_eq!(weights_from_thin(babab.target()).unwrap(), vec![M, M, M]);
        assert!(is_member(&babab).unwrap());
    }

    #[test]
    fn diagrams_to_words() {
        assert_eq!(diagram_to_word(&d("1011000:4:1010100")), Some(w("bab")));
        assert_eq!(diagram_to_word(&d("1011000:1:1010100")), None);
        assert_eq!(diagram_to_word(&d("0:1:0")), Some(NormalWord::identity()));
        assert!(!is_member(&d("1010100:1:1011000")).unwrap());
        assert!(matches!(
            is_member(&d("100:1:100")),
            Err(Error::NotReduced(_))
        ));
    }

    #[test]
    fn small_table_is_complete() {
        let table = small_table();
        assert_eq!(table.len(), 10);
        let mut reduced: Vec<TreePairDiagram> = (1..=3)
            .flat_map(TreePairDiagram::all_with_leaves)
            .filter(|x| x.is_reduced())
            .collect();
        let mut listed: Vec<TreePairDiagram> = table.iter().map(|(_, x)| x.clone()).collect();
        reduced.sort();
        listed.sort();
        assert_eq!(reduced, listed);
    }

    #[test]
    fn roundtrip() {
        for k in 0..=6 {
            for word in NormalWord::all_with_k(k) {
                let x = word_to_diagram(&word);
                assert!(x.is_reduced());
                assert_eq!(diagram_to_word(&x), Some(word));
            }
        }
    }
}
