//! Tree pair diagrams for Thompson's group `T`.
//!
//! A diagram `(S, rot, T)` sends leaf `i` of the source tree `S` (the domain
//! partition) to leaf `σ(i) = rot + i − 1 (mod n)` of the target tree `T`.
//! Trees serialize in preorder with `1` for a caret and `0` for a leaf, and
//! diagrams as `"<source>:<rot>:<target>"`.

use std::fmt;
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};
use crate::psl2z::Letter;

/// Root-to-leaf path; `false` is a left turn.
pub type Path = Vec<bool>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryTree {
    Leaf,
    Caret(Box<BinaryTree>, Box<BinaryTree>),
}

impl BinaryTree {
    pub fn caret(left: BinaryTree, right: BinaryTree) -> Self {
        BinaryTree::Caret(Box::new(left), Box::new(right))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, BinaryTree::Leaf)
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            BinaryTree::Leaf => 1,
            BinaryTree::Caret(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn caret_count(&self) -> usize {
        self.leaf_count() - 1
    }

    /// Leaf paths from left to right.
    pub fn leaf_paths(&self) -> Vec<Path> {
        fn go(t: &BinaryTree, prefix: &mut Path, out: &mut Vec<Path>) {
            match t {
                BinaryTree::Leaf => out.push(prefix.clone()),
                BinaryTree::Caret(l, r) => {
                    prefix.push(false);
                    go(l, prefix, out);
                    prefix.pop();
                    prefix.push(true);
                    go(r, prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Rebuilds a tree from its leaf paths given in left-to-right order.
    pub fn from_leaf_paths(paths: &[Path]) -> Result<Self> {
        fn go(paths: &[Path], depth: usize) -> Option<BinaryTree> {
            match paths {
                [] => None,
                [only] if only.len() == depth => Some(BinaryTree::Leaf),
                _ => {
                    if paths.iter().any(|p| p.len() <= depth) {
                        return None;
                    }
                    let split = paths.iter().position(|p| p[depth]).unwrap_or(paths.len());
                    if paths[split..].iter().any(|p| !p[depth]) {
                        return None;
                    }
                    Some(BinaryTree::caret(
                        go(&paths[..split], depth + 1)?,
                        go(&paths[split..], depth + 1)?,
                    ))
                }
            }
        }
        go(paths, 0)
            .ok_or_else(|| Error::NonStandardPartition(format!("{} leaf paths", paths.len())))
    }

    /// Every `n`-leaf tree, in increasing bitstring order.
    pub fn all_with_leaves(n: usize) -> Vec<BinaryTree> {
        fn go(n: usize, memo: &mut Vec<Option<Vec<BinaryTree>>>) -> Vec<BinaryTree> {
            if let Some(v) = &memo[n] {
                return v.clone();
            }
            let mut out = Vec::new();
            if n == 1 {
                out.push(BinaryTree::Leaf);
            } else {
                for left in (1..n).rev() {
                    let ls = go(left, memo);
                    let rs = go(n - left, memo);
                    for l in &ls {
                        for r in &rs {
                            out.push(BinaryTree::caret(l.clone(), r.clone()));
                        }
                    }
                }
            }
            memo[n] = Some(out.clone());
            out
        }
        assert!(n >= 1, "trees have at least one leaf");
        go(n, &mut vec![None; n + 1])
    }

    pub fn bits(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinaryTree::Leaf => f.write_str("0"),
            BinaryTree::Caret(l, r) => write!(f, "1{l}{r}"),
        }
    }
}

impl FromStr for BinaryTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        fn go(bytes: &[u8], pos: &mut usize) -> Option<BinaryTree> {
            let c = *bytes.get(*pos)?;
            *pos += 1;
            match c {
                b'0' => Some(BinaryTree::Leaf),
                b'1' => {
                    let l = go(bytes, pos)?;
                    let r = go(bytes, pos)?;
                    Some(BinaryTree::caret(l, r))
                }
                _ => None,
            }
        }
        let s = s.trim();
        let mut pos = 0;
        match go(s.as_bytes(), &mut pos) {
            Some(t) if pos == s.len() => Ok(t),
            _ => Err(parse_err(format!("{s:?} is not a preorder tree bitstring"))),
        }
    }
}

/// Least common expansion: the union of the two caret sets.
pub fn common_expansion(t1: &BinaryTree, t2: &BinaryTree) -> BinaryTree {
    match (t1, t2) {
        (BinaryTree::Leaf, t) | (t, BinaryTree::Leaf) => t.clone(),
        (BinaryTree::Caret(l1, r1), BinaryTree::Caret(l2, r2)) => {
            BinaryTree::caret(common_expansion(l1, l2), common_expansion(r1, r2))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreePairDiagram {
    source: BinaryTree,
    rot: usize,
    target: BinaryTree,
}

impl TreePairDiagram {
    pub fn new(source: BinaryTree, rot: usize, target: BinaryTree) -> Result<Self> {
        let n = source.leaf_count();
        let m = target.leaf_count();
        if n != m {
            return Err(Error::InvalidDiagram(format!(
                "{n} source leaves but {m} target leaves"
            )));
        }
        if rot < 1 || rot > n {
            return Err(Error::InvalidDiagram(format!(
                "rotation {rot} outside [1, {n}]"
            )));
        }
        Ok(Self {
            source,
            rot,
            target,
        })
    }

    pub fn identity() -> Self {
        Self {
            source: BinaryTree::Leaf,
            rot: 1,
            target: BinaryTree::Leaf,
        }
    }

    pub fn source(&self) -> &BinaryTree {
        &self.source
    }

    pub fn target(&self) -> &BinaryTree {
        &self.target
    }

    /// `σ(1)`.
    pub fn rot(&self) -> usize {
        self.rot
    }

    pub fn leaves(&self) -> usize {
        self.source.leaf_count()
    }

    pub fn carets(&self) -> usize {
        self.source.caret_count()
    }

    /// `σ(i)` for `i ∈ [1, n]`.
    pub fn sigma(&self, i: usize) -> usize {
        let n = self.leaves();
        (self.rot + i - 2) % n + 1
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// `(source leaf path, target leaf path)` in source leaf order.
    pub fn pairs(&self) -> Vec<(Path, Path)> {
        let src = self.source.leaf_paths();
        let tgt = self.target.leaf_paths();
        src.into_iter()
            .enumerate()
            .map(|(i, s)| (s, tgt[self.sigma(i + 1) - 1].clone()))
            .collect()
    }

    /// Rebuilds a diagram from leaf pairs listed in source order. The target
    /// paths must be a cyclic rotation of the target's leaf order.
    pub fn from_pairs(pairs: &[(Path, Path)]) -> Result<Self> {
        let src_paths: Vec<Path> = pairs.iter().map(|p| p.0.clone()).collect();
        let source = BinaryTree::from_leaf_paths(&src_paths)?;
        let mut tgt_paths: Vec<Path> = pairs.iter().map(|p| p.1.clone()).collect();
        tgt_paths.sort();
        let target = BinaryTree::from_leaf_paths(&tgt_paths)?;
        let n = pairs.len();
        let start = tgt_paths.binary_search(&pairs[0].1).expect("present");
        for (i, (_, t)) in pairs.iter().enumerate() {
            if tgt_paths[(start + i) % n] != *t {
                return Err(Error::InvalidDiagram(
                    "leaf pairing is not a cyclic rotation".into(),
                ));
            }
        }
        Ok(Self {
            source,
            rot: start + 1,
            target,
        })
    }

    pub fn is_reduced(&self) -> bool {
        let pairs = self.pairs();
        !pairs.windows(2).any(|w| mergeable(&w[0], &w[1]))
    }

    pub fn reduce(&self) -> Self {
        let mut stack: Vec<(Path, Path)> = Vec::with_capacity(self.leaves());
        for pair in self.pairs() {
            stack.push(pair);
            while stack.len() >= 2 && mergeable(&stack[stack.len() - 2], &stack[stack.len() - 1]) {
                stack.pop();
                let top = stack.last_mut().unwrap();
                top.0.pop();
                top.1.pop();
            }
        }
        Self::from_pairs(&stack).expect("reduction keeps a valid diagram")
    }

    /// `self · other`: apply `self`, then `other`. The result is reduced.
    pub fn multiply(&self, other: &Self) -> Self {
        let common = common_expansion(&self.target, &other.source);
        let leaves = common.leaf_paths();

        let mut first: Vec<(Path, Path)> = Vec::with_capacity(leaves.len());
        for (s, t) in self.pairs() {
            for u in leaves.iter().filter(|u| u.starts_with(&t)) {
                let mut s2 = s.clone();
                s2.extend_from_slice(&u[t.len()..]);
                first.push((s2, u.clone()));
            }
        }

        let mut second: Vec<(Path, Path)> = Vec::with_capacity(leaves.len());
        for (s, t) in other.pairs() {
            for u in leaves.iter().filter(|u| u.starts_with(&s)) {
                let mut t2 = t.clone();
                t2.extend_from_slice(&u[s.len()..]);
                second.push((u.clone(), t2));
            }
        }
        second.sort();

        first.sort();
        let composed: Vec<(Path, Path)> = first
            .into_iter()
            .map(|(s, u)| {
                let idx = second
                    .binary_search_by(|p| p.0.cmp(&u))
                    .expect("common expansion leaf");
                (s, second[idx].1.clone())
            })
            .collect();
        Self::from_pairs(&composed)
            .expect("product of rotations is a rotation")
            .reduce()
    }

    pub fn invert(&self) -> Self {
        let n = self.leaves();
        let rot = (2 * n + 1 - self.rot) % n + 1;
        Self {
            source: self.target.clone(),
            rot,
            target: self.source.clone(),
        }
    }

    /// Every diagram with `n` leaves, reduced or not.
    pub fn all_with_leaves(n: usize) -> Vec<TreePairDiagram> {
        let trees = BinaryTree::all_with_leaves(n);
        let mut out = Vec::with_capacity(trees.len() * trees.len() * n);
        for s in &trees {
            for t in &trees {
                for rot in 1..=n {
                    out.push(Self {
                        source: s.clone(),
                        rot,
                        target: t.clone(),
                    });
                }
            }
        }
        out
    }
}

fn mergeable(x: &(Path, Path), y: &(Path, Path)) -> bool {
    siblings(&x.0, &y.0) && siblings(&x.1, &y.1)
}

fn siblings(p: &Path, q: &Path) -> bool {
    match (p.split_last(), q.split_last()) {
        (Some((false, a)), Some((true, b))) => a == b,
        _ => false,
    }
}

pub fn is_reduced(d: &TreePairDiagram) -> bool {
    d.is_reduced()
}

pub fn reduce(d: &TreePairDiagram) -> TreePairDiagram {
    d.reduce()
}

pub fn multiply(d1: &TreePairDiagram, d2: &TreePairDiagram) -> TreePairDiagram {
    d1.multiply(d2)
}

pub fn invert(d: &TreePairDiagram) -> TreePairDiagram {
    d.invert()
}

impl fmt::Display for TreePairDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.source, self.rot, self.target)
    }
}

impl FromStr for TreePairDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let [src, rot, tgt] = parts[..] else {
            return Err(parse_err(format!(
                "expected <source>:<rot>:<target>, got {s:?}"
            )));
        };
        let rot: usize = rot
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad rotation {rot:?}")))?;
        Self::new(src.parse()?, rot, tgt.parse()?).map_err(|e| parse_err(e.to_string()))
    }
}

/// The named elements of `T`.
#[derive(Clone, Debug)]
pub struct Generators {
    pub a: TreePairDiagram,
    pub b: TreePairDiagram,
    pub big_a: TreePairDiagram,
    pub big_b: TreePairDiagram,
    pub big_c: TreePairDiagram,
}

pub fn generators() -> Generators {
    let d = |s: &str| s.parse::<TreePairDiagram>().expect("valid generator");
    Generators {
        a: d("100:2:100"),
        b: d("10100:3:10100"),
        big_a: d("10100:1:11000"),
        big_b: d("1010100:1:1011000"),
        big_c: d("10100:3:10100"),
    }
}

/// The reduced product of the generator diagrams of `a`, `b` and `b⁻¹`.
pub fn letters_to_diagram(letters: &[Letter]) -> TreePairDiagram {
    let g = generators();
    let b_inv = g.b.invert();
    letters.iter().fold(TreePairDiagram::identity(), |acc, l| {
        acc.multiply(match l {
            Letter::A => &g.a,
            Letter::B => &g.b,
            Letter::BInv => &b_inv,
        })
    })
}
