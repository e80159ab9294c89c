//! Piecewise-linear dyadic circle maps, piecewise-`PSL₂(ℤ)` maps of the
//! projective line, and the conjugation `Inn_?(g) = ? ∘ g ∘ ?⁻¹` between them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{parse_err, Error, Result};
use crate::farey::{is_farey_pair, mediant, minkowski_q, Dyadic, ExtRational};
use crate::psl2z::{Letter, NormalWord, Psl2Matrix};
use crate::tree_pairs::{Path, TreePairDiagram};

/// Default bound on Stern–Brocot depth in [`inn_question`].
pub const DEFAULT_REFINEMENT_DEPTH: usize = 64;

/// A degree-one circle map, piecewise linear with dyadic breakpoints and
/// power-of-two slopes.
///
/// Stored as the lift on `[0, 1]`: points `(xᵢ, yᵢ)` with `x₀ = 0`, `xₖ = 1`,
/// `y₀ ∈ [0, 1)` and `yₖ = y₀ + 1`. Interior points where the slope does not
/// change are dropped, so equal maps have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlMap {
    breaks: Vec<(Dyadic, Dyadic)>,
}

impl PlMap {
    pub fn new(points: Vec<(Dyadic, Dyadic)>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidMap(msg));
        if points.len() < 2 {
            return invalid("a PL map needs at least two points".into());
        }
        let (x0, y0) = &points[0];
        let (xk, yk) = &points[points.len() - 1];
        if !x0.is_zero() || *xk != Dyadic::one() {
            return invalid(format!(
                "breakpoints must run from 0 to 1, got {x0} to {xk}"
            ));
        }
        if y0.is_negative() || *y0 >= Dyadic::one() {
            return invalid(format!("initial value {y0} is outside [0, 1)"));
        }
        if *yk != y0 + &Dyadic::one() {
            return invalid(format!("final value {yk} is not {y0} + 1"));
        }
        let mut slopes = Vec::with_capacity(points.len() - 1);
        for w in points.windows(2) {
            let dx = &w[1].0 - &w[0].0;
            let dy = &w[1].1 - &w[0].1;
            if !dx.num().is_positive() || !dy.num().is_positive() {
                return invalid(format!(
                    "points ({},{}) and ({},{}) are not increasing",
                    w[0].0, w[0].1, w[1].0, w[1].1
                ));
            }
            match dy.ratio_log2(&dx) {
                Some(t) => slopes.push(t),
                None => {
                    return invalid(format!(
                        "slope on [{}, {}] is not a power of two",
                        w[0].0, w[1].0
                    ))
                }
            }
        }
        let mut breaks = Vec::with_capacity(points.len());
        breaks.push(points[0].clone());
        for i in 1..points.len() - 1 {
            if slopes[i - 1] != slopes[i] {
                breaks.push(points[i].clone());
            }
        }
        breaks.push(points[points.len() - 1].clone());
        Ok(Self { breaks })
    }

    pub fn identity() -> Self {
        Self {
            breaks: vec![
                (Dyadic::zero(), Dyadic::zero()),
                (Dyadic::one(), Dyadic::one()),
            ],
        }
    }

    pub fn breaks(&self) -> &[(Dyadic, Dyadic)] {
        &self.breaks
    }

    /// Rebuilds a map from its values modulo 1 at a sorted list of points
    /// `0 = s₀ < … < sₘ = 1` containing every breakpoint.
    fn from_samples(points: &[Dyadic], values: &[Dyadic]) -> Result<Self> {
        debug_assert_eq!(points.len(), values.len());
        let one = Dyadic::one();
        let mut lifted: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(points.len());
        let y0 = values[0].fract();
        lifted.push((points[0].clone(), y0.clone()));
        for i in 1..points.len() - 1 {
            let prev = &lifted[i - 1].1;
            let mut y = &Dyadic::integer(prev.floor()) + &values[i].fract();
            if y <= *prev {
                y = &y + &one;
            }
            lifted.push((points[i].clone(), y));
        }
        lifted.push((points[points.len() - 1].clone(), &y0 + &one));
        Self::new(lifted)
    }

    fn segment(&self, x: &Dyadic) -> usize {
        let idx = self.breaks.partition_point(|(bx, _)| bx <= x);
        idx.saturating_sub(1).min(self.breaks.len() - 2)
    }

    /// The lift `F(x)` for `x ∈ [0, 1]`.
    pub fn lift(&self, x: &Dyadic) -> Dyadic {
        let i = self.segment(x);
        let (x0, y0) = &self.breaks[i];
        let (x1, y1) = &self.breaks[i + 1];
        let t = (y1 - y0).ratio_log2(&(x1 - x0)).expect("valid slope");
        y0 + &scale(&(x - x0), t)
    }

    /// `f(x) ∈ [0, 1)` for any dyadic `x`, read modulo 1.
    pub fn apply(&self, x: &Dyadic) -> Dyadic {
        self.lift(&x.fract()).fract()
    }

    /// The unique `x ∈ [0, 1)` with `f(x) ≡ y (mod 1)`.
    pub fn preimage(&self, y: &Dyadic) -> Dyadic {
        let y0 = &self.breaks[0].1;
        let target = y0 + &(y - y0).fract();
        let idx = self.breaks.partition_point(|(_, by)| *by <= target);
        let i = idx.saturating_sub(1).min(self.breaks.len() - 2);
        let (x0, by0) = &self.breaks[i];
        let (x1, by1) = &self.breaks[i + 1];
        let t = (by1 - by0).ratio_log2(&(x1 - x0)).expect("valid slope");
        (x0 + &scale(&(&target - by0), -t)).fract()
    }

    /// `self · other`: apply `self`, then `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut pts: Vec<Dyadic> = self.breaks.iter().map(|(x, _)| x.clone()).collect();
        pts.extend(other.breaks.iter().map(|(x, _)| self.preimage(x)));
        pts.push(Dyadic::one());
        pts.sort();
        pts.dedup();
        let vals: Vec<Dyadic> = pts.iter().map(|x| other.apply(&self.apply(x))).collect();
        Self::from_samples(&pts, &vals).expect("composition of PL maps is a PL map")
    }

    pub fn invert(&self) -> Self {
        let mut pts: Vec<Dyadic> = self.breaks.iter().map(|(_, y)| y.fract()).collect();
        pts.push(Dyadic::zero());
        pts.push(Dyadic::one());
        pts.sort();
        pts.dedup();
        let vals: Vec<Dyadic> = pts.iter().map(|y| self.preimage(y)).collect();
        Self::from_samples(&pts, &vals).expect("inverse of a PL map is a PL map")
    }

    /// `x ∈ [0, 1)` where the lift crosses an integer.
    pub fn zero_preimage(&self) -> Dyadic {
        self.preimage(&Dyadic::zero())
    }
}

fn scale(x: &Dyadic, t: i64) -> Dyadic {
    if t >= 0 {
        x.shl(t as u64)
    } else {
        x.shr(t.unsigned_abs())
    }
}

pub fn pl_compose(f: &PlMap, g: &PlMap) -> PlMap {
    f.compose(g)
}

pub fn pl_invert(f: &PlMap) -> PlMap {
    f.invert()
}

pub fn pl_eq(f: &PlMap, g: &PlMap) -> bool {
    f == g
}

impl fmt::Display for PlMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, y)) in self.breaks.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{x},{y}")?;
        }
        Ok(())
    }
}

impl FromStr for PlMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut points = Vec::new();
        for item in s.split(';') {
            let (x, y) = item
                .split_once(',')
                .ok_or_else(|| parse_err(format!("expected x,y, got {:?}", item.trim())))?;
            points.push((x.parse::<Dyadic>()?, y.parse::<Dyadic>()?));
        }
        PlMap::new(points).map_err(|e| parse_err(e.to_string()))
    }
}

/// `[m/2^e, (m+1)/2^e]` for a leaf path.
pub fn path_interval(path: &Path) -> (Dyadic, u64) {
    let mut m = BigInt::zero();
    for &bit in path {
        m <<= 1;
        if bit {
            m += 1;
        }
    }
    (Dyadic::new(m, path.len() as u64), path.len() as u64)
}

/// Inverse of [`path_interval`]; `None` unless the interval is standard.
pub fn interval_path(start: &Dyadic, width: &Dyadic) -> Option<Path> {
    if start.is_negative() || !start.is_standard_interval(width) {
        return None;
    }
    let e = width.log2_exact()?.unsigned_abs();
    let m = start.shl(e);
    if m.exp() != 0 || *m.num() >= (BigInt::one() << e) {
        return None;
    }
    Some((0..e).rev().map(|i| m.num().bit(i)).collect())
}

pub fn plmap_from_diagram(d: &TreePairDiagram) -> PlMap {
    let pairs = d.pairs();
    let mut pts = Vec::with_capacity(pairs.len() + 1);
    let mut vals = Vec::with_capacity(pairs.len() + 1);
    for (s, t) in &pairs {
        pts.push(path_interval(s).0);
        vals.push(path_interval(t).0);
    }
    pts.push(Dyadic::one());
    vals.push(vals[0].clone());
    PlMap::from_samples(&pts, &vals).expect("diagrams define PL maps")
}

/// The reduced diagram of a PL map.
pub fn diagram_from_plmap(f: &PlMap) -> Result<TreePairDiagram> {
    let mut cuts: Vec<Dyadic> = f.breaks.iter().map(|(x, _)| x.clone()).collect();
    cuts.push(f.zero_preimage());
    let mut leaves = Vec::new();
    minimal_partition(&Dyadic::zero(), 0, &cuts, &mut leaves);

    let mut pairs: Vec<(Path, Path)> = Vec::new();
    let mut stack: Vec<(Dyadic, u64)> = leaves.into_iter().rev().collect();
    while let Some((lo, e)) = stack.pop() {
        let width = Dyadic::pow2_neg(e);
        let y = f.apply(&lo);
        let dy = f.lift(&(&lo + &width)) - f.lift(&lo);
        match interval_path(&y, &dy) {
            Some(tp) => {
                let sp = interval_path(&lo, &width)
                    .ok_or_else(|| Error::NonStandardPartition(lo.to_string()))?;
                pairs.push((sp, tp));
            }
            None => {
                let half = width.half();
                stack.push((&lo + &half, e + 1));
                stack.push((lo, e + 1));
            }
        }
    }
    Ok(TreePairDiagram::from_pairs(&pairs)?.reduce())
}

/// Leaves `(start, depth)` of the smallest standard dyadic partition of
/// `[0, 1]` with every cut point as an endpoint.
fn minimal_partition(lo: &Dyadic, e: u64, cuts: &[Dyadic], out: &mut Vec<(Dyadic, u64)>) {
    let hi = lo + &Dyadic::pow2_neg(e);
    if cuts.iter().any(|c| c > lo && *c < hi) {
        let mid = lo + &Dyadic::pow2_neg(e + 1);
        minimal_partition(lo, e + 1, cuts, out);
        minimal_partition(&mid, e + 1, cuts, out);
    } else {
        out.push((lo.clone(), e));
    }
}

/// Position on the circle cut open at `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum CirclePos {
    NonNeg(ExtRational),
    Infinity,
    Neg(ExtRational),
    End,
}

impl CirclePos {
    fn point(x: &ExtRational) -> Self {
        if x.is_infinite() {
            CirclePos::Infinity
        } else if x.num().is_negative() {
            CirclePos::Neg(x.clone())
        } else {
            CirclePos::NonNeg(x.clone())
        }
    }

    /// An upper interval endpoint: `0/1` is the end of the circle.
    fn upper(x: &ExtRational) -> Self {
        if !x.is_infinite() && x.num().is_zero() {
            CirclePos::End
        } else {
            Self::point(x)
        }
    }

    fn rank(&self) -> u8 {
        match self {
            CirclePos::NonNeg(_) => 0,
            CirclePos::Infinity => 1,
            CirclePos::Neg(_) => 2,
            CirclePos::End => 3,
        }
    }
}

impl Ord for CirclePos {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CirclePos::NonNeg(x), CirclePos::NonNeg(y))
            | (CirclePos::Neg(x), CirclePos::Neg(y)) => x.circle_cmp(y),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for CirclePos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One Möbius piece of a [`PpMap`] on the arc from `lo` to `hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub lo: ExtRational,
    pub hi: ExtRational,
    pub mat: Psl2Matrix,
}

impl Piece {
    fn contains(&self, x: &ExtRational) -> bool {
        let p = CirclePos::point(x);
        CirclePos::point(&self.lo) <= p && p <= CirclePos::upper(&self.hi)
    }

    fn contains_strictly(&self, x: &ExtRational) -> bool {
        let p = CirclePos::point(x);
        CirclePos::point(&self.lo) < p && p < CirclePos::upper(&self.hi)
    }
}

/// A piecewise-`PSL₂(ℤ)` homeomorphism of `ℝP¹`.
///
/// Pieces run around the circle from `0/1` back to `0/1`; an upper endpoint
/// at infinity is written `1/0` and a lower one `-1/0`. Equality compares
/// the merged form in which neighbouring pieces with the same matrix are
/// joined (the cut at `0` is always kept).
#[derive(Clone, Debug)]
pub struct PpMap {
    pieces: Vec<Piece>,
}

impl PartialEq for PpMap {
    fn eq(&self, other: &Self) -> bool {
        self.merged().pieces == other.merged().pieces
    }
}

impl Eq for PpMap {}

impl PpMap {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidMap(msg));
        let zero = ExtRational::zero();
        let (Some(first), Some(last)) = (pieces.first(), pieces.last()) else {
            return invalid("a piecewise map needs at least one piece".into());
        };
        if first.lo != zero || last.hi != zero {
            return invalid("pieces must start and end at 0/1".into());
        }
        for p in &pieces {
            if p.lo == ExtRational::infinity() || p.hi == ExtRational::neg_infinity() {
                return invalid(format!(
                    "write infinity as -1/0 at a lower end and 1/0 at an upper end ({}..{})",
                    p.lo, p.hi
                ));
            }
            if pieces.len() > 1 && CirclePos::point(&p.lo) >= CirclePos::upper(&p.hi) {
                return invalid(format!("empty piece {}..{}", p.lo, p.hi));
            }
        }
        for w in pieces.windows(2) {
            if !w[0].hi.same_point(&w[1].lo) {
                return invalid(format!("gap between {} and {}", w[0].hi, w[1].lo));
            }
            if !w[0]
                .mat
                .apply(&w[0].hi)
                .same_point(&w[1].mat.apply(&w[1].lo))
            {
                return invalid(format!("discontinuity at {}", w[0].hi));
            }
        }
        if !first.mat.apply(&zero).same_point(&last.mat.apply(&zero)) {
            return invalid("discontinuity at 0/1".into());
        }
        let images: Vec<Dyadic> = pieces
            .iter()
            .map(|p| minkowski_q(&p.mat.apply(&p.lo)))
            .collect();
        let offsets: Vec<Dyadic> = images.iter().map(|v| (v - &images[0]).fract()).collect();
        if offsets.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("pieces do not wind once around the circle".into());
        }
        Ok(Self { pieces })
    }

    pub fn identity() -> Self {
        Self::single(Psl2Matrix::identity())
    }

    /// A single Möbius transformation on the whole circle.
    pub fn single(mat: Psl2Matrix) -> Self {
        Self {
            pieces: vec![Piece {
                lo: ExtRational::zero(),
                hi: ExtRational::zero(),
                mat,
            }],
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Joins neighbouring pieces with equal matrices, keeping the cut at 0.
    pub fn merged(&self) -> Self {
        let mut out: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            match out.last_mut() {
                Some(last) if last.mat == p.mat => last.hi = p.hi.clone(),
                _ => out.push(p.clone()),
            }
        }
        Self { pieces: out }
    }

    pub fn apply(&self, x: &ExtRational) -> ExtRational {
        let piece = self
            .pieces
            .iter()
            .find(|p| p.contains(x))
            .expect("pieces cover the circle");
        piece.mat.apply(x)
    }

    fn piece_at(&self, x: &ExtRational) -> &Piece {
        self.pieces
            .iter()
            .find(|p| p.contains_strictly(x))
            .expect("interior point lies in a piece")
    }

    /// `self · other`: apply `self`, then `other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut cuts: Vec<ExtRational> = vec![ExtRational::zero(), ExtRational::infinity()];
        for p in &self.pieces {
            cuts.push(p.lo.clone());
        }
        for q in &other.pieces {
            for p in &self.pieces {
                let x = p.mat.inverse().apply(&q.lo);
                if p.contains(&x) {
                    cuts.push(x);
                }
            }
        }
        let pieces = build_pieces(cuts, |m| {
            let p = self.piece_at(m);
            let q = other.piece_at(&p.mat.apply(m));
            q.mat.mul(&p.mat)
        });
        Self { pieces }.merged()
    }
}

/// Cuts the circle at the given points (plus `0` and `∞`) and labels each
/// arc by evaluating `mat_at` at an interior point.
fn build_pieces(
    mut cuts: Vec<ExtRational>,
    mat_at: impl Fn(&ExtRational) -> Psl2Matrix,
) -> Vec<Piece> {
    cuts.push(ExtRational::zero());
    cuts.push(ExtRational::infinity());
    let mut pos: Vec<CirclePos> = cuts.iter().map(CirclePos::point).collect();
    pos.sort();
    pos.dedup();
    pos.push(CirclePos::End);
    let mut pieces = Vec::with_capacity(pos.len());
    for w in pos.windows(2) {
        let lo = lower_spelling(&w[0]);
        let hi = upper_spelling(&w[1]);
        let m = mediant(&lo, &hi).expect("arc endpoints on one side of infinity");
        pieces.push(Piece {
            mat: mat_at(&m),
            lo,
            hi,
        });
    }
    pieces
}

fn lower_spelling(p: &CirclePos) -> ExtRational {
    match p {
        CirclePos::NonNeg(x) | CirclePos::Neg(x) => x.clone(),
        CirclePos::Infinity => ExtRational::neg_infinity(),
        CirclePos::End => unreachable!("End is never a lower endpoint"),
    }
}

fn upper_spelling(p: &CirclePos) -> ExtRational {
    match p {
        CirclePos::NonNeg(x) | CirclePos::Neg(x) => x.clone(),
        CirclePos::Infinity => ExtRational::infinity(),
        CirclePos::End => ExtRational::zero(),
    }
}

pub fn pp_compose(f: &PpMap, g: &PpMap) -> PpMap {
    f.compose(g)
}

pub fn pp_apply(f: &PpMap, x: &ExtRational) -> ExtRational {
    f.apply(x)
}

impl fmt::Display for PpMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}..{}:{}", p.lo, p.hi, p.mat)?;
        }
        Ok(())
    }
}

impl FromStr for PpMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pieces = Vec::new();
        for item in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let (range, mat) = item
                .split_once(':')
                .ok_or_else(|| parse_err(format!("expected lo..hi:[[a,b],[c,d]], got {item:?}")))?;
            let (lo, hi) = range
                .split_once("..")
                .ok_or_else(|| parse_err(format!("expected lo..hi, got {range:?}")))?;
            pieces.push(Piece {
                lo: lo.parse()?,
                hi: hi.parse()?,
                mat: mat.parse()?,
            });
        }
        PpMap::new(pieces).map_err(|e| parse_err(e.to_string()))
    }
}

fn pieces_of(bounds: &[(&str, &str)], mat: &Psl2Matrix) -> PpMap {
    let pieces = bounds
        .iter()
        .map(|(lo, hi)| Piece {
            lo: lo.parse().unwrap(),
            hi: hi.parse().unwrap(),
            mat: mat.clone(),
        })
        .collect();
    PpMap::new(pieces).expect("generator tables are valid")
}

/// The generator maps with the Farey partitions of their defining table.
pub fn ppmap_of_letter(l: Letter) -> PpMap {
    match l {
        Letter::A => pieces_of(&[("0/1", "1/0"), ("-1/0", "0/1")], &l.matrix()),
        Letter::B => pieces_of(
            &[("0/1", "1/0"), ("-1/0", "-1/1"), ("-1/1", "0/1")],
            &l.matrix(),
        ),
        Letter::BInv => pieces_of(
            &[("0/1", "1/1"), ("1/1", "1/0"), ("-1/0", "0/1")],
            &l.matrix(),
        ),
    }
}

pub fn ppmap_from_word(w: &NormalWord) -> PpMap {
    let letters = w.letters();
    match letters.as_slice() {
        [] => PpMap::identity(),
        [l] => ppmap_of_letter(*l),
        _ => letters.iter().fold(PpMap::identity(), |acc, l| {
            acc.compose(&ppmap_of_letter(*l))
        }),
    }
}

/// The four-piece map `d` with `Inn_?(d) = B`.
pub fn build_d() -> PpMap {
    let m = Psl2Matrix::from_i64;
    let p = |lo: &str, hi: &str, mat: Psl2Matrix| Piece {
        lo: lo.parse().unwrap(),
        hi: hi.parse().unwrap(),
        mat,
    };
    PpMap::new(vec![
        p("0/1", "1/0", m(1, 0, 0, 1)),
        p("-1/0", "-1/1", m(1, -1, 0, 1)),
        p("-1/1", "-1/2", m(3, 1, -1, 0)),
        p("-1/2", "0/1", m(1, 0, 1, 1)),
    ])
    .expect("d is a homeomorphism")
}

pub fn inn_question(f: &PpMap) -> Result<PlMap> {
    inn_question_with_depth(f, DEFAULT_REFINEMENT_DEPTH)
}

/// `? ∘ f ∘ ?⁻¹` as a PL map.
///
/// The circle is cut into the coarsest Farey partition that refines the
/// pieces of `f` and whose image partition avoids `0` and `∞` in the
/// interior of its arcs. Each arc is checked to map onto a Farey arc, with
/// mediants going to mediants, before `?` is applied to the endpoints.
pub fn inn_question_with_depth(f: &PpMap, max_depth: usize) -> Result<PlMap> {
    let mut cuts: Vec<ExtRational> = vec![ExtRational::zero(), ExtRational::infinity()];
    for p in &f.pieces {
        cuts.push(p.lo.clone());
        let inv = p.mat.inverse();
        for y in [ExtRational::zero(), ExtRational::infinity()] {
            let x = inv.apply(&y);
            if p.contains(&x) {
                cuts.push(x);
            }
        }
    }
    let cut_pos: Vec<CirclePos> = cuts.iter().map(CirclePos::point).collect();

    let mut arcs: Vec<(ExtRational, ExtRational)> = Vec::new();
    for (lo, hi) in [
        (ExtRational::zero(), ExtRational::infinity()),
        (ExtRational::neg_infinity(), ExtRational::zero()),
    ] {
        farey_refine(lo, hi, &cut_pos, 0, max_depth, &mut arcs)?;
    }

    let mut pts = Vec::with_capacity(arcs.len() + 1);
    let mut vals = Vec::with_capacity(arcs.len() + 1);
    for (lo, hi) in &arcs {
        let piece = f.piece_at(&mediant(lo, hi)?);
        let (ylo, yhi) = (piece.mat.apply(lo), piece.mat.apply(hi));
        if !is_farey_pair(&ylo, &yhi) {
            return Err(Error::InvalidMap(format!(
                "[{lo}, {hi}] maps to the non-Farey pair {ylo}, {yhi}"
            )));
        }
        let qlo = minkowski_q(&ylo);
        let qhi = question_upper(&yhi);
        let width = &qhi - &qlo;
        if !qlo.is_standard_interval(&width) {
            return Err(Error::InvalidMap(format!(
                "image of [{lo}, {hi}] is not a standard dyadic arc"
            )));
        }
        let ymid = piece.mat.apply(&mediant(lo, hi)?);
        if minkowski_q(&ymid) != (&qlo + &qhi).half() {
            return Err(Error::InvalidMap(format!(
                "mediant of [{lo}, {hi}] is not preserved"
            )));
        }
        pts.push(minkowski_q(lo));
        vals.push(qlo);
    }
    pts.push(Dyadic::one());
    vals.push(vals[0].clone());
    PlMap::from_samples(&pts, &vals)
}

/// `?` at an upper arc endpoint, where `0/1` counts as `1`.
fn question_upper(x: &ExtRational) -> Dyadic {
    if !x.is_infinite() && x.num().is_zero() {
        Dyadic::one()
    } else {
        minkowski_q(x)
    }
}

fn farey_refine(
    lo: ExtRational,
    hi: ExtRational,
    cuts: &[CirclePos],
    depth: usize,
    max_depth: usize,
    out: &mut Vec<(ExtRational, ExtRational)>,
) -> Result<()> {
    let (plo, phi) = (CirclePos::point(&lo), CirclePos::upper(&hi));
    if !cuts.iter().any(|c| plo < *c && *c < phi) {
        out.push((lo, hi));
        return Ok(());
    }
    if depth >= max_depth {
        return Err(Error::RefinementDepth(max_depth));
    }
    let m = mediant(&lo, &hi)?;
    farey_refine(lo, m.clone(), cuts, depth + 1, max_depth, out)?;
    farey_refine(m, hi, cuts, depth + 1, max_depth, out)
}

/// The PL map of a normal word, computed through its reduced diagram.
pub fn plmap_from_word(w: &NormalWord) -> PlMap {
    plmap_from_diagram(&crate::tree_pairs::letters_to_diagram(&w.letters()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_pairs::generators;

    fn pl(s: &str) -> PlMap {
        s.parse().unwrap()
    }

    fn dy(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn q(s: &str) -> ExtRational {
        s.parse().unwrap()
    }

    fn a_map() -> PlMap {
        pl("0,1/2; 1/2,1; 1,3/2")
    }

    fn b_map() -> PlMap {
        pl("0,3/4; 1/2,1; 3/4,3/2; 1,7/4")
    }

    #[test]
    fn canonical_form_drops_collinear_points() {
        assert_eq!(a_map().breaks().len(), 2);
        assert_eq!(a_map().to_string(), "0,1/2; 1,3/2");
        assert!("0,0; 1/2,1/3; 1,1".parse::<PlMap>().is_err());
        assert!("0,0; 1/2,3/4; 1,1".parse::<PlMap>().is_err());
        assert!("0,1; 1,2".parse::<PlMap>().is_err());
    }

    #[test]
    fn pl_algebra() {
        assert_eq!(a_map().compose(&a_map()), PlMap::identity());
        assert_eq!(PlMap::identity().invert(), PlMap::identity());
        let b = b_map();
        assert_eq!(b.compose(&b).compose(&b), PlMap::identity());
        assert_eq!(b.invert(), b.compose(&b));
        let g = generators();
        let c = plmap_from_diagram(&g.big_c);
        let a = plmap_from_diagram(&g.big_a);
        assert_eq!(c.compose(&a), a_map());
        assert_eq!(b.apply(&dy("1/4")), dy("7/8"));
        assert_eq!(b.preimage(&dy("7/8")), dy("1/4"));
    }

    #[test]
    fn diagrams_and_pl_maps() {
        assert_eq!(
            diagram_from_plmap(&a_map()).unwrap().to_string(),
            "100:2:100"
        );
        assert_eq!(
            diagram_from_plmap(&b_map()).unwrap().to_string(),
            "10100:3:10100"
        );
        assert!(diagram_from_plmap(&PlMap::identity())
            .unwrap()
            .is_identity());
        assert_eq!(plmap_from_diagram(&generators().b), b_map());
        let big_b = plmap_from_diagram(&generators().big_b);
        assert_eq!(big_b, pl("0,0; 1/2,1/2; 3/4,5/8; 7/8,3/4; 1,1"));
    }

    #[test]
    fn diagram_roundtrip_small() {
        for n in 1..=5 {
            for d in TreePairDiagram::all_with_leaves(n) {
                assert_eq!(
                    diagram_from_plmap(&plmap_from_diagram(&d)).unwrap(),
                    d.reduce(),
                    "{d}"
                );
            }
        }
    }

    #[test]
    fn paths_and_intervals() {
        let p = vec![true, false, true];
        let (start, e) = path_interval(&p);
        assert_eq!((start.clone(), e), (dy("5/8"), 3));
        assert_eq!(interval_path(&start, &dy("1/8")), Some(p));
        assert_eq!(interval_path(&dy("1/4"), &dy("1/2")), None);
    }

    #[test]
    fn projective_maps() {
        let b = ppmap_of_letter(Letter::B);
        assert_eq!(b.apply(&q("0/1")), q("-1/1"));
        assert_eq!(ppmap_of_letter(Letter::A).apply(&q("1/1")), q("-1/1"));
        let a = ppmap_of_letter(Letter::A);
        assert_eq!(a.compose(&a), PpMap::identity());
        assert_eq!(b.compose(&b).compose(&b), PpMap::identity());
        assert_eq!(b.compose(&b), ppmap_of_letter(Letter::BInv));
        assert_eq!(ppmap_from_word(&"aa".parse().unwrap()), PpMap::identity());
        assert_eq!(a.pieces().len(), 2);
        assert_eq!(b.pieces().len(), 3);
    }

    #[test]
    fn element_d() {
        let d = build_d();
        assert_eq!(d.pieces().len(), 4);
        assert_eq!(d.apply(&q("0/1")), q("0/1"));
        assert_eq!(d.apply(&q("-1/2")), q("-1/1"));
        assert_eq!(d.apply(&q("-1/3")), q("-1/2"));
        assert_eq!(d.to_string().parse::<PpMap>().unwrap(), d);
    }

    #[test]
    fn conjugation_by_question_mark() {
        let g = generators();
        assert_eq!(inn_question(&PpMap::identity()).unwrap(), PlMap::identity());
        assert_eq!(
            inn_question(&ppmap_of_letter(Letter::B)).unwrap(),
            plmap_from_diagram(&g.big_c)
        );
        let ca = plmap_from_diagram(&g.big_c).compose(&plmap_from_diagram(&g.big_a));
        assert_eq!(inn_question(&ppmap_of_letter(Letter::A)).unwrap(), ca);
        assert_eq!(
            inn_question(&build_d()).unwrap(),
            plmap_from_diagram(&g.big_b)
        );
    }

    #[test]
    fn refinement_depth_is_bounded() {
        let far = PpMap::single(Psl2Matrix::from_i64(1, 40, 0, 1));
        assert!(matches!(
            inn_question_with_depth(&far, 10),
            Err(Error::RefinementDepth(10))
        ));
        assert!(inn_question(&far).is_ok());
    }

    #[test]
    fn invalid_projective_maps() {
        assert!("0/1..1/0:[[1,0],[0,1]];-1/0..0/1:[[0,-1],[1,0]]"
            .parse::<PpMap>()
            .is_err());
        assert!("0/1..1/0:[[1,0],[0,1]]".parse::<PpMap>().is_err());
        assert!("0/1..0/1:[[1,1],[0,1]]".parse::<PpMap>().is_ok());
    }
}
