//! Word-length experiments, exhaustive verification sweeps and diagram
//! export.
//!
//! Every sweep fans out with rayon and collects in enumeration order, so
//! reports and summaries are byte-identical between runs.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_integer::Integer;
use rayon::prelude::*;

use crate::circle_maps::{
    build_d, inn_question, pl_compose, plmap_from_diagram, pp_compose, ppmap_of_letter, PlMap,
    PpMap,
};
use crate::error::{Error, Result};
use crate::farey::{mediant, minkowski_inv, minkowski_q, Dyadic, ExtRational};
use crate::psl2z::{letters_to_matrix, reduce_word, word_length_ab, Letter, NormalWord};
use crate::seq::{
    is_member_seq, sequence_from_thin_tree, thin_tree_from_sequence, thin_witness_exps,
};
use crate::thin::{
    all_weights, check_eq1, check_eq2_signed, is_member, is_thin, small_table, thin_from_weights,
    word_to_diagram,
};
use crate::tree_pairs::{generators, letters_to_diagram, BinaryTree, TreePairDiagram};
use crate::Sign;

/// Largest radius accepted by the `{A, B, C}` breadth-first search.
pub const DEFAULT_BFS_BOUND: usize = 6;

/// Largest `k` accepted by [`length_bounds_report`].
pub const MAX_LENGTH_K: usize = 12;

/// Largest word length accepted by [`free_subgroup_report`].
pub const MAX_FREE_LEN: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricRow {
    pub word: NormalWord,
    /// `|w|_{a,b}`.
    pub len_ab: usize,
    /// `N(w)`.
    pub carets: usize,
    pub leaves: usize,
    /// `|w|_{A,B,C}` when the element lies in the supplied ball.
    pub len_abc: Option<usize>,
}

pub fn caret_count(d: &TreePairDiagram) -> usize {
    d.carets()
}

fn abc_generators() -> [TreePairDiagram; 6] {
    let g = generators();
    [
        g.big_a.clone(),
        g.big_a.invert(),
        g.big_b.clone(),
        g.big_b.invert(),
        g.big_c.clone(),
        g.big_c.invert(),
    ]
}

/// Exact `{A^±1, B^±1, C^±1}` word lengths of all elements within a radius.
#[derive(Clone, Debug)]
pub struct AbcBall {
    radius: usize,
    dist: HashMap<TreePairDiagram, usize>,
}

impl AbcBall {
    pub fn new(radius: usize) -> Result<Self> {
        if radius > DEFAULT_BFS_BOUND {
            return Err(Error::ExceedsBound("radius", radius, DEFAULT_BFS_BOUND));
        }
        let mut ball = Self {
            radius,
            dist: HashMap::new(),
        };
        ball.search(None);
        Ok(ball)
    }

    /// Breadth-first search, stopping early once `target` is reached.
    fn search(&mut self, target: Option<&TreePairDiagram>) {
        let gens = abc_generators();
        let start = TreePairDiagram::identity();
        self.dist.insert(start.clone(), 0);
        let mut frontier = vec![start];
        for step in 1..=self.radius {
            if target.is_some_and(|t| self.dist.contains_key(t)) {
                return;
            }
            let mut next = Vec::new();
            for x in &frontier {
                for g in &gens {
                    let y = x.multiply(g);
                    if !self.dist.contains_key(&y) {
                        self.dist.insert(y.clone(), step);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn get(&self, d: &TreePairDiagram) -> Option<usize> {
        self.dist.get(d).copied()
    }

    /// Elements with their lengths, ordered by length and then by diagram.
    pub fn elements(&self) -> Vec<(TreePairDiagram, usize)> {
        let mut out: Vec<_> = self.dist.iter().map(|(d, &n)| (d.clone(), n)).collect();
        out.sort_by(|x, y| x.1.cmp(&y.1).then_with(|| x.0.cmp(&y.0)));
        out
    }
}

/// `|d|_{A,B,C}` if it is at most `radius`.
pub fn bfs_length_abc(d: &TreePairDiagram, radius: usize) -> Result<Option<usize>> {
    if radius > DEFAULT_BFS_BOUND {
        return Err(Error::ExceedsBound("radius", radius, DEFAULT_BFS_BOUND));
    }
    let target = d.reduce();
    let mut ball = AbcBall {
        radius,
        dist: HashMap::new(),
    };
    ball.search(Some(&target));
    Ok(ball.get(&target))
}

fn ratio_lt(x: (usize, usize), y: (usize, usize)) -> bool {
    x.0 * y.1 < y.0 * x.1
}

fn fmt_ratio(f: &mut fmt::Formatter<'_>, r: (usize, usize)) -> fmt::Result {
    let g = r.0.gcd(&r.1).max(1);
    write!(f, "{}/{}", r.0 / g, r.1 / g)
}

#[derive(Clone, Debug)]
pub struct LengthReport {
    pub rows: Vec<MetricRow>,
    /// Words breaking `2N − 3 ≤ |w| ≤ 2N − 1` or the leaf and caret counts.
    pub violations: Vec<NormalWord>,
    /// Extremes of `|w|_{a,b} / N(w)` as `(|w|, N)`.
    pub min_ratio: (usize, usize),
    pub max_ratio: (usize, usize),
}

impl LengthReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for LengthReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "word\tlen_ab\tcarets\tleaves\tlen_abc")?;
        for r in &self.rows {
            let abc = r.len_abc.map_or_else(|| "-".to_string(), |n| n.to_string());
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}",
                r.word, r.len_ab, r.carets, r.leaves, abc
            )?;
        }
        write!(f, "rows {}; |w|/N in [", self.rows.len())?;
        fmt_ratio(f, self.min_ratio)?;
        f.write_str(", ")?;
        fmt_ratio(f, self.max_ratio)?;
        f.write_str("]; ")?;
        if self.passed() {
            f.write_str("bounds hold")
        } else {
            let bad: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
            write!(f, "bounds fail for {}", bad.join(" "))
        }
    }
}

fn row_ok(r: &MetricRow) -> bool {
    let (len, n, k) = (r.len_ab, r.carets, r.word.k());
    len + 3 >= 2 * n && len < 2 * n && r.leaves == k + 2 && r.carets + 1 == r.leaves
}

/// Sweeps every nontrivial normal word with `k ≤ max_k`. The identity is
/// left out since `N = 0` sits below the lower bound.
pub fn length_bounds_report(max_k: usize, ball: Option<&AbcBall>) -> Result<LengthReport> {
    if max_k > MAX_LENGTH_K {
        return Err(Error::ExceedsBound("max_k", max_k, MAX_LENGTH_K));
    }
    let words: Vec<NormalWord> = (0..=max_k)
        .flat_map(NormalWord::all_with_k)
        .filter(|w| !w.is_identity())
        .collect();
    let rows: Vec<MetricRow> = words
        .par_iter()
        .map(|w| {
            let d = word_to_diagram(w);
            MetricRow {
                word: w.clone(),
                len_ab: word_length_ab(w),
                carets: caret_count(&d),
                leaves: d.leaves(),
                len_abc: ball.and_then(|b| b.get(&d)),
            }
        })
        .collect();
    let violations = rows
        .iter()
        .filter(|r| !row_ok(r))
        .map(|r| r.word.clone())
        .collect();
    let ratios = rows.iter().map(|r| (r.len_ab, r.carets));
    let min_ratio = ratios
        .clone()
        .reduce(|a, b| if ratio_lt(b, a) { b } else { a })
        .unwrap_or((0, 1));
    let max_ratio = ratios
        .reduce(|a, b| if ratio_lt(a, b) { b } else { a })
        .unwrap_or((0, 1));
    Ok(LengthReport {
        rows,
        violations,
        min_ratio,
        max_ratio,
    })
}

/// A letter of the free subgroup: `g = abab`, `h = aBaB` and their inverses
/// `G`, `H`.
fn free_letter(c: char) -> Vec<Letter> {
    use Letter::{BInv, A, B};
    match c {
        'g' => vec![A, B, A, B],
        'G' => vec![BInv, A, BInv, A],
        'h' => vec![A, BInv, A, BInv],
        'H' => vec![B, A, B, A],
        _ => unreachable!("free subgroup letters are g, G, h, H"),
    }
}

fn free_words(len: usize) -> Vec<String> {
    let inverse = |c: char| {
        if c.is_lowercase() {
            c.to_ascii_uppercase()
        } else {
            c.to_ascii_lowercase()
        }
    };
    let mut words = vec![String::new()];
    for _ in 0..len {
        words = words
            .iter()
            .flat_map(|w| {
                let last = w.chars().last();
                ['g', 'G', 'h', 'H']
                    .into_iter()
                    .filter(move |&c| last != Some(inverse(c)))
                    .map(move |c| format!("{w}{c}"))
            })
            .collect();
    }
    words
}

/// The image of a normal word in `ℤ/2 × ℤ/3` under `a ↦ (1, 0)`, `b ↦ (0, 1)`.
pub fn abelianization(w: &NormalWord) -> (u8, u8) {
    w.letters().iter().fold((0, 0), |(x, y), l| match l {
        Letter::A => ((x + 1) % 2, y),
        Letter::B => (x, (y + 1) % 3),
        Letter::BInv => (x, (y + 2) % 3),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeRow {
    /// A reduced word in `g, G, h, H`.
    pub word: String,
    pub image: NormalWord,
    pub len_ab: usize,
}

#[derive(Clone, Debug)]
pub struct FreeReport {
    pub rows: Vec<FreeRow>,
    /// Nonempty words whose image is trivial.
    pub trivial: Vec<String>,
    /// Smallest `|image|_{a,b} / length` as `(|image|, length)`.
    pub min_growth: (usize, usize),
    /// Images of `g` and `h` in `ℤ/2 × ℤ/3`.
    pub abelianization: [(char, (u8, u8)); 2],
}

impl FreeReport {
    /// No relation up to the bound and `|image| ≥ factor · length` throughout.
    pub fn passed(&self, factor: usize) -> bool {
        self.trivial.is_empty() && self.rows.iter().all(|r| r.len_ab >= factor * r.word.len())
    }
}

impl fmt::Display for FreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{}\t{}\t{}", r.word, r.image, r.len_ab)?;
        }
        for (c, (x, y)) in &self.abelianization {
            writeln!(f, "abelianization {c} -> ({x}, {y})")?;
        }
        write!(
            f,
            "words {}; trivial {}; min |image|/length ",
            self.rows.len(),
            self.trivial.len()
        )?;
        fmt_ratio(f, self.min_growth)
    }
}

/// Reduced words of length `1..=max_len` in `g^±1, h^±1` and their images.
pub fn free_subgroup_report(max_len: usize) -> Result<FreeReport> {
    if max_len > MAX_FREE_LEN {
        return Err(Error::ExceedsBound("max_len", max_len, MAX_FREE_LEN));
    }
    let words: Vec<String> = (1..=max_len).flat_map(free_words).collect();
    let rows: Vec<FreeRow> = words
        .par_iter()
        .map(|w| {
            let letters: Vec<Letter> = w.chars().flat_map(free_letter).collect();
            let image = reduce_word(&letters);
            let len_ab = word_length_ab(&image);
            FreeRow {
                word: w.clone(),
                image,
                len_ab,
            }
        })
        .collect();
    let trivial = rows
        .iter()
        .filter(|r| r.image.is_identity())
        .map(|r| r.word.clone())
        .collect();
    let min_growth = rows
        .iter()
        .map(|r| (r.len_ab, r.word.len()))
        .reduce(|a, b| if ratio_lt(b, a) { b } else { a })
        .unwrap_or((0, 1));
    let image = |c: char| abelianization(&reduce_word(&free_letter(c)));
    let abelianization = [('g', image('g')), ('h', image('h'))];
    Ok(FreeReport {
        rows,
        trivial,
        min_growth,
        abelianization,
    })
}

/// A deliberate defect injected into the sweeps, to show that the checks
/// notice it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// `ε(s₀)` enters (E2) with the wrong sign.
    FlipEpsilonSign,
}

/// Sweep bounds for [`Verifier`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Largest `k` compared against the multiplication oracle.
    pub word_k: usize,
    /// Largest `k` in the thin-triple count.
    pub count_k: usize,
    /// Largest `k` in the length bounds.
    pub length_k: usize,
    /// Largest leaf count for the agreement of the two membership tests.
    pub agree_leaves: usize,
    /// Radius of the `{A, B, C}` ball added to the agreement check.
    pub agree_radius: usize,
    /// Largest interval count for thin sequences.
    pub thin_k: usize,
    /// Largest exponent `e` of the dyadics `m/2^e` fed to `?⁻¹`.
    pub dyadic_exp: u64,
    /// Largest length of free subgroup words.
    pub free_len: usize,
    /// Radius of the ball for the `N` versus `|w|_{A,B,C}` bounds; `0` skips.
    pub ball_radius: usize,
    pub mutation: Option<Mutation>,
}

impl VerifyConfig {
    /// Bounds scaled from a single `max_k` and a ball radius.
    pub fn new(max_k: usize, radius: usize) -> Self {
        Self {
            word_k: max_k,
            count_k: max_k,
            length_k: max_k,
            agree_leaves: max_k + 2,
            agree_radius: radius.min(4),
            thin_k: (max_k + 2).max(3),
            dyadic_exp: 12,
            free_len: 5,
            ball_radius: radius,
            mutation: None,
        }
    }

    /// The bounds of the acceptance suite.
    pub fn acceptance() -> Self {
        Self {
            word_k: 8,
            count_k: 7,
            length_k: 8,
            agree_leaves: 8,
            agree_radius: 4,
            thin_k: 10,
            dyadic_exp: 12,
            free_len: 5,
            ball_radius: 5,
            mutation: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let radius = self.ball_radius.max(self.agree_radius);
        if radius > DEFAULT_BFS_BOUND {
            return Err(Error::ExceedsBound("radius", radius, DEFAULT_BFS_BOUND));
        }
        if self.length_k > MAX_LENGTH_K {
            return Err(Error::ExceedsBound("max_k", self.length_k, MAX_LENGTH_K));
        }
        if self.free_len > MAX_FREE_LEN {
            return Err(Error::ExceedsBound("max_len", self.free_len, MAX_FREE_LEN));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: u8, passed: bool, detail: String) -> Self {
        let outcome = if passed { Outcome::Pass } else { Outcome::Fail };
        Self {
            id,
            name: CRITERIA[id as usize - 1],
            outcome,
            detail,
        }
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "SKIP",
        };
        write!(f, "[{tag}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

pub const CRITERIA: [&str; 10] = [
    "generator relations",
    "conjugation by ?",
    "normal form diagrams",
    "thin triple count",
    "length bounds",
    "membership agreement",
    "thin sequences",
    "Minkowski function",
    "free subgroup",
    "ball bounds",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub results: Vec<CriterionResult>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.outcome != Outcome::Fail)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let passed = self
            .results
            .iter()
            .filter(|r| r.outcome == Outcome::Pass)
            .count();
        let skipped = self
            .results
            .iter()
            .filter(|r| r.outcome == Outcome::Skipped)
            .count();
        let failed = self.results.len() - passed - skipped;
        write!(f, "{passed} passed, {failed} failed, {skipped} skipped")
    }
}

/// Runs the verification criteria, sharing one `{A, B, C}` ball.
pub struct Verifier {
    cfg: VerifyConfig,
    ball: OnceLock<AbcBall>,
}

impl Verifier {
    pub fn new(cfg: VerifyConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            ball: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.cfg
    }

    fn ball(&self) -> &AbcBall {
        self.ball.get_or_init(|| {
            AbcBall::new(self.cfg.ball_radius.max(self.cfg.agree_radius)).expect("radius validated")
        })
    }

    pub fn run_all(&self) -> Summary {
        Summary {
            results: (1..=10).map(|id| self.criterion(id)).collect(),
        }
    }

    /// Criterion `id` in `1..=10`.
    pub fn criterion(&self, id: u8) -> CriterionResult {
        match id {
            1 => generator_relations(),
            2 => conjugation_identities(),
            3 => normal_form_diagrams(self.cfg.word_k),
            4 => thin_triple_count(self.cfg.count_k, self.cfg.mutation),
            5 => length_bounds(self.cfg.length_k),
            6 => self.membership_agreement(),
            7 => thin_sequences(self.cfg.thin_k),
            8 => minkowski_checks(self.cfg.dyadic_exp),
            9 => free_subgroup(self.cfg.free_len),
            10 => self.ball_bounds(),
            _ => panic!("criteria are numbered 1 to 10"),
        }
    }

    fn membership_agreement(&self) -> CriterionResult {
        let max_leaves = self.cfg.agree_leaves;
        let max_k = max_leaves.saturating_sub(2);
        let words: Vec<NormalWord> = (0..=max_k).flat_map(NormalWord::all_with_k).collect();
        let bad_members: Vec<String> = words
            .par_iter()
            .filter_map(|w| {
                let d = word_to_diagram(w);
                let ok = is_member(&d) == Ok(true) && is_member_seq(&plmap_from_diagram(&d));
                (!ok).then(|| w.to_string())
            })
            .collect();

        let non_members: Vec<TreePairDiagram> = (4..=max_leaves)
            .flat_map(|n| {
                thin_triples(n)
                    .into_iter()
                    .filter(|t| !t.equations_hold(1))
                    .map(|t| t.diagram)
            })
            .filter(TreePairDiagram::is_reduced)
            .collect();
        let bad_non_members: Vec<String> = non_members
            .par_iter()
            .filter(|d| is_member(d) != Ok(false) || is_member_seq(&plmap_from_diagram(d)))
            .map(ToString::to_string)
            .collect();

        let ball: Vec<TreePairDiagram> = if self.cfg.agree_radius == 0 {
            Vec::new()
        } else {
            self.ball()
                .elements()
                .into_iter()
                .filter(|(_, n)| *n <= self.cfg.agree_radius)
                .map(|(d, _)| d)
                .collect()
        };
        let ball_members = AtomicCount::default();
        let bad_ball: Vec<String> = ball
            .par_iter()
            .filter(|d| {
                let thin = is_member(d).expect("ball elements are reduced");
                if thin {
                    ball_members.bump();
                }
                thin != is_member_seq(&plmap_from_diagram(d))
            })
            .map(ToString::to_string)
            .collect();

        let mut detail = format!(
            "{} members, {} failing thin triples, {} ball elements ({} members), up to {} leaves",
            words.len(),
            non_members.len(),
            ball.len(),
            ball_members.get(),
            max_leaves
        );
        let bad: Vec<String> = bad_members
            .into_iter()
            .chain(bad_non_members)
            .chain(bad_ball)
            .collect();
        if let Some(first) = bad.first() {
            write!(detail, "; {} disagreements, first {first}", bad.len()).unwrap();
        }
        CriterionResult::new(6, bad.is_empty(), detail)
    }

    fn ball_bounds(&self) -> CriterionResult {
        let radius = self.cfg.ball_radius;
        if radius == 0 {
            let name = CRITERIA[9];
            return CriterionResult {
                id: 10,
                name,
                outcome: Outcome::Skipped,
                detail: "radius 0".into(),
            };
        }
        let elements: Vec<(TreePairDiagram, usize)> = self
            .ball()
            .elements()
            .into_iter()
            .filter(|(_, n)| *n <= radius)
            .collect();
        let mut bad = Vec::new();
        let mut max_n = (0, 1);
        let mut max_len = (0, 1);
        for (d, len) in &elements {
            let n = caret_count(d);
            if n > 2 * len + 1 || *len > 12 * n {
                bad.push(d.to_string());
            }
            if *len > 0 && ratio_lt(max_n, (n, *len)) {
                max_n = (n, *len);
            }
            if n > 0 && ratio_lt(max_len, (*len, n)) {
                max_len = (*len, n);
            }
        }
        let mut detail = format!(
            "{} elements within radius {radius}; max N/|w| = {}, max |w|/N = {}",
            elements.len(),
            Ratio(max_n),
            Ratio(max_len)
        );
        if let Some(first) = bad.first() {
            write!(detail, "; {} violations, first {first}", bad.len()).unwrap();
        }
        CriterionResult::new(10, bad.is_empty(), detail)
    }
}

struct Ratio((usize, usize));

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ratio(f, self.0)
    }
}

#[derive(Default)]
struct AtomicCount(std::sync::atomic::AtomicUsize);

impl AtomicCount {
    fn bump(&self) {
        self.0.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    }

    fn get(&self) -> usize {
        self.0.load(std::sync::atomic::Ordering::Relaxed)
    }
}

pub fn verify_all(max_k: usize, ball_radius: usize) -> Result<Summary> {
    Ok(Verifier::new(VerifyConfig::new(max_k, ball_radius))?.run_all())
}

/// A pair of thin trees with a rotation, together with their weights.
struct ThinTriple {
    r: Vec<Sign>,
    s: Vec<Sign>,
    rot: usize,
    diagram: TreePairDiagram,
}

impl ThinTriple {
    fn equations_hold(&self, eps_sign: i64) -> bool {
        check_eq1(&self.r, &self.s).expect("equal lengths")
            && check_eq2_signed(&self.r, &self.s, self.rot, eps_sign)
    }
}

/// All triples `(thin(r), rot, thin(s))` with `n ≥ 2` leaves, source-major.
fn thin_triples(n: usize) -> Vec<ThinTriple> {
    let weights = all_weights(n - 2);
    let trees: Vec<BinaryTree> = weights.iter().map(|w| thin_from_weights(w)).collect();
    let mut out = Vec::with_capacity(trees.len() * trees.len() * n);
    for (r, src) in weights.iter().zip(&trees) {
        for (s, tgt) in weights.iter().zip(&trees) {
            for rot in 1..=n {
                let diagram =
                    TreePairDiagram::new(src.clone(), rot, tgt.clone()).expect("equal leaf counts");
                out.push(ThinTriple {
                    r: r.clone(),
                    s: s.clone(),
                    rot,
                    diagram,
                });
            }
        }
    }
    out
}

fn generator_relations() -> CriterionResult {
    use Letter::{A, B};
    let g = generators();
    let matrix =
        letters_to_matrix(&[A, A]).is_identity() && letters_to_matrix(&[B, B, B]).is_identity();
    let diagram =
        g.a.multiply(&g.a).is_identity() && g.b.multiply(&g.b).multiply(&g.b).is_identity();
    let (pa, pb) = (plmap_from_diagram(&g.a), plmap_from_diagram(&g.b));
    let pl = pl_compose(&pa, &pa) == PlMap::identity()
        && pl_compose(&pl_compose(&pb, &pb), &pb) == PlMap::identity();
    let (qa, qb) = (ppmap_of_letter(A), ppmap_of_letter(B));
    let pp = pp_compose(&qa, &qa) == PpMap::identity()
        && pp_compose(&pp_compose(&qb, &qb), &qb) == PpMap::identity();
    let mark = |ok: bool| if ok { "ok" } else { "FAILS" };
    let detail = format!(
        "a^2 = b^3 = 1 as matrices {}, diagrams {}, PL maps {}, projective maps {}",
        mark(matrix),
        mark(diagram),
        mark(pl),
        mark(pp)
    );
    CriterionResult::new(1, matrix && diagram && pl && pp, detail)
}

fn conjugation_identities() -> CriterionResult {
    let g = generators();
    let c = plmap_from_diagram(&g.big_c);
    let a = plmap_from_diagram(&g.big_a);
    let checks = [
        (
            "b -> C",
            inn_question(&ppmap_of_letter(Letter::B)),
            c.clone(),
        ),
        (
            "a -> CA",
            inn_question(&ppmap_of_letter(Letter::A)),
            pl_compose(&c, &a),
        ),
        (
            "d -> B",
            inn_question(&build_d()),
            plmap_from_diagram(&g.big_b),
        ),
    ];
    let parts: Vec<String> = checks
        .iter()
        .map(|(name, got, want)| match got {
            Ok(f) if f == want => format!("{name} ok"),
            Ok(f) => format!("{name} FAILS (got {f})"),
            Err(e) => format!("{name} FAILS ({e})"),
        })
        .collect();
    let passed = checks.iter().all(|(_, got, want)| got.as_ref() == Ok(want));
    CriterionResult::new(2, passed, parts.join(", "))
}

fn normal_form_diagrams(max_k: usize) -> CriterionResult {
    let words: Vec<NormalWord> = (2..=max_k).flat_map(NormalWord::all_with_k).collect();
    let bad: Vec<String> = words
        .par_iter()
        .filter(|w| word_to_diagram(w) != letters_to_diagram(&w.letters()))
        .map(ToString::to_string)
        .collect();
    let mut detail = format!(
        "{} words with 2 <= k <= {max_k} match the product of generators",
        words.len()
    );
    if let Some(first) = bad.first() {
        detail = format!(
            "{} of {} words differ, first {first}",
            bad.len(),
            words.len()
        );
    }
    CriterionResult::new(3, bad.is_empty(), detail)
}

fn thin_triple_count(max_k: usize, mutation: Option<Mutation>) -> CriterionResult {
    let eps_sign = match mutation {
        Some(Mutation::FlipEpsilonSign) => -1,
        None => 1,
    };
    let (mut counted, mut reduced, mut four_each, mut words) = (true, true, true, true);
    let mut counts = Vec::new();
    for k in 2..=max_k {
        let triples = thin_triples(k + 2);
        let members: Vec<&ThinTriple> = triples
            .par_iter()
            .filter(|t| t.equations_hold(eps_sign))
            .collect();
        let mut per_source: HashMap<&BinaryTree, usize> = HashMap::new();
        for t in &members {
            *per_source.entry(t.diagram.source()).or_default() += 1;
        }
        let found: HashSet<&TreePairDiagram> = members.iter().map(|t| &t.diagram).collect();
        let expected: HashSet<TreePairDiagram> = NormalWord::all_with_k(k)
            .iter()
            .map(word_to_diagram)
            .collect();
        counted &= members.len() == 1 << (k + 2);
        reduced &= members.iter().all(|t| t.diagram.is_reduced());
        four_each &= per_source.len() == 1 << k && per_source.values().all(|&c| c == 4);
        words &= found.len() == expected.len() && expected.iter().all(|d| found.contains(d));
        counts.push(members.len().to_string());
    }

    let small: BTreeSet<TreePairDiagram> = (1..=3)
        .flat_map(TreePairDiagram::all_with_leaves)
        .filter(TreePairDiagram::is_reduced)
        .collect();
    let table = small_table();
    let table_ok = small.len() == 10
        && table.len() == 10
        && table.iter().all(|(w, d)| {
            small.contains(d) && word_to_diagram(w) == *d && letters_to_diagram(&w.letters()) == *d
        });
    let yes = |b: bool| if b { "yes" } else { "NO" };
    let detail = format!(
        "members for k = 2..={max_k}: [{}]; all reduced {}; 4 per source tree {}; \
         equal to the normal form diagrams {}; {} reduced diagrams with <= 3 leaves, table labels {}",
        counts.join(", "),
        yes(reduced),
        yes(four_each),
        yes(words),
        small.len(),
        yes(table_ok)
    );
    CriterionResult::new(
        4,
        counted && reduced && four_each && words && table_ok,
        detail,
    )
}

fn length_bounds(max_k: usize) -> CriterionResult {
    let report = length_bounds_report(max_k, None).expect("bound validated");
    let mut detail = format!(
        "{} words with k <= {max_k}; |w|/N in [{}, {}]",
        report.rows.len(),
        Ratio(report.min_ratio),
        Ratio(report.max_ratio)
    );
    if let Some(first) = report.violations.first() {
        write!(
            detail,
            "; {} violations, first {first}",
            report.violations.len()
        )
        .unwrap();
    }
    CriterionResult::new(5, report.passed(), detail)
}

/// Distinct arrangements of a multiset, in lexicographic order.
fn next_permutation(v: &mut [u64]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("a larger element exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn thin_sequences(max_k: usize) -> CriterionResult {
    let results: Vec<(usize, usize, bool)> = (3..=max_k)
        .into_par_iter()
        .map(|k| {
            let mut exps: Vec<u64> = (1..k as u64).collect();
            exps.push(k as u64 - 1);
            let mut thin = Vec::new();
            loop {
                if thin_witness_exps(&exps).is_some() {
                    thin.push(exps.clone());
                }
                if !next_permutation(&mut exps) {
                    break;
                }
            }
            let mut trees = BTreeSet::new();
            let mut roundtrip = true;
            for e in &thin {
                let seq: Vec<Dyadic> = e.iter().map(|&x| Dyadic::pow2_neg(x)).collect();
                match thin_tree_from_sequence(&seq) {
                    Ok(t) => {
                        roundtrip &=
                            is_thin(&t) && sequence_from_thin_tree(&t).as_ref() == Ok(&seq);
                        trees.insert(t);
                    }
                    Err(_) => roundtrip = false,
                }
            }
            for w in all_weights(k - 2) {
                let t = thin_from_weights(&w);
                roundtrip &= sequence_from_thin_tree(&t)
                    .and_then(|s| thin_tree_from_sequence(&s))
                    .as_ref()
                    == Ok(&t);
            }
            roundtrip &= trees.len() == thin.len();
            (k, thin.len(), roundtrip)
        })
        .collect();
    let ok = results.iter().all(|&(k, n, rt)| n == 1 << (k - 2) && rt);
    let counts: Vec<String> = results.iter().map(|(_, n, _)| n.to_string()).collect();
    let detail = format!(
        "thin sequences for k = 3..={max_k}: [{}]; tree roundtrip {}",
        counts.join(", "),
        if results.iter().all(|r| r.2) {
            "ok"
        } else {
            "FAILS"
        }
    );
    CriterionResult::new(7, ok, detail)
}

/// `?⁻¹` at an endpoint of a dyadic interval. At `1/2` and `1` the value
/// depends on which side the interval lies.
fn inv_endpoint(v: &Dyadic, upper_half: bool) -> ExtRational {
    let half = Dyadic::new(1, 1);
    if *v == half {
        return if upper_half {
            ExtRational::neg_infinity()
        } else {
            ExtRational::infinity()
        };
    }
    if *v == Dyadic::one() {
        return ExtRational::zero();
    }
    minkowski_inv(v).expect("endpoint in [0, 1)")
}

fn minkowski_checks(max_exp: u64) -> CriterionResult {
    let half = Dyadic::new(1, 1);
    let dyadics: Vec<Dyadic> = std::iter::once(Dyadic::zero())
        .chain(
            (1..=max_exp)
                .flat_map(|e| (0..1u64 << (e - 1)).map(move |m| Dyadic::new(2 * m + 1, e))),
        )
        .collect();
    let bad: Vec<String> = dyadics
        .par_iter()
        .filter(|x| {
            let Ok(q) = minkowski_inv(x) else {
                return true;
            };
            if minkowski_q(&q) != **x {
                return true;
            }
            if x.exp() == 0 || **x == half {
                return false;
            }
            let step = Dyadic::new(1, x.exp());
            let upper_half = **x > half;
            let lo = inv_endpoint(&(*x - &step), upper_half);
            let hi = inv_endpoint(&(*x + &step), upper_half);
            !mediant(&lo, &hi).is_ok_and(|m| m == q)
        })
        .map(ToString::to_string)
        .collect();
    let fixed = minkowski_q(&ExtRational::zero()) == Dyadic::zero()
        && minkowski_q(&ExtRational::infinity()) == half
        && minkowski_inv(&half) == Ok(ExtRational::infinity());
    let mut detail = format!(
        "{} dyadics with exponent <= {max_exp}: roundtrip and mediant law; ?(0) = 0, ?(1/0) = 1/2 {}",
        dyadics.len(),
        if fixed { "ok" } else { "FAILS" }
    );
    if let Some(first) = bad.first() {
        write!(detail, "; {} failures, first {first}", bad.len()).unwrap();
    }
    CriterionResult::new(8, bad.is_empty() && fixed, detail)
}

fn free_subgroup(max_len: usize) -> CriterionResult {
    let report = free_subgroup_report(max_len).expect("bound validated");
    let [(_, g), (_, h)] = report.abelianization;
    let detail = format!(
        "{} reduced words of length <= {max_len}, {} trivial, min |image|/length = {}; g -> {g:?}, h -> {h:?}",
        report.rows.len(),
        report.trivial.len(),
        Ratio(report.min_growth)
    );
    CriterionResult::new(9, report.passed(2), detail)
}

/// The diagram as two Graphviz digraphs, one per tree. Source leaves are
/// labelled `1..n` from left to right and each target leaf carries the
/// label of the source leaf sent to it.
pub fn render_tree(d: &TreePairDiagram) -> String {
    let n = d.leaves();
    let mut labels = vec![0; n + 1];
    for i in 1..=n {
        labels[d.sigma(i)] = i;
    }
    let pairing: Vec<String> = (1..=n).map(|i| format!("{i}->{}", d.sigma(i))).collect();
    let mut out = format!("// diagram {d}\n// pairing {}\n", pairing.join(" "));
    render_one(&mut out, "source", d.source(), &|i| i);
    render_one(&mut out, "target", d.target(), &|j| labels[j]);
    out
}

fn render_one(out: &mut String, name: &str, t: &BinaryTree, label: &dyn Fn(usize) -> usize) {
    fn walk(
        out: &mut String,
        t: &BinaryTree,
        next_node: &mut usize,
        next_leaf: &mut usize,
        label: &dyn Fn(usize) -> usize,
    ) -> usize {
        let id = *next_node;
        *next_node += 1;
        match t {
            BinaryTree::Leaf => {
                *next_leaf += 1;
                writeln!(out, "  n{id} [shape=box, label=\"{}\"];", label(*next_leaf)).unwrap();
            }
            BinaryTree::Caret(l, r) => {
                writeln!(out, "  n{id} [shape=point];").unwrap();
                let lid = walk(out, l, next_node, next_leaf, label);
                let rid = walk(out, r, next_node, next_leaf, label);
                writeln!(out, "  n{id} -> n{lid};\n  n{id} -> n{rid};").unwrap();
            }
        }
        id
    }
    writeln!(out, "digraph {name} {{").unwrap();
    walk(out, t, &mut 0, &mut 0, label);
    out.push_str("}\n");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> NormalWord {
        s.parse().unwrap()
    }

    #[test]
    fn carets() {
        assert_eq!(caret_count(&TreePairDiagram::identity()), 0);
        assert_eq!(caret_count(&word_to_diagram(&w("bab"))), 3);
        assert_eq!(caret_count(&word_to_diagram(&w("abab"))), 3);
    }

    #[test]
    fn bfs() {
        let g = generators();
        assert_eq!(
            bfs_length_abc(&TreePairDiagram::identity(), 3).unwrap(),
            Some(0)
        );
        assert_eq!(bfs_length_abc(&g.big_a, 3).unwrap(), Some(1));
        assert_eq!(bfs_length_abc(&g.a, 3).unwrap(), Some(2));
        assert_eq!(bfs_length_abc(&g.a, 1).unwrap(), None);
        assert!(matches!(
            bfs_length_abc(&g.a, 7),
            Err(Error::ExceedsBound(..))
        ));
        let ball = AbcBall::new(2).unwrap();
        assert_eq!(ball.get(&g.a), Some(2));
        assert_eq!(ball.elements()[0], (TreePairDiagram::identity(), 0));
    }

    #[test]
    fn length_rows() {
        let report = length_bounds_report(2, None).unwrap();
        assert!(report.passed());
        let bab = report.rows.iter().find(|r| r.word == w("bab")).unwrap();
        assert_eq!((bab.carets, bab.len_ab, bab.leaves), (3, 3, 4));
        let abab = report.rows.iter().find(|r| r.word == w("abab")).unwrap();
        assert_eq!((abab.carets, abab.len_ab), (3, 4));
        assert_eq!(report.rows.iter().filter(|r| r.word.k() == 2).count(), 16);
        assert!(length_bounds_report(13, None).is_err());
    }

    #[test]
    fn free_subgroup_words() {
        assert_eq!(free_words(2).len(), 12);
        assert!(!free_words(2).contains(&"gG".to_string()));
        let report = free_subgroup_report(2).unwrap();
        let gh = report.rows.iter().find(|r| r.word == "gh").unwrap();
        assert_eq!(gh.image, w("ababaBaB"));
        assert_eq!(report.abelianization, [('g', (0, 2)), ('h', (0, 1))]);
        assert!(report.passed(2));
    }

    #[test]
    fn permutations() {
        let mut v = vec![1, 2, 2];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 3);
    }

    #[test]
    fn small_verification() {
        let summary = verify_all(2, 0).unwrap();
        assert!(summary.passed(), "{summary}");
        assert_eq!(summary.results[9].outcome, Outcome::Skipped);
        assert_eq!(summary.to_string(), verify_all(2, 0).unwrap().to_string());
    }

    #[test]
    fn mutation_breaks_the_count() {
        let mut cfg = VerifyConfig::new(4, 0);
        cfg.mutation = Some(Mutation::FlipEpsilonSign);
        let v = Verifier::new(cfg).unwrap();
        assert_eq!(v.criterion(4).outcome, Outcome::Fail);
        assert_eq!(v.criterion(3).outcome, Outcome::Pass);
    }

    #[test]
    fn dot_output() {
        let id = render_tree(&TreePairDiagram::identity());
        assert_eq!(id.matches("digraph").count(), 2);
        assert_eq!(id.matches("->").count(), 1);
        let a = render_tree(&generators().a);
        assert!(a.contains("// pairing 1->2 2->1"));
        let target = &a[a.find("digraph target").unwrap()..];
        assert!(target.find("label=\"2\"").unwrap() < target.find("label=\"1\"").unwrap());
        let bab = render_tree(&word_to_diagram(&w("bab")));
        assert!(bab.contains("// pairing 1->4 2->1 3->2 4->3"));
        assert_eq!(render_tree(&generators().b), render_tree(&generators().b));
    }
}
