//! Combinators and the all-derivations chart parser.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::category::{restr_licensed, unify_category, Category, Morpheme, Operator, Process};
use crate::features::{Bindings, UnifyError};
use crate::lexicon::{instantiate_entry, EntryId, Lexicon, MorphKind};
use crate::phonology::{check_redup, join_surfaces, realize, PhonContext, PhonError, PhonTemplate};
use crate::segment::{segment, SegmentError};
use crate::semantics::{beta_reduce_counted, ReductionBudget, SemError, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Combinator {
    ForwardApply,
    BackwardApply,
    ForwardCrossedCompose,
    BackwardCrossedCompose,
    ForwardCompose,
    BackwardCompose,
}

impl Combinator {
    pub const ALL: [Combinator; 6] = [
        Combinator::ForwardApply,
        Combinator::BackwardApply,
        Combinator::ForwardCrossedCompose,
        Combinator::BackwardCrossedCompose,
        Combinator::ForwardCompose,
        Combinator::BackwardCompose,
    ];

    pub const DEFAULT: [Combinator; 3] = [
        Combinator::ForwardApply,
        Combinator::BackwardApply,
        Combinator::ForwardCrossedCompose,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Combinator::ForwardApply => "fa",
            Combinator::BackwardApply => "ba",
            Combinator::ForwardCrossedCompose => "fxc",
            Combinator::BackwardCrossedCompose => "bxc",
            Combinator::ForwardCompose => "fc",
            Combinator::BackwardCompose => "bc",
        }
    }
}

impl fmt::Display for Combinator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("unknown combinator `{0}` (expected one of fa, ba, fxc, bxc, fc, bc)")]
pub struct UnknownCombinator(pub String);

impl FromStr for Combinator {
    type Err = UnknownCombinator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Combinator::ALL
            .into_iter()
            .find(|c| c.short_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownCombinator(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseConfig {
    pub combinators: BTreeSet<Combinator>,
    /// Keep only derivations whose root category displays as this string.
    pub goal: Option<String>,
    pub max_items: usize,
    pub restr_licensing: bool,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig {
            combinators: Combinator::DEFAULT.into_iter().collect(),
            goal: None,
            max_items: 100_000,
            restr_licensing: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Leaf {
        entry: EntryId,
        key: String,
        kind: MorphKind,
        template: PhonTemplate,
        /// The realization matched in the input.
        form: String,
    },
    Combined {
        combinator: Combinator,
        left: Arc<ChartItem>,
        right: Arc<ChartItem>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartItem {
    pub start: usize,
    pub end: usize,
    pub cat: Category,
    pub sem: Term,
    pub surface: String,
    /// Beta steps taken to build this node's semantics.
    pub steps: usize,
    pub origin: Origin,
}

impl ChartItem {
    /// A lexical leaf at `pos`: fresh tags and variables, normalized sem.
    pub fn leaf(
        lex: &Lexicon,
        entry: EntryId,
        form: &str,
        pos: usize,
    ) -> Result<ChartItem, ParseError> {
        let e =
            instantiate_entry(lex.entry(entry)).map_err(|e| ParseError::Lexicon(e.to_string()))?;
        let (sem, steps) = beta_reduce_counted(&e.sem, ReductionBudget::default())?;
        Ok(ChartItem {
            start: pos,
            end: pos + 1,
            surface: form.to_string(),
            cat: e.cat.clone(),
            sem,
            steps,
            origin: Origin::Leaf {
                entry,
                kind: e.kind(),
                key: e.key,
                template: e.phon,
                form: form.to_string(),
            },
        })
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.origin, Origin::Leaf { .. })
    }

    fn edge_leaf(&self, rightmost: bool) -> &ChartItem {
        match &self.origin {
            Origin::Leaf { .. } => self,
            Origin::Combined { left, right, .. } => {
                if rightmost {
                    right.edge_leaf(true)
                } else {
                    left.edge_leaf(false)
                }
            }
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CombineError {
    #[error("spans are not adjacent")]
    NotAdjacent,
    #[error("categories do not fit the {0} schema")]
    Shape(Combinator),
    #[error("operator {0} cannot consume on that side")]
    Direction(Operator),
    #[error("argument lacks a required restriction")]
    Restr,
    #[error("`{prefix}` is not a reduplicant of `{stem}`")]
    Redup { prefix: String, stem: String },
    #[error("`{found}` does not harmonize with its host (expected `{expected}`)")]
    Surface { expected: String, found: String },
    #[error(transparent)]
    Unify(#[from] UnifyError),
    #[error(transparent)]
    Phon(#[from] PhonError),
    #[error(transparent)]
    Sem(#[from] SemError),
}

/// How a combinator matched: which side holds the consuming functor, the
/// demanded and supplied categories, and how to build the result.
struct Plan<'a> {
    functor_left: bool,
    op: Operator,
    demand: &'a Category,
    actual: &'a Category,
    res: &'a Category,
    /// For compositions: the outer operator and argument kept from the
    /// secondary functor.
    kept: Option<(Operator, &'a Category)>,
}

fn plan<'a>(
    left: &'a ChartItem,
    right: &'a ChartItem,
    c: Combinator,
) -> Result<Plan<'a>, CombineError> {
    use Combinator::*;
    let shape = || CombineError::Shape(c);
    let (lf, rf) = (left.cat.as_functor(), right.cat.as_functor());
    let p = match c {
        ForwardApply => {
            let f = lf.ok_or_else(shape)?;
            if !f.op.direction.accepts_right() {
                return Err(CombineError::Direction(f.op));
            }
            Plan {
                functor_left: true,
                op: f.op,
                demand: &f.arg,
                actual: &right.cat,
                res: &f.res,
                kept: None,
            }
        }
        BackwardApply => {
            let f = rf.ok_or_else(shape)?;
            if !f.op.direction.accepts_left() {
                return Err(CombineError::Direction(f.op));
            }
            Plan {
                functor_left: false,
                op: f.op,
                demand: &f.arg,
                actual: &left.cat,
                res: &f.res,
                kept: None,
            }
        }
        ForwardCrossedCompose | ForwardCompose => {
            let (f, g) = (lf.ok_or_else(shape)?, rf.ok_or_else(shape)?);
            if !f.op.direction.accepts_right() {
                return Err(CombineError::Direction(f.op));
            }
            let ok = if c == ForwardCompose {
                g.op.direction.accepts_right()
            } else {
                g.op.direction.accepts_left()
            };
            if !ok {
                return Err(shape());
            }
            Plan {
                functor_left: true,
                op: f.op,
                demand: &f.arg,
                actual: &g.res,
                res: &f.res,
                kept: Some((g.op, &g.arg)),
            }
        }
        BackwardCrossedCompose | BackwardCompose => {
            let (g, f) = (lf.ok_or_else(shape)?, rf.ok_or_else(shape)?);
            if !f.op.direction.accepts_left() {
                return Err(CombineError::Direction(f.op));
            }
            let ok = if c == BackwardCompose {
                g.op.direction.accepts_left()
            } else {
                g.op.direction.accepts_right()
            };
            if !ok {
                return Err(shape());
            }
            Plan {
                functor_left: false,
                op: f.op,
                demand: &f.arg,
                actual: &g.res,
                res: &f.res,
                kept: Some((g.op, &g.arg)),
            }
        }
    };
    Ok(p)
}

fn first_word(s: &str) -> &str {
    s.split(' ').next().unwrap_or(s)
}

fn last_word(s: &str) -> &str {
    s.rsplit(' ').next().unwrap_or(s)
}

/// Checks everything except unification: schema shape, operator direction,
/// restriction licensing, reduplication and bound-morpheme harmony.
fn precheck<'a>(
    left: &'a ChartItem,
    right: &'a ChartItem,
    c: Combinator,
    cfg: &ParseConfig,
) -> Result<Plan<'a>, CombineError> {
    if left.end != right.start {
        return Err(CombineError::NotAdjacent);
    }
    let p = plan(left, right, c)?;
    if cfg.restr_licensing && !restr_licensed(p.demand, p.actual) {
        return Err(CombineError::Restr);
    }
    if p.op.morpheme == Morpheme::Bound {
        let (functor, host) = if p.functor_left {
            (left, right)
        } else {
            (right, left)
        };
        // The morpheme sits on the functor's edge facing the host.
        let leaf = functor.edge_leaf(p.functor_left);
        let (ctx, word) = if p.functor_left {
            let w = first_word(&host.surface);
            (PhonContext::prefix(w), w)
        } else {
            let w = last_word(&host.surface);
            (PhonContext::suffix(w), w)
        };
        if let Origin::Leaf { template, form, .. } = &leaf.origin {
            if p.op.process == Process::Redup {
                if !check_redup(form, word) {
                    return Err(CombineError::Redup {
                        prefix: form.clone(),
                        stem: word.to_string(),
                    });
                }
            } else {
                let expected = realize(template, &ctx)?;
                if &expected != form {
                    return Err(CombineError::Surface {
                        expected,
                        found: form.clone(),
                    });
                }
            }
        }
    }
    Ok(p)
}

pub fn can_combine(left: &ChartItem, right: &ChartItem, c: Combinator, cfg: &ParseConfig) -> bool {
    precheck(left, right, c, cfg).is_ok()
}

pub fn combine(
    left: &Arc<ChartItem>,
    right: &Arc<ChartItem>,
    c: Combinator,
    cfg: &ParseConfig,
) -> Result<ChartItem, CombineError> {
    let p = precheck(left, right, c, cfg)?;
    let mut b = Bindings::new();
    unify_category(p.demand, p.actual, &mut b)?;
    let res = p.res.resolve(&b);
    let cat = match p.kept {
        None => res,
        Some((op, z)) => Category::functor(res, op, z.resolve(&b)),
    };
    let (f, a) = if p.functor_left {
        (left, right)
    } else {
        (right, left)
    };
    let raw = match p.kept {
        None => Term::app(f.sem.clone(), vec![a.sem.clone()]),
        Some(_) => compose_term(&f.sem, &a.sem),
    };
    let (sem, steps) = beta_reduce_counted(&raw, ReductionBudget::default())?;
    Ok(ChartItem {
        start: left.start,
        end: right.end,
        cat,
        sem,
        surface: join_surfaces(&left.surface, &right.surface, &p.op),
        steps,
        origin: Origin::Combined {
            combinator: c,
            left: Arc::clone(left),
            right: Arc::clone(right),
        },
    })
}

/// `\x.f(g(x))` before reduction, with `x` fresh for both terms.
fn compose_term(f: &Term, g: &Term) -> Term {
    let mut avoid = f.free_vars();
    avoid.extend(g.free_vars());
    let mut x = "x".to_string();
    while avoid.contains(&x) {
        x.push('\'');
    }
    let inner = Term::app(g.clone(), vec![Term::var(x.clone())]);
    Term::abs(x.clone(), Term::app(f.clone(), vec![inner]))
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("unknown token(s): {}", .0.join(", "))]
    UnknownTokens(Vec<String>),
    #[error("chart exceeded {0} items")]
    ChartLimit(usize),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Sem(#[from] SemError),
    #[error("lexicon: {0}")]
    Lexicon(String),
}

/// A full-span derivation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub root: Arc<ChartItem>,
}

impl Derivation {
    pub fn category(&self) -> &Category {
        &self.root.cat
    }

    pub fn sem(&self) -> &Term {
        &self.root.sem
    }

    pub fn surface(&self) -> &str {
        &self.root.surface
    }

    /// Leaves in input order.
    pub fn leaves(&self) -> Vec<&ChartItem> {
        fn go<'a>(n: &'a ChartItem, out: &mut Vec<&'a ChartItem>) {
            match &n.origin {
                Origin::Leaf { .. } => out.push(n),
                Origin::Combined { left, right, .. } => {
                    go(left, out);
                    go(right, out);
                }
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }

    /// `[[[uzun kol] lu] gömlek]`
    pub fn bracketing(&self) -> String {
        fn go(n: &ChartItem) -> String {
            match &n.origin {
                Origin::Leaf { form, .. } => form.clone(),
                Origin::Combined { left, right, .. } => format!("[{} {}]", go(left), go(right)),
            }
        }
        go(&self.root)
    }

    /// Categories of the combination steps, bottom-up, left to right.
    pub fn lines(&self) -> Vec<String> {
        fn go(n: &ChartItem, out: &mut Vec<String>) {
            if let Origin::Combined { left, right, .. } = &n.origin {
                go(left, out);
                go(right, out);
                out.push(n.cat.to_string());
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut out);
        out
    }

    /// Total beta steps over every node.
    pub fn beta_steps(&self) -> usize {
        fn go(n: &ChartItem) -> usize {
            n.steps
                + match &n.origin {
                    Origin::Leaf { .. } => 0,
                    Origin::Combined { left, right, .. } => go(left) + go(right),
                }
        }
        go(&self.root)
    }

    /// Tree shape with entry ids and combinators, then category and sem.
    pub fn sort_key(&self) -> (String, String, String) {
        fn go(n: &ChartItem) -> String {
            match &n.origin {
                Origin::Leaf { entry, form, .. } => format!("{entry}:{form}"),
                Origin::Combined {
                    combinator,
                    left,
                    right,
                } => {
                    format!("[{} {} {}]", go(left), go(right), combinator)
                }
            }
        }
        (
            go(&self.root),
            self.root.cat.canonical().render(),
            self.root.sem.alpha_normalized().to_string(),
        )
    }

    /// Indented tree, one node per line: combinator, category, sem, surface.
    pub fn render_tree(&self) -> String {
        fn go(n: &ChartItem, depth: usize, out: &mut String) {
            let pad = "  ".repeat(depth);
            let sem = n.sem.alpha_normalized();
            match &n.origin {
                Origin::Leaf {
                    key, kind, form, ..
                } => {
                    let shown = marked(*kind, form);
                    let label = if form == key {
                        shown
                    } else {
                        format!("{shown} ({key})")
                    };
                    out.push_str(&format!("{pad}{label} := {} : {sem}\n", n.cat));
                }
                Origin::Combined {
                    combinator,
                    left,
                    right,
                } => {
                    out.push_str(&format!(
                        "{pad}{} {} : {sem}  \"{}\"\n",
                        combinator.short_name().to_uppercase(),
                        n.cat,
                        n.surface
                    ));
                    go(left, depth + 1, out);
                    go(right, depth + 1, out);
                }
            }
        }
        let mut out = String::new();
        go(&self.root, 0, &mut out);
        out
    }
}

fn marked(kind: MorphKind, form: &str) -> String {
    match kind {
        MorphKind::Suffix => format!("-{form}"),
        MorphKind::Prefix => format!("{form}-"),
        MorphKind::Free | MorphKind::Clitic => form.to_string(),
    }
}

/// One lexical reading for an input position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LeafChoice {
    pub entry: EntryId,
    pub form: String,
}

/// Readings of a pre-segmented token: `-x` selects suffixes, `x-`
/// prefixes, a bare token free morphemes and clitics.
pub fn resolve_token(token: &str, lex: &Lexicon) -> Vec<LeafChoice> {
    let (form, wanted): (&str, &[MorphKind]) = if let Some(f) = token.strip_prefix('-') {
        (f, &[MorphKind::Suffix])
    } else if let Some(f) = token.strip_suffix('-') {
        (f, &[MorphKind::Prefix])
    } else {
        (token, &[MorphKind::Free, MorphKind::Clitic])
    };
    if form.is_empty() {
        return Vec::new();
    }
    lex.ids_for_surface(form)
        .iter()
        .filter(|&&id| wanted.contains(&lex.entry(id).kind()))
        .map(|&id| LeafChoice {
            entry: id,
            form: form.to_string(),
        })
        .collect()
}

pub fn parse(
    tokens: &[&str],
    lex: &Lexicon,
    cfg: &ParseConfig,
) -> Result<Vec<Derivation>, ParseError> {
    let lattice: Vec<Vec<LeafChoice>> = tokens.iter().map(|t| resolve_token(t, lex)).collect();
    let unknown: Vec<String> = tokens
        .iter()
        .zip(&lattice)
        .filter(|(_, c)| c.is_empty())
        .map(|(t, _)| t.to_string())
        .collect();
    if !unknown.is_empty() {
        return Err(ParseError::UnknownTokens(unknown));
    }
    parse_lattice(&lattice, lex, cfg)
}

/// Parses a sequence of positions, each with its alternative readings.
#[allow(clippy::needless_range_loop)]
pub fn parse_lattice(
    lattice: &[Vec<LeafChoice>],
    lex: &Lexicon,
    cfg: &ParseConfig,
) -> Result<Vec<Derivation>, ParseError> {
    let n = lattice.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut chart: Vec<Vec<Vec<Arc<ChartItem>>>> = vec![vec![Vec::new(); n + 1]; n + 1];
    let mut count = 0usize;
    for (i, choices) in lattice.iter().enumerate() {
        for ch in choices {
            chart[i][i + 1].push(Arc::new(ChartItem::leaf(lex, ch.entry, &ch.form, i)?));
            count += 1;
        }
    }
    if count > cfg.max_items {
        return Err(ParseError::ChartLimit(cfg.max_items));
    }
    for len in 2..=n {
        for start in 0..=n - len {
            let end = start + len;
            let mut cell = Vec::new();
            for mid in start + 1..end {
                for l in &chart[start][mid] {
                    for r in &chart[mid][end] {
                        for &c in &cfg.combinators {
                            if let Ok(item) = combine(l, r, c, cfg) {
                                cell.push(Arc::new(item));
                                count += 1;
                                if count > cfg.max_items {
                                    return Err(ParseError::ChartLimit(cfg.max_items));
                                }
                            }
                        }
                    }
                }
            }
            chart[start][end] = cell;
        }
    }
    let mut out: Vec<Derivation> = chart[0][n]
        .iter()
        .filter(|it| cfg.goal.as_deref().is_none_or(|g| it.cat.to_string() == g))
        .map(|it| Derivation {
            root: Arc::clone(it),
        })
        .collect();
    sort_derivations(&mut out);
    Ok(out)
}

fn sort_derivations(ds: &mut Vec<Derivation>) {
    ds.sort_by_cached_key(Derivation::sort_key);
    ds.dedup_by_key(|d| d.sort_key());
}

/// Parses plain surface words: each word is segmented and every combination
/// of analyses is parsed as a token sequence.
pub fn parse_words(
    words: &[&str],
    lex: &Lexicon,
    cfg: &ParseConfig,
) -> Result<Vec<Derivation>, ParseError> {
    let per_word = segment(words, lex)?;
    let mut sequences: Vec<Vec<String>> = vec![Vec::new()];
    for analyses in &per_word {
        let variants: BTreeSet<Vec<String>> = analyses
            .iter()
            .map(|a| {
                a.iter()
                    .map(|m| lex.entry(m.entry).marked(&m.form))
                    .collect()
            })
            .collect();
        sequences = sequences
            .into_iter()
            .flat_map(|prefix| {
                variants.iter().map(move |v| {
                    let mut s = prefix.clone();
                    s.extend(v.iter().cloned());
                    s
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for seq in sequences {
        let toks: Vec<&str> = seq.iter().map(String::as_str).collect();
        out.extend(parse(&toks, lex, cfg)?);
    }
    sort_derivations(&mut out);
    Ok(out)
}
