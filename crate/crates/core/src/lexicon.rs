//! Lexical entries, the lexicon file loader and surface lookup.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::category::{Category, Direction, Morpheme, Process};
use crate::features::{
    FeatureStructure, FeatureValue, TagId, NPROP_FEATURES, PROP_FEATURES, SEM_FEATURES,
    SYN_FEATURES, VPROP_FEATURES,
};
use crate::phonology::{realizations, PhonTemplate};
use crate::semantics::Term;
use crate::syntax::{self, RawEntry};

pub type EntryId = usize;

/// Positional class of a morpheme, read off its outermost operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MorphKind {
    Free,
    Suffix,
    Prefix,
    Clitic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    /// Citation form, spelled with meta-phonemes for bound morphemes.
    pub key: String,
    pub phon: PhonTemplate,
    pub cat: Category,
    pub sem: Term,
    pub gloss: Option<String>,
}

impl LexEntry {
    pub fn kind(&self) -> MorphKind {
        let Some(f) = self.cat.as_functor() else {
            return MorphKind::Free;
        };
        match (f.op.morpheme, f.op.process, f.op.direction) {
            (Morpheme::Free, ..) => MorphKind::Free,
            (Morpheme::Bound, Process::Clitic, _) => MorphKind::Clitic,
            (Morpheme::Bound, _, Direction::Right) => MorphKind::Prefix,
            (Morpheme::Bound, ..) => MorphKind::Suffix,
        }
    }

    pub fn is_bound(&self) -> bool {
        self.kind() != MorphKind::Free
    }

    /// How the entry is written in pre-segmented input: `-lH`, `ap-`, `kol`.
    pub fn marked(&self, form: &str) -> String {
        match self.kind() {
            MorphKind::Suffix => format!("-{form}"),
            MorphKind::Prefix => format!("{form}-"),
            MorphKind::Free | MorphKind::Clitic => form.to_string(),
        }
    }

    /// Renders the entry in the lexicon file syntax.
    pub fn render(&self) -> String {
        let mut out = format!(
            "entry {} {{\n  phon: {}\n  cat: {}\n  sem: {}\n",
            self.key,
            quote(&self.phon.to_string()),
            self.cat.render(),
            self.sem
        );
        if let Some(g) = &self.gloss {
            out.push_str(&format!("  gloss: {}\n", quote(g)));
        }
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line: 0,
            col: 0,
            message: message.into(),
        }
    }

    fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(message)
        }
    }

    fn at(mut self, (line, col): (usize, usize)) -> Self {
        self.line = line;
        self.col = col;
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.col, sev, self.message)
    }
}

/// Checks operator invariants, feature vocabulary, tag usage, the phon
/// template and free variables of the semantics.
pub fn validate_entry(e: &LexEntry) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let prefix = format!("entry `{}`", e.key);

    for op in e.cat.operators() {
        for v in op.violations() {
            out.push(Diagnostic::error(format!("{prefix}: operator {op}: {v}")));
        }
    }

    e.cat.walk(&mut |c| {
        if let Category::Basic(fs) = c {
            check_vocabulary(fs, Vocab::Prop, "", &mut |path| {
                out.push(Diagnostic::error(format!(
                    "{prefix}: unknown feature `{path}`"
                )))
            });
        }
    });

    let usage = tag_usage(&e.cat);
    for (tag, (defs, refs)) in &usage {
        if *defs == 0 {
            out.push(Diagnostic::error(format!(
                "{prefix}: dangling tag #{tag} (no feature site defines it)"
            )));
        } else if defs + refs < 2 {
            out.push(Diagnostic::warning(format!(
                "{prefix}: unshared tag #{tag}"
            )));
        }
    }

    if let Err(r) = e.phon.check() {
        out.push(Diagnostic::error(format!("{prefix}: phon: {r}")));
    }

    let free = e.sem.free_vars();
    if !free.is_empty() {
        let names: Vec<&str> = free.iter().map(String::as_str).collect();
        out.push(Diagnostic::error(format!(
            "{prefix}: free variable(s) in sem: {}",
            names.join(", ")
        )));
    }
    out
}

#[derive(Clone, Copy)]
enum Vocab {
    Prop,
    Syn,
    Nprop,
    Vprop,
    Sem,
}

fn check_vocabulary(
    fs: &FeatureStructure,
    vocab: Vocab,
    path: &str,
    report: &mut dyn FnMut(String),
) {
    let allowed: &[&str] = match vocab {
        Vocab::Prop => PROP_FEATURES,
        Vocab::Syn => SYN_FEATURES,
        Vocab::Nprop => NPROP_FEATURES,
        Vocab::Vprop => VPROP_FEATURES,
        Vocab::Sem => SEM_FEATURES,
    };
    for (name, value) in &fs.features {
        let full = if path.is_empty() {
            name.clone()
        } else {
            format!("{path}.{name}")
        };
        if !allowed.contains(&name.as_str()) {
            report(full);
            continue;
        }
        let inner = match (vocab, name.as_str()) {
            (Vocab::Prop, "syn") => Some(Vocab::Syn),
            (Vocab::Prop, "sem") => Some(Vocab::Sem),
            (Vocab::Syn, "nprop") => Some(Vocab::Nprop),
            (Vocab::Syn, "vprop") => Some(Vocab::Vprop),
            _ => None,
        };
        match (inner, value) {
            (Some(v), FeatureValue::Struct(sub)) => check_vocabulary(sub, v, &full, report),
            (None, FeatureValue::Struct(_)) => report(format!("{full} (unexpected bundle)")),
            _ => {}
        }
    }
}

/// Per tag: (defining feature sites, references inside compound values).
fn tag_usage(cat: &Category) -> BTreeMap<TagId, (usize, usize)> {
    let mut usage: BTreeMap<TagId, (usize, usize)> = BTreeMap::new();
    cat.visit_tags(&mut |t, nested| {
        let slot = usage.entry(t).or_default();
        if nested {
            slot.1 += 1;
        } else {
            slot.0 += 1;
        }
    });
    usage
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InstantiateError {
    #[error("entry `{key}`: dangling tag #{tag}")]
    DanglingTag { key: String, tag: TagId },
}

static NEXT_TAG: AtomicU64 = AtomicU64::new(1 << 32);
static NEXT_USE: AtomicU64 = AtomicU64::new(1);

/// Copies an entry with fresh tag ids and fresh semantic variable names, so
/// that two uses of the same entry never share bindings.
pub fn instantiate_entry(entry: &LexEntry) -> Result<LexEntry, InstantiateError> {
    if let Some((tag, _)) = tag_usage(&entry.cat)
        .into_iter()
        .find(|(_, (defs, _))| *defs == 0)
    {
        return Err(InstantiateError::DanglingTag {
            key: entry.key.clone(),
            tag,
        });
    }
    let mut out = entry.clone();
    let mut renamed = HashMap::new();
    out.cat.map_tags(&mut |t| {
        *renamed
            .entry(t)
            .or_insert_with(|| NEXT_TAG.fetch_add(1, Ordering::Relaxed))
    });
    let use_id = NEXT_USE.fetch_add(1, Ordering::Relaxed);
    out.sem = entry.sem.alpha_renamed(&|i| format!("_{use_id}_{i}"));
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    by_key: BTreeMap<String, Vec<EntryId>>,
    by_surface: BTreeMap<String, Vec<EntryId>>,
}

/// A successfully loaded lexicon with any warnings raised on the way.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub lexicon: Lexicon,
    pub warnings: Vec<Diagnostic>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexEntry>) -> Lexicon {
        let mut lex = Lexicon::default();
        for e in entries {
            lex.push(e);
        }
        lex
    }

    fn push(&mut self, e: LexEntry) {
        let id = self.entries.len();
        self.by_key.entry(e.key.clone()).or_default().push(id);
        for surface in realizations(&e.phon) {
            self.by_surface.entry(surface).or_default().push(id);
        }
        self.entries.push(e);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn entry(&self, id: EntryId) -> &LexEntry {
        &self.entries[id]
    }

    pub fn by_key(&self, key: &str) -> &[EntryId] {
        self.by_key.get(key).map_or(&[], Vec::as_slice)
    }

    /// Every indexed surface form with the entries realizing it.
    pub fn surfaces(&self) -> impl Iterator<Item = (&str, &[EntryId])> {
        self.by_surface
            .iter()
            .map(|(s, ids)| (s.as_str(), ids.as_slice()))
    }

    /// Entry ids whose template can surface as `surface` (no hyphen handling).
    pub fn ids_for_surface(&self, surface: &str) -> &[EntryId] {
        self.by_surface.get(surface).map_or(&[], Vec::as_slice)
    }

    /// Renders the whole lexicon in the file syntax.
    pub fn render(&self) -> String {
        self.entries
            .iter()
            .map(LexEntry::render)
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Parses, validates and indexes a lexicon file. Any error-severity
/// diagnostic makes the whole load fail with the full diagnostic list.
pub fn load_lexicon(text: &str) -> Result<Loaded, Vec<Diagnostic>> {
    let raw = syntax::parse_file(text).map_err(|e| {
        vec![Diagnostic::error(format!("syntax error: {}", e.message)).at((e.line, e.col))]
    })?;
    let mut diags = Vec::new();
    let mut entries = Vec::new();
    let mut seen: BTreeSet<(String, Category)> = BTreeSet::new();
    for r in raw {
        let RawEntry {
            key,
            phon,
            phon_pos,
            cat,
            sem,
            gloss,
            pos,
        } = r;
        let phon = match PhonTemplate::parse(&phon) {
            Ok(p) => p,
            Err(e) => {
                diags.push(Diagnostic::error(format!("entry `{key}`: {e}")).at(phon_pos));
                continue;
            }
        };
        let entry = LexEntry {
            key,
            phon,
            cat,
            sem,
            gloss,
        };
        diags.extend(validate_entry(&entry).into_iter().map(|d| d.at(pos)));
        if !seen.insert((entry.key.clone(), entry.cat.canonical())) {
            diags.push(
                Diagnostic::warning(format!("entry `{}`: duplicate key and category", entry.key))
                    .at(pos),
            );
        }
        entries.push(entry);
    }
    if diags.iter().any(Diagnostic::is_error) {
        return Err(diags);
    }
    Ok(Loaded {
        lexicon: Lexicon::new(entries),
        warnings: diags,
    })
}

/// All entries that can surface as `surface` (a leading `-` is ignored),
/// each freshly instantiated and paired with the matched realization.
pub fn lookup_surface(surface: &str, lex: &Lexicon) -> Vec<(LexEntry, String)> {
    let form = surface.strip_prefix('-').unwrap_or(surface);
    lex.ids_for_surface(form)
        .iter()
        .filter_map(|&id| {
            instantiate_entry(lex.entry(id))
                .ok()
                .map(|e| (e, form.to_string()))
        })
        .collect()
}

/// The lexicon shipped with the crate: the Turkish fragment used in the
/// examples and tests.
pub const SAMPLE_LEXICON: &str = include_str!("../data/sample.lex");

pub fn sample_lexicon() -> Lexicon {
    load_lexicon(SAMPLE_LEXICON)
        .expect("bundled sample lexicon is valid")
        .lexicon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_category;

    const LH: &str = r#"entry lH { phon: "lH" cat: ((n[person=none,number=none,poss=none,case=none,relative=none,form=common,sem.form=has(#2,#1)]) /<free,concat> n[form=common|proper,sem.form=#2]) \<bound,affix> n[person=none,number=singular,poss=none,case=none,relative=none,form=common,sem.form=#1] sem: \q.\r.r(y,has(q)) }"#;

    fn entry(cat: &str, sem: &str) -> LexEntry {
        LexEntry {
            key: "x".into(),
            phon: PhonTemplate::parse("x").unwrap(),
            cat: parse_category(cat).unwrap(),
            sem: syntax::parse_term(sem).unwrap(),
            gloss: None,
        }
    }

    #[test]
    fn loads_lh_entry() {
        let loaded = load_lexicon(LH).unwrap();
        assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);
        let lex = loaded.lexicon;
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.entry(0).key, "lH");
        for s in ["lı", "li", "lu", "lü"] {
            assert_eq!(lex.ids_for_surface(s), &[0]);
        }
        assert!(validate_entry(lex.entry(0)).is_empty());
    }

    #[test]
    fn empty_input_is_empty_lexicon() {
        assert!(load_lexicon("").unwrap().lexicon.is_empty());
        assert!(load_lexicon("  // nothing here\n")
            .unwrap()
            .lexicon
            .is_empty());
    }

    #[test]
    fn bound_concat_is_rejected() {
        let src = r#"entry x { phon: "x" cat: (n) \<bound,concat> n sem: \a.a }"#;
        let diags = load_lexicon(src).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].is_error());
        assert!(diags[0].message.contains("concat"), "{}", diags[0]);
        assert_eq!((diags[0].line, diags[0].col), (1, 1));
    }

    #[test]
    fn unknown_feature_is_an_error() {
        let diags = validate_entry(&entry("n[gender=f]", "a"));
        assert_eq!(diags.len(), 1);
        assert!(
            diags[0]
                .message
                .contains("unknown feature `syn.nprop.gender`"),
            "{}",
            diags[0]
        );
    }

    #[test]
    fn single_tag_occurrence_warns() {
        let diags = validate_entry(&entry("(n[case=#2]) /<free,concat> n", "\\p.p"));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warning);
        assert!(diags[0].message.contains("unshared tag #2"));
    }

    #[test]
    fn dangling_tag_is_an_error_and_blocks_instantiation() {
        let e = entry("n[sem.form=has(#3)]", "a");
        let diags = validate_entry(&e);
        assert!(diags
            .iter()
            .any(|d| d.is_error() && d.message.contains("dangling tag #3")));
        assert_eq!(
            instantiate_entry(&e),
            Err(InstantiateError::DanglingTag {
                key: "x".into(),
                tag: 3
            })
        );
    }

    #[test]
    fn free_variables_are_reported() {
        let mut e = entry("n", "a");
        e.sem = Term::var("loose");
        assert!(validate_entry(&e)[0].message.contains("free variable"));
    }

    #[test]
    fn instantiation_is_fresh_and_preserves_sharing() {
        let lex = load_lexicon(LH).unwrap().lexicon;
        let a = instantiate_entry(lex.entry(0)).unwrap();
        let b = instantiate_entry(lex.entry(0)).unwrap();
        let tags = |e: &LexEntry| {
            let mut v = Vec::new();
            e.cat.visit_tags(&mut |t, _| v.push(t));
            v
        };
        let (ta, tb) = (tags(&a), tags(&b));
        assert_eq!(ta.len(), 4);
        assert!(ta.iter().all(|t| !tb.contains(t)));
        // Same sharing pattern as the original.
        assert_eq!(a.cat.canonical(), lex.entry(0).cat.canonical());
        assert!(crate::semantics::alpha_equivalent(
            &a.sem,
            &lex.entry(0).sem
        ));
        assert_ne!(a.sem, b.sem);
    }

    #[test]
    fn lookup_strips_hyphen() {
        let lex = load_lexicon(LH).unwrap().lexicon;
        let hits = lookup_surface("-lu", &lex);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0.key, "lH");
        assert_eq!(hits[0].1, "lu");
        assert!(lookup_surface("xyz", &lex).is_empty());
    }

    #[test]
    fn duplicate_key_and_category_warns() {
        let src = "entry a { phon: \"a\" cat: n sem: a }\nentry a { phon: \"a\" cat: n sem: b }";
        let loaded = load_lexicon(src).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert_eq!(loaded.warnings[0].line, 2);
        assert_eq!(loaded.lexicon.len(), 2);
    }

    #[test]
    fn syntax_error_has_position() {
        let diags = load_lexicon("entry a { phon: \"a\"\n cat: n[ sem: a }").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].line, 2);
    }

    #[test]
    fn sample_lexicon_is_clean() {
        let loaded = load_lexicon(SAMPLE_LEXICON).unwrap();
        assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);
    }

    #[test]
    fn render_round_trips() {
        let lex = sample_lexicon();
        let again = load_lexicon(&lex.render()).unwrap().lexicon;
        assert_eq!(again.entries(), lex.entries());
    }

    #[test]
    fn morph_kinds() {
        let lex = sample_lexicon();
        let kind = |k: &str| lex.entry(lex.by_key(k)[0]).kind();
        assert_eq!(kind("kol"), MorphKind::Free);
        assert_eq!(kind("lH"), MorphKind::Suffix);
        assert_eq!(kind("ap"), MorphKind::Prefix);
        assert_eq!(kind("dA"), MorphKind::Clitic);
        assert_eq!(kind("uzun"), MorphKind::Free);
    }
}
