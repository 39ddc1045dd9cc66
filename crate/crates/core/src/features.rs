//! Signed attribute-value matrices and their unification.
//!
//! Every structure carries one of four signs: `g` (grammatical), `s`
//! (semantic), `p` (property, a basic category holding `syn` and `sem`) and
//! `f` (function, a derived category holding `res`, `op` and `arg`). Derived
//! categories are modelled by [`crate::category::Category`]; this module
//! covers the bundles that sit at the leaves of a category.
//!
//! Values may be atomic symbols, the `none` marker, disjunctions of atoms,
//! nested bundles, compound terms such as `has(#2,#1)`, restriction lists,
//! or re-entrancy tags. Tags are resolved through a [`Bindings`]
//! environment so that one binding is visible at every site sharing the tag.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub type TagId = u64;

/// Feature names allowed directly under a `g` bundle.
pub const SYN_FEATURES: &[&str] = &["cat", "nprop", "vprop", "restr"];
/// Nominal agreement features.
pub const NPROP_FEATURES: &[&str] = &["person", "number", "poss", "case", "relative", "form"];
/// Verbal features.
pub const VPROP_FEATURES: &[&str] = &[
    "reflexive",
    "reciprocal",
    "causative",
    "passive",
    "tense",
    "modal",
    "aspect",
    "person",
    "form",
];
/// Feature names allowed under an `s` bundle.
pub const SEM_FEATURES: &[&str] = &["type", "form", "restr"];
/// Feature names of a `p` bundle.
pub const PROP_FEATURES: &[&str] = &["syn", "sem"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    G,
    S,
    P,
    F,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::G => "g",
            Sign::S => "s",
            Sign::P => "p",
            Sign::F => "f",
        })
    }
}

/// Duplicate-free list of licensing conditions, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RestrList(BTreeSet<String>);

impl RestrList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, cond: impl Into<String>) {
        self.0.insert(cond.into());
    }

    pub fn contains(&self, cond: &str) -> bool {
        self.0.contains(cond)
    }

    pub fn is_subset(&self, other: &RestrList) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &RestrList) -> RestrList {
        RestrList(self.0.union(&other.0).cloned().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for RestrList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        RestrList(iter.into_iter().map(Into::into).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureValue {
    Atom(String),
    /// The morphotactic `none` marker: compatible only with `none` or absence.
    None,
    /// At least two atoms; a singleton collapses to `Atom`.
    Disj(BTreeSet<String>),
    Struct(FeatureStructure),
    Compound {
        functor: String,
        args: Vec<FeatureValue>,
    },
    Restr(RestrList),
    Tag(TagId),
}

impl FeatureValue {
    pub fn atom(s: impl Into<String>) -> Self {
        FeatureValue::Atom(s.into())
    }

    /// Builds a disjunction, collapsing a single member to an atom.
    pub fn disj<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = items.into_iter().map(Into::into).collect();
        collapse(set).expect("disjunction must not be empty")
    }

    pub fn is_tag_free(&self) -> bool {
        match self {
            FeatureValue::Tag(_) => false,
            FeatureValue::Struct(fs) => fs.is_tag_free(),
            FeatureValue::Compound { args, .. } => args.iter().all(FeatureValue::is_tag_free),
            _ => true,
        }
    }

    fn contains_tag(&self, tag: TagId) -> bool {
        match self {
            FeatureValue::Tag(t) => *t == tag,
            FeatureValue::Struct(fs) => fs.features.values().any(|v| v.contains_tag(tag)),
            FeatureValue::Compound { args, .. } => args.iter().any(|v| v.contains_tag(tag)),
            _ => false,
        }
    }

    pub(crate) fn map_tags(&mut self, f: &mut impl FnMut(TagId) -> TagId) {
        match self {
            FeatureValue::Tag(t) => *t = f(*t),
            FeatureValue::Struct(fs) => fs.map_tags(f),
            FeatureValue::Compound { args, .. } => args.iter_mut().for_each(|a| a.map_tags(f)),
            _ => {}
        }
    }

    /// Visits tags in depth-first order. `nested` is true for tags inside a
    /// compound term, which refer to a value rather than define a site.
    pub(crate) fn visit_tags(&self, nested: bool, f: &mut impl FnMut(TagId, bool)) {
        match self {
            FeatureValue::Tag(t) => f(*t, nested),
            FeatureValue::Struct(fs) => fs.visit_tags(f),
            FeatureValue::Compound { args, .. } => args.iter().for_each(|a| a.visit_tags(true, f)),
            _ => {}
        }
    }
}

fn collapse(set: BTreeSet<String>) -> Option<FeatureValue> {
    match set.len() {
        0 => None,
        1 => set.into_iter().next().map(FeatureValue::Atom),
        _ => Some(FeatureValue::Disj(set)),
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Atom(a) => f.write_str(a),
            FeatureValue::None => f.write_str("none"),
            FeatureValue::Disj(set) => {
                let parts: Vec<&str> = set.iter().map(String::as_str).collect();
                f.write_str(&parts.join("|"))
            }
            FeatureValue::Struct(fs) => write!(f, "{fs}"),
            FeatureValue::Compound { functor, args } => {
                write!(f, "{functor}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            FeatureValue::Restr(r) => {
                let parts: Vec<&str> = r.iter().collect();
                write!(f, "<{}>", parts.join(","))
            }
            FeatureValue::Tag(t) => write!(f, "#{t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureStructure {
    pub sign: Sign,
    pub features: BTreeMap<String, FeatureValue>,
}

impl FeatureStructure {
    pub fn new(sign: Sign) -> Self {
        FeatureStructure {
            sign,
            features: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: FeatureValue) -> Self {
        self.features.insert(name.into(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&FeatureValue> {
        self.features.get(name)
    }

    /// Follows a dotted path through nested bundles.
    pub fn get_path(&self, path: &str) -> Option<&FeatureValue> {
        let mut parts = path.split('.');
        let mut cur = self.features.get(parts.next()?)?;
        for p in parts {
            match cur {
                FeatureValue::Struct(fs) => cur = fs.features.get(p)?,
                _ => return None,
            }
        }
        Some(cur)
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn is_tag_free(&self) -> bool {
        self.features.values().all(FeatureValue::is_tag_free)
    }

    pub(crate) fn map_tags(&mut self, f: &mut impl FnMut(TagId) -> TagId) {
        self.features.values_mut().for_each(|v| v.map_tags(f));
    }

    pub(crate) fn visit_tags(&self, f: &mut impl FnMut(TagId, bool)) {
        self.features.values().for_each(|v| v.visit_tags(false, f));
    }

    /// Renumbers tags 1.. in order of first occurrence.
    pub fn canonical(&self) -> FeatureStructure {
        let mut out = self.clone();
        let mut map = HashMap::new();
        out.map_tags(&mut |t| {
            let next = map.len() as TagId + 1;
            *map.entry(t).or_insert(next)
        });
        out
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.sign)?;
        for (i, (k, v)) in self.features.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum UnifyError {
    #[error("sign mismatch: cannot unify {0}-sign with {1}-sign")]
    SignMismatch(Sign, Sign),
    #[error("unification failure at `{path}`: {left} vs {right}")]
    Clash {
        path: String,
        left: String,
        right: String,
    },
}

fn clash(path: &str, a: &FeatureValue, b: &FeatureValue) -> UnifyError {
    UnifyError::Clash {
        path: path.to_string(),
        left: a.to_string(),
        right: b.to_string(),
    }
}

fn join_path(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}.{name}")
    }
}

/// Tag bindings accumulated during one unification job.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    map: HashMap<TagId, FeatureValue>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_bound(&self, tag: TagId) -> bool {
        self.map.contains_key(&tag)
    }

    /// Follows a tag chain. Returns the last tag seen and what it points at
    /// (the tag itself when unbound).
    fn walk(&self, v: &FeatureValue) -> (Option<TagId>, FeatureValue) {
        let mut last = None;
        let mut cur = v;
        while let FeatureValue::Tag(t) = cur {
            last = Some(*t);
            match self.map.get(t) {
                Some(next) => cur = next,
                None => break,
            }
        }
        (last, cur.clone())
    }

    fn bind(&mut self, tag: TagId, value: FeatureValue, path: &str) -> Result<(), UnifyError> {
        if value == FeatureValue::Tag(tag) {
            return Ok(());
        }
        if self.resolve(&value).contains_tag(tag) {
            return Err(UnifyError::Clash {
                path: path.to_string(),
                left: format!("#{tag}"),
                right: "cyclic value".to_string(),
            });
        }
        self.map.insert(tag, value);
        Ok(())
    }

    /// Replaces every bound tag by its (recursively resolved) value.
    pub fn resolve(&self, v: &FeatureValue) -> FeatureValue {
        match v {
            FeatureValue::Tag(t) => match self.map.get(t) {
                Some(bound) => self.resolve(bound),
                None => FeatureValue::Tag(*t),
            },
            FeatureValue::Struct(fs) => FeatureValue::Struct(self.resolve_fs(fs)),
            FeatureValue::Compound { functor, args } => FeatureValue::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| self.resolve(a)).collect(),
            },
            other => other.clone(),
        }
    }

    pub fn resolve_fs(&self, fs: &FeatureStructure) -> FeatureStructure {
        FeatureStructure {
            sign: fs.sign,
            features: fs
                .features
                .iter()
                .map(|(k, v)| (k.clone(), self.resolve(v)))
                .collect(),
        }
    }
}

/// Unifies two structures of the same sign. Inputs are not modified.
pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> Result<FeatureStructure, UnifyError> {
    let mut bindings = Bindings::new();
    let out = unify_with(a, b, &mut bindings)?;
    Ok(bindings.resolve_fs(&out))
}

/// Unifies under an explicit tag environment. The result may still hold
/// tags; resolve it through `bindings` once the job is finished.
pub fn unify_with(
    a: &FeatureStructure,
    b: &FeatureStructure,
    bindings: &mut Bindings,
) -> Result<FeatureStructure, UnifyError> {
    unify_fs(a, b, "", bindings)
}

fn unify_fs(
    a: &FeatureStructure,
    b: &FeatureStructure,
    path: &str,
    bindings: &mut Bindings,
) -> Result<FeatureStructure, UnifyError> {
    if a.sign != b.sign {
        return Err(UnifyError::SignMismatch(a.sign, b.sign));
    }
    let mut features = BTreeMap::new();
    let names: BTreeSet<&String> = a.features.keys().chain(b.features.keys()).collect();
    for name in names {
        let value = match (a.features.get(name), b.features.get(name)) {
            (Some(x), Some(y)) => unify_values(x, y, &join_path(path, name), bindings)?,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        };
        features.insert(name.clone(), value);
    }
    Ok(FeatureStructure {
        sign: a.sign,
        features,
    })
}

fn unify_values(
    a: &FeatureValue,
    b: &FeatureValue,
    path: &str,
    bindings: &mut Bindings,
) -> Result<FeatureValue, UnifyError> {
    use FeatureValue::*;

    let (ta, va) = bindings.walk(a);
    let (tb, vb) = bindings.walk(b);

    match (&va, &vb) {
        (Tag(x), Tag(y)) => {
            if x != y {
                bindings.bind(*x, Tag(*y), path)?;
            }
            return Ok(Tag(*y));
        }
        (Tag(x), _) => {
            let target = tb.map(Tag).unwrap_or_else(|| vb.clone());
            bindings.bind(*x, target, path)?;
            return Ok(Tag(*x));
        }
        (_, Tag(y)) => {
            let target = ta.map(Tag).unwrap_or_else(|| va.clone());
            bindings.bind(*y, target, path)?;
            return Ok(Tag(*y));
        }
        _ => {}
    }

    let merged = match (&va, &vb) {
        (None, None) => None,
        (None, _) | (_, None) => return Err(clash(path, &va, &vb)),
        (Atom(x), Atom(y)) => {
            if x != y {
                return Err(clash(path, &va, &vb));
            }
            Atom(x.clone())
        }
        (Atom(x), Disj(set)) | (Disj(set), Atom(x)) => {
            if !set.contains(x) {
                return Err(clash(path, &va, &vb));
            }
            Atom(x.clone())
        }
        (Disj(s), Disj(t)) => {
            collapse(s.intersection(t).cloned().collect()).ok_or_else(|| clash(path, &va, &vb))?
        }
        (Struct(x), Struct(y)) => Struct(unify_fs(x, y, path, bindings)?),
        (
            Compound {
                functor: f,
                args: xs,
            },
            Compound {
                functor: g,
                args: ys,
            },
        ) => {
            if f != g || xs.len() != ys.len() {
                return Err(clash(path, &va, &vb));
            }
            let args = xs
                .iter()
                .zip(ys)
                .enumerate()
                .map(|(i, (x, y))| unify_values(x, y, &format!("{path}/{f}.{i}"), bindings))
                .collect::<Result<Vec<_>, _>>()?;
            Compound {
                functor: f.clone(),
                args,
            }
        }
        (Restr(x), Restr(y)) => Restr(x.union(y)),
        _ => return Err(clash(path, &va, &vb)),
    };

    match (ta, tb) {
        (Some(x), Some(y)) => {
            bindings.bind(y, Tag(x), path)?;
            bindings.bind(x, merged, path)?;
            Ok(Tag(x))
        }
        (Some(t), Option::None) | (Option::None, Some(t)) => {
            bindings.bind(t, merged, path)?;
            Ok(Tag(t))
        }
        (Option::None, Option::None) => Ok(merged),
    }
}

/// True iff every constraint in `a` is satisfied by `b`.
pub fn subsumes(a: &FeatureStructure, b: &FeatureStructure) -> Result<bool, UnifyError> {
    if a.sign != b.sign {
        return Err(UnifyError::SignMismatch(a.sign, b.sign));
    }
    let mut tags = HashMap::new();
    Ok(subsumes_fs(a, b, &mut tags))
}

fn subsumes_fs(
    a: &FeatureStructure,
    b: &FeatureStructure,
    tags: &mut HashMap<TagId, Option<FeatureValue>>,
) -> bool {
    a.sign == b.sign
        && a.features
            .iter()
            .all(|(k, va)| subsumes_value(va, b.features.get(k), tags))
}

fn subsumes_value(
    a: &FeatureValue,
    b: Option<&FeatureValue>,
    tags: &mut HashMap<TagId, Option<FeatureValue>>,
) -> bool {
    use FeatureValue::*;

    if let Tag(t) = a {
        return match tags.get(t) {
            Some(prev) => prev.as_ref() == b,
            Option::None => {
                tags.insert(*t, b.cloned());
                true
            }
        };
    }
    let Some(b) = b else {
        return false;
    };
    match (a, b) {
        (None, None) => true,
        (Atom(x), Atom(y)) => x == y,
        (Disj(s), Atom(y)) => s.contains(y),
        (Disj(s), Disj(t)) => t.is_subset(s),
        (Struct(x), Struct(y)) => subsumes_fs(x, y, tags),
        (
            Compound {
                functor: f,
                args: xs,
            },
            Compound {
                functor: g,
                args: ys,
            },
        ) => {
            f == g
                && xs.len() == ys.len()
                && xs
                    .iter()
                    .zip(ys)
                    .all(|(x, y)| subsumes_value(x, Some(y), tags))
        }
        (Restr(x), Restr(y)) => x.is_subset(y),
        _ => false,
    }
}
