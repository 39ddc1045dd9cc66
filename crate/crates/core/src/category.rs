//! Categories and the multi-domain slash operator.
//!
//! A basic category is a `p`-sign bundle (`syn` + `sem`); a derived category
//! is an `f`-sign triple of result, operator and argument. The operator
//! records direction, morpheme type and process type, and it is what gates
//! combination and surface joining.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::features::{
    unify_with, Bindings, FeatureStructure, FeatureValue, RestrList, Sign, TagId, UnifyError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// `\`: the argument is found to the left.
    Left,
    /// `/`: the argument is found to the right.
    Right,
    /// `|`: either side.
    Unspecified,
}

impl Direction {
    pub fn accepts_left(self) -> bool {
        matches!(self, Direction::Left | Direction::Unspecified)
    }

    pub fn accepts_right(self) -> bool {
        matches!(self, Direction::Right | Direction::Unspecified)
    }

    pub fn slash(self) -> char {
        match self {
            Direction::Left => '\\',
            Direction::Right => '/',
            Direction::Unspecified => '|',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Morpheme {
    Free,
    Bound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Affix,
    Concat,
    Clitic,
    Redup,
}

impl fmt::Display for Morpheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Morpheme::Free => "free",
            Morpheme::Bound => "bound",
        })
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Process::Affix => "affix",
            Process::Concat => "concat",
            Process::Clitic => "clitic",
            Process::Redup => "redup",
        })
    }
}

impl FromStr for Morpheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(Morpheme::Free),
            "bound" => Ok(Morpheme::Bound),
            _ => Err(format!("unknown morpheme type `{s}`")),
        }
    }
}

impl FromStr for Process {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "affix" => Ok(Process::Affix),
            "concat" => Ok(Process::Concat),
            "clitic" => Ok(Process::Clitic),
            "redup" => Ok(Process::Redup),
            _ => Err(format!("unknown process type `{s}`")),
        }
    }
}

/// The `(direction, morpheme type, process type)` triple on a slash.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Operator {
    pub direction: Direction,
    pub morpheme: Morpheme,
    pub process: Process,
}

impl Operator {
    pub const fn new(direction: Direction, morpheme: Morpheme, process: Process) -> Self {
        Operator {
            direction,
            morpheme,
            process,
        }
    }

    /// Violations of the operator invariants, if any.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match (self.process, self.morpheme) {
            (Process::Concat, Morpheme::Bound) => {
                out.push("process `concat` requires a free morpheme".to_string())
            }
            (Process::Affix | Process::Clitic | Process::Redup, Morpheme::Free) => out.push(
                format!("process `{}` requires a bound morpheme", self.process),
            ),
            _ => {}
        }
        if self.process == Process::Redup && self.direction != Direction::Right {
            out.push("a reduplicant must precede its stem (direction `/`)".to_string());
        }
        out
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}<{},{}>",
            self.direction.slash(),
            self.morpheme,
            self.process
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    /// `p`-sign bundle with `syn` (g-sign) and `sem` (s-sign) members.
    Basic(FeatureStructure),
    Functor(Box<Functor>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Functor {
    pub res: Category,
    pub op: Operator,
    pub arg: Category,
}

impl Category {
    /// A basic category with only `syn.cat` set.
    pub fn basic(cat: &str) -> Category {
        let syn = FeatureStructure::new(Sign::G).with("cat", FeatureValue::atom(cat));
        Category::Basic(FeatureStructure::new(Sign::P).with("syn", FeatureValue::Struct(syn)))
    }

    pub fn functor(res: Category, op: Operator, arg: Category) -> Category {
        Category::Functor(Box::new(Functor { res, op, arg }))
    }

    pub fn sign(&self) -> Sign {
        match self {
            Category::Basic(_) => Sign::P,
            Category::Functor(_) => Sign::F,
        }
    }

    pub fn as_functor(&self) -> Option<&Functor> {
        match self {
            Category::Functor(f) => Some(f),
            Category::Basic(_) => None,
        }
    }

    /// `syn.cat` of a basic category.
    pub fn cat_name(&self) -> Option<&str> {
        match self {
            Category::Basic(fs) => match fs.get_path("syn.cat") {
                Some(FeatureValue::Atom(a)) => Some(a),
                _ => None,
            },
            Category::Functor(_) => None,
        }
    }

    /// Restriction conditions listed on a basic category (`syn.restr` and
    /// `sem.restr`).
    pub fn restr(&self) -> RestrList {
        let mut out = RestrList::new();
        if let Category::Basic(fs) = self {
            for path in ["syn.restr", "sem.restr"] {
                if let Some(FeatureValue::Restr(r)) = fs.get_path(path) {
                    out = out.union(r);
                }
            }
        }
        out
    }

    /// Every operator in the category, outermost first.
    pub fn operators(&self) -> Vec<Operator> {
        let mut out = Vec::new();
        self.walk(&mut |c| {
            if let Category::Functor(f) = c {
                out.push(f.op);
            }
        });
        out
    }

    /// Visits every sub-category in pre-order (result before argument).
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Category)) {
        f(self);
        if let Category::Functor(fun) = self {
            fun.res.walk(f);
            fun.arg.walk(f);
        }
    }

    pub fn is_tag_free(&self) -> bool {
        let mut free = true;
        self.walk(&mut |c| {
            if let Category::Basic(fs) = c {
                free &= fs.is_tag_free();
            }
        });
        free
    }

    pub(crate) fn map_tags(&mut self, f: &mut impl FnMut(TagId) -> TagId) {
        match self {
            Category::Basic(fs) => fs.map_tags(f),
            Category::Functor(fun) => {
                fun.res.map_tags(f);
                fun.arg.map_tags(f);
            }
        }
    }

    pub(crate) fn visit_tags(&self, f: &mut impl FnMut(TagId, bool)) {
        self.walk(&mut |c| {
            if let Category::Basic(fs) = c {
                fs.visit_tags(f);
            }
        });
    }

    /// Renumbers tags 1.. in order of first occurrence, so that two
    /// categories differing only in fresh tag names compare equal.
    pub fn canonical(&self) -> Category {
        let mut out = self.clone();
        let mut map = HashMap::new();
        out.map_tags(&mut |t| {
            let next = map.len() as TagId + 1;
            *map.entry(t).or_insert(next)
        });
        out
    }

    pub fn resolve(&self, bindings: &Bindings) -> Category {
        match self {
            Category::Basic(fs) => Category::Basic(bindings.resolve_fs(fs)),
            Category::Functor(fun) => {
                Category::functor(fun.res.resolve(bindings), fun.op, fun.arg.resolve(bindings))
            }
        }
    }

    /// Full rendering including features and operator triples, in the
    /// lexicon file syntax.
    pub fn render(&self) -> String {
        let mut out = String::new();
        render_into(self, &mut out);
        out
    }
}

/// Unifies two categories under a shared tag environment. Operators must be
/// identical at every functor level.
pub fn unify_category(
    a: &Category,
    b: &Category,
    bindings: &mut Bindings,
) -> Result<Category, UnifyError> {
    match (a, b) {
        (Category::Basic(x), Category::Basic(y)) => {
            Ok(Category::Basic(unify_with(x, y, bindings)?))
        }
        (Category::Functor(x), Category::Functor(y)) => {
            if x.op != y.op {
                return Err(UnifyError::Clash {
                    path: "op".to_string(),
                    left: x.op.to_string(),
                    right: y.op.to_string(),
                });
            }
            let res = unify_category(&x.res, &y.res, bindings)?;
            let arg = unify_category(&x.arg, &y.arg, bindings)?;
            Ok(Category::functor(res, x.op, arg))
        }
        _ => Err(UnifyError::SignMismatch(a.sign(), b.sign())),
    }
}

/// True iff every restriction condition demanded anywhere in `demand` is
/// listed at the corresponding position of `actual`. Positions that do not
/// line up structurally are left to unification.
pub fn restr_licensed(demand: &Category, actual: &Category) -> bool {
    match (demand, actual) {
        (Category::Basic(_), Category::Basic(_)) => demand.restr().is_subset(&actual.restr()),
        (Category::Functor(d), Category::Functor(a)) => {
            restr_licensed(&d.res, &a.res) && restr_licensed(&d.arg, &a.arg)
        }
        _ => true,
    }
}

/// Short display: `n`, `s\n`, `(s\n)/(s\n)`. Features and operator
/// morpheme/process types are omitted.
impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Basic(_) => f.write_str(self.cat_name().unwrap_or("?")),
            Category::Functor(fun) => {
                write_operand(f, &fun.res)?;
                write!(f, "{}", fun.op.direction.slash())?;
                write_operand(f, &fun.arg)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, c: &Category) -> fmt::Result {
    match c {
        Category::Basic(_) => write!(f, "{c}"),
        Category::Functor(_) => write!(f, "({c})"),
    }
}

fn render_into(c: &Category, out: &mut String) {
    match c {
        Category::Basic(fs) => render_basic(fs, out),
        Category::Functor(fun) => {
            out.push('(');
            render_into(&fun.res, out);
            out.push_str(") ");
            out.push_str(&fun.op.to_string());
            out.push(' ');
            render_into(&fun.arg, out);
        }
    }
}

/// Renders a basic category as `name[path=value,...]`, using the same paths
/// the loader accepts.
fn render_basic(fs: &FeatureStructure, out: &mut String) {
    let name = match fs.get_path("syn.cat") {
        Some(FeatureValue::Atom(a)) => a.clone(),
        _ => "?".to_string(),
    };
    out.push_str(&name);
    let mut feats = Vec::new();
    if let Some(FeatureValue::Struct(syn)) = fs.get("syn") {
        for (k, v) in &syn.features {
            match (k.as_str(), v) {
                ("cat", _) => {}
                ("nprop" | "vprop", FeatureValue::Struct(inner)) => {
                    for (ik, iv) in &inner.features {
                        feats.push(format!("syn.{k}.{ik}={iv}"));
                    }
                }
                ("restr", FeatureValue::Restr(r)) => {
                    for cond in r.iter() {
                        feats.push(format!("syn.restr={cond}"));
                    }
                }
                _ => feats.push(format!("syn.{k}={v}")),
            }
        }
    }
    if let Some(FeatureValue::Struct(sem)) = fs.get("sem") {
        for (k, v) in &sem.features {
            match (k.as_str(), v) {
                ("restr", FeatureValue::Restr(r)) => {
                    for cond in r.iter() {
                        feats.push(format!("sem.restr={cond}"));
                    }
                }
                _ => feats.push(format!("sem.{k}={v}")),
            }
        }
    }
    if !feats.is_empty() {
        out.push('[');
        out.push_str(&feats.join(","));
        out.push(']');
    }
}
