//! Recursive-descent reader for the lexicon text format.
//!
//! ```text
//! file      := entry*
//! entry     := "entry" key "{" "phon:" quoted
//!              "cat:" cat "sem:" lambda ["gloss:" quoted] "}"
//! cat       := basic | "(" cat ")" op cat
//! basic     := name "[" featlist "]" | name
//! op        := ("\" | "/" | "|") "<" ("free"|"bound") "," ("affix"|"concat"|"clitic"|"redup") ">"
//! featlist  := feat ("," feat)* ;  feat := path "=" value
//! value     := symbol | "none" | symbol ("|" symbol)+ | "#" digit+
//! lambda    := "\" var "." lambda | appterm
//! ```
//!
//! Two small extensions: a value may also be a compound `f(v1,..,vn)` over
//! values (for `sem.form=has(#2,#1)`), and `//` starts a line comment.

use std::collections::BTreeMap;
use std::fmt;

use crate::category::{Category, Direction, Morpheme, Operator, Process};
use crate::features::{
    FeatureStructure, FeatureValue, RestrList, Sign, NPROP_FEATURES, VPROP_FEATURES,
};
use crate::semantics::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for SyntaxError {}

/// An entry as written, before validation.
#[derive(Clone, Debug)]
pub struct RawEntry {
    pub key: String,
    pub phon: String,
    pub phon_pos: (usize, usize),
    pub cat: Category,
    pub sem: Term,
    pub gloss: Option<String>,
    /// Line and column of the `entry` keyword.
    pub pos: (usize, usize),
}

pub fn parse_file(src: &str) -> Result<Vec<RawEntry>, SyntaxError> {
    let mut r = Reader::new(src);
    let mut out = Vec::new();
    loop {
        r.skip_ws();
        if r.at_end() {
            return Ok(out);
        }
        out.push(r.entry()?);
    }
}

pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut r = Reader::new(src);
    let t = r.lambda(&mut Vec::new())?;
    r.expect_end()?;
    Ok(t)
}

pub fn parse_category(src: &str) -> Result<Category, SyntaxError> {
    let mut r = Reader::new(src);
    let c = r.cat()?;
    r.expect_end()?;
    Ok(c)
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn line_col(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        self.err_at(self.pos, message)
    }

    fn err_at<T>(&self, pos: usize, message: impl Into<String>) -> Result<T, SyntaxError> {
        let (line, col) = self.line_col(pos);
        Err(SyntaxError {
            line,
            col,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with("//") {
                let end = trimmed.find('\n').unwrap_or(trimmed.len());
                self.pos += end;
            } else {
                return;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), |c| format!("`{c}`"));
            self.err(format!("expected `{s}`, found {found}"))
        }
    }

    fn expect_end(&mut self) -> Result<(), SyntaxError> {
        self.skip_ws();
        if self.at_end() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    fn name(&mut self, what: &str) -> Result<String, SyntaxError> {
        self.skip_ws();
        let n = self.take_while(is_name_char);
        if n.is_empty() {
            return self.err(format!("expected {what}"));
        }
        Ok(n.to_string())
    }

    fn symbol(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        let s = self.take_while(is_symbol_char);
        if s.is_empty() {
            return self.err("expected a feature value");
        }
        Ok(s.to_string())
    }

    fn quoted(&mut self) -> Result<String, SyntaxError> {
        self.expect("\"")?;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.err("unterminated string"),
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\')) => out.push(c),
                    _ => return self.err("bad escape in string"),
                },
                Some(c) => out.push(c),
            }
        }
    }

    fn entry(&mut self) -> Result<RawEntry, SyntaxError> {
        self.skip_ws();
        let pos = self.line_col(self.pos);
        if !self.rest().starts_with("entry") || self.rest()[5..].starts_with(is_name_char) {
            return self.err("expected `entry`");
        }
        self.pos += 5;
        self.skip_ws();
        let key = self
            .take_while(|c| !c.is_whitespace() && c != '{')
            .to_string();
        if key.is_empty() {
            return self.err("expected an entry key");
        }
        self.expect("{")?;
        self.expect("phon:")?;
        self.skip_ws();
        let phon_pos = self.line_col(self.pos);
        let phon = self.quoted()?;
        self.expect("cat:")?;
        let cat = self.cat()?;
        self.expect("sem:")?;
        let sem = self.lambda(&mut Vec::new())?;
        let gloss = if self.eat("gloss:") {
            Some(self.quoted()?)
        } else {
            None
        };
        self.expect("}")?;
        Ok(RawEntry {
            key,
            phon,
            phon_pos,
            cat,
            sem,
            gloss,
            pos,
        })
    }

    // ---- lambda terms ----

    fn lambda(&mut self, bound: &mut Vec<String>) -> Result<Term, SyntaxError> {
        if self.eat("\\") {
            let v = self.name("a variable")?;
            self.expect(".")?;
            bound.push(v.clone());
            let body = self.lambda(bound);
            bound.pop();
            return Ok(Term::abs(v, body?));
        }
        self.app_term(bound)
    }

    fn app_term(&mut self, bound: &mut Vec<String>) -> Result<Term, SyntaxError> {
        self.skip_ws();
        let mut term = if self.eat("(") {
            let t = self.lambda(bound)?;
            self.expect(")")?;
            t
        } else {
            let n = self.name("a term")?;
            if bound.contains(&n) {
                Term::Var(n)
            } else {
                Term::Const(n)
            }
        };
        while self.peek() == Some('(') {
            self.bump();
            let mut args = vec![self.lambda(bound)?];
            while self.eat(",") {
                args.push(self.lambda(bound)?);
            }
            self.expect(")")?;
            term = match term {
                Term::Const(head) => Term::Pred { head, args },
                other => Term::app(other, args),
            };
        }
        Ok(term)
    }

    // ---- categories ----

    fn cat(&mut self) -> Result<Category, SyntaxError> {
        if self.eat("(") {
            let res = self.cat()?;
            self.expect(")")?;
            self.skip_ws();
            if !matches!(self.peek(), Some('\\' | '/' | '|')) {
                return Ok(res);
            }
            let op = self.op()?;
            let arg = self.cat()?;
            return Ok(Category::functor(res, op, arg));
        }
        self.basic()
    }

    fn op(&mut self) -> Result<Operator, SyntaxError> {
        self.skip_ws();
        let direction = match self.bump() {
            Some('\\') => Direction::Left,
            Some('/') => Direction::Right,
            Some('|') => Direction::Unspecified,
            _ => return self.err("expected a slash"),
        };
        self.expect("<")?;
        let at = self.pos;
        let morpheme: Morpheme = self
            .name("a morpheme type")?
            .parse()
            .or_else(|e: String| self.err_at(at, e))?;
        self.expect(",")?;
        let at = self.pos;
        let process: Process = self
            .name("a process type")?
            .parse()
            .or_else(|e: String| self.err_at(at, e))?;
        self.expect(">")?;
        Ok(Operator::new(direction, morpheme, process))
    }

    fn basic(&mut self) -> Result<Category, SyntaxError> {
        let name = self.symbol()?;
        let mut builder = BasicBuilder::new(&name);
        if self.eat("[") {
            loop {
                self.skip_ws();
                let at = self.pos;
                let path = self.path()?;
                self.expect("=")?;
                let value = self.value()?;
                if let Err(msg) = builder.set(&path, value) {
                    return self.err_at(at, msg);
                }
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("]")?;
        }
        Ok(Category::Basic(builder.finish()))
    }

    fn path(&mut self) -> Result<Vec<String>, SyntaxError> {
        let mut parts = vec![self.symbol()?];
        while self.peek() == Some('.') {
            self.bump();
            parts.push(self.symbol()?);
        }
        Ok(parts)
    }

    fn value(&mut self) -> Result<FeatureValue, SyntaxError> {
        self.skip_ws();
        if self.peek() == Some('#') {
            self.bump();
            let digits = self.take_while(|c| c.is_ascii_digit());
            return match digits.parse::<u64>() {
                Ok(n) if n > 0 => Ok(FeatureValue::Tag(n)),
                _ => self.err("expected a positive tag number after `#`"),
            };
        }
        let first = self.symbol()?;
        if self.peek() == Some('(') {
            self.bump();
            let mut args = vec![self.value()?];
            while self.eat(",") {
                args.push(self.value()?);
            }
            self.expect(")")?;
            return Ok(FeatureValue::Compound {
                functor: first,
                args,
            });
        }
        if first == "none" {
            return Ok(FeatureValue::None);
        }
        let mut alts = vec![first];
        while self.eat("|") {
            alts.push(self.symbol()?);
        }
        if alts.len() == 1 {
            return Ok(FeatureValue::Atom(alts.pop().unwrap()));
        }
        let n = alts.len();
        let set: std::collections::BTreeSet<String> = alts.into_iter().collect();
        if set.len() != n {
            return self.err("duplicate symbol in disjunction");
        }
        Ok(FeatureValue::Disj(set))
    }
}

/// Accumulates `path=value` pairs into a `p`-sign bundle.
struct BasicBuilder {
    cat: String,
    syn: BTreeMap<String, FeatureValue>,
    sem: BTreeMap<String, FeatureValue>,
}

impl BasicBuilder {
    fn new(cat: &str) -> Self {
        let mut syn = BTreeMap::new();
        syn.insert("cat".to_string(), FeatureValue::atom(cat));
        BasicBuilder {
            cat: cat.to_string(),
            syn,
            sem: BTreeMap::new(),
        }
    }

    /// Expands a short path to its full form under `syn` or `sem`.
    fn expand(&self, path: &[String]) -> Result<Vec<String>, String> {
        let head = path[0].as_str();
        let mut full: Vec<String> = match head {
            "syn" | "sem" => return Ok(path.to_vec()),
            "nprop" | "vprop" | "restr" => vec!["syn".into()],
            "type" => vec!["sem".into()],
            "cat" => return Err("`cat` is given by the category name".into()),
            name if path.len() == 1 => {
                let in_n = NPROP_FEATURES.contains(&name);
                let in_v = VPROP_FEATURES.contains(&name);
                let bundle = match (self.cat.as_str(), in_n, in_v) {
                    (_, true, false) => "nprop",
                    (_, false, true) => "vprop",
                    ("s", _, _) => "vprop",
                    _ => "nprop",
                };
                vec!["syn".into(), bundle.into()]
            }
            _ => vec!["syn".into()],
        };
        full.extend(path.iter().cloned());
        Ok(full)
    }

    fn set(&mut self, path: &[String], value: FeatureValue) -> Result<(), String> {
        let full = self.expand(path)?;
        let (root, rest) = full.split_first().expect("non-empty path");
        if rest.is_empty() {
            return Err(format!("`{root}` needs a feature name"));
        }
        let (map, sign) = if root == "syn" {
            (&mut self.syn, Sign::G)
        } else {
            (&mut self.sem, Sign::S)
        };
        insert_path(map, sign, rest, value, &full.join("."))
    }

    fn finish(self) -> FeatureStructure {
        let mut fs = FeatureStructure::new(Sign::P).with(
            "syn",
            FeatureValue::Struct(FeatureStructure {
                sign: Sign::G,
                features: self.syn,
            }),
        );
        if !self.sem.is_empty() {
            fs = fs.with(
                "sem",
                FeatureValue::Struct(FeatureStructure {
                    sign: Sign::S,
                    features: self.sem,
                }),
            );
        }
        fs
    }
}

fn insert_path(
    map: &mut BTreeMap<String, FeatureValue>,
    sign: Sign,
    path: &[String],
    value: FeatureValue,
    full: &str,
) -> Result<(), String> {
    let (name, rest) = path.split_first().expect("non-empty path");
    if rest.is_empty() {
        if name == "restr" {
            let cond = match value {
                FeatureValue::Atom(a) => a,
                _ => return Err("a `restr` condition must be a single symbol".into()),
            };
            return match map
                .entry(name.clone())
                .or_insert_with(|| FeatureValue::Restr(RestrList::new()))
            {
                FeatureValue::Restr(list) => {
                    list.insert(cond);
                    Ok(())
                }
                _ => Err(format!("`{full}` conflicts with an earlier value")),
            };
        }
        if map.contains_key(name) {
            return Err(format!("duplicate feature `{full}`"));
        }
        map.insert(name.clone(), value);
        return Ok(());
    }
    let slot = map
        .entry(name.clone())
        .or_insert_with(|| FeatureValue::Struct(FeatureStructure::new(sign)));
    match slot {
        FeatureValue::Struct(fs) => insert_path(&mut fs.features, sign, rest, value, full),
        _ => Err(format!("`{full}` conflicts with an earlier value")),
    }
}
