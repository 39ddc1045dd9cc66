//! Phon templates and their surface realization.
//!
//! A template mixes literal phonemes, meta-phonemes and optional segments:
//! `lH`, `DHr`, `(y)lA`. Meta-phonemes are resolved against the host the
//! morpheme attaches to, using the standard Turkish harmony tables.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::category::{Operator, Process};

pub const BACK_VOWELS: [char; 4] = ['a', 'ı', 'o', 'u'];
pub const FRONT_VOWELS: [char; 4] = ['e', 'i', 'ö', 'ü'];
pub const ROUNDED_VOWELS: [char; 4] = ['o', 'u', 'ö', 'ü'];
pub const VOICELESS_FINALS: [char; 8] = ['f', 's', 't', 'k', 'ç', 'ş', 'h', 'p'];
/// Linking consonants of an intensifying reduplicant (`ap-açık`, `bes-belli`).
pub const REDUP_LINKS: [char; 4] = ['p', 's', 'm', 'r'];

pub fn is_vowel(c: char) -> bool {
    BACK_VOWELS.contains(&c) || FRONT_VOWELS.contains(&c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Meta {
    /// High vowel: ı i u ü.
    H,
    /// Low unrounded vowel: a e.
    A,
    /// Dental stop: t d.
    D,
    /// Labial stop: p b. Used for stem-final alternation (`kitaB`).
    B,
}

impl Meta {
    fn from_char(c: char) -> Option<Meta> {
        match c {
            'H' => Some(Meta::H),
            'A' => Some(Meta::A),
            'D' => Some(Meta::D),
            'B' => Some(Meta::B),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Meta::H => 'H',
            Meta::A => 'A',
            Meta::D => 'D',
            Meta::B => 'B',
        }
    }

    fn alternatives(self) -> usize {
        match self {
            Meta::H => 4,
            Meta::A | Meta::D | Meta::B => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Segment {
    Literal(String),
    Meta(Meta),
    Optional(Vec<Segment>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhonTemplate {
    segments: Vec<Segment>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PhonError {
    #[error("no harmony source in host `{0}`")]
    NoHarmonySource(String),
    #[error("empty host")]
    EmptyHost,
    #[error("malformed phon template `{template}`: {reason}")]
    Malformed { template: String, reason: String },
}

impl PhonTemplate {
    pub fn parse(src: &str) -> Result<PhonTemplate, PhonError> {
        let bad = |reason: &str| PhonError::Malformed {
            template: src.to_string(),
            reason: reason.to_string(),
        };
        let mut segments = Vec::new();
        let mut group: Option<Vec<Segment>> = None;
        for c in src.chars() {
            match c {
                '(' => {
                    if group.is_some() {
                        return Err(bad("optional groups cannot nest"));
                    }
                    group = Some(Vec::new());
                }
                ')' => match group.take() {
                    Some(g) if g.is_empty() => return Err(bad("empty optional group")),
                    Some(g) => segments.push(Segment::Optional(g)),
                    None => return Err(bad("unbalanced `)`")),
                },
                c if c.is_whitespace() => return Err(bad("whitespace in template")),
                c => {
                    let target = group.as_mut().unwrap_or(&mut segments);
                    match Meta::from_char(c) {
                        Some(m) => target.push(Segment::Meta(m)),
                        None => match target.last_mut() {
                            Some(Segment::Literal(s)) => s.push(c),
                            _ => target.push(Segment::Literal(c.to_string())),
                        },
                    }
                }
            }
        }
        if group.is_some() {
            return Err(bad("unterminated optional group"));
        }
        let t = PhonTemplate { segments };
        t.check().map_err(|r| bad(&r))?;
        Ok(t)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Structural well-formedness: non-empty, optional groups non-empty and
    /// not nested.
    pub fn check(&self) -> Result<(), String> {
        if self.segments.is_empty() {
            return Err("empty template".into());
        }
        for s in &self.segments {
            if let Segment::Optional(inner) = s {
                if inner.is_empty() {
                    return Err("empty optional group".into());
                }
                if inner.iter().any(|x| matches!(x, Segment::Optional(_))) {
                    return Err("optional groups cannot nest".into());
                }
            }
        }
        Ok(())
    }

    pub fn metas(&self) -> Vec<Meta> {
        let mut out = Vec::new();
        for s in &self.segments {
            match s {
                Segment::Meta(m) => out.push(*m),
                Segment::Optional(inner) => out.extend(inner.iter().filter_map(|x| match x {
                    Segment::Meta(m) => Some(*m),
                    _ => None,
                })),
                Segment::Literal(_) => {}
            }
        }
        out
    }

    pub fn optional_groups(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Optional(_)))
            .count()
    }

    /// True when the template has no meta-phonemes or optional segments.
    pub fn is_literal(&self) -> bool {
        self.segments
            .iter()
            .all(|s| matches!(s, Segment::Literal(_)))
    }

    /// Upper bound on the number of distinct realizations.
    pub fn realization_bound(&self) -> usize {
        self.metas()
            .iter()
            .map(|m| m.alternatives())
            .product::<usize>()
            << self.optional_groups()
    }
}

impl fmt::Display for PhonTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn seg(f: &mut fmt::Formatter<'_>, s: &Segment) -> fmt::Result {
            match s {
                Segment::Literal(l) => f.write_str(l),
                Segment::Meta(m) => write!(f, "{}", m.as_char()),
                Segment::Optional(inner) => {
                    f.write_str("(")?;
                    inner.iter().try_for_each(|x| seg(f, x))?;
                    f.write_str(")")
                }
            }
        }
        self.segments.iter().try_for_each(|s| seg(f, s))
    }
}

/// Which side of the morpheme the host is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Host precedes the morpheme (suffixes, clitics).
    Left,
    /// Host follows the morpheme (prefixes, reduplicants).
    Right,
}

#[derive(Clone, Copy, Debug)]
pub struct PhonContext<'a> {
    pub host: &'a str,
    pub side: Side,
}

impl<'a> PhonContext<'a> {
    pub fn suffix(host: &'a str) -> Self {
        PhonContext {
            host,
            side: Side::Left,
        }
    }

    pub fn prefix(host: &'a str) -> Self {
        PhonContext {
            host,
            side: Side::Right,
        }
    }

    /// The vowel harmony reads from: last vowel of a preceding host, first
    /// vowel of a following one.
    fn harmony_vowel(&self) -> Option<char> {
        match self.side {
            Side::Left => self.host.chars().rev().find(|c| is_vowel(*c)),
            Side::Right => self.host.chars().find(|c| is_vowel(*c)),
        }
    }

    /// The phoneme adjacent to the morpheme.
    fn edge(&self) -> Option<char> {
        match self.side {
            Side::Left => self.host.chars().next_back(),
            Side::Right => self.host.chars().next(),
        }
    }
}

pub fn resolve_metaphoneme(m: Meta, ctx: &PhonContext<'_>) -> Result<char, PhonError> {
    match m {
        Meta::H | Meta::A => {
            let v = ctx
                .harmony_vowel()
                .ok_or_else(|| PhonError::NoHarmonySource(ctx.host.to_string()))?;
            let back = BACK_VOWELS.contains(&v);
            let round = ROUNDED_VOWELS.contains(&v);
            Ok(match (m, back, round) {
                (Meta::A, true, _) => 'a',
                (Meta::A, false, _) => 'e',
                (_, true, false) => 'ı',
                (_, true, true) => 'u',
                (_, false, false) => 'i',
                (_, false, true) => 'ü',
            })
        }
        Meta::D | Meta::B => {
            let edge = ctx.edge().ok_or(PhonError::EmptyHost)?;
            let voiceless = VOICELESS_FINALS.contains(&edge);
            Ok(match (m, voiceless) {
                (Meta::D, true) => 't',
                (Meta::D, false) => 'd',
                (_, true) => 'p',
                (_, false) => 'b',
            })
        }
    }
}

/// Realizes a template against its host. Optional segments surface only
/// when the host's adjacent phoneme is a vowel.
pub fn realize(t: &PhonTemplate, ctx: &PhonContext<'_>) -> Result<String, PhonError> {
    let include_optional = ctx.edge().is_some_and(is_vowel);
    let mut out = String::new();
    for s in &t.segments {
        match s {
            Segment::Optional(inner) => {
                if include_optional {
                    realize_plain(inner, ctx, &mut out)?;
                }
            }
            other => realize_plain(std::slice::from_ref(other), ctx, &mut out)?,
        }
    }
    Ok(out)
}

fn realize_plain(
    segs: &[Segment],
    ctx: &PhonContext<'_>,
    out: &mut String,
) -> Result<(), PhonError> {
    for s in segs {
        match s {
            Segment::Literal(l) => out.push_str(l),
            Segment::Meta(m) => out.push(resolve_metaphoneme(*m, ctx)?),
            Segment::Optional(_) => unreachable!("optional groups do not nest"),
        }
    }
    Ok(())
}

/// Representative hosts covering every harmony class: each vowel as the
/// harmony source, with a vowel, voiced, or voiceless edge.
fn representative_contexts() -> Vec<(String, Side)> {
    let mut out = Vec::new();
    for v in BACK_VOWELS.iter().chain(FRONT_VOWELS.iter()) {
        out.push((v.to_string(), Side::Left));
        out.push((format!("{v}d"), Side::Left));
        out.push((format!("{v}t"), Side::Left));
        out.push((v.to_string(), Side::Right));
        out.push((format!("d{v}"), Side::Right));
        out.push((format!("t{v}"), Side::Right));
    }
    out
}

/// All surface forms the template can take in some context.
pub fn realizations(t: &PhonTemplate) -> BTreeSet<String> {
    representative_contexts()
        .iter()
        .filter_map(|(host, side)| realize(t, &PhonContext { host, side: *side }).ok())
        .collect()
}

/// True iff `prefix` is the stem's onset (if any), its first vowel, and one
/// linking consonant.
pub fn check_redup(prefix: &str, stem: &str) -> bool {
    let Some(vowel) = stem.chars().find(|c| is_vowel(*c)) else {
        return false;
    };
    let mut expected = String::new();
    if let Some(first) = stem.chars().next().filter(|c| !is_vowel(*c)) {
        expected.push(first);
    }
    expected.push(vowel);
    let mut chars = prefix.chars();
    let Some(link) = chars.next_back() else {
        return false;
    };
    chars.as_str() == expected && REDUP_LINKS.contains(&link)
}

/// Affixes and reduplicants fuse with their host; clitics and free
/// morphemes are separated by a space.
pub fn join_surfaces(left: &str, right: &str, op: &Operator) -> String {
    match op.process {
        Process::Affix | Process::Redup => format!("{left}{right}"),
        Process::Clitic | Process::Concat => format!("{left} {right}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{Direction, Morpheme};

    fn tpl(s: &str) -> PhonTemplate {
        PhonTemplate::parse(s).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn resolve_examples() {
        assert_eq!(
            resolve_metaphoneme(Meta::H, &PhonContext::suffix("kol")),
            Ok('u')
        );
        assert_eq!(
            resolve_metaphoneme(Meta::D, &PhonContext::suffix("konuş")),
            Ok('t')
        );
        assert_eq!(
            resolve_metaphoneme(Meta::A, &PhonContext::suffix("ben")),
            Ok('e')
        );
        assert_eq!(
            resolve_metaphoneme(Meta::H, &PhonContext::suffix("krk")),
            Err(PhonError::NoHarmonySource("krk".into()))
        );
        assert_eq!(
            resolve_metaphoneme(Meta::D, &PhonContext::suffix("")),
            Err(PhonError::EmptyHost)
        );
    }

    #[test]
    fn realize_examples() {
        assert_eq!(
            realize(&tpl("lH"), &PhonContext::suffix("kol")).unwrap(),
            "lu"
        );
        assert_eq!(
            realize(&tpl("(y)lA"), &PhonContext::suffix("araba")).unwrap(),
            "yla"
        );
        assert_eq!(
            realize(&tpl("(y)lA"), &PhonContext::suffix("tren")).unwrap(),
            "le"
        );
        assert_eq!(
            realize(&tpl("DHr"), &PhonContext::suffix("yap")).unwrap(),
            "tır"
        );
        assert_eq!(
            realize(&tpl("DH"), &PhonContext::suffix("oku")).unwrap(),
            "du"
        );
        assert_eq!(
            realize(&tpl("(y)ArAk"), &PhonContext::suffix("dön")).unwrap(),
            "erek"
        );
    }

    #[test]
    fn realization_sets() {
        let dhr = realizations(&tpl("DHr"));
        assert_eq!(
            dhr,
            set(&["dır", "dir", "dur", "dür", "tır", "tir", "tur", "tür"])
        );
        assert_eq!(dhr.len(), tpl("DHr").realization_bound());
        assert_eq!(realizations(&tpl("lH")), set(&["lı", "li", "lu", "lü"]));
        assert_eq!(realizations(&tpl("de")), set(&["de"]));
        assert_eq!(realizations(&tpl("(y)A")), set(&["a", "e", "ya", "ye"]));
        assert_eq!(realizations(&tpl("kitaB")), set(&["kitab", "kitap"]));
    }

    #[test]
    fn template_errors() {
        assert!(PhonTemplate::parse("").is_err());
        assert!(PhonTemplate::parse("()a").is_err());
        assert!(PhonTemplate::parse("((y))a").is_err());
        assert!(PhonTemplate::parse("(ya").is_err());
        assert!(PhonTemplate::parse("ya)").is_err());
    }

    #[test]
    fn template_display_round_trips() {
        for s in ["lH", "DHr", "(y)lA", "(y)ArAk", "kitaB", "açık"] {
            assert_eq!(tpl(s).to_string(), s);
        }
    }

    #[test]
    fn redup_examples() {
        assert!(check_redup("ap", "açık"));
        assert!(check_redup("bes", "belli"));
        assert!(!check_redup("ap", "belli"));
        assert!(check_redup("kıp", "kırmızı"));
        assert!(!check_redup("kıt", "kırmızı"));
        assert!(!check_redup("", "açık"));
    }

    #[test]
    fn joining_follows_process() {
        let op = |p| Operator::new(Direction::Left, Morpheme::Bound, p);
        assert_eq!(join_surfaces("kol", "lu", &op(Process::Affix)), "kollu");
        assert_eq!(join_surfaces("ben", "de", &op(Process::Clitic)), "ben de");
        assert_eq!(join_surfaces("ben", "de", &op(Process::Affix)), "bende");
        let concat = Operator::new(Direction::Right, Morpheme::Free, Process::Concat);
        assert_eq!(join_surfaces("uzun", "yol", &concat), "uzun yol");
    }

    #[test]
    fn harmony_tables_are_disjoint() {
        assert!(BACK_VOWELS.iter().all(|v| !FRONT_VOWELS.contains(v)));
    }
}
