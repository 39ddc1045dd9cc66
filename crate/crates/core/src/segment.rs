//! Lexicon-driven segmentation of surface words into morphemes.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::category::Process;
use crate::lexicon::{EntryId, Lexicon, MorphKind};
use crate::phonology::{check_redup, realizations, realize, PhonContext};

/// Longest suffix chain tried per word.
const MAX_SUFFIXES: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Morph {
    pub entry: EntryId,
    /// The realization found in the word.
    pub form: String,
}

/// One decomposition of a word, in surface order.
pub type Analysis = Vec<Morph>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SegmentError {
    #[error("no analysis for word `{0}`")]
    NoAnalysis(String),
}

/// `kol`, `-lH@lu`, `ap-`: the entry key, marked for position, with the
/// realized form when it differs from the key.
pub fn display_morph(m: &Morph, lex: &Lexicon) -> String {
    let e = lex.entry(m.entry);
    let base = e.marked(&e.key);
    if m.form == e.key {
        base
    } else {
        format!("{base}@{}", m.form)
    }
}

pub fn display_analysis(a: &Analysis, lex: &Lexicon) -> String {
    a.iter()
        .map(|m| display_morph(m, lex))
        .collect::<Vec<_>>()
        .join(" ")
}

struct Classes {
    stems: Vec<(EntryId, BTreeSet<String>)>,
    prefixes: Vec<(EntryId, BTreeSet<String>)>,
    suffixes: Vec<EntryId>,
}

fn classes(lex: &Lexicon) -> Classes {
    let mut c = Classes {
        stems: Vec::new(),
        prefixes: Vec::new(),
        suffixes: Vec::new(),
    };
    for (id, e) in lex.entries().iter().enumerate() {
        match e.kind() {
            MorphKind::Free | MorphKind::Clitic => c.stems.push((id, realizations(&e.phon))),
            MorphKind::Prefix => c.prefixes.push((id, realizations(&e.phon))),
            MorphKind::Suffix => c.suffixes.push(id),
        }
    }
    c
}

/// Every decomposition of `word` into an optional prefix, a stem, and a
/// chain of suffixes whose realizations agree with the host built so far.
pub fn segment_word(word: &str, lex: &Lexicon) -> Vec<Analysis> {
    segment_with(word, lex, &classes(lex))
}

fn segment_with(word: &str, lex: &Lexicon, cls: &Classes) -> Vec<Analysis> {
    let mut out = Vec::new();
    stems(word, lex, cls, &mut out);
    for (id, forms) in &cls.prefixes {
        let e = lex.entry(*id);
        let redup = e
            .cat
            .as_functor()
            .is_some_and(|f| f.op.process == Process::Redup);
        for p in forms {
            let Some(rest) = word.strip_prefix(p.as_str()) else {
                continue;
            };
            if rest.is_empty() {
                continue;
            }
            let ok = if redup {
                check_redup(p, rest)
            } else {
                realize(&e.phon, &PhonContext::prefix(rest)).is_ok_and(|r| &r == p)
            };
            if !ok {
                continue;
            }
            let mut tails = Vec::new();
            stems(rest, lex, cls, &mut tails);
            for t in tails {
                let mut a = vec![Morph {
                    entry: *id,
                    form: p.clone(),
                }];
                a.extend(t);
                out.push(a);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn stems(word: &str, lex: &Lexicon, cls: &Classes, out: &mut Vec<Analysis>) {
    for (id, forms) in &cls.stems {
        for s in forms {
            if word.starts_with(s.as_str()) {
                let mut chain = vec![Morph {
                    entry: *id,
                    form: s.clone(),
                }];
                suffixes(word, s.len(), lex, cls, &mut chain, out);
            }
        }
    }
}

fn suffixes(
    word: &str,
    pos: usize,
    lex: &Lexicon,
    cls: &Classes,
    chain: &mut Analysis,
    out: &mut Vec<Analysis>,
) {
    if pos == word.len() {
        out.push(chain.clone());
        return;
    }
    if chain.len() > MAX_SUFFIXES {
        return;
    }
    let host = &word[..pos];
    for &id in &cls.suffixes {
        let Ok(r) = realize(&lex.entry(id).phon, &PhonContext::suffix(host)) else {
            continue;
        };
        if !r.is_empty() && word[pos..].starts_with(r.as_str()) {
            chain.push(Morph {
                entry: id,
                form: r.clone(),
            });
            suffixes(word, pos + r.len(), lex, cls, chain, out);
            chain.pop();
        }
    }
}

/// Segments each word; fails on the first word with no analysis.
pub fn segment(words: &[&str], lex: &Lexicon) -> Result<Vec<Vec<Analysis>>, SegmentError> {
    let cls = classes(lex);
    words
        .iter()
        .map(|w| {
            let a = segment_with(w, lex, &cls);
            if a.is_empty() {
                Err(SegmentError::NoAnalysis(w.to_string()))
            } else {
                Ok(a)
            }
        })
        .collect()
}
