#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use morphcat::engine::{combine, resolve_token, ChartItem, Combinator, Derivation, ParseConfig};
use morphcat::features::{FeatureStructure, FeatureValue, RestrList, Sign};
use morphcat::Lexicon;
use rand::seq::SliceRandom;
use rand::Rng;

/// Tokens the random inputs are drawn from: every sample morpheme in at
/// least one realization, plus a few harmony mismatches.
pub const VOCAB: &[&str] = &[
    "uzun", "kol", "-lu", "-li", "gömlek", "kadın", "-a", "dön", "-erek", "konuş", "-tu", "iyi",
    "oku", "-muş", "-du", "çocuk", "ben", "de", "-de", "-da", "ap-", "bes-", "açık", "belli",
    "durum", "yol", "bundan", "başka", "adam", "kitab", "kitap", "-ı", "yap", "-tır",
];

pub fn random_tokens(rng: &mut impl Rng, max_len: usize) -> Vec<&'static str> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect()
}

/// Brute-force enumeration: every binary bracketing of the leaves, every
/// enabled combinator at every node, every lexical reading.
pub fn brute_force(tokens: &[&str], lex: &Lexicon, cfg: &ParseConfig) -> Vec<Derivation> {
    let leaves: Vec<Vec<Arc<ChartItem>>> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            resolve_token(t, lex)
                .into_iter()
                .map(|ch| Arc::new(ChartItem::leaf(lex, ch.entry, &ch.form, i).unwrap()))
                .collect()
        })
        .collect();

    fn trees(
        leaves: &[Vec<Arc<ChartItem>>],
        i: usize,
        j: usize,
        cfg: &ParseConfig,
    ) -> Vec<Arc<ChartItem>> {
        if j == i + 1 {
            return leaves[i].clone();
        }
        let mut out = Vec::new();
        for k in i + 1..j {
            let ls = trees(leaves, i, k, cfg);
            let rs = trees(leaves, k, j, cfg);
            for l in &ls {
                for r in &rs {
                    for c in Combinator::ALL {
                        if !cfg.combinators.contains(&c) {
                            continue;
                        }
                        if let Ok(it) = combine(l, r, c, cfg) {
                            out.push(Arc::new(it));
                        }
                    }
                }
            }
        }
        out
    }

    trees(&leaves, 0, tokens.len(), cfg)
        .into_iter()
        .map(|root| Derivation { root })
        .collect()
}

/// Order-free summary of a derivation set: tree shape, canonical category
/// and alpha-normalized semantics.
pub fn summary(ds: &[Derivation]) -> BTreeSet<(String, String, String)> {
    ds.iter().map(Derivation::sort_key).collect()
}

const FEATS: &[&str] = &["a", "b", "c", "d"];
const ATOMS: &[&str] = &["x", "y", "z"];

pub fn random_value(rng: &mut impl Rng, depth: usize) -> FeatureValue {
    match rng.gen_range(0..if depth == 0 { 4 } else { 5 }) {
        0 => FeatureValue::atom(*ATOMS.choose(rng).unwrap()),
        1 => FeatureValue::None,
        2 => {
            let k = rng.gen_range(2..=3);
            FeatureValue::disj(ATOMS.choose_multiple(rng, k).copied())
        }
        3 => {
            let k = rng.gen_range(1..=2);
            FeatureValue::Restr(
                ["r1", "r2", "r3"]
                    .choose_multiple(rng, k)
                    .copied()
                    .collect::<RestrList>(),
            )
        }
        _ => FeatureValue::Struct(random_fs(rng, depth - 1)),
    }
}

/// Tag-free structure over a tiny vocabulary, so that random pairs
/// overlap often enough to exercise both success and clash paths.
pub fn random_fs(rng: &mut impl Rng, depth: usize) -> FeatureStructure {
    let mut fs = FeatureStructure::new(Sign::G);
    for f in FEATS {
        if rng.gen_bool(0.5) {
            fs.features.insert(f.to_string(), random_value(rng, depth));
        }
    }
    fs
}
