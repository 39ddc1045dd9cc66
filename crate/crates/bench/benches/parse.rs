use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use morphcat::engine::{parse, parse_words, ParseConfig};
use morphcat::lexicon::sample_lexicon;
use morphcat::phonology::{realizations, PhonTemplate};
use morphcat_bench::{INPUTS, WORDS};

fn bench_parse(c: &mut Criterion) {
    let lex = sample_lexicon();
    let cfg = ParseConfig::default();
    let mut group = c.benchmark_group("parse");
    for (name, toks) in INPUTS {
        group.bench_function(*name, |b| {
            b.iter(|| parse(black_box(toks), &lex, &cfg).unwrap())
        });
    }
    group.bench_function("converb_words", |b| {
        b.iter(|| parse_words(black_box(WORDS), &lex, &cfg).unwrap())
    });
    group.finish();
}

fn bench_phonology(c: &mut Criterion) {
    let t = PhonTemplate::parse("(y)ArAk").unwrap();
    c.bench_function("realizations", |b| b.iter(|| realizations(black_box(&t))));
}

criterion_group!(benches, bench_parse, bench_phonology);
criterion_main!(benches);
