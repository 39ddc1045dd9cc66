mod common;

use morphcat::engine::{parse, ParseConfig};
use morphcat::features::unify;
use morphcat::lexicon::{load_lexicon, sample_lexicon};
use morphcat::phonology::{
    check_redup, is_vowel, realizations, realize, PhonContext, PhonTemplate,
};
use morphcat::semantics::{alpha_equivalent, beta_reduce, ReductionBudget, Term};
use morphcat::Lexicon;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn template() -> impl Strategy<Value = String> {
    let body = prop::collection::vec(
        prop::sample::select(vec!['l', 'r', 'k', 'n', 'H', 'A', 'D']),
        1..4,
    )
    .prop_filter("at most three metas", |cs| {
        cs.iter().filter(|c| c.is_ascii_uppercase()).count() <= 3
    });
    (
        prop::option::of(prop::sample::select(vec!["y", "n", "s"])),
        body,
    )
        .prop_map(|(opt, cs)| {
            let mut s = opt.map(|o| format!("({o})")).unwrap_or_default();
            s.extend(cs);
            s
        })
}

fn host() -> impl Strategy<Value = String> {
    let letters = vec![
        'a', 'e', 'ı', 'i', 'o', 'ö', 'u', 'ü', 'k', 't', 'd', 'l', 'r', 'ş', 'ç', 'p', 'b', 'm',
    ];
    prop::collection::vec(prop::sample::select(letters), 1..7)
        .prop_map(|cs| cs.into_iter().collect::<String>())
        .prop_filter("needs a vowel", |s| s.chars().any(is_vowel))
}

fn term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "c"]).prop_map(Term::constant),
        prop::sample::select(vec!["x", "y"]).prop_map(Term::var),
    ];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            (prop::sample::select(vec!["x", "y", "z"]), inner.clone())
                .prop_map(|(v, b)| Term::abs(v, b)),
            (inner.clone(), prop::collection::vec(inner.clone(), 1..3))
                .prop_map(|(f, a)| Term::app(f, a)),
            (
                prop::sample::select(vec!["p", "q"]),
                prop::collection::vec(inner, 1..3)
            )
                .prop_map(|(h, a)| Term::pred(h, a)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn unify_commutes_and_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_fs(&mut rng, 2);
        let b = common::random_fs(&mut rng, 2);
        prop_assert_eq!(unify(&a, &b).ok(), unify(&b, &a).ok());
        prop_assert_eq!(unify(&a, &a).ok(), Some(a));
    }

    #[test]
    fn realize_is_a_realization(t in template(), h in host(), suffix in any::<bool>()) {
        let tpl = PhonTemplate::parse(&t).unwrap();
        let ctx = if suffix { PhonContext::suffix(&h) } else { PhonContext::prefix(&h) };
        let r = realize(&tpl, &ctx).unwrap();
        prop_assert_eq!(&r, &realize(&tpl, &ctx).unwrap());
        let all = realizations(&tpl);
        prop_assert!(all.contains(&r), "{} not in {:?}", r, all);
        prop_assert!(all.len() <= tpl.realization_bound());
    }

    #[test]
    fn redup_vowel_matches_stem(p in host(), s in host()) {
        if check_redup(&p, &s) {
            let pv = p.chars().find(|c| is_vowel(*c));
            let sv = s.chars().find(|c| is_vowel(*c));
            prop_assert_eq!(pv, sv);
        }
    }

    #[test]
    fn reduction_reaches_normal_form(t in term(4)) {
        if let Ok(n) = beta_reduce(&t, ReductionBudget { max_steps: 500 }) {
            prop_assert!(n.is_normal(), "{} is not normal", n);
            prop_assert_eq!(beta_reduce(&n, ReductionBudget::default()).unwrap(), n.clone());
            prop_assert!(alpha_equivalent(&n, &n.alpha_normalized()));
            prop_assert!(n.free_vars().is_subset(&t.free_vars()));
        }
    }

    #[test]
    fn lexicon_subsets_round_trip(mask in prop::collection::vec(any::<bool>(), 40)) {
        let lex = sample_lexicon();
        let picked: Vec<_> = lex
            .entries()
            .iter()
            .zip(mask.iter().cycle())
            .filter(|(_, &keep)| keep)
            .map(|(e, _)| e.clone())
            .collect();
        let text = Lexicon::new(picked.clone()).render();
        let back = load_lexicon(&text).unwrap().lexicon;
        prop_assert_eq!(back.entries(), &picked[..]);
    }

    #[test]
    fn adding_entries_is_monotone(seed in any::<u64>(), extra in 0usize..40) {
        let full = sample_lexicon();
        let extra = extra % full.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let toks = common::random_tokens(&mut rng, 4);
        let smaller = Lexicon::new(
            full.entries().iter().enumerate().filter(|(i, _)| *i != extra).map(|(_, e)| e.clone()).collect(),
        );
        let cfg = ParseConfig::default();
        if let Ok(small) = parse(&toks, &smaller, &cfg) {
            let big = parse(&toks, &full, &cfg).unwrap();
            let key = |d: &morphcat::Derivation| (d.bracketing(), d.category().canonical(), d.sem().alpha_normalized());
            let bigs: Vec<_> = big.iter().map(key).collect();
            for d in &small {
                prop_assert!(bigs.contains(&key(d)), "{:?} lost {}", toks, d.bracketing());
            }
        }
    }

    #[test]
    fn parse_is_deterministic(seed in any::<u64>()) {
        let lex = sample_lexicon();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let toks = common::random_tokens(&mut rng, 5);
        let cfg = ParseConfig::default();
        if let Ok(a) = parse(&toks, &lex, &cfg) {
            let b = parse(&toks, &lex, &cfg).unwrap();
            let ka: Vec<_> = a.iter().map(|d| d.sort_key()).collect();
            let kb: Vec<_> = b.iter().map(|d| d.sort_key()).collect();
            prop_assert_eq!(ka, kb);
            for d in &a {
                prop_assert!(d.sem().is_normal());
                let leaves: Vec<&str> = d.leaves().iter().map(|l| l.surface.as_str()).collect();
                prop_assert_eq!(leaves.len(), toks.len());
            }
        }
    }
}
