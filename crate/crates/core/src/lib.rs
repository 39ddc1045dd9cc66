//! Morpheme-based combinatory categorial grammar.
//!
//! Lexical entries pair a phonological template with a category built from
//! signed feature structures and a lambda term. Free and bound morphemes are
//! combined by the same chart parser; bound morphemes are realized against
//! the edge word of their host while their semantics may scope over the
//! whole host constituent.
//!
//! ```
//! use morphcat::{parse, sample_lexicon, ParseConfig};
//!
//! let lex = sample_lexicon();
//! let ds = parse(&["uzun", "kol", "-lu", "gömlek"], &lex, &ParseConfig::default()).unwrap();
//! assert_eq!(ds.len(), 2);
//! assert_eq!(ds[0].surface(), "uzun kollu gömlek");
//! ```

pub mod category;
pub mod engine;
pub mod features;
pub mod lexicon;
pub mod phonology;
pub mod segment;
pub mod semantics;
pub mod syntax;

pub use category::{Category, Direction, Functor, Morpheme, Operator, Process};
pub use engine::{
    can_combine, combine, parse, parse_lattice, parse_words, resolve_token, ChartItem, Combinator,
    CombineError, Derivation, LeafChoice, Origin, ParseConfig, ParseError,
};
pub use features::{unify, FeatureStructure, FeatureValue, RestrList, Sign, UnifyError};
pub use lexicon::{
    load_lexicon, lookup_surface, sample_lexicon, Diagnostic, LexEntry, Lexicon, MorphKind,
    Severity,
};
pub use phonology::{realizations, realize, PhonContext, PhonError, PhonTemplate};
pub use segment::{segment, segment_word, Analysis, Morph, SegmentError};
pub use semantics::{alpha_equivalent, apply_sem, beta_reduce, compose_sem, ReductionBudget, Term};
pub use syntax::{parse_category, parse_file, parse_term, SyntaxError};
