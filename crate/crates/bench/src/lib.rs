//! Inputs shared by the benchmarks.

/// Pre-segmented token sequences from the sample lexicon, shortest first.
pub const INPUTS: &[(&str, &[&str])] = &[
    ("kollu", &["kol", "-lu"]),
    ("scope", &["uzun", "kol", "-lu", "gömlek"]),
    ("relative", &["iyi", "oku", "-muş", "çocuk"]),
    ("converb", &["kadın", "-a", "dön", "-erek", "konuş", "-tu"]),
];

/// Plain words for the segmenting front end.
pub const WORDS: &[&str] = &["kadına", "dönerek", "konuştu"];
