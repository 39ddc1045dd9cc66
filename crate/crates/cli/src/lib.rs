//! Command dispatch for the `morphcat` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use morphcat::engine::{
    parse, parse_words, ChartItem, Combinator, Derivation, Origin, ParseConfig, ParseError,
};
use morphcat::lexicon::{load_lexicon, Lexicon, Loaded, SAMPLE_LEXICON};
use morphcat::phonology::{realize, PhonContext};
use morphcat::segment::{display_analysis, segment};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_EMPTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Tree,
    Sem,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "morphcat",
    version,
    about = "Morpheme-based CCG parser for Turkish"
)]
pub struct Cli {
    /// Lexicon file; the bundled sample lexicon when omitted.
    #[arg(short, long, global = true, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a morpheme sequence (`kol -lu`) or, with --words, plain words.
    Parse {
        /// Treat inputs as surface words and segment them first.
        #[arg(long)]
        words: bool,
        /// Keep only derivations with this root category, e.g. `s\n`.
        #[arg(long)]
        goal: Option<String>,
        /// Enabled combinators, comma separated (fa,ba,fxc,bxc,fc,bc).
        #[arg(long, value_delimiter = ',')]
        combinators: Option<Vec<Combinator>>,
        /// Disable restriction licensing.
        #[arg(long)]
        no_restr: bool,
        #[arg(required = true, allow_hyphen_values = true)]
        tokens: Vec<String>,
    },
    /// Show every morpheme analysis of each word.
    Segment {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Realize the phon template of KEY after HOST.
    Realize { key: String, host: String },
    /// Lexicon maintenance.
    Lex {
        #[command(subcommand)]
        action: LexAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum LexAction {
    /// Report diagnostics for the lexicon file.
    Validate,
}

/// Options of `parse` that take a value.
const VALUED: &[&str] = &["-l", "--lexicon", "--format", "--goal", "--combinators"];
const SWITCHES: &[&str] = &["--words", "--no-restr", "-h", "--help"];

/// Moves every unrecognized argument of `parse` behind `--`, so that
/// hyphen-marked suffixes such as `-lu` are never read as flags.
pub fn normalize_args(args: Vec<OsString>) -> Vec<OsString> {
    let strs: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let Some(cmd) = strs.iter().position(|a| a == "parse") else {
        return args;
    };
    // `parse` must be the subcommand, not the value of a preceding option.
    if cmd > 0 && VALUED.contains(&strs[cmd - 1].as_str()) {
        return args;
    }
    let mut flags: Vec<OsString> = args[..=cmd].to_vec();
    let mut tokens = Vec::new();
    let mut i = cmd + 1;
    while i < strs.len() {
        let a = strs[i].as_str();
        if a == "--" {
            tokens.extend(args[i + 1..].iter().cloned());
            break;
        }
        let name = a.split('=').next().unwrap_or(a);
        if VALUED.contains(&name) && (name.starts_with("--") || a == name) {
            flags.push(args[i].clone());
            if !a.contains('=') && i + 1 < strs.len() {
                i += 1;
                flags.push(args[i].clone());
            }
        } else if SWITCHES.contains(&a) {
            flags.push(args[i].clone());
        } else {
            tokens.push(args[i].clone());
        }
        i += 1;
    }
    flags.push("--".into());
    flags.extend(tokens);
    flags
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonDerivation {
    pub category: String,
    pub sem: String,
    pub surface: String,
    pub tree: JsonNode,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonNode {
    Combined {
        combinator: String,
        left: Box<JsonNode>,
        right: Box<JsonNode>,
    },
    Leaf {
        leaf: String,
        form: String,
    },
}

fn json_node(n: &ChartItem) -> JsonNode {
    match &n.origin {
        Origin::Leaf { key, form, .. } => JsonNode::Leaf {
            leaf: key.clone(),
            form: form.clone(),
        },
        Origin::Combined {
            combinator,
            left,
            right,
        } => JsonNode::Combined {
            combinator: combinator.short_name().to_string(),
            left: Box::new(json_node(left)),
            right: Box::new(json_node(right)),
        },
    }
}

pub fn json_derivation(d: &Derivation) -> JsonDerivation {
    JsonDerivation {
        category: d.category().to_string(),
        sem: d.sem().alpha_normalized().to_string(),
        surface: d.surface().to_string(),
        tree: json_node(&d.root),
    }
}

pub fn render_json(ds: &[JsonDerivation]) -> String {
    serde_json::to_string_pretty(ds).expect("derivations serialize")
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read_lexicon(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        None => Ok(SAMPLE_LEXICON.to_string()),
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", p.display()))),
    }
}

fn load(path: &Option<PathBuf>, err: &mut dyn Write) -> Result<Lexicon, Failure> {
    let text = read_lexicon(path)?;
    match load_lexicon(&text) {
        Ok(Loaded { lexicon, warnings }) => {
            for w in warnings {
                let _ = writeln!(err, "{w}");
            }
            Ok(lexicon)
        }
        Err(diags) => {
            for d in &diags {
                let _ = writeln!(err, "{d}");
            }
            Err(fail(EXIT_USAGE, "lexicon has errors"))
        }
    }
}

/// Runs one command line; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = normalize_args(args.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Parse {
            words,
            goal,
            combinators,
            no_restr,
            tokens,
        } => {
            let lex = load(&cli.lexicon, err)?;
            let mut cfg = ParseConfig {
                goal: goal.clone(),
                restr_licensing: !no_restr,
                ..ParseConfig::default()
            };
            if let Some(cs) = combinators {
                cfg.combinators = cs.iter().copied().collect();
            }
            let toks: Vec<&str> = tokens.iter().map(String::as_str).collect();
            let result = if *words {
                parse_words(&toks, &lex, &cfg)
            } else {
                parse(&toks, &lex, &cfg)
            };
            let ds = result.map_err(|e| match e {
                ParseError::UnknownTokens(_) | ParseError::Segment(_) => {
                    fail(EXIT_USAGE, e.to_string())
                }
                other => fail(EXIT_EMPTY, other.to_string()),
            })?;
            print_derivations(&ds, cli.format, out);
            Ok(if ds.is_empty() { EXIT_EMPTY } else { EXIT_OK })
        }
        Command::Segment { words } => {
            let lex = load(&cli.lexicon, err)?;
            let ws: Vec<&str> = words.iter().map(String::as_str).collect();
            let per_word = segment(&ws, &lex).map_err(|e| fail(EXIT_EMPTY, e.to_string()))?;
            if cli.format == OutputFormat::Json {
                let doc: Vec<serde_json::Value> = ws
                    .iter()
                    .zip(&per_word)
                    .map(|(w, analyses)| {
                        let list: Vec<String> =
                            analyses.iter().map(|a| display_analysis(a, &lex)).collect();
                        serde_json::json!({ "word": w, "analyses": list })
                    })
                    .collect();
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                for (w, analyses) in ws.iter().zip(&per_word) {
                    for a in analyses {
                        let _ = writeln!(out, "{w}\t{}", display_analysis(a, &lex));
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Realize { key, host } => {
            let lex = load(&cli.lexicon, err)?;
            let id = *lex
                .by_key(key)
                .first()
                .ok_or_else(|| fail(EXIT_USAGE, format!("unknown key `{key}`")))?;
            let e = lex.entry(id);
            let ctx = if e.kind() == morphcat::MorphKind::Prefix {
                PhonContext::prefix(host)
            } else {
                PhonContext::suffix(host)
            };
            let surface = realize(&e.phon, &ctx).map_err(|e| fail(EXIT_EMPTY, e.to_string()))?;
            let _ = writeln!(out, "{surface}");
            Ok(EXIT_OK)
        }
        Command::Lex {
            action: LexAction::Validate,
        } => {
            let text = read_lexicon(&cli.lexicon)?;
            let diags = match load_lexicon(&text) {
                Ok(l) => l.warnings,
                Err(d) => d,
            };
            let errors = diags.iter().filter(|d| d.is_error()).count();
            for d in &diags {
                let _ = writeln!(out, "{d}");
            }
            let _ = writeln!(out, "{errors} errors, {} warnings", diags.len() - errors);
            Ok(if errors == 0 { EXIT_OK } else { EXIT_EMPTY })
        }
    }
}

fn print_derivations(ds: &[Derivation], format: OutputFormat, out: &mut dyn Write) {
    match format {
        OutputFormat::Sem => {
            for d in ds {
                let _ = writeln!(out, "{}", d.sem().alpha_normalized());
            }
            if ds.is_empty() {
                let _ = writeln!(out, "0 parses");
            }
        }
        OutputFormat::Json => {
            let doc: Vec<JsonDerivation> = ds.iter().map(json_derivation).collect();
            let _ = writeln!(out, "{}", render_json(&doc));
        }
        OutputFormat::Tree => {
            for (i, d) in ds.iter().enumerate() {
                let _ = writeln!(out, "derivation {}: {}", i + 1, d.bracketing());
                let _ = write!(out, "{}", d.render_tree());
                let _ = writeln!(out);
            }
            let noun = if ds.len() == 1 { "parse" } else { "parses" };
            let _ = writeln!(out, "{} {noun}", ds.len());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(args: &[&str]) -> Vec<String> {
        normalize_args(args.iter().map(OsString::from).collect())
            .into_iter()
            .map(|a| a.into_string().unwrap())
            .collect()
    }

    #[test]
    fn suffix_tokens_move_behind_separator() {
        assert_eq!(
            norm(&[
                "m",
                "parse",
                "-l",
                "x.lex",
                "kol",
                "-lu",
                "--format",
                "sem",
                "--no-restr"
            ]),
            [
                "m",
                "parse",
                "-l",
                "x.lex",
                "--format",
                "sem",
                "--no-restr",
                "--",
                "kol",
                "-lu"
            ]
        );
        assert_eq!(
            norm(&["m", "--format=json", "parse", "ap-", "açık", "--goal=n"]),
            [
                "m",
                "--format=json",
                "parse",
                "--goal=n",
                "--",
                "ap-",
                "açık"
            ]
        );
        assert_eq!(norm(&["m", "segment", "kollu"]), ["m", "segment", "kollu"]);
    }
}
