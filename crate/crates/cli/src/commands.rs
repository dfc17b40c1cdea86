use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use ctxbias::biasing::{build_biasing_graph, BiasingGraph, ContactList, GraphConfig, PatternCorpus};
use ctxbias::decoder::{
    beam_decode, load_tagged_corpus, simulate_contact_list, DecodeConfig, PlmContext, Scorer,
    SimulationConfig, TableScorer, ToyJoiner,
};
use ctxbias::g2g::{decode_variants, train_replace_filtered, G2GMap};
use ctxbias::plm::{build_trie, trie_query, trie_query_ge2, PlmProjection};
use ctxbias::tokenizer::{tokenize_sentence, Mode, Vocabulary};

use crate::config::{check_alpha, check_lambda, check_oov, check_positive, check_probability, load_config, Config};
use crate::CliError;

const FORMATS: &str = "\
File formats (UTF-8, one record per line):
  vocab         piece<TAB>logprob              (id = line number)
  contacts      display<TAB>spelling1|spelling2 (bare display = own spelling)
  patterns      weight<TAB>word word @name ...
  g2g map       word<TAB>variant1,variant2,...  (best first)
  graph         AT&T text: src<TAB>dst<TAB>piece<TAB>word<TAB>weight, state<TAB>final
  projection    `d V`, then d rows of 3V reals
  scorer        `T V`, then t<TAB>history pieces<TAB>V+1 log-probs (BLANK last)
                or `toy-joiner T V d` with enc/pred/join/bias rows
  corpus        text<TAB>entity (bare text = no entity)
  config        key=value; keys: vocab patterns contacts g2g proj scorer graph corpus
                lambda beam max_symbols nbest oov_weight order k_g2g p l alpha seed jobs

Exit codes: 0 ok, 1 usage error, 2 data error.";

#[derive(Debug, Parser)]
#[command(name = "ctxbias", version, about = "Contextual-biasing transducer decoding", after_long_help = FORMATS)]
pub(crate) struct Cli {
    /// key=value settings file; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment text read from standard input into WordPieces
    Tokenize(TokenizeArgs),
    /// Build the biasing graph (pattern LM with contacts inlined)
    BuildGraph(BuildGraphArgs),
    /// Print the pieces that extend a prefix into a contact name
    QueryTrie(QueryTrieArgs),
    /// Print identity plus top-k G2G variants for words on standard input
    G2gExpand(G2gExpandArgs),
    /// Randomly rewrite words of standard-input lines with G2G variants
    G2gReplace(G2gReplaceArgs),
    /// Draw per-utterance contact lists from a tagged corpus
    Simulate(SimulateArgs),
    /// Beam-search decode with shallow fusion and optional PLM
    Decode(DecodeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Best,
    Sample,
}

fn lambda_arg(s: &str) -> Result<f64, String> {
    check_lambda(s.parse().map_err(|_| format!("not a number: {s:?}"))?)
}

fn positive_arg(s: &str) -> Result<usize, String> {
    check_positive("value", s.parse().map_err(|_| format!("not a count: {s:?}"))?)
}

fn oov_arg(s: &str) -> Result<f64, String> {
    check_oov(s.parse().map_err(|_| format!("not a number: {s:?}"))?)
}

fn probability_arg(s: &str) -> Result<f64, String> {
    check_probability(s.parse().map_err(|_| format!("not a number: {s:?}"))?)
}

fn alpha_arg(s: &str) -> Result<f64, String> {
    check_alpha(s.parse().map_err(|_| format!("not a number: {s:?}"))?)
}

#[derive(Debug, Args)]
struct TokenizeArgs {
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "best")]
    mode: ModeArg,
    /// n-best size sampled from
    #[arg(long, value_parser = positive_arg)]
    l: Option<usize>,
    /// smoothing exponent on segmentation probabilities
    #[arg(long, value_parser = alpha_arg)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct BuildGraphArgs {
    #[arg(long)]
    patterns: Option<PathBuf>,
    #[arg(long)]
    contacts: Option<PathBuf>,
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// G2G map used to add spelling variants of each name
    #[arg(long)]
    g2g: Option<PathBuf>,
    #[arg(long, value_parser = oov_arg)]
    oov_weight: Option<f64>,
    #[arg(long, value_parser = positive_arg)]
    order: Option<usize>,
    /// G2G variants per word
    #[arg(long)]
    k: Option<usize>,
    /// output file (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QueryTrieArgs {
    #[arg(long)]
    contacts: Option<PathBuf>,
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// space-separated piece strings; empty for the root
    #[arg(long, default_value = "")]
    prefix: String,
    /// query Trie≥2 of the prefix as a history instead
    #[arg(long)]
    ge2: bool,
    #[arg(long)]
    g2g: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Debug, Args)]
struct G2gExpandArgs {
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Debug, Args)]
struct G2gReplaceArgs {
    #[arg(long)]
    map: Option<PathBuf>,
    #[arg(long, value_parser = probability_arg)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// input lines are text<TAB>entity and only entity words are rewritten
    #[arg(long)]
    entity_only: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    g2g: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = positive_arg, default_value = "200")]
    min_size: usize,
    #[arg(long, value_parser = positive_arg, default_value = "400")]
    max_size: usize,
    #[arg(long, value_parser = probability_arg, default_value = "0.5")]
    p_remove: f64,
    #[arg(long, value_parser = probability_arg, default_value = "0.3")]
    p_swap: f64,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    /// scorer file, one per utterance; repeat for several
    #[arg(long)]
    scorer: Vec<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    contacts: Option<PathBuf>,
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// feed the contact-trie PLM embedding into the joiner
    #[arg(long)]
    plm: bool,
    #[arg(long)]
    proj: Option<PathBuf>,
    /// G2G map for the PLM trie's name variants
    #[arg(long)]
    g2g: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = positive_arg)]
    beam: Option<usize>,
    #[arg(long, value_parser = lambda_arg)]
    lambda: Option<f64>,
    #[arg(long, value_parser = positive_arg)]
    nbest: Option<usize>,
    #[arg(long, value_parser = positive_arg)]
    max_symbols: Option<usize>,
    /// utterances decoded in parallel
    #[arg(long, value_parser = positive_arg)]
    jobs: Option<usize>,
}

fn required(flag: Option<PathBuf>, fallback: &Option<PathBuf>, name: &str) -> Result<PathBuf, CliError> {
    flag.or_else(|| fallback.clone())
        .ok_or_else(|| CliError::Usage(format!("missing --{name} (or `{name}` in the config file)")))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn at<T>(path: &Path, r: ctxbias::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_vocab(path: &Path) -> Result<Vocabulary, CliError> {
    at(path, Vocabulary::load(open(path)?))
}

fn load_g2g(path: Option<&PathBuf>) -> Result<Option<G2GMap>, CliError> {
    path.map(|p| at(p, G2GMap::load(open(p)?))).transpose()
}

fn load_contacts(path: &Path, g2g: Option<&G2GMap>, k: usize) -> Result<ContactList, CliError> {
    let contacts = at(path, ContactList::load(open(path)?))?;
    Ok(match g2g {
        Some(map) => contacts.expand_g2g(map, k),
        None => contacts,
    })
}

pub(crate) fn dispatch(cli: Cli, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Tokenize(a) => tokenize(a, &config, stdin, stdout),
        Command::BuildGraph(a) => build_graph(a, &config, stdout),
        Command::QueryTrie(a) => query_trie(a, &config, stdout),
        Command::G2gExpand(a) => g2g_expand(a, &config, stdin, stdout),
        Command::G2gReplace(a) => g2g_replace(a, &config, stdin, stdout),
        Command::Simulate(a) => simulate(a, &config, stdout),
        Command::Decode(a) => decode(a, &config, stdout),
    }
}

fn tokenize(a: TokenizeArgs, c: &Config, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let vocab = load_vocab(&required(a.vocab, &c.vocab, "vocab")?)?;
    let mode = match a.mode {
        ModeArg::Best => Mode::Best,
        ModeArg::Sample => Mode::Sampled {
            l: a.l.unwrap_or(c.l),
            alpha: a.alpha.unwrap_or(c.alpha),
        },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(c.seed));
    for (i, line) in stdin.lines().enumerate() {
        let line = line?;
        let pieces = tokenize_sentence(&line, &vocab, mode, &mut rng)
            .map_err(|e| CliError::Data(format!("input line {}: {e}", i + 1)))?;
        writeln!(out, "{}", vocab.render(&pieces))?;
    }
    Ok(())
}

fn build_graph(a: BuildGraphArgs, c: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let patterns = required(a.patterns, &c.patterns, "patterns")?;
    let contacts = required(a.contacts, &c.contacts, "contacts")?;
    let vocab_path = required(a.vocab, &c.vocab, "vocab")?;
    let vocab = load_vocab(&vocab_path)?;
    let corpus = at(&patterns, PatternCorpus::load(open(&patterns)?))?;
    let contacts = load_contacts(&contacts, None, 0)?;
    let g2g = load_g2g(a.g2g.as_ref().or(c.g2g.as_ref()))?;
    let config = GraphConfig {
        order: a.order.unwrap_or(c.order),
        oov_weight: a.oov_weight.unwrap_or(c.oov_weight),
        k_g2g: a.k.unwrap_or(c.k_g2g),
    };
    let graph = build_biasing_graph(&corpus, &contacts, &vocab, g2g.as_ref(), &config)?;
    let text = graph.to_text(&vocab)?;
    match a.out.or_else(|| c.graph.clone()) {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes())?,
    }
    log::info!("graph: {} states, {} arcs", graph.fst.num_states(), graph.fst.num_arcs());
    Ok(())
}

fn query_trie(a: QueryTrieArgs, c: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let vocab = load_vocab(&required(a.vocab, &c.vocab, "vocab")?)?;
    let g2g = load_g2g(a.g2g.as_ref().or(c.g2g.as_ref()))?;
    let contacts_path = required(a.contacts, &c.contacts, "contacts")?;
    let contacts = load_contacts(&contacts_path, g2g.as_ref(), a.k.unwrap_or(c.k_g2g))?;
    let trie = at(&contacts_path, build_trie(&contacts, &vocab))?;
    let prefix = vocab
        .lookup_all(&a.prefix)
        .map_err(|e| CliError::Usage(format!("--prefix: {e}")))?;
    let bits = if a.ge2 {
        trie_query_ge2(&trie, &prefix)
    } else {
        trie_query(&trie, &prefix)
    };
    writeln!(out, "{}", vocab.render(&bits.ones()))?;
    Ok(())
}

fn g2g_expand(a: G2gExpandArgs, c: &Config, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let path = required(a.map, &c.g2g, "map")?;
    let map = at(&path, G2GMap::load(open(&path)?))?;
    let k = a.k.unwrap_or(c.k_g2g);
    for line in stdin.lines() {
        let line = line?;
        for word in line.split_whitespace() {
            writeln!(out, "{word}\t{}", decode_variants(word, &map, k).join(","))?;
        }
    }
    Ok(())
}

/// Token positions covered by the first occurrence of `entity` in `tokens`.
fn entity_span(tokens: &[String], entity: &str) -> Option<std::ops::Range<usize>> {
    let needle: Vec<&str> = entity.split_whitespace().collect();
    if needle.is_empty() || needle.len() > tokens.len() {
        return None;
    }
    (0..=tokens.len() - needle.len())
        .find(|&i| tokens[i..i + needle.len()].iter().zip(&needle).all(|(a, b)| a == b))
        .map(|i| i..i + needle.len())
}

fn g2g_replace(a: G2gReplaceArgs, c: &Config, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<(), CliError> {
    let path = required(a.map, &c.g2g, "map")?;
    let map = at(&path, G2GMap::load(open(&path)?))?;
    let p = a.p.unwrap_or(c.p);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(c.seed));
    for line in stdin.lines() {
        let line = line?;
        let (text, span) = if a.entity_only {
            match line.split_once('\t') {
                Some((text, entity)) => {
                    let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
                    let span = entity_span(&tokens, entity);
                    (text.to_string(), span)
                }
                None => (line.clone(), None),
            }
        } else {
            (line.clone(), Some(0..usize::MAX))
        };
        let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        let replaced = train_replace_filtered(&tokens, &map, p, &mut rng, |i| {
            span.as_ref().is_some_and(|s| s.contains(&i))
        })?;
        writeln!(out, "{}", replaced.join(" "))?;
    }
    Ok(())
}

fn simulate(a: SimulateArgs, c: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let path = required(a.corpus, &c.corpus, "corpus")?;
    let corpus = at(&path, load_tagged_corpus(open(&path)?))?;
    let g2g = load_g2g(a.g2g.as_ref().or(c.g2g.as_ref()))?.unwrap_or_default();
    if a.min_size > a.max_size {
        return Err(CliError::Usage("--min-size exceeds --max-size".into()));
    }
    let config = SimulationConfig {
        min_size: a.min_size,
        max_size: a.max_size,
        p_remove: a.p_remove,
        p_swap: a.p_swap,
        k_g2g: a.k.unwrap_or(c.k_g2g),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(c.seed));
    let sims = simulate_contact_list(&corpus, &mut rng, &g2g, &config)?;
    for sim in sims {
        let contacts: Vec<_> = sim
            .contacts
            .names
            .iter()
            .map(|n| json!({"display": n.display, "spellings": n.spellings}))
            .collect();
        let line = json!({
            "reference": sim.reference,
            "sampled_size": sim.sampled_size,
            "target_removed": sim.target_removed,
            "target_swapped": sim.target_swapped,
            "contacts": contacts,
        });
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn load_scorer(path: &Path, vocab: &Vocabulary) -> Result<Box<dyn Scorer>, CliError> {
    let text = read(path)?;
    let is_joiner = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .is_some_and(|l| l.trim_start().starts_with("toy-joiner"));
    Ok(if is_joiner {
        Box::new(at(path, ToyJoiner::load(text.as_bytes(), vocab))?)
    } else {
        Box::new(at(path, TableScorer::load(text.as_bytes(), vocab))?)
    })
}

fn decode(a: DecodeArgs, c: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let vocab = load_vocab(&required(a.vocab, &c.vocab, "vocab")?)?;
    let scorer_paths = if a.scorer.is_empty() {
        vec![required(None, &c.scorer, "scorer")?]
    } else {
        a.scorer
    };
    let graph = match a.graph.or_else(|| c.graph.clone()) {
        Some(path) => Some(at(&path, BiasingGraph::from_text(&read(&path)?, &vocab))?),
        None => None,
    };
    let plm = if a.plm {
        let contacts_path = required(a.contacts, &c.contacts, "contacts")?;
        let proj_path = required(a.proj, &c.proj, "proj")?;
        let g2g = load_g2g(a.g2g.as_ref().or(c.g2g.as_ref()))?;
        let contacts = load_contacts(&contacts_path, g2g.as_ref(), a.k.unwrap_or(c.k_g2g))?;
        let trie = at(&contacts_path, build_trie(&contacts, &vocab))?;
        let proj = at(&proj_path, PlmProjection::load(open(&proj_path)?))?;
        Some((trie, proj))
    } else {
        None
    };
    let config = DecodeConfig {
        beam: a.beam.unwrap_or(c.beam),
        lambda: a.lambda.unwrap_or(c.lambda),
        max_symbols: a.max_symbols.unwrap_or(c.max_symbols),
        plm: a.plm,
        nbest: a.nbest.unwrap_or(c.nbest),
    };
    let scorers = scorer_paths
        .iter()
        .map(|p| load_scorer(p, &vocab))
        .collect::<Result<Vec<_>, _>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.unwrap_or(c.jobs))
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        scorers
            .par_iter()
            .map(|s| {
                let ctx = plm.as_ref().map(|(trie, proj)| PlmContext { trie, proj });
                beam_decode(s.as_ref(), graph.as_ref().map(|g| &g.fst), ctx, &config)
            })
            .collect()
    });

    for (utt, (path, result)) in scorer_paths.iter().zip(results).enumerate() {
        let hyps = at(path, result)?;
        for (rank, h) in hyps.iter().enumerate() {
            let pieces: Vec<&str> = h.pieces.iter().map(|&p| vocab.piece(p).unwrap_or("<?>")).collect();
            let words = graph.as_ref().map_or_else(Vec::new, |g| g.words_of(&h.olabels));
            let line = json!({
                "utterance": utt,
                "rank": rank,
                "pieces": pieces,
                "words": words,
                "score": h.score,
            });
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}
