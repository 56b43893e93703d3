//! Batch command line front end: builds the noun-pair dictionary, mines
//! decision rules, trains the statistical model, tags text, and evaluates
//! against gold. Progress goes to stderr; stdout stays machine-clean.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hantag_core::corpus::{
    self, read_bilingual_corpus, read_korean_corpus, read_tagged_chinese, strip_bom,
};
use hantag_core::miner::{mine, MinerOptions};
use hantag_core::model::{ChiSentence, PosInventory, PosTag, TagClassMap, TaggedSentence};
use hantag_core::noun_pairs::{compile_pair_dict, extract_korean_pairs, NounPairDict};
use hantag_core::pipeline::{segment, tag_sentence, TaggerConfig};
use hantag_core::rules::{parse_rulesets, serialize_ruleset, KindMatch};
use hantag_core::stats::{parse_model, train, write_model};

#[derive(Parser)]
#[command(
    name = "hantag",
    version,
    about = "Chinese POS tagging with Korean translation evidence",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract Korean noun pairs and compile the Chinese noun-pair dictionary
    ExtractNn(ExtractNnArgs),
    /// Mine POS decision rules from a bilingual corpus
    MineRules(MineRulesArgs),
    /// Train the statistical model from tagged Chinese text
    Train(TrainArgs),
    /// Tag Chinese text with the staged pipeline
    Tag(TagArgs),
    /// Evaluate tagged output against a gold corpus
    Eval(EvalArgs),
}

#[derive(Args)]
struct ExtractNnArgs {
    /// Korean POS-tagged corpus (one sentence per line)
    #[arg(long, value_name = "FILE")]
    korean: PathBuf,
    /// Tag-class map (PREFIX<TAB>noun|verb|other)
    #[arg(long, value_name = "FILE")]
    tagmap: PathBuf,
    /// Lexicon TSV; when given, --out receives the compiled Chinese pairs
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Also pair the last morpheme of an eojeol with the first of the next
    #[arg(long)]
    cross_eojeol: bool,
    /// Drop compiled pairs below this count
    #[arg(long, value_name = "N", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    min_count: u64,
    /// Output: Chinese pair dictionary with --lexicon, Korean pairs without
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Additionally write the raw Korean pairs (needs --lexicon)
    #[arg(long, value_name = "FILE", requires = "lexicon")]
    out_korean: Option<PathBuf>,
}

#[derive(Args)]
struct MineRulesArgs {
    /// Bilingual corpus: two-line records separated by blank lines
    #[arg(long, value_name = "FILE")]
    bilingual: PathBuf,
    #[arg(long, value_name = "FILE")]
    lexicon: PathBuf,
    #[arg(long, value_name = "FILE")]
    tagmap: PathBuf,
    /// Minimum agreeing contexts behind an emitted rule
    #[arg(long, value_name = "N", default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    min_support: u64,
    /// Minimum certainty factor of an emitted rule
    #[arg(long, value_name = "X", default_value_t = 0.9, value_parser = parse_fraction)]
    min_cf: f64,
    /// Also match verb lemmas against stem + 다
    #[arg(long)]
    stem_suffix: bool,
    /// Ruleset output file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Tagged Chinese corpus (word/pos tokens, one sentence per line)
    #[arg(long, value_name = "FILE")]
    tagged: PathBuf,
    /// Model output file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct TagArgs {
    #[arg(long, value_name = "FILE")]
    lexicon: PathBuf,
    /// Noun-pair dictionary TSV
    #[arg(long, value_name = "FILE")]
    nn: PathBuf,
    /// Ruleset file (may hold several rulesets, applied in order)
    #[arg(long, value_name = "FILE")]
    rules: PathBuf,
    /// Statistical model file
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Input is raw text: run maximum-matching word dividing first
    #[arg(long)]
    segment: bool,
    /// Write a provenance sidecar TSV (line, index, word, tag, stage)
    #[arg(long, value_name = "FILE")]
    provenance: Option<PathBuf>,
    /// Words qualify for a ruleset when their POS set contains the kind
    /// (default: must equal it exactly)
    #[arg(long)]
    kind_superset: bool,
    /// Candidate tags for unknown words, comma-separated
    #[arg(long, value_name = "TAGS", default_value = "n,v,a,d", value_parser = parse_tag_list)]
    open_classes: TagList,
    /// Forward interpolation weight
    #[arg(long, value_name = "X", value_parser = parse_non_negative)]
    lambda1: Option<f64>,
    /// Backward interpolation weight
    #[arg(long, value_name = "X", value_parser = parse_non_negative)]
    lambda2: Option<f64>,
    /// Probability floor for unseen events
    #[arg(long, value_name = "X", value_parser = parse_positive)]
    epsilon: Option<f64>,
    /// Input text, one sentence per line
    #[arg(value_name = "IN")]
    input: PathBuf,
    /// Tagged output
    #[arg(value_name = "OUT")]
    output: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Gold tagged corpus
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,
    /// Predicted tagged corpus
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    /// Lexicon used for unknown-word accounting
    #[arg(long, value_name = "FILE")]
    lexicon: PathBuf,
    /// Also write the machine-readable TSV report
    #[arg(long, value_name = "FILE")]
    tsv: Option<PathBuf>,
}

#[derive(Clone)]
struct TagList(Vec<PosTag>);

fn parse_tag_list(text: &str) -> Result<TagList, String> {
    let mut tags = Vec::new();
    for code in text.split(',') {
        let code = code.trim();
        if code.is_empty() {
            continue;
        }
        tags.push(PosTag::new(code).map_err(|e| e.to_string())?);
    }
    if tags.is_empty() {
        return Err("at least one tag is required".to_string());
    }
    Ok(TagList(tags))
}

fn parse_fraction(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|_| format!("bad number {text:?}"))?;
    if value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err("must be in (0, 1]".to_string())
    }
}

fn parse_non_negative(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|_| format!("bad number {text:?}"))?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err("must be non-negative".to_string())
    }
}

fn parse_positive(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|_| format!("bad number {text:?}"))?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err("must be positive".to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ExtractNn(args) => run_extract_nn(args),
        Command::MineRules(args) => run_mine_rules(args),
        Command::Train(args) => run_train(args),
        Command::Tag(args) => run_tag(args),
        Command::Eval(args) => run_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (text, had_bom) = strip_bom(&raw);
    if had_bom {
        eprintln!(
            "warning: {} starts with a UTF-8 BOM; stripped",
            path.display()
        );
    }
    Ok(text.to_string())
}

fn open_lines(path: &Path) -> Result<BufReader<fs::File>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(file))
}

/// Writes through a temp file in the target directory so failed runs never
/// leave partial output behind.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))
        .with_context(|| format!("creating temp file for {}", path.display()))?;
    tmp.write_all(content.as_bytes())
        .with_context(|| format!("writing {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("replacing {}", path.display()))?;
    Ok(())
}

fn load_lexicon(path: &Path) -> Result<hantag_core::Lexicon> {
    let text = read_text(path)?;
    corpus::parse_lexicon(&text, &PosInventory::default())
        .with_context(|| format!("parsing lexicon {}", path.display()))
}

fn load_tagmap(path: &Path) -> Result<TagClassMap> {
    let text = read_text(path)?;
    TagClassMap::parse(&text).with_context(|| format!("parsing tag map {}", path.display()))
}

fn run_extract_nn(args: ExtractNnArgs) -> Result<()> {
    let tagmap = load_tagmap(&args.tagmap)?;
    let reader = read_korean_corpus(open_lines(&args.korean)?);
    let mut sentences = Vec::new();
    for sentence in reader {
        sentences.push(sentence.with_context(|| format!("parsing {}", args.korean.display()))?);
    }
    let korean_pairs = extract_korean_pairs(sentences, &tagmap, args.cross_eojeol);
    eprintln!(
        "extracted {} distinct Korean noun pairs ({} occurrences)",
        korean_pairs.len(),
        korean_pairs.total()
    );

    match &args.lexicon {
        Some(lexicon_path) => {
            let lexicon = load_lexicon(lexicon_path)?;
            let dict = compile_pair_dict(&korean_pairs, &lexicon, args.min_count);
            eprintln!("compiled {} Chinese pairs", dict.len());
            if let Some(korean_out) = &args.out_korean {
                write_atomic(korean_out, &korean_pairs.to_tsv())?;
            }
            write_atomic(&args.out, &dict.to_tsv())?;
        }
        None => {
            write_atomic(&args.out, &korean_pairs.to_tsv())?;
        }
    }
    Ok(())
}

fn run_mine_rules(args: MineRulesArgs) -> Result<()> {
    let lexicon = load_lexicon(&args.lexicon)?;
    let tagmap = load_tagmap(&args.tagmap)?;
    let options = MinerOptions {
        min_support: args.min_support,
        min_cf: args.min_cf,
        match_stem_plus_da: args.stem_suffix,
    };
    let reader = read_bilingual_corpus(open_lines(&args.bilingual)?);
    let (ruleset, report) = mine(reader, &lexicon, &tagmap, &options)
        .with_context(|| format!("mining {}", args.bilingual.display()))?;
    eprintln!("{report}");
    write_atomic(&args.out, &serialize_ruleset(&ruleset))?;
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<()> {
    let mut sentences = Vec::new();
    for sentence in read_tagged_chinese(open_lines(&args.tagged)?) {
        sentences.push(sentence.with_context(|| format!("parsing {}", args.tagged.display()))?);
    }
    let model = train(sentences.iter())
        .with_context(|| format!("training from {}", args.tagged.display()))?;
    eprintln!(
        "trained on {} sentences, {} tokens",
        sentences.len(),
        model.total_tokens()
    );
    write_atomic(&args.out, &write_model(&model))?;
    Ok(())
}

fn run_tag(args: TagArgs) -> Result<()> {
    let lexicon = load_lexicon(&args.lexicon)?;
    let nn_text = read_text(&args.nn)?;
    let pair_dict = NounPairDict::from_tsv(&nn_text)
        .with_context(|| format!("parsing pair dictionary {}", args.nn.display()))?;
    let rules_text = read_text(&args.rules)?;
    let rulesets = parse_rulesets(&rules_text)
        .with_context(|| format!("parsing rules {}", args.rules.display()))?;
    let model_text = read_text(&args.model)?;
    let mut model = parse_model(&model_text)
        .with_context(|| format!("parsing model {}", args.model.display()))?;
    if let Some(lambda1) = args.lambda1 {
        model.lambda1 = lambda1;
    }
    if let Some(lambda2) = args.lambda2 {
        model.lambda2 = lambda2;
    }
    if let Some(epsilon) = args.epsilon {
        model.epsilon = epsilon;
    }

    let mut cfg = TaggerConfig::new(lexicon, pair_dict, rulesets, model)?;
    cfg.kind_match = if args.kind_superset {
        KindMatch::Superset
    } else {
        KindMatch::Exact
    };
    cfg.open_classes = args.open_classes.0.clone();
    cfg.validate()?;

    let mut tagged_sentences: Vec<TaggedSentence> = Vec::new();
    let mut provenance_rows = String::new();
    for (idx, line) in open_lines(&args.input)?.lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", args.input.display()))?;
        let line_no = idx + 1;
        let line = if line_no == 1 {
            strip_bom(&line).0.to_string()
        } else {
            line
        };
        let sentence = if args.segment {
            segment(&cfg.lexicon, &line)
        } else {
            ChiSentence::new(line.split_whitespace().map(str::to_string).collect())
                .with_context(|| format!("line {line_no} of {}", args.input.display()))?
        };
        let tagged = tag_sentence(&cfg, &sentence);
        if args.provenance.is_some() {
            for (i, item) in tagged.items.iter().enumerate() {
                let resolution = item.resolution.as_ref().expect("pipeline output is total");
                provenance_rows.push_str(&format!(
                    "{line_no}\t{i}\t{}\t{}\t{}\n",
                    item.word, resolution.tag, resolution.provenance
                ));
            }
        }
        tagged_sentences.push(tagged);
    }

    let output = corpus::write_tagged_chinese(&tagged_sentences)?;
    write_atomic(&args.output, &output)?;
    if let Some(provenance_path) = &args.provenance {
        write_atomic(provenance_path, &provenance_rows)?;
    }
    eprintln!("tagged {} sentences", tagged_sentences.len());
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let lexicon = load_lexicon(&args.lexicon)?;
    let gold_text = read_text(&args.gold)?;
    let gold = corpus::parse_tagged_chinese(&gold_text)
        .with_context(|| format!("parsing gold {}", args.gold.display()))?;
    let pred_text = read_text(&args.pred)?;
    let pred = corpus::parse_tagged_chinese(&pred_text)
        .with_context(|| format!("parsing predictions {}", args.pred.display()))?;
    if gold.len() != pred.len() {
        bail!(
            "gold has {} sentences but predictions have {}",
            gold.len(),
            pred.len()
        );
    }
    let report = hantag_core::eval::evaluate(pred.iter().zip(gold.iter()), &lexicon)?;
    print!("{}", hantag_core::eval::render_report(&report));
    if let Some(tsv_path) = &args.tsv {
        write_atomic(tsv_path, &hantag_core::eval::report_tsv(&report))?;
    }
    Ok(())
}
