//! Evaluation against a gold tagged corpus: segmentation errors by
//! character-span alignment, a tag confusion matrix over span-matched
//! words, unknown-word accounting, and two accuracy figures (with and
//! without segmentation mismatches in the denominator).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::model::{PosTag, TaggedSentence};

/// Character-span alignment between a predicted and a gold segmentation of
/// the same text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// Indices of span-identical words as (pred, gold) pairs, in order.
    pub aligned: Vec<(usize, usize)>,
    /// Gold words with no span-identical predicted word.
    pub seg_errors: usize,
}

fn char_spans(sentence: &TaggedSentence) -> Vec<(usize, usize)> {
    let mut spans = Vec::with_capacity(sentence.items.len());
    let mut offset = 0;
    for item in &sentence.items {
        let len = item.word.chars().count();
        spans.push((offset, offset + len));
        offset += len;
    }
    spans
}

/// Aligns words by identical character offsets. Errors when the two sides
/// do not spell the same character sequence.
pub fn align_spans(pred: &TaggedSentence, gold: &TaggedSentence) -> Result<Alignment> {
    let pred_text: String = pred.words().collect();
    let gold_text: String = gold.words().collect();
    if pred_text != gold_text {
        return Err(Error::TextMismatch { index: 0 });
    }
    let pred_spans = char_spans(pred);
    let gold_spans = char_spans(gold);
    let by_span: BTreeMap<(usize, usize), usize> = pred_spans
        .iter()
        .enumerate()
        .map(|(i, span)| (*span, i))
        .collect();
    let mut aligned = Vec::new();
    let mut seg_errors = 0;
    for (j, span) in gold_spans.iter().enumerate() {
        match by_span.get(span) {
            Some(&i) => aligned.push((i, j)),
            None => seg_errors += 1,
        }
    }
    Ok(Alignment {
        aligned,
        seg_errors,
    })
}

/// Aggregated evaluation counts. `confusion` maps (gold tag, predicted tag)
/// to a count and includes the diagonal; `tag_errors` is the off-diagonal
/// total, unknown words included.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    /// Gold words overall.
    pub total_words: u64,
    pub sentence_count: u64,
    /// Gold words without a span-identical predicted word.
    pub seg_errors: u64,
    /// Span-aligned gold words (the accuracy denominator).
    pub aligned_words: u64,
    /// Aligned words with mismatching tags.
    pub tag_errors: u64,
    /// Aligned words absent from the lexicon.
    pub unknown_words: u64,
    /// The subset of `tag_errors` on unknown words.
    pub unknown_tag_errors: u64,
    pub confusion: BTreeMap<(PosTag, PosTag), u64>,
}

impl EvalReport {
    /// Tag errors on lexicon-known words, the Table-style tagging column.
    pub fn known_tag_errors(&self) -> u64 {
        self.tag_errors - self.unknown_tag_errors
    }

    /// Accuracy over span-aligned words only: segmentation mismatches are
    /// incomparable and excluded from the denominator.
    pub fn accuracy(&self) -> f64 {
        if self.aligned_words == 0 {
            return 1.0;
        }
        (self.aligned_words - self.tag_errors) as f64 / self.aligned_words as f64
    }

    /// The alternate figure counting every error class against all gold
    /// words: segmentation mismatches, tag errors and unknown-word errors.
    pub fn all_errors_accuracy(&self) -> f64 {
        if self.total_words == 0 {
            return 1.0;
        }
        (self.total_words - self.seg_errors - self.tag_errors) as f64 / self.total_words as f64
    }
}

/// Evaluates predicted sentences against gold, sentence by sentence.
/// Both sides of every pair must be fully resolved.
pub fn evaluate<'a, I>(pairs: I, lex: &Lexicon) -> Result<EvalReport>
where
    I: IntoIterator<Item = (&'a TaggedSentence, &'a TaggedSentence)>,
{
    let mut report = EvalReport::default();
    for (index, (pred, gold)) in pairs.into_iter().enumerate() {
        let alignment = align_spans(pred, gold).map_err(|e| match e {
            Error::TextMismatch { .. } => Error::TextMismatch { index: index + 1 },
            other => other,
        })?;
        report.sentence_count += 1;
        report.total_words += gold.items.len() as u64;
        report.seg_errors += alignment.seg_errors as u64;
        for (pi, gi) in alignment.aligned {
            let pred_item = &pred.items[pi];
            let gold_item = &gold.items[gi];
            let (Some(pred_tag), Some(gold_tag)) = (pred_item.tag(), gold_item.tag()) else {
                return Err(Error::invalid(format!(
                    "sentence {}: unresolved word in evaluation input",
                    index + 1
                )));
            };
            report.aligned_words += 1;
            *report
                .confusion
                .entry((gold_tag.clone(), pred_tag.clone()))
                .or_insert(0) += 1;
            let unknown = !lex.contains(&gold_item.word);
            if unknown {
                report.unknown_words += 1;
            }
            if pred_tag != gold_tag {
                report.tag_errors += 1;
                if unknown {
                    report.unknown_tag_errors += 1;
                }
            }
        }
    }
    Ok(report)
}

/// Off-diagonal confusion cells as percentages of all tag errors.
/// Empty when there are no tag errors.
pub fn confusion_shares(report: &EvalReport) -> BTreeMap<(PosTag, PosTag), f64> {
    let mut shares = BTreeMap::new();
    if report.tag_errors == 0 {
        return shares;
    }
    for ((gold, pred), count) in &report.confusion {
        if gold != pred {
            shares.insert(
                (gold.clone(), pred.clone()),
                *count as f64 * 100.0 / report.tag_errors as f64,
            );
        }
    }
    shares
}

/// Renders the report as aligned plain-text tables.
pub fn render_report(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>12} {:>10} {:>21} {:>19} {:>14}\n",
        "Total words", "Sentences", "Word dividing errors", "POS tagging errors", "Unknown words"
    ));
    out.push_str(&format!(
        "{:>12} {:>10} {:>21} {:>19} {:>14}\n",
        report.total_words,
        report.sentence_count,
        report.seg_errors,
        report.known_tag_errors(),
        report.unknown_words
    ));
    out.push('\n');
    out.push_str(&format!(
        "accuracy (aligned words):      {:6.2}%\n",
        report.accuracy() * 100.0
    ));
    out.push_str(&format!(
        "accuracy (all errors counted): {:6.2}%\n",
        report.all_errors_accuracy() * 100.0
    ));
    if report.confusion.iter().any(|((g, p), _)| g != p) {
        out.push_str("\nconfusion (gold -> predicted):\n");
        for ((gold, pred), count) in &report.confusion {
            if gold != pred {
                out.push_str(&format!("  {gold} -> {pred}: {count}\n"));
            }
        }
        let shares = confusion_shares(report);
        if !shares.is_empty() {
            out.push_str("\nerror shares:\n");
            for ((gold, pred), share) in shares {
                out.push_str(&format!("  {gold} -> {pred}: {share:.1}%\n"));
            }
        }
    }
    out
}

/// Machine-readable TSV: metric rows, then confusion rows.
pub fn report_tsv(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("total_words\t{}\n", report.total_words));
    out.push_str(&format!("sentence_count\t{}\n", report.sentence_count));
    out.push_str(&format!("seg_errors\t{}\n", report.seg_errors));
    out.push_str(&format!("aligned_words\t{}\n", report.aligned_words));
    out.push_str(&format!("tag_errors\t{}\n", report.tag_errors));
    out.push_str(&format!(
        "known_tag_errors\t{}\n",
        report.known_tag_errors()
    ));
    out.push_str(&format!("unknown_words\t{}\n", report.unknown_words));
    out.push_str(&format!(
        "unknown_tag_errors\t{}\n",
        report.unknown_tag_errors
    ));
    out.push_str(&format!("accuracy\t{:.6}\n", report.accuracy()));
    out.push_str(&format!(
        "all_errors_accuracy\t{:.6}\n",
        report.all_errors_accuracy()
    ));
    for ((gold, pred), count) in &report.confusion {
        out.push_str(&format!("confusion\t{gold}\t{pred}\t{count}\n"));
    }
    out
}
