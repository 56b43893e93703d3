//! The interpolated bidirectional statistical tagger: count-based model
//! training, the per-position score
//!
//! ```text
//! score(t) = λ2·p(t|t_next)·p(t|w)/p(t) + λ1·p(t|t_prev)·p(t|w)/p(t)
//! ```
//!
//! with λ1 = 0.772 and λ2 = 0.22 (boundary terms dropped), an exact dynamic
//! program over adjacent tag pairs maximizing the sentence-level sum of
//! position scores, and an exhaustive oracle decoder for verification.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::model::{ChiSentence, PosTag, Provenance, TaggedSentence, TaggedWord};

/// Forward (left-context) interpolation weight.
pub const DEFAULT_LAMBDA1: f64 = 0.772;
/// Backward (right-context) interpolation weight.
pub const DEFAULT_LAMBDA2: f64 = 0.22;
/// Probability floor replacing zeros at query time.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Cap on exhaustive enumeration in [`brute_force_decode`].
pub const BRUTE_FORCE_CAP: u128 = 1_000_000;

/// Unigram, bigram and lexical counts with the interpolation constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbModel {
    tag_count: BTreeMap<PosTag, u64>,
    bigram_count: BTreeMap<(PosTag, PosTag), u64>,
    word_tag_count: BTreeMap<String, BTreeMap<PosTag, u64>>,
    total_tokens: u64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub epsilon: f64,
}

impl ProbModel {
    /// Builds a model from raw counts; the token total is the tag-count sum.
    pub fn from_counts(
        tag_count: BTreeMap<PosTag, u64>,
        bigram_count: BTreeMap<(PosTag, PosTag), u64>,
        word_tag_flat: BTreeMap<(String, PosTag), u64>,
    ) -> Self {
        let mut word_tag_count: BTreeMap<String, BTreeMap<PosTag, u64>> = BTreeMap::new();
        for ((word, tag), count) in word_tag_flat {
            *word_tag_count
                .entry(word)
                .or_default()
                .entry(tag)
                .or_insert(0) += count;
        }
        let total_tokens = tag_count.values().sum();
        ProbModel {
            tag_count,
            bigram_count,
            word_tag_count,
            total_tokens,
            lambda1: DEFAULT_LAMBDA1,
            lambda2: DEFAULT_LAMBDA2,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn with_lambdas(mut self, lambda1: f64, lambda2: f64) -> Self {
        self.lambda1 = lambda1;
        self.lambda2 = lambda2;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn tag_counts(&self) -> &BTreeMap<PosTag, u64> {
        &self.tag_count
    }

    pub fn bigram_counts(&self) -> &BTreeMap<(PosTag, PosTag), u64> {
        &self.bigram_count
    }

    pub fn word_tag_counts(&self) -> &BTreeMap<String, BTreeMap<PosTag, u64>> {
        &self.word_tag_count
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Tags with nonzero count, in sorted order.
    pub fn known_tags(&self) -> Vec<PosTag> {
        self.tag_count
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(t, _)| t.clone())
            .collect()
    }

    fn floor(&self, p: f64) -> f64 {
        if p > 0.0 {
            p
        } else {
            self.epsilon
        }
    }

    /// p(t), floored.
    pub fn prob_tag(&self, tag: &PosTag) -> f64 {
        if self.total_tokens == 0 {
            return self.epsilon;
        }
        let count = self.tag_count.get(tag).copied().unwrap_or(0);
        self.floor(count as f64 / self.total_tokens as f64)
    }

    /// p(t | t_prev) = bigram(t_prev, t) / count(t_prev), floored.
    pub fn prob_tag_given_prev(&self, tag: &PosTag, prev: &PosTag) -> f64 {
        let denom = self.tag_count.get(prev).copied().unwrap_or(0);
        if denom == 0 {
            return self.epsilon;
        }
        let num = self
            .bigram_count
            .get(&(prev.clone(), tag.clone()))
            .copied()
            .unwrap_or(0);
        self.floor(num as f64 / denom as f64)
    }

    /// p(t | t_next) = bigram(t, t_next) / count(t_next), floored.
    pub fn prob_tag_given_next(&self, tag: &PosTag, next: &PosTag) -> f64 {
        let denom = self.tag_count.get(next).copied().unwrap_or(0);
        if denom == 0 {
            return self.epsilon;
        }
        let num = self
            .bigram_count
            .get(&(tag.clone(), next.clone()))
            .copied()
            .unwrap_or(0);
        self.floor(num as f64 / denom as f64)
    }

    /// p(t | w) = count(w, t) / Σ_t' count(w, t'), floored.
    pub fn prob_tag_given_word(&self, word: &str, tag: &PosTag) -> f64 {
        let Some(tags) = self.word_tag_count.get(word) else {
            return self.epsilon;
        };
        let denom: u64 = tags.values().sum();
        if denom == 0 {
            return self.epsilon;
        }
        let num = tags.get(tag).copied().unwrap_or(0);
        self.floor(num as f64 / denom as f64)
    }

    fn score_with_lexical(
        &self,
        p_lex: f64,
        tag: &PosTag,
        prev: Option<&PosTag>,
        next: Option<&PosTag>,
    ) -> f64 {
        let p_tag = self.prob_tag(tag);
        let mut score = 0.0;
        if let Some(next) = next {
            score += self.lambda2 * self.prob_tag_given_next(tag, next) * p_lex / p_tag;
        }
        if let Some(prev) = prev {
            score += self.lambda1 * self.prob_tag_given_prev(tag, prev) * p_lex / p_tag;
        }
        score
    }

    /// The interpolated per-position score. Terms whose neighbor is absent
    /// (sentence boundary) are dropped.
    pub fn position_score(
        &self,
        word: &str,
        tag: &PosTag,
        prev: Option<&PosTag>,
        next: Option<&PosTag>,
    ) -> f64 {
        self.score_with_lexical(self.prob_tag_given_word(word, tag), tag, prev, next)
    }
}

/// Trains maximum-likelihood counts from fully tagged sentences. Bigrams
/// come from adjacent tokens within each sentence; there are no synthetic
/// boundary tags.
pub fn train<'a, I>(corpus: I) -> Result<ProbModel>
where
    I: IntoIterator<Item = &'a TaggedSentence>,
{
    let mut tag_count: BTreeMap<PosTag, u64> = BTreeMap::new();
    let mut bigram_count: BTreeMap<(PosTag, PosTag), u64> = BTreeMap::new();
    let mut word_tag_count: BTreeMap<(String, PosTag), u64> = BTreeMap::new();
    let mut tokens = 0u64;

    for sentence in corpus {
        let mut prev: Option<&PosTag> = None;
        for (j, item) in sentence.items.iter().enumerate() {
            let tag = item.tag().ok_or_else(|| {
                Error::invalid(format!(
                    "training word {} ({:?}) is untagged",
                    j + 1,
                    item.word
                ))
            })?;
            *tag_count.entry(tag.clone()).or_insert(0) += 1;
            *word_tag_count
                .entry((item.word.clone(), tag.clone()))
                .or_insert(0) += 1;
            if let Some(prev) = prev {
                *bigram_count.entry((prev.clone(), tag.clone())).or_insert(0) += 1;
            }
            prev = Some(tag);
            tokens += 1;
        }
    }
    if tokens == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(ProbModel::from_counts(
        tag_count,
        bigram_count,
        word_tag_count,
    ))
}

/// Candidate tags for one position: the fixed tag when resolved, the
/// lexicon POS set for known words, the open classes otherwise. The second
/// element is the lexical probability to use (uniform over the open classes
/// for unknown words).
fn candidates_for(
    lex: &Lexicon,
    open_classes: &[PosTag],
    item: &TaggedWord,
) -> Result<(Vec<PosTag>, LexicalProb)> {
    let known = lex.contains(&item.word);
    let lexical = if known {
        LexicalProb::Model
    } else if open_classes.is_empty() {
        return Err(Error::invalid(format!(
            "unknown word {:?} with no open classes configured",
            item.word
        )));
    } else {
        LexicalProb::Uniform(open_classes.len() as f64)
    };
    if let Some(tag) = item.tag() {
        return Ok((vec![tag.clone()], lexical));
    }
    let candidates: Vec<PosTag> = match lex.pos_set(&item.word) {
        Some(set) => set.into_iter().collect(),
        None => BTreeSet::from_iter(open_classes.iter().cloned())
            .into_iter()
            .collect(),
    };
    Ok((candidates, lexical))
}

#[derive(Debug, Clone, Copy)]
enum LexicalProb {
    /// Use the trained p(t|w).
    Model,
    /// 1 / |open classes|, the unknown-word distribution.
    Uniform(f64),
}

impl LexicalProb {
    fn value(&self, model: &ProbModel, word: &str, tag: &PosTag) -> f64 {
        match self {
            LexicalProb::Model => model.prob_tag_given_word(word, tag),
            LexicalProb::Uniform(n) => 1.0 / n,
        }
    }
}

struct DecodeProblem {
    candidates: Vec<Vec<PosTag>>,
    lexical: Vec<LexicalProb>,
}

impl DecodeProblem {
    fn build(partial: &TaggedSentence, lex: &Lexicon, open_classes: &[PosTag]) -> Result<Self> {
        let mut candidates = Vec::with_capacity(partial.items.len());
        let mut lexical = Vec::with_capacity(partial.items.len());
        for item in &partial.items {
            let (cands, p_lex) = candidates_for(lex, open_classes, item)?;
            candidates.push(cands);
            lexical.push(p_lex);
        }
        Ok(DecodeProblem {
            candidates,
            lexical,
        })
    }

    fn position_score(
        &self,
        model: &ProbModel,
        partial: &TaggedSentence,
        i: usize,
        tag: &PosTag,
        prev: Option<&PosTag>,
        next: Option<&PosTag>,
    ) -> f64 {
        let p_lex = self.lexical[i].value(model, &partial.items[i].word, tag);
        model.score_with_lexical(p_lex, tag, prev, next)
    }

    fn total(&self, model: &ProbModel, partial: &TaggedSentence, tags: &[PosTag]) -> f64 {
        let n = tags.len();
        let mut sum = 0.0;
        for i in 0..n {
            let prev = if i > 0 { Some(&tags[i - 1]) } else { None };
            let next = if i + 1 < n { Some(&tags[i + 1]) } else { None };
            sum += self.position_score(model, partial, i, &tags[i], prev, next);
        }
        sum
    }
}

/// The sentence-level objective: the sum of per-position interpolated
/// scores for a full tag assignment, with the unknown-word lexical
/// distribution applied where the lexicon has no entry.
pub fn total_score(
    model: &ProbModel,
    partial: &TaggedSentence,
    lex: &Lexicon,
    open_classes: &[PosTag],
    tags: &[PosTag],
) -> Result<f64> {
    if tags.len() != partial.items.len() {
        return Err(Error::invalid("tag assignment length mismatch"));
    }
    let problem = DecodeProblem::build(partial, lex, open_classes)?;
    Ok(problem.total(model, partial, tags))
}

fn finish(partial: &TaggedSentence, lex: &Lexicon, tags: Vec<PosTag>) -> TaggedSentence {
    let items = partial
        .items
        .iter()
        .zip(tags)
        .map(|(item, tag)| {
            if item.is_resolved() {
                item.clone()
            } else {
                let provenance = if lex.contains(&item.word) {
                    Provenance::Statistical
                } else {
                    Provenance::UnknownFallback
                };
                TaggedWord::resolved(item.word.clone(), tag, provenance)
            }
        })
        .collect();
    TaggedSentence { items }
}

/// Exact decoder. Because each position's score couples the previous, the
/// current and the next tag, the dynamic program runs over adjacent tag
/// pairs. Ties are broken toward the lexicographically smallest tag
/// sequence.
pub fn decode(
    model: &ProbModel,
    sent: &ChiSentence,
    partial: &TaggedSentence,
    lex: &Lexicon,
    open_classes: &[PosTag],
) -> Result<TaggedSentence> {
    assert!(
        partial.aligned_with(sent),
        "partial tagging must align with the sentence"
    );
    let n = sent.len();
    if n == 0 {
        return Ok(partial.clone());
    }
    if partial.is_fully_resolved() {
        return Ok(partial.clone());
    }
    let problem = DecodeProblem::build(partial, lex, open_classes)?;
    let cands = &problem.candidates;

    if n == 1 {
        let mut best: Option<(f64, &PosTag)> = None;
        for tag in &cands[0] {
            let score = problem.position_score(model, partial, 0, tag, None, None);
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, tag));
            }
        }
        let (_, tag) = best.expect("candidate sets are non-empty");
        return Ok(finish(partial, lex, vec![tag.clone()]));
    }

    // state at step k = (t_k, t_{k+1}); value carries the best score and the
    // lexicographically smallest candidate-index prefix attaining it
    type State = (usize, usize);
    let mut layer: BTreeMap<State, (f64, Vec<usize>)> = BTreeMap::new();
    for (a, ta) in cands[0].iter().enumerate() {
        for (b, tb) in cands[1].iter().enumerate() {
            let score = problem.position_score(model, partial, 0, ta, None, Some(tb));
            layer.insert((a, b), (score, vec![a, b]));
        }
    }

    for k in 1..n - 1 {
        let mut next_layer: BTreeMap<State, (f64, Vec<usize>)> = BTreeMap::new();
        for ((a, b), (value, prefix)) in &layer {
            let ta = &cands[k - 1][*a];
            let tb = &cands[k][*b];
            for (c, tc) in cands[k + 1].iter().enumerate() {
                let score =
                    value + problem.position_score(model, partial, k, tb, Some(ta), Some(tc));
                let entry = next_layer.entry((*b, c));
                let candidate_prefix = || {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                };
                match entry {
                    std::collections::btree_map::Entry::Vacant(slot) => {
                        slot.insert((score, candidate_prefix()));
                    }
                    std::collections::btree_map::Entry::Occupied(mut slot) => {
                        let (best, best_prefix) = slot.get();
                        if score > *best || (score == *best && candidate_prefix() < *best_prefix) {
                            slot.insert((score, candidate_prefix()));
                        }
                    }
                }
            }
        }
        layer = next_layer;
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for ((a, b), (value, prefix)) in &layer {
        let ta = &cands[n - 2][*a];
        let tb = &cands[n - 1][*b];
        let score = value + problem.position_score(model, partial, n - 1, tb, Some(ta), None);
        let better = match &best {
            None => true,
            Some((s, p)) => score > *s || (score == *s && *prefix < *p),
        };
        if better {
            best = Some((score, prefix.clone()));
        }
    }
    let (_, prefix) = best.expect("candidate sets are non-empty");
    let tags: Vec<PosTag> = prefix
        .iter()
        .enumerate()
        .map(|(i, &c)| cands[i][c].clone())
        .collect();
    Ok(finish(partial, lex, tags))
}

/// Exhaustive oracle decoder: enumerates every admissible assignment in
/// lexicographic order, sums position scores directly, and keeps the first
/// maximum. Refuses search spaces above [`BRUTE_FORCE_CAP`].
pub fn brute_force_decode(
    model: &ProbModel,
    sent: &ChiSentence,
    partial: &TaggedSentence,
    lex: &Lexicon,
    open_classes: &[PosTag],
) -> Result<TaggedSentence> {
    assert!(
        partial.aligned_with(sent),
        "partial tagging must align with the sentence"
    );
    let n = sent.len();
    if n == 0 {
        return Ok(partial.clone());
    }
    let problem = DecodeProblem::build(partial, lex, open_classes)?;
    let cands = &problem.candidates;

    let size: u128 = cands.iter().map(|c| c.len() as u128).product();
    if size > BRUTE_FORCE_CAP {
        return Err(Error::SearchSpaceTooLarge {
            size,
            cap: BRUTE_FORCE_CAP,
        });
    }

    let mut indices = vec![0usize; n];
    let mut best: Option<(f64, Vec<PosTag>)> = None;
    loop {
        let tags: Vec<PosTag> = indices
            .iter()
            .enumerate()
            .map(|(i, &c)| cands[i][c].clone())
            .collect();
        let score = problem.total(model, partial, &tags);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, tags));
        }
        // advance the odometer (last position varies fastest => lexicographic)
        let mut pos = n;
        loop {
            if pos == 0 {
                let (_, tags) = best.expect("at least one assignment exists");
                return Ok(finish(partial, lex, tags));
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < cands[pos].len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// model file format
// ---------------------------------------------------------------------------

/// Serializes the counts: `#TAGS`, `#BIGRAMS`, `#LEXICAL` sections of sorted
/// TSV rows. Interpolation constants are runtime configuration and are not
/// stored.
pub fn write_model(model: &ProbModel) -> String {
    let mut out = String::from("#TAGS\n");
    for (tag, count) in model.tag_counts() {
        out.push_str(&format!("{tag}\t{count}\n"));
    }
    out.push_str("#BIGRAMS\n");
    for ((a, b), count) in model.bigram_counts() {
        out.push_str(&format!("{a}\t{b}\t{count}\n"));
    }
    out.push_str("#LEXICAL\n");
    for (word, tags) in model.word_tag_counts() {
        for (tag, count) in tags {
            out.push_str(&format!("{word}\t{tag}\t{count}\n"));
        }
    }
    out
}

pub fn parse_model(text: &str) -> Result<ProbModel> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Tags,
        Bigrams,
        Lexical,
    }
    let (text, _) = crate::corpus::strip_bom(text);
    let mut section = Section::None;
    let mut tag_count = BTreeMap::new();
    let mut bigram_count = BTreeMap::new();
    let mut word_tag_count = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match line.trim() {
            "#TAGS" => {
                section = Section::Tags;
                continue;
            }
            "#BIGRAMS" => {
                section = Section::Bigrams;
                continue;
            }
            "#LEXICAL" => {
                section = Section::Lexical;
                continue;
            }
            _ => {}
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match section {
            Section::None => {
                return Err(Error::parse(line_no, "data before a section header"));
            }
            Section::Tags => {
                let [tag, count] = fields.as_slice() else {
                    return Err(Error::parse(line_no, "expected TAG<TAB>COUNT"));
                };
                let tag = PosTag::new(*tag).map_err(|e| Error::parse(line_no, e.to_string()))?;
                let count = count
                    .parse()
                    .map_err(|_| Error::parse(line_no, "bad count"))?;
                tag_count.insert(tag, count);
            }
            Section::Bigrams => {
                let [a, b, count] = fields.as_slice() else {
                    return Err(Error::parse(line_no, "expected TAG1<TAB>TAG2<TAB>COUNT"));
                };
                let a = PosTag::new(*a).map_err(|e| Error::parse(line_no, e.to_string()))?;
                let b = PosTag::new(*b).map_err(|e| Error::parse(line_no, e.to_string()))?;
                let count = count
                    .parse()
                    .map_err(|_| Error::parse(line_no, "bad count"))?;
                bigram_count.insert((a, b), count);
            }
            Section::Lexical => {
                let [word, tag, count] = fields.as_slice() else {
                    return Err(Error::parse(line_no, "expected WORD<TAB>TAG<TAB>COUNT"));
                };
                if word.is_empty() {
                    return Err(Error::parse(line_no, "empty word"));
                }
                let tag = PosTag::new(*tag).map_err(|e| Error::parse(line_no, e.to_string()))?;
                let count = count
                    .parse()
                    .map_err(|_| Error::parse(line_no, "bad count"))?;
                word_tag_count.insert((word.to_string(), tag), count);
            }
        }
    }
    Ok(ProbModel::from_counts(
        tag_count,
        bigram_count,
        word_tag_count,
    ))
}
