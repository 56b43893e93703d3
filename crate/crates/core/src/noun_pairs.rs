//! Noun-conjunction dictionary: Korean noun–noun pairs harvested from a
//! tagged corpus, compiled into Chinese word pairs through the lexicon,
//! and looked up by the tagger while deciding noun readings.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::model::{KorSentence, TagClass, TagClassMap};

/// Ordered Korean noun pairs with occurrence counts. `(a, b)` and `(b, a)`
/// are distinct keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KorNounPairs {
    counts: BTreeMap<(String, String), u64>,
}

/// Ordered Chinese noun pairs with aggregated counts. Both words of every
/// key had a noun sense in the lexicon used at build time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NounPairDict {
    counts: BTreeMap<(String, String), u64>,
}

impl KorNounPairs {
    pub fn counts(&self) -> &BTreeMap<(String, String), u64> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, left: &str, right: &str) -> u64 {
        self.counts
            .get(&(left.to_string(), right.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn insert(&mut self, left: impl Into<String>, right: impl Into<String>, count: u64) {
        if count > 0 {
            *self.counts.entry((left.into(), right.into())).or_insert(0) += count;
        }
    }

    /// TSV form `LEFT<TAB>RIGHT<TAB>COUNT`, sorted by key.
    pub fn to_tsv(&self) -> String {
        pairs_to_tsv(&self.counts)
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        Ok(KorNounPairs {
            counts: pairs_from_tsv(text)?,
        })
    }
}

impl NounPairDict {
    pub fn counts(&self) -> &BTreeMap<(String, String), u64> {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Exact-count lookup for the ordered pair; 0 means miss.
    pub fn hit(&self, left: &str, right: &str) -> u64 {
        self.counts
            .get(&(left.to_string(), right.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn to_tsv(&self) -> String {
        pairs_to_tsv(&self.counts)
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        Ok(NounPairDict {
            counts: pairs_from_tsv(text)?,
        })
    }
}

fn pairs_to_tsv(counts: &BTreeMap<(String, String), u64>) -> String {
    let mut out = String::new();
    for ((left, right), count) in counts {
        out.push_str(left);
        out.push('\t');
        out.push_str(right);
        out.push('\t');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    out
}

fn pairs_from_tsv(text: &str) -> Result<BTreeMap<(String, String), u64>> {
    let mut counts = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = if line_no == 1 {
            crate::corpus::strip_bom(raw).0
        } else {
            raw
        };
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (left, right, count) = match (fields.next(), fields.next(), fields.next()) {
            (Some(l), Some(r), Some(c)) if fields.next().is_none() => (l, r, c),
            _ => {
                return Err(Error::parse(
                    line_no,
                    "expected LEFT<TAB>RIGHT<TAB>COUNT".to_string(),
                ))
            }
        };
        if left.is_empty() || right.is_empty() {
            return Err(Error::parse(line_no, "empty pair member"));
        }
        let count: u64 = count
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad count {count:?}")))?;
        if count == 0 {
            return Err(Error::parse(line_no, "count must be at least 1"));
        }
        *counts
            .entry((left.to_string(), right.to_string()))
            .or_insert(0) += count;
    }
    Ok(counts)
}

/// Counts adjacent noun–noun morpheme pairs across the corpus. Adjacency is
/// within an eojeol; `cross_eojeol` additionally pairs the last morpheme of
/// an eojeol with the first of the next.
pub fn extract_korean_pairs<I>(corpus: I, map: &TagClassMap, cross_eojeol: bool) -> KorNounPairs
where
    I: IntoIterator<Item = KorSentence>,
{
    let mut pairs = KorNounPairs::default();
    for sentence in corpus {
        for eojeol in sentence.eojeols() {
            for window in eojeol.windows(2) {
                record_if_nouns(&mut pairs, map, &window[0], &window[1]);
            }
        }
        if cross_eojeol {
            for adjacent in sentence.eojeols().windows(2) {
                let left = adjacent[0].last().expect("eojeols are non-empty");
                let right = adjacent[1].first().expect("eojeols are non-empty");
                record_if_nouns(&mut pairs, map, left, right);
            }
        }
    }
    pairs
}

fn record_if_nouns(
    pairs: &mut KorNounPairs,
    map: &TagClassMap,
    left: &crate::model::KorMorpheme,
    right: &crate::model::KorMorpheme,
) {
    if map.classify(&left.tag) == TagClass::Noun && map.classify(&right.tag) == TagClass::Noun {
        pairs.insert(left.surface.clone(), right.surface.clone(), 1);
    }
}

/// Translates Korean noun pairs into Chinese pairs: every Chinese word whose
/// noun translations contain the Korean noun contributes. Pairs whose
/// aggregated count falls below `min_count` are dropped.
pub fn compile_pair_dict(pairs: &KorNounPairs, lex: &Lexicon, min_count: u64) -> NounPairDict {
    // reverse index: Korean noun -> Chinese words carrying it as a noun translation
    let mut reverse: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for entry in lex.entries() {
        for lemma in lex.noun_translations(&entry.word) {
            reverse.entry(lemma.as_str()).or_default().push(&entry.word);
        }
    }

    let mut dict = NounPairDict::default();
    for ((k1, k2), count) in pairs.counts() {
        let (Some(lefts), Some(rights)) = (reverse.get(k1.as_str()), reverse.get(k2.as_str()))
        else {
            continue;
        };
        for z1 in lefts {
            for z2 in rights {
                *dict
                    .counts
                    .entry((z1.to_string(), z2.to_string()))
                    .or_insert(0) += count;
            }
        }
    }
    dict.counts.retain(|_, c| *c >= min_count.max(1));
    dict
}
