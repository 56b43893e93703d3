//! Query layer over the bilingual dictionary: per-word POS sets,
//! noun/verb membership, and Korean translations per sense.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::PosTag;

/// One POS reading of a word together with its Korean lemma translations.
/// Translations may be empty when no lemma is known for the sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sense {
    pub pos: PosTag,
    pub translations: Vec<String>,
}

/// A word's full dictionary entry. At least one sense; no duplicate POS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub senses: Vec<Sense>,
}

impl LexiconEntry {
    pub fn sense(&self, pos: &PosTag) -> Option<&Sense> {
        self.senses.iter().find(|s| &s.pos == pos)
    }
}

/// The loaded Chinese→Korean dictionary. Absent words are distinguishable
/// from present ones: every stored entry has at least one sense.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
    max_word_chars: usize,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// Adds a sense, merging into an existing entry. Translations for a
    /// duplicate (word, pos) are appended and deduplicated.
    pub fn add_sense(
        &mut self,
        word: impl Into<String>,
        pos: PosTag,
        translations: Vec<String>,
    ) -> Result<()> {
        let word = word.into();
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!(
                "lexicon word {word:?} must be non-empty without whitespace"
            )));
        }
        self.max_word_chars = self.max_word_chars.max(word.chars().count());
        let entry = self
            .entries
            .entry(word.clone())
            .or_insert_with(|| LexiconEntry {
                word,
                senses: Vec::new(),
            });
        match entry.senses.iter_mut().find(|s| s.pos == pos) {
            Some(sense) => {
                for t in translations {
                    if !sense.translations.contains(&t) {
                        sense.translations.push(t);
                    }
                }
            }
            None => {
                let mut deduped = Vec::new();
                for t in translations {
                    if !deduped.contains(&t) {
                        deduped.push(t);
                    }
                }
                entry.senses.push(Sense {
                    pos,
                    translations: deduped,
                });
            }
        }
        Ok(())
    }

    pub fn entry(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Length in characters of the longest word; feeds maximum matching.
    pub fn max_word_chars(&self) -> usize {
        self.max_word_chars
    }

    /// The word's exact POS set, or `None` for an unknown word.
    pub fn pos_set(&self, word: &str) -> Option<BTreeSet<PosTag>> {
        self.entries
            .get(word)
            .map(|e| e.senses.iter().map(|s| s.pos.clone()).collect())
    }

    pub fn has_pos(&self, word: &str, pos: &PosTag) -> bool {
        self.entries
            .get(word)
            .map(|e| e.sense(pos).is_some())
            .unwrap_or(false)
    }

    /// True iff the word has a verb sense. Unknown words report false.
    pub fn has_verb(&self, word: &str) -> bool {
        self.has_pos(word, &PosTag::verb())
    }

    /// True iff the word has a noun sense. Unknown words report false.
    pub fn has_noun(&self, word: &str) -> bool {
        self.has_pos(word, &PosTag::noun())
    }

    pub fn translations(&self, word: &str, pos: &PosTag) -> &[String] {
        self.entries
            .get(word)
            .and_then(|e| e.sense(pos))
            .map(|s| s.translations.as_slice())
            .unwrap_or(&[])
    }

    /// Korean lemmas of the verb sense; empty when the sense is absent or
    /// carries no translation.
    pub fn verb_translations(&self, word: &str) -> &[String] {
        self.translations(word, &PosTag::verb())
    }

    /// Korean lemmas of the noun sense.
    pub fn noun_translations(&self, word: &str) -> &[String] {
        self.translations(word, &PosTag::noun())
    }

    /// True iff the word is known and `tag` is its only POS.
    pub fn is_single_pos(&self, word: &str, tag: &PosTag) -> bool {
        match self.entries.get(word) {
            Some(e) => e.senses.len() == 1 && e.senses[0].pos == *tag,
            None => false,
        }
    }

    /// The unique POS of a single-POS word, if any.
    pub fn single_pos(&self, word: &str) -> Option<&PosTag> {
        match self.entries.get(word) {
            Some(e) if e.senses.len() == 1 => Some(&e.senses[0].pos),
            _ => None,
        }
    }
}
