//! Shared vocabulary of the tagger: POS tags, tag classes, sentence
//! representations for both languages, and tagged output with per-word
//! provenance.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A part-of-speech tag code, e.g. `n`, `v`, `NNGC`, `PVG`.
///
/// Codes are compared by exact string equality; case is preserved as read.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PosTag(String);

impl PosTag {
    /// Validates and wraps a tag code. Codes must be non-empty and free of
    /// whitespace, `/` and `+` (all three collide with corpus syntax).
    pub fn new(code: impl Into<String>) -> Result<Self> {
        let code = code.into();
        if code.is_empty() {
            return Err(Error::invalid("POS tag code must not be empty"));
        }
        if code
            .chars()
            .any(|c| c.is_whitespace() || c == '/' || c == '+')
        {
            return Err(Error::invalid(format!(
                "POS tag code {code:?} contains whitespace, '/' or '+'"
            )));
        }
        Ok(PosTag(code))
    }

    pub fn code(&self) -> &str {
        &self.0
    }

    /// The conventional Chinese noun tag.
    pub fn noun() -> Self {
        PosTag("n".to_string())
    }

    /// The conventional Chinese verb tag.
    pub fn verb() -> Self {
        PosTag("v".to_string())
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Coarse grammatical class a tag maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TagClass {
    Noun,
    Verb,
    Other,
}

impl TagClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            TagClass::Noun => "noun",
            TagClass::Verb => "verb",
            TagClass::Other => "other",
        }
    }
}

impl fmt::Display for TagClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered prefix → class table bridging coarse (`N`, `V`) and fine
/// (`NNGC`, `PVG`, ...) Korean tag sets. The longest matching prefix wins;
/// length ties go to the earlier entry; no match means [`TagClass::Other`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagClassMap {
    entries: Vec<(String, TagClass)>,
}

impl TagClassMap {
    pub fn new(entries: Vec<(String, TagClass)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (prefix, _) in &entries {
            if prefix.is_empty() || prefix.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!(
                    "tag-class prefix {prefix:?} must be non-empty without whitespace"
                )));
            }
            if !seen.insert(prefix.clone()) {
                return Err(Error::invalid(format!(
                    "duplicate tag-class prefix {prefix:?}"
                )));
            }
        }
        Ok(TagClassMap { entries })
    }

    /// Parses the on-disk form: one `PREFIX<TAB>CLASS` per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (prefix, class) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(line_no, "expected PREFIX<TAB>CLASS".to_string()))?;
            let prefix = prefix.trim();
            let class = match class.trim() {
                "noun" => TagClass::Noun,
                "verb" => TagClass::Verb,
                "other" => TagClass::Other,
                other => {
                    return Err(Error::parse(
                        line_no,
                        format!("unknown class {other:?} (expected noun, verb or other)"),
                    ))
                }
            };
            if prefix.is_empty() {
                return Err(Error::parse(line_no, "empty prefix"));
            }
            if !seen.insert(prefix) {
                return Err(Error::parse(
                    line_no,
                    format!("duplicate prefix {prefix:?}"),
                ));
            }
            entries.push((prefix.to_string(), class));
        }
        // entries were validated line by line
        Ok(TagClassMap { entries })
    }

    /// Classifies a tag by its longest matching prefix.
    pub fn classify(&self, tag: &PosTag) -> TagClass {
        let mut best: Option<(usize, TagClass)> = None;
        for (prefix, class) in &self.entries {
            if tag.code().starts_with(prefix.as_str()) {
                let len = prefix.len();
                match best {
                    Some((best_len, _)) if best_len >= len => {}
                    _ => best = Some((len, *class)),
                }
            }
        }
        best.map(|(_, c)| c).unwrap_or(TagClass::Other)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, TagClass)] {
        &self.entries
    }
}

/// The configured Chinese tag inventory. Lexicon entries and rule tags are
/// validated against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosInventory(BTreeSet<PosTag>);

impl PosInventory {
    pub fn new(tags: impl IntoIterator<Item = PosTag>) -> Self {
        PosInventory(tags.into_iter().collect())
    }

    pub fn contains(&self, tag: &PosTag) -> bool {
        self.0.contains(tag)
    }

    pub fn tags(&self) -> impl Iterator<Item = &PosTag> {
        self.0.iter()
    }
}

impl Default for PosInventory {
    fn default() -> Self {
        let codes = ["n", "v", "a", "d", "r", "m", "q", "p", "c", "u", "t", "w"];
        PosInventory(
            codes
                .iter()
                .map(|c| PosTag::new(*c).expect("static codes are valid"))
                .collect(),
        )
    }
}

/// A segmented Chinese sentence: surface words in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChiSentence {
    words: Vec<String>,
}

impl ChiSentence {
    pub fn new(words: Vec<String>) -> Result<Self> {
        for word in &words {
            if word.is_empty() {
                return Err(Error::invalid("Chinese word must not be empty"));
            }
            if word.chars().any(char::is_whitespace) {
                return Err(Error::invalid(format!(
                    "Chinese word {word:?} contains whitespace"
                )));
            }
        }
        Ok(ChiSentence { words })
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// One tagged Korean morpheme, `surface/TAG` on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KorMorpheme {
    pub surface: String,
    pub tag: PosTag,
}

impl KorMorpheme {
    pub fn new(surface: impl Into<String>, tag: PosTag) -> Result<Self> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(Error::invalid("Korean morpheme surface must not be empty"));
        }
        Ok(KorMorpheme { surface, tag })
    }
}

/// A tagged Korean sentence: eojeols in order, each a non-empty run of
/// morphemes. The flat view preserves left-to-right order across eojeols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KorSentence {
    eojeols: Vec<Vec<KorMorpheme>>,
}

impl KorSentence {
    pub fn new(eojeols: Vec<Vec<KorMorpheme>>) -> Result<Self> {
        if eojeols.iter().any(Vec::is_empty) {
            return Err(Error::invalid("every eojeol needs at least one morpheme"));
        }
        Ok(KorSentence { eojeols })
    }

    pub fn eojeols(&self) -> &[Vec<KorMorpheme>] {
        &self.eojeols
    }

    /// Flat left-to-right view over all morphemes.
    pub fn morphemes(&self) -> impl Iterator<Item = &KorMorpheme> {
        self.eojeols.iter().flatten()
    }
}

/// Which pipeline stage resolved a word, or `Given` for tags that came in
/// from a tagged file rather than from the tagger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    SinglePos,
    NnDict,
    Rule,
    Statistical,
    UnknownFallback,
    Given,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::SinglePos => "single-pos",
            Provenance::NnDict => "nn-dict",
            Provenance::Rule => "rule",
            Provenance::Statistical => "statistical",
            Provenance::UnknownFallback => "unknown-fallback",
            Provenance::Given => "given",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A resolved tag together with the stage that assigned it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub tag: PosTag,
    pub provenance: Provenance,
}

/// One word of a (possibly partially) tagged sentence. `resolution` is
/// `None` while the word is still undecided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedWord {
    pub word: String,
    pub resolution: Option<Resolution>,
}

impl TaggedWord {
    pub fn unresolved(word: impl Into<String>) -> Self {
        TaggedWord {
            word: word.into(),
            resolution: None,
        }
    }

    pub fn resolved(word: impl Into<String>, tag: PosTag, provenance: Provenance) -> Self {
        TaggedWord {
            word: word.into(),
            resolution: Some(Resolution { tag, provenance }),
        }
    }

    pub fn tag(&self) -> Option<&PosTag> {
        self.resolution.as_ref().map(|r| &r.tag)
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.resolution.as_ref().map(|r| r.provenance)
    }

    pub fn is_resolved(&self) -> bool {
        self.resolution.is_some()
    }
}

/// A Chinese sentence with per-word tag state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedSentence {
    pub items: Vec<TaggedWord>,
}

impl TaggedSentence {
    /// All words unresolved, aligned with `sent`.
    pub fn from_sentence(sent: &ChiSentence) -> Self {
        TaggedSentence {
            items: sent
                .words()
                .iter()
                .map(|w| TaggedWord::unresolved(w.clone()))
                .collect(),
        }
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|item| item.word.as_str())
    }

    pub fn is_fully_resolved(&self) -> bool {
        self.items.iter().all(TaggedWord::is_resolved)
    }

    /// Checks word-sequence alignment against the underlying sentence.
    pub fn aligned_with(&self, sent: &ChiSentence) -> bool {
        self.items.len() == sent.len()
            && self
                .items
                .iter()
                .zip(sent.words())
                .all(|(item, word)| item.word == *word)
    }
}
