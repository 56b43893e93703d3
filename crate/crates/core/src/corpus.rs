//! Readers and writers for the plain-text artifacts: Korean tagged corpora,
//! bilingual sentence pairs, tagged Chinese text, and the lexicon TSV.
//!
//! Readers are single-pass line iterators, so memory stays bounded by the
//! largest record regardless of file size. All errors carry 1-based line
//! (and where useful, column) positions.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::model::{
    ChiSentence, KorMorpheme, KorSentence, PosInventory, PosTag, Provenance, TaggedSentence,
    TaggedWord,
};

/// Strips a leading UTF-8 byte-order mark. Returns the remaining text and
/// whether a BOM was present so callers can warn about it.
pub fn strip_bom(text: &str) -> (&str, bool) {
    match text.strip_prefix('\u{feff}') {
        Some(rest) => (rest, true),
        None => (text, false),
    }
}

/// A Chinese sentence paired with its tagged Korean translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilingualPair {
    pub zh: ChiSentence,
    pub ko: KorSentence,
}

fn parse_korean_line(raw: &str, line_no: usize) -> Result<Option<KorSentence>> {
    if raw.trim().is_empty() {
        return Ok(None);
    }
    let mut eojeols: Vec<Vec<KorMorpheme>> = Vec::new();
    // Walk non-whitespace runs manually so errors can report a character
    // column, not just the line.
    let mut chars = raw.char_indices().peekable();
    let mut char_col = 0usize;
    while let Some(&(byte_start, ch)) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
            char_col += 1;
            continue;
        }
        let eojeol_col = char_col + 1;
        let mut byte_end = byte_start;
        while let Some(&(b, c)) = chars.peek() {
            if c.is_whitespace() {
                break;
            }
            byte_end = b + c.len_utf8();
            chars.next();
            char_col += 1;
        }
        let eojeol_text = &raw[byte_start..byte_end];
        let mut morphemes = Vec::new();
        let mut offset = 0usize; // chars consumed inside the eojeol
        for (k, piece) in eojeol_text.split("++").enumerate() {
            if k > 0 {
                offset += 2;
            }
            let col = eojeol_col + offset;
            let (surface, tag) = piece.rsplit_once('/').ok_or_else(|| {
                Error::parse_at(line_no, col, format!("morpheme {piece:?} has no '/'"))
            })?;
            if surface.is_empty() {
                return Err(Error::parse_at(line_no, col, "empty morpheme surface"));
            }
            let tag = PosTag::new(tag)
                .map_err(|e| Error::parse_at(line_no, col, format!("bad tag: {e}")))?;
            morphemes.push(KorMorpheme::new(surface, tag).expect("surface checked non-empty"));
            offset += piece.chars().count();
        }
        eojeols.push(morphemes);
    }
    Ok(Some(KorSentence::new(eojeols)?))
}

/// Streaming reader over a Korean POS-tagged corpus: one sentence per line,
/// eojeols space-separated, morphemes joined by `++`, each `surface/TAG`.
/// Empty lines are skipped.
pub struct KoreanReader<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> KoreanReader<R> {
    pub fn new(reader: R) -> Self {
        KoreanReader {
            lines: reader.lines(),
            line_no: 0,
        }
    }
}

impl<R: BufRead> Iterator for KoreanReader<R> {
    type Item = Result<KorSentence>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let raw = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            let line = if self.line_no == 1 {
                strip_bom(&raw).0
            } else {
                raw.as_str()
            };
            match parse_korean_line(line, self.line_no) {
                Ok(Some(sentence)) => return Some(Ok(sentence)),
                Ok(None) => continue,
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

pub fn read_korean_corpus<R: BufRead>(reader: R) -> KoreanReader<R> {
    KoreanReader::new(reader)
}

/// Parses a whole Korean corpus held in memory.
pub fn parse_korean_corpus(text: &str) -> Result<Vec<KorSentence>> {
    read_korean_corpus(strip_bom(text).0.as_bytes()).collect()
}

/// Streaming reader over a bilingual corpus: records of two non-blank lines
/// (Chinese words space-separated, then the tagged Korean sentence),
/// records separated by blank lines.
pub struct BilingualReader<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: usize,
    record_no: usize,
    done: bool,
}

impl<R: BufRead> BilingualReader<R> {
    pub fn new(reader: R) -> Self {
        BilingualReader {
            lines: reader.lines(),
            line_no: 0,
            record_no: 0,
            done: false,
        }
    }

    fn next_line(&mut self) -> Option<Result<String>> {
        let raw = match self.lines.next()? {
            Ok(l) => l,
            Err(e) => return Some(Err(e.into())),
        };
        self.line_no += 1;
        if self.line_no == 1 {
            let (stripped, _) = strip_bom(&raw);
            return Some(Ok(stripped.to_string()));
        }
        Some(Ok(raw))
    }
}

impl<R: BufRead> Iterator for BilingualReader<R> {
    type Item = Result<BilingualPair>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        // skip blank lines between records
        let zh_line = loop {
            match self.next_line() {
                None => return None,
                Some(Err(e)) => return Some(Err(e)),
                Some(Ok(l)) if l.trim().is_empty() => continue,
                Some(Ok(l)) => break l,
            }
        };
        self.record_no += 1;
        let record = self.record_no;
        let zh_line_no = self.line_no;

        let ko_line = match self.next_line() {
            None => {
                self.done = true;
                return Some(Err(Error::Record {
                    record,
                    message: format!(
                        "truncated record: Chinese line {zh_line_no} has no Korean line"
                    ),
                }));
            }
            Some(Err(e)) => return Some(Err(e)),
            Some(Ok(l)) if l.trim().is_empty() => {
                self.done = true;
                return Some(Err(Error::Record {
                    record,
                    message: format!(
                        "truncated record: Chinese line {zh_line_no} has no Korean line"
                    ),
                }));
            }
            Some(Ok(l)) => l,
        };

        // the record must end here: blank line or EOF
        match self.next_line() {
            None => self.done = true,
            Some(Err(e)) => return Some(Err(e)),
            Some(Ok(l)) if l.trim().is_empty() => {}
            Some(Ok(_)) => {
                self.done = true;
                return Some(Err(Error::Record {
                    record,
                    message: format!("record has more than two lines (line {})", self.line_no),
                }));
            }
        }

        let words: Vec<String> = zh_line.split_whitespace().map(str::to_string).collect();
        if words.is_empty() {
            return Some(Err(Error::Record {
                record,
                message: "empty Chinese side".to_string(),
            }));
        }
        let zh = match ChiSentence::new(words) {
            Ok(s) => s,
            Err(e) => {
                return Some(Err(Error::Record {
                    record,
                    message: e.to_string(),
                }))
            }
        };
        let ko = match parse_korean_line(&ko_line, self.line_no) {
            Ok(Some(s)) => s,
            Ok(None) => unreachable!("blank Korean lines are rejected above"),
            Err(e) => {
                return Some(Err(Error::Record {
                    record,
                    message: e.to_string(),
                }))
            }
        };
        Some(Ok(BilingualPair { zh, ko }))
    }
}

pub fn read_bilingual_corpus<R: BufRead>(reader: R) -> BilingualReader<R> {
    BilingualReader::new(reader)
}

pub fn parse_bilingual_corpus(text: &str) -> Result<Vec<BilingualPair>> {
    read_bilingual_corpus(strip_bom(text).0.as_bytes()).collect()
}

/// Streaming reader over tagged Chinese text: one sentence per line, tokens
/// `word/pos` space-separated. Loaded tags carry [`Provenance::Given`].
pub struct TaggedReader<R: BufRead> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> TaggedReader<R> {
    pub fn new(reader: R) -> Self {
        TaggedReader {
            lines: reader.lines(),
            line_no: 0,
        }
    }
}

impl<R: BufRead> Iterator for TaggedReader<R> {
    type Item = Result<TaggedSentence>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let raw = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            let line = if self.line_no == 1 {
                strip_bom(&raw).0
            } else {
                raw.as_str()
            };
            if line.trim().is_empty() {
                continue;
            }
            let mut items = Vec::new();
            for token in line.split_whitespace() {
                let (word, tag) = match token.rsplit_once('/') {
                    Some(split) => split,
                    None => {
                        return Some(Err(Error::parse(
                            self.line_no,
                            format!("token {token:?} has no '/'"),
                        )))
                    }
                };
                if word.is_empty() {
                    return Some(Err(Error::parse(
                        self.line_no,
                        format!("token {token:?} has an empty word"),
                    )));
                }
                let tag = match PosTag::new(tag) {
                    Ok(t) => t,
                    Err(e) => {
                        return Some(Err(Error::parse(
                            self.line_no,
                            format!("token {token:?}: {e}"),
                        )))
                    }
                };
                items.push(TaggedWord::resolved(word, tag, Provenance::Given));
            }
            return Some(Ok(TaggedSentence { items }));
        }
    }
}

pub fn read_tagged_chinese<R: BufRead>(reader: R) -> TaggedReader<R> {
    TaggedReader::new(reader)
}

pub fn parse_tagged_chinese(text: &str) -> Result<Vec<TaggedSentence>> {
    read_tagged_chinese(strip_bom(text).0.as_bytes()).collect()
}

/// Serializes tagged sentences, one per line, tokens `word/pos`.
/// Every word must be resolved.
pub fn write_tagged_chinese(sentences: &[TaggedSentence]) -> Result<String> {
    let mut out = String::new();
    for (i, sentence) in sentences.iter().enumerate() {
        let mut first = true;
        for (j, item) in sentence.items.iter().enumerate() {
            let tag = item.tag().ok_or_else(|| {
                Error::invalid(format!(
                    "sentence {}, word {} ({:?}) is unresolved",
                    i + 1,
                    j + 1,
                    item.word
                ))
            })?;
            if !first {
                out.push(' ');
            }
            out.push_str(&item.word);
            out.push('/');
            out.push_str(tag.code());
            first = false;
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parses the lexicon TSV: `WORD<TAB>POS<TAB>TRANSLATIONS` with
/// `|`-separated translations (third field optional), `#` comments.
/// POS codes are validated against `inventory`.
pub fn read_lexicon<R: BufRead>(reader: R, inventory: &PosInventory) -> Result<Lexicon> {
    let mut lex = Lexicon::new();
    for (idx, raw) in reader.lines().enumerate() {
        let raw = raw?;
        let line_no = idx + 1;
        let line = if line_no == 1 {
            strip_bom(&raw).0
        } else {
            &raw
        };
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let word = fields.next().unwrap_or("");
        let pos = fields
            .next()
            .ok_or_else(|| Error::parse(line_no, "expected WORD<TAB>POS[<TAB>TRANSLATIONS]"))?;
        let translations = fields.next().unwrap_or("");
        if fields.next().is_some() {
            return Err(Error::parse(line_no, "too many fields"));
        }
        if word.is_empty() {
            return Err(Error::parse(line_no, "empty word"));
        }
        let pos = PosTag::new(pos).map_err(|e| Error::parse(line_no, e.to_string()))?;
        if !inventory.contains(&pos) {
            return Err(Error::parse(
                line_no,
                format!(
                    "POS code {:?} is not in the configured inventory",
                    pos.code()
                ),
            ));
        }
        let translations: Vec<String> = translations
            .split('|')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        lex.add_sense(word, pos, translations)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
    }
    Ok(lex)
}

pub fn parse_lexicon(text: &str, inventory: &PosInventory) -> Result<Lexicon> {
    read_lexicon(strip_bom(text).0.as_bytes(), inventory)
}

/// Serializes a lexicon in sorted word order, senses in entry order.
pub fn write_lexicon(lex: &Lexicon) -> String {
    let mut out = String::new();
    for entry in lex.entries() {
        for sense in &entry.senses {
            out.push_str(&entry.word);
            out.push('\t');
            out.push_str(sense.pos.code());
            out.push('\t');
            out.push_str(&sense.translations.join("|"));
            out.push('\n');
        }
    }
    out
}
