//! The POS-decision rule representation: rulesets of condition patterns
//! with a `setpos` action, a certainty factor and a support count, plus the
//! matcher that applies them to partially tagged sentences.
//!
//! On disk a ruleset looks like
//!
//! ```text
//! <ruleset name="posdecpos" kind="vn">
//!   <rule cond="any+word(了)" support="5">
//!     setpos(0,v)
//!   </rule>
//! </ruleset>
//! ```
//!
//! `cond` is a `+`-joined atom list; `any` marks the ambiguous slot, `word(X)`
//! a literal neighbor, `spos(t)` a single-POS neighbor. `main` (default 0)
//! is the atom index of the ambiguous slot, which is also the index `setpos`
//! must target.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::model::{ChiSentence, PosTag, Provenance, TaggedSentence};

/// One condition atom of a rule pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CondAtom {
    /// Matches any word; the atom at `main` must be this.
    Any,
    /// Matches the exact surface form.
    Word(String),
    /// Matches a word whose lexicon entry has exactly this one POS.
    Spos(PosTag),
}

impl CondAtom {
    fn render(&self) -> String {
        match self {
            CondAtom::Any => "any".to_string(),
            CondAtom::Word(w) => format!("word({w})"),
            CondAtom::Spos(t) => format!("spos({t})"),
        }
    }
}

/// A single POS-decision rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub atoms: Vec<CondAtom>,
    /// Index of the ambiguous slot within `atoms`.
    pub main: usize,
    /// Index `setpos` assigns to; always equal to `main`.
    pub action_index: usize,
    pub action_tag: PosTag,
    /// Certainty factor in [0, 1]; parse default 1.0.
    pub cf: f64,
    /// Number of agreeing contexts behind the rule; parse default 0.
    pub support: u64,
}

impl Rule {
    pub fn new(
        atoms: Vec<CondAtom>,
        main: usize,
        action_index: usize,
        action_tag: PosTag,
        cf: f64,
        support: u64,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("rule needs at least one atom"));
        }
        for atom in &atoms {
            if let CondAtom::Word(literal) = atom {
                if literal.is_empty() {
                    return Err(Error::invalid("word literal must not be empty"));
                }
                if literal
                    .chars()
                    .any(|c| c.is_whitespace() || c == '"' || c == ')')
                {
                    return Err(Error::invalid(format!(
                        "word literal {literal:?} contains whitespace, '\"' or ')'"
                    )));
                }
            }
        }
        if main >= atoms.len() {
            return Err(Error::invalid(format!(
                "main index {main} out of range for {} atoms",
                atoms.len()
            )));
        }
        if action_index >= atoms.len() {
            return Err(Error::invalid(format!(
                "setpos index {action_index} out of range for {} atoms",
                atoms.len()
            )));
        }
        if atoms[main] != CondAtom::Any {
            return Err(Error::invalid(format!(
                "atom at main index {main} must be 'any'"
            )));
        }
        if action_index != main {
            return Err(Error::invalid(format!(
                "setpos index {action_index} must equal main index {main}"
            )));
        }
        if !(0.0..=1.0).contains(&cf) {
            return Err(Error::invalid(format!("cf {cf} outside [0, 1]")));
        }
        Ok(Rule {
            atoms,
            main,
            action_index,
            action_tag,
            cf,
            support,
        })
    }

    pub fn cond_string(&self) -> String {
        self.atoms
            .iter()
            .map(CondAtom::render)
            .collect::<Vec<_>>()
            .join("+")
    }

    /// True iff aligning `atoms[main]` with word `i` keeps the whole pattern
    /// inside the sentence and every atom matches its aligned word. There
    /// are no virtual boundary words: a pattern reaching past either end
    /// never matches.
    pub fn matches_at(&self, sent: &ChiSentence, lex: &Lexicon, i: usize) -> bool {
        let Some(start) = i.checked_sub(self.main) else {
            return false;
        };
        if start + self.atoms.len() > sent.len() {
            return false;
        }
        self.atoms.iter().enumerate().all(|(j, atom)| {
            let word = &sent.words()[start + j];
            match atom {
                CondAtom::Any => true,
                CondAtom::Word(lit) => word == lit,
                CondAtom::Spos(tag) => lex.is_single_pos(word, tag),
            }
        })
    }
}

/// An ordered collection of rules targeting one ambiguity class.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub name: String,
    /// The ambiguity class, e.g. `[v, n]` for kind `"vn"`. Order is
    /// preserved for serialization; matching treats it as a set.
    pub kind: Vec<PosTag>,
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new(name: impl Into<String>, kind: Vec<PosTag>, rules: Vec<Rule>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::invalid("ruleset name must not be empty"));
        }
        let distinct: BTreeSet<&PosTag> = kind.iter().collect();
        if distinct.len() < 2 {
            return Err(Error::invalid(
                "ruleset kind needs at least two distinct tags",
            ));
        }
        if distinct.len() != kind.len() {
            return Err(Error::invalid("ruleset kind has duplicate tags"));
        }
        if kind.iter().any(|t| t.code().chars().count() != 1) {
            return Err(Error::invalid(
                "ruleset kind tags must be single-letter codes",
            ));
        }
        for (k, rule) in rules.iter().enumerate() {
            if !kind.contains(&rule.action_tag) {
                return Err(Error::invalid(format!(
                    "rule {}: action tag {:?} is outside kind {:?}",
                    k + 1,
                    rule.action_tag.code(),
                    kind_string_of(&kind),
                )));
            }
        }
        Ok(RuleSet { name, kind, rules })
    }

    pub fn kind_string(&self) -> String {
        kind_string_of(&self.kind)
    }

    pub fn kind_set(&self) -> BTreeSet<PosTag> {
        self.kind.iter().cloned().collect()
    }
}

fn kind_string_of(kind: &[PosTag]) -> String {
    kind.iter().map(|t| t.code()).collect()
}

/// How a word's POS set must relate to a ruleset's kind before rules apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KindMatch {
    /// The word's POS set equals the kind set exactly.
    #[default]
    Exact,
    /// The word's POS set contains the kind set.
    Superset,
}

/// Applies a ruleset to every still-unresolved word whose POS set matches
/// the ruleset kind. Rules are tried in (cf desc, support desc, document
/// order); the first match assigns its tag with [`Provenance::Rule`].
/// Already-resolved words are never touched.
pub fn apply_ruleset(
    rs: &RuleSet,
    sent: &ChiSentence,
    partial: &TaggedSentence,
    lex: &Lexicon,
    kind_match: KindMatch,
) -> TaggedSentence {
    assert!(
        partial.aligned_with(sent),
        "partial tagging must align with the sentence"
    );
    let kind_set = rs.kind_set();
    let mut order: Vec<usize> = (0..rs.rules.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&rs.rules[a], &rs.rules[b]);
        rb.cf
            .total_cmp(&ra.cf)
            .then(rb.support.cmp(&ra.support))
            .then(a.cmp(&b))
    });

    let mut out = partial.clone();
    for (i, item) in out.items.iter_mut().enumerate() {
        if item.is_resolved() {
            continue;
        }
        let Some(pos_set) = lex.pos_set(&item.word) else {
            continue;
        };
        let applies = match kind_match {
            KindMatch::Exact => pos_set == kind_set,
            KindMatch::Superset => kind_set.iter().all(|t| pos_set.contains(t)),
        };
        if !applies {
            continue;
        }
        for &k in &order {
            let rule = &rs.rules[k];
            if rule.matches_at(sent, lex, i) {
                *item = crate::model::TaggedWord::resolved(
                    item.word.clone(),
                    rule.action_tag.clone(),
                    Provenance::Rule,
                );
                break;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            text,
            pos: 0,
            line: 1,
        }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        if c == '\n' {
            self.line += 1;
        }
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            for _ in token.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str, context: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(Error::parse(
                self.line,
                format!("expected {token:?} {context}"),
            ))
        }
    }

    fn read_ident(&mut self) -> String {
        let mut ident = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            ident.push(self.bump().unwrap());
        }
        ident
    }

    fn read_until(&mut self, stop: char, context: &str) -> Result<String> {
        let mut value = String::new();
        loop {
            match self.peek() {
                Some(c) if c == stop => {
                    self.bump();
                    return Ok(value);
                }
                Some(_) => value.push(self.bump().unwrap()),
                None => {
                    return Err(Error::parse(
                        self.line,
                        format!("unterminated {context} (missing {stop:?})"),
                    ))
                }
            }
        }
    }

    /// Reads `key="value"` attributes up to the closing `>`.
    fn read_attrs(&mut self, element: &str) -> Result<Vec<(String, String)>> {
        let mut attrs = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('>') => {
                    self.bump();
                    return Ok(attrs);
                }
                Some(_) => {
                    let key = self.read_ident();
                    if key.is_empty() {
                        return Err(Error::parse(
                            self.line,
                            format!("malformed attribute in <{element}>"),
                        ));
                    }
                    self.skip_ws();
                    self.expect("=", &format!("after attribute {key:?}"))?;
                    self.skip_ws();
                    self.expect("\"", &format!("opening quote for {key:?}"))?;
                    let value = self.read_until('"', &format!("attribute {key:?}"))?;
                    attrs.push((key, value));
                }
                None => {
                    return Err(Error::parse(
                        self.line,
                        format!("unterminated <{element}> tag"),
                    ))
                }
            }
        }
    }
}

fn parse_cond(cond: &str, line: usize, ordinal: usize) -> Result<Vec<CondAtom>> {
    let mut atoms = Vec::new();
    let mut cur = Cursor::new(cond);
    loop {
        let name = cur.read_ident();
        match name.as_str() {
            "any" => atoms.push(CondAtom::Any),
            "word" => {
                cur.expect("(", "after 'word'")
                    .map_err(|_| rule_err(line, ordinal, "word atom needs '('"))?;
                let lit = cur
                    .read_until(')', "word literal")
                    .map_err(|_| rule_err(line, ordinal, "unterminated word literal"))?;
                if lit.is_empty() {
                    return Err(rule_err(line, ordinal, "empty word literal"));
                }
                atoms.push(CondAtom::Word(lit));
            }
            "spos" => {
                cur.expect("(", "after 'spos'")
                    .map_err(|_| rule_err(line, ordinal, "spos atom needs '('"))?;
                let code = cur
                    .read_until(')', "spos tag")
                    .map_err(|_| rule_err(line, ordinal, "unterminated spos tag"))?;
                let tag = PosTag::new(code.trim())
                    .map_err(|e| rule_err(line, ordinal, format!("bad spos tag: {e}")))?;
                atoms.push(CondAtom::Spos(tag));
            }
            other => {
                return Err(rule_err(
                    line,
                    ordinal,
                    format!("unknown condition atom {other:?}"),
                ))
            }
        }
        match cur.peek() {
            None => break,
            Some('+') => {
                cur.bump();
            }
            Some(c) => {
                return Err(rule_err(
                    line,
                    ordinal,
                    format!("unexpected {c:?} in condition"),
                ))
            }
        }
    }
    Ok(atoms)
}

fn rule_err(line: usize, ordinal: usize, message: impl Into<String>) -> Error {
    Error::parse(line, format!("rule {ordinal}: {}", message.into()))
}

fn parse_rule(cur: &mut Cursor<'_>, ordinal: usize, kind: &[PosTag]) -> Result<Rule> {
    let attr_line = cur.line;
    let attrs = cur.read_attrs("rule")?;
    let mut cond = None;
    let mut main = 0usize;
    let mut cf = 1.0f64;
    let mut support = 0u64;
    for (key, value) in attrs {
        match key.as_str() {
            "cond" => cond = Some(value),
            "main" => {
                main = value
                    .parse()
                    .map_err(|_| rule_err(attr_line, ordinal, format!("bad main {value:?}")))?
            }
            "cf" => {
                cf = value
                    .parse()
                    .map_err(|_| rule_err(attr_line, ordinal, format!("bad cf {value:?}")))?
            }
            "support" => {
                support = value
                    .parse()
                    .map_err(|_| rule_err(attr_line, ordinal, format!("bad support {value:?}")))?
            }
            other => {
                return Err(rule_err(
                    attr_line,
                    ordinal,
                    format!("unknown rule attribute {other:?}"),
                ))
            }
        }
    }
    let cond = cond.ok_or_else(|| rule_err(attr_line, ordinal, "missing cond attribute"))?;
    let atoms = parse_cond(&cond, attr_line, ordinal)?;

    cur.skip_ws();
    let action_line = cur.line;
    cur.expect("setpos", &format!("in rule {ordinal}"))?;
    cur.skip_ws();
    cur.expect("(", "after setpos")?;
    cur.skip_ws();
    let mut index_text = String::new();
    while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
        index_text.push(cur.bump().unwrap());
    }
    let action_index: usize = index_text
        .parse()
        .map_err(|_| rule_err(action_line, ordinal, "bad setpos index"))?;
    cur.skip_ws();
    cur.expect(",", "in setpos")?;
    let tag_text = cur.read_until(')', "setpos tag")?;
    let action_tag = PosTag::new(tag_text.trim())
        .map_err(|e| rule_err(action_line, ordinal, format!("bad setpos tag: {e}")))?;
    if !kind.contains(&action_tag) {
        return Err(rule_err(
            action_line,
            ordinal,
            format!(
                "action tag {:?} is outside kind {:?}",
                action_tag.code(),
                kind_string_of(kind)
            ),
        ));
    }
    cur.skip_ws();
    cur.expect("</rule>", &format!("closing rule {ordinal}"))?;

    Rule::new(atoms, main, action_index, action_tag, cf, support)
        .map_err(|e| rule_err(attr_line, ordinal, e.to_string()))
}

fn parse_one_ruleset(cur: &mut Cursor<'_>) -> Result<RuleSet> {
    let open_line = cur.line;
    let attrs = cur.read_attrs("ruleset")?;
    let mut name = None;
    let mut kind_text = None;
    for (key, value) in attrs {
        match key.as_str() {
            "name" => name = Some(value),
            "kind" => kind_text = Some(value),
            other => {
                return Err(Error::parse(
                    open_line,
                    format!("unknown ruleset attribute {other:?}"),
                ))
            }
        }
    }
    let name = name.ok_or_else(|| Error::parse(open_line, "ruleset missing name"))?;
    let kind_text = kind_text.ok_or_else(|| Error::parse(open_line, "ruleset missing kind"))?;
    let kind: Vec<PosTag> = kind_text
        .chars()
        .map(|c| PosTag::new(c.to_string()))
        .collect::<Result<_>>()
        .map_err(|e| Error::parse(open_line, format!("bad kind {kind_text:?}: {e}")))?;

    let mut rules = Vec::new();
    loop {
        cur.skip_ws();
        if cur.eat("</ruleset>") {
            break;
        }
        if cur.eat("<rule") {
            let ordinal = rules.len() + 1;
            rules.push(parse_rule(cur, ordinal, &kind)?);
        } else {
            return Err(Error::parse(
                cur.line,
                "expected <rule ...> or </ruleset>".to_string(),
            ));
        }
    }
    RuleSet::new(name, kind, rules).map_err(|e| Error::parse(open_line, e.to_string()))
}

/// Parses a document of one or more concatenated rulesets.
pub fn parse_rulesets(text: &str) -> Result<Vec<RuleSet>> {
    let (text, _) = crate::corpus::strip_bom(text);
    let mut cur = Cursor::new(text);
    let mut sets = Vec::new();
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            return Ok(sets);
        }
        cur.expect("<ruleset", "at top level")?;
        sets.push(parse_one_ruleset(&mut cur)?);
    }
}

/// Parses a document expected to hold exactly one ruleset.
pub fn parse_ruleset(text: &str) -> Result<RuleSet> {
    let mut sets = parse_rulesets(text)?;
    match sets.len() {
        1 => Ok(sets.pop().unwrap()),
        n => Err(Error::invalid(format!(
            "expected exactly 1 ruleset, found {n}"
        ))),
    }
}

/// Canonical serialization. Attributes with their parse defaults
/// (`main="0"`, `cf="1"`, `support="0"`) are omitted, so a document written
/// in canonical form parses back to a structurally equal value.
pub fn serialize_ruleset(rs: &RuleSet) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "<ruleset name=\"{}\" kind=\"{}\">\n",
        rs.name,
        rs.kind_string()
    ));
    for rule in &rs.rules {
        out.push_str(&format!("  <rule cond=\"{}\"", rule.cond_string()));
        if rule.main != 0 {
            out.push_str(&format!(" main=\"{}\"", rule.main));
        }
        if rule.cf != 1.0 {
            out.push_str(&format!(" cf=\"{}\"", rule.cf));
        }
        if rule.support != 0 {
            out.push_str(&format!(" support=\"{}\"", rule.support));
        }
        out.push_str(">\n");
        out.push_str(&format!(
            "    setpos({},{})\n",
            rule.action_index, rule.action_tag
        ));
        out.push_str("  </rule>\n");
    }
    out.push_str("</ruleset>\n");
    out
}

pub fn serialize_rulesets(sets: &[RuleSet]) -> String {
    sets.iter().map(serialize_ruleset).collect()
}
