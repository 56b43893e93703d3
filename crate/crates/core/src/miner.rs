//! Mines POS-decision rules from a bilingual corpus: noun/verb-ambiguous
//! Chinese words are decided by matching their Korean translations against
//! the tagged Korean side, the neighbors of each decided word are recorded,
//! and recurring neighbor patterns are promoted to rules with a certainty
//! factor.

use std::collections::BTreeMap;
use std::fmt;

use crate::corpus::BilingualPair;
use crate::error::Result;
use crate::lexicon::Lexicon;
use crate::model::{PosTag, TagClass, TagClassMap};
use crate::rules::{CondAtom, Rule, RuleSet};

/// A translation-decided occurrence of an ambiguous word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    /// 1-based ordinal of the bilingual record.
    pub pair_index: usize,
    /// Position of the word in the Chinese sentence.
    pub word_index: usize,
    pub word: String,
    pub decided_tag: PosTag,
    /// The Korean lemma that matched.
    pub evidence: String,
}

/// The neighbor shapes recorded around a decided word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ContextTemplate {
    PrevWord,
    NextWord,
    PrevSpos,
    NextSpos,
}

/// One recorded neighbor observation: a template, its key (surface word or
/// single-POS tag code) and the tag the target word was decided to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextRecord {
    pub template: ContextTemplate,
    pub key: String,
    pub decided_tag: PosTag,
}

/// Mining thresholds and matching switches.
#[derive(Debug, Clone)]
pub struct MinerOptions {
    /// Minimum agreeing contexts before a pattern becomes a rule.
    pub min_support: u64,
    /// Minimum certainty factor of the majority tag.
    pub min_cf: f64,
    /// Also try matching a verb lemma against `stem + 다` for corpora that
    /// store bare verb stems.
    pub match_stem_plus_da: bool,
}

impl Default for MinerOptions {
    fn default() -> Self {
        MinerOptions {
            min_support: 3,
            min_cf: 0.9,
            match_stem_plus_da: false,
        }
    }
}

/// Summary counters of one mining run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MiningReport {
    pub pairs_processed: u64,
    pub verb_decisions: u64,
    pub noun_decisions: u64,
    pub contexts_recorded: u64,
    pub distinct_contexts: u64,
    pub rules_emitted: u64,
    pub rules_suppressed: u64,
}

impl fmt::Display for MiningReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pairs processed:    {}", self.pairs_processed)?;
        writeln!(f, "verb decisions:     {}", self.verb_decisions)?;
        writeln!(f, "noun decisions:     {}", self.noun_decisions)?;
        writeln!(f, "contexts recorded:  {}", self.contexts_recorded)?;
        writeln!(f, "distinct contexts:  {}", self.distinct_contexts)?;
        writeln!(f, "rules emitted:      {}", self.rules_emitted)?;
        write!(f, "rules suppressed:   {}", self.rules_suppressed)
    }
}

fn korean_has_lemma(
    pair: &BilingualPair,
    map: &TagClassMap,
    lemmas: &[String],
    class: TagClass,
    stem_plus_da: bool,
) -> Option<String> {
    for morpheme in pair.ko.morphemes() {
        if map.classify(&morpheme.tag) != class {
            continue;
        }
        for lemma in lemmas {
            if *lemma == morpheme.surface {
                return Some(lemma.clone());
            }
            if stem_plus_da && class == TagClass::Verb {
                let mut stem = morpheme.surface.clone();
                stem.push('다');
                if *lemma == stem {
                    return Some(lemma.clone());
                }
            }
        }
    }
    None
}

/// Decides noun/verb-ambiguous Chinese words of one pair by translation
/// evidence. For every word whose POS set is exactly {n, v}: a verb lemma
/// found among verb-classified Korean morphemes decides verb; otherwise a
/// noun lemma among noun-classified morphemes decides noun. The verb check
/// runs first.
pub fn decide_by_translation(
    pair_index: usize,
    pair: &BilingualPair,
    lex: &Lexicon,
    map: &TagClassMap,
    match_stem_plus_da: bool,
) -> Vec<Decision> {
    let vn: std::collections::BTreeSet<PosTag> =
        [PosTag::noun(), PosTag::verb()].into_iter().collect();
    let mut decisions = Vec::new();
    for (i, word) in pair.zh.words().iter().enumerate() {
        match lex.pos_set(word) {
            Some(set) if set == vn => {}
            _ => continue,
        }
        if let Some(evidence) = korean_has_lemma(
            pair,
            map,
            lex.verb_translations(word),
            TagClass::Verb,
            match_stem_plus_da,
        ) {
            decisions.push(Decision {
                pair_index,
                word_index: i,
                word: word.clone(),
                decided_tag: PosTag::verb(),
                evidence,
            });
        } else if let Some(evidence) = korean_has_lemma(
            pair,
            map,
            lex.noun_translations(word),
            TagClass::Noun,
            false,
        ) {
            decisions.push(Decision {
                pair_index,
                word_index: i,
                word: word.clone(),
                decided_tag: PosTag::noun(),
                evidence,
            });
        }
    }
    decisions
}

/// Records the in-bounds neighbors of a decided word: the neighbor surface
/// always, plus its POS when the neighbor is single-POS.
pub fn record_contexts(
    pair: &BilingualPair,
    decision: &Decision,
    lex: &Lexicon,
) -> Vec<ContextRecord> {
    let words = pair.zh.words();
    let i = decision.word_index;
    let mut records = Vec::new();
    if i > 0 {
        let prev = &words[i - 1];
        records.push(ContextRecord {
            template: ContextTemplate::PrevWord,
            key: prev.clone(),
            decided_tag: decision.decided_tag.clone(),
        });
        if let Some(tag) = lex.single_pos(prev) {
            records.push(ContextRecord {
                template: ContextTemplate::PrevSpos,
                key: tag.code().to_string(),
                decided_tag: decision.decided_tag.clone(),
            });
        }
    }
    if i + 1 < words.len() {
        let next = &words[i + 1];
        records.push(ContextRecord {
            template: ContextTemplate::NextWord,
            key: next.clone(),
            decided_tag: decision.decided_tag.clone(),
        });
        if let Some(tag) = lex.single_pos(next) {
            records.push(ContextRecord {
                template: ContextTemplate::NextSpos,
                key: tag.code().to_string(),
                decided_tag: decision.decided_tag.clone(),
            });
        }
    }
    records
}

fn rule_shape(template: ContextTemplate, key: &str, tag: PosTag, cf: f64, support: u64) -> Rule {
    let (atoms, main) = match template {
        ContextTemplate::PrevWord => (vec![CondAtom::Word(key.to_string()), CondAtom::Any], 1),
        ContextTemplate::NextWord => (vec![CondAtom::Any, CondAtom::Word(key.to_string())], 0),
        ContextTemplate::PrevSpos => (
            vec![
                CondAtom::Spos(PosTag::new(key).expect("key recorded from a valid tag")),
                CondAtom::Any,
            ],
            1,
        ),
        ContextTemplate::NextSpos => (
            vec![
                CondAtom::Any,
                CondAtom::Spos(PosTag::new(key).expect("key recorded from a valid tag")),
            ],
            0,
        ),
    };
    Rule::new(atoms, main, main, tag, cf, support).expect("mined rule shapes are valid")
}

/// Aggregates context records into a ruleset. Records are grouped by
/// (template, key); each group emits at most one rule for its majority tag
/// when the support and certainty thresholds are met. cf is the fraction of
/// the group agreeing with the emitted tag.
pub fn aggregate(records: &[ContextRecord], min_support: u64, min_cf: f64) -> RuleSet {
    let (ruleset, _, _) = aggregate_with_counts(records, min_support, min_cf);
    ruleset
}

fn aggregate_with_counts(
    records: &[ContextRecord],
    min_support: u64,
    min_cf: f64,
) -> (RuleSet, u64, u64) {
    let mut groups: BTreeMap<(ContextTemplate, String), BTreeMap<PosTag, u64>> = BTreeMap::new();
    for record in records {
        *groups
            .entry((record.template, record.key.clone()))
            .or_default()
            .entry(record.decided_tag.clone())
            .or_insert(0) += 1;
    }

    let distinct = groups.len() as u64;
    let mut candidates: Vec<(f64, u64, String, ContextTemplate, Rule)> = Vec::new();
    for ((template, key), tag_counts) in &groups {
        let total: u64 = tag_counts.values().sum();
        // majority tag; count ties go to the smaller tag code
        let (tag, support) = tag_counts
            .iter()
            .fold(None::<(&PosTag, u64)>, |best, (tag, &count)| match best {
                Some((_, best_count)) if best_count >= count => best,
                _ => Some((tag, count)),
            })
            .expect("groups are non-empty");
        let cf = support as f64 / total as f64;
        if support >= min_support && cf >= min_cf {
            candidates.push((
                cf,
                support,
                key.clone(),
                *template,
                rule_shape(*template, key, tag.clone(), cf, support),
            ));
        }
    }

    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(b.1.cmp(&a.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });
    let rules: Vec<Rule> = candidates.into_iter().map(|(_, _, _, _, r)| r).collect();
    let emitted = rules.len() as u64;
    let ruleset = RuleSet::new("posdecpos", vec![PosTag::verb(), PosTag::noun()], rules)
        .expect("mined ruleset is valid by construction");
    (ruleset, emitted, distinct)
}

/// Runs the full mining pass over a bilingual corpus.
pub fn mine<I>(
    corpus: I,
    lex: &Lexicon,
    map: &TagClassMap,
    options: &MinerOptions,
) -> Result<(RuleSet, MiningReport)>
where
    I: IntoIterator<Item = Result<BilingualPair>>,
{
    let mut report = MiningReport::default();
    let mut records = Vec::new();
    for (idx, pair) in corpus.into_iter().enumerate() {
        let pair = pair?;
        report.pairs_processed += 1;
        for decision in decide_by_translation(idx + 1, &pair, lex, map, options.match_stem_plus_da)
        {
            if decision.decided_tag == PosTag::verb() {
                report.verb_decisions += 1;
            } else {
                report.noun_decisions += 1;
            }
            let mut ctx = record_contexts(&pair, &decision, lex);
            report.contexts_recorded += ctx.len() as u64;
            records.append(&mut ctx);
        }
    }
    let (ruleset, emitted, distinct) =
        aggregate_with_counts(&records, options.min_support, options.min_cf);
    report.distinct_contexts = distinct;
    report.rules_emitted = emitted;
    report.rules_suppressed = distinct - emitted;
    Ok((ruleset, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_bilingual_corpus;
    use crate::model::{ChiSentence, TaggedSentence};
    use crate::rules::{apply_ruleset, KindMatch};

    fn tag(code: &str) -> PosTag {
        PosTag::new(code).unwrap()
    }

    fn coarse_map() -> TagClassMap {
        TagClassMap::parse("N\tnoun\nNN\tnoun\nV\tverb\nPV\tverb").unwrap()
    }

    fn desk_lexicon() -> Lexicon {
        let mut lex = Lexicon::new();
        let singles: &[(&str, &str, &[&str])] = &[
            ("我", "r", &["나"]),
            ("的", "u", &[]),
            ("朋友", "n", &["동무"]),
            ("中国语", "n", &["중국어"]),
            ("是", "v", &["이다"]),
            ("基础", "n", &["기초"]),
            ("他们", "r", &["그들"]),
            ("现在", "t", &["지금"]),
            ("都", "d", &[]),
        ];
        for (word, pos, translations) in singles {
            lex.add_sense(
                *word,
                tag(pos),
                translations.iter().map(|t| t.to_string()).collect(),
            )
            .unwrap();
        }
        // genuinely multi-POS function words: no spos record can fire on them
        lex.add_sense("了", tag("u"), vec![]).unwrap();
        lex.add_sense("了", tag("v"), vec!["마치다".into()])
            .unwrap();
        lex.add_sense("所", tag("u"), vec![]).unwrap();
        lex.add_sense("所", tag("n"), vec!["장소".into()]).unwrap();
        // the ambiguous target
        lex.add_sense("学习", tag("v"), vec!["배우다".into()])
            .unwrap();
        lex.add_sense("学习", tag("n"), vec!["학습".into()])
            .unwrap();
        lex.add_sense("研究", tag("v"), vec!["연구하다".into()])
            .unwrap();
        lex.add_sense("研究", tag("n"), vec!["연구".into()])
            .unwrap();
        lex
    }

    fn pair(text: &str) -> BilingualPair {
        parse_bilingual_corpus(text).unwrap().remove(0)
    }

    #[test]
    fn verb_decision_from_the_worked_pair() {
        let p = pair("我 的 朋友 学习 中国语\n나/N 의/T 동무/N 는/T 중국어/N 를/T 배우다/V");
        let decisions = decide_by_translation(1, &p, &desk_lexicon(), &coarse_map(), false);
        assert_eq!(decisions.len(), 1);
        let d = &decisions[0];
        assert_eq!(d.word, "学习");
        assert_eq!(d.word_index, 3);
        assert_eq!(d.decided_tag, tag("v"));
        assert_eq!(d.evidence, "배우다");
    }

    #[test]
    fn no_decision_without_korean_evidence() {
        let p = pair("我 的 朋友 学习 中国语\n나/N 의/T 동무/N 는/T 중국어/N 를/T 가르치다/V");
        let decisions = decide_by_translation(1, &p, &desk_lexicon(), &coarse_map(), false);
        assert!(decisions.is_empty());
    }

    #[test]
    fn noun_decision_when_only_noun_translation_matches() {
        let p = pair("研究 是 基础\n연구/NNG 는/T 기초/N 이다/V");
        let decisions = decide_by_translation(1, &p, &desk_lexicon(), &coarse_map(), false);
        assert_eq!(decisions.len(), 1);
        assert_eq!(decisions[0].word, "研究");
        assert_eq!(decisions[0].decided_tag, tag("n"));
        assert_eq!(decisions[0].evidence, "연구");
    }

    #[test]
    fn verb_check_precedes_noun_check() {
        // Korean side carries both 연구 (noun) and 연구하다 (verb)
        let p = pair("研究 是 基础\n연구/NNG 를/T 연구하다/PVG 기초/N 이다/V");
        let decisions = decide_by_translation(1, &p, &desk_lexicon(), &coarse_map(), false);
        assert_eq!(decisions[0].decided_tag, tag("v"));
    }

    #[test]
    fn stem_plus_da_option_matches_bare_stems() {
        let p = pair("我 学习 了\n나/N 는/T 배우/PVG++ㄴ다/T");
        let strict = decide_by_translation(1, &p, &desk_lexicon(), &coarse_map(), false);
        assert!(strict.is_empty());
        let relaxed = decide_by_translation(1, &p, &desk_lexicon(), &coarse_map(), true);
        assert_eq!(relaxed.len(), 1);
        assert_eq!(relaxed[0].decided_tag, tag("v"));
    }

    #[test]
    fn context_records_cover_neighbors_and_spos() {
        let lex = desk_lexicon();
        let p = pair("我 的 朋友 学习 中国语\n나/N 의/T 동무/N 는/T 중국어/N 를/T 배우다/V");
        let d = decide_by_translation(1, &p, &lex, &coarse_map(), false).remove(0);
        let records = record_contexts(&p, &d, &lex);
        assert_eq!(records.len(), 4);
        assert!(records.contains(&ContextRecord {
            template: ContextTemplate::PrevWord,
            key: "朋友".into(),
            decided_tag: tag("v"),
        }));
        assert!(records.contains(&ContextRecord {
            template: ContextTemplate::PrevSpos,
            key: "n".into(),
            decided_tag: tag("v"),
        }));
        assert!(records.contains(&ContextRecord {
            template: ContextTemplate::NextWord,
            key: "中国语".into(),
            decided_tag: tag("v"),
        }));
        assert!(records.contains(&ContextRecord {
            template: ContextTemplate::NextSpos,
            key: "n".into(),
            decided_tag: tag("v"),
        }));
    }

    #[test]
    fn boundary_words_emit_no_out_of_bounds_records() {
        let lex = desk_lexicon();
        let p = pair("学习 中国语\n배우다/V 중국어/N");
        let d = decide_by_translation(1, &p, &lex, &coarse_map(), false).remove(0);
        let records = record_contexts(&p, &d, &lex);
        assert!(records.iter().all(|r| matches!(
            r.template,
            ContextTemplate::NextWord | ContextTemplate::NextSpos
        )));
    }

    #[test]
    fn multi_pos_neighbor_gets_no_spos_record() {
        let lex = desk_lexicon();
        let p = pair("我 学习 了\n나/N 는/T 배우다/V");
        let d = decide_by_translation(1, &p, &lex, &coarse_map(), false).remove(0);
        let records = record_contexts(&p, &d, &lex);
        let next: Vec<_> = records
            .iter()
            .filter(|r| r.template == ContextTemplate::NextWord)
            .collect();
        assert_eq!(next.len(), 1);
        assert_eq!(next[0].key, "了");
        assert!(!records
            .iter()
            .any(|r| r.template == ContextTemplate::NextSpos));
    }

    #[test]
    fn aggregate_emits_majority_rules_with_exact_cf() {
        let mut records = Vec::new();
        for _ in 0..5 {
            records.push(ContextRecord {
                template: ContextTemplate::NextWord,
                key: "了".into(),
                decided_tag: tag("v"),
            });
        }
        for _ in 0..3 {
            records.push(ContextRecord {
                template: ContextTemplate::PrevWord,
                key: "所".into(),
                decided_tag: tag("v"),
            });
        }
        let rs = aggregate(&records, 3, 0.9);
        assert_eq!(rs.rules.len(), 2);
        assert_eq!(rs.rules[0].cond_string(), "any+word(了)");
        assert_eq!(rs.rules[0].cf, 1.0);
        assert_eq!(rs.rules[0].support, 5);
        assert_eq!(rs.rules[1].cond_string(), "word(所)+any");
        assert_eq!(rs.rules[1].main, 1);
        assert_eq!(rs.rules[1].support, 3);
    }

    #[test]
    fn aggregate_suppresses_low_cf_groups() {
        let mut records = Vec::new();
        for tag_code in ["v", "v", "n", "n"] {
            records.push(ContextRecord {
                template: ContextTemplate::NextWord,
                key: "是".into(),
                decided_tag: tag(tag_code),
            });
        }
        let rs = aggregate(&records, 1, 0.9);
        assert!(rs.rules.is_empty());
        // at cf <= 0.5 the tie resolves to the lexicographically smaller tag
        let rs = aggregate(&records, 1, 0.5);
        assert_eq!(rs.rules.len(), 1);
        assert_eq!(rs.rules[0].action_tag, tag("n"));
        assert_eq!(rs.rules[0].cf, 0.5);
    }

    #[test]
    fn aggregate_cf_matches_brute_force_recount() {
        let records = vec![
            ContextRecord {
                template: ContextTemplate::NextWord,
                key: "了".into(),
                decided_tag: tag("v"),
            },
            ContextRecord {
                template: ContextTemplate::NextWord,
                key: "了".into(),
                decided_tag: tag("v"),
            },
            ContextRecord {
                template: ContextTemplate::NextWord,
                key: "了".into(),
                decided_tag: tag("n"),
            },
        ];
        let rs = aggregate(&records, 1, 0.5);
        assert_eq!(rs.rules.len(), 1);
        let rule = &rs.rules[0];
        // recount independently
        let total = records.iter().filter(|r| r.key == "了").count() as u64;
        let agreeing = records
            .iter()
            .filter(|r| r.key == "了" && r.decided_tag == rule.action_tag)
            .count() as u64;
        assert_eq!(rule.support, agreeing);
        assert!((rule.cf - agreeing as f64 / total as f64).abs() < 1e-15);
    }

    #[test]
    fn empty_records_give_empty_ruleset() {
        let rs = aggregate(&[], 1, 0.5);
        assert!(rs.rules.is_empty());
        assert_eq!(rs.kind_string(), "vn");
    }

    #[test]
    fn aggregation_is_order_independent() {
        let mut records = Vec::new();
        for (i, key) in ["了", "所", "了", "是", "了"].iter().enumerate() {
            records.push(ContextRecord {
                template: if i % 2 == 0 {
                    ContextTemplate::NextWord
                } else {
                    ContextTemplate::PrevWord
                },
                key: key.to_string(),
                decided_tag: if i == 3 { tag("n") } else { tag("v") },
            });
        }
        let forward = aggregate(&records, 1, 0.1);
        let mut reversed = records.clone();
        reversed.reverse();
        assert_eq!(aggregate(&reversed, 1, 0.1), forward);
    }

    #[test]
    fn mined_rule_reproduces_its_training_context() {
        let lex = desk_lexicon();
        let map = coarse_map();
        let corpus_text = "我 学习 了\n나/N 는/T 배우다/V\n\n朋友 学习 了\n동무/N 는/T 배우다/V\n\n都 学习 了\n다/T 배우다/V\n";
        let pairs = parse_bilingual_corpus(corpus_text).unwrap();
        let (rs, report) = mine(
            pairs.into_iter().map(Ok),
            &lex,
            &map,
            &MinerOptions {
                min_support: 3,
                min_cf: 0.9,
                match_stem_plus_da: false,
            },
        )
        .unwrap();
        assert_eq!(report.verb_decisions, 3);
        assert!(rs
            .rules
            .iter()
            .any(|r| r.cond_string() == "any+word(了)" && r.cf == 1.0));

        // the rule decides the very context it came from
        let s = ChiSentence::new(vec!["我".into(), "学习".into(), "了".into()]).unwrap();
        let tagged = apply_ruleset(
            &rs,
            &s,
            &TaggedSentence::from_sentence(&s),
            &lex,
            KindMatch::Exact,
        );
        assert_eq!(tagged.items[1].tag(), Some(&tag("v")));
    }

    #[test]
    fn mine_on_unambiguous_corpus_reports_zero_decisions() {
        let lex = desk_lexicon();
        let map = coarse_map();
        let pairs = parse_bilingual_corpus("我 是 朋友\n나/N 는/T 동무/N 이다/V").unwrap();
        let (rs, report) = mine(
            pairs.into_iter().map(Ok),
            &lex,
            &map,
            &MinerOptions::default(),
        )
        .unwrap();
        assert!(rs.rules.is_empty());
        assert_eq!(report.verb_decisions + report.noun_decisions, 0);
        assert_eq!(report.pairs_processed, 1);
    }

    #[test]
    fn mine_on_the_single_worked_pair_records_one_verb_decision() {
        let lex = desk_lexicon();
        let map = coarse_map();
        let pairs = parse_bilingual_corpus(
            "我 的 朋友 学习 中国语\n나/N 의/T 동무/N 는/T 중국어/N 를/T 배우다/V",
        )
        .unwrap();
        let (rs, report) = mine(
            pairs.into_iter().map(Ok),
            &lex,
            &map,
            &MinerOptions::default(),
        )
        .unwrap();
        assert_eq!(report.pairs_processed, 1);
        assert_eq!(report.verb_decisions, 1);
        assert_eq!(report.noun_decisions, 0);
        assert_eq!(report.contexts_recorded, 4);
        assert_eq!(report.distinct_contexts, 4);
        // a single observation stays below the support threshold
        assert!(rs.rules.is_empty());
        assert_eq!(report.rules_suppressed, 4);
    }

    #[test]
    fn mine_propagates_corpus_errors() {
        let lex = desk_lexicon();
        let map = coarse_map();
        let result = mine(
            vec![Err(crate::error::Error::invalid("boom"))],
            &lex,
            &map,
            &MinerOptions::default(),
        );
        assert!(result.is_err());
    }
}
