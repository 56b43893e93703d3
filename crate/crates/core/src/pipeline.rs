//! End-to-end tagging: single-POS assignment, noun-pair dictionary hits,
//! decision rules, then the statistical decoder for whatever is left.
//! Also hosts the maximum-matching segmenter for raw (unspaced) input.

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::model::{ChiSentence, PosInventory, PosTag, Provenance, TaggedSentence, TaggedWord};
use crate::noun_pairs::NounPairDict;
use crate::rules::{apply_ruleset, KindMatch, RuleSet};
use crate::stats::{decode, ProbModel};

/// Everything one tagging run needs, loaded and cross-checked once.
#[derive(Debug, Clone)]
pub struct TaggerConfig {
    pub lexicon: Lexicon,
    pub pair_dict: NounPairDict,
    pub rulesets: Vec<RuleSet>,
    pub model: ProbModel,
    pub inventory: PosInventory,
    pub kind_match: KindMatch,
    /// Candidate tags for words missing from the lexicon.
    pub open_classes: Vec<PosTag>,
    /// Stage switches; the statistical stage always runs so output is total.
    pub use_pair_dict: bool,
    pub use_rules: bool,
}

impl TaggerConfig {
    pub fn new(
        lexicon: Lexicon,
        pair_dict: NounPairDict,
        rulesets: Vec<RuleSet>,
        model: ProbModel,
    ) -> Result<Self> {
        let cfg = TaggerConfig {
            lexicon,
            pair_dict,
            rulesets,
            model,
            inventory: PosInventory::default(),
            kind_match: KindMatch::default(),
            open_classes: default_open_classes(),
            use_pair_dict: true,
            use_rules: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that the loaded artifacts agree: rule kinds, rule actions,
    /// spos atoms and open classes must all live in the Chinese inventory,
    /// and at least one open class must exist for unknown words.
    pub fn validate(&self) -> Result<()> {
        if self.open_classes.is_empty() {
            return Err(Error::invalid("open classes must not be empty"));
        }
        for tag in &self.open_classes {
            if !self.inventory.contains(tag) {
                return Err(Error::invalid(format!(
                    "open class {:?} is not in the inventory",
                    tag.code()
                )));
            }
        }
        for rs in &self.rulesets {
            for tag in &rs.kind {
                if !self.inventory.contains(tag) {
                    return Err(Error::invalid(format!(
                        "ruleset {:?} kind tag {:?} is not in the inventory",
                        rs.name,
                        tag.code()
                    )));
                }
            }
            for (k, rule) in rs.rules.iter().enumerate() {
                if !self.inventory.contains(&rule.action_tag) {
                    return Err(Error::invalid(format!(
                        "ruleset {:?} rule {}: action tag {:?} is not in the inventory",
                        rs.name,
                        k + 1,
                        rule.action_tag.code()
                    )));
                }
                for atom in &rule.atoms {
                    if let crate::rules::CondAtom::Spos(tag) = atom {
                        if !self.inventory.contains(tag) {
                            return Err(Error::invalid(format!(
                                "ruleset {:?} rule {}: spos tag {:?} is not in the inventory",
                                rs.name,
                                k + 1,
                                tag.code()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn default_open_classes() -> Vec<PosTag> {
    ["n", "v", "a", "d"]
        .iter()
        .map(|c| PosTag::new(*c).expect("static codes are valid"))
        .collect()
}

/// Greedy forward maximum matching against the lexicon. Unmatched leading
/// characters become single-character words, so the concatenation of the
/// output always reproduces the input. Whitespace separates chunks and is
/// dropped.
pub fn segment(lex: &Lexicon, text: &str) -> ChiSentence {
    let mut words = Vec::new();
    let max_len = lex.max_word_chars().max(1);
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut pos = 0;
        while pos < chars.len() {
            let limit = max_len.min(chars.len() - pos);
            let mut taken = 1;
            for len in (1..=limit).rev() {
                let candidate: String = chars[pos..pos + len].iter().collect();
                if lex.contains(&candidate) {
                    taken = len;
                    break;
                }
            }
            words.push(chars[pos..pos + taken].iter().collect());
            pos += taken;
        }
    }
    ChiSentence::new(words).expect("segmenter never emits empty or spaced words")
}

/// Runs the staged tagger over one pre-segmented sentence. Output is total:
/// every word leaves with a tag and the provenance of the earliest stage
/// able to resolve it.
pub fn tag_sentence(cfg: &TaggerConfig, sent: &ChiSentence) -> TaggedSentence {
    let mut tagged = TaggedSentence::from_sentence(sent);

    // single-POS words
    for item in tagged.items.iter_mut() {
        if let Some(tag) = cfg.lexicon.single_pos(&item.word) {
            *item = TaggedWord::resolved(item.word.clone(), tag.clone(), Provenance::SinglePos);
        }
    }

    // noun-pair dictionary: a left or right neighbor conjunction decides
    // noun for words that have a noun sense; the left pair is checked first
    if cfg.use_pair_dict {
        let words = sent.words();
        for i in 0..tagged.items.len() {
            if tagged.items[i].is_resolved() || !cfg.lexicon.has_noun(&words[i]) {
                continue;
            }
            let left_hit = i > 0 && cfg.pair_dict.hit(&words[i - 1], &words[i]) > 0;
            let right_hit = i + 1 < words.len() && cfg.pair_dict.hit(&words[i], &words[i + 1]) > 0;
            if left_hit || right_hit {
                tagged.items[i] =
                    TaggedWord::resolved(words[i].clone(), PosTag::noun(), Provenance::NnDict);
            }
        }
    }

    // decision rules, rulesets in load order
    if cfg.use_rules {
        for rs in &cfg.rulesets {
            tagged = apply_ruleset(rs, sent, &tagged, &cfg.lexicon, cfg.kind_match);
        }
    }

    // statistical decoding of the remainder; a validated config guarantees
    // non-empty open classes, so this cannot fail
    decode(&cfg.model, sent, &tagged, &cfg.lexicon, &cfg.open_classes)
        .expect("decode cannot fail under a validated config")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_korean_corpus, parse_tagged_chinese};
    use crate::model::TagClassMap;
    use crate::noun_pairs::{compile_pair_dict, extract_korean_pairs};
    use crate::rules::parse_ruleset;
    use crate::stats::train;

    fn tag(code: &str) -> PosTag {
        PosTag::new(code).unwrap()
    }

    fn desk_lexicon() -> Lexicon {
        let mut lex = Lexicon::new();
        let singles: &[(&str, &str, &[&str])] = &[
            ("精密", "a", &["정밀"]),
            ("的", "u", &[]),
            ("是", "v", &["이다"]),
            ("科学", "n", &["과학"]),
            ("基础", "n", &["기초"]),
            ("我", "r", &["나"]),
            ("朋友", "n", &["동무"]),
            ("中国语", "n", &["중국어"]),
        ];
        for (word, pos, translations) in singles {
            lex.add_sense(
                *word,
                tag(pos),
                translations.iter().map(|t| t.to_string()).collect(),
            )
            .unwrap();
        }
        for (word, noun_tr, verb_tr) in [
            ("研究", "연구", "연구하다"),
            ("观察", "관찰", "관찰하다"),
            ("学习", "학습", "배우다"),
        ] {
            lex.add_sense(word, tag("n"), vec![noun_tr.into()]).unwrap();
            lex.add_sense(word, tag("v"), vec![verb_tr.into()]).unwrap();
        }
        lex
    }

    fn desk_config() -> TaggerConfig {
        let lex = desk_lexicon();
        let map = TagClassMap::parse("N\tnoun\nNN\tnoun\nV\tverb\nPV\tverb").unwrap();
        let korean = parse_korean_corpus("과학/NNGC++연구/NNGC").unwrap();
        let pairs = extract_korean_pairs(korean, &map, false);
        let dict = compile_pair_dict(&pairs, &lex, 1);
        let rules = parse_ruleset(
            "<ruleset name=\"posdecpos\" kind=\"vn\">\
             <rule cond=\"any+word(、)+spos(n)\">setpos(0,n)</rule>\
             <rule cond=\"word(所)+any\" main=\"1\">setpos(1,v)</rule>\
             <rule cond=\"any+word(是)\">setpos(0,n)</rule>\
             </ruleset>",
        )
        .unwrap();
        let train_corpus = parse_tagged_chinese(
            "我/r 学习/v 了/u\n朋友/n 学习/v 中国语/n\n我/r 的/u 朋友/n 学习/v 中国语/n\n精密/a 的/u 观察/n 是/v 科学/n 研究/n 的/u 基础/n\n我/r 学习/v 中国语/n\n",
        )
        .unwrap();
        let model = train(train_corpus.iter()).unwrap();
        TaggerConfig::new(lex, dict, vec![rules], model).unwrap()
    }

    #[test]
    fn segment_reproduces_the_worked_divisions() {
        let lex = desk_lexicon();
        let sent = segment(&lex, "我的朋友学习中国语");
        assert_eq!(sent.words(), ["我", "的", "朋友", "学习", "中国语"]);
        let sent = segment(&lex, "精密的观察是科学研究的基础");
        assert_eq!(
            sent.words(),
            ["精密", "的", "观察", "是", "科学", "研究", "的", "基础"]
        );
        assert!(segment(&lex, "").is_empty());
    }

    #[test]
    fn segment_concatenation_reproduces_input() {
        let lex = desk_lexicon();
        for text in ["我的朋友学习中国语", "嘎嘣脆", "精密的观察是科学研究的基础"]
        {
            let sent = segment(&lex, text);
            assert_eq!(sent.words().concat(), text);
        }
    }

    #[test]
    fn segment_emits_unknown_chars_as_single_words() {
        let lex = desk_lexicon();
        let sent = segment(&lex, "嘎学习");
        assert_eq!(sent.words(), ["嘎", "学习"]);
        let sent = segment(&lex, "学习嘎");
        assert_eq!(sent.words(), ["学习", "嘎"]);
        let sent = segment(&lex, "嘎嘣");
        assert_eq!(sent.words(), ["嘎", "嘣"]);
    }

    #[test]
    fn stage_two_tags_single_pos_words() {
        let cfg = desk_config();
        let sent = segment(&cfg.lexicon, "精密的基础");
        let tagged = tag_sentence(&cfg, &sent);
        for item in &tagged.items {
            assert_eq!(item.provenance(), Some(Provenance::SinglePos), "{item:?}");
        }
    }

    #[test]
    fn worked_sentence_resolves_by_the_documented_stages() {
        let cfg = desk_config();
        let sent = segment(&cfg.lexicon, "精密的观察是科学研究的基础");
        let tagged = tag_sentence(&cfg, &sent);
        let by_word: std::collections::BTreeMap<&str, &TaggedWord> = tagged
            .items
            .iter()
            .map(|item| (item.word.as_str(), item))
            .collect();

        assert_eq!(by_word["研究"].tag(), Some(&tag("n")));
        assert_eq!(by_word["研究"].provenance(), Some(Provenance::NnDict));
        assert_eq!(by_word["观察"].tag(), Some(&tag("n")));
        assert_eq!(by_word["观察"].provenance(), Some(Provenance::Rule));
        assert_eq!(by_word["科学"].provenance(), Some(Provenance::SinglePos));
        assert!(tagged.is_fully_resolved());
    }

    #[test]
    fn statistical_stage_resolves_rule_misses() {
        let cfg = desk_config();
        let sent = segment(&cfg.lexicon, "我的朋友学习中国语");
        let tagged = tag_sentence(&cfg, &sent);
        let study = &tagged.items[3];
        assert_eq!(study.word, "学习");
        assert_eq!(study.tag(), Some(&tag("v")));
        assert_eq!(study.provenance(), Some(Provenance::Statistical));
    }

    #[test]
    fn unknown_words_resolve_with_fallback_provenance() {
        let cfg = desk_config();
        let sent = ChiSentence::new(vec!["嘎嘣".into(), "是".into()]).unwrap();
        let tagged = tag_sentence(&cfg, &sent);
        assert!(tagged.is_fully_resolved());
        assert_eq!(
            tagged.items[0].provenance(),
            Some(Provenance::UnknownFallback)
        );
    }

    #[test]
    fn output_is_total_and_word_preserving() {
        let cfg = desk_config();
        for text in ["精密的观察是科学研究的基础", "我的朋友学习中国语", ""] {
            let sent = segment(&cfg.lexicon, text);
            let tagged = tag_sentence(&cfg, &sent);
            assert!(tagged.is_fully_resolved());
            assert!(tagged.aligned_with(&sent));
        }
    }

    #[test]
    fn nn_dict_stage_only_ever_assigns_noun_to_noun_sense_words() {
        let cfg = desk_config();
        for text in ["精密的观察是科学研究的基础", "我的朋友学习中国语"] {
            let sent = segment(&cfg.lexicon, text);
            let tagged = tag_sentence(&cfg, &sent);
            for item in &tagged.items {
                if item.provenance() == Some(Provenance::NnDict) {
                    assert_eq!(item.tag(), Some(&PosTag::noun()));
                    assert!(cfg.lexicon.has_noun(&item.word));
                }
            }
        }
    }

    #[test]
    fn disabling_a_stage_never_changes_earlier_stages() {
        let cfg = desk_config();
        let sent = segment(&cfg.lexicon, "精密的观察是科学研究的基础");
        let full = tag_sentence(&cfg, &sent);

        let mut no_pairs = cfg.clone();
        no_pairs.use_pair_dict = false;
        let without_pairs = tag_sentence(&no_pairs, &sent);

        let mut no_rules = cfg.clone();
        no_rules.use_rules = false;
        let without_rules = tag_sentence(&no_rules, &sent);

        for (i, item) in full.items.iter().enumerate() {
            if item.provenance() == Some(Provenance::SinglePos) {
                assert_eq!(without_pairs.items[i], *item);
                assert_eq!(without_rules.items[i], *item);
            }
            if item.provenance() == Some(Provenance::NnDict) {
                assert_eq!(without_rules.items[i], *item);
            }
        }
        // with the dictionary off, 研究 falls through to a later stage
        assert_ne!(
            without_pairs.items[5].provenance(),
            Some(Provenance::NnDict)
        );
        assert!(without_pairs.is_fully_resolved());
        assert!(without_rules.is_fully_resolved());
    }

    #[test]
    fn left_pair_is_checked_before_right() {
        // both neighbors of 研究 form dictionary pairs; resolution must
        // still be a single noun assignment
        let mut lex = desk_lexicon();
        lex.add_sense("方法", tag("n"), vec!["방법".into()])
            .unwrap();
        let map = TagClassMap::parse("N\tnoun").unwrap();
        let korean = parse_korean_corpus("과학/N++연구/N 연구/N++방법/N").unwrap();
        let pairs = extract_korean_pairs(korean, &map, false);
        let dict = compile_pair_dict(&pairs, &lex, 1);
        assert!(dict.hit("科学", "研究") > 0);
        assert!(dict.hit("研究", "方法") > 0);
        let model = train(
            parse_tagged_chinese("科学/n 研究/n 方法/n\n")
                .unwrap()
                .iter(),
        )
        .unwrap();
        let cfg = TaggerConfig::new(lex, dict, vec![], model).unwrap();
        let sent = ChiSentence::new(vec!["科学".into(), "研究".into(), "方法".into()]).unwrap();
        let tagged = tag_sentence(&cfg, &sent);
        assert_eq!(tagged.items[1].tag(), Some(&tag("n")));
        assert_eq!(tagged.items[1].provenance(), Some(Provenance::NnDict));
    }

    #[test]
    fn config_validation_catches_inconsistent_artifacts() {
        let cfg = desk_config();
        let mut bad = cfg.clone();
        bad.open_classes = vec![];
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.open_classes = vec![tag("zz")];
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.inventory = PosInventory::new([tag("n"), tag("v")]);
        // rules only use n/v tags plus the spos(n) atom, but open classes
        // include a and d which are now outside the inventory
        assert!(bad.validate().is_err());
    }
}
