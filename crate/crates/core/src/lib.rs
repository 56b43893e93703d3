//! Chinese part-of-speech disambiguation driven by Korean translation
//! evidence.
//!
//! Chinese words are frequently noun/verb-ambiguous while tagged Korean
//! text makes the distinction explicit. This crate exploits that asymmetry
//! three ways:
//!
//! - a **noun-pair dictionary**: adjacent Korean noun pairs harvested from a
//!   tagged Korean corpus and translated into Chinese word pairs, so that a
//!   conjunction like 科学/研究 decides 研究 as a noun ([`noun_pairs`]);
//! - **mined decision rules**: noun/verb-ambiguous words in a bilingual
//!   corpus are decided by matching their Korean translations against the
//!   Korean side, and recurring neighbor contexts become rules with
//!   certainty factors ([`miner`], applied by [`rules`]);
//! - an **interpolated bidirectional bigram model** that decodes whatever
//!   the earlier stages leave open ([`stats`]).
//!
//! [`pipeline`] chains the stages (single-POS words first, then the pair
//! dictionary, then rules, then statistics) and records per-word provenance
//! so downstream evaluation ([`eval`]) can attribute errors to stages.
//!
//! ```
//! use hantag_core::corpus::{parse_lexicon, parse_tagged_chinese};
//! use hantag_core::model::PosInventory;
//! use hantag_core::noun_pairs::NounPairDict;
//! use hantag_core::pipeline::{segment, tag_sentence, TaggerConfig};
//! use hantag_core::stats::train;
//!
//! let lexicon = parse_lexicon(
//!     "我\tr\t나\n学习\tv\t배우다\n学习\tn\t학습\n了\tu\t\n",
//!     &PosInventory::default(),
//! )?;
//! let corpus = parse_tagged_chinese("我/r 学习/v 了/u\n")?;
//! let model = train(corpus.iter())?;
//! let cfg = TaggerConfig::new(lexicon, NounPairDict::default(), vec![], model)?;
//!
//! let sentence = segment(&cfg.lexicon, "我学习了");
//! let tagged = tag_sentence(&cfg, &sentence);
//! assert!(tagged.is_fully_resolved());
//! # Ok::<(), hantag_core::Error>(())
//! ```

pub mod corpus;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod miner;
pub mod model;
pub mod noun_pairs;
pub mod pipeline;
pub mod rules;
pub mod stats;

pub use error::{Error, Result};
pub use lexicon::{Lexicon, LexiconEntry, Sense};
pub use model::{
    ChiSentence, KorMorpheme, KorSentence, PosInventory, PosTag, Provenance, TagClass, TagClassMap,
    TaggedSentence, TaggedWord,
};
