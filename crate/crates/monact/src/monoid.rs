//! Monoid presentations, the word problem via confluent rewriting, and
//! monoid morphisms with well-definedness and surjectivity checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::rewriting::{
    self, CriticalPair, RewriteRule, Word, enumerate_normal_forms, is_locally_confluent,
};

/// A finitely presented monoid with a confluence-checked rewrite system.
/// Construction fails if the oriented rules are not locally confluent, so
/// every `MonoidPresentation` in existence has unique normal forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidPresentation {
    pub name: String,
    pub generators: Vec<String>,
    pub relations: Vec<(Word, Word)>,
    pub rules: Vec<RewriteRule>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{gen}` in {context}")]
    UnknownGenerator { gen: String, context: String },
    #[error(
        "rule set is not locally confluent: overlap `{overlap}` reduces to both `{left}` and `{right}`"
    )]
    NotConfluent {
        overlap: Word,
        left: Word,
        right: Word,
    },
}

impl MonoidPresentation {
    pub fn new(
        name: impl Into<String>,
        generators: Vec<String>,
        relations: Vec<(Word, Word)>,
    ) -> Result<Self, PresentationError> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.clone()) {
                return Err(PresentationError::DuplicateGenerator(g.clone()));
            }
        }
        for (u, v) in &relations {
            for w in [u, v] {
                for sym in w.syms() {
                    if !seen.contains(sym) {
                        return Err(PresentationError::UnknownGenerator {
                            gen: sym.clone(),
                            context: format!("relation `{u} = {v}`"),
                        });
                    }
                }
            }
        }
        let rules: Vec<RewriteRule> = relations
            .iter()
            .filter_map(|(u, v)| RewriteRule::orient(u, v))
            .collect();
        if let Some(bad) = rewriting::critical_pairs(&rules)
            .into_iter()
            .find(|p| !p.joinable)
        {
            return Err(PresentationError::NotConfluent {
                overlap: bad.overlap,
                left: bad.left_result,
                right: bad.right_result,
            });
        }
        Ok(MonoidPresentation {
            name,
            generators,
            relations,
            rules,
        })
    }

    pub fn normalize(&self, w: &Word) -> Word {
        rewriting::normalize(w, &self.rules)
    }

    pub fn words_equal(&self, u: &Word, v: &Word) -> bool {
        self.normalize(u) == self.normalize(v)
    }

    pub fn check_word(&self, w: &Word) -> Result<(), PresentationError> {
        for sym in w.syms() {
            if !self.generators.contains(sym) {
                return Err(PresentationError::UnknownGenerator {
                    gen: sym.clone(),
                    context: format!("word `{w}` over monoid {}", self.name),
                });
            }
        }
        Ok(())
    }

    pub fn normal_forms(&self, max_len: usize) -> BTreeSet<Word> {
        enumerate_normal_forms(&self.rules, &self.generators, max_len)
    }

    /// All critical pairs of the oriented rule set (all joinable, by
    /// construction).
    pub fn critical_pairs(&self) -> Vec<CriticalPair> {
        rewriting::critical_pairs(&self.rules)
    }

    pub fn is_locally_confluent(&self) -> bool {
        is_locally_confluent(&self.rules)
    }

    /// Free monoid on one generator, e.g. `N = <a | >`.
    pub fn is_free_on_one_generator(&self) -> bool {
        self.generators.len() == 1 && self.rules.is_empty()
    }
}

impl fmt::Display for MonoidPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|(u, v)| format!("{u} = {v}"))
            .collect();
        write!(
            f,
            "monoid {} = < {} | {} >",
            self.name,
            self.generators.join(", "),
            rels.join(", ")
        )
    }
}

/// A monoid morphism given by images of the source generators. Construction
/// verifies well-definedness: every source relation must be preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidMorphism {
    pub name: String,
    pub source: Arc<MonoidPresentation>,
    pub target: Arc<MonoidPresentation>,
    pub images: BTreeMap<String, Word>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("no image given for source generator `{0}`")]
    MissingImage(String),
    #[error("image of `{gen}` uses undeclared target generator `{bad}`")]
    UnknownTargetGenerator { gen: String, bad: String },
    #[error(
        "relation `{lhs} = {rhs}` is not preserved: images normalize to `{lhs_image}` and `{rhs_image}`"
    )]
    RelationNotPreserved {
        lhs: Word,
        rhs: Word,
        lhs_image: Word,
        rhs_image: Word,
    },
}

/// Per-generator preimage witnesses for surjectivity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectivityVerdict {
    pub accepted: bool,
    pub search_len: usize,
    /// For each target generator, a source word mapping onto it, if found.
    pub witnesses: BTreeMap<String, Option<Word>>,
}

impl MonoidMorphism {
    /// Builds the morphism, checking that every source relation is
    /// preserved (the `check_morphism` verdict).
    pub fn new(
        name: impl Into<String>,
        source: Arc<MonoidPresentation>,
        target: Arc<MonoidPresentation>,
        images: BTreeMap<String, Word>,
    ) -> Result<Self, MorphismError> {
        for g in &source.generators {
            let img = images
                .get(g)
                .ok_or_else(|| MorphismError::MissingImage(g.clone()))?;
            for sym in img.syms() {
                if !target.generators.contains(sym) {
                    return Err(MorphismError::UnknownTargetGenerator {
                        gen: g.clone(),
                        bad: sym.clone(),
                    });
                }
            }
        }
        let m = MonoidMorphism {
            name: name.into(),
            source,
            target,
            images,
        };
        for (lhs, rhs) in &m.source.relations {
            let li = m.apply(lhs);
            let ri = m.apply(rhs);
            if li != ri {
                return Err(MorphismError::RelationNotPreserved {
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    lhs_image: li,
                    rhs_image: ri,
                });
            }
        }
        Ok(m)
    }

    /// Identity morphism on `p`.
    pub fn identity(p: &Arc<MonoidPresentation>) -> Self {
        let images = p
            .generators
            .iter()
            .map(|g| (g.clone(), Word::single(g.clone())))
            .collect();
        MonoidMorphism::new(format!("id_{}", p.name), p.clone(), p.clone(), images)
            .expect("identity map preserves all relations")
    }

    /// Concatenates generator images and normalizes in the target.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for sym in w.syms() {
            let img = self
                .images
                .get(sym)
                .unwrap_or_else(|| panic!("word symbol `{sym}` is not a source generator"));
            out = out.concat(img);
        }
        self.target.normalize(&out)
    }

    /// Surjectivity via generator preimages: accepted iff every target
    /// generator is the image of some source word of length <= `search_len`.
    /// Exact, not bounded evidence: a homomorphism hitting every generator
    /// hits everything.
    pub fn check_surjective_on_generators(&self, search_len: usize) -> SurjectivityVerdict {
        let mut witnesses = BTreeMap::new();
        let mut accepted = true;
        let candidates = all_words(&self.source.generators, search_len);
        for g in &self.target.generators {
            let goal = self.target.normalize(&Word::single(g.clone()));
            let hit = candidates.iter().find(|w| self.apply(w) == goal).cloned();
            if hit.is_none() {
                accepted = false;
            }
            witnesses.insert(g.clone(), hit);
        }
        SurjectivityVerdict {
            accepted,
            search_len,
            witnesses,
        }
    }
}

/// All words over `alphabet` of length <= `max_len`, in shortlex order.
pub fn all_words(alphabet: &[String], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in alphabet {
                next.push(w.push(g));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
