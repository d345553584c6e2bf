//! The config file: named presentations, morphisms, M-sets, predicates,
//! a default bound, and an optional `verify { ... }` block wiring them
//! into the end-to-end verification.
//!
//! ```text
//! monoid M = < e, x | e e = e, x e = x >
//! morphism phi : M -> N { e -> 1, x -> a }
//! mset NN = restrict N along phi
//! pred B on P = phi(fst) != a * snd
//! bound 6
//! verify { ... }
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::monoid::{MonoidMorphism, MonoidPresentation};
use crate::mset::{Elem, MSet};
use crate::predicate::{Predicate, PredicateContext};
use crate::rewriting::Word;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("config line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Everything declared by a config file. All names resolve and all
/// declarations passed their constructors' checks.
#[derive(Debug, Clone)]
pub struct Config {
    /// sha256 of the config text, hex-encoded.
    pub digest: String,
    pub presentations: BTreeMap<String, Arc<MonoidPresentation>>,
    pub morphisms: BTreeMap<String, Arc<MonoidMorphism>>,
    pub msets: BTreeMap<String, Arc<MSet>>,
    pub predicates: BTreeMap<String, Predicate>,
    pub default_bound: usize,
    pub verify: Option<VerifySpec>,
}

/// The roles named objects play in the end-to-end verification.
#[derive(Debug, Clone)]
pub struct VerifySpec {
    pub morphism: String,
    pub section: Option<String>,
    pub left: String,
    pub right: String,
    pub product: String,
    pub partition: Vec<String>,
    /// Two product elements whose tensor classes (with n' = 1) must
    /// collide under alpha while lying in different partition blocks.
    pub witnesses: Option<(Elem, Elem)>,
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ConfigError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        let mut cfg = Config {
            digest,
            presentations: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            msets: BTreeMap::new(),
            predicates: BTreeMap::new(),
            default_bound: 6,
            verify: None,
        };
        let mut lines = text.lines().enumerate().peekable();
        while let Some((idx, raw)) = lines.next() {
            let lineno = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| ConfigError::Syntax { line: lineno, msg };
            if let Some(rest) = line.strip_prefix("monoid ") {
                cfg.parse_monoid(rest, lineno)?;
            } else if let Some(rest) = line.strip_prefix("morphism ") {
                cfg.parse_morphism(rest, lineno)?;
            } else if let Some(rest) = line.strip_prefix("mset ") {
                cfg.parse_mset(rest, lineno)?;
            } else if let Some(rest) = line.strip_prefix("pred ") {
                cfg.parse_pred(rest, lineno)?;
            } else if let Some(rest) = line.strip_prefix("bound ") {
                cfg.default_bound = rest
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("invalid bound `{}`", rest.trim())))?;
            } else if line == "verify {" || line == "verify{" {
                let mut body = Vec::new();
                let mut closed = false;
                for (bidx, braw) in lines.by_ref() {
                    let bline = strip_comment(braw).trim().to_owned();
                    if bline == "}" {
                        closed = true;
                        break;
                    }
                    if !bline.is_empty() {
                        body.push((bidx + 1, bline));
                    }
                }
                if !closed {
                    return Err(err("unterminated verify block".to_owned()));
                }
                cfg.parse_verify(&body)?;
            } else {
                return Err(err(format!("unrecognized declaration `{line}`")));
            }
        }
        Ok(cfg)
    }

    pub fn predicate_context(&self) -> PredicateContext {
        PredicateContext {
            morphisms: self.morphisms.clone(),
        }
    }

    pub fn monoid(&self, name: &str) -> Option<&Arc<MonoidPresentation>> {
        self.presentations.get(name)
    }

    pub fn mset(&self, name: &str) -> Option<&Arc<MSet>> {
        self.msets.get(name)
    }

    fn parse_monoid(&mut self, rest: &str, line: usize) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError::Syntax { line, msg };
        let (name, body) = split_once_trim(rest, '=')
            .ok_or_else(|| err("expected `monoid NAME = < gens | relations >`".into()))?;
        let inner = body
            .strip_prefix('<')
            .and_then(|s| s.strip_suffix('>'))
            .ok_or_else(|| err("presentation must be enclosed in `< ... >`".into()))?;
        let (gens_text, rels_text) = split_once_trim(inner, '|')
            .ok_or_else(|| err("expected `|` between generators and relations".into()))?;
        let generators: Vec<String> = gens_text
            .split(',')
            .map(|g| g.trim().to_owned())
            .filter(|g| !g.is_empty())
            .collect();
        let mut relations = Vec::new();
        for rel in rels_text.split(',') {
            let rel = rel.trim();
            if rel.is_empty() {
                continue;
            }
            let (u, v) = split_once_trim(rel, '=')
                .ok_or_else(|| err(format!("relation `{rel}` must be `word = word`")))?;
            relations.push((Word::parse(u), Word::parse(v)));
        }
        let p = MonoidPresentation::new(name, generators, relations)
            .map_err(|e| err(e.to_string()))?;
        self.presentations.insert(name.to_owned(), Arc::new(p));
        Ok(())
    }

    fn parse_morphism(&mut self, rest: &str, line: usize) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError::Syntax { line, msg };
        let (name, rest) = split_once_trim(rest, ':')
            .ok_or_else(|| err("expected `morphism NAME : S -> T { ... }`".into()))?;
        let (arrow_part, images_part) = split_once_trim(rest, '{')
            .ok_or_else(|| err("expected `{ gen -> word, ... }`".into()))?;
        let images_part = images_part
            .strip_suffix('}')
            .ok_or_else(|| err("missing closing `}`".into()))?;
        let (src_name, tgt_name) = split_arrow(arrow_part)
            .ok_or_else(|| err("expected `S -> T` between `:` and `{`".into()))?;
        let source = self
            .presentations
            .get(src_name)
            .ok_or_else(|| err(format!("unknown monoid `{src_name}`")))?
            .clone();
        let target = self
            .presentations
            .get(tgt_name)
            .ok_or_else(|| err(format!("unknown monoid `{tgt_name}`")))?
            .clone();
        let mut images = BTreeMap::new();
        for entry in images_part.split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (g, w) = split_arrow(entry)
                .ok_or_else(|| err(format!("image `{entry}` must be `gen -> word`")))?;
            images.insert(g.to_owned(), Word::parse(w));
        }
        let m = MonoidMorphism::new(name, source, target, images).map_err(|e| err(e.to_string()))?;
        self.morphisms.insert(name.to_owned(), Arc::new(m));
        Ok(())
    }

    fn parse_mset(&mut self, rest: &str, line: usize) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError::Syntax { line, msg };
        let (name, body) = split_once_trim(rest, '=')
            .ok_or_else(|| err("expected `mset NAME = ...`".into()))?;
        let words: Vec<&str> = body.split_whitespace().collect();
        let mset = match words.as_slice() {
            ["regular", m] => {
                let p = self
                    .presentations
                    .get(*m)
                    .ok_or_else(|| err(format!("unknown monoid `{m}`")))?;
                MSet::regular(name, p.clone())
            }
            ["restrict", base, "along", morph] => {
                let m = self
                    .morphisms
                    .get(*morph)
                    .ok_or_else(|| err(format!("unknown morphism `{morph}`")))?
                    .clone();
                let base_mset = self.resolve_base(base).ok_or_else(|| {
                    err(format!("`{base}` is neither a declared mset nor a monoid"))
                })?;
                MSet::restrict(name, base_mset, m).map_err(|e| err(e.to_string()))?
            }
            ["product", a, b] => {
                let xa = self.resolve_base(a).ok_or_else(|| err(format!("unknown mset `{a}`")))?;
                let xb = self.resolve_base(b).ok_or_else(|| err(format!("unknown mset `{b}`")))?;
                MSet::product(name, xa, xb).map_err(|e| err(e.to_string()))?
            }
            ["coproduct", a, b] => {
                let xa = self.resolve_base(a).ok_or_else(|| err(format!("unknown mset `{a}`")))?;
                let xb = self.resolve_base(b).ok_or_else(|| err(format!("unknown mset `{b}`")))?;
                MSet::coproduct(name, xa, xb).map_err(|e| err(e.to_string()))?
            }
            _ => {
                return Err(err(format!(
                    "unrecognized mset form `{body}` (expected regular/restrict/product/coproduct)"
                )));
            }
        };
        self.msets.insert(name.to_owned(), Arc::new(mset));
        Ok(())
    }

    /// An mset name, or a monoid name standing for its regular action.
    fn resolve_base(&self, name: &str) -> Option<MSet> {
        if let Some(m) = self.msets.get(name) {
            return Some((**m).clone());
        }
        self.presentations
            .get(name)
            .map(|p| MSet::regular(name, p.clone()))
    }

    fn parse_pred(&mut self, rest: &str, line: usize) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError::Syntax { line, msg };
        let (head, body) = split_once_trim(rest, '=')
            .ok_or_else(|| err("expected `pred NAME on MSET = body`".into()))?;
        let head_words: Vec<&str> = head.split_whitespace().collect();
        let (name, mset) = match head_words.as_slice() {
            [name, "on", mset] => (*name, *mset),
            _ => return Err(err("expected `pred NAME on MSET = body`".into())),
        };
        if !self.msets.contains_key(mset) {
            return Err(err(format!("unknown mset `{mset}`")));
        }
        let p = Predicate::parse(name, mset, body).map_err(|e| err(e.to_string()))?;
        self.predicates.insert(name.to_owned(), p);
        Ok(())
    }

    fn parse_verify(&mut self, body: &[(usize, String)]) -> Result<(), ConfigError> {
        let mut morphism = None;
        let mut section = None;
        let mut left = None;
        let mut right = None;
        let mut product = None;
        let mut partition = Vec::new();
        let mut witnesses = None;
        for (line, entry) in body {
            let err = |msg: String| ConfigError::Syntax { line: *line, msg };
            let (key, value) = split_once_trim(entry, '=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{entry}`")))?;
            match key {
                "morphism" => morphism = Some(value.to_owned()),
                "section" => section = Some(value.to_owned()),
                "left" => left = Some(value.to_owned()),
                "right" => right = Some(value.to_owned()),
                "product" => product = Some(value.to_owned()),
                "partition" => {
                    partition = value.split(',').map(|s| s.trim().to_owned()).collect();
                }
                "witnesses" => {
                    let (first, second) = split_keyword(value, " and ")
                        .ok_or_else(|| err("expected `( .. , .. ) and ( .. , .. )`".into()))?;
                    witnesses =
                        Some((parse_pair(first).ok_or_else(|| {
                            err(format!("invalid pair `{first}`"))
                        })?, parse_pair(second).ok_or_else(|| {
                            err(format!("invalid pair `{second}`"))
                        })?));
                }
                other => return Err(err(format!("unknown verify key `{other}`"))),
            }
        }
        let line = body.first().map_or(0, |(l, _)| *l);
        let err = |msg: String| ConfigError::Syntax { line, msg };
        let spec = VerifySpec {
            morphism: morphism.ok_or_else(|| err("verify block needs `morphism`".into()))?,
            section,
            left: left.ok_or_else(|| err("verify block needs `left`".into()))?,
            right: right.ok_or_else(|| err("verify block needs `right`".into()))?,
            product: product.ok_or_else(|| err("verify block needs `product`".into()))?,
            partition,
            witnesses,
        };
        for (what, name) in [
            ("morphism", &spec.morphism),
            ("section", spec.section.as_ref().unwrap_or(&spec.morphism)),
        ] {
            if !self.morphisms.contains_key(name) {
                return Err(err(format!("verify {what} `{name}` is not declared")));
            }
        }
        for name in [&spec.left, &spec.right, &spec.product] {
            if !self.msets.contains_key(name) {
                return Err(err(format!("verify mset `{name}` is not declared")));
            }
        }
        for name in &spec.partition {
            if !self.predicates.contains_key(name) {
                return Err(err(format!("verify predicate `{name}` is not declared")));
            }
        }
        if let Some((a, b)) = &spec.witnesses {
            let product = &self.msets[&spec.product];
            for w in [a, b] {
                if !product.contains(w) {
                    return Err(err(format!(
                        "witness {w} is not a normal-form element of `{}`",
                        spec.product
                    )));
                }
            }
        }
        self.verify = Some(spec);
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn split_once_trim(s: &str, sep: char) -> Option<(&str, &str)> {
    let (a, b) = s.split_once(sep)?;
    Some((a.trim(), b.trim()))
}

fn split_arrow(s: &str) -> Option<(&str, &str)> {
    let (a, b) = s.split_once("->")?;
    Some((a.trim(), b.trim()))
}

fn split_keyword<'a>(s: &'a str, kw: &str) -> Option<(&'a str, &'a str)> {
    let i = s.find(kw)?;
    Some((s[..i].trim(), s[i + kw.len()..].trim()))
}

/// Parses `( word , word )` into a pair element.
fn parse_pair(s: &str) -> Option<Elem> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    Some(Elem::pair(
        Elem::word(Word::parse(a)),
        Elem::word(Word::parse(b)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const PAPER_CFG: &str = include_str!("../configs/paper.cfg");
    const IDENTITY_CFG: &str = include_str!("../configs/identity.cfg");

    #[test]
    fn parses_paper_config() {
        let cfg = Config::parse(PAPER_CFG).unwrap();
        assert_eq!(cfg.presentations.len(), 2);
        assert_eq!(cfg.presentations["M"].relations.len(), 2);
        assert_eq!(cfg.presentations["N"].relations.len(), 0);
        assert!(cfg.presentations["N"].is_free_on_one_generator());
        assert_eq!(cfg.morphisms.len(), 2);
        assert_eq!(cfg.msets.len(), 3);
        assert_eq!(cfg.predicates.len(), 3);
        assert_eq!(cfg.default_bound, 6);
        let v = cfg.verify.unwrap();
        assert_eq!(v.partition, vec!["Aprime", "Asecond", "B"]);
        assert!(v.witnesses.is_some());
    }

    #[test]
    fn parses_identity_config() {
        let cfg = Config::parse(IDENTITY_CFG).unwrap();
        let v = cfg.verify.unwrap();
        assert!(v.witnesses.is_none());
        assert_eq!(v.partition, vec!["All"]);
    }

    #[test]
    fn rejects_non_confluent_presentation() {
        let err = Config::parse("monoid Bad = < a, b | a b = a, b a = b >").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
        assert!(msg.contains("not locally confluent"), "{msg}");
    }

    #[test]
    fn rejects_unknown_generator_in_relation() {
        let err = Config::parse("monoid M = < e | e z = e >").unwrap_err();
        assert!(err.to_string().contains("unknown generator"));
    }

    #[test]
    fn rejects_undeclared_names() {
        assert!(Config::parse("mset X = regular Nope").is_err());
        assert!(Config::parse("pred P on Nope = true").is_err());
        let bad_morphism = "monoid N = < a | >\nmorphism f : N -> Missing { a -> a }";
        assert!(Config::parse(bad_morphism).is_err());
    }

    #[test]
    fn digest_is_stable() {
        let a = Config::parse(PAPER_CFG).unwrap();
        let b = Config::parse(PAPER_CFG).unwrap();
        assert_eq!(a.digest, b.digest);
    }
}
