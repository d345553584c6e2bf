//! Words over a generator alphabet, oriented rewrite rules, normal forms,
//! and local-confluence analysis via critical pairs.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// A word over a generator alphabet. The empty word is the monoid identity
/// and is written `1` in the text syntax.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    syms: Vec<String>,
}

impl Word {
    pub fn empty() -> Self {
        Word { syms: Vec::new() }
    }

    pub fn single(sym: impl Into<String>) -> Self {
        Word {
            syms: vec![sym.into()],
        }
    }

    pub fn from_syms(syms: Vec<String>) -> Self {
        Word { syms }
    }

    /// Parses whitespace-separated generator tokens; the token `1` denotes
    /// the empty word and may be mixed with other tokens.
    pub fn parse(text: &str) -> Self {
        Word {
            syms: text
                .split_whitespace()
                .filter(|t| *t != "1")
                .map(str::to_owned)
                .collect(),
        }
    }

    pub fn syms(&self) -> &[String] {
        &self.syms
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut syms = self.syms.clone();
        syms.extend(other.syms.iter().cloned());
        Word { syms }
    }

    pub fn push(&self, sym: &str) -> Word {
        let mut syms = self.syms.clone();
        syms.push(sym.to_owned());
        Word { syms }
    }

    pub fn pow(&self, k: usize) -> Word {
        let mut syms = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            syms.extend(self.syms.iter().cloned());
        }
        Word { syms }
    }

    /// Length-then-lexicographic order; the orientation order for rules.
    pub fn shortlex(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.syms.cmp(&other.syms))
    }

    fn matches_at(&self, pat: &[String], pos: usize) -> bool {
        pos + pat.len() <= self.len() && self.syms[pos..pos + pat.len()] == *pat
    }

    fn replace_at(&self, pos: usize, len: usize, replacement: &Word) -> Word {
        let mut syms = Vec::with_capacity(self.len() - len + replacement.len());
        syms.extend(self.syms[..pos].iter().cloned());
        syms.extend(replacement.syms.iter().cloned());
        syms.extend(self.syms[pos + len..].iter().cloned());
        Word { syms }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syms.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.syms.join(" "))
        }
    }
}

/// An oriented rewrite rule `lhs -> rhs` with `lhs` strictly greater than
/// `rhs` in shortlex order, so every rule application decreases the word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Word,
}

impl RewriteRule {
    /// Orients an equation into a shortlex-decreasing rule. Returns `None`
    /// when both sides are the identical word (a trivial relation).
    pub fn orient(u: &Word, v: &Word) -> Option<RewriteRule> {
        match u.shortlex(v) {
            Ordering::Greater => Some(RewriteRule {
                lhs: u.clone(),
                rhs: v.clone(),
            }),
            Ordering::Less => Some(RewriteRule {
                lhs: v.clone(),
                rhs: u.clone(),
            }),
            Ordering::Equal => None,
        }
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// An overlap or inclusion ambiguity between two rule left-hand sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalPair {
    pub overlap: Word,
    pub left_result: Word,
    pub right_result: Word,
    pub joinable: bool,
}

/// Applies the first applicable rule at the leftmost position, or `None`
/// if the word is irreducible.
pub fn reduce_once(w: &Word, rules: &[RewriteRule]) -> Option<Word> {
    for pos in 0..w.len() {
        for rule in rules {
            if w.matches_at(rule.lhs.syms(), pos) {
                return Some(w.replace_at(pos, rule.lhs.len(), &rule.rhs));
            }
        }
    }
    None
}

/// Reduces to an irreducible word. Termination follows from the shortlex
/// orientation of the rules.
pub fn normalize(w: &Word, rules: &[RewriteRule]) -> Word {
    let mut cur = w.clone();
    while let Some(next) = reduce_once(&cur, rules) {
        cur = next;
    }
    cur
}

/// Enumerates every overlap and inclusion ambiguity between rule lhs's,
/// each with its two reducts and their joinability.
pub fn critical_pairs(rules: &[RewriteRule]) -> Vec<CriticalPair> {
    let mut pairs = Vec::new();
    for (i, r1) in rules.iter().enumerate() {
        for (j, r2) in rules.iter().enumerate() {
            let l1 = &r1.lhs;
            let l2 = &r2.lhs;
            // Proper overlaps: a nonempty proper suffix of l1 equals a
            // proper prefix of l2.
            for k in 1..l1.len().min(l2.len()) {
                if l1.syms()[l1.len() - k..] == l2.syms()[..k] {
                    let overlap =
                        Word::from_syms(l1.syms().iter().chain(&l2.syms()[k..]).cloned().collect());
                    let left_result = overlap.replace_at(0, l1.len(), &r1.rhs);
                    let right_result = overlap.replace_at(l1.len() - k, l2.len(), &r2.rhs);
                    pairs.push(make_pair(overlap, left_result, right_result, rules));
                }
            }
            // Inclusions: l2 occurs as a factor of l1.
            if l2.len() <= l1.len() {
                for pos in 0..=l1.len() - l2.len() {
                    if i == j && pos == 0 {
                        continue; // same rule at the same position
                    }
                    if l2.len() == l1.len() && pos == 0 && l1 == l2 {
                        continue; // identical lhs, identical reduction
                    }
                    if l1.matches_at(l2.syms(), pos) {
                        let overlap = l1.clone();
                        let left_result = r1.rhs.clone();
                        let right_result = l1.replace_at(pos, l2.len(), &r2.rhs);
                        pairs.push(make_pair(overlap, left_result, right_result, rules));
                    }
                }
            }
        }
    }
    pairs
}

fn make_pair(overlap: Word, left: Word, right: Word, rules: &[RewriteRule]) -> CriticalPair {
    let joinable = normalize(&left, rules) == normalize(&right, rules);
    CriticalPair {
        overlap,
        left_result: left,
        right_result: right,
        joinable,
    }
}

/// True iff every critical pair is joinable. Together with the shortlex
/// orientation this certifies unique normal forms.
pub fn is_locally_confluent(rules: &[RewriteRule]) -> bool {
    critical_pairs(rules).iter().all(|p| p.joinable)
}

/// All irreducible words of length at most `max_len` over `alphabet`.
///
/// A word extending a reducible word is itself reducible, so the search
/// only branches on irreducible prefixes.
pub fn enumerate_normal_forms(
    rules: &[RewriteRule],
    alphabet: &[String],
    max_len: usize,
) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    let mut frontier = vec![Word::empty()];
    out.insert(Word::empty());
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in alphabet {
                let ext = w.push(g);
                // The prefix is irreducible, so any redex must be a suffix.
                let reducible = rules.iter().any(|r| {
                    r.lhs.len() <= ext.len() && ext.matches_at(r.lhs.syms(), ext.len() - r.lhs.len())
                });
                if !reducible {
                    out.insert(ext.clone());
                    next.push(ext);
                }
            }
        }
        frontier = next;
    }
    out
}
