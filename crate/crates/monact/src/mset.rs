//! Right M-sets with decidable, degree-bounded carriers: products,
//! coproducts, restriction of scalars, connected components, and closed
//! sub-action verification.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::monoid::{MonoidMorphism, MonoidPresentation};
use crate::predicate::{Predicate, PredicateContext, PredicateError};
use crate::rewriting::Word;
use crate::uf::UnionFind;

/// An element of an M-set carrier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    /// A normal-form word (regular and restricted carriers).
    Word(Word),
    /// A named point of a finite explicit carrier.
    Atom(String),
    /// A point of a product carrier.
    Pair(Box<Elem>, Box<Elem>),
    /// A point of a coproduct carrier, tagged by side (0 or 1).
    Inj(u8, Box<Elem>),
}

impl Elem {
    pub fn word(w: Word) -> Self {
        Elem::Word(w)
    }

    pub fn pair(a: Elem, b: Elem) -> Self {
        Elem::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Elem::Word(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Word(w) => write!(f, "{w}"),
            Elem::Atom(s) => write!(f, "{s}"),
            Elem::Pair(a, b) => write!(f, "({a}, {b})"),
            Elem::Inj(side, e) => write!(f, "{}({e})", if *side == 0 { "inl" } else { "inr" }),
        }
    }
}

/// How the carrier of an M-set is described. Membership is decidable for
/// every variant and enumeration up to a degree bound is finite.
#[derive(Clone, Debug)]
pub enum CarrierSpec {
    /// Listed elements with an explicit action table; every element has
    /// degree 0.
    FiniteExplicit {
        elements: Vec<String>,
        action: BTreeMap<(String, String), String>,
    },
    /// Normal forms of the acting presentation, acting by right
    /// multiplication; degree = word length.
    NormalForms,
    /// An action of the morphism's target, restricted along the morphism:
    /// `y . g = y . phi(g)`.
    Restricted {
        base: Box<MSet>,
        morphism: Arc<MonoidMorphism>,
    },
    /// Componentwise action; degree of a pair = max of component degrees.
    Product(Box<MSet>, Box<MSet>),
    /// Disjoint union of two actions over the same monoid.
    Coproduct(Box<MSet>, Box<MSet>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MSetError {
    #[error("acting monoids differ: {0} vs {1}")]
    ActingMonoidMismatch(String, String),
    #[error("action table has no entry for ({elem}, {gen})")]
    MissingActionEntry { elem: String, gen: String },
    #[error("action table maps ({elem}, {gen}) to unknown element {image}")]
    UnknownActionImage {
        elem: String,
        gen: String,
        image: String,
    },
    #[error("action law violated on `{elem}`: `{lhs}` and `{rhs}` act differently")]
    ActionLawViolated { elem: String, lhs: Word, rhs: Word },
    #[error("restriction base is an action of {got}, expected {expected}")]
    RestrictionMismatch { got: String, expected: String },
    #[error("predicate error: {0}")]
    Predicate(#[from] PredicateError),
}

/// A right M-set: an acting presentation plus a carrier description.
#[derive(Clone, Debug)]
pub struct MSet {
    pub name: String,
    pub acting: Arc<MonoidPresentation>,
    pub carrier: CarrierSpec,
}

impl MSet {
    /// The monoid acting on itself by right multiplication.
    pub fn regular(name: impl Into<String>, p: Arc<MonoidPresentation>) -> Self {
        MSet {
            name: name.into(),
            acting: p,
            carrier: CarrierSpec::NormalForms,
        }
    }

    /// Restriction of scalars: `base` is an action of `m`'s target; the
    /// result is the same carrier with `y . g = y . m(g)`.
    pub fn restrict(
        name: impl Into<String>,
        base: MSet,
        m: Arc<MonoidMorphism>,
    ) -> Result<Self, MSetError> {
        if base.acting != m.target {
            return Err(MSetError::RestrictionMismatch {
                got: base.acting.name.clone(),
                expected: m.target.name.clone(),
            });
        }
        Ok(MSet {
            name: name.into(),
            acting: m.source.clone(),
            carrier: CarrierSpec::Restricted {
                base: Box::new(base),
                morphism: m,
            },
        })
    }

    /// Product with componentwise action.
    pub fn product(name: impl Into<String>, x: MSet, y: MSet) -> Result<Self, MSetError> {
        if x.acting != y.acting {
            return Err(MSetError::ActingMonoidMismatch(
                x.acting.name.clone(),
                y.acting.name.clone(),
            ));
        }
        Ok(MSet {
            name: name.into(),
            acting: x.acting.clone(),
            carrier: CarrierSpec::Product(Box::new(x), Box::new(y)),
        })
    }

    /// Coproduct (disjoint union) of two actions of the same monoid.
    pub fn coproduct(name: impl Into<String>, x: MSet, y: MSet) -> Result<Self, MSetError> {
        if x.acting != y.acting {
            return Err(MSetError::ActingMonoidMismatch(
                x.acting.name.clone(),
                y.acting.name.clone(),
            ));
        }
        Ok(MSet {
            name: name.into(),
            acting: x.acting.clone(),
            carrier: CarrierSpec::Coproduct(Box::new(x), Box::new(y)),
        })
    }

    /// Finite explicit carrier. Validates that the action table is total on
    /// carrier x generators and that every relation of the acting monoid is
    /// respected on every element.
    pub fn finite(
        name: impl Into<String>,
        acting: Arc<MonoidPresentation>,
        elements: Vec<String>,
        action: BTreeMap<(String, String), String>,
    ) -> Result<Self, MSetError> {
        for el in &elements {
            for g in &acting.generators {
                match action.get(&(el.clone(), g.clone())) {
                    None => {
                        return Err(MSetError::MissingActionEntry {
                            elem: el.clone(),
                            gen: g.clone(),
                        });
                    }
                    Some(img) if !elements.contains(img) => {
                        return Err(MSetError::UnknownActionImage {
                            elem: el.clone(),
                            gen: g.clone(),
                            image: img.clone(),
                        });
                    }
                    _ => {}
                }
            }
        }
        let mset = MSet {
            name: name.into(),
            acting: acting.clone(),
            carrier: CarrierSpec::FiniteExplicit { elements, action },
        };
        if let CarrierSpec::FiniteExplicit { elements, .. } = &mset.carrier {
            for el in elements {
                let e = Elem::Atom(el.clone());
                for (u, v) in &acting.relations {
                    if mset.act_word(&e, u) != mset.act_word(&e, v) {
                        return Err(MSetError::ActionLawViolated {
                            elem: el.clone(),
                            lhs: u.clone(),
                            rhs: v.clone(),
                        });
                    }
                }
            }
        }
        Ok(mset)
    }

    /// The action of a single generator. Panics if `e` is not shaped like a
    /// carrier member or `g` is not a generator of the acting monoid.
    pub fn act_gen(&self, e: &Elem, g: &str) -> Elem {
        match (&self.carrier, e) {
            (CarrierSpec::FiniteExplicit { action, .. }, Elem::Atom(a)) => Elem::Atom(
                action
                    .get(&(a.clone(), g.to_owned()))
                    .unwrap_or_else(|| panic!("no action entry for ({a}, {g})"))
                    .clone(),
            ),
            (CarrierSpec::NormalForms, Elem::Word(w)) => {
                Elem::Word(self.acting.normalize(&w.push(g)))
            }
            (CarrierSpec::Restricted { base, morphism }, _) => {
                base.act_word(e, &morphism.apply(&Word::single(g)))
            }
            (CarrierSpec::Product(x, y), Elem::Pair(a, b)) => {
                Elem::pair(x.act_gen(a, g), y.act_gen(b, g))
            }
            (CarrierSpec::Coproduct(x, y), Elem::Inj(side, inner)) => {
                let acted = if *side == 0 {
                    x.act_gen(inner, g)
                } else {
                    y.act_gen(inner, g)
                };
                Elem::Inj(*side, Box::new(acted))
            }
            _ => panic!("element {e} does not belong to carrier of {}", self.name),
        }
    }

    /// Letter-by-letter action of a word.
    pub fn act_word(&self, e: &Elem, w: &Word) -> Elem {
        w.syms().iter().fold(e.clone(), |acc, g| self.act_gen(&acc, g))
    }

    pub fn degree(&self, e: &Elem) -> usize {
        match (&self.carrier, e) {
            (CarrierSpec::FiniteExplicit { .. }, Elem::Atom(_)) => 0,
            (CarrierSpec::NormalForms, Elem::Word(w)) => w.len(),
            (CarrierSpec::Restricted { base, .. }, _) => base.degree(e),
            (CarrierSpec::Product(x, y), Elem::Pair(a, b)) => x.degree(a).max(y.degree(b)),
            (CarrierSpec::Coproduct(x, y), Elem::Inj(side, inner)) => {
                if *side == 0 {
                    x.degree(inner)
                } else {
                    y.degree(inner)
                }
            }
            _ => panic!("element {e} does not belong to carrier of {}", self.name),
        }
    }

    pub fn contains(&self, e: &Elem) -> bool {
        match (&self.carrier, e) {
            (CarrierSpec::FiniteExplicit { elements, .. }, Elem::Atom(a)) => elements.contains(a),
            (CarrierSpec::NormalForms, Elem::Word(w)) => {
                self.acting.check_word(w).is_ok() && self.acting.normalize(w) == *w
            }
            (CarrierSpec::Restricted { base, .. }, _) => base.contains(e),
            (CarrierSpec::Product(x, y), Elem::Pair(a, b)) => x.contains(a) && y.contains(b),
            (CarrierSpec::Coproduct(x, y), Elem::Inj(side, inner)) => {
                if *side == 0 {
                    x.contains(inner)
                } else {
                    y.contains(inner)
                }
            }
            _ => false,
        }
    }

    /// All carrier elements of degree <= `bound`, sorted.
    pub fn enumerate(&self, bound: usize) -> Vec<Elem> {
        let mut out = match &self.carrier {
            CarrierSpec::FiniteExplicit { elements, .. } => {
                elements.iter().map(|s| Elem::Atom(s.clone())).collect()
            }
            CarrierSpec::NormalForms => self
                .acting
                .normal_forms(bound)
                .into_iter()
                .map(Elem::Word)
                .collect(),
            CarrierSpec::Restricted { base, .. } => base.enumerate(bound),
            CarrierSpec::Product(x, y) => {
                let xs = x.enumerate(bound);
                let ys = y.enumerate(bound);
                let mut pairs = Vec::with_capacity(xs.len() * ys.len());
                for a in &xs {
                    for b in &ys {
                        pairs.push(Elem::pair(a.clone(), b.clone()));
                    }
                }
                pairs
            }
            CarrierSpec::Coproduct(x, y) => {
                let mut all: Vec<Elem> = x
                    .enumerate(bound)
                    .into_iter()
                    .map(|e| Elem::Inj(0, Box::new(e)))
                    .collect();
                all.extend(
                    y.enumerate(bound)
                        .into_iter()
                        .map(|e| Elem::Inj(1, Box::new(e))),
                );
                all
            }
        };
        out.sort();
        out
    }

    /// The presentation whose normal forms make up this carrier, if it is
    /// word-shaped. Used by the predicate language to normalize literals.
    pub fn word_presentation(&self) -> Option<Arc<MonoidPresentation>> {
        match &self.carrier {
            CarrierSpec::NormalForms => Some(self.acting.clone()),
            CarrierSpec::Restricted { base, .. } => base.word_presentation(),
            _ => None,
        }
    }

    pub fn component_msets(&self) -> Option<(&MSet, &MSet)> {
        match &self.carrier {
            CarrierSpec::Product(x, y) => Some((x, y)),
            _ => None,
        }
    }
}

/// Connected components of the enumerated carrier under single-generator
/// action steps. Merges are sound; non-merges are evidence at this bound
/// only ("separated up to degree d").
#[derive(Clone, Debug)]
pub struct ComponentPartition {
    pub bound: usize,
    pub elements: Vec<Elem>,
    class_ids: Vec<usize>,
    class_count: usize,
}

impl ComponentPartition {
    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_of(&self, e: &Elem) -> Option<usize> {
        self.elements
            .binary_search(e)
            .ok()
            .map(|i| self.class_ids[i])
    }

    pub fn same_class(&self, a: &Elem, b: &Elem) -> Option<bool> {
        Some(self.class_of(a)? == self.class_of(b)?)
    }

    /// Smallest element of each class, indexed by class id.
    pub fn representatives(&self) -> Vec<&Elem> {
        let mut reps: Vec<Option<&Elem>> = vec![None; self.class_count];
        for (i, e) in self.elements.iter().enumerate() {
            let c = self.class_ids[i];
            if reps[c].is_none() {
                reps[c] = Some(e);
            }
        }
        reps.into_iter().map(|r| r.expect("nonempty class")).collect()
    }

    pub fn classes(&self) -> Vec<Vec<&Elem>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (i, e) in self.elements.iter().enumerate() {
            out[self.class_ids[i]].push(e);
        }
        out
    }
}

/// Union-find over all elements of degree <= `bound`, merging `x` with
/// `x . g` whenever the result stays within the bound.
pub fn components(x: &MSet, bound: usize) -> ComponentPartition {
    let elements = x.enumerate(bound);
    let index: BTreeMap<&Elem, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut uf = UnionFind::new(elements.len());
    for (i, e) in elements.iter().enumerate() {
        for g in &x.acting.generators {
            let img = x.act_gen(e, g);
            if let Some(&j) = index.get(&img) {
                uf.union(i, j);
            }
        }
    }
    let class_ids = uf.canonical_classes();
    let class_count = class_ids.iter().copied().max().map_or(0, |m| m + 1);
    ComponentPartition {
        bound,
        elements,
        class_ids,
        class_count,
    }
}

/// Outcome of a closed-predicate (sub-action) check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub accepted: bool,
    pub bound: usize,
    /// `(element, generator, image)` with the element inside the predicate
    /// and the image outside.
    pub counterexample: Option<(Elem, String, Elem)>,
}

/// Accepted iff for every enumerated element satisfying `p` and every
/// generator, the acted element satisfies `p` as well. Membership of the
/// action image is decided exactly even when its degree exceeds the bound.
pub fn check_closed(
    x: &MSet,
    p: &Predicate,
    bound: usize,
    ctx: &PredicateContext,
) -> Result<ClosureVerdict, MSetError> {
    for e in x.enumerate(bound) {
        if !p.eval(&e, x, ctx)? {
            continue;
        }
        for g in &x.acting.generators {
            let img = x.act_gen(&e, g);
            if !p.eval(&img, x, ctx)? {
                return Ok(ClosureVerdict {
                    accepted: false,
                    bound,
                    counterexample: Some((e, g.clone(), img)),
                });
            }
        }
    }
    Ok(ClosureVerdict {
        accepted: true,
        bound,
        counterexample: None,
    })
}

/// Outcome of a disjointness-and-covering check for a family of predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionVerdict {
    pub accepted: bool,
    pub bound: usize,
    /// `(element, names of predicates holding on it)` when not exactly one.
    pub failure: Option<(Elem, Vec<String>)>,
}

/// Accepted iff exactly one predicate holds on every enumerated element.
pub fn check_partition(
    x: &MSet,
    preds: &[&Predicate],
    bound: usize,
    ctx: &PredicateContext,
) -> Result<PartitionVerdict, MSetError> {
    for e in x.enumerate(bound) {
        let mut holding = Vec::new();
        for p in preds {
            if p.eval(&e, x, ctx)? {
                holding.push(p.name.clone());
            }
        }
        if holding.len() != 1 {
            return Ok(PartitionVerdict {
                accepted: false,
                bound,
                failure: Some((e, holding)),
            });
        }
    }
    Ok(PartitionVerdict {
        accepted: true,
        bound,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::MonoidPresentation;
    use crate::predicate::parse_predicate_for_tests;
    use proptest::prelude::*;

    fn monoid_m() -> Arc<MonoidPresentation> {
        Arc::new(
            MonoidPresentation::new(
                "M",
                vec!["e".into(), "x".into()],
                vec![
                    (Word::parse("e e"), Word::parse("e")),
                    (Word::parse("x e"), Word::parse("x")),
                ],
            )
            .unwrap(),
        )
    }

    fn monoid_n() -> Arc<MonoidPresentation> {
        Arc::new(MonoidPresentation::new("N", vec!["a".into()], vec![]).unwrap())
    }

    fn phi() -> Arc<MonoidMorphism> {
        Arc::new(
            MonoidMorphism::new(
                "phi",
                monoid_m(),
                monoid_n(),
                BTreeMap::from([
                    ("e".to_owned(), Word::empty()),
                    ("x".to_owned(), Word::parse("a")),
                ]),
            )
            .unwrap(),
        )
    }

    fn n_as_m_set() -> MSet {
        MSet::restrict("NN", MSet::regular("N", monoid_n()), phi()).unwrap()
    }

    fn m_times_n() -> MSet {
        MSet::product("P", MSet::regular("MM", monoid_m()), n_as_m_set()).unwrap()
    }

    fn ctx() -> PredicateContext {
        PredicateContext {
            morphisms: BTreeMap::from([("phi".to_owned(), phi())]),
        }
    }

    fn pe(m: &Word, n: &Word) -> Elem {
        Elem::pair(Elem::word(m.clone()), Elem::word(n.clone()))
    }

    #[test]
    fn product_action_examples() {
        let p = m_times_n();
        // (x, 1) . e = (x, 1)
        assert_eq!(
            p.act_gen(&pe(&Word::parse("x"), &Word::empty()), "e"),
            pe(&Word::parse("x"), &Word::empty())
        );
        // (e, 1) . x = (ex, a)
        assert_eq!(
            p.act_gen(&pe(&Word::parse("e"), &Word::empty()), "x"),
            pe(&Word::parse("e x"), &Word::parse("a"))
        );
    }

    #[test]
    fn product_with_one_point_mirrors_x() {
        let m = monoid_m();
        let one = one_point(&m);
        let reg = MSet::regular("MM", m.clone());
        let p = MSet::product("P1", reg.clone(), one).unwrap();
        for e in reg.enumerate(3) {
            for g in &m.generators {
                let acted = p.act_gen(&Elem::pair(e.clone(), Elem::Atom("pt".into())), g);
                assert_eq!(
                    acted,
                    Elem::pair(reg.act_gen(&e, g), Elem::Atom("pt".into()))
                );
            }
        }
    }

    fn one_point(m: &Arc<MonoidPresentation>) -> MSet {
        let action = m
            .generators
            .iter()
            .map(|g| (("pt".to_owned(), g.clone()), "pt".to_owned()))
            .collect();
        MSet::finite("one", m.clone(), vec!["pt".to_owned()], action).unwrap()
    }

    #[test]
    fn restriction_examples() {
        let nn = n_as_m_set();
        let one = Elem::word(Word::empty());
        assert_eq!(nn.act_gen(&one, "x"), Elem::word(Word::parse("a")));
        assert_eq!(nn.act_gen(&one, "e"), one);

        // restriction along the identity changes nothing
        let n = monoid_n();
        let id = Arc::new(MonoidMorphism::identity(&n));
        let reg = MSet::regular("N", n.clone());
        let res = MSet::restrict("R", reg.clone(), id).unwrap();
        for e in reg.enumerate(4) {
            assert_eq!(res.act_gen(&e, "a"), reg.act_gen(&e, "a"));
        }
    }

    #[test]
    fn restriction_of_finite_n_set() {
        let n = monoid_n();
        let finite = MSet::finite(
            "F",
            n.clone(),
            vec!["p".to_owned(), "q".to_owned()],
            BTreeMap::from([
                (("p".to_owned(), "a".to_owned()), "q".to_owned()),
                (("q".to_owned(), "a".to_owned()), "q".to_owned()),
            ]),
        )
        .unwrap();
        let res = MSet::restrict("RF", finite, phi()).unwrap();
        assert_eq!(res.act_gen(&Elem::Atom("p".into()), "e"), Elem::Atom("p".into()));
        assert_eq!(res.act_gen(&Elem::Atom("p".into()), "x"), Elem::Atom("q".into()));
    }

    #[test]
    fn components_of_m_is_single_class() {
        let reg = MSet::regular("MM", monoid_m());
        let parts = components(&reg, 5);
        assert_eq!(parts.class_count(), 1);
    }

    #[test]
    fn components_of_n_over_n_single_class() {
        let reg = MSet::regular("N", monoid_n());
        assert_eq!(components(&reg, 5).class_count(), 1);
    }

    #[test]
    fn components_separate_x1_and_ex1() {
        let parts = components(&m_times_n(), 6);
        let a = pe(&Word::parse("x"), &Word::empty());
        let b = pe(&Word::parse("e x"), &Word::empty());
        assert_eq!(parts.same_class(&a, &b), Some(false));
    }

    #[test]
    fn paper_predicates_are_closed() {
        let p = m_times_n();
        let ctx = ctx();
        for (name, text) in [
            ("Aprime", "(fst matches x^(n+1)) and (snd matches a^n)"),
            ("Asecond", "(fst matches e x^(n+1)) and (snd matches a^n)"),
            ("B", "phi(fst) != a * snd"),
        ] {
            let pred = parse_predicate_for_tests(name, "P", text);
            let verdict = check_closed(&p, &pred, 8, &ctx).unwrap();
            assert!(verdict.accepted, "{name} not closed: {verdict:?}");
        }
    }

    #[test]
    fn non_closed_predicate_is_rejected_with_witness() {
        let p = m_times_n();
        let pred = parse_predicate_for_tests("FstIsX", "P", "fst = x");
        let verdict = check_closed(&p, &pred, 2, &ctx()).unwrap();
        assert!(!verdict.accepted);
        let (e, g, img) = verdict.counterexample.unwrap();
        assert_eq!(e, pe(&Word::parse("x"), &Word::empty()));
        assert_eq!(g, "x");
        assert_eq!(img, pe(&Word::parse("x x"), &Word::parse("a")));
    }

    #[test]
    fn paper_partition_is_accepted() {
        let p = m_times_n();
        let ctx = ctx();
        let preds = [
            parse_predicate_for_tests("Aprime", "P", "(fst matches x^(n+1)) and (snd matches a^n)"),
            parse_predicate_for_tests(
                "Asecond",
                "P",
                "(fst matches e x^(n+1)) and (snd matches a^n)",
            ),
            parse_predicate_for_tests("B", "P", "phi(fst) != a * snd"),
        ];
        let refs: Vec<&Predicate> = preds.iter().collect();
        let verdict = check_partition(&p, &refs, 8, &ctx).unwrap();
        assert!(verdict.accepted, "{verdict:?}");
    }

    #[test]
    fn whole_carrier_is_a_partition() {
        let p = m_times_n();
        let all = parse_predicate_for_tests("All", "P", "true");
        let verdict = check_partition(&p, &[&all], 4, &ctx()).unwrap();
        assert!(verdict.accepted);
    }

    #[test]
    fn dropping_a_block_leaves_elements_uncovered() {
        let p = m_times_n();
        let preds = [
            parse_predicate_for_tests("Aprime", "P", "(fst matches x^(n+1)) and (snd matches a^n)"),
            parse_predicate_for_tests("B", "P", "phi(fst) != a * snd"),
        ];
        let refs: Vec<&Predicate> = preds.iter().collect();
        let verdict = check_partition(&p, &refs, 2, &ctx()).unwrap();
        assert!(!verdict.accepted);
        let (e, holding) = verdict.failure.unwrap();
        assert_eq!(e, pe(&Word::parse("e x"), &Word::empty()));
        assert!(holding.is_empty());
    }

    #[test]
    fn components_refine_certified_partitions() {
        let p = m_times_n();
        let ctx = ctx();
        let preds = [
            parse_predicate_for_tests("Aprime", "P", "(fst matches x^(n+1)) and (snd matches a^n)"),
            parse_predicate_for_tests(
                "Asecond",
                "P",
                "(fst matches e x^(n+1)) and (snd matches a^n)",
            ),
            parse_predicate_for_tests("B", "P", "phi(fst) != a * snd"),
        ];
        let bound = 6;
        for pred in &preds {
            assert!(check_closed(&p, pred, bound, &ctx).unwrap().accepted);
        }
        let parts = components(&p, bound);
        for class in parts.classes() {
            let block = |e: &Elem| {
                preds
                    .iter()
                    .position(|pred| pred.eval(e, &p, &ctx).unwrap())
                    .unwrap()
            };
            let first = block(class[0]);
            for e in &class[1..] {
                assert_eq!(block(e), first, "class crosses partition blocks at {e}");
            }
        }
    }

    #[test]
    fn components_monotone_in_bound() {
        let p = m_times_n();
        for d in 2..6usize {
            let small = components(&p, d);
            let large = components(&p, d + 1);
            for a in &small.elements {
                for b in &small.elements {
                    if small.same_class(a, b) == Some(true) {
                        assert_eq!(large.same_class(a, b), Some(true));
                    }
                }
            }
        }
    }

    #[test]
    fn coproduct_keeps_copies_apart() {
        let m = monoid_m();
        let two = MSet::coproduct(
            "MM2",
            MSet::regular("MM", m.clone()),
            MSet::regular("MM", m),
        )
        .unwrap();
        assert_eq!(components(&two, 3).class_count(), 2);
    }

    fn arb_short_word() -> impl Strategy<Value = Word> {
        prop::collection::vec(prop::sample::select(vec!["e", "x"]), 0..=3)
            .prop_map(|syms| Word::from_syms(syms.into_iter().map(str::to_owned).collect()))
    }

    proptest! {
        #[test]
        fn action_coherence(w in arb_short_word(), idx in 0usize..30) {
            let p = m_times_n();
            let elems = p.enumerate(4);
            let e = &elems[idx % elems.len()];
            let m = monoid_m();
            prop_assert_eq!(p.act_word(e, &w), p.act_word(e, &m.normalize(&w)));
        }
    }
}
