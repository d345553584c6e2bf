//! The three functors of the induced geometric morphism: `f_!` as a tensor
//! with the free monoid N via bounded congruence saturation, `f^*` as
//! restriction of scalars (see `mset`), and `f_*` as a hom-set computation,
//! plus the binary-product comparison map and retract witness checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::monoid::{MonoidMorphism, all_words};
use crate::mset::{self, Elem, MSet};
use crate::rewriting::Word;
use crate::uf::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctorError {
    #[error("mset is an action of {got}, expected the morphism source {expected}")]
    SourceMismatch { got: String, expected: String },
    #[error("morphism target {0} is not a free monoid on one generator")]
    TargetNotFree(String),
    #[error("pair ({elem}, {word}) exceeds the degree bound {bound}")]
    PairOutOfBound {
        elem: Elem,
        word: Word,
        bound: usize,
    },
    #[error("no source word of length <= {0} maps onto the target generator")]
    NoGeneratorPreimage(usize),
    #[error("hom-set action escapes the enumeration bound {0}; raise the bound")]
    BoundInsufficient(usize),
    #[error("section is not a map from {expected_source} to {expected_target}")]
    SectionMismatch {
        expected_source: String,
        expected_target: String,
    },
}

/// A recorded saturation move: pair `from` was merged with pair `to`
/// because of the generator `gen`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorMove {
    pub from: usize,
    pub to: usize,
    pub gen: String,
}

/// Classes of `X (x)_M N` on pairs enumerated up to a degree bound, where
/// the degree of a pair `(x, n)` is `degree(x) + len(n)` so that the class
/// count at bound d matches the degree-d truncation of the tensor.
#[derive(Clone, Debug)]
pub struct TensorPartition {
    pub bound: usize,
    pairs: Vec<(Elem, Word)>,
    class_ids: Vec<usize>,
    class_count: usize,
    moves: Vec<TensorMove>,
}

impl TensorPartition {
    pub fn pairs(&self) -> &[(Elem, Word)] {
        &self.pairs
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_ids(&self) -> &[usize] {
        &self.class_ids
    }

    pub fn moves(&self) -> &[TensorMove] {
        &self.moves
    }

    pub fn index_of(&self, x: &Elem, n: &Word) -> Option<usize> {
        self.pairs.binary_search(&(x.clone(), n.clone())).ok()
    }

    /// The union-find representative class of `x (x) n`.
    pub fn class_of(&self, x: &Elem, n: &Word) -> Result<usize, FunctorError> {
        self.index_of(x, n)
            .map(|i| self.class_ids[i])
            .ok_or_else(|| FunctorError::PairOutOfBound {
                elem: x.clone(),
                word: n.clone(),
                bound: self.bound,
            })
    }

    /// Smallest pair of each class, indexed by class id.
    pub fn representatives(&self) -> Vec<&(Elem, Word)> {
        let mut reps: Vec<Option<&(Elem, Word)>> = vec![None; self.class_count];
        for (i, p) in self.pairs.iter().enumerate() {
            let c = self.class_ids[i];
            if reps[c].is_none() {
                reps[c] = Some(p);
            }
        }
        reps.into_iter().map(|r| r.expect("nonempty class")).collect()
    }

    /// Checks that `f` is constant on every class; returns the value per
    /// class, or a witness pair of same-class pairs with distinct values.
    pub fn check_class_constant<F>(&self, mut f: F) -> Result<Vec<Word>, [(Elem, Word); 2]>
    where
        F: FnMut(&Elem, &Word) -> Word,
    {
        let mut values: Vec<Option<(usize, Word)>> = vec![None; self.class_count];
        for (i, (x, n)) in self.pairs.iter().enumerate() {
            let v = f(x, n);
            let c = self.class_ids[i];
            match &values[c] {
                None => values[c] = Some((i, v)),
                Some((j, prev)) if *prev != v => {
                    return Err([self.pairs[*j].clone(), self.pairs[i].clone()]);
                }
                _ => {}
            }
        }
        Ok(values
            .into_iter()
            .map(|v| v.expect("nonempty class").1)
            .collect())
    }

    /// Checks that the right N-action `(x, n) . a = (x, n a)` is constant
    /// on classes wherever both sides are enumerated.
    pub fn check_right_action_well_defined(
        &self,
        target_gen: &str,
    ) -> Option<((Elem, Word), (Elem, Word))> {
        let mut acted_class: Vec<Option<(usize, usize)>> = vec![None; self.class_count];
        for (i, (x, n)) in self.pairs.iter().enumerate() {
            let na = n.push(target_gen);
            let Some(j) = self.index_of(x, &na) else {
                continue;
            };
            let c = self.class_ids[i];
            match acted_class[c] {
                None => acted_class[c] = Some((i, self.class_ids[j])),
                Some((first, cls)) if cls != self.class_ids[j] => {
                    return Some((self.pairs[first].clone(), self.pairs[i].clone()));
                }
                _ => {}
            }
        }
        None
    }
}

fn require_tensor_shape(x: &MSet, phi: &MonoidMorphism) -> Result<String, FunctorError> {
    if x.acting != phi.source {
        return Err(FunctorError::SourceMismatch {
            got: x.acting.name.clone(),
            expected: phi.source.name.clone(),
        });
    }
    if !phi.target.is_free_on_one_generator() {
        return Err(FunctorError::TargetNotFree(phi.target.name.clone()));
    }
    Ok(phi.target.generators[0].clone())
}

/// Computes `f_!(X) = X (x)_M N` at a degree bound: enumerate pairs
/// `(x, n)` with `degree(x) + len(n) <= bound` and merge
/// `(x . g, n) ~ (x, phi(g) n)` for every generator `g` whenever both pairs
/// are enumerated. Generator moves suffice; the relation for arbitrary `m`
/// follows by transitivity. Non-merged classes are distinct up to the
/// bound only.
pub fn tensor(x: &MSet, phi: &MonoidMorphism, bound: usize) -> Result<TensorPartition, FunctorError> {
    let a = require_tensor_shape(x, phi)?;
    let mut pairs = Vec::new();
    for e in x.enumerate(bound) {
        let deg = x.degree(&e);
        let mut n = Word::empty();
        for _ in 0..=bound.saturating_sub(deg) {
            pairs.push((e.clone(), n.clone()));
            n = n.push(&a);
        }
    }
    pairs.sort();
    let index: BTreeMap<&(Elem, Word), usize> =
        pairs.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let in_bound = |e: &Elem, n: &Word| x.degree(e) + n.len() <= bound;
    let mut uf = UnionFind::new(pairs.len());
    let mut moves = Vec::new();
    for (e, n) in &pairs {
        for g in &x.acting.generators {
            let acted = x.act_gen(e, g);
            let shifted = phi.target.normalize(&phi.apply(&Word::single(g)).concat(n));
            if in_bound(&acted, n) && in_bound(e, &shifted) {
                let i = index[&(acted, n.clone())];
                let j = index[&(e.clone(), shifted)];
                uf.union(i, j);
                moves.push(TensorMove {
                    from: i,
                    to: j,
                    gen: g.clone(),
                });
            }
        }
    }
    let class_ids = uf.canonical_classes();
    let class_count = class_ids.iter().copied().max().map_or(0, |m| m + 1);
    Ok(TensorPartition {
        bound,
        pairs,
        class_ids,
        class_count,
        moves,
    })
}

/// The rewritten comparison map `alpha : (M x N) (x)_M N -> N x N`,
/// `(m, n) (x) n' -> (phi(m) n', n n')`. Exact; no bound involved.
pub fn alpha_formula(
    m: &Word,
    n: &Word,
    n_prime: &Word,
    phi: &MonoidMorphism,
) -> (Word, Word) {
    let first = phi.target.normalize(&phi.apply(m).concat(n_prime));
    let second = phi.target.normalize(&n.concat(n_prime));
    (first, second)
}

/// Two distinct domain classes of `f_!(X x Y)` sharing one image in
/// `f_!(X) x f_!(Y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionWitness {
    pub left_rep: (Elem, Word),
    pub right_rep: (Elem, Word),
    pub image: (usize, usize),
}

/// The induced map `f_!(X x Y) -> f_!(X) x f_!(Y)` on enumerated classes.
#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub bound: usize,
    pub domain_classes: usize,
    pub codomain_class_pairs: usize,
    /// Image of each domain class.
    pub map: Vec<(usize, usize)>,
    /// Representative-independence on enumerated data.
    pub well_defined: bool,
    pub injective: bool,
    pub surjective_at_bound: bool,
    pub collision: Option<CollisionWitness>,
}

/// Computes `f_!(X x Y)`, `f_!(X)`, `f_!(Y)` and the induced map
/// `((x, y) (x) n) -> (class of x (x) n, class of y (x) n)`, flagging
/// injectivity failures with a witness pair of domain classes.
pub fn comparison_map(
    x: &MSet,
    y: &MSet,
    phi: &MonoidMorphism,
    bound: usize,
) -> Result<ComparisonReport, FunctorError> {
    let product = MSet::product("_cmp", x.clone(), y.clone())
        .expect("comparison operands act over the same monoid");
    let txy = tensor(&product, phi, bound)?;
    let tx = tensor(x, phi, bound)?;
    let ty = tensor(y, phi, bound)?;

    let mut map: Vec<Option<(usize, usize)>> = vec![None; txy.class_count()];
    let mut well_defined = true;
    for (i, (pair, n)) in txy.pairs().iter().enumerate() {
        let Elem::Pair(a, b) = pair else {
            unreachable!("product carrier elements are pairs")
        };
        // component degree <= pair degree, so both lookups stay in bound
        let img = (tx.class_of(a, n)?, ty.class_of(b, n)?);
        let c = txy.class_ids()[i];
        match map[c] {
            None => map[c] = Some(img),
            Some(prev) if prev != img => well_defined = false,
            _ => {}
        }
    }
    let map: Vec<(usize, usize)> = map
        .into_iter()
        .map(|m| m.expect("nonempty class"))
        .collect();

    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut collision = None;
    for (c, img) in map.iter().enumerate() {
        if let Some(&first) = seen.get(img) {
            if collision.is_none() {
                let reps = txy.representatives();
                collision = Some(CollisionWitness {
                    left_rep: reps[first].clone(),
                    right_rep: reps[c].clone(),
                    image: *img,
                });
            }
        } else {
            seen.insert(*img, c);
        }
    }
    let codomain_class_pairs = tx.class_count() * ty.class_count();
    Ok(ComparisonReport {
        bound,
        domain_classes: txy.class_count(),
        codomain_class_pairs,
        injective: collision.is_none(),
        surjective_at_bound: seen.len() == codomain_class_pairs,
        collision,
        well_defined,
        map,
    })
}

/// The hom-set `f_*(Y) = Hom_M(N, Y)` computed through the cyclic
/// structure of N as a right M-set: a map `g` is determined by `g(1)`,
/// which must be fixed by every generator that `phi` sends to the
/// identity; the right N-action sends `g(1) = y` to `y . w` for any source
/// word `w` with `phi(w) = a`.
#[derive(Clone, Debug)]
pub struct HomSet {
    pub bound: usize,
    /// Admissible values of `g(1)`, sorted.
    pub elements: Vec<Elem>,
    /// Index of `y . w` per element; `None` when the result escapes the
    /// enumeration bound.
    pub action: Vec<Option<usize>>,
    /// Source word acting as the target generator.
    pub generator_word: Word,
    pub total: bool,
}

pub fn hom_set(y: &MSet, phi: &MonoidMorphism, bound: usize) -> Result<HomSet, FunctorError> {
    let a = require_tensor_shape(y, phi)?;
    let target_gen = phi.target.normalize(&Word::single(&a));
    let generator_word = all_words(&phi.source.generators, bound.max(1))
        .into_iter()
        .find(|w| phi.apply(w) == target_gen)
        .ok_or(FunctorError::NoGeneratorPreimage(bound.max(1)))?;
    let trivial_gens: Vec<&String> = phi
        .source
        .generators
        .iter()
        .filter(|g| phi.apply(&Word::single((*g).clone())).is_empty())
        .collect();
    let elements: Vec<Elem> = y
        .enumerate(bound)
        .into_iter()
        .filter(|e| trivial_gens.iter().all(|g| y.act_gen(e, g) == *e))
        .collect();
    let mut total = true;
    let action = elements
        .iter()
        .map(|e| {
            let img = y.act_word(e, &generator_word);
            match elements.binary_search(&img) {
                Ok(i) => Some(i),
                Err(_) => {
                    total = false;
                    None
                }
            }
        })
        .collect();
    Ok(HomSet {
        bound,
        elements,
        action,
        generator_word,
        total,
    })
}

impl HomSet {
    /// Packages the hom-set as a finite explicit right N-set. Requires the
    /// action not to escape the bound.
    pub fn to_finite_nset(
        &self,
        name: impl Into<String>,
        target: Arc<crate::monoid::MonoidPresentation>,
    ) -> Result<MSet, FunctorError> {
        if !self.total {
            return Err(FunctorError::BoundInsufficient(self.bound));
        }
        let gen = target.generators[0].clone();
        let names: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        let action = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let j = self.action[i].expect("total action");
                ((names[i].clone(), gen.clone()), names[j].clone())
            })
            .collect();
        MSet::finite(name, target, names, action)
            .map_err(|_| FunctorError::BoundInsufficient(self.bound))
    }
}

/// Retract witness: accepted iff `phi . sigma = id` on all target elements
/// up to the bound and `sigma` is right-M-equivariant on them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetractVerdict {
    pub accepted: bool,
    pub bound: usize,
    pub failure: Option<String>,
}

pub fn check_retract(
    sigma: &MonoidMorphism,
    phi: &MonoidMorphism,
    bound: usize,
) -> Result<RetractVerdict, FunctorError> {
    if sigma.source != phi.target || sigma.target != phi.source {
        return Err(FunctorError::SectionMismatch {
            expected_source: phi.target.name.clone(),
            expected_target: phi.source.name.clone(),
        });
    }
    if !phi.target.is_free_on_one_generator() {
        return Err(FunctorError::TargetNotFree(phi.target.name.clone()));
    }
    let a_gen = phi.target.generators[0].clone();
    let a = Word::single(a_gen.clone());
    let w = phi.source.normalize(&sigma.images[&a_gen]);

    // The generator image only determines the section away from the
    // identity: as a map of right M-sets, sigma sends a^k to u.w^k where
    // the basepoint u = sigma(1) is forced by equivariance to satisfy
    // u.g = u for every generator with trivial phi-image, u.w = w, and
    // phi(u) = 1. Pick the shortlex-least such u; if none exists the
    // declared images admit no equivariant extension and we report the
    // first equivariance violation of the literal extension (u = 1).
    let trivial: Vec<&String> = phi
        .source
        .generators
        .iter()
        .filter(|g| phi.apply(&Word::single((*g).clone())).is_empty())
        .collect();
    let mut candidates: Vec<Word> = phi.source.normal_forms(bound).into_iter().collect();
    candidates.sort_by(|p, q| p.len().cmp(&q.len()).then_with(|| p.cmp(q)));
    let basepoint = candidates.into_iter().find(|u| {
        phi.apply(u).is_empty()
            && phi.source.normalize(&u.concat(&w)) == w
            && trivial
                .iter()
                .all(|g| phi.source.normalize(&u.push(g)) == *u)
    });
    let Some(basepoint) = basepoint else {
        let literal = Word::empty();
        let failure = trivial
            .iter()
            .map(|g| {
                let moved = phi.source.normalize(&literal.push(g));
                format!("sigma(1 . {g}) = 1 but sigma(1) . {g} = {moved}")
            })
            .next()
            .unwrap_or_else(|| "no equivariant basepoint for sigma(1) exists".to_owned());
        return Ok(RetractVerdict {
            accepted: false,
            bound,
            failure: Some(failure),
        });
    };

    let section = |k: usize| phi.source.normalize(&basepoint.concat(&w.pow(k)));
    for k in 0..=bound {
        let n = a.pow(k);
        let s = section(k);
        let back = phi.apply(&s);
        if back != n {
            return Ok(RetractVerdict {
                accepted: false,
                bound,
                failure: Some(format!("phi(sigma({n})) = {back}, expected {n}")),
            });
        }
        for g in &phi.source.generators {
            // n . m = n phi(m) in N; equivariance: sigma(n . m) = sigma(n) . m
            let step = phi.apply(&Word::single(g.clone())).len();
            if k + step > bound {
                continue;
            }
            let lhs = section(k + step);
            let rhs = phi.source.normalize(&s.push(g));
            if lhs != rhs {
                return Ok(RetractVerdict {
                    accepted: false,
                    bound,
                    failure: Some(format!(
                        "sigma({n} . {g}) = {lhs} but sigma({n}) . {g} = {rhs}"
                    )),
                });
            }
        }
    }
    Ok(RetractVerdict {
        accepted: true,
        bound,
        failure: None,
    })
}

/// Evidence of indecomposability at a bound: the enumerated carrier forms
/// a single component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndecomposableVerdict {
    pub accepted: bool,
    pub bound: usize,
    pub class_count: usize,
}

pub fn check_indecomposable(x: &MSet, bound: usize) -> IndecomposableVerdict {
    let parts = mset::components(x, bound);
    IndecomposableVerdict {
        accepted: parts.class_count() == 1,
        bound,
        class_count: parts.class_count(),
    }
}
