//! Orchestrates the full counterexample verification and renders a
//! structured report: a hyperconnectedness witness (surjectivity), a
//! locality witness (retract + indecomposability), and the failure of the
//! binary-product comparison map, certified through a closed-partition
//! certificate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Config;
use crate::functors::{
    self, FunctorError, alpha_formula, check_indecomposable, check_retract, comparison_map,
};
use crate::mset::{self, Elem, MSetError};
use crate::rewriting::Word;

pub const PROP_HYPERCONNECTED: &str = "hyperconnected-witness";
pub const PROP_LOCAL: &str = "local-witness";
pub const PROP_COMPARISON: &str = "comparison-map-failure";

pub const CONCLUSION_NEGATIVE: &str = "not locally connected";
pub const CONCLUSION_WITHHELD: &str = "withheld";

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("degree bound {0} is too small: the verification needs bound >= 3")]
    BoundTooSmall(usize),
    #[error("config does not declare {0}")]
    Missing(String),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    MSet(#[from] MSetError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proposition {
    pub name: String,
    pub status: String,
    pub details: Vec<String>,
}

impl Proposition {
    fn accepted(name: &str, details: Vec<String>) -> Self {
        Proposition {
            name: name.to_owned(),
            status: "accepted".to_owned(),
            details,
        }
    }

    fn rejected(name: &str, details: Vec<String>) -> Self {
        Proposition {
            name: name.to_owned(),
            status: "rejected".to_owned(),
            details,
        }
    }

    pub fn is_accepted(&self) -> bool {
        self.status == "accepted"
    }
}

/// Closure and partition verdicts for a claimed coproduct decomposition,
/// plus the separated witness elements and their blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub mset: String,
    pub predicates: Vec<String>,
    pub bound: usize,
    pub closure_accepted: Vec<bool>,
    pub partition_accepted: bool,
    pub separated: Option<SeparatedWitness>,
}

impl PartitionCertificate {
    pub fn is_valid(&self) -> bool {
        self.closure_accepted.iter().all(|a| *a) && self.partition_accepted
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatedWitness {
    pub left: String,
    pub right: String,
    pub left_block: String,
    pub right_block: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportWitnesses {
    /// Preimage equations, e.g. `a = phi(x)`.
    pub surjectivity: Vec<String>,
    pub section: Option<String>,
    pub indecomposable_components: Option<usize>,
    /// Shared alpha image of the two witness tensor classes, e.g. `(a, 1)`.
    pub alpha_image: Option<String>,
    /// The two colliding tensor elements, `x (x) n'` rendered as text.
    pub collision: Option<[String; 2]>,
    pub partition: Option<PartitionCertificate>,
}

/// The end-to-end verification record. Serialization uses struct field
/// order throughout, so identical runs render byte-identically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub config_digest: String,
    pub bound: usize,
    pub propositions: Vec<Proposition>,
    pub witnesses: ReportWitnesses,
    pub conclusion: String,
}

impl Report {
    pub fn concluded(&self) -> bool {
        self.conclusion == CONCLUSION_NEGATIVE
    }
}

fn report(config: &Config, bound: usize, props: Vec<Proposition>, witnesses: ReportWitnesses, concluded: bool) -> Report {
    Report {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        config_digest: config.digest.clone(),
        bound,
        propositions: props,
        witnesses,
        conclusion: if concluded {
            CONCLUSION_NEGATIVE.to_owned()
        } else {
            CONCLUSION_WITHHELD.to_owned()
        },
    }
}

/// Runs the whole pipeline: confluence and morphism checks, the
/// surjectivity witness, the retract and indecomposability witnesses, the
/// three tensor computations, the alpha collision, and the
/// closed-partition certificate. Deterministic for fixed inputs.
pub fn verify_counterexample(config: &Config, bound: usize) -> Result<Report, CertifyError> {
    if bound < 3 {
        return Err(CertifyError::BoundTooSmall(bound));
    }
    let spec = config
        .verify
        .as_ref()
        .ok_or_else(|| CertifyError::Missing("a verify block".to_owned()))?;
    let phi = &config.morphisms[&spec.morphism];
    let left = &config.msets[&spec.left];
    let right = &config.msets[&spec.right];
    let product = &config.msets[&spec.product];
    let ctx = config.predicate_context();

    let mut props = Vec::new();
    let mut witnesses = ReportWitnesses::default();

    // Proposition 1: hyperconnected, witnessed by surjectivity of phi.
    let mut details = Vec::new();
    for p in config.presentations.values() {
        details.push(format!(
            "rules of {} are locally confluent ({} critical pairs)",
            p.name,
            p.critical_pairs().len()
        ));
    }
    details.push(format!(
        "{} : {} -> {} preserves all source relations",
        phi.name, phi.source.name, phi.target.name
    ));
    let surj = phi.check_surjective_on_generators(bound);
    for (g, w) in &surj.witnesses {
        match w {
            Some(w) => witnesses.surjectivity.push(format!("{g} = {}({w})", phi.name)),
            None => details.push(format!("no preimage found for `{g}` up to length {bound}")),
        }
    }
    if !surj.accepted {
        props.push(Proposition::rejected(PROP_HYPERCONNECTED, details));
        return Ok(report(config, bound, props, witnesses, false));
    }
    details.push("surjective on generators (exact)".to_owned());
    props.push(Proposition::accepted(PROP_HYPERCONNECTED, details));

    // Proposition 2: local, witnessed by the retract section and the
    // indecomposability evidence for the restricted action.
    let mut details = Vec::new();
    let mut local_ok = true;
    if let Some(name) = &spec.section {
        let sigma = &config.morphisms[name];
        let v = check_retract(sigma, phi, bound)?;
        if v.accepted {
            let d = format!(
                "{}(a^k) is a section of {} and right-M-equivariant for k <= {bound}",
                sigma.name, phi.name
            );
            witnesses.section = Some(d.clone());
            details.push(d);
        } else {
            local_ok = false;
            details.push(format!(
                "section check failed: {}",
                v.failure.unwrap_or_default()
            ));
        }
    } else {
        local_ok = false;
        details.push("no section declared".to_owned());
    }
    let ind = check_indecomposable(right, bound);
    witnesses.indecomposable_components = Some(ind.class_count);
    if ind.accepted {
        details.push(format!(
            "{} has exactly 1 component at bound {bound}",
            right.name
        ));
    } else {
        local_ok = false;
        details.push(format!(
            "{} has {} components at bound {bound}",
            right.name, ind.class_count
        ));
    }
    if !local_ok {
        props.push(Proposition::rejected(PROP_LOCAL, details));
        return Ok(report(config, bound, props, witnesses, false));
    }
    props.push(Proposition::accepted(PROP_LOCAL, details));

    // Proposition 3: the comparison map f_!(X x Y) -> f_!(X) x f_!(Y)
    // fails injectivity, certified beyond the bound by the partition.
    let mut details = Vec::new();
    let tx = functors::tensor(left, phi, bound)?;
    let ty = functors::tensor(right, phi, bound)?;
    for (t, m) in [(&tx, left), (&ty, right)] {
        details.push(format!(
            "f_!({}) has {} classes at bound {bound}",
            m.name,
            t.class_count()
        ));
        // verify the explicit iso to N is class-constant where applicable
        let home = m.word_presentation();
        let value = |e: &Elem, n: &Word| {
            let w = e.as_word().expect("word-shaped carrier");
            if home.as_deref() == Some(&*phi.source) {
                phi.target.normalize(&phi.apply(w).concat(n))
            } else {
                phi.target.normalize(&w.concat(n))
            }
        };
        if home.is_some() {
            match t.check_class_constant(value) {
                Ok(_) => details.push(format!(
                    "explicit map f_!({}) -> N is class-constant",
                    m.name
                )),
                Err([p1, p2]) => {
                    details.push(format!(
                        "explicit map f_!({}) -> N is NOT class-constant: {} (x) {} vs {} (x) {}",
                        m.name, p1.0, p1.1, p2.0, p2.1
                    ));
                    props.push(Proposition::rejected(PROP_COMPARISON, details));
                    return Ok(report(config, bound, props, witnesses, false));
                }
            }
        }
    }
    let cmp = comparison_map(left, right, phi, bound)?;
    if !cmp.well_defined {
        details.push("comparison map is not representative-independent".to_owned());
        props.push(Proposition::rejected(PROP_COMPARISON, details));
        return Ok(report(config, bound, props, witnesses, false));
    }
    details.push(format!(
        "comparison map: {} domain classes -> {} codomain class pairs",
        cmp.domain_classes, cmp.codomain_class_pairs
    ));
    if cmp.injective {
        details.push(format!(
            "comparison map is injective at bound {bound}; no failure witnessed"
        ));
        props.push(Proposition::rejected(PROP_COMPARISON, details));
        return Ok(report(config, bound, props, witnesses, false));
    }
    details.push("comparison map is NOT injective at the bound".to_owned());

    // The collision must be certified beyond the bound: alpha agreement on
    // the configured witnesses plus the closed-partition separation.
    let Some((w1, w2)) = &spec.witnesses else {
        details.push("no witnesses declared; distinctness is bound-qualified only".to_owned());
        props.push(Proposition::rejected(PROP_COMPARISON, details));
        return Ok(report(config, bound, props, witnesses, false));
    };
    let unit = Word::empty();
    let component_words = |e: &Elem| match e {
        Elem::Pair(a, b) => (
            a.as_word().expect("word pair").clone(),
            b.as_word().expect("word pair").clone(),
        ),
        _ => unreachable!("witnesses are product elements"),
    };
    let (m1, n1) = component_words(w1);
    let (m2, n2) = component_words(w2);
    let alpha1 = alpha_formula(&m1, &n1, &unit, phi);
    let alpha2 = alpha_formula(&m2, &n2, &unit, phi);
    if alpha1 != alpha2 {
        details.push(format!(
            "alpha({w1} (x) 1) = ({}, {}) differs from alpha({w2} (x) 1) = ({}, {})",
            alpha1.0, alpha1.1, alpha2.0, alpha2.1
        ));
        props.push(Proposition::rejected(PROP_COMPARISON, details));
        return Ok(report(config, bound, props, witnesses, false));
    }
    witnesses.alpha_image = Some(format!("({}, {})", alpha1.0, alpha1.1));
    witnesses.collision = Some([format!("{w1} (x) 1"), format!("{w2} (x) 1")]);
    details.push(format!(
        "alpha({w1} (x) 1) = alpha({w2} (x) 1) = ({}, {})",
        alpha1.0, alpha1.1
    ));
    let txy = functors::tensor(product, phi, bound)?;
    let c1 = txy.class_of(w1, &unit)?;
    let c2 = txy.class_of(w2, &unit)?;
    if c1 == c2 {
        details.push(format!(
            "witness tensor classes coincide at bound {bound}; no counterexample"
        ));
        props.push(Proposition::rejected(PROP_COMPARISON, details));
        return Ok(report(config, bound, props, witnesses, false));
    }
    details.push(format!(
        "witness tensor classes are distinct up to bound {bound}"
    ));

    // Partition certificate: every block closed, blocks disjoint and
    // covering, witnesses in different blocks.
    let preds: Vec<&crate::predicate::Predicate> = spec
        .partition
        .iter()
        .map(|name| &config.predicates[name])
        .collect();
    let mut closure_accepted = Vec::new();
    for p in &preds {
        let v = mset::check_closed(product, p, bound, &ctx)?;
        closure_accepted.push(v.accepted);
        if !v.accepted {
            let (e, g, img) = v.counterexample.unwrap();
            details.push(format!(
                "predicate {} is not closed: {e} . {g} = {img} leaves it",
                p.name
            ));
        }
    }
    let part = mset::check_partition(product, &preds, bound, &ctx)?;
    if !part.accepted {
        let (e, holding) = part.failure.clone().unwrap();
        details.push(format!(
            "not a partition: {e} satisfies [{}]",
            holding.join(", ")
        ));
    }
    let block_of = |e: &Elem| -> Result<Option<String>, MSetError> {
        for p in &preds {
            if p.eval(e, product, &ctx)? {
                return Ok(Some(p.name.clone()));
            }
        }
        Ok(None)
    };
    let b1 = block_of(w1)?;
    let b2 = block_of(w2)?;
    let separated = match (&b1, &b2) {
        (Some(b1), Some(b2)) if b1 != b2 => Some(SeparatedWitness {
            left: w1.to_string(),
            right: w2.to_string(),
            left_block: b1.clone(),
            right_block: b2.clone(),
        }),
        _ => None,
    };
    let cert = PartitionCertificate {
        mset: product.name.clone(),
        predicates: spec.partition.clone(),
        bound,
        closure_accepted,
        partition_accepted: part.accepted,
        separated: separated.clone(),
    };
    let cert_valid = cert.is_valid() && separated.is_some();
    if cert_valid {
        let sep = separated.as_ref().unwrap();
        details.push(format!(
            "closed partition {{{}}} certified at bound {bound}",
            spec.partition.join(", ")
        ));
        details.push(format!(
            "{} lies in {} and {} lies in {}; distinct closed blocks give distinct tensor \
             classes since f_! preserves coproducts (assumed lemma instance)",
            sep.left, sep.left_block, sep.right, sep.right_block
        ));
    } else if separated.is_none() {
        details.push("witnesses do not lie in distinct partition blocks".to_owned());
    }
    witnesses.partition = Some(cert);
    if !cert_valid {
        props.push(Proposition::rejected(PROP_COMPARISON, details));
        return Ok(report(config, bound, props, witnesses, false));
    }
    props.push(Proposition::accepted(PROP_COMPARISON, details));
    Ok(report(config, bound, props, witnesses, true))
}

/// Output format for `render_report`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

pub fn render_report(r: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(r),
    }
}

pub fn parse_report(json: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(json)
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let mut push = |line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    push(format!(
        "verification report (version {}, bound {}, config sha256 {})",
        r.version, r.bound, r.config_digest
    ));
    for p in &r.propositions {
        match p.name.as_str() {
            PROP_HYPERCONNECTED => {
                if p.is_accepted() {
                    push(format!(
                        "Proposition 1: HYPERCONNECTED (witness: {})",
                        r.witnesses.surjectivity.join(", ")
                    ));
                } else {
                    push("Proposition 1: REJECTED (surjectivity witness missing)".to_owned());
                }
            }
            PROP_LOCAL => {
                if p.is_accepted() {
                    push(format!(
                        "Proposition 2: LOCAL (retract section accepted; {} component)",
                        r.witnesses.indecomposable_components.unwrap_or(0)
                    ));
                } else {
                    push("Proposition 2: REJECTED (locality witness failed)".to_owned());
                }
            }
            PROP_COMPARISON => {
                if p.is_accepted() {
                    push("Proposition 3: comparison map NOT injective".to_owned());
                    if let Some(img) = &r.witnesses.alpha_image {
                        if let Some([a, b]) = &r.witnesses.collision {
                            push(format!("  alpha collision: {a} and {b} both map to {img}"));
                        }
                    }
                    if let Some(cert) = &r.witnesses.partition {
                        if let Some(sep) = &cert.separated {
                            push(format!(
                                "  partition {{{}}} certified at bound {}; {} in {}, {} in {}",
                                cert.predicates.join(", "),
                                cert.bound,
                                sep.left,
                                sep.left_block,
                                sep.right,
                                sep.right_block
                            ));
                        }
                    }
                } else {
                    push("Proposition 3: comparison-map failure NOT established".to_owned());
                }
            }
            other => push(format!("{other}: {}", p.status)),
        }
        for d in &p.details {
            push(format!("    - {d}"));
        }
    }
    if r.concluded() {
        push(format!("conclusion: {CONCLUSION_NEGATIVE}"));
    } else {
        push("conclusion: WITHHELD".to_owned());
    }
    out
}
