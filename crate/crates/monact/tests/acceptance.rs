//! End-to-end acceptance suite. Each criterion is one test, so the runner
//! prints exactly one pass/fail line per criterion:
//!
//! ```text
//! cargo test --test acceptance
//! ```

use std::collections::BTreeMap;
use std::process::Command;

use monact::config::Config;
use monact::functors::{alpha_formula, check_indecomposable, check_retract, comparison_map, tensor};
use monact::mset::{self, Elem};
use monact::rewriting::Word;

const PAPER_CFG: &str = include_str!("../configs/paper.cfg");
const IDENTITY_CFG: &str = include_str!("../configs/identity.cfg");

fn paper() -> Config {
    Config::parse(PAPER_CFG).expect("paper config parses")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_monact"))
}

/// Criterion 1: the rule set {ee -> e, xe -> x} passes the critical-pair
/// check; normal forms up to length 5 are exactly x^n (n <= 5) and e x^n
/// (n <= 4); a brute-force congruence closure on words of length <= 4
/// agrees with normal-form equality on all pairs.
#[test]
fn criterion_1_confluence_and_normal_forms() {
    let cfg = paper();
    let m = cfg.monoid("M").unwrap();
    assert!(m.is_locally_confluent());

    let got = m.normal_forms(5);
    let mut expected = Vec::new();
    for n in 0..=5usize {
        expected.push(Word::parse(&"x ".repeat(n)));
    }
    for n in 0..=4usize {
        expected.push(Word::parse(&format!("e {}", "x ".repeat(n))));
    }
    assert_eq!(got.len(), 11);
    for w in &expected {
        assert!(got.contains(w), "missing normal form {w}");
    }

    // Independent oracle: union-find closure under single rewrite steps
    // over all words of length <= 4, compared against normal-form equality
    // on every pair.
    let words = all_binary_words(4);
    let index: BTreeMap<&Vec<&str>, usize> =
        words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut parent: Vec<usize> = (0..words.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let rules: [(&[&str], &[&str]); 2] = [(&["e", "e"], &["e"]), (&["x", "e"], &["x"])];
    for (i, w) in words.iter().enumerate() {
        for (lhs, rhs) in rules {
            for at in 0..w.len().saturating_sub(lhs.len() - 1) {
                if &w[at..at + lhs.len()] == lhs {
                    let mut out = w[..at].to_vec();
                    out.extend_from_slice(rhs);
                    out.extend_from_slice(&w[at + lhs.len()..]);
                    let j = index[&out];
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
    }
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            let oracle = find(&mut parent, i) == find(&mut parent, j);
            let wu = Word::parse(&u.join(" "));
            let wv = Word::parse(&v.join(" "));
            let ours = m.normalize(&wu) == m.normalize(&wv);
            assert_eq!(oracle, ours, "disagreement on {wu} vs {wv}");
        }
    }
}

fn all_binary_words(max_len: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for g in ["e", "x"] {
                let mut v = w.clone();
                v.push(g);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Criterion 2: phi is a morphism and is surjective on generators with
/// witness a = phi(x).
#[test]
fn criterion_2_hyperconnected_witness() {
    let cfg = paper();
    let phi = &cfg.morphisms["phi"];
    // construction validated the relations; re-check them directly
    for (lhs, rhs) in &phi.source.relations {
        assert_eq!(phi.apply(lhs), phi.apply(rhs));
    }
    let v = phi.check_surjective_on_generators(6);
    assert!(v.accepted);
    assert_eq!(v.witnesses["a"], Some(Word::parse("x")));
}

/// Criterion 3: check_retract(sigma, phi) accepted at bound 8;
/// N-as-M-set is indecomposable (exactly 1 component at bound 6).
#[test]
fn criterion_3_local_witnesses() {
    let cfg = paper();
    let phi = &cfg.morphisms["phi"];
    let sigma = &cfg.morphisms["sigma"];
    let v = check_retract(sigma, phi, 8).unwrap();
    assert!(v.accepted, "{:?}", v.failure);

    let nn = cfg.mset("NN").unwrap();
    let ind = check_indecomposable(nn, 6);
    assert!(ind.accepted);
    assert_eq!(ind.class_count, 1);
}

/// Criterion 4: tensor partitions of M and N at bound 6 have exactly 7
/// classes, matched to {1, a, ..., a^6} by the explicit class-constant
/// maps m (x) n -> phi(m) n and n (x) n' -> n n'.
#[test]
fn criterion_4_tensor_of_m_and_n() {
    let cfg = paper();
    let phi = &cfg.morphisms["phi"];
    let n = &phi.target;
    let powers_of_a: Vec<Word> = (0..=6).map(|k| Word::single("a").pow(k)).collect();

    let tm = tensor(cfg.mset("MM").unwrap(), phi, 6).unwrap();
    assert_eq!(tm.class_count(), 7);
    let mut values = tm
        .check_class_constant(|e, w| {
            n.normalize(&phi.apply(e.as_word().unwrap()).concat(w))
        })
        .expect("m (x) n -> phi(m) n is class-constant");
    values.sort_by_key(Word::len);
    assert_eq!(values, powers_of_a);

    let tn = tensor(cfg.mset("NN").unwrap(), phi, 6).unwrap();
    assert_eq!(tn.class_count(), 7);
    let mut values = tn
        .check_class_constant(|e, w| n.normalize(&e.as_word().unwrap().concat(w)))
        .expect("n (x) n' -> n n' is class-constant");
    values.sort_by_key(Word::len);
    assert_eq!(values, powers_of_a);
}

/// Criterion 5: the alpha collision is exact; the witness tensor classes
/// stay distinct for every bound in {3,...,10}; the {A', A'', B}
/// partition certificate is accepted at bound 8; verify concludes
/// "not locally connected" with exit code 0.
#[test]
fn criterion_5_comparison_failure() {
    let cfg = paper();
    let phi = &cfg.morphisms["phi"];
    let unit = Word::empty();
    let a1 = alpha_formula(&Word::parse("x"), &unit, &unit, phi);
    let a2 = alpha_formula(&Word::parse("e x"), &unit, &unit, phi);
    assert_eq!(a1, (Word::parse("a"), Word::empty()));
    assert_eq!(a1, a2);

    let p = cfg.mset("P").unwrap();
    let w1 = Elem::pair(Elem::word(Word::parse("x")), Elem::word(Word::empty()));
    let w2 = Elem::pair(Elem::word(Word::parse("e x")), Elem::word(Word::empty()));
    for bound in 3..=10usize {
        let t = tensor(p, phi, bound).unwrap();
        let c1 = t.class_of(&w1, &unit).unwrap();
        let c2 = t.class_of(&w2, &unit).unwrap();
        assert_ne!(c1, c2, "classes merged at bound {bound}");
    }

    let ctx = cfg.predicate_context();
    let preds: Vec<_> = ["Aprime", "Asecond", "B"]
        .iter()
        .map(|name| &cfg.predicates[*name])
        .collect();
    for pr in &preds {
        let v = mset::check_closed(p, pr, 8, &ctx).unwrap();
        assert!(v.accepted, "{} not closed: {:?}", pr.name, v.counterexample);
    }
    let v = mset::check_partition(p, &preds, 8, &ctx).unwrap();
    assert!(v.accepted, "partition failed: {:?}", v.failure);

    let report = monact::verify_counterexample(&cfg, 8).unwrap();
    assert_eq!(report.conclusion, "not locally connected");
    let cert = report.witnesses.partition.as_ref().unwrap();
    assert!(cert.is_valid() && cert.separated.is_some());

    let out = bin().args(["verify", "-c", "paper.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("conclusion: not locally connected"));
}

/// Criterion 6: over all right N-sets and right M-sets on carriers of
/// size <= 3, |Hom_N(Y1,Y2)| = |Hom_M(f*Y1,f*Y2)| and
/// |Hom_M(f*Y,Z)| = |Hom_N(Y,f_*Z)| with f_* the fixed-point rule.
#[test]
fn criterion_6_adjunction_hom_counts() {
    // A finite right N-set is an a-self-map; a finite right M-set is a
    // pair (e, x) of self-maps with e idempotent and e after x = x.
    let nsets = all_nsets(3);
    let msets = all_msets(3);
    assert_eq!(nsets.len(), 1 + 4 + 27);
    assert_eq!(msets.len(), 1 + 6 + 78);

    // f^* is fullness-preserving on homs: e acts trivially on f^*Y.
    for y1 in &nsets {
        for y2 in &nsets {
            let lhs = hom_count(std::slice::from_ref(y1), std::slice::from_ref(y2));
            let fy1 = pullback(y1);
            let fy2 = pullback(y2);
            let rhs = hom_count(&fy1, &fy2);
            assert_eq!(lhs, rhs, "Hom_N vs Hom_M(f*-,f*-) for {y1:?}, {y2:?}");
        }
    }

    for y in &nsets {
        let fy = pullback(y);
        for z in &msets {
            let lhs = hom_count(&fy, &[z.0.clone(), z.1.clone()]);
            let fz = pushforward(z);
            let rhs = hom_count(std::slice::from_ref(y), &[fz]);
            assert_eq!(lhs, rhs, "adjunction mismatch for Y={y:?}, Z={z:?}");
        }
    }
}

type SelfMap = Vec<usize>;

fn all_maps(n: usize) -> Vec<SelfMap> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..n).map(move |v| {
                    let mut m = m.clone();
                    m.push(v);
                    m
                })
            })
            .collect();
    }
    out
}

fn all_nsets(max: usize) -> Vec<SelfMap> {
    (1..=max).flat_map(all_maps).collect()
}

fn all_msets(max: usize) -> Vec<(SelfMap, SelfMap)> {
    let mut out = Vec::new();
    for n in 1..=max {
        for e in all_maps(n) {
            if (0..n).any(|z| e[e[z]] != e[z]) {
                continue;
            }
            for x in all_maps(n) {
                // z.x.e = z.x, i.e. the image of x is fixed by e
                if (0..n).all(|z| e[x[z]] == x[z]) {
                    out.push((e.clone(), x));
                }
            }
        }
    }
    out
}

/// f^*Y: same carrier, e acts as the identity, x acts as a.
fn pullback(a: &SelfMap) -> Vec<SelfMap> {
    vec![(0..a.len()).collect(), a.clone()]
}

/// f_*Z = Hom_M(N, Z): carrier = fixed points of e, with a acting by x.
fn pushforward((e, x): &(SelfMap, SelfMap)) -> SelfMap {
    let fixed: Vec<usize> = (0..e.len()).filter(|&z| e[z] == z).collect();
    let pos: BTreeMap<usize, usize> = fixed.iter().enumerate().map(|(i, &z)| (z, i)).collect();
    fixed.iter().map(|&z| pos[&x[z]]).collect()
}

/// Number of maps commuting with every listed generator action. The two
/// actions must list the same generators in the same order.
fn hom_count(src: &[SelfMap], dst: &[SelfMap]) -> usize {
    assert_eq!(src.len(), dst.len());
    let n = src.first().map_or(0, Vec::len);
    let m = dst.first().map_or(1, Vec::len);
    if n == 0 {
        // the empty M-set has exactly one map anywhere
        return 1;
    }
    all_maps_between(n, m)
        .into_iter()
        .filter(|h| {
            src.iter()
                .zip(dst)
                .all(|(sa, da)| (0..n).all(|z| h[sa[z]] == da[h[z]]))
        })
        .count()
}

fn all_maps_between(n: usize, m: usize) -> Vec<SelfMap> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|h| {
                (0..m).map(move |v| {
                    let mut h = h.clone();
                    h.push(v);
                    h
                })
            })
            .collect();
    }
    out
}

/// Criterion 7: the identity-morphism config yields a bijective comparison
/// map at bound 6 and the conclusion is withheld with exit code 1.
#[test]
fn criterion_7_negative_control() {
    let cfg = Config::parse(IDENTITY_CFG).unwrap();
    let id = &cfg.morphisms["id"];
    let cmp = comparison_map(
        cfg.mset("NN").unwrap(),
        cfg.mset("NR").unwrap(),
        id,
        6,
    )
    .unwrap();
    assert!(cmp.well_defined);
    assert!(cmp.injective, "comparison map must be injective");
    assert!(cmp.surjective_at_bound, "comparison map must be surjective");
    assert!(cmp.collision.is_none());

    let out = bin().args(["verify", "-c", "identity.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("conclusion: WITHHELD"));
}

/// Criterion 8: two consecutive `verify --json` runs on the paper config
/// produce byte-identical output. Also: bound 1 is a usage error (exit 2).
#[test]
fn criterion_8_determinism() {
    let run = || bin().args(["verify", "-c", "paper.cfg", "--json"]).output().unwrap();
    let first = run();
    let second = run();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
    // stdout parses as the report structure
    let report: monact::Report =
        serde_json_parse(std::str::from_utf8(&first.stdout).unwrap());
    assert_eq!(report.conclusion, "not locally connected");

    let out = bin()
        .args(["verify", "-c", "paper.cfg", "--bound", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn serde_json_parse(text: &str) -> monact::Report {
    monact::certify::parse_report(text).expect("report JSON round-trips")
}
