//! Reachability chain `S_i⁽⁺⁾`, past kernel `S₁⁽⁻⁾`, controllability and
//! the structural predicates for encoders over `Z_p ⊠ S`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::encoder::Encoder;
use crate::error::{Error, Result};
use crate::group::{is_prime, FiniteAbelianGroup, Subgroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachabilityChain {
    /// `S₀, S₁⁽⁺⁾, …` up to and including the first repeated set.
    pub sets: Vec<Subgroup>,
    /// Least `k` with `S_k = S_{k+1}`.
    pub stabilized_at: usize,
    pub reaches_all: bool,
}

impl ReachabilityChain {
    pub fn last(&self) -> &Subgroup {
        self.sets.last().unwrap()
    }

    /// `S_i` for any `i`, constant past stabilization.
    pub fn get(&self, i: usize) -> &Subgroup {
        &self.sets[i.min(self.stabilized_at)]
    }

    pub fn is_nested(&self) -> bool {
        self.sets.windows(2).all(|w| w[0].is_subset_of(&w[1]))
    }
}

fn mask_to_subgroup(s: &FiniteAbelianGroup, mask: &[bool]) -> Subgroup {
    let elements = mask
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| s.element(i))
        .collect();
    Subgroup::from_set_unchecked(s, elements)
}

/// `ν(U × X)` as a mask over S.
pub fn image_step(enc: &Encoder, set: &[bool]) -> Vec<bool> {
    let mut next = vec![false; set.len()];
    for si in (0..set.len()).filter(|&si| set[si]) {
        for ui in 0..enc.u().order() {
            next[enc.next_index(ui, si)] = true;
        }
    }
    next
}

pub fn forward_chain(enc: &Encoder) -> ReachabilityChain {
    let s = enc.s();
    let mut mask = vec![false; s.order()];
    mask[0] = true;
    let mut sets = vec![mask_to_subgroup(s, &mask)];
    loop {
        let next = image_step(enc, &mask);
        if next == mask {
            break;
        }
        sets.push(mask_to_subgroup(s, &next));
        mask = next;
        assert!(
            sets.len() <= s.order() + 1,
            "chain must stabilize within |S| steps"
        );
    }
    let stabilized_at = sets.len() - 1;
    let reaches_all = sets[stabilized_at].order() == s.order();
    ReachabilityChain {
        sets,
        stabilized_at,
        reaches_all,
    }
}

/// States reachable from `start` in exactly `steps` steps.
pub fn reachable_exactly(enc: &Encoder, start: usize, steps: usize) -> Vec<bool> {
    let mut mask = vec![false; enc.s().order()];
    mask[start] = true;
    for _ in 0..steps {
        mask = image_step(enc, &mask);
    }
    mask
}

/// `S₁⁽⁻⁾`, the states with some input leading to the identity.
pub fn past_kernel(enc: &Encoder) -> Result<Subgroup> {
    let s = enc.s();
    let mask: Vec<bool> = (0..s.order())
        .map(|si| (0..enc.u().order()).any(|ui| enc.next_index(ui, si) == 0))
        .collect();
    let kernel = mask_to_subgroup(s, &mask);
    kernel.verify_closed()?;
    let forward = image_step(enc, &{
        let mut m = vec![false; s.order()];
        m[0] = true;
        m
    });
    let forward_size = forward.iter().filter(|&&b| b).count();
    if kernel.order() != forward_size {
        return Err(Error::SizeViolation {
            expected: forward_size,
            found: kernel.order(),
        });
    }
    Ok(kernel)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlVerdict {
    pub controllable: bool,
    /// Least `L` with `S_L⁽⁺⁾ = S`.
    pub index: Option<usize>,
    pub chain: ReachabilityChain,
    /// `S_k⁽⁺⁾` at stabilization: all of S, or the proper subgroup it is stuck in.
    pub witness: Subgroup,
    /// The splice definition only admits windows of length at least 2.
    pub index_below_two: bool,
    /// Exact-step reachability from every state agrees with the verdict.
    pub oracle_agrees: bool,
}

fn all_reach_everything(enc: &Encoder, steps: usize) -> bool {
    (0..enc.s().order()).all(|s| reachable_exactly(enc, s, steps).iter().all(|&b| b))
}

pub fn decide_controllability(enc: &Encoder) -> ControlVerdict {
    let chain = forward_chain(enc);
    let controllable = chain.reaches_all;
    let index = controllable.then_some(chain.stabilized_at);
    let oracle_agrees = match index {
        Some(l) => all_reach_everything(enc, l) && (l == 0 || !all_reach_everything(enc, l - 1)),
        None => !all_reach_everything(enc, enc.s().order()),
    };
    ControlVerdict {
        controllable,
        index,
        witness: chain.last().clone(),
        index_below_two: index.is_some_and(|l| l < 2),
        oracle_agrees,
        chain,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredicateReport {
    pub predicates: BTreeMap<String, bool>,
    pub counterexamples: BTreeMap<String, String>,
    /// Facts recorded for the sweep tallies that are not pass/fail checks.
    pub observations: BTreeMap<String, bool>,
}

impl PredicateReport {
    pub fn all_pass(&self) -> bool {
        self.predicates.values().all(|&b| b)
    }

    pub fn violations(&self) -> impl Iterator<Item = (&String, &String)> {
        self.predicates
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(move |(k, _)| (k, &self.counterexamples[k]))
    }

    fn record(&mut self, name: &str, failure: Option<String>) {
        self.predicates.insert(name.to_string(), failure.is_none());
        if let Some(c) = failure {
            self.counterexamples.insert(name.to_string(), c);
        }
    }
}

fn is_power_of(p: u32, mut n: usize) -> bool {
    while n.is_multiple_of(p as usize) {
        n /= p as usize;
    }
    n == 1
}

fn is_cyclic_subgroup(h: &Subgroup) -> bool {
    let g = h.parent();
    h.elements()
        .iter()
        .any(|x| g.element_order(x) as usize == h.order())
}

/// Evaluates every predicate. Requires `U ≅ Z_p`.
pub fn evaluate_predicates(enc: &Encoder) -> Result<PredicateReport> {
    let p = match enc.u().moduli() {
        [p] if is_prime(*p) => *p,
        _ => return Err(Error::NotApplicable(format!("U = {} is not Z_p", enc.u()))),
    };
    let s = enc.s();
    let verdict = decide_controllability(enc);
    let chain = &verdict.chain;
    let past = past_kernel(enc)?;
    let past_trivial = past.is_trivial();
    let mut report = PredicateReport::default();

    report.record(
        "thm3_subgroups",
        chain
            .sets
            .iter()
            .position(|h| !h.is_closed())
            .map(|i| format!("S_{i} is not closed")),
    );
    let next_after = image_step(enc, &chain.last().mask());
    let permanent = mask_to_subgroup(s, &next_after) == *chain.last();
    report.record(
        "thm3_nested_stable",
        if !chain.is_nested() {
            Some("chain is not nested".into())
        } else if !permanent {
            Some(format!(
                "S_{} changes after repeating",
                chain.stabilized_at + 1
            ))
        } else {
            None
        },
    );
    report.record(
        "thm4_pgroup",
        chain
            .sets
            .iter()
            .position(|h| !is_power_of(p, h.order()))
            .map(|i| format!("|S_{i}| = {}", chain.sets[i].order())),
    );

    // fresh layer: for [S_k : S_{k-1}] = p, every s in S_{k-1} \ S_{k-2} leaves S_{k-1}
    let mut fresh = None;
    'outer: for k in 2..chain.sets.len() {
        if chain.sets[k].order() != p as usize * chain.sets[k - 1].order() {
            continue;
        }
        for x in chain.sets[k - 1]
            .elements()
            .iter()
            .filter(|x| !chain.sets[k - 2].contains(x))
        {
            for u in enc.u().elements() {
                let y = enc.next_state(&u, x);
                if chain.sets[k - 1].contains(&y) {
                    fresh = Some(format!("k={k}, s={x}, u={u}, nu={y}"));
                    break 'outer;
                }
            }
        }
    }
    report.record("thm4_fresh_layer", fresh);

    let sizes = verdict.index.and_then(|l| {
        (0..=l)
            .find(|&i| chain.sets[i].order() != (p as usize).pow(i as u32))
            .map(|i| format!("|S_{i}| = {}", chain.sets[i].order()))
    });
    report.record("thm4_controllable_sizes", sizes);

    let mut l51 = None;
    let mut l52 = None;
    for (i, si) in chain.sets.iter().enumerate() {
        let meet = past.intersection(si);
        if l51.is_none() && !meet.is_trivial() && !past.is_subset_of(si) {
            l51 = Some(format!("i={i}"));
        }
        if l52.is_none() && past.is_subset_of(si) {
            'find: for x in past.elements() {
                for u in enc.u().elements() {
                    let y = enc.next_state(&u, x);
                    if !si.contains(&y) {
                        l52 = Some(format!("i={i}, s={x}, u={u}, nu={y}"));
                        break 'find;
                    }
                }
            }
        }
    }
    report.record("lemma5_1", l51);
    report.record("lemma5_2", l52);

    let lemma6_hyp = chain
        .sets
        .iter()
        .position(|si| si.order() != s.order() && !past.intersection(si).is_trivial());
    report.record(
        "lemma6",
        lemma6_hyp
            .filter(|_| verdict.controllable)
            .map(|i| format!("S_{i} meets the past kernel but the code is controllable")),
    );

    let mut thm5 = None;
    for i in 2..=chain.stabilized_at {
        if is_cyclic_subgroup(chain.get(i)) && !is_cyclic_subgroup(chain.get(i + 1)) {
            thm5 = Some(format!("S_{i} cyclic, S_{} not", i + 1));
            break;
        }
    }
    report.record("thm5", thm5);

    let cyclic_beyond_zp = s.is_cyclic() && !s.is_trivial() && s.moduli() != [p];
    report.record(
        "thm6",
        (cyclic_beyond_zp && verdict.controllable)
            .then(|| format!("S = {s} is cyclic and the code is controllable")),
    );
    report.record(
        "thm7",
        (verdict.controllable && !s.is_elementary(p)).then(|| format!("controllable with S = {s}")),
    );

    let forward_size = chain.get(1).order();
    report.observations.insert(
        "past_kernel_order_p".into(),
        past.order() == p as usize && forward_size == p as usize,
    );
    report
        .observations
        .insert("input_blind".into(), forward_size == 1 && past_trivial);
    report
        .observations
        .insert("index_below_two".into(), verdict.index_below_two);
    Ok(report)
}

/// Like [`evaluate_predicates`], but the first failed predicate is an error.
pub fn check_predicates(enc: &Encoder) -> Result<PredicateReport> {
    let report = evaluate_predicates(enc)?;
    if let Some((lemma, counterexample)) = report.violations().next() {
        return Err(Error::PredicateViolation {
            lemma: lemma.clone(),
            counterexample: counterexample.clone(),
        });
    }
    Ok(report)
}

/// The combined verdict/report document, keys sorted.
pub fn analysis_json(
    enc: &Encoder,
    verdict: &ControlVerdict,
    report: &PredicateReport,
) -> Result<Value> {
    let chain: Vec<Vec<String>> = verdict
        .chain
        .sets
        .iter()
        .map(|h| h.elements().iter().map(|x| x.to_string()).collect())
        .collect();
    let past: Vec<String> = past_kernel(enc)?
        .elements()
        .iter()
        .map(|x| x.to_string())
        .collect();
    Ok(json!({
        "controllable": verdict.controllable,
        "index": verdict.index,
        "chain": chain,
        "past_kernel": past,
        "predicates": report.predicates,
        "counterexamples": report.counterexamples,
        "observations": report.observations,
    }))
}
