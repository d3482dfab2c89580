//! Exhaustive enumeration of extensions `Z_p ⊠ S`, of the encoders over
//! them, and a sweep that checks every structural predicate on each one.

use std::fmt::Write as _;
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::control::{decide_controllability, evaluate_predicates};
use crate::encoder::{Encoder, Pairing};
use crate::error::{Error, Result};
use crate::extension::ExtensionDecomposition;
use crate::group::{
    abelian_groups_of_order, homs_iter, is_prime, FiniteAbelianGroup, GroupElement, GroupHom,
    Subgroup,
};

/// Largest `p · max |S|` an exhaustive sweep accepts.
pub const SWEEP_BOUND: usize = 256;

#[derive(Clone, Debug)]
pub struct ExtensionInstance {
    pub p: u32,
    pub s: FiniteAbelianGroup,
    pub g: FiniteAbelianGroup,
    pub n: Subgroup,
    pub decomposition: ExtensionDecomposition,
    pub pairing: Arc<Pairing>,
}

/// Every subgroup of prime order `p`, in order of their least generator.
pub fn order_p_subgroups(g: &FiniteAbelianGroup, p: u32) -> Vec<Subgroup> {
    let mut found: Vec<Subgroup> = Vec::new();
    for x in g.elements().filter(|x| g.element_order(x) == p) {
        let h = Subgroup::generated(g, &[x]).expect("element of g");
        if !found.contains(&h) {
            found.push(h);
        }
    }
    found
}

fn instances(p: u32, s: &FiniteAbelianGroup, dedup: bool) -> Result<Vec<ExtensionInstance>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut out = Vec::new();
    for g in abelian_groups_of_order(p as usize * s.order()) {
        let mut heights = Vec::new();
        for n in order_p_subgroups(&g, p) {
            if dedup {
                let h = n.height(p);
                if heights.contains(&h) {
                    continue;
                }
                heights.push(h);
            }
            let dec = ExtensionDecomposition::decompose(&g, &n)?;
            if !dec.s().is_isomorphic(s) {
                continue;
            }
            let pairing = Arc::new(Pairing::from_extension(&dec));
            out.push(ExtensionInstance {
                p,
                s: dec.s().clone(),
                g: g.clone(),
                n,
                decomposition: dec,
                pairing,
            });
        }
    }
    Ok(out)
}

/// One instance per ambient group `G` of order `p·|S|` and per
/// automorphism class of order-`p` subgroups `N` with `G/N ≅ S`.
pub fn enumerate_extensions(p: u32, s: &FiniteAbelianGroup) -> Result<Vec<ExtensionInstance>> {
    instances(p, s, true)
}

/// Like [`enumerate_extensions`] but keeps every subgroup `N`.
pub fn enumerate_extensions_all(p: u32, s: &FiniteAbelianGroup) -> Result<Vec<ExtensionInstance>> {
    instances(p, s, false)
}

/// Encoders with `Y = G`, `ω = id` and every surjective `ν : G → S`, in
/// lexicographic order of the generator images of `ν`.
pub fn encoders_iter(inst: &ExtensionInstance) -> impl Iterator<Item = Encoder> + '_ {
    homs_iter(&inst.g, &inst.s, true).map(move |nu| {
        Encoder::from_homs(
            inst.pairing.clone(),
            &inst.g,
            nu,
            GroupHom::identity_map(&inst.g),
        )
        .expect("surjective nu with identity output is a valid encoder")
    })
}

pub fn enumerate_encoders(inst: &ExtensionInstance) -> Vec<Encoder> {
    encoders_iter(inst).collect()
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub dedup: bool,
    pub jobs: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            dedup: true,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepParameters {
    pub p: Vec<u32>,
    pub max_s_order: usize,
    pub dedup: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub p: u32,
    #[serde(rename = "S")]
    pub s: Vec<u32>,
    pub instances: usize,
    pub encoders: usize,
    pub controllable: usize,
    pub min_index: Option<usize>,
    pub violations: usize,
    pub input_blind: usize,
    pub past_kernel_order_p: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tallies {
    pub instances: usize,
    pub encoders: usize,
    pub controllable: usize,
    pub violations: usize,
    pub oracle_mismatches: usize,
    /// Encoders with `S` cyclic, nontrivial and not `Z_p`.
    pub cyclic_beyond_zp: usize,
    pub cyclic_beyond_zp_controllable: usize,
    pub zp_state_encoders: usize,
    pub zp_state_controllable: usize,
    pub controllable_non_elementary: usize,
    pub input_blind: usize,
    pub past_kernel_order_p: usize,
    pub past_kernel_order_not_p: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EncoderRef {
    pub p: u32,
    #[serde(rename = "S")]
    pub s: Vec<u32>,
    #[serde(rename = "G")]
    pub g: Vec<u32>,
    #[serde(rename = "N")]
    pub n: Vec<GroupElement>,
    pub nu: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ControllableEntry {
    #[serde(flatten)]
    pub encoder: EncoderRef,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(flatten)]
    pub encoder: EncoderRef,
    pub predicate: String,
    pub counterexample: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub parameters: SweepParameters,
    pub rows: Vec<SweepRow>,
    pub tallies: Tallies,
    pub controllable: Vec<ControllableEntry>,
    pub violations: Vec<Violation>,
}

impl SweepReport {
    pub fn has_violations(&self) -> bool {
        !self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>3}  {:<12} {:>9} {:>13} {:>9} {:>10}",
            "p", "S", "encoders", "controllable", "min_index", "violations"
        );
        for r in &self.rows {
            let s = format!("[{}]", r.s.iter().join(","));
            let idx = r.min_index.map_or("-".to_string(), |i| i.to_string());
            let _ = writeln!(
                out,
                "{:>3}  {:<12} {:>9} {:>13} {:>9} {:>10}",
                r.p, s, r.encoders, r.controllable, idx, r.violations
            );
        }
        out
    }
}

#[derive(Default)]
struct InstanceOutcome {
    row: SweepRow,
    tallies: Tallies,
    controllable: Vec<ControllableEntry>,
    violations: Vec<Violation>,
}

fn encoder_ref(inst: &ExtensionInstance, enc: &Encoder) -> EncoderRef {
    EncoderRef {
        p: inst.p,
        s: inst.s.moduli().to_vec(),
        g: inst.g.moduli().to_vec(),
        n: inst.n.elements().to_vec(),
        nu: enc.nu().gen_images().to_vec(),
    }
}

fn sweep_instance(inst: &ExtensionInstance) -> Result<InstanceOutcome> {
    let p = inst.p;
    let s = &inst.s;
    let mut o = InstanceOutcome::default();
    o.row.instances = 1;
    let cyclic_beyond_zp = s.is_cyclic() && !s.is_trivial() && s.moduli() != [p];
    let zp_state = s.moduli() == [p];

    for enc in encoders_iter(inst) {
        let verdict = decide_controllability(&enc);
        let report = evaluate_predicates(&enc)?;
        o.row.encoders += 1;

        for (name, counterexample) in report.violations() {
            o.violations.push(Violation {
                encoder: encoder_ref(inst, &enc),
                predicate: name.clone(),
                counterexample: counterexample.clone(),
            });
        }
        if !verdict.oracle_agrees {
            o.tallies.oracle_mismatches += 1;
            o.violations.push(Violation {
                encoder: encoder_ref(inst, &enc),
                predicate: "reachability_oracle".into(),
                counterexample: format!(
                    "verdict {:?} disagrees with exact-step reachability",
                    verdict.index
                ),
            });
        }
        if report.observations["input_blind"] {
            o.row.input_blind += 1;
        }
        if report.observations["past_kernel_order_p"] {
            o.row.past_kernel_order_p += 1;
        } else {
            o.tallies.past_kernel_order_not_p += 1;
        }
        if cyclic_beyond_zp {
            o.tallies.cyclic_beyond_zp += 1;
        }
        if zp_state {
            o.tallies.zp_state_encoders += 1;
        }
        if let Some(index) = verdict.index {
            o.row.controllable += 1;
            o.row.min_index = Some(o.row.min_index.map_or(index, |m: usize| m.min(index)));
            if cyclic_beyond_zp {
                o.tallies.cyclic_beyond_zp_controllable += 1;
            }
            if zp_state {
                o.tallies.zp_state_controllable += 1;
            }
            if !s.is_elementary(p) {
                o.tallies.controllable_non_elementary += 1;
            }
            o.controllable.push(ControllableEntry {
                encoder: encoder_ref(inst, &enc),
                index,
            });
        }
    }
    o.row.violations = o.violations.len();
    Ok(o)
}

/// The state groups a sweep visits: every abelian `S` with `2 ≤ |S| ≤ max`.
pub fn state_groups(max_s_order: usize) -> Vec<FiniteAbelianGroup> {
    (2..=max_s_order)
        .flat_map(abelian_groups_of_order)
        .collect()
}

pub fn sweep_theorems(
    p_list: &[u32],
    max_s_order: usize,
    options: &SweepOptions,
) -> Result<SweepReport> {
    if let Some(&bad) = p_list.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(bad));
    }
    if let Some(&p) = p_list
        .iter()
        .find(|&&p| p as usize * max_s_order > SWEEP_BOUND)
    {
        return Err(Error::TooLarge {
            product: p as usize * max_s_order,
            bound: SWEEP_BOUND,
        });
    }

    let mut work = Vec::new();
    for &p in p_list.iter().sorted().dedup() {
        for s in state_groups(max_s_order) {
            let insts = if options.dedup {
                enumerate_extensions(p, &s)?
            } else {
                enumerate_extensions_all(p, &s)?
            };
            work.push((p, s, insts));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .expect("thread pool");
    let outcomes: Vec<Result<Vec<InstanceOutcome>>> = pool.install(|| {
        work.par_iter()
            .map(|(_, _, insts)| insts.par_iter().map(sweep_instance).collect())
            .collect()
    });

    let mut report = SweepReport {
        parameters: SweepParameters {
            p: p_list.iter().copied().sorted().dedup().collect(),
            max_s_order,
            dedup: options.dedup,
        },
        rows: Vec::new(),
        tallies: Tallies::default(),
        controllable: Vec::new(),
        violations: Vec::new(),
    };
    for ((p, s, _), outcome) in work.iter().zip(outcomes) {
        let mut row = SweepRow {
            p: *p,
            s: s.moduli().to_vec(),
            ..SweepRow::default()
        };
        for o in outcome? {
            row.instances += o.row.instances;
            row.encoders += o.row.encoders;
            row.controllable += o.row.controllable;
            row.violations += o.row.violations;
            row.input_blind += o.row.input_blind;
            row.past_kernel_order_p += o.row.past_kernel_order_p;
            row.min_index = match (row.min_index, o.row.min_index) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            let t = &mut report.tallies;
            t.oracle_mismatches += o.tallies.oracle_mismatches;
            t.cyclic_beyond_zp += o.tallies.cyclic_beyond_zp;
            t.cyclic_beyond_zp_controllable += o.tallies.cyclic_beyond_zp_controllable;
            t.zp_state_encoders += o.tallies.zp_state_encoders;
            t.zp_state_controllable += o.tallies.zp_state_controllable;
            t.controllable_non_elementary += o.tallies.controllable_non_elementary;
            t.past_kernel_order_not_p += o.tallies.past_kernel_order_not_p;
            report.controllable.extend(o.controllable);
            report.violations.extend(o.violations);
        }
        let t = &mut report.tallies;
        t.instances += row.instances;
        t.encoders += row.encoders;
        t.controllable += row.controllable;
        t.violations += row.violations;
        t.input_blind += row.input_blind;
        t.past_kernel_order_p += row.past_kernel_order_p;
        report.rows.push(row);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(fs: &[u32]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(fs).unwrap()
    }

    fn ambient(insts: &[ExtensionInstance]) -> Vec<Vec<u32>> {
        insts.iter().map(|i| i.g.moduli().to_vec()).collect()
    }

    #[test]
    fn extensions_of_small_groups() {
        let insts = enumerate_extensions(2, &grp(&[2])).unwrap();
        assert_eq!(ambient(&insts), vec![vec![2, 2], vec![4]]);
        let insts = enumerate_extensions(2, &grp(&[2, 2])).unwrap();
        assert_eq!(ambient(&insts), vec![vec![2, 2, 2], vec![2, 4]]);
        let insts = enumerate_extensions(3, &FiniteAbelianGroup::trivial()).unwrap();
        assert_eq!(ambient(&insts), vec![vec![3]]);
        assert_eq!(
            enumerate_extensions(4, &grp(&[2])).unwrap_err(),
            Error::NotPrime(4)
        );
    }

    #[test]
    fn encoder_counts() {
        let z8 = enumerate_extensions(2, &grp(&[4]))
            .unwrap()
            .into_iter()
            .find(|i| i.g == grp(&[8]))
            .unwrap();
        assert_eq!(enumerate_encoders(&z8).len(), 2);
        let cube = enumerate_extensions(2, &grp(&[2, 2]))
            .unwrap()
            .into_iter()
            .find(|i| i.g == grp(&[2, 2, 2]))
            .unwrap();
        assert_eq!(enumerate_encoders(&cube).len(), 42);
        let trivial = &enumerate_extensions(3, &FiniteAbelianGroup::trivial()).unwrap()[0];
        assert_eq!(enumerate_encoders(trivial).len(), 1);
    }

    #[test]
    fn guards() {
        let opts = SweepOptions::default();
        assert_eq!(
            sweep_theorems(&[4], 4, &opts).unwrap_err(),
            Error::NotPrime(4)
        );
        assert_eq!(
            sweep_theorems(&[2], 200, &opts).unwrap_err(),
            Error::TooLarge {
                product: 400,
                bound: 256
            }
        );
    }

    #[test]
    fn small_sweep() {
        let report = sweep_theorems(&[2], 4, &SweepOptions::default()).unwrap();
        assert!(!report.has_violations());
        let controllable: Vec<Vec<u32>> = report
            .rows
            .iter()
            .filter(|r| r.controllable > 0)
            .map(|r| r.s.clone())
            .collect();
        assert_eq!(controllable, vec![vec![2], vec![2, 2]]);
        assert!(report.summary_table().lines().count() == report.rows.len() + 1);
    }

    #[test]
    fn parallel_sweep_is_identical() {
        let a = sweep_theorems(
            &[2, 3],
            6,
            &SweepOptions {
                dedup: true,
                jobs: 1,
            },
        )
        .unwrap();
        let b = sweep_theorems(
            &[3, 2],
            6,
            &SweepOptions {
                dedup: true,
                jobs: 4,
            },
        )
        .unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
