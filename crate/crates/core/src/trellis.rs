//! State diagram, trellis paths, codeword membership and DOT export.

use std::fmt::Write as _;

use serde::Serialize;

use crate::encoder::{Encoder, Sequence};
use crate::group::GroupElement;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Branch {
    pub from: GroupElement,
    pub label: GroupElement,
    pub to: GroupElement,
    pub input: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrellisPath {
    pub start_time: i64,
    pub branches: Vec<Branch>,
}

impl TrellisPath {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn is_concatenated(&self) -> bool {
        self.branches.windows(2).all(|w| w[0].to == w[1].from)
    }

    pub fn inputs(&self) -> Vec<GroupElement> {
        self.branches.iter().map(|b| b.input.clone()).collect()
    }

    pub fn labels(&self) -> Vec<GroupElement> {
        self.branches.iter().map(|b| b.label.clone()).collect()
    }
}

fn branch(enc: &Encoder, ui: usize, si: usize) -> Branch {
    Branch {
        from: enc.s().element(si),
        label: enc.y().element(enc.output_index(ui, si)),
        to: enc.s().element(enc.next_index(ui, si)),
        input: enc.u().element(ui),
    }
}

/// All `|U|·|S|` branches, state-major.
pub fn branches(enc: &Encoder) -> Vec<Branch> {
    (0..enc.s().order())
        .flat_map(|si| (0..enc.u().order()).map(move |ui| branch(enc, ui, si)))
        .collect()
}

fn path_from_word(enc: &Encoder, start: usize, word: &[usize]) -> TrellisPath {
    let mut s = start;
    let mut branches = Vec::with_capacity(word.len());
    for &ui in word {
        branches.push(branch(enc, ui, s));
        s = enc.next_index(ui, s);
    }
    TrellisPath {
        start_time: 0,
        branches,
    }
}

/// Shortest path from `s` to `r` of length at most `max_len`, lexicographically
/// least inputs among the shortest. `s` reaches itself with the empty path.
pub fn connected(
    enc: &Encoder,
    s: &GroupElement,
    r: &GroupElement,
    max_len: usize,
) -> Option<TrellisPath> {
    let (si, ri) = (enc.s().index_of(s), enc.s().index_of(r));
    let word = enc.shortest_word(si, ri, max_len)?;
    Some(path_from_word(enc, si, &word))
}

/// Lexicographically least path from `s` to `r` of exactly `len` steps.
pub fn connect_exact(
    enc: &Encoder,
    s: &GroupElement,
    r: &GroupElement,
    len: usize,
) -> Option<TrellisPath> {
    let n = enc.s().order();
    let (si, ri) = (enc.s().index_of(s), enc.s().index_of(r));
    // can[t][x]: x reaches r in exactly t steps
    let mut can = vec![vec![false; n]; len + 1];
    can[0][ri] = true;
    for t in 1..=len {
        for x in 0..n {
            can[t][x] = (0..enc.u().order()).any(|ui| can[t - 1][enc.next_index(ui, x)]);
        }
    }
    if !can[len][si] {
        return None;
    }
    let mut word = Vec::with_capacity(len);
    let mut x = si;
    for t in (1..=len).rev() {
        let ui = (0..enc.u().order())
            .find(|&ui| can[t - 1][enc.next_index(ui, x)])
            .unwrap();
        word.push(ui);
        x = enc.next_index(ui, x);
    }
    Some(path_from_word(enc, si, &word))
}

/// `y1` strictly before `j`, `y2` from `j` on.
pub fn concatenate(y1: &Sequence, y2: &Sequence, j: i64) -> Sequence {
    let start = y1.offset().min(y2.offset()).min(j);
    let end = y1.end().max(y2.end()).max(j);
    let symbols = (start..end)
        .map(|i| if i < j { y1.get(i) } else { y2.get(i) }.clone())
        .collect();
    Sequence::new(y1.identity().clone(), start, symbols)
}

/// Input and state sequences generating a codeword. `states[0]` is the state
/// at time `offset - 1`, `states[i + 1]` the state after `inputs[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodewordWitness {
    pub offset: i64,
    pub inputs: Vec<GroupElement>,
    pub states: Vec<GroupElement>,
}

// Greatest fixpoints over zero-output branches: states with an infinite
// zero-output past (left) or future (right).
fn silent_tails(enc: &Encoder) -> (Vec<bool>, Vec<bool>) {
    let n = enc.s().order();
    let ey = 0;
    let silent: Vec<(usize, usize)> = (0..n)
        .flat_map(|si| (0..enc.u().order()).map(move |ui| (ui, si)))
        .filter(|&(ui, si)| enc.output_index(ui, si) == ey)
        .map(|(ui, si)| (si, enc.next_index(ui, si)))
        .collect();
    let mut left = vec![true; n];
    let mut right = vec![true; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            if left[x] && !silent.iter().any(|&(a, b)| b == x && left[a]) {
                left[x] = false;
                changed = true;
            }
            if right[x] && !silent.iter().any(|&(a, b)| a == x && right[b]) {
                right[x] = false;
                changed = true;
            }
        }
        if !changed {
            return (left, right);
        }
    }
}

/// Decides whether `seq` is generated by `enc`, returning the
/// lexicographically least state path on the window when it is.
pub fn is_codeword(enc: &Encoder, seq: &Sequence) -> Option<CodewordWitness> {
    let seq = seq.trimmed();
    if seq.symbols().iter().any(|y| !enc.y().contains(y)) {
        return None;
    }
    let n = enc.s().order();
    let (left, right) = silent_tails(enc);
    let labels: Vec<usize> = seq.symbols().iter().map(|y| enc.y().index_of(y)).collect();

    let mut layers = vec![left];
    for &y in &labels {
        let prev = layers.last().unwrap();
        let mut next = vec![false; n];
        for si in (0..n).filter(|&si| prev[si]) {
            for ui in 0..enc.u().order() {
                if enc.output_index(ui, si) == y {
                    next[enc.next_index(ui, si)] = true;
                }
            }
        }
        layers.push(next);
    }
    let last = (0..n).find(|&x| layers[labels.len()][x] && right[x])?;

    let mut states = vec![last];
    let mut inputs = Vec::with_capacity(labels.len());
    for t in (0..labels.len()).rev() {
        let x = *states.last().unwrap();
        let (ui, si) = (0..n)
            .filter(|&si| layers[t][si])
            .flat_map(|si| (0..enc.u().order()).map(move |ui| (ui, si)))
            .find(|&(ui, si)| enc.output_index(ui, si) == labels[t] && enc.next_index(ui, si) == x)
            .unwrap();
        inputs.push(ui);
        states.push(si);
    }
    states.reverse();
    inputs.reverse();
    Some(CodewordWitness {
        offset: seq.offset(),
        inputs: inputs.into_iter().map(|u| enc.u().element(u)).collect(),
        states: states.into_iter().map(|s| enc.s().element(s)).collect(),
    })
}

/// Graphviz rendering: the state diagram for `sections = 0`, otherwise the
/// trellis unrolled over `sections` time steps.
pub fn export_dot(enc: &Encoder, sections: usize) -> String {
    let n = enc.s().order();
    let mut out = String::from("digraph trellis {\n  rankdir=LR;\n  node [shape=circle];\n");
    for t in 0..=sections {
        for si in 0..n {
            let _ = writeln!(
                out,
                "  \"t{t}_s{si}\" [label=\"{}\"];",
                enc.s().element(si).compact()
            );
        }
    }
    for t in 0..sections.max(1) {
        let t_next = if sections == 0 { 0 } else { t + 1 };
        for si in 0..n {
            for ui in 0..enc.u().order() {
                let _ = writeln!(
                    out,
                    "  \"t{t}_s{si}\" -> \"t{t_next}_s{}\" [label=\"{}/{}\"];",
                    enc.next_index(ui, si),
                    enc.u().element(ui).compact(),
                    enc.y().element(enc.output_index(ui, si)).compact()
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;

    fn grp(fs: &[u32]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(fs).unwrap()
    }

    fn el(cs: &[u32]) -> GroupElement {
        GroupElement::new(cs.to_vec())
    }

    fn els(s: &str) -> Vec<GroupElement> {
        s.split(',')
            .map(|t| GroupElement(t.bytes().map(|b| (b - b'0') as u32).collect()))
            .collect()
    }

    fn shift_register() -> Encoder {
        Encoder::new(
            &grp(&[2]),
            &grp(&[2, 2]),
            &grp(&[2, 2]),
            els("01,01,10"),
            els("10,00,01"),
        )
        .unwrap()
    }

    #[test]
    fn branch_list() {
        let enc = shift_register();
        let bs = branches(&enc);
        assert_eq!(bs.len(), 8);
        assert_eq!(
            bs[0],
            Branch {
                from: el(&[0, 0]),
                label: el(&[0, 0]),
                to: el(&[0, 0]),
                input: el(&[0])
            }
        );
        assert_eq!(
            bs[1],
            Branch {
                from: el(&[0, 0]),
                label: el(&[1, 0]),
                to: el(&[0, 1]),
                input: el(&[1])
            }
        );
        let distinct: std::collections::HashSet<_> =
            bs.iter().map(|b| (&b.from, &b.label, &b.to)).collect();
        assert_eq!(distinct.len(), 8);
    }

    #[test]
    fn connectivity() {
        let enc = shift_register();
        let p = connected(&enc, &el(&[0, 0]), &el(&[1, 1]), 4).unwrap();
        assert_eq!(p.inputs(), els("1,1"));
        assert!(p.is_concatenated());
        assert_eq!(p.branches[0].to, el(&[0, 1]));
        assert!(connected(&enc, &el(&[0, 0]), &el(&[1, 1]), 1).is_none());
        assert!(connected(&enc, &el(&[1, 0]), &el(&[1, 0]), 1)
            .unwrap()
            .is_empty());
        let p = connect_exact(&enc, &el(&[1, 0]), &el(&[1, 0]), 2).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.branches[1].to, el(&[1, 0]));
        assert!(connect_exact(&enc, &el(&[0, 0]), &el(&[1, 1]), 1).is_none());
    }

    #[test]
    fn codeword_membership() {
        let enc = shift_register();
        let e = el(&[0, 0]);
        let w = is_codeword(&enc, &Sequence::zero(e.clone())).unwrap();
        assert_eq!(w.states, vec![e.clone()]);

        let inputs = els("0,1,1,1,0,1,0,1,1");
        let (states, outputs) = enc.encode_forward(&e, &inputs).unwrap();
        let y = Sequence::new(e.clone(), 1, outputs.clone());
        let w = is_codeword(&enc, &y).unwrap();
        // the window is trimmed to the support, which starts at index 2
        assert_eq!(w.offset, 2);
        assert_eq!(w.states[1..], states[1..]);

        // unpadded run ends in 11, which has no silent future
        let y = Sequence::new(e.clone(), 1, outputs[..7].to_vec());
        assert!(is_codeword(&enc, &y).is_none());
        let y = Sequence::new(e.clone(), 0, els("01"));
        assert!(is_codeword(&enc, &y).is_none());
    }

    #[test]
    fn splicing_identical_words() {
        let e = el(&[0, 0]);
        let y = Sequence::new(e.clone(), 0, els("10,11,01"));
        assert_eq!(concatenate(&y, &y, 1), y);
        let z = Sequence::zero(e.clone());
        assert_eq!(concatenate(&z, &z, 0), z);
        assert_eq!(concatenate(&z, &y, 1), Sequence::new(e, 1, els("11,01")));
    }

    #[test]
    fn dot_export_shape() {
        let enc = shift_register();
        let dot = export_dot(&enc, 0);
        assert_eq!(dot.matches(" -> ").count(), 8);
        assert_eq!(dot.matches("[label=\"").count(), 12);
        assert!(dot.contains("\"t0_s0\" -> \"t0_s1\" [label=\"1/10\"];"));
        let dot = export_dot(&enc, 3);
        assert_eq!(dot.matches(" -> ").count(), 24);
        assert_eq!(dot.matches("[label=\"").count(), 16 + 24);
        assert_eq!(dot, export_dot(&enc, 3));
    }
}
