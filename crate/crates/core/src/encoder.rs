//! Wide-sense homomorphic encoders `M = (U, S, Y, ν, ω)`.
//!
//! `ν` and `ω` are homomorphisms on the extension group `G`. Inputs and
//! states are addressed in pair coordinates through a [`Pairing`], which is
//! either the literal direct sum `U ⊕ S` (the spec-file format) or the pair
//! map of an [`ExtensionDecomposition`].

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::ExtensionDecomposition;
use crate::group::{FiniteAbelianGroup, GroupElement, GroupHom};

/// Bijection `U × S → G`, `(u, s) ↦ l(s) + υ⁻¹(u)`.
#[derive(Debug)]
pub struct Pairing {
    u: FiniteAbelianGroup,
    s: FiniteAbelianGroup,
    g: FiniteAbelianGroup,
    direct: bool,
    /// G index by `s_idx * |U| + u_idx`.
    to_g: Vec<u32>,
    /// `(u_idx, s_idx)` by G index.
    from_g: Vec<(u32, u32)>,
}

impl Pairing {
    /// `G = U ⊕ S` with the coordinates of `U` first.
    pub fn direct(u: &FiniteAbelianGroup, s: &FiniteAbelianGroup) -> Self {
        let g = u.direct_sum(s);
        Self::build(u, s, g, true, |ue, se| {
            let mut coords = ue.0.clone();
            coords.extend_from_slice(&se.0);
            GroupElement(coords)
        })
    }

    pub fn from_extension(dec: &ExtensionDecomposition) -> Self {
        Self::build(dec.u(), dec.s(), dec.g().clone(), false, |ue, se| {
            dec.from_pair(ue, se)
        })
    }

    fn build(
        u: &FiniteAbelianGroup,
        s: &FiniteAbelianGroup,
        g: FiniteAbelianGroup,
        direct: bool,
        pair: impl Fn(&GroupElement, &GroupElement) -> GroupElement,
    ) -> Self {
        let mut to_g = Vec::with_capacity(g.order());
        let mut from_g = vec![(u32::MAX, u32::MAX); g.order()];
        for (si, se) in s.elements().enumerate() {
            for (ui, ue) in u.elements().enumerate() {
                let gi = g.index_of(&pair(&ue, &se));
                debug_assert_eq!(from_g[gi].0, u32::MAX, "pair map is a bijection");
                from_g[gi] = (ui as u32, si as u32);
                to_g.push(gi as u32);
            }
        }
        Pairing {
            u: u.clone(),
            s: s.clone(),
            g,
            direct,
            to_g,
            from_g,
        }
    }

    pub fn u(&self) -> &FiniteAbelianGroup {
        &self.u
    }

    pub fn s(&self) -> &FiniteAbelianGroup {
        &self.s
    }

    pub fn g(&self) -> &FiniteAbelianGroup {
        &self.g
    }

    pub fn is_direct(&self) -> bool {
        self.direct
    }

    pub fn pair(&self, u: &GroupElement, s: &GroupElement) -> GroupElement {
        self.g
            .element(self.pair_index(self.u.index_of(u), self.s.index_of(s)))
    }

    pub fn pair_index(&self, u_idx: usize, s_idx: usize) -> usize {
        self.to_g[s_idx * self.u.order() + u_idx] as usize
    }

    pub fn split(&self, g: &GroupElement) -> (GroupElement, GroupElement) {
        let (ui, si) = self.from_g[self.g.index_of(g)];
        (self.u.element(ui as usize), self.s.element(si as usize))
    }
}

#[derive(Clone, Debug)]
pub struct Encoder {
    pairing: Arc<Pairing>,
    y: FiniteAbelianGroup,
    nu: GroupHom,
    omega: GroupHom,
    next: Vec<u32>,
    out: Vec<u32>,
}

impl Encoder {
    /// Builds and validates an encoder over `G = U ⊕ S` from the generator
    /// images of `ν` and `ω`.
    pub fn new(
        u: &FiniteAbelianGroup,
        s: &FiniteAbelianGroup,
        y: &FiniteAbelianGroup,
        nu_images: Vec<GroupElement>,
        omega_images: Vec<GroupElement>,
    ) -> Result<Self> {
        let pairing = Arc::new(Pairing::direct(u, s));
        let g = pairing.g().clone();
        let nu = GroupHom::new(&g, s, nu_images).map_err(|e| match e {
            Error::NotAHom { generator, .. } => Error::NuNotHom { generator },
            other => other,
        })?;
        let omega = GroupHom::new(&g, y, omega_images).map_err(|e| match e {
            Error::NotAHom { generator, .. } => Error::OmegaNotHom { generator },
            other => other,
        })?;
        Self::from_homs(pairing, y, nu, omega)
    }

    pub fn from_homs(
        pairing: Arc<Pairing>,
        y: &FiniteAbelianGroup,
        nu: GroupHom,
        omega: GroupHom,
    ) -> Result<Self> {
        let g = pairing.g();
        if nu.source() != g || nu.target() != pairing.s() {
            return Err(Error::Spec(format!("nu must map {} to {}", g, pairing.s())));
        }
        if omega.source() != g || omega.target() != y {
            return Err(Error::Spec(format!("omega must map {} to {}", g, y)));
        }
        let image = nu.image();
        if let Some(missing) = pairing.s().elements().find(|x| !image.contains(x)) {
            return Err(Error::NuNotSurjective { missing });
        }
        let es = pairing.s().identity();
        for u in pairing.u().elements().skip(1) {
            let x = pairing.pair(&u, &es);
            if nu.apply(&x) == es && omega.apply(&x) == y.identity() {
                return Err(Error::PsiNotInjective { witness: u });
            }
        }

        let nu_table = nu.table();
        let omega_table = omega.table();
        let (nu_order, s_order) = (pairing.u().order(), pairing.s().order());
        let mut next = Vec::with_capacity(nu_order * s_order);
        let mut out = Vec::with_capacity(nu_order * s_order);
        for si in 0..s_order {
            for ui in 0..nu_order {
                let gi = pairing.pair_index(ui, si);
                next.push(nu_table[gi]);
                out.push(omega_table[gi]);
            }
        }
        Ok(Encoder {
            pairing,
            y: y.clone(),
            nu,
            omega,
            next,
            out,
        })
    }

    pub fn from_spec(spec: &EncoderSpec) -> Result<Self> {
        Self::new(
            &spec.u,
            &spec.s,
            &spec.y,
            spec.nu.gen_images.clone(),
            spec.omega.gen_images.clone(),
        )
    }

    /// The spec-file form. Only encoders over the literal direct sum have one.
    pub fn to_spec(&self) -> Option<EncoderSpec> {
        self.pairing.is_direct().then(|| EncoderSpec {
            u: self.u().clone(),
            s: self.s().clone(),
            y: self.y.clone(),
            nu: HomSpec {
                gen_images: self.nu.gen_images().to_vec(),
            },
            omega: HomSpec {
                gen_images: self.omega.gen_images().to_vec(),
            },
        })
    }

    pub fn pairing(&self) -> &Arc<Pairing> {
        &self.pairing
    }

    pub fn u(&self) -> &FiniteAbelianGroup {
        self.pairing.u()
    }

    pub fn s(&self) -> &FiniteAbelianGroup {
        self.pairing.s()
    }

    pub fn y(&self) -> &FiniteAbelianGroup {
        &self.y
    }

    pub fn g(&self) -> &FiniteAbelianGroup {
        self.pairing.g()
    }

    pub fn nu(&self) -> &GroupHom {
        &self.nu
    }

    pub fn omega(&self) -> &GroupHom {
        &self.omega
    }

    /// ν(u, s) by indices.
    pub fn next_index(&self, u_idx: usize, s_idx: usize) -> usize {
        self.next[s_idx * self.u().order() + u_idx] as usize
    }

    /// ω(u, s) by indices.
    pub fn output_index(&self, u_idx: usize, s_idx: usize) -> usize {
        self.out[s_idx * self.u().order() + u_idx] as usize
    }

    pub fn next_state(&self, u: &GroupElement, s: &GroupElement) -> GroupElement {
        self.s()
            .element(self.next_index(self.u().index_of(u), self.s().index_of(s)))
    }

    pub fn output(&self, u: &GroupElement, s: &GroupElement) -> GroupElement {
        self.y
            .element(self.output_index(self.u().index_of(u), self.s().index_of(s)))
    }

    /// Ψ(u, s) = (s, ω(u, s), ν(u, s)) by indices.
    pub fn psi_index(&self, u_idx: usize, s_idx: usize) -> (usize, usize, usize) {
        (
            s_idx,
            self.output_index(u_idx, s_idx),
            self.next_index(u_idx, s_idx),
        )
    }

    /// Injectivity of Ψ over the whole table.
    pub fn psi_injective_brute_force(&self) -> bool {
        let mut seen = HashSet::new();
        (0..self.s().order())
            .all(|si| (0..self.u().order()).all(|ui| seen.insert(self.psi_index(ui, si))))
    }

    /// `states[i] = ν(inputs[i], states[i-1])`, `outputs[i] = ω(inputs[i], states[i-1])`
    /// with `states[-1] = s0`.
    pub fn encode_forward(
        &self,
        s0: &GroupElement,
        inputs: &[GroupElement],
    ) -> Result<(Vec<GroupElement>, Vec<GroupElement>)> {
        self.s().check(s0)?;
        let mut s = self.s().index_of(s0);
        let mut states = Vec::with_capacity(inputs.len());
        let mut outputs = Vec::with_capacity(inputs.len());
        for u in inputs {
            self.u().check(u)?;
            let ui = self.u().index_of(u);
            outputs.push(self.y.element(self.output_index(ui, s)));
            s = self.next_index(ui, s);
            states.push(self.s().element(s));
        }
        Ok((states, outputs))
    }

    /// Every `(u, s)` with `ν(u, s) = target`, in lexicographic pair order.
    pub fn preimages(&self, target: &GroupElement) -> Vec<(GroupElement, GroupElement)> {
        let t = self.s().index_of(target);
        let mut found = Vec::new();
        for ui in 0..self.u().order() {
            for si in 0..self.s().order() {
                if self.next_index(ui, si) == t {
                    found.push((self.u().element(ui), self.s().element(si)));
                }
            }
        }
        found
    }

    /// Runs the recurrence backwards from `s0` for `depth` steps, always
    /// taking the lexicographically minimal preimage pair.
    pub fn extend_past(&self, s0: &GroupElement, depth: usize) -> Result<Past> {
        self.s().check(s0)?;
        let mut past = Past::default();
        let mut t = self.s().index_of(s0);
        for _ in 0..depth {
            let (ui, si) = (0..self.u().order())
                .flat_map(|ui| (0..self.s().order()).map(move |si| (ui, si)))
                .find(|&(ui, si)| self.next_index(ui, si) == t)
                .expect("nu is surjective");
            past.inputs.push(self.u().element(ui));
            past.outputs.push(self.y.element(self.output_index(ui, si)));
            past.states.push(self.s().element(si));
            t = si;
        }
        Ok(past)
    }

    /// Number of steps from each state to `target` (u32::MAX if never).
    pub(crate) fn distances_to(&self, target: usize) -> Vec<u32> {
        let n = self.s().order();
        let mut preds = vec![Vec::new(); n];
        for si in 0..n {
            for ui in 0..self.u().order() {
                preds[self.next_index(ui, si)].push(si);
            }
        }
        let mut dist = vec![u32::MAX; n];
        dist[target] = 0;
        let mut queue = VecDeque::from([target]);
        while let Some(x) = queue.pop_front() {
            for &p in &preds[x] {
                if dist[p] == u32::MAX {
                    dist[p] = dist[x] + 1;
                    queue.push_back(p);
                }
            }
        }
        dist
    }

    /// Lexicographically least shortest input word from `from` to `target`.
    pub(crate) fn shortest_word(
        &self,
        from: usize,
        target: usize,
        max_len: usize,
    ) -> Option<Vec<usize>> {
        let dist = self.distances_to(target);
        if dist[from] as usize > max_len || dist[from] == u32::MAX {
            return None;
        }
        let mut word = Vec::with_capacity(dist[from] as usize);
        let mut s = from;
        while dist[s] > 0 {
            let ui = (0..self.u().order())
                .find(|&ui| dist[self.next_index(ui, s)] == dist[s] - 1)
                .expect("a step along a shortest path");
            word.push(ui);
            s = self.next_index(ui, s);
        }
        Some(word)
    }

    /// Shortest input list driving `s` to the identity state, or `None` if
    /// none has length at most `max_len`.
    pub fn zero_tail(&self, s: &GroupElement, max_len: usize) -> Result<Option<Vec<GroupElement>>> {
        self.s().check(s)?;
        let word = self.shortest_word(self.s().index_of(s), 0, max_len);
        Ok(word.map(|w| w.into_iter().map(|ui| self.u().element(ui)).collect()))
    }
}

/// `s₋₁, s₋₂, …` with the inputs `u₀, u₋₁, …` and outputs `y₀, y₋₁, …`
/// that produced them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Past {
    pub states: Vec<GroupElement>,
    pub inputs: Vec<GroupElement>,
    pub outputs: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSpec {
    pub gen_images: Vec<GroupElement>,
}

/// On-disk encoder description. Generators of `G` are the unit vectors of
/// `U ⊕ S`, `U` coordinates first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderSpec {
    #[serde(rename = "U")]
    pub u: FiniteAbelianGroup,
    #[serde(rename = "S")]
    pub s: FiniteAbelianGroup,
    #[serde(rename = "Y")]
    pub y: FiniteAbelianGroup,
    pub nu: HomSpec,
    pub omega: HomSpec,
}

impl EncoderSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

/// A bi-infinite sequence that is the identity outside a finite window
/// starting at `offset`.
#[derive(Clone, Debug)]
pub struct Sequence {
    identity: GroupElement,
    offset: i64,
    symbols: Vec<GroupElement>,
}

impl Sequence {
    pub fn new(identity: GroupElement, offset: i64, symbols: Vec<GroupElement>) -> Self {
        Sequence {
            identity,
            offset,
            symbols,
        }
    }

    pub fn zero(identity: GroupElement) -> Self {
        Self::new(identity, 0, Vec::new())
    }

    pub fn identity(&self) -> &GroupElement {
        &self.identity
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn symbols(&self) -> &[GroupElement] {
        &self.symbols
    }

    /// First index past the stored window.
    pub fn end(&self) -> i64 {
        self.offset + self.symbols.len() as i64
    }

    pub fn get(&self, i: i64) -> &GroupElement {
        if i < self.offset || i >= self.end() {
            return &self.identity;
        }
        &self.symbols[(i - self.offset) as usize]
    }

    /// Smallest window `[start, end)` outside which every symbol is the
    /// identity; `None` for the all-identity sequence.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.symbols.iter().position(|x| *x != self.identity)?;
        let last = self
            .symbols
            .iter()
            .rposition(|x| *x != self.identity)
            .unwrap();
        Some((self.offset + first as i64, self.offset + last as i64 + 1))
    }

    pub fn trimmed(&self) -> Sequence {
        match self.support() {
            None => Sequence::zero(self.identity.clone()),
            Some((a, b)) => {
                let symbols = (a..b).map(|i| self.get(i).clone()).collect();
                Sequence::new(self.identity.clone(), a, symbols)
            }
        }
    }

    /// The window `[start, end)` as an explicit sequence.
    pub fn window(&self, start: i64, end: i64) -> Sequence {
        let symbols = (start..end).map(|i| self.get(i).clone()).collect();
        Sequence::new(self.identity.clone(), start, symbols)
    }

    /// Shift by `k`: the symbol at `i` moves to `i + k`.
    pub fn shifted(&self, k: i64) -> Sequence {
        Sequence::new(self.identity.clone(), self.offset + k, self.symbols.clone())
    }
}

impl PartialEq for Sequence {
    fn eq(&self, other: &Self) -> bool {
        if self.identity != other.identity {
            return false;
        }
        let (a, b) = (self.trimmed(), other.trimmed());
        a.symbols == b.symbols && (a.symbols.is_empty() || a.offset == b.offset)
    }
}

impl Eq for Sequence {}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.trimmed();
        write!(f, "@{}[", t.offset)?;
        for (i, x) in t.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", x.compact())?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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
        // ν(u,s1,s2) = (s2, u+s1), ω(u,s1,s2) = (u, s2)
        let z2 = grp(&[2]);
        let z22 = grp(&[2, 2]);
        Encoder::new(&z2, &z22, &z22, els("01,01,10"), els("10,00,01")).unwrap()
    }

    #[test]
    fn shift_register_runs() {
        let enc = shift_register();
        let (states, outputs) = enc
            .encode_forward(&el(&[0, 0]), &els("0,1,1,1,0,1,0"))
            .unwrap();
        assert_eq!(states, els("00,01,11,10,01,11,11"));
        assert_eq!(outputs, els("00,10,11,11,00,11,01"));
        assert_eq!(enc.zero_tail(&el(&[1, 1]), 8).unwrap(), Some(els("1,1")));
        assert_eq!(enc.zero_tail(&el(&[0, 0]), 1).unwrap(), Some(vec![]));
        assert_eq!(enc.zero_tail(&el(&[1, 1]), 1).unwrap(), None);
    }

    #[test]
    fn identity_inputs_stay_at_identity() {
        let enc = shift_register();
        let (states, outputs) = enc.encode_forward(&el(&[0, 0]), &els("0,0,0")).unwrap();
        assert!(states.iter().chain(&outputs).all(|x| *x == el(&[0, 0])));
    }

    #[test]
    fn past_extension() {
        let enc = shift_register();
        let pre = enc.preimages(&el(&[0, 1]));
        assert_eq!(pre.len(), 2);
        assert_eq!(pre, vec![(el(&[0]), el(&[1, 0])), (el(&[1]), el(&[0, 0]))]);
        let past = enc.extend_past(&el(&[0, 1]), 1).unwrap();
        assert_eq!(past.states, vec![el(&[1, 0])]);
        assert_eq!(past.inputs, vec![el(&[0])]);
        let past = enc.extend_past(&el(&[0, 0]), 4).unwrap();
        assert!(past.states.iter().all(|s| *s == el(&[0, 0])));
        for s in enc.s().elements() {
            let past = enc.extend_past(&s, 5).unwrap();
            let mut t = s.clone();
            for (u, prev) in past.inputs.iter().zip(&past.states) {
                assert_eq!(enc.next_state(u, prev), t);
                t = prev.clone();
            }
        }
    }

    #[test]
    fn validation_errors() {
        let z2 = grp(&[2]);
        let z22 = grp(&[2, 2]);
        // ν(u,s1,s2) = (s2, s1) ignores u and ω forgets it too
        let err = Encoder::new(&z2, &z22, &z22, els("00,01,10"), els("00,00,00")).unwrap_err();
        assert_eq!(err, Error::PsiNotInjective { witness: el(&[1]) });
        // ν(u,s1,s2) = (0, s2) misses 10
        let err = Encoder::new(&z2, &z22, &z22, els("00,00,01"), els("10,00,01")).unwrap_err();
        assert_eq!(
            err,
            Error::NuNotSurjective {
                missing: el(&[1, 0])
            }
        );
        let z4 = grp(&[4]);
        let err = Encoder::new(
            &z2,
            &z4,
            &z4,
            vec![el(&[1]), el(&[1])],
            vec![el(&[2]), el(&[1])],
        )
        .unwrap_err();
        assert_eq!(err, Error::NuNotHom { generator: 0 });
        let err = Encoder::new(
            &z2,
            &z4,
            &z4,
            vec![el(&[2]), el(&[1])],
            vec![el(&[1]), el(&[1])],
        )
        .unwrap_err();
        assert_eq!(err, Error::OmegaNotHom { generator: 0 });
    }

    #[test]
    fn spec_round_trip() {
        let enc = shift_register();
        let spec = enc.to_spec().unwrap();
        let text = spec.to_json();
        assert_eq!(
            text,
            r#"{"U":{"factors":[2]},"S":{"factors":[2,2]},"Y":{"factors":[2,2]},"nu":{"gen_images":[[0,1],[0,1],[1,0]]},"omega":{"gen_images":[[1,0],[0,0],[0,1]]}}"#
        );
        assert_eq!(EncoderSpec::from_json(&text).unwrap(), spec);
        assert!(matches!(EncoderSpec::from_json("{"), Err(Error::Spec(_))));
        assert!(matches!(
            EncoderSpec::from_json(r#"{"U":{"factors":[1]}}"#),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn nonsplit_extension_encoder() {
        let z8 = grp(&[8]);
        let n = crate::group::Subgroup::generated(&z8, &[el(&[4])]).unwrap();
        let dec = ExtensionDecomposition::decompose(&z8, &n).unwrap();
        let pairing = Arc::new(Pairing::from_extension(&dec));
        let nu = dec.projection().clone();
        let enc = Encoder::from_homs(pairing, &z8, nu, GroupHom::identity_map(&z8)).unwrap();
        assert!(enc.to_spec().is_none());
        for s in enc.s().elements() {
            for u in enc.u().elements() {
                assert_eq!(enc.next_state(&u, &s), s);
            }
        }
        assert_eq!(enc.zero_tail(&el(&[1]), 100).unwrap(), None);
    }

    #[test]
    fn sequences_compare_modulo_identity_padding() {
        let e = el(&[0, 0]);
        let a = Sequence::new(e.clone(), 0, els("00,11,01,00"));
        let b = Sequence::new(e.clone(), 1, els("11,01"));
        assert_eq!(a, b);
        assert_eq!(a.support(), Some((1, 3)));
        assert_ne!(a, b.shifted(1));
        assert_eq!(
            Sequence::zero(e.clone()),
            Sequence::new(e.clone(), 7, els("00,00"))
        );
        assert_eq!(a.get(-5), &e);
        assert_eq!(b.to_string(), "@1[11 01]");
    }
}
