//! Finite abelian groups in mixed-radix coordinates.
//!
//! A group is a list of cyclic moduli `Z_{m_1} ⊕ … ⊕ Z_{m_k}` and an element
//! is a residue vector, one coordinate per modulus. Groups built with
//! [`FiniteAbelianGroup::new`] are always in invariant-factor form
//! `d_1 | d_2 | … | d_k`; [`FiniteAbelianGroup::direct_sum`] keeps the
//! concatenated moduli so that pair coordinates `(u, s)` stay readable.
//!
//! Elements are indexed in mixed radix with the first coordinate most
//! significant, so index order is lexicographic order of the coordinates.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<u32>);

impl GroupElement {
    pub fn new(coords: Vec<u32>) -> Self {
        GroupElement(coords)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    /// Short form used in tables and diagrams: `"01"` for `(0,1)` when every
    /// coordinate is a single digit, `"3.11"` otherwise.
    pub fn compact(&self) -> String {
        match self.0.as_slice() {
            [] => "e".to_string(),
            [x] => x.to_string(),
            cs if cs.iter().all(|&c| c < 10) => cs.iter().join(""),
            cs => cs.iter().join("."),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u32>,
    order: usize,
}

impl FiniteAbelianGroup {
    /// Builds the group with the given cyclic factors, normalized to the
    /// invariant-factor chain. Two factor lists describing isomorphic groups
    /// produce identical values.
    pub fn new(factors: &[u32]) -> Result<Self> {
        if let Some(&bad) = factors.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidFactor(bad));
        }
        Ok(Self::from_moduli(canonical_factors(factors)))
    }

    pub fn trivial() -> Self {
        Self::from_moduli(Vec::new())
    }

    /// `Z_n`; `n = 1` gives the trivial group.
    pub fn cyclic(n: u32) -> Self {
        assert!(n >= 1, "cyclic group of order 0");
        if n == 1 {
            Self::trivial()
        } else {
            Self::from_moduli(vec![n])
        }
    }

    /// `Z_p^j`.
    pub fn elementary(p: u32, j: usize) -> Self {
        Self::from_moduli(vec![p; j])
    }

    fn from_moduli(moduli: Vec<u32>) -> Self {
        let order = moduli.iter().map(|&m| m as usize).product();
        FiniteAbelianGroup { moduli, order }
    }

    /// `self ⊕ other` with the coordinates of `self` first. The result keeps
    /// the concatenated moduli and is not normalized.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut moduli = self.moduli.clone();
        moduli.extend_from_slice(&other.moduli);
        Self::from_moduli(moduli)
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn invariant_factors(&self) -> Vec<u32> {
        canonical_factors(&self.moduli)
    }

    pub fn is_canonical(&self) -> bool {
        self.moduli.windows(2).all(|w| w[1] % w[0] == 0)
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors().len() <= 1
    }

    /// True iff the group is `Z_p^j` for some `j >= 0`.
    pub fn is_elementary(&self, p: u32) -> bool {
        self.invariant_factors().iter().all(|&d| d == p)
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.order == other.order && self.invariant_factors() == other.invariant_factors()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.moduli.len()])
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.0.len() == self.moduli.len() && a.0.iter().zip(&self.moduli).all(|(&c, &m)| c < m)
    }

    pub fn check(&self, a: &GroupElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::WrongGroup {
                element: a.clone(),
                moduli: self.moduli.clone(),
            })
        }
    }

    pub fn element_from(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.moduli.len() {
            return Err(Error::WrongGroup {
                element: GroupElement(coords.iter().map(|&c| c.max(0) as u32).collect()),
                moduli: self.moduli.clone(),
            });
        }
        Ok(GroupElement(
            coords
                .iter()
                .zip(&self.moduli)
                .map(|(&c, &m)| c.rem_euclid(m as i64) as u32)
                .collect(),
        ))
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub fn add_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        debug_assert_eq!(a.0.len(), self.moduli.len());
        debug_assert_eq!(b.0.len(), self.moduli.len());
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.moduli)
                .map(|((&x, &y), &m)| (x + y) % m)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.moduli)
                .map(|(&x, &m)| (m - x) % m)
                .collect(),
        )
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add_unchecked(a, &self.neg(b))
    }

    /// `k · a`.
    pub fn scale(&self, k: u64, a: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.moduli)
                .map(|(&x, &m)| ((x as u64 * (k % m as u64)) % m as u64) as u32)
                .collect(),
        )
    }

    /// Least `n >= 1` with `n · a` the identity.
    pub fn element_order(&self, a: &GroupElement) -> u32 {
        a.0.iter()
            .zip(&self.moduli)
            .fold(1, |acc, (&x, &m)| lcm(acc, m / gcd(m, x)))
    }

    pub fn exponent(&self) -> u32 {
        self.moduli.iter().fold(1, |acc, &m| lcm(acc, m))
    }

    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.0.iter()
            .zip(&self.moduli)
            .fold(0, |acc, (&x, &m)| acc * m as usize + x as usize)
    }

    pub fn element(&self, mut index: usize) -> GroupElement {
        debug_assert!(index < self.order);
        let mut coords = vec![0; self.moduli.len()];
        for (c, &m) in coords.iter_mut().zip(&self.moduli).rev() {
            *c = (index % m as usize) as u32;
            index /= m as usize;
        }
        GroupElement(coords)
    }

    /// All elements in canonical (lexicographic) order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(move |i| self.element(i))
    }

    /// The unit vectors, one per modulus.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.moduli.len())
            .map(|i| {
                let mut coords = vec![0; self.moduli.len()];
                coords[i] = 1;
                GroupElement(coords)
            })
            .collect()
    }

    /// Index-level addition table, row-major.
    pub fn addition_table(&self) -> CayleyTable {
        let n = self.order;
        let elems: Vec<GroupElement> = self.elements().collect();
        let mut table = Vec::with_capacity(n * n);
        for a in &elems {
            for b in &elems {
                table.push(self.index_of(&self.add_unchecked(a, b)) as u32);
            }
        }
        CayleyTable::new(n, 0, table)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            write!(f, "1")
        } else {
            write!(
                f,
                "{}",
                self.moduli.iter().map(|m| format!("Z{m}")).join("+")
            )
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FactorsRepr {
    factors: Vec<u32>,
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FactorsRepr {
            factors: self.moduli.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FactorsRepr::deserialize(deserializer)?;
        FiniteAbelianGroup::new(&repr.factors).map_err(serde::de::Error::custom)
    }
}

pub fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Prime-power factorization as `(p, e)` pairs in increasing `p`.
pub fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant-factor chain of `Z_{f_1} ⊕ … ⊕ Z_{f_k}`: split every factor into
/// prime powers, then recombine the largest powers of each prime into the
/// last factor, the next largest into the one before, and so on.
pub fn canonical_factors(factors: &[u32]) -> Vec<u32> {
    let mut by_prime: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &f in factors {
        for (p, e) in factorize(f) {
            by_prime.entry(p).or_default().push(p.pow(e));
        }
    }
    let width = by_prime.values().map(Vec::len).max().unwrap_or(0);
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
    }
    let mut out: Vec<u32> = (0..width)
        .map(|i| by_prime.values().filter_map(|ps| ps.get(i)).product())
        .collect();
    out.reverse();
    out
}

/// Every abelian group of order `n`, one per isomorphism type, sorted by
/// invariant factors.
pub fn abelian_groups_of_order(n: usize) -> Vec<FiniteAbelianGroup> {
    assert!(n >= 1 && n <= u32::MAX as usize);
    let mut groups = vec![Vec::<u32>::new()];
    for (p, e) in factorize(n as u32) {
        let mut next = Vec::new();
        for part in partitions(e) {
            for g in &groups {
                let mut fs = g.clone();
                fs.extend(part.iter().map(|&k| p.pow(k)));
                next.push(fs);
            }
        }
        groups = next;
    }
    let mut out: Vec<FiniteAbelianGroup> = groups
        .into_iter()
        .map(|fs| FiniteAbelianGroup::from_moduli(canonical_factors(&fs)))
        .collect();
    out.sort_by(|a, b| a.moduli.cmp(&b.moduli));
    out
}

fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// A finite group given by its operation table on `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    size: usize,
    identity: usize,
    table: Vec<u32>,
}

impl CayleyTable {
    pub fn new(size: usize, identity: usize, table: Vec<u32>) -> Self {
        assert_eq!(
            table.len(),
            size * size,
            "operation table must be size x size"
        );
        CayleyTable {
            size,
            identity,
            table,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b] as usize
    }

    pub fn order_of(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.op(x, a);
            n += 1;
        }
        n
    }

    /// `k · a` by repeated operation.
    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.op(acc, a))
    }
}

/// The result of recognizing an abelian operation table: its invariant
/// factors, and a basis `b_1, …, b_k` (table indices) such that
/// `(c_1, …, c_k) ↦ c_1·b_1 + … + c_k·b_k` is an isomorphism from `group`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recognition {
    pub group: FiniteAbelianGroup,
    pub basis: Vec<usize>,
}

impl Recognition {
    /// Table index of the element with canonical coordinates `coords`.
    pub fn embed(&self, table: &CayleyTable, coords: &GroupElement) -> usize {
        coords
            .0
            .iter()
            .zip(&self.basis)
            .fold(table.identity(), |acc, (&c, &b)| {
                table.op(acc, table.power(b, c as usize))
            })
    }
}

/// Invariant factors from the element-order census, then a basis found by
/// choosing elements of the required orders largest first, each meeting the
/// span of the previous ones trivially (with backtracking).
pub fn recognize(table: &CayleyTable) -> Result<Recognition> {
    let n = table.size();
    for a in 0..n {
        for b in (a + 1)..n {
            if table.op(a, b) != table.op(b, a) {
                return Err(Error::NotAbelian(a, b));
            }
        }
    }
    let orders: Vec<usize> = (0..n).map(|a| table.order_of(a)).collect();

    let mut prime_powers = Vec::new();
    for (p, e) in factorize(n as u32) {
        let p = p as usize;
        // log_p of |{x : p^j x = 0}|
        let mut logs = vec![0u32];
        for j in 1..=e {
            let pj = p.pow(j);
            let count = orders.iter().filter(|&&o| pj % o == 0).count();
            logs.push(ilog(count, p));
        }
        // parts >= j
        for j in 1..=e as usize {
            let at_least = logs[j] - logs[j - 1];
            let at_least_next = if j < e as usize {
                logs[j + 1] - logs[j]
            } else {
                0
            };
            for _ in 0..(at_least - at_least_next) {
                prime_powers.push(p.pow(j as u32) as u32);
            }
        }
    }
    let factors = canonical_factors(&prime_powers);
    let group = FiniteAbelianGroup::from_moduli(factors.clone());

    let mut basis = vec![0; factors.len()];
    let mut span = vec![false; n];
    span[table.identity()] = true;
    let targets: Vec<usize> = factors.iter().rev().map(|&d| d as usize).collect();
    if !extend_basis(table, &orders, &targets, 0, &mut span, &mut basis) {
        unreachable!("every finite abelian group has a basis for its invariant factors");
    }
    basis.reverse();
    Ok(Recognition { group, basis })
}

fn ilog(mut count: usize, p: usize) -> u32 {
    let mut k = 0;
    while count > 1 {
        debug_assert_eq!(count % p, 0);
        count /= p;
        k += 1;
    }
    k
}

fn extend_basis(
    table: &CayleyTable,
    orders: &[usize],
    targets: &[usize],
    depth: usize,
    span: &mut Vec<bool>,
    basis: &mut Vec<usize>,
) -> bool {
    if depth == targets.len() {
        return true;
    }
    let d = targets[depth];
    for x in 0..table.size() {
        if orders[x] != d || span[x] {
            continue;
        }
        let multiples: Vec<usize> = (1..d).map(|k| table.power(x, k)).collect();
        if multiples.iter().any(|&m| span[m]) {
            continue;
        }
        let old: Vec<usize> = (0..span.len()).filter(|&i| span[i]).collect();
        let mut next = span.clone();
        for &h in &old {
            let mut y = h;
            for _ in 1..d {
                y = table.op(y, x);
                next[y] = true;
            }
        }
        let saved = std::mem::replace(span, next);
        basis[depth] = x;
        if extend_basis(table, orders, targets, depth + 1, span, basis) {
            return true;
        }
        *span = saved;
    }
    false
}

/// A subgroup stored as its sorted element set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    elements: Vec<GroupElement>,
}

impl Subgroup {
    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        Subgroup {
            parent: parent.clone(),
            elements: vec![parent.identity()],
        }
    }

    pub fn whole(parent: &FiniteAbelianGroup) -> Self {
        Subgroup {
            parent: parent.clone(),
            elements: parent.elements().collect(),
        }
    }

    /// Smallest subgroup containing `gens`, by closure.
    pub fn generated(parent: &FiniteAbelianGroup, gens: &[GroupElement]) -> Result<Self> {
        for g in gens {
            parent.check(g)?;
        }
        let mut seen = vec![false; parent.order()];
        let id = parent.identity();
        seen[parent.index_of(&id)] = true;
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = parent.add_unchecked(&x, g);
                let i = parent.index_of(&y);
                if !seen[i] {
                    seen[i] = true;
                    frontier.push(y);
                }
            }
        }
        Ok(Self::from_mask(parent, &seen))
    }

    /// Validates that `elements` is closed, contains the identity and is
    /// closed under negation.
    pub fn from_elements(parent: &FiniteAbelianGroup, elements: &[GroupElement]) -> Result<Self> {
        for e in elements {
            parent.check(e)?;
        }
        let mut elements = elements.to_vec();
        elements.sort();
        elements.dedup();
        let sub = Subgroup {
            parent: parent.clone(),
            elements,
        };
        sub.verify_closed()?;
        Ok(sub)
    }

    pub(crate) fn from_mask(parent: &FiniteAbelianGroup, mask: &[bool]) -> Self {
        let elements = mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| parent.element(i))
            .collect();
        Subgroup {
            parent: parent.clone(),
            elements,
        }
    }

    /// Stores an element set without checking closure. Used where closure is
    /// itself the property under test.
    pub fn from_set_unchecked(
        parent: &FiniteAbelianGroup,
        mut elements: Vec<GroupElement>,
    ) -> Self {
        elements.sort();
        elements.dedup();
        Subgroup {
            parent: parent.clone(),
            elements,
        }
    }

    pub fn verify_closed(&self) -> Result<()> {
        let id = self.parent.identity();
        if !self.contains(&id) {
            return Err(Error::NotASubgroup(format!("identity {id} missing")));
        }
        for a in &self.elements {
            let n = self.parent.neg(a);
            if !self.contains(&n) {
                return Err(Error::NotASubgroup(format!("inverse of {a} missing")));
            }
            for b in &self.elements {
                let c = self.parent.add_unchecked(a, b);
                if !self.contains(&c) {
                    return Err(Error::NotASubgroup(format!("{a} + {b} = {c} missing")));
                }
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.verify_closed().is_ok()
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// `[G : H]`.
    pub fn index(&self) -> usize {
        self.parent.order() / self.order()
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        self.elements.binary_search(a).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let elements = self
            .elements
            .iter()
            .filter(|e| other.contains(e))
            .cloned()
            .collect();
        Subgroup {
            parent: self.parent.clone(),
            elements,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.parent.order()];
        for e in &self.elements {
            mask[self.parent.index_of(e)] = true;
        }
        mask
    }

    pub fn operation_table(&self) -> CayleyTable {
        let n = self.elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &self.elements {
            for b in &self.elements {
                let c = self.parent.add_unchecked(a, b);
                table.push(self.elements.binary_search(&c).expect("closed subgroup") as u32);
            }
        }
        let id = self
            .elements
            .binary_search(&self.parent.identity())
            .expect("identity");
        CayleyTable::new(n, id, table)
    }

    /// Isomorphism type of the subgroup and an embedding of it into the parent.
    pub fn structure(&self) -> (FiniteAbelianGroup, GroupHom) {
        let table = self.operation_table();
        let rec = recognize(&table).expect("subgroups of abelian groups are abelian");
        let images = rec
            .basis
            .iter()
            .map(|&b| self.elements[b].clone())
            .collect();
        let embedding = GroupHom::new(&rec.group, &self.parent, images)
            .expect("basis elements have the orders of the invariant factors");
        (rec.group, embedding)
    }

    /// `p^h G` membership: largest `h` with `self`'s generator in `p^h · G`,
    /// for a subgroup of prime order `p`. Two order-`p` subgroups of a
    /// finite abelian group lie in one automorphism orbit iff their heights
    /// agree.
    pub fn height(&self, p: u32) -> u32 {
        assert_eq!(
            self.order(),
            p as usize,
            "height is defined for subgroups of order p"
        );
        let x = self
            .elements
            .iter()
            .find(|e| **e != self.parent.identity())
            .unwrap();
        let mut h = 0;
        let mut pk = p as u64;
        while self
            .parent
            .elements()
            .any(|g| self.parent.scale(pk, &g) == *x)
        {
            h += 1;
            pk *= p as u64;
        }
        h
    }
}

pub fn index(g: &FiniteAbelianGroup, h: &Subgroup) -> Result<usize> {
    if h.parent() != g {
        return Err(Error::NotASubgroup("subgroup of a different group".into()));
    }
    h.verify_closed()?;
    Ok(h.index())
}

/// `G/N` in invariant-factor form. Cosets are labeled by their
/// lexicographically minimal element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    group: FiniteAbelianGroup,
    representatives: Vec<GroupElement>,
    coset_of: Vec<u32>,
    projection: GroupHom,
}

impl Quotient {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    /// Minimal representative of the coset labeled by quotient element `q`.
    pub fn representative(&self, q: &GroupElement) -> &GroupElement {
        &self.representatives[self.group.index_of(q)]
    }

    /// Representatives indexed by quotient element index.
    pub fn representatives(&self) -> &[GroupElement] {
        &self.representatives
    }

    pub fn project(&self, g: &GroupElement) -> GroupElement {
        self.group
            .element(self.coset_of[self.projection.source().index_of(g)] as usize)
    }

    pub fn projection(&self) -> &GroupHom {
        &self.projection
    }
}

pub fn quotient(g: &FiniteAbelianGroup, n: &Subgroup) -> Result<Quotient> {
    if n.parent() != g {
        return Err(Error::NotASubgroup("subgroup of a different group".into()));
    }
    n.verify_closed()?;

    // coset id per element, ids assigned in order of minimal representative
    let mut coset = vec![u32::MAX; g.order()];
    let mut reps = Vec::new();
    for i in 0..g.order() {
        if coset[i] != u32::MAX {
            continue;
        }
        let x = g.element(i);
        let id = reps.len() as u32;
        for h in n.elements() {
            coset[g.index_of(&g.add_unchecked(&x, h))] = id;
        }
        reps.push(x);
    }
    let m = reps.len();
    let mut table = Vec::with_capacity(m * m);
    for a in &reps {
        for b in &reps {
            table.push(coset[g.index_of(&g.add_unchecked(a, b))]);
        }
    }
    let table = CayleyTable::new(m, 0, table);
    let rec = recognize(&table)?;
    let q = rec.group.clone();

    let mut coset_to_q = vec![0u32; m];
    let mut representatives = vec![GroupElement(Vec::new()); m];
    for (qi, qe) in q.elements().enumerate() {
        let c = rec.embed(&table, &qe);
        coset_to_q[c] = qi as u32;
        representatives[qi] = reps[c].clone();
    }
    let coset_of: Vec<u32> = coset.iter().map(|&c| coset_to_q[c as usize]).collect();
    let images = g
        .generators()
        .iter()
        .map(|e| q.element(coset_of[g.index_of(e)] as usize))
        .collect();
    let projection = GroupHom::new(g, &q, images)?;
    Ok(Quotient {
        group: q,
        representatives,
        coset_of,
        projection,
    })
}

/// Recognizes the isomorphism type of an abelian operation table.
pub fn recognize_group(table: &CayleyTable) -> Result<FiniteAbelianGroup> {
    recognize(table).map(|r| r.group)
}

/// A homomorphism stored by the images of the source's unit generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupHom {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    gen_images: Vec<GroupElement>,
}

impl GroupHom {
    /// Checks that generator `i` (of order `m_i`) maps to an element whose
    /// order divides `m_i`, which is exactly well-definedness.
    pub fn new(
        source: &FiniteAbelianGroup,
        target: &FiniteAbelianGroup,
        gen_images: Vec<GroupElement>,
    ) -> Result<Self> {
        if gen_images.len() != source.rank() {
            return Err(Error::WrongGroup {
                element: GroupElement(Vec::new()),
                moduli: source.moduli().to_vec(),
            });
        }
        for (i, (img, &m)) in gen_images.iter().zip(source.moduli()).enumerate() {
            target.check(img)?;
            if m % target.element_order(img) != 0 {
                return Err(Error::NotAHom {
                    generator: i,
                    image: img.clone(),
                    modulus: m,
                });
            }
        }
        Ok(GroupHom {
            source: source.clone(),
            target: target.clone(),
            gen_images,
        })
    }

    pub fn identity_map(g: &FiniteAbelianGroup) -> Self {
        GroupHom {
            source: g.clone(),
            target: g.clone(),
            gen_images: g.generators(),
        }
    }

    pub fn zero(source: &FiniteAbelianGroup, target: &FiniteAbelianGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            gen_images: vec![target.identity(); source.rank()],
        }
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn gen_images(&self) -> &[GroupElement] {
        &self.gen_images
    }

    pub fn apply(&self, a: &GroupElement) -> GroupElement {
        debug_assert!(self.source.contains(a));
        let mut acc = self.target.identity();
        for (&c, img) in a.0.iter().zip(&self.gen_images) {
            if c != 0 {
                acc = self
                    .target
                    .add_unchecked(&acc, &self.target.scale(c as u64, img));
            }
        }
        acc
    }

    /// Target index of the image of every source element, by source index.
    pub fn table(&self) -> Vec<u32> {
        self.source
            .elements()
            .map(|a| self.target.index_of(&self.apply(&a)) as u32)
            .collect()
    }

    pub fn kernel(&self) -> Subgroup {
        let id = self.target.identity();
        let elements = self
            .source
            .elements()
            .filter(|a| self.apply(a) == id)
            .collect();
        Subgroup {
            parent: self.source.clone(),
            elements,
        }
    }

    pub fn image(&self) -> Subgroup {
        Subgroup::generated(&self.target, &self.gen_images).expect("images lie in the target")
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.target != other.source {
            return Err(Error::WrongGroup {
                element: GroupElement(Vec::new()),
                moduli: other.source.moduli().to_vec(),
            });
        }
        let images = self.gen_images.iter().map(|g| other.apply(g)).collect();
        GroupHom::new(&self.source, &other.target, images)
    }
}

/// Every homomorphism `g1 → g2`, lexicographic over the target indices of
/// the generator images (first generator most significant).
pub fn homs_iter<'a>(
    g1: &'a FiniteAbelianGroup,
    g2: &'a FiniteAbelianGroup,
    surjective_only: bool,
) -> impl Iterator<Item = GroupHom> + 'a {
    let candidates: Vec<Vec<GroupElement>> = g1
        .moduli()
        .iter()
        .map(|&m| {
            g2.elements()
                .filter(|y| m % g2.element_order(y) == 0)
                .collect()
        })
        .collect();
    let product: Box<dyn Iterator<Item = Vec<GroupElement>>> = if candidates.is_empty() {
        Box::new(std::iter::once(Vec::new()))
    } else {
        Box::new(candidates.into_iter().multi_cartesian_product())
    };
    product
        .map(move |images| GroupHom {
            source: g1.clone(),
            target: g2.clone(),
            gen_images: images,
        })
        .filter(move |h| !surjective_only || h.is_surjective())
}

pub fn enumerate_homs(
    g1: &FiniteAbelianGroup,
    g2: &FiniteAbelianGroup,
    surjective_only: bool,
) -> Vec<GroupHom> {
    homs_iter(g1, g2, surjective_only).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(fs: &[u32]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(fs).unwrap()
    }

    fn el(cs: &[u32]) -> GroupElement {
        GroupElement(cs.to_vec())
    }

    fn order_census(g: &FiniteAbelianGroup) -> Vec<u32> {
        let mut c: Vec<u32> = g.elements().map(|a| g.element_order(&a)).collect();
        c.sort_unstable();
        c
    }

    #[test]
    fn make_group_normalizes() {
        assert_eq!(grp(&[]).order(), 1);
        assert_eq!(grp(&[2, 2]).moduli(), &[2, 2]);
        assert_eq!(grp(&[4, 2]).moduli(), &[2, 4]);
        assert_eq!(grp(&[2, 3]).moduli(), &[6]);
        assert_eq!(grp(&[6, 4]).moduli(), &[2, 12]);
        assert_ne!(grp(&[2, 4]), grp(&[8]));
        assert_ne!(grp(&[2, 4]), grp(&[2, 2, 2]));
        assert_eq!(grp(&[4, 2]), grp(&[2, 4]));
        assert_eq!(
            FiniteAbelianGroup::new(&[2, 1]),
            Err(Error::InvalidFactor(1))
        );
        assert_eq!(FiniteAbelianGroup::new(&[0]), Err(Error::InvalidFactor(0)));
    }

    #[test]
    fn normalization_preserves_order_census() {
        for fs in [
            vec![2, 4],
            vec![4, 2],
            vec![6, 4],
            vec![3, 3, 9],
            vec![2, 3, 4],
        ] {
            let raw = FiniteAbelianGroup::from_moduli(fs.clone());
            let canon = grp(&fs);
            assert_eq!(order_census(&raw), order_census(&canon), "{fs:?}");
        }
        assert_eq!(order_census(&grp(&[2, 4])), vec![1, 2, 2, 2, 4, 4, 4, 4]);
        assert_eq!(order_census(&grp(&[8])), vec![1, 2, 4, 4, 8, 8, 8, 8]);
    }

    #[test]
    fn arithmetic() {
        let z4 = grp(&[4]);
        assert_eq!(z4.element_order(&el(&[2])), 2);
        let g = grp(&[2, 2, 2]);
        assert_eq!(
            g.add(&el(&[1, 0, 0]), &el(&[1, 1, 1])).unwrap(),
            el(&[0, 1, 1])
        );
        let g24 = grp(&[2, 4]);
        assert_eq!(g24.element_order(&el(&[1, 2])), 2);
        assert_eq!(g24.neg(&el(&[1, 1])), el(&[1, 3]));
        assert!(matches!(
            g24.add(&el(&[1]), &el(&[1, 1])),
            Err(Error::WrongGroup { .. })
        ));
        assert!(matches!(
            g24.add(&el(&[2, 1]), &el(&[1, 1])),
            Err(Error::WrongGroup { .. })
        ));
    }

    #[test]
    fn element_order_matches_repeated_addition() {
        for g in [grp(&[2, 4]), grp(&[3, 6]), grp(&[12])] {
            for a in g.elements() {
                let mut x = a.clone();
                let mut n = 1;
                while x != g.identity() {
                    x = g.add_unchecked(&x, &a);
                    n += 1;
                }
                assert_eq!(g.element_order(&a), n);
            }
        }
    }

    #[test]
    fn index_roundtrip_is_lexicographic() {
        let g = grp(&[2, 6]);
        let elems: Vec<_> = g.elements().collect();
        assert!(elems.windows(2).all(|w| w[0] < w[1]));
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
    }

    #[test]
    fn generated_subgroups() {
        let g = grp(&[2, 2, 2]);
        assert_eq!(
            Subgroup::generated(&g, &[]).unwrap().elements(),
            &[g.identity()]
        );
        let n = Subgroup::generated(&g, &[el(&[1, 0, 0])]).unwrap();
        assert_eq!(n.elements(), &[el(&[0, 0, 0]), el(&[1, 0, 0])]);
        let z8 = grp(&[8]);
        let h = Subgroup::generated(&z8, &[el(&[2])]).unwrap();
        assert_eq!(h.elements(), &[el(&[0]), el(&[2]), el(&[4]), el(&[6])]);
    }

    #[test]
    fn from_elements_rejects_non_subgroups() {
        let z8 = grp(&[8]);
        assert!(matches!(
            Subgroup::from_elements(&z8, &[el(&[0]), el(&[2])]),
            Err(Error::NotASubgroup(_))
        ));
        assert!(matches!(
            Subgroup::from_elements(&z8, &[el(&[4])]),
            Err(Error::NotASubgroup(_))
        ));
        assert!(Subgroup::from_elements(&z8, &[el(&[4]), el(&[0])]).is_ok());
    }

    #[test]
    fn quotients() {
        let g = grp(&[2, 2, 2]);
        let n = Subgroup::from_elements(&g, &[el(&[0, 0, 0]), el(&[1, 0, 0])]).unwrap();
        let q = quotient(&g, &n).unwrap();
        assert_eq!(q.group(), &grp(&[2, 2]));
        assert_eq!(q.representatives().len(), 4);
        assert_eq!(index(&g, &n).unwrap(), 4);

        let whole = Subgroup::whole(&g);
        assert!(quotient(&g, &whole).unwrap().group().is_trivial());
        assert_eq!(index(&g, &whole).unwrap(), 1);

        let z8 = grp(&[8]);
        let n = Subgroup::from_elements(&z8, &[el(&[0]), el(&[4])]).unwrap();
        let q = quotient(&z8, &n).unwrap();
        assert_eq!(q.group(), &grp(&[4]));
        let h = Subgroup::generated(&z8, &[el(&[2])]).unwrap();
        assert_eq!(index(&z8, &h).unwrap(), 2);
    }

    #[test]
    fn quotient_rejects_unclosed_sets() {
        let z8 = grp(&[8]);
        let bogus = Subgroup::from_set_unchecked(&z8, vec![el(&[0]), el(&[3])]);
        assert!(matches!(quotient(&z8, &bogus), Err(Error::NotASubgroup(_))));
        assert!(matches!(index(&z8, &bogus), Err(Error::NotASubgroup(_))));
    }

    #[test]
    fn quotient_representatives_are_minimal_and_projection_is_consistent() {
        let g = grp(&[2, 4]);
        let n = Subgroup::generated(&g, &[el(&[1, 2])]).unwrap();
        let q = quotient(&g, &n).unwrap();
        for a in g.elements() {
            let label = q.project(&a);
            assert_eq!(q.projection().apply(&a), label);
            let rep = q.representative(&label);
            let coset_min = n
                .elements()
                .iter()
                .map(|h| g.add_unchecked(&a, h))
                .min()
                .unwrap();
            assert_eq!(*rep, coset_min);
        }
    }

    #[test]
    fn isomorphism_tests() {
        assert!(!grp(&[4]).is_isomorphic(&grp(&[2, 2])));
        assert!(!grp(&[2, 4]).is_isomorphic(&grp(&[8])));
        assert!(grp(&[2, 4]).is_isomorphic(&grp(&[4, 2])));
        let g = grp(&[2, 4]);
        let h = Subgroup::from_elements(&g, &[el(&[0, 0]), el(&[0, 2])]).unwrap();
        assert!(h.structure().0.is_isomorphic(&grp(&[2])));
    }

    #[test]
    fn recognize_rejects_non_abelian_tables() {
        // S_3 as permutations of {0,1,2}
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
            [1, 2, 0],
            [2, 0, 1],
        ];
        let compose = |a: &[usize; 3], b: &[usize; 3]| [a[b[0]], a[b[1]], a[b[2]]];
        let mut table = Vec::new();
        for a in &perms {
            for b in &perms {
                let c = compose(a, b);
                table.push(perms.iter().position(|p| *p == c).unwrap() as u32);
            }
        }
        let t = CayleyTable::new(6, 0, table);
        assert!(matches!(recognize(&t), Err(Error::NotAbelian(_, _))));
    }

    #[test]
    fn recognize_recovers_every_group_up_to_order_64() {
        for n in 1..=64 {
            for g in abelian_groups_of_order(n) {
                // scramble the presentation into a non-canonical one first
                let raw = FiniteAbelianGroup::from_moduli(
                    g.moduli()
                        .iter()
                        .flat_map(|&d| factorize(d).into_iter().map(|(p, e)| p.pow(e)))
                        .collect(),
                );
                let t = raw.addition_table();
                let rec = recognize(&t).unwrap();
                assert_eq!(rec.group, g);
                let mut hit = vec![false; n];
                for e in rec.group.elements() {
                    hit[rec.embed(&t, &e)] = true;
                }
                assert!(hit.iter().all(|&b| b), "basis does not span {g}");
            }
        }
    }

    #[test]
    fn hom_counts() {
        let z8 = grp(&[8]);
        let z4 = grp(&[4]);
        assert_eq!(enumerate_homs(&z8, &z4, false).len(), 4);
        let surj = enumerate_homs(&z8, &z4, true);
        assert_eq!(surj.len(), 2);
        assert_eq!(surj[0].gen_images(), &[el(&[1])]);
        assert_eq!(surj[1].gen_images(), &[el(&[3])]);
        let trivial = FiniteAbelianGroup::trivial();
        for g in [grp(&[2, 2]), grp(&[6]), trivial.clone()] {
            assert_eq!(enumerate_homs(&g, &trivial, false).len(), 1);
        }
    }

    #[test]
    fn hom_count_is_gcd_against_brute_force() {
        for a in 1..=12u32 {
            for b in 1..=12u32 {
                let ga = FiniteAbelianGroup::cyclic(a);
                let gb = FiniteAbelianGroup::cyclic(b);
                // brute force: every function on the generator, kept when it
                // respects the relation a·1 = 0
                let brute = (0..b)
                    .filter(|&y| (a as u64 * y as u64).is_multiple_of(b as u64))
                    .count();
                assert_eq!(enumerate_homs(&ga, &gb, false).len(), brute);
                assert_eq!(brute as u32, gcd(a, b));
            }
        }
    }

    #[test]
    fn kernel_and_image() {
        let z8 = grp(&[8]);
        let z4 = grp(&[4]);
        let h = GroupHom::new(&z8, &z4, vec![el(&[2])]).unwrap();
        assert_eq!(
            h.kernel().elements(),
            &[el(&[0]), el(&[2]), el(&[4]), el(&[6])]
        );
        assert_eq!(h.image().elements(), &[el(&[0]), el(&[2])]);
        assert!(matches!(
            GroupHom::new(&z4, &z8, vec![el(&[1])]),
            Err(Error::NotAHom { generator: 0, .. })
        ));
    }

    #[test]
    fn second_projection_kernel() {
        // Z_3 ⊕ Z_3 in pair coordinates, π₂(u, s) = s
        let u = grp(&[3]);
        let s = grp(&[3]);
        let g = u.direct_sum(&s);
        let pi2 = GroupHom::new(&g, &s, vec![el(&[0]), el(&[1])]).unwrap();
        let k = pi2.kernel();
        assert_eq!(k.order(), 3);
        assert!(k.elements().iter().all(|e| e.coords()[1] == 0));
    }

    #[test]
    fn abelian_group_enumeration() {
        let names = |n| {
            abelian_groups_of_order(n)
                .iter()
                .map(|g| g.moduli().to_vec())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(1), vec![Vec::<u32>::new()]);
        assert_eq!(names(8), vec![vec![2, 2, 2], vec![2, 4], vec![8]]);
        assert_eq!(names(12), vec![vec![2, 6], vec![12]]);
        assert_eq!(abelian_groups_of_order(64).len(), 11);
        assert_eq!(abelian_groups_of_order(72).len(), 6);
    }

    #[test]
    fn heights_of_order_p_subgroups() {
        let g = grp(&[2, 4]);
        let low = Subgroup::generated(&g, &[el(&[1, 0])]).unwrap();
        let high = Subgroup::generated(&g, &[el(&[0, 2])]).unwrap();
        assert_eq!(low.height(2), 0);
        assert_eq!(high.height(2), 1);
    }

    #[test]
    fn compact_format() {
        assert_eq!(el(&[0, 1]).compact(), "01");
        assert_eq!(el(&[11]).compact(), "11");
        assert_eq!(el(&[1, 11]).compact(), "1.11");
        assert_eq!(el(&[1, 0]).to_string(), "1,0");
    }
}
