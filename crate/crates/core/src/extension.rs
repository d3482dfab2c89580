//! Decomposition of an abelian group `G` with subgroup `N` into the
//! extension `U ⊠ S`, `U ≅ N`, `S ≅ G/N`.
//!
//! Elements of `G` are written as pairs `(u, s)` through
//! `(u, s) ↦ l(s) + υ⁻¹(u)`, where the lifting `l` picks the minimal
//! representative of the coset `ψ(s)`. The action `φ` and the factor set `ξ`
//! are tabulated from `(υ, ψ, l)` and the pair operation
//! `(u₁,s₁)*(u₂,s₂) = (u₁ + φ(s₁)(u₂) + ξ(s₁,s₂), s₁ + s₂)` reproduces `G`.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::{
    is_prime, quotient, FiniteAbelianGroup, GroupElement, GroupHom, Quotient, Subgroup,
};

#[derive(Clone, Debug)]
pub struct ExtensionDecomposition {
    g: FiniteAbelianGroup,
    n: Subgroup,
    u: FiniteAbelianGroup,
    s: FiniteAbelianGroup,
    /// υ⁻¹ : U → G, an isomorphism onto N.
    embedding: GroupHom,
    /// υ on N, indexed by the position of the element in `n`.
    upsilon: Vec<GroupElement>,
    quotient: Quotient,
    /// l ∘ ψ, indexed by S element index.
    lifting: Vec<GroupElement>,
    /// φ(s)(u) as U indices, `phi[s][u]`.
    phi: Vec<Vec<u32>>,
    /// ξ(s₁, s₂) as U indices, row-major over S indices.
    xi: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionClass {
    DirectProduct,
    Cyclic,
}

impl ExtensionDecomposition {
    pub fn decompose(g: &FiniteAbelianGroup, n: &Subgroup) -> Result<Self> {
        if n.parent() != g {
            return Err(Error::NotASubgroup("subgroup of a different group".into()));
        }
        let quotient = quotient(g, n)?;
        let (u, embedding) = n.structure();
        let s = quotient.group().clone();

        let mut upsilon = vec![u.identity(); n.order()];
        for x in u.elements() {
            let image = embedding.apply(&x);
            let pos = n
                .elements()
                .binary_search(&image)
                .expect("embedding lands in N");
            upsilon[pos] = x;
        }
        let lifting = quotient.representatives().to_vec();

        let mut dec = ExtensionDecomposition {
            g: g.clone(),
            n: n.clone(),
            u,
            s,
            embedding,
            upsilon,
            quotient,
            lifting,
            phi: Vec::new(),
            xi: Vec::new(),
        };
        dec.phi = dec.tabulate_phi();
        dec.xi = dec.tabulate_xi();
        Ok(dec)
    }

    // φ(s)(u) = υ(l(s) + υ⁻¹(u) − l(s))
    fn tabulate_phi(&self) -> Vec<Vec<u32>> {
        self.s
            .elements()
            .map(|s| {
                let l = self.lift(&s);
                self.u
                    .elements()
                    .map(|u| {
                        let conj = self
                            .g
                            .sub(&self.g.add_unchecked(l, &self.embedding.apply(&u)), l);
                        self.u.index_of(&self.upsilon(&conj)) as u32
                    })
                    .collect()
            })
            .collect()
    }

    // ξ(s₁, s₂) = υ(l(s₁) + l(s₂) − l(s₁ + s₂))
    fn tabulate_xi(&self) -> Vec<u32> {
        let mut xi = Vec::with_capacity(self.s.order() * self.s.order());
        for s1 in self.s.elements() {
            for s2 in self.s.elements() {
                let sum = self.s.add_unchecked(&s1, &s2);
                let defect = self.g.sub(
                    &self.g.add_unchecked(self.lift(&s1), self.lift(&s2)),
                    self.lift(&sum),
                );
                xi.push(self.u.index_of(&self.upsilon(&defect)) as u32);
            }
        }
        xi
    }

    pub fn g(&self) -> &FiniteAbelianGroup {
        &self.g
    }

    pub fn n(&self) -> &Subgroup {
        &self.n
    }

    pub fn u(&self) -> &FiniteAbelianGroup {
        &self.u
    }

    pub fn s(&self) -> &FiniteAbelianGroup {
        &self.s
    }

    /// υ⁻¹ : U → G.
    pub fn embedding(&self) -> &GroupHom {
        &self.embedding
    }

    /// The surjection G → S (ψ⁻¹ composed with the coset map).
    pub fn projection(&self) -> &GroupHom {
        self.quotient.projection()
    }

    /// υ : N → U. `n` must lie in N.
    pub fn upsilon(&self, n: &GroupElement) -> GroupElement {
        let pos = self.n.elements().binary_search(n).expect("element of N");
        self.upsilon[pos].clone()
    }

    /// The lifting l(ψ(s)) in G.
    pub fn lift(&self, s: &GroupElement) -> &GroupElement {
        &self.lifting[self.s.index_of(s)]
    }

    pub fn phi(&self, s: &GroupElement, u: &GroupElement) -> GroupElement {
        self.u
            .element(self.phi[self.s.index_of(s)][self.u.index_of(u)] as usize)
    }

    pub fn xi(&self, s1: &GroupElement, s2: &GroupElement) -> GroupElement {
        let k = self.s.order();
        self.u
            .element(self.xi[self.s.index_of(s1) * k + self.s.index_of(s2)] as usize)
    }

    /// Overwrites the factor set. Only useful for checking that
    /// [`verify`](Self::verify) notices a wrong one.
    pub fn set_factor_set(&mut self, f: impl Fn(&GroupElement, &GroupElement) -> GroupElement) {
        let mut xi = Vec::with_capacity(self.xi.len());
        for s1 in self.s.elements() {
            for s2 in self.s.elements() {
                xi.push(self.u.index_of(&f(&s1, &s2)) as u32);
            }
        }
        self.xi = xi;
    }

    pub fn from_pair(&self, u: &GroupElement, s: &GroupElement) -> GroupElement {
        self.g.add_unchecked(self.lift(s), &self.embedding.apply(u))
    }

    pub fn to_pair(&self, g: &GroupElement) -> (GroupElement, GroupElement) {
        let s = self.quotient.project(g);
        let u = self.upsilon(&self.g.sub(g, self.lift(&s)));
        (u, s)
    }

    /// `(u₁,s₁)*(u₂,s₂) = (u₁ + φ(s₁)(u₂) + ξ(s₁,s₂), s₁ + s₂)`.
    pub fn extension_product(
        &self,
        (u1, s1): (&GroupElement, &GroupElement),
        (u2, s2): (&GroupElement, &GroupElement),
    ) -> (GroupElement, GroupElement) {
        let acted = self.phi(s1, u2);
        let u = self
            .u
            .add_unchecked(&self.u.add_unchecked(u1, &acted), &self.xi(s1, s2));
        (u, self.s.add_unchecked(s1, s2))
    }

    /// `(u, s)^n` under the pair operation.
    pub fn pair_power(
        &self,
        (u, s): (&GroupElement, &GroupElement),
        n: u64,
    ) -> (GroupElement, GroupElement) {
        let mut acc = (self.u.identity(), self.s.identity());
        for _ in 0..n {
            acc = self.extension_product((&acc.0, &acc.1), (u, s));
        }
        acc
    }

    /// True iff the pair map is a bijection U × S → G transporting the
    /// addition of G exactly onto the pair operation (all |G|² pairs).
    pub fn verify(&self) -> bool {
        if *self.lift(&self.s.identity()) != self.g.identity() {
            return false;
        }
        let mut hit = vec![false; self.g.order()];
        for s in self.s.elements() {
            for u in self.u.elements() {
                let i = self.g.index_of(&self.from_pair(&u, &s));
                if hit[i] {
                    return false;
                }
                hit[i] = true;
            }
        }
        if hit.iter().any(|h| !h) {
            return false;
        }
        let pairs: Vec<(GroupElement, GroupElement)> =
            self.g.elements().map(|g| self.to_pair(&g)).collect();
        for (i, a) in self.g.elements().enumerate() {
            for (j, b) in self.g.elements().enumerate() {
                let sum = self.g.add_unchecked(&a, &b);
                let expected = &pairs[self.g.index_of(&sum)];
                let got =
                    self.extension_product((&pairs[i].0, &pairs[i].1), (&pairs[j].0, &pairs[j].1));
                if got != *expected {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_phi_trivial(&self) -> bool {
        self.phi
            .iter()
            .all(|row| row.iter().enumerate().all(|(u, &v)| u as u32 == v))
    }

    pub fn is_xi_symmetric(&self) -> bool {
        let k = self.s.order();
        (0..k).all(|a| (0..k).all(|b| self.xi[a * k + b] == self.xi[b * k + a]))
    }

    /// ξ(e, s) = ξ(s, e) = 0 for every s.
    pub fn is_xi_normalized(&self) -> bool {
        let k = self.s.order();
        (0..k).all(|s| self.xi[s] == 0 && self.xi[s * k] == 0)
    }

    pub fn is_xi_zero(&self) -> bool {
        self.xi.iter().all(|&x| x == 0)
    }

    /// A pair `((e,s), (u,e))` that does not commute, if any.
    pub fn noncommuting_witness(&self) -> Option<(GroupElement, GroupElement)> {
        let (eu, es) = (self.u.identity(), self.s.identity());
        for s in self.s.elements() {
            for u in self.u.elements() {
                let left = self.extension_product((&eu, &s), (&u, &es));
                let right = self.extension_product((&u, &es), (&eu, &s));
                if left != right {
                    return Some((s, u));
                }
            }
        }
        None
    }

    fn pair_operation_commutes(&self) -> bool {
        let pairs: Vec<_> = self
            .s
            .elements()
            .flat_map(|s| self.u.elements().map(move |u| (u, s.clone())))
            .collect();
        pairs.iter().all(|a| {
            pairs.iter().all(|b| {
                self.extension_product((&a.0, &a.1), (&b.0, &b.1))
                    == self.extension_product((&b.0, &b.1), (&a.0, &a.1))
            })
        })
    }

    /// A commutative pair operation forces trivial φ and abelian S, and a
    /// nontrivial φ must come with an explicit noncommuting pair.
    pub fn check_phi_abelian_consistency(&self) -> bool {
        let phi_trivial = self.is_phi_trivial();
        let s_abelian = self.s.elements().all(|a| {
            self.s
                .elements()
                .all(|b| self.s.add_unchecked(&a, &b) == self.s.add_unchecked(&b, &a))
        });
        let abelian_ok = !self.pair_operation_commutes() || (phi_trivial && s_abelian);
        let witness_ok = phi_trivial || self.noncommuting_witness().is_some();
        abelian_ok && witness_ok
    }

    /// For `U ≅ Z_p` (p prime) and `S ≅ Z_m`: the extension is the direct
    /// product when `(0,1)^m = (0,0)` and cyclic when `(0,1)^m = (u,0)`, u ≠ 0.
    pub fn classify_zp_zm(&self) -> Result<ExtensionClass> {
        let p = match self.u.moduli() {
            [p] if is_prime(*p) => *p,
            _ => {
                return Err(Error::NotApplicable(format!(
                    "U = {} is not of prime order",
                    self.u
                )))
            }
        };
        if !self.s.is_cyclic() {
            return Err(Error::NotApplicable(format!(
                "S = {} is not cyclic",
                self.s
            )));
        }
        let m = self.s.order() as u64;
        let one = match self.s.rank() {
            0 => self.s.identity(),
            _ => GroupElement::new(vec![1]),
        };
        let (u, s) = self.pair_power((&self.u.identity(), &one), m);
        debug_assert_eq!(s, self.s.identity());
        debug_assert!(u == self.u.identity() || self.u.element_order(&u) == p);
        Ok(if u == self.u.identity() {
            ExtensionClass::DirectProduct
        } else {
            ExtensionClass::Cyclic
        })
    }

    /// ξ as a JSON matrix of U elements, rows and columns in S order.
    pub fn xi_json(&self) -> Value {
        let k = self.s.order();
        Value::Array(
            (0..k)
                .map(|a| {
                    Value::Array(
                        (0..k)
                            .map(|b| {
                                let x = self.u.element(self.xi[a * k + b] as usize);
                                serde_json::to_value(x).expect("plain integer array")
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}
