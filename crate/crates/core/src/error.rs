use thiserror::Error;

use crate::group::GroupElement;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid invariant factor {0}: every factor must be at least 2")]
    InvalidFactor(u32),

    #[error("element {element} does not belong to a group with moduli {moduli:?}")]
    WrongGroup {
        element: GroupElement,
        moduli: Vec<u32>,
    },

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("operation table is not abelian: elements {0} and {1} do not commute")]
    NotAbelian(usize, usize),

    #[error("generator {generator} image {image} has order not dividing {modulus}")]
    NotAHom {
        generator: usize,
        image: GroupElement,
        modulus: u32,
    },

    #[error("hypotheses not satisfied: {0}")]
    NotApplicable(String),

    #[error("next-state map is not surjective: {missing} is not in its image")]
    NuNotSurjective { missing: GroupElement },

    #[error("next-state map is not a homomorphism (generator {generator})")]
    NuNotHom { generator: usize },

    #[error("output map is not a homomorphism (generator {generator})")]
    OmegaNotHom { generator: usize },

    #[error("branch map is not injective: input {witness} at the identity state is invisible")]
    PsiNotInjective { witness: GroupElement },

    #[error("past kernel has {found} elements, expected {expected}")]
    SizeViolation { expected: usize, found: usize },

    #[error("{lemma} violated: {counterexample}")]
    PredicateViolation {
        lemma: String,
        counterexample: String,
    },

    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("p * max state order = {product} exceeds the exhaustive bound {bound}")]
    TooLarge { product: usize, bound: usize },

    #[error("malformed encoder spec: {0}")]
    Spec(String),
}
