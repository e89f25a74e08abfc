"""Exact Bayesian information theory over finite discrete spaces.

The package computes surprisal, entropy and mutual information both for
the true data-generating process and for Bayesian agents whose beliefs may
be wrong, checks the core identities and counterexamples numerically, and
measures how much extractable information neural-network probes find in
token embeddings.
"""

from .distributions import (
    ConditionalBelief,
    DomainError,
    FiniteDistribution,
    JointDistribution,
)
from .info import (
    bayesian_entropy,
    bayesian_mi,
    belief_entropy,
    belief_mi,
    conditional_bayesian_entropy,
    conditional_entropy,
    cross_entropy,
    empirical_bayesian_mi,
    entropy,
    kl_divergence,
    mutual_information,
    surprisal,
)
from .agents import (
    ConditionalDirichletAgent,
    DirichletCategoricalAgent,
    IllustrativeAgent,
    JointDirichletAgent,
    RestrictedFamilyAgent,
    illustrative_example,
)
from .seeding import derive_rng, derive_seed

__version__ = "0.1.0"

__all__ = [
    "ConditionalBelief",
    "ConditionalDirichletAgent",
    "DirichletCategoricalAgent",
    "DomainError",
    "FiniteDistribution",
    "IllustrativeAgent",
    "JointDirichletAgent",
    "JointDistribution",
    "RestrictedFamilyAgent",
    "bayesian_entropy",
    "bayesian_mi",
    "belief_entropy",
    "belief_mi",
    "conditional_bayesian_entropy",
    "conditional_entropy",
    "cross_entropy",
    "derive_rng",
    "derive_seed",
    "empirical_bayesian_mi",
    "entropy",
    "illustrative_example",
    "kl_divergence",
    "mutual_information",
    "surprisal",
]
