"""Randomized revenue-monotone auctions for k identical items.

The package pairs two truthful mechanisms whose expected revenue never
drops when competition is added (`caii` for one pool of bidders, `mcaii`
when bidders come in groups and all items must sell inside one group) with
exact welfare baselines (`welfare`), a property-verification harness
(`verify`), scenario file I/O (`scenario`), and a CLI (`cli`).
"""

from .model import (
    Bidder,
    ClassifiedProfile,
    GroupedProfile,
    OutcomeDistribution,
    Rational,
    SampledOutcome,
    TypeProfile,
    as_rational,
    classify,
    ppi,
)

__version__ = "0.1.0"

__all__ = [
    "Bidder",
    "ClassifiedProfile",
    "GroupedProfile",
    "OutcomeDistribution",
    "Rational",
    "SampledOutcome",
    "TypeProfile",
    "as_rational",
    "classify",
    "ppi",
    "__version__",
]
