"""Query-oracle toolkit for testing unateness of Boolean functions."""

from .boolfn import (
    DOWN,
    UP,
    ContractError,
    EdgeWitness,
    FunctionOracle,
    FunctionSpec,
    Oracle,
    Orientation,
    Restriction,
    TruthTable,
    compose,
    flip_by_directions,
    generate,
    restrict,
)
from .rng import Rng
from .testers import (
    TesterConfig,
    Verdict,
    edge_monotonicity_tester,
    estimate_cvar,
    find_influential_coordinate,
    run_unateness_tester,
    unateness_tester,
    verify_witness,
)

__all__ = [
    "DOWN", "UP", "ContractError", "EdgeWitness", "FunctionOracle", "FunctionSpec",
    "Oracle", "Orientation", "Restriction", "Rng", "TesterConfig", "TruthTable",
    "Verdict", "compose", "edge_monotonicity_tester", "estimate_cvar",
    "find_influential_coordinate", "flip_by_directions", "generate", "restrict",
    "run_unateness_tester", "unateness_tester", "verify_witness",
]
