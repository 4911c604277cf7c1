"""Causal diagrams for human understanding of models, with executable checks.

Modules:

* ``graph``: diagrams with directed, ambiguous and correlational links.
* ``conditions``: graph surgery for experiment conditions and built-in diagrams.
* ``dsep``: d-separation with equivalences, latents and ambiguous links.
* ``scm``: structural models, sampling and conditional-independence tests.
* ``agents`` and ``study``: simulated participants and the agreement study.
* ``cli``: command-line entry point.
"""

from .graph import Diagram, Edge, EdgeKind, Node, VariableRole, realizations
from .conditions import Condition, build, catalog, catalog_keys, show
from .dsep import SeparationQuery, Verdict, VerdictKind, d_separated, brute_force_separated

__version__ = "0.1.0"

__all__ = [
    "Diagram", "Edge", "EdgeKind", "Node", "VariableRole", "realizations",
    "Condition", "build", "catalog", "catalog_keys", "show",
    "SeparationQuery", "Verdict", "VerdictKind", "d_separated", "brute_force_separated",
]
