"""frontkit: normal forms and differential-geometric invariants of
D4+ wave-front singularities, with a JSON service and CLI on top."""

from .germ import MapGerm, NormalFormGerm, TransformRecord, expand, split_bc
from .normalform import canonical_jet, reduce
from .series import TruncatedSeries1, TruncatedSeries2

__version__ = "0.1.0"

__all__ = [
    "MapGerm",
    "NormalFormGerm",
    "TransformRecord",
    "TruncatedSeries1",
    "TruncatedSeries2",
    "canonical_jet",
    "expand",
    "reduce",
    "split_bc",
    "__version__",
]
