"""k-nearest-neighbour classification with rejection of unknown instances."""
from ._kernels import BACKEND
from .advanced import AknnModel, aknn_classify, classify_many, fit_aknn, set_gap_constant, tca
from .core import (
    UNKNOWN,
    AknnError,
    ClassRegion,
    Dataset,
    DimensionMismatch,
    DistanceMetric,
    EmptyClass,
    EmptyDataset,
    HyperParams,
    Instance,
    KTooLarge,
    MetricKind,
    MinDistMode,
    NonFiniteFeature,
    NonPositiveGc,
    Prediction,
    UnlabeledInstance,
    ZeroAreaWarning,
    validate_dataset,
)
from .knn import KnnModel, Neighbor, fit, knn_classify, neighbors
from .metrics import distance

__version__ = "0.1.0"
