"""Diabetes-risk classification toolkit.

Pipeline pieces: dataset preparation (:mod:`diabrisk.data`), SMOTE+Tomek
rebalancing (:mod:`diabrisk.resample`), ensemble feature selection
(:mod:`diabrisk.featsel`), the learner zoo (:mod:`diabrisk.learners`),
stacking (:mod:`diabrisk.ensemble`), search (:mod:`diabrisk.tuning`),
evaluation (:mod:`diabrisk.metrics`), persistence (:mod:`diabrisk.artifact`),
and the HTTP scoring service (:mod:`diabrisk.service`).
"""

__version__ = "0.1.0"

from .data import Dataset, FeatureSchema, ProfileReport, Scaler
from .errors import ArtifactError, DataError, DiabriskError, TrainingError

__all__ = [
    "ArtifactError",
    "DataError",
    "Dataset",
    "DiabriskError",
    "FeatureSchema",
    "ProfileReport",
    "Scaler",
    "TrainingError",
    "__version__",
]
