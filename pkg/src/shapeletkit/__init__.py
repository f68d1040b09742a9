"""Shapelet-transform time-series classification for sensor event detection."""
from .core import LabeledDataset, Normalization, TimeSeries, validate_dataset, znormalize
from .discovery import DiscoveryConfig, Shapelet, ShapeletSet, discover
from .distance import dist, length_normalized_min_distance, min_subsequence_distance
from .exceptions import (ArtifactError, DatasetValidationError, EmptyResult, InputFormatError,
                         InvalidInput)
from .forest import ForestClassifier, ForestConfig, Prediction, train
from .metrics import evaluate, precision_recall, probability_bands
from .pipeline import ShapeletTransformClassifier
from .quality import best_split, build_orderline, entropy, information_gain
from .transform import ShapeletTransform, TransformMatrix, shapelet_transform

__version__ = "0.1.0"

__all__ = [
    "ArtifactError", "DatasetValidationError", "DiscoveryConfig", "EmptyResult",
    "ForestClassifier", "ForestConfig", "InputFormatError", "InvalidInput", "LabeledDataset",
    "Normalization", "Prediction", "Shapelet", "ShapeletSet", "ShapeletTransform",
    "ShapeletTransformClassifier", "TimeSeries", "TransformMatrix", "best_split",
    "build_orderline", "discover", "dist", "entropy", "evaluate", "information_gain",
    "length_normalized_min_distance", "min_subsequence_distance", "precision_recall",
    "probability_bands", "shapelet_transform", "train", "validate_dataset", "znormalize",
]
