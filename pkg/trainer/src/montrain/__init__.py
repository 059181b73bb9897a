"""Reference-network trainer feeding the rule-extraction engine."""

from .data import (
    TrainingData,
    cars_data,
    digits_data,
    dna_data,
    ecoli_data,
    fashion_data,
    load_training_data,
    synthesize_dna_examples,
)
from .export import (
    ACTS_FORMAT,
    PROBE_COUNT,
    TrainingDiverged,
    TrainResult,
    read_activation_dump,
    train_and_export,
    train_network,
    write_activation_dump,
)
from .nets import build_network, reference_activations, to_network_model
from .specs import ACCURACY_FLOORS, SPECS, SpecError, TrainSpec, lookup

__version__ = "0.1.0"

__all__ = [
    "ACCURACY_FLOORS",
    "ACTS_FORMAT",
    "PROBE_COUNT",
    "SPECS",
    "SpecError",
    "TrainResult",
    "TrainSpec",
    "TrainingData",
    "TrainingDiverged",
    "build_network",
    "cars_data",
    "digits_data",
    "dna_data",
    "ecoli_data",
    "fashion_data",
    "load_training_data",
    "lookup",
    "read_activation_dump",
    "reference_activations",
    "synthesize_dna_examples",
    "to_network_model",
    "train_and_export",
    "train_network",
    "write_activation_dump",
]
