"""monrex: explain trained network neurons as M-of-N threshold rules.

The pipeline: load a model and dataset, run the forward evaluator, pick a
threshold literal for each target neuron, then search weight-ordered
M-of-N candidate rules for the best error/complexity tradeoff at each
beta. Reports carry the selected rules and per-layer tradeoff curves.
"""

from .errors import BudgetError, FormatError, MonrexError, ValidationError
from .forward import (
    ActivationTensor,
    ForwardResult,
    NeuronInputs,
    argmax_labels,
    forward_all,
    neuron_inputs,
)
from .model_io import (
    Dataset,
    LayerSpec,
    NetworkModel,
    check_compatible,
    layer_param_count,
    load_dataset,
    load_model,
    save_dataset,
    save_model,
    validate_model,
)
from .oracle import (
    OracleBudget,
    binary_product_space,
    exhaustive_best_rule,
    exhaustive_best_split,
    perceptron_truth,
)
from .report_io import (
    read_layer_file,
    read_report,
    report_from_dict,
    report_to_dict,
    write_layer_file,
    write_report,
)
from .rules import (
    MofNRule,
    ScoredRule,
    evaluate_dnf,
    evaluate_rule,
    format_rule,
    literal_truths,
    max_complexity_count,
    rule_complexity,
    rule_error,
    rule_loss,
    score_rule,
    to_dnf,
)
from .search import (
    DEFAULT_BETAS,
    ExtractionReport,
    SearchConfig,
    TradeoffCurve,
    extract_target,
    layer_targets,
    prepare_target,
    search_layer,
    search_neuron,
    sweep_curve,
)
from .splitter import (
    Literal,
    SplitResult,
    best_split_vs_labels,
    best_split_vs_literal,
    entropy,
    make_input_literals,
    make_target_literal,
    order_inputs,
    select_feature_map_neuron,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationTensor",
    "BudgetError",
    "DEFAULT_BETAS",
    "Dataset",
    "ExtractionReport",
    "FormatError",
    "ForwardResult",
    "LayerSpec",
    "Literal",
    "MofNRule",
    "MonrexError",
    "NetworkModel",
    "NeuronInputs",
    "OracleBudget",
    "ScoredRule",
    "SearchConfig",
    "SplitResult",
    "TradeoffCurve",
    "ValidationError",
    "argmax_labels",
    "best_split_vs_labels",
    "best_split_vs_literal",
    "binary_product_space",
    "check_compatible",
    "entropy",
    "evaluate_dnf",
    "evaluate_rule",
    "exhaustive_best_rule",
    "exhaustive_best_split",
    "extract_target",
    "format_rule",
    "forward_all",
    "layer_param_count",
    "layer_targets",
    "literal_truths",
    "load_dataset",
    "load_model",
    "make_input_literals",
    "make_target_literal",
    "max_complexity_count",
    "neuron_inputs",
    "order_inputs",
    "perceptron_truth",
    "prepare_target",
    "read_layer_file",
    "read_report",
    "report_from_dict",
    "report_to_dict",
    "rule_complexity",
    "rule_error",
    "rule_loss",
    "save_dataset",
    "save_model",
    "score_rule",
    "search_layer",
    "search_neuron",
    "select_feature_map_neuron",
    "sweep_curve",
    "to_dnf",
    "validate_model",
    "write_layer_file",
    "write_report",
]
