"""cfx: counterfactual detection and antecedent/consequent span extraction.

The package splits into small, composable pieces: `corpus` (file formats
and splits), `text` (tokenization and BIO tags), `forms` (grammatical-form
rules), `features` (n-gram vectorizers), `balance` (resampling and class
weights), `linear` (Pegasos-style SVM/logistic), `cnn` (text CNN over
static embeddings), `crf` + `spans` (sequence tagging and the dependency
heuristic), `ensemble` (hard voting), `evaluation` (metrics), and `cli`.
"""

from .errors import AlignmentError, CfxError, DataFormatError, TrainingError

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "CfxError",
    "DataFormatError",
    "TrainingError",
    "__version__",
]
