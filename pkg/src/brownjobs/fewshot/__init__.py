"""Few-shot intermittent-failure classification.

The prediction pipeline composes three stages: log pre-processing,
a sentence-embedding provider fine-tuned with contrastive pairs, and a
logistic classification head. Public surface:

- hyperparams: the tunable search space
- pairs: contrastive pair generation from labeled shots
- providers: pluggable embedding backends (offline test + pretrained)
- classifier: the sklearn-style estimator tying the stages together
- bundle: persistence of a trained pipeline
"""

from .bundle import ModelBundle, load_bundle, save_bundle
from .classifier import FewShotLogClassifier, LogisticHead
from .hyperparams import (
    BODY_LEARNING_RATE_RANGE,
    BATCH_SIZE_CHOICES,
    DEFAULT_PAIR_MULTIPLIER,
    MAX_ITER_CHOICES,
    NUM_EPOCHS_CHOICES,
    FewShotHyperParams,
    random_hyperparams,
)
from .pairs import ContrastivePair, generate_pairs
from .providers import (
    DEFAULT_PRETRAINED_MODEL_ID,
    HashingEmbeddingModel,
    PretrainedEmbeddingModel,
    get_provider,
    truncate_to_limit,
)

__all__ = [
    "ModelBundle",
    "load_bundle",
    "save_bundle",
    "FewShotLogClassifier",
    "LogisticHead",
    "FewShotHyperParams",
    "random_hyperparams",
    "BODY_LEARNING_RATE_RANGE",
    "BATCH_SIZE_CHOICES",
    "MAX_ITER_CHOICES",
    "NUM_EPOCHS_CHOICES",
    "DEFAULT_PAIR_MULTIPLIER",
    "ContrastivePair",
    "generate_pairs",
    "HashingEmbeddingModel",
    "PretrainedEmbeddingModel",
    "get_provider",
    "truncate_to_limit",
    "DEFAULT_PRETRAINED_MODEL_ID",
]
