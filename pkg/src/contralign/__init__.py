"""Contrastive unsupervised word alignment with non-local features.

A log-linear model scores every alignment of a sentence pair with 16
features.  Training contrasts observed pairs with corrupted copies, and the
posterior expectations in the gradient are approximated over the n best
alignments found by beam search.  Exhaustive enumeration and a Gibbs sampler
serve as reference estimators on short pairs.
"""

from .corpus import Corpus, GoldAlignment, SentencePair, TTable, load_parallel, load_ttable
from .features import FEATURE_NAMES, K, extract_features
from .search import beam_search, viterbi
from .trainer import TrainConfig, train

__version__ = "0.1.0"

__all__ = [
    "Corpus", "GoldAlignment", "SentencePair", "TTable", "load_parallel", "load_ttable",
    "FEATURE_NAMES", "K", "extract_features", "beam_search", "viterbi", "TrainConfig",
    "train", "__version__",
]
