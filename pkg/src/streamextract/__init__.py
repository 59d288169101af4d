"""Feature-agnostic information extraction for noisy streaming text corpora.

Pipeline: tokenize and normalize raw documents, learn random-indexing
word representations incrementally, propose candidate annotations with
high-recall recognizers, then prune them with a supervised contextual
classifier trained from a handful of labeled examples.
"""

from ._kernels import KERNEL_IMPL

__version__ = "0.1.0"

__all__ = ["KERNEL_IMPL", "__version__"]
