"""Inference kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback
is picked otherwise, or when CRFNER_PURE_PYTHON is set in the
environment.  Both expose the same functions with the same semantics;
only speed differs.
"""

import os

if os.environ.get("CRFNER_PURE_PYTHON"):
    from . import numpy_backend as backend
else:
    try:
        from . import _native as backend  # type: ignore[attr-defined]
    except ImportError:
        from . import numpy_backend as backend

BACKEND = backend.NAME

forward = backend.forward
backward = backend.backward
log_partition = backend.log_partition
posteriors = backend.posteriors
viterbi_path = backend.viterbi_path
build_node_scores = backend.build_node_scores
sequence_nll_grad = backend.sequence_nll_grad
