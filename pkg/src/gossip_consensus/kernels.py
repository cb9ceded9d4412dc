"""Replication kernel selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python ``_fallback`` runs. Set ``GOSSIP_CONSENSUS_PURE_PYTHON=1`` to
force the fallback. Both produce identical results for identical streams.
"""

from __future__ import annotations

import os

from . import _fallback

replicate_python = _fallback.replicate

try:
    if os.environ.get("GOSSIP_CONSENSUS_PURE_PYTHON") == "1":
        raise ImportError("pure Python requested")
    from ._kernels import replicate as replicate_compiled
except ImportError:
    replicate_compiled = None

replicate = replicate_compiled or replicate_python
BACKEND = "cython" if replicate_compiled is not None else "python"
