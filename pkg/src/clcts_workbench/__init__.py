"""Analytics workbench for cross-lingual cross-temporal summarization (CLCTS).

Corpus statistics, semantic and syntactic divergence measures, summary
metric computation and meta-evaluation, document-feature regression,
contamination probes for LLM summarizers, and a provider-agnostic chat
client with record/replay transports.
"""

from __future__ import annotations

__version__ = "0.1.0"
