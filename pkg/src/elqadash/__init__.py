"""elqadash: interactive exploration and cleansing dashboards for electrical QA signals.

The package is layered bottom-up:

- ``store``     domain model, in-memory repository, CSV ingestion
- ``synth``     deterministic synthetic dataset generator
- ``features``  per-signal statistics (moments, regression, capacitance)
- ``miners``    standardization, k-means, DBSCAN, pluggable analysers
- ``document``  widget/document tree, patches, serialization
- ``dashboard`` dashboard lifecycle (create / setup events / input change / ...)
- ``cleansing`` the reference circuit-cleansing dashboard
- ``server``    HTTP + websocket transport, sessions
"""

__version__ = "0.1.0"
