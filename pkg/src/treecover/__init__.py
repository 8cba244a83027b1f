"""Tree covers for planar and bounded-treewidth metrics, with verifiers."""

__version__ = "0.1.0"
