"""Multi-paradigm workbench for finite-domain constraint satisfaction.

Subpackages:

* :mod:`cspbench.fd` finite-domain propagation and labelling
* :mod:`cspbench.lp` rule language parser and printer
* :mod:`cspbench.grounder` instantiation of rule programs
* :mod:`cspbench.stable` stable-model computation
* :mod:`cspbench.declar` model-generation and abductive front-ends
* :mod:`cspbench.bench` encodings, oracles, benchmark harness and CLI
"""
from cspbench.errors import SearchTimeout, StructuralError

__version__ = "0.1.0"

__all__ = ["SearchTimeout", "StructuralError", "__version__"]
