"""Dense-matrix quantum dynamics for engineered charge-conjugation schemes.

Subpackages split along the pipeline:

- ``hilbert``: truncated Fock/qubit spaces and operator construction
- ``terms``: time-dependent Hamiltonians as lists of oscillating terms
- ``model``: the three built-in trapped-ion/cavity schemes and their
  ideal target unitaries
- ``effective``: second-order static effective Hamiltonians from
  oscillating term lists
- ``evolve``: propagators and unitary fidelity metrics
- ``hspec``: text DSL for user-authored Hamiltonians (.hspec files)
- ``verify``: algebraic check suite with quantitative residuals
- ``cli``: batch front end (run / derive / scan / verify)
"""

__version__ = "0.1.0"
