"""Quantum money with classical-channel verification: simulator and analysis toolkit.

Subpackages/modules:

- ``qsim``      -- dimension-4 complex state vectors, Hermitian operators,
                   projective measurement, eigensolver.
- ``hmp``       -- the 4-dimensional hidden matching relation, its encoding
                   states, query bases and the honest answering measurement.
- ``games``     -- quantum retrieval games: exact selective value, strategy
                   evaluation, seesaw search, product-game Monte Carlo.
- ``money``     -- coins, secret records, the bank database, minting,
                   retirement and lifespan accounting.
- ``protocol``  -- the 6-step verification dialogue as explicit state
                   machines, wire codec and transcripts.
- ``transport`` -- in-process and TCP bank endpoints, the session driver,
                   and the TCP bank server.
- ``adversary`` -- counterfeiting strategies and the two-counterfeits
                   evaluation harness.
- ``bounds``    -- Chernoff bound formulas, the set-intersection lemma
                   checker and the mutual-information lemma checker.
- ``kernels``   -- batched Monte Carlo inner loops (numba with numpy
                   fallback, selected by QMONEY_NO_NUMBA).
"""

__version__ = "0.1.0"

from . import bounds, games, hmp, money, protocol, qsim  # noqa: F401
