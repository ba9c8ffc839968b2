"""Global sign conventions.

The chain-level signs that the literature leaves implicit are pinned here in
one place.  The defaults are the calibrated choice: the ones under which the
explicit 1-cochain coboundary identities and the degree-one triple-product
dichotomy come out exactly as the verification suites state them.  The CLI
exposes both toggles so a flipped convention can be diagnosed quickly.
"""

from dataclasses import dataclass


@dataclass
class Conventions:
    # sign multiplying the alternating-sum bar coboundary
    coboundary_sign: int = 1
    # sign multiplying (lifted cocycle o lifted differential) / p
    bockstein_sign: int = 1


conventions = Conventions()
