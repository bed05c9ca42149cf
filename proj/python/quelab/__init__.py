"""Level-one Hecke eigenforms, Petersson norms and mass measures.

Real numbers cross the boundary as decimal strings at the session precision;
wrap them with ``mpmath.mpf`` or ``decimal.Decimal`` as needed.
"""

import json
import sys

from ._core import (
    CorruptEntry,
    DomainError,
    Error,
    NumericError,
    RunConfig,
    Session,
    cusp_dim,
    delta_series,
    gamma_lemma_gap,
    run_cli,
    weight_grid,
)

SCENARIOS = ("vertical", "horizontal", "siegel", "meanvalues", "lehmer", "orthogonality", "gammalemma", "mainerror")


def verify(session, scenario, **params):
    """Run one scenario on ``session`` and return the report as a dict.

    Keyword arguments set RunConfig fields (k_min, k_max, k_list, T, a, b, ...).
    """
    cfg = RunConfig()
    cfg.precision_bits = session.precision_bits
    for key, value in params.items():
        if not hasattr(cfg, key):
            raise DomainError(f"unknown parameter {key!r}")
        setattr(cfg, key, value)
    return json.loads(session._verify_json(scenario, cfg))


def main(argv=None):
    code, out, err = run_cli(sys.argv[1:] if argv is None else list(argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


__all__ = [
    "CorruptEntry",
    "DomainError",
    "Error",
    "NumericError",
    "RunConfig",
    "SCENARIOS",
    "Session",
    "cusp_dim",
    "delta_series",
    "gamma_lemma_gap",
    "main",
    "run_cli",
    "verify",
    "weight_grid",
]
