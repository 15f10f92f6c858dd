"""Default numerical tolerances shared across modules.

All public functions accept overrides; these are only the defaults. Bump
``TOLERANCES_VERSION`` whenever a default changes, since it is recorded in
every CLI run manifest.
"""

TOLERANCES_VERSION = "1"

TOL_SKEW = 1e-12
TOL_STATE = 1e-9
TOL_PURE = 1e-10
TOL_ORTH = 1e-12
TOL_RECON = 1e-10
# relative to the matrix norm
TOL_ZERO_REL = 1e-10
TOL_STAB_REL = 1e-12
TOL_OMEGA_REL = 1e-8
TOL_PSD = 1e-10
TOL_REAL = 1e-9


def as_dict():
    return {k: v for k, v in globals().items() if k.startswith("TOL")}
