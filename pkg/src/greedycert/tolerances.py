"""Numeric thresholds shared across the package.

All comparisons against "zero", "rank deficient", "tied" and so on go
through these constants so that every module draws the same lines.
"""

# Generic agreement tolerance for algebraic identities (dual-form checks,
# Pythagoras on extension coefficients, recursion vs direct evaluation).
TAU_NUM = 1e-9

# A column of an orthogonalized system whose remaining norm falls below
# this is treated as linearly dependent on the previous ones.
TAU_RANK = 1e-8

# Vector norms below this count as exactly zero (projected atom inside
# the current span, residual exhausted, null-space component absent).
TAU_ZERO = 1e-10

# Allowed loss of orthonormality in an incrementally built basis.
TAU_ORTH = 1e-9

# Two selection scores within this relative distance of the leader are
# reported as tied.
TAU_TIE = 1e-9

# A greedy run stops successfully once the residual norm drops below
# TAU_SUCCESS_REL * ||y||.
TAU_SUCCESS_REL = 1e-8

# Dual-route certificate evaluations (definition vs projected form) must
# agree to this, otherwise a FormMismatchError is raised.
TAU_FORM = 1e-7

# Strictness margin for sign-sensitive suprema over null spaces.  Values
# inside [-TAU_STRICT, TAU_STRICT] are flagged as boundary cases.
TAU_STRICT = 1e-10
