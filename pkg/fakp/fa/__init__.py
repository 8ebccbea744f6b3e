# This code is part of fakp and is licensed under the MIT license.
"""Frame averaging: exact invariance and equivariance by construction."""

from .averaging import average_over, act_on_output
from .wrappers import WrappedFunction, fa_invariant, fa_equivariant, fa_composed
from .group_average import (
    group_average,
    validate_finite_group,
    trivial_group,
    point_reflection_group,
    signed_permutation_group,
)
