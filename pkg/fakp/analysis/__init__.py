# This code is part of fakp and is licensed under the MIT license.
"""Numerical and symmetry property checks."""

from .property_checks import (
    CheckResult,
    generic_cloud,
    naive_kpconv,
    run_property_suite,
    suite_model_config,
)
