"""Factory for optimizer settings based on maintenance policy names."""

import logging
from typing import Any, Union

from .lbfgs import MaintenancePolicy, OptimizerSettings

logger = logging.getLogger(__name__)

# Reconstruction interval of the fixed-interval scheme when none is given.
DEFAULT_FIXED_INTERVAL = 10


def create_optimizer_settings(
    policy: Union[str, MaintenancePolicy] = MaintenancePolicy.ADAPTIVE, **overrides: Any
) -> OptimizerSettings:
    """Create optimizer settings for a neighbor maintenance policy.

    Args:
        policy: Policy name ("adaptive"/"anm", "every-iteration"/"brute",
            "fixed-interval"/"fixed") or a MaintenancePolicy.
        **overrides: OptimizerSettings fields to set explicitly.

    Returns:
        OptimizerSettings instance

    Raises:
        ValueError: If the policy is not recognized or an override is not a
            settings field.
    """
    policy = MaintenancePolicy.normalize(policy)
    known = set(OptimizerSettings.__dataclass_fields__) - {"policy"}
    unknown = sorted(set(overrides) - set(known))
    if unknown:
        raise ValueError(f"Unknown optimizer settings: {', '.join(unknown)}")

    if policy is MaintenancePolicy.FIXED_INTERVAL:
        overrides.setdefault("len_reset", DEFAULT_FIXED_INTERVAL)
    elif policy is MaintenancePolicy.EVERY_ITERATION and overrides.get("len_reset", 1) != 1:
        logger.info("len_reset is ignored by the every-iteration policy")

    return OptimizerSettings(policy=policy, **overrides)
