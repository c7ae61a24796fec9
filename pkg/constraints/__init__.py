from .base_constraint import BaseConstraint
from .link_length import LinkLengthConstraint

__all__ = [
    "BaseConstraint",
    "LinkLengthConstraint",
]


def default_path_constraints(bounds) -> list[BaseConstraint]:
    """Path constraints the optimizer enforces for a scenario's bounds."""
    return [LinkLengthConstraint(bounds.l_min, bounds.l_max)]
