"""Textual modeling and static analysis of data protection in edge computing deployments."""

__version__ = "0.1.0"

from edgesec.model import (  # noqa: E402
    AdversaryModel,
    Model,
    Requirement,
    RoleType,
    Taxonomy,
    TaxonomyError,
    Threat,
    connecting_channels,
    register_custom_stereotype,
    resolve_threats,
)
from edgesec.parser import ParseError, parse_model, parse_tuple_list, serialize_model  # noqa: E402
from edgesec.validator import validate  # noqa: E402
from edgesec.analysis import analyze  # noqa: E402

__all__ = [
    "AdversaryModel",
    "Model",
    "ParseError",
    "Requirement",
    "RoleType",
    "Taxonomy",
    "TaxonomyError",
    "Threat",
    "analyze",
    "connecting_channels",
    "parse_model",
    "parse_tuple_list",
    "register_custom_stereotype",
    "resolve_threats",
    "serialize_model",
    "validate",
]
