"""Entity-consistent anonymization of financial text plus an econometric
engine for measuring the information the anonymization destroys in
model-extracted signals."""

from .anonymizer import (
    PercentageBasis,
    anonymize,
    apply_map,
    build_entity_map,
    entity_percentage,
    restore_text,
)
from .econometrics import (
    RegressionResult,
    RegressionSpec,
    fit_fe_ols,
    gap,
    horse_race,
    interaction_fit,
    pearson_matrix,
    standardize,
    winsorize,
)
from .entities import (
    EntityCategory,
    EntityMap,
    EntitySpan,
    category_of,
)
from .recognizer import RecognizerConfig, load_external_spans, load_gazetteer, recognize

__version__ = "0.1.0"

__all__ = [
    "EntityCategory",
    "EntityMap",
    "EntitySpan",
    "PercentageBasis",
    "RecognizerConfig",
    "RegressionResult",
    "RegressionSpec",
    "anonymize",
    "apply_map",
    "build_entity_map",
    "category_of",
    "entity_percentage",
    "fit_fe_ols",
    "gap",
    "horse_race",
    "interaction_fit",
    "load_external_spans",
    "load_gazetteer",
    "pearson_matrix",
    "recognize",
    "restore_text",
    "standardize",
    "winsorize",
]
