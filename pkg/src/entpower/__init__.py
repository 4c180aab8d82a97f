"""Entangling power of quantum gates under parameter disorder and input noise."""
from .channels import ChannelSpec, kraus_set, on_qubits
from .gates import GateSpec, canonical_nl, diag_unitary, fixture_haar, haar_random, transposition_unitary
from .measures import Bipartition, ggm, monogamy_score_neg_sq, negativity
from .optimize import OptimizerConfig
from .power import (
    GGM,
    NEGATIVITY,
    Measure,
    QuenchConfig,
    entangling_power,
    haar_survey,
    monogamy,
    noisy_entangling_power,
    power_error_delta,
    quenched_average_power,
)
from .states import BisepParams, ProductParams, bisep_state, product_state

__all__ = [
    "BisepParams", "Bipartition", "ChannelSpec", "GGM", "GateSpec", "Measure", "NEGATIVITY", "OptimizerConfig",
    "ProductParams", "QuenchConfig", "bisep_state", "canonical_nl", "diag_unitary", "entangling_power",
    "fixture_haar", "ggm", "haar_random", "haar_survey", "kraus_set", "monogamy", "monogamy_score_neg_sq",
    "negativity", "noisy_entangling_power", "on_qubits", "power_error_delta", "product_state",
    "quenched_average_power", "transposition_unitary",
]
