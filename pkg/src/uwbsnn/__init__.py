"""Unsupervised spiking pipeline for UWB LOS/NLOS channel classification.

Rate-coded RF and CIR features drive fixed random LIF reservoirs ("liquids");
their spike counts feed an STDP-trained spiking self-organizing map.
"""

__version__ = "0.1.0"

from .dataset import DatasetSplit, Sample, Schema, parse_dataset, split_dataset
from .encoding import EncoderConfig, SpikeTrain, concat_trains, encode_rate
from .features import (
    NormalizationStats,
    apply_normalizer,
    extract_cir_segment,
    extract_rf,
    fit_normalizer,
    pad_uniform,
)
from .lif import LifParams, LifPopulation, lif_step, run_population
from .liquid import LiquidConfig, LiquidNetwork, build_liquid, run_liquid
from .metrics import Metrics, compute_metrics
from .pipeline import STRATEGIES, StrategyConfig, generate_synthetic, run_all, run_strategy
from .som import SomConfig, SomNetwork, StdpParams
