"""Stolarsky-mean degree indices on deterministic and random graphs."""

from .ensemble import EnsembleSpec, EnsembleStats, dense_prediction, run_ensemble, scaling_transform
from .graph import Graph, IndexKind, edge_sum, ka1_index, load_edge_list, mso_index, parse_index, sp_index, zagreb_m1
from .means import LIM0, LIM1, NEG_INF, POS_INF, AlphaParam, power_mean, stolarsky_mean
from .random_models import ErParams, RgParams, SeededStream, g_of_r, gen_er, gen_rg, mean_degree

__version__ = "0.1.0"
