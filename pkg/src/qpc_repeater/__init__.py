"""Loss-tolerant logical Bell measurements on quantum parity codes and repeater-chain optimization."""

from .analytics import bm_success_probability, p_mu, p_mu_table, perfect_bm_success_probability
from .bm_model import decode_logical, enumerate_exact, exhaustive_soundness, physical_bm, sample_bm
from .channel_chain import ChainConfig, chain_success, cost, optimize
from .qpc_core import BellIndex, CodeParams

__all__ = [
    "BellIndex",
    "ChainConfig",
    "CodeParams",
    "bm_success_probability",
    "chain_success",
    "cost",
    "decode_logical",
    "enumerate_exact",
    "exhaustive_soundness",
    "optimize",
    "p_mu",
    "p_mu_table",
    "perfect_bm_success_probability",
    "physical_bm",
    "sample_bm",
]
