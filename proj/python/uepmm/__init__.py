"""Straggler-resilient coded matrix multiplication: analytics and decoding."""

from ._core import (
    __version__,
    arrival_pmf,
    binomial_tail,
    coded_matmul,
    decode_products,
    ew_expected_loss_mc,
    expected_loss_mds,
    expected_loss_now,
    now_decoding_bound,
)

__all__ = [
    "__version__",
    "arrival_pmf",
    "binomial_tail",
    "coded_matmul",
    "decode_products",
    "ew_expected_loss_mc",
    "expected_loss_mds",
    "expected_loss_now",
    "now_decoding_bound",
]
