from ._backend import BACKEND, kernels
from .network import (
    FeedForwardNet,
    backprop,
    forward,
    forward_cached,
    init_weights,
    load_model,
    permute_hidden,
    save_model,
    sigmoid,
)

__all__ = [
    "BACKEND",
    "kernels",
    "FeedForwardNet",
    "backprop",
    "forward",
    "forward_cached",
    "init_weights",
    "load_model",
    "permute_hidden",
    "save_model",
    "sigmoid",
]
