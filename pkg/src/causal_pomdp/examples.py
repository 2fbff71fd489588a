"""Bundled desk-scale models."""

from __future__ import annotations

from importlib import resources

from .model import CausalPOMDP, load_model


def _bundled(name: str) -> str:
    return resources.files("causal_pomdp.data").joinpath(name).read_text(encoding="utf-8")


def tiger_model() -> CausalPOMDP:
    """Tiger problem with the sensor reading Z as a state variable.

    Declares two domains: ``base`` (identity) and ``degraded`` (Z remixed
    by [[0.7, 0.3], [0.3, 0.7]], dropping sensor accuracy from 0.85 to 0.64).
    """
    return load_model(_bundled("tiger.json"))


def coin_model() -> CausalPOMDP:
    """A fair coin redrawn every step, with two shifts that both yield Bern(3/4)."""
    return load_model(_bundled("coin.json"))


def tiger_path():
    return resources.files("causal_pomdp.data").joinpath("tiger.json")
