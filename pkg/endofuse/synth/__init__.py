"""Synthetic scenes with ground truth, and the exhaustive placement oracle."""

from endofuse.synth.oracle import LatticeSpec, OracleResult, exhaustive_search_oracle
from endofuse.synth.rng import SplitMix64
from endofuse.synth.scene import Difficulty, SynthScene, build_tool_model, export_scene, generate

__all__ = [
    "SplitMix64",
    "Difficulty",
    "SynthScene",
    "build_tool_model",
    "generate",
    "export_scene",
    "LatticeSpec",
    "OracleResult",
    "exhaustive_search_oracle",
]
