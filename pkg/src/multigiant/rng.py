"""Reproducible random streams.

Every random quantity is drawn from ``child(seed, label)``: a PCG64
generator whose ``SeedSequence`` spawn key is the UTF-8 bytes of
``label``.  Trials use labels such as ``"graph/3"`` and ``"bp/17"``, so a
trial's stream does not depend on scheduling or thread count.
"""
import numpy as np


def child(seed: int, label: str) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(label.encode("utf-8")))
    return np.random.Generator(np.random.PCG64(ss))
