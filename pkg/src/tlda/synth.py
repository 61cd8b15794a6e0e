"""Seeded Gaussian class clouds for exercising the pipeline without real data."""

from dataclasses import dataclass

import numpy as np

from .discriminant import LabeledTensorDataset
from .errors import ParameterError

__all__ = ["SynthSpec", "synthesize"]


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for :func:`synthesize`.

    Class ``i`` is centred at ``class_separation * i * u`` for a seeded random
    unit-norm tensor ``u``; every entry gets independent ``N(0, noise_sigma^2)``
    noise.
    """

    classes: int
    samples_per_class: int
    sample_dims: tuple
    class_separation: float = 10.0
    noise_sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sample_dims", tuple(int(d) for d in self.sample_dims))
        if self.classes < 1 or self.samples_per_class < 1:
            raise ParameterError("class and sample counts must be at least 1")
        if not self.sample_dims or min(self.sample_dims) < 1:
            raise ParameterError(f"invalid sample dims {self.sample_dims}")
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be non-negative")


def synthesize(spec, force_singular=False):
    """Draw a labeled dataset; samples are grouped by class.

    With ``force_singular`` the second feature row (mode-1 index 1) is
    overwritten by the first in every sample, which makes every
    transform-domain slice of the within-class scatter singular.
    """
    if force_singular and spec.sample_dims[0] < 2:
        raise ParameterError("force_singular needs at least two feature rows")
    rng = np.random.default_rng(spec.seed)
    u = rng.standard_normal(spec.sample_dims)
    u /= np.linalg.norm(u)
    samples, labels = [], []
    width = len(str(spec.classes - 1))
    for i in range(spec.classes):
        noise = rng.standard_normal((spec.samples_per_class,) + spec.sample_dims)
        block = spec.class_separation * i * u + spec.noise_sigma * noise
        samples.extend(block)
        labels.extend([f"c{i:0{width}d}"] * spec.samples_per_class)
    data = np.stack(samples, axis=1)
    if force_singular:
        data[1] = data[0]
    return LabeledTensorDataset(data, tuple(labels))
