"""reluflow: a desk-scale lab for gradient-flow limits of ReLU regression.

Single-neuron and single-hidden-neuron square-loss models, closed-form
piecewise trajectories for a three-point benchmark family, minimum-norm
interpolants, conservation-law and equivariance checks, and an acceptance
suite tying it all together.
"""

from .kernels import BACKEND
from .model_core import Activation, Dataset, HiddenParams, benchmark_dataset

__version__ = "0.1.0"
__all__ = ["Activation", "Dataset", "HiddenParams", "benchmark_dataset", "BACKEND"]
