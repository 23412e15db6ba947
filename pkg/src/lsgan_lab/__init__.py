"""Least-squares and regular GANs on toy 2-D data, with exact divergence checks."""

from .autodiff import Graph, Node, ShapeError, finite_diff_check
from .config import ConfigError, TrainConfig, gan_toy_config, lsgan_toy_config
from .losses import LossSpec, validate_coding
from .synthetic import RingMixture, sample_latent, sample_mixture, true_density

__version__ = "0.1.0"
