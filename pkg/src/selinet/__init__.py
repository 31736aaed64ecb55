"""Trainable, quantizable multitask emotion/sentiment head over frozen
backbone feature maps, with sentiment-boosted post-processing and
Average Precision evaluation."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
