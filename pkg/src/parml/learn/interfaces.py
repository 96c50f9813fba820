"""The three-layer training contract: Optimizer, Algorithm, Model.

Optimization is a first-class citizen here: an Algorithm turns data plus
hyperparameters into a Model by delegating the numerical work to an
Optimizer, and a Model is an object that makes predictions. Concrete
implementations live in the sibling modules; these base classes fix the
call shapes so new algorithms plug in without touching the engine.
"""

import abc


class Optimizer(abc.ABC):
    """Searches parameter space for weights minimizing a supplied loss."""

    @abc.abstractmethod
    def optimize(self, data, labels, grad_fn, config):
        """Return optimized weights for the given gradient function."""


class Algorithm(abc.ABC):
    """Turns data and hyperparameters into a fitted Model."""

    @abc.abstractmethod
    def train(self, data, labels, config):
        """Fit on the data and return a Model."""


class Model(abc.ABC):
    """An object which makes predictions."""

    @abc.abstractmethod
    def predict(self, x):
        """Prediction for a single input."""
