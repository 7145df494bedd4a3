"""Classical capacity of an amplitude-damped bosonic channel read out by a
noisy threshold quadrature detector."""

from .capacity import CapacityResult, channel_capacity, mutual_information, optimal_prior
from .channel import ChannelParams, TransitionMatrix, damp, encode, p01_series, transition_matrix
from .errors import (DegenerateChannelError, HermiteOverflowError, NumericsError,
                     QuadratureError, RejectionBudgetError, SeriesConvergenceError)
from .experiments import SweepRow, SweepSpec, fig1_dataset, optimal_sigma, sweep
from .quadist import NumericsConfig, SignalDensity, interval_probability, smeared_density

__all__ = [
    "CapacityResult", "ChannelParams", "DegenerateChannelError", "HermiteOverflowError",
    "NumericsConfig", "NumericsError", "QuadratureError", "RejectionBudgetError",
    "SeriesConvergenceError", "SignalDensity", "SweepRow", "SweepSpec", "TransitionMatrix",
    "channel_capacity", "damp", "encode", "fig1_dataset", "interval_probability",
    "mutual_information", "optimal_prior", "optimal_sigma", "p01_series",
    "smeared_density", "sweep", "transition_matrix",
]
