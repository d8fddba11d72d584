"""Censored newsvendor: minimax risk, RCN policies and baselines."""

from ._censnv import *  # noqa: F401,F403
from ._censnv import __doc__  # noqa: F401
