"""National power modeled as wealth flowing through trade and conflict networks.

The heavy lifting lives in the compiled extension; this package just
re-exports it.
"""

from ._powerflow import *  # noqa: F401,F403
from ._powerflow import __version__  # noqa: F401
