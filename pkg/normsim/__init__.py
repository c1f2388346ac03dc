__version__ = '0.1.0'

from normsim.base import ConfigError  # noqa
from normsim.base import ListingError  # noqa
from normsim.base import NormsimException  # noqa
from normsim.base import OutputError  # noqa
from normsim.config import ExperimentConfig  # noqa
from normsim.std import Experiment  # noqa
# from normsim.aio import Experiment  # noqa
