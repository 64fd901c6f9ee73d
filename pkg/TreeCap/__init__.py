from .Tree import *
from .potential import *
from .capacity import *
from .characterization import *
from .tiling import *
from .constructions import *
from .misc import load_json, load_tree, load_leaf_set, load_measure, dumps_json

from .Config import Config, make_config_from_args
from .threading import WorkerPool, parallel_map
from .exceptions import (
    TreeCapError,
    TreeError,
    MeasureError,
    CapacityError,
    ConvergenceError,
    TilingError,
    ConstructionError,
    ConfigError
)
