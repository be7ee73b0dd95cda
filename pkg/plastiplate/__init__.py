from .diagnostics import *
from .io import *
from .material import *
from .ops import *
from .scenarios import *
from .solver import *
from .structures import *
from .version import __version__, version_info
