from .common_utils import *
from .file_utils import *
from .logging import *
from .random_utils import *
from .registry_utils import *
from .stats_utils import *
