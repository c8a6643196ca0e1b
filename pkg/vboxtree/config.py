import os
from dotenv import load_dotenv

load_dotenv()

# Build defaults
DEFAULT_MARGIN = float(os.getenv("VBOXTREE_MARGIN", "1.0"))
DEFAULT_MAX_DIM = int(os.getenv("VBOXTREE_MAX_DIM", "6"))

# Absolute tolerance for containment and feasibility decisions
TOLERANCE = float(os.getenv("VBOXTREE_TOLERANCE", "1e-9"))

# Sampled oracle
ORACLE_SAMPLES = int(os.getenv("VBOXTREE_ORACLE_SAMPLES", "10000"))
ORACLE_SLACK = float(os.getenv("VBOXTREE_ORACLE_SLACK", "0.1"))

# Grid overlay for hashed point location is skipped above this many cells
MAX_HASH_CELLS = int(os.getenv("VBOXTREE_MAX_HASH_CELLS", str(1 << 20)))

LOG_LEVEL = os.getenv("VBOXTREE_LOG_LEVEL", "WARNING")
