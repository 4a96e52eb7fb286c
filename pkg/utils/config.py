"""
Configuration: environment variables, search bounds, oracle tolerances.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# ── Exact scalars ────────────────────────────────────────────
MAX_ALGEBRAIC_DEGREE = int(os.getenv("NILQI_MAX_ALGEBRAIC_DEGREE", "8"))
ROOT_PRECISION = int(os.getenv("NILQI_ROOT_PRECISION", "50"))   # digits for root selection

# ── Invariants ───────────────────────────────────────────────
POWER_BOUND = int(os.getenv("NILQI_POWER_BOUND", "12"))
WEIGHT_ORDER = os.getenv("NILQI_WEIGHT_ORDER", "asc")            # "asc" | "desc"
RATE_DIRECTION = os.getenv("NILQI_RATE_DIRECTION", "forward")    # "forward" | "backward"

WEIGHT_ORDERS = {"asc", "desc"}
DIRECTIONS = {"forward", "backward"}

# ── Numeric oracle ───────────────────────────────────────────
ORACLE_T_MIN = int(os.getenv("NILQI_ORACLE_T_MIN", "10"))
ORACLE_T_MAX = int(os.getenv("NILQI_ORACLE_T_MAX", "40"))
ORACLE_MIN_POINTS = int(os.getenv("NILQI_ORACLE_MIN_POINTS", "8"))
ORACLE_BASE_TOL = float(os.getenv("NILQI_ORACLE_BASE_TOL", "0.05"))      # relative
ORACLE_DEGREE_TOL = float(os.getenv("NILQI_ORACLE_DEGREE_TOL", "0.3"))   # absolute

# ── Storage ──────────────────────────────────────────────────
DATA_DIR = os.getenv("DATA_DIR", "data")
DATA_ROOT = Path(DATA_DIR)
CORPUS_DIR = DATA_ROOT / "corpus"

# ── Input limits ─────────────────────────────────────────────
MAX_FILE_SIZE_MB = int(os.getenv("NILQI_MAX_FILE_SIZE_MB", "5"))
ALLOWED_EXTENSIONS = {".json"}

# ── Logging ──────────────────────────────────────────────────
LOG_LEVEL = os.getenv("NILQI_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
