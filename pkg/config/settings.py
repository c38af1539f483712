# config/settings.py
import os
from pathlib import Path
from dotenv import load_dotenv

# Base directory
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables from .env file
dotenv_path = BASE_DIR / '.env'
load_dotenv(dotenv_path=dotenv_path)

# Data directories
DATA_DIR = BASE_DIR / "data"
OUTPUT_DIR = DATA_DIR / "output"
LOG_DIR = BASE_DIR / "logs"

# Create directories if they don't exist
for directory in [DATA_DIR, OUTPUT_DIR]:
    directory.mkdir(parents=True, exist_ok=True)

# Logging
LOG_LEVEL = os.environ.get("TCF_LOG_LEVEL", "INFO")
SHOW_PROGRESS = os.environ.get("TCF_PROGRESS", "1") != "0"

# Tree learning
DEFAULT_KAPPA = float(os.environ.get("TCF_KAPPA", 0.01))  # Model prior kappa^f
KAPPA_GRID = (1.0, 0.1, 0.01, 0.001, 0.0001)
TUNING_HOLDOUT_FRACTION = 0.2

# Transformations
DEFAULT_BINS = 2
DEFAULT_PREFIX_MODE = True
DEFAULT_HISTORY_LENGTH = 1

# Cluster baseline (EM)
DEFAULT_CLUSTER_CLASSES = 8
EM_MAX_ITERATIONS = 200
EM_TOLERANCE = 1e-6
EM_SMOOTHING = 1.0  # Laplace pseudo-count in the M-step
EM_RESTARTS = 1

# Evaluation
DEFAULT_ALPHA = float(os.environ.get("TCF_ALPHA", 10.0))  # CF accuracy half-life
EVAL_CHUNK_ROWS = 4096

# Runs
DEFAULT_SEED = int(os.environ.get("TCF_SEED", 0))
DEFAULT_THREADS = int(os.environ.get("TCF_THREADS", 1))
DEFAULT_TEST_FRACTION = 0.2
DEFAULT_TOP_N = 10

# Experiment protocol: (label, transform, bins, history length)
EXPERIMENT_FAMILIES = (
    ("Baseline", "bag", None, None),
    ("2 Bins", "bin", 2, None),
    ("4 Bins", "bin", 4, None),
    ("DE-1", "expand", None, 1),
    ("DE-3", "expand", None, 3),
    ("DE-5", "expand", None, 5),
)

# Model document
MODEL_FORMAT = "temporal-cf-model"
MODEL_FORMAT_VERSION = 1
