"""
config.py
=========
Numerical and I/O settings for the workbench, read once from the environment
(a .env file in the project root is honoured).
"""

import os
from dotenv import load_dotenv

load_dotenv()


class WorkbenchConfig:
    """Configuration settings shared by every module"""
    # Absolute tolerance on unit-normalised data
    TOL = float(os.getenv("WB_TOL", 1e-10))
    FAITHFUL_THRESHOLD = float(os.getenv("WB_FAITHFUL_THRESHOLD", 1e-12))
    CONDITIONING_WARN = float(os.getenv("WB_CONDITIONING_WARN", 1e-8))
    DISCARD_THRESHOLD = float(os.getenv("WB_DISCARD_THRESHOLD", 1e-12))

    # Algebra closure guards
    MAX_AMBIENT_DIM = int(os.getenv("WB_MAX_AMBIENT_DIM", 16))
    MAX_CLOSURE_ROUNDS = int(os.getenv("WB_MAX_CLOSURE_ROUNDS", 50))

    # |beta * h| above this makes exp(beta h) overflow-prone
    EXP_SAFE_BOUND = float(os.getenv("WB_EXP_SAFE_BOUND", 700.0))
    POSITIVITY_SAMPLES = int(os.getenv("WB_POSITIVITY_SAMPLES", 100))

    # Geometry
    HORIZON_BAND = float(os.getenv("WB_HORIZON_BAND", 1e-12))
    NULL_BAND = float(os.getenv("WB_NULL_BAND", 1e-12))
    DS_TAU_MAX = float(os.getenv("WB_DS_TAU_MAX", 2.0))

    # Gaussian states
    SYMPLECTIC_FLOOR = float(os.getenv("WB_SYMPLECTIC_FLOOR", 1e-12))
    BW_WINDOW = int(os.getenv("WB_BW_WINDOW", 10))

    # Runs and output
    SEED = int(os.getenv("WB_SEED", 0))
    OUT_DIR = os.getenv("WB_OUT_DIR", "out")
    LOG_DIR = os.getenv("WB_LOG_DIR", "logs")
    LOG_LEVEL = os.getenv("WB_LOG_LEVEL", "INFO")
