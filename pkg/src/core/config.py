from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Numeric defaults and verification tolerances"""

    model_config = SettingsConfigDict(env_prefix="CURVES_", env_file=".env", extra="ignore")

    # Frames
    tol_ortho: float = 1e-9

    # Solver
    steps_per_unit: int = 10000
    min_steps: int = 16
    renormalize_every: int = 1

    # Thresholds
    eps_kappa: float = 1e-12
    eps_inflection: float = 1e-8  # relative to max sampled curvature
    eps_inflection_floor: float = 1e-12
    eps_radius: float = 1e-10  # relative to max Lancret curvature
    eps_domain: float = 1e-6

    # Rationality policy
    rational_max_denominator: int = 10**6
    rational_window: float = 1e-12
    angle_rational_max_denominator: int = 1000
    angle_rational_window: float = 1e-8

    # Sampling used when a rule-backed field has to be put on a grid
    analysis_steps: int = 20000

    # Verification tolerances (every report echoes the one it used)
    closure_tol: float = 1e-5
    orthonormality_tol: float = 1e-10
    unit_speed_tol: float = 1e-6
    frenet_consistency_tol: float = 1e-4
    total_curvature_tol: float = 1e-6
    total_torsion_tol: float = 1e-6
    hyperboloid_tol: float = 1e-4
    classify_tol: float = 1e-6
    periodicity_tol: float = 1e-8

    # Development settings
    log_level: str = "INFO"


# Create settings instance
settings = Settings()
