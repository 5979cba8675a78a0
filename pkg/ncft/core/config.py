import logging
from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    PROJECT_NAME: str = "ncft"
    VERSION: str = "0.1.0"

    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # NCFT_THREADS caps parallel trials and optimizer restarts
    THREADS: int = 1
    DEFAULT_SEED: int = 0

    # Representation tolerances
    EIGEN_CLUSTER_TOL: float = 1e-8
    IRREDUCIBILITY_TOL: float = 1e-6
    UNITARITY_TOL: float = 1e-9
    HOMOMORPHISM_TOL: float = 1e-9
    ORTHOGONALITY_TOL: float = 1e-8
    INEQUIVALENCE_TOL: float = 1e-6
    DECOMPOSITION_RETRIES: int = 8
    MAX_NUMERIC_ORDER: int = 120
    EXHAUSTIVE_ASSOCIATIVITY_ORDER: int = 64

    # Norm sandwich engine
    OPTIMIZER_RESTARTS: int = 32
    OPTIMIZER_ITERATIONS: int = 400
    CERTIFICATE_POOL: int = 64
    SANDWICH_SLACK: float = 1e-12

    # Inequality checks and constant estimation
    VERDICT_SLACK: float = 1e-9
    CHECK_RESTARTS: int = 1
    CHECK_ITERATIONS: int = 150
    CHECK_POOL: int = 16
    ESTIMATE_RESTARTS: int = 0
    ESTIMATE_ITERATIONS: int = 100
    ESTIMATE_POOL: int = 8
    HILL_CLIMB_STEPS: int = 200
    DEFAULT_LEVEL: int = 2
    MAX_LEVEL: int = 3
    BOUND_TOL: float = 1e-6

    model_config = SettingsConfigDict(env_file=".env", env_prefix="NCFT_", extra="ignore")

    def tolerances(self) -> dict[str, float]:
        """Tolerances echoed into every report"""
        return {
            "eigen_cluster": self.EIGEN_CLUSTER_TOL,
            "irreducibility": self.IRREDUCIBILITY_TOL,
            "unitarity": self.UNITARITY_TOL,
            "homomorphism": self.HOMOMORPHISM_TOL,
            "orthogonality": self.ORTHOGONALITY_TOL,
            "inequivalence": self.INEQUIVALENCE_TOL,
            "sandwich_slack": self.SANDWICH_SLACK,
            "verdict_slack": self.VERDICT_SLACK,
            "bound": self.BOUND_TOL,
        }

def setup_logging(level: str | None = None):
    """Setup logging configuration"""
    log_level = getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.WARNING)
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(),
        ],
        force=True,
    )

settings = Settings()
