"""Configuration management for the HDG multisymplecticity workbench."""

from typing import Optional

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class NewtonConfig(BaseModel):
    """Newton iteration settings."""
    tol: float = 1e-12
    max_iter: int = 25
    linear_tol: float = 1e-12


class QuadratureConfig(BaseModel):
    """Quadrature degree settings."""
    cell_extra_degree: int = 6
    facet_extra_degree: int = 4
    max_degree: int = 24


class ToleranceConfig(BaseModel):
    """Verification gate tolerances."""
    closedness: float = 1e-8
    local: float = 1e-9
    strong: float = 1e-9
    conservativity: float = 1e-10
    jump: float = 1e-10
    schur: float = 1e-12
    reciprocity: float = 1e-10


class CampaignConfig(BaseModel):
    """Verification campaign settings."""
    seed: int = 0
    region_samples: int = 10
    concurrency: int = 2
    output_dir: str = "reports"


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="HDG_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Newton
    newton_tol: float = Field(1e-12, description="Relative residual tolerance")
    newton_max_iter: int = Field(25, ge=1)
    linear_tol: float = Field(1e-12, description="Relative linear-solve residual")

    # Quadrature
    cell_quadrature_extra: int = Field(6, ge=0)
    facet_quadrature_extra: int = Field(4, ge=0)
    max_quadrature_degree: int = Field(24, ge=1)

    # Bases
    max_degree: int = Field(4, ge=0)
    allow_high_degree: bool = False

    # Local solvers
    default_penalty: float = 1.0
    singular_block_cond: float = 1e13

    # Verification tolerances
    closedness_tol: float = 1e-8
    local_tol: float = 1e-9
    strong_tol: float = 1e-9
    conservativity_tol: float = 1e-10
    jump_tol: float = 1e-10
    schur_tol: float = 1e-12
    reciprocity_tol: float = 1e-10

    # Campaigns
    seed: int = 0
    region_samples: int = Field(10, ge=0)
    campaign_concurrency: int = Field(2, ge=1)
    output_dir: str = "reports"

    # Logging
    log_level: str = "INFO"
    log_format: Optional[str] = None

    @property
    def newton_config(self) -> NewtonConfig:
        """Get Newton configuration."""
        return NewtonConfig(
            tol=self.newton_tol,
            max_iter=self.newton_max_iter,
            linear_tol=self.linear_tol,
        )

    @property
    def quadrature_config(self) -> QuadratureConfig:
        """Get quadrature configuration."""
        return QuadratureConfig(
            cell_extra_degree=self.cell_quadrature_extra,
            facet_extra_degree=self.facet_quadrature_extra,
            max_degree=self.max_quadrature_degree,
        )

    @property
    def tolerance_config(self) -> ToleranceConfig:
        """Get verification tolerances."""
        return ToleranceConfig(
            closedness=self.closedness_tol,
            local=self.local_tol,
            strong=self.strong_tol,
            conservativity=self.conservativity_tol,
            jump=self.jump_tol,
            schur=self.schur_tol,
            reciprocity=self.reciprocity_tol,
        )

    @property
    def campaign_config(self) -> CampaignConfig:
        """Get campaign configuration."""
        return CampaignConfig(
            seed=self.seed,
            region_samples=self.region_samples,
            concurrency=self.campaign_concurrency,
            output_dir=self.output_dir,
        )


# Global settings instance
settings = Settings()
