"""Data models for documents, reports and campaigns."""

from .campaign import (
    BoundaryKind,
    BoundarySpec,
    CampaignEntry,
    MeshKind,
    MeshSpec,
    PenaltySpec,
    RegionSamplerSpec,
    ToleranceOverrides,
    VerifyCampaign,
)
from .mesh_document import MeshDocument
from .report import CounterexampleRecord, MeshStats, MsclReport, StrongEntryModel, SubCheck
from .serialization import dumps, format_float

__all__ = [
    # Documents
    "MeshDocument",
    "dumps",
    "format_float",

    # Reports
    "SubCheck",
    "CounterexampleRecord",
    "StrongEntryModel",
    "MeshStats",
    "MsclReport",

    # Campaigns
    "VerifyCampaign",
    "CampaignEntry",
    "MeshKind",
    "MeshSpec",
    "PenaltySpec",
    "BoundaryKind",
    "BoundarySpec",
    "RegionSamplerSpec",
    "ToleranceOverrides",
]
