"""Services module initialization."""

from .campaign_service import CampaignService, campaign_passed, report_filename
from .verification_service import VerificationService, build_mesh, build_method, validate_entry

__all__ = [
    "VerificationService",
    "CampaignService",
    "build_mesh",
    "build_method",
    "validate_entry",
    "campaign_passed",
    "report_filename",
]
