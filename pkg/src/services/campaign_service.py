"""Campaign service: runs verification entries concurrently and writes their reports."""

import asyncio
import logging
import re
from pathlib import Path
from typing import List, Optional

import aiofiles

from ..config import settings
from ..errors import ErrorHandler, WorkbenchError, global_error_handler
from ..models.campaign import CampaignEntry, VerifyCampaign
from ..models.report import MsclReport
from .verification_service import VerificationService, validate_entry

logger = logging.getLogger(__name__)


def report_filename(index: int, entry: CampaignEntry) -> str:
    slug = re.sub(r"[^A-Za-z0-9_.-]+", "_", entry.label).strip("_")
    return f"{index:03d}-{slug}.json"


class CampaignService:
    """Execute every entry of a campaign; one failing entry never aborts the rest."""

    def __init__(
        self,
        verification: Optional[VerificationService] = None,
        concurrency: Optional[int] = None,
        error_handler: Optional[ErrorHandler] = None,
    ):
        self.error_handler = error_handler or global_error_handler
        self.verification = verification or VerificationService(error_handler=self.error_handler)
        self.concurrency = concurrency or settings.campaign_config.concurrency

    def validate(self, campaign: VerifyCampaign) -> None:
        """Resolve every entry against the builtin catalogs."""
        for entry in campaign.entries:
            validate_entry(entry)

    async def run(self, campaign: VerifyCampaign, output_dir: Optional[Path] = None) -> List[MsclReport]:
        """Run all entries (bounded concurrency) and write reports in entry order."""
        self.validate(campaign)
        verification = self.verification
        if campaign.seed is not None:
            verification = VerificationService(verification.tolerances, campaign.seed, self.error_handler)
        overrides = campaign.tolerances.present()
        if overrides:
            verification = verification.with_overrides(overrides)

        semaphore = asyncio.Semaphore(self.concurrency)

        async def run_one(entry: CampaignEntry) -> MsclReport:
            async with semaphore:
                return await asyncio.to_thread(verification.run_entry, entry)

        logger.info(f"Running campaign with {len(campaign.entries)} entries (concurrency {self.concurrency})")
        results = await asyncio.gather(*(run_one(entry) for entry in campaign.entries), return_exceptions=True)

        reports: List[MsclReport] = []
        for entry, result in zip(campaign.entries, results):
            if isinstance(result, BaseException):
                error = self.error_handler.handle_error(result, {"entry": entry.label}, entry=entry.label)
                result = MsclReport(
                    name=entry.label,
                    method=entry.method,
                    degree=entry.degree,
                    system=entry.system,
                    expect_strong_fail=entry.expect_strong_fail,
                    error=f"{error.error_code}: {error.message}",
                )
            reports.append(result)

        target = output_dir or Path(campaign.output or settings.campaign_config.output_dir)
        await self.write_reports(campaign, reports, target)
        passed = sum(report.passed for report in reports)
        logger.info(f"Campaign finished: {passed}/{len(reports)} entries pass")
        return reports

    async def write_reports(self, campaign: VerifyCampaign, reports: List[MsclReport], directory: Path) -> List[Path]:
        """Write one report per entry, one file at a time."""
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise WorkbenchError(f"cannot create report directory {directory}: {e}", original_error=e)
        paths = []
        for index, (entry, report) in enumerate(zip(campaign.entries, reports)):
            path = directory / report_filename(index, entry)
            async with aiofiles.open(path, "w", encoding="utf-8") as handle:
                await handle.write(report.to_json() + "\n")
            paths.append(path)
        logger.debug(f"Wrote {len(paths)} reports to {directory}")
        return paths


def campaign_passed(reports: List[MsclReport]) -> bool:
    return all(report.passed and report.error is None for report in reports)
