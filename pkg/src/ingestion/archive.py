"""
Result archive persistence.

Archives are one versioned JSON document per run, written atomically:
the document goes to a temporary file in the target directory, which is
then renamed over the destination.

Each entry carries a fingerprint of the games and fit configuration that
produced its fit, so a later run only reuses fits made from the same input.
The archive's created_at is the wall clock unless SOURCE_DATE_EPOCH is set;
only with it pinned are two archives of the same run byte-identical.
Fingerprints never include the timestamp.
"""
import datetime as dt
import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Union

from pydantic import ValidationError

from src.config import settings
from src.models import ArchiveEntry, ResultArchive, TeamSeason
from src.utils.errors import ArchiveCorruptError, ArchiveError, ArchiveVersionError
from src.utils.logging import get_logger


logger = get_logger(__name__)


def fit_fingerprint(season: TeamSeason, config: Mapping[str, Any]) -> str:
    """
    sha256 over one team's games and the fit configuration.

    Args:
        season: Games the fit is made from, in season order
        config: FitConfig.describe() of the fit

    Returns:
        Hex digest that changes with any score, date, opponent or config value
    """
    payload = {
        "team": season.team,
        "games": [[g.date.isoformat(), g.opponent, g.runs_scored, g.runs_allowed] for g in season.games],
        "config": dict(config),
    }
    document = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(document.encode("utf-8")).hexdigest()


def archive_timestamp() -> dt.datetime:
    """Creation time in UTC, pinned by SOURCE_DATE_EPOCH when set."""
    if settings.SOURCE_DATE_EPOCH is not None:
        return dt.datetime.fromtimestamp(settings.SOURCE_DATE_EPOCH, tz=dt.timezone.utc)
    return dt.datetime.now(dt.timezone.utc).replace(microsecond=0)


def new_archive(config: Dict[str, Any], entries: Iterable[ArchiveEntry]) -> ResultArchive:
    return ResultArchive(
        format_version=settings.ARCHIVE_FORMAT_VERSION,
        created_at=archive_timestamp(),
        config=config,
        entries=tuple(entries),
    )


def write_archive(path: Union[str, Path], archive: ResultArchive) -> Path:
    """
    Write an archive atomically.

    The output depends only on the archive, so it is byte-identical across
    runs when created_at is pinned through SOURCE_DATE_EPOCH.

    Args:
        path: Destination file; parent directories are created
        archive: Archive to persist

    Returns:
        The destination path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = archive.model_dump_json(indent=2) + "\n"

    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(document)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise

    logger.info("archive_written", path=str(path), entries=len(archive.entries))
    return path


def read_archive(path: Union[str, Path]) -> ResultArchive:
    """
    Load an archive written by write_archive.

    Raises:
        ArchiveError: The file does not exist
        ArchiveCorruptError: The file is not a valid archive document
        ArchiveVersionError: The format version is not supported
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ArchiveError(f"archive {path} not found")

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ArchiveCorruptError(f"archive {path} is not valid JSON: {e}")
    if not isinstance(data, dict) or "format_version" not in data:
        raise ArchiveCorruptError(f"archive {path} has no format_version")
    if data["format_version"] != settings.ARCHIVE_FORMAT_VERSION:
        raise ArchiveVersionError(
            f"archive {path} has format version {data['format_version']}, "
            f"expected {settings.ARCHIVE_FORMAT_VERSION}"
        )

    try:
        archive = ResultArchive.model_validate(data)
    except ValidationError as e:
        raise ArchiveCorruptError(f"archive {path} failed validation: {e.error_count()} errors")

    logger.debug("archive_read", path=str(path), entries=len(archive.entries))
    return archive
