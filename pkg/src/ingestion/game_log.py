"""
Game-log parsing for the Pythagorean Weibull toolkit.

A game log is UTF-8 comma-delimited text with the header

    date,team,opponent,runs_scored,runs_allowed

and one line per game from the named team's point of view. Dates are
ISO-8601 and line endings may be LF or CRLF.
"""
import csv
import datetime as dt
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from pydantic import ValidationError

from src.config import settings
from src.models import GameRecord, TeamSeason
from src.utils.errors import GameLogError
from src.utils.logging import get_logger


logger = get_logger(__name__)

HEADER = ("date", "team", "opponent", "runs_scored", "runs_allowed")


def _parse_row(row: List[str], line: int) -> Tuple[dt.date, str, str, int, int]:
    if len(row) != len(HEADER):
        raise GameLogError(f"expected {len(HEADER)} fields, got {len(row)}", line=line)
    date_text, team, opponent, scored_text, allowed_text = (field.strip() for field in row)
    try:
        date = dt.date.fromisoformat(date_text)
    except ValueError:
        raise GameLogError(f"invalid ISO date {date_text!r}", line=line)
    try:
        scored, allowed = int(scored_text), int(allowed_text)
    except ValueError:
        raise GameLogError(f"runs must be integers, got {scored_text!r} and {allowed_text!r}", line=line)
    return date, team, opponent, scored, allowed


def parse_game_log(text: str, drop_ties: bool = False) -> List[GameRecord]:
    """
    Parse game-log text into records.

    Args:
        text: File contents including the header line
        drop_ties: Skip tied games with a warning instead of rejecting the file

    Returns:
        One record per data line, in file order

    Raises:
        GameLogError: Malformed header or line, or a tie when drop_ties is off
    """
    lines = text.lstrip("\ufeff").splitlines()
    rows = csv.reader(lines)
    header = next(rows, None)
    if header is None or tuple(field.strip() for field in header) != HEADER:
        raise GameLogError(f"header must be {','.join(HEADER)}", line=1)

    records: List[GameRecord] = []
    dropped = 0
    for line, row in enumerate(rows, start=2):
        if not row or all(not field.strip() for field in row):
            continue
        date, team, opponent, scored, allowed = _parse_row(row, line)
        if scored == allowed:
            if drop_ties:
                logger.warning("tie_dropped", line=line, date=str(date), team=team, opponent=opponent)
                dropped += 1
                continue
            raise GameLogError(f"tie {scored}-{allowed} on {date} ({team} vs {opponent}); games cannot end tied", line=line)
        try:
            records.append(
                GameRecord(date=date, team=team, opponent=opponent, runs_scored=scored, runs_allowed=allowed)
            )
        except ValidationError as e:
            reason = "; ".join(err["msg"] for err in e.errors())
            raise GameLogError(reason, line=line)

    logger.debug("game_log_parsed", records=len(records), ties_dropped=dropped)
    return records


def load_game_log(path: Union[str, Path], drop_ties: bool = False) -> List[GameRecord]:
    """Read and parse a game-log file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise GameLogError(f"game log {path} not found")
    except UnicodeDecodeError as e:
        raise GameLogError(f"game log {path} is not UTF-8: {e}")
    logger.info("loading_game_log", path=str(path))
    return parse_game_log(text, drop_ties=drop_ties)


def assemble_seasons(records: Sequence[GameRecord]) -> List[TeamSeason]:
    """
    Group records into one season per team and calendar year.

    Seasons come out sorted by (team, year) with games ordered by date;
    games on the same date keep their input order. Game counts other than
    a full schedule are logged, not rejected.
    """
    grouped: Dict[Tuple[str, int], List[GameRecord]] = defaultdict(list)
    for record in records:
        grouped[(record.team, record.date.year)].append(record)

    seasons = []
    for (team, year) in sorted(grouped):
        games = sorted(grouped[(team, year)], key=lambda g: g.date)
        if len(games) != settings.EXPECTED_SEASON_GAMES:
            logger.info(
                "unusual_season_length",
                team=team,
                season=year,
                games=len(games),
                expected=settings.EXPECTED_SEASON_GAMES,
            )
        seasons.append(TeamSeason(team=team, games=tuple(games)))

    logger.info("seasons_assembled", teams=len({s.team for s in seasons}), seasons=len(seasons), games=len(records))
    return seasons
