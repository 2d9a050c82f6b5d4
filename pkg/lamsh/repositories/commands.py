from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import os

from lamsh.core.config import settings
from lamsh.schemas.command import CommandSpec

logger = logging.getLogger(__name__)


class CommandRepository:
    """Looks up executables on the search path.

    Hits and misses are memoized per name; the memo is dropped whenever a
    search directory's modification time changes.
    """

    def __init__(self, search_path: Optional[Sequence[str]] = None):
        self._search_path = list(search_path) if search_path is not None else None
        self._memo: Dict[str, Optional[CommandSpec]] = {}
        self._stamp: Tuple[Tuple[str, float], ...] = ()

    @property
    def search_path(self) -> List[str]:
        return self._search_path if self._search_path is not None else settings.search_path

    def _current_stamp(self) -> Tuple[Tuple[str, float], ...]:
        stamp = []
        for directory in self.search_path:
            try:
                stamp.append((directory, os.stat(directory).st_mtime))
            except OSError:
                stamp.append((directory, -1.0))
        return tuple(stamp)

    def get_by_name(self, name: str) -> Optional[CommandSpec]:
        """Resolve ``name`` to an executable, or None."""
        if not name or os.sep in name or not any(c.isalnum() for c in name):
            return None
        stamp = self._current_stamp()
        if stamp != self._stamp:
            self._memo.clear()
            self._stamp = stamp
        if name not in self._memo:
            self._memo[name] = self._search(name)
        return self._memo[name]

    def _search(self, name: str) -> Optional[CommandSpec]:
        for directory in self.search_path:
            candidate = Path(directory) / name
            if candidate.is_file() and os.access(candidate, os.X_OK):
                logger.debug(f"[PROC] {name} -> {candidate}")
                return CommandSpec(name=name, path=str(candidate))
        return None

    def exists(self, name: str) -> bool:
        return self.get_by_name(name) is not None

    def get_all_names(self) -> List[str]:
        """Executable names on the search path, for completion."""
        names = set()
        for directory in self.search_path:
            try:
                entries = os.listdir(directory)
            except OSError:
                continue
            for entry in entries:
                path = os.path.join(directory, entry)
                if os.path.isfile(path) and os.access(path, os.X_OK):
                    names.add(entry)
        return sorted(names)
