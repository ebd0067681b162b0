"""Selection strings such as 'all', '1-3' or '1,4'."""

from typing import Iterable, List

from .errors import InvalidParameters


def parse_selection(selection: str, available: Iterable[int]) -> List[int]:
    """Parse a selection string into a sorted list of ids.

    Args:
        selection: String like "1-2", "1,3" or "all"
        available: Ids that may be selected

    Returns:
        Sorted, de-duplicated list of selected ids
    """
    available = sorted(set(available))
    if selection.strip().lower() == "all":
        return available

    chosen = []
    for part in selection.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                start, end = part.split("-", 1)
                chosen.extend(range(int(start.strip()), int(end.strip()) + 1))
            else:
                chosen.append(int(part))
        except ValueError:
            raise InvalidParameters(f"cannot parse selection {selection!r}") from None

    unknown = sorted(set(chosen) - set(available))
    if unknown:
        raise InvalidParameters(
            f"selection {selection!r} names unknown ids {unknown}; available: {available}"
        )
    if not chosen:
        raise InvalidParameters(f"selection {selection!r} is empty")
    return sorted(set(chosen))
