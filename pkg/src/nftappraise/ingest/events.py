"""Hand-curated significant-event annotations (CSV ``date,polarity,note``)."""

from __future__ import annotations

import csv
import datetime as dt

from ..errors import ValidationError
from .records import EventAnnotation

HEADER = ["date", "polarity", "note"]


def load_events(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != HEADER:
            raise ValidationError(f"{path}:1: expected header {','.join(HEADER)}, got {header}")
        seen = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) < 2:
                raise ValidationError(f"{path}:{lineno}: expected date,polarity,note")
            try:
                day = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: bad date {row[0]!r}") from None
            try:
                polarity = int(row[1].strip())
            except ValueError:
                polarity = None
            if polarity not in (-1, 0, 1):
                raise ValidationError(f"{path}:{lineno}: polarity {row[1]!r} not in {{-1, 0, 1}}")
            if day in seen:
                raise ValidationError(f"{path}:{lineno}: duplicate date {day} (first on line {seen[day][0]})")
            note = ",".join(row[2:]).strip()
            seen[day] = (lineno, EventAnnotation(day, polarity, note))
    return [ev for _, ev in sorted((d, v[1]) for d, v in seen.items())]


def write_events(events, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for ev in events:
            w.writerow([ev.date.isoformat(), ev.polarity, ev.note])
