from datetime import datetime, timezone

ISO_FORMAT = "%Y-%m-%dT%H:%M:%S.%fZ"


def current_utc() -> datetime:
    return datetime.now(timezone.utc)


def to_utc_str(dttm: datetime, format: str = ISO_FORMAT) -> str:
    return dttm.astimezone(timezone.utc).strftime(format)
