"""Output helpers."""

from .output import records_to_csv, records_to_json, write_text

__all__ = ["records_to_csv", "records_to_json", "write_text"]
