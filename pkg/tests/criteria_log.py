"""Shared record of acceptance results, printed at the end of the run."""

CRITERIA: dict = {}


def record(number: int, ok: bool, detail: str = ""):
    CRITERIA[number] = (ok, detail)
    print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
