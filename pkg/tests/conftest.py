"""Shared fixtures: golden-value store under tests/golden/."""

import json
from pathlib import Path

import pytest

GOLDEN_DIR = Path(__file__).parent / "golden"
GOLDEN_VALUES = GOLDEN_DIR / "values.json"


@pytest.fixture
def golden():
    """Keyed golden scalars: the first run records, later runs compare.

    golden(name, value) returns the stored value for `name`, writing
    `value` if the key is new.  Regenerate deliberately with
    scripts/bless_goldens.py (which deletes the store before a run).
    """

    def fetch(name: str, value: float) -> float:
        GOLDEN_DIR.mkdir(exist_ok=True)
        store = {}
        if GOLDEN_VALUES.exists():
            store = json.loads(GOLDEN_VALUES.read_text())
        if name not in store:
            store[name] = float(value)
            GOLDEN_VALUES.write_text(json.dumps(store, indent=2, sort_keys=True) + "\n")
        return store[name]

    return fetch


@pytest.fixture
def repo_root():
    return Path(__file__).resolve().parents[1]
