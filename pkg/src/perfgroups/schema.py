"""Access to the JSON schemas shipped with the package (one per CLI report kind)."""

from __future__ import annotations

import json
from importlib.resources import files
from typing import Dict, List


def schema_names() -> List[str]:
    return sorted(p.name[: -len(".schema.json")] for p in files(__package__).joinpath("schemas").iterdir()
                  if p.name.endswith(".schema.json"))


def load_schema(name: str) -> Dict:
    return json.loads(files(__package__).joinpath("schemas", f"{name}.schema.json").read_text())
