"""Regenerate the frontend conformance fixtures from the Python service.

The UI computes ground-truth handle angles locally with the same slope
formula the service uses; this script freezes reference values so the
frontend test suite can verify the two implementations agree.

Usage: python3 scripts/generate_ui_fixtures.py
"""

import json
import math
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from spinecurve.cobb import angle_between_slopes
from spinecurve.service import create_app

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def slope_pair_cases():
    rng = np.random.default_rng(424242)
    cases = [
        {"s1": 1.0, "s2": -1.0},      # singular denominator -> 90
        {"s1": 0.0, "s2": 0.0},       # parallel -> 0
        {"s1": 1.0, "s2": 0.0},       # 45
        {"s1": 0.5, "s2": -0.5},
        {"s1": math.tan(math.radians(25.0)), "s2": -math.tan(math.radians(15.0))},
    ]
    for _ in range(40):
        cases.append(
            {"s1": float(rng.uniform(-2.5, 2.5)), "s2": float(rng.uniform(-2.5, 2.5))}
        )
    for case in cases:
        case["angle_deg"] = angle_between_slopes(case["s1"], case["s2"])
    return cases


def service_case():
    client = TestClient(create_app())
    ys = np.linspace(0.0, 400.0, 17)
    points = [
        [120.0 + 25.0 * math.sin(2.0 * math.pi * y / 400.0), float(y)] for y in ys
    ]
    response = client.post("/angles", json={"points": points})
    response.raise_for_status()
    return {"points": points, "response": response.json()}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    payload = {
        "slope_pairs": slope_pair_cases(),
        "service_case": service_case(),
    }
    target = OUT / "conformance.json"
    target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
