#!/usr/bin/env python3
"""Sample external forecaster: naive with average drift.

Reads one JSON request on stdin, answers one JSON line on stdout. Start
from this file when wiring your own model into the benchmark:

    [[model]]
    id = "drift-naive"
    kind = "external"
    command = "python3"
    args = ["adapters/drift_naive.py"]
"""

import json
import sys


def main() -> None:
    try:
        request = json.loads(sys.stdin.readline())
        values = request["train_values"]
        horizon = request["horizon"]
        if request.get("protocol") != 1:
            raise ValueError(f"unsupported protocol {request.get('protocol')}")
        if not values:
            raise ValueError("empty training window")
        # Last value plus the mean one-step change, extrapolated.
        drift = (values[-1] - values[0]) / max(1, len(values) - 1)
        forecast = [values[-1] + drift * (k + 1) for k in range(horizon)]
        print(json.dumps({"forecast": forecast}))
    except Exception as exc:  # noqa: BLE001 - report everything in-protocol
        print(json.dumps({"error": str(exc)}))


if __name__ == "__main__":
    main()
