"""Compare the compiled closure kernel against the pure NumPy fallback.

Runs the sign-vector enumeration (circuits, closure under composition,
canonicalization) on two bundled models with each backend and prints the
timings side by side.  The four-state independence model is enumerated in
full; the 2x3x3 independence model is far too large for a full run here, so
it is enumerated up to a fixed class cap, which still times the identical
code path on meaningful volume.  The fallback is exercised in a subprocess
with DIVMAX_NO_EXT=1 so the import-time backend choice is actually re-made.

Usage: python3 benchmarks/closure_benchmark.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time

CASES = (("four_two", 0), ("two_three_three", 20000))


def run_case(name, cap):
    from divmax import (
        CapExceeded,
        bundled_models,
        circuits,
        enumerate_sign_vectors,
    )

    model = bundled_models()[name].model
    out = {"name": name, "cap": cap}

    t0 = time.perf_counter()
    circs = circuits(model)
    out["circuits_s"] = time.perf_counter() - t0
    out["n_circuits"] = len(circs)

    t0 = time.perf_counter()
    try:
        classes = enumerate_sign_vectors(model, mode="closure", cap=cap or None)
        out["n_classes"] = len(classes)
        out["capped"] = False
    except CapExceeded as exc:
        out["n_classes"] = exc.count
        out["capped"] = True
    out["closure_s"] = time.perf_counter() - t0
    return out


def best_of(repeat):
    from divmax import backend_name

    results = {"backend": backend_name(), "cases": []}
    for name, cap in CASES:
        runs = [run_case(name, cap) for _ in range(repeat)]
        best = dict(runs[0])
        for r in runs[1:]:
            for k in ("circuits_s", "closure_s"):
                best[k] = min(best[k], r[k])
        results["cases"].append(best)
    return results


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.emit_json:
        print(json.dumps(best_of(args.repeat)))
        return 0

    here = best_of(args.repeat)

    env = dict(os.environ, DIVMAX_NO_EXT="1")
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__),
         "--repeat", str(args.repeat), "--emit-json"],
        capture_output=True, text=True, env=env, check=True,
    )
    other = json.loads(proc.stdout)
    if here["backend"] == other["backend"]:
        print(f"both runs used the {here['backend']} backend; "
              "is the compiled extension built?")
        return 1

    status = 0
    print(f"best of {args.repeat}")
    print(f"{'model':18} {'backend':10} {'classes':>9} "
          f"{'circuits':>10} {'closure':>10}")
    for hc, oc in zip(here["cases"], other["cases"]):
        note = " (capped)" if hc["capped"] else ""
        for label, c in ((here["backend"], hc), (other["backend"], oc)):
            print(f"{c['name']:18} {label:10} {c['n_classes']:>9} "
                  f"{c['circuits_s']:>9.3f}s {c['closure_s']:>9.3f}s")
        if (hc["n_classes"], hc["n_circuits"]) != (oc["n_classes"], oc["n_circuits"]):
            print(f"MISMATCH on {hc['name']}: "
                  f"{hc['n_classes']}/{hc['n_circuits']} vs "
                  f"{oc['n_classes']}/{oc['n_circuits']}")
            status = 1
        else:
            slow = max(hc["closure_s"], oc["closure_s"])
            fast = min(hc["closure_s"], oc["closure_s"])
            winner = here["backend"] if hc["closure_s"] <= oc["closure_s"] \
                else other["backend"]
            print(f"{'':18} -> {winner} {slow / max(fast, 1e-9):.1f}x "
                  f"faster{note}")
    return status


if __name__ == "__main__":
    sys.exit(main())
