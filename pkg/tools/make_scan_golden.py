"""Generate tests/data/scan_golden_1e6.json with a deliberately naive method.

Shares no code with the package: a bytearray sieve, a running prime count,
and every point evaluated directly in mpmath at 40 digits.

    python tools/make_scan_golden.py [limit] [output]
"""
import json
import sys
from pathlib import Path

from mpmath import mp, mpf

mp.dps = 40


def sieve(n):
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for p in range(2, int(n**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return flags


def main():
    limit = int(float(sys.argv[1])) if len(sys.argv) > 1 else 10**6
    out = Path(sys.argv[2]) if len(sys.argv) > 2 else Path(__file__).resolve().parents[1] / "tests/data/scan_golden_1e6.json"
    flags = sieve(limit)
    pi = [0] * (limit + 1)
    c = 0
    for n in range(limit + 1):
        c += flags[n]
        pi[n] = c
    e = mp.e
    bad = []
    for x in range(2, limit + 1):
        m = int(mp.floor(mpf(x) / e))
        g = mpf(pi[x]) ** 2 - e * x / mp.log(x) * pi[m]
        if g >= 0:
            bad.append(x)
    runs = []
    for x in bad:
        if runs and runs[-1][1] == x - 1:
            runs[-1][1] = x
        else:
            runs.append([x, x])
    data = {"lo": 2, "hi": limit, "violations": runs, "violation_count": len(bad),
            "largest_violation": bad[-1] if bad else None, "generator": "tools/make_scan_golden.py"}
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(data, indent=0) + "\n")
    print(f"{len(runs)} runs, {len(bad)} integers, largest {data['largest_violation']} -> {out}")


if __name__ == "__main__":
    main()
