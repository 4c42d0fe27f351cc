"""Run the randomized verification suite over several seeds and summarize."""

import argparse

from toric_poincare.verify import VerifyConfig, run_verify


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[42, 7, 2026])
    ap.add_argument("--constellations", type=int, default=50)
    ap.add_argument("--semigroups", type=int, default=20)
    ns = ap.parse_args()
    all_ok = True
    for seed in ns.seeds:
        rep = run_verify(VerifyConfig(seed=seed, constellations=ns.constellations, semigroups=ns.semigroups))
        print(rep.to_text(), end="")
        print(f"elapsed {rep.elapsed:.1f} s\n")
        all_ok &= rep.ok
    raise SystemExit(0 if all_ok else 1)


if __name__ == "__main__":
    main()
