"""Print the golden gallery as a table: computed value, oracle value, verdict."""
import argparse

from twisted_chains.gallery import gallery_names, run_gallery


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("names", nargs="*", help=f"subset of {gallery_names()}")
    args = p.parse_args()
    results = run_gallery(args.names or None)
    width = max(len(n) for n in results)
    for name, r in results.items():
        key = "torsion" if "torsion" in r["result"] else "betti"
        print(f"{name:<{width}}  {'PASS' if r['pass'] else 'FAIL'}  "
              f"{key}={r['result'][key]}  oracle={r['oracle']}")
    raise SystemExit(0 if all(r["pass"] for r in results.values()) else 1)


if __name__ == "__main__":
    main()
