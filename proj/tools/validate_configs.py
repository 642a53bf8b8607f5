"""Checks JSON configs against the run-config schema."""

import argparse
import json
import sys

import jsonschema


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("schema")
    parser.add_argument("configs", nargs="+")
    args = parser.parse_args()
    with open(args.schema, encoding="utf-8") as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    failed = 0
    for path in args.configs:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for err in errors:
            where = "/" + "/".join(str(p) for p in err.path)
            print(f"{path}: {where}: {err.message}", file=sys.stderr)
        failed += bool(errors)
    print(f"{len(args.configs) - failed}/{len(args.configs)} configs valid")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
