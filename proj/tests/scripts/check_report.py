"""Validates a JSON report against the report schema.

Usage: check_report.py SCHEMA.json REPORT.json
"""
import json
import sys

import jsonschema


def main():
    with open(sys.argv[1]) as f:
        schema = json.load(f)
    with open(sys.argv[2]) as f:
        report = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(report), key=lambda e: list(e.path))
    for e in errors:
        print("FAIL:", "/".join(map(str, e.path)), e.message)
    if errors:
        return 1
    print("OK: report matches schema")
    return 0


if __name__ == "__main__":
    sys.exit(main())
