"""Validate JSON documents against the huntkit schemas.

usage: validate.py SCHEMA DOCUMENT [DOCUMENT ...]
"""
import json
import pathlib
import sys

import jsonschema
from referencing import Registry, Resource


def main(argv):
    if len(argv) < 3:
        print(__doc__.strip(), file=sys.stderr)
        return 64
    here = pathlib.Path(__file__).resolve().parent
    resources = []
    for path in here.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
    registry = Registry().with_resources(resources)
    schema = json.loads(pathlib.Path(argv[1]).read_text())
    validator = jsonschema.Draft202012Validator(schema, registry=registry)
    failed = 0
    for name in argv[2:]:
        errors = list(validator.iter_errors(json.loads(pathlib.Path(name).read_text())))
        for e in errors:
            print(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
        failed += bool(errors)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
