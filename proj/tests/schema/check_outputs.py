"""Validates every --json output of the CLI against docs/report-schema.json.

usage: check_outputs.py GALIGN_BINARY SOURCE_DIR
"""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema


def main():
    binary, source = sys.argv[1], sys.argv[2]
    schema = json.load(open(os.path.join(source, "docs", "report-schema.json")))
    jsonschema.Draft202012Validator.check_schema(schema)
    ref = os.path.join(source, "models", "reference.galign")
    fixtures = os.path.join(source, "tests", "fixtures")

    with tempfile.TemporaryDirectory() as tmp:
        library = os.path.join(tmp, "lib.jsonl")
        subprocess.run([binary, "library", "add", "--library", library, "--id", "E1",
                        "--focus", "Lead Time", "--estimated", "3 months", "--actual", "2 months"],
                       check=True, capture_output=True)
        cases = [
            ("evaluation_report", ["eval", ref, "--json"]),
            ("evaluation_report", ["eval", ref, "--json", "--no-confidence", "--or-policy", "best"]),
            ("validation", ["validate", ref, "--json"]),
            ("validation", ["validate", os.path.join(fixtures, "cycle.galign"), "--json"]),
            ("validation", ["validate", os.path.join(fixtures, "syntax-errors.galign"), "--json"]),
            ("attribution", ["attribute", ref, "--from", "R3", "--to", "O7", "--json"]),
            ("attribution", ["attribute", ref, "--from", "R2", "--to", "O4", "--json"]),
            ("priorities", ["prioritize", ref, "--json"]),
            ("priorities", ["prioritize", ref, "--objectives", "O6,O7", "--json"]),
            ("diff", ["whatif", ref, "--set-confidence", "F=1", "--exclude", "R2", "--json"]),
            ("prompts", ["prompts", ref, "--json"]),
            ("prompts", ["prompts", os.path.join(fixtures, "non-canonical-confidence.galign"), "--json"]),
            ("library", ["library", "query", "lead", "--library", library, "--json"]),
        ]
        failures = 0
        for definition, args in cases:
            result = subprocess.run([binary] + args, capture_output=True, text=True)
            sub = {"$ref": "#/$defs/" + definition, "$defs": schema["$defs"]}
            try:
                jsonschema.validate(json.loads(result.stdout), sub,
                                    cls=jsonschema.Draft202012Validator)
                print("ok   %-18s %s" % (definition, " ".join(args[:1] + args[2:])))
            except (ValueError, jsonschema.ValidationError) as e:
                failures += 1
                print("FAIL %-18s %s: %s" % (definition, " ".join(args), e))
        export = os.path.join(tmp, "report.json")
        subprocess.run([binary, "export-json", ref, "-o", export], check=True)
        jsonschema.validate(json.load(open(export)), schema, cls=jsonschema.Draft202012Validator)
        print("ok   root schema        export-json")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
