"""Validates fmcheck --json output and every service endpoint against schema/fmcheck.schema.json.

usage: validate_schemas.py FMCHECK_BINARY MODELS_DIR SCHEMA_FILE
"""

import json
import re
import subprocess
import sys
import urllib.error
import urllib.request

import jsonschema


def validator(schema, name):
    root = dict(schema)
    root["$ref"] = "#/$defs/" + name
    return jsonschema.Draft202012Validator(root)


def check(schema, name, document, label):
    errors = sorted(validator(schema, name).iter_errors(document), key=str)
    if errors:
        print(f"FAIL {label}: {errors[0].message}")
        return False
    print(f"ok   {label}")
    return True


def run_cli(binary, *args):
    proc = subprocess.run([binary, "--json", *args], capture_output=True, text=True, check=False)
    return json.loads(proc.stdout)


def request(base, method, path, body=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(base + path, data=data, method=method,
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def main():
    binary, models, schema_path = sys.argv[1:4]
    with open(schema_path, encoding="utf-8") as fh:
        schema = json.load(fh)
    jsonschema.Draft202012Validator.check_schema(schema)

    ok = True
    cad = f"{models}/cad_partial.fm"
    cfg = f"{models}/configs"
    for model in ("cad_partial", "cad_full", "dead_feature", "void_model"):
        ok &= check(schema, "analysis", run_cli(binary, "analyze", "--count", f"{models}/{model}.fm"),
                    f"analyze {model}")
        ok &= check(schema, "encode", run_cli(binary, "encode", f"{models}/{model}.fm"), f"encode {model}")
        ok &= check(schema, "count", run_cli(binary, "count", f"{models}/{model}.fm"), f"count {model}")
        ok &= check(schema, "enumerate", run_cli(binary, "enumerate", f"{models}/{model}.fm"),
                    f"enumerate {model}")
    for example in ("example1", "example2", "example2_raw", "example3"):
        ok &= check(schema, "check", run_cli(binary, "check", cad, f"{cfg}/cad_partial.{example}.cfg"),
                    f"check {example}")

    server = subprocess.Popen([binary, "serve", models, "--port", "0"], stderr=subprocess.PIPE, text=True)
    try:
        port = None
        for line in server.stderr:
            match = re.search(r"listening on http://[^:]+:(\d+)", line)
            if match:
                port = match.group(1)
                break
        if port is None:
            print("FAIL server did not start")
            return 1
        base = f"http://127.0.0.1:{port}"

        _, body = request(base, "GET", "/api/health")
        ok &= check(schema, "health", body, "GET /api/health")
        _, body = request(base, "GET", "/api/models")
        ok &= check(schema, "model_list", body, "GET /api/models")
        for name in ("CADPartial", "CADFull", "DeadFeature", "VoidModel"):
            _, body = request(base, "GET", f"/api/models/{name}/tree")
            ok &= check(schema, "tree", body, f"GET tree {name}")
            _, body = request(base, "GET", f"/api/models/{name}/analysis?count=true")
            ok &= check(schema, "analysis", body, f"GET analysis {name}")

        status, body = request(base, "POST", "/api/sessions", {"model": "CADPartial"})
        ok &= status == 201 and check(schema, "session_created", body, "POST /api/sessions")
        sid = body["session_id"]
        status, body = request(base, "POST", f"/api/sessions/{sid}/decide", {"feature": "v1.2", "decision": "select"})
        ok &= status == 200 and check(schema, "session_state", body, "decide v1.2")
        status, body = request(base, "POST", f"/api/sessions/{sid}/decide",
                               {"feature": "v2.3.1", "decision": "select"})
        ok &= status == 409 and check(schema, "decide_conflict", body, "decide v2.3.1 (409)")
        _, body = request(base, "GET", f"/api/sessions/{sid}")
        ok &= check(schema, "session_state", body, "GET session")

        status, body = request(base, "POST", "/api/sessions", {"model": "VoidModel"})
        ok &= check(schema, "session_state", body["state"], "void session with conflict")

        for method, path, payload, expected in (
            ("GET", "/api/models/Nope/tree", None, 404),
            ("GET", "/api/sessions/nope", None, 404),
            ("POST", "/api/sessions", {"model": 1}, 400),
            ("POST", f"/api/sessions/{sid}/decide", {"feature": "v9", "decision": "select"}, 404),
            ("GET", "/api/unknown", None, 404),
        ):
            status, body = request(base, method, path, payload)
            ok &= status == expected and check(schema, "error", body, f"{method} {path} -> {expected}")
    finally:
        server.terminate()
        server.wait(timeout=10)

    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
