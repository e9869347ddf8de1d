#!/usr/bin/env python3
"""End-to-end checks of the toolkit binary. Run from the project root."""

import json
import os
import subprocess
import sys
import tempfile
import unittest

TOOLKIT = None

GOLDEN = [
    (["protocols/buyer_seller.gp"], "buyer_seller.out", 0),
    (["protocols/buyer_seller_title_int.gp"], "buyer_seller_title_int.out", 1),
    (["protocols/buyer_seller_zero_quote.gp"], "buyer_seller_zero_quote.out", 1),
    (["protocols/race.gp"], "race.out", 1),
    (["protocols/unknown_variable.gp"], "unknown_variable.out", 1),
    (["protocols/stranded_sender.gp"], "stranded_sender.out", 1),
    (["--run", "protocols/guessing_game.gp"], "guessing_game_run.out", 0),
    (["--run", "--mode", "binary", "protocols/ping_pong.gp"], "ping_pong_binary_run.out", 0),
]


def toolkit(*args):
    return subprocess.run([TOOLKIT, *args], capture_output=True, text=True, timeout=60)


class Golden(unittest.TestCase):
    def test_reports(self):
        for args, golden, code in GOLDEN:
            with self.subTest(golden=golden):
                r = toolkit("check", *args)
                with open(os.path.join("tests", "golden", golden)) as f:
                    self.assertEqual(r.stdout, f.read())
                self.assertEqual(r.returncode, code, r.stderr)

    def test_check_is_default(self):
        self.assertEqual(toolkit("protocols/buyer_seller.gp").stdout, toolkit("check", "protocols/buyer_seller.gp").stdout)


class Usage(unittest.TestCase):
    def test_missing_file(self):
        r = toolkit("check", "protocols/does_not_exist.gp")
        self.assertEqual(r.returncode, 2)
        self.assertIn("cannot read", r.stderr)

    def test_bad_flags(self):
        self.assertEqual(toolkit("check", "--mode", "ternary", "protocols/ping_pong.gp").returncode, 2)
        self.assertEqual(toolkit("check", "--bogus", "protocols/ping_pong.gp").returncode, 2)
        self.assertEqual(toolkit("check").returncode, 2)
        self.assertEqual(toolkit("qe").returncode, 2)

    def test_help(self):
        r = toolkit("--help")
        self.assertEqual(r.returncode, 0)
        self.assertIn("check", r.stdout)

    def test_parse_error(self):
        with tempfile.NamedTemporaryFile("w", suffix=".gp", delete=False) as f:
            f.write("A -> B : k(x:int)[x>0]\nend\n")
        try:
            r = toolkit("check", f.name)
            self.assertEqual(r.returncode, 1)
            self.assertEqual(r.stdout.strip(), f"{f.name}:2:1: expected ';', found 'end'")
        finally:
            os.unlink(f.name)


class Json(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        with open("docs/report.schema.json") as f:
            cls.schema = json.load(f)

    def report(self, *args):
        r = toolkit("check", "--json", *args)
        data = json.loads(r.stdout)
        import jsonschema

        jsonschema.validate(data, self.schema)
        self.assertEqual(data["exit_code"], r.returncode)
        return data

    def test_every_protocol_validates(self):
        for args, _, code in GOLDEN:
            with self.subTest(args=args):
                self.assertEqual(self.report(*args)["exit_code"], code)

    def test_buyer_seller_fields(self):
        d = self.report("protocols/buyer_seller.gp")
        self.assertEqual(d["verdict"], "ok")
        self.assertTrue(d["global"]["well_asserted_and_linear"])
        self.assertEqual([p["participant"] for p in d["projections"]], ["B1", "B2", "S"])
        self.assertEqual(d["types"][2]["type"].split(";")[1], "b1!<q:int>[q>50]")

    def test_violation_position(self):
        d = self.report("protocols/buyer_seller_zero_quote.gp")
        v = d["typing_violations"][0]
        self.assertEqual(v["note"], "TypingSendUnsat")
        self.assertEqual(v["position"], {"line": 30, "column": 3})

    def test_trace(self):
        d = self.report("--run", "protocols/guessing_game.gp")
        guesses = [e["payload"] for e in d["trace"]["events"] if e["participant"] == "P" and e["action"] == "send"]
        self.assertEqual(guesses, ["11", "12", "13", "14", "15"])
        self.assertEqual(d["trace"]["stores"]["S"]["cpt"], 4)

    def test_seeded_runs_repeat(self):
        a = self.report("--run", "--seed", "7", "protocols/buyer_seller.gp")
        b = self.report("--run", "--seed", "7", "protocols/buyer_seller.gp")
        self.assertEqual(a["trace"], b["trace"])

    def test_trace_file(self):
        with tempfile.TemporaryDirectory() as d:
            out = os.path.join(d, "trace.json")
            r = toolkit("check", "--run", "--trace-json", out, "protocols/ping_pong.gp")
            self.assertEqual(r.returncode, 0)
            with open(out) as f:
                trace = json.load(f)
            self.assertEqual(len(trace["events"]), 6)


class Qe(unittest.TestCase):
    def test_text(self):
        r = toolkit("qe", "exists q:int. 0 < c && c <= q && q > 0")
        self.assertEqual(r.returncode, 0)
        self.assertRegex(r.stdout, r"(?m)^result: +c >= 1$")

    def test_json(self):
        r = toolkit("qe", "--json", "forall x:int. exists y:int. x = 2*y || x = 2*y + 1")
        d = json.loads(r.stdout)
        self.assertEqual(d["result"], "true")
        self.assertTrue(d["valid"])

    def test_budget(self):
        r = toolkit("qe", "--qe-budget", "10", "forall a:int. exists b:int. 3*a + 5*b = 7")
        self.assertEqual(r.returncode, 1)
        self.assertIn("budget", r.stderr)

    def test_syntax_error(self):
        self.assertNotEqual(toolkit("qe", "x +").returncode, 0)


if __name__ == "__main__":
    TOOLKIT = os.path.abspath(sys.argv.pop(1))
    unittest.main(verbosity=2)
