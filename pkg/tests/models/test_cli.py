import contextlib
import io
import os
import tempfile
from typing import Final, List, Tuple
import unittest

from two_patch_allee.models.cli import PatchCli, apply_overrides, resolve_config
from two_patch_allee.models.patches import NormalizedParams, PatchParams, ReactionKind
from two_patch_allee.utils.errors import UsageError

RESOURCES: Final = os.path.join(os.path.dirname(__file__), "..", "resources")


def run(*argv: str) -> Tuple[int, str]:
    """Run the cli without reading $ALLEE_CONFIG_PATH and capture stdout."""
    cli = PatchCli(default_config_path="")
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = cli.run(list(argv))
    return code, out.getvalue()


def parse(*argv: str):
    cli = PatchCli(default_config_path="")
    return cli.parser.parse_args(list(argv))


class Test_PatchCli(unittest.TestCase):
    def test_commands(self):
        cli = PatchCli(default_config_path="")
        names: List[str] = [command["name"] for command in cli.commands]
        self.assertEqual(
            names,
            [
                "help",
                "equilibria",
                "sawtooth",
                "check",
                "sweep",
                "simulate",
                "mixing",
                "extinction",
                "basins",
            ],
        )
        assert all(callable(command["callback"]) for command in cli.commands)

    def test_help(self):
        code, text = run("help")
        self.assertEqual(code, 0)
        assert text.startswith("List of all commands:")
        assert "  sweep" in text

    def test_exit_codes(self):
        self.assertEqual(run("check", "thm-main")[0], 0)
        self.assertEqual(run("check", "thm-main", "--k2", "0.5")[0], 2)
        self.assertEqual(
            run(
                "check",
                "sawtooth-predicate",
                "--reaction",
                "sawtooth",
                "--alpha",
                "1",
                "--beta",
                "1",
                "--gamma",
                "0.6",
            )[0],
            1,
        )
        self.assertEqual(run("check", "corollary", "--reaction", "logistic")[0], 1)
        self.assertEqual(run()[0], 1)
        self.assertEqual(run("check", "not-a-certificate")[0], 1)
        self.assertEqual(run("equilibria", "--bogus")[0], 1)
        self.assertEqual(run("equilibria", "--D", "2", "--alpha", "1")[0], 1)
        self.assertEqual(run("equilibria", "--threads", "0")[0], 1)
        self.assertEqual(run("equilibria", "--D", "0")[0], 1)

    def test_check_report(self):
        code, text = run("check", "corollary", "--alpha", "1", "--beta", "1", "--gamma", "0.45")
        self.assertEqual(code, 2)
        assert text.startswith("certificate corollary\n")
        assert text.endswith("verdict fails\n")

    def test_config_file(self):
        path = os.path.join(RESOURCES, "thm_main.yaml")
        self.assertEqual(run("check", "thm-main", "--config", path)[0], 0)
        invalid = os.path.join(RESOURCES, "invalid_d.yaml")
        self.assertEqual(run("equilibria", "--config", invalid)[0], 1)
        missing = os.path.join(RESOURCES, "missing.yaml")
        self.assertEqual(run("equilibria", "--config", missing)[0], 1)

    def test_equilibria(self):
        code, text = run("equilibria", "--alpha", "1", "--beta", "1", "--gamma", "1")
        self.assertEqual(code, 0)
        lines = text.splitlines()
        self.assertEqual(len(lines), 4)
        assert lines[1].startswith("0,0,")

    def test_equilibria_image(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "nullclines.svg")
            code, text = run("equilibria", "--gamma", "0.4", "--svg", path)
            self.assertEqual(code, 0)
            with open(path, encoding="utf-8") as source:
                assert "<title>Nullclines, alpha=1, beta=1, gamma=0.4</title>" in source.read()
        self.assertEqual(text.splitlines()[0].split(",")[:2], ["x", "y"])

    def test_sawtooth(self):
        code, text = run("sawtooth", "--alpha", "1", "--beta", "1", "--gamma", "0.4")
        self.assertEqual(code, 0)
        assert len(text.splitlines()) >= 3

    def test_sweep_files(self):
        with tempfile.TemporaryDirectory() as directory:
            csv_path = os.path.join(directory, "map.csv")
            svg_path = os.path.join(directory, "map.svg")
            code, text = run(
                "sweep", "--range", "0.5:1.5:2", "--csv", csv_path, "--svg", svg_path
            )
            self.assertEqual(code, 0)
            assert "thm-main,4,0,0,0,1" in text.splitlines()
            with open(csv_path, encoding="utf-8") as source:
                self.assertEqual(len(source.read().splitlines()), 5)
            with open(svg_path, encoding="utf-8") as source:
                assert "<svg" in source.read()

    def test_sweep_options(self):
        code, text = run(
            "sweep",
            "--plane",
            "alpha-beta",
            "--gamma",
            "0.4",
            "--reaction",
            "sawtooth",
            "--x-range",
            "0.5:1.5:2",
            "--y-range",
            "0.5:1.5:3",
            "--no-certificates",
        )
        self.assertEqual(code, 0)
        self.assertEqual(text.splitlines()[0], "count,fraction")
        assert "certificate" not in text
        self.assertEqual(run("sweep", "--range", "0:4")[0], 1)

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "trajectory.csv")
            code, text = run("simulate", "--t-end", "1", "--out", path)
            self.assertEqual(code, 0)
            self.assertEqual(text, "")
            with open(path, encoding="utf-8") as source:
                lines = source.read().splitlines()
            self.assertEqual(lines[0], "t,x1,x2")
            assert lines[-1].startswith("# terminal t-max")

    def test_sampling_commands(self):
        code, text = run("extinction", "--samples", "3", "--seed", "5", "--threads", "2")
        self.assertEqual(code, 0)
        assert text.splitlines()[1].startswith("5,3,1,")
        code, text = run(
            "basins", "--alpha", "1", "--beta", "1", "--gamma", "1", "--samples", "4"
        )
        self.assertEqual(code, 0)
        assert text.splitlines()[-1].endswith("seed 0")
        code, text = run(
            "mixing",
            "--reaction",
            "logistic",
            "--lambda1",
            "2",
            "--lambda2",
            "1",
            "--k1",
            "2",
            "--k2",
            "1",
            "--D-list",
            "1,10",
        )
        self.assertEqual(code, 0)
        self.assertEqual(len(text.splitlines()), 3)
        self.assertEqual(run("mixing")[0], 1)

    def test_swapped_config(self):
        path = os.path.join(RESOURCES, "swapped.yaml")
        with self.assertLogs("TwoPatchAllee", level="WARNING") as logs:
            code, text = run("simulate", "--config", path, "--t-end", "1")
        self.assertEqual(code, 0)
        assert any("patches exchanged" in line for line in logs.output)
        lines = text.splitlines()
        self.assertEqual(lines[1], "0,1,0.25")
        assert lines[-2].startswith("# swapped: k2 > k1")
        assert lines[-1].startswith("# terminal t-max")

    def test_unswapped_footer(self):
        code, text = run("simulate", "--t-end", "1")
        self.assertEqual(code, 0)
        assert "# swapped" not in text


class Test_Overrides(unittest.TestCase):
    def test_default_model(self):
        config = resolve_config(parse("equilibria"))
        self.assertEqual(config.model, PatchParams(1.0, 1.0, 1.0, 1.0, 1 / 3))
        self.assertEqual(config.reaction, ReactionKind.cubic())

    def test_normalized_flags_convert(self):
        config = resolve_config(parse("equilibria", "--gamma", "0.25"))
        self.assertEqual(config.model, NormalizedParams(1.0, 1.0, 0.25))

    def test_physical_flags_convert(self):
        symmetric = os.path.join(RESOURCES, "symmetric.yaml")
        base = resolve_config(parse("equilibria", "--config", symmetric))
        config = apply_overrides(base, parse("equilibria", "--D", "2"))
        self.assertEqual(config.model, PatchParams(2.0, 1.0, 1.0, 1.0, 1.0))
        self.assertEqual(config.seed, 3)

    def test_reaction_flags(self):
        config = resolve_config(parse("equilibria", "--a", "0.3"))
        self.assertEqual(config.reaction, ReactionKind.cubic(0.3))
        self.assertEqual((config.model.a1, config.model.a2), (0.3, 0.3))
        config = resolve_config(parse("equilibria", "--reaction", "logistic", "--seed", "4"))
        self.assertEqual(config.reaction, ReactionKind.logistic())
        self.assertEqual(config.seed, 4)
        config = resolve_config(parse("equilibria", "--coupling", "balanced"))
        self.assertEqual(config.coupling.value, "balanced")

    def test_mixed_flags(self):
        with self.assertRaises(UsageError):
            resolve_config(parse("equilibria", "--k1", "2", "--beta", "1"))

    def test_swap_survives_overrides(self):
        path = os.path.join(RESOURCES, "swapped.yaml")
        config = resolve_config(parse("equilibria", "--config", path))
        self.assertEqual(config.model, PatchParams(1.0, 3.0, 1.0, 1.0, 0.25))
        assert config.model.swapped
        config = resolve_config(parse("equilibria", "--config", path, "--D", "2", "--a", "0.4"))
        self.assertEqual(config.model, PatchParams(2.0, 3.0, 1.0, 1.0, 0.25, 0.4, 0.4))
        assert config.model.swapped

    def test_flags_name_configured_patches(self):
        path = os.path.join(RESOURCES, "swapped.yaml")
        config = resolve_config(parse("equilibria", "--config", path, "--k1", "2"))
        self.assertEqual(config.model, PatchParams(1.0, 1.0, 3.0, 2.0, 1.0))
        assert not config.model.swapped
        config = resolve_config(parse("equilibria", "--k2", "3"))
        self.assertEqual(config.model, PatchParams(1.0, 1.0, 1.0, 3.0, 1.0))
        assert config.model.swapped
