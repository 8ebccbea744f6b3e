import pathlib

import pytest
from click.testing import CliRunner

from ..utils import assert_click_exit, assert_click_success
from fakpcli.commands.gen import gen


def test_gen(small_overrides):
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(gen, small_overrides + ["--seed", "5",
                                                       "-o", "run"])
        assert_click_success(result)
        data = pathlib.Path("run") / "data"
        assert "train: " in result.output
        assert "Duration" in result.output

        manifest = (data / "train" / "manifest.txt").read_text().splitlines()
        assert len(manifest) == 6
        assert manifest[0] == "train-sphere-0000 0 train-sphere-0000.xyz"
        assert len((data / "test" / "manifest.txt").read_text()
                   .splitlines()) == 6

        cloud = (data / "train" / "train-box-0000.xyz").read_text()
        assert len(cloud.splitlines()) == 16
        assert len(cloud.splitlines()[0].split()) == 6

        config = (data / "config.txt").read_text()
        assert "seed=5\n" in config
        assert "points_per_cloud=16\n" in config


def test_gen_is_reproducible(small_overrides):
    runner = CliRunner()
    with runner.isolated_filesystem():
        for out in ("a", "b"):
            assert_click_success(runner.invoke(gen, small_overrides
                                               + ["-o", out]))
        name = pathlib.Path("data") / "test" / "test-torus-0000.xyz"
        assert (pathlib.Path("a") / name).read_bytes() == \
            (pathlib.Path("b") / name).read_bytes()


@pytest.mark.parametrize('args', [
    ["--set", "points_per_cloud=4"],
    ["--set", "epochs"],
])
def test_gen_bad_configuration(args):
    runner = CliRunner()
    with runner.isolated_filesystem():
        result = runner.invoke(gen, args)
        assert_click_exit(result, 2)
        assert not pathlib.Path("fakp-output").exists()
