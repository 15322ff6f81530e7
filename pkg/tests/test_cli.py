import json

import numpy as np
import pytest

from idstein import cli
from idstein.errors import ConfigInvalid
from idstein.io import read_table


def run(tmp_path, *argv):
    return cli.main([*argv, "--out", str(tmp_path / "out.csv")])


class TestValidation:
    def test_empty_grid(self):
        with pytest.raises(ConfigInvalid):
            cli.validate("pareto-stable", dict(n_grid=[]))

    def test_unknown_field(self):
        with pytest.raises(ConfigInvalid):
            cli.validate("chaos-rates", dict(bogus=1))

    def test_missing_law(self):
        with pytest.raises(ConfigInvalid):
            cli.validate("catalog", {})

    def test_unknown_law(self):
        with pytest.raises(ConfigInvalid):
            cli.validate("catalog", dict(law="nope"))

    def test_grid_forms(self):
        assert cli.validate("cpa", dict(law="sas", n_grid="16..128"))["n_grid"] == [16, 32, 64, 128]
        assert cli.validate("cpa", dict(law="sas", n_grid="3,5"))["n_grid"] == [3, 5]
        assert cli.validate("identity-check", dict(law="poisson", n="1e6"))["n"] == 10 ** 6

    def test_defaults_filled(self):
        c = cli.validate("chaos-rates", {})
        assert c["K"] == 60 and c["rescale"] is True and c["seed"] == 0

    def test_hash_is_order_free(self):
        assert cli.config_hash(dict(a=1, b=2)) == cli.config_hash(dict(b=2, a=1))


class TestExitCodes:
    def test_success(self, tmp_path):
        assert run(tmp_path, "chaos-rates", "--n-max", "4") == 0
        tab = read_table(tmp_path / "out.csv")
        assert tab["n"].tolist() == [1, 2, 3, 4]

    def test_config_invalid(self, tmp_path):
        assert run(tmp_path, "pareto-stable", "--ngrid", "") == 2
        assert run(tmp_path, "chaos-rates", "--bogus", "1") == 2

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(dict(n_grid=[])))
        assert run(tmp_path, "pareto-stable", "--config", str(cfg)) == 2
        cfg.write_text(json.dumps(dict(foo=1)))
        assert run(tmp_path, "chaos-rates", "--config", str(cfg)) == 2
        cfg.write_text(json.dumps(dict(law=dict(name="gamma", params=dict(alpha=3.0)), points=5)))
        assert run(tmp_path, "catalog", "--config", str(cfg)) == 0
        meta = json.loads((tmp_path / "out.csv.json").read_text())
        assert meta["config"]["law"]["params"]["alpha"] == 3.0

    def test_bad_law_params(self, tmp_path):
        assert run(tmp_path, "catalog", "--law", "gamma", "--law-params", '{"zzz": 1}') == 2

    def test_lattice_cpa_rejected(self, tmp_path):
        assert run(tmp_path, "cpa", "--law", "poisson", "--ngrid", "16..32") == 2

    def test_numerical_failure(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("IDSTEIN_QUAD_LIMIT", "1")
        code = run(tmp_path, "rates", "--law-n", "texp", "--law-inf", "texp",
                   "--law-inf-params", '{"alpha": 1.3}', "--kind", "zerobias")
        assert code == 3
        assert "numerical failure in" in capsys.readouterr().err


class TestOutputs:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert cli.main(["identity-check", "--law", "poisson", "--lambda", "1", "--n", "2e4",
                             "--seed", "7", "--out", str(d / "x.csv")]) == 0
        assert (a / "x.csv").read_bytes() == (b / "x.csv").read_bytes()
        assert (a / "x.csv.json").read_bytes() == (b / "x.csv.json").read_bytes()

    def test_provenance(self, tmp_path):
        run(tmp_path, "dawson", "--law", "gamma", "--points", "5")
        meta = json.loads((tmp_path / "out.csv.json").read_text())
        assert set(meta["versions"]) == {"idstein", "numpy", "scipy"}
        assert len(meta["config_hash"]) == 64 and meta["seed"] == 0
        tab = read_table(tmp_path / "out.csv")
        assert np.all(tab["L"] <= tab["t"] + 1e-10)

    def test_rates_row(self, tmp_path):
        run(tmp_path, "rates", "--law-n", "gamma", "--law-inf", "gamma",
            "--law-inf-params", '{"alpha": 2.1}')
        tab = read_table(tmp_path / "out.csv")
        assert tab["total"][0] == pytest.approx(0.1, abs=1e-12)

    def test_bias_check(self, tmp_path):
        assert run(tmp_path, "bias-check", "--law", "gamma", "--kind", "zero", "--n", "2e4") == 0

    def test_cpa(self, tmp_path):
        assert run(tmp_path, "cpa", "--law", "sas", "--ngrid", "16..64") == 0
        meta = json.loads((tmp_path / "out.csv.json").read_text())
        assert meta["predicted_slope"] == pytest.approx(-2 / 3)

    @pytest.mark.slow
    def test_pareto_stable_slope(self, tmp_path):
        assert run(tmp_path, "pareto-stable", "--alpha", "1.5", "--ngrid", "16..4096") == 0
        meta = json.loads((tmp_path / "out.csv.json").read_text())
        assert abs(meta["slope"] + 1 / 3) <= 0.15

    @pytest.mark.slow
    def test_gwlt(self, tmp_path):
        assert run(tmp_path, "gwlt", "--target", "gamma", "--summand", '{"dist": "expon"}',
                   "--n", "64", "--samples", "20000") == 0
        tab = read_table(tmp_path / "out.csv")
        assert tab["total"][0] > tab["lower_estimate"][0]
