import csv
import math

import numpy as np
import pytest

from leibenson.cli import (
    CSV_HEADER,
    ConfigError,
    RunConfig,
    dump_config,
    main,
    parse_config,
)

WORKED = ["n=3", "p=2", "q=0.5", "zeta=1.5", "sigma=2"]


def _set(*pairs):
    out = []
    for p in pairs:
        out.extend(["--set", p])
    return out


class TestConfigParsing:
    def test_file_with_comments_and_overrides(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# a comment line\n"
            "n = 4\n"
            "p = 2.5   # trailing comment\n"
            "\n"
            "q = 0.3\n"
        )
        cfg = parse_config(path.read_text(), ["p=2.0"])
        assert cfg.n == 4 and cfg.p == 2.0 and cfg.q == 0.3

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("mystery = 1\n")

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("cells = many\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("just words\n")

    def test_infinity_parses(self):
        cfg = parse_config("theta = inf\n")
        assert math.isinf(cfg.theta)

    def test_dump_round_trip(self):
        cfg = parse_config("", ["n=5", "p=2.25", "ext_tol=1e-9", "family=conformal",
                                "l=1.5", "theta=inf"])
        again = parse_config(dump_config(cfg))
        assert again.values == cfg.values


class TestParamsCommand:
    def test_worked_example_admissible(self, capsys):
        code = main(["params"] + _set(*WORKED, "l=1.9", "regime=prop-4.6"))
        out = capsys.readouterr().out
        assert code == 0
        assert "0.46875" in out and "conjectural" in out
        assert "admissible" in out

    def test_inadmissible_l(self):
        assert main(["params"] + _set(*WORKED, "l=1.5", "regime=prop-4.6")) == 2

    def test_degenerate_exponents(self, capsys):
        assert main(["params"] + _set("p=2", "q=1")) == 1
        assert "error" in capsys.readouterr().err

    def test_report_only_without_l(self):
        assert main(["params"] + _set(*WORKED)) == 0

    def test_dump_config_exits_zero(self, capsys):
        assert main(["params", "--dump-config"] + _set("n=5")) == 0
        assert "n = 5" in capsys.readouterr().out


class TestSimulateCommand:
    def test_zero_initial_state(self, tmp_path, capsys):
        out = tmp_path / "zero.csv"
        code = main(["simulate"] + _set("u0=zero", "l=1.5", "cells=16",
                                        f"out_path={out}"))
        assert code == 0
        assert "extinction_time = 0" in capsys.readouterr().out
        rows = list(csv.reader(out.open()))
        assert rows[0] == CSV_HEADER and len(rows) == 2

    def test_horizon_reached_exit_code(self, tmp_path):
        out = tmp_path / "short.csv"
        code = main(["simulate"] + _set(
            "l=1.5", "zeta=1.5", "sigma=2", "cells=64", "R_max=8",
            "stepper=implicit", "t_max=0.01", "record_every=0.005",
            f"out_path={out}"))
        assert code == 3
        rows = list(csv.reader(out.open()))
        assert rows[0] == CSV_HEADER and len(rows) == 4  # t = 0, 0.005, 0.01

    def test_full_run_summary_and_trace(self, tmp_path, capsys):
        out = tmp_path / "run.csv"
        code = main(["simulate"] + _set(
            "l=1.5", "zeta=1.5", "sigma=2", "cells=128", "R_max=12",
            "stepper=implicit", "t_max=1.2", "record_every=0.01",
            "sobolev_constant=0.1", f"out_path={out}"))
        text = capsys.readouterr().out
        assert code == 0
        assert "extinction_time =" in text
        assert "fitted decay rate" in text
        assert "lower-bound prediction" in text
        rows = list(csv.reader(out.open()))
        assert rows[0] == CSV_HEADER
        data = np.array([[float(x) for x in row] for row in rows[1:]])
        assert np.all(np.diff(data[:, 0]) > 0)  # times increase
        assert np.all(np.diff(data[:, 2]) <= 1e-12 * data[0, 2])  # Phi decays
        # 17 significant digits survive a write/read cycle
        assert data[0, 2] == float(f"{data[0, 2]:.17g}")

    def test_rejects_unknown_stepper(self):
        assert main(["simulate"] + _set("l=1.5", "stepper=leapfrog")) == 1


class TestVerifyExactCommand:
    def test_default_profile_passes(self, capsys):
        code = main(["verify-exact"] + _set("l=1.5"))
        out = capsys.readouterr().out
        assert code == 0
        assert "order >= 1" in out

    def test_inadmissible_profile(self, capsys):
        assert main(["verify-exact"] + _set("l=0.5")) == 1
        assert "error" in capsys.readouterr().err

    def test_short_extinction_reports_zero_region(self, capsys):
        code = main(["verify-exact"] + _set("l=1.5", "T=0.5"))
        out = capsys.readouterr().out
        assert code == 0
        assert "identically-zero region" in out


class TestFinitenessCommand:
    CH = ["family=ch_polynomial", "alpha=3", "n=3", "p=2", "q=0.5", "zeta=1.5"]

    def test_finite_verdict(self, capsys):
        code = main(["finiteness"] + _set(*self.CH, "l=1.9"))
        assert code == 0
        assert "finite" in capsys.readouterr().out

    def test_infinite_verdict(self, capsys):
        code = main(["finiteness"] + _set(*self.CH, "l=1.5"))
        assert code == 2
        assert "infinite" in capsys.readouterr().out

    def test_origin_singularity_is_input_error(self, capsys):
        code = main(["finiteness"] + _set(*self.CH, "l=1.9", "rho=power"))
        assert code == 1
        assert "origin" in capsys.readouterr().err

    def test_sup_norm_mode(self, capsys):
        code = main(["finiteness"] + _set(
            "family=conformal", "l=1.5", "rho=one", "theta=inf"))
        assert code == 0
        assert "sup" in capsys.readouterr().out


class TestSobolevProbeCommand:
    def test_reports_lower_bound(self, capsys):
        code = main(["sobolev-probe"] + _set("probe_cells=256"))
        out = capsys.readouterr().out
        assert code == 0
        assert "C >=" in out and "maximizing profile" in out
