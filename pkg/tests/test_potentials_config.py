import numpy as np
import pytest

from transmutation import potentials as P
from transmutation.config import ConfigError, RunConfig, parse_key_values
from transmutation.errors import DomainError
from transmutation.grid import Grid, l1_norm, write_csv


@pytest.fixture
def g():
    return Grid(1.0, 100)


class TestPotentials:
    def test_step_convention(self, g):
        q = P.step(g)
        assert q.values[g.center] == 0.5
        assert np.all(q.values[:g.center] == 0) and np.all(q.values[g.center + 1:] == 1)

    def test_smoothed_step_limits(self, g):
        q = P.smoothed_step(g, 0.2)
        assert q.values[0] == 0 and q.values[-1] == 1
        assert q.values[g.center] == 0.5
        assert np.all(np.diff(q.values.real) >= 0)

    def test_smoothed_step_converges(self):
        g = Grid(1.0, 2000)
        d = [l1_norm(P.smoothed_step(g, 1 / m) - P.step(g)) for m in (4, 16, 64)]
        assert d[0] > d[1] > d[2]

    def test_polynomial(self, g):
        np.testing.assert_allclose(P.polynomial(g, [1, 0, 2]).values, 1 + 2 * g.nodes**2)

    @pytest.mark.parametrize("text, expect", [
        ("zero", lambda x: 0 * x), ("const:2.5", lambda x: 2.5 + 0 * x),
        ("poly:0,1", lambda x: x), ("step:3:0.5", lambda x: np.where(x > 0.5, 3.0, np.where(x == 0.5, 1.5, 0.0))),
    ])
    def test_descriptors(self, g, text, expect):
        np.testing.assert_allclose(P.parse_descriptor(g, text).values, expect(g.nodes))

    def test_csv_descriptor(self, tmp_path, g):
        fine = Grid(1.0, 400)
        write_csv(fine.sample(np.cos), tmp_path / "q.csv")
        q = P.parse_descriptor(g, f"csv:{tmp_path / 'q.csv'}")
        assert np.max(np.abs(q.values - np.cos(g.nodes))) <= 1e-5

    def test_csv_must_cover(self, tmp_path, g):
        write_csv(Grid(0.5, 10).sample(np.cos), tmp_path / "q.csv")
        with pytest.raises(DomainError):
            P.from_csv(g, tmp_path / "q.csv")

    @pytest.mark.parametrize("text", ["sqrt", "const:abc", "step:1:left", "poly:"])
    def test_bad_descriptors(self, g, text):
        with pytest.raises(DomainError):
            P.parse_descriptor(g, text)


class TestConfig:
    def test_parse(self):
        text = "# comment\na = 2\n\npotential = step:1:0   # trailing\n"
        assert parse_key_values(text) == {"a": "2", "potential": "step:1:0"}

    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.n == 1000 and cfg.spec == (1, 0, 0, 1)

    def test_mapping(self):
        cfg = RunConfig.from_mapping({"n": "40", "lambdas": "1, -2+3j", "spec": "1,2,0,1"})
        assert cfg.n == 40
        assert cfg.lambdas == (1, -2 + 3j)
        assert cfg.spec == (1, 2, 0, 1)

    @pytest.mark.parametrize("mapping, field", [
        ({"n": "7"}, "n:"), ({"a": "-1"}, "a:"), ({"spec": "1,2"}, "spec:"),
        ({"n": "ten"}, "n:"), ({"wat": "1"}, "wat:"), ({"lambda_min": "1"}, "lambda_min:"),
    ])
    def test_errors_name_the_field(self, mapping, field):
        with pytest.raises(ConfigError, match=field):
            RunConfig.from_mapping(mapping)
