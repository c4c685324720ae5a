"""
Report serialization and the bundled sample data.
"""
import json

import pytest

from datasource.results_store import ResultsStore, format_float, load_presets, to_csv, to_json
from models.response_models import SCHEMA_VERSION, ClusterRecord, SpectrumReport


def _report() -> SpectrumReport:
    cluster = ClusterRecord(lambda_F=104.36, multiplicity=1, indices=[1], eigenvalues=[104.36], n_list=[0],
                            parities=["cos"], labels=["n=0 cos"])
    return SpectrumReport(problem="dirichlet", tau=0.0, sigma=0.3, R=1.0, domain={"disk": 1.0},
                          solver="bessel", clusters=[cluster])


class TestFormatting:

    def test_floats_round_trip(self):
        assert format_float(1.0) == "1.0"
        assert format_float(0.1) == "0.10000000000000001"
        assert float(format_float(104.36309)) == 104.36309
        assert format_float(1e20) == "1e+20"

    def test_non_finite_becomes_null(self):
        assert format_float(float("nan")) == "null"
        assert format_float(float("inf")) == "null"

    def test_nested_layout(self):
        assert to_json({"a": [1.0, 2]}) == '{\n  "a": [1.0, 2]\n}'
        assert to_json([]) == "[]"
        assert to_json({"flag": True, "none": None}) == '{\n  "flag": true,\n  "none": null\n}'

    def test_report_uses_schema_alias(self):
        text = to_json(_report())
        data = json.loads(text)
        assert data["schema"] == SCHEMA_VERSION
        assert "schema_version" not in data
        assert data["report"] == "spectrum"
        assert to_json(_report()) == text

    def test_unknown_types_rejected(self):
        with pytest.raises(TypeError):
            to_json(object())

    def test_csv_rows(self):
        text = to_csv(["t", "lambda"], [[0.0, 1.5], [0.1, 2.0]])
        assert text == "t,lambda\n0.0,1.5\n0.10000000000000001,2.0\n"


class TestResultsStore:

    def test_writes_lf_files(self, tmp_path):
        path = tmp_path / "nested" / "table.csv"
        ResultsStore(str(path)).write_table(["a", "b"], [[1, 2.0]])
        assert path.read_bytes() == b"a,b\n1,2.0\n"

    def test_report_to_stdout(self, capsys):
        ResultsStore().write_report(_report())
        out = capsys.readouterr().out
        assert out.endswith("}\n")
        record = json.loads(out)["clusters"][0]
        assert record["lambda"] == 104.36
        assert "lambda_F" not in record
        assert (record["n_list"], record["parities"]) == ([0], ["cos"])


class TestPresets:

    @pytest.mark.parametrize("lemma", ["dM", "dB", "dL", "dDet", "dJ1", "dJ2", "dJ3"])
    def test_five_presets_per_identity(self, lemma):
        presets = load_presets(lemma)
        assert len(presets) == 5
        assert all(p.chart.base_radius > 0 for p in presets)

    def test_unknown_identity(self):
        with pytest.raises(KeyError):
            load_presets("dX")
