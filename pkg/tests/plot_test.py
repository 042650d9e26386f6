import pytest

from heislab.common.exceptions import ConfigurationError
from heislab.common.testing import HeislabTestCase
from heislab.format import Format, JsonFormat
from heislab.plot import (
    Figure,
    Series,
    SvgFormat,
    load_series,
    plot,
    render_svg,
    series_from_csv,
    series_from_report,
)


class TestRender(HeislabTestCase):
    def test_single_point(self):
        svg = render_svg(Figure([Series("only", [1.0], [2.0])]))
        assert svg.startswith('<?xml version="1.0"')
        assert svg.rstrip().endswith("</svg>")
        assert svg.count("<circle") == 1
        assert "<polyline" not in svg

    def test_series_and_legend(self):
        figure = Figure(
            [Series("a & b", [1, 2, 3], [1, 4, 9]), Series("c", [1, 2], [2, 2], line=False)],
            title="growth <n>",
            x_label="level",
        )
        svg = render_svg(figure)
        assert svg.count('<g class="series"') == 2
        assert 'data-label="a &amp; b"' in svg
        assert "growth &lt;n&gt;" in svg
        assert svg.count("<polyline") == 1
        assert svg.count("<circle") == 5

    def test_log_axes(self):
        svg = render_svg(Figure([Series("s", [1, 10, 100], [1, 2, 3])], log_x=True))
        assert "x (log)" in svg
        with pytest.raises(ConfigurationError):
            render_svg(Figure([Series("s", [0, 1], [1, 2])], log_x=True))
        with pytest.raises(ConfigurationError):
            render_svg(Figure([Series("s", [1, 2], [-1, 2])], log_y=True))

    def test_invalid_series(self):
        with pytest.raises(ConfigurationError):
            Series("empty", [], [])
        with pytest.raises(ConfigurationError):
            Series("ragged", [1, 2], [1])
        with pytest.raises(ConfigurationError):
            render_svg(Figure([]))
        with pytest.raises(ConfigurationError):
            render_svg(Figure([Series("s", [1, 2], [1, float("inf")])]))

    def test_svg_format(self):
        assert Format.by_name("svg") is SvgFormat
        path = self.TEST_DIR / "figure.svg"
        figure = plot([Series("s", [1, 2], [3, 4])], path, title="t")
        assert path.read_text() == render_svg(figure)
        with pytest.raises(ConfigurationError):
            SvgFormat().read(path)


class TestLoaders(HeislabTestCase):
    def test_csv(self):
        path = self.TEST_DIR / "series.csv"
        path.write_text("label,x,y\na,1,2\nb,1,5\na,2,3\n")
        series = series_from_csv(path)
        assert [s.label for s in series] == ["a", "b"]
        assert series[0].x == [1.0, 2.0]
        assert series[0].y == [2.0, 3.0]
        assert load_series(path) == (series, {})

    def test_csv_errors(self):
        path = self.TEST_DIR / "series.csv"
        path.write_text("name,x,y\na,1,2\n")
        with pytest.raises(ConfigurationError):
            series_from_csv(path)
        path.write_text("label,x,y\na,one,2\n")
        with pytest.raises(ConfigurationError):
            series_from_csv(path)
        path.write_text("label,x,y\na,1\n")
        with pytest.raises(ConfigurationError):
            series_from_csv(path)

    def test_distortion_report(self):
        report = {
            "command": "distortion",
            "result": {
                "rows": [
                    {"level": 1, "distortion": 1.2, "curve": 4.1},
                    {"level": 2, "distortion": 1.3, "curve": 4.2},
                ]
            },
        }
        series, labels = series_from_report(report)
        assert [s.label for s in series] == ["measured", "(M+n)^(1/4) sqrt(log2(M+n))"]
        assert series[0].y == [1.2, 1.3]
        assert labels["x_label"] == "level n"

    def test_markov_report(self):
        report = {
            "command": "markov",
            "result": {
                "rows": [
                    {"level": 1, "p": 2.0, "ratio_pi": 0.9},
                    {"level": 1, "p": 4.0, "ratio_pi": 0.8},
                    {"level": 2, "p": 2.0, "ratio_pi": 0.95},
                ]
            },
        }
        series, _ = series_from_report(report)
        assert [s.label for s in series] == ["p = 2", "p = 4"]
        assert series[0].x == [1.0, 2.0]

    def test_report_file(self):
        path = self.TEST_DIR / "report.json"
        rows = [{"level": 1, "distortion": 1.0, "curve": 2.0}]
        JsonFormat().write({"command": "distortion", "result": {"rows": rows}}, path)
        series, labels = load_series(path)
        assert len(series) == 2
        assert labels["y_label"] == "distortion"

    def test_unplottable_reports(self):
        with pytest.raises(ConfigurationError):
            series_from_report({"command": "embed", "result": {"rows": [{"level": 1}]}})
        with pytest.raises(ConfigurationError):
            series_from_report({"command": "distortion", "result": {"level": 1}})
