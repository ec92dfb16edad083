import csv
import json

import pytest

from commands import EXIT_FAILURE, EXIT_INVALID, EXIT_OK
from config import get_settings
from main import main
from schemas import AuditReport, DeepPointRunRecord, FeasibilityInstance, HalfspaceModel, LabeledInstance
from services.experiments import CSV_COLUMNS


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "instance.json"
    assert main(["gen", "feasibility", "--d", "1", "--X", "1", "--m", "20", "--seed", "3", "--out", str(path)]) == EXIT_OK
    return path


@pytest.fixture
def labeled_file(tmp_path):
    path = tmp_path / "labeled.json"
    assert main(["gen", "labeled", "--d", "1", "--X", "2", "--m", "10", "--seed", "4", "--out", str(path)]) == EXIT_OK
    return path


def test_gen_feasibility(instance_file):
    doc = FeasibilityInstance.model_validate_json(instance_file.read_text())
    assert (doc.d, doc.X) == (1, 1)
    assert len(doc.constraints) == 20 + 2


def test_gen_to_stdout(capsys):
    assert main(["gen", "labeled", "--d", "2", "--X", "2", "--m", "5", "--general-position"]) == EXIT_OK
    doc = LabeledInstance.model_validate_json(capsys.readouterr().out)
    assert len(doc.points) == 5
    assert {row[-1] for row in doc.points} <= {-1, 1}


def test_solve(instance_file, tmp_path):
    out = tmp_path / "run.json"
    assert main(["solve", "--in", str(instance_file), "--seed", "7", "--out", str(out)]) == EXIT_OK
    record = DeepPointRunRecord.model_validate_json(out.read_text())
    assert len(record.point) == 1
    assert record.size == 22
    assert 0 <= record.depth <= record.size
    assert [entry.label for entry in record.ledger] == ["coordinate-1"]
    assert record.within_budget


def test_solve_is_reproducible(instance_file, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    main(["solve", "--in", str(instance_file), "--seed", "9", "--out", str(first)])
    main(["solve", "--in", str(instance_file), "--seed", "9", "--out", str(second)])
    assert json.loads(first.read_text())["point"] == json.loads(second.read_text())["point"]


def test_learn(labeled_file, tmp_path):
    out = tmp_path / "model.json"
    assert main(["learn", "--in", str(labeled_file), "--out", str(out)]) == EXIT_OK
    model = HalfspaceModel.model_validate_json(out.read_text())
    assert model.w in (-1, 0, 1)
    assert 0 <= model.val <= 10
    assert model.to_domain().a


def test_learn_with_noise(tmp_path):
    source = tmp_path / "tiny.json"
    source.write_text(json.dumps({"d": 1, "X": 1, "points": [[1, 1], [-1, -1]]}))
    out = tmp_path / "model.json"
    args = ["learn", "--in", str(source), "--noise", "--alpha", "1", "--beta", "1", "--out", str(out)]
    assert main(args) == EXIT_OK
    assert HalfspaceModel.model_validate_json(out.read_text()).val <= 2


def test_audit_passes(tmp_path):
    source = tmp_path / "audit.json"
    source.write_text(json.dumps({"q": [0, "1/2", 3], "q_prime": [1, "-1/2", 3], "eps": 1.0}))
    out = tmp_path / "report.json"
    assert main(["audit", "--in", str(source), "--out", str(out)]) == EXIT_OK
    report = AuditReport.model_validate_json(out.read_text())
    assert report.passed and report.eps == 1.0
    assert 0 < report.max_log_ratio <= 1.0


def test_audit_eps_override(tmp_path):
    source = tmp_path / "audit.json"
    source.write_text(json.dumps({"q": [0, 0], "q_prime": [1, 0], "eps": 1.0}))
    out = tmp_path / "report.json"
    assert main(["audit", "--in", str(source), "--eps", "0.5", "--out", str(out)]) == EXIT_OK
    assert AuditReport.model_validate_json(out.read_text()).eps == 0.5


@pytest.mark.parametrize("document", [
    '{"q": [0, 0], "q_prime": [2, 0], "eps": 1.0}',
    '{"q": [0, 0], "q_prime": [0], "eps": 1.0}',
    '{"q": ["one"], "q_prime": [0], "eps": 1.0}',
    '{"q": [0, 0], ',
])
def test_audit_rejects_bad_requests(tmp_path, document):
    source = tmp_path / "audit.json"
    source.write_text(document)
    assert main(["audit", "--in", str(source)]) == EXIT_INVALID


@pytest.mark.parametrize("document", [
    '{"d": 1, "X": 1, "constraints": [[1, 0, 0]]}',
    '{"d": 1, "X": 1, "constraints": [[0, 0]]}',
    '{"d": 1, "X": 1, "constraints": []}',
    'not json',
])
def test_solve_rejects_bad_instances(tmp_path, document):
    source = tmp_path / "instance.json"
    source.write_text(document)
    assert main(["solve", "--in", str(source)]) == EXIT_INVALID


def test_invalid_privacy_parameters(instance_file):
    assert main(["solve", "--in", str(instance_file), "--delta", "0.7"]) == EXIT_INVALID
    assert main(["solve", "--in", str(instance_file), "--eps", "0"]) == EXIT_INVALID


def test_learn_rejects_bad_labels(tmp_path):
    source = tmp_path / "labeled.json"
    source.write_text(json.dumps({"d": 1, "X": 1, "points": [[1, 0]]}))
    assert main(["learn", "--in", str(source)]) == EXIT_INVALID


def test_trials_csv(tmp_path):
    out = tmp_path / "trials.csv"
    args = ["trials", "solve", "--d", "1", "--X", "1", "--m", "20", "--trials", "3", "--workers", "1",
            "--no-timing", "--out", str(out)]
    assert main(args) == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == list(CSV_COLUMNS)
    assert [row["trial"] for row in rows] == ["0", "1", "2"]
    assert {row["millis"] for row in rows} == {"0"}


def test_trials_rejects_zero_trials(tmp_path):
    args = ["trials", "learn", "--d", "1", "--X", "1", "--m", "4", "--trials", "0", "--out", str(tmp_path / "t.csv")]
    assert main(args) == EXIT_INVALID


def test_accept_single_check(capsys):
    assert main(["accept", "--only", "6", "--scale", "0.01"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 and lines[0].startswith("PASS  6")


def test_accept_unknown_check():
    assert main(["accept", "--only", "42"]) == EXIT_INVALID


def test_bad_configuration(monkeypatch):
    get_settings.cache_clear()
    monkeypatch.setenv("DFL_WORKERS", "0")
    try:
        assert main(["accept", "--only", "6", "--scale", "0.01"]) == EXIT_INVALID
    finally:
        get_settings.cache_clear()


def test_unexpected_failures_map_to_one(monkeypatch, instance_file):
    def boom(*args, **kwargs):
        raise RuntimeError("boom")

    monkeypatch.setattr("commands.handlers.find_deep_point", boom)
    assert main(["solve", "--in", str(instance_file)]) == EXIT_FAILURE
