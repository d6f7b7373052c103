from __future__ import annotations

import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from foonforge.client import ModelResponse, ReplayClient
from foonforge.errors import FixtureMissError, ManifestError
from foonforge.foon.tree_json import parse_task_tree_json, serialize_task_tree_json
from foonforge.foon.validation import validate_task_tree
from foonforge.pipeline import (
    FallbackReason,
    Outcome,
    OutputRecord,
    load_run_report,
    read_manifest,
    run_generation,
    sanitize_filename,
    strip_code_fence,
    handle_response,
)
from foonforge.prompts import DishSpec, Strategy, render_for_dish

from .graphgen import random_task_tree


@pytest.fixture()
def dish() -> DishSpec:
    return DishSpec("pasta", "mac and cheese", ("macaroni", "cheese"), ("pot",))


def _tree_response(tree) -> ModelResponse:
    return ModelResponse(serialize_task_tree_json(tree))


def test_read_sample_manifest(sample_manifest_path):
    manifest = read_manifest(sample_manifest_path)
    assert len(manifest.categories) == 2
    assert manifest.dish_count == 3
    names = [dish.name for dish in manifest.dishes()]
    assert names == ["mac and cheese", "spaghetti aglio e olio", "omelette"]


def test_duplicate_dish_rejected(tmp_path):
    payload = {
        "categories": [
            {"name": "a", "dishes": [{"name": "Pasta", "ingredients": ["x"]}]},
            {"name": "b", "dishes": [{"name": "pasta ", "ingredients": ["y"]}]},
        ]
    }
    path = tmp_path / "m.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ManifestError, match="duplicate dish"):
        read_manifest(path)


@pytest.mark.parametrize(
    "payload, fragment",
    [
        ({"categories": []}, "/categories"),
        ({"categories": [{"name": "a", "dishes": [{"name": "x"}]}]}, "/categories/0/dishes/0/ingredients"),
        ({"categories": [{"dishes": []}]}, "/categories/0/name"),
        ([], "manifest must be"),
    ],
)
def test_manifest_schema_errors_carry_pointers(tmp_path, payload, fragment):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ManifestError) as exc_info:
        read_manifest(path)
    assert fragment in str(exc_info.value)


def test_manifest_json_syntax_error(tmp_path):
    path = tmp_path / "m.json"
    path.write_text("{nope", encoding="utf-8")
    with pytest.raises(ManifestError, match="not valid JSON"):
        read_manifest(path)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("Mac & Cheese", "mac_and_cheese"),
        ("  Crème Brûlée!! ", "cr_me_br_l_e"),
        ("", "unnamed"),
        ("___", "unnamed"),
        ("a" * 300, "a" * 120),
    ],
)
def test_sanitize_filename_rules(raw, expected):
    assert sanitize_filename(raw) == expected


@given(st.text(max_size=200))
def test_sanitize_filename_idempotent(raw):
    once = sanitize_filename(raw)
    assert sanitize_filename(once) == once
    assert len(once) <= 120


def test_strip_code_fence_variants():
    assert strip_code_fence('```json\n{"a": 1}\n```') == '{"a": 1}'
    assert strip_code_fence("```\ntext\n```") == "text"
    assert strip_code_fence("no fence") == "no fence"
    assert strip_code_fence("before ```x``` after") == "before ```x``` after"


def test_handle_response_valid_tree(tmp_path, dish):
    tree = parse_task_tree_json(
        json.dumps(
            {
                "goal": {"name": "mac and cheese"},
                "functional_units": [
                    {
                        "inputs": [{"name": "macaroni"}, {"name": "cheese"}],
                        "motion": "mix",
                        "outputs": [{"name": "mac and cheese"}],
                    }
                ],
            }
        )
    )
    record = handle_response(_tree_response(tree), dish, tmp_path)
    assert record.outcome is Outcome.JSON_OK
    assert record.output_path == "pasta/mac_and_cheese.json"
    written = (tmp_path / record.output_path).read_text(encoding="utf-8")
    assert parse_task_tree_json(written) == tree


def test_handle_response_fenced_json_lenient_vs_strict(tmp_path, dish):
    tree = random_task_tree(random.Random(0))
    fenced = ModelResponse(f"```json\n{serialize_task_tree_json(tree)}\n```")
    ok = handle_response(fenced, dish, tmp_path / "lenient")
    assert ok.outcome is Outcome.JSON_OK
    strict = handle_response(fenced, dish, tmp_path / "strict", lenient_json=False)
    assert strict.outcome is Outcome.TEXT_FALLBACK
    assert strict.fallback_reason is FallbackReason.JSON_SYNTAX


@pytest.mark.parametrize(
    "text, reason",
    [
        ("Sure! Here is your recipe: boil and enjoy.", FallbackReason.JSON_SYNTAX),
        ("[1, 2, 3]", FallbackReason.SCHEMA),
        ('{"functional_units": []}', FallbackReason.SCHEMA),
        (
            json.dumps(
                {
                    "goal": {"name": "phantom"},
                    "functional_units": [
                        {"inputs": [{"name": "a"}], "motion": "mix", "outputs": [{"name": "b"}]}
                    ],
                }
            ),
            FallbackReason.STRUCTURAL,
        ),
    ],
)
def test_handle_response_fallback_categories(tmp_path, dish, text, reason):
    record = handle_response(ModelResponse(text), dish, tmp_path)
    assert record.outcome is Outcome.TEXT_FALLBACK
    assert record.fallback_reason is reason
    assert record.output_path.endswith(".txt")
    assert (tmp_path / record.output_path).read_text(encoding="utf-8") == text


def test_output_record_consistency_enforced(dish):
    with pytest.raises(ValueError):
        OutputRecord(dish, Strategy.CONTEXTUAL, Outcome.JSON_OK, "", "x.json")
    with pytest.raises(ValueError):
        OutputRecord(dish, Strategy.CONTEXTUAL, Outcome.TEXT_FALLBACK, "", "x.txt")


def _manifest_from(tmp_path, payload):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return read_manifest(path)


def _fixture_for(manifest, strategy, responses, **render_kwargs):
    fixture = {}
    for dish, text in zip(manifest.dishes(), responses):
        bundle = render_for_dish(strategy, dish, **render_kwargs)
        fixture[bundle.context_hash] = {"text": text, "finish_reason": "complete"}
    return fixture


def test_run_generation_single_dish(tmp_path, dish):
    manifest = _manifest_from(
        tmp_path,
        {
            "categories": [
                {
                    "name": "pasta",
                    "dishes": [
                        {"name": "mac and cheese", "ingredients": ["macaroni", "cheese"], "tools": ["pot"]}
                    ],
                }
            ]
        },
    )
    tree = random_task_tree(random.Random(1))
    fixture = _fixture_for(
        manifest, Strategy.USER_GUIDED, [serialize_task_tree_json(tree)], instructions="hi"
    )
    report = run_generation(
        manifest,
        Strategy.USER_GUIDED,
        ReplayClient(fixture),
        tmp_path / "out",
        instructions="hi",
    )
    assert (report.total, report.json_ok, report.text_fallback) == (1, 1, 0)
    assert (tmp_path / "out" / "run_report.json").is_file()
    assert (tmp_path / "out" / report.records[0].output_path).is_file()


def test_empty_fixture_yields_model_error_fallbacks(tmp_path, sample_manifest_path):
    manifest = read_manifest(sample_manifest_path)
    report = run_generation(
        manifest,
        Strategy.CONTEXTUAL,
        ReplayClient({}),
        tmp_path / "out",
    )
    assert report.total == 3
    assert report.json_ok == 0
    for record in report.records:
        assert record.fallback_reason is FallbackReason.MODEL_ERROR
        assert "fixture miss" in record.raw_text
        assert (tmp_path / "out" / record.output_path).is_file()


def test_strict_replay_aborts_on_miss(tmp_path, sample_manifest_path):
    manifest = read_manifest(sample_manifest_path)
    with pytest.raises(FixtureMissError):
        run_generation(
            manifest,
            Strategy.CONTEXTUAL,
            ReplayClient({}),
            tmp_path / "out",
            strict_replay=True,
        )


def test_filename_collisions_get_suffixes(tmp_path):
    manifest = _manifest_from(
        tmp_path,
        {
            "categories": [
                {
                    "name": "snacks",
                    "dishes": [
                        {"name": "pa sta", "ingredients": ["a"]},
                        {"name": "pa-sta", "ingredients": ["b"]},
                    ],
                }
            ]
        },
    )
    report = run_generation(
        manifest, Strategy.CONTEXTUAL, ReplayClient({}), tmp_path / "out"
    )
    assert [r.output_path for r in report.records] == [
        "snacks/pa_sta.txt",
        "snacks/pa_sta_2.txt",
    ]


def _normalized_report(path) -> dict:
    data = json.loads(path.read_text(encoding="utf-8"))
    data.pop("started")
    data.pop("finished")
    return data


def test_replay_runs_deterministic_modulo_timestamps(tmp_path, sample_manifest_path):
    manifest = read_manifest(sample_manifest_path)
    trees = [random_task_tree(random.Random(i)) for i in range(3)]
    responses = [serialize_task_tree_json(t) for t in trees[:2]] + ["not json"]
    fixture = _fixture_for(manifest, Strategy.CONTEXTUAL, responses)

    reports = []
    for name in ("one", "two"):
        out = tmp_path / name
        run_generation(manifest, Strategy.CONTEXTUAL, ReplayClient(fixture), out)
        reports.append(_normalized_report(out / "run_report.json"))
    assert reports[0] == reports[1]

    files_one = sorted(p.relative_to(tmp_path / "one") for p in (tmp_path / "one").rglob("*.json"))
    files_two = sorted(p.relative_to(tmp_path / "two") for p in (tmp_path / "two").rglob("*.json"))
    assert files_one == files_two
    for rel in files_one:
        if rel.name == "run_report.json":
            continue
        assert (tmp_path / "one" / rel).read_bytes() == (tmp_path / "two" / rel).read_bytes()


def test_concurrency_level_does_not_change_results(tmp_path, sample_manifest_path):
    manifest = read_manifest(sample_manifest_path)
    fixture = _fixture_for(manifest, Strategy.CONTEXTUAL, ["junk"] * 3)
    serial = run_generation(
        manifest, Strategy.CONTEXTUAL, ReplayClient(fixture), tmp_path / "serial", max_in_flight=1
    )
    threaded = run_generation(
        manifest, Strategy.CONTEXTUAL, ReplayClient(fixture), tmp_path / "threaded", max_in_flight=8
    )
    assert [r.output_path for r in serial.records] == [r.output_path for r in threaded.records]
    assert [r.outcome for r in serial.records] == [r.outcome for r in threaded.records]


def test_report_round_trip_and_tree_loading(tmp_path, sample_manifest_path):
    manifest = read_manifest(sample_manifest_path)
    trees = [random_task_tree(random.Random(i + 10)) for i in range(3)]
    fixture = _fixture_for(
        manifest, Strategy.CONTEXTUAL, [serialize_task_tree_json(t) for t in trees]
    )
    out = tmp_path / "out"
    report = run_generation(manifest, Strategy.CONTEXTUAL, ReplayClient(fixture), out)
    loaded = load_run_report(out / "run_report.json")
    assert loaded.strategy is Strategy.CONTEXTUAL
    assert (loaded.total, loaded.json_ok) == (report.total, report.json_ok)
    for record in loaded.records:
        if record.outcome is Outcome.JSON_OK:
            assert record.tree is not None
            assert validate_task_tree(record.tree).ok


def test_counting_identity_always_holds(tmp_path, sample_manifest_path):
    manifest = read_manifest(sample_manifest_path)
    fixture = _fixture_for(manifest, Strategy.CONTEXTUAL, ["junk", "junk", "junk"])
    report = run_generation(manifest, Strategy.CONTEXTUAL, ReplayClient(fixture), tmp_path / "o")
    assert report.total == report.json_ok + report.text_fallback == len(report.records)
