import json
import math

import pytest

import _codirector as cd


ENV = json.dumps(
    {
        "true_values": {
            "creative_strategy": [50, 82, 40],
            "narrative_mode": [45, 52, 84],
            "aesthetic_archetype": [42, 80, 35, 50],
        },
        "noise_sigma": 5.0,
    }
)


def test_creative_space():
    dims = cd.dimensions()
    assert dims == ["creative_strategy", "narrative_mode", "aesthetic_archetype"]
    assert [len(cd.arms(d)) for d in dims] == [3, 3, 4]
    assert cd.config_space_size() == 36


def test_ucb_index():
    assert cd.ucb_index(0.5, 4, 16, 1.0) == pytest.approx(
        0.5 + math.sqrt(math.log(16) / 4)
    )


def test_bandit_policy():
    policy = cd.BanditPolicy.create(exploration_constant=1.0, mode="factored")
    assert policy.select() == (0, 0, 0)
    policy.update((0, 0, 0), (80.0, 40.0, 60.0), 60.0)
    assert policy.select() == (1, 1, 1)
    policy.update((1, 1, 1), (30.0, 90.0, 20.0), 46.7)
    state = json.loads(policy.state_json())
    assert state["mode"] == "factored"
    assert policy.best_arm("creative_strategy") == cd.arms("creative_strategy")[0][1]
    assert policy.best_arm("narrative_mode") == cd.arms("narrative_mode")[1][1]

    warm = cd.BanditPolicy.create()
    warm.warm_start([("aesthetic_archetype", 2, 95.0, 1.0)])
    with pytest.raises(ValueError):
        warm.warm_start([("aesthetic_archetype", 9, 50.0, 1.0)])


def test_report_parsers_round_trip():
    doc = {
        "score": 75.0,
        "breakdown": {
            "hook_quality": 15.0,
            "narrative_arc": 15.0,
            "product_integration": 15.0,
            "engagement": 15.0,
            "prompt_adherence": 15.0,
        },
        "score_out_of": 100,
        "feedback": "fine",
        "actionable_feedback": "tighten the hook",
    }
    parsed = json.loads(cd.parse_storyline_report(json.dumps(doc)))
    assert parsed["score"] == 75.0
    again = json.loads(cd.parse_storyline_report(json.dumps(parsed)))
    assert again == parsed

    doc["score"] = 80.0  # no longer the breakdown sum
    with pytest.raises(ValueError):
        cd.parse_storyline_report(json.dumps(doc))
    with pytest.raises(ValueError):
        cd.parse_video_report("not json at all")


def test_run_experiment():
    report = json.loads(
        cd.run_experiment(ENV, policy="mab", iterations=10, repeats=50, seed=3)
    )
    assert len(report["mean_cumulative_best"]) == 10
    best = report["mean_cumulative_best"]
    assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))
    assert 0.0 <= report["mean_best_arm_accuracy"] <= 1.0
    with pytest.raises(ValueError):
        cd.run_experiment(ENV, policy="simulated-annealing")


def test_statistics():
    assert cd.krippendorff_alpha([[1, 3, 5], [1, 3, 5]]) == pytest.approx(1.0)
    assert cd.pairwise_kappa([[1, 2, 3], [1, 2, 3]]) == pytest.approx(1.0)
    assert cd.pearson([1.0, 2.0, 3.0], [2.0, 4.0, 6.0]) == pytest.approx(1.0)
    assert cd.spearman([1.0, 2.0, 3.0], [10.0, 20.0, 25.0]) == pytest.approx(1.0)
    assert cd.scale_to_likert(50.0) == pytest.approx(3.0)
    suite = cd.correlation_suite([0.0, 50.0, 100.0], [1.0, 3.0, 5.0])
    assert suite["pearson"] == pytest.approx(1.0)
    assert suite["mae"] == pytest.approx(0.0)
    with pytest.raises(ValueError):
        cd.krippendorff_alpha([[3, 3], [3, 3]])


def test_scenarios_and_aggregate():
    rows = []
    for i, demo in enumerate(["Stereotypical", "Unconventional"]):
        rows.append(
            json.dumps(
                {
                    "id": i,
                    "brand": "Acme",
                    "product": "Watch",
                    "gender": "women",
                    "age": "25-34",
                    "location": "Berlin",
                    "interest": "fitness",
                    "demographic_type": demo,
                    "logo_ref": "logo.png",
                    "product_ref": "watch.png",
                    "split": "Hillclimb",
                }
            )
        )
    scenarios = cd.parse_scenarios("\n".join(rows) + "\n")
    assert len(scenarios) == 2
    with pytest.raises(ValueError):
        cd.parse_scenarios(rows[0] + "\n")  # missing demographic counterpart

    agg = cd.aggregate_bench([(80.0, 90.0, 70.0, 60.0), (60.0, 70.0, 90.0, 80.0)])
    assert agg["VAF"] == pytest.approx(70.0)
    assert agg["Avg"] == pytest.approx(75.0)


def test_run_pipeline(tmp_path):
    prompt = (
        "Acme builds SmartWatch, targeting women aged 25-34 in Berlin "
        "who are interested in fitness."
    )
    summary = json.loads(
        cd.run_pipeline(prompt, iterations=3, seed=11, run_dir=str(tmp_path / "r"))
    )
    assert summary["iterations"] == 3
    assert summary["best_index"] >= 0
    assert 0.0 <= summary["best"]["score"] <= 100.0
    assert (tmp_path / "r" / "policy.json").exists()
