"""Smoke test for the pymaxop extension. Run after `pip install` or `maturin develop`."""

import json
import math

import pymaxop


def main() -> None:
    step = pymaxop.DiscreteSignal([], tail_left="1")
    assert step.centered_max(10) == ("1/2", None)

    delta = pymaxop.DiscreteSignal(["1"])
    assert delta.max_variation("uncentered") == "2"
    assert delta.max_profile(-2, 2) == ["1/5", "1/3", "1", "1/3", "1/5"]

    hat = pymaxop.PwlFunction.hat(0.0, 1.0)
    assert math.isclose(hat.frac_max(0.5, 0.0), (2 / 3) ** 1.5, rel_tol=1e-9)
    a, b, _ = hat.good_ball(0.5, 0.0)
    assert math.isclose(a, -2 / 3, rel_tol=1e-9) and math.isclose(b, 2 / 3, rel_tol=1e-9)
    norm, err = hat.frac_derivative_norm(0.5, tol=1e-8)
    assert abs(norm - 0.20695533066) < 1e-8 and err < 1e-6

    report = json.loads(pymaxop.continuity_frac(hat, "scaling", [1, 4, 16], beta=0.5))
    assert [row["j"] for row in report["rows"]] == [1, 4, 16]
    report = json.loads(pymaxop.continuity_disc(delta, "additive", [1, 2, 4]))
    assert all(check["passed"] for check in report["checks"])

    items = pymaxop.corpus(3, 2, "pwl")
    assert len(items) == 2 and isinstance(items[0], pymaxop.PwlFunction)

    try:
        pymaxop.PwlFunction([0.0, 1.0], [1.0, 0.0])
    except ValueError:
        pass
    else:
        raise AssertionError("nonzero endpoint accepted")

    print("pymaxop smoke test passed")


if __name__ == "__main__":
    main()
