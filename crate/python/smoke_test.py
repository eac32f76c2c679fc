"""Smoke test for the Python bindings. Run after building the extension:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/trichoderma-*.whl
    python python/smoke_test.py
"""

import math

import trichoderma as t


def close(a, b, rel):
    return abs(a - b) <= rel * abs(b)


def main():
    params = t.ModelParams.baseline()
    start = t.State.baseline()
    assert start.as_tuple() == (45.0, 15.0, 50.0, 0.0)

    run = t.simulate(params, start)
    assert run["steady_state_reached"]
    s_star, p_star = run["s"][-1], run["P"][-1]
    assert close(s_star, 1.1745, 1e-3), s_star
    assert close(p_star, 31.8399, 1e-3), p_star
    assert len(run["t"]) == len(run["X"]) == len(run["P"])

    pred = t.predict_limits(start, params, s_star)
    assert close(pred["p_star"], p_star, 5e-3)
    assert s_star <= pred["s_star_upper_bound"]
    assert 0 <= s_star <= t.attractor_interval(params)
    assert close(t.lyapunov_z(start, params), 65.143, 1e-4)

    eig, res = t.transformed_eigenvalues(s_star, p_star, params)
    assert eig[0] == eig[1] == -eig[3] and eig[2] == -params.k_h
    assert max(res) < 1e-10

    warnings = [m for _, status, m in params.validate_hypotheses() if status == "warn"]
    assert "Y_Bs=1.19 violates 0<Y_Bs<1" in warnings

    assert math.isinf(t.attractor_interval(t.ModelParams.mortality_sweep(0.2)))

    for bad in (lambda: t.State(-1.0, 0.0, 0.0, 0.0), lambda: t.simulate(params, start, step=-1.0)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        t.simulate(params, t.State(0.0, 50.0, 0.0, 0.0))
    except ArithmeticError as e:
        assert "leaves s >= 0" in str(e)
    else:
        raise AssertionError("expected ArithmeticError")

    print(f"ok: s* = {s_star:.4f} g/L, P* = {p_star:.4f} g/L")


if __name__ == "__main__":
    main()
