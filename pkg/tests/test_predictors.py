import math

import numpy as np
import pytest

from physbench.core.rng import Rng
from physbench.episodes import generate, generate_episode
from physbench.errors import NonFinite, ShapeMismatch
from physbench.predictors import (
    AdamState,
    ConstantVelocity,
    EpisodeView,
    OraclePredictor,
    Predictor,
    ZeroOrderHold,
    adam_step,
    fit_linear,
    fit_neural_derivative,
    load_predictor,
    make_view,
    mlp_loss_and_grads,
    save_predictor,
)
from physbench.predictors.neural import MlpDerivativeModel, Normalization, transitions_from_episodes
from physbench.tasks import TASKS, make_spec


def _episodes(task_id, count, seed, horizon=40, **overrides):
    spec = make_spec(task_id, horizon=horizon, range_overrides=overrides)
    indexed, failures = generate(spec, count, seed)
    assert not failures
    return [ep for _, ep in indexed]


class TestView:
    def test_exactly_ten_conditioning_states(self):
        (ep,) = _episodes("pendulum", 1, 3, horizon=100)
        view = make_view(ep, 10)
        assert view.cond_states.shape == (10, 2)
        assert view.cond_actions.shape == (9, 0)
        assert view.future_actions.shape == (90, 0)

    def test_probe_predictor_sees_only_the_window(self):
        seen = {}

        class Probe(Predictor):
            name = "probe"

            def rollout(self, view: EpisodeView):
                seen["states"] = view.cond_states.shape
                assert not hasattr(view, "states")
                return np.tile(view.cond_states[-1], (view.rollout_steps, 1))

        (ep,) = _episodes("pendulum", 1, 4, horizon=100)
        Probe().predict(ep, 10)
        assert seen["states"] == (10, 2)

    def test_too_short_episode_rejected(self):
        (ep,) = _episodes("pendulum", 1, 5, horizon=20)
        with pytest.raises(ShapeMismatch):
            make_view(ep, 10, 90)


class TestBaselines:
    @pytest.mark.parametrize("task_id", sorted(TASKS))
    def test_oracle_bit_exact(self, task_id):
        (ep,) = _episodes(task_id, 1, 11, horizon=30)
        record = OraclePredictor().predict(ep, 10)
        assert record.states.shape == (20, ep.states.shape[1])
        assert np.array_equal(record.states, ep.states[10:30])

    def test_zoh_holds_last_state(self):
        (ep,) = _episodes("bouncing_ball", 1, 6, horizon=30)
        record = ZeroOrderHold().predict(ep, 10)
        for row in record.states:
            assert np.array_equal(row, ep.states[9])

    def test_constvel_free_fall_closed_form(self):
        # bounce-free fall from 2 m: z error at horizon h is g (h dt)^2 / 2
        (ep,) = _episodes(
            "free_fall", 1, 7, horizon=30, height=(2.0, 2.0), radius=(0.1, 0.1)
        )
        record = ConstantVelocity().predict(ep, 10, 20)
        g, dt = 9.81, ep.dt
        for h in range(1, 21):
            err = record.states[h - 1, 2] - ep.states[9 + h, 2]
            assert abs(err - 0.5 * g * (h * dt) ** 2) <= 1e-9

    def test_non_finite_rollout_reports_step(self):
        class Bad(Predictor):
            name = "bad"

            def rollout(self, view):
                out = np.tile(view.cond_states[-1], (view.rollout_steps, 1))
                out[4, 0] = np.nan
                return out

        (ep,) = _episodes("pendulum", 1, 8, horizon=30)
        with pytest.raises(NonFinite, match="step 5"):
            Bad().predict(ep, 10)


class TestLinear:
    def test_exact_on_linear_dynamics(self):
        # fixed incline and friction: the transition is one affine map
        fixed = {
            "alpha": (0.5, 0.5),
            "mu": (0.1, 0.1),
        }
        train = _episodes("inclined_plane", 50, 21, horizon=100, **fixed)
        eval_eps = _episodes("inclined_plane", 10, 99, horizon=100, **fixed)
        model = fit_linear(train)
        errs = []
        for ep in eval_eps:
            rec = model.predict(ep, 10, 90)
            errs.append(np.mean((rec.states - ep.states[10:100]) ** 2))
        assert np.mean(errs) < 1e-6

    def test_single_repeated_transition_reproduced(self):
        (ep,) = _episodes("pendulum", 1, 5, horizon=1)
        # duplicate the single transition a few times
        model = fit_linear([ep] * 5)
        feat = np.concatenate([ep.states[0], ep.actions[0], [1.0]])
        np.testing.assert_allclose(feat @ model.weights, ep.states[1], atol=1e-9)

    def test_huge_ridge_collapses_to_mean(self):
        train = _episodes("pendulum", 10, 31, horizon=50)
        model = fit_linear(train, ridge=1e12)
        targets = np.vstack([ep.states[1:] for ep in train])
        bias = model.weights[-1]
        np.testing.assert_allclose(bias, targets.mean(axis=0), rtol=1e-4, atol=1e-7)
        assert np.max(np.abs(model.weights[:-1])) < 1e-4


class TestNeural:
    def test_zero_weights_equal_zoh(self):
        (ep,) = _episodes("pendulum", 1, 41, horizon=30)
        x, y = transitions_from_episodes([ep])
        model = MlpDerivativeModel.init(x.shape[1], y.shape[1], 8, Rng(0))
        for i, p in enumerate(model.params):
            model.params[i] = np.zeros_like(p)
        from physbench.predictors.neural import NeuralDerivativePredictor

        pred = NeuralDerivativePredictor(model)
        rec = pred.predict(ep, 10)
        zoh = ZeroOrderHold().predict(ep, 10)
        assert np.array_equal(rec.states, zoh.states)

    def test_gradients_match_central_differences(self):
        train = _episodes("pendulum", 2, 13, horizon=25)
        x, y = transitions_from_episodes(train)
        model = MlpDerivativeModel.init(x.shape[1], y.shape[1], 8, Rng(3))
        x_batch, y_batch = x[:32], y[:32]
        _, grads = mlp_loss_and_grads(model.params, x_batch, y_batch)
        h = 1e-6
        for layer, grad in enumerate(grads):
            numeric = np.zeros_like(grad)
            flat = model.params[layer].reshape(-1)
            num_flat = numeric.reshape(-1)
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + h
                lp, _ = mlp_loss_and_grads(model.params, x_batch, y_batch)
                flat[j] = orig - h
                lm, _ = mlp_loss_and_grads(model.params, x_batch, y_batch)
                flat[j] = orig
                num_flat[j] = (lp - lm) / (2 * h)
            denom = np.max(np.abs(numeric)) + 1e-12
            assert np.max(np.abs(grad - numeric)) / denom < 1e-4, f"layer {layer}"

    def test_training_deterministic(self):
        train = _episodes("pendulum", 5, 17, horizon=30)
        a = fit_neural_derivative(train, epochs=2, batch=64, seed=5)
        b = fit_neural_derivative(train, epochs=2, batch=64, seed=5)
        for pa, pb in zip(a.model.params, b.model.params):
            assert np.array_equal(pa, pb)

    def test_normalization_roundtrip(self):
        data = np.array([[1.0, -3.0], [2.5, 0.5], [0.1, 9.0]])
        norm = Normalization.fit(data)
        back = norm.inverse(norm.forward(data))
        assert np.max(np.abs(back - data)) <= 1e-12


class TestAdam:
    def test_zero_gradient_no_move(self):
        params = [np.array([1.0, 2.0])]
        out = adam_step(AdamState(), params, [np.zeros(2)])
        np.testing.assert_array_equal(out[0], params[0])

    def test_first_step_is_signed_lr(self):
        opt = AdamState(lr=1e-3)
        params = [np.array([1.0, -1.0, 0.5])]
        grads = [np.array([0.3, -0.7, 0.0001])]
        out = adam_step(opt, params, grads)
        steps = out[0] - params[0]
        # bias-corrected first step is -lr * g / (|g| + eps)
        np.testing.assert_allclose(steps, -1e-3 * np.sign(grads[0]), rtol=1e-3)

    def test_identical_runs_identical_trajectories(self):
        def run():
            opt = AdamState()
            params = [np.array([0.5, -0.2]), np.array([[1.0, 2.0]])]
            for k in range(25):
                grads = [np.array([0.1 * k, -0.2]), np.array([[0.3, 0.01 * k]])]
                params = adam_step(opt, params, grads)
            return params

        a, b = run(), run()
        for pa, pb in zip(a, b):
            assert np.array_equal(pa, pb)


class TestStore:
    def test_linear_roundtrip(self, tmp_path):
        train = _episodes("pendulum", 3, 61, horizon=20)
        model = fit_linear(train)
        path = tmp_path / "linear.json"
        save_predictor(model, str(path))
        back = load_predictor(str(path))
        (ep,) = _episodes("pendulum", 1, 62, horizon=20)
        a = model.predict(ep, 5)
        b = back.predict(ep, 5)
        assert np.array_equal(a.states, b.states)

    def test_neural_roundtrip(self, tmp_path):
        train = _episodes("pendulum", 3, 63, horizon=20)
        model = fit_neural_derivative(train, epochs=1, batch=32, seed=1)
        path = tmp_path / "mlp.json"
        save_predictor(model, str(path))
        back = load_predictor(str(path))
        (ep,) = _episodes("pendulum", 1, 64, horizon=20)
        assert np.array_equal(model.predict(ep, 5).states, back.predict(ep, 5).states)
