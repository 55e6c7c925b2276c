"""Smoke tests for the python bindings."""

import math

import pytest

import quatnn as q


def qdist(a, b):
    return q.norm(a - b)


def test_quaternion_arithmetic():
    i = q.Quaternion(0, 1, 0, 0)
    j = q.Quaternion(0, 0, 1, 0)
    k = q.Quaternion(0, 0, 0, 1)
    assert i * j == k
    assert j * i == -k
    p = q.Quaternion(1, 2, 3, 4) * q.Quaternion(5, 6, 7, 8)
    assert p == q.Quaternion(-60, 12, 30, 24)
    assert q.conj(q.Quaternion(1, 2, 3, 4)) == q.Quaternion(1, -2, -3, -4)
    assert q.norm(q.Quaternion(1, 2, 3, 4)) == pytest.approx(math.sqrt(30))
    assert q.hadamard(q.Quaternion(1, 2, 3, 4), q.Quaternion(4, 3, 2, 1)) == \
        q.Quaternion(4, 6, 6, 4)


def test_involutions_and_inverse():
    v = q.Quaternion(1, 2, 3, 4)
    assert q.involution(v, q.Involution.I) == q.Quaternion(1, 2, -3, -4)
    assert q.conj_involution(v, q.Involution.K) == q.Quaternion(1, 2, 3, -4)
    assert qdist(v * q.inverse(v), q.Quaternion(1, 0, 0, 0)) < 1e-13
    with pytest.raises(ValueError):
        q.inverse(q.Quaternion(0, 0, 0, 0))


def test_derivatives_match_closed_forms():
    at = q.Quaternion(0.5, -1.0, 0.25, 2.0)
    grad = q.finite_difference_gradient(lambda x: x * q.conj(x), at)
    d = q.hr_derivative(grad, q.Involution.NONE)
    assert qdist(d, 0.5 * q.conj(at)) < 1e-6
    dc = q.hr_conjugate_derivative(grad, q.Involution.NONE)
    assert qdist(dc, 0.5 * at) < 1e-6
    naive = q.naive_derivative(grad)
    assert qdist(naive, 2.0 * at) < 1e-6


def test_ghr_product_rule():
    at = q.Quaternion(1, 2, 3, 4)
    got = q.ghr_product_rule(lambda x: x, q.conj, at)
    assert qdist(got, 0.5 * q.conj(at)) < 1e-6


def test_rule_failure_report():
    report = q.demonstrate_rule_failures(42, points=50)
    verdicts = [r.verdict() for r in report.routes]
    assert verdicts.count("FAILED-AS-EXPECTED") == 3
    assert verdicts.count("PASSED") == 1
    assert report.all_as_expected()
    assert "route=" in report.to_kv()

    checks = q.involution_identity_suite(7, samples=200)
    assert all(c.max_abs_error <= 1e-12 for c in checks)


def test_network_training_roundtrip(tmp_path):
    teacher = q.make_teacher([2, 2, 2], q.Activation.TANHSHRINK, 31)
    train_ds = q.gen_dataset(teacher, 128, 32)
    val_ds = q.gen_dataset(teacher, 32, 33)
    assert len(train_ds) == 128

    trace = q.forward(teacher, train_ds.inputs[0])
    assert q.loss(trace.output(), train_ds.targets[0]) < 1e-20

    cfg = q.TrainConfig()
    cfg.shape = [2, 2, 2]
    cfg.epochs = 3
    student = q.make_teacher([2, 2, 2], q.Activation.TANHSHRINK, cfg.seed_student)
    result = q.train(student, train_ds, val_ds, cfg, teacher)
    assert len(result.history) == 3
    assert result.history[-1].train_loss < result.history[0].train_loss
    csv = q.metrics_to_csv(result.history)
    assert csv.startswith("epoch,train_loss,val_loss,wdiff_mean,wdiff_min,wdiff_max")

    path = tmp_path / "model.qnn"
    q.save_network_file(result.net, str(path))
    back = q.load_network_file(str(path))
    assert q.save_network(back) == q.save_network(result.net)

    dpath = tmp_path / "data.qds"
    q.save_dataset(val_ds, str(dpath))
    loaded = q.load_dataset(str(dpath))
    assert len(loaded) == len(val_ds)
    assert q.evaluate(result.net, loaded) == pytest.approx(
        q.evaluate(result.net, val_ds))


def test_gradient_check():
    net = q.make_teacher([2, 2, 2], q.Activation.TANHSHRINK, 5)
    inp = [q.Quaternion(0.3, -0.2, 0.5, 0.1), q.Quaternion(-0.4, 0.8, 0.0, 0.6)]
    tgt = [q.Quaternion(0.1, 0.0, -0.3, 0.2), q.Quaternion(0.7, 0.1, 0.2, -0.5)]
    report = q.gradient_check(net, inp, tgt)
    assert report.passed(1e-5)
    assert report.max_rel_error < 1e-6


def test_appendix_gradients():
    w = q.Quaternion(0.5, -1.0, 2.0, 0.25)
    a = q.Quaternion(1.0, 1.0, 0.0, -1.0)
    d = q.Quaternion(0.2, 0.4, -0.6, 0.8)
    g = q.appendix_product_rule_gradient(w, a, d)
    e = d - w * a
    assert not g.degenerate
    assert qdist(g.dw, -0.5 * (e * q.conj(a))) < 1e-12
    assert qdist(g.db, -0.5 * e) < 1e-12
    exact = q.appendix_product_rule_gradient(w, a, w * a)
    assert exact.degenerate
