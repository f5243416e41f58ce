"""Smoke tests for the python bindings: the main pipeline end to end."""

import math

import numpy as np
import pytest

import xpcsvd


def make_frames(n=24, m=96, seed=3):
    rng = np.random.default_rng(seed)
    return xpcsvd.FrameSeries(rng.exponential(1.0, size=(n, m)), 1.0)


def test_homomorphic_identity_end_to_end():
    frames = make_frames()
    enc = xpcsvd.build_offline(frames)
    store = xpcsvd.compress_series(frames, enc)

    g_raw = xpcsvd.ttc_raw(frames)
    g_cmp = xpcsvd.ttc_compressed(store)
    assert g_cmp.lossless
    assert np.max(np.abs(g_raw.values - g_cmp.values)) <= 1e-10

    g2_raw = xpcsvd.g2_from_ttc(g_raw, 1.0)
    g2_cmp = xpcsvd.g2_from_ttc(g_cmp, 1.0)
    assert np.max(np.abs(g2_raw.values - g2_cmp.values)) <= 1e-10


def test_gram_svd_reconstruction():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(12, 40))
    u, sigma, v = xpcsvd.gram_svd(x)
    assert sigma.shape == (12,)
    assert np.all(np.diff(sigma) <= 0)
    rec = (u * sigma) @ v.T
    assert np.linalg.norm(x - rec) / np.linalg.norm(x) <= 1e-10
    assert np.max(np.abs(v.T @ v - np.eye(12))) <= 1e-10


def test_streaming_matches_batch():
    frames = make_frames(n=16, m=64, seed=5)
    enc = xpcsvd.truncate(xpcsvd.build_offline(frames), 4)
    batch = xpcsvd.compress_series(frames, enc)

    stream = xpcsvd.CompressedSeries(4, batch.encoder_id)
    intensities = frames.intensities
    for t in range(16):
        coeffs, norm = xpcsvd.compress_frame(intensities[t], enc)
        stream.append(coeffs, norm)

    assert np.array_equal(stream.coefficients, batch.coefficients)
    assert np.array_equal(stream.norms, batch.norms)

    g = xpcsvd.ttc_compressed(stream)
    g_batch = xpcsvd.ttc_compressed(batch)
    assert np.array_equal(g.values, g_batch.values)


def test_ttc_extend_matches_recompute():
    frames = make_frames(n=10, m=48, seed=11)
    enc = xpcsvd.truncate(xpcsvd.build_offline(frames), 3)
    intensities = frames.intensities

    store = xpcsvd.CompressedSeries(3, xpcsvd.compress_series(frames, enc).encoder_id)
    for t in range(2):
        coeffs, norm = xpcsvd.compress_frame(intensities[t], enc)
        store.append(coeffs, norm)
    g = xpcsvd.ttc_compressed(store)
    for t in range(2, 10):
        coeffs, norm = xpcsvd.compress_frame(intensities[t], enc)
        g = xpcsvd.ttc_extend(g, store, coeffs)
        store.append(coeffs, norm)

    g_batch = xpcsvd.ttc_compressed(xpcsvd.compress_series(frames, enc))
    assert np.array_equal(g.values, g_batch.values)


def test_synthetic_generators_and_fit():
    frames = xpcsvd.gen_relaxation(256, 512, 0.95, 4)
    curve = xpcsvd.g2_from_ttc(xpcsvd.ttc_raw(frames), 1.0)
    fit = xpcsvd.fit_kww(curve, (0.0, 150.0))
    expect = -1.0 / math.log(0.95)
    assert abs(fit.relaxation_time - expect) / expect <= 0.25

    osc = xpcsvd.gen_oscillatory(64, 512, 16.0, 0.5, 0.01, 9)
    g = xpcsvd.ttc_raw(osc)
    report = xpcsvd.make_visibility_report(
        xpcsvd.g2_from_ttc(g, 1.0), g, (12.0, 20.0), (4.0, 10.0)
    )
    assert report.visibility > 0.0
    assert report.peak_lag == pytest.approx(16.0, abs=1.0)


def test_file_round_trips(tmp_path):
    frames = make_frames(n=8, m=32, seed=13)
    enc = xpcsvd.truncate(xpcsvd.build_offline(frames), 2)
    store = xpcsvd.compress_series(frames, enc)

    fpath = str(tmp_path / "frames.xfs")
    epath = str(tmp_path / "enc.xenc")
    cpath = str(tmp_path / "store.xcmp")
    xpcsvd.write_frames(fpath, frames)
    xpcsvd.write_encoder(epath, enc)
    xpcsvd.write_compressed(cpath, store)

    assert np.array_equal(xpcsvd.read_frames(fpath).intensities, frames.intensities)
    back = xpcsvd.read_encoder(epath)
    assert np.array_equal(back.v, enc.v)
    assert xpcsvd.content_hash(back) == xpcsvd.content_hash(enc)
    assert np.array_equal(xpcsvd.read_compressed(cpath).coefficients, store.coefficients)


def test_errors_are_typed():
    frames = make_frames(n=6, m=24, seed=17)
    enc = xpcsvd.build_offline(frames)
    other = xpcsvd.truncate(enc, 2)
    store = xpcsvd.compress_series(frames, enc)
    with pytest.raises(xpcsvd.BindingError):
        xpcsvd.decompress(store, other)
    with pytest.raises(xpcsvd.RankError):
        xpcsvd.build_online_from_frames(frames, 100)
    with pytest.raises(xpcsvd.ContractError):
        xpcsvd.gen_relaxation(8, 8, 1.5, 0)


def test_mask_selection():
    frames = make_frames(n=4, m=16, seed=19)
    mask = xpcsvd.PixelMask(16, [1, 5, 7])
    masked = xpcsvd.apply_mask(frames, mask)
    assert masked.n_pixels == 3
    assert np.array_equal(masked.intensities, frames.intensities[:, [1, 5, 7]])


def test_online_encoder_from_texture():
    texture = xpcsvd.make_texture(64, 64, 2)
    corpus = xpcsvd.gen_shifted_corpus(texture, 60, (16, 16), 4)
    assert corpus.n_pixels == 256
    assert np.all(corpus.intensities > 0)

    enc = xpcsvd.build_online(texture, 60, (16, 16), 4, 20)
    assert enc.k == 20
    assert enc.mode == xpcsvd.EncoderMode.ONLINE_UNRELATED
    assert np.max(np.abs(enc.v.T @ enc.v - np.eye(20))) <= 1e-10

    report = xpcsvd.spectrum_report(enc)
    assert report.suggested_k == xpcsvd.suggest_k(enc, 2.0)
    assert np.all(np.diff(report.spectrum) <= 0)

    assert xpcsvd.detectability(0.5, 0.2)
    assert not xpcsvd.detectability(0.4, 0.2)
