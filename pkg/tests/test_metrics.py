import numpy as np
import pytest

from sphmri import metrics


# ---------------------------------------------------------------- psnr ----


def test_psnr_hand_computed():
    ref = np.array([[1.0, 0.0], [0.0, 0.0]])
    x = np.array([[1.0, 1.0], [0.0, 0.0]])
    # mse = 1/4, peak = 1  ->  10 log10(4) dB
    assert metrics.psnr(x, ref) == pytest.approx(10.0 * np.log10(4.0))


def test_psnr_identical_is_inf():
    ref = np.ones((4, 4))
    assert metrics.psnr(ref, ref.copy()) == np.inf


def test_psnr_peak_override():
    ref = np.zeros((2, 2))
    ref[0, 0] = 0.5
    x = ref + 0.1
    base = metrics.psnr(x, ref, peak=1.0)
    # doubling the peak adds 20 log10(2) dB
    assert metrics.psnr(x, ref, peak=2.0) == pytest.approx(base + 20 * np.log10(2))


def test_psnr_validation():
    with pytest.raises(ValueError):
        metrics.psnr(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        metrics.psnr(np.zeros((2, 2)), np.zeros((2, 2)))  # peak defaults to 0


def test_psnr_scales_with_noise(rng):
    ref = rng.random((32, 32))
    noisy1 = ref + 0.01 * rng.standard_normal((32, 32))
    noisy2 = ref + 0.1 * rng.standard_normal((32, 32))
    assert metrics.psnr(noisy1, ref) > metrics.psnr(noisy2, ref)


# ---------------------------------------------------------------- ssim ----


def naive_ssim(x, ref, dynamic_range, k1=0.01, k2=0.03):
    """Direct windowed implementation with explicit loops."""
    kernel = np.outer(*(2 * [np.exp(-((np.arange(11) - 5.0) ** 2) / 4.5)]))
    kernel = kernel / kernel.sum()
    c1, c2 = (k1 * dynamic_range) ** 2, (k2 * dynamic_range) ** 2
    rows, cols = x.shape
    values = []
    for i in range(rows - 10):
        for j in range(cols - 10):
            wx = x[i : i + 11, j : j + 11]
            wr = ref[i : i + 11, j : j + 11]
            mx = np.sum(kernel * wx)
            mr = np.sum(kernel * wr)
            vx = np.sum(kernel * wx * wx) - mx * mx
            vr = np.sum(kernel * wr * wr) - mr * mr
            cov = np.sum(kernel * wx * wr) - mx * mr
            values.append(
                ((2 * mx * mr + c1) * (2 * cov + c2))
                / ((mx * mx + mr * mr + c1) * (vx + vr + c2))
            )
    return float(np.mean(values))


def test_ssim_matches_naive_oracle(rng):
    ref = rng.random((20, 20))
    x = ref + 0.1 * rng.standard_normal((20, 20))
    want = naive_ssim(x, ref, dynamic_range=float(ref.max() - ref.min()))
    assert metrics.ssim(x, ref) == pytest.approx(want, abs=1e-12)


def test_ssim_identical_is_one(rng):
    ref = rng.random((16, 16))
    assert metrics.ssim(ref, ref.copy()) == pytest.approx(1.0)


def test_ssim_degrades_with_noise(rng):
    ref = rng.random((24, 24))
    mild = metrics.ssim(ref + 0.02 * rng.standard_normal((24, 24)), ref)
    harsh = metrics.ssim(ref + 0.5 * rng.standard_normal((24, 24)), ref)
    assert 1.0 > mild > harsh


def test_ssim_bounds_and_small_image(rng):
    ref = rng.random((12, 12))
    x = rng.random((12, 12))
    assert -1.0 <= metrics.ssim(x, ref) <= 1.0
    with pytest.raises(ValueError):
        metrics.ssim(np.zeros((10, 10)), np.zeros((10, 10)))


def test_ssim_flat_reference_fallback():
    ref = np.full((12, 12), 3.0)
    assert metrics.ssim(ref, ref.copy()) == pytest.approx(1.0)


# ------------------------------------------------------------ reporting ---


def test_quality_report_scale_invariant(rng):
    ref = rng.random((16, 16)) + 1j * rng.random((16, 16))
    x = ref + 0.05 * rng.standard_normal((16, 16))
    base = metrics.quality_report(x, ref)
    scaled = metrics.quality_report(7.3 * x, ref)
    assert scaled.psnr_db == pytest.approx(base.psnr_db, rel=1e-12)
    assert scaled.ssim == pytest.approx(base.ssim, rel=1e-12)


def test_quality_report_phase_blind(rng):
    ref = rng.random((16, 16))
    rotated = ref * np.exp(0.7j)
    report = metrics.quality_report(rotated, ref)
    # |ref e^{i phi}| equals ref up to rounding, so the score is only
    # finite because of the last few ulps
    assert report.psnr_db > 250.0
    assert report.ssim == pytest.approx(1.0)


def test_quality_report_rejects_zero_reference():
    with pytest.raises(ValueError):
        metrics.quality_report(np.ones((12, 12)), np.zeros((12, 12)))
