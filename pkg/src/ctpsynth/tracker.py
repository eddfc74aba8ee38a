"""Desk-scale baseline trackers.

A MOSSE-style correlation filter (frequency-domain regularized
least-squares, online numerator/denominator updates, translation only)
and an exhaustive zero-normalized cross-correlation matcher.  Together
they close the synthesize -> pair -> track -> score loop without any
learned components.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import BoundingBox, iround

SEARCH_FACTOR = 2.5
SIGMA_FACTOR = 0.1
PSR_EXCLUSION = 5  # half-size of the peak neighborhood excluded from sidelobe stats


def cross_correlate_fft(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Circular cross-correlation via FFT.

    out[dy, dx] = sum_{y,x} a[y, x] * b[(y+dy) % H, (x+dx) % W].
    This identity is what the correlation filter's spectrum math rests
    on; it is pinned against a naive spatial oracle in the tests.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("shapes must match")
    return np.real(np.fft.ifft2(np.conj(np.fft.fft2(a)) * np.fft.fft2(b)))


def _subwindow(img: np.ndarray, center: tuple[int, int], size: tuple[int, int]) -> np.ndarray:
    """Crop size=(w, h) around center=(x, y); out-of-frame indices clamp
    to the edge (replication)."""
    h, w = img.shape[:2]
    win_w, win_h = size
    x0 = center[0] - win_w // 2
    y0 = center[1] - win_h // 2
    xs = np.clip(np.arange(x0, x0 + win_w), 0, w - 1)
    ys = np.clip(np.arange(y0, y0 + win_h), 0, h - 1)
    return img[np.ix_(ys, xs)]


def _gaussian_response(win_w: int, win_h: int, sigma: float) -> np.ndarray:
    ys = np.arange(win_h, dtype=np.float64) - win_h // 2
    xs = np.arange(win_w, dtype=np.float64) - win_w // 2
    return np.exp(-0.5 * (ys[:, None] ** 2 + xs[None, :] ** 2) / sigma**2)


@dataclass(eq=False)
class CorrelationFilter:
    """MOSSE-style filter state.

    numerator holds one complex spectrum per channel; denominator is the
    shared energy spectrum (sum over channels of F * conj(F)), kept
    without the regularizer, which is added at every division so the
    effective denominator never drops below lambda.
    """

    numerator: np.ndarray  # (3, win_h, win_w) complex
    denominator: np.ndarray  # (win_h, win_w) real
    window: np.ndarray  # cosine taper (win_h, win_w)
    response_fft: np.ndarray  # (win_h, win_w) complex, FFT of the Gaussian target
    learning_rate: float
    regularizer: float
    target_size: tuple[float, float]  # (w, h), never re-estimated
    window_size: tuple[int, int]  # (win_w, win_h)

    def spectrum(self) -> np.ndarray:
        """The effective filter spectrum numerator / (denominator + lambda)."""
        return self.numerator / (self.denominator + self.regularizer)[None, :, :]


def _features(window_pixels: np.ndarray, taper: np.ndarray) -> np.ndarray:
    """Per-channel zero-mean pixels under a cosine taper, (3, h, w)."""
    x = window_pixels.astype(np.float64) / 255.0
    out = np.empty((3,) + x.shape[:2])
    for c in range(3):
        ch = x[:, :, c]
        out[c] = (ch - ch.mean()) * taper
    return out


def _transforms(feats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel spectra and the summed energy spectrum."""
    F = np.fft.fft2(feats, axes=(1, 2))
    energy = np.real(np.sum(F * np.conj(F), axis=0))
    return F, energy


def filter_init(
    patch: np.ndarray,
    box: BoundingBox,
    lam: float = 1e-2,
    lr: float = 0.125,
) -> CorrelationFilter:
    """Train a filter on one annotated image.

    Builds a Gaussian response target (sigma = 0.1 * box diagonal, max 1
    at the window center), crops a 2.5x search window around the box,
    and solves the regularized least-squares filter in closed form.
    """
    h, w = patch.shape[:2]
    if box.w < 2 or box.h < 2:
        raise ValueError("degenerate box")
    if box.x < 0 or box.y < 0 or box.x2 > w or box.y2 > h:
        raise ValueError("box not inside patch")
    win_w = max(8, iround(box.w * SEARCH_FACTOR))
    win_h = max(8, iround(box.h * SEARCH_FACTOR))
    sigma = SIGMA_FACTOR * float(np.hypot(box.w, box.h))
    g = _gaussian_response(win_w, win_h, sigma)
    taper = np.outer(np.hanning(win_h), np.hanning(win_w))
    cx, cy = box.center
    window = _subwindow(patch, (iround(cx), iround(cy)), (win_w, win_h))
    F, energy = _transforms(_features(window, taper))
    G = np.fft.fft2(g)
    return CorrelationFilter(
        numerator=G[None, :, :] * np.conj(F),
        denominator=energy,
        window=taper,
        response_fft=G,
        learning_rate=lr,
        regularizer=lam,
        target_size=(box.w, box.h),
        window_size=(win_w, win_h),
    )


def filter_response(f: CorrelationFilter, window_pixels: np.ndarray) -> np.ndarray:
    """Real-space response of the filter to one search window."""
    Z, _ = _transforms(_features(window_pixels, f.window))
    spec = np.sum(f.numerator * Z, axis=0) / (f.denominator + f.regularizer)
    return np.real(np.fft.ifft2(spec))


def _psr(response: np.ndarray, peak: tuple[int, int]) -> float:
    py, px = peak
    mask = np.ones_like(response, dtype=bool)
    y0, y1 = max(0, py - PSR_EXCLUSION), min(response.shape[0], py + PSR_EXCLUSION + 1)
    x0, x1 = max(0, px - PSR_EXCLUSION), min(response.shape[1], px + PSR_EXCLUSION + 1)
    mask[y0:y1, x0:x1] = False
    sidelobe = response[mask]
    return float((response[py, px] - sidelobe.mean()) / (sidelobe.std() + 1e-9))


def filter_track(
    f: CorrelationFilter,
    frame: np.ndarray,
    prev_box: BoundingBox,
) -> tuple[BoundingBox, float]:
    """One tracking step: correlate around prev_box, move to the peak,
    update the filter online.  Size is never re-estimated. Returns the
    new box and the peak-to-sidelobe ratio."""
    fh, fw = frame.shape[:2]
    win_w, win_h = f.window_size
    cx, cy = prev_box.center
    crop_center = (iround(cx), iround(cy))
    window = _subwindow(frame, crop_center, (win_w, win_h))
    response = filter_response(f, window)
    peak = np.unravel_index(int(np.argmax(response)), response.shape)
    psr = _psr(response, peak)
    dy = int(peak[0]) - win_h // 2
    dx = int(peak[1]) - win_w // 2
    new_cx = crop_center[0] + dx
    new_cy = crop_center[1] + dy
    tw, th = f.target_size
    x = min(max(new_cx - tw / 2.0, 0.0), max(0.0, fw - tw))
    y = min(max(new_cy - th / 2.0, 0.0), max(0.0, fh - th))
    box = BoundingBox(x, y, tw, th)
    # online update at the new location
    bx, by = box.center
    new_window = _subwindow(frame, (iround(bx), iround(by)), (win_w, win_h))
    F, energy = _transforms(_features(new_window, f.window))
    lr = f.learning_rate
    f.numerator = (1.0 - lr) * f.numerator + lr * (f.response_fft[None, :, :] * np.conj(F))
    f.denominator = (1.0 - lr) * f.denominator + lr * energy
    return box, psr


def track_sequence(
    frames: list[np.ndarray],
    init_box: BoundingBox,
    lam: float = 1e-2,
    lr: float = 0.125,
) -> list[BoundingBox]:
    """Track through a frame list; returns one box per frame, the first
    being the init box itself."""
    if not frames:
        raise ValueError("no frames")
    f = filter_init(frames[0], init_box, lam, lr)
    boxes = [init_box]
    box = init_box
    for frame in frames[1:]:
        box, _ = filter_track(f, frame, box)
        boxes.append(box)
    return boxes


def ncc_track(
    template: np.ndarray,
    frame: np.ndarray,
    search: BoundingBox,
) -> tuple[BoundingBox, float]:
    """Exhaustive ZNCC template match inside a search region.

    Returns the best-scoring box (template size) in frame coordinates
    and its correlation score.  The score is invariant to positive
    affine intensity changes of the frame.
    """
    th, tw = template.shape[:2]
    fh, fw = frame.shape[:2]
    x0 = max(0, iround(search.x))
    y0 = max(0, iround(search.y))
    x1 = min(fw, iround(search.x2))
    y1 = min(fh, iround(search.y2))
    region = frame[y0:y1, x0:x1]
    rh, rw = region.shape[:2]
    if th > rh or tw > rw:
        raise ValueError("template larger than search region")
    t = template.astype(np.float64).reshape(th, tw, -1)
    r = region.astype(np.float64).reshape(rh, rw, -1)
    tz = t - t.mean()
    t_norm = float(np.sqrt(np.sum(tz**2)))
    if t_norm == 0.0:
        raise ValueError("zero-variance template")
    windows = np.lib.stride_tricks.sliding_window_view(r, (th, tw), axis=(0, 1))
    # windows: (rh-th+1, rw-tw+1, C, th, tw)
    n = float(tz.size)
    w_sum = windows.sum(axis=(2, 3, 4))
    w_sqsum = (windows.astype(np.float64) ** 2).sum(axis=(2, 3, 4))
    w_mean = w_sum / n
    w_var = w_sqsum - n * w_mean**2
    w_norm = np.sqrt(np.maximum(w_var, 0.0))
    cross = np.einsum("ijcyx,yxc->ij", windows, tz)
    denom = w_norm * t_norm
    scores = np.where(denom > 1e-12, cross / np.where(denom > 0, denom, 1.0), 0.0)
    best = np.unravel_index(int(np.argmax(scores)), scores.shape)
    by, bx = int(best[0]), int(best[1])
    return BoundingBox(float(x0 + bx), float(y0 + by), float(tw), float(th)), float(scores[by, bx])
