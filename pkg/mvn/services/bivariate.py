"""
二元正态 CDF 的向量化实现

Drezner & Wesolowsky 的 Gauss-Legendre 方法，带 Genz 对 |r| 接近 1 的渐近修正。
h、k 可以是任意可广播的数组，r 是标量，便于在整张网格上一次求值。
"""
import numpy as np
from scipy.special import ndtr

# 与 |r| 区间对应的 Gauss-Legendre 半区间节点和权重
_GL3_W = np.array([0.171324492379, 0.360761573048, 0.467913934573])
_GL3_X = np.array([0.932469514203, 0.661209386466, 0.238619186083])
_GL6_W = np.array([0.0471753363865, 0.106939325995, 0.160078328543,
                   0.203167426723, 0.233492536538, 0.249147045813])
_GL6_X = np.array([0.981560634247, 0.90411725637, 0.769902674194,
                   0.587317954287, 0.367831498998, 0.125233408511])
_GL10_W = np.array([0.0176140071392, 0.0406014298004, 0.0626720483341,
                    0.0832767415767, 0.101930119817, 0.118194531962,
                    0.131688638449, 0.142096109318, 0.149172986473,
                    0.152753387131])
_GL10_X = np.array([0.993128599185, 0.963971927278, 0.912234428251,
                    0.839116971822, 0.74633190646, 0.636053680727,
                    0.510867001951, 0.373706088715, 0.227785851142,
                    0.0765265211335])

# 标准化后的积分限截断到 ±LIMIT，ndtr 在此处已是 0/1
LIMIT = 40.0
TWO_PI = 2.0 * np.pi


def _rule(r: float):
    if abs(r) < 0.3:
        return _GL3_W, _GL3_X
    if abs(r) < 0.75:
        return _GL6_W, _GL6_X
    return _GL10_W, _GL10_X


def bvn_upper(dh, dk, r: float) -> np.ndarray:
    """P(X > dh, Y > dk)，(X, Y) 为相关系数 r 的标准二元正态"""
    r = float(r)
    h, k = np.broadcast_arrays(np.asarray(dh, dtype=float), np.asarray(dk, dtype=float))
    h = np.clip(h, -LIMIT, LIMIT)
    k = np.clip(k, -LIMIT, LIMIT)
    w, x = _rule(r)

    with np.errstate(over='ignore', under='ignore', invalid='ignore', divide='ignore'):
        if abs(r) < 0.925:
            hk = h * k
            hs = (h * h + k * k) / 2
            asr = np.arcsin(r)
            bvn = np.zeros(h.shape)
            for wi, xi in zip(w, x):
                for sign in (-1.0, 1.0):
                    sn = np.sin(asr * (1 + sign * xi) / 2)
                    bvn += wi * np.exp((sn * hk - hs) / (1 - sn * sn))
            bvn = bvn * asr / (4 * np.pi) + ndtr(-h) * ndtr(-k)
            return np.clip(bvn, 0.0, 1.0)

        if r < 0:
            k = -k
        hk = h * k
        bvn = np.zeros(h.shape)
        if abs(r) < 1:
            as_ = (1 - r) * (1 + r)
            a = np.sqrt(as_)
            bs = (h - k) ** 2
            c = (4 - hk) / 8
            d = (12 - hk) / 16
            asr = -(bs / as_ + hk) / 2
            bvn = np.where(
                asr > -100,
                a * np.exp(asr) * (1 - c * (bs - as_) * (1 - d * bs / 5) / 3 + c * d * as_ * as_ / 5),
                0.0,
            )
            b = np.sqrt(bs)
            sp = np.sqrt(TWO_PI) * ndtr(-b / a)
            bvn = bvn - np.where(
                hk > -100,
                np.exp(-hk / 2) * sp * b * (1 - c * bs * (1 - d * bs / 5) / 3),
                0.0,
            )
            a = a / 2
            for wi, xi in zip(w, x):
                for sign in (-1.0, 1.0):
                    xs = (a + a * sign * xi) ** 2
                    rs = np.sqrt(1 - xs)
                    asr = -(bs / xs + hk) / 2
                    sp = 1 + c * xs * (1 + d * xs)
                    ep = np.exp(-hk * xs / (2 * (1 + rs) ** 2)) / rs
                    bvn = bvn + np.where(asr > -100, a * wi * np.exp(asr) * (ep - sp), 0.0)
            bvn = -bvn / TWO_PI
        if r > 0:
            bvn = bvn + ndtr(-np.maximum(h, k))
        else:
            lower = np.where(h < 0, ndtr(k) - ndtr(h), ndtr(-h) - ndtr(-k))
            bvn = np.where(h >= k, -bvn, lower - bvn)
        return np.clip(bvn, 0.0, 1.0)


def bvn_cdf(h, k, r: float) -> np.ndarray:
    """P(X ≤ h, Y ≤ k)"""
    return bvn_upper(-np.asarray(h, dtype=float), -np.asarray(k, dtype=float), r)
