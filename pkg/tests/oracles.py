"""Scalar-loop reference implementations of the quality metrics.

Written with plain Python loops and ``math`` only, so they share no code
path with the vectorised implementations they check.
"""

import math

C1 = (0.01 * 255) ** 2
C2 = (0.03 * 255) ** 2
C3 = C2 / 2


def _rows(img):
    return [[int(v) for v in row] for row in img]


def psnr(a, b):
    a, b = _rows(a), _rows(b)
    sse = 0
    n = 0
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            sse += (x - y) ** 2
            n += 1
    if sse == 0:
        return math.inf
    return 10 * math.log10(255 * 255 * n / sse)


def ssim(a, b, window=8):
    a, b = _rows(a), _rows(b)
    h, w = len(a), len(a[0])
    n = window * window
    total = 0.0
    count = 0
    for i in range(h - window + 1):
        for j in range(w - window + 1):
            xs = [a[i + u][j + v] for u in range(window) for v in range(window)]
            ys = [b[i + u][j + v] for u in range(window) for v in range(window)]
            mx = sum(xs) / n
            my = sum(ys) / n
            vx = sum((x - mx) ** 2 for x in xs) / n
            vy = sum((y - my) ** 2 for y in ys) / n
            cxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / n
            sx, sy = math.sqrt(vx), math.sqrt(vy)
            lum = (2 * mx * my + C1) / (mx * mx + my * my + C1)
            con = (2 * sx * sy + C2) / (vx + vy + C2)
            struct = (cxy + C3) / (sx * sy + C3)
            total += lum * con * struct
            count += 1
    return total / count


def kl_bits(a, b, delta=1e-9):
    p = [0.0] * 256
    q = [0.0] * 256
    for row in _rows(a):
        for v in row:
            p[v] += 1
    for row in _rows(b):
        for v in row:
            q[v] += 1
    p = [x + delta for x in p]
    q = [x + delta for x in q]
    sp, sq = sum(p), sum(q)
    total = 0.0
    for x, y in zip(p, q):
        total += (x / sp) * math.log2((x / sp) / (y / sq))
    return max(0.0, total)


def mutual_information(a, b, levels=256):
    a, b = _rows(a), _rows(b)
    joint = {}
    n = 0
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            joint[(x, y)] = joint.get((x, y), 0) + 1
            n += 1
    px, py = {}, {}
    for (x, y), c in joint.items():
        px[x] = px.get(x, 0) + c
        py[y] = py.get(y, 0) + c
    total = 0.0
    for (x, y), c in joint.items():
        pxy = c / n
        total += pxy * math.log2(pxy / ((px[x] / n) * (py[y] / n)))
    return max(0.0, total)


def entropy(a):
    counts = {}
    n = 0
    for row in _rows(a):
        for v in row:
            counts[v] = counts.get(v, 0) + 1
            n += 1
    return -sum((c / n) * math.log2(c / n) for c in counts.values())


def fixed_pairs():
    """Ten small deterministic image pairs (numpy-free LCG)."""
    state = 12345

    def draw():
        nonlocal state
        state = (1103515245 * state + 12345) % 2**31
        return state >> 16

    pairs = []
    shapes = [(8, 8), (9, 12), (16, 16), (12, 10), (16, 8), (10, 10), (8, 14), (11, 11), (16, 12), (13, 9)]
    for k, (h, w) in enumerate(shapes):
        a = [[draw() % 256 for _ in range(w)] for _ in range(h)]
        if k % 3 == 0:
            b = [[min(255, max(0, v + draw() % 11 - 5)) for v in row] for row in a]
        elif k % 3 == 1:
            b = [[draw() % 256 for _ in range(w)] for _ in range(h)]
        else:
            b = [[255 - v for v in row] for row in a]
        pairs.append((a, b))
    return pairs
