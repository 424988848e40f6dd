"""Reference values of the hat-averaged cell kernel

    K(offset, s, h) = (1/h) * int_{-h}^{h} (1 - |u|/h) |cos(offset + u)|^s du

at 40 digits with mpmath. The integrand is split at 0 and at the zero of the
cosine so that the quadrature sees only smooth pieces.
"""
import mpmath as mp

mp.mp.dps = 40


def cell(offset, s, h):
    offset, s, h = mp.mpf(offset), mp.mpf(s), mp.mpf(h)
    f = lambda u: (1 - abs(u) / h) * abs(mp.cos(offset + u)) ** s / h
    cuts = [-h, mp.mpf(0), h]
    z = mp.pi / 2 - offset
    z -= mp.pi * mp.nint(z / mp.pi)
    if -h < z < h and z != 0:
        cuts.append(z)
    cuts.sort()
    return mp.quad(f, cuts)


CASES = [(0.3, -0.5), (1.57, -0.5), (1.57, -0.2), (1.57, 2.5), (2, 1), (1.5708, 0.5)]

if __name__ == "__main__":
    for offset, s in CASES:
        print(offset, s, mp.nstr(cell(offset, s, 0.01), 20))
