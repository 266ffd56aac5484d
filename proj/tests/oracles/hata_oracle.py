"""Reference values for the urban Hata path loss (small/medium city).

L = 69.55 + 26.16 log10(f) - 13.82 log10(hb) - a(hm) + (44.9 - 6.55 log10(hb)) log10(d)
a(hm) = (1.1 log10(f) - 0.7) hm - (1.56 log10(f) - 0.8)

f in MHz, hb and hm in m, d in km. Prints the values pinned in test_channel.cpp.
"""
import math


def hata(d_km, f_mhz, hb, hm):
    a = (1.1 * math.log10(f_mhz) - 0.7) * hm - (1.56 * math.log10(f_mhz) - 0.8)
    return (69.55 + 26.16 * math.log10(f_mhz) - 13.82 * math.log10(hb) - a
            + (44.9 - 6.55 * math.log10(hb)) * math.log10(d_km))


if __name__ == "__main__":
    for args in [(1.0, 1500, 20, 1.5), (0.5, 1500, 20, 1.5), (2.0, 900, 30, 1.5), (0.02, 1500, 20, 1.5)]:
        print(args, repr(hata(*args)))
