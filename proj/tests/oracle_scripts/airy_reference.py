"""Airy reference values (mpmath, 30 digits) for tests/test_special.cpp."""
import mpmath as mp
mp.mp.dps = 30
for s in ["-12", "-6.5", "-2.3", "0", "1.7", "4.4", "4.6", "9", "14.5"]:
    print(s, mp.nstr(mp.airyai(mp.mpf(s)), 20), mp.nstr(mp.airyai(mp.mpf(s), 1), 20))
print("zero1", mp.nstr(mp.airyaizero(1), 20))
