# Independent mean-first-passage-time oracle for the tilted square well
# (F = 0.25, beta = 1, epsilon = 0.001). Output frozen in mfpt_oracle.txt.
# The inner integral over (-inf, y] is summed exactly over periods.
import numpy as np
from scipy import integrate
F=0.25; b=1.0; eps=1e-3
def U(x):
    m = x % 3.0
    return np.tanh((m-2)/eps) - np.tanh((m-1)/eps)
def inner(y):
    pts = sorted(set([0.0,3.0] + [u for k in range(-2,3) for c in (1,2) for u in [y-c-3*k] if 0<u<3]))
    fine = sorted(set([q for p in pts for q in (p-30*eps,p,p+30*eps) if 0<=q<=3]))
    f = lambda u: np.exp(b*(U(y)-U(y-u)) - b*F*u)
    return sum(integrate.quad(f, a, c, epsabs=0, epsrel=1e-12, limit=200)[0] for a, c in zip(fine[:-1], fine[1:]))
ys = [0, 1-30*eps, 1, 1+30*eps, 2-30*eps, 2, 2+30*eps, 3]
I = sum(integrate.quad(inner, a, c, epsabs=0, epsrel=1e-11, limit=200)[0] for a, c in zip(ys[:-1], ys[1:]))
print(repr(b/(1-np.exp(-3*b*F))*I))
