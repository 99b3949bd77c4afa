"""Two-graph (p=2) log-odds: empty vs complete, Laplace-cancelled score
against the exact fractional marginal, all in mpmath.

Exact: log prior + alpha log L(W) - (alpha n / 2) h(W) + log I(d+an, S~) - log I(d, (d-2) W^-1),
with both graphs decomposable so log I is the Wishart closed form.
"""
import mpmath as mp

mp.mp.dps = 40
alpha, n, q = mp.mpf("0.99"), 100, mp.mpf("0.45")
S = mp.matrix([[1.0, 0.3], [0.3, 1.2]])
print("prior empty p=3:", mp.nstr(3 * mp.log(1 - q), 17))


def log_mvgamma(a, r):
    return mp.mpf(r) * (r - 1) / 4 * mp.log(mp.pi) + sum(mp.loggamma(a - mp.mpf(i) / 2) for i in range(r))


def log_full(delta, d):
    r = d.rows
    a = (delta + r - 1) / 2
    return r * a * mp.log(2) + log_mvgamma(a, r) - a * mp.log(mp.det(d))


def log_i(delta, d, complete):
    if complete:
        return log_full(delta, d)
    return log_full(delta, mp.matrix([[d[0, 0]]])) + log_full(delta, mp.matrix([[d[1, 1]]]))


def scores(delta, complete):
    w = mp.inverse(S) if complete else mp.diag([1 / S[0, 0], 1 / S[1, 1]])
    edges = 1 if complete else 0
    lp = edges * mp.log(q) + (1 - edges) * mp.log(1 - q)
    an = alpha * n
    loglik = -(n * 2 / mp.mpf(2)) * mp.log(2 * mp.pi) + n / mp.mpf(2) * mp.log(mp.det(w)) - n / mp.mpf(2) * sum(
        (S * w)[i, i] for i in range(2))
    h = mp.log(mp.det(w)) - 2
    winv = mp.inverse(w)
    exact = lp + alpha * loglik - an / 2 * h + log_i(delta + an, an * S + (delta - 2) * winv, complete) - log_i(
        delta, (delta - 2) * winv, complete)
    lap = lp + alpha * loglik + (2 + edges) / mp.mpf(2) * mp.log((delta - 2) / (delta + an - 2))
    return exact, lap


for delta in [10, 20, 30]:
    e0, l0 = scores(mp.mpf(delta), False)
    e1, l1 = scores(mp.mpf(delta), True)
    print("delta", delta, "laplace log-odds", mp.nstr(l0 - l1, 17), "exact log-odds", mp.nstr(e0 - e1, 17))
