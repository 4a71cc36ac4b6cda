"""Direct-definition reference estimators.

Built from raw (s, a, s') triples with explicit double and triple sums over
materialized empirical joints, sharing no code with the streaming path.
"""

import math
from fractions import Fraction


def _table(items):
    out = {}
    for x in items:
        out[x] = out.get(x, 0) + 1
    return out


def entropy(samples):
    n = len(samples)
    h = 0.0
    for c in _table(samples).values():
        p = c / n
        h -= p * math.log2(p)
    return h


def mi(xs, ys):
    """Sum over the support of p(x,y) log p(x,y) / (p(x) p(y))."""
    n = len(xs)
    pxy = _table(list(zip(xs, ys)))
    px, py = _table(xs), _table(ys)
    total = 0.0
    for x in px:
        for y in py:
            c = pxy.get((x, y), 0)
            if c:
                total += (c / n) * math.log2(c * n / (px[x] * py[y]))
    return total


def mi_pair_next(ss, aa, nn):
    """MI between the composite (S, A) and S' as a triple sum."""
    n = len(ss)
    pj = _table(list(zip(ss, aa, nn)))
    psa = _table(list(zip(ss, aa)))
    pn = _table(nn)
    total = 0.0
    for s in set(ss):
        for a in set(aa):
            for sn in pn:
                c = pj.get((s, a, sn), 0)
                if c:
                    total += (c / n) * math.log2(c * n / (psa[(s, a)] * pn[sn]))
    return total


def signature(triples):
    ss = [t[0] for t in triples]
    aa = [t[1] for t in triples]
    nn = [t[2] for t in triples]
    return {
        "h_s": entropy(ss),
        "h_a": entropy(aa),
        "h_snext": entropy(nn),
        "mi_sa": mi(ss, aa),
        "mi_asnext": mi(aa, nn),
        "mi_ssnext": mi(ss, nn),
        "mi_sa_snext": mi_pair_next(ss, aa, nn),
    }


def exact_probabilities(samples):
    n = len(samples)
    return {k: Fraction(c, n) for k, c in _table(samples).items()}
