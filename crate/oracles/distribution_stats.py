"""Reference two-sample statistics for two fixed 1,000-value samples.

The samples are multiples of 1/64 in [0, 1] so they contain many ties, like
Tanimoto distances do. Statistics come from scipy (1-Wasserstein, two-sample
Kolmogorov-Smirnov) and numpy (nearest-rank percentiles via the inverted CDF
method). Run once; the output is committed.

    python3 oracles/distribution_stats.py > crates/core/tests/fixtures/distribution_stats.tsv
"""

import numpy as np
import scipy
from scipy import stats

N = 1000
PERCENTILES = [10, 25, 50, 75, 90]


def samples():
    rng = np.random.default_rng(20240611)
    a = np.clip(np.round(rng.beta(6, 3, N) * 64), 0, 64) / 64
    b = np.clip(np.round(rng.beta(4, 4, N) * 64), 0, 64) / 64
    return a, b


def main():
    a, b = samples()
    print("# two-sample statistics reference")
    print("# generated by oracles/distribution_stats.py with scipy %s, numpy %s" % (scipy.__version__, np.__version__))
    print("key\tvalue")
    print("wasserstein\t%.17g" % stats.wasserstein_distance(a, b))
    print("ks\t%.17g" % stats.ks_2samp(a, b).statistic)
    for name, x in (("a", a), ("b", b)):
        print("%s_mean\t%.17g" % (name, np.mean(x)))
        for p in PERCENTILES:
            print("%s_p%d\t%.17g" % (name, p, np.percentile(x, p, method="inverted_cdf")))
    print("a\t" + ",".join("%d" % round(v * 64) for v in a))
    print("b\t" + ",".join("%d" % round(v * 64) for v in b))


if __name__ == "__main__":
    main()
