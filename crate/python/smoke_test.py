"""Smoke test for the compiled emhkit module.

Build and install first:  pip install --no-build-isolation -e crates/py
Then run:                 python python/smoke_test.py
"""

import datetime
import math
import os
import tempfile

import emhkit


def check_hurst():
    x = emhkit.generate({"kind": "fgn", "h": 0.7}, 8192, seed=1)["values"]
    for method in ("rs-al", "dfa", "ghe", "gph"):
        h = emhkit.hurst(x, method)["H"]
        assert abs(h - 0.7) < 0.1, (method, h)
    assert abs(emhkit.rs_expected(10) - 2.8722) < 1e-3
    wn = emhkit.exponent_relations("alpha", 0.5)
    assert (wn["alpha"], wn["beta"], wn["delta"], wn["H"], wn["D"]) == (0.5, 0.0, 1.0, 0.5, 1.5)


def check_bds_and_embedding():
    noise = emhkit.generate({"kind": "white_noise", "sd": 1.0}, 1000, seed=2)["values"]
    chaos = emhkit.generate({"kind": "logistic", "r": 4.0, "noise_snr_db": None}, 1000, seed=2)["values"]
    assert min(d["p_value"] for d in emhkit.bds_test(chaos)["dims"]) < 1e-6
    assert len(emhkit.bds_test(noise, m_max=4)["dims"]) == 3
    e = emhkit.embed(chaos, max_m=4)
    assert e["ami"]["tau"] >= 1 and len(e["fnn"]["fractions"]) == 4


def check_lyapunov():
    x = emhkit.generate({"kind": "logistic", "r": 4.0, "noise_snr_db": None}, 3000, seed=3)["values"]
    r = emhkit.lyapunov_exponent(x, method="rosenstein")
    assert abs(r["lambda_max"] - math.log(2)) < 0.05, r["lambda_max"]
    ar = emhkit.generate({"kind": "ar1", "phi": 0.5, "sd": 1.0}, 1000, seed=3)["values"]
    j = emhkit.lyapunov_exponent(ar, max_tau=1, max_m=2, max_q=1, bootstrap=99)
    assert j["lambda_max"] < 0 and j["verdict"] == "no_chaos", j["verdict"]


def check_volatility_and_entropy():
    g = emhkit.generate({"kind": "egarch11", "k": -0.1, "gamma": 0.9, "alpha": 0.3, "xi": -0.07}, 4000, seed=4)
    fit = emhkit.fit_garch(g["values"], family="egarch")
    assert abs(fit["gamma"] - 0.9) < 0.05, fit["gamma"]
    assert len(fit["sigma"]) == 4000
    trace = emhkit.rolling_tsallis(g["values"], window=365, step=30)
    assert all(v > 0 for v in trace["values"])
    p = [0.2, 0.3, 0.5]
    assert abs(emhkit.tsallis_entropy(p, 1.0 + 1e-7) - emhkit.tsallis_entropy(p, 1.0)) < 1e-4


def check_market():
    assert abs(emhkit.hhi([50, 30, 20])["value"] - 3800.0) < 1e-9
    years = list(range(2005, 2014))
    uv_pun = [0.230, 0.179, 0.179, 0.139, 0.164, 0.127, 0.087, 0.130, 0.145]
    pun_lyap = [-0.2570, -0.2090, -0.1600, -0.1158, -0.1280, -0.1560, -0.1266, -0.0740, -0.0835]
    c = emhkit.correlation_matrix(years, {"uv_pun": uv_pun, "pun_lyap": pun_lyap})
    assert abs(c["values"][0][1] + 0.734) < 0.01


def check_pipeline():
    prices = emhkit.generate({"kind": "gbm", "p0": 50.0, "mu": 0.0, "sigma": 0.01}, 1500, seed=5)["values"]
    start = datetime.date(2010, 1, 1)
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "gbm.csv")
        with open(path, "w") as f:
            f.write("timestamp,price\n")
            for i, p in enumerate(prices):
                f.write(f"{start + datetime.timedelta(days=i)},{p}\n")
        s = emhkit.PriceSeries.load_csv(path)
        assert len(s) == 1500 and len(s.log_returns()) == 1499
        run_dir = os.path.join(d, "run")
        manifest = {
            "input": path,
            "frequency": "daily",
            "seed": 1,
            "output_dir": run_dir,
            "config": {
                "garch_menu": "constant_mean",
                "max_points": 1000,
                "lyapunov": {"max_tau": 1, "max_m": 2, "max_q": 1, "seed": 0, "bootstrap": 99, "selection": "max_lambda"},
            },
        }
        out = emhkit.run_pipeline(manifest)
        assert all(s["status"] == "ok" for s in out["stages"]), out["stages"]
        report = emhkit.efficiency_report(run_dir)
        assert report["verdict"] == "indistinguishable from random walk", report["verdict"]


if __name__ == "__main__":
    for check in (check_hurst, check_bds_and_embedding, check_lyapunov, check_volatility_and_entropy, check_market, check_pipeline):
        check()
        print(f"{check.__name__}: ok")
