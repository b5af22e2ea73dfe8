#!/usr/bin/env python3
"""Writes a small synthetic dataset for trying the CLI.

Prices follow (1 + r_i) = alpha * (1 + r_m)^beta * exp(noise) on a weekday
calendar, with optional shocks around each announcement.
"""

import argparse
import datetime as dt
from pathlib import Path

import numpy as np

STOCKS = [
    # id, label, alpha, beta, noise sigma, {event offset: simple-return shock}
    ("DROP", "Sample Falling Corp", 1.0001, 1.1, 0.012, {0: -0.07}),
    ("JUMP", "Sample Rising Inc", 1.0002, 0.9, 0.010, {-1: 0.03, 0: 0.04}),
    ("FLAT", "Sample Quiet Ltd", 1.0000, 1.3, 0.011, {}),
]


def weekdays(start, count):
    days, d = [], start
    while len(days) < count:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def write_prices(path, dates, prices):
    with open(path, "w") as f:
        f.write("date,close\n")
        for d, p in zip(dates, prices):
            f.write(f"{d.isoformat()},{p:.6f}\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "sample")
    parser.add_argument("--seed", type=int, default=2015)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    n_returns, event_index = 260, 230
    dates = weekdays(dt.date(2014, 1, 2), n_returns + 1)
    market_growth = np.exp(rng.normal(0.0003, 0.01, n_returns))
    market = 1800.0 * np.concatenate([[1.0], np.cumprod(market_growth)])

    (args.out / "prices").mkdir(parents=True, exist_ok=True)
    write_prices(args.out / "market.csv", dates, market)

    event_day = dates[event_index + 1]
    with open(args.out / "events.csv", "w") as f:
        f.write("instrument_id,date,label\n")
        for sid, label, alpha, beta, sigma, shocks in STOCKS:
            growth = alpha * market_growth**beta * np.exp(rng.normal(0.0, sigma, n_returns))
            for offset, shock in shocks.items():
                growth[event_index + offset] *= 1.0 + shock
            prices = 40.0 * np.concatenate([[1.0], np.cumprod(growth)])
            write_prices(args.out / "prices" / f"{sid}.csv", dates, prices)
            f.write(f"{sid},{event_day.isoformat()},{label}\n")

    (args.out / "run.cfg").write_text(
        "# Sample batch run; paths are relative to this file.\n"
        "price_dir = prices\n"
        "market_file = market.csv\n"
        "events_file = events.csv\n"
        "output = out/report.csv\n"
        "n_scenarios = 5000000\n"
        "seed = 1\n"
        "mode = iid\n"
    )


if __name__ == "__main__":
    main()
