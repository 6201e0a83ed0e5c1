"""Reference outage-rate measurements for the three preset scenarios.

Used only as a comparison column in reports; no computation depends on
these numbers. Keys are (scenario preset name, policy name); values are
outage-rate fractions.
"""

PUBLISHED_OUTAGE_RATES = {
    ("scenario_a", "binary"): 0.0091,
    ("scenario_a", "sum-aoi"): 0.0028,
    ("scenario_a", "peak-aoi"): 0.0029,
    ("scenario_a", "exp-peak-aoi"): 0.0025,
    ("scenario_a", "naive"): 0.0073,
    ("scenario_a", "min-error"): 0.0026,
    ("scenario_b", "binary"): 0.0331,
    ("scenario_b", "sum-aoi"): 0.0208,
    ("scenario_b", "peak-aoi"): 0.0168,
    ("scenario_b", "exp-peak-aoi"): 0.0139,
    ("scenario_b", "naive"): 0.0325,
    ("scenario_b", "min-error"): 0.0165,
    ("scenario_c", "binary"): 0.0137,
    ("scenario_c", "sum-aoi"): 0.0132,
    ("scenario_c", "peak-aoi"): 0.0125,
    ("scenario_c", "exp-peak-aoi"): 0.0120,
    ("scenario_c", "naive"): 0.0394,
    ("scenario_c", "min-error"): 0.0121,
}
