"""Configuration and constants for the duplication pipeline."""

DEFAULT_TAU_P = 0.31
DEFAULT_TAU_S = 0.33
DEFAULT_TAU_L = 0.5

# Conservative semantic threshold used on real campaign data (precision over recall).
REAL_DATA_TAU_S = 0.2

THRESHOLD_PRESETS = {
    "synthetic": {"tau_p": DEFAULT_TAU_P, "tau_s": DEFAULT_TAU_S, "tau_l": DEFAULT_TAU_L},
    "real-data": {"tau_p": DEFAULT_TAU_P, "tau_s": REAL_DATA_TAU_S, "tau_l": DEFAULT_TAU_L},
}

MIN_LETTERS = 30
RETWEET_PREFIX = "RT @"
SHORTENER_HOSTS = ("t.co", "bit.ly", "x.co", "ow.ly", "buff.ly", "dlvr.it", "ift.tt", "goo.gl", "tinyurl.com", "is.gd")
UNDETERMINED_LANGUAGE = "und"

GRAPHEME_ALGORITHMS = ("lv", "ro", "gz", "bg_w", "bg_l")
DEFAULT_GRAPHEME_ALGORITHM = "lv"
GZIP_LEVEL = 9

DEFAULT_SEED = 20231
BOOTSTRAP_RESAMPLES = 10_000
BOOTSTRAP_CHUNK = 1_000
CI_LEVEL = 0.95

EMBEDDING_BATCH_SIZE = 64
EMBEDDING_CONCURRENCY = 4
EMBEDDING_MAX_RETRIES = 5
EMBEDDING_BACKOFF_SECONDS = 1.0
EMBEDDING_TIMEOUT_SECONDS = 30.0
EMBEDDING_TOKEN_ENV = "DUPLICATION_EMBEDDING_TOKEN"
RETRYABLE_STATUS = (429, 500, 502, 503, 504)

LANGUAGE_ID_CONCURRENCY = 4
LANGUAGE_ID_BATCH_SIZE = 256

# Theme order matters: the first theme with a matching keyword wins.
DEFAULT_THEMES = {
    "politics": [
        "#AlexSaab",
        "Alex Saab",
        "#YoConDavid",
        "#KuriGanador",
        "#KuriGobernador",
        "#RenunciaClaraLuz",
        "#GobernadoraNoSeras",
        "#VamosBorrego",
        "#BrozoConSamuel",
        "#SamuelConBrozo",
        "#VoyConChristian",
    ],
    "entertainment": ["#TWDxSTARChannel", "#LordVideoCentro"],
    "alcohol": ["#SoyPuraPiraña", "#INDIOsustentable"],
}
UNLABELED_THEME = "unlabeled"

LABEL_COLOR_MAP = {
    "copy_pasta": "#1f77b4",
    "rewording": "#ff7f0e",
    "translation": "#2ca02c",
}

GRAPH_FORMATS = ("graphml", "dot", "jsonl")
