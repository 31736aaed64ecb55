"""Label schema: the 26 discrete emotion categories, the sentiment order,
and the default emotion -> sentiment assignment.

The emotion list follows the EMOTIC distribution order.  The sentiment
assignment ships as data and can be overridden by a JSON file (see
``selinet.postprocess.SentimentMap``); only a handful of rows are fixed
by published fixtures, the rest follow the usual affect taxonomy.
"""

EMOTIONS = [
    "Affection",
    "Anger",
    "Annoyance",
    "Anticipation",
    "Aversion",
    "Confidence",
    "Disapproval",
    "Disconnection",
    "Disquietment",
    "Doubt/Confusion",
    "Embarrassment",
    "Engagement",
    "Esteem",
    "Excitement",
    "Fatigue",
    "Fear",
    "Happiness",
    "Pain",
    "Peace",
    "Pleasure",
    "Sadness",
    "Sensitivity",
    "Suffering",
    "Surprise",
    "Sympathy",
    "Yearning",
]

SENTIMENTS = ["positive", "negative", "neutral"]

DEFAULT_SENTIMENT_MAP = {
    "Affection": "positive",
    "Anger": "negative",
    "Annoyance": "negative",
    "Anticipation": "neutral",
    "Aversion": "negative",
    "Confidence": "positive",
    "Disapproval": "negative",
    "Disconnection": "negative",
    "Disquietment": "negative",
    "Doubt/Confusion": "neutral",
    "Embarrassment": "negative",
    "Engagement": "positive",
    "Esteem": "positive",
    "Excitement": "positive",
    "Fatigue": "negative",
    "Fear": "negative",
    "Happiness": "positive",
    "Pain": "negative",
    "Peace": "positive",
    "Pleasure": "positive",
    "Sadness": "negative",
    "Sensitivity": "neutral",
    "Suffering": "negative",
    "Surprise": "neutral",
    "Sympathy": "positive",
    "Yearning": "neutral",
}
