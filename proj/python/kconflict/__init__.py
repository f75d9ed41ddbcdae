"""Python bindings for the kconflict knowledge-conflict QA toolkit.

Records are plain dicts with the same fields as the JSONL files the CLI
reads and writes.
"""

import json

from . import _kconflict
from ._kconflict import (
    KconflictError,
    auroc,
    binary_accuracy,
    exact_match,
    memorization_ratio,
    normalize_answer,
    selection_count,
)

__all__ = [
    "KconflictError",
    "auroc",
    "binary_accuracy",
    "confidence_drop",
    "entity_study",
    "exact_match",
    "memorization_ratio",
    "mix",
    "normalize_answer",
    "perturb",
    "predict_calibrator",
    "selection_count",
    "simulate",
    "substitute",
    "toy_corpus",
    "train_calibrator",
]


def substitute(question, passages, strategy="random", *, fraction=None,
               all_except_top_k=None, count=None, substitute=None, seed,
               pool_questions=None):
    """Replaces answer mentions in the selected passages.

    Returns ``(passages, record)``. ``substitute`` fixes the replacement;
    otherwise it is drawn from the answers of ``pool_questions``.
    """
    pool = None if pool_questions is None else json.dumps(pool_questions)
    out = json.loads(_kconflict.substitute(
        json.dumps(question), json.dumps(passages), strategy, fraction,
        all_except_top_k, count, substitute, seed, pool))
    return out["passages"], out["record"]


def perturb(question, passages, kind, *, infiller=None, timeout_ms=10000):
    """Negation, modality, future or infilling rewrite of answer sentences.

    Returns ``(passages, coverage_stats)``.
    """
    out = json.loads(_kconflict.perturb(
        json.dumps(question), json.dumps(passages), kind, infiller, timeout_ms))
    return out["passages"], out["stats"]


def mix(qid, passages_a, answers_a, passages_b, answers_b, n):
    """Mixes two evidence sets into ``n`` passages, half from each side."""
    return json.loads(_kconflict.mix(
        qid, json.dumps(passages_a), list(answers_a), json.dumps(passages_b),
        list(answers_b), n))


def simulate(question, passages, config=None):
    """Prediction record from the deterministic simulated reader."""
    return json.loads(_kconflict.simulate(
        json.dumps(question), json.dumps(passages), json.dumps(config or {})))


def train_calibrator(features, labels, *, rounds=100, learning_rate=0.5,
                     subsample=0.5, max_depth=6, l2_leaf_reg=1.0, seed=0):
    """Trains the gradient-boosted abstention calibrator.

    Returns ``(model, loss_history)``; ``model`` is the JSON-ready dict the
    CLI saves.
    """
    out = json.loads(_kconflict.train_calibrator(
        [list(map(float, x)) for x in features], [int(y) for y in labels],
        rounds, learning_rate, subsample, max_depth, l2_leaf_reg, seed))
    return out["model"], out["loss_history"]


def predict_calibrator(model, features):
    """Answer probabilities for each feature vector."""
    return _kconflict.predict_calibrator(
        json.dumps(model), [list(map(float, x)) for x in features])


def confidence_drop(pairs):
    """Drop statistics over ``(before, after)`` confidence pairs."""
    return json.loads(_kconflict.confidence_drop([tuple(p) for p in pairs]))


def toy_corpus(seed=_kconflict.TOY_SEED):
    """The synthetic toy corpus as ``questions``, ``passages`` (one list per
    question) and ``train_questions``."""
    return json.loads(_kconflict.toy_corpus(seed))


def entity_study(config):
    """Runs the entity-substitution study grid over files named in
    ``config``."""
    return json.loads(_kconflict.entity_study(json.dumps(config)))
