"""End-to-end detection pipelines: featurization + one trained model.

``prepare`` performs the shared, leakage-safe work once (split, fit the
vectorizer/encoders/term list on the training rows only, encode every
row); ``train_pipeline`` then fits any of the four model kinds on the same
split, so compare-style runs score every model on identical test indices.
"""

from dataclasses import dataclass

import numpy as np

from . import bilstm, bundle as bundle_mod, forests, metrics, trainer
from .config import MODEL_KINDS, RunConfig, config_from_dict
from .errors import DataError, ModelStoreError, ShapeError
from .features import CategoricalEncoder, TextVectorizer, Vocabulary
from .ingest import Dataset


@dataclass
class PreparedData:
    dataset: Dataset
    splits: trainer.SplitResult
    labels: np.ndarray
    encoder: CategoricalEncoder
    numeric: np.ndarray
    vectorizer: TextVectorizer | None = None
    ids: np.ndarray | None = None
    terms: list | None = None
    tabular: np.ndarray | None = None

    def packed_bilstm(self) -> np.ndarray:
        """[token ids | numeric] rows, the BiLstmClassifier input layout."""
        return np.hstack([self.ids.astype(np.float64), self.numeric])


def prepare(dataset: Dataset, cfg: RunConfig, kinds=("bilstm",)) -> PreparedData:
    """Split, then fit all featurizers on the training rows only."""
    postings = dataset.postings
    splits = trainer.split_dataset(len(postings), cfg.seed)
    train_postings = [postings[i] for i in splits.train]
    labels = np.array([p.fraudulent for p in postings], dtype=np.int64)
    encoder = CategoricalEncoder().fit(train_postings)
    prepared = PreparedData(
        dataset=dataset,
        splits=splits,
        labels=labels,
        encoder=encoder,
        numeric=encoder.transform(postings),
    )
    texts = [p.full_text for p in postings]
    train_texts = [postings[i].full_text for i in splits.train]
    if "bilstm" in kinds:
        prepared.vectorizer = TextVectorizer(
            max_tokens=cfg.features.max_tokens,
            sequence_length=cfg.features.sequence_length,
        ).fit(train_texts)
        prepared.ids = prepared.vectorizer.transform(texts)
    if any(k != "bilstm" for k in kinds):
        prepared.terms = forests.select_terms(train_texts, cfg.features.tabular_terms)
        prepared.tabular = forests.build_tabular(prepared.numeric, texts, prepared.terms)
    return prepared


def _make_estimator(kind: str, cfg: RunConfig, vocab_size: int | None = None):
    if kind == "bilstm":
        return bilstm.BiLstmClassifier(
            vocab_size=vocab_size,
            embedding_dim=cfg.bilstm.embedding_dim,
            hidden_units=cfg.bilstm.hidden_units,
            dense_units=cfg.bilstm.dense_units,
            sequence_length=cfg.features.sequence_length,
            learning_rate=cfg.train.learning_rate,
            batch_size=cfg.train.batch_size,
            max_epochs=cfg.train.max_epochs,
            patience=cfg.train.patience,
            seed=cfg.seed,
        )
    if kind == "random_forest":
        c = cfg.random_forest
        return forests.RandomForest(
            n_trees=c.n_trees, max_depth=c.max_depth,
            min_samples_leaf=c.min_samples_leaf, bootstrap=c.bootstrap, seed=cfg.seed,
        )
    if kind == "gbm":
        c = cfg.gbm
        return forests.GradientBoosting(
            n_rounds=c.n_rounds, learning_rate=c.learning_rate,
            max_depth=c.max_depth, min_samples_leaf=c.min_samples_leaf, seed=cfg.seed,
        )
    if kind == "leafwise_gbm":
        c = cfg.leafwise_gbm
        return forests.LeafwiseGradientBoosting(
            n_rounds=c.n_rounds, learning_rate=c.learning_rate, max_leaves=c.max_leaves,
            n_bins=c.n_bins, min_samples_leaf=c.min_samples_leaf, seed=cfg.seed,
        )
    raise DataError(f"unknown model kind {kind!r}")


class DetectionPipeline:
    """A fitted featurizer stack plus one trained classifier."""

    def __init__(self, kind: str, cfg: RunConfig, encoder, model,
                 vectorizer=None, terms=None, history=None, test_metrics=None):
        self.kind = kind
        self.cfg = cfg
        self.encoder = encoder
        self.model = model
        self.vectorizer = vectorizer
        self.terms = terms
        self.history = history
        self.test_metrics = test_metrics

    # -- prediction ---------------------------------------------------------

    def featurize(self, postings) -> np.ndarray:
        numeric = self.encoder.transform(postings)
        texts = [p.full_text for p in postings]
        if self.kind == "bilstm":
            ids = self.vectorizer.transform(texts)
            return np.hstack([ids.astype(np.float64), numeric])
        return forests.build_tabular(numeric, texts, self.terms)

    def predict_scores(self, postings) -> np.ndarray:
        return self.model.decision_scores(self.featurize(postings))

    # -- persistence --------------------------------------------------------

    def to_bundle(self) -> bundle_mod.ModelBundle:
        config = {
            "run_config": self.cfg.to_dict(),
            "encoder_categories": self.encoder.categories_,
        }
        extra = {}
        tensors = ()
        if self.kind == "bilstm":
            config["model_config"] = {
                "vocab_size": self.model.config_.vocab_size,
                "embedding_dim": self.model.config_.embedding_dim,
                "hidden_units": self.model.config_.hidden_units,
                "dense_units": self.model.config_.dense_units,
                "sequence_length": self.model.config_.sequence_length,
                "numeric_width": self.model.config_.numeric_width,
                "seed": self.model.config_.seed,
            }
            extra["vocabulary"] = list(self.vectorizer.vocabulary_.id_to_token)
            tensors = [(name, t.values) for name, t in self.model.params_.named_tensors()]
        else:
            extra["ensemble"] = forests.ensemble_to_dict(self.model.model_)
            extra["terms"] = list(self.terms)
        return bundle_mod.make_bundle(
            kind=self.kind,
            config=config,
            tensors=tensors,
            extra=extra,
            history=self.history.to_dict() if self.history else None,
            test_metrics=self.test_metrics.to_dict() if self.test_metrics else None,
        )

    def save(self, directory) -> None:
        bundle_mod.save_model(self.to_bundle(), directory)

    @classmethod
    def from_bundle(cls, bundle: bundle_mod.ModelBundle) -> "DetectionPipeline":
        manifest = bundle.manifest
        kind = manifest["model"]
        cfg = config_from_dict(manifest["config"]["run_config"])
        encoder = CategoricalEncoder()
        encoder.categories_ = {
            k: list(v) for k, v in manifest["config"]["encoder_categories"].items()
        }
        encoder.width_ = 4 + sum(len(v) for v in encoder.categories_.values())

        if kind == "bilstm":
            mc = manifest["config"]["model_config"]
            model_cfg = bilstm.ModelConfig(**mc)
            tokens = manifest["vocabulary"]
            vocab = Vocabulary(
                token_to_id={t: i for i, t in enumerate(tokens)},
                id_to_token=tuple(tokens),
                max_size=cfg.features.max_tokens,
            )
            vectorizer = TextVectorizer(
                max_tokens=cfg.features.max_tokens,
                sequence_length=mc["sequence_length"],
            )
            vectorizer.vocabulary_ = vocab
            model = _make_estimator(kind, cfg, vocab_size=mc["vocab_size"])
            try:
                model.params_ = bilstm.params_from_arrays(model_cfg, bundle.tensor)
            except ShapeError as exc:
                raise ModelStoreError(str(exc)) from exc
            model.config_ = model_cfg
            model.classes_ = np.array([0, 1])
            return cls(kind, cfg, encoder, model, vectorizer=vectorizer)

        ensemble = forests.ensemble_from_dict(manifest["ensemble"])
        model = _make_estimator(kind, cfg)
        model.model_ = ensemble
        model.classes_ = np.array([0, 1])
        return cls(kind, cfg, encoder, model, terms=list(manifest["terms"]))

    @classmethod
    def load(cls, directory) -> "DetectionPipeline":
        return cls.from_bundle(bundle_mod.load_model(directory))


def train_pipeline(dataset: Dataset, cfg: RunConfig, kind: str,
                   prepared: PreparedData | None = None) -> DetectionPipeline:
    """Fit one model kind on the prepared split and score the test rows."""
    if kind not in MODEL_KINDS:
        raise DataError(f"unknown model kind {kind!r}")
    if prepared is None:
        prepared = prepare(dataset, cfg, kinds=(kind,))
    splits = prepared.splits
    train_idx = np.array(splits.train, dtype=np.int64)
    val_idx = np.array(splits.validation, dtype=np.int64)
    test_idx = np.array(splits.test, dtype=np.int64)
    y = prepared.labels

    if kind == "bilstm":
        X = prepared.packed_bilstm()
        model = _make_estimator(kind, cfg, vocab_size=len(prepared.vectorizer.vocabulary_))
        model.fit(X[train_idx], y[train_idx], validation_data=(X[val_idx], y[val_idx]))
        history = model.history_
    else:
        X = prepared.tabular
        model = _make_estimator(kind, cfg)
        model.fit(X[train_idx], y[train_idx])
        history = None

    test_scores = model.decision_scores(X[test_idx])
    report = metrics.compute_report(y[test_idx], test_scores, cfg.threshold)
    return DetectionPipeline(
        kind=kind,
        cfg=cfg,
        encoder=prepared.encoder,
        model=model,
        vectorizer=prepared.vectorizer,
        terms=prepared.terms,
        history=history,
        test_metrics=report,
    )
