# external imports
from typing import List, Optional, Tuple

import numpy as np

# internal imports
from core.exceptions import (
    InvalidParameterError,
    MeshValidationError,
    TopologyMismatchError,
    TrainingDivergedError,
)
from core.logger import setup_logger
from modules.autodiff import Mode, Tape, Tensor, backward
from modules.metrics import summarize_predictions
from modules.nn import BaseGraphModel, GraphStructure
from modules.preprocess import GraphDataset, Split, apply_normalization, fit_normalization
from modules.train.losses import log_mse, loss_for
from modules.train.optimizer import Adam
from modules.train.schemas import EpochRecord, StopReason, TrainConfig, TrainReport
from utils.helper_funcs import Stopwatch, spawn_rngs

logger = setup_logger(__name__)


def relative_improvement(previous: float, current: float) -> float:
    """(previous - current) / |previous|, 0 when the previous loss is 0."""
    if previous == 0:
        return 0.0
    return (previous - current) / abs(previous)


class TrainingHandler:
    """
    Per-graph full-batch training of one model on one dataset.

    Every epoch visits the training graphs in a seeded shuffled order and takes
    one Adam step per graph. Every `plateau_check_interval` epochs the mean loss
    of the last window is compared with the previous window (the first window
    is compared with the epoch-1 loss) and training stops when the relative
    improvement falls below `plateau_relative_tolerance`.

    Args:
        model: Freshly built or partially trained model
        dataset: Topology-identical graphs with train/val splits; its
            normalization is fitted on the train split when missing
        config: Optimizer and schedule settings
    """

    def __init__(self, model: BaseGraphModel, dataset: GraphDataset, config: Optional[TrainConfig] = None):
        self.model = model
        self.dataset = dataset
        self.config = config or TrainConfig()

        train_ids = dataset.indices(Split.TRAIN)
        if not train_ids:
            raise InvalidParameterError("the train split is empty")
        for i in train_ids:
            if dataset.graphs[i].wear is None:
                raise MeshValidationError(f"{dataset.source_ids[i]}: training graph has no wear target")
        if dataset.normalization is None:
            dataset.normalization = fit_normalization([dataset.graphs[i] for i in train_ids])

        self.train_ids = train_ids
        self.val_ids = [i for i in dataset.indices(Split.VAL) if dataset.graphs[i].wear is not None]
        self.features = [
            apply_normalization(g, dataset.normalization).features for g in dataset.graphs
        ]
        self.structure = GraphStructure.from_graph(dataset.graphs[0])
        expected = model.node_count if model.spec.variant.needs_node_count else None
        if expected is not None and self.structure.n_nodes != expected:
            raise TopologyMismatchError(expected, self.structure.n_nodes, context=dataset.source_ids[0])

        self.order_rng, self.dropout_rng = spawn_rngs(self.config.seed, 2)
        self.optimizer = Adam(model.parameters(), self.config)
        self.loss_fn = loss_for(self.config.loss)

    def _target(self, index: int) -> np.ndarray:
        return self.dataset.graphs[index].wear.reshape(-1, 1)

    def _predict(self, index: int) -> np.ndarray:
        out = self.model.forward(Tensor(self.features[index]), self.structure, mode=Mode.EVAL)
        return out.values[:, 0]

    def _step(self, epoch: int, index: int) -> Tuple[float, float]:
        self.optimizer.zero_grad()
        target = self._target(index)
        with Tape() as tape:
            pred = self.model.forward(
                Tensor(self.features[index]), self.structure, mode=Mode.TRAIN, rng=self.dropout_rng
            )
            loss = self.loss_fn(pred, Tensor(target))
        value = loss.item()
        source_id = self.dataset.source_ids[index]
        if not np.isfinite(value):
            tape.clear()
            raise TrainingDivergedError(epoch, source_id, value)
        residual = pred.values - target
        mse = float(np.mean(residual * residual))

        backward(loss, tape)
        for name, tensor in self.optimizer.params.items():
            if tensor.grad is not None and not np.isfinite(tensor.grad).all():
                raise TrainingDivergedError(epoch, source_id, float("nan"))
        self.optimizer.step()
        return value, mse

    def _validate(self) -> Tuple[float, float]:
        if not self.val_ids:
            return float("nan"), float("nan")
        pred = np.concatenate([self._predict(i) for i in self.val_ids])
        target = np.concatenate([self.dataset.graphs[i].wear for i in self.val_ids])
        residual = pred - target
        return float(np.mean(np.abs(residual))), float(np.mean(residual * residual))

    def _plateau(self, losses: List[float], epoch: int) -> bool:
        tolerance = self.config.plateau_relative_tolerance
        interval = self.config.plateau_check_interval
        if tolerance is None or epoch % interval != 0:
            return False
        current = float(np.mean(losses[epoch - interval:epoch]))
        previous = losses[0] if epoch == interval else float(np.mean(losses[epoch - 2 * interval:epoch - interval]))
        improvement = relative_improvement(previous, current)
        logger.debug(f"Plateau check at epoch {epoch}: relative improvement {improvement:.3e}")
        return improvement < tolerance

    def run(self) -> TrainReport:
        config = self.config
        report = TrainReport(config=config)
        losses: List[float] = []
        logger.info(
            f"Training {self.model.spec.variant} on {len(self.train_ids)} graphs "
            f"({len(self.val_ids)} validation) for up to {config.epochs} epochs"
        )

        for epoch in range(1, config.epochs + 1):
            with Stopwatch() as watch:
                order = self.order_rng.permutation(self.train_ids)
                step_losses, step_mses = zip(*(self._step(epoch, int(i)) for i in order))
                val_mae, val_mse = self._validate()

            train_loss = float(np.mean(step_losses))
            losses.append(train_loss)
            report.epochs.append(EpochRecord(
                epoch=epoch,
                train_loss=train_loss,
                train_log_mse=log_mse(float(np.mean(step_mses))),
                val_mae=val_mae,
                val_mse=val_mse,
                seconds=watch.seconds,
            ))
            if epoch == 1 or epoch % config.log_every == 0:
                logger.info(
                    f"epoch {epoch}: {config.loss} {train_loss:.6g}, val MAE {val_mae:.6g} ({watch.seconds:.3f}s)"
                )
            if self._plateau(losses, epoch):
                report.stop_reason = StopReason.PLATEAU
                logger.info(f"Loss plateaued, stopping after epoch {epoch}")
                break

        report.final_metrics = self._final_metrics()
        return report

    def _final_metrics(self) -> dict:
        metrics = {}
        for split, ids in (("train", self.train_ids), ("val", self.val_ids)):
            if not ids:
                continue
            summary = summarize_predictions(
                np.concatenate([self._predict(i) for i in ids]),
                np.concatenate([self.dataset.graphs[i].wear for i in ids]),
            )
            metrics.update({
                f"{split}_mae": summary.mae,
                f"{split}_mse": summary.mse,
                f"{split}_error_percent": summary.error_percent,
            })
        return metrics


def train(
    model: BaseGraphModel, dataset: GraphDataset, config: Optional[TrainConfig] = None
) -> Tuple[BaseGraphModel, TrainReport]:
    """
    Train `model` in place on the train split of `dataset`.

    Raises:
        InvalidParameterError: empty train split
        TopologyMismatchError: the dataset does not fit a topology-bound model
        TrainingDivergedError: a loss or gradient became NaN or infinite
    """
    try:
        report = TrainingHandler(model, dataset, config).run()
    except TrainingDivergedError as e:
        logger.error(f"Training diverged: {str(e)}")
        raise e
    return model, report
