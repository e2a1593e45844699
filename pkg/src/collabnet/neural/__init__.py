from .common import TrainReport, load_params, save_params
from .lstm import LstmConfig, init_lstm_params, lstm_backward, lstm_forward, lstm_loss, lstm_train
from .gcn import (GcnConfig, StratificationError, gcn_backward, gcn_forward,
                  gcn_loss, gcn_train, init_gcn_params, normalized_adjacency,
                  stratified_split)

__all__ = [
    "TrainReport", "save_params", "load_params",
    "LstmConfig", "init_lstm_params", "lstm_forward", "lstm_backward",
    "lstm_loss", "lstm_train",
    "GcnConfig", "StratificationError", "init_gcn_params",
    "normalized_adjacency", "gcn_forward", "gcn_backward", "gcn_loss",
    "gcn_train", "stratified_split",
]
