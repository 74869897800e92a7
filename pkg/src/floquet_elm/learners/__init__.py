"""Trainable readouts, reservoir recursion, Mackey-Glass generator, metrics."""
from .mackey_glass import MackeyGlassParams, mackey_glass
from .metrics import (accuracy, confusion_matrix, nrmse, phase_portrait, r_squared, rmse,
                      slope_sign_changes)
from .readout import (ReadoutModel, Standardizer, TrainingDivergence, feature_matrix, harmonic_selection,
                      load_model, predict, predict_proba, save_model, softmax_grad, softmax_loss,
                      train_linear, train_softmax)
from .reservoir import (ReservoirConfig, ReservoirState, TrainedReservoir, collect_states, rc_forecast,
                        rc_predict_one_step, rc_step, rc_train, valid_horizon)

__all__ = [n for n in dir() if not n.startswith("_")]
