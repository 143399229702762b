"""Minimal neural toolkit: layers, Adam, autoencoders and chunk encoders."""

from .autoencoders import (BIG_AE, BIG_LSTM_AE, SMALL_AE, SMALL_LSTM_AE,
                           DenseAeArch, DenseAutoencoder, Encoder,
                           LSTMAutoencoder, LstmAeArch, TrainConfig,
                           init_network, load_encoder, save_autoencoder,
                           segment_corpus, train_autoencoder)
from .external import (RandomProjectionEncoder, external_features,
                       external_segment_features)
from .layers import LSTM, Dense, Dropout, RepeatVector, ReLU, Reshape, Tanh
from .network import Adam, Sequential, mse_loss, softmax, softmax_cross_entropy

__all__ = [
    "Adam", "BIG_AE", "BIG_LSTM_AE", "Dense", "DenseAeArch", "DenseAutoencoder",
    "Dropout", "Encoder", "LSTM", "LSTMAutoencoder", "LstmAeArch",
    "RandomProjectionEncoder", "ReLU", "RepeatVector", "Reshape", "SMALL_AE",
    "SMALL_LSTM_AE", "Sequential", "Tanh", "TrainConfig", "external_features",
    "external_segment_features", "init_network", "load_encoder", "mse_loss",
    "save_autoencoder", "segment_corpus", "softmax", "softmax_cross_entropy",
    "train_autoencoder",
]
